"""Named code fixtures: constituent SC codes, MD mapping matrices and construction recipes"""
import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .code_model import MDMappingSet, SCCodeSpec
from .exceptions import FixtureError, SpecValidationError, UnknownFixture

logger = logging.getLogger(__name__)

DEFAULT_FIXTURES = Path(__file__).resolve().parent / 'data' / 'codes.json'


@dataclass(frozen=True)
class MapFixture:
    name: str
    title: str
    code: str
    L: int
    mapping: MDMappingSet


@dataclass(frozen=True)
class Recipe:
    name: str
    title: str
    code: str
    L: int
    L2: int
    d: int
    T: int
    k: int
    seed: int


class CodeRegistry:
    def __init__(self, codes, titles, lengths, maps, recipes):
        self.codes = codes
        self.titles = titles
        self.lengths = lengths
        self.maps = maps
        self.recipes = recipes
        self._built = {}

    @classmethod
    def from_json(cls, data):
        codes, titles, lengths, maps, recipes = {}, {}, {}, {}, {}
        try:
            for name, entry in data['codes'].items():
                codes[name] = SCCodeSpec.from_dict(entry)
                titles[name] = entry.get('title', name)
                lengths[name] = tuple(entry.get('lengths', [entry['L']]))
            for name, entry in data.get('maps', {}).items():
                code = codes[entry['code']]
                mapping = MDMappingSet.uniform(entry['map'], int(entry['L2']), int(entry['d']))
                mapping.check_against(code)
                maps[name] = MapFixture(name, entry.get('title', name), entry['code'], int(entry['L']), mapping)
            for name, entry in data.get('recipes', {}).items():
                if entry['code'] not in codes:
                    raise KeyError(entry['code'])
                recipes[name] = Recipe(
                    name=name, title=entry.get('title', name), code=entry['code'], L=int(entry['L']),
                    L2=int(entry['L2']), d=int(entry['d']), T=int(entry['T']), k=int(entry['k']),
                    seed=int(entry.get('seed', 0)),
                )
        except SpecValidationError as exc:
            raise FixtureError(f'fixture fails its invariants: {exc}') from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise FixtureError(f'malformed fixture file: {exc!r}') from exc
        return cls(codes, titles, lengths, maps, recipes)

    def names(self):
        return sorted(self.codes)

    def code(self, name, L=None):
        try:
            spec = self.codes[name]
        except KeyError:
            raise UnknownFixture(f'unknown code {name!r}; known: {", ".join(self.names())}') from None
        return spec.with_length(L) if L is not None else spec

    def map_names(self):
        return sorted(self.maps) + sorted(self.recipes)

    def map_code(self, name):
        """Name of the constituent code a map fixture or recipe is defined on"""
        if name in self.maps:
            return self.maps[name].code
        if name in self.recipes:
            return self.recipes[name].code
        raise UnknownFixture(f'unknown map {name!r}; known: {", ".join(self.map_names())}')

    def mapping(self, name):
        """
        Resolve a map fixture or run a recipe; returns ``(code spec, mapping set)``.

        A recipe is built once per registry.
        """
        if name in self.maps:
            fixture = self.maps[name]
            return self.code(fixture.code, fixture.L), fixture.mapping
        if name in self.recipes:
            if name not in self._built:
                from .optimizer import construct_md

                recipe = self.recipes[name]
                spec = self.code(recipe.code, recipe.L)
                logger.info('building %s from its recipe', recipe.title)
                self._built[name] = spec, construct_md(spec, recipe.k, recipe.L2, recipe.d, recipe.T, seed=recipe.seed)
            return self._built[name]
        raise UnknownFixture(f'unknown map {name!r}; known: {", ".join(self.map_names())}')

    def describe(self, name, L=None):
        spec = self.code(name, L)
        return {
            'name': name,
            'title': self.titles[name],
            'lengths': list(self.lengths[name]),
            'spec': spec.to_dict(),
            'length': spec.length,
            'rate': round(spec.design_rate, 4),
        }


@lru_cache(maxsize=4)
def _load(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FixtureError(f'fixture file {path} is not valid JSON: {exc}') from exc
    registry = CodeRegistry.from_json(data)
    logger.debug('loaded %d codes and %d maps from %s', len(registry.codes), len(registry.maps), path)
    return registry


def load_registry(path=None):
    return _load(str(path or DEFAULT_FIXTURES))
