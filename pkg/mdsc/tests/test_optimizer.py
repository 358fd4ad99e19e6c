from django.test import SimpleTestCase, tag
from hypothesis import given, settings
from hypothesis import strategies as st

from mdsc.code_model import MDMappingSet
from mdsc.cycles import CycleCatalog, CycleSignature, classify_active, count_cycles, map_alternating_sum, middle_replica_catalog
from mdsc.exceptions import SpecValidationError
from mdsc.optimizer import (
    CycleIndex,
    build_solution_tree,
    construct_md,
    delta,
    predict_md_cycles,
    predict_md_spectrum,
    random_md,
    score,
    score_divisors,
    score_voting,
    tau,
)
from mdsc.registry import load_registry

from .factories import coded_instances, make_spec

SQUARE = CycleSignature(((0, 0), (0, 1), (1, 1), (1, 0)))


def dense_cycle_spec(L=3):
    """All-zero powers: every protograph cycle lifts to closed cycles"""
    return make_spec(CM=[[0, 0, 0, 0], [0, 0, 0, 0]], PM=[[0, 1, 0, 1], [1, 0, 0, 1]], z=3, m=1, L=L)


class ScoreTests(SimpleTestCase):
    def test_divisors_up_to_half(self):
        self.assertEqual(score_divisors(6), [1, 2, 3])
        self.assertEqual(score_divisors(4), [1, 2])
        self.assertEqual(score_divisors(5), [1])

    def test_balanced_relocation_keeps_cycle_active(self):
        grid = [[0, 1, 0], [0, 1, 0]]
        self.assertEqual(delta(SQUARE, grid, 3, 2, 3), 0)
        self.assertEqual(tau(0, 3), 3)
        self.assertEqual(score(SQUARE, grid, 3, 2, 3), 1)

    def test_unbalanced_relocation_lengthens_cycle(self):
        grid = [[1, 0, 0], [0, 0, 0]]
        self.assertEqual(score(SQUARE, grid, 3, 2, 3), 3)
        grid = [[2, 0, 0], [0, 0, 0]]
        self.assertEqual(score(SQUARE, grid, 4, 2, 3), 2)

    def test_tau_range_checked(self):
        with self.assertRaises(SpecValidationError):
            tau(4, 4)

    def test_vote_prefers_breaking_options(self):
        spec = dense_cycle_spec()
        catalog = middle_replica_catalog(spec, 4)
        index = CycleIndex(catalog, spec.gamma, spec.kappa, 3)
        zero = [[0] * spec.kappa for _ in range(spec.gamma)]
        position = catalog.signatures[0].seq[0]
        options, flagged = score_voting(position, index, zero, 3)
        self.assertFalse(flagged)
        self.assertNotIn(0, options)

    def test_unvisited_block_is_flagged(self):
        index = CycleIndex(CycleCatalog(k=4, signatures=(SQUARE,)), 2, 3, 3)
        zero = [[0] * 3 for _ in range(2)]
        self.assertEqual(score_voting((0, 2), index, zero, 3), ((0, 1, 2), True))
        self.assertEqual(score_voting((4, 5), index, zero, 3), ((0, 1, 2), True))

    def test_circulants_of_one_block_share_a_vote(self):
        index = CycleIndex(CycleCatalog(k=4, signatures=(SQUARE,)), 2, 3, 3)
        zero = [[0] * 3 for _ in range(2)]
        self.assertEqual(index.containing((2, 4)).tolist(), [True])
        self.assertEqual(score_voting((2, 4), index, zero, 3), score_voting((0, 1), index, zero, 3))
        self.assertEqual(index.participation(index.flat(zero)).tolist(), [1, 1, 0, 1, 1, 0])


class SolutionTreeTests(SimpleTestCase):
    def setUp(self):
        self.spec = dense_cycle_spec()
        self.catalog = middle_replica_catalog(self.spec, 4)

    def test_root_counts_whole_catalog(self):
        tree = build_solution_tree(self.spec, 4, 3, 3, 0, catalog=self.catalog)
        self.assertEqual(tree.root.active, len(self.catalog))
        self.assertEqual(tree.mapping(tree.pick(0)).density, 0)

    def test_depth_one_returns_zero_map_with_warning(self):
        with self.assertLogs('mdsc.optimizer', 'WARNING'):
            md = construct_md(self.spec, 4, 3, 1, 4, catalog=self.catalog)
        self.assertEqual(md.density, 0)

    def test_parameters_validated(self):
        with self.assertRaises(SpecValidationError):
            build_solution_tree(self.spec, 4, 2, 3, 1, catalog=self.catalog)
        with self.assertRaises(SpecValidationError):
            build_solution_tree(self.spec, 4, 3, 2, 9, catalog=self.catalog)
        with self.assertRaises(SpecValidationError):
            build_solution_tree(self.spec, 4, 3, 2, 1, catalog=self.catalog, width=0)
        with self.assertRaises(SpecValidationError):
            build_solution_tree(self.spec, 5, 3, 2, 1, catalog=self.catalog)

    def test_levels_never_add_active_cycles(self):
        tree = build_solution_tree(self.spec, 4, 3, 3, 4, catalog=self.catalog)
        actives = [active for _, _, active in tree.levels()]
        self.assertEqual(actives[0], len(self.catalog))
        self.assertLess(actives[1], actives[0])
        self.assertEqual(actives, sorted(actives, reverse=True))
        for leaf in tree.frontier:
            md = tree.mapping(leaf)
            self.assertEqual(md.density, leaf.level)
            self.assertEqual(len(tree.path(leaf)), leaf.level)
            self.assertEqual(len(classify_active(self.catalog, md, 2, 4)[0]), leaf.active)
            self.assertFalse(leaf.trimmed)

    def test_width_caps_surviving_leaves(self):
        tree = build_solution_tree(self.spec, 4, 3, 3, 3, catalog=self.catalog, width=1)
        self.assertEqual(len(tree.frontier), 1)

    def test_construction_is_deterministic_given_seed(self):
        first = construct_md(self.spec, 4, 3, 3, 3, seed=5, catalog=self.catalog)
        second = construct_md(self.spec, 4, 3, 3, 3, seed=5, catalog=self.catalog)
        self.assertEqual(first, second)

    def test_tree_export_lists_every_node(self):
        tree = build_solution_tree(self.spec, 4, 3, 3, 2, catalog=self.catalog)
        data = tree.to_dict()
        self.assertEqual(len(data['nodes']), len(tree.nodes))
        self.assertIsNone(data['nodes'][0]['parent'])
        self.assertEqual(set(data['leaves']), {node.id for node in tree.frontier})
        self.assertEqual(len(data['widths']), tree.depth)


class RandomMapTests(SimpleTestCase):
    def setUp(self):
        self.spec = dense_cycle_spec()

    def test_shared_map_has_requested_density(self):
        md = random_md(self.spec, 5, 3, 3, shared=True, seed=1)
        self.assertTrue(md.is_uniform)
        self.assertEqual(md.density, 5)
        self.assertEqual(md, random_md(self.spec, 5, 3, 3, shared=True, seed=1))

    def test_per_chain_maps_relocate_in_every_chain(self):
        md = random_md(self.spec, 4, 2, 3, shared=False, seed=3)
        self.assertEqual(len(md.maps), 3)
        for chain in md.maps:
            self.assertEqual(sum(1 for row in chain for t in row if t), 4)

    def test_density_bounded_by_block_positions(self):
        with self.assertRaises(SpecValidationError):
            random_md(self.spec, 9, 2, 2)

    def test_shared_relocation_keeps_girth(self):
        spec = load_registry().code('sc6')
        self.assertEqual(count_cycles(spec, 4), 0)
        for seed in range(3):
            md = random_md(spec, 9, 2, 3, shared=True, seed=seed)
            self.assertEqual(count_cycles(spec, 4, md=md), 0)


class SpectrumPredictionTests(SimpleTestCase):
    def test_unrelocated_chains_multiply_counts(self):
        spec = dense_cycle_spec()
        md = MDMappingSet.identity(spec, 2, 2)
        self.assertEqual(predict_md_cycles(spec, 4, md), {4: 2 * count_cycles(spec, 4)})

    def test_catalog_prediction_preserves_mass(self):
        spec = dense_cycle_spec()
        catalog = middle_replica_catalog(spec, 4)
        grid = [[1, 0, 0, 0], [0, 0, 0, 0]]
        spectrum = predict_md_spectrum(catalog, grid, 2, spec.z, spec.gamma, spec.kappa)
        self.assertTrue(set(spectrum) <= {4, 8})
        # lengths times counts add up to z * L2 * orbit per signature
        mass = sum(length * count for length, count in spectrum.items())
        expected = sum(spec.z * 2 * sig.orbit_size for sig in catalog)
        self.assertEqual(mass, expected)

    def test_broken_squares_become_cycles8(self):
        spec = dense_cycle_spec()
        md = MDMappingSet.uniform([[0, 0, 1, 0], [0, 0, 0, 0]], 2, 2)
        predicted = predict_md_cycles(spec, 4, md)
        self.assertGreater(predicted[8], 0)
        self.assertEqual(predicted.get(4, 0), count_cycles(spec, 4, md=md))
        self.assertLessEqual(predicted[8], count_cycles(spec, 8, md=md))

    @settings(max_examples=25, deadline=None)
    @given(coded_instances(max_z=5, max_L=3, max_L2=2))
    def test_longer_predictions_bounded_by_direct_count(self, instance):
        spec, md = instance
        predicted = predict_md_cycles(spec, 4, md)
        self.assertLessEqual(predicted.get(8, 0), count_cycles(spec, 8, md=md))

    @settings(max_examples=25, deadline=None)
    @given(coded_instances(max_z=7, max_L=4, max_L2=4), st.sampled_from([4, 6]))
    def test_prediction_matches_direct_count(self, instance, k):
        spec, md = instance
        predicted = predict_md_cycles(spec, k, md)
        self.assertEqual(predicted.get(k, 0), count_cycles(spec, k, md=md))

    @settings(max_examples=25, deadline=None)
    @given(coded_instances(max_z=7, max_L=4, max_L2=4), st.sampled_from([4, 6]))
    def test_activity_criteria_coincide(self, instance, k):
        spec, md = instance
        grid = md.shared_map
        catalog = middle_replica_catalog(spec, k)
        active, _ = classify_active(catalog, md, spec.gamma, spec.kappa)
        active = set(active)
        for sig in catalog:
            residue = delta(sig, grid, md.L2, spec.gamma, spec.kappa)
            irc = map_alternating_sum(sig, grid, spec.gamma, spec.kappa) % md.L2 == 0
            self.assertEqual(irc, residue == 0)
            self.assertEqual(irc, tau(residue, md.L2) == md.L2)
            self.assertEqual(irc, score(sig, grid, md.L2, spec.gamma, spec.kappa) == 1)
            self.assertEqual(irc, sig in active)


@tag('published', 'slow')
class PublishedOptimizerTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.spec = load_registry().code('sc1')
        cls.catalog = middle_replica_catalog(cls.spec, 6)

    def test_catalog_holds_each_class_once(self):
        self.assertEqual(len(self.catalog), 183)

    def test_small_tree_trajectory(self):
        tree = build_solution_tree(self.spec, 6, 3, 3, 5, catalog=self.catalog)
        self.assertEqual([active for _, _, active in tree.levels()], [183, 161, 140, 123, 107, 92])
        self.assertEqual(tree.widths[:4], [2, 4, 4, 2])
        first = [node for node in tree.nodes if node.level == 1]
        self.assertEqual([node.active for node in first], [161, 161])
        self.assertEqual(len({node.decision.position for node in first}), 1)

    def test_density_18_by_depth(self):
        for d, expected in ((2, 26), (3, 12), (4, 7), (5, 7)):
            with self.subTest(d=d):
                tree = build_solution_tree(self.spec, 6, 5, d, 18, catalog=self.catalog)
                self.assertEqual(min(node.active for node in tree.frontier), expected)
