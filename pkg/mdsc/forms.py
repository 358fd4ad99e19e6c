from django import forms
from django.conf import settings

from .channel import MODES, SimPlan
from .cycles import MAX_K
from .decoder import DecodeConfig
from .exceptions import SpecValidationError, UnknownFixture
from .registry import load_registry


def mdsc_settings():
    return settings.MDSC_SETTINGS


def form_errors(form):
    """Flatten form errors into one line for command output and JSON error bodies"""
    parts = []
    for field, errors in form.errors.items():
        label = 'plan' if field == '__all__' else field
        parts.append(f"{label}: {' '.join(errors)}")
    return '; '.join(parts)


class FloatListField(forms.Field):
    """A list of floats, given as a JSON list or a comma separated string"""

    def to_python(self, value):
        if value in self.empty_values:
            return []
        if isinstance(value, str):
            value = [item for item in value.split(',') if item.strip()]
        if not isinstance(value, (list, tuple)):
            value = [value]
        try:
            return [float(item) for item in value]
        except (TypeError, ValueError):
            raise forms.ValidationError('Enter a list of numbers.', code='invalid')

    def validate(self, value):
        if self.required and not value:
            raise forms.ValidationError(self.error_messages['required'], code='required')


class MapReferenceField(forms.Field):
    """An MD map fixture name or an inline mapping set object"""

    def to_python(self, value):
        if value in self.empty_values:
            return None
        if isinstance(value, (str, dict)):
            return value
        raise forms.ValidationError('Give a map name or a mapping object.', code='invalid')


class CodeChoiceMixin:
    def __init__(self, *args, registry=None, **kwargs):
        super().__init__(*args, **kwargs)
        self.registry = registry or load_registry(mdsc_settings().get('FIXTURES_PATH'))

    def clean_code(self):
        name = self.cleaned_data['code']
        try:
            self.registry.code(name)
        except UnknownFixture as e:
            raise forms.ValidationError(str(e), code='unknown')
        return name


class SimPlanForm(CodeChoiceMixin, forms.Form):
    code = forms.CharField(max_length=20)
    L = forms.IntegerField(required=False, min_value=1)
    md_map = MapReferenceField(required=False)
    snr_db = FloatListField()
    max_frames = forms.IntegerField(required=False, min_value=1)
    min_bit_errors = forms.IntegerField(required=False, min_value=0)
    seed = forms.IntegerField(required=False, min_value=0)
    decoder = forms.JSONField(required=False)
    mode = forms.ChoiceField(choices=[(m, m) for m in MODES], required=False)
    window = forms.IntegerField(required=False, min_value=1)
    snr_convention = forms.CharField(required=False)

    def clean_decoder(self):
        decoder = self.cleaned_data.get('decoder') or {}
        if not isinstance(decoder, dict):
            raise forms.ValidationError('decoder must be an object.', code='invalid')
        return decoder

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        options = mdsc_settings()
        simulation = options.get('SIMULATION', {})
        decoder = {**DecodeConfig.from_settings(options.get('DECODER', {})).to_dict(), **cleaned_data['decoder']}
        data = {
            'code': cleaned_data['code'],
            'snr_db': cleaned_data['snr_db'],
            'L': cleaned_data.get('L'),
            'md_map': cleaned_data.get('md_map'),
            'max_frames': cleaned_data.get('max_frames') or simulation.get('MAX_FRAMES', 10 ** 6),
            'min_bit_errors': cleaned_data.get('min_bit_errors'),
            'seed': cleaned_data.get('seed') or 0,
            'decoder': decoder,
            'mode': cleaned_data.get('mode') or 'block',
            'window': cleaned_data.get('window'),
            'snr_convention': cleaned_data.get('snr_convention') or 'EbN0',
        }
        if data['min_bit_errors'] is None:
            data['min_bit_errors'] = simulation.get('MIN_BIT_ERRORS', 100)
        try:
            plan = SimPlan.from_dict(data)
        except SpecValidationError as e:
            raise forms.ValidationError(str(e), code='invalid')
        cleaned_data['plan'] = plan
        return cleaned_data


class OptimizeForm(CodeChoiceMixin, forms.Form):
    code = forms.CharField(max_length=20)
    L = forms.IntegerField(required=False, min_value=1)
    k = forms.TypedChoiceField(choices=[(k, k) for k in range(4, MAX_K + 1, 2)], coerce=int)
    L2 = forms.IntegerField(min_value=2)
    d = forms.IntegerField(min_value=1)
    T = forms.IntegerField(min_value=0)
    seed = forms.IntegerField(required=False, min_value=0)
    width = forms.IntegerField(required=False, min_value=1)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        spec = self.registry.code(cleaned_data['code'], cleaned_data.get('L'))
        if cleaned_data['d'] > cleaned_data['L2']:
            raise forms.ValidationError('Depth d cannot exceed the MD coupling length L2.', code='invalid')
        if cleaned_data['T'] > spec.gamma * spec.kappa:
            raise forms.ValidationError(
                f'Density T cannot exceed the {spec.gamma * spec.kappa} block positions.', code='invalid'
            )
        if not cleaned_data.get('width'):
            cleaned_data['width'] = mdsc_settings().get('TREE_WIDTH', 64)
        cleaned_data['spec'] = spec
        return cleaned_data


class CodeLengthForm(forms.Form):
    L = forms.IntegerField(required=False, min_value=1)


class MatrixExportForm(CodeLengthForm):
    format = forms.ChoiceField(choices=[('alist', 'alist'), ('matrix-market', 'matrix-market'), ('dense-text', 'dense-text')], required=False)
    md_map = forms.CharField(required=False, max_length=50)


class LatencyForm(forms.Form):
    W_D = forms.IntegerField(min_value=1)
    m = forms.IntegerField(min_value=0)
    L = forms.IntegerField(min_value=1)
    T_rec = forms.FloatField(min_value=0)
    T_dec = forms.FloatField(min_value=0)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        W, m, L = cleaned_data['W_D'], cleaned_data['m'], cleaned_data['L']
        if not m + 1 <= W <= L:
            raise forms.ValidationError(f'Window size must lie in {m + 1}..{L}.', code='invalid')
        return cleaned_data
