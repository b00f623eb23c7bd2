"""
Experiment configuration files.

A configuration is a TOML document::

    experiment = "sharpness"
    output = "sharpness_failure.csv"

    [estimate]
    n = 1
    s = 0.0
    p = 1.2

    [sweep]
    M = [8, 16, 32, 64]

Each section is validated by its own Django form. Unknown sections and
keys are rejected, and every error names the line of the offending key.
"""
import hashlib
import logging
import re

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path

from django import forms
from django.conf import settings
from django.core.exceptions import ValidationError

from .constants import EXPERIMENTS, WEIGHT_MODEL_PARAMETERS, WEIGHT_SUITE
from .core import make_grid
from .exceptions import ConfigError, GridError

logger = logging.getLogger(__name__)


class _ListField(forms.Field):
    """A TOML array whose items are converted by ``item``."""

    item = None
    item_name = ''

    def to_python(self, value):
        if value in self.empty_values:
            return []
        if not isinstance(value, (list, tuple)):
            raise ValidationError(f'expected a list of {self.item_name}')
        try:
            return [self.convert(item) for item in value]
        except (TypeError, ValueError):
            raise ValidationError(f'expected a list of {self.item_name}, got {value!r}')

    def convert(self, value):
        if isinstance(value, bool):
            raise TypeError(value)
        return self.item(value)


class FloatListField(_ListField):
    item = float
    item_name = 'numbers'


class IntegerListField(_ListField):
    item_name = 'integers'

    def item(self, value):
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(value)
        return int(value)


class StringListField(_ListField):
    item_name = 'strings'

    def item(self, value):
        if not isinstance(value, str):
            raise TypeError(value)
        return value


class TopLevelForm(forms.Form):
    experiment = forms.ChoiceField(choices=[(name, name) for name in EXPERIMENTS])
    output = forms.CharField(required=False)


class GridForm(forms.Form):
    n = forms.IntegerField(min_value=1)
    N = forms.IntegerField(min_value=8)
    L = forms.FloatField()
    Nt = forms.IntegerField(min_value=2)
    T = forms.FloatField()


class EstimateForm(forms.Form):
    n = forms.IntegerField(min_value=1, required=False)
    gamma = forms.FloatField(min_value=1, required=False)
    s = forms.FloatField(required=False)
    p = forms.FloatField(min_value=1, required=False)
    alpha = forms.FloatField(required=False)
    k = forms.IntegerField(min_value=1, required=False)
    q = forms.FloatField(required=False)
    r = forms.FloatField(required=False)
    kind = forms.ChoiceField(
        required=False,
        choices=[('', ''), ('schrodinger', 'schrodinger'), ('wave', 'wave'), ('wave-frac', 'wave-frac'), ('kdv', 'kdv')],
    )
    x0 = forms.FloatField(required=False)
    refine = forms.BooleanField(required=False)

    def clean(self):
        cleaned = super().clean()
        q, p = cleaned.get('q'), cleaned.get('p')
        if q is not None and q <= 1:
            self.add_error('q', 'q must exceed 1')
        if cleaned.get('r') is not None and cleaned['r'] <= 1:
            self.add_error('r', 'r must exceed 1')
        if q is not None and p is not None and not p > q:
            self.add_error('q', 'q must be smaller than p')
        return cleaned


class SweepForm(forms.Form):
    M = FloatListField(required=False)
    k = IntegerListField(required=False)
    seeds = IntegerListField(required=False)
    weights = StringListField(required=False)
    band = FloatListField(required=False)
    m = forms.IntegerField(required=False)
    s_min = forms.FloatField(required=False)
    s_max = forms.FloatField(required=False)
    s_points = forms.IntegerField(min_value=2, required=False)
    inv_p_min = forms.FloatField(required=False)
    inv_p_max = forms.FloatField(required=False)
    inv_p_points = forms.IntegerField(min_value=2, required=False)

    def clean(self):
        cleaned = super().clean()
        for name in ('inv_p_min', 'inv_p_max'):
            value = cleaned.get(name)
            if value is not None and not 0 < value <= 1:
                self.add_error(name, f'{name} must lie in (0, 1], got {value}')
        low, high = cleaned.get('inv_p_min'), cleaned.get('inv_p_max')
        if low is not None and high is not None and low > high:
            self.add_error('inv_p_max', 'inv_p_max must not be smaller than inv_p_min')
        low, high = cleaned.get('s_min'), cleaned.get('s_max')
        if low is not None and high is not None and not low < high:
            self.add_error('s_max', 's_max must exceed s_min')
        return cleaned

    def clean_band(self):
        band = self.cleaned_data['band']
        if band and (len(band) != 2 or not 0 <= band[0] < band[1]):
            raise ValidationError('band must be [low, high] with 0 <= low < high')
        return band

    def clean_M(self):
        values = self.cleaned_data['M']
        if any(value <= 0 for value in values):
            raise ValidationError('M values must be positive')
        return values

    def clean_weights(self):
        names = self.cleaned_data['weights']
        unknown = [name for name in names if name not in WEIGHT_SUITE]
        if unknown:
            raise ValidationError(f'unknown weight {unknown[0]!r}; choose from {sorted(WEIGHT_SUITE)}')
        return names


class WeightForm(forms.Form):
    """Parameters of a model weight (see ``weight_model``) or of a potential profile."""

    model = forms.ChoiceField(choices=[(name, name) for name in WEIGHT_MODEL_PARAMETERS])
    value = forms.FloatField(required=False)
    width = forms.FloatField(required=False)
    time_width = forms.FloatField(required=False)
    floor = forms.FloatField(required=False)
    exponent = forms.FloatField(required=False)
    delta = forms.FloatField(required=False)
    half_side = forms.FloatField(required=False)
    time_interval = FloatListField(required=False)
    M = forms.FloatField(required=False)
    seed = forms.IntegerField(required=False)
    cell = forms.IntegerField(required=False)
    time_cell = forms.IntegerField(required=False)
    amplitude = forms.FloatField(required=False)

    required_parameters = {'power': 'exponent', 'bracket': 'delta', 'slab': 'M', 'cells': 'seed'}

    def clean(self):
        cleaned = super().clean()
        model = cleaned.get('model')
        if not model:
            return cleaned
        allowed = set(WEIGHT_MODEL_PARAMETERS[model]) | {'model', 'amplitude'}
        for name, value in list(cleaned.items()):
            if name not in allowed and value not in (None, []):
                self.add_error(name, f'not a parameter of the {model} model')
        needed = self.required_parameters.get(model)
        if needed and cleaned.get(needed) is None:
            self.add_error(needed, f'the {model} model needs {needed}')
        interval = cleaned.get('time_interval')
        if interval and len(interval) != 2:
            self.add_error('time_interval', 'time_interval must be [low, high]')
        return cleaned


def model_parameters(section):
    """``(model, keyword arguments)`` for ``weight_model`` from a validated weight section."""
    model = section['model']
    parameters = {
        name: section[name] for name in WEIGHT_MODEL_PARAMETERS[model]
        if section.get(name) not in (None, [])
    }
    if 'time_interval' in parameters:
        parameters['time_interval'] = tuple(parameters['time_interval'])
    return model, parameters


class SolveForm(forms.Form):
    tol = forms.FloatField(required=False)
    max_iter = forms.IntegerField(min_value=1, required=False)
    forcing = forms.FloatField(required=False)


SECTION_FORMS = {
    'grid': GridForm,
    'estimate': EstimateForm,
    'sweep': SweepForm,
    'weight': WeightForm,
    'potential': WeightForm,
    'solve': SolveForm,
}

# Section and key requirements per experiment
REQUIREMENTS = {
    'region': {'estimate': ('gamma', 'n')},
    'ratio': {'grid': (), 'estimate': ('gamma', 's', 'p'), 'weight': (), 'sweep': ('seeds', 'M')},
    'freq-local': {'grid': (), 'estimate': ('gamma', 'alpha', 'p'), 'weight': (), 'sweep': ('k',)},
    'sharpness': {'estimate': ('n', 's', 'p'), 'sweep': ('M',)},
    'mcnorm': {'grid': (), 'estimate': ('alpha', 'p', 'gamma', 'q'), 'sweep': ('weights',)},
    'solve': {'grid': (), 'estimate': ('gamma', 'p', 'kind'), 'potential': (), 'sweep': ('seeds',)},
    'kdv': {'grid': (), 'estimate': ('k', 's', 'p'), 'weight': (), 'sweep': ('seeds', 'M')},
    'smoothing': {'grid': (), 'sweep': ('seeds',)},
}

ONE_DIMENSIONAL = ('kdv', 'smoothing')


@dataclass
class ExperimentConfig:
    """
    A validated experiment configuration.

    ``sections`` maps section names to cleaned values with the keys that
    were absent from the file dropped. ``digest`` is the sha256 of the file.
    """

    experiment: str
    output: Path
    grid: object = None
    sections: dict = field(default_factory=dict)
    source: Path = None
    digest: str = ''

    def section(self, name):
        return self.sections.get(name, {})

    @property
    def estimate(self):
        return self.section('estimate')

    @property
    def sweep(self):
        return self.section('sweep')


def _key_lines(text):
    """Map ``(section, key)`` to the 1-based line that defines it."""
    lines = {}
    section = ''
    header = re.compile(r'^\s*\[\s*([^\]\s]+)\s*\]')
    assignment = re.compile(r'^\s*("?)([A-Za-z0-9_\-]+)\1\s*=')
    for number, line in enumerate(text.splitlines(), start=1):
        match = header.match(line)
        if match:
            section = match.group(1)
            lines.setdefault((section, None), number)
            continue
        match = assignment.match(line)
        if match:
            lines.setdefault((section, match.group(2)), number)
    return lines


def _decode_line(error):
    lineno = getattr(error, 'lineno', None)
    if lineno:
        return lineno
    match = re.search(r'line (\d+)', str(error))
    return int(match.group(1)) if match else None


def _first_error(form):
    name, messages = next(iter(form.errors.items()))
    return name, messages[0]


def _validate_section(name, values, lines):
    form_class = SECTION_FORMS.get(name)
    if form_class is None or not isinstance(values, dict):
        raise ConfigError(f'unknown section [{name}]', line=lines.get((name, None)) or lines.get(('', name)))

    unknown = [key for key in values if key not in form_class.base_fields]
    if unknown:
        key = unknown[0]
        raise ConfigError(f'unknown key {key!r} in [{name}]', line=lines.get((name, key)))

    form = form_class(data=values)
    if not form.is_valid():
        key, message = _first_error(form)
        line = lines.get((name, key)) or lines.get((name, None))
        raise ConfigError(f'[{name}] {key}: {message}', line=line)
    return {key: form.cleaned_data[key] for key in values}


def parse_config(text, source=None):
    """
    Validate a configuration document.

    Args:
        text: the TOML text.
        source: path the text was read from, used for relative outputs.

    Returns:
        ExperimentConfig.

    Raises:
        ConfigError: on malformed TOML, unknown sections or keys, invalid
            values, missing requirements or an invalid grid.
    """
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f'malformed TOML: {e}', line=_decode_line(e))

    lines = _key_lines(text)
    top = {key: value for key, value in document.items() if not isinstance(value, dict)}
    unknown = [key for key in top if key not in TopLevelForm.base_fields]
    if unknown:
        raise ConfigError(f'unknown key {unknown[0]!r}', line=lines.get(('', unknown[0])))
    form = TopLevelForm(data=top)
    if not form.is_valid():
        key, message = _first_error(form)
        raise ConfigError(f'{key}: {message}', line=lines.get(('', key)))
    experiment = form.cleaned_data['experiment']

    sections = {
        name: _validate_section(name, values, lines)
        for name, values in document.items() if isinstance(values, dict)
    }
    for name, keys in REQUIREMENTS[experiment].items():
        if name not in sections:
            raise ConfigError(f'{experiment} experiment needs a [{name}] section')
        missing = [key for key in keys if sections[name].get(key) in (None, '', [])]
        if missing:
            raise ConfigError(f'{experiment} experiment needs {missing[0]!r} in [{name}]', line=lines.get((name, None)))

    grid = None
    if 'grid' in sections:
        try:
            grid = make_grid(**{key: sections['grid'][key] for key in ('n', 'N', 'L', 'Nt', 'T')})
        except (GridError, KeyError) as e:
            raise ConfigError(f'invalid grid: {e}', line=lines.get(('grid', None)))
        if experiment in ONE_DIMENSIONAL and grid.n != 1:
            raise ConfigError(f'{experiment} experiment runs on the line; set n = 1', line=lines.get(('grid', 'n')))

    output = form.cleaned_data.get('output') or f'{experiment}.csv'
    return ExperimentConfig(
        experiment=experiment,
        output=Path(output),
        grid=grid,
        sections=sections,
        source=Path(source) if source else None,
        digest=hashlib.sha256(text.encode('utf-8')).hexdigest(),
    )


def load_config(path):
    """
    Read and validate a configuration file.

    Raises:
        ConfigError: if the file cannot be read or does not validate.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f'cannot read {path}: {e}')
    config = parse_config(text, source=path)
    logger.debug('loaded %s config from %s (sha256 %s)', config.experiment, path, config.digest)
    return config


def resolve_output(config, override=None):
    """Output path: ``override`` if given, else the config's, relative ones under ``DISPLAB_OUTPUT_DIR``."""
    path = Path(override) if override else config.output
    if not path.is_absolute():
        path = Path(settings.DISPLAB_OUTPUT_DIR) / path
    return path
