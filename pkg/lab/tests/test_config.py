"""
Tests for configuration parsing and validation.
"""
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from lab.config import load_config, parse_config, resolve_output
from lab.exceptions import ConfigError

REGION = """\
experiment = "region"

[estimate]
gamma = 2
n = 1
"""

KDV = """\
experiment = "kdv"

[grid]
n = {n}
N = 64
L = 8.0
Nt = 17
T = 1.0

[estimate]
k = 1
s = 0.0
p = 1.3

[weight]
model = "gaussian"

[sweep]
seeds = [1]
M = [2, 4]
"""


class ParseTests(SimpleTestCase):

    def test_shipped_configurations_validate(self):
        paths = sorted((Path(settings.BASE_DIR) / 'configs').glob('*.toml'))
        self.assertTrue(paths)
        for path in paths:
            with self.subTest(config=path.name):
                config = load_config(path)
                self.assertEqual(config.output.name, path.with_suffix('.csv').name)

    def test_ratio_configuration(self):
        config = load_config(Path(settings.BASE_DIR) / 'configs' / 'ratio.toml')
        self.assertEqual(config.experiment, 'ratio')
        self.assertEqual((config.grid.N, config.grid.Nt), (512, 129))
        self.assertEqual(config.sweep['M'], [4.0, 8.0, 16.0, 32.0])
        self.assertEqual(config.sweep['seeds'], [1, 2])
        self.assertEqual(config.section('weight')['model'], 'gaussian')
        self.assertEqual(len(config.digest), 64)

    def test_absent_keys_are_dropped(self):
        config = parse_config(REGION)
        self.assertEqual(config.estimate, {'gamma': 2.0, 'n': 1})
        self.assertEqual(config.sweep, {})
        self.assertIsNone(config.grid)
        self.assertEqual(config.output, Path('region.csv'))

    def test_digest_follows_the_text(self):
        self.assertNotEqual(parse_config(REGION).digest, parse_config(REGION + '\n').digest)


class ErrorTests(SimpleTestCase):
    """Every rejection names the offending line when there is one."""

    def assertConfigError(self, text, fragment, line=None):
        with self.assertRaises(ConfigError) as cm:
            parse_config(text)
        self.assertIn(fragment, str(cm.exception))
        self.assertEqual(cm.exception.line, line)
        if line is not None:
            self.assertTrue(str(cm.exception).startswith(f'line {line}: '))

    def test_unknown_key(self):
        self.assertConfigError(REGION.replace('gamma', 'gama'), "'gama'", line=4)

    def test_invalid_value(self):
        self.assertConfigError(REGION.replace('n = 1', 'n = 0'), '[estimate] n', line=5)
        self.assertConfigError(REGION.replace('gamma = 2', 'gamma = "two"'), '[estimate] gamma', line=4)

    def test_unknown_experiment(self):
        self.assertConfigError(REGION.replace('"region"', '"heat"'), 'experiment', line=1)

    def test_unknown_section(self):
        self.assertConfigError(REGION + '\n[plot]\ncolour = "red"\n', 'unknown section [plot]', line=7)

    def test_missing_section(self):
        self.assertConfigError('experiment = "sharpness"\n\n[estimate]\nn = 1\ns = 0.0\np = 1.2\n', '[sweep] section')

    def test_missing_key(self):
        self.assertConfigError(REGION.replace('n = 1\n', ''), "'n' in [estimate]", line=3)

    def test_malformed_toml(self):
        self.assertConfigError(REGION.replace('n = 1', 'n = '), 'malformed TOML', line=5)

    def test_weight_parameters(self):
        text = KDV.format(n=1).replace('model = "gaussian"', 'model = "gaussian"\nexponent = 0.5')
        self.assertConfigError(text, 'not a parameter of the gaussian model', line=17)
        text = KDV.format(n=1).replace('model = "gaussian"', 'model = "power"')
        self.assertConfigError(text, 'the power model needs exponent', line=15)

    def test_sweep_values(self):
        self.assertConfigError(KDV.format(n=1).replace('M = [2, 4]', 'M = [2, -4]'), 'M values must be positive', line=20)
        self.assertConfigError(KDV.format(n=1).replace('seeds = [1]', 'seeds = [1.5]'), 'list of integers', line=19)

    def test_region_lattice_bounds(self):
        sweep = REGION + '\n[sweep]\n'
        self.assertConfigError(sweep + 'inv_p_min = 0.0\n', 'inv_p_min must lie in (0, 1]', line=8)
        self.assertConfigError(sweep + 'inv_p_min = 1.5\n', 'inv_p_min must lie in (0, 1]', line=8)
        self.assertConfigError(sweep + 'inv_p_max = -0.25\n', 'inv_p_max must lie in (0, 1]', line=8)
        self.assertConfigError(
            sweep + 'inv_p_min = 0.8\ninv_p_max = 0.5\n', 'inv_p_max must not be smaller than inv_p_min', line=9
        )
        self.assertConfigError(sweep + 's_min = 1.0\ns_max = 0.0\n', 's_max must exceed s_min', line=9)
        self.assertEqual(parse_config(sweep + 'inv_p_min = 0.5\ninv_p_max = 1\n').sweep['inv_p_max'], 1.0)

    def test_kdv_order_is_positive(self):
        self.assertConfigError(KDV.format(n=1).replace('k = 1', 'k = 0'), '[estimate] k', line=11)

    def test_invalid_grid(self):
        self.assertConfigError(KDV.format(n=1).replace('N = 64', 'N = 48'), 'invalid grid', line=3)

    def test_line_only_experiments(self):
        self.assertEqual(parse_config(KDV.format(n=1)).grid.n, 1)
        self.assertConfigError(KDV.format(n=2), 'set n = 1', line=4)

    def test_unreadable_file(self):
        with self.assertRaises(ConfigError):
            load_config(Path(settings.BASE_DIR) / 'configs' / 'missing.toml')


class OutputPathTests(SimpleTestCase):

    @override_settings(DISPLAB_OUTPUT_DIR='/tmp/displab-results')
    def test_relative_outputs_land_in_the_output_directory(self):
        config = parse_config(REGION)
        self.assertEqual(resolve_output(config), Path('/tmp/displab-results/region.csv'))
        self.assertEqual(resolve_output(config, 'sub/out.csv'), Path('/tmp/displab-results/sub/out.csv'))
        self.assertEqual(resolve_output(config, '/elsewhere/out.csv'), Path('/elsewhere/out.csv'))
