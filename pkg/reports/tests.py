import math
import os
import tempfile
from io import StringIO
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from bounds.models import ChainCheck, TrialResult
from emcap.settings import positive_int_from_env
from numerics.exceptions import AccuracyError

from .csvio import CsvReport, format_value, write_atomic
from .forms import MercerForm, SampledForm, SweepField, flatten_errors


def run(command, **options):
    out = StringIO()
    call_command(command, stdout=out, **options)
    return out.getvalue()


def parse(text):
    """Split a report into (header comments, column names, data rows, footer settings)."""
    lines = text.splitlines()
    comments = [line for line in lines if line.startswith('# ')]
    body = [line for line in lines if not line.startswith('#')]
    settings = dict(line[2:].split('=', 1) for line in comments if '=' in line and ' ' not in line[2:].split('=')[0])
    return comments, body[0].split(','), [row.split(',') for row in body[1:]], settings


class TestCsvReport(SimpleTestCase):

    def test_format_values(self):
        self.assertEqual(format_value(0.1), '0.10000000000000001')
        self.assertEqual(format_value(True), 'true')
        self.assertEqual(format_value(3), '3')
        self.assertEqual(format_value([1.5, 2.0]), '1.5,2')
        self.assertEqual(format_value(None), '')
        self.assertEqual(format_value(math.inf), 'inf')

    def test_header_is_sorted(self):
        report = CsvReport('demo', {'b': 2, 'a': 1.0})
        self.assertEqual(report.render(), '# emcap demo\n# a=1\n# b=2\n')

    def test_atomic_write_leaves_only_target(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'out.csv')
            write_atomic(path, 'x,y\n')
            write_atomic(path, 'x,z\n')
            self.assertEqual(os.listdir(directory), ['out.csv'])
            with open(path, encoding='utf-8') as f:
                self.assertEqual(f.read(), 'x,z\n')


class TestForms(SimpleTestCase):

    def test_sweep_field(self):
        self.assertEqual(SweepField().clean('1:3:0.5'), [1.0, 1.5, 2.0, 2.5, 3.0])
        self.assertEqual(SweepField().clean('2:2:1'), [2.0])

    def test_errors_flatten_to_one_line(self):
        form = MercerForm(data={'alpha': -1, 'power': 1, 'n0': 1, 'length_sweep': '0:1:1', 'method': 'closed',
                                'modes': 10})
        self.assertFalse(form.is_valid())
        message = flatten_errors(form)
        self.assertIn('alpha: Ensure this value is greater than 0.', message)
        self.assertIn('length_sweep: ', message)
        self.assertNotIn('\n', message)

    def test_densities_must_increase(self):
        form = SampledForm(data={'wavelength': 5, 'distance': 1, 'length': 2, 'densities': '8,4', 'beta': 1,
                                 'source_power': 1, 'source_length': 4, 'noise_variance': 1})
        self.assertIn('densities', form.errors)


class TestSpectrumCommand(SimpleTestCase):

    def test_long_wavelength_has_side_lobes(self):
        comments, columns, rows, settings = parse(run('spectrum', wavelength=[5.0], distance=[1.0]))
        self.assertEqual(comments[0], '# emcap spectrum')
        self.assertIn('# samples=4096', comments)
        self.assertEqual(columns, ['kappa', 're_G', 'im_G', 'abs_G'])
        self.assertEqual(len(rows), 4096)
        self.assertGreater(float(settings['side_lobe_ratio']), 0.05)
        self.assertGreater(float(settings['energy']), 0.0)

    def test_short_wavelength_side_lobes_vanish(self):
        _, _, _, settings = parse(run('spectrum', wavelength=[0.5], distance=[1.0]))
        self.assertLess(float(settings['side_lobe_ratio']), 0.05)

    def test_sweep_writes_one_block_per_scene(self):
        text = run('spectrum', wavelength=[5.0, 0.5], distance=[1.0], samples=1024)
        self.assertEqual(text.count('# scene '), 2)
        self.assertEqual(text.count('# side_lobe_ratio='), 2)
        self.assertEqual(text.count('kappa,re_G'), 1)

    def test_invalid_samples(self):
        for samples in (0, 1023):
            with self.assertRaises(CommandError) as raised:
                run('spectrum', samples=samples)
            self.assertEqual(raised.exception.returncode, 2)
            self.assertTrue(str(raised.exception).startswith('samples: '))

    def test_invalid_wavelength(self):
        with self.assertRaises(CommandError) as raised:
            run('spectrum', wavelength=[-1.0])
        self.assertEqual(raised.exception.returncode, 2)

    def test_reruns_are_identical(self):
        first = run('spectrum', samples=512)
        self.assertEqual(first, run('spectrum', samples=512))
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'spectrum.csv')
            self.assertEqual(run('spectrum', samples=512, output=path), '')
            with open(path, encoding='utf-8') as f:
                self.assertEqual(f.read(), first)


class TestWaterfillCommand(SimpleTestCase):

    def test_allocates_the_budget(self):
        _, columns, rows, settings = parse(run('waterfill'))
        self.assertEqual(columns, ['kappa', 's_nprime', 's_j', 'water_level'])
        self.assertLess(abs(float(settings['allocated_power']) - 3.0), 1e-6)
        self.assertAlmostEqual(
            float(settings['capacity_bits_per_m']), float(settings['capacity_nats_per_m']) / math.log(2), places=12,
        )
        self.assertTrue(all(float(row[2]) >= 0 for row in rows))

    def test_support_shrinks_with_power(self):
        def support(power):
            _, _, rows, _ = parse(run('waterfill', power=power))
            return {row[0] for row in rows if float(row[2]) > 0}

        small, large = support(1e-4), support(3.0)
        self.assertTrue(small)
        self.assertLess(small, large)

    def test_negative_power(self):
        with self.assertRaises(CommandError) as raised:
            run('waterfill', power=-1.0)
        self.assertEqual(raised.exception.returncode, 2)


class TestMercerCommand(SimpleTestCase):

    def test_information_grows_with_length(self):
        _, columns, rows, settings = parse(run('mercer'))
        self.assertEqual(columns, ['L', 'mi_nats', 'mi_bits'])
        values = [float(row[1]) for row in rows]
        self.assertEqual(len(values), 32)
        self.assertTrue(all(b > a for a, b in zip(values, values[1:])))
        self.assertAlmostEqual(float(settings['ssd_limit_nats_per_m']), math.sqrt(5) - 1, places=9)

    def test_methods_agree(self):
        _, _, closed, _ = parse(run('mercer', length_sweep='1:2:1'))
        _, _, nystrom, _ = parse(run('mercer', length_sweep='1:2:1', method='nystrom'))
        for a, b in zip(closed, nystrom):
            self.assertLess(abs(float(a[1]) - float(b[1])), 1e-3 * float(a[1]))

    def test_modes_table(self):
        _, columns, rows, _ = parse(run('mercer', modes_table=True))
        self.assertEqual(columns, ['k', 'omega_k', 'lambda_k'])
        self.assertEqual([row[0] for row in rows], [str(k) for k in range(1, 11)])
        self.assertAlmostEqual(float(rows[0][1]), 1.3065, places=3)

    def test_invalid_options(self):
        for options in ({'method': 'guess'}, {'length_sweep': '0:1:1'}, {'n0': 0.0}):
            with self.assertRaises(CommandError) as raised:
                run('mercer', **options)
            self.assertEqual(raised.exception.returncode, 2)

    def test_accuracy_failure_exit_code(self):
        with mock.patch('reports.management.commands.mercer.information_curve',
                        side_effect=AccuracyError('quadrature did not converge')):
            with self.assertRaises(CommandError) as raised:
                run('mercer')
        self.assertEqual(raised.exception.returncode, 3)


class TestBoundsCommand(SimpleTestCase):

    def test_chain_holds_for_seeded_trials(self):
        _, columns, rows, settings = parse(run('bounds', trials=3, seed=7))
        self.assertEqual(columns, ['trial', 'seed', 'i_LL', 'i_L2L', 'i_inf2L', 'chain_holds'])
        self.assertEqual([row[0] for row in rows], ['0', '1', '2'])
        self.assertTrue(all(row[5] == 'true' for row in rows))
        self.assertEqual(settings['trials_failed'], '0')

    def test_failed_trial_exits_with_one(self):
        failing = [TrialResult(trial=0, seed=1, check=ChainCheck(1.0, 0.5, 2.0, holds=False, stable=True))]
        out = StringIO()
        with mock.patch('reports.management.commands.bounds.run_chain_trials', return_value=failing):
            with self.assertRaises(CommandError) as raised:
                call_command('bounds', stdout=out)
        self.assertEqual(raised.exception.returncode, 1)
        self.assertIn('0,1,1,0.5,2,false', out.getvalue())

    def test_misaligned_grid(self):
        with self.assertRaises(CommandError) as raised:
            run('bounds', grid=24)
        self.assertEqual(raised.exception.returncode, 2)


class TestSampledCommand(SimpleTestCase):

    def test_density_sweep(self):
        _, columns, rows, _ = parse(run('sampled'))
        self.assertEqual(columns, ['n', 'mi_nats', 'mi_per_meter'])
        self.assertEqual([row[0] for row in rows], ['8', '16', '32', '64'])
        for row in rows:
            self.assertAlmostEqual(float(row[2]), float(row[1]) / 2.0, places=12)

    def test_decreasing_densities(self):
        with self.assertRaises(CommandError) as raised:
            run('sampled', densities='8,4')
        self.assertEqual(raised.exception.returncode, 2)


class TestEnvironmentSettings(SimpleTestCase):

    def test_thread_count_from_environment(self):
        with mock.patch.dict(os.environ, {'EMCAP_THREADS': '4'}):
            self.assertEqual(positive_int_from_env('EMCAP_THREADS', 1), 4)
        with mock.patch.dict(os.environ, {'EMCAP_THREADS': '0'}):
            self.assertEqual(positive_int_from_env('EMCAP_THREADS', 1), 1)

    def test_malformed_value_falls_back(self):
        with mock.patch.dict(os.environ, {'EMCAP_THREADS': 'four'}):
            with self.assertLogs('emcap.settings', level='WARNING') as logs:
                self.assertEqual(positive_int_from_env('EMCAP_THREADS', 1), 1)
        self.assertIn("EMCAP_THREADS='four' is not an integer", logs.output[0])

    def test_unset_value_uses_default(self):
        with mock.patch.dict(os.environ, clear=True):
            self.assertEqual(positive_int_from_env('EMCAP_THREADS', 3), 3)
