import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from fermions.analysis import expectation
from fermions.fock import make_rho_sep, make_state_psi, product_state, vacuum, write_state
from fermions.models import AnalysisReport
from fermions.opalg import parse


class CommandTestMixin:
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def run_command(self, name, **options):
        out = StringIO()
        call_command(name, stdout=out, **options)
        return out.getvalue()

    def run_json(self, name, **options):
        return json.loads(self.run_command(name, format='json', **options))

    def assert_exit(self, code, name, **options):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(name, **options)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception

    def state_file(self, state, name='state.json'):
        path = Path(self.tmp.name) / name
        write_state(state, path)
        return str(path)


class CarCheckCommandTests(CommandTestMixin, TestCase):
    def test_exact(self):
        self.assertIn('max deviation 0.0e0', self.run_command('car_check', modes=6))
        report = self.run_json('car_check', modes=1)
        self.assertEqual(report['verdict'], 'exact')
        self.assertEqual(report['details']['max_deviation'], 0)

    def test_memory_guard(self):
        error = self.assert_exit(2, 'car_check', modes=20)
        self.assertIn('FMA_MAX_MODES', str(error))

    def test_size_limit(self):
        self.assert_exit(2, 'car_check', modes=12)

    def test_hyphenated_names(self):
        self.assertIn('max deviation 0.0e0', self.run_command('car-check', modes=3))
        self.assertEqual(self.run_json('demo-psi', n=1)['verdict'], 'entangled-certified')

    def test_failed_check(self):
        with mock.patch('fermions.services.verify_car', return_value=1.0):
            self.assert_exit(1, 'car_check', modes=2)


class DemoPsiCommandTests(CommandTestMixin, TestCase):
    def test_odd_n_json(self):
        report = self.run_json('demo_psi', n=3)
        details = report['details']
        self.assertEqual(report['verdict'], 'entangled-certified')
        self.assertEqual(report['bipartition'], '1,2,3|4,5,6')
        value = report['witness']['value']
        self.assertAlmostEqual(abs(complex(value['re'], value['im'])), 0.5, delta=1e-12)
        self.assertTrue(details['even_restriction_equal'])
        self.assertLessEqual(details['meet_norm'], 1e-8)
        self.assertFalse(details['uncorrelated'])
        self.assertEqual(details['compression_spectrum'], [0.5])
        self.assertTrue(all(details['checks'].values()))

    def test_witness_expressions_reparse(self):
        report = self.run_json('demo_psi', n=1)
        witness = report['witness']
        product = parse(witness['A1']) * parse(witness['A2'])
        value = expectation(make_state_psi(1), product)
        self.assertAlmostEqual(value, complex(witness['value']['re'], witness['value']['im']), delta=1e-12)

    def test_smallest_text(self):
        out = self.run_command('demo_psi', n=1)
        self.assertTrue(out.startswith('demo-psi: entangled-certified'))

    def test_even_n(self):
        report = self.run_json('demo_psi', n=2)
        details = report['details']
        self.assertEqual(report['verdict'], 'entangled-by-coherence')
        self.assertIsNone(report['witness'])
        self.assertFalse(details['even_restriction_equal'])
        self.assertIn('rejected', details['even_distinguishing_pair']['status'])
        self.assertAlmostEqual(details['coherence_floor'], 0.5, delta=1e-12)
        self.assertGreater(details['separable_fit_residual'], 0.3)
        self.assertTrue(details['notes'])

    def test_even_n_beyond_fit_limit(self):
        report = self.run_json('demo_psi', n=4)
        details = report['details']
        self.assertEqual(report['verdict'], 'entangled-by-coherence')
        self.assertIsNone(details['separable_fit_residual'])
        self.assertAlmostEqual(details['product_fidelity'], 0.5, delta=1e-12)
        self.assertGreater(details['coherence_floor'], 0.3)
        self.assertTrue(details['checks']['coherence_floor'])
        self.assertTrue(all(details['checks'].values()))

    def test_deterministic_output(self):
        first = self.run_command('demo_psi', n=1, format='json', seed=4)
        second = self.run_command('demo_psi', n=1, format='json', seed=4)
        self.assertEqual(first, second)

    def test_output_and_save(self):
        path = Path(self.tmp.name) / 'report.json'
        self.run_command('demo_psi', n=1, output=str(path), save=True)
        self.assertEqual(json.loads(path.read_text(encoding='utf-8'))['analysis'], 'demo-psi')
        saved = AnalysisReport.objects.get()
        self.assertEqual(saved.kind, AnalysisReport.KIND_DEMO_PSI)
        self.assertEqual(saved.modes, 2)
        self.assertIsNotNone(saved.witness)

    def test_bad_flags(self):
        self.assert_exit(2, 'demo_psi', n=0)
        self.assert_exit(2, 'demo_psi', n=6)
        self.assert_exit(2, 'demo_psi', n=1, degree=0)
        self.assert_exit(2, 'demo_psi', n=1, tol=-1.0)


class ExpectCommandTests(CommandTestMixin, TestCase):
    def test_number_density(self):
        self.assertEqual(self.run_command('expect', n=1, expr='A1*a1').strip(), '0.5')

    def test_designated_pair(self):
        self.assertAlmostEqual(abs(float(self.run_command('expect', n=1, expr='a1*A2'))), 0.5)

    def test_vacuum_file(self):
        path = self.state_file(vacuum(2), 'vac.json')
        self.assertEqual(self.run_command('expect', input=path, expr='a1').strip(), '0')

    def test_json_report(self):
        report = self.run_json('expect', n=1, expr='a1*A1')
        self.assertEqual(report['details']['normal_ordered'], '1 - A1*a1')
        self.assertAlmostEqual(report['details']['value']['re'], 0.5)

    def test_parse_error(self):
        error = self.assert_exit(2, 'expect', n=1, expr='a1 a2')
        self.assertIn('позиция 3', str(error))

    def test_deep_nesting_is_input_error(self):
        self.assert_exit(2, 'expect', n=1, expr='(' * 400 + 'a1' + ')' * 400)

    def test_state_source_required(self):
        self.assert_exit(2, 'expect', expr='a1')
        path = self.state_file(vacuum(2))
        self.assert_exit(2, 'expect', n=1, input=path, expr='a1')
        self.assert_exit(2, 'expect', input='/nonexistent.json', expr='a1')


class AnalyzeCommandTests(CommandTestMixin, TestCase):
    def test_rho_sep(self):
        path = self.state_file(make_rho_sep(3))
        report = self.run_json('analyze', input=path, bipartition='1,2,3|4,5,6')
        self.assertEqual(report['verdict'], 'no-certificate')
        self.assertLess(report['details']['separable_fit_residual'], 1e-9)
        self.assertEqual(report['details']['product_consistency'], 'consistent')
        self.assertIsNone(report['details']['product_overlap'])

    def test_psi(self):
        path = self.state_file(make_state_psi(3))
        report = self.run_json(
            'analyze', input=path, bipartition='m:3/6',
            projections=['0.5 + 0.5*a1 + 0.5*A1', '0.5 + 0.5*a4 + 0.5*A4'],
        )
        self.assertEqual(report['verdict'], 'entangled-certified')
        self.assertFalse(report['details']['uncorrelated'])
        self.assertEqual(report['details']['meet_rank'], 0)
        self.assertAlmostEqual(report['details']['product_overlap']['residual_floor'], 0.5, delta=1e-12)

    def test_product_state(self):
        path = self.state_file(product_state(3))
        report = self.run_json('analyze', input=path, bipartition='1,2,3|4,5,6')
        self.assertEqual(report['verdict'], 'no-certificate')
        self.assertLess(report['details']['separable_fit_residual'], 1e-9)

    def test_text_output(self):
        path = self.state_file(make_state_psi(1))
        out = self.run_command('analyze', input=path, bipartition='1|2')
        self.assertIn('analyze: entangled-certified', out)
        self.assertIn('witness: <', out)

    def test_mismatch(self):
        path = self.state_file(make_state_psi(3))
        self.assert_exit(2, 'analyze', input=path, bipartition='1|2')
        self.assert_exit(2, 'analyze', input=path, bipartition='1,2|3')
        self.assert_exit(2, 'analyze', input=path, bipartition='1,2,3|4,5,6', projections=['a1', 'A1*a1'])

    def test_broken_state_file(self):
        path = Path(self.tmp.name) / 'broken.json'
        path.write_text('{"modes": 2', encoding='utf-8')
        self.assert_exit(2, 'analyze', input=str(path), bipartition='1|2')

    def test_malformed_state_documents(self):
        for number, document in enumerate((
            {'modes': 2, 'amplitudes': ['10']},
            {'modes': 2, 'entries': 5},
            {'modes': 2.7, 'amplitudes': [{'bits': '10', 're': 1}]},
        )):
            path = Path(self.tmp.name) / f'bad{number}.json'
            path.write_text(json.dumps(document), encoding='utf-8')
            with self.subTest(document=document):
                self.assert_exit(2, 'analyze', input=str(path), bipartition='1|2')
