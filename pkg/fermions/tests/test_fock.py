import itertools
import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, override_settings

from fermions.car_ops import total_number_operator
from fermions.exceptions import DomainError, StateFormatError
from fermions.fock import (
    DensityOperator,
    FockVector,
    OccupationState,
    basis_index,
    check_dense_modes,
    make_rho_sep,
    make_state_psi,
    maximally_mixed,
    product_state,
    read_state,
    sector_basis,
    state_from_dict,
    state_from_index,
    state_to_dict,
    vacuum,
    write_state,
)


class OccupationStateTests(SimpleTestCase):
    def test_basis_index_uses_mode_one_as_lowest_bit(self):
        self.assertEqual(basis_index(OccupationState.vacuum(3)), 0)
        self.assertEqual(basis_index(OccupationState.from_modes([1], 3)), 1)
        self.assertEqual(basis_index(OccupationState.from_modes([1, 2, 3], 3)), 7)

    def test_string_form(self):
        state = OccupationState.from_string('110000')
        self.assertEqual(state.modes, 6)
        self.assertEqual(state.occupied_modes(), (1, 2))
        self.assertEqual(state.particle_count, 2)
        self.assertEqual(state.to_string(), '110000')
        self.assertEqual(str(state), '|110000>')

    def test_invalid_states(self):
        with self.assertRaises(DomainError):
            OccupationState(4, 2)
        with self.assertRaises(DomainError):
            OccupationState.from_modes([3], 2)
        with self.assertRaises(StateFormatError):
            OccupationState.from_string('10x')
        with self.assertRaises(DomainError):
            OccupationState.vacuum(2).occupation(0)


class SectorBasisTests(SimpleTestCase):
    def test_sizes(self):
        self.assertEqual(
            [s.to_string() for s in sector_basis(2, 1)],
            ['10', '01'],
        )
        self.assertEqual(len(sector_basis(4, 2)), 6)
        self.assertEqual(sector_basis(5, 0), [OccupationState.vacuum(5)])

    def test_sorted_by_index(self):
        indices = [basis_index(s) for s in sector_basis(6, 3)]
        self.assertEqual(indices, sorted(indices))
        self.assertEqual(len(indices), math.comb(6, 3))

    def test_too_many_particles(self):
        with self.assertRaises(DomainError):
            sector_basis(2, 3)


class FockInvariantTests(SimpleTestCase):
    def test_basis_index_is_bijection(self):
        for modes in range(1, 13):
            with self.subTest(modes=modes):
                states = [OccupationState.from_string(''.join(p)) for p in itertools.product('01', repeat=modes)]
                indices = [basis_index(state) for state in states]
                self.assertEqual(sorted(indices), list(range(1 << modes)))
                for state, index in zip(states, indices):
                    self.assertEqual(state_from_index(index, modes), state)

    def test_sectors_partition_the_basis(self):
        for modes in range(1, 11):
            with self.subTest(modes=modes):
                sectors = [sector_basis(modes, n) for n in range(modes + 1)]
                self.assertEqual(sum(len(sector) for sector in sectors), 1 << modes)
                everything = {state_from_index(i, modes) for i in range(1 << modes)}
                self.assertEqual({s for sector in sectors for s in sector}, everything)

    def test_psi_lies_in_one_sector(self):
        for n in range(1, 6):
            with self.subTest(n=n):
                array = make_state_psi(n).to_array()
                number = total_number_operator(2 * n).matrix
                np.testing.assert_allclose(number @ array, n * array, atol=1e-14)

    def test_rho_sep_commutes_with_number(self):
        for n in range(1, 6):
            with self.subTest(n=n):
                rho = make_rho_sep(n).matrix
                number = total_number_operator(2 * n).matrix
                np.testing.assert_allclose(number @ rho - rho @ number, 0, atol=1e-14)


class PresetStateTests(SimpleTestCase):
    def test_psi_one(self):
        psi = make_state_psi(1)
        self.assertEqual(psi.modes, 2)
        array = psi.to_array()
        np.testing.assert_allclose(array, [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0])

    def test_psi_three(self):
        psi = make_state_psi(3)
        self.assertEqual(psi.modes, 6)
        patterns = sorted(s.to_string() for s in psi.amplitudes)
        self.assertEqual(patterns, ['000111', '111000'])
        for value in psi.amplitudes.values():
            self.assertAlmostEqual(abs(value), 1 / math.sqrt(2), places=14)
        self.assertTrue(psi.is_normalized())
        self.assertEqual(psi.particle_numbers(), {3})

    def test_zero_particles_rejected(self):
        with self.assertRaises(DomainError):
            make_state_psi(0)
        with self.assertRaises(DomainError):
            make_rho_sep(0)

    def test_rho_sep(self):
        rho = make_rho_sep(1)
        expected = np.zeros((4, 4))
        expected[1, 1] = expected[2, 2] = 0.5
        np.testing.assert_array_equal(rho.matrix, expected)
        self.assertAlmostEqual(rho.purity(), 0.5)
        self.assertAlmostEqual(make_rho_sep(3).trace().real, 1.0)

    def test_product_and_vacuum(self):
        self.assertEqual(list(product_state(2).amplitudes), [OccupationState.from_string('1100')])
        self.assertEqual(list(vacuum(3).amplitudes), [OccupationState.vacuum(3)])
        self.assertAlmostEqual(maximally_mixed(2).purity(), 0.25)

    def test_density_matrix_is_read_only(self):
        rho = make_rho_sep(1)
        with self.assertRaises(ValueError):
            rho.matrix[0, 0] = 1


class DensityOperatorTests(SimpleTestCase):
    def test_rejects_invalid_matrices(self):
        with self.assertRaises(DomainError):
            DensityOperator(1, np.array([[1, 1], [0, 0]]))
        with self.assertRaises(DomainError):
            DensityOperator(1, np.eye(2))
        with self.assertRaises(DomainError):
            DensityOperator(1, np.diag([1.5, -0.5]))
        with self.assertRaises(DomainError):
            DensityOperator(2, np.eye(2) / 2)

    def test_mixture_of_vectors(self):
        first = FockVector.basis(OccupationState.from_string('10'))
        second = FockVector.basis(OccupationState.from_string('01'))
        mixed = DensityOperator.mixture([(0.5, first), (0.5, second)])
        np.testing.assert_allclose(mixed.matrix, make_rho_sep(1).matrix)

    def test_from_array(self):
        vector = FockVector.from_array([0, 1, 0, 0], 2)
        self.assertEqual(list(vector.amplitudes), [OccupationState.from_string('10')])
        with self.assertRaises(DomainError):
            FockVector.from_array([1, 0, 0], 2)


class MemoryGuardTests(SimpleTestCase):
    def test_default_limit(self):
        check_dense_modes(14)
        with self.assertRaises(DomainError):
            check_dense_modes(20)

    @override_settings(FMA_MAX_MODES=4)
    def test_limit_from_settings(self):
        with self.assertRaises(DomainError):
            make_rho_sep(3)


class StateJsonTests(SimpleTestCase):
    def test_vector_round_trip(self):
        psi = make_state_psi(2)
        restored = state_from_dict(json.loads(json.dumps(state_to_dict(psi))))
        np.testing.assert_allclose(restored.to_array(), psi.to_array())

    def test_density_round_trip_through_file(self):
        rho = make_rho_sep(2)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'rho.json'
            write_state(rho, path)
            restored = read_state(path)
        self.assertIsInstance(restored, DensityOperator)
        np.testing.assert_allclose(restored.matrix, rho.matrix)

    def test_unnormalized_vector_is_normalized(self):
        state = state_from_dict({'modes': 1, 'amplitudes': [{'bits': '1', 're': 2.0}]})
        self.assertTrue(state.is_normalized())

    def test_malformed_documents(self):
        for data in (
            [],
            {'amplitudes': []},
            {'modes': 'x', 'amplitudes': []},
            {'modes': 2, 'amplitudes': [{'bits': '1', 're': 1}]},
            {'modes': 2, 'amplitudes': [{'bits': '10', 're': 'abc'}]},
            {'modes': 2},
            {'modes': 2.7, 'amplitudes': [{'bits': '10', 're': 1}]},
            {'modes': True, 'amplitudes': [{'bits': '1', 're': 1}]},
            {'modes': '2', 'amplitudes': [{'bits': '10', 're': 1}]},
            {'modes': 0, 'amplitudes': []},
            {'modes': 2, 'amplitudes': ['10']},
            {'modes': 2, 'amplitudes': {'bits': '10'}},
            {'modes': 2, 'entries': 5},
            {'modes': 2, 'entries': [None]},
        ):
            with self.subTest(data=data), self.assertRaises(StateFormatError):
                state_from_dict(data)

    def test_missing_file(self):
        with self.assertRaises(StateFormatError):
            read_state('/nonexistent/state.json')
