import numpy as np
from django.test import SimpleTestCase

from fermions.car_ops import (
    SparseOperator,
    anticommutator,
    apply_annihilate,
    commutator,
    apply_create,
    jw_matrix,
    ladder_matrix,
    number_operator,
    pauli_string,
    poly_to_matrix,
    total_number_operator,
    verify_car,
)
from fermions.exceptions import DomainError
from fermions.fock import OccupationState, make_state_psi, sector_basis
from fermions.opalg import OperatorPoly, parse


def occ(text):
    return OccupationState.from_string(text)


class SignRuleTests(SimpleTestCase):
    def test_annihilate(self):
        self.assertEqual(apply_annihilate(occ('10'), 1), (1, occ('00')))
        self.assertEqual(apply_annihilate(occ('01'), 2), (1, occ('00')))
        self.assertEqual(apply_annihilate(occ('11'), 2), (-1, occ('10')))
        self.assertIsNone(apply_annihilate(occ('01'), 1))

    def test_create(self):
        self.assertEqual(apply_create(occ('00'), 1), (1, occ('10')))
        self.assertEqual(apply_create(occ('10'), 2), (-1, occ('11')))
        self.assertIsNone(apply_create(occ('10'), 1))

    def test_mode_out_of_range(self):
        with self.assertRaises(DomainError):
            apply_create(occ('00'), 3)
        with self.assertRaises(DomainError):
            apply_annihilate(occ('00'), 0)


class CarTests(SimpleTestCase):
    def test_car_exact_up_to_eight_modes(self):
        for modes in range(1, 9):
            with self.subTest(modes=modes):
                self.assertEqual(verify_car(modes), 0)

    def test_single_mode_anticommutator_is_identity(self):
        value = anticommutator(ladder_matrix(1, False, 1), ladder_matrix(1, True, 1))
        self.assertTrue(value.same_entries(SparseOperator.identity(1)))

    def test_car_check_limit(self):
        with self.assertRaises(DomainError):
            verify_car(11)

    def test_ladder_entries_are_signs(self):
        for mode in range(1, 5):
            values = set(ladder_matrix(mode, False, 4).entries().values())
            self.assertLessEqual(values, {1, -1})


class JordanWignerTests(SimpleTestCase):
    def test_single_mode_is_sigma_minus(self):
        matrix = jw_matrix(1, False, 1)
        self.assertEqual(matrix.entries(), {(0, 1): 1})

    def test_matches_sign_rule(self):
        for modes in range(1, 9):
            for mode in range(1, modes + 1):
                for dagger in (False, True):
                    with self.subTest(modes=modes, mode=mode, dagger=dagger):
                        self.assertTrue(jw_matrix(mode, dagger, modes).same_entries(ladder_matrix(mode, dagger, modes)))

    def test_pauli_labels(self):
        self.assertTrue(pauli_string('II').same_entries(SparseOperator.identity(2)))
        with self.assertRaises(DomainError):
            pauli_string('IQ')
        with self.assertRaises(DomainError):
            pauli_string('')


class PolyToMatrixTests(SimpleTestCase):
    def test_identity(self):
        self.assertTrue(poly_to_matrix(OperatorPoly.identity(), 3).same_entries(SparseOperator.identity(3)))

    def test_number_operator(self):
        matrix = poly_to_matrix(parse('A1*a1'), 3)
        expected = {(i, i): 1 for i in range(8) if i & 1}
        self.assertEqual(matrix.entries(), expected)
        self.assertTrue(matrix.same_entries(number_operator(1, 3)))

    def test_anticommuting_pair_is_zero(self):
        poly = OperatorPoly.product([(1, False), (2, False)]) + OperatorPoly.product([(2, False), (1, False)])
        self.assertEqual(poly_to_matrix(poly, 2).max_abs(), 0)

    def test_mode_beyond_system(self):
        with self.assertRaises(DomainError):
            poly_to_matrix(parse('a3'), 2)

    def test_total_number_counts_particles(self):
        total = total_number_operator(4)
        for particles in range(5):
            for state in sector_basis(4, particles):
                self.assertEqual(total.entries().get((state.bits, state.bits), 0), particles)

    def test_psi_occupation(self):
        psi = make_state_psi(2).to_array()
        total = total_number_operator(4).matrix
        self.assertAlmostEqual(np.vdot(psi, total @ psi).real, 2.0)

    def test_dense_entries_serialization(self):
        entries = poly_to_matrix(parse('a1'), 1).to_entries()
        self.assertEqual(entries, [{'row_bits': '0', 'col_bits': '1', 're': 1.0, 'im': 0.0}])

    def test_number_operators_commute(self):
        for i in range(1, 5):
            for j in range(1, 5):
                self.assertEqual(commutator(number_operator(i, 4), number_operator(j, 4)).max_abs(), 0)
