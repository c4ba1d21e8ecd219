import itertools

import numpy as np
from django.test import SimpleTestCase

from fermions.bipartition import (
    all_bipartitions,
    check_algebraic_independence,
    check_microcausality,
    is_local,
    make_bipartition,
    make_bipartition_sets,
    membership,
    parity_commutation_table,
    parse_bipartition,
)
from fermions.exceptions import DomainError
from fermions.opalg import OperatorPoly, Parity, anticommutator, commutator, local_monomials, parse


class BipartitionTests(SimpleTestCase):
    def test_contiguous(self):
        b = make_bipartition(2, 4)
        self.assertEqual(b.first, {1, 2})
        self.assertEqual(b.second, {3, 4})
        self.assertEqual(b.cut, 2)
        self.assertEqual(str(b), '1,2|3,4')

    def test_non_contiguous(self):
        b = make_bipartition_sets({1, 3}, {2, 4})
        self.assertEqual(b.modes, 4)
        self.assertIsNone(b.cut)

    def test_invalid(self):
        for first, second in (({1}, {1, 2}), (set(), {1}), ({1}, {3})):
            with self.subTest(first=first, second=second), self.assertRaises(DomainError):
                make_bipartition_sets(first, second)
        with self.assertRaises(DomainError):
            make_bipartition(0, 2)
        with self.assertRaises(DomainError):
            make_bipartition(2, 2)

    def test_parse(self):
        self.assertEqual(parse_bipartition('1,2,3|4,5,6'), make_bipartition(3, 6))
        self.assertEqual(parse_bipartition('m:2/4'), make_bipartition(2, 4))
        self.assertEqual(parse_bipartition(' 1, 3 | 2 '), make_bipartition_sets({1, 3}, {2}))
        for literal in ('1,2', '1|2|3', 'a|b', 'm:3'):
            with self.subTest(literal=literal), self.assertRaises(DomainError):
                parse_bipartition(literal)
        with self.assertRaises(DomainError):
            parse_bipartition('1|2', modes=4)

    def test_all_bipartitions(self):
        self.assertEqual(len(list(all_bipartitions(4))), 2 ** 4 - 2)


class LocalityTests(SimpleTestCase):
    def setUp(self):
        self.b = make_bipartition(2, 4)

    def test_membership(self):
        self.assertTrue(membership(parse('a1*a2'), self.b, 1))
        self.assertFalse(membership(parse('a1*a3'), self.b, 1))
        identity = OperatorPoly.identity()
        self.assertTrue(membership(identity, self.b, 1))
        self.assertTrue(membership(identity, self.b, 2))
        with self.assertRaises(DomainError):
            membership(identity, self.b, 3)

    def test_is_local(self):
        for n in (1, 2, 3):
            b = make_bipartition(n, 2 * n)
            first = OperatorPoly.product((m, False) for m in range(1, n + 1))
            second = OperatorPoly.product((m, True) for m in range(n + 1, 2 * n + 1))
            self.assertTrue(is_local(first, second, b))
        self.assertFalse(is_local(parse('a1'), parse('A1'), self.b))
        self.assertTrue(is_local(OperatorPoly.identity(), parse('a3 + A4'), self.b))


class MicrocausalityTests(SimpleTestCase):
    def test_zero_deviation_for_every_bipartition(self):
        for modes in range(2, 9):
            for b in all_bipartitions(modes):
                with self.subTest(bipartition=str(b)):
                    self.assertEqual(check_microcausality(b), 0)

    def test_limit(self):
        with self.assertRaises(DomainError):
            check_microcausality(make_bipartition(5, 11))


class AlgebraicIndependenceTests(SimpleTestCase):
    def setUp(self):
        self.b = make_bipartition(2, 4)

    def test_even_commutes_with_odd(self):
        self.assertTrue(check_algebraic_independence(parse('A1*a1'), parse('a3 + A3'), self.b))

    def test_odd_elements_anticommute(self):
        self.assertFalse(check_algebraic_independence(parse('a1 + A1'), parse('a3 + A3'), self.b))

    def test_identity(self):
        self.assertTrue(check_algebraic_independence(OperatorPoly.identity(), parse('a3*A4'), self.b))

    def test_non_local_pair(self):
        with self.assertRaises(DomainError):
            check_algebraic_independence(parse('a1'), parse('a2'), self.b)

    def test_parity_table(self):
        table = parity_commutation_table(make_bipartition_sets({1, 3}, {2, 4}))
        self.assertEqual(table, {'even-even': True, 'even-odd': True, 'odd-even': True, 'odd-odd': False})

    def test_cross_partition_graded_commutation(self):
        for b in (make_bipartition(2, 4), make_bipartition_sets({1, 3}, {2, 4})):
            lefts = local_monomials(b.first, 3, min_degree=1)
            rights = local_monomials(b.second, 3, min_degree=1)
            for left, right in itertools.product(lefts, rights):
                both_odd = left.parity() is Parity.ODD and right.parity() is Parity.ODD
                bracket = anticommutator(left, right) if both_odd else commutator(left, right)
                with self.subTest(bipartition=str(b), left=str(left), right=str(right)):
                    self.assertTrue(bracket.is_zero())
                    self.assertEqual(check_algebraic_independence(left, right, b), not both_odd)


class MembershipClosureTests(SimpleTestCase):
    def test_closed_under_sums_and_products(self):
        rng = np.random.default_rng(5)
        b = make_bipartition_sets({1, 3, 4}, {2, 5})
        for side in (1, 2):
            monomials = local_monomials(b.side(side), 2)
            for _ in range(100):
                picks = rng.choice(len(monomials), size=3)
                p = monomials[picks[0]] * complex(rng.normal(), rng.normal()) + monomials[picks[1]]
                q = monomials[picks[2]]
                self.assertTrue(membership(p, b, side))
                self.assertTrue(membership(p + q, b, side))
                self.assertTrue(membership(p * q, b, side))
                self.assertFalse(membership(p + parse(f'a{min(b.side(3 - side))}'), b, side))
