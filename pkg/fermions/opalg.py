"""
Символьная алгебра CAR: полиномы от a_i (annihilation) и a_i^+ (creation).

Каноническая форма монома: сначала операторы рождения по возрастанию мод,
затем операторы уничтожения по убыванию мод. Сопряжение переводит
каноническую форму в каноническую без перестановок.
Переупорядочение - соседние транспозиции по CAR: перестановка разных
множителей меняет знак, a_i a_i^+ = 1 - a_i^+ a_i добавляет укороченный моном.
"""
from __future__ import annotations

import enum
import logging
import numbers
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Tuple, Union

from .exceptions import DomainError

logger = logging.getLogger(__name__)

COEFFICIENT_TOL = 1e-15
WORD_CACHE_SIZE = 8192

Factor = Tuple[int, bool]          # (мода, dagger)
Word = Tuple[Factor, ...]
Scalar = Union[int, float, complex]


class Parity(str, enum.Enum):
    EVEN = 'even'
    ODD = 'odd'
    MIXED = 'mixed'


def _order_key(factor: Factor):
    mode, dagger = factor
    return (0, mode) if dagger else (1, -mode)


@lru_cache(maxsize=WORD_CACHE_SIZE)
def _normal_order_word(word: Word) -> Tuple[Tuple[Word, int], ...]:
    for k in range(len(word) - 1):
        left, right = word[k], word[k + 1]
        left_key, right_key = _order_key(left), _order_key(right)
        if left_key == right_key:
            # (a_i)^2 = (a_i^+)^2 = 0
            return ()
        if left_key > right_key:
            result: Dict[Word, int] = defaultdict(int)
            for reordered, count in _normal_order_word(word[:k] + (right, left) + word[k + 2:]):
                result[reordered] -= count
            if left[0] == right[0]:
                # a_i a_i^+ = 1 - a_i^+ a_i
                for contracted, count in _normal_order_word(word[:k] + word[k + 2:]):
                    result[contracted] += count
            return tuple((w, c) for w, c in result.items() if c)
    return ((word, 1),)


def _is_small(value) -> bool:
    return abs(value) < COEFFICIENT_TOL


def _simplify(value: Scalar) -> Scalar:
    if isinstance(value, complex) and value.imag == 0:
        value = value.real
    if isinstance(value, float) and value.is_integer() and abs(value) < 2 ** 53:
        value = int(value)
    return value


@dataclass(frozen=True)
class Monomial:
    coefficient: Scalar
    factors: Word

    @property
    def degree(self) -> int:
        return len(self.factors)

    def is_canonical(self) -> bool:
        keys = [_order_key(f) for f in self.factors]
        return all(a < b for a, b in zip(keys, keys[1:]))

    def __str__(self):
        return OperatorPoly({self.factors: self.coefficient}).to_expression()


class OperatorPoly:
    """Элемент алгебры CAR в канонической нормально упорядоченной форме."""

    __slots__ = ('_terms',)

    def __init__(self, terms=None):
        # terms: {каноническое слово: коэффициент}; для произвольных слов - from_terms
        cleaned = {}
        for word, coefficient in (terms or {}).items():
            if not _is_small(coefficient):
                cleaned[tuple(word)] = _simplify(coefficient)
        self._terms = cleaned

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[Scalar, Iterable[Factor]]]) -> 'OperatorPoly':
        collected: Dict[Word, Scalar] = defaultdict(int)
        for coefficient, factors in terms:
            word = tuple((int(mode), bool(dagger)) for mode, dagger in factors)
            for canonical, count in _normal_order_word(word):
                collected[canonical] += coefficient * count
        return cls(collected)

    @classmethod
    def zero(cls) -> 'OperatorPoly':
        return cls()

    @classmethod
    def scalar(cls, value: Scalar) -> 'OperatorPoly':
        return cls({(): value})

    @classmethod
    def identity(cls) -> 'OperatorPoly':
        return cls.scalar(1)

    @classmethod
    def ladder(cls, mode: int, dagger: bool) -> 'OperatorPoly':
        if mode < 1:
            raise DomainError(f'Номер моды должен быть >= 1: {mode}')
        return cls({((mode, dagger),): 1})

    @classmethod
    def annihilator(cls, mode: int) -> 'OperatorPoly':
        return cls.ladder(mode, False)

    @classmethod
    def creator(cls, mode: int) -> 'OperatorPoly':
        return cls.ladder(mode, True)

    @classmethod
    def product(cls, factors: Iterable[Factor], coefficient: Scalar = 1) -> 'OperatorPoly':
        """Моном в записанном порядке, приведённый к канонической форме."""
        return cls.from_terms([(coefficient, factors)])

    # доступ к мономам

    def terms(self) -> Iterator[Tuple[Word, Scalar]]:
        return iter(self._terms.items())

    def monomials(self) -> List[Monomial]:
        return [Monomial(c, w) for w, c in sorted(self._terms.items(), key=lambda item: _word_sort_key(item[0]))]

    def coefficient(self, factors: Iterable[Factor]) -> Scalar:
        return self._terms.get(tuple(factors), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    # арифметика

    def _coerce(self, other) -> 'OperatorPoly':
        if isinstance(other, OperatorPoly):
            return other
        if isinstance(other, numbers.Number):
            return OperatorPoly.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        collected = dict(self._terms)
        for word, coefficient in other._terms.items():
            collected[word] = collected.get(word, 0) + coefficient
        return OperatorPoly(collected)

    __radd__ = __add__

    def __neg__(self):
        return OperatorPoly({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return OperatorPoly({w: c * other for w, c in self._terms.items()})
        if not isinstance(other, OperatorPoly):
            return NotImplemented
        return OperatorPoly.from_terms(
            (left_c * right_c, left_w + right_w)
            for left_w, left_c in self._terms.items()
            for right_w, right_c in other._terms.items()
        )

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return self * (1 / other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, numbers.Number):
            other = OperatorPoly.scalar(other)
        if not isinstance(other, OperatorPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def isclose(self, other: 'OperatorPoly', tol: float = 1e-12) -> bool:
        return all(abs(c) <= tol for _, c in (self - other).terms())

    # структура

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def parity(self) -> Parity:
        parities = {len(w) % 2 for w in self._terms}
        if parities == {1}:
            return Parity.ODD
        if len(parities) == 2:
            return Parity.MIXED
        return Parity.EVEN

    def support_modes(self) -> FrozenSet[int]:
        return frozenset(mode for word in self._terms for mode, _ in word)

    def particle_number_change(self) -> FrozenSet[int]:
        return frozenset(sum(1 if dagger else -1 for _, dagger in word) for word in self._terms)

    def conserves_particle_number(self) -> bool:
        return self.particle_number_change() <= {0}

    def is_superselection_compatible(self) -> bool:
        """Чётный элемент, коммутирующий с полным числом частиц."""
        return self.parity() is Parity.EVEN and self.conserves_particle_number()

    def is_self_adjoint(self, tol: float = 1e-12) -> bool:
        return self.isclose(adjoint(self), tol)

    # запись в грамматике выражений

    def to_expression(self) -> str:
        if not self._terms:
            return '0'
        parts = []
        for index, monomial in enumerate(self.monomials()):
            sign, body = _format_term(monomial.coefficient, monomial.factors)
            if index == 0:
                parts.append(('-' if sign < 0 else '') + body)
            else:
                parts.append(('- ' if sign < 0 else '+ ') + body)
        return ' '.join(parts)

    def __str__(self):
        return self.to_expression()

    def __repr__(self):
        return f'OperatorPoly({self.to_expression()!r})'


def _word_sort_key(word: Word):
    return (len(word), [_order_key(f) for f in word])


def _format_real(value: float) -> str:
    value = float(value)
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _format_term(coefficient: Scalar, factors: Word) -> Tuple[int, str]:
    coefficient = complex(coefficient)
    sign = 1
    if coefficient.imag == 0:
        if coefficient.real < 0:
            sign, coefficient = -1, -coefficient
        literal = _format_real(coefficient.real)
    elif coefficient.real == 0:
        if coefficient.imag < 0:
            sign, coefficient = -1, -coefficient
        literal = _format_real(coefficient.imag) + 'i'
    else:
        imag = coefficient.imag
        literal = f'({_format_real(coefficient.real)}{"-" if imag < 0 else "+"}{_format_real(abs(imag))}i)'
    names = [('A' if dagger else 'a') + str(mode) for mode, dagger in factors]
    if not names:
        return sign, literal
    if literal == '1':
        return sign, '*'.join(names)
    return sign, '*'.join([literal] + names)


# операции алгебры

def parse(text: str) -> OperatorPoly:
    from .expressions import parse_expression
    return parse_expression(text)


def normal_order(poly) -> OperatorPoly:
    """Каноническая форма полинома или списка сырых термов [(коэффициент, множители)]."""
    if isinstance(poly, OperatorPoly):
        return OperatorPoly.from_terms((c, w) for w, c in poly.terms())
    return OperatorPoly.from_terms(poly)


def theta(poly: OperatorPoly) -> OperatorPoly:
    return OperatorPoly({w: (-c if len(w) % 2 else c) for w, c in poly.terms()})


def even_odd_split(poly: OperatorPoly) -> Tuple[OperatorPoly, OperatorPoly]:
    even = OperatorPoly({w: c for w, c in poly.terms() if len(w) % 2 == 0})
    odd = OperatorPoly({w: c for w, c in poly.terms() if len(w) % 2 == 1})
    return even, odd


def commutator(left: OperatorPoly, right: OperatorPoly) -> OperatorPoly:
    return left * right - right * left


def anticommutator(left: OperatorPoly, right: OperatorPoly) -> OperatorPoly:
    return left * right + right * left


def support_modes(poly: OperatorPoly) -> FrozenSet[int]:
    return poly.support_modes()


def adjoint(poly: OperatorPoly) -> OperatorPoly:
    return OperatorPoly.from_terms(
        (c.conjugate(),
         tuple((mode, not dagger) for mode, dagger in reversed(w)))
        for w, c in poly.terms()
    )


def local_monomials(modes: Iterable[int], max_degree: int, min_degree: int = 0) -> List[OperatorPoly]:
    """Все канонические мономы на заданных модах степени min_degree..max_degree.

    Порядок: по степени, затем лексикографически по модам.
    """
    letters = []
    for mode in sorted(set(modes)):
        letters.append((mode, True))
        letters.append((mode, False))
    words: List[Word] = []

    def extend(start: int, chosen: List[Factor]):
        if min_degree <= len(chosen) <= max_degree:
            words.append(tuple(sorted(chosen, key=_order_key)))
        if len(chosen) == max_degree:
            return
        for position in range(start, len(letters)):
            chosen.append(letters[position])
            extend(position + 1, chosen)
            chosen.pop()

    extend(0, [])
    words.sort(key=lambda w: (len(w), sorted(m for m, _ in w), [not d for _, d in w]))
    return [OperatorPoly({w: 1}) for w in words]
