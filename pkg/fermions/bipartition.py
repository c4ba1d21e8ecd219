"""
Алгебраические бипартиции: разбиение мод {1..M} на два непересекающихся
непустых множества I1, I2 и подалгебры A1, A2, порождённые их операторами.
"""
from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from typing import FrozenSet, Iterator

from .car_ops import anticommutator, ladder_matrix
from .exceptions import DomainError
from .opalg import OperatorPoly, Parity, commutator

logger = logging.getLogger(__name__)

MICROCAUSALITY_MAX_MODES = 10

SHORTHAND_RE = re.compile(r'^\s*m\s*:\s*(\d+)\s*/\s*(\d+)\s*$')


@dataclass(frozen=True)
class Bipartition:
    modes: int
    first: FrozenSet[int]
    second: FrozenSet[int]

    def __post_init__(self):
        first, second = frozenset(self.first), frozenset(self.second)
        object.__setattr__(self, 'first', first)
        object.__setattr__(self, 'second', second)
        if not first or not second:
            raise DomainError('Обе части бипартиции должны быть непустыми')
        overlap = first & second
        if overlap:
            raise DomainError(f'Части бипартиции пересекаются по модам {sorted(overlap)}')
        expected = frozenset(range(1, self.modes + 1))
        if first | second != expected:
            missing = sorted(expected - (first | second))
            extra = sorted((first | second) - expected)
            raise DomainError(f'Бипартиция не покрывает моды 1..{self.modes}: нет {missing}, лишние {extra}')

    def side(self, index: int) -> FrozenSet[int]:
        if index == 1:
            return self.first
        if index == 2:
            return self.second
        raise DomainError(f'Сторона бипартиции должна быть 1 или 2, получено {index}')

    @property
    def cut(self):
        """m для разбиения {1..m} | {m+1..M}, иначе None."""
        m = len(self.first)
        return m if self.first == frozenset(range(1, m + 1)) else None

    def to_literal(self) -> str:
        return f"{','.join(map(str, sorted(self.first)))}|{','.join(map(str, sorted(self.second)))}"

    def __str__(self):
        return self.to_literal()


def make_bipartition(m: int, modes: int) -> Bipartition:
    if not 1 <= m < modes:
        raise DomainError(f'Граница разбиения m={m} должна удовлетворять 1 <= m < {modes}')
    return Bipartition(modes, frozenset(range(1, m + 1)), frozenset(range(m + 1, modes + 1)))


def make_bipartition_sets(first, second) -> Bipartition:
    first, second = frozenset(first), frozenset(second)
    modes = max(first | second, default=0)
    return Bipartition(modes, first, second)


def _parse_modes(text: str, literal: str):
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError as exc:
        raise DomainError(f'Некорректный список мод в бипартиции {literal!r}') from exc


def parse_bipartition(literal: str, modes: int = None) -> Bipartition:
    """Разбирает "1,2|3,4" или сокращение "m:2/4"."""
    match = SHORTHAND_RE.match(literal)
    if match:
        bipartition = make_bipartition(int(match.group(1)), int(match.group(2)))
    elif literal.count('|') == 1:
        left, right = literal.split('|')
        bipartition = make_bipartition_sets(_parse_modes(left, literal), _parse_modes(right, literal))
    else:
        raise DomainError(f'Некорректная запись бипартиции {literal!r}: ожидается "1,2|3,4" или "m:2/4"')
    if modes is not None and bipartition.modes != modes:
        raise DomainError(f'Бипартиция {literal!r} задана на {bipartition.modes} модах, состояние - на {modes}')
    return bipartition


def all_bipartitions(modes: int) -> Iterator[Bipartition]:
    """Все упорядоченные бипартиции {1..M} (I1 и I2 различаются)."""
    everything = range(1, modes + 1)
    for size in range(1, modes):
        for first in itertools.combinations(everything, size):
            yield Bipartition(modes, frozenset(first), frozenset(everything) - frozenset(first))


def membership(poly: OperatorPoly, bipartition: Bipartition, side: int) -> bool:
    return poly.support_modes() <= bipartition.side(side)


def is_local(first: OperatorPoly, second: OperatorPoly, bipartition: Bipartition) -> bool:
    return membership(first, bipartition, 1) and membership(second, bipartition, 2)


def check_microcausality(bipartition: Bipartition) -> float:
    """max ||{a#_i, a#_j}|| по i из I1, j из I2."""
    modes = bipartition.modes
    if modes > MICROCAUSALITY_MAX_MODES:
        raise DomainError(f'Проверка микропричинности ограничена {MICROCAUSALITY_MAX_MODES} модами')
    deviation = 0.0
    for i in sorted(bipartition.first):
        for j in sorted(bipartition.second):
            for left_dagger in (False, True):
                for right_dagger in (False, True):
                    value = anticommutator(
                        ladder_matrix(i, left_dagger, modes),
                        ladder_matrix(j, right_dagger, modes),
                    ).max_abs()
                    deviation = max(deviation, value)
    logger.debug("Микропричинность для %s: отклонение %s", bipartition, deviation)
    return deviation


def check_algebraic_independence(first: OperatorPoly, second: OperatorPoly, bipartition: Bipartition) -> bool:
    """Коммутируют ли локальные элементы A1 из A1 и A2 из A2."""
    if not is_local(first, second, bipartition):
        raise DomainError(
            f'Пара ({first}, {second}) не локальна относительно бипартиции {bipartition}'
        )
    return commutator(first, second).is_zero()


def parity_commutation_table(bipartition: Bipartition) -> dict:
    """Какие пары (чётность A1, чётность A2) коммутируют на образцовых элементах.

    Образцы: a_i + a_i^+ (нечётный) и a_i^+ a_i (чётный) для первой моды каждой части.
    """
    i, j = min(bipartition.first), min(bipartition.second)
    samples = {
        1: {
            Parity.EVEN: OperatorPoly.creator(i) * OperatorPoly.annihilator(i),
            Parity.ODD: OperatorPoly.annihilator(i) + OperatorPoly.creator(i),
        },
        2: {
            Parity.EVEN: OperatorPoly.creator(j) * OperatorPoly.annihilator(j),
            Parity.ODD: OperatorPoly.annihilator(j) + OperatorPoly.creator(j),
        },
    }
    table = {}
    for left_parity, left in samples[1].items():
        for right_parity, right in samples[2].items():
            table[f'{left_parity.value}-{right_parity.value}'] = check_algebraic_independence(left, right, bipartition)
    return table
