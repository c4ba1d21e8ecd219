"""
Пространство Фока M фермионных мод.

Базисный вектор |n_1 ... n_M> = (a_1^+)^{n_1} ... (a_M^+)^{n_M} |0> хранится как
M-битовое число: мода 1 - младший бит, индекс в базисе = sum_i n_i 2^{i-1}.
Все знаки в car_ops отсчитываются от этого порядка мод.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Dict, List, Mapping, Union

import numpy as np
from django.conf import settings
from scipy import linalg

from .exceptions import DomainError, StateFormatError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
ENTRY_DROP_TOL = 1e-15
DEFAULT_MAX_MODES = 14


def max_modes() -> int:
    """Предел плотного представления (FMA_MAX_MODES в настройках)."""
    if settings.configured:
        return int(getattr(settings, 'FMA_MAX_MODES', DEFAULT_MAX_MODES))
    return DEFAULT_MAX_MODES


def check_dense_modes(modes: int) -> None:
    limit = max_modes()
    if modes > limit:
        logger.warning("Отказ: %s мод превышает предел плотного представления %s", modes, limit)
        raise DomainError(
            f'{modes} мод: матрица 2^{modes} x 2^{modes} не будет построена '
            f'(предел памяти FMA_MAX_MODES={limit})'
        )


@dataclass(frozen=True, order=True)
class OccupationState:
    bits: int
    modes: int

    def __post_init__(self):
        if self.modes < 1:
            raise DomainError(f'Число мод должно быть положительным: {self.modes}')
        if not 0 <= self.bits < (1 << self.modes):
            raise DomainError(f'Битовый шаблон {self.bits} не помещается в {self.modes} мод')

    @classmethod
    def vacuum(cls, modes: int) -> 'OccupationState':
        return cls(0, modes)

    @classmethod
    def from_modes(cls, occupied, modes: int) -> 'OccupationState':
        bits = 0
        for mode in occupied:
            if not 1 <= mode <= modes:
                raise DomainError(f'Мода {mode} вне диапазона 1..{modes}')
            bits |= 1 << (mode - 1)
        return cls(bits, modes)

    @classmethod
    def from_string(cls, text: str) -> 'OccupationState':
        """Разбирает запись вида "110000": первый символ - мода 1."""
        if not text or any(ch not in '01' for ch in text):
            raise StateFormatError(f'Некорректная строка заполнения: {text!r}')
        bits = sum(1 << pos for pos, ch in enumerate(text) if ch == '1')
        return cls(bits, len(text))

    def to_string(self) -> str:
        return ''.join(str(self.occupation(i)) for i in range(1, self.modes + 1))

    def occupation(self, mode: int) -> int:
        if not 1 <= mode <= self.modes:
            raise DomainError(f'Мода {mode} вне диапазона 1..{self.modes}')
        return (self.bits >> (mode - 1)) & 1

    @property
    def particle_count(self) -> int:
        return bin(self.bits).count('1')

    def occupied_modes(self) -> tuple:
        return tuple(i for i in range(1, self.modes + 1) if self.bits >> (i - 1) & 1)

    def __str__(self):
        return f'|{self.to_string()}>'


def basis_index(state: OccupationState) -> int:
    return state.bits


def state_from_index(index: int, modes: int) -> OccupationState:
    return OccupationState(index, modes)


def sector_basis(modes: int, particles: int) -> List[OccupationState]:
    """Все состояния с particles частицами, по возрастанию индекса."""
    if particles < 0 or particles > modes:
        raise DomainError(f'Число частиц {particles} вне диапазона 0..{modes}')
    states = [
        OccupationState.from_modes(occupied, modes)
        for occupied in itertools.combinations(range(1, modes + 1), particles)
    ]
    return sorted(states, key=basis_index)


@dataclass(frozen=True, eq=False)
class FockVector:
    modes: int
    amplitudes: Mapping[OccupationState, complex]

    def __post_init__(self):
        cleaned: Dict[OccupationState, complex] = {}
        for state, value in self.amplitudes.items():
            if state.modes != self.modes:
                raise DomainError(
                    f'Состояние {state} задано на {state.modes} модах, вектор - на {self.modes}'
                )
            value = complex(value)
            if abs(value) > ENTRY_DROP_TOL:
                cleaned[state] = value
        object.__setattr__(self, 'amplitudes', MappingProxyType(cleaned))

    @classmethod
    def basis(cls, state: OccupationState) -> 'FockVector':
        return cls(state.modes, {state: 1.0})

    @classmethod
    def from_array(cls, array, modes: int) -> 'FockVector':
        array = np.asarray(array, dtype=complex)
        if array.shape != (1 << modes,):
            raise DomainError(f'Ожидался вектор длины {1 << modes}, получен {array.shape}')
        return cls(modes, {
            OccupationState(int(index), modes): array[index]
            for index in np.flatnonzero(np.abs(array) > ENTRY_DROP_TOL)
        })

    @property
    def dimension(self) -> int:
        return 1 << self.modes

    def norm(self) -> float:
        return math.sqrt(sum(abs(value) ** 2 for value in self.amplitudes.values()))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> 'FockVector':
        norm = self.norm()
        if norm == 0:
            raise DomainError('Нулевой вектор нельзя нормировать')
        return FockVector(self.modes, {state: value / norm for state, value in self.amplitudes.items()})

    def particle_numbers(self) -> set:
        return {state.particle_count for state in self.amplitudes}

    def to_array(self) -> np.ndarray:
        check_dense_modes(self.modes)
        array = np.zeros(self.dimension, dtype=complex)
        for state, value in self.amplitudes.items():
            array[basis_index(state)] = value
        array.setflags(write=False)
        return array

    def __repr__(self):
        terms = ' + '.join(f'{value:.6g}{state}' for state, value in sorted(self.amplitudes.items()))
        return f'FockVector(M={self.modes}: {terms or "0"})'


@dataclass(frozen=True, eq=False)
class DensityOperator:
    modes: int
    matrix: np.ndarray

    def __post_init__(self):
        check_dense_modes(self.modes)
        matrix = np.array(self.matrix, dtype=complex)
        dim = 1 << self.modes
        if matrix.shape != (dim, dim):
            raise DomainError(f'Матрица плотности должна быть {dim}x{dim}, получена {matrix.shape}')
        if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise DomainError('Матрица плотности не эрмитова')
        if abs(np.trace(matrix) - 1.0) > TRACE_TOL:
            raise DomainError(f'След матрицы плотности {np.trace(matrix).real:.3g} != 1')
        lowest = linalg.eigvalsh(matrix)[0]
        if lowest < PSD_TOL:
            raise DomainError(f'Матрица плотности не положительна: собственное значение {lowest:.3g}')
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def from_vector(cls, vector: FockVector) -> 'DensityOperator':
        array = vector.normalized().to_array()
        return cls(vector.modes, np.outer(array, array.conj()))

    @classmethod
    def mixture(cls, weighted_states) -> 'DensityOperator':
        """Выпуклая смесь [(вес, FockVector | DensityOperator), ...]."""
        weighted_states = list(weighted_states)
        if not weighted_states:
            raise DomainError('Пустая смесь состояний')
        modes = weighted_states[0][1].modes
        matrix = np.zeros((1 << modes, 1 << modes), dtype=complex)
        for weight, state in weighted_states:
            if state.modes != modes:
                raise DomainError('Состояния смеси заданы на разном числе мод')
            if isinstance(state, FockVector):
                state = cls.from_vector(state)
            matrix += weight * state.matrix
        return cls(modes, matrix)

    @property
    def dimension(self) -> int:
        return 1 << self.modes

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return linalg.eigvalsh(self.matrix)


State = Union[FockVector, DensityOperator]


# Состояния из рассматриваемого примера: M = 2N мод, первая половина против второй

def _block(particles: int, offset: int, modes: int) -> OccupationState:
    return OccupationState(((1 << particles) - 1) << offset, modes)


def _check_particles(particles: int) -> None:
    if particles < 1:
        raise DomainError(
            f'N={particles}: при N=0 обе ветви совпадают с вакуумом, состояние вырождено'
        )


def make_state_psi(particles: int) -> FockVector:
    """(|N;0> + |0;N>)/sqrt(2) на 2N модах."""
    _check_particles(particles)
    modes = 2 * particles
    amplitude = 1 / math.sqrt(2)
    return FockVector(modes, {
        _block(particles, 0, modes): amplitude,
        _block(particles, particles, modes): amplitude,
    })


def make_rho_sep(particles: int) -> DensityOperator:
    """1/2 |N;0><N;0| + 1/2 |0;N><0;N|."""
    _check_particles(particles)
    modes = 2 * particles
    matrix = np.zeros((1 << modes, 1 << modes), dtype=complex)
    for state in (_block(particles, 0, modes), _block(particles, particles, modes)):
        matrix[basis_index(state), basis_index(state)] = 0.5
    return DensityOperator(modes, matrix)


def product_state(particles: int) -> FockVector:
    """|N;0>: заняты моды 1..N из 2N."""
    _check_particles(particles)
    return FockVector.basis(_block(particles, 0, 2 * particles))


def vacuum(modes: int) -> FockVector:
    return FockVector.basis(OccupationState.vacuum(modes))


def maximally_mixed(modes: int) -> DensityOperator:
    dim = 1 << modes
    return DensityOperator(modes, np.eye(dim, dtype=complex) / dim)


# JSON-формат состояний

def state_to_dict(state: State) -> dict:
    if isinstance(state, FockVector):
        return {
            'modes': state.modes,
            'amplitudes': [
                {'bits': occupation.to_string(), 're': float(value.real), 'im': float(value.imag)}
                for occupation, value in sorted(state.amplitudes.items())
            ],
        }
    rows, cols = np.nonzero(np.abs(state.matrix) > ENTRY_DROP_TOL)
    return {
        'modes': state.modes,
        'entries': [
            {
                'row_bits': OccupationState(int(row), state.modes).to_string(),
                'col_bits': OccupationState(int(col), state.modes).to_string(),
                're': float(state.matrix[row, col].real),
                'im': float(state.matrix[row, col].imag),
            }
            for row, col in zip(rows, cols)
        ],
    }


def _parse_bits(text, modes: int) -> OccupationState:
    if not isinstance(text, str) or len(text) != modes:
        raise StateFormatError(f'Строка заполнения {text!r} должна иметь длину {modes}')
    return OccupationState.from_string(text)


def _parse_value(entry: dict) -> complex:
    try:
        return complex(float(entry.get('re', 0.0)), float(entry.get('im', 0.0)))
    except (TypeError, ValueError) as exc:
        raise StateFormatError(f'Некорректное число в записи {entry!r}') from exc


def _entry_list(data: dict, key: str) -> list:
    entries = data[key]
    if not isinstance(entries, list):
        raise StateFormatError(f'Поле "{key}" должно быть списком, получено {type(entries).__name__}')
    for position, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise StateFormatError(f'{key}[{position}]: ожидается объект, получено {entry!r}')
    return entries


def state_from_dict(data: dict) -> State:
    if not isinstance(data, dict) or 'modes' not in data:
        raise StateFormatError('Ожидается объект с полем "modes"')
    modes = data['modes']
    # bool - подкласс int, но числом мод не является
    if not isinstance(modes, int) or isinstance(modes, bool) or modes < 1:
        raise StateFormatError(f'Некорректное число мод: {modes!r}, ожидается целое >= 1')

    if 'amplitudes' in data:
        amplitudes: Dict[OccupationState, complex] = {}
        for entry in _entry_list(data, 'amplitudes'):
            state = _parse_bits(entry.get('bits'), modes)
            amplitudes[state] = amplitudes.get(state, 0) + _parse_value(entry)
        vector = FockVector(modes, amplitudes)
        if not vector.is_normalized():
            logger.warning("Вектор из файла не нормирован (норма %.6g), нормируем", vector.norm())
            vector = vector.normalized()
        return vector

    if 'entries' in data:
        check_dense_modes(modes)
        matrix = np.zeros((1 << modes, 1 << modes), dtype=complex)
        for entry in _entry_list(data, 'entries'):
            row = _parse_bits(entry.get('row_bits'), modes)
            col = _parse_bits(entry.get('col_bits'), modes)
            matrix[basis_index(row), basis_index(col)] += _parse_value(entry)
        return DensityOperator(modes, matrix)

    raise StateFormatError('Ожидается поле "amplitudes" или "entries"')


def read_state(path) -> State:
    path = Path(path)
    try:
        with open(path, encoding='utf-8') as handle:
            data = json.load(handle)
    except OSError as exc:
        raise StateFormatError(f'Не удалось прочитать {path}: {exc}') from exc
    except json.JSONDecodeError as exc:
        raise StateFormatError(f'{path}: некорректный JSON ({exc})') from exc
    logger.debug("Прочитано состояние из %s", path)
    return state_from_dict(data)


def write_state(state: State, path) -> None:
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(state_to_dict(state), handle, indent=2)
