"""
Операторы рождения/уничтожения на базисе Фока и их матрицы.

a_i |..n_i..> = (-1)^{sum_{j<i} n_j} |..n_i - 1..>; матрицы собираются в
scipy.sparse, элементы мономов - целые +-1, поэтому проверки CAR точные.
Представление Йордана-Вигнера строится тензорным произведением матриц Паули
(мода M - старший множитель в kron, мода 1 - младший).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from .exceptions import DomainError
from .fock import ENTRY_DROP_TOL, OccupationState, basis_index, check_dense_modes

if TYPE_CHECKING:
    from .opalg import OperatorPoly

logger = logging.getLogger(__name__)

CAR_CHECK_MAX_MODES = 10

# Одномодовые матрицы в базисе (пусто, занято)
IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# sigma_- переводит занятое состояние в пустое: (X + iY)/2 в этой идентификации
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()

PAULI_FACTORS = {
    'I': IDENTITY_2,
    'X': SIGMA_X,
    'Y': SIGMA_Y,
    'Z': SIGMA_Z,
    '-': SIGMA_MINUS,
    '+': SIGMA_PLUS,
}


def _pruned(matrix) -> sparse.csr_matrix:
    matrix = sparse.csr_matrix(matrix, dtype=complex, copy=True)
    matrix.data[np.abs(matrix.data) < ENTRY_DROP_TOL] = 0
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix


@dataclass(frozen=True, eq=False)
class SparseOperator:
    modes: int
    matrix: sparse.csr_matrix

    def __post_init__(self):
        matrix = _pruned(self.matrix)
        dim = 1 << self.modes
        if matrix.shape != (dim, dim):
            raise DomainError(f'Оператор на {self.modes} модах должен быть {dim}x{dim}, получен {matrix.shape}')
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def identity(cls, modes: int) -> 'SparseOperator':
        return cls(modes, sparse.identity(1 << modes, dtype=complex, format='csr'))

    @classmethod
    def zero(cls, modes: int) -> 'SparseOperator':
        dim = 1 << modes
        return cls(modes, sparse.csr_matrix((dim, dim), dtype=complex))

    @classmethod
    def from_dense(cls, array, modes: int) -> 'SparseOperator':
        return cls(modes, sparse.csr_matrix(np.asarray(array, dtype=complex)))

    @property
    def dimension(self) -> int:
        return 1 << self.modes

    def entries(self) -> Dict[Tuple[int, int], complex]:
        coo = self.matrix.tocoo()
        return {(int(r), int(c)): complex(v) for r, c, v in zip(coo.row, coo.col, coo.data)}

    def toarray(self) -> np.ndarray:
        check_dense_modes(self.modes)
        return self.matrix.toarray()

    def adjoint(self) -> 'SparseOperator':
        return SparseOperator(self.modes, self.matrix.conj().T)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix.data), initial=0.0))

    def trace(self) -> complex:
        return complex(self.matrix.diagonal().sum())

    def _check_same(self, other: 'SparseOperator') -> None:
        if other.modes != self.modes:
            raise DomainError(f'Операторы на {self.modes} и {other.modes} модах несовместимы')

    def __add__(self, other):
        self._check_same(other)
        return SparseOperator(self.modes, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check_same(other)
        return SparseOperator(self.modes, self.matrix - other.matrix)

    def __neg__(self):
        return SparseOperator(self.modes, -self.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, SparseOperator):
            return NotImplemented
        return SparseOperator(self.modes, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check_same(other)
        return SparseOperator(self.modes, self.matrix @ other.matrix)

    def same_entries(self, other: 'SparseOperator') -> bool:
        """Точное совпадение хранимых элементов."""
        return self.modes == other.modes and self.entries() == other.entries()

    def distance(self, other: 'SparseOperator') -> float:
        return (self - other).max_abs()

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return self.distance(self.adjoint()) <= tol

    def is_projection(self, tol: float = 1e-10) -> bool:
        return self.is_hermitian(tol) and self.distance(self @ self) <= tol

    def to_entries(self) -> list:
        """Элементы в формате записей матрицы плотности (row_bits/col_bits/re/im)."""
        return [
            {
                'row_bits': OccupationState(row, self.modes).to_string(),
                'col_bits': OccupationState(col, self.modes).to_string(),
                're': value.real,
                'im': value.imag,
            }
            for (row, col), value in sorted(self.entries().items())
        ]

    def __repr__(self):
        return f'SparseOperator(M={self.modes}, nnz={self.matrix.nnz})'


def anticommutator(left: SparseOperator, right: SparseOperator) -> SparseOperator:
    return left @ right + right @ left


def commutator(left: SparseOperator, right: SparseOperator) -> SparseOperator:
    return left @ right - right @ left


def _check_mode(mode: int, modes: int) -> None:
    if not 1 <= mode <= modes:
        raise DomainError(f'Мода {mode} вне диапазона 1..{modes}')


def _string_sign(bits: int, mode: int) -> int:
    # (-1)^{число занятых мод с номером меньше mode}
    return -1 if bin(bits & ((1 << (mode - 1)) - 1)).count('1') % 2 else 1


def apply_annihilate(state: OccupationState, mode: int) -> Optional[Tuple[int, OccupationState]]:
    _check_mode(mode, state.modes)
    flag = 1 << (mode - 1)
    if not state.bits & flag:
        return None
    return _string_sign(state.bits, mode), OccupationState(state.bits ^ flag, state.modes)


def apply_create(state: OccupationState, mode: int) -> Optional[Tuple[int, OccupationState]]:
    _check_mode(mode, state.modes)
    flag = 1 << (mode - 1)
    if state.bits & flag:
        return None
    return _string_sign(state.bits, mode), OccupationState(state.bits | flag, state.modes)


def apply_ladder(state: OccupationState, mode: int, dagger: bool):
    return apply_create(state, mode) if dagger else apply_annihilate(state, mode)


@lru_cache(maxsize=512)
def ladder_matrix(mode: int, dagger: bool, modes: int) -> SparseOperator:
    """Матрица a_i или a_i^+, собранная по правилу знаков столбец за столбцом."""
    _check_mode(mode, modes)
    check_dense_modes(modes)
    rows, cols, values = [], [], []
    for column in range(1 << modes):
        result = apply_ladder(OccupationState(column, modes), mode, dagger)
        if result is None:
            continue
        sign, target = result
        rows.append(basis_index(target))
        cols.append(column)
        values.append(sign)
    dim = 1 << modes
    return SparseOperator(modes, sparse.coo_matrix((values, (rows, cols)), shape=(dim, dim), dtype=complex))


def pauli_string(labels: Sequence[str]) -> SparseOperator:
    """Тензорное произведение одномодовых множителей; labels[0] относится к моде 1.

    Допустимые метки: I, X, Y, Z, '-' (sigma_-), '+' (sigma_+).
    """
    labels = list(labels)
    if not labels:
        raise DomainError('Пустая строка Паули')
    check_dense_modes(len(labels))
    try:
        factors = [PAULI_FACTORS[label] for label in labels]
    except KeyError as exc:
        raise DomainError(f'Неизвестная метка Паули {exc.args[0]!r}') from exc
    result = sparse.csr_matrix(factors[-1])
    for factor in reversed(factors[:-1]):
        result = sparse.kron(result, sparse.csr_matrix(factor), format='csr')
    return SparseOperator(len(labels), result)


@lru_cache(maxsize=512)
def jw_matrix(mode: int, dagger: bool, modes: int) -> SparseOperator:
    """a_i = Z x ... x Z x sigma_- x 1 x ... x 1 (строка Z на модах j < i)."""
    _check_mode(mode, modes)
    labels = ['Z'] * (mode - 1) + ['+' if dagger else '-'] + ['I'] * (modes - mode)
    return pauli_string(labels)


def number_operator(mode: int, modes: int) -> SparseOperator:
    return ladder_matrix(mode, True, modes) @ ladder_matrix(mode, False, modes)


def total_number_operator(modes: int) -> SparseOperator:
    total = SparseOperator.zero(modes)
    for mode in range(1, modes + 1):
        total = total + number_operator(mode, modes)
    return total


def verify_car(modes: int) -> float:
    """Максимальное отклонение от CAR по всем парам мод."""
    if modes > CAR_CHECK_MAX_MODES:
        raise DomainError(f'Проверка CAR ограничена {CAR_CHECK_MAX_MODES} модами, запрошено {modes}')
    identity = SparseOperator.identity(modes)
    deviation = 0.0
    for i in range(1, modes + 1):
        a_i = ladder_matrix(i, False, modes)
        a_i_dag = ladder_matrix(i, True, modes)
        for j in range(1, modes + 1):
            a_j = ladder_matrix(j, False, modes)
            a_j_dag = ladder_matrix(j, True, modes)
            mixed = anticommutator(a_i, a_j_dag)
            if i == j:
                mixed = mixed - identity
            deviation = max(
                deviation,
                mixed.max_abs(),
                anticommutator(a_i, a_j).max_abs(),
                anticommutator(a_i_dag, a_j_dag).max_abs(),
            )
    logger.debug("CAR для M=%s: максимальное отклонение %s", modes, deviation)
    return deviation


def poly_to_matrix(poly: 'OperatorPoly', modes: int) -> SparseOperator:
    """Матрица полинома; левый множитель монома действует последним."""
    support = poly.support_modes()
    if support and max(support) > modes:
        raise DomainError(f'Полином использует моду {max(support)}, а система содержит {modes} мод')
    check_dense_modes(modes)
    dim = 1 << modes
    total = sparse.csr_matrix((dim, dim), dtype=complex)
    identity = sparse.identity(dim, dtype=complex, format='csr')
    for factors, coefficient in poly.terms():
        product = identity
        for mode, dagger in factors:
            product = product @ ladder_matrix(mode, dagger, modes).matrix
        total = total + product * coefficient
    return SparseOperator(modes, total)
