"""
Анализ состояний относительно бипартиции: средние, нечётно-нечётный свидетель
запутанности, согласованность произведения функционалов, сравнение на чётных
подалгебрах, пересечение проекторов и некоррелированность, выпуклая подгонка
смесью произведений.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.optimize import nnls

from .bipartition import Bipartition
from .car_ops import SparseOperator, apply_create, poly_to_matrix
from .exceptions import DomainError
from .fock import DensityOperator, FockVector, OccupationState, State
from .opalg import OperatorPoly, Parity, adjoint, local_monomials

logger = logging.getLogger(__name__)

CERTIFICATION_THRESHOLD = 1e-9
EVEN_EQUALITY_TOL = 1e-10
PROJECTION_TOL = 1e-10
MEET_AGREEMENT_TOL = 1e-8
RANGE_EIGENVALUE_TOL = 1e-8
SPECTRAL_CUTOFF = 1e-6
WEIGHT_SUM_TOL = 1e-9
DENSITY_RANK_TOL = 1e-13
FIT_MAX_MODES = 7
# вес строки sum(lambda) = 1 в задаче NNLS
SUM_ROW_WEIGHT = 10.0

Operator = Union[OperatorPoly, SparseOperator]


class Verdict(str, enum.Enum):
    ENTANGLED_CERTIFIED = 'entangled-certified'
    NO_CERTIFICATE = 'no-certificate'


class MeetMethod(str, enum.Enum):
    ITERATED_PRODUCT = 'iterated-product'
    RANGE_INTERSECTION = 'range-intersection'


# Средние значения

def _as_matrix(operator: Operator, modes: int) -> SparseOperator:
    if isinstance(operator, SparseOperator):
        if operator.modes != modes:
            raise DomainError(f'Оператор задан на {operator.modes} модах, состояние - на {modes}')
        return operator
    support = operator.support_modes()
    if support and max(support) > modes:
        raise DomainError(f'Оператор использует моду {max(support)}, а состояние задано на {modes} модах')
    return poly_to_matrix(operator, modes)


def _pure_components(state: State) -> List[Tuple[float, np.ndarray]]:
    """Разложение состояния на чистые компоненты (вес, вектор)."""
    if isinstance(state, FockVector):
        return [(1.0, state.to_array())]
    weights, vectors = linalg.eigh(state.matrix)
    return [
        (float(weight), vectors[:, k])
        for k, weight in enumerate(weights)
        if weight > DENSITY_RANK_TOL
    ]


def expectation(state: State, operator: Operator) -> complex:
    matrix = _as_matrix(operator, state.modes)
    if isinstance(state, FockVector):
        vector = state.to_array()
        return complex(np.vdot(vector, matrix.matrix @ vector))
    # Tr(rho P) = sum_ij rho_ji P_ij
    return complex(matrix.matrix.multiply(state.matrix.T).sum())


def pair_expectations(state: State, firsts: Sequence[SparseOperator], seconds: Sequence[SparseOperator]) -> np.ndarray:
    """Таблица omega(A1 A2) для всех пар: <v|A1 A2|v> = (A1^+ v)^+ (A2 v)."""
    table = np.zeros((len(firsts), len(seconds)), dtype=complex)
    if not firsts or not seconds:
        return table
    for weight, vector in _pure_components(state):
        left = np.column_stack([first.matrix.conj().T @ vector for first in firsts])
        right = np.column_stack([second.matrix @ vector for second in seconds])
        table += weight * (left.conj().T @ right)
    return table


# Нечётно-нечётный свидетель

@dataclass(frozen=True)
class WitnessReport:
    verdict: Verdict
    witness_pair: Optional[Tuple[OperatorPoly, OperatorPoly]]
    value: complex
    search_degree: int
    candidates_checked: int = 0

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.ENTANGLED_CERTIFIED


def designated_pair(bipartition: Bipartition) -> Tuple[OperatorPoly, OperatorPoly]:
    """A1 = prod_{i in I1} a_i, A2 = prod_{j in I2} a_j^+ в порядке возрастания мод."""
    first = OperatorPoly.product((mode, False) for mode in sorted(bipartition.first))
    second = OperatorPoly.product((mode, True) for mode in sorted(bipartition.second))
    return first, second


def witness_candidates(bipartition: Bipartition, max_degree: int) -> List[Tuple[OperatorPoly, OperatorPoly]]:
    """Пары нечётных мономов по возрастанию суммарной степени, затем по модам."""
    firsts = local_monomials(bipartition.first, max_degree, min_degree=1)
    seconds = local_monomials(bipartition.second, max_degree, min_degree=1)
    firsts = [p for p in firsts if p.parity() is Parity.ODD]
    seconds = [q for q in seconds if q.parity() is Parity.ODD]
    order = sorted(
        ((i, j) for i in range(len(firsts)) for j in range(len(seconds))),
        key=lambda ij: (firsts[ij[0]].degree() + seconds[ij[1]].degree(), ij[0], ij[1]),
    )
    pairs = [(firsts[i], seconds[j]) for i, j in order]

    first, second = designated_pair(bipartition)
    if first.parity() is Parity.ODD and second.parity() is Parity.ODD:
        known = {(p, q) for p, q in pairs}
        normalized = (_unit(first), _unit(second))
        if normalized not in known:
            pairs.append((first, second))
    return pairs


def _unit(poly: OperatorPoly) -> OperatorPoly:
    # моном с коэффициентом 1 (знак упорядочения отбрасывается)
    (word, _), = poly.terms()
    return OperatorPoly({word: 1})


def odd_odd_witness(state: State, bipartition: Bipartition, max_degree: int) -> WitnessReport:
    if max_degree < 1:
        raise DomainError(f'Степень поиска должна быть >= 1, получено {max_degree}')
    if state.modes != bipartition.modes:
        raise DomainError(f'Состояние на {state.modes} модах, бипартиция на {bipartition.modes}')

    pairs = witness_candidates(bipartition, max_degree)
    firsts = list(dict.fromkeys(p for p, _ in pairs))
    seconds = list(dict.fromkeys(q for _, q in pairs))
    first_index = {p: k for k, p in enumerate(firsts)}
    second_index = {q: k for k, q in enumerate(seconds)}
    modes = state.modes
    table = pair_expectations(
        state,
        [poly_to_matrix(p, modes) for p in firsts],
        [poly_to_matrix(q, modes) for q in seconds],
    )
    logger.debug("Поиск свидетеля: %s пар, степень до %s", len(pairs), max_degree)

    for checked, (first, second) in enumerate(pairs, start=1):
        value = table[first_index[first], second_index[second]]
        if abs(value) > CERTIFICATION_THRESHOLD:
            logger.info("Свидетель запутанности найден: <%s * %s> = %s", first, second, value)
            return WitnessReport(Verdict.ENTANGLED_CERTIFIED, (first, second), complex(value), max_degree, checked)
    return WitnessReport(Verdict.NO_CERTIFICATE, None, 0j, max_degree, len(pairs))


# Лемма о произведении функционалов

@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    witness_pair: Optional[Tuple[OperatorPoly, OperatorPoly]] = None
    values: Optional[Tuple[complex, complex]] = None
    first_odd_vanishes: bool = True
    second_odd_vanishes: bool = True


def self_adjoint_odd_elements(modes, max_degree: int) -> List[OperatorPoly]:
    """m + m^+ и i(m - m^+) для нечётных мономов m, без повторов."""
    elements = {}
    for monomial in local_monomials(modes, max_degree, min_degree=1):
        if monomial.parity() is not Parity.ODD:
            continue
        conjugate = adjoint(monomial)
        for candidate in (monomial + conjugate, (monomial - conjugate) * 1j):
            if candidate and candidate not in elements and -candidate not in elements:
                elements[candidate] = None
    return list(elements)


def _first_nonvanishing(state: State, candidates: Sequence[OperatorPoly]):
    for candidate in candidates:
        value = expectation(state, candidate)
        if abs(value) > CERTIFICATION_THRESHOLD:
            return candidate, value
    return None, 0j


def product_functional_consistency(first_state: State, second_state: State, bipartition: Bipartition,
                                   max_degree: int) -> ConsistencyResult:
    """Может ли omega(A1 A2) = omega1(A1) omega2(A2) быть состоянием.

    Если omega1 и omega2 обе не обращаются в ноль на самосопряжённых нечётных
    элементах своих частей, omega(pq) должно быть чисто мнимым (pq = -qp,
    (pq)^+ = qp), а произведение средних вещественно и ненулевое.
    """
    for state in (first_state, second_state):
        if state.modes != bipartition.modes:
            raise DomainError(f'Состояние на {state.modes} модах, бипартиция на {bipartition.modes}')
    first, first_value = _first_nonvanishing(first_state, self_adjoint_odd_elements(bipartition.first, max_degree))
    second, second_value = _first_nonvanishing(second_state, self_adjoint_odd_elements(bipartition.second, max_degree))
    if first is not None and second is not None:
        logger.info("Произведение функционалов не является состоянием: <%s>=%s, <%s>=%s",
                    first, first_value, second, second_value)
        return ConsistencyResult(False, (first, second), (first_value, second_value), False, False)
    return ConsistencyResult(True, None, None, first is None, second is None)


# Сравнение на чётных подалгебрах

@dataclass(frozen=True)
class EvenRestrictionResult:
    equal: bool
    max_diff: float
    worst_pair: Optional[Tuple[OperatorPoly, OperatorPoly]]
    pairs_checked: int


def even_restriction_equal(first_state: State, second_state: State, bipartition: Bipartition,
                           max_degree: int) -> EvenRestrictionResult:
    if first_state.modes != second_state.modes or first_state.modes != bipartition.modes:
        raise DomainError('Состояния и бипартиция должны быть заданы на одном числе мод')
    modes = bipartition.modes
    firsts = [p for p in local_monomials(bipartition.first, max_degree) if p.parity() is Parity.EVEN]
    seconds = [q for q in local_monomials(bipartition.second, max_degree) if q.parity() is Parity.EVEN]
    first_matrices = [poly_to_matrix(p, modes) for p in firsts]
    second_matrices = [poly_to_matrix(q, modes) for q in seconds]
    difference = np.abs(
        pair_expectations(first_state, first_matrices, second_matrices)
        - pair_expectations(second_state, first_matrices, second_matrices)
    )
    i, j = np.unravel_index(int(np.argmax(difference)), difference.shape)
    max_diff = float(difference[i, j])
    equal = max_diff < EVEN_EQUALITY_TOL
    worst = None if equal else (firsts[i], seconds[j])
    logger.debug("Чётные подалгебры: %s пар, максимальное расхождение %.3g", difference.size, max_diff)
    return EvenRestrictionResult(equal, max_diff, worst, int(difference.size))


# Проекторы и их пересечение

def field_projection(mode: int) -> OperatorPoly:
    """(1 + a_i + a_i^+)/2."""
    return (OperatorPoly.identity() + OperatorPoly.annihilator(mode) + OperatorPoly.creator(mode)) * 0.5


def _check_projection(operator: SparseOperator, name: str) -> None:
    if not operator.is_projection(PROJECTION_TOL):
        raise DomainError(f'{name} не является проектором (P^2 != P или P^+ != P)')


def compression_spectrum(first: SparseOperator, second: SparseOperator) -> np.ndarray:
    """Собственные значения P Q P по возрастанию."""
    product = (first @ second @ first).toarray()
    return linalg.eigvalsh((product + product.conj().T) / 2)


@dataclass(frozen=True)
class MeetResult:
    meet: SparseOperator
    iterations: int
    method: MeetMethod
    residual: float
    converged: bool = True
    iterated: Optional[SparseOperator] = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return int(round(self.meet.trace().real))


def _range_projector(vectors: np.ndarray, mask: np.ndarray) -> np.ndarray:
    basis = vectors[:, mask]
    return basis @ basis.conj().T


def projection_meet(first: SparseOperator, second: SparseOperator, tol: float = 1e-12,
                    max_iter: int = 64) -> MeetResult:
    """P ^ Q двумя способами: пределом P(PQP)^n P и пересечением образов.

    Итерации - возведение PQP в квадрат (подпоследовательность n = 2^k), до
    изменения меньше tol или max_iter шагов; спектр предела округляется к {0, 1}.
    Возвращается проектор на собственное подпространство P + Q со значением 2.
    """
    if first.modes != second.modes:
        raise DomainError('Проекторы заданы на разном числе мод')
    _check_projection(first, 'P')
    _check_projection(second, 'Q')
    p, q = first.toarray(), second.toarray()

    power = p @ q @ p
    iterations = 0
    while iterations < max_iter:
        squared = power @ power
        change = np.max(np.abs(squared - power), initial=0.0)
        power = squared
        iterations += 1
        if change < tol:
            break
    limit = p @ power @ p
    limit = (limit + limit.conj().T) / 2
    values, vectors = linalg.eigh(limit)
    converged = not np.any((values > SPECTRAL_CUTOFF) & (values < 1 - SPECTRAL_CUTOFF))
    if not converged:
        logger.warning("Итерации P(PQP)^n P не сошлись за %s шагов: спектр %s", iterations, values)
    iterated = _range_projector(vectors, values > 0.5)

    values, vectors = linalg.eigh(p + q)
    exact = _range_projector(vectors, values >= 2 - RANGE_EIGENVALUE_TOL)
    residual = float(np.max(np.abs(exact - iterated), initial=0.0))
    if residual > MEET_AGREEMENT_TOL:
        logger.warning("Методы пересечения проекторов расходятся на %.3g", residual)
    modes = first.modes
    return MeetResult(
        meet=SparseOperator.from_dense(exact, modes),
        iterations=iterations,
        method=MeetMethod.RANGE_INTERSECTION,
        residual=residual,
        converged=converged,
        iterated=SparseOperator.from_dense(iterated, modes),
    )


@dataclass(frozen=True)
class CorrelationResult:
    uncorrelated: bool
    lhs: float
    rhs: float
    first_expectation: float
    second_expectation: float
    meet: MeetResult = field(repr=False)


def is_uncorrelated(state: State, first: Operator, second: Operator, tol: float = 1e-10) -> CorrelationResult:
    """omega(P1 ^ P2) == omega(P1) omega(P2) с точностью tol."""
    first_matrix = _as_matrix(first, state.modes)
    second_matrix = _as_matrix(second, state.modes)
    _check_projection(first_matrix, 'P1')
    _check_projection(second_matrix, 'P2')
    meet = projection_meet(first_matrix, second_matrix)
    lhs = expectation(state, meet.meet).real
    first_value = expectation(state, first_matrix).real
    second_value = expectation(state, second_matrix).real
    rhs = first_value * second_value
    return CorrelationResult(abs(lhs - rhs) <= tol, lhs, rhs, first_value, second_value, meet)


# Выпуклая подгонка произведениями

@dataclass(frozen=True, eq=False)
class ProductAtom:
    label: str
    first: FockVector
    second: FockVector
    vector: FockVector

    @property
    def density(self) -> DensityOperator:
        return DensityOperator.from_vector(self.vector)


@dataclass(frozen=True, eq=False)
class SeparableFit:
    weights: np.ndarray
    dictionary: List[ProductAtom]
    residual: float

    def support(self, tol: float = 1e-9) -> List[Tuple[float, ProductAtom]]:
        return [(float(w), atom) for w, atom in zip(self.weights, self.dictionary) if w > tol]


def _side_bits(bits: int, side) -> int:
    return sum(bits & (1 << (mode - 1)) for mode in side)


def _combine(first: FockVector, second: FockVector) -> FockVector:
    """Phi1(a^+_{I1}) Phi2(a^+_{I2}) |0>, мономы каждой части - по возрастанию мод."""
    modes = first.modes
    amplitudes = {}
    for left, left_value in first.amplitudes.items():
        for right, right_value in second.amplitudes.items():
            state, sign = OccupationState.vacuum(modes), 1
            # самый правый оператор рождения действует первым
            for mode in reversed(left.occupied_modes() + right.occupied_modes()):
                step, state = apply_create(state, mode)
                sign *= step
            amplitudes[state] = amplitudes.get(state, 0) + sign * left_value * right_value
    return FockVector(modes, amplitudes)


def _random_side_state(rng: np.random.Generator, side, modes: int) -> FockVector:
    parity = int(rng.integers(2))
    side = sorted(side)
    patterns = [
        OccupationState.from_modes([m for k, m in enumerate(side) if mask >> k & 1], modes)
        for mask in range(1 << len(side))
        if bin(mask).count('1') % 2 == parity
    ]
    values = rng.normal(size=len(patterns)) + 1j * rng.normal(size=len(patterns))
    return FockVector(modes, dict(zip(patterns, values))).normalized()


def product_dictionary(bipartition: Bipartition, dict_size: int, seed: int) -> List[ProductAtom]:
    """Все базисные произведения плюс dict_size случайных с фиксированной чётностью частей."""
    modes = bipartition.modes
    atoms = []
    for index in range(1 << modes):
        state = OccupationState(index, modes)
        first = FockVector.basis(OccupationState(_side_bits(index, bipartition.first), modes))
        second = FockVector.basis(OccupationState(_side_bits(index, bipartition.second), modes))
        atoms.append(ProductAtom(f'basis:{state.to_string()}', first, second, _combine(first, second)))
    rng = np.random.default_rng(seed)
    for k in range(dict_size):
        first = _random_side_state(rng, bipartition.first, modes)
        second = _random_side_state(rng, bipartition.second, modes)
        atoms.append(ProductAtom(f'random:{k}', first, second, _combine(first, second)))
    return atoms


def _realified(matrix: np.ndarray) -> np.ndarray:
    flat = matrix.reshape(-1)
    return np.concatenate([flat.real, flat.imag])


def separable_fit(rho: State, bipartition: Bipartition, dict_size: int, seed: int = 0) -> SeparableFit:
    """min ||rho - sum_k lambda_k rho_k||_F по lambda_k >= 0, sum lambda_k = 1.

    Малый остаток - довод в пользу сепарабельности на чётных наблюдаемых, но
    не доказательство; большой остаток - не доказательство запутанности.
    """
    if dict_size < 1:
        raise DomainError(f'Размер словаря должен быть >= 1, получено {dict_size}')
    if rho.modes != bipartition.modes:
        raise DomainError(f'Состояние на {rho.modes} модах, бипартиция на {bipartition.modes}')
    if rho.modes > FIT_MAX_MODES:
        raise DomainError(f'Подгонка смесью произведений ограничена {FIT_MAX_MODES} модами')
    if isinstance(rho, FockVector):
        rho = DensityOperator.from_vector(rho)

    atoms = product_dictionary(bipartition, dict_size, seed)
    densities = [atom.density.matrix for atom in atoms]
    system = np.column_stack([_realified(d) for d in densities])
    system = np.vstack([system, SUM_ROW_WEIGHT * np.ones((1, len(atoms)))])
    target = np.concatenate([_realified(rho.matrix), [SUM_ROW_WEIGHT]])
    weights, _ = nnls(system, target)

    total = weights.sum()
    if abs(total - 1) > WEIGHT_SUM_TOL:
        logger.warning("Сумма весов подгонки %.6g, нормируем к 1", total)
    if total > 0:
        weights = weights / total
    approximation = sum((w * d for w, d in zip(weights, densities) if w), np.zeros_like(rho.matrix))
    residual = float(np.linalg.norm(rho.matrix - approximation))
    logger.debug("Подгонка: %s атомов, остаток %.3g", len(atoms), residual)
    return SeparableFit(weights, atoms, residual)


@dataclass(frozen=True)
class ProductOverlap:
    fidelity: float
    parities: Optional[Tuple[int, int]]

    @property
    def residual_floor(self) -> float:
        """Нижняя граница остатка separable_fit для чистого состояния: 1 - F."""
        return max(0.0, 1.0 - self.fidelity)


def max_product_overlap(state: FockVector, bipartition: Bipartition) -> ProductOverlap:
    """max |<psi|Phi1 Phi2|0>|^2 по произведениям с фиксированной чётностью частей.

    Для каждой пары чётностей амплитуды (со знаком упорядочения I1, I2)
    образуют матрицу [x1, x2]; максимум - квадрат её старшего сингулярного числа.
    Словарь не нужен, граница доступна при любом числе мод до FMA_MAX_MODES.
    """
    if not isinstance(state, FockVector):
        raise DomainError('Граница по перекрытию определена только для чистых состояний')
    if state.modes != bipartition.modes:
        raise DomainError(f'Состояние на {state.modes} модах, бипартиция на {bipartition.modes}')
    blocks = {}
    for occupation, amplitude in state.amplitudes.items():
        left = OccupationState(_side_bits(occupation.bits, bipartition.first), state.modes)
        right = OccupationState(_side_bits(occupation.bits, bipartition.second), state.modes)
        ordered = _combine(FockVector.basis(left), FockVector.basis(right))
        sign = ordered.amplitudes[occupation]
        key = (left.particle_count % 2, right.particle_count % 2)
        blocks.setdefault(key, []).append((left.bits, right.bits, np.conj(amplitude) * sign))

    best, parities = 0.0, None
    for key, entries in sorted(blocks.items()):
        rows = {bits: k for k, bits in enumerate(sorted({row for row, _, _ in entries}))}
        cols = {bits: k for k, bits in enumerate(sorted({col for _, col, _ in entries}))}
        block = np.zeros((len(rows), len(cols)), dtype=complex)
        for row, col, value in entries:
            block[rows[row], cols[col]] += value
        fidelity = float(linalg.svdvals(block)[0] ** 2)
        if fidelity > best:
            best, parities = fidelity, key
    return ProductOverlap(best, parities)
