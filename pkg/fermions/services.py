from __future__ import annotations

import json
import logging
from typing import Dict, List, Optional, Tuple

from .analysis import (
    FIT_MAX_MODES,
    WitnessReport,
    compression_spectrum,
    designated_pair,
    even_restriction_equal,
    expectation,
    is_uncorrelated,
    max_product_overlap,
    odd_odd_witness,
    field_projection,
    product_functional_consistency,
    separable_fit,
)
from .bipartition import (
    MICROCAUSALITY_MAX_MODES,
    check_microcausality,
    make_bipartition,
    parity_commutation_table,
)
from .car_ops import SparseOperator, pauli_string, poly_to_matrix, verify_car
from .config import RunConfig
from .fock import DensityOperator, FockVector, State, make_rho_sep, make_state_psi
from .opalg import parse

logger = logging.getLogger(__name__)

Report = Dict[str, object]

# нижняя граница остатка подгонки выше порога: когерентность, недостижимая произведениями
COHERENCE_FLOOR = 0.3
EXACT_TOL = 1e-12
SPECTRUM_TOL = 1e-10
MEET_TOL = 1e-8
FLOOR_TOL = 1e-9


def complex_to_dict(value: complex) -> dict:
    value = complex(value)
    return {'re': value.real, 'im': value.imag}


def witness_to_dict(witness: WitnessReport) -> Optional[dict]:
    if witness.witness_pair is None:
        return None
    first, second = witness.witness_pair
    return {
        'A1': first.to_expression(),
        'A2': second.to_expression(),
        'value': complex_to_dict(witness.value),
    }


def build_report(analysis: str, modes: int, bipartition, verdict: str, witness=None, details=None) -> Report:
    return {
        'analysis': analysis,
        'modes': modes,
        'bipartition': str(bipartition) if bipartition is not None else None,
        'verdict': verdict,
        'witness': witness,
        'details': details or {},
    }


def format_deviation(value: float) -> str:
    """0.0 -> "0.0e0", 1.5e-05 -> "1.5e-5"."""
    mantissa, exponent = f'{value:.1e}'.split('e')
    return f'{mantissa}e{int(exponent)}'


def report_to_json(report: Report) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False)


def report_to_text(report: Report) -> str:
    lines = [f"{report['analysis']}: {report['verdict']}", f"modes: {report['modes']}"]
    if report['bipartition']:
        lines.append(f"bipartition: {report['bipartition']}")
    witness = report['witness']
    if witness:
        value = witness['value']
        lines.append(f"witness: <{witness['A1']} * {witness['A2']}> = {value['re']:+.12g}{value['im']:+.12g}i")
    for key, value in report['details'].items():
        if isinstance(value, dict):
            value = ', '.join(f'{k}={v}' for k, v in value.items())
        elif isinstance(value, list):
            value = '; '.join(map(str, value))
        lines.append(f'{key}: {value}')
    return '\n'.join(lines)


def run_car_check(config: RunConfig) -> Tuple[Report, List[str]]:
    deviation = verify_car(config.modes)
    failures = [] if deviation == 0 else [f'CAR нарушены: отклонение {deviation}']
    details = {
        'max_deviation': deviation,
        'max_deviation_text': f'max deviation {format_deviation(deviation)}',
        'relations': ['{a_i, A_j} = delta_ij', '{a_i, a_j} = 0', '{A_i, A_j} = 0'],
    }
    verdict = 'exact' if deviation == 0 else 'violated'
    return build_report('car-check', config.modes, None, verdict, details=details), failures


def spin_projections(n: int) -> Tuple[SparseOperator, SparseOperator]:
    """P1 = (1 + X)/2 (x) 1, P2 = (1 + Z..Z X 1..1)/2 на 2N модах."""
    modes = 2 * n
    identity = SparseOperator.identity(modes)
    first = pauli_string(['X'] + ['I'] * (modes - 1))
    second = pauli_string(['Z'] * n + ['X'] + ['I'] * (n - 1))
    return (identity + first) * 0.5, (identity + second) * 0.5


def _spectrum_summary(values) -> List[float]:
    nonzero = sorted({round(float(v), 12) for v in values if abs(v) > SPECTRUM_TOL})
    return nonzero


def run_demo_psi(config: RunConfig) -> Tuple[Report, List[str]]:
    """Все проверки для |Psi> = (|N;0> + |0;N>)/sqrt(2) с бипартицией (N, 2N)."""
    n = config.n
    modes = 2 * n
    psi = make_state_psi(n)
    rho_sep = make_rho_sep(n)
    bipartition = make_bipartition(n, modes)
    failures: List[str] = []
    notes: List[str] = []
    odd_n = n % 2 == 1
    checks: Dict[str, bool] = {}

    def check(name: str, passed: bool) -> bool:
        checks[name] = bool(passed)
        if not passed:
            failures.append(name)
        return passed

    witness = odd_odd_witness(psi, bipartition, config.degree)
    first, second = designated_pair(bipartition)
    designated_value = expectation(psi, first * second)
    check('designated_magnitude_half', abs(abs(designated_value) - 0.5) <= EXACT_TOL)
    if odd_n:
        check('odd_odd_witness_certified', witness.certified)
    else:
        check('odd_odd_witness_absent', not witness.certified)

    even = even_restriction_equal(psi, rho_sep, bipartition, config.degree)
    check('even_restriction_matches_parity_of_n', even.equal == odd_n)
    distinguishing = None
    if even.worst_pair is not None:
        distinguishing = {
            'A1': even.worst_pair[0].to_expression(),
            'A2': even.worst_pair[1].to_expression(),
            'status': 'rejected: even-even pair, not an odd-odd witness',
        }

    p1_poly, p2_poly = field_projection(1), field_projection(n + 1)
    p1, p2 = poly_to_matrix(p1_poly, modes), poly_to_matrix(p2_poly, modes)
    spin_p1, spin_p2 = spin_projections(n)
    check('projections_match_spin_form', max(p1.distance(spin_p1), p2.distance(spin_p2)) <= EXACT_TOL)
    spectrum = _spectrum_summary(compression_spectrum(p1, p2))
    check('compression_eigenvalue_half', spectrum == [0.5])

    correlation = is_uncorrelated(psi, p1, p2, config.tol)
    meet = correlation.meet
    check('meet_is_zero', meet.rank == 0 and meet.meet.max_abs() <= MEET_TOL)
    check('meet_methods_agree', meet.residual <= MEET_TOL)
    check('correlated', not correlation.uncorrelated and abs(correlation.lhs) <= SPECTRUM_TOL and correlation.rhs > 0)

    microcausality = None
    if modes <= MICROCAUSALITY_MAX_MODES:
        microcausality = check_microcausality(bipartition)
        check('microcausality_exact', microcausality == 0)
    table = parity_commutation_table(bipartition)
    check('only_odd_odd_pairs_fail_to_commute',
          table == {'even-even': True, 'even-odd': True, 'odd-even': True, 'odd-odd': False})

    overlap = max_product_overlap(psi, bipartition)
    coherence_floor = overlap.residual_floor
    if not odd_n:
        check('coherence_floor', coherence_floor > COHERENCE_FLOOR)

    fit_residual = None
    if modes <= FIT_MAX_MODES:
        fit_residual = separable_fit(psi, bipartition, config.dict_size, config.seed).residual
        check('fit_respects_overlap_floor', fit_residual >= coherence_floor - FLOOR_TOL)
    else:
        notes.append(f'separable_fit пропущен: {modes} мод > {FIT_MAX_MODES}, используется граница 1 - F')

    if odd_n:
        verdict = witness.verdict.value
    else:
        notes.append('N чётно: нечётно-нечётные корреляторы обращаются в ноль, чётные подалгебры различают |Psi> и rho_sep')
        verdict = 'entangled-by-coherence' if coherence_floor > COHERENCE_FLOOR else 'no-certificate'

    details = {
        'n': n,
        'n_parity': 'odd' if odd_n else 'even',
        'search_degree': config.degree,
        'designated_pair': {'A1': first.to_expression(), 'A2': second.to_expression()},
        'designated_value': complex_to_dict(designated_value),
        'witness_magnitude': abs(witness.value),
        'even_restriction_equal': even.equal,
        'even_restriction_max_diff': even.max_diff,
        'even_distinguishing_pair': distinguishing,
        'compression_spectrum': spectrum,
        'meet_norm': meet.meet.max_abs(),
        'meet_rank': meet.rank,
        'meet_residual': meet.residual,
        'meet_iterations': meet.iterations,
        'meet_converged': meet.converged,
        'p1_expectation': correlation.first_expectation,
        'p2_expectation': correlation.second_expectation,
        'uncorrelated': correlation.uncorrelated,
        'lhs': correlation.lhs,
        'rhs': correlation.rhs,
        'microcausality_deviation': microcausality,
        'parity_commutation': table,
        'product_fidelity': overlap.fidelity,
        'coherence_floor': coherence_floor,
        'separable_fit_residual': fit_residual,
        'checks': checks,
        'notes': notes,
    }
    if failures:
        logger.error("demo-psi N=%s: не пройдены проверки %s", n, failures)
    report = build_report('demo-psi', modes, bipartition, verdict, witness_to_dict(witness), details)
    return report, failures


def run_expect(config: RunConfig) -> Tuple[Report, List[str]]:
    state = config.load_state()
    poly = parse(config.expr)
    value = expectation(state, poly)
    details = {
        'expression': config.expr,
        'normal_ordered': poly.to_expression(),
        'value': complex_to_dict(value),
    }
    return build_report('expect', state.modes, None, 'computed', details=details), []


def _product_overlap(state: State, bipartition) -> Optional[dict]:
    if not isinstance(state, FockVector):
        return None
    overlap = max_product_overlap(state, bipartition)
    return {'fidelity': overlap.fidelity, 'residual_floor': overlap.residual_floor}


def run_analyze(config: RunConfig) -> Tuple[Report, List[str]]:
    state = config.load_state()
    bipartition = config.load_bipartition(state.modes)
    witness = odd_odd_witness(state, bipartition, config.degree)
    consistency = product_functional_consistency(state, state, bipartition, config.degree)
    details: Dict[str, object] = {
        'search_degree': config.degree,
        'candidates_checked': witness.candidates_checked,
        'product_consistency': 'consistent' if consistency.consistent else 'inconsistent',
        'product_consistency_pair': (
            None if consistency.consistent
            else {'A1': consistency.witness_pair[0].to_expression(), 'A2': consistency.witness_pair[1].to_expression()}
        ),
        'product_overlap': _product_overlap(state, bipartition),
    }
    if state.modes <= FIT_MAX_MODES:
        fit = separable_fit(state, bipartition, config.dict_size, config.seed)
        details['separable_fit_residual'] = fit.residual
        details['separable_fit_support'] = [
            {'atom': atom.label, 'weight': weight} for weight, atom in fit.support()
        ]
    else:
        details['separable_fit_residual'] = None
    if config.projections:
        first, second = (parse(expr) for expr in config.projections)
        correlation = is_uncorrelated(state, first, second, config.tol)
        details['uncorrelated'] = correlation.uncorrelated
        details['lhs'] = correlation.lhs
        details['rhs'] = correlation.rhs
        details['meet_rank'] = correlation.meet.rank
    if isinstance(state, DensityOperator):
        details['purity'] = state.purity()
    report = build_report('analyze', state.modes, bipartition, witness.verdict.value, witness_to_dict(witness), details)
    return report, []


RUNNERS = {
    'car-check': run_car_check,
    'demo-psi': run_demo_psi,
    'expect': run_expect,
    'analyze': run_analyze,
}


def run(config: RunConfig) -> Tuple[Report, List[str]]:
    return RUNNERS[config.command.value](config)


def save_report(report: Report):
    from .models import AnalysisReport

    return AnalysisReport.objects.create(
        kind=report['analysis'],
        modes=report['modes'],
        bipartition=report['bipartition'] or '',
        verdict=report['verdict'] or '',
        payload=report,
    )
