"""Параметры запуска команд анализа."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from django.conf import settings

from .bipartition import Bipartition, parse_bipartition
from .car_ops import CAR_CHECK_MAX_MODES
from .exceptions import DomainError
from .fock import State, check_dense_modes, make_state_psi, read_state

DEMO_MAX_PARTICLES = 5
FORMATS = ('text', 'json')


class CommandKind(str, enum.Enum):
    CAR_CHECK = 'car-check'
    DEMO_PSI = 'demo-psi'
    EXPECT = 'expect'
    ANALYZE = 'analyze'


def default_degree() -> int:
    return getattr(settings, 'FMA_DEFAULT_DEGREE', 4)


def default_tol() -> float:
    return getattr(settings, 'FMA_DEFAULT_TOL', 1e-10)


@dataclass(frozen=True)
class RunConfig:
    command: CommandKind
    modes: Optional[int] = None
    n: Optional[int] = None
    bipartition: Optional[str] = None
    degree: int = 4
    tol: float = 1e-10
    seed: int = 0
    dict_size: int = 32
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    format: str = 'text'
    expr: Optional[str] = None
    projections: Optional[Tuple[str, str]] = None
    save: bool = False

    @classmethod
    def from_options(cls, command, options: dict) -> 'RunConfig':
        degree = options.get('degree')
        tol = options.get('tol')
        projections = options.get('projections')
        dict_size = options.get('dict_size')
        config = cls(
            command=CommandKind(command),
            modes=options.get('modes'),
            n=options.get('n'),
            bipartition=options.get('bipartition'),
            degree=default_degree() if degree is None else degree,
            tol=default_tol() if tol is None else tol,
            seed=options.get('seed') or 0,
            dict_size=32 if dict_size is None else dict_size,
            input_path=Path(options['input']) if options.get('input') else None,
            output_path=Path(options['output']) if options.get('output') else None,
            format=options.get('format') or 'text',
            expr=options.get('expr'),
            projections=tuple(projections) if projections else None,
            save=bool(options.get('save')),
        )
        config.validate()
        return config

    def validate(self) -> None:
        """Проверка сочетаний флагов до любых вычислений."""
        if self.format not in FORMATS:
            raise DomainError(f'Неизвестный формат {self.format!r}, допустимы: {", ".join(FORMATS)}')
        if self.degree < 1:
            raise DomainError(f'--degree должен быть >= 1, получено {self.degree}')
        if self.tol <= 0:
            raise DomainError(f'--tol должен быть положительным, получено {self.tol}')
        if self.dict_size < 1:
            raise DomainError(f'--dict-size должен быть >= 1, получено {self.dict_size}')
        if self.projections and self.command is not CommandKind.ANALYZE:
            raise DomainError('--projections допустим только для analyze')

        if self.command is CommandKind.CAR_CHECK:
            if self.modes is None or self.modes < 1:
                raise DomainError('car-check требует --modes >= 1')
            check_dense_modes(self.modes)
            if self.modes > CAR_CHECK_MAX_MODES:
                raise DomainError(f'car-check ограничен {CAR_CHECK_MAX_MODES} модами, запрошено {self.modes}')
        elif self.command is CommandKind.DEMO_PSI:
            if self.n is None or not 1 <= self.n <= DEMO_MAX_PARTICLES:
                raise DomainError(f'demo-psi требует 1 <= --n <= {DEMO_MAX_PARTICLES}')
            check_dense_modes(2 * self.n)
        elif self.command is CommandKind.EXPECT:
            if not self.expr:
                raise DomainError('expect требует --expr')
            if (self.n is None) == (self.input_path is None):
                raise DomainError('expect требует ровно один источник состояния: --n или --input')
            if self.n is not None:
                check_dense_modes(2 * self.n)
        elif self.command is CommandKind.ANALYZE:
            if self.input_path is None:
                raise DomainError('analyze требует --input')
            if not self.bipartition:
                raise DomainError('analyze требует --bipartition')

        if self.input_path is not None and not self.input_path.is_file():
            raise DomainError(f'Файл состояния не найден: {self.input_path}')
        if self.n is not None and self.n < 1:
            raise DomainError(f'--n должен быть >= 1, получено {self.n}')

    def load_state(self) -> State:
        if self.input_path is not None:
            return read_state(self.input_path)
        return make_state_psi(self.n)

    def load_bipartition(self, modes: int) -> Bipartition:
        return parse_bipartition(self.bipartition, modes)
