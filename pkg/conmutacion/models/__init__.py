"""Tipos de dominio (reexportación compatible con `from conmutacion.models import ...`)."""

from .clase_k import ClassKFn
from .certificados import AffineField, QuadraticLyapunov, evaluar_lote
from .subsistema import Subsystem, SwitchedSystem, make_affine_subsystem
from .senal import DwellViolation, SwitchingSignal, signal_from_dwell, validate_dwell
from .trayectoria import SwitchEvent, Trajectory
from .escenario import Scenario
from .reportes import (
    CertificateReport,
    ConvergenceReport,
    DwellTable,
    MonotonicityVerdict,
    TrappingRecord,
    TrappingReport,
    TriangleAnalysis,
)

__all__ = [
    'ClassKFn',
    'AffineField',
    'QuadraticLyapunov',
    'evaluar_lote',
    'Subsystem',
    'SwitchedSystem',
    'make_affine_subsystem',
    'DwellViolation',
    'SwitchingSignal',
    'signal_from_dwell',
    'validate_dwell',
    'SwitchEvent',
    'Trajectory',
    'CertificateReport',
    'ConvergenceReport',
    'DwellTable',
    'MonotonicityVerdict',
    'TrappingRecord',
    'TrappingReport',
    'TriangleAnalysis',
    'Scenario',
]
