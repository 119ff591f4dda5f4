"""
Subsistemas con certificado de Lyapunov y el sistema conmutado que los agrupa.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg

from ..constants import TOL_EQUILIBRIO
from ..excepciones import (
    DimensionMismatch,
    ErrorEntrada,
    NotContracting,
    SingularMatrix,
    UnknownLabel,
)
from .certificados import AffineField, QuadraticLyapunov, evaluar_lote
from .clase_k import ClassKFn

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Subsystem:
    """
    Un modo u: campo f_u, equilibrio x_u y certificado (V_u, alpha_u, beta_u, k_u).
    """
    label: object
    field: object
    equilibrium: np.ndarray
    decay_rate: float
    alpha: ClassKFn
    beta: ClassKFn
    lyapunov: object

    def __post_init__(self):
        equilibrio = np.array(self.equilibrium, dtype=float).reshape(-1)
        equilibrio.setflags(write=False)
        object.__setattr__(self, 'equilibrium', equilibrio)
        k = float(self.decay_rate)
        if not (np.isfinite(k) and k > 0):
            raise ErrorEntrada(f'La tasa de decaimiento del modo {self.label!r} debe ser positiva (recibido {k}).')
        object.__setattr__(self, 'decay_rate', k)

        residuo = np.linalg.norm(evaluar_lote(self.field, equilibrio))
        if residuo > TOL_EQUILIBRIO:
            raise ErrorEntrada(
                f'El equilibrio del modo {self.label!r} no anula el campo (||f(x_u)|| = {residuo:.3e}).'
            )
        if not self.alpha.dominated_by(self.beta):
            raise ErrorEntrada(f'alpha > beta para el modo {self.label!r}: el sándwich es inconsistente.')
        valor = float(evaluar_lote(self.lyapunov, equilibrio))
        if abs(valor) > TOL_EQUILIBRIO:
            raise ErrorEntrada(f'V_u(x_u) = {valor} != 0 para el modo {self.label!r}.')

    @property
    def dimension(self):
        return self.equilibrium.shape[0]

    @property
    def is_affine(self):
        return isinstance(self.field, AffineField)

    @property
    def has_identity_quadratic(self):
        return isinstance(self.lyapunov, QuadraticLyapunov) and self.lyapunov.is_identity

    def with_decay_rate(self, k):
        """
        Copia con k_u reemplazado (p. ej. para inyectar un certificado falso en pruebas).
        """
        return replace(self, decay_rate=k)

    def check_dimension(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dimension:
            raise DimensionMismatch(
                f'El modo {self.label!r} trabaja en dimensión {self.dimension}, se recibió {x.shape[-1]}.'
            )
        return x


@dataclass(frozen=True)
class SwitchedSystem:
    """
    Familia de subsistemas indexada por rótulo, todos de la misma dimensión.
    """
    dimension: int
    subsystems: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise ErrorEntrada('La dimensión del sistema debe ser positiva.')
        for rotulo, sub in self.subsystems.items():
            if rotulo != sub.label:
                raise ErrorEntrada(f'Rótulo {rotulo!r} no coincide con el del subsistema ({sub.label!r}).')
            if sub.dimension != self.dimension:
                raise DimensionMismatch(
                    f'El modo {rotulo!r} tiene dimensión {sub.dimension}, el sistema {self.dimension}.'
                )

    @classmethod
    def from_subsystems(cls, subsistemas):
        subsistemas = list(subsistemas)
        if not subsistemas:
            raise ErrorEntrada('Un sistema conmutado necesita al menos un subsistema.')
        tabla = {}
        for sub in subsistemas:
            if sub.label in tabla:
                raise ErrorEntrada(f'Rótulo repetido: {sub.label!r}.')
            tabla[sub.label] = sub
        return cls(subsistemas[0].dimension, tabla)

    @property
    def labels(self):
        return list(self.subsystems)

    def __getitem__(self, rotulo):
        try:
            return self.subsystems[rotulo]
        except KeyError:
            raise UnknownLabel(f'Modo desconocido: {rotulo!r}.') from None

    def __contains__(self, rotulo):
        return rotulo in self.subsystems

    def __iter__(self):
        return iter(self.subsystems.values())

    def __len__(self):
        return len(self.subsystems)


def _tasa_identidad(A):
    return -float(np.max(np.linalg.eigvalsh(A + A.T)))


def _tasa_ponderada(A, P):
    # mayor valor propio generalizado de (A^T P + P A, P)
    Q = A.T @ P + P @ A
    return -float(np.max(linalg.eigh(Q, P, eigvals_only=True)))


def make_affine_subsystem(A, b, label, P=None, alpha=None, beta=None, decay_rate=None):
    """
    Construye x' = A x + b con V_u(x) = ||x - x_u||^2 (o la cuadrática ponderada por P).

    Con P explícita, alpha y beta deben entregarse (escalas de los valores propios extremos de P).
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ErrorEntrada(f'A debe ser cuadrada (forma recibida {A.shape}).')
    if A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f'A es {A.shape[0]}x{A.shape[1]} pero b tiene {b.shape[0]} componentes.')
    if np.linalg.matrix_rank(A) < A.shape[0]:
        raise SingularMatrix(f'La matriz A del modo {label!r} no es invertible.')

    equilibrio = np.linalg.solve(A, -b)

    if P is None:
        tasa = _tasa_identidad(A)
        lyapunov = QuadraticLyapunov(equilibrio)
        alpha = alpha or ClassKFn.square()
        beta = beta or ClassKFn.square()
    else:
        P = np.array(P, dtype=float)
        if P.shape != A.shape or not np.allclose(P, P.T):
            raise ErrorEntrada(f'P del modo {label!r} debe ser simétrica y del tamaño de A.')
        if np.min(np.linalg.eigvalsh(P)) <= 0:
            raise ErrorEntrada(f'P del modo {label!r} debe ser definida positiva.')
        if alpha is None or beta is None:
            raise ErrorEntrada(f'Con P explícita, alpha y beta del modo {label!r} son obligatorias.')
        tasa = _tasa_ponderada(A, P)
        lyapunov = QuadraticLyapunov(equilibrio, P)

    if tasa <= 0:
        raise NotContracting(
            f'La parte simétrica de A del modo {label!r} no es definida negativa (tasa {tasa:.6g}).'
        )
    if decay_rate is not None:
        logger.debug('Modo %r: tasa %.6g reemplazada por %.6g', label, tasa, decay_rate)
        tasa = decay_rate

    return Subsystem(
        label=label,
        field=AffineField(A, b),
        equilibrium=equilibrio,
        decay_rate=tasa,
        alpha=alpha,
        beta=beta,
        lyapunov=lyapunov,
    )
