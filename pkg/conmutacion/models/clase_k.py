"""
Funciones de comparación de clase K restringidas a leyes de potencia s -> c*s^p.
"""

from dataclasses import dataclass

import numpy as np

from ..excepciones import ErrorEntrada


@dataclass(frozen=True)
class ClassKFn:
    """
    s -> c * s^p sobre s >= 0, con inversa cerrada. Aloja alpha_u y beta_u.
    """
    coefficient: float
    exponent: float

    def __post_init__(self):
        c = float(self.coefficient)
        p = float(self.exponent)
        if not (np.isfinite(c) and c > 0):
            raise ErrorEntrada(f'El coeficiente de una función clase K debe ser positivo (recibido {c}).')
        if not (np.isfinite(p) and p > 0):
            raise ErrorEntrada(f'El exponente de una función clase K debe ser positivo (recibido {p}).')
        object.__setattr__(self, 'coefficient', c)
        object.__setattr__(self, 'exponent', p)

    @classmethod
    def square(cls):
        return cls(1.0, 2.0)

    def eval(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0):
            raise ErrorEntrada('Las funciones clase K solo se evalúan en s >= 0.')
        valor = self.coefficient * np.power(s, self.exponent)
        return float(valor) if valor.ndim == 0 else valor

    def inverse(self, v):
        v = np.asarray(v, dtype=float)
        if np.any(v < 0):
            raise ErrorEntrada('La inversa de una función clase K solo se evalúa en valores >= 0.')
        valor = np.power(v / self.coefficient, 1.0 / self.exponent)
        return float(valor) if valor.ndim == 0 else valor

    def dominated_by(self, otra, muestras=None):
        """
        True si self.eval(s) <= otra.eval(s) en los s muestreados (consistencia del sándwich).
        """
        if muestras is None:
            muestras = np.concatenate(([0.0], np.logspace(-6, 6, 121)))
        propia = self.eval(muestras)
        ajena = otra.eval(muestras)
        return bool(np.all(propia <= ajena * (1 + 1e-12)))

    def as_list(self):
        return [self.coefficient, self.exponent]
