"""
Campos vectoriales y funciones de Lyapunov vectorizables (operan sobre el último eje).
"""

import numpy as np


class AffineField:
    """
    Campo afín f(x) = A x + b.
    """
    vectorizado = True

    def __init__(self, A, b):
        self.A = np.array(A, dtype=float)
        self.b = np.array(b, dtype=float)
        self.A.setflags(write=False)
        self.b.setflags(write=False)

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.A.T + self.b

    def __repr__(self):
        return f'AffineField(A={self.A.tolist()}, b={self.b.tolist()})'


class QuadraticLyapunov:
    """
    V(x) = (x - centro)^T P (x - centro). Con P = None se usa la identidad: V(x) = ||x - centro||^2.
    """
    vectorizado = True

    def __init__(self, center, P=None):
        self.center = np.array(center, dtype=float)
        self.center.setflags(write=False)
        if P is None:
            self.P = None
        else:
            self.P = np.array(P, dtype=float)
            self.P.setflags(write=False)

    @property
    def is_identity(self):
        return self.P is None

    def __call__(self, x):
        d = np.asarray(x, dtype=float) - self.center
        if self.P is None:
            return np.sum(d * d, axis=-1)
        return np.einsum('...i,ij,...j->...', d, self.P, d)

    def gradient(self, x):
        d = np.asarray(x, dtype=float) - self.center
        if self.P is None:
            return 2.0 * d
        return d @ (self.P + self.P.T)

    def __repr__(self):
        peso = 'I' if self.P is None else self.P.tolist()
        return f'QuadraticLyapunov(center={self.center.tolist()}, P={peso})'


def evaluar_lote(funcion, X):
    """
    Evalúa `funcion` sobre el arreglo X (..., n). Las funciones de usuario sin atributo
    `vectorizado` se aplican punto a punto.
    """
    X = np.asarray(X, dtype=float)
    if getattr(funcion, 'vectorizado', False):
        return np.asarray(funcion(X), dtype=float)
    if X.ndim == 1:
        return np.asarray(funcion(X), dtype=float)
    planos = X.reshape(-1, X.shape[-1])
    salidas = np.array([np.asarray(funcion(x), dtype=float) for x in planos])
    return salidas.reshape(X.shape[:-1] + salidas.shape[1:])