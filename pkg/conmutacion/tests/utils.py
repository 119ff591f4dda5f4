"""
Sistemas y señales de referencia compartidos por las pruebas.
"""

import math
from pathlib import Path

import numpy as np

from conmutacion.models import SwitchedSystem, make_affine_subsystem, signal_from_dwell

ESCENARIOS = Path(__file__).resolve().parent.parent / 'escenarios'

A_EJEMPLO = [[-1.0, -1.0], [1.0, -1.0]]
EPS = 0.05

# T_{u1,u2} = ln(1 + sqrt(10)), T_{u1,u3} = ln(1 + sqrt(40)) con eps = 0.05 y k = 2
T_ADYACENTE = math.log(1.0 + math.sqrt(10.0))
T_EXTREMOS = math.log(1.0 + math.sqrt(40.0))
MU_EJEMPLO = (1.0 + math.sqrt(40.0)) ** 2


def sistema_ejemplo(**kwargs):
    """
    x' = A x + (u, 1) con u = 1, 0, -1 (modos u1, u2, u3).
    """
    return SwitchedSystem.from_subsystems(
        make_affine_subsystem(A_EJEMPLO, [u, 1.0], f'u{i}', **kwargs)
        for i, u in enumerate((1.0, 0.0, -1.0), start=1)
    )


def senal_ci(T=1.43):
    return signal_from_dwell('u1', ['u2', 'u3'], T)


def senal_periodica(T=1.43):
    return signal_from_dwell('u1', ['u2', 'u3', 'u2'], T, periodic=True)


def punto_nitidez():
    """
    x_{u1} + (sqrt(eps) + 0.05) w, con w unitario de x_{u2} hacia x_{u1}.
    """
    x_u1 = np.array([0.0, 1.0])
    x_u2 = np.array([-0.5, 0.5])
    w = (x_u1 - x_u2) / np.linalg.norm(x_u1 - x_u2)
    return x_u1 + (math.sqrt(EPS) + 0.05) * w


def leer_escenario(nombre):
    return (ESCENARIOS / nombre).read_text(encoding='utf-8')
