"""
Escenario validado: sistema, señal, condiciones iniciales, análisis pedidos y parámetros numéricos.
"""

from dataclasses import dataclass

from ..constants import ANALISIS_DISPONIBLES


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    system: object
    eps: float
    signal: object = None
    initial_points: tuple = ()
    analyses: tuple = ()
    transitions: tuple = ()
    i_max: int = 20
    horizon: float = None
    triangle_modes: tuple = None
    tube_times: tuple = ()
    certify_box: tuple = None
    step: float = 1e-3
    seed: int = 42
    samples: int = 10000
    tol_membership: float = 1e-9
    boundary_of: object = None
    boundary_count: int = None

    def requests(self, analisis):
        return analisis in self.analyses

    @property
    def ordered_analyses(self):
        return [nombre for nombre in ANALISIS_DISPONIBLES if nombre in self.analyses]
