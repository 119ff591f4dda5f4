"""
Trayectorias muestreadas X_u(t, x) y la solución compuesta x(t) del sistema conmutado.
"""

from dataclasses import dataclass, field

import numpy as np

from ..excepciones import ErrorEntrada


@dataclass(frozen=True, eq=False)
class SwitchEvent:
    index: int
    time: float
    prev_mode: object
    next_mode: object
    state: np.ndarray

    def as_dict(self):
        return {
            'index': self.index,
            'time': self.time,
            'prev_mode': self.prev_mode,
            'next_mode': self.next_mode,
            'state': self.state.tolist(),
        }


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Muestras (t, x, modo) con t estrictamente creciente. Los instantes de conmutación son muestras.

    `modes` guarda el rótulo u(t) (en t_i vale u_i); `acting` el modo cuyo campo generó el tramo.
    """
    times: np.ndarray
    states: np.ndarray
    modes: tuple
    step: float
    acting: tuple = None
    switch_events: tuple = field(default=())

    def __post_init__(self):
        tiempos = np.asarray(self.times, dtype=float)
        estados = np.asarray(self.states, dtype=float)
        if estados.ndim == 1:
            estados = estados.reshape(-1, 1)
        if tiempos.ndim != 1 or tiempos.shape[0] != estados.shape[0]:
            raise ErrorEntrada('Tiempos y estados de la trayectoria no tienen el mismo largo.')
        if tiempos.shape[0] > 1 and np.any(np.diff(tiempos) <= 0):
            raise ErrorEntrada('Los tiempos de la trayectoria deben ser estrictamente crecientes.')
        if len(self.modes) != tiempos.shape[0]:
            raise ErrorEntrada('Cada muestra de la trayectoria debe tener un modo.')
        tiempos.setflags(write=False)
        estados.setflags(write=False)
        object.__setattr__(self, 'times', tiempos)
        object.__setattr__(self, 'states', estados)
        object.__setattr__(self, 'modes', tuple(self.modes))
        object.__setattr__(self, 'acting', tuple(self.acting) if self.acting is not None else tuple(self.modes))
        object.__setattr__(self, 'switch_events', tuple(self.switch_events))

    def __len__(self):
        return self.times.shape[0]

    @property
    def dimension(self):
        return self.states.shape[1]

    @property
    def samples(self):
        return [(float(t), x, modo) for t, x, modo in zip(self.times, self.states, self.modes)]

    @property
    def initial_state(self):
        return self.states[0]

    @property
    def final_state(self):
        return self.states[-1]

    @property
    def switch_times(self):
        return [evento.time for evento in self.switch_events]

    def index_of(self, t):
        """
        Índice de la muestra con tiempo exactamente t.
        """
        indice = int(np.searchsorted(self.times, t))
        if indice >= len(self) or self.times[indice] != t:
            raise ErrorEntrada(f'La trayectoria no tiene una muestra en t = {t!r}.')
        return indice

    def state_at(self, t):
        return self.states[self.index_of(t)]
