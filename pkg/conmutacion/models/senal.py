"""
Señales de conmutación constantes por tramos, con extensión periódica opcional.

Convención: el rótulo u_i del instante t_i es u(t_i + 0) (continuidad por la derecha).
El campo que transporta el estado sobre [t_{i-1}, t_i) es el del modo u_i (modo actuante),
que es la lectura bajo la cual x(t_{i-1}) en N_{u_{i-1}} implica x(t_i) en N_{u_i}.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..excepciones import EmptyTransitions, ErrorEntrada, NonpositiveDwell


@dataclass(frozen=True)
class DwellViolation:
    index: int
    switch_time: float
    from_mode: object
    to_mode: object
    gap: float
    required: float

    def as_dict(self):
        return {
            'index': self.index,
            'switch_time': self.switch_time,
            'from_mode': self.from_mode,
            'to_mode': self.to_mode,
            'gap': self.gap,
            'required': self.required,
        }


@dataclass(frozen=True)
class SwitchingSignal:
    t0: float
    segments: tuple
    initial_mode: object
    period: float = None

    def __post_init__(self):
        t0 = float(self.t0)
        segmentos = tuple((float(t), modo) for t, modo in self.segments)
        object.__setattr__(self, 't0', t0)
        object.__setattr__(self, 'segments', segmentos)
        anterior = t0
        for i, (t, _) in enumerate(segmentos, start=1):
            if not math.isfinite(t) or t <= anterior:
                raise ErrorEntrada(
                    f'Los instantes de conmutación deben ser finitos y estrictamente crecientes '
                    f'(t_{i} = {t} <= {anterior}).'
                )
            anterior = t
        if self.period is not None:
            periodo = float(self.period)
            if not (math.isfinite(periodo) and periodo > 0):
                raise ErrorEntrada(f'El período debe ser positivo (recibido {periodo}).')
            if segmentos and segmentos[-1][0] >= t0 + periodo:
                raise ErrorEntrada('Los instantes de una señal periódica deben caer dentro del primer período.')
            object.__setattr__(self, 'period', periodo)

    @property
    def is_periodic(self):
        return self.period is not None

    @property
    def switch_times(self):
        return [t for t, _ in self.segments]

    @property
    def modes(self):
        return [self.initial_mode] + [modo for _, modo in self.segments]

    @property
    def labels(self):
        return set(self.modes)

    def iter_instants(self):
        """
        Instantes (t_i, u_i), i = 1, 2, ... desenrollando la periodicidad. Infinito si es periódica.
        """
        yield from self.segments
        if not self.is_periodic:
            return
        for k in itertools.count(1):
            desplazamiento = k * self.period
            yield self.t0 + desplazamiento, self.initial_mode
            for t, modo in self.segments:
                yield t + desplazamiento, modo

    def instants(self, hasta=None, cantidad=None):
        """
        Lista de instantes con t_i <= hasta y/o los primeros `cantidad` instantes.
        """
        if hasta is None and cantidad is None and self.is_periodic:
            raise ErrorEntrada('Una señal periódica necesita un horizonte o una cantidad para desenrollarse.')
        salida = []
        for t, modo in self.iter_instants():
            if hasta is not None and t > hasta:
                break
            if cantidad is not None and len(salida) >= cantidad:
                break
            salida.append((t, modo))
        return salida

    def _instantes_ciclo(self, k):
        # mismos flotantes que iter_instants para el ciclo k
        if k == 0:
            return list(self.segments)
        desplazamiento = k * self.period
        return [(self.t0 + desplazamiento, self.initial_mode)] + [
            (t + desplazamiento, modo) for t, modo in self.segments
        ]

    def mode_at(self, t):
        """
        u(t), continua por la derecha: mode_at(t_i) = u_i.
        """
        t = float(t)
        if not self.is_periodic or t < self.t0:
            indice = int(np.searchsorted(self.switch_times, t, side='right'))
            return self.modes[indice]
        # el ciclo estimado puede errar en uno por redondeo: se buscan sus vecinos
        k = math.floor((t - self.t0) / self.period)
        desde = max(0, k - 1)
        instantes = [par for c in range(desde, k + 2) for par in self._instantes_ciclo(c)]
        indice = int(np.searchsorted([ti for ti, _ in instantes], t, side='right'))
        if indice > 0:
            return instantes[indice - 1][1]
        return self.initial_mode if desde == 0 else self.modes[-1]

    def acting_modes(self, cantidad):
        """
        Modos actuantes de los intervalos 0, ..., cantidad - 1 ([t_j, t_{j+1}), con t_0 = t0).
        """
        instantes = self.instants(cantidad=cantidad)
        if not instantes:
            return [self.initial_mode] * cantidad
        modos = [modo for _, modo in instantes]
        return modos + [modos[-1]] * (cantidad - len(modos))

    def acting_mode(self, indice):
        """
        Modo cuyo campo actúa sobre el intervalo `indice` ([t_indice, t_indice+1), con t_0 = t0).
        """
        return self.acting_modes(indice + 1)[indice]

    def acting_mode_at(self, t):
        t = float(t)
        for t_i, modo in self.iter_instants():
            if t < t_i:
                return modo
            ultimo = modo
        if self.segments:
            return ultimo
        return self.initial_mode

    def as_dict(self):
        return {
            't0': self.t0,
            'initial_mode': self.initial_mode,
            'segments': [[t, modo] for t, modo in self.segments],
            'period': self.period,
        }


def _normalizar_permanencias(dwell, cantidad):
    if isinstance(dwell, (list, tuple)):
        permanencias = [float(d) for d in dwell]
        if len(permanencias) != cantidad:
            raise ErrorEntrada(f'Se esperaban {cantidad} tiempos de permanencia, se recibieron {len(permanencias)}.')
    else:
        permanencias = [float(dwell)] * cantidad
    for d in permanencias:
        if not (math.isfinite(d) and d > 0):
            raise NonpositiveDwell(f'Los tiempos de permanencia deben ser positivos (recibido {d}).')
    return permanencias


def signal_from_dwell(initial_mode, transitions, dwell=None, t0=0.0, periodic=False):
    """
    Señal que parte en `initial_mode` y recorre `transitions` con las permanencias dadas.

    Sin transiciones y no periódica: señal constante. Periódica: el último tramo cierra el período,
    por lo que una lista de permanencias tiene len(transitions) + 1 elementos.
    """
    transiciones = list(transitions)
    if not transiciones:
        if periodic:
            raise EmptyTransitions('Una señal periódica necesita al menos una transición.')
        return SwitchingSignal(t0, (), initial_mode)

    cantidad = len(transiciones) + (1 if periodic else 0)
    permanencias = _normalizar_permanencias(dwell, cantidad)

    segmentos = []
    t = float(t0)
    for modo, d in zip(transiciones, permanencias):
        t += d
        segmentos.append((t, modo))
    periodo = sum(permanencias) if periodic else None
    return SwitchingSignal(t0, tuple(segmentos), initial_mode, periodo)


def validate_dwell(signal, required):
    """
    Pares consecutivos con t_i - t_{i-1} < required(u_{i-1}, u_i). Lista vacía: señal compatible.

    En señales periódicas se revisa un período completo, incluido el cierre hacia el modo inicial.
    """
    instantes = list(signal.segments)
    if signal.is_periodic:
        instantes.append((signal.t0 + signal.period, signal.initial_mode))

    violaciones = []
    t_previo, modo_previo = signal.t0, signal.initial_mode
    for indice, (t_i, modo) in enumerate(instantes, start=1):
        brecha = t_i - t_previo
        exigido = float(required(modo_previo, modo))
        if brecha < exigido:
            violaciones.append(DwellViolation(indice, t_i, modo_previo, modo, brecha, exigido))
        t_previo, modo_previo = t_i, modo
    return violaciones
