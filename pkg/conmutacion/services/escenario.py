"""
Ejecución de un escenario completo: certificados, tabla de permanencias, simulaciones y
verificaciones, con un manifiesto de los archivos escritos.
"""

import logging
from contextlib import contextmanager
from itertools import permutations
from pathlib import Path

import numpy as np

from ..constants import SALIDA_OK, SALIDA_VERIFICACION_FALLIDA, parametro
from ..excepciones import EmptyConfiguration, ErrorConmutacion, NoThreshold
from ..models import validate_dwell
from .dwell import (
    combined_dwell,
    dwell_requirement,
    local_dwell,
    pairwise_dwell,
    signal_transitions,
    triangle_gap,
)
from .exportaciones import tube_filename, write_json, write_manifest, write_trajectory_csv, write_tube_csv
from .lyapunov import check_certificate, v_eval
from .sim import convergence_product, simulate_switched, tube_sample, verify_trapping

logger = logging.getLogger(__name__)

MARGEN_CAJA = 3.0


@contextmanager
def _contexto(s, analisis):
    try:
        yield
    except ErrorConmutacion as error:
        if error.args:
            error.args = (f'[{s.name}: {analisis}] {error.args[0]}',) + error.args[1:]
        raise


def caja_por_defecto(system):
    """
    Caja que contiene los equilibrios con un margen de 3 unidades por eje.
    """
    equilibrios = np.array([sub.equilibrium for sub in system])
    inferior = equilibrios.min(axis=0) - MARGEN_CAJA
    superior = equilibrios.max(axis=0) + MARGEN_CAJA
    return [(float(a), float(b)) for a, b in zip(inferior, superior)]


def transiciones_escenario(s):
    if s.transitions:
        return list(s.transitions)
    if s.signal is not None and len(s.signal.labels) > 1:
        return [par for par in signal_transitions(s.signal) if par[0] != par[1]]
    return list(permutations(s.system.labels, 2))


def horizonte_simulacion(s):
    horizonte = s.horizon
    if s.requests('convergence'):
        instantes = s.signal.instants(cantidad=s.i_max)
        if instantes:
            horizonte = max(horizonte, instantes[-1][0])
    return horizonte


class _Ejecucion:
    """
    Estado acumulado de una corrida: archivos escritos, análisis fallidos y notas.
    """

    def __init__(self, s, out_dir):
        self.s = s
        self.out_dir = Path(out_dir)
        self.archivos = []
        self.fallidos = []
        self.notas = []

    def json(self, nombre, datos):
        self.archivos.append(write_json(datos, self.out_dir / nombre))

    def certify(self):
        s = self.s
        caja = list(s.certify_box) if s.certify_box is not None else caja_por_defecto(s.system)
        reportes = [check_certificate(sub, caja, s.samples, s.seed) for sub in s.system]
        aprobado = all(r.passed for r in reportes)
        self.json('certify.json', {
            'kind': 'certify',
            'box': caja,
            'passed': aprobado,
            'reports': [r.as_dict() for r in reportes],
        })
        if not aprobado:
            self.fallidos.append('certify')

    def dwell_table(self):
        s = self.s
        transiciones = transiciones_escenario(s)
        tabla = local_dwell(s.eps, s.system, transiciones)
        datos = tabla.as_dict()
        if len(s.system) > 1:
            combinado = combined_dwell(s.eps, s.system, transiciones)
            datos.update({k: combinado[k] for k in ('mu', 'mu_sampled', 't_glob', 'dwell')})
        if s.signal is not None:
            violaciones = validate_dwell(s.signal, dwell_requirement(s.system, s.eps))
            datos['signal_violations'] = [v.as_dict() for v in violaciones]
            if violaciones:
                self.notas.append(f'La señal viola la permanencia exigida en {len(violaciones)} conmutación(es).')
                logger.warning('La señal del escenario %s no respeta T^eps en %d conmutaciones', s.name, len(violaciones))
        self.json('dwell_table.json', datos)

    def simulate(self):
        s = self.s
        horizonte = horizonte_simulacion(s)
        self.trayectorias = []
        for i, x0 in enumerate(s.initial_points):
            traj = simulate_switched(s.system, s.signal, x0, horizonte, s.step)
            self.archivos.append(
                write_trajectory_csv(traj, s.system, self.out_dir / 'trajectories' / f'trajectory_{i:03d}.csv')
            )
            self.trayectorias.append(traj)

    def trapping(self):
        s = self.s
        corridas = []
        aprobado = True
        for i, traj in enumerate(self.trayectorias):
            reporte = verify_trapping(traj, s.system, s.signal, s.eps, s.tol_membership)
            hipotesis = reporte.initial_record.member
            if hipotesis and not reporte.overall_pass:
                aprobado = False
            corridas.append({'run': i, 'hypothesis_met': hipotesis, **reporte.as_dict()})
        self.json('trapping.json', {'kind': 'trapping_runs', 'eps': s.eps, 'overall_pass': aprobado, 'runs': corridas})
        if not aprobado:
            self.fallidos.append('trapping')

    def convergence(self):
        s = self.s
        corridas = []
        aprobado = True
        for i, traj in enumerate(self.trayectorias):
            reporte = convergence_product(s.system, s.signal, traj, s.eps, s.i_max)
            aprobado = aprobado and reporte.w_nonincreasing
            corridas.append({'run': i, **reporte.as_dict()})
        self.json('convergence.json', {'kind': 'convergence_runs', 'eps': s.eps, 'runs': corridas})
        if not aprobado:
            self.fallidos.append('convergence')

    def triangle(self):
        s = self.s
        u0, v, u1 = (s.system[m] for m in s.triangle_modes)
        d = max(float(np.linalg.norm(u0.equilibrium)), float(np.linalg.norm(u1.equilibrium)))
        r = min(
            float(np.linalg.norm(u0.equilibrium - v.equilibrium)),
            float(np.linalg.norm(v.equilibrium - u1.equilibrium)),
        )
        try:
            analisis = triangle_gap(s.eps, u0, v, u1, d, r)
        except (EmptyConfiguration, NoThreshold) as error:
            self.notas.append(f'eps_0 no disponible: {error}')
            analisis = triangle_gap(s.eps, u0, v, u1)
        self.json('triangle.json', analisis.as_dict())

    def tube(self):
        s = self.s
        cantidad = s.boundary_count or parametro('PUNTOS_FRONTERA')
        resultados = []
        aprobado = True
        for origen, destino in transiciones_escenario(s):
            T = pairwise_dwell(s.eps, s.system[origen], s.system[destino])
            grilla = sorted(set(s.tube_times) | {T})
            muestras = tube_sample(s.system, origen, destino, s.eps, grilla, cantidad, s.step)
            imagen = dict(muestras)[T]
            maximo = float(np.max(v_eval(s.system[destino], imagen)))
            dentro = maximo <= s.eps + s.tol_membership
            aprobado = aprobado and dentro
            resultados.append({
                'from': origen, 'to': destino, 'T': T, 'max_V_at_T': maximo, 'inside_at_T': dentro,
            })
            ruta = self.out_dir / 'tubes' / tube_filename(origen, destino)
            self.archivos.append(write_tube_csv(muestras, s.system.dimension, ruta))
        self.json('tube.json', {'kind': 'tube', 'eps': s.eps, 'passed': aprobado, 'pairs': resultados})
        if not aprobado:
            self.fallidos.append('tube')


def run_scenario(s, out_dir):
    """
    Ejecuta los análisis pedidos en orden (certify, dwell, simulación, verificaciones).
    Devuelve (código de salida, manifiesto); el código es distinto de 0 si alguna verificación falla.
    """
    ejecucion = _Ejecucion(s, out_dir)
    ejecucion.out_dir.mkdir(parents=True, exist_ok=True)

    if s.requests('certify'):
        with _contexto(s, 'certify'):
            ejecucion.certify()
    if s.requests('dwell_table'):
        with _contexto(s, 'dwell_table'):
            ejecucion.dwell_table()
    if s.requests('trapping') or s.requests('convergence'):
        with _contexto(s, 'simulate'):
            ejecucion.simulate()
    for analisis in ('trapping', 'convergence', 'triangle', 'tube'):
        if s.requests(analisis):
            with _contexto(s, analisis):
                getattr(ejecucion, analisis)()

    codigo = SALIDA_VERIFICACION_FALLIDA if ejecucion.fallidos else SALIDA_OK
    manifiesto = write_manifest(ejecucion.out_dir, ejecucion.archivos, {
        'scenario': s.name,
        'analyses': s.ordered_analyses,
        'status': 'fail' if ejecucion.fallidos else 'pass',
        'failed': ejecucion.fallidos,
        'notes': ejecucion.notas,
    })
    logger.info('Escenario %s: %s (%d archivos)', s.name, manifiesto['status'], len(manifiesto['files']))
    return codigo, manifiesto
