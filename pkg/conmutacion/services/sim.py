"""
Simulación de trayectorias conmutadas con RK4 de paso fijo y las verificaciones que se
hacen sobre ellas: atrapamiento en los instantes de conmutación, monotonía de
W(t) = e^{k t} V(x(t)), productos de convergencia y tubos muestreados.
"""

import logging
import math

import numpy as np
from scipy import linalg

from ..constants import FACTOR_CERTIFICACION, TOL_W_ABSOLUTA, TOL_W_RELATIVA, parametro
from ..excepciones import (
    ErrorEntrada,
    InsufficientSwitches,
    NonfiniteState,
    SignalMismatch,
    UnknownLabel,
    UnsupportedCertificate,
)
from ..models import (
    ConvergenceReport,
    MonotonicityVerdict,
    SwitchEvent,
    Trajectory,
    TrappingRecord,
    TrappingReport,
    evaluar_lote,
    signal_from_dwell,
)
from .dwell import estimate_mu_pair, pairwise_dwell
from .lyapunov import _validar_eps, region_boundary_points, region_membership

logger = logging.getLogger(__name__)

# dos instantes a menos de esta fracción del paso se consideran el mismo
FRACCION_ATERRIZAJE = 1e-9
TOL_INSTANTE = 1e-12


def _paso(step):
    if step is None:
        step = parametro('PASO')
    step = float(step)
    if not (math.isfinite(step) and step > 0):
        raise ErrorEntrada(f'El paso de integración debe ser positivo (recibido {step}).')
    return step


def _rejilla(t_inicio, t_fin, paso):
    """
    t_inicio + j*paso; el último paso se acorta para caer exactamente en t_fin.
    """
    n_pasos = int(math.floor((t_fin - t_inicio) / paso))
    tiempos = t_inicio + paso * np.arange(n_pasos + 1, dtype=float)
    if t_fin - tiempos[-1] > FRACCION_ATERRIZAJE * paso:
        tiempos = np.append(tiempos, t_fin)
    else:
        tiempos[-1] = t_fin
    return tiempos


def _rk4(campo, x, h):
    k1 = campo(x)
    k2 = campo(x + 0.5 * h * k1)
    k3 = campo(x + 0.5 * h * k2)
    k4 = campo(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _tramo(sub, x0, t_inicio, t_fin, paso):
    """
    Integra el modo `sub` desde x0 (forma (n,) o (m, n)) sobre [t_inicio, t_fin].
    Devuelve (tiempos, estados) incluyendo ambos extremos.
    """
    def campo(X):
        return evaluar_lote(sub.field, X)

    tiempos = _rejilla(t_inicio, t_fin, paso)
    estados = np.empty((tiempos.shape[0],) + np.shape(x0), dtype=float)
    estados[0] = x0
    for j in range(1, tiempos.shape[0]):
        estados[j] = _rk4(campo, estados[j - 1], tiempos[j] - tiempos[j - 1])
        if not np.all(np.isfinite(estados[j])):
            raise NonfiniteState(
                f'El estado dejó de ser finito en t = {tiempos[j]:.6g} bajo el modo {sub.label!r}.'
            )
    return tiempos, estados


def _estado_inicial(x0, dimension):
    x0 = np.array(x0, dtype=float)
    if x0.shape[-1] != dimension:
        raise ErrorEntrada(f'El estado inicial tiene {x0.shape[-1]} componentes, se esperaban {dimension}.')
    if not np.all(np.isfinite(x0)):
        raise ErrorEntrada('El estado inicial debe ser finito.')
    return x0


def integrate(sub, x0, t0, t1, step=None):
    """
    Trayectoria X_u(t, x0) sobre [t0, t1] con RK4 de paso fijo.
    """
    paso = _paso(step)
    t0, t1 = float(t0), float(t1)
    if t1 < t0:
        raise ErrorEntrada(f'Se requiere t1 >= t0 (t0 = {t0}, t1 = {t1}).')
    x0 = _estado_inicial(sub.check_dimension(x0), sub.dimension)
    tiempos, estados = _tramo(sub, x0, t0, t1, paso)
    modos = (sub.label,) * tiempos.shape[0]
    return Trajectory(tiempos, estados, modos, paso)


def integrate_batch(sub, X0, t0, t1, step=None):
    """
    Integra varios estados iniciales a la vez. Devuelve (tiempos, estados (muestras, m, n)).
    """
    paso = _paso(step)
    X0 = np.atleast_2d(_estado_inicial(sub.check_dimension(X0), sub.dimension))
    if t1 < t0:
        raise ErrorEntrada(f'Se requiere t1 >= t0 (t0 = {t0}, t1 = {t1}).')
    return _tramo(sub, X0, float(t0), float(t1), paso)


def closed_form_affine(sub, x0, times, t0=0.0):
    """
    x(t) = x_u + e^{A (t - t0)} (x0 - x_u) para un modo afín.
    """
    if not sub.is_affine:
        raise UnsupportedCertificate(f'El modo {sub.label!r} no es afín: no hay solución cerrada.')
    desvio = sub.check_dimension(x0) - sub.equilibrium
    A = sub.field.A
    # x0 puede ser un punto (n,) o un lote (m, n)
    return np.array([
        sub.equilibrium + desvio @ linalg.expm(A * (float(t) - t0)).T for t in np.atleast_1d(times)
    ])


def _validar_rotulos(system, signal):
    for rotulo in signal.labels:
        if rotulo not in system:
            raise UnknownLabel(f'La señal usa el modo {rotulo!r}, que no pertenece al sistema.')


def simulate_switched(system, signal, x0, horizon, step=None):
    """
    Solución x(t) del sistema conmutado sobre [t0, horizon].

    Cada intervalo [t_{i-1}, t_i) se integra con el modo actuante (el rótulo de t_i) y los
    estados se encadenan en los instantes de conmutación, que quedan como muestras.
    """
    paso = _paso(step)
    horizonte = float(horizon)
    if not horizonte > signal.t0:
        raise ErrorEntrada(f'El horizonte ({horizonte}) debe ser mayor que t0 ({signal.t0}).')
    _validar_rotulos(system, signal)
    x = _estado_inicial(x0, system.dimension)

    instantes = signal.instants(hasta=horizonte)
    bordes = [signal.t0] + [t for t, _ in instantes]
    if horizonte > bordes[-1]:
        bordes.append(horizonte)
    rotulos = [signal.initial_mode] + [modo for _, modo in instantes]
    actuantes_por_tramo = signal.acting_modes(len(bordes))

    bloques_t, bloques_x, modos, actuantes, eventos = [], [], [], [], []
    for j in range(len(bordes) - 1):
        actuante = actuantes_por_tramo[j]
        tiempos, estados = _tramo(system[actuante], x, bordes[j], bordes[j + 1], paso)
        # la muestra final del tramo es la primera del siguiente
        bloques_t.append(tiempos[:-1])
        bloques_x.append(estados[:-1])
        modos.extend([rotulos[j]] * (tiempos.shape[0] - 1))
        actuantes.extend([actuante] * (tiempos.shape[0] - 1))
        x = estados[-1]
        if j + 1 <= len(instantes):
            t_i, modo = instantes[j]
            eventos.append(SwitchEvent(j + 1, t_i, rotulos[j], modo, x.copy()))

    ultimo = len(bordes) - 1
    bloques_t.append(np.array([bordes[-1]]))
    bloques_x.append(x.reshape(1, -1))
    modos.append(rotulos[min(ultimo, len(rotulos) - 1)])
    actuantes.append(actuantes_por_tramo[ultimo])

    logger.debug(
        'Simulación sobre [%.6g, %.6g] con paso %.3g: %d conmutaciones', signal.t0, horizonte, paso, len(eventos)
    )
    return Trajectory(
        np.concatenate(bloques_t),
        np.concatenate(bloques_x),
        modos,
        paso,
        acting=actuantes,
        switch_events=eventos,
    )


def _revisar_eventos(traj, signal):
    esperados = signal.instants(hasta=float(traj.times[-1]))
    if len(esperados) != len(traj.switch_events):
        raise SignalMismatch(
            f'La trayectoria tiene {len(traj.switch_events)} conmutaciones y la señal {len(esperados)}.'
        )
    for evento, (t_i, modo) in zip(traj.switch_events, esperados):
        if not math.isclose(evento.time, t_i, rel_tol=0.0, abs_tol=TOL_INSTANTE * (1.0 + abs(t_i))):
            raise SignalMismatch(f'Conmutación {evento.index} en t = {evento.time}, la señal la pone en {t_i}.')
        if evento.next_mode != modo:
            raise SignalMismatch(
                f'Conmutación {evento.index} hacia {evento.next_mode!r}, la señal indica {modo!r}.'
            )
    return esperados


def _registro(system, eps, indice, t, modo, x, tol):
    valor = float(evaluar_lote(system[modo].lyapunov, x))
    pertenece, estricto = region_membership(system[modo], eps, x, tol)
    return TrappingRecord(indice, float(t), modo, valor, pertenece, estricto)


def verify_trapping(traj, system, signal, eps, tol=None):
    """
    Revisa x(t_i) en N^eps_{u_i} en cada instante de conmutación de la trayectoria.
    """
    eps = _validar_eps(eps)
    _validar_rotulos(system, signal)
    _revisar_eventos(traj, signal)
    inicial = _registro(system, eps, 0, traj.times[0], signal.initial_mode, traj.initial_state, tol)
    registros = tuple(
        _registro(system, eps, evento.index, evento.time, evento.next_mode, evento.state, tol)
        for evento in traj.switch_events
    )
    reporte = TrappingReport(eps, registros, inicial)
    if not inicial.member:
        logger.info('El estado inicial no está en N^eps del modo %r: la garantía no aplica.', signal.initial_mode)
    logger.info('Atrapamiento con eps=%g: %d registros, aprobado=%s', eps, len(registros), reporte.overall_pass)
    return reporte


def _intervalos(traj):
    """
    Pares (inicio, fin) de índices de muestra por intervalo entre conmutaciones, ambos incluidos.
    """
    cortes = [0] + [traj.index_of(evento.time) for evento in traj.switch_events]
    fin = len(traj) - 1
    if cortes[-1] < fin:
        cortes.append(fin)
    return list(zip(cortes[:-1], cortes[1:]))


def w_monitor(traj, system, signal):
    """
    Veredicto por intervalo: W(t) = e^{k t} V(x(t)) no crece entre muestras consecutivas
    (tolerancia relativa 1e-7), con k y V del modo actuante.
    """
    _validar_rotulos(system, signal)
    _revisar_eventos(traj, signal)
    veredictos = []
    intervalos = _intervalos(traj)
    actuantes = signal.acting_modes(len(intervalos))
    for j, (inicio, fin) in enumerate(intervalos):
        modo = actuantes[j]
        sub = system[modo]
        tiempos = traj.times[inicio:fin + 1]
        valores = np.atleast_1d(evaluar_lote(sub.lyapunov, traj.states[inicio:fin + 1]))
        # W_{m+1} <= W_m (1 + tol) + atol e^{k t_{m+1}}, dividido por e^{k t_{m+1}}
        crecimiento = np.exp(-sub.decay_rate * np.diff(tiempos))
        escalados = valores[1:] / crecimiento
        cotas = valores[:-1] * (1.0 + TOL_W_RELATIVA) + TOL_W_ABSOLUTA
        monotona = bool(np.all(escalados <= cotas))
        positivos = valores[:-1] > 0
        if np.any(positivos):
            relativo = float(np.max((escalados[positivos] - valores[:-1][positivos]) / valores[:-1][positivos]))
        else:
            relativo = 0.0
        veredictos.append(
            MonotonicityVerdict(j, float(tiempos[0]), float(tiempos[-1]), modo, monotona, max(relativo, 0.0))
        )
    fallidos = [v.index for v in veredictos if not v.nonincreasing]
    if fallidos:
        logger.warning('W crece en los intervalos %s', fallidos)
    return veredictos


def convergence_product(system, signal, traj, eps, i_max=None):
    """
    Productos P_i = prod mu(a_j, a_{j+1}) * exp(-sum k_{a_j} (t_{j+1} - t_j)), en escala logarítmica,
    con a_j el modo actuante sobre [t_j, t_{j+1}).
    """
    eps = _validar_eps(eps)
    if i_max is None:
        i_max = parametro('I_MAX')
    if i_max < 1:
        raise ErrorEntrada('i_max debe ser al menos 1.')
    _validar_rotulos(system, signal)
    if not signal.is_periodic and len(signal.segments) < i_max:
        raise InsufficientSwitches(f'La señal tiene {len(signal.segments)} conmutaciones, se pidieron {i_max}.')

    instantes = signal.instants(cantidad=i_max)
    tiempos = [signal.t0] + [t for t, _ in instantes]
    actuantes = signal.acting_modes(i_max + 1)

    mus, mus_tilde, logs = [], [], []
    muestreado = False
    acumulado = 0.0
    for i in range(i_max):
        a, siguiente = system[actuantes[i]], system[actuantes[i + 1]]
        mu, aproximado = estimate_mu_pair(eps, a, siguiente)
        muestreado = muestreado or aproximado
        acumulado += math.log(mu) - a.decay_rate * (tiempos[i + 1] - tiempos[i])
        mus.append(mu)
        mus_tilde.append(mu * math.exp((siguiente.decay_rate - a.decay_rate) * tiempos[i + 1]))
        logs.append(acumulado)

    umbral = logs[0] + math.log(FACTOR_CERTIFICACION)
    certificado = any(valor < umbral for valor in logs)

    entrada = None
    for evento in traj.switch_events:
        if region_membership(system[evento.next_mode], eps, evento.state)[0]:
            entrada = evento.index
            break

    reporte = ConvergenceReport(
        eps=eps,
        verdicts=tuple(w_monitor(traj, system, signal)),
        mu=tuple(mus),
        mu_tilde=tuple(mus_tilde),
        log_products=tuple(logs),
        certified=certificado,
        entry_index=entrada,
        mu_sampled=muestreado,
    )
    logger.info('Convergencia con eps=%g: %s, entrada en %s', eps, reporte.status, entrada)
    return reporte


def tube_sample(system, from_label, to_label, eps, t_grid, boundary_count=None, step=None):
    """
    Imagen de la frontera de N^eps_{from} bajo el flujo de `to` en cada t de la grilla.
    """
    paso = _paso(step)
    if boundary_count is None:
        boundary_count = parametro('PUNTOS_FRONTERA')
    origen, destino = system[from_label], system[to_label]
    grilla = [float(t) for t in t_grid]
    if any(t < 0 for t in grilla) or any(b < a for a, b in zip(grilla, grilla[1:])):
        raise ErrorEntrada('La grilla de tiempos del tubo debe ser no negativa y creciente.')

    puntos = region_boundary_points(origen, eps, boundary_count)
    salida = []
    t_actual = 0.0
    for t in grilla:
        if t > t_actual:
            _, estados = _tramo(destino, puntos, t_actual, t, paso)
            puntos = estados[-1]
            t_actual = t
        salida.append((t, puntos.copy()))
    return salida


def tube_contains(poligono, x):
    """
    Pertenencia de x al polígono convexo de puntos de frontera ordenados (solo en el plano).
    """
    poligono = np.asarray(poligono, dtype=float)
    x = np.asarray(x, dtype=float)
    if poligono.ndim != 2 or poligono.shape[1] != 2 or x.shape != (2,):
        raise ErrorEntrada('La prueba de pertenencia al tubo es solo para el plano.')
    aristas = np.roll(poligono, -1, axis=0) - poligono
    hacia_x = x - poligono
    cruces = aristas[:, 0] * hacia_x[:, 1] - aristas[:, 1] * hacia_x[:, 0]
    return bool(np.all(cruces >= -TOL_INSTANTE) or np.all(cruces <= TOL_INSTANTE))


def travel_comparison(system, eps, origin, middle, target, x0, step=None):
    """
    Compara la entrada directa origin -> target con la de dos pasos origin -> middle -> target
    sobre [0, T_{origin,target}].
    """
    eps = _validar_eps(eps)
    origen, intermedio, destino = system[origin], system[middle], system[target]
    directo = pairwise_dwell(eps, origen, destino)
    primero = pairwise_dwell(eps, origen, intermedio)
    segundo = pairwise_dwell(eps, intermedio, destino)
    if directo <= 0 or primero <= 0 or segundo <= 0:
        raise ErrorEntrada('Los tiempos de viaje deben ser positivos para construir las entradas.')

    senal_directa = signal_from_dwell(origin, [target], directo)
    senal_dos_pasos = signal_from_dwell(origin, [middle, target], [primero, segundo])
    resultado = {'horizon': directo, 'two_step_total': primero + segundo}
    for nombre, senal in (('direct', senal_directa), ('two_step', senal_dos_pasos)):
        traj = simulate_switched(system, senal, x0, directo, step)
        valores = np.atleast_1d(evaluar_lote(destino.lyapunov, traj.states))
        dentro = np.nonzero(valores <= eps + parametro('TOL_PERTENENCIA'))[0]
        resultado[nombre] = {
            'signal': senal,
            'trajectory': traj,
            'V_target_final': float(valores[-1]),
            'first_entry_time': float(traj.times[dentro[0]]) if dentro.size else None,
        }
    return resultado
