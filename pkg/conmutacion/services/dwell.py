"""
Fórmulas de tiempo de permanencia: por pares, local (T_loc), global vía mu(eps) (T_glob)
y el análisis de desigualdad triangular del tiempo de viaje entre regiones.
"""

import logging
import math
from itertools import permutations

import numpy as np
from scipy import optimize
from scipy.stats import norm, qmc

from ..constants import (
    EPS0_ANCHO_RELATIVO,
    EPS0_FACTOR_DESCENSO,
    EPS0_MAXIMO,
    EPS0_MINIMO,
    EPS0_PISO,
    EPS0_PUNTOS_POR_DECADA,
    TOL_IDENTIDAD_TRIANGULO,
    parametro,
)
from ..excepciones import (
    EmptyConfiguration,
    EmptyTransitions,
    ErrorEntrada,
    HeterogeneousCertificates,
    InvalidEpsilon,
    InvalidMu,
    NoThreshold,
    UnsupportedCertificate,
)
from ..models import DwellTable, TriangleAnalysis, evaluar_lote

logger = logging.getLogger(__name__)

MODO_CERRADO = 'closed_form'
MODO_MUESTREADO = 'sampled'


def _validar_eps(eps):
    eps = float(eps)
    if not (math.isfinite(eps) and eps > 0):
        raise InvalidEpsilon(f'eps debe ser positivo (recibido {eps}).')
    return eps


def _distancia(a, b):
    return float(np.linalg.norm(a.equilibrium - b.equilibrium))


def _log_delta(eps, from_sub, to_sub):
    # ln beta_2(||x_2 - x_1|| + alpha_1^{-1}(eps))
    delta = to_sub.beta.eval(_distancia(from_sub, to_sub) + from_sub.alpha.inverse(eps))
    if delta <= 0:
        raise InvalidEpsilon(f'beta({from_sub.label!r} -> {to_sub.label!r}) no es positivo para eps = {eps}.')
    return math.log(delta)


def pairwise_dwell_raw(eps, from_sub, to_sub):
    """
    -(1/k_2) ln(eps / beta_2(||x_2 - x_1|| + alpha_1^{-1}(eps))), sin truncar.
    """
    eps = _validar_eps(eps)
    return (_log_delta(eps, from_sub, to_sub) - math.log(eps)) / to_sub.decay_rate


def pairwise_dwell(eps, from_sub, to_sub):
    """
    Tiempo que necesitan las soluciones para ir de N^eps_{from} a N^eps_{to}; 0 si ya están dentro.
    """
    return max(0.0, pairwise_dwell_raw(eps, from_sub, to_sub))


def local_dwell(eps, system, transitions):
    eps = _validar_eps(eps)
    transiciones = list(dict.fromkeys(tuple(par) for par in transitions))
    if not transiciones:
        raise EmptyTransitions('La tabla de permanencia necesita al menos una transición.')
    entradas = {}
    crudos = {}
    for origen, destino in transiciones:
        crudo = pairwise_dwell_raw(eps, system[origen], system[destino])
        crudos[(origen, destino)] = crudo
        entradas[(origen, destino)] = max(0.0, crudo)
    t_loc = max(entradas.values())
    logger.info('T_loc(eps=%g) = %.6f sobre %d transiciones', eps, t_loc, len(entradas))
    return DwellTable(eps=eps, entries=entradas, t_loc=t_loc, raw=crudos)


def signal_transitions(signal):
    """
    Pares (u_{i-1}, u_i) que recorre la señal, incluido el cierre de período si es periódica.
    """
    modos = signal.modes
    pares = list(zip(modos[:-1], modos[1:]))
    if signal.is_periodic:
        pares.append((modos[-1], signal.initial_mode))
    return list(dict.fromkeys(pares))


def dwell_requirement(system, eps):
    """
    Función (u_{i-1}, u_i) -> T^eps, para usar con validate_dwell.
    """
    def exigido(origen, destino):
        return pairwise_dwell(eps, system[origen], system[destino])
    return exigido


def mu_pair(eps, a, b):
    """
    Cota cerrada de V_a / V_b fuera de N^eps_b para cuadráticas identidad: (1 + ||x_a - x_b|| / sqrt(eps))^2.
    """
    eps = _validar_eps(eps)
    if not (a.has_identity_quadratic and b.has_identity_quadratic):
        raise UnsupportedCertificate(
            f'La cota cerrada de mu requiere V = ||x - x_u||^2 ({a.label!r}, {b.label!r}).'
        )
    return (1.0 + _distancia(a, b) / math.sqrt(eps)) ** 2


def _direcciones(muestras):
    if muestras.shape[1] == 1:
        return np.column_stack((np.cos(2.0 * np.pi * muestras[:, 0]), np.sin(2.0 * np.pi * muestras[:, 0])))
    gauss = norm.ppf(np.clip(muestras, 1e-12, 1.0 - 1e-12))
    return gauss / np.linalg.norm(gauss, axis=1, keepdims=True)


def mu_pair_sampled(eps, a, b, n_samples, radius, seed):
    """
    Máximo de V_a / V_b en muestras de la bola de radio `radius` en torno a x_b, fuera de N^eps_b.
    """
    eps = _validar_eps(eps)
    n = b.dimension
    motor = qmc.Halton(d=2 if n <= 2 else n + 1, scramble=True, seed=seed)
    muestras = motor.random(n_samples)
    radios = radius * muestras[:, 0]
    if n == 1:
        direcciones = np.where(muestras[:, 1] < 0.5, -1.0, 1.0)[:, None]
    else:
        direcciones = _direcciones(muestras[:, 1:])
    X = b.equilibrium + radios[:, None] * direcciones
    denominador = evaluar_lote(b.lyapunov, X)
    fuera = denominador > eps
    if not np.any(fuera):
        return 1.0
    cocientes = evaluar_lote(a.lyapunov, X[fuera]) / denominador[fuera]
    return float(max(1.0, np.max(cocientes)))


def mu_bound(eps, system, mode=MODO_CERRADO, n_samples=None, radius=None, seed=None):
    """
    mu(eps) uniforme sobre todos los pares ordenados de modos.
    """
    eps = _validar_eps(eps)
    subsistemas = list(system)
    if len(subsistemas) < 2:
        return 1.0
    if mode == MODO_CERRADO:
        return max(mu_pair(eps, a, b) for a, b in permutations(subsistemas, 2))
    if mode != MODO_MUESTREADO:
        raise ErrorEntrada(f'Modo de cálculo de mu desconocido: {mode!r}.')

    n_samples = n_samples or parametro('MUESTRAS')
    seed = parametro('SEMILLA') if seed is None else seed
    if radius is None:
        radius = _radio_por_defecto(eps, subsistemas)
    return max(
        mu_pair_sampled(eps, a, b, n_samples, radius, seed)
        for a, b in permutations(subsistemas, 2)
    )


def _radio_por_defecto(eps, subsistemas):
    diametro = max(_distancia(a, b) for a, b in permutations(subsistemas, 2))
    return 10.0 * (diametro + math.sqrt(eps))


def estimate_mu(eps, system, n_samples=None, radius=None, seed=None):
    """
    (mu, muestreado): forma cerrada si todos los certificados son cuadráticas identidad,
    muestreo en otro caso.
    """
    try:
        return mu_bound(eps, system), False
    except UnsupportedCertificate:
        logger.warning('Certificados heterogéneos: mu(eps) se estima por muestreo, no es una cota garantizada.')
        return mu_bound(eps, system, MODO_MUESTREADO, n_samples, radius, seed), True


def estimate_mu_pair(eps, a, b, n_samples=None, radius=None, seed=None):
    if a.label == b.label:
        return 1.0, False
    try:
        return mu_pair(eps, a, b), False
    except UnsupportedCertificate:
        n_samples = n_samples or parametro('MUESTRAS')
        seed = parametro('SEMILLA') if seed is None else seed
        radius = radius or _radio_por_defecto(eps, [a, b])
        return mu_pair_sampled(eps, a, b, n_samples, radius, seed), True


def global_dwell(eps, mu, k_min, margin=None):
    """
    (1 + margen) ln(mu) / k, estrictamente sobre la cota ln(mu)/k cuando mu > 1.
    """
    _validar_eps(eps)
    if margin is None:
        margin = parametro('MARGEN_GLOBAL')
    mu = float(mu)
    if not (mu >= 1.0):
        raise InvalidMu(f'mu(eps) debe ser >= 1 (recibido {mu}).')
    if not (k_min > 0):
        raise ErrorEntrada(f'k debe ser positivo (recibido {k_min}).')
    if margin < 0:
        raise ErrorEntrada('El margen de T_glob no puede ser negativo.')
    return (1.0 + margin) * math.log(mu) / k_min


def min_decay_rate(system, labels=None):
    rotulos = system.labels if labels is None else labels
    return min(system[rotulo].decay_rate for rotulo in rotulos)


def combined_dwell(eps, system, transitions, margin=None):
    """
    max(T_loc, T_glob): permanencia que asegura llegar a algún N^eps y luego quedar atrapado.
    """
    tabla = local_dwell(eps, system, transitions)
    mu, muestreado = estimate_mu(eps, system)
    t_glob = global_dwell(eps, mu, min_decay_rate(system), margin)
    return {
        'eps': tabla.eps,
        't_loc': tabla.t_loc,
        'mu': mu,
        'mu_sampled': muestreado,
        't_glob': t_glob,
        'dwell': max(tabla.t_loc, t_glob),
    }


def _certificados_compartidos(subsistemas):
    base = subsistemas[0]
    for sub in subsistemas[1:]:
        if sub.alpha != base.alpha or sub.beta != base.beta:
            raise HeterogeneousCertificates(
                f'alpha/beta de {sub.label!r} difieren de los de {base.label!r}.'
            )
        if not math.isclose(sub.decay_rate, base.decay_rate, rel_tol=1e-12):
            raise HeterogeneousCertificates(
                f'k de {sub.label!r} ({sub.decay_rate}) difiere de k de {base.label!r} ({base.decay_rate}).'
            )
    return base.alpha, base.beta, base.decay_rate


def triangle_gap(eps, u0, v, u1, d=None, r=None):
    """
    T_{u0,u1} - T_{u0,v} - T_{v,u1}, calculado directo y como -ln(K / eps^{1/k}).
    """
    eps = _validar_eps(eps)
    alpha, beta, k = _certificados_compartidos([u0, v, u1])

    directo = (
        pairwise_dwell_raw(eps, u0, u1)
        - pairwise_dwell_raw(eps, u0, v)
        - pairwise_dwell_raw(eps, v, u1)
    )

    a = alpha.inverse(eps)
    log_v1 = math.log(beta.eval(_distancia(v, u1) + a))
    log_01 = math.log(beta.eval(_distancia(u0, u1) + a))
    log_0v = math.log(beta.eval(_distancia(u0, v) + a))
    log_K = (log_v1 - log_01 + log_0v) / k
    identidad = -(log_K - math.log(eps) / k)

    if not math.isclose(directo, identidad, rel_tol=TOL_IDENTIDAD_TRIANGULO, abs_tol=1e-12):
        logger.warning('Brecha triangular: directo %.17g != identidad %.17g', directo, identidad)

    eps0 = epsilon0_search(d, r, alpha, beta, k) if d is not None and r is not None else None
    return TriangleAnalysis(
        eps=eps,
        gap=directo,
        K=math.exp(log_K),
        gap_identity=identidad,
        eps0=eps0,
        labels=(u0.label, v.label, u1.label),
    )


def _condicion_peor_caso(eps, d, r, alpha, beta):
    # ln(K_0^k / eps) con K_0 = beta(r + a)^{2/k} / beta(2d + a)^{1/k}
    a = alpha.inverse(eps)
    return 2.0 * math.log(beta.eval(r + a)) - math.log(beta.eval(2.0 * d + a)) - math.log(eps)


def epsilon0_search(d, r, alpha, beta, k):
    """
    eps_0 tal que K_0 / eps^{1/k} > 1 para todo eps en (0, eps_0), en la geometría más desfavorable
    ||x_{u0}||, ||x_{u1}|| <= d y ||x_{u0} - x_v||, ||x_v - x_{u1}|| >= r.
    """
    d = float(d)
    r = float(r)
    if not (d > 0 and r > 0):
        raise ErrorEntrada('d y r deben ser positivos.')
    if not (k > 0):
        raise ErrorEntrada('k debe ser positivo.')
    if r > 2.0 * d:
        raise EmptyConfiguration(f'r = {r} > 2d = {2.0 * d}: no existen configuraciones admisibles.')

    # la condición crece sin cota cuando eps -> 0: se baja el piso hasta que se cumpla
    piso = EPS0_MINIMO
    while _condicion_peor_caso(piso, d, r, alpha, beta) <= 0:
        if piso <= EPS0_PISO:
            raise NoThreshold(f'La condición falla aun en eps = {piso:g} (d = {d}, r = {r}).')
        piso = max(piso * EPS0_FACTOR_DESCENSO, EPS0_PISO)

    decadas = math.log10(EPS0_MAXIMO) - math.log10(piso)
    grilla = np.logspace(
        math.log10(piso), math.log10(EPS0_MAXIMO), int(math.ceil(decadas * EPS0_PUNTOS_POR_DECADA)) + 1
    )

    bajo = grilla[0]
    alto = None
    for eps in grilla[1:]:
        if _condicion_peor_caso(eps, d, r, alpha, beta) <= 0:
            alto = eps
            break
        bajo = eps
    if alto is None:
        logger.warning('La condición se cumple en todo (0, %g]: eps_0 queda en el tope de búsqueda.', EPS0_MAXIMO)
        return float(EPS0_MAXIMO)

    # raíz en escala logarítmica dentro del primer tramo donde la condición cambia de signo
    logaritmo = optimize.brentq(
        lambda s: _condicion_peor_caso(math.exp(s), d, r, alpha, beta),
        math.log(bajo), math.log(alto), xtol=EPS0_ANCHO_RELATIVO,
    )
    eps0 = math.exp(logaritmo)
    logger.info('eps_0(d=%g, r=%g) = %.6g', d, r, eps0)
    return float(eps0)
