"""
Certificados de Lyapunov: evaluación, pertenencia a regiones atrapantes N^eps_u y chequeo por muestreo.
"""

import logging

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from ..constants import TOL_DECAIMIENTO, parametro
from ..excepciones import ErrorEntrada, InvalidEpsilon, UnsupportedDimension
from ..models import CertificateReport, QuadraticLyapunov, evaluar_lote

logger = logging.getLogger(__name__)

TOL_SANDWICH = 1e-9


def _validar_eps(eps):
    eps = float(eps)
    if not (np.isfinite(eps) and eps > 0):
        raise InvalidEpsilon(f'eps debe ser positivo (recibido {eps}).')
    return eps


def v_eval(sub, x):
    """
    V_u(x) para un punto; para un arreglo (..., n) devuelve el arreglo de valores.
    """
    x = sub.check_dimension(x)
    valores = evaluar_lote(sub.lyapunov, x)
    return float(valores) if np.ndim(valores) == 0 else valores


def region_membership(sub, eps, x, tol=None):
    """
    (pertenece con tolerancia, pertenece estrictamente) a N^eps_u = {x : V_u(x) <= eps}.
    """
    eps = _validar_eps(eps)
    if tol is None:
        tol = parametro('TOL_PERTENENCIA')
    valor = v_eval(sub, x)
    return bool(valor <= eps + tol), bool(valor <= eps)


def in_region(sub, eps, x, tol=None):
    return region_membership(sub, eps, x, tol)[0]


def lyapunov_gradient(sub, X):
    """
    Gradiente de V_u: analítico para cuadráticas, diferencias centrales en otro caso.
    """
    X = np.atleast_2d(sub.check_dimension(X))
    if hasattr(sub.lyapunov, 'gradient'):
        return np.asarray(sub.lyapunov.gradient(X), dtype=float)
    return finite_difference_gradient(sub.lyapunov, X)


def finite_difference_gradient(funcion, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    pasos = 1e-6 * (1.0 + np.linalg.norm(X, axis=1))
    gradiente = np.empty_like(X)
    for j in range(X.shape[1]):
        desplazamiento = np.zeros_like(X)
        desplazamiento[:, j] = pasos
        adelante = evaluar_lote(funcion, X + desplazamiento)
        atras = evaluar_lote(funcion, X - desplazamiento)
        gradiente[:, j] = (adelante - atras) / (2.0 * pasos)
    return gradiente


def check_certificate_points(sub, puntos):
    """
    Revisa el sándwich alpha <= V <= beta y el decaimiento grad V . f <= -k V en los puntos dados.
    """
    X = np.atleast_2d(sub.check_dimension(puntos))
    distancias = np.linalg.norm(X - sub.equilibrium, axis=1)
    valores = np.atleast_1d(evaluar_lote(sub.lyapunov, X))
    inferiores = np.atleast_1d(sub.alpha.eval(distancias))
    superiores = np.atleast_1d(sub.beta.eval(distancias))

    campo = np.atleast_2d(evaluar_lote(sub.field, X))
    derivadas = np.sum(lyapunov_gradient(sub, X) * campo, axis=1)
    cotas = -sub.decay_rate * valores
    holguras = derivadas - cotas

    sandwich = []
    decaimiento = []
    for i in range(X.shape[0]):
        bajo = valores[i] < inferiores[i] - TOL_SANDWICH * (1.0 + abs(inferiores[i]))
        alto = valores[i] > superiores[i] + TOL_SANDWICH * (1.0 + abs(superiores[i]))
        if bajo or alto:
            sandwich.append((X[i].copy(), float(valores[i]), (float(inferiores[i]), float(superiores[i]))))
        if holguras[i] > TOL_DECAIMIENTO:
            decaimiento.append((X[i].copy(), float(derivadas[i]), float(cotas[i])))

    reporte = CertificateReport(
        label=sub.label,
        samples_tested=int(X.shape[0]),
        sandwich_violations=tuple(sandwich),
        decay_violations=tuple(decaimiento),
        max_decay_slack=float(np.max(holguras)),
    )
    if not reporte.passed:
        logger.warning(
            'Certificado del modo %r falla en %d (sándwich) y %d (decaimiento) de %d muestras',
            sub.label, len(sandwich), len(decaimiento), reporte.samples_tested,
        )
    return reporte


def muestras_caja(caja, cantidad, semilla):
    """
    Puntos de Halton (aleatorizados con semilla) dentro de la caja [(inf, sup), ...].
    """
    caja = np.asarray(caja, dtype=float)
    if caja.ndim != 2 or caja.shape[1] != 2:
        raise ErrorEntrada('La caja debe ser una lista de pares (inferior, superior).')
    inferiores, superiores = caja[:, 0], caja[:, 1]
    if np.any(superiores <= inferiores):
        raise ErrorEntrada('La caja de muestreo debe tener volumen positivo.')
    motor = qmc.Halton(d=caja.shape[0], scramble=True, seed=semilla)
    return qmc.scale(motor.random(cantidad), inferiores, superiores)


def check_certificate(sub, box, n_samples=None, seed=None):
    if n_samples is None:
        n_samples = parametro('MUESTRAS')
    if seed is None:
        seed = parametro('SEMILLA')
    if n_samples < 1:
        raise ErrorEntrada('Se necesita al menos una muestra para chequear el certificado.')
    if len(box) != sub.dimension:
        raise ErrorEntrada(f'La caja tiene {len(box)} intervalos, el modo {sub.label!r} es de dimensión {sub.dimension}.')
    puntos = muestras_caja(box, n_samples, seed)
    return check_certificate_points(sub, puntos)


def _radio_nivel(sub, eps, direccion):
    # raíz radial de V(x_u + r e) = eps
    def valor(r):
        return float(evaluar_lote(sub.lyapunov, sub.equilibrium + r * direccion))

    alto = 1.0
    for _ in range(200):
        if valor(alto) > eps:
            break
        alto *= 2.0
    else:
        raise ErrorEntrada(f'La región N^eps del modo {sub.label!r} no es acotada en la dirección {direccion}.')
    return optimize.brentq(lambda r: valor(r) - eps, 0.0, alto, xtol=1e-14)


def region_boundary_points(sub, eps, count):
    """
    `count` puntos de la frontera {V_u = eps} en ángulos equiespaciados (solo en el plano).
    """
    eps = _validar_eps(eps)
    if sub.dimension != 2:
        raise UnsupportedDimension(f'La frontera angular requiere dimensión 2 (el modo {sub.label!r} es {sub.dimension}).')
    if count < 3:
        raise ErrorEntrada('Se necesitan al menos 3 puntos de frontera.')
    angulos = 2.0 * np.pi * np.arange(count) / count
    direcciones = np.column_stack((np.cos(angulos), np.sin(angulos)))

    lyapunov = sub.lyapunov
    if isinstance(lyapunov, QuadraticLyapunov):
        if lyapunov.is_identity:
            radios = np.full(count, np.sqrt(eps))
        else:
            radios = np.sqrt(eps / np.einsum('ij,jk,ik->i', direcciones, lyapunov.P, direcciones))
    else:
        radios = np.array([_radio_nivel(sub, eps, d) for d in direcciones])
    return sub.equilibrium + radios[:, None] * direcciones
