"""
Constantes numéricas y valores por defecto (sobreescribibles desde settings.CONMUTACION).
"""

# Tolerancias fijas del dominio
TOL_EQUILIBRIO = 1e-9
TOL_DECAIMIENTO = 1e-9
TOL_W_RELATIVA = 1e-7
TOL_W_ABSOLUTA = 1e-24
TOL_IDENTIDAD_TRIANGULO = 1e-10
FACTOR_CERTIFICACION = 1e-6

# Búsqueda de epsilon_0
EPS0_MINIMO = 1e-12
EPS0_PISO = 1e-300
EPS0_FACTOR_DESCENSO = 1e-3
EPS0_MAXIMO = 1e6
EPS0_PUNTOS_POR_DECADA = 25
EPS0_ANCHO_RELATIVO = 1e-6

# Formato de salida
DIGITOS_SIGNIFICATIVOS = 17

ANALISIS_DISPONIBLES = ('certify', 'dwell_table', 'trapping', 'convergence', 'triangle', 'tube')

# Códigos de salida de la CLI
SALIDA_OK = 0
SALIDA_VERIFICACION_FALLIDA = 2
SALIDA_ERROR_ENTRADA = 3
SALIDA_ERROR_NUMERICO = 4

_DEFAULTS = {
    'PASO': 1e-3,
    'SEMILLA': 42,
    'TOL_PERTENENCIA': 1e-9,
    'MUESTRAS': 10000,
    'MARGEN_GLOBAL': 0.01,
    'I_MAX': 20,
    'PUNTOS_FRONTERA': 16,
}


def parametro(nombre):
    """
    Valor de settings.CONMUTACION[nombre], o el default si Django no está configurado.
    """
    from django.conf import settings

    if settings.configured:
        return getattr(settings, 'CONMUTACION', {}).get(nombre, _DEFAULTS[nombre])
    return _DEFAULTS[nombre]


def formatear_real(valor):
    """
    Real con 17 cifras significativas, sin depender del locale.
    """
    return format(float(valor), f'.{DIGITOS_SIGNIFICATIVOS}g')
