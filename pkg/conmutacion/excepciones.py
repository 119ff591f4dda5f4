"""
Errores de dominio. Cada error lleva el código de salida que usa la CLI.
"""

from .constants import SALIDA_ERROR_ENTRADA, SALIDA_ERROR_NUMERICO


class ErrorConmutacion(Exception):
    codigo_salida = SALIDA_ERROR_ENTRADA


class ErrorEntrada(ErrorConmutacion, ValueError):
    pass


class ErrorNumerico(ErrorConmutacion, ArithmeticError):
    codigo_salida = SALIDA_ERROR_NUMERICO


class SingularMatrix(ErrorEntrada):
    pass


class NotContracting(ErrorEntrada):
    pass


class EmptyTransitions(ErrorEntrada):
    pass


class NonpositiveDwell(ErrorEntrada):
    pass


class DimensionMismatch(ErrorEntrada):
    pass


class UnsupportedDimension(ErrorEntrada):
    pass


class InvalidEpsilon(ErrorEntrada):
    pass


class UnknownLabel(ErrorEntrada, KeyError):
    def __str__(self):
        # KeyError pone comillas alrededor del mensaje
        return str(self.args[0]) if self.args else ''


class UnsupportedCertificate(ErrorEntrada):
    pass


class InvalidMu(ErrorEntrada):
    pass


class HeterogeneousCertificates(ErrorEntrada):
    pass


class EmptyConfiguration(ErrorEntrada):
    pass


class SignalMismatch(ErrorEntrada):
    pass


class InsufficientSwitches(ErrorEntrada):
    pass


class ParseError(ErrorEntrada):
    def __init__(self, mensaje, linea=None, columna=None):
        super().__init__(mensaje)
        self.linea = linea
        self.columna = columna


class NonfiniteState(ErrorNumerico):
    pass


class NoThreshold(ErrorNumerico):
    pass
