# core/errors.py
"""
Jerarquía de excepciones del motor de Sarkisov.

Cada clase lleva el código de salida que usa la CLI.
"""

from typing import Iterable, List, Optional, Tuple


class SarkisovError(Exception):
    """Error base del motor"""
    exit_code = 4


class ValidationError(SarkisovError, ValueError):
    """Datos de entrada inválidos"""
    exit_code = 2


class DimensionMismatchError(ValidationError):
    """Dimensiones incompatibles entre matriz y vector"""


class FixtureError(ValidationError):
    """Archivo de fixture mal formado"""


class HypothesisError(ValidationError):
    """Una hipótesis de partida no se cumple"""


class UnboundedPolytopeError(ValidationError):
    """El poliedro no es acotado (falla la condición BDD)"""


class NoCarrierError(ValidationError):
    """A_I es sobreyectiva: no hay recta portadora"""


class StratumError(ValidationError):
    """La recta del HMMP atraviesa un estrato de dimensión 0"""

    def __init__(self, message: str, point: Optional[Tuple] = None):
        super().__init__(message)
        self.point = point


class GenericityError(SarkisovError):
    """Los datos (B, B') no son genéricos"""
    exit_code = 3

    def __init__(self, message: str, violations: Optional[Iterable] = None):
        super().__init__(message)
        self.violations: List = list(violations or [])


class EmptyPolytopeError(SarkisovError):
    """Politopo vacío donde se requería uno no vacío"""


class NotAmpleError(SarkisovError):
    """El divisor de referencia no es amplio"""


class NotNefError(SarkisovError):
    """El divisor no es nef"""


class NotQCartierError(SarkisovError):
    """El divisor no es Q-Cartier"""


class NotQFactorialError(SarkisovError):
    """El descriptor no es Q-factorial"""


class RayOutsideSupportError(SarkisovError):
    """Un rayo no está en el soporte del abanico"""


class WallError(SarkisovError):
    """El punto no está en U1 o el conjunto I no es minimal"""


class SamplingError(SarkisovError):
    """El muestreo por mitades agotó sus iteraciones"""


class LinkError(SarkisovError):
    """Falla un invariante de un eslabón de Sarkisov"""
