# utils/helpers.py
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from core.errors import ValidationError


class Helpers:
    """Funciones auxiliares para racionales en texto "p/q" """

    @staticmethod
    def parse_rational(text) -> Fraction:
        """Racional exacto desde "p/q", "p" o un entero; rechaza flotantes"""
        if isinstance(text, bool) or isinstance(text, float):
            raise ValidationError(f"Valor no exacto: {text!r}")
        if isinstance(text, int):
            return Fraction(text)
        if not isinstance(text, str):
            raise ValidationError(f"Se esperaba un racional en texto, no {type(text).__name__}")
        stripped = text.strip()
        if not stripped or "." in stripped or "e" in stripped.lower():
            raise ValidationError(f"Racional mal formado: {text!r}")
        try:
            return Fraction(stripped)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"Racional mal formado: {text!r}") from exc

    @staticmethod
    def format_rational(value: Optional[Fraction]) -> Optional[str]:
        if value is None:
            return None
        value = Fraction(value)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"

    @staticmethod
    def parse_vector(values: Iterable) -> Tuple[Fraction, ...]:
        return tuple(Helpers.parse_rational(v) for v in values)

    @staticmethod
    def format_vector(values: Sequence[Fraction]) -> list:
        return [Helpers.format_rational(v) for v in values]

    @staticmethod
    def format_point(point: Sequence[Fraction]) -> str:
        """Punto (δ, ε) legible"""
        return "(" + ", ".join(Helpers.format_rational(v) for v in point) + ")"

    @staticmethod
    def format_indices(indices: Optional[Iterable[int]]) -> str:
        if indices is None:
            return "-"
        return "{" + ",".join(str(i) for i in sorted(indices)) + "}"


helpers = Helpers()
