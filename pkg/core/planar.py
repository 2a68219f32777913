# core/planar.py
"""
Geometría exacta en el plano de parámetros (δ, ε).

Los puntos son pares (δ, ε). Las rectas y semiplanos se escriben como
a·ε + b·δ + c (= 0, >= 0), igual que las rectas portadoras.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from core.errors import ValidationError

Point = Tuple[Fraction, Fraction]


def cross(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def along(p: Point, direction: Sequence[Fraction], t: Fraction) -> Point:
    """p + t·direction"""
    return (p[0] + t * direction[0], p[1] + t * direction[1])


def rot90ccw(v: Sequence[Fraction]) -> Point:
    return (-v[1], v[0])


def max_norm(v: Sequence[Fraction]) -> Fraction:
    return max(abs(v[0]), abs(v[1]))


def midpoint(p: Point, q: Point) -> Point:
    return ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


@dataclass(frozen=True)
class Line:
    """Recta a·ε + b·δ + c = 0, normalizada con a = 1 si a != 0 y si no b = 1"""
    a: Fraction
    b: Fraction
    c: Fraction

    @classmethod
    def normalized(cls, a, b, c) -> "Line":
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
        if a != 0:
            return cls(Fraction(1), b / a, c / a)
        if b != 0:
            return cls(Fraction(0), Fraction(1), c / b)
        raise ValidationError("a = b = 0 no define una recta")

    def value(self, point: Point) -> Fraction:
        return self.a * point[1] + self.b * point[0] + self.c

    def contains(self, point: Point) -> bool:
        return self.value(point) == 0

    @property
    def direction(self) -> Point:
        return (self.a, -self.b)

    @property
    def normal(self) -> Point:
        """Gradiente en coordenadas (δ, ε)"""
        return (self.b, self.a)

    def intersect(self, other: "Line") -> Optional[Point]:
        det = self.b * other.a - self.a * other.b
        if det == 0:
            return None
        delta = (self.a * other.c - other.a * self.c) / det
        epsilon = (other.b * self.c - self.b * other.c) / det
        return (delta, epsilon)

    def epsilon_at(self, delta: Fraction) -> Optional[Fraction]:
        if self.a == 0:
            return None
        return -(self.b * delta + self.c) / self.a


def clearance(point: Point, lines: Iterable[Line]) -> Optional[Fraction]:
    """
    Distancia en norma del máximo a la recta más cercana que no pasa por
    `point`; None si todas pasan por él.
    """
    gaps = [
        abs(line.value(point)) / (abs(line.a) + abs(line.b))
        for line in lines if not line.contains(point)
    ]
    return min(gaps) if gaps else None


@dataclass(frozen=True)
class HalfPlane:
    """Semiplano a·ε + b·δ + c >= 0, escalado con max(|a|, |b|) = 1"""
    a: Fraction
    b: Fraction
    c: Fraction

    @classmethod
    def normalized(cls, a, b, c) -> "HalfPlane":
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
        scale = max(abs(a), abs(b))
        if scale == 0:
            scale = abs(c) or Fraction(1)
        return cls(a / scale, b / scale, c / scale)

    @property
    def trivial(self) -> bool:
        return self.a == 0 and self.b == 0

    def value(self, point: Point) -> Fraction:
        return self.a * point[1] + self.b * point[0] + self.c

    def contains(self, point: Point) -> bool:
        return self.value(point) >= 0

    def boundary(self) -> Line:
        return Line.normalized(self.a, self.b, self.c)

    def flipped(self) -> "HalfPlane":
        return HalfPlane(-self.a, -self.b, -self.c)


def _dedupe(points: Sequence[Point]) -> Tuple[Point, ...]:
    out: List[Point] = []
    for p in points:
        if p not in out:
            out.append(p)
    return tuple(out)


@dataclass(frozen=True)
class ConvexPolygon:
    """Polígono convexo (posiblemente degenerado) con vértices en orden antihorario"""
    vertices: Tuple[Point, ...]

    @classmethod
    def box(cls, delta_min, delta_max, epsilon_min, epsilon_max) -> "ConvexPolygon":
        d0, d1 = Fraction(delta_min), Fraction(delta_max)
        e0, e1 = Fraction(epsilon_min), Fraction(epsilon_max)
        return cls(((d0, e0), (d1, e0), (d1, e1), (d0, e1)))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def dimension(self) -> int:
        pts = self.vertices
        if not pts:
            return -1
        if len(pts) == 1:
            return 0
        base = pts[0]
        for i in range(1, len(pts)):
            for j in range(i + 1, len(pts)):
                if cross(sub(pts[i], base), sub(pts[j], base)) != 0:
                    return 2
        return 1

    def centroid(self) -> Point:
        """Media de los vértices: interior relativo por convexidad"""
        k = len(self.vertices)
        return (
            sum((p[0] for p in self.vertices), Fraction(0)) / k,
            sum((p[1] for p in self.vertices), Fraction(0)) / k,
        )

    def edges(self) -> List[Tuple[Point, Point]]:
        pts = self.vertices
        if len(pts) < 2:
            return []
        return [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]

    def area2(self) -> Fraction:
        return sum((cross(p, q) for p, q in self.edges()), Fraction(0))

    def contains(self, point: Point) -> bool:
        if self.dimension < 2:
            return point in self.vertices or any(
                cross(sub(q, p), sub(point, p)) == 0
                and min(p[0], q[0]) <= point[0] <= max(p[0], q[0])
                and min(p[1], q[1]) <= point[1] <= max(p[1], q[1])
                for p, q in self.edges()
            )
        return all(cross(sub(q, p), sub(point, p)) >= 0 for p, q in self.edges())

    def clip(self, half: HalfPlane) -> "ConvexPolygon":
        """Sutherland-Hodgman contra un semiplano"""
        pts = self.vertices
        if not pts:
            return self
        if len(pts) == 1:
            return self if half.contains(pts[0]) else ConvexPolygon(())
        out: List[Point] = []
        for i, p in enumerate(pts):
            q = pts[(i + 1) % len(pts)]
            vp, vq = half.value(p), half.value(q)
            if vp >= 0:
                out.append(p)
            if (vp > 0 and vq < 0) or (vp < 0 and vq > 0):
                t = vp / (vp - vq)
                out.append(along(p, sub(q, p), t))
        return ConvexPolygon(_dedupe(out))

    def split(self, line: Line) -> Tuple["ConvexPolygon", "ConvexPolygon"]:
        """Partes a·ε + b·δ + c >= 0 y <= 0"""
        upper = HalfPlane(line.a, line.b, line.c)
        return self.clip(upper), self.clip(upper.flipped())

    def crossed_by(self, line: Line) -> bool:
        values = [line.value(p) for p in self.vertices]
        return any(v > 0 for v in values) and any(v < 0 for v in values)

    def chord(self, line: Line) -> Optional[Tuple[Point, Point]]:
        """Intersección con una recta como segmento ordenado según su dirección"""
        half = HalfPlane(line.a, line.b, line.c)
        pts = self.clip(half).clip(half.flipped()).vertices
        if not pts:
            return None
        d = line.direction
        ordered = sorted(pts, key=lambda p: p[0] * d[0] + p[1] * d[1])
        return ordered[0], ordered[-1]


def segments_overlap(first: Tuple[Point, Point], second: Tuple[Point, Point]) -> bool:
    """Dos segmentos colineales que comparten un tramo de longitud positiva"""
    p, q = first
    r, s = second
    d = sub(q, p)
    if cross(d, sub(r, p)) != 0 or cross(d, sub(s, p)) != 0:
        return False
    norm = d[0] * d[0] + d[1] * d[1]
    if norm == 0:
        return False
    t_r = (sub(r, p)[0] * d[0] + sub(r, p)[1] * d[1]) / norm
    t_s = (sub(s, p)[0] * d[0] + sub(s, p)[1] * d[1]) / norm
    lo, hi = max(Fraction(0), min(t_r, t_s)), min(Fraction(1), max(t_r, t_s))
    return hi > lo


def polygons_adjacent(first: ConvexPolygon, second: ConvexPolygon) -> bool:
    return any(segments_overlap(e, f) for e in first.edges() for f in second.edges())
