# core/polytope.py
"""
Politopos en representación H sobre Q: P = {x : A x >= b}.

Factibilidad estricta y no estricta, acotación, vértices con sus
conjuntos de filas activas, caras y detección de filas redundantes.
Los índices de fila son 0-indexados.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from core.errors import DimensionMismatchError, EmptyPolytopeError, UnboundedPolytopeError, ValidationError
from core.exactnum import RatMatrix, RatVector, solve_affine, to_vector
from core.lp import OPTIMAL, UNBOUNDED, maximize


@dataclass(frozen=True)
class FaceQuery:
    """Conjunto de filas I que define la cara F_I"""
    indices: FrozenSet[int]

    @classmethod
    def of(cls, indices: Iterable[int]) -> "FaceQuery":
        return cls(frozenset(indices))


@dataclass(frozen=True)
class Vertex:
    """Vértice con su conjunto maximal de filas activas"""
    point: RatVector
    tight: FrozenSet[int]


@dataclass(frozen=True)
class RedundancyReport:
    """Filas esenciales y filas nulas clasificadas por su lado derecho"""
    essential: FrozenSet[int]
    trivial_satisfied: FrozenSet[int]
    trivial_violated: FrozenSet[int]


def is_bounded(a: RatMatrix) -> bool:
    """{x : A x >= 0} = {0}: maximiza cada ±x_j sobre el cono de recesión cortado por una caja"""
    n = a.ncols
    ge_rows = [list(row) for row in a.entries]
    ge_rhs = [Fraction(0)] * a.nrows
    for j in range(n):
        unit = [Fraction(1 if k == j else 0) for k in range(n)]
        ge_rows.append(unit)
        ge_rhs.append(Fraction(-1))
        ge_rows.append([-u for u in unit])
        ge_rhs.append(Fraction(-1))
    for j in range(n):
        for sign in (1, -1):
            costs = [Fraction(sign if k == j else 0) for k in range(n)]
            result = maximize(costs, ge_rows=ge_rows, ge_rhs=ge_rhs)
            if result.status != OPTIMAL or result.value > 0:
                return False
    return True


class HPolytope:
    """
    Politopo {x en Q^n : A x >= b}.

    Los cachés (vértices, dimensión, filas esenciales) se calculan una vez;
    el objeto es inmutable.
    """

    def __init__(self, a: RatMatrix, b: Sequence, bounded: Optional[bool] = None):
        rhs = to_vector(b)
        if len(rhs) != a.nrows:
            raise DimensionMismatchError(f"A tiene {a.nrows} filas y b tiene {len(rhs)} entradas")
        self.a = a
        self.b: RatVector = rhs
        self._bounded = bounded

    def __repr__(self) -> str:
        return f"HPolytope(n={self.a.ncols}, p={self.a.nrows})"

    @property
    def ncols(self) -> int:
        return self.a.ncols

    @property
    def nrows(self) -> int:
        return self.a.nrows

    @property
    def bounded(self) -> bool:
        if self._bounded is None:
            self._bounded = is_bounded(self.a)
        return self._bounded

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(v >= bi for v, bi in zip(self.a.apply(x), self.b))

    def tight_rows(self, x: Sequence[Fraction]) -> FrozenSet[int]:
        return frozenset(i for i, (v, bi) in enumerate(zip(self.a.apply(x), self.b)) if v == bi)

    @cached_property
    def vertices(self) -> Tuple[Vertex, ...]:
        if not self.bounded:
            raise UnboundedPolytopeError("La enumeración de vértices requiere un poliedro acotado")
        n = self.ncols
        found = {}
        for subset in combinations(range(self.nrows), n):
            sub = self.a.submatrix(subset)
            sol = solve_affine(sub, [self.b[i] for i in subset])
            if not sol.unique:
                continue
            x = sol.solution
            if x in found or not self.contains(x):
                continue
            found[x] = self.tight_rows(x)
        return tuple(Vertex(x, found[x]) for x in sorted(found))

    @property
    def is_empty(self) -> bool:
        if self.bounded:
            return not self.vertices
        return not face_nonempty(self, FaceQuery(frozenset()), strict=False)

    @cached_property
    def implicit_equalities(self) -> FrozenSet[int]:
        """Filas activas sobre todo P"""
        verts = self.vertices
        if not verts:
            raise EmptyPolytopeError("Politopo vacío: no hay igualdades implícitas")
        common = set(verts[0].tight)
        for v in verts[1:]:
            common &= v.tight
        return frozenset(common)

    @cached_property
    def dimension(self) -> int:
        """Dimensión afín; -1 si está vacío"""
        if not self.vertices:
            return -1
        return affine_dimension([v.point for v in self.vertices])

    @cached_property
    def face_tight_sets(self) -> FrozenSet[FrozenSet[int]]:
        """
        Conjuntos {i : A_i x = b_i} de los puntos x de P.

        Es la clausura por intersección de los conjuntos activos de los vértices.
        """
        sets = {v.tight for v in self.vertices}
        frontier = set(sets)
        while frontier:
            new = set()
            for s in frontier:
                for t in sets:
                    u = s & t
                    if u not in sets:
                        new.add(u)
            sets |= new
            frontier = new
        return frozenset(sets)

    def face_vertices(self, indices: Iterable[int]) -> List[Vertex]:
        idx = frozenset(indices)
        return [v for v in self.vertices if idx <= v.tight]

    def face_dimension(self, indices: Iterable[int]) -> int:
        verts = self.face_vertices(indices)
        if not verts:
            return -1
        return affine_dimension([v.point for v in verts])


def affine_dimension(points: Sequence[Sequence[Fraction]]) -> int:
    if not points:
        return -1
    base = points[0]
    diffs = [tuple(p - q for p, q in zip(pt, base)) for pt in points[1:]]
    if not diffs:
        return 0
    return RatMatrix(tuple(diffs), len(base)).rank()


def _as_indices(query: Union[FaceQuery, Iterable[int]], nrows: int) -> FrozenSet[int]:
    indices = query.indices if isinstance(query, FaceQuery) else frozenset(query)
    for i in indices:
        if not 0 <= i < nrows:
            raise ValidationError(f"Índice de fila {i} fuera de rango (p={nrows})")
    return indices


def face_nonempty(polytope: HPolytope, query: Union[FaceQuery, Iterable[int]], strict: bool) -> bool:
    """
    ¿Existe x con A_I x = b_I y A_Ī x >= b_Ī (estricto: A_Ī x > b_Ī)?

    El caso estricto resuelve max t con A_Ī x - t >= b_Ī, t <= 1 y contesta t > 0.
    """
    indices = _as_indices(query, polytope.nrows)
    n = polytope.ncols
    inside = sorted(indices)
    outside = [i for i in range(polytope.nrows) if i not in indices]
    a, b = polytope.a, polytope.b
    if not strict:
        result = maximize(
            [Fraction(0)] * n,
            eq_rows=[a.row(i) for i in inside],
            eq_rhs=[b[i] for i in inside],
            ge_rows=[a.row(i) for i in outside],
            ge_rhs=[b[i] for i in outside],
        )
        return result.feasible
    zero = Fraction(0)
    eq_rows = [tuple(a.row(i)) + (zero,) for i in inside]
    ge_rows = [tuple(a.row(i)) + (Fraction(-1),) for i in outside]
    ge_rows.append(tuple([zero] * n) + (Fraction(-1),))
    ge_rhs = [b[i] for i in outside] + [Fraction(-1)]
    costs = [zero] * n + [Fraction(1)]
    result = maximize(costs, eq_rows, [b[i] for i in inside], ge_rows, ge_rhs)
    return result.optimal and result.value > 0


def vertices(polytope: HPolytope) -> List[Vertex]:
    """Vértices ordenados lexicográficamente, con su conjunto activo"""
    return list(polytope.vertices)


def nonredundant_rows(polytope: HPolytope) -> RedundancyReport:
    """
    Filas cuya eliminación agranda estrictamente P.

    Para cada fila no nula i se minimiza A_i x sobre las demás restricciones:
    la fila es esencial si el mínimo queda por debajo de b_i o no está acotado.
    """
    if polytope.is_empty:
        raise EmptyPolytopeError("nonredundant_rows requiere un politopo no vacío")
    a, b = polytope.a, polytope.b
    essential, satisfied, violated = set(), set(), set()
    for i in range(polytope.nrows):
        row = a.row(i)
        if all(v == 0 for v in row):
            (satisfied if b[i] <= 0 else violated).add(i)
            continue
        others = [j for j in range(polytope.nrows) if j != i]
        result = maximize(
            [-v for v in row],
            ge_rows=[a.row(j) for j in others],
            ge_rhs=[b[j] for j in others],
        )
        if result.status == UNBOUNDED or -result.value < b[i]:
            essential.add(i)
    return RedundancyReport(frozenset(essential), frozenset(satisfied), frozenset(violated))


def drop_rows(polytope: HPolytope, indices: Iterable[int]) -> HPolytope:
    """Copia de P sin las filas dadas"""
    skip = set(indices)
    keep = [i for i in range(polytope.nrows) if i not in skip]
    return HPolytope(polytope.a.submatrix(keep), [polytope.b[i] for i in keep])
