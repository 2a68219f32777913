# core/family.py
"""
Familia biparamétrica de polítopos P(δ, ε) = {x : A x >= B + δ(B' - B) + ε C}.

Contiene relaciones y rectas portadoras, las regiones Ω_I / ω_I obtenidas
por proyección de Fourier-Motzkin, la clasificación de puntos en
U2 / U1 / U0 / U0', la verificación de genericidad de (B, B') y la
descomposición en celdas de Ω_∅ dentro de una franja.

Los conjuntos de índices de este módulo usan los ids de fila 1..p.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed
from tqdm import tqdm

from config.settings import DEFAULT_CONFIG, EngineConfig, StripConfig
from core.errors import (
    DimensionMismatchError,
    GenericityError,
    NoCarrierError,
    UnboundedPolytopeError,
)
from core.exactnum import RatMatrix, RatVector, circuits, left_kernel_basis, solve_affine, to_rat, to_vector
from core.horo import (
    DivisorCoeffs,
    EmbeddingData,
    VarietyDescriptor,
    is_qfactorial,
    picard_number,
    variety_from_polytope,
    weight_offset,
)
from core.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, maximize
from core.planar import ConvexPolygon, HalfPlane, Line, Point, polygons_adjacent, sub
from core.polytope import HPolytope, face_nonempty
from utils.logger import LogContext, setup_logger

logger = setup_logger(__name__)

OUTSIDE = "Outside"
U2 = "U2"
U1 = "U1"
U0 = "U0"
U0_PRIME = "U0prime"

IndexSet = FrozenSet[int]


def index_key(indices: Iterable[int]) -> Tuple[int, Tuple[int, ...]]:
    """Orden canónico de conjuntos: primero por tamaño, luego lexicográfico"""
    ids = tuple(sorted(indices))
    return (len(ids), ids)


@dataclass(frozen=True)
class Label:
    """Nombre de una variedad esperada y un punto de muestra (δ, ε)"""
    name: str
    point: Point


class TwoParamFamily:
    """
    Datos (A, B, B', C) de la familia.

    B y B' guardan los coeficientes de divisor con signo cambiado; C es la
    columna anticanónica del encaje. Los polítopos y clasificaciones por
    punto se guardan en caché.
    """

    def __init__(
        self,
        embedding: EmbeddingData,
        b: Sequence,
        b_prime: Sequence,
        labels: Iterable[Label] = (),
        strip: Optional[StripConfig] = None,
        name: str = "familia",
    ):
        self.embedding = embedding
        self.b: RatVector = to_vector(b)
        self.b_prime: RatVector = to_vector(b_prime)
        p = len(embedding.rows)
        if len(self.b) != p or len(self.b_prime) != p:
            raise DimensionMismatchError(
                f"B y B' deben tener {p} entradas (tienen {len(self.b)} y {len(self.b_prime)})"
            )
        if not embedding.bounded:
            raise UnboundedPolytopeError("La matriz A no cumple la condición de acotación")
        self.c: RatVector = embedding.anticanonical
        self.direction: RatVector = tuple(bp - b0 for b0, bp in zip(self.b, self.b_prime))
        self.labels: Tuple[Label, ...] = tuple(labels)
        self.strip = strip
        self.name = name
        self._polytopes: Dict[Point, HPolytope] = {}
        self._classes: Dict[Point, "PointClass"] = {}
        self._carriers: Dict[IndexSet, "Carrier"] = {}
        self._label_varieties: Optional[List[Tuple[str, VarietyDescriptor]]] = None
        self._circuits: Optional[Tuple[IndexSet, ...]] = None

    def __repr__(self) -> str:
        return f"TwoParamFamily({self.name!r}, n={self.a.ncols}, p={self.p})"

    @property
    def a(self) -> RatMatrix:
        return self.embedding.matrix

    @property
    def p(self) -> int:
        return self.a.nrows

    @property
    def ids(self) -> Tuple[int, ...]:
        return self.embedding.ids

    def rhs(self, delta, epsilon) -> RatVector:
        delta, epsilon = to_rat(delta), to_rat(epsilon)
        return tuple(
            b0 + delta * d + epsilon * c for b0, d, c in zip(self.b, self.direction, self.c)
        )

    def polytope(self, delta, epsilon) -> HPolytope:
        point = (to_rat(delta), to_rat(epsilon))
        if point not in self._polytopes:
            self._polytopes[point] = HPolytope(self.a, self.rhs(*point), bounded=True)
        return self._polytopes[point]

    def divisor(self, delta, epsilon) -> DivisorCoeffs:
        return DivisorCoeffs.from_rhs(self.rhs(delta, epsilon))

    def variety_at(self, point: Point) -> VarietyDescriptor:
        divisor = self.divisor(*point)
        return variety_from_polytope(
            self.embedding, self.polytope(*point), weight_offset(self.embedding, divisor)
        )

    def submatrix(self, indices: Iterable[int]) -> RatMatrix:
        return self.a.submatrix([i - 1 for i in sorted(indices)])

    def codimension(self, indices: Iterable[int]) -> int:
        """codim de Im(A_I) en Q^|I|"""
        ids = sorted(indices)
        if not ids:
            return 0
        return len(ids) - self.submatrix(ids).rank()

    @property
    def circuits(self) -> Tuple[IndexSet, ...]:
        if self._circuits is None:
            self._circuits = tuple(frozenset(i + 1 for i in c) for c in circuits(self.a))
        return self._circuits

    def name_of(self, variety: Optional[VarietyDescriptor]) -> str:
        """Primera etiqueta con descriptor igual o, si no hay, un resumen canónico"""
        if variety is None:
            return "-"
        if self._label_varieties is None:
            self._label_varieties = []
            for label in self.labels:
                if self.polytope(*label.point).is_empty:
                    logger.warning(f"La etiqueta {label.name} cae fuera de Ω_∅: {label.point}")
                    continue
                self._label_varieties.append((label.name, self.variety_at(label.point)))
        for name, descriptor in self._label_varieties:
            if descriptor == variety:
                return name
        return variety.summary()


# --- Relaciones y portadoras ---

@dataclass(frozen=True)
class Relation:
    """
    Relación Σ λ_i A_i = 0 con su recta a·ε + b·δ + c = 0.

    a = Σλ C, b = Σλ (B' - B), c = Σλ B. Se normaliza a = 1 si es posible,
    si no b = 1; con a = b = 0 el primer coeficiente vale 1.
    """
    support: Tuple[int, ...]
    coefficients: Tuple[Fraction, ...]
    a: Fraction
    b: Fraction
    c: Fraction

    def coefficient(self, row_id: int) -> Fraction:
        for i, lam in zip(self.support, self.coefficients):
            if i == row_id:
                return lam
        return Fraction(0)

    @property
    def plus(self) -> IndexSet:
        return frozenset(i for i, lam in zip(self.support, self.coefficients) if lam > 0)

    @property
    def minus(self) -> IndexSet:
        return frozenset(i for i, lam in zip(self.support, self.coefficients) if lam < 0)

    @property
    def one_sided(self) -> bool:
        return not self.plus or not self.minus

    @property
    def line(self) -> Optional[Line]:
        if self.a == 0 and self.b == 0:
            return None
        return Line.normalized(self.a, self.b, self.c)

    @property
    def slope(self) -> Optional[Fraction]:
        """sl = b / a; la pendiente geométrica dε/dδ es -sl"""
        if self.a == 0:
            return None
        return self.b / self.a

    def value(self, point: Point) -> Fraction:
        return self.a * point[1] + self.b * point[0] + self.c


def make_relation(family: TwoParamFamily, ids: Sequence[int], lam: Sequence[Fraction]) -> Relation:
    """Normaliza λ sobre las filas `ids` y descarta los coeficientes nulos"""
    a = sum((l * family.c[i - 1] for i, l in zip(ids, lam)), Fraction(0))
    b = sum((l * family.direction[i - 1] for i, l in zip(ids, lam)), Fraction(0))
    c = sum((l * family.b[i - 1] for i, l in zip(ids, lam)), Fraction(0))
    if a != 0:
        scale = 1 / a
    elif b != 0:
        scale = 1 / b
    else:
        scale = 1 / next(l for l in lam if l != 0)
    pairs = [(i, l * scale) for i, l in zip(ids, lam) if l != 0]
    return Relation(
        support=tuple(i for i, _ in pairs),
        coefficients=tuple(l for _, l in pairs),
        a=a * scale,
        b=b * scale,
        c=c * scale,
    )


@dataclass(frozen=True)
class Carrier:
    """Subespacio afín D_I^{-1}(Im A_I) del plano (δ, ε)"""
    indices: IndexSet
    relations: Tuple[Relation, ...]
    dimension: int
    point: Optional[Point] = None
    line: Optional[Line] = None

    def contains(self, point: Point) -> bool:
        if self.dimension < 0:
            return False
        return all(r.value(point) == 0 for r in self.relations)


def carrier_line(family: TwoParamFamily, indices: Iterable[int]) -> Carrier:
    """
    Recta (o punto) portadora de I.

    Raises:
        NoCarrierError: si A_I es sobreyectiva
    """
    key = frozenset(indices)
    cached = family._carriers.get(key)
    if cached is not None:
        return cached
    ids = sorted(key)
    kernel = left_kernel_basis(family.submatrix(ids)) if ids else []
    if not kernel:
        raise NoCarrierError(f"A_I es sobreyectiva para I = {ids}")
    relations = tuple(make_relation(family, ids, lam) for lam in kernel)
    system = RatMatrix.from_rows([(r.b, r.a) for r in relations], 2)
    solution = solve_affine(system, [-r.c for r in relations])
    if not solution.consistent:
        carrier = Carrier(key, relations, -1)
    else:
        dim = len(solution.kernel)
        point = solution.solution if dim == 0 else None
        line = next((r.line for r in relations if r.line is not None), None) if dim == 1 else None
        carrier = Carrier(key, relations, dim, point, line)
    family._carriers[key] = carrier
    return carrier


def arrangement_lines(family: TwoParamFamily) -> List[Line]:
    """Rectas portadoras distintas de todos los circuitos"""
    lines: List[Line] = []
    for circuit in sorted(family.circuits, key=index_key):
        carrier = carrier_line(family, circuit)
        if carrier.dimension == 1 and carrier.line not in lines:
            lines.append(carrier.line)
    return lines


# --- Regiones por Fourier-Motzkin ---

@dataclass(frozen=True)
class Region:
    """
    Ω_I como semiplanos y rectas en (δ, ε), junto con la dimensión de ω_I.

    omega_dim vale -1 si ω_I es vacío.
    """
    indices: IndexSet
    inequalities: Tuple[HalfPlane, ...]
    equalities: Tuple[Line, ...]
    empty: bool
    carrier_dim: int
    omega_dim: int
    sample: Optional[Point] = None

    def contains(self, point: Point) -> bool:
        if self.empty:
            return False
        return all(h.contains(point) for h in self.inequalities) and all(
            line.contains(point) for line in self.equalities
        )

    def polygon(self, box: ConvexPolygon) -> ConvexPolygon:
        """Ω_I recortado por una caja"""
        if self.empty:
            return ConvexPolygon(())
        poly = box
        for half in self.inequalities:
            poly = poly.clip(half)
        for line in self.equalities:
            poly = poly.clip(HalfPlane(line.a, line.b, line.c)).clip(HalfPlane(-line.a, -line.b, -line.c))
        return poly


def _lift_rows(family: TwoParamFamily) -> List[List[Fraction]]:
    """Filas [A_i | -(B'-B)_i | -C_i | -B_i]: la fila i vale A_i x - δ dir_i - ε C_i - B_i"""
    return [
        list(family.a.row(i)) + [-family.direction[i], -family.c[i], -family.b[i]]
        for i in range(family.p)
    ]


def _combine(row: List[Fraction], pivot: List[Fraction], j: int) -> List[Fraction]:
    factor = row[j] / pivot[j]
    return [u - factor * v for u, v in zip(row, pivot)]


def _tidy(rows: List[List[Fraction]]) -> Tuple[List[List[Fraction]], bool]:
    """Escala por el máximo coeficiente no constante, descarta filas constantes y duplicados"""
    out: List[List[Fraction]] = []
    seen = set()
    for row in rows:
        scale = max(abs(v) for v in row[:-1])
        if scale == 0:
            if row[-1] < 0:
                return [], True
            continue
        normalized = tuple(v / scale for v in row)
        if normalized not in seen:
            seen.add(normalized)
            out.append(list(normalized))
    return out, False


def _prune(rows: List[List[Fraction]], eqs: List[List[Fraction]]) -> Optional[List[List[Fraction]]]:
    """Quita las filas implicadas por las demás; None si el sistema es infactible"""
    kept = list(rows)
    eq_rows = [e[:-1] for e in eqs]
    eq_rhs = [-e[-1] for e in eqs]
    i = 0
    while i < len(kept):
        row = kept[i]
        others = kept[:i] + kept[i + 1:]
        result = maximize(
            [-v for v in row[:-1]],
            eq_rows=eq_rows,
            eq_rhs=eq_rhs,
            ge_rows=[o[:-1] for o in others],
            ge_rhs=[-o[-1] for o in others],
        )
        if result.status == INFEASIBLE:
            return None
        if result.status == OPTIMAL and row[-1] - result.value >= 0:
            kept.pop(i)
            continue
        i += 1
    return kept


def _bounding_box(inequalities: Sequence[HalfPlane], equalities: Sequence[Line]) -> ConvexPolygon:
    """Caja que contiene todos los cortes e intersecciones de las rectas frontera"""
    boundaries = [h.boundary() for h in inequalities if not h.trivial] + list(equalities)
    coords = [Fraction(0)]
    for line in boundaries:
        if line.a != 0:
            coords.append(line.c / line.a)
        if line.b != 0:
            coords.append(line.c / line.b)
    for first, second in combinations(boundaries, 2):
        point = first.intersect(second)
        if point is not None:
            coords.extend(point)
    radius = 2 * (1 + max(abs(v) for v in coords))
    return ConvexPolygon.box(-radius, radius, -radius, radius)


def region(family: TwoParamFamily, indices: Iterable[int]) -> Region:
    """
    Proyección exacta de {(x, δ, ε) : A_I x = D_I, A x >= D} sobre (δ, ε).

    Primero se sustituyen las igualdades de I por eliminación gaussiana;
    después cada coordenada restante de x se elimina por Fourier-Motzkin,
    podando por programación lineal las desigualdades implicadas.
    """
    key = frozenset(indices)
    n = family.a.ncols
    lifted = _lift_rows(family)
    eqs = [lifted[i - 1] for i in sorted(key)]
    ineqs = [lifted[i] for i in range(family.p) if i + 1 not in key]

    def empty_region() -> Region:
        return Region(key, (), (), True, _carrier_dimension(family, key), -1)

    for j in range(n):
        pivot_pos = next((k for k, e in enumerate(eqs) if e[j] != 0), None)
        if pivot_pos is None:
            continue
        pivot = eqs.pop(pivot_pos)
        eqs = [_combine(e, pivot, j) if e[j] != 0 else e for e in eqs]
        ineqs = [_combine(r, pivot, j) if r[j] != 0 else r for r in ineqs]

    # igualdades sin x: la portadora
    if any(all(v == 0 for v in e[:-1]) and e[-1] != 0 for e in eqs):
        return empty_region()
    eqs, _ = _tidy(eqs)

    for j in range(n):
        pos = [r for r in ineqs if r[j] > 0]
        neg = [r for r in ineqs if r[j] < 0]
        zero = [r for r in ineqs if r[j] == 0]
        if not pos or not neg:
            ineqs = zero
        else:
            ineqs = zero + [
                [-q[j] * u + p[j] * v for u, v in zip(p, q)] for p in pos for q in neg
            ]
        ineqs, empty = _tidy(ineqs)
        if empty:
            return empty_region()
        pruned = _prune(ineqs, eqs)
        if pruned is None:
            return empty_region()
        ineqs = pruned

    final = maximize(
        [Fraction(0)] * (n + 2),
        eq_rows=[e[:-1] for e in eqs],
        eq_rhs=[-e[-1] for e in eqs],
        ge_rows=[r[:-1] for r in ineqs],
        ge_rhs=[-r[-1] for r in ineqs],
    )
    if not final.feasible:
        return empty_region()

    inequalities = tuple(HalfPlane.normalized(r[n + 1], r[n], r[n + 2]) for r in ineqs)
    equalities: List[Line] = []
    for e in eqs:
        line = Line.normalized(e[n + 1], e[n], e[n + 2])
        if line not in equalities:
            equalities.append(line)

    carrier_dim = _carrier_dimension(family, key)
    box = _bounding_box(inequalities, equalities)
    draft = Region(key, inequalities, tuple(equalities), False, carrier_dim, -1)
    poly = draft.polygon(box)
    omega_dim, sample = -1, None
    if not poly.is_empty and poly.dimension >= carrier_dim:
        centroid = poly.centroid()
        if omega_contains(family, key, centroid):
            omega_dim, sample = carrier_dim, centroid
    return Region(key, inequalities, tuple(equalities), False, carrier_dim, omega_dim, sample)


def _carrier_dimension(family: TwoParamFamily, indices: IndexSet) -> int:
    if not indices or family.codimension(indices) == 0:
        return 2
    return carrier_line(family, indices).dimension


def omega_contains(family: TwoParamFamily, indices: Iterable[int], point: Point) -> bool:
    """(δ, ε) ∈ ω_I: la cara F_I es no vacía y maximal para I"""
    return face_nonempty(family.polytope(*point), [i - 1 for i in indices], strict=True)


def big_omega_contains(family: TwoParamFamily, indices: Iterable[int], point: Point) -> bool:
    """(δ, ε) ∈ Ω_I: la cara F_I es no vacía"""
    return face_nonempty(family.polytope(*point), [i - 1 for i in indices], strict=False)


def omega_nonempty(
    family: TwoParamFamily,
    indices: Iterable[int],
    delta_range: Optional[Tuple[Fraction, Fraction]] = None,
) -> Optional[Point]:
    """
    Un testigo de ω_I con δ en el rango dado, o None.

    Maximiza t sujeto a A_I x = D_I, A_j x - t >= D_j y t <= 1 en las
    variables (x, δ, ε, t).
    """
    key = frozenset(indices)
    n = family.a.ncols
    zero, one = Fraction(0), Fraction(1)
    eq_rows, eq_rhs, ge_rows, ge_rhs = [], [], [], []
    for i in range(family.p):
        row = list(family.a.row(i)) + [-family.direction[i], -family.c[i]]
        if i + 1 in key:
            eq_rows.append(row + [zero])
            eq_rhs.append(family.b[i])
        else:
            ge_rows.append(row + [-one])
            ge_rhs.append(family.b[i])
    ge_rows.append([zero] * (n + 2) + [-one])
    ge_rhs.append(-one)
    if delta_range is not None:
        low, high = delta_range
        unit = [zero] * n + [one, zero, zero]
        ge_rows.append(unit)
        ge_rhs.append(to_rat(low))
        ge_rows.append([-v for v in unit])
        ge_rhs.append(-to_rat(high))
    costs = [zero] * (n + 2) + [one]
    result = maximize(costs, eq_rows, eq_rhs, ge_rows, ge_rhs)
    if not result.optimal or result.value <= 0:
        return None
    return (result.point[n], result.point[n + 1])


def epsilon_max(family: TwoParamFamily, delta) -> Optional[Fraction]:
    """Máximo ε con P(δ, ε) no vacío; None si no está acotado"""
    delta = to_rat(delta)
    n = family.a.ncols
    ge_rows = [list(family.a.row(i)) + [-family.c[i]] for i in range(family.p)]
    ge_rhs = [family.b[i] + delta * family.direction[i] for i in range(family.p)]
    result = maximize([Fraction(0)] * n + [Fraction(1)], ge_rows=ge_rows, ge_rhs=ge_rhs)
    if result.status == UNBOUNDED or not result.optimal:
        return None
    return result.value


# --- Estratos y clasificación de puntos ---

@dataclass(frozen=True)
class Stratum:
    """Un conjunto I con (δ, ε) ∈ ω_I y la dimensión de ω_I"""
    indices: IndexSet
    dimension: int


def strata_at(family: TwoParamFamily, delta, epsilon) -> Tuple[Stratum, ...]:
    """
    Todos los I con (δ, ε) ∈ ω_I.

    Son los conjuntos activos de los puntos de P(δ, ε), es decir la
    clausura por intersección de los conjuntos activos de sus vértices.
    """
    polytope = family.polytope(delta, epsilon)
    if polytope.is_empty:
        return ()
    strata = []
    for tight in polytope.face_tight_sets:
        ids = frozenset(i + 1 for i in tight)
        strata.append(Stratum(ids, _carrier_dimension(family, ids)))
    return tuple(sorted(strata, key=lambda s: index_key(s.indices)))


@dataclass(frozen=True)
class PointClass:
    """Clase de un punto: Outside, U2 (con variedad), U1 (I minimal), U0 (L minimal) o U0prime"""
    point: Point
    kind: str
    variety: Optional[VarietyDescriptor] = None
    indices: Optional[IndexSet] = None
    strata: Tuple[Stratum, ...] = ()

    @property
    def on_boundary(self) -> bool:
        """El punto está en Ω_∅ pero no en ω_∅"""
        return self.kind != OUTSIDE and all(s.indices for s in self.strata)


def classify_point(family: TwoParamFamily, delta, epsilon) -> PointClass:
    point = (to_rat(delta), to_rat(epsilon))
    cached = family._classes.get(point)
    if cached is not None:
        return cached
    strata = strata_at(family, *point)
    if not strata:
        result = PointClass(point, OUTSIDE)
    else:
        variety = family.variety_at(point)
        low = [s for s in strata if s.dimension < 2]
        if not low:
            result = PointClass(point, U2, variety, None, strata)
        else:
            zero_dim = [s for s in low if s.dimension <= 0]
            if zero_dim:
                minimal = min(zero_dim, key=lambda s: index_key(s.indices))
                result = PointClass(point, U0, variety, minimal.indices, strata)
            else:
                lines = {carrier_line(family, s.indices).line for s in low}
                if len(lines) == 1:
                    minimal = min(low, key=lambda s: index_key(s.indices))
                    result = PointClass(point, U1, variety, minimal.indices, strata)
                else:
                    result = PointClass(point, U0_PRIME, variety, None, strata)
    family._classes[point] = result
    return result


def classify_points(
    family: TwoParamFamily,
    points: Iterable[Point],
    config: Optional[EngineConfig] = None,
    desc: str = "Clasificando puntos",
) -> List[PointClass]:
    """Clasifica una lista de puntos, en paralelo con joblib si n_jobs > 1"""
    compute = (config or DEFAULT_CONFIG).compute
    points = list(points)
    progress = tqdm(points, desc=desc, disable=not compute.show_progress)
    if compute.n_jobs > 1 and len(points) > 1:
        results = Parallel(n_jobs=compute.n_jobs)(
            delayed(classify_point)(family, d, e) for d, e in progress
        )
        for result in results:
            family._classes.setdefault(result.point, result)
        return list(results)
    return [classify_point(family, d, e) for d, e in progress]


# --- Genericidad ---

PLANE = "plane"
DIMENSION = "dimension"
COLLINEAR = "collinear"
POINTS = "points"
INCIDENCE = "incidence"
TRIPLE = "triple"


@dataclass(frozen=True)
class Violation:
    """Una condición de genericidad que falla, con los conjuntos implicados"""
    kind: str
    sets: Tuple[Tuple[int, ...], ...]
    detail: str


@dataclass(frozen=True)
class GenericityReport:
    violations: Tuple[Violation, ...]
    circuits: Tuple[Tuple[int, ...], ...]
    nonempty: Tuple[Tuple[int, ...], ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def resolve_strip(family: TwoParamFamily, strip: Optional[StripConfig], config: Optional[EngineConfig] = None) -> StripConfig:
    if strip is not None:
        return strip
    if family.strip is not None:
        return family.strip
    return (config or DEFAULT_CONFIG).strip


def _sorted_tuple(indices: Iterable[int]) -> Tuple[int, ...]:
    return tuple(sorted(indices))


def check_genericity(family: TwoParamFamily, strip: Optional[StripConfig] = None) -> GenericityReport:
    """
    Verifica que (B, B') sea genérico sobre los circuitos y sus uniones dos a dos.

    Las condiciones de segmentos, puntos, incidencias y triples se
    comprueban dentro de la franja de δ.
    """
    strip = resolve_strip(family, strip)
    delta_range = (strip.delta_min, strip.delta_max)
    violations: List[Violation] = []

    stacked = RatMatrix(
        tuple(family.a.row(i) + (family.c[i], family.direction[i]) for i in range(family.p)),
        family.a.ncols + 2,
    )
    if stacked.rank() != family.a.rank() + 2:
        violations.append(Violation(PLANE, (), "C y B' - B no generan un plano fuera de Im(A)"))

    circuit_sets = sorted(family.circuits, key=index_key)
    nonempty = [c for c in circuit_sets if omega_nonempty(family, c, delta_range) is not None]
    logger.debug(f"{len(circuit_sets)} circuitos, {len(nonempty)} con ω no vacío en la franja")

    unions = set(circuit_sets) | {c1 | c2 for c1, c2 in combinations(circuit_sets, 2)}
    point_sets: Dict[Point, List[IndexSet]] = {}
    for union in sorted(unions, key=index_key):
        codim = family.codimension(union)
        allowed = max(0, 2 - codim) if codim <= 2 else -1
        carrier = carrier_line(family, union)
        if carrier.dimension > allowed and omega_nonempty(family, union, delta_range) is not None:
            violations.append(Violation(
                DIMENSION, (_sorted_tuple(union),),
                f"ω_I tiene dimensión {carrier.dimension} con codimensión {codim}",
            ))
        if codim == 2 and carrier.dimension == 0:
            pt = carrier.point
            if strip.delta_min <= pt[0] <= strip.delta_max and omega_contains(family, union, pt):
                point_sets.setdefault(pt, []).append(union)

    # I != J circuitos: I ∩ J es independiente y ω_{I∩J} nunca es un segmento
    lines: Dict[Line, List[IndexSet]] = {}
    for c in nonempty:
        carrier = carrier_line(family, c)
        if carrier.dimension == 1:
            lines.setdefault(carrier.line, []).append(c)
    for group in lines.values():
        if len(group) > 1:
            violations.append(Violation(
                COLLINEAR, tuple(_sorted_tuple(c) for c in group), "circuitos distintos sobre la misma recta",
            ))

    minimal_points: Dict[Point, IndexSet] = {}
    for pt, sets in sorted(point_sets.items()):
        minimal = [s for s in sets if not any(t < s for t in sets)]
        if len(set(minimal)) > 1:
            violations.append(Violation(
                POINTS, tuple(_sorted_tuple(s) for s in sorted(set(minimal), key=index_key)),
                f"varios ω_L puntuales coinciden en {pt}",
            ))
        minimal_points[pt] = min(minimal, key=index_key)

    line_circuits = [c for c in nonempty if carrier_line(family, c).dimension == 1]
    for pt, l_set in sorted(minimal_points.items()):
        for c in line_circuits:
            if c <= l_set or not carrier_line(family, c).contains(pt):
                continue
            if big_omega_contains(family, c, pt):
                violations.append(Violation(
                    INCIDENCE, (_sorted_tuple(c), _sorted_tuple(l_set)),
                    f"el segmento toca el punto {pt} sin estar contenido en L",
                ))

    crossings = set()
    for c1, c2 in combinations(line_circuits, 2):
        pt = carrier_line(family, c1).line.intersect(carrier_line(family, c2).line)
        if pt is not None and strip.delta_min <= pt[0] <= strip.delta_max:
            crossings.add(pt)
    for pt in sorted(crossings):
        if family.polytope(*pt).is_empty:
            continue
        incident = [
            c for c in line_circuits
            if carrier_line(family, c).contains(pt) and big_omega_contains(family, c, pt)
        ]
        if len(incident) < 3:
            continue
        for i, j, k in combinations(incident, 3):
            if not (i | j == i | k == j | k):
                violations.append(Violation(
                    TRIPLE, (_sorted_tuple(i), _sorted_tuple(j), _sorted_tuple(k)),
                    f"tres segmentos concurrentes en {pt} con uniones distintas",
                ))

    report = GenericityReport(
        tuple(violations),
        tuple(_sorted_tuple(c) for c in circuit_sets),
        tuple(_sorted_tuple(c) for c in nonempty),
    )
    if report.passed:
        logger.info(f"Genericidad verificada para {family.name}")
    else:
        logger.warning(f"{len(violations)} violaciones de genericidad en {family.name}")
    return report


# --- Descomposición ---

@dataclass(frozen=True)
class Cell:
    """Región conexa maximal de U2 con descriptor constante"""
    name: str
    variety: Optional[VarietyDescriptor]
    sample: Point
    pieces: Tuple[ConvexPolygon, ...]
    picard: Optional[int]


@dataclass(frozen=True)
class Wall:
    """Tramo de recta de U1 con un mismo I minimal"""
    indices: IndexSet
    relation: Relation
    start: Point
    end: Point
    sample: Point
    variety: Optional[VarietyDescriptor]
    on_boundary: bool


@dataclass(frozen=True)
class DecomposedPoint:
    point: Point
    kind: str
    indices: Optional[IndexSet]
    on_boundary: bool


@dataclass(frozen=True)
class Decomposition:
    polygon: ConvexPolygon
    cells: Tuple[Cell, ...]
    walls: Tuple[Wall, ...]
    points: Tuple[DecomposedPoint, ...]
    genericity: GenericityReport


def omega_region(family: TwoParamFamily, strip: Optional[StripConfig] = None) -> ConvexPolygon:
    """
    Ω_∅ recortado a la franja.

    Sin ε máximo explícito, el techo de la caja queda una unidad por
    encima del mayor ε alcanzable en la franja.
    """
    strip = resolve_strip(family, strip)
    base = region(family, frozenset())
    if base.empty:
        return ConvexPolygon(())
    top = strip.epsilon_max
    if top is None:
        deltas = {strip.delta_min, strip.delta_max}
        boundaries = [h.boundary() for h in base.inequalities if not h.trivial]
        for first, second in combinations(boundaries, 2):
            pt = first.intersect(second)
            if pt is not None and strip.delta_min <= pt[0] <= strip.delta_max:
                deltas.add(pt[0])
        values = [v for v in (epsilon_max(family, d) for d in sorted(deltas)) if v is not None]
        if not values:
            logger.warning(f"{family.name}: Ω_∅ no corta la franja {strip.delta_min} <= δ <= {strip.delta_max}")
            return ConvexPolygon(())
        top = max(values) + 1
    box = ConvexPolygon.box(strip.delta_min, strip.delta_max, strip.epsilon_min, top)
    return base.polygon(box)


def _split(polygon: ConvexPolygon, lines: Sequence[Line]) -> List[ConvexPolygon]:
    pieces = [polygon] if polygon.dimension == 2 else []
    for line in lines:
        nxt = []
        for piece in pieces:
            if piece.crossed_by(line):
                upper, lower = piece.split(line)
                nxt.extend(q for q in (upper, lower) if q.dimension == 2)
            else:
                nxt.append(piece)
        pieces = nxt
    return pieces


def _find(parent: List[int], i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def _cells(family: TwoParamFamily, pieces: List[ConvexPolygon], classes: List[PointClass]) -> List[Cell]:
    parent = list(range(len(pieces)))
    for i, j in combinations(range(len(pieces)), 2):
        if classes[i].kind != U2 or classes[j].kind != U2:
            continue
        if classes[i].variety == classes[j].variety and polygons_adjacent(pieces[i], pieces[j]):
            parent[_find(parent, i)] = _find(parent, j)
    groups: Dict[int, List[int]] = {}
    for i in range(len(pieces)):
        groups.setdefault(_find(parent, i), []).append(i)

    cells = []
    for members in groups.values():
        members.sort(key=lambda k: classes[k].point)
        first = classes[members[0]]
        if first.kind != U2:
            logger.warning(f"Centroide fuera de U2 en {first.point}: {first.kind}")
        variety = first.variety
        picard = picard_number(variety) if variety is not None and is_qfactorial(variety) else None
        cells.append(Cell(
            name=family.name_of(variety),
            variety=variety,
            sample=first.point,
            pieces=tuple(pieces[k] for k in members),
            picard=picard,
        ))
    return sorted(cells, key=lambda c: c.sample)


def _line_parameter(start: Point, direction: Point, point: Point) -> Fraction:
    d = direction
    return ((point[0] - start[0]) * d[0] + (point[1] - start[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])


def _walls(family: TwoParamFamily, polygon: ConvexPolygon, lines: Sequence[Line],
           config: Optional[EngineConfig]) -> List[Wall]:
    segments = []
    for line in lines:
        chord = polygon.chord(line)
        if chord is None or chord[0] == chord[1]:
            continue
        start, end = chord
        d = sub(end, start)
        params = {Fraction(0), Fraction(1)}
        for other in lines:
            if other == line:
                continue
            pt = line.intersect(other)
            if pt is None:
                continue
            t = _line_parameter(start, d, pt)
            if 0 < t < 1:
                params.add(t)
        cuts = sorted(params)
        points = [(start[0] + t * d[0], start[1] + t * d[1]) for t in cuts]
        segments.append(points)

    midpoints = []
    for points in segments:
        for p, q in zip(points, points[1:]):
            midpoints.append(((p[0] + q[0]) / 2, (p[1] + q[1]) / 2))
    breakpoints = [pt for points in segments for pt in points[1:-1]]
    classes = classify_points(family, midpoints + breakpoints, config, "Clasificando paredes")
    by_point = {c.point: c for c in classes}

    walls: List[Wall] = []
    for points in segments:
        run = None
        for p, q in zip(points, points[1:]):
            mid = by_point[((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)]
            if mid.kind != U1:
                run = None
                continue
            if run is not None and run["indices"] == mid.indices:
                shared = by_point[p]
                if shared.kind == U1 and shared.indices == mid.indices:
                    run["end"] = q
                    continue
            run = {"indices": mid.indices, "start": p, "end": q, "sample": mid}
            walls.append(run)
    result = []
    for run in walls:
        sample: PointClass = run["sample"]
        carrier = carrier_line(family, run["indices"])
        result.append(Wall(
            indices=run["indices"],
            relation=carrier.relations[0],
            start=run["start"],
            end=run["end"],
            sample=sample.point,
            variety=sample.variety,
            on_boundary=sample.on_boundary,
        ))
    return sorted(result, key=lambda w: (w.start, w.end))


def _points(family: TwoParamFamily, polygon: ConvexPolygon, lines: Sequence[Line],
            config: Optional[EngineConfig]) -> List[DecomposedPoint]:
    candidates = set()
    for first, second in combinations(lines, 2):
        pt = first.intersect(second)
        if pt is not None and polygon.contains(pt):
            candidates.add(pt)
    classes = classify_points(family, sorted(candidates), config, "Clasificando puntos")
    return [
        DecomposedPoint(c.point, c.kind, c.indices, c.on_boundary)
        for c in classes if c.kind in (U0, U0_PRIME)
    ]


def decompose(
    family: TwoParamFamily,
    strip: Optional[StripConfig] = None,
    config: Optional[EngineConfig] = None,
) -> Decomposition:
    """
    Descomposición de Ω_∅ en la franja: celdas de U2 con su variedad,
    paredes de U1 con su I minimal y puntos U0 / U0'.

    Raises:
        GenericityError: si (B, B') no es genérico
    """
    strip = resolve_strip(family, strip, config)
    with LogContext(logger, f"descomposición de {family.name}"):
        report = check_genericity(family, strip)
        if not report.passed:
            raise GenericityError(
                f"{family.name}: {len(report.violations)} violaciones de genericidad", report.violations
            )
        polygon = omega_region(family, strip)
        lines = arrangement_lines(family)
        pieces = _split(polygon, lines)
        logger.debug(f"{len(lines)} rectas portadoras, {len(pieces)} piezas")
        piece_classes = classify_points(family, [p.centroid() for p in pieces], config, "Clasificando celdas")
        cells = _cells(family, pieces, piece_classes)
        walls = _walls(family, polygon, lines, config)
        points = _points(family, polygon, lines, config)
        logger.info(f"{len(cells)} celdas, {len(walls)} paredes, {len(points)} puntos")
    return Decomposition(polygon, tuple(cells), tuple(walls), tuple(points), report)
