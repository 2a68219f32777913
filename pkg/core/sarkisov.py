# core/sarkisov.py
"""
Programa de Sarkisov biparamétrico.

La cadena poligonal de Mori (MPC) es la frontera superior de Ω_∅ en
0 <= δ <= 1. Cada punto U0 de la cadena ancla un eslabón: la partición
de rayos de su L da las paredes que salen del punto hacia el interior, y
los descriptores de los sectores entre ellas forman el diagrama del
eslabón.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import List, Optional, Sequence, Tuple

from joblib import Parallel, delayed
from tqdm import tqdm

from config.settings import DEFAULT_CONFIG, EngineConfig, StripConfig
from core.errors import GenericityError, HypothesisError, LinkError, SamplingError
from core.exactnum import RatMatrix, left_kernel_basis
from core.family import (
    U0,
    U1,
    U2,
    GenericityReport,
    IndexSet,
    PointClass,
    Relation,
    TwoParamFamily,
    arrangement_lines,
    carrier_line,
    check_genericity,
    classify_point,
    epsilon_max,
    omega_contains,
    omega_region,
    resolve_strip,
)
from core.horo import VarietyDescriptor, is_qfactorial, picard_number
from core.lp import maximize
from core.mmp import FLIP, ISOMORPHISM, HmmpRun, WallClassification, fibration_from, run_hmmp, verify_scaling, wall_from_sides
from core.planar import Line, Point, along, clearance, cross, max_norm, midpoint, rot90ccw, sub
from utils.logger import LogContext, setup_logger

logger = setup_logger(__name__)

TYPE_I = "I"
TYPE_II = "II"
TYPE_III = "III"
TYPE_IV_M = "IVm"
TYPE_IV_S = "IVs"


# --- Cadena poligonal de Mori ---

@dataclass(frozen=True)
class ChainSegment:
    """Tramo de la MPC con relación de un solo signo y base de la fibración"""
    start: Point
    end: Point
    indices: IndexSet
    relation: Relation
    sample: Point
    target: Optional[VarietyDescriptor]


@dataclass(frozen=True)
class ChainAnchor:
    point: Point
    indices: IndexSet
    kind: str
    corner: bool


@dataclass(frozen=True)
class MoriChain:
    segments: Tuple[ChainSegment, ...]
    anchors: Tuple[ChainAnchor, ...]

    @property
    def items(self) -> List[object]:
        """Tramos y anclas alternados en orden creciente de δ"""
        out: List[object] = []
        anchors = list(self.anchors)
        for segment in self.segments:
            while anchors and anchors[0].point <= segment.start:
                out.append(anchors.pop(0))
            out.append(segment)
        out.extend(anchors)
        return out


def _ray_reaches_below(family: TwoParamFamily, row_id: int, delta: Fraction) -> bool:
    """Existe ε < 0 con (δ, ε) ∈ ω_i: max t con ε <= -t y holgura t en las demás filas"""
    n = family.a.ncols
    zero, one = Fraction(0), Fraction(1)
    eq_rows, eq_rhs, ge_rows, ge_rhs = [], [], [], []
    for i in range(family.p):
        row = list(family.a.row(i)) + [-family.c[i]]
        rhs = family.b[i] + delta * family.direction[i]
        if i + 1 == row_id:
            eq_rows.append(row + [zero])
            eq_rhs.append(rhs)
        else:
            ge_rows.append(row + [-one])
            ge_rhs.append(rhs)
    ge_rows.append([zero] * n + [-one, -one])
    ge_rhs.append(zero)
    ge_rows.append([zero] * (n + 1) + [-one])
    ge_rhs.append(-one)
    result = maximize([zero] * (n + 1) + [one], eq_rows, eq_rhs, ge_rows, ge_rhs)
    return result.optimal and result.value > 0


def check_hypotheses(family: TwoParamFamily) -> List[str]:
    """
    Hipótesis de partida: (0,0) y (1,0) en ω_∅ y cada rayo alcanza ω_i con
    ε < 0 en δ = 0 y δ = 1. Devuelve los diagnósticos de las que fallan.
    """
    problems = []
    for corner in ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0))):
        if not omega_contains(family, (), corner):
            problems.append(f"El punto {corner} no está en ω_∅ (divisor no amplio)")
    for row_id in sorted(family.embedding.ray_ids):
        for delta in (Fraction(0), Fraction(1)):
            if not _ray_reaches_below(family, row_id, delta):
                problems.append(f"La fila {row_id} no alcanza ω_{row_id} con ε < 0 en δ = {delta}")
    return problems


def _unit_strip(family: TwoParamFamily, config: Optional[EngineConfig]) -> StripConfig:
    base = resolve_strip(family, None, config)
    return StripConfig(Fraction(0), Fraction(1), base.epsilon_min, None)


def _segment_line(start: Point, end: Point) -> Line:
    d = sub(end, start)
    return Line.normalized(d[0], -d[1], d[1] * start[0] - d[0] * start[1])


def mori_chain(
    family: TwoParamFamily,
    config: Optional[EngineConfig] = None,
    report: Optional[GenericityReport] = None,
) -> MoriChain:
    """
    Cadena poligonal de Mori con sus tramos y anclas.

    Raises:
        HypothesisError: si falla una hipótesis de partida
        GenericityError: si (B, B') no es genérico
        LinkError: si un tramo no tiene relación de un solo signo
    """
    problems = check_hypotheses(family)
    if problems:
        raise HypothesisError("; ".join(problems))
    strip = _unit_strip(family, config)
    if report is None:
        report = check_genericity(family, strip)
    if not report.passed:
        raise GenericityError(
            f"{family.name}: {len(report.violations)} violaciones de genericidad", report.violations
        )

    with LogContext(logger, f"cadena de Mori de {family.name}"):
        polygon = omega_region(family, strip)
        upper = sorted((q, p) for p, q in polygon.edges() if q[0] < p[0])
        lines = arrangement_lines(family)

        anchors = {}
        breaks: List[List[Point]] = []
        for start, end in upper:
            own = _segment_line(start, end)
            cuts = [start, end]
            for line in lines:
                if line == own:
                    continue
                pt = own.intersect(line)
                if pt is None or not start[0] < pt[0] < end[0]:
                    continue
                found = classify_point(family, *pt)
                if found.kind == U0:
                    anchors[pt] = ChainAnchor(pt, found.indices, found.kind, False)
                    cuts.append(pt)
            for corner in (start, end):
                if 0 < corner[0] < 1 and corner not in anchors:
                    found = classify_point(family, *corner)
                    if found.kind != U0:
                        logger.warning(f"Vértice de la cadena en {corner} clasificado como {found.kind}")
                    anchors[corner] = ChainAnchor(corner, found.indices, found.kind, True)
            breaks.append(sorted(set(cuts)))

        segments = []
        for cuts in breaks:
            for p, q in zip(cuts, cuts[1:]):
                mid = classify_point(family, *midpoint(p, q))
                if mid.kind != U1:
                    raise LinkError(f"El tramo de la cadena en {mid.point} no está en U1 ({mid.kind})")
                relation = carrier_line(family, mid.indices).relations[0]
                if not relation.one_sided:
                    raise LinkError(f"El tramo ω_{sorted(mid.indices)} no da una fibración")
                segments.append(ChainSegment(p, q, mid.indices, relation, mid.point, mid.variety))
        chain = MoriChain(tuple(segments), tuple(anchors[pt] for pt in sorted(anchors)))
        logger.info(f"Cadena de Mori: {len(chain.segments)} tramos, {len(chain.anchors)} anclas")
    return chain


# --- Partición de rayos ---

@dataclass(frozen=True)
class RayPartition:
    """
    Partición L = K⁰ ⊔ ... ⊔ K^{r+1} en un ancla de la cadena.

    `first` es la relación del tramo de la izquierda; `second` la del tramo
    de la derecha (vértice) o la relación auxiliar de L. Los ν van en orden
    decreciente con None = -∞; `rotated[0]` es None (+∞).
    """
    point: Point
    indices: IndexSet
    vertex: bool
    left: IndexSet
    right: IndexSet
    first: Relation
    second: Relation
    d: Fraction
    nus: Tuple[Optional[Fraction], ...]
    classes: Tuple[IndexSet, ...]
    complements: Tuple[IndexSet, ...]
    slopes: Tuple[Optional[Fraction], ...]
    rotated: Tuple[Optional[Fraction], ...]

    @property
    def interior(self) -> Tuple[int, ...]:
        """Índices s de los K_s cuyas paredes entran en Ω_∅"""
        last = len(self.complements) - 1 if self.vertex else len(self.complements)
        return tuple(range(1, last))


def _raw_relation(family: TwoParamFamily, ids: Sequence[int], lam: Sequence[Fraction]) -> Relation:
    pairs = [(i, l) for i, l in zip(ids, lam) if l != 0]
    return Relation(
        support=tuple(i for i, _ in pairs),
        coefficients=tuple(l for _, l in pairs),
        a=sum((l * family.c[i - 1] for i, l in pairs), Fraction(0)),
        b=sum((l * family.direction[i - 1] for i, l in pairs), Fraction(0)),
        c=sum((l * family.b[i - 1] for i, l in pairs), Fraction(0)),
    )


def _side_indices(family: TwoParamFamily, delta: Fraction, step: Fraction) -> Optional[Tuple[IndexSet, IndexSet]]:
    found = []
    for sign in (-1, 1):
        d = delta + sign * step
        top = epsilon_max(family, d)
        if top is None:
            return None
        cls = classify_point(family, d, top)
        if cls.kind != U1:
            return None
        found.append(cls.indices)
    return found[0], found[1]


def _adjacent_segments(
    family: TwoParamFamily, point: Point, config: Optional[EngineConfig], max_offset: Optional[Fraction]
) -> Tuple[IndexSet, IndexSet]:
    sampling = (config or DEFAULT_CONFIG).sampling
    h = sampling.initial_offset if max_offset is None else min(sampling.initial_offset, max_offset)
    for _ in range(sampling.max_halvings):
        current = _side_indices(family, point[0], h)
        if current is not None:
            step, stable = h, True
            for _ in range(sampling.stability_halvings):
                step /= 2
                if _side_indices(family, point[0], step) != current:
                    stable = False
                    break
            if stable:
                return current
        h /= 2
    raise SamplingError(f"No se encontraron los tramos vecinos del ancla {point}")


def _second_relation(family: TwoParamFamily, ids: List[int], first: Relation) -> List[Fraction]:
    """
    Relación auxiliar de L, no negativa sobre I y con ΣλC ∈ {0, 1}.

    De los dos representantes posibles se toma el que cumple
    a_I·d - Σλ(B' - B) < 0.
    """
    lam_i = [first.coefficient(h) for h in ids]
    basis = left_kernel_basis(family.submatrix(ids))
    mu = next(
        (list(v) for v in basis if RatMatrix.from_rows([v, lam_i], len(ids)).rank() == 2), None
    )
    if mu is None:
        raise LinkError(f"L = {ids} no tiene una segunda relación independiente")
    rel = _raw_relation(family, ids, mu)
    orientation = first.b * rel.a - rel.b
    if orientation == 0:
        raise LinkError(f"La segunda relación de L = {ids} es paralela a la de I")
    if orientation > 0:
        mu = [-v for v in mu]
    shift = max(
        [Fraction(0)] + [-m / l for m, l in zip(mu, lam_i) if l > 0]
    )
    mu = [m + shift * l for m, l in zip(mu, lam_i)]
    rel = _raw_relation(family, ids, mu)
    if rel.a > 0:
        mu = [m / rel.a for m in mu]
    elif rel.a < 0:
        mu = [m + (1 - rel.a) * l for m, l in zip(mu, lam_i)]
    else:
        mu = [m / abs(rel.b) for m in mu]
    return mu


def _rotated(a: Fraction, slope: Optional[Fraction]) -> Optional[Fraction]:
    if slope is None:
        return -a
    if slope == a:
        return None
    return (a * slope + 1) / (a - slope)


def ray_partition(
    family: TwoParamFamily,
    point: Point,
    indices: Optional[Sequence[int]] = None,
    config: Optional[EngineConfig] = None,
    max_offset: Optional[Fraction] = None,
) -> RayPartition:
    """
    Partición de rayos en un ancla de la cadena.

    Raises:
        LinkError: si el punto no es un ancla en la frontera, L no es minimal
            o falla alguna comprobación de la partición
    """
    anchor = classify_point(family, *point)
    if anchor.kind != U0 or not anchor.on_boundary:
        raise LinkError(f"{anchor.point} no es un punto U0 de la frontera ({anchor.kind})")
    if indices is not None and frozenset(indices) != anchor.indices:
        raise LinkError(f"L = {sorted(indices)} no es el conjunto minimal {sorted(anchor.indices)}")
    point = anchor.point
    l_set = anchor.indices
    ids = sorted(l_set)

    left, right = _adjacent_segments(family, point, config, max_offset)
    first = carrier_line(family, left).relations[0]
    right_relation = carrier_line(family, right).relations[0]
    vertex = first.line != right_relation.line
    if vertex:
        lam_j = [right_relation.coefficient(h) for h in ids]
    else:
        lam_j = _second_relation(family, ids, first)
    second = _raw_relation(family, ids, lam_j)
    d = second.a

    nu_of = {}
    for h, lj in zip(ids, lam_j):
        li = first.coefficient(h)
        if li == 0 and lj == 0:
            raise LinkError(f"La fila {h} no aparece en ninguna relación de L = {ids}")
        if li == 0:
            nu_of[h] = Fraction(0)
        elif lj == 0:
            nu_of[h] = None
        else:
            nu_of[h] = -li / lj
            if nu_of[h] > 0:
                raise LinkError(f"ν positivo para la fila {h} en {point}")
    values = sorted({v for v in nu_of.values() if v is not None}, reverse=True)
    if None in nu_of.values():
        values.append(None)
    classes = tuple(frozenset(h for h in ids if nu_of[h] == v) for v in values)
    complements = tuple(l_set - k for k in classes)

    a, b = first.b, second.b
    slopes: List[Optional[Fraction]] = []
    for nu, k_s in zip(values, complements):
        if nu is None:
            sl = b / d if d != 0 else None
        else:
            denom = 1 + d * nu
            sl = (a + nu * b) / denom if denom != 0 else None
        if k_s not in family.circuits:
            raise LinkError(f"K = {sorted(k_s)} no es un circuito en {point}")
        carrier = carrier_line(family, k_s)
        direct = None if carrier.line is None or carrier.line.a == 0 else carrier.line.b
        if carrier.dimension != 1 or direct != sl:
            raise LinkError(f"Pendiente de K = {sorted(k_s)}: fórmula {sl}, recta portadora {direct}")
        slopes.append(sl)

    rotated = tuple(_rotated(a, sl) for sl in slopes)
    tail = rotated[1:]
    if any(x is None or y is None or x <= y for x, y in zip(tail, tail[1:])):
        raise LinkError(f"Las pendientes rotadas no decrecen en {point}: {rotated}")
    if complements[0] != left or (vertex and complements[-1] != right):
        raise LinkError(f"Los extremos de la partición no coinciden con los tramos vecinos en {point}")

    return RayPartition(
        point=point,
        indices=l_set,
        vertex=vertex,
        left=left,
        right=right,
        first=first,
        second=second,
        d=d,
        nus=tuple(values),
        classes=classes,
        complements=complements,
        slopes=tuple(slopes),
        rotated=rotated,
    )


# --- Eslabones ---

@dataclass(frozen=True)
class SarkisovLink:
    """
    Eslabón anclado en ω_L: variedades X_0..X_t entre rayos consecutivos,
    bases T_0 (izquierda) y T_{t+1} (derecha) y la variedad R del ancla.
    """
    point: Point
    indices: IndexSet
    vertex: bool
    kind: str
    partition: RayPartition
    varieties: Tuple[VarietyDescriptor, ...]
    t_start: VarietyDescriptor
    t_end: VarietyDescriptor
    r: VarietyDescriptor
    arrows: Tuple[WallClassification, ...]
    fibrations: Tuple[WallClassification, WallClassification]
    diagnostics: Tuple[str, ...] = ()

    @property
    def source(self) -> Tuple[VarietyDescriptor, VarietyDescriptor]:
        return self.varieties[0], self.t_start

    @property
    def target(self) -> Tuple[VarietyDescriptor, VarietyDescriptor]:
        return self.varieties[-1], self.t_end


def _angle_order(v: Point, w: Point) -> int:
    turn = cross(v, w)
    return -1 if turn > 0 else (1 if turn < 0 else 0)


def _unit(v: Point) -> Point:
    norm = max_norm(v)
    return (v[0] / norm, v[1] / norm)


def _bisector(v: Point, w: Point) -> Point:
    u, x = _unit(v), _unit(w)
    total = (u[0] + x[0], u[1] + x[1])
    if total == (0, 0):
        return rot90ccw(u)
    return total


@dataclass(frozen=True)
class _Snapshot:
    rays: Tuple[Tuple[int, Point], ...]
    sectors: Tuple[PointClass, ...]
    walls: Tuple[PointClass, ...]
    t_start: PointClass
    t_end: PointClass

    def signature(self):
        def sig(c: PointClass):
            return (c.kind, c.variety, c.indices)
        return (
            tuple(s for s, _ in self.rays),
            tuple(sig(c) for c in self.sectors),
            tuple(sig(c) for c in self.walls),
            sig(self.t_start),
            sig(self.t_end),
        )


def _snapshot(family: TwoParamFamily, partition: RayPartition, h: Fraction) -> Optional[_Snapshot]:
    point = partition.point
    u_left = _unit((Fraction(-1), partition.first.b))
    right_line = carrier_line(family, partition.right).line
    u_right = _unit((Fraction(1), -right_line.b))

    rays = []
    for s in partition.interior:
        k_s = partition.complements[s]
        direction = _unit(carrier_line(family, k_s).line.direction)
        if omega_contains(family, k_s, along(point, direction, h)):
            rays.append((s, direction))
        elif omega_contains(family, k_s, along(point, direction, -h)):
            rays.append((s, (-direction[0], -direction[1])))
        else:
            return None
    rays.sort(key=cmp_to_key(lambda x, y: _angle_order(x[1], y[1])))

    directions = [u_left] + [r for _, r in rays] + [u_right]
    sectors = []
    for v, w in zip(directions, directions[1:]):
        cls = classify_point(family, *along(point, _unit(_bisector(v, w)), h))
        if cls.kind != U2:
            return None
        sectors.append(cls)
    walls = []
    for _, r in rays:
        cls = classify_point(family, *along(point, r, h))
        if cls.kind != U1:
            return None
        walls.append(cls)
    t_start = classify_point(family, *along(point, u_left, h))
    t_end = classify_point(family, *along(point, u_right, h))
    if t_start.kind != U1 or t_end.kind != U1:
        return None
    return _Snapshot(tuple(rays), tuple(sectors), tuple(walls), t_start, t_end)


def _sample_link(
    family: TwoParamFamily, partition: RayPartition, config: Optional[EngineConfig], max_offset: Optional[Fraction]
) -> _Snapshot:
    sampling = (config or DEFAULT_CONFIG).sampling
    h = sampling.initial_offset if max_offset is None else min(sampling.initial_offset, max_offset)
    gap = clearance(partition.point, arrangement_lines(family))
    if gap is not None:
        h = min(h, gap / 2)
    for _ in range(sampling.max_halvings):
        current = _snapshot(family, partition, h)
        if current is not None:
            step, stable = h, True
            for _ in range(sampling.stability_halvings):
                step /= 2
                again = _snapshot(family, partition, step)
                if again is None or again.signature() != current.signature():
                    stable = False
                    break
            if stable:
                return current
        h /= 2
    raise SamplingError(f"No se pudo muestrear el entorno del ancla {partition.point}")


def _drops(base: VarietyDescriptor, image: VarietyDescriptor) -> bool:
    """T → R baja el rango o pierde colores de la órbita abierta"""
    return image.dimension < base.dimension or image.open_orbit_colors < base.open_orbit_colors


def _picard(variety: VarietyDescriptor) -> Optional[int]:
    return picard_number(variety) if is_qfactorial(variety) else None


def classify_link(
    family: TwoParamFamily,
    partition: RayPartition,
    config: Optional[EngineConfig] = None,
    max_offset: Optional[Fraction] = None,
) -> SarkisovLink:
    """
    Diagrama y tipo del eslabón anclado en la partición dada.

    Raises:
        SamplingError: si el entorno del ancla no se estabiliza
    """
    snap = _sample_link(family, partition, config, max_offset)
    anchor = classify_point(family, *partition.point)
    r = anchor.variety
    sectors = snap.sectors
    arrows = tuple(
        wall_from_sides(family, wall, before, after)
        for wall, before, after in zip(snap.walls, sectors, sectors[1:])
    )
    fibrations = (
        fibration_from(family, snap.t_start, sectors[0]),
        fibration_from(family, snap.t_end, sectors[-1]),
    )
    t_start, t_end = snap.t_start.variety, snap.t_end.variety

    start_iso, end_iso = t_start == r, t_end == r
    diagnostics = []
    if start_iso and end_iso:
        kind = TYPE_II
    elif start_iso:
        kind = TYPE_I
    elif end_iso:
        kind = TYPE_III
    else:
        start_drop, end_drop = _drops(t_start, r), _drops(t_end, r)
        if start_drop != end_drop:
            diagnostics.append("solo una de las bases T → R baja de rango o de colores")
        kind = TYPE_IV_M if start_drop or end_drop else TYPE_IV_S
        if kind == TYPE_IV_M and not partition.vertex:
            diagnostics.append("eslabón IVm en un ancla que no es vértice de la cadena")

    for k, arrow in enumerate(arrows):
        if 0 < k < len(arrows) - 1 and arrow.kind != FLIP:
            diagnostics.append(f"la pared interior {sorted(arrow.indices)} es {arrow.kind}, no un flip")
        if arrow.kind == ISOMORPHISM:
            diagnostics.append(f"la pared {sorted(arrow.indices)} es un isomorfismo")
    rho_r = _picard(r)
    if rho_r is not None:
        for k, cls in enumerate(sectors):
            rho = _picard(cls.variety)
            if rho is not None and rho - rho_r > 2:
                diagnostics.append(f"ρ(X_{k}) - ρ(R) = {rho - rho_r} > 2")
    for note in diagnostics:
        logger.warning(f"Ancla {partition.point}: {note}")

    return SarkisovLink(
        point=partition.point,
        indices=partition.indices,
        vertex=partition.vertex,
        kind=kind,
        partition=partition,
        varieties=tuple(c.variety for c in sectors),
        t_start=t_start,
        t_end=t_end,
        r=r,
        arrows=arrows,
        fibrations=fibrations,
        diagnostics=tuple(diagnostics),
    )


# --- Programa completo ---

@dataclass(frozen=True)
class SarkisovProgram:
    start: Tuple[VarietyDescriptor, VarietyDescriptor]
    end: Tuple[VarietyDescriptor, VarietyDescriptor]
    links: Tuple[SarkisovLink, ...]
    chain: MoriChain
    genericity: GenericityReport
    runs: Tuple[HmmpRun, HmmpRun]


def _anchor_offsets(chain: MoriChain) -> List[Fraction]:
    """Mitad de la distancia en δ al punto de corte más cercano"""
    marks = sorted({Fraction(0), Fraction(1)} | {a.point[0] for a in chain.anchors})
    offsets = []
    for anchor in chain.anchors:
        gaps = [abs(anchor.point[0] - m) for m in marks if m != anchor.point[0]]
        offsets.append(min(gaps) / 2)
    return offsets


def _link_at(family: TwoParamFamily, anchor: ChainAnchor, config: Optional[EngineConfig], offset: Fraction) -> SarkisovLink:
    partition = ray_partition(family, anchor.point, anchor.indices, config, offset)
    return classify_link(family, partition, config, offset)


def run_sarkisov(
    family: TwoParamFamily,
    expected_start: Optional[Tuple[VarietyDescriptor, VarietyDescriptor]] = None,
    expected_end: Optional[Tuple[VarietyDescriptor, VarietyDescriptor]] = None,
    config: Optional[EngineConfig] = None,
) -> SarkisovProgram:
    """
    Programa de Sarkisov de X/S (δ = 0) a Y/T (δ = 1).

    Sin pares esperados se usan los extremos de los HMMP en δ = 0 y δ = 1.

    Raises:
        HypothesisError: si falla la verificación de la escala en un extremo
        GenericityError: si (B, B') no es genérico
        LinkError: si dos eslabones consecutivos no comparten su espacio de Mori
    """
    config = config or DEFAULT_CONFIG
    with LogContext(logger, f"programa de Sarkisov de {family.name}"):
        runs = (run_hmmp(family, 0, 0, config), run_hmmp(family, 1, 0, config))
        ends = []
        for run, expected in zip(runs, (expected_start, expected_end)):
            pair = expected or (run.penultimate, run.target)
            if not verify_scaling(family, pair[0], pair[1], run.delta, config):
                raise HypothesisError(f"La escala no termina en el espacio de Mori esperado en δ = {run.delta}")
            ends.append(pair)

        report = check_genericity(family, _unit_strip(family, config))
        chain = mori_chain(family, config, report)
        pairs = [(a, o) for a, o in zip(chain.anchors, _anchor_offsets(chain)) if a.kind == U0]
        compute = config.compute
        progress = tqdm(pairs, desc="Clasificando eslabones", disable=not compute.show_progress)
        if compute.n_jobs > 1 and len(pairs) > 1:
            links = list(Parallel(n_jobs=compute.n_jobs)(
                delayed(_link_at)(family, anchor, config, offset) for anchor, offset in progress
            ))
        else:
            links = [_link_at(family, anchor, config, offset) for anchor, offset in progress]

        current = ends[0]
        for link in links:
            if link.source != current:
                raise LinkError(f"El eslabón en {link.point} no parte del espacio de Mori anterior")
            current = link.target
        if current != ends[1]:
            raise LinkError("El último eslabón no llega a Y/T")
        logger.info(f"{len(links)} eslabones: {', '.join(link.kind for link in links)}")

    return SarkisovProgram(ends[0], ends[1], tuple(links), chain, report, runs)
