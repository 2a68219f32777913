# core/horo.py
"""
Combinatoria horosférica: datos de encaje, polítopos de momento,
abanicos coloreados, descriptores de variedades y tests de divisores.

Las filas se identifican por su id 1..p; las matrices subyacentes
son 0-indexadas.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from core.errors import (
    EmptyPolytopeError,
    NotAmpleError,
    NotNefError,
    NotQCartierError,
    NotQFactorialError,
    RayOutsideSupportError,
    ValidationError,
)
from core.exactnum import (
    IntVector,
    LatticeBasis,
    RatMatrix,
    RatVector,
    dot,
    lattice_intersect_kernel,
    primitive,
    solve_affine,
    to_rat,
)
from core.lp import maximize
from core.polytope import HPolytope, is_bounded
from utils.logger import setup_logger

logger = setup_logger(__name__)

RAY = "ray"
COLOR = "color"


@dataclass(frozen=True)
class Row:
    """Fila del encaje: un rayo x_i o un color con su vector α^∨_M"""
    id: int
    kind: str
    vector: Tuple[int, ...]
    anticanonical_coeff: Fraction

    @property
    def is_color(self) -> bool:
        return self.kind == COLOR


@dataclass(frozen=True)
class EmbeddingData:
    """Rango del retículo y filas ordenadas (rayos y colores)"""
    lattice_rank: int
    rows: Tuple[Row, ...]

    def __post_init__(self):
        if self.lattice_rank < 1:
            raise ValidationError("El rango del retículo debe ser >= 1")
        for expected, row in enumerate(self.rows, start=1):
            if row.id != expected:
                raise ValidationError(f"Ids de fila fuera de orden: {row.id} en la posición {expected}")
            if row.kind not in (RAY, COLOR):
                raise ValidationError(f"Fila {row.id}: tipo desconocido {row.kind!r}")
            if len(row.vector) != self.lattice_rank:
                raise ValidationError(f"Fila {row.id}: vector de longitud {len(row.vector)}")
            if row.kind == RAY:
                if primitive(row.vector) != tuple(row.vector) or not any(row.vector):
                    raise ValidationError(f"Fila {row.id}: el rayo {row.vector} no es primitivo")
                if row.anticanonical_coeff != 1:
                    raise ValidationError(f"Fila {row.id}: un rayo debe tener coeficiente anticanónico 1")
            elif row.anticanonical_coeff < 2:
                raise ValidationError(f"Fila {row.id}: un color debe tener coeficiente anticanónico >= 2")

    @cached_property
    def matrix(self) -> RatMatrix:
        return RatMatrix.from_rows([row.vector for row in self.rows], self.lattice_rank)

    @cached_property
    def bounded(self) -> bool:
        return is_bounded(self.matrix)

    @property
    def ids(self) -> Tuple[int, ...]:
        return tuple(row.id for row in self.rows)

    @cached_property
    def color_ids(self) -> FrozenSet[int]:
        return frozenset(row.id for row in self.rows if row.is_color)

    @cached_property
    def ray_ids(self) -> FrozenSet[int]:
        return frozenset(row.id for row in self.rows if not row.is_color)

    @cached_property
    def anticanonical(self) -> RatVector:
        return tuple(row.anticanonical_coeff for row in self.rows)

    def row(self, row_id: int) -> Row:
        if not 1 <= row_id <= len(self.rows):
            raise ValidationError(f"Id de fila inexistente: {row_id}")
        return self.rows[row_id - 1]


@dataclass(frozen=True)
class DivisorCoeffs:
    """Coeficientes d_i de D = Σ d_i X_i + Σ a_α D_α, alineados con las filas"""
    values: RatVector

    @classmethod
    def of(cls, values: Iterable) -> "DivisorCoeffs":
        return cls(tuple(to_rat(v) for v in values))

    @classmethod
    def from_rhs(cls, rhs: Sequence[Fraction]) -> "DivisorCoeffs":
        """Desde la columna B (que almacena -d)"""
        return cls(tuple(-Fraction(v) for v in rhs))

    def as_rhs(self) -> RatVector:
        return tuple(-v for v in self.values)

    def coefficient(self, row_id: int) -> Fraction:
        return self.values[row_id - 1]


@dataclass(frozen=True)
class WeightOffset:
    """Traslación v0 = Σ a_α ϖ_α guardada como (id de color, coeficiente)"""
    color_coeffs: Tuple[Tuple[int, Fraction], ...]


@dataclass(frozen=True)
class ColoredCone:
    """Cono coloreado maximal (C_v, F_v) en N'"""
    generators: Tuple[IntVector, ...]
    colors: FrozenSet[int]
    rows: FrozenSet[int] = field(default=frozenset(), compare=False, hash=False)


@dataclass(frozen=True)
class VarietyDescriptor:
    """
    Datos que clasifican una variedad horosférica proyectiva.

    La igualdad compara retículo, abanico, colores del orbita abierta y
    paredes tocadas. Los campos marcados compare=False son metadatos.
    """
    sublattice: LatticeBasis
    open_orbit_colors: FrozenSet[int]
    fan: FrozenSet[ColoredCone]
    wall_contacts: FrozenSet[int]
    dimension: int
    color_images: Tuple[Tuple[int, IntVector], ...] = field(default=(), compare=False)
    ray_rows: FrozenSet[int] = field(default=frozenset(), compare=False)

    def color_image(self, color_id: int) -> IntVector:
        for cid, image in self.color_images:
            if cid == color_id:
                return image
        raise ValidationError(f"El color {color_id} no sobrevive en este descriptor")

    def summary(self) -> str:
        cones = sorted(
            (tuple(str(list(g)) for g in c.generators), tuple(sorted(c.colors))) for c in self.fan
        )
        cone_txt = "; ".join(
            f"<{', '.join(g)}>" + (f"{{{','.join(map(str, cols))}}}" if cols else "")
            for g, cols in cones
        )
        walls = ",".join(map(str, sorted(self.wall_contacts)))
        return f"rango {self.dimension} | conos {cone_txt} | paredes {{{walls}}}"


def pseudo_moment_polytope(embedding: EmbeddingData, divisor: DivisorCoeffs) -> HPolytope:
    """Q̃_D = {m : <m, x_i> >= -d_i}"""
    if len(divisor.values) != len(embedding.rows):
        raise ValidationError(
            f"El divisor tiene {len(divisor.values)} coeficientes para {len(embedding.rows)} filas"
        )
    return HPolytope(embedding.matrix, divisor.as_rhs(), bounded=embedding.bounded)


def weight_offset(embedding: EmbeddingData, divisor: DivisorCoeffs) -> WeightOffset:
    return WeightOffset(tuple(
        (row.id, divisor.coefficient(row.id)) for row in embedding.rows if row.is_color
    ))


def _in_cone(vector: Sequence[Fraction], generators: Sequence[Sequence[Fraction]]) -> Optional[RatVector]:
    """Coeficientes no negativos que expresan vector en el cono generado, o None"""
    k = len(generators)
    if k == 0:
        return () if not any(vector) else None
    dim = len(vector)
    eq_rows = [[Fraction(generators[t][j]) for t in range(k)] for j in range(dim)]
    ge_rows = [[Fraction(1 if s == t else 0) for s in range(k)] for t in range(k)]
    result = maximize(
        [Fraction(0)] * k,
        eq_rows=eq_rows,
        eq_rhs=[Fraction(v) for v in vector],
        ge_rows=ge_rows,
        ge_rhs=[Fraction(0)] * k,
    )
    return result.point if result.optimal else None


def extremal_generators(vectors: Iterable[IntVector]) -> Tuple[IntVector, ...]:
    """Generadores primitivos de los rayos extremos de un cono puntiagudo, ordenados"""
    distinct = sorted({primitive(v) for v in vectors if any(v)})
    extremal = []
    for g in distinct:
        others = [h for h in distinct if h != g]
        if _in_cone(g, others) is None:
            extremal.append(g)
    return tuple(extremal)


def _check_offset(embedding: EmbeddingData, offset: Optional[WeightOffset]) -> None:
    if offset is None:
        return
    unknown = {cid for cid, _ in offset.color_coeffs} - embedding.color_ids
    if unknown:
        raise ValidationError(f"La traslación menciona colores inexistentes: {sorted(unknown)}")


def variety_from_polytope(
    embedding: EmbeddingData,
    polytope: HPolytope,
    offset: Optional[WeightOffset] = None,
) -> VarietyDescriptor:
    """
    Descriptor de la variedad polarizada por un polítopo de momento no vacío.

    M' es el retículo de direcciones de P; cada vértice da un cono coloreado
    generado por las imágenes en N' de sus filas activas que no son igualdades.
    """
    verts = polytope.vertices
    if not verts:
        raise EmptyPolytopeError("variety_from_polytope requiere un polítopo no vacío")
    _check_offset(embedding, offset)

    equalities = polytope.implicit_equalities
    sublattice = lattice_intersect_kernel(
        embedding.matrix.submatrix(sorted(equalities)),
        LatticeBasis.standard(embedding.lattice_rank),
    )
    equality_ids = {i + 1 for i in equalities}
    wall_contacts = frozenset(equality_ids & embedding.color_ids)
    open_orbit = embedding.color_ids - wall_contacts

    images = {row.id: sublattice.pairing(row.vector) for row in embedding.rows}
    cones = set()
    ray_rows = set()
    for vertex in verts:
        active = sorted(i + 1 for i in vertex.tight - equalities)
        generators = extremal_generators(images[i] for i in active)
        colors = frozenset(i for i in active if i in embedding.color_ids)
        cones.add(ColoredCone(generators, colors, frozenset(active)))
        for i in active:
            if i in embedding.ray_ids and primitive(images[i]) in generators:
                ray_rows.add(i)

    return VarietyDescriptor(
        sublattice=sublattice,
        open_orbit_colors=frozenset(open_orbit),
        fan=frozenset(cones),
        wall_contacts=wall_contacts,
        dimension=sublattice.rank,
        color_images=tuple(sorted((cid, images[cid]) for cid in open_orbit)),
        ray_rows=frozenset(ray_rows),
    )


def colored_fan_from_divisor(embedding: EmbeddingData, divisor: DivisorCoeffs) -> VarietyDescriptor:
    """Abanico coloreado de la variedad polarizada por D"""
    polytope = pseudo_moment_polytope(embedding, divisor)
    return variety_from_polytope(embedding, polytope, weight_offset(embedding, divisor))


def _color_rays(descriptor: VarietyDescriptor, cone: ColoredCone) -> Dict[int, IntVector]:
    return {cid: primitive(descriptor.color_image(cid)) for cid in cone.colors}


def is_qfactorial(descriptor: VarietyDescriptor) -> bool:
    """
    Criterio del abanico coloreado: conos simpliciales y colores con imágenes
    distintas, no nulas, sobre rayos extremos.
    """
    for cone in descriptor.fan:
        if cone.generators:
            rank = RatMatrix.from_rows(cone.generators).rank()
            if rank != len(cone.generators):
                return False
        rays = _color_rays(descriptor, cone)
        images = list(rays.values())
        if any(not any(v) for v in images):
            return False
        if len(set(images)) != len(images):
            return False
        if any(v not in cone.generators for v in images):
            return False
    return True


def picard_number(descriptor: VarietyDescriptor) -> int:
    """Divisores primos B-estables (rayos sin color + colores de la órbita abierta) menos el rango"""
    if not is_qfactorial(descriptor):
        raise NotQFactorialError("El número de Picard sólo se calcula para descriptores Q-factoriales")
    uncolored = set()
    for cone in descriptor.fan:
        colored = set(_color_rays(descriptor, cone).values())
        uncolored.update(g for g in cone.generators if g not in colored)
    return len(uncolored) + len(descriptor.open_orbit_colors) - descriptor.dimension


@dataclass(frozen=True)
class LinearPiece:
    """Forma lineal m_σ de h_D sobre el cono de las filas dadas"""
    rows: FrozenSet[int]
    form: Optional[RatVector]


@dataclass(frozen=True)
class PiecewiseLinearFunction:
    """h_D(x) = -<m_σ, x> sobre cada cono σ"""
    pieces: Tuple[LinearPiece, ...]

    @property
    def qcartier(self) -> bool:
        return all(p.form is not None for p in self.pieces)

    def value(self, embedding: EmbeddingData, vector: Sequence[int]) -> Fraction:
        """h_D en un vector de N, buscando un cono que lo contenga"""
        for piece in self.pieces:
            generators = [embedding.row(i).vector for i in sorted(piece.rows)]
            if _in_cone(vector, generators) is None:
                continue
            if piece.form is None:
                raise NotQCartierError(f"h_D no es lineal sobre el cono de las filas {sorted(piece.rows)}")
            return -dot(piece.form, [Fraction(v) for v in vector])
        raise RayOutsideSupportError(f"El vector {tuple(vector)} no está en el soporte del abanico")


def piecewise_linear_function(
    embedding: EmbeddingData,
    cones: Iterable[Iterable[int]],
    divisor: DivisorCoeffs,
) -> PiecewiseLinearFunction:
    """Resuelve <m_σ, x_i> = -d_i para las filas i de cada cono maximal"""
    rhs = divisor.as_rhs()
    pieces = []
    for rows in cones:
        ids = sorted(rows)
        sub = embedding.matrix.submatrix([i - 1 for i in ids])
        solution = solve_affine(sub, [rhs[i - 1] for i in ids])
        pieces.append(LinearPiece(frozenset(ids), solution.solution))
    return PiecewiseLinearFunction(tuple(pieces))


@dataclass(frozen=True)
class DivisorTests:
    """Resultado de los tests de un divisor sobre el abanico de referencia"""
    qcartier: bool
    cartier: bool
    qfactorial: bool
    ample: bool
    nef: bool


def _reference_cones(embedding: EmbeddingData, reference: DivisorCoeffs) -> List[FrozenSet[int]]:
    polytope = pseudo_moment_polytope(embedding, reference)
    if polytope.dimension != embedding.lattice_rank:
        raise NotAmpleError("El divisor de referencia no define un polítopo de dimensión máxima")
    return [frozenset(i + 1 for i in v.tight) for v in polytope.vertices]


def _convexity(embedding: EmbeddingData, h: PiecewiseLinearFunction, divisor: DivisorCoeffs,
               strict: bool) -> bool:
    rhs = divisor.as_rhs()
    for piece in h.pieces:
        if piece.form is None:
            return False
        for row in embedding.rows:
            if row.id in piece.rows:
                continue
            value = dot(piece.form, [Fraction(v) for v in row.vector])
            bound = rhs[row.id - 1]
            if value < bound or (strict and value == bound):
                return False
    return True


def divisor_tests(embedding: EmbeddingData, reference: DivisorCoeffs, divisor: DivisorCoeffs) -> DivisorTests:
    """
    Q-Cartier, Cartier, Q-factorialidad, amplitud y nef de D' respecto del abanico de D_ref.

    Los conos maximales son los conjuntos activos I_v de los vértices de Q̃_{D_ref}.
    """
    cones = _reference_cones(embedding, reference)
    h = piecewise_linear_function(embedding, cones, divisor)
    qfactorial = all(
        embedding.matrix.submatrix([i - 1 for i in sorted(c)]).rank() == len(c) for c in cones
    )
    qcartier = h.qcartier
    cartier = qcartier and all(
        all(v.denominator == 1 for v in piece.form) for piece in h.pieces
    )
    return DivisorTests(
        qcartier=qcartier,
        cartier=cartier,
        qfactorial=qfactorial,
        ample=qcartier and _convexity(embedding, h, divisor, strict=True),
        nef=qcartier and _convexity(embedding, h, divisor, strict=False),
    )


def _descriptor_cones(embedding: EmbeddingData, descriptor: VarietyDescriptor) -> List[FrozenSet[int]]:
    if descriptor.dimension != embedding.lattice_rank:
        raise ValidationError("Se requiere un descriptor de dimensión máxima")
    return [cone.rows for cone in descriptor.fan]


def contract_nef(embedding: EmbeddingData, source: VarietyDescriptor, divisor: DivisorCoeffs) -> VarietyDescriptor:
    """Imagen del morfismo definido por un divisor nef sobre la variedad fuente"""
    h = piecewise_linear_function(embedding, _descriptor_cones(embedding, source), divisor)
    if not _convexity(embedding, h, divisor, strict=False):
        raise NotNefError("El divisor no es nef sobre la variedad fuente")
    return colored_fan_from_divisor(embedding, divisor)


def pullback_divisor(
    embedding: EmbeddingData,
    fan: VarietyDescriptor,
    divisor: Mapping[int, Fraction],
) -> DivisorCoeffs:
    """
    Pullback de D_X a la resolución Z: en cada rayo excepcional e_j el coeficiente es h_D(e_j).

    `divisor` da los coeficientes de D_X por id de fila (rayos del abanico y colores).
    """
    cones = _descriptor_cones(embedding, fan)
    needed = set().union(*cones) if cones else set()
    missing = needed - set(divisor)
    if missing:
        raise ValidationError(f"Faltan coeficientes para las filas {sorted(missing)}")
    full = DivisorCoeffs(tuple(
        Fraction(divisor.get(row.id, 0)) for row in embedding.rows
    ))
    h = piecewise_linear_function(embedding, cones, full)
    if not h.qcartier:
        raise NotQCartierError("D_X no es Q-Cartier sobre el abanico dado")
    values = []
    for row in embedding.rows:
        if row.id in divisor:
            values.append(Fraction(divisor[row.id]))
        else:
            values.append(h.value(embedding, row.vector))
    return DivisorCoeffs(tuple(values))


def polytopes_equivalent(
    embedding: EmbeddingData,
    first: HPolytope,
    first_offset: Optional[WeightOffset],
    second: HPolytope,
    second_offset: Optional[WeightOffset],
) -> bool:
    """
    Equivalencia de polítopos: mismas dimensiones de caras F_J para todo J
    y mismas paredes tocadas.

    Las traslaciones solo se validan: las filas de colores ya llevan sus
    coeficientes y deciden las paredes tocadas.

    Raises:
        ValidationError: si una traslación menciona colores inexistentes
    """
    _check_offset(embedding, first_offset)
    _check_offset(embedding, second_offset)
    if first.is_empty or second.is_empty:
        raise EmptyPolytopeError("polytopes_equivalent requiere polítopos no vacíos")
    if first.implicit_equalities & _color_rows(embedding) != second.implicit_equalities & _color_rows(embedding):
        return False
    subsets = set()
    for polytope in (first, second):
        for v in polytope.vertices:
            tight = sorted(v.tight)
            for k in range(len(tight) + 1):
                subsets.update(frozenset(c) for c in combinations(tight, k))
    return all(first.face_dimension(j) == second.face_dimension(j) for j in subsets)


def _color_rows(embedding: EmbeddingData) -> FrozenSet[int]:
    return frozenset(i - 1 for i in embedding.color_ids)
