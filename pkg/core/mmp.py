# core/mmp.py
"""
Programa de modelos minimales con escala (HMMP) a δ fijo.

Se barre ε hacia arriba sobre la recta vertical {δ} × [ε_inicio, ε_max];
cada cruce con un ω_I de dimensión 1 se clasifica como fibración,
contracción divisorial, flip o isomorfismo comparando descriptores a
ambos lados de la pared.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from config.settings import DEFAULT_CONFIG, EngineConfig
from core.errors import HypothesisError, SamplingError, SarkisovError, StratumError, WallError
from core.exactnum import to_rat
from core.family import (
    OUTSIDE,
    U0,
    U0_PRIME,
    U1,
    U2,
    IndexSet,
    PointClass,
    Relation,
    TwoParamFamily,
    arrangement_lines,
    carrier_line,
    classify_point,
    epsilon_max,
)
from core.horo import VarietyDescriptor, is_qfactorial, picard_number, pullback_divisor
from core.planar import Line, Point, along, clearance, max_norm
from utils.logger import LogContext, setup_logger

logger = setup_logger(__name__)

FIBRATION = "Fibration"
DIVISORIAL = "Divisorial"
FLIP = "Flip"
ISOMORPHISM = "Isomorphism"

UPWARD: Point = (Fraction(0), Fraction(1))


def _picard(variety: Optional[VarietyDescriptor]) -> Optional[int]:
    if variety is None or not is_qfactorial(variety):
        return None
    return picard_number(variety)


@dataclass(frozen=True)
class WallClassification:
    """
    Tipo de una pared de U1 atravesada de `source` a `target`.

    Para una fibración `target` es la base (la variedad en la pared);
    para un flip `wall_variety` es la base común de φ y φ⁺.
    """
    kind: str
    indices: IndexSet
    relation: Relation
    point: Point
    source: Optional[VarietyDescriptor]
    target: Optional[VarietyDescriptor]
    wall_variety: Optional[VarietyDescriptor]
    contracted_row: Optional[int] = None
    not_mmp_step: bool = False
    source_picard: Optional[int] = None
    target_picard: Optional[int] = None


def fibration_from(family: TwoParamFamily, wall: PointClass, source: PointClass) -> WallClassification:
    """Fibración de Mori de la variedad de `source` sobre la variedad de la pared"""
    relation = carrier_line(family, wall.indices).relations[0]
    if not relation.one_sided:
        raise WallError(f"La relación de I = {sorted(wall.indices)} tiene ambos signos")
    return WallClassification(
        kind=FIBRATION,
        indices=wall.indices,
        relation=relation,
        point=wall.point,
        source=source.variety,
        target=wall.variety,
        wall_variety=wall.variety,
        source_picard=_picard(source.variety),
        target_picard=_picard(wall.variety),
    )


def wall_from_sides(
    family: TwoParamFamily,
    wall: PointClass,
    source: PointClass,
    target: PointClass,
) -> WallClassification:
    """
    Clasifica la pared por los signos de su relación minimal y los
    descriptores de los dos lados.
    """
    relation = carrier_line(family, wall.indices).relations[0]
    indices = wall.indices
    if relation.one_sided:
        inside = [c for c in (source, target) if c.kind != OUTSIDE]
        if len(inside) != 1:
            raise WallError(f"Relación de un solo signo en {wall.point} sin lado exterior")
        return fibration_from(family, wall, inside[0])
    if source.kind != U2 or target.kind != U2:
        raise WallError(f"Lados de la pared en {wall.point} fuera de U2: {source.kind}, {target.kind}")

    singles = [
        next(iter(side)) for side in (relation.plus, relation.minus)
        if len(side) == 1 and next(iter(side)) in family.embedding.ray_ids
    ]
    kind, contracted, not_step = FLIP, None, False
    if len(indices) >= 2 and singles:
        if source.variety == target.variety:
            kind, not_step = ISOMORPHISM, True
        else:
            kind = DIVISORIAL
            contracted = next(
                (i for i in singles
                 if i in source.variety.ray_rows and i not in target.variety.ray_rows),
                next(
                    (i for i in singles
                     if i in target.variety.ray_rows and i not in source.variety.ray_rows),
                    singles[0],
                ),
            )
    return WallClassification(
        kind=kind,
        indices=indices,
        relation=relation,
        point=wall.point,
        source=source.variety,
        target=target.variety,
        wall_variety=wall.variety,
        contracted_row=contracted,
        not_mmp_step=not_step,
        source_picard=_picard(source.variety),
        target_picard=_picard(target.variety),
    )


def wall_offset(
    family: TwoParamFamily,
    point: Point,
    line: Line,
    direction: Point,
    initial_offset: Optional[Fraction] = None,
    config: Optional[EngineConfig] = None,
) -> Fraction:
    """
    Paso h para muestrear p ± h·direction sin tocar otra recta del arreglo.

    Entre p y la recta más cercana que no pasa por p las clases de punto no
    cambian, así que basta con quedarse a la mitad de esa distancia.
    """
    sampling = (config or DEFAULT_CONFIG).sampling
    h = to_rat(initial_offset) if initial_offset is not None else sampling.initial_offset
    gap = clearance(point, [other for other in arrangement_lines(family) if other != line])
    if gap is not None:
        h = min(h, gap / (2 * max_norm(direction)))
    return h


def classify_wall(
    family: TwoParamFamily,
    point: Point,
    indices: Optional[Sequence[int]] = None,
    direction: Point = UPWARD,
    config: Optional[EngineConfig] = None,
    initial_offset: Optional[Fraction] = None,
) -> WallClassification:
    """
    Clasificación de la pared que pasa por `point`, atravesada en el sentido `direction`.

    Los lados se muestrean en p ± h·direction con h acotado por `wall_offset`.

    Raises:
        WallError: si el punto no está en U1, el I dado no es el minimal o
            `direction` es paralela a la pared
        SamplingError: si algún lado no es U2 ni exterior
    """
    wall = classify_point(family, *point)
    if wall.kind != U1:
        raise WallError(f"El punto {wall.point} no está en U1 ({wall.kind})")
    if indices is not None and frozenset(indices) != wall.indices:
        raise WallError(
            f"I = {sorted(indices)} no es el conjunto minimal {sorted(wall.indices)} en {wall.point}"
        )
    direction = (to_rat(direction[0]), to_rat(direction[1]))
    line = carrier_line(family, wall.indices).line
    if line.normal[0] * direction[0] + line.normal[1] * direction[1] == 0:
        raise WallError(f"La dirección {direction} no atraviesa la pared en {wall.point}")

    h = wall_offset(family, wall.point, line, direction, initial_offset, config)
    before = classify_point(family, *along(wall.point, direction, -h))
    after = classify_point(family, *along(wall.point, direction, h))
    if before.kind not in (U2, OUTSIDE) or after.kind not in (U2, OUTSIDE):
        raise SamplingError(
            f"Lados de la pared en {wall.point} a distancia {h}: {before.kind}, {after.kind}"
        )
    return wall_from_sides(family, wall, before, after)


@dataclass(frozen=True)
class HmmpEvent:
    """Un valor crítico de ε con la clasificación de su pared"""
    epsilon: Fraction
    wall: WallClassification

    @property
    def kind(self) -> str:
        return self.wall.kind


@dataclass(frozen=True)
class HmmpRun:
    delta: Fraction
    epsilon_start: Fraction
    initial: VarietyDescriptor
    events: Tuple[HmmpEvent, ...]
    terminal: WallClassification
    epsilon_max: Fraction

    @property
    def penultimate(self) -> Optional[VarietyDescriptor]:
        """Variedad X de la fibración final X → T"""
        return self.terminal.source

    @property
    def target(self) -> Optional[VarietyDescriptor]:
        return self.terminal.target


def run_hmmp(
    family: TwoParamFamily,
    delta,
    epsilon_start=0,
    config: Optional[EngineConfig] = None,
) -> HmmpRun:
    """
    HMMP sobre la recta vertical de abscisa δ.

    Raises:
        HypothesisError: si (δ, ε_inicio) no está en U2
        StratumError: si la recta atraviesa un punto de U0 o U0'
    """
    delta, start = to_rat(delta), to_rat(epsilon_start)
    with LogContext(logger, f"HMMP en δ = {delta}"):
        initial = classify_point(family, delta, start)
        if initial.kind != U2:
            raise HypothesisError(f"(δ, ε) = ({delta}, {start}) no está en U2 ({initial.kind})")
        lines = arrangement_lines(family)
        for line in lines:
            if line.a == 0 and line.b * delta + line.c == 0:
                raise StratumError(f"La recta δ = {delta} es una recta portadora", (delta, None))

        top = epsilon_max(family, delta)
        if top is None:
            raise SarkisovError(f"ε no está acotado en δ = {delta}")
        candidates = sorted({
            line.epsilon_at(delta) for line in lines
            if line.a != 0 and start < line.epsilon_at(delta) <= top
        })

        events = []
        terminal = None
        for epsilon in candidates:
            point_class = classify_point(family, delta, epsilon)
            if point_class.kind == U2:
                continue
            if point_class.kind in (U0, U0_PRIME):
                raise StratumError(
                    f"La recta δ = {delta} atraviesa el estrato {point_class.kind} en ε = {epsilon}",
                    point_class.point,
                )
            wall = classify_wall(family, point_class.point, point_class.indices, UPWARD, config)
            events.append(HmmpEvent(epsilon, wall))
            logger.debug(f"ε = {epsilon}: {wall.kind} en I = {sorted(wall.indices)}")
            if wall.kind == FIBRATION:
                terminal = wall
                break
        if terminal is None:
            raise SarkisovError(f"El HMMP en δ = {delta} no termina en una fibración")
        logger.info(f"HMMP en δ = {delta}: {len(events)} eventos, ε_max = {terminal.point[1]}")
    return HmmpRun(delta, start, initial.variety, tuple(events), terminal, terminal.point[1])


def verify_scaling(
    family: TwoParamFamily,
    expected_x: VarietyDescriptor,
    expected_s: VarietyDescriptor,
    delta,
    config: Optional[EngineConfig] = None,
) -> bool:
    """
    Comprueba que el HMMP desde la resolución termina en X/S y que las
    filas que no son rayos de X quedan estrictamente por encima del pullback.
    """
    delta = to_rat(delta)
    run = run_hmmp(family, delta, 0, config)
    if run.penultimate != expected_x:
        logger.warning(f"δ = {delta}: la variedad final no coincide con la esperada")
        return False
    if run.target != expected_s:
        logger.warning(f"δ = {delta}: la base de la fibración no coincide con la esperada")
        return False

    embedding = family.embedding
    values = family.divisor(delta, 0).values
    fan_rows = set()
    for cone in run.penultimate.fan:
        fan_rows |= cone.rows
    known: Dict[int, Fraction] = {
        i: values[i - 1] for i in sorted(fan_rows | set(embedding.color_ids))
    }
    pulled = pullback_divisor(embedding, run.penultimate, known)
    for row_id in sorted(embedding.ray_ids - set(known)):
        bound = pulled.coefficient(row_id)
        if values[row_id - 1] <= bound:
            logger.warning(
                f"δ = {delta}: d_{row_id} = {values[row_id - 1]} no supera el pullback {bound}"
            )
            return False
    logger.info(f"Escala verificada en δ = {delta}")
    return True
