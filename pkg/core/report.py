# core/report.py
"""
Informes de la CLI: diccionarios con racionales "p/q" (para --json) y
su versión en texto. La salida es determinista para una entrada fija.
"""

import json
from fractions import Fraction
from typing import Any, Dict, List, Optional

from config.settings import EngineConfig
from core.family import Decomposition, GenericityReport, PointClass, TwoParamFamily, Wall
from core.mmp import UPWARD, HmmpRun, WallClassification, classify_wall
from core.sarkisov import ChainAnchor, ChainSegment, MoriChain, SarkisovLink, SarkisovProgram
from utils.helpers import helpers
from utils.logger import setup_logger

logger = setup_logger(__name__)

fmt = helpers.format_rational


def _point(point) -> List[Optional[str]]:
    return [fmt(point[0]), fmt(point[1])]


def _indices(indices) -> Optional[List[int]]:
    return None if indices is None else sorted(indices)


def to_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# --- Genericidad ---

def genericity_data(report: GenericityReport, hypotheses: Optional[List[str]] = None) -> Dict[str, Any]:
    return {
        'passed': report.passed,
        'circuits': [list(c) for c in report.circuits],
        'nonempty': [list(c) for c in report.nonempty],
        'violations': [
            {'kind': v.kind, 'sets': [list(s) for s in v.sets], 'detail': v.detail}
            for v in report.violations
        ],
        'hypotheses': list(hypotheses or []),
    }


def genericity_text(data: Dict[str, Any]) -> str:
    lines = [
        f"genericidad: {'OK' if data['passed'] else 'FALLA'}",
        f"circuitos: {len(data['circuits'])} ({len(data['nonempty'])} con ω no vacío)",
    ]
    for v in data['violations']:
        sets = " ".join(helpers.format_indices(s) for s in v['sets'])
        lines.append(f"  violación {v['kind']}: {sets} {v['detail']}")
    if data['hypotheses']:
        lines.append("hipótesis:")
        lines.extend(f"  {h}" for h in data['hypotheses'])
    else:
        lines.append("hipótesis: OK")
    return "\n".join(lines) + "\n"


# --- Clasificación de puntos ---

def classify_data(family: TwoParamFamily, found: PointClass) -> Dict[str, Any]:
    return {
        'point': _point(found.point),
        'kind': found.kind,
        'indices': _indices(found.indices),
        'on_boundary': found.on_boundary,
        'variety': family.name_of(found.variety) if found.variety is not None else None,
        'strata': [
            {'indices': sorted(s.indices), 'dimension': s.dimension} for s in found.strata
        ],
    }


def classify_text(data: Dict[str, Any]) -> str:
    lines = [data['kind']]
    if data['indices'] is not None:
        lines.append(f"I minimal: {helpers.format_indices(data['indices'])}")
    if data['variety'] is not None:
        lines.append(f"variedad: {data['variety']}")
    for s in data['strata']:
        lines.append(f"  ω_{helpers.format_indices(s['indices'])} dim {s['dimension']}")
    return "\n".join(lines) + "\n"


# --- Paredes ---

def wall_classification(
    family: TwoParamFamily, wall: Wall, config: Optional[EngineConfig] = None
) -> WallClassification:
    """
    Tipo de una pared de la descomposición, cruzada en ε creciente (en δ
    creciente si la pared es vertical).

    Raises:
        WallError: si el tramo no admite clasificación
        SamplingError: si algún lado de la muestra no es U2 ni exterior
    """
    direction = UPWARD if wall.relation.line.a != 0 else (Fraction(1), Fraction(0))
    return classify_wall(family, wall.sample, wall.indices, direction, config)


def _wall_data(family: TwoParamFamily, wall: WallClassification) -> Dict[str, Any]:
    return {
        'kind': wall.kind,
        'indices': sorted(wall.indices),
        'point': _point(wall.point),
        'source': family.name_of(wall.source),
        'target': family.name_of(wall.target),
        'contracted_row': wall.contracted_row,
        'not_mmp_step': wall.not_mmp_step,
        'source_picard': wall.source_picard,
        'target_picard': wall.target_picard,
    }


def decomposition_data(
    family: TwoParamFamily, decomposition: Decomposition, config: Optional[EngineConfig] = None
) -> Dict[str, Any]:
    walls = []
    for wall in decomposition.walls:
        found = wall_classification(family, wall, config)
        walls.append({
            'indices': sorted(wall.indices),
            'start': _point(wall.start),
            'end': _point(wall.end),
            'on_boundary': wall.on_boundary,
            'kind': found.kind,
            'not_mmp_step': found.not_mmp_step,
        })
    return {
        'family': family.name,
        'genericity': genericity_data(decomposition.genericity),
        'cells': [
            {'name': c.name, 'sample': _point(c.sample), 'picard': c.picard, 'pieces': len(c.pieces)}
            for c in decomposition.cells
        ],
        'walls': walls,
        'points': [
            {
                'point': _point(p.point),
                'kind': p.kind,
                'indices': _indices(p.indices),
                'on_boundary': p.on_boundary,
            }
            for p in decomposition.points
        ],
    }


def decomposition_text(data: Dict[str, Any]) -> str:
    lines = [f"familia {data['family']}", f"celdas ({len(data['cells'])}):"]
    for c in data['cells']:
        rho = "-" if c['picard'] is None else c['picard']
        lines.append(f"  {c['name']} en ({c['sample'][0]}, {c['sample'][1]}) ρ = {rho}")
    lines.append(f"paredes ({len(data['walls'])}):")
    for w in data['walls']:
        flag = " [no es paso del MMP]" if w['not_mmp_step'] else ""
        lines.append(
            f"  ω_{helpers.format_indices(w['indices'])} {w['kind']} "
            f"({w['start'][0]}, {w['start'][1]}) -> ({w['end'][0]}, {w['end'][1]}){flag}"
        )
    lines.append(f"puntos ({len(data['points'])}):")
    for p in data['points']:
        where = "frontera" if p['on_boundary'] else "interior"
        lines.append(
            f"  ({p['point'][0]}, {p['point'][1]}) {p['kind']} {helpers.format_indices(p['indices'])} {where}"
        )
    return "\n".join(lines) + "\n"


# --- HMMP ---

def hmmp_data(family: TwoParamFamily, run: HmmpRun) -> Dict[str, Any]:
    return {
        'delta': fmt(run.delta),
        'epsilon_start': fmt(run.epsilon_start),
        'epsilon_max': fmt(run.epsilon_max),
        'initial': family.name_of(run.initial),
        'events': [
            dict(_wall_data(family, event.wall), epsilon=fmt(event.epsilon)) for event in run.events
        ],
        'penultimate': family.name_of(run.penultimate),
        'target': family.name_of(run.target),
    }


def hmmp_text(data: Dict[str, Any]) -> str:
    lines = [f"HMMP en δ = {data['delta']} desde {data['initial']}"]
    for e in data['events']:
        extra = f" fila {e['contracted_row']}" if e['contracted_row'] is not None else ""
        lines.append(
            f"  ε = {e['epsilon']}: {e['kind']}{extra} ω_{helpers.format_indices(e['indices'])} "
            f"{e['source']} -> {e['target']}"
        )
    lines.append(f"fibración final: {data['penultimate']} -> {data['target']} en ε = {data['epsilon_max']}")
    return "\n".join(lines) + "\n"


# --- Cadena y programa ---

def _chain_item(family: TwoParamFamily, item) -> Dict[str, Any]:
    if isinstance(item, ChainSegment):
        return {
            'type': 'segment',
            'indices': sorted(item.indices),
            'start': _point(item.start),
            'end': _point(item.end),
            'target': family.name_of(item.target),
        }
    anchor: ChainAnchor = item
    return {
        'type': 'anchor',
        'point': _point(anchor.point),
        'indices': _indices(anchor.indices),
        'kind': anchor.kind,
        'corner': anchor.corner,
    }


def chain_data(family: TwoParamFamily, chain: MoriChain) -> List[Dict[str, Any]]:
    return [_chain_item(family, item) for item in chain.items]


def link_data(family: TwoParamFamily, link: SarkisovLink) -> Dict[str, Any]:
    partition = link.partition
    return {
        'point': _point(link.point),
        'indices': sorted(link.indices),
        'vertex': link.vertex,
        'type': link.kind,
        'varieties': [family.name_of(v) for v in link.varieties],
        't_start': family.name_of(link.t_start),
        't_end': family.name_of(link.t_end),
        'r': family.name_of(link.r),
        'arrows': [_wall_data(family, a) for a in link.arrows],
        'fibrations': [_wall_data(family, f) for f in link.fibrations],
        'partition': {
            'd': fmt(partition.d),
            'nu': [None if nu is None else fmt(nu) for nu in partition.nus],
            'classes': [sorted(k) for k in partition.classes],
            'complements': [sorted(k) for k in partition.complements],
            'slopes': [fmt(s) for s in partition.slopes],
        },
        'diagnostics': list(link.diagnostics),
    }


def program_data(family: TwoParamFamily, program: SarkisovProgram) -> Dict[str, Any]:
    return {
        'family': family.name,
        'start': [family.name_of(v) for v in program.start],
        'end': [family.name_of(v) for v in program.end],
        'genericity': genericity_data(program.genericity),
        'chain': chain_data(family, program.chain),
        'links': [link_data(family, link) for link in program.links],
    }


def program_text(data: Dict[str, Any]) -> str:
    start, end = data['start'], data['end']
    lines = [
        f"programa de Sarkisov de {data['family']}: {start[0]}/{start[1]} => {end[0]}/{end[1]}",
        "cadena de Mori:",
    ]
    for item in data['chain']:
        if item['type'] == 'segment':
            lines.append(
                f"  tramo ω_{helpers.format_indices(item['indices'])} "
                f"({item['start'][0]}, {item['start'][1]}) -> ({item['end'][0]}, {item['end'][1]}) "
                f"base {item['target']}"
            )
        else:
            lines.append(
                f"  ancla ({item['point'][0]}, {item['point'][1]}) "
                f"L = {helpers.format_indices(item['indices'])} {item['kind']}"
            )
    lines.append(f"eslabones ({len(data['links'])}):")
    for k, link in enumerate(data['links'], start=1):
        lines.append(
            f"  {k}. tipo {link['type']} en ({link['point'][0]}, {link['point'][1]}) "
            f"L = {helpers.format_indices(link['indices'])}"
        )
        lines.append(
            f"     {link['varieties'][0]}/{link['t_start']} ⇢ {link['varieties'][-1]}/{link['t_end']} "
            f"sobre R = {link['r']}"
        )
        for arrow in link['arrows']:
            lines.append(f"     {arrow['source']} ⇢ {arrow['target']}: {arrow['kind']}")
        for note in link['diagnostics']:
            lines.append(f"     aviso: {note}")
    return "\n".join(lines) + "\n"
