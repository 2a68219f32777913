# core/fixtures.py
"""
Lectura y escritura de fixtures JSON (formato 1).

Los racionales se escriben como cadenas "p/q"; la salida canónica usa
claves ordenadas y sangría de dos espacios.
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

from config.settings import StripConfig
from core.errors import FixtureError
from core.family import Label, TwoParamFamily
from core.horo import COLOR, RAY, EmbeddingData, Row
from utils.helpers import helpers
from utils.logger import setup_logger

logger = setup_logger(__name__)

FORMAT_VERSION = 1

_STRIP_KEYS = ('delta_min', 'delta_max', 'epsilon_min', 'epsilon_max')


def _require(data: Dict[str, Any], key: str, where: str = "fixture"):
    if key not in data:
        raise FixtureError(f"Falta la clave '{key}' en {where}")
    return data[key]


def family_from_dict(data: Dict[str, Any], default_name: str = "familia") -> TwoParamFamily:
    """Construye la familia desde el diccionario de un fixture"""
    if not isinstance(data, dict):
        raise FixtureError("El fixture debe ser un objeto JSON")
    version = data.get('format', FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise FixtureError(f"Versión de formato no soportada: {version}")

    rank = _require(data, 'lattice_rank')
    if not isinstance(rank, int) or isinstance(rank, bool):
        raise FixtureError("lattice_rank debe ser un entero")

    rows = []
    for position, raw in enumerate(_require(data, 'rows'), start=1):
        where = f"la fila {position}"
        kind = _require(raw, 'kind', where)
        if kind not in (RAY, COLOR):
            raise FixtureError(f"Tipo de fila desconocido en {where}: {kind!r}")
        vector = _require(raw, 'vector', where)
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in vector):
            raise FixtureError(f"El vector de {where} debe ser entero")
        rows.append(Row(
            id=raw.get('id', position),
            kind=kind,
            vector=tuple(vector),
            anticanonical_coeff=helpers.parse_rational(raw.get('anticanonical', 1)),
        ))
    embedding = EmbeddingData(rank, tuple(rows))

    labels = []
    for raw in data.get('labels', []):
        name = _require(raw, 'name', "una etiqueta")
        point = (
            helpers.parse_rational(_require(raw, 'delta', f"la etiqueta {name}")),
            helpers.parse_rational(_require(raw, 'epsilon', f"la etiqueta {name}")),
        )
        labels.append(Label(name, point))

    strip = None
    if data.get('strip') is not None:
        raw_strip = data['strip']
        unknown = set(raw_strip) - set(_STRIP_KEYS)
        if unknown:
            raise FixtureError(f"Claves desconocidas en strip: {sorted(unknown)}")
        strip = StripConfig.from_dict({
            key: helpers.parse_rational(value) for key, value in raw_strip.items() if value is not None
        })

    return TwoParamFamily(
        embedding,
        helpers.parse_vector(_require(data, 'B')),
        helpers.parse_vector(_require(data, 'Bprime')),
        labels=labels,
        strip=strip,
        name=data.get('name', default_name),
    )


def family_to_dict(family: TwoParamFamily) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        'format': FORMAT_VERSION,
        'name': family.name,
        'lattice_rank': family.embedding.lattice_rank,
        'rows': [
            {
                'id': row.id,
                'kind': row.kind,
                'vector': list(row.vector),
                'anticanonical': helpers.format_rational(row.anticanonical_coeff),
            }
            for row in family.embedding.rows
        ],
        'B': helpers.format_vector(family.b),
        'Bprime': helpers.format_vector(family.b_prime),
    }
    if family.labels:
        data['labels'] = [
            {
                'name': label.name,
                'delta': helpers.format_rational(label.point[0]),
                'epsilon': helpers.format_rational(label.point[1]),
            }
            for label in family.labels
        ]
    if family.strip is not None:
        data['strip'] = {
            key: helpers.format_rational(getattr(family.strip, key))
            for key in _STRIP_KEYS if getattr(family.strip, key) is not None
        }
    return data


def load_fixture(path: Union[str, Path]) -> TwoParamFamily:
    """
    Carga un fixture desde disco.

    Raises:
        FixtureError: si el archivo no existe o no es JSON válido
        ValidationError: si los datos no forman una familia válida
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError as exc:
        raise FixtureError(f"No existe el fixture: {path}") from exc
    except json.JSONDecodeError as exc:
        raise FixtureError(f"JSON inválido en {path}: {exc}") from exc
    family = family_from_dict(data, default_name=path.stem)
    logger.debug(f"Fixture cargado: {path} ({family!r})")
    return family


def dump_fixture(family: TwoParamFamily) -> str:
    """Serialización canónica de la familia"""
    return json.dumps(family_to_dict(family), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_fixture(family: TwoParamFamily, path: Union[str, Path]) -> None:
    path = Path(path)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dump_fixture(family))
    logger.info(f"Fixture escrito en {path}")
