# core/plotting.py
"""
Figura SVG de Ω_∅ en el plano (δ, ε): celdas etiquetadas, paredes
coloreadas por tipo y anclas de la cadena de Mori.
"""

from pathlib import Path
from typing import Dict, Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from config.settings import DEFAULT_CONFIG, EngineConfig  # noqa: E402
from core.family import Decomposition, TwoParamFamily  # noqa: E402
from core.mmp import DIVISORIAL, FIBRATION, FLIP, ISOMORPHISM  # noqa: E402
from core.report import wall_classification  # noqa: E402
from core.sarkisov import MoriChain  # noqa: E402
from utils.helpers import helpers  # noqa: E402
from utils.logger import LogContext, setup_logger  # noqa: E402

logger = setup_logger(__name__)

matplotlib.rcParams['svg.hashsalt'] = 'sarkisov'


def _colors(config: EngineConfig) -> Dict[str, str]:
    plot = config.plot
    return {
        FIBRATION: plot.fibration_color,
        DIVISORIAL: plot.divisorial_color,
        FLIP: plot.flip_color,
        ISOMORPHISM: plot.isomorphism_color,
    }


def emit_svg(
    family: TwoParamFamily,
    decomposition: Decomposition,
    chain: Optional[MoriChain],
    out: Union[str, Path],
    config: Optional[EngineConfig] = None,
) -> Dict[str, int]:
    """
    Dibuja la descomposición y devuelve cuántas paredes de cada tipo y
    cuántas anclas se dibujaron.
    """
    config = config or DEFAULT_CONFIG
    colors = _colors(config)
    counts: Dict[str, int] = {}
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)

    with LogContext(logger, f"figura SVG de {family.name}"):
        fig, ax = plt.subplots(1, 1, figsize=(config.plot.width_in, config.plot.height_in))
        polygon = decomposition.polygon
        if not polygon.is_empty:
            xs = [float(p[0]) for p in polygon.vertices]
            ys = [float(p[1]) for p in polygon.vertices]
            ax.fill(xs, ys, color="0.95", zorder=0)

        for cell in decomposition.cells:
            ax.text(
                float(cell.sample[0]), float(cell.sample[1]), cell.name,
                fontsize=config.plot.font_size, ha="center", va="center",
            )

        for i, wall in enumerate(decomposition.walls):
            kind = wall_classification(family, wall, config).kind
            (artist,) = ax.plot(
                [float(wall.start[0]), float(wall.end[0])],
                [float(wall.start[1]), float(wall.end[1])],
                color=colors[kind], linewidth=1.5, zorder=2,
            )
            artist.set_gid(f"wall-{kind}-{i}")
            counts[kind] = counts.get(kind, 0) + 1

        anchors = chain.anchors if chain is not None else ()
        for i, anchor in enumerate(anchors):
            (artist,) = ax.plot(
                [float(anchor.point[0])], [float(anchor.point[1])],
                marker="o", color="black", markersize=5, zorder=3,
            )
            artist.set_gid(f"anchor-{i}")
            ax.annotate(
                f"L = {helpers.format_indices(anchor.indices)}",
                (float(anchor.point[0]), float(anchor.point[1])),
                textcoords="offset points", xytext=(4, 6), fontsize=config.plot.font_size,
            )
        counts['anchors'] = len(anchors)

        if not polygon.is_empty:
            ax.set_xlim(min(xs) - 0.05, max(xs) + 0.05)
        ax.set_xlabel("δ")
        ax.set_ylabel("ε")
        ax.set_title(family.name)
        fig.savefig(path, format="svg", metadata={'Date': None})
        plt.close(fig)
    logger.info(f"Figura guardada en {path}")
    return counts
