"""
Configuración central del motor de Sarkisov
"""

import json
import os
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dotenv import load_dotenv

from utils.logger import setup_logger

logger = setup_logger(__name__)

load_dotenv()


def _rat(value: Union[int, str, Fraction]) -> Fraction:
    if isinstance(value, (bool, float)):
        raise ValueError(f"Valor no racional exacto en la configuración: {value!r}")
    return Fraction(value)


def _rat_text(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else str(value)


@dataclass
class ComputeConfig:
    """Paralelismo y barras de progreso"""
    n_jobs: int = 1
    show_progress: bool = False


@dataclass
class StripConfig:
    """Franja del plano (δ, ε) que se descompone"""
    delta_min: Fraction = Fraction(0)
    delta_max: Fraction = Fraction(1)
    epsilon_min: Fraction = Fraction(-2)
    epsilon_max: Optional[Fraction] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StripConfig":
        strip = cls()
        for key in ('delta_min', 'delta_max', 'epsilon_min', 'epsilon_max'):
            if data.get(key) is not None:
                setattr(strip, key, _rat(data[key]))
        return strip

    def to_dict(self) -> Dict[str, Optional[str]]:
        return {
            'delta_min': _rat_text(self.delta_min),
            'delta_max': _rat_text(self.delta_max),
            'epsilon_min': _rat_text(self.epsilon_min),
            'epsilon_max': _rat_text(self.epsilon_max),
        }


@dataclass
class SamplingConfig:
    """Muestreo por mitades alrededor de paredes y anclas"""
    initial_offset: Fraction = Fraction(1, 8)
    max_halvings: int = 24
    stability_halvings: int = 2


@dataclass
class PlotConfig:
    """Figuras SVG"""
    width_in: float = 6.0
    height_in: float = 6.0
    fibration_color: str = 'red'
    divisorial_color: str = 'blue'
    flip_color: str = 'black'
    isomorphism_color: str = 'gray'
    font_size: int = 8


class EngineConfig:
    """Configuración principal del motor"""

    def __init__(self):
        self.compute = ComputeConfig()
        self.strip = StripConfig()
        self.sampling = SamplingConfig()
        self.plot = PlotConfig()

        # Cargar desde variables de entorno
        self._load_from_env()

        # Validar configuración
        self._validate_config()

    def _load_from_env(self):
        """Carga configuración desde variables de entorno"""
        self.compute.n_jobs = int(os.getenv('SARKISOV_N_JOBS', str(self.compute.n_jobs)))
        self.compute.show_progress = os.getenv('SARKISOV_PROGRESS', 'false').lower() == 'true'

        epsilon_min = os.getenv('SARKISOV_EPSILON_MIN')
        if epsilon_min:
            self.strip.epsilon_min = _rat(epsilon_min)

        self.sampling.max_halvings = int(os.getenv('SARKISOV_MAX_HALVINGS', str(self.sampling.max_halvings)))

    def _validate_config(self):
        """Valida la configuración"""
        if self.compute.n_jobs < 1:
            raise ValueError("n_jobs debe ser >= 1")

        if self.strip.delta_min >= self.strip.delta_max:
            raise ValueError("delta_min debe ser menor que delta_max")

        if self.strip.epsilon_max is not None and self.strip.epsilon_min >= self.strip.epsilon_max:
            raise ValueError("epsilon_min debe ser menor que epsilon_max")

        if self.sampling.initial_offset <= 0:
            raise ValueError("El desplazamiento inicial de muestreo debe ser positivo")

        if self.sampling.max_halvings < 1 or self.sampling.stability_halvings < 0:
            raise ValueError("Número de mitades de muestreo inválido")

        if self.plot.width_in <= 0 or self.plot.height_in <= 0:
            raise ValueError("Las dimensiones de la figura deben ser positivas")

    def to_dict(self) -> dict:
        """Convierte configuración a diccionario (racionales como "p/q")"""
        return {
            'compute': asdict(self.compute),
            'strip': self.strip.to_dict(),
            'sampling': {
                'initial_offset': _rat_text(self.sampling.initial_offset),
                'max_halvings': self.sampling.max_halvings,
                'stability_halvings': self.sampling.stability_halvings,
            },
            'plot': asdict(self.plot),
        }

    def save_to_file(self, filepath: Optional[str] = None):
        """Guarda configuración en archivo JSON o YAML según la extensión"""
        if filepath is None:
            filepath = Path(__file__).parent / 'config.json'
        path = Path(filepath)

        with open(path, 'w', encoding='utf-8') as f:
            if path.suffix in ('.yaml', '.yml'):
                yaml.safe_dump(self.to_dict(), f, sort_keys=True, allow_unicode=True)
            else:
                json.dump(self.to_dict(), f, indent=2, sort_keys=True)

        logger.info(f"Configuración guardada en: {path}")

    @classmethod
    def load_from_file(cls, filepath: Optional[str] = None) -> 'EngineConfig':
        """Carga configuración desde archivo; las claves desconocidas se ignoran"""
        if filepath is None:
            filepath = Path(__file__).parent / 'config.json'
        path = Path(filepath)

        config = cls()

        if not path.exists():
            logger.warning(f"Archivo de configuración inexistente: {path}")
            return config

        with open(path, 'r', encoding='utf-8') as f:
            if path.suffix in ('.yaml', '.yml'):
                data = yaml.safe_load(f) or {}
            else:
                data = json.load(f)

        for key, value in data.get('compute', {}).items():
            if hasattr(config.compute, key):
                setattr(config.compute, key, value)

        if 'strip' in data:
            config.strip = StripConfig.from_dict(data['strip'])

        for key, value in data.get('sampling', {}).items():
            if hasattr(config.sampling, key):
                setattr(config.sampling, key, _rat(value) if key == 'initial_offset' else value)

        for key, value in data.get('plot', {}).items():
            if hasattr(config.plot, key):
                setattr(config.plot, key, value)

        config._validate_config()
        return config


# Configuración por defecto
DEFAULT_CONFIG = EngineConfig()
