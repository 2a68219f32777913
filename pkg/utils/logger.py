"""
Sistema de logging del motor de Sarkisov
"""

import functools
import logging
import logging.handlers
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional

from colorama import Fore, Style, just_fix_windows_console

just_fix_windows_console()


class ColoredFormatter(logging.Formatter):
    """Formato de logging con colores para terminal"""

    COLORS = {
        'DEBUG': Fore.CYAN,
        'INFO': Fore.GREEN,
        'WARNING': Fore.YELLOW,
        'ERROR': Fore.RED,
        'CRITICAL': Fore.MAGENTA,
    }

    def format(self, record):
        color = self.COLORS.get(record.levelname, '')
        original = record.levelname
        record.levelname = f"{color}{original}{Style.RESET_ALL}"
        try:
            return super().format(record)
        finally:
            record.levelname = original


_ENGINE_LOGGERS: Dict[str, logging.Logger] = {}


class EngineLogger:
    """Logger del motor: consola en stderr y, si LOG_DIR está definido, archivo rotativo"""

    def __init__(self, name: str, log_level: str = 'INFO', log_dir: Optional[str] = None):
        self.name = name
        self.log_level = getattr(logging, log_level.upper(), logging.INFO)
        self.log_dir = Path(log_dir) if log_dir else None

        self.logger = logging.getLogger(name)
        self.logger.setLevel(self.log_level)
        self.logger.handlers.clear()

        self._setup_console_handler()
        if self.log_dir is not None:
            self._setup_file_handler()

    def _setup_console_handler(self):
        """Handler de consola (stderr: stdout queda para los reportes)"""
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self.log_level)
        console_handler.setFormatter(ColoredFormatter(
            '%(asctime)s [%(levelname)s] %(name)s: %(message)s',
            datefmt='%H:%M:%S'
        ))
        self.logger.addHandler(console_handler)

    def _setup_file_handler(self):
        """Archivo rotativo con formato detallado"""
        self.log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            self.log_dir / 'sarkisov.log',
            maxBytes=10 * 1024 * 1024,
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(self.log_level)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s [%(levelname)s] %(name)s [%(funcName)s:%(lineno)d] %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        self.logger.addHandler(file_handler)

    def get_logger(self) -> logging.Logger:
        return self.logger


def setup_logger(name: str = 'sarkisov', log_level: Optional[str] = None) -> logging.Logger:
    """
    Configura y retorna un logger

    Args:
        name: Nombre del logger
        log_level: Nivel de logging; por defecto LOG_LEVEL o INFO

    Returns:
        Logger configurado
    """
    if log_level is None:
        log_level = os.getenv('LOG_LEVEL', 'INFO')
    logger = EngineLogger(name, log_level, os.getenv('LOG_DIR') or None).get_logger()
    _ENGINE_LOGGERS[name] = logger
    return logger


def set_log_level(log_level: str):
    """Cambia el nivel de todos los loggers ya creados y de sus handlers"""
    level = getattr(logging, log_level.upper(), logging.INFO)
    for logger in _ENGINE_LOGGERS.values():
        logger.setLevel(level)
        for handler in logger.handlers:
            handler.setLevel(level)


def setup_external_loggers():
    """Reduce el ruido de librerías externas"""
    for name in ('matplotlib', 'matplotlib.font_manager', 'joblib', 'PIL'):
        logging.getLogger(name).setLevel(logging.WARNING)


setup_external_loggers()


class LogContext:
    """Context manager que registra inicio, fin y duración de una fase"""

    def __init__(self, logger: logging.Logger, context: str):
        self.logger = logger
        self.context = context
        self.start_time = None

    def __enter__(self):
        self.start_time = datetime.now()
        self.logger.info(f"Iniciando {self.context}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        duration = datetime.now() - self.start_time
        if exc_type is None:
            self.logger.info(f"Completado {self.context} en {duration.total_seconds():.2f}s")
        else:
            self.logger.error(f"Error en {self.context}: {exc_val}")
        return False


def log_function_call(logger: logging.Logger):
    """Decorador para loggear llamadas a funciones"""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            logger.debug(f"Llamando {func.__name__} con args={args}, kwargs={kwargs}")
            try:
                result = func(*args, **kwargs)
                logger.debug(f"{func.__name__} completado exitosamente")
                return result
            except Exception as e:
                logger.error(f"Error en {func.__name__}: {e}")
                raise
        return wrapper
    return decorator
