# tests/test_config.py
import json
import logging
import pytest
import sys
import os
from fractions import Fraction
sys.path.append(os.path.dirname(os.path.dirname(__file__)))

from config.settings import EngineConfig, StripConfig
from utils.logger import LogContext, set_log_level, setup_logger

ENV_VARS = ('SARKISOV_N_JOBS', 'SARKISOV_PROGRESS', 'SARKISOV_EPSILON_MIN', 'SARKISOV_MAX_HALVINGS')


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)


class TestEngineConfig:

    def test_defaults(self):
        """Test valores por defecto"""
        config = EngineConfig()
        assert config.compute.n_jobs == 1
        assert not config.compute.show_progress
        assert config.strip.delta_min == 0
        assert config.strip.delta_max == 1
        assert config.strip.epsilon_min == -2
        assert config.strip.epsilon_max is None
        assert config.sampling.initial_offset == Fraction(1, 8)
        assert config.sampling.max_halvings == 24
        assert config.sampling.stability_halvings == 2

    def test_environment(self, monkeypatch):
        monkeypatch.setenv('SARKISOV_N_JOBS', '4')
        monkeypatch.setenv('SARKISOV_PROGRESS', 'true')
        monkeypatch.setenv('SARKISOV_EPSILON_MIN', '-3/2')
        config = EngineConfig()
        assert config.compute.n_jobs == 4
        assert config.compute.show_progress
        assert config.strip.epsilon_min == Fraction(-3, 2)

    def test_invalid_environment(self, monkeypatch):
        monkeypatch.setenv('SARKISOV_N_JOBS', '0')
        with pytest.raises(ValueError):
            EngineConfig()

    def test_to_dict_uses_text_rationals(self):
        data = EngineConfig().to_dict()
        assert data['sampling']['initial_offset'] == "1/8"
        assert data['strip']['epsilon_min'] == "-2"
        assert data['strip']['epsilon_max'] is None

    def test_json_round_trip(self, tmp_path):
        """Test guardar y cargar en JSON"""
        config = EngineConfig()
        config.compute.n_jobs = 3
        config.sampling.initial_offset = Fraction(1, 16)
        path = tmp_path / 'config.json'
        config.save_to_file(str(path))
        loaded = EngineConfig.load_from_file(str(path))
        assert loaded.compute.n_jobs == 3
        assert loaded.sampling.initial_offset == Fraction(1, 16)
        assert loaded.to_dict() == config.to_dict()

    def test_yaml_round_trip(self, tmp_path):
        config = EngineConfig()
        config.strip = StripConfig.from_dict({'epsilon_min': '-5/2', 'epsilon_max': '3'})
        path = tmp_path / 'config.yaml'
        config.save_to_file(str(path))
        loaded = EngineConfig.load_from_file(str(path))
        assert loaded.strip.epsilon_min == Fraction(-5, 2)
        assert loaded.strip.epsilon_max == 3

    def test_missing_file_gives_defaults(self, tmp_path):
        loaded = EngineConfig.load_from_file(str(tmp_path / 'nada.json'))
        assert loaded.to_dict() == EngineConfig().to_dict()

    def test_invalid_file(self, tmp_path):
        """Test n_jobs = 0 en el archivo se rechaza"""
        path = tmp_path / 'config.json'
        path.write_text(json.dumps({'compute': {'n_jobs': 0}}), encoding='utf-8')
        with pytest.raises(ValueError):
            EngineConfig.load_from_file(str(path))

    def test_float_rejected(self):
        with pytest.raises(ValueError):
            StripConfig.from_dict({'epsilon_min': -0.5})


class TestLogger:

    def test_set_log_level(self):
        logger = setup_logger('prueba.nivel', 'INFO')
        set_log_level('DEBUG')
        assert logger.level == logging.DEBUG
        assert all(h.level == logging.DEBUG for h in logger.handlers)
        set_log_level('INFO')
        assert logger.level == logging.INFO

    def test_log_context_does_not_swallow(self):
        logger = setup_logger('prueba.contexto')
        with pytest.raises(RuntimeError):
            with LogContext(logger, "fase"):
                raise RuntimeError("falla")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
