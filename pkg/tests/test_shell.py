# tests/test_shell.py
import json
import pytest
import sys
import os
from fractions import Fraction
from pathlib import Path
sys.path.append(os.path.dirname(os.path.dirname(__file__)))

from core.errors import FixtureError, ValidationError
from core.family import decompose
from core.fixtures import dump_fixture, family_from_dict, family_to_dict, load_fixture, write_fixture
from core.mmp import DIVISORIAL, FIBRATION, FLIP, ISOMORPHISM
from core.plotting import emit_svg
from core.report import decomposition_data
from core.sarkisov import mori_chain
from main import EXIT_GENERICITY, EXIT_OK, EXIT_VALIDATION, cli_main
from utils.helpers import helpers

F = Fraction
FIXTURES = Path(__file__).parent.parent / 'fixtures'
TORIC_PATH = str(FIXTURES / 'toric-f2.json')


def _toric_dict():
    with open(TORIC_PATH, 'r', encoding='utf-8') as f:
        return json.load(f)


class TestHelpers:

    def test_parse_rational(self):
        """Test racionales en texto"""
        assert helpers.parse_rational("3/6") == F(1, 2)
        assert helpers.parse_rational(" -2 ") == F(-2)
        assert helpers.parse_rational(5) == F(5)

    def test_parse_rational_rejects_decimals(self):
        for bad in ("0.5", "1e3", "", "a/b", 0.5, True, None):
            with pytest.raises(ValidationError):
                helpers.parse_rational(bad)

    def test_format(self):
        assert helpers.format_rational(F(4, 2)) == "2"
        assert helpers.format_rational(F(-7, 4)) == "-7/4"
        assert helpers.format_rational(None) is None
        assert helpers.format_point((F(1, 3), F(0))) == "(1/3, 0)"
        assert helpers.format_indices([5, 1, 3]) == "{1,3,5}"
        assert helpers.format_indices(None) == "-"


class TestFixtures:

    def test_round_trip(self):
        """Test cargar y volver a escribir da el mismo diccionario"""
        family = load_fixture(TORIC_PATH)
        assert family.name == "toric-f2"
        assert family_to_dict(family) == _toric_dict()

    def test_dump_is_canonical(self):
        text = Path(TORIC_PATH).read_text(encoding='utf-8')
        assert dump_fixture(load_fixture(TORIC_PATH)) == text

    def test_write_fixture(self, tmp_path):
        family = load_fixture(TORIC_PATH)
        out = tmp_path / 'copia.json'
        write_fixture(family, out)
        assert load_fixture(out).b == family.b

    def test_missing_file(self, tmp_path):
        with pytest.raises(FixtureError):
            load_fixture(tmp_path / 'no-existe.json')

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'roto.json'
        path.write_text("{", encoding='utf-8')
        with pytest.raises(FixtureError):
            load_fixture(path)

    def test_missing_key(self):
        """Test falta la columna B"""
        data = _toric_dict()
        del data['B']
        with pytest.raises(FixtureError):
            family_from_dict(data)

    def test_non_integer_vector(self):
        data = _toric_dict()
        data['rows'][0]['vector'] = [1.0, 0]
        with pytest.raises(FixtureError):
            family_from_dict(data)

    def test_unknown_row_kind(self):
        data = _toric_dict()
        data['rows'][0]['kind'] = 'divisor'
        with pytest.raises(FixtureError):
            family_from_dict(data)

    def test_unknown_strip_key(self):
        data = _toric_dict()
        data['strip']['gamma'] = "1"
        with pytest.raises(FixtureError):
            family_from_dict(data)

    def test_float_coefficient(self):
        """Test los coeficientes de B deben ser racionales exactos"""
        data = _toric_dict()
        data['B'][2] = -1.0
        with pytest.raises(ValidationError):
            family_from_dict(data)


class TestPlot:

    def test_emit_svg_counts(self, tmp_path):
        family = load_fixture(TORIC_PATH)
        decomposition = decompose(family)
        chain = mori_chain(family, report=decomposition.genericity)
        out = tmp_path / 'toric.svg'
        counts = emit_svg(family, decomposition, chain, out)
        assert counts['anchors'] == 2
        assert sum(v for k, v in counts.items() if k != 'anchors') == len(decomposition.walls)
        svg = out.read_text(encoding='utf-8')
        assert 'id="anchor-0"' in svg
        assert 'id="anchor-1"' in svg
        assert 'id="wall-Fibration-' in svg

    def test_every_wall_is_classified(self, tmp_path):
        """Test las paredes cortas de toric-f2-second tienen tipo"""
        family = load_fixture(FIXTURES / 'toric-f2-second.json')
        decomposition = decompose(family)
        data = decomposition_data(family, decomposition)
        kinds = {w['kind'] for w in data['walls']}
        assert kinds <= {FIBRATION, DIVISORIAL, FLIP, ISOMORPHISM}
        short = [w for w in data['walls'] if w['start'] == ["7/11", "31/22"] or w['end'] == ["7/11", "31/22"]]
        assert short
        chain = mori_chain(family, report=decomposition.genericity)
        counts = emit_svg(family, decomposition, chain, tmp_path / 'second.svg')
        assert set(counts) <= {FIBRATION, DIVISORIAL, FLIP, ISOMORPHISM, 'anchors'}
        assert sum(v for k, v in counts.items() if k != 'anchors') == len(decomposition.walls)


class TestCli:

    def test_classify(self, capsys):
        """Test clasificación de un cruce de paredes"""
        code = cli_main(['classify', TORIC_PATH, '--delta', '1/2', '--epsilon', '0'])
        assert code == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "U0prime"

    def test_classify_json(self, capsys):
        code = cli_main(['classify', TORIC_PATH, '--delta', '0', '--epsilon', '1/2', '--json'])
        assert code == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data['kind'] == "U1"
        assert data['indices'] == [1, 3]
        assert data['point'] == ["0", "1/2"]
        assert data['on_boundary'] is True

    def test_check(self, capsys):
        assert cli_main(['check', TORIC_PATH]) == EXIT_OK
        out = capsys.readouterr().out
        assert "genericidad: OK" in out
        assert "hipótesis: OK" in out

    def test_check_non_generic(self, tmp_path, capsys):
        """Test código 3 para datos no genéricos"""
        data = _toric_dict()
        data['Bprime'] = list(data['B'])
        path = tmp_path / 'constante.json'
        path.write_text(json.dumps(data), encoding='utf-8')
        assert cli_main(['check', str(path), '--json']) == EXIT_GENERICITY
        report = json.loads(capsys.readouterr().out)
        assert report['passed'] is False
        assert any(v['kind'] == 'plane' for v in report['violations'])

    def test_mmp_json(self, capsys):
        assert cli_main(['mmp', TORIC_PATH, '--delta', '2/5', '--json']) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert [e['kind'] for e in data['events']] == ["Divisorial", "Fibration"]
        assert data['events'][0]['epsilon'] == "3/10"
        assert data['events'][0]['contracted_row'] == 4
        assert data['epsilon_max'] == "1/2"
        assert data['target'] == "P1"

    def test_mmp_outside_start(self):
        code = cli_main(['mmp', TORIC_PATH, '--delta', '0', '--epsilon-start', '1'])
        assert code == EXIT_VALIDATION

    def test_sarkisov_text(self, capsys):
        assert cli_main(['sarkisov', TORIC_PATH]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("programa de Sarkisov de toric-f2: P1xP1/P1 =>")
        assert "eslabones (2):" in lines

    def test_decompose_json(self, capsys):
        assert cli_main(['decompose', TORIC_PATH, '--json']) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data['family'] == "toric-f2"
        assert data['genericity']['passed'] is True
        assert "F2" in {c['name'] for c in data['cells']}

    def test_normalize(self, capsys):
        assert cli_main(['normalize', TORIC_PATH]) == EXIT_OK
        assert capsys.readouterr().out == Path(TORIC_PATH).read_text(encoding='utf-8')

    def test_plot(self, tmp_path, capsys):
        out = tmp_path / 'figura.svg'
        assert cli_main(['plot', TORIC_PATH, '--out', str(out)]) == EXIT_OK
        assert out.exists()
        assert "anchors: 2" in capsys.readouterr().out

    def test_missing_fixture(self, tmp_path):
        assert cli_main(['check', str(tmp_path / 'nada.json')]) == EXIT_VALIDATION

    def test_float_argument(self):
        """Test '0.5' no es un racional exacto"""
        code = cli_main(['classify', TORIC_PATH, '--delta', '0.5', '--epsilon', '0'])
        assert code == EXIT_VALIDATION

    def test_no_command(self):
        assert cli_main([]) == EXIT_VALIDATION

    def test_version(self):
        assert cli_main(['--version']) == EXIT_OK


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
