# tests/test_mmp.py
import pytest
import random
import sys
import os
from fractions import Fraction
from pathlib import Path
sys.path.append(os.path.dirname(os.path.dirname(__file__)))

from core.errors import HypothesisError, WallError
from core.family import TwoParamFamily, carrier_line, classify_point
from core.fixtures import load_fixture
from core.mmp import DIVISORIAL, FIBRATION, FLIP, UPWARD, classify_wall, run_hmmp, verify_scaling, wall_offset

F = Fraction
FIXTURES = Path(__file__).parent.parent / 'fixtures'

TORIC = load_fixture(FIXTURES / 'toric-f2.json')
TORIC_SECOND = load_fixture(FIXTURES / 'toric-f2-second.json')
RANK_ONE = load_fixture(FIXTURES / 'horo-rank1.json')


class TestClassifyWall:

    def test_boundary_wall_is_fibration(self):
        """Test el techo ε = 1/2 es la fibración P1 x P1 → P1"""
        wall = classify_wall(TORIC, (F(0), F(1, 2)))
        assert wall.kind == FIBRATION
        assert wall.indices == frozenset({1, 3})
        assert TORIC.name_of(wall.source) == "P1xP1"
        assert TORIC.name_of(wall.target) == "P1"
        assert wall.source_picard == 2

    def test_divisorial_wall(self):
        """Test a δ = 2/5 la fila 4 se contrae en ε = 3/10"""
        wall = classify_wall(TORIC, (F(2, 5), F(3, 10)), direction=UPWARD)
        assert wall.kind == DIVISORIAL
        assert wall.contracted_row == 4
        assert not wall.not_mmp_step
        assert wall.source_picard == wall.target_picard + 1

    def test_point_not_on_wall(self):
        with pytest.raises(WallError):
            classify_wall(TORIC, (F(0), F(0)))

    def test_wrong_minimal_set(self):
        """Test I debe ser el conjunto minimal del punto"""
        with pytest.raises(WallError):
            classify_wall(TORIC, (F(0), F(1, 2)), indices={1, 3, 4})


class TestRunHmmp:

    def test_direct_fibration(self):
        """Test a δ = 0 el HMMP llega a la fibración sin pasos previos"""
        run = run_hmmp(TORIC, 0)
        assert [e.kind for e in run.events] == [FIBRATION]
        assert run.epsilon_max == F(1, 2)
        assert TORIC.name_of(run.initial) == "P1xP1"
        assert TORIC.name_of(run.penultimate) == "P1xP1"
        assert TORIC.name_of(run.target) == "P1"

    def test_divisorial_then_fibration(self):
        run = run_hmmp(TORIC, F(2, 5))
        assert [e.kind for e in run.events] == [DIVISORIAL, FIBRATION]
        assert run.events[0].epsilon == F(3, 10)
        assert run.events[0].wall.contracted_row == 4
        assert run.epsilon_max == F(1, 2)

    def test_epsilon_is_non_decreasing(self):
        run = run_hmmp(TORIC, F(2, 5))
        epsilons = [e.epsilon for e in run.events]
        assert epsilons == sorted(epsilons)
        assert all(e > run.epsilon_start for e in epsilons)

    def test_start_outside_u2(self):
        """Test el punto de partida debe estar en U2"""
        with pytest.raises(HypothesisError):
            run_hmmp(TORIC, 0, 1)


class TestVerifyScaling:

    def setup_method(self):
        self.run = run_hmmp(TORIC, 0)

    def test_expected_pair(self):
        assert verify_scaling(TORIC, self.run.penultimate, self.run.target, 0)

    def test_wrong_variety(self):
        """Test F2 no es la variedad final a δ = 0"""
        f2 = TORIC.variety_at((F(1), F(0)))
        assert not verify_scaling(TORIC, f2, self.run.target, 0)

    def test_insufficient_slack(self):
        """Test d_5 = 7/4 queda por debajo del pullback 2 sobre P1 x P1"""
        b = list(TORIC.b)
        b[4] = F(-7, 4)
        family = TwoParamFamily(TORIC.embedding, b, TORIC.b_prime, labels=TORIC.labels, name="holgura")
        assert not verify_scaling(family, self.run.penultimate, self.run.target, 0)


class TestRankOneWalls:

    def test_offset_stays_below_nearest_line(self):
        """Test en (0, 2/3) la recta más cercana es ω_{2,7}, a distancia 1/24"""
        line = carrier_line(RANK_ONE, {1, 7}).line
        assert wall_offset(RANK_ONE, (F(0), F(2, 3)), line, UPWARD) == F(1, 48)

    def test_steep_wall_is_crossed_vertically(self):
        """Test la pared ω_{1,7} se cruza sin pasar por el flip ω_{1,2}"""
        wall = classify_wall(RANK_ONE, (F(0), F(2, 3)))
        below = classify_point(RANK_ONE, 0, F(2, 3) - F(1, 1000))
        assert wall.kind == FIBRATION
        assert wall.indices == frozenset({1, 7})
        assert wall.source == below.variety
        assert RANK_ONE.name_of(wall.target) == "G/P1"

    def test_parallel_direction(self):
        with pytest.raises(WallError):
            classify_wall(RANK_ONE, (F(0), F(2, 3)), direction=(F(3), F(7)))


class TestRankOneScaling:

    def test_start_ends_in_first_fibration(self):
        """Test a δ = 0 el HMMP termina en X_1 → G/P_1"""
        run = run_hmmp(RANK_ONE, 0)
        below = classify_point(RANK_ONE, 0, F(2, 3) - F(1, 1000))
        assert run.epsilon_max == F(2, 3)
        assert run.penultimate == below.variety
        assert run.target == classify_point(RANK_ONE, 0, F(2, 3)).variety
        assert RANK_ONE.name_of(run.penultimate) == "X"
        assert RANK_ONE.name_of(run.target) == "G/P1"
        assert verify_scaling(RANK_ONE, run.penultimate, run.target, 0)

    def test_end_ends_in_last_fibration(self):
        """Test a δ = 1 el HMMP termina en Y → T"""
        run = run_hmmp(RANK_ONE, 1)
        below = classify_point(RANK_ONE, 1, F(1, 2) - F(1, 1000))
        assert run.epsilon_max == F(1, 2)
        assert run.penultimate == below.variety
        assert RANK_ONE.name_of(run.penultimate) == "Y"
        assert RANK_ONE.name_of(run.target) == "T"
        assert verify_scaling(RANK_ONE, run.penultimate, run.target, 1)


class TestPicardBookkeeping:

    def test_random_vertical_runs(self):
        """Test ρ baja en 1 en cada contracción divisorial y se conserva en los flips"""
        rng = random.Random(997)
        for family in (TORIC, TORIC_SECOND):
            for _ in range(15):
                delta = F(rng.randint(1, 996), 997)
                run = run_hmmp(family, delta)
                assert run.events[-1].kind == FIBRATION
                for event in run.events[:-1]:
                    wall = event.wall
                    assert wall.kind in (DIVISORIAL, FLIP)
                    if wall.kind == DIVISORIAL:
                        assert wall.source_picard == wall.target_picard + 1
                        assert wall.contracted_row in wall.source.ray_rows
                        assert wall.contracted_row not in wall.target.ray_rows
                    else:
                        assert wall.source_picard == wall.target_picard
                epsilons = [e.epsilon for e in run.events]
                assert epsilons == sorted(epsilons)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
