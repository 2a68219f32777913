# tests/test_horo.py
import pytest
import sys
import os
from fractions import Fraction
from pathlib import Path
sys.path.append(os.path.dirname(os.path.dirname(__file__)))

from core.errors import NotNefError, NotQCartierError, ValidationError
from core.fixtures import load_fixture
from core.horo import (
    COLOR,
    RAY,
    DivisorCoeffs,
    EmbeddingData,
    Row,
    WeightOffset,
    colored_fan_from_divisor,
    contract_nef,
    divisor_tests,
    extremal_generators,
    is_qfactorial,
    piecewise_linear_function,
    picard_number,
    polytopes_equivalent,
    pseudo_moment_polytope,
    pullback_divisor,
    variety_from_polytope,
    weight_offset,
)

F = Fraction
FIXTURES = Path(__file__).parent.parent / 'fixtures'

TORIC = load_fixture(FIXTURES / 'toric-f2.json')


def _ray(row_id, vector):
    return Row(row_id, RAY, tuple(vector), F(1))


class TestEmbeddingData:

    def test_ids_and_kinds(self):
        embedding = TORIC.embedding
        assert embedding.ids == (1, 2, 3, 4, 5, 6)
        assert embedding.ray_ids == frozenset({1, 2, 3, 4, 5, 6})
        assert not embedding.color_ids
        assert embedding.bounded

    def test_rejects_non_primitive_ray(self):
        """Test un rayo debe ser primitivo"""
        with pytest.raises(ValidationError):
            EmbeddingData(2, (_ray(1, (2, 0)),))

    def test_rejects_small_color_coefficient(self):
        with pytest.raises(ValidationError):
            EmbeddingData(1, (Row(1, COLOR, (1,), F(1)),))

    def test_rejects_ids_out_of_order(self):
        with pytest.raises(ValidationError):
            EmbeddingData(1, (_ray(2, (1,)), _ray(1, (-1,))))


class TestVarieties:

    def test_p1xp1_at_origin(self):
        """Test en (0,0) los rayos 5 y 6 no tocan el polítopo: P1 x P1"""
        variety = TORIC.variety_at((F(0), F(0)))
        assert variety.dimension == 2
        assert is_qfactorial(variety)
        assert picard_number(variety) == 2
        assert variety.ray_rows == frozenset({1, 2, 3, 4})
        assert len(variety.fan) == 4

    def test_blowup_has_picard_three(self):
        variety = TORIC.variety_at((F(0), F(-1)))
        assert picard_number(variety) == 3
        assert variety.ray_rows == frozenset({1, 2, 3, 4, 5})

    def test_f2_differs_from_p1xp1(self):
        """Test F2 y P1 x P1 tienen abanicos distintos"""
        f2 = TORIC.variety_at((F(1), F(0)))
        assert f2.ray_rows == frozenset({1, 2, 3, 6})
        assert f2 != TORIC.variety_at((F(0), F(0)))
        assert picard_number(f2) == 2

    def test_fibration_base_has_rank_one(self):
        base = TORIC.variety_at((F(0), F(1, 2)))
        assert base.dimension == 1

    def test_colored_fan_from_divisor(self):
        divisor = TORIC.divisor(0, 0)
        assert colored_fan_from_divisor(TORIC.embedding, divisor) == TORIC.variety_at((F(0), F(0)))

    def test_extremal_generators(self):
        """Test (1,1) no es extremo en el cono de (1,0) y (0,1)"""
        assert extremal_generators([(1, 0), (0, 1), (1, 1), (2, 0)]) == ((0, 1), (1, 0))


class TestDivisors:

    def setup_method(self):
        self.embedding = TORIC.embedding
        self.reference = TORIC.divisor(0, 0)

    def test_reference_divisor_is_ample(self):
        tests = divisor_tests(self.embedding, self.reference, self.reference)
        assert tests.qcartier
        assert tests.cartier
        assert tests.qfactorial
        assert tests.ample
        assert tests.nef

    def test_nef_but_not_ample(self):
        """Test el pullback de O(1) de un factor es nef pero no amplio"""
        divisor = DivisorCoeffs.of([0, 0, 0, 2, "5/2", 4])
        tests = divisor_tests(self.embedding, self.reference, divisor)
        assert tests.nef
        assert not tests.ample

    def test_pullback_to_exceptional_rays(self):
        """Test h_D en (1,-1) y (2,-1) sobre el cono de las filas 1 y 4"""
        fan = TORIC.variety_at((F(0), F(0)))
        pulled = pullback_divisor(self.embedding, fan, {1: F(0), 2: F(0), 3: F(1), 4: F(2)})
        assert pulled.coefficient(5) == 2
        assert pulled.coefficient(6) == 2
        assert pulled.coefficient(3) == 1

    def test_pullback_needs_all_fan_rows(self):
        fan = TORIC.variety_at((F(0), F(0)))
        with pytest.raises(ValidationError):
            pullback_divisor(self.embedding, fan, {1: F(0), 2: F(0)})

    def test_pullback_not_qcartier(self):
        """Test un cono con tres rayos sin forma lineal común"""
        rows = (_ray(1, (1, 0)), _ray(2, (0, 1)), _ray(3, (-1, -1)), _ray(4, (1, 1)))
        embedding = EmbeddingData(2, rows)
        reference = DivisorCoeffs.of([0, 0, 1, 0])
        fan = variety_from_polytope(embedding, pseudo_moment_polytope(embedding, reference))
        with pytest.raises(NotQCartierError):
            pullback_divisor(embedding, fan, {1: F(0), 2: F(0), 3: F(1), 4: F(1)})

    def test_piecewise_linear_function(self):
        """Test h_D en el rayo (1,-1) usa la forma del cono de las filas 1 y 4"""
        fan = TORIC.variety_at((F(0), F(0)))
        h = piecewise_linear_function(self.embedding, [c.rows for c in fan.fan], self.reference)
        assert h.qcartier
        forms = {p.rows: p.form for p in h.pieces}
        assert forms[frozenset({1, 4})] == (F(0), F(2))
        assert h.value(self.embedding, (1, -1)) == 2

    def test_contract_nef_to_base(self):
        """Test D(0, 1/2) contrae P1 x P1 sobre P1"""
        source = TORIC.variety_at((F(0), F(0)))
        base = contract_nef(self.embedding, source, TORIC.divisor(0, F(1, 2)))
        assert base == TORIC.variety_at((F(0), F(1, 2)))
        assert base.dimension == 1

    def test_contract_not_nef(self):
        source = TORIC.variety_at((F(0), F(0)))
        with pytest.raises(NotNefError):
            contract_nef(self.embedding, source, TORIC.divisor(0, 1))

    def test_polytopes_equivalent(self):
        """Test mismos tipos combinatorios dentro de una celda"""
        first = TORIC.polytope(0, 0)
        second = TORIC.polytope(0, F(1, 4))
        third = TORIC.polytope(1, 0)
        assert polytopes_equivalent(self.embedding, first, None, second, None)
        assert not polytopes_equivalent(self.embedding, first, None, third, None)

    def test_polytopes_equivalent_checks_offsets(self):
        """Test una traslación con colores desconocidos se rechaza"""
        first = TORIC.polytope(0, 0)
        second = TORIC.polytope(0, F(1, 4))
        empty = weight_offset(self.embedding, TORIC.divisor(0, 0))
        assert empty.color_coeffs == ()
        assert polytopes_equivalent(self.embedding, first, empty, second, empty)
        with pytest.raises(ValidationError):
            polytopes_equivalent(self.embedding, first, WeightOffset(((99, F(1)),)), second, None)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
