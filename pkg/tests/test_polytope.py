# tests/test_polytope.py
import pytest
import random
import sys
import os
from fractions import Fraction
sys.path.append(os.path.dirname(os.path.dirname(__file__)))

from core.errors import EmptyPolytopeError, UnboundedPolytopeError
from core.exactnum import RatMatrix
from core.polytope import (
    FaceQuery,
    HPolytope,
    drop_rows,
    face_nonempty,
    is_bounded,
    nonredundant_rows,
    vertices,
)

F = Fraction

SQUARE_ROWS = [[1, 0], [0, 1], [-1, 0], [0, -1]]


class TestHPolytope:

    def setup_method(self):
        self.square = HPolytope(RatMatrix.from_rows(SQUARE_ROWS), [0, 0, -1, -1])

    def test_bounded(self):
        """Test acotación del cono de recesión"""
        assert is_bounded(RatMatrix.from_rows(SQUARE_ROWS))
        assert not is_bounded(RatMatrix.from_rows([[1, 0], [0, 1]]))

    def test_vertices_with_tight_sets(self):
        """Test vértices del cuadrado en orden lexicográfico"""
        found = vertices(self.square)
        assert [v.point for v in found] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert found[0].tight == frozenset({0, 1})
        assert found[3].tight == frozenset({2, 3})

    def test_dimension_and_faces(self):
        assert self.square.dimension == 2
        assert self.square.face_dimension({0}) == 1
        assert self.square.face_dimension({0, 1}) == 0
        assert self.square.face_dimension({0, 2}) == -1

    def test_face_nonempty_strict(self):
        """Test cara abierta frente a cara cerrada"""
        assert face_nonempty(self.square, FaceQuery.of({0}), strict=True)
        assert face_nonempty(self.square, {0, 1}, strict=False)
        assert not face_nonempty(self.square, {0, 2}, strict=False)
        assert face_nonempty(self.square, (), strict=True)

    def test_empty_polytope(self):
        empty = HPolytope(RatMatrix.from_rows(SQUARE_ROWS), [1, 0, -F(1, 2), -1])
        assert empty.is_empty
        assert empty.dimension == -1
        with pytest.raises(EmptyPolytopeError):
            nonredundant_rows(empty)

    def test_implicit_equalities(self):
        """Test un segmento tiene dos filas activas en todo P"""
        segment = HPolytope(RatMatrix.from_rows(SQUARE_ROWS), [0, 0, 0, -1])
        assert segment.implicit_equalities == frozenset({0, 2})
        assert segment.dimension == 1

    def test_nonredundant_rows(self):
        """Test filas redundantes y filas nulas"""
        rows = SQUARE_ROWS + [[1, 1], [0, 0]]
        polytope = HPolytope(RatMatrix.from_rows(rows), [0, 0, -1, -1, -5, -1])
        report = nonredundant_rows(polytope)
        assert report.essential == frozenset({0, 1, 2, 3})
        assert report.trivial_satisfied == frozenset({5})
        assert not report.trivial_violated

    def test_drop_rows(self):
        smaller = drop_rows(self.square, [0])
        assert smaller.nrows == 3
        assert not smaller.bounded

    def test_unbounded_vertices(self):
        """Test la enumeración de vértices exige acotación"""
        quadrant = HPolytope(RatMatrix.from_rows([[1, 0], [0, 1]]), [0, 0])
        with pytest.raises(UnboundedPolytopeError):
            quadrant.vertices


def _random_box_polytope(rng):
    """Caja [-3, 3]^n con filas aleatorias añadidas; acotado siempre"""
    n = rng.choice((2, 3))
    rows, rhs = [], []
    for j in range(n):
        unit = [0] * n
        unit[j] = 1
        rows.extend([unit, [-v for v in unit]])
        rhs.extend([-3, -3])
    for _ in range(rng.randint(0, 8 - 2 * n)):
        rows.append([rng.randint(-5, 5) for _ in range(n)])
        rhs.append(rng.randint(-5, 5))
    return HPolytope(RatMatrix.from_rows(rows), rhs, bounded=True)


def _face_by_vertices(polytope, indices, strict):
    """F_I a partir de los vértices: no vacía si algún vértice contiene I"""
    matching = [v.tight for v in polytope.vertices if indices <= v.tight]
    if not matching:
        return False
    if not strict:
        return True
    return frozenset.intersection(*matching) == indices


class TestFaceOracle:

    def test_face_nonempty_matches_vertices(self):
        rng = random.Random(7)
        for _ in range(250):
            polytope = _random_box_polytope(rng)
            queries = [frozenset(rng.sample(range(polytope.nrows), rng.randint(0, 3))) for _ in range(3)]
            if polytope.vertices:
                queries.append(rng.choice(polytope.vertices).tight)
            for indices in queries:
                for strict in (False, True):
                    assert face_nonempty(polytope, indices, strict) == _face_by_vertices(polytope, indices, strict), (
                        polytope, sorted(indices), strict,
                    )


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
