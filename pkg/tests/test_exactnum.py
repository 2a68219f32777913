# tests/test_exactnum.py
import random
import pytest
import sys
import os
from fractions import Fraction
sys.path.append(os.path.dirname(os.path.dirname(__file__)))

import sympy

from core.errors import DimensionMismatchError, ValidationError
from core.exactnum import (
    LatticeBasis,
    RatMatrix,
    circuit_relation,
    circuits,
    hermite_normal_form,
    integer_kernel,
    kernel_basis,
    lattice_intersect_kernel,
    primitive,
    solve_affine,
    to_rat,
    xgcd,
)
from core.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, maximize

F = Fraction


def _random_matrix(rng: random.Random, nrows: int, ncols: int) -> RatMatrix:
    return RatMatrix.from_rows(
        [[rng.randint(-3, 3) for _ in range(ncols)] for _ in range(nrows)], ncols
    )


class TestRationals:

    def test_to_rat_accepts_exact_values(self):
        """Test conversión de enteros, cadenas y fracciones"""
        assert to_rat(3) == F(3)
        assert to_rat("-7/4") == F(-7, 4)
        assert to_rat(F(1, 3)) == F(1, 3)

    def test_to_rat_rejects_floats(self):
        """Test los flotantes y booleanos no son racionales exactos"""
        with pytest.raises(ValidationError):
            to_rat(0.5)
        with pytest.raises(ValidationError):
            to_rat(True)
        with pytest.raises(ValidationError):
            to_rat("1/0")

    def test_primitive(self):
        assert primitive((2, 4)) == (1, 2)
        assert primitive((F(1, 2), F(1, 3))) == (3, 2)
        assert primitive((0, 0)) == (0, 0)

    def test_xgcd_bezout(self):
        """Test identidad de Bezout"""
        for a, b in [(12, 18), (-4, 6), (7, 0), (0, -5)]:
            g, s, t = xgcd(a, b)
            assert g >= 0
            assert s * a + t * b == g


class TestLinearAlgebra:

    def test_solve_affine_unique(self):
        a = RatMatrix.from_rows([[1, 0], [0, 1]])
        sol = solve_affine(a, [2, "3/2"])
        assert sol.unique
        assert sol.solution == (F(2), F(3, 2))

    def test_solve_affine_inconsistent(self):
        """Test sistema incompatible"""
        a = RatMatrix.from_rows([[1, 0], [1, 0]])
        sol = solve_affine(a, [1, 2])
        assert not sol.consistent
        assert len(sol.kernel) == 1

    def test_solve_affine_dimension_mismatch(self):
        a = RatMatrix.from_rows([[1, 0], [0, 1]])
        with pytest.raises(DimensionMismatchError):
            solve_affine(a, [1])

    def test_circuit_relation_opposite_rays(self):
        """Test (1,0) y (-1,0) forman un circuito con relación (1,1)"""
        a = RatMatrix.from_rows([[1, 0], [0, 1], [-1, 0], [0, -1]])
        assert circuit_relation(a, (0, 2)) == (F(1), F(1))
        assert circuit_relation(a, (0, 1)) is None

    def test_circuits_of_square(self):
        a = RatMatrix.from_rows([[1, 0], [0, 1], [-1, 0], [0, -1]])
        found = circuits(a)
        assert (0, 2) in found
        assert (1, 3) in found
        assert (0, 1, 2) not in found
        assert (0, 1, 2, 3) not in found

    def test_rank_and_kernel_match_sympy(self):
        """Test rango y núcleo contra sympy en matrices aleatorias"""
        rng = random.Random(20240611)
        for _ in range(25):
            nrows, ncols = rng.randint(1, 4), rng.randint(1, 5)
            a = _random_matrix(rng, nrows, ncols)
            reference = sympy.Matrix([[int(v) for v in row] for row in a.entries])
            assert a.rank() == reference.rank()
            basis = kernel_basis(a)
            assert len(basis) == ncols - reference.rank()
            for v in basis:
                assert all(x == 0 for x in a.apply(v))

    def test_circuits_are_minimal_dependent_sets(self):
        """Test cada circuito es dependiente y todo subconjunto propio es independiente"""
        rng = random.Random(7)
        for _ in range(10):
            a = _random_matrix(rng, 5, 2)
            for circuit in circuits(a):
                rows = [[int(v) for v in a.row(i)] for i in circuit]
                assert sympy.Matrix(rows).rank() == len(circuit) - 1
                for drop in range(len(circuit)):
                    rest = [r for k, r in enumerate(rows) if k != drop]
                    if rest:
                        assert sympy.Matrix(rest).rank() == len(rest)


class TestLattices:

    def test_hermite_normal_form(self):
        """Test el retículo {a ≡ b mod 2}"""
        hnf = hermite_normal_form([(2, 0), (0, 2), (1, 1)], 2)
        assert hnf == ((1, 1), (0, 2))

    def test_integer_kernel(self):
        kernel = integer_kernel([(1, 2)], 2)
        assert len(kernel) == 1
        assert kernel[0] in ((2, -1), (-2, 1))

    def test_lattice_intersect_kernel(self):
        """Test ker(x + y) ∩ Z^2 = Z·(1,-1)"""
        a_i = RatMatrix.from_rows([[1, 1]])
        sub = lattice_intersect_kernel(a_i, LatticeBasis.standard(2))
        assert sub.vectors == ((1, -1),)
        assert sub.rank == 1
        assert sub.pairing((3, 1)) == (2,)

    def test_lattice_intersect_empty_rows(self):
        a_i = RatMatrix((), 3)
        sub = lattice_intersect_kernel(a_i, LatticeBasis.standard(3))
        assert sub.rank == 3


class TestSimplex:

    def test_maximize_box(self):
        """Test máximo de x + y en el cuadrado unidad"""
        result = maximize(
            [F(1), F(1)],
            ge_rows=[[1, 0], [0, 1], [-1, 0], [0, -1]],
            ge_rhs=[0, 0, -1, -1],
        )
        assert result.status == OPTIMAL
        assert result.value == 2
        assert result.point == (F(1), F(1))

    def test_maximize_infeasible(self):
        result = maximize([F(0)], ge_rows=[[1], [-1]], ge_rhs=[1, 0])
        assert result.status == INFEASIBLE
        assert not result.feasible

    def test_maximize_unbounded(self):
        result = maximize([F(1)], ge_rows=[[1]], ge_rhs=[0])
        assert result.status == UNBOUNDED

    def test_maximize_with_equalities(self):
        """Test igualdad x + y = 1 con x, y >= 0"""
        result = maximize(
            [F(1), F(0)],
            eq_rows=[[1, 1]], eq_rhs=[1],
            ge_rows=[[1, 0], [0, 1]], ge_rhs=[0, 0],
        )
        assert result.optimal
        assert result.value == 1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
