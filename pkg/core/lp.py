# core/lp.py
"""
Programación lineal exacta: simplex de tableau completo con regla de Bland.

Resuelve max c·x sujeto a E x = f, G x >= h con x libre, usando dos fases
con variables artificiales. La regla de Bland garantiza terminación sin
perturbaciones y toda la aritmética es racional.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from core.errors import DimensionMismatchError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    """Resultado de un programa lineal"""
    status: str
    value: Optional[Fraction] = None
    point: Optional[Tuple[Fraction, ...]] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class SimplexTableau:
    """
    Tableau en forma estándar: filas [a_i | b_i] con b_i >= 0 y una base factible.

    `reduced[j]` guarda c_B B^-1 A_j - c_j y `value` guarda c_B B^-1 b.
    """

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = len(rows[0]) if rows else 0
        self.reduced: List[Fraction] = []
        self.value = Fraction(0)

    def set_objective(self, costs: Sequence[Fraction]):
        self.reduced = [
            sum((costs[self.basis[i]] * self.rows[i][j] for i in range(len(self.rows))), Fraction(0))
            - costs[j]
            for j in range(len(costs))
        ]
        self.value = sum(
            (costs[self.basis[i]] * self.rhs[i] for i in range(len(self.rows))), Fraction(0)
        )

    def pivot(self, i: int, j: int):
        piv = self.rows[i][j]
        self.rows[i] = [v / piv for v in self.rows[i]]
        self.rhs[i] /= piv
        for k in range(len(self.rows)):
            if k != i and self.rows[k][j] != 0:
                f = self.rows[k][j]
                self.rows[k] = [a - f * b for a, b in zip(self.rows[k], self.rows[i])]
                self.rhs[k] -= f * self.rhs[i]
        if self.reduced:
            f = self.reduced[j]
            if f != 0:
                self.reduced = [a - f * b for a, b in zip(self.reduced, self.rows[i])]
                self.value -= f * self.rhs[i]
        self.basis[i] = j

    def bland_primal_step(self, allowed: Sequence[bool]) -> str:
        entering = next(
            (j for j in range(len(self.reduced)) if allowed[j] and self.reduced[j] < 0), None
        )
        if entering is None:
            return OPTIMAL
        candidates = [
            (self.rhs[i] / self.rows[i][entering], self.basis[i], i)
            for i in range(len(self.rows))
            if self.rows[i][entering] > 0
        ]
        if not candidates:
            return UNBOUNDED
        _, _, leaving = min(candidates)
        self.pivot(leaving, entering)
        return "go_on"

    def bland_primal(self, allowed: Sequence[bool]) -> str:
        while True:
            status = self.bland_primal_step(allowed)
            if status != "go_on":
                return status

    def basic_solution(self) -> List[Fraction]:
        y = [Fraction(0)] * self.ncols
        for i, j in enumerate(self.basis):
            y[j] = self.rhs[i]
        return y


def maximize(
    costs: Sequence[Fraction],
    eq_rows: Sequence[Sequence[Fraction]] = (),
    eq_rhs: Sequence[Fraction] = (),
    ge_rows: Sequence[Sequence[Fraction]] = (),
    ge_rhs: Sequence[Fraction] = (),
) -> LPResult:
    """
    Maximiza costs·x sujeto a eq_rows x = eq_rhs y ge_rows x >= ge_rhs, x libre.

    Returns:
        LPResult con estado 'optimal', 'infeasible' o 'unbounded'
    """
    n = len(costs)
    if len(eq_rows) != len(eq_rhs) or len(ge_rows) != len(ge_rhs):
        raise DimensionMismatchError("Número de filas y de lados derechos distinto")
    for row in list(eq_rows) + list(ge_rows):
        if len(row) != n:
            raise DimensionMismatchError(f"Restricción de longitud {len(row)} para {n} variables")

    n_slack = len(ge_rows)
    m = len(eq_rows) + n_slack
    # columnas: x+ (n), x- (n), holguras (n_slack), artificiales (m)
    art0 = 2 * n + n_slack
    total = art0 + m

    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    constraints = [(r, f, None) for r, f in zip(eq_rows, eq_rhs)]
    constraints += [(r, h, k) for k, (r, h) in enumerate(zip(ge_rows, ge_rhs))]
    for i, (row, bound, slack) in enumerate(constraints):
        line = [Fraction(v) for v in row] + [-Fraction(v) for v in row] + [Fraction(0)] * (n_slack + m)
        if slack is not None:
            line[2 * n + slack] = Fraction(-1)
        value = Fraction(bound)
        if value < 0:
            line = [-v for v in line]
            value = -value
        line[art0 + i] = Fraction(1)
        rows.append(line)
        rhs.append(value)

    tableau = SimplexTableau(rows, rhs, [art0 + i for i in range(m)])

    # Fase 1: maximizar -suma de artificiales
    phase1 = [Fraction(0)] * art0 + [Fraction(-1)] * m
    tableau.set_objective(phase1)
    everything = [True] * total
    tableau.bland_primal(everything)
    if tableau.value < 0:
        return LPResult(INFEASIBLE)

    # expulsar artificiales degeneradas de la base
    redundant = []
    for i in range(len(tableau.rows)):
        if tableau.basis[i] < art0:
            continue
        j = next((j for j in range(art0) if tableau.rows[i][j] != 0), None)
        if j is None:
            redundant.append(i)
        else:
            tableau.pivot(i, j)
    for i in reversed(redundant):
        del tableau.rows[i]
        del tableau.rhs[i]
        del tableau.basis[i]

    # Fase 2
    phase2 = [Fraction(c) for c in costs] + [-Fraction(c) for c in costs]
    phase2 += [Fraction(0)] * (n_slack + m)
    tableau.set_objective(phase2)
    allowed = [j < art0 for j in range(total)]
    status = tableau.bland_primal(allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)

    y = tableau.basic_solution() if tableau.rows else [Fraction(0)] * total
    x = tuple(y[j] - y[n + j] for j in range(n))
    return LPResult(OPTIMAL, tableau.value, x)


def feasible_point(
    nvars: int,
    eq_rows: Sequence[Sequence[Fraction]] = (),
    eq_rhs: Sequence[Fraction] = (),
    ge_rows: Sequence[Sequence[Fraction]] = (),
    ge_rhs: Sequence[Fraction] = (),
) -> Optional[Tuple[Fraction, ...]]:
    """Un punto factible o None"""
    result = maximize([Fraction(0)] * nvars, eq_rows, eq_rhs, ge_rows, ge_rhs)
    return result.point if result.optimal else None
