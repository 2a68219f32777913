# core/exactnum.py
"""
Aritmética racional exacta y álgebra lineal sobre Q.

Matrices racionales inmutables, forma escalonada reducida, núcleos,
sistemas afines, circuitos de filas y retículos enteros en forma
normal de Hermite. Todo el motor se apoya en este módulo: aquí no hay
números de coma flotante.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from core.errors import DimensionMismatchError, ValidationError

Rat = Fraction
RatVector = Tuple[Fraction, ...]
IntVector = Tuple[int, ...]

RationalLike = Union[int, str, Fraction]


def to_rat(value: RationalLike) -> Fraction:
    """Convierte int, "p/q" o Fraction en Fraction (nunca acepta float)"""
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"Valor no racional exacto: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f"Racional mal formado: {value!r}") from e
    raise ValidationError(f"Tipo no soportado para racional: {type(value).__name__}")


def to_vector(values: Iterable[RationalLike]) -> RatVector:
    return tuple(to_rat(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionMismatchError(f"Producto escalar con longitudes {len(u)} y {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(a, b)


def scale_to_integers(values: Sequence[Fraction]) -> IntVector:
    """Multiplica por el mcm de los denominadores"""
    den = 1
    for v in values:
        den = _lcm(den, Fraction(v).denominator)
    return tuple(int(Fraction(v) * den) for v in values)


def primitive(values: Sequence[Fraction]) -> IntVector:
    """Vector entero primitivo en la misma semirrecta; el vector nulo se devuelve tal cual"""
    ints = scale_to_integers(values)
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return ints
    return tuple(v // g for v in ints)


@dataclass(frozen=True)
class RatMatrix:
    """Matriz racional p x n almacenada por filas"""
    entries: Tuple[RatVector, ...]
    ncols: int

    def __post_init__(self):
        for i, row in enumerate(self.entries):
            if len(row) != self.ncols:
                raise DimensionMismatchError(
                    f"Fila {i} con {len(row)} entradas, se esperaban {self.ncols}"
                )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[RationalLike]], ncols: Optional[int] = None) -> "RatMatrix":
        entries = tuple(to_vector(r) for r in rows)
        if ncols is None:
            if not entries:
                raise DimensionMismatchError("Matriz vacía sin número de columnas")
            ncols = len(entries[0])
        return cls(entries, ncols)

    @property
    def nrows(self) -> int:
        return len(self.entries)

    def row(self, i: int) -> RatVector:
        return self.entries[i]

    def submatrix(self, indices: Iterable[int]) -> "RatMatrix":
        return RatMatrix(tuple(self.entries[i] for i in indices), self.ncols)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            tuple(tuple(row[j] for row in self.entries) for j in range(self.ncols)),
            self.nrows,
        )

    def apply(self, x: Sequence[Fraction]) -> RatVector:
        if len(x) != self.ncols:
            raise DimensionMismatchError(f"Vector de longitud {len(x)} para {self.ncols} columnas")
        return tuple(dot(row, x) for row in self.entries)

    def left_apply(self, y: Sequence[Fraction]) -> RatVector:
        """y^T A"""
        if len(y) != self.nrows:
            raise DimensionMismatchError(f"Vector de longitud {len(y)} para {self.nrows} filas")
        return tuple(
            sum((y[i] * self.entries[i][j] for i in range(self.nrows)), Fraction(0))
            for j in range(self.ncols)
        )

    def rank(self) -> int:
        return len(rref(self)[1])

    def kernel(self) -> List[RatVector]:
        return kernel_basis(self)

    def left_kernel(self) -> List[RatVector]:
        return left_kernel_basis(self)


def rref(matrix: RatMatrix) -> Tuple[List[List[Fraction]], List[int]]:
    """
    Forma escalonada reducida por filas.

    Returns:
        Filas reducidas (incluidas las nulas al final) y columnas pivote
    """
    m = [list(row) for row in matrix.entries]
    pivots: List[int] = []
    r = 0
    for c in range(matrix.ncols):
        if r == len(m):
            break
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def kernel_basis(matrix: RatMatrix) -> List[RatVector]:
    """Base de {x : A x = 0}, un vector por columna libre"""
    reduced, pivots = rref(matrix)
    free = [c for c in range(matrix.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * matrix.ncols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -reduced[r][f]
        basis.append(tuple(v))
    return basis


def left_kernel_basis(matrix: RatMatrix) -> List[RatVector]:
    """Base de {y : y^T A = 0}"""
    if matrix.nrows == 0:
        return []
    return kernel_basis(matrix.transpose())


@dataclass(frozen=True)
class AffineSolution:
    """Solución particular (o None si el sistema es inconsistente) y base del núcleo"""
    solution: Optional[RatVector]
    kernel: Tuple[RatVector, ...]

    @property
    def consistent(self) -> bool:
        return self.solution is not None

    @property
    def unique(self) -> bool:
        return self.solution is not None and not self.kernel


def solve_affine(a_i: RatMatrix, b: Sequence[RationalLike]) -> AffineSolution:
    """Resuelve A_I x = b de forma exacta"""
    if a_i.nrows != len(b):
        raise DimensionMismatchError(f"A_I tiene {a_i.nrows} filas pero b tiene {len(b)} entradas")
    rhs = to_vector(b)
    augmented = RatMatrix(
        tuple(row + (rhs[i],) for i, row in enumerate(a_i.entries)),
        a_i.ncols + 1,
    )
    reduced, pivots = rref(augmented)
    kernel = tuple(kernel_basis(a_i))
    if a_i.ncols in pivots:
        return AffineSolution(None, kernel)
    x = [Fraction(0)] * a_i.ncols
    for r, c in enumerate(pivots):
        x[c] = reduced[r][a_i.ncols]
    return AffineSolution(tuple(x), kernel)


def circuit_relation(matrix: RatMatrix, indices: Sequence[int]) -> Optional[RatVector]:
    """
    Coeficientes de la única relación lineal entre las filas dadas, si forman un circuito.

    Returns:
        Vector alineado con `indices` o None si las filas no son un circuito
    """
    sub = matrix.submatrix(indices)
    if sub.rank() != len(indices) - 1:
        return None
    kernel = left_kernel_basis(sub)
    if len(kernel) != 1 or any(v == 0 for v in kernel[0]):
        return None
    return kernel[0]


def circuits(matrix: RatMatrix) -> List[Tuple[int, ...]]:
    """
    Todos los circuitos de filas (conjuntos dependientes minimales), 0-indexados.

    Un circuito de Q^n tiene a lo sumo n+1 elementos. Las filas nulas son circuitos de tamaño 1.
    """
    found: List[Tuple[int, ...]] = []
    max_size = min(matrix.nrows, matrix.ncols + 1)
    for k in range(1, max_size + 1):
        for subset in combinations(range(matrix.nrows), k):
            if circuit_relation(matrix, subset) is not None:
                found.append(subset)
    return found


# --- Retículos enteros ---

def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Algoritmo de Euclides extendido: (g, s, t) con s*a + t*b = g >= 0"""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _integer_echelon(rows: List[List[int]], reduce_cols: int) -> Tuple[List[List[int]], int]:
    """
    Escalona con operaciones unimodulares sobre las primeras `reduce_cols` columnas.

    Cada par de filas se combina con los coeficientes de Bezout, de modo que
    la transformación es invertible sobre Z.

    Returns:
        Las filas transformadas y el número de pivotes
    """
    rows = [list(r) for r in rows]
    r = 0
    for c in range(reduce_cols):
        if r == len(rows):
            break
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c] == 0:
                continue
            a, b = rows[r][c], rows[i][c]
            g, s, t = xgcd(a, b)
            top = [s * x + t * y for x, y in zip(rows[r], rows[i])]
            bottom = [(-b // g) * x + (a // g) * y for x, y in zip(rows[r], rows[i])]
            rows[r], rows[i] = top, bottom
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        r += 1
    return rows, r


def hermite_normal_form(vectors: Iterable[Sequence[int]], ncols: int) -> Tuple[IntVector, ...]:
    """
    Forma normal de Hermite por filas del retículo generado.

    Pivotes positivos, entradas sobre cada pivote reducidas a [0, pivote),
    filas nulas eliminadas.
    """
    rows = [list(v) for v in vectors]
    for v in rows:
        if len(v) != ncols:
            raise DimensionMismatchError(f"Generador de longitud {len(v)}, se esperaban {ncols}")
    rows, rank = _integer_echelon(rows, ncols)
    rows = rows[:rank]
    for r, row in enumerate(rows):
        c = next(j for j, x in enumerate(row) if x != 0)
        p = row[c]
        for i in range(r):
            q = rows[i][c] // p
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], row)]
    return tuple(tuple(row) for row in rows)


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> List[IntVector]:
    """Base de {c en Z^ncols : W c = 0} para una matriz entera W"""
    nrows = len(rows)
    # [W^T | Id]: las filas cuya parte izquierda se anula dan el núcleo
    augmented = []
    for j in range(ncols):
        left = [rows[i][j] for i in range(nrows)]
        right = [1 if k == j else 0 for k in range(ncols)]
        augmented.append(left + right)
    reduced, rank = _integer_echelon(augmented, nrows)
    return [tuple(row[nrows:]) for row in reduced[rank:]]


@dataclass(frozen=True)
class LatticeBasis:
    """Subretículo de Z^n dado por una base en forma normal de Hermite"""
    ambient_rank: int
    vectors: Tuple[IntVector, ...] = field(default=())

    def __post_init__(self):
        for v in self.vectors:
            if len(v) != self.ambient_rank:
                raise DimensionMismatchError(
                    f"Vector {v} fuera de Z^{self.ambient_rank}"
                )

    @classmethod
    def standard(cls, n: int) -> "LatticeBasis":
        return cls(n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def from_generators(cls, n: int, generators: Iterable[Sequence[int]]) -> "LatticeBasis":
        return cls(n, hermite_normal_form(generators, n))

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def pairing(self, x: Sequence[int]) -> IntVector:
        """Coordenadas de x en el dual: (<b_j, x>)_j"""
        return tuple(sum(a * b for a, b in zip(v, x)) for v in self.vectors)


def lattice_intersect_kernel(a_i: RatMatrix, lattice: LatticeBasis) -> LatticeBasis:
    """
    Base canónica de ker(A_I) ∩ M.

    Escribe m = c·M_b y resuelve sobre Z el sistema (A_I M_b^T) c = 0.
    """
    if a_i.ncols != lattice.ambient_rank:
        raise DimensionMismatchError(
            f"A_I tiene {a_i.ncols} columnas y el retículo vive en Z^{lattice.ambient_rank}"
        )
    basis = lattice.vectors
    k = len(basis)
    if k == 0:
        return LatticeBasis(lattice.ambient_rank, ())
    w = []
    for row in a_i.entries:
        w.append(scale_to_integers([dot(row, [Fraction(x) for x in b]) for b in basis]))
    coeffs = integer_kernel(w, k) if w else [
        tuple(1 if i == j else 0 for j in range(k)) for i in range(k)
    ]
    generators = [
        [sum(c[j] * basis[j][t] for j in range(k)) for t in range(lattice.ambient_rank)]
        for c in coeffs
    ]
    return LatticeBasis.from_generators(lattice.ambient_rank, generators)
