"""Exact integer and rational linear algebra.

Everything here is arbitrary precision: rationals are ``fractions.Fraction``,
integer vectors are finitely supported maps, and infinite invertible integer
matrices are represented by a finite active block (implicit identity beyond
it) together with a tracked inverse.  Integer kernels are computed by a
column-style Hermite reduction with a tracked unimodular transform, then
canonicalized so results are deterministic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError

# ---------------------------------------------------------------------------
# Rationals: stdlib Fraction plus the wire format "p/q" (or "p" when q == 1).


def parse_rational(text: str | int) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"malformed rational {text!r}: {exc}") from None


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def rational_gcd(values: Iterable[Fraction]) -> Fraction:
    """Positive generator of the Z-span of finitely many rationals.

    Folds the two-element identity gcd(a/b, c/d) = gcd(ad, cb)/(bd); returns 0
    for an empty or all-zero collection.
    """
    g = Fraction(0)
    for v in values:
        v = Fraction(v)
        if v == 0:
            continue
        if g == 0:
            g = abs(v)
        else:
            num = math.gcd(g.numerator * v.denominator, v.numerator * g.denominator)
            g = Fraction(num, g.denominator * v.denominator)
    return g


# ---------------------------------------------------------------------------
# Finitely supported integer vectors, 1-based indices.


class IntVecFin:
    """Integer vector with finite support; indices start at 1."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if isinstance(entries, Mapping):
            items = entries.items()
        else:
            items = entries
        store: dict[int, int] = {}
        for i, v in items:
            i = int(i)
            v = int(v)
            if i < 1:
                raise ValidationError(f"vector index must be >= 1, got {i}")
            if v != 0:
                store[i] = store.get(i, 0) + v
                if store[i] == 0:
                    del store[i]
        self._entries = store

    @classmethod
    def from_list(cls, values: Sequence[int], start: int = 1) -> "IntVecFin":
        return cls((start + k, v) for k, v in enumerate(values))

    def __getitem__(self, i: int) -> int:
        return self._entries.get(i, 0)

    def items(self):
        return sorted(self._entries.items())

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._entries))

    def is_zero(self) -> bool:
        return not self._entries

    def max_index(self) -> int:
        return max(self._entries) if self._entries else 0

    def to_list(self, n: int) -> list[int]:
        return [self._entries.get(i, 0) for i in range(1, n + 1)]

    def scale(self, c: int) -> "IntVecFin":
        return IntVecFin((i, c * v) for i, v in self._entries.items())

    def shift(self, offset: int) -> "IntVecFin":
        return IntVecFin((i + offset, v) for i, v in self._entries.items())

    def __add__(self, other: "IntVecFin") -> "IntVecFin":
        out = dict(self._entries)
        for i, v in other._entries.items():
            out[i] = out.get(i, 0) + v
        return IntVecFin(out)

    def __sub__(self, other: "IntVecFin") -> "IntVecFin":
        return self + other.scale(-1)

    def __neg__(self) -> "IntVecFin":
        return self.scale(-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntVecFin) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(tuple(self.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {v}" for i, v in self.items())
        return f"IntVecFin({{{body}}})"

    def dot_fractions(self, values: Sequence[Fraction]) -> Fraction:
        """Sum nu_j * values[j-1]; indices beyond the sequence contribute 0 only
        if the stored entry is 0 there, otherwise it is an error."""
        total = Fraction(0)
        for i, v in self._entries.items():
            if i > len(values):
                raise ValidationError(
                    f"vector touches index {i} beyond provided length {len(values)}"
                )
            total += v * Fraction(values[i - 1])
        return total

    def to_json(self) -> dict[str, int]:
        return {str(i): v for i, v in self.items()}

    @classmethod
    def from_json(cls, obj: Mapping[str, int]) -> "IntVecFin":
        try:
            return cls((int(k), int(v)) for k, v in obj.items())
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed sparse vector: {exc}") from None


def gcd_of_vector(nu: IntVecFin) -> int:
    """gcd of the entries; 0 iff nu == 0."""
    g = 0
    for _, v in nu.items():
        g = math.gcd(g, abs(v))
    return g


# ---------------------------------------------------------------------------
# Row-finite invertible integer matrices with tracked inverse.


class RowFiniteIntMatrix:
    """Invertible integer matrix equal to the identity outside a finite block.

    ``rows[i]`` (1 <= i <= dimension) stores row i of the active block; rows
    beyond the block are implicitly e_i.  The inverse is carried along and can
    be verified exactly.
    """

    __slots__ = ("dimension", "_rows", "_inv_rows")

    def __init__(
        self,
        dimension: int,
        rows: Mapping[int, IntVecFin],
        inverse_rows: Mapping[int, IntVecFin],
    ):
        self.dimension = int(dimension)
        self._rows = {i: rows.get(i, IntVecFin({i: 1})) for i in range(1, self.dimension + 1)}
        self._inv_rows = {
            i: inverse_rows.get(i, IntVecFin({i: 1})) for i in range(1, self.dimension + 1)
        }
        for i, r in list(self._rows.items()) + list(self._inv_rows.items()):
            if r.max_index() > self.dimension:
                raise ValidationError(
                    f"row {i} touches column {r.max_index()} outside the {self.dimension}-block"
                )

    # -- constructors

    @classmethod
    def identity(cls, n: int = 0) -> "RowFiniteIntMatrix":
        return cls(n, {}, {})

    @classmethod
    def swap(cls, i: int, j: int) -> "RowFiniteIntMatrix":
        n = max(i, j)
        rows = {i: IntVecFin({j: 1}), j: IntVecFin({i: 1})}
        return cls(n, rows, dict(rows))

    @classmethod
    def negate(cls, i: int) -> "RowFiniteIntMatrix":
        rows = {i: IntVecFin({i: -1})}
        return cls(i, rows, dict(rows))

    @classmethod
    def add_multiple(cls, i: int, j: int, c: int) -> "RowFiniteIntMatrix":
        """Row operation row_i += c * row_j (i != j)."""
        if i == j:
            raise ValidationError("add_multiple requires distinct rows")
        n = max(i, j)
        rows = {i: IntVecFin({i: 1, j: c})}
        inv = {i: IntVecFin({i: 1, j: -c})}
        return cls(n, rows, inv)

    # -- access

    def row(self, i: int) -> IntVecFin:
        if i <= self.dimension:
            return self._rows[i]
        return IntVecFin({i: 1})

    def inverse_row(self, i: int) -> IntVecFin:
        if i <= self.dimension:
            return self._inv_rows[i]
        return IntVecFin({i: 1})

    def entry(self, i: int, j: int) -> int:
        return self.row(i)[j]

    def inverse(self) -> "RowFiniteIntMatrix":
        return RowFiniteIntMatrix(self.dimension, self._inv_rows, self._rows)

    def transpose(self) -> "RowFiniteIntMatrix":
        n = self.dimension
        rows = {i: IntVecFin({j: self._rows[j][i] for j in range(1, n + 1)}) for i in range(1, n + 1)}
        inv = {
            i: IntVecFin({j: self._inv_rows[j][i] for j in range(1, n + 1)})
            for i in range(1, n + 1)
        }
        return RowFiniteIntMatrix(n, rows, inv)

    def embed(self, offset: int) -> "RowFiniteIntMatrix":
        """The same block acting on coordinates shifted up by ``offset``."""
        n = self.dimension + offset
        rows = {i + offset: self._rows[i].shift(offset) for i in self._rows}
        inv = {i + offset: self._inv_rows[i].shift(offset) for i in self._inv_rows}
        return RowFiniteIntMatrix(n, rows, inv)

    # -- algebra

    def apply(self, nu: IntVecFin) -> IntVecFin:
        acc: dict[int, int] = {}
        for j, v in nu.items():
            if j <= self.dimension:
                for i in range(1, self.dimension + 1):
                    a = self._rows[i][j]
                    if a:
                        acc[i] = acc.get(i, 0) + a * v
            else:
                # column j is e_j beyond the block
                acc[j] = acc.get(j, 0) + v
        return IntVecFin(acc)

    def apply_transpose(self, nu: IntVecFin) -> IntVecFin:
        """Transpose action: (A* nu)_j = sum_i nu_i A_ij."""
        out = IntVecFin()
        for i, v in nu.items():
            if i <= self.dimension:
                out += self._rows[i].scale(v)
            else:
                out += IntVecFin({i: v})
        return out

    def apply_fraction_column(self, values: Sequence[Fraction]) -> list[Fraction]:
        """Matrix-vector product on a length-N column of rationals, N >= dimension."""
        n = len(values)
        if n < self.dimension:
            raise ValidationError(
                f"column of length {n} does not cover the {self.dimension}-block"
            )
        out = []
        for i in range(1, n + 1):
            if i <= self.dimension:
                out.append(self._rows[i].dot_fractions(values))
            else:
                out.append(Fraction(values[i - 1]))
        return out

    def verify_inverse(self) -> bool:
        n = self.dimension
        for left, right in ((self._rows, self._inv_rows), (self._inv_rows, self._rows)):
            for i in range(1, n + 1):
                acc: dict[int, int] = {}
                for j, v in left[i].items():
                    r = right[j] if j <= n else IntVecFin({j: 1})
                    for k, w in r.items():
                        acc[k] = acc.get(k, 0) + v * w
                acc = {k: v for k, v in acc.items() if v != 0}
                if acc != {i: 1}:
                    return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, RowFiniteIntMatrix):
            return False
        n = max(self.dimension, other.dimension)
        return all(self.row(i) == other.row(i) for i in range(1, n + 1))

    def __repr__(self) -> str:
        return f"RowFiniteIntMatrix(dim={self.dimension})"

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "rows": {str(i): self._rows[i].to_json() for i in range(1, self.dimension + 1)},
            "inverse_rows": {
                str(i): self._inv_rows[i].to_json() for i in range(1, self.dimension + 1)
            },
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "RowFiniteIntMatrix":
        try:
            dim = int(obj["dimension"])
            rows = {int(i): IntVecFin.from_json(r) for i, r in obj["rows"].items()}
            inv = {int(i): IntVecFin.from_json(r) for i, r in obj["inverse_rows"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed matrix JSON: {exc}") from None
        return cls(dim, rows, inv)


def unimodular_compose(a: RowFiniteIntMatrix, b: RowFiniteIntMatrix) -> RowFiniteIntMatrix:
    """Product AB with inverse B^-1 A^-1 tracked."""
    n = max(a.dimension, b.dimension)
    rows = {}
    inv = {}
    for i in range(1, n + 1):
        acc: dict[int, int] = {}
        for j, v in a.row(i).items():
            for k, w in b.row(j).items():
                acc[k] = acc.get(k, 0) + v * w
        rows[i] = IntVecFin(acc)
        acc = {}
        for j, v in b.inverse_row(i).items():
            for k, w in a.inverse_row(j).items():
                acc[k] = acc.get(k, 0) + v * w
        inv[i] = IntVecFin(acc)
    return RowFiniteIntMatrix(n, rows, inv)


def compose_all(factors: Sequence[RowFiniteIntMatrix]) -> RowFiniteIntMatrix:
    """Compose factors[k-1] ... factors[0] (first factor acts first)."""
    out = RowFiniteIntMatrix.identity()
    for f in factors:
        out = unimodular_compose(f, out)
    return out


# ---------------------------------------------------------------------------
# Integer kernels via column Hermite reduction.


def _column_reduce(mat: list[list[int]], transform: list[list[int]], reduce_left: bool) -> int:
    """Bring ``mat`` to column echelon form by unimodular column operations,
    mirroring every operation on ``transform``.  Returns the number of pivot
    columns.  With ``reduce_left`` the entries left of each pivot are reduced
    into [0, pivot), which yields the canonical column Hermite form.
    """
    if not mat:
        return 0
    m, n = len(mat), len(mat[0])

    def col_sub(dst: int, src: int, q: int) -> None:
        if q == 0:
            return
        for r in range(m):
            mat[r][dst] -= q * mat[r][src]
        for r in range(n):
            transform[r][dst] -= q * transform[r][src]

    def col_swap(i: int, j: int) -> None:
        if i == j:
            return
        for r in range(m):
            mat[r][i], mat[r][j] = mat[r][j], mat[r][i]
        for r in range(n):
            transform[r][i], transform[r][j] = transform[r][j], transform[r][i]

    def col_negate(i: int) -> None:
        for r in range(m):
            mat[r][i] = -mat[r][i]
        for r in range(n):
            transform[r][i] = -transform[r][i]

    pivot_col = 0
    for r in range(m):
        if pivot_col >= n:
            break
        while True:
            live = [j for j in range(pivot_col, n) if mat[r][j] != 0]
            if not live:
                break
            j_min = min(live, key=lambda j: abs(mat[r][j]))
            others = [j for j in live if j != j_min]
            if not others:
                col_swap(pivot_col, j_min)
                if mat[r][pivot_col] < 0:
                    col_negate(pivot_col)
                if reduce_left:
                    piv = mat[r][pivot_col]
                    for j in range(pivot_col):
                        col_sub(j, pivot_col, mat[r][j] // piv)
                pivot_col += 1
                break
            for j in others:
                col_sub(j, j_min, mat[r][j] // mat[r][j_min])
    return pivot_col


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def integer_kernel(rows: Sequence[Sequence[Fraction]]) -> list[IntVecFin]:
    """Basis of {nu in Z^n : M nu = 0} for a rational matrix M.

    The returned basis is primitive and in canonical column Hermite form
    (pivots positive, entries left of each pivot reduced into [0, pivot)),
    so identical inputs produce identical bases.  A zero matrix yields the
    standard basis of Z^n.
    """
    if not rows or not rows[0]:
        raise ValidationError("integer_kernel requires at least one row and one column")
    n = len(rows[0])
    int_rows: list[list[int]] = []
    for row in rows:
        if len(row) != n:
            raise ValidationError("ragged matrix passed to integer_kernel")
        fracs = [Fraction(x) for x in row]
        scale = _lcm(f.denominator for f in fracs)
        int_rows.append([int(f * scale) for f in fracs])

    transform = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    rank = _column_reduce(int_rows, transform, reduce_left=False)
    kernel_cols = [[transform[r][j] for r in range(n)] for j in range(rank, n)]
    if not kernel_cols:
        return []

    # Canonicalize the basis itself: column Hermite form of the n x d matrix.
    d = len(kernel_cols)
    basis_mat = [[kernel_cols[j][r] for j in range(d)] for r in range(n)]
    basis_transform = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    _column_reduce(basis_mat, basis_transform, reduce_left=True)
    out = []
    for j in range(d):
        vec = IntVecFin((r + 1, basis_mat[r][j]) for r in range(n))
        if vec.is_zero():
            raise ValidationError("internal error: kernel basis degenerated")
        out.append(vec)
    return out


def in_integer_span(vec: IntVecFin, basis: Sequence[IntVecFin], n: int) -> bool:
    """Exact membership of ``vec`` in the Z-span of an echelon ``basis``.

    The basis must be in the canonical form produced by ``integer_kernel``
    (distinct, increasing pivot rows).
    """
    residue = vec.to_list(n)
    for b in basis:
        cols = b.to_list(n)
        pivot_row = next((r for r in range(n) if cols[r] != 0), None)
        if pivot_row is None:
            continue
        c, rem = divmod(residue[pivot_row], cols[pivot_row])
        if rem != 0:
            return False
        if c:
            for r in range(n):
                residue[r] -= c * cols[r]
    return all(v == 0 for v in residue)
