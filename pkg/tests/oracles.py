"""Independent oracles used to freeze expected values.

These deliberately avoid the library's own algorithms: kernels come from
exhaustive enumeration, gcds from Euclid, sigma sums from direct term-by-term
summation with a hand-written geometric remainder, and span checks from
bounded coefficient searches.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

_GRID_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _grid(n: int, bound: int) -> np.ndarray:
    key = (n, bound)
    if key not in _GRID_CACHE:
        axis = np.arange(-bound, bound + 1, dtype=np.int16)
        grids = np.meshgrid(*([axis] * n), indexing="ij")
        _GRID_CACHE[key] = np.stack([g.ravel() for g in grids], axis=1)
    return _GRID_CACHE[key]


def scaled_integer_rows(rows) -> list[list[int]]:
    out = []
    for row in rows:
        fracs = [Fraction(x) for x in row]
        scale = 1
        for f in fracs:
            scale = scale * f.denominator // math.gcd(scale, f.denominator)
        out.append([int(f * scale) for f in fracs])
    return out


def brute_force_kernel(rows, bound: int) -> np.ndarray:
    """All nu with |nu|_inf <= bound and (exact) M nu = 0, as an int64 array."""
    int_rows = scaled_integer_rows(rows)
    n = len(int_rows[0])
    grid = _grid(n, bound).astype(np.int64)
    mat = np.array(int_rows, dtype=np.int64)
    prods = grid @ mat.T
    mask = np.all(prods == 0, axis=1)
    return grid[mask]


def span_contains_all(basis_cols: list[list[int]], vectors: np.ndarray) -> bool:
    """Every row of ``vectors`` is an integer combination of the echelon basis
    columns (pivot rows strictly increasing, as integer_kernel emits)."""
    if vectors.size == 0:
        return True
    residue = vectors.astype(np.int64).copy()
    for col in basis_cols:
        col = np.array(col, dtype=np.int64)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        p = nz[0]
        piv = col[p]
        if np.any(residue[:, p] % piv != 0):
            return False
        c = residue[:, p] // piv
        residue -= np.outer(c, col)
    return not np.any(residue)


def euclid_gcd(values) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, abs(int(v)))
    return g


def sigma_by_partial_sums(s_terms, j: int, tail_c: Fraction, tail_r: Fraction, cutoff: int) -> Fraction:
    """sigma_j = sum_k min(j,k) s_k via ``cutoff`` explicit terms plus the
    exact geometric remainder (all indices past the cutoff have min = j)."""
    total = Fraction(0)
    for k in range(1, cutoff + 1):
        total += min(j, k) * s_terms(k)
    if tail_c:
        # remainder sum_{k > cutoff} j * s_k for a tail already geometric there
        first = s_terms(cutoff + 1)
        total += j * first / (1 - tail_r)
    return total


def express_in_span(target: Fraction, generators, coeff_bound: int):
    """Small-coefficient integer combination of ``generators`` equal to
    ``target``, or None."""
    gens = [Fraction(g) for g in generators]
    for combo in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=len(gens)):
        if sum(c * g for c, g in zip(combo, gens)) == target:
            return combo
    return None
