"""Resonance modules and the reduction of resonant flows.

``resonance_basis`` realizes the set of integer relations among the first N
frequencies as the integer kernel of their exact coordinate matrix.
``reduce_vector`` collapses one integer vector to (g, 0, 0, ...) by a tracked
composition of elementary automorphisms, with a full audit trail whose
per-pass entry sums are strictly decreasing positive integers (that is the
termination argument, asserted literally).  ``reduce_flow`` iterates this over
a resonance basis, conjugating the flow to one whose frequency vector starts
with a zero block followed by a block with trivial integer kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .exact_linalg import (
    IntVecFin,
    RowFiniteIntMatrix,
    gcd_of_vector,
    integer_kernel,
    unimodular_compose,
)
from .frequency import FrequencyVector, coordinates, finite_vector, generators_of
from .solenoid_geometry import TorusPoint

# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResonanceBasis:
    vectors: tuple[IntVecFin, ...]
    truncation_depth: int

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def is_trivial(self) -> bool:
        return not self.vectors

    def to_json(self) -> dict:
        return {
            "depth": self.truncation_depth,
            "rank": self.rank,
            "vectors": [v.to_json() for v in self.vectors],
        }


def _coordinate_matrix(fv: FrequencyVector, depth: int):
    """Rows indexed by generators, columns by j = 1..depth; exact rationals."""
    gens = generators_of(fv, depth)
    cols = [coordinates(fv, j) for j in range(1, depth + 1)]
    rows = [[col.get(g, Fraction(0)) for col in cols] for g in gens]
    if not rows:
        rows = [[Fraction(0)] * depth]  # identically zero vector
    return gens, rows


def resonance_basis(fv: FrequencyVector, depth: int) -> ResonanceBasis:
    """Canonical basis of {nu in Z^depth : nu . (omega_1..omega_depth) = 0}."""
    if depth < 1:
        raise ValidationError(f"depth must be >= 1, got {depth}")
    gens, rows = _coordinate_matrix(fv, depth)
    basis = integer_kernel(rows)
    for nu in basis:  # exact re-check in generator coordinates
        for row in rows:
            if nu.dot_fractions(row) != 0:
                raise ValidationError("internal error: kernel vector fails exact resonance check")
    return ResonanceBasis(tuple(basis), depth)


# ---------------------------------------------------------------------------
# Single-vector reduction


@dataclass(frozen=True)
class ReductionStep:
    op: str  # "swap" | "negate" | "add_multiple"
    i: int
    j: int | None = None
    factor: int | None = None
    pass_index: int = 0

    def to_json(self) -> dict:
        out = {"op": self.op, "i": self.i, "pass": self.pass_index}
        if self.j is not None:
            out["j"] = self.j
        if self.factor is not None:
            out["factor"] = self.factor
        return out


@dataclass(frozen=True)
class ReductionCertificate:
    transform: RowFiniteIntMatrix
    result: IntVecFin
    steps: tuple[ReductionStep, ...]
    pass_sums: tuple[int, ...]
    gcd: int

    def to_json(self) -> dict:
        return {
            "gcd": self.gcd,
            "result": self.result.to_json(),
            "transform": self.transform.to_json(),
            "pass_sums": list(self.pass_sums),
            "steps": [s.to_json() for s in self.steps],
        }


class _Reducer:
    """Work state: a dense copy of the vector plus the accumulated transform.

    The composed matrix B and its inverse are maintained in place: a new
    elementary factor E acts as a row operation on B (E.B) and as the inverse
    column operation on B^-1 (B^-1.E^-1), so each recorded step costs O(n).
    """

    def __init__(self, nu: IntVecFin):
        self.n = n = nu.max_index()
        self.vec = nu.to_list(n)
        self.bmat = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        self.binv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        self.steps: list[ReductionStep] = []
        self.pass_index = 1

    def swap(self, i: int, j: int) -> None:
        if i == j:
            return
        self.vec[i - 1], self.vec[j - 1] = self.vec[j - 1], self.vec[i - 1]
        self.bmat[i - 1], self.bmat[j - 1] = self.bmat[j - 1], self.bmat[i - 1]
        for row in self.binv:
            row[i - 1], row[j - 1] = row[j - 1], row[i - 1]
        self.steps.append(ReductionStep("swap", i, j, None, self.pass_index))

    def negate(self, i: int) -> None:
        self.vec[i - 1] = -self.vec[i - 1]
        self.bmat[i - 1] = [-v for v in self.bmat[i - 1]]
        for row in self.binv:
            row[i - 1] = -row[i - 1]
        self.steps.append(ReductionStep("negate", i, None, None, self.pass_index))

    def add_multiple(self, i: int, j: int, c: int) -> None:
        """Row op row_i += c * row_j; the inverse is column op col_j -= c * col_i."""
        self.vec[i - 1] += c * self.vec[j - 1]
        bi, bj = self.bmat[i - 1], self.bmat[j - 1]
        for k in range(self.n):
            bi[k] += c * bj[k]
        for row in self.binv:
            row[j - 1] -= c * row[i - 1]
        self.steps.append(ReductionStep("add_multiple", i, j, c, self.pass_index))

    def transform(self) -> RowFiniteIntMatrix:
        rows = {i + 1: IntVecFin.from_list(self.bmat[i]) for i in range(self.n)}
        inv = {i + 1: IntVecFin.from_list(self.binv[i]) for i in range(self.n)}
        return RowFiniteIntMatrix(self.n, rows, inv)

    def support(self) -> list[int]:
        return [i + 1 for i, v in enumerate(self.vec) if v != 0]


def reduce_vector(nu: IntVecFin) -> ReductionCertificate:
    """Collapse nu != 0 to (g, 0, 0, ...) with g = gcd of the entries.

    Each pass sorts the surviving entries by absolute value (stable, ties in
    current index order), flips signs to make them positive, then subtracts
    the first entry from every other one.  The sum of entries after each
    normalization is recorded; the sums decrease strictly, which forces
    termination.
    """
    if nu.is_zero():
        raise ValidationError("cannot reduce the zero vector")
    state = _Reducer(nu)
    pass_sums: list[int] = []

    while True:
        support = state.support()
        # normalization: move support to the front, sorted ascending by |.|,
        # stable with ties kept in current index order
        order = sorted(support, key=lambda i: (abs(state.vec[i - 1]), i))
        for pos in range(len(order)):
            target, src = pos + 1, order[pos]
            if src != target:
                state.swap(target, src)
                # the entry displaced from `target` now lives at `src`
                for q in range(pos + 1, len(order)):
                    if order[q] == target:
                        order[q] = src
        k = len(order)
        for i in range(1, k + 1):
            if state.vec[i - 1] < 0:
                state.negate(i)
        pass_sums.append(sum(state.vec[:k]))
        if len(pass_sums) >= 2 and not pass_sums[-1] < pass_sums[-2]:
            raise ValidationError("internal error: pass sums failed to decrease")
        if k == 1:
            break
        for i in range(2, k + 1):
            state.add_multiple(i, 1, -1)
        state.pass_index += 1

    transform = state.transform()
    result = transform.apply(nu)
    expected = IntVecFin({1: state.vec[0]})
    if result != expected:
        raise ValidationError("internal error: transform does not reproduce the reduced vector")
    g = gcd_of_vector(nu)
    if state.vec[0] != g:
        raise ValidationError("internal error: reduced head is not the gcd")
    return ReductionCertificate(transform, result, tuple(state.steps), tuple(pass_sums), g)


# ---------------------------------------------------------------------------
# Flow reduction


@dataclass(frozen=True)
class FlowReduction:
    transform: RowFiniteIntMatrix
    reduced: FrequencyVector  # finite vector (0_d, omega-bar)
    zero_rank: int
    depth: int
    nonzero_block_independent: bool
    # "depth": the kernel is trivial for integer vectors supported on 1..depth;
    # "global": additionally the vector has no coordinates beyond depth
    nonresonance_scope: str

    def to_json(self) -> dict:
        from .frequency import frequency_to_json

        return {
            "depth": self.depth,
            "zero_rank": self.zero_rank,
            "transform": self.transform.to_json(),
            "reduced": frequency_to_json(self.reduced),
            "nonzero_block_independent": self.nonzero_block_independent,
            "nonresonance_scope": self.nonresonance_scope,
        }


def reduce_flow(fv: FrequencyVector, depth: int) -> FlowReduction:
    """Conjugate the depth-N truncation to (0_d, omega-bar) with omega-bar
    having trivial integer kernel at depth N.

    Resonances are eliminated one at a time: take the first canonical basis
    vector of the current resonance module restricted to the not-yet-zeroed
    coordinates, reduce it to g*e_1 within that block by ``reduce_vector``,
    and apply the transpose-inverse of that transform to the flow (its first
    row is the primitive resonance, so the conjugated frequency acquires one
    more zero).
    """
    if depth < 1:
        raise ValidationError(f"depth must be >= 1, got {depth}")
    gens, rows = _coordinate_matrix(fv, depth)
    cols = [[row[j] for row in rows] for j in range(depth)]  # per-j generator coords
    total = RowFiniteIntMatrix.identity(depth)
    zeros = 0

    while zeros < depth:
        active = [[row[j] for j in range(zeros, depth)] for row in rows]
        kernel = integer_kernel(active)
        if not kernel:
            break
        nu_local = kernel[0]
        cert = reduce_vector(nu_local)
        # A = (B^-1)* acting on the active block: its first row is nu/g,
        # so (A omega)_{zeros+1} = (nu . omega)/g = 0.
        block = cert.transform.inverse().transpose()
        step_mat = block.embed(zeros) if zeros else block
        total = unimodular_compose(step_mat, total)
        rows = [step_mat.apply_fraction_column([row[j] for j in range(depth)]) for row in rows]
        zeros += 1
        for row in rows:
            for j in range(zeros):
                if row[j] != 0:
                    raise ValidationError("internal error: zero block not preserved")

    reduced_maps = [
        {g: rows[gi][j] for gi, g in enumerate(gens) if rows[gi][j] != 0} for j in range(depth)
    ]
    reduced = finite_vector(reduced_maps)
    # the loop exit condition certifies trivial kernel on the nonzero block
    tail_basis = resonance_basis(reduced, depth)
    independent = tail_basis.is_trivial() or all(
        max(v.support()) <= zeros for v in tail_basis.vectors
    )
    scope = "global" if fv.is_finite and (fv.length() or 0) <= depth else "depth"
    return FlowReduction(total, reduced, zeros, depth, independent, scope)


# ---------------------------------------------------------------------------
# Automorphism action on points


def apply_automorphism(a: RowFiniteIntMatrix, theta: TorusPoint) -> TorusPoint:
    """Image of a point under the automorphism with matrix ``a``.

    Component i is sum_j a_ij Theta_j mod a full turn; exact for exact points.
    """
    if a.dimension > theta.depth:
        raise ValidationError(
            f"point depth {theta.depth} does not cover the automorphism block {a.dimension}"
        )
    n = theta.depth
    if theta.exact:
        vals = [
            a.row(i).dot_fractions(list(theta.angles)) % 1 if i <= a.dimension else theta.angles[i - 1]
            for i in range(1, n + 1)
        ]
        return TorusPoint.exact_point(vals)
    import math

    out = []
    for i in range(1, n + 1):
        if i <= a.dimension:
            s = sum(v * theta.angles[j - 1] for j, v in a.row(i).items())
        else:
            s = theta.angles[i - 1]
        out.append(s % (2 * math.pi))
    return TorusPoint.float_point(out)
