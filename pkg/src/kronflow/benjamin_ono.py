"""Quadratic integrable-flow frequencies and their exact module classification.

For actions gamma_k = beta * s_k (beta irrational, s_k nonnegative rationals
with a geometric tail) the frequencies are

    omega_j = j^2 - 2 * beta * sigma_j,      sigma_j = sum_k min(j,k) s_k,

computed in closed form.  The frequency module splits as Z (from the squares)
plus beta times twice the subgroup R generated by the sigma values.  The key
exact facts: the differences e_{n+1} - e_n produce the tail sums
g_n = sum_{k>n} s_k inside R, and for a geometric tail with ratio u/v the
powers of the ratio span Z[1/v], which pins down R as an explicit (i, Lambda)
subgroup of Q.  Infinite nonnegative support forces g_n -> 0 through nonzero
values, so R is not free and the closure picks up a solenoid factor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .classification import (
    BaerType,
    Circle,
    ClosureDescriptor,
    ModuleComponent,
    ModuleDescriptor,
    Solenoid,
    SupernaturalNumber,
    free_baer_type,
    is_free,
)
from .classification import INF, _ALL, _FINITE  # shared exponent/prime-set tags
from .errors import ValidationError
from .exact_linalg import format_rational, rational_gcd
from .frequency import (
    UNIT,
    FrequencyVector,
    Generator,
    RationalSequenceSpec,
    bo_vector,
    truncate,
    _resolve_generator,
)
from .primes import factorize


@dataclass(frozen=True)
class BoActionSpec:
    """Birkhoff actions gamma_k = beta * s_k with beta an irrational scale."""

    beta: Generator
    s: RationalSequenceSpec

    def __post_init__(self):
        if self.beta.kind == "rational_unit":
            raise ValidationError("the action scale beta must be an irrational generator")


def parse_bo_spec(document: str | Mapping) -> BoActionSpec:
    if isinstance(document, str):
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"spec is not valid JSON: {exc}") from None
    else:
        obj = document
    if not isinstance(obj, Mapping) or "s" not in obj:
        raise ValidationError("action spec needs field 's'")
    s = RationalSequenceSpec.from_json(obj["s"])
    beta = _resolve_generator(obj.get("beta", {"name": "beta", "kind": "opaque"}), {})
    return BoActionSpec(beta, s)


def bo_rule(spec: BoActionSpec) -> FrequencyVector:
    return bo_vector(spec.beta, spec.s)


def bo_frequencies(spec: BoActionSpec, depth: int) -> FrequencyVector:
    """Exact finite vector (omega_1..omega_depth) over the generators {1, beta}."""
    return truncate(bo_rule(spec), depth)


# ---------------------------------------------------------------------------
# The subgroup R = Z-span of the sigma values, presented as f*Z + h*Z[1/v]


def _span_data(s: RationalSequenceSpec) -> tuple[Fraction, Fraction | None, int | None]:
    """R = span{sigma_j} = f*Z + h*Z[1/v] (h, v absent for finite support).

    Follows from sigma_{n+1} - sigma_n = g_n and the geometric tail: the g_n
    with n past the prefix are h * r^m, and span{r^m : m >= 0} = Z[1/v] for
    r = u/v in lowest terms (numerators u^a v^b reach gcd 1 by Bezout).
    """
    L = len(s.prefix)
    if s.support_is_finite():
        f = rational_gcd([s.sigma(j) for j in range(1, max(L, 1) + 1)])
        return f, None, None
    n0 = max(L, 1)
    finite_gens = [s.sigma(1)] + [s.tail_sum(n) for n in range(1, n0)]
    f = rational_gcd(finite_gens)
    h = s.tail_sum(n0)
    v = s.tail_r.denominator
    return f, h, v


def _int_valuation(n: int, p: int) -> int:
    n = abs(n)
    count = 0
    while n % p == 0:
        n //= p
        count += 1
    return count


def _valuation(x: Fraction, p: int) -> int:
    if x == 0:
        raise ValidationError("valuation of zero is undefined")
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def _baer_of_span(f: Fraction, h: Fraction | None, v: int | None) -> BaerType | None:
    """The unique (i, Lambda) with f*Z + h*Z[1/v] = S(i, Lambda).

    The minimal p-valuation over the subgroup determines both i and Lambda:
    primes dividing v are unbounded below; elsewhere the minimum of the
    valuations of f and h is attained by a pure element.
    """
    if h is None:
        if f == 0:
            return None
        return free_baer_type(f)
    inf_primes = set(factorize(v))
    # positive minimal valuation requires a prime dividing both numerators;
    # negative requires a prime from one of the denominators
    candidates = set(factorize(math.gcd(abs(f.numerator), abs(h.numerator))))
    for val in (f, h):
        if val.denominator > 1:
            candidates |= set(factorize(val.denominator))
    candidates -= inf_primes
    i = 1
    exps: dict[int, int | float] = {p: INF for p in inf_primes}
    for p in sorted(candidates):
        m = min(_valuation(f, p), _valuation(h, p))
        if m > 0:
            i *= p**m
        elif m < 0:
            exps[p] = -m
    pairs = [((_FINITE, frozenset({p})), e) for p, e in sorted(exps.items())]
    pairs.append(((_ALL,), 0))
    return BaerType(i, SupernaturalNumber(tuple(pairs)))


def span_contains(f: Fraction, h: Fraction | None, v: int | None, x: Fraction) -> bool:
    """Exact membership of x in f*Z + h*Z[1/v], by direct decomposition."""
    x = Fraction(x)
    if x == 0:
        return True
    if h is None:
        return f != 0 and (x / f).denominator == 1
    depth = 1
    for p, e in factorize(x.denominator).items():
        if p in factorize(v):
            depth = max(depth, e + 1)
    extra = max(abs(_valuation(h, p)) for p in factorize(v))
    for k in range(depth + extra + 2):
        d = rational_gcd([f, h / Fraction(v) ** k])
        if d != 0 and (x / d).denominator == 1:
            return True
    return False


def baer_contains(t: BaerType, x: Fraction) -> bool:
    """Membership of x in S(i, Lambda): v_p(x) >= v_p(i) - Lambda_p for all p.

    Only primes of the denominator and of i can violate the floor (elsewhere
    the floor is <= 0 <= v_p(x)), so the numerator is never factorized.
    """
    x = Fraction(x)
    if x == 0:
        return True
    candidates = set(factorize(t.i))
    if x.denominator > 1:
        candidates |= set(factorize(x.denominator))
    for p in candidates:
        lam = t.lam.resolve(p)
        floor = _int_valuation(t.i, p) - (lam if lam != INF else INF)
        if floor != -INF and _valuation(x, p) < floor:
            return False
    return True


# ---------------------------------------------------------------------------
# Reports and the classification pipeline


@dataclass(frozen=True)
class BoModuleReport:
    sigma_values: tuple[Fraction, ...]  # sigma_1..sigma_N
    tail_sums: tuple[Fraction, ...]  # g_1..g_{N-1}
    r_type: BaerType | None  # None when R = {0}
    closure: ClosureDescriptor
    full_support: bool
    depth: int

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "sigma": [format_rational(v) for v in self.sigma_values],
            "tail_sums": [format_rational(v) for v in self.tail_sums],
            "r_type": self.r_type.to_json() if self.r_type else "trivial",
            "r_free": bool(self.r_type and is_free(self.r_type)),
            "full_support": self.full_support,
            "closure": self.closure.to_json(),
        }


def bo_tail_module(spec: BoActionSpec, depth: int) -> BoModuleReport:
    """Exact presentation of R (the subgroup generated by the sigma values)
    together with the truncated sigma/tail-sum tables and the closure verdict.

    The report's guarantees: g_n = sigma_{n+1} - sigma_n for every tabulated
    n, every tabulated g_n lies in R, and R equals the emitted (i, Lambda)
    subgroup (both containments checkable via ``span_contains`` /
    ``baer_contains``).
    """
    if depth < 2:
        raise ValidationError("tail-module report needs depth >= 2")
    s = spec.s
    sigma_values = tuple(s.sigma(j) for j in range(1, depth + 1))
    tail_sums = tuple(s.tail_sum(n) for n in range(1, depth))
    f, h, v = _span_data(s)
    r_type = _baer_of_span(f, h, v)
    closure = bo_orbit_closure(spec, depth)
    return BoModuleReport(sigma_values, tail_sums, r_type, closure, s.full_support(), depth)


def module_descriptor(beta: Generator, s: RationalSequenceSpec, depth: int) -> ModuleDescriptor:
    """Components of the frequency module: Z on the unit generator (the
    squares reach 1 at j = 1), and the exact beta-coefficient subgroup, which
    is 2R since every beta-coordinate is -2 sigma_j."""
    comps = [ModuleComponent(UNIT, free_baer_type(Fraction(1)))]
    f, h, v = _span_data(s)
    if h is not None or f != 0:
        scaled = _baer_of_span(2 * f, 2 * h if h is not None else None, v)
        comps.append(ModuleComponent(beta, scaled))
    return ModuleDescriptor(tuple(comps))


def bo_orbit_closure(spec: BoActionSpec, depth: int) -> ClosureDescriptor:
    """Circle (from Z) times the dual of R: nothing for trivial R, a circle
    for finite support (R cyclic), a solenoid otherwise."""
    del depth
    f, h, v = _span_data(spec.s)
    factors: list[Circle | Solenoid] = [Circle()]
    r_type = _baer_of_span(f, h, v)
    if r_type is not None:
        factors.append(Circle() if is_free(r_type) else Solenoid(r_type.lam))
    return ClosureDescriptor(tuple(factors))


def bo_report(spec: BoActionSpec, depth: int) -> dict:
    """Full JSON report embedding the module classification."""
    from .classification import classification_report

    report = bo_tail_module(spec, depth)
    out = report.to_json()
    out["module"] = classification_report(bo_rule(spec), depth)
    return out
