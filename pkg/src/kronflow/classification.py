"""Classification of frequency modules as direct sums of rank-1 subgroups of Q.

A rank-1 subgroup of the rationals is pinned down by a pair (i, Lambda): a
positive integer i and a formal product of primes with exponents in
N union {infinity} (a supernatural number).  Two such subgroups are
isomorphic exactly when the exponent lists agree at all but finitely many
primes and every disagreement involves two finite values.  The conversion
between a sequence presentation Q(a) and the (i, Lambda) descriptor goes via
prime-exponent accumulation in one direction and prime-power enumeration in
the other; structured tails are resolved analytically, never by sampling.

Orbit closures follow componentwise: a circle for each free component, a
solenoid carrying Lambda for each non-free one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import UnsupportedStructureError, ValidationError
from .exact_linalg import rational_gcd
from .frequency import (
    BoRule,
    Finite,
    FrequencyVector,
    Generator,
    ProductConstruction,
    SigmaSequence,
    SolenoidRule,
    SubgroupOfQSpec,
    build_product_vector,
    coordinates,
)
from .primes import factorize, is_even_indexed_prime, is_odd_indexed_prime

INF = math.inf

# prime-set tags used inside SupernaturalNumber pairs
_FINITE, _ALL, _ODD, _EVEN, _COFINITE = "finite", "all", "odd_indexed", "even_indexed", "cofinite"


def _check_exponent(e) -> int | float:
    if e == INF:
        return INF
    if isinstance(e, int) and e >= 0:
        return e
    raise ValidationError(f"exponent must be a nonnegative integer or infinity, got {e!r}")


def _format_exponent(e) -> object:
    return "inf" if e == INF else int(e)


@dataclass(frozen=True)
class SupernaturalNumber:
    """Formal product prod_p p^(Lambda_p) given as prioritized (prime set,
    exponent) pairs; the first matching pair wins.

    Supported prime sets: an explicit finite set, all primes, the odd- or
    even-indexed primes, and the complement of a finite set.  Construction
    canonicalizes the list (pairs fully shadowed by earlier ones are dropped)
    and checks that every prime resolves.
    """

    pairs: tuple[tuple[tuple, int | float], ...]

    def __post_init__(self):
        cleaned = []
        for pset, exp in self.pairs:
            kind = pset[0]
            if kind == _FINITE:
                pset = (_FINITE, frozenset(int(p) for p in pset[1]))
                if not pset[1]:
                    continue
            elif kind == _COFINITE:
                pset = (_COFINITE, frozenset(int(p) for p in pset[1]))
            elif kind not in (_ALL, _ODD, _EVEN):
                raise ValidationError(f"unknown prime set kind {kind!r}")
            cleaned.append((pset, _check_exponent(exp)))
        object.__setattr__(self, "pairs", tuple(self._drop_shadowed(cleaned)))
        self._validate_total()

    # -- canonicalization

    @staticmethod
    def _drop_shadowed(pairs):
        # coverage per class: ("partial", explicit set) or ("cofinite", missing set)
        state = {"odd": ("partial", frozenset()), "even": ("partial", frozenset())}

        def covered(p: int) -> bool:
            mode, data = state["odd" if is_odd_indexed_prime(p) else "even"]
            return p in data if mode == "partial" else p not in data

        def class_fully_covered(cls_key: str) -> bool:
            mode, data = state[cls_key]
            return mode == "cofinite" and not data

        def class_covered_except_within(cls_key: str, allowed: frozenset) -> bool:
            mode, data = state[cls_key]
            return mode == "cofinite" and data <= allowed

        out = []
        for pset, exp in pairs:
            kind = pset[0]
            if kind == _FINITE:
                shadowed = all(covered(p) for p in pset[1])
            elif kind == _ALL:
                shadowed = class_fully_covered("odd") and class_fully_covered("even")
            elif kind == _ODD:
                shadowed = class_fully_covered("odd")
            elif kind == _EVEN:
                shadowed = class_fully_covered("even")
            else:
                shadowed = class_covered_except_within("odd", pset[1]) and class_covered_except_within(
                    "even", pset[1]
                )
            if shadowed:
                continue
            out.append((pset, exp))
            # update coverage
            for cls_key, member in (("odd", is_odd_indexed_prime), ("even", is_even_indexed_prime)):
                mode, data = state[cls_key]
                if kind == _FINITE:
                    hit = frozenset(p for p in pset[1] if member(p))
                    state[cls_key] = (mode, data | hit) if mode == "partial" else (mode, data - hit)
                elif kind == _ALL or (kind == _ODD and cls_key == "odd") or (
                    kind == _EVEN and cls_key == "even"
                ):
                    state[cls_key] = ("cofinite", frozenset())
                elif kind == _COFINITE:
                    excl = frozenset(p for p in pset[1] if member(p))
                    if mode == "partial":
                        state[cls_key] = ("cofinite", excl - data)
                    else:
                        state[cls_key] = ("cofinite", data & excl)
        return out

    # -- resolution

    def resolve(self, p: int):
        """Exponent assigned to the prime p (first matching pair)."""
        for pset, exp in self.pairs:
            kind = pset[0]
            if kind == _FINITE and p in pset[1]:
                return exp
            if kind == _ALL:
                return exp
            if kind == _ODD and is_odd_indexed_prime(p):
                return exp
            if kind == _EVEN and is_even_indexed_prime(p):
                return exp
            if kind == _COFINITE and p not in pset[1]:
                return exp
        return None

    def _asymptotic(self, cls_key: str):
        wanted = _ODD if cls_key == "odd" else _EVEN
        for pset, exp in self.pairs:
            if pset[0] in (_ALL, _COFINITE, wanted):
                return exp
        return None

    def _candidate_primes(self) -> set[int]:
        out: set[int] = set()
        for pset, _ in self.pairs:
            if pset[0] in (_FINITE, _COFINITE):
                out |= set(pset[1])
        return out

    def _validate_total(self) -> None:
        if self._asymptotic("odd") is None or self._asymptotic("even") is None:
            raise ValidationError("prime-set pairs leave infinitely many primes unassigned")
        for p in self._candidate_primes():
            if self.resolve(p) is None:
                raise ValidationError(f"prime {p} resolves to no exponent")

    def profile(self):
        """(odd asymptotic, even asymptotic, finite exception map)."""
        odd_a = self._asymptotic("odd")
        even_a = self._asymptotic("even")
        exceptions = {}
        for p in sorted(self._candidate_primes()):
            e = self.resolve(p)
            base = odd_a if is_odd_indexed_prime(p) else even_a
            if e != base:
                exceptions[p] = e
        return odd_a, even_a, exceptions

    def is_finite_product(self) -> bool:
        odd_a, even_a, exceptions = self.profile()
        return odd_a == 0 and even_a == 0 and all(e != INF for e in exceptions.values())

    def same_assignment(self, other: "SupernaturalNumber") -> bool:
        return self.profile() == other.profile()

    def to_json(self) -> dict:
        out = []
        for pset, exp in self.pairs:
            kind = pset[0]
            if kind == _FINITE:
                primes: object = sorted(pset[1])
            elif kind == _COFINITE:
                primes = {"all_except": sorted(pset[1])}
            else:
                primes = kind
            out.append({"primes": primes, "exp": _format_exponent(exp)})
        return {"pairs": out}

    # -- constructors

    @classmethod
    def zero(cls) -> "SupernaturalNumber":
        return cls((((_ALL,), 0),))

    @classmethod
    def all_infinite(cls) -> "SupernaturalNumber":
        return cls((((_ALL,), INF),))

    @classmethod
    def from_exponents(cls, exps: dict[int, int | float]) -> "SupernaturalNumber":
        pairs = [((_FINITE, frozenset({p})), e) for p, e in sorted(exps.items())]
        pairs.append(((_ALL,), 0))
        return cls(tuple(pairs))


@dataclass(frozen=True)
class BaerType:
    """Descriptor (i, Lambda) of a rank-1 subgroup of Q: the fractions
    n*i / prod p^(lambda_p) with lambda <= Lambda componentwise."""

    i: int
    lam: SupernaturalNumber

    def __post_init__(self):
        if self.i < 1:
            raise ValidationError(f"Baer index i must be a positive integer, got {self.i}")
        for p in factorize(self.i):
            if self.lam.resolve(p) != 0:
                raise ValidationError(
                    f"index i = {self.i} is divisible by {p} which carries a positive exponent"
                )

    def to_json(self) -> dict:
        return {"i": self.i, "lambda": self.lam.to_json()}


def free_baer_type(generator: Fraction) -> BaerType:
    """Descriptor of the cyclic subgroup g*Z for g = i / prod p^e > 0."""
    g = Fraction(generator)
    if g <= 0:
        raise ValidationError("cyclic subgroup generator must be positive")
    lam = SupernaturalNumber.from_exponents({p: e for p, e in factorize(g.denominator).items()})
    return BaerType(g.numerator, lam)


def is_free(t: BaerType) -> bool:
    """True iff prod_p p^(Lambda_p) is finite."""
    return t.lam.is_finite_product()


def baer_isomorphic(t1: BaerType, t2: BaerType) -> bool:
    """Almost-everywhere agreement with only finite-finite disagreements."""
    odd1, even1, exc1 = t1.lam.profile()
    odd2, even2, exc2 = t2.lam.profile()
    if odd1 != odd2 or even1 != even2:
        return False
    for p in set(exc1) | set(exc2):
        base = odd1 if is_odd_indexed_prime(p) else even1
        e1 = exc1.get(p, base)
        e2 = exc2.get(p, base)
        if e1 != e2 and (e1 == INF or e2 == INF):
            return False
    return True


# ---------------------------------------------------------------------------
# Conversions between sequence presentations and Baer descriptors


def qa_to_baer(a: SigmaSequence, depth: int | None = None) -> BaerType:
    """Lambda_p = total exponent of p across the sequence entries, with the
    structured tail folded in analytically; i = 1.

    The ``depth`` argument is accepted for interface symmetry; the prefix is
    finite and the tail is resolved in closed form, so no sampling occurs.
    """
    del depth
    prefix_exps = a.prefix_prime_exponents()
    pairs: list[tuple[tuple, int | float]] = []
    if a.tail_kind == "increment":
        return BaerType(1, SupernaturalNumber.all_infinite())
    if a.tail_kind in ("constant", "periodic"):
        inf_primes: set[int] = set()
        for v in a.tail_params:
            inf_primes |= set(factorize(v))
        for p in sorted(set(prefix_exps) - inf_primes):
            pairs.append(((_FINITE, frozenset({p})), prefix_exps[p]))
        if inf_primes:
            pairs.append(((_FINITE, frozenset(inf_primes)), INF))
        pairs.append(((_ALL,), 0))
        return BaerType(1, SupernaturalNumber(tuple(pairs)))
    if a.tail_kind == "odd_indexed_primes":
        for p in sorted(prefix_exps):
            total = prefix_exps[p] + (1 if is_odd_indexed_prime(p) else 0)
            pairs.append(((_FINITE, frozenset({p})), total))
        pairs.append(((_ODD,), 1))
        pairs.append(((_ALL,), 0))
        return BaerType(1, SupernaturalNumber(tuple(pairs)))
    raise UnsupportedStructureError(f"sequence tail {a.tail_kind!r} has no analytic resolution")


def baer_to_qa(t: BaerType) -> SigmaSequence:
    """A sequence a with Q(a) isomorphic to the given non-free type.

    Finite exceptional exponents are realized through the prefix whenever the
    prefix can only add (never subtract), so the roundtrip reproduces the
    type up to the almost-everywhere isomorphism criterion.
    """
    if is_free(t):
        raise ValidationError("free type: the subgroup is cyclic and has no sequence presentation")
    odd_a, even_a, exceptions = t.lam.profile()

    if odd_a == 0 and even_a == 0:
        inf_primes = sorted(p for p, e in exceptions.items() if e == INF)
        finite_exc = {p: e for p, e in exceptions.items() if e != INF and e > 0}
        prefix = [1]
        for p in sorted(finite_exc):
            prefix.extend([p] * int(finite_exc[p]))
        if len(inf_primes) == 1:
            return SigmaSequence(tuple(prefix), "constant", (inf_primes[0],))
        return SigmaSequence(tuple(prefix), "periodic", tuple(inf_primes))

    if odd_a == INF and even_a == INF:
        if any(e != INF for e in exceptions.values()):
            raise UnsupportedStructureError(
                "finite exceptional exponents over an all-infinite tail are not expressible "
                "with the structured tails"
            )
        return SigmaSequence((1,), "increment")

    if odd_a == 1 and even_a == 0:
        prefix = [1]
        for p in sorted(exceptions):
            e = exceptions[p]
            if e == INF:
                raise UnsupportedStructureError(
                    f"infinite exponent at prime {p} cannot ride on the odd-indexed-primes tail"
                )
            baseline = 1 if is_odd_indexed_prime(p) else 0
            extra = int(e) - baseline
            if extra > 0:
                prefix.extend([p] * extra)
            # extra < 0 (e.g. exponent 0 on an odd-indexed prime) is absorbed
            # by the isomorphism criterion: single finite disagreement
        return SigmaSequence(tuple(prefix), "odd_indexed_primes")

    raise UnsupportedStructureError(
        f"asymptotic profile (odd={odd_a}, even={even_a}) is outside the representable class"
    )


# ---------------------------------------------------------------------------
# Module and closure descriptors


@dataclass(frozen=True)
class ModuleComponent:
    generator: Generator
    baer: BaerType

    @property
    def free(self) -> bool:
        return is_free(self.baer)


@dataclass(frozen=True)
class ModuleDescriptor:
    components: tuple[ModuleComponent, ...]

    @property
    def free_rank(self) -> int:
        return sum(1 for c in self.components if c.free)

    @property
    def rank(self) -> int:
        return len(self.components)

    @property
    def is_free(self) -> bool:
        return all(c.free for c in self.components)

    def nonfree_components(self) -> list[ModuleComponent]:
        return [c for c in self.components if not c.free]

    def to_json(self) -> dict:
        return {
            "components": [
                {"generator": c.generator.name, "free": c.free, "baer": c.baer.to_json()}
                for c in self.components
            ]
        }


@dataclass(frozen=True)
class Circle:
    def to_json(self):
        return "circle"


@dataclass(frozen=True)
class Solenoid:
    lam: SupernaturalNumber

    def __post_init__(self):
        if self.lam.is_finite_product():
            raise ValidationError("solenoid factor requires an infinite product")

    def to_json(self):
        return {"solenoid": self.lam.to_json()}


@dataclass(frozen=True)
class ClosureDescriptor:
    factors: tuple[Circle | Solenoid, ...]

    def to_json(self) -> list:
        return [f.to_json() for f in self.factors]

    def counts(self) -> tuple[int, int]:
        circles = sum(1 for f in self.factors if isinstance(f, Circle))
        return circles, len(self.factors) - circles


# ---------------------------------------------------------------------------
# Decomposition pipeline


def decompose_module(fv: FrequencyVector, depth: int) -> ModuleDescriptor:
    """One rank-1 component per generator with nonzero coordinates.

    Finite vectors produce the exact finite spans (always cyclic, hence
    free); rule-based variants resolve their tails analytically.
    """
    v = fv.variant
    if isinstance(v, Finite):
        per_gen: dict[Generator, list[Fraction]] = {}
        scan = min(depth, len(v))
        for j in range(1, scan + 1):
            for g, c in coordinates(fv, j).items():
                per_gen.setdefault(g, []).append(c)
        comps = []
        for g in sorted(per_gen, key=Generator.sort_key):
            span_gen = rational_gcd(per_gen[g])
            comps.append(ModuleComponent(g, free_baer_type(span_gen)))
        return ModuleDescriptor(tuple(comps))
    if isinstance(v, SolenoidRule):
        return ModuleDescriptor((ModuleComponent(v.generator, qa_to_baer(v.a)),))
    if isinstance(v, BoRule):
        from . import benjamin_ono

        return benjamin_ono.module_descriptor(v.beta, v.s, depth)
    if isinstance(v, ProductConstruction):
        comps = []
        for gen, spec in v.components:
            if spec.is_free:
                comps.append(ModuleComponent(gen, free_baer_type(Fraction(1))))
            else:
                comps.append(ModuleComponent(gen, qa_to_baer(spec.qa)))
        return ModuleDescriptor(tuple(comps))
    raise UnsupportedStructureError(
        f"no decomposition rule for frequency variant {type(v).__name__}"
    )


def module_rank(md: ModuleDescriptor) -> int:
    """Number of rank-1 components (each contributes rank exactly 1).

    Every supported variant yields finitely many generators at any depth, so
    the rank here is always a finite count.
    """
    return md.rank


def orbit_closure(fv: FrequencyVector, depth: int) -> ClosureDescriptor:
    md = decompose_module(fv, depth)
    factors: list[Circle | Solenoid] = []
    for c in md.components:
        factors.append(Circle() if c.free else Solenoid(c.baer.lam))
    return ClosureDescriptor(tuple(factors))


def closures_homeomorphic(fv1: FrequencyVector, fv2: FrequencyVector, depth: int) -> bool:
    """Componentwise criterion for the direct-sum-of-rank-1 class: equal free
    ranks and a Baer-isomorphism matching between the non-free components."""
    md1 = decompose_module(fv1, depth)
    md2 = decompose_module(fv2, depth)
    if md1.free_rank != md2.free_rank:
        return False
    left = md1.nonfree_components()
    right = list(md2.nonfree_components())
    if len(left) != len(right):
        return False
    for c in left:
        match = next((k for k, d in enumerate(right) if baer_isomorphic(c.baer, d.baer)), None)
        if match is None:
            return False
        right.pop(match)
    return True


def build_frequency_from_groups(groups: Sequence[SubgroupOfQSpec]) -> FrequencyVector:
    """Frequency vector whose module decomposes as the given subgroup list
    (prime-power index layout; free components become powers of pi)."""
    return build_product_vector(groups)


def classification_report(fv: FrequencyVector, depth: int) -> dict:
    md = decompose_module(fv, depth)
    closure = orbit_closure(fv, depth)
    return {
        "depth": depth,
        "module": md.to_json(),
        "rank": md.rank,
        "free": md.is_free,
        "closure": closure.to_json(),
    }
