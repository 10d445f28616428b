"""Exact symbolic frequency vectors over declared rationally-independent generators.

A frequency vector is either a finite list of exact coordinate maps or one of
three rule-based infinite families (solenoidal product rule, the quadratic
integrable-flow rule, and the prime-power product construction).  Coordinates
are exact rationals per generator; float values are produced on demand at a
configurable mantissa width via mpmath.

Rational independence of the declared generators is an axiom of the input.
The built-in kinds (the rational unit, square roots of distinct primes, and
powers of pi) form sets whose independence is classical; ``opaque``
generators are trusted as declared.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath

from .errors import UnsupportedStructureError, ValidationError
from .exact_linalg import format_rational, parse_rational
from .primes import factorize, is_prime, nth_prime, odd_indexed_prime

DEFAULT_DEPTH = 16
DEFAULT_PRECISION_BITS = 64


# ---------------------------------------------------------------------------
# Generators


@dataclass(frozen=True)
class Generator:
    """A real number declared rationally independent from the other generators.

    kind is one of ``rational_unit`` (the number 1), ``sqrt_prime`` (sqrt(p)),
    ``pi_power`` (pi**k), or ``opaque`` (value supplied as a decimal string
    with at least 30 significant digits, or omitted when only exact
    classification is needed).
    """

    name: str
    kind: str
    param: int | None = None
    value_digits: str | None = None

    def __post_init__(self):
        if self.kind == "sqrt_prime":
            if self.param is None or not is_prime(self.param):
                raise ValidationError(f"generator {self.name!r}: sqrt_prime needs a prime param")
        elif self.kind == "pi_power":
            if self.param is None or self.param < 1:
                raise ValidationError(f"generator {self.name!r}: pi_power needs param >= 1")
        elif self.kind == "rational_unit":
            pass
        elif self.kind == "opaque":
            if self.value_digits is not None:
                digits = sum(c.isdigit() for c in self.value_digits)
                if digits < 30:
                    raise ValidationError(
                        f"generator {self.name!r}: opaque value needs >= 30 significant digits"
                    )
        else:
            raise ValidationError(f"generator {self.name!r}: unknown kind {self.kind!r}")

    def float_value(self, precision_bits: int = DEFAULT_PRECISION_BITS) -> mpmath.mpf:
        with mpmath.workprec(max(precision_bits, DEFAULT_PRECISION_BITS)):
            if self.kind == "rational_unit":
                return mpmath.mpf(1)
            if self.kind == "sqrt_prime":
                return mpmath.sqrt(self.param)
            if self.kind == "pi_power":
                return mpmath.pi ** self.param
            if self.value_digits is None:
                raise ValidationError(
                    f"generator {self.name!r} is opaque with no declared numeric value"
                )
            return mpmath.mpf(self.value_digits)

    def sort_key(self) -> tuple:
        order = {"rational_unit": 0, "sqrt_prime": 1, "pi_power": 2, "opaque": 3}
        return (order[self.kind], self.param or 0, self.name)


UNIT = Generator("1", "rational_unit")


def sqrt_prime_generator(p: int) -> Generator:
    return Generator(f"sqrt{p}", "sqrt_prime", p)


def pi_power_generator(k: int) -> Generator:
    return Generator("pi" if k == 1 else f"pi^{k}", "pi_power", k)


def builtin_generator(name: str) -> Generator:
    """Resolve the built-in generator names: "1", "sqrt<p>", "pi", "pi^<k>"."""
    if name == "1":
        return UNIT
    if name.startswith("sqrt"):
        try:
            p = int(name[4:])
        except ValueError:
            raise ValidationError(f"generator name {name!r} is not builtin") from None
        return sqrt_prime_generator(p)
    if name == "pi":
        return pi_power_generator(1)
    if name.startswith("pi^"):
        try:
            k = int(name[3:])
        except ValueError:
            raise ValidationError(f"generator name {name!r} is not builtin") from None
        return pi_power_generator(k)
    raise ValidationError(f"generator name {name!r} is neither declared nor builtin")


# ---------------------------------------------------------------------------
# Integer sequences a = (1, a_2, a_3, ...) with structured tails


@dataclass(frozen=True)
class SigmaSequence:
    """Sequence with a_1 = 1 and a_j > 1 afterwards, given as an explicit
    prefix plus a structured tail.

    Tails: ``constant`` c, ``periodic`` cycle, ``increment`` (a_j = j), and
    ``odd_indexed_primes`` (the tail enumerates the odd-indexed primes from
    the start of that class, regardless of prefix length).
    """

    prefix: tuple[int, ...]
    tail_kind: str
    tail_params: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.prefix or self.prefix[0] != 1:
            raise ValidationError("sequence prefix must start with a_1 = 1")
        if any(v <= 1 for v in self.prefix[1:]):
            raise ValidationError("sequence entries after a_1 must exceed 1")
        if self.tail_kind == "constant":
            if len(self.tail_params) != 1 or self.tail_params[0] <= 1:
                raise ValidationError("constant tail needs a single value > 1")
        elif self.tail_kind == "periodic":
            if not self.tail_params or any(v <= 1 for v in self.tail_params):
                raise ValidationError("periodic tail needs values > 1")
        elif self.tail_kind in ("increment", "odd_indexed_primes"):
            if self.tail_params:
                raise ValidationError(f"{self.tail_kind} tail takes no parameters")
        else:
            raise ValidationError(f"unknown sequence tail {self.tail_kind!r}")

    def term(self, j: int) -> int:
        if j < 1:
            raise ValidationError(f"sequence index must be >= 1, got {j}")
        if j <= len(self.prefix):
            return self.prefix[j - 1]
        m = j - len(self.prefix)
        if self.tail_kind == "constant":
            return self.tail_params[0]
        if self.tail_kind == "periodic":
            return self.tail_params[(m - 1) % len(self.tail_params)]
        if self.tail_kind == "increment":
            return j
        return odd_indexed_prime(m)

    def terms(self, n: int) -> list[int]:
        return [self.term(j) for j in range(1, n + 1)]

    def partial_product(self, j: int) -> int:
        out = 1
        for k in range(1, j + 1):
            out *= self.term(k)
        return out

    def prefix_prime_exponents(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for v in self.prefix:
            for p, e in factorize(v).items():
                out[p] = out.get(p, 0) + e
        return out

    def to_json(self) -> dict:
        tail: object
        if self.tail_kind == "constant":
            tail = {"constant": self.tail_params[0]}
        elif self.tail_kind == "periodic":
            tail = {"periodic": list(self.tail_params)}
        else:
            tail = self.tail_kind
        return {"prefix": list(self.prefix), "tail": tail}

    @classmethod
    def from_json(cls, obj: Mapping) -> "SigmaSequence":
        if not isinstance(obj, Mapping) or "prefix" not in obj or "tail" not in obj:
            raise ValidationError("sequence needs 'prefix' and 'tail' fields")
        prefix = tuple(int(v) for v in obj["prefix"])
        tail = obj["tail"]
        if isinstance(tail, str):
            return cls(prefix, tail)
        if isinstance(tail, Mapping):
            if "constant" in tail:
                return cls(prefix, "constant", (int(tail["constant"]),))
            if "periodic" in tail:
                return cls(prefix, "periodic", tuple(int(v) for v in tail["periodic"]))
        raise ValidationError(f"malformed sequence tail {tail!r}")


# ---------------------------------------------------------------------------
# Nonnegative rational sequences with geometric tails (integrable-flow input)


@dataclass(frozen=True)
class RationalSequenceSpec:
    """s = (s_k): explicit nonnegative prefix, then s_{L+m} = c * r^(m-1).

    c = 0 means finite support.  The weighted sum  sum_k k*s_k  is finite by
    construction (geometric tail), which the quadratic frequency rule needs.
    """

    prefix: tuple[Fraction, ...] = ()
    tail_c: Fraction = Fraction(0)
    tail_r: Fraction = Fraction(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(Fraction(v) for v in self.prefix))
        object.__setattr__(self, "tail_c", Fraction(self.tail_c))
        object.__setattr__(self, "tail_r", Fraction(self.tail_r))
        if any(v < 0 for v in self.prefix):
            raise ValidationError("sequence prefix entries must be >= 0")
        if self.tail_c < 0:
            raise ValidationError("tail coefficient c must be >= 0")
        if self.tail_c > 0 and not (0 < self.tail_r < 1):
            raise ValidationError("tail ratio r must satisfy 0 < r < 1")

    def term(self, k: int) -> Fraction:
        if k < 1:
            raise ValidationError(f"sequence index must be >= 1, got {k}")
        L = len(self.prefix)
        if k <= L:
            return self.prefix[k - 1]
        if self.tail_c == 0:
            return Fraction(0)
        return self.tail_c * self.tail_r ** (k - L - 1)

    def support_is_finite(self) -> bool:
        return self.tail_c == 0

    def full_support(self) -> bool:
        return self.tail_c > 0 and all(v > 0 for v in self.prefix)

    def tail_sum(self, n: int) -> Fraction:
        """g_n = sum_{k > n} s_k, in closed form."""
        if n < 0:
            raise ValidationError("tail index must be >= 0")
        L = len(self.prefix)
        geo_total = self.tail_c / (1 - self.tail_r) if self.tail_c else Fraction(0)
        if n >= L:
            if self.tail_c == 0:
                return Fraction(0)
            return geo_total * self.tail_r ** (n - L)
        return sum(self.prefix[n:L], Fraction(0)) + geo_total

    def weighted_partial(self, j: int) -> Fraction:
        """sum_{k <= j} k * s_k, in closed form."""
        L = len(self.prefix)
        total = sum((k + 1) * self.prefix[k] for k in range(min(j, L)))
        if j > L and self.tail_c:
            m = j - L  # tail terms 1..m, weight L + i at tail position i
            r, c = self.tail_r, self.tail_c
            geom = (1 - r**m) / (1 - r)
            ramp = (1 - (m + 1) * r**m + m * r ** (m + 1)) / (1 - r) ** 2
            total += c * (L * geom + ramp)
        return Fraction(total)

    def weighted_total(self) -> Fraction:
        """sum_k k * s_k (finite by the geometric-tail assumption)."""
        L = len(self.prefix)
        total = sum((k + 1) * self.prefix[k] for k in range(L))
        if self.tail_c:
            r, c = self.tail_r, self.tail_c
            total += c * (L / (1 - r) + 1 / (1 - r) ** 2)
        return Fraction(total)

    def sigma(self, j: int) -> Fraction:
        """sigma_j = sum_k min(j,k) s_k = (sum_{k<=j} k s_k) + j g_j."""
        if j < 1:
            raise ValidationError(f"sigma index must be >= 1, got {j}")
        return self.weighted_partial(j) + j * self.tail_sum(j)

    def to_json(self) -> dict:
        out: dict = {"prefix": [format_rational(v) for v in self.prefix]}
        if self.tail_c:
            out["tail"] = {"c": format_rational(self.tail_c), "r": format_rational(self.tail_r)}
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "RationalSequenceSpec":
        if not isinstance(obj, Mapping):
            raise ValidationError("action sequence must be an object with 'prefix'/'tail'")
        prefix = tuple(parse_rational(v) for v in obj.get("prefix", ()))
        tail = obj.get("tail")
        if tail is None:
            return cls(prefix)
        if not isinstance(tail, Mapping) or "c" not in tail or "r" not in tail:
            raise ValidationError("geometric tail needs fields 'c' and 'r'")
        return cls(prefix, parse_rational(tail["c"]), parse_rational(tail["r"]))


# ---------------------------------------------------------------------------
# Subgroup-of-Q presentations used by the product construction


@dataclass(frozen=True)
class SubgroupOfQSpec:
    """Either the cyclic group r*Z (free) or Q(a) presented by a sequence."""

    free_generator: Fraction | None = None
    qa: SigmaSequence | None = None

    def __post_init__(self):
        if (self.free_generator is None) == (self.qa is None):
            raise ValidationError("subgroup spec needs exactly one of 'free' or 'qa'")
        if self.free_generator is not None:
            object.__setattr__(self, "free_generator", Fraction(self.free_generator))
            if self.free_generator <= 0:
                raise ValidationError("free subgroup generator must be positive")

    @property
    def is_free(self) -> bool:
        return self.free_generator is not None

    def to_json(self) -> dict:
        if self.is_free:
            return {"free": format_rational(self.free_generator)}
        return {"qa": self.qa.to_json()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "SubgroupOfQSpec":
        if isinstance(obj, Mapping) and "free" in obj:
            return cls(free_generator=parse_rational(obj["free"]))
        if isinstance(obj, Mapping) and "qa" in obj:
            return cls(qa=SigmaSequence.from_json(obj["qa"]))
        raise ValidationError("subgroup spec must carry 'free' or 'qa'")


# ---------------------------------------------------------------------------
# Frequency vector variants

CoordMap = dict[Generator, Fraction]


def _freeze_coords(coords: Mapping[Generator, Fraction]) -> tuple[tuple[Generator, Fraction], ...]:
    items = [(g, Fraction(c)) for g, c in coords.items() if c != 0]
    items.sort(key=lambda gc: gc[0].sort_key())
    return tuple(items)


@dataclass(frozen=True)
class Finite:
    terms: tuple[tuple[tuple[Generator, Fraction], ...], ...]

    @classmethod
    def from_maps(cls, maps: Sequence[Mapping[Generator, Fraction]]) -> "Finite":
        return cls(tuple(_freeze_coords(m) for m in maps))

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SolenoidRule:
    generator: Generator
    a: SigmaSequence


@dataclass(frozen=True)
class BoRule:
    beta: Generator
    s: RationalSequenceSpec

    def __post_init__(self):
        if self.beta.kind == "rational_unit":
            raise ValidationError("the quadratic-rule scale must be an irrational generator")


@dataclass(frozen=True)
class ProductConstruction:
    components: tuple[tuple[Generator, SubgroupOfQSpec], ...]

    def __post_init__(self):
        if not self.components:
            raise ValidationError("product construction needs at least one component")


Variant = Finite | SolenoidRule | BoRule | ProductConstruction


@dataclass(frozen=True)
class FrequencyVector:
    variant: Variant

    @property
    def is_finite(self) -> bool:
        return isinstance(self.variant, Finite)

    def length(self) -> int | None:
        return len(self.variant) if isinstance(self.variant, Finite) else None


def finite_vector(maps: Sequence[Mapping[Generator, Fraction]]) -> FrequencyVector:
    return FrequencyVector(Finite.from_maps(maps))


def rational_vector(values: Sequence[Fraction | int | str]) -> FrequencyVector:
    """Finite vector with all coordinates on the rational unit generator."""
    return finite_vector([{UNIT: parse_rational(v) if isinstance(v, str) else Fraction(v)} for v in values])


def solenoid_vector(a: SigmaSequence, generator: Generator = UNIT) -> FrequencyVector:
    return FrequencyVector(SolenoidRule(generator, a))


def bo_vector(beta: Generator, s: RationalSequenceSpec) -> FrequencyVector:
    return FrequencyVector(BoRule(beta, s))


# -- product construction index layout


def _product_layout(pc: ProductConstruction):
    """Assigned primes for non-free components, in component order."""
    reserved = []
    n = 0
    for gen, spec in pc.components:
        if not spec.is_free:
            n += 1
            reserved.append(nth_prime(n))
        else:
            reserved.append(None)
    return reserved


def _reserved_power(j: int, reserved_primes: Sequence[int]) -> tuple[int, int] | None:
    """If j == p_n^N for an assigned prime, return (component position, N)."""
    if j < 2:
        return None
    fact = factorize(j)
    if len(fact) != 1:
        return None
    (p, e), = fact.items()
    for pos, q in enumerate(reserved_primes):
        if q == p:
            return pos, e
    return None


def _free_slot_rank(j: int, reserved_primes: Sequence[int]) -> int:
    """1-based rank of j among indices not reserved to any prime power."""
    rank = 0
    for i in range(1, j + 1):
        if _reserved_power(i, reserved_primes) is None:
            rank += 1
    return rank


# ---------------------------------------------------------------------------
# Operations


def coordinates(fv: FrequencyVector, j: int) -> CoordMap:
    """Exact coordinates of omega_j in the Q-span of the declared generators."""
    if j < 1:
        raise ValidationError(f"frequency index must be >= 1, got {j}")
    v = fv.variant
    if isinstance(v, Finite):
        if j > len(v):
            raise ValidationError(f"index {j} beyond finite vector of length {len(v)}")
        return dict(v.terms[j - 1])
    if isinstance(v, SolenoidRule):
        return {v.generator: Fraction(1, v.a.partial_product(j))}
    if isinstance(v, BoRule):
        return {UNIT: Fraction(j * j), v.beta: -2 * v.s.sigma(j)}
    if isinstance(v, ProductConstruction):
        reserved = _product_layout(v)
        hit = _reserved_power(j, reserved)
        if hit is not None:
            pos, n_pow = hit
            gen, spec = v.components[pos]
            return {gen: Fraction(1, spec.qa.partial_product(n_pow))}
        free_components = [(g, s) for g, s in v.components if s.is_free]
        rank = _free_slot_rank(j, reserved)
        if rank <= len(free_components):
            gen, _spec = free_components[rank - 1]
            return {gen: Fraction(1)}
        return {}
    raise UnsupportedStructureError(f"unknown frequency variant {type(v).__name__}")


def evaluate_float(
    fv: FrequencyVector, j: int, precision_bits: int = DEFAULT_PRECISION_BITS
) -> mpmath.mpf:
    """omega_j as a float with >= 64-bit working mantissa."""
    coords = coordinates(fv, j)
    bits = max(precision_bits, DEFAULT_PRECISION_BITS)
    with mpmath.workprec(bits):
        total = mpmath.mpf(0)
        for gen, c in coords.items():
            total += mpmath.mpf(c.numerator) / c.denominator * gen.float_value(bits)
        return +total


def truncate(fv: FrequencyVector, depth: int) -> FrequencyVector:
    """First ``depth`` frequencies as an exact Finite vector."""
    if depth < 1:
        raise ValidationError(f"truncation depth must be >= 1, got {depth}")
    if fv.is_finite and len(fv.variant) < depth:
        raise ValidationError(
            f"cannot truncate length-{len(fv.variant)} vector to depth {depth}"
        )
    return finite_vector([coordinates(fv, j) for j in range(1, depth + 1)])


def generators_of(fv: FrequencyVector, depth: int) -> list[Generator]:
    """Generators with a nonzero coordinate among omega_1..omega_depth."""
    seen: dict[Generator, None] = {}
    for j in range(1, depth + 1):
        for g in coordinates(fv, j):
            seen.setdefault(g, None)
    return sorted(seen, key=Generator.sort_key)


# ---------------------------------------------------------------------------
# Parsing


def _generator_from_json(obj: Mapping) -> Generator:
    if not isinstance(obj, Mapping) or "name" not in obj or "kind" not in obj:
        raise ValidationError("generator declarations need 'name' and 'kind'")
    kind = obj["kind"]
    param = obj.get("param")
    return Generator(
        str(obj["name"]),
        str(kind),
        int(param) if param is not None else None,
        obj.get("value"),
    )


def _resolve_generator(name_or_obj, declared: dict[str, Generator]) -> Generator:
    if isinstance(name_or_obj, Mapping):
        return _generator_from_json(name_or_obj)
    name = str(name_or_obj)
    if name in declared:
        return declared[name]
    return builtin_generator(name)


def parse_frequency_spec(document: str | Mapping) -> FrequencyVector:
    """Parse and validate the JSON frequency-vector format.

    Top level: {"kind": "finite"|"solenoid"|"bo"|"product", optional
    "generators": [{name, kind, param?, value?}], plus the variant fields}.
    Rationals are strings "p/q"; sequences are {"prefix": [...], "tail": ...}.
    """
    if isinstance(document, str):
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"spec is not valid JSON: {exc}") from None
    else:
        obj = document
    if not isinstance(obj, Mapping):
        raise ValidationError("spec must be a JSON object")
    kind = obj.get("kind")
    declared = {}
    for g in obj.get("generators", ()):
        gen = _generator_from_json(g)
        declared[gen.name] = gen

    if kind == "finite":
        if "terms" not in obj:
            raise ValidationError("finite spec needs field 'terms'")
        maps = []
        for k, term in enumerate(obj["terms"]):
            if not isinstance(term, Mapping):
                raise ValidationError(f"terms[{k}] must map generator names to rationals")
            maps.append(
                {_resolve_generator(name, declared): parse_rational(val) for name, val in term.items()}
            )
        if not maps:
            raise ValidationError("finite spec needs at least one term")
        return finite_vector(maps)

    if kind == "solenoid":
        if "a" not in obj:
            raise ValidationError("solenoid spec needs field 'a'")
        a = SigmaSequence.from_json(obj["a"])
        gen = _resolve_generator(obj.get("generator", "1"), declared)
        return solenoid_vector(a, gen)

    if kind == "bo":
        if "s" not in obj:
            raise ValidationError("bo spec needs field 's'")
        s = RationalSequenceSpec.from_json(obj["s"])
        beta_ref = obj.get("beta", {"name": "beta", "kind": "opaque"})
        beta = _resolve_generator(beta_ref, declared)
        return bo_vector(beta, s)

    if kind == "product":
        if "components" not in obj:
            raise ValidationError("product spec needs field 'components'")
        specs = [SubgroupOfQSpec.from_json(c) for c in obj["components"]]
        return build_product_vector(specs)

    raise ValidationError(f"unknown spec kind {kind!r}")


def build_product_vector(groups: Sequence[SubgroupOfQSpec]) -> FrequencyVector:
    """Assign generators to subgroup specs per the prime-power layout.

    Non-free component n gets sqrt(p_n) and lives on indices p_n^N; free
    component k gets pi^k on the k-th unreserved index.
    """
    if not groups:
        raise ValidationError("product construction needs at least one subgroup")
    components = []
    n_nonfree = 0
    n_free = 0
    for spec in groups:
        if spec.is_free:
            n_free += 1
            components.append((pi_power_generator(n_free), spec))
        else:
            n_nonfree += 1
            components.append((sqrt_prime_generator(nth_prime(n_nonfree)), spec))
    return FrequencyVector(ProductConstruction(tuple(components)))


def frequency_to_json(fv: FrequencyVector) -> dict:
    v = fv.variant
    if isinstance(v, Finite):
        return {
            "kind": "finite",
            "terms": [
                {g.name: format_rational(c) for g, c in term} for term in v.terms
            ],
        }
    if isinstance(v, SolenoidRule):
        return {"kind": "solenoid", "generator": v.generator.name, "a": v.a.to_json()}
    if isinstance(v, BoRule):
        return {"kind": "bo", "beta": v.beta.name, "s": v.s.to_json()}
    if isinstance(v, ProductConstruction):
        return {"kind": "product", "components": [s.to_json() for _g, s in v.components]}
    raise UnsupportedStructureError(f"unknown frequency variant {type(v).__name__}")
