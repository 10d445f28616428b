"""Command-line front end.

Subcommands mirror the library modules; every payload is deterministic JSON
on stdout (sorted keys, no timestamps), diagnostics and the version header go
to stderr.  Exit codes: 0 success, 1 validation error, 2 unsupported
structure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import mpmath

from . import __version__
from .benjamin_ono import bo_report, parse_bo_spec
from .classification import classification_report, closures_homeomorphic, orbit_closure
from .dynamics import (
    equidistribution_report,
    haar_average,
    nu_dot_omega,
    parse_polynomial,
    sample_trajectory,
    time_average,
)
from .errors import UnsupportedStructureError, ValidationError
from .exact_linalg import IntVecFin, parse_rational
from .frequency import DEFAULT_DEPTH, FrequencyVector, SigmaSequence, parse_frequency_spec
from .resonance_reduction import reduce_flow, reduce_vector, resonance_basis
from .solenoid_geometry import (
    SolenoidCoords,
    TorusPoint,
    approximating_times,
    from_coordinates,
    is_member,
    to_coordinates,
)

MIN_PRECISION_BITS = 53


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def _load_spec(path: str) -> FrequencyVector:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read spec file {path}: {exc}") from None
    return parse_frequency_spec(text)


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None


def _parse_nu(text: str) -> IntVecFin:
    try:
        values = [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ValidationError(f"--nu expects comma-separated integers, got {text!r}") from None
    if not values:
        raise ValidationError("--nu is empty")
    return IntVecFin.from_list(values)


def _parse_sequence(text: str) -> SigmaSequence:
    """--a accepts either a comma list (treated as the prefix, with a constant
    tail continuing the last entry) or inline JSON {"prefix": ..., "tail": ...}."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return SigmaSequence.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"--a JSON is malformed: {exc}") from None
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise ValidationError(f"--a expects comma-separated integers or JSON, got {text!r}") from None
    if not values:
        raise ValidationError("--a is empty")
    tail = values[-1] if len(values) > 1 and values[-1] > 1 else 2
    return SigmaSequence(values, "constant", (tail,))


def _parse_point(text: str) -> TorusPoint:
    vals = [v for v in text.split(",") if v.strip() != ""]
    if not vals:
        raise ValidationError("--theta is empty")
    return TorusPoint.exact_point(vals)


def _precision(args) -> int:
    bits = args.precision
    if bits is None:
        env = os.environ.get("KRON_PRECISION")
        bits = int(env) if env else 64
    if bits < MIN_PRECISION_BITS:
        raise ValidationError(f"precision must be >= {MIN_PRECISION_BITS} bits, got {bits}")
    return bits


# -- subcommand handlers


def _cmd_classify(args) -> None:
    fv = _load_spec(args.spec)
    _emit(classification_report(fv, args.depth))


def _cmd_resonance(args) -> None:
    fv = _load_spec(args.spec)
    _emit(resonance_basis(fv, args.depth).to_json())


def _cmd_reduce(args) -> None:
    nu = _parse_nu(args.nu)
    cert = reduce_vector(nu)
    payload = cert.to_json()
    payload["input"] = nu.to_json()
    _emit(payload)


def _cmd_reduce_flow(args) -> None:
    fv = _load_spec(args.spec)
    _emit(reduce_flow(fv, args.depth).to_json())


def _cmd_simulate(args) -> None:
    fv = _load_spec(args.spec)
    theta0 = _parse_point(args.theta0) if args.theta0 else None
    rows = sample_trajectory(fv, theta0, args.t0, args.t1, args.steps, args.depth)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"theta_{j}" for j in range(1, args.depth + 1)])
        for t, angles in rows:
            writer.writerow([f"{t:.12g}"] + [f"{a:.12g}" for a in angles])
    _emit({"out": args.out, "steps": args.steps, "depth": args.depth})


def _cmd_average(args) -> None:
    fv = _load_spec(args.spec)
    poly = parse_polynomial(_load_json(args.poly))
    theta0 = _parse_point(args.theta0) if args.theta0 else TorusPoint.origin(args.depth)
    haar = haar_average(poly)
    rows = []
    for t_final in args.T:
        value = time_average(fv, poly, theta0, t_final)
        envelope = 0.0
        for nu, (re, im) in poly.items():
            if nu.is_zero():
                continue
            resonant, w = nu_dot_omega(fv, nu)
            if resonant:
                envelope = None
                break
            envelope += 2.0 * abs(complex(re) + 1j * complex(im)) / (t_final * abs(w))
        rows.append({"T": t_final, "value": value, "envelope": envelope})
    _emit({"haar": str(haar), "rows": rows})


def _cmd_equidistribution(args) -> None:
    fv = _load_spec(args.spec)
    nus = [_parse_nu(n) for n in args.nu]
    theta0 = _parse_point(args.theta0) if args.theta0 else TorusPoint.origin(args.depth)
    rows = equidistribution_report(fv, nus, args.T, theta0)
    _emit({"rows": [r.to_json() for r in rows]})


def _cmd_solenoid(args) -> None:
    a = _parse_sequence(args.a)
    if args.solenoid_op in ("member", "coords") and not args.theta:
        raise ValidationError(f"solenoid {args.solenoid_op} needs --theta")
    if args.solenoid_op == "times" and args.tau is None:
        raise ValidationError("solenoid times needs --tau")
    if args.solenoid_op == "member":
        theta = _parse_point(args.theta)
        verdict = is_member(a, theta)
        _emit({"member": verdict, "depth": theta.depth, "verdict": f"member at depth {theta.depth}" if verdict else "not a member"})
    elif args.solenoid_op == "coords":
        theta = _parse_point(args.theta)
        _emit(to_coordinates(a, theta).to_json())
    else:  # times
        digits = tuple(int(v) for v in args.digits.split(",")) if args.digits else ()
        coords = SolenoidCoords(parse_rational(args.tau), digits)
        times = approximating_times(a, coords)
        target = from_coordinates(a, coords)
        _emit({
            "times": [str(t) for t in times],
            "target": target.to_json(),
        })


def _cmd_bo(args) -> None:
    spec = parse_bo_spec(_load_json(args.spec))
    _emit(bo_report(spec, args.depth))


def _cmd_iso(args) -> None:
    fv1 = _load_spec(args.spec1)
    fv2 = _load_spec(args.spec2)
    _emit({
        "homeomorphic": closures_homeomorphic(fv1, fv2, args.depth),
        "left": orbit_closure(fv1, args.depth).to_json(),
        "right": orbit_closure(fv2, args.depth).to_json(),
    })


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kron", description=__doc__)
    parser.add_argument("--precision", type=int, default=None, help="mantissa bits (>= 53); env KRON_PRECISION")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        return p

    p = add("classify", _cmd_classify, help="module decomposition and orbit-closure descriptor")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)

    p = add("resonance", _cmd_resonance, help="canonical basis of the integer relations")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)

    p = add("reduce", _cmd_reduce, help="collapse an integer vector to (gcd, 0, ...)")
    p.add_argument("--nu", required=True)

    p = add("reduce-flow", _cmd_reduce_flow, help="conjugate to zero block + kernel-free block")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)

    p = add("simulate", _cmd_simulate, help="sample a float trajectory to CSV")
    p.add_argument("spec")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--theta0", default=None, help="comma list of rationals (turns)")
    p.add_argument("--out", required=True)

    p = add("average", _cmd_average, help="closed-form time average of a polynomial")
    p.add_argument("spec")
    p.add_argument("--poly", required=True)
    p.add_argument("--T", type=float, nargs="+", default=[100.0, 1000.0, 10000.0])
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--theta0", default=None)

    p = add("equidistribution", _cmd_equidistribution, help="decay table for monomials")
    p.add_argument("spec")
    p.add_argument("--nu", action="append", required=True, help="comma list; repeatable")
    p.add_argument("--T", type=float, nargs="+", default=[100.0, 1000.0, 10000.0])
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--theta0", default=None)

    p = add("solenoid", _cmd_solenoid, help="membership, coordinates, approximating times")
    p.add_argument("solenoid_op", choices=["member", "coords", "times"])
    p.add_argument("--a", required=True, help="comma list (prefix) or JSON sequence")
    p.add_argument("--theta", default=None, help="comma list of rationals (turns)")
    p.add_argument("--tau", default=None)
    p.add_argument("--digits", default=None)

    p = add("bo", _cmd_bo, help="integrable-flow classification report")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)

    p = add("iso", _cmd_iso, help="are the orbit closures homeomorphic?")
    p.add_argument("spec1")
    p.add_argument("spec2")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    print(f"kronflow {__version__}", file=sys.stderr)
    try:
        bits = _precision(args)
        with mpmath.workprec(bits):
            args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UnsupportedStructureError as exc:
        print(f"unsupported structure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
