import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kronflow.dynamics import (
    TrigPolynomial,
    equidistribution_report,
    evaluate_polynomial,
    flow,
    haar_average,
    minimality_probe,
    nu_dot_omega,
    parse_polynomial,
    resonance_witness,
    time_average,
    time_average_quadrature,
    transform_polynomial,
)
from kronflow.errors import ValidationError
from kronflow.exact_linalg import IntVecFin
from kronflow.frequency import (
    parse_frequency_spec,
    rational_vector,
)
from kronflow.resonance_reduction import reduce_flow
from kronflow.solenoid_geometry import TorusPoint

SQRT2 = parse_frequency_spec('{"kind":"finite","terms":[{"1":"1"},{"sqrt2":"1"}]}')
SQRT23 = parse_frequency_spec(
    '{"kind":"finite","terms":[{"1":"1"},{"sqrt2":"1"},{"sqrt3":"1"}]}'
)
RES11 = rational_vector(["1", "1"])
COS12 = TrigPolynomial.cosine(IntVecFin({1: 1, 2: -1}))


# -- flow examples


def test_flow_time_zero():
    theta = TorusPoint.exact_point(["1/5", "2/7"])
    assert flow(rational_vector(["1", "1/2"]), theta, F(0)) == theta


def test_flow_exact_rational():
    fv = rational_vector(["1", "1/2"])
    out = flow(fv, TorusPoint.origin(2), F(1, 2))
    assert out.angles == (F(1, 2), F(1, 4))


def test_flow_group_law_exact():
    fv = rational_vector(["1", "1/2", "1/3"])
    theta = TorusPoint.exact_point(["1/7", "2/7", "3/7"])
    s, t = F(5, 3), F(-7, 4)
    assert flow(fv, flow(fv, theta, s), t) == flow(fv, theta, s + t)


@settings(max_examples=30, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_flow_group_law_float(s, t):
    theta = TorusPoint.float_point([0.3, 1.2])
    a = flow(SQRT2, flow(SQRT2, theta, s), t)
    b = flow(SQRT2, theta, s + t)
    for x, y in zip(a.angles, b.angles):
        d = abs(x - y) % (2 * math.pi)
        assert min(d, 2 * math.pi - d) < 1e-9


def test_flow_falls_back_to_float_for_multiple_generators():
    out = flow(SQRT2, TorusPoint.origin(2), F(1, 2))
    assert not out.exact


# -- haar_average examples


def test_haar_constant_plus_cosine():
    p = TrigPolynomial.constant(3) + TrigPolynomial.cosine(IntVecFin({1: 1}), 2)
    assert haar_average(p) == 3


def test_haar_pure_cosine():
    assert haar_average(COS12) == 0


def test_haar_unit():
    assert haar_average(TrigPolynomial.one()) == 1


def test_reality_enforced():
    with pytest.raises(ValidationError):
        TrigPolynomial.from_table({IntVecFin({1: 1}): (F(1), F(0))})  # missing mirror


# -- time_average examples


def test_average_of_unit_is_one():
    for t_final in (1.0, 10.0, 1234.5):
        assert time_average(SQRT2, TrigPolynomial.one(), TorusPoint.origin(2), t_final) == 1.0


def test_average_decay_bound_at_1000():
    value = time_average(SQRT2, COS12, TorusPoint.origin(2), 1000.0)
    bound = 2.0 / (1000.0 * (math.sqrt(2) - 1.0))
    assert abs(value) <= bound + 1e-12
    assert abs(bound - 0.004828427) < 1e-8


def test_average_resonant_term_is_constant_one():
    for t_final in (1.0, 77.0, 10_000.0):
        assert time_average(RES11, COS12, TorusPoint.origin(2), t_final) == 1.0


def test_average_quadrature_cross_check():
    t_final = 40.0
    closed = time_average(SQRT2, COS12, TorusPoint.origin(2), t_final)
    approx = time_average_quadrature(SQRT2, COS12, TorusPoint.origin(2), t_final, samples=6001)
    assert abs(closed - approx) < 5e-5


def test_average_decays_within_envelope():
    # |avg - haar| bounded by the analytic envelope, shrinking with T
    p = COS12 + TrigPolynomial.cosine(IntVecFin({1: 2, 2: 1}), F(1, 2))
    last = None
    for t_final in (1e3, 1e4, 1e5):
        value = time_average(SQRT2, p, TorusPoint.origin(2), t_final)
        envelope = 0.0
        for nu, (re, im) in p.items():
            if nu.is_zero():
                continue
            resonant, w = nu_dot_omega(SQRT2, nu)
            assert not resonant
            envelope += 2.0 * abs(complex(re) + 1j * complex(im)) / (t_final * abs(w))
        assert abs(value - float(haar_average(p))) <= envelope
        if last is not None:
            assert envelope < last
        last = envelope


def test_average_conjugacy_invariance():
    fv = rational_vector(["1", "1/2", "1/3"])
    red = reduce_flow(fv, 3)
    theta0 = TorusPoint.exact_point(["1/3", "1/5", "1/7"])
    p = TrigPolynomial.cosine(IntVecFin({3: 1}), 2) + TrigPolynomial.cosine(
        IntVecFin({1: 1, 2: -2})
    )
    from kronflow.resonance_reduction import apply_automorphism

    lhs = time_average(red.reduced, p, apply_automorphism(red.transform, theta0), 500.0)
    rhs = time_average(fv, transform_polynomial(p, red.transform), theta0, 500.0)
    assert abs(lhs - rhs) < 1e-12


# -- equidistribution report examples


def test_report_bounds_scale():
    nu = IntVecFin({1: 1, 2: -1})
    rows = equidistribution_report(SQRT2, [nu], [10.0, 100.0, 1000.0], TorusPoint.origin(2))
    bounds = [r.bound for r in rows]
    assert all(r.passed for r in rows)
    assert abs(bounds[0] - 0.4828427) < 1e-6
    assert abs(bounds[0] / bounds[1] - 10.0) < 1e-9
    assert abs(bounds[1] / bounds[2] - 10.0) < 1e-9


def test_report_flags_zero_and_resonant():
    rows = equidistribution_report(
        RES11, [IntVecFin(), IntVecFin({1: 1, 2: -1})], [10.0], TorusPoint.origin(2)
    )
    assert rows[0].flag == "zero"
    assert rows[1].flag == "resonant"


def test_report_double_T_halves_bound():
    nu = IntVecFin({1: 2, 2: 0, 3: -1})
    rows = equidistribution_report(SQRT23, [nu], [200.0, 400.0], TorusPoint.origin(3))
    assert abs(rows[0].bound / rows[1].bound - 2.0) < 1e-12


# -- minimality probe examples


def test_probe_target_origin():
    res = minimality_probe(SQRT2, TorusPoint.origin(2), 2, 0.01, 10.0)
    assert res.hit and res.time == 0.0


def test_probe_hits_generic_target():
    res = minimality_probe(
        SQRT2, TorusPoint.exact_point(["1/2", "1/2"]), 2, 0.05, 5000.0
    )
    assert res.hit and res.distance < 0.05


def test_probe_rejects_resonant_vector():
    with pytest.raises(ValidationError):
        minimality_probe(RES11, TorusPoint.exact_point(["1/2", "0"]), 2, 0.1, 10.0)


# -- resonance witness examples


def test_witness_diagonal():
    assert resonance_witness(
        RES11, IntVecFin({1: 1, 2: -1}), TorusPoint.origin(2), [F(k, 7) for k in range(20)]
    )


def test_witness_harmonic():
    fv = rational_vector(["1", "1/2", "1/3"])
    assert resonance_witness(
        fv, IntVecFin({1: 1, 2: -2}), TorusPoint.exact_point(["1/3", "1/4", "1/5"]),
        [F(3, 2), F(-8, 5), F(100, 7)],
    )


def test_witness_rejects_nonresonant():
    with pytest.raises(ValidationError):
        resonance_witness(SQRT2, IntVecFin({1: 1, 2: -1}), TorusPoint.origin(2), [F(1)])


# -- polynomial plumbing


def test_parse_polynomial_shapes():
    p = parse_polynomial(
        {
            "terms": [
                {"const": "3"},
                {"cos": {"1": 1, "2": -1}, "scale": "2"},
                {"sin": {"1": 1}},
                {"nu": {"2": 1}, "re": "1/4", "im": "-1/3"},
            ]
        }
    )
    assert haar_average(p) == 3
    val = evaluate_polynomial(p, TorusPoint.origin(2))
    # at the origin: 3 + 2 cos 0 + sin 0 + 2 * Re(1/4 - i/3) = 5.5
    assert abs(val - 5.5) < 1e-12


def test_transform_polynomial_indices():
    from kronflow.exact_linalg import RowFiniteIntMatrix

    p = TrigPolynomial.cosine(IntVecFin({1: 1}))
    q = transform_polynomial(p, RowFiniteIntMatrix.swap(1, 2))
    assert dict(q.items()) == dict(TrigPolynomial.cosine(IntVecFin({2: 1})).items())


def test_reality_of_averages():
    rng = random.Random(3)
    p = TrigPolynomial.from_table({})
    for _ in range(4):
        nu = IntVecFin({rng.randint(1, 3): rng.randint(-2, 2) or 1})
        p = p + TrigPolynomial.cosine(nu, F(rng.randint(1, 3), 2)) + TrigPolynomial.sine(
            nu, F(1, 3)
        )
    value = time_average(SQRT23, p, TorusPoint.float_point([0.1, 2.2, 4.4]), 333.0)
    assert isinstance(value, float)  # construction already asserts imag < 1e-12


def test_near_resonance_warning():
    import warnings

    tight = rational_vector(["1", "10000000001/10000000000"])
    nu = IntVecFin({1: 1, 2: -1})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        resonant, value = nu_dot_omega(tight, nu)
    assert not resonant and abs(value) < 1e-9
    assert any("uninformative" in str(w.message) for w in caught)
