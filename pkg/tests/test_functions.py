import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oco_frugal.errors import DomainError, ParameterError
from oco_frugal.functions import (PiecewiseConvexSpec, Segment, dumps, evaluate, grad, loads,
                                  make_lower_bound_g, make_quadratic, params, random_convex_spec,
                                  validate_assumptions)


def test_eval_examples():
    assert evaluate(make_quadratic(10.0, 0.2), 0.2) == 0.0
    # g1 at 0 is -grad*0 + grad^2/M
    assert evaluate(make_lower_bound_g(1, 4.0, 10.0), 0.0) == pytest.approx(1.6, abs=1e-12)


def test_eval_g2_at_breakpoint_both_pieces_agree():
    g2 = make_lower_bound_g(2, 4.0, 10.0)
    left, right = g2.segments[0], g2.segments[1]
    assert left.hi == pytest.approx(0.2)
    # 5 grad^2 / (8M)
    assert left.value(0.2) == pytest.approx(1.0, abs=1e-12)
    assert right.value(0.2) == pytest.approx(1.0, abs=1e-12)
    assert evaluate(g2, left.hi) == left.value(left.hi)


def test_grad_examples():
    assert grad(make_quadratic(10.0, 0.2), 0.2) == 0.0
    assert grad(make_lower_bound_g(1, 4.0, 10.0), 0.0) == pytest.approx(-4.0)
    assert grad(make_lower_bound_g(2, 4.0, 10.0), 0.0) == pytest.approx(-4.0)


def test_grad_at_breakpoint_is_right_derivative():
    f = PiecewiseConvexSpec((Segment(0.0, 0.5, 0.0, -1.0, 0.5), Segment(0.5, 1.0, 0.0, 1.0, -0.5)))
    assert grad(f, 0.5) == 1.0
    assert evaluate(f, 0.5) == 0.0


@pytest.mark.parametrize("x", [-1e-3, 1.0 + 1e-9, math.nan])
def test_domain_errors(x):
    f = make_quadratic(1.0, 0.5)
    with pytest.raises(DomainError):
        evaluate(f, x)
    with pytest.raises(DomainError):
        grad(f, x)


def test_params_examples():
    p = params(make_quadratic(10.0, 0.4))
    assert (p.M, p.L, p.x_star) == (20.0, pytest.approx(12.0), pytest.approx(0.4))
    p0 = params(make_quadratic(0.0, 0.5))
    assert (p0.M, p0.L) == (0.0, 0.0)
    p1 = params(make_lower_bound_g(1, 4.0, 10.0))
    assert p1.M == pytest.approx(10.0)
    assert p1.L == pytest.approx(4.0)


def test_validate_examples():
    M = 10.0
    assert validate_assumptions(make_quadratic(M, 0.2), 2 * M, 2 * M).ok
    shifted = PiecewiseConvexSpec((Segment(0.0, 1.0, M, -0.4 * M, 0.04 * M + 1.0),))
    rep = validate_assumptions(shifted, 2 * M, 2 * M)
    assert rep.failed == ["zero_minimum"]
    assert validate_assumptions(make_lower_bound_g(2, 4.0, 10.0), 10.0, 4.0).ok


def test_validate_flags_understated_claims():
    rep = validate_assumptions(make_quadratic(10.0, 0.4), 19.0, 11.0)
    assert set(rep.failed) == {"smoothness", "lipschitz"}


def test_make_quadratic_examples():
    M = 10.0
    f1 = make_quadratic(0.5 * M, 0.1)
    assert evaluate(f1, 0.1) == 0.0
    zero = make_quadratic(0.0, 0.5)
    assert all(evaluate(zero, x) == 0.0 for x in np.linspace(0, 1, 11))
    assert evaluate(make_quadratic(M, 0.8), 0.0) == pytest.approx(6.4)
    with pytest.raises(ParameterError):
        make_quadratic(-1.0, 0.5)
    with pytest.raises(ParameterError):
        make_quadratic(1.0, 1.5)


def test_lower_bound_g1_minimizer():
    g1 = make_lower_bound_g(1, 4.0, 10.0)
    assert g1.x_star == pytest.approx(0.6)
    assert evaluate(g1, 0.6) == pytest.approx(0.0, abs=1e-12)


def test_lower_bound_g3_breakpoint():
    g3 = make_lower_bound_g(3, 4.0, 10.0)
    b = 2 * 4.0 / 30.0
    assert g3.segments[0].hi == pytest.approx(b)
    assert g3.segments[0].value(b) == pytest.approx(g3.segments[1].value(b), abs=1e-12)


@pytest.mark.parametrize("grad_mag,M", [(4.0, 10.0), (20.0, 50.0), (3.5, 9.0)])
def test_lower_bound_functions_indistinguishable_at_zero(grad_mag, M):
    gs = [make_lower_bound_g(i, grad_mag, M) for i in (1, 2, 3)]
    for g in gs[1:]:
        assert abs(evaluate(g, 0.0) - evaluate(gs[0], 0.0)) <= 1e-12
        assert abs(grad(g, 0.0) - grad(gs[0], 0.0)) <= 1e-12
    for g in gs:
        rep = validate_assumptions(g, M, grad_mag * 5 / 2)
        assert rep.ok, rep.failed


def test_lower_bound_preconditions():
    with pytest.raises(ParameterError, match="5\\*grad_mag/\\(2M\\)"):
        make_lower_bound_g(1, 5.0, 10.0)
    with pytest.raises(ParameterError, match="grad_mag > 3"):
        make_lower_bound_g(1, 3.0, 100.0)
    with pytest.raises(ParameterError):
        make_lower_bound_g(4, 4.0, 10.0)
    # feasibility boundary: g3's minimizer sits at 1
    assert make_lower_bound_g(3, 4.0, 10.0).x_star == pytest.approx(1.0)


def test_construction_rejects_bad_tilings():
    with pytest.raises(ParameterError):
        PiecewiseConvexSpec((Segment(0.0, 0.5, 1.0, 0.0, 0.0),))
    with pytest.raises(ParameterError):
        PiecewiseConvexSpec((Segment(0.0, 0.5, 0.0, 0.0, 0.0), Segment(0.5, 1.0, 0.0, 0.0, 1.0)))
    # concave kink
    with pytest.raises(ParameterError):
        PiecewiseConvexSpec((Segment(0.0, 0.5, 0.0, 1.0, 0.0), Segment(0.5, 1.0, 0.0, -1.0, 1.0)))
    with pytest.raises(ParameterError):
        Segment(0.0, 1.0, -1.0, 0.0, 0.0)


def test_serialization_round_trip():
    specs = [make_lower_bound_g(i, 4.0, 10.0) for i in (1, 2, 3)] + [make_quadratic(3.0, 0.25)]
    back = loads(dumps(specs))
    assert back == specs
    assert [s.name for s in back] == ["g1", "g2", "g3", ""]


def test_vectorized_matches_scalar():
    f = make_lower_bound_g(2, 4.0, 10.0)
    xs = np.concatenate([np.linspace(0, 1, 101), f.breakpoints])
    assert np.array_equal(f.values(xs), [f.value(x) for x in xs])
    assert np.array_equal(f.grads(xs), [f.grad(x) for x in xs])


# -- properties over constructed specs --------------------------------------

_specs = st.one_of(
    st.builds(lambda a, c: make_quadratic(a, c), st.floats(0, 50), st.floats(0, 1)),
    st.builds(lambda w, g: make_lower_bound_g(w, g, 2.5 * g + 1.0), st.integers(1, 3),
              st.floats(3.01, 30)),
    st.builds(lambda s, n: random_convex_spec(np.random.default_rng(s), n),
              st.integers(0, 10_000), st.integers(1, 5)),
)


@settings(max_examples=60, deadline=None)
@given(_specs, st.integers(0, 2**31))
def test_convexity_property(spec, seed):
    rng = np.random.default_rng(seed)
    pts = np.sort(rng.uniform(0, 1, size=(1000, 3)), axis=1)
    x, y, z = pts.T
    ok = z - x > 1e-12
    x, y, z = x[ok], y[ok], z[ok]
    fx, fy, fz = spec.values(x), spec.values(y), spec.values(z)
    chord = ((z - y) * fx + (y - x) * fz) / (z - x)
    assert np.all(fy <= chord + 1e-9 * (1 + np.abs(chord)))


@settings(max_examples=60, deadline=None)
@given(_specs, st.integers(0, 2**31))
def test_grad_matches_finite_differences(spec, seed):
    rng = np.random.default_rng(seed)
    xs = rng.uniform(1e-3, 1 - 1e-3, 1000)
    bps = np.array(spec.breakpoints)
    xs = xs[np.min(np.abs(xs[:, None] - bps[None, :]), axis=1) > 1e-4]
    eps = 1e-6
    fd = (spec.values(xs + eps) - spec.values(xs - eps)) / (2 * eps)
    M = spec.params.M
    assert np.all(np.abs(fd - spec.grads(xs)) <= max(1e-6, 1e-6 * M) + 1e-8 * (1 + np.abs(fd)))


_smooth_specs = st.one_of(
    st.builds(lambda a, c: make_quadratic(a, c), st.floats(0, 50), st.floats(0, 1)),
    st.builds(lambda w, g: make_lower_bound_g(w, g, 2.5 * g + 1.0), st.integers(1, 3),
              st.floats(3.01, 30)),
    st.builds(lambda s, n: random_convex_spec(np.random.default_rng(s), n, smooth=True),
              st.integers(0, 10_000), st.integers(1, 5)),
)


@settings(max_examples=60, deadline=None)
@given(_smooth_specs, st.integers(0, 2**31))
def test_params_certify_smoothness_and_lipschitz(spec, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(0, 1, (2, 500))
    p = spec.params
    assert np.all(np.abs(spec.grads(x) - spec.grads(y)) <= p.M * np.abs(x - y) + 1e-9 * (1 + p.L))
    assert np.all(np.abs(spec.values(x) - spec.values(y)) <= p.L * np.abs(x - y) + 1e-9 * (1 + p.L))


@settings(max_examples=60, deadline=None)
@given(_specs, st.integers(0, 2**31))
def test_params_certify_lipschitz_with_kinks(spec, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(0, 1, (2, 500))
    L = spec.params.L
    assert np.all(np.abs(spec.values(x) - spec.values(y)) <= L * np.abs(x - y) + 1e-9 * (1 + L))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_random_specs_satisfy_assumptions(seed, n):
    spec = random_convex_spec(np.random.default_rng(seed), n)
    rep = validate_assumptions(spec, spec.params.M, spec.params.L)
    assert rep.ok, rep.to_dict()
