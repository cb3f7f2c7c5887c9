import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from katlas import rescale as rs
from katlas.errors import DegenerateRequiresA, NotApplicable, OutOfRange, PreconditionError
from katlas.rescale import Branch

pos = st.floats(1e-3, 1e3)
a_pos = st.floats(0.05, 20.0)
dims_hi = st.integers(5, 9)


def test_h_roots_nonpositive_s_is_empty():
    assert rs.h_roots(0.0, 1.0, 3) == []
    assert rs.h_roots(-1.0, 1.0, 5) == []


def test_dimension_closed_forms():
    assert rs.h_roots(3.0, 1.0, 2)[0].t == pytest.approx(0.5)
    # N=3: a t^2 + s t - 1 = 0
    t = rs.h_roots(1.0, 1.0, 3)[0].t
    assert t == pytest.approx((math.sqrt(5) - 1) / 2, rel=1e-15)
    assert rs.h_roots(0.75, 1.0, 4)[0].t == pytest.approx(0.5)
    assert rs.h_roots(1.0, 1.0, 4) == []
    assert rs.h_roots(8.0, 0.0, 7)[0].t == pytest.approx(2.0)


def test_n4_degenerate_continuum():
    (r,) = rs.h_roots(1.0, 0.0, 4)
    assert r.label is Branch.CONTINUUM and r.t is None
    assert rs.h_roots(1.1, 0.0, 4) == []
    assert rs.classify_existence(0.0, 1.0, 4, 1.0) is rs.ExistenceClass.CONTINUUM


def test_n1_degenerate_cube_root():
    # a = 0: t^-3 = s
    assert rs.h_roots(8.0, 0.0, 1)[0].t == pytest.approx(0.5, rel=1e-15)


def test_critical_scales_n5():
    sc = rs.critical_scales(1.0, 5)
    assert sc.t_star == pytest.approx(math.sqrt(1 / 3))
    assert sc.t_dstar == pytest.approx(math.sqrt(1 / 5))
    assert sc.s_star == pytest.approx(rs.h_eval(sc.t_star, 1.0, 5), rel=1e-14)
    with pytest.raises(NotApplicable):
        rs.critical_scales(1.0, 3)


def test_tangent_root():
    s = rs.s_star(1.0, 5)
    (r,) = rs.h_roots(s, 1.0, 5)
    assert r.label is Branch.TANGENT and r.t == pytest.approx(math.sqrt(1 / 3))
    assert rs.h_roots(1.01 * s, 1.0, 5) == []


def test_energy_identities_n5():
    a, b, N = 1.0, 1.0, 5
    sc = rs.critical_scales(a, N)
    assert rs.g_energy(sc.t_star, a, b, N) == pytest.approx(0.2, rel=1e-12)
    assert abs(rs.g_energy(sc.t_dstar, a, b, N)) < 1e-12
    assert rs.g_energy(1.0, a, b, N) == 0.0
    with pytest.raises(PreconditionError):
        rs.g_energy(0.0, a, b, N)


def test_thresholds_examples():
    th = rs.thresholds_b(1.0, 5, 1.0)
    assert th.b_dstar < th.b_star
    assert rs.thresholds_b(1.0, 4, 2.0).b_star == 0.5
    with pytest.raises(NotApplicable):
        rs.thresholds_b(1.0, 3, 1.0)
    with pytest.raises(NotApplicable):
        rs.thresholds_a(1.0, 4, 1.0)


def test_beta_example_and_exponent():
    # b=16, N=6, D=1: t^2 = 16, beta = (4-6)/(4*16*6*t^4) = -1/49152
    assert rs.beta_degenerate(16.0, 6, 1.0) == pytest.approx(-1 / 49152, rel=1e-15)
    t = rs.h_roots(16.0, 0.0, 6)[0].t
    assert rs.g_energy(t, 0.0, 16.0, 6) == pytest.approx(-1 / 49152, rel=1e-14)


def test_closed_forms_reject_degenerate():
    with pytest.raises(DegenerateRequiresA):
        rs.psi_n3(0.0, 1.0, 1.0)
    with pytest.raises(DegenerateRequiresA):
        rs.phi_n3(0.0, 1.0, 1.0)
    assert rs.t_n4(1.0, 1.0, 1.0) is None and rs.phi_n4(1.0, 2.0, 1.0) is None


def test_level_roots_range():
    with pytest.raises(OutOfRange):
        rs.level_roots_g(0.0, 1.0, 1.0, 5)
    with pytest.raises(OutOfRange):
        rs.level_roots_g(0.3, 1.0, 1.0, 5)
    lo, hi = rs.level_roots_g(0.2, 1.0, 1.0, 5)
    assert lo == pytest.approx(hi, rel=1e-12) and rs.gamma(0.2, 1.0, 1.0, 5) == 0.0


# --- properties ------------------------------------------------------------------------


@given(s=pos, a=st.one_of(st.just(0.0), st.floats(1e-6, 20.0)), N=st.integers(1, 9))
def test_roots_solve_h(s, a, N):
    assume(not (N == 4 and a == 0))
    for r in rs.h_roots(s, a, N):
        h = rs.h_eval(r.t, a, N)
        scale = r.t ** (N - 4) + a * r.t ** (N - 2)
        tol = 1e-6 if r.label is Branch.TANGENT else 1e-12
        assert abs(h - s) <= tol * scale


@given(frac=st.floats(1e-6, 0.999), a=a_pos, N=dims_hi)
def test_two_branches_straddle_t_star(frac, a, N):
    s = frac * rs.s_star(a, N)
    lo, hi = rs.h_roots(s, a, N)
    ts = rs.critical_scales(a, N).t_star
    assert lo.label is Branch.LOWER and hi.label is Branch.UPPER
    assert 0 < lo.t < ts < hi.t < 1 / math.sqrt(a)


@given(f1=st.floats(0.01, 0.98), a=a_pos, N=dims_hi)
def test_branches_move_monotonically(f1, a, N):
    ss = rs.s_star(a, N)
    l1, u1 = rs.h_roots(f1 * ss, a, N)
    l2, u2 = rs.h_roots((f1 + 0.01) * ss, a, N)
    assert l1.t < l2.t and u1.t > u2.t


@given(x=st.floats(0.02, 0.98), y=st.floats(0.02, 0.98), a=a_pos, b=pos, N=dims_hi)
def test_g_increases_then_decreases(x, y, a, b, N):
    assume(abs(x - y) > 1e-3)
    x, y = sorted((x, y))
    ts = rs.critical_scales(a, N).t_star
    # increasing on (0, t*)
    assert rs.g_energy(x * ts, a, b, N) < rs.g_energy(y * ts, a, b, N)
    # decreasing on (t*, a^-1/2)
    top = 1 / math.sqrt(a)
    t1, t2 = ts + x * (top - ts), ts + y * (top - ts)
    assert rs.g_energy(t1, a, b, N) > rs.g_energy(t2, a, b, N)


@settings(max_examples=60)
@given(frac=st.floats(0.05, 0.95), a=a_pos, b=pos, N=dims_hi)
def test_gamma_prime_matches_difference_quotient(frac, a, b, N):
    cs = rs.c_star(a, b, N)
    c = frac * cs
    h = 1e-6 * cs
    fd = (rs.gamma(c + h, a, b, N) - rs.gamma(c - h, a, b, N)) / (2 * h)
    gp = rs.gamma_prime(c, a, b, N)
    assert gp > 0
    assert fd == pytest.approx(gp, rel=1e-4)


@given(frac=st.floats(1e-6, 0.999), a=a_pos, b=pos, N=dims_hi)
def test_level_roots_solve_g(frac, a, b, N):
    c = frac * rs.c_star(a, b, N)
    lo, hi = rs.level_roots_g(c, a, b, N)
    ts = rs.critical_scales(a, N).t_star
    assert lo <= ts <= hi
    for t in (lo, hi):
        assert rs.g_energy(t, a, b, N) == pytest.approx(c, rel=1e-6)


@given(a=st.floats(0.01, 50.0), b=pos, D=pos)
def test_n3_closed_forms_agree_with_roots(a, b, D):
    (r,) = rs.h_roots(b * D, a, 3)
    assert rs.psi_n3(a, b, D) == pytest.approx(r.t, rel=1e-13)
    assert rs.phi_n3(a, b, D) == pytest.approx(rs.g_energy(r.t, a, b, 3, s=b * D), rel=1e-10)
    assert rs.phi_n3(a, b, D) > 0


@given(a=st.floats(0.01, 50.0), b=pos, D=pos)
def test_n4_closed_forms_agree_with_roots(a, b, D):
    assume(b * D < 0.999)
    (r,) = rs.h_roots(b * D, a, 4)
    assert rs.t_n4(a, b, D) == pytest.approx(r.t, rel=1e-13)
    assert rs.phi_n4(a, b, D) == pytest.approx(rs.g_energy(r.t, a, b, 4, s=b * D), rel=1e-10)


@given(b=pos, D=pos, N=dims_hi)
def test_beta_agrees_with_g(b, D, N):
    (r,) = rs.h_roots(b * D, 0.0, N)
    assert rs.beta_degenerate(b, N, D) == pytest.approx(rs.g_energy(r.t, 0.0, b, N, s=b * D), rel=1e-10)


@given(a=a_pos, b=pos, D=pos)
def test_n2_energy_is_pohozaev_form(a, b, D):
    # b D / a tiny makes 1 - a t^2 cancel; the s form is exact there
    (r,) = rs.h_roots(b * D, a, 2)
    assert rs.g_energy(r.t, a, b, 2, s=b * D) == pytest.approx(a * D / 2 + b * D * D / 4, rel=1e-10)


@given(a=a_pos, b=st.floats(1e-3, 10.0), D=st.floats(1e-2, 1e2), N=dims_hi)
def test_threshold_duality(a, b, D, N):
    ta = rs.thresholds_a(b, N, D)
    assert rs.thresholds_b(ta.a_star, N, D).b_star == pytest.approx(b, rel=1e-10)
    assert rs.thresholds_b(ta.a_dstar, N, D).b_dstar == pytest.approx(b, rel=1e-10)
    tb = rs.thresholds_b(a, N, D)
    assert tb.b_dstar < tb.b_star
    assert rs.b_tilde(a, N, D) == pytest.approx(tb.b_dstar, rel=1e-14)


@given(a=a_pos, b=pos, D=pos, N=dims_hi)
def test_classification_matches_thresholds(a, b, D, N):
    th = rs.thresholds_b(a, N, D)
    assume(abs(b / th.b_star - 1) > 1e-9)
    cls = rs.classify_existence(a, b, N, D)
    expect = rs.ExistenceClass.TWO if b < th.b_star else rs.ExistenceClass.NO_BRANCH
    assert cls is expect


@given(a=a_pos, b=pos, D=pos, N=dims_hi)
def test_lower_energy_sign_matches_b_dstar(a, b, D, N):
    th = rs.thresholds_b(a, N, D)
    assume(b < th.b_star * (1 - 1e-9) and abs(b / th.b_dstar - 1) > 1e-6)
    lo, hi = rs.h_roots(b * D, a, N)
    assert (rs.g_energy(lo.t, a, b, N) < 0) == (b < th.b_dstar)
    assert rs.g_energy(hi.t, a, b, N) > 0
