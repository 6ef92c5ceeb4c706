import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from radsing.core import Params, RadialState, eikonal_profile, eikonal_u
from radsing.errors import EventNotBracketed, InvalidState, SeedRadiusTooLarge
from radsing.radial_solver import (
    Event,
    IntegratorConfig,
    TerminationKind,
    find_event,
    integrate,
    profile_to_json,
    read_profile_csv,
    regular_seed_radius,
    rhs_radial,
    seed_regular,
    write_profile_csv,
)


def test_rhs_examples():
    P = Params(2, 1.0, 3.0)
    assert rhs_radial(P, eikonal_profile(P, 1.0))[1] == pytest.approx(3.0, rel=1e-13)
    for N in (1, 3, 7):
        assert rhs_radial(Params(N, 2.0, 1.5), RadialState(1, 0, 0)) == (0.0, -1.0)


def test_seed_regular_small_r_slope():
    s = seed_regular(Params(1, 1.0, 3.0), 0.0, 1e-4)
    assert s.u == pytest.approx(-5e-9, rel=1e-6)
    assert s.p == pytest.approx(-1e-4, rel=1e-6)


def test_seed_regular_rejections():
    with pytest.raises(InvalidState):
        seed_regular(Params(3, 1.0, 3.0), 0.0, 0.0)
    with pytest.raises(SeedRadiusTooLarge):
        seed_regular(Params(3, 1.0, 3.0), 0.0, 0.5)


def test_seed_doubling_consistency():
    P = Params(3, 1.0, 3.0)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    a = integrate(P, seed_regular(P, 1.0, 1e-5), 2e-5, cfg).outer
    b = seed_regular(P, 1.0, 2e-5)
    assert abs(a.u - b.u) < 1e-9 and abs(a.p - b.p) < 1e-9


def test_exact_solution_N2():
    P = Params(2, 1.0, 3.0)
    pr = integrate(P, eikonal_profile(P, 1e-3), 10.0)
    assert pr.termination.kind is TerminationKind.REACHED_BOUND
    assert np.max(np.abs(pr.u - eikonal_u(P, pr.r))) <= 1e-6


def test_regular_outward_decays():
    P = Params(3, 1.0, 3.0)
    pr = integrate(P, seed_regular(P, 0.0, regular_seed_radius(P, 0.0)), 1e3)
    assert pr.termination.kind is TerminationKind.REACHED_BOUND
    assert np.all(pr.p < 0)
    assert pr.u[-1] < -10 and abs(pr.p[-1]) < 5e-3


def test_inward_no_blowup_subquadratic():
    P = Params(1, 1.0, 1.5)
    pr = integrate(P, RadialState(1.0, 0.0, 1.0), 1e-6)
    assert pr.termination.kind is TerminationKind.REACHED_BOUND
    assert pr.r[0] == pytest.approx(1e-6)


def test_blowup_detected_and_bracketed():
    # N = 1, q = 3, crossing speed above c*: the gradient blows up at r0 ~ 0.8675 going inward
    P = Params(1, 1.0, 3.0)
    start = RadialState(1.0, 0.0, -2.0)
    a = integrate(P, start, 1e-6, IntegratorConfig(blowup_threshold=1e6))
    b = integrate(P, start, 1e-6, IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, blowup_threshold=1e6))
    for pr in (a, b):
        assert pr.termination.kind is TerminationKind.BLOWUP_DETECTED
        assert abs(pr.inner.u) + abs(pr.inner.p) == pytest.approx(1e6, rel=0.05)
    assert a.termination.r == pytest.approx(b.termination.r, rel=1e-8)


def test_gradient_blowup_below_float_resolution_underflows():
    # |p| ~ (r - r0)^(-1/2) cannot reach 1e12 above the float spacing at r0
    P = Params(1, 1.0, 3.0)
    pr = integrate(P, RadialState(1.0, 0.0, -2.0), 1e-6)
    assert pr.termination.kind is TerminationKind.STEP_UNDERFLOW
    assert pr.termination.r == pytest.approx(0.8675, abs=1e-4)


def test_profile_monotone_and_finite():
    P = Params(3, 1.0, 1.5)
    pr = integrate(P, RadialState(1.0, 0.5, -0.2), 1e-4)
    assert pr.direction == "inward"
    assert np.all(np.diff(pr.r) > 0)
    assert np.all(np.isfinite(pr.u)) and np.all(np.isfinite(pr.p))


def test_find_event_zero_of_u():
    P = Params(1, 1.0, 3.0)
    r, st_ = find_event((P, seed_regular(P, 2.0, regular_seed_radius(P, 2.0)), 10.0),
                        Event("u=0", lambda r, u, p: u, direction=-1))
    assert r > 0 and abs(st_.u) < 1e-10


def test_find_event_not_bracketed():
    P = Params(3, 1.0, 3.0)
    pr = integrate(P, seed_regular(P, 0.0, 1e-4), 1.0)
    with pytest.raises(EventNotBracketed):
        find_event(pr, Event("u'=0", lambda r, u, p: p))


def test_find_event_energy_half():
    P = Params(3, 1.0, 3.0)
    pr = integrate(P, seed_regular(P, 0.0, 1e-4), 100.0)
    H = np.exp(pr.u) + pr.p**2 / 2
    assert np.sum(np.diff(np.sign(H - H[0] / 2)) != 0) == 1
    r, s = find_event(pr, Event("H", lambda r, u, p: math.exp(u) + p * p / 2 - H[0] / 2))
    assert math.exp(s.u) + s.p**2 / 2 == pytest.approx(H[0] / 2, rel=1e-8)


@given(u=st.floats(-2, 2), p=st.floats(-3, 3), q=st.sampled_from([1.3, 1.5, 2.5]), N=st.sampled_from([1, 2, 3, 5]))
def test_at_most_one_interior_maximum(u, p, q, N):
    P = Params(N, 1.0, q)
    pr = integrate(P, RadialState(1.0, u, p), 20.0)
    # sign changes of u' from + to - count maxima; only one is allowed
    s = np.sign(pr.p)
    s = s[s != 0]
    maxima = int(np.sum((s[:-1] > 0) & (s[1:] < 0)))
    assert maxima <= 1


@given(u0=st.floats(-2, 2), q=st.sampled_from([1.5, 3.0]), N=st.sampled_from([1, 3]))
def test_energy_nonincreasing(u0, q, N):
    P = Params(N, 1.0, q)
    pr = integrate(P, seed_regular(P, u0, regular_seed_radius(P, u0)), 50.0)
    H = np.exp(pr.u) + pr.p**2 / 2
    m = pr.p < 0
    dH = np.diff(H[m])
    assert np.all(dH <= 1e-9 * np.maximum(1.0, H[m][:-1]))


def test_residual_audit():
    P = Params(3, 1.0, 1.5)
    pr = integrate(P, seed_regular(P, 0.0, regular_seed_radius(P, 0.0)), 100.0)
    assert np.all(np.abs(pr.residuals) <= 1e-6 * (1 + np.exp(pr.u)))


@pytest.mark.parametrize("start,r_end", [(RadialState(1.0, 0.0, -1.0), 100.0), (RadialState(1.0, 0.3, 0.2), 1e-3)])
def test_tolerance_halving(start, r_end):
    P = Params(3, 1.0, 1.5)
    rel = 1e-10
    a = integrate(P, start, r_end, IntegratorConfig(rel_tol=rel, abs_tol=1e-12))
    b = integrate(P, start, r_end, IntegratorConfig(rel_tol=rel / 2, abs_tol=1e-12 / 2))
    sa, sb = (a.outer, b.outer) if r_end > 1 else (a.inner, b.inner)
    assert abs(sa.u - sb.u) < 50 * rel * max(1, abs(sa.u))
    assert abs(sa.p - sb.p) < 50 * rel * max(1, abs(sa.p))


def test_csv_roundtrip():
    P = Params(3, 1.0, 3.0)
    pr = integrate(P, seed_regular(P, 0.0, 1e-4), 1.0)
    buf = io.StringIO()
    text = write_profile_csv(pr, buf)
    assert text.splitlines()[0] == "r,u,du,residual"
    assert "\r" not in text
    rows = list(csv.DictReader(io.StringIO(text)))
    assert np.array_equal(np.array([float(r["u"]) for r in rows]), pr.u)
    d = profile_to_json(pr)
    assert d["termination"]["kind"] == "ReachedBound"


def test_read_profile_csv(tmp_path):
    P = Params(3, 1.0, 3.0)
    pr = integrate(P, seed_regular(P, 0.0, 1e-4), 1.0)
    path = tmp_path / "p.csv"
    write_profile_csv(pr, path)
    back = read_profile_csv(path, P)
    assert np.array_equal(back.r, pr.r) and np.array_equal(back.p, pr.p)


def test_integrate_rejects_bad_end():
    P = Params(3, 1.0, 3.0)
    with pytest.raises(InvalidState):
        integrate(P, RadialState(1.0, 0.0, 0.0), 1.0)
    with pytest.raises(InvalidState):
        integrate(P, RadialState(1.0, 0.0, 0.0), -1.0)


def test_config_validation():
    with pytest.raises(InvalidState):
        IntegratorConfig(rel_tol=0)
    with pytest.raises(InvalidState):
        IntegratorConfig(blowup_threshold=1.0)
