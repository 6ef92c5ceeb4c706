import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from radsing.core import (
    AppendixVarpi,
    EmdenPlane,
    LotkaVolterra,
    Params,
    RadialState,
    SystemTag,
    TripleTheta,
    to_phase,
)
from radsing.errors import ComplexEigenvalueSelected, InvalidState, NotAFixedPoint, WrongTag
from radsing.phase_systems import (
    Stability,
    emden_char_poly,
    equilibria,
    jacobian,
    linearize,
    lv_p0,
    manifold_seed,
    numerical_jacobian,
    rhs,
    rhs_array,
)
from radsing.radial_solver import rhs_radial


def _emden(N, q, M=1.0):
    return next(e for e in equilibria(SystemTag.TRIPLE_THETA, Params(N, M, q)) if e.name == "Emden")


def test_triple_theta_fixed_point():
    P = Params(4, 1.0, 1.5)
    assert np.all(rhs(SystemTag.TRIPLE_THETA, TripleTheta(4.0, 2.0, 0.0), 0.0, P) == 0)


def test_lv_n0_fixed_point():
    P = Params(5, 1.0, 3.0)
    assert np.all(rhs(SystemTag.LOTKA_VOLTERRA, LotkaVolterra(5.0, 0.0, 0.0), 0.0, P, s=1) == 0)


def test_wrong_tag():
    with pytest.raises(WrongTag):
        rhs(SystemTag.TRIPLE_THETA, EmdenPlane(1.0, 1.0), 0.0, Params(3))


# chain-rule oracle: d/dt of to_phase along a trajectory equals rhs at the image
_T_TAGS = [SystemTag.NON_AUT_X, SystemTag.NON_AUT_XQ, SystemTag.TRIPLE_V, SystemTag.TRIPLE_XV,
           SystemTag.TRIPLE_THETA, SystemTag.LOTKA_VOLTERRA, SystemTag.HJ]


def _flow_derivative(tag, state, P, h=1e-6):
    """Central difference of to_phase along the flow, per unit of the system's variable."""
    du, dp = rhs_radial(P, state)
    if tag.variable == "t":
        scale = state.r
    elif tag.variable == "r":
        scale = 1.0
    else:  # parametrised by u
        scale = 1.0 / state.p

    def img(eps):
        s = RadialState(state.r + eps * scale, state.u + eps * scale * du, state.p + eps * scale * dp)
        return to_phase(s, tag, P).as_array()

    return (img(h) - img(-h)) / (2 * h)


def _indep(tag, state):
    return {"t": state.t, "r": state.r, "u": state.u}[tag.variable]


@pytest.mark.parametrize("tag", _T_TAGS)
def test_rhs_matches_chain_rule(tag):
    rng = np.random.default_rng(7)
    q = 1.75 if tag is SystemTag.HJ else 1.6
    P = Params(3, 1.0, q)
    for _ in range(20):
        r = float(np.exp(rng.uniform(-1, 0.5)))
        s = RadialState(r, rng.uniform(-1, 1), -rng.uniform(0.2, 2))
        fd = _flow_derivative(tag, s, P)
        ex = rhs(tag, to_phase(s, tag, P), _indep(tag, s), P)
        assert np.allclose(fd, ex, rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("tag,N,q", [(SystemTag.ONE_D, 1, 3.0), (SystemTag.ZOF_U, 1, 2.5),
                                     (SystemTag.APPENDIX_VARPI, 3, 3.0), (SystemTag.APPENDIX_VARPI, 1, 4.0)])
def test_rhs_matches_chain_rule_r_and_u(tag, N, q):
    rng = np.random.default_rng(8)
    P = Params(N, 1.0, q)
    for _ in range(20):
        s = RadialState(float(np.exp(rng.uniform(-1, 0.5))), rng.uniform(-1, 1), -rng.uniform(0.2, 2))
        fd = _flow_derivative(tag, s, P)
        ex = rhs(tag, to_phase(s, tag, P), _indep(tag, s), P)
        assert np.allclose(fd, ex, rtol=1e-6, atol=1e-6)


def test_triple_theta_eigenvalues_N10():
    rep = _emden(10, 3.0)
    assert sorted(rep.eigenvalues.real) == pytest.approx([-4, -4, -1], abs=1e-7)
    assert np.max(np.abs(rep.eigenvalues.imag)) < 1e-7


def test_triple_theta_complex_pair_N4():
    rep = _emden(4, 1.5)
    ev = rep.eigenvalues
    assert ev[0] == pytest.approx(0.5)
    assert ev[1].real == pytest.approx(-1) and ev[2].real == pytest.approx(-1)
    assert abs(ev[1].imag) > 0


def test_emden_jacobian_rows():
    for N, q, M in [(3, 1.5, 1.0), (6, 1.2, 2.0), (4, 3.0, 0.5)]:
        J = _emden(N, q, M).jacobian
        assert np.allclose(J, [[0, -2 * (N - 2), 0], [1, 2 - N, -(2**q) * M], [0, 0, 2 - q]], atol=1e-14)


def test_char_poly_identity():
    rng = np.random.default_rng(3)
    for _ in range(10):
        N = int(rng.integers(3, 15))
        q = float(rng.choice([rng.uniform(1.05, 1.95), rng.uniform(2.05, 4.0)]))
        J = _emden(N, q).jacobian
        # det(J - l I) = (-1)^3 det(l I - J)
        assert np.allclose(-np.poly(J), emden_char_poly(N, q), atol=1e-12)


def test_lv_p0_value():
    V0, s = lv_p0(Params(3, 1.0, 3.0))
    assert V0 == pytest.approx(1.5) and s == -1


@pytest.mark.parametrize("N,q", [(2, 3.0), (3, 3.0), (4, 2.5), (7, 4.0)])
def test_lv_p0_eigenvalues(N, q):
    rep = next(e for e in equilibria(SystemTag.LOTKA_VOLTERRA, Params(N, 1.0, q)) if e.name == "P0")
    expect = sorted([q / (q - 1), (N - 1) * q - N, (q - 2) / (q - 1)])
    assert sorted(rep.eigenvalues.real) == pytest.approx(expect, abs=1e-12)
    assert rep.classification is Stability.SOURCE


@pytest.mark.parametrize("tag", [t for t in SystemTag])
@pytest.mark.parametrize("N,q", [(3, 1.5), (3, 1.75), (4, 3.0), (2, 3.0), (10, 3.0)])
def test_equilibrium_report_invariants(tag, N, q):
    for rep in equilibria(tag, Params(N, 1.0, q)):
        assert rep.residual < 1e-12
        assert np.all(rep.char_poly_residuals() <= 1e-10)
        assert np.allclose(np.linalg.norm(rep.eigenvectors, axis=0), 1.0)
        d = rep.to_dict()
        assert len(d["eigenvalues"]) == rep.jacobian.shape[0]


def test_lv_q0_recorded_residual():
    rep = next(e for e in equilibria(SystemTag.LOTKA_VOLTERRA, Params(3, 1.0, 3.0)) if e.name == "Q0")
    assert rep.residual == 0.0


_POINTS = {
    SystemTag.EMDEN_PLANE: ([0.7, 1.3], {}),
    SystemTag.NON_AUT_X: ([0.7, 1.3], {}),
    SystemTag.NON_AUT_XQ: ([0.7, 1.3], {}),
    SystemTag.TRIPLE_V: ([0.7, 1.3, 0.4], {}),
    SystemTag.TRIPLE_XV: ([0.7, 1.3, 0.4], {}),
    SystemTag.TRIPLE_THETA: ([0.7, 1.3, 0.4], {}),
    SystemTag.LOTKA_VOLTERRA: ([0.7, 0.4, 1.3], {}),
    SystemTag.HJ: ([0.7, 0.3], {}),
    SystemTag.ONE_D: ([0.2, 0.9], {}),
    SystemTag.ZOF_U: ([0.8, 0.5], {"t": 0.3}),
    SystemTag.APPENDIX_VARPI: ([1.1, 0.5], {"t": 0.3}),
}


@pytest.mark.parametrize("tag", list(_POINTS))
def test_analytic_jacobian_matches_differences(tag):
    y, kw = _POINTS[tag]
    P = Params(3, 1.0, 1.75)
    Ja = jacobian(tag, y, P, **kw)
    Jn = numerical_jacobian(tag, y, P, **kw)
    assert np.allclose(Ja, Jn, rtol=1e-6, atol=1e-6)


def test_linearize_and_not_fixed():
    P = Params(4, 1.0, 1.5)
    rep = linearize(SystemTag.TRIPLE_THETA, P, TripleTheta(4.0, 2.0, 0.0))
    assert np.allclose(rep.jacobian, _emden(4, 1.5).jacobian)
    with pytest.raises(NotAFixedPoint):
        linearize(SystemTag.TRIPLE_THETA, P, TripleTheta(1.0, 1.0, 0.0))
    with pytest.raises(WrongTag):
        linearize(SystemTag.TRIPLE_THETA, P, EmdenPlane(4.0, 2.0))


def test_manifold_seed_omega1_direction():
    N, q, M = 3, 1.5, 1.0
    rep = _emden(N, q, M)
    i = int(np.argmin(np.abs(rep.eigenvalues - (2 - q))))
    f = q * q - (N + 2) * q + 4 * (N - 1)
    assert f == pytest.approx(2.75)
    seed = manifold_seed(rep, i, 1e-5)
    d = seed.as_array() - rep.location.as_array()
    # eigenvector of 2-q: (2(N-2), q-2, f(q) / (2^q M)), oriented with Theta > 0
    w = np.array([2 * (N - 2), q - 2, f / (2**q * M)])
    assert d[2] > 0
    assert np.allclose(d / np.linalg.norm(d), w / np.linalg.norm(w), atol=1e-12)


def test_manifold_seed_zero_amplitude_and_errors():
    rep = _emden(4, 1.5)
    assert np.array_equal(manifold_seed(rep, 0, 0.0).as_array(), rep.location.as_array())
    with pytest.raises(ComplexEigenvalueSelected):
        manifold_seed(rep, 1, 1e-6)
    with pytest.raises(InvalidState):
        manifold_seed(rep, 0, 1.0)


def test_manifold_seed_origin_theta_direction():
    rep = next(e for e in equilibria(SystemTag.TRIPLE_THETA, Params(3, 1.0, 1.5)) if e.name == "O")
    i = int(np.argmin(np.abs(rep.eigenvalues - 0.5)))
    s = manifold_seed(rep, i, 1e-5)
    assert s.x == 0 and s.Phi == 0 and s.Theta == pytest.approx(1e-5)


def test_flow_equivalence_theta_vs_nonautonomous():
    P = Params(3, 1.0, 1.5)
    x0, phi0, t0 = 1.2, 1.7, -1.0

    def f3(t, y):
        return rhs_array(SystemTag.TRIPLE_THETA, y, t, P)

    def f2(t, y):
        return rhs_array(SystemTag.NON_AUT_X, y, t, P)

    ts = np.linspace(t0, 1.0, 30)
    a = solve_ivp(f3, (t0, 1.0), [x0, phi0, math.exp((2 - P.q) * t0)], t_eval=ts, rtol=1e-12, atol=1e-14)
    b = solve_ivp(f2, (t0, 1.0), [x0, phi0], t_eval=ts, rtol=1e-12, atol=1e-14)
    assert np.max(np.abs(a.y[:2] - b.y)) < 1e-8


def test_lotka_volterra_is_quadratic():
    rng = np.random.default_rng(11)
    P = Params(4, 1.3, 2.5)
    pts = rng.uniform(0.1, 2.0, (50, 3))
    vals = np.array([rhs_array(SystemTag.LOTKA_VOLTERRA, y, 0.0, P, s=1) for y in pts])
    Z, V, F = pts.T
    basis = np.vstack([np.ones(50), Z, V, F, Z * Z, V * V, F * F, Z * V, Z * F, V * F]).T
    coef, *_ = np.linalg.lstsq(basis, vals, rcond=None)
    assert np.max(np.abs(basis @ coef - vals)) < 1e-12


@given(N=st.integers(1, 8), q=st.floats(2.1, 5.0), u=st.floats(-3, 3))
def test_appendix_system_at_eikonal_state(N, q, u):
    P = Params(N, 1.0, q)
    r = q * math.exp(-u / q)
    d = rhs(SystemTag.APPENDIX_VARPI, AppendixVarpi(1.0, r), u, P)
    assert d[0] == pytest.approx((N - 2) / q, abs=1e-12)
