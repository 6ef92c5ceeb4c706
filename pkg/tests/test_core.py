import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from radsing.core import (
    EikonalPlane,
    EmdenPlane,
    LotkaVolterra,
    OneD,
    Params,
    RadialState,
    SystemTag,
    TripleTheta,
    TripleV,
    derive_constants,
    eikonal_profile,
    from_phase,
    residual,
    to_phase,
)
from radsing.errors import CriticalPoint, ExcludedExponent, InvalidParams, InvalidState

qs = st.floats(1.05, 4.0).filter(lambda q: abs(q - 2) > 1e-3)
Ns = st.integers(1, 12)
Ms = st.floats(0.1, 10.0)
states = st.builds(
    RadialState,
    st.floats(1e-3, 1e2),
    st.floats(-20, 20),
    st.floats(-50, 50).filter(lambda p: abs(p) > 1e-6),
)


@pytest.mark.parametrize("N,M,q", [(0, 1, 3), (3, 0, 3), (3, -1, 3), (3, 1, 1), (3, 1, 0.5), (2.5, 1, 3)])
def test_params_rejects_invalid(N, M, q):
    with pytest.raises(InvalidParams):
        Params(N, M, q)


def test_q2_excluded():
    with pytest.raises(ExcludedExponent):
        Params(3, 1.0, 2.0)


def test_xi_M_value():
    dc = derive_constants(Params(3, 1.0, 1.75))
    assert dc.xi_M == pytest.approx(3 * (2 / 3) ** (4 / 3), rel=1e-14)
    assert dc.xi_M == pytest.approx(1.7472, abs=1e-4)


def test_xi_M_absent_at_critical_exponent():
    dc = derive_constants(Params(3, 1.0, 1.5))
    assert dc.kappa == 0
    assert dc.xi_M is None


def test_lambda_and_emden_x():
    dc = derive_constants(Params(2, 1.0, 3.0))
    assert dc.Lambda == pytest.approx(math.log(27), rel=1e-15)
    assert dc.emden_x == 0


def test_absent_constants_are_none_not_nan():
    dc = derive_constants(Params(1, 1.0, 1.5))
    assert dc.q_c is None and dc.theta is None and dc.xi_M is None


def test_xi_M_grows_towards_two():
    vals = [derive_constants(Params(3, 1.0, q)).xi_M for q in (1.7, 1.8, 1.9)]
    assert vals[0] < vals[1] < vals[2]


@given(N=Ns, M=Ms, q=qs)
def test_constants_invariants(N, M, q):
    dc = derive_constants(Params(N, M, q))
    assert dc.Lambda == pytest.approx(math.log(M) + q * math.log(q), rel=1e-14, abs=1e-14)
    if N >= 2:
        assert (dc.kappa > 0) == (q > dc.q_c)
    if dc.xi_M is not None:
        assert dc.xi_M > 0


def test_to_phase_examples():
    P4 = Params(4, 1.0, 1.5)
    assert to_phase(RadialState(1, 0, -2), EmdenPlane, P4).as_array() == pytest.approx([1, 2])
    assert to_phase(RadialState(1, math.log(4), -2), EmdenPlane, P4).as_array() == pytest.approx([4, 2])
    with pytest.raises(CriticalPoint):
        to_phase(RadialState(1, 0, 0), LotkaVolterra, P4)


def test_from_phase_examples():
    P = Params(3, 1.0, 3.0)
    s = from_phase(EmdenPlane(1, 2), 0.0, P)
    assert (s.r, s.u, s.p) == pytest.approx((1, 0, -2))
    s = from_phase(EikonalPlane(27, 3), 0.0, P)
    assert (s.r, s.u, s.p) == pytest.approx((1, math.log(27), -3))


@pytest.mark.parametrize("tag", [t for t in SystemTag])
@given(state=states, N=Ns, q=qs)
def test_roundtrip(tag, state, N, q):
    P = Params(N, 1.0, q)
    if tag in (SystemTag.ZOF_U,):
        assume(state.p < 0)
    pt = to_phase(state, tag, P)
    back = from_phase(pt, state.t, P, u=state.u)
    assert back.r == pytest.approx(state.r, rel=1e-12)
    assert back.u == pytest.approx(state.u, rel=1e-12, abs=1e-12)
    assert back.p == pytest.approx(state.p, rel=1e-12, abs=1e-12)
    again = to_phase(back, tag, P).as_array()
    assert again == pytest.approx(pt.as_array(), rel=1e-12, abs=1e-300)


@given(state=states, q=qs)
def test_triple_v_relation(state, q):
    P = Params(3, 1.0, q)
    tv = to_phase(state, TripleV, P)
    assert tv.V == pytest.approx(math.exp((2 - q) * state.t) * abs(tv.Phi) ** (q - 1), rel=1e-12)


@given(state=states, q=qs)
def test_lotka_volterra_relations(state, q):
    P = Params(3, 1.0, q)
    lv = to_phase(state, LotkaVolterra, P)
    x = to_phase(state, EmdenPlane, P).x
    X = to_phase(state, EikonalPlane, P).X
    assert lv.Z * lv.Phi == pytest.approx(x, rel=1e-12)
    # X = Z |Phi|^(q-1) Phi / V
    assert lv.Z * abs(lv.Phi) ** (q - 1) * lv.Phi / lv.V == pytest.approx(X, rel=1e-11)


def test_phase_point_invariants():
    with pytest.raises(InvalidState):
        EmdenPlane(-1.0, 2.0)
    with pytest.raises(InvalidState):
        TripleTheta(1.0, 2.0, -1.0)
    with pytest.raises(InvalidState):
        OneD(math.nan, 0.0)


def test_radial_state_invariants():
    with pytest.raises(InvalidState):
        RadialState(0.0, 0.0, 0.0)
    with pytest.raises(InvalidState):
        RadialState(1.0, math.inf, 0.0)


def test_eikonal_profile_exact_for_N2():
    P = Params(2, 1.0, 3.0)
    s = eikonal_profile(P, 1.0)
    assert (s.u, s.p) == pytest.approx((math.log(27), -3))
    assert abs(residual(P, s, 3.0)) < 1e-12


@given(r=st.floats(1e-3, 10.0))
def test_eikonal_supersolution_N4(r):
    P = Params(4, 1.0, 3.0)
    s = eikonal_profile(P, r)
    res = residual(P, s, 3 / r**2)
    assert res == pytest.approx(6 / r**2, rel=1e-9)


@given(N=Ns, M=Ms, q=qs, r=st.floats(1e-3, 1e2))
def test_eikonal_relation(N, M, q, r):
    P = Params(N, M, q)
    s = eikonal_profile(P, r)
    assert M * abs(s.p) ** q == pytest.approx(math.exp(s.u), rel=1e-12)


def test_params_roundtrip_dict():
    P = Params(5, 2.5, 1.3)
    assert Params.from_dict(P.to_dict()) == P
    assert np.isfinite(list(derive_constants(P).to_dict().values())[1])
