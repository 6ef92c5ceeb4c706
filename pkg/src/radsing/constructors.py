"""Constructions of singular solutions.

One routine per existence mechanism:

* ``construct_emden_singular``  -- unstable manifold of the Emden point of the
  (x, Phi, Theta) system, 1 < q < 2, N >= 3.
* ``construct_hj_subcritical``  -- backward integration of the perturbed
  Hamilton-Jacobi system around (xi_M, beta xi_M), q_c < q < 2.
* ``construct_dirac``           -- Picard iteration of the integral operator K
  in weighted norms, 1 < q < q_c, N >= 3.
* ``shoot_eikonal_1d``          -- bisection on the crossing datum c, N = 1, q > 2.
* ``shoot_eikonal_nd``          -- limit of regular solutions u_n(0) = n, N >= 2, q > 2.
* ``construct_gradient_singular`` -- bounded solutions with |u'| ~ r^(-1/(q-1)), q > 2.

Every routine returns a :class:`~radsing.radial_solver.Profile` whose
``meta["provenance"]`` holds a JSON-ready record of seeds, brackets and
iteration counts.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .core import Params, RadialState, SystemTag, derive_constants, eikonal_profile, eikonal_u, power_abs
from .errors import (
    AsymptoteMiss,
    BracketNotFound,
    ContractionFailure,
    DriftDetected,
    InvalidState,
    NoConvergence,
    SeedEscaped,
    WindowViolation,
)
from .phase_systems import equilibria, lv_p0, manifold_seed, rhs_array
from .radial_solver import (
    Event,
    IntegratorConfig,
    Profile,
    Termination,
    TerminationKind,
    find_event,
    integrate,
    regular_seed_radius,
    seed_regular,
)

__all__ = [
    "ShootingRecord",
    "PicardState",
    "construct_emden_singular",
    "construct_hj_subcritical",
    "hj_lyapunov",
    "construct_dirac",
    "dirac_window",
    "classify_crossing",
    "shoot_eikonal_1d",
    "shoot_eikonal_nd",
    "construct_gradient_singular",
    "STIFF_CONFIG",
]

# configuration for runs through the stiff eikonal region
STIFF_CONFIG = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, method="LSODA", blowup_threshold=1e300)

_PHASE_TOL = dict(rtol=1e-12, atol=1e-14)


@dataclass
class ShootingRecord:
    """Append-only log of a shooting or limit construction."""

    trials: list = field(default_factory=list)
    bracket: tuple | None = None
    iterations: int = 0

    def add(self, value: float, crossing: dict, outcome: str):
        self.trials.append({"value": float(value), "crossing": crossing, "outcome": outcome})

    def to_dict(self) -> dict:
        return {"trials": self.trials, "bracket": None if self.bracket is None else list(self.bracket),
                "iterations": self.iterations}


@dataclass
class PicardState:
    """Diagnostics of one Picard step on the weighted grid."""

    iteration: int
    N1: float
    N2: float
    diff: float
    ratio: float
    sigma: float = 0.75

    def to_dict(self) -> dict:
        return asdict(self)


class _MappedDense:
    """Dense output of a phase-space solution mapped to (u, w = r u') in t = ln r."""

    log = True

    def __init__(self, sol, fmap):
        self.sol = sol
        self.fmap = fmap

    def many(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.vstack(self.fmap(t, self.sol(t)))

    def __call__(self, t):
        return self.many(t)[:, 0]


def _phase_profile(params, sol, fmap, direction, termination, meta) -> Profile:
    t = sol.t
    u, w = fmap(t, sol.y)
    order = np.argsort(t)
    t, u, w = t[order], u[order], w[order]
    r = np.exp(t)
    return Profile(params, r, u, w / r, direction, termination, dense=_MappedDense(sol.sol, fmap), meta=meta)


# ---------------------------------------------------------------------------
# Emden-type, 1 < q < 2

def construct_emden_singular(params: Params, r_window=(1e-6, 1e-2), amplitude: float | None = None) -> Profile:
    """Emden-type singular solution, r^2 e^u -> 2(N-2) at 0.

    The trajectory leaves (2(N-2), 2, 0) along the eigenvector of 2-q, the only
    unstable direction of the (x, Phi, Theta) system.  Since Theta = r^(2-q),
    the seed's Theta fixes the radius at which the construction starts.

    Parameters
    ----------
    r_window : (r_min, r_max)
        The profile covers at least this range.
    amplitude : float, optional
        Seed distance from the equilibrium; by default small enough that the
        seed radius lies e^2 below r_min.
    """
    N, q = params.N, params.q
    if not (1 < q < 2 and N >= 3):
        raise WindowViolation("Emden-type construction needs 1 < q < 2 and N >= 3")
    r_min, r_max = map(float, r_window)
    if not 0 < r_min < r_max:
        raise InvalidState("r_window must satisfy 0 < r_min < r_max")
    rep = next(e for e in equilibria(SystemTag.TRIPLE_THETA, params) if e.name == "Emden")
    idx = int(np.argmin(np.abs(rep.eigenvalues - (2 - q))))
    vec = rep.eigenvectors[:, idx].real
    vth = abs(vec[2])
    loc = rep.location.as_array()
    a_max = 1e-4 * (1 + np.linalg.norm(loc))
    t_match = math.log(r_min) - 2.0
    if amplitude is None:
        amplitude = min(a_max, math.exp((2 - q) * t_match) / vth)
    seed = manifold_seed(rep, idx, amplitude)
    y0 = seed.as_array()
    t0 = math.log(y0[2]) / (2 - q)
    if t0 >= math.log(r_min):
        raise InvalidState(f"seed amplitude {amplitude:.3g} starts the trajectory at r={math.exp(t0):.3g} > r_min")

    def f(t, y):
        return rhs_array(SystemTag.TRIPLE_THETA, y, t, params)

    sol = solve_ivp(f, (t0, math.log(r_max)), y0, method="DOP853", dense_output=True, max_step=0.1, **_PHASE_TOL)
    if sol.status != 0 or np.any(sol.y[0] <= 0):
        raise SeedEscaped(f"integration failed: {sol.message}")
    guard = 0.05 * (1 + np.linalg.norm(loc))
    inner = sol.t <= math.log(r_min)
    dev = np.max(np.linalg.norm(sol.y[:2, inner] - loc[:2, None], axis=0)) if inner.any() else 0.0
    if dev > guard:
        raise SeedEscaped(f"trajectory left the guard ball (deviation {dev:.3g} > {guard:.3g}) before r_min")

    def fmap(t, y):
        return np.log(y[0]) - 2 * t, -y[1]

    meta = {"provenance": {
        "construction": "emden", "params": params.to_dict(), "r_window": [r_min, r_max],
        "equilibrium": loc.tolist(), "eigenvalue": float(rep.eigenvalues[idx].real),
        "eigenvector": vec.tolist(), "amplitude": float(amplitude), "t_seed": t0,
        "seed": y0.tolist(), "guard_deviation": float(dev), "rhs_evaluations": int(sol.nfev),
    }}
    return _phase_profile(params, sol, fmap, "outward",
                          Termination(TerminationKind.REACHED_BOUND, r_max), meta)


# ---------------------------------------------------------------------------
# Hamilton-Jacobi type, q_c < q < 2

def hj_lyapunov(params: Params, xi, eta) -> np.ndarray:
    """theta_bar xi_bar^2 + eta_bar^2 about (xi_M, beta xi_M), theta_bar = 2 beta (q-1) kappa."""
    dc = derive_constants(params)
    th = 2 * dc.beta * (params.q - 1) * dc.kappa
    xb = np.asarray(xi) - dc.xi_M
    eb = np.asarray(eta) - dc.beta * dc.xi_M
    return th * xb**2 + eb**2


def construct_hj_subcritical(params: Params, data=(0.0, 0.0), t0: float = -3.0, span: float = 15.0,
                             c_bound: float | None = None) -> Profile:
    """Singular solution with r^beta u -> -xi_M at 0.

    Integrates the (xi, eta) system backward from
    (xi_M + xi_bar0, beta xi_M + eta_bar0) at t0 to t0 - span.

    Parameters
    ----------
    data : (xi_bar0, eta_bar0)
        Perturbation, |xi_bar0| <= xi_M/4 and |eta_bar0| <= min(beta xi_M/4, c_bound).
    c_bound : float, optional
        Smallness constant for eta_bar0; defaults to beta xi_M/4.
    """
    dc = derive_constants(params)
    if dc.xi_M is None:
        raise WindowViolation("HJ-type construction needs q_c < q < 2")
    xi_M, beta = dc.xi_M, dc.beta
    eta_M = beta * xi_M
    c = eta_M / 4 if c_bound is None else float(c_bound)
    xb0, eb0 = map(float, data)
    if abs(xb0) > xi_M / 4 * (1 + 1e-12) or abs(eb0) > min(eta_M / 4, c) * (1 + 1e-12):
        raise WindowViolation(f"data {data} outside the box |xi| <= {xi_M / 4:.6g}, "
                              f"|eta| <= {min(eta_M / 4, c):.6g}")

    def f(t, y):
        return rhs_array(SystemTag.HJ, y, t, params)

    y0 = np.array([xi_M + xb0, eta_M + eb0])
    sol = solve_ivp(f, (t0, t0 - span), y0, method="DOP853", dense_output=True, max_step=0.1, **_PHASE_TOL)
    if sol.status != 0:
        raise DriftDetected(f"integration failed: {sol.message}")
    L = hj_lyapunov(params, sol.y[0], sol.y[1])
    # the forcing term at t0 sets the floor the perturbation can be pushed to
    f0 = abs(rhs_array(SystemTag.HJ, y0, t0, params)[1] - rhs_array(SystemTag.HJ, y0, t0, params, frozen=True)[1])
    if np.max(np.abs(sol.y[0] - xi_M)) > xi_M / 2 or L[-1] > L[0] * (1 + 1e-6) + 10 * f0**2:
        raise DriftDetected("perturbation does not contract toward (xi_M, beta xi_M) backward in t")

    def fmap(t, y):
        e = np.exp(-beta * t)
        return -e * y[0], e * y[1]

    meta = {"provenance": {
        "construction": "hj", "params": params.to_dict(), "data": [xb0, eb0], "t0": t0, "span": span,
        "c_bound": c, "xi_M": xi_M, "lyapunov_start": float(L[0]), "lyapunov_end": float(L[-1]),
        "rhs_evaluations": int(sol.nfev),
    }}
    return _phase_profile(params, sol, fmap, "inward",
                          Termination(TerminationKind.REACHED_BOUND, math.exp(t0 - span)), meta)


# ---------------------------------------------------------------------------
# Dirac type, 1 < q < q_c

def _cumint_left(tau, g):
    """int_{tau[0]}^{tau} g, spline quadrature."""
    return CubicSpline(tau, g).antiderivative()(tau)


def _cumint_right(tau, g):
    """int_tau^{tau[-1]} g, spline quadrature."""
    x = -tau[::-1]
    return CubicSpline(x, g[::-1]).antiderivative()(x)[::-1]


def _dirac_operator(params, gamma, tau, Ut, Vt):
    """K in weighted variables U~ = r^(N-2) U, V~ = r^(N-1) V on the grid tau = ln r."""
    N, M, q = params.N, params.M, params.q
    r = np.exp(tau)
    a = N - (N - 1) * q
    # K1: U = -int_r^rho V ds
    U_new = -r ** (N - 2) * _cumint_right(tau, Vt * np.exp((2 - N) * tau))
    # K2 with the integral from 0: spline part plus the analytic tail on (0, r_min)
    absU = np.abs(Ut) / r ** (N - 2)
    h = M * power_abs(Vt, q) * np.exp(a * tau) - np.exp(-absU + N * tau)
    tail = M * power_abs(Vt[0], q) * r[0] ** a / a - math.exp(-absU[0]) * r[0] ** N / N
    V_new = (N - 2) * gamma - (tail + _cumint_left(tau, h))
    return U_new, V_new


def _run_picard(params, gamma, rho, nodes, r_min_factor, sigma, tol, max_iter, fail_ratio=0.98):
    tau = np.linspace(math.log(rho * r_min_factor), math.log(rho), nodes)
    Ut = np.zeros(nodes)
    Vt = np.zeros(nodes)
    hist: list[PicardState] = []
    prev = None
    streak = 0
    for k in range(1, max_iter + 1):
        U1, V1 = _dirac_operator(params, gamma, tau, Ut, Vt)
        d = max(sigma * np.max(np.abs(U1 - Ut)), np.max(np.abs(V1 - Vt)))
        ratio = d / prev if prev else float("nan")
        hist.append(PicardState(k, float(np.max(np.abs(U1))), float(np.max(np.abs(V1))), float(d), float(ratio), sigma))
        if not (np.all(np.isfinite(U1)) and np.all(np.isfinite(V1))):
            raise ContractionFailure("Picard iterate is not finite")
        Ut, Vt = U1, V1
        streak = streak + 1 if prev and ratio > fail_ratio else 0
        if streak >= 10:
            raise ContractionFailure(f"difference ratio above {fail_ratio} for 10 iterations")
        if d < tol:
            break
        prev = d
    else:
        raise ContractionFailure(f"no convergence in {max_iter} iterations (last difference {d:.3g})")
    return tau, Ut, Vt, hist


def construct_dirac(params: Params, gamma: float, rho: float, nodes: int = 2000, r_min_factor: float = 1e-5,
                    sigma: float = 0.75, tol: float = 1e-12, max_iter: int = 500) -> Profile:
    """Dirac-type solution with r^(N-2) u -> gamma < 0 and u(rho) = 0.

    Fixed point of K(U, V) = (-int_r^rho V, (N-2) gamma r^(1-N) - r^(1-N) int_0^r (M|V|^q - e^(-|U|)) s^(N-1) ds)
    for U = -u, V = U', iterated from W = 0 on a logarithmic grid
    [rho * r_min_factor, rho].  ``meta["picard"]`` lists the iteration history.
    """
    N, q = params.N, params.q
    dc = derive_constants(params)
    if not (N >= 3 and 1 < q < dc.q_c):
        raise WindowViolation("Dirac-type construction needs N >= 3 and 1 < q < N/(N-1)")
    if not gamma < 0:
        raise WindowViolation("gamma must be negative")
    if not (0 < rho and nodes >= 200 and 0 < r_min_factor < 1):
        raise InvalidState("need rho > 0, nodes >= 200, 0 < r_min_factor < 1")
    tau, Ut, Vt, hist = _run_picard(params, gamma, rho, nodes, r_min_factor, sigma, tol, max_iter)
    r = np.exp(tau)
    u = -Ut / r ** (N - 2)
    u[-1] = 0.0
    p = -Vt / r ** (N - 1)
    ratios = [h.ratio for h in hist[1:] if np.isfinite(h.ratio)]
    meta = {
        "picard": [h.to_dict() for h in hist],
        "provenance": {
            "construction": "dirac", "params": params.to_dict(), "gamma": gamma, "rho": rho, "nodes": nodes,
            "r_min": float(r[0]), "sigma": sigma, "iterations": len(hist),
            "max_ratio": max(ratios) if ratios else None, "final_difference": hist[-1].diff,
        },
    }
    return Profile(params, r, u, p, "inward", Termination(TerminationKind.REACHED_BOUND, float(r[0])), meta=meta)


def dirac_window(params: Params, gamma: float = -0.1, rho: float = 0.5, target: float = 0.9,
                 probe_iter: int = 25, max_halvings: int = 30) -> tuple[float, float]:
    """(rho0, k0) by halving (rho, |gamma|) until the measured contraction ratio is below ``target``."""
    for _ in range(max_halvings):
        try:
            _, _, _, hist = _run_picard(params, gamma, rho, 400, 1e-5, 0.75, 1e-13, probe_iter, fail_ratio=np.inf)
            worst = max((h.ratio for h in hist[2:] if np.isfinite(h.ratio)), default=0.0)
            if worst < target:
                return rho, abs(gamma)
        except ContractionFailure:
            pass
        rho, gamma = rho / 2, gamma / 2
    raise ContractionFailure("no contraction window found")


# ---------------------------------------------------------------------------
# eikonal type, q > 2

def classify_crossing(params: Params, c: float, u_threshold: float = 50.0, v_cap: float = 1e8) -> tuple[str, dict]:
    """Follow the N = 1 trajectory through (u, v) = (0, c) backward in r.

    Along it dv/du = (M v^q - e^u)/v.  Entering {M v^q < e^u} leads to v = 0
    (a regular solution); reaching u_threshold or v_cap does not.
    """
    M, q = params.M, params.q
    if M * c**q < 1.0:
        return "regular", {"u_end": 0.0, "v_end": float(c)}

    def f(u, y):
        v = y[0]
        return [(M * v**q - math.exp(u)) / v]

    def below(u, y):
        return M * y[0] ** q - math.exp(u)

    below.terminal, below.direction = True, -1

    def big(u, y):
        return y[0] - v_cap

    big.terminal = True
    sol = solve_ivp(f, (0.0, u_threshold), [c], method="DOP853", rtol=1e-13, atol=1e-14, events=[below, big])
    data = {"u_end": float(sol.t[-1]), "v_end": float(sol.y[0, -1])}
    if sol.t_events[0].size:
        return "regular", data
    return "singular", data


def shoot_eikonal_1d(params: Params, c_tolerance: float = 1e-10, r_seed: float = 1e-9,
                     r_max: float = 5.0) -> tuple[float, Profile]:
    """c* = sup Reg for N = 1 and the eikonal-type singular solution.

    c* is bracketed by bisection on the crossing datum c = -u' at u = 0.  The
    returned profile is integrated forward from the eikonal data at ``r_seed``
    (the backward trajectory through (0, c*) is only resolvable for moderate
    u); its own crossing of u = 0 is recorded and matches c*.
    """
    N, M, q = params.N, params.M, params.q
    if N != 1 or not q > 2:
        raise WindowViolation("1-d shooting needs N = 1 and q > 2")
    rec = ShootingRecord()
    K = max((2 / M) ** (1 / q), (q * M / 2) ** (1 / (q - 2)))
    lo = 0.5 * M ** (-1 / q)
    out, data = classify_crossing(params, lo)
    rec.add(lo, data, out)
    if out != "regular":
        raise BracketNotFound(f"c={lo:.6g} below the curve M v^q = 1 was not classified regular")
    hi = K * (1 + 1e-6)
    while True:
        out, data = classify_crossing(params, hi)
        rec.add(hi, data, out)
        if out == "singular":
            break
        lo = hi
        hi *= 1.5
        if hi > 10 * K:
            raise BracketNotFound(f"no singular crossing below 10 K = {10 * K:.6g}")
    while hi - lo > c_tolerance:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        out, data = classify_crossing(params, mid)
        rec.add(mid, data, out)
        rec.iterations += 1
        if out == "regular":
            lo = mid
        else:
            hi = mid
    rec.bracket = (lo, hi)
    c_star = 0.5 * (lo + hi)
    prof = integrate(params, eikonal_profile(params, r_seed), r_max, STIFF_CONFIG)
    r0, st = find_event(prof, Event("u=0", lambda r, u, p: u))
    meta = dict(prof.meta)
    meta["shooting"] = rec.to_dict()
    meta["provenance"] = {
        "construction": "eikonal-1d", "params": params.to_dict(), "c_star": c_star, "bracket": [lo, hi],
        "c_tolerance": c_tolerance, "K_bound": K, "bisection_steps": rec.iterations, "r_seed": r_seed,
        "profile_crossing": {"r": r0, "c": -st.p}, "crossing_mismatch": abs(-st.p - c_star),
    }
    prof.meta = meta
    return c_star, prof


def _regular_run(params: Params, u0: float, r_end: float) -> Profile:
    start = seed_regular(params, u0, regular_seed_radius(params, u0))
    return integrate(params, start, r_end, STIFF_CONFIG.replace(method="Radau"))


def shoot_eikonal_nd(params: Params, r_min: float = 1e-4, r_max: float = 1.0, tol: float = 1e-8,
                     n_step: float = 10.0, n_max: float = 400.0, grid: int = 400) -> Profile:
    """Eikonal-type singular solution for N >= 2 as the limit of regular solutions.

    Regular solutions with u(0) = n increase with n; their sup-norm gaps on
    [r_min, r_max] shrink geometrically (about e^(-n_step/3) per step).  The
    last member is returned once the gap is below ``tol``.
    """
    N, M, q = params.N, params.M, params.q
    if N < 2 or not q > 2:
        raise WindowViolation("limit-of-regulars construction needs N >= 2 and q > 2")
    rg = np.geomspace(r_min, r_max, grid)
    rec = ShootingRecord()
    n = math.ceil(float(eikonal_u(params, r_min))) + 5.0
    prev = None
    gaps: list[float] = []
    while True:
        prof = _regular_run(params, n, r_max)
        if prof.termination.kind is not TerminationKind.REACHED_BOUND:
            raise NoConvergence(f"regular solution u0={n} ended with {prof.termination.kind.value}")
        u = prof.dense_many(rg)[0]
        gap = float(np.max(np.abs(u - prev))) if prev is not None else float("nan")
        rec.add(n, {"gap": gap, "steps": prof.meta.get("steps")}, "regular")
        rec.iterations += 1
        if prev is not None:
            gaps.append(gap)
            if gap < tol:
                break
            if len(gaps) >= 5 and not all(b < a for a, b in zip(gaps[-5:], gaps[-4:])):
                raise NoConvergence(f"gaps not decreasing: {gaps[-5:]}")
        if n + n_step > n_max:
            raise NoConvergence(f"gap {gap:.3g} above tolerance at u0 = {n}")
        prev = u
        n += n_step
    inside = prof.r[(prof.r > r_min) & (prof.r < r_max)]
    r_all = np.union1d(rg, inside)
    y = prof.dense_many(r_all)
    out = Profile(params, r_all, y[0], y[1], "outward", prof.termination, dense=prof._dense)
    s = out.at(r_min)
    indicator = r_min**q * math.exp(s.u) / (M * q**q)
    out.meta = dict(prof.meta)
    out.meta["shooting"] = rec.to_dict()
    out.meta["provenance"] = {
        "construction": "eikonal-nd", "params": params.to_dict(), "r_window": [r_min, r_max],
        "u0_sequence": [t["value"] for t in rec.trials], "gaps": gaps, "tol": tol,
        "indicator_at_r_min": indicator,
    }
    return out


def _gradient_singular_1d(params: Params, u0_target: float, drop: float = 2.0, tol: float = 1e-4,
                          max_bisect: int = 60, tau_ratio: float = 1e-4, samples: int = 600) -> Profile:
    M, q = params.M, params.q
    w_axis = u0_target - drop
    k = q / (q - 2)

    def den(tau, u):
        return (q - 2) * (M - math.exp(min(u, 700.0)) * tau**k)

    def f(tau, y):
        d = den(tau, y[0])
        return [-1.0 / d, tau ** (1 / (q - 2)) / d]

    def g(u, y):  # tau as a function of u: smooth through tau = 0
        return [-(q - 2) * (M - math.exp(u) * abs(y[0]) ** k)]

    def reach_infinity(u, y):
        return y[0]

    reach_infinity.terminal, reach_infinity.direction = True, -1

    def hit_curve(u, y):
        return M - math.exp(u) * abs(y[0]) ** k

    hit_curve.terminal, hit_curve.direction = True, -1

    def asymptote(k0):
        tau0 = k0 ** (-(q - 2))
        if hit_curve(w_axis, [tau0]) <= 0:
            return math.inf
        sol = solve_ivp(g, (w_axis, 50.0), [tau0], method="DOP853", rtol=1e-12, atol=1e-14,
                        events=[reach_infinity, hit_curve])
        if sol.t_events[0].size:
            return float(sol.t_events[0][0])
        return math.inf

    rec = ShootingRecord()
    # the asymptote u0 decreases in k0; bracket geometrically around the target
    lo, hi = 1.0, 1.0
    f_hi = asymptote(hi)
    rec.add(hi, {"u0": f_hi}, "above" if f_hi > u0_target else "below")
    while f_hi > u0_target:
        lo, hi = hi, 2 * hi
        f_hi = asymptote(hi)
        rec.add(hi, {"u0": f_hi}, "above" if f_hi > u0_target else "below")
        if hi > 1e12:
            raise AsymptoteMiss("no k0 with asymptote below the target")
    f_lo = asymptote(lo)
    while f_lo <= u0_target:
        lo /= 2
        f_lo = asymptote(lo)
        rec.add(lo, {"u0": f_lo}, "above" if f_lo > u0_target else "below")
        if lo < 1e-12:
            raise AsymptoteMiss("no k0 with asymptote above the target")
    best = (hi, f_hi)
    for i in range(max_bisect):
        mid = math.sqrt(lo * hi)
        fm = asymptote(mid)
        rec.add(mid, {"u0": fm}, "above" if fm > u0_target else "below")
        rec.iterations = i + 1
        if fm > u0_target:
            lo = mid
        else:
            hi = mid
        if abs(fm - u0_target) <= tol:
            best = (mid, fm)
            break
    else:
        raise AsymptoteMiss(f"asymptote not within {tol} of {u0_target} after {max_bisect} steps")
    rec.bracket = (lo, hi)
    k0, u0 = best
    tau0 = k0 ** (-(q - 2))
    # second pass from the asymptote (a regular point in tau) gives rho = r - R without cancellation
    sol = solve_ivp(f, (0.0, tau0), [u0, 0.0], method="DOP853", rtol=1e-13, atol=1e-16, dense_output=True)
    taus = np.geomspace(tau0 * tau_ratio, tau0, samples)
    y = sol.sol(taus)
    r, u = y[1], y[0]
    p = -taus ** (-1 / (q - 2))
    meta = {
        "shooting": rec.to_dict(),
        "provenance": {
            "construction": "gradient-singular-1d", "params": params.to_dict(), "u0_target": u0_target,
            "u0": u0, "axis_u": w_axis, "k0": k0, "bracket": [lo, hi], "bisection_steps": rec.iterations,
            "axis_mismatch": float(abs(sol.y[0, -1] - w_axis)),
        },
    }
    return Profile(params, r, u, p, "outward", Termination(TerminationKind.REACHED_BOUND, float(r[-1])), meta=meta)


def _gradient_singular_nd(params: Params, u0_target: float, phi_seed: float = 1e-3, span: float = 60.0,
                          keep: float = 20.0, iterations: int = 8, tol: float = 1e-10) -> Profile:
    N, M, q = params.N, params.M, params.q
    V0, s = lv_p0(params)
    # log coordinates on the branch Phi < 0 (s = -1): Z = -e^zeta, V = e^nu, Phi = -e^phi
    kap = N - (N - 1) * q

    def f(t, y):
        Z, V, P = math.exp(y[0]), math.exp(y[1]), math.exp(y[2])
        return [N + P - M * V + Z, kap + (q - 1) * (-Z + M * V), 2 - N - Z + M * V]

    t0 = math.log(V0 / phi_seed ** (q - 1)) / (2 - q)
    zeta = u0_target + 2 * t0 - math.log(phi_seed)
    y0 = [zeta, math.log(V0), math.log(phi_seed)]
    hist = []
    for _ in range(iterations):
        y0[0] = zeta
        if zeta > math.log(1e-3):
            raise WindowViolation("u0_target too large for a seed inside the attraction ball of P0")
        sol = solve_ivp(f, (t0, t0 - span), y0, method="DOP853", rtol=1e-12, atol=1e-13, dense_output=True)
        u_end = sol.y[0, -1] + sol.y[2, -1] - 2 * sol.t[-1]
        hist.append({"zeta": zeta, "u0": float(u_end)})
        if abs(u_end - u0_target) < tol:
            break
        zeta += u0_target - u_end

    def fmap(t, y):
        return y[0] + y[2] - 2 * t, np.exp(y[2])

    u0 = float(u_end)
    keep_t = sol.t >= t0 - keep
    sol.t, sol.y = sol.t[keep_t], sol.y[:, keep_t]
    meta = {"provenance": {
        "construction": "gradient-singular-nd", "params": params.to_dict(), "u0_target": u0_target,
        "u0": u0, "V0": V0, "branch": s, "t_seed": t0, "seed": {"Z": -math.exp(zeta), "V": V0, "Phi": -phi_seed},
        "targeting": hist, "rhs_evaluations": int(sol.nfev),
    }}
    return _phase_profile(params, sol, fmap, "inward",
                          Termination(TerminationKind.REACHED_BOUND, math.exp(t0 - keep)), meta)


def construct_gradient_singular(params: Params, u0_target: float = 0.0, **kw) -> Profile:
    """Bounded singular solution, u -> u0 with |u'| ~ c r^(-1/(q-1)), q > 2.

    N = 1: bisection on the crossing k0 = -u' at u = u0_target - 2; the
    backward trajectory reaches v = infinity at u = u0, found in the
    coordinate tau = v^-(q-2) where that point is regular.  The solution is
    decreasing.

    N >= 2: backward integration of the Lotka-Volterra system from a point near
    P0 = (0, V0, 0) on the branch Phi < 0; the solution is increasing near 0.
    The seed's Z is adjusted until the realised u0 matches the target.

    ``meta["provenance"]["u0"]`` is the realised value.
    """
    if not params.q > 2:
        raise WindowViolation("gradient-singular solutions need q > 2")
    if params.N == 1:
        return _gradient_singular_1d(params, u0_target, **kw)
    return _gradient_singular_nd(params, u0_target, **kw)
