"""Adaptive integration of the radial equation.

The first-order form is

    u' = p,    p' = -(N-1) p / r + M |p|^q - e^u.

Runs spanning more than three decades in r are integrated in t = ln r on
(u, w = r u'):

    u_t = w,   w_t = (2-N) w + M e^((2-q)t) |w|^q - e^(2t+u),

which keeps the singular regimes polynomial in t.  Steps are taken by the
8th-order Dormand-Prince pair from scipy; events and the blow-up radius are
located by bisection on the step's dense output.

Near an eikonal-type singularity the log system is stiff: its fast rate is
about M q^q r^(2-q) per unit t.  Runs that pass through that region (the
singular constructions) select scipy's LSODA through ``IntegratorConfig.method``.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import DOP853, LSODA, Radau
from scipy.interpolate import CubicHermiteSpline

from .core import Params, RadialState, power_abs
from .errors import EventNotBracketed, InvalidState, SeedRadiusTooLarge

__all__ = [
    "Event",
    "IntegratorConfig",
    "Termination",
    "TerminationKind",
    "EventHit",
    "Profile",
    "rhs_radial",
    "seed_regular",
    "regular_seed_radius",
    "integrate",
    "find_event",
    "profile_from_arrays",
    "read_profile_csv",
    "write_profile_csv",
    "profile_to_json",
]

EXP_CAP = 700.0
_METHODS = {"DOP853": DOP853, "LSODA": LSODA, "Radau": Radau}


def _exp(a):
    return np.exp(np.minimum(a, EXP_CAP))


@dataclass(frozen=True)
class Event:
    """Scalar event g(r, u, p) = 0.

    ``direction`` +1 keeps only increasing crossings (in the direction of
    integration), -1 only decreasing ones, 0 both.  ``terminal`` stops the run.
    """

    label: str
    fn: Callable[[float, float, float], float]
    direction: int = 0
    terminal: bool = False
    tol: float = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 200_000
    blowup_threshold: float = 1e12
    events: tuple[Event, ...] = ()
    log_span: float = 1e3
    force_log: bool | None = None
    method: str = "DOP853"

    def __post_init__(self):
        if self.method not in _METHODS:
            raise InvalidState(f"method must be one of {sorted(_METHODS)}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidState("tolerances must be positive")
        if not self.blowup_threshold > 1:
            raise InvalidState("blowup_threshold must exceed 1")
        object.__setattr__(self, "events", tuple(self.events))

    def to_dict(self) -> dict:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_steps": self.max_steps,
            "blowup_threshold": self.blowup_threshold,
            "events": [e.label for e in self.events],
            "method": self.method,
        }

    def replace(self, **kw) -> "IntegratorConfig":
        return dataclasses.replace(self, **kw)


class TerminationKind(enum.Enum):
    REACHED_BOUND = "ReachedBound"
    BLOWUP_DETECTED = "BlowUpDetected"
    EVENT_HIT = "EventHit"
    STEP_UNDERFLOW = "StepUnderflow"
    MAX_STEPS = "MaxSteps"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    r: float | None = None
    label: str | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "r": self.r, "label": self.label}


@dataclass(frozen=True)
class EventHit:
    label: str
    state: RadialState

    @property
    def r(self) -> float:
        return self.state.r


class _Dense:
    """Piecewise dense output in the integration variable s (r or ln r)."""

    def __init__(self, log: bool):
        self.log = log
        self.knots: list[float] = []
        self.pieces: list = []

    def add(self, s0, s1, interp):
        if not self.knots:
            self.knots.append(s0)
        self.knots.append(s1)
        self.pieces.append(interp)

    def _index(self, s):
        k = np.asarray(self.knots)
        n = len(self.pieces)
        if k[0] > k[-1]:
            j = np.searchsorted(k[::-1], s, side="right") - 1
            return np.clip(len(k) - 2 - j, 0, n - 1)
        return np.clip(np.searchsorted(k, s, side="right") - 1, 0, n - 1)

    def __call__(self, s):
        return self.pieces[int(self._index(s))](s)

    def many(self, s) -> np.ndarray:
        """Evaluate at an array of points; returns shape (2, len(s))."""
        s = np.asarray(s, dtype=float)
        idx = self._index(s)
        out = np.empty((2, s.size))
        order = np.argsort(idx, kind="stable")
        bounds = np.flatnonzero(np.diff(idx[order])) + 1
        for grp in np.split(order, bounds):
            if grp.size:
                out[:, grp] = np.asarray(self.pieces[idx[grp[0]]](s[grp])).reshape(2, -1)
        return out


class Profile:
    """Sampled radial trajectory with strictly increasing radii.

    Arrays are read-only.  ``dense(r)`` evaluates (u, p) anywhere between the
    first and the last sample.
    """

    def __init__(self, params: Params, r, u, p, direction: str, termination: Termination,
                 residuals=None, events: Sequence[EventHit] = (), dense=None, meta: dict | None = None):
        r = np.asarray(r, dtype=float)
        u = np.asarray(u, dtype=float)
        p = np.asarray(p, dtype=float)
        if not (r.shape == u.shape == p.shape and r.ndim == 1):
            raise InvalidState("r, u, p must be 1-d arrays of equal length")
        if r.size > 1 and not np.all(np.diff(r) > 0):
            raise InvalidState("profile radii must be strictly increasing")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(u)) and np.all(np.isfinite(p))):
            raise InvalidState("profile samples must be finite")
        self.params = params
        self.r, self.u, self.p = r, u, p
        for a in (self.r, self.u, self.p):
            a.setflags(write=False)
        self.direction = direction
        self.termination = termination
        self.events = tuple(events)
        self.meta = dict(meta or {})
        self._dense = dense
        self._residuals = None if residuals is None else np.asarray(residuals, dtype=float)

    def __len__(self):
        return self.r.size

    def __repr__(self):
        return (f"Profile(N={self.params.N}, M={self.params.M}, q={self.params.q}, "
                f"r=[{self.r[0]:.3g}, {self.r[-1]:.3g}], n={len(self)}, "
                f"termination={self.termination.kind.value})")

    def state(self, i: int) -> RadialState:
        return RadialState(self.r[i], self.u[i], self.p[i])

    @property
    def inner(self) -> RadialState:
        return self.state(0)

    @property
    def outer(self) -> RadialState:
        return self.state(-1)

    def dense(self, r):
        """(u, p) at radius r, interpolated."""
        r = float(r)
        if not (self.r[0] * (1 - 1e-12) <= r <= self.r[-1] * (1 + 1e-12)):
            raise InvalidState(f"r={r} outside profile range [{self.r[0]}, {self.r[-1]}]")
        if self._dense is not None:
            d = self._dense
            y = d(math.log(r) if d.log else r)
            if d.log:
                return float(y[0]), float(y[1]) / r
            return float(y[0]), float(y[1])
        return self._hermite(r)

    def _hermite(self, r):
        if not hasattr(self, "_hu"):
            ppr = rhs_radial_arrays(self.params, self.r, self.u, self.p)[1]
            self._hu = CubicHermiteSpline(self.r, self.u, self.p)
            self._hp = CubicHermiteSpline(self.r, self.p, ppr)
        return float(self._hu(r)), float(self._hp(r))

    def dense_many(self, r) -> np.ndarray:
        """Vectorised :meth:`dense`; returns an array of shape (2, len(r))."""
        r = np.clip(np.asarray(r, dtype=float), self.r[0], self.r[-1])
        if self._dense is not None:
            d = self._dense
            y = d.many(np.log(r) if d.log else r)
            if d.log:
                y[1] /= r
            return y
        self._hermite(r[0])
        return np.vstack([self._hu(r), self._hp(r)])

    def at(self, r: float) -> RadialState:
        u, p = self.dense(r)
        return RadialState(r, u, p)

    @property
    def residuals(self) -> np.ndarray:
        """Equation residual per sample with u'' from central differences of p."""
        if self._residuals is None:
            self._residuals = _fd_residuals(self)
        return self._residuals

    def restrict(self, r_min: float, r_max: float) -> "Profile":
        m = (self.r >= r_min) & (self.r <= r_max)
        return Profile(self.params, self.r[m], self.u[m], self.p[m], self.direction, self.termination,
                       None, self.events, self._dense, self.meta)

    def subsample(self, step: int = 2) -> "Profile":
        return Profile(self.params, self.r[::step], self.u[::step], self.p[::step], self.direction,
                       self.termination, None, self.events, self._dense, self.meta)


def _fd_weights(offsets) -> np.ndarray:
    """Weights of the first derivative at 0 from samples at ``offsets``."""
    k = len(offsets)
    A = np.vander(np.asarray(offsets, dtype=float), k, increasing=True).T
    rhs = np.zeros(k)
    rhs[1] = 1.0
    return np.linalg.solve(A, rhs)


def _fd_residuals(profile: Profile, h: float = 2e-3) -> np.ndarray:
    # 4th-order five-point stencil in t = ln r, shifted inside the range at the ends
    par = profile.params
    r = profile.r
    out = np.zeros_like(r)
    lo, hi = math.log(r[0]), math.log(r[-1])
    h = min(h, (hi - lo) / 4) if hi > lo else 0.0
    if h <= 0:
        return out
    t = np.log(r)
    c = np.clip(t, lo + 2 * h, hi - 2 * h)
    offs = (c[:, None] + h * np.arange(-2, 3)[None, :]) - t[:, None]
    W = np.array([_fd_weights(o) for o in offs])
    P = profile.dense_many(np.exp(t[:, None] + offs).ravel())[1].reshape(offs.shape)
    upp = np.sum(W * P, axis=1) / r
    u, p = profile.u, profile.p
    return -upp - (par.N - 1) * p / r + par.M * power_abs(p, par.q) - _exp(u)


def profile_from_arrays(params: Params, r, u, p, direction: str = "outward",
                        termination: Termination | None = None, meta: dict | None = None) -> Profile:
    """Profile from raw samples (sorted into increasing r)."""
    r = np.asarray(r, dtype=float)
    order = np.argsort(r)
    return Profile(params, r[order], np.asarray(u, float)[order], np.asarray(p, float)[order], direction,
                   termination or Termination(TerminationKind.REACHED_BOUND, float(r[order][-1])), meta=meta)


# ---------------------------------------------------------------------------
# right-hand sides

def rhs_radial(params: Params, state: RadialState) -> tuple[float, float]:
    """(du/dr, dp/dr) at a radial state."""
    r, u, p = state.r, state.u, state.p
    dp = -(params.N - 1) * p / r + params.M * power_abs(p, params.q) - math.exp(min(u, EXP_CAP))
    return p, float(dp)


def rhs_radial_arrays(params: Params, r, u, p):
    r, u, p = (np.asarray(a, dtype=float) for a in (r, u, p))
    return p, -(params.N - 1) * p / r + params.M * power_abs(p, params.q) - _exp(u)


def _make_rhs(params: Params, log: bool):
    N, M, q = params.N, params.M, params.q
    if log:
        def f(t, y):
            u, w = y
            aw = abs(w)
            grad = math.exp(min((2 - q) * t + q * math.log(aw), EXP_CAP)) if aw > 0 else 0.0
            return np.array([w, (2 - N) * w + M * grad - math.exp(min(2 * t + u, EXP_CAP))])
    else:
        def f(r, y):
            u, p = y
            ap = abs(p)
            grad = math.exp(min(q * math.log(ap), EXP_CAP)) if ap > 0 else 0.0
            return np.array([p, -(N - 1) * p / r + M * grad - math.exp(min(u, EXP_CAP))])
    return f


def _make_jac(params: Params, log: bool):
    N, M, q = params.N, params.M, params.q
    if log:
        def jac(t, y):
            u, w = y
            aw = abs(w)
            g = 0.0
            if aw > 0:
                g = M * q * math.exp(min((2 - q) * t + (q - 1) * math.log(aw), EXP_CAP)) * (1 if w > 0 else -1)
            return np.array([[0.0, 1.0], [-math.exp(min(2 * t + u, EXP_CAP)), (2 - N) + g]])
    else:
        def jac(r, y):
            u, p = y
            ap = abs(p)
            g = 0.0
            if ap > 0:
                g = M * q * math.exp(min((q - 1) * math.log(ap), EXP_CAP)) * (1 if p > 0 else -1)
            return np.array([[0.0, 1.0], [-math.exp(min(u, EXP_CAP)), -(N - 1) / r + g]])
    return jac


# ---------------------------------------------------------------------------
# seeding at the origin

def seed_regular(params: Params, u0: float, eps: float) -> RadialState:
    """State at r = eps of the regular solution with u(0) = u0.

    Uses the Taylor expansion about the origin; the two leading corrections
    (from e^u and from the gradient term) are included.  The expansion needs
    both e^u0 eps^2 and the relative gradient term M|u'|^q / e^u0 below 0.01.
    """
    if not eps > 0:
        raise InvalidState("seed radius must be positive (r = 0 is the limit, not a state)")
    N, M, q = params.N, params.M, params.q
    a = math.exp(u0)
    if a * eps * eps >= 0.01:
        raise SeedRadiusTooLarge(f"e^u0 eps^2 = {a * eps * eps:.3g} >= 0.01; choose a smaller eps")
    g = M * (a / N) ** q
    if g * eps**q >= 0.01 * a:
        raise SeedRadiusTooLarge(f"gradient term dominates at eps={eps:.3g}; choose a smaller eps")
    u = (u0 - a * eps**2 / (2 * N) + a * a * eps**4 / (8 * N * (N + 2))
         + g * eps ** (q + 2) / ((N + q) * (q + 2)))
    p = -a * eps / N + a * a * eps**3 / (2 * N * (N + 2)) + g * eps ** (q + 1) / (N + q)
    return RadialState(eps, u, p)


def regular_seed_radius(params: Params, u0: float, margin: float = 1e-3) -> float:
    """A seed radius for :func:`seed_regular` with both corrections ~margin^2 small."""
    N, M, q = params.N, params.M, params.q
    r1 = math.exp(-u0 / 2)
    r2 = N * M ** (-1 / q) * math.exp(-u0 * (q - 1) / q)
    return margin * min(r1, r2, 1.0)


# ---------------------------------------------------------------------------
# integration

def _bisect(fun, dense, s0, s1, tol):
    """Root of fun(dense(s)) between s0 and s1 by bisection."""
    g0 = fun(s0, dense(s0))
    a, b = s0, s1
    scale = max(abs(s0), abs(s1), 1.0)
    for _ in range(200):
        m = 0.5 * (a + b)
        if abs(b - a) <= tol * scale:
            break
        gm = fun(m, dense(m))
        if (gm > 0) == (g0 > 0) and gm != 0:
            a, g0 = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def integrate(params: Params, start: RadialState, r_end: float,
              config: IntegratorConfig | None = None) -> Profile:
    """Integrate from ``start`` to ``r_end`` (either direction).

    The returned Profile records the termination: ReachedBound, BlowUpDetected
    (radius bisected to 1e-8 relative on the threshold crossing of |u|+|p|),
    EventHit for terminal events, StepUnderflow when the step size collapses.
    """
    config = config or IntegratorConfig()
    if not r_end > 0 or r_end == start.r:
        raise InvalidState("r_end must be positive and different from the start radius")
    span = max(r_end / start.r, start.r / r_end)
    log = config.force_log if config.force_log is not None else span > config.log_span
    outward = r_end > start.r
    f = _make_rhs(params, log)

    def to_s(r):
        return math.log(r) if log else r

    def to_rup(s, y):
        if log:
            r = math.exp(s)
            return r, y[0], y[1] / r
        return s, y[0], y[1]

    s0, s1 = to_s(start.r), to_s(r_end)
    y0 = np.array([start.u, start.r * start.p if log else start.p])
    # a regular seed starts with a tiny derivative component; its absolute
    # tolerance is tied to the initial magnitude so it stays resolved
    d0 = abs(y0[1])
    atol_d = config.abs_tol if d0 == 0 else max(min(config.abs_tol, 1e-3 * d0), 1e-300)
    atol = np.array([config.abs_tol, atol_d])
    cls = _METHODS[config.method]
    kw = {} if cls is DOP853 else {"jac": _make_jac(params, log)}
    solver = cls(f, s0, y0, s1, rtol=config.rel_tol, atol=atol, **kw)
    dense = _Dense(log)
    S = [s0]
    Y = [y0.copy()]
    hits: list[EventHit] = []
    thr = config.blowup_threshold

    def blow(s, y):
        r, u, p = to_rup(s, y)
        return abs(u) + abs(p) - thr

    def ev_wrap(ev):
        return lambda s, y: ev.fn(*to_rup(s, y))

    ev_funcs = [ev_wrap(e) for e in config.events]
    ev_prev = [g(s0, y0) for g in ev_funcs]
    termination = None
    steps = 0
    while termination is None:
        if steps >= config.max_steps:
            termination = Termination(TerminationKind.MAX_STEPS, to_rup(S[-1], Y[-1])[0])
            break
        msg = solver.step()
        steps += 1
        if solver.status == "failed":
            termination = Termination(TerminationKind.STEP_UNDERFLOW, to_rup(S[-1], Y[-1])[0], msg)
            break
        s_new, y_new = solver.t, solver.y.copy()
        interp = solver.dense_output()
        if not np.all(np.isfinite(y_new)):
            s_lo, s_hi = S[-1], s_new
            for _ in range(200):
                m = 0.5 * (s_lo + s_hi)
                ym = interp(m)
                if np.all(np.isfinite(ym)) and blow(m, ym) < 0:
                    s_lo = m
                else:
                    s_hi = m
                if abs(s_hi - s_lo) <= 1e-10 * max(1.0, abs(s_lo)):
                    break
            dense.add(S[-1], s_lo, interp)
            S.append(s_lo)
            Y.append(interp(s_lo))
            termination = Termination(TerminationKind.BLOWUP_DETECTED, to_rup(s_lo, Y[-1])[0])
            break
        dense.add(S[-1], s_new, interp)
        # blow-up threshold
        if blow(s_new, y_new) >= 0:
            sb = _bisect(blow, interp, S[-1], s_new, 1e-10)
            r_star = to_rup(sb, interp(sb))[0]
            S.append(sb)
            Y.append(interp(sb))
            termination = Termination(TerminationKind.BLOWUP_DETECTED, r_star)
            break
        stop_at = None
        for k, (ev, g) in enumerate(zip(config.events, ev_funcs)):
            g_new = g(s_new, y_new)
            g_old = ev_prev[k]
            ev_prev[k] = g_new
            if g_old == 0 or (g_old > 0) == (g_new > 0):
                continue
            rising = g_new > g_old
            if ev.direction > 0 and not rising or ev.direction < 0 and rising:
                continue
            se = _bisect(g, interp, S[-1], s_new, ev.tol)
            hits.append(EventHit(ev.label, RadialState(*to_rup(se, interp(se)))))
            if ev.terminal and (stop_at is None or abs(se - S[-1]) < abs(stop_at[0] - S[-1])):
                stop_at = (se, ev.label)
        if stop_at is not None:
            se, label = stop_at
            S.append(se)
            Y.append(interp(se))
            termination = Termination(TerminationKind.EVENT_HIT, to_rup(se, Y[-1])[0], label)
            break
        S.append(s_new)
        Y.append(y_new)
        if solver.status == "finished":
            termination = Termination(TerminationKind.REACHED_BOUND, r_end)

    S_arr = np.array(S)
    Y_arr = np.array(Y)
    if log:
        r = np.exp(S_arr)
        u, p = Y_arr[:, 0], Y_arr[:, 1] / r
    else:
        r, u, p = S_arr, Y_arr[:, 0], Y_arr[:, 1]
    # drop a zero-length final piece (event exactly at a step end)
    keep = np.concatenate([[True], np.abs(np.diff(r)) > 0])
    r, u, p = r[keep], u[keep], p[keep]
    if not outward:
        r, u, p = r[::-1], u[::-1], p[::-1]
    ok = np.isfinite(u) & np.isfinite(p)
    return Profile(params, r[ok], u[ok], p[ok], "outward" if outward else "inward", termination,
                   events=hits, dense=dense,
                   meta={"variable": "log" if log else "r", "steps": steps, "config": config.to_dict()})


def find_event(source, event: Event) -> tuple[float, RadialState]:
    """First root of ``event`` along a Profile (or a live run).

    ``source`` is either a Profile or a tuple (params, start, r_end[, config]),
    in which case the run is integrated with the event attached as terminal.
    """
    if isinstance(source, tuple):
        params, start, r_end, *rest = source
        cfg = rest[0] if rest else IntegratorConfig()
        ev = Event(event.label, event.fn, event.direction, True, event.tol)
        cfg = IntegratorConfig(cfg.rel_tol, cfg.abs_tol, cfg.max_steps, cfg.blowup_threshold,
                               tuple(cfg.events) + (ev,), cfg.log_span, cfg.force_log)
        prof = integrate(params, start, r_end, cfg)
        for h in prof.events:
            if h.label == event.label:
                return h.r, h.state
        raise EventNotBracketed(f"event {event.label!r} not crossed on the run")
    prof: Profile = source
    g = np.array([event.fn(r, u, p) for r, u, p in zip(prof.r, prof.u, prof.p)])
    idx = range(len(g) - 1)
    if prof.direction == "inward":
        idx = reversed(idx)
    for i in idx:
        a, b = g[i], g[i + 1]
        if a == 0:
            return prof.r[i], prof.state(i)
        if (a > 0) == (b > 0):
            continue
        rising = (b > a) if prof.direction == "outward" else (a > b)
        if event.direction > 0 and not rising or event.direction < 0 and rising:
            continue
        lo, hi = math.log(prof.r[i]), math.log(prof.r[i + 1])
        fa = a
        while hi - lo > event.tol * max(1.0, abs(lo)):
            m = 0.5 * (lo + hi)
            rm = math.exp(m)
            gm = event.fn(rm, *prof.dense(rm))
            if (gm > 0) == (fa > 0) and gm != 0:
                lo, fa = m, gm
            else:
                hi = m
        rr = math.exp(0.5 * (lo + hi))
        st = prof.at(rr)
        return rr, st
    raise EventNotBracketed(f"event {event.label!r} does not change sign on the profile")


# ---------------------------------------------------------------------------
# serialisation

def _g(x) -> str:
    return format(float(x), ".17g")


def write_profile_csv(profile: Profile, path_or_buf=None) -> str:
    """CSV with header r,u,du,residual; 17 significant digits, LF endings."""
    buf = io.StringIO()
    buf.write("r,u,du,residual\n")
    for r, u, p, res in zip(profile.r, profile.u, profile.p, profile.residuals):
        buf.write(f"{_g(r)},{_g(u)},{_g(p)},{_g(res)}\n")
    text = buf.getvalue()
    if path_or_buf is not None:
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", newline="\n", encoding="utf-8") as fh:
                fh.write(text)
    return text


def read_profile_csv(path, params: Params, meta: dict | None = None) -> Profile:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise InvalidState(f"{path}: no samples")
    r = [float(row["r"]) for row in rows]
    u = [float(row["u"]) for row in rows]
    p = [float(row["du"]) for row in rows]
    direction = (meta or {}).get("direction", "outward")
    term = (meta or {}).get("termination")
    termination = None
    if term:
        termination = Termination(TerminationKind(term["kind"]), term.get("r"), term.get("label"))
    return profile_from_arrays(params, r, u, p, direction, termination, meta=meta)


def profile_to_json(profile: Profile, extra: dict | None = None) -> dict:
    d = {
        "params": profile.params.to_dict(),
        "direction": profile.direction,
        "termination": profile.termination.to_dict(),
        "samples": len(profile),
        "r_range": [float(profile.r[0]), float(profile.r[-1])],
        "events": [{"label": h.label, "r": h.state.r, "u": h.state.u, "du": h.state.p} for h in profile.events],
        "meta": _jsonable(profile.meta),
    }
    if extra:
        d.update(_jsonable(extra))
    return d


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, enum.Enum):
        return x.value
    if hasattr(x, "to_dict"):
        return _jsonable(x.to_dict())
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
