"""Classification of the behaviour of profiles at 0 and at infinity.

Each candidate regime has an indicator that tends to a constant in that
regime, for instance r^2 e^u -> 2(N-2) for the Emden-type singularity.  On a
two-decade window the indicator is sampled, its slope in ln r measured, and
the regime accepted only if the indicator is flat (relative slope and
relative spread below ``threshold``) and the regime is admissible for
(N, q).  When nothing qualifies the outcome is ``Undetermined``.

Also provides the energies H, G, F_C along a profile and an audit of the a
priori bounds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Params, derive_constants, power_abs
from .errors import WindowTooShort
from .radial_solver import Profile

__all__ = [
    "Regime",
    "Classification",
    "DiagnosticTrace",
    "classify_origin",
    "classify_infinity",
    "diagnostics",
    "audit_bounds",
    "admissible_regimes",
]


class Regime(enum.Enum):
    REGULAR = "Regular"
    EMDEN_SINGULAR = "EmdenSingular"
    EIKONAL_SINGULAR = "EikonalSingular"
    HJ_STRONG = "HJStrong"
    HJ_LOG = "HJLog"
    HJ_POWER = "HJPower"
    GRADIENT_ONLY = "GradientOnly"
    ONE_D_LINEAR = "OneDLinear"
    EXTERIOR_EIKONAL = "ExteriorEikonal"
    EXTERIOR_EMDEN = "ExteriorEmden"
    UNDETERMINED = "Undetermined"


@dataclass
class Classification:
    regime: Regime
    constants: dict = field(default_factory=dict)
    residual: float = math.inf
    window: tuple = (math.nan, math.nan)
    indicator: str = ""
    candidates: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "constants": {k: float(v) for k, v in self.constants.items()},
            "residual": float(self.residual),
            "window": [float(w) for w in self.window],
            "indicator": self.indicator,
            "candidates": self.candidates,
        }


@dataclass
class DiagnosticTrace:
    """H(r) = e^u + u'^2/2, G(t) (Leighton-type energy), F_C(r) = e^u - C M |u'|^q."""

    r: np.ndarray
    H: np.ndarray
    G: np.ndarray
    F: np.ndarray
    C: float

    def to_dict(self) -> dict:
        return {"r": self.r.tolist(), "H": self.H.tolist(), "G": self.G.tolist(), "F_C": self.F.tolist(),
                "C": self.C}


def admissible_regimes(params: Params, at: str = "origin") -> set[Regime]:
    """Regimes that the theory allows for (N, q) at 0 or at infinity."""
    N, q = params.N, params.q
    if at == "infinity":
        if N >= 3 and q > 2:
            return {Regime.EXTERIOR_EMDEN}
        if N >= 3 and 1 < q < 2:
            return {Regime.EXTERIOR_EIKONAL}
        return set()
    out = {Regime.REGULAR}
    if N == 1:
        out.add(Regime.ONE_D_LINEAR)
    if q > 2:
        out |= {Regime.EIKONAL_SINGULAR, Regime.GRADIENT_ONLY}
    elif N >= 3:
        qc = N / (N - 1)
        out.add(Regime.EMDEN_SINGULAR)
        if q < qc and not math.isclose(q, qc, rel_tol=1e-12):
            out.add(Regime.HJ_STRONG)
        elif math.isclose(q, qc, rel_tol=1e-12):
            out.add(Regime.HJ_LOG)
        else:
            out.add(Regime.HJ_POWER)
    return out


def _flatness(r, y, additive: bool = False):
    """(relative log-slope, relative spread, mean) of y over the window."""
    t = np.log(r)
    slope = np.polyfit(t - t.mean(), y, 1)[0]
    mean = float(np.mean(y))
    scale = max(abs(mean), 1.0) if additive else abs(mean)
    if scale == 0 or not np.all(np.isfinite(y)):
        return math.inf, math.inf, mean
    return abs(slope) / scale, float(np.max(np.abs(y - mean))) / scale, mean


def _window(profile: Profile, inner: bool, decades: float, min_decades: float = 1.0):
    if len(profile) < 5:
        raise WindowTooShort(f"profile has {len(profile)} samples; at least 5 are needed")
    r0, r1 = float(profile.r[0]), float(profile.r[-1])
    if r1 / r0 < 10**min_decades:
        raise WindowTooShort(f"profile spans {math.log10(r1 / r0):.2f} decades; need {min_decades}")
    if inner:
        return r0, min(r1, r0 * 10**decades)
    return max(r0, r1 / 10**decades), r1


def _evaluate(candidates, r, window, threshold, admissible):
    best = None
    report = {}
    for regime, name, y, additive, extra_ok, consts in candidates:
        slope, spread, mean = _flatness(r, y, additive)
        ok = slope < threshold and spread < threshold and extra_ok and regime in admissible
        report[regime.value] = {"indicator": name, "slope": slope, "spread": spread, "mean": mean,
                                "admissible": regime in admissible, "accepted": bool(ok)}
        if ok and (best is None or spread < best[2]):
            best = (regime, name, spread, consts(mean))
    if best is None:
        return Classification(Regime.UNDETERMINED, {}, math.inf, window, "", report)
    regime, name, spread, consts = best
    return Classification(regime, consts, spread, window, name, report)


def classify_origin(profile: Profile, params: Params, threshold: float = 0.02, decades: float = 2.0,
                    n: int = 80) -> Classification:
    """Behaviour of ``profile`` as r -> 0, judged on its inner ``decades``."""
    if profile.r[0] > 1e-3 * (1 + 1e-9):
        raise WindowTooShort(f"profile starts at r={profile.r[0]:.3g}; classification at 0 needs r <= 1e-3")
    window = _window(profile, True, decades)
    N, M, q = params.N, params.M, params.q
    r = np.geomspace(*window, n)
    u, p = profile.dense_many(r)
    adm = admissible_regimes(params)
    ez = np.exp(np.minimum(u, 700.0))
    rp = r * p
    cands = []
    # regular: u flat and u'/r -> -e^u0/N
    pr = p / r
    sl, sp, m = _flatness(r, pr)
    reg_ok = sl < threshold and sp < threshold and m < 0
    A = np.vstack([np.ones_like(r), r * r, r ** (q + 2), r**4]).T
    u0_reg = float(np.linalg.lstsq(A, u, rcond=None)[0][0])
    cands.append((Regime.REGULAR, "u", u, True, reg_ok, lambda mean: {"u0": u0_reg}))
    # N = 1 with u'(0) = b != 0
    sl, sp, b = _flatness(r, p)
    lin_ok = sl < threshold and sp < threshold and abs(b) > 0
    c1 = np.polyfit(r, u, 1)
    cands.append((Regime.ONE_D_LINEAR, "u", u, True, lin_ok, lambda mean: {"u0": float(c1[1]), "b": float(c1[0])}))
    if q > 2:
        X = r**q * ez
        sl, sp, mm = _flatness(r, rp)
        cands.append((Regime.EIKONAL_SINGULAR, "r^q e^u", X, False, sl < threshold and sp < threshold,
                      lambda mean: {"Mq^q": mean}))
        alpha = (q - 2) / (q - 1)
        g = r ** (1 / (q - 1)) * p

        def grad_consts(mean):
            c = mean / alpha
            return {"u0": float(np.mean(u - c * r**alpha)), "c": c}

        cands.append((Regime.GRADIENT_ONLY, "r^(1/(q-1)) u'", g, False, True, grad_consts))
    cands.append((Regime.EMDEN_SINGULAR, "r^2 e^u", r * r * ez, False,
                  bool(np.all(np.abs(rp + 2) < 0.25)), lambda mean: {"2(N-2)": mean}))
    if N >= 3:
        cands.append((Regime.HJ_STRONG, "r^(N-2) u", r ** (N - 2) * u, False, bool(np.all(u < 0)),
                      lambda mean: {"gamma": mean}))
        cands.append((Regime.HJ_LOG, "r^(N-2)|ln r|^(N-1) u", r ** (N - 2) * np.abs(np.log(r)) ** (N - 1) * u,
                      False, bool(np.all(u < 0)), lambda mean: {"limit": mean}))
        if q < 2:
            cands.append((Regime.HJ_POWER, "r^((2-q)/(q-1)) u", r ** ((2 - q) / (q - 1)) * u, False,
                          bool(np.all(u < 0)), lambda mean: {"xi_M": -mean}))
    return _evaluate(cands, r, window, threshold, adm)


def classify_infinity(profile: Profile, params: Params, threshold: float = 0.02, decades: float = 1.0,
                      n: int = 60) -> Classification:
    """Behaviour of ``profile`` as r -> infinity, judged on its outer ``decades``.

    The exterior indicators approach their limits only like negative powers
    of r, so each is fitted by c plus the decaying modes of the linearisation:
    r^(2-q) and, for the Emden point, the pair of modes from
    l^2 + (N-2) l + 2(N-2) (oscillatory for N < 10).  The regime is accepted when that fit leaves a
    relative residual below ``threshold`` and r u' at the outer edge is within
    5% of its limit.  ``constants`` holds the extrapolated c and the value at
    the outer edge.
    """
    if profile.r[-1] < 1e2:
        raise WindowTooShort(f"profile ends at r={profile.r[-1]:.3g}; classification at infinity needs r >= 100")
    window = _window(profile, False, decades)
    q = params.q
    r = np.geomspace(*window, n)
    u, p = profile.dense_many(r)
    ez = np.exp(np.minimum(u, 700.0))
    rp = r * p
    adm = admissible_regimes(params, "infinity")
    t = np.log(r)
    base = [np.ones_like(r), r ** (-abs(2 - q))]
    mu = np.roots([1.0, params.N - 2.0, 2.0 * (params.N - 2)])
    if abs(mu[0].imag) > 0:
        w = abs(mu[0].imag)
        emden_modes = [r ** mu[0].real * np.cos(w * t), r ** mu[0].real * np.sin(w * t)]
    else:
        emden_modes = [r ** m.real for m in mu] if abs(mu[0] - mu[1]) > 1e-9 else [r ** mu[0].real, t * r ** mu[0].real]
    report = {}
    best = None
    for regime, name, y, target, key, A in (
        (Regime.EXTERIOR_EMDEN, "r^2 e^u", r * r * ez, -2.0, "2(N-2)", np.vstack(base + emden_modes).T),
        (Regime.EXTERIOR_EIKONAL, "r^q e^u", r**q * ez, -q, "Mq^q", np.vstack(base).T),
    ):
        coef = np.linalg.lstsq(A, y, rcond=None)[0]
        c = float(coef[0])
        res = float(np.max(np.abs(A @ coef - y)) / abs(c)) if c != 0 else math.inf
        slope_ok = abs(rp[-1] - target) < 0.05 * abs(target)
        ok = res < threshold and c > 0 and slope_ok and regime in adm
        report[regime.value] = {"indicator": name, "fit": [c, float(coef[1])], "residual": res,
                                "ru'_edge": float(rp[-1]), "admissible": regime in adm, "accepted": bool(ok)}
        if ok and (best is None or res < best[2]):
            best = (regime, name, res, {key: c, "edge_value": float(y[-1]), "ru'": float(rp[-1])})
    if best is None:
        return Classification(Regime.UNDETERMINED, {}, math.inf, window, "", report)
    regime, name, res, consts = best
    return Classification(regime, consts, res, window, name, report)


def diagnostics(profile: Profile, params: Params, C: float = 0.5) -> DiagnosticTrace:
    """Energies sampled at the profile radii.

    G(t) = M q^q X^2/2 - X^3/3 + e^((q-2)t) ((N-2) q X/2 - X_t^2/2) with
    X = r^q e^u and X_t = X (q - Phi), Phi = -r u', both formed pointwise.
    """
    if not 0 < C < 1:
        raise ValueError("C must lie in (0, 1)")
    N, M, q = params.N, params.M, params.q
    r, u, p = profile.r, profile.u, profile.p
    ez = np.exp(np.minimum(u, 700.0))
    H = ez + 0.5 * p * p
    X = r**q * ez
    Xt = X * (q + r * p)
    G = M * q**q * X**2 / 2 - X**3 / 3 + r ** (q - 2) * ((N - 2) * q * X / 2 - Xt**2 / 2)
    F = ez - C * M * power_abs(p, q)
    return DiagnosticTrace(r.copy(), H, G, F, C)


def _sup(mask, vals):
    return float(np.max(vals[mask])) if np.any(mask) else None


def _trend(r, y):
    """log-log slope of y against r on the inner decade (negative: growing as r -> 0)."""
    m = r <= r[0] * 10
    if m.sum() < 3 or np.any(y[m] <= 0):
        return None
    return float(np.polyfit(np.log(r[m]), np.log(y[m]), 1)[0])


def audit_bounds(profile: Profile, params: Params) -> dict:
    """Suprema of the scale-invariant quantities bounded by the a priori estimates.

    Only trends are flagged: a quantity that grows like a negative power of r
    toward the origin (log-log slope below -0.1 on the inner decade).
    r^(1/(q-1))|u'| is reported but not flagged, since its bound carries
    e^u terms; the ratio of |u'| to the complete majorant is flagged instead.
    r^min(2,q) e^u is the exterior quantity and is never flagged at 0.
    """
    N, M, q = params.N, params.M, params.q
    r, u, p = profile.r, profile.u, profile.p
    ez = np.exp(np.minimum(u, 700.0))
    inner, outer = r <= 1.0, r >= 1.0
    qty = {
        "r^max(2,q) e^u": r ** max(2.0, q) * ez,
        "r^min(2,q) e^u": r ** min(2.0, q) * ez,
        "r^(1/(q-1))|u'|": r ** (1 / (q - 1)) * np.abs(p),
        "r|u'|": r * np.abs(p),
        # |u'| over the full gradient majorant, which also contains e^(u/q) and e^(u/(2(q-1)))
        "|u'|/majorant": np.abs(p) / (r ** (-1 / (q - 1)) + np.exp(np.minimum(u / q, 700.0))
                                      + np.exp(np.minimum(u / (2 * (q - 1)), 700.0))),
    }
    report = {"params": params.to_dict(), "sup": {}, "inner_value": {}, "inner_trend": {}, "flags": []}
    for name, vals in qty.items():
        mask = outer if name.startswith("r^min") else inner
        report["sup"][name] = _sup(mask, vals)
        report["inner_value"][name] = float(vals[0])
        tr = _trend(r, vals)
        report["inner_trend"][name] = tr
        relevant = {"r|u'|": q > 2, "r^(1/(q-1))|u'|": False, "r^min(2,q) e^u": False}.get(name, True)
        if not np.all(np.isfinite(vals)):
            report["flags"].append(f"{name}: non-finite values")
        elif relevant and tr is not None and tr < -0.1:
            report["flags"].append(f"{name}: grows like r^{tr:.2f} toward 0")
    return report
