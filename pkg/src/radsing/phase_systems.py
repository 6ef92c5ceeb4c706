"""Right-hand sides, equilibria and linearisations of the phase systems.

All systems use t = ln r unless noted:

EMDEN_PLANE       x_t = x(2-Phi),  Phi_t = x + (2-N)Phi
NON_AUT_X         x_t = x(2-Phi),  Phi_t = (2-N)Phi - M e^((2-q)t)|Phi|^q + x
NON_AUT_XQ        X_t = X(q-Phi),  Phi_t = (2-N)Phi + e^((2-q)t)(X - M|Phi|^q)
TRIPLE_V          x_t = x(2-Phi),  Phi_t = (2-N)Phi - M|Phi|V + x,
                  V_t = V(N-(N-1)q - (q-1)(M V s - x/Phi))
TRIPLE_XV         X_t = X(q-Phi),  Phi_t = (2-N)Phi - V|Phi|(M - X/|Phi|^q),
                  V_t = V(N-(N-1)q - (q-1)(M - X/|Phi|^q) s V)
TRIPLE_THETA      x_t = x(2-Phi),  Phi_t = x + (2-N)Phi - M|Phi|^q Theta,
                  Theta_t = (2-q)Theta
LOTKA_VOLTERRA    Z_t = Z(N - Phi + sMV - Z),  V_t = V(N-(N-1)q + (q-1)(Z - sMV)),
                  Phi_t = Phi(2 - N + Z - sMV)
HJ                xi_t = beta xi - eta,
                  eta_t = -kappa eta + M|eta|^q - e^(qt/(q-1)) exp(-e^(-beta t) xi)
ONE_D  (in r)     u_r = -v,  v_r = e^u - M|v|^q                      (N = 1)
ZOF_U  (in u)     z_u = 2M z^(q/2) - 2e^u,  r_u = -1/sqrt(z)         (N = 1)
APPENDIX_VARPI    varpi_u = -varpi/q + (N-1)/(r e^(u/q)) + e^(theta u)(M varpi^q - 1)/varpi,
       (in u)     r_u = -e^(-u/q)/varpi

Here s = sign(Phi).  On Phi = 0 the branch must be given explicitly (keyword
``s``); this matters for the equilibrium P0 of the Lotka-Volterra system.
For non-autonomous systems the equilibria and linearisations refer to the
"frozen limit" where the explicitly t-dependent term is dropped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    AppendixVarpi,
    EikonalPlane,
    EmdenPlane,
    HJPlane,
    LotkaVolterra,
    OneD,
    Params,
    PhasePoint,
    SystemTag,
    TripleTheta,
    TripleV,
    TripleXV,
    ZofU,
    derive_constants,
)
from .errors import ComplexEigenvalueSelected, InvalidState, NotAFixedPoint, WrongTag

__all__ = [
    "SystemTag",
    "Stability",
    "EquilibriumReport",
    "rhs",
    "rhs_array",
    "jacobian",
    "numerical_jacobian",
    "equilibria",
    "linearize",
    "manifold_seed",
    "emden_char_poly",
    "lv_p0",
]

EXP_CAP = 700.0


def _e(a):
    return math.exp(min(a, EXP_CAP))


def _sign(phi, s):
    if s is not None:
        return float(s)
    return 1.0 if phi >= 0 else -1.0


def _pw(a, k):
    a = abs(a)
    return math.exp(k * math.log(a)) if a > 0 else 0.0


# ---------------------------------------------------------------------------
# right-hand sides on raw arrays

def rhs_array(tag: SystemTag, y, t: float, params: Params, *, s: int | None = None,
              frozen: bool = False) -> np.ndarray:
    """Tangent vector for the raw state ``y`` (component order of the point class)."""
    N, M, q = params.N, params.M, params.q
    if tag is SystemTag.EMDEN_PLANE or (tag is SystemTag.NON_AUT_X and frozen):
        x, phi = y
        return np.array([x * (2 - phi), x + (2 - N) * phi])
    if tag is SystemTag.NON_AUT_X:
        x, phi = y
        return np.array([x * (2 - phi), (2 - N) * phi - M * _e((2 - q) * t) * _pw(phi, q) + x])
    if tag is SystemTag.NON_AUT_XQ:
        X, phi = y
        th = 0.0 if frozen else _e((2 - q) * t)
        return np.array([X * (q - phi), (2 - N) * phi + th * (X - M * _pw(phi, q))])
    if tag is SystemTag.TRIPLE_V:
        x, phi, V = y
        sg = _sign(phi, s)
        return np.array([
            x * (2 - phi),
            (2 - N) * phi - M * abs(phi) * V + x,
            V * (N - (N - 1) * q - (q - 1) * (M * V * sg - x / phi)),
        ])
    if tag is SystemTag.TRIPLE_XV:
        X, phi, V = y
        sg = _sign(phi, s)
        g = M - X / _pw(phi, q)
        return np.array([
            X * (q - phi),
            (2 - N) * phi - V * abs(phi) * g,
            V * (N - (N - 1) * q - (q - 1) * g * sg * V),
        ])
    if tag is SystemTag.TRIPLE_THETA:
        x, phi, th = y
        return np.array([x * (2 - phi), x + (2 - N) * phi - M * _pw(phi, q) * th, (2 - q) * th])
    if tag is SystemTag.LOTKA_VOLTERRA:
        Z, V, phi = y
        sg = _sign(phi, s)
        return np.array([
            Z * (N - phi + sg * M * V - Z),
            V * (N - (N - 1) * q + (q - 1) * (Z - sg * M * V)),
            phi * (2 - N + Z - sg * M * V),
        ])
    if tag is SystemTag.HJ:
        xi, eta = y
        dc = derive_constants(params)
        forcing = 0.0
        if not frozen:
            forcing = _e(q * t / (q - 1) - _e(-dc.beta * t) * xi)
        return np.array([dc.beta * xi - eta, -dc.kappa * eta + M * _pw(eta, q) - forcing])
    if tag is SystemTag.ONE_D:
        u, v = y
        return np.array([-v, _e(u) - M * _pw(v, q)])
    if tag is SystemTag.ZOF_U:
        z, r = y
        return np.array([2 * M * _pw(z, q / 2) - 2 * _e(t), -1.0 / math.sqrt(z)])
    if tag is SystemTag.APPENDIX_VARPI:
        w, r = y
        u = t
        theta = (q - 2) / q
        return np.array([
            -w / q + (N - 1) / (r * _e(u / q)) + _e(theta * u) * (M * _pw(w, q) - 1) / w,
            -_e(-u / q) / w,
        ])
    raise WrongTag(f"unknown system {tag!r}")


def rhs(tag: SystemTag, point: PhasePoint, t: float, params: Params, *, s: int | None = None,
        frozen: bool = False) -> np.ndarray:
    """Tangent of ``tag`` at ``point``; ``t`` is the system's independent variable."""
    if not isinstance(point, tag.point_class):
        raise WrongTag(f"{tag.name} expects {tag.point_class.__name__}, got {type(point).__name__}")
    return rhs_array(tag, point.as_array(), t, params, s=s, frozen=frozen)


# ---------------------------------------------------------------------------
# analytic Jacobians (of the frozen limit for non-autonomous systems)

def jacobian(tag: SystemTag, y, params: Params, *, t: float = 0.0, s: int | None = None,
             frozen: bool = True) -> np.ndarray:
    """Hand-coded Jacobian with respect to the state at ``y``."""
    N, M, q = params.N, params.M, params.q
    y = np.asarray(y, dtype=float)

    def dpw(a, k):  # d/da |a|^k
        if a == 0:
            return 0.0
        return k * _pw(a, k - 1) * (1.0 if a > 0 else -1.0)

    if tag is SystemTag.EMDEN_PLANE or (tag is SystemTag.NON_AUT_X and frozen):
        x, phi = y
        return np.array([[2 - phi, -x], [1.0, 2.0 - N]])
    if tag is SystemTag.NON_AUT_X:
        x, phi = y
        e = _e((2 - q) * t)
        return np.array([[2 - phi, -x], [1.0, 2 - N - M * e * dpw(phi, q)]])
    if tag is SystemTag.NON_AUT_XQ:
        X, phi = y
        e = 0.0 if frozen else _e((2 - q) * t)
        return np.array([[q - phi, -X], [e, 2 - N - e * M * dpw(phi, q)]])
    if tag is SystemTag.TRIPLE_THETA:
        x, phi, th = y
        return np.array([
            [2 - phi, -x, 0.0],
            [1.0, 2 - N - M * dpw(phi, q) * th, -M * _pw(phi, q)],
            [0.0, 0.0, 2 - q],
        ])
    if tag is SystemTag.LOTKA_VOLTERRA:
        Z, V, phi = y
        sg = _sign(phi, s)
        return np.array([
            [N - phi + sg * M * V - 2 * Z, sg * M * Z, -Z],
            [(q - 1) * V, N - (N - 1) * q + (q - 1) * Z - 2 * (q - 1) * sg * M * V, 0.0],
            [phi, -sg * M * phi, 2 - N + Z - sg * M * V],
        ])
    if tag is SystemTag.TRIPLE_V:
        x, phi, V = y
        sg = _sign(phi, s)
        a = N - (N - 1) * q - (q - 1) * (M * V * sg - x / phi)
        return np.array([
            [2 - phi, -x, 0.0],
            [1.0, 2 - N - M * sg * V, -M * abs(phi)],
            [V * (q - 1) / phi, -V * (q - 1) * x / phi**2, a - (q - 1) * M * sg * V],
        ])
    if tag is SystemTag.TRIPLE_XV:
        X, phi, V = y
        sg = _sign(phi, s)
        P = _pw(phi, q)
        g = M - X / P
        dg_dphi = X * dpw(phi, q) / P**2
        return np.array([
            [q - phi, -X, 0.0],
            [V * abs(phi) / P, 2 - N - V * (sg * g + abs(phi) * dg_dphi), -abs(phi) * g],
            [V * V * (q - 1) * sg / P, -(q - 1) * sg * V * V * dg_dphi,
             N - (N - 1) * q - 2 * (q - 1) * g * sg * V],
        ])
    if tag is SystemTag.HJ:
        xi, eta = y
        dc = derive_constants(params)
        J = np.array([[dc.beta, -1.0], [0.0, -dc.kappa + M * dpw(eta, q)]])
        if not frozen:
            f = _e(q * t / (q - 1) - _e(-dc.beta * t) * xi)
            J[1, 0] += f * _e(-dc.beta * t)
        return J
    if tag is SystemTag.ONE_D:
        u, v = y
        return np.array([[0.0, -1.0], [_e(u), -M * dpw(v, q)]])
    if tag is SystemTag.ZOF_U:
        z, r = y
        return np.array([[2 * M * dpw(z, q / 2), 0.0], [0.5 * z ** -1.5, 0.0]])
    if tag is SystemTag.APPENDIX_VARPI:
        w, r = y
        u = t
        theta = (q - 2) / q
        et = _e(theta * u)
        return np.array([
            [-1 / q + et * (M * (q - 1) * _pw(w, q - 2) + 1 / w**2), -(N - 1) / (r * r * _e(u / q))],
            [_e(-u / q) / w**2, 0.0],
        ])
    raise WrongTag(f"unknown system {tag!r}")


def numerical_jacobian(tag: SystemTag, y, params: Params, *, t: float = 0.0, s: int | None = None,
                       frozen: bool = True, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian, used as a cross-check of :func:`jacobian`."""
    y = np.asarray(y, dtype=float)
    J = np.empty((y.size, y.size))
    for j in range(y.size):
        # difference on the representable step (y_j + h) - (y_j - h), not on 2h
        yp, ym = y.copy(), y.copy()
        yp[j] += h
        ym[j] -= h
        J[:, j] = (rhs_array(tag, yp, t, params, s=s, frozen=frozen)
                   - rhs_array(tag, ym, t, params, s=s, frozen=frozen)) / (yp[j] - ym[j])
    return J


# ---------------------------------------------------------------------------
# equilibria

class Stability(enum.Enum):
    SINK = "Sink"
    SOURCE = "Source"
    SADDLE = "Saddle"
    NON_HYPERBOLIC = "NonHyperbolic"


@dataclass(frozen=True)
class EquilibriumReport:
    system: SystemTag
    name: str
    location: PhasePoint
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, unit length
    classification: Stability
    residual: float
    limit_system: bool = False
    branch: int | None = None
    notes: tuple[str, ...] = ()

    def char_poly_residuals(self) -> np.ndarray:
        c = np.poly(self.jacobian)
        return np.abs(np.polyval(c, self.eigenvalues))

    def to_dict(self) -> dict:
        return {
            "system": self.system.name.lower().replace("_", "-"),
            "name": self.name,
            "location": self.location.to_dict(),
            "jacobian": self.jacobian.tolist(),
            "eigenvalues": [[float(l.real), float(l.imag)] for l in self.eigenvalues],
            "eigenvectors": [[[float(c.real), float(c.imag)] for c in col] for col in self.eigenvectors.T],
            "classification": self.classification.value,
            "residual": self.residual,
            "limit_system": self.limit_system,
            "branch": self.branch,
            "notes": list(self.notes),
        }


def _classify(ev: np.ndarray, tol: float = 1e-12) -> Stability:
    re = ev.real
    if np.any(np.abs(re) <= tol):
        return Stability.NON_HYPERBOLIC
    if np.all(re < 0):
        return Stability.SINK
    if np.all(re > 0):
        return Stability.SOURCE
    return Stability.SADDLE


def _eig(J: np.ndarray):
    w, v = np.linalg.eig(J)
    order = sorted(range(len(w)), key=lambda i: (-w[i].real, -w[i].imag))
    w, v = w[order], v[:, order]
    out_w = np.empty(len(w), dtype=complex)
    out_v = np.empty(v.shape, dtype=complex)
    for i in range(len(w)):
        vec = v[:, i]
        if abs(w[i].imag) <= 1e-12 * max(1.0, abs(w[i])):
            w_i = complex(w[i].real, 0.0)
            vec = vec.real.astype(complex)
        else:
            w_i = w[i]
        vec = vec / np.linalg.norm(vec)
        # deterministic orientation: largest component positive (real part)
        k = int(np.argmax(np.abs(vec)))
        if vec[k].real < 0:
            vec = -vec
        out_w[i], out_v[:, i] = w_i, vec
    return out_w, out_v


def lv_p0(params: Params) -> tuple[float, int] | None:
    """(V0, branch s) of the Lotka-Volterra equilibrium (0, V0, 0), or None."""
    kappa = derive_constants(params).kappa
    if kappa == 0:
        return None
    s = -1 if kappa > 0 else 1
    return -s * kappa / params.M, s


def _report(tag, name, y, params, *, t=0.0, s=None, frozen=False, notes=()) -> EquilibriumReport:
    cls = tag.point_class
    loc = cls.from_array(y)
    res = float(np.max(np.abs(rhs_array(tag, y, t, params, s=s, frozen=frozen))))
    J = jacobian(tag, y, params, t=t, s=s, frozen=frozen or not tag.autonomous)
    w, v = _eig(J)
    return EquilibriumReport(tag, name, loc, J, w, v, _classify(w), res,
                             limit_system=not tag.autonomous, branch=s, notes=tuple(notes))


def equilibria(tag: SystemTag, params: Params) -> list[EquilibriumReport]:
    """Fixed points of ``tag`` (of its frozen limit if non-autonomous)."""
    N, M, q = params.N, params.M, params.q
    out: list[EquilibriumReport] = []
    frozen = not tag.autonomous
    if tag in (SystemTag.EMDEN_PLANE, SystemTag.NON_AUT_X):
        out.append(_report(tag, "O", [0.0, 0.0], params, frozen=frozen))
        if N >= 3:
            out.append(_report(tag, "Emden", [2.0 * (N - 2), 2.0], params, frozen=frozen))
    elif tag is SystemTag.NON_AUT_XQ:
        out.append(_report(tag, "O", [0.0, 0.0], params, frozen=True,
                           notes=("frozen limit e^((2-q)t) -> 0",)))
    elif tag is SystemTag.TRIPLE_THETA:
        out.append(_report(tag, "O", [0.0, 0.0, 0.0], params))
        if N >= 3:
            out.append(_report(tag, "Emden", [2.0 * (N - 2), 2.0, 0.0], params))
    elif tag is SystemTag.TRIPLE_V:
        if N >= 3:
            out.append(_report(tag, "Emden", [2.0 * (N - 2), 2.0, 0.0], params))
    elif tag is SystemTag.TRIPLE_XV:
        if N == 2:
            out.append(_report(tag, "Eikonal", [M * q**q, q, 0.0], params,
                               notes=("member of the line {Phi = q, V = 0} of equilibria",)))
    elif tag is SystemTag.LOTKA_VOLTERRA:
        out.append(_report(tag, "O", [0.0, 0.0, 0.0], params, s=1))
        if N >= 3:
            out.append(_report(tag, "Q0", [N - 2.0, 0.0, 2.0], params))
        out.append(_report(tag, "N0", [float(N), 0.0, 0.0], params, s=1))
        p0 = lv_p0(params)
        if p0 is not None:
            V0, s = p0
            out.append(_report(tag, "P0", [0.0, V0, 0.0], params, s=s,
                               notes=(f"branch s = {s:+d} makes V0 = -s((N-1)q-N)/(M(q-1)) positive",)))
    elif tag is SystemTag.HJ:
        out.append(_report(tag, "O", [0.0, 0.0], params, frozen=True))
        dc = derive_constants(params)
        if dc.kappa > 0 and q < 2:
            eta = (dc.kappa / M) ** (1 / (q - 1))
            out.append(_report(tag, "HJ", [eta / dc.beta, eta], params, frozen=True,
                               notes=("frozen limit t -> -infinity",)))
    # ONE_D, ZOF_U, APPENDIX_VARPI have no (frozen) equilibria
    return out


def linearize(tag: SystemTag, params: Params, at: PhasePoint, *, s: int | None = None,
              tol: float = 1e-10) -> EquilibriumReport:
    if not isinstance(at, tag.point_class):
        raise WrongTag(f"{tag.name} expects {tag.point_class.__name__}")
    y = at.as_array()
    frozen = not tag.autonomous
    res = float(np.max(np.abs(rhs_array(tag, y, 0.0, params, s=s, frozen=frozen))))
    if res > tol * max(1.0, float(np.max(np.abs(y)))):
        raise NotAFixedPoint(f"|rhs| = {res:.3g} at {at}")
    return _report(tag, "user", y, params, s=s, frozen=frozen)


def manifold_seed(report: EquilibriumReport, index: int, amplitude: float, sign: int = 1) -> PhasePoint:
    """location + amplitude * sign * eigenvector[index].

    For (x, Phi, Theta) coordinates the eigenvector is oriented so that the
    Theta component is nonnegative (Theta = r^(2-q) > 0); ``sign`` then only
    applies to eigenvectors inside the plane Theta = 0.
    """
    lam = report.eigenvalues[index]
    if abs(lam.imag) > 1e-12:
        raise ComplexEigenvalueSelected(f"eigenvalue {lam} is complex; spiral manifolds are not seeded")
    loc = report.location.as_array()
    if amplitude < 0 or amplitude > 1e-4 * (1 + np.linalg.norm(loc)):
        raise InvalidState("amplitude must lie in [0, 1e-4 (1 + |location|)]")
    v = report.eigenvectors[:, index].real.copy()
    if isinstance(report.location, TripleTheta) and abs(v[2]) > 0:
        v = v if v[2] > 0 else -v
        sign = 1
    return type(report.location).from_array(loc + amplitude * sign * v)


def emden_char_poly(N: int, q: float) -> np.ndarray:
    """Coefficients of (2-q-l)(l^2+(N-2)l+2(N-2)) in descending powers of l, as det(A - l I)."""
    return np.polymul([-1.0, 2.0 - q], [1.0, N - 2.0, 2.0 * (N - 2)])
