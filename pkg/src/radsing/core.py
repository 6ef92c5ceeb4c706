"""Parameters, closed-form constants and coordinate changes.

The radial problem is

    -u'' - (N-1)/r u' + M |u'|^q = e^u,        r > 0,

with N >= 1, M > 0, q > 1 and q != 2.  With t = ln r the solution can be
encoded in several scaled coordinate systems; this module holds the exact
algebraic maps between a radial state (r, u, u') and each of them.

Coordinates (r = e^t, p = u'):

    x = r^2 e^u         X = r^q e^u         Phi = -r p
    V = r |p|^(q-1)     Z = -r e^u / p      Theta = r^(2-q)
    xi = -r^beta u      eta = r^(beta+1) p  (Hamilton-Jacobi scaling)
    v = -p              (one-dimensional plane)
    z = p^2             (r as a function of u)
    varpi = -p e^(-u/q) (r as a function of u, normalised)
"""

from __future__ import annotations

import enum
import math
from dataclasses import astuple, dataclass, fields
from typing import ClassVar

import numpy as np

from .errors import CriticalPoint, ExcludedExponent, InvalidParams, InvalidState, WrongTag

__all__ = [
    "Params",
    "DerivedConstants",
    "RadialState",
    "PhasePoint",
    "EmdenPlane",
    "EikonalPlane",
    "TripleV",
    "TripleXV",
    "TripleTheta",
    "LotkaVolterra",
    "HJPlane",
    "OneD",
    "ZofU",
    "AppendixVarpi",
    "SystemTag",
    "derive_constants",
    "to_phase",
    "from_phase",
    "eikonal_profile",
    "eikonal_u",
    "residual",
    "power_abs",
]


def power_abs(p, q: float):
    """|p|^q computed as exp(q ln|p|), with value 0 at p = 0."""
    a = np.abs(np.asarray(p, dtype=float))
    with np.errstate(divide="ignore"):
        out = np.where(a > 0.0, np.exp(q * np.log(np.where(a > 0.0, a, 1.0))), 0.0)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class Params:
    """The triple (N, M, q)."""

    N: int
    M: float = 1.0
    q: float = 3.0

    def __post_init__(self):
        n = self.N
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise InvalidParams(f"N must be an integer >= 1, got {n!r}")
        object.__setattr__(self, "N", int(n))
        object.__setattr__(self, "M", float(self.M))
        object.__setattr__(self, "q", float(self.q))
        if not (math.isfinite(self.M) and self.M > 0):
            raise InvalidParams(f"M must be a finite positive number, got {self.M!r}")
        if not (math.isfinite(self.q) and self.q > 1):
            raise InvalidParams(f"q must be a finite number > 1, got {self.q!r}")
        if self.q == 2.0:
            raise ExcludedExponent("q = 2 is excluded: the equation is not treated in that case")

    def to_dict(self) -> dict:
        return {"N": self.N, "M": self.M, "q": self.q}

    @classmethod
    def from_dict(cls, d: dict) -> "Params":
        return cls(N=int(d["N"]), M=float(d["M"]), q=float(d["q"]))


@dataclass(frozen=True)
class DerivedConstants:
    """Closed-form constants; ``None`` marks a constant outside its domain."""

    q_c: float | None
    beta: float
    theta: float | None
    kappa: float
    xi_M: float | None
    Lambda: float
    emden_x: float
    emden_phi: float

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def derive_constants(params: Params) -> DerivedConstants:
    N, M, q = params.N, params.M, params.q
    q_c = N / (N - 1) if N >= 2 else None
    beta = (2 - q) / (q - 1)
    theta = (q - 2) / q if q > 2 else None
    kappa = ((N - 1) * q - N) / (q - 1)
    xi_M = None
    if q_c is not None and q_c < q < 2:
        xi_M = ((q - 1) / (2 - q)) * (kappa / M) ** (1 / (q - 1))
    Lambda = math.log(M) + q * math.log(q)
    return DerivedConstants(
        q_c=q_c,
        beta=beta,
        theta=theta,
        kappa=kappa,
        xi_M=xi_M,
        Lambda=Lambda,
        emden_x=2.0 * (N - 2),
        emden_phi=2.0,
    )


@dataclass(frozen=True)
class RadialState:
    """A point (r, u, u') of a radial trajectory."""

    r: float
    u: float
    p: float

    def __post_init__(self):
        for name in ("r", "u", "p"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (math.isfinite(self.r) and math.isfinite(self.u) and math.isfinite(self.p)):
            raise InvalidState(f"non-finite radial state {self!r}")
        if self.r <= 0:
            raise InvalidState(f"radius must be positive, got r={self.r!r}")

    @property
    def t(self) -> float:
        return math.log(self.r)


# ---------------------------------------------------------------------------
# phase points

class PhasePoint:
    """Base class of the phase coordinate variants.

    Subclasses are frozen dataclasses whose field order is the component order
    of the state vector used by the right-hand sides.
    """

    _nonneg: ClassVar[tuple[str, ...]] = ()
    dim: ClassVar[int] = 2

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not math.isfinite(v):
                raise InvalidState(f"{type(self).__name__}.{f.name} is not finite")
            object.__setattr__(self, f.name, v)
        for name in self._nonneg:
            if getattr(self, name) < 0:
                raise InvalidState(f"{type(self).__name__}.{name} must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, arr) -> "PhasePoint":
        return cls(*[float(a) for a in arr])

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def to_dict(self) -> dict:
        return {"coordinates": type(self).__name__, **{f.name: getattr(self, f.name) for f in fields(self)}}


@dataclass(frozen=True)
class EmdenPlane(PhasePoint):
    x: float
    Phi: float
    _nonneg: ClassVar[tuple[str, ...]] = ("x",)


@dataclass(frozen=True)
class EikonalPlane(PhasePoint):
    X: float
    Phi: float
    _nonneg: ClassVar[tuple[str, ...]] = ("X",)


@dataclass(frozen=True)
class TripleV(PhasePoint):
    x: float
    Phi: float
    V: float
    _nonneg: ClassVar[tuple[str, ...]] = ("x", "V")
    dim: ClassVar[int] = 3


@dataclass(frozen=True)
class TripleXV(PhasePoint):
    X: float
    Phi: float
    V: float
    _nonneg: ClassVar[tuple[str, ...]] = ("X", "V")
    dim: ClassVar[int] = 3


@dataclass(frozen=True)
class TripleTheta(PhasePoint):
    x: float
    Phi: float
    Theta: float
    _nonneg: ClassVar[tuple[str, ...]] = ("x", "Theta")
    dim: ClassVar[int] = 3


@dataclass(frozen=True)
class LotkaVolterra(PhasePoint):
    Z: float
    V: float
    Phi: float
    _nonneg: ClassVar[tuple[str, ...]] = ("V",)
    dim: ClassVar[int] = 3


@dataclass(frozen=True)
class HJPlane(PhasePoint):
    xi: float
    eta: float


@dataclass(frozen=True)
class OneD(PhasePoint):
    u: float
    v: float


@dataclass(frozen=True)
class ZofU(PhasePoint):
    """(z, r) with z = u'^2, parametrised by u (decreasing branch)."""

    z: float
    r: float
    _nonneg: ClassVar[tuple[str, ...]] = ("z", "r")


@dataclass(frozen=True)
class AppendixVarpi(PhasePoint):
    """(varpi, r) with u' = -varpi e^(u/q), parametrised by u."""

    varpi: float
    r: float
    _nonneg: ClassVar[tuple[str, ...]] = ("r",)


class SystemTag(enum.Enum):
    """Dynamical systems available in :mod:`radsing.phase_systems`.

    The value is (point class name, autonomous flag, independent variable).
    """

    EMDEN_PLANE = ("EmdenPlane", True, "t")
    NON_AUT_X = ("EmdenPlane", False, "t")
    NON_AUT_XQ = ("EikonalPlane", False, "t")
    TRIPLE_V = ("TripleV", True, "t")
    TRIPLE_XV = ("TripleXV", True, "t")
    TRIPLE_THETA = ("TripleTheta", True, "t")
    LOTKA_VOLTERRA = ("LotkaVolterra", True, "t")
    HJ = ("HJPlane", False, "t")
    ONE_D = ("OneD", True, "r")
    ZOF_U = ("ZofU", False, "u")
    APPENDIX_VARPI = ("AppendixVarpi", False, "u")

    @property
    def point_class(self) -> type[PhasePoint]:
        return _POINT_CLASSES[self.value[0]]

    @property
    def autonomous(self) -> bool:
        return self.value[1]

    @property
    def variable(self) -> str:
        return self.value[2]

    @property
    def dim(self) -> int:
        return self.point_class.dim

    @classmethod
    def parse(cls, name: str) -> "SystemTag":
        key = name.strip().upper().replace("-", "_")
        aliases = {"TRIPLETHETA": "TRIPLE_THETA", "LV": "LOTKA_VOLTERRA", "EMDEN": "EMDEN_PLANE",
                   "ONED": "ONE_D", "ZOFU": "ZOF_U", "VARPI": "APPENDIX_VARPI"}
        key = aliases.get(key, key)
        try:
            return cls[key]
        except KeyError:
            raise WrongTag(f"unknown system {name!r}; choose from "
                           + ", ".join(t.name.lower().replace("_", "-") for t in cls)) from None


_POINT_CLASSES: dict[str, type[PhasePoint]] = {
    c.__name__: c
    for c in (EmdenPlane, EikonalPlane, TripleV, TripleXV, TripleTheta,
              LotkaVolterra, HJPlane, OneD, ZofU, AppendixVarpi)
}


def _resolve(kind) -> type[PhasePoint]:
    if isinstance(kind, SystemTag):
        return kind.point_class
    if isinstance(kind, type) and issubclass(kind, PhasePoint):
        return kind
    if isinstance(kind, str):
        if kind in _POINT_CLASSES:
            return _POINT_CLASSES[kind]
        return SystemTag.parse(kind).point_class
    raise WrongTag(f"cannot interpret {kind!r} as a coordinate system")


def to_phase(state: RadialState, kind, params: Params) -> PhasePoint:
    """Exact image of a radial state in the given coordinates."""
    cls = _resolve(kind)
    r, u, p = state.r, state.u, state.p
    q = params.q
    t = math.log(r)
    if cls is EmdenPlane:
        return EmdenPlane(math.exp(2 * t + u), -r * p)
    if cls is EikonalPlane:
        return EikonalPlane(math.exp(q * t + u), -r * p)
    if cls is TripleV:
        return TripleV(math.exp(2 * t + u), -r * p, r * power_abs(p, q - 1))
    if cls is TripleXV:
        return TripleXV(math.exp(q * t + u), -r * p, r * power_abs(p, q - 1))
    if cls is TripleTheta:
        return TripleTheta(math.exp(2 * t + u), -r * p, math.exp((2 - q) * t))
    if cls is LotkaVolterra:
        if p == 0:
            raise CriticalPoint("Z = -r e^u / u' is undefined where u' = 0")
        return LotkaVolterra(-r * math.exp(u) / p, r * power_abs(p, q - 1), -r * p)
    if cls is HJPlane:
        beta = (2 - q) / (q - 1)
        return HJPlane(-math.exp(beta * t) * u, math.exp((beta + 1) * t) * p)
    if cls is OneD:
        return OneD(u, -p)
    if cls is ZofU:
        if p >= 0:
            raise CriticalPoint("the z(u) coordinates describe strictly decreasing branches")
        return ZofU(p * p, r)
    if cls is AppendixVarpi:
        return AppendixVarpi(-p * math.exp(-u / q), r)
    raise WrongTag(f"unsupported coordinates {cls.__name__}")


def from_phase(point: PhasePoint, t: float, params: Params, *, u: float | None = None) -> RadialState:
    """Inverse of :func:`to_phase`.

    ``t`` is ln r.  The (z, r) and (varpi, r) coordinates carry r themselves
    and are parametrised by u, which must then be passed as ``u``.
    """
    q = params.q
    r = math.exp(t)
    if isinstance(point, (EmdenPlane, TripleV, TripleTheta)):
        return RadialState(r, math.log(point.x) - 2 * t, -point.Phi / r)
    if isinstance(point, (EikonalPlane, TripleXV)):
        return RadialState(r, math.log(point.X) - q * t, -point.Phi / r)
    if isinstance(point, LotkaVolterra):
        return RadialState(r, math.log(point.Z * point.Phi) - 2 * t, -point.Phi / r)
    if isinstance(point, HJPlane):
        beta = (2 - q) / (q - 1)
        return RadialState(r, -math.exp(-beta * t) * point.xi, math.exp(-(beta + 1) * t) * point.eta)
    if isinstance(point, OneD):
        return RadialState(r, point.u, -point.v)
    if isinstance(point, (ZofU, AppendixVarpi)):
        if u is None:
            raise InvalidState(f"{type(point).__name__} is parametrised by u; pass u=")
        if isinstance(point, ZofU):
            return RadialState(point.r, u, -math.sqrt(point.z))
        return RadialState(point.r, u, -point.varpi * math.exp(u / q))
    raise WrongTag(f"unsupported point {point!r}")


# ---------------------------------------------------------------------------
# eikonal profile and equation residual

def eikonal_u(params: Params, r):
    """U_eik(r) = ln(M q^q) - q ln r (vectorised)."""
    q = params.q
    return math.log(params.M) + q * math.log(q) - q * np.log(r)


def eikonal_profile(params: Params, r: float) -> RadialState:
    """Solution of M|u'|^q = e^u singular at 0."""
    if not r > 0:
        raise InvalidState("radius must be positive")
    return RadialState(r, float(eikonal_u(params, r)), -params.q / r)


def residual(params: Params, state: RadialState, upp: float) -> float:
    """-u'' - (N-1)/r u' + M|u'|^q - e^u for a supplied second derivative."""
    r, u, p = state.r, state.u, state.p
    return -upp - (params.N - 1) * p / r + params.M * power_abs(p, params.q) - math.exp(u)
