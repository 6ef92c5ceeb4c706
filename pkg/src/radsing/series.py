"""Order-n expansion of eikonal-type solutions for q > 2.

With M = 1, write u_r = -f(u), varpi = e^(-u/q) f and s = e^(-theta u),
theta = (q-2)/q.  Then

    dV/du = -(1+V)/q + (N-1)/(r e^(u/q)) + e^(theta u) ((1+V)^q - 1)/(1+V),   V = varpi - 1,
    dr/du = -e^(-u/q)/varpi,

and the ansatz V = sum A_k s^k gives, order by order in s,

    1/varpi      = sum B_k s^k,
    r e^(u/q)/q  = sum B_k s^k / (1 + k(q-2))          (termwise integration)
    q/(r e^(u/q)) = sum C_k s^k                        (reciprocal),

and A_n = -E_(n-1)/q where E_(n-1) is the s^(n-1) coefficient of the
balance evaluated with A_n = 0.  The r-space coefficients follow by
inverting r(u): with rho = r/q and y = e^(-u/q) one has rho = y R(y^(q-2)),
solved as y = rho Y(rho^(q-2)).

For general M, u(x) = u1(M^(1/(q-2)) x) + (2/(q-2)) ln M maps the M = 1
solution u1 to a solution with coefficient M, so a_k(M) = a_k(1) M^(-k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import binom

from .core import Params, RadialState, derive_constants, residual
from .errors import OrderOverflow, RadiusTooLarge, WindowViolation

__all__ = [
    "TruncatedSeries",
    "Expansion",
    "expand",
    "evaluate_expansion",
    "help_series",
    "expansion_residual",
    "self_test",
    "MAX_ORDER",
]

MAX_ORDER = 12


class TruncatedSeries:
    """Power series c_0 + c_1 s + ... + c_n s^n, truncated at order n."""

    __slots__ = ("c",)

    def __init__(self, coeffs, order: int | None = None):
        c = np.asarray(coeffs, dtype=float).ravel()
        n = len(c) - 1 if order is None else order
        out = np.zeros(n + 1)
        m = min(n + 1, len(c))
        out[:m] = c[:m]
        self.c = out

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @classmethod
    def constant(cls, a: float, order: int) -> "TruncatedSeries":
        return cls([a], order)

    @classmethod
    def variable(cls, order: int) -> "TruncatedSeries":
        return cls([0.0, 1.0], order)

    def __repr__(self):
        return f"TruncatedSeries({self.c.tolist()})"

    def __getitem__(self, k):
        return self.c[k]

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(float(other), self.order)

    def __add__(self, other):
        o = self._coerce(other)
        n = min(self.order, o.order)
        return TruncatedSeries(self.c[: n + 1] + o.c[: n + 1])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.c * float(other))
        n = min(self.order, other.order)
        return TruncatedSeries(np.convolve(self.c[: n + 1], other.c[: n + 1])[: n + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.c / float(other))
        return self * other.reciprocal()

    def shift(self, m: int) -> "TruncatedSeries":
        """Multiply by s^m (m > 0) or divide by s^-m (m < 0, needs vanishing low coefficients)."""
        n = self.order
        if m >= 0:
            return TruncatedSeries(np.concatenate([np.zeros(m), self.c])[: n + 1], n)
        if np.any(self.c[:-m] != 0):
            raise ValueError("division by s^k of a series with nonzero low-order terms")
        return TruncatedSeries(self.c[-m:], n + m)

    def reciprocal(self) -> "TruncatedSeries":
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("reciprocal of a series with zero constant term")
        n = self.order
        b = np.zeros(n + 1)
        b[0] = 1.0 / a[0]
        for k in range(1, n + 1):
            b[k] = -np.dot(a[1 : k + 1], b[k - 1 :: -1][:k]) / a[0]
        return TruncatedSeries(b)

    def power(self, alpha: float) -> "TruncatedSeries":
        """Real power by the J.C.P. Miller recurrence; needs c_0 > 0."""
        a = self.c
        if not a[0] > 0:
            raise ValueError("real power needs a positive constant term")
        n = self.order
        g = np.zeros(n + 1)
        g[0] = a[0] ** alpha
        for k in range(1, n + 1):
            j = np.arange(1, k + 1)
            g[k] = np.sum((alpha * j - k + j) * a[j] * g[k - j]) / (k * a[0])
        return TruncatedSeries(g)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(s)); inner must have zero constant term."""
        if inner.c[0] != 0:
            raise ValueError("composition needs an inner series with zero constant term")
        n = min(self.order, inner.order)
        inner = TruncatedSeries(inner.c, n)
        out = TruncatedSeries.constant(self.c[n] if n < len(self.c) else 0.0, n)
        for k in range(n - 1, -1, -1):
            out = out * inner + self.c[k]
        return out

    def log(self) -> "TruncatedSeries":
        a0 = self.c[0]
        if not a0 > 0:
            raise ValueError("log needs a positive constant term")
        n = self.order
        k = np.arange(1, n + 1)
        log1p = TruncatedSeries(np.concatenate([[0.0], (-1.0) ** (k + 1) / k]))
        return log1p.compose(self / a0 - 1.0) + math.log(a0)

    def __call__(self, x: float) -> float:
        return float(np.polyval(self.c[::-1], x))


def help_series(q: float, order: int) -> TruncatedSeries:
    """((1+V)^q - 1)/(1+V) as a series in V; equals q V (1 + g_1 V + ...)."""
    one_plus = TruncatedSeries([1.0, 1.0], order)
    return (one_plus.power(q) - 1.0) * one_plus.reciprocal()


@dataclass
class Expansion:
    n: int
    N: int
    q: float
    M: float
    A: list
    B: list
    C: list
    a: list
    b: list
    a_unit: list
    g: list
    normalization: dict = field(default_factory=dict)
    validation: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "order": self.n, "N": self.N, "q": self.q, "M": self.M,
            "A": self.A, "B": self.B, "C": self.C, "a": self.a, "b": self.b, "a_unit_M": self.a_unit,
            "g": self.g, "normalization": self.normalization, "validation": self.validation,
        }


def _balance(N: int, q: float, A: np.ndarray, n: int) -> TruncatedSeries:
    """Residual of the V-equation (right side minus left side), series in s to order n."""
    theta = (q - 2) / q
    V = TruncatedSeries(np.concatenate([[0.0], A]), n + 1)
    k = np.arange(n + 2)
    dV = TruncatedSeries(-theta * k * V.c)
    Binv = (1.0 + V).reciprocal()
    R = TruncatedSeries(Binv.c / (1 + k * (q - 2)))
    Cser = R.reciprocal()
    W = help_series(q, n + 1).compose(V).shift(-1)  # e^(theta u) W(V) = W(V)/s
    rhs = -(1.0 + V) / q + Cser * ((N - 1) / q) + W
    return TruncatedSeries((rhs - dV).c, n)


def expand(params: Params, n: int) -> Expansion:
    """Coefficients of the order-n expansion u = ln(M q^q / r^q) + sum_k a_k r^(k(q-2))."""
    N, M, q = params.N, params.M, params.q
    if not q > 2:
        raise WindowViolation("the eikonal expansion needs q > 2")
    if not 1 <= n <= MAX_ORDER:
        raise OrderOverflow(f"order must lie in [1, {MAX_ORDER}]; got {n}")
    A = np.zeros(n)
    for m in range(1, n + 1):
        E = _balance(N, q, A[: m - 1], m - 1)
        A[m - 1] = -E[m - 1] / q
    V = TruncatedSeries(np.concatenate([[0.0], A]), n)
    k = np.arange(n + 1)
    Binv = (1.0 + V).reciprocal()
    R = TruncatedSeries(Binv.c / (1 + k * (q - 2)))
    Cser = R.reciprocal()
    # invert rho = y R(y^(q-2)): Y = 1/R(sigma Y^(q-2)), one order per sweep
    sigma = TruncatedSeries.variable(n)
    Y = TruncatedSeries.constant(1.0, n)
    for _ in range(n + 1):
        Y = R.compose(sigma * Y.power(q - 2)).reciprocal()
    c_u = -q * Y.log()
    Yinv = Y.reciprocal()
    scale = q ** (-(q - 2) * k)
    a_unit = c_u.c * scale
    b_unit = Yinv.c * scale
    Mk = M ** (-k.astype(float))
    g = (help_series(q, n + 1).shift(-1) / q).c
    lam = M ** (1 / (q - 2))
    return Expansion(
        n=n, N=N, q=q, M=M,
        A=A.tolist(), B=Binv.c[1:].tolist(), C=Cser.c[1:].tolist(),
        a=(a_unit * Mk)[1:].tolist(), b=(b_unit * Mk)[1:].tolist(), a_unit=a_unit[1:].tolist(),
        g=g[1:].tolist(),
        normalization={
            "internal_M": 1.0, "lambda": lam, "shift": 2 * math.log(M) / (q - 2),
            "map": "u_1(x) = u_M(lambda x) + shift solves the M = 1 equation; a_k(M) = a_k(1) M^-k",
            "b_convention": "e^(u/q) = M^(1/q) (q/r) (1 + sum b_k r^(k(q-2)))",
        },
    )


def evaluate_expansion(exp: Expansion, params: Params, r, order: int | None = None):
    """(u, u') of the truncated expansion at r (scalar or array)."""
    q = params.q
    if (params.N, params.q, params.M) != (exp.N, exp.q, exp.M):
        raise WindowViolation("expansion was computed for different parameters")
    k_max = exp.n if order is None else int(order)
    if not 0 <= k_max <= exp.n:
        raise OrderOverflow(f"order {k_max} exceeds the expansion order {exp.n}")
    r = np.asarray(r, dtype=float)
    if exp.n >= 1 and np.any(abs(exp.a[0]) * r ** (q - 2) >= 0.1):
        raise RadiusTooLarge("need |a_1| r^(q-2) < 0.1")
    lam = derive_constants(params).Lambda
    u = lam - q * np.log(r)
    du = -q / r
    for k in range(1, k_max + 1):
        e = k * (q - 2)
        u = u + exp.a[k - 1] * r**e
        du = du + e * exp.a[k - 1] * r ** (e - 1)
    if u.ndim == 0:
        return float(u), float(du)
    return u, du


def expansion_residual(exp: Expansion, params: Params, r: float, order: int | None = None) -> float:
    """|-u'' - (N-1)u'/r + M|u'|^q - e^u| of the truncated expansion at r."""
    q = params.q
    k_max = exp.n if order is None else int(order)
    u, du = evaluate_expansion(exp, params, r, order=k_max)
    d2 = q / r**2
    for k in range(1, k_max + 1):
        e = k * (q - 2)
        d2 += e * (e - 1) * exp.a[k - 1] * r ** (e - 2)
    return abs(residual(params, RadialState(float(r), u, du), d2))


def self_test(seed: int = 0, degree: int = 6, tol: float = 1e-13) -> dict:
    """Series operations against brute-force coefficient convolution."""
    rng = np.random.default_rng(seed)
    f = TruncatedSeries(np.concatenate([[1.0 + rng.random()], rng.uniform(-1, 1, degree)]))
    inner = TruncatedSeries(np.concatenate([[0.0], rng.uniform(-1, 1, degree)]))
    outer = TruncatedSeries(rng.uniform(-1, 1, degree + 1))

    def conv(*ss):
        out = np.array([1.0])
        for s in ss:
            out = np.convolve(out, s.c)[: degree + 1]
        return out

    one = np.zeros(degree + 1)
    one[0] = 1.0
    checks = {}
    checks["reciprocal"] = float(np.max(np.abs(conv(f, f.reciprocal()) - one)))
    checks["power_integer"] = float(np.max(np.abs(f.power(3.0).c - conv(f, f, f))))
    checks["power_real"] = float(np.max(np.abs(conv(f.power(0.7), f.power(1.3)) - conv(f, f))))
    brute = np.zeros(degree + 1)
    p = np.array([1.0])
    for k in range(degree + 1):
        brute[: len(p[: degree + 1])] += outer.c[k] * p[: degree + 1]
        p = np.convolve(p, inner.c)[: degree + 1]
    checks["composition"] = float(np.max(np.abs(outer.compose(inner).c - brute)))
    zero = TruncatedSeries(np.zeros(degree + 1))
    checks["compose_zero"] = float(np.max(np.abs(outer.compose(zero).c - np.eye(1, degree + 1)[0] * outer.c[0])))
    qq = 3.7
    k = np.arange(degree + 1)
    checks["binomial"] = float(np.max(np.abs(TruncatedSeries([1.0, 1.0], degree).power(qq).c - binom(qq, k))))
    unit = TruncatedSeries([1.0, 1.0], degree)
    checks["unit_reciprocal"] = float(np.max(np.abs(conv(unit, unit.reciprocal()) - one)))
    # second-order help coefficient: ((1+V)^q - 1)/(1+V) = q V (1 + g_1 V + O(V^2)), g_1 = (q-3)/2
    v = 1e-5
    brute_h = ((1 + v) ** qq - 1) / (1 + v)
    g1 = (qq - 3) / 2
    checks["g1"] = float(abs(brute_h - qq * v * (1 + g1 * v)))
    checks["g1_series"] = float(abs(help_series(qq, 2).c[2] / qq - g1))
    return {"seed": seed, "degree": degree, "tol": tol, "errors": checks,
            "passed": all(v <= tol for v in checks.values())}
