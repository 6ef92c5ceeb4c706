"""
Behaviour at infinity and energy functions
==========================================

Regular solutions are global and decreasing.  At infinity they behave like
the Emden solution 2(N-2)/r^2 when q > 2 and like the eikonal profile when
1 < q < 2.  Along the way the energy H = e^u + u'^2/2 decreases.
"""

import numpy as np

from radsing import (
    Params,
    RadialState,
    classify_infinity,
    diagnostics,
    integrate,
    regular_seed_radius,
    seed_regular,
)

for q in (3.0, 1.5):
    P = Params(3, 1.0, q)
    prof = integrate(P, seed_regular(P, 0.0, regular_seed_radius(P, 0.0)), 1e3)
    cl = classify_infinity(prof, P)
    s = prof.outer
    print(f"q={q}: {cl.regime.value}, constants {cl.constants}")
    print(f"      r^min(2,q) e^u at r=1e3: {s.r ** min(2, q) * np.exp(s.u):.4f}, r u' = {s.r * s.p:.4f}")
    H = diagnostics(prof, P).H
    print(f"      H from {H[0]:.4f} to {H[-1]:.3e}, largest increase {np.max(np.diff(H)):.1e}")

# a global trajectory for 1 < q < 2 starting from arbitrary data
rng = np.random.default_rng(0)
P = Params(1, 1.0, 1.5)
for u0, p0 in rng.uniform(-2, 2, size=(3, 2)):
    prof = integrate(P, RadialState(1.0, u0, p0), 1e-6)
    print(f"start (u, u') = ({u0:+.3f}, {p0:+.3f}) at r=1: reaches r={prof.r[0]:.1e}, {prof.termination.kind.value}")
