"""
Singular solutions for 1 < q < 2
================================

Below q = 2 the diffusion dominates.  Three families appear as r -> 0:

* Emden type, r^2 e^u -> 2(N-2), built from the unstable manifold of an
  equilibrium of a three-dimensional autonomous system;
* HJ type, r^beta u -> -xi_M for N/(N-1) < q < 2, built by integrating a
  perturbed planar system backward in t = ln r;
* Dirac type, r^(N-2) u -> gamma < 0 for q < N/(N-1), a Picard fixed point.
"""

import numpy as np

from radsing import (
    Params,
    classify_origin,
    construct_dirac,
    construct_emden_singular,
    construct_hj_subcritical,
    derive_constants,
)

P = Params(3, 1.0, 1.5)
em = construct_emden_singular(P, (1e-6, 1e-2))
print("Emden type, N=3, q=1.5")
r = np.geomspace(1e-6, 1e-2, 5)
u, p = em.dense_many(r)
print("  r^2 e^u:", r**2 * np.exp(u))
print("  r u'   :", r * p)
print("  ->", classify_origin(em, P).regime.value)

P = Params(3, 1.0, 1.75)
dc = derive_constants(P)
print("\nHJ type, N=3, q=1.75: xi_M =", dc.xi_M, " beta =", dc.beta)
for data in [(0.0, 0.0), (dc.xi_M / 4, 0.0), (0.0, -dc.beta * dc.xi_M / 4)]:
    hj = construct_hj_subcritical(P, data)
    s = hj.inner
    print(f"  data {data}: r^beta u at r={s.r:.1e} is {s.r**dc.beta * s.u:.6f}")

P = Params(3, 1.0, 1.2)
di = construct_dirac(P, gamma=-0.01, rho=0.1)
hist = di.meta["picard"]
print("\nDirac type, N=3, q=1.2, gamma=-0.01, rho=0.1")
print("  Picard iterations:", len(hist))
print("  difference ratios:", np.round([h["ratio"] for h in hist[1:8]], 4))
print("  r u at the innermost node:", di.r[0] * di.u[0])
print("  ->", classify_origin(di, P).regime.value, classify_origin(di, P).constants)
