"""
Eikonal-type singular solutions, q > 2
======================================

For q > 2 the gradient term dominates near the origin and singular solutions
follow the eikonal profile U(r) = ln(M q^q / r^q).  In one dimension the
singular solution is found by shooting on the slope c = -u' at the level u = 0;
in higher dimension it is the increasing limit of regular solutions.
"""

import numpy as np

from radsing import (
    Params,
    classify_origin,
    eikonal_u,
    evaluate_expansion,
    expand,
    shoot_eikonal_1d,
    shoot_eikonal_nd,
)

# one dimension: bisection on the crossing slope
P1 = Params(1, 1.0, 3.0)
c_star, prof1 = shoot_eikonal_1d(P1)
print("N=1, q=3: c* =", c_star)
print("bisection steps:", prof1.meta["provenance"]["bisection_steps"])

r = np.geomspace(1e-6, 1e-2, 5)
u, p = prof1.dense_many(r)
print("r^3 e^u / 27 :", r**3 * np.exp(u) / 27)  # tends to 1
print("r u'         :", r * p)  # tends to -q

# three dimensions: limit of regular solutions with u(0) = n
P3 = Params(3, 1.0, 3.0)
prof3 = shoot_eikonal_nd(P3)
gaps = prof3.meta["provenance"]["gaps"]
print("\nN=3: sup-norm gaps between successive regular solutions")
print(np.array(gaps))

cl = classify_origin(prof3, P3)
print("classified as", cl.regime.value, "with constant", cl.constants)

# the singular solution sits above the eikonal profile; the series gives the gap
exp = expand(P3, 4)
print("\nexpansion coefficients a_k:", np.array(exp.a))
rr = np.geomspace(1e-4, 1e-2, 4)
u_num = prof3.dense_many(rr)[0]
for k in (0, 1, 2, 4):
    u_ser, _ = evaluate_expansion(exp, P3, rr, order=k)
    print(f"order {k}: max |u - series| = {np.max(np.abs(u_num - u_ser)):.2e}")
print("u - U_eik:", u_num - eikonal_u(P3, rr))
