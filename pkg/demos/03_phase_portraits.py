"""
Equilibria of the autonomous reformulations
===========================================

The substitution t = ln r turns the radial equation into autonomous systems
whose equilibria encode the possible behaviours.  At the Emden point
(2(N-2), 2, 0) the spectrum is {2-q} together with the roots of
l^2 + (N-2) l + 2(N-2); the pair is complex for N < 10 and real for N > 10.
"""

import numpy as np

from radsing import Params, SystemTag, equilibria

for N in (3, 6, 9, 10, 11):
    rep = [e for e in equilibria(SystemTag.TRIPLE_THETA, Params(N, 1.0, 3.0)) if e.name == "Emden"][0]
    ev = np.sort_complex(rep.eigenvalues)
    print(f"N={N:2d}: eigenvalues {np.round(ev, 6)}  ({rep.classification.value})")

print("\nLotka-Volterra system, N=3, q=3")
for rep in equilibria(SystemTag.LOTKA_VOLTERRA, Params(3, 1.0, 3.0)):
    print(f"  {rep.name:>6}: at {np.round(rep.location.as_array(), 4)}, eigenvalues {np.round(rep.eigenvalues, 4)}")

print("\nHJ system, N=3, q=1.75 (frozen forcing)")
for rep in equilibria(SystemTag.HJ, Params(3, 1.0, 1.75)):
    print(f"  {rep.name:>6}: at {np.round(rep.location.as_array(), 4)}, eigenvalues {np.round(rep.eigenvalues, 4)}")
