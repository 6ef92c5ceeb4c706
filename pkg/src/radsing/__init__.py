"""Radial solutions of -u'' - (N-1)/r u' + M|u'|^q = e^u.

Integration of the radial ODE, its phase-plane reformulations, constructions
of the singular solution families, asymptotic classification at 0 and at
infinity, and the series expansion of eikonal-type solutions.
"""

__version__ = "0.1.0"

from .core import (
    Params,
    DerivedConstants,
    RadialState,
    PhasePoint,
    SystemTag,
    derive_constants,
    to_phase,
    from_phase,
    eikonal_u,
    eikonal_profile,
    residual,
)
from .radial_solver import (
    Event,
    IntegratorConfig,
    Profile,
    Termination,
    TerminationKind,
    integrate,
    find_event,
    seed_regular,
    regular_seed_radius,
    rhs_radial,
    profile_from_arrays,
    write_profile_csv,
    read_profile_csv,
)
from .phase_systems import EquilibriumReport, Stability, equilibria, linearize, manifold_seed, jacobian
from .constructors import (
    construct_emden_singular,
    construct_hj_subcritical,
    construct_dirac,
    dirac_window,
    shoot_eikonal_1d,
    shoot_eikonal_nd,
    construct_gradient_singular,
    classify_crossing,
)
from .asymptotics import (
    Regime,
    Classification,
    DiagnosticTrace,
    admissible_regimes,
    classify_origin,
    classify_infinity,
    diagnostics,
    audit_bounds,
)
from .series import TruncatedSeries, Expansion, expand, evaluate_expansion
from .errors import RadsingError
