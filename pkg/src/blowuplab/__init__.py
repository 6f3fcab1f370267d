"""Numerical laboratory for finite-time blow-up of the radial semilinear wave equation.

The package evolves u_tt = Lap u + |u|^(p-1) u (+ f(u)) in physical
coordinates and in self-similar variables on the unit ball, transforms between
the two frames, verifies the similarity-energy dissipation identities by
quadrature, and fits the growth/decay rates of the standard diagnostic
quantities near blow-up.
"""

from .params import Params, PerturbationSpec, make_params, ParameterError
from .grid import RadialGrid, make_grid, integrate_ball, boundary_value
from .states import (PhysicalState, SimilarityState,
                     PhysicalTrajectory, SimilarityTrajectory)
from .physical import (InitialData, PhysicalRunConfig, BlowupEstimate,
                       step_physical, run_until_blowup, ode_exact_solution,
                       BlowupReached, NoBlowupDetected)
from .similarity import (SimilarityInitialData, SimilarityRunConfig,
                         step_similarity, run_similarity,
                         radial_operator_check, SimilarityBlowup)
from .transform import to_similarity, from_similarity, shift_frame, FrameError
from .energy import (EnergyReport, IdentityResidual, energy_E0, energy_I,
                     lyapunov_F, energy_series, check_dissipation_identity,
                     check_E0_derivative, check_I_derivative,
                     positivity_check, monotonicity_check, write_energy_csv)
from .analysis import (DiagnosticSeries, Verdict, fit_exponent,
                       vanishing_verdict, bounded_verdict, lower_bound_verdict,
                       physical_growth_diagnostics, lower_bound_diagnostic,
                       similarity_decay_diagnostics, write_diagnostics_csv)

__version__ = "0.1.0"
