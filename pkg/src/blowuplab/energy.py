"""Lyapunov-functional machinery in similarity variables.

For a state (w, w_s) on the unit ball the functionals are

    E0 = int_B [ 1/2 w_s^2 + 1/2 (1-r^2) w_r^2 + (p+1)/(p-1)^2 w^2 - |w|^(p+1)/(p+1) ]
    I  = -eta int_B w w_s + (eta N / 2) int_B w^2
    E  = E0 + I
    F  = E e^(-2 eta s)

Along solutions F is non-increasing and dissipates through two nonnegative
channels, a boundary flux int_dB (w_s - eta w)^2 and a bulk term
(eta(p-1)/(p+1)) int_B |w|^(p+1):

    dF/ds = -e^(-2 eta s) (boundary_dissipation + bulk_dissipation).

The identity checks below verify this, and the separate derivative identities
for E0 and I, by centered differencing of the functional series against the
quadrature of the right-hand sides.  Differencing stored snapshots keeps the
check independent of the solver's internal right-hand side.

For the constant state kappa0 everything has closed form: E0 = |B| kappa0^2/(p-1),
I = (eta N / 2)|B| kappa0^2, and the dissipation identity reduces to
2 eta E = eta^2 kappa0^2 |dB| + (eta(p-1)/(p+1)) kappa0^(p+1) |B|, exact because
|dB| = N |B| and kappa0^(p-1) = 2(p+1)/(p-1)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .grid import RadialGrid, boundary_value, integrate_ball
from .params import Params
from .states import SimilarityState, SimilarityTrajectory
from .stencils import gradient

__all__ = [
    "EnergyReport", "IdentityResidual",
    "energy_E0", "energy_I", "lyapunov_F", "energy_series",
    "check_dissipation_identity", "check_E0_derivative", "check_I_derivative",
    "positivity_check", "monotonicity_check", "write_energy_csv",
]


@dataclass(frozen=True)
class EnergyReport:
    """All functional values plus the two dissipation integrands at one instant."""

    s: float
    E0: float
    I: float
    E: float
    F: float
    boundary_dissipation: float
    bulk_dissipation: float


@dataclass
class IdentityResidual:
    """Residual series of a derivative identity, max-normalised by the functional scale."""

    name: str
    s: np.ndarray
    residual: np.ndarray
    scale: float

    @property
    def normalized_max(self) -> float:
        if len(self.residual) == 0:
            return 0.0
        return float(np.max(np.abs(self.residual)) / self.scale)


def _wr(state: SimilarityState, grid: RadialGrid) -> np.ndarray:
    return gradient(state.w, grid.h)


def energy_E0(state: SimilarityState, params: Params, grid: RadialGrid) -> float:
    """Conformal part of the energy (gradient terms carry the 1-r^2 weight)."""
    w, ws = state.w, state.ws
    wr = _wr(state, grid)
    p = params.p
    integrand = (
        0.5 * ws ** 2
        + 0.5 * (1.0 - grid.r ** 2) * wr ** 2
        + (p + 1.0) / (p - 1.0) ** 2 * w ** 2
        - np.abs(w) ** (p + 1.0) / (p + 1.0)
    )
    return integrate_ball(grid, integrand)


def energy_I(state: SimilarityState, params: Params, grid: RadialGrid) -> float:
    """Super-conformal correction -eta int w w_s + (eta N/2) int w^2."""
    w, ws = state.w, state.ws
    return (
        -params.eta * integrate_ball(grid, w * ws)
        + params.eta * params.N / 2.0 * integrate_ball(grid, w ** 2)
    )


def lyapunov_F(state: SimilarityState, params: Params, grid: RadialGrid) -> EnergyReport:
    """Assemble the full report, including both dissipation integrands.

    Also guards the Cauchy-Schwarz lower bound E >= -(1/(p+1)) int |w|^(p+1),
    which holds pointwise for eta in (0, N); a violation beyond rounding means
    the state is corrupt.
    """
    p = params
    e0 = energy_E0(state, p, grid)
    i_val = energy_I(state, p, grid)
    e = e0 + i_val
    f = e * math.exp(-2.0 * p.eta * state.s)
    wpp1 = integrate_ball(grid, np.abs(state.w) ** (p.p + 1.0))
    boundary = boundary_value(grid, (state.ws - p.eta * state.w) ** 2)
    bulk = p.eta * (p.p - 1.0) / (p.p + 1.0) * wpp1
    lower = -wpp1 / (p.p + 1.0)
    slack = 1e-9 * max(1.0, abs(e), abs(lower))
    if e < lower - slack:
        raise ValueError(
            f"energy bound violated at s={state.s}: E={e} < -int|w|^(p+1)/(p+1)={lower}"
        )
    return EnergyReport(
        s=state.s, E0=e0, I=i_val, E=e, F=f,
        boundary_dissipation=boundary, bulk_dissipation=bulk,
    )


def energy_series(traj: SimilarityTrajectory, params: Params, grid: RadialGrid) -> List[EnergyReport]:
    return [lyapunov_F(st, params, grid) for st in traj.states]


def _uniform_spacing(s: np.ndarray) -> float:
    if len(s) < 3:
        raise ValueError("identity checks need at least 3 snapshots")
    d = np.diff(s)
    if np.max(np.abs(d - d[0])) > 1e-9 * max(abs(d[0]), 1e-30):
        raise ValueError("identity checks need uniformly spaced snapshots")
    return float(d[0])


def check_dissipation_identity(traj: SimilarityTrajectory, params: Params,
                               grid: RadialGrid,
                               reports: Optional[Sequence[EnergyReport]] = None) -> IdentityResidual:
    """Centered dF/ds against -e^(-2 eta s)(boundary + bulk dissipation)."""
    if reports is None:
        reports = energy_series(traj, params, grid)
    s = np.array([rep.s for rep in reports])
    delta = _uniform_spacing(s)
    F = np.array([rep.F for rep in reports])
    diss = np.array([rep.boundary_dissipation + rep.bulk_dissipation for rep in reports])
    dF = (F[2:] - F[:-2]) / (2.0 * delta)
    residual = dF + np.exp(-2.0 * params.eta * s[1:-1]) * diss[1:-1]
    return IdentityResidual(
        name="dissipation", s=s[1:-1], residual=residual,
        scale=max(float(np.max(np.abs(F))), 1.0),
    )


def check_E0_derivative(traj: SimilarityTrajectory, params: Params,
                        grid: RadialGrid) -> IdentityResidual:
    """Centered dE0/ds against -int_dB w_s^2 + 2 eta int w_s^2 + 2 eta int w_s (y.grad w)."""
    eta = params.eta
    s = traj.times
    delta = _uniform_spacing(s)
    e0 = np.empty(len(traj.states))
    rhs = np.empty(len(traj.states))
    for j, st in enumerate(traj.states):
        e0[j] = energy_E0(st, params, grid)
        wr = _wr(st, grid)
        rhs[j] = (
            -boundary_value(grid, st.ws ** 2)
            + 2.0 * eta * integrate_ball(grid, st.ws ** 2)
            + 2.0 * eta * integrate_ball(grid, st.ws * grid.r * wr)
        )
    residual = (e0[2:] - e0[:-2]) / (2.0 * delta) - rhs[1:-1]
    return IdentityResidual(
        name="E0_derivative", s=s[1:-1], residual=residual,
        scale=max(float(np.max(np.abs(e0))), 1.0),
    )


def check_I_derivative(traj: SimilarityTrajectory, params: Params,
                       grid: RadialGrid) -> IdentityResidual:
    """Centered dI/ds against its energy-identity right-hand side."""
    eta = params.eta
    p = params.p
    s = traj.times
    delta = _uniform_spacing(s)
    i_val = np.empty(len(traj.states))
    rhs = np.empty(len(traj.states))
    for j, st in enumerate(traj.states):
        i_val[j] = energy_I(st, params, grid)
        wr = _wr(st, grid)
        e = energy_E0(st, params, grid) + i_val[j]
        rhs[j] = (
            2.0 * eta * e
            - 2.0 * eta * integrate_ball(grid, st.ws ** 2)
            - eta * (p - 1.0) / (p + 1.0) * integrate_ball(grid, np.abs(st.w) ** (p + 1.0))
            - 2.0 * eta * integrate_ball(grid, st.ws * grid.r * wr)
            - eta ** 2 * boundary_value(grid, st.w ** 2)
            + 2.0 * eta * boundary_value(grid, st.w * st.ws)
        )
    residual = (i_val[2:] - i_val[:-2]) / (2.0 * delta) - rhs[1:-1]
    return IdentityResidual(
        name="I_derivative", s=s[1:-1], residual=residual,
        scale=max(float(np.max(np.abs(i_val))), 1.0),
    )


def positivity_check(reports: Sequence[EnergyReport]) -> tuple[float, bool]:
    """min F over the trajectory; passes if >= -1e-6 * max(1, max F)."""
    F = np.array([rep.F for rep in reports])
    tol_pos = 1e-6 * max(1.0, float(np.max(F)))
    min_f = float(np.min(F))
    return min_f, bool(min_f >= -tol_pos)


def monotonicity_check(reports: Sequence[EnergyReport], grid: RadialGrid,
                       constant: float = 50.0) -> tuple[float, float, bool]:
    """Largest per-snapshot increase of F against the resolution-aware slack.

    tol_mono = constant * (h^2 + Delta^2) * Delta * max(1, max|F|); returns
    (max increase, tol_mono, passed).
    """
    s = np.array([rep.s for rep in reports])
    delta = _uniform_spacing(s)
    F = np.array([rep.F for rep in reports])
    tol = constant * (grid.h ** 2 + delta ** 2) * delta * max(1.0, float(np.max(np.abs(F))))
    max_rise = float(np.max(np.diff(F)))
    return max_rise, tol, bool(max_rise <= tol)


def write_energy_csv(path, reports: Sequence[EnergyReport],
                     residual: Optional[IdentityResidual] = None) -> None:
    from .io import write_csv

    res_by_s = {}
    if residual is not None:
        res_by_s = {float(sv): float(rv) for sv, rv in zip(residual.s, residual.residual)}
    rows = []
    for rep in reports:
        rows.append((
            rep.s, rep.E0, rep.I, rep.E, rep.F,
            rep.boundary_dissipation, rep.bulk_dissipation,
            res_by_s.get(rep.s, math.nan),
        ))
    write_csv(path, ("s", "E0", "I", "E", "F", "boundary_dissipation",
                     "bulk_dissipation", "identity_residual"), rows)
