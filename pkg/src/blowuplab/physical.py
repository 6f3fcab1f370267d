"""Explicit solver for the radial semilinear wave equation in physical coordinates.

Evolves

    u_tt = u_rr + (N-1)/r u_r + |u|^(p-1) u + f(u)

on a uniform grid over [0, R_dom] with velocity-Verlet (leapfrog) stepping,
second order in space and time.  The (N-1)/r term at the origin is replaced by
its regular limit, giving u_tt(0) = N u_rr(0) + ...; the outer boundary uses a
first-order outgoing (Sommerfeld) closure u_tt = -d_r u_t - (N-1)/(2R) u_t, so
R_dom should be chosen large enough (default 2x the expected blow-up time)
that the backward light cone of (0, T) never sees it.

Blow-up is detected by amplitude threshold / overflow; the blow-up time is
estimated from the asymptotically linear quantity z(t) = (sup|u|)^(-(p-1)/2),
fitted over the last resolved decade of growth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import RadialGrid
from .params import Params
from .states import PhysicalState, PhysicalTrajectory
from .stencils import gradient, second_derivative

__all__ = [
    "InitialData", "PhysicalRunConfig", "BlowupEstimate",
    "step_physical", "run_until_blowup", "ode_exact_solution",
    "BlowupReached", "NoBlowupDetected",
]


class BlowupReached(RuntimeError):
    """Stepping overflowed; carries the last finite state (not a failure)."""

    def __init__(self, last_state: PhysicalState):
        super().__init__(f"blow-up reached at t={last_state.t}")
        self.last_state = last_state


class NoBlowupDetected(RuntimeError):
    """Max steps reached with the amplitude still below the threshold."""


def ode_exact_solution(params: Params, T: float, t: float) -> tuple[float, float]:
    """Space-independent blow-up solution u = kappa0 (T-t)^(-2/(p-1)) and its du/dt."""
    k = params.k
    tau = T - t
    return params.kappa0 * tau ** (-k), params.kappa0 * k * tau ** (-k - 1.0)


@dataclass(frozen=True)
class InitialData:
    """Initial (u, u_t) generator: ode_exact{T}, gaussian_bump{amplitude,width,offset}, or custom."""

    kind: str = "gaussian_bump"
    T: float = 1.0
    amplitude: float = 1.0
    width: float = 0.25
    offset: float = 0.0
    u: Optional[np.ndarray] = None
    ut: Optional[np.ndarray] = None

    def build(self, params: Params, grid: RadialGrid) -> PhysicalState:
        r = grid.r
        if self.kind == "ode_exact":
            u0, ut0 = ode_exact_solution(params, self.T, 0.0)
            return PhysicalState(t=0.0, u=np.full_like(r, u0), ut=np.full_like(r, ut0))
        if self.kind == "gaussian_bump":
            # symmetrised so that u_r(0) = 0 even with a nonzero offset
            u = self.amplitude * (
                np.exp(-(((r - self.offset) / self.width) ** 2))
                + np.exp(-(((r + self.offset) / self.width) ** 2))
            ) / (1.0 + math.exp(-((2 * self.offset / self.width) ** 2) / 2))
            if self.offset == 0.0:
                u = self.amplitude * np.exp(-((r / self.width) ** 2))
            return PhysicalState(t=0.0, u=u, ut=np.zeros_like(r))
        if self.kind == "custom":
            if self.u is None or self.ut is None:
                raise ValueError("custom initial data needs explicit u and ut samples")
            return PhysicalState(t=0.0, u=np.asarray(self.u), ut=np.asarray(self.ut))
        raise ValueError(f"unknown initial data kind {self.kind!r}")


@dataclass(frozen=True)
class PhysicalRunConfig:
    """Run parameters for the physical-coordinates solver.

    dt must satisfy the CFL bound dt <= cfl_safety * h (unit wave speed,
    cfl_safety <= 0.9; the regularised origin row effectively wants
    dt <~ h/sqrt(N), so the default safety is 0.4).  include_nonlinearity=False
    freezes the linear free-wave problem for sanity checks.
    """

    params: Params
    grid: RadialGrid
    dt: float
    blowup_threshold: float = 1e8
    initial: InitialData = field(default_factory=InitialData)
    cfl_safety: float = 0.4
    max_steps: int = 2_000_000
    snapshot_stride: int = 1
    include_nonlinearity: bool = True

    def __post_init__(self):
        if not (0 < self.cfl_safety <= 0.9):
            raise ValueError(f"cfl_safety={self.cfl_safety} must lie in (0, 0.9]")
        if not (0 < self.dt <= self.cfl_safety * self.grid.h * (1 + 1e-12)):
            raise ValueError(
                f"dt={self.dt} violates the CFL bound {self.cfl_safety}*h={self.cfl_safety * self.grid.h}"
            )

    @staticmethod
    def with_cfl(params: Params, grid: RadialGrid, cfl_safety: float = 0.4, **kw) -> "PhysicalRunConfig":
        return PhysicalRunConfig(params=params, grid=grid, dt=cfl_safety * grid.h,
                                 cfl_safety=cfl_safety, **kw)

    def initial_state(self) -> PhysicalState:
        state = self.initial.build(self.params, self.grid)
        if state.amplitude >= self.blowup_threshold:
            raise ValueError("blowup_threshold must exceed the initial amplitude")
        return state


@dataclass(frozen=True)
class BlowupEstimate:
    """T_hat and growth exponent fitted from the trailing amplitude record.

    stopped_at is the last *resolved* time the fit trusted (the raw trajectory
    may extend a few further steps whose values are no longer meaningful, since
    an explicit scheme can step across the blow-up time before overflowing).
    """

    T_hat: float
    exponent_hat: float
    fit_residual: float
    stopped_at: float

    def __post_init__(self):
        if not (self.stopped_at < self.T_hat):
            raise ValueError("estimated blow-up time must exceed the last stable time")
        if not math.isfinite(self.fit_residual):
            raise ValueError("fit residual must be finite")


def _acceleration(u: np.ndarray, ut: np.ndarray, cfg: PhysicalRunConfig) -> np.ndarray:
    p = cfg.params
    grid = cfg.grid
    h = grid.h
    ur = gradient(u, h)
    urr = second_derivative(u, h)
    a = urr.copy()
    a[1:] += (p.N - 1) * ur[1:] / grid.r[1:]
    a[0] += (p.N - 1) * urr[0]
    if cfg.include_nonlinearity:
        a += p.nonlinearity(u)
    if p.perturbation.active:
        a += p.perturbation.evaluate(u)
    # outgoing closure at r = R_dom replaces the PDE row
    utr = gradient(ut, h)
    a[-1] = -utr[-1] - (p.N - 1) / (2.0 * grid.R) * ut[-1]
    return a


def _verlet(u: np.ndarray, ut: np.ndarray, cfg: PhysicalRunConfig) -> tuple[np.ndarray, np.ndarray]:
    dt = cfg.dt
    with np.errstate(over="ignore", invalid="ignore"):
        a0 = _acceleration(u, ut, cfg)
        ut_half = ut + 0.5 * dt * a0
        u1 = u + dt * ut_half
        a1 = _acceleration(u1, ut_half, cfg)
        ut1 = ut_half + 0.5 * dt * a1
    return u1, ut1


def step_physical(state: PhysicalState, cfg: PhysicalRunConfig) -> PhysicalState:
    """One velocity-Verlet step; raises BlowupReached on overflow/NaN."""
    u1, ut1 = _verlet(state.u, state.ut, cfg)
    if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(ut1))):
        raise BlowupReached(state)
    return PhysicalState(t=state.t + cfg.dt, u=u1, ut=ut1)


def run_until_blowup(cfg: PhysicalRunConfig) -> tuple[PhysicalTrajectory, BlowupEstimate]:
    """Integrate until the amplitude threshold trips, then fit T_hat and the growth exponent.

    Raises NoBlowupDetected if max_steps elapse below the threshold.
    """
    state0 = cfg.initial_state()
    traj = PhysicalTrajectory(grid=cfg.grid, states=[state0])
    u, ut = state0.u, state0.ut
    tripped = False
    for n in range(1, cfg.max_steps + 1):
        u_new, ut_new = _verlet(u, ut, cfg)
        t = n * cfg.dt
        if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(ut_new))):
            tripped = True  # overflow: keep the last finite state
            if traj.states[-1].t < (n - 1) * cfg.dt:
                traj.states.append(PhysicalState(t=(n - 1) * cfg.dt, u=u, ut=ut))
            break
        u, ut = u_new, ut_new
        amp = float(np.max(np.abs(u)))
        if n % cfg.snapshot_stride == 0 or amp > cfg.blowup_threshold:
            traj.states.append(PhysicalState(t=t, u=u, ut=ut))
        if amp > cfg.blowup_threshold:
            tripped = True
            break
    if not tripped:
        raise NoBlowupDetected(
            f"amplitude stayed below {cfg.blowup_threshold} for {cfg.max_steps} steps"
        )
    traj.blowup_signalled = True
    estimate = _fit_blowup(traj, cfg)
    return traj, estimate


def _fit_blowup(traj: PhysicalTrajectory, cfg: PhysicalRunConfig) -> BlowupEstimate:
    p = cfg.params.p
    times = traj.times
    sups = np.array([st.amplitude for st in traj.states])
    good = sups > 0
    if good.sum() < 8:
        raise NoBlowupDetected("too few positive-amplitude snapshots to fit")
    t, s = times[good], sups[good]
    z = s ** (-(p - 1.0) / 2.0)

    def linfit(tw, zw):
        b, a = np.polyfit(tw, zw, 1)
        return a, b

    # pass 1: rough root from the trailing half of the record
    half = max(8, len(t) // 2)
    a, b = linfit(t[-half:], z[-half:])
    if b >= 0:
        raise NoBlowupDetected("amplitude record is not growing")
    T_rough = -a / b

    # pass 2: last decade of growth, excluding the under-resolved final steps
    for guard in (8.0, 4.0, 2.0):
        resolved = (T_rough - t) >= guard * cfg.dt
        if resolved.sum() >= 8:
            break
    s_hi = s[resolved].max()
    window = resolved & (s >= s_hi / 10.0)
    if window.sum() < 8:
        window = resolved
    tw, zw = t[window], z[window]
    a, b = linfit(tw, zw)
    if b >= 0:
        raise NoBlowupDetected("trailing window is not growing")
    T_hat = -a / b
    residual = float(np.sqrt(np.mean((zw - (a + b * tw)) ** 2)))
    tau = T_hat - tw
    ok = tau > 0
    slope = np.polyfit(np.log(tau[ok]), np.log(s[window][ok]), 1)[0]
    return BlowupEstimate(
        T_hat=float(T_hat),
        exponent_hat=float(-slope),
        fit_residual=residual,
        stopped_at=float(tw[-1]),
    )
