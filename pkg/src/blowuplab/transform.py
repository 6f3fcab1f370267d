"""Self-similar change of variables between physical and similarity frames.

For a scaling time T0 the map is

    y = r / (T0 - t),   s = -log(T0 - t),   u(r, t) = (T0 - t)^(-2/(p-1)) w(y, s),

which sends the backward light cone of (0, T0) to the cylinder [0,1] x [s0, inf).
Both directions are implemented with piecewise-cubic interpolation in time and
radius; the time interpolation of the field uses the stored time derivative
(cubic Hermite), and radial derivatives are taken from the local cubic, one
order above the solvers' centered stencils.  The s-derivative of w is computed
from the exact chain rule

    w_s = lam^k ( lam (u_t - y u_r) - k u ),   lam = T0 - t,  k = 2/(p-1),

rather than by differencing in s, so transform error never couples snapshots.

Shifted frames T0 - delta are ordinary transforms; shift_frame additionally
remaps an existing similarity trajectory through the closed-form frame change
w~(y, s) = (1 + delta e^s)^(-k) w(y / (1 + delta e^s), -log(delta + e^(-s))).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .grid import RadialGrid
from .params import Params
from .states import (PhysicalState, PhysicalTrajectory, SimilarityState,
                     SimilarityTrajectory)

__all__ = ["to_similarity", "from_similarity", "shift_frame", "FrameError"]


class FrameError(ValueError):
    """Requested frame exceeds the source trajectory's coverage."""


# ---------------------------------------------------------------------------
# interpolation helpers (uniform grids)

def _cubic_base(x0: float, h: float, n: int, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    i = np.clip(np.floor((q - x0) / h).astype(int) - 1, 0, n - 4)
    xi = (q - (x0 + i * h)) / h
    return i, xi


def _lagrange4(values: np.ndarray, x0: float, h: float, q: np.ndarray,
               derivative: bool = False) -> np.ndarray:
    """Piecewise-cubic Lagrange interpolation of uniform samples (or its derivative)."""
    q = np.asarray(q, dtype=float)
    i, t = _cubic_base(x0, h, len(values), q)
    f0, f1, f2, f3 = (values[i + m] for m in range(4))
    if derivative:
        d0 = -((t - 2) * (t - 3) + (t - 1) * (t - 3) + (t - 1) * (t - 2)) / 6.0
        d1 = (t * (t - 2) + t * (t - 3) + (t - 2) * (t - 3)) / 2.0
        d2 = -(t * (t - 1) + t * (t - 3) + (t - 1) * (t - 3)) / 2.0
        d3 = (t * (t - 1) + t * (t - 2) + (t - 1) * (t - 2)) / 6.0
        return (f0 * d0 + f1 * d1 + f2 * d2 + f3 * d3) / h
    l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0
    l1 = t * (t - 2) * (t - 3) / 2.0
    l2 = -t * (t - 1) * (t - 3) / 2.0
    l3 = t * (t - 1) * (t - 2) / 6.0
    return f0 * l0 + f1 * l1 + f2 * l2 + f3 * l3


def _time_slice(times: np.ndarray, fields: list, dfields: list, t: float):
    """Cubic-in-time field and derivative-field slices at time t.

    The field is Hermite-interpolated from (field, dfield) on the bracketing
    interval; the derivative field is Lagrange-interpolated from its own
    samples on a 4-snapshot window.
    """
    n = len(times)
    j = int(np.searchsorted(times, t, side="right") - 1)
    j = min(max(j, 0), n - 2)
    dt = times[j + 1] - times[j]
    th = (t - times[j]) / dt
    h00 = (1 + 2 * th) * (1 - th) ** 2
    h10 = th * (1 - th) ** 2
    h01 = th * th * (3 - 2 * th)
    h11 = th * th * (th - 1)
    f = h00 * fields[j] + h01 * fields[j + 1] + dt * (h10 * dfields[j] + h11 * dfields[j + 1])

    i = min(max(j - 1, 0), n - 4)
    xi = (t - times[i]) / (times[i + 1] - times[i])
    l0 = -(xi - 1) * (xi - 2) * (xi - 3) / 6.0
    l1 = xi * (xi - 2) * (xi - 3) / 2.0
    l2 = -xi * (xi - 1) * (xi - 3) / 2.0
    l3 = xi * (xi - 1) * (xi - 2) / 6.0
    df = l0 * dfields[i] + l1 * dfields[i + 1] + l2 * dfields[i + 2] + l3 * dfields[i + 3]
    return f, df


# ---------------------------------------------------------------------------

def to_similarity(traj: PhysicalTrajectory, T0: float, s_samples: Sequence[float],
                  params: Params, sim_grid: RadialGrid) -> SimilarityTrajectory:
    """Transform a physical trajectory into the similarity frame at the given s values."""
    if len(traj.states) < 4:
        raise FrameError("need at least 4 physical snapshots for cubic interpolation")
    times = traj.times
    k = params.k
    us = [st.u for st in traj.states]
    uts = [st.ut for st in traj.states]
    pg = traj.grid
    out = SimilarityTrajectory(grid=sim_grid)
    for s in s_samples:
        lam = math.exp(-s)
        t = T0 - lam
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise FrameError(
                f"s={s} needs t={t}, outside trajectory coverage [{times[0]}, {times[-1]}]"
            )
        if lam > pg.R * (1 + 1e-12):
            raise FrameError(f"s={s} needs radius {lam}, beyond the physical grid R={pg.R}")
        u_t, ut_t = _time_slice(times, us, uts, t)
        x = lam * sim_grid.r
        uq = _lagrange4(u_t, 0.0, pg.h, x)
        urq = _lagrange4(u_t, 0.0, pg.h, x, derivative=True)
        utq = _lagrange4(ut_t, 0.0, pg.h, x)
        scale = lam ** k
        w = scale * uq
        ws = scale * (lam * (utq - sim_grid.r * urq) - k * uq)
        out.states.append(SimilarityState(s=s, w=w, ws=ws))
    return out


def from_similarity(traj: SimilarityTrajectory, T0: float, t_samples: Sequence[float],
                    params: Params, phys_grid: RadialGrid) -> PhysicalTrajectory:
    """Inverse transform onto a physical grid contained in the backward cone of (0, T0)."""
    if len(traj.states) < 4:
        raise FrameError("need at least 4 similarity snapshots for cubic interpolation")
    svals = traj.times
    k = params.k
    ws_list = [st.w for st in traj.states]
    wss_list = [st.ws for st in traj.states]
    sg = traj.grid
    out = PhysicalTrajectory(grid=phys_grid)
    for t in t_samples:
        mu = T0 - t
        if mu <= 0:
            raise FrameError(f"t={t} is not before the scaling time T0={T0}")
        s = -math.log(mu)
        if s < svals[0] - 1e-12 or s > svals[-1] + 1e-12:
            raise FrameError(f"t={t} needs s={s}, outside coverage [{svals[0]}, {svals[-1]}]")
        if phys_grid.R > mu * (1 + 1e-12):
            raise FrameError(f"physical grid R={phys_grid.R} leaves the cone radius {mu} at t={t}")
        w_s, ws_s = _time_slice(svals, ws_list, wss_list, s)
        y = phys_grid.r / mu
        wq = _lagrange4(w_s, 0.0, sg.h, y)
        wrq = _lagrange4(w_s, 0.0, sg.h, y, derivative=True)
        wsq = _lagrange4(ws_s, 0.0, sg.h, y)
        u = mu ** (-k) * wq
        ut = mu ** (-k - 1.0) * (k * wq + y * wrq + wsq)
        out.states.append(PhysicalState(t=t, u=u, ut=ut))
    return out


def shift_frame(traj: SimilarityTrajectory, delta: float, s_samples: Sequence[float],
                params: Params) -> SimilarityTrajectory:
    """Remap a similarity trajectory to the frame with scaling time T0 - delta.

    Implements w~(y,s) = c^(-k) w(y/c, -log(delta + e^(-s))) with c = 1 + delta e^s,
    including the chain-rule s-derivative.  The source trajectory must cover
    the remapped times -log(delta + e^(-s)).
    """
    if delta <= 0:
        raise FrameError("frame shift requires delta > 0")
    svals = traj.times
    k = params.k
    ws_list = [st.w for st in traj.states]
    wss_list = [st.ws for st in traj.states]
    sg = traj.grid
    out = SimilarityTrajectory(grid=sg)
    for s in s_samples:
        c = 1.0 + delta * math.exp(s)
        sigma = -math.log(delta + math.exp(-s))
        if sigma < svals[0] - 1e-12 or sigma > svals[-1] + 1e-12:
            raise FrameError(f"shifted s={s} needs source s={sigma}, outside coverage")
        w_s, ws_s = _time_slice(svals, ws_list, wss_list, sigma)
        y = sg.r / c
        wq = _lagrange4(w_s, 0.0, sg.h, y)
        wrq = _lagrange4(w_s, 0.0, sg.h, y, derivative=True)
        wsq = _lagrange4(ws_s, 0.0, sg.h, y)
        cf = c ** (-k)
        rate = delta * math.exp(s) / c
        w = cf * wq
        ws = cf * (-k * rate * wq - rate * y * wrq + wsq / c)
        out.states.append(SimilarityState(s=s, w=w, ws=ws))
    return out
