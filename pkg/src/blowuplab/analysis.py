"""Quantitative growth/decay diagnostics along trajectories, with exponent fits.

Physical-frame series (computed against the estimated blow-up time T):

    T1_L2(t)   = (T-t)^(-(p-1)N/(p+3)) int_{B(0,T-t)} u^2
    T2/T22(t)  = int_{tau in [T-t, T-t/2]} int_{B(0,(T-tau)/2)} (u_t^2 | u_r^2)
    T4(t)      = int_{tau in [T-t, T-t/2]} int_{B(0,T-tau)} (u_r^2 + u_t^2)
    LIMENER(t) = ((T-t)/2) int_{B(0,T-t)} [ (1-(r/(T-t))^2) u_r^2 + u_t^2 - |u|^(p+1)/(p+1) ]
    LOWER_BOUND(t) = (T-t)^k ||u|| / (T-t)^(N/2) + (T-t)^(k+1) (||u_t|| + ||u_r||) / (T-t)^(N/2)

Similarity-frame series (sliding unit windows in s where needed):

    COR1(s)   = e^(-2 eta s) int_s^(s+1) int_B (w_s^2 + (1-|y|^2) w_r^2)
    COR2(s)   = e^(-2 eta s) int_B |w|^((p+3)/2)
    COR3(s)   = e^(-8 eta s/(p+3)) int_B w^2
    E03BIS/E03(s) = e^(-2 eta s) int_s^(s+1) int_B (w_s^2 | w_r^2)
    E04(s)    = F(w, s)

"Tends to zero" claims are operationalised two ways and both must pass: the
tail value sits below a resolution-aware threshold, and the fitted decay rate
toward the limit point is strictly negative with r^2 > 0.95.  fit_exponent
itself reports the exponent in the model's natural variable: alpha for
value ~ (T-t)^alpha (power model) and lambda for value ~ e^(lambda s) (exp
model); the decay rate used by verdicts is -alpha resp. lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from .energy import EnergyReport, energy_series
from .grid import RadialGrid
from .params import Params
from .states import PhysicalTrajectory, SimilarityTrajectory
from .stencils import gradient

__all__ = [
    "DiagnosticSeries", "Verdict", "fit_exponent",
    "vanishing_verdict", "bounded_verdict", "lower_bound_verdict",
    "physical_growth_diagnostics", "lower_bound_diagnostic",
    "similarity_decay_diagnostics", "write_diagnostics_csv",
]

PHYSICAL_LABELS = ("T1_L2", "T2_ut_slab", "T22_grad_slab", "T4_full_slab", "LIMENER")
SIMILARITY_LABELS = ("COR1", "COR2", "COR3", "E03BIS", "E03", "E04")


@dataclass
class DiagnosticSeries:
    """Time-indexed record of one diagnostic quantity, plus its fit metadata."""

    label: str
    times: np.ndarray
    values: np.ndarray
    blowup_time: Optional[float] = None
    fitted_exponent: Optional[float] = None
    fit_r2: Optional[float] = None
    fit_window: Optional[tuple[float, float]] = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError(f"{self.label}: times must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.label}: values must be finite")


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


def fit_exponent(series: DiagnosticSeries, model: str,
                 window: Optional[tuple[float, float]] = None) -> tuple[float, float]:
    """Least-squares exponent over the fit window (default: last third of samples).

    model "power_in_T_minus_t": value ~ (T-t)^alpha, fitted in log-log against
    T-t (series.blowup_time supplies T).  model "exp_in_s": value ~ e^(lambda t),
    fitted log-linear.  Requires >= 8 samples, all positive, in the window.
    Stamps the series' fit fields and returns (exponent, r^2).
    """
    t, v = series.times, series.values
    if window is None:
        lo = t[max(0, len(t) - max(8, len(t) // 3))]
        window = (float(lo), float(t[-1]))
    mask = (t >= window[0]) & (t <= window[1])
    if mask.sum() < 8:
        raise ValueError(f"{series.label}: need >= 8 samples in the fit window, got {mask.sum()}")
    tv, vv = t[mask], v[mask]
    if np.any(vv <= 0):
        raise ValueError(f"{series.label}: non-positive values in the fit window")
    if model == "power_in_T_minus_t":
        if series.blowup_time is None:
            raise ValueError(f"{series.label}: power model needs a blow-up time")
        x = np.log(series.blowup_time - tv)
    elif model == "exp_in_s":
        x = tv
    else:
        raise ValueError(f"unknown fit model {model!r}")
    y = np.log(vv)
    slope, intercept = np.polyfit(x, y, 1)
    yhat = slope * x + intercept
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    series.fitted_exponent = float(slope)
    series.fit_r2 = r2
    series.fit_window = window
    return float(slope), r2


def vanishing_verdict(series: DiagnosticSeries, model: str, r2_min: float = 0.95,
                      gamma0: float = 0.1, zero_floor: float = 1e-20) -> Verdict:
    """Both-ways check of a "tends to zero" claim.

    Tail below a resolution-aware threshold max * coverage^gamma0 (coverage =
    ratio of the decaying variable across the series, so the threshold
    tightens as refinement extends the reach), and fitted decay rate < 0 with
    r^2 above r2_min.  An identically-zero series passes trivially.
    """
    v = series.values
    vmax = float(np.max(np.abs(v)))
    if vmax <= zero_floor:
        return Verdict(f"{series.label}_vanishes", True, vmax, zero_floor,
                       "identically zero")
    if model == "power_in_T_minus_t":
        coverage = (series.blowup_time - series.times[-1]) / (series.blowup_time - series.times[0])
    else:
        coverage = math.exp(-(series.times[-1] - series.times[0]))
    threshold = vmax * coverage ** gamma0
    tail = float(np.mean(v[-3:]))
    exponent, r2 = fit_exponent(series, model)
    decay_rate = -exponent if model == "power_in_T_minus_t" else exponent
    ok = (tail <= threshold) and (decay_rate < 0) and (r2 > r2_min)
    return Verdict(
        f"{series.label}_vanishes", bool(ok), tail, threshold,
        f"decay_rate={decay_rate:.6g} r2={r2:.6g}",
    )


def bounded_verdict(series: DiagnosticSeries, bound: Optional[float] = None) -> Verdict:
    """Finiteness (and optional explicit bound) of the series' sup."""
    sup = float(np.max(np.abs(series.values)))
    ok = math.isfinite(sup) and (bound is None or sup <= bound)
    return Verdict(f"{series.label}_bounded", bool(ok), sup,
                   bound if bound is not None else math.inf)


def lower_bound_verdict(series: DiagnosticSeries) -> Verdict:
    """Positivity-of-liminf proxy: trailing-half inf >= 1e-3 * median, and > 0."""
    v = series.values
    inf_tail = float(np.min(v[len(v) // 2:]))
    threshold = 1e-3 * float(np.median(v))
    ok = inf_tail > 0 and inf_tail >= threshold
    return Verdict("lower_bound_positive", bool(ok), inf_tail, threshold)


# ---------------------------------------------------------------------------
# physical frame

def _select_log_spaced(candidates: np.ndarray, n: int) -> np.ndarray:
    """Indices of ~n log-spaced values of a positive decreasing array."""
    if len(candidates) <= n:
        return np.arange(len(candidates))
    targets = np.exp(np.linspace(math.log(candidates[0]), math.log(candidates[-1]), n))
    idx = np.unique([int(np.argmin(np.abs(candidates - tv))) for tv in targets])
    return idx


def physical_growth_diagnostics(traj: PhysicalTrajectory, T_hat: float, params: Params,
                                grid: RadialGrid, n_points: int = 48,
                                n_slabs: int = 12) -> Dict[str, DiagnosticSeries]:
    """The five growth series near the blow-up time of a physical trajectory.

    Pointwise series are sampled at snapshot times (log-spaced in T-t); slab
    series integrate the per-snapshot ball integrals in time by composite
    trapezoid, at slab parameters chosen so every slab holds >= 32 snapshots.
    """
    times = traj.times
    p, N, k = params.p, params.N, params.k
    if grid.R < (T_hat - times[0]) * (1 - 1e-12):
        raise ValueError("trajectory grid does not cover the backward cone of (0, T_hat)")
    if len(times) < 4:
        raise ValueError("need at least 4 snapshots")
    dt_snap = float(np.min(np.diff(times)))
    h = grid.h

    tau = T_hat - times
    usable = tau >= max(4 * h, 2 * dt_snap)
    idx_all = np.where(usable)[0]
    if len(idx_all) < 8:
        raise ValueError("trajectory does not approach T_hat closely enough")

    # pointwise series --------------------------------------------------
    sel = idx_all[_select_log_spaced(tau[idx_all], n_points)]
    sel = sel[np.argsort(times[sel])]
    t1_vals, lim_vals = [], []
    for j in sel:
        st = traj.states[j]
        tj = tau[j]
        ur = gradient(st.u, h)
        t1_vals.append(tj ** (-(p - 1.0) * N / (p + 3.0))
                       * grid.partial_ball_integral(st.u ** 2, tj))
        integrand = ((1.0 - (grid.r / tj) ** 2) * ur ** 2 + st.ut ** 2
                     - np.abs(st.u) ** (p + 1.0) / (p + 1.0))
        lim_vals.append(0.5 * tj * grid.partial_ball_integral(integrand, tj))
    out = {
        "T1_L2": DiagnosticSeries("T1_L2", times[sel], t1_vals, blowup_time=T_hat),
        "LIMENER": DiagnosticSeries("LIMENER", times[sel], lim_vals, blowup_time=T_hat),
    }

    # slab series --------------------------------------------------------
    g2 = np.empty(len(times))
    g22 = np.empty(len(times))
    g4 = np.empty(len(times))
    for j, st in enumerate(traj.states):
        ur = gradient(st.u, h)
        rho_half = min(max(tau[j] / 2.0, 0.0), grid.R)
        rho_full = min(max(tau[j], 0.0), grid.R)
        g2[j] = grid.partial_ball_integral(st.ut ** 2, rho_half)
        g22[j] = grid.partial_ball_integral(ur ** 2, rho_half)
        g4[j] = grid.partial_ball_integral(ur ** 2 + st.ut ** 2, rho_full)

    t_hi = T_hat - times[0]
    t_lo = max(2.0 * (T_hat - times[-1]), 64.0 * dt_snap, 8 * h)
    if t_lo >= t_hi:
        raise ValueError("snapshot record too short for slab integrals")
    slab_params = np.exp(np.linspace(math.log(t_hi), math.log(t_lo), n_slabs))
    eval_times, v2, v22, v4 = [], [], [], []
    for tsl in slab_params:
        a, b = T_hat - tsl, T_hat - tsl / 2.0
        mask = (times >= a) & (times <= b)
        if mask.sum() < 32:
            continue
        tw = times[mask]
        eval_times.append(T_hat - tsl)
        v2.append(float(np.trapezoid(g2[mask], tw)))
        v22.append(float(np.trapezoid(g22[mask], tw)))
        v4.append(float(np.trapezoid(g4[mask], tw)))
    order = np.argsort(eval_times)
    et = np.array(eval_times)[order]
    out["T2_ut_slab"] = DiagnosticSeries("T2_ut_slab", et, np.array(v2)[order], blowup_time=T_hat)
    out["T22_grad_slab"] = DiagnosticSeries("T22_grad_slab", et, np.array(v22)[order], blowup_time=T_hat)
    out["T4_full_slab"] = DiagnosticSeries("T4_full_slab", et, np.array(v4)[order], blowup_time=T_hat)
    return out


def lower_bound_diagnostic(traj: PhysicalTrajectory, T_hat: float, params: Params,
                           grid: RadialGrid, n_points: int = 48) -> DiagnosticSeries:
    """Scaled-norm sum whose liminf stays positive for genuine blow-up data."""
    times = traj.times
    N, k = params.N, params.k
    tau = T_hat - times
    usable = tau >= max(4 * grid.h, 2 * float(np.min(np.diff(times))))
    idx_all = np.where(usable)[0]
    sel = idx_all[_select_log_spaced(tau[idx_all], n_points)]
    sel = sel[np.argsort(times[sel])]
    vals = []
    for j in sel:
        st = traj.states[j]
        tj = tau[j]
        ur = gradient(st.u, grid.h)
        norm_u = math.sqrt(max(grid.partial_ball_integral(st.u ** 2, tj), 0.0))
        norm_ut = math.sqrt(max(grid.partial_ball_integral(st.ut ** 2, tj), 0.0))
        norm_ur = math.sqrt(max(grid.partial_ball_integral(ur ** 2, tj), 0.0))
        vals.append(tj ** k * norm_u / tj ** (N / 2.0)
                    + tj ** (k + 1.0) * (norm_ut + norm_ur) / tj ** (N / 2.0))
    return DiagnosticSeries("LOWER_BOUND", times[sel], vals, blowup_time=T_hat)


# ---------------------------------------------------------------------------
# similarity frame

def _window_integral(s: np.ndarray, g: np.ndarray, a: float, b: float) -> float:
    """Trapezoid of samples g(s) over [a, b], with linear endpoint corrections."""
    inside = (s >= a - 1e-12) & (s <= b + 1e-12)
    sw, gw = s[inside], g[inside]
    total = float(np.trapezoid(gw, sw))
    # fractional end cells
    if sw[0] > a:
        j = int(np.searchsorted(s, a, side="right")) - 1
        ga = g[j] + (g[j + 1] - g[j]) * (a - s[j]) / (s[j + 1] - s[j])
        total += 0.5 * (ga + gw[0]) * (sw[0] - a)
    if sw[-1] < b:
        j = min(int(np.searchsorted(s, b, side="right")) - 1, len(s) - 2)
        gb = g[j] + (g[j + 1] - g[j]) * (b - s[j]) / (s[j + 1] - s[j])
        total += 0.5 * (gw[-1] + gb) * (b - sw[-1])
    return total


def similarity_decay_diagnostics(traj: SimilarityTrajectory, params: Params,
                                 grid: RadialGrid,
                                 reports: Optional[Sequence[EnergyReport]] = None,
                                 window: float = 1.0) -> Dict[str, DiagnosticSeries]:
    """COR1..E04 series with sliding unit windows integrated by composite quadrature."""
    from .grid import integrate_ball

    s = traj.times
    if s[-1] - s[0] <= window:
        raise ValueError(f"trajectory must extend at least {window} beyond its first time")
    if reports is None:
        reports = energy_series(traj, params, grid)
    eta, p = params.eta, params.p
    n = len(s)
    q_ws2 = np.empty(n)
    q_grad_w = np.empty(n)
    q_wr2 = np.empty(n)
    q_cor2 = np.empty(n)
    q_cor3 = np.empty(n)
    for j, st in enumerate(traj.states):
        wr = gradient(st.w, grid.h)
        q_ws2[j] = integrate_ball(grid, st.ws ** 2)
        q_grad_w[j] = integrate_ball(grid, (1.0 - grid.r ** 2) * wr ** 2)
        q_wr2[j] = integrate_ball(grid, wr ** 2)
        q_cor2[j] = integrate_ball(grid, np.abs(st.w) ** ((p + 3.0) / 2.0))
        q_cor3[j] = integrate_ball(grid, st.w ** 2)
    F = np.array([rep.F for rep in reports])

    decay2 = np.exp(-2.0 * eta * s)
    out = {
        "COR2": DiagnosticSeries("COR2", s, decay2 * q_cor2),
        "COR3": DiagnosticSeries("COR3", s, np.exp(-8.0 * eta * s / (p + 3.0)) * q_cor3),
        "E04": DiagnosticSeries("E04", s, F),
    }

    eval_mask = s + window <= s[-1] + 1e-12
    se = s[eval_mask]
    cor1, e03bis, e03 = [], [], []
    for sv in se:
        w0 = math.exp(-2.0 * eta * sv)
        cor1.append(w0 * _window_integral(s, q_ws2 + q_grad_w, sv, sv + window))
        e03bis.append(w0 * _window_integral(s, q_ws2, sv, sv + window))
        e03.append(w0 * _window_integral(s, q_wr2, sv, sv + window))
    cor1 = np.array(cor1)
    if np.any(cor1 < -1e-15 * max(1.0, float(np.max(np.abs(cor1))))):
        raise ValueError("COR1 window integrand must be nonnegative")
    out["COR1"] = DiagnosticSeries("COR1", se, np.maximum(cor1, 0.0))
    out["E03BIS"] = DiagnosticSeries("E03BIS", se, e03bis)
    out["E03"] = DiagnosticSeries("E03", se, e03)
    return out


def write_diagnostics_csv(path, series: Sequence[DiagnosticSeries]) -> None:
    from .io import write_csv

    rows = []
    for ser in series:
        for t, v in zip(ser.times, ser.values):
            rows.append((ser.label, t, v))
    write_csv(path, ("label", "time", "value"), rows)
