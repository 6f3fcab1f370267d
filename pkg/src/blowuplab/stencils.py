"""Second-order radial difference stencils shared by the solvers and the energy integrands.

All stencils are written in difference form (combinations of w[i+1]-w[i]), so a
spatially constant field has exactly zero discrete derivatives in floating
point.  That keeps the constant stationary state an exact fixed point of the
schemes instead of seeding grid-scale rounding noise.

Radial regularity is built in at the origin: the first derivative vanishes at
r = 0 (even extension) and the second derivative uses the symmetric ghost
w[-1] = w[1].  The outer endpoint uses one-sided second-order stencils; the
similarity solver relies on that at the outflow boundary r = 1.
"""

from __future__ import annotations

import numpy as np

__all__ = ["gradient", "second_derivative"]


def gradient(w: np.ndarray, h: float, edge_order: int = 2) -> np.ndarray:
    """d w / d r for a radial field: zero at r=0, centered inside, one-sided at the end."""
    out = np.empty_like(w)
    out[0] = 0.0
    out[1:-1] = (w[2:] - w[:-2]) / (2.0 * h)
    if edge_order == 2:
        out[-1] = (3.0 * (w[-1] - w[-2]) - (w[-2] - w[-3])) / (2.0 * h)
    else:
        out[-1] = (w[-1] - w[-2]) / h
    return out


def second_derivative(w: np.ndarray, h: float, edge_order: int = 2) -> np.ndarray:
    """d^2 w / d r^2: symmetric ghost at r=0, centered inside, one-sided at the end."""
    h2 = h * h
    out = np.empty_like(w)
    out[0] = 2.0 * (w[1] - w[0]) / h2
    out[1:-1] = ((w[2:] - w[1:-1]) - (w[1:-1] - w[:-2])) / h2
    if edge_order == 2:
        out[-1] = (2.0 * (w[-1] - w[-2]) - 3.0 * (w[-2] - w[-3]) + (w[-3] - w[-4])) / h2
    else:
        out[-1] = ((w[-1] - w[-2]) - (w[-2] - w[-3])) / h2
    return out
