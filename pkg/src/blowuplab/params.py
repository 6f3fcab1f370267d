"""Problem parameters for the radial semilinear wave equation u_tt = Lap u + |u|^(p-1) u + f(u).

The nonlinearity exponent p must lie strictly between the conformal exponent
p_conf = 1 + 4/(N-1) and the Sobolev exponent p_sob = 1 + 4/(N-2) (infinite for
N = 2).  In that band the gap

    eta = (N-1)/2 - 2/(p-1)

is strictly positive (and < 1/2), and the constant

    kappa0 = (2(p+1)/(p-1)^2)^(1/(p-1))

is the amplitude of the exact space-independent blow-up solution
u(t) = kappa0 (T-t)^(-2/(p-1)); it is the constant stationary state of the
similarity-variables equation and the reference solution for most tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = ["PerturbationSpec", "Params", "make_params", "ParameterError"]


class ParameterError(ValueError):
    """Raised for parameter sets outside the supported super-conformal band."""


# Lattice of u values on which the |f(u)| <= M(1+|u|^q) bound is sampled.
_HF_LATTICE = np.concatenate(
    [[0.0], np.logspace(-6, 6, 49), -np.logspace(-6, 6, 49)]
)


@dataclass(frozen=True)
class PerturbationSpec:
    """Lower-order perturbation f(u) of the pure-power nonlinearity.

    kind is one of "none", "klein_gordon" (f(u) = -u) or "custom_f".  A custom
    f must satisfy |f(u)| <= M (1 + |u|^q) with q < p; the bound is sampled on
    a fixed lattice of u values at construction time.
    """

    kind: str = "none"
    q: float = 0.0
    M: float = 0.0
    f: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @staticmethod
    def none() -> "PerturbationSpec":
        return PerturbationSpec(kind="none")

    @staticmethod
    def klein_gordon() -> "PerturbationSpec":
        return PerturbationSpec(kind="klein_gordon", q=1.0, M=1.0, f=lambda u: -u)

    @staticmethod
    def custom(f: Callable[[np.ndarray], np.ndarray], q: float, M: float) -> "PerturbationSpec":
        return PerturbationSpec(kind="custom_f", q=q, M=M, f=f)

    @property
    def active(self) -> bool:
        return self.kind != "none"

    def evaluate(self, u: np.ndarray) -> np.ndarray:
        if self.kind == "none":
            return np.zeros_like(u)
        if self.kind == "klein_gordon":
            return -u
        return np.asarray(self.f(u), dtype=float)

    def check_growth_bound(self, p: float) -> None:
        """Validate kind and sample the growth hypothesis on the test lattice."""
        if self.kind not in ("none", "klein_gordon", "custom_f"):
            raise ParameterError(f"unknown perturbation kind {self.kind!r}")
        if self.kind == "none":
            return
        if self.kind == "custom_f" and self.f is None:
            raise ParameterError("custom_f perturbation needs a callable f")
        if not self.q < p:
            raise ParameterError(f"perturbation exponent q={self.q} must be < p={p}")
        if not self.M > 0:
            raise ParameterError(f"perturbation bound M={self.M} must be positive")
        u = _HF_LATTICE
        fu = self.evaluate(u)
        bound = self.M * (1.0 + np.abs(u) ** self.q)
        if not np.all(np.abs(fu) <= bound * (1.0 + 1e-12)):
            raise ParameterError("perturbation violates |f(u)| <= M(1+|u|^q) on the test lattice")


@dataclass(frozen=True)
class Params:
    """Validated problem constants with derived quantities.

    Use make_params; constructing directly bypasses the band checks.
    """

    N: int
    p: float
    eta: float
    p_conf: float
    p_sob: float
    kappa0: float
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec.none)

    @property
    def k(self) -> float:
        """Blow-up scaling exponent 2/(p-1)."""
        return 2.0 / (self.p - 1.0)

    @property
    def friction(self) -> float:
        """Damping coefficient (p+3)/(p-1) of the similarity equation."""
        return (self.p + 3.0) / (self.p - 1.0)

    @property
    def linear_weight(self) -> float:
        """Zeroth-order coefficient 2(p+1)/(p-1)^2 of the similarity equation."""
        return 2.0 * (self.p + 1.0) / (self.p - 1.0) ** 2

    def nonlinearity(self, u: np.ndarray) -> np.ndarray:
        """Pointwise sign(u)|u|^p, exact for non-integer p away from u = 0."""
        return np.sign(u) * np.abs(u) ** self.p


def make_params(N: int, p: float, perturbation: Optional[PerturbationSpec] = None) -> Params:
    """Build Params, rejecting anything outside the open super-conformal band.

    Requires integer N >= 2 and p_conf < p < p_sob strictly (p = p_conf would
    give eta = 0 and p = p_sob leaves the energy framework).  A custom
    perturbation is checked against the growth hypothesis.
    """
    if int(N) != N or N < 2:
        raise ParameterError(f"spatial dimension N={N} must be an integer >= 2")
    N = int(N)
    p = float(p)
    p_conf = 1.0 + 4.0 / (N - 1)
    p_sob = 1.0 + 4.0 / (N - 2) if N >= 3 else math.inf
    if not (p_conf < p < p_sob):
        raise ParameterError(
            f"p={p} outside the open super-conformal band ({p_conf}, {p_sob}) for N={N}"
        )
    eta = (N - 1) / 2.0 - 2.0 / (p - 1.0)
    kappa0 = (2.0 * (p + 1.0) / (p - 1.0) ** 2) ** (1.0 / (p - 1.0))
    if perturbation is None:
        perturbation = PerturbationSpec.none()
    perturbation.check_growth_bound(p)
    return Params(
        N=N, p=p, eta=eta, p_conf=p_conf, p_sob=p_sob, kappa0=kappa0,
        perturbation=perturbation,
    )
