"""Continuum rate-equation model: steady states and a fixed-step integrator.

Every off-diagonal accuracy obeys

    dphi[a, b]/dt = -gamma (phi[a, b] - phi_min)
                    + alpha[b, a] link[b, a] phi[b, a] (1 - phi[a, b])

with ``phi[a, a] = 1`` held fixed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BeliefMatrix, ConfigurationError, Environment

__all__ = [
    "DegenerateInputError",
    "StepSizeError",
    "RatePair",
    "ContinuumSystem",
    "steady_state_response",
    "steady_state_symmetric",
    "steady_state_pair",
    "symmetric_residual",
    "pair_residual",
    "integrate_rate_equations",
]


class DegenerateInputError(ValueError):
    pass


class StepSizeError(ValueError):
    pass


@dataclass(frozen=True)
class RatePair:
    """Loss ratios for one agent pair.

    ``r = gamma / (alpha[b, a] link[b, a])`` drives a's belief about b and
    ``r_prime = gamma / (alpha[a, b] link[a, b])`` drives b's belief about a.
    """

    r: float
    r_prime: float
    phi_min: float

    def __post_init__(self):
        if self.r < 0 or self.r_prime < 0:
            raise ValueError("loss ratios must be non-negative")
        if not 0.0 <= self.phi_min <= 1.0:
            raise ValueError("phi_min must lie in [0, 1]")


def steady_state_response(phi_peer, r, phi_min, *, infinite_loss=False):
    """Steady accuracy about a peer whose own accuracy about us is ``phi_peer``.

    ``(r * phi_min + phi_peer) / (r + phi_peer)``; with ``infinite_loss`` set
    the result is the floor ``phi_min``.
    """
    if infinite_loss or math.isinf(r):
        return float(phi_min)
    if r == 0 and phi_peer == 0:
        raise DegenerateInputError("r = 0 and phi_peer = 0 leave the steady state undefined")
    return (r * phi_min + phi_peer) / (r + phi_peer)


def _positive_root(a, b, c):
    # largest root of a x^2 + b x + c with a > 0, c <= 0, avoiding cancellation
    disc = b * b - 4.0 * a * c
    assert disc >= 0.0, disc
    s = math.sqrt(disc)
    if b <= 0.0:
        return (-b + s) / (2.0 * a)
    return (-2.0 * c) / (b + s)


def steady_state_symmetric(r: float, phi_min: float) -> float:
    """Positive root of ``phi**2 + (r - 1) phi - r phi_min = 0``.

    For ``phi_min = 0`` this is exactly ``max(1 - r, 0)``.
    """
    if r < 0 or not 0.0 <= phi_min <= 1.0:
        raise ValueError("need r >= 0 and phi_min in [0, 1]")
    # discriminant written as (r-1)^2 + 4 r phi_min: non-negative by construction
    d = 1.0 - r
    s = math.sqrt(d * d + 4.0 * r * phi_min)
    if d >= 0.0:
        return 0.5 * d + 0.5 * s
    return 2.0 * r * phi_min / (s - d)


def symmetric_residual(phi, r, phi_min):
    return phi * phi + (r - 1.0) * phi - r * phi_min


def _pair_coefficients(r, r_prime, phi_min):
    return (
        r + 1.0,
        r_prime * r + (r_prime - r) * phi_min - 1.0,
        -r_prime * phi_min * (r + 1.0),
    )


def pair_residual(phi_ab, rp: RatePair):
    a, b, c = _pair_coefficients(rp.r, rp.r_prime, rp.phi_min)
    return a * phi_ab * phi_ab + b * phi_ab + c


def steady_state_pair(rp: RatePair) -> tuple[float, float]:
    """Steady ``(phi[a, b], phi[b, a])`` for an asymmetric pair.

    ``phi[a, b]`` is the non-negative root of
    ``(r+1) x^2 + (r' r + (r' - r) phi_min - 1) x - r' phi_min (r+1) = 0``;
    ``phi[b, a]`` follows from the single-link response with ratio ``r'``.
    """
    a, b, c = _pair_coefficients(rp.r, rp.r_prime, rp.phi_min)
    phi_ab = _positive_root(a, b, c)
    phi_ba = steady_state_response(phi_ab, rp.r_prime, rp.phi_min)
    return phi_ab, phi_ba


@dataclass
class ContinuumSystem:
    """Transmission rates ``alpha[a, j]`` (a sends to j) in a fixed environment.

    ``rate_cap``, when set, bounds every agent's total outgoing rate.
    """

    alpha: np.ndarray
    env: Environment
    gamma: float
    phi_min: float
    rate_cap: float | None = None

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.alpha.shape != self.env.link.shape:
            raise ConfigurationError("alpha and environment dimensions differ")
        if (self.alpha < 0).any():
            raise ConfigurationError("transmission rates must be non-negative")
        if self.rate_cap is not None:
            totals = self.alpha.sum(axis=1) - np.diag(self.alpha)
            if (totals > self.rate_cap * (1 + 1e-12)).any():
                raise ConfigurationError("an agent's total rate exceeds the cap")

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    @property
    def inflow(self) -> np.ndarray:
        """``inflow[a, b] = alpha[b, a] * link[b, a]``, the gain on phi[a, b]."""
        g = (self.alpha * self.env.link).T.copy()
        np.fill_diagonal(g, 0.0)
        return g

    def receive_rate(self, phi: np.ndarray) -> np.ndarray:
        """``q[a, b] = alpha[b, a] link[b, a] phi[b, a]``."""
        return self.inflow * phi.T

    def derivative(self, phi: np.ndarray) -> np.ndarray:
        d = -self.gamma * (phi - self.phi_min) + self.receive_rate(phi) * (1.0 - phi)
        np.fill_diagonal(d, 0.0)
        return d

    @classmethod
    def uniform(cls, n, ratio, phi_min, gamma=1.0, link=1.0):
        """Every link carries the same loss ratio ``gamma / (alpha link)``."""
        env = Environment(np.full((n, n), link))
        alpha = np.full((n, n), gamma / (ratio * link))
        np.fill_diagonal(alpha, 0.0)
        return cls(alpha, env, gamma, phi_min)


def integrate_rate_equations(
    sys: ContinuumSystem,
    phi0: BeliefMatrix,
    dt: float,
    t_end: float,
    *,
    tol: float = 1e-12,
) -> BeliefMatrix:
    """Explicit first-order integration of the rate equations up to ``t_end``.

    Stops early once the largest change per unit time falls below ``tol``.
    Raises :class:`StepSizeError` unless ``dt * (gamma + max inflow) < 1``,
    which keeps ``[phi_min, 1]`` forward-invariant.
    """
    if dt <= 0:
        raise StepSizeError("dt must be positive")
    stiffness = sys.gamma + float(sys.inflow.max(initial=0.0))
    if dt * stiffness >= 1.0:
        raise StepSizeError(
            f"dt={dt} too large: dt * (gamma + max inflow) = {dt * stiffness:.3g} >= 1"
        )
    phi = np.array(phi0.phi, dtype=float)
    np.fill_diagonal(phi, 1.0)
    steps = int(math.ceil(t_end / dt - 1e-12))
    for _ in range(steps):
        d = sys.derivative(phi)
        phi += dt * d
        if np.abs(d).max() < tol:
            break
    return BeliefMatrix(phi)
