"""Agent and swarm metrics: performance, connectedness, risk, link recovery.

All functions are pure in their array inputs. Thresholds are strict:
an accuracy counts as "good" only when it exceeds ``phi_T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BeliefMatrix, Environment, SimParams

__all__ = [
    "DegenerateEnvironmentError",
    "MetricsFrame",
    "perf_agent",
    "perf_agent_thresholded",
    "perf_swarm",
    "risk_rates",
    "detection_probability",
    "best_path_matrix",
    "ccs",
    "u_r",
    "belief_histogram",
    "BeliefHistogram",
    "MetricsRecorder",
]


class DegenerateEnvironmentError(ValueError):
    pass


@dataclass(frozen=True)
class MetricsFrame:
    tick: int
    phi_hat: float
    phi_hat_T: float
    risk_norm: float
    ccs: bool
    u_r: float
    per_agent: dict | None = None

    FIELDS = ("tick", "phi_hat", "phi_hat_T", "risk_norm", "ccs", "u_r")

    def row(self):
        return (self.tick, self.phi_hat, self.phi_hat_T, self.risk_norm, int(self.ccs), self.u_r)


def _phi(beliefs):
    return beliefs.phi if isinstance(beliefs, BeliefMatrix) else np.asarray(beliefs, dtype=float)


def perf_agent(phi_row, beta=1.0):
    """Mean of ``phi**beta`` over a full row, self term included.

    Accepts a single row or a matrix (one value per row).
    """
    row = np.asarray(phi_row, dtype=float)
    return np.mean(row**beta, axis=-1)


def perf_agent_thresholded(phi_row, phi_T, n=None):
    """Sum of above-threshold accuracies over ``max(#above, log N)``."""
    row = np.asarray(phi_row, dtype=float)
    n = row.shape[-1] if n is None else n
    good = row > phi_T
    total = np.where(good, row, 0.0).sum(axis=-1)
    return total / np.maximum(good.sum(axis=-1), math.log(n))


def perf_swarm(beliefs, beta=1.0, phi_T=0.75, thresholded=False):
    phi = _phi(beliefs)
    if thresholded:
        return float(np.mean(perf_agent_thresholded(phi, phi_T)))
    return float(np.mean(perf_agent(phi, beta)))


def risk_rates(sent, window_ticks, params: SimParams):
    """Risk rates from messages sent over a window.

    Returns
    -------
    per_agent : ndarray
        ``xi * sent / (window_ticks * tau)`` for each agent.
    swarm : float
        Sum of the per-agent rates.
    normalised : float
        Mean per-agent send rate relative to the reference ``(N-1)/(K tau)``.
    """
    if window_ticks < 1:
        raise ValueError("risk rate over an empty window is undefined")
    sent = np.asarray(sent, dtype=float)
    duration = window_ticks * params.tau
    per_agent = params.xi * sent / duration
    reference = (params.n - 1) / (params.k_period * params.tau)
    normalised = float(sent.mean() / duration / reference)
    return per_agent, float(per_agent.sum()), normalised


def detection_probability(risk_rate, interval):
    """``1 - exp(-risk_rate * interval)``."""
    if np.any(np.asarray(risk_rate) < 0):
        raise ValueError("risk rate must be non-negative")
    return -np.expm1(-np.asarray(risk_rate) * interval)


def best_path_matrix(beliefs, max_hops=3):
    """Best product of accuracies over directed paths of at most ``max_hops`` edges.

    Edge ``i -> j`` is weighted by ``phi[i, j]``; the unit diagonal lets
    shorter paths carry through the max-product iteration.
    """
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    step = _phi(beliefs).copy()
    np.fill_diagonal(step, 1.0)
    best = step
    for _ in range(max_hops - 1):
        best = (best[:, :, None] * step[None, :, :]).max(axis=1)
    return best


def ccs(beliefs, phi_T=0.75, max_hops=3):
    """Completely connected swarm: every ordered pair has a path beating ``phi_T``."""
    best = best_path_matrix(beliefs, max_hops)
    off = ~np.eye(best.shape[0], dtype=bool)
    return bool((best[off] > phi_T).all())


def u_r(beliefs, env: Environment, phi_T=0.75):
    """Accurate beliefs found relative to efficient links available."""
    phi = _phi(beliefs)
    off = ~np.eye(phi.shape[0], dtype=bool)
    efficient = int((env.link[off] > phi_T).sum())
    if efficient == 0:
        raise DegenerateEnvironmentError("no link exceeds the threshold; U_r undefined")
    return int((phi[off] > phi_T).sum()) / efficient


class BeliefHistogram:
    """Accumulates counts of off-diagonal accuracies in uniform bins on [0, 1]."""

    def __init__(self, bins=50):
        if bins < 2:
            raise ValueError("need at least two bins")
        self.edges = np.linspace(0.0, 1.0, bins + 1)
        self.counts = np.zeros(bins, dtype=np.int64)

    def add(self, beliefs):
        phi = _phi(beliefs)
        vals = phi[~np.eye(phi.shape[0], dtype=bool)]
        idx = np.clip((vals * (len(self.counts))).astype(np.int64), 0, len(self.counts) - 1)
        self.counts += np.bincount(idx, minlength=len(self.counts))

    def rows(self):
        return zip(self.edges[:-1], self.edges[1:], self.counts)


def belief_histogram(samples, bins=50):
    """Raw bin counts of off-diagonal accuracies across a sequence of snapshots."""
    h = BeliefHistogram(bins)
    for s in samples:
        h.add(s)
    return h.counts


class MetricsRecorder:
    """Observer recording a :class:`MetricsFrame` every ``cadence`` ticks.

    Risk in each frame covers the messages sent since the previous sample.
    An optional :class:`BeliefHistogram` is fed the same snapshots.
    """

    def __init__(self, cadence=10, histogram: BeliefHistogram | None = None, per_agent=False):
        self.cadence = cadence
        self.histogram = histogram
        self.per_agent = per_agent
        self.frames: list[MetricsFrame] = []
        self._mark = None

    def start(self, world):
        """Begin the risk window at the world's current state."""
        self._mark = (world.tick, world.sent.copy())

    def __call__(self, world):
        p = world.params
        phi = world.beliefs.phi
        if self._mark is None:
            self.start(world)
        t0, sent0 = self._mark
        window = world.tick - t0
        risk = risk_rates(world.sent - sent0, window, p)[2] if window > 0 else 0.0
        self._mark = (world.tick, world.sent.copy())
        try:
            ur = u_r(phi, world.env, p.phi_threshold)
        except DegenerateEnvironmentError:
            ur = float("nan")
        extra = None
        if self.per_agent:
            extra = {
                "phi_bar": perf_agent(phi, p.beta),
                "phi_bar_T": perf_agent_thresholded(phi, p.phi_threshold),
            }
        self.frames.append(
            MetricsFrame(
                tick=world.tick,
                phi_hat=perf_swarm(phi, p.beta),
                phi_hat_T=perf_swarm(phi, phi_T=p.phi_threshold, thresholded=True),
                risk_norm=risk,
                ccs=ccs(phi, p.phi_threshold, p.max_hops),
                u_r=ur,
                per_agent=extra,
            )
        )
        if self.histogram is not None:
            self.histogram.add(phi)

    def column(self, name):
        return np.array([getattr(f, name) for f in self.frames], dtype=float)
