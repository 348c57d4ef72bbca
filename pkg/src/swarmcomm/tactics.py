"""Target-selection tactics.

A tactic sees only an agent's own timing ledger, the tick and its random
draws; beliefs and link efficiencies are deliberately out of reach.

All tactics are vectorised over a set of agents. Per agent and tick they
consume one row of four uniforms::

    u[:, 0]  send / rate coin
    u[:, 1]  candidate choice
    u[:, 2]  extra-message coin (Filtered+ / Filtered++)
    u[:, 3]  extra-message target
"""
from __future__ import annotations

import math

import numpy as np

from .core import CommLog, RngContract, TacticConfig

__all__ = [
    "NO_TARGET",
    "Tactic",
    "Sequence",
    "RandomTactic",
    "Timer",
    "Filtered",
    "make_tactic",
    "select_target",
    "filter_check",
]

NO_TARGET = -1


def _other(agents, u, n):
    """Uniform choice among the n-1 agents other than each of ``agents``."""
    offset = 1 + np.minimum((u * (n - 1)).astype(np.int64), n - 2)
    return (agents + offset) % n


def filter_check(agent, candidate, log: CommLog, tick, theta_f):
    """True if ``candidate`` has echoed contact from ``agent`` within ``theta_f`` ticks.

    Works elementwise on arrays of agents and candidates.
    """
    return tick - log.latest_echo[agent, candidate] <= theta_f


class Tactic:
    """Base class: ``select`` returns one target per agent or ``NO_TARGET``.

    ``select`` may update the agents' own ledger rows (sequence pointer,
    disabled links); the engine records the send times.
    """

    name = "tactic"

    def __init__(self, cfg: TacticConfig, n: int, k_period: int):
        self.cfg = cfg
        self.n = n
        self.k_period = k_period

    def select(self, agents, log: CommLog, tick: int, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.cfg})"


class Sequence(Tactic):
    """Cycle through the other agents in fixed order, one every ``ceil(K/(N-1))`` ticks."""

    name = "sequence"

    def __init__(self, cfg, n, k_period):
        super().__init__(cfg, n, k_period)
        self.interval = math.ceil(k_period / (n - 1))

    def select(self, agents, log, tick, u):
        out = np.full(len(agents), NO_TARGET, dtype=np.int64)
        due = (tick % self.interval) == (agents % self.interval)
        if due.any():
            a = agents[due]
            ptr = log.seq_pointer[a]
            out[due] = (a + 1 + ptr) % self.n
            log.seq_pointer[a] = (ptr + 1) % (self.n - 1)
        return out


class RandomTactic(Tactic):
    """Send to a uniformly random other agent with probability ``(N-1)/K`` per tick."""

    name = "random"

    def select(self, agents, log, tick, u):
        p = (self.n - 1) / self.k_period
        target = _other(agents, u[:, 1], self.n)
        return np.where(u[:, 0] < p, target, NO_TARGET)


class Timer(Tactic):
    """Draw a random candidate; send only if it has not been messaged for ``theta_t`` ticks."""

    name = "timer"

    def select(self, agents, log, tick, u):
        c = _other(agents, u[:, 1], self.n)
        ready = tick - log.last_sent_to[agents, c] >= self.cfg.theta_t
        return np.where(ready, c, NO_TARGET)


class Filtered(Tactic):
    """Timer over still-enabled links, permanently dropping links whose echo is stale.

    With ``q_extra > 0`` (Filtered+ / Filtered++) an agent whose regular slot
    stayed empty also considers one extra message to any other agent, at
    ``q_extra`` times the reference rate ``(N-1)/K``.
    """

    name = "filtered"

    def select(self, agents, log, tick, u):
        n = self.n
        out = np.full(len(agents), NO_TARGET, dtype=np.int64)
        enabled = log.link_enabled[agents]
        count = enabled.sum(axis=1)
        live = count > 0
        if live.any():
            k = np.minimum((u[:, 1] * count).astype(np.int64), np.maximum(count - 1, 0))
            # index of the k-th enabled entry in each row
            c = (np.cumsum(enabled, axis=1) <= k[:, None]).sum(axis=1)
            c = np.where(live, c, 0)
            ready = live & (tick - log.last_sent_to[agents, c] >= self.cfg.theta_t)
            passes = filter_check(agents, c, log, tick, self.cfg.theta_f)
            send = ready & passes
            out[send] = c[send]
            drop = ready & ~passes
            if drop.any():
                log.link_enabled[agents[drop], c[drop]] = False
        if self.cfg.q_extra > 0:
            p_extra = self.cfg.q_extra * (n - 1) / self.k_period
            extra = (out == NO_TARGET) & (u[:, 2] < p_extra)
            if extra.any():
                out[extra] = _other(agents[extra], u[extra, 3], n)
        return out


_KINDS = {
    "sequence": Sequence,
    "random": RandomTactic,
    "timer": Timer,
    "filtered": Filtered,
    "filtered+": Filtered,
    "filtered++": Filtered,
}


def make_tactic(cfg: TacticConfig, n: int, k_period: int) -> Tactic:
    """Instantiate a tactic; ``cfg`` must have its thresholds resolved."""
    if cfg.theta_t is None or cfg.theta_f is None:
        cfg = type(cfg)(cfg.kind, cfg.theta_t or k_period, cfg.theta_f or 4 * k_period)
    return _KINDS[cfg.kind](cfg, n, k_period)


def select_target(agent: int, log: CommLog, tick: int, tactic: Tactic, rng: RngContract):
    """Single-agent selection using the agent's own row of the tick's draws.

    Returns the chosen target id, or ``None`` for no send. Note that draws
    are addressed by tick, so calling this twice for the same tick replays
    the same randomness.
    """
    u = rng.block(tick, RngContract.SELECT)[agent : agent + 1]
    t = tactic.select(np.array([agent]), log, tick, u)[0]
    return None if t == NO_TARGET else int(t)
