"""Domain types, configuration and the randomness contract.

Indexing convention: ``phi[a, b]`` is agent ``a``'s belief accuracy about
agent ``b`` and ``link[a, b]`` is the efficiency of the ``a -> b`` channel.
Row ``a`` of every table belongs to agent ``a``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "ConfigurationError",
    "TacticConfig",
    "SimParams",
    "BeliefMatrix",
    "Environment",
    "CommLog",
    "Message",
    "RngContract",
    "TACTIC_NAMES",
]


class ConfigurationError(ValueError):
    """Raised for invalid parameters, environments or config files."""


# CLI/config name -> canonical kind
TACTIC_NAMES = {
    "sequence": "sequence",
    "random": "random",
    "timer": "timer",
    "filtered": "filtered",
    "filtered+": "filtered+",
    "filtered++": "filtered++",
}

_EXTRA_PROBABILITY = {"filtered+": 0.25, "filtered++": 0.5}


@dataclass(frozen=True)
class TacticConfig:
    """Tactic identity and its tunables.

    ``theta_t`` and ``theta_f`` default to ``K`` and ``4K`` when left as
    ``None``; :meth:`SimParams.resolved_tactic` fills them in.
    """

    kind: str = "timer"
    theta_t: int | None = None
    theta_f: int | None = None
    q_extra: float | None = None

    def __post_init__(self):
        kind = str(self.kind).lower()
        if kind not in TACTIC_NAMES:
            raise ConfigurationError(
                f"unknown tactic {self.kind!r}; expected one of {sorted(TACTIC_NAMES)}"
            )
        object.__setattr__(self, "kind", TACTIC_NAMES[kind])
        expected_q = _EXTRA_PROBABILITY.get(self.kind, 0.0)
        if self.q_extra is None:
            object.__setattr__(self, "q_extra", expected_q)
        elif not math.isclose(self.q_extra, expected_q):
            raise ConfigurationError(
                f"q_extra for {self.kind} is fixed at {expected_q}, got {self.q_extra}"
            )
        if self.theta_t is not None and self.theta_t < 1:
            raise ConfigurationError("theta_t must be >= 1")
        if (
            self.theta_t is not None
            and self.theta_f is not None
            and self.theta_f < self.theta_t
        ):
            raise ConfigurationError("theta_f must be >= theta_t")

    @property
    def filtered(self) -> bool:
        return self.kind.startswith("filtered")


@dataclass(frozen=True)
class SimParams:
    """Simulation parameters.

    Parameters
    ----------
    n : int
        Number of agents.
    k_period : int
        Ticks per reference messaging cycle ``K``; must exceed ``n``.
    gamma : float
        Belief decay rate per unit time.
    phi_min : float
        "Find by chance" floor accuracy.
    tau : float
        Tick duration.
    """

    n: int = 20
    k_period: int = 200
    gamma: float = 0.0
    phi_min: float = 0.1
    tau: float = 1.0
    phi_threshold: float = 0.75
    max_hops: int = 3
    xi: float = 1.0
    beta: float = 1.0
    tactic: TacticConfig = field(default_factory=TacticConfig)
    seed: int = 0
    ticks_burnin: int = 10_000
    ticks_measure: int = 20_000

    def __post_init__(self):
        if isinstance(self.tactic, str):
            object.__setattr__(self, "tactic", TacticConfig(self.tactic))
        if int(self.n) != self.n or self.n < 2:
            raise ConfigurationError(f"n must be an integer >= 2, got {self.n}")
        if int(self.k_period) != self.k_period or self.k_period <= self.n:
            raise ConfigurationError(
                f"k_period must be an integer > n (got K={self.k_period}, N={self.n})"
            )
        if not 0.0 <= self.phi_min < self.phi_threshold <= 1.0:
            raise ConfigurationError("need 0 <= phi_min < phi_threshold <= 1")
        if self.gamma < 0:
            raise ConfigurationError("gamma must be >= 0")
        if self.tau <= 0:
            raise ConfigurationError("tau must be > 0")
        if self.max_hops < 1:
            raise ConfigurationError("max_hops must be >= 1")
        if self.beta < 1:
            raise ConfigurationError("beta must be >= 1")
        if self.ticks_burnin < 0 or self.ticks_measure < 0:
            raise ConfigurationError("tick counts must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError("seed must fit in 64 unsigned bits")
        tac = self.resolved_tactic()
        if tac.theta_f < tac.theta_t:
            raise ConfigurationError("theta_f must be >= theta_t")

    @classmethod
    def from_gamma_bar(cls, gamma_bar: float, **kwargs) -> "SimParams":
        """Build parameters from the normalised loss ``gamma * tau * K``."""
        tau = kwargs.get("tau", 1.0)
        k = kwargs.get("k_period", cls.k_period)
        return cls(gamma=gamma_bar / (tau * k), **kwargs)

    @property
    def gamma_bar(self) -> float:
        return self.gamma * self.tau * self.k_period

    @property
    def reference_rate(self) -> float:
        """Messages per tick per agent at the reference rate, ``(N-1)/K``."""
        return (self.n - 1) / self.k_period

    def resolved_tactic(self) -> TacticConfig:
        tac = self.tactic
        theta_t = self.k_period if tac.theta_t is None else tac.theta_t
        theta_f = 4 * self.k_period if tac.theta_f is None else tac.theta_f
        return replace(tac, theta_t=theta_t, theta_f=theta_f)

    def with_gamma_bar(self, gamma_bar: float) -> "SimParams":
        return replace(self, gamma=gamma_bar / (self.tau * self.k_period))


@dataclass
class BeliefMatrix:
    """Swarm knowledge state; ``phi[a, b]`` is agent a's accuracy about b."""

    phi: np.ndarray

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @classmethod
    def floor(cls, n: int, phi_min: float) -> "BeliefMatrix":
        phi = np.full((n, n), float(phi_min))
        np.fill_diagonal(phi, 1.0)
        return cls(phi)

    def off_diagonal(self) -> np.ndarray:
        return self.phi[~np.eye(self.n, dtype=bool)]

    def copy(self) -> "BeliefMatrix":
        return BeliefMatrix(self.phi.copy())


@dataclass
class Environment:
    """Link efficiencies ``link[a, b]`` for the a -> b channel, unknown to agents."""

    link: np.ndarray

    def __post_init__(self):
        link = np.array(self.link, dtype=float)
        if link.ndim != 2 or link.shape[0] != link.shape[1]:
            raise ConfigurationError(f"environment must be square, got shape {link.shape}")
        bad = np.argwhere(~((link >= 0.0) & (link <= 1.0)))
        if bad.size:
            i, j = bad[0]
            raise ConfigurationError(
                f"link efficiency at row {i}, column {j} is {link[i, j]!r}; must lie in [0, 1]"
            )
        np.fill_diagonal(link, 1.0)
        self.link = link

    @property
    def n(self) -> int:
        return self.link.shape[0]

    def efficient_links(self, threshold: float) -> int:
        mask = self.link > threshold
        np.fill_diagonal(mask, False)
        return int(mask.sum())


@dataclass
class CommLog:
    """Timing ledgers for all agents; row ``a`` is agent a's private ledger.

    ``latest_echo[a, j]`` is j's report, carried on its last message to a,
    of when j last heard from a.
    """

    last_sent_to: np.ndarray
    last_recv_from: np.ndarray
    latest_echo: np.ndarray
    link_enabled: np.ndarray
    seq_pointer: np.ndarray

    @property
    def n(self) -> int:
        return self.last_sent_to.shape[0]

    @classmethod
    def random(cls, n: int, k_period: int, rng: np.random.Generator) -> "CommLog":
        """Stamps uniform on ``[-K, 0]``.

        An echo is an old copy of the peer's receive stamp, so
        ``latest_echo[a, j]`` is drawn from ``[-K, last_recv_from[j, a]]``;
        later echoes then never move backwards.
        """
        sent, recv = rng.integers(-k_period, 0, size=(2, n, n), endpoint=True)
        echo = rng.integers(-k_period, recv.T, endpoint=True)
        enabled = ~np.eye(n, dtype=bool)
        return cls(
            last_sent_to=sent,
            last_recv_from=recv,
            latest_echo=echo,
            link_enabled=enabled,
            seq_pointer=np.zeros(n, dtype=np.int64),
        )

    def copy(self) -> "CommLog":
        return CommLog(
            self.last_sent_to.copy(),
            self.last_recv_from.copy(),
            self.latest_echo.copy(),
            self.link_enabled.copy(),
            self.seq_pointer.copy(),
        )


@dataclass(frozen=True)
class Message:
    sender: int
    target: int
    sent_tick: int
    echo: int

    def __post_init__(self):
        if self.sender == self.target:
            raise ValueError("a message cannot target its sender")


class RngContract:
    """Counter-addressed random streams keyed by ``(seed, purpose)``.

    Each purpose owns an independent Philox stream. Tick ``t`` always maps
    to the same block of the stream, so the draw for ``(tick, agent,
    purpose)`` is fixed no matter what other purposes consume. Sequential
    access reuses one generator; out-of-order access re-seeks the counter.
    """

    INIT = 0
    SELECT = 1
    RECEPTION = 2

    # uniforms per agent per tick for each purpose
    WIDTH = {SELECT: 4, RECEPTION: 1}

    def __init__(self, seed: int, n: int):
        self.seed = int(seed)
        self.n = n
        self._streams: dict[int, list] = {}

    def _key(self, purpose: int) -> np.ndarray:
        return np.random.SeedSequence([self.seed, purpose]).generate_state(
            2, dtype=np.uint64
        )

    def _generator(self, purpose: int, counter: int = 0) -> np.random.Generator:
        ctr = np.array([counter, 0, 0, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self._key(purpose), counter=ctr))

    def init_generator(self) -> np.random.Generator:
        return self._generator(self.INIT)

    def block(self, tick: int, purpose: int) -> np.ndarray:
        """Uniform draws on ``[0, 1)`` for every agent at ``tick``, shape ``(n, width)``."""
        width = self.WIDTH[purpose]
        size = self.n * width
        # Philox emits 4 words per counter step; pad so blocks align to steps
        steps = -(-size // 4)
        stream = self._streams.get(purpose)
        if stream is None or stream[1] != tick:
            stream = [self._generator(purpose, tick * steps), tick]
            self._streams[purpose] = stream
        out = stream[0].random(steps * 4)
        stream[1] = tick + 1
        return out[:size].reshape(self.n, width)
