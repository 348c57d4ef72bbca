"""Discrete-time stochastic messaging engine.

Each tick has a loss stage (every off-diagonal belief relaxes towards the
floor) followed by a communication stage (each agent sends at most one
message; deliveries succeed with probability ``link * phi`` of the sender
about the target, and a delivery makes the target's belief about the
sender exact). All sends in a tick are simultaneous: selection and
delivery use the state left by the loss stage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BeliefMatrix,
    CommLog,
    ConfigurationError,
    Environment,
    Message,
    RngContract,
    SimParams,
)
from .tactics import NO_TARGET, Tactic, make_tactic

__all__ = [
    "World",
    "init_world",
    "loss_update",
    "attempt_delivery",
    "apply_reception",
    "tick",
    "run",
]


@dataclass
class World:
    params: SimParams
    env: Environment
    beliefs: BeliefMatrix
    log: CommLog
    rng: RngContract
    tactic: Tactic
    tick: int = 0
    sent: np.ndarray = field(default=None)
    delivered: np.ndarray = field(default=None)
    last_sent_count: int = 0

    def __post_init__(self):
        n = self.params.n
        if self.sent is None:
            self.sent = np.zeros(n, dtype=np.int64)
        if self.delivered is None:
            self.delivered = np.zeros(n, dtype=np.int64)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def phi(self) -> np.ndarray:
        return self.beliefs.phi


def init_world(params: SimParams, env: Environment) -> World:
    """Fresh world with ledgers drawn uniformly from ``[-K, 0]``.

    Each belief is what the loss stage leaves of an exact reception at the
    ledger's last-received-from stamp. (A plain floor start would never
    leave the floor when ``phi_min = 0``: deliveries need ``phi > 0``.)
    """
    if env.n != params.n:
        raise ConfigurationError(
            f"environment has {env.n} agents but params.n = {params.n}"
        )
    rng = RngContract(params.seed, params.n)
    log = CommLog.random(params.n, params.k_period, rng.init_generator())
    tactic = make_tactic(params.resolved_tactic(), params.n, params.k_period)
    beliefs = BeliefMatrix.floor(params.n, params.phi_min)
    age = -log.last_recv_from
    phi = params.phi_min + (1.0 - params.phi_min) * np.exp(-params.gamma * params.tau * age)
    np.fill_diagonal(phi, 1.0)
    beliefs.phi[...] = phi
    return World(
        params=params,
        env=env,
        beliefs=beliefs,
        log=log,
        rng=rng,
        tactic=tactic,
    )


def loss_update(beliefs: BeliefMatrix, gamma: float, tau: float, phi_min: float) -> BeliefMatrix:
    """``phi <- phi_min + exp(-gamma tau) (phi - phi_min)`` off the diagonal, in place."""
    phi = beliefs.phi
    decay = math.exp(-gamma * tau)
    phi -= phi_min
    phi *= decay
    phi += phi_min
    np.fill_diagonal(phi, 1.0)
    return beliefs


def attempt_delivery(msg: Message, env: Environment, beliefs: BeliefMatrix, rng: RngContract) -> bool:
    """Reception filter for one message, using the sender's row of the tick's draws."""
    eta = rng.block(msg.sent_tick, RngContract.RECEPTION)[msg.sender, 0]
    return bool(eta < env.link[msg.sender, msg.target] * beliefs.phi[msg.sender, msg.target])


def apply_reception(world: World, msg: Message) -> World:
    """Target learns the sender exactly and records the echo."""
    t, s = msg.target, msg.sender
    world.beliefs.phi[t, s] = 1.0
    world.log.last_recv_from[t, s] = world.tick
    world.log.latest_echo[t, s] = msg.echo
    world.delivered[s] += 1
    return world


def tick(world: World) -> World:
    """Advance one tick (loss stage, then communication stage)."""
    p = world.params
    n = p.n
    now = world.tick
    phi = world.beliefs.phi
    log = world.log

    loss_update(world.beliefs, p.gamma, p.tau, p.phi_min)

    agents = np.arange(n)
    u = world.rng.block(now, RngContract.SELECT)
    eta_all = world.rng.block(now, RngContract.RECEPTION)[:, 0]
    targets = world.tactic.select(agents, log, now, u)
    senders = np.flatnonzero(targets != NO_TARGET)
    world.last_sent_count = len(senders)
    if len(senders):
        dest = targets[senders]
        echo = log.last_recv_from[senders, dest]
        log.last_sent_to[senders, dest] = now
        world.sent[senders] += 1

        ok = eta_all[senders] < world.env.link[senders, dest] * phi[senders, dest]
        if ok.any():
            s, t = senders[ok], dest[ok]
            # (t, s) pairs are distinct since each sender sends once
            phi[t, s] = 1.0
            log.last_recv_from[t, s] = now
            log.latest_echo[t, s] = echo[ok]
            world.delivered[s] += 1

    world.tick = now + 1
    return world


def run(world: World, ticks: int, observers=()) -> World:
    """Advance ``ticks`` ticks, offering the world to each observer after every tick.

    An observer is any callable taking the world; objects with a ``cadence``
    attribute are only called when ``world.tick % cadence == 0``.
    """
    if ticks < 0:
        raise ValueError("ticks must be >= 0")
    hooks = [(obs, getattr(obs, "cadence", 1)) for obs in observers]
    for _ in range(ticks):
        tick(world)
        for obs, cadence in hooks:
            if world.tick % cadence == 0:
                obs(world)
    return world
