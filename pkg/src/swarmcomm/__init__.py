"""Cooperative swarm communication under stealth constraints.

Continuum rate equations, a discrete stochastic messaging engine with six
targeting tactics, and swarm metrics (performance, connectedness, risk).
"""
from .continuum import (
    ContinuumSystem,
    RatePair,
    integrate_rate_equations,
    steady_state_pair,
    steady_state_response,
    steady_state_symmetric,
)
from .core import (
    BeliefMatrix,
    CommLog,
    ConfigurationError,
    Environment,
    Message,
    RngContract,
    SimParams,
    TacticConfig,
)
from .engine import World, init_world, run, tick
from .envgen import er_env, flat_env, load_env, save_env
from .experiment import EnvSpec, aggregate, ensemble, run_protocol, sweep
from .metrics import (
    MetricsRecorder,
    belief_histogram,
    ccs,
    detection_probability,
    perf_agent,
    perf_agent_thresholded,
    perf_swarm,
    risk_rates,
    u_r,
)

__version__ = "0.1.0"

__all__ = [
    "ContinuumSystem",
    "RatePair",
    "integrate_rate_equations",
    "steady_state_pair",
    "steady_state_response",
    "steady_state_symmetric",
    "BeliefMatrix",
    "CommLog",
    "ConfigurationError",
    "Environment",
    "Message",
    "RngContract",
    "SimParams",
    "TacticConfig",
    "MetricsRecorder",
    "belief_histogram",
    "ccs",
    "detection_probability",
    "perf_agent",
    "perf_agent_thresholded",
    "perf_swarm",
    "risk_rates",
    "u_r",
    "World",
    "init_world",
    "run",
    "tick",
    "er_env",
    "flat_env",
    "load_env",
    "save_env",
    "EnvSpec",
    "aggregate",
    "ensemble",
    "run_protocol",
    "sweep",
]
