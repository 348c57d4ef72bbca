"""Burn-in / measurement protocol, parameter sweeps and seed ensembles."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .core import ConfigurationError, Environment, SimParams
from .engine import World, init_world, run
from .envgen import er_env, flat_env, load_env
from .metrics import BeliefHistogram, MetricsRecorder, risk_rates, u_r, DegenerateEnvironmentError

__all__ = ["EnvSpec", "RunResult", "run_protocol", "sweep", "ensemble", "aggregate"]


@dataclass(frozen=True)
class EnvSpec:
    """How to build the environment: ``flat``, ``er`` or ``file``."""

    kind: str = "flat"
    l: float = 0.95
    p: float = 0.284
    seed: int = 0
    path: str | None = None

    def build(self, n: int) -> Environment:
        if self.kind == "flat":
            return flat_env(n, self.l)
        if self.kind == "er":
            return er_env(n, self.p, self.seed)
        if self.kind == "file":
            if not self.path:
                raise ConfigurationError("env 'file' needs a path")
            env = load_env(self.path)
            if env.n != n:
                raise ConfigurationError(f"environment file has {env.n} agents, config has n={n}")
            return env
        raise ConfigurationError(f"unknown environment kind {self.kind!r}")


@dataclass
class RunResult:
    params: SimParams
    world: World
    recorder: MetricsRecorder
    histogram: BeliefHistogram
    measure_ticks: int
    summary: dict = field(default_factory=dict)


def _mean(x):
    return float(np.mean(x)) if len(x) else float("nan")


def run_protocol(
    params: SimParams,
    env: Environment,
    *,
    cadence: int = 10,
    bins: int = 50,
    ccs_cutoff: float = 0.5,
    observers=(),
) -> RunResult:
    """Burn in for ``params.ticks_burnin`` ticks, then sample while measuring.

    The summary holds time averages over the measurement samples, the
    normalised risk over the whole measurement window and the final U_r.
    """
    world = init_world(params, env)
    run(world, params.ticks_burnin)
    hist = BeliefHistogram(bins)
    rec = MetricsRecorder(cadence, histogram=hist)
    rec.start(world)
    sent0 = world.sent.copy()
    run(world, params.ticks_measure, [rec, *observers])

    m = params.ticks_measure
    if m > 0:
        risk = risk_rates(world.sent - sent0, m, params)[2]
    else:
        risk = float("nan")
    try:
        ur_final = u_r(world.beliefs, env, params.phi_threshold)
    except DegenerateEnvironmentError:
        ur_final = float("nan")
    ccs_fraction = _mean(rec.column("ccs"))
    summary = {
        "gamma_bar": params.gamma_bar,
        "phi_hat": _mean(rec.column("phi_hat")),
        "phi_hat_T": _mean(rec.column("phi_hat_T")),
        "risk_norm": risk,
        "ccs_fraction": ccs_fraction,
        "u_r_final": ur_final,
        "ccs_omitted": bool(not ccs_fraction >= ccs_cutoff),
        "samples": len(rec.frames),
        "seed": params.seed,
    }
    return RunResult(params, world, rec, hist, m, summary)


def sweep(params: SimParams, env: Environment, gamma_bars, **kw) -> list[RunResult]:
    """One protocol run per normalised loss, all on the same environment."""
    gamma_bars = list(gamma_bars)
    if not gamma_bars:
        raise ConfigurationError("gamma_bar grid is empty")
    return [run_protocol(params.with_gamma_bar(g), env, **kw) for g in gamma_bars]


def _ensemble_member(args):
    params, env, kw = args
    res = run_protocol(params, env, **kw)
    # worlds hold generators; ship summaries and histograms only
    return res.summary, res.histogram.counts


def ensemble(params: SimParams, env: Environment, seeds, workers: int = 1, **kw):
    """Independent runs per seed, returned in seed order as ``(summary, counts)`` pairs."""
    seeds = list(seeds)
    if not seeds:
        raise ConfigurationError("ensemble needs at least one seed")
    jobs = [(replace(params, seed=s), env, kw) for s in seeds]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_ensemble_member, jobs))
    return [_ensemble_member(j) for j in jobs]


AGGREGATED = ("phi_hat", "phi_hat_T", "risk_norm", "ccs_fraction", "u_r_final")


def aggregate(summaries, keys=AGGREGATED) -> dict:
    """Median and interquartile range of each metric across runs."""
    out = {}
    for k in keys:
        vals = np.array([s[k] for s in summaries], dtype=float)
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        out[k] = {"median": float(med), "q1": float(q1), "q3": float(q3), "iqr": float(q3 - q1)}
    return out


def params_dict(params: SimParams) -> dict:
    d = asdict(params)
    d["gamma_bar"] = params.gamma_bar
    return d
