"""Command-line driver.

    python -m swarmcomm run       --env flat --tactic timer --gamma-bar 0.05 --out out/
    python -m swarmcomm sweep     --env er --tactic filtered --gamma-bar-grid 0.05,0.1,0.2 --out out/
    python -m swarmcomm ensemble  --seeds 0,1,2,3,4 --out out/
    python -m swarmcomm continuum --r-grid 0:3:31 --phi-min-grid 0:0.5:11 --out fig2.csv

Values come from built-in defaults, then the ``--config`` JSON file, then
flags. Exit status: 0 success, 1 configuration error, 2 runtime or I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .continuum import (
    RatePair,
    pair_residual,
    steady_state_pair,
    steady_state_symmetric,
    symmetric_residual,
)
from .core import ConfigurationError, SimParams, TacticConfig
from .experiment import AGGREGATED, EnvSpec, aggregate, ensemble, params_dict, run_protocol

log = logging.getLogger("swarmcomm")

DEFAULTS = {
    "n": 20,
    "k_period": 200,
    "gamma_bar": 0.1,
    "phi_min": 0.1,
    "tau": 1.0,
    "phi_threshold": 0.75,
    "max_hops": 3,
    "xi": 1.0,
    "beta": 1.0,
    "tactic": "timer",
    "theta_t": None,
    "theta_f": None,
    "seed": 0,
    "ticks_burnin": 10_000,
    "ticks_measure": 20_000,
    "env": "flat",
    "env_l": 0.95,
    "env_p": 0.284,
    "env_seed": 0,
    "env_file": None,
    "cadence": 10,
    "bins": 50,
    "ccs_cutoff": 0.5,
    "gamma_bar_grid": None,
    "seeds": None,
    "workers": 1,
    "out": None,
}

METRIC_COLUMNS = ("tick", "phi_hat", "phi_hat_T", "risk_norm", "ccs", "u_r")
SWEEP_COLUMNS = ("gamma_bar", "phi_hat", "phi_hat_T", "risk_norm", "ccs_fraction", "u_r_final", "ccs_omitted")


class CliIOError(RuntimeError):
    pass


def _floats(text):
    """``a,b,c`` or ``start:stop:count`` (inclusive linspace)."""
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    text = str(text).strip()
    try:
        if ":" in text:
            lo, hi, num = text.split(":")
            return [float(x) for x in np.linspace(float(lo), float(hi), int(num))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse number list {text!r}") from None


def _ints(text):
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    text = str(text).strip()
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi)))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse integer list {text!r}") from None


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigurationError("config file must hold a JSON object")
        if "gamma" in loaded and "gamma_bar" not in loaded:
            loaded = dict(loaded)
            tau = loaded.get("tau", cfg["tau"])
            k = loaded.get("k_period", cfg["k_period"])
            loaded["gamma_bar"] = loaded.pop("gamma") * tau * k
        loaded.pop("gamma", None)
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        if isinstance(loaded.get("tactic"), dict):
            tac = dict(loaded.pop("tactic"))
            loaded["tactic"] = tac.pop("kind", cfg["tactic"])
            loaded.update({k: v for k, v in tac.items() if k in ("theta_t", "theta_f")})
        cfg.update(loaded)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def build_params(cfg) -> SimParams:
    try:
        tactic = TacticConfig(cfg["tactic"], theta_t=cfg["theta_t"], theta_f=cfg["theta_f"])
        k = int(cfg["k_period"])
        return SimParams(
            n=int(cfg["n"]),
            k_period=k,
            gamma=float(cfg["gamma_bar"]) / (float(cfg["tau"]) * k),
            phi_min=float(cfg["phi_min"]),
            tau=float(cfg["tau"]),
            phi_threshold=float(cfg["phi_threshold"]),
            max_hops=int(cfg["max_hops"]),
            xi=float(cfg["xi"]),
            beta=float(cfg["beta"]),
            tactic=tactic,
            seed=int(cfg["seed"]),
            ticks_burnin=int(cfg["ticks_burnin"]),
            ticks_measure=int(cfg["ticks_measure"]),
        )
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc


def build_env(cfg, n):
    spec = EnvSpec(
        kind=cfg["env"],
        l=float(cfg["env_l"]),
        p=float(cfg["env_p"]),
        seed=int(cfg["env_seed"]),
        path=cfg["env_file"],
    )
    return spec.build(n)


def _protocol_kw(cfg):
    return {"cadence": int(cfg["cadence"]), "bins": int(cfg["bins"]), "ccs_cutoff": float(cfg["ccs_cutoff"])}


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise CliIOError(f"cannot write {path}: {exc}") from exc


def _write_json(path, obj):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise CliIOError(f"cannot write {path}: {exc}") from exc


def _out_dir(cfg_out):
    out = Path(cfg_out or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliIOError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _hist_rows(hist):
    return [(repr(float(lo)), repr(float(hi)), int(c)) for lo, hi, c in hist.rows()]


def _num(x):
    return repr(float(x))


def _provenance(cfg, params):
    resolved = params.resolved_tactic()
    return {
        "config": {**{k: v for k, v in cfg.items() if k != "out"},
                   "theta_t": resolved.theta_t, "theta_f": resolved.theta_f},
        "params": params_dict(params),
    }


def cmd_run(cfg) -> dict:
    """Burn-in then measurement; writes metrics.csv, hist.csv, links.csv, summary.json."""
    params = build_params(cfg)
    env = build_env(cfg, params.n)
    out = _out_dir(cfg.get("out"))
    res = run_protocol(params, env, **_protocol_kw(cfg))

    _write_csv(
        out / "metrics.csv",
        METRIC_COLUMNS,
        ([f.tick, _num(f.phi_hat), _num(f.phi_hat_T), _num(f.risk_norm), int(f.ccs), _num(f.u_r)]
         for f in res.recorder.frames),
    )
    _write_csv(out / "hist.csv", ("bin_lo", "bin_hi", "count"), _hist_rows(res.histogram))
    phi = res.world.beliefs.phi
    enabled = res.world.log.link_enabled
    n = params.n
    _write_csv(
        out / "links.csv",
        ("i", "j", "L_ij", "phi_ij", "link_enabled"),
        ([i, j, _num(env.link[i, j]), _num(phi[i, j]), int(enabled[i, j])]
         for i in range(n) for j in range(n) if i != j),
    )
    summary = {**res.summary, **_provenance(cfg, params)}
    _write_json(out / "summary.json", summary)
    return summary


def cmd_sweep(cfg) -> list[dict]:
    """One run per normalised loss on a shared environment; writes sweep.csv and per-point histograms."""
    grid = _floats(cfg["gamma_bar_grid"] if cfg["gamma_bar_grid"] is not None else cfg["gamma_bar"])
    if not grid:
        raise ConfigurationError("gamma_bar grid is empty")
    base = build_params(cfg)
    env = build_env(cfg, base.n)
    out = _out_dir(cfg.get("out"))
    rows = []
    for idx, gb in enumerate(grid):
        params = base.with_gamma_bar(gb)
        res = run_protocol(params, env, **_protocol_kw(cfg))
        s = res.summary
        rows.append(s)
        _write_csv(out / f"hist_{idx:03d}.csv", ("gamma_bar", "bin_lo", "bin_hi", "count"),
                   ([_num(gb), *r] for r in _hist_rows(res.histogram)))
    _write_csv(
        out / "sweep.csv",
        SWEEP_COLUMNS,
        ([_num(s["gamma_bar"]), _num(s["phi_hat"]), _num(s["phi_hat_T"]), _num(s["risk_norm"]),
          _num(s["ccs_fraction"]), _num(s["u_r_final"]), int(s["ccs_omitted"])] for s in rows),
    )
    _write_json(out / "sweep.json", {"points": rows, **_provenance(cfg, base)})
    return rows


def cmd_ensemble(cfg) -> dict:
    """Independent runs per seed; writes ensemble.csv and aggregate.json (median and IQR)."""
    seeds = _ints(cfg["seeds"]) if cfg["seeds"] is not None else [int(cfg["seed"])]
    if not seeds:
        raise ConfigurationError("ensemble needs at least one seed")
    params = build_params(cfg)
    env = build_env(cfg, params.n)
    out = _out_dir(cfg.get("out"))
    results = ensemble(params, env, seeds, workers=int(cfg["workers"]), **_protocol_kw(cfg))
    summaries = [s for s, _ in results]
    _write_csv(
        out / "ensemble.csv",
        ("seed", *AGGREGATED),
        ([s["seed"], *(_num(s[k]) for k in AGGREGATED)] for s in summaries),
    )
    agg = {"aggregate": aggregate(summaries), "seeds": seeds, **_provenance(cfg, params)}
    _write_json(out / "aggregate.json", agg)
    return agg


def continuum_rows(r_grid, phi_min_grid, r_prime=None):
    """Steady-state table rows, each ending with its quadratic residual."""
    rows = []
    for r in r_grid:
        for pm in phi_min_grid:
            if r_prime is None:
                phi = steady_state_symmetric(r, pm)
                rows.append((r, pm, phi, symmetric_residual(phi, r, pm)))
            else:
                rp = RatePair(r, r_prime, pm)
                ab, ba = steady_state_pair(rp)
                rows.append((r, r_prime, pm, ab, ba, pair_residual(ab, rp)))
    return rows


def cmd_continuum(cfg, r_grid, phi_min_grid, r_prime=None, out=None):
    if not r_grid or not phi_min_grid:
        raise ConfigurationError("r and phi_min grids must be non-empty")
    if any(r < 0 for r in r_grid) or any(not 0 <= p <= 1 for p in phi_min_grid):
        raise ConfigurationError("need r >= 0 and phi_min in [0, 1]")
    if r_prime is not None and r_prime < 0:
        raise ConfigurationError("r_prime must be >= 0")
    rows = continuum_rows(r_grid, phi_min_grid, r_prime)
    header = ("r", "phi_min", "phi", "residual") if r_prime is None else (
        "r", "r_prime", "phi_min", "phi_ab", "phi_ba", "residual")
    text_rows = [[_num(v) for v in row] for row in rows]
    if out in (None, "-"):
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(text_rows)
    else:
        _write_csv(out, header, text_rows)
    return rows


def _add_sim_flags(p):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--tactic", choices=["sequence", "random", "timer", "filtered", "filtered+", "filtered++"])
    p.add_argument("--gamma-bar", dest="gamma_bar", type=float, help="normalised loss gamma*tau*K")
    p.add_argument("--ticks-burnin", dest="ticks_burnin", type=int)
    p.add_argument("--ticks-measure", dest="ticks_measure", type=int)
    p.add_argument("--env", choices=["flat", "er", "file"])
    p.add_argument("--env-l", dest="env_l", type=float)
    p.add_argument("--env-p", dest="env_p", type=float)
    p.add_argument("--env-seed", dest="env_seed", type=int)
    p.add_argument("--env-file", dest="env_file")
    p.add_argument("--n", type=int)
    p.add_argument("--k-period", dest="k_period", type=int)
    p.add_argument("--phi-min", dest="phi_min", type=float)
    p.add_argument("--theta-t", dest="theta_t", type=int)
    p.add_argument("--theta-f", dest="theta_f", type=int)
    p.add_argument("--cadence", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--ccs-cutoff", dest="ccs_cutoff", type=float)
    p.add_argument("--out", default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="swarmcomm", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_sim_flags(sub.add_parser("run", help="single burn-in + measurement run"))
    sp = sub.add_parser("sweep", help="runs over a gamma_bar grid")
    _add_sim_flags(sp)
    sp.add_argument("--gamma-bar-grid", dest="gamma_bar_grid", help="a,b,c or start:stop:count")
    ep = sub.add_parser("ensemble", help="runs over a list of seeds")
    _add_sim_flags(ep)
    ep.add_argument("--seeds", help="a,b,c or start:stop")
    ep.add_argument("--workers", type=int)

    cp = sub.add_parser("continuum", help="continuum steady-state table")
    cp.add_argument("--r-grid", required=True)
    cp.add_argument("--phi-min-grid", required=True)
    cp.add_argument("--r-prime", type=float)
    cp.add_argument("--out", default=None, help="CSV path (default stdout)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "continuum":
            cmd_continuum({}, _floats(args.r_grid), _floats(args.phi_min_grid), args.r_prime, args.out)
            return 0
        cfg = resolve_config(args)
        if cfg.get("out") is None:
            cfg["out"] = "."
        {"run": cmd_run, "sweep": cmd_sweep, "ensemble": cmd_ensemble}[args.command](cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (CliIOError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
