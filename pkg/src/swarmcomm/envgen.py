"""Environment generators and the CSV environment format.

File format: N rows of N comma-separated decimals, row = sender,
column = receiver. Diagonal entries are ignored.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import ConfigurationError, Environment

__all__ = ["flat_env", "er_env", "load_env", "save_env", "is_connected"]


def flat_env(n: int, l: float) -> Environment:
    if not 0.0 <= l <= 1.0:
        raise ConfigurationError(f"link efficiency {l} outside [0, 1]")
    return Environment(np.full((n, n), float(l)))


def er_env(n: int, p: float, seed: int) -> Environment:
    """Symmetric Erdos-Renyi 0/1 environment, one coin per unordered pair."""
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"link probability {p} outside [0, 1]")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    link = np.zeros((n, n))
    link[iu] = rng.random(len(iu[0])) < p
    link = link + link.T
    return Environment(link)


def is_connected(env: Environment, threshold: float = 0.0) -> bool:
    """Whether links above ``threshold`` join every agent (direction ignored)."""
    adj = env.link > threshold
    adj = adj | adj.T
    seen = np.zeros(env.n, dtype=bool)
    seen[0] = True
    frontier = seen.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = nxt
    return bool(seen.all())


def save_env(env: Environment, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in env.link:
            w.writerow([repr(float(x)) for x in row])


def load_env(path) -> Environment:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if any(c.strip() for c in r)]
    except OSError as exc:
        raise ConfigurationError(f"cannot read environment file {path}: {exc}") from exc
    if not rows:
        raise ConfigurationError(f"{path}: empty environment file")
    n = len(rows)
    values = np.empty((n, n))
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ConfigurationError(
                f"{path}: non-square matrix, row {i} has {len(row)} columns but there are {n} rows"
            )
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise ConfigurationError(
                    f"{path}: cannot parse {cell!r} at row {i}, column {j}"
                ) from None
    return Environment(values)
