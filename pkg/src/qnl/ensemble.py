"""Seeded ensembles of independent runs.

Each run gets its own generator spawned from the master seed by run index,
so results do not depend on how runs are scheduled across workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Sequence

import numpy as np

WORKERS_ENV = "QNL_THREADS"


def as_generator(seed: int | np.random.Generator | np.random.SeedSequence | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seeds(seed: int, runs: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(runs)


def resolve_workers(workers: int | None = None) -> int:
    """Explicit value, else the environment cap, else 1."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError("workers must be at least 1")
    return workers


def _call(task: tuple[Callable[..., Any], int, np.random.SeedSequence]) -> Any:
    fn, index, seq = task
    return fn(index, np.random.default_rng(seq))


def map_runs(
    fn: Callable[[int, np.random.Generator], Any],
    runs: int,
    seed: int,
    workers: int | None = None,
) -> list[Any]:
    """Evaluate ``fn(run_index, rng)`` for every run, results in run order.

    ``fn`` must be picklable (module-level function or functools.partial)
    when more than one worker is used.
    """
    seqs: Sequence[np.random.SeedSequence] = spawn_seeds(seed, runs)
    tasks = [(fn, i, s) for i, s in enumerate(seqs)]
    n = min(resolve_workers(workers), max(runs, 1))
    if n == 1:
        return [_call(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_call, tasks))
