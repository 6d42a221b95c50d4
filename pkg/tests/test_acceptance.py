"""Acceptance suite: one test per criterion at the stated sizes and tolerances.

Each test records a ``PASS`` or ``FAIL`` line; the lines are printed in the
terminal summary of any pytest run that includes this file, and also
live with ``-s``.
"""

from __future__ import annotations

import functools
import sys

import pytest

from qnl import cli
from qnl import experiments as ex


VERDICTS: list[str] = []


@functools.lru_cache(maxsize=None)
def waiting():
    return ex.run_waiting()


def verdict(number: int, title: str, metrics) -> None:
    metrics = list(metrics)
    failed = [m for m in metrics if not m.passed]
    line = f"{'PASS' if not failed else 'FAIL'} criterion {number:2d}: {title} ({len(metrics) - len(failed)}/{len(metrics)} metrics)"
    lines = [line] + [f"    {m.name}: estimate {m.estimate!r}, target {m.target!r}, tolerance {m.tolerance!r}"
                      for m in failed]
    VERDICTS.extend(lines)
    print("\n".join(lines))
    assert metrics, "criterion produced no metrics"
    assert not failed, [m.name for m in failed]


def test_criterion_01_pendulum_spectrum():
    verdict(1, "pendulum mark-weighted spectrum", ex.run_pendulum(runs=100, periods=10**7).metrics)


def test_criterion_02_generalized_rabi():
    verdict(2, "Rabi ODE vs closed form and steady state", ex.run_rabi().metrics)


def test_criterion_03_waiting_times():
    metrics = [m for m in waiting().metrics if not m.name.startswith("distance")]
    verdict(3, "waiting-time poles, weights, normalisation and rate", metrics)


def test_criterion_04_distance_table():
    metrics = [m for m in waiting().metrics if m.name.startswith("distance")]
    verdict(4, "distance table at gamma = 0.001", metrics)


def test_criterion_05_renewal_bridge():
    verdict(5, "renewal Monte Carlo bridge", ex.run_points(checks=("bridge",)).metrics)


def test_criterion_06_darkroom():
    verdict(6, "dark-room g, S and V", ex.run_darkroom().metrics)


def test_criterion_07_thinning():
    verdict(7, "thinning invariance of g", ex.run_points(checks=("thinning",)).metrics)


def test_criterion_08_superposition():
    verdict(8, "superposition of 50 renewal streams", ex.run_points(checks=("superposition",)).metrics)


def test_criterion_09_cstate():
    verdict(9, "C-state photocount noise and phase invariance", ex.run_cstate().metrics)


def test_criterion_10_cavity():
    verdict(10, "cavity stationary law and Langevin spectrum", ex.run_cavity().metrics)


def test_criterion_11_circuit_identities():
    verdict(11, "circuit identities", ex.run_circuit().metrics)


def test_criterion_12_reference_math():
    verdict(12, "reference integrals, cubic and bi-complex checks", ex.run_integrals().metrics)


REPRO = {
    "pendulum": ["--runs", "3", "--periods", "2e5", "--M", "1", "--m", "0.005", "--dz", "1e-5"],
    "points": ["--runs", "3", "--horizon", "3000", "--copies", "5"],
    "darkroom": ["--runs", "3", "--horizon", "3000"],
    "rabi": ["--points", "101"],
    "waiting": ["--points", "101"],
    "circuit": [],
    "cstate": ["--runs", "3", "--events", "5000"],
    "cavity": ["--atoms", "6", "--jumps", "2e4", "--small-jumps", "2e4", "--spectrum-atoms", "20",
               "--spectrum-jumps", "1e5"],
    "integrals": ["--cubics", "30"],
}
STOCHASTIC = {"pendulum", "points", "darkroom", "cstate"}


def _outputs(tmp_path, name, tag, extra):
    out = tmp_path / f"{name}-{tag}.csv"
    cli.main([name, *REPRO[name], "--seed", "7", "--out", str(out), *extra])
    return out.read_bytes(), cli.summary_path(out).read_bytes()


def test_criterion_13_reproducibility(tmp_path):
    metrics = []
    for name in REPRO:
        first = _outputs(tmp_path, name, "a", ["--workers", "1"] if name in STOCHASTIC else [])
        again = _outputs(tmp_path, name, "b", ["--workers", "1"] if name in STOCHASTIC else [])
        metrics.append(ex.Metric(f"{name}_repeat", float(first == again), 1.0, 0.0))
        if name in STOCHASTIC:
            wide = _outputs(tmp_path, name, "c", ["--workers", "8"])
            metrics.append(ex.Metric(f"{name}_workers_1_vs_8", float(first == wide), 1.0, 0.0))
    verdict(13, "byte-identical CLI output across repeats and worker counts", metrics)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
