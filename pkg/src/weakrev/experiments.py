"""Experiment runner behind the CLI: grids in, CSV rows out.

Each experiment sweeps a parameter grid, optimizes the reversal strength
where that is part of the protocol, and returns deterministic rows sorted
by (n, s, p). Point failures are recorded in the row's `extra` column and
never abort the run. The `oracle_suite` experiment cross-checks every
closed form against its dense twin and reports maximum deviations.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .compact import protocol_compact, transmissivity
from .dense import protocol_dense
from .eig import herm_eigenvalues
from .errors import BracketError, NumericalError, UsageError
from .fidelity import (
    UnknownQubit,
    fidelity_is_closed,
    fidelity_tel_closed,
    simulate_splitting_dense,
    simulate_teleportation_dense,
)
from .measures import ln_block_eigenvalue, ln_dense, mw_dense, mw_global_entanglement
from .optimize import find_critical_p, maximize_over_r
from .params import GhzParams, ProtocolParams

EXPERIMENTS = (
    "ln_vs_p",
    "mw_vs_p",
    "critical_ln",
    "critical_mw",
    "transmissivity_vs_s",
    "tel_fidelity_vs_p",
    "is_fidelity_vs_p",
    "oracle_suite",
)

DEATH_THRESHOLD = 1e-3

DEFAULT_S_LIST = (0.0, 0.3, 0.5, 0.7)
DEFAULT_P_GRID = (0.0, 1.0, 0.005)
_DEFAULT_N = {
    "ln_vs_p": (4, 8),
    "mw_vs_p": (4, 8),
    "critical_ln": tuple(range(4, 101, 4)),
    "critical_mw": tuple(range(4, 101, 4)),
    "transmissivity_vs_s": (4, 8, 12, 24),
    "tel_fidelity_vs_p": (4, 8),
    "is_fidelity_vs_p": (4, 8),
    "oracle_suite": (),
}

_MEASURE_EXPERIMENTS = {"ln_vs_p", "mw_vs_p", "critical_ln", "critical_mw"}
_EVEN_N_EXPERIMENTS = {"mw_vs_p", "critical_mw"}
_FIDELITY_EXPERIMENTS = {"tel_fidelity_vs_p", "is_fidelity_vs_p"}

CSV_COLUMNS = ("experiment", "n", "theta", "s", "p", "r_opt", "value",
               "transmissivity", "extra")


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid selection for one experiment; None lists mean package defaults."""

    experiment: str
    n_list: tuple[int, ...] | None = None
    s_list: tuple[float, ...] | None = None
    theta: float = math.pi / 2.0
    p_grid: tuple[float, float, float] = DEFAULT_P_GRID
    m: int | None = None
    output_path: str | None = None


@dataclass(frozen=True)
class CsvRow:
    experiment: str
    n: int
    theta: float | None
    s: float | None
    p: float | None
    r_opt: float | None
    value: float | None
    transmissivity: float | None
    extra: str


def _thread_count() -> int:
    raw = os.environ.get("WEAKREV_THREADS", "").strip()
    if not raw:
        return 1
    try:
        count = int(raw)
    except ValueError:
        raise UsageError(f"WEAKREV_THREADS must be an integer, got {raw!r}") from None
    if count < 1:
        raise UsageError(f"WEAKREV_THREADS must be at least 1, got {count}")
    return count


def _run_tasks(tasks):
    threads = _thread_count()
    if threads == 1 or len(tasks) < 2:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda task: task(), tasks))


def _p_values(grid: tuple[float, float, float]) -> list[float]:
    start, stop, step = grid
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    values = [start + i * step for i in range(count)]
    while values and values[-1] > stop + 1e-12:
        values.pop()
    return values


def _resolved_grids(config: ExperimentConfig):
    """Validate the config and fill experiment defaults; UsageError on bad input."""
    exp = config.experiment
    if exp not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {exp!r}; choose one of {', '.join(EXPERIMENTS)}")

    n_list = tuple(config.n_list) if config.n_list else _DEFAULT_N[exp]
    s_list = tuple(config.s_list) if config.s_list else DEFAULT_S_LIST

    if exp != "oracle_suite":
        if not n_list:
            raise UsageError("n list must not be empty")
        if not s_list:
            raise UsageError("s list must not be empty")
        for n in n_list:
            if not (isinstance(n, int) and n >= 2):
                raise UsageError(f"qubit counts must be integers >= 2, got {n!r}")
        if exp in _EVEN_N_EXPERIMENTS and any(n % 2 for n in n_list):
            raise UsageError(f"{exp} needs even qubit counts, got {n_list}")
        if exp in _FIDELITY_EXPERIMENTS and any(n < 3 for n in n_list):
            raise UsageError(f"{exp} needs n >= 3, got {n_list}")
        for s in s_list:
            if not 0.0 <= s < 1.0:
                raise UsageError(f"weak strengths must lie in [0, 1), got {s!r}")

    if not 0.0 <= config.theta <= math.pi:
        raise UsageError(f"theta must lie in [0, pi], got {config.theta!r}")
    if exp in _FIDELITY_EXPERIMENTS and abs(config.theta - math.pi / 2.0) > 1e-12:
        raise UsageError(f"{exp} uses the symmetric resource; theta must be pi/2")

    start, stop, step = config.p_grid
    if not step > 0.0:
        raise UsageError(f"p-grid step must be positive, got {step!r}")
    if not (0.0 <= start <= stop <= 1.0):
        raise UsageError(f"p-grid [{start!r}, {stop!r}] must satisfy 0 <= start <= stop <= 1")

    if config.m is not None:
        if not (isinstance(config.m, int) and config.m >= 1):
            raise UsageError(f"bipartition m must be a positive integer, got {config.m!r}")
        for n in n_list:
            if not config.m <= n - 1:
                raise UsageError(f"bipartition m={config.m} invalid for n={n}")

    return n_list, s_list, _p_values(config.p_grid)


def _measure_value(kind: str, n: int, theta: float, s: float, p: float,
                   r: float, m: int | None) -> float:
    gp = GhzParams(theta=theta, n=n)
    pp = ProtocolParams(s=s, p=p, r=r, m=m)
    if kind == "ln":
        return ln_block_eigenvalue(gp, pp).e_ln
    if kind == "mw":
        return mw_global_entanglement(gp, pp).e_mw
    if kind == "tel":
        return fidelity_tel_closed(n, s, p, r)
    if kind == "is":
        return fidelity_is_closed(n, s, p, r)
    raise UsageError(f"unknown measure kind {kind!r}")


def _sweep_task(exp: str, kind: str, n: int, theta: float, s: float,
                p: float, m: int | None):
    def work() -> CsvRow:
        gp = GhzParams(theta=theta, n=n)

        def objective(r: float) -> float:
            return _measure_value(kind, n, theta, s, p, r, m)

        def success(r: float) -> float:
            return transmissivity(gp, ProtocolParams(s=s, p=p, r=r))

        try:
            opt = maximize_over_r(objective, transmissivity=success)
        except NumericalError as exc:
            return CsvRow(exp, n, theta, s, p, None, None, None,
                          f"{kind} failed: {type(exc).__name__}: {exc}")
        return CsvRow(exp, n, theta, s, p, opt.r_opt, opt.value_opt,
                      opt.transmissivity_at_opt, kind)

    return work


def _critical_task(exp: str, kind: str, n: int, theta: float, s: float,
                   p_lo: float, p_hi: float, m: int | None):
    def work() -> CsvRow:
        def curve(p: float) -> float:
            return maximize_over_r(
                lambda r: _measure_value(kind, n, theta, s, p, r, m)).value_opt

        try:
            res = find_critical_p(curve, DEATH_THRESHOLD, p_lo, p_hi)
        except (BracketError, NumericalError) as exc:
            return CsvRow(exp, n, theta, s, None, None, None, None,
                          f"{kind} failed: {type(exc).__name__}: {exc}")
        return CsvRow(exp, n, theta, s, None, None, res.p_critical, None, kind)

    return work


def _transmissivity_task(exp: str, n: int, theta: float, s: float, p: float):
    def work() -> CsvRow:
        gp = GhzParams(theta=theta, n=n)

        def objective(r: float) -> float:
            return ln_block_eigenvalue(gp, ProtocolParams(s=s, p=p, r=r)).e_ln

        def success(r: float) -> float:
            return transmissivity(gp, ProtocolParams(s=s, p=p, r=r))

        try:
            opt = maximize_over_r(objective, transmissivity=success)
        except NumericalError as exc:
            return CsvRow(exp, n, theta, s, p, None, None, None,
                          f"transmissivity failed: {type(exc).__name__}: {exc}")
        return CsvRow(exp, n, theta, s, p, opt.r_opt, opt.transmissivity_at_opt,
                      opt.transmissivity_at_opt, "transmissivity(ln-optimized)")

    return work


def _sort_key(row: CsvRow):
    return (row.n, -1.0 if row.s is None else row.s,
            -1.0 if row.p is None else row.p, row.extra)


def run_experiment(config: ExperimentConfig):
    """Run one experiment; returns (rows, summary).

    Rows come back sorted by (n, s, p). The summary records grid sizes,
    whether default grids were used, and per-check deviations for the
    oracle suite.
    """
    n_list, s_list, p_values = _resolved_grids(config)
    exp = config.experiment

    if exp == "oracle_suite":
        return _run_oracle_suite()

    tasks = []
    if exp in ("ln_vs_p", "mw_vs_p"):
        kind = "ln" if exp == "ln_vs_p" else "mw"
        for n in n_list:
            for s in s_list:
                for p in p_values:
                    tasks.append(_sweep_task(exp, kind, n, config.theta, s, p, config.m))
    elif exp in ("critical_ln", "critical_mw"):
        kind = "ln" if exp == "critical_ln" else "mw"
        if not p_values or len(p_values) < 2:
            raise UsageError("critical experiments need a p range, not a single point")
        p_lo, p_hi = p_values[0], p_values[-1]
        for n in n_list:
            for s in s_list:
                tasks.append(_critical_task(exp, kind, n, config.theta, s, p_lo, p_hi, config.m))
    elif exp == "transmissivity_vs_s":
        p_fixed = p_values[0]
        for n in n_list:
            for s in s_list:
                tasks.append(_transmissivity_task(exp, n, config.theta, s, p_fixed))
    elif exp in _FIDELITY_EXPERIMENTS:
        kind = "tel" if exp == "tel_fidelity_vs_p" else "is"
        for n in n_list:
            for s in s_list:
                for p in p_values:
                    tasks.append(_sweep_task(exp, kind, n, config.theta, s, p, None))

    rows = _run_tasks(tasks)
    rows.sort(key=_sort_key)
    failures = sum(1 for row in rows if "failed" in row.extra)
    summary = {
        "experiment": exp,
        "rows": len(rows),
        "failures": failures,
        "threads": _thread_count(),
        "n_list": list(n_list),
        "s_list": list(s_list),
        "s_list_is_default": config.s_list is None or tuple(config.s_list) == DEFAULT_S_LIST,
        "p_points": len(p_values),
        "theta": config.theta,
    }
    return rows, summary


# --- oracle suite -----------------------------------------------------------

def _check_ln_closed_vs_dense() -> float:
    dev = 0.0
    for n in (3, 4, 5):
        for theta in (math.pi / 3.0, 2.0 * math.pi / 3.0):
            gp = GhzParams(theta=theta, n=n)
            for s in (0.0, 0.4):
                for p in (0.0, 0.35, 0.8):
                    for r in (0.0, 0.45):
                        state = protocol_dense(gp, ProtocolParams(s=s, p=p, r=r))
                        for m in sorted({1, n // 2}):
                            pp = ProtocolParams(s=s, p=p, r=r, m=m)
                            closed = ln_block_eigenvalue(gp, pp)
                            dense = ln_dense(state, m)
                            dev = max(dev, abs(closed.e_ln - dense.e_ln),
                                      abs(closed.negativity - dense.negativity))
    return dev


def _check_mw_closed_vs_dense() -> float:
    dev = 0.0
    for n in (2, 4, 6):
        for theta in (math.pi / 3.0, math.pi / 2.0, 2.0 * math.pi / 3.0):
            gp = GhzParams(theta=theta, n=n)
            for s in (0.0, 0.4):
                for p in (0.0, 0.35, 0.8):
                    for r in (0.0, 0.45):
                        pp = ProtocolParams(s=s, p=p, r=r)
                        closed = mw_global_entanglement(gp, pp)
                        dense = mw_dense(protocol_dense(gp, pp))
                        dev = max(dev, abs(closed.c_n - dense.c_n),
                                  abs(closed.e_mw - dense.e_mw))
    return dev


def _check_compact_vs_dense() -> float:
    from .compact import compact_to_dense

    dev = 0.0
    for n in (2, 3, 4, 5, 6):
        for theta in (math.pi / 6.0, math.pi / 2.0, 2.6):
            gp = GhzParams(theta=theta, n=n)
            for s in (0.0, 0.5):
                for p in (0.0, 0.5, 1.0):
                    for r in (0.0, 0.6):
                        pp = ProtocolParams(s=s, p=p, r=r)
                        lhs = compact_to_dense(protocol_compact(gp, pp)).matrix
                        rhs = protocol_dense(gp, pp).matrix
                        dev = max(dev, float(np.abs(lhs - rhs).max()))
    return dev


def _check_norm_vs_success() -> float:
    dev = 0.0
    for n in (2, 5, 8, 33, 64):
        for theta in (math.pi / 6.0, math.pi / 2.0, 2.6):
            gp = GhzParams(theta=theta, n=n)
            for s in (0.0, 0.5):
                for p in (0.0, 0.5, 1.0):
                    for r in (0.0, 0.6):
                        pp = ProtocolParams(s=s, p=p, r=r)
                        norm = protocol_compact(gp, pp).norm
                        dev = max(dev, abs(norm - transmissivity(gp, pp)))
    return dev


def _fidelity_sim_grid():
    for n in (3, 4):
        for s in (0.0, 0.3):
            for p in (0.0, 0.4, 1.0):
                for r in (0.0, 0.5):
                    yield n, s, p, r


def _check_tel_closed_vs_sim() -> float:
    psi0 = UnknownQubit(a=0.6 + 0.0j, b=0.8j)
    dev = 0.0
    for n, s, p, r in _fidelity_sim_grid():
        gp = GhzParams(theta=math.pi / 2.0, n=n)
        pp = ProtocolParams(s=s, p=p, r=r)
        _, f_sim = simulate_teleportation_dense(gp, pp, psi0)
        dev = max(dev, abs(f_sim - fidelity_tel_closed(n, s, p, r)))
    return dev


def _check_is_closed_vs_sim() -> float:
    psi0 = UnknownQubit(a=0.6 + 0.0j, b=0.8j)
    dev = 0.0
    for n, s, p, r in _fidelity_sim_grid():
        gp = GhzParams(theta=math.pi / 2.0, n=n)
        pp = ProtocolParams(s=s, p=p, r=r)
        f_sim = simulate_splitting_dense(gp, pp, psi0)
        dev = max(dev, abs(f_sim - fidelity_is_closed(n, s, p, r)))
    return dev


def _check_eig_reconstruction() -> float:
    rng = np.random.default_rng(20260816)
    dev = 0.0
    for dim in (6, 24):
        raw = rng.normal(size=(dim, dim)) + 1.0j * rng.normal(size=(dim, dim))
        a = raw + raw.conj().T
        res = herm_eigenvalues(a, want_vectors=True)
        rebuilt = (res.vectors * res.eigenvalues) @ res.vectors.conj().T
        dev = max(dev, float(np.abs(a - rebuilt).max()))
    return dev


_ORACLE_CHECKS = (
    ("ln_closed_vs_dense", 5, 1e-9, _check_ln_closed_vs_dense),
    ("mw_closed_vs_dense", 6, 1e-9, _check_mw_closed_vs_dense),
    ("compact_vs_dense", 6, 1e-12, _check_compact_vs_dense),
    ("norm_vs_success", 64, 1e-12, _check_norm_vs_success),
    ("tel_closed_vs_sim", 4, 1e-8, _check_tel_closed_vs_sim),
    ("is_closed_vs_sim", 4, 1e-8, _check_is_closed_vs_sim),
    ("eig_reconstruction", 0, 1e-9, _check_eig_reconstruction),
)


def _run_oracle_suite():
    rows = []
    checks = {}
    ok = True
    for name, max_n, tol, func in _ORACLE_CHECKS:
        dev = func()
        passed = dev <= tol
        ok = ok and passed
        checks[name] = {"max_dev": dev, "tol": tol, "ok": passed}
        rows.append(CsvRow("oracle_suite", max_n, None, None, None, None, dev, None,
                           f"{name} tol {tol:g} {'ok' if passed else 'FAIL'}"))
    summary = {
        "experiment": "oracle_suite",
        "rows": len(rows),
        "failures": sum(1 for c in checks.values() if not c["ok"]),
        "threads": _thread_count(),
        "checks": checks,
        "ok": ok,
    }
    return rows, summary


# --- CSV --------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".12g")


def emit_csv(rows, path) -> None:
    """Write rows as UTF-8 CSV with a header, streaming from any iterable.

    `path` may be a filesystem path or an open text handle (left open).
    Floats are printed with 12 significant digits, so identical inputs
    produce byte-identical files.
    """
    own = False
    if hasattr(path, "write"):
        handle = path
    else:
        try:
            handle = open(path, "w", encoding="utf-8", newline="")
        except OSError as exc:
            raise OSError(f"cannot write CSV to {path!r}: {exc}") from exc
        own = True
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow((
                row.experiment, _fmt(row.n), _fmt(row.theta), _fmt(row.s),
                _fmt(row.p), _fmt(row.r_opt), _fmt(row.value),
                _fmt(row.transmissivity), row.extra,
            ))
    finally:
        if own:
            handle.close()
