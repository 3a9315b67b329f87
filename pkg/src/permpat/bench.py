"""Monte Carlo sweeps: success probability against budget, minimal budgets
on a geometric ladder and log-log exponent fits.

Config files are flat ``key = value`` text; ``#`` starts a comment. Keys:

    pattern   permutation literal, e.g. 1,3,2
    family    far | reduction | template
    tester    sampler | interval (far, reduction); grid | binary (template)
    n_grid    comma-separated lengths (m values for reduction/template);
              tokens like 2^10 are accepted
    eps       proximity parameter (far only)
    trials    trials per (point, budget)
    seed      base seed
    out_dir   output directory
    rounds    rounds for the grid solver (default 1)
    target    success target (default 2/3)
    timing    1 to record wall_ms, 0 (default) to write 0 and keep output
              byte-identical across runs
    name      file stem for outputs (default sweep)

Outputs ``<name>.csv`` with one row per evaluated (point, budget),
``<name>.jsonl`` with one record per fitted exponent and, on request, a
gnuplot script.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from permpat.forge import (
    PATTERN_132,
    FarInstanceSpec,
    forge_far_instance,
    forge_reduction_pair,
    forge_template_search,
    snap_far_params,
)
from permpat.oracle import QueryOracle, paired_oracles
from permpat.partitions import uspn
from permpat.pattern import Permutation, as_pattern
from permpat.testers import (
    ValidityWarning,
    interval_test,
    sampler_test,
    template_binary_search,
    template_r_round_solver,
)

FAMILIES = {"far": ("sampler", "interval"), "reduction": ("sampler", "interval"), "template": ("grid", "binary")}
LADDER_RATIO = 2 ** 0.25
TARGET = 2 / 3


@dataclass(frozen=True)
class SweepConfig:
    pattern: Permutation
    family: str
    tester: str
    grid: tuple[int, ...]
    trials: int
    seed: int
    eps: float = 0.1
    rounds: int = 1
    target: float = TARGET
    timing: bool = False
    out_dir: str = "."
    name: str = "sweep"

    def __post_init__(self):
        object.__setattr__(self, "pattern", as_pattern(self.pattern))
        object.__setattr__(self, "grid", tuple(int(g) for g in self.grid))
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {sorted(FAMILIES)}")
        if self.tester not in FAMILIES[self.family]:
            raise ValueError(f"tester {self.tester!r} does not apply to family {self.family!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.grid or any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be non-empty and strictly increasing")
        if self.family in ("reduction", "template") and self.pattern != PATTERN_132:
            raise ValueError(f"family {self.family} is defined for the pattern 1,3,2 only")


@dataclass(frozen=True)
class PointRecord:
    point_id: int
    n_or_m: int
    q: int
    trials: int
    successes: int
    wilson_lo: float
    wilson_hi: float
    wall_ms: float


@dataclass(frozen=True)
class PointResult:
    point_id: int
    requested: int
    n_or_m: Optional[int]
    q_star: Optional[int]
    bracketed: bool
    records: tuple[PointRecord, ...]
    skipped: Optional[str] = None


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    points: tuple[PointResult, ...]

    @property
    def records(self) -> list[PointRecord]:
        return [r for p in self.points for r in p.records]


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    points_used: int


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(successes, trials).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def budget_ladder(top: int) -> list[int]:
    """Distinct rungs ceil(2^(i/4)) up to ``top`` (``top`` itself included)."""
    rungs, i = [], 0
    while True:
        q = math.ceil(LADDER_RATIO ** i - 1e-9)
        if q >= top:
            break
        if not rungs or q > rungs[-1]:
            rungs.append(q)
        i += 1
    rungs.append(top)
    return rungs


def trial_seeds(base: int, point: int, trial: int) -> tuple[int, int]:
    """(instance seed, tester seed), derived with numpy's SeedSequence
    hashing of (base, point, trial)."""
    words = np.random.SeedSequence(base, spawn_key=(point, trial)).generate_state(4, dtype=np.uint32)
    w = [int(x) for x in words]
    return (w[0] << 32) | w[1], (w[2] << 32) | w[3]


# ---------------------------------------------------------------------------
# one point


def _resolve_point(cfg: SweepConfig, point_id: int, requested: int):
    """Actual grid value and the budget ceiling, or a skip reason."""
    if cfg.family == "far":
        try:
            n, _ = snap_far_params(cfg.pattern.k, requested, cfg.eps)
        except ValueError as exc:
            return None, None, str(exc)
        return n, n, None
    if cfg.family == "reduction":
        if requested < 2:
            return None, None, "reduction needs m >= 2"
        return requested, 5 * requested, None
    if requested < 1:
        return None, None, "template needs m >= 1"
    return requested, 3 * requested + 1, None


_PARTITIONS: dict = {}


def _far_partition(pi: Permutation):
    if pi not in _PARTITIONS:
        _PARTITIONS[pi] = uspn(pi).witness
    return _PARTITIONS[pi]


def run_trial(cfg: SweepConfig, point_id: int, size: int, q: int, trial: int) -> bool:
    inst_seed, test_seed = trial_seeds(cfg.seed, point_id, trial)
    if cfg.family == "template":
        inst = forge_template_search(size, inst_seed)
        if cfg.tester == "binary":
            S, T = paired_oracles(inst.S, inst.T)
            got = template_binary_search(S, T)
            return got == inst.delta and S.queries_used + T.queries_used <= q
        S, T = paired_oracles(inst.S, inst.T, mode="rounds", rounds=cfg.rounds)
        return template_r_round_solver(S, T, cfg.rounds, q, test_seed) == inst.delta
    if cfg.family == "far":
        spec = FarInstanceSpec(cfg.pattern, _far_partition(cfg.pattern), size, cfg.eps, inst_seed)
        values, eps = forge_far_instance(spec, check_unique=False).values, cfg.eps
    else:
        values, eps = forge_reduction_pair(forge_template_search(size, inst_seed)).f_no, 0.2
    oracle = QueryOracle(values, mode="non-adaptive")
    n = len(values)
    if cfg.tester == "sampler":
        verdict = sampler_test(oracle, cfg.pattern, eps, test_seed, q=q)
    else:
        # three sub-samples of rate p each: expected query count 3pn ~ q
        verdict = interval_test(oracle, cfg.pattern, eps, test_seed, p=min(1.0, q / (3 * n)))
    return verdict.rejected


def _evaluate(cfg: SweepConfig, point_id: int, size: int, q: int) -> PointRecord:
    start = time.perf_counter()
    wins = sum(run_trial(cfg, point_id, size, q, t) for t in range(cfg.trials))
    wall = (time.perf_counter() - start) * 1000 if cfg.timing else 0.0
    lo, hi = wilson_interval(wins, cfg.trials)
    return PointRecord(point_id, size, q, cfg.trials, wins, lo, hi, round(wall, 3))


def minimal_budget(cfg: SweepConfig, point_id: int, *, full_ladder: bool = False) -> PointResult:
    """Smallest ladder rung with success >= target, found by bisection with
    fixed trial seeds (success is monotone in q for every tester here)."""
    requested = cfg.grid[point_id]
    size, top, skip = _resolve_point(cfg, point_id, requested)
    if skip:
        return PointResult(point_id, requested, None, None, False, (), skip)
    warnings.simplefilter("ignore", ValidityWarning)
    ladder = budget_ladder(top)
    seen: dict[int, PointRecord] = {}

    def ok(i: int) -> bool:
        q = ladder[i]
        if q not in seen:
            seen[q] = _evaluate(cfg, point_id, size, q)
        return seen[q].successes >= cfg.target * cfg.trials

    if full_ladder:
        for i in range(len(ladder)):
            ok(i)
    if not ok(len(ladder) - 1):
        return PointResult(point_id, requested, size, None, False, tuple(seen[q] for q in sorted(seen)))
    lo, hi = 0, len(ladder) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    bracketed = lo > 0 and not ok(lo - 1)
    return PointResult(point_id, requested, size, ladder[lo], bracketed, tuple(seen[q] for q in sorted(seen)))


def worker_count() -> int:
    env = os.environ.get("PERMPAT_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError as exc:
            raise ValueError(f"PERMPAT_THREADS must be an integer, got {env!r}") from exc
    return cap


def _point_job(args):
    cfg, point_id, full = args
    return minimal_budget(cfg, point_id, full_ladder=full)


def success_curve(cfg: SweepConfig, *, full_ladder: bool = False, workers: Optional[int] = None) -> SweepResult:
    """Run every grid point; points go to a process pool when more than one
    worker is allowed. Results are keyed by point index, so the output does
    not depend on the worker count."""
    workers = worker_count() if workers is None else workers
    jobs = [(cfg, i, full_ladder) for i in range(len(cfg.grid))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            points = list(pool.map(_point_job, jobs))
    else:
        points = [_point_job(j) for j in jobs]
    return SweepResult(cfg, tuple(sorted(points, key=lambda p: p.point_id)))


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> ExponentFit:
    """Least squares of log y on log x."""
    if len(xs) != len(ys) or len(xs) < 3:
        raise ValueError("need at least 3 points")
    if any(v <= 0 for v in list(xs) + list(ys)):
        raise ValueError("values must be positive")
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    if np.ptp(lx) == 0:
        raise ValueError("degenerate grid: all x values equal")
    res = stats.linregress(lx, ly)
    return ExponentFit(float(res.slope), float(res.stderr), float(res.intercept), len(xs))


def fit_exponent(result: SweepResult) -> ExponentFit:
    pts = [p for p in result.points if p.bracketed]
    return fit_power_law([p.n_or_m for p in pts], [p.q_star for p in pts])


# ---------------------------------------------------------------------------
# config and output

CSV_COLUMNS = ("point_id", "n_or_m", "q", "trials", "successes", "wilson_lo", "wilson_hi", "wall_ms")


def _parse_grid(text: str) -> tuple[int, ...]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "^" in tok:
            base, exp = tok.split("^")
            out.append(int(base) ** int(exp))
        else:
            out.append(int(tok))
    return tuple(out)


def parse_config_text(text: str) -> SweepConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key] = value
    grid = raw.pop("n_grid", None) or raw.pop("m_grid", None)
    required = ("pattern", "family", "tester", "trials", "seed")
    missing = [k for k in required if k not in raw] + ([] if grid else ["n_grid"])
    if missing:
        raise ValueError(f"missing config keys: {', '.join(missing)}")
    known = {"pattern", "family", "tester", "trials", "seed", "eps", "rounds",
             "target", "timing", "out_dir", "name"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return SweepConfig(
        pattern=Permutation.parse(raw["pattern"]),
        family=raw["family"],
        tester=raw["tester"],
        grid=_parse_grid(grid),
        trials=int(raw["trials"]),
        seed=int(raw["seed"]),
        eps=float(raw.get("eps", 0.1)),
        rounds=int(raw.get("rounds", 1)),
        target=float(raw.get("target", TARGET)),
        timing=raw.get("timing", "0").lower() in ("1", "true", "yes"),
        out_dir=raw.get("out_dir", "."),
        name=raw.get("name", "sweep"),
    )


def load_config(path) -> SweepConfig:
    return parse_config_text(Path(path).read_text())


def write_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in result.records:
            w.writerow([r.point_id, r.n_or_m, r.q, r.trials, r.successes,
                        f"{r.wilson_lo:.6f}", f"{r.wilson_hi:.6f}", f"{r.wall_ms:.3f}"])


def summary_records(result: SweepResult) -> list[dict]:
    cfg = result.config
    base = {"pattern": str(cfg.pattern), "family": cfg.family, "tester": cfg.tester,
            "seed": cfg.seed, "trials": cfg.trials}
    if cfg.family == "far":
        base["eps"] = cfg.eps
    if cfg.family == "template" and cfg.tester == "grid":
        base["rounds"] = cfg.rounds
    base["q_star"] = {str(p.n_or_m): p.q_star for p in result.points if p.n_or_m is not None}
    base["skipped"] = {str(p.requested): p.skipped for p in result.points if p.skipped}
    try:
        fit = fit_exponent(result)
    except ValueError as exc:
        return [dict(base, slope=None, stderr=None, points_used=0, note=str(exc))]
    return [dict(base, slope=round(fit.slope, 6), stderr=round(fit.stderr, 6), points_used=fit.points_used)]


def write_summary(result: SweepResult, path) -> None:
    with open(path, "w") as fh:
        for rec in summary_records(result):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def write_gnuplot(result: SweepResult, csv_name: str, path) -> None:
    script = f"""set datafile separator ','
set key autotitle columnhead
set logscale x
set xlabel 'budget q'
set ylabel 'success rate'
set yrange [0:1]
set title '{result.config.family} / {result.config.tester}'
plot '{csv_name}' using 3:($5/$4) with points pt 7 title 'success', \\
     {result.config.target} with lines dt 2 title 'target'
"""
    Path(path).write_text(script)


def run_sweep(cfg: SweepConfig, *, gnuplot: bool = False, workers: Optional[int] = None) -> SweepResult:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = success_curve(cfg, workers=workers)
    csv_path = out / f"{cfg.name}.csv"
    write_csv(result, csv_path)
    write_summary(result, out / f"{cfg.name}.jsonl")
    if gnuplot:
        write_gnuplot(result, csv_path.name, out / f"{cfg.name}.gp")
    return result


__all__ = [
    "CSV_COLUMNS",
    "ExponentFit",
    "PointRecord",
    "PointResult",
    "SweepConfig",
    "SweepResult",
    "budget_ladder",
    "fit_exponent",
    "fit_power_law",
    "load_config",
    "minimal_budget",
    "parse_config_text",
    "run_sweep",
    "success_curve",
    "trial_seeds",
    "wilson_interval",
    "worker_count",
]
