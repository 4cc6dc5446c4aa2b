"""Monte Carlo sweeps over random initial networks, with CSV output.

Every run owns a generator seeded by :func:`derive_seed`, which depends only on
(master_seed, n, param, run_index). Serial and parallel sweeps therefore give
identical rows, whatever the worker count or completion order.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import warnings
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable, Sequence

import numpy as np
from scipy.stats import binomtest

from .analysis import Descriptors, descriptors
from .constructions import barabasi_albert, erdos_renyi, j_prime, j_state, s2d
from .dynamics import DynamicsKind, Status, run_count
from .state import SignedState, all_enmity, utopia

CSV_SCHEMA_VERSION = 1
THREADS_ENV = "BALANCE_THREADS"

NAMED_STATES: dict[str, Callable[[int], SignedState]] = {
    "j": j_state,
    "jprime": j_prime,
    "s2d": lambda n: s2d(_s2d_degree(n)),
    "utopia": utopia,
    "enmity": all_enmity,
}


def _s2d_degree(n: int) -> int:
    if n < 12 or (n - 4) % 8:
        raise ValueError(f"S^2_d has n = 8d + 4 vertices, got n={n}")
    return (n - 4) // 8


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: every size in ``sizes`` crossed with every value in ``params``.

    ``params`` holds ER edge probabilities, BA densities or, for
    ``family="named"``, names from NAMED_STATES.
    """

    family: str
    params: tuple
    sizes: tuple[int, ...]
    dynamics: DynamicsKind = DynamicsKind("BED")
    runs: int = 1000
    master_seed: int = 0
    max_steps: int | None = None
    exclude_jammed: bool = True

    def __post_init__(self):
        if self.family not in ("er", "ba", "named"):
            raise ValueError(f"family must be er, ba or named, got {self.family!r}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.sizes or not self.params:
            raise ValueError("sizes and params must be non-empty")
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if self.family == "named":
            bad = [p for p in self.params if p not in NAMED_STATES]
            if bad:
                raise ValueError(f"unknown named states {bad}; choose from {sorted(NAMED_STATES)}")
            object.__setattr__(self, "params", tuple(self.params))
        else:
            object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    def replace(self, **changes) -> "ExperimentConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ExperimentConfig(**values)


def _param_key(param) -> int:
    if isinstance(param, str):
        return zlib.crc32(param.encode())
    return int(round(float(param) * 10**6))


def derive_seed(master_seed: int, n: int, param, run_index: int) -> int:
    """64-bit run seed: SeedSequence([master, n, round(param * 1e6) or crc32(name), index])."""
    ss = np.random.SeedSequence([int(master_seed), int(n), _param_key(param), int(run_index)])
    return int(ss.generate_state(1, np.uint64)[0])


def initial_state(family: str, n: int, param, rng: np.random.Generator) -> SignedState:
    if family == "er":
        return erdos_renyi(n, param, rng)
    if family == "ba":
        return barabasi_albert(n, param, rng)
    if family == "named":
        return NAMED_STATES[param](n)
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class RunRecord:
    status: Status
    flips: int
    attempts: int
    before: Descriptors
    after: Descriptors


def run_once(config: ExperimentConfig, n: int, param, run_index: int) -> RunRecord:
    rng = np.random.default_rng(derive_seed(config.master_seed, n, param, run_index))
    state = initial_state(config.family, n, param, rng)
    before = descriptors(state)
    status, flips, attempts = run_count(state, config.dynamics, rng, config.max_steps)
    return RunRecord(status, flips, attempts, before, descriptors(state))


def _run_task(task) -> RunRecord:
    return run_once(*task)


def worker_count() -> int:
    cap = os.environ.get(THREADS_ENV)
    cpus = os.cpu_count() or 1
    if cap is None or cap == "":
        return cpus
    try:
        k = int(cap)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {cap!r}") from None
    if k < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {cap!r}")
    return min(k, cpus)


def collect_runs(config: ExperimentConfig, workers: int | None = None) -> dict[tuple, list[RunRecord]]:
    """Per (n, param) in sweep order, the records of all runs in index order."""
    workers = worker_count() if workers is None else workers
    cells = [(n, p) for n in config.sizes for p in config.params]
    tasks = [(config, n, p, i) for n, p in cells for i in range(config.runs)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        records = [_run_task(t) for t in tasks]
    out = {}
    for k, cell in enumerate(cells):
        out[cell] = records[k * config.runs:(k + 1) * config.runs]
    return out


@dataclass
class ResultRow:
    n: int
    param: float | str
    dynamics: str
    runs_total: int
    runs_jammed: int
    runs_steplimit: int
    mean_flips: float
    var_flips: float
    jamming_probability: float
    descriptors_before: Descriptors
    descriptors_after: Descriptors
    mean_S: float
    var_S: float
    mean_rel_clique_diff: float
    flips: list[int] = field(default_factory=list, repr=False)
    clique_sizes: list[int] = field(default_factory=list, repr=False)


def _mean(x) -> float:
    return float(np.mean(x)) if len(x) else math.nan


def _var(x) -> float:
    # unbiased; a single observation has zero spread
    if not len(x):
        return math.nan
    return float(np.var(x, ddof=1)) if len(x) > 1 else 0.0


def _mean_descriptors(ds: Sequence[Descriptors]) -> Descriptors:
    return Descriptors(_mean([d.avg_degree for d in ds]), _mean([d.clustering for d in ds]), None)


def aggregate(config: ExperimentConfig, n: int, param, records: Sequence[RunRecord]) -> ResultRow:
    """Summarise one cell. Jammed runs are dropped from every statistic except
    the counts when ``exclude_jammed`` is set; S statistics use balanced runs only."""
    jammed = sum(r.status is Status.JAMMED for r in records)
    steplimit = sum(r.status is Status.STEPLIMIT for r in records)
    kept = [r for r in records if not (config.exclude_jammed and r.status is Status.JAMMED)]
    flips = [r.flips for r in kept]
    sizes = [r.after.smaller_clique for r in kept if r.status is Status.BALANCED]
    rel = [abs(n - 2 * s) / n for s in sizes]
    return ResultRow(
        n=n,
        param=param,
        dynamics=str(config.dynamics),
        runs_total=len(records),
        runs_jammed=jammed,
        runs_steplimit=steplimit,
        mean_flips=_mean(flips),
        var_flips=_var(flips),
        jamming_probability=jammed / len(records),
        descriptors_before=_mean_descriptors([r.before for r in records]),
        descriptors_after=_mean_descriptors([r.after for r in kept]),
        mean_S=_mean(sizes),
        var_S=_var(sizes),
        mean_rel_clique_diff=_mean(rel),
        flips=flips,
        clique_sizes=sizes,
    )


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> list[ResultRow]:
    """One row per (n, param), sizes outermost, in the order given."""
    cells = collect_runs(config, workers)
    return [aggregate(config, n, p, recs) for (n, p), recs in cells.items()]


CSV_COLUMNS = (
    "n",
    "param",
    "dynamics",
    "runs_total",
    "runs_jammed",
    "runs_steplimit",
    "mean_flips",
    "var_flips",
    "jamming_probability",
    "descriptors_before_avg_degree",
    "descriptors_before_clustering",
    "descriptors_after_avg_degree",
    "descriptors_after_clustering",
    "mean_S",
    "var_S",
    "mean_rel_clique_diff",
)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        b, a = r.descriptors_before, r.descriptors_after
        w.writerow(_fmt(x) for x in (
            r.n, r.param, r.dynamics, r.runs_total, r.runs_jammed, r.runs_steplimit,
            r.mean_flips, r.var_flips, r.jamming_probability,
            b.avg_degree, b.clustering, a.avg_degree, a.clustering,
            r.mean_S, r.var_S, r.mean_rel_clique_diff,
        ))
    return buf.getvalue()


# config files


CONFIG_KEYS = ("family", "params", "sizes", "dynamics", "runs", "master_seed", "max_steps", "exclude_jammed")


def parse_config(text: str) -> ExperimentConfig:
    """Flat ``key = value`` text; lists are comma separated.

        family = er
        params = 0.0, 0.5
        sizes = 64, 128
        dynamics = CTD
        runs = 1000
        master_seed = 7
        max_steps = 200000
        exclude_jammed = true
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.read_string("[experiment]\n" + text)
    sec = parser["experiment"]
    unknown = set(sec) - set(CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    missing = {"family", "params", "sizes"} - set(sec)
    if missing:
        raise ValueError(f"missing config keys: {sorted(missing)}")
    items = lambda key: [x.strip() for x in sec[key].split(",") if x.strip()]
    kwargs = dict(family=sec["family"].strip(), params=tuple(items("params")), sizes=tuple(int(x) for x in items("sizes")))
    if "dynamics" in sec:
        kwargs["dynamics"] = DynamicsKind.parse(sec["dynamics"].strip())
    for key in ("runs", "master_seed"):
        if key in sec:
            kwargs[key] = sec.getint(key)
    if sec.get("max_steps", "").strip():
        kwargs["max_steps"] = sec.getint("max_steps")
    if "exclude_jammed" in sec:
        kwargs["exclude_jammed"] = sec.getboolean("exclude_jammed")
    return ExperimentConfig(**kwargs)


# derived reports


@dataclass
class ScalingFit:
    slope: float
    intercept: float
    slope_stderr: float
    sizes: list[int]
    mean_flips: list[float]
    stderr_flips: list[float]
    excluded: list[int]


def fit_loglog(sizes: Sequence[int], means: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares slope, intercept and slope standard error of log(mean) on log(n)."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(means, dtype=float))
    if x.size < 2:
        raise ValueError("need at least two sizes to fit a slope")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    dof = x.size - 2
    stderr = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else math.nan
    return slope, intercept, stderr


def scaling_report(config: ExperimentConfig, workers: int | None = None,
                   rows: Sequence[ResultRow] | None = None) -> ScalingFit:
    """Log-log fit of mean flips against n; needs >= 3 sizes and a single param."""
    if len(config.sizes) < 3:
        raise ValueError("scaling needs at least 3 sizes")
    if len(config.params) != 1:
        raise ValueError("scaling uses exactly one param")
    rows = run_experiment(config.replace(exclude_jammed=True), workers) if rows is None else rows
    sizes, means, errs, excluded = [], [], [], []
    for r in rows:
        if not r.flips:
            warnings.warn(f"all runs jammed at n={r.n}; size left out of the fit")
            excluded.append(r.n)
            continue
        sizes.append(r.n)
        means.append(r.mean_flips)
        errs.append(math.sqrt(r.var_flips / len(r.flips)))
    slope, intercept, stderr = fit_loglog(sizes, means)
    return ScalingFit(slope, intercept, stderr, sizes, means, errs, excluded)


@dataclass
class JamPoint:
    n: int
    param: float | str
    jammed: int
    runs: int
    probability: float
    ci_low: float
    ci_high: float


def jamming_curve(config: ExperimentConfig, workers: int | None = None, confidence: float = 0.95) -> list[JamPoint]:
    """Jamming probability per (n, param) with Wilson score intervals."""
    if config.dynamics.variant != "CTD":
        raise ValueError("jamming curves are defined for CTD only")
    out = []
    for r in run_experiment(config, workers):
        ci = binomtest(r.runs_jammed, r.runs_total).proportion_ci(confidence, method="wilson")
        out.append(JamPoint(r.n, r.param, r.runs_jammed, r.runs_total, r.jamming_probability, ci.low, ci.high))
    return out


def clique_diff_histogram(config: ExperimentConfig, bins: int = 20, workers: int | None = None,
                          rows: Sequence[ResultRow] | None = None) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per row, (probability mass, bin edges) of |n - 2S| / n over balanced runs on [0, 1]."""
    rows = run_experiment(config, workers) if rows is None else rows
    out = []
    for r in rows:
        rel = np.abs(r.n - 2 * np.asarray(r.clique_sizes, dtype=float)) / r.n
        counts, edges = np.histogram(rel, bins=bins, range=(0.0, 1.0))
        mass = counts / counts.sum() if counts.sum() else counts.astype(float)
        out.append((mass, edges))
    return out
