"""Seeded benchmark campaigns, loss landscapes and CSV reports.

Seeds are derived with :class:`numpy.random.SeedSequence`:

* instance seed  = ``SeedSequence([base_seed, size, run]).generate_state(1, uint64)[0]``
* algorithm seed = ``SeedSequence([instance_seed, crc32(tag)]).generate_state(1, uint64)[0]``

Everything written to ``records.jsonl`` and the metric CSVs is a pure
function of the config. Timings are measured but kept in ``timings.jsonl``
and ``runtime.csv``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .baselines import QaoaLoss, VqeLoss, energy
from .blockencoding import BenqoLoss
from .errors import InvalidInputError, ResourceLimitError
from .metrics import MetricBundle, aggregate, filter_outliers, metric_bundle
from .optimizers import (
    OptimizationTrace,
    TraceStep,
    chain_rule_gradient,
    initial_parameters,
    nelder_mead_minimize,
    ngd_minimize,
    parameter_shift_gradient,
    powell_minimize,
)
from .problems import (
    Extrema,
    IsingModel,
    TourExtremes,
    TspEncoding,
    WeightedGraph,
    brute_force_extrema,
    make_rng,
    maxcut_ising,
    random_complete_graph,
    tour_extremes,
    tsp_encode,
)
from .statevector import uniform_state

log = logging.getLogger(__name__)

ALGORITHMS = ("benqo+ngd", "qaoa+ngd", "qaoa+gradfree", "vqe+ngd", "vqe+powell", "uniform-baseline")
_SPLIT = {
    "benqo+ngd": ("benqo", "ngd"),
    "qaoa+ngd": ("qaoa", "ngd"),
    "qaoa+gradfree": ("qaoa", "nelder-mead"),
    "vqe+ngd": ("vqe", "ngd"),
    "vqe+powell": ("vqe", "powell"),
    "uniform-baseline": ("uniform", "none"),
}
DEFAULT_WEIGHTS = {"maxcut": (0.0, 10.0), "tsp": (0.0, 100.0)}
SIZE_GUARD = {"maxcut": 14, "tsp": 5}


@dataclass
class CampaignConfig:
    problem: str = "maxcut"
    sizes: list[int] = field(default_factory=lambda: [3])
    runs: int = 100
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    k_max: int = 20
    budget: int = 1000
    base_seed: int = 0
    weight_ranges: dict[str, list[float]] = field(
        default_factory=lambda: {k: list(v) for k, v in DEFAULT_WEIGHTS.items()}
    )
    benqo_backend: str = "circuit"
    gradient_mode: str = "shift"
    max_size: int | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.problem not in DEFAULT_WEIGHTS:
            raise InvalidInputError(f"unknown problem {self.problem!r}")
        if self.runs < 1:
            raise InvalidInputError("runs must be >= 1")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise InvalidInputError(f"unknown algorithms {sorted(unknown)}")
        if self.gradient_mode not in ("shift", "chain"):
            raise InvalidInputError(f"gradient_mode must be 'shift' or 'chain', got {self.gradient_mode!r}")
        self.sizes = [int(s) for s in self.sizes]

    @property
    def size_guard(self) -> int:
        return SIZE_GUARD[self.problem] if self.max_size is None else self.max_size

    @property
    def weight_range(self) -> tuple[float, float]:
        lo, hi = self.weight_ranges.get(self.problem, DEFAULT_WEIGHTS[self.problem])
        return float(lo), float(hi)

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise InvalidInputError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "CampaignConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0])


def instance_seed(base_seed: int, size: int, run: int) -> int:
    return _seed(base_seed, size, run)


def algorithm_seed(inst_seed: int, tag: str) -> int:
    return _seed(inst_seed, zlib.crc32(tag.encode()))


# ---------------------------------------------------------------------------
# instances


@dataclass(eq=False)
class Instance:
    instance_id: str
    problem: str
    size: int
    run: int
    seed: int
    graph: WeightedGraph
    model: IsingModel
    extrema: Extrema
    encoding: TspEncoding | None = None
    tours: TourExtremes | None = None

    @property
    def n_qubits(self) -> int:
        return self.model.n

    def to_dict(self) -> dict:
        d = {"instance_id": self.instance_id, "problem": self.problem, "seed": self.seed}
        d.update(self.encoding.to_dict() if self.encoding is not None else self.graph.to_dict())
        return d


def build_instance(problem: str, size: int, seed: int, weight_range=None, run: int = 0) -> Instance:
    lo, hi = DEFAULT_WEIGHTS[problem] if weight_range is None else weight_range
    graph = random_complete_graph(size, lo, hi, seed)
    enc = tours = None
    if problem == "maxcut":
        model = maxcut_ising(graph)
    elif problem == "tsp":
        enc = tsp_encode(graph)
        model = enc.ising
        tours = tour_extremes(enc)
    else:
        raise InvalidInputError(f"unknown problem {problem!r}")
    return Instance(
        f"{problem}-n{size}-r{run:03d}", problem, size, run, seed, graph, model,
        brute_force_extrema(model), enc, tours,
    )


def campaign_instances(cfg: CampaignConfig, sizes: Sequence[int] | None = None) -> list[Instance]:
    out = []
    for size in cfg.sizes if sizes is None else sizes:
        for run in range(cfg.runs):
            seed = instance_seed(cfg.base_seed, size, run)
            out.append(build_instance(cfg.problem, size, seed, cfg.weight_range, run))
    return out


# ---------------------------------------------------------------------------
# experiment records


@dataclass
class ExperimentRecord:
    instance_id: str
    problem: str
    size: int
    run: int
    tag: str
    seed: int
    trace: OptimizationTrace | None = None
    initial: MetricBundle | None = None
    metrics: list[MetricBundle] = field(default_factory=list)
    cpu_time: float = 0.0
    wall_time: float = 0.0
    error: str | None = None

    @property
    def algorithm(self) -> str:
        return _SPLIT[self.tag][0]

    @property
    def optimizer(self) -> str:
        return _SPLIT[self.tag][1]

    @property
    def final(self) -> MetricBundle | None:
        return self.metrics[-1] if self.metrics else None

    @property
    def sort_key(self) -> tuple:
        return (self.size, self.run, ALGORITHMS.index(self.tag))

    def to_dict(self) -> dict:
        t = self.trace
        return {
            "instance_id": self.instance_id,
            "problem": self.problem,
            "size": self.size,
            "run": self.run,
            "algorithm": self.algorithm,
            "optimizer": self.optimizer,
            "tag": self.tag,
            "seed": self.seed,
            "error": self.error,
            "status": None if t is None else t.status,
            "theta0": None if t is None else t.theta0.tolist(),
            "loss0": None if t is None else t.loss0,
            "trace": [] if t is None else [s.to_dict() for s in t.iterations],
            "initial": None if self.initial is None else dataclasses.asdict(self.initial),
            "metrics": [dataclasses.asdict(m) for m in self.metrics],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentRecord":
        trace = None
        if d.get("theta0") is not None:
            trace = OptimizationTrace(
                np.asarray(d["theta0"], dtype=float),
                d["loss0"],
                [TraceStep(s["k"], np.asarray(s["theta"], dtype=float), s["loss"], s["evals"]) for s in d["trace"]],
                d["status"],
            )
        return cls(
            d["instance_id"], d["problem"], d["size"], d["run"], d["tag"], d["seed"], trace,
            None if d["initial"] is None else MetricBundle(**d["initial"]),
            [MetricBundle(**m) for m in d["metrics"]],
            error=d.get("error"),
        )


def make_loss(algorithm: str, model: IsingModel, benqo_backend: str = "circuit"):
    """Loss object exposing ``n_params``, ``state(theta)`` and ``__call__(theta)``."""
    if algorithm == "benqo":
        return BenqoLoss(model, backend=benqo_backend)
    if algorithm == "qaoa":
        return QaoaLoss(model)
    if algorithm == "vqe":
        return VqeLoss(model)
    raise InvalidInputError(f"unknown algorithm {algorithm!r}")


def candidate_metrics(inst: Instance, state) -> MetricBundle:
    return metric_bundle(state, inst.model, inst.extrema, inst.encoding, inst.tours)


def run_task(inst: Instance, tag: str, cfg: CampaignConfig) -> ExperimentRecord:
    """Optimize one instance with one algorithm/optimizer pair."""
    seed = algorithm_seed(inst.seed, tag)
    rec = ExperimentRecord(inst.instance_id, inst.problem, inst.size, inst.run, tag, seed)
    algorithm, optimizer = _SPLIT[tag]
    if inst.size > cfg.size_guard:
        rec.error = f"ResourceLimitError: n={inst.size} exceeds {cfg.problem} guard {cfg.size_guard}"
        return rec

    if algorithm == "uniform":
        state = uniform_state(inst.n_qubits)
        bundle = candidate_metrics(inst, state)
        e = energy(state, inst.model)
        empty = np.zeros(0)
        rec.trace = OptimizationTrace(empty, e, [TraceStep(0, empty, e, 0)], status="baseline")
        rec.initial = bundle
        rec.metrics = [bundle]
        return rec

    loss = make_loss(algorithm, inst.model, cfg.benqo_backend)
    strategy = "benqo-normal" if algorithm == "benqo" else "uniform"
    theta0 = initial_parameters(strategy, loss.n_params, seed)
    if optimizer == "ngd":
        rule = parameter_shift_gradient
        if algorithm == "benqo" and cfg.gradient_mode == "chain":
            rule = chain_rule_gradient(loss.encoding.K)
        trace = ngd_minimize(loss, theta0, cfg.k_max, gradient=rule)
    elif optimizer == "powell":
        trace = powell_minimize(loss, theta0, cfg.budget)
    else:
        trace = nelder_mead_minimize(loss, theta0, cfg.budget)
    rec.trace = trace
    rec.cpu_time, rec.wall_time = trace.cpu_time, trace.wall_time
    rec.initial = candidate_metrics(inst, loss.state(trace.theta0))
    rec.metrics = [candidate_metrics(inst, loss.state(s.theta)) for s in trace.iterations]
    return rec


def _run_pair(args) -> ExperimentRecord:
    inst, tag, cfg = args
    try:
        return run_task(inst, tag, cfg)
    except ResourceLimitError as exc:
        return ExperimentRecord(inst.instance_id, inst.problem, inst.size, inst.run, tag,
                                algorithm_seed(inst.seed, tag), error=f"ResourceLimitError: {exc}")


def run_campaign(cfg: CampaignConfig) -> list[ExperimentRecord]:
    """Run every (size, run, algorithm) task; results sorted by that key."""
    tasks = []
    for size in cfg.sizes:
        if size > cfg.size_guard:
            for run in range(cfg.runs):
                seed = instance_seed(cfg.base_seed, size, run)
                iid = f"{cfg.problem}-n{size}-r{run:03d}"
                for tag in cfg.algorithms:
                    tasks.append((None, iid, size, run, seed, tag))
            log.warning("size %d exceeds %s guard %d; recording errors", size, cfg.problem, cfg.size_guard)
            continue
        for inst in campaign_instances(cfg, [size]):
            for tag in cfg.algorithms:
                tasks.append((inst, inst.instance_id, size, inst.run, inst.seed, tag))

    records: list[ExperimentRecord] = []
    runnable = [(inst, tag, cfg) for inst, *_, tag in tasks if inst is not None]
    for inst, iid, size, run, seed, tag in tasks:
        if inst is None:
            records.append(ExperimentRecord(
                iid, cfg.problem, size, run, tag, algorithm_seed(seed, tag),
                error=f"ResourceLimitError: n={size} exceeds {cfg.problem} guard {cfg.size_guard}",
            ))
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            records.extend(pool.map(_run_pair, runnable))
    else:
        records.extend(_run_pair(t) for t in runnable)
    records.sort(key=lambda r: r.sort_key)
    return records


# ---------------------------------------------------------------------------
# landscapes


@dataclass(eq=False)
class LandscapeGrid:
    algorithm: str
    instance_id: str
    seed: int
    axis1: np.ndarray
    axis2: np.ndarray
    ticks: np.ndarray
    values: np.ndarray

    @property
    def resolution(self) -> int:
        return self.ticks.size

    @property
    def value_range(self) -> float:
        return float(self.values.max() - self.values.min())

    def to_csv(self) -> str:
        lines = ["i,j,theta1,theta2,loss"]
        for i, t1 in enumerate(self.ticks):
            for j, t2 in enumerate(self.ticks):
                lines.append(f"{i},{j},{t1!r},{t2!r},{float(self.values[i, j])!r}")
        return "\n".join(lines) + "\n"


def random_plane(dim: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal directions from Gaussian draws (Gram-Schmidt)."""
    if dim < 2:
        raise InvalidInputError("a plane needs at least two parameters")
    v = make_rng(seed).normal(size=(2, dim))
    a1 = v[0] / np.linalg.norm(v[0])
    w = v[1] - np.dot(v[1], a1) * a1
    w -= np.dot(w, a1) * a1
    return a1, w / np.linalg.norm(w)


def sample_landscape(
    algorithm: str,
    model: IsingModel,
    seed: int,
    resolution: int = 101,
    instance_id: str = "",
    bound: float = 2 * math.pi,
    benqo_backend: str = "analytic",
) -> LandscapeGrid:
    """Loss on a ``resolution x resolution`` grid over ``[-bound, bound]^2`` in a random plane through 0."""
    if resolution < 2:
        raise InvalidInputError("resolution must be >= 2")
    loss = make_loss(algorithm, model, benqo_backend)
    a1, a2 = random_plane(loss.n_params, seed)
    ticks = np.linspace(-bound, bound, resolution)
    values = np.empty((resolution, resolution))
    for i, t1 in enumerate(ticks):
        for j, t2 in enumerate(ticks):
            values[i, j] = loss(t1 * a1 + t2 * a2)
    return LandscapeGrid(algorithm, instance_id, seed, a1, a2, ticks, values)


# ---------------------------------------------------------------------------
# output files

MANIFEST = {
    "records.jsonl": "one ExperimentRecord per line: instance_id, problem, size, run, algorithm, optimizer, "
    "tag, seed, error, status, theta0, loss0, trace[{k, theta, loss, evals}], initial, metrics[per iterate]",
    "timings.jsonl": "instance_id, tag, cpu_time, wall_time (seconds, optimize loop only)",
    "curves_<size>_<tag>.csv": "iteration (0 = initial point), mean_ar, mean_fr over runs; "
    "shorter traces carry their last value forward",
    "summary.csv": "size, algorithm, optimizer, count, errors, mean/std of ar, optimality_pct, "
    "success_pct_1, success_pct_5, mean/std of fr and lr, lr_excluded (records with no feasible mass)",
    "lr_table.csv": "algorithm, optimizer, then 'mean +- std' of the final length ratio per size (TSP only)",
    "runtime.csv": "size, algorithm, optimizer, n_total, n_kept, mean_cpu_time (after one-sided z > 1.5 "
    "outlier removal), mean_cpu_time_raw",
    "landscape_<alg>_<seed>.csv": "i, j, theta1, theta2, loss",
}


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    return str(x)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_records(records: Sequence[ExperimentRecord], out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "records.jsonl").open("w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict()) + "\n")
    with (out / "timings.jsonl").open("w") as fh:
        for r in records:
            fh.write(json.dumps({"instance_id": r.instance_id, "tag": r.tag,
                                 "cpu_time": r.cpu_time, "wall_time": r.wall_time}) + "\n")


def load_records(in_dir: str | Path) -> list[ExperimentRecord]:
    d = Path(in_dir)
    records = [ExperimentRecord.from_dict(json.loads(line)) for line in (d / "records.jsonl").read_text().splitlines() if line]
    timing_file = d / "timings.jsonl"
    if timing_file.exists():
        times = {}
        for line in timing_file.read_text().splitlines():
            if line:
                t = json.loads(line)
                times[(t["instance_id"], t["tag"])] = t
        for r in records:
            t = times.get((r.instance_id, r.tag))
            if t is not None:
                r.cpu_time, r.wall_time = t["cpu_time"], t["wall_time"]
    return records


def _groups(records: Sequence[ExperimentRecord]) -> dict[tuple[int, str], list[ExperimentRecord]]:
    groups: dict[tuple[int, str], list[ExperimentRecord]] = {}
    for r in sorted(records, key=lambda r: r.sort_key):
        groups.setdefault((r.size, r.tag), []).append(r)
    return dict(sorted(groups.items(), key=lambda kv: (kv[0][0], ALGORITHMS.index(kv[0][1]))))


def mean_curve(records: Sequence[ExperimentRecord], metric: str) -> list[float | None]:
    """Mean of ``metric`` per iteration, iteration 0 being the initial point."""
    series = []
    for r in records:
        if r.error is None and r.metrics:
            series.append([getattr(r.initial, metric)] + [getattr(m, metric) for m in r.metrics])
    if not series or series[0][0] is None:
        return []
    length = max(len(s) for s in series)
    padded = np.array([s + [s[-1]] * (length - len(s)) for s in series], dtype=float)
    return [float(v) for v in padded.mean(axis=0)]


def report(records: Sequence[ExperimentRecord], out_dir: str | Path) -> list[Path]:
    """Write curve, summary, length-ratio and runtime tables; returns written paths."""
    if not records:
        raise InvalidInputError("no records to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    groups = _groups(records)
    summary_rows, lr_cells, runtime_rows = [], {}, []
    for (size, tag), recs in groups.items():
        ok = [r for r in recs if r.error is None and r.final is not None]
        ar, fr = mean_curve(ok, "ar"), mean_curve(ok, "fr")
        path = out / f"curves_{size}_{tag}.csv"
        _write_csv(path, ["iteration", "mean_ar", "mean_fr"],
                   [(k, a, fr[k] if fr else None) for k, a in enumerate(ar)])
        written.append(path)
        alg, opt = _SPLIT[tag]
        errors = len(recs) - len(ok)
        if not ok:
            summary_rows.append((size, alg, opt, len(recs), errors) + (None,) * 10)
            continue
        agg = aggregate([r.final for r in ok])
        m, s = agg["means"], agg["stds"]
        summary_rows.append((
            size, alg, opt, len(recs), errors, m["ar"], s["ar"], agg["optimality_pct"],
            agg["success_pct_1"], agg["success_pct_5"], m["fr"], s["fr"], m["lr"], s["lr"],
            agg["excluded"]["lr"] if ok[0].problem == "tsp" else None,
        ))
        if ok[0].problem == "tsp":
            lr_cells[(tag, size)] = (m["lr"], s["lr"])
        times = [r.cpu_time for r in ok]
        kept = filter_outliers(times)
        runtime_rows.append((size, alg, opt, len(times), len(kept), float(np.mean(kept)), float(np.mean(times))))

    path = out / "summary.csv"
    _write_csv(path, ["size", "algorithm", "optimizer", "count", "errors", "mean_ar", "std_ar",
                      "optimality_pct", "success_pct_1", "success_pct_5", "mean_fr", "std_fr",
                      "mean_lr", "std_lr", "lr_excluded"], summary_rows)
    written.append(path)

    if lr_cells:
        sizes = sorted({s for _, s in lr_cells})
        tags = [t for t in ALGORITHMS if any(k[0] == t for k in lr_cells)]
        rows = []
        for tag in tags:
            cells = []
            for size in sizes:
                mean, std = lr_cells.get((tag, size), (math.nan, math.nan))
                cells.append("" if math.isnan(mean) else f"{mean:.3f} +- {std:.3f}")
            rows.append(_SPLIT[tag] + tuple(cells))
        path = out / "lr_table.csv"
        _write_csv(path, ["algorithm", "optimizer"] + [f"n={s}" for s in sizes], rows)
        written.append(path)

    path = out / "runtime.csv"
    _write_csv(path, ["size", "algorithm", "optimizer", "n_total", "n_kept", "mean_cpu_time",
                      "mean_cpu_time_raw"], runtime_rows)
    written.append(path)
    path = out / "manifest.json"
    path.write_text(json.dumps(MANIFEST, indent=2, sort_keys=True) + "\n")
    written.append(path)
    return written
