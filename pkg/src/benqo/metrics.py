"""Solution-quality metrics, outlier filtering and aggregation.

Metric functions accept either a :class:`StateVector` or a probability
vector over basis indices.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateSpectrumError, InvalidInputError, UndefinedMetricError
from .problems import Extrema, IsingModel, TourExtremes, TspEncoding, bits_to_index
from .statevector import StateVector, probabilities

AI_THRESHOLDS = {"ai0": 0.0, "ai1": 0.01, "ai5": 0.05}
Z_CUTOFF = 1.5
_SLACK = 1e-12
FEASIBLE_MASS_FLOOR = 1e-12


def _probs(state: StateVector | np.ndarray) -> np.ndarray:
    if isinstance(state, StateVector):
        return probabilities(state)
    return np.asarray(state, dtype=float)


def approximation_ratio(state, model: IsingModel, ext: Extrema) -> float:
    """``(<C> - C_max) / (C_min - C_max)``, clipped to ``[0, 1]``."""
    if ext.c_min == ext.c_max:
        raise DegenerateSpectrumError("c_min == c_max")
    mean = float(np.dot(_probs(state), model.diagonal()))
    ar = (mean - ext.c_max) / (ext.c_min - ext.c_max)
    if ar < -1e-9 or ar > 1 + 1e-9:
        raise InvalidInputError(f"approximation ratio {ar} outside [0, 1]; extrema do not match the model")
    return min(1.0, max(0.0, ar))


def approximation_index(state, model: IsingModel, t: float, ext: Extrema) -> int:
    """1 if the most probable basis state is within relative distance ``t`` of ``C_min``."""
    if ext.c_min == 0:
        raise UndefinedMetricError("approximation index undefined for c_min == 0")
    k = int(np.argmax(_probs(state)))
    e = float(model.diagonal()[k])
    return int(abs(e - ext.c_min) / abs(ext.c_min) <= t + _SLACK)


def _feasible_indices(feasible) -> np.ndarray:
    arr = np.asarray(feasible)
    if arr.ndim == 2:
        return np.array([bits_to_index(b) for b in arr], dtype=np.int64)
    return arr.astype(np.int64)


def feasibility_ratio(state, feasible) -> float:
    """Probability mass on the feasible set (bitstrings or basis indices)."""
    idx = _feasible_indices(feasible)
    if idx.size == 0:
        raise InvalidInputError("feasible set is empty")
    return float(_probs(state)[idx].sum())


def length_ratio(state, enc: TspEncoding, ext_tours: TourExtremes) -> float | None:
    """``(l - l_max) / (l_opt - l_max)`` with ``l`` the tour length averaged over the feasible states.

    The average is renormalized by the feasible mass. Returns ``None`` when
    that mass is below 1e-12. If all tours have equal length (``n <= 3``,
    up to rounding), the ratio is 1.
    """
    p = _probs(state)[enc.feasible_indices]
    mass = float(p.sum())
    if mass < FEASIBLE_MASS_FLOOR:
        return None
    if math.isclose(ext_tours.l_opt, ext_tours.l_max, rel_tol=1e-12, abs_tol=1e-9):
        return 1.0
    lengths = enc.tour_lengths
    l_avg = float(np.dot(p, lengths)) / mass
    lr = (l_avg - ext_tours.l_max) / (ext_tours.l_opt - ext_tours.l_max)
    return min(1.0, max(0.0, lr))


def filter_outliers(samples: Sequence[float], two_sided: bool = False) -> list[float]:
    """Drop samples whose z-score exceeds 1.5 (population std).

    One-sided by default: only unusually large values go.
    """
    x = [float(s) for s in samples]
    if len(x) < 2:
        return x
    arr = np.asarray(x)
    std = float(arr.std())
    if std == 0.0:
        return x
    z = (arr - arr.mean()) / std
    if two_sided:
        z = np.abs(z)
    return [v for v, zi in zip(x, z) if not zi > Z_CUTOFF]


@dataclass(frozen=True)
class MetricBundle:
    ar: float
    ai0: int | None
    ai1: int | None
    ai5: int | None
    fr: float | None = None
    lr: float | None = None

    @property
    def lr_defined(self) -> bool:
        return self.lr is not None

    def to_row(self) -> dict:
        row = asdict(self)
        row["lr_defined"] = int(self.lr_defined)
        return row


CSV_COLUMNS = ("ar", "ai0", "ai1", "ai5", "fr", "lr", "lr_defined")


def metric_bundle(
    state,
    model: IsingModel,
    ext: Extrema,
    enc: TspEncoding | None = None,
    tours: TourExtremes | None = None,
) -> MetricBundle:
    """All metrics for one candidate state; TSP metrics only when ``enc`` is given."""
    p = _probs(state)
    ai = {}
    for name, t in AI_THRESHOLDS.items():
        try:
            ai[name] = approximation_index(p, model, t, ext)
        except UndefinedMetricError:
            ai[name] = None
    fr = lr = None
    if enc is not None:
        fr = feasibility_ratio(p, enc.feasible_indices)
        lr = length_ratio(p, enc, tours)
    return MetricBundle(approximation_ratio(p, model, ext), ai["ai0"], ai["ai1"], ai["ai5"], fr, lr)


def _mean_std(values: Iterable[float]) -> tuple[float, float]:
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    return float(arr.mean()), float(arr.std())


def aggregate(records: Sequence[MetricBundle]) -> dict:
    """Population mean/std per metric plus optimality and success percentages.

    Undefined entries (``None``) are excluded from their metric's statistics;
    the exclusion counts are reported under ``excluded``.
    """
    if not records:
        raise InvalidInputError("nothing to aggregate")
    means, stds, excluded = {}, {}, {}
    for name in ("ar", "ai0", "ai1", "ai5", "fr", "lr"):
        vals = [getattr(r, name) for r in records]
        present = [v for v in vals if v is not None]
        excluded[name] = len(vals) - len(present)
        means[name], stds[name] = _mean_std(present)
    return {
        "count": len(records),
        "means": means,
        "stds": stds,
        "excluded": excluded,
        "optimality_pct": 100.0 * means["ai0"],
        "success_pct_1": 100.0 * means["ai1"],
        "success_pct_5": 100.0 * means["ai5"],
    }
