"""Problem instances and their binary/spin cost models.

Conventions used throughout the package:

* Nodes and variables are 0-based in memory; JSON files use 1-based node
  labels.
* Bit ``i`` of a bitstring belongs to qubit ``i``, and qubit 0 is the least
  significant bit of a basis-state index.
* A qubit value ``q`` corresponds to the spin ``(-1)**q``; a binary variable
  ``x`` is identified with ``q``, i.e. ``x = (1 - z) / 2``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    InfeasibleError,
    InvalidInputError,
    InvalidInstanceError,
    ResourceLimitError,
)

BRUTE_FORCE_MAX_QUBITS = 24
_CHUNK = 1 << 15


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; the one RNG algorithm used by the package."""
    return np.random.Generator(np.random.PCG64(seed))


# ---------------------------------------------------------------------------
# bitstrings


def index_to_bits(index: int, n: int) -> np.ndarray:
    """Bits of basis index ``index``; element ``i`` is qubit ``i``."""
    return np.array([(index >> i) & 1 for i in range(n)], dtype=np.uint8)


def bits_to_index(bits: Sequence[int]) -> int:
    return int(sum(int(b) << i for i, b in enumerate(bits)))


def bits_to_str(bits: Sequence[int]) -> str:
    """Render as a string in qubit order (qubit 0 first)."""
    return "".join(str(int(b)) for b in bits)


def all_bit_columns(n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Bit table of shape ``(stop - start, n)`` for basis indices ``start..stop-1``."""
    stop = (1 << n) if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph on nodes ``0..n-1``.

    ``weights`` is keyed by ``(i, j)`` with ``i < j``; use :meth:`weight` for a
    symmetric lookup.
    """

    n: int
    weights: Mapping[tuple[int, int], float]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidInstanceError(f"node count must be non-negative, got {self.n}")
        normalized: dict[tuple[int, int], float] = {}
        for (i, j), w in self.weights.items():
            i, j = int(i), int(j)
            if i == j:
                raise InvalidInstanceError(f"self-loop on node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidInstanceError(f"edge ({i}, {j}) out of range for n={self.n}")
            key = (min(i, j), max(i, j))
            if key in normalized and normalized[key] != float(w):
                raise InvalidInstanceError(f"conflicting weights for edge {key}")
            if not np.isfinite(w):
                raise InvalidInstanceError(f"non-finite weight on edge {key}")
            normalized[key] = float(w)
        object.__setattr__(self, "weights", dict(sorted(normalized.items())))

    def weight(self, i: int, j: int) -> float:
        return self.weights.get((min(i, j), max(i, j)), 0.0)

    @property
    def is_complete(self) -> bool:
        return len(self.weights) == self.n * (self.n - 1) // 2

    def matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for (i, j), v in self.weights.items():
            w[i, j] = w[j, i] = v
        return w

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [[i + 1, j + 1, w] for (i, j), w in self.weights.items()],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "WeightedGraph":
        edges = {(int(i) - 1, int(j) - 1): float(w) for i, j, w in data["edges"]}
        return cls(int(data["n"]), edges)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "WeightedGraph":
        return cls.from_dict(json.loads(text))


def random_complete_graph(n: int, wmin: float, wmax: float, seed: int) -> WeightedGraph:
    """Complete graph with i.i.d. uniform weights in ``[wmin, wmax]``.

    Weights are drawn from ``make_rng(seed)`` in row-major order of the pairs
    ``(0,1), (0,2), ..., (n-2,n-1)``.
    """
    if n < 1:
        raise InvalidInstanceError(f"need at least one node, got n={n}")
    if wmin > wmax:
        raise InvalidInputError(f"wmin={wmin} exceeds wmax={wmax}")
    pairs = list(itertools.combinations(range(n), 2))
    draws = make_rng(seed).uniform(wmin, wmax, size=len(pairs))
    return WeightedGraph(n, {p: float(w) for p, w in zip(pairs, draws)})


# ---------------------------------------------------------------------------
# cost models


@dataclass(frozen=True, eq=False)
class QuboMatrix:
    """Binary quadratic cost ``x^T Q x + offset`` with symmetric ``Q``."""

    Q: np.ndarray
    offset: float = 0.0

    def __post_init__(self) -> None:
        q = np.array(self.Q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise InvalidInputError(f"Q must be square, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise InvalidInputError("Q has non-finite entries")
        if not np.allclose(q, q.T, rtol=0.0, atol=1e-12):
            raise InvalidInputError("Q must be symmetric")
        q.setflags(write=False)
        object.__setattr__(self, "Q", q)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def cost(self, x: Sequence[int]) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise InvalidInputError(f"expected {self.n} bits, got {x.shape}")
        return float(x @ self.Q @ x) + self.offset


@dataclass(frozen=True, eq=False)
class IsingModel:
    """Diagonal spin Hamiltonian ``sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j + offset``.

    ``linear`` has shape ``(n,)``; ``quadratic`` is an ``(n, n)`` array whose
    only nonzero entries are strictly above the diagonal. The offset is kept
    separately and is *not* part of :func:`ising_energy`.
    """

    linear: np.ndarray
    quadratic: np.ndarray
    offset: float = 0.0

    def __post_init__(self) -> None:
        h = np.array(self.linear, dtype=float).reshape(-1)
        J = np.array(self.quadratic, dtype=float)
        n = h.shape[0]
        if J.shape != (n, n):
            raise InvalidInputError(f"quadratic must be ({n}, {n}), got {J.shape}")
        if np.any(np.tril(J) != 0.0):
            raise InvalidInputError("quadratic coefficients must be strictly upper-triangular")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(J)) and np.isfinite(self.offset)):
            raise InvalidInputError("non-finite coefficient")
        h.setflags(write=False)
        J.setflags(write=False)
        object.__setattr__(self, "linear", h)
        object.__setattr__(self, "quadratic", J)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_terms(
        cls,
        n: int,
        linear: Mapping[int, float] | None = None,
        quadratic: Mapping[tuple[int, int], float] | None = None,
        offset: float = 0.0,
    ) -> "IsingModel":
        h = np.zeros(n)
        J = np.zeros((n, n))
        for i, c in (linear or {}).items():
            h[i] += c
        for (i, j), c in (quadratic or {}).items():
            if i == j:
                raise InvalidInputError(f"quadratic key ({i}, {j}) is diagonal")
            J[min(i, j), max(i, j)] += c
        return cls(h, J, offset)

    @property
    def n(self) -> int:
        return self.linear.shape[0]

    def linear_terms(self) -> dict[int, float]:
        return {i: float(c) for i, c in enumerate(self.linear)}

    def quadratic_terms(self) -> dict[tuple[int, int], float]:
        return {(i, j): float(self.quadratic[i, j]) for i, j in itertools.combinations(range(self.n), 2)}

    @property
    def abs_sum(self) -> float:
        """Sum of absolute coefficients; bounds ``|E(q)|`` for every basis state."""
        return float(np.abs(self.linear).sum() + np.abs(self.quadratic).sum())

    def scaled(self, a: float, b: float = 0.0) -> "IsingModel":
        """Model of ``a * C + b`` (the constant lands in the offset)."""
        return IsingModel(a * self.linear, a * self.quadratic, a * self.offset + b)

    @cached_property
    def _diagonal(self) -> np.ndarray:
        n = self.n
        if n > BRUTE_FORCE_MAX_QUBITS:
            raise ResourceLimitError(f"n={n} exceeds enumeration guard {BRUTE_FORCE_MAX_QUBITS}")
        dim = 1 << n
        out = np.empty(dim)
        for start in range(0, dim, _CHUNK):
            stop = min(dim, start + _CHUNK)
            s = 1.0 - 2.0 * all_bit_columns(n, start, stop)
            out[start:stop] = s @ self.linear + np.einsum("ki,ij,kj->k", s, self.quadratic, s)
        out.setflags(write=False)
        return out

    def diagonal(self) -> np.ndarray:
        """Energies of all ``2**n`` basis states, indexed by basis index (offset excluded)."""
        return self._diagonal


def ising_energy(model: IsingModel, bits: Sequence[int]) -> float:
    """Energy of a single basis state, offset excluded."""
    q = np.asarray(bits, dtype=np.int64)
    if q.shape != (model.n,):
        raise InvalidInputError(f"bitstring length {q.shape} does not match n={model.n}")
    if np.any((q != 0) & (q != 1)):
        raise InvalidInputError("bits must be 0 or 1")
    s = np.where(q == 0, 1.0, -1.0)
    total = float(np.dot(model.linear, s))
    for i, j in itertools.combinations(range(model.n), 2):
        total += model.quadratic[i, j] * s[i] * s[j]
    return total


def maxcut_ising(graph: WeightedGraph) -> IsingModel:
    """Weighted MaxCut: couplings equal the edge weights, no fields, no offset."""
    J = np.zeros((graph.n, graph.n))
    for (i, j), w in graph.weights.items():
        J[i, j] = w
    return IsingModel(np.zeros(graph.n), J, 0.0)


def qubo_to_ising(qubo: QuboMatrix) -> IsingModel:
    """Spin form of a QUBO under ``x = (1 - z) / 2``.

    For every bitstring ``x``: ``qubo.cost(x) == ising_energy(model, x) + model.offset``.
    """
    Q = qubo.Q
    J = np.triu(Q, k=1) / 2.0
    h = -Q.sum(axis=1) / 2.0
    offset = np.trace(Q) / 2.0 + np.triu(Q, k=1).sum() / 2.0 + qubo.offset
    return IsingModel(h, J, float(offset))


class Extrema(NamedTuple):
    c_min: float
    c_max: float
    argmin_set: list[np.ndarray]


def brute_force_extrema(model: IsingModel, atol: float = 1e-9) -> Extrema:
    """Exact min/max energy by enumeration, with every minimizing bitstring."""
    if model.n > BRUTE_FORCE_MAX_QUBITS:
        raise ResourceLimitError(f"n={model.n} exceeds brute-force guard {BRUTE_FORCE_MAX_QUBITS}")
    diag = model.diagonal()
    c_min, c_max = float(diag.min()), float(diag.max())
    tol = atol * max(1.0, abs(c_min))
    argmin = [index_to_bits(int(k), model.n) for k in np.flatnonzero(diag <= c_min + tol)]
    return Extrema(c_min, c_max, argmin)


# ---------------------------------------------------------------------------
# TSP


@dataclass(frozen=True, eq=False)
class TspEncoding:
    """One-hot TSP QUBO with node 0 pinned to step 0.

    Variables cover nodes ``1..n-1`` at steps ``1..n-1`` and are flattened
    node-major: ``var_index[(i, a)] == (i - 1) * (n - 1) + (a - 1)``.
    """

    graph: WeightedGraph
    penalty: float
    qubo: QuboMatrix
    var_index: Mapping[tuple[int, int], int] = field(repr=False)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def var_count(self) -> int:
        return (self.graph.n - 1) ** 2

    @cached_property
    def ising(self) -> IsingModel:
        return qubo_to_ising(self.qubo)

    @cached_property
    def feasible_indices(self) -> np.ndarray:
        return np.array([bits_to_index(b) for b in tsp_feasible_states(self)], dtype=np.int64)

    @cached_property
    def tour_lengths(self) -> np.ndarray:
        """Tour lengths aligned with :attr:`feasible_indices`."""
        return np.array([tour_length(self.graph, b, self) for b in tsp_feasible_states(self)])

    def grid(self, bits: Sequence[int]) -> np.ndarray:
        """Reshape a bitstring into the ``(node, step)`` grid of the free variables."""
        m = self.graph.n - 1
        b = np.asarray(bits, dtype=np.int64)
        if b.shape != (self.var_count,):
            raise InvalidInputError(f"expected {self.var_count} bits, got {b.shape}")
        return b.reshape(m, m)

    def is_feasible(self, bits: Sequence[int]) -> bool:
        g = self.grid(bits)
        return bool(np.all(g.sum(axis=0) == 1) and np.all(g.sum(axis=1) == 1))

    def decode(self, bits: Sequence[int]) -> list[int]:
        """Visiting order of the tour, starting at node 0."""
        if not self.is_feasible(bits):
            raise InfeasibleError(f"bitstring {bits_to_str(bits)} violates the one-hot constraints")
        g = self.grid(bits)
        return [0] + [int(np.argmax(g[:, a])) + 1 for a in range(g.shape[1])]

    def to_dict(self) -> dict:
        return {
            **self.graph.to_dict(),
            "penalty": self.penalty,
            "var_index": [[i + 1, a + 1, k] for (i, a), k in self.var_index.items()],
        }


def tsp_penalty(graph: WeightedGraph) -> float:
    """``n`` times the sum of weights over ordered pairs ``(i, j)``, ``i != j``."""
    return graph.n * 2.0 * sum(graph.weights.values())


def tsp_encode(graph: WeightedGraph, penalty: float | None = None) -> TspEncoding:
    """Expand the one-hot TSP cost into a symmetric QUBO over ``(n-1)**2`` variables."""
    n = graph.n
    if n < 2:
        raise InvalidInstanceError(f"TSP needs at least two nodes, got n={n}")
    if not graph.is_complete:
        raise InvalidInstanceError("TSP encoding requires a complete graph")
    m = n - 1
    P = tsp_penalty(graph) if penalty is None else float(penalty)
    var_index = {(i, a): (i - 1) * m + (a - 1) for i in range(1, n) for a in range(1, n)}

    Q = np.zeros((m * m, m * m))
    const = 0.0

    # A variable reference is either an int (free variable) or a fixed 0/1 value.
    def ref(i: int, a: int) -> tuple[str, int]:
        if i == 0 or a == 0:
            return ("const", int(i == 0 and a == 0))
        return ("var", var_index[(i, a)])

    def add_product(c: float, r1: tuple[str, int], r2: tuple[str, int]) -> None:
        nonlocal const
        kinds = (r1[0], r2[0])
        if kinds == ("const", "const"):
            const += c * r1[1] * r2[1]
        elif kinds == ("const", "var"):
            Q[r2[1], r2[1]] += c * r1[1]
        elif kinds == ("var", "const"):
            Q[r1[1], r1[1]] += c * r2[1]
        elif r1[1] == r2[1]:
            Q[r1[1], r1[1]] += c
        else:
            Q[r1[1], r2[1]] += c / 2.0
            Q[r2[1], r1[1]] += c / 2.0

    def add_one_hot(refs: Iterable[tuple[str, int]]) -> None:
        # P * (1 - sum(refs))**2 = P * (1 - 2 sum + sum_k sum_l)
        nonlocal const
        refs = list(refs)
        const += P
        for r in refs:
            add_product(-2.0 * P, r, ("const", 1))
        for r1 in refs:
            for r2 in refs:
                add_product(P, r1, r2)

    W = graph.matrix()
    for a in range(n):
        b = (a + 1) % n
        for i in range(n):
            for j in range(n):
                if i != j:
                    add_product(W[i, j], ref(i, a), ref(j, b))
    for i in range(n):
        add_one_hot(ref(i, a) for a in range(n))
    for a in range(n):
        add_one_hot(ref(i, a) for i in range(n))

    return TspEncoding(graph, P, QuboMatrix(Q, const), var_index)


def tsp_feasible_states(enc: TspEncoding) -> list[np.ndarray]:
    """All ``(n-1)!`` permutation bitstrings, in lexicographic order of the visiting sequence."""
    m = enc.n - 1
    states = []
    for perm in itertools.permutations(range(1, enc.n)):
        bits = np.zeros(m * m, dtype=np.uint8)
        for step, node in enumerate(perm, start=1):
            bits[enc.var_index[(node, step)]] = 1
        states.append(bits)
    return states


def tour_length(graph: WeightedGraph, bits: Sequence[int], enc: TspEncoding) -> float:
    """Closed-cycle length of the tour encoded by a feasible bitstring."""
    order = enc.decode(bits)
    return float(sum(graph.weight(u, v) for u, v in zip(order, order[1:] + order[:1])))


class TourExtremes(NamedTuple):
    l_opt: float
    l_max: float


def tour_extremes(enc: TspEncoding) -> TourExtremes:
    return TourExtremes(float(enc.tour_lengths.min()), float(enc.tour_lengths.max()))
