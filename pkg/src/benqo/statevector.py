"""Exact statevector simulation for small circuits.

Qubit 0 is the least significant bit of a basis index. Gates act on
reshaped views of the flat amplitude vector: for a target ``t`` the vector is
viewed as ``(2**(n-1-t), 2, 2**t)`` so the middle axis is that qubit's bit.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidInputError, ResourceLimitError

MAX_QUBITS = 24

SINGLE_QUBIT_KINDS = {"X", "H", "RY", "RX"}
CONTROLLED_KINDS = {"CNOT", "CZ", "CRY"}
GATE_KINDS = SINGLE_QUBIT_KINDS | CONTROLLED_KINDS | {"DIAG"}
_PARAMETRIC = {"RY", "RX", "CRY"}

_SQRT1_2 = 1.0 / np.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


@dataclass(frozen=True, eq=False)
class Gate:
    """A primitive gate.

    ``kind`` is one of ``X, H, RY, RX, CNOT, CZ, CRY, DIAG``. Angles are in
    radians. ``DIAG`` multiplies amplitude ``k`` by ``exp(-1j * angles[k])``
    and acts on all qubits; it has no targets.
    """

    kind: str
    targets: tuple[int, ...] = ()
    controls: tuple[int, ...] = ()
    angle: float | None = None
    angles: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise InvalidInputError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if self.kind == "DIAG":
            if self.angles is None or self.targets or self.controls:
                raise InvalidInputError("DIAG takes an angle vector and no qubit indices")
            object.__setattr__(self, "angles", np.asarray(self.angles, dtype=float))
            return
        if len(self.targets) != 1:
            raise InvalidInputError(f"{self.kind} needs exactly one target")
        want_controls = 1 if self.kind in CONTROLLED_KINDS else 0
        if len(self.controls) != want_controls:
            raise InvalidInputError(f"{self.kind} needs {want_controls} control(s)")
        if set(self.targets) & set(self.controls):
            raise InvalidInputError("target and control must differ")
        if (self.kind in _PARAMETRIC) != (self.angle is not None):
            raise InvalidInputError(f"angle is required exactly for {sorted(_PARAMETRIC)}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def matrix(self) -> np.ndarray:
        """2x2 action on the target (for controlled gates: when the control is 1)."""
        if self.kind in ("X", "CNOT"):
            return _X
        if self.kind == "H":
            return _H
        if self.kind == "CZ":
            return _Z
        if self.kind == "RX":
            return rx_matrix(self.angle)
        if self.kind in ("RY", "CRY"):
            return ry_matrix(self.angle)
        raise InvalidInputError("DIAG has no 2x2 matrix")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.angle is not None:
            d["angle"] = self.angle
        if self.angles is not None:
            d["angles"] = self.angles.tolist()
        d["targets"] = list(self.targets)
        d["controls"] = list(self.controls)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Gate":
        return cls(
            d["kind"],
            tuple(d.get("targets", ())),
            tuple(d.get("controls", ())),
            d.get("angle"),
            None if d.get("angles") is None else np.asarray(d["angles"]),
        )


# Small constructors; these read better than Gate("RY", (q,), angle=...) at call sites.
def X(q: int) -> Gate:
    return Gate("X", (q,))


def H(q: int) -> Gate:
    return Gate("H", (q,))


def RY(q: int, angle: float) -> Gate:
    return Gate("RY", (q,), angle=float(angle))


def RX(q: int, angle: float) -> Gate:
    return Gate("RX", (q,), angle=float(angle))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (target,), (control,))


def CZ(control: int, target: int) -> Gate:
    return Gate("CZ", (target,), (control,))


def CRY(control: int, target: int, angle: float) -> Gate:
    return Gate("CRY", (target,), (control,), angle=float(angle))


def DIAG(angles: np.ndarray) -> Gate:
    return Gate("DIAG", angles=angles)


@dataclass
class GateSequence:
    """Ordered gate list on ``n`` qubits; gates are applied first to last."""

    n: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        if any(q >= self.n or q < 0 for q in gate.qubits):
            raise InvalidInputError(f"gate {gate.kind} on {gate.qubits} out of range for n={self.n}")
        if gate.kind == "DIAG" and gate.angles.shape != (1 << self.n,):
            raise InvalidInputError("DIAG angle vector has wrong length")

    def append(self, gate: Gate) -> "GateSequence":
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "GateSequence":
        for g in gates:
            self.append(g)
        return self

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out

    def to_json(self) -> str:
        return json.dumps([g.to_dict() for g in self.gates])

    @classmethod
    def from_json(cls, n: int, text: str) -> "GateSequence":
        return cls(n, [Gate.from_dict(d) for d in json.loads(text)])


@dataclass(eq=False)
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (1 << self.n,):
            raise InvalidInputError(f"expected {1 << self.n} amplitudes, got {self.amps.shape}")

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def to_csv(self) -> str:
        """Debug dump with columns ``index, re, im``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for k, a in enumerate(self.amps):
            w.writerow([k, repr(float(a.real)), repr(float(a.imag))])
        return buf.getvalue()


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ResourceLimitError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")


def init_zero(n: int) -> StateVector:
    _check_n(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n, amps)


def uniform_state(n: int) -> StateVector:
    _check_n(n)
    return StateVector(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=complex))


def basis_state(bits: Sequence[int]) -> StateVector:
    n = len(bits)
    _check_n(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[sum(int(b) << i for i, b in enumerate(bits))] = 1.0
    return StateVector(n, amps)


def _split_view(amps: np.ndarray, n: int, gate: Gate) -> tuple[np.ndarray, int]:
    """View of ``amps`` restricted to control=1, with the target bit on a known axis.

    Returns ``(view, axis)``; ``view.take(b, axis)`` selects target bit ``b``.
    """
    t = gate.targets[0]
    if not gate.controls:
        return amps.reshape(1 << (n - 1 - t), 2, 1 << t), 1
    c = gate.controls[0]
    hi, lo = max(c, t), min(c, t)
    v = amps.reshape(1 << (n - 1 - hi), 2, 1 << (hi - lo - 1), 2, 1 << lo)
    if c == hi:
        return v[:, 1], 2
    return v[:, :, :, 1], 1


def _apply_inplace(amps: np.ndarray, n: int, gate: Gate) -> None:
    """Apply ``gate`` to the flat amplitude vector ``amps`` in place."""
    if gate.kind == "DIAG":
        amps *= np.exp(-1j * gate.angles)
        return
    if any(q >= n or q < 0 for q in gate.qubits):
        raise InvalidInputError(f"gate {gate.kind} on {gate.qubits} out of range for n={n}")
    view, axis = _split_view(amps, n, gate)
    s0 = (slice(None),) * axis + (0,)
    s1 = (slice(None),) * axis + (1,)
    if gate.kind == "CZ":
        view[s1] *= -1.0
        return
    if gate.kind in ("X", "CNOT"):
        tmp = view[s0].copy()
        view[s0] = view[s1]
        view[s1] = tmp
        return
    u = gate.matrix()
    a0 = view[s0].copy()
    a1 = view[s1]
    view[s0] *= u[0, 0]
    view[s0] += u[0, 1] * a1
    a1 *= u[1, 1]
    a1 += u[1, 0] * a0


def apply(state: StateVector, gate: Gate) -> StateVector:
    """Return a new state with ``gate`` applied."""
    out = state.amps.copy()
    _apply_inplace(out, state.n, gate)
    return StateVector(state.n, out)


def run(state: StateVector, gates: Iterable[Gate]) -> StateVector:
    """Apply a gate sequence, copying the input once."""
    out = state.amps.copy()
    for g in gates:
        _apply_inplace(out, state.n, g)
    return StateVector(state.n, out)


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amps) ** 2


def expectation_diagonal(state: StateVector, diag: np.ndarray) -> float:
    diag = np.asarray(diag, dtype=float)
    if diag.shape != state.amps.shape:
        raise InvalidInputError(f"diagonal length {diag.shape} does not match 2**{state.n}")
    return float(np.dot(probabilities(state), diag))


def marginal(state: StateVector, qubit: int, value: int) -> float:
    """Probability that ``qubit`` is measured as ``value``."""
    if not 0 <= qubit < state.n:
        raise InvalidInputError(f"qubit {qubit} out of range for n={state.n}")
    p = probabilities(state).reshape((2,) * state.n)
    index = [slice(None)] * state.n
    index[state.n - 1 - qubit] = int(value)
    return float(p[tuple(index)].sum())


def most_probable(state: StateVector) -> np.ndarray:
    """Most likely basis state as a bit array; ties go to the lowest index."""
    k = int(np.argmax(probabilities(state)))
    return np.array([(k >> i) & 1 for i in range(state.n)], dtype=np.uint8)
