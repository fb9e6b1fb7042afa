import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from benqo.errors import InvalidInputError, ResourceLimitError
from benqo.statevector import (
    CNOT,
    CRY,
    CZ,
    DIAG,
    RX,
    RY,
    Gate,
    GateSequence,
    H,
    StateVector,
    X,
    apply,
    basis_state,
    expectation_diagonal,
    init_zero,
    marginal,
    most_probable,
    probabilities,
    run,
    uniform_state,
)


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, v / np.linalg.norm(v))


def dense_single(u, q, n):
    """Full 2^n matrix of a single-qubit gate on qubit q (qubit 0 = least significant)."""
    mats = [np.eye(2)] * n
    mats[n - 1 - q] = u
    out = np.ones((1, 1))
    for m in mats:
        out = np.kron(out, m)
    return out


def test_init_zero():
    assert np.array_equal(init_zero(1).amps, [1, 0])
    s = init_zero(3)
    assert s.amps.shape == (8,) and s.norm == 1
    assert np.array_equal(probabilities(init_zero(2)), [1, 0, 0, 0])


@pytest.mark.parametrize("n", [0, 25])
def test_init_zero_guard(n):
    with pytest.raises(ResourceLimitError):
        init_zero(n)


def test_basic_gates():
    plus = apply(init_zero(1), H(0))
    assert np.allclose(plus.amps, [1 / math.sqrt(2)] * 2)
    one = apply(init_zero(1), RY(0, math.pi))
    assert np.allclose(one.amps, [0, 1], atol=1e-12)
    # |10>: qubit 1 set, index 2
    s = apply(basis_state([0, 1]), CNOT(1, 0))
    assert np.allclose(s.amps, basis_state([1, 1]).amps)


def test_index_out_of_range():
    with pytest.raises(InvalidInputError):
        apply(init_zero(2), X(2))
    with pytest.raises(InvalidInputError):
        GateSequence(2, [CNOT(0, 3)])


def test_gate_validation():
    with pytest.raises(InvalidInputError):
        Gate("CNOT", (0,), (0,))
    with pytest.raises(InvalidInputError):
        Gate("RY", (0,))
    with pytest.raises(InvalidInputError):
        Gate("SWAP", (0,))


@pytest.mark.parametrize("q", [0, 1, 2])
@pytest.mark.parametrize("make", [lambda q: H(q), lambda q: RY(q, 0.7), lambda q: RX(q, -1.3), lambda q: X(q)])
def test_single_qubit_gates_match_dense_kron(make, q):
    rng = np.random.default_rng(q)
    s = random_state(3, rng)
    g = make(q)
    expected = dense_single(g.matrix(), q, 3) @ s.amps
    assert np.allclose(apply(s, g).amps, expected, atol=1e-12)


def test_controlled_ry_matches_dense():
    rng = np.random.default_rng(1)
    s = random_state(3, rng)
    c, t, a = 2, 0, 0.9
    proj0 = np.diag([1, 0])
    proj1 = np.diag([0, 1])
    dense = dense_single(proj0, c, 3) + dense_single(proj1, c, 3) @ dense_single(RY(t, a).matrix(), t, 3)
    assert np.allclose(apply(s, CRY(c, t, a)).amps, dense @ s.amps, atol=1e-12)


def test_probabilities_and_marginal():
    u = uniform_state(2)
    assert np.allclose(probabilities(u), [0.25] * 4)
    assert np.array_equal(probabilities(basis_state([0, 1])), [0, 0, 1, 0])
    assert np.allclose(probabilities(apply(init_zero(1), RY(0, math.pi / 2))), [0.5, 0.5])
    assert marginal(init_zero(2), 1, 0) == 1
    assert marginal(u, 0, 1) == pytest.approx(0.5)
    assert marginal(u, 1, 1) == pytest.approx(0.5)


def test_expectation_diagonal():
    rng = np.random.default_rng(3)
    s = random_state(3, rng)
    d = rng.normal(size=8)
    assert expectation_diagonal(s, np.full(8, 2.5)) == pytest.approx(2.5)
    assert expectation_diagonal(basis_state([1, 0, 1]), d) == d[5]
    brute = sum(abs(s.amps[k]) ** 2 * d[k] for k in range(8))
    assert expectation_diagonal(s, d) == pytest.approx(brute, abs=1e-14)
    with pytest.raises(InvalidInputError):
        expectation_diagonal(s, d[:4])


def test_most_probable():
    assert list(most_probable(basis_state([1, 0, 1]))) == [1, 0, 1]
    assert list(most_probable(uniform_state(3))) == [0, 0, 0]
    amps = np.sqrt([0.1, 0.7, 0.1, 0.1])
    assert list(most_probable(StateVector(2, amps))) == [1, 0]


def test_norm_preservation_long_sequence():
    rng = np.random.default_rng(7)
    n = 18
    gates = []
    kinds = ["H", "RY", "RX", "CNOT", "CZ", "CRY", "X"]
    for _ in range(10_000):
        k = kinds[rng.integers(len(kinds))]
        a, b = rng.choice(n, size=2, replace=False)
        ang = float(rng.uniform(-4, 4))
        gates.append({"H": H(a), "X": X(a), "RY": RY(a, ang), "RX": RX(a, ang), "CNOT": CNOT(a, b),
                      "CZ": CZ(a, b), "CRY": CRY(a, b, ang)}[k])
    out = run(init_zero(n), gates)
    assert abs(np.sum(np.abs(out.amps) ** 2) - 1) < 1e-8


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1), st.floats(-7, 7), st.floats(-7, 7))
def test_gate_algebra(n, seed, a, b):
    rng = np.random.default_rng(seed)
    s = random_state(n, rng)
    q = int(rng.integers(n))
    assert np.linalg.norm(run(s, [H(q), H(q)]).amps - s.amps) < 1e-10
    assert np.linalg.norm(run(s, [X(q), X(q)]).amps - s.amps) < 1e-10
    assert np.linalg.norm(run(s, [RY(q, a), RY(q, b)]).amps - apply(s, RY(q, a + b)).amps) < 1e-10
    if n >= 2:
        c, t = rng.choice(n, size=2, replace=False)
        assert np.linalg.norm(run(s, [CNOT(c, t), CNOT(c, t)]).amps - s.amps) < 1e-10
        assert np.linalg.norm(run(s, [CZ(c, t), CZ(c, t)]).amps - s.amps) < 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-7, 7))
def test_controlled_ry_control_semantics(seed, angle):
    rng = np.random.default_rng(seed)
    target = random_state(1, rng)
    off = StateVector(2, np.kron([1, 0], target.amps))
    on = StateVector(2, np.kron([0, 1], target.amps))
    assert np.linalg.norm(apply(off, CRY(1, 0, angle)).amps - off.amps) < 1e-12
    expected = np.kron([0, 1], apply(target, RY(0, angle)).amps)
    assert np.linalg.norm(apply(on, CRY(1, 0, angle)).amps - expected) < 1e-12


def test_diag_phase_preserves_probabilities():
    rng = np.random.default_rng(2)
    s = random_state(3, rng)
    out = apply(s, DIAG(rng.uniform(-10, 10, size=8)))
    assert np.allclose(probabilities(out), probabilities(s), atol=1e-14)


def test_linearity():
    rng = np.random.default_rng(4)
    a, b = random_state(3, rng), random_state(3, rng)
    alpha, beta = 0.3 - 0.2j, 1.1 + 0.5j
    gates = [H(0), CRY(0, 2, 0.4), CNOT(2, 1), RX(1, 0.3), CZ(0, 1)]
    combo = StateVector(3, alpha * a.amps + beta * b.amps)
    lhs = run(combo, gates).amps
    rhs = alpha * run(a, gates).amps + beta * run(b, gates).amps
    assert np.linalg.norm(lhs - rhs) < 1e-12


def test_apply_does_not_mutate_input():
    s = init_zero(2)
    apply(s, H(0))
    assert np.array_equal(s.amps, [1, 0, 0, 0])


def test_sequence_json_and_csv_dump():
    seq = GateSequence(3, [X(2), CNOT(0, 2), RY(2, 0.5), CRY(1, 2, -0.25)])
    again = GateSequence.from_json(3, seq.to_json())
    assert [g.to_dict() for g in again] == [g.to_dict() for g in seq]
    assert seq.counts() == {"X": 1, "CNOT": 1, "RY": 1, "CRY": 1}
    dump = init_zero(1).to_csv().splitlines()
    assert dump[0] == "index,re,im" and dump[1] == "0,1.0,0.0"
