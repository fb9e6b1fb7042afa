"""QAOA and hardware-efficient VQE state preparation.

QAOA parameters are packed as ``[gamma_1..gamma_p, beta_1..beta_p]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .problems import IsingModel
from .statevector import CZ, DIAG, RX, RY, StateVector, expectation_diagonal, init_zero, run, uniform_state


def default_layers(n: int) -> int:
    return max(1, math.ceil(n / 2))


@dataclass(frozen=True, eq=False)
class QaoaConfig:
    model: IsingModel
    p: int

    def __post_init__(self) -> None:
        if self.p < 1:
            raise InvalidInputError(f"QAOA needs p >= 1, got {self.p}")

    @classmethod
    def for_model(cls, model: IsingModel) -> "QaoaConfig":
        return cls(model, default_layers(model.n))

    @property
    def n_params(self) -> int:
        return 2 * self.p


@dataclass(frozen=True)
class VqeConfig:
    """Single RY layer followed by a left-to-right CZ chain."""

    n: int

    @property
    def n_params(self) -> int:
        return self.n


def qaoa_state(cfg: QaoaConfig, gamma, beta) -> StateVector:
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if gamma.shape != (cfg.p,) or beta.shape != (cfg.p,):
        raise InvalidInputError(f"expected {cfg.p} gammas and betas, got {gamma.size} and {beta.size}")
    n = cfg.model.n
    diag = cfg.model.diagonal()
    gates = []
    for g, b in zip(gamma, beta):
        # exp(-i g H_P) exactly, as one diagonal phase
        gates.append(DIAG(g * diag))
        gates.extend(RX(q, 2.0 * b) for q in range(n))
    return run(uniform_state(n), gates)


def vqe_state(cfg: VqeConfig, theta) -> StateVector:
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.shape != (cfg.n,):
        raise InvalidInputError(f"expected {cfg.n} parameters, got {theta.size}")
    gates = [RY(q, t) for q, t in enumerate(theta)]
    gates += [CZ(q, q + 1) for q in range(cfg.n - 1)]
    return run(init_zero(cfg.n), gates)


def energy(state: StateVector, model: IsingModel) -> float:
    """``<psi|C|psi>`` without the constant offset."""
    if state.n != model.n:
        raise InvalidInputError(f"state has {state.n} qubits, model has {model.n}")
    return expectation_diagonal(state, model.diagonal())


class QaoaLoss:
    def __init__(self, model: IsingModel, p: int | None = None):
        self.config = QaoaConfig(model, default_layers(model.n) if p is None else p)
        self.model = model
        self.n_params = self.config.n_params

    def state(self, theta) -> StateVector:
        theta = np.asarray(theta, dtype=float)
        p = self.config.p
        return qaoa_state(self.config, theta[:p], theta[p:])

    def __call__(self, theta) -> float:
        return energy(self.state(theta), self.model)


class VqeLoss:
    def __init__(self, model: IsingModel):
        self.config = VqeConfig(model.n)
        self.model = model
        self.n_params = model.n

    def state(self, theta) -> StateVector:
        return vqe_state(self.config, theta)

    def __call__(self, theta) -> float:
        return energy(self.state(theta), self.model)
