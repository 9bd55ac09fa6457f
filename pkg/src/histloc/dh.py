"""Heisenberg-picture descriptors and parameter dependence versus accessibility.

Information about a gate parameter is attributed to a qubit when that qubit's
conjugated Pauli operators depend on the parameter; it is accessible only if
the qubit's own reduced state (from the all-|0> start) changes with it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import qmath
from .circuit import TimedCircuit, UnboundParameterError

FD_STEP = 1e-6
DEPENDENCE_THRESHOLD = 1e-6
ACCESS_TOL = 1e-9
# derivative is probed at theta0 and theta0 +- this offset, so an isolated stationary point is not missed
PROBE_OFFSET = 0.5


def _check_bound(circuit: TimedCircuit, params: Mapping[str, float] | None):
    missing = circuit.params - set(params or {})
    if missing:
        raise UnboundParameterError(", ".join(sorted(missing)))


def heisenberg_operator(
    circuit: TimedCircuit, alpha: int, j: str, t: str, params: Mapping[str, float] | None = None
) -> np.ndarray:
    """``T(t0, t) sigma^alpha_j T(t, t0)`` on the full space."""
    _check_bound(circuit, params)
    u = circuit.propagator(circuit.t0, t, params)
    sigma = qmath.embed(qmath.PAULI[j], [alpha], circuit.n_qubits)
    return qmath.dagger(u) @ sigma @ u


@dataclass(frozen=True)
class HeisenbergDescriptor:
    alpha: int
    time: str
    ops: dict

    @classmethod
    def compute(cls, circuit, alpha, t, params=None) -> "HeisenbergDescriptor":
        return cls(alpha, t, {j: heisenberg_operator(circuit, alpha, j, t, params) for j in "xyz"})


@dataclass
class Dependence:
    depends: bool
    magnitude: float


def parameter_dependence(
    circuit: TimedCircuit,
    alpha: int,
    t: str,
    theta0: Mapping[str, float],
    param: str | None = None,
    dtheta: float = FD_STEP,
) -> Dependence:
    """Central-difference size of d(sigma-hat)/d(theta), maximised over j = x, y, z.

    ``param`` names the parameter being varied (optional if the circuit has
    only one); the other parameters stay at their ``theta0`` values.
    """
    if dtheta <= 0:
        raise ValueError("dtheta must be positive")
    if param is None:
        if len(circuit.params) != 1:
            raise ValueError("param must be named for circuits with several parameters")
        param = next(iter(circuit.params))
    _check_bound(circuit, theta0)
    magnitude = 0.0
    for offset in (-PROBE_OFFSET, 0.0, PROBE_OFFSET):
        centre = theta0[param] + offset
        lo = {**theta0, param: centre - dtheta}
        hi = {**theta0, param: centre + dtheta}
        for j in "xyz":
            diff = heisenberg_operator(circuit, alpha, j, t, hi) - heisenberg_operator(circuit, alpha, j, t, lo)
            magnitude = max(magnitude, qmath.max_norm(diff) / (2 * dtheta))
    return Dependence(magnitude > DEPENDENCE_THRESHOLD, magnitude)


@dataclass
class Accessibility:
    accessible: bool
    spread: float


def accessibility_test(
    circuit: TimedCircuit, alpha: int, t: str, theta_samples: Sequence[Mapping[str, float]]
) -> Accessibility:
    """Does the reduced state of qubit ``alpha`` at ``t`` change across parameter samples?"""
    if len(theta_samples) < 2:
        raise ValueError("need at least two parameter samples")
    psi0 = np.zeros(circuit.dim, dtype=complex)
    psi0[0] = 1.0
    rhos = []
    for params in theta_samples:
        _check_bound(circuit, params)
        rhos.append(qmath.reduced_state(circuit.evolve(psi0, t, params), [alpha]))
    spread = max(qmath.max_norm(r - rhos[0]) for r in rhos[1:])
    return Accessibility(spread > ACCESS_TOL, spread)


def expectation_schrodinger(circuit, alpha, j, t, params=None) -> complex:
    psi0 = np.zeros(circuit.dim, dtype=complex)
    psi0[0] = 1.0
    psi = circuit.evolve(psi0, t, params)
    return np.vdot(psi, qmath.embed(qmath.PAULI[j], [alpha], circuit.n_qubits) @ psi)


def expectation_heisenberg(circuit, alpha, j, t, params=None) -> complex:
    op = heisenberg_operator(circuit, alpha, j, t, params)
    return op[0, 0]


def random_circuit(rng: np.random.Generator, n_qubits: int, depth: int) -> tuple:
    """Random parameterised circuit and a random binding of its parameters."""
    from .circuit import Gate

    times = tuple(f"t{k}" for k in range(depth + 1))
    layers, params = [], {}
    for d in range(depth):
        layer = []
        for q in range(n_qubits):
            kind = rng.choice(["H", "X", "Z", "RY", "RZ", "RYp", "RZp", "none"])
            if kind == "none":
                continue
            if kind in ("RY", "RZ"):
                layer.append(Gate(kind, (q,), theta=float(rng.uniform(-np.pi, np.pi))))
            elif kind in ("RYp", "RZp"):
                name = f"th{d}_{q}"
                params[name] = float(rng.uniform(-np.pi, np.pi))
                layer.append(Gate(kind[:2], (q,), param=name))
            else:
                layer.append(Gate(kind, (q,)))
        if n_qubits > 1:
            c, t = rng.choice(n_qubits, size=2, replace=False)
            layer.append(Gate(str(rng.choice(["CNOT", "CZ"])), (int(c), int(t))))
        layers.append(tuple(layer))
    return TimedCircuit(n_qubits, times, tuple(layers), name="random"), params
