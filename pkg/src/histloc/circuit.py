"""Timed qubit circuits with exact propagators between named times."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import qmath
from .qmath import H, X, Z, embed

GATE_ARITY = {"H": 1, "X": 1, "Z": 1, "RZ": 1, "RY": 1, "CNOT": 2, "CZ": 2, "CPHASE": 2}
PARAMETRIC = ("RZ", "RY", "CPHASE")


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def cphase(theta: float) -> np.ndarray:
    """diag(1, 1, 1, e^{i theta}); ``cphase(pi)`` is CZ."""
    return np.diag([1, 1, 1, np.exp(1j * theta)]).astype(complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)


class UnboundParameterError(KeyError):
    pass


@dataclass(frozen=True)
class Gate:
    """One gate.  ``kind`` is H, X, Z, CNOT, CZ, RZ, RY, CPHASE or U (explicit matrix).

    RZ, RY and CPHASE take either a fixed ``theta`` or a named ``param`` bound at
    evaluation time.  For CNOT the qubits are ``(control, target)``.
    """

    kind: str
    qubits: tuple
    theta: Optional[float] = None
    param: Optional[str] = None
    matrix: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind == "U":
            if self.matrix is None:
                raise ValueError("gate kind U needs an explicit matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2 ** len(self.qubits),) * 2 or not qmath.is_unitary(m):
                raise ValueError("explicit gate matrix must be unitary on its qubits")
            object.__setattr__(self, "matrix", m)
        elif self.kind in GATE_ARITY:
            if len(self.qubits) != GATE_ARITY[self.kind]:
                raise ValueError(f"{self.kind} acts on {GATE_ARITY[self.kind]} qubit(s)")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated qubit in {self.kind}{self.qubits}")
        if self.kind in PARAMETRIC and (self.theta is None) == (self.param is None):
            raise ValueError(f"{self.kind} needs exactly one of theta or param")

    def local_matrix(self, params: Mapping[str, float] | None = None) -> np.ndarray:
        if self.kind in PARAMETRIC:
            theta = self.theta
            if self.param is not None:
                if not params or self.param not in params:
                    raise UnboundParameterError(self.param)
                theta = params[self.param]
            return {"RZ": rz, "RY": ry, "CPHASE": cphase}[self.kind](theta)
        return {"H": H, "X": X, "Z": Z, "CNOT": _CNOT, "CZ": _CZ, "U": self.matrix}[self.kind]

    def full_matrix(self, n: int, params: Mapping[str, float] | None = None) -> np.ndarray:
        return embed(self.local_matrix(params), self.qubits, n)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "qubits": list(self.qubits)}
        if self.theta is not None:
            d["theta"] = self.theta
        if self.param is not None:
            d["param"] = self.param
        if self.matrix is not None:
            d["matrix"] = encode_array(self.matrix)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Gate":
        matrix = decode_array(d["matrix"]) if "matrix" in d else None
        return cls(d["kind"], tuple(d["qubits"]), d.get("theta"), d.get("param"), matrix)


@dataclass(frozen=True, eq=False)
class TimedCircuit:
    """Gate layers between consecutive time labels.

    ``layers[j]`` holds the gates applied between ``times[j]`` and
    ``times[j+1]``; an empty layer is a transport interval.  ``regions`` maps
    time -> qubit name -> region label and is used only for reporting.
    """

    n_qubits: int
    times: tuple
    layers: tuple
    qubit_names: tuple = ()
    regions: Mapping = field(default_factory=dict, compare=False)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "layers", tuple(tuple(layer) for layer in self.layers))
        if not self.qubit_names:
            object.__setattr__(self, "qubit_names", tuple(f"q{i}" for i in range(self.n_qubits)))
        else:
            object.__setattr__(self, "qubit_names", tuple(self.qubit_names))
        if len(self.qubit_names) != self.n_qubits:
            raise ValueError("one name per qubit required")
        if len(set(self.times)) != len(self.times) or not self.times:
            raise ValueError("time labels must be distinct and non-empty")
        if len(self.layers) != len(self.times) - 1:
            raise ValueError("need exactly one layer per time interval")
        for layer in self.layers:
            for g in layer:
                if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                    raise ValueError(f"gate {g.kind}{g.qubits} outside {self.n_qubits} qubits")
        object.__setattr__(self, "_cache", {})

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def t0(self) -> str:
        return self.times[0]

    @property
    def params(self) -> set:
        return {g.param for layer in self.layers for g in layer if g.param is not None}

    def time_index(self, t: str) -> int:
        try:
            return self.times.index(t)
        except ValueError:
            raise KeyError(f"unknown time label {t!r}") from None

    def qubit_index(self, q) -> int:
        if isinstance(q, str):
            return self.qubit_names.index(q)
        return int(q)

    def layer_unitary(self, j: int, params: Mapping[str, float] | None = None) -> np.ndarray:
        fixed = all(g.param is None for g in self.layers[j])
        if fixed and j in self._cache:
            return self._cache[j]
        u = np.eye(self.dim, dtype=complex)
        for g in self.layers[j]:
            u = g.full_matrix(self.n_qubits, params) @ u
        if fixed:
            u.setflags(write=False)
            self._cache[j] = u
        return u

    def propagator(self, start: str, stop: str, params: Mapping[str, float] | None = None) -> np.ndarray:
        """Unitary ``T(stop, start)``: product of the layers in between, latest leftmost."""
        i, j = self.time_index(start), self.time_index(stop)
        if i > j:
            raise ValueError(f"propagator needs start <= stop, got {start} > {stop}")
        u = np.eye(self.dim, dtype=complex)
        for k in range(i, j):
            u = self.layer_unitary(k, params) @ u
        return u

    def evolve(self, psi0: np.ndarray, to: str, params: Mapping[str, float] | None = None) -> np.ndarray:
        psi0 = np.asarray(psi0, dtype=complex)
        if psi0.shape != (self.dim,):
            raise ValueError(f"state of dimension {psi0.shape} does not fit {self.n_qubits} qubits")
        return self.propagator(self.t0, to, params) @ psi0

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "name": self.name,
            "qubit_names": list(self.qubit_names),
            "times": list(self.times),
            "layers": [
                {"from": self.times[j], "to": self.times[j + 1], "gates": [g.to_dict() for g in layer]}
                for j, layer in enumerate(self.layers)
            ],
            "regions": {t: dict(r) for t, r in self.regions.items()},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TimedCircuit":
        times = list(d["times"])
        layers = [[] for _ in range(len(times) - 1)]
        for entry in d.get("layers", []):
            j = times.index(entry["from"])
            if times[j + 1] != entry["to"]:
                raise ValueError(f"layer {entry['from']}->{entry['to']} is not a single interval")
            layers[j] = [Gate.from_dict(g) for g in entry["gates"]]
        return cls(
            int(d["n_qubits"]),
            tuple(times),
            tuple(tuple(layer) for layer in layers),
            tuple(d.get("qubit_names", ())),
            d.get("regions", {}),
            d.get("name", ""),
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "TimedCircuit":
        return cls.from_dict(json.loads(text))


def encode_array(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def decode_array(d) -> np.ndarray:
    if isinstance(d, Mapping):
        return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d.get("im", 0.0), dtype=float)
    return np.asarray(d, dtype=complex)


TIMES = tuple(f"t{k}" for k in range(9))


def _regions(names, spans):
    """``spans[name]`` is a region label per time index 0..8."""
    return {t: {q: spans[q][k] for q in names} for k, t in enumerate(TIMES)}


def dense_coding_circuit() -> TimedCircuit:
    """Four-qubit dense coding circuit on qubits (a, abar, b, c)."""
    a, abar, b, c = 0, 1, 2, 3
    layers = (
        (Gate("H", (b,)),),
        (Gate("CNOT", (b, c)),),
        (),
        (Gate("CNOT", (abar, b)),),
        (Gate("CZ", (a, b)),),
        (),
        (Gate("CNOT", (b, c)),),
        (Gate("H", (b,)),),
    )
    names = ("a", "abar", "b", "c")
    spans = {
        "a": ["Alice"] * 9,
        "abar": ["Alice"] * 9,
        "b": ["Bob", "Bob", "transit", "Alice", "Alice", "transit", "transit", "Bob", "Bob"],
        "c": ["Bob"] * 9,
    }
    return TimedCircuit(4, TIMES, layers, names, _regions(names, spans), "dense_coding")


def teleportation_circuit() -> TimedCircuit:
    """Three-qubit teleportation circuit on qubits (a, b, c); b, c start in |00>."""
    a, b, c = 0, 1, 2
    layers = (
        (Gate("H", (b,)),),
        (Gate("CNOT", (b, c)),),
        (),
        (Gate("CNOT", (a, b)),),
        (Gate("H", (a,)),),
        (),
        (Gate("CNOT", (b, c)),),
        (Gate("CZ", (a, c)),),
    )
    names = ("a", "b", "c")
    spans = {
        "a": ["Alice"] * 9,
        "b": ["Bob", "Bob", "transit"] + ["Alice"] * 6,
        "c": ["Bob"] * 9,
    }
    return TimedCircuit(3, TIMES, layers, names, _regions(names, spans), "teleportation")


def theta_dense_coding_circuit() -> TimedCircuit:
    """Dense coding with the message written by parameterised rotations.

    All qubits start in |0>; ``RY(theta_a)`` on a and ``RY(theta_abar)`` on
    abar during (t0, t1) prepare the message (theta = 0 or pi gives 0 or 1).
    """
    base = dense_coding_circuit()
    first = (Gate("RY", (0,), param="theta_a"), Gate("RY", (1,), param="theta_abar")) + base.layers[0]
    return TimedCircuit(
        4, base.times, (first,) + base.layers[1:], base.qubit_names, base.regions, "theta_dense_coding"
    )


def phase_dense_coding_circuit() -> TimedCircuit:
    """Dense coding with CZ(a, b) replaced by a controlled phase of angle ``theta``.

    ``theta = pi`` restores the original circuit.  With every qubit starting
    in |0> the gate never changes the state, yet b's Heisenberg operators
    still depend on ``theta`` once it has acted.
    """
    base = dense_coding_circuit()
    layers = list(base.layers)
    layers[4] = (Gate("CPHASE", (0, 2), param="theta"),)
    return TimedCircuit(4, base.times, tuple(layers), base.qubit_names, base.regions, "phase_dense_coding")


BUILTIN_CIRCUITS = {
    "dense_coding": dense_coding_circuit,
    "teleportation": teleportation_circuit,
    "theta_dense_coding": theta_dense_coding_circuit,
    "phase_dense_coding": phase_dense_coding_circuit,
}


def builtin_circuit(name: str) -> TimedCircuit:
    key = name.replace("-", "_")
    if key not in BUILTIN_CIRCUITS:
        raise KeyError(f"unknown builtin circuit {name!r}; choose from {sorted(BUILTIN_CIRCUITS)}")
    return BUILTIN_CIRCUITS[key]()
