"""History families (frameworks) over a timed circuit.

A branch picks one member of each event decomposition; its chain ket is
``P_k T(t_k, t_{k-1}) ... P_1 T(t_1, t_0) |psi_0>``.  A family is consistent
when chain kets of distinct branches with the same initial state are
orthogonal, which is sufficient here because initial states are pure and
mutually orthogonal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Optional, Sequence

import numpy as np

from . import qmath
from .circuit import TimedCircuit, builtin_circuit, decode_array, encode_array
from .qmath import EPS_NORM, IdentityDecomposition

EPS_CONSISTENCY = 1e-9
PRUNE_PROBABILITY = 1e-12
# partial chain kets shorter than this cannot push any overlap past EPS_CONSISTENCY
_ZERO_KET = 1e-13


class IncompatibleFrameworksError(ValueError):
    """Two non-commuting decompositions were combined at one time."""


class InconsistentFamilyError(ValueError):
    def __init__(self, report: "ConsistencyReport"):
        super().__init__(
            f"family {report.family!r} is inconsistent (worst chain-ket overlap {report.worst_overlap:.3g})"
        )
        self.report = report


@dataclass(frozen=True)
class Branch:
    initial: int
    indices: tuple
    labels: tuple
    chain_ket: np.ndarray = field(repr=False, compare=False)
    probability: float = 0.0


@dataclass
class ConsistencyReport:
    family: str
    consistent: bool
    worst_overlap: float
    offending: Optional[tuple] = None
    eps: float = EPS_CONSISTENCY

    def to_dict(self) -> dict:
        d = {
            "family": self.family,
            "consistent": self.consistent,
            "worst_overlap": float(f"{self.worst_overlap:.12g}"),
            "eps": self.eps,
        }
        if self.offending is not None:
            d["offending"] = [
                {"initial": b.initial, "labels": [_label_json(x) for x in b.labels]} for b in self.offending
            ]
        return d


def _label_json(label):
    return list(label) if isinstance(label, tuple) else label


def frameworks_compatible(
    d1: IdentityDecomposition, d2: IdentityDecomposition, eps: float = EPS_NORM
) -> bool:
    """True iff every member of ``d1`` commutes with every member of ``d2``.

    This is a single-time criterion; no multi-time compatibility rule is implied.
    """
    if d1.dim != d2.dim:
        raise ValueError(f"dimension mismatch {d1.dim} vs {d2.dim}")
    return all(qmath.projectors_commute(p, q, eps) for p in d1.members for q in d2.members)


@dataclass(frozen=True, eq=False)
class HistoryFamily:
    """Initial ensemble plus one decomposition per event time.

    ``initial`` is a sequence of ``(prior, ket)``; ``events`` a sequence of
    ``(time, IdentityDecomposition)`` in non-decreasing time order.  Several
    events at one time are allowed only if they commute.
    """

    circuit: TimedCircuit
    initial: tuple
    events: tuple
    name: str = ""

    def __post_init__(self):
        init = tuple((float(p), np.asarray(k, dtype=complex)) for p, k in self.initial)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "events", tuple((t, d) for t, d in self.events))
        if not init:
            raise ValueError("family needs at least one initial state")
        if abs(sum(p for p, _ in init) - 1.0) > EPS_NORM or any(p < 0 for p, _ in init):
            raise ValueError("priors must be non-negative and sum to 1")
        for p, k in init:
            if k.shape != (self.circuit.dim,):
                raise ValueError("initial ket dimension does not match the circuit")
            if abs(np.linalg.norm(k) - 1) > EPS_NORM:
                raise ValueError("initial kets must be normalised")
        for (_, u), (_, v) in combinations(init, 2):
            if abs(np.vdot(u, v)) > EPS_NORM:
                raise ValueError("initial kets must be mutually orthogonal")
        last = 0
        for k, (t, d) in enumerate(self.events):
            idx = self.circuit.time_index(t)
            if idx < last:
                raise ValueError("events must be in time order")
            if d.dim != self.circuit.dim:
                raise ValueError(f"decomposition at {t} has wrong dimension")
            report = qmath.verify_decomposition(d)
            if not report:
                raise ValueError(f"event at {t} is not a decomposition of the identity: {report.violations}")
            for t2, d2 in self.events[:k]:
                if t2 == t and not frameworks_compatible(d, d2):
                    raise IncompatibleFrameworksError(
                        f"incompatible decompositions combined at time {t}"
                    )
            last = idx

    @property
    def event_times(self) -> tuple:
        return tuple(t for t, _ in self.events)

    def event_index(self, time: str) -> int:
        """Index of the (first) event at ``time``."""
        for k, (t, _) in enumerate(self.events):
            if t == time:
                return k
        raise KeyError(f"family {self.name!r} has no event at {time!r}")

    def _steps(self):
        """Propagator from the previous event (or t0) to each event."""
        steps = []
        prev = self.circuit.t0
        for t, _ in self.events:
            steps.append(self.circuit.propagator(prev, t))
            prev = t
        return steps

    def replace_event(self, time: str, d: IdentityDecomposition, name: str = "") -> "HistoryFamily":
        events = tuple((t, d if t == time else e) for t, e in self.events)
        return HistoryFamily(self.circuit, self.initial, events, name or self.name)

    def add_event(self, time: str, d: IdentityDecomposition, name: str = "") -> "HistoryFamily":
        order = self.circuit.time_index(time)
        events = list(self.events)
        pos = sum(1 for t, _ in events if self.circuit.time_index(t) <= order)
        events.insert(pos, (time, d))
        return HistoryFamily(self.circuit, self.initial, tuple(events), name or self.name)

    def to_dict(self) -> dict:
        circ = self.circuit.name if self.circuit.name in ("dense_coding", "teleportation") else self.circuit.to_dict()
        return {
            "schema": "histloc/1",
            "name": self.name,
            "circuit": circ,
            "initial": [{"prior": p, "ket": encode_array(k)} for p, k in self.initial],
            "events": [
                {
                    "time": t,
                    "projectors": [encode_array(p) for p in d.projectors],
                    "labels": [_label_json(x) for x in d.labels],
                    **({"remainder": encode_array(d.remainder)} if d.remainder is not None else {}),
                }
                for t, d in self.events
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "HistoryFamily":
        circ = d["circuit"]
        circuit = builtin_circuit(circ) if isinstance(circ, str) else TimedCircuit.from_dict(circ)
        initial = [(e["prior"], decode_array(e["ket"])) for e in d["initial"]]
        events = []
        for e in d["events"]:
            projs = tuple(decode_array(p) for p in e["projectors"])
            labels = tuple(tuple(x) if isinstance(x, list) else x for x in e.get("labels", ()))
            rem = decode_array(e["remainder"]) if "remainder" in e else None
            events.append((e["time"], IdentityDecomposition(projs, rem, labels)))
        return cls(circuit, tuple(initial), tuple(events), d.get("name", ""))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "HistoryFamily":
        return cls.from_dict(json.loads(text))


def chain_ket(f: HistoryFamily, initial: int, indices: Sequence[int]) -> np.ndarray:
    """Unnormalised chain ket of one branch (``indices`` index ``members`` per event)."""
    if not 0 <= initial < len(f.initial):
        raise IndexError(f"initial index {initial} out of range")
    if len(indices) != len(f.events):
        raise IndexError(f"need {len(f.events)} event indices, got {len(indices)}")
    ket = f.initial[initial][1]
    for step, (_, d), i in zip(f._steps(), f.events, indices):
        if not 0 <= i < len(d.members):
            raise IndexError(f"projector index {i} out of range")
        ket = d.members[i] @ (step @ ket)
    return ket


def _nonzero_branches(f: HistoryFamily, initial: int):
    """All branches from one initial state whose chain ket is not (numerically) zero."""
    steps = f._steps()
    partial = [((), f.initial[initial][1])]
    for step, (_, d) in zip(steps, f.events):
        nxt = []
        for idx, ket in partial:
            moved = step @ ket
            for i, p in enumerate(d.members):
                k = p @ moved
                if np.linalg.norm(k) > _ZERO_KET:
                    nxt.append((idx + (i,), k))
        partial = nxt
    out = []
    prior = f.initial[initial][0]
    for idx, ket in partial:
        labels = tuple(d.member_labels[i] for (_, d), i in zip(f.events, idx))
        prob = prior * float(np.vdot(ket, ket).real)
        out.append(Branch(initial, idx, labels, ket, prob))
    return out


def consistency_check(f: HistoryFamily, eps: float = EPS_CONSISTENCY) -> ConsistencyReport:
    worst, pair = 0.0, None
    for i in range(len(f.initial)):
        branches = _nonzero_branches(f, i)
        if len(branches) < 2:
            continue
        kets = np.array([b.chain_ket for b in branches])
        gram = np.abs(kets.conj() @ kets.T)
        np.fill_diagonal(gram, 0.0)
        j, k = np.unravel_index(np.argmax(gram), gram.shape)
        if gram[j, k] > worst:
            worst, pair = float(gram[j, k]), (branches[j], branches[k])
    consistent = worst <= eps
    return ConsistencyReport(f.name, consistent, worst, None if consistent else pair, eps)


@dataclass
class BranchTable:
    """Branches of a consistent family, in lexicographic (initial, indices) order."""

    family: str
    branches: list
    pruned: int = 0

    def __iter__(self):
        return iter(self.branches)

    def __len__(self):
        return len(self.branches)

    def __getitem__(self, i):
        return self.branches[i]

    @property
    def total(self) -> float:
        return sum(b.probability for b in self.branches)


def branch_probabilities(f: HistoryFamily, eps: float = EPS_CONSISTENCY) -> BranchTable:
    """Branches with positive probability; refuses inconsistent families."""
    report = consistency_check(f, eps)
    if not report.consistent:
        raise InconsistentFamilyError(report)
    kept, pruned = [], 0
    for i in range(len(f.initial)):
        for b in _nonzero_branches(f, i):
            if b.probability < PRUNE_PROBABILITY:
                pruned += 1
            else:
                kept.append(b)
    kept.sort(key=lambda b: (b.initial, b.indices))
    return BranchTable(f.name, kept, pruned)


def combine(d1: IdentityDecomposition, d2: IdentityDecomposition, eps: float = EPS_NORM) -> IdentityDecomposition:
    """Common refinement ``{P Q}`` of two compatible decompositions.

    Raises ``IncompatibleFrameworksError`` for non-commuting decompositions.
    """
    if not frameworks_compatible(d1, d2, eps):
        raise IncompatibleFrameworksError("cannot combine incompatible decompositions")
    projs, labels = [], []
    for p, lp in zip(d1.members, d1.member_labels):
        for q, lq in zip(d2.members, d2.member_labels):
            pq = p @ q
            if qmath.max_norm(pq) > eps:
                projs.append(pq)
                labels.append((lp, lq))
    return IdentityDecomposition(tuple(projs), None, tuple(labels))
