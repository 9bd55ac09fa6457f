"""Where information sits: joint distributions, presence tests and channel location."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from . import qmath
from .circuit import TimedCircuit
from .histories import HistoryFamily, branch_probabilities
from .qmath import EPS_SUPPORT, H, IdentityDecomposition, X, Z

RECOVERY_TOL = 1e-9
PMF_TOL = 1e-12
P_MIN = 1e-12


class CanonicalLambdaWarning(UserWarning):
    pass


# --------------------------------------------------------------------------
# joint distributions


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint pmf over (M, N).  ``pmf[i, j] = Pr(M = m_labels[i], N = n_labels[j])``.

    An object array of ``Fraction`` keeps probabilities exact.
    """

    m_labels: tuple
    n_labels: tuple
    pmf: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m_labels", tuple(self.m_labels))
        object.__setattr__(self, "n_labels", tuple(self.n_labels))
        pmf = np.asarray(self.pmf)
        if pmf.dtype != object:
            pmf = pmf.astype(float)
        object.__setattr__(self, "pmf", pmf)
        if pmf.shape != (len(self.m_labels), len(self.n_labels)):
            raise ValueError(f"pmf shape {pmf.shape} does not match the labels")
        if any(p < 0 for p in pmf.flat):
            raise ValueError("pmf has a negative entry")
        total = sum(pmf.flat, Fraction(0)) if self.exact else float(pmf.sum())
        if abs(total - 1) > PMF_TOL:
            raise ValueError(f"pmf sums to {float(total)}, not 1")

    @property
    def exact(self) -> bool:
        return self.pmf.dtype == object

    @classmethod
    def from_table(cls, table: Mapping[tuple, float | Fraction], m_order=None, n_order=None) -> "JointDistribution":
        """Build from ``{(m, n): p}``; labels keep first-appearance order unless given."""
        m_labels = list(m_order) if m_order is not None else list(dict.fromkeys(m for m, _ in table))
        n_labels = list(n_order) if n_order is not None else list(dict.fromkeys(n for _, n in table))
        exact = all(isinstance(p, (Fraction, int)) for p in table.values())
        pmf = np.zeros((len(m_labels), len(n_labels)), dtype=object if exact else float)
        if exact:
            pmf[:] = Fraction(0)
        mi = {m: i for i, m in enumerate(m_labels)}
        ni = {n: j for j, n in enumerate(n_labels)}
        for (m, n), p in table.items():
            pmf[mi[m], ni[n]] += Fraction(p) if exact else p
        return cls(tuple(m_labels), tuple(n_labels), pmf)

    def p_m(self) -> np.ndarray:
        return self.pmf.sum(axis=1)

    def p_n(self) -> np.ndarray:
        return self.pmf.sum(axis=0)

    def to_dict(self) -> dict:
        return {
            "m_labels": [_jsonable(x) for x in self.m_labels],
            "n_labels": [_jsonable(x) for x in self.n_labels],
            "pmf": [[str(p) if self.exact else p for p in row] for row in self.pmf],
        }


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def entropy(p: Sequence[float]) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = np.asarray([float(x) for x in p], dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _exact_log2(r: Fraction) -> Optional[int]:
    num, den = r.numerator, r.denominator
    if num & (num - 1) == 0 and den & (den - 1) == 0:
        return num.bit_length() - den.bit_length()
    return None


def mutual_information(j: JointDistribution) -> float:
    """I(M:N) in bits.

    For exact pmfs whose likelihood ratios are powers of two the result is
    exact (e.g. precisely 1.0); otherwise it is ``H(M) + H(N) - H(M,N)``.
    """
    if not j.exact:
        hm, hn, hmn = entropy(j.p_m()), entropy(j.p_n()), entropy(j.pmf.ravel())
        return max(0.0, hm + hn - hmn)
    pm, pn = j.p_m(), j.p_n()
    exact_sum, float_sum = Fraction(0), 0.0
    for (a, b), p in np.ndenumerate(j.pmf):
        if p == 0:
            continue
        ratio = p / (pm[a] * pn[b])
        k = _exact_log2(ratio)
        if k is None:
            float_sum += float(p) * math.log2(ratio)
        else:
            exact_sum += p * k
    return max(0.0, float(exact_sum) + float_sum)


def contains_information(j: JointDistribution, tol: float = RECOVERY_TOL) -> bool:
    """True iff every outcome N with Pr(N) > 0 pins down M with Pr(M|N) = 1,
    and every M of positive probability is pinned down by some N."""
    pm, pn = j.p_m(), j.p_n()
    recovered = set()
    for b, p_n in enumerate(pn):
        if p_n <= P_MIN:
            continue
        cond = [j.pmf[a, b] / p_n for a in range(len(j.m_labels))]
        a = int(np.argmax([float(c) for c in cond]))
        if cond[a] < 1 - tol:
            return False
        recovered.add(a)
    return all(a in recovered for a, p in enumerate(pm) if p > P_MIN)


def marginalize(j: JointDistribution, n_map: Callable) -> JointDistribution:
    """Coarse-grain N through ``n_map``."""
    table: dict = {}
    for (a, b), p in np.ndenumerate(j.pmf):
        key = (j.m_labels[a], n_map(j.n_labels[b]))
        table[key] = table.get(key, Fraction(0) if j.exact else 0.0) + p
    return JointDistribution.from_table(table, m_order=j.m_labels)


# --------------------------------------------------------------------------
# lambda-parameterised qubit bases


def canonical_lambda(lam: complex, tol: float = 1e-12) -> complex:
    """Canonical label of the decomposition {|p0>, |p1>}: |lam| < 1, or lam = e^{i phi}, 0 <= phi < pi.

    For |lam| > 1 the same pair of rays is labelled by -1/conj(lam) (with the
    two members swapped); on the unit circle lam and -lam label the same pair.
    """
    lam = complex(lam)
    r = abs(lam)
    if r > 1 + tol:
        return canonical_lambda(-1 / lam.conjugate(), tol)
    if r < 1 - tol:
        return lam
    phi = math.atan2(lam.imag, lam.real) % (2 * math.pi)
    if phi >= math.pi - tol:
        phi -= math.pi
    if phi < tol or phi > math.pi - tol:
        phi = 0.0
    return complex(math.cos(phi), math.sin(phi))


def _is_canonical(lam: complex, tol: float = 1e-12) -> bool:
    return abs(canonical_lambda(lam, tol) - complex(lam)) <= 1e-12


@dataclass(frozen=True, eq=False)
class LambdaBasis:
    lam: complex
    kets: tuple

    @property
    def projectors(self) -> tuple:
        return tuple(qmath.projector(k) for k in self.kets)

    @property
    def decomposition(self) -> IdentityDecomposition:
        return IdentityDecomposition(self.projectors, None, (0, 1))


def lambda_basis(lam: complex, warn: bool = True) -> LambdaBasis:
    """Orthonormal pair ``p^m = alpha^m |0> + beta^m |1>`` labelled by ``lam``.

    ``lam = 0`` gives the S_z basis, ``1`` the S_x basis and ``1j`` the S_y
    basis.  Labels outside the canonical domain are mapped onto it.
    """
    lam = complex(lam)
    canon = canonical_lambda(lam)
    if warn and abs(canon - lam) > 1e-12:
        warnings.warn(f"lambda={lam} mapped to canonical {canon}", CanonicalLambdaWarning, stacklevel=2)
    norm = math.sqrt(1 + abs(canon) ** 2)
    p0 = np.array([1, canon], dtype=complex) / norm
    p1 = np.array([canon.conjugate(), -1], dtype=complex) / norm
    return LambdaBasis(canon, (p0, p1))


STRUCTURED_GRID = (
    0,
    1,
    -1,
    1j,
    -1j,
    complex(math.cos(math.pi / 4), math.sin(math.pi / 4)),
    0.3,
    0.5 + 0.5j,
    0.7 * complex(math.cos(math.pi / 3), math.sin(math.pi / 3)),
)


def default_lambda_grid(n_random: int = 64, seed: int = 42) -> tuple:
    """Structured worst cases followed by ``n_random`` seeded points inside the unit disk."""
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0.0, 1.0, n_random))
    phi = rng.uniform(0.0, 2 * np.pi, n_random)
    randoms = tuple(complex(x) for x in r * np.exp(1j * phi))
    return tuple(complex(x) for x in STRUCTURED_GRID) + randoms


# --------------------------------------------------------------------------
# location of information in a subsystem


@dataclass(frozen=True)
class SubsystemFactorization:
    b_qubits: tuple
    n_qubits: int

    def __post_init__(self):
        b = tuple(sorted(set(int(q) for q in self.b_qubits)))
        if not b or b[0] < 0 or b[-1] >= self.n_qubits:
            raise ValueError(f"invalid subsystem {self.b_qubits} of {self.n_qubits} qubits")
        object.__setattr__(self, "b_qubits", b)

    @property
    def f_qubits(self) -> tuple:
        return tuple(q for q in range(self.n_qubits) if q not in self.b_qubits)


def prepare(input_ket: np.ndarray, input_qubit: int, env_ket: np.ndarray) -> np.ndarray:
    """Product state with ``input_ket`` on ``input_qubit`` and ``env_ket`` on the rest (in order)."""
    env_ket = np.asarray(env_ket, dtype=complex)
    n = qmath.n_qubits_of(env_ket.shape[0]) + 1
    if not 0 <= input_qubit < n:
        raise ValueError(f"input qubit {input_qubit} out of range")
    psi = np.kron(np.asarray(input_ket, dtype=complex), env_ket).reshape((2,) * n)
    return np.moveaxis(psi, 0, input_qubit).reshape(-1)


def channel_states(
    circuit: TimedCircuit, basis: LambdaBasis, input_qubit: int, env_ket: np.ndarray, time: str
) -> list:
    """``T(time, t0) (|p^m> |e0>)`` for each basis member m."""
    u = circuit.propagator(circuit.t0, time)
    return [u @ prepare(k, input_qubit, env_ket) for k in basis.kets]


@dataclass
class LocationResult:
    located: bool
    decomposition: Optional[IdentityDecomposition]
    support_overlap: float
    supports: tuple = field(default=(), repr=False)


def locate_in_states(
    psis: Sequence[np.ndarray], b_qubits: Sequence[int], eps: float = EPS_SUPPORT
) -> LocationResult:
    """Structural test: do the reduced states on ``b_qubits`` have mutually orthogonal supports?

    On success the returned decomposition holds ``P^m = S_m (x) I`` and
    ``P_bar = I - sum P^m``, so ``P^m |psi_m'> = delta |psi_m>``.
    """
    n = qmath.n_qubits_of(len(psis[0]))
    fact = SubsystemFactorization(tuple(b_qubits), n)
    supports = tuple(
        qmath.support_projector(qmath.reduced_state(psi, fact.b_qubits), eps) for psi in psis
    )
    overlap = 0.0
    for s, t in combinations(supports, 2):
        overlap = max(overlap, qmath.max_norm(s @ t))
    if overlap > eps:
        return LocationResult(False, None, overlap, supports)
    projs = tuple(qmath.embed(s, fact.b_qubits, n) for s in supports)
    rem = np.eye(2**n, dtype=complex) - sum(projs)
    decomp = IdentityDecomposition(projs, rem if qmath.max_norm(rem) > eps else None, tuple(range(len(projs))))
    return LocationResult(True, decomp, overlap, supports)


def info_in_subsystem(
    circuit: TimedCircuit,
    basis: LambdaBasis,
    input_qubit: int,
    env_ket: np.ndarray,
    time: str,
    fact: SubsystemFactorization | Sequence[int],
    eps: float = EPS_SUPPORT,
) -> LocationResult:
    """Is the information about ``basis`` (fed into ``input_qubit``) in subsystem ``fact`` at ``time``?"""
    b = fact.b_qubits if isinstance(fact, SubsystemFactorization) else tuple(fact)
    psis = channel_states(circuit, basis, input_qubit, env_ket, time)
    return locate_in_states(psis, b, eps)


def recovery_residual(d: IdentityDecomposition, psis: Sequence[np.ndarray]) -> float:
    """``max |P^m psi_m' - delta_{mm'} psi_m|`` over all m, m'."""
    worst = 0.0
    for m, p in enumerate(d.projectors):
        for k, psi in enumerate(psis):
            target = psi if m == k else np.zeros_like(psi)
            worst = max(worst, float(np.linalg.norm(p @ psi - target)))
    return worst


def statistical_verdict(
    psis: Sequence[np.ndarray],
    b_qubits: Sequence[int],
    d: Optional[IdentityDecomposition] = None,
    tol: float = RECOVERY_TOL,
) -> bool:
    """Statistical test of presence: Pr(M|N) = 1 for a decomposition on ``b_qubits``.

    With ``d`` given, N ranges over its members (full-space operators).  Without
    it, two inputs are compared through the sign decomposition of the
    difference of their reduced states (positive, negative and null
    eigenspaces), which recovers M perfectly exactly when perfect recovery is
    possible at all.  Priors are uniform.
    """
    b = sorted(set(b_qubits))
    prior = 1.0 / len(psis)
    if d is None:
        if len(psis) != 2:
            raise ValueError("the default sign decomposition needs exactly two inputs")
        rhos = [qmath.reduced_state(psi, b) for psi in psis]
        diff = rhos[0] - rhos[1]
        w, v = np.linalg.eigh((diff + qmath.dagger(diff)) / 2)
        parts = [w > tol, w < -tol, np.abs(w) <= tol]
        members = [v[:, mask] @ v[:, mask].conj().T for mask in parts]
        table = {
            (m, k): prior * float(np.real(np.trace(members[k] @ rho)))
            for m, rho in enumerate(rhos)
            for k in range(3)
        }
    else:
        table = {
            (m, k): prior * float(np.real(np.vdot(psi, p @ psi)))
            for m, psi in enumerate(psis)
            for k, p in enumerate(d.members)
        }
    table = {key: max(p, 0.0) for key, p in table.items()}
    total = sum(table.values())
    table = {key: p / total for key, p in table.items()}
    return contains_information(JointDistribution.from_table(table), tol)


def ab_channel_projectors(lam: complex) -> IdentityDecomposition:
    """Closed-form projectors on (a, b) holding the input after the teleportation circuit's H on a.

    ``P^m = H[p^m]H (x) [+] (x) I + HZ[p^m]ZH (x) [-] (x) I`` on qubits (a, b, c).
    """
    basis = lambda_basis(lam, warn=False)
    plus, minus = qmath.projector(qmath.PLUS), qmath.projector(qmath.MINUS)
    projs = []
    for p in basis.projectors:
        first = H @ p @ H
        second = H @ Z @ p @ Z @ H
        projs.append(qmath.tensor_product([first, plus, qmath.I2]) + qmath.tensor_product([second, minus, qmath.I2]))
    return IdentityDecomposition(tuple(projs), None, (0, 1))


def contextual_basis(lam: complex) -> IdentityDecomposition:
    """Eight product projectors ``|00 p^m>, |01 X p^m>, |10 Z p^m>, |11 XZ p^m>``.

    The state of the third qubit depends on the values of the first two.
    """
    basis = lambda_basis(lam, warn=False)
    maps = {"00": qmath.I2, "01": X, "10": Z, "11": X @ Z}
    projs, labels = [], []
    for ab, u in maps.items():
        for m, p in enumerate(basis.kets):
            projs.append(qmath.projector(qmath.tensor_product([qmath.basis_ket(ab), u @ p])))
            labels.append((ab[0], ab[1], m))
    return IdentityDecomposition(tuple(projs), None, tuple(labels))


# --------------------------------------------------------------------------
# channel location over all subsets


@dataclass
class SubsetVerdict:
    qubits: tuple
    located: bool
    witness_lambda: Optional[complex] = None


@dataclass
class ChannelLocationReport:
    time: str
    subsets: list
    minimal: list
    grid_seed: int
    eps: float
    construction: str = "support"
    qubit_names: tuple = ()

    def names(self, qubits: Sequence[int]) -> list:
        if not self.qubit_names:
            return list(qubits)
        return [self.qubit_names[q] for q in qubits]

    def minimal_names(self) -> list:
        return [tuple(self.names(s)) for s in self.minimal]

    def to_dict(self) -> dict:
        subsets = []
        for v in self.subsets:
            entry = {"qubits": self.names(v.qubits), "located": v.located}
            if v.witness_lambda is not None:
                entry["witness_lambda"] = [_fmt(v.witness_lambda.real), _fmt(v.witness_lambda.imag)]
            subsets.append(entry)
        return {
            "time": self.time,
            "subsets": subsets,
            "minimal": [self.names(s) for s in self.minimal],
            "grid_seed": self.grid_seed,
            "eps": self.eps,
            "construction": self.construction,
        }


def _fmt(x: float) -> float:
    return float(f"{x:.12g}")


def minimal_subsets(located: Sequence[tuple]) -> list:
    """Inclusion-minimal members, ordered by size then lexicographically."""
    sets = [frozenset(s) for s in located]
    out = [tuple(sorted(s)) for s in sets if not any(o < s for o in sets)]
    return sorted(set(out), key=lambda s: (len(s), s))


def locate_channel(
    circuit: TimedCircuit,
    input_qubit: int,
    env_ket: np.ndarray,
    time: str,
    lambda_grid: Sequence[complex] | None = None,
    eps: float = EPS_SUPPORT,
    grid_seed: int = 42,
) -> ChannelLocationReport:
    """Test every non-empty qubit subset for containing the channel at ``time``.

    A subset is located iff the information is in it for every grid basis;
    the first failing grid point is kept as a witness.  Success is certified
    on the grid only, failure is definite.
    """
    grid = tuple(lambda_grid) if lambda_grid is not None else default_lambda_grid(64, grid_seed)
    if not grid:
        raise ValueError("lambda_grid must be non-empty")
    n = circuit.n_qubits
    subsets = [s for k in range(1, n + 1) for s in combinations(range(n), k)]
    states = [channel_states(circuit, lambda_basis(lam, warn=False), input_qubit, env_ket, time) for lam in grid]
    verdicts = []
    for s in subsets:
        witness = None
        for lam, psis in zip(grid, states):
            if not locate_in_states(psis, s, eps).located:
                witness = complex(lam)
                break
        verdicts.append(SubsetVerdict(s, witness is None, witness))
    minimal = minimal_subsets([v.qubits for v in verdicts if v.located])
    return ChannelLocationReport(time, verdicts, minimal, grid_seed, eps, "support", circuit.qubit_names)


# --------------------------------------------------------------------------
# frameworks -> joint distributions


def framework_joint(
    family: HistoryFamily,
    m_assignment: Callable[[int], object] | Sequence,
    n_assignment: Callable,
) -> JointDistribution:
    """Joint pmf of (M, N) from the branch probabilities of a consistent family.

    ``m_assignment`` maps an initial-state index to its M label;
    ``n_assignment`` maps a ``Branch`` to its N label.
    """
    m_of = m_assignment if callable(m_assignment) else (lambda i: m_assignment[i])
    table: dict = {}
    for b in branch_probabilities(family):
        key = (m_of(b.initial), n_assignment(b))
        table[key] = table.get(key, 0.0) + b.probability
    total = sum(table.values())
    table = {k: p / total for k, p in table.items()}
    m_order = list(dict.fromkeys(m_of(i) for i in range(len(family.initial))))
    m_order = [m for m in m_order if any(k[0] == m for k in table)]
    return JointDistribution.from_table(table, m_order=m_order)
