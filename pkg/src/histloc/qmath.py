"""Dense linear algebra for small multi-qubit systems.

Kets are 1-D complex arrays and operators are 2-D complex arrays of
dimension ``2**n``.  Qubit 0 is the leftmost (most significant) tensor
factor, so ``basis_ket("01")`` is ``|0>|1>`` with amplitude 1 at index 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

EPS_NORM = 1e-10
EPS_SUPPORT = 1e-9

SQRT2 = np.sqrt(2.0)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / SQRT2
MINUS = np.array([1, -1], dtype=complex) / SQRT2

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2

PAULI = {"x": X, "y": Y, "z": Z}


def basis_ket(bits: str | Sequence[int]) -> np.ndarray:
    """Computational basis ket, e.g. ``basis_ket("010")``."""
    bits = [int(b) for b in bits]
    if not bits or any(b not in (0, 1) for b in bits):
        raise ValueError(f"invalid bit string {bits!r}")
    out = np.zeros(2 ** len(bits), dtype=complex)
    out[int("".join(map(str, bits)), 2)] = 1.0
    return out


BELL = {
    "00": (basis_ket("00") + basis_ket("11")) / SQRT2,
    "01": (basis_ket("01") + basis_ket("10")) / SQRT2,
    "10": (basis_ket("00") - basis_ket("11")) / SQRT2,
    "11": (basis_ket("01") - basis_ket("10")) / SQRT2,
}


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of 2")
    return n


def tensor_product(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of kets or of operators, leftmost factor most significant."""
    factors = [np.asarray(f, dtype=complex) for f in factors]
    if not factors:
        raise ValueError("tensor_product needs at least one factor")
    kinds = {f.ndim for f in factors}
    if len(kinds) != 1 or kinds.pop() not in (1, 2):
        raise ValueError("tensor_product factors must all be kets or all be operators")
    return reduce(np.kron, factors)


def dagger(op: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(op)).T


def projector(ket: np.ndarray) -> np.ndarray:
    """``|k><k|`` for a (normalised) ket."""
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def density(ket: np.ndarray) -> np.ndarray:
    return projector(ket)


def max_norm(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_unitary(op: np.ndarray, eps: float = EPS_NORM) -> bool:
    op = np.asarray(op)
    return max_norm(dagger(op) @ op - np.eye(op.shape[0])) <= eps


def rays_equal(u: np.ndarray, v: np.ndarray, eps: float = EPS_NORM) -> bool:
    """Equality of kets up to a global phase: ``|<u|v>| == |u||v|``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        return False
    return abs(abs(np.vdot(u, v)) - np.linalg.norm(u) * np.linalg.norm(v)) <= eps


def embed(op: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Lift a ``k``-qubit operator acting on ``qubits`` (in that order) to ``n`` qubits."""
    qubits = list(qubits)
    k = len(qubits)
    op = np.asarray(op, dtype=complex)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} qubits")
    if len(set(qubits)) != k or any(q < 0 or q >= n for q in qubits):
        raise ValueError(f"invalid qubit indices {qubits} for {n} qubits")
    # act on the row index of the identity, viewed as a rank-(n+1) tensor
    full = np.eye(2**n, dtype=complex).reshape((2,) * n + (2**n,))
    t = op.reshape((2,) * (2 * k))
    out = np.tensordot(t, full, axes=(list(range(k, 2 * k)), qubits))
    # tensordot puts the new qubit axes first; move them back into place
    rest = [q for q in range(n) if q not in qubits]
    order = qubits + rest + [n]
    out = np.moveaxis(out, list(range(n + 1)), order)
    return out.reshape(2**n, 2**n)


def partial_trace(rho: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Reduced operator on the qubits in ``keep`` (returned in ascending qubit order)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"partial_trace needs a square matrix, got shape {rho.shape}")
    n = n_qubits_of(rho.shape[0])
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must be non-empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep {keep} out of range for {n} qubits")
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for q in drop:
        col[q] = row[q]
    out_idx = "".join(row[q] for q in keep) + "".join(col[q] for q in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out_idx, t)
    d = 2 ** len(keep)
    return reduced.reshape(d, d)


def reduced_state(ket: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Reduced density operator of a pure state; avoids forming the full ``|psi><psi|``."""
    ket = np.asarray(ket, dtype=complex)
    n = n_qubits_of(ket.shape[0])
    keep = sorted(set(keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep {keep} out of range for {n} qubits")
    drop = [q for q in range(n) if q not in keep]
    m = np.transpose(ket.reshape((2,) * n), keep + drop).reshape(2 ** len(keep), -1)
    return m @ m.conj().T


def support_projector(rho: np.ndarray, eps: float = EPS_SUPPORT) -> np.ndarray:
    """Projector onto the span of eigenvectors of ``rho`` with eigenvalue > ``eps``.

    Raises ``ValueError`` if ``rho`` has an eigenvalue below ``-eps``.
    """
    rho = np.asarray(rho, dtype=complex)
    herm = (rho + dagger(rho)) / 2
    if max_norm(herm - rho) > eps:
        raise ValueError("support_projector needs a Hermitian operator")
    w, v = np.linalg.eigh(herm)
    if w[0] < -eps:
        raise ValueError(f"operator is not positive semidefinite (eigenvalue {w[0]:.3g})")
    vs = v[:, w > eps]
    return vs @ vs.conj().T


def locality_defect(op: np.ndarray, qubits: Sequence[int]) -> float:
    """Max-norm distance of ``op`` from the nearest operator of the form ``O_qubits (x) I``."""
    op = np.asarray(op, dtype=complex)
    n = n_qubits_of(op.shape[0])
    qubits = sorted(set(qubits))
    local = partial_trace(op, qubits) / 2 ** (n - len(qubits))
    return max_norm(op - embed(local, qubits, n))


def projector_rank(p: np.ndarray, eps: float = EPS_NORM) -> int:
    tr = float(np.real(np.trace(p)))
    r = int(round(tr))
    if abs(tr - r) > max(eps, 1e-8):
        raise ValueError(f"trace {tr} of projector is not an integer")
    return r


def is_projector(p: np.ndarray, eps: float = EPS_NORM) -> bool:
    p = np.asarray(p)
    return max_norm(p - dagger(p)) <= eps and max_norm(p @ p - p) <= eps


def projectors_commute(p: np.ndarray, q: np.ndarray, eps: float = EPS_NORM) -> bool:
    p = np.asarray(p)
    q = np.asarray(q)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch {p.shape} vs {q.shape}")
    return max_norm(p @ q - q @ p) <= eps


@dataclass(frozen=True, eq=False)
class IdentityDecomposition:
    """Mutually orthogonal projectors summing (with ``remainder``) to the identity.

    ``labels`` name the projectors (e.g. qubit values ``("0", "+")``); when
    omitted they default to ``0, 1, ...``.
    """

    projectors: tuple
    remainder: Optional[np.ndarray] = None
    labels: tuple = field(default=())

    def __post_init__(self):
        projs = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        if not projs:
            raise ValueError("decomposition needs at least one projector")
        if len({p.shape for p in projs}) != 1:
            raise ValueError("projectors must share one dimension")
        object.__setattr__(self, "projectors", projs)
        if self.remainder is not None:
            rem = np.asarray(self.remainder, dtype=complex)
            if rem.shape != projs[0].shape:
                raise ValueError("remainder dimension differs from projectors")
            object.__setattr__(self, "remainder", rem)
        labels = tuple(self.labels) if self.labels else tuple(range(len(projs)))
        if len(labels) != len(projs):
            raise ValueError("one label per projector required")
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def members(self) -> tuple:
        """Projectors followed by the remainder, if any (the remainder is labelled ``"bar"``)."""
        if self.remainder is None:
            return self.projectors
        return self.projectors + (self.remainder,)

    @property
    def member_labels(self) -> tuple:
        if self.remainder is None:
            return self.labels
        return self.labels + ("bar",)

    def conjugate(self, u: np.ndarray) -> "IdentityDecomposition":
        """Image ``U P U^dagger`` of every member."""
        u = np.asarray(u, dtype=complex)
        rem = None if self.remainder is None else u @ self.remainder @ dagger(u)
        return IdentityDecomposition(
            tuple(u @ p @ dagger(u) for p in self.projectors), rem, self.labels
        )

    @classmethod
    def from_kets(cls, kets: Sequence[np.ndarray], labels: Sequence = ()) -> "IdentityDecomposition":
        return cls(tuple(projector(k) for k in kets), None, tuple(labels))

    @classmethod
    def trivial(cls, dim: int) -> "IdentityDecomposition":
        return cls((np.eye(dim, dtype=complex),), None, ("I",))


@dataclass
class DecompositionReport:
    ok: bool
    violations: dict

    def __bool__(self) -> bool:
        return self.ok


def verify_decomposition(d: IdentityDecomposition, eps: float = EPS_NORM) -> DecompositionReport:
    """Check Hermiticity, idempotence, mutual orthogonality and completeness.

    Never raises on mathematical failure; the report carries the worst
    max-norm violation of each condition.
    """
    members = d.members
    herm = max(max_norm(p - dagger(p)) for p in members)
    idem = max(max_norm(p @ p - p) for p in members)
    orth = 0.0
    for i, p in enumerate(members):
        for q in members[i + 1 :]:
            orth = max(orth, max_norm(p @ q))
    complete = max_norm(sum(members) - np.eye(d.dim))
    violations = {
        "hermiticity": herm,
        "idempotence": idem,
        "orthogonality": orth,
        "completeness": complete,
    }
    return DecompositionReport(all(v <= eps for v in violations.values()), violations)


def product_decomposition(
    bases: Sequence[Sequence[np.ndarray] | None],
    names: Sequence[Sequence[str]] | None = None,
) -> IdentityDecomposition:
    """Decomposition built from one orthonormal basis per qubit.

    ``None`` for a qubit leaves it unresolved (identity factor, label ``"*"``).
    Labels are tuples with one entry per qubit.
    """
    per_qubit = []
    for i, basis in enumerate(bases):
        if basis is None:
            per_qubit.append([(I2, "*")])
            continue
        qn = names[i] if names is not None else [str(j) for j in range(len(basis))]
        per_qubit.append([(projector(k), lab) for k, lab in zip(basis, qn)])
    projs, labels = [], []
    for combo in product(*per_qubit):
        projs.append(tensor_product([p for p, _ in combo]))
        labels.append(tuple(lab for _, lab in combo))
    return IdentityDecomposition(tuple(projs), None, tuple(labels))


Z_BASIS = ((KET0, KET1), ("0", "1"))
X_BASIS = ((PLUS, MINUS), ("+", "-"))
