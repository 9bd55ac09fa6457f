"""Worked scenarios: dense coding, teleportation, classical carriers, and causal descriptors.

Each report builder returns a ``ScenarioReport`` holding an information
table (M variable, carrier qubits, mutual information) and a list of checks
judged against the claim registry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Optional, Sequence

import numpy as np

from . import classical, dh, qmath
from .circuit import (
    dense_coding_circuit,
    phase_dense_coding_circuit,
    teleportation_circuit,
    theta_dense_coding_circuit,
)
from .claims import ClaimRegistry, load_registry
from .config import Config
from .histories import HistoryFamily, branch_probabilities, consistency_check
from .infoloc import (
    JointDistribution,
    channel_states,
    contextual_basis,
    default_lambda_grid,
    entropy,
    ab_channel_projectors,
    framework_joint,
    lambda_basis,
    locate_channel,
    locate_in_states,
    mutual_information,
    recovery_residual,
    statistical_verdict,
)
from .qmath import BELL, X_BASIS, Z_BASIS, IdentityDecomposition

SCHEMA = "histloc/1"
SIG_FIGS = 12


def to_jsonable(x):
    """Plain JSON types, floats rounded to 12 significant figures."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(f"{float(x):.{SIG_FIGS}g}")
        return 0.0 if v == 0 else v
    if isinstance(x, complex):
        return [to_jsonable(x.real), to_jsonable(x.imag)]
    return x


@dataclass
class MIEntry:
    time: str
    m_var: str
    carrier: tuple
    mi: float
    dim: int

    def to_dict(self) -> dict:
        return {"time": self.time, "m_var": self.m_var, "carrier": list(self.carrier), "mi": self.mi, "dim": self.dim}


@dataclass
class Check:
    claim_id: str
    expected: object
    observed: object
    passed: bool
    op: str = "eq"
    tolerance: float = 0.0

    def to_dict(self) -> dict:
        return {
            "claim": self.claim_id,
            "op": self.op,
            "expected": self.expected,
            "observed": self.observed,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class ScenarioReport:
    scenario: str
    structure: str = ""
    table: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    sections: dict = field(default_factory=dict)
    registry: Optional[ClaimRegistry] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, claim_id: str, observed) -> Check:
        reg = self.registry or load_registry()
        claim = reg[claim_id]
        c = Check(claim_id, claim.expected, observed, claim.evaluate(observed), claim.op, claim.tolerance)
        self.checks.append(c)
        return c

    def add(self, time: str, m_var: str, carrier: Sequence[str], mi: float) -> float:
        self.table.append(MIEntry(time, m_var, tuple(carrier), float(mi), 2 ** len(carrier)))
        return float(mi)

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "schema": SCHEMA,
                "scenario": self.scenario,
                "structure": self.structure,
                "passed": self.passed,
                "table": [e.to_dict() for e in self.table],
                "checks": [c.to_dict() for c in self.checks],
                "sections": self.sections,
            }
        )

    def to_text(self) -> str:
        title = f"{self.scenario} [{self.structure}]" if self.structure else self.scenario
        lines = [f"== {title}: {'PASS' if self.passed else 'FAIL'}"]
        if self.table:
            lines.append(f"  {'time':<5}{'M':<10}{'carrier':<12}{'MI (bits)':>10}")
            for e in self.table:
                lines.append(f"  {e.time:<5}{e.m_var:<10}{','.join(e.carrier):<12}{e.mi:>10.6f}")
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.claim_id}: observed {to_jsonable(c.observed)} ({c.op} {c.expected})")
        for name, body in self.sections.items():
            lines.append(f"  -- {name}: {to_jsonable(body)}")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# shared helpers


def _grid(cfg: Config) -> tuple:
    return default_lambda_grid(cfg.lambda_grid_size, cfg.seed)


def _product_event(spec: Sequence[Optional[str]]) -> IdentityDecomposition:
    """Product decomposition; ``spec`` has ``"z"``, ``"x"`` or ``None`` per qubit."""
    table = {"z": Z_BASIS, "x": X_BASIS}
    bases = [table[s][0] if s else None for s in spec]
    names = [table[s][1] if s else () for s in spec]
    return qmath.product_decomposition(bases, names)


def _label_at(family: HistoryFamily, time: str, qubits: Sequence[int]) -> Callable:
    k = family.event_index(time)
    return lambda b: tuple(b.labels[k][q] for q in qubits)


def _mi(family: HistoryFamily, m_of, n_of) -> float:
    return mutual_information(framework_joint(family, m_of, n_of))


def _prob(family: HistoryFamily, predicate: Callable, given: int) -> float:
    """Pr(predicate(branch) | initial = given)."""
    table = branch_probabilities(family)
    num = sum(b.probability for b in table if b.initial == given and predicate(b))
    den = sum(b.probability for b in table if b.initial == given)
    return num / den


# --------------------------------------------------------------------------
# dense coding

DENSE_INPUTS = ("00", "01", "10", "11")  # (a, abar)
A, ABAR, B, C = 0, 1, 2, 3


def _dense_initial() -> tuple:
    return tuple((0.25, qmath.basis_ket(m + "00")) for m in DENSE_INPUTS)


def dense_f1_family() -> HistoryFamily:
    """Unitary development with the Bell index of (b, c) resolved at t5."""
    circuit = dense_coding_circuit()
    projs = tuple(qmath.embed(qmath.projector(BELL[k]), [B, C], 4) for k in sorted(BELL))
    event = IdentityDecomposition(projs, None, tuple(sorted(BELL)))
    return HistoryFamily(circuit, _dense_initial(), (("t5", event),), "dense_f1")


def dense_f2_family(b_at_t8: bool = False) -> HistoryFamily:
    """Computational basis for every qubit at t2..t7; a, abar, c (and optionally b) at t8."""
    circuit = dense_coding_circuit()
    events = [(t, _product_event("zzzz")) for t in ("t2", "t3", "t4", "t5", "t6", "t7")]
    events.append(("t8", _product_event(("z", "z", "z" if b_at_t8 else None, "z"))))
    name = "dense_f2_b_at_t8" if b_at_t8 else "dense_f2"
    return HistoryFamily(circuit, _dense_initial(), tuple(events), name)


def dense_f3_family(c_z_at_t7: bool = False) -> HistoryFamily:
    """a, abar in the computational basis; b, c in the S_x basis until b is measured at t8."""
    circuit = dense_coding_circuit()
    events = [(t, _product_event("zzxx")) for t in ("t2", "t3", "t4", "t5", "t6")]
    events.append(("t7", _product_event("zzxz" if c_z_at_t7 else "zzxx")))
    events.append(("t8", _product_event("zzzx")))
    name = "dense_f3_c_z_at_t7" if c_z_at_t7 else "dense_f3"
    return HistoryFamily(circuit, _dense_initial(), tuple(events), name)


def _dense_m(var: str) -> Callable:
    pick = {"a": lambda m: m[0], "abar": lambda m: m[1], "a,abar": lambda m: m}[var]
    return lambda i: pick(DENSE_INPUTS[i])


def dense_coding_report(framework: str, cfg: Config | None = None) -> ScenarioReport:
    framework = framework.lower()
    if framework not in ("f1", "f2", "f3"):
        raise ValueError(f"unknown dense coding framework {framework!r}")
    report = ScenarioReport(f"dense-coding-{framework}", framework.upper())
    {"f1": _dense_f1, "f2": _dense_f2, "f3": _dense_f3}[framework](report, cfg or Config())
    return report


def _dense_f1(report: ScenarioReport, cfg: Config):
    fam = dense_f1_family()
    circuit = fam.circuit
    report.check("dense.f1.consistent", consistency_check(fam, cfg.eps_consistency).consistent)
    bell = fam.event_index("t5")
    mi = _mi(fam, _dense_m("a,abar"), lambda b: b.labels[bell])
    report.check("dense.f1.mi_bell_t5", report.add("t5", "a,abar", ("b", "c"), mi))
    # b alone: identical reduced states, so no framework on b can carry anything
    rhos = [qmath.reduced_state(circuit.evolve(k, "t5"), [B]) for _, k in fam.initial]
    dev = max(qmath.max_norm(r - np.eye(2) / 2) for r in rhos)
    report.check("dense.f1.rho_b_t5_deviation", dev)

    decodes = True
    for m, (_, k) in zip(DENSE_INPUTS, fam.initial):
        final = circuit.evolve(k, "t8")
        decodes &= qmath.max_norm(qmath.reduced_state(final, [B]) - qmath.density(qmath.basis_ket(m[0]))) < cfg.eps_norm
        decodes &= qmath.max_norm(qmath.reduced_state(final, [C]) - qmath.density(qmath.basis_ket(m[1]))) < cfg.eps_norm
    report.check("dense.f1.decodes", bool(decodes))

    plus_in = qmath.tensor_product([qmath.PLUS, qmath.KET0, qmath.KET0, qmath.KET0])
    final = circuit.evolve(plus_in, "t8")
    fidelities = [
        float(np.real(np.vdot(qmath.PLUS, qmath.reduced_state(final, [q]) @ qmath.PLUS))) for q in (A, B)
    ]
    report.sections["superposed_input_fidelity"] = {"a": fidelities[0], "b": fidelities[1]}
    report.check("dense.f1.superposed_not_reproduced", all(f < 1 - 1e-6 for f in fidelities))


def _dense_f2(report: ScenarioReport, cfg: Config):
    fam = dense_f2_family()
    report.check("dense.f2.consistent", consistency_check(fam, cfg.eps_consistency).consistent)
    table = branch_probabilities(fam, cfg.eps_consistency)
    counts = [sum(1 for b in table if b.initial == i) for i in range(4)]
    report.check("dense.f2.branches_per_input", max(counts) if len(set(counts)) == 1 else counts)
    dev = max(abs(4 * b.probability - 0.5) for b in table)
    report.check("dense.f2.branch_conditional_deviation", dev)

    names = ("b", "c")
    worst_a = 0.0
    for t in ("t2", "t3", "t4", "t5", "t6", "t7"):
        for var in ("a", "abar"):
            for carrier in ((B,), (C,), (B, C)):
                mi = _mi(fam, _dense_m(var), _label_at(fam, t, carrier))
                report.add(t, var, [names[q - B] for q in carrier], mi)
                if var == "a" and carrier == (B, C):
                    worst_a = max(worst_a, mi)
        parity = _mi(fam, _dense_m("abar"), lambda b, k=fam.event_index(t): b.labels[k][B] == b.labels[k][C])
        report.add(t, "abar", ("b", "c"), parity)
        if t == "t4":
            report.check("dense.f2.mi_abar_parity_t4", parity)
    k4 = fam.event_index("t4")
    report.check("dense.f2.mi_abar_b_t4", _mi(fam, _dense_m("abar"), lambda b: b.labels[k4][B]))
    report.check("dense.f2.mi_abar_c_t4", _mi(fam, _dense_m("abar"), lambda b: b.labels[k4][C]))
    k7 = fam.event_index("t7")
    p = min(_prob(fam, lambda b, i=i: b.labels[k7][C] == DENSE_INPUTS[i][1], i) for i in range(4))
    report.check("dense.f2.p_c_equals_abar_t7", p)
    report.check("dense.f2.mi_a_bc", worst_a)

    bad = consistency_check(dense_f2_family(b_at_t8=True), cfg.eps_consistency)
    report.sections["b_at_t8"] = bad.to_dict()
    report.check("dense.f2.b_t8_overlap", bad.worst_overlap)


def _dense_f3(report: ScenarioReport, cfg: Config):
    fam = dense_f3_family()
    report.check("dense.f3.consistent", consistency_check(fam, cfg.eps_consistency).consistent)
    k2 = fam.event_index("t2")
    dev = max(
        abs(_prob(fam, lambda b, s=s: b.labels[k2][B] == b.labels[k2][C] == s, i) - 0.5)
        for i in range(4)
        for s in "+-"
    )
    report.check("dense.f3.p_bc_equal_t2_deviation", dev)

    for t in ("t2", "t3", "t4", "t5", "t6", "t7"):
        k = fam.event_index(t)
        for var in ("a", "abar"):
            corr = _mi(fam, _dense_m(var), lambda b, k=k: b.labels[k][B] == b.labels[k][C])
            report.add(t, var, ("b", "c"), corr)
            if var == "a" and t in ("t5", "t6"):
                report.check(f"dense.f3.mi_a_corr_{t}", corr)
            for carrier, name in (((B,), "b"), ((C,), "c")):
                mi = _mi(fam, _dense_m(var), _label_at(fam, t, carrier))
                report.add(t, var, (name,), mi)
                if var == "a" and t == "t5":
                    report.check(f"dense.f3.mi_a_{name}_t5", mi)
            if var == "abar" and t == "t5":
                report.check("dense.f3.mi_abar_bc_t5", _mi(fam, _dense_m(var), _label_at(fam, t, (B, C))))
    k8 = fam.event_index("t8")
    p = min(_prob(fam, lambda b, i=i: b.labels[k8][B] == DENSE_INPUTS[i][0], i) for i in range(4))
    report.check("dense.f3.p_b_equals_a_t8", p)
    report.add("t8", "a", ("b",), _mi(fam, _dense_m("a"), _label_at(fam, "t8", (B,))))

    bad = consistency_check(dense_f3_family(c_z_at_t7=True), cfg.eps_consistency)
    report.sections["c_z_at_t7"] = bad.to_dict()
    report.check("dense.f3.c_t7_overlap", bad.worst_overlap)


# --------------------------------------------------------------------------
# teleportation

TA, TB, TC = 0, 1, 2
TELE_NAMES = ("a", "b", "c")
ENV00 = qmath.basis_ket("00")
ALPHA, BETA = 0.6, 0.8


TELE_ALIASES = {
    "unitary": "unitary_channel",
    "computational": "computational_F",
    "sx": "sx_F",
    "contextual": "contextual_F",
}


def _swap_bc() -> np.ndarray:
    swap = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    return qmath.embed(swap, [TB, TC], 3)


def teleportation_report(structure: str, cfg: Config | None = None) -> ScenarioReport:
    cfg = cfg or Config()
    structure = TELE_ALIASES.get(structure, structure)
    builders = {
        "unitary_channel": _tele_unitary,
        "computational_F": _tele_computational,
        "sx_F": _tele_sx,
        "contextual_F": _tele_contextual,
    }
    if structure not in builders:
        raise ValueError(f"unknown teleportation structure {structure!r}; choose from {sorted(builders)}")
    short = {v: k for k, v in TELE_ALIASES.items()}[structure]
    report = ScenarioReport(f"teleportation-{short}", structure)
    builders[structure](report, cfg)
    return report


def _located_mi(psis, d: IdentityDecomposition) -> float:
    table = {
        (m, k): max(0.0, 0.5 * float(np.real(np.vdot(psi, p @ psi))))
        for m, psi in enumerate(psis)
        for k, p in enumerate(d.members)
    }
    total = sum(table.values())
    table = {key: p / total for key, p in table.items()}
    return mutual_information(JointDistribution.from_table(table))


def _tele_unitary(report: ScenarioReport, cfg: Config):
    circuit = teleportation_circuit()
    psi = ALPHA * qmath.KET0 + BETA * qmath.KET1
    start = qmath.tensor_product([psi, ENV00])
    psi2 = circuit.evolve(start, "t2")
    report.check("tele.psi2_deviation", qmath.max_norm(psi2 - qmath.tensor_product([psi, BELL["00"]])))
    psi5 = circuit.evolve(start, "t5")
    expansion = 0.5 * np.concatenate(
        [
            [ALPHA, BETA],  # |00>_ab
            [BETA, ALPHA],  # |01>_ab
            [ALPHA, -BETA],  # |10>_ab
            [-BETA, ALPHA],  # |11>_ab
        ]
    )
    report.check("tele.psi5_deviation", qmath.max_norm(psi5 - expansion))
    report.check("tele.psi5_swap_deviation", qmath.max_norm(_swap_bc() @ psi5 - psi5))
    psi8 = circuit.evolve(start, "t8")
    target = qmath.tensor_product([qmath.PLUS, qmath.PLUS, psi])
    report.check("tele.psi8_deviation", qmath.max_norm(psi8 - target))

    grid = _grid(cfg)
    minimal = {}
    for t in circuit.times:
        loc = locate_channel(circuit, TA, ENV00, t, grid, cfg.eps_support, cfg.seed)
        names = [list(s) for s in loc.minimal_names()]
        minimal[t] = names
        for subset in loc.minimal:
            mi = min(
                _located_mi(psis, locate_in_states(psis, subset, cfg.eps_support).decomposition)
                for psis in (channel_states(circuit, lambda_basis(lam, warn=False), TA, ENV00, t) for lam in grid)
            )
            report.add(t, "m", [TELE_NAMES[q] for q in subset], mi)
    report.sections["minimal_subsets"] = minimal
    for t in ("t1", "t2", "t3", "t4", "t5", "t8"):
        report.check(f"tele.unitary.minimal_{t}", minimal[t])

    input_res, agree, res_ab, swapped = 0.0, 0.0, 0.0, 0.0
    swap = _swap_bc()
    for lam in grid:
        basis = lambda_basis(lam, warn=False)
        d_in = IdentityDecomposition(tuple(qmath.embed(p, [TA], 3) for p in basis.projectors))
        input_res = max(input_res, recovery_residual(d_in, channel_states(circuit, basis, TA, ENV00, "t3")))
        psis = channel_states(circuit, basis, TA, ENV00, "t5")
        closed = ab_channel_projectors(lam)
        found = locate_in_states(psis, (TA, TB), cfg.eps_support).decomposition
        agree = max(agree, max(qmath.max_norm(p - q) for p, q in zip(closed.projectors, found.projectors)))
        res_ab = max(res_ab, recovery_residual(closed, psis))
        swapped = max(swapped, recovery_residual(closed.conjugate(swap), psis))
    report.check("tele.unitary.input_qubit_residual", input_res)
    report.check("tele.unitary.closed_form_agreement", agree)
    report.check("tele.unitary.closed_form_residual", res_ab)
    report.check("tele.unitary.closed_form_swapped_residual", swapped)


def _tele_family(lam: complex, events, name: str) -> HistoryFamily:
    basis = lambda_basis(lam, warn=False)
    initial = tuple((0.5, qmath.tensor_product([k, ENV00])) for k in basis.kets)
    return HistoryFamily(teleportation_circuit(), initial, tuple(events), name)


def _subset_table(report: ScenarioReport, fam: HistoryFamily, times) -> dict:
    """MI between m and every qubit subset's labels at each time; returns {(time, names): mi}."""
    out = {}
    for t in times:
        for k in range(1, 4):
            for subset in combinations(range(3), k):
                names = tuple(TELE_NAMES[q] for q in subset)
                out[(t, names)] = report.add(t, "m", names, _mi(fam, lambda i: i, _label_at(fam, t, subset)))
    return out


def tele_computational_family() -> HistoryFamily:
    events = [(t, _product_event("zzz")) for t in ("t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8")]
    return _tele_family(0.0, events, "tele_computational")


def tele_sx_family() -> HistoryFamily:
    events = [(t, _product_event("xxx")) for t in ("t1", "t2", "t3", "t4")]
    events += [(t, _product_event("zxx")) for t in ("t5", "t6", "t7", "t8")]
    return _tele_family(1.0, events, "tele_sx")


def _tele_computational(report: ScenarioReport, cfg: Config):
    fam = tele_computational_family()
    report.check("tele.computational.consistent", consistency_check(fam, cfg.eps_consistency).consistent)
    mi = _subset_table(report, fam, fam.event_times)
    report.check("tele.computational.mi_a_t4", mi[("t4", ("a",))])
    report.check("tele.computational.mi_bc_t4", mi[("t4", ("b", "c"))])
    report.check("tele.computational.mi_bc_t5", mi[("t5", ("b", "c"))])
    report.check("tele.computational.mi_ab_t5", mi[("t5", ("a", "b"))])
    report.check("tele.computational.mi_ac_t5", mi[("t5", ("a", "c"))])
    report.check("tele.computational.mi_c_t8", mi[("t8", ("c",))])


def _tele_sx(report: ScenarioReport, cfg: Config):
    fam = tele_sx_family()
    report.check("tele.sx.consistent", consistency_check(fam, cfg.eps_consistency).consistent)
    mi = _subset_table(report, fam, fam.event_times)
    report.check("tele.sx.mi_a_t4", mi[("t4", ("a",))])
    report.check("tele.sx.mi_ab_t4", mi[("t4", ("a", "b"))])
    report.check("tele.sx.mi_ac_t4", mi[("t4", ("a", "c"))])
    report.check("tele.sx.mi_ac_t5", mi[("t5", ("a", "c"))])
    report.check("tele.sx.mi_b_t7", mi[("t7", ("b",))])
    report.check("tele.sx.mi_c_t8", mi[("t8", ("c",))])


def tele_contextual_family(lam: complex) -> HistoryFamily:
    """Contextual basis at t5 and t6, carried unitarily to t7 and t8."""
    circuit = teleportation_circuit()
    base = contextual_basis(lam)
    events = [("t5", base), ("t6", base)]
    for t in ("t7", "t8"):
        events.append((t, base.conjugate(circuit.propagator("t5", t))))
    return _tele_family(lam, events, "tele_contextual")


def _tele_contextual(report: ScenarioReport, cfg: Config):
    grid = _grid(cfg)
    violation, consistent = 0.0, True
    mi_ab, mi_abc, mi_c, on_c = 0.0, math.inf, math.inf, 0.0
    for lam in grid:
        fam = tele_contextual_family(lam)
        violation = max(violation, max(qmath.verify_decomposition(fam.events[0][1]).violations.values()))
        consistent &= consistency_check(fam, cfg.eps_consistency).consistent
        k5, k8 = fam.event_index("t5"), fam.event_index("t8")
        mi_ab = max(mi_ab, _mi(fam, lambda i: i, lambda b: b.labels[k5][:2]))
        mi_abc = min(mi_abc, _mi(fam, lambda i: i, lambda b: b.labels[k5]))
        mi_c = min(mi_c, _mi(fam, lambda i: i, lambda b: b.labels[k8][2]))
        d8 = fam.events[k8][1]
        for m in (0, 1):
            coarse = sum(p for p, lab in zip(d8.projectors, d8.labels) if lab[2] == m)
            on_c = max(on_c, qmath.locality_defect(coarse, [TC]))
    report.add("t5", "m", ("a", "b"), mi_ab)
    report.add("t5", "m", ("a", "b", "c"), mi_abc)
    report.add("t8", "m", ("c",), mi_c)
    report.sections["grid_points"] = len(grid)
    report.check("tele.contextual.decomposition_violation", violation)
    report.check("tele.contextual.consistent", bool(consistent))
    report.check("tele.contextual.mi_ab_t5_max", mi_ab)
    report.check("tele.contextual.mi_abc_t5_min", mi_abc)
    report.check("tele.contextual.mi_c_t8_min", mi_c)
    report.check("tele.contextual.t8_on_c_deviation", on_c)


# --------------------------------------------------------------------------
# no backwards-in-time information, capacity


EARLY_TIMES = ("t0", "t1", "t2", "t3")


def retrocausality_check(circuit: str, cfg: Config | None = None) -> float:
    """Largest max-norm spread of the (b, c) reduced state across inputs, over t0..t3.

    Dense coding compares the four (a, abar) inputs; teleportation compares
    both members of every grid basis.
    """
    cfg = cfg or Config()
    if circuit == "dense_coding":
        circ = dense_coding_circuit()
        inputs, keep = [k for _, k in _dense_initial()], [B, C]
    elif circuit == "teleportation":
        circ = teleportation_circuit()
        inputs = [
            qmath.tensor_product([k, ENV00]) for lam in _grid(cfg) for k in lambda_basis(lam, warn=False).kets
        ]
        keep = [TB, TC]
    else:
        raise ValueError(f"unknown circuit {circuit!r}")
    worst = 0.0
    for t in EARLY_TIMES:
        u = circ.propagator(circ.t0, t)
        rhos = [qmath.reduced_state(u @ k, keep) for k in inputs]
        worst = max(worst, max(qmath.max_norm(r - rhos[0]) for r in rhos))
    return worst


def retrocausality_report(cfg: Config | None = None) -> ScenarioReport:
    """Reduced state of (b, c) before it meets the sender's qubits is input independent."""
    report = ScenarioReport("retrocausality")
    for circuit in ("dense_coding", "teleportation"):
        report.check(f"retro.{circuit}.max_deviation", retrocausality_check(circuit, cfg))
    return report


def capacity_check(reports: Sequence[ScenarioReport] | None = None, cfg: Config | None = None) -> ScenarioReport:
    """Every MI table entry is bounded by log2 of its carrier dimension."""
    cfg = cfg or Config()
    if reports is None:
        reports = [build(name, cfg) for name in SCENARIOS if name not in ("capacity",)]
    report = ScenarioReport("capacity")
    excess, n, worst_entry = -math.inf, 0, None
    for r in reports:
        for e in r.table:
            n += 1
            gap = e.mi - math.log2(e.dim)
            if not gap <= excess:
                excess, worst_entry = gap, (r.scenario, e)
    report.sections["entries_checked"] = n
    if worst_entry is not None:
        report.sections["tightest"] = {"scenario": worst_entry[0], **worst_entry[1].to_dict()}
    report.check("capacity.max_excess", excess if n else 0.0)
    report.check("capacity.entries", n)
    return report


# --------------------------------------------------------------------------
# classical carriers


def classical_slips_report(cfg: Config | None = None) -> ScenarioReport:
    report = ScenarioReport("classical-slips")
    per_kind = {}
    for kind in classical.SLIP_KINDS:
        model = classical.build_slip_model(kind)
        n = len(model.slips)
        mis = {}
        for k in range(1, n + 1):
            for subset in combinations(range(n), k):
                names = tuple(model.slips[i] for i in subset)
                mis[names] = mutual_information(model.joint(subset))
        per_kind[kind] = {",".join(k): v for k, v in mis.items()}
        if kind == "single":
            report.check("classical.single.mi", mis[model.slips])
            continue
        report.check(f"classical.{kind}.mi_single", max(mis[(s,)] for s in model.slips))
        report.check(f"classical.{kind}.mi_all", mis[model.slips])
    report.check(
        "classical.charlie_four.mi_pairs",
        max(v for k, v in per_kind["charlie_four"].items() if k.count(",") == 1),
    )
    for pair in ("ab", "ac", "bc"):
        report.check(f"classical.three_slip.mi_{pair}", per_kind["three_slip"][f"{pair[0]},{pair[1]}"])
    report.sections["mutual_information"] = per_kind
    verdict = classical.shared_key_dependence()
    report.sections["dh"] = {"shared_key_sent_slip": verdict}
    report.check("classical.shared_key.dh_depends", verdict["depends"])
    report.check("classical.shared_key.dh_accessible", verdict["accessible"])
    return report


def spin8_report(cfg: Config | None = None) -> ScenarioReport:
    report = ScenarioReport("spin8")
    j = classical.spin8_joint()
    report.check("classical.spin8.mi", mutual_information(j))
    report.check("classical.spin8.h_config", entropy(j.p_n()))
    h_joint = entropy(j.pmf.ravel())
    report.check("classical.spin8.h_config_given_setting", h_joint - entropy(j.p_m()))
    report.check("classical.spin8.config_marginal_uniform", all(p == Fraction(1, 8) for p in j.p_n()))
    c = "+-+"
    p = {s: classical.conditional(j, s, c) for s in classical.SPIN_SETTINGS}
    report.check(
        "classical.spin8.discrimination",
        [float(p["x+"] / (p["x+"] + p["x-"])), float(p["x+"] / (p["x+"] + p["z+"]))],
    )
    report.sections["conditional_given_+-+"] = {s: float(v) for s, v in p.items()}
    return report


# --------------------------------------------------------------------------
# causal descriptors


def dh_dense_coding_report(cfg: Config | None = None) -> ScenarioReport:
    """Heisenberg dependence versus accessibility for the message in dense coding."""
    cfg = cfg or Config()
    report = ScenarioReport("dh-dense-coding")
    circuit = theta_dense_coding_circuit()
    theta0 = {"theta_a": 0.0, "theta_abar": 0.0}
    samples = [{"theta_a": x, "theta_abar": y} for x, y in product((0.0, math.pi), repeat=2)]
    rows = {}
    for q, t in ((C, "t2"), (B, "t3"), (B, "t5"), (B, "t6"), (C, "t8")):
        dep = [dh.parameter_dependence(circuit, q, t, theta0, p) for p in ("theta_a", "theta_abar")]
        acc = dh.accessibility_test(circuit, q, t, samples)
        rows[f"{circuit.qubit_names[q]}@{t}"] = {
            "depends": any(d.depends for d in dep),
            "magnitude": max(d.magnitude for d in dep),
            "accessible": acc.accessible,
            "spread": acc.spread,
        }
    report.sections["dh"] = rows

    phase = phase_dense_coding_circuit()
    phase_samples = [{"theta": x} for x in (0.0, 1.0, math.pi)]
    report.sections["dh_controlled_phase"] = {
        f"b@{t}": {
            "depends": dh.parameter_dependence(phase, B, t, {"theta": math.pi}).depends,
            "accessible": dh.accessibility_test(phase, B, t, phase_samples).accessible,
        }
        for t in ("t4", "t5", "t6")
    }
    for t in ("t5", "t6"):
        report.check(f"dh.b_{t}_depends", rows[f"b@{t}"]["depends"])
        report.check(f"dh.b_{t}_accessible", rows[f"b@{t}"]["accessible"])
    report.check("dh.c_t2_depends", rows["c@t2"]["depends"])
    report.check("dh.b_t3_depends", rows["b@t3"]["depends"])
    report.check("dh.c_t8_accessible", rows["c@t8"]["accessible"])

    # frameworks: b's reduced state is the same for every message, so no
    # decomposition on b alone can separate them
    dense = dense_coding_circuit()
    present = False
    for t in ("t5", "t6"):
        psis = [dense.evolve(k, t) for _, k in _dense_initial()]
        for i, j in combinations(range(4), 2):
            present |= statistical_verdict([psis[i], psis[j]], [B], tol=cfg.eps_support)
    report.sections["frameworks"] = {"message_in_b_alone": present}
    report.check("dh.frameworks_b_present", present)

    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(100):
        circ, params = dh.random_circuit(rng, int(rng.integers(1, 4)), int(rng.integers(1, 6)))
        for alpha in range(circ.n_qubits):
            for j in "xyz":
                for t in circ.times:
                    s = dh.expectation_schrodinger(circ, alpha, j, t, params)
                    h = dh.expectation_heisenberg(circ, alpha, j, t, params)
                    worst = max(worst, abs(s - h))
    report.check("dh.heisenberg_schrodinger_deviation", worst)
    return report


# --------------------------------------------------------------------------
# structural versus statistical presence


def oracle_report(cfg: Config | None = None, n_samples: int = 240) -> ScenarioReport:
    """Compare the support-orthogonality test with the statistical verdict on sampled cases.

    Samples are (circuit, input qubit, time, lambda, subset) tuples over the
    dense coding and teleportation circuits.
    """
    cfg = cfg or Config()
    rng = np.random.default_rng(cfg.seed)
    grid = _grid(cfg)
    setups = [
        (teleportation_circuit(), TA, ENV00),
        (dense_coding_circuit(), A, qmath.basis_ket("000")),
        (dense_coding_circuit(), ABAR, qmath.basis_ket("000")),
    ]
    disagreements, recovered, located_count = [], True, 0
    for k in range(n_samples):
        circuit, q_in, env = setups[int(rng.integers(len(setups)))]
        t = circuit.times[int(rng.integers(len(circuit.times)))]
        lam = grid[int(rng.integers(len(grid)))]
        subsets = [s for r in range(1, circuit.n_qubits + 1) for s in combinations(range(circuit.n_qubits), r)]
        subset = subsets[int(rng.integers(len(subsets)))]
        psis = channel_states(circuit, lambda_basis(lam, warn=False), q_in, env, t)
        loc = locate_in_states(psis, subset, cfg.eps_support)
        stat = statistical_verdict(psis, subset, tol=cfg.eps_support)
        if loc.located:
            located_count += 1
            recovered &= recovery_residual(loc.decomposition, psis) <= 1e-9
            recovered &= statistical_verdict(psis, subset, loc.decomposition, cfg.eps_support)
        if loc.located != stat:
            disagreements.append({"circuit": circuit.name, "time": t, "lambda": complex(lam), "subset": list(subset)})
    report = ScenarioReport("oracle-equivalence")
    report.sections["samples"] = {"total": n_samples, "located": located_count, "disagreements": disagreements}
    report.check("oracle.samples", n_samples)
    report.check("oracle.disagreements", len(disagreements))
    report.check("oracle.located_recovery", bool(recovered))
    return report


# --------------------------------------------------------------------------
# registry of named scenarios

SCENARIOS = {
    "dense-coding-f1": lambda cfg: dense_coding_report("f1", cfg),
    "dense-coding-f2": lambda cfg: dense_coding_report("f2", cfg),
    "dense-coding-f3": lambda cfg: dense_coding_report("f3", cfg),
    "teleportation-unitary": lambda cfg: teleportation_report("unitary", cfg),
    "teleportation-computational": lambda cfg: teleportation_report("computational", cfg),
    "teleportation-sx": lambda cfg: teleportation_report("sx", cfg),
    "teleportation-contextual": lambda cfg: teleportation_report("contextual", cfg),
    "classical-slips": classical_slips_report,
    "spin8": spin8_report,
    "retrocausality": retrocausality_report,
    "dh-dense-coding": dh_dense_coding_report,
    "oracle-equivalence": oracle_report,
    "capacity": lambda cfg: capacity_check(None, cfg),
}


def build(name: str, cfg: Config | None = None) -> ScenarioReport:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)} or 'all'")
    return SCENARIOS[name](cfg or Config())


def build_all(cfg: Config | None = None) -> list:
    """Every scenario once, ordered by name; the capacity check reuses the other reports."""
    cfg = cfg or Config()
    reports = [build(name, cfg) for name in SCENARIOS if name != "capacity"]
    reports.append(capacity_check(reports, cfg))
    return sorted(reports, key=lambda r: r.scenario)


def unchecked_claims(reports: Sequence[ScenarioReport], registry: ClaimRegistry | None = None) -> list:
    """Registry claims that no report evaluated."""
    registry = registry or load_registry()
    seen = {c.claim_id for r in reports for c in r.checks}
    return sorted(set(registry.claims) - seen)
