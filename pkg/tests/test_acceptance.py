"""The ten acceptance criteria, each at its stated tolerance and runtime budget.

Every test prints one PASS/FAIL line.  Run directly for just those lines:

    python tests/test_acceptance.py
"""

import math
import sys
import time
from itertools import combinations

import numpy as np
import pytest

from histloc import classical, qmath, scenarios
from histloc.circuit import dense_coding_circuit, teleportation_circuit
from histloc.config import Config
from histloc.histories import branch_probabilities, consistency_check
from histloc.infoloc import (
    channel_states,
    default_lambda_grid,
    ab_channel_projectors,
    framework_joint,
    lambda_basis,
    locate_channel,
    locate_in_states,
    mutual_information,
    recovery_residual,
    statistical_verdict,
)

CFG = Config()
GRID = default_lambda_grid(64, 42)
ENV00 = qmath.basis_ket("00")


@pytest.fixture
def say(capsys):
    def emit(n, ok, elapsed, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail} ({elapsed:.2f} s)")

    return emit


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_01_classical_anchors(say):
    with Timer() as t:
        spin = mutual_information(classical.spin8_joint())
        slips = {}
        for kind in ("pair_correlation", "shared_key", "charlie_four"):
            m = classical.build_slip_model(kind)
            singles = [mutual_information(m.joint([i])) for i in range(len(m.slips))]
            slips[kind] = (max(singles), mutual_information(m.joint()))
        charlie = classical.build_slip_model("charlie_four")
        pairs = [mutual_information(charlie.joint(p)) for p in combinations(range(3), 2)]
    ok = (
        spin == 1.0
        and all(s == 0.0 and a == 1.0 for s, a in slips.values())
        and pairs == [0.0, 0.0, 0.0]
        and t.elapsed < 1.0
    )
    say(1, ok, t.elapsed, f"spin8 MI={spin}, slips (single, all)={slips}, charlie pairs={pairs}")
    assert ok


def test_criterion_02_dense_coding_f1(say):
    with Timer() as t:
        fam = scenarios.dense_f1_family()
        k = fam.event_index("t5")
        mi = mutual_information(framework_joint(fam, lambda i: i, lambda b: b.labels[k]))
        circuit = dense_coding_circuit()
        dev = max(
            qmath.max_norm(qmath.reduced_state(circuit.evolve(ket, "t5"), [2]) - np.eye(2) / 2)
            for _, ket in fam.initial
        )
    ok = abs(mi - 2.0) <= 1e-9 and dev <= 1e-10 and t.elapsed < 1.0
    say(2, ok, t.elapsed, f"MI(Bell index)={mi:.12f}, max |rho_b - I/2|={dev:.2e}")
    assert ok


def test_criterion_03_dense_coding_f2(say):
    with Timer() as t:
        fam = scenarios.dense_f2_family()
        consistent = consistency_check(fam).consistent
        table = branch_probabilities(fam)
        cond_dev = max(abs(b.probability / 0.25 - 0.5) for b in table)
        k4, k7 = fam.event_index("t4"), fam.event_index("t7")
        abar = lambda i: scenarios.DENSE_INPUTS[i][1]  # noqa: E731
        parity = mutual_information(framework_joint(fam, abar, lambda b: b.labels[k4][2] == b.labels[k4][3]))
        on_b = mutual_information(framework_joint(fam, abar, lambda b: b.labels[k4][2]))
        on_c = mutual_information(framework_joint(fam, abar, lambda b: b.labels[k4][3]))
        p_c = sum(b.probability for b in table if b.labels[k7][3] == abar(b.initial))
        overlap = consistency_check(scenarios.dense_f2_family(b_at_t8=True)).worst_overlap
    ok = (
        consistent
        and cond_dev <= 1e-9
        and abs(parity - 1) <= 1e-9
        and on_b <= 1e-9
        and on_c <= 1e-9
        and abs(p_c - 1) <= 1e-9
        and overlap > 0.1
        and t.elapsed < 1.0
    )
    say(3, ok, t.elapsed, f"MI(abar; b xor c)={parity:.12f}, MI(abar; b)={on_b:.1e}, MI(abar; c)={on_c:.1e}, Pr(c=abar)={p_c}, b@t8 overlap={overlap:.3f}")
    assert ok


def test_criterion_04_dense_coding_f3(say):
    with Timer() as t:
        fam = scenarios.dense_f3_family()
        a = lambda i: scenarios.DENSE_INPUTS[i][0]  # noqa: E731
        corr = [
            mutual_information(framework_joint(fam, a, lambda b, k=fam.event_index(s): b.labels[k][2] == b.labels[k][3]))
            for s in ("t5", "t6")
        ]
        k8 = fam.event_index("t8")
        p_b = sum(b.probability for b in branch_probabilities(fam) if b.labels[k8][2] == a(b.initial))
        refinement = consistency_check(scenarios.dense_f3_family(c_z_at_t7=True))
    ok = all(abs(c - 1) <= 1e-9 for c in corr) and abs(p_b - 1) <= 1e-9 and not refinement.consistent and t.elapsed < 1.0
    say(4, ok, t.elapsed, f"MI(a; b=c in +/-) at t5, t6 = {corr}, Pr(b=a)={p_b}, c@t7 inconsistent={not refinement.consistent}")
    assert ok


def test_criterion_05_teleportation_channel_location(say):
    expected = {
        "t1": [("a",)],
        "t2": [("a",)],
        "t3": [("a",)],
        "t4": [("a", "b"), ("a", "c")],
        "t5": [("a", "b"), ("a", "c")],
        "t8": [("c",)],
    }
    circuit = teleportation_circuit()
    with Timer() as t:
        found = {s: locate_channel(circuit, 0, ENV00, s, GRID).minimal_names() for s in expected}
        agree, residual = 0.0, 0.0
        for lam in GRID:
            psis = channel_states(circuit, lambda_basis(lam, warn=False), 0, ENV00, "t5")
            closed = ab_channel_projectors(lam)
            support = locate_in_states(psis, (0, 1)).decomposition
            agree = max(agree, max(qmath.max_norm(p - q) for p, q in zip(closed.projectors, support.projectors)))
            residual = max(residual, recovery_residual(closed, psis))
    ok = found == expected and agree <= 1e-10 and residual < 1e-10 and t.elapsed < 10.0
    say(5, ok, t.elapsed, f"{len(GRID)} grid bases, minimal={found}, closed-form agreement={agree:.1e}, residual={residual:.1e}")
    assert ok


def test_criterion_06_teleportation_frameworks(say):
    with Timer() as t:
        fam = scenarios.tele_computational_family()
        k5 = fam.event_index("t5")
        mi = {
            pair: mutual_information(framework_joint(fam, lambda i: i, lambda b, q=q: tuple(b.labels[k5][j] for j in q)))
            for pair, q in (("bc", (1, 2)), ("ab", (0, 1)), ("ac", (0, 2)))
        }
        ab_max, c_min = 0.0, math.inf
        for lam in GRID:
            ctx = scenarios.tele_contextual_family(lam)
            c5, c8 = ctx.event_index("t5"), ctx.event_index("t8")
            ab_max = max(ab_max, mutual_information(framework_joint(ctx, lambda i: i, lambda b: b.labels[c5][:2])))
            c_min = min(c_min, mutual_information(framework_joint(ctx, lambda i: i, lambda b: b.labels[c8][2])))
    ok = (
        abs(mi["bc"] - 1) <= 1e-9
        and mi["ab"] < 1e-9
        and mi["ac"] < 1e-9
        and ab_max < 1e-9
        and abs(c_min - 1) <= 1e-9
        and t.elapsed < 5.0
    )
    say(6, ok, t.elapsed, f"computational t5 MI={mi}, contextual: max MI(a,b @ t5)={ab_max:.1e}, min MI(c @ t8)={c_min:.12f}")
    assert ok


def test_criterion_07_no_retrocausality(say):
    with Timer() as t:
        dense = scenarios.retrocausality_check("dense_coding", CFG)
        tele = scenarios.retrocausality_check("teleportation", CFG)
    ok = dense <= 1e-10 and tele <= 1e-10 and t.elapsed < 1.0
    say(7, ok, t.elapsed, f"max (b,c) reduced-state spread for t <= t3: dense {dense:.1e}, teleportation {tele:.1e}")
    assert ok


def test_criterion_08_capacity_bound(say):
    with Timer() as t:
        reports = [scenarios.build(name, CFG) for name in scenarios.SCENARIOS if name != "capacity"]
        entries = [(r.scenario, e) for r in reports for e in r.table]
        worst = max(e.mi - math.log2(e.dim) for _, e in entries)
    ok = len(entries) > 0 and worst <= 1e-9
    say(8, ok, t.elapsed, f"{len(entries)} MI entries, max(MI - log2 dim)={worst:.1e}")
    assert ok


def test_criterion_09_oracle_equivalence(say):
    with Timer() as t:
        rng = np.random.default_rng(9)
        setups = [
            (teleportation_circuit(), 0, ENV00),
            (dense_coding_circuit(), 0, qmath.basis_ket("000")),
            (dense_coding_circuit(), 1, qmath.basis_ket("000")),
        ]
        n, disagreements, located = 0, 0, 0
        while n < 240:
            circuit, q_in, env = setups[int(rng.integers(3))]
            time_label = circuit.times[int(rng.integers(len(circuit.times)))]
            lam = GRID[int(rng.integers(len(GRID)))]
            subsets = [s for k in range(1, circuit.n_qubits + 1) for s in combinations(range(circuit.n_qubits), k)]
            subset = subsets[int(rng.integers(len(subsets)))]
            psis = channel_states(circuit, lambda_basis(lam, warn=False), q_in, env, time_label)
            structural = locate_in_states(psis, subset).located
            located += structural
            disagreements += structural != statistical_verdict(psis, subset)
            n += 1
    ok = n >= 200 and disagreements == 0 and 0 < located < n
    say(9, ok, t.elapsed, f"{n} tuples ({located} located), {disagreements} disagreements")
    assert ok


def test_criterion_10_causal_vs_statistical(say):
    with Timer() as t:
        report = scenarios.dh_dense_coding_report(CFG)
        rows = report.sections["dh"]
        frameworks = report.sections["frameworks"]["message_in_b_alone"]
        hs = next(c.observed for c in report.checks if c.claim_id == "dh.heisenberg_schrodinger_deviation")
    transit = [rows[f"b@{s}"] for s in ("t5", "t6")]
    ok = all(r["depends"] and not r["accessible"] for r in transit) and frameworks is False and hs <= 1e-9
    say(10, ok, t.elapsed, f"b@t5,t6 depends={[r['depends'] for r in transit]} accessible={[r['accessible'] for r in transit]}; frameworks present in b={frameworks}; Heisenberg/Schrodinger max dev={hs:.1e}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
