import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from histloc import qmath
from histloc.circuit import dense_coding_circuit, teleportation_circuit
from histloc.histories import (
    HistoryFamily,
    IncompatibleFrameworksError,
    InconsistentFamilyError,
    branch_probabilities,
    chain_ket,
    combine,
    consistency_check,
    frameworks_compatible,
)
from histloc.scenarios import dense_f2_family, dense_f3_family

from conftest import random_unitary

Z4 = qmath.product_decomposition([qmath.Z_BASIS[0]] * 4, [qmath.Z_BASIS[1]] * 4)
INPUTS = tuple((0.25, qmath.basis_ket(m + "00")) for m in ("00", "01", "10", "11"))


def three_event_family():
    return HistoryFamily(dense_coding_circuit(), INPUTS, (("t2", Z4), ("t4", Z4), ("t7", Z4)), "z3")


def test_chain_ket_by_hand():
    f = three_event_family()
    zero = Z4.labels.index(("0", "0", "0", "0"))
    # input 0000: (|00>+|11>)/sqrt2 on (b, c) at t2; the all-zero branch keeps amplitude 1/sqrt2
    assert_allclose(chain_ket(f, 0, [zero] * 3), qmath.basis_ket("0000") / np.sqrt(2), atol=1e-12)
    # input 0100 (abar = 1), branch b=c=0 at t2, then b flipped by abar at t4
    b_flip = Z4.labels.index(("0", "1", "1", "0"))
    at_t2 = Z4.labels.index(("0", "1", "0", "0"))
    at_t7 = Z4.labels.index(("0", "1", "1", "1"))
    assert_allclose(chain_ket(f, 1, [at_t2, b_flip, at_t7]), qmath.basis_ket("0111") / np.sqrt(2), atol=1e-12)
    assert np.linalg.norm(chain_ket(f, 1, [at_t2, zero, zero])) < 1e-12


def test_chain_ket_index_errors():
    f = three_event_family()
    with pytest.raises(IndexError):
        chain_ket(f, 4, [0, 0, 0])
    with pytest.raises(IndexError):
        chain_ket(f, 0, [0, 0])
    with pytest.raises(IndexError):
        chain_ket(f, 0, [0, 0, 99])


def test_three_event_family_probabilities():
    table = branch_probabilities(three_event_family())
    assert len(table) == 8
    assert table.total == pytest.approx(1.0)
    assert_allclose([b.probability for b in table], 0.125, atol=1e-12)
    keys = [(b.initial, b.indices) for b in table]
    assert keys == sorted(keys)


def test_dense_families_consistent_and_refinements_not():
    assert consistency_check(dense_f2_family()).consistent
    assert consistency_check(dense_f3_family()).consistent
    bad = consistency_check(dense_f2_family(b_at_t8=True))
    assert not bad.consistent and bad.worst_overlap > 0.1
    assert bad.offending is not None and bad.offending[0].initial == bad.offending[1].initial
    with pytest.raises(InconsistentFamilyError) as info:
        branch_probabilities(dense_f3_family(c_z_at_t7=True))
    assert info.value.report.worst_overlap > 0.1


def test_incompatible_frameworks_at_one_time():
    x4 = qmath.product_decomposition([qmath.X_BASIS[0]] * 4, [qmath.X_BASIS[1]] * 4)
    with pytest.raises(IncompatibleFrameworksError):
        HistoryFamily(dense_coding_circuit(), INPUTS, (("t2", Z4), ("t2", x4)))
    assert not frameworks_compatible(Z4, x4)
    with pytest.raises(IncompatibleFrameworksError):
        combine(Z4, x4)


def test_compatible_events_at_one_time_and_combine():
    za = qmath.product_decomposition([qmath.Z_BASIS[0], None, None, None], [qmath.Z_BASIS[1], (), (), ()])
    xb = qmath.product_decomposition([None, None, qmath.X_BASIS[0], None], [(), (), qmath.X_BASIS[1], ()])
    f = HistoryFamily(dense_coding_circuit(), INPUTS, (("t3", za), ("t3", xb)))
    assert len(f.events) == 2
    both = combine(za, xb)
    assert len(both.projectors) == 4
    assert qmath.verify_decomposition(both)


def test_family_validation():
    c = dense_coding_circuit()
    with pytest.raises(ValueError):
        HistoryFamily(c, ((0.5, qmath.basis_ket("0000")),), ())
    with pytest.raises(ValueError):
        HistoryFamily(c, ((0.5, qmath.basis_ket("0000")), (0.5, qmath.basis_ket("0000"))), ())
    with pytest.raises(ValueError):
        HistoryFamily(c, INPUTS, (("t4", Z4), ("t2", Z4)))
    with pytest.raises(ValueError):
        HistoryFamily(c, INPUTS, (("t2", qmath.IdentityDecomposition((Z4.projectors[0],))),))
    with pytest.raises(KeyError):
        three_event_family().event_index("t5")


def test_json_round_trip():
    f = dense_f3_family()
    back = HistoryFamily.from_json(json.dumps(f.to_dict()))
    assert back.event_times == f.event_times
    assert back.name == f.name
    assert back.events[0][1].labels == f.events[0][1].labels
    p1 = [b.probability for b in branch_probabilities(f)]
    p2 = [b.probability for b in branch_probabilities(back)]
    assert_allclose(p1, p2)


def test_add_and_replace_event():
    f = three_event_family()
    g = f.add_event("t5", Z4)
    assert g.event_times == ("t2", "t4", "t5", "t7")
    h = g.replace_event("t5", qmath.IdentityDecomposition.trivial(16))
    assert len(h.events[2][1].projectors) == 1


@given(st.integers(0, 2**32 - 1))
def test_single_time_families_are_consistent(seed):
    """With one event time, distinct branches are separated by orthogonal projectors."""
    rng = np.random.default_rng(seed)
    u = random_unitary(rng, 8)
    d = qmath.product_decomposition([qmath.Z_BASIS[0]] * 3, [qmath.Z_BASIS[1]] * 3).conjugate(u)
    ket = qmath.basis_ket("000")
    f = HistoryFamily(teleportation_circuit(), ((1.0, ket),), (("t5", d),))
    assert consistency_check(f).consistent
    assert branch_probabilities(f).total == pytest.approx(1.0)


@given(st.integers(0, 2**32 - 1))
def test_probabilities_sum_to_one_for_consistent_families(seed):
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(0, np.pi)
    k0 = np.cos(alpha) * qmath.KET0 + np.sin(alpha) * qmath.KET1
    k1 = -np.sin(alpha) * qmath.KET0 + np.cos(alpha) * qmath.KET1
    init = tuple((0.5, np.kron(k, qmath.basis_ket("00"))) for k in (k0, k1))
    z3 = qmath.product_decomposition([qmath.Z_BASIS[0]] * 3, [qmath.Z_BASIS[1]] * 3)
    f = HistoryFamily(teleportation_circuit(), init, tuple((t, z3) for t in ("t2", "t4", "t6", "t8")))
    report = consistency_check(f)
    if report.consistent:
        assert branch_probabilities(f).total == pytest.approx(1.0)
    else:
        with pytest.raises(InconsistentFamilyError):
            branch_probabilities(f)
