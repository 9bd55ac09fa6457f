from fractions import Fraction
from itertools import combinations

import pytest

from histloc.classical import (
    SLIP_KINDS,
    SPIN_CONFIGS,
    SlipModel,
    build_slip_model,
    conditional,
    shared_key_dependence,
    spin8_joint,
)
from histloc.infoloc import contains_information, mutual_information


@pytest.mark.parametrize("kind", SLIP_KINDS)
def test_slip_models_are_normalised(kind):
    model = build_slip_model(kind)
    assert sum(model.pmf.values()) == 1
    marg = {m: sum(p for (mm, _), p in model.pmf.items() if mm == m) for m in (0, 1)}
    assert marg == {0: Fraction(1, 2), 1: Fraction(1, 2)}


def test_single_slip_carries_one_bit():
    j = build_slip_model("single").joint()
    assert mutual_information(j) == 1.0
    assert contains_information(j)


@pytest.mark.parametrize("kind", ["pair_correlation", "shared_key", "charlie_four", "three_slip"])
def test_no_single_slip_but_all_slips(kind):
    model = build_slip_model(kind)
    for i in range(len(model.slips)):
        assert mutual_information(model.joint([i])) == 0.0
    assert mutual_information(model.joint()) == 1.0


def test_charlie_pairs_carry_nothing():
    model = build_slip_model("charlie_four")
    for pair in combinations(range(3), 2):
        assert mutual_information(model.joint(pair)) == 0.0


def test_three_slip_pairs():
    model = build_slip_model("three_slip")
    assert mutual_information(model.joint([0, 1])) == 1.0
    assert mutual_information(model.joint([0, 2])) == 1.0
    assert mutual_information(model.joint([1, 2])) == 0.0


def test_shared_key_dependence_vs_accessibility():
    assert shared_key_dependence() == {"depends": True, "accessible": False}


def test_from_table_validation():
    with pytest.raises(ValueError):
        SlipModel.from_table("bad", ("s",), {(0, "R"): Fraction(1, 3)})
    with pytest.raises(ValueError):
        SlipModel.from_table("bad", ("s", "t"), {(0, "R"): Fraction(1)})
    ok = SlipModel.from_table("mine", ("s",), {(0, "R"): "1/2", (1, "G"): "1/2"})
    assert mutual_information(ok.joint()) == 1.0
    with pytest.raises(ValueError):
        build_slip_model("four_slip")


def test_spin8_exact():
    j = spin8_joint()
    assert j.exact
    assert mutual_information(j) == 1.0
    assert all(p == Fraction(1, 8) for p in j.p_n())
    assert all(p == Fraction(1, 6) for p in j.p_m())
    assert len(SPIN_CONFIGS) == 8


def test_spin8_conditionals():
    j = spin8_joint()
    assert conditional(j, "x+", "+-+") == Fraction(1, 3)
    assert conditional(j, "x-", "+-+") == 0
    assert conditional(j, "z+", "+-+") == Fraction(1, 3)
