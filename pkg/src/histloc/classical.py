"""Classical carriers: colored slips of paper and the eight-state spin model.

All probabilities are exact ``Fraction`` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .infoloc import JointDistribution

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)

SLIP_KINDS = ("single", "pair_correlation", "shared_key", "charlie_four", "three_slip")

_FLIP = {"R": "G", "G": "R"}


@dataclass(frozen=True)
class SlipModel:
    """Joint pmf over the message M and the colors of the slips in transit.

    ``pmf`` maps ``(m, colors)`` to a probability, where ``colors`` has one
    entry per name in ``slips``.
    """

    kind: str
    slips: tuple
    pmf: Mapping

    def joint(self, slips: Sequence[int] | None = None) -> JointDistribution:
        """Joint distribution of M and the colors of the selected slips (all by default)."""
        idx = tuple(range(len(self.slips))) if slips is None else tuple(slips)
        table: dict = {}
        for (m, colors), p in self.pmf.items():
            key = (m, tuple(colors[i] for i in idx))
            table[key] = table.get(key, Fraction(0)) + p
        return JointDistribution.from_table(table, m_order=(0, 1))

    @classmethod
    def from_table(cls, kind: str, slips: Sequence[str], table: Mapping) -> "SlipModel":
        table = {(m, tuple(c)): Fraction(p) for (m, c), p in table.items()}
        if sum(table.values()) != 1 or any(p < 0 for p in table.values()):
            raise ValueError("slip table is not a probability distribution")
        if any(len(c) != len(slips) for _, c in table):
            raise ValueError("one color per slip required")
        return cls(kind, tuple(slips), table)


def build_slip_model(kind: str) -> SlipModel:
    """The worked slip encodings of a one-bit message M (uniform prior).

    single           -- R for 0, G for 1 on one slip.
    pair_correlation -- RR/GG for 0, RG/GR for 1, each at random.
    shared_key       -- a shared RR/GG key; the sender mails her slip for 0, the opposite color for 1.
    charlie_four     -- as shared_key, but the key is any of RR, RG, GR, GG and a third
                        slip (Y same, B opposite) reports whether the key colors agree.
    three_slip       -- RRR/GGG for 0, RGG/GRR for 1.
    """
    table: dict = {}

    def add(m, colors, p):
        key = (m, tuple(colors))
        table[key] = table.get(key, Fraction(0)) + p

    if kind == "single":
        add(0, "R", HALF)
        add(1, "G", HALF)
        names = ("slip",)
    elif kind == "pair_correlation":
        for m in (0, 1):
            for first in "RG":
                second = first if m == 0 else _FLIP[first]
                add(m, first + second, HALF * HALF)
        names = ("envelope1", "envelope2")
    elif kind == "shared_key":
        for m, key in product((0, 1), "RG"):
            sent = key if m == 0 else _FLIP[key]
            add(m, (sent, key), HALF * HALF)
        names = ("sent", "bob")
    elif kind == "charlie_four":
        for m, (alice, bob) in product((0, 1), product("RG", repeat=2)):
            sent = alice if m == 0 else _FLIP[alice]
            note = "Y" if alice == bob else "B"
            add(m, (sent, bob, note), HALF * QUARTER)
        names = ("sent", "bob", "charlie")
    elif kind == "three_slip":
        for m, first in product((0, 1), "RG"):
            rest = first if m == 0 else _FLIP[first]
            add(m, first + rest + rest, HALF * HALF)
        names = ("a", "b", "c")
    else:
        raise ValueError(f"unknown slip model {kind!r}; choose from {SLIP_KINDS}")
    return SlipModel(kind, names, table)


def shared_key_dependence() -> dict:
    """Causal versus statistical view of the mailed slip in the shared-key encoding.

    The mailed slip is a function of (key, M).  It *depends* on M when some
    key value gives different slips for M = 0 and 1; it is *accessible* when
    its own distribution differs between M = 0 and 1.
    """
    def sent(key, m):
        return key if m == 0 else _FLIP[key]

    depends = any(sent(k, 0) != sent(k, 1) for k in "RG")
    dists = [sorted(sent(k, m) for k in "RG") for m in (0, 1)]
    return {"depends": depends, "accessible": dists[0] != dists[1]}


SPIN_SETTINGS = ("x+", "x-", "y+", "y-", "z+", "z-")
SPIN_CONFIGS = tuple("".join(c) for c in product("+-", repeat=3))


def spin8_joint() -> JointDistribution:
    """Six equiprobable polarizer settings against the eight (Sx, Sy, Sz) sign configurations.

    A setting fixes its own component and randomises the other two.
    """
    axis = {"x": 0, "y": 1, "z": 2}
    table = {}
    for s in SPIN_SETTINGS:
        for c in SPIN_CONFIGS:
            agrees = c[axis[s[0]]] == s[1]
            table[(s, c)] = Fraction(1, 6) * QUARTER if agrees else Fraction(0)
    return JointDistribution.from_table(table, m_order=SPIN_SETTINGS, n_order=SPIN_CONFIGS)


def conditional(j: JointDistribution, m, n) -> Fraction:
    """Pr(M = m | N = n)."""
    b = j.n_labels.index(n)
    col = j.pmf[:, b]
    return col[j.m_labels.index(m)] / sum(col, Fraction(0))
