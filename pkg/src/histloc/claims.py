"""The versioned table of expected scenario outcomes, and how observations are judged."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from numbers import Real
from typing import Any

OPS = ("eq", "le", "ge", "gt", "lt")


@dataclass(frozen=True)
class Claim:
    id: str
    op: str
    expected: Any
    tolerance: float
    anchor: str
    description: str

    def evaluate(self, observed) -> bool:
        exp, obs = _normalise(self.expected), _normalise(observed)
        if self.op == "eq":
            if _is_number(exp) and _is_number(obs):
                return abs(obs - exp) <= self.tolerance
            return obs == exp
        if not (_is_number(exp) and _is_number(obs)):
            raise TypeError(f"claim {self.id}: {self.op} needs numbers")
        if self.op == "le":
            return obs <= exp + self.tolerance
        if self.op == "ge":
            return obs >= exp - self.tolerance
        if self.op == "gt":
            return obs > exp
        return obs < exp


def _is_number(x) -> bool:
    return isinstance(x, Real) and not isinstance(x, bool)


def _normalise(x):
    if isinstance(x, (list, tuple)):
        return [_normalise(v) for v in x]
    return x


class ClaimRegistry:
    def __init__(self, version: int, claims: dict):
        self.version = version
        self.claims = claims

    def __getitem__(self, claim_id: str) -> Claim:
        try:
            return self.claims[claim_id]
        except KeyError:
            raise KeyError(f"no claim registered under {claim_id!r}") from None

    def __contains__(self, claim_id: str) -> bool:
        return claim_id in self.claims

    def __len__(self) -> int:
        return len(self.claims)

    @classmethod
    def from_dict(cls, d: dict) -> "ClaimRegistry":
        claims = {}
        for entry in d["claims"]:
            claim = Claim(
                entry["id"],
                entry["op"],
                entry["expected"],
                float(entry.get("tolerance", 0.0)),
                entry.get("anchor", ""),
                entry.get("description", ""),
            )
            if claim.op not in OPS:
                raise ValueError(f"claim {claim.id}: unknown op {claim.op!r}")
            if claim.id in claims:
                raise ValueError(f"duplicate claim id {claim.id!r}")
            claims[claim.id] = claim
        return cls(int(d["version"]), claims)


_DEFAULT: ClaimRegistry | None = None


def load_registry() -> ClaimRegistry:
    """The registry shipped with the package (cached)."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("histloc").joinpath("claims.json").read_text()
        _DEFAULT = ClaimRegistry.from_dict(json.loads(text))
    return _DEFAULT
