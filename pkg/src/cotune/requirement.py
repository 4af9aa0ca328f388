"""Quantified performance requirements as piecewise fuzzy satisfaction functions.

A requirement over a (minimized) performance metric is expressed as a
*proposition*: an ordered sequence of fragments tiling ``[v_min, v_max]``.
Each fragment maps metric values to a satisfaction score in ``[0, 1]`` via a
linear (kind ``G`` or ``S``) or constant (kind ``E``) membership function.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass

KINDS = ("G", "S", "E")

# Slack for float comparisons in validation; boundary moves and score
# rederivations otherwise trip spurious monotonicity violations.
_EPS = 1e-9


class PropositionError(ValueError):
    """Raised when constructing or decoding an ill-formed proposition."""


@dataclass(frozen=True)
class Fragment:
    """One piece of a requirement over the metric interval [v_lo, v_hi].

    kind "G": a greater value is preferred, score runs linearly s_lo -> s_hi.
    kind "S": a smaller value is preferred, same linear form.
    kind "E": every value in the interval is equally preferred at s_lo.
    """

    kind: str
    v_lo: float
    v_hi: float
    s_lo: float
    s_hi: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PropositionError(f"unknown fragment kind {self.kind!r}")

    def score(self, v: float) -> float:
        """Membership value at v; v is assumed inside [v_lo, v_hi]."""
        if self.kind == "E":
            return self.s_lo
        slope = (self.s_lo - self.s_hi) / (self.v_lo - self.v_hi)
        intercept = (self.s_hi * self.v_lo - self.s_lo * self.v_hi) / (
            self.v_lo - self.v_hi
        )
        return slope * v + intercept

    def area(self) -> float:
        """Exact area under the membership function over [v_lo, v_hi]."""
        width = self.v_hi - self.v_lo
        if self.kind == "E":
            return self.s_lo * width
        return 0.5 * (self.s_lo + self.s_hi) * width


@dataclass(frozen=True)
class Proposition:
    """A piecewise satisfaction function p(v) over [v_min, v_max].

    Fragments must tile the metric range exactly: the first fragment starts
    at v_min, the last ends at v_max and adjacent fragments share a boundary
    point. Instances are immutable; every transformation returns a new value.
    """

    fragments: tuple[Fragment, ...]

    def __post_init__(self):
        if not self.fragments:
            raise PropositionError("proposition needs at least one fragment")
        object.__setattr__(self, "fragments", tuple(self.fragments))

    @property
    def v_min(self) -> float:
        return self.fragments[0].v_lo

    @property
    def v_max(self) -> float:
        return self.fragments[-1].v_hi

    def evaluate(self, v: float) -> float:
        """Satisfaction score of a performance value.

        Values outside [v_min, v_max] are clamped to the nearest bound. At a
        boundary point shared by two fragments the left fragment's value
        applies.
        """
        if v <= self.v_min:
            return self.fragments[0].score(self.fragments[0].v_lo)
        if v >= self.v_max:
            return self.fragments[-1].score(self.v_max)
        # first fragment whose right edge reaches v: v in (v_lo, v_hi]
        idx = bisect_left([f.v_hi for f in self.fragments], v)
        return self.fragments[idx].score(v)

    def integral(self) -> float:
        """Closed-form area under p(v) over [v_min, v_max]."""
        return sum(f.area() for f in self.fragments)

    def encode(self) -> list:
        """Token sequence kind, boundary, kind, ... excluding v_min/v_max."""
        tokens: list = []
        for frag in self.fragments[:-1]:
            tokens.extend((frag.kind, frag.v_hi))
        tokens.append(self.fragments[-1].kind)
        return tokens

    def scores(self) -> list[tuple[float, float]]:
        """Endpoint score pairs, one per fragment (decode companion)."""
        return [(f.s_lo, f.s_hi) for f in self.fragments]

    def to_json(self) -> dict:
        return {
            "v_min": self.v_min,
            "v_max": self.v_max,
            "fragments": [
                {
                    "kind": f.kind,
                    "v_lo": f.v_lo,
                    "v_hi": f.v_hi,
                    "s_lo": f.s_lo,
                    "s_hi": f.s_hi,
                }
                for f in self.fragments
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Proposition":
        frags = tuple(
            Fragment(f["kind"], f["v_lo"], f["v_hi"], f["s_lo"], f["s_hi"])
            for f in obj["fragments"]
        )
        prop = cls(frags)
        if prop.v_min != obj["v_min"] or prop.v_max != obj["v_max"]:
            raise PropositionError("fragment range disagrees with declared bounds")
        return prop

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def loads(cls, text: str) -> "Proposition":
        return cls.from_json(json.loads(text))


def decode(
    tokens: list,
    scores: list[tuple[float, float]],
    v_min: float,
    v_max: float,
) -> Proposition:
    """Rebuild a proposition from its token encoding plus endpoint scores.

    Inverse of ``Proposition.encode`` / ``Proposition.scores``.
    """
    if len(tokens) % 2 != 1:
        raise PropositionError("token sequence must have odd length")
    kinds = tokens[0::2]
    boundaries = tokens[1::2]
    if any(k not in KINDS for k in kinds):
        raise PropositionError("even positions must hold fragment kinds")
    if len(scores) != len(kinds):
        raise PropositionError("one score pair required per fragment")
    edges = [v_min] + list(boundaries) + [v_max]
    for lo, hi in zip(edges, edges[1:]):
        if not lo < hi:
            raise PropositionError("boundary values must be strictly increasing")
    frags = []
    for kind, lo, hi, (s_lo, s_hi) in zip(kinds, edges, edges[1:], scores):
        if kind == "E" and s_lo != s_hi:
            raise PropositionError("E fragment requires equal endpoint scores")
        frags.append(Fragment(kind, lo, hi, s_lo, s_hi))
    return Proposition(tuple(frags))


def validate(prop: Proposition) -> list[str]:
    """Check every proposition invariant; returns a list of violations.

    Never raises: an empty list means the proposition is well formed and its
    satisfaction function is non-increasing (minimization convention).
    """
    violations = []
    frags = prop.fragments
    for i, f in enumerate(frags):
        if f.v_lo >= f.v_hi:
            violations.append(f"fragment {i}: zero-width interval")
        for s in (f.s_lo, f.s_hi):
            if not -_EPS <= s <= 1 + _EPS:
                violations.append(f"fragment {i}: score {s} out of range")
        if f.kind == "E" and f.s_lo != f.s_hi:
            violations.append(f"fragment {i}: E fragment with unequal scores")
        if f.s_lo < f.s_hi - _EPS:
            violations.append(f"fragment {i}: non-monotone (score rises with v)")
    for i, (prev, cur) in enumerate(zip(frags, frags[1:])):
        if abs(prev.v_hi - cur.v_lo) > _EPS:
            violations.append(f"tiling gap at fragment {i + 1} ({cur.v_lo})")
        if cur.s_lo > prev.s_hi + _EPS:
            violations.append(
                f"fragment {i + 1}: non-monotone (score jumps up at boundary)"
            )
    return violations
