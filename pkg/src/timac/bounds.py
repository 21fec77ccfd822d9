"""Genie-aided DoF upper bound and the achievable-vs-bound comparison.

The converse grants each receiver the undesired messages as side
information, which collapses the sum-rate chain to a closed form in the
masses of a few state sets:

    upper(d) = min(3, (lam_T1 + lam_T2 + lam_T3 + 3
                       - lam_E3 - lam_F3 - lam_G3) / 2)

where lam_Ti is the probability that Tx i interferes nobody (the theta
sets) and E3/F3/G3 are the states where one transmitter interferes both
other receivers at once.  The min with 3 is the trivial three-link cut;
without it the formula alone can exceed the link count on interference-free
distributions.  Only the closed form is executed here; the entropy chain
behind it is a proof, not an algorithm.

Everything is exact rational arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .simulate import accounting
from .topology import StateDistribution, theta


def upper_bound(d: StateDistribution) -> Fraction:
    """Exact DoF upper bound for an arbitrary state distribution."""
    lam = (
        d.mass(theta(1))
        + d.mass(theta(2))
        + d.mass(theta(3))
        + 3
        - d.of("E3")
        - d.of("F3")
        - d.of("G3")
    )
    return min(Fraction(3), Fraction(1, 2) * lam)


@dataclass(frozen=True, eq=False)
class BoundReport:
    """Upper bound next to what the two encoding modes actually achieve."""

    distribution: StateDistribution
    upper: Fraction
    achievable_joint: Fraction
    achievable_separate: Fraction
    tight: bool

    def to_json(self, float_column: bool = False) -> str:
        obj = {
            "distribution": {
                "states": {n: str(p) for n, p in self.distribution.items() if p}
            },
            "upper": str(self.upper),
            "achievable_joint": str(self.achievable_joint),
            "achievable_separate": str(self.achievable_separate),
            "tight": self.tight,
        }
        if float_column:
            obj["upper_float"] = float(self.upper)
            obj["achievable_joint_float"] = float(self.achievable_joint)
            obj["achievable_separate_float"] = float(self.achievable_separate)
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def gap_report(d: StateDistribution) -> BoundReport:
    """Evaluate bound and both achievable rates; flag when joint meets the bound.

    The flag means equality for this distribution, not a converse claim
    beyond what the bound itself guarantees.
    """
    upper = upper_bound(d)
    joint = accounting(d, "joint")
    separate = accounting(d, "separate")
    return BoundReport(
        distribution=d,
        upper=upper,
        achievable_joint=joint,
        achievable_separate=separate,
        tight=joint == upper,
    )
