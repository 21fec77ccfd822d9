"""The 27-state Wyner-type connectivity catalog and exact state distributions.

Three transmitter/receiver pairs; the desired link Tx i -> Rx i is always
present and each receiver hears at most one of the two cross transmitters.
That gives 3 interferer choices per receiver (none, or one of two), hence
3^3 = 27 connectivity states, named A, B1..B3, C1..C3, D1..D3, E1..E3,
F1..F3, G1..G3, H1, H2, I1, I2, J1, J2, K1, K2.

Also provided: the per-transmitter state sets used by the genie-aided
converse bound (for each Tx i, the states where it interferes the receiver
"below" it, the receiver "above" it, both, or nobody), and exact-rational
probability distributions over the catalog.  No floating point anywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

TX_INDICES = (1, 2, 3)
RX_INDICES = (1, 2, 3)


class UnknownStateError(KeyError):
    """A state name outside the 27-state catalog."""


class DistributionError(ValueError):
    """A state distribution that is malformed or does not sum to 1."""


@dataclass(frozen=True)
class TopologyState:
    """One connectivity pattern: the interfering Tx seen by each Rx (or None).

    Desired links are always present and therefore not stored.
    """

    interferers: tuple[int | None, int | None, int | None]

    def __post_init__(self):
        if len(self.interferers) != 3:
            raise ValueError("need one interferer slot per receiver")
        for rx, tx in zip(RX_INDICES, self.interferers):
            if tx is None:
                continue
            if tx not in TX_INDICES or tx == rx:
                raise ValueError(f"Rx{rx} cannot be interfered by Tx{tx!r}")

    def interferer(self, rx: int) -> int | None:
        return self.interferers[rx - 1]

    def interferes(self, tx: int) -> tuple[int, ...]:
        """Receivers that hear Tx as interference in this state."""
        return tuple(rx for rx in RX_INDICES if self.interferers[rx - 1] == tx)

    def present_links(self) -> tuple[tuple[int, int], ...]:
        """All (rx, tx) links with a nonzero channel coefficient, sorted."""
        links = [(rx, rx) for rx in RX_INDICES]
        links += [(rx, tx) for rx, tx in zip(RX_INDICES, self.interferers) if tx]
        return tuple(sorted(links))


# Catalog: per state, the interferer heard by (Rx1, Rx2, Rx3).
_PATTERNS: dict[str, tuple[int | None, int | None, int | None]] = {
    "A": (None, None, None),
    "B1": (2, None, None),
    "B2": (None, 1, None),
    "B3": (2, 1, None),
    "C1": (None, 3, None),
    "C2": (None, None, 2),
    "C3": (None, 3, 2),
    "D1": (None, None, 1),
    "D2": (3, None, None),
    "D3": (3, None, 1),
    "E1": (2, 3, None),
    "E2": (None, 1, 2),
    "E3": (None, 1, 1),
    "F1": (None, 3, 1),
    "F2": (3, None, 2),
    "F3": (2, None, 2),
    "G1": (2, None, 1),
    "G2": (3, 1, None),
    "G3": (3, 3, None),
    "H1": (2, 3, 1),
    "H2": (3, 1, 2),
    "I1": (2, 1, 1),
    "I2": (2, 1, 2),
    "J1": (2, 3, 2),
    "J2": (3, 3, 2),
    "K1": (3, 3, 1),
    "K2": (3, 1, 1),
}

STATE_ORDER: tuple[str, ...] = tuple(_PATTERNS)

_CATALOG: dict[str, TopologyState] = {
    name: TopologyState(pat) for name, pat in _PATTERNS.items()
}
_BY_PATTERN: dict[tuple[int | None, int | None, int | None], str] = {
    pat: name for name, pat in _PATTERNS.items()
}
assert len(_BY_PATTERN) == 27


def all_states() -> list[tuple[str, TopologyState]]:
    """The full catalog, in canonical name order (27 entries)."""
    return [(name, _CATALOG[name]) for name in STATE_ORDER]


def lookup(name: str) -> TopologyState:
    try:
        return _CATALOG[name]
    except KeyError:
        raise UnknownStateError(f"unknown state {name!r}") from None


def from_pattern(pattern: TopologyState | tuple) -> str:
    """Inverse catalog lookup: the unique name for a connectivity pattern."""
    key = pattern.interferers if isinstance(pattern, TopologyState) else tuple(pattern)
    try:
        return _BY_PATTERN[key]
    except KeyError:
        raise UnknownStateError(f"no state has pattern {key!r}") from None


def silent_candidates(name: str) -> frozenset[int]:
    """Transmitters whose silencing leaves both other receivers clean.

    Tx t qualifies iff every receiver other than Rx t either has no
    interferer or is interfered exactly by Tx t.
    """
    state = lookup(name)
    out = []
    for t in TX_INDICES:
        if all(
            state.interferer(rx) in (None, t) for rx in RX_INDICES if rx != t
        ):
            out.append(t)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Converse state sets.
#
# For each transmitter i there is a unique state in which it interferes both
# other receivers and its own receiver is clean (both_state).  The remaining
# states where Tx i causes interference split into two listed sets (delta and
# gamma below); theta(i) collects the 12 states where Tx i interferes nobody.
# The listed sets are kept verbatim alongside a rule-based derivation from
# the catalog so that each construction checks the other.
# ---------------------------------------------------------------------------

_DELTA_LISTED: dict[int, frozenset[str]] = {
    1: frozenset({"D1", "F1", "G1", "H1", "I1", "K1", "K2", "D3"}),
    2: frozenset({"B1", "E1", "G1", "H1", "I1", "J1", "I2", "B3"}),
    3: frozenset({"C1", "E1", "F1", "H1", "J1", "K1", "J2", "C3"}),
}
_GAMMA_LISTED: dict[int, frozenset[str]] = {
    1: frozenset({"B2", "E2", "G2", "H2", "I2", "B3"}),
    2: frozenset({"C2", "E2", "F2", "H2", "J2", "C3"}),
    3: frozenset({"D2", "F2", "G2", "H2", "K2", "D3"}),
}

# Receiver hit by Tx i whose states land in delta(i) / gamma(i).
_DELTA_RX = {1: 3, 2: 1, 3: 2}
_GAMMA_RX = {1: 2, 2: 3, 3: 1}


def both_state(i: int) -> str:
    """The state where Tx i interferes both other receivers and Rx i is clean."""
    pattern = tuple(None if rx == i else i for rx in RX_INDICES)
    return from_pattern(pattern)


def delta(i: int) -> frozenset[str]:
    """Listed set: states with the link Tx i -> Rx sigma(i), except both_state(i)."""
    return _DELTA_LISTED[i]


def gamma(i: int) -> frozenset[str]:
    """Listed set: states with Tx i -> Rx tau(i) not already in delta(i) or both_state(i)."""
    return _GAMMA_LISTED[i]


def theta(i: int) -> frozenset[str]:
    """All states in which Tx i interferes no receiver (complement of the rest)."""
    rest = _DELTA_LISTED[i] | _GAMMA_LISTED[i] | {both_state(i)}
    return frozenset(STATE_ORDER) - rest


def derived_delta(i: int) -> frozenset[str]:
    """Rule-based reconstruction of delta(i) from the catalog."""
    rx = _DELTA_RX[i]
    return frozenset(
        name
        for name, st in all_states()
        if st.interferer(rx) == i and name != both_state(i)
    )


def derived_gamma(i: int) -> frozenset[str]:
    """Rule-based reconstruction of gamma(i) from the catalog."""
    rx = _GAMMA_RX[i]
    hits = frozenset(name for name, st in all_states() if st.interferer(rx) == i)
    return hits - derived_delta(i) - {both_state(i)}


def derived_theta(i: int) -> frozenset[str]:
    """Rule-based reconstruction of theta(i): Tx i interferes nobody."""
    return frozenset(name for name, st in all_states() if not st.interferes(i))


# ---------------------------------------------------------------------------
# Exact-rational distributions over the catalog.
# ---------------------------------------------------------------------------


def parse_rational(value) -> Fraction:
    """Parse an exact rational from an int or a "p/q" / "p" string."""
    if isinstance(value, bool):
        raise DistributionError(f"bad rational value {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        parts = value.strip().split("/")
        try:
            if len(parts) == 1:
                return Fraction(int(parts[0]))
            if len(parts) == 2:
                return Fraction(int(parts[0]), int(parts[1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise DistributionError(f"bad rational syntax {value!r}") from exc
    raise DistributionError(f"bad rational value {value!r}")


def format_rational(x: Fraction) -> str:
    """Render a Fraction as "p/q" (or a bare integer when the denominator is 1)."""
    return str(x)


class StateDistribution:
    """An exact probability mass over the 27 states; must sum to exactly 1.

    Inputs that do not sum to 1 are rejected rather than renormalized, so
    user errors surface instead of being hidden.
    """

    __slots__ = ("_mass",)

    def __init__(self, mass: Mapping[str, Fraction | int | str]):
        full: dict[str, Fraction] = {name: Fraction(0) for name in STATE_ORDER}
        for name, value in mass.items():
            if name not in full:
                raise UnknownStateError(f"unknown state {name!r} in distribution")
            p = parse_rational(value)
            if p < 0:
                raise DistributionError(f"negative mass {p} on state {name}")
            full[name] = p
        total = sum(full.values())
        if total != 1:
            raise DistributionError(f"masses sum to {total}, expected exactly 1")
        object.__setattr__(self, "_mass", full)

    def __setattr__(self, name, val):
        raise AttributeError("StateDistribution is immutable")

    @classmethod
    def uniform(cls) -> "StateDistribution":
        return cls({name: Fraction(1, 27) for name in STATE_ORDER})

    @classmethod
    def point_mass(cls, name: str) -> "StateDistribution":
        lookup(name)
        return cls({name: Fraction(1)})

    def of(self, name: str) -> Fraction:
        try:
            return self._mass[name]
        except KeyError:
            raise UnknownStateError(f"unknown state {name!r}") from None

    def mass(self, states: Iterable[str]) -> Fraction:
        """Total probability of a set of states, exact."""
        return sum((self.of(s) for s in set(states)), Fraction(0))

    def support(self) -> tuple[str, ...]:
        return tuple(name for name in STATE_ORDER if self._mass[name])

    def items(self):
        return ((name, self._mass[name]) for name in STATE_ORDER)

    def common_denominator(self) -> int:
        """The lcm of all mass denominators; one exact 'round' is this many uses."""
        return math.lcm(*(self._mass[name].denominator for name in STATE_ORDER))

    def __eq__(self, other) -> bool:
        return isinstance(other, StateDistribution) and other._mass == self._mass

    def __repr__(self) -> str:
        nz = ", ".join(f"{n}={p}" for n, p in self.items() if p)
        return f"StateDistribution({nz})"

    # -- JSON schema: {"states": {"A": "1/27", ...}}, zero masses omitted --

    @classmethod
    def from_json(cls, text: str) -> "StateDistribution":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DistributionError(f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or not isinstance(obj.get("states"), dict):
            raise DistributionError('distribution JSON must be {"states": {...}}')
        return cls(obj["states"])

    @classmethod
    def from_file(cls, path) -> "StateDistribution":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_json(self) -> str:
        states = {name: format_rational(p) for name, p in self.items() if p}
        return json.dumps({"states": states}, indent=2, sort_keys=False) + "\n"


def mass(d: StateDistribution, states: Iterable[str]) -> Fraction:
    """Total probability d assigns to a set of states."""
    return d.mass(states)


def to_dot(name: str) -> str:
    """Graphviz source for one state: solid desired links, labeled interference."""
    state = lookup(name)
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for rx in RX_INDICES:
        lines.append(f"  Tx{rx} -> Rx{rx};")
    for rx in RX_INDICES:
        tx = state.interferer(rx)
        if tx is not None:
            lines.append(f'  Tx{tx} -> Rx{rx} [label="int", style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"
