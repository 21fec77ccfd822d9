"""Executable interference-cancellation schemes over GF(q).

A SchemeBlock bundles a few channel uses (each tagged with a connectivity
state), the fresh message symbols each transmitter consumes, the per-use
transmit rule, and a per-receiver decode plan made of explicit cancellation
steps and small linear solves.  Blocks are immutable and validated at
construction: the plan is executed symbolically to prove that every
cancellation only uses symbols recovered earlier, that every observation it
touches is fully accounted for, and that every desired symbol is eventually
recovered (assuming the small solves are nonsingular).

There is also an independent oracle route: a block compiles to a
LinearScheme (per-transmitter precoding matrices) and verify_decodable()
checks, per receiver, the rank condition

    rank(M_full) - rank(M_interference) == number of desired symbols.

The structured decoder and the rank oracle are deliberately separate
implementations so that each one checks the other.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from . import topology
from .galois import Field, FieldElement, LinearSolveError, rank_values, solve_values

# A message symbol is named by (transmitter 1..3, slot within that Tx's list).
SymbolRef = tuple[int, int]

BUILTIN_SCHEMES = ("quadruple1", "quadruple2", "h-repetition", "naive-h")


class DimensionMismatchError(ValueError):
    """Observations, draws, and schemes that do not share a shape."""


class SchemeFormatError(ValueError):
    """Malformed LinearScheme JSON or unknown builtin name."""


class PlanError(ValueError):
    """A decode plan that cannot work even with ideal coefficients."""


@dataclass(frozen=True)
class Use:
    """One channel use: its state and what each Tx sends (None = silent)."""

    state: str
    sends: tuple[SymbolRef | None, SymbolRef | None, SymbolRef | None]


@dataclass(frozen=True)
class CancelStep:
    """Recover `target` from one observation after subtracting `cancel`.

    Valid only when the observation contains exactly {target} | cancel, so
    the leftover is target times a single nonzero coefficient; this step can
    never fail on an all-nonzero draw.
    """

    target: SymbolRef
    use: int
    cancel: tuple[SymbolRef, ...] = ()


@dataclass(frozen=True)
class SolveStep:
    """Recover all of `targets` jointly from the observations at `uses`.

    Contributions of already-known symbols are subtracted first; the step
    fails when the remaining coefficient matrix does not pin the targets
    down uniquely.
    """

    targets: tuple[SymbolRef, ...]
    uses: tuple[int, ...]


@dataclass(frozen=True)
class SchemeBlock:
    """An immutable unit of encoding/decoding spanning one or more uses."""

    field: Field
    kind: str
    uses: tuple[Use, ...]
    # messages[t-1] holds the fresh symbols Tx t consumes, as ints mod q.
    messages: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    decode_plan: tuple[tuple, tuple, tuple]

    def __post_init__(self):
        self._validate_shape()
        # _terms[j-1][k]: ((tx, ref), ...) heard by Rx j in use k.
        # _tx_vals[j-1][k]: ((tx, value), ...) same links with values filled in.
        terms = []
        vals = []
        for j in (1, 2, 3):
            per_rx_t = []
            per_rx_v = []
            for use in self.uses:
                state = topology.lookup(use.state)
                heard = [j]
                other = state.interferer(j)
                if other is not None:
                    heard.append(other)
                row_t = []
                row_v = []
                for tx in heard:
                    ref = use.sends[tx - 1]
                    if ref is not None:
                        row_t.append((tx, ref))
                        row_v.append((tx, self.messages[tx - 1][ref[1]]))
                per_rx_t.append(tuple(row_t))
                per_rx_v.append(tuple(row_v))
            terms.append(tuple(per_rx_t))
            vals.append(tuple(per_rx_v))
        object.__setattr__(self, "_terms", tuple(terms))
        object.__setattr__(self, "_tx_vals", tuple(vals))
        self._validate_plan()

    def _validate_shape(self):
        if len(self.messages) != 3 or len(self.decode_plan) != 3:
            raise PlanError("need per-Tx messages and a per-Rx plan")
        q = self.field.q
        for t in (1, 2, 3):
            for v in self.messages[t - 1]:
                if not isinstance(v, int) or not 0 <= v < q:
                    raise PlanError(f"message {v!r} of Tx{t} is not in GF({q})")
        for use in self.uses:
            if len(use.sends) != 3:
                raise PlanError("each use needs one send slot per Tx")
            for t, ref in zip((1, 2, 3), use.sends):
                if ref is None:
                    continue
                tx, m = ref
                # No cooperation: Tx t may only send its own symbols.
                if tx != t:
                    raise PlanError(f"Tx{t} cannot send symbol of Tx{tx}")
                if not 0 <= m < len(self.messages[t - 1]):
                    raise PlanError(f"Tx{t} has no message slot {m}")

    def _validate_plan(self):
        """Run the plan symbolically: success must recover all desired symbols."""
        n_uses = len(self.uses)
        for j in (1, 2, 3):
            known: set[SymbolRef] = set()
            for step in self.decode_plan[j - 1]:
                if isinstance(step, CancelStep):
                    if not 0 <= step.use < n_uses:
                        raise PlanError(f"Rx{j}: use {step.use} out of range")
                    present = {ref for _, ref in self._terms[j - 1][step.use]}
                    if step.target in known:
                        raise PlanError(f"Rx{j}: {step.target} already known")
                    if not set(step.cancel) <= known:
                        raise PlanError(f"Rx{j}: cancelling unknown symbols")
                    if present != set(step.cancel) | {step.target}:
                        raise PlanError(
                            f"Rx{j} use {step.use}: observation has "
                            f"{sorted(present)}, plan accounts for "
                            f"{sorted(set(step.cancel) | {step.target})}"
                        )
                    known.add(step.target)
                elif isinstance(step, SolveStep):
                    tset = set(step.targets)
                    if not step.targets or len(tset) != len(step.targets):
                        raise PlanError(f"Rx{j}: bad solve targets")
                    if tset & known:
                        raise PlanError(f"Rx{j}: solving already-known symbols")
                    for k in step.uses:
                        if not 0 <= k < n_uses:
                            raise PlanError(f"Rx{j}: use {k} out of range")
                        present = {ref for _, ref in self._terms[j - 1][k]}
                        if not present <= known | tset:
                            raise PlanError(
                                f"Rx{j} use {k}: unknown symbols besides targets"
                            )
                    known |= tset
                else:
                    raise PlanError(f"Rx{j}: unknown step {step!r}")
            desired = {(j, m) for m in range(len(self.messages[j - 1]))}
            if not desired <= known:
                raise PlanError(f"Rx{j}: plan never recovers {sorted(desired - known)}")

    @property
    def states(self) -> tuple[str, ...]:
        return tuple(use.state for use in self.uses)

    @property
    def n_uses(self) -> int:
        return len(self.uses)

    @property
    def n_symbols(self) -> int:
        return sum(len(m) for m in self.messages)

    def desired(self, rx: int) -> tuple[SymbolRef, ...]:
        return tuple((rx, m) for m in range(len(self.messages[rx - 1])))


class ChannelDraw:
    """Nonzero coefficients for every present link of a state sequence.

    coeff(use, rx, tx) is h_{rx,tx} at that use; a coefficient exists exactly
    when the link is present in the use's state, and is never zero.
    """

    __slots__ = ("field", "states", "_coeffs")

    def __init__(self, field: Field, states: tuple[str, ...], coeffs: dict):
        # Assumes coeffs already validated; use the classmethods to build.
        self.field = field
        self.states = states
        self._coeffs = coeffs

    @staticmethod
    def links(states: Sequence[str]) -> tuple[tuple[int, int, int], ...]:
        """All (use, rx, tx) links present in the sequence, in stable order."""
        out = []
        for k, name in enumerate(states):
            for rx, tx in topology.lookup(name).present_links():
                out.append((k, rx, tx))
        return tuple(out)

    @classmethod
    def random(cls, field: Field, states: Sequence[str], rng) -> "ChannelDraw":
        states = tuple(states)
        coeffs = {link: field.rand_nonzero(rng) for link in cls.links(states)}
        return cls(field, states, coeffs)

    @classmethod
    def from_coeffs(cls, field: Field, states: Sequence[str], coeffs: Mapping) -> "ChannelDraw":
        states = tuple(states)
        links = cls.links(states)
        if set(coeffs) != set(links):
            raise DimensionMismatchError(
                "coefficients must cover exactly the present links"
            )
        clean = {}
        for link in links:
            v = coeffs[link]
            v = int(v) % field.q
            if v == 0:
                raise ValueError(f"zero coefficient on present link {link}")
            clean[link] = v
        return cls(field, states, clean)

    @classmethod
    def enumerate_all(cls, field: Field, states: Sequence[str]) -> Iterator["ChannelDraw"]:
        """Every all-nonzero draw, exhaustively ((q-1)^links of them)."""
        states = tuple(states)
        links = cls.links(states)
        nonzero = range(1, field.q)
        for values in itertools.product(nonzero, repeat=len(links)):
            yield cls(field, states, dict(zip(links, values)))

    def coeff(self, use: int, rx: int, tx: int) -> int:
        try:
            return self._coeffs[(use, rx, tx)]
        except KeyError:
            raise KeyError(f"no link Tx{tx}->Rx{rx} in use {use}") from None

    def __repr__(self) -> str:
        return f"ChannelDraw(GF({self.field.q}), {len(self.states)} uses)"


@dataclass(frozen=True, eq=False)
class DecodeResult:
    """Per-receiver outcome: desired symbol values (None where unresolved)."""

    symbols: tuple[tuple[int | None, ...], ...]
    recovered: tuple[dict, dict, dict]
    failed: tuple[bool, bool, bool]
    trace: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not any(self.failed)


def _check_draw(block: SchemeBlock, draw: ChannelDraw):
    if draw.field != block.field:
        raise DimensionMismatchError("draw and block use different fields")
    if draw.states != block.states:
        raise DimensionMismatchError(
            f"draw states {draw.states} do not match block states {block.states}"
        )


def transmit(block: SchemeBlock, draw: ChannelDraw) -> tuple[tuple[int, ...], ...]:
    """Per-receiver observations: Y_j(k) = sum of h_jt(k) * sent symbol."""
    _check_draw(block, draw)
    q = block.field.q
    co = draw._coeffs
    obs = []
    for j in (1, 2, 3):
        rows = block._tx_vals[j - 1]
        row = []
        for k in range(len(block.uses)):
            acc = 0
            for tx, val in rows[k]:
                acc += co[(k, j, tx)] * val
            row.append(acc % q)
        obs.append(tuple(row))
    return tuple(obs)


def _sym(ref: SymbolRef) -> str:
    return f"x{ref[0]}[{ref[1]}]"


def _equation(block: SchemeBlock, rx: int, use: int) -> str:
    parts = [f"h{rx}{tx}*{_sym(ref)}" for tx, ref in block._terms[rx - 1][use]]
    return f"y{rx}({use}) = " + " + ".join(parts)


def decode_block(
    block: SchemeBlock,
    observations: Sequence[Sequence[int]],
    draw: ChannelDraw,
    trace: bool = False,
) -> DecodeResult:
    """Execute the decode plan against concrete observations.

    A receiver stops at its first singular solve; its remaining desired
    symbols are reported as None.  Steps themselves never guess: a returned
    value is exact or absent.
    """
    _check_draw(block, draw)
    n_uses = len(block.uses)
    if len(observations) != 3 or any(len(o) != n_uses for o in observations):
        raise DimensionMismatchError("observations must be 3 x n_uses")
    q = block.field.q
    inv = block.field.inv
    co = draw._coeffs
    lines: list[str] | None = [] if trace else None

    symbols = []
    recovered = []
    failed = []
    for j in (1, 2, 3):
        known: dict[SymbolRef, int] = {}
        stuck = False
        obs_j = observations[j - 1]
        for step in block.decode_plan[j - 1]:
            if isinstance(step, CancelStep):
                k = step.use
                y = obs_j[k]
                for ref in step.cancel:
                    y -= co[(k, j, ref[0])] * known[ref]
                val = y % q * inv(co[(k, j, step.target[0])]) % q
                known[step.target] = val
                if lines is not None:
                    gone = ",".join(_sym(r) for r in step.cancel) or "-"
                    lines.append(
                        f"Rx{j} use {k} [{block.uses[k].state}]: "
                        f"{_equation(block, j, k)}; cancel {gone}; "
                        f"resolve {_sym(step.target)} = {val}"
                    )
            else:
                idx = {ref: c for c, ref in enumerate(step.targets)}
                rows = []
                rhs = []
                for k in step.uses:
                    row = [0] * len(step.targets)
                    acc = obs_j[k]
                    for tx, ref in block._terms[j - 1][k]:
                        c = co[(k, j, tx)]
                        if ref in idx:
                            row[idx[ref]] = c
                        else:
                            acc -= c * known[ref]
                    rows.append(row)
                    rhs.append(acc % q)
                names = ",".join(_sym(r) for r in step.targets)
                try:
                    values = solve_values(block.field, rows, rhs)
                except LinearSolveError:
                    stuck = True
                    if lines is not None:
                        lines.append(
                            f"Rx{j} uses {step.uses}: singular system, "
                            f"unresolved {names}"
                        )
                    break
                known.update(zip(step.targets, values))
                if lines is not None:
                    shown = ",".join(str(v) for v in values)
                    lines.append(
                        f"Rx{j} uses {step.uses}: solve {names} = {shown}"
                    )
        out = tuple(known.get((j, m)) for m in range(len(block.messages[j - 1])))
        symbols.append(out)
        recovered.append(known)
        failed.append(stuck or any(v is None for v in out))
    return DecodeResult(
        tuple(symbols), tuple(recovered), tuple(failed), tuple(lines or ())
    )


# ---------------------------------------------------------------------------
# Block constructors.
# ---------------------------------------------------------------------------


def _normalize_msgs(msgs, field: Field | None, n: int) -> tuple[Field, tuple[int, ...]]:
    vals = list(msgs)
    if len(vals) != n:
        raise ValueError(f"need exactly {n} message symbols, got {len(vals)}")
    out = []
    for v in vals:
        if isinstance(v, FieldElement):
            if field is None:
                field = v.field
            elif v.field != field:
                raise DimensionMismatchError("message symbols from different fields")
            out.append(v.value)
        elif isinstance(v, int) and not isinstance(v, bool):
            out.append(v)
        else:
            raise TypeError(f"message symbol {v!r} is not a field element")
    if field is None:
        raise ValueError("pass FieldElement messages or an explicit field")
    return field, tuple(v % field.q for v in out)


def _c(target, use, *cancel) -> CancelStep:
    return CancelStep(tuple(target), use, tuple(tuple(r) for r in cancel))


# Decode plans for the two joint quadruples.  Each receiver first reads its
# clean uses, then peels the shared use, then its corrupted use.
_QUAD_PLANS = {
    1: (
        (_c((1, 1), 1), _c((1, 2), 2), _c((2, 0), 3, (1, 2)), _c((1, 0), 0, (2, 0))),
        (_c((2, 0), 0), _c((2, 2), 2), _c((3, 1), 3, (2, 0)), _c((2, 1), 1, (3, 1))),
        (_c((3, 0), 0), _c((3, 1), 1), _c((1, 2), 3, (3, 1)), _c((3, 2), 2, (1, 2))),
    ),
    2: (
        (_c((1, 0), 0), _c((1, 1), 1), _c((3, 2), 3, (1, 0)), _c((1, 2), 2, (3, 2))),
        (_c((2, 1), 1), _c((2, 2), 2), _c((1, 0), 3, (2, 1)), _c((2, 0), 0, (1, 0))),
        (_c((3, 0), 0), _c((3, 2), 2), _c((2, 1), 3, (3, 2)), _c((3, 1), 1, (2, 1))),
    ),
}

_QUAD_STATES = {1: ("B1", "C1", "D1", "H1"), 2: ("B2", "C2", "D2", "H2")}
# Message slot each Tx repeats in the final shared use.
_QUAD_LAST = {1: (2, 0, 1), 2: (0, 1, 2)}


def plan_quadruple(variant: int, msgs, field: Field | None = None) -> SchemeBlock:
    """Joint block over four states delivering 9 symbols in 4 uses.

    msgs order: (b1, b2, b3, c1, c2, c3, d1, d2, d3); Tx i consumes
    (b_i, c_i, d_i).  In the first three uses every Tx sends its slot-k
    symbol; in the shared fourth use each Tx resends the symbol it
    contributed to the one earlier use where it was the interferer.
    """
    if variant not in (1, 2):
        raise ValueError("variant must be 1 or 2")
    field, v = _normalize_msgs(msgs, field, 9)
    messages = ((v[0], v[3], v[6]), (v[1], v[4], v[7]), (v[2], v[5], v[8]))
    last = _QUAD_LAST[variant]
    sends = [
        ((1, 0), (2, 0), (3, 0)),
        ((1, 1), (2, 1), (3, 1)),
        ((1, 2), (2, 2), (3, 2)),
        tuple((t, last[t - 1]) for t in (1, 2, 3)),
    ]
    uses = tuple(Use(s, snd) for s, snd in zip(_QUAD_STATES[variant], sends))
    return SchemeBlock(field, f"quadruple{variant}", uses, messages, _QUAD_PLANS[variant])


def plan_separate(state: str, msgs, field: Field | None = None) -> SchemeBlock:
    """Single-state block: full rate for A, repetition for the 3-cycle
    states H1/H2, silencing everywhere else.

    msgs sized to the state's rate: 3 for A and H-states, 2 otherwise.
    """
    st = topology.lookup(state)
    if state == "A":
        field, v = _normalize_msgs(msgs, field, 3)
        uses = (Use("A", ((1, 0), (2, 0), (3, 0))),)
        plan = tuple((_c((j, 0), 0),) for j in (1, 2, 3))
        return SchemeBlock(field, "full", uses, ((v[0],), (v[1],), (v[2],)), plan)
    if state in ("H1", "H2"):
        field, v = _normalize_msgs(msgs, field, 3)
        sends = ((1, 0), (2, 0), (3, 0))
        uses = (Use(state, sends), Use(state, sends))
        plan = tuple(
            (SolveStep(((j, 0), (st.interferer(j), 0)), (0, 1)),) for j in (1, 2, 3)
        )
        return SchemeBlock(
            field, "repetition", uses, ((v[0],), (v[1],), (v[2],)), plan
        )
    quiet = min(topology.silent_candidates(state))
    field, v = _normalize_msgs(msgs, field, 2)
    sends = tuple(None if t == quiet else (t, 0) for t in (1, 2, 3))
    values = iter(v)
    messages = tuple(() if t == quiet else (next(values),) for t in (1, 2, 3))
    plan = tuple(
        () if j == quiet else (_c((j, 0), 0),) for j in (1, 2, 3)
    )
    return SchemeBlock(field, "silence", (Use(state, sends),), messages, plan)


def plan_fallback_single(state: str, msgs, field: Field | None = None) -> SchemeBlock:
    """Degraded single use of a 3-cycle state: only Tx1 talks, 1 symbol."""
    if state not in ("H1", "H2"):
        raise ValueError("fallback single block applies to H1/H2 only")
    field, v = _normalize_msgs(msgs, field, 1)
    uses = (Use(state, ((1, 0), None, None)),)
    plan = ((_c((1, 0), 0),), (), ())
    return SchemeBlock(field, "single", uses, ((v[0],), (), ()), plan)


def plan_naive_h(msgs, field: Field | None = None) -> SchemeBlock:
    """Negative control: 3 fresh symbols in one 3-cycle use.

    Every receiver faces one equation in two unknowns, so the per-receiver
    solve is underdetermined for every draw; decoding always fails.
    """
    field, v = _normalize_msgs(msgs, field, 3)
    st = topology.lookup("H1")
    uses = (Use("H1", ((1, 0), (2, 0), (3, 0))),)
    plan = tuple(
        (SolveStep(((j, 0), (st.interferer(j), 0)), (0,)),) for j in (1, 2, 3)
    )
    return SchemeBlock(field, "naive-h", uses, ((v[0],), (v[1],), (v[2],)), plan)


# ---------------------------------------------------------------------------
# Linear-scheme compilation and the rank-based decodability oracle.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearScheme:
    """Per-Tx precoding matrices (rows = uses, cols = own message symbols)."""

    field: Field
    states: tuple[str, ...]
    precoding: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        if len(self.precoding) != 3:
            raise SchemeFormatError("need one precoding matrix per Tx")
        q = self.field.q
        for t, matrix in zip((1, 2, 3), self.precoding):
            if len(matrix) != len(self.states):
                raise SchemeFormatError(f"Tx{t} matrix must have one row per use")
            widths = {len(row) for row in matrix}
            if len(widths) > 1:
                raise SchemeFormatError(f"Tx{t} matrix is ragged")
            for row in matrix:
                for v in row:
                    if not isinstance(v, int) or not 0 <= v < q:
                        raise SchemeFormatError(f"Tx{t} entry {v!r} not in GF({q})")
        for name in self.states:
            topology.lookup(name)

    def n_messages(self, tx: int) -> int:
        matrix = self.precoding[tx - 1]
        return len(matrix[0]) if matrix else 0

    @property
    def n_uses(self) -> int:
        return len(self.states)


def as_linear_scheme(block: SchemeBlock) -> LinearScheme:
    """Compile a block's transmit rules to 0/1 selection matrices."""
    matrices = []
    for t in (1, 2, 3):
        width = len(block.messages[t - 1])
        rows = []
        for use in block.uses:
            ref = use.sends[t - 1]
            rows.append(tuple(1 if ref == (t, m) else 0 for m in range(width)))
        matrices.append(tuple(rows))
    return LinearScheme(block.field, block.states, tuple(matrices))


def verify_decodable(ls: LinearScheme, draw: ChannelDraw) -> tuple[bool, bool, bool]:
    """Rank oracle: can each Rx resolve all its symbols given interference?

    For Rx j, stack one row per use mapping every message symbol in the
    block to its received coefficient (0 when the symbol's Tx is not heard).
    Rx j is decodable iff rank of that matrix exceeds the rank of its
    interference-only columns by exactly Tx j's message count.
    """
    if draw.field != ls.field:
        raise DimensionMismatchError("draw and scheme use different fields")
    if draw.states != ls.states:
        raise DimensionMismatchError("draw states do not match scheme states")
    q = ls.field.q
    counts = [ls.n_messages(t) for t in (1, 2, 3)]
    out = []
    for j in (1, 2, 3):
        full_rows = []
        int_rows = []
        for k, name in enumerate(ls.states):
            st = topology.lookup(name)
            heard = {j}
            other = st.interferer(j)
            if other is not None:
                heard.add(other)
            full_row = []
            int_row = []
            for t in (1, 2, 3):
                rows_t = ls.precoding[t - 1]
                for m in range(counts[t - 1]):
                    v = draw.coeff(k, j, t) * rows_t[k][m] % q if t in heard else 0
                    full_row.append(v)
                    if t != j:
                        int_row.append(v)
            full_rows.append(full_row)
            int_rows.append(int_row)
        gain = rank_values(ls.field, full_rows) - rank_values(ls.field, int_rows)
        out.append(gain == counts[j - 1])
    return tuple(out)


def builtin_scheme(name: str, field: Field) -> LinearScheme:
    """Named schemes for verification without hand-written files."""
    zeros9 = [0] * 9
    zeros3 = [0] * 3
    if name == "quadruple1":
        return as_linear_scheme(plan_quadruple(1, zeros9, field))
    if name == "quadruple2":
        return as_linear_scheme(plan_quadruple(2, zeros9, field))
    if name == "h-repetition":
        return as_linear_scheme(plan_separate("H1", zeros3, field))
    if name == "naive-h":
        return as_linear_scheme(plan_naive_h(zeros3, field))
    raise SchemeFormatError(f"unknown builtin scheme {name!r}")


# -- LinearScheme JSON: {"q": 257, "states": [...], "tx": [M1, M2, M3]} -----


def scheme_to_json(ls: LinearScheme) -> str:
    obj = {
        "q": ls.field.q,
        "states": list(ls.states),
        "tx": [[list(row) for row in matrix] for matrix in ls.precoding],
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def scheme_from_json(text: str) -> LinearScheme:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemeFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemeFormatError("scheme JSON must be an object")
    q = obj.get("q")
    if not isinstance(q, int) or isinstance(q, bool):
        raise SchemeFormatError('scheme JSON needs an integer "q"')
    try:
        field = Field(q)
    except ValueError as exc:
        raise SchemeFormatError(str(exc)) from exc
    states = obj.get("states")
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise SchemeFormatError('scheme JSON needs a "states" list of names')
    tx = obj.get("tx")
    if not isinstance(tx, list) or len(tx) != 3:
        raise SchemeFormatError('scheme JSON needs "tx" with 3 matrices')
    matrices = []
    for t, matrix in zip((1, 2, 3), tx):
        if not isinstance(matrix, list):
            raise SchemeFormatError(f"Tx{t} matrix must be a list of rows")
        rows = []
        for row in matrix:
            if not isinstance(row, list):
                raise SchemeFormatError(f"Tx{t} rows must be lists")
            vals = []
            for v in row:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise SchemeFormatError(f"Tx{t} entry {v!r} is not an integer")
                vals.append(v % q)
            rows.append(tuple(vals))
        matrices.append(tuple(rows))
    try:
        return LinearScheme(field, tuple(states), tuple(matrices))
    except (SchemeFormatError, topology.UnknownStateError) as exc:
        raise SchemeFormatError(str(exc)) from exc
