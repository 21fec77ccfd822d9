"""Scheduling, exact accounting, and the deterministic experiment engine."""

import csv
import io
import random
from collections import Counter
from fractions import Fraction

import pytest

from timac.simulate import (
    BlockSpec,
    ConfigError,
    SimulationConfig,
    accounting,
    run,
    schedule,
    separate_rate,
)
from timac.topology import STATE_ORDER, StateDistribution

UNIFORM = StateDistribution.uniform()
ONE_OF_EACH = {name: 1 for name in STATE_ORDER}


def _kinds(blocks):
    return Counter(b.kind for b in blocks)


def test_config_validation():
    with pytest.raises(ConfigError):
        SimulationConfig(UNIFORM)  # neither rounds nor n_uses
    with pytest.raises(ConfigError):
        SimulationConfig(UNIFORM, rounds=1, n_uses=5)
    with pytest.raises(ConfigError):
        SimulationConfig(UNIFORM, rounds=0)
    with pytest.raises(ConfigError):
        SimulationConfig(UNIFORM, n_uses=-3)
    with pytest.raises(ConfigError):
        SimulationConfig(UNIFORM, rounds=1, mode="both")
    with pytest.raises(ConfigError):
        SimulationConfig(UNIFORM, rounds=1, q=10)
    with pytest.raises(ConfigError):
        SimulationConfig({"A": 1}, rounds=1)
    with pytest.raises(ConfigError):
        SimulationConfig(UNIFORM, rounds=True)
    SimulationConfig(UNIFORM, rounds=1)  # valid


def test_schedule_uniform_round_joint():
    blocks = schedule(ONE_OF_EACH, "joint")
    assert _kinds(blocks) == Counter(
        {"silence": 18, "quadruple1": 1, "quadruple2": 1, "full": 1}
    )
    assert sum(b.n_uses for b in blocks) == 27
    assert sum(b.n_symbols for b in blocks) == 57
    # quadruples consume exactly B1,C1,D1,H1 and B2,C2,D2,H2
    used = Counter()
    for b in blocks:
        used.update(b.states)
    assert used == Counter(ONE_OF_EACH)


def test_schedule_uniform_round_separate():
    blocks = schedule(ONE_OF_EACH, "separate")
    # single H1 and H2 occurrences cannot pair; they degrade to single blocks
    assert _kinds(blocks) == Counter({"silence": 24, "full": 1, "single": 2})
    assert sum(b.n_uses for b in blocks) == 27
    assert sum(b.n_symbols for b in blocks) == 53


def test_schedule_two_rounds_separate_pairs_h_states():
    occurrences = {name: 2 for name in STATE_ORDER}
    blocks = schedule(occurrences, "separate")
    assert _kinds(blocks) == Counter({"silence": 48, "full": 2, "repetition": 2})
    assert sum(b.n_uses for b in blocks) == 54
    assert sum(b.n_symbols for b in blocks) == 108


def test_schedule_h_pairing_with_odd_count():
    blocks = schedule({"H1": 5}, "joint")
    assert _kinds(blocks) == Counter({"repetition": 2, "single": 1})
    assert sum(b.n_uses for b in blocks) == 5
    assert sum(b.n_symbols for b in blocks) == 7


def test_schedule_nothing_to_match():
    blocks = schedule({"B1": 1}, "joint")
    assert blocks == [BlockSpec("silence", "B1")]
    assert schedule({}, "joint") == []


def test_schedule_greedy_quadruple_matching():
    occ = {"B1": 3, "C1": 2, "D1": 2, "H1": 2, "B2": 1}
    blocks = schedule(occ, "joint")
    kinds = _kinds(blocks)
    assert kinds["quadruple1"] == 2  # min(3,2,2,2)
    assert kinds["quadruple2"] == 0  # C2, D2, H2 missing
    assert kinds["silence"] == 2     # leftover B1 and the lone B2


def test_schedule_is_permutation_invariant():
    rng = random.Random(3)
    occurrences = [name for name in STATE_ORDER for _ in range(rng.randint(0, 4))]
    reference = schedule(occurrences, "joint")
    for _ in range(5):
        rng.shuffle(occurrences)
        assert schedule(occurrences, "joint") == reference


def test_schedule_rejects_bad_input():
    with pytest.raises(ConfigError):
        schedule({"A": 1}, "other")
    with pytest.raises(ValueError):
        schedule({"A": -1}, "joint")
    with pytest.raises(ValueError):
        schedule({"A": True}, "joint")
    with pytest.raises(KeyError):
        schedule({"Z9": 1}, "joint")


def test_separate_rates():
    assert separate_rate("A") == 3
    assert separate_rate("H1") == separate_rate("H2") == Fraction(3, 2)
    assert separate_rate("I1") == 2


def test_accounting_headline_values():
    assert accounting(UNIFORM, "joint") == Fraction(19, 9)
    assert accounting(UNIFORM, "separate") == Fraction(2)
    assert accounting(StateDistribution.point_mass("A"), "joint") == 3
    assert accounting(StateDistribution.point_mass("A"), "separate") == 3
    assert accounting(StateDistribution.point_mass("H1"), "separate") == Fraction(3, 2)
    assert accounting(StateDistribution.point_mass("B1"), "joint") == 2


def test_accounting_quadruple_support():
    d = StateDistribution(
        {"B1": "1/4", "C1": "1/4", "D1": "1/4", "H1": "1/4"}
    )
    assert accounting(d, "joint") == Fraction(9, 4)
    # separate: 3 silencing states at 2 plus H1 at 3/2
    assert accounting(d, "separate") == Fraction(3, 4) * 2 + Fraction(1, 4) * Fraction(3, 2)


def test_joint_dominates_separate_on_random_distributions():
    rng = random.Random(11)
    for _ in range(300):
        denom = rng.randint(1, 60)
        cuts = sorted(rng.randint(0, denom) for _ in range(26))
        weights = (
            [cuts[0]]
            + [b - a for a, b in zip(cuts, cuts[1:])]
            + [denom - cuts[-1]]
        )
        d = StateDistribution(
            {n: Fraction(w, denom) for n, w in zip(STATE_ORDER, weights) if w}
        )
        assert accounting(d, "joint") >= accounting(d, "separate")


def test_run_uniform_round_headline():
    cfg = SimulationConfig(UNIFORM, mode="joint", q=257, seed=7, rounds=1)
    report = run(cfg)
    assert report.uses == 27
    assert report.symbols_delivered == 57
    assert report.failures == 0
    assert report.exact_dof == Fraction(19, 9)
    assert report.empirical_dof == Fraction(19, 9)
    assert sum(report.per_state.values()) == report.uses
    assert report.per_state == {name: 1 for name in STATE_ORDER}


def test_run_two_rounds_separate():
    cfg = SimulationConfig(UNIFORM, mode="separate", q=257, seed=7, rounds=2)
    report = run(cfg)
    assert report.uses == 54
    assert report.exact_dof == 2
    # seed 7 takes no repetition-block singularities (deterministic)
    assert report.failures == 0
    assert report.symbols_delivered == 108
    assert report.empirical_dof == report.exact_dof


def test_run_point_mass_a():
    cfg = SimulationConfig(
        StateDistribution.point_mass("A"), mode="joint", seed=1, n_uses=10
    )
    report = run(cfg)
    assert report.uses == 10
    assert report.symbols_delivered == 30
    assert report.failures == 0
    assert report.per_state == {"A": 10}


def test_run_iid_mode_counts():
    cfg = SimulationConfig(UNIFORM, mode="joint", seed=3, n_uses=500)
    report = run(cfg)
    assert report.uses == 500
    assert sum(report.per_state.values()) == 500
    assert report.symbols_delivered <= 3 * report.uses
    assert sum(b.uses for b in report.blocks) == 500


def test_run_rounds_mode_exact_dof_when_clean():
    # joint mode consumes the H states into quadruples, so a uniform round
    # has no fallible blocks at all and empirical == exact always
    for seed in range(6):
        cfg = SimulationConfig(UNIFORM, mode="joint", q=257, seed=seed, rounds=1)
        report = run(cfg)
        assert report.failures == 0
        assert report.empirical_dof == report.exact_dof


def test_run_deterministic_across_workers_and_calls():
    cfg = SimulationConfig(UNIFORM, mode="separate", q=101, seed=21, rounds=4)
    first = run(cfg)
    again = run(cfg)
    parallel = run(cfg, workers=4)
    assert first.to_json() == again.to_json() == parallel.to_json()
    assert first.blocks == again.blocks == parallel.blocks
    with pytest.raises(ConfigError):
        run(cfg, workers=0)


def test_report_serialization():
    cfg = SimulationConfig(UNIFORM, mode="joint", q=257, seed=7, rounds=1)
    report = run(cfg)
    text = report.to_json()
    assert '"exact_dof": "19/9"' in text
    assert '"empirical_dof": "19/9"' in text
    assert text.endswith("\n")
    assert '"exact_dof_float"' in report.to_json(float_column=True)

    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert rows[0] == [
        "index", "kind", "states", "uses", "symbols_planned",
        "symbols_delivered", "failures",
    ]
    assert len(rows) == 1 + len(report.blocks)
    assert sum(int(r[3]) for r in rows[1:]) == report.uses
    assert sum(int(r[5]) for r in rows[1:]) == report.symbols_delivered


def test_block_outcomes_match_totals():
    cfg = SimulationConfig(UNIFORM, mode="separate", q=101, seed=5, rounds=3)
    report = run(cfg)
    assert sum(b.symbols_delivered for b in report.blocks) == report.symbols_delivered
    assert sum(b.failures for b in report.blocks) == report.failures
    assert [b.index for b in report.blocks] == list(range(len(report.blocks)))
    for b in report.blocks:
        assert b.symbols_delivered + b.failures == b.symbols_planned
