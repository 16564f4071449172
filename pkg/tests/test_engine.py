"""Round loop: simultaneity, determinism, rigidity, anonymity, replay."""

import itertools
import math
import random

import pytest

from lcm_arena.algorithms import AlgorithmSpec, Decision, get_algorithm
from lcm_arena.engine import (
    FrameMode,
    FramePolicy,
    SimulationRun,
    collision_audit,
    replay,
    run,
    step,
)
from lcm_arena.errors import ConfigError, ProtocolError
from lcm_arena.geometry import ORIGIN, Point, distance
from lcm_arena.models import Configuration, ModelKind, Palette, RobotState, Visibility
from lcm_arena.problems import (
    RUNNING,
    VerdictKind,
    gen_ae,
    gen_eqosc,
    gen_rendezvous,
    monitor_for,
)
from lcm_arena.scheduling import (
    AlternatingTerminals,
    FsynchAll,
    Interactive,
    RoundRobinSingleton,
    Scripted,
)
from lcm_arena.traces import parse_trace, serialize_trace

IDENTITY = FramePolicy()


class AlwaysRunning:
    def judge(self, history, motions, info):
        return RUNNING


def eqosc_run(algo="eo-sta", model=ModelKind.FSTA, frames=IDENTITY, horizon=100):
    inst = gen_eqosc(3.0, horizon=horizon)
    return SimulationRun(inst, get_algorithm(algo), model, frames)


# ---------------------------------------------------------------------------
# step semantics


def test_step_eqosc_first_round_fsynch():
    sim = eqosc_run()
    event = sim.advance([0, 1, 2])
    after = event.after
    assert after.positions() == (Point(-2, 0), Point(0, 0), Point(2, 0))
    assert [r.light for r in after.robots] == ["N", "Off", "N"]
    assert after.round == 1


def test_step_single_terminal_breaks_equidistance():
    sim = eqosc_run()
    event = sim.advance([0])
    assert event.after.positions() == (Point(-2, 0), Point(0, 0), Point(3, 0))
    assert event.verdict.kind is VerdictKind.SAFETY_VIOLATION
    assert event.verdict.round == 1


def test_step_null_changes_nothing_but_round():
    inst = gen_eqosc(3.0)
    sim = SimulationRun(inst, get_algorithm("null"), ModelKind.OBLOT, IDENTITY)
    event = sim.advance([0, 1, 2])
    assert event.after.positions() == event.before.positions()
    assert [r.light for r in event.after.robots] == [r.light for r in event.before.robots]
    assert event.after.round == event.before.round + 1


def test_step_is_order_independent():
    inst = gen_eqosc(3.0)
    algo = get_algorithm("eo-sta")
    frames = FramePolicy(FrameMode.FRESH_PER_ACTIVATION, seed=11)
    outcomes = set()
    for order in itertools.permutations([0, 1, 2]):
        sim = SimulationRun(inst, algo, ModelKind.FSTA, frames)
        event = sim.advance([0, 1, 2], _order=order)
        outcomes.add(
            tuple((r.pos.x, r.pos.y, r.light) for r in event.after.robots)
        )
    assert len(outcomes) == 1


def test_step_rejects_bad_activation():
    sim = eqosc_run()
    with pytest.raises(ProtocolError):
        sim.advance([])
    with pytest.raises(ProtocolError):
        sim.advance([9])


def test_advance_after_terminal_verdict_rejected():
    sim = eqosc_run()
    sim.advance([0])  # safety violation
    assert sim.finished
    with pytest.raises(ProtocolError):
        sim.advance([0, 1, 2])


def test_rigidity_after_positions_equal_globalized_decisions():
    rng = random.Random(8)
    inst = gen_eqosc(3.0)
    frames = FramePolicy(FrameMode.FRESH_PER_ACTIVATION, seed=rng.randrange(1 << 30))
    sim = SimulationRun(inst, get_algorithm("eo-sta"), ModelKind.FSTA, frames)
    for _ in range(6):
        event = sim.advance([0, 1, 2])
        for rec in event.decisions:
            frame = frames.frame_for(rec.robot, event.round, event.before.robots[rec.robot].pos)
            from lcm_arena.geometry import to_global

            expected = to_global(frame, rec.dest)
            got = event.after.robots[rec.robot].pos
            assert got == expected  # bit-for-bit


def test_light_write_errors_carry_robot_index():
    bad = AlgorithmSpec(
        "bad", ModelKind.FSTA, Palette(("Off",), "Off"), lambda s: Decision(ORIGIN, "X")
    )
    inst = gen_eqosc(3.0)
    sim = SimulationRun(inst, bad, ModelKind.FSTA, IDENTITY)
    with pytest.raises(ProtocolError, match="robot 0"):
        sim.advance([0])


def test_model_compatibility_enforced_at_construction():
    inst = gen_eqosc(3.0)
    with pytest.raises(ConfigError):
        SimulationRun(inst, get_algorithm("eo-sta"), ModelKind.FCOM, IDENTITY)
    with pytest.raises(ConfigError):
        SimulationRun(inst, get_algorithm("eo-sta"), ModelKind.OBLOT, IDENTITY)
    # LUMI executes the weaker rule by discarding what it may not use
    sim = SimulationRun(inst, get_algorithm("eo-sta"), ModelKind.LUMI, IDENTITY)
    event = sim.advance([0, 1, 2])
    assert event.after.positions() == (Point(-2, 0), Point(0, 0), Point(2, 0))


# ---------------------------------------------------------------------------
# run-level properties


def test_run_eqosc_fcom_period_two():
    result = run(
        gen_eqosc(3.0, horizon=100),
        get_algorithm("eo-com"),
        FsynchAll(),
        ModelKind.FCOM,
        IDENTITY,
    )
    assert result.verdict == RUNNING
    dists = [
        distance(cfg.robots[0].pos, cfg.robots[1].pos) for cfg in result.history
    ]
    assert dists == [3.0 if t % 2 == 0 else 2.0 for t in range(101)]


def test_run_alternating_terminals_violates_at_round_one():
    for algo, model in (("eo-sta", ModelKind.FSTA), ("eo-com", ModelKind.FCOM)):
        result = run(
            gen_eqosc(3.0),
            get_algorithm(algo),
            AlternatingTerminals(0, 2),
            model,
            IDENTITY,
        )
        assert result.verdict.kind is VerdictKind.SAFETY_VIOLATION
        assert result.verdict.round == 1


def test_run_rendezvous_fsynch_meets_exactly():
    result = run(
        gen_rendezvous(4.0), get_algorithm("rv-mid"), FsynchAll(), ModelKind.OBLOT, IDENTITY
    )
    assert result.verdict.kind is VerdictKind.SOLVED
    assert result.verdict.round == 1
    meet = result.events[0].after.positions()
    assert meet == (Point(2, 0), Point(2, 0))


def test_run_rendezvous_singleton_halves_forever():
    result = run(
        gen_rendezvous(4.0, horizon=50),
        get_algorithm("rv-mid"),
        RoundRobinSingleton(),
        ModelKind.OBLOT,
        IDENTITY,
    )
    assert result.verdict.kind is VerdictKind.LIVENESS_STALL
    assert result.verdict.round == 50
    for k, cfg in enumerate(result.history):
        gap = distance(cfg.robots[0].pos, cfg.robots[1].pos)
        assert abs(gap - 4.0 * 2.0**-k) < 1e-12


def test_run_determinism_identical_traces():
    def one():
        result = run(
            gen_eqosc(3.0, horizon=40),
            get_algorithm("eo-sta"),
            Scripted([[0, 1, 2], [0, 2], [1], [0, 1, 2]] * 10),
            ModelKind.FSTA,
            FramePolicy(FrameMode.FRESH_PER_ACTIVATION, seed=99),
        )
        return serialize_trace(e.to_record() for e in result.events)

    assert one() == one()


def test_interactive_strategy_drives_run():
    feeds = iter([[0, 1, 2], [0, 1, 2]])
    strategy = Interactive(lambda r, n: next(feeds))
    result = run(
        gen_eqosc(3.0, horizon=2), get_algorithm("eo-sta"), strategy, ModelKind.FSTA, IDENTITY
    )
    assert len(result.events) == 2
    assert result.verdict == RUNNING


def test_anonymity_under_robot_permutation():
    # permute initial robot order and the adversary script identically:
    # the multiset of positions per round must match
    inst = gen_eqosc(3.0)
    perm = [2, 0, 1]  # new index -> old index
    permuted = type(inst)(
        name=inst.name,
        initial=Configuration(
            tuple(
                RobotState(i, inst.initial.robots[perm[i]].pos, inst.initial.robots[perm[i]].light)
                for i in range(3)
            )
        ),
        vis=inst.vis,
        params={**inst.params, "middle": perm.index(1)},
        horizon=inst.horizon,
        osc_window=inst.osc_window,
    )
    script = [[0], [2], [0, 1, 2], [1]]
    inv = [perm.index(i) for i in range(3)]  # old index -> new index
    permuted_script = [[inv[i] for i in s] for s in script]

    base = run(
        inst, get_algorithm("eo-sta"), Scripted(script), ModelKind.FSTA, IDENTITY, horizon=4
    )
    moved = run(
        permuted,
        get_algorithm("eo-sta"),
        Scripted(permuted_script),
        ModelKind.FSTA,
        IDENTITY,
        horizon=4,
    )
    for cfg_a, cfg_b in zip(base.history, moved.history):
        multiset_a = sorted((r.pos.x, r.pos.y, r.light) for r in cfg_a.robots)
        multiset_b = sorted((r.pos.x, r.pos.y, r.light) for r in cfg_b.robots)
        assert multiset_a == multiset_b


def test_frame_adversary_does_not_change_global_trajectories():
    cases = [
        (gen_eqosc(3.0, horizon=12), "eo-sta", ModelKind.FSTA, FsynchAll()),
        (gen_eqosc(3.0, horizon=12), "eo-com", ModelKind.FCOM, FsynchAll()),
        (gen_rendezvous(4.0, horizon=12), "rv-mid", ModelKind.OBLOT, RoundRobinSingleton()),
        (
            gen_ae(math.pi / 6, math.pi / 3, 2, 6, 2, horizon=12),
            "ae-fv",
            ModelKind.OBLOT,
            RoundRobinSingleton(),
        ),
    ]
    for inst, algo, model, sched in cases:
        base = run(inst, get_algorithm(algo), sched, model, IDENTITY)
        for seed in (1, 7):
            adversarial = run(
                inst,
                get_algorithm(algo),
                type(sched)(),
                model,
                FramePolicy(FrameMode.FRESH_PER_ACTIVATION, seed=seed),
            )
            assert len(base.history) == len(adversarial.history)
            for cfg_a, cfg_b in zip(base.history, adversarial.history):
                for ra, rb in zip(cfg_a.robots, cfg_b.robots):
                    assert distance(ra.pos, rb.pos) < 1e-9


def test_fixed_per_robot_frames_are_stable_across_rounds():
    policy = FramePolicy(FrameMode.FIXED_PER_ROBOT, seed=3)
    f1 = policy.frame_for(0, 0, Point(1, 2))
    f2 = policy.frame_for(0, 9, Point(1, 2))
    assert f1 == f2
    fresh = FramePolicy(FrameMode.FRESH_PER_ACTIVATION, seed=3)
    assert fresh.frame_for(0, 0, Point(1, 2)) != fresh.frame_for(0, 1, Point(1, 2))


# ---------------------------------------------------------------------------
# replay


def _rendezvous_records():
    result = run(
        gen_rendezvous(4.0, horizon=50),
        get_algorithm("rv-mid"),
        RoundRobinSingleton(),
        ModelKind.OBLOT,
        IDENTITY,
    )
    return [e.to_record() for e in result.events]


def test_replay_round_trips():
    records = _rendezvous_records()
    report = replay(
        records, gen_rendezvous(4.0, horizon=50), get_algorithm("rv-mid"), ModelKind.OBLOT, IDENTITY
    )
    assert report.ok


def test_replay_detects_tampering():
    records = _rendezvous_records()
    records[3] = dict(records[3])
    robots = [dict(r) for r in records[3]["robots"]]
    robots[0] = dict(robots[0], pos=[robots[0]["pos"][0] + 1e-3, robots[0]["pos"][1]])
    records[3]["robots"] = robots
    report = replay(
        records, gen_rendezvous(4.0, horizon=50), get_algorithm("rv-mid"), ModelKind.OBLOT, IDENTITY
    )
    assert not report.ok
    assert report.round == 3
    assert report.field == "robots"


def test_replay_with_other_frame_seed_keeps_positions_but_not_decisions():
    inst = gen_rendezvous(4.0, horizon=50)
    result = run(
        inst,
        get_algorithm("rv-mid"),
        RoundRobinSingleton(),
        ModelKind.OBLOT,
        FramePolicy(FrameMode.FRESH_PER_ACTIVATION, seed=1),
    )
    records = [e.to_record() for e in result.events]
    report = replay(
        records,
        inst,
        get_algorithm("rv-mid"),
        ModelKind.OBLOT,
        FramePolicy(FrameMode.FRESH_PER_ACTIVATION, seed=2),
    )
    # the rule is frame-oblivious: global positions never diverge, only the
    # local-frame decision records do
    assert not report.ok
    assert report.field == "decisions"


def test_replay_prefix_of_unfinished_run_is_fine():
    inst = gen_eqosc(3.0, horizon=100)
    sim = SimulationRun(inst, get_algorithm("eo-sta"), ModelKind.FSTA, IDENTITY)
    for _ in range(5):
        sim.advance([0, 1, 2])
    records = [e.to_record() for e in sim.events]
    assert replay(records, inst, get_algorithm("eo-sta"), ModelKind.FSTA, IDENTITY).ok


# ---------------------------------------------------------------------------
# collision audit


def test_collision_audit_clean_on_solved_ae():
    result = run(
        gen_ae(math.pi / 6, math.pi / 3, 2, 6, 2),
        get_algorithm("ae-fv"),
        RoundRobinSingleton(),
        ModelKind.OBLOT,
        IDENTITY,
    )
    assert result.verdict.kind is VerdictKind.SOLVED
    assert collision_audit(result.events) == []


def test_collision_audit_catches_swap():
    cfg = Configuration((RobotState(0, Point(0, 0), "Off"), RobotState(1, Point(2, 0), "Off")))
    swap = AlgorithmSpec(
        "swap",
        ModelKind.OBLOT,
        Palette(("Off",), "Off"),
        lambda s: Decision(s.entries[0].pos, None),
    )
    _, event = step(
        cfg,
        frozenset({0, 1}),
        model=ModelKind.OBLOT,
        vis=Visibility.full(),
        algorithm=swap,
        frames=IDENTITY,
        monitor=AlwaysRunning(),
    )
    findings = collision_audit([event])
    assert len(findings) == 1
    round_, pair, sep = findings[0]
    assert round_ == 0 and pair == (0, 1) and sep == 0.0


def test_collision_audit_single_robot_trivial():
    cfg = Configuration((RobotState(0, Point(0, 0), "Off"),))
    _, event = step(
        cfg,
        frozenset({0}),
        model=ModelKind.OBLOT,
        vis=Visibility.full(),
        algorithm=get_algorithm("null"),
        frames=IDENTITY,
        monitor=AlwaysRunning(),
    )
    assert collision_audit([event]) == []


# ---------------------------------------------------------------------------
# trace records


def test_trace_record_schema():
    sim = eqosc_run()
    event = sim.advance([0, 2])
    rec = event.to_record()
    assert set(rec) == {"round", "activated", "robots", "decisions", "verdict"}
    assert rec["round"] == 0
    assert rec["activated"] == [0, 2]
    assert len(rec["robots"]) == 3
    assert [d["robot"] for d in rec["decisions"]] == [0, 2]
    parsed = parse_trace(serialize_trace([rec]))
    assert parsed == [rec]
