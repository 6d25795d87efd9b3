import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arrival_workbench.core import DEST_D, DEST_DBAR, YARD, ArrivalInstance, Slot
from arrival_workbench.decompose import layer_decomposition, set_radius, topological_order
from arrival_workbench.exceptions import (
    DimensionMismatchException,
    InvalidInstanceException,
    NonTerminatingException,
    SchedulerException,
    StepCapExceededException,
)
from arrival_workbench.generators import Family, GeneratorSpec
from arrival_workbench.simulate import (
    Scheduler,
    Strategy,
    greedy_iteration_bound,
    multi_run,
    run_procedure,
    traversal_bound,
    write_trace_csv,
)
from strategies import instances, instances_with_weights, schedulers


def profile_counts(flow):
    return {(e.tail, e.slot): x for e, x in flow.items()}


# run procedure


def test_run_single_vertex(single):
    result = run_procedure(single)
    assert result.destination == DEST_D
    assert profile_counts(result.profile) == {
        (YARD, Slot.YARD): 1,
        (0, Slot.EVEN): 1,
        (0, Slot.ODD): 0,
    }


def test_run_i2(i2):
    result = run_procedure(i2, record_trace=True)
    assert result.destination == DEST_DBAR
    assert profile_counts(result.profile) == {
        (YARD, Slot.YARD): 1,
        (0, Slot.EVEN): 1,
        (0, Slot.ODD): 1,
        (1, Slot.EVEN): 1,
        (1, Slot.ODD): 0,
    }
    assert result.traversals == 3
    assert result.visits == {0: 2, 1: 1}
    assert [(row.vertex, row.slot, row.head) for row in result.trace] == [
        (0, Slot.EVEN, 1),
        (1, Slot.EVEN, 0),
        (0, Slot.ODD, DEST_DBAR),
    ]


def test_run_caps_non_terminating(trap):
    with pytest.raises(StepCapExceededException) as info:
        run_procedure(trap)
    assert info.value.step_cap == 2 * 2**2 + 1


def test_run_explicit_cap(i2):
    with pytest.raises(StepCapExceededException):
        run_procedure(i2, step_cap=2)
    assert run_procedure(i2, step_cap=3).destination == DEST_DBAR


@given(instances(max_n=8))
def test_visit_and_traversal_bounds(instance):
    result = run_procedure(instance)
    layers = layer_decomposition(instance)
    assert result.traversals <= traversal_bound(instance.n, layers.ell)
    for v, visits in result.visits.items():
        assert visits <= 2 ** layers.dist[v]


@pytest.mark.parametrize("n", range(1, 9))
def test_counter_chain_meets_traversal_bound(n):
    instance = GeneratorSpec(Family.LONG_RUN_COUNTER, n).generate()
    result = run_procedure(instance)
    assert layer_decomposition(instance).ell == n
    assert result.traversals == 2 ** (n + 1) - 2 == traversal_bound(n, n)
    assert result.visits[0] == 2**n


def test_layered_chain_of_two_meets_traversal_bound():
    instance = GeneratorSpec(Family.LAYERED_CHAIN, 2).generate()
    assert run_procedure(instance).traversals == traversal_bound(2, 2) == 6


def test_bound_formulas():
    assert traversal_bound(2, 1) == 4
    assert traversal_bound(5, 0) == 5
    assert greedy_iteration_bound(2, 1, 1, 2) == 12


# multi-run procedure


def test_multi_run_without_set_matches_run(i2):
    result = multi_run(i2, (), ())
    assert result.arrivals == {DEST_D: 0, DEST_DBAR: 1}
    assert result.profile == run_procedure(i2).profile


@pytest.mark.parametrize(
    "weights, arrivals_d, arrivals_dbar, inflow",
    [((0,), 0, 0, 1), ((1,), 0, 1, 1), ((2,), 1, 1, 1), ((3,), 1, 1, 2)],
)
def test_multi_run_i2(i2, weights, arrivals_d, arrivals_dbar, inflow):
    result = multi_run(i2, (1,), weights)
    assert (result.arrivals_d, result.arrivals_dbar) == (arrivals_d, arrivals_dbar)
    assert result.inflows == (inflow,)


def test_multi_run_start_phase_splits_weights(i2):
    result = multi_run(i2, (1,), (3,))
    assert result.profile.at(1, Slot.EVEN) == 2
    assert result.profile.at(1, Slot.ODD) == 1
    assert result.start_traversals == 4
    assert result.waiting_after_start == 3


def test_multi_run_input_errors(i2, trap):
    with pytest.raises(DimensionMismatchException):
        multi_run(i2, (1,), (1, 2))
    with pytest.raises(InvalidInstanceException):
        multi_run(i2, (1, 1), (0, 0))
    with pytest.raises(InvalidInstanceException):
        multi_run(i2, (5,), (0,))
    with pytest.raises(InvalidInstanceException):
        multi_run(i2, (1,), (-1,))
    with pytest.raises(NonTerminatingException):
        multi_run(trap, (), ())


@given(instances_with_weights(), schedulers)
def test_profile_is_schedule_independent(case, scheduler):
    instance, members, weights = case
    reference = multi_run(instance, members, weights)
    other = multi_run(instance, members, weights, scheduler=scheduler, check=True)
    assert other.profile == reference.profile
    assert other.inflows == reference.inflows
    assert (other.arrivals_d, other.arrivals_dbar) == (reference.arrivals_d, reference.arrivals_dbar)


@given(instances_with_weights(), st.integers(0, 2**32))
def test_many_random_schedules_agree(case, seed):
    instance, members, weights = case
    profiles = {
        tuple(multi_run(instance, members, weights, scheduler=f"random:{seed + i}").profile.values())
        for i in range(5)
    }
    assert len(profiles) == 1


@pytest.mark.slow
@settings(max_examples=200)
@given(instances_with_weights(max_n=10, max_weight=8))
def test_profile_is_identical_under_every_schedule(case):
    instance, members, weights = case
    reference = multi_run(instance, members, weights)
    radius = set_radius(instance, members)
    assert reference.iterations <= greedy_iteration_bound(
        instance.n, len(members), radius, 1 + sum(weights)
    )

    names = ["round_robin", "single_step", *(f"random:{seed}" for seed in range(100))]
    if topological_order(instance, members) is not None:
        names.append("topological")
    for name in names:
        other = multi_run(instance, members, weights, scheduler=name)
        assert other.profile == reference.profile, name
        assert other.inflows == reference.inflows, name


@given(instances_with_weights())
def test_conservation(case):
    instance, members, weights = case
    result = multi_run(instance, members, weights)
    assert result.arrivals_d + result.arrivals_dbar + sum(result.inflows) == 1 + sum(weights)


@given(instances_with_weights())
def test_greedy_iteration_and_loop_traversal_bounds(case):
    instance, members, weights = case
    result = multi_run(instance, members, weights)
    radius = set_radius(instance, members)
    W = 1 + sum(weights)
    assert result.iterations <= greedy_iteration_bound(instance.n, len(members), radius, W)
    assert result.loop_traversals <= result.waiting_after_start * traversal_bound(instance.n, radius)


@given(instances_with_weights())
def test_topological_schedule_dispatches_each_vertex_once(case):
    instance, members, weights = case
    if topological_order(instance, members) is None:
        with pytest.raises(SchedulerException):
            multi_run(instance, members, weights, scheduler="topological")
        return
    result = multi_run(instance, members, weights, scheduler="topological", check=True)
    assert result.iterations <= instance.n - len(members)
    assert result.profile == multi_run(instance, members, weights).profile


def test_single_step_follows_the_train(i2):
    result = multi_run(i2, (), (), scheduler="single-step", record_trace=True)
    assert [(row.vertex, row.tau) for row in result.trace] == [(0, 1), (1, 1), (0, 1)]


def test_scheduler_parse():
    assert Scheduler.parse("greedy") == Scheduler(Strategy.GREEDY)
    assert Scheduler.parse("round-robin").strategy is Strategy.ROUND_ROBIN
    assert Scheduler.parse("random:7") == Scheduler(Strategy.RANDOM, 7)
    assert str(Scheduler.parse("random:7")) == "random:7"
    assert str(Scheduler.parse("single_step")) == "single_step"
    with pytest.raises(SchedulerException):
        Scheduler.parse("fastest")


def test_trace_csv(tmp_path, i2):
    path = tmp_path / "trace.csv"
    write_trace_csv(run_procedure(i2, record_trace=True).trace, path)
    assert path.read_text().splitlines() == [
        "step,vertex,tau,slot,head",
        "1,0,1,even,1",
        "2,1,1,even,0",
        "3,0,1,odd,D1",
    ]


def test_self_loop_vertex():
    instance = ArrivalInstance(n=1, origin=0, succ_even=(0,), succ_odd=(DEST_D,))
    result = run_procedure(instance)
    assert result.traversals == 2
    assert result.visits == {0: 2}
    assert multi_run(instance, (), (), scheduler="round_robin").profile == result.profile
