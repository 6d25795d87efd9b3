import csv
import math
from collections import namedtuple
from dataclasses import dataclass
from enum import Enum

from arrival_workbench.core import (
    DESTINATIONS,
    YARD,
    Slot,
    is_terminating,
    require_terminating,
    validate_vertex_set,
    vertex_token,
)
from arrival_workbench.decompose import topological_order
from arrival_workbench.exceptions import (
    DimensionMismatchException,
    InvalidInstanceException,
    SchedulerException,
    StepCapExceededException,
)
from arrival_workbench.flows import EdgeFlow
from arrival_workbench.prng import XorShift64Star
from arrival_workbench.utils import default, exists, open_text, split_evenly

TRACE_COLUMNS = ["step", "vertex", "tau", "slot", "head"]

TraceRow = namedtuple("TraceRow", TRACE_COLUMNS)


def write_trace_csv(rows, file):
    with open_text(file, "w") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in rows:
            writer.writerow(
                [row.step, vertex_token(row.vertex), row.tau, row.slot.label, vertex_token(row.head)]
            )


# bounds


def traversal_bound(n, ell):
    """proper edges a single train traverses before reaching its target set"""
    assert 0 <= ell <= n, "distance must lie in 0..n"
    return (n - ell + 2) * 2**ell - 2


def greedy_iteration_bound(n, k, ell, W):
    assert W >= 1 and 0 <= k <= n, "need W >= 1 and 0 <= k <= n"
    return math.ceil(math.log(W) + n) * (n - k) * traversal_bound(n, ell)


def default_step_cap(n):
    return n * 2**n + 1


# run procedure


@dataclass(frozen=True)
class RunResult:
    destination: object
    profile: EdgeFlow
    visits: dict
    traversals: int
    trace: list = None


def run_procedure(instance, step_cap=None, record_trace=False):
    """
    Single train from the yard, alternating even/odd at every vertex.
    Uncapped for terminating instances; otherwise capped at n * 2^n + 1 proper steps.
    """
    if not exists(step_cap) and not is_terminating(instance):
        step_cap = default_step_cap(instance.n)

    graph = instance.graph
    current = [Slot.EVEN] * instance.n
    counts = {(e.tail, e.slot): 0 for e in graph.edges}
    counts[(YARD, Slot.YARD)] = 1
    visits = {v: 0 for v in instance.vertices}
    trace = [] if record_trace else None

    v = instance.origin
    steps = 0
    while v not in DESTINATIONS:
        if exists(step_cap) and steps >= step_cap:
            raise StepCapExceededException(step_cap)
        visits[v] += 1
        slot = current[v]
        current[v] = slot.other
        head = instance.successor(v, slot)
        counts[(v, slot)] += 1
        steps += 1
        if record_trace:
            trace.append(TraceRow(steps, v, 1, slot, head))
        v = head

    return RunResult(
        destination=v,
        profile=EdgeFlow.from_counts(graph, counts),
        visits=visits,
        traversals=steps,
        trace=trace,
    )


# multi-run procedure


class MultiRunState:
    """waiting trains t, current slot per free vertex, traversal counts"""

    def __init__(self, instance, members, record_trace=False):
        self.instance = instance
        self.members = frozenset(members)
        self.t = {v: 0 for v in (*instance.vertices, *DESTINATIONS)}
        self.current = {v: Slot.EVEN for v in instance.vertices if v not in self.members}
        self.counts = {(e.tail, e.slot): 0 for e in instance.graph.edges}
        self.waiting = set()
        self.iterations = 0
        self.last_head = None
        self.trace = [] if record_trace else None

    def send(self, tail, slot, trains):
        if trains == 0:
            return None
        head = self.instance.successor(tail, slot)
        self.counts[(tail, slot)] += trains
        self.t[head] += trains
        self.last_head = head
        if head in self.current:
            self.waiting.add(head)
        return head

    def dispatch(self, v, tau):
        assert v in self.waiting, f"no trains wait at {v}"
        assert 1 <= tau <= self.t[v], f"tau must lie in 1..{self.t[v]}, got {tau}"

        self.t[v] -= tau
        if self.t[v] == 0:
            self.waiting.discard(v)

        self.iterations += 1
        slot = self.current[v]
        for s, trains in zip((slot, slot.other), split_evenly(tau)):
            head = self.send(v, s, trains)
            if exists(self.trace) and exists(head):
                self.trace.append(TraceRow(self.iterations, v, tau, s, head))

        if tau % 2 == 1:
            self.current[v] = slot.other

    def traversals(self):
        return sum(self.counts.values())

    def invariant_violations(self):
        graph = self.instance.graph
        violations = []
        for v, slot in self.current.items():
            even, odd = self.counts[(v, Slot.EVEN)], self.counts[(v, Slot.ODD)]
            into = sum(self.counts[(e.tail, e.slot)] for e in graph.in_edges[v])
            if even + odd != into - self.t[v]:
                violations.append(f"{v}: outflow {even + odd} != inflow {into} - waiting {self.t[v]}")
            # slot parity: even runs one ahead of odd exactly when odd is current
            if even - odd != (1 if slot is Slot.ODD else 0):
                violations.append(f"{v}: even {even}, odd {odd} with current slot {slot.label}")
        return violations


@dataclass(frozen=True)
class MultiRunResult:
    arrivals_d: int
    arrivals_dbar: int
    inflows: tuple
    profile: EdgeFlow
    iterations: int
    start_traversals: int
    loop_traversals: int
    waiting_after_start: int
    trace: list = None

    @property
    def arrivals(self):
        return dict(zip(DESTINATIONS, (self.arrivals_d, self.arrivals_dbar)))


def multi_run(instance, members, weights, scheduler=None, record_trace=False, check=False):
    """
    One train leaves the yard, weights[i] trains leave members[i] (ceil half even, floor half odd),
    then trains waiting on V minus members are dispatched until none is left.
    """
    members = validate_vertex_set(instance, members)
    weights = tuple(weights)
    if len(weights) != len(members):
        raise DimensionMismatchException(
            f"{len(weights)} weights given for a set of {len(members)} vertices"
        )
    for w in weights:
        if isinstance(w, bool) or not isinstance(w, int) or w < 0:
            raise InvalidInstanceException(f"weights must be non-negative integers, got {w!r}")
    require_terminating(instance)

    scheduler = Scheduler.parse(default(scheduler, Strategy.GREEDY.value))
    state = MultiRunState(instance, members, record_trace=record_trace)

    state.send(YARD, Slot.YARD, 1)
    for v, w in zip(members, weights):
        even, odd = split_evenly(w)
        state.send(v, Slot.EVEN, even)
        state.send(v, Slot.ODD, odd)

    start_traversals = state.traversals()
    waiting_after_start = sum(state.t[v] for v in state.waiting)
    state.last_head = None

    policy = scheduler.policy(instance, members)
    while state.waiting:
        v, tau = policy.choose(state)
        state.dispatch(v, tau)
        if check:
            violations = state.invariant_violations()
            assert not violations, "; ".join(violations)

    d, dbar = DESTINATIONS
    return MultiRunResult(
        arrivals_d=state.t[d],
        arrivals_dbar=state.t[dbar],
        inflows=tuple(state.t[v] for v in members),
        profile=EdgeFlow.from_counts(instance.graph, state.counts),
        iterations=state.iterations,
        start_traversals=start_traversals,
        loop_traversals=state.traversals() - start_traversals,
        waiting_after_start=waiting_after_start,
        trace=state.trace,
    )


# schedulers


class Strategy(Enum):
    GREEDY = "greedy"
    ROUND_ROBIN = "round_robin"
    TOPOLOGICAL = "topological"
    SINGLE_STEP = "single_step"
    RANDOM = "random"


@dataclass(frozen=True)
class Scheduler:
    strategy: Strategy = Strategy.GREEDY
    seed: int = 0

    @classmethod
    def parse(cls, text):
        """`greedy`, `round-robin`, `topological`, `single-step`, `random` or `random:<seed>`"""
        if isinstance(text, Scheduler):
            return text
        if isinstance(text, Strategy):
            return cls(text)
        name, _, seed = str(text).partition(":")
        try:
            strategy = Strategy(name.strip().lower().replace("-", "_"))
        except ValueError:
            raise SchedulerException(f"unknown scheduler {text!r}") from None
        return cls(strategy, int(seed) if seed else 0)

    def __str__(self):
        name = self.strategy.value
        return f"{name}:{self.seed}" if self.strategy is Strategy.RANDOM else name

    def policy(self, instance, members):
        return POLICIES[self.strategy](instance, members, self.seed)


class GreedyPolicy:
    """most waiting trains first, all of them at once"""

    def __init__(self, instance, members, seed):
        pass

    def choose(self, state):
        v = max(state.waiting, key=lambda u: (state.t[u], -u))
        return v, state.t[v]


class RoundRobinPolicy:
    def __init__(self, instance, members, seed):
        excluded = set(members)
        self.order = [v for v in instance.vertices if v not in excluded]
        self.position = 0

    def choose(self, state):
        size = len(self.order)
        for offset in range(size):
            index = (self.position + offset) % size
            v = self.order[index]
            if state.t[v] > 0:
                self.position = (index + 1) % size
                return v, state.t[v]
        raise SchedulerException("round robin found no waiting vertex")


class TopologicalPolicy:
    def __init__(self, instance, members, seed):
        order = topological_order(instance, members)
        if order is None:
            raise SchedulerException("topological scheduling needs V minus the set to be acyclic")
        self.rank = {v: i for i, v in enumerate(order)}

    def choose(self, state):
        v = min(state.waiting, key=self.rank.__getitem__)
        return v, state.t[v]


class SingleStepPolicy:
    """one train at a time, followed until it leaves V minus the set"""

    def __init__(self, instance, members, seed):
        pass

    def choose(self, state):
        v = state.last_head if state.last_head in state.waiting else min(state.waiting)
        return v, 1


class RandomPolicy:
    def __init__(self, instance, members, seed):
        self.rng = XorShift64Star(seed)

    def choose(self, state):
        v = self.rng.choice(sorted(state.waiting))
        return v, self.rng.randint(1, state.t[v])


POLICIES = {
    Strategy.GREEDY: GreedyPolicy,
    Strategy.ROUND_ROBIN: RoundRobinPolicy,
    Strategy.TOPOLOGICAL: TopologicalPolicy,
    Strategy.SINGLE_STEP: SingleStepPolicy,
    Strategy.RANDOM: RandomPolicy,
}
