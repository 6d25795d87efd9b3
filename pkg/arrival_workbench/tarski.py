from collections import namedtuple
from enum import Enum

import numpy as np

from arrival_workbench.core import validate_vertex_set
from arrival_workbench.exceptions import (
    CertificateException,
    LatticeTooLargeException,
    MonotonicityViolationException,
)
from arrival_workbench.flows import check_switching_flow
from arrival_workbench.simulate import Scheduler, multi_run
from arrival_workbench.utils import default

EXHAUSTIVE_LIMIT = 10**6


class Method(Enum):
    RECURSIVE_BINARY = "recursive_binary"
    KLEENE = "kleene"
    EXHAUSTIVE = "exhaustive"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower().replace("-", "_"))
        except ValueError:
            raise ValueError(
                f"unknown method {text!r}, expected one of {', '.join(m.value for m in cls)}"
            ) from None


# problems


class TarskiProblem:
    """a map on the grid {0..cap}^k, counting its evaluations"""

    def __init__(self, k, cap, function):
        assert k >= 0 and cap >= 0, "dimension and cap must be non-negative"
        self.k = k
        self.cap = cap
        self.function = function
        self.evaluations = 0
        self.history = []

    @property
    def lattice_size(self):
        return (self.cap + 1) ** self.k

    def __call__(self, w):
        w = tuple(int(c) for c in w)
        assert len(w) == self.k, f"expected {self.k} coordinates, got {len(w)}"
        assert all(0 <= c <= self.cap for c in w), f"{w} lies outside the grid"

        value = tuple(self.function(w))
        self.evaluations += 1
        self.history.append((w, value))
        return value


EvaluationRecord = namedtuple(
    "EvaluationRecord",
    [
        "weights",
        "inflows",
        "iterations",
        "start_traversals",
        "loop_traversals",
        "waiting_after_start",
    ],
)


class ArrivalTarskiProblem(TarskiProblem):
    """D(w) = min(2^n, F(w)), where F(w) are the multi-run inflows at the set members"""

    def __init__(self, instance, members, scheduler=None):
        self.instance = instance
        self.members = validate_vertex_set(instance, members)
        self.scheduler = Scheduler.parse(default(scheduler, "greedy"))
        self.records = []
        super().__init__(len(self.members), 2**instance.n, self._capped)

    def run(self, w):
        result = multi_run(self.instance, self.members, w, scheduler=self.scheduler)
        injected = 1 + sum(w)
        absorbed = result.arrivals_d + result.arrivals_dbar + sum(result.inflows)
        if absorbed != injected or sum(result.inflows) > injected:
            raise CertificateException(
                f"flow ledger broken at w={w}: {absorbed} trains absorbed, {injected} injected"
            )
        return result

    def uncapped(self, w):
        """F(w), not counted as an evaluation"""
        return self.run(tuple(w)).inflows

    def _capped(self, w):
        result = self.run(w)
        self.records.append(
            EvaluationRecord(
                weights=w,
                inflows=result.inflows,
                iterations=result.iterations,
                start_traversals=result.start_traversals,
                loop_traversals=result.loop_traversals,
                waiting_after_start=result.waiting_after_start,
            )
        )
        return tuple(min(self.cap, f) for f in result.inflows)


def build_capped_function(instance, members, scheduler=None):
    return ArrivalTarskiProblem(instance, members, scheduler)


# bounds


def evaluation_bound(k, N):
    """4 * (ceil(log2(N + 1)) + 1)^k"""
    return 4 * (N.bit_length() + 1) ** k


def binary_search_bound(k, N):
    """(floor(log2(N + 1)) + 1)^k, the exact worst case of the nested binary search"""
    return (N + 1).bit_length() ** k


# monotonicity


def _leq(p, q):
    return all(a <= b for a, b in zip(p, q))


def monotonicity_witness(history):
    """first pair ((p, D(p)), (q, D(q))) with p <= q but D(p) not <= D(q), or None"""
    for p, dp in history:
        for q, dq in history:
            if p != q and _leq(p, q) and not _leq(dp, dq):
                return (p, dp), (q, dq)
    return None


def _violation(problem, message):
    return MonotonicityViolationException(message, witness=monotonicity_witness(problem.history))


# search


def _nested_binary_search(problem, free, suffix, lower, upper):
    """
    fixes coordinates free.. to `suffix` and returns (point, D(point)) with D(point)[:free] == point[:free].
    invariant: D(lower, suffix) >= lower and D(upper, suffix) <= upper on the free coordinates
    """
    if free == 0:
        return suffix, problem(suffix)

    i = free - 1
    lower, upper = list(lower), list(upper)
    while True:
        if any(lo > hi for lo, hi in zip(lower, upper)):
            raise _violation(problem, f"search box on coordinates 0..{i} became empty")

        mid = (lower[i] + upper[i]) // 2
        point, value = _nested_binary_search(problem, i, (mid, *suffix), lower[:i], upper[:i])
        c = value[i]
        if not lower[i] <= c <= upper[i]:
            raise _violation(
                problem, f"D{point}[{i}] = {c} escapes the search range {lower[i]}..{upper[i]}"
            )
        if c == mid:
            return point, value

        slice_point = list(point[:i])
        if c > mid:
            lower = slice_point + [mid + 1]
        else:
            upper = slice_point + [mid - 1]


def _recursive_binary(problem):
    point, value = _nested_binary_search(
        problem, problem.k, (), [0] * problem.k, [problem.cap] * problem.k
    )
    if value != point:
        raise _violation(problem, f"search ended at {point} with D = {value}")
    return point


def _kleene(problem, max_evaluations):
    limit = default(max_evaluations, (problem.cap + 1) * problem.k + 1)
    w = (0,) * problem.k
    while problem.evaluations < limit:
        value = problem(w)
        if value == w:
            return w
        if not _leq(w, value):
            raise _violation(problem, f"iteration went down from {w} to {value}")
        w = value
    raise LatticeTooLargeException(f"Kleene iteration did not settle within {limit} evaluations")


def _require_enumerable(problem):
    if problem.lattice_size > EXHAUSTIVE_LIMIT:
        raise LatticeTooLargeException(
            f"grid has {problem.lattice_size} points, more than {EXHAUSTIVE_LIMIT}"
        )


def _grid_points(problem):
    for index in np.ndindex(*(problem.cap + 1,) * problem.k):
        yield tuple(int(c) for c in index)


def all_fixed_points(problem):
    _require_enumerable(problem)
    return [w for w in _grid_points(problem) if problem(w) == w]


def _exhaustive(problem):
    _require_enumerable(problem)
    for w in _grid_points(problem):
        if problem(w) == w:
            return w
    raise _violation(problem, "no fixed point on the whole grid")


def find_fixed_point(problem, method=Method.RECURSIVE_BINARY, max_evaluations=None):
    method = Method.parse(method)
    if method is Method.RECURSIVE_BINARY:
        return _recursive_binary(problem)
    if method is Method.KLEENE:
        return _kleene(problem, max_evaluations)
    return _exhaustive(problem)


# certificates


def fixed_point_to_switching_flow(instance, members, w, scheduler=None):
    """run profile at a fixed point, checked to be a switching flow"""
    w = tuple(w)
    result = multi_run(instance, members, w, scheduler=scheduler)
    if result.inflows != w:
        raise CertificateException(f"{w} is not a fixed point of the uncapped map: F = {result.inflows}")

    verdict = check_switching_flow(instance, result.profile)
    if not verdict:
        raise CertificateException(f"fixed point {w} gives no switching flow ({verdict})")
    return result.profile, verdict.destination
