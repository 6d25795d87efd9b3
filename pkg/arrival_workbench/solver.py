import json
from dataclasses import asdict, dataclass, field, replace
from multiprocessing import Pool

from arrival_workbench.core import require_terminating, vertex_token
from arrival_workbench.decompose import (
    compute_phi_set,
    feedback_vertex_set,
    layer_decomposition,
    set_radius,
)
from arrival_workbench.exceptions import (
    CertificateException,
    DisagreementException,
    NoFeedbackVertexSetException,
)
from arrival_workbench.flows import check_switching_flow, flow_to_csv_text
from arrival_workbench.simulate import (
    Scheduler,
    Strategy,
    greedy_iteration_bound,
    run_procedure,
    traversal_bound,
)
from arrival_workbench.tarski import (
    Method,
    build_capped_function,
    evaluation_bound,
    find_fixed_point,
    fixed_point_to_switching_flow,
)
from arrival_workbench.utils import default, stopwatch

SIMULATION = "sim"
SUBEXPONENTIAL = "subexp"
FVS = "fvs"
METHODS = (SIMULATION, SUBEXPONENTIAL, FVS)


@dataclass(frozen=True)
class Bound:
    value: object
    observed: int
    satisfied: bool

    @classmethod
    def check(cls, value, observed):
        return cls(value, observed, observed <= value)

    @classmethod
    def worst(cls, pairs):
        """tightest of many (limit, observed) pairs, satisfied only if all are"""
        pairs = list(pairs)
        if not pairs:
            return cls(0, 0, True)
        value, observed = min(pairs, key=lambda pair: pair[0] - pair[1])
        return cls(value, observed, all(o <= v for v, o in pairs))


@dataclass(frozen=True)
class DecisionStats:
    edge_traversals: int = 0
    iterations: int = 0
    evaluations: int = 0
    phi: str = None
    k: int = 0
    set_size: int = 0
    wall_time: float = 0.0


@dataclass
class Decision:
    destination: object
    method: str
    certificate: object
    stats: DecisionStats
    bounds: dict = field(default_factory=dict)
    members: tuple = ()

    @property
    def bounds_ok(self):
        return all(bound.satisfied for bound in self.bounds.values())

    def to_dict(self):
        return {
            "method": self.method,
            "destination": vertex_token(self.destination),
            "set": list(self.members),
            "stats": asdict(self.stats),
            "bounds": {name: asdict(bound) for name, bound in self.bounds.items()},
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def _self_check(instance, decision):
    verdict = check_switching_flow(instance, decision.certificate)
    if not verdict or verdict.destination != decision.destination:
        raise CertificateException(f"{decision.method} certificate fails verification: {verdict}")
    return decision


# simulation


def decide_by_simulation(instance):
    require_terminating(instance)
    with stopwatch() as timer:
        result = run_procedure(instance)

    layers = layer_decomposition(instance)
    bounds = {
        "traversals": Bound.check(traversal_bound(instance.n, layers.ell), result.traversals),
        "visits": Bound.worst(
            (2 ** layers.dist[v], result.visits[v]) for v in instance.vertices
        ),
    }
    stats = DecisionStats(
        edge_traversals=result.traversals,
        iterations=result.traversals,
        wall_time=timer["elapsed"],
    )
    decision = Decision(result.destination, SIMULATION, result.profile, stats, bounds)
    return _self_check(instance, decision)


# fixed-point deciders


def _decide_by_fixed_point(instance, method_name, members, tarski_method, scheduler):
    n = instance.n
    tarski_method = Method.parse(tarski_method)
    problem = build_capped_function(instance, members, scheduler)
    w = find_fixed_point(problem, tarski_method)
    certificate, destination = fixed_point_to_switching_flow(instance, members, w, problem.scheduler)

    records = problem.records
    stats = DecisionStats(
        edge_traversals=sum(r.start_traversals + r.loop_traversals for r in records),
        iterations=sum(r.iterations for r in records),
        evaluations=problem.evaluations,
        k=problem.k,
        set_size=len(members),
    )

    bounds = {}
    if tarski_method is Method.RECURSIVE_BINARY:
        bounds["evaluations"] = Bound.check(evaluation_bound(problem.k, problem.cap), problem.evaluations)

    radius = set_radius(instance, members)
    T = traversal_bound(n, radius)
    bounds["loop_traversals"] = Bound.worst(
        (r.waiting_after_start * T, r.loop_traversals) for r in records
    )
    decision = Decision(destination, method_name, certificate, stats, bounds, tuple(members))
    return decision, problem, radius


def decide_subexponential(instance, phi=None, method=Method.RECURSIVE_BINARY, scheduler=None):
    """phi-set, then a fixed point of the capped multi-run map on it"""
    require_terminating(instance)
    scheduler = Scheduler.parse(default(scheduler, Strategy.GREEDY.value))

    with stopwatch() as timer:
        phi_set = compute_phi_set(instance, phi)
        decision, problem, radius = _decide_by_fixed_point(
            instance, SUBEXPONENTIAL, phi_set.members, method, scheduler
        )

    n, k = instance.n, problem.k
    decision.bounds["phi_size"] = Bound(phi_set.size_limit, k, phi_set.size_bound_holds())
    decision.bounds["phi_radius"] = Bound(
        phi_set.radius_limit, phi_set.certified_radius, phi_set.radius_bound_holds()
    )
    if scheduler.strategy is Strategy.GREEDY:
        decision.bounds["greedy_iterations"] = Bound.worst(
            (greedy_iteration_bound(n, k, radius, 1 + sum(r.weights)), r.iterations)
            for r in problem.records
        )

    decision.stats = replace(decision.stats, phi=str(phi_set.phi), wall_time=timer["elapsed"])
    return _self_check(instance, decision)


def decide_fvs(instance, k_max=6, method=Method.RECURSIVE_BINARY):
    """feedback vertex set, then a fixed point with one topological sweep per evaluation"""
    require_terminating(instance)
    with stopwatch() as timer:
        members = feedback_vertex_set(instance, k_max)
        if members is None:
            raise NoFeedbackVertexSetException(k_max)
        decision, problem, _ = _decide_by_fixed_point(
            instance, FVS, members, method, Scheduler(Strategy.TOPOLOGICAL)
        )

    decision.bounds["dispatches"] = Bound.worst(
        (instance.n - len(members), r.iterations) for r in problem.records
    )
    decision.stats = replace(decision.stats, wall_time=timer["elapsed"])
    return _self_check(instance, decision)


# cross-checking


@dataclass
class Report:
    decisions: dict
    refused: dict
    destination: object

    @property
    def agreement(self):
        return len({d.destination for d in self.decisions.values()}) <= 1


def decide(instance, method, k_max=6, phi=None, tarski_method=Method.RECURSIVE_BINARY, scheduler=None):
    if method == SIMULATION:
        return decide_by_simulation(instance)
    if method == SUBEXPONENTIAL:
        return decide_subexponential(instance, phi=phi, method=tarski_method, scheduler=scheduler)
    if method == FVS:
        return decide_fvs(instance, k_max=k_max, method=tarski_method)
    raise ValueError(f"unknown method {method!r}, expected one of {', '.join(METHODS)}")


def _decide_or_refuse(args):
    """(method, decision, refusal reason)"""
    instance, method, k_max, phi, tarski_method = args
    try:
        return method, decide(instance, method, k_max=k_max, phi=phi, tarski_method=tarski_method), None
    except NoFeedbackVertexSetException as e:
        return method, None, str(e)


def decide_all(instance, k_max=6, phi=None, method=Method.RECURSIVE_BINARY, workers=1):
    require_terminating(instance)
    jobs = [(instance, m, k_max, phi, method) for m in METHODS]
    if workers > 1:
        with Pool(min(workers, len(jobs))) as pool:
            outcomes = pool.map(_decide_or_refuse, jobs)
    else:
        outcomes = list(map(_decide_or_refuse, jobs))

    decisions, refused = {}, {}
    for name, decision, reason in outcomes:
        if decision is None:
            refused[name] = reason
        else:
            decisions[name] = _self_check(instance, decision)

    destinations = {d.destination for d in decisions.values()}
    if len(destinations) > 1:
        summary = ", ".join(f"{name}: {vertex_token(d.destination)}" for name, d in decisions.items())
        raise DisagreementException(
            f"methods disagree ({summary})",
            certificates={name: flow_to_csv_text(d.certificate) for name, d in decisions.items()},
        )

    return Report(decisions=decisions, refused=refused, destination=destinations.pop())
