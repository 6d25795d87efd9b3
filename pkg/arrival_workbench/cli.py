import sys
from pathlib import Path

import fire

from arrival_workbench.core import (
    load_instance,
    save_instance,
    serialize_instance,
    vertex_token,
)
from arrival_workbench.decompose import (
    compute_phi_set,
    feedback_vertex_set,
    layer_decomposition,
)
from arrival_workbench.exceptions import (
    CertificateException,
    DimensionMismatchException,
    DisagreementException,
    InvalidCertificateException,
    InvalidInstanceException,
    LatticeTooLargeException,
    MonotonicityViolationException,
    NoFeedbackVertexSetException,
    NonTerminatingException,
    SchedulerException,
    StepCapExceededException,
)
from arrival_workbench.flows import check_switching_flow, read_flow_csv, write_flow_csv
from arrival_workbench.generators import Family, GeneratorSpec, generate_corpus
from arrival_workbench.simulate import multi_run as run_multi, run_procedure, write_trace_csv
from arrival_workbench.solver import METHODS
from arrival_workbench.utils import cast_list, exists
from arrival_workbench.workbench import Workbench

INVALID_INPUT = (
    InvalidInstanceException,
    NonTerminatingException,
    DimensionMismatchException,
    StepCapExceededException,
    NoFeedbackVertexSetException,
    SchedulerException,
    LatticeTooLargeException,
    InvalidCertificateException,
    ValueError,
    OSError,
)

INTERNAL_FAILURE = (
    CertificateException,
    DisagreementException,
    MonotonicityViolationException,
)


def validate(file):
    """parse an instance and check that it terminates

    Args:
        file: str, path to an `arrival v1` instance file
    """
    instance = load_instance(file)
    layers = layer_decomposition(instance)
    sizes = ",".join(map(str, layers.sizes[1:]))
    print(f"valid | n: {instance.n} | origin: {instance.origin} | ell: {layers.ell} | layers: {sizes}")


def run(file, trace=None, profile=None, step_cap=None):
    """simulate the single train

    Args:
        file: str, path to an instance file
        trace: str, write the per-step trace CSV here
        profile: str, write the run profile (a switching flow) CSV here
        step_cap: int, maximum number of proper steps
    """
    instance = load_instance(file)
    result = run_procedure(instance, step_cap=step_cap, record_trace=exists(trace))
    visits = " ".join(f"{v}:{count}" for v, count in result.visits.items())
    print(f"destination: {vertex_token(result.destination)} | traversals: {result.traversals}")
    print(f"visits: {visits}")

    if exists(trace):
        write_trace_csv(result.trace, trace)
    if exists(profile):
        write_flow_csv(result.profile, profile)


def multi_run(file, set=None, weights=None, scheduler="greedy", trace=None, profile=None):
    """start one train at the yard and weights[i] trains at set[i], then drain V minus the set

    Args:
        file: str, path to an instance file
        set: list, set vertices, e.g. `--set 1,3`
        weights: list, trains leaving each set vertex, e.g. `--weights 2,0`
        scheduler: str, greedy | round-robin | topological | single-step | random[:seed]
        trace: str, write the dispatch trace CSV here
        profile: str, write the traversal profile CSV here
    """
    instance = load_instance(file)
    members = cast_list(set)
    weights = [int(w) for w in cast_list(weights)]
    result = run_multi(instance, members, weights, scheduler=scheduler, record_trace=exists(trace))

    inflows = " ".join(f"{v}:{f}" for v, f in zip(members, result.inflows)) or "-"
    print(
        f"D0: {result.arrivals_d} | D1: {result.arrivals_dbar} | inflows: {inflows}"
        f" | iterations: {result.iterations} | traversals: {result.start_traversals + result.loop_traversals}"
    )

    if exists(trace):
        write_trace_csv(result.trace, trace)
    if exists(profile):
        write_flow_csv(result.profile, profile)


def decide(
    file,
    method="all",
    phi=None,
    k_max=6,
    tarski_method="recursive_binary",
    scheduler="greedy",
    json=False,
    certificate=None,
    num_workers=None,
    name="default",
    results_dir="results",
    base_dir="./",
    use_aim=False,
    aim_repo=None,
    aim_run_hash=None,
):
    """decide where the train ends

    Args:
        file: str, path to an instance file
        method: str, sim | subexp | fvs | all
        phi: float or str, phi for the phi-set, e.g. 0.5 or 1/2
        k_max: int, largest feedback vertex set the fvs method accepts
        tarski_method: str, recursive_binary | kleene | exhaustive
        scheduler: str, scheduler of the subexp method's multi-runs
        json: bool, print one JSON line per decision
        certificate: str, write the switching flow certificate CSV here
        num_workers: int, processes for `all`
        name: str, name of the run, config goes to <base_dir>/<results_dir>/<name>
        results_dir: str, path to results
        base_dir: str, base path
        use_aim: bool, whether to use AIM
        aim_repo: str, path to AIM repository
        aim_run_hash: str, hash of AIM run
    """
    instance = load_instance(file)
    workbench = Workbench(
        name=name,
        results_dir=results_dir,
        base_dir=base_dir,
        phi=phi,
        k_max=k_max,
        tarski_method=tarski_method,
        scheduler=scheduler,
        num_workers=num_workers,
        as_json=json,
        use_aim=use_aim,
        aim_repo=aim_repo,
        aim_run_hash=aim_run_hash,
    )

    if method == "all":
        report = workbench.decide_all(instance)
        decision = report.decisions["sim"]
        if not json:
            print(f"destination: {vertex_token(report.destination)} | agreement: {report.agreement}")
    else:
        decision = workbench.decide(instance, method)

    if exists(certificate):
        write_flow_csv(decision.certificate, certificate)


def phi_set(file, phi=None):
    """compute the phi-set and its certified radius

    Args:
        file: str, path to an instance file
        phi: float or str, defaults to sqrt(3 / 2n)
    """
    instance = load_instance(file)
    result = compute_phi_set(instance, phi)
    members = ",".join(map(str, result.members)) or "-"
    print(
        f"phi: {result.phi} | set: {members} | size: {len(result.members)}"
        f" (limit {result.size_limit:.2f}, ok: {result.size_bound_holds()})"
        f" | radius: {result.certified_radius}"
        f" (limit {result.radius_limit:.2f}, ok: {result.radius_bound_holds()})"
    )


def fvs(file, kmax=6):
    """minimum feedback vertex set of the switch graph on V

    Args:
        file: str, path to an instance file
        kmax: int, refuse above this size
    """
    instance = load_instance(file)
    members = feedback_vertex_set(instance, kmax)
    if members is None:
        raise NoFeedbackVertexSetException(kmax)
    print(f"fvs: {','.join(map(str, members)) or '-'} | size: {len(members)}")


def gen(family="random_terminating", n=8, seed=0, cycles=None, output=None):
    """generate an instance

    Args:
        family: str, random_terminating | layered_chain | long_run_counter | two_cycle_grid
        n: int, number of vertices
        seed: int, seed of the xorshift64* generator
        cycles: int, planted 2-cycles for two_cycle_grid
        output: str, write the instance here instead of printing it
    """
    instance = GeneratorSpec(family, n, seed=seed, cycles=cycles).generate()
    if exists(output):
        save_instance(instance, output)
        print(f"instance written to {output}")
    else:
        print(serialize_instance(instance), end="")


def bench(
    inputs=None,
    families=None,
    n_max=8,
    count=3,
    seed=0,
    methods=METHODS,
    output="bench.csv",
    phi=None,
    k_max=6,
    tarski_method="recursive_binary",
    num_workers=None,
    json=False,
    name="bench",
    new=False,
    results_dir="results",
    base_dir="./",
    use_aim=False,
    aim_repo=None,
    aim_run_hash=None,
):
    """decide a corpus with every method and write one CSV row per (instance, method)

    Args:
        inputs: list, instance files; when given, no instances are generated
        families: list, generator families, all of them by default
        n_max: int, generate sizes 2..n_max
        count: int, instances per family and size
        seed: int, first generator seed
        methods: list, methods to run
        output: str, bench CSV path
        phi: float or str, phi for the subexp method
        k_max: int, largest feedback vertex set the fvs method accepts
        tarski_method: str, recursive_binary | kleene | exhaustive
        num_workers: int, number of worker processes, defaults to all cores
        json: bool, print the per-method summaries as JSON lines
        name: str, name of the run
        new: bool, ignore the settings stored under this name and start from the flags
        results_dir: str, path to results
        base_dir: str, base path
        use_aim: bool, whether to use AIM
        aim_repo: str, path to AIM repository
        aim_run_hash: str, hash of AIM run
    """
    if exists(inputs):
        corpus = [(Path(path).stem, load_instance(path)) for path in cast_list(inputs)]
    else:
        families = cast_list(families) or [family.value for family in Family]
        corpus = list(generate_corpus(families, range(2, n_max + 1), count=count, seed=seed))

    workbench = Workbench(
        name=name,
        results_dir=results_dir,
        base_dir=base_dir,
        phi=phi,
        k_max=k_max,
        tarski_method=tarski_method,
        num_workers=num_workers,
        as_json=json,
        use_aim=use_aim,
        aim_repo=aim_repo,
        aim_run_hash=aim_run_hash,
    )
    if not new:
        workbench.load_config()
    workbench.write_config()
    rows = workbench.bench(corpus, methods=methods, output=output)
    workbench.print_summary(rows)
    if not json:
        print(f"{len(rows)} rows written to {output}")


def verify(file, certificate):
    """check a switching flow certificate against an instance

    Args:
        file: str, path to an instance file
        certificate: str, path to a `tail,slot,head,count` CSV
    """
    instance = load_instance(file)
    flow = read_flow_csv(certificate, instance)
    verdict = check_switching_flow(instance, flow)
    if not verdict:
        raise InvalidCertificateException(verdict)
    print(verdict)


COMMANDS = {
    "validate": validate,
    "run": run,
    "multi_run": multi_run,
    "decide": decide,
    "phi_set": phi_set,
    "fvs": fvs,
    "gen": gen,
    "bench": bench,
    "verify": verify,
}


def main(argv=None):
    """0 on success, 1 on invalid input, 2 on a certificate failure or disagreement"""
    try:
        fire.Fire(COMMANDS, command=argv, name="arrival_workbench")
    except fire.core.FireExit as e:
        return 0 if not e.code else 1
    except INVALID_INPUT as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except INTERNAL_FAILURE as e:
        print(f"internal failure: {e}", file=sys.stderr)
        for method, csv_text in getattr(e, "certificates", {}).items():
            print(f"--- {method} certificate ---\n{csv_text}", file=sys.stderr, end="")
        return 2
    return 0
