import csv
import json
import multiprocessing
from pathlib import Path

import numpy as np
from tqdm import tqdm

from arrival_workbench import solver
from arrival_workbench.core import vertex_token
from arrival_workbench.decompose import layer_decomposition
from arrival_workbench.exceptions import NoFeedbackVertexSetException
from arrival_workbench.simulate import Scheduler
from arrival_workbench.tarski import Method
from arrival_workbench.utils import cast_list, default, exists, open_text
from arrival_workbench.version import __version__

NUM_CORES = multiprocessing.cpu_count()

BENCH_COLUMNS = [
    "instance",
    "method",
    "n",
    "ell",
    "set_size",
    "destination",
    "traversals",
    "iterations",
    "evaluations",
    "traversal_bound",
    "iteration_bound",
    "evaluation_bound",
    "bounds_ok",
    "agreement",
    "wall_time",
]

REFUSED = "refused"

TRAVERSAL_BOUNDS = ("traversals", "loop_traversals")
ITERATION_BOUNDS = ("greedy_iterations", "dispatches")


def _bound_value(decision, names):
    for name in names:
        if name in decision.bounds:
            return decision.bounds[name].value
    return ""


def bench_instance(job):
    """all bench rows of one instance, in method order"""
    label, instance, methods, settings = job
    ell = layer_decomposition(instance).ell

    decisions = {}
    for method in methods:
        try:
            decisions[method] = solver.decide(instance, method, **settings)
        except NoFeedbackVertexSetException:
            decisions[method] = None

    agreement = len({d.destination for d in decisions.values() if exists(d)}) <= 1

    rows = []
    for method, decision in decisions.items():
        row = dict.fromkeys(BENCH_COLUMNS, "")
        row.update(instance=label, method=method, n=instance.n, ell=ell, agreement=agreement)
        if decision is None:
            row.update(destination=REFUSED, bounds_ok=True)
            rows.append(row)
            continue

        stats = decision.stats
        row.update(
            set_size=stats.set_size,
            destination=vertex_token(decision.destination),
            traversals=stats.edge_traversals,
            iterations=stats.iterations,
            evaluations=stats.evaluations,
            traversal_bound=_bound_value(decision, TRAVERSAL_BOUNDS),
            iteration_bound=_bound_value(decision, ITERATION_BOUNDS),
            evaluation_bound=_bound_value(decision, ("evaluations",)),
            bounds_ok=decision.bounds_ok,
            wall_time=round(stats.wall_time, 6),
        )
        rows.append(row)
    return rows


class Workbench:
    def __init__(
        self,
        name="default",
        results_dir="results",
        base_dir="./",
        phi=None,
        k_max=6,
        tarski_method="recursive_binary",
        scheduler="greedy",
        num_workers=None,
        as_json=False,
        use_aim=False,
        aim_repo=None,
        aim_run_hash=None,
        hparams=None,
    ):
        """Class that handles:
        - deciding instances with one or all methods
        - benchmarking corpora
        - loading/saving its configuration"""
        self.name = name

        base_dir = Path(base_dir)
        self.base_dir = base_dir
        self.results_dir = base_dir / results_dir
        self.config_path = self.results_dir / name / ".config.json"

        assert k_max >= 0, "k_max must be non-negative"

        self.phi = phi
        self.k_max = k_max
        self.tarski_method = Method.parse(tarski_method)
        self.scheduler = Scheduler.parse(scheduler)
        self.num_workers = num_workers
        self.as_json = as_json
        self.steps = 0

        self.run = None
        self.hparams = default(hparams, self.config())

        if use_aim:
            try:
                import aim

                self.aim = aim
                self.run = self.aim.Run(run_hash=aim_run_hash, repo=aim_repo)
                self.run["hparams"] = self.hparams
            except ImportError:
                print(
                    "unable to import aim experiment tracker - please run `pip install aim` first"
                )

    def config(self):
        """returns a dictionary of the current configuration"""
        return {
            "phi": None if self.phi is None else str(self.phi),
            "k_max": self.k_max,
            "tarski_method": self.tarski_method.value,
            "scheduler": str(self.scheduler),
            "version": __version__,
        }

    def write_config(self):
        """write config to disk"""
        self.init_folders()
        self.config_path.write_text(json.dumps(self.config()))

    def load_config(self):
        """load config from disk"""
        config = (
            self.config()
            if not self.config_path.exists()
            else json.loads(self.config_path.read_text())
        )
        self.phi = config.pop("phi", None)
        self.k_max = config.pop("k_max", 6)
        self.tarski_method = Method.parse(config.pop("tarski_method", "recursive_binary"))
        self.scheduler = Scheduler.parse(config.pop("scheduler", "greedy"))

    def init_folders(self):
        """create folder for results"""
        (self.results_dir / self.name).mkdir(parents=True, exist_ok=True)

    @property
    def settings(self):
        return dict(
            k_max=self.k_max,
            phi=self.phi,
            tarski_method=self.tarski_method,
            scheduler=self.scheduler,
        )

    # deciding

    def decide(self, instance, method):
        decision = solver.decide(instance, method, **self.settings)
        self.print_log(decision)
        return decision

    def decide_all(self, instance):
        report = solver.decide_all(
            instance,
            k_max=self.k_max,
            phi=self.phi,
            method=self.tarski_method,
            workers=default(self.num_workers, 1),
        )
        for decision in report.decisions.values():
            self.print_log(decision)
        for method, reason in report.refused.items():
            print(f"method: {method} | refused: {reason}")
        return report

    def print_log(self, decision):
        stats = decision.stats
        data = [
            ("method", decision.method),
            ("destination", vertex_token(decision.destination)),
            ("set", ",".join(map(str, decision.members)) or "-"),
            ("traversals", stats.edge_traversals),
            ("iterations", stats.iterations),
            ("evaluations", stats.evaluations),
            ("bounds_ok", decision.bounds_ok),
            ("time", f"{stats.wall_time:.3f}s"),
        ]

        if self.as_json:
            print(decision.to_json())
        else:
            print(" | ".join(map(lambda d: f"{d[0]}: {d[1]}", data)))

        if self.run is not None:
            for key in ("edge_traversals", "iterations", "evaluations", "wall_time"):
                self.run.track(getattr(stats, key), f"{decision.method}/{key}", step=self.steps)
        self.steps += 1

        return data

    # benchmarking

    def bench(self, corpus, methods=solver.METHODS, output=None):
        """one row per (instance, method), in corpus order; an empty corpus gives a header-only CSV"""
        methods = cast_list(methods)
        for method in methods:
            assert method in solver.METHODS, f"unknown method {method}, expected one of {solver.METHODS}"

        corpus = list(corpus)
        jobs = [(label, instance, methods, self.settings) for label, instance in corpus]
        num_workers = min(default(self.num_workers, NUM_CORES), max(len(jobs), 1))

        rows = []
        progress_bar = tqdm(total=len(jobs), desc=f"{self.name}<bench>", disable=not jobs)
        if num_workers > 1:
            with multiprocessing.Pool(num_workers) as pool:
                for instance_rows in pool.imap(bench_instance, jobs):
                    rows.extend(instance_rows)
                    progress_bar.update(1)
        else:
            for job in jobs:
                rows.extend(bench_instance(job))
                progress_bar.update(1)
        progress_bar.close()

        if exists(output):
            write_bench_csv(rows, output)
        self.track_bench(rows)
        return rows

    def track_bench(self, rows):
        for step, row in enumerate(rows):
            if self.run is None or row["destination"] == REFUSED:
                continue
            for key in ("traversals", "iterations", "evaluations", "wall_time"):
                self.run.track(row[key], f"bench/{row['method']}/{key}", step=step)

    def print_summary(self, rows):
        for method, summary in summarize(rows).items():
            if self.as_json:
                print(json.dumps({"method": method, **summary}))
                continue
            print(" | ".join(f"{key}: {value}" for key, value in [("method", method), *summary.items()]))


def write_bench_csv(rows, file):
    with open_text(file, "w") as handle:
        writer = csv.DictWriter(handle, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def summarize(rows):
    """per-method instance count, refusals, bound failures and traversal/time statistics"""
    summary = {}
    for method in dict.fromkeys(row["method"] for row in rows):
        decided = [r for r in rows if r["method"] == method and r["destination"] != REFUSED]
        traversals = np.array([r["traversals"] for r in decided], dtype=np.float64)
        wall_time = np.array([r["wall_time"] for r in decided], dtype=np.float64)
        summary[method] = {
            "instances": sum(r["method"] == method for r in rows),
            "refused": sum(r["method"] == method and r["destination"] == REFUSED for r in rows),
            "bound_failures": sum(not r["bounds_ok"] for r in decided),
            "disagreements": sum(not r["agreement"] for r in decided),
            "mean_traversals": round(float(traversals.mean()), 2) if decided else 0.0,
            "max_traversals": int(traversals.max()) if decided else 0,
            "mean_time": round(float(wall_time.mean()), 6) if decided else 0.0,
        }
    return summary
