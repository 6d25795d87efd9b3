from dataclasses import dataclass
from enum import Enum

from arrival_workbench.core import (
    DEST_D,
    DEST_DBAR,
    DESTINATIONS,
    ArrivalInstance,
    backward_distances,
    unreachable_vertices,
)
from arrival_workbench.prng import XorShift64Star
from arrival_workbench.utils import cast_list, default


class Family(Enum):
    RANDOM_TERMINATING = "random_terminating"
    LAYERED_CHAIN = "layered_chain"
    LONG_RUN_COUNTER = "long_run_counter"
    TWO_CYCLE_GRID = "two_cycle_grid"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower().replace("-", "_"))
        except ValueError:
            raise ValueError(
                f"unknown family {text!r}, expected one of {', '.join(f.value for f in cls)}"
            ) from None


@dataclass(frozen=True)
class GeneratorSpec:
    family: Family
    n: int
    seed: int = 0
    cycles: int = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        assert self.n >= 1, "instances need at least one vertex"

    @property
    def label(self):
        cycles = f"-c{self.cycles}" if self.cycles is not None else ""
        return f"{self.family.value}-n{self.n}-s{self.seed}{cycles}"

    def generate(self):
        return generate(self)


def _random_terminating(n, rng):
    targets = [*range(n), *DESTINATIONS]
    even = [rng.choice(targets) for _ in range(n)]
    odd = [rng.choice(targets) for _ in range(n)]
    origin = rng.randbelow(n)

    while True:
        instance = ArrivalInstance(n=n, origin=origin, succ_even=even, succ_odd=odd)
        bad = unreachable_vertices(instance)
        if not bad:
            return instance
        dist = backward_distances(instance, DESTINATIONS)
        reaching = [v for v in range(n) if v in dist]
        odd[min(bad)] = rng.choice([*reaching, *DESTINATIONS])


def _layered_chain(n, rng):
    """ell = n, one vertex per layer"""
    even = [min(i + 1, n - 1) for i in range(n)]
    odd = [rng.choice(DESTINATIONS)] + list(range(n - 1))
    return ArrivalInstance(n=n, origin=n - 1, succ_even=even, succ_odd=odd)


def _long_run_counter(n, rng):
    """binary counter: the run from 0 traverses 2^(n+1) - 2 edges"""
    even = [0] * n
    odd = list(range(1, n)) + [rng.choice(DESTINATIONS)]
    return ArrivalInstance(n=n, origin=0, succ_even=even, succ_odd=odd)


def _two_cycle_grid(n, rng, cycles):
    """planted disjoint 2-cycles (2j, 2j+1); every other edge points forward or to a destination"""
    cycles = default(cycles, n // 2)
    assert 0 <= 2 * cycles <= n, f"cannot plant {cycles} disjoint 2-cycles on {n} vertices"

    def forward(start):
        return rng.choice([*range(start, n), DEST_D, DEST_DBAR])

    even, odd = [None] * n, [None] * n
    for j in range(cycles):
        a, b = 2 * j, 2 * j + 1
        even[a], even[b] = b, a
        odd[a], odd[b] = forward(b + 1), forward(b + 1)
    for v in range(2 * cycles, n):
        even[v], odd[v] = forward(v + 1), forward(v + 1)

    return ArrivalInstance(n=n, origin=rng.randbelow(n), succ_even=even, succ_odd=odd)


def generate(spec):
    rng = XorShift64Star(spec.seed)
    if spec.family is Family.RANDOM_TERMINATING:
        return _random_terminating(spec.n, rng)
    if spec.family is Family.LAYERED_CHAIN:
        return _layered_chain(spec.n, rng)
    if spec.family is Family.LONG_RUN_COUNTER:
        return _long_run_counter(spec.n, rng)
    return _two_cycle_grid(spec.n, rng, spec.cycles)


def generate_corpus(families, sizes, count=1, seed=0):
    """(label, instance) for every family, size and draw"""
    for family in cast_list(families):
        for n in cast_list(sizes):
            for i in range(count):
                spec = GeneratorSpec(family, int(n), seed=seed + i)
                yield spec.label, spec.generate()
