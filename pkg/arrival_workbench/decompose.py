import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from arrival_workbench.core import (
    DESTINATIONS,
    backward_distances,
    require_terminating,
    validate_vertex_set,
)
from arrival_workbench.utils import default

# layers


@dataclass(frozen=True)
class LayerDecomposition:
    layers: tuple
    dist: dict

    @property
    def ell(self):
        return len(self.layers) - 1

    @property
    def sizes(self):
        return tuple(len(layer) for layer in self.layers)


def layer_decomposition(instance):
    require_terminating(instance)
    dist = backward_distances(instance, DESTINATIONS)
    ell = max(dist[v] for v in instance.vertices)

    layers = [set() for _ in range(ell + 1)]
    for v, d in dist.items():
        layers[d].add(v)
    return LayerDecomposition(layers=tuple(map(frozenset, layers)), dist=dist)


def set_radius(instance, members):
    """max over V minus `members` of the distance to members and destinations"""
    require_terminating(instance)
    members = validate_vertex_set(instance, members)
    dist = backward_distances(instance, DESTINATIONS + members)
    excluded = set(members)
    return max((dist[v] for v in instance.vertices if v not in excluded), default=0)


# phi sets


def as_fraction(phi):
    if isinstance(phi, Fraction):
        value = phi
    elif isinstance(phi, float):
        value = Fraction(repr(phi))
    elif isinstance(phi, int) and not isinstance(phi, bool):
        value = Fraction(phi)
    else:
        value = Fraction(str(phi).strip())

    if not 0 < value < 1:
        raise ValueError(f"phi must lie strictly between 0 and 1, got {phi}")
    return value


def default_phi(n):
    """sqrt(3) / sqrt(2n), as a nearby rational kept inside (0, 1)"""
    value = Fraction(math.sqrt(3 / (2 * n))).limit_denominator(1000)
    return min(value, Fraction(999, 1000))


@dataclass(frozen=True)
class PhiSet:
    members: tuple
    phi: Fraction
    certified_radius: int
    n: int
    layers: LayerDecomposition

    @property
    def size_limit(self):
        return float(self.phi * (self.n + 2))

    @property
    def radius_limit(self):
        return math.log2(self.n + 2) / float(self.phi)

    def size_bound_holds(self):
        return len(self.members) * self.phi.denominator <= self.phi.numerator * (self.n + 2)

    def radius_bound_holds(self):
        # radius <= log2(n + 2) / phi  <=>  2^(radius * num) <= (n + 2)^den
        num, den = self.phi.numerator, self.phi.denominator
        return 2 ** (self.certified_radius * num) <= (self.n + 2) ** den


def compute_phi_set(instance, phi=None):
    phi = as_fraction(default(phi, default_phi(instance.n)))
    num, den = phi.numerator, phi.denominator
    layers = layer_decomposition(instance)

    chosen = []
    accumulated = len(layers.layers[0])
    for layer in layers.layers[1:]:
        if len(layer) * den < num * accumulated:
            chosen.extend(layer)
            accumulated = 0
        accumulated += len(layer)

    members = tuple(sorted(chosen))
    return PhiSet(
        members=members,
        phi=phi,
        certified_radius=set_radius(instance, members),
        n=instance.n,
        layers=layers,
    )


# acyclicity


def induced_graph(instance, excluded=()):
    """digraph on proper vertices minus `excluded`, destinations and yard dropped"""
    excluded = set(excluded)
    graph = nx.DiGraph()
    graph.add_nodes_from(v for v in instance.vertices if v not in excluded)
    for v in graph.nodes:
        for head in (instance.succ_even[v], instance.succ_odd[v]):
            if head in graph:
                graph.add_edge(v, head)
    return graph


def _is_acyclic(graph):
    return nx.number_of_selfloops(graph) == 0 and nx.is_directed_acyclic_graph(graph)


def topological_order(instance, members=()):
    """lowest-index-first topological order of V minus members, None if cyclic"""
    graph = induced_graph(instance, validate_vertex_set(instance, members))
    if not _is_acyclic(graph):
        return None
    return tuple(nx.lexicographical_topological_sort(graph))


# feedback vertex sets


def _cyclic_core(graph):
    keep = set()
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            keep |= component
    keep |= set(nx.nodes_with_selfloops(graph))
    return graph.subgraph(keep).copy()


def shortest_cycle(graph):
    best = None
    for source in sorted(graph.nodes):
        parent = {source: None}
        queue = deque([source])
        found = None
        while queue and found is None:
            u = queue.popleft()
            for head in sorted(graph.successors(u)):
                if head == source:
                    found = u
                    break
                if head not in parent:
                    parent[head] = u
                    queue.append(head)
        if found is None:
            continue

        cycle = []
        u = found
        while u is not None:
            cycle.append(u)
            u = parent[u]
        cycle.reverse()
        if best is None or len(cycle) < len(best):
            best = cycle
            if len(best) == 1:
                break
    return best


def _disjoint_cycle_count(graph):
    graph = graph.copy()
    count = 0
    while True:
        cycle = shortest_cycle(graph)
        if cycle is None:
            return count
        count += 1
        graph.remove_nodes_from(cycle)


def feedback_vertex_set(instance, k_max):
    """minimum FVS of the switch graph restricted to V, lowest-index among ties; None above k_max"""
    assert k_max >= 0, "k_max must be non-negative"
    best = None
    seen = set()

    def better(candidate):
        return best is None or (len(candidate), candidate) < (len(best), best)

    def search(graph, chosen):
        nonlocal best
        if chosen in seen:
            return
        seen.add(chosen)

        core = _cyclic_core(graph)
        if core.number_of_nodes() == 0:
            candidate = tuple(sorted(chosen))
            if better(candidate):
                best = candidate
            return

        limit = k_max if best is None else len(best)
        if len(chosen) + _disjoint_cycle_count(core) > limit:
            return

        for v in sorted(shortest_cycle(core)):
            search(core.subgraph(set(core.nodes) - {v}).copy(), chosen | {v})

    search(induced_graph(instance), frozenset())

    if best is None:
        return None
    assert topological_order(instance, best) is not None, "feedback vertex set left a cycle"
    return best
