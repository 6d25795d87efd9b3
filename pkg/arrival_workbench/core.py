import re
from collections import deque, namedtuple
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from pathlib import Path

from arrival_workbench.exceptions import (
    InvalidInstanceException,
    NonTerminatingException,
    ParseException,
)

# vertices


class Sentinel(IntEnum):
    YARD = -1
    DEST_D = -2
    DEST_DBAR = -3


YARD = Sentinel.YARD
DEST_D = Sentinel.DEST_D
DEST_DBAR = Sentinel.DEST_DBAR
DESTINATIONS = (DEST_D, DEST_DBAR)

TOKENS = {YARD: "Y", DEST_D: "D0", DEST_DBAR: "D1"}
SENTINELS_BY_TOKEN = {token: sentinel for sentinel, token in TOKENS.items()}

INT_TOKEN = re.compile(r"^\d+$")


def vertex_token(v):
    if isinstance(v, Sentinel):
        return TOKENS[v]
    return str(v)


def parse_vertex_token(token):
    """int for proper vertices, a Sentinel for `Y`, `D0`, `D1`, otherwise None"""
    if token in SENTINELS_BY_TOKEN:
        return SENTINELS_BY_TOKEN[token]
    if INT_TOKEN.match(token):
        return int(token)
    return None


def as_vertex(v):
    if isinstance(v, Sentinel):
        return v
    if isinstance(v, str):
        parsed = parse_vertex_token(v)
        if parsed is None:
            raise InvalidInstanceException(f"not a vertex: {v!r}")
        return parsed
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidInstanceException(f"not a vertex: {v!r}")
    if v < 0:
        try:
            return Sentinel(v)
        except ValueError:
            raise InvalidInstanceException(f"not a vertex: {v!r}") from None
    return int(v)


def is_proper(v, n):
    return not isinstance(v, Sentinel) and 0 <= v < n


# edges


class Slot(IntEnum):
    EVEN = 0
    ODD = 1
    YARD = 2

    @property
    def label(self):
        return self.name.lower()

    @property
    def other(self):
        assert self is not Slot.YARD, "the yard edge has no partner slot"
        return Slot(1 - self)

    @classmethod
    def from_label(cls, label):
        return cls[label.strip().upper()]


Edge = namedtuple("Edge", ["tail", "slot", "head"])


# instance


@dataclass(frozen=True)
class ArrivalInstance:
    n: int
    origin: int
    succ_even: tuple
    succ_odd: tuple

    def __post_init__(self):
        object.__setattr__(self, "origin", as_vertex(self.origin))
        object.__setattr__(self, "succ_even", tuple(map(as_vertex, self.succ_even)))
        object.__setattr__(self, "succ_odd", tuple(map(as_vertex, self.succ_odd)))
        self.validate()

    def validate(self):
        n = self.n
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise InvalidInstanceException(f"vertex count must be >= 1, got {n!r}")
        if not is_proper(self.origin, n):
            raise InvalidInstanceException(
                f"origin must be a proper vertex, got {vertex_token(self.origin)}"
            )
        for name, successors in (("even", self.succ_even), ("odd", self.succ_odd)):
            if len(successors) != n:
                raise InvalidInstanceException(
                    f"{name} successor map has {len(successors)} entries, expected {n}"
                )
            for v, s in enumerate(successors):
                if s is YARD:
                    raise InvalidInstanceException(
                        f"{name} successor of {v} is the yard"
                    )
                if not isinstance(s, Sentinel) and s >= n:
                    raise InvalidInstanceException(
                        f"{name} successor of {v} is out of range: {s}"
                    )

    @property
    def vertices(self):
        return range(self.n)

    def successor(self, v, slot):
        if slot is Slot.YARD:
            assert v is YARD, "only the yard owns the yard slot"
            return self.origin
        return self.succ_even[v] if slot is Slot.EVEN else self.succ_odd[v]

    @cached_property
    def graph(self):
        return build_switch_graph(self)

    @cached_property
    def terminating(self):
        return is_terminating(self)


# switch graph


@dataclass(frozen=True, eq=False)
class SwitchGraph:
    n: int
    edges: tuple
    out_edges: dict
    in_edges: dict

    def edge(self, tail, slot):
        return self.out_edges[tail][0 if tail is YARD else slot]

    def head(self, tail, slot):
        return self.edge(tail, slot).head

    def predecessors(self, v):
        """proper tails of edges entering v"""
        return [e.tail for e in self.in_edges.get(v, ()) if e.tail is not YARD]


def build_switch_graph(instance):
    yard_edge = Edge(YARD, Slot.YARD, instance.origin)
    edges = [yard_edge]
    out_edges = {YARD: (yard_edge,), DEST_D: (), DEST_DBAR: ()}

    for v in instance.vertices:
        even = Edge(v, Slot.EVEN, instance.succ_even[v])
        odd = Edge(v, Slot.ODD, instance.succ_odd[v])
        edges.extend((even, odd))
        out_edges[v] = (even, odd)

    in_edges = {v: [] for v in out_edges}
    for e in edges:
        in_edges[e.head].append(e)

    assert len(edges) == 2 * instance.n + 1
    return SwitchGraph(
        n=instance.n,
        edges=tuple(edges),
        out_edges=out_edges,
        in_edges={v: tuple(es) for v, es in in_edges.items()},
    )


def backward_distances(instance, targets):
    """shortest directed distance from every vertex that can reach `targets`"""
    graph = instance.graph
    dist = {}
    queue = deque()
    for t in targets:
        if t not in dist:
            dist[t] = 0
            queue.append(t)

    while queue:
        v = queue.popleft()
        for u in graph.predecessors(v):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def unreachable_vertices(instance):
    dist = backward_distances(instance, DESTINATIONS)
    return [v for v in instance.vertices if v not in dist]


def is_terminating(instance):
    return not unreachable_vertices(instance)


def require_terminating(instance):
    if instance.terminating:
        return
    stuck = unreachable_vertices(instance)
    shown = ", ".join(map(str, stuck[:8])) + (", ..." if len(stuck) > 8 else "")
    raise NonTerminatingException(f"no destination is reachable from vertices {shown}")


def validate_vertex_set(instance, members):
    members = tuple(as_vertex(v) for v in members)
    for v in members:
        if not is_proper(v, instance.n):
            raise InvalidInstanceException(
                f"set member {vertex_token(v)} is not a proper vertex"
            )
    if len(set(members)) != len(members):
        raise InvalidInstanceException(f"set {members} contains duplicates")
    return members


# text format

HEADER = ("arrival", "v1")


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            yield lineno, tokens


def _expect_keyword(lines, keyword):
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise ParseException(f"missing `{keyword}` line") from None
    if len(tokens) != 2 or tokens[0] != keyword:
        raise ParseException(f"expected `{keyword} <value>`", lineno)
    return lineno, tokens[1]


def parse_instance(text):
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            line = text.count(b"\n", 0, e.start) + 1
            raise ParseException(f"invalid UTF-8 byte {text[e.start]:#04x}", line) from None

    lines = _content_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise ParseException("empty input") from None
    if tuple(tokens) != HEADER:
        raise ParseException("expected header `arrival v1`", lineno)

    lineno, value = _expect_keyword(lines, "n")
    if not INT_TOKEN.match(value) or int(value) < 1:
        raise ParseException(f"vertex count must be a positive integer, got {value}", lineno)
    n = int(value)

    lineno, value = _expect_keyword(lines, "o")
    origin = parse_vertex_token(value)
    if origin is None:
        raise ParseException(f"bad origin token {value}", lineno)
    if not is_proper(origin, n):
        raise ParseException(f"origin must be a proper vertex, got {value}", lineno)

    succ_even, succ_odd = [None] * n, [None] * n
    for lineno, tokens in lines:
        if len(tokens) != 3:
            raise ParseException("expected `<vertex> <even> <odd>`", lineno)
        parsed = [parse_vertex_token(tok) for tok in tokens]
        for tok, v in zip(tokens, parsed):
            if v is None or v is YARD:
                raise ParseException(f"bad vertex token {tok}", lineno)
        v, even, odd = parsed
        if not is_proper(v, n):
            raise ParseException(f"vertex {tokens[0]} is out of range 0..{n - 1}", lineno)
        if succ_even[v] is not None:
            raise ParseException(f"duplicate line for vertex {v}", lineno)
        for s, tok in ((even, tokens[1]), (odd, tokens[2])):
            if not isinstance(s, Sentinel) and s >= n:
                raise ParseException(f"successor {tok} is out of range 0..{n - 1}", lineno)
        succ_even[v], succ_odd[v] = even, odd

    missing = [v for v in range(n) if succ_even[v] is None]
    if missing:
        raise ParseException(f"missing line for vertex {missing[0]}")

    return ArrivalInstance(n=n, origin=origin, succ_even=succ_even, succ_odd=succ_odd)


def serialize_instance(instance):
    lines = [" ".join(HEADER), f"n {instance.n}", f"o {instance.origin}"]
    for v in instance.vertices:
        even, odd = instance.succ_even[v], instance.succ_odd[v]
        lines.append(f"{v} {vertex_token(even)} {vertex_token(odd)}")
    return "\n".join(lines) + "\n"


def load_instance(path):
    return parse_instance(Path(path).read_bytes())


def save_instance(instance, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_instance(instance))
