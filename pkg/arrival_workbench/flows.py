import csv
import io
from collections.abc import Mapping
from dataclasses import dataclass

from arrival_workbench.core import (
    DEST_D,
    DEST_DBAR,
    DESTINATIONS,
    YARD,
    Slot,
    parse_vertex_token,
    validate_vertex_set,
    vertex_token,
)
from arrival_workbench.exceptions import DimensionMismatchException, ParseException
from arrival_workbench.utils import open_text

CSV_COLUMNS = ["tail", "slot", "head", "count"]


class EdgeFlow(Mapping):
    """x : E -> N0, keyed by Edge(tail, slot, head)"""

    def __init__(self, values):
        values = dict(values)
        for edge, value in values.items():
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(f"flow on {edge} must be a non-negative integer, got {value!r}")
        self._values = values
        self._by_slot = {(e.tail, e.slot): e for e in values}

    @classmethod
    def zeros(cls, graph):
        return cls({edge: 0 for edge in graph.edges})

    @classmethod
    def from_counts(cls, graph, counts):
        """counts keyed by (tail, slot); missing slots are zero"""
        return cls({edge: counts.get((edge.tail, edge.slot), 0) for edge in graph.edges})

    def __getitem__(self, edge):
        return self._values[edge]

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        body = ", ".join(
            f"({vertex_token(e.tail)},{e.slot.label},{vertex_token(e.head)}): {x}"
            for e, x in self._values.items()
        )
        return f"EdgeFlow({{{body}}})"

    def at(self, tail, slot):
        return self._values[self._by_slot[(tail, slot)]]

    def slot_map(self):
        return {(e.tail, e.slot): e.head for e in self._values}

    def total(self):
        return sum(self._values.values())


def balances(x):
    """(outflow, inflow) per vertex in one pass"""
    out, into = {}, {}
    for e, value in x.items():
        out[e.tail] = out.get(e.tail, 0) + value
        into[e.head] = into.get(e.head, 0) + value
    return out, into


def outflow(x, v):
    return sum(value for e, value in x.items() if e.tail == v)


def inflow(x, v):
    return sum(value for e, value in x.items() if e.head == v)


def flow_total(x):
    return sum(x.values())


def flow_leq(x, y):
    if set(x) != set(y):
        raise ValueError("flows are defined on different edge sets")
    return all(x[e] <= y[e] for e in x)


# verdicts


@dataclass(frozen=True)
class Verdict:
    valid: bool
    destination: object = None
    reason: str = None
    vertex: object = None

    @classmethod
    def invalid(cls, reason, vertex=None):
        return cls(False, None, reason, vertex)

    def __bool__(self):
        return self.valid

    def __str__(self):
        if self.valid:
            if self.destination is None:
                return "valid"
            return f"valid-to-{vertex_token(self.destination)}"
        where = f" at {vertex_token(self.vertex)}" if self.vertex is not None else ""
        return f"invalid: {self.reason}{where}"


def _expected_slots(instance):
    return {(e.tail, e.slot): e.head for e in instance.graph.edges}


def _check_common(instance, x, fixed_outflow):
    if x.slot_map() != _expected_slots(instance):
        return Verdict.invalid("flow slots do not match the instance's edges")

    out, into = balances(x)
    if out.get(YARD, 0) != 1:
        return Verdict.invalid(f"yard outflow is {out.get(YARD, 0)}, expected 1", YARD)

    for v in instance.vertices:
        out_v, in_v = out.get(v, 0), into.get(v, 0)
        if v in fixed_outflow:
            if out_v != fixed_outflow[v]:
                return Verdict.invalid(
                    f"outflow {out_v} differs from prescribed {fixed_outflow[v]}", v
                )
        elif out_v != in_v:
            return Verdict.invalid(
                f"flow conservation violated (inflow {in_v}, outflow {out_v})", v
            )

        difference = x.at(v, Slot.EVEN) - x.at(v, Slot.ODD)
        if difference not in (0, 1):
            return Verdict.invalid(
                f"switching behavior violated (even - odd = {difference})", v
            )
    return None


def check_switching_flow(instance, x):
    failure = _check_common(instance, x, {})
    if failure is not None:
        return failure

    _, into = balances(x)
    for t in DESTINATIONS:
        if into.get(t, 0) == 1:
            return Verdict(True, t)
    # conservation makes the destination inflows sum to one
    return Verdict.invalid("no destination absorbs the unit of flow")


def check_candidate_flow(instance, members, weights, x):
    members = validate_vertex_set(instance, members)
    weights = tuple(weights)
    if len(weights) != len(members):
        raise DimensionMismatchException(
            f"{len(weights)} weights given for a set of {len(members)} vertices"
        )
    failure = _check_common(instance, x, dict(zip(members, weights)))
    return failure if failure is not None else Verdict(True)


def flow_destination(x):
    _, into = balances(x)
    if into.get(DEST_D, 0) == 1 and into.get(DEST_DBAR, 0) == 0:
        return DEST_D
    if into.get(DEST_DBAR, 0) == 1 and into.get(DEST_D, 0) == 0:
        return DEST_DBAR
    return None


# certificate files


def write_flow_csv(x, file):
    with open_text(file, "w") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for e, value in x.items():
            writer.writerow([vertex_token(e.tail), e.slot.label, vertex_token(e.head), value])


def flow_to_csv_text(x):
    buffer = io.StringIO()
    write_flow_csv(x, buffer)
    return buffer.getvalue()


def read_flow_csv(file, instance):
    """missing rows count as zero; every present row must name an edge of the instance"""
    expected = _expected_slots(instance)
    counts = {}
    with open_text(file) as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_COLUMNS:
            raise ParseException(f"expected header {','.join(CSV_COLUMNS)}", 1)
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if len(row) != 4:
                raise ParseException("expected 4 columns", line)
            tail_tok, slot_tok, head_tok, count_tok = (cell.strip() for cell in row)
            tail, head = parse_vertex_token(tail_tok), parse_vertex_token(head_tok)
            try:
                slot = Slot.from_label(slot_tok)
            except KeyError:
                raise ParseException(f"unknown slot {slot_tok}", line) from None
            key = (tail, slot)
            if tail is None or key not in expected:
                raise ParseException(f"no edge ({tail_tok}, {slot_tok}) in the instance", line)
            if head != expected[key]:
                raise ParseException(
                    f"edge ({tail_tok}, {slot_tok}) leads to {vertex_token(expected[key])}, not {head_tok}",
                    line,
                )
            if key in counts:
                raise ParseException(f"duplicate row for ({tail_tok}, {slot_tok})", line)
            if not count_tok.isdigit():
                raise ParseException(f"count must be a non-negative integer, got {count_tok}", line)
            counts[key] = int(count_tok)

    return EdgeFlow.from_counts(instance.graph, counts)
