"""Exact evaluation, validation and normalization of schedules."""
import logging
import math
from collections import Counter
from typing import Dict, List, Tuple

from subtour_routing.models.schema import (CostBreakdown, Instance, Location, Metric,
                                           Schedule, ValidationReport, Vertex,
                                           VertexKind, Violation)

logger = logging.getLogger(__name__)

# Violations that make a schedule something other than an arborescence covering every item
STRUCTURAL_CODES = frozenset({
    "duplicate_vertex_id",
    "missing_root",
    "root_count",
    "root_kind",
    "unknown_child",
    "repeated_child",
    "arc_into_root",
    "multiple_parents",
    "unreachable",
    "item_without_id",
    "unknown_item",
    "item_not_covered",
    "item_duplicated",
})

def metric_distance(metric: Metric, a: Location, b: Location) -> float:
    """Distance between two locations of a metric."""
    return metric.distance(a, b)

def preorder(schedule: Schedule) -> List[int]:
    """Vertex ids reachable from the root, parents before children.

    Raises:
        ValueError: if a vertex is reached twice or a child does not exist
    """
    order: List[int] = []
    seen = set()
    stack = [schedule.root]
    while stack:
        vid = stack.pop()
        if vid in seen:
            raise ValueError(f"Schedule is not an arborescence: vertex {vid} reached twice")
        seen.add(vid)
        order.append(vid)
        # Reversed so the first child is visited first
        stack.extend(reversed(schedule.vertex(vid).children))
    return order

def subtree_item_counts(schedule: Schedule) -> Dict[int, int]:
    """Number of item vertices in the subtree of every reachable vertex."""
    counts: Dict[int, int] = {}
    for vid in reversed(preorder(schedule)):
        v = schedule.vertex(vid)
        own = 1 if v.kind == VertexKind.ITEM else 0
        counts[vid] = own + sum(counts[c] for c in v.children)
    return counts

def validate_schedule(instance: Instance, schedule: Schedule) -> ValidationReport:
    """Report every violated schedule invariant.

    A schedule is valid iff it is a proper arborescence rooted at the root
    vertex that delivers every item of the instance exactly once.
    """
    violations: List[Violation] = []

    def add(code: str, message: str, vertex=None) -> None:
        violations.append(Violation(code=code, vertex=vertex, message=message))

    seen_ids = Counter(v.id for v in schedule.vertices)
    for vid, count in sorted(seen_ids.items()):
        if count > 1:
            add("duplicate_vertex_id", f"vertex id {vid} used {count} times", vid)

    if not schedule.has_vertex(schedule.root):
        add("missing_root", f"root vertex {schedule.root} does not exist")
        return ValidationReport(ok=False, violations=violations)

    roots = [v.id for v in schedule.vertices if v.kind == VertexKind.ROOT]
    if len(roots) != 1:
        add("root_count", f"expected exactly one root vertex, found {len(roots)}")
    root = schedule.vertex(schedule.root)
    if root.kind != VertexKind.ROOT:
        add("root_kind", f"root vertex has kind {root.kind.value}", root.id)
    if root.loc != instance.root:
        add("root_location", "root vertex is not at the instance root", root.id)

    parent_of: Dict[int, int] = {}
    for v in schedule.vertices:
        if not instance.metric.is_valid_location(v.loc):
            add("invalid_location", f"location {v.loc!r} is not valid for the metric", v.id)
        if len(set(v.children)) != len(v.children):
            add("repeated_child", "a child is listed twice", v.id)
        for c in v.children:
            if not schedule.has_vertex(c):
                add("unknown_child", f"child {c} does not exist", v.id)
            elif c == schedule.root:
                add("arc_into_root", "arc enters the root", v.id)
            elif c in parent_of and parent_of[c] != v.id:
                add("multiple_parents", f"vertex {c} has more than one parent", c)
            else:
                parent_of[c] = v.id

    reachable = set()
    stack = [schedule.root]
    while stack:
        vid = stack.pop()
        if vid in reachable:
            continue
        reachable.add(vid)
        stack.extend(c for c in schedule.vertex(vid).children if schedule.has_vertex(c))
    for v in schedule.vertices:
        if v.id not in reachable:
            add("unreachable", "vertex is not reachable from the root", v.id)

    known_items = set(instance.item_ids)
    covered: Counter = Counter()
    for v in schedule.vertices:
        if v.kind == VertexKind.ITEM:
            if v.item_id is None:
                add("item_without_id", "item vertex without item id", v.id)
            elif v.item_id not in known_items:
                add("unknown_item", f"item {v.item_id} is not in the instance", v.id)
            else:
                covered[v.item_id] += 1
                if v.loc != instance.item_location(v.item_id):
                    add("item_location", f"item {v.item_id} delivered at the wrong location", v.id)
        elif v.item_id is not None:
            add("item_id_on_non_item", f"{v.kind.value} vertex carries an item id", v.id)
    for item_id in instance.item_ids:
        if covered[item_id] == 0:
            add("item_not_covered", f"item not covered: {item_id}")
        elif covered[item_id] > 1:
            add("item_duplicated", f"item {item_id} delivered {covered[item_id]} times")

    leaves = bifurcations = 0
    for v in schedule.vertices:
        degree = len(v.children)
        leaves += degree == 0
        bifurcations += degree == 2
        if v.kind == VertexKind.ROOT and degree != 1:
            add("root_out_degree", f"root out-degree ≠ 1 (is {degree})", v.id)
        elif v.kind == VertexKind.ITEM and degree > 1:
            add("item_out_degree", f"item out-degree > 1 (is {degree})", v.id)
        elif v.kind == VertexKind.AUX and degree != 2:
            add("aux_out_degree", f"aux out-degree ≠ 2 (is {degree})", v.id)
    if leaves != bifurcations + 1:
        add("leaf_balance", f"{leaves} leaves but {bifurcations} bifurcation nodes")

    return ValidationReport(ok=not violations, violations=violations)

def _handover(v: Vertex, counts: Dict[int, int]) -> int:
    """Hand-over delay incurred at a vertex."""
    if len(v.children) < 2:
        return 0
    return min(counts[c] for c in v.children)

def vertex_delays(instance: Instance, schedule: Schedule) -> Dict[int, float]:
    """Delay of every reachable vertex, computed in one top-down pass.

    The delay of v is the travel along the root-v path, plus delta per item
    vertex on the path (v included), plus at every bifurcation node on the
    path (v included) the item count of its smaller child subtree.
    """
    counts = subtree_item_counts(schedule)
    metric = instance.metric
    root = schedule.vertex(schedule.root)
    terms: Dict[int, Tuple[float, int, int]] = {
        root.id: (0.0, 0, _handover(root, counts))
    }
    for vid in preorder(schedule):
        v = schedule.vertex(vid)
        travel, delivered, handed = terms[vid]
        for c in v.children:
            child = schedule.vertex(c)
            terms[c] = (
                travel + metric.distance(v.loc, child.loc),
                delivered + (child.kind == VertexKind.ITEM),
                handed + _handover(child, counts),
            )
    return {
        vid: travel + instance.delta * delivered + handed
        for vid, (travel, delivered, handed) in terms.items()
    }

def vertex_delay(instance: Instance, schedule: Schedule, v: int) -> float:
    """Delay of a single vertex."""
    if not schedule.has_vertex(v):
        raise ValueError(f"Unknown vertex: {v}")
    delays = vertex_delays(instance, schedule)
    if v not in delays:
        raise ValueError(f"Vertex {v} is not reachable from the root")
    return delays[v]

def schedule_delay(instance: Instance, schedule: Schedule) -> float:
    """Maximum delay over all item vertices."""
    delays = vertex_delays(instance, schedule)
    return max(
        delays[v.id] for v in schedule.vertices
        if v.kind == VertexKind.ITEM and v.id in delays
    )

def schedule_cost(instance: Instance, schedule: Schedule) -> CostBreakdown:
    """Travel cost, vehicle count and setup cost of a schedule."""
    metric = instance.metric
    travel = math.fsum(
        metric.distance(schedule.vertex(a).loc, schedule.vertex(b).loc)
        for a, b in schedule.arcs()
    )
    vehicles = sum(1 for v in schedule.vertices if not v.children)
    setup = instance.sigma * vehicles
    return CostBreakdown(
        travel=travel,
        setup=setup,
        total=travel + setup,
        vehicle_count=vehicles,
    )

def normalize_root(schedule: Schedule) -> Schedule:
    """Give the root out-degree 1 by inserting a co-located aux vertex below it."""
    root = schedule.vertex(schedule.root)
    if len(root.children) < 2:
        return schedule
    anchor = Vertex(
        id=schedule.next_id(),
        kind=VertexKind.AUX,
        loc=root.loc,
        children=root.children,
    )
    vertices = [
        v.model_copy(update={"children": (anchor.id,)}) if v.id == root.id else v
        for v in schedule.vertices
    ]
    vertices.append(anchor)
    return Schedule(vertices=tuple(vertices), root=schedule.root)

def shortcut(instance: Instance, schedule: Schedule) -> Schedule:
    """Remove superfluous non-item vertices until the schedule is proper.

    Non-item vertices without children are deleted, and non-root non-item
    vertices with a single child are spliced out by connecting their parent
    directly to the child. Travel cost never increases on a metric.

    Raises:
        ValueError: if the input is not an arborescence covering all items,
            or cannot be made proper by splicing alone
    """
    report = validate_schedule(instance, schedule)
    structural = [v for v in report.violations if v.code in STRUCTURAL_CODES]
    if structural:
        details = "; ".join(v.message for v in structural)
        raise ValueError(f"Input is not an arborescence covering all items: {details}")

    children = {v.id: list(v.children) for v in schedule.vertices}
    parent = schedule.parents()
    removed = set()
    changed = True
    while changed:
        changed = False
        order = preorder(_rebuild(schedule, children, removed))
        for vid in reversed(order):
            v = schedule.vertex(vid)
            if vid == schedule.root or v.kind == VertexKind.ITEM:
                continue
            kids = children[vid]
            if len(kids) > 1:
                continue
            p = parent[vid]
            slot = children[p].index(vid)
            if kids:
                # Splice: the parent adopts the only child in the same slot
                children[p][slot] = kids[0]
                parent[kids[0]] = p
            else:
                del children[p][slot]
            removed.add(vid)
            changed = True

    result = normalize_root(_rebuild(schedule, children, removed))
    final = validate_schedule(instance, result)
    if not final.ok:
        raise ValueError(
            f"Shortcut cannot make the schedule proper: {', '.join(final.codes())}"
        )
    logger.debug(f"Shortcut removed {len(removed)} vertices")
    return result

def _rebuild(schedule: Schedule, children: Dict[int, List[int]], removed: set) -> Schedule:
    """Schedule with the given children lists, dropping removed vertices."""
    return Schedule(
        vertices=tuple(
            v.model_copy(update={"children": tuple(children[v.id])})
            for v in schedule.vertices
            if v.id not in removed
        ),
        root=schedule.root,
    )
