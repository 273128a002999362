"""Exhaustive reference solvers for small instances."""
import itertools
import logging
import math
from functools import lru_cache
from typing import FrozenSet, List, NamedTuple, Optional, Tuple

from subtour_routing.config import config
from subtour_routing.exceptions import InfeasibleInstanceError, OracleLimitError
from subtour_routing.models.schema import (ExplicitMetric, Instance, OracleResult,
                                           Schedule, Vertex, VertexKind)
from subtour_routing.services.evaluation import (schedule_cost, schedule_delay,
                                                 validate_schedule)
from subtour_routing.services.transforms import caterpillar, min_delay
from subtour_routing.utils import leq_tol

logger = logging.getLogger(__name__)

def brute_force_min_delay(instance: Instance) -> OracleResult:
    """Minimum delay over every caterpillar with bifurcations at the root.

    Some minimum-delay schedule always has this shape, so the result is the
    global minimum. The first permutation attaining it wins.
    """
    limit = config.oracle_max_delay_items
    if instance.n > limit:
        raise OracleLimitError(f"Delay oracle is limited to {limit} items, got {instance.n}")

    best_value: Optional[float] = None
    best_schedule: Optional[Schedule] = None
    for order in itertools.permutations(sorted(instance.item_ids)):
        schedule = caterpillar(instance, order)
        value = schedule_delay(instance, schedule)
        if best_value is None or value < best_value:
            best_value, best_schedule = value, schedule

    return OracleResult(
        best_value=best_value,
        best_schedule=best_schedule,
        search_space_size=math.factorial(instance.n),
    )

def brute_force_delay_lower_bound(instance: Instance, max_items: int = 10) -> float:
    """Best subset bound, maximized over every nonempty item subset."""
    if instance.n > max_items:
        raise OracleLimitError(f"Subset enumeration is limited to {max_items} items, got {instance.n}")
    n = instance.n
    distances = {p: instance.root_distance(p) for p in instance.item_ids}
    best = -math.inf
    for size in range(1, n + 1):
        for subset in itertools.combinations(instance.item_ids, size):
            bound = min(distances[q] + instance.delta + min(size, n - 1) for q in subset)
            best = max(best, bound)
    return best

class _Shape(NamedTuple):
    """A subtree shape with its aggregated delay and cost terms."""
    tree: tuple     # ("item", id, child) or ("aux", loc, left, right)
    top: int        # location of the entry vertex
    reach: float    # largest item delay measured from arrival at the entry vertex
    travel: float
    leaves: int

def _enumerate_shapes(instance: Instance) -> List[_Shape]:
    """All proper subtrees over the full item set, aux vertices at any metric point."""
    metric: ExplicitMetric = instance.metric
    dist = metric.dist
    delta = instance.delta
    points = range(len(metric.points))
    items = sorted(instance.item_ids)
    loc = {p: instance.item_location(p) for p in items}

    @lru_cache(maxsize=None)
    def shapes(subset: FrozenSet[str]) -> Tuple[_Shape, ...]:
        found = []
        # An item at the top, continuing into the rest
        for p in sorted(subset):
            rest = subset - {p}
            if not rest:
                found.append(_Shape(("item", p, None), loc[p], delta, 0.0, 1))
                continue
            for child in shapes(rest):
                arc = dist[loc[p]][child.top]
                found.append(_Shape(
                    ("item", p, child.tree), loc[p],
                    delta + arc + child.reach, arc + child.travel, child.leaves,
                ))
        # A bifurcation at the top; the part holding the smallest id comes first
        if len(subset) >= 2:
            ordered = sorted(subset)
            anchor, others = ordered[0], ordered[1:]
            for size in range(0, len(others)):
                for extra in itertools.combinations(others, size):
                    left_set = frozenset((anchor, *extra))
                    right_set = subset - left_set
                    handover = min(len(left_set), len(right_set))
                    for left in shapes(left_set):
                        for right in shapes(right_set):
                            for point in points:
                                arc_l = dist[point][left.top]
                                arc_r = dist[point][right.top]
                                found.append(_Shape(
                                    ("aux", point, left.tree, right.tree), point,
                                    handover + max(arc_l + left.reach, arc_r + right.reach),
                                    arc_l + arc_r + left.travel + right.travel,
                                    left.leaves + right.leaves,
                                ))
        return tuple(found)

    return list(shapes(frozenset(items)))

def _shape_schedule(instance: Instance, tree: tuple) -> Schedule:
    """Materialize a shape below the root, ids assigned in preorder."""
    vertices: List[Vertex] = []
    ids = itertools.count(1)

    def build(node: tuple) -> int:
        vid = next(ids)
        if node[0] == "item":
            _, item_id, child = node
            children = (build(child),) if child is not None else ()
            vertices.append(Vertex(id=vid, kind=VertexKind.ITEM, item_id=item_id,
                                   loc=instance.item_location(item_id), children=children))
        else:
            _, point, left, right = node
            children = (build(left), build(right))
            vertices.append(Vertex(id=vid, kind=VertexKind.AUX, loc=point, children=children))
        return vid

    top = build(tree)
    root = Vertex(id=0, kind=VertexKind.ROOT, loc=instance.root, children=(top,))
    ordered = sorted(vertices, key=lambda v: v.id)
    return Schedule(vertices=(root, *ordered), root=0)

def brute_force_min_cost(instance: Instance) -> OracleResult:
    """Minimum cost over every proper schedule meeting the deadline.

    Aux vertices may sit at any point of the explicit metric, which makes the
    search exact for finite metrics.

    Raises:
        OracleLimitError: for too many items or a non-explicit metric
        InfeasibleInstanceError: if no schedule meets the deadline
    """
    limit = config.oracle_max_cost_items
    if instance.n > limit:
        raise OracleLimitError(f"Cost oracle is limited to {limit} items, got {instance.n}")
    if not isinstance(instance.metric, ExplicitMetric):
        raise OracleLimitError("Cost oracle needs an explicit metric; continuous placement is not enumerable")

    dist = instance.metric.dist
    shapes = _enumerate_shapes(instance)
    best_key = None
    best_tree = None
    for shape in shapes:
        arc = dist[instance.root][shape.top]
        delay = arc + shape.reach
        if not leq_tol(delay, instance.deadline, config.tolerance):
            continue
        cost = arc + shape.travel + instance.sigma * shape.leaves
        key = (cost, repr(shape.tree))
        if best_key is None or key < best_key:
            best_key, best_tree = key, shape.tree

    if best_tree is None:
        raise InfeasibleInstanceError(min_delay(instance), instance.deadline)

    schedule = _shape_schedule(instance, best_tree)
    report = validate_schedule(instance, schedule)
    if not report.ok:
        raise RuntimeError(f"Cost oracle built an invalid schedule: {report.codes()}")
    delay = schedule_delay(instance, schedule)
    if not leq_tol(delay, instance.deadline, config.tolerance):
        raise RuntimeError(f"Cost oracle optimum has delay {delay!r} above the deadline")

    logger.debug(f"Cost oracle searched {len(shapes)} shapes over {instance.n} items")
    return OracleResult(
        best_value=schedule_cost(instance, schedule).total,
        best_schedule=schedule,
        search_space_size=len(shapes),
    )
