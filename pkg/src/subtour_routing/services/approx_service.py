"""The bicriteria approximation pipeline.

Tour splitting cuts a Hamiltonian root-to-farthest-item path, derived from a
minimum spanning tree, into groups of bounded length and item count. The
groups hang off a caterpillar at the root (the two-level schedule), and
vehicle merging chains up to m deliveries per vehicle.
"""
import itertools
import logging
import math
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from subtour_routing.config import config
from subtour_routing.exceptions import InfeasibleInstanceError
from subtour_routing.models.schema import (DeadlineConditions, Grouping, Instance,
                                           LowerBounds, Schedule, SolveReport,
                                           Vertex, VertexKind)
from subtour_routing.services.bounds import (cost_lower_bound, deadline_conditions,
                                             distance_matrix, mst_tree)
from subtour_routing.services.evaluation import schedule_cost, schedule_delay, shortcut
from subtour_routing.services.transforms import min_delay
from subtour_routing.utils import leq_tol, safe_ratio

logger = logging.getLogger(__name__)

def _walk_order(tree: nx.Graph, target: int) -> List[int]:
    """Shortcut of the Euler walk from node 0 to target over the doubled tree.

    Edges off the 0-target path appear twice in the multigraph, so only 0 and
    target have odd degree and the Euler path runs between them. A path edge
    is crossed once, which finishes every subtree hanging off the path before
    the walk moves on. Nodes are kept at their first visit, except target
    which closes the walk.
    """
    path = nx.shortest_path(tree, 0, target)
    on_path = {frozenset(edge) for edge in zip(path, path[1:])}
    graph = nx.MultiGraph()
    graph.add_nodes_from(sorted(tree.nodes))
    for u, v in sorted(tuple(sorted(edge)) for edge in tree.edges):
        graph.add_edge(u, v)
        if frozenset((u, v)) not in on_path:
            graph.add_edge(u, v)

    order = [0]
    seen = {0, target}
    for _, node in nx.eulerian_path(graph, source=0):
        if node not in seen:
            seen.add(node)
            order.append(node)
    order.append(target)
    return order

def split_tour(instance: Instance, epsilon: float) -> Grouping:
    """Partition the items into path-connected groups ordered by remoteness.

    Walking the Hamiltonian path from its first item, an edge joins the
    current group unless the group would exceed length epsilon*deadline or
    hold more than 1 + epsilon*deadline items.
    """
    if epsilon <= 0:
        raise ValueError(f"Epsilon must be positive, got {epsilon}")

    items = instance.item_ids
    remote = {p: instance.root_distance(p) for p in items}
    far_item = min(items, key=lambda p: (-remote[p], p))
    far_node = items.index(far_item) + 1

    dist = distance_matrix(instance)
    tree = mst_tree(instance)
    walk = _walk_order(tree, far_node)
    hamiltonian_length = math.fsum(dist[a, b] for a, b in zip(walk, walk[1:]))
    sequence = walk[1:]

    budget = epsilon * instance.deadline
    components: List[List[int]] = [[sequence[0]]]
    lengths: List[float] = [0.0]
    kept: List[float] = []
    for prev, cur in zip(sequence, sequence[1:]):
        edge = float(dist[prev, cur])
        if lengths[-1] + edge > budget or len(components[-1]) + 1 > 1 + budget:
            components.append([cur])
            lengths.append(0.0)
        else:
            components[-1].append(cur)
            lengths[-1] += edge
            kept.append(edge)

    groups = [[items[node - 1] for node in comp] for comp in components]
    remoteness = [max(remote[p] for p in group) for group in groups]
    # Stable sort keeps the traversal order among equally remote groups
    ranked = sorted(range(len(groups)), key=lambda i: remoteness[i])

    logger.debug(f"Split {instance.n} items into {len(groups)} groups (epsilon={epsilon})")
    return Grouping(
        groups=[groups[i] for i in ranked],
        remoteness=[remoteness[i] for i in ranked],
        path_lengths=[lengths[i] for i in ranked],
        epsilon=epsilon,
        far_item=far_item,
        far_distance=remote[far_item],
        hamiltonian_path=[items[node - 1] for node in sequence],
        hamiltonian_length=hamiltonian_length,
        forest_length=math.fsum(kept),
    )

def _check_grouping(instance: Instance, grouping: Grouping) -> None:
    """Raise ValueError unless the groups partition the instance's items."""
    grouped = grouping.ordered_items()
    if any(not group for group in grouping.groups):
        raise ValueError("Grouping contains an empty group")
    if sorted(grouped) != sorted(instance.item_ids):
        raise ValueError("Grouping does not partition the instance's items")

def _group_caterpillar(instance: Instance, group: Sequence[str],
                       ids: Iterator[int]) -> Tuple[int, List[Vertex]]:
    """Sub-caterpillar of one group; returns its entry vertex id and its vertices.

    The t-th bifurcation sits at the t-th item and splits that item off by a
    zero-length arc; the spine follows the group's path order.
    """
    locs = [instance.item_location(p) for p in group]
    g = len(group)
    if g == 1:
        vid = next(ids)
        return vid, [Vertex(id=vid, kind=VertexKind.ITEM, item_id=group[0], loc=locs[0])]

    spine = [next(ids) for _ in range(g - 1)]
    leaves = [next(ids) for _ in range(g)]
    vertices = []
    for t in range(g - 1):
        if t < g - 2:
            children = (spine[t + 1], leaves[t])
        else:
            children = (leaves[g - 1], leaves[g - 2])
        vertices.append(Vertex(id=spine[t], kind=VertexKind.AUX, loc=locs[t], children=children))
    vertices.extend(
        Vertex(id=vid, kind=VertexKind.ITEM, item_id=p, loc=loc)
        for vid, p, loc in zip(leaves, group, locs)
    )
    return spine[0], vertices

def build_two_level(instance: Instance, grouping: Grouping) -> Schedule:
    """Two-level schedule: a top path of bifurcations at the root carrying one sub-caterpillar per group.

    The top path r, r_q, ..., r_2 lies at the root location. Group i hangs
    off r_i for i >= 3 and groups 1 and 2 both hang off r_2, so the most
    remote group splits off first.
    """
    _check_grouping(instance, grouping)
    q = grouping.group_count
    ids = itertools.count(1)
    top = {i: next(ids) for i in range(q, 1, -1)}

    entries: Dict[int, int] = {}
    group_vertices: List[Vertex] = []
    for i, group in enumerate(grouping.groups, start=1):
        entries[i], vertices = _group_caterpillar(instance, group, ids)
        group_vertices.extend(vertices)

    if q == 1:
        root = Vertex(id=0, kind=VertexKind.ROOT, loc=instance.root, children=(entries[1],))
        return Schedule(vertices=(root, *group_vertices), root=0)

    top_vertices = []
    for i in range(q, 1, -1):
        children = (top[i - 1], entries[i]) if i >= 3 else (entries[1], entries[2])
        top_vertices.append(
            Vertex(id=top[i], kind=VertexKind.AUX, loc=instance.root, children=children)
        )
    root = Vertex(id=0, kind=VertexKind.ROOT, loc=instance.root, children=(top[q],))
    return Schedule(vertices=(root, *top_vertices, *group_vertices), root=0)

def chain_limit(instance: Instance, epsilon: float) -> int:
    """Maximum number of deliveries per merged vehicle, 1 + floor(epsilon*deadline/delta)."""
    return 1 + math.floor(epsilon * instance.deadline / instance.delta)

def merge_vehicles(instance: Instance, two_level: Schedule, grouping: Grouping,
                   epsilon: float) -> Schedule:
    """Merged schedule: chain up to m consecutive items of a group on one vehicle.

    Within a group, every item whose offset is not a multiple of m is moved
    below its predecessor; bifurcations left with fewer than two children
    are then shortcut.
    """
    _check_grouping(instance, grouping)
    if epsilon <= 0:
        raise ValueError(f"Epsilon must be positive, got {epsilon}")
    m = chain_limit(instance, epsilon)

    item_vertex = {v.item_id: v.id for v in two_level.vertices if v.kind == VertexKind.ITEM}
    if sorted(item_vertex) != sorted(instance.item_ids):
        raise ValueError("Schedule does not deliver the grouped items")
    children = {v.id: list(v.children) for v in two_level.vertices}
    parent = two_level.parents()

    for group in grouping.groups:
        vids = [item_vertex[p] for p in group]
        for t in range(1, len(vids)):
            if t % m == 0:
                continue
            vid, prev = vids[t], vids[t - 1]
            if children[prev]:
                raise ValueError(
                    f"Item vertex {prev} is not a leaf; schedule was not built from this grouping"
                )
            children[parent[vid]].remove(vid)
            children[prev].append(vid)
            parent[vid] = prev

    rewired = Schedule(
        vertices=tuple(v.model_copy(update={"children": tuple(children[v.id])})
                       for v in two_level.vertices),
        root=two_level.root,
    )
    return shortcut(instance, rewired)

def guarantee_checks(instance: Instance, epsilon: float, bounds: LowerBounds,
                     delay: float, travel: float, vehicles: int, cost: float,
                     tolerance: Optional[float] = None) -> Dict[str, bool]:
    """Evaluate the four certified inequalities of a final schedule."""
    tol = config.tolerance if tolerance is None else tolerance
    mst = bounds.mst
    return {
        "delay": leq_tol(delay, (1 + 4 * epsilon) * instance.deadline, tol),
        "travel": leq_tol(travel, (4 + 2 / epsilon) * mst, tol),
        "vehicles": leq_tol(vehicles, vehicle_bound(instance, epsilon, mst), tol),
        "cost": leq_tol(cost, (8 + 4 / epsilon) * bounds.cost_lb, tol),
    }

def vehicle_bound(instance: Instance, epsilon: float, mst: float) -> float:
    """Guaranteed vehicle count bound 1 + (2/epsilon)(MST + n*delta)/deadline."""
    return 1 + (2 / epsilon) * (mst + instance.n * instance.delta) / instance.deadline

def approx_schedule(instance: Instance, epsilon: float) -> SolveReport:
    """Run split_tour, build_two_level and merge_vehicles and certify the result.

    Raises:
        ValueError: if epsilon is not positive
        InfeasibleInstanceError: if no schedule meets the deadline
    """
    if epsilon <= 0:
        raise ValueError(f"Epsilon must be positive, got {epsilon}")
    fastest = min_delay(instance)
    if fastest > instance.deadline:
        raise InfeasibleInstanceError(fastest, instance.deadline)

    bounds = cost_lower_bound(instance)
    if instance.deadline > bounds.mst:
        logger.warning(
            f"Deadline {instance.deadline!r} exceeds MST {bounds.mst!r}; "
            "grouping bounds are certified on the final schedule only"
        )

    grouping = split_tour(instance, epsilon)
    two_level = build_two_level(instance, grouping)
    merged = merge_vehicles(instance, two_level, grouping, epsilon)

    delay = schedule_delay(instance, merged)
    cost = schedule_cost(instance, merged)
    checks = guarantee_checks(
        instance, epsilon, bounds, delay, cost.travel, cost.vehicle_count, cost.total
    )
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        logger.warning(f"Guarantee check failed: {', '.join(failed)}")
    logger.info(
        f"Solved {instance.n} items with epsilon={epsilon}: delay {delay!r}, "
        f"cost {cost.total!r}, {cost.vehicle_count} vehicles, {grouping.group_count} groups"
    )

    return SolveReport(
        schedule=merged,
        delay=delay,
        cost=cost,
        bounds=bounds,
        epsilon=epsilon,
        m=chain_limit(instance, epsilon),
        delay_ratio=safe_ratio(delay, instance.deadline),
        length_ratio=safe_ratio(cost.travel, bounds.mst),
        vehicle_bound=vehicle_bound(instance, epsilon, bounds.mst),
        cost_ratio=safe_ratio(cost.total, bounds.cost_lb),
        guarantees_ok=not failed,
        deadline=instance.deadline,
        group_count=grouping.group_count,
        two_level_delay=schedule_delay(instance, two_level),
        two_level_travel=schedule_cost(instance, two_level).travel,
        forest_length=grouping.forest_length,
        failed_guarantees=failed,
    )

def solve_with_slack(instance: Instance, slack: float) -> SolveReport:
    """Solve so that the delay stays within (1 + slack) times the deadline."""
    if slack <= 0:
        raise ValueError(f"Slack must be positive, got {slack}")
    return approx_schedule(instance, slack / 4)

class SolverService:
    """Service bundling feasibility, bounds and the approximation pipeline."""

    def __init__(self, epsilon: Optional[float] = None):
        """Initialize the service."""
        self.epsilon = config.default_epsilon if epsilon is None else epsilon

    def check(self, instance: Instance) -> Tuple[float, bool]:
        """Minimum achievable delay and whether it meets the deadline."""
        best = min_delay(instance)
        return best, best <= instance.deadline

    def bounds(self, instance: Instance) -> Tuple[LowerBounds, DeadlineConditions]:
        """Lower bounds and deadline conditions of an instance."""
        return cost_lower_bound(instance), deadline_conditions(instance)

    def solve(self, instance: Instance, epsilon: Optional[float] = None) -> SolveReport:
        """Run the approximation pipeline."""
        return approx_schedule(instance, self.epsilon if epsilon is None else epsilon)

    def solve_with_slack(self, instance: Instance, slack: float) -> SolveReport:
        """Run the pipeline with epsilon derived from a delay slack."""
        return solve_with_slack(instance, slack)
