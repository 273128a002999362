"""Schedule transformations and the fastest-caterpillar feasibility algorithm."""
import logging
from typing import Dict, List, Optional, Sequence

from subtour_routing.exceptions import FlipPreconditionError
from subtour_routing.models.schema import (Instance, Location, Schedule, Vertex,
                                           VertexKind)
from subtour_routing.services.evaluation import schedule_delay, subtree_item_counts

logger = logging.getLogger(__name__)

def _replace_children(schedule: Schedule, updates: Dict[int, tuple],
                      extra: Sequence[Vertex] = ()) -> Schedule:
    """Copy of a schedule with some children tuples replaced and vertices appended."""
    vertices = [
        v.model_copy(update={"children": updates[v.id]}) if v.id in updates else v
        for v in schedule.vertices
    ]
    vertices.extend(extra)
    return Schedule(vertices=tuple(vertices), root=schedule.root)

def leafication(schedule: Schedule, y: int) -> Schedule:
    """Turn an out-degree-1 vertex into a leaf.

    A new bifurcation y' at the location of y takes the place of y below its
    parent x, with y and the former child z of y as its children.
    """
    if y == schedule.root:
        raise ValueError("Cannot leafify the root")
    vertex = schedule.vertex(y)
    if len(vertex.children) != 1:
        raise ValueError(
            f"Leafication needs out-degree 1, vertex {y} has {len(vertex.children)}"
        )
    x = schedule.parents().get(y)
    if x is None:
        raise ValueError(f"Vertex {y} has no parent")

    z = vertex.children[0]
    split = Vertex(
        id=schedule.next_id(),
        kind=VertexKind.AUX,
        loc=vertex.loc,
        children=(y, z),
    )
    parent_children = tuple(split.id if c == y else c for c in schedule.vertex(x).children)
    return _replace_children(
        schedule,
        {x: parent_children, y: ()},
        extra=[split],
    )

def heavy_child(schedule: Schedule, v: int, counts: Optional[Dict[int, int]] = None) -> int:
    """Child of v with the most items in its subtree, lowest id on ties."""
    if counts is None:
        counts = subtree_item_counts(schedule)
    children = schedule.vertex(v).children
    if not children:
        raise ValueError(f"Vertex {v} is a leaf")
    return min(children, key=lambda c: (-counts[c], c))

def heavy_path(schedule: Schedule) -> List[int]:
    """Root-to-leaf path that always descends into the heavy child."""
    counts = subtree_item_counts(schedule)
    path = [schedule.root]
    while schedule.vertex(path[-1]).children:
        path.append(heavy_child(schedule, path[-1], counts))
    return path

def flip(schedule: Schedule, x: int) -> Schedule:
    """Move the bifurcation x onto the heavy path.

    With w the parent of x on the heavy path, h its heavy child and y_l the
    lighter child of x, the arcs (w,h) and (x,y_l) become (w,y_l) and (x,h).

    Raises:
        FlipPreconditionError: naming the first precondition that fails
    """
    vertex = schedule.vertex(x)
    if len(vertex.children) != 2:
        raise FlipPreconditionError("x is not a bifurcation node", x)
    w = schedule.parents().get(x)
    if w is None:
        raise FlipPreconditionError("x has no parent", x)

    path = heavy_path(schedule)
    if w not in path:
        raise FlipPreconditionError("parent of x is not on the heavy path", x)
    if len(schedule.vertex(w).children) != 2:
        raise FlipPreconditionError("parent of x is not a bifurcation node", x)
    h = path[path.index(w) + 1]
    if h == x:
        raise FlipPreconditionError("x is already on the heavy path", x)
    if schedule.vertex(h).loc != vertex.loc:
        raise FlipPreconditionError("heavy child of the parent is not co-located with x", x)

    counts = subtree_item_counts(schedule)
    y_h = heavy_child(schedule, x, counts)
    y_l = next(c for c in vertex.children if c != y_h)

    return _replace_children(schedule, {
        w: tuple(y_l if c == h else c for c in schedule.vertex(w).children),
        x: tuple(h if c == y_l else c for c in vertex.children),
    })

def caterpillar(instance: Instance, order: Sequence[str],
                bifurcation_location: Optional[Location] = None) -> Schedule:
    """Build the caterpillar that splits off order[0] first and order[-1] last.

    Bifurcations form a path below the root, all at bifurcation_location
    (the root location by default). Bifurcation j has the next bifurcation and
    the leaf of order[j-1] as children; the last one carries the last two items.
    """
    if sorted(order) != sorted(instance.item_ids):
        raise ValueError("Caterpillar order must be a permutation of the items")
    spine_loc = instance.root if bifurcation_location is None else bifurcation_location
    if not instance.metric.is_valid_location(spine_loc):
        raise ValueError(f"Invalid bifurcation location: {spine_loc!r}")

    n = len(order)
    leaf_ids = list(range(n, 2 * n))
    leaves = [
        Vertex(id=vid, kind=VertexKind.ITEM, item_id=item_id,
               loc=instance.item_location(item_id))
        for vid, item_id in zip(leaf_ids, order)
    ]
    if n == 1:
        root = Vertex(id=0, kind=VertexKind.ROOT, loc=instance.root, children=(leaf_ids[0],))
        return Schedule(vertices=(root, *leaves), root=0)

    spine = []
    for j in range(1, n):
        if j < n - 1:
            children = (j + 1, leaf_ids[j - 1])
        else:
            children = (leaf_ids[n - 2], leaf_ids[n - 1])
        spine.append(Vertex(id=j, kind=VertexKind.AUX, loc=spine_loc, children=children))
    root = Vertex(id=0, kind=VertexKind.ROOT, loc=instance.root, children=(1,))
    return Schedule(vertices=(root, *spine, *leaves), root=0)

def is_caterpillar(schedule: Schedule) -> bool:
    """Check that only the root has out-degree 1 and the bifurcations form a path below it."""
    if any(len(v.children) == 1 and v.id != schedule.root for v in schedule.vertices):
        return False
    spine = {v.id for v in schedule.vertices if len(v.children) == 2}
    current, reached = schedule.root, 0
    while True:
        below = [c for c in schedule.vertex(current).children if c in spine]
        if len(below) > 1:
            return False
        if not below:
            return reached == len(spine)
        current = below[0]
        reached += 1

def fastest_caterpillar(instance: Instance) -> Schedule:
    """The caterpillar with all bifurcations at the root that attains the minimum delay.

    Items are sorted by root distance (ties by id); the farthest item splits
    off first and the two closest end up on the two deepest leaves.
    """
    ascending = sorted(instance.item_ids, key=lambda p: (instance.root_distance(p), p))
    return caterpillar(instance, list(reversed(ascending)))

def min_delay(instance: Instance) -> float:
    """Minimum achievable delay of any schedule for the instance."""
    return schedule_delay(instance, fastest_caterpillar(instance))

def is_feasible(instance: Instance) -> bool:
    """Check whether some schedule meets the deadline."""
    best = min_delay(instance)
    feasible = best <= instance.deadline
    logger.debug(f"Minimum delay {best!r} against deadline {instance.deadline!r}: "
                 f"{'feasible' if feasible else 'infeasible'}")
    return feasible
