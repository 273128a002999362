"""Deterministic builders for the worked examples and random test corpora."""
import logging
from typing import List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from subtour_routing.config import config
from subtour_routing.models.schema import (Euclidean2DMetric, ExplicitMetric,
                                           Figure1Params, GeneratorParams, Instance,
                                           Item, RandomEuclideanParams,
                                           RandomExplicitParams, Schedule,
                                           SteinerParams, TightParams, Vertex,
                                           VertexKind)
from subtour_routing.services.transforms import min_delay

logger = logging.getLogger(__name__)

# Edge lengths of the seven-item example tree
FIGURE1_EDGES: List[Tuple[str, str, float]] = [
    ("r", "s1", 8), ("s1", "s2", 2), ("s2", "p1", 1), ("p1", "p2", 2),
    ("p2", "p3", 1), ("s2", "p7", 2), ("s1", "p4", 1), ("p4", "s3", 3),
    ("s3", "p5", 2), ("s3", "p6", 1),
]
FIGURE1_POINTS = ["r", "s1", "s2", "s3", "p1", "p2", "p3", "p4", "p5", "p6", "p7"]
FIGURE1_DELTA = 4.0

def closure_metric(graph: nx.Graph, names: Sequence[str]) -> ExplicitMetric:
    """Shortest-path closure of an edge-weighted graph as an explicit metric."""
    if len(names) > config.max_explicit_points:
        raise ValueError(
            f"Explicit metric with {len(names)} points exceeds the limit of "
            f"{config.max_explicit_points}"
        )
    index = {name: i for i, name in enumerate(names)}
    dist = np.full((len(names), len(names)), np.inf)
    for source, lengths in nx.all_pairs_dijkstra_path_length(graph, weight="weight"):
        for target, length in lengths.items():
            dist[index[source], index[target]] = length
    if not np.all(np.isfinite(dist)):
        raise ValueError("Graph is not connected")
    # Path sums taken in opposite directions can differ in the last bit
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    return ExplicitMetric(points=list(names), dist=dist.tolist())

def gen_figure1(sigma: float = 0.0, deadline: float = 30.0) -> Tuple[Instance, Schedule]:
    """The seven-item example and its drawn schedule (delay 30, travel 23, 4 vehicles)."""
    graph = nx.Graph()
    graph.add_weighted_edges_from(FIGURE1_EDGES)
    metric = closure_metric(graph, FIGURE1_POINTS)
    at = {name: i for i, name in enumerate(FIGURE1_POINTS)}

    instance = Instance(
        metric=metric,
        root=at["r"],
        items=[Item(id=f"p{i}", loc=at[f"p{i}"]) for i in range(1, 8)],
        delta=FIGURE1_DELTA,
        sigma=sigma,
        deadline=deadline,
    )

    # Vertex ids equal point indices
    def aux(name: str, *children: str) -> Vertex:
        return Vertex(id=at[name], kind=VertexKind.AUX, loc=at[name],
                      children=tuple(at[c] for c in children))

    def item(name: str, *children: str) -> Vertex:
        return Vertex(id=at[name], kind=VertexKind.ITEM, item_id=name, loc=at[name],
                      children=tuple(at[c] for c in children))

    schedule = Schedule(
        vertices=(
            Vertex(id=at["r"], kind=VertexKind.ROOT, loc=at["r"], children=(at["s1"],)),
            aux("s1", "s2", "p4"),
            aux("s2", "p1", "p7"),
            aux("s3", "p5", "p6"),
            item("p1", "p2"),
            item("p2", "p3"),
            item("p3"),
            item("p4", "s3"),
            item("p5"),
            item("p6"),
            item("p7"),
        ),
        root=at["r"],
    )
    return instance, schedule

def _check_tight(k: int, epsilon: float) -> None:
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if epsilon <= 0:
        raise ValueError(f"Epsilon must be positive, got {epsilon}")
    if k <= 1 + epsilon:
        raise ValueError(f"k must exceed 1 + epsilon, got k={k}, epsilon={epsilon}")

def tight_example_graph(k: int, epsilon: float) -> nx.Graph:
    """Root, hub s and k rows of k points; unit edges from the root, light edges along the rows.

    Every non-root point is joined to the root at weight 1. The hub starts
    each row, and consecutive row points are joined, at weight epsilon/(k-1).
    """
    _check_tight(k, epsilon)
    light = epsilon / (k - 1)
    graph = nx.Graph()
    rows = [[f"p{i}_{j}" for j in range(1, k + 1)] for i in range(1, k + 1)]
    for point in ["s", *(p for row in rows for p in row)]:
        graph.add_edge("r", point, weight=1.0)
    for row in rows:
        graph.add_edge("s", row[0], weight=light)
        for a, b in zip(row, row[1:]):
            graph.add_edge(a, b, weight=light)
    return graph

def tight_mst_length(k: int, epsilon: float) -> float:
    """Closed-form MST length 1 + k^2 epsilon / (k - 1) of the tight family."""
    _check_tight(k, epsilon)
    return 1 + k * k * epsilon / (k - 1)

def tight_ratio(k: int, epsilon: float) -> float:
    """Closed-form ratio k(1+epsilon) / (1 + k^2 epsilon/(k-1)); tends to 1 + 1/epsilon."""
    return k * (1 + epsilon) / tight_mst_length(k, epsilon)

def gen_tight(k: int, epsilon: float, delta: float = 1.0, sigma: float = 0.0,
              slack: float = 1.0, deadline: Optional[float] = None) -> Instance:
    """The almost-tight family as an instance; every non-root point is an item.

    Without an explicit deadline, the deadline is min_delay * slack.
    """
    graph = tight_example_graph(k, epsilon)
    names = ["r", "s", *(f"p{i}_{j}" for i in range(1, k + 1) for j in range(1, k + 1))]
    metric = closure_metric(graph, names)
    items = [Item(id=name, loc=i) for i, name in enumerate(names) if name != "r"]
    instance = Instance(
        metric=metric, root=0, items=items, delta=delta, sigma=sigma,
        deadline=deadline if deadline is not None else 1.0,
    )
    if deadline is None:
        instance = instance.with_deadline(min_delay(instance) * slack)
    logger.debug(f"Generated tight example k={k}, epsilon={epsilon}, {instance.n} items")
    return instance

def steiner_spacing(n: int, epsilon: float) -> float:
    """Distance from the hub s to every item, (epsilon n^2 + 2n) / (2 - epsilon)."""
    return (epsilon * n * n + 2 * n) / (2 - epsilon)

def steiner_deadline(n: int, epsilon: float) -> float:
    """Deadline (2n^2 + 4n - epsilon n) / (2 - epsilon) of the Steiner example."""
    return (2 * n * n + 4 * n - epsilon * n) / (2 - epsilon)

def steiner_cost_ratio(n: int, epsilon: float) -> float:
    """Cost of serving from the root over serving from the hub, (2n^3 + 2n^2) / (epsilon n^3 + (4 - epsilon) n^2)."""
    return (2 * n ** 3 + 2 * n ** 2) / (epsilon * n ** 3 + (4 - epsilon) * n ** 2)

def gen_steiner(n: int, epsilon: float) -> Instance:
    """Items far from the root but close to a non-item hub s.

    Distances: r-s n^2, s-p a, p-p 2a and r-p n^2 + a with a the hub spacing.
    The deadline is tight: equal to the minimum delay.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not 0 < epsilon < 0.5:
        raise ValueError(f"Epsilon must lie in (0, 1/2), got {epsilon}")

    a = steiner_spacing(n, epsilon)
    far = float(n * n)
    names = ["r", "s", *(f"p{i}" for i in range(1, n + 1))]
    size = len(names)
    dist = [[0.0] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            pair = {names[i][0], names[j][0]}
            if pair == {"r", "s"}:
                dist[i][j] = far
            elif pair == {"s", "p"}:
                dist[i][j] = a
            elif pair == {"p"}:
                dist[i][j] = 2 * a
            else:
                dist[i][j] = far + a

    deadline = steiner_deadline(n, epsilon)
    instance = Instance(
        metric=ExplicitMetric(points=names, dist=dist),
        root=0,
        items=[Item(id=names[i], loc=i) for i in range(2, size)],
        delta=1.0,
        sigma=0.0,
        deadline=deadline,
    )
    # The formula equals the minimum delay; rounding must not make it infeasible
    fastest = min_delay(instance)
    if fastest > deadline:
        instance = instance.with_deadline(fastest)
    return instance

def _random_points(params: RandomEuclideanParams, count: int) -> np.ndarray:
    """Uniform points in [0, box]^2 from PCG64 seeded with params.seed; the root is the first draw."""
    rng = np.random.default_rng(params.seed)
    return rng.uniform(0.0, params.box, size=(count, 2))

def gen_random_euclidean(params: RandomEuclideanParams) -> Instance:
    """Random planar instance with deadline min_delay * slack."""
    coords = _random_points(params, params.n + 1)
    points = [(float(x), float(y)) for x, y in coords]
    instance = Instance(
        metric=Euclidean2DMetric(),
        root=points[0],
        items=[Item(id=f"p{i}", loc=points[i]) for i in range(1, params.n + 1)],
        delta=params.delta,
        sigma=params.sigma,
        deadline=1.0,
    )
    return instance.with_deadline(min_delay(instance) * params.slack)

def gen_random_explicit(params: RandomExplicitParams) -> Instance:
    """Random planar points, plus optional non-item points, as an explicit metric."""
    count = params.n + 1 + params.extra_points
    if count > config.max_explicit_points:
        raise ValueError(f"Explicit metric with {count} points exceeds the limit")
    coords = [(float(x), float(y)) for x, y in _random_points(params, count)]
    names = ["r", *(f"p{i}" for i in range(1, params.n + 1)),
             *(f"x{i}" for i in range(1, params.extra_points + 1))]
    dist = Euclidean2DMetric().pairwise(coords).tolist()
    instance = Instance(
        metric=ExplicitMetric(points=names, dist=dist),
        root=0,
        items=[Item(id=names[i], loc=i) for i in range(1, params.n + 1)],
        delta=params.delta,
        sigma=params.sigma,
        deadline=1.0,
    )
    return instance.with_deadline(min_delay(instance) * params.slack)

def generate(params: GeneratorParams) -> Instance:
    """Build the instance described by a generator spec."""
    if isinstance(params, Figure1Params):
        instance, _ = gen_figure1(params.sigma, params.deadline)
        return instance
    if isinstance(params, TightParams):
        return gen_tight(params.k, params.epsilon, delta=params.delta, sigma=params.sigma,
                         slack=params.slack, deadline=params.deadline)
    if isinstance(params, SteinerParams):
        return gen_steiner(params.n, params.epsilon)
    # RandomExplicitParams subclasses RandomEuclideanParams
    if isinstance(params, RandomExplicitParams):
        return gen_random_explicit(params)
    if isinstance(params, RandomEuclideanParams):
        return gen_random_euclidean(params)
    raise ValueError(f"Unknown generator family: {params!r}")
