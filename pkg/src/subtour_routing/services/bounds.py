"""MST-based lower bounds on deadline, schedule length, vehicle count and cost."""
import logging
import math
from typing import List, Tuple

import networkx as nx
import numpy as np

from subtour_routing.models.schema import DeadlineConditions, Instance, Location, LowerBounds

logger = logging.getLogger(__name__)

def location_table(instance: Instance) -> List[Location]:
    """Root location followed by the item locations in input order."""
    return [instance.root] + [item.loc for item in instance.items]

def distance_matrix(instance: Instance) -> np.ndarray:
    """Pairwise distances between root (index 0) and items (indices 1..n)."""
    return instance.metric.pairwise(location_table(instance))

def complete_graph(dist: np.ndarray) -> nx.Graph:
    """Complete weighted graph over a distance matrix, zero-length edges included."""
    graph = nx.Graph()
    size = dist.shape[0]
    graph.add_nodes_from(range(size))
    for i in range(size):
        for j in range(i + 1, size):
            graph.add_edge(i, j, weight=float(dist[i, j]))
    return graph

def mst_tree(instance: Instance) -> nx.Graph:
    """Minimum spanning tree over node 0 (root) and nodes 1..n (items)."""
    return nx.minimum_spanning_tree(complete_graph(distance_matrix(instance)), algorithm="kruskal")

def mst_length(instance: Instance) -> Tuple[float, List[Tuple[int, int]]]:
    """Length and edges of a minimum spanning tree on root and items.

    Node 0 is the root and node i is the i-th item in input order.
    """
    tree = mst_tree(instance)
    edges = sorted((min(u, v), max(u, v)) for u, v in tree.edges())
    length = math.fsum(w for _, _, w in tree.edges(data="weight"))
    return length, edges

def delay_lower_bound(instance: Instance) -> float:
    """Largest subset bound: max over j of (j-th largest root distance + delta + min(j, n-1))."""
    n = instance.n
    distances = sorted((instance.root_distance(p) for p in instance.item_ids), reverse=True)
    return max(
        d + instance.delta + min(j, n - 1)
        for j, d in enumerate(distances, start=1)
    )

def cost_lower_bound(instance: Instance) -> LowerBounds:
    """Lower bounds for any schedule meeting the deadline."""
    mst, _ = mst_length(instance)
    length_lb = mst / 2
    vehicles_lb = (length_lb + instance.n * instance.delta) / instance.deadline
    # Every schedule uses at least one vehicle
    vehicles = max(1, math.ceil(vehicles_lb))
    return LowerBounds(
        mst=mst,
        delay_lb=delay_lower_bound(instance),
        length_lb=length_lb,
        vehicles_lb=vehicles_lb,
        cost_lb=length_lb + instance.sigma * vehicles,
    )

def deadline_conditions(instance: Instance) -> DeadlineConditions:
    """Necessary conditions on the deadline of a feasible instance."""
    subset = delay_lower_bound(instance)
    count = float(instance.n)
    farthest = max(instance.root_distance(p) for p in instance.item_ids)
    return DeadlineConditions(
        subset_bound=subset,
        count_bound=count,
        distance_bound=farthest,
        binding=max(subset, count, farthest),
    )
