"""Common test fixtures for the subtour routing toolkit."""
from typing import List, Optional, Sequence, Tuple

import pytest

from subtour_routing.config import config
from subtour_routing.models.schema import (Euclidean2DMetric, ExplicitMetric, Instance,
                                           Item, RandomEuclideanParams,
                                           RandomExplicitParams, Schedule, Vertex,
                                           VertexKind)
from subtour_routing.services.generators import (gen_figure1, gen_random_euclidean,
                                                 gen_random_explicit)

def line_instance(positions: Sequence[float], delta: float = 1.0, sigma: float = 0.0,
                  deadline: float = 100.0) -> Instance:
    """Items on the x axis with the root at the origin."""
    items = [Item(id=f"p{i + 1}", loc=(float(x), 0.0)) for i, x in enumerate(positions)]
    return Instance(metric=Euclidean2DMetric(), root=(0.0, 0.0), items=items,
                    delta=delta, sigma=sigma, deadline=deadline)

def explicit_instance(dist: List[List[float]], item_points: Sequence[int],
                      delta: float = 1.0, sigma: float = 0.0, deadline: float = 100.0,
                      names: Optional[List[str]] = None) -> Instance:
    """Explicit metric with the root at point 0 and one item per listed point."""
    names = names or [f"x{i}" for i in range(len(dist))]
    metric = ExplicitMetric(points=names, dist=dist)
    items = [Item(id=f"p{i + 1}", loc=point) for i, point in enumerate(item_points)]
    return Instance(metric=metric, root=0, items=items, delta=delta, sigma=sigma,
                    deadline=deadline)

def chain_schedule(instance: Instance) -> Schedule:
    """One vehicle delivering every item in input order."""
    ids = list(range(1, instance.n + 1))
    vertices = [Vertex(id=0, kind=VertexKind.ROOT, loc=instance.root, children=(1,))]
    for vid, item in zip(ids, instance.items):
        children = (vid + 1,) if vid < instance.n else ()
        vertices.append(Vertex(id=vid, kind=VertexKind.ITEM, item_id=item.id,
                               loc=item.loc, children=children))
    return Schedule(vertices=tuple(vertices), root=0)

@pytest.fixture
def figure1() -> Tuple[Instance, Schedule]:
    """The seven-item example with sigma = 2."""
    return gen_figure1(sigma=2.0)

@pytest.fixture
def random_instances() -> List[Instance]:
    """A small seeded corpus of planar instances."""
    return [
        gen_random_euclidean(RandomEuclideanParams(n=n, seed=seed, slack=slack))
        for seed, (n, slack) in enumerate([(2, 1.0), (3, 1.5), (5, 1.0), (7, 3.0),
                                           (9, 1.0), (12, 1.5), (20, 1.0), (40, 3.0)])
    ]

@pytest.fixture
def small_explicit_instances() -> List[Instance]:
    """Explicit instances small enough for the cost oracle."""
    return [
        gen_random_explicit(RandomExplicitParams(n=n, seed=seed, extra_points=extra,
                                                 sigma=sigma, box=10.0))
        for seed, (n, extra, sigma) in enumerate([(1, 0, 1.0), (2, 1, 0.0), (3, 1, 2.0),
                                                  (3, 0, 0.5), (4, 0, 1.0)])
    ]

@pytest.fixture
def tolerance(monkeypatch):
    """Pin the guarantee tolerance for the test."""
    monkeypatch.setattr(config, "tolerance", 1e-9)
    return 1e-9
