"""Data models for the subtour routing toolkit."""
import math
from enum import Enum
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import (BaseModel, Field, PrivateAttr, StrictInt, field_validator,
                      model_validator)

# An index into an explicit metric's point table, or a planar coordinate pair
Location = Union[StrictInt, Tuple[float, float]]

class ExplicitMetric(BaseModel):
    """A finite metric given by a symmetric distance matrix."""
    type: Literal["explicit"] = "explicit"
    points: List[str] = Field(..., description="Names of the metric points")
    dist: List[List[float]] = Field(..., description="Symmetric n x n distance matrix")

    model_config = {
        "frozen": True,
        "extra": "forbid"
    }

    @model_validator(mode="after")
    def validate_matrix(self) -> "ExplicitMetric":
        """Check shape, zero diagonal, symmetry and the triangle inequality."""
        from subtour_routing.config import config
        size = len(self.points)
        if size == 0:
            raise ValueError("Explicit metric needs at least one point")
        if len(self.dist) != size or any(len(row) != size for row in self.dist):
            raise ValueError(f"Distance matrix must be {size}x{size}")
        matrix = np.asarray(self.dist, dtype=float)
        if not np.all(np.isfinite(matrix)):
            raise ValueError("Distances must be finite")
        if np.any(matrix < 0):
            raise ValueError("Distances must be non-negative")
        if np.any(np.diag(matrix) != 0):
            raise ValueError("Distance of a point to itself must be 0")
        if not np.array_equal(matrix, matrix.T):
            raise ValueError("Distance matrix must be symmetric")
        scale = max(float(matrix.max()), 1.0) * config.tolerance
        for j in range(size):
            via_j = matrix[:, j][:, None] + matrix[j, :][None, :]
            bad = np.argwhere(matrix > via_j + scale)
            if len(bad):
                i, k = (int(v) for v in bad[0])
                raise ValueError(
                    f"Triangle inequality violated: d({self.points[i]},{self.points[k]}) > "
                    f"d({self.points[i]},{self.points[j]}) + d({self.points[j]},{self.points[k]})"
                )
        return self

    def is_valid_location(self, loc: Location) -> bool:
        """Check that a location is an index into the point table."""
        return isinstance(loc, int) and 0 <= loc < len(self.points)

    def distance(self, a: Location, b: Location) -> float:
        """Distance between two point indices."""
        if not (self.is_valid_location(a) and self.is_valid_location(b)):
            raise ValueError(f"Location out of range for explicit metric: {a!r}, {b!r}")
        return self.dist[a][b]

    def pairwise(self, locations: List[Location]) -> np.ndarray:
        """Distance matrix between the given locations."""
        index = np.asarray(locations, dtype=int)
        return np.asarray(self.dist, dtype=float)[np.ix_(index, index)]

    def is_listed(self, loc: Location) -> bool:
        """Every valid index names a point of the table."""
        return self.is_valid_location(loc)

    def label(self, loc: Location) -> str:
        """Human readable name of a location."""
        return self.points[loc]

class Euclidean2DMetric(BaseModel):
    """The Euclidean plane; locations are coordinate pairs."""
    type: Literal["euclidean2d"] = "euclidean2d"
    points: List[Tuple[float, float]] = Field(
        default_factory=list,
        description="Optional table of the coordinates root and items may use"
    )

    model_config = {
        "frozen": True,
        "extra": "forbid"
    }

    @field_validator("points")
    @classmethod
    def validate_points(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        """Validate that tabled coordinates are finite."""
        for point in v:
            if not all(math.isfinite(c) for c in point):
                raise ValueError(f"Point table holds a non-finite coordinate: {point!r}")
        return v

    def is_valid_location(self, loc: Location) -> bool:
        """Check that a location is a finite coordinate pair."""
        return (
            isinstance(loc, tuple)
            and len(loc) == 2
            and all(math.isfinite(c) for c in loc)
        )

    def distance(self, a: Location, b: Location) -> float:
        """Planar Euclidean distance."""
        if not (self.is_valid_location(a) and self.is_valid_location(b)):
            raise ValueError(f"Invalid planar location: {a!r}, {b!r}")
        return math.hypot(a[0] - b[0], a[1] - b[1])

    def pairwise(self, locations: List[Location]) -> np.ndarray:
        """Distance matrix between the given locations."""
        coords = np.asarray(locations, dtype=float).reshape(-1, 2)
        diff = coords[:, None, :] - coords[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    def is_listed(self, loc: Location) -> bool:
        """Check a location against the point table; without a table any point is listed."""
        return not self.points or loc in self.points

    def label(self, loc: Location) -> str:
        """Human readable name of a location."""
        text = f"({loc[0]:g}, {loc[1]:g})"
        if loc in self.points:
            return f"#{self.points.index(loc)} {text}"
        return text

Metric = Annotated[Union[ExplicitMetric, Euclidean2DMetric], Field(discriminator="type")]

class Item(BaseModel):
    """An item and its destination."""
    id: str = Field(..., description="Unique item identifier")
    loc: Location = Field(..., description="Destination of the item")

    model_config = {
        "frozen": True,
        "extra": "forbid"
    }

class Instance(BaseModel):
    """A routing instance: metric, root, items and the delay/cost parameters."""
    metric: Metric
    root: Location = Field(..., description="Location of the root (depot)")
    items: List[Item] = Field(..., description="Items to deliver")
    delta: float = Field(..., ge=1.0, description="Delivery time per item")
    sigma: float = Field(..., ge=0.0, description="Setup cost per vehicle")
    deadline: float = Field(..., gt=0.0, description="Deadline for every item")

    model_config = {
        "frozen": True,
        "extra": "forbid"
    }

    _item_locs: Dict[str, Location] = PrivateAttr(default_factory=dict)

    @field_validator("items")
    @classmethod
    def validate_items(cls, v: List[Item]) -> List[Item]:
        """Validate that items are present and ids unique."""
        if not v:
            raise ValueError("An instance needs at least one item")
        ids = [item.id for item in v]
        if len(set(ids)) != len(ids):
            raise ValueError("Item ids must be unique")
        return v

    @model_validator(mode="after")
    def validate_locations(self) -> "Instance":
        """Validate that root and item locations fit the metric."""
        if not self.metric.is_valid_location(self.root):
            raise ValueError(f"Invalid root location: {self.root!r}")
        for item in self.items:
            if not self.metric.is_valid_location(item.loc):
                raise ValueError(f"Invalid location for item {item.id}: {item.loc!r}")
        unlisted = [repr(loc) for loc in (self.root, *(item.loc for item in self.items))
                    if not self.metric.is_listed(loc)]
        if unlisted:
            raise ValueError(f"Locations missing from the point table: {', '.join(unlisted)}")
        return self

    def model_post_init(self, __context) -> None:
        """Index item locations by id."""
        self._item_locs = {item.id: item.loc for item in self.items}

    @property
    def n(self) -> int:
        """Number of items."""
        return len(self.items)

    @property
    def item_ids(self) -> List[str]:
        """Item ids in input order."""
        return [item.id for item in self.items]

    def item_location(self, item_id: str) -> Location:
        """Destination of an item."""
        try:
            return self._item_locs[item_id]
        except KeyError:
            raise ValueError(f"Unknown item: {item_id}")

    def root_distance(self, item_id: str) -> float:
        """Distance from the root to an item's destination."""
        return self.metric.distance(self.root, self.item_location(item_id))

    def with_deadline(self, deadline: float) -> "Instance":
        """Copy of the instance with another deadline."""
        return self.model_copy(update={"deadline": deadline})

class VertexKind(str, Enum):
    """Kinds of schedule vertices."""
    ROOT = "root"    # Start of the initial vehicle
    ITEM = "item"    # Delivery of one item
    AUX = "aux"      # Hand-over point (bifurcation)

class Vertex(BaseModel):
    """A vertex of a schedule arborescence."""
    id: int = Field(..., description="Vertex identifier")
    kind: VertexKind
    item_id: Optional[str] = Field(default=None, description="Delivered item (item vertices)")
    loc: Location = Field(..., description="Location of the vertex")
    children: Tuple[int, ...] = Field(
        default=(),
        description="Ordered children: continuing tour first, split-off subtour second"
    )

    model_config = {
        "frozen": True,
        "extra": "forbid"
    }

class Schedule(BaseModel):
    """A schedule: an arborescence of vertices rooted at the root vertex.

    Structural invariants are not enforced here; see validate_schedule.
    """
    vertices: Tuple[Vertex, ...]
    root: int

    model_config = {
        "frozen": True,
        "extra": "forbid"
    }

    _by_id: Dict[int, Vertex] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        """Index vertices by id."""
        self._by_id = {v.id: v for v in self.vertices}

    def vertex(self, vertex_id: int) -> Vertex:
        """Get a vertex by id."""
        try:
            return self._by_id[vertex_id]
        except KeyError:
            raise ValueError(f"Unknown vertex: {vertex_id}")

    def has_vertex(self, vertex_id: int) -> bool:
        """Check whether a vertex id exists."""
        return vertex_id in self._by_id

    def parents(self) -> Dict[int, int]:
        """Map each child id to its parent id."""
        return {c: v.id for v in self.vertices for c in v.children}

    def item_vertex(self, item_id: str) -> Vertex:
        """The vertex delivering an item."""
        for v in self.vertices:
            if v.kind == VertexKind.ITEM and v.item_id == item_id:
                return v
        raise ValueError(f"Item not in schedule: {item_id}")

    def next_id(self) -> int:
        """A fresh vertex id."""
        return max(self._by_id) + 1 if self._by_id else 0

    def arcs(self) -> List[Tuple[int, int]]:
        """All arcs (parent, child) in vertex order."""
        return [(v.id, c) for v in self.vertices for c in v.children]

class Violation(BaseModel):
    """A violated schedule invariant."""
    code: str = Field(..., description="Machine readable violation code")
    vertex: Optional[int] = Field(default=None, description="Offending vertex")
    message: str

    model_config = {"frozen": True}

class ValidationReport(BaseModel):
    """Outcome of validate_schedule."""
    ok: bool
    violations: List[Violation] = Field(default_factory=list)

    def codes(self) -> List[str]:
        """Violation codes in report order."""
        return [v.code for v in self.violations]

class CostBreakdown(BaseModel):
    """Travel and setup cost of a schedule."""
    travel: float
    setup: float
    total: float
    vehicle_count: int

    model_config = {"frozen": True}

class LowerBounds(BaseModel):
    """MST-based lower bounds for a feasible schedule."""
    mst: float = Field(..., description="Minimum spanning tree length on root and items")
    delay_lb: float = Field(..., description="Minimum achievable delay")
    length_lb: float = Field(..., description="Travel lower bound, mst/2")
    vehicles_lb: float = Field(..., description="Fractional vehicle lower bound")
    cost_lb: float = Field(..., description="Cost lower bound")

    model_config = {"frozen": True}

class DeadlineConditions(BaseModel):
    """Necessary conditions on the deadline of a feasible instance."""
    subset_bound: float = Field(..., description="Best subset bound over all item subsets")
    count_bound: float = Field(..., description="Number of items")
    distance_bound: float = Field(..., description="Largest root distance")
    binding: float = Field(..., description="Largest of the three")

    model_config = {"frozen": True}

class Grouping(BaseModel):
    """Items partitioned into path-connected groups ordered by remoteness."""
    groups: List[List[str]] = Field(..., description="Groups, each in path order")
    remoteness: List[float] = Field(..., description="Largest root distance per group")
    path_lengths: List[float] = Field(..., description="Internal path length per group")
    epsilon: float
    far_item: str = Field(..., description="Item at maximum root distance")
    far_distance: float
    hamiltonian_path: List[str] = Field(..., description="Items in root-to-far-item path order")
    hamiltonian_length: float = Field(..., description="Length of the root-to-far-item path")
    forest_length: float = Field(..., description="Total length of kept path edges")

    model_config = {"frozen": True}

    @property
    def group_count(self) -> int:
        """Number of groups."""
        return len(self.groups)

    def ordered_items(self) -> List[str]:
        """Items in group order."""
        return [p for group in self.groups for p in group]

class SolveReport(BaseModel):
    """Result of the approximation pipeline with its certified ratios."""
    schedule: Schedule
    delay: float
    cost: CostBreakdown
    bounds: LowerBounds
    epsilon: float
    m: int = Field(..., description="Maximum deliveries per merged vehicle")
    delay_ratio: float = Field(..., description="delay / deadline")
    length_ratio: float = Field(..., description="travel / MST")
    vehicle_bound: float = Field(..., description="Guaranteed vehicle count bound")
    cost_ratio: float = Field(..., description="cost / cost lower bound")
    guarantees_ok: bool
    deadline: float
    group_count: int
    two_level_delay: float
    two_level_travel: float
    forest_length: float
    failed_guarantees: List[str] = Field(default_factory=list)

class OracleResult(BaseModel):
    """Result of an exhaustive reference search."""
    best_value: float
    best_schedule: Schedule
    search_space_size: int

class Figure1Params(BaseModel):
    """The seven-item example schedule."""
    family: Literal["figure1"] = "figure1"
    sigma: float = Field(default=0.0, ge=0.0)
    deadline: float = Field(default=30.0, gt=0.0)

class TightParams(BaseModel):
    """The almost-tight family (root, hub and k paths of k items)."""
    family: Literal["tight"] = "tight"
    k: int = Field(..., ge=2)
    epsilon: float = Field(..., gt=0.0)
    delta: float = Field(default=1.0, ge=1.0)
    sigma: float = Field(default=0.0, ge=0.0)
    slack: float = Field(default=1.0, gt=0.0)
    deadline: Optional[float] = Field(default=None, gt=0.0)

class SteinerParams(BaseModel):
    """The example where subtours should start at a non-item point."""
    family: Literal["steiner"] = "steiner"
    n: int = Field(..., ge=2)
    epsilon: float = Field(..., gt=0.0, lt=0.5)

class RandomEuclideanParams(BaseModel):
    """Uniform random points in a square, seeded."""
    family: Literal["random_euclidean"] = "random_euclidean"
    n: int = Field(..., ge=1)
    seed: int = 0
    box: float = Field(default=100.0, gt=0.0)
    delta: float = Field(default=1.0, ge=1.0)
    sigma: float = Field(default=1.0, ge=0.0)
    slack: float = Field(default=1.0, gt=0.0)

class RandomExplicitParams(RandomEuclideanParams):
    """Random planar points materialized as an explicit metric."""
    family: Literal["random_explicit"] = "random_explicit"
    extra_points: int = Field(default=0, ge=0, description="Non-item candidate points")

GeneratorParams = Annotated[
    Union[Figure1Params, TightParams, SteinerParams, RandomEuclideanParams,
          RandomExplicitParams],
    Field(discriminator="family")
]

class RunRecord(BaseModel):
    """One benchmark run: an instance solved with one epsilon."""
    instance_id: str
    epsilon: float
    n: int = 0
    delay: float = 0.0
    deadline: float = 0.0
    travel: float = 0.0
    mst: float = 0.0
    vehicles: int = 0
    cost: float = 0.0
    cost_lb: float = 0.0
    delay_ratio: float = 0.0
    length_ratio: float = 0.0
    cost_ratio: float = 0.0
    guarantees_ok: bool = False
    wall_time: float = 0.0
    error: Optional[str] = None

    def ratios_consistent(self, tolerance: float = 1e-9) -> bool:
        """Check the stored ratios against the stored fields."""
        from subtour_routing.utils import safe_ratio
        if self.error is not None:
            return True
        expected = (
            safe_ratio(self.delay, self.deadline),
            safe_ratio(self.travel, self.mst),
            safe_ratio(self.cost, self.cost_lb),
        )
        stored = (self.delay_ratio, self.length_ratio, self.cost_ratio)
        return all(
            math.isclose(a, b, rel_tol=tolerance) or a == b
            for a, b in zip(expected, stored)
        )

class BenchSummary(BaseModel):
    """Aggregate over a benchmark table."""
    runs: int
    failures: int
    all_ok: bool
    max_delay_ratio: float
    max_length_ratio: float
    max_cost_ratio: float
    max_normalized_cost_ratio: float = Field(
        ..., description="Largest cost_ratio divided by its guarantee 8 + 4/epsilon"
    )

class BenchResult(BaseModel):
    """Records of a benchmark run and their summary."""
    records: List[RunRecord]
    summary: BenchSummary
