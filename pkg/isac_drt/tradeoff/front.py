"""
Design grids and their sampled Pareto fronts.

A design grid is a finite list of pure strategies, each with a resource cost and
a performance value (smaller is better). The front records, for every distinct
cost level, the best performance reachable with at most that much resource.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import jax
import jax.numpy as jnp

from isac_drt.isac_drt import Config
from isac_drt.tradeoff.exceptions import EmptyDesignGridError, OffFrontAtomError

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()


@dataclass(slots=True, frozen=True)
class DesignEntry:
    design_id: Hashable
    cost: float
    perf: float


@dataclass(slots=True, frozen=True)
class DesignGrid:
    """
    Discretized pure strategy space

    Attributes
    ----------
    entries: Tuple[DesignEntry, ...]
        Designs with nonnegative finite cost and finite performance, ids unique
    """

    entries: Tuple[DesignEntry, ...]

    def __post_init__(self) -> None:
        if len(self.entries) == 0:
            raise EmptyDesignGridError()
        seen = set()
        for entry in self.entries:
            if not math.isfinite(entry.cost) or entry.cost < 0:
                raise ValueError(
                    f"Design {entry.design_id!r} has invalid cost {entry.cost}"
                )
            if not math.isfinite(entry.perf):
                raise ValueError(
                    f"Design {entry.design_id!r} has invalid performance {entry.perf}"
                )
            if entry.design_id in seen:
                raise ValueError(f"Duplicate design id {entry.design_id!r}")
            seen.add(entry.design_id)

    @classmethod
    def from_records(
        cls, records: Iterable[Tuple[Hashable, float, float]]
    ) -> "DesignGrid":
        """
        Builds the grid from (design_id, cost, perf) records
        """
        entries = tuple(
            DesignEntry(design_id, float(cost), float(perf))
            for design_id, cost, perf in records
        )
        return cls(entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def costs(self) -> jax.Array:
        return jnp.array([e.cost for e in self.entries], dtype=jnp.float64)

    @property
    def perfs(self) -> jax.Array:
        return jnp.array([e.perf for e in self.entries], dtype=jnp.float64)

    def lookup(self) -> Dict[Hashable, DesignEntry]:
        return {e.design_id: e for e in self.entries}

    def records(self) -> List[Dict[str, object]]:
        return [
            {"design_id": e.design_id, "cost": e.cost, "perf": e.perf}
            for e in self.entries
        ]


@dataclass(slots=True, frozen=True)
class FrontPoint:
    """
    One sample of the front

    Attributes
    ----------
    xi: float
        Resource level
    g: float
        Best performance with resource at most xi
    raw_g: float
        Best performance with resource (within the bin tolerance) exactly xi
    designs: Tuple[Hashable, ...]
        Designs attaining g
    """

    xi: float
    g: float
    raw_g: float
    designs: Tuple[Hashable, ...] = field(default_factory=tuple)


@dataclass(slots=True, frozen=True)
class FrontSample:
    points: Tuple[FrontPoint, ...]

    def __post_init__(self) -> None:
        if len(self.points) == 0:
            raise EmptyDesignGridError()
        for prev, cur in zip(self.points, self.points[1:]):
            if not cur.xi > prev.xi:
                raise ValueError("Front resources must be strictly increasing")
            if cur.g > prev.g:
                raise ValueError("Front values must be non-increasing")
        for point in self.points:
            if len(point.designs) == 0:
                raise ValueError(f"Front point at {point.xi} has no designs")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def xis(self) -> jax.Array:
        return jnp.array([p.xi for p in self.points], dtype=jnp.float64)

    @property
    def gs(self) -> jax.Array:
        return jnp.array([p.g for p in self.points], dtype=jnp.float64)

    def point_at(self, xi: float, tol: Optional[float] = None) -> FrontPoint:
        """
        Returns the front point at the resource level xi

        Parameters
        ----------
        xi: float
            Resource level
        tol: Optional[float]
            Relative coincidence tolerance, defaults to Config().contact_tol

        Raises
        ------
        OffFrontAtomError
            When no point of the front lies within tolerance of xi
        """
        if tol is None:
            tol = Config().contact_tol
        abs_tol = tol * max(1.0, abs(xi))
        best = min(self.points, key=lambda p: abs(p.xi - xi))
        if abs(best.xi - xi) > abs_tol:
            raise OffFrontAtomError(f"Resource {xi} is not a point of the front")
        return best

    def value_at(self, xi: float, tol: Optional[float] = None) -> float:
        return self.point_at(xi, tol).g


def _bin_entries(
    entries: Sequence[DesignEntry], bin_tol: float
) -> List[List[DesignEntry]]:
    bins: List[List[DesignEntry]] = []
    for entry in sorted(entries, key=lambda e: e.cost):
        if bins and entry.cost - bins[-1][0].cost <= bin_tol:
            bins[-1].append(entry)
        else:
            bins.append([entry])
    return bins


def build_front(grid: DesignGrid, bin_tol: Optional[float] = None) -> FrontSample:
    """
    Builds the sampled Pareto front of a design grid.

    Costs that lie within `bin_tol` of the first cost of a bin are merged, the
    bin value is the minimal performance among its entries and a running
    minimum over increasing cost makes the front non-increasing. A bin whose
    minimum is worse than the running minimum inherits the designs of the
    point that attains it.

    Parameters
    ----------
    grid: DesignGrid
        Design grid
    bin_tol: Optional[float]
        Cost binning tolerance, defaults to Config().bin_tol or 1e-9 times the
        largest cost

    Returns
    -------
    FrontSample
        Sampled front
    """
    if len(grid.entries) == 0:
        raise EmptyDesignGridError()
    config = Config()
    max_cost = max(e.cost for e in grid.entries)
    if bin_tol is None:
        bin_tol = config.bin_tol if config.bin_tol is not None else 1e-9 * max_cost
    if bin_tol < 0:
        raise ValueError("Binning tolerance has to be nonnegative")

    points: List[FrontPoint] = []
    for members in _bin_entries(grid.entries, bin_tol):
        xi = members[0].cost
        bin_min = min(e.perf for e in members)
        value_tol = config.contact_tol * max(1.0, abs(bin_min))
        bin_designs = tuple(
            e.design_id for e in members if e.perf <= bin_min + value_tol
        )
        if not points:
            points.append(FrontPoint(xi, bin_min, bin_min, bin_designs))
            continue
        running = points[-1].g
        if bin_min <= running + value_tol:
            points.append(FrontPoint(xi, min(bin_min, running), bin_min, bin_designs))
        else:
            points.append(FrontPoint(xi, running, bin_min, points[-1].designs))

    front = FrontSample(tuple(points))
    logger.info(
        "Built front with %s points from %s designs", len(points), len(grid.entries)
    )
    return front


def scalarize(
    front: FrontSample, lam: float, tol: Optional[float] = None
) -> List[float]:
    """
    Minimizers of g(xi) + lam * xi over the sampled front

    Parameters
    ----------
    front: FrontSample
        Sampled front
    lam: float
        Nonnegative price of the resource
    tol: Optional[float]
        Relative value tolerance, defaults to Config().contact_tol

    Returns
    -------
    List[float]
        Resource levels of all minimizing points
    """
    if lam < 0:
        raise ValueError("Scalarization weight has to be nonnegative")
    if tol is None:
        tol = Config().contact_tol
    values = [p.g + lam * p.xi for p in front.points]
    best = min(values)
    abs_tol = tol * max(1.0, abs(best))
    return [p.xi for p, v in zip(front.points, values) if v <= best + abs_tol]
