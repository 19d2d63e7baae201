"""Per-node and global network measures.

Conventions used throughout:

* Closeness is the mean shortest-path distance from a node to all others,
  so smaller values mean better reachability.
* Betweenness is normalized by the (n-1)(n-2)/2 pairs that could route
  through a node, so values live in [0, 1] across graph sizes.
* Local clustering of a node with fewer than two neighbors is 0; by
  default those zeros are included in the network average.
* Average path length is the mean over ordered pairs i != j.
* Aggregates over distances (closeness, path length, diameter,
  straightness, betweenness) refuse disconnected graphs outright rather
  than folding the unreachable ``inf`` sentinel into a sum.
* Straight-line distances come from the haversine formula on lat/lon
  with an Earth radius of 6371 km.

All functions are pure; sums accumulate in node ingestion order via
``math.fsum`` so repeated runs are bit-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

from .exceptions import ComputeError, DisconnectedError
from .graph import SpatialGraph, shortest_paths

EARTH_RADIUS_KM = 6371.0


class TooFewNodesError(ComputeError):
    pass


class MissingCoordinatesError(ComputeError):
    pass


class IsolatedNodeError(ComputeError):
    pass


@dataclass(frozen=True)
class DegreeStrength:
    degree: Mapping[str, int]
    strength_km: Mapping[str, float]
    average_degree: float
    average_strength: float


@dataclass(frozen=True)
class ClusteringResult:
    per_node: Mapping[str, float]
    global_coefficient: float
    average: float


@dataclass(frozen=True)
class PathStats:
    average: float
    diameter: float


@dataclass(frozen=True)
class NeighborStats:
    degree: Mapping[str, float]
    strength: Mapping[str, float]
    average_degree: float
    average_strength: float


@dataclass(frozen=True)
class NodeMeasures:
    degree: int
    strength_km: float
    closeness: float
    betweenness: float
    clustering: float
    straightness: float
    avg_neighbor_degree: float
    avg_neighbor_strength: float


@dataclass(frozen=True)
class GlobalMeasures:
    n: int
    m: int
    average_degree: float
    average_strength: float
    density_planar: float
    density_nonplanar: float
    avg_path_length_binary: float
    avg_path_length_km: float
    diameter_binary: float
    diameter_km: float
    clustering_global: float
    clustering_average: float
    total_edge_length_km: float
    average_edge_length_km: float


@dataclass(frozen=True)
class TimeMeasures:
    epoch: str
    avg_path_length_min: float
    diameter_min: float


@dataclass(frozen=True)
class MeasureReport:
    per_node: Mapping[str, NodeMeasures]
    global_measures: GlobalMeasures
    neighbor_average_degree: float
    neighbor_average_strength: float
    time_measures: Optional[TimeMeasures] = None


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in km between two points in decimal degrees."""
    rlat1, rlat2 = math.radians(lat1), math.radians(lat2)
    dlat = math.radians(lat2 - lat1)
    dlon = math.radians(lon2 - lon1)
    a = math.sin(dlat / 2.0) ** 2 + math.cos(rlat1) * math.cos(rlat2) * math.sin(dlon / 2.0) ** 2
    return EARTH_RADIUS_KM * 2.0 * math.atan2(math.sqrt(a), math.sqrt(1.0 - a))


def degree_and_strength(g: SpatialGraph) -> DegreeStrength:
    """Node degree and kilometric strength, with their network means."""
    degree: dict[str, int] = {}
    strength: dict[str, float] = {}
    for node in g.nodes:
        nbrs = g.adjacency[node.id]
        degree[node.id] = len(nbrs)
        strength[node.id] = math.fsum(edge.distance_km for edge in nbrs.values())
    n = g.n
    avg_k = 2.0 * g.m / n if n else 0.0
    avg_s = math.fsum(strength[node.id] for node in g.nodes) / n if n else 0.0
    return DegreeStrength(degree, strength, avg_k, avg_s)


def density(g: SpatialGraph, planarity: str = "nonplanar") -> float:
    """Edge count relative to the maximum: n(n-1)/2 pairs for the
    nonplanar reading, 3n-6 for the planar one."""
    if planarity == "nonplanar":
        if g.n < 2:
            return 0.0
        return 2.0 * g.m / (g.n * (g.n - 1))
    if planarity == "planar":
        if g.n < 3:
            raise TooFewNodesError(f"planar density needs n >= 3, got n = {g.n}")
        return g.m / (3.0 * g.n - 6.0)
    raise ValueError(f"unknown planarity {planarity!r}; expected 'planar' or 'nonplanar'")


def _require_connected(g: SpatialGraph, what: str) -> None:
    if not g.is_connected:
        raise DisconnectedError(f"{what} requires a connected graph; found {g.components} components")


def closeness(g: SpatialGraph, mode: str = "binary", epoch: Optional[str] = None) -> dict[str, float]:
    """Mean shortest-path distance from each node to all others."""
    _require_connected(g, "closeness")
    if g.n < 2:
        return {node.id: 0.0 for node in g.nodes}
    result: dict[str, float] = {}
    for node in g.nodes:
        table = shortest_paths(g, node.id, mode, epoch)
        result[node.id] = math.fsum(
            table.dist[other.id] for other in g.nodes if other.id != node.id
        ) / (g.n - 1)
    return result


def betweenness(g: SpatialGraph, mode: str = "binary", epoch: Optional[str] = None) -> dict[str, float]:
    """Share of all-pairs shortest paths through each node, in [0, 1].

    Accumulates per-source dependencies over the path-count tables in
    reverse distance order, halves the total to de-duplicate ordered
    pairs, then divides by (n-1)(n-2)/2.
    """
    _require_connected(g, "betweenness")
    raw = {node.id: 0.0 for node in g.nodes}
    for node in g.nodes:
        table = shortest_paths(g, node.id, mode, epoch)
        delta = {other.id: 0.0 for other in g.nodes}
        for w in reversed(table.order):
            for v in table.preds[w]:
                delta[v] += table.sigma[v] / table.sigma[w] * (1.0 + delta[w])
            if w != node.id:
                raw[w] += delta[w]
    pairs = (g.n - 1) * (g.n - 2) / 2.0
    if pairs <= 0:
        return {node_id: 0.0 for node_id in raw}
    return {node_id: value / 2.0 / pairs for node_id, value in raw.items()}


def clustering(g: SpatialGraph, exclude_low_degree: bool = False) -> ClusteringResult:
    """Local clustering per node, the transitivity-style global
    coefficient, and the network average.

    ``exclude_low_degree`` drops nodes with degree < 2 from the average
    instead of counting them as zero.
    """
    per_node: dict[str, float] = {}
    neighbor_sets = {node.id: set(g.adjacency[node.id]) for node in g.nodes}
    triangles2 = 0.0  # ordered connected-neighbor pairs, summed over nodes
    triplets = 0.0
    for node in g.nodes:
        nbrs = sorted(neighbor_sets[node.id])
        k = len(nbrs)
        if k < 2:
            per_node[node.id] = 0.0
            continue
        links = 0
        for i, u in enumerate(nbrs):
            for v in nbrs[i + 1:]:
                if v in neighbor_sets[u]:
                    links += 1
        per_node[node.id] = 2.0 * links / (k * (k - 1))
        triangles2 += 2.0 * links
        triplets += k * (k - 1) / 2.0
    global_c = (triangles2 / 2.0) / triplets if triplets else 0.0
    if exclude_low_degree:
        values = [per_node[node.id] for node in g.nodes if len(neighbor_sets[node.id]) >= 2]
    else:
        values = [per_node[node.id] for node in g.nodes]
    average = math.fsum(values) / len(values) if values else 0.0
    return ClusteringResult(per_node, global_c, average)


def path_length_and_diameter(
    g: SpatialGraph, mode: str = "binary", epoch: Optional[str] = None
) -> PathStats:
    """Mean ordered-pair shortest-path length and the maximum (diameter)."""
    _require_connected(g, "average path length")
    if g.n < 2:
        return PathStats(0.0, 0.0)
    total = 0.0
    diameter = 0.0
    for node in g.nodes:
        table = shortest_paths(g, node.id, mode, epoch)
        distances = [table.dist[other.id] for other in g.nodes if other.id != node.id]
        total += math.fsum(distances)
        diameter = max(diameter, max(distances))
    return PathStats(total / (g.n * (g.n - 1)), diameter)


def straightness(g: SpatialGraph) -> dict[str, float]:
    """Mean ratio of straight-line to route distance over all targets.

    Equals 1 only when every route out of the node is as short as the
    great-circle line; any detour pulls the value below 1.
    """
    _require_connected(g, "straightness")
    missing = [node.id for node in g.nodes if not node.has_coordinates]
    if missing:
        raise MissingCoordinatesError(f"nodes without coordinates: {missing}")
    if g.n < 2:
        return {node.id: 1.0 for node in g.nodes}
    coords = {node.id: (node.lat, node.lon) for node in g.nodes}
    result: dict[str, float] = {}
    for node in g.nodes:
        table = shortest_paths(g, node.id, "km")
        ratios = []
        for other in g.nodes:
            if other.id == node.id:
                continue
            straight = haversine_km(*coords[node.id], *coords[other.id])
            ratios.append(straight / table.dist[other.id])
        result[node.id] = math.fsum(ratios) / (g.n - 1)
    return result


def avg_nearest_neighbor(g: SpatialGraph) -> NeighborStats:
    """Per-node mean degree and strength of the node's neighbors, plus
    the network-wide means of those values."""
    isolated = [node.id for node in g.nodes if not g.adjacency[node.id]]
    if isolated:
        raise IsolatedNodeError(f"isolated nodes: {isolated}")
    ds = degree_and_strength(g)
    nbr_degree: dict[str, float] = {}
    nbr_strength: dict[str, float] = {}
    for node in g.nodes:
        nbrs = list(g.adjacency[node.id])
        nbr_degree[node.id] = math.fsum(ds.degree[v] for v in nbrs) / len(nbrs)
        nbr_strength[node.id] = math.fsum(ds.strength_km[v] for v in nbrs) / len(nbrs)
    n = g.n
    return NeighborStats(
        nbr_degree,
        nbr_strength,
        math.fsum(nbr_degree[node.id] for node in g.nodes) / n,
        math.fsum(nbr_strength[node.id] for node in g.nodes) / n,
    )


def measure_report(
    g: SpatialGraph,
    epoch: Optional[str] = None,
    exclude_low_degree: bool = False,
) -> MeasureReport:
    """Assemble the full per-node and global measure table for one graph
    snapshot. Requires a connected graph with node coordinates."""
    ds = degree_and_strength(g)
    clus = clustering(g, exclude_low_degree=exclude_low_degree)
    close = closeness(g)
    between = betweenness(g)
    straight = straightness(g)
    nbr = avg_nearest_neighbor(g)
    binary_paths = path_length_and_diameter(g, "binary")
    km_paths = path_length_and_diameter(g, "km")

    per_node = {
        node.id: NodeMeasures(
            degree=ds.degree[node.id],
            strength_km=ds.strength_km[node.id],
            closeness=close[node.id],
            betweenness=between[node.id],
            clustering=clus.per_node[node.id],
            straightness=straight[node.id],
            avg_neighbor_degree=nbr.degree[node.id],
            avg_neighbor_strength=nbr.strength[node.id],
        )
        for node in g.nodes
    }
    total_km = math.fsum(edge.distance_km for edge in g.edges)
    global_measures = GlobalMeasures(
        n=g.n,
        m=g.m,
        average_degree=ds.average_degree,
        average_strength=ds.average_strength,
        density_planar=density(g, "planar"),
        density_nonplanar=density(g, "nonplanar"),
        avg_path_length_binary=binary_paths.average,
        avg_path_length_km=km_paths.average,
        diameter_binary=binary_paths.diameter,
        diameter_km=km_paths.diameter,
        clustering_global=clus.global_coefficient,
        clustering_average=clus.average,
        total_edge_length_km=total_km,
        average_edge_length_km=total_km / g.m if g.m else 0.0,
    )
    time_measures = None
    if epoch is not None:
        time_paths = path_length_and_diameter(g, "time", epoch)
        time_measures = TimeMeasures(epoch, time_paths.average, time_paths.diameter)
    return MeasureReport(
        per_node=per_node,
        global_measures=global_measures,
        neighbor_average_degree=nbr.average_degree,
        neighbor_average_strength=nbr.average_strength,
        time_measures=time_measures,
    )
