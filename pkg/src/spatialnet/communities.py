"""Modularity and multi-level greedy community detection.

Modularity of an assignment is

    Q = (1 / 2m) * sum_ij [A_ij - k_i * k_j / 2m] * delta(g_i, g_j)

summed over ordered node pairs (diagonal included). Detection follows
the classic two-phase scheme: repeatedly move single nodes to the
neighboring community with the largest positive modularity gain, then
aggregate communities into super-nodes and repeat until no pass
improves. Node visit order is shuffled by the seed; equal gains break
toward the lowest community label, so results are reproducible.

Community detection works on the binary adjacency by default, matching
the convention under which the topology results are reported; pass
``weighted=True`` to use kilometric edge weights instead.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping

from .exceptions import ComputeError, DisconnectedError
from .graph import SpatialGraph


class IncompleteAssignmentError(ComputeError):
    pass


@dataclass(frozen=True)
class CommunityPartition:
    assignment: Mapping[str, int]
    q: float
    levels: tuple[Mapping[str, int], ...]
    seed: int
    weighted: bool = False


def _edge_weight(edge, weighted: bool) -> float:
    return edge.distance_km if weighted else 1.0


def modularity(g: SpatialGraph, assignment: Mapping[str, int], weighted: bool = False) -> float:
    """Modularity Q of a complete node -> community assignment."""
    node_ids = set(g.node_ids)
    missing = node_ids - set(assignment)
    if missing:
        raise IncompleteAssignmentError(f"nodes without a community: {sorted(missing)}")
    unknown = set(assignment) - node_ids
    if unknown:
        raise IncompleteAssignmentError(f"assignment names unknown nodes: {sorted(unknown)}")

    strength = {
        node.id: math.fsum(_edge_weight(e, weighted) for e in g.adjacency[node.id].values())
        for node in g.nodes
    }
    two_m = math.fsum(strength[node.id] for node in g.nodes)
    if two_m == 0:
        return 0.0

    internal = 0.0  # sum of A_ij over ordered same-community pairs
    for edge in g.edges:
        if assignment[edge.u] == assignment[edge.v]:
            internal += 2.0 * _edge_weight(edge, weighted)

    community_strength: dict[int, float] = {}
    for node in g.nodes:
        label = assignment[node.id]
        community_strength[label] = community_strength.get(label, 0.0) + strength[node.id]
    expected = math.fsum(s * s for s in community_strength.values()) / two_m

    return (internal - expected) / two_m


class _Level:
    """One aggregation level: weighted adjacency with explicit loops."""

    def __init__(self, nodes: list[int], adj: dict[int, dict[int, float]], loops: dict[int, float]):
        self.nodes = nodes
        self.adj = adj
        self.loops = loops
        self.k = {
            u: math.fsum(adj[u].values()) + loops[u]
            for u in nodes
        }
        self.two_m = math.fsum(self.k[u] for u in nodes)


def _local_moves(level: _Level, rng: random.Random) -> tuple[dict[int, int], bool]:
    """Phase one: greedy single-node moves until no positive gain remains.

    Candidate communities are visited in ascending label order and a
    strictly larger gain is required to displace the current best, so on
    equal gains the lowest label wins and ties with staying keep the
    node where it is.
    """
    comm = {u: u for u in level.nodes}
    sigma_tot = {u: level.k[u] for u in level.nodes}
    m = level.two_m / 2.0
    improved = False

    order = list(level.nodes)
    changed = True
    while changed:
        changed = False
        rng.shuffle(order)
        for u in order:
            current = comm[u]
            k_u = level.k[u]
            sigma_tot[current] -= k_u
            # edge weight from u into each community it touches
            links: dict[int, float] = {current: 0.0}
            for v, w in level.adj[u].items():
                c = comm[v]
                links[c] = links.get(c, 0.0) + w
            best_comm = current
            best_gain = links[current] / m - sigma_tot[current] * k_u / (2.0 * m * m)
            for c in sorted(links):
                if c == current:
                    continue
                gain = links[c] / m - sigma_tot[c] * k_u / (2.0 * m * m)
                if gain > best_gain + 1e-12:
                    best_comm, best_gain = c, gain
            sigma_tot[best_comm] += k_u
            if best_comm != current:
                comm[u] = best_comm
                changed = True
                improved = True
    return comm, improved


def _aggregate(level: _Level, comm: dict[int, int]) -> tuple[_Level, dict[int, int]]:
    """Phase two: one super-node per community, labels renumbered densely."""
    labels = sorted(set(comm.values()))
    renumber = {label: i for i, label in enumerate(labels)}
    adj: dict[int, dict[int, float]] = {i: {} for i in range(len(labels))}
    loops: dict[int, float] = {i: 0.0 for i in range(len(labels))}
    for u in level.nodes:
        cu = renumber[comm[u]]
        loops[cu] += level.loops[u]
        for v, w in level.adj[u].items():
            cv = renumber[comm[v]]
            if cu == cv:
                loops[cu] += w  # each ordered (u, v) counted once here
            else:
                adj[cu][cv] = adj[cu].get(cv, 0.0) + w
    new_level = _Level(list(range(len(labels))), adj, loops)
    return new_level, renumber


def find_communities(g: SpatialGraph, seed: int, weighted: bool = False) -> CommunityPartition:
    """Multi-level greedy modularity optimization.

    Returns the partition of the original nodes, its Q recomputed on the
    original graph, and the flattened partition recorded after each
    level.
    """
    if not g.is_connected:
        raise DisconnectedError("community detection requires a connected graph")

    ids = list(g.node_ids)
    index = {node_id: i for i, node_id in enumerate(ids)}
    adj: dict[int, dict[int, float]] = {i: {} for i in range(len(ids))}
    for edge in g.edges:
        w = _edge_weight(edge, weighted)
        iu, iv = index[edge.u], index[edge.v]
        adj[iu][iv] = w
        adj[iv][iu] = w
    level = _Level(list(range(len(ids))), adj, {i: 0.0 for i in range(len(ids))})

    rng = random.Random(seed)
    # membership[i] = current super-node of original node i
    membership = {i: i for i in range(len(ids))}
    levels: list[dict[str, int]] = []

    while True:
        comm, improved = _local_moves(level, rng)
        level, renumber = _aggregate(level, comm)
        membership = {i: renumber[comm[membership[i]]] for i in membership}
        levels.append({ids[i]: membership[i] for i in range(len(ids))})
        if not improved:
            break

    assignment = levels[-1]
    return CommunityPartition(
        assignment=assignment,
        q=modularity(g, assignment, weighted=weighted),
        levels=tuple(levels),
        seed=seed,
        weighted=weighted,
    )
