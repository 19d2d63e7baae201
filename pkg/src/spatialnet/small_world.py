"""Small-world classification via the omega index.

omega = <l>_rand / <l>  -  <C> / <C>_lattice

compares the empirical path length against a degree-matched random null
and the empirical clustering against a degree-matched lattice null.
Values near zero indicate a small world, negative values a more regular
(lattice-like) topology, positive values a more random one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from .exceptions import ComputeError
from .graph import SpatialGraph
from .measures import clustering, path_length_and_diameter
from .null_models import NullModelEnsemble

DEFAULT_THRESHOLD = 0.3


class ZeroClusteringError(ComputeError):
    pass


@dataclass(frozen=True)
class OmegaResult:
    l_emp: float
    c_emp: float
    l_rand: float
    c_latt: float
    omega: float
    classification: str  # "lattice-like" | "small-world" | "random-like"
    threshold: float
    in_range: bool  # False flags omega outside [-1, 1]; never clamped
    per_replicate_omegas: tuple[float, ...] = ()


def classify(omega_value: float, threshold: float = DEFAULT_THRESHOLD) -> str:
    if omega_value < -threshold:
        return "lattice-like"
    if omega_value > threshold:
        return "random-like"
    return "small-world"


def omega_from_stats(
    l_emp: float,
    c_emp: float,
    l_rand: float,
    c_latt: float,
    threshold: float = DEFAULT_THRESHOLD,
    per_replicate_omegas: tuple[float, ...] = (),
) -> OmegaResult:
    """Omega from the four precomputed statistics."""
    if c_latt == 0:
        raise ZeroClusteringError("lattice clustering is 0; omega is undefined")
    if l_emp <= 0:
        raise ComputeError(f"empirical path length must be positive, got {l_emp}")
    value = l_rand / l_emp - c_emp / c_latt
    return OmegaResult(
        l_emp=l_emp,
        c_emp=c_emp,
        l_rand=l_rand,
        c_latt=c_latt,
        omega=value,
        classification=classify(value, threshold),
        threshold=threshold,
        in_range=-1.0 <= value <= 1.0,
        per_replicate_omegas=per_replicate_omegas,
    )


def omega(
    g: SpatialGraph,
    rand_ensemble: NullModelEnsemble,
    latt_ensemble: NullModelEnsemble,
    threshold: float = DEFAULT_THRESHOLD,
) -> OmegaResult:
    """Omega for a graph given its two null-model ensembles.

    Ensemble means feed the index; per-replicate omegas (pairing the
    i-th random with the i-th lattice replicate) are attached for
    variance inspection.
    """
    if rand_ensemble.kind != "random" or latt_ensemble.kind != "lattice":
        raise ValueError(
            f"expected (random, lattice) ensembles, got "
            f"({rand_ensemble.kind!r}, {latt_ensemble.kind!r})"
        )
    for ensemble in (rand_ensemble, latt_ensemble):
        replicate = ensemble.replicates[0]
        if replicate.n != g.n or replicate.m != g.m:
            raise ValueError("ensemble does not match the graph (n or m differ)")
    l_emp = path_length_and_diameter(g, "binary").average
    c_emp = clustering(g).average

    per_rep = []
    pairs = zip(rand_ensemble.stats.per_replicate, latt_ensemble.stats.per_replicate)
    for rand_stats, latt_stats in pairs:
        if latt_stats.clustering > 0 and l_emp > 0:
            per_rep.append(rand_stats.path_length / l_emp - c_emp / latt_stats.clustering)
        else:
            per_rep.append(math.nan)

    return omega_from_stats(
        l_emp=l_emp,
        c_emp=c_emp,
        l_rand=rand_ensemble.stats.mean_path_length,
        c_latt=latt_ensemble.stats.mean_clustering,
        threshold=threshold,
        per_replicate_omegas=tuple(per_rep),
    )
