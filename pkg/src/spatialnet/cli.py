"""Command-line surface and report bundling.

Commands: analyze, omega, communities, fit, regress, all. Every command
reads the node/edge CSVs (regress additionally needs the variables CSV),
computes in memory, and only then writes its JSON reports — a failing
command never leaves a partial bundle behind. Stochastic commands
(omega, communities, all) require --seed so runs are reproducible.

Exit codes: 0 success, 2 schema/input error, 3 compute error. Errors are
reported to stderr as a one-line JSON record.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from . import communities as communities_mod
from . import empirical, fitting, measures, null_models, small_world
from .exceptions import ComputeError, SchemaError, SpatialNetError
from .graph import SpatialGraph
from .io import ingest, sanitize, validate_report

COMMANDS = ("analyze", "omega", "communities", "fit", "regress", "all")
SEEDED_COMMANDS = ("omega", "communities", "all")


class ConfigError(SchemaError):
    pass


@dataclass(frozen=True)
class AnalysisConfig:
    nodes: Path
    edges: Path
    variables: Optional[Path] = None
    epoch: Optional[str] = None
    seed: Optional[int] = None
    swaps_per_edge: int = null_models.DEFAULT_SWAPS_PER_EDGE
    replicates: int = null_models.DEFAULT_REPLICATES
    omega_threshold: float = small_world.DEFAULT_THRESHOLD
    alpha: float = empirical.DEFAULT_ALPHA
    model_sets: tuple[tuple[str, ...], ...] = ()
    out_dir: Path = Path("reports")

    def echo(self) -> dict:
        # analysis inputs only; out_dir is run bookkeeping, not input
        return {
            "nodes": str(self.nodes),
            "edges": str(self.edges),
            "variables": str(self.variables) if self.variables else None,
            "epoch": self.epoch,
            "seed": self.seed,
            "swaps_per_edge": self.swaps_per_edge,
            "replicates": self.replicates,
            "omega_threshold": self.omega_threshold,
            "alpha": self.alpha,
            "model_sets": [list(names) for names in self.model_sets],
        }


@dataclass
class ReportBundle:
    reports: dict[str, dict] = field(default_factory=dict)
    plotdata: dict[str, list[list]] = field(default_factory=dict)


def _provenance(config: AnalysisConfig) -> dict:
    return {
        "tool": "spatialnet",
        "version": __version__,
        "seed": config.seed,
        "config": config.echo(),
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }


def _measures_payload(g: SpatialGraph, config: AnalysisConfig) -> dict:
    report = measures.measure_report(g, epoch=config.epoch)
    gm = report.global_measures
    payload = {
        "provenance": _provenance(config),
        "global": {
            "n": gm.n,
            "m": gm.m,
            "average_degree": gm.average_degree,
            "average_strength_km": gm.average_strength,
            "density_planar": gm.density_planar,
            "density_nonplanar": gm.density_nonplanar,
            "avg_path_length_binary": gm.avg_path_length_binary,
            "avg_path_length_km": gm.avg_path_length_km,
            "diameter_binary": gm.diameter_binary,
            "diameter_km": gm.diameter_km,
            "clustering_global": gm.clustering_global,
            "clustering_average": gm.clustering_average,
            "total_edge_length_km": gm.total_edge_length_km,
            "average_edge_length_km": gm.average_edge_length_km,
        },
        "nearest_neighbor": {
            "average_degree": report.neighbor_average_degree,
            "average_strength_km": report.neighbor_average_strength,
        },
        "per_node": {
            node_id: {
                "degree": nm.degree,
                "strength_km": nm.strength_km,
                "closeness": nm.closeness,
                "betweenness": nm.betweenness,
                "clustering": nm.clustering,
                "straightness": nm.straightness,
                "avg_neighbor_degree": nm.avg_neighbor_degree,
                "avg_neighbor_strength": nm.avg_neighbor_strength,
            }
            for node_id, nm in report.per_node.items()
        },
        "time": None,
    }
    if report.time_measures is not None:
        tm = report.time_measures
        payload["time"] = {
            "epoch": tm.epoch,
            "avg_path_length_min": tm.avg_path_length_min,
            "diameter_min": tm.diameter_min,
        }
    return payload


def _ensemble_summary(ensemble: null_models.NullModelEnsemble) -> dict:
    return {
        "kind": ensemble.kind,
        "seed": ensemble.seed,
        "swaps_per_edge": ensemble.swaps_per_edge,
        "replicates": len(ensemble.replicates),
        "mean_path_length": ensemble.stats.mean_path_length,
        "mean_clustering": ensemble.stats.mean_clustering,
        "node_order": list(ensemble.node_order) if ensemble.node_order else None,
        "per_replicate": [
            {
                "path_length": r.path_length,
                "clustering": r.clustering,
                "accepted_swaps": r.accepted_swaps,
                "attempts": r.attempts,
            }
            for r in ensemble.stats.per_replicate
        ],
    }


def _omega_payload(g: SpatialGraph, config: AnalysisConfig) -> dict:
    rand = null_models.randomize(
        g, config.seed, config.swaps_per_edge, config.replicates
    )
    latt = null_models.latticeize(
        g, config.seed, config.swaps_per_edge, config.replicates
    )
    result = small_world.omega(g, rand, latt, threshold=config.omega_threshold)
    return {
        "provenance": _provenance(config),
        "inputs": {
            "l_emp": result.l_emp,
            "c_emp": result.c_emp,
            "l_rand": result.l_rand,
            "c_latt": result.c_latt,
        },
        "omega": result.omega,
        "classification": result.classification,
        "threshold": result.threshold,
        "in_range": result.in_range,
        "per_replicate_omegas": list(result.per_replicate_omegas),
        "ensembles": {
            "random": _ensemble_summary(rand),
            "lattice": _ensemble_summary(latt),
        },
    }


def _communities_payload(g: SpatialGraph, config: AnalysisConfig) -> dict:
    partition = communities_mod.find_communities(g, config.seed)
    return {
        "provenance": _provenance(config),
        "assignment": dict(partition.assignment),
        "q": partition.q,
        "levels": [dict(level) for level in partition.levels],
        "community_count": len(set(partition.assignment.values())),
    }


def _fit_payload_entry(fit: fitting.FitResult) -> dict:
    return {
        "family": fit.family,
        "params": dict(fit.params),
        "r_squared": fit.r_squared,
        "points_used": fit.points_used,
    }


def _fits_payload(g: SpatialGraph, config: AnalysisConfig, bundle: ReportBundle) -> dict:
    histogram = fitting.degree_histogram(g)
    points = [(float(k), float(count)) for k, count in histogram]
    normal = fitting.fit_normal(points)
    powerlaw = fitting.fit_powerlaw(points)
    bundle.plotdata["degree_distribution.csv"] = [
        ["k", "count", "fitted_normal", "fitted_powerlaw"],
        *[
            [k, count, fitting.predict(normal, k), fitting.predict(powerlaw, k)]
            for k, count in points
        ],
    ]
    scaling: dict[str, dict] = {}
    for measure_name in fitting.SCALING_MEASURES:
        class_means = fitting.degree_class_means(g, measure_name)
        fit = fitting.scaling_by_degree_class(g, measure_name)
        scaling[measure_name] = _fit_payload_entry(fit)
        bundle.plotdata[f"scaling_{measure_name}.csv"] = [
            ["k", "class_mean", "class_size", "fitted"],
            *[
                [k, mean, size, fitting.predict(fit, k) if k > 0 else None]
                for k, mean, size in class_means
            ],
        ]
    return {
        "provenance": _provenance(config),
        "degree_histogram": [[k, count] for k, count in histogram],
        "distribution_fits": {
            "normal": _fit_payload_entry(normal),
            "powerlaw": _fit_payload_entry(powerlaw),
        },
        "scaling_fits": scaling,
    }


def _model_payload(model: empirical.RegressionModel) -> dict:
    rows = {
        "(constant)": {
            "b": model.intercept,
            "se": model.se_intercept,
            "beta": None,
            "t": model.t_intercept,
            "p": model.p_intercept,
        }
    }
    for j, name in enumerate(model.predictors):
        rows[name] = {
            "b": model.coefficients[j],
            "se": model.se[j],
            "beta": model.beta[j],
            "t": model.t[j],
            "p": model.p[j],
        }
    return {
        "predictors": list(model.predictors),
        "r": model.r,
        "r_squared": model.r_squared,
        "se_estimate": model.se_estimate,
        "n": model.n,
        "df_resid": model.df_resid,
        "coefficients": rows,
    }


def _regression_payload(table: empirical.VariableTable, config: AnalysisConfig) -> dict:
    selection = empirical.select_representatives(table, alpha=config.alpha)
    model_sets = config.model_sets
    if not model_sets:
        model_sets = (tuple(
            selection.representatives[klass] for klass in empirical.PREDICTOR_CLASSES
        ),)
    models = []
    for names in model_sets:
        model = empirical.ols_regress(table, names)
        models.append(_model_payload(model))
    return {
        "provenance": _provenance(config),
        "selection": {
            "alpha": selection.alpha,
            "representatives": dict(selection.representatives),
            "scores": [
                {
                    "name": s.name,
                    "class": s.klass,
                    "within_sum_r2": s.within_sum,
                    "within_rank": s.within_rank,
                    "global_sum_r2": s.global_sum,
                    "global_rank": s.global_rank,
                    "is_response": s.is_response,
                }
                for s in selection.scores
            ],
        },
        "models": models,
    }


def run(command: str, config: AnalysisConfig) -> ReportBundle:
    """Execute one command and return its full bundle (nothing written)."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    if command in SEEDED_COMMANDS and config.seed is None:
        raise ConfigError(f"command {command!r} is stochastic; --seed is required")

    needs_table = command in ("regress", "all")
    if needs_table and config.variables is None:
        raise ConfigError(f"command {command!r} requires --vars")

    graph, table = ingest(config.nodes, config.edges, config.variables)
    if config.epoch is not None and config.epoch not in graph.epochs():
        raise ConfigError(
            f"epoch {config.epoch!r} not present in the edge file; "
            f"declared epochs: {list(graph.epochs())}"
        )

    bundle = ReportBundle()
    if command in ("analyze", "all"):
        bundle.reports["measures"] = _measures_payload(graph, config)
    if command in ("omega", "all"):
        bundle.reports["omega"] = _omega_payload(graph, config)
    if command in ("communities", "all"):
        bundle.reports["communities"] = _communities_payload(graph, config)
    if command in ("fit", "all"):
        bundle.reports["fits"] = _fits_payload(graph, config, bundle)
    if command in ("regress", "all") and table is not None:
        bundle.reports["regression"] = _regression_payload(table, config)

    for name, payload in bundle.reports.items():
        validate_report(name, payload)
    return bundle


def write_bundle(bundle: ReportBundle, out_dir: Path) -> list[Path]:
    """Write every report and plotdata file; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, payload in sorted(bundle.reports.items()):
        path = out_dir / f"{name}.json"
        path.write_text(
            json.dumps(sanitize(payload), indent=2, sort_keys=True, allow_nan=False) + "\n",
            encoding="utf-8",
        )
        written.append(path)
    if bundle.plotdata:
        plot_dir = out_dir / "plotdata"
        plot_dir.mkdir(parents=True, exist_ok=True)
        for name, rows in sorted(bundle.plotdata.items()):
            path = plot_dir / name
            text = "\n".join(
                ",".join("" if cell is None else str(cell) for cell in row) for row in rows
            )
            path.write_text(text + "\n", encoding="utf-8")
            written.append(path)
    return written


def _parse_model_sets(raw: Optional[str]) -> tuple[tuple[str, ...], ...]:
    if not raw:
        return ()
    sets = []
    for chunk in raw.split(";"):
        names = tuple(name.strip() for name in chunk.split(",") if name.strip())
        if names:
            sets.append(names)
    return tuple(sets)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spatialnet",
        description="Spatial network analysis: measures, small-world omega, "
                    "communities, distribution fits, and commuter regression.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--nodes", required=True, type=Path, help="nodes CSV")
    parser.add_argument("--edges", required=True, type=Path, help="edges CSV")
    parser.add_argument("--vars", type=Path, default=None, help="variables CSV")
    parser.add_argument("--epoch", default=None, help="time epoch label, e.g. 2010")
    parser.add_argument("--seed", type=int, default=None,
                        help="RNG seed (required for omega/communities/all)")
    parser.add_argument("--swaps-per-edge", type=int,
                        default=null_models.DEFAULT_SWAPS_PER_EDGE)
    parser.add_argument("--replicates", type=int, default=null_models.DEFAULT_REPLICATES)
    parser.add_argument("--omega-threshold", type=float, default=small_world.DEFAULT_THRESHOLD)
    parser.add_argument("--alpha", type=float, default=empirical.DEFAULT_ALPHA)
    parser.add_argument("--models", default=None,
                        help="semicolon-separated predictor sets, e.g. 'a,b,c;a,b,d'")
    parser.add_argument("--out", type=Path, default=Path("reports"), help="output directory")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = AnalysisConfig(
        nodes=args.nodes,
        edges=args.edges,
        variables=args.vars,
        epoch=args.epoch,
        seed=args.seed,
        swaps_per_edge=args.swaps_per_edge,
        replicates=args.replicates,
        omega_threshold=args.omega_threshold,
        alpha=args.alpha,
        model_sets=_parse_model_sets(args.models),
        out_dir=args.out,
    )
    try:
        bundle = run(args.command, config)
        written = write_bundle(bundle, config.out_dir)
    except SchemaError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    except (ComputeError, SpatialNetError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
