"""File formats: CSV ingestion, graph export, and JSON report payloads.

CSV schemas (UTF-8, decimal point):

* nodes.csv      id,label,lat,lon[,<attr>...]
* edges.csv      source,target,distance_km[,time_<epoch>_min...]
* variables.csv  id,<name:class>... with class one of S/B/O and exactly
                 one column tagged :Y (the response)

Schema violations raise CsvSchemaError with the file and line number.
Every report payload carries a provenance block; the timestamp lives in
the single field provenance.generated_at so determinism checks can mask
it. Non-finite numbers are emitted as null.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Mapping, Optional

from .empirical import Variable, VariableTable, build_variable_table
from .exceptions import SchemaError
from .graph import EdgeRecord, NodeRecord, SpatialGraph, build_graph

NODE_COLUMNS = ("id", "label", "lat", "lon")
EDGE_COLUMNS = ("source", "target", "distance_km")
TIME_PREFIX = "time_"
TIME_SUFFIX = "_min"


class CsvSchemaError(SchemaError):
    def __init__(self, path, line: Optional[int], message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")


class MissingResponseError(CsvSchemaError):
    pass


def _parse_float(raw: str, path, line: int, what: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise CsvSchemaError(path, line, f"{what}: {raw!r} is not a number") from None


def read_nodes_csv(path) -> list[NodeRecord]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvSchemaError(path, 1, "empty file") from None
        header = [cell.strip() for cell in header]
        if tuple(header[:4]) != NODE_COLUMNS:
            raise CsvSchemaError(path, 1, f"header must start with {','.join(NODE_COLUMNS)}")
        attr_names = header[4:]
        nodes = []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvSchemaError(path, line, f"expected {len(header)} cells, got {len(row)}")
            lat = _parse_float(row[2], path, line, "lat")
            lon = _parse_float(row[3], path, line, "lon")
            attributes = {
                name: _parse_float(value, path, line, f"attribute {name!r}")
                for name, value in zip(attr_names, row[4:])
            }
            nodes.append(NodeRecord(row[0].strip(), row[1].strip(), lat, lon, attributes))
    return nodes


def read_edges_csv(path) -> list[EdgeRecord]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvSchemaError(path, 1, "empty file") from None
        header = [cell.strip() for cell in header]
        if tuple(header[:3]) != EDGE_COLUMNS:
            raise CsvSchemaError(path, 1, f"header must start with {','.join(EDGE_COLUMNS)}")
        epochs = []
        for cell in header[3:]:
            if not (cell.startswith(TIME_PREFIX) and cell.endswith(TIME_SUFFIX)):
                raise CsvSchemaError(path, 1, f"time column {cell!r} must match time_<epoch>_min")
            epochs.append(cell[len(TIME_PREFIX):-len(TIME_SUFFIX)])
        edges = []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvSchemaError(path, line, f"expected {len(header)} cells, got {len(row)}")
            km = _parse_float(row[2], path, line, "distance_km")
            if km <= 0:
                raise CsvSchemaError(path, line, f"distance_km must be positive, got {km}")
            times = {}
            for epoch, cell in zip(epochs, row[3:]):
                minutes = _parse_float(cell, path, line, f"time_{epoch}_min")
                if minutes <= 0:
                    raise CsvSchemaError(path, line, f"time_{epoch}_min must be positive, got {minutes}")
                times[epoch] = minutes
            edges.append(EdgeRecord(row[0].strip(), row[1].strip(), km, times))
    return edges


def read_variables_csv(path) -> VariableTable:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvSchemaError(path, 1, "empty file") from None
        header = [cell.strip() for cell in header]
        if not header or header[0] != "id":
            raise CsvSchemaError(path, 1, "first column must be 'id'")
        names: list[str] = []
        classes: list[str] = []
        for cell in header[1:]:
            if ":" not in cell:
                raise CsvSchemaError(path, 1, f"column {cell!r} is missing its ':<class>' tag")
            name, _, klass = cell.rpartition(":")
            if klass not in ("S", "B", "O", "Y"):
                raise CsvSchemaError(path, 1, f"column {cell!r} has unknown class {klass!r}")
            names.append(name)
            classes.append(klass)
        if classes.count("Y") == 0:
            raise MissingResponseError(path, 1, "no column tagged ':Y' (the response)")
        if classes.count("Y") > 1:
            raise CsvSchemaError(path, 1, "more than one column tagged ':Y'")
        ids: list[str] = []
        columns: list[list[float]] = [[] for _ in names]
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvSchemaError(path, line, f"expected {len(header)} cells, got {len(row)}")
            ids.append(row[0].strip())
            for j, cell in enumerate(row[1:]):
                columns[j].append(_parse_float(cell, path, line, f"variable {names[j]!r}"))
    variables = [
        Variable(name, klass, tuple(column))
        for name, klass, column in zip(names, classes, columns)
    ]
    try:
        return build_variable_table(ids, variables)
    except ValueError as exc:
        raise CsvSchemaError(path, None, str(exc)) from exc


def ingest(
    nodes_path,
    edges_path,
    variables_path=None,
) -> tuple[SpatialGraph, Optional[VariableTable]]:
    """Read and validate the input files into a graph and optional table.

    When a variables file is given, its row ids must be exactly the
    graph's node ids.
    """
    nodes = read_nodes_csv(nodes_path)
    edges = read_edges_csv(edges_path)
    graph = build_graph(nodes, edges)
    table = None
    if variables_path is not None:
        table = read_variables_csv(variables_path)
        graph_ids = set(graph.node_ids)
        table_ids = set(table.ids)
        if graph_ids != table_ids:
            missing = sorted(graph_ids - table_ids)
            extra = sorted(table_ids - graph_ids)
            raise CsvSchemaError(
                variables_path, None,
                f"row ids do not match the node set (missing {missing}, unknown {extra})",
            )
    return graph, table


def export_graph(g: SpatialGraph, nodes_path, edges_path) -> None:
    """Write a graph back out in the ingestion schema (round-trippable)."""
    attr_names = sorted({name for node in g.nodes for name in node.attributes})
    epochs = list(g.epochs())
    with Path(nodes_path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(NODE_COLUMNS) + attr_names)
        for node in g.nodes:
            writer.writerow(
                [node.id, node.label, repr(node.lat), repr(node.lon)]
                + [repr(node.attributes.get(name, 0.0)) for name in attr_names]
            )
    with Path(edges_path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(EDGE_COLUMNS) + [f"time_{epoch}_min" for epoch in epochs])
        for edge in g.edges:
            writer.writerow(
                [edge.u, edge.v, repr(edge.distance_km)]
                + [repr(edge.time_min[epoch]) for epoch in epochs]
            )


# ---------------------------------------------------------------------------
# Report schemas
# ---------------------------------------------------------------------------

REPORT_SCHEMAS: Mapping[str, frozenset] = {
    "measures": frozenset({"provenance", "global", "nearest_neighbor", "per_node", "time"}),
    "omega": frozenset({"provenance", "inputs", "omega", "classification", "threshold",
                        "in_range", "per_replicate_omegas", "ensembles"}),
    "communities": frozenset({"provenance", "assignment", "q", "levels", "community_count"}),
    "fits": frozenset({"provenance", "degree_histogram", "distribution_fits", "scaling_fits"}),
    "regression": frozenset({"provenance", "selection", "models"}),
}


def validate_report(name: str, payload: Mapping) -> None:
    """Reject payloads whose top-level fields stray from the schema."""
    if name not in REPORT_SCHEMAS:
        raise SchemaError(f"unknown report {name!r}")
    allowed = REPORT_SCHEMAS[name]
    unknown = set(payload) - allowed
    if unknown:
        raise SchemaError(f"report {name!r} has unknown fields: {sorted(unknown)}")
    if "provenance" not in payload:
        raise SchemaError(f"report {name!r} is missing its provenance block")


def finite_or_none(value):
    """Map non-finite floats to None so JSON stays standard."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def sanitize(obj):
    """Recursively apply finite_or_none over dicts/lists/tuples."""
    if isinstance(obj, dict):
        return {key: sanitize(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(value) for value in obj]
    return finite_or_none(obj)
