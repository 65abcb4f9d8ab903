"""Text emitters for analysis results: CSV, JSON and DOT.

Real numbers are written with 12 significant digits; exact integers are
written in full.
"""

import csv
import io
import json
from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np
import numpy.typing as npt

from .analysis.clusters import ClusterGraph, ClusterSet
from .analysis.density import DensityCurve
from .analysis.information import InfoContent
from .genome import LETTERS

CURVES_HEADER = ("rank", "n", "cum_viable", "cum_total", "rho", "phi")
BASELINES_HEADER = ("n", "phi_min", "phi_ne")
EPISTASIS_HEADER = ("rank", "n", "phi", "phi_ne", "sign")
CLUSTERS_HEADER = ("id", "size", "representative", "edge_count")
ROBUSTNESS_HEADER = ("rank", "letters", "robustness", "compressed_depth")
DISTRIBUTION_HEADER = ("robustness", "count")


def fmt(value: float) -> str:
    """Format a real number with 12 significant digits."""
    return f"{value:.12g}"


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _json(document: Any) -> str:
    return json.dumps(document, indent=2) + "\n"


def letters_of(symbols: Iterable[int]) -> str:
    return "".join(LETTERS[int(s)] for s in symbols)


def curves_csv(
    curves: Sequence[DensityCurve], mean: npt.NDArray[np.float64] | None = None
) -> str:
    """Curves CSV, one row per (genome, n); a mean curve uses rank ``mean``.

    The mean has no exact counts, so its ``cum_viable``, ``cum_total`` and
    ``rho`` cells are empty.
    """
    rows: list[list[str | int]] = []
    for curve in curves:
        for n in range(curve.length + 1):
            rows.append(
                [
                    curve.rank,
                    n,
                    curve.cum_viable[n],
                    curve.cum_total[n],
                    fmt(float(curve.rho[n])),
                    fmt(float(curve.phi[n])),
                ]
            )
    if mean is not None:
        for n, value in enumerate(mean.tolist()):
            rows.append(["mean", n, "", "", "", fmt(value)])
    return _csv(CURVES_HEADER, rows)


def curves_json(
    curves: Sequence[DensityCurve], mean: npt.NDArray[np.float64] | None = None
) -> str:
    document: dict[str, Any] = {
        "curves": [
            {
                "rank": curve.rank,
                "counts": list(curve.counts),
                "cum_viable": list(curve.cum_viable),
                "cum_total": [str(total) for total in curve.cum_total],
                "rho": [float(fmt(float(v))) for v in curve.rho],
                "phi": [float(fmt(float(v))) for v in curve.phi],
            }
            for curve in curves
        ]
    }
    if mean is not None:
        document["mean"] = [float(fmt(v)) for v in mean.tolist()]
    return _json(document)


def baselines_csv(
    phi_min: npt.NDArray[np.float64], phi_ne: npt.NDArray[np.float64] | None
) -> str:
    """Baselines CSV; ``phi_ne`` cells are empty when no information value is known."""
    rows = []
    for n, floor in enumerate(phi_min.tolist()):
        line = fmt(float(phi_ne[n])) if phi_ne is not None else ""
        rows.append([n, fmt(floor), line])
    return _csv(BASELINES_HEADER, rows)


def epistasis_csv(
    curves: Sequence[DensityCurve],
    phi_ne: npt.NDArray[np.float64],
    signs: Sequence[npt.NDArray[np.int8]],
) -> str:
    rows = []
    for curve, curve_signs in zip(curves, signs, strict=True):
        for n in range(curve.length + 1):
            rows.append(
                [curve.rank, n, fmt(float(curve.phi[n])), fmt(float(phi_ne[n])), int(curve_signs[n])]
            )
    return _csv(EPISTASIS_HEADER, rows)


def clusters_document(clusters: ClusterSet) -> dict[str, Any]:
    return {
        "mode": clusters.mode,
        "components": [
            {
                "id": component.id,
                "size": component.size,
                "representative": component.representative,
                "edge_count": component.edge_count,
            }
            for component in clusters.components
        ],
    }


def clusters_json(clusters: ClusterSet) -> str:
    """Clusters JSON: {mode, components: [{id, size, representative, edge_count}]}."""
    return _json(clusters_document(clusters))


def clusters_csv(clusters: ClusterSet) -> str:
    return _csv(
        CLUSTERS_HEADER,
        (
            [c.id, c.size, c.representative, c.edge_count]
            for c in clusters.components
        ),
    )


def graph_json(graph: ClusterGraph) -> str:
    return _json(graph.to_document())


def graph_dot(graph: ClusterGraph) -> str:
    return graph.to_dot()


def robustness_csv(
    ranks: npt.NDArray[np.int64],
    symbols: npt.NDArray[np.int64],
    values: npt.NDArray[np.int64],
    depths: Sequence[int],
) -> str:
    """Robustness table: one row per genome."""
    return _csv(
        ROBUSTNESS_HEADER,
        (
            [int(rank), letters_of(row), int(value), depth]
            for rank, row, value, depth in zip(ranks, symbols, values, depths, strict=True)
        ),
    )


def robustness_json(
    ranks: npt.NDArray[np.int64],
    symbols: npt.NDArray[np.int64],
    values: npt.NDArray[np.int64],
    depths: Sequence[int],
) -> str:
    return _json(
        [
            {
                "rank": int(rank),
                "letters": letters_of(row),
                "robustness": int(value),
                "compressed_depth": depth,
            }
            for rank, row, value, depth in zip(ranks, symbols, values, depths, strict=True)
        ]
    )


def distribution_csv(histogram: npt.NDArray[np.int64]) -> str:
    return _csv(DISTRIBUTION_HEADER, ([v, int(count)] for v, count in enumerate(histogram)))


def info_document(
    info: InfoContent,
    rotation_class_count: int | None = None,
    cluster_counts: dict[str, int] | None = None,
    largest_fractions: dict[str, float] | None = None,
    self_replicator_count: int | None = None,
) -> dict[str, Any]:
    """Summary document printed by ``info``; missing parts are left out."""
    document: dict[str, Any] = {
        "L": info.length,
        "D": info.alphabet_size,
        "viable_count": info.viable_count,
        "information_mers": float(fmt(info.value)) if info.value is not None else None,
        "information_defined": info.defined,
        "entropy_mers": float(fmt(info.entropy)) if info.entropy is not None else None,
        "fraction": float(fmt(info.fraction)),
    }
    if self_replicator_count is not None:
        document["self_replicator_count"] = self_replicator_count
    if rotation_class_count is not None:
        document["rotation_class_count"] = rotation_class_count
    if cluster_counts is not None:
        document["cluster_count"] = cluster_counts
    if largest_fractions is not None:
        document["largest_cluster_fraction"] = {
            mode: float(fmt(value)) for mode, value in largest_fractions.items()
        }
    return document
