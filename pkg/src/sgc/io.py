"""
File formats: edge lists, matrices, reports, dendrograms, vote matrices and
plot-ready CSV data. Every writer goes through :func:`atomic_write`.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .clustering import Dendrogram, to_newick
from .exceptions import GraphFormatError
from .graph import SignedGraph, dump_edge_list, load_edge_list
from .pipeline import AnalysisReport, VoteMatrix, group_kde


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_graph(path) -> SignedGraph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def write_graph(g: SignedGraph, path) -> None:
    atomic_write(path, dump_edge_list(g))


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def matrix_to_csv(M) -> str:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return "".join(",".join(format_float(x) for x in row) + "\n" for row in M)


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [line for line in text.splitlines() if line.strip() and not line.startswith("#")]
    return np.array([[float(x) for x in r.split(",")] for r in rows], dtype=float)


def matrix_to_json(M, labels: Sequence[str] | None = None) -> str:
    payload = {"labels": list(labels) if labels is not None else None,
               "matrix": np.asarray(M, dtype=float).tolist()}
    return json.dumps(payload, indent=1) + "\n"


def matrix_from_json(text: str) -> tuple[np.ndarray, list[str] | None]:
    d = json.loads(text)
    return np.asarray(d["matrix"], dtype=float), d.get("labels")


def report_to_json(report: AnalysisReport, include_timings: bool = True) -> str:
    return json.dumps(report.to_dict(include_timings), indent=1, allow_nan=False) + "\n"


def report_from_json(text: str) -> AnalysisReport:
    return AnalysisReport.from_dict(json.loads(text))


def write_report(report: AnalysisReport, path, include_timings: bool = True) -> None:
    atomic_write(path, report_to_json(report, include_timings))


def read_report(path) -> AnalysisReport:
    with open(path, encoding="utf-8") as fh:
        return report_from_json(fh.read())


def dendrogram_to_json(d: Dendrogram) -> str:
    return json.dumps({"linkage": d.linkage, "merges": d.to_list()}, indent=1) + "\n"


def dendrogram_from_json(text: str) -> Dendrogram:
    d = json.loads(text)
    return Dendrogram.from_list(d["merges"], d["linkage"])


def read_vote_matrix(path) -> VoteMatrix:
    """CSV with a header ``voter,<ballot ids...>`` and one row per voter."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if len(rows) < 2:
        raise GraphFormatError("vote matrix needs a header and at least one voter row")
    header, body = rows[0], rows[1:]
    ballots = header[1:]
    voters, votes = [], []
    tokens = {"1": 1, "+1": 1, "+": 1, "-1": -1, "-": -1, "0": 0, "": 0}
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise GraphFormatError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            votes.append([tokens[x.strip()] for x in row[1:]])
        except KeyError as exc:
            raise GraphFormatError(f"invalid vote {exc.args[0]!r}", lineno) from None
        voters.append(row[0].strip())
    return VoteMatrix(tuple(voters), tuple(ballots), np.array(votes, dtype=np.int64))


def read_groups(path) -> dict[str, str]:
    """Sidecar ``label,group`` CSV; a ``label,group`` header line is optional."""
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 2:
                raise GraphFormatError("expected label,group", lineno)
            if lineno == 1 and [c.strip().lower() for c in row] == ["label", "group"]:
                continue
            out[row[0].strip()] = row[1].strip()
    return out


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def emit_plot_data(report: AnalysisReport, directory, groups: dict[str, str] | None = None,
                   bandwidth: float = 0.05) -> list[Path]:
    """Write plot-ready CSV/Newick files for ``report`` into ``directory``."""
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {d}: {exc}") from exc
    if not os.access(d, os.W_OK):
        raise OSError(f"output directory {d} is not writable")
    nodes = report.labels_nodes
    X = report.coords
    labels = report.cluster_labels
    written = []

    axes = ["x", "y"] if X.shape[1] == 2 else [f"x{k + 1}" for k in range(X.shape[1])]
    rows = [["label", *axes, "cluster"]]
    rows += [[lab, *(format_float(v) for v in X[i]), int(labels[i])] for i, lab in enumerate(nodes)]
    atomic_write(d / "embedding.csv", _csv(rows))
    written.append(d / "embedding.csv")

    dend = Dendrogram.from_list(report.dendrogram["merges"], report.dendrogram["linkage"])
    atomic_write(d / "dendrogram.nwk", to_newick(dend, nodes) + "\n")
    written.append(d / "dendrogram.nwk")

    rows = [["k", "score"]] + [[c["k"], format_float(c["silhouette"])] for c in report.silhouette_curve
                               if c["silhouette"] is not None]
    atomic_write(d / "silhouette.csv", _csv(rows))
    written.append(d / "silhouette.csv")

    if report.polarization is None:
        print("no polarization scores in report; polarization.csv not written", file=sys.stderr)
        return written
    scores = report.polarization["scores"]
    rows = [["label", "score"]] + [[lab, format_float(s)] for lab, s in zip(nodes, scores)]
    atomic_write(d / "polarization.csv", _csv(rows))
    written.append(d / "polarization.csv")

    if groups:
        x, dens = group_kde(scores, nodes, groups, bandwidth)
        names = list(dens)
        rows = [["x", *names]]
        rows += [[format_float(xv), *(format_float(dens[nm][t]) for nm in names)] for t, xv in enumerate(x)]
        atomic_write(d / "kde.csv", _csv(rows))
        written.append(d / "kde.csv")
    return written
