"""
End-to-end faction analysis and roll-call vote ingestion.

``analyze`` runs: communicability angles (or distances) -> classical MDS ->
clustering, plus a balance check and polarization scores, and packs the
results into a JSON-ready :class:`AnalysisReport`.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from .clustering import (
    agglomerative,
    best_by_silhouette,
    cut_dendrogram,
    pairwise_distances,
    ClusterLabels,
    kmeans,
    silhouette,
    silhouette_sweep,
)
from .communicability import CLAMP_WARN, balance_via_exponential, communicability_set
from .embedding import (
    NEGATIVE_MASS_WARN,
    classical_mds,
    default_kde_grid,
    gaussian_kde,
    pca_polarization,
    smacof_refine,
)
from .exceptions import DisconnectedGraphError
from .graph import SignedGraph, detect_balance

METRICS = ("angle", "distance")
EMBEDDERS = ("classical", "classical+smacof")
CLUSTERERS = ("kmeans_silhouette", "ward", "average")
SILHOUETTE_SPACES = ("embedding", "dissimilarity")
REPORT_KEYS = (
    "config", "balance", "gamma_summary", "embedding", "silhouette_curve",
    "labels", "dendrogram", "polarization", "warnings", "timings_ms",
)


@dataclass(frozen=True)
class PipelineConfig:
    metric: str = "angle"
    embed_dim: int = 2
    embedder: str = "classical"
    clusterer: str = "kmeans_silhouette"
    kmin: int = 2
    kmax: int | None = None
    seed: int = 0
    balance_tol: float = 1e-8
    n_clusters: int | None = None
    restarts: int = 20
    silhouette_space: str = "embedding"
    smacof_max_iter: int = 300
    smacof_tol: float = 1e-6
    polarize: bool = True

    def validate(self) -> "PipelineConfig":
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        if self.embedder not in EMBEDDERS:
            raise ValueError(f"embedder must be one of {EMBEDDERS}")
        if self.clusterer not in CLUSTERERS:
            raise ValueError(f"clusterer must be one of {CLUSTERERS}")
        if self.silhouette_space not in SILHOUETTE_SPACES:
            raise ValueError(f"silhouette_space must be one of {SILHOUETTE_SPACES}")
        if self.embed_dim < 1:
            raise ValueError("embed_dim must be at least 1")
        if self.kmin < 2:
            raise ValueError("kmin must be at least 2")
        if self.kmax is not None and self.kmax < self.kmin:
            raise ValueError("kmax must be >= kmin")
        if self.n_clusters is not None and self.n_clusters < 1:
            raise ValueError("n_clusters must be positive")
        if self.balance_tol <= 0:
            raise ValueError("balance_tol must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        return self


@dataclass
class AnalysisReport:
    """Plain-data pipeline output; ``to_dict`` gives the stable JSON layout."""

    config: dict
    labels_nodes: list[str]
    balance: dict
    gamma_summary: dict
    embedding: dict
    silhouette_curve: list[dict]
    labels: dict
    dendrogram: dict
    polarization: dict | None
    warnings: list[str] = field(default_factory=list)
    timings_ms: dict = field(default_factory=dict)

    def to_dict(self, include_timings: bool = True) -> dict:
        out = {
            "config": self.config,
            "nodes": self.labels_nodes,
            "balance": self.balance,
            "gamma_summary": self.gamma_summary,
            "embedding": self.embedding,
            "silhouette_curve": self.silhouette_curve,
            "labels": self.labels,
            "dendrogram": self.dendrogram,
            "polarization": self.polarization,
            "warnings": self.warnings,
            "timings_ms": self.timings_ms if include_timings else {},
        }
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        missing = [k for k in REPORT_KEYS if k not in d]
        if missing:
            raise ValueError(f"report is missing keys {missing}")
        return cls(
            config=d["config"],
            labels_nodes=list(d.get("nodes", [])),
            balance=d["balance"],
            gamma_summary=d["gamma_summary"],
            embedding=d["embedding"],
            silhouette_curve=d["silhouette_curve"],
            labels=d["labels"],
            dendrogram=d["dendrogram"],
            polarization=d["polarization"],
            warnings=list(d["warnings"]),
            timings_ms=d["timings_ms"],
        )

    @property
    def cluster_labels(self) -> np.ndarray:
        return np.asarray(self.labels["labels"], dtype=np.int64)

    @property
    def coords(self) -> np.ndarray:
        return np.asarray(self.embedding["coords"], dtype=float)


def _floats(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def dissimilarities(cs, metric: str) -> tuple[np.ndarray, np.ndarray]:
    """(squared-distance matrix to embed, plain dissimilarity for linkage)."""
    if metric == "angle":
        return cs.d_theta, cs.theta
    return cs.edm, cs.xi


def analyze(g: SignedGraph, cfg: PipelineConfig | None = None) -> AnalysisReport:
    cfg = (cfg or PipelineConfig()).validate()
    if not g.connected:
        raise DisconnectedGraphError("analysis needs a connected graph")
    n = g.n
    if n < 3 and cfg.n_clusters is None:
        raise ValueError("silhouette-based selection needs at least 3 nodes; set n_clusters")
    notes: list[str] = []
    timings: dict[str, float] = {}
    clock = time.perf_counter

    t0 = clock()
    bal = detect_balance(g)
    bal_exp = balance_via_exponential(g, cfg.balance_tol)
    if bal.balanced != bal_exp:
        notes.append("exponential balance test disagrees with the combinatorial one")
    balance = {
        "balanced": bal.balanced,
        "balanced_exponential": bal_exp,
        "indicator": None if bal.indicator is None else bal.indicator.signs.tolist(),
        "witness": None if bal.witness is None else [g.labels[i] for i in bal.witness],
    }
    timings["balance"] = (clock() - t0) * 1e3

    t0 = clock()
    cs = communicability_set(g)
    if cs.clamp_excess > CLAMP_WARN:
        notes.append(f"cosine clamp exceeded tolerance by {cs.clamp_excess:.3g}")
    G = cs.gamma
    off = G[~np.eye(n, dtype=bool)] if n > 1 else np.zeros(1)
    gamma_summary = {
        "min": float(G.min()),
        "max": float(G.max()),
        "min_offdiagonal": float(off.min()),
        "max_offdiagonal": float(off.max()),
        "min_diagonal": float(np.diag(G).min()),
        "clamp_excess": cs.clamp_excess,
    }
    timings["communicability"] = (clock() - t0) * 1e3

    t0 = clock()
    sq, dis = dissimilarities(cs, cfg.metric)
    dim = min(cfg.embed_dim, n - 1)
    if dim != cfg.embed_dim:
        notes.append(f"embedding dimension reduced to {dim} for {n} nodes")
    emb = classical_mds(sq, dim)
    if cfg.metric == "angle" and emb.negative_mass > NEGATIVE_MASS_WARN:
        notes.append(f"negative MDS eigenvalue mass {emb.negative_mass:.3g}")
    if cfg.embedder == "classical+smacof":
        emb = smacof_refine(emb, np.sqrt(sq), cfg.smacof_max_iter, cfg.smacof_tol)
    gamma_summary["negative_mds_mass"] = emb.negative_mass
    timings["embedding"] = (clock() - t0) * 1e3

    t0 = clock()
    X = emb.coords
    score_dist = pairwise_distances(X) if cfg.silhouette_space == "embedding" else dis
    if cfg.clusterer == "average":
        dend = agglomerative(dis, "average")
    else:
        dend = agglomerative(pairwise_distances(X), "ward")

    curve: dict[int, ClusterLabels] = {}
    if cfg.n_clusters is not None:
        k = min(cfg.n_clusters, n)
        if cfg.clusterer == "kmeans_silhouette":
            chosen = kmeans(X, k, seed=cfg.seed, restarts=cfg.restarts)
        else:
            chosen = cut_dendrogram(dend, k)
        if chosen.k >= 2:
            chosen = ClusterLabels(chosen.labels, chosen.k, chosen.inertia,
                                   silhouette(score_dist, chosen.labels))
        curve[k] = chosen
    else:
        kmax = min(10, n - 1) if cfg.kmax is None else min(cfg.kmax, n - 1)
        if kmax < cfg.kmin:
            raise ValueError(f"no admissible cluster count in [{cfg.kmin}, {kmax}]")
        if cfg.clusterer == "kmeans_silhouette":
            curve = silhouette_sweep(X, cfg.kmin, kmax, cfg.seed, cfg.restarts, score_dist)
        else:
            for k in range(cfg.kmin, kmax + 1):
                cut = cut_dendrogram(dend, k)
                curve[k] = ClusterLabels(cut.labels, cut.k, None, silhouette(score_dist, cut.labels))
        chosen = best_by_silhouette(curve)
    timings["clustering"] = (clock() - t0) * 1e3

    t0 = clock()
    polarization = None
    if cfg.polarize:
        pol = pca_polarization(emb)
        polarization = {"scores": _floats(pol.scores), "explained_fraction": pol.explained_fraction}
    timings["polarization"] = (clock() - t0) * 1e3

    embedding = {
        "coords": _floats(X),
        "mds_eigenvalues": _floats(emb.mds_eigenvalues),
        "negative_mass": emb.negative_mass,
        "stress": emb.stress,
    }
    labels = {
        "labels": chosen.labels.tolist(),
        "k": chosen.k,
        "inertia": chosen.inertia,
        "mean_silhouette": chosen.mean_silhouette,
    }
    curve_out = [{"k": k, "silhouette": c.mean_silhouette} for k, c in sorted(curve.items())]
    config = asdict(cfg)
    for msg in notes:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return AnalysisReport(
        config=config,
        labels_nodes=list(g.labels),
        balance=balance,
        gamma_summary=gamma_summary,
        embedding=embedding,
        silhouette_curve=curve_out,
        labels=labels,
        dendrogram={"linkage": dend.linkage, "merges": dend.to_list()},
        polarization=polarization,
        warnings=notes,
        timings_ms=timings,
    )


# --------------------------------------------------------------------------
# Roll-call ingestion
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VoteMatrix:
    """Rows are voters, columns ballots; +1 yes, -1 no, 0 absent or abstained."""

    voters: tuple[str, ...]
    ballots: tuple[str, ...]
    votes: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.votes)
        voters = tuple(str(v) for v in self.voters)
        ballots = tuple(str(b) for b in self.ballots)
        if V.shape != (len(voters), len(ballots)):
            raise ValueError(f"vote array shape {V.shape} does not match {len(voters)}x{len(ballots)}")
        if len(voters) < 2 or len(ballots) < 1:
            raise ValueError("need at least 2 voters and 1 ballot")
        if len(set(voters)) != len(voters):
            raise ValueError("voter labels must be unique")
        if not np.isin(V, (-1, 0, 1)).all():
            raise ValueError("votes must be -1, 0 or +1")
        V = V.astype(np.int64)
        V.setflags(write=False)
        object.__setattr__(self, "voters", voters)
        object.__setattr__(self, "ballots", ballots)
        object.__setattr__(self, "votes", V)


def vote_similarity(v: VoteMatrix, denominator: str = "total") -> np.ndarray:
    """(agreements - disagreements) / ballots for every voter pair.

    Only ballots where both voters cast +1 or -1 count as agreement or
    disagreement. ``denominator="total"`` divides by all ballots,
    ``"both"`` by the ballots where both voted.
    """
    V = v.votes.astype(float)
    net = V @ V.T
    if denominator == "total":
        S = net / V.shape[1]
    elif denominator == "both":
        P = (V != 0).astype(float)
        both = P @ P.T
        with np.errstate(divide="ignore", invalid="ignore"):
            S = np.where(both > 0, net / np.where(both > 0, both, 1.0), 0.0)
    else:
        raise ValueError("denominator must be 'total' or 'both'")
    np.fill_diagonal(S, 0.0)
    return S


def ingest_vote_matrix(v: VoteMatrix, threshold: float, denominator: str = "total") -> SignedGraph:
    """Signed graph keeping voter pairs with ``|similarity| > threshold``."""
    if not 0 <= threshold < 1:
        raise ValueError("threshold must lie in [0, 1)")
    silent = [v.voters[i] for i in np.flatnonzero(~np.any(v.votes != 0, axis=1))]
    if silent:
        raise ValueError(f"voters with no recorded yes/no vote: {', '.join(silent)}")
    S = vote_similarity(v, denominator)
    A = np.where(np.abs(S) > threshold, np.sign(S), 0).astype(np.int64)
    np.fill_diagonal(A, 0)
    return SignedGraph(v.voters, A)


def group_kde(scores: Sequence[float], labels: Sequence[str], groups: dict[str, str],
              bandwidth: float = 0.05, grid=None) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Per-group Gaussian KDE of polarization scores."""
    x = default_kde_grid() if grid is None else np.asarray(grid, dtype=float)
    by_group: dict[str, list[float]] = {}
    for lab, s in zip(labels, scores):
        if lab in groups:
            by_group.setdefault(groups[lab], []).append(float(s))
    return x, {gname: gaussian_kde(vals, bandwidth, x) for gname, vals in sorted(by_group.items())}


def report_summary(report: AnalysisReport) -> dict[str, Any]:
    """Short human-oriented digest used by the CLI."""
    return {
        "nodes": len(report.labels_nodes),
        "balanced": report.balance["balanced"],
        "k": report.labels["k"],
        "mean_silhouette": report.labels["mean_silhouette"],
        "warnings": len(report.warnings),
    }
