"""Command-line entry point: ``sgc <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import nullcontext

import numpy as np

from . import communicability, embedding, graph, oracle, pipeline
from . import io as sio
from .exceptions import DisconnectedGraphError, GraphFormatError, NumericalError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(text: str, out: str | None) -> None:
    if out:
        sio.atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _config_flags(p: argparse.ArgumentParser, seed_required: bool) -> None:
    p.add_argument("--metric", choices=pipeline.METRICS, default="angle")
    p.add_argument("--dim", type=int, default=2, help="embedding dimension")
    p.add_argument("--embedder", choices=pipeline.EMBEDDERS, default="classical")
    p.add_argument("--clusterer", choices=pipeline.CLUSTERERS, default="kmeans_silhouette")
    p.add_argument("--kmin", type=int, default=2)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--k", type=int, default=None, help="fixed number of clusters")
    p.add_argument("--seed", type=int, required=seed_required, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--balance-tol", type=float, default=1e-8)
    p.add_argument("--silhouette-space", choices=pipeline.SILHOUETTE_SPACES, default="embedding")


def _config(args, polarize: bool = True) -> pipeline.PipelineConfig:
    try:
        return _build_config(args, polarize)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _build_config(args, polarize: bool) -> pipeline.PipelineConfig:
    return pipeline.PipelineConfig(
        metric=args.metric, embed_dim=args.dim, embedder=args.embedder, clusterer=args.clusterer,
        kmin=args.kmin, kmax=args.kmax, seed=args.seed, balance_tol=args.balance_tol,
        n_clusters=args.k, restarts=args.restarts, silhouette_space=args.silhouette_space,
        polarize=polarize,
    ).validate()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sgc", description="Communicability geometry of signed graphs.", allow_abbrev=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("balance", help="structural balance test", allow_abbrev=False)
    b.add_argument("graph")
    b.add_argument("--per-component", action="store_true")

    m = sub.add_parser("matrix", help="communicability matrices", allow_abbrev=False)
    m.add_argument("graph")
    m.add_argument("--what", choices=("gamma", "edm", "xi", "theta", "rho", "dtheta"), default="gamma")
    m.add_argument("--format", choices=("csv", "json"), default="csv")
    m.add_argument("--out")

    e = sub.add_parser("embed", help="2-D embedding of the angle or distance matrix", allow_abbrev=False)
    e.add_argument("graph")
    e.add_argument("--metric", choices=pipeline.METRICS, default="angle")
    e.add_argument("--dim", type=int, default=2)
    e.add_argument("--embedder", choices=pipeline.EMBEDDERS, default="classical")
    e.add_argument("--out")

    c = sub.add_parser("cluster", help="faction detection", allow_abbrev=False)
    c.add_argument("graph")
    _config_flags(c, seed_required=True)
    c.add_argument("--out")

    a = sub.add_parser("analyze", help="full pipeline, JSON report", allow_abbrev=False)
    a.add_argument("graph")
    _config_flags(a, seed_required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--plot-dir")
    a.add_argument("--groups", help="label,group sidecar CSV for grouped KDE output")
    a.add_argument("--bandwidth", type=float, default=0.05)
    a.add_argument("--no-polarization", action="store_true")
    a.add_argument("--no-timings", action="store_true")

    z = sub.add_parser("polarize", help="polarization scores and KDE", allow_abbrev=False)
    z.add_argument("graph")
    z.add_argument("--metric", choices=pipeline.METRICS, default="angle")
    z.add_argument("--groups")
    z.add_argument("--bandwidth", type=float, default=0.05)
    z.add_argument("--out")
    z.add_argument("--kde-out")

    g = sub.add_parser("generate", help="write a synthetic signed graph", allow_abbrev=False)
    g.add_argument("family", choices=("pentagon", "balanced-complete", "clique-ring", "pendant-clique",
                                      "clique-tail", "random-balanced", "random-signed", "triangle",
                                      "figure1", "figure1-unbalanced"))
    g.add_argument("--n", type=int, default=6)
    g.add_argument("--split", type=int, default=0)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--r", type=int, default=3)
    g.add_argument("--q", type=int, default=9)
    g.add_argument("--p", type=float, default=0.3)
    g.add_argument("--fraction", type=float, default=0.5)
    g.add_argument("--negatives", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")

    v = sub.add_parser("ingest-votes", help="roll-call CSV to signed edge list", allow_abbrev=False)
    v.add_argument("votes")
    v.add_argument("--threshold", type=float, required=True)
    v.add_argument("--denominator", choices=("total", "both"), default="total")
    v.add_argument("--out")

    o = sub.add_parser("oracle", help=argparse.SUPPRESS, allow_abbrev=False)
    o.add_argument("check", choices=("walks", "frustration", "taylor"))
    o.add_argument("graph")
    o.add_argument("--i")
    o.add_argument("--j")
    o.add_argument("--length", type=int, default=2)
    o.add_argument("--tol", type=float, default=1e-12)
    return p


def _generate(args) -> graph.SignedGraph:
    f = args.family
    if f == "pentagon":
        return graph.gen_pentagon()
    if f == "balanced-complete":
        return graph.gen_balanced_complete(args.n, args.split)
    if f == "clique-ring":
        return graph.gen_clique_ring(args.k, args.r)
    if f == "pendant-clique":
        return graph.gen_pendant_clique(args.q)
    if f == "clique-tail":
        return graph.gen_clique_tail(args.q)
    if f == "random-balanced":
        return graph.gen_random_balanced(args.n, args.p, args.fraction, args.seed)
    if f == "random-signed":
        return graph.gen_random_signed(args.n, args.p, args.fraction, args.seed)
    if f == "triangle":
        return graph.gen_triangle(args.negatives)
    return graph.gen_figure1(balanced=(f == "figure1"))


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "generate":
        _emit(graph.dump_edge_list(_generate(args)), args.out)
        return EXIT_OK
    if cmd == "ingest-votes":
        vm = sio.read_vote_matrix(args.votes)
        g = pipeline.ingest_vote_matrix(vm, args.threshold, args.denominator)
        if not g.connected:
            print("warning: resulting graph is disconnected", file=sys.stderr)
        _emit(graph.dump_edge_list(g), args.out)
        return EXIT_OK

    g = sio.read_graph(args.graph)

    if cmd == "balance":
        res = graph.detect_balance(g, per_component=args.per_component)
        if res.balanced:
            lines = ["balanced"] + [f"{lab}\t{'+1' if s > 0 else '-1'}"
                                    for lab, s in zip(g.labels, res.indicator.signs)]
        else:
            lines = ["unbalanced", " ".join(g.labels[i] for i in res.witness)]
        print("\n".join(lines))
        return EXIT_OK

    if cmd == "matrix":
        cs = communicability.communicability_set(g)
        M = {"gamma": cs.gamma, "edm": cs.edm, "xi": cs.xi, "theta": cs.theta,
             "rho": cs.rho, "dtheta": cs.d_theta}[args.what]
        text = sio.matrix_to_csv(M) if args.format == "csv" else sio.matrix_to_json(M, g.labels)
        _emit(text, args.out)
        return EXIT_OK

    if cmd == "embed":
        cs = communicability.communicability_set(g)
        sq, _ = pipeline.dissimilarities(cs, args.metric)
        emb = embedding.classical_mds(sq, args.dim)
        if args.embedder == "classical+smacof":
            emb = embedding.smacof_refine(emb, np.sqrt(sq))
        header = "label," + ",".join(f"x{k + 1}" for k in range(emb.dim)) + "\n"
        body = "".join(lab + "," + ",".join(sio.format_float(v) for v in row) + "\n"
                       for lab, row in zip(g.labels, emb.coords))
        _emit(header + body, args.out)
        return EXIT_OK

    if cmd == "cluster":
        rep = pipeline.analyze(g, _config(args, polarize=False))
        text = "label,cluster\n" + "".join(f"{lab},{c}\n" for lab, c in zip(g.labels, rep.labels["labels"]))
        _emit(text, args.out)
        return EXIT_OK

    if cmd == "analyze":
        rep = pipeline.analyze(g, _config(args, polarize=not args.no_polarization))
        sio.write_report(rep, args.out, include_timings=not args.no_timings)
        if args.plot_dir:
            groups = sio.read_groups(args.groups) if args.groups else None
            sio.emit_plot_data(rep, args.plot_dir, groups, args.bandwidth)
        print(json.dumps(pipeline.report_summary(rep)))
        return EXIT_OK

    if cmd == "polarize":
        cs = communicability.communicability_set(g)
        sq, _ = pipeline.dissimilarities(cs, args.metric)
        pol = embedding.pca_polarization(embedding.classical_mds(sq, min(2, g.n - 1)))
        text = "label,score\n" + "".join(f"{lab},{sio.format_float(s)}\n" for lab, s in zip(g.labels, pol.scores))
        _emit(text, args.out)
        print(f"explained_fraction={pol.explained_fraction:.6f}", file=sys.stderr)
        if args.groups:
            x, dens = pipeline.group_kde(pol.scores, g.labels, sio.read_groups(args.groups), args.bandwidth)
            names = list(dens)
            rows = "x," + ",".join(names) + "\n" + "".join(
                sio.format_float(xv) + "," + ",".join(sio.format_float(dens[nm][t]) for nm in names) + "\n"
                for t, xv in enumerate(x))
            _emit(rows, args.kde_out)
        return EXIT_OK

    if cmd == "oracle":
        if args.check == "walks":
            if args.i is None or args.j is None:
                raise UsageError("oracle walks needs --i and --j")
            wc = oracle.count_signed_walks(g, args.i, args.j, args.length)
            power = oracle.integer_matrix_power(g.adjacency, args.length)[g.index(args.i), g.index(args.j)]
            print(f"mu_plus={wc.mu_plus} mu_minus={wc.mu_minus} A^k={power}")
        elif args.check == "frustration":
            fr = oracle.min_frustration_bipartitions(g)
            print(f"min_frustration={fr.min_frustration} minimizers={len(fr.minimizers)}")
            for part in sorted(fr.minimizers, reverse=True):
                print(" ".join("+" if s > 0 else "-" for s in part))
        else:
            T = oracle.taylor_exp(g.adjacency, args.tol)
            diff = float(np.max(np.abs(T - communicability.communicability_matrix(g))))
            print(f"max|taylor - spectral|={diff:.3e}")
        return EXIT_OK
    raise UsageError(f"unknown command {cmd}")


def _thread_limit():
    raw = os.environ.get("SGC_THREADS", "0")
    try:
        count = int(raw)
    except ValueError:
        raise UsageError(f"SGC_THREADS must be an integer, got {raw!r}") from None
    if count <= 0:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=count)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        with _thread_limit():
            return _dispatch(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphFormatError, DisconnectedGraphError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
