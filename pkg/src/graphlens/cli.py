"""Command-line entry points.

Subcommands: ``synth`` (generate the motif benchmark), ``explain`` (build
views), ``metrics`` (report quality), ``verify`` (re-check emitted views,
nonzero exit naming the violated constraint) and ``match`` (run one pattern
against a dataset).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from graphlens.errors import GraphlensError
from graphlens.gcn import classify_database
from graphlens.graphs import Pattern, match_pattern
from graphlens.metrics import report
from graphlens.runner import run_explain
from graphlens.scoring import Config
from graphlens.verify import verify_view
from graphlens.views import load_view, save_view
from graphlens.weights import load_model, save_model
from graphlens import datasets

log = logging.getLogger("graphlens")


def _load_config(path: str | None) -> Config:
    return Config.load(path) if path else Config()


def _load_db(args, model=None):
    db = datasets.load_tu_dataset(args.dataset, args.name)
    if model is not None:
        classify_database(db, model)
    return db


def _parse_labels(text: str | None):
    if not text:
        return None
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _cmd_synth(args) -> int:
    db = datasets.synth_motif_dataset(args.n_graphs, args.base_nodes, args.seed)
    datasets.write_tu_dataset(db, args.out, args.name)
    truth_path = Path(args.out) / f"{args.name}_motifs.json"
    with open(truth_path, "w") as fh:
        json.dump({str(k): list(v) for k, v in db.ground_truth.items()}, fh, indent=1)
        fh.write("\n")
    if args.weights_out:
        save_model(datasets.standin_motif_model(), args.weights_out)
        log.info("wrote stand-in weights to %s", args.weights_out)
    log.info(
        "wrote %d graphs (%d house / %d cycle) to %s",
        len(db.graphs),
        sum(1 for l in db.dataset_labels.values() if l == 0),
        sum(1 for l in db.dataset_labels.values() if l == 1),
        args.out,
    )
    return 0


def _cmd_explain(args) -> int:
    t0 = time.perf_counter()
    model = load_model(args.weights)
    cfg = _load_config(args.config)
    db = _load_db(args, model)
    log.info("loaded %d graphs in %.2fs", len(db.graphs), time.perf_counter() - t0)
    labels = _parse_labels(args.labels)
    workers = args.workers or int(os.environ.get("GRAPHLENS_WORKERS", "1"))
    t1 = time.perf_counter()
    result = run_explain(db, model, cfg, labels=labels, algo=args.algo, workers=workers)
    log.info(
        "explained with algo=%s workers=%d in %.2fs",
        args.algo,
        workers,
        time.perf_counter() - t1,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for label in sorted(result.views):
        path = out / f"view_label{label}.json"
        save_view(result.views[label], cfg, path)
        view = result.views[label]
        log.info(
            "label %d: %d subgraphs, %d patterns, edge loss %.1f%% -> %s",
            label,
            len(view.subgraphs),
            len(view.patterns),
            view.edge_loss_pct,
            path,
        )
    for label, missed in sorted(result.uncovered.items()):
        if missed:
            log.info("label %d: no explanation for graphs %s", label, list(missed))
    return 0


def _cmd_metrics(args) -> int:
    model = load_model(args.weights)
    db = _load_db(args, model)
    views = [load_view(p, db)[0] for p in args.views]
    rep = report(db, views, model)
    print(f"fidelity+   {rep.fidelity_plus:.4f}")
    print(f"fidelity-   {rep.fidelity_minus:.4f}")
    print(f"sparsity    {rep.sparsity:.4f}")
    print(f"compression {rep.compression:.4f}")
    print(f"edge loss   {rep.edge_loss_pct:.1f}%")
    if rep.missing_graphs:
        print(f"graphs without a view: {list(rep.missing_graphs)}")
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(
                {
                    "fidelity_plus": rep.fidelity_plus,
                    "fidelity_minus": rep.fidelity_minus,
                    "sparsity": rep.sparsity,
                    "compression": rep.compression,
                    "edge_loss_pct": rep.edge_loss_pct,
                    "covered_graphs": list(rep.covered_graphs),
                    "missing_graphs": list(rep.missing_graphs),
                    "per_graph": {str(k): v for k, v in rep.per_graph.items()},
                },
                fh,
                indent=1,
            )
            fh.write("\n")
    return 0


def _cmd_verify(args) -> int:
    model = load_model(args.weights)
    db = _load_db(args, model)
    override = Config.load(args.config) if args.config else None
    for path in args.views:
        view, cfg = load_view(path, db)
        res = verify_view(view, db, model, override or cfg)
        if not res:
            print(f"FAIL {res.constraint}: {path}: {res.detail}")
            return 1
        print(f"OK {path}: label {view.label}, {len(view.subgraphs)} subgraphs verified")
    return 0


def _cmd_match(args) -> int:
    db = _load_db(args)
    with open(args.pattern) as fh:
        doc = json.load(fh)
    pattern = Pattern.build(
        doc["node_types"],
        [(e[0], e[1]) for e in doc.get("edges", [])],
        [e[2] for e in doc.get("edges", [])],
    )
    total = 0
    for gid, g in enumerate(db.graphs):
        if args.graph is not None and gid != args.graph:
            continue
        hits = match_pattern(pattern, g)
        total += len(hits)
        if hits:
            print(f"graph {gid}: {len(hits)} matches")
            if args.show:
                for m in hits:
                    print(f"  {list(m)}")
    print(f"total matches: {total}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphlens", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic motif benchmark")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--name", default="SYNTH", help="dataset file prefix")
    p.add_argument("--n-graphs", type=int, default=40)
    p.add_argument("--base-nodes", type=int, default=30)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--weights-out", help="also write the stand-in classifier weights")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("explain", help="build explanation views for a dataset")
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--name", required=True, help="dataset file prefix")
    p.add_argument("--weights", required=True, help="model weights file")
    p.add_argument("--config", help="config JSON (defaults otherwise)")
    p.add_argument("--algo", choices=("approx", "stream"), default="approx")
    p.add_argument("--labels", help="comma-separated labels of interest (default: all)")
    p.add_argument("--out", required=True, help="output directory for view files")
    p.add_argument("--workers", type=int, default=0,
                   help="process count (default: GRAPHLENS_WORKERS or 1)")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("metrics", help="score emitted views against a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--views", nargs="+", required=True)
    p.add_argument("--json-out", help="also write the report as JSON")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("verify", help="re-verify emitted views (C1/C2/C3)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--views", nargs="+", required=True)
    p.add_argument("--config", help="override the config echoed in the view file")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("match", help="match one pattern against a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--pattern", required=True, help="pattern JSON file")
    p.add_argument("--graph", type=int, help="restrict to one graph id")
    p.add_argument("--show", action="store_true", help="print the matchings")
    p.set_defaults(func=_cmd_match)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraphlensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
