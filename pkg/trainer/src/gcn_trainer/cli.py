"""Command line entry point: train, export weights, emit parity logits."""

from __future__ import annotations

import argparse
import sys

from gcn_trainer.data import load_dataset
from gcn_trainer.train import TrainRun, parity_report, save_json, train


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gcn-trainer",
        description="Train the three-layer convolution classifier on a "
        "text-format graph dataset and export interchange weights.",
    )
    ap.add_argument("--dataset-dir", required=True)
    ap.add_argument("--name", required=True, help="dataset file prefix")
    ap.add_argument("--epochs", type=int, default=200)
    ap.add_argument("--dim", type=int, default=32, help="hidden embedding width")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lr", type=float, default=0.001)
    ap.add_argument("--out", required=True, help="weights JSON path")
    ap.add_argument("--parity-out", help="parity logits JSON path")
    ap.add_argument(
        "--parity-dataset-dir",
        help="dataset to evaluate parity logits on (default: training dataset)",
    )
    ap.add_argument("--parity-name", help="parity dataset prefix")
    ap.add_argument("--parity-sample", type=int, default=100)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        bundle = load_dataset(args.dataset_dir, args.name)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    run = TrainRun(
        dataset_dir=args.dataset_dir,
        name=args.name,
        seed=args.seed,
        epochs=args.epochs,
        dim=args.dim,
        lr=args.lr,
    )
    model = train(run, bundle)
    for part in ("train", "val", "test"):
        print(f"{part} accuracy {run.accuracies[part]:.4f}")
    save_json(model.export(bundle.feature_dim, bundle.num_classes), args.out)
    print(f"wrote weights to {args.out}")
    if args.parity_out:
        parity_bundle = bundle
        if args.parity_dataset_dir:
            try:
                parity_bundle = load_dataset(
                    args.parity_dataset_dir, args.parity_name or args.name
                )
            except ValueError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 2
        report = parity_report(model, parity_bundle, args.parity_sample, args.seed)
        save_json(report, args.parity_out)
        print(f"wrote {len(report['graphs'])} parity rows to {args.parity_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
