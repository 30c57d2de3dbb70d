"""Command-line export entry point."""

from __future__ import annotations

import argparse
import sys

from .extract import ExportSpec, export
from .writer import ExportError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Extract frozen-model representations into embedding files",
    )
    parser.add_argument(
        "--model", required=True,
        help="'<arch>:<checkpoint path>' or '<arch>:random-<seed>'",
    )
    parser.add_argument(
        "--dataset", required=True,
        help="'cifar10:<root>' or 'synthetic:<n_train>:<n_test>:<k>[:<size>]'",
    )
    parser.add_argument("--augmentations", "-t", type=int, default=0,
                        help="augmented copies per train image (0 = plain)")
    parser.add_argument("--train-out", required=True)
    parser.add_argument("--test-out", required=True)
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = ExportSpec(
        model=args.model,
        dataset=args.dataset,
        augmentations=args.augmentations,
        train_out=args.train_out,
        test_out=args.test_out,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    try:
        train_path, test_path = export(spec)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"export train={train_path} test={test_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
