"""spice-export: dump a frozen backbone's features over an image dataset."""

from __future__ import annotations

import argparse
import json
import sys

from .backbone import ARCHS
from .datasets import DATASETS, SPLITS
from .errors import ExportConfigError, ExportError
from .export import ExportJob, export

__version__ = "0.1.0"


def _csv3(text: str) -> tuple:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected 3 comma-separated values")
    return tuple(parts)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spice-export",
        description="Export image embeddings from a pretrained frozen backbone "
        "in the spice binary format.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--dataset", required=True,
                   help=f"dataset name (built in: {sorted(DATASETS)})")
    p.add_argument("--split", choices=SPLITS, default="both")
    p.add_argument("--ckpt", required=True, help="backbone checkpoint path")
    p.add_argument("--out", required=True, help="output embedding file")
    p.add_argument("--arch", choices=sorted(ARCHS), default=None,
                   help="backbone variant (default: infer from checkpoint)")
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--device", default="cpu")
    p.add_argument("--data-root", default="./data")
    p.add_argument("--no-download", action="store_true",
                   help="fail instead of downloading a missing dataset")
    p.add_argument("--input-size", type=int, default=None,
                   help="resize images to this square size (default: native size)")
    p.add_argument("--mean", type=_csv3, default=None,
                   help="normalization mean, e.g. 0.5,0.5,0.5")
    p.add_argument("--std", type=_csv3, default=None)
    p.add_argument("--workers", type=int, default=0)
    return p


def cli_main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kwargs = dict(
        dataset=args.dataset,
        checkpoint=args.ckpt,
        out=args.out,
        split=args.split,
        batch_size=args.batch_size,
        device=args.device,
        arch=args.arch,
        data_root=args.data_root,
        download=not args.no_download,
        input_size=args.input_size,
        workers=args.workers,
    )
    if args.mean is not None:
        kwargs["mean"] = args.mean
    if args.std is not None:
        kwargs["std"] = args.std
    try:
        manifest = export(ExportJob(**kwargs))
    except ExportConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ExportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
