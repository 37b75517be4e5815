"""Command-line front end: train a per-K model, or run inference on a blob."""

import argparse
import sys

from . import blobs, infer as infer_mod, train as train_mod


def cmd_train(args):
    cfg = train_mod.TrainConfig(
        initial_lr=args.lr, lr_decay=args.lr_decay, batch_size=args.batch,
        max_epochs=args.epochs, patience=args.patience,
        val_fraction=args.val_fraction, seed=args.seed,
    )
    history = train_mod.train(args.manifest, args.pw, args.out_weights,
                              curve_path=args.curve, cfg=cfg,
                              log=lambda s: print(s, file=sys.stderr))
    last = history[-1]
    print(f"trained {len(history)} epochs, final val MSE {last['val_mse']:.3e}")
    return 0


def cmd_infer(args):
    infer_mod.infer(args.weights, args.infile, args.out, args.scale)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="trainer",
                                description="learned plane-wave compounding")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("train", help="fit one model for a plane-wave count")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--pw", type=int, required=True,
                    help="plane-wave count K selecting manifest records")
    sp.add_argument("--out-weights", required=True)
    sp.add_argument("--curve", default=None, help="loss-curve CSV path")
    sp.add_argument("--lr", type=float, default=1e-4)
    sp.add_argument("--lr-decay", type=float, default=1e-3)
    sp.add_argument("--batch", type=int, default=5)
    sp.add_argument("--epochs", type=int, default=300)
    sp.add_argument("--patience", type=int, default=5)
    sp.add_argument("--val-fraction", type=float, default=0.33)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_train)

    sp = sub.add_parser("infer", help="compound one tensor blob")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--scale", type=float, required=True,
                    help="per-record normalization scale from the manifest")
    sp.set_defaults(fn=cmd_infer)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FileNotFoundError, ValueError, blobs.BlobFormatError) as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
