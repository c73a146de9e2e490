"""Command line entry point: ``simulate``, ``deconv`` and ``bench``."""

import argparse
import csv
import logging
import os
import sys

from ..core import ConfigurationError, DomainError
from ..dictionary import make_dictionary
from ..prox import InnerLoopConfig
from .bench import METHODS, ExperimentSpec, format_table, load_phantom, parse_psf, run_benchmark, run_method, simulate_counts
from .imageio import read_image, write_counts, write_float_image
from .metrics import mean_l1_error, mse
from .simulate import scale_to_max

log = logging.getLogger("vstdeconv")

def cmd_simulate(args):
    base = load_phantom(args.phantom, args.size)
    truth = scale_to_max(base, args.max_intensity)
    H = parse_psf(args.psf, truth.shape)
    blurred, counts = simulate_counts(truth, H, args.seed)
    os.makedirs(args.out, exist_ok=True)
    write_float_image(os.path.join(args.out, "truth.f32"), truth)
    write_float_image(os.path.join(args.out, "blurred.f32"), blurred)
    counts_path = write_counts(os.path.join(args.out, "counts"), counts)
    print(f"wrote truth.f32, blurred.f32, {os.path.basename(counts_path)} to {args.out} "
          f"(total counts {int(counts.sum())})")
    return 0


def cmd_deconv(args):
    y = read_image(args.counts)
    H = parse_psf(args.psf, y.shape)
    D = make_dictionary(args.dict, y.shape, args.levels)
    truth = read_image(args.truth) if args.truth else None
    inner = InnerLoopConfig(max_inner_iters=args.inner_iters, warm_start=True)
    x_hat, n_it, trace = run_method(
        args.method, y, H, D, args.lam, args.iters, args.step_fraction, inner,
        args.threshold_coarse_scale, truth, args.iters,
    )
    os.makedirs(args.out, exist_ok=True)
    write_float_image(os.path.join(args.out, "restored.f32"), x_hat)
    with open(os.path.join(args.out, "trace.csv"), "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace.COLUMNS)
        for row in trace.rows():
            w.writerow(row)
    msg = f"{args.method}: {n_it} iterations, wrote restored.f32 and trace.csv to {args.out}"
    if truth is not None:
        msg += f"; mean l1 {mean_l1_error(x_hat, truth):.4f}, mse {mse(x_hat, truth):.4f}"
    print(msg)
    return 0


def cmd_bench(args):
    spec = ExperimentSpec.from_file(args.spec)
    if args.out:
        spec.output = args.out
    rows = run_benchmark(spec, progress=log.info)
    print(format_table(rows))
    print(f"metrics written to {os.path.join(spec.output, 'metrics.csv')}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="vstdeconv", description="Sparse deconvolution of Poisson images.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="blur a phantom and draw Poisson counts")
    s.add_argument("--phantom", default="disks", help="builtin name (disks, dendrite) or image path")
    s.add_argument("--size", type=int, default=128)
    s.add_argument("--max-intensity", type=float, required=True)
    s.add_argument("--psf", default="gaussian:1.0")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("deconv", help="restore a counts image")
    d.add_argument("--counts", required=True)
    d.add_argument("--psf", default="gaussian:1.0")
    d.add_argument("--method", choices=METHODS, default="ours")
    d.add_argument("--dict", default="haar", help="identity, haar, db2, db4, uwt-haar, uwt-db4")
    d.add_argument("--levels", type=int, default=None)
    d.add_argument("--lambda", dest="lam", type=float, default=0.4)
    d.add_argument("--iters", type=int, default=200)
    d.add_argument("--step-fraction", type=float, default=0.9)
    d.add_argument("--inner-iters", type=int, default=50)
    d.add_argument("--threshold-coarse-scale", action="store_true")
    d.add_argument("--truth", help="ground truth image (RL oracle stopping and metrics)")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_deconv)

    b = sub.add_parser("bench", help="run a benchmark sweep from a spec file")
    b.add_argument("--spec", required=True)
    b.add_argument("--out", help="override the output directory")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
