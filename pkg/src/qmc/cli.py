"""``qmc`` command line.

Exit codes: 0 success, 1 verification or prediction failure, 2 usage error,
3 I/O or file-format error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bench, selfcheck
from .datasets import DEFAULT_N, DEFAULT_SEED, accuracy, generate, read_csv, write_csv
from .encoders import DEFAULT_FOCK, KINDS, EncoderSpec, fit_feature_map
from .errors import (
    ParseError,
    QMCError,
    SchemaError,
    UnknownDatasetError,
    UnsupportedDimensionError,
)
from .modelio import load_model, save_model
from .prediction import predict_proba
from .training import MODES, train

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

# flags that only make sense for some encodings
_ENCODER_FLAGS = {
    "beta": {"softmax"},
    "gamma": {"coherent", "rff"},
    "r": {"squeezed"},
    "rff_dim": {"rff"},
    "rff_seed": {"rff"},
}


class UsageError(Exception):
    pass


def warn(msg: str) -> None:
    print(f"qmc: warning: {msg}", file=sys.stderr)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


# ---------------------------------------------------------------- commands


def cmd_dataset(args) -> int:
    try:
        data = generate(args.name, args.n, args.noise, args.seed)
    except UnknownDatasetError as exc:
        raise UsageError(str(exc)) from None
    write_csv(data, args.out)
    return EXIT_OK


def _encoder_spec(args, X) -> EncoderSpec:
    for flag, kinds in _ENCODER_FLAGS.items():
        if getattr(args, flag) is not None and args.encoding not in kinds:
            raise UsageError(f"--{flag.replace('_', '-')} is not a parameter of the {args.encoding} encoding")
    fock = args.fock
    if args.encoding == "onehot" and fock is None:
        fock = max(2, int(np.max(X))) if X.size else 2
    return EncoderSpec(
        args.encoding,
        X.shape[1],
        fock if fock is not None else DEFAULT_FOCK,
        beta=args.beta,
        gamma=args.gamma,
        r=args.r,
        rff_dim=args.rff_dim,
        rff_seed=args.rff_seed,
    )


def cmd_train(args) -> int:
    data = read_csv(args.data)
    if len(data) == 0:
        raise UsageError(f"{args.data} has no training rows")
    try:
        spec = _encoder_spec(args, data.features)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    model = train(data, fit_feature_map(spec, data.features), args.state)
    save_model(model, args.out, binary=args.binary)
    summary = {
        "n_train": model.n_train,
        "k": model.shape.dim_x,
        "l": model.shape.dim_y,
        "mode": model.mode,
        "purity": model.purity,
        "encoding": spec.kind,
    }
    print(json.dumps(summary))
    return EXIT_OK


def _check_features(model, data) -> None:
    if len(data) and data.num_features != model.spec.num_features:
        raise SchemaError(f"data has {data.num_features} features, model expects {model.spec.num_features}")


def cmd_predict(args) -> int:
    model = load_model(args.model)
    data = read_csv(args.data)
    _check_features(model, data)
    l = model.shape.dim_y
    header = ["row", "label"] + [f"p_{c}" for c in range(l)] + ["support", "zero_support"]
    lines = [",".join(header)]
    if len(data) == 0:
        warn(f"{args.data} has no rows")
    else:
        probs, support, zero = predict_proba(model, data.features)
        if zero.any():
            warn(f"{int(zero.sum())} row(s) have zero support; reporting uniform probabilities")
        for i, (p, s, z) in enumerate(zip(probs, support, zero)):
            label = model.labels[int(np.argmax(p))]
            lines.append(",".join([str(i), label, *map(_fmt, p), _fmt(s), str(int(z))]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    data = read_csv(args.data)
    _check_features(model, data)
    if len(data) == 0:
        warn(f"{args.data} has no rows")
        print(json.dumps({"accuracy": None, "n": 0, "zero_support_count": 0}))
        return EXIT_OK
    probs, _, zero = predict_proba(model, data.features)
    predicted = [model.labels[i] for i in np.argmax(probs, axis=1)]
    if zero.any():
        warn(f"{int(zero.sum())} row(s) have zero support")
    result = {
        "accuracy": accuracy(predicted, data.label_names),
        "n": len(data),
        "zero_support_count": int(zero.sum()),
    }
    print(json.dumps(result))
    return EXIT_OK


def _ramp(p: np.ndarray) -> np.ndarray:
    """Blue (p=0) through white (p=0.5) to red (p=1), as uint8 RGB."""
    p = np.clip(p, 0.0, 1.0)[..., None]
    blue, white, red = np.array([0, 0, 255.0]), np.array([255.0, 255, 255]), np.array([255.0, 0, 0])
    lo = blue + (white - blue) * (2 * p)
    hi = white + (red - white) * (2 * p - 1)
    return np.rint(np.where(p < 0.5, lo, hi)).astype(np.uint8)


def write_ppm(path, p_grid: np.ndarray) -> None:
    """Binary P6 image; ``p_grid[i, j]`` is row ``i`` from the top."""
    h, w = p_grid.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(_ramp(p_grid).tobytes())


def _bounds(args, model):
    given = (args.xmin, args.xmax, args.ymin, args.ymax)
    if model.scaler is not None:
        lo, hi = model.scaler.mins, model.scaler.maxs
        pad = 0.1 * (hi - lo)
        defaults = (lo[0] - pad[0], hi[0] + pad[0], lo[1] - pad[1], hi[1] + pad[1])
    else:
        m = float(model.spec.per_feature_dim)
        defaults = (1.0, m, 1.0, m)
    return [g if g is not None else d for g, d in zip(given, defaults)]


def cmd_heatmap(args) -> int:
    model = load_model(args.model)
    if model.spec.num_features != 2:
        raise UnsupportedDimensionError(f"heatmaps need a 2-feature model, got {model.spec.num_features}")
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    xmin, xmax, ymin, ymax = _bounds(args, model)
    xs = np.linspace(xmin, xmax, args.grid)
    ys = np.linspace(ymin, ymax, args.grid)
    gx, gy = np.meshgrid(xs, ys)
    points = np.column_stack([gx.ravel(), gy.ravel()])
    probs, _, zero = predict_proba(model, points)
    if zero.any():
        warn(f"{int(zero.sum())} grid cell(s) have zero support; shown as uniform")
    p0 = probs[:, 0]
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("x1,x2,p_class0\n")
        for (a, b), p in zip(points, p0):
            fh.write(f"{_fmt(a)},{_fmt(b)},{_fmt(p)}\n")
    if args.ppm:
        write_ppm(args.ppm, p0.reshape(args.grid, args.grid)[::-1])
    return EXIT_OK


def cmd_verify(args) -> int:
    fault = selfcheck.perturb_fault(args.seed) if args.inject_fault else None
    results = selfcheck.run_all(args.seed, fault=fault, quick=args.quick)
    for res in results:
        print(res.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"verification failed: {', '.join(failed)}")
        return EXIT_FAIL
    print("all checks passed")
    return EXIT_OK


def cmd_bench(args) -> int:
    spec = EncoderSpec(args.encoding, 2, args.fock)
    report = {
        "encoder": spec.to_dict(),
        "mode": args.state,
        "train_dims": {"k": spec.dim, "l": 2, "kl": 2 * spec.dim},
        "sizes": list(args.sizes),
    }
    report.update(bench.time_training(spec, tuple(args.sizes), args.state, args.repeats, args.seed))
    predict_spec = EncoderSpec(args.encoding, 2, args.predict_fock)
    report.update(bench.time_prediction(predict_spec, args.state, seed=args.seed))
    print(json.dumps(report, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmc", description="Quantum measurement classification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dataset", help="generate a toy 2-D dataset as CSV")
    p.add_argument("--name", required=True)
    p.add_argument("--n", type=int, default=DEFAULT_N)
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("train", help="estimate a training density matrix")
    p.add_argument("--data", required=True)
    p.add_argument("--encoding", choices=KINDS, required=True)
    p.add_argument("--fock", type=int, default=None, help="states per feature (categories for onehot)")
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--rff-dim", type=int)
    p.add_argument("--rff-seed", type=int)
    p.add_argument("--state", choices=MODES, default="mixed")
    p.add_argument("--out", required=True)
    p.add_argument("--binary", action="store_true", help="write the QMC1 binary format")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="per-row class probabilities")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="accuracy on a labeled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("heatmap", help="class-0 probability over a grid")
    p.add_argument("--model", required=True)
    p.add_argument("--grid", type=int, default=100)
    for name in ("xmin", "xmax", "ymin", "ymax"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--ppm")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("verify", help="run the built-in equivalence checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time training and prediction")
    p.add_argument("--encoding", choices=[k for k in KINDS if k != "onehot"], default="softmax")
    p.add_argument("--fock", type=int, default=20)
    p.add_argument("--predict-fock", type=int, default=16)
    p.add_argument("--sizes", type=int, nargs="+", default=list(bench.DEFAULT_SIZES))
    p.add_argument("--state", choices=MODES, default="mixed")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (UsageError, UnsupportedDimensionError) as exc:
        print(f"qmc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError, SchemaError) as exc:
        print(f"qmc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QMCError as exc:
        print(f"qmc {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
