"""Command-line interface: fit, classify, simulate, evaluate.

CSV in, CSV/JSON artifacts out.  Every run is reproducible from its
manifest: all randomness flows from one seed through named substreams,
artifact formatting is deterministic, and the manifest records the argv,
the resolved configuration, and a content hash of the input data.

Exit codes: 0 on success, 2 on I/O or schema errors, 3 on fit failure.
"""

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, backend, classify, datasim, mghfa, selection
from .rng import substream

__all__ = [
    "main", "read_table", "model_to_dict", "model_from_dict",
    "UsageError", "MODEL_SCHEMA_VERSION",
]

MODEL_SCHEMA_VERSION = 1

LABELS_COLUMNS = ("row_id", "component", "responsibility")


class UsageError(ValueError):
    """Bad input data or flags; maps to exit code 2."""


# ---------------------------------------------------------------------------
# CSV ingestion


def _parse_cell(cell, path, row, column):
    try:
        value = float(cell)
    except ValueError:
        raise UsageError(
            f"{path}: row {row}, column {column!r}: not numeric: {cell.strip()!r}"
        ) from None
    if not math.isfinite(value):
        raise UsageError(f"{path}: row {row}, column {column!r}: not finite: {cell.strip()!r}")
    return value


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_table(path):
    """Read a data CSV: header row, numeric feature columns, optional
    `id` and `label` columns recognized by name.

    Returns (x, ids, labels, feature_names).  ids are echoed as strings
    (row index when absent); labels are ints with empty cells and 0 both
    meaning unlabelled, or None when there is no label column.  Any
    non-numeric feature cell is rejected with its row and column.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror or err}") from None
    rows = [r for r in rows if r]
    if not rows:
        raise UsageError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if all(_is_number(h) for h in header if h):
        raise UsageError(f"{path}: first row must be a header, found numbers")
    id_col = header.index("id") if "id" in header else None
    label_col = header.index("label") if "label" in header else None
    feature_cols = [j for j in range(len(header)) if j not in (id_col, label_col)]
    if not feature_cols:
        raise UsageError(f"{path}: no feature columns")

    data, ids, labels = [], [], []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise UsageError(
                f"{path}: row {i}: expected {len(header)} cells, found {len(row)}"
            )
        data.append([_parse_cell(row[j], path, i, header[j]) for j in feature_cols])
        ids.append(row[id_col].strip() if id_col is not None else str(i - 1))
        if label_col is not None:
            cell = row[label_col].strip()
            if cell == "":
                labels.append(classify.UNLABELLED)
            else:
                try:
                    labels.append(int(cell))
                except ValueError:
                    raise UsageError(
                        f"{path}: row {i}, column 'label': not an integer: {cell!r}"
                    ) from None
                if labels[-1] < 0:
                    raise UsageError(f"{path}: row {i}, column 'label': negative label")
    x = np.asarray(data, dtype=np.float64)
    lab = np.asarray(labels, dtype=np.int64) if label_col is not None else None
    names = [header[j] for j in feature_cols]
    return x, ids, lab, names


def _read_partition(path):
    """Read a label CSV for evaluate: prefers a `component` column, then
    `label`, then a single remaining non-id column.  Returns (ids, labels);
    ids is None when the file has no id-like column."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror or err}") from None
    rows = [r for r in rows if r]
    if not rows:
        raise UsageError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    id_col = None
    for name in ("row_id", "id"):
        if name in header:
            id_col = header.index(name)
            break
    lab_col = None
    for name in ("component", "label"):
        if name in header:
            lab_col = header.index(name)
            break
    if lab_col is None:
        rest = [j for j in range(len(header)) if j != id_col]
        if len(rest) != 1:
            raise UsageError(f"{path}: no `component` or `label` column")
        lab_col = rest[0]
    ids, labels = [], []
    for i, row in enumerate(rows[1:], start=1):
        if lab_col >= len(row) or (id_col is not None and id_col >= len(row)):
            raise UsageError(f"{path}: row {i}: short row")
        cell = row[lab_col].strip()
        try:
            labels.append(int(cell))
        except ValueError:
            raise UsageError(
                f"{path}: row {i}, column {header[lab_col]!r}: not an integer: {cell!r}"
            ) from None
        if id_col is not None:
            ids.append(row[id_col].strip())
    return (ids if id_col is not None else None), np.asarray(labels, dtype=np.int64)


# ---------------------------------------------------------------------------
# Artifact emission


def _write_assignments(path, ids, labels, zhat, mask=None):
    take = range(len(ids)) if mask is None else np.flatnonzero(mask)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(LABELS_COLUMNS)
        for i in take:
            writer.writerow([ids[i], int(labels[i]), f"{zhat[i, labels[i] - 1]:.12g}"])


def model_to_dict(report, q):
    comps = [
        {
            "mu": c.mu.tolist(),
            "alpha": c.alpha.tolist(),
            "loadings": c.loadings.tolist(),
            "noise": c.noise.tolist(),
            "lam": c.lam,
            "omega": c.omega,
        }
        for c in report.model.components
    ]
    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "G": report.model.n_components,
        "p": report.model.components[0].p,
        "q": q,
        "weights": report.model.weights.tolist(),
        "components": comps,
        "loglik": report.loglik,
        "bic": report.bic,
        "n_iter": report.n_iter,
        "converged": report.converged,
        "start_index": report.start_index,
    }


def model_from_dict(doc):
    """Rebuild a MixtureModel from the JSON document; rejects unknown
    schema versions."""
    if doc.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise UsageError(
            f"unsupported model schema_version {doc.get('schema_version')!r}"
        )
    comps = tuple(
        mghfa.GHFAComponent(
            mu=np.asarray(c["mu"]), alpha=np.asarray(c["alpha"]),
            loadings=np.asarray(c["loadings"]), noise=np.asarray(c["noise"]),
            lam=c["lam"], omega=c["omega"],
        )
        for c in doc["components"]
    )
    return mghfa.MixtureModel(np.asarray(doc["weights"]), comps)


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fingerprint(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _manifest(args, command, config, extra, seconds):
    return {
        "command": command,
        "argv": list(args.argv),
        "seed": config.seed,
        "config": {**dataclasses.asdict(config), **extra,
                   "threads": args.threads},
        "data": {"path": args.data, "sha256": _fingerprint(args.data)},
        "versions": {
            "hyperfa": __version__,
            "numpy": np.__version__,
            "python": "%d.%d.%d" % sys.version_info[:3],
            "backend": "numba" if backend.using_numba() else "numpy",
        },
        "timings": {"seconds": round(seconds, 3)},
    }


# ---------------------------------------------------------------------------
# Subcommands


def _parse_span(text, flag):
    """`lo:hi` inclusive, or a single integer."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"{flag}: expected N or LO:HI, got {text!r}") from None
    if lo > hi:
        raise UsageError(f"{flag}: empty range {text!r}")
    return tuple(range(lo, hi + 1))


def _fit_config(args):
    return mghfa.FitConfig(
        max_iter=args.max_iter, epsilon=args.eps, n_starts=args.starts,
        init=args.init, seed=args.seed,
    )


def cmd_fit(args):
    x, ids, _, _ = read_table(args.data)
    config = _fit_config(args)
    g_span = _parse_span(args.g_range or str(args.G), "--G")
    q_span = _parse_span(args.q_range or str(args.q), "--q")
    os.makedirs(args.out_dir, exist_ok=True)

    t0 = time.perf_counter()
    if len(g_span) == 1 and len(q_span) == 1:
        report, table = mghfa.fit(x, g_span[0], q_span[0], config,
                                  threads=args.threads), None
    else:
        grid = selection.SelectionGrid(g_span, q_span)
        report, table = selection.select(x, grid, config, threads=args.threads)
    seconds = time.perf_counter() - t0

    out = lambda name: os.path.join(args.out_dir, name)
    _write_assignments(out("labels.csv"), ids, report.labels, report.zhat)
    q = report.model.components[0].q
    _write_json(out("model.json"), model_to_dict(report, q))
    if table is not None:
        selection.write_bic_table(out("bic_table.csv"), table)
    extra = {"g_range": list(g_span), "q_range": list(q_span)}
    _write_json(out("manifest.json"), _manifest(args, "fit", config, extra, seconds))
    print(f"G={report.model.n_components} q={q} loglik={report.loglik:.6f} "
          f"bic={report.bic:.6f} iters={report.n_iter} converged={report.converged}")
    return 0


def cmd_classify(args):
    x, ids, labels, _ = read_table(args.data)
    if labels is None:
        raise UsageError(f"{args.data}: classify needs a `label` column")
    config = _fit_config(args)
    os.makedirs(args.out_dir, exist_ok=True)

    truth = None
    if args.unlabel_frac is not None:
        if not 0.0 <= args.unlabel_frac < 1.0:
            raise UsageError("--unlabel-frac must lie in [0, 1)")
        if np.any(labels == classify.UNLABELLED):
            raise UsageError("--unlabel-frac needs a fully labelled truth column")
        truth = labels
        if args.unlabel_frac == 0.0:
            work = labels
        else:
            rng = substream(args.seed, "holdout")
            work = classify.hold_out_unlabel(labels, args.unlabel_frac, rng).labels

    else:
        work = labels

    unlabelled = work == classify.UNLABELLED
    if not np.any(unlabelled):
        print("warning: no unlabelled rows; predictions will be empty",
              file=sys.stderr)

    t0 = time.perf_counter()
    report = classify.fit_classify(x, work, args.G, args.q, config,
                                   threads=args.threads)
    seconds = time.perf_counter() - t0

    out = lambda name: os.path.join(args.out_dir, name)
    _write_assignments(out("predictions.csv"), ids, report.labels, report.zhat,
                       mask=unlabelled)
    _write_json(out("model.json"), model_to_dict(report, args.q))
    extra = {"G": args.G, "q": args.q, "unlabel_frac": args.unlabel_frac}
    _write_json(out("manifest.json"),
                _manifest(args, "classify", config, extra, seconds))
    if truth is not None and np.any(unlabelled):
        value = datasim.ari(truth[unlabelled], report.labels[unlabelled])
        print(f"ARI {value:.6f}")
    return 0


def cmd_simulate(args):
    design = datasim.SimDesign(family=args.family, p=args.p, G=args.G,
                               n_per_component=args.n, seed=args.seed)
    x, truth = datasim.generate(design)
    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "data.csv"), "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j + 1}" for j in range(args.p)])
        for row in x:
            writer.writerow([f"{v:.17g}" for v in row])
    with open(os.path.join(args.out_dir, "truth.csv"), "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_id", "component"])
        for i, g in enumerate(truth.labels):
            writer.writerow([i, int(g)])
    return 0


def cmd_evaluate(args):
    ids_a, lab_a = _read_partition(args.truth)
    ids_b, lab_b = _read_partition(args.predicted)
    if ids_a is not None and ids_b is not None:
        # align the (possibly partial) prediction against truth by row id
        index = {rid: i for i, rid in enumerate(ids_a)}
        if len(index) != len(ids_a):
            raise UsageError(f"{args.truth}: duplicate row ids")
        missing = [rid for rid in ids_b if rid not in index]
        if missing:
            raise UsageError(
                f"{args.predicted}: row id {missing[0]!r} not present in {args.truth}"
            )
        lab_a = lab_a[[index[rid] for rid in ids_b]]
    elif lab_a.size != lab_b.size:
        raise UsageError(
            f"partitions disagree on size: {lab_a.size} vs {lab_b.size}"
        )
    print(f"{datasim.ari(lab_a, lab_b):.6f}")
    return 0


# ---------------------------------------------------------------------------
# Parser and dispatch


def _add_fit_flags(sub, with_grid):
    sub.add_argument("--data", required=True, help="input CSV (header required)")
    sub.add_argument("--G", type=int, default=None, help="number of components")
    sub.add_argument("--q", type=int, default=None, help="number of factors")
    if with_grid:
        sub.add_argument("--g-range", metavar="LO:HI", default=None,
                         help="inclusive grid of component counts")
        sub.add_argument("--q-range", metavar="LO:HI", default=None,
                         help="inclusive grid of factor counts")
    sub.add_argument("--starts", type=int, default=1, help="random starts")
    sub.add_argument("--init", choices=("kmeans", "random"), default="kmeans")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--max-iter", type=int, default=1000)
    sub.add_argument("--eps", type=float, default=1.0e-5,
                     help="Aitken convergence threshold")
    sub.add_argument("--threads", type=int, default=None,
                     help="concurrent starts/grid cells (default $HYPERFA_THREADS)")
    sub.add_argument("--out-dir", default=".", help="artifact directory")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hyperfa",
        description="Clustering and classification with mixtures of "
                    "generalized hyperbolic factor analyzers.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    fit = subs.add_parser("fit", help="cluster a data CSV")
    _add_fit_flags(fit, with_grid=True)

    cls = subs.add_parser("classify", help="semi-supervised classification")
    _add_fit_flags(cls, with_grid=False)
    cls.add_argument("--unlabel-frac", type=float, default=None,
                     help="hold out this fraction of the labels at random")

    sim = subs.add_parser("simulate", help="draw a synthetic dataset")
    sim.add_argument("--family", choices=datasim._FAMILIES, required=True)
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--G", type=int, required=True)
    sim.add_argument("--n", type=int, required=True, help="rows per component")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out-dir", default=".")

    ev = subs.add_parser("evaluate", help="ARI between two label CSVs")
    ev.add_argument("truth")
    ev.add_argument("predicted")
    return parser


def _check_counts(args, with_grid):
    if with_grid:
        if (args.G is None) == (args.g_range is None):
            raise UsageError("give exactly one of --G / --g-range")
        if (args.q is None) == (args.q_range is None):
            raise UsageError("give exactly one of --q / --q-range")
    else:
        if args.G is None or args.q is None:
            raise UsageError("classify needs --G and --q")


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    if getattr(args, "threads", None) is None and args.command in ("fit", "classify"):
        try:
            args.threads = max(1, int(os.environ.get("HYPERFA_THREADS", "1")))
        except ValueError:
            print("error: HYPERFA_THREADS must be an integer", file=sys.stderr)
            return 2
    try:
        if args.command == "fit":
            _check_counts(args, with_grid=True)
            return cmd_fit(args)
        if args.command == "classify":
            _check_counts(args, with_grid=False)
            return cmd_classify(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_evaluate(args)
    except (UsageError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        # library-level validation (shapes, label sets, empty classes)
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (mghfa.FitError, selection.SelectionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
