"""File formats, dataset ingestion, chart rendering, and the command line.

The multiplex edge-list format is whitespace-separated lines of
``layer u v [weight]`` with 1-based ids and ``#`` comments, matching the
public multiplex dataset releases. Results go to a fixed-schema CSV and
simple SVG line charts; all writes are atomic (temp file + rename).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import experiments
from .errors import (
    ConfigError,
    EmptyNetworkError,
    IoError,
    MlmmsbError,
    ParseError,
    UnsupportedInputError,
)
from .estimators import SPDSOS, estimator
from .experiments import ExperimentConfig, ExperimentResult, run_experiment
from .metrics import classify_nodes, estimate_k
from .model import (
    MembershipMatrix,
    MultiLayerNetwork,
    generate_connectivity,
    generate_membership,
    sample_mlmmsb,
)

RESULTS_HEADER = (
    "method,sweep_param,sweep_value,repetitions,"
    "hamming_mean,hamming_se,relative_mean,relative_se"
)

DATASET_PATTERNS = {
    "lazega": ("lazega",),
    "celegans": ("celegans", "c.elegans", "c_elegans"),
    "cs-aarhus": ("cs-aarhus", "cs_aarhus", "aucs"),
    "fao-trade": ("fao-trade", "fao_trade", "fao"),
}


@dataclass(frozen=True)
class MultiplexData:
    network: MultiLayerNetwork
    node_ids: tuple  # dense index -> original id


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_multiplex_edges(
    path,
    binarize: bool = True,
    drop_self_loops: bool = True,
) -> MultiplexData:
    """Parse a multiplex edge list into symmetric layers.

    Node ids are remapped to dense 0-based indices; the original ids come
    back in ``node_ids``. Duplicate edges collapse in binarize mode and
    accumulate in weighted mode.
    """
    records = []
    node_ids = set()
    max_layer = 0
    try:
        with open(path) as handle:
            for lineno, line in enumerate(handle, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                parts = text.split()
                if len(parts) not in (3, 4):
                    raise ParseError(
                        f"line {lineno}: expected 'layer u v [weight]', got {text!r}",
                        line_number=lineno,
                    )
                try:
                    layer = int(parts[0])
                    u = int(parts[1])
                    v = int(parts[2])
                    weight = float(parts[3]) if len(parts) == 4 else 1.0
                except ValueError as exc:
                    raise ParseError(
                        f"line {lineno}: non-numeric field in {text!r}",
                        line_number=lineno,
                    ) from exc
                if layer < 1 or u < 1 or v < 1:
                    raise ParseError(
                        f"line {lineno}: ids must be 1-based positive integers",
                        line_number=lineno,
                    )
                records.append((layer, u, v, weight))
                node_ids.update((u, v))
                max_layer = max(max_layer, layer)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not node_ids:
        raise EmptyNetworkError(f"no nodes found in {path}")
    ordered = tuple(sorted(node_ids))
    index = {node: i for i, node in enumerate(ordered)}
    n = len(ordered)
    layers = np.zeros((max_layer, n, n))
    for layer, u, v, weight in records:
        i, j = index[u], index[v]
        if i == j and drop_self_loops:
            continue
        layers[layer - 1, i, j] += weight
        if i != j:
            layers[layer - 1, j, i] += weight
    if binarize:
        layers = (layers > 0).astype(float)
    else:
        # symmetrize any asymmetric accumulation from directed listings
        layers = 0.5 * (layers + layers.transpose(0, 2, 1))
    net = MultiLayerNetwork(layers=layers, allow_self_loops=not drop_self_loops)
    return MultiplexData(network=net, node_ids=ordered)


def write_multiplex_edges(data: MultiplexData, path) -> None:
    """Write layers back as an edge list (upper triangle, 1-based ids)."""
    lines = []
    net = data.network
    for l in range(net.L):
        layer = net.layers[l]
        rows, cols = np.nonzero(np.triu(layer))
        for i, j in zip(rows, cols):
            u, v = data.node_ids[i], data.node_ids[j]
            if net.binary:
                lines.append(f"{l + 1} {u} {v}")
            else:
                lines.append(f"{l + 1} {u} {v} {layer[i, j]:.10g}")
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def write_node_map(data: MultiplexData, path) -> None:
    lines = ["index,original_id"]
    lines.extend(f"{i},{node}" for i, node in enumerate(data.node_ids))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_results_csv(result: ExperimentResult, path) -> None:
    """Serialize experiment aggregates with a fixed, byte-stable format."""
    cfg = result.config
    lines = [RESULTS_HEADER]
    for method in sorted(cfg.methods):
        for value in cfg.sweep_values:
            cell = result.cells[(method, value)]
            h_mean, h_se = cell.mean_se("hamming")
            r_mean, r_se = cell.mean_se("relative")
            lines.append(
                f"{method},{cfg.sweep},{value:.10g},{cell.hamming.size},"
                f"{h_mean:.10g},{h_se:.10g},{r_mean:.10g},{r_se:.10g}"
            )
    _atomic_write(path, "\n".join(lines) + "\n")


def write_membership_csv(pi: MembershipMatrix, path, node_ids=None) -> None:
    """Membership rows plus home community and purity label per node."""
    cls = classify_nodes(pi)
    header = "node," + ",".join(f"pi_{k + 1}" for k in range(pi.K)) + ",home,label"
    lines = [header]
    for i in range(pi.n):
        node = node_ids[i] if node_ids is not None else i
        weights = ",".join(f"{w:.10g}" for w in pi.rows[i])
        lines.append(f"{node},{weights},{cls.home_community[i] + 1},{cls.label[i]}")
    _atomic_write(path, "\n".join(lines) + "\n")


def read_membership_csv(path) -> MembershipMatrix:
    try:
        with open(path) as handle:
            lines = [line.strip() for line in handle if line.strip()]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not lines or not lines[0].startswith("node,pi_1"):
        raise ParseError(f"{path} is not a membership CSV")
    header = lines[0].split(",")
    k = sum(1 for name in header if name.startswith("pi_"))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) < 1 + k:
            raise ParseError(f"line {lineno}: too few columns", line_number=lineno)
        try:
            rows.append([float(x) for x in parts[1 : 1 + k]])
        except ValueError as exc:
            raise ParseError(
                f"line {lineno}: non-numeric membership weight", line_number=lineno
            ) from exc
    arr = np.array(rows)
    arr = arr / arr.sum(axis=1, keepdims=True)
    return MembershipMatrix(rows=arr)


# ---------------------------------------------------------------------------
# SVG line charts


def render_line_chart(
    series,
    path,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    log_x: bool = False,
    log_y: bool = False,
) -> None:
    """Render named (x, y) series as an SVG line chart with a legend.

    ``series`` is a list of (name, x_values, y_values) triples.
    """
    if not series:
        raise ConfigError("at least one series is required")
    for name, xs, ys in series:
        if len(xs) != len(ys) or len(xs) == 0:
            raise ConfigError(f"series {name!r} needs equal-length nonempty x/y")
        if log_x and any(x <= 0 for x in xs):
            raise ConfigError("log x-axis requires positive x values")
        if log_y and any(y <= 0 for y in ys):
            raise ConfigError("log y-axis requires positive y values")

    width, height = 640, 420
    left, right, top, bottom = 70, 160, 40, 50

    def tx(v):
        return math.log(v) if log_x else float(v)

    def ty(v):
        return math.log(v) if log_y else float(v)

    all_x = [tx(x) for _, xs, _ in series for x in xs]
    all_y = [ty(y) for _, _, ys in series for y in ys]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    def px(v):
        return left + (tx(v) - x_lo) / (x_hi - x_lo) * (width - left - right)

    def py(v):
        return height - bottom - (ty(v) - y_lo) / (y_hi - y_lo) * (height - top - bottom)

    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" '
        f'y2="{height - bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
            f'font-size="15">{title}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{(left + width - right) / 2:.1f}" y="{height - 12}" '
            f'text-anchor="middle" font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="16" y="{(top + height - bottom) / 2:.1f}" font-size="12" '
            f'transform="rotate(-90 16 {(top + height - bottom) / 2:.1f})" '
            f'text-anchor="middle">{y_label}</text>'
        )
    for s_index, (name, xs, ys) in enumerate(series):
        color = palette[s_index % len(palette)]
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        for x, y in zip(xs, ys):
            parts.append(
                f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="{color}"/>'
            )
        legend_y = top + 16 * s_index
        parts.append(
            f'<line x1="{width - right + 12}" y1="{legend_y}" x2="{width - right + 36}" '
            f'y2="{legend_y}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{width - right + 42}" y="{legend_y + 4}" font-size="12">{name}</text>'
        )
    parts.append("</svg>")
    _atomic_write(path, "\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# Command line


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _resolve_dataset(spec: str, data_dir: str) -> str:
    """Map a dataset name or path to an edge-list file."""
    if os.path.exists(spec):
        return spec
    key = spec.lower()
    patterns = DATASET_PATTERNS.get(key, (key,))
    if os.path.isdir(data_dir):
        for entry in sorted(os.listdir(data_dir)):
            lowered = entry.lower()
            if lowered.endswith((".edges", ".txt", ".csv")) and any(
                p in lowered for p in patterns
            ):
                return os.path.join(data_dir, entry)
    raise IoError(
        f"dataset {spec!r} not found (looked in {data_dir!r}); "
        "download it from https://manliodedomenico.com/data.php"
    )


def _parse_range(text: str) -> range:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return range(int(lo), int(hi) + 1)
    k = int(text)
    return range(k, k + 1)


def _parse_config_file(path: str) -> ExperimentConfig:
    values = {}
    try:
        with open(path) as handle:
            for lineno, line in enumerate(handle, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                if "=" not in text:
                    raise ParseError(
                        f"line {lineno}: expected key=value", line_number=lineno
                    )
                key, _, value = text.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        kwargs = {"sweep": values["sweep"]}
        kwargs["sweep_values"] = tuple(
            float(v) if "." in v or "e" in v.lower() else int(v)
            for v in values["sweep_values"].split(",")
        )
        for key in ("n", "L", "n0", "K", "repetitions", "base_seed"):
            if key in values:
                kwargs[key] = int(values[key])
        if "rho" in values:
            kwargs["rho"] = float(values["rho"])
        if "methods" in values:
            kwargs["methods"] = tuple(values["methods"].split(","))
        return ExperimentConfig(**kwargs)
    except KeyError as exc:
        raise ConfigError(f"config file missing required key {exc}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="mlmmsb",
        description="Mixed membership community detection for multi-layer networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[], help="sample a network and save it")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--layers", type=int, default=20)
    p.add_argument("--rho", type=float, default=0.1)
    p.add_argument("--n0", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="edge-list output path")

    p = sub.add_parser("estimate", help="estimate memberships for a dataset")
    p.add_argument("--data", required=True, help="dataset name or edge-list path")
    p.add_argument("--data-dir", default="data")
    p.add_argument("--method", default="spsum", choices=["spsum", "spdsos", "spsos"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--keep-weights", action="store_true")
    p.add_argument("--keep-self-loops", action="store_true")

    p = sub.add_parser("experiment", help="run a simulation sweep")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=sorted(experiments.PRESETS))
    group.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("select-k", help="pick K by fuzzy modularity")
    p.add_argument("--data", required=True)
    p.add_argument("--data-dir", default="data")
    p.add_argument("--method", default="spsum", choices=["spsum", "spdsos", "spsos"])
    p.add_argument("--range", default="2..6", help="inclusive range, e.g. 2..6")
    p.add_argument("--criterion", default="fsum", choices=["fsum", "fmean"])
    p.add_argument("--keep-weights", action="store_true")
    p.add_argument("--keep-self-loops", action="store_true")

    p = sub.add_parser("classify", help="purity report from a membership CSV")
    p.add_argument("--pi", required=True, help="membership CSV path")

    return parser


def _load_network(args) -> MultiplexData:
    path = _resolve_dataset(args.data, args.data_dir)
    keep_weights = getattr(args, "keep_weights", False)
    if keep_weights and getattr(args, "method", "") == "spdsos":
        raise UnsupportedInputError(
            "spdsos requires binary layers; drop --keep-weights"
        )
    return read_multiplex_edges(
        path,
        binarize=not keep_weights,
        drop_self_loops=not getattr(args, "keep_self_loops", False),
    )


def _cmd_simulate(args) -> int:
    pi = generate_membership(args.n, args.k, args.n0, args.seed)
    conn = generate_connectivity(args.k, args.layers, args.seed + 1, rho=args.rho)
    net = sample_mlmmsb(pi, conn, args.seed + 2)
    data = MultiplexData(network=net, node_ids=tuple(range(1, net.n + 1)))
    write_multiplex_edges(data, args.out)
    write_membership_csv(pi, args.out + ".membership.csv", data.node_ids)
    print(f"wrote {args.out} (n={net.n}, L={net.L}) and {args.out}.membership.csv")
    return 0


def _cmd_estimate(args) -> int:
    data = _load_network(args)
    result = estimator(args.method)(data.network, args.k)
    os.makedirs(args.out_dir, exist_ok=True)
    pi_path = os.path.join(args.out_dir, "membership.csv")
    map_path = os.path.join(args.out_dir, "nodes.csv")
    write_membership_csv(result.pi_hat, pi_path, data.node_ids)
    write_node_map(data, map_path)
    cls = classify_nodes(result.pi_hat)
    print(f"wrote {pi_path} and {map_path}")
    print(
        f"sigma_mixed={cls.sigma_mixed:.4f} sigma_pure={cls.sigma_pure:.4f} "
        f"upsilon={cls.upsilon:.4f}"
    )
    for note in result.diagnostics:
        print(f"note: {note}", file=sys.stderr)
    return 0


def _cmd_experiment(args) -> int:
    if args.threads < 1:
        raise ConfigError("--threads must be at least 1")
    if args.preset:
        cfg = experiments.preset(args.preset, base_seed=args.seed, repetitions=args.reps)
        stem = args.preset
    else:
        cfg = _parse_config_file(args.config)
        if args.seed is not None or args.reps is not None:
            from dataclasses import replace

            updates = {}
            if args.seed is not None:
                updates["base_seed"] = args.seed
            if args.reps is not None:
                updates["repetitions"] = args.reps
            cfg = replace(cfg, **updates)
        stem = os.path.splitext(os.path.basename(args.config))[0]
    result = run_experiment(cfg)
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, f"{stem}_results.csv")
    write_results_csv(result, csv_path)
    for which in ("hamming", "relative"):
        series = [
            (method, list(cfg.sweep_values), list(result.curve(method, which)))
            for method in sorted(cfg.methods)
        ]
        svg_path = os.path.join(args.out_dir, f"{stem}_{which}.svg")
        render_line_chart(
            series,
            svg_path,
            title=f"{which} error vs {cfg.sweep}",
            x_label=cfg.sweep,
            y_label=f"mean {which} error",
        )
    print(f"wrote {csv_path} and SVG charts to {args.out_dir}")
    return 0


def _cmd_select_k(args) -> int:
    data = _load_network(args)
    selection = estimate_k(
        data.network, args.method, _parse_range(args.range), args.criterion
    )
    for k in sorted(selection.scores):
        print(f"K={k}: {selection.scores[k]:.4f}")
    for k, reason in sorted(selection.failures.items()):
        print(f"K={k}: failed ({reason})", file=sys.stderr)
    print(f"({selection.best_k}, {selection.best_score:.4f})")
    return 0


def _cmd_classify(args) -> int:
    pi = read_membership_csv(args.pi)
    cls = classify_nodes(pi)
    print(f"sigma_mixed={cls.sigma_mixed:.4f}")
    print(f"sigma_pure={cls.sigma_pure:.4f}")
    print(f"upsilon={cls.upsilon:.4f}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "experiment": _cmd_experiment,
    "select-k": _cmd_select_k,
    "classify": _cmd_classify,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (MlmmsbError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
