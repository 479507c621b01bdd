"""Command-line interface: ``dyncom <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 oracle size guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import io, transforms
from .errors import DyncomError, OracleSizeError
from .lago import OptimizerConfig, detect
from .oracle import HARD_LIMIT, enumerate_optimal
from .quality import QualityParams, lmodularity_terms
from .segmentation import segment
from .synth import PlantedConfig, planted_stream

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_GUARD = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _non_negative(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _stream_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--input", required=required, help="stream file (src,dst,t_start,t_end,weight)")
    p.add_argument("--modality", choices=["timestamped", "interval"])
    p.add_argument("--time", choices=["discrete", "continuous"])
    d = p.add_mutually_exclusive_group()
    d.add_argument("--directed", dest="directed", action="store_true", default=None)
    d.add_argument("--undirected", dest="directed", action="store_false")
    p.add_argument("--types", help="node,type file for multipartite streams")
    p.add_argument("--horizon", nargs=2, type=float, metavar=("T_MIN", "T_MAX"))


def _quality_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--null", choices=["jm", "mm"], default="mm")
    p.add_argument("--gamma", type=_positive, default=1.0)
    p.add_argument("--omega", type=_non_negative, default=1.0)


def _load(args):
    horizon = None
    if args.horizon:
        lo, hi = args.horizon
        if (args.time or "discrete") == "discrete":
            lo, hi = int(lo), int(hi)
        horizon = (lo, hi)
    opts = io.StreamOptions(args.modality, args.time, args.directed, args.types, horizon)
    return io.read_stream(args.input, opts)


def _params(args) -> QualityParams:
    return QualityParams(args.null.upper(), args.gamma, args.omega)


def _fmt(q: float) -> str:
    return f"{q:.12g}"


def cmd_detect(args) -> int:
    stream = _load(args)
    config = OptimizerConfig(_params(args), args.seed, args.max_passes, args.refine,
                             args.fast, args.runs)
    struct, q, diag = detect(stream, config)
    if args.out:
        io.write_structure(struct, args.out)
    if args.diagnostics:
        with open(args.diagnostics, "w", encoding="utf-8") as fh:
            json.dump({
                "q": q, "passes": diag.passes, "moves": diag.moves, "q_trace": diag.q_trace,
                "run_q": diag.run_q, "best_run": diag.best_run,
                "communities": len(struct),
            }, fh, indent=2)
            fh.write("\n")
    print(_fmt(q))
    return EXIT_OK


def cmd_score(args) -> int:
    stream = _load(args)
    struct = io.read_structure(args.structure, discrete=stream.domain.discrete)
    params = _params(args)
    terms = lmodularity_terms(stream, struct, params.null_model)
    q = terms.value(params.gamma, params.omega)
    print(_fmt(q))
    if args.terms:
        print(f"observed {terms.observed!r}")
        print(f"expected {terms.expected!r}")
        print(f"switches {terms.switches}")
        print(f"w {terms.w!r}")
        print(f"m {terms.m}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    stream = _load(args)
    struct, q = enumerate_optimal(stream, _params(args), args.max_elements)
    if args.out:
        io.write_structure(struct, args.out)
    print(_fmt(q))
    return EXIT_OK


def cmd_segment(args) -> int:
    stream = _load(args)
    io.write_stream(segment(stream).stream, args.out)
    return EXIT_OK


def cmd_transform(args) -> int:
    kind = args.kind
    if kind == "bipartite-events":
        records = io.read_events(args.input)
        stream = transforms.bipartite_from_events(records, args.max_tags, args.time or "continuous")
        io.write_stream(stream, args.out, args.types_out)
        return EXIT_OK
    stream = _load(args)
    if kind == "expand-undirected":
        out = transforms.expand_undirected(stream)
    elif kind == "delayed-to-continuous":
        out = transforms.delayed_to_continuous(stream, args.inverse_duration)
    elif kind == "delayed-to-instantaneous":
        out = transforms.delayed_to_instantaneous(stream, args.anchor)
    elif kind == "preference-normalize":
        out = transforms.preference_normalize(stream)
    elif kind == "low-degree-filter":
        out = transforms.low_degree_filter(stream, args.max_nodes)
    elif kind == "duration-filter":
        out = transforms.filter_duration(stream, args.min_duration, args.max_duration)
    else:  # pragma: no cover - argparse restricts choices
        raise AssertionError(kind)
    io.write_stream(out, args.out, args.types_out)
    return EXIT_OK


def cmd_export(args) -> int:
    stream = _load(args)
    struct = io.read_structure(args.structure, discrete=stream.domain.discrete)
    io.export_timeline(struct, stream, args.out, args.format)
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = PlantedConfig(
        groups=args.groups, subgroups=args.subgroups, group_size=args.group_size,
        blocks=args.blocks, block_length=args.block_length, lam_fine=args.lam_fine,
        lam_coarse=args.lam_coarse, lam_out=args.lam_out, churn=args.churn,
        time=args.time, seed=args.seed,
    )
    planted = planted_stream(cfg)
    io.write_stream(planted.stream, args.out)
    if args.planted_fine:
        io.write_structure(planted.fine, args.planted_fine)
    if args.planted_coarse:
        io.write_structure(planted.coarse, args.planted_coarse)
    return EXIT_OK


TRANSFORMS = [
    "expand-undirected", "delayed-to-continuous", "delayed-to-instantaneous",
    "preference-normalize", "low-degree-filter", "duration-filter", "bipartite-events",
]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyncom", description="Dynamic community detection in link streams "
                     "with generalized Longitudinal Modularity.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="optimize L-Modularity and write the best structure")
    _stream_args(p)
    _quality_args(p)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--runs", type=_count, default=1)
    p.add_argument("--refine", choices=["none", "stem"], default="stem")
    p.add_argument("--fast", action="store_true")
    p.add_argument("--max-passes", type=_count, default=100)
    p.add_argument("--out", help="structure output (JSON lines)")
    p.add_argument("--diagnostics", help="write run diagnostics as JSON")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("score", help="evaluate a structure file against a stream")
    _stream_args(p)
    _quality_args(p)
    p.add_argument("--structure", required=True)
    p.add_argument("--terms", action="store_true", help="also print the quality ingredients")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("oracle", help="exhaustive optimum of a tiny stream")
    _stream_args(p)
    _quality_args(p)
    p.add_argument("--max-elements", type=_count, default=HARD_LIMIT)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("segment", help="segment an interval stream")
    _stream_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("transform", help="preprocess or convert a stream")
    p.add_argument("kind", choices=TRANSFORMS)
    _stream_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--types-out", help="write node types of a multipartite result")
    p.add_argument("--inverse-duration", action="store_true",
                   help="delayed-to-continuous: weight intervals by 1/duration")
    p.add_argument("--anchor", choices=["start", "end"], default="start")
    p.add_argument("--max-nodes", type=_count, default=50)
    p.add_argument("--min-duration", type=_non_negative, default=0.0)
    p.add_argument("--max-duration", type=_non_negative)
    p.add_argument("--max-tags", type=_count, default=10)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("export", help="timeline export of a structure")
    _stream_args(p)
    p.add_argument("--structure", required=True)
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("synth", help="random stream with planted two-scale communities")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--groups", type=_count, default=2)
    p.add_argument("--subgroups", type=_count, default=2)
    p.add_argument("--group-size", type=_count, default=4)
    p.add_argument("--blocks", type=_count, default=2)
    p.add_argument("--block-length", type=_count, default=10)
    p.add_argument("--lam-fine", type=_non_negative, default=0.3)
    p.add_argument("--lam-coarse", type=_non_negative, default=0.08)
    p.add_argument("--lam-out", type=_non_negative, default=0.005)
    p.add_argument("--churn", type=_non_negative, default=0.0)
    p.add_argument("--time", choices=["discrete", "continuous"], default="discrete")
    p.add_argument("--out", required=True)
    p.add_argument("--planted-fine")
    p.add_argument("--planted-coarse")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleSizeError as exc:
        print(f"dyncom: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (DyncomError, ValueError, OSError) as exc:
        print(f"dyncom: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
