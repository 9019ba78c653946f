"""Command-line interface.

Subcommands mirror the pipeline stages: distribute, redistribute,
compile, labels, reliability, visualize. JSON results go to stdout, file
outputs into the --out directory, warnings to stderr. Error exit codes
identify the error class (see errors module); 2 is argparse's own usage
error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import __version__, compilation, distribution, model, viz, workflows
from .agreement import AnnotatorGraph, METRIC_CHOICES
from .errors import AnnokitError
from .labels import VARIANTS


def _spec_from_args(args) -> distribution.ResourceSpec:
    return distribution.ResourceSpec(
        annotators=args.annotators,
        time=args.time,
        rate=args.rate,
        samples=args.samples,
        double=args.double,
        reannotation=args.re,
    )


def _add_spec_flags(parser, with_samples=True):
    parser.add_argument("--annotators", type=float, help="annotator count n")
    parser.add_argument("--time", type=float, help="hours per annotator t")
    parser.add_argument("--rate", type=float, help="annotations per hour")
    if with_samples:
        parser.add_argument("--samples", type=float, help="total sample count N")
    parser.add_argument(
        "--double", type=float, default=0.0, help="double-annotation proportion d"
    )
    parser.add_argument(
        "--re", type=float, default=0.0, help="re-annotation proportion r"
    )


def _add_io_flags(parser, inp=True, out=True):
    if inp:
        parser.add_argument("--in", dest="infile", help="input file")
    if out:
        parser.add_argument("--out", help="output directory or file")


def _names(raw):
    if raw is None:
        return None
    return [part.strip() for part in raw.split(",") if part.strip()]


def _load_mapping(raw):
    if raw is None:
        return None
    text = Path(raw).read_text() if Path(raw).exists() else raw
    return model.LabelMapping.from_dict(json.loads(text))


def _load_reliabilities(raw):
    if raw is None:
        return None
    text = Path(raw).read_text() if Path(raw).exists() else raw
    data = json.loads(text)
    if isinstance(data, dict) and "reliability" in data:
        data = data["reliability"]
    return {str(k): float(v) for k, v in data.items()}


def _write_files(out_dir, files) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, payload in files.items():
        path = out / name
        path.write_bytes(payload)
        paths.append(str(path))
    return paths


def _emit(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annokit",
        description="Annotation planning, distribution, compilation and "
        "reliability analysis for multi-annotator projects.",
    )
    parser.add_argument("--version", action="version", version=f"annokit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "distribute",
        help="solve the resource equation and split samples across annotators",
    )
    _add_io_flags(p)
    _add_spec_flags(p)
    p.add_argument("--seed", type=int, default=0, help="seed for re-annotation choice")
    p.add_argument("--names", help="comma-separated annotator names")
    p.add_argument(
        "--ring-span",
        type=int,
        default=1,
        help="share samples with neighbours up to this ring distance",
    )
    p.set_defaults(func=_cmd_distribute)

    p = sub.add_parser(
        "redistribute", help="reassign samples to annotators who have not seen them"
    )
    _add_io_flags(p)
    _add_spec_flags(p)
    p.add_argument("--seed", type=int, default=0, help="seed for annotator order")
    p.add_argument("--names", help="comma-separated annotator names")
    p.add_argument("--data-columns", help="comma-separated non-annotator columns")
    p.set_defaults(func=_cmd_redistribute)

    p = sub.add_parser(
        "compile", help="merge per-annotator CSVs or a ZIP into one frame"
    )
    _add_io_flags(p)
    p.add_argument(
        "--rename",
        action="append",
        default=[],
        metavar="OLD=NEW",
        help="column rename applied to every input file (repeatable)",
    )
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("labels", help="generate soft and hard labels")
    _add_io_flags(p)
    p.add_argument(
        "--label-generator",
        choices=VARIANTS,
        default="default",
        help="how annotation cells become probability vectors",
    )
    p.add_argument("--mapping", help="label mapping as JSON text or file")
    p.add_argument("--names", help="comma-separated annotator names")
    p.add_argument("--data-columns", help="comma-separated non-annotator columns")
    p.add_argument(
        "--reliability",
        help="annotator reliability weights as JSON text or file",
    )
    p.add_argument(
        "--hard-mode",
        choices=("argmax", "majority"),
        default="argmax",
        help="hard label rule",
    )
    p.set_defaults(func=_cmd_labels)

    p = sub.add_parser(
        "reliability",
        help="agreement graph, reliability fixed point and visual exports",
    )
    _add_io_flags(p)
    p.add_argument(
        "--metric",
        choices=METRIC_CHOICES,
        default="krippendorff_nominal",
        help="pairwise agreement metric",
    )
    p.add_argument(
        "--alpha",
        type=float,
        default=0.5,
        help="intra weight in the reliability blend",
    )
    p.add_argument(
        "--overlap-threshold",
        type=int,
        default=0,
        help="minimum shared samples for an agreement edge",
    )
    p.add_argument(
        "--outputs",
        default="reliability",
        help="comma-separated subset of: " + ", ".join(workflows.RELIABILITY_OUTPUTS),
    )
    p.add_argument(
        "--label-generator", choices=VARIANTS, default="default",
        help="annotation cell interpretation",
    )
    p.add_argument("--mapping", help="label mapping as JSON text or file")
    p.add_argument("--names", help="comma-separated annotator names")
    p.add_argument("--data-columns", help="comma-separated non-annotator columns")
    p.add_argument("--heatmap-annotators", help="heatmap row subset")
    p.add_argument("--heatmap-others", help="heatmap column subset")
    p.set_defaults(func=_cmd_reliability)

    p = sub.add_parser(
        "visualize", help="render an exported graph JSON to images"
    )
    _add_io_flags(p)
    p.add_argument(
        "--outputs",
        default="graph2d",
        help="comma-separated subset of: graph2d, graph3d, heatmap",
    )
    p.add_argument("--heatmap-annotators", help="heatmap row subset")
    p.add_argument("--heatmap-others", help="heatmap column subset")
    p.set_defaults(func=_cmd_visualize)
    return parser


def _cmd_distribute(args) -> int:
    spec = _spec_from_args(args)
    if args.infile is None:
        solved = distribution.solve_resources(spec)
        _emit(solved.to_json())
        return 0
    if args.out is None:
        raise AnnokitError("--out is required when distributing a file")
    frame = model.read_frame(args.infile)
    solved, alloc, files = workflows.run_distribute(
        frame,
        spec,
        seed=args.seed,
        annotator_names=_names(args.names),
        ring_span=args.ring_span,
    )
    _write_files(args.out, files)
    _emit(solved.to_json())
    return 0


def _cmd_redistribute(args) -> int:
    spec = _spec_from_args(args)
    if args.infile is None or args.out is None:
        raise AnnokitError("redistribute requires --in and --out")
    frame = model.read_frame(args.infile)
    solved, alloc, files = workflows.run_redistribute(
        frame,
        spec,
        seed=args.seed,
        annotator_names=_names(args.names),
        data_columns=_names(args.data_columns) or (),
    )
    _write_files(args.out, files)
    _emit(solved.to_json())
    return 0


def _parse_renames(pairs) -> dict:
    renames = {}
    for pair in pairs:
        for chunk in pair.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if "=" not in chunk:
                raise AnnokitError(f"rename must look like OLD=NEW, got {chunk!r}")
            old, new = chunk.split("=", 1)
            renames[old.strip()] = new.strip()
    return renames


def _cmd_compile(args) -> int:
    if args.infile is None or args.out is None:
        raise AnnokitError("compile requires --in and --out")
    renames = _parse_renames(args.rename)
    source = Path(args.infile)
    if source.is_dir():
        tables = [
            (path.stem, model.read_frame(path))
            for path in sorted(source.glob("*.csv"))
            if path.stem not in compilation.NON_ANNOTATOR_STEMS
        ]
    else:
        tables = compilation.unpack_archive(source)
    frame = compilation.compile_annotations(tables, renames=renames)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(model.frame_to_csv_bytes(frame))
    _emit(
        {
            "rows": len(frame),
            "annotators": [name for name, _ in tables],
            "columns": list(frame.columns),
        }
    )
    return 0


def _cmd_labels(args) -> int:
    if args.infile is None or args.out is None:
        raise AnnokitError("labels requires --in and --out")
    frame = model.read_frame(args.infile)
    out_frame = workflows.run_labels(
        frame,
        label_generator=args.label_generator,
        mapping=_load_mapping(args.mapping),
        annotators=_names(args.names),
        data_columns=_names(args.data_columns) or (),
        reliabilities=_load_reliabilities(args.reliability),
        hard_mode=args.hard_mode,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(model.frame_to_csv_bytes(out_frame))
    _emit({"rows": len(out_frame), "generator": args.label_generator})
    return 0


def _cmd_reliability(args) -> int:
    if args.infile is None:
        raise AnnokitError("reliability requires --in")
    frame = model.read_frame(args.infile)
    payload = workflows.run_reliability(
        frame,
        metric=args.metric,
        alpha=args.alpha,
        overlap_threshold=args.overlap_threshold,
        label_generator=args.label_generator,
        mapping=_load_mapping(args.mapping),
        annotators=_names(args.names),
        data_columns=_names(args.data_columns) or (),
        outputs=[s.strip() for s in args.outputs.split(",") if s.strip()],
        heatmap_annotators=_names(args.heatmap_annotators),
        heatmap_others=_names(args.heatmap_others),
    )
    if args.out is not None:
        _write_files(args.out, workflows.reliability_files(payload))
    _emit(
        {
            key: payload[key]
            for key in (
                "reliability",
                "iterations",
                "converged",
                "alpha",
                "metric",
                "overlap_threshold",
            )
        }
    )
    return 0


def _cmd_visualize(args) -> int:
    if args.infile is None or args.out is None:
        raise AnnokitError("visualize requires --in and --out")
    graph = AnnotatorGraph.from_json(json.loads(Path(args.infile).read_text()))
    outputs = [s.strip() for s in args.outputs.split(",") if s.strip()]
    files = {}
    for entry in outputs:
        if entry == "graph2d":
            files["graph2d.svg"] = viz.export_graph_2d(graph).encode()
        elif entry == "graph3d":
            files["scene3d.json"] = (
                json.dumps(viz.export_graph_3d(graph), indent=2, sort_keys=True) + "\n"
            ).encode()
        elif entry == "heatmap":
            files["heatmap.svg"] = viz.export_heatmap(
                graph, _names(args.heatmap_annotators), _names(args.heatmap_others)
            ).encode()
            files["heatmap.json"] = (
                json.dumps(
                    viz.heatmap_matrix(
                        graph,
                        _names(args.heatmap_annotators),
                        _names(args.heatmap_others),
                    ),
                    indent=2,
                    sort_keys=True,
                )
                + "\n"
            ).encode()
        else:
            raise AnnokitError(f"unknown output {entry!r}")
    _write_files(args.out, files)
    _emit({"written": sorted(files)})
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = args.func(args)
        except AnnokitError as exc:
            _print_warnings(caught)
            print(f"error: {exc.name}: {exc}", file=sys.stderr)
            if getattr(exc, "stuck_samples", None):
                print(
                    "stuck samples: " + ", ".join(map(str, exc.stuck_samples)),
                    file=sys.stderr,
                )
            return exc.exit_code
    _print_warnings(caught)
    return code


def _print_warnings(caught) -> None:
    for item in caught:
        print(f"warning: {item.message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
