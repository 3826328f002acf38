"""Command line front end.

Exit codes: 0 success, 1 usage errors, 2 malformed input (RDF or task
specs, including missing input files), 3 runtime failures.  Data goes to
stdout or the requested output files; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset import (
    DuplicateLabel,
    SourceRegistry,
    enumerate_property_paths,
    lint_source,
    suggest_property_pairs,
)
from .enrich import (
    PolicyError,
    UnresolvableLinkTarget,
    inject_links,
    merge_metadata,
    parse_merge_policy,
    render_provenance,
)
from .io import FormatTag, ParseError, UnknownFormat, detect_format, load_path, parse, serialize
from .matcher import Link, LinkSet, LinkingTask, Verdict, generate_links, write_links
from .model import Graph, Iri, PrefixMap, UnboundPrefix
from .rules import SpecError, parse_rule_spec, rule_errors, rule_warnings, validate_rule, with_threshold
from .vocab import WELL_KNOWN_PREFIXES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BAD_INPUT = 2
EXIT_RUNTIME = 3

_FORMAT_CHOICES = {
    "ntriples": FormatTag.NTRIPLES,
    "turtle": FormatTag.TURTLE,
    "rdfxml": FormatTag.RDFXML,
}


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _load_graph(path: str, fmt_name: str | None) -> Graph:
    fmt = _FORMAT_CHOICES[fmt_name] if fmt_name else None
    graph, _ = load_path(path, fmt)
    return graph


def _resolve_iri(text: str, prefixes: PrefixMap) -> Iri:
    merged = PrefixMap(WELL_KNOWN_PREFIXES)
    merged.update(prefixes)
    if text.startswith("<") and text.endswith(">"):
        return Iri(text[1:-1])
    if ":" in text and text.split(":", 1)[0] in merged:
        return merged.expand(text)
    return Iri(text)


def _cmd_validate(args) -> int:
    graph = _load_graph(args.file, args.format)
    print(f"{len(graph)} triples")
    return EXIT_OK


def _register_file(registry: SourceRegistry, path: str, fmt_name: str | None, entity_type: str | None):
    graph = _load_graph(path, fmt_name)
    resolved = _resolve_iri(entity_type, graph.prefixes) if entity_type else None
    label = Path(path).name
    return registry.register(graph, label, detect_format(path, ""), resolved)


def _cmd_paths(args) -> int:
    source = _register_file(SourceRegistry(), args.file, args.format, args.entity_type)
    for profile in enumerate_property_paths(source, max_depth=args.max_depth):
        rendered = profile.path.render(source.graph.prefixes)
        samples = "|".join(profile.sample_values)
        print(f"{rendered}\t{profile.frequency}\t{profile.terminal.value}\t{samples}")
    return EXIT_OK


def _cmd_lint(args) -> int:
    source = _register_file(SourceRegistry(), args.file, args.format, args.entity_type)
    for warning in lint_source(source):
        subject = warning.subject.value if warning.subject else "-"
        print(f"{warning.code}\t{subject}\t{warning.message}")
    return EXIT_OK


def _cmd_suggest(args) -> int:
    registry = SourceRegistry()
    source = _register_file(registry, args.source, args.source_format, args.source_type)
    target = _register_file(registry, args.target, args.target_format, args.target_type)
    for source_path, target_path, score in suggest_property_pairs(source, target, max_depth=args.max_depth):
        left = source_path.render(source.graph.prefixes)
        right = target_path.render(target.graph.prefixes)
        print(f"{score:.4f}\t{left}\t{right}")
    return EXIT_OK


def _cmd_link(args) -> int:
    spec_path = Path(args.spec)
    spec = parse_rule_spec(spec_path.read_text(encoding="utf-8"))

    def endpoint_file(override: str | None, configured: str | None, side: str) -> Path:
        if override:
            return Path(override)
        if configured is None:
            raise _UsageError(f"the task spec names no {side} file; pass --{side}")
        configured_path = Path(configured)
        return configured_path if configured_path.is_absolute() else spec_path.parent / configured_path

    source_file = endpoint_file(args.source, spec.source.file, "source")
    target_file = endpoint_file(args.target, spec.target.file, "target")

    registry = SourceRegistry()
    source_graph, source_fmt = load_path(source_file, spec.source.format)
    target_graph, target_fmt = load_path(target_file, spec.target.format)
    source = registry.register(source_graph, spec.source.label, source_fmt, spec.source.entity_type)
    target = registry.register(target_graph, spec.target.label, target_fmt, spec.target.entity_type)

    rule = spec.rule
    if args.threshold is not None:
        rule = with_threshold(rule, args.threshold)

    issues = validate_rule(
        rule,
        enumerate_property_paths(source, max_depth=4),
        enumerate_property_paths(target, max_depth=4),
    )
    for warning in rule_warnings(issues):
        print(f"warning: {warning.node_id}: {warning.message}", file=sys.stderr)
    errors = rule_errors(issues)
    if errors:
        for error in errors:
            print(f"error: {error.node_id or 'rule'}: {error.message}", file=sys.stderr)
        return EXIT_BAD_INPUT

    task = LinkingTask("cli", source, target, rule)
    link_set = generate_links(task, blocking=not args.no_blocking)
    count = write_links(link_set, args.out)
    print(f"{count} links written to {args.out}", file=sys.stderr)
    return EXIT_OK


def _links_from_file(path: str) -> LinkSet:
    graph, _ = load_path(path, FormatTag.NTRIPLES)
    links = []
    for t in graph:
        if not isinstance(t.subject, Iri) or not isinstance(t.object, Iri):
            raise ParseError(1, 1, "links files must contain IRI-to-IRI triples only")
        links.append(Link(t.subject, t.predicate, t.object, 1.0, Verdict.UNREVIEWED))
    return LinkSet("links", tuple(links))


def _cmd_enrich(args) -> int:
    graph = _load_graph(args.graph, None)
    link_set = _links_from_file(args.links)
    policy = parse_merge_policy(Path(args.policy).read_text(encoding="utf-8")) if args.policy else None

    origin_labels = {"links": Path(args.links).name}
    if args.mode == "links":
        enriched, report = inject_links(graph, link_set)
    else:
        if not args.target:
            raise _UsageError("merge mode needs at least one --target dataset")
        registry = SourceRegistry()
        targets = []
        for path in args.target:
            source = _register_file(registry, path, None, None)
            targets.append(source)
            origin_labels[source.id] = source.label
        enriched, report = merge_metadata(graph, link_set, targets, policy)

    out_path = Path(args.out)
    try:
        fmt = detect_format(out_path.name, "")
    except UnknownFormat:
        fmt = FormatTag.TURTLE
    if fmt is FormatTag.RDFXML:
        fmt = FormatTag.TURTLE
    out_path.write_bytes(serialize(enriched, fmt).encode("utf-8"))

    if args.provenance:
        Path(args.provenance).write_bytes(render_provenance(report, origin_labels).encode("utf-8"))
    print(f"{len(report.added)} triples added, {len(report.skipped)} skipped", file=sys.stderr)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(data_dir=args.data, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="lodlink", description="Discover links between RDF datasets and enrich them.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="parse a file and report its triple count")
    p_validate.add_argument("file")
    p_validate.add_argument("--format", choices=sorted(_FORMAT_CHOICES))
    p_validate.set_defaults(func=_cmd_validate)

    p_paths = sub.add_parser("paths", help="profile the property paths of a dataset")
    p_paths.add_argument("file")
    p_paths.add_argument("--format", choices=sorted(_FORMAT_CHOICES))
    p_paths.add_argument("--entity-type", dest="entity_type")
    p_paths.add_argument("--max-depth", dest="max_depth", type=int, default=3)
    p_paths.set_defaults(func=_cmd_paths)

    p_lint = sub.add_parser("lint", help="report data-quality warnings for a dataset")
    p_lint.add_argument("file")
    p_lint.add_argument("--format", choices=sorted(_FORMAT_CHOICES))
    p_lint.add_argument("--entity-type", dest="entity_type")
    p_lint.set_defaults(func=_cmd_lint)

    p_suggest = sub.add_parser("suggest", help="rank comparable property path pairs of two datasets")
    p_suggest.add_argument("source")
    p_suggest.add_argument("target")
    p_suggest.add_argument("--source-format", dest="source_format", choices=sorted(_FORMAT_CHOICES))
    p_suggest.add_argument("--target-format", dest="target_format", choices=sorted(_FORMAT_CHOICES))
    p_suggest.add_argument("--source-type", dest="source_type")
    p_suggest.add_argument("--target-type", dest="target_type")
    p_suggest.add_argument("--max-depth", dest="max_depth", type=int, default=2)
    p_suggest.set_defaults(func=_cmd_suggest)

    p_link = sub.add_parser("link", help="run a linking task spec and write the links")
    p_link.add_argument("--spec", required=True)
    p_link.add_argument("--out", required=True)
    p_link.add_argument("--source", help="override the source file named in the spec")
    p_link.add_argument("--target", help="override the target file named in the spec")
    p_link.add_argument("--threshold", type=float)
    p_link.add_argument("--no-blocking", dest="no_blocking", action="store_true")
    p_link.set_defaults(func=_cmd_link)

    p_enrich = sub.add_parser("enrich", help="inject links into a graph, optionally merging metadata")
    p_enrich.add_argument("--mode", choices=["links", "merge"], default="links")
    p_enrich.add_argument("--graph", required=True)
    p_enrich.add_argument("--links", required=True)
    p_enrich.add_argument("--target", action="append", default=[])
    p_enrich.add_argument("--policy")
    p_enrich.add_argument("--out", required=True)
    p_enrich.add_argument("--provenance")
    p_enrich.set_defaults(func=_cmd_enrich)

    p_serve = sub.add_parser("serve", help="start the HTTP API (and workbench, if built)")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=7070)
    p_serve.add_argument("--data", help="directory for state snapshots")
    p_serve.add_argument("--ui", help="directory of static workbench files")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def run_cli(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (ParseError, SpecError, PolicyError, UnknownFormat, UnboundPrefix) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (DuplicateLabel, UnresolvableLinkTarget, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
