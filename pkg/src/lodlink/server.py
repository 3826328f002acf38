"""HTTP API over the registry, matcher, and enrichment modules.

All state lives in memory behind a lock; linking runs execute on a worker
thread and publish Progress snapshots that clients poll.  When a data
directory is configured the state is snapshotted there on shutdown and
loaded on startup.
"""

from __future__ import annotations

import contextlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse

from .dataset import (
    DataSource,
    DuplicateLabel,
    SourceRegistry,
    enumerate_property_paths,
    extract_entities,
    lint_source,
    suggest_property_pairs,
)
from .enrich import (
    PolicyError,
    UnresolvableLinkTarget,
    inject_links,
    merge_metadata,
    parse_merge_policy,
)
from .io import FormatTag, ParseError, UnknownFormat, UnsupportedConstruct, detect_format, parse, serialize
from .io.ntriples import parse_ntriples, serialize_ntriples
from .matcher import (
    Link,
    LinkSet,
    LinkingTask,
    Progress,
    RunState,
    Verdict,
    generate_links,
    links_ntriples,
)
from .model import Iri, PrefixMap, UnboundPrefix, nt_triple
from .rules import (
    LinkageRule,
    SpecError,
    evaluate_comparison,
    iter_comparisons,
    literal_values,
    node_to_payload,
    parse_rule_payload,
    rule_errors,
    rule_warnings,
    validate_rule,
)
from .vocab import OWL_SAME_AS, WELL_KNOWN_PREFIXES

__all__ = ["create_app"]


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details


@dataclass
class TaskRecord:
    id: str
    source_id: str
    target_id: str
    link_type: Iri = OWL_SAME_AS
    threshold: float = 0.0
    rule: LinkageRule | None = None
    prefixes: PrefixMap = field(default_factory=lambda: PrefixMap(WELL_KNOWN_PREFIXES))
    progress: Progress = Progress(RunState.IDLE, 0, 0, 0)
    links: list[Link] | None = None
    running: bool = False


class ServerState:
    def __init__(self, data_dir: str | None = None):
        self.registry = SourceRegistry()
        self.tasks: dict[str, TaskRecord] = {}
        self.lock = threading.RLock()
        self.data_dir = Path(data_dir) if data_dir else None
        self._task_counter = 0

    def new_task_id(self) -> str:
        self._task_counter += 1
        return f"t{self._task_counter}"


def _source_row(state: ServerState, source: DataSource) -> dict:
    return {
        "id": source.id,
        "label": source.label,
        "format": source.format.value,
        "tripleCount": len(source.graph),
        "entityCount": len(extract_entities(source)),
        "entityType": source.entity_type.value if source.entity_type else None,
    }


def _task_row(task: TaskRecord) -> dict:
    return {
        "id": task.id,
        "sourceId": task.source_id,
        "targetId": task.target_id,
        "linkType": task.link_type.value,
        "hasRule": task.rule is not None,
        "state": task.progress.state.value,
    }


def _progress_row(progress: Progress) -> dict:
    return {
        "state": progress.state.value,
        "pairsEvaluated": progress.pairs_evaluated,
        "totalPairs": progress.total_pairs,
        "linksFound": progress.links_found,
    }


def _issue_rows(issues) -> list[dict]:
    return [{"nodeId": i.node_id, "message": i.message} for i in issues]


def _get_source(state: ServerState, source_id: str) -> DataSource:
    try:
        return state.registry.get(source_id)
    except KeyError:
        raise ApiError(404, "UNKNOWN_DATASET", f"no dataset with id {source_id!r}") from None


def _get_task(state: ServerState, task_id: str) -> TaskRecord:
    task = state.tasks.get(task_id)
    if task is None:
        raise ApiError(404, "UNKNOWN_TASK", f"no task with id {task_id!r}")
    return task


def _resolve_iri_arg(raw: str, prefixes: PrefixMap) -> Iri:
    merged = PrefixMap(WELL_KNOWN_PREFIXES)
    merged.update(prefixes)
    try:
        if raw.startswith("<") and raw.endswith(">"):
            return Iri(raw[1:-1])
        if ":" in raw and raw.split(":", 1)[0] in merged:
            return merged.expand(raw)
        return Iri(raw)
    except (UnboundPrefix, ValueError) as exc:
        raise ApiError(422, "BAD_IRI", str(exc)) from None


def _run_task(state: ServerState, task: TaskRecord, blocking: bool) -> None:
    def sink(progress: Progress) -> None:
        with state.lock:
            task.progress = progress

    try:
        with state.lock:
            source = state.registry.get(task.source_id)
            target = state.registry.get(task.target_id)
            rule = task.rule
        link_set = generate_links(
            LinkingTask(task.id, source, target, rule), blocking=blocking, progress_sink=sink
        )
        with state.lock:
            task.links = list(link_set.links)
    except Exception:
        with state.lock:
            done = task.progress
            task.progress = Progress(RunState.FAILED, done.pairs_evaluated, done.total_pairs, done.links_found)
    finally:
        with state.lock:
            task.running = False


def _snapshot(state: ServerState) -> None:
    if state.data_dir is None:
        return
    graphs_dir = state.data_dir / "graphs"
    graphs_dir.mkdir(parents=True, exist_ok=True)
    sources = []
    with state.lock:
        for source in state.registry.list():
            (graphs_dir / f"{source.id}.nt").write_bytes(serialize_ntriples(source.graph).encode("utf-8"))
            sources.append(
                {
                    "id": source.id,
                    "label": source.label,
                    "format": source.format.value,
                    "entityType": source.entity_type.value if source.entity_type else None,
                    "prefixes": dict(source.graph.prefixes.items()),
                }
            )
        tasks = []
        for task in state.tasks.values():
            tasks.append(
                {
                    "id": task.id,
                    "sourceId": task.source_id,
                    "targetId": task.target_id,
                    "linkType": task.link_type.value,
                    "threshold": task.threshold,
                    "rule": node_to_payload(task.rule.root) if task.rule else None,
                    "prefixes": dict(task.prefixes.items()),
                    "links": None
                    if task.links is None
                    else [
                        {
                            "source": l.source.value,
                            "predicate": l.predicate.value,
                            "target": l.target.value,
                            "confidence": l.confidence,
                            "verdict": l.verdict.value,
                        }
                        for l in task.links
                    ],
                    "progress": _progress_row(task.progress),
                }
            )
    (state.data_dir / "state.json").write_text(
        json.dumps({"sources": sources, "tasks": tasks}, indent=2), encoding="utf-8"
    )


def _restore(state: ServerState) -> None:
    if state.data_dir is None:
        return
    state_file = state.data_dir / "state.json"
    if not state_file.exists():
        return
    raw = json.loads(state_file.read_text(encoding="utf-8"))
    for row in raw.get("sources", []):
        text = (state.data_dir / "graphs" / f"{row['id']}.nt").read_text(encoding="utf-8")
        graph = parse_ntriples(text)
        for label, namespace in (row.get("prefixes") or {}).items():
            graph.prefixes.bind(label, namespace)
        entity_type = Iri(row["entityType"]) if row.get("entityType") else None
        state.registry.register(graph, row["label"], FormatTag(row["format"]), entity_type)
    for row in raw.get("tasks", []):
        prefixes = PrefixMap(row.get("prefixes") or {})
        task = TaskRecord(
            id=row["id"],
            source_id=row["sourceId"],
            target_id=row["targetId"],
            link_type=Iri(row["linkType"]),
            threshold=row.get("threshold", 0.0),
            prefixes=prefixes,
        )
        if row.get("rule") is not None:
            root = parse_rule_payload(row["rule"], prefixes)
            task.rule = LinkageRule(root, task.link_type, task.threshold)
        if row.get("links") is not None:
            task.links = [
                Link(
                    Iri(l["source"]),
                    Iri(l["predicate"]),
                    Iri(l["target"]),
                    l["confidence"],
                    Verdict(l["verdict"]),
                )
                for l in row["links"]
            ]
        p = row.get("progress")
        if p:
            task.progress = Progress(RunState(p["state"]), p["pairsEvaluated"], p["totalPairs"], p["linksFound"])
        state.tasks[task.id] = task
        state._task_counter = max(state._task_counter, int(task.id.lstrip("t") or 0))


def create_app(data_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    state = ServerState(data_dir)
    with contextlib.suppress(Exception):
        _restore(state)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        _snapshot(state)

    app = FastAPI(title="lodlink", lifespan=lifespan)
    app.state.lodlink = state

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        body = {"code": exc.code, "message": exc.message}
        if exc.details:
            body["details"] = exc.details
        return JSONResponse(status_code=exc.status, content=body)

    @app.post("/api/datasets", status_code=201)
    async def upload_dataset(
        file: UploadFile = File(...),
        label: str = Form(...),
        format: str | None = Form(None),
        entityType: str | None = Form(None),
    ):
        payload = await file.read()
        text = payload.decode("utf-8", errors="replace")
        if not text.strip():
            raise ApiError(422, "EMPTY_UPLOAD", "the uploaded file is empty")
        try:
            if format:
                try:
                    fmt = FormatTag(format)
                except ValueError:
                    raise ApiError(422, "UNKNOWN_FORMAT", f"unknown format {format!r}") from None
            else:
                fmt = detect_format(file.filename or "", text[:512])
            graph = parse(text, fmt)
        except UnsupportedConstruct as exc:
            raise ApiError(
                422,
                "PARSE_ERROR",
                str(exc),
                {"line": exc.line, "column": exc.column, "construct": exc.construct},
            ) from None
        except ParseError as exc:
            raise ApiError(422, "PARSE_ERROR", str(exc), {"line": exc.line, "column": exc.column}) from None
        except UnknownFormat as exc:
            raise ApiError(422, "UNKNOWN_FORMAT", str(exc)) from None
        entity_type = _resolve_iri_arg(entityType, graph.prefixes) if entityType else None
        with state.lock:
            try:
                source = state.registry.register(graph, label, fmt, entity_type)
            except DuplicateLabel as exc:
                raise ApiError(409, "DUPLICATE_LABEL", str(exc)) from None
        return _source_row(state, source)

    @app.get("/api/datasets")
    async def list_datasets():
        with state.lock:
            return {
                "sources": [_source_row(state, s) for s in state.registry.list()],
                "tasks": [_task_row(t) for t in state.tasks.values()],
            }

    @app.get("/api/datasets/{source_id}/paths")
    async def dataset_paths(source_id: str, maxDepth: int = 3):
        source = _get_source(state, source_id)
        if not 1 <= maxDepth <= 4:
            raise ApiError(422, "BAD_DEPTH", "maxDepth must be between 1 and 4")
        rows = []
        for profile in enumerate_property_paths(source, max_depth=maxDepth):
            rows.append(
                {
                    "path": profile.path.render(source.graph.prefixes),
                    "steps": [s.value for s in profile.path.steps],
                    "frequency": profile.frequency,
                    "terminal": profile.terminal.value,
                    "samples": list(profile.sample_values),
                }
            )
        return rows

    @app.get("/api/datasets/{source_id}/lint")
    async def dataset_lint(source_id: str):
        source = _get_source(state, source_id)
        return [
            {"code": w.code, "subject": w.subject.value if w.subject else None, "message": w.message}
            for w in lint_source(source)
        ]

    @app.get("/api/suggest")
    async def suggest(source: str, target: str, maxDepth: int = 2):
        source_ds = _get_source(state, source)
        target_ds = _get_source(state, target)
        if not 1 <= maxDepth <= 4:
            raise ApiError(422, "BAD_DEPTH", "maxDepth must be between 1 and 4")
        rows = []
        for source_path, target_path, score in suggest_property_pairs(source_ds, target_ds, max_depth=maxDepth):
            rows.append(
                {
                    "sourcePath": source_path.render(source_ds.graph.prefixes),
                    "sourceSteps": [s.value for s in source_path.steps],
                    "targetPath": target_path.render(target_ds.graph.prefixes),
                    "targetSteps": [s.value for s in target_path.steps],
                    "score": score,
                }
            )
        return rows

    @app.post("/api/tasks", status_code=201)
    async def create_task(body: dict):
        source_id = body.get("sourceId")
        target_id = body.get("targetId")
        if not isinstance(source_id, str) or not isinstance(target_id, str):
            raise ApiError(422, "BAD_TASK", "sourceId and targetId are required")
        with state.lock:
            _get_source(state, source_id)
            _get_source(state, target_id)
            task = TaskRecord(state.new_task_id(), source_id, target_id)
            if "linkType" in body:
                task.link_type = _resolve_iri_arg(str(body["linkType"]), task.prefixes)
            state.tasks[task.id] = task
            return _task_row(task)

    @app.get("/api/tasks/{task_id}")
    async def get_task(task_id: str):
        with state.lock:
            task = _get_task(state, task_id)
            row = _task_row(task)
            row["threshold"] = task.threshold
            row["rule"] = node_to_payload(task.rule.root) if task.rule else None
            row["progress"] = _progress_row(task.progress)
            return row

    @app.put("/api/tasks/{task_id}/rule")
    async def put_rule(task_id: str, body: dict):
        with state.lock:
            task = _get_task(state, task_id)
            if task.running:
                raise ApiError(409, "RUN_IN_PROGRESS", "cannot edit the rule while a run is active")
            source = state.registry.get(task.source_id)
            target = state.registry.get(task.target_id)
        prefixes = PrefixMap(WELL_KNOWN_PREFIXES)
        for label, namespace in (body.get("prefixes") or {}).items():
            try:
                prefixes.bind(label, namespace)
            except (TypeError, ValueError) as exc:
                raise ApiError(422, "SPEC_ERROR", f"bad prefix binding {label!r}: {exc}") from None
        if "rule" not in body:
            raise ApiError(422, "SPEC_ERROR", "missing required key 'rule'")
        link_type = task.link_type
        if "linkType" in body:
            link_type = _resolve_iri_arg(str(body["linkType"]), prefixes)
        threshold = task.threshold
        if "threshold" in body:
            raw = body["threshold"]
            if not isinstance(raw, (int, float)) or isinstance(raw, bool) or not 0.0 <= raw <= 1.0:
                raise ApiError(422, "SPEC_ERROR", "threshold must be a number within [0, 1]")
            threshold = float(raw)
        try:
            root = parse_rule_payload(body["rule"], prefixes)
            rule = LinkageRule(root, link_type, threshold)
        except SpecError as exc:
            raise ApiError(422, "SPEC_ERROR", str(exc), {"location": exc.location}) from None
        except ValueError as exc:
            raise ApiError(422, "SPEC_ERROR", str(exc)) from None

        issues = validate_rule(
            rule,
            enumerate_property_paths(source, max_depth=4),
            enumerate_property_paths(target, max_depth=4),
        )
        errors = rule_errors(issues)
        warnings = rule_warnings(issues)
        if errors:
            raise ApiError(
                422,
                "INVALID_RULE",
                "the rule has validation errors",
                {"errors": _issue_rows(errors), "warnings": _issue_rows(warnings)},
            )
        with state.lock:
            task.rule = rule
            task.link_type = link_type
            task.threshold = threshold
            task.prefixes = prefixes
        return {"errors": [], "warnings": _issue_rows(warnings)}

    @app.post("/api/tasks/{task_id}/run", status_code=202)
    async def run_task(task_id: str, body: dict | None = None):
        blocking = True
        if body and "blocking" in body:
            blocking = bool(body["blocking"])
        with state.lock:
            task = _get_task(state, task_id)
            if task.rule is None:
                raise ApiError(412, "NO_RULE", "the task has no rule yet")
            if task.running:
                raise ApiError(409, "RUN_IN_PROGRESS", "a run is already active for this task")
            task.running = True
            task.links = None
            task.progress = Progress(RunState.RUNNING, 0, 0, 0)
        thread = threading.Thread(target=_run_task, args=(state, task, blocking), daemon=True)
        thread.start()
        return {"progressUrl": f"/api/tasks/{task_id}/progress"}

    @app.get("/api/tasks/{task_id}/progress")
    async def task_progress(task_id: str):
        with state.lock:
            task = _get_task(state, task_id)
            return _progress_row(task.progress)

    @app.get("/api/tasks/{task_id}/links")
    async def task_links(task_id: str, offset: int = 0, limit: int = 50):
        with state.lock:
            task = _get_task(state, task_id)
            if task.links is None:
                raise ApiError(409, "NO_RUN", "the task has no completed run")
            links = list(task.links)
            rule = task.rule
            source = state.registry.get(task.source_id)
            target = state.registry.get(task.target_id)
        offset = max(0, offset)
        limit = max(0, min(limit, 500))
        rows = []
        for index, link in enumerate(links[offset : offset + limit], start=offset):
            comparisons = []
            if rule is not None:
                for comparison in iter_comparisons(rule.root):
                    decision = evaluate_comparison(
                        comparison, source.graph, link.source, target.graph, link.target
                    )
                    comparisons.append(
                        {
                            "id": comparison.id,
                            "sourceValues": sorted(
                                literal_values(source.graph, link.source, comparison.source_path)
                            ),
                            "targetValues": sorted(
                                literal_values(target.graph, link.target, comparison.target_path)
                            ),
                            "accept": decision.accept,
                            "confidence": decision.confidence,
                        }
                    )
            rows.append(
                {
                    "index": index,
                    "source": link.source.value,
                    "predicate": link.predicate.value,
                    "target": link.target.value,
                    "confidence": link.confidence,
                    "verdict": link.verdict.value,
                    "comparisons": comparisons,
                }
            )
        return {"total": len(links), "offset": offset, "links": rows}

    @app.post("/api/tasks/{task_id}/links/{index}/verdict")
    async def set_verdict(task_id: str, index: int, body: dict):
        raw = body.get("verdict")
        try:
            verdict = Verdict(raw)
        except ValueError:
            raise ApiError(422, "BAD_VERDICT", f"unknown verdict {raw!r}") from None
        with state.lock:
            task = _get_task(state, task_id)
            if task.links is None:
                raise ApiError(409, "NO_RUN", "the task has no completed run")
            if not 0 <= index < len(task.links):
                raise ApiError(404, "UNKNOWN_LINK", f"no link at index {index}")
            task.links[index] = task.links[index].with_verdict(verdict)
            link = task.links[index]
        return {
            "index": index,
            "source": link.source.value,
            "target": link.target.value,
            "verdict": link.verdict.value,
        }

    @app.get("/api/tasks/{task_id}/export")
    async def export_links(task_id: str, verdicts: str = "ACCEPTED,UNREVIEWED"):
        keep: set[Verdict] = set()
        for name in verdicts.split(","):
            name = name.strip()
            if not name:
                continue
            try:
                keep.add(Verdict(name))
            except ValueError:
                raise ApiError(422, "BAD_VERDICT", f"unknown verdict {name!r}") from None
        with state.lock:
            task = _get_task(state, task_id)
            if task.links is None:
                raise ApiError(409, "NO_RUN", "the task has no completed run")
            link_set = LinkSet(task.id, tuple(task.links))
        text = links_ntriples(link_set, keep)
        return PlainTextResponse(
            text,
            media_type="application/n-triples",
            headers={"Content-Disposition": 'attachment; filename="links.nt"'},
        )

    @app.post("/api/enrich")
    async def enrich(
        graph: UploadFile = File(...),
        mode: str = Form("links"),
        taskId: str | None = Form(None),
        links: UploadFile | None = File(None),
        targets: list[UploadFile] = File([]),
        policy: str | None = Form(None),
    ):
        if mode not in ("links", "merge"):
            raise ApiError(422, "BAD_MODE", f"mode must be 'links' or 'merge', got {mode!r}")
        graph_text = (await graph.read()).decode("utf-8", errors="replace")
        if not graph_text.strip():
            raise ApiError(422, "EMPTY_UPLOAD", "the uploaded graph is empty")
        try:
            fmt = detect_format(graph.filename or "", graph_text[:512])
            base = parse(graph_text, fmt)
        except ParseError as exc:
            raise ApiError(422, "PARSE_ERROR", str(exc), {"line": exc.line, "column": exc.column}) from None
        except UnknownFormat as exc:
            raise ApiError(422, "UNKNOWN_FORMAT", str(exc)) from None

        origin_labels: dict[str, str] = {}
        merge_targets: list[DataSource] = []
        if taskId is not None:
            with state.lock:
                task = _get_task(state, taskId)
                if task.links is None:
                    raise ApiError(409, "NO_RUN", "the task has no completed run")
                link_set = LinkSet(task.id, tuple(task.links))
                target_ds = state.registry.get(task.target_id)
                origin_labels[task.id] = f"task {task.id}"
                origin_labels[target_ds.id] = target_ds.label
                merge_targets.append(target_ds)
        elif links is not None:
            links_text = (await links.read()).decode("utf-8", errors="replace")
            try:
                links_graph = parse_ntriples(links_text)
            except ParseError as exc:
                raise ApiError(422, "PARSE_ERROR", str(exc), {"line": exc.line, "column": exc.column}) from None
            rows = []
            for t in links_graph:
                if not isinstance(t.subject, Iri) or not isinstance(t.object, Iri):
                    raise ApiError(422, "PARSE_ERROR", "links files must contain IRI-to-IRI triples only")
                rows.append(Link(t.subject, t.predicate, t.object, 1.0, Verdict.UNREVIEWED))
            link_set = LinkSet("links", tuple(rows))
            origin_labels["links"] = links.filename or "links"
        else:
            raise ApiError(422, "NO_LINKS", "provide either a links file or a taskId")

        merge_policy = None
        if policy is not None:
            try:
                merge_policy = parse_merge_policy(policy)
            except PolicyError as exc:
                raise ApiError(422, "BAD_POLICY", str(exc)) from None

        registry = SourceRegistry()
        for upload in targets:
            text = (await upload.read()).decode("utf-8", errors="replace")
            try:
                target_fmt = detect_format(upload.filename or "", text[:512])
                target_graph = parse(text, target_fmt)
            except ParseError as exc:
                raise ApiError(422, "PARSE_ERROR", str(exc), {"line": exc.line, "column": exc.column}) from None
            except UnknownFormat as exc:
                raise ApiError(422, "UNKNOWN_FORMAT", str(exc)) from None
            ds = registry.register(target_graph, upload.filename or f"target{len(merge_targets) + 1}", target_fmt)
            origin_labels[ds.id] = ds.label
            merge_targets.append(ds)

        try:
            if mode == "links":
                enriched, report = inject_links(base, link_set)
            else:
                if not merge_targets:
                    raise ApiError(422, "NO_TARGETS", "merge mode needs at least one target dataset")
                enriched, report = merge_metadata(base, link_set, merge_targets, merge_policy)
        except UnresolvableLinkTarget as exc:
            raise ApiError(409, "UNRESOLVABLE_TARGET", str(exc)) from None

        return {
            "report": {
                "mode": report.mode.value,
                "added": [
                    {"triple": nt_triple(t), "origin": origin_labels.get(origin, origin)}
                    for t, origin in report.added
                ],
                "skipped": [{"triple": nt_triple(t), "reason": reason} for t, reason in report.skipped],
            },
            "graph": serialize(enriched, FormatTag.TURTLE),
        }

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="workbench")

    return app
