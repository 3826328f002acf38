/** A stateful in-memory stand-in for the HTTP API, installed as the global
 * fetch. Response shapes and validation messages mirror the server so the
 * UI tests exercise realistic payloads without a running backend.
 */

import type { LinkRow, PathRow, ProgressRow } from "../src/api.js";

export const PAPER = "http://lars.org/Paper/001";
export const DBLP_RECORD = "http://dblp.rkbexplorer.com/id/conf/birthday/DaviesWS11";
export const SAME_AS = "http://www.w3.org/2002/07/owl#sameAs";
export const TITLE = "Semantic Technology and Knowledge Management";
export const TITLE_CONFIDENCE = 1 - 1 / 45;
export const NT_LINE = `<${PAPER}> <${SAME_AS}> <${DBLP_RECORD}> .`;
export const AUTHORS = ["John Davies", "Paul Warren", "York Sure"];

export const SOURCE_PATHS: PathRow[] = [
  {
    path: "dct:title",
    steps: ["http://purl.org/dc/terms/title"],
    frequency: 1,
    terminal: "LITERAL",
    samples: [TITLE],
  },
  {
    path: "dct:creator/foaf:name",
    steps: ["http://purl.org/dc/terms/creator", "http://xmlns.com/foaf/0.1/name"],
    frequency: 3,
    terminal: "LITERAL",
    samples: AUTHORS,
  },
  {
    path: "dct:date",
    steps: ["http://purl.org/dc/terms/date"],
    frequency: 1,
    terminal: "LITERAL",
    samples: ["2011"],
  },
];

export const TARGET_PATHS: PathRow[] = [
  {
    path: "akt:has-title",
    steps: ["http://www.aktors.org/ontology/portal#has-title"],
    frequency: 1,
    terminal: "LITERAL",
    samples: [`${TITLE}.`],
  },
  {
    path: "akt:has-author/akt:full-name",
    steps: [
      "http://www.aktors.org/ontology/portal#has-author",
      "http://www.aktors.org/ontology/portal#full-name",
    ],
    frequency: 3,
    terminal: "LITERAL",
    samples: AUTHORS,
  },
  {
    path: "akt:has-date/akts:year-of",
    steps: [
      "http://www.aktors.org/ontology/portal#has-date",
      "http://www.aktors.org/ontology/support#year-of",
    ],
    frequency: 1,
    terminal: "LITERAL",
    samples: ["2011"],
  },
];

export function fullPath(steps: string[]): string {
  return steps.map((step) => `<${step}>`).join("/");
}

const KNOWN_PATHS = new Set([...SOURCE_PATHS, ...TARGET_PATHS].map((row) => fullPath(row.steps)));

export const sleep = (ms: number): Promise<void> => new Promise((resolve) => setTimeout(resolve, ms));

export async function until(check: () => boolean, timeoutMs = 3000): Promise<void> {
  const start = Date.now();
  while (!check()) {
    if (Date.now() - start > timeoutMs) throw new Error("condition not met in time");
    await sleep(5);
  }
}

interface FakeTask {
  id: string;
  sourceId: string;
  targetId: string;
  linkType: string;
  threshold: number;
  hasRule: boolean;
  rule: unknown;
  state: "IDLE" | "RUNNING" | "DONE" | "FAILED";
  running: boolean;
  script: ProgressRow[];
  scriptIndex: number;
  lastProgress: ProgressRow;
  verdicts: string[];
}

interface SourceRowData {
  id: string;
  label: string;
  format: string;
  tripleCount: number;
  entityCount: number;
  entityType: string | null;
}

interface Issue {
  nodeId: string;
  message: string;
}

type CallRecord = { method: string; path: string; body?: unknown };

const DEFAULT_SCRIPT: ProgressRow[] = [
  { state: "RUNNING", pairsEvaluated: 0, totalPairs: 1, linksFound: 0 },
  { state: "DONE", pairsEvaluated: 1, totalPairs: 1, linksFound: 1 },
];

export class FakeServer {
  sources: SourceRowData[] = [
    { id: "ds1", label: "bibliography", format: "turtle", tripleCount: 20, entityCount: 1, entityType: null },
    {
      id: "ds2",
      label: "dblp",
      format: "rdfxml",
      tripleCount: 24,
      entityCount: 1,
      entityType: "http://www.aktors.org/ontology/portal#Book-Section-Reference",
    },
  ];
  tasks = new Map<string, FakeTask>();
  calls: CallRecord[] = [];
  failCatalog = false;
  failPaths = false;
  nextRunScript: ProgressRow[] | null = null;
  ruleDelayMs = 0;
  onProgressRequest: (() => void) | null = null;
  private counter = 0;
  private sourceCounter = 2;

  constructor(options: { withTask?: boolean } = {}) {
    if (options.withTask ?? true) this.addTask("ds1", "ds2");
  }

  addTask(sourceId: string, targetId: string): FakeTask {
    this.counter += 1;
    const task: FakeTask = {
      id: `t${this.counter}`,
      sourceId,
      targetId,
      linkType: SAME_AS,
      threshold: 0,
      hasRule: false,
      rule: null,
      state: "IDLE",
      running: false,
      script: [],
      scriptIndex: 0,
      lastProgress: { state: "IDLE", pairsEvaluated: 0, totalPairs: 0, linksFound: 0 },
      verdicts: [],
    };
    this.tasks.set(task.id, task);
    return task;
  }

  /** Replace the global fetch with this server; returns a restore function. */
  install(): () => void {
    const original = globalThis.fetch;
    globalThis.fetch = ((input: RequestInfo | URL, init?: RequestInit) =>
      this.handle(String(input), init)) as typeof fetch;
    return () => {
      globalThis.fetch = original;
    };
  }

  callsTo(method: string, pattern: RegExp): CallRecord[] {
    return this.calls.filter((call) => call.method === method && pattern.test(call.path));
  }

  private async handle(url: string, init?: RequestInit): Promise<Response> {
    const method = (init?.method ?? "GET").toUpperCase();
    const [path, query = ""] = url.split("?");
    const params = new URLSearchParams(query);
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : init?.body;
    this.calls.push({ method, path, body });

    if (path === "/api/datasets" && method === "GET") {
      if (this.failCatalog) throw new TypeError("fetch failed");
      return json(200, this.catalogBody());
    }
    if (path === "/api/datasets" && method === "POST") {
      return this.registerDataset(body as FormData);
    }

    let match = path.match(/^\/api\/datasets\/([^/]+)\/paths$/);
    if (match && method === "GET") {
      if (this.failPaths) return json(500, { code: "INTERNAL", message: "profile unavailable" });
      if (match[1] === "ds1") return json(200, SOURCE_PATHS);
      if (match[1] === "ds2") return json(200, TARGET_PATHS);
      return json(404, { code: "UNKNOWN_DATASET", message: `no dataset ${match[1]}` });
    }

    if (path === "/api/tasks" && method === "POST") {
      const request = body as { sourceId: string; targetId: string };
      const task = this.addTask(request.sourceId, request.targetId);
      return json(201, taskRow(task));
    }

    match = path.match(/^\/api\/tasks\/([^/]+)$/);
    if (match && method === "GET") {
      const task = this.tasks.get(match[1]);
      if (!task) return json(404, { code: "UNKNOWN_TASK", message: `no task ${match[1]}` });
      return json(200, {
        ...taskRow(task),
        threshold: task.threshold,
        rule: task.rule,
        progress: task.lastProgress,
      });
    }

    match = path.match(/^\/api\/tasks\/([^/]+)\/rule$/);
    if (match && method === "PUT") {
      return this.putRule(match[1], body as Record<string, unknown>);
    }

    match = path.match(/^\/api\/tasks\/([^/]+)\/run$/);
    if (match && method === "POST") {
      return this.startRun(match[1]);
    }

    match = path.match(/^\/api\/tasks\/([^/]+)\/progress$/);
    if (match && method === "GET") {
      return this.progress(match[1]);
    }

    match = path.match(/^\/api\/tasks\/([^/]+)\/links$/);
    if (match && method === "GET") {
      return this.links(match[1], params);
    }

    match = path.match(/^\/api\/tasks\/([^/]+)\/links\/(\d+)\/verdict$/);
    if (match && method === "POST") {
      return this.verdict(match[1], Number(match[2]), body as { verdict: string });
    }

    match = path.match(/^\/api\/tasks\/([^/]+)\/export$/);
    if (match && method === "GET") {
      return this.exportLinks(match[1], params);
    }

    if (path === "/api/enrich" && method === "POST") {
      return json(200, {
        report: {
          mode: "LINKS_ONLY",
          added: [{ triple: NT_LINE, origin: "links.nt" }],
          skipped: [],
        },
        graph: "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n",
      });
    }

    return json(404, { code: "NOT_FOUND", message: `no route for ${method} ${path}` });
  }

  private catalogBody(): unknown {
    return {
      sources: [...this.sources],
      tasks: [...this.tasks.values()].map(taskRow),
    };
  }

  private registerDataset(form: FormData): Response {
    const label = String(form.get("label") ?? "");
    if (this.sources.some((source) => source.label === label)) {
      return json(409, { code: "DUPLICATE_LABEL", message: `label ${label} is taken` });
    }
    this.sourceCounter += 1;
    const row: SourceRowData = {
      id: `ds${this.sourceCounter}`,
      label,
      format: String(form.get("format") ?? "") || "turtle",
      tripleCount: 5,
      entityCount: 2,
      entityType: form.get("entityType") ? String(form.get("entityType")) : null,
    };
    this.sources.push(row);
    return json(201, row);
  }

  private putRule(taskId: string, body: Record<string, unknown>): Promise<Response> | Response {
    const task = this.tasks.get(taskId);
    if (!task) return json(404, { code: "UNKNOWN_TASK", message: `no task ${taskId}` });
    if (task.running) {
      return json(409, { code: "RUN_IN_PROGRESS", message: "the rule is locked while a run is active" });
    }

    const prefixes = (body.prefixes ?? {}) as Record<string, string>;
    for (const label of Object.keys(prefixes)) {
      if (!/^[A-Za-z][A-Za-z0-9_.-]*$/.test(label)) {
        return json(422, {
          code: "SPEC_ERROR",
          message: `invalid prefix label ${label}`,
          details: { location: "prefixes" },
        });
      }
    }

    const threshold = body.threshold;
    if (typeof threshold !== "number" || Number.isNaN(threshold) || threshold < 0 || threshold > 1) {
      return json(422, {
        code: "SPEC_ERROR",
        message: "threshold must be a number between 0 and 1",
        details: { location: "threshold" },
      });
    }

    const errors: Issue[] = [];
    const warnings: Issue[] = [];
    const structural = this.checkNode(body.rule, errors, warnings);
    if (structural) return structural;

    if (errors.length) {
      return json(422, {
        code: "INVALID_RULE",
        message: "the rule has validation errors",
        details: { errors, warnings },
      });
    }
    task.rule = body.rule;
    task.hasRule = true;
    task.linkType = typeof body.linkType === "string" ? body.linkType : task.linkType;
    task.threshold = threshold;
    const respond = () => json(200, { errors: [], warnings });
    if (this.ruleDelayMs > 0) {
      const delay = this.ruleDelayMs;
      this.ruleDelayMs = 0;
      return sleep(delay).then(respond);
    }
    return respond();
  }

  private checkNode(node: unknown, errors: Issue[], warnings: Issue[]): Response | null {
    if (typeof node !== "object" || node === null) {
      return json(422, {
        code: "SPEC_ERROR",
        message: "expected a rule node",
        details: { location: "rule" },
      });
    }
    const wrapper = node as Record<string, Record<string, unknown>>;
    if (wrapper.aggregate) {
      const agg = wrapper.aggregate;
      const children = (agg.children ?? []) as unknown[];
      const nodeId = String(agg.id ?? "");
      if (children.length === 0) {
        errors.push({ nodeId, message: "aggregation has no children" });
      }
      const weights = agg.weights as unknown[] | undefined;
      if (weights !== undefined) {
        if (agg.operator !== "AVERAGE") {
          errors.push({ nodeId, message: "weights are only valid on AVERAGE aggregations" });
        } else if (weights.length !== children.length) {
          errors.push({ nodeId, message: `${weights.length} weights for ${children.length} children` });
        }
      }
      for (const child of children) {
        const structural = this.checkNode(child, errors, warnings);
        if (structural) return structural;
      }
      return null;
    }
    if (wrapper.compare) {
      const compare = wrapper.compare;
      const nodeId = String(compare.id ?? "");
      for (const [side, key] of [
        ["source", "sourcePath"],
        ["target", "targetPath"],
      ] as const) {
        const path = compare[key];
        if (typeof path !== "string" || !path.trim()) {
          return json(422, {
            code: "SPEC_ERROR",
            message: "expected a property path",
            details: { location: `rule.compare.${key}` },
          });
        }
        if (!KNOWN_PATHS.has(path)) {
          warnings.push({
            nodeId,
            message: `${side} path ${path} was not found in the dataset (custom path)`,
          });
        }
      }
      return null;
    }
    return json(422, {
      code: "SPEC_ERROR",
      message: "rule nodes must be 'compare' or 'aggregate'",
      details: { location: "rule" },
    });
  }

  private startRun(taskId: string): Response {
    const task = this.tasks.get(taskId);
    if (!task) return json(404, { code: "UNKNOWN_TASK", message: `no task ${taskId}` });
    if (!task.hasRule) return json(412, { code: "NO_RULE", message: "store a rule before running" });
    if (task.running) return json(409, { code: "RUN_IN_PROGRESS", message: "a run is already active" });
    task.running = true;
    task.state = "RUNNING";
    task.script = this.nextRunScript ?? DEFAULT_SCRIPT;
    this.nextRunScript = null;
    task.scriptIndex = 0;
    task.verdicts = [];
    return json(202, { progressUrl: `/api/tasks/${taskId}/progress` });
  }

  private progress(taskId: string): Response {
    const task = this.tasks.get(taskId);
    if (!task) return json(404, { code: "UNKNOWN_TASK", message: `no task ${taskId}` });
    this.onProgressRequest?.();
    if (task.script.length > 0) {
      const row = task.script[Math.min(task.scriptIndex, task.script.length - 1)];
      task.scriptIndex += 1;
      task.lastProgress = row;
      if (row.state === "DONE") {
        task.state = "DONE";
        task.running = false;
        task.verdicts = Array.from({ length: row.linksFound }, () => "UNREVIEWED");
      } else if (row.state === "FAILED") {
        task.state = "FAILED";
        task.running = false;
      }
    }
    return json(200, task.lastProgress);
  }

  private scenarioRows(task: FakeTask): LinkRow[] {
    return task.verdicts.map((verdict, index) => scenarioLink(index, verdict));
  }

  private links(taskId: string, params: URLSearchParams): Response {
    const task = this.tasks.get(taskId);
    if (!task) return json(404, { code: "UNKNOWN_TASK", message: `no task ${taskId}` });
    if (task.state !== "DONE") return json(409, { code: "NO_RUN", message: "no completed run" });
    const offset = Math.max(0, Number(params.get("offset") ?? 0));
    const limit = Math.min(500, Number(params.get("limit") ?? 50));
    const rows = this.scenarioRows(task);
    return json(200, {
      total: rows.length,
      offset,
      links: rows.slice(offset, offset + limit),
    });
  }

  private verdict(taskId: string, index: number, body: { verdict: string }): Response {
    const task = this.tasks.get(taskId);
    if (!task) return json(404, { code: "UNKNOWN_TASK", message: `no task ${taskId}` });
    if (task.state !== "DONE") return json(409, { code: "NO_RUN", message: "no completed run" });
    if (!["UNREVIEWED", "ACCEPTED", "REJECTED"].includes(body.verdict)) {
      return json(422, { code: "BAD_VERDICT", message: `unknown verdict ${body.verdict}` });
    }
    if (index < 0 || index >= task.verdicts.length) {
      return json(404, { code: "UNKNOWN_LINK", message: `no link ${index}` });
    }
    task.verdicts[index] = body.verdict;
    return json(200, { index, source: PAPER, target: DBLP_RECORD, verdict: body.verdict });
  }

  private exportLinks(taskId: string, params: URLSearchParams): Response {
    const task = this.tasks.get(taskId);
    if (!task) return json(404, { code: "UNKNOWN_TASK", message: `no task ${taskId}` });
    if (task.state !== "DONE") return json(409, { code: "NO_RUN", message: "no completed run" });
    const wanted = (params.get("verdicts") ?? "ACCEPTED,UNREVIEWED")
      .split(",")
      .map((value) => value.trim())
      .filter(Boolean);
    const lines = task.verdicts
      .filter((verdict) => wanted.includes(verdict))
      .map(() => `${NT_LINE}\n`)
      .join("");
    return new Response(lines, {
      status: 200,
      headers: {
        "content-type": "application/n-triples; charset=utf-8",
        "content-disposition": 'attachment; filename="links.nt"',
      },
    });
  }
}

export function scenarioLink(index: number, verdict: string): LinkRow {
  return {
    index,
    source: PAPER,
    predicate: SAME_AS,
    target: DBLP_RECORD,
    confidence: TITLE_CONFIDENCE,
    verdict,
    comparisons: [
      {
        id: "title",
        sourceValues: [TITLE],
        targetValues: [`${TITLE}.`],
        accept: true,
        confidence: TITLE_CONFIDENCE,
      },
      { id: "author", sourceValues: AUTHORS, targetValues: AUTHORS, accept: true, confidence: 1 },
      { id: "date", sourceValues: ["2011"], targetValues: ["2011"], accept: true, confidence: 1 },
    ],
  };
}

/** Set an input's value the way a user would, firing the input event. */
export function setInput(input: HTMLInputElement | HTMLTextAreaElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

export function setSelect(select: HTMLSelectElement, value: string): void {
  select.value = value;
  select.dispatchEvent(new Event("change", { bubbles: true }));
}

export function openDetails(details: HTMLDetailsElement): void {
  details.open = true;
  details.dispatchEvent(new Event("toggle"));
}

/** Drive the editor DOM to build the three-comparison rule for the
 * bibliography/dblp pair: title and author by edit distance, date by
 * date equality. Assumes a freshly loaded task (root agg1, child c1). */
export function buildScenarioRule(editorRoot: HTMLElement): void {
  const addComparison = () =>
    editorRoot.querySelector<HTMLButtonElement>(".add-comparison")!.click();
  addComparison();
  addComparison();

  const fill = (nodeId: string, source: string[], target: string[], comparator?: string) => {
    const node = editorRoot.querySelector<HTMLElement>(`[data-node-id="${nodeId}"]`)!;
    setInput(node.querySelector<HTMLInputElement>('input[data-side="sourcePath"]')!, fullPath(source));
    setInput(node.querySelector<HTMLInputElement>('input[data-side="targetPath"]')!, fullPath(target));
    if (comparator) {
      setSelect(node.querySelector<HTMLSelectElement>("select.comparator-select")!, comparator);
    }
  };
  fill("c1", SOURCE_PATHS[0].steps, TARGET_PATHS[0].steps);
  fill("c2", SOURCE_PATHS[1].steps, TARGET_PATHS[1].steps);
  fill("c3", SOURCE_PATHS[2].steps, TARGET_PATHS[2].steps, "DATE_EQUALITY");
}

export const SCENARIO_RULE_PAYLOAD = {
  aggregate: {
    id: "agg1",
    operator: "MINIMUM",
    children: [
      {
        compare: {
          id: "c1",
          sourcePath: fullPath(SOURCE_PATHS[0].steps),
          targetPath: fullPath(TARGET_PATHS[0].steps),
          comparator: { kind: "LEVENSHTEIN", maxDistance: 3 },
        },
      },
      {
        compare: {
          id: "c2",
          sourcePath: fullPath(SOURCE_PATHS[1].steps),
          targetPath: fullPath(TARGET_PATHS[1].steps),
          comparator: { kind: "LEVENSHTEIN", maxDistance: 3 },
        },
      },
      {
        compare: {
          id: "c3",
          sourcePath: fullPath(SOURCE_PATHS[2].steps),
          targetPath: fullPath(TARGET_PATHS[2].steps),
          comparator: { kind: "DATE_EQUALITY" },
        },
      },
    ],
  },
};

function taskRow(task: FakeTask): Record<string, unknown> {
  return {
    id: task.id,
    sourceId: task.sourceId,
    targetId: task.targetId,
    linkType: task.linkType,
    hasRule: task.hasRule,
    state: task.state,
  };
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
