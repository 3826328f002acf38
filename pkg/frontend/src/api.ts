/** Typed client for the lodlink HTTP API.
 *
 * Every method maps to one endpoint; non-2xx responses become ApiError with
 * the server's code/message/details envelope. Rule validation is the one
 * exception: an INVALID_RULE response is a normal editing outcome, so
 * putRule resolves with the issue lists instead of throwing.
 */

export interface SourceRow {
  id: string;
  label: string;
  format: string;
  tripleCount: number;
  entityCount: number;
  entityType: string | null;
}

export interface TaskRow {
  id: string;
  sourceId: string;
  targetId: string;
  linkType: string;
  hasRule: boolean;
  state: string;
}

export interface Catalog {
  sources: SourceRow[];
  tasks: TaskRow[];
}

export interface PathRow {
  path: string;
  steps: string[];
  frequency: number;
  terminal: string;
  samples: string[];
}

export interface LintRow {
  code: string;
  subject: string | null;
  message: string;
}

export interface SuggestionRow {
  sourcePath: string;
  sourceSteps: string[];
  targetPath: string;
  targetSteps: string[];
  score: number;
}

export interface Issue {
  nodeId: string;
  message: string;
}

export interface ValidationResult {
  errors: Issue[];
  warnings: Issue[];
}

export interface ProgressRow {
  state: string;
  pairsEvaluated: number;
  totalPairs: number;
  linksFound: number;
}

export interface TaskDetail extends TaskRow {
  threshold: number;
  rule: unknown | null;
  progress: ProgressRow;
}

export interface ComparisonRow {
  id: string;
  sourceValues: string[];
  targetValues: string[];
  accept: boolean;
  confidence: number;
}

export interface LinkRow {
  index: number;
  source: string;
  predicate: string;
  target: string;
  confidence: number;
  verdict: string;
  comparisons: ComparisonRow[];
}

export interface LinkPage {
  total: number;
  offset: number;
  links: LinkRow[];
}

export interface RuleBody {
  rule: unknown;
  prefixes?: Record<string, string>;
  linkType?: string;
  threshold?: number;
}

export interface EnrichAdded {
  triple: string;
  origin: string;
}

export interface EnrichSkipped {
  triple: string;
  reason: string;
}

export interface EnrichResponse {
  report: { mode: string; added: EnrichAdded[]; skipped: EnrichSkipped[] };
  graph: string;
}

export interface EnrichRequest {
  graph: File;
  mode: "links" | "merge";
  taskId?: string;
  links?: File;
  targets?: File[];
  policy?: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details?: Record<string, unknown>,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function toApiError(res: Response): Promise<ApiError> {
  let code = "HTTP_ERROR";
  let message = `request failed with status ${res.status}`;
  let details: Record<string, unknown> | undefined;
  try {
    const body = await res.json();
    if (body && typeof body.code === "string") code = body.code;
    if (body && typeof body.message === "string") message = body.message;
    if (body && typeof body.details === "object") details = body.details;
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(res.status, code, message, details);
}

export class Client {
  constructor(private readonly base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.url(path), init);
    if (!res.ok) throw await toApiError(res);
    return (await res.json()) as T;
  }

  private jsonInit(method: string, body: unknown): RequestInit {
    return {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    };
  }

  catalog(): Promise<Catalog> {
    return this.json("/api/datasets");
  }

  uploadDataset(
    file: File,
    label: string,
    opts: { format?: string; entityType?: string } = {},
  ): Promise<SourceRow> {
    const form = new FormData();
    form.append("file", file);
    form.append("label", label);
    if (opts.format) form.append("format", opts.format);
    if (opts.entityType) form.append("entityType", opts.entityType);
    return this.json("/api/datasets", { method: "POST", body: form });
  }

  paths(sourceId: string, maxDepth = 3): Promise<PathRow[]> {
    return this.json(`/api/datasets/${sourceId}/paths?maxDepth=${maxDepth}`);
  }

  lint(sourceId: string): Promise<LintRow[]> {
    return this.json(`/api/datasets/${sourceId}/lint`);
  }

  suggest(source: string, target: string, maxDepth = 2): Promise<SuggestionRow[]> {
    const query = new URLSearchParams({ source, target, maxDepth: String(maxDepth) });
    return this.json(`/api/suggest?${query}`);
  }

  createTask(sourceId: string, targetId: string, linkType?: string): Promise<TaskRow> {
    const body: Record<string, string> = { sourceId, targetId };
    if (linkType) body.linkType = linkType;
    return this.json("/api/tasks", this.jsonInit("POST", body));
  }

  taskDetail(taskId: string): Promise<TaskDetail> {
    return this.json(`/api/tasks/${taskId}`);
  }

  /** Validate and store a rule. INVALID_RULE responses resolve with the
   * issue lists; structural SPEC_ERROR and transport problems still throw. */
  async putRule(taskId: string, body: RuleBody): Promise<ValidationResult> {
    const res = await fetch(this.url(`/api/tasks/${taskId}/rule`), this.jsonInit("PUT", body));
    if (res.ok) return (await res.json()) as ValidationResult;
    const error = await toApiError(res);
    if (error.code === "INVALID_RULE" && error.details) {
      return {
        errors: (error.details.errors as Issue[]) ?? [],
        warnings: (error.details.warnings as Issue[]) ?? [],
      };
    }
    throw error;
  }

  run(taskId: string, blocking?: boolean): Promise<{ progressUrl: string }> {
    const body = blocking === undefined ? {} : { blocking };
    return this.json(`/api/tasks/${taskId}/run`, this.jsonInit("POST", body));
  }

  progress(taskId: string): Promise<ProgressRow> {
    return this.json(`/api/tasks/${taskId}/progress`);
  }

  links(taskId: string, offset = 0, limit = 50): Promise<LinkPage> {
    return this.json(`/api/tasks/${taskId}/links?offset=${offset}&limit=${limit}`);
  }

  setVerdict(taskId: string, index: number, verdict: string): Promise<unknown> {
    return this.json(
      `/api/tasks/${taskId}/links/${index}/verdict`,
      this.jsonInit("POST", { verdict }),
    );
  }

  async exportLinks(taskId: string, verdicts?: string): Promise<string> {
    const query = verdicts === undefined ? "" : `?verdicts=${encodeURIComponent(verdicts)}`;
    const res = await fetch(this.url(`/api/tasks/${taskId}/export${query}`));
    if (!res.ok) throw await toApiError(res);
    return res.text();
  }

  enrich(request: EnrichRequest): Promise<EnrichResponse> {
    const form = new FormData();
    form.append("graph", request.graph);
    form.append("mode", request.mode);
    if (request.taskId) form.append("taskId", request.taskId);
    if (request.links) form.append("links", request.links);
    for (const target of request.targets ?? []) form.append("targets", target);
    if (request.policy) form.append("policy", request.policy);
    return this.json("/api/enrich", { method: "POST", body: form });
  }
}
