/** Rule editor: a vertical node tree whose every edit debounce-validates
 * against the server. Validation results render as a badge plus per-node
 * messages; structural spec errors land in a banner and never block
 * further editing. At most one validation request is in flight; edits made
 * meanwhile queue exactly one follow-up, so the latest draft always wins.
 */

import { ApiError, type Client, type Issue, type TaskDetail, type ValidationResult } from "./api.js";
import {
  type AggregateDraft,
  type CompareDraft,
  type RuleNodeDraft,
  TRANSFORMATIONS,
  findNode,
  fromPayload,
  issuesByNode,
  newAggregate,
  newComparison,
  nextId,
  removeNode,
  toPayload,
} from "./rule.js";

export interface EditorState {
  taskId: string | null;
  validated: boolean;
  errors: Issue[];
  warnings: Issue[];
  structural: string | null;
  runnable: boolean;
}

const EMPTY: ValidationResult = { errors: [], warnings: [] };

export class RuleEditor {
  private taskId: string | null = null;
  private draft: RuleNodeDraft | null = null;
  private linkType = "owl:sameAs";
  private threshold = "0";
  private prefixesText = "{}";
  private hasStoredRule = false;

  private result: ValidationResult | null = null;
  private structural: string | null = null;

  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private queued = false;
  private seq = 0;

  private focused: { nodeId: string; side: "sourcePath" | "targetPath" } | null = null;
  private issueHosts = new Map<string, HTMLElement>();

  private badge!: HTMLElement;
  private banner!: HTMLElement;
  private looseIssues!: HTMLElement;
  private treeHost!: HTMLElement;
  private headerHost!: HTMLElement;

  constructor(
    private readonly container: HTMLElement,
    private readonly client: Client,
    private readonly onState: (state: EditorState) => void,
    private readonly validateDelayMs = 300,
  ) {
    this.mount();
  }

  private mount(): void {
    this.container.classList.add("editor");
    this.container.textContent = "";

    this.banner = document.createElement("div");
    this.banner.className = "editor-banner";
    this.banner.hidden = true;
    this.container.appendChild(this.banner);

    this.headerHost = document.createElement("div");
    this.headerHost.className = "editor-header";
    this.container.appendChild(this.headerHost);

    this.treeHost = document.createElement("div");
    this.treeHost.className = "rule-tree";
    this.container.appendChild(this.treeHost);

    this.looseIssues = document.createElement("div");
    this.looseIssues.className = "editor-issues";
    this.container.appendChild(this.looseIssues);

    this.renderHeader();
    this.renderPlaceholder();
  }

  get currentTask(): string | null {
    return this.taskId;
  }

  load(detail: TaskDetail): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.seq += 1; // drop any in-flight validation of the previous task
    this.queued = false;
    this.taskId = detail.id;
    this.linkType = detail.linkType;
    this.threshold = String(detail.threshold);
    this.hasStoredRule = detail.hasRule;
    this.draft = detail.rule ? fromPayload(detail.rule) : this.defaultDraft();
    this.result = null;
    this.structural = null;
    this.focused = null;
    this.renderHeader();
    this.renderTree();
    this.applyIssues();
    this.emit();
  }

  private defaultDraft(): RuleNodeDraft {
    const root = newAggregate("agg1");
    root.children.push(newComparison("c1"));
    return root;
  }

  /** Insert a picked path into the focused path input. False when there is
   * no task open or no path input has had focus yet. */
  insertPath(text: string): boolean {
    if (!this.taskId || !this.draft || !this.focused) return false;
    const node = findNode(this.draft, this.focused.nodeId);
    if (!node || node.kind !== "compare") return false;
    node[this.focused.side] = text;
    const input = this.treeHost.querySelector<HTMLInputElement>(
      `[data-node-id="${this.focused.nodeId}"] input[data-side="${this.focused.side}"]`,
    );
    if (input) input.value = text;
    this.scheduleValidate();
    return true;
  }

  /** Run any pending validation now and wait for the response. */
  async flush(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
      await this.validateNow();
    }
    while (this.inFlight || this.queued) {
      await new Promise((resolve) => setTimeout(resolve, 1));
    }
  }

  private emit(): void {
    const errors = this.result?.errors ?? [];
    const warnings = this.result?.warnings ?? [];
    const validated = this.result !== null && this.structural === null;
    const runnable = validated ? errors.length === 0 : this.structural === null && this.hasStoredRule;
    this.onState({ taskId: this.taskId, validated, errors, warnings, structural: this.structural, runnable });
  }

  private scheduleValidate(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.validateNow();
    }, this.validateDelayMs);
  }

  private async validateNow(): Promise<void> {
    if (!this.taskId || !this.draft) return;
    if (this.inFlight) {
      this.queued = true;
      return;
    }

    let prefixes: Record<string, string>;
    try {
      const parsed = JSON.parse(this.prefixesText || "{}");
      if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
        throw new Error("not an object");
      }
      prefixes = parsed;
    } catch {
      this.structural = "prefixes must be a JSON object of label to namespace";
      this.result = null;
      this.applyIssues();
      this.emit();
      return;
    }

    const body = {
      rule: toPayload(this.draft),
      prefixes,
      linkType: this.linkType || undefined,
      threshold: Number(this.threshold),
    };
    const mySeq = ++this.seq;
    this.inFlight = true;
    try {
      const result = await this.client.putRule(this.taskId, body);
      if (mySeq !== this.seq) return;
      this.structural = null;
      this.result = result;
      if (result.errors.length === 0) this.hasStoredRule = true;
    } catch (error) {
      if (mySeq !== this.seq) return;
      if (error instanceof ApiError) {
        const location = error.details?.location;
        this.structural = location ? `${error.message} (at ${location})` : error.message;
        this.result = null;
      } else {
        this.structural = `validation request failed: ${(error as Error).message}`;
        this.result = null;
      }
    } finally {
      this.inFlight = false;
    }
    this.applyIssues();
    this.emit();
    if (this.queued) {
      this.queued = false;
      void this.validateNow();
    }
  }

  private applyIssues(): void {
    const result = this.result ?? EMPTY;
    this.banner.hidden = this.structural === null;
    this.banner.textContent = this.structural ?? "";

    if (this.structural !== null) {
      this.setBadge("red", "invalid");
    } else if (this.result === null) {
      this.setBadge("idle", "unvalidated");
    } else if (result.errors.length) {
      this.setBadge("red", "invalid");
    } else if (result.warnings.length) {
      this.setBadge("yellow", "warnings");
    } else {
      this.setBadge("green", "valid");
    }

    for (const host of this.issueHosts.values()) host.textContent = "";
    this.looseIssues.textContent = "";
    const render = (byNode: Map<string, string[]>, cls: string) => {
      for (const [nodeId, messages] of byNode) {
        const host = this.issueHosts.get(nodeId);
        for (const message of messages) {
          const el = document.createElement("div");
          el.className = `issue ${cls}`;
          el.textContent = message;
          (host ?? this.looseIssues).appendChild(el);
        }
      }
    };
    render(issuesByNode(result.errors), "error");
    render(issuesByNode(result.warnings), "warning");
  }

  private setBadge(kind: string, text: string): void {
    this.badge.className = `badge badge-${kind}`;
    this.badge.textContent = text;
  }

  private renderHeader(): void {
    this.headerHost.textContent = "";

    this.badge = document.createElement("span");
    this.setBadge("idle", "unvalidated");
    this.headerHost.appendChild(this.badge);

    const linkType = this.textInput("link type", this.linkType, (value) => {
      this.linkType = value;
    });
    linkType.querySelector("input")!.classList.add("link-type-input");
    this.headerHost.appendChild(linkType);

    const threshold = this.textInput("threshold", this.threshold, (value) => {
      this.threshold = value;
    });
    threshold.querySelector("input")!.classList.add("threshold-input");
    this.headerHost.appendChild(threshold);

    const prefixes = document.createElement("label");
    prefixes.className = "field";
    prefixes.append("prefixes (JSON)");
    const area = document.createElement("textarea");
    area.className = "prefixes-input";
    area.value = this.prefixesText;
    area.addEventListener("input", () => {
      this.prefixesText = area.value;
      this.scheduleValidate();
    });
    prefixes.appendChild(area);
    this.headerHost.appendChild(prefixes);
  }

  private textInput(label: string, value: string, apply: (value: string) => void): HTMLElement {
    const wrap = document.createElement("label");
    wrap.className = "field";
    wrap.append(label);
    const input = document.createElement("input");
    input.value = value;
    input.addEventListener("input", () => {
      apply(input.value);
      this.scheduleValidate();
    });
    wrap.appendChild(input);
    return wrap;
  }

  private renderPlaceholder(): void {
    this.treeHost.textContent = "";
    const hint = document.createElement("div");
    hint.className = "editor-empty";
    hint.textContent = "Open a task to edit its rule.";
    this.treeHost.appendChild(hint);
  }

  private renderTree(): void {
    this.issueHosts.clear();
    this.treeHost.textContent = "";
    if (!this.draft) {
      this.renderPlaceholder();
      return;
    }
    this.treeHost.appendChild(this.renderNode(this.draft, true));
  }

  private structureChanged(): void {
    this.renderTree();
    this.applyIssues();
    this.scheduleValidate();
  }

  private renderNode(node: RuleNodeDraft, isRoot: boolean): HTMLElement {
    return node.kind === "compare"
      ? this.renderCompare(node, isRoot)
      : this.renderAggregate(node, isRoot);
  }

  private nodeShell(node: RuleNodeDraft, isRoot: boolean, cls: string): {
    shell: HTMLElement;
    header: HTMLElement;
  } {
    const shell = document.createElement("div");
    shell.className = `rule-node ${cls}`;
    shell.dataset.nodeId = node.id;

    const header = document.createElement("div");
    header.className = "node-header";
    const idTag = document.createElement("span");
    idTag.className = "node-id";
    idTag.textContent = node.id;
    header.appendChild(idTag);
    shell.appendChild(header);

    if (!isRoot) {
      const remove = document.createElement("button");
      remove.type = "button";
      remove.className = "node-remove";
      remove.textContent = "remove";
      remove.addEventListener("click", () => {
        if (this.draft && removeNode(this.draft, node.id)) this.structureChanged();
      });
      header.appendChild(remove);
    }
    return { shell, header };
  }

  private renderCompare(node: CompareDraft, isRoot: boolean): HTMLElement {
    const { shell } = this.nodeShell(node, isRoot, "node-compare");

    for (const side of ["sourcePath", "targetPath"] as const) {
      const field = document.createElement("label");
      field.className = "field";
      field.append(side === "sourcePath" ? "source path" : "target path");
      const input = document.createElement("input");
      input.className = "path-input";
      input.dataset.side = side;
      input.placeholder = "pick from the tree or type a custom path";
      input.value = node[side];
      input.addEventListener("focus", () => {
        this.focused = { nodeId: node.id, side };
      });
      input.addEventListener("input", () => {
        node[side] = input.value;
        this.scheduleValidate();
      });
      field.appendChild(input);
      shell.appendChild(field);
    }

    const row = document.createElement("div");
    row.className = "comparator-row";
    const select = document.createElement("select");
    select.className = "comparator-select";
    for (const kind of ["EQUALITY", "LEVENSHTEIN", "DATE_EQUALITY"]) {
      const option = document.createElement("option");
      option.value = kind;
      option.textContent = kind;
      select.appendChild(option);
    }
    select.value = node.comparator;
    const distance = document.createElement("input");
    distance.type = "number";
    distance.className = "max-distance-input";
    distance.min = "0";
    distance.value = node.maxDistance === null ? "" : String(node.maxDistance);
    distance.hidden = node.comparator !== "LEVENSHTEIN";
    select.addEventListener("change", () => {
      node.comparator = select.value as CompareDraft["comparator"];
      distance.hidden = node.comparator !== "LEVENSHTEIN";
      this.scheduleValidate();
    });
    distance.addEventListener("input", () => {
      node.maxDistance = distance.value === "" ? null : Number(distance.value);
      this.scheduleValidate();
    });
    row.appendChild(select);
    row.appendChild(distance);
    shell.appendChild(row);

    const transforms = document.createElement("div");
    transforms.className = "transformations";
    for (const name of TRANSFORMATIONS) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = name;
      box.checked = node.transformations.includes(name);
      box.addEventListener("change", () => {
        node.transformations = box.checked
          ? [...node.transformations, name]
          : node.transformations.filter((t) => t !== name);
        this.scheduleValidate();
      });
      label.appendChild(box);
      label.append(name);
      transforms.appendChild(label);
    }
    shell.appendChild(transforms);

    shell.appendChild(this.issueHost(node.id));
    return shell;
  }

  private renderAggregate(node: AggregateDraft, isRoot: boolean): HTMLElement {
    const { shell, header } = this.nodeShell(node, isRoot, "node-aggregate");

    const operator = document.createElement("select");
    operator.className = "operator-select";
    for (const op of ["MINIMUM", "MAXIMUM", "AVERAGE"]) {
      const option = document.createElement("option");
      option.value = op;
      option.textContent = op;
      operator.appendChild(option);
    }
    operator.value = node.operator;
    operator.addEventListener("change", () => {
      node.operator = operator.value as AggregateDraft["operator"];
      this.scheduleValidate();
    });
    header.appendChild(operator);

    const weights = document.createElement("input");
    weights.className = "weights-input";
    weights.placeholder = "weights, e.g. 2, 1";
    weights.value = node.weightsText;
    weights.addEventListener("input", () => {
      node.weightsText = weights.value;
      this.scheduleValidate();
    });
    header.appendChild(weights);

    const addCompare = document.createElement("button");
    addCompare.type = "button";
    addCompare.className = "add-comparison";
    addCompare.textContent = "+ comparison";
    addCompare.addEventListener("click", () => {
      node.children.push(newComparison(nextId(this.draft, "c")));
      this.structureChanged();
    });
    header.appendChild(addCompare);

    const addAggregate = document.createElement("button");
    addAggregate.type = "button";
    addAggregate.className = "add-aggregation";
    addAggregate.textContent = "+ aggregation";
    addAggregate.addEventListener("click", () => {
      node.children.push(newAggregate(nextId(this.draft, "agg")));
      this.structureChanged();
    });
    header.appendChild(addAggregate);

    shell.appendChild(this.issueHost(node.id));

    const children = document.createElement("div");
    children.className = "node-children";
    for (const child of node.children) children.appendChild(this.renderNode(child, false));
    shell.appendChild(children);
    return shell;
  }

  private issueHost(nodeId: string): HTMLElement {
    const host = document.createElement("div");
    host.className = "node-issues";
    this.issueHosts.set(nodeId, host);
    return host;
  }
}
