/** Enrichment panel: upload a graph, choose link injection or metadata
 * merging, point at a finished task or an uploaded link file, and review
 * the added/skipped report next to the enriched Turtle.
 */

import { ApiError, type Client, type EnrichResponse } from "./api.js";

export class EnrichPanel {
  private mode: HTMLSelectElement;
  private graphInput: HTMLInputElement;
  private taskSelect: HTMLSelectElement;
  private linksInput: HTMLInputElement;
  private targetsInput: HTMLInputElement;
  private policyArea: HTMLTextAreaElement;
  private status: HTMLElement;
  private report: HTMLElement;
  private preview: HTMLElement;

  constructor(private readonly container: HTMLElement, private readonly client: Client) {
    container.classList.add("enrich");
    container.textContent = "";

    const form = document.createElement("form");
    form.className = "enrich-form";

    this.mode = document.createElement("select");
    this.mode.className = "enrich-mode";
    for (const value of ["links", "merge"]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value === "links" ? "inject links" : "merge metadata";
      this.mode.appendChild(option);
    }
    form.appendChild(labelled("mode", this.mode));

    this.graphInput = fileInput("enrich-graph");
    form.appendChild(labelled("graph to enrich", this.graphInput));

    this.taskSelect = document.createElement("select");
    this.taskSelect.className = "enrich-task";
    form.appendChild(labelled("links from task", this.taskSelect));

    this.linksInput = fileInput("enrich-links");
    form.appendChild(labelled("or links file", this.linksInput));

    this.targetsInput = fileInput("enrich-targets");
    this.targetsInput.multiple = true;
    form.appendChild(labelled("target datasets (merge mode)", this.targetsInput));

    this.policyArea = document.createElement("textarea");
    this.policyArea.className = "enrich-policy";
    this.policyArea.placeholder = '{"excludeProperties": [...]}';
    form.appendChild(labelled("merge policy (JSON, optional)", this.policyArea));

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.className = "enrich-submit";
    submit.textContent = "enrich";
    form.appendChild(submit);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    container.appendChild(form);

    this.status = document.createElement("div");
    this.status.className = "enrich-status";
    container.appendChild(this.status);

    this.report = document.createElement("div");
    this.report.className = "enrich-report";
    container.appendChild(this.report);

    this.preview = document.createElement("pre");
    this.preview.className = "enrich-preview";
    container.appendChild(this.preview);
  }

  setTasks(taskIds: string[]): void {
    this.taskSelect.textContent = "";
    const none = document.createElement("option");
    none.value = "";
    none.textContent = "(none)";
    this.taskSelect.appendChild(none);
    for (const id of taskIds) {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = id;
      this.taskSelect.appendChild(option);
    }
  }

  private async submit(): Promise<void> {
    const graph = this.graphInput.files?.[0];
    if (!graph) {
      this.status.textContent = "pick a graph file first";
      return;
    }
    this.status.textContent = "enriching…";
    this.report.textContent = "";
    this.preview.textContent = "";
    try {
      const response = await this.client.enrich({
        graph,
        mode: this.mode.value as "links" | "merge",
        taskId: this.taskSelect.value || undefined,
        links: this.linksInput.files?.[0],
        targets: Array.from(this.targetsInput.files ?? []),
        policy: this.policyArea.value.trim() || undefined,
      });
      this.renderReport(response);
    } catch (error) {
      this.status.textContent =
        error instanceof ApiError ? `${error.code}: ${error.message}` : (error as Error).message;
    }
  }

  private renderReport(response: EnrichResponse): void {
    const { report } = response;
    this.status.textContent =
      `${report.mode}: ${report.added.length} triples added, ${report.skipped.length} skipped`;

    const added = document.createElement("div");
    added.className = "report-added";
    for (const row of report.added) {
      const line = document.createElement("div");
      line.className = "report-row";
      line.textContent = `+ ${row.triple} (from ${row.origin})`;
      added.appendChild(line);
    }
    const skipped = document.createElement("div");
    skipped.className = "report-skipped";
    for (const row of report.skipped) {
      const line = document.createElement("div");
      line.className = "report-row";
      line.textContent = `- ${row.triple} (${row.reason})`;
      skipped.appendChild(line);
    }
    this.report.textContent = "";
    this.report.append(added, skipped);
    this.preview.textContent = response.graph;
  }
}

function labelled(text: string, control: HTMLElement): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  wrap.append(text);
  wrap.appendChild(control);
  return wrap;
}

function fileInput(cls: string): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "file";
  input.className = cls;
  return input;
}
