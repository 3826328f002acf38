/** Composition root: wires the dataset tree, rule editor, run controller,
 * review list, and enrichment panel against one API client. The page holds
 * no truth of its own; every view is rebuilt from server responses, so a
 * reload reproduces exactly what the server knows.
 */

import { ApiError, type Catalog, type Client, type TaskDetail } from "./api.js";
import { RuleEditor, type EditorState } from "./editor.js";
import { EnrichPanel } from "./enrich.js";
import { RunController } from "./progress.js";
import { renderReview } from "./review.js";
import { mountToasts, renderBanner, showToast } from "./toast.js";
import { renderTree } from "./tree.js";

export interface AppOptions {
  validateDelayMs?: number;
  pollIntervalMs?: number;
}

export interface App {
  refresh(): Promise<void>;
  selectTask(taskId: string): Promise<void>;
  readonly editor: RuleEditor;
  readonly runs: RunController;
  readonly lastExport: string | null;
}

export function createApp(root: HTMLElement, client: Client, options: AppOptions = {}): App {
  root.classList.add("app-shell");
  root.textContent = "";
  mountToasts(root);

  const bannerHost = document.createElement("div");
  bannerHost.className = "banner-host";
  root.appendChild(bannerHost);

  const layout = document.createElement("div");
  layout.className = "layout";
  root.appendChild(layout);

  const sidebar = document.createElement("aside");
  sidebar.className = "sidebar";
  layout.appendChild(sidebar);

  const workspace = document.createElement("main");
  workspace.className = "workspace";
  layout.appendChild(workspace);

  const uploadForm = buildUploadForm();
  sidebar.appendChild(uploadForm.element);

  const taskForm = buildTaskForm();
  sidebar.appendChild(taskForm.element);

  const treeHost = document.createElement("div");
  treeHost.className = "tree-host";
  sidebar.appendChild(treeHost);

  const editorHost = section(workspace, "editor-host");
  const runHost = section(workspace, "run-host");
  const reviewHost = section(workspace, "review-host");
  const enrichHost = section(workspace, "enrich-host");

  const runButton = document.createElement("button");
  runButton.type = "button";
  runButton.className = "run-button";
  runButton.textContent = "run";
  runButton.disabled = true;
  runHost.appendChild(runButton);

  const runPanelHost = document.createElement("div");
  runHost.appendChild(runPanelHost);

  let editorState: EditorState | null = null;
  const editor = new RuleEditor(
    editorHost,
    client,
    (state) => {
      editorState = state;
      runButton.disabled = !state.runnable;
    },
    options.validateDelayMs,
  );

  const runs = new RunController(
    runPanelHost,
    client,
    {
      onDone: () => {
        const taskId = editor.currentTask;
        if (taskId) void showLinks(taskId);
        void refresh();
      },
      onFailed: () => showToast("run failed", "error"),
      onConflict: (message) => showToast(message, "error"),
      onError: (message) => showToast(message, "error"),
    },
    options.pollIntervalMs,
  );

  const enrichPanel = new EnrichPanel(enrichHost, client);

  const app = {
    editor,
    runs,
    lastExport: null as string | null,
    refresh,
    selectTask,
  };

  runButton.addEventListener("click", () => {
    void (async () => {
      await editor.flush();
      const taskId = editor.currentTask;
      if (!taskId || !editorState?.runnable) return;
      reviewHost.textContent = "";
      await runs.start(taskId);
    })();
  });

  uploadForm.submit.addEventListener("click", (event) => {
    event.preventDefault();
    void (async () => {
      const file = uploadForm.file.files?.[0];
      const label = uploadForm.label.value.trim();
      if (!file || !label) {
        showToast("pick a file and give it a label", "error");
        return;
      }
      try {
        const row = await client.uploadDataset(file, label, {
          format: uploadForm.format.value || undefined,
          entityType: uploadForm.entityType.value.trim() || undefined,
        });
        showToast(`registered ${row.label}: ${row.tripleCount} triples`, "info");
        uploadForm.label.value = "";
        await refresh();
      } catch (error) {
        showToast(describe(error), "error");
      }
    })();
  });

  taskForm.create.addEventListener("click", (event) => {
    event.preventDefault();
    void (async () => {
      try {
        const row = await client.createTask(taskForm.source.value, taskForm.target.value);
        await refresh();
        await selectTask(row.id);
      } catch (error) {
        showToast(describe(error), "error");
      }
    })();
  });

  async function refresh(): Promise<void> {
    let catalog: Catalog;
    try {
      catalog = await client.catalog();
    } catch (error) {
      renderBanner(bannerHost, `could not reach the server: ${describe(error)}`);
      return;
    }
    renderBanner(bannerHost, null);
    renderTree(treeHost, catalog, {
      loadPaths: (sourceId) => client.paths(sourceId, 3),
      onPathPick: (path) => {
        if (!editor.insertPath(path)) {
          showToast("open a task and focus a path field to insert", "info");
        }
      },
      onSelectTask: (taskId) => void selectTask(taskId),
    });
    fillSelect(taskForm.source, catalog.sources.map((s) => s.id));
    fillSelect(taskForm.target, catalog.sources.map((s) => s.id));
    enrichPanel.setTasks(catalog.tasks.map((t) => t.id));
  }

  async function selectTask(taskId: string): Promise<void> {
    runs.cancel();
    let detail: TaskDetail;
    try {
      detail = await client.taskDetail(taskId);
    } catch (error) {
      showToast(describe(error), "error");
      return;
    }
    editor.load(detail);
    reviewHost.textContent = "";
    if (detail.progress.state === "DONE") {
      await showLinks(taskId);
    }
  }

  async function showLinks(taskId: string): Promise<void> {
    try {
      const page = await client.links(taskId, 0, 100);
      renderReview(reviewHost, page, {
        onVerdict: (index, verdict) => {
          void (async () => {
            try {
              await client.setVerdict(taskId, index, verdict);
              await showLinks(taskId);
            } catch (error) {
              showToast(describe(error), "error");
            }
          })();
        },
        onExport: () => {
          void (async () => {
            try {
              const text = await client.exportLinks(taskId);
              app.lastExport = text;
              downloadText("links.nt", text);
              showToast(`export ready: ${text.length} bytes`, "info");
            } catch (error) {
              showToast(describe(error), "error");
            }
          })();
        },
      });
    } catch (error) {
      showToast(describe(error), "error");
    }
  }

  return app;
}

function section(parent: HTMLElement, cls: string): HTMLElement {
  const el = document.createElement("section");
  el.className = cls;
  parent.appendChild(el);
  return el;
}

function fillSelect(select: HTMLSelectElement, values: string[]): void {
  const previous = select.value;
  select.textContent = "";
  for (const value of values) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    select.appendChild(option);
  }
  if (values.includes(previous)) select.value = previous;
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return (error as Error).message;
}

function downloadText(filename: string, text: string): void {
  if (typeof URL.createObjectURL !== "function") return;
  const url = URL.createObjectURL(new Blob([text], { type: "application/n-triples" }));
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

interface UploadForm {
  element: HTMLElement;
  file: HTMLInputElement;
  label: HTMLInputElement;
  entityType: HTMLInputElement;
  format: HTMLSelectElement;
  submit: HTMLButtonElement;
}

function buildUploadForm(): UploadForm {
  const element = document.createElement("form");
  element.className = "upload-form";

  const heading = document.createElement("h2");
  heading.textContent = "Register a dataset";
  element.appendChild(heading);

  const file = document.createElement("input");
  file.type = "file";
  file.className = "upload-file";
  element.appendChild(wrap("file", file));

  const label = document.createElement("input");
  label.className = "upload-label";
  label.placeholder = "label";
  element.appendChild(wrap("label", label));

  const entityType = document.createElement("input");
  entityType.className = "upload-entity-type";
  entityType.placeholder = "optional type IRI";
  element.appendChild(wrap("entity type", entityType));

  const format = document.createElement("select");
  format.className = "upload-format";
  for (const [value, text] of [
    ["", "detect format"],
    ["ntriples", "N-Triples"],
    ["turtle", "Turtle"],
    ["rdfxml", "RDF/XML"],
  ]) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = text;
    format.appendChild(option);
  }
  element.appendChild(wrap("format", format));

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.className = "upload-submit";
  submit.textContent = "upload";
  element.appendChild(submit);

  return { element, file, label, entityType, format, submit };
}

interface TaskForm {
  element: HTMLElement;
  source: HTMLSelectElement;
  target: HTMLSelectElement;
  create: HTMLButtonElement;
}

function buildTaskForm(): TaskForm {
  const element = document.createElement("form");
  element.className = "task-form";

  const heading = document.createElement("h2");
  heading.textContent = "New linkage task";
  element.appendChild(heading);

  const source = document.createElement("select");
  source.className = "task-source";
  element.appendChild(wrap("source", source));

  const target = document.createElement("select");
  target.className = "task-target";
  element.appendChild(wrap("target", target));

  const create = document.createElement("button");
  create.type = "submit";
  create.className = "task-create";
  create.textContent = "create task";
  element.appendChild(create);

  return { element, source, target, create };
}

function wrap(text: string, control: HTMLElement): HTMLElement {
  const label = document.createElement("label");
  label.className = "field";
  label.append(text);
  label.appendChild(control);
  return label;
}
