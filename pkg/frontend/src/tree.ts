/** Catalog tree: datasets and tasks with expandable per-source path lists. */

import type { Catalog, PathRow, SourceRow, TaskRow } from "./api.js";

export interface TreeHandlers {
  loadPaths(sourceId: string): Promise<PathRow[]>;
  onPathPick(path: string): void;
  onSelectTask(taskId: string): void;
}

function sourceNode(source: SourceRow, handlers: TreeHandlers): HTMLElement {
  const details = document.createElement("details");
  details.className = "tree-node tree-source";
  details.dataset.id = source.id;

  const summary = document.createElement("summary");
  const icon = document.createElement("span");
  icon.className = "icon icon-source";
  icon.textContent = "▤";
  summary.appendChild(icon);
  const label = document.createElement("span");
  label.className = "node-label";
  label.textContent = `${source.label} (${source.tripleCount} triples)`;
  summary.appendChild(label);
  details.appendChild(summary);

  const body = document.createElement("div");
  body.className = "tree-source-body";
  if (source.entityType) {
    const type = document.createElement("div");
    type.className = "entity-type";
    type.textContent = `entities: ${source.entityType}`;
    body.appendChild(type);
  }
  const pathList = document.createElement("div");
  pathList.className = "path-list";
  body.appendChild(pathList);
  details.appendChild(body);

  let loaded = false;
  details.addEventListener("toggle", () => {
    if (!details.open || loaded) return;
    loaded = true;
    pathList.textContent = "loading paths…";
    handlers.loadPaths(source.id).then(
      (rows) => {
        pathList.textContent = "";
        for (const row of rows) {
          const button = document.createElement("button");
          button.type = "button";
          button.className = "path";
          button.textContent = `${row.path} · ${row.frequency} · ${row.terminal}`;
          button.title = row.samples.join(" | ");
          // Insert the unambiguous full-IRI form so the rule does not
          // depend on which prefixes the task declares.
          const full = row.steps.map((step) => `<${step}>`).join("/");
          button.addEventListener("click", () => handlers.onPathPick(full));
          pathList.appendChild(button);
        }
      },
      (error: unknown) => {
        loaded = false;
        pathList.textContent = `could not load paths: ${(error as Error).message}`;
      },
    );
  });
  return details;
}

function taskNode(task: TaskRow, handlers: TreeHandlers): HTMLElement {
  const el = document.createElement("div");
  el.className = "tree-node tree-task";
  el.dataset.id = task.id;
  const icon = document.createElement("span");
  icon.className = "icon icon-task";
  icon.textContent = "⛓";
  el.appendChild(icon);
  const button = document.createElement("button");
  button.type = "button";
  button.className = "task-open";
  button.textContent = `${task.id}: ${task.sourceId} → ${task.targetId} [${task.state}]`;
  button.addEventListener("click", () => handlers.onSelectTask(task.id));
  el.appendChild(button);
  return el;
}

export function renderTree(container: HTMLElement, catalog: Catalog, handlers: TreeHandlers): void {
  container.textContent = "";
  if (!catalog.sources.length && !catalog.tasks.length) {
    const empty = document.createElement("div");
    empty.className = "empty-state";
    empty.textContent = "No datasets yet. Upload an RDF file to get started.";
    container.appendChild(empty);
    return;
  }
  for (const source of catalog.sources) container.appendChild(sourceNode(source, handlers));
  for (const task of catalog.tasks) container.appendChild(taskNode(task, handlers));
}
