/** Review panel: discovered links with expandable per-comparison detail,
 * accept/reject verdicts, and an export button. An empty result renders an
 * explicit "0 links found" message rather than a blank screen.
 */

import type { LinkPage, LinkRow } from "./api.js";

export interface ReviewHandlers {
  onVerdict(index: number, verdict: "ACCEPTED" | "REJECTED"): void;
  onExport(): void;
}

export function renderReview(container: HTMLElement, page: LinkPage, handlers: ReviewHandlers): void {
  container.classList.add("review");
  container.textContent = "";

  const header = document.createElement("div");
  header.className = "review-header";
  const count = document.createElement("span");
  count.className = "review-count";
  count.textContent = `${page.total} links found`;
  header.appendChild(count);

  const exportButton = document.createElement("button");
  exportButton.type = "button";
  exportButton.className = "export-button";
  exportButton.textContent = "export accepted";
  exportButton.addEventListener("click", () => handlers.onExport());
  header.appendChild(exportButton);
  container.appendChild(header);

  if (page.total === 0) {
    const empty = document.createElement("div");
    empty.className = "review-empty";
    empty.textContent = "0 links found. Loosen the rule or lower the threshold and run again.";
    container.appendChild(empty);
    return;
  }

  const list = document.createElement("div");
  list.className = "review-rows";
  for (const link of page.links) list.appendChild(renderRow(link, handlers));
  container.appendChild(list);
}

function renderRow(link: LinkRow, handlers: ReviewHandlers): HTMLElement {
  const row = document.createElement("div");
  row.className = "review-row";
  row.dataset.index = String(link.index);

  const summary = document.createElement("div");
  summary.className = "row-summary";

  const expand = document.createElement("button");
  expand.type = "button";
  expand.className = "row-expand";
  expand.textContent = "details";

  const pair = document.createElement("span");
  pair.className = "row-pair";
  pair.textContent = `${link.source} → ${link.target}`;

  const confidence = document.createElement("span");
  confidence.className = "row-confidence";
  confidence.textContent = link.confidence.toFixed(4);

  const verdict = document.createElement("span");
  verdict.className = `verdict verdict-${link.verdict.toLowerCase()}`;
  verdict.textContent = link.verdict;

  const accept = document.createElement("button");
  accept.type = "button";
  accept.className = "accept-button";
  accept.textContent = "accept";
  accept.addEventListener("click", () => handlers.onVerdict(link.index, "ACCEPTED"));

  const reject = document.createElement("button");
  reject.type = "button";
  reject.className = "reject-button";
  reject.textContent = "reject";
  reject.addEventListener("click", () => handlers.onVerdict(link.index, "REJECTED"));

  summary.append(expand, pair, confidence, verdict, accept, reject);
  row.appendChild(summary);

  const detail = document.createElement("div");
  detail.className = "row-detail";
  detail.hidden = true;
  for (const comparison of link.comparisons) {
    const block = document.createElement("div");
    block.className = "comparison";
    block.dataset.comparisonId = comparison.id;

    const title = document.createElement("div");
    title.className = "comparison-title";
    title.textContent =
      `${comparison.id}: ${comparison.accept ? "matched" : "no match"}` +
      ` (confidence ${comparison.confidence.toFixed(4)})`;
    block.appendChild(title);

    const sides = document.createElement("div");
    sides.className = "comparison-sides";
    const sourceSide = document.createElement("div");
    sourceSide.className = "side side-source";
    sourceSide.textContent = comparison.sourceValues.join(" | ");
    const targetSide = document.createElement("div");
    targetSide.className = "side side-target";
    targetSide.textContent = comparison.targetValues.join(" | ");
    sides.append(sourceSide, targetSide);
    block.appendChild(sides);
    detail.appendChild(block);
  }
  row.appendChild(detail);

  expand.addEventListener("click", () => {
    detail.hidden = !detail.hidden;
  });
  return row;
}
