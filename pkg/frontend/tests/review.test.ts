import { beforeEach, describe, expect, it, vi } from "vitest";

import type { LinkPage } from "../src/api.js";
import { renderReview, type ReviewHandlers } from "../src/review.js";
import { DBLP_RECORD, PAPER, TITLE, scenarioLink } from "./helpers.js";

let container: HTMLElement;
let handlers: { [K in keyof ReviewHandlers]: ReturnType<typeof vi.fn> };

const onePage: LinkPage = { total: 1, offset: 0, links: [scenarioLink(0, "UNREVIEWED")] };

beforeEach(() => {
  document.body.innerHTML = "";
  container = document.createElement("div");
  document.body.appendChild(container);
  handlers = { onVerdict: vi.fn(), onExport: vi.fn() };
});

describe("link review", () => {
  it("renders one row per link with confidence and verdict", () => {
    renderReview(container, onePage, handlers);
    expect(container.querySelector(".review-count")?.textContent).toBe("1 links found");
    const rows = container.querySelectorAll(".review-row");
    expect(rows).toHaveLength(1);
    expect(rows[0].querySelector(".row-pair")?.textContent).toBe(`${PAPER} → ${DBLP_RECORD}`);
    expect(rows[0].querySelector(".row-confidence")?.textContent).toBe("0.9778");
    expect(rows[0].querySelector(".verdict")?.textContent).toBe("UNREVIEWED");
  });

  it("expands into a per-comparison breakdown with both value sides", () => {
    renderReview(container, onePage, handlers);
    const detail = container.querySelector<HTMLElement>(".row-detail")!;
    expect(detail.hidden).toBe(true);

    container.querySelector<HTMLButtonElement>(".row-expand")!.click();
    expect(detail.hidden).toBe(false);
    expect(detail.querySelectorAll(".comparison")).toHaveLength(3);

    const title = detail.querySelector('[data-comparison-id="title"]')!;
    const source = title.querySelector(".side-source")!.textContent!;
    const target = title.querySelector(".side-target")!.textContent!;
    expect(source).toBe(TITLE);
    expect(target).toBe(`${TITLE}.`);
    expect(target).toBe(`${source}.`);

    container.querySelector<HTMLButtonElement>(".row-expand")!.click();
    expect(detail.hidden).toBe(true);
  });

  it("shows an explicit zero state instead of a blank screen", () => {
    renderReview(container, { total: 0, offset: 0, links: [] }, handlers);
    expect(container.querySelector(".review-empty")?.textContent).toContain("0 links found");
    expect(container.querySelectorAll(".review-row")).toHaveLength(0);
    expect(container.querySelector(".export-button")).not.toBeNull();
  });

  it("routes accept and reject clicks to the verdict handler", () => {
    renderReview(container, onePage, handlers);
    container.querySelector<HTMLButtonElement>(".accept-button")!.click();
    expect(handlers.onVerdict).toHaveBeenCalledWith(0, "ACCEPTED");
    container.querySelector<HTMLButtonElement>(".reject-button")!.click();
    expect(handlers.onVerdict).toHaveBeenCalledWith(0, "REJECTED");
  });

  it("marks reviewed rows with their verdict class", () => {
    renderReview(
      container,
      { total: 1, offset: 0, links: [scenarioLink(0, "ACCEPTED")] },
      handlers,
    );
    expect(container.querySelector(".verdict-accepted")?.textContent).toBe("ACCEPTED");
  });

  it("fires the export handler from the header button", () => {
    renderReview(container, onePage, handlers);
    container.querySelector<HTMLButtonElement>(".export-button")!.click();
    expect(handlers.onExport).toHaveBeenCalledTimes(1);
  });
});
