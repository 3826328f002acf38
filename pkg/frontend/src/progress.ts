/** Launches runs and polls their progress. The displayed fraction only
 * ever grows within a run, and the poll loop is cancelled when the user
 * navigates away.
 */

import { ApiError, type Client, type ProgressRow } from "./api.js";

export interface RunHandlers {
  onDone(progress: ProgressRow): void;
  onFailed(progress: ProgressRow): void;
  onConflict(message: string): void;
  onError(message: string): void;
}

export class RunController {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private taskId: string | null = null;
  private best = 0;

  private bar: HTMLProgressElement;
  private caption: HTMLElement;

  constructor(
    private readonly container: HTMLElement,
    private readonly client: Client,
    private readonly handlers: RunHandlers,
    private readonly pollIntervalMs = 250,
  ) {
    this.container.classList.add("run-panel");
    this.bar = document.createElement("progress");
    this.bar.max = 1;
    this.bar.value = 0;
    this.bar.hidden = true;
    this.caption = document.createElement("div");
    this.caption.className = "run-caption";
    this.container.appendChild(this.bar);
    this.container.appendChild(this.caption);
  }

  get displayedFraction(): number {
    return this.bar.value;
  }

  async start(taskId: string): Promise<void> {
    this.cancel();
    this.taskId = taskId;
    this.best = 0;
    this.bar.hidden = false;
    this.bar.value = 0;
    this.caption.textContent = "starting run…";
    try {
      await this.client.run(taskId);
    } catch (error) {
      this.bar.hidden = true;
      this.caption.textContent = "";
      if (error instanceof ApiError && error.status === 409) {
        this.handlers.onConflict("run in progress");
      } else if (error instanceof ApiError) {
        this.handlers.onError(error.message);
      } else {
        this.handlers.onError((error as Error).message);
      }
      return;
    }
    await this.poll();
  }

  /** Stop polling; used when navigating away from the task. */
  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.taskId = null;
  }

  private async poll(): Promise<void> {
    if (!this.taskId) return;
    const taskId = this.taskId;
    let progress: ProgressRow;
    try {
      progress = await this.client.progress(taskId);
    } catch (error) {
      this.handlers.onError((error as Error).message);
      this.cancel();
      return;
    }
    if (this.taskId !== taskId) return;

    const fraction = progress.totalPairs > 0 ? progress.pairsEvaluated / progress.totalPairs : 0;
    if (fraction > this.best) this.best = fraction;
    this.bar.value = this.best;
    this.caption.textContent =
      `${progress.state}: ${progress.pairsEvaluated} of ${progress.totalPairs} pairs, ` +
      `${progress.linksFound} links`;

    if (progress.state === "DONE") {
      this.bar.value = 1;
      this.cancel();
      this.handlers.onDone(progress);
      return;
    }
    if (progress.state === "FAILED") {
      this.cancel();
      this.handlers.onFailed(progress);
      return;
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.poll();
    }, this.pollIntervalMs);
  }
}
