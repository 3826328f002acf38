/** Editable rule tree and its mapping to the server's rule payload.
 *
 * Drafts keep whatever the user typed (paths as text, weights as raw
 * comma-separated input); serialization is the only place the text is
 * shaped into the payload, so the server stays the single validator.
 */

import type { Issue } from "./api.js";

export type ComparatorKind = "EQUALITY" | "LEVENSHTEIN" | "DATE_EQUALITY";
export type AggregationOperator = "MINIMUM" | "MAXIMUM" | "AVERAGE";

export const TRANSFORMATIONS = ["LOWERCASE", "TRIM", "STRIP_PUNCTUATION"] as const;

export interface CompareDraft {
  kind: "compare";
  id: string;
  sourcePath: string;
  targetPath: string;
  comparator: ComparatorKind;
  maxDistance: number | null;
  transformations: string[];
}

export interface AggregateDraft {
  kind: "aggregate";
  id: string;
  operator: AggregationOperator;
  weightsText: string;
  children: RuleNodeDraft[];
}

export type RuleNodeDraft = CompareDraft | AggregateDraft;

export function newComparison(id: string): CompareDraft {
  return {
    kind: "compare",
    id,
    sourcePath: "",
    targetPath: "",
    comparator: "LEVENSHTEIN",
    maxDistance: 3,
    transformations: [],
  };
}

export function newAggregate(id: string): AggregateDraft {
  return { kind: "aggregate", id, operator: "MINIMUM", weightsText: "", children: [] };
}

export function walk(node: RuleNodeDraft, visit: (node: RuleNodeDraft) => void): void {
  visit(node);
  if (node.kind === "aggregate") for (const child of node.children) walk(child, visit);
}

export function findNode(root: RuleNodeDraft, id: string): RuleNodeDraft | null {
  let found: RuleNodeDraft | null = null;
  walk(root, (node) => {
    if (node.id === id) found = node;
  });
  return found;
}

/** Remove the node with the given id; the root itself cannot be removed. */
export function removeNode(root: RuleNodeDraft, id: string): boolean {
  if (root.kind !== "aggregate") return false;
  const at = root.children.findIndex((c) => c.id === id);
  if (at >= 0) {
    root.children.splice(at, 1);
    return true;
  }
  return root.children.some((child) => removeNode(child, id));
}

/** A node id not yet used anywhere under root. */
export function nextId(root: RuleNodeDraft | null, prefix: string): string {
  const used = new Set<string>();
  if (root) walk(root, (node) => used.add(node.id));
  for (let i = 1; ; i++) {
    const candidate = `${prefix}${i}`;
    if (!used.has(candidate)) return candidate;
  }
}

function parseWeights(text: string): number[] | null {
  const trimmed = text.trim();
  if (!trimmed) return null;
  // Unparsable entries become NaN -> JSON null, which the server rejects
  // with a located message; the editor never second-guesses it.
  return trimmed.split(",").map((part) => Number(part.trim()));
}

export function toPayload(node: RuleNodeDraft): Record<string, unknown> {
  if (node.kind === "compare") {
    const comparator: Record<string, unknown> = { kind: node.comparator };
    if (node.comparator === "LEVENSHTEIN" && node.maxDistance !== null) {
      comparator.maxDistance = node.maxDistance;
    }
    const body: Record<string, unknown> = {
      id: node.id,
      sourcePath: node.sourcePath,
      targetPath: node.targetPath,
      comparator,
    };
    if (node.transformations.length) body.transformations = [...node.transformations];
    return { compare: body };
  }
  const body: Record<string, unknown> = {
    id: node.id,
    operator: node.operator,
    children: node.children.map(toPayload),
  };
  const weights = parseWeights(node.weightsText);
  if (weights !== null) body.weights = weights;
  return { aggregate: body };
}

function pathText(raw: unknown): string {
  // The server accepts both a single string and a list of IRI steps; task
  // details echo rules with steps as full IRIs.
  if (typeof raw === "string") return raw;
  if (Array.isArray(raw)) return raw.map((step) => `<${step}>`).join("/");
  return "";
}

/** Rebuild a draft from a rule payload (e.g. the one a task detail echoes). */
export function fromPayload(payload: unknown): RuleNodeDraft {
  const obj = payload as Record<string, any>;
  if (obj && typeof obj === "object" && "compare" in obj) {
    const body = obj.compare;
    const comparator = body.comparator ?? {};
    return {
      kind: "compare",
      id: String(body.id ?? ""),
      sourcePath: pathText(body.sourcePath),
      targetPath: pathText(body.targetPath),
      comparator: (comparator.kind ?? "EQUALITY") as ComparatorKind,
      maxDistance: comparator.maxDistance ?? null,
      transformations: [...(body.transformations ?? [])],
    };
  }
  if (obj && typeof obj === "object" && "aggregate" in obj) {
    const body = obj.aggregate;
    return {
      kind: "aggregate",
      id: String(body.id ?? ""),
      operator: (body.operator ?? "MINIMUM") as AggregationOperator,
      weightsText: Array.isArray(body.weights) ? body.weights.join(", ") : "",
      children: (body.children ?? []).map(fromPayload),
    };
  }
  throw new Error("rule payload must have a single 'compare' or 'aggregate' key");
}

/** Issues grouped per node id, for rendering next to the offending node. */
export function issuesByNode(issues: Issue[]): Map<string, string[]> {
  const map = new Map<string, string[]>();
  for (const issue of issues) {
    const bucket = map.get(issue.nodeId);
    if (bucket) bucket.push(issue.message);
    else map.set(issue.nodeId, [issue.message]);
  }
  return map;
}
