import { afterEach, describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";

interface Captured {
  url: string;
  init?: RequestInit;
}

let captured: Captured | null = null;
const originalFetch = globalThis.fetch;

function respond(status: number, body: unknown, contentType = "application/json"): void {
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    captured = { url: String(input), init };
    const text = contentType === "application/json" ? JSON.stringify(body) : String(body);
    return new Response(text, { status, headers: { "content-type": contentType } });
  }) as typeof fetch;
}

afterEach(() => {
  globalThis.fetch = originalFetch;
  captured = null;
});

const client = new Client();

describe("request shapes", () => {
  it("fetches the catalog from /api/datasets", async () => {
    respond(200, { sources: [], tasks: [] });
    const catalog = await client.catalog();
    expect(captured?.url).toBe("/api/datasets");
    expect(captured?.init?.method ?? "GET").toBe("GET");
    expect(catalog).toEqual({ sources: [], tasks: [] });
  });

  it("uploads datasets as multipart form data", async () => {
    respond(201, { id: "ds1", label: "books" });
    const file = new File(["<a> <b> <c> ."], "books.nt");
    await client.uploadDataset(file, "books", { entityType: "foaf:Document" });
    const form = captured?.init?.body as FormData;
    expect(captured?.init?.method).toBe("POST");
    expect(form.get("label")).toBe("books");
    expect(form.get("entityType")).toBe("foaf:Document");
    expect(form.get("format")).toBeNull();
    expect((form.get("file") as File).name).toBe("books.nt");
  });

  it("passes the depth bound when listing paths", async () => {
    respond(200, []);
    await client.paths("ds1", 2);
    expect(captured?.url).toBe("/api/datasets/ds1/paths?maxDepth=2");
  });

  it("creates tasks with a JSON body", async () => {
    respond(201, { id: "t1" });
    await client.createTask("ds1", "ds2", "rdfs:seeAlso");
    expect(captured?.url).toBe("/api/tasks");
    expect(JSON.parse(String(captured?.init?.body))).toEqual({
      sourceId: "ds1",
      targetId: "ds2",
      linkType: "rdfs:seeAlso",
    });
    const headers = captured?.init?.headers as Record<string, string>;
    expect(headers["content-type"]).toBe("application/json");
  });

  it("posts an empty object when starting a run without options", async () => {
    respond(202, { progressUrl: "/api/tasks/t1/progress" });
    await client.run("t1");
    expect(captured?.url).toBe("/api/tasks/t1/run");
    expect(JSON.parse(String(captured?.init?.body))).toEqual({});
  });

  it("encodes the verdict filter on export", async () => {
    respond(200, "", "application/n-triples");
    const text = await client.exportLinks("t1", "ACCEPTED,REJECTED");
    expect(captured?.url).toBe("/api/tasks/t1/export?verdicts=ACCEPTED%2CREJECTED");
    expect(text).toBe("");
  });

  it("exports without a query when no filter is given", async () => {
    respond(200, "line\n", "application/n-triples");
    const text = await client.exportLinks("t1");
    expect(captured?.url).toBe("/api/tasks/t1/export");
    expect(text).toBe("line\n");
  });

  it("sends enrichment uploads with repeated target entries", async () => {
    respond(200, { report: { mode: "MERGE", added: [], skipped: [] }, graph: "" });
    await client.enrich({
      graph: new File(["x"], "graph.ttl"),
      mode: "merge",
      taskId: "t1",
      targets: [new File(["a"], "a.rdf"), new File(["b"], "b.rdf")],
      policy: '{"flattenResources": true}',
    });
    const form = captured?.init?.body as FormData;
    expect(form.get("mode")).toBe("merge");
    expect(form.get("taskId")).toBe("t1");
    expect(form.getAll("targets")).toHaveLength(2);
    expect(form.get("policy")).toBe('{"flattenResources": true}');
    expect(form.get("links")).toBeNull();
  });
});

describe("error handling", () => {
  it("turns the error envelope into a typed ApiError", async () => {
    respond(409, { code: "DUPLICATE_LABEL", message: "label books is taken" });
    const failure = await client.catalog().catch((error: unknown) => error);
    expect(failure).toBeInstanceOf(ApiError);
    const apiError = failure as ApiError;
    expect(apiError.status).toBe(409);
    expect(apiError.code).toBe("DUPLICATE_LABEL");
    expect(apiError.message).toBe("label books is taken");
  });

  it("falls back to a generic code for non-JSON error bodies", async () => {
    respond(502, "bad gateway", "text/plain");
    const failure = (await client.catalog().catch((error: unknown) => error)) as ApiError;
    expect(failure.code).toBe("HTTP_ERROR");
    expect(failure.status).toBe(502);
  });
});

describe("rule validation responses", () => {
  const body = { rule: { compare: { id: "c1" } } };

  it("resolves a clean validation", async () => {
    respond(200, { errors: [], warnings: [] });
    expect(await client.putRule("t1", body)).toEqual({ errors: [], warnings: [] });
    expect(captured?.init?.method).toBe("PUT");
  });

  it("resolves INVALID_RULE into the issue lists instead of throwing", async () => {
    respond(422, {
      code: "INVALID_RULE",
      message: "the rule has validation errors",
      details: {
        errors: [{ nodeId: "avg", message: "2 weights for 1 children" }],
        warnings: [{ nodeId: "c1", message: "custom path" }],
      },
    });
    const result = await client.putRule("t1", body);
    expect(result.errors).toEqual([{ nodeId: "avg", message: "2 weights for 1 children" }]);
    expect(result.warnings).toEqual([{ nodeId: "c1", message: "custom path" }]);
  });

  it("still throws on structural SPEC_ERROR responses", async () => {
    respond(422, {
      code: "SPEC_ERROR",
      message: "expected a property path",
      details: { location: "rule.compare.sourcePath" },
    });
    const failure = (await client.putRule("t1", body).catch((error: unknown) => error)) as ApiError;
    expect(failure.code).toBe("SPEC_ERROR");
    expect(failure.details?.location).toBe("rule.compare.sourcePath");
  });
});
