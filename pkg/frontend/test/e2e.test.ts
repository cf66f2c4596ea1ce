/** End-to-end: boot the real service on a demo corpus and walk the same
 * paths the UI takes, through the same client the UI uses.
 */
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ChildProcess, spawn } from "node:child_process";
import { mkdtemp, mkdir, rm, writeFile } from "node:fs/promises";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ApiError, Client } from "../src/api.js";
import { defaultState, entityApiPathToRoute, parseRoute,
         serializeRoute } from "../src/routes.js";

const R1 = {
  ship: { name: "Aurora", construction_place: "Genoa" },
  crew: [
    { name: "P. Rossi", residence: "Camogli", age: 31 },
    { name: "G. Bianchi", residence: "Genoa" },
  ],
};
const R2 = {
  ship: { name: "Aurora", construction_place: "Genoa" },
  crew: [{ name: "M. Costa", residence: "Camogli", age: 42 }],
};

const TEMPLATES = [
  {
    id: "crew_list",
    group: "Employment records",
    name: "Crew List",
    description: "Lists of crew engaged on merchant vessels.",
    config: "crew_list.json",
    transcript_url: "https://fastcat.example/{record_id}",
  },
];

const CREW_LIST_CONFIG = {
  categories: [
    {
      name: "Ships",
      base: "ship",
      columns: [
        { name: "name", path: "name" },
        { name: "construction_place", path: "construction_place" },
      ],
      identity: ["name"],
      connections: [
        { label: "Crew members", target: "Crew members",
          join: "same_record" },
      ],
    },
    {
      name: "Crew members",
      base: "crew[]",
      columns: [
        { name: "name", path: "name" },
        { name: "residence", path: "residence" },
        { name: "age", path: "age", kind: "integer" },
      ],
      identity: ["name"],
    },
  ],
};

const EXPLORE_ALL = [{ name: "Ships", group: "Vessels" }];
const EXPLORE_ALL_CONF = {
  Ships: [{ source: "crew_list", category: "Ships" }],
};

const CREW_SCOPE = {
  kind: "source",
  source: "crew_list",
  category: "Crew members",
} as const;
const SHIP_SCOPE = {
  kind: "source",
  source: "crew_list",
  category: "Ships",
} as const;

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.once("error", reject);
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        srv.close();
        reject(new Error("no port assigned"));
        return;
      }
      const port = address.port;
      srv.close(() => resolve(port));
    });
  });
}

async function writeDemo(root: string): Promise<void> {
  const config = join(root, "config");
  const corpus = join(root, "corpus", "crew_list");
  await mkdir(config, { recursive: true });
  await mkdir(corpus, { recursive: true });
  await writeFile(join(config, "templates.json"), JSON.stringify(TEMPLATES));
  await writeFile(join(config, "crew_list.json"),
                  JSON.stringify(CREW_LIST_CONFIG));
  await writeFile(join(config, "explore_all.json"),
                  JSON.stringify(EXPLORE_ALL));
  await writeFile(join(config, "explore_all_conf.json"),
                  JSON.stringify(EXPLORE_ALL_CONF));
  await writeFile(join(corpus, "r1.json"), JSON.stringify(R1));
  await writeFile(join(corpus, "r2.json"), JSON.stringify(R2));
}

let root = "";
let child: ChildProcess | null = null;
let exited: Promise<void> = Promise.resolve();
let client: Client;
let serverLog = "";

beforeAll(async () => {
  root = await mkdtemp(join(tmpdir(), "archcat-ui-"));
  await writeDemo(root);
  const port = await freePort();
  client = new Client(`http://127.0.0.1:${port}`);

  child = spawn(
    "python3",
    [
      "-m",
      "archcat.cli",
      "serve",
      "--config",
      join(root, "config"),
      "--data",
      join(root, "corpus"),
      "--host",
      "127.0.0.1",
      "--port",
      String(port),
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  child.stdout?.on("data", (chunk) => (serverLog += String(chunk)));
  child.stderr?.on("data", (chunk) => (serverLog += String(chunk)));
  exited = new Promise((resolve) => child?.once("exit", () => resolve()));

  const deadline = Date.now() + 45_000;
  for (;;) {
    try {
      const health = await client.health();
      if (health.status === "ok") break;
    } catch {
      // not up yet
    }
    if (child.exitCode !== null || Date.now() > deadline) {
      throw new Error(`service did not come up:\n${serverLog}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
});

afterAll(async () => {
  if (child !== null && child.exitCode === null) {
    child.kill("SIGTERM");
    const gone = Promise.race([
      exited,
      new Promise((resolve) => setTimeout(resolve, 5_000)),
    ]);
    await gone;
    if (child.exitCode === null) child.kill("SIGKILL");
  }
  if (root !== "") await rm(root, { recursive: true, force: true });
});

describe("service walkthrough", () => {
  it("reports a healthy catalogue", async () => {
    const health = await client.health();
    expect(health.sources).toBe(1);
    expect(health.records).toBe(2);
  });

  it("serves the overview payloads the home page renders", async () => {
    const templates = await client.templates();
    expect(templates.groups).toHaveLength(1);
    expect(templates.groups[0].label).toBe("Employment records");
    const source = templates.groups[0].sources[0];
    expect(source.id).toBe("crew_list");
    expect(source.name).toBe("Crew List");
    expect(source.record_count).toBe(2);
    expect(source.categories).toEqual([
      { name: "Ships", rows: 1 },
      { name: "Crew members", rows: 3 },
    ]);

    const globals = await client.globals();
    expect(globals.groups).toEqual([
      {
        label: "Vessels",
        categories: [{ name: "Ships", rows: 1, sources: ["crew_list"] }],
      },
    ]);
  });

  it("filters a table the way the filter form does", async () => {
    const state = defaultState();
    state.filters = [{ column: "residence", op: "contains", value: "cam" }];
    const page = await client.rows(CREW_SCOPE, state, null);
    expect(page.total).toBe(2);
    expect(page.rows.map((r) => r.cells[0])).toEqual(["P. Rossi", "M. Costa"]);
  });

  it("groups rows for the chart", async () => {
    const group = await client.groupby(CREW_SCOPE, "residence", [], null);
    expect(group.buckets).toEqual([
      { label: "Camogli", count: 2 },
      { label: "Genoa", count: 1 },
    ]);
    expect(group.total).toBe(3);
  });

  it("scopes a table to one record", async () => {
    const page = await client.rows(CREW_SCOPE, defaultState(), "r2");
    expect(page.total).toBe(1);
    expect(page.rows[0].cells[0]).toBe("M. Costa");

    const categories = await client.categories("crew_list", "r2");
    expect(categories.categories).toEqual([
      { name: "Ships", rows: 1 },
      { name: "Crew members", rows: 1 },
    ]);
  });

  it("sorts with unfilled values always at the bottom", async () => {
    const state = defaultState();
    state.sort = "age";
    state.dir = "desc";
    const page = await client.rows(CREW_SCOPE, state, null);
    expect(page.rows.map((r) => r.cells[0])).toEqual([
      "M. Costa",
      "P. Rossi",
      "G. Bianchi",
    ]);
    expect(page.rows[2].cells[2]).toBe("None or unfilled");
  });

  it("shows an entity with its connections and transcript links", async () => {
    const entity = await client.entity(SHIP_SCOPE, '["Aurora"]');
    expect(entity.identity).toEqual(["Aurora"]);
    expect(entity.records.map((r) => r.url)).toEqual([
      "https://fastcat.example/r1",
      "https://fastcat.example/r2",
    ]);
    expect(entity.connections).toHaveLength(1);
    expect(entity.connections[0].label).toBe("Crew members");
    expect(entity.connections[0].total).toBe(3);
    expect(entity.connections[0].rows.map((r) => r.cells[0])).toEqual([
      "P. Rossi",
      "G. Bianchi",
      "M. Costa",
    ]);
  });

  it("walks the cross-source redirect into a source-local entity", async () => {
    const sources = await client.entitySources("Ships", '["Aurora"]');
    expect(sources.sources).toHaveLength(1);
    const entry = sources.sources[0];
    expect(entry.source).toBe("crew_list");
    expect(entry.name).toBe("Crew List");
    expect(entry.rows).toBe(1);

    const route = entityApiPathToRoute(entry.path);
    expect(route).not.toBeNull();
    if (route === null || route.view !== "entity") {
      throw new Error("expected a source entity route");
    }
    expect(parseRoute(serializeRoute(route))).toEqual(route);

    const entity = await client.entity(
      { kind: "source", source: route.source, category: route.category },
      route.key,
    );
    expect(entity.identity).toEqual(["Aurora"]);
  });

  it("serves the cross-source table", async () => {
    const page = await client.rows(
      { kind: "global", category: "Ships" },
      defaultState(),
      null,
    );
    expect(page.total).toBe(1);
    expect(page.rows[0].cells[0]).toBe("Aurora");
    expect(page.rows[0].source).toBe("crew_list");
    expect(page.rows[0].provenance).toEqual(["r1", "r2"]);
  });

  it("exports the filtered table as CSV, byte for byte", async () => {
    const state = defaultState();
    state.filters = [{ column: "residence", op: "equals", value: "Genoa" }];
    const response = await fetch(client.csvUrl(CREW_SCOPE, state, null));
    expect(response.status).toBe(200);
    expect(response.headers.get("content-type")).toContain("text/csv");
    const text = await response.text();
    expect(text).toBe(
      "name,residence,age\r\nG. Bianchi,Genoa,None or unfilled\r\n",
    );
  });

  it("exports the grouping as CSV", async () => {
    const response = await fetch(
      client.groupCsvUrl(CREW_SCOPE, "residence", [], null),
    );
    const text = await response.text();
    expect(text).toBe("residence,count\r\nCamogli,2\r\nGenoa,1\r\n");
  });

  it("surfaces service errors with their code and status", async () => {
    const state = defaultState();
    state.filters = [{ column: "age", op: "contains", value: "3" }];
    const err = await client.rows(CREW_SCOPE, state, null).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe("bad_filter");
    expect((err as ApiError).status).toBe(400);

    const missing = await client
      .entity({ kind: "source", source: "crew_list", category: "Nope" },
              '["x"]')
      .catch((e) => e);
    expect((missing as ApiError).code).toBe("not_found");
    expect((missing as ApiError).status).toBe(404);
  });

  it("rejects malformed paging with the service's own envelope", async () => {
    const url =
      client.base +
      "/api/sources/crew_list/categories/" +
      encodeURIComponent("Crew members") +
      "/rows?offset=abc";
    const response = await fetch(url);
    expect(response.status).toBe(400);
    const body = await response.json();
    expect(body.error.code).toBe("bad_page");
  });
});
