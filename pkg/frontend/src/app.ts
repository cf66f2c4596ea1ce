/** Application shell: owns the URL hash, fetches what the active view
 * needs, and swaps the rendered view into the page.  All state lives in
 * the hash, so every view is bookmarkable and the back button just works.
 */

import { ApiError, Client, TableScopeRef } from "./api.js";
import {
  TableState,
  ViewRoute,
  defaultState,
  parseRoute,
  serializeRoute,
} from "./routes.js";
import {
  el,
  renderEntity,
  renderEntitySources,
  renderError,
  renderHome,
  renderRecordPicker,
  renderTable,
} from "./render.js";
import { GroupPayload } from "./types.js";

const client = new Client("");
const doc = document;

const appRoot = doc.getElementById("app");
if (appRoot === null) throw new Error("missing #app container");
appRoot.textContent = "";

const topbar = el(doc, "header", "topbar");
const brand = el(doc, "a", "brand", "archcat");
brand.href = "#/";
topbar.appendChild(brand);
const healthNote = el(doc, "span", "health");
topbar.appendChild(healthNote);
appRoot.appendChild(topbar);

const viewRoot = el(doc, "main", "view");
appRoot.appendChild(viewRoot);

client
  .health()
  .then((h) => {
    healthNote.textContent =
      `${h.sources} sources · ${h.records} records · ${h.rows} rows`;
  })
  .catch(() => {
    healthNote.textContent = "service unreachable";
  });

function navigate(route: ViewRoute): void {
  const target = serializeRoute(route);
  if (location.hash === target) {
    void render();
  } else {
    location.hash = target;
  }
}

let seq = 0;

async function render(): Promise<void> {
  const token = ++seq;
  const route = parseRoute(location.hash);
  viewRoot.textContent = "";
  viewRoot.appendChild(el(doc, "p", "loading", "loading…"));
  let node: HTMLElement;
  try {
    node = await buildView(route);
  } catch (err) {
    if (token !== seq) return;
    node = buildErrorView(route, err);
  }
  if (token !== seq) return;
  viewRoot.textContent = "";
  viewRoot.appendChild(node);
}

function buildErrorView(route: ViewRoute, err: unknown): HTMLElement {
  const wrap = el(doc, "div", "view-error");
  wrap.appendChild(renderError(doc, err, () => void render()));
  if (err instanceof ApiError &&
      (err.code === "bad_filter" || err.code === "bad_sort" ||
       err.code === "bad_group" || err.code === "bad_page")) {
    const reset = el(doc, "a", "reset-link", "Clear table controls");
    if (route.view === "source") {
      reset.href = serializeRoute({ ...route, state: defaultState() });
      wrap.appendChild(reset);
    } else if (route.view === "global") {
      reset.href = serializeRoute({ ...route, state: defaultState() });
      wrap.appendChild(reset);
    }
  }
  return wrap;
}

async function buildView(route: ViewRoute): Promise<HTMLElement> {
  switch (route.view) {
    case "home":
      return buildHome(route.tab);
    case "source":
      return buildSource(route);
    case "entity":
      return buildEntity(route);
    case "global":
      return buildGlobal(route);
    case "globalEntity":
      return buildGlobalEntity(route);
  }
}

async function buildHome(tab: "by_source" | "all"): Promise<HTMLElement> {
  const [templates, globals] = await Promise.all([
    client.templates(),
    client.globals(),
  ]);
  return renderHome(doc, tab, templates, globals);
}

async function fetchGroup(
  scope: TableScopeRef,
  state: TableState,
  record: string | null,
): Promise<GroupPayload | null> {
  if (state.chart === null) return null;
  return client.groupby(scope, state.chart, state.filters, record);
}

async function buildSource(
  route: Extract<ViewRoute, { view: "source" }>,
): Promise<HTMLElement> {
  const [templates, records, categories] = await Promise.all([
    client.templates(),
    client.records(route.source),
    client.categories(route.source, route.record),
  ]);
  let displayName = route.source;
  for (const group of templates.groups) {
    for (const source of group.sources) {
      if (source.id === route.source) displayName = source.name;
    }
  }

  const wrap = el(doc, "div", "source-view");
  const crumb = el(doc, "nav", "crumbs");
  const home = el(doc, "a", undefined, "sources");
  home.href = "#/";
  crumb.appendChild(home);
  wrap.appendChild(crumb);
  wrap.appendChild(el(doc, "h2", "view-title", displayName));

  wrap.appendChild(
    renderRecordPicker(doc, records, route.record, (record) => {
      navigate({
        ...route,
        record,
        state: { ...route.state, offset: 0 },
      });
    }),
  );

  const category =
    route.category ?? categories.categories[0]?.name ?? null;
  const tabs = el(doc, "nav", "tabs category-tabs");
  for (const cat of categories.categories) {
    const a = el(doc, "a", "tab", `${cat.name} (${cat.rows})`);
    a.href = serializeRoute({
      view: "source",
      source: route.source,
      category: cat.name,
      record: route.record,
      state: defaultState(),
    });
    if (cat.name === category) a.classList.add("active");
    tabs.appendChild(a);
  }
  wrap.appendChild(tabs);

  if (category === null) {
    wrap.appendChild(el(doc, "p", "empty", "No catalogue rows here."));
    return wrap;
  }

  const scope: TableScopeRef = {
    kind: "source",
    source: route.source,
    category,
  };
  const [payload, group] = await Promise.all([
    client.rows(scope, route.state, route.record),
    fetchGroup(scope, route.state, route.record),
  ]);
  wrap.appendChild(
    renderTable(doc, {
      scope,
      record: route.record,
      state: route.state,
      payload,
      group,
      csvUrl: client.csvUrl(scope, route.state, route.record),
      groupCsvUrl:
        route.state.chart === null
          ? null
          : client.groupCsvUrl(scope, route.state.chart, route.state.filters,
                               route.record),
      onState: (next) => navigate({ ...route, category, state: next }),
      entityRoute: (key) => ({
        view: "entity",
        source: route.source,
        category,
        key,
      }),
    }),
  );
  return wrap;
}

async function buildEntity(
  route: Extract<ViewRoute, { view: "entity" }>,
): Promise<HTMLElement> {
  const payload = await client.entity(
    { kind: "source", source: route.source, category: route.category },
    route.key,
  );
  return renderEntity(doc, {
    payload,
    connectionRoute: (target, key) => ({
      view: "entity",
      source: route.source,
      category: target,
      key,
    }),
    backRoute: {
      view: "source",
      source: route.source,
      category: route.category,
      record: null,
      state: defaultState(),
    },
    backLabel: `${route.source} / ${route.category}`,
  });
}

async function buildGlobal(
  route: Extract<ViewRoute, { view: "global" }>,
): Promise<HTMLElement> {
  const scope: TableScopeRef = { kind: "global", category: route.category };
  const [payload, group] = await Promise.all([
    client.rows(scope, route.state, null),
    fetchGroup(scope, route.state, null),
  ]);
  const wrap = el(doc, "div", "global-view");
  const crumb = el(doc, "nav", "crumbs");
  const home = el(doc, "a", undefined, "across sources");
  home.href = "#/all";
  crumb.appendChild(home);
  wrap.appendChild(crumb);
  wrap.appendChild(el(doc, "h2", "view-title", route.category));
  wrap.appendChild(
    renderTable(doc, {
      scope,
      record: null,
      state: route.state,
      payload,
      group,
      csvUrl: client.csvUrl(scope, route.state, null),
      groupCsvUrl:
        route.state.chart === null
          ? null
          : client.groupCsvUrl(scope, route.state.chart, route.state.filters,
                               null),
      onState: (next) => navigate({ ...route, state: next }),
      entityRoute: (key) => ({
        view: "globalEntity",
        category: route.category,
        key,
      }),
    }),
  );
  return wrap;
}

async function buildGlobalEntity(
  route: Extract<ViewRoute, { view: "globalEntity" }>,
): Promise<HTMLElement> {
  const scope: TableScopeRef = { kind: "global", category: route.category };
  const [payload, sources] = await Promise.all([
    client.entity(scope, route.key),
    client.entitySources(route.category, route.key),
  ]);
  const wrap = el(doc, "div", "global-entity-view");
  wrap.appendChild(
    renderEntity(doc, {
      payload,
      connectionRoute: (target, key) => ({
        view: "globalEntity",
        category: target,
        key,
      }),
      backRoute: { view: "global", category: route.category,
                   state: defaultState() },
      backLabel: route.category,
    }),
  );
  wrap.appendChild(renderEntitySources(doc, sources));
  return wrap;
}

window.addEventListener("hashchange", () => void render());
void render();
