/** DOM builders for every view.  No framework, no innerHTML: all data from
 * the service lands in the page via textContent, so cell values -- including
 * the "None or unfilled" / "n/a" placeholder strings -- appear exactly as
 * served, with nothing interpreted as markup.
 */

import { barChart } from "./chart.js";
import {
  ApiError,
  TableScopeRef,
} from "./api.js";
import {
  ColumnDesc,
  EntityPayload,
  EntitySourcesPayload,
  FilterSpec,
  GlobalsPayload,
  GroupPayload,
  RecordsPayload,
  TablePayload,
  TemplatesPayload,
  ValueKind,
} from "./types.js";
import {
  TableState,
  ViewRoute,
  serializeRoute,
  entityApiPathToRoute,
} from "./routes.js";

export const TEXT_OPS = [
  "contains",
  "not_contains",
  "equals",
  "not_equals",
  "starts_with",
  "ends_with",
] as const;

export const NUMERIC_OPS = [
  "num_equals",
  "num_not_equals",
  "less_than",
  "greater_than",
  "in_range",
] as const;

/** Operators the service accepts for a column of this kind.  Text columns
 * take only the text operators; typed columns take only the numeric ones. */
export function legalOps(kind: ValueKind): readonly string[] {
  return kind === "text" ? TEXT_OPS : NUMERIC_OPS;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function link(doc: Document, href: string, text: string, className?: string) {
  const a = el(doc, "a", className, text);
  a.href = href;
  return a;
}

function routeLink(doc: Document, route: ViewRoute, text: string,
                   className?: string) {
  return link(doc, serializeRoute(route), text, className);
}

// --- overview -------------------------------------------------------------

export function renderHome(
  doc: Document,
  tab: "by_source" | "all",
  templates: TemplatesPayload,
  globals: GlobalsPayload,
): HTMLElement {
  const root = el(doc, "div", "home");
  const tabs = el(doc, "nav", "tabs");
  const bySource = routeLink(doc, { view: "home", tab: "by_source" },
                             "By source", "tab");
  const across = routeLink(doc, { view: "home", tab: "all" },
                           "Across sources", "tab");
  (tab === "by_source" ? bySource : across).classList.add("active");
  tabs.append(bySource, across);
  root.appendChild(tabs);

  if (tab === "by_source") {
    for (const group of templates.groups) {
      root.appendChild(el(doc, "h2", "group-label", group.label));
      const cards = el(doc, "div", "cards");
      for (const source of group.sources) {
        const card = el(doc, "div", "card");
        card.appendChild(
          routeLink(doc, sourceRoute(source.id, null), source.name,
                    "card-title"));
        card.appendChild(el(doc, "p", "card-desc", source.description));
        card.appendChild(
          el(doc, "p", "card-meta", `${source.record_count} records`));
        const list = el(doc, "ul", "card-cats");
        for (const cat of source.categories) {
          const item = el(doc, "li");
          item.appendChild(
            routeLink(doc, sourceRoute(source.id, cat.name),
                      `${cat.name} (${cat.rows})`));
          list.appendChild(item);
        }
        card.appendChild(list);
        cards.appendChild(card);
      }
      root.appendChild(cards);
    }
  } else {
    for (const group of globals.groups) {
      root.appendChild(el(doc, "h2", "group-label", group.label));
      const cards = el(doc, "div", "cards");
      for (const cat of group.categories) {
        const card = el(doc, "div", "card");
        card.appendChild(
          routeLink(doc, globalRoute(cat.name), cat.name, "card-title"));
        card.appendChild(el(doc, "p", "card-meta", `${cat.rows} rows`));
        card.appendChild(
          el(doc, "p", "card-desc",
             `from ${cat.sources.length} source${cat.sources.length === 1 ? "" : "s"}: ` +
             cat.sources.join(", ")));
        cards.appendChild(card);
      }
      root.appendChild(cards);
    }
  }
  return root;
}

function sourceRoute(source: string, category: string | null): ViewRoute {
  return {
    view: "source",
    source,
    category,
    record: null,
    state: freshState(),
  };
}

function globalRoute(category: string): ViewRoute {
  return { view: "global", category, state: freshState() };
}

function freshState(): TableState {
  return { filters: [], sort: null, dir: "asc", offset: 0, limit: 100,
           chart: null };
}

// --- table view -------------------------------------------------------------

export interface TableViewModel {
  scope: TableScopeRef;
  record: string | null;
  state: TableState;
  payload: TablePayload;
  group: GroupPayload | null;
  csvUrl: string;
  groupCsvUrl: string | null;
  onState: (next: TableState) => void;
  entityRoute: (key: string) => ViewRoute;
}

function cloneState(state: TableState): TableState {
  return {
    filters: state.filters.slice(),
    sort: state.sort,
    dir: state.dir,
    offset: state.offset,
    limit: state.limit,
    chart: state.chart,
  };
}

function filterLabel(spec: FilterSpec): string {
  const tail = spec.value2 !== undefined
    ? `${spec.value} .. ${spec.value2}`
    : spec.value;
  return `${spec.column} ${spec.op.replace(/_/g, " ")} ${tail}`;
}

function renderFilterChips(doc: Document, view: TableViewModel): HTMLElement {
  const row = el(doc, "div", "chips");
  view.state.filters.forEach((spec, index) => {
    const chip = el(doc, "span", "filter-chip", filterLabel(spec));
    const remove = el(doc, "button", "chip-x", "×");
    remove.type = "button";
    remove.title = "remove filter";
    remove.addEventListener("click", () => {
      const next = cloneState(view.state);
      next.filters = next.filters.filter((_, i) => i !== index);
      next.offset = 0;
      view.onState(next);
    });
    chip.appendChild(remove);
    row.appendChild(chip);
  });
  return row;
}

function kindAccepts(kind: ValueKind, value: string): boolean {
  if (kind === "integer" || kind === "decimal") {
    return value.trim() !== "" && Number.isFinite(Number(value));
  }
  return value !== "" || kind === "text";
}

function renderFilterForm(doc: Document, view: TableViewModel): HTMLElement {
  const columns = view.payload.columns;
  const form = el(doc, "div", "controls filter-form");

  const columnSelect = el(doc, "select", "filter-column");
  for (const column of columns) {
    const option = el(doc, "option", undefined,
                      `${column.name} (${column.kind})`);
    option.value = column.name;
    columnSelect.appendChild(option);
  }

  const opSelect = el(doc, "select", "filter-op");
  const value = el(doc, "input", "filter-value");
  value.type = "text";
  value.placeholder = "value";
  const value2 = el(doc, "input", "filter-value2");
  value2.type = "text";
  value2.placeholder = "upper bound";
  value2.hidden = true;

  const columnKind = (): ValueKind => {
    const chosen = columns.find((c) => c.name === columnSelect.value);
    return chosen ? chosen.kind : "text";
  };

  const refreshOps = () => {
    const keep = opSelect.value;
    opSelect.textContent = "";
    for (const op of legalOps(columnKind())) {
      const option = el(doc, "option", undefined, op.replace(/_/g, " "));
      option.value = op;
      opSelect.appendChild(option);
    }
    if ([...opSelect.options].some((o) => o.value === keep)) {
      opSelect.value = keep;
    }
    value2.hidden = opSelect.value !== "in_range";
  };
  columnSelect.addEventListener("change", refreshOps);
  opSelect.addEventListener("change", () => {
    value2.hidden = opSelect.value !== "in_range";
  });
  refreshOps();

  const add = el(doc, "button", "add-filter", "Add filter");
  add.type = "button";
  add.addEventListener("click", () => {
    const kind = columnKind();
    const op = opSelect.value;
    const needsNumber = (NUMERIC_OPS as readonly string[]).includes(op);
    const okValue = needsNumber ? kindAccepts(kind, value.value) : true;
    const okValue2 = op !== "in_range" || kindAccepts(kind, value2.value);
    value.classList.toggle("bad", !okValue);
    value2.classList.toggle("bad", !okValue2);
    if (!okValue || !okValue2) return;
    const spec: FilterSpec = {
      column: columnSelect.value,
      op,
      value: value.value,
    };
    if (op === "in_range") spec.value2 = value2.value;
    const next = cloneState(view.state);
    next.filters = next.filters.concat([spec]);
    next.offset = 0;
    view.onState(next);
  });

  form.append(columnSelect, opSelect, value, value2, add);
  return form;
}

function renderChartControls(doc: Document, view: TableViewModel): HTMLElement {
  const wrap = el(doc, "div", "controls chart-controls");
  const label = el(doc, "label", undefined, "Group by ");
  const select = el(doc, "select", "chart-column");
  const none = el(doc, "option", undefined, "(no grouping)");
  none.value = "";
  select.appendChild(none);
  for (const column of view.payload.columns) {
    const option = el(doc, "option", undefined, column.name);
    option.value = column.name;
    select.appendChild(option);
  }
  select.value = view.state.chart ?? "";
  select.addEventListener("change", () => {
    const next = cloneState(view.state);
    next.chart = select.value === "" ? null : select.value;
    view.onState(next);
  });
  label.appendChild(select);
  wrap.appendChild(label);

  wrap.appendChild(link(doc, view.csvUrl, "Download CSV", "csv-link"));
  if (view.groupCsvUrl !== null) {
    wrap.appendChild(
      link(doc, view.groupCsvUrl, "Download grouping CSV", "csv-link"));
  }
  return wrap;
}

function sortIndicator(state: TableState, column: string): string {
  if (state.sort !== column) return "";
  return state.dir === "desc" ? " ▼" : " ▲";
}

function renderDataTable(doc: Document, view: TableViewModel): HTMLElement {
  const wrap = el(doc, "div", "table-wrap");
  const table = el(doc, "table", "grid");
  const head = el(doc, "thead");
  const headRow = el(doc, "tr");
  view.payload.columns.forEach((column: ColumnDesc) => {
    const th = el(doc, "th", "col-head",
                  column.name + sortIndicator(view.state, column.name));
    th.title = `${column.kind} column -- click to sort`;
    th.addEventListener("click", () => {
      const next = cloneState(view.state);
      if (next.sort !== column.name) {
        next.sort = column.name;
        next.dir = "asc";
      } else if (next.dir === "asc") {
        next.dir = "desc";
      } else {
        next.sort = null;
        next.dir = "asc";
      }
      next.offset = 0;
      view.onState(next);
    });
    headRow.appendChild(th);
  });
  const isGlobal = view.scope.kind === "global";
  if (isGlobal) headRow.appendChild(el(doc, "th", "meta-head", "source"));
  headRow.appendChild(el(doc, "th", "meta-head", "records"));
  head.appendChild(headRow);
  table.appendChild(head);

  const body = el(doc, "tbody");
  for (const row of view.payload.rows) {
    const tr = el(doc, "tr");
    row.cells.forEach((cell, i) => {
      const td = el(doc, "td");
      if (i === 0) {
        td.appendChild(
          routeLink(doc, view.entityRoute(row.key), cell, "entity-link"));
      } else {
        td.textContent = cell;
      }
      tr.appendChild(td);
    });
    if (isGlobal) tr.appendChild(el(doc, "td", "meta-cell", row.source));
    tr.appendChild(el(doc, "td", "meta-cell", row.provenance.join(", ")));
    body.appendChild(tr);
  }
  table.appendChild(body);
  wrap.appendChild(table);
  return wrap;
}

function renderPager(doc: Document, view: TableViewModel): HTMLElement {
  const { offset, limit } = view.payload;
  const total = view.payload.total;
  const shown = view.payload.rows.length;
  const pager = el(doc, "div", "pager");
  const prev = el(doc, "button", "pager-prev", "← previous");
  prev.type = "button";
  prev.disabled = offset === 0;
  prev.addEventListener("click", () => {
    const next = cloneState(view.state);
    next.offset = Math.max(0, offset - limit);
    view.onState(next);
  });
  const first = total === 0 ? 0 : offset + 1;
  const label = el(doc, "span", "pager-label",
                   `${first}–${offset + shown} of ${total}`);
  const nextBtn = el(doc, "button", "pager-next", "next →");
  nextBtn.type = "button";
  nextBtn.disabled = offset + shown >= total;
  nextBtn.addEventListener("click", () => {
    const next = cloneState(view.state);
    next.offset = offset + limit;
    view.onState(next);
  });
  pager.append(prev, label, nextBtn);
  return pager;
}

export function renderTable(doc: Document, view: TableViewModel): HTMLElement {
  const root = el(doc, "div", "table-view");
  root.appendChild(renderFilterChips(doc, view));
  root.appendChild(renderFilterForm(doc, view));
  root.appendChild(renderChartControls(doc, view));
  if (view.group !== null) {
    const chartWrap = el(doc, "div", "chart-wrap");
    chartWrap.appendChild(
      el(doc, "h3", "chart-title",
         `${view.group.total} rows grouped by ${view.group.column}`));
    chartWrap.appendChild(barChart(doc, view.group));
    root.appendChild(chartWrap);
  }
  root.appendChild(renderDataTable(doc, view));
  root.appendChild(renderPager(doc, view));
  return root;
}

// --- record picker ---------------------------------------------------------

export function renderRecordPicker(
  doc: Document,
  records: RecordsPayload,
  current: string | null,
  onRecord: (record: string | null) => void,
): HTMLElement {
  const wrap = el(doc, "div", "controls record-picker");
  const label = el(doc, "label", undefined, "Record ");
  const select = el(doc, "select", "record-select");
  const all = el(doc, "option", undefined, "(all records)");
  all.value = "";
  select.appendChild(all);
  for (const record of records.records) {
    const option = el(doc, "option", undefined, record.id);
    option.value = record.id;
    select.appendChild(option);
  }
  select.value = current ?? "";
  select.addEventListener("change", () => {
    onRecord(select.value === "" ? null : select.value);
  });
  label.appendChild(select);
  wrap.appendChild(label);
  if (current !== null) {
    const entry = records.records.find((r) => r.id === current);
    if (entry) {
      const a = link(doc, entry.url, "view transcript", "transcript-link");
      a.target = "_blank";
      a.rel = "noopener";
      wrap.appendChild(a);
    }
  }
  return wrap;
}

// --- entity detail -----------------------------------------------------------

export interface EntityViewModel {
  payload: EntityPayload;
  /** Route for an entity key inside a connection's target category. */
  connectionRoute: (target: string, key: string) => ViewRoute | null;
  backRoute: ViewRoute;
  backLabel: string;
}

function simpleTable(
  doc: Document,
  columns: ColumnDesc[],
  rows: { key: string; cells: string[]; provenance: string[] }[],
  entityRoute: ((key: string) => ViewRoute | null) | null,
): HTMLElement {
  const wrap = el(doc, "div", "table-wrap");
  const table = el(doc, "table", "grid");
  const head = el(doc, "thead");
  const headRow = el(doc, "tr");
  for (const column of columns) {
    headRow.appendChild(el(doc, "th", "col-head", column.name));
  }
  headRow.appendChild(el(doc, "th", "meta-head", "records"));
  head.appendChild(headRow);
  table.appendChild(head);
  const body = el(doc, "tbody");
  for (const row of rows) {
    const tr = el(doc, "tr");
    row.cells.forEach((cell, i) => {
      const td = el(doc, "td");
      const route = i === 0 && entityRoute ? entityRoute(row.key) : null;
      if (route !== null) {
        td.appendChild(routeLink(doc, route, cell, "entity-link"));
      } else {
        td.textContent = cell;
      }
      tr.appendChild(td);
    });
    tr.appendChild(el(doc, "td", "meta-cell", row.provenance.join(", ")));
    body.appendChild(tr);
  }
  table.appendChild(body);
  wrap.appendChild(table);
  return wrap;
}

export function renderEntity(doc: Document, model: EntityViewModel): HTMLElement {
  const payload = model.payload;
  const root = el(doc, "div", "entity-view");
  root.appendChild(
    routeLink(doc, model.backRoute, `← ${model.backLabel}`, "back-link"));
  root.appendChild(
    el(doc, "h2", "entity-title", payload.identity.join(" · ")));

  root.appendChild(el(doc, "h3", "section-title", "Rows"));
  root.appendChild(simpleTable(doc, payload.columns, payload.rows, null));

  root.appendChild(el(doc, "h3", "section-title", "Records"));
  const records = el(doc, "ul", "record-list");
  for (const record of payload.records) {
    const item = el(doc, "li", undefined, `${record.source} / `);
    const a = link(doc, record.url, record.record_id, "transcript-link");
    a.target = "_blank";
    a.rel = "noopener";
    item.appendChild(a);
    records.appendChild(item);
  }
  root.appendChild(records);

  for (const connection of payload.connections) {
    root.appendChild(
      el(doc, "h3", "section-title",
         `${connection.label} (${connection.total})`));
    root.appendChild(
      simpleTable(doc, connection.columns, connection.rows,
                  (key) => model.connectionRoute(connection.target, key)));
  }
  return root;
}

export function renderEntitySources(
  doc: Document,
  payload: EntitySourcesPayload,
): HTMLElement {
  const root = el(doc, "div", "entity-sources");
  root.appendChild(el(doc, "h3", "section-title", "Appears in"));
  const list = el(doc, "ul", "source-list");
  for (const entry of payload.sources) {
    const item = el(doc, "li");
    const route = entityApiPathToRoute(entry.path);
    const text = `${entry.name} — ${entry.category} (${entry.rows} ` +
      `row${entry.rows === 1 ? "" : "s"})`;
    if (route !== null) {
      item.appendChild(routeLink(doc, route, text, "entity-link"));
    } else {
      item.textContent = text;
    }
    list.appendChild(item);
  }
  root.appendChild(list);
  return root;
}

// --- errors -------------------------------------------------------------------

export function renderError(
  doc: Document,
  error: unknown,
  retry: (() => void) | null,
): HTMLElement {
  const box = el(doc, "div", "error");
  const code = error instanceof ApiError ? error.code : "error";
  const message = error instanceof Error ? error.message : String(error);
  box.appendChild(el(doc, "p", "error-code", code));
  box.appendChild(el(doc, "p", "error-message", message));
  if (retry !== null) {
    const button = el(doc, "button", "retry", "Try again");
    button.type = "button";
    button.addEventListener("click", retry);
    box.appendChild(button);
  }
  return box;
}
