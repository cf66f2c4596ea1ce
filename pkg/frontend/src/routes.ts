/** Hash-based routing: every view is addressable and shareable as a URL.
 *
 * The scheme mirrors the API's resource layout:
 *
 *   #/                                        source-type overview
 *   #/all                                     cross-source overview
 *   #/source/{id}?category=...&filters=...    one source's table
 *   #/source/{id}/category/{cat}/entity/{key} entity detail
 *   #/all/{cat}?filters=...                   cross-source table
 *   #/all/{cat}/entity/{key}                  cross-source entity detail
 *
 * Path segments are percent-encoded, so keys containing "/", quotes or
 * non-ASCII survive the round trip.  Table controls (filters, sort,
 * paging, chart column) live in the query string.
 */

import { FilterSpec } from "./types.js";

export interface TableState {
  filters: FilterSpec[];
  sort: string | null;
  dir: "asc" | "desc";
  offset: number;
  limit: number;
  chart: string | null;
}

export const DEFAULT_LIMIT = 100;

export function defaultState(): TableState {
  return {
    filters: [],
    sort: null,
    dir: "asc",
    offset: 0,
    limit: DEFAULT_LIMIT,
    chart: null,
  };
}

export type ViewRoute =
  | { view: "home"; tab: "by_source" | "all" }
  | {
      view: "source";
      source: string;
      category: string | null;
      record: string | null;
      state: TableState;
    }
  | { view: "entity"; source: string; category: string; key: string }
  | { view: "global"; category: string; state: TableState }
  | { view: "globalEntity"; category: string; key: string };

function seg(value: string): string {
  return encodeURIComponent(value);
}

function stateParams(params: URLSearchParams, state: TableState): void {
  if (state.filters.length > 0) {
    params.set("filters", JSON.stringify(state.filters));
  }
  if (state.sort !== null) {
    params.set("sort", state.sort);
    if (state.dir === "desc") params.set("dir", "desc");
  }
  if (state.offset !== 0) params.set("offset", String(state.offset));
  if (state.limit !== DEFAULT_LIMIT) params.set("limit", String(state.limit));
  if (state.chart !== null) params.set("chart", state.chart);
}

export function serializeRoute(route: ViewRoute): string {
  switch (route.view) {
    case "home":
      return route.tab === "all" ? "#/all" : "#/";
    case "source": {
      const params = new URLSearchParams();
      if (route.category !== null) params.set("category", route.category);
      if (route.record !== null) params.set("record", route.record);
      stateParams(params, route.state);
      const query = params.toString();
      return `#/source/${seg(route.source)}${query ? "?" + query : ""}`;
    }
    case "entity":
      return (
        `#/source/${seg(route.source)}/category/${seg(route.category)}` +
        `/entity/${seg(route.key)}`
      );
    case "global": {
      const params = new URLSearchParams();
      stateParams(params, route.state);
      const query = params.toString();
      return `#/all/${seg(route.category)}${query ? "?" + query : ""}`;
    }
    case "globalEntity":
      return `#/all/${seg(route.category)}/entity/${seg(route.key)}`;
  }
}

function parseFilters(raw: string | null): FilterSpec[] {
  if (!raw) return [];
  try {
    const parsed = JSON.parse(raw);
    if (!Array.isArray(parsed)) return [];
    const out: FilterSpec[] = [];
    for (const item of parsed) {
      if (
        item &&
        typeof item.column === "string" &&
        typeof item.op === "string" &&
        typeof item.value === "string"
      ) {
        const spec: FilterSpec = {
          column: item.column,
          op: item.op,
          value: item.value,
        };
        if (typeof item.value2 === "string") spec.value2 = item.value2;
        out.push(spec);
      }
    }
    return out;
  } catch {
    return [];
  }
}

function parseState(params: URLSearchParams): TableState {
  const state = defaultState();
  state.filters = parseFilters(params.get("filters"));
  state.sort = params.get("sort");
  state.dir = state.sort !== null && params.get("dir") === "desc"
    ? "desc"
    : "asc";
  const offset = Number.parseInt(params.get("offset") ?? "", 10);
  if (Number.isFinite(offset) && offset >= 0) state.offset = offset;
  const limit = Number.parseInt(params.get("limit") ?? "", 10);
  if (Number.isFinite(limit) && limit > 0) state.limit = limit;
  state.chart = params.get("chart");
  return state;
}

const HOME: ViewRoute = { view: "home", tab: "by_source" };

/** Parse a location hash; anything unrecognisable falls back to home. */
export function parseRoute(hash: string): ViewRoute {
  let raw = hash.startsWith("#") ? hash.slice(1) : hash;
  let query = "";
  const qmark = raw.indexOf("?");
  if (qmark >= 0) {
    query = raw.slice(qmark + 1);
    raw = raw.slice(0, qmark);
  }
  const parts = raw.split("/").filter((p) => p !== "");
  let segs: string[];
  try {
    segs = parts.map((p) => decodeURIComponent(p));
  } catch {
    return HOME;
  }
  const params = new URLSearchParams(query);

  if (segs.length === 0) return HOME;
  if (segs[0] === "all") {
    if (segs.length === 1) return { view: "home", tab: "all" };
    if (segs.length === 2) {
      return { view: "global", category: segs[1], state: parseState(params) };
    }
    if (segs.length === 4 && segs[2] === "entity") {
      return { view: "globalEntity", category: segs[1], key: segs[3] };
    }
    return HOME;
  }
  if (segs[0] === "source" && segs.length >= 2) {
    if (segs.length === 2) {
      return {
        view: "source",
        source: segs[1],
        category: params.get("category"),
        record: params.get("record"),
        state: parseState(params),
      };
    }
    if (segs.length === 6 && segs[2] === "category" && segs[4] === "entity") {
      return {
        view: "entity",
        source: segs[1],
        category: segs[3],
        key: segs[5],
      };
    }
  }
  return HOME;
}

/** Map an entity API path from the cross-source "sources" payload (e.g.
 * "/api/sources/S/categories/C/entities/K") onto the UI route for it. */
export function entityApiPathToRoute(path: string): ViewRoute | null {
  const parts = path.split("/").filter((p) => p !== "");
  let segs: string[];
  try {
    segs = parts.map((p) => decodeURIComponent(p));
  } catch {
    return null;
  }
  if (
    segs.length === 7 &&
    segs[0] === "api" &&
    segs[1] === "sources" &&
    segs[3] === "categories" &&
    segs[5] === "entities"
  ) {
    return { view: "entity", source: segs[2], category: segs[4], key: segs[6] };
  }
  if (
    segs.length === 6 &&
    segs[0] === "api" &&
    segs[1] === "all" &&
    segs[2] === "categories" &&
    segs[4] === "entities"
  ) {
    return { view: "globalEntity", category: segs[3], key: segs[5] };
  }
  return null;
}
