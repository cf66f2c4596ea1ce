/** Typed client for the catalogue service's JSON API.
 *
 * Entity lookups always go through the ``?key=`` twin endpoints: keys are
 * JSON arrays and may contain ``/``, which a path segment cannot carry
 * reliably through proxies that decode before routing.
 */

import {
  CategoriesPayload,
  EntityPayload,
  EntitySourcesPayload,
  FilterSpec,
  GlobalsPayload,
  GroupPayload,
  HealthPayload,
  RecordsPayload,
  TablePayload,
  TemplatesPayload,
} from "./types.js";
import { TableState } from "./routes.js";

export class ApiError extends Error {
  code: string;
  status: number;
  detail: unknown;

  constructor(code: string, message: string, status: number, detail?: unknown) {
    super(message);
    this.code = code;
    this.status = status;
    this.detail = detail;
  }
}

export interface TableScopeRef {
  kind: "source" | "global";
  source?: string;
  category: string;
}

function scopeBase(scope: TableScopeRef): string {
  if (scope.kind === "source") {
    return (
      `/api/sources/${encodeURIComponent(scope.source ?? "")}` +
      `/categories/${encodeURIComponent(scope.category)}`
    );
  }
  return `/api/all/categories/${encodeURIComponent(scope.category)}`;
}

function queryParams(
  filters: FilterSpec[],
  sort: string | null,
  dir: "asc" | "desc",
  record: string | null,
): URLSearchParams {
  const params = new URLSearchParams();
  if (record !== null) params.set("record", record);
  if (filters.length > 0) params.set("filters", JSON.stringify(filters));
  if (sort !== null) {
    params.set("sort", sort);
    params.set("dir", dir);
  }
  return params;
}

type FetchLike = (url: string) => Promise<Response>;

export class Client {
  base: string;
  private fetcher: FetchLike;

  constructor(base = "", fetcher?: FetchLike) {
    this.base = base.replace(/\/+$/, "");
    this.fetcher = fetcher ?? ((url) => fetch(url));
  }

  private async getJson<T>(path: string): Promise<T> {
    let response: Response;
    try {
      response = await this.fetcher(this.base + path);
    } catch (err) {
      throw new ApiError("network", String(err), 0);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // fall through: non-JSON body handled below
    }
    if (!response.ok) {
      const envelope = body as { error?: { code?: string; message?: string; detail?: unknown } } | null;
      const err = envelope && envelope.error ? envelope.error : {};
      throw new ApiError(
        err.code ?? "http_error",
        err.message ?? `request failed with status ${response.status}`,
        response.status,
        err.detail,
      );
    }
    return body as T;
  }

  health(): Promise<HealthPayload> {
    return this.getJson("/api/health");
  }

  templates(): Promise<TemplatesPayload> {
    return this.getJson("/api/templates");
  }

  globals(): Promise<GlobalsPayload> {
    return this.getJson("/api/all/categories");
  }

  records(source: string): Promise<RecordsPayload> {
    return this.getJson(`/api/sources/${encodeURIComponent(source)}/records`);
  }

  categories(source: string, record: string | null): Promise<CategoriesPayload> {
    const params = new URLSearchParams();
    if (record !== null) params.set("record", record);
    const query = params.toString();
    return this.getJson(
      `/api/sources/${encodeURIComponent(source)}/categories` +
        (query ? "?" + query : ""),
    );
  }

  rows(
    scope: TableScopeRef,
    state: TableState,
    record: string | null,
  ): Promise<TablePayload> {
    const params = queryParams(state.filters, state.sort, state.dir, record);
    params.set("offset", String(state.offset));
    params.set("limit", String(state.limit));
    return this.getJson(`${scopeBase(scope)}/rows?${params.toString()}`);
  }

  groupby(
    scope: TableScopeRef,
    column: string,
    filters: FilterSpec[],
    record: string | null,
  ): Promise<GroupPayload> {
    const params = queryParams(filters, null, "asc", record);
    params.set("column", column);
    return this.getJson(`${scopeBase(scope)}/groupby?${params.toString()}`);
  }

  entity(scope: TableScopeRef, key: string): Promise<EntityPayload> {
    const params = new URLSearchParams();
    params.set("key", key);
    return this.getJson(`${scopeBase(scope)}/entity?${params.toString()}`);
  }

  entitySources(category: string, key: string): Promise<EntitySourcesPayload> {
    const params = new URLSearchParams();
    params.set("key", key);
    return this.getJson(
      `/api/all/categories/${encodeURIComponent(category)}` +
        `/entity/sources?${params.toString()}`,
    );
  }

  /** URL for a CSV export of the current table view (unpaged). */
  csvUrl(scope: TableScopeRef, state: TableState, record: string | null): string {
    const params = queryParams(state.filters, state.sort, state.dir, record);
    const query = params.toString();
    return (
      this.base + `${scopeBase(scope)}/rows/export.csv` + (query ? "?" + query : "")
    );
  }

  /** URL for a CSV export of the current grouping. */
  groupCsvUrl(
    scope: TableScopeRef,
    column: string,
    filters: FilterSpec[],
    record: string | null,
  ): string {
    const params = queryParams(filters, null, "asc", record);
    params.set("column", column);
    return this.base + `${scopeBase(scope)}/groupby/export.csv?` + params.toString();
  }
}
