/** Payload shapes of the catalogue service's JSON API. */

export type ValueKind = "text" | "integer" | "decimal" | "date";

export interface ColumnDesc {
  name: string;
  kind: ValueKind;
}

export interface FilterSpec {
  column: string;
  op: string;
  value: string;
  value2?: string;
}

export type ScopePayload =
  | { kind: "source"; source: string; category: string }
  | { kind: "global"; category: string };

export interface QueryEcho {
  record: string | null;
  filters: FilterSpec[];
  sort: string | null;
  dir: string | null;
}

export interface RowPayload {
  key: string;
  source: string;
  category: string;
  cells: string[];
  provenance: string[];
}

export interface TablePayload {
  scope: ScopePayload;
  query: QueryEcho;
  columns: ColumnDesc[];
  rows: RowPayload[];
  total: number;
  offset: number;
  limit: number;
}

export interface BucketPayload {
  label: string;
  count: number;
}

export interface GroupPayload {
  scope: ScopePayload;
  query: QueryEcho;
  column: string;
  buckets: BucketPayload[];
  total: number;
}

export interface SourceEntry {
  id: string;
  name: string;
  description: string;
  record_count: number;
  categories: { name: string; rows: number }[];
}

export interface TemplatesPayload {
  groups: { label: string; sources: SourceEntry[] }[];
}

export interface GlobalsPayload {
  groups: {
    label: string;
    categories: { name: string; rows: number; sources: string[] }[];
  }[];
}

export interface RecordsPayload {
  source: string;
  records: { id: string; url: string }[];
}

export interface CategoriesPayload {
  source: string;
  record: string | null;
  categories: { name: string; rows: number }[];
}

export interface ConnectionPayload {
  label: string;
  target: string;
  join: string;
  columns: ColumnDesc[];
  rows: RowPayload[];
  total: number;
}

export interface EntityPayload {
  scope: ScopePayload;
  key: string;
  identity: string[];
  columns: ColumnDesc[];
  rows: RowPayload[];
  connections: ConnectionPayload[];
  records: { source: string; record_id: string; url: string }[];
}

export interface EntitySourcesPayload {
  category: string;
  key: string;
  sources: {
    source: string;
    name: string;
    category: string;
    rows: number;
    path: string;
  }[];
}

export interface HealthPayload {
  status: string;
  generation: number;
  sources: number;
  records: number;
  rows: number;
  warnings: number;
}

export interface ApiErrorPayload {
  code: string;
  message: string;
  detail?: unknown;
}
