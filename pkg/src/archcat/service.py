"""HTTP interface: a thin FastAPI layer over the engine's payload builders.

Handlers parse request parameters, call into :mod:`archcat.engine`, and
return the dicts unchanged, so API responses and CLI output share one
source of truth.  Errors surface as ``{"error": {"code", "message", ...}}``
with a status derived from the code.

Entity keys are JSON arrays of the identity column values and travel
percent-encoded in the URL path.  Because a percent-encoded slash inside a
path segment is indistinguishable from a path separator once the server
decodes it, every entity endpoint also has a twin that takes the key as a
``?key=`` query parameter; clients should use the query form whenever a
key may contain ``/``.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import engine as eng
from .engine import Engine
from .errors import RequestError

STATUS_BY_CODE = {
    "not_found": 404,
    "admin_disabled": 403,
    "reload_failed": 409,
}

CSV_MEDIA_TYPE = "text/csv; charset=utf-8"


def create_app(engine: Engine, *, admin_enabled: bool = True,
               ui_dir: str | Path | None = None) -> FastAPI:
    """Build the application around an already-loaded engine."""
    engine.state  # refuse to construct an app with nothing to serve

    app = FastAPI(title="archcat", docs_url=None, redoc_url=None,
                  openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestError)
    async def _request_error(request: Request, exc: RequestError):
        return JSONResponse(
            status_code=STATUS_BY_CODE.get(exc.code, 400),
            content={"error": exc.payload()},
        )

    def _query(scope, record, filters, sort, direction, offset="0", limit=None):
        offset, limit = eng.parse_page(offset, limit)
        return eng.TableQuery(
            scope=scope,
            record_id=record,
            filters=eng.parse_filters(filters),
            sort=eng.parse_sort(sort, direction),
            offset=offset,
            limit=limit,
        )

    def _csv_response(data: bytes, filename: str) -> Response:
        return Response(
            content=data,
            media_type=CSV_MEDIA_TYPE,
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    # --- overview ---------------------------------------------------------

    @app.get("/api/health")
    def health():
        return eng.health_payload(engine.state)

    @app.get("/api/validation")
    def validation():
        return eng.validation_payload(engine.state.report)

    @app.get("/api/templates")
    def templates():
        return eng.templates_payload(engine.state)

    @app.get("/api/all/categories")
    def all_categories():
        return eng.globals_payload(engine.state)

    # --- records ----------------------------------------------------------

    @app.get("/api/sources/{source}/records")
    def records(source: str):
        return eng.records_payload(engine.state, source)

    @app.get("/api/sources/{source}/categories")
    def source_categories(source: str, record: str | None = None):
        return eng.categories_payload(engine.state, source, record)

    @app.get("/api/records/{source}/{record_id}")
    def record(source: str, record_id: str):
        # The transcript exactly as transcribed -- researchers cite these.
        return Response(content=eng.record_bytes(engine.state, source, record_id),
                        media_type="application/json")

    # --- source-scope tables ------------------------------------------------

    @app.get("/api/sources/{source}/categories/{category}/rows")
    def source_rows(source: str, category: str, record: str | None = None,
                    filters: str | None = None, sort: str | None = None,
                    dir: str | None = None, offset: str = "0",
                    limit: str | None = None):
        query = _query(("source", source, category), record, filters, sort,
                       dir, offset, limit)
        return eng.table_payload(engine.state, query)

    @app.get("/api/sources/{source}/categories/{category}/groupby")
    def source_groupby(source: str, category: str, column: str | None = None,
                       record: str | None = None, filters: str | None = None):
        if column is None:
            raise RequestError("bad_group", "column parameter is required")
        query = _query(("source", source, category), record, filters, None, None)
        return eng.groupby_payload(engine.state, query, column)

    @app.get("/api/sources/{source}/categories/{category}/rows/export.csv")
    def source_export(source: str, category: str, record: str | None = None,
                      filters: str | None = None, sort: str | None = None,
                      dir: str | None = None):
        query = _query(("source", source, category), record, filters, sort, dir)
        return _csv_response(
            eng.table_csv_bytes(engine.state, query), "export.csv")

    @app.get("/api/sources/{source}/categories/{category}/groupby/export.csv")
    def source_groupby_export(source: str, category: str,
                              column: str | None = None,
                              record: str | None = None,
                              filters: str | None = None):
        if column is None:
            raise RequestError("bad_group", "column parameter is required")
        query = _query(("source", source, category), record, filters, None, None)
        return _csv_response(
            eng.groupby_csv_bytes(engine.state, query, column), "groupby.csv")

    # --- cross-source tables --------------------------------------------------

    @app.get("/api/all/categories/{category}/rows")
    def global_rows(category: str, filters: str | None = None,
                    sort: str | None = None, dir: str | None = None,
                    offset: str = "0", limit: str | None = None):
        query = _query(("global", None, category), None, filters, sort, dir,
                       offset, limit)
        return eng.table_payload(engine.state, query)

    @app.get("/api/all/categories/{category}/groupby")
    def global_groupby(category: str, column: str | None = None,
                       filters: str | None = None):
        if column is None:
            raise RequestError("bad_group", "column parameter is required")
        query = _query(("global", None, category), None, filters, None, None)
        return eng.groupby_payload(engine.state, query, column)

    @app.get("/api/all/categories/{category}/rows/export.csv")
    def global_export(category: str, filters: str | None = None,
                      sort: str | None = None, dir: str | None = None):
        query = _query(("global", None, category), None, filters, sort, dir)
        return _csv_response(
            eng.table_csv_bytes(engine.state, query), "export.csv")

    @app.get("/api/all/categories/{category}/groupby/export.csv")
    def global_groupby_export(category: str, column: str | None = None,
                              filters: str | None = None):
        if column is None:
            raise RequestError("bad_group", "column parameter is required")
        query = _query(("global", None, category), None, filters, None, None)
        return _csv_response(
            eng.groupby_csv_bytes(engine.state, query, column), "groupby.csv")

    # --- entities ---------------------------------------------------------

    def _entity(scope, key):
        if key is None:
            raise RequestError("bad_request", "entity key is required")
        return eng.entity_payload(engine.state, scope, key)

    @app.get("/api/sources/{source}/categories/{category}/entity")
    def source_entity_q(source: str, category: str, key: str | None = None):
        return _entity(("source", source, category), key)

    @app.get("/api/sources/{source}/categories/{category}/entities/{key}")
    def source_entity(source: str, category: str, key: str):
        return _entity(("source", source, category), key)

    @app.get("/api/all/categories/{category}/entity")
    def global_entity_q(category: str, key: str | None = None):
        return _entity(("global", None, category), key)

    @app.get("/api/all/categories/{category}/entities/{key}")
    def global_entity(category: str, key: str):
        return _entity(("global", None, category), key)

    def _entity_sources(category, key):
        if key is None:
            raise RequestError("bad_request", "entity key is required")
        return eng.entity_sources_payload(engine.state, category, key)

    @app.get("/api/all/categories/{category}/entity/sources")
    def global_entity_sources_q(category: str, key: str | None = None):
        return _entity_sources(category, key)

    @app.get("/api/all/categories/{category}/entities/{key}/sources")
    def global_entity_sources(category: str, key: str):
        return _entity_sources(category, key)

    # --- connection tables --------------------------------------------------

    def _connection(source, category, key, label, filters, sort, direction,
                    offset, limit):
        if key is None:
            raise RequestError("bad_request", "entity key is required")
        offset, limit = eng.parse_page(offset, limit)
        return eng.connection_payload(
            engine.state, source, category, key, label,
            filters=eng.parse_filters(filters),
            sort=eng.parse_sort(sort, direction),
            offset=offset, limit=limit)

    @app.get("/api/sources/{source}/categories/{category}/entity/connections/{label}/rows")
    def connection_rows_q(source: str, category: str, label: str,
                          key: str | None = None, filters: str | None = None,
                          sort: str | None = None, dir: str | None = None,
                          offset: str = "0", limit: str | None = None):
        return _connection(source, category, key, label, filters, sort, dir,
                           offset, limit)

    @app.get("/api/sources/{source}/categories/{category}/entities/{key}/connections/{label}/rows")
    def connection_rows_path(source: str, category: str, key: str, label: str,
                             filters: str | None = None,
                             sort: str | None = None, dir: str | None = None,
                             offset: str = "0", limit: str | None = None):
        return _connection(source, category, key, label, filters, sort, dir,
                           offset, limit)

    def _connection_groupby(source, category, key, label, column, filters):
        if key is None:
            raise RequestError("bad_request", "entity key is required")
        if column is None:
            raise RequestError("bad_group", "column parameter is required")
        return eng.connection_groupby_payload(
            engine.state, source, category, key, label, column,
            filters=eng.parse_filters(filters))

    @app.get("/api/sources/{source}/categories/{category}/entity/connections/{label}/groupby")
    def connection_groupby_q(source: str, category: str, label: str,
                             key: str | None = None, column: str | None = None,
                             filters: str | None = None):
        return _connection_groupby(source, category, key, label, column, filters)

    @app.get("/api/sources/{source}/categories/{category}/entities/{key}/connections/{label}/groupby")
    def connection_groupby_path(source: str, category: str, key: str,
                                label: str, column: str | None = None,
                                filters: str | None = None):
        return _connection_groupby(source, category, key, label, column, filters)

    def _connection_export(source, category, key, label, filters, sort,
                           direction):
        if key is None:
            raise RequestError("bad_request", "entity key is required")
        data = eng.connection_csv_bytes(
            engine.state, source, category, key, label,
            filters=eng.parse_filters(filters),
            sort=eng.parse_sort(sort, direction))
        return _csv_response(data, "export.csv")

    @app.get("/api/sources/{source}/categories/{category}/entity/connections/{label}/rows/export.csv")
    def connection_export_q(source: str, category: str, label: str,
                            key: str | None = None, filters: str | None = None,
                            sort: str | None = None, dir: str | None = None):
        return _connection_export(source, category, key, label, filters, sort, dir)

    @app.get("/api/sources/{source}/categories/{category}/entities/{key}/connections/{label}/rows/export.csv")
    def connection_export_path(source: str, category: str, key: str, label: str,
                               filters: str | None = None,
                               sort: str | None = None, dir: str | None = None):
        return _connection_export(source, category, key, label, filters, sort, dir)

    # --- admin --------------------------------------------------------------

    @app.post("/api/admin/reload")
    def reload():
        if not admin_enabled:
            raise RequestError(
                "admin_disabled", "reload is disabled on this server")
        state = engine.reload()
        return {
            "reloaded": True,
            "generation": state.generation,
            "validation": eng.validation_payload(state.report),
        }

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True),
                  name="ui")

    return app
