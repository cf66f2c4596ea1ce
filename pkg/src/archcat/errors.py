"""Exception types shared across the engine.

Request-level failures carry a stable machine-readable ``code`` so the HTTP
layer and the CLI can map them without string matching.  The codes are part
of the public contract (see README, "Error codes").
"""

from __future__ import annotations


class ConfigError(ValueError):
    """A configuration file is malformed or internally inconsistent."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(message)
        self.location = location


class PathSyntaxError(ConfigError):
    """A path expression failed to parse; ``offset`` points at the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class CorpusError(ValueError):
    """A transcript file could not be loaded."""

    def __init__(self, message: str, file: str = ""):
        super().__init__(message)
        self.file = file


class RequestError(Exception):
    """A query or API request that cannot be served.

    code is one of: not_found, bad_filter, bad_sort, bad_group, bad_page,
    bad_request, admin_disabled, reload_failed.
    """

    def __init__(self, code: str, message: str, detail: object = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.detail = detail

    def payload(self) -> dict:
        body: dict = {"code": self.code, "message": self.message}
        if self.detail is not None:
            body["detail"] = self.detail
        return body


def not_found(message: str, detail: object = None) -> RequestError:
    return RequestError("not_found", message, detail)
