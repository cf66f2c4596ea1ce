"""Path expressions that locate entity data inside a transcript tree.

The language is deliberately tiny: dot-separated field names, where a
segment suffixed with ``[]`` names an array whose elements are each
visited.  No wildcards, indices or filters -- evaluation is therefore
unambiguous and every match can be addressed by a JSON-pointer locator.

    ship.name          -> the ship's name
    crew[].residence   -> the residence of every crew member
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .errors import PathSyntaxError

# Characters with structural meaning; they cannot appear in field names.
_RESERVED = {".", "[", "]"}


@dataclass(frozen=True)
class PathExpr:
    """A parsed path: ordered (field_name, iterate) segments."""

    segments: tuple[tuple[str, bool], ...]

    def render(self) -> str:
        return ".".join(name + ("[]" if it else "") for name, it in self.segments)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.render()


def parse_path(text: str) -> PathExpr:
    """Parse the textual form; raises PathSyntaxError naming the offset."""
    if not text:
        raise PathSyntaxError("empty path", 0)
    segments: list[tuple[str, bool]] = []
    i = 0
    n = len(text)
    while True:
        start = i
        while i < n and text[i] not in _RESERVED:
            i += 1
        name = text[start:i]
        if not name:
            raise PathSyntaxError("empty segment", start)
        iterate = False
        if i < n and text[i] == "[":
            if i + 1 < n and text[i + 1] == "]":
                iterate = True
                i += 2
            else:
                raise PathSyntaxError("expected '[]'", i)
        segments.append((name, iterate))
        if i == n:
            break
        if text[i] != ".":
            raise PathSyntaxError(f"stray character {text[i]!r}", i)
        i += 1
        if i == n:
            raise PathSyntaxError("empty segment", i)
    return PathExpr(tuple(segments))


def _escape_pointer(field: str) -> str:
    # RFC 6901 token escaping.
    return field.replace("~", "~0").replace("/", "~1")


def _unescape_pointer(token: str) -> str:
    return token.replace("~1", "/").replace("~0", "~")


def evaluate(node: Any, path: PathExpr, prefix: str = "") -> list[tuple[Any, str]]:
    """Evaluate ``path`` against a JSON value, depth-first.

    Returns (value, locator) pairs in document order.  The locator is a
    JSON-pointer string relative to the original record root; ``prefix``
    carries the pointer of ``node`` when evaluating relative paths.
    Missing fields and nulls yield no results: absence is expected in
    archival material, never an error.
    """
    results: list[tuple[Any, str]] = []
    _walk(node, path.segments, 0, prefix, results)
    return results


def _walk(
    node: Any,
    segments: tuple[tuple[str, bool], ...],
    index: int,
    pointer: str,
    out: list[tuple[Any, str]],
) -> None:
    if index == len(segments):
        out.append((node, pointer))
        return
    if not isinstance(node, dict):
        return
    name, iterate = segments[index]
    if name not in node:
        return
    value = node[name]
    if value is None:
        return
    child = pointer + "/" + _escape_pointer(name)
    if iterate:
        if not isinstance(value, list):
            return
        for i, element in enumerate(value):
            if element is None:
                continue
            _walk(element, segments, index + 1, f"{child}/{i}", out)
    else:
        _walk(value, segments, index + 1, child, out)


def dereference(root: Any, locator: str) -> Any:
    """Resolve a locator produced by :func:`evaluate` against the tree."""
    node = root
    if locator == "":
        return node
    for token in locator.lstrip("/").split("/"):
        if isinstance(node, list):
            node = node[int(token)]
        else:
            node = node[_unescape_pointer(token)]
    return node
