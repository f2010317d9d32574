"""Infobox table data model, cell text sanitization, and linearization.

A table is an ordered list of cells.  A cell is either a group heading
(a one-column row, e.g. "Highest point") or a header/value pair (the two
cells of a two-column row).  Tables render to a single string with " | "
between a header and its value and " <> " between rows, and that string
parses back to the identical table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Union

ROW_SEP = " <> "
COL_SEP = " | "

GROUP = "group"
HEADER = "header"
VALUE = "value"
CELL_TYPES = (HEADER, GROUP, VALUE)

ParseMode = Literal["strict", "lenient"]


class TableParseError(ValueError):
    """Raised when a linearized string cannot be parsed back into a table."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


def sanitize_text(raw: str) -> str:
    """Normalize raw cell text so the linearized format stays invertible.

    Replaces every "|" with "/", deletes every "<>" (repeatedly, so none
    can survive), collapses whitespace runs to single spaces, and trims.
    Total function; may return "" (callers reject empty cells).
    """
    s = raw.replace("|", "/")
    while "<>" in s:
        s = s.replace("<>", "")
    return " ".join(s.split())


def _require_sanitized(field: str, text: str) -> None:
    if not text:
        raise ValueError(f"{field} must be non-empty")
    if text != sanitize_text(text):
        raise ValueError(f"{field} is not sanitized: {text!r}")


@dataclass(frozen=True)
class GroupCell:
    """A one-column row acting as a section heading."""

    text: str

    def __post_init__(self):
        _require_sanitized("group text", self.text)


@dataclass(frozen=True)
class PairCell:
    """A two-column row: a header and its value."""

    header: str
    value: str

    def __post_init__(self):
        _require_sanitized("pair header", self.header)
        _require_sanitized("pair value", self.value)


Cell = Union[GroupCell, PairCell]


@dataclass(frozen=True)
class InfoboxTable:
    """An ordered, non-empty sequence of cells."""

    cells: tuple[Cell, ...]

    def __init__(self, cells: Iterable[Cell]):
        object.__setattr__(self, "cells", tuple(cells))
        if not self.cells:
            raise ValueError("table must contain at least one cell")
        for cell in self.cells:
            if not isinstance(cell, (GroupCell, PairCell)):
                raise TypeError(f"not a cell: {cell!r}")


@dataclass(frozen=True)
class TypedElement:
    """One scoreable element: a group name, a header, or a (header, value) pair."""

    cell_type: str
    key: str | tuple[str, str]

    def __post_init__(self):
        if self.cell_type not in CELL_TYPES:
            raise ValueError(f"unknown cell type: {self.cell_type!r}")


def linearize(table: InfoboxTable) -> str:
    """Render a table as a single string, rows joined by " <> "."""
    parts = []
    for cell in table.cells:
        if isinstance(cell, GroupCell):
            parts.append(cell.text)
        else:
            parts.append(f"{cell.header}{COL_SEP}{cell.value}")
    return ROW_SEP.join(parts)


def delinearize(s: str, mode: ParseMode = "strict") -> InfoboxTable:
    """Parse a linearized string back into a table.

    Strict mode round-trips linearize() exactly and raises TableParseError
    (with the offending row index) on rows that are not one or two fields
    or that contain an empty field.  Lenient mode, meant for raw model
    output, drops empty fields and folds rows with three or more fields
    into a pair whose value is the re-joined tail.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown parse mode: {mode!r}")
    cells: list[Cell] = []
    for i, row in enumerate(s.split("<>")):
        fields = [sanitize_text(f) for f in row.split("|")]
        if mode == "strict":
            if any(not f for f in fields):
                raise TableParseError("empty field", row=i)
            if len(fields) == 1:
                cells.append(GroupCell(fields[0]))
            elif len(fields) == 2:
                cells.append(PairCell(fields[0], fields[1]))
            else:
                raise TableParseError(f"{len(fields)} fields", row=i)
        else:
            fields = [f for f in fields if f]
            if not fields:
                continue
            if len(fields) == 1:
                cells.append(GroupCell(fields[0]))
            else:
                cells.append(PairCell(fields[0], sanitize_text(" / ".join(fields[1:]))))
    if not cells:
        raise TableParseError("empty table")
    return InfoboxTable(cells)


def typed_elements(table: InfoboxTable) -> list[TypedElement]:
    """Split a table's cells into typed elements.

    A group cell yields one group element; a pair cell yields one header
    element (the header string) and one value element (the pair), so a
    table with g groups and p pairs yields g + 2p elements, in cell order.
    """
    elements: list[TypedElement] = []
    for cell in table.cells:
        if isinstance(cell, GroupCell):
            elements.append(TypedElement(GROUP, cell.text))
        else:
            elements.append(TypedElement(HEADER, cell.header))
            elements.append(TypedElement(VALUE, (cell.header, cell.value)))
    return elements
