"""Extraction of qualified infobox records from Wikipedia article HTML.

An infobox qualifies when its first row is a single-cell title and its
second row contains an image in jpeg/png/gif format.  Remaining rows are
kept as group cells (one column) or header/value pairs (two columns);
wider rows are dropped, bracketed reference markers are removed, and all
cell text is sanitized.  Pages are independent, so extraction reports
merge by field-wise addition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from html.parser import HTMLParser

from .model import GroupCell, InfoboxTable, PairCell, sanitize_text

IMAGE_FORMATS = ("jpeg", "png", "gif")

REJECTION_REASONS = (
    "no_title_row",
    "no_image_row",
    "bad_image_format",
    "empty_table_after_filter",
    "malformed_html",
)

_REFERENCE_MARKER = re.compile(r"\[#?\d+\]")

_EXTENSION_FORMATS = {
    "jpg": "jpeg",
    "jpeg": "jpeg",
    "jpe": "jpeg",
    "png": "png",
    "gif": "gif",
}


def strip_reference_links(text: str) -> str:
    """Remove bracketed reference markers like "[#1]" or "[12]"."""
    return _REFERENCE_MARKER.sub("", text)


def normalize_caption(title: str, caption: str | None) -> str | None:
    """Join the title onto captions that do not already mention it."""
    if not title:
        raise ValueError("title must be non-empty")
    if caption is None:
        return None
    if title.lower() in caption.lower():
        return caption
    return f"{title} - {caption}"


@dataclass(frozen=True)
class ImageRef:
    url: str
    format: str
    width_px: int | None = None
    height_px: int | None = None

    def __post_init__(self):
        if self.format not in IMAGE_FORMATS:
            raise ValueError(f"unsupported image format: {self.format!r}")
        for dim in (self.width_px, self.height_px):
            if dim is not None and dim < 1:
                raise ValueError("image dimensions must be positive")


@dataclass(frozen=True)
class InfoboxRecord:
    title: str
    image: ImageRef
    caption: str | None
    table: InfoboxTable
    source_page_id: str
    record_id: str

    def __post_init__(self):
        if not self.title:
            raise ValueError("title must be non-empty")
        if self.caption is not None and self.title.lower() not in self.caption.lower():
            raise ValueError("caption must contain the title after normalization")


@dataclass
class ExtractionReport:
    pages_seen: int = 0
    pages_failed: int = 0
    infoboxes_seen: int = 0
    records_emitted: int = 0
    rejected_by_reason: dict[str, int] = field(
        default_factory=lambda: {reason: 0 for reason in REJECTION_REASONS}
    )

    def reject(self, reason: str) -> None:
        if reason not in REJECTION_REASONS:
            raise ValueError(f"unknown rejection reason: {reason!r}")
        self.rejected_by_reason[reason] += 1

    def update(self, other: "ExtractionReport") -> None:
        self.pages_seen += other.pages_seen
        self.pages_failed += other.pages_failed
        self.infoboxes_seen += other.infoboxes_seen
        self.records_emitted += other.records_emitted
        for reason, count in other.rejected_by_reason.items():
            self.rejected_by_reason[reason] = self.rejected_by_reason.get(reason, 0) + count

    def is_conserved(self) -> bool:
        return self.records_emitted + sum(self.rejected_by_reason.values()) == self.infoboxes_seen

    def to_json_dict(self) -> dict:
        return {
            "pages_seen": self.pages_seen,
            "pages_failed": self.pages_failed,
            "infoboxes_seen": self.infoboxes_seen,
            "records_emitted": self.records_emitted,
            "rejected_by_reason": dict(self.rejected_by_reason),
        }


class _Node:
    __slots__ = ("tag", "attrs", "children", "parent")

    def __init__(self, tag: str, attrs: dict[str, str | None], parent: "_Node | None"):
        self.tag = tag
        self.attrs = attrs
        self.children: list[_Node | str] = []
        self.parent = parent


_VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}


class _TreeBuilder(HTMLParser):
    """Minimal, tolerant DOM builder: unmatched end tags are ignored and
    anything left open closes at end of input."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = _Node("#root", {}, None)
        self._stack = [self.root]

    def handle_starttag(self, tag, attrs):
        node = _Node(tag, dict(attrs), self._stack[-1])
        self._stack[-1].children.append(node)
        if tag not in _VOID_TAGS:
            self._stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self._stack[-1].children.append(_Node(tag, dict(attrs), self._stack[-1]))

    def handle_endtag(self, tag):
        for i in range(len(self._stack) - 1, 0, -1):
            if self._stack[i].tag == tag:
                del self._stack[i:]
                return

    def handle_data(self, data):
        if data:
            self._stack[-1].children.append(data)


def _parse_html(html: str) -> _Node:
    builder = _TreeBuilder()
    builder.feed(html)
    builder.close()
    return builder.root


def _walk(node: _Node):
    for child in node.children:
        if isinstance(child, _Node):
            yield child
            yield from _walk(child)


def _text_of(node: _Node) -> str:
    parts: list[str] = []

    def collect(n: _Node):
        for child in n.children:
            if isinstance(child, str):
                parts.append(child)
            else:
                collect(child)

    collect(node)
    return "".join(parts)


def _class_tokens(node: _Node) -> list[str]:
    return (node.attrs.get("class") or "").split()


def _direct_rows(table: _Node) -> list[_Node]:
    """tr elements of this table, not of tables nested inside it."""
    rows: list[_Node] = []

    def scan(n: _Node):
        for child in n.children:
            if not isinstance(child, _Node):
                continue
            if child.tag == "tr":
                rows.append(child)
            elif child.tag != "table":
                scan(child)

    scan(table)
    return rows


def _row_cells(row: _Node) -> list[_Node]:
    """td/th elements of this row, not of tables nested inside its cells."""
    cells: list[_Node] = []

    def scan(n: _Node):
        for child in n.children:
            if not isinstance(child, _Node):
                continue
            if child.tag in ("td", "th"):
                cells.append(child)
            elif child.tag != "table":
                scan(child)

    scan(row)
    return cells


def _colspan(cell: _Node) -> int:
    raw = cell.attrs.get("colspan")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _cell_text(cell: _Node) -> str:
    return sanitize_text(strip_reference_links(_text_of(cell)))


def _first_image(row: _Node) -> ImageRef | None:
    for node in _walk(row):
        if node.tag != "img":
            continue
        src = node.attrs.get("src")
        if not src:
            continue
        path = src.split("?", 1)[0].split("#", 1)[0]
        ext = path.rsplit(".", 1)[-1].lower() if "." in path else ""
        fmt = _EXTENSION_FORMATS.get(ext)
        if fmt is None:
            # first usable src decides; a wrong format is a rejection, not a skip
            return None
        return ImageRef(src, fmt, _int_attr(node, "width"), _int_attr(node, "height"))
    return None


def _row_has_image(row: _Node) -> bool:
    return any(n.tag == "img" and n.attrs.get("src") for n in _walk(row))


def _int_attr(node: _Node, name: str) -> int | None:
    raw = node.attrs.get(name)
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value >= 1 else None


def _qualify_infobox(table: _Node, page_id: str, ordinal: int) -> tuple[InfoboxRecord | None, str | None]:
    """Turn one infobox table into a record, or name the rejection reason."""
    rows = _direct_rows(table)

    if not rows:
        return None, "no_title_row"
    title_cells = _row_cells(rows[0])
    if len(title_cells) != 1:
        return None, "no_title_row"
    title = _cell_text(title_cells[0])
    if not title:
        return None, "no_title_row"

    if len(rows) < 2 or not _row_has_image(rows[1]):
        return None, "no_image_row"
    image = _first_image(rows[1])
    if image is None:
        return None, "bad_image_format"
    caption = _cell_text(rows[1]) or None
    caption = normalize_caption(title, caption)

    cells = []
    for row in rows[2:]:
        row_cells = _row_cells(row)
        if not row_cells:
            continue
        width = sum(_colspan(c) for c in row_cells)
        if width > 2:
            continue
        texts = [_cell_text(c) for c in row_cells]
        if any(not t for t in texts):
            continue
        if len(texts) == 1:
            cells.append(GroupCell(texts[0]))
        elif len(texts) == 2:
            cells.append(PairCell(texts[0], texts[1]))
    if not cells:
        return None, "empty_table_after_filter"

    record = InfoboxRecord(
        title=title,
        image=image,
        caption=caption,
        table=InfoboxTable(cells),
        source_page_id=page_id,
        record_id=f"{page_id}#{ordinal}",
    )
    return record, None


def extract_infoboxes(html_page: str, page_id: str) -> tuple[list[InfoboxRecord], ExtractionReport]:
    """Extract every qualifying infobox from one article's HTML.

    Never raises on bad markup: a failing infobox is counted as a
    malformed_html rejection and a page that cannot be parsed at all is
    counted in pages_failed.
    """
    report = ExtractionReport(pages_seen=1)
    records: list[InfoboxRecord] = []
    try:
        root = _parse_html(html_page)
    except Exception:
        report.pages_failed += 1
        return records, report
    infoboxes = [n for n in _walk(root) if n.tag == "table" and "infobox" in _class_tokens(n)]
    for ordinal, table in enumerate(infoboxes):
        report.infoboxes_seen += 1
        try:
            record, reason = _qualify_infobox(table, page_id, ordinal)
        except Exception:
            record, reason = None, "malformed_html"
        if record is not None:
            records.append(record)
            report.records_emitted += 1
        else:
            report.reject(reason)
    return records, report
