"""Serialization of records into task-ready JSON Lines, prompt rendering,
and image-preprocessing geometry.

The table task keeps every record; the image task keeps only records with
a caption.  One file per split, records in title-sorted order, plus a
prompts file ({"id", "prompt", "target"}) and a geometry sidecar for
records whose image dimensions are known.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .extract import ImageRef, InfoboxRecord
from .model import GroupCell, InfoboxTable, PairCell, linearize
from .split import SPLITS, assign_split

TASKS = ("table", "image")
GEOMETRY_CAPS = (256, 384, 480)

PROMPT_TABLE_FROM_TITLE = "table_from_title"
PROMPT_TABLE_FROM_IMAGE = "table_from_image"
PROMPT_IMAGE = "image"


@dataclass(frozen=True)
class CropGeometry:
    """Scaled dimensions and the center-crop square for image generation."""

    scaled_w: int
    scaled_h: int
    crop_x: int
    crop_y: int
    crop_side: int

    def __post_init__(self):
        if self.scaled_w < 1 or self.scaled_h < 1 or self.crop_side < 1:
            raise ValueError("dimensions must be positive")
        if self.crop_x < 0 or self.crop_y < 0:
            raise ValueError("crop offsets must be non-negative")
        if self.crop_x + self.crop_side > self.scaled_w or self.crop_y + self.crop_side > self.scaled_h:
            raise ValueError("crop box must lie inside the scaled image")


@dataclass(frozen=True)
class PromptedExample:
    id: str
    prompt: str
    target: str
    split: str


def _scale_round_half_up(side: int, short: int, target: int) -> int:
    # floor(side*target/short + 1/2) in exact integer arithmetic
    return (2 * side * target + short) // (2 * short)


def image_gen_geometry(w: int, h: int) -> CropGeometry:
    """Short side to exactly 256px keeping aspect ratio, then a centered
    256px square crop (offset 0 on the short axis)."""
    if w < 1 or h < 1:
        raise ValueError("dimensions must be positive")
    short = min(w, h)
    scaled_w = 256 if w == short else _scale_round_half_up(w, short, 256)
    scaled_h = 256 if h == short else _scale_round_half_up(h, short, 256)
    return CropGeometry(
        scaled_w=scaled_w,
        scaled_h=scaled_h,
        crop_x=(scaled_w - 256) // 2,
        crop_y=(scaled_h - 256) // 2,
        crop_side=256,
    )


def table_gen_geometry(w: int, h: int, cap: int) -> tuple[int, int]:
    """Shrink so the short side is at most `cap` px; never upscales."""
    if cap not in GEOMETRY_CAPS:
        raise ValueError(f"cap must be one of {GEOMETRY_CAPS}, got {cap}")
    if w < 1 or h < 1:
        raise ValueError("dimensions must be positive")
    short = min(w, h)
    if short <= cap:
        return (w, h)
    return (
        cap if w == short else _scale_round_half_up(w, short, cap),
        cap if h == short else _scale_round_half_up(h, short, cap),
    )


def format_table_prompt(title: str | None, has_image: bool) -> str:
    if title:
        return f'What is the infobox of " {title} "?'
    if has_image:
        return "What is the infobox of the image?"
    raise ValueError("need a title or an image to prompt for a table")


def format_image_prompt(caption: str, table: InfoboxTable | None = None) -> str:
    if not caption:
        raise ValueError("caption must be non-empty")
    prompt = f"What is the complete image? Caption: {caption}"
    if table is not None:
        prompt += f" <> {linearize(table)}"
    return prompt


_TITLE_PROMPT = re.compile(r'^What is the infobox of " (.*) "\?$', re.DOTALL)
_IMAGE_PROMPT = re.compile(r"^What is the complete image\? Caption: (.*)$", re.DOTALL)


def recognize_prompt(prompt: str) -> tuple[str, dict[str, str]]:
    """Map a prompt back to its template id and captured fields."""
    if prompt == "What is the infobox of the image?":
        return PROMPT_TABLE_FROM_IMAGE, {}
    m = _TITLE_PROMPT.match(prompt)
    if m:
        return PROMPT_TABLE_FROM_TITLE, {"title": m.group(1)}
    m = _IMAGE_PROMPT.match(prompt)
    if m:
        rest = m.group(1)
        if " <> " in rest:
            caption, table = rest.split(" <> ", 1)
            return PROMPT_IMAGE, {"caption": caption, "table_linearized": table}
        return PROMPT_IMAGE, {"caption": rest}
    raise ValueError(f"prompt matches no template: {prompt!r}")


def cells_to_json(table: InfoboxTable) -> list[dict]:
    out = []
    for cell in table.cells:
        if isinstance(cell, GroupCell):
            out.append({"type": "group", "text": cell.text})
        else:
            out.append({"type": "pair", "header": cell.header, "value": cell.value})
    return out


def record_to_json(record: InfoboxRecord, split: str) -> dict:
    # key order is part of the file format; dicts preserve insertion order
    return {
        "id": record.record_id,
        "title": record.title,
        "image_url": record.image.url,
        "image_format": record.image.format,
        "image_w": record.image.width_px,
        "image_h": record.image.height_px,
        "caption": record.caption,
        "table_linearized": linearize(record.table),
        "cells": cells_to_json(record.table),
        "split": split,
    }


def record_from_json(obj: dict) -> tuple[InfoboxRecord, str]:
    cells = []
    for c in obj["cells"]:
        if c["type"] == "group":
            cells.append(GroupCell(c["text"]))
        elif c["type"] == "pair":
            cells.append(PairCell(c["header"], c["value"]))
        else:
            raise ValueError(f"unknown cell type: {c['type']!r}")
    page_id, _, _ = obj["id"].rpartition("#")
    record = InfoboxRecord(
        title=obj["title"],
        image=ImageRef(obj["image_url"], obj["image_format"], obj.get("image_w"), obj.get("image_h")),
        caption=obj.get("caption"),
        table=InfoboxTable(cells),
        source_page_id=page_id or obj["id"],
        record_id=obj["id"],
    )
    return record, obj.get("split") or assign_split(record.title)


def read_records_jsonl(path: Path | str) -> list[tuple[InfoboxRecord, str]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(record_from_json(json.loads(line)))
    return out


def _write_jsonl(path: Path, objects: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _prompt_for(record: InfoboxRecord, task: str) -> PromptedExample:
    split = assign_split(record.title)
    if task == "table":
        return PromptedExample(
            id=record.record_id,
            prompt=format_table_prompt(record.title, has_image=True),
            target=linearize(record.table),
            split=split,
        )
    return PromptedExample(
        id=record.record_id,
        prompt=format_image_prompt(record.caption, record.table),
        target=record.image.url,
        split=split,
    )


def _geometry_row(record: InfoboxRecord, task: str, cap: int) -> dict | None:
    w, h = record.image.width_px, record.image.height_px
    if w is None or h is None:
        return None
    if task == "image":
        g = image_gen_geometry(w, h)
        return {
            "id": record.record_id,
            "scaled_w": g.scaled_w,
            "scaled_h": g.scaled_h,
            "crop_x": g.crop_x,
            "crop_y": g.crop_y,
            "crop_side": g.crop_side,
        }
    scaled_w, scaled_h = table_gen_geometry(w, h, cap)
    return {"id": record.record_id, "scaled_w": scaled_w, "scaled_h": scaled_h}


def emit_dataset(
    records: Sequence[InfoboxRecord],
    task: str,
    out_dir: Path | str,
    cap: int = 480,
) -> dict[str, Path]:
    """Write per-split record, prompt, and geometry files for one task.

    Returns the written paths keyed by file role ("train", "valid",
    "test", "train_prompts", ...).  Raises on duplicate record ids.
    """
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}, got {task!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    seen_ids = set()
    for record in records:
        if record.record_id in seen_ids:
            raise ValueError(f"duplicate record id: {record.record_id}")
        seen_ids.add(record.record_id)

    kept = [r for r in records if task == "table" or r.caption is not None]
    kept.sort(key=lambda r: (r.title, r.record_id))

    by_split: dict[str, list[InfoboxRecord]] = {split: [] for split in SPLITS}
    for record in kept:
        by_split[assign_split(record.title)].append(record)

    written: dict[str, Path] = {}
    for split in SPLITS:
        bucket = by_split[split]
        data_path = out_dir / f"{task}_{split}.jsonl"
        _write_jsonl(data_path, (record_to_json(r, split) for r in bucket))
        written[split] = data_path

        prompts_path = out_dir / f"{task}_{split}_prompts.jsonl"
        _write_jsonl(
            prompts_path,
            ({"id": p.id, "prompt": p.prompt, "target": p.target} for p in map(lambda r: _prompt_for(r, task), bucket)),
        )
        written[f"{split}_prompts"] = prompts_path

        geometry_path = out_dir / f"{task}_{split}_geometry.jsonl"
        rows = [row for row in (_geometry_row(r, task, cap) for r in bucket) if row is not None]
        _write_jsonl(geometry_path, rows)
        written[f"{split}_geometry"] = geometry_path

    return written
