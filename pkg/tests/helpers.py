"""Shared generators for randomized tests (plain `random`, fixed seeds)."""

from __future__ import annotations

import random
import string

from wikitig.extract import ImageRef, InfoboxRecord
from wikitig.model import GroupCell, InfoboxTable, PairCell, sanitize_text

_ALPHABET = string.ascii_letters + string.digits + " |<>'/-é"


def random_cell_text(rng: random.Random, max_len: int = 12) -> str:
    while True:
        raw = "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(1, max_len)))
        text = sanitize_text(raw)
        if text:
            return text


def random_cell(rng: random.Random):
    if rng.random() < 0.3:
        return GroupCell(random_cell_text(rng))
    return PairCell(random_cell_text(rng), random_cell_text(rng))


def random_table(rng: random.Random, max_cells: int = 6) -> InfoboxTable:
    return InfoboxTable([random_cell(rng) for _ in range(rng.randint(1, max_cells))])


def random_title(rng: random.Random) -> str:
    return "".join(rng.choice(string.ascii_letters + string.digits) for _ in range(rng.randint(1, 24)))


def random_record(rng: random.Random, page_id: str, ordinal: int = 0) -> InfoboxRecord:
    title = random_title(rng)
    caption = None
    if rng.random() < 0.7:
        caption = f"{title} pictured in {random_cell_text(rng)}"
    dims = (rng.randint(1, 2000), rng.randint(1, 2000)) if rng.random() < 0.8 else (None, None)
    return InfoboxRecord(
        title=title,
        image=ImageRef(
            url=f"//img.example/{page_id}_{ordinal}.{rng.choice(['jpg', 'png', 'gif'])}",
            format=rng.choice(["jpeg", "png", "gif"]),
            width_px=dims[0],
            height_px=dims[1],
        ),
        caption=caption,
        table=random_table(rng),
        source_page_id=page_id,
        record_id=f"{page_id}#{ordinal}",
    )
