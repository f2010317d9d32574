import json
import random

import pytest

from wikitig.emit import (
    cells_to_json,
    emit_dataset,
    format_image_prompt,
    format_table_prompt,
    image_gen_geometry,
    read_records_jsonl,
    recognize_prompt,
    record_from_json,
    record_to_json,
    table_gen_geometry,
)
from wikitig.model import GroupCell, InfoboxTable, PairCell, linearize
from wikitig.split import assign_split

from helpers import random_record, random_table

RECORD_KEYS = [
    "id", "title", "image_url", "image_format", "image_w", "image_h",
    "caption", "table_linearized", "cells", "split",
]


class TestTablePrompt:
    def test_title_prompt(self):
        assert (
            format_table_prompt("Fish and chips", True)
            == 'What is the infobox of " Fish and chips "?'
        )

    def test_image_only_prompt(self):
        assert format_table_prompt(None, True) == "What is the infobox of the image?"

    def test_neither_input_rejected(self):
        with pytest.raises(ValueError):
            format_table_prompt(None, False)


class TestImagePrompt:
    def test_caption_only(self):
        caption = "May Lake - View from the trail up Mt. Hoffman."
        assert (
            format_image_prompt(caption)
            == "What is the complete image? Caption: May Lake - View from the trail up Mt. Hoffman."
        )

    def test_caption_with_table(self):
        table = InfoboxTable([GroupCell("X")])
        assert (
            format_image_prompt("a caption", table)
            == "What is the complete image? Caption: a caption <> X"
        )

    def test_empty_caption_rejected(self):
        with pytest.raises(ValueError):
            format_image_prompt("")


class TestPromptRecognizer:
    def test_round_trip_all_templates(self):
        rng = random.Random(61)
        for _ in range(100):
            table = random_table(rng)
            title = "Some Title / odd ' chars"
            cases = [
                (format_table_prompt(title, False), "table_from_title", {"title": title}),
                (format_table_prompt(None, True), "table_from_image", {}),
                (
                    format_image_prompt("cap of it", table),
                    "image",
                    {"caption": "cap of it", "table_linearized": linearize(table)},
                ),
                (format_image_prompt("cap of it"), "image", {"caption": "cap of it"}),
            ]
            for prompt, template, fields in cases:
                assert recognize_prompt(prompt) == (template, fields)

    def test_unknown_prompt_rejected(self):
        with pytest.raises(ValueError):
            recognize_prompt("Describe the image.")


class TestImageGenGeometry:
    def test_portrait(self):
        g = image_gen_geometry(512, 768)
        assert (g.scaled_w, g.scaled_h) == (256, 384)
        assert (g.crop_x, g.crop_y, g.crop_side) == (0, 64, 256)

    def test_square_identity(self):
        g = image_gen_geometry(256, 256)
        assert (g.scaled_w, g.scaled_h, g.crop_x, g.crop_y) == (256, 256, 0, 0)

    def test_landscape(self):
        g = image_gen_geometry(1000, 400)
        assert (g.scaled_w, g.scaled_h) == (640, 256)
        assert (g.crop_x, g.crop_y) == (192, 0)

    def test_crop_box_always_inside(self):
        rng = random.Random(67)
        for _ in range(10_000):
            w, h = rng.randint(1, 4000), rng.randint(1, 4000)
            g = image_gen_geometry(w, h)
            assert min(g.scaled_w, g.scaled_h) == 256
            assert g.crop_x + g.crop_side <= g.scaled_w
            assert g.crop_y + g.crop_side <= g.scaled_h

    def test_invalid_dims(self):
        with pytest.raises(ValueError):
            image_gen_geometry(0, 5)


class TestTableGenGeometry:
    def test_downscale(self):
        assert table_gen_geometry(960, 640, 480) == (720, 480)

    def test_small_image_untouched(self):
        assert table_gen_geometry(300, 200, 480) == (300, 200)

    def test_cap_256(self):
        assert table_gen_geometry(512, 512, 256) == (256, 256)

    def test_never_upscales(self):
        rng = random.Random(71)
        for _ in range(2000):
            w, h = rng.randint(1, 3000), rng.randint(1, 3000)
            for cap in (256, 384, 480):
                sw, sh = table_gen_geometry(w, h, cap)
                assert sw <= w and sh <= h
                assert min(sw, sh) <= max(cap, min(w, h))

    def test_invalid_cap(self):
        with pytest.raises(ValueError):
            table_gen_geometry(100, 100, 512)


class TestRecordJson:
    def test_key_order_is_pinned(self):
        rng = random.Random(73)
        record = random_record(rng, "page")
        line = json.dumps(record_to_json(record, "train"), ensure_ascii=False)
        keys = [k for k, _ in json.loads(line, object_pairs_hook=lambda p: p)]
        assert keys == RECORD_KEYS

    def test_round_trip(self):
        rng = random.Random(79)
        for i in range(50):
            record = random_record(rng, f"page{i}")
            split = assign_split(record.title)
            back, back_split = record_from_json(record_to_json(record, split))
            assert back == record
            assert back_split == split

    def test_cells_json_shapes(self):
        table = InfoboxTable([GroupCell("G"), PairCell("H", "V")])
        assert cells_to_json(table) == [
            {"type": "group", "text": "G"},
            {"type": "pair", "header": "H", "value": "V"},
        ]


class TestEmitDataset:
    def make_records(self, n, captionless=()):
        rng = random.Random(83)
        records = []
        for i in range(n):
            record = random_record(rng, f"p{i}")
            caption = None if i in captionless else f"{record.title} in a photo"
            records.append(
                type(record)(
                    title=record.title,
                    image=record.image,
                    caption=caption,
                    table=record.table,
                    source_page_id=record.source_page_id,
                    record_id=record.record_id,
                )
            )
        return records

    def read_all(self, paths, task):
        rows = []
        for split in ("train", "valid", "test"):
            with open(paths[split], encoding="utf-8") as fh:
                rows.extend(json.loads(line) for line in fh if line.strip())
        return rows

    def test_image_task_drops_captionless(self, tmp_path):
        records = self.make_records(20, captionless={0, 5, 9})
        table_paths = emit_dataset(records, "table", tmp_path / "t")
        image_paths = emit_dataset(records, "image", tmp_path / "i")
        assert len(self.read_all(table_paths, "table")) == 20
        assert len(self.read_all(image_paths, "image")) == 17

    def test_split_routing_follows_title_hash(self, tmp_path):
        records = self.make_records(12)
        paths = emit_dataset(records, "table", tmp_path)
        for split in ("train", "valid", "test"):
            with open(paths[split], encoding="utf-8") as fh:
                for line in fh:
                    obj = json.loads(line)
                    assert assign_split(obj["title"]) == split
                    assert obj["split"] == split

    def test_title_sorted_within_split(self, tmp_path):
        records = self.make_records(30)
        paths = emit_dataset(records, "table", tmp_path)
        for split in ("train", "valid", "test"):
            with open(paths[split], encoding="utf-8") as fh:
                titles = [json.loads(line)["title"] for line in fh if line.strip()]
            assert titles == sorted(titles)

    def test_empty_input_writes_empty_files(self, tmp_path):
        paths = emit_dataset([], "table", tmp_path)
        for split in ("train", "valid", "test"):
            assert paths[split].exists()
            assert paths[split].read_text() == ""

    def test_duplicate_ids_rejected(self, tmp_path):
        records = self.make_records(3)
        with pytest.raises(ValueError, match="duplicate record id"):
            emit_dataset(records + [records[0]], "table", tmp_path)

    def test_prompts_round_trip_through_recognizer(self, tmp_path):
        records = self.make_records(15)
        for task in ("table", "image"):
            paths = emit_dataset(records, task, tmp_path / task)
            for split in ("train", "valid", "test"):
                with open(paths[f"{split}_prompts"], encoding="utf-8") as fh:
                    for line in fh:
                        obj = json.loads(line)
                        assert list(obj) == ["id", "prompt", "target"]
                        template, _ = recognize_prompt(obj["prompt"])
                        assert template == (
                            "table_from_title" if task == "table" else "image"
                        )

    def test_geometry_sidecar_only_for_known_dims(self, tmp_path):
        records = self.make_records(25)
        with_dims = [r for r in records if r.image.width_px is not None]
        paths = emit_dataset(records, "image", tmp_path)
        rows = []
        for split in ("train", "valid", "test"):
            with open(paths[f"{split}_geometry"], encoding="utf-8") as fh:
                rows.extend(json.loads(line) for line in fh if line.strip())
        captioned_with_dims = [r for r in with_dims if r.caption is not None]
        assert len(rows) == len(captioned_with_dims)
        for row in rows:
            assert row["crop_side"] == 256

    def test_read_records_jsonl(self, tmp_path):
        records = self.make_records(8)
        paths = emit_dataset(records, "table", tmp_path)
        loaded = []
        for split in ("train", "valid", "test"):
            loaded.extend(read_records_jsonl(paths[split]))
        assert {r.record_id for r, _ in loaded} == {r.record_id for r in records}
