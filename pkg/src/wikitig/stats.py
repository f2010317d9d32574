"""Corpus statistics: cell-type frequencies, value-per-header spreads, and
cells-per-table distributions, per split and overall."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .extract import InfoboxRecord
from .model import CELL_TYPES, InfoboxTable, typed_elements
from .split import SPLITS, assign_split

ALL = "all"


@dataclass(frozen=True)
class TypeFrequency:
    """Distinct elements vs total occurrences for one cell type."""

    type_frequency: int
    appearance_frequency: int

    def __post_init__(self):
        if self.appearance_frequency < self.type_frequency:
            raise ValueError("appearance frequency cannot be below type frequency")


@dataclass(frozen=True)
class FrequencyTable:
    """Per-split and overall frequencies for each of group/header/value."""

    rows: dict[str, dict[str, TypeFrequency]]


@dataclass(frozen=True)
class DistributionSummary:
    mean: float
    std: float
    max: float
    min: float

    def __post_init__(self):
        if not (self.min <= self.mean <= self.max):
            raise ValueError("mean must lie between min and max")
        if self.std < 0:
            raise ValueError("std must be non-negative")

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "DistributionSummary":
        if not values:
            raise ValueError("no values to summarize")
        mean = sum(values) / len(values)
        # population standard deviation
        std = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
        return cls(mean=mean, std=std, max=max(values), min=min(values))


def _split_of(item) -> tuple[InfoboxRecord | InfoboxTable, str]:
    if isinstance(item, tuple):
        return item
    return item, assign_split(item.title)


def _table_of(thing) -> InfoboxTable:
    return thing.table if isinstance(thing, InfoboxRecord) else thing


def cell_type_frequencies(dataset: Iterable) -> FrequencyTable:
    """Distinct-element and total-occurrence counts per cell type, per
    split and overall.  Accepts records or (record, split) pairs."""
    counters: dict[str, dict[str, Counter]] = {
        scope: {t: Counter() for t in CELL_TYPES} for scope in (ALL, *SPLITS)
    }
    seen = False
    for item in dataset:
        record, split = _split_of(item)
        seen = True
        for el in typed_elements(_table_of(record)):
            counters[ALL][el.cell_type][el.key] += 1
            counters[split][el.cell_type][el.key] += 1
    if not seen:
        raise ValueError("empty dataset")
    rows = {
        scope: {
            t: TypeFrequency(len(c), sum(c.values()))
            for t, c in per_type.items()
        }
        for scope, per_type in counters.items()
    }
    return FrequencyTable(rows=rows)


def per_header_value_stats(dataset: Iterable) -> tuple[DistributionSummary, DistributionSummary]:
    """For each distinct header: how many distinct values it takes and how
    often it appears; summaries across headers.  Groups are ignored."""
    values_by_header: dict[str, Counter] = defaultdict(Counter)
    for item in dataset:
        record, _ = _split_of(item)
        for el in typed_elements(_table_of(record)):
            if el.cell_type == "value":
                header, value = el.key
                values_by_header[header][value] += 1
    if not values_by_header:
        raise ValueError("dataset has no header/value pairs")
    type_freqs = [len(c) for c in values_by_header.values()]
    appearance_freqs = [sum(c.values()) for c in values_by_header.values()]
    return (
        DistributionSummary.from_values(type_freqs),
        DistributionSummary.from_values(appearance_freqs),
    )


def cells_per_table_stats(dataset: Iterable) -> dict[str, DistributionSummary]:
    """Cell counts per record (a pair row counts once), summarized per
    split and overall; splits with no records are omitted."""
    counts: dict[str, list[int]] = {scope: [] for scope in (ALL, *SPLITS)}
    for item in dataset:
        record, split = _split_of(item)
        n = len(_table_of(record).cells)
        counts[ALL].append(n)
        counts[split].append(n)
    if not counts[ALL]:
        raise ValueError("empty dataset")
    return {
        scope: DistributionSummary.from_values(vals)
        for scope, vals in counts.items()
        if vals
    }


def _fmt(value: float) -> str:
    if float(value).is_integer():
        return f"{int(value):,}"
    return f"{value:,.1f}"


def render_frequency_table(freqs: FrequencyTable) -> str:
    """Aligned text block: type frequency then appearance frequency, one
    row per cell type, one column per split."""
    scopes = [ALL, *SPLITS]
    header = ["Type", "Total", "Train", "Valid", "Test"]
    lines = []
    for title, attr in (
        ("Type Frequency", "type_frequency"),
        ("Appearance Frequency", "appearance_frequency"),
    ):
        lines.append(title)
        rows = [header]
        for cell_type in ("header", "group", "value"):
            rows.append(
                [cell_type.capitalize()]
                + [_fmt(getattr(freqs.rows[s][cell_type], attr)) for s in scopes]
            )
        lines.extend(_align(rows))
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def render_summaries(per_split: dict[str, DistributionSummary], title: str) -> str:
    lines = [title]
    rows = [["Split", "Mean", "Std.", "Max", "Min"]]
    for scope in (ALL, *SPLITS):
        if scope not in per_split:
            continue
        s = per_split[scope]
        rows.append(
            [scope.capitalize() if scope != ALL else "All",
             f"{s.mean:,.1f}", f"{s.std:,.1f}", _fmt(s.max), _fmt(s.min)]
        )
    lines.extend(_align(rows))
    return "\n".join(lines) + "\n"


def _align(rows: list[list[str]]) -> list[str]:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(widths[i]) for i, cell in enumerate(row) if i > 0]
        out.append("  ".join(cells).rstrip())
    return out


def dataset_stats_json(dataset: Sequence) -> dict:
    """JSON-ready bundle of all three statistic families."""
    freqs = cell_type_frequencies(dataset)
    cells = cells_per_table_stats(dataset)
    out: dict = {
        "cell_type_frequencies": {
            scope: {
                t: {
                    "type_frequency": tf.type_frequency,
                    "appearance_frequency": tf.appearance_frequency,
                }
                for t, tf in per_type.items()
            }
            for scope, per_type in freqs.rows.items()
        },
        "cells_per_table": {
            scope: vars(summary) for scope, summary in cells.items()
        },
    }
    per_header: dict[str, dict] = {}
    for scope in (ALL, *SPLITS):
        subset = [
            item for item in map(_split_of, dataset)
            if scope == ALL or item[1] == scope
        ]
        try:
            type_summary, appearance_summary = per_header_value_stats(subset)
        except ValueError:
            continue
        per_header[scope] = {
            "type_frequency": vars(type_summary),
            "appearance_frequency": vars(appearance_summary),
        }
    out["values_per_header"] = per_header
    return out
