"""Scoring of generated tables: ROUGE, per-type Table-F1/Corpus-F1, bootstrap.

Table-F1 scores each document's cells of one type (group names, headers,
or header/value pairs) as multisets with ROUGE-style clipping, so
repeating a cell cannot inflate precision, then averages the per-document
F1.  Corpus-F1 pools the multisets over the whole corpus first, which
rewards diversity of produced cells rather than per-document accuracy.
ROUGE runs on the linearized text with both separators blanked out.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .model import (
    CELL_TYPES,
    Cell,
    InfoboxTable,
    TableParseError,
    delinearize,
    typed_elements,
)


@dataclass(frozen=True)
class PRF:
    """Precision / recall / F1 triple with 0/0 -> 0 conventions baked in."""

    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, matched: int, gen_total: int, ref_total: int) -> "PRF":
        p = matched / gen_total if gen_total else 0.0
        r = matched / ref_total if ref_total else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f1)


class CellMultiset:
    """Element -> count map for one cell type of one table."""

    def __init__(self, cell_type: str, counts: Counter | None = None):
        if cell_type not in CELL_TYPES:
            raise ValueError(f"unknown cell type: {cell_type!r}")
        self.cell_type = cell_type
        self.counts: Counter = counts if counts is not None else Counter()

    @classmethod
    def from_cells(cls, cells: Iterable[Cell], cell_type: str) -> "CellMultiset":
        ms = cls(cell_type)
        table_like = cells.cells if isinstance(cells, InfoboxTable) else tuple(cells)
        if table_like:
            for el in typed_elements(InfoboxTable(table_like)):
                if el.cell_type == cell_type:
                    ms.counts[el.key] += 1
        return ms

    def total(self) -> int:
        return sum(self.counts.values())

    def merge(self, other: "CellMultiset") -> "CellMultiset":
        if other.cell_type != self.cell_type:
            raise ValueError("cell type mismatch")
        merged = Counter(self.counts)
        merged.update(other.counts)
        return CellMultiset(self.cell_type, merged)


def clipped_match(gen: CellMultiset, ref: CellMultiset, element) -> int:
    """Min of the element's generated and reference counts (0 if absent)."""
    if gen.cell_type != ref.cell_type:
        raise ValueError(f"cell type mismatch: {gen.cell_type} vs {ref.cell_type}")
    return min(gen.counts.get(element, 0), ref.counts.get(element, 0))


def _pair_prf(gen: CellMultiset, ref: CellMultiset) -> PRF:
    matched = sum(clipped_match(gen, ref, e) for e in gen.counts)
    return PRF.from_counts(matched, gen.total(), ref.total())


def _as_cells(table) -> tuple[Cell, ...]:
    if table is None:
        return ()
    if isinstance(table, InfoboxTable):
        return table.cells
    return tuple(table)


def table_f1(gen_tables: Sequence, ref_tables: Sequence, cell_type: str) -> tuple[float, list[PRF | None]]:
    """Mean per-document clipped F1 for one cell type, plus per-document PRFs.

    Documents where neither side has a cell of the type are excluded from
    the mean (None in the returned list); if exactly one side is empty the
    document scores 0 and is included.  Empty generated tables may be
    passed as empty sequences or None.
    """
    if len(gen_tables) != len(ref_tables):
        raise ValueError(f"length mismatch: {len(gen_tables)} generated vs {len(ref_tables)} reference")
    if not gen_tables:
        raise ValueError("no documents to score")
    per_doc: list[PRF | None] = []
    for g, r in zip(gen_tables, ref_tables):
        gen_ms = CellMultiset.from_cells(_as_cells(g), cell_type)
        ref_ms = CellMultiset.from_cells(_as_cells(r), cell_type)
        if not gen_ms.counts and not ref_ms.counts:
            per_doc.append(None)
        else:
            per_doc.append(_pair_prf(gen_ms, ref_ms))
    scored = [p.f1 for p in per_doc if p is not None]
    mean = sum(scored) / len(scored) if scored else 0.0
    return mean, per_doc


def corpus_f1(gen_tables: Sequence, ref_tables: Sequence, cell_type: str) -> PRF:
    """Clipped F1 over element counts pooled across the whole corpus."""
    if len(gen_tables) != len(ref_tables):
        raise ValueError(f"length mismatch: {len(gen_tables)} generated vs {len(ref_tables)} reference")
    if not gen_tables:
        raise ValueError("no documents to score")
    gen_pool = CellMultiset(cell_type)
    ref_pool = CellMultiset(cell_type)
    for g in gen_tables:
        gen_pool = gen_pool.merge(CellMultiset.from_cells(_as_cells(g), cell_type))
    for r in ref_tables:
        ref_pool = ref_pool.merge(CellMultiset.from_cells(_as_cells(r), cell_type))
    return _pair_prf(gen_pool, ref_pool)


def rouge_preprocess(linearized: str, stem: Callable[[str], str] | None = None) -> list[str]:
    """Lowercased whitespace tokens with both separators blanked out."""
    s = linearized.replace("<>", " ").replace("|", " ")
    tokens = s.lower().split()
    if stem is not None:
        tokens = [stem(t) for t in tokens]
    return tokens


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(gen_tokens: Sequence[str], ref_tokens: Sequence[str], n: int) -> PRF:
    """Clipped n-gram overlap F1 (n in {1, 2}); scores in [0, 1]."""
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    gen_counts = _ngram_counts(gen_tokens, n)
    ref_counts = _ngram_counts(ref_tokens, n)
    matched = sum(min(c, ref_counts.get(g, 0)) for g, c in gen_counts.items())
    return PRF.from_counts(matched, sum(gen_counts.values()), sum(ref_counts.values()))


def _lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            curr.append(prev[j - 1] + 1 if x == y else max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge_l(gen_tokens: Sequence[str], ref_tokens: Sequence[str]) -> PRF:
    """LCS-based F1 over the full token sequences; scores in [0, 1]."""
    lcs = _lcs_len(gen_tokens, ref_tokens)
    return PRF.from_counts(lcs, len(gen_tokens), len(ref_tokens))


@dataclass(frozen=True)
class BootstrapResult:
    p_value: float
    wins: int
    ties: int
    losses: int
    n_resamples: int
    seed: int

    def __post_init__(self):
        if self.wins + self.ties + self.losses != self.n_resamples:
            raise ValueError("win/tie/loss counts must sum to n_resamples")


_BOOTSTRAP_CHUNK = 1024


def paired_bootstrap(
    per_doc_a: Sequence[float],
    per_doc_b: Sequence[float],
    n_resamples: int,
    seed: int,
) -> BootstrapResult:
    """Paired bootstrap over documents: resample indices with replacement,
    count sign flips of the mean difference.

    The p-value is one-sided toward the observed winner, with ties counted
    against it: when system a's observed mean is higher, p = (losses +
    ties) / n_resamples.  Deterministic for a fixed seed.
    """
    if len(per_doc_a) != len(per_doc_b):
        raise ValueError(f"length mismatch: {len(per_doc_a)} vs {len(per_doc_b)}")
    if len(per_doc_a) < 2:
        raise ValueError("need at least 2 paired scores")
    if n_resamples < 1:
        raise ValueError("n_resamples must be >= 1")
    diffs = np.asarray(per_doc_a, dtype=np.float64) - np.asarray(per_doc_b, dtype=np.float64)
    n = len(diffs)
    rng = np.random.default_rng(seed)
    wins = ties = losses = 0
    done = 0
    while done < n_resamples:
        chunk = min(_BOOTSTRAP_CHUNK, n_resamples - done)
        idx = rng.integers(0, n, size=(chunk, n))
        means = diffs[idx].mean(axis=1)
        wins += int(np.count_nonzero(means > 0))
        losses += int(np.count_nonzero(means < 0))
        done += chunk
    ties = n_resamples - wins - losses
    if float(diffs.mean()) >= 0:
        p = (losses + ties) / n_resamples
    else:
        p = (wins + ties) / n_resamples
    return BootstrapResult(p, wins, ties, losses, n_resamples, seed)


@dataclass(frozen=True)
class MetricReport:
    """Everything cmd_eval reports: per-type Table-F1 (with per-document
    values retained), per-type Corpus-F1, and mean per-document ROUGE.

    All scores are stored in [0, 1]; display scaling (x100, one decimal)
    happens at serialization time.
    """

    doc_ids: tuple[str, ...]
    rouge_per_doc: dict[str, tuple[PRF, ...]]
    table_per_doc: dict[str, tuple[PRF | None, ...]]
    corpus: dict[str, PRF]
    parse_failures: tuple[str, ...] = field(default_factory=tuple)

    @property
    def n_documents(self) -> int:
        return len(self.doc_ids)

    def rouge_f1(self, variant: str) -> float:
        scores = [p.f1 for p in self.rouge_per_doc[variant]]
        return sum(scores) / len(scores) if scores else 0.0

    def table_f1_mean(self, cell_type: str) -> float:
        scored = [p.f1 for p in self.table_per_doc[cell_type] if p is not None]
        return sum(scored) / len(scored) if scored else 0.0


ROUGE_VARIANTS = ("1", "2", "l")


def evaluate(
    gen_strings: Sequence[str],
    ref_strings: Sequence[str],
    mode: str = "lenient",
    doc_ids: Sequence[str] | None = None,
    stem: Callable[[str], str] | None = None,
) -> MetricReport:
    """Score generated linearized tables against references.

    References must parse strictly.  Generated strings parse per `mode`;
    in lenient mode an unusable generation scores as an empty table for
    the cell metrics while ROUGE still runs on its raw text.
    """
    if len(gen_strings) != len(ref_strings):
        raise ValueError(f"length mismatch: {len(gen_strings)} generated vs {len(ref_strings)} reference")
    if not gen_strings:
        raise ValueError("no documents to score")
    if doc_ids is None:
        doc_ids = tuple(str(i) for i in range(len(gen_strings)))
    elif len(doc_ids) != len(gen_strings):
        raise ValueError("doc_ids length mismatch")

    gen_tables: list[tuple[Cell, ...]] = []
    parse_failures: list[str] = []
    for doc_id, g in zip(doc_ids, gen_strings):
        try:
            gen_tables.append(delinearize(g, mode).cells)
        except TableParseError:
            if mode == "strict":
                raise
            gen_tables.append(())
            parse_failures.append(doc_id)
    ref_tables = [delinearize(r, "strict").cells for r in ref_strings]

    rouge_per_doc: dict[str, tuple[PRF, ...]] = {}
    gen_tokens = [rouge_preprocess(g, stem) for g in gen_strings]
    ref_tokens = [rouge_preprocess(r, stem) for r in ref_strings]
    for variant in ROUGE_VARIANTS:
        if variant == "l":
            scores = tuple(rouge_l(g, r) for g, r in zip(gen_tokens, ref_tokens))
        else:
            scores = tuple(rouge_n(g, r, int(variant)) for g, r in zip(gen_tokens, ref_tokens))
        rouge_per_doc[variant] = scores

    table_per_doc = {}
    corpus = {}
    for cell_type in CELL_TYPES:
        _, per_doc = table_f1(gen_tables, ref_tables, cell_type)
        table_per_doc[cell_type] = tuple(per_doc)
        corpus[cell_type] = corpus_f1(gen_tables, ref_tables, cell_type)

    return MetricReport(
        doc_ids=tuple(doc_ids),
        rouge_per_doc=rouge_per_doc,
        table_per_doc=table_per_doc,
        corpus=corpus,
        parse_failures=tuple(parse_failures),
    )
