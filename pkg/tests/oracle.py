"""Brute-force reference implementations used only to check the library.

Everything here is written with plain list scans (list.count, explicit
loops, recursion) so it shares no code path with the package under test.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from wikitig.model import GroupCell, PairCell


def elements_brute(cells, cell_type):
    """Element keys of one type as a plain list, repetitions preserved."""
    out = []
    for cell in cells:
        if isinstance(cell, GroupCell):
            if cell_type == "group":
                out.append(cell.text)
        else:
            if cell_type == "header":
                out.append(cell.header)
            if cell_type == "value":
                out.append((cell.header, cell.value))
    return out


def prf_brute(gen_elements, ref_elements):
    """Clipped precision/recall/F1 from two element lists."""
    matched = 0
    for e in sorted(set(gen_elements), key=repr):
        matched += min(gen_elements.count(e), ref_elements.count(e))
    p = matched / len(gen_elements) if gen_elements else 0.0
    r = matched / len(ref_elements) if ref_elements else 0.0
    f1 = (2 * p * r / (p + r)) if (p + r) > 0 else 0.0
    return p, r, f1


def table_f1_brute(gen_docs, ref_docs, cell_type):
    """Mean per-document F1; both-empty documents are left out of the mean."""
    scores = []
    for g, r in zip(gen_docs, ref_docs):
        ge = elements_brute(g, cell_type)
        re_ = elements_brute(r, cell_type)
        if not ge and not re_:
            continue
        scores.append(prf_brute(ge, re_)[2])
    return sum(scores) / len(scores) if scores else 0.0


def corpus_f1_brute(gen_docs, ref_docs, cell_type):
    gen_all = []
    ref_all = []
    for g in gen_docs:
        gen_all.extend(elements_brute(g, cell_type))
    for r in ref_docs:
        ref_all.extend(elements_brute(r, cell_type))
    return prf_brute(gen_all, ref_all)


def lcs_brute(a, b):
    """Recursive LCS length with memoization."""

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


def ngrams_brute(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def rouge_n_brute(gen_tokens, ref_tokens, n):
    return prf_brute(ngrams_brute(gen_tokens, n), ngrams_brute(ref_tokens, n))


def bootstrap_enumerate(a, b):
    """Exact win/tie/loss fractions over every index resample of size n."""
    n = len(a)
    wins = ties = losses = 0
    for idx in itertools.product(range(n), repeat=n):
        diff = sum(a[i] - b[i] for i in idx)
        if diff > 0:
            wins += 1
        elif diff == 0:
            ties += 1
        else:
            losses += 1
    total = n**n
    return wins / total, ties / total, losses / total
