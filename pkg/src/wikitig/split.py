"""Deterministic train/valid/test assignment by title hash.

The SHA-256 digest of the title's UTF-8 bytes, read as a big-endian
unsigned integer, is reduced mod 20: remainder 0 is test, 1 is valid,
everything else is train (a 90/5/5 split in expectation).  The title is
hashed exactly as given; any normalization would silently move entities
between splits.
"""

from __future__ import annotations

import hashlib
from typing import Literal

SplitLabel = Literal["train", "valid", "test"]

SPLITS: tuple[SplitLabel, ...] = ("train", "valid", "test")


def split_remainder(title: str) -> int:
    """Digest-mod-20 remainder for a title; the label is a view of this."""
    if not title:
        raise ValueError("title must be non-empty")
    digest = hashlib.sha256(title.encode("utf-8")).digest()
    # byte fold: r := (r*256 + byte) mod 20, equal to the big-integer mod
    r = 0
    for b in digest:
        r = (r * 256 + b) % 20
    return r


def assign_split(title: str) -> SplitLabel:
    r = split_remainder(title)
    if r == 0:
        return "test"
    if r == 1:
        return "valid"
    return "train"
