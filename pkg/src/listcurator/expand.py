"""Candidate pool expansion from the follower graph around a seed set."""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from .corpus import EdgeList


def expand_candidates(
    follow: EdgeList,
    seeds: Iterable[str],
    max_candidates: int = 1000,
    min_in_degree: int = 2,
) -> list[str]:
    """Non-seed users followed by at least ``min_in_degree`` seeds.

    In-degree counts follow edges whose source is a seed. Results are sorted
    by descending in-degree, then ascending user id, and truncated to
    ``max_candidates``.
    """
    if follow.kind != "follow":
        raise ValueError(f"expected a follow edge list, got kind {follow.kind!r}")
    seed_set = set(seeds)
    if not seed_set:
        raise ValueError("empty seed set")
    if max_candidates < 1:
        raise ValueError("max_candidates must be at least 1")
    if min_in_degree < 1:
        raise ValueError("min_in_degree must be at least 1")

    in_degree: Counter[str] = Counter()
    for src, tgt, _ in follow.edges:
        if src in seed_set and tgt not in seed_set:
            in_degree[tgt] += 1
    qualifying = [(u, d) for u, d in in_degree.items() if d >= min_in_degree]
    qualifying.sort(key=lambda item: (-item[1], item[0]))
    return [u for u, _ in qualifying[:max_candidates]]
