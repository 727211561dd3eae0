"""Dataset schema, JSONL bundle IO, validation, and interaction-edge derivation.

A dataset bundle is a directory holding four newline-delimited JSON files:
``users.jsonl``, ``tweets.jsonl``, ``edges.jsonl`` and ``lists.jsonl``.
Each line is one UTF-8 JSON object whose keys match the record fields below.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator, Mapping

from .text import tokenize

EDGE_KINDS = ("follow", "mention", "retweet")
BUNDLE_FILES = ("users.jsonl", "tweets.jsonl", "edges.jsonl", "lists.jsonl")

_RETWEET_MARKER = re.compile(r"^RT @([A-Za-z0-9_]+)")


class DatasetError(Exception):
    """A bundle is missing, malformed, or violates the dataset invariants."""


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    screen_name: str
    is_seed: bool = False


@dataclass(frozen=True)
class Tweet:
    author_id: str
    text: str
    is_retweet: bool = False
    # recency index within the author's timeline, 0 = most recent
    ordinal: int = 0


@dataclass(frozen=True)
class EdgeList:
    kind: str
    edges: tuple[tuple[str, str, int], ...] = ()


@dataclass(frozen=True)
class ListRecord:
    list_id: str
    name: str
    description: str | None = None
    members: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Dataset:
    users: tuple[UserRecord, ...] = ()
    tweets: tuple[Tweet, ...] = ()
    edge_lists: Mapping[str, EdgeList] = field(default_factory=dict)
    lists: tuple[ListRecord, ...] = ()

    @cached_property
    def user_ids(self) -> tuple[str, ...]:
        return tuple(u.user_id for u in self.users)

    @cached_property
    def seed_ids(self) -> tuple[str, ...]:
        return tuple(u.user_id for u in self.users if u.is_seed)

    @cached_property
    def non_seed_ids(self) -> tuple[str, ...]:
        return tuple(u.user_id for u in self.users if not u.is_seed)

    @cached_property
    def by_id(self) -> dict[str, UserRecord]:
        return {u.user_id: u for u in self.users}

    @cached_property
    def screen_to_id(self) -> dict[str, str]:
        # screen names resolve case-insensitively
        return {u.screen_name.lower(): u.user_id for u in self.users}

    @cached_property
    def tweets_by_author(self) -> dict[str, tuple[Tweet, ...]]:
        grouped: dict[str, list[Tweet]] = {}
        for t in self.tweets:
            grouped.setdefault(t.author_id, []).append(t)
        return {a: tuple(sorted(ts, key=lambda t: t.ordinal)) for a, ts in grouped.items()}

    def edges(self, kind: str) -> EdgeList:
        if kind not in EDGE_KINDS:
            raise ValueError(f"unknown edge kind {kind!r}")
        return self.edge_lists.get(kind, EdgeList(kind=kind))


def _read_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path.name}:{lineno}: malformed record: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise DatasetError(f"{path.name}:{lineno}: malformed record: expected an object")
            yield lineno, obj


def _require(obj: dict, key: str, types, path: Path, lineno: int):
    if key not in obj:
        raise DatasetError(f"{path.name}:{lineno}: malformed record: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, types) or (types is str and isinstance(value, bool)):
        raise DatasetError(
            f"{path.name}:{lineno}: malformed record: field {key!r} has wrong type"
        )
    return value


def load_dataset(path: str | Path, check: bool = True) -> Dataset:
    """Load a dataset bundle directory.

    Tweet ordinals are assigned by file order within each author: an author's
    first tweet in ``tweets.jsonl`` is their most recent (ordinal 0). With
    ``check`` the loaded dataset must pass :func:`validate`.
    """
    root = Path(path)
    if not root.is_dir():
        raise DatasetError(f"missing file: {root} is not a directory")
    for name in BUNDLE_FILES:
        if not (root / name).is_file():
            raise DatasetError(f"missing file: {root / name}")

    users = []
    fp = root / "users.jsonl"
    for lineno, obj in _read_jsonl(fp):
        users.append(
            UserRecord(
                user_id=_require(obj, "user_id", str, fp, lineno),
                screen_name=_require(obj, "screen_name", str, fp, lineno),
                is_seed=_require(obj, "is_seed", bool, fp, lineno),
            )
        )

    tweets = []
    seen_per_author: Counter[str] = Counter()
    fp = root / "tweets.jsonl"
    for lineno, obj in _read_jsonl(fp):
        author = _require(obj, "author_id", str, fp, lineno)
        tweets.append(
            Tweet(
                author_id=author,
                text=_require(obj, "text", str, fp, lineno),
                is_retweet=_require(obj, "is_retweet", bool, fp, lineno),
                ordinal=seen_per_author[author],
            )
        )
        seen_per_author[author] += 1

    edges: dict[str, list[tuple[str, str, int]]] = {k: [] for k in EDGE_KINDS}
    fp = root / "edges.jsonl"
    for lineno, obj in _read_jsonl(fp):
        kind = _require(obj, "kind", str, fp, lineno)
        if kind not in EDGE_KINDS:
            raise DatasetError(f"{fp.name}:{lineno}: malformed record: unknown edge kind {kind!r}")
        weight = _require(obj, "weight", int, fp, lineno)
        edges[kind].append(
            (
                _require(obj, "source", str, fp, lineno),
                _require(obj, "target", str, fp, lineno),
                weight,
            )
        )

    lists = []
    fp = root / "lists.jsonl"
    for lineno, obj in _read_jsonl(fp):
        description = obj.get("description")
        if description is not None and not isinstance(description, str):
            raise DatasetError(f"{fp.name}:{lineno}: malformed record: field 'description' has wrong type")
        members = _require(obj, "members", list, fp, lineno)
        if not all(isinstance(m, str) for m in members):
            raise DatasetError(f"{fp.name}:{lineno}: malformed record: field 'members' has wrong type")
        lists.append(
            ListRecord(
                list_id=_require(obj, "list_id", str, fp, lineno),
                name=_require(obj, "name", str, fp, lineno),
                description=description,
                members=frozenset(members),
            )
        )

    dataset = Dataset(
        users=tuple(users),
        tweets=tuple(tweets),
        edge_lists={k: EdgeList(kind=k, edges=tuple(v)) for k, v in edges.items()},
        lists=tuple(lists),
    )
    if check:
        problems = validate(dataset)
        if problems:
            raise DatasetError("invalid dataset: " + "; ".join(problems))
    return dataset


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset bundle. Inverse of :func:`load_dataset` for valid data.

    Tweets are written in sequence order; since each author's tweets are kept
    in ascending ordinal order, reloading reassigns identical ordinals. List
    members are sorted so equal datasets serialize to identical bytes.
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)

    def dump(name: str, records) -> None:
        with (root / name).open("w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    dump(
        "users.jsonl",
        (
            {"user_id": u.user_id, "screen_name": u.screen_name, "is_seed": u.is_seed}
            for u in dataset.users
        ),
    )
    dump(
        "tweets.jsonl",
        (
            {
                "author_id": t.author_id,
                "text": t.text,
                "is_retweet": t.is_retweet,
                "ordinal": t.ordinal,
            }
            for t in dataset.tweets
        ),
    )
    dump(
        "edges.jsonl",
        (
            {"kind": kind, "source": s, "target": t, "weight": w}
            for kind in EDGE_KINDS
            for (s, t, w) in dataset.edges(kind).edges
        ),
    )
    dump(
        "lists.jsonl",
        (
            {
                "list_id": rec.list_id,
                "name": rec.name,
                "description": rec.description,
                "members": sorted(rec.members),
            }
            for rec in dataset.lists
        ),
    )


def validate(dataset: Dataset) -> list[str]:
    """Check every schema invariant; return violation descriptions in record order.

    An empty report means the dataset is valid. Violations are data, not
    failures, so this never raises.
    """
    problems: list[str] = []
    known: set[str] = set()
    screens: dict[str, str] = {}
    for i, u in enumerate(dataset.users):
        if u.user_id in known:
            problems.append(f"users[{i}]: duplicate user_id {u.user_id!r}")
        known.add(u.user_id)
        if not u.screen_name:
            problems.append(f"users[{i}]: empty screen_name for user {u.user_id!r}")
        else:
            low = u.screen_name.lower()
            if low in screens:
                problems.append(
                    f"users[{i}]: duplicate screen_name {u.screen_name!r} "
                    f"(also used by {screens[low]!r})"
                )
            else:
                screens[low] = u.user_id

    seed_count = len(dataset.seed_ids)
    if seed_count < 2:
        problems.append(f"insufficient seed users: found {seed_count}, need at least 2")
    if len(dataset.non_seed_ids) < 1:
        problems.append("no non-seed users present, need at least 1")

    ordinals: dict[str, list[int]] = {}
    for i, t in enumerate(dataset.tweets):
        if t.author_id not in known:
            problems.append(f"tweets[{i}]: unknown author_id {t.author_id!r}")
        ordinals.setdefault(t.author_id, []).append(t.ordinal)
    for author in sorted(ordinals):
        seen = sorted(ordinals[author])
        if seen != list(range(len(seen))):
            problems.append(
                f"tweets: ordinals for author {author!r} are not unique and contiguous from 0"
            )

    for kind in EDGE_KINDS:
        pairs: set[tuple[str, str]] = set()
        for i, (src, tgt, w) in enumerate(dataset.edges(kind).edges):
            where = f"edges[{kind}][{i}]"
            if src not in known:
                problems.append(f"{where}: unknown user {src!r}")
            if tgt not in known:
                problems.append(f"{where}: unknown user {tgt!r}")
            if src == tgt:
                problems.append(f"{where}: self-loop on user {src!r}")
            if (src, tgt) in pairs:
                problems.append(f"{where}: duplicate edge {src!r} -> {tgt!r}")
            pairs.add((src, tgt))
            if not isinstance(w, int) or isinstance(w, bool) or w < 0:
                problems.append(f"{where}: weight must be a nonnegative integer, got {w!r}")
            elif kind == "follow" and w != 1:
                problems.append(f"{where}: follow edges must have weight 1, got {w}")

    list_ids: set[str] = set()
    for i, rec in enumerate(dataset.lists):
        if rec.list_id in list_ids:
            problems.append(f"lists[{i}]: duplicate list_id {rec.list_id!r}")
        list_ids.add(rec.list_id)
        if not rec.name:
            problems.append(f"lists[{i}]: empty name for list {rec.list_id!r}")
        for member in sorted(rec.members):
            if member not in known:
                problems.append(f"lists[{i}]: unknown member {member!r}")

    return problems


def derive_interaction_edges(dataset: Dataset) -> tuple[EdgeList, EdgeList]:
    """Derive (mention, retweet) edge lists from tweet text.

    A tweet by ``u`` counts one mention of ``v`` if it contains ``@screen_name``
    as a delimited token, and one retweet of ``v`` if it starts with the
    ``RT @screen_name`` marker (which also counts as a mention). Screen names
    resolve case-insensitively and only within the dataset; self-references
    are dropped.
    """
    screen_to_id = dataset.screen_to_id
    mention_counts: Counter[tuple[str, str]] = Counter()
    retweet_counts: Counter[tuple[str, str]] = Counter()
    for tweet in dataset.tweets:
        author = tweet.author_id
        targets = set()
        for token in tokenize(tweet.text):
            if token.startswith("@"):
                target = screen_to_id.get(token[1:])
                if target is not None and target != author:
                    targets.add(target)
        for target in targets:
            mention_counts[(author, target)] += 1
        marker = _RETWEET_MARKER.match(tweet.text)
        if marker:
            target = screen_to_id.get(marker.group(1).lower())
            if target is not None and target != author:
                retweet_counts[(author, target)] += 1

    def as_edge_list(kind: str, counts: Counter) -> EdgeList:
        edges = tuple((s, t, w) for (s, t), w in sorted(counts.items()))
        return EdgeList(kind=kind, edges=edges)

    return as_edge_list("mention", mention_counts), as_edge_list("retweet", retweet_counts)


def dataset_stats(dataset: Dataset) -> dict:
    """Per-dataset summary counts: totals plus mean per-user activity."""
    n = len(dataset.users)
    follow = dataset.edges("follow").edges
    memberships = Counter()
    for rec in dataset.lists:
        for member in rec.members:
            memberships[member] += 1

    def mean(total: float) -> float:
        return total / n if n else 0.0

    return {
        "users": n,
        "seed_users": len(dataset.seed_ids),
        "tweets": len(dataset.tweets),
        "lists": len(dataset.lists),
        "mean_tweets": mean(len(dataset.tweets)),
        "mean_friends": mean(len(follow)),  # outbound follow edges per user
        "mean_followers": mean(len(follow)),  # inbound follow edges per user
        "mean_listed": mean(sum(memberships.values())),
    }
