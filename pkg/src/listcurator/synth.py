"""Synthetic datasets with planted seed communities, for desk-scale evaluation.

Each criterion gets a signal dial in [0, 1], interpreted as the probability
that a given seed user carries that channel's planted structure (marker
vocabulary, boosted incoming edges, biased list memberships). At 0 the seeds
are statistically identical to the noise users on that view; at 1 every seed
carries the structure. Generation is fully deterministic for a fixed
``rng_seed``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .corpus import Dataset, EdgeList, ListRecord, Tweet, UserRecord
from .views import CRITERIA

_TWEET_LENGTH = 8
_MARKER_RATE = 0.15  # marker-token share for a participating seed's tweets
_BASE_MEMBERSHIP = 0.08
_NAME_TAGS = 12
_DESC_TAGS = 12

# incoming-edge probability for participating seed targets
_FOLLOW_CAP = 0.30
_MENTION_CAP = 0.15
_RETWEET_CAP = 0.15
_EDGE_TRIALS = 4


@dataclass(frozen=True)
class SynthConfig:
    n_seed: int = 40
    n_noise: int = 800
    vocab_size: int = 2000
    marker_terms: int = 25
    tweets_per_user: int = 200
    follow_density: float = 0.02
    mention_density: float = 0.01
    retweet_density: float = 0.006
    list_count: int = 40
    co_list_bias: float = 10.0
    signal_strength: Mapping[str, float] = field(default_factory=dict)
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_seed < 20:
            raise ValueError("n_seed must be at least 20 so fold selection succeeds")
        if self.n_noise < 1:
            raise ValueError("n_noise must be at least 1")
        if self.vocab_size < 1 or self.marker_terms < 0:
            raise ValueError("vocabulary sizes must be positive")
        if self.tweets_per_user < 0 or self.list_count < 0:
            raise ValueError("tweets_per_user and list_count must be nonnegative")
        for name in ("follow_density", "mention_density", "retweet_density"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability, got {value}")
        if self.co_list_bias < 1.0:
            raise ValueError("co_list_bias must be at least 1")
        strengths = dict(self.signal_strength)
        for tag, value in strengths.items():
            if tag not in CRITERIA:
                raise ValueError(f"unknown criterion in signal_strength: {tag!r}")
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"signal_strength[{tag!r}] must be in [0, 1], got {value}")
        object.__setattr__(self, "signal_strength", strengths)

    def signal(self, tag: str) -> float:
        return self.signal_strength.get(tag, 0.0)


PRESETS: dict[str, dict] = {
    # mirrors the default evaluation scale: ~40 seeds, ~800 noise, ~200 tweets/user
    "table1": {},
    "small": {
        "n_seed": 24,
        "n_noise": 220,
        "vocab_size": 2000,
        "marker_terms": 15,
        "tweets_per_user": 40,
        "list_count": 32,
    },
}


def preset(name: str, **overrides) -> SynthConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; expected one of: {', '.join(PRESETS)}")
    params = dict(PRESETS[name])
    params.update(overrides)
    return SynthConfig(**params)


def _participants(rng: np.random.Generator, n_seed: int, signal: float) -> np.ndarray:
    """Boolean mask over seeds carrying one channel's planted structure."""
    return rng.random(n_seed) < signal


def _edge_probs(n: int, mask: np.ndarray, base: float, cap: float) -> np.ndarray:
    probs = np.full(n, base)
    probs[: len(mask)][mask] = cap
    return probs


def _sample_weighted_edges(
    rng: np.random.Generator, uids: list[str], probs: np.ndarray
) -> tuple[tuple[str, str, int], ...]:
    n = len(uids)
    counts = rng.binomial(_EDGE_TRIALS, np.broadcast_to(probs, (n, n)))
    np.fill_diagonal(counts, 0)
    sources, targets = np.nonzero(counts)
    return tuple(
        (uids[a], uids[b], int(counts[a, b])) for a, b in zip(sources, targets)
    )


def generate(cfg: SynthConfig) -> Dataset:
    """Generate a dataset with planted per-criterion structure.

    The three tweet-depth criteria share one tweet corpus, so their common
    dial is the strongest of the three; ``list_merged`` inherits from the
    name and description dials.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    n = cfg.n_seed + cfg.n_noise
    uids = [f"s{i:04d}" for i in range(cfg.n_seed)] + [f"n{i:04d}" for i in range(cfg.n_noise)]
    uid_array = np.array(uids)
    users = tuple(
        UserRecord(user_id=uid, screen_name=uid, is_seed=i < cfg.n_seed)
        for i, uid in enumerate(uids)
    )

    background = np.array([f"w{i:04d}" for i in range(cfg.vocab_size)])
    markers = np.array([f"topic{i:03d}" for i in range(max(cfg.marker_terms, 1))])
    tweet_signal = max(cfg.signal("tweets50"), cfg.signal("tweets100"), cfg.signal("tweets200"))
    text_part = _participants(rng, cfg.n_seed, tweet_signal)

    tweets: list[Tweet] = []
    for i, uid in enumerate(uids):
        shape = (cfg.tweets_per_user, _TWEET_LENGTH)
        tokens = background[rng.integers(0, cfg.vocab_size, size=shape)]
        if i < cfg.n_seed and text_part[i] and cfg.marker_terms > 0:
            use_marker = rng.random(shape) < _MARKER_RATE
            marked = markers[rng.integers(0, cfg.marker_terms, size=shape)]
            tokens = np.where(use_marker, marked, tokens)
        for ordinal in range(cfg.tweets_per_user):
            tweets.append(
                Tweet(author_id=uid, text=" ".join(tokens[ordinal]), is_retweet=False, ordinal=ordinal)
            )

    follow_part = _participants(rng, cfg.n_seed, cfg.signal("followed_by"))
    follow_probs = _edge_probs(n, follow_part, cfg.follow_density, _FOLLOW_CAP)
    follow_mask = rng.random((n, n)) < np.broadcast_to(follow_probs, (n, n))
    np.fill_diagonal(follow_mask, False)
    follow_edges = tuple(
        (uids[a], uids[b], 1) for a, b in zip(*np.nonzero(follow_mask))
    )
    mention_part = _participants(rng, cfg.n_seed, cfg.signal("mentioned_by"))
    mention_edges = _sample_weighted_edges(
        rng, uids, _edge_probs(n, mention_part, cfg.mention_density, _MENTION_CAP)
    )
    retweet_part = _participants(rng, cfg.n_seed, cfg.signal("retweeted_by"))
    retweet_edges = _sample_weighted_edges(
        rng, uids, _edge_probs(n, retweet_part, cfg.retweet_density, _RETWEET_CAP)
    )

    name_tags = np.array([f"grouptag{i:02d}" for i in range(_NAME_TAGS)])
    desc_tags = np.array([f"desctag{i:02d}" for i in range(_DESC_TAGS)])
    quarter = cfg.list_count // 4
    pool_participants = {
        "co": _participants(rng, cfg.n_seed, cfg.signal("co_listed")),
        "names": _participants(rng, cfg.n_seed, cfg.signal("list_names")),
        "desc": _participants(rng, cfg.n_seed, cfg.signal("list_descriptions")),
        "background": np.zeros(cfg.n_seed, dtype=bool),
    }
    biased_membership = min(0.95, _BASE_MEMBERSHIP * cfg.co_list_bias)
    lists: list[ListRecord] = []
    for i in range(cfg.list_count):
        if i < quarter:
            pool = "co"
        elif i < 2 * quarter:
            pool = "names"
        elif i < 3 * quarter:
            pool = "desc"
        else:
            pool = "background"

        if pool == "names":
            name = " ".join(name_tags[rng.integers(0, _NAME_TAGS, size=2)])
        else:
            name = " ".join(background[rng.integers(0, cfg.vocab_size, size=2)])
        if pool == "desc":
            description = " ".join(desc_tags[rng.integers(0, _DESC_TAGS, size=4)])
        else:
            description = " ".join(background[rng.integers(0, cfg.vocab_size, size=3)])
            if rng.random() < 0.3:
                description = None

        member_probs = np.full(n, _BASE_MEMBERSHIP)
        member_probs[: cfg.n_seed][pool_participants[pool]] = biased_membership
        mask = rng.random(n) < member_probs
        lists.append(
            ListRecord(
                list_id=f"L{i:03d}",
                name=name,
                description=description,
                members=frozenset(uid_array[mask].tolist()),
            )
        )

    return Dataset(
        users=users,
        tweets=tuple(tweets),
        edge_lists={
            "follow": EdgeList(kind="follow", edges=follow_edges),
            "mention": EdgeList(kind="mention", edges=mention_edges),
            "retweet": EdgeList(kind="retweet", edges=retweet_edges),
        },
        lists=tuple(lists),
    )
