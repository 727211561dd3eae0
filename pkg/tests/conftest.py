import pytest

from listcurator.corpus import Dataset, EdgeList, ListRecord, Tweet, UserRecord


@pytest.fixture
def toy_dataset() -> Dataset:
    """Hand-built six-user dataset: three seeds, three non-seeds."""
    users = (
        UserRecord("u1", "alice", True),
        UserRecord("u2", "bob", True),
        UserRecord("u3", "carol", True),
        UserRecord("u4", "dave", False),
        UserRecord("u5", "erin", False),
        UserRecord("u6", "frank", False),
    )
    tweets = (
        Tweet("u1", "hello @bob", ordinal=0),
        Tweet("u1", "hello @bob", ordinal=1),
        Tweet("u1", "RT @carol: news", is_retweet=True, ordinal=2),
        Tweet("u2", "vote #gop http://t.co/x @MittRomney!", ordinal=0),
        Tweet("u4", "weather is nice", ordinal=0),
    )
    edges = {
        "follow": EdgeList(
            "follow",
            (
                ("u1", "u4", 1),
                ("u2", "u4", 1),
                ("u3", "u4", 1),
                ("u1", "u5", 1),
                ("u2", "u5", 1),
                ("u3", "u6", 1),
            ),
        ),
        "mention": EdgeList("mention", (("u1", "u2", 2),)),
        "retweet": EdgeList("retweet", ()),
    }
    lists = (
        ListRecord("L1", "GOP Candidates", "republican candidates", frozenset({"u1", "u2"})),
        ListRecord("L2", "GOP", None, frozenset({"u1", "u2"})),
        ListRecord("L3", "News Watch", "daily news", frozenset({"u4", "u5", "u6"})),
    )
    return Dataset(users=users, tweets=tweets, edge_lists=edges, lists=lists)
