import os

import pytest

from hinglishqe.core import LidLabel, PosLabel, TaggedSentence, TaggedToken

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


def sent(pairs, sid="s"):
    """Build a TaggedSentence from (lid, pos) string/None pairs."""
    tokens = tuple(
        TaggedToken(text=f"tok{i}", lid=LidLabel(lid),
                    pos=PosLabel(pos) if pos is not None else None)
        for i, (lid, pos) in enumerate(pairs)
    )
    return TaggedSentence(id=sid, tokens=tokens)


def lid_sent(lids, sid="s"):
    return sent([(l, None) for l in lids], sid=sid)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
