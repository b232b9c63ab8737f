"""One pass/fail line per acceptance criterion; tolerances live in
``phasetrain.acceptance`` and are shared with ``phasetrain selftest``."""

import re

import pytest

from phasetrain import acceptance


def _slug(c):
    return f"criterion_{c.number:02d}_" + re.sub(r"[^a-z0-9]+", "_", c.title.lower()).strip("_")


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=_slug)
def test_criterion(criterion):
    outcome = acceptance.run_one(criterion)
    print(outcome.line())
    assert outcome.passed, outcome.line()
