"""Enumeration budgets.

``GPT_BUDGET`` in the environment overrides the default cap on generated
subsets for event enumeration and related exhaustive searches.
"""

from __future__ import annotations

import os

DEFAULT_EVENT_BUDGET = 2**20
MAX_AMBIENT_DIM = 64
MAX_HREP_ROWS = 512


def event_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get("GPT_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_EVENT_BUDGET
