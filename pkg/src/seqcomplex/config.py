"""Enumeration budgets.

Every exact routine checks the size of the search it is about to run against
a budget. The default can be overridden globally with the ``SEQCOMPLEX_BUDGET``
environment variable (an integer).
"""
import os

DEFAULT_BUDGET = 10**7
DEFAULT_GAME_STATES = 10**5


def budget(default=DEFAULT_BUDGET):
    value = os.environ.get("SEQCOMPLEX_BUDGET")
    if value is None or value == "":
        return default
    return int(value)


def game_state_budget():
    value = os.environ.get("SEQCOMPLEX_BUDGET")
    if value is None or value == "":
        return DEFAULT_GAME_STATES
    return int(value)
