"""Acceptance criteria, one test per criterion.

Each test runs the matching verification suite at the stated parameters,
asserts that every row holds, and checks the instance counts the criterion
asks for.  A ``PASS``/``FAIL`` line per criterion is printed in the pytest
summary (see conftest.py) and when this file is run directly.
"""
import time
from collections import Counter

import pytest

from seqcomplex.suites import run_suite

RESULTS = {}

CRITERIA = [
    ("AC01", "minimax-duality"),
    ("AC02", "value-vs-rad"),
    ("AC03", "rad-lower"),
    ("AC04", "packing-chain"),
    ("AC05", "zero-cover-gap"),
    ("AC06", "sauer"),
    ("AC07", "massart"),
    ("AC08", "chaining"),
    ("AC09", "fat-rad"),
    ("AC10", "fat-soa"),
    ("AC11", "experts"),
    ("AC12", "ewa"),
    ("AC13", "lower-bound"),
    ("AC14", "linear"),
    ("AC15", "structural"),
    ("AC16", "tail"),
    ("AC17", "pointwise-entropy"),
]


def base(r):
    return r.instance.split("-")[0]


def check_counts(name, rows):
    v = [r.values for r in rows]
    if name in ("minimax-duality", "value-vs-rad"):
        assert len(rows) == 20
    elif name == "rad-lower":
        assert all(int(x["T"]) <= 3 and int(x["n"]) <= 2 for x in v if "T" in x)
        assert sum(int(x["checked"]) for x in v if "checked" in x) > 0
    elif name == "packing-chain":
        assert len({base(r) for r in rows}) == 50
        assert {x["p"] for x in v} == {"1", "2", "inf"}
    elif name == "zero-cover-gap":
        got = {r.instance: (r.lhs, r.rhs) for r in rows}
        assert got["zero-cover"] == ("2", "2") and got["weak-packing"] == ("4", "4")
    elif name == "sauer":
        assert len({base(r) for r in rows if r.instance[0].isdigit()}) == 30
        assert any(r.instance == "recurrence" for r in rows)
        assert all(int(x["k"]) <= 2 and int(x["T"]) <= 3 for x in v if "k" in x)
    elif name == "massart":
        assert sum(1 for r in rows if "anchor" not in r.tags) == 100
        assert {r.instance for r in rows if "anchor" in r.tags} == {"anchor-lhs", "anchor-rhs"}
    elif name == "chaining":
        c = Counter(x["mode"] for x in v)
        assert c["exact"] + c["greedy"] == 30 and c["exact"] > 0 and c["greedy"] > 0
        assert all(int(x["T"]) <= (3 if x["mode"] == "exact" else 8) for x in v)
    elif name == "fat-rad":
        assert len(rows) >= 1
    elif name == "fat-soa":
        assert len(rows) >= 10 and all(int(x["T"]) <= 4 for x in v)
    elif name == "experts":
        kinds = Counter(r.instance.split("-", 1)[1] for r in rows)
        assert set(kinds) == {"count", "count-bound", "approx"}
    elif name == "ewa":
        assert len({base(r) for r in rows}) >= 1
    elif name == "lower-bound":
        inst = {r.instance for r in rows}
        assert {"T04-const0", "T08-const0", "T04-agnostic", "T08-agnostic"} <= inst
    elif name == "linear":
        assert len(rows) == 50
    elif name == "structural":
        assert {x["property"] for x in v} >= {"monotone", "translation"}
    elif name == "tail":
        assert sum(1 for r in rows if not r.instance.endswith("monotone")) == 20
        assert all(int(x["T"]) <= 12 for x in v if "T" in x)
    elif name == "pointwise-entropy":
        assert len(rows) >= 10


@pytest.mark.parametrize("cid,name", CRITERIA, ids=[c for c, _ in CRITERIA])
def test_criterion(cid, name):
    t0 = time.perf_counter()
    ok = False
    try:
        rows = run_suite(name)
        failed = [f"{r.instance}: {r.lhs} {r.relation} {r.rhs}" for r in rows if not r.holds]
        assert rows, "suite produced no rows"
        assert not failed, "failing rows: " + "; ".join(failed)
        check_counts(name, rows)
        if name == "ewa":
            assert time.perf_counter() - t0 < 120
        ok = True
    finally:
        line = f"{'PASS' if ok else 'FAIL'} {cid} {name} ({time.perf_counter() - t0:.1f}s)"
        RESULTS[cid] = line
        print(line)


if __name__ == "__main__":
    import sys
    bad = 0
    for cid, name in CRITERIA:
        try:
            test_criterion(cid, name)
        except AssertionError as e:
            bad += 1
            print(f"  {e}")
    sys.exit(1 if bad else 0)
