"""Verification suites and report records.

Each suite builds seeded instances, evaluates both sides of one inequality
(or equality) per row and returns :class:`ReportRecord` rows sorted by
instance id.  A suite passes when every row holds.
"""
import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from math import inf, log, sqrt

import numpy as np

from .classes import FunctionClass, constants, leaf_class, leaf_tree, random_class
from .complexity import (dudley_bound, fat_rad_relation, linear_rad_check, massart_bound,
                         rad_fixed_tree, rad_sup, structural_checks)
from .covers import (cover_construct, cover_number, g_k, is_cover, packing_number,
                     pointwise_entropy, sauer_bound, strong_packing_number, zero_cover_min)
from .errors import SeqComplexError
from .games import (FixedTreeAdversary, GameSpec, lower_bound_adversary, supervised_spec,
                    value_dual, value_primal)
from .learners import (AgnosticLearner, ConstantLearner, Expert, FatSOA, FatSOAContext,
                       enumerate_experts, ewa_bound, ewa_loss_matrix_trials, exact_expected_regret,
                       expert_count, realizable_runs, simulate)
from .rng import rng as make_rng
from .shattering import fat_dim
from .tailbounds import pollard_check, tail_probability
from .trees import Tree, enumerate_trees

__all__ = ["ReportRecord", "ExperimentConfig", "SUITES", "UnknownSuiteError", "run_suite",
           "records_to_json", "records_from_json", "records_to_csv", "records_from_csv"]


class UnknownSuiteError(SeqComplexError, KeyError):
    pass


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _num(s):
    if s in ("", None):
        return None
    return float(Fraction(s)) if "/" in s or s.lstrip("-").isdigit() else float(s)


@dataclass
class ReportRecord:
    """One checked relation ``lhs <relation> rhs``; quantities are stored as strings."""
    suite: str
    instance: str
    relation: str
    lhs: str
    rhs: str
    margin: float
    holds: bool
    values: dict = field(default_factory=dict)
    tags: list = field(default_factory=list)
    runtime: float = 0.0

    def to_json(self):
        return asdict(self)


def record(suite, instance, lhs, rhs, relation="<=", holds=None, tol=0.0, values=None, tags=()):
    """Build a row; ``holds`` is computed from the relation unless given."""
    if holds is None:
        if relation == "<=":
            holds = lhs <= rhs + tol
        elif relation == "<":
            holds = lhs < rhs
        elif relation == ">=":
            holds = lhs >= rhs - tol
        elif relation == "==":
            holds = lhs == rhs if tol == 0 else abs(lhs - rhs) <= tol
        else:
            raise ValueError(relation)
    a, b = float(lhs), float(rhs)
    margin = b - a if relation in ("<=", "<") else a - b if relation == ">=" else -abs(a - b)
    vals = {k: _fmt(v) if not isinstance(v, (list, dict)) else v for k, v in (values or {}).items()}
    return ReportRecord(suite, instance, relation, _fmt(lhs), _fmt(rhs), float(margin),
                        bool(holds), vals, list(tags))


@dataclass
class ExperimentConfig:
    suite: str
    params: dict = field(default_factory=dict)
    output: str = None
    fmt: str = "json"

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        return cls(obj["suite"], dict(obj.get("params", {})), obj.get("output"),
                   obj.get("fmt", "json"))


def _inst(i):
    return f"{i:04d}"


def _seed(seed, i, stream):
    return int(make_rng(seed, stream * 1000 + i).integers(0, 2 ** 31))


def _small_class(seed, n, m, scale=2, low=None, high=None):
    return random_class(n, m, scale, seed, low=low, high=high)


def _random_tree(g, n, T):
    return Tree(T, g.integers(0, n, size=(1 << T) - 1).tolist())


# -- games ------------------------------------------------------------------------

def _random_game(seed, i):
    g = make_rng(seed, 100 + i)
    n, m, T = int(g.integers(1, 3)), int(g.integers(1, 4)), int(g.integers(1, 4))
    F = _small_class(_seed(seed, i, 1), n, m, scale=2, low=0, high=2)
    return F, T


def suite_minimax_duality(p):
    out = []
    for i in range(p.get("instances", 20)):
        F, T = _random_game(p.get("seed", 0), i)
        a = value_primal(GameSpec(F, T)).value
        b = value_dual(GameSpec(F, T)).value
        out.append(record("minimax-duality", _inst(i), a, b, "==",
                          values={"T": T, "n": F.domain_size, "m": F.size}, tags=["exact"]))
    return out


def suite_value_vs_rad(p):
    out = []
    for i in range(p.get("instances", 20)):
        F, T = _random_game(p.get("seed", 0), i)
        v = value_primal(GameSpec(F, T)).value
        r = rad_sup(F, F.domain_size, T).value
        out.append(record("value-vs-rad", _inst(i), v, 2 * r, "<=",
                          values={"T": T, "rad": r}, tags=["exact"]))
    return out


def suite_rad_lower(p):
    """Uniform labels along a tree make every learner's expected regret equal the tree's average."""
    out = []
    seed = p.get("seed", 0)
    for i in range(p.get("instances", 8)):
        g = make_rng(seed, 200 + i)
        n, T, m = int(g.integers(1, 3)), int(g.integers(1, 4)), int(g.integers(1, 4))
        F = _small_class(_seed(seed, i, 2), n, m)
        learners = {"const0": ConstantLearner(0), "fatsoa": FatSOA(F, Fraction(1, 2), realizable=False)}
        bad = 0
        checked = 0
        for x in enumerate_trees(n, T):
            r = rad_fixed_tree(F, x).value
            adv = FixedTreeAdversary(x)
            for L in learners.values():
                checked += 1
                if exact_expected_regret(L, adv, F, T) != r:
                    bad += 1
        out.append(record("rad-lower", _inst(i) + "-trees", bad, 0, "==",
                          values={"checked": checked, "T": T, "n": n}, tags=["exact"]))
        rs = rad_sup(F, n, T).value
        vs = value_primal(supervised_spec(F, (-1, 1), T)).value
        out.append(record("rad-lower", _inst(i) + "-value", rs, vs, "<=", tags=["exact"]))
    return out


# -- covers -------------------------------------------------------------------------

def suite_packing_chain(p):
    out = []
    seed = p.get("seed", 0)
    alphas = [Fraction(1, 4), Fraction(1, 2), Fraction(1)]
    norms = [1, 2, inf]
    for i in range(p.get("instances", 50)):
        g = make_rng(seed, 300 + i)
        n, m, T = int(g.integers(1, 4)), int(g.integers(2, 5)), int(g.integers(1, 4))
        F = _small_class(_seed(seed, i, 3), n, m)
        x = _random_tree(g, n, T)
        a, q = alphas[int(g.integers(0, 3))], norms[i % 3]
        sp = strong_packing_number(F, x, 2 * a, q)
        N = cover_number(F, x, a, q)
        P = packing_number(F, x, a, q)
        vals = {"alpha": a, "p": q, "T": T, "m": F.size}
        out.append(record("packing-chain", _inst(i) + "-strong", sp, N, "<=", values=vals))
        out.append(record("packing-chain", _inst(i) + "-weak", N, P, "<=", values=vals))
    return out


def suite_zero_cover_gap(p):
    T = p.get("T", 3)
    alpha = Fraction(p.get("alpha", "1/4"))
    F, x = leaf_class(T), leaf_tree(T)
    z, _ = zero_cover_min(F, x)
    w = packing_number(F, x, alpha, inf)
    return [record("zero-cover-gap", "zero-cover", z, 2, "==", tags=["anchor"]),
            record("zero-cover-gap", "weak-packing", w, 1 << (T - 1), "==",
                   values={"alpha": alpha}, tags=["anchor"])]


def suite_sauer(p):
    out = []
    seed = p.get("seed", 0)
    for i in range(p.get("instances", 30)):
        g = make_rng(seed, 400 + i)
        k, T = int(g.integers(1, 3)), int(g.integers(1, 4))
        n, m = int(g.integers(2, 4)), int(g.integers(2, 7))
        F = random_class(n, m, k, _seed(seed, i, 4), kind="levels", k=k)
        x = _random_tree(g, n, T)
        f1, f2 = fat_dim(F, Fraction(1, k)), fat_dim(F, Fraction(2, k))
        z, _ = zero_cover_min(F, x)
        V1 = cover_construct(F, x, "fat1")
        V2 = cover_construct(F, x, "fat2")
        half = cover_number(F, x, Fraction(1, 2 * k), inf)
        vals = {"k": k, "T": T, "fat1": f1, "fat2": f2}
        out.append(record("sauer", _inst(i) + "-zero", z, len(V1), "<=", values=vals))
        out.append(record("sauer", _inst(i) + "-construct", len(V1), g_k(f1, T, k), "<=",
                          values=vals))
        out.append(record("sauer", _inst(i) + "-construct-valid", int(is_cover(V1, F, x)), 1, "=="))
        out.append(record("sauer", _inst(i) + "-half", half, g_k(f2, T, k), "<=", values=vals))
        out.append(record("sauer", _inst(i) + "-half-construct", len(V2), g_k(f2, T, k), "<=",
                          values=vals))
        out.append(record("sauer", _inst(i) + "-half-construct-valid",
                          int(is_cover(V2, F, x)), 1, "=="))
    bad = [(d, T, k) for k in (1, 2, 3) for d in range(13) for T in range(1, 13)
           if g_k(d, T, k) != g_k(d, T - 1, k) + k * g_k(d - 1, T - 1, k)]
    out.append(record("sauer", "recurrence", len(bad), 0, "==", values={"failures": bad[:5]}))
    loose = [(d, T, k) for k in (1, 2, 3) for T in range(1, 13) for d in range(1, T + 1)
             if g_k(d, T, k) > sauer_bound(d, T, k) * (1 + 1e-12)]
    out.append(record("sauer", "closed-form", len(loose), 0, "=="))
    return out


# -- complexity ---------------------------------------------------------------------

def suite_massart(p):
    out = []
    seed = p.get("seed", 0)
    for i in range(p.get("instances", 100)):
        g = make_rng(seed, 500 + i)
        T, size = int(g.integers(1, p.get("max_T", 10) + 1)), int(g.integers(2, 6))
        V = [Tree(T, [Fraction(int(v), 2) for v in g.integers(-2, 3, size=(1 << T) - 1)])
             for _ in range(size)]
        lhs, rhs, _ = massart_bound(V)
        out.append(record("massart", _inst(i), lhs, rhs, "<=", tol=1e-9,
                          values={"T": T, "trees": size}))
    V = [Tree(2, [1, 1, 1]), Tree(2, [-1, -1, -1])]
    lhs, rhs, _ = massart_bound(V)
    out.append(record("massart", "anchor-lhs", lhs, 1, "==", tags=["anchor"]))
    out.append(record("massart", "anchor-rhs", rhs, sqrt(4 * log(2)), "==", tol=1e-9,
                      tags=["anchor"]))
    return out


def suite_chaining(p):
    out = []
    seed = p.get("seed", 0)
    total = p.get("instances", 30)
    for i in range(total):
        g = make_rng(seed, 600 + i)
        exact = i < total // 2
        T = int(g.integers(1, 4)) if exact else int(g.integers(4, 9))
        n, m = int(g.integers(1, 4)), int(g.integers(2, 5))
        F = _small_class(_seed(seed, i, 6), n, m)
        x = _random_tree(g, n, T)
        mode = "exact" if exact else "greedy"
        r = rad_fixed_tree(F, x).value
        d = dudley_bound(F, x, max_level=p.get("max_level", 6), cover_mode=mode)
        out.append(record("chaining", _inst(i), r, d.value, "<=",
                          values={"T": T, "mode": mode, "alpha": d.alpha}, tags=[mode]))
    return out


def suite_fat_rad(p):
    out = []
    seed = p.get("seed", 0)
    for i in range(p.get("instances", 12)):
        g = make_rng(seed, 700 + i)
        n, T, m = int(g.integers(1, 3)), int(g.integers(1, 4)), int(g.integers(2, 5))
        F = _small_class(_seed(seed, i, 7), n, m)
        rep = fat_rad_relation(F, n, T)
        worst = max((r["fat"] for r in rep["rows"]), default=-1)
        out.append(record("fat-rad", _inst(i), worst, T, "<",
                          values={"rad": rep["rad"], "threshold": rep["threshold"],
                                  "scales": len(rep["rows"])}))
    return out


def suite_linear(p):
    seed, T = p.get("seed", 0), p.get("T", 8)
    g = make_rng(seed, 1400)
    X = g.normal(size=(p.get("points", 6), 3))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    values, bound, _ = linear_rad_check(X.tolist(), T, n_trees=p.get("trees", 50), seed=seed)
    return [record("linear", _inst(i), v, sqrt(2 * T), "<=", tol=1e-9) for i, v in enumerate(values)]


def suite_structural(p):
    out = []
    seed = p.get("seed", 0)
    for i in range(p.get("instances", 8)):
        g = make_rng(seed, 1500 + i)
        n, T, m = int(g.integers(1, 3)), int(g.integers(1, 3)), int(g.integers(1, 5))
        F = _small_class(_seed(seed, i, 15), n, m)
        rep = structural_checks(F, n, T)
        for j, r in enumerate(rep["rows"]):
            rel = "==" if r["property"] in ("convex-hull", "scaling", "reflection", "translation") else "<="
            out.append(record("structural", f"{_inst(i)}-{j:02d}", r["lhs"], r["rhs"], rel,
                              holds=r["holds"], values={"property": r["property"]}))
    return out


def suite_tail(p):
    out = []
    seed = p.get("seed", 0)
    alphas = [Fraction(1, 2), Fraction(1), Fraction(2)]
    for i in range(p.get("instances", 20)):
        g = make_rng(seed, 1600 + i)
        T, n, m = int(g.integers(2, p.get("max_T", 12) + 1)), int(g.integers(1, 4)), int(g.integers(1, 5))
        F = _small_class(_seed(seed, i, 16), n, m)
        x = _random_tree(g, n, T)
        a = alphas[int(g.integers(0, 3))]
        rep = pollard_check(F, x, a)
        out.append(record("tail", _inst(i), rep.lhs, rep.rhs, "<=",
                          values={"alpha": a, "T": T, "cover": rep.cover_size,
                                  "fat_rhs": rep.fat_rhs}))
        seq = [tail_probability(F, x, b) for b in (Fraction(1, 4), Fraction(1, 2), 1, 2, 4)]
        mono = all(s >= t for s, t in zip(seq, seq[1:]))
        out.append(record("tail", _inst(i) + "-monotone", int(mono), 1, "=="))
    return out


def suite_pointwise_entropy(p):
    out = []
    seed = p.get("seed", 0)
    alphas = [Fraction(0), Fraction(1, 4), Fraction(1, 2)]
    for i in range(p.get("instances", 10)):
        g = make_rng(seed, 1700 + i)
        n, T, m = int(g.integers(1, 3)), int(g.integers(1, 3)), int(g.integers(1, 5))
        F = _small_class(_seed(seed, i, 17), n, m)
        for a in alphas:
            pe = pointwise_entropy(F, a)
            worst = max(cover_number(F, x, a, inf) for x in enumerate_trees(n, T))
            out.append(record("pointwise-entropy", f"{_inst(i)}-{a}", pe, worst, ">=",
                              values={"alpha": a, "T": T}))
    return out


# -- learners -------------------------------------------------------------------------

def suite_fat_soa(p):
    out = []
    seed = p.get("seed", 0)
    alphas = [Fraction(1, 4), Fraction(1, 2), Fraction(1)]
    T = p.get("T", 4)
    cases = [(constants([-1, 0, 1], 2), Fraction(1), "constants")]
    for i in range(p.get("instances", 12)):
        g = make_rng(seed, 800 + i)
        n, m = int(g.integers(1, 3)), int(g.integers(2, 7))
        F = _small_class(_seed(seed, i, 8), n, m, scale=int(g.choice([2, 4])))
        cases.append((F, alphas[int(g.integers(0, 3))], _inst(i)))
    for F, a, name in cases:
        ctx = FatSOAContext(F, a)
        fat = ctx.oracle.dim(F.full_mask)
        worst = max(mk for _, _, mk in realizable_runs(F, a, T, ctx))
        out.append(record("fat-soa", name, worst, fat, "<=", values={"alpha": a, "T": T}))
    return out


def suite_experts(p):
    out = []
    seed = p.get("seed", 0)
    alphas = [Fraction(1, 2), Fraction(1)]
    for i in range(p.get("instances", 8)):
        g = make_rng(seed, 900 + i)
        n, m, T = int(g.integers(1, 3)), int(g.integers(2, 5)), int(g.integers(2, 4))
        F = _small_class(_seed(seed, i, 9), n, m)
        a = alphas[int(g.integers(0, 2))]
        ctx = FatSOAContext(F, a)
        fat = ctx.oracle.dim(F.full_mask)
        specs = enumerate_experts(F, a, T, context=ctx)
        formula = expert_count(T, fat, len(ctx.grid))
        vals = {"alpha": a, "T": T, "fat": fat}
        out.append(record("experts", _inst(i) + "-count", len(specs), formula, "==", values=vals))
        out.append(record("experts", _inst(i) + "-count-bound", formula,
                          float(2 * T / a) ** fat, "<=", values=vals))
        experts = [Expert(s, ctx) for s in specs]
        misses = 0
        S = F.scale
        for xs in product(range(n), repeat=T):
            preds = np.empty((len(experts), T), dtype=object)
            for e_i, e in enumerate(experts):
                e.reset()
                for t, x in enumerate(xs):
                    preds[e_i, t] = e.predict_value(x)
                    e.advance(x)
            for row in F.table.tolist():
                target = [Fraction(row[x], S) for x in xs]
                if not any(all(abs(pr - y) <= a for pr, y in zip(pe, target)) for pe in preds):
                    misses += 1
        out.append(record("experts", _inst(i) + "-approx", misses, 0, "==", values=vals))
    return out


def suite_ewa(p):
    out = []
    seed, T, trials = p.get("seed", 0), p.get("T", 16), p.get("trials", 10000)
    for i in range(p.get("instances", 5)):
        g = make_rng(seed, 1200 + i)
        k = int(g.integers(2, 9))
        if i % 2:
            L = g.integers(0, 2, size=(T, k)).astype(float)
        else:
            L = g.random(size=(T, k))
        pri = g.dirichlet(np.ones(k))
        mean, se, totals = ewa_loss_matrix_trials(L, pri, trials, _seed(seed, i, 12))
        for j in range(k):
            b = ewa_bound(float(totals[j]), T, float(pri[j]))
            out.append(record("ewa", f"{_inst(i)}-{j}", mean, b + 3 * se, "<=",
                              values={"stderr": se, "prior": float(pri[j])}))
    return out


def suite_lower_bound(p):
    out = []
    trials, seed = p.get("trials", 200), p.get("seed", 0)
    B = constants([-1, 1])
    for T in p.get("horizons", [4, 8]):
        adv = lower_bound_adversary(B, 2, T)
        lb = adv.bound()
        r0 = exact_expected_regret(ConstantLearner(0), adv, B, T)
        out.append(record("lower-bound", f"T{T:02d}-const0", r0, lb, ">=",
                          values={"d": adv.d}, tags=["exact"]))
        A = AgnosticLearner(B, T, max_scales=p.get("max_scales", 3))
        regrets = np.array([float(tr.regret) for tr in simulate(A, adv, B, T, trials, seed)])
        mean = float(regrets.mean())
        se = float(regrets.std(ddof=1) / sqrt(trials))
        out.append(record("lower-bound", f"T{T:02d}-agnostic", mean, lb - 3 * se, ">=",
                          values={"stderr": se, "trials": trials}, tags=["monte-carlo"]))
        out.append(record("lower-bound", f"T{T:02d}-agnostic-upper", mean, A.bound() + 3 * se,
                          "<=", values={"stderr": se}, tags=["monte-carlo"]))
    return out


SUITES = {
    "minimax-duality": suite_minimax_duality,
    "value-vs-rad": suite_value_vs_rad,
    "rad-lower": suite_rad_lower,
    "packing-chain": suite_packing_chain,
    "zero-cover-gap": suite_zero_cover_gap,
    "sauer": suite_sauer,
    "massart": suite_massart,
    "chaining": suite_chaining,
    "fat-rad": suite_fat_rad,
    "fat-soa": suite_fat_soa,
    "experts": suite_experts,
    "ewa": suite_ewa,
    "lower-bound": suite_lower_bound,
    "linear": suite_linear,
    "structural": suite_structural,
    "tail": suite_tail,
    "pointwise-entropy": suite_pointwise_entropy,
}


def run_suite(name, params=None):
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t0 = time.perf_counter()
    rows = SUITES[name](dict(params or {}))
    elapsed = time.perf_counter() - t0
    for r in rows:
        r.runtime = round(elapsed / max(len(rows), 1), 6)
    return sorted(rows, key=lambda r: r.instance)


# -- serialisation ---------------------------------------------------------------------

_CSV_FIELDS = ["suite", "instance", "relation", "lhs", "rhs", "margin", "holds", "values",
               "tags", "runtime"]


def records_to_json(rows, meta=None):
    return json.dumps({"meta": meta or {}, "records": [r.to_json() for r in rows]},
                      indent=2, sort_keys=True)


def records_from_json(text):
    return [ReportRecord(**r) for r in json.loads(text)["records"]]


def records_to_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, _CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        d = r.to_json()
        d["values"] = json.dumps(d["values"], sort_keys=True)
        d["tags"] = ";".join(d["tags"])
        d["holds"] = "true" if r.holds else "false"
        d["margin"] = repr(r.margin)
        d["runtime"] = repr(r.runtime)
        w.writerow(d)
    return buf.getvalue()


def records_from_csv(text):
    out = []
    for d in csv.DictReader(io.StringIO(text)):
        out.append(ReportRecord(d["suite"], d["instance"], d["relation"], d["lhs"], d["rhs"],
                                float(d["margin"]), d["holds"] == "true", json.loads(d["values"]),
                                d["tags"].split(";") if d["tags"] else [], float(d["runtime"])))
    return out
