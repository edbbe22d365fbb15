"""``seqcomplex`` command line.  Exit codes: 0 pass, 1 failed check, 2 usage error."""
import argparse
import csv
import json
import sys
from fractions import Fraction

from . import classes as C
from .complexity import dudley_bound, rad_fixed_tree, rad_sup
from .covers import cover, cover_construct, packing, parse_norm
from .errors import SeqComplexError
from .games import (FixedTreeAdversary, GameSpec, StochasticAdversary, lower_bound_adversary,
                    supervised_spec, value_dual, value_primal)
from .learners import (AgnosticLearner, ConstantLearner, EWALearner, Expert, FatSOA,
                       FatSOAContext, enumerate_experts, simulate, fixed_scale_bound)
from .shattering import FatOracle, fat_dim
from .suites import (SUITES, ExperimentConfig, UnknownSuiteError, records_to_csv,
                     records_to_json, run_suite)
from .tailbounds import pollard_check
from .trees import Tree


class UsageError(Exception):
    pass


def _gen_class(spec):
    name, _, arg = spec.partition(":")
    args = [a for a in arg.split(",") if a]
    if name == "thresholds":
        return C.thresholds(int(args[0]))
    if name == "full-binary":
        return C.full_binary(int(args[0]))
    if name == "leaf":
        return C.leaf_class(int(args[0]))
    if name == "constants":
        return C.constants([Fraction(a) for a in args])
    if name == "random":
        n, m, scale, seed = (int(a) for a in args[:4])
        return C.random_class(n, m, scale, seed)
    if name == "levels":
        n, m, k, seed = (int(a) for a in args[:4])
        return C.random_class(n, m, k, seed, kind="levels", k=k)
    raise UsageError(f"unknown generator {name!r}")


def _load_class(a):
    if getattr(a, "cls", None):
        return C.FunctionClass.load(a.cls)
    if getattr(a, "gen", None):
        return _gen_class(a.gen)
    raise UsageError("give --class FILE or --gen SPEC")


def _load_tree(a, required=True):
    if getattr(a, "tree", None):
        with open(a.tree) as fh:
            return Tree.from_json(json.load(fh))
    if getattr(a, "tree_gen", None):
        name, _, arg = a.tree_gen.partition(":")
        if name == "leaf":
            return C.leaf_tree(int(arg))
        if name == "constant":
            T, v = arg.split(",")
            return Tree(int(T), [int(v)] * ((1 << int(T)) - 1))
        raise UsageError(f"unknown tree generator {name!r}")
    if required:
        raise UsageError("give --tree FILE or --tree-gen SPEC")
    return None


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=str)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _class_args(p, tree=False):
    p.add_argument("--class", dest="cls", help="class JSON file")
    p.add_argument("--gen", help="class generator, e.g. thresholds:5, constants:-1,0,1, random:n,m,scale,seed")
    if tree:
        p.add_argument("--tree", help="tree JSON file")
        p.add_argument("--tree-gen", help="tree generator: leaf:T or constant:T,x")
    p.add_argument("--out", help="write JSON here instead of stdout")


def cmd_dim(a):
    F = _load_class(a)
    if a.alpha is None:
        if F.kind != "binary":
            raise UsageError("--alpha is required for non-binary classes")
        alpha = Fraction(2)
    else:
        alpha = Fraction(a.alpha)
    oracle = FatOracle(F, alpha)
    d = oracle.dim(F.full_mask)
    cert = oracle.certificate() if d > 0 else None
    _emit({"dimension": d, "alpha": str(alpha),
           "certificate": cert.to_json() if cert else None}, a.out)
    return 0


def cmd_cover(a):
    F, x = _load_class(a), _load_tree(a)
    alpha = Fraction(a.alpha)
    if a.construct:
        V = cover_construct(F, x, a.construct)
    else:
        V = cover(F, x, alpha, parse_norm(a.norm), "greedy" if a.greedy else "exact")
    _emit({"size": len(V), "cover": V.to_json()}, a.out)
    return 0


def cmd_pack(a):
    F, x = _load_class(a), _load_tree(a)
    rows, paths = packing(F, x, Fraction(a.alpha), parse_norm(a.norm), strong=a.strong)
    _emit({"size": len(rows), "members": rows,
           "functions": [[str(v) for v in F.row(i)] for i in rows],
           "certificate_paths": paths}, a.out)
    return 0


def cmd_rad(a):
    F = _load_class(a)
    x = _load_tree(a, required=False)
    if x is not None:
        res = rad_fixed_tree(F, x, "exact" if a.mode == "exact" else "mc", a.trials, a.seed)
    else:
        if a.horizon is None:
            raise UsageError("give --tree or --horizon")
        res = rad_sup(F, a.points, a.horizon, a.mode, seed=a.seed)
    _emit(res.to_json(), a.out)
    return 0


def cmd_dudley(a):
    F, x = _load_class(a), _load_tree(a)
    rep = dudley_bound(F, x, a.max_level, "greedy" if a.greedy else "exact", parse_norm(a.norm))
    r = rad_fixed_tree(F, x).value
    out = rep.to_json()
    out.update({"rad": str(r), "holds": float(r) <= rep.value})
    _emit(out, a.out)
    return 0 if out["holds"] else 1


def cmd_value(a):
    F = _load_class(a)
    if a.supervised:
        labels = [Fraction(y) for y in (a.labels or "-1,1").split(",")]
        spec = supervised_spec(F, labels, a.horizon)
    else:
        spec = GameSpec(F, a.horizon)
    out = {}
    if a.form in ("primal", "both"):
        out["primal"] = value_primal(spec).to_json()
    if a.form in ("dual", "both"):
        out["dual"] = value_dual(spec).to_json()
    holds = True
    if a.form == "both":
        holds = out["primal"]["value"] == out["dual"]["value"]
        out["equal"] = holds
    _emit(out, a.out)
    return 0 if holds else 1


def _make_learner(a, F):
    alpha = Fraction(a.alpha)
    if a.learner == "fatsoa":
        return FatSOA(F, alpha, realizable=False)
    if a.learner == "const0":
        return ConstantLearner(0)
    if a.learner == "ewa":
        ctx = FatSOAContext(F, alpha)
        return EWALearner([Expert(s, ctx) for s in enumerate_experts(F, alpha, a.horizon, context=ctx)],
                          T=a.horizon)
    if a.learner == "agnostic":
        return AgnosticLearner(F, a.horizon)
    raise UsageError(a.learner)


def _make_adversary(a, F):
    if a.adversary == "tree":
        x = _load_tree(a)
        return FixedTreeAdversary(x)
    if a.adversary == "lowerbound":
        return lower_bound_adversary(F, Fraction(a.alpha), a.horizon)
    if a.adversary == "stochastic":
        return StochasticAdversary(F, a.target, a.noise)
    raise UsageError(a.adversary)


def cmd_simulate(a):
    F = _load_class(a)
    learner, adv = _make_learner(a, F), _make_adversary(a, F)
    traces = simulate(learner, adv, F, a.horizon, a.trials, a.seed)
    fields = ["trial", "t", "x", "y", "prediction", "loss", "expected_loss"]
    sink = open(a.csv, "w", newline="") if a.csv else sys.stdout
    w = csv.DictWriter(sink, fields, lineterminator="\n")
    w.writeheader()
    for tr in traces:
        for row in tr.rows():
            w.writerow(row)
    if a.csv:
        sink.close()
    regrets = [float(tr.regret) for tr in traces]
    mean = sum(regrets) / len(regrets)
    summary = {"learner": a.learner, "adversary": a.adversary, "horizon": a.horizon,
               "trials": a.trials, "seed": a.seed, "mean_regret": mean,
               "mean_expected_regret": sum(tr.expected_regret for tr in traces) / len(traces)}
    if a.adversary == "lowerbound":
        summary["lower_bound"] = adv.bound()
    fat = fat_dim(F, Fraction(a.alpha))
    summary["fat"] = fat
    summary["fixed_scale_bound"] = fixed_scale_bound(Fraction(a.alpha), a.horizon, max(fat, 0))
    if isinstance(learner, AgnosticLearner):
        summary["agnostic_bound"] = learner.bound()
    _emit(summary, a.summary)
    return 0


def cmd_verify(a):
    name = "tail" if a.suite == "pollard" else a.suite
    if name == "tail" and (a.cls or a.gen):
        F, x = _load_class(a), _load_tree(a)
        rep = pollard_check(F, x, Fraction(a.alpha or 1))
        _emit(rep.to_json(), a.out)
        return 0 if rep.holds else 1
    params = json.loads(a.params) if a.params else {}
    if a.seed is not None:
        params["seed"] = a.seed
    if a.instances is not None:
        params["instances"] = a.instances
    rows = run_suite(name, params)
    return _write_report(rows, {"suite": name, "params": params}, a.out, a.format)


def _write_report(rows, meta, out, fmt):
    text = records_to_csv(rows) if fmt == "csv" else records_to_json(rows, meta)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    failed = [r for r in rows if not r.holds]
    for r in failed:
        print(f"FAIL {r.suite} {r.instance}: {r.lhs} {r.relation} {r.rhs}", file=sys.stderr)
    return 1 if failed else 0


def cmd_report(a):
    with open(a.config) as fh:
        cfg = ExperimentConfig.from_json(json.load(fh))
    suites = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    rows = []
    for s in suites:
        rows += run_suite(s, cfg.params)
    return _write_report(rows, {"config": cfg.to_json()}, a.out or cfg.output, cfg.fmt)


def build_parser():
    ap = argparse.ArgumentParser(prog="seqcomplex", description="Sequential complexity toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="fat-shattering / Littlestone dimension")
    _class_args(p)
    p.add_argument("--alpha")
    p.set_defaults(fn=cmd_dim)

    for name, fn in (("cover", cmd_cover), ("pack", cmd_pack)):
        p = sub.add_parser(name, help=f"{name} a class on a tree")
        _class_args(p, tree=True)
        p.add_argument("--alpha", default="0")
        p.add_argument("--norm", default="inf", choices=["0", "1", "2", "inf"])
        g = p.add_mutually_exclusive_group()
        g.add_argument("--exact", action="store_true")
        g.add_argument("--greedy", action="store_true")
        if name == "cover":
            p.add_argument("--construct", choices=["fat1", "fat2"])
        else:
            p.add_argument("--strong", action="store_true")
        p.set_defaults(fn=fn)

    p = sub.add_parser("rad", help="sequential Rademacher complexity")
    _class_args(p, tree=True)
    p.add_argument("--mode", default="exact", choices=["exact", "local", "mc"])
    p.add_argument("--horizon", type=int)
    p.add_argument("--points", type=int)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_rad)

    p = sub.add_parser("dudley", help="integrated complexity bound on a tree")
    _class_args(p, tree=True)
    p.add_argument("--norm", default="2", choices=["1", "2", "inf"])
    p.add_argument("--greedy", action="store_true")
    p.add_argument("--max-level", type=int, default=8)
    p.set_defaults(fn=cmd_dudley)

    p = sub.add_parser("value", help="minimax value of the online game")
    _class_args(p)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--supervised", action="store_true")
    p.add_argument("--labels")
    p.add_argument("--form", default="both", choices=["primal", "dual", "both"])
    p.set_defaults(fn=cmd_value)

    p = sub.add_parser("simulate", help="run a learner against an adversary")
    _class_args(p, tree=True)
    p.add_argument("--learner", required=True, choices=["fatsoa", "ewa", "agnostic", "const0"])
    p.add_argument("--adversary", required=True, choices=["tree", "lowerbound", "stochastic"])
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--alpha", default="1")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--csv", help="trace CSV path (default stdout)")
    p.add_argument("--summary", help="summary JSON path (default stdout)")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", help=", ".join(SUITES))
    _class_args(p, tree=True)
    p.add_argument("--alpha")
    p.add_argument("--seed", type=int)
    p.add_argument("--instances", type=int)
    p.add_argument("--params", help="JSON object of suite parameters")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("report", help="run suites from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return a.fn(a)
    except (UsageError, UnknownSuiteError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except SeqComplexError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1 if not isinstance(e, (ValueError, TypeError)) else 2


if __name__ == "__main__":
    sys.exit(main())
