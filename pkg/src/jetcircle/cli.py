"""Command-line front end.

Exit codes: 0 pass, 1 failed check, 2 usage or parse error, 3 budget exceeded.
Identical arguments and seed give byte-identical JSON apart from ``runtime_ms``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import arcs, counting, expsums, harmonic
from .errors import BudgetExceeded, CoverageViolation, InsufficientPrecision, JetCircleError, NonIntegralResult
from .field import RootSum, parse_field
from .forms import parse_form
from .jets import JetLaurent
from .seeding import suite_rng

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

VERIFY_SUITES = ("ball-integral", "box-sum", "weyl", "shrink", "arcs", "diagonal", "recursion", "projective", "minor")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    field: str
    form: str | None
    n: int | None
    d: int
    e: int
    m: int
    budget: int | None
    seed: int
    workers: int
    output: str

    def field_obj(self):
        try:
            return parse_field(self.field)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def form_obj(self, field=None):
        field = self.field_obj() if field is None else field
        text = self.form
        if text is None:
            if self.n is None:
                raise UsageError("give --form or --n")
            text = "diag:" + ",".join(["1"] * self.n)
        try:
            F = parse_form(text, field, n=self.n, d=self.d)
        except ValueError as exc:
            raise UsageError(f"bad form {text!r}: {exc}") from None
        if self.n is not None and F.n != self.n:
            raise UsageError(f"form has {F.n} variables, --n is {self.n}")
        return F


def _int_list(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(p):
    p.add_argument("--config", help="JSON file whose keys mirror the long options")
    p.add_argument("--field", default="5", help='"p" or "p^k:c0,...,ck"')
    p.add_argument("--form", help='"diag:a1,...,an" or "i1..id=c;..." (default: diagonal with unit coefficients)')
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--e", type=int, default=1)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--budget", type=lambda s: int(float(s)), help="point budget (default $JETCIRCLE_BUDGET or 1e9)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", choices=("json", "csv", "pretty"), default="json")


def build_parser():
    parser = argparse.ArgumentParser(prog="jetcircle", description="Exact circle-method checks over jet rings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="N_m(e) directly, through characters, or both")
    _common(p)
    p.add_argument("--method", choices=("direct", "characters", "both"), default="direct")

    p = sub.add_parser("verify", help="run one verification suite")
    p.add_argument("suite", choices=VERIFY_SUITES)
    _common(p)
    p.add_argument("--N", type=int, default=1, help="ball radius for ball-integral and box-sum")
    p.add_argument("--depth", type=int, help="alpha digit depth for ball-integral and box-sum (default N + 2)")
    p.add_argument("--route", choices=("auto", "explicit", "factorized"), default="auto")
    p.add_argument("--samples", type=int, default=100, help="seeded alphas (weyl) or systems (shrink)")
    p.add_argument("--ab-max", type=int, default=3, help="largest a, b for shrink")

    p = sub.add_parser("arcs", help="major-arc measures, coverage and per-layer integrals")
    _common(p)
    p.add_argument("--layers", action="store_true", help="also split the circle integral by layer")

    p = sub.add_parser("jets", help="jet-scheme point counts against the dimension bound")
    _common(p)
    p.add_argument("--ms", "--m-list", dest="m_list", type=_int_list, help="jet orders, e.g. 0,1")
    p.add_argument("--fields", type=_int_list, default=[5, 7, 11])
    p.add_argument("--kappa", type=int)

    p = sub.add_parser("exponent", help="exact exponent bookkeeping")
    _common(p)
    p.add_argument("--m-max", type=int, default=50)
    p.add_argument("--grid", action="store_true", help="check d in 3..5, e in 1..3 at the threshold")

    p = sub.add_parser("scan", help="N_m(e) against q^{(m+1)(mu+1)} for several q")
    _common(p)
    p.add_argument("--ms", "--m-list", dest="m_list", type=_int_list, help="jet orders, e.g. 0,1")
    p.add_argument("--fields", type=_int_list, default=[5, 7])
    return parser


def _split_m(argv):
    # "--m 0,1" is accepted by jets/scan as a list
    out = list(argv)
    if out and out[0] in ("jets", "scan"):
        for i, tok in enumerate(out[:-1]):
            if tok == "--m" and "," in out[i + 1]:
                out[i] = "--ms"
    return out


def _load_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        with open(known.config, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _config(args):
    return RunConfig(args.field, args.form, args.n, args.d, args.e, args.m, args.budget, args.seed, args.workers, args.output)


# -- commands ------------------------------------------------------------------

def cmd_count(cfg, args):
    F = cfg.form_obj()
    out = {"op": "count", "params": _params(cfg, F)}
    reps = {}
    if args.method in ("direct", "both"):
        reps["direct"] = counting.count_direct_Nm(F, cfg.e, cfg.m, cfg.budget, workers=cfg.workers)
    if args.method in ("characters", "both"):
        reps["characters"] = counting.count_via_characters(F, cfg.e, cfg.m, cfg.budget)
    out["results"] = {k: {"value": r.value, "method": r.method} for k, r in reps.items()}
    out["value"] = next(iter(reps.values())).value
    out["warnings"] = sorted({w for r in reps.values() for w in r.warnings})
    ok = True
    if len(reps) == 2:
        ok = reps["direct"].value == reps["characters"].value
        out["match"] = ok
    out["pass"] = ok
    return out, ok


def _params(cfg, F=None, **extra):
    out = {"field": cfg.field_obj().spec_string(), "e": cfg.e, "m": cfg.m}
    if F is not None:
        out.update({"form": F.spec_string(), "n": F.n, "d": F.d})
    out.update(extra)
    return out


def _verify_harmonic(cfg, args, fn):
    field = cfg.field_obj()
    rng = suite_rng(cfg.seed, args.suite)
    rep = fn(field, cfg.m, args.N, depth=args.depth, method=args.route, rng=rng)
    return rep.to_dict(), rep.passed


def _verify_weyl(cfg, args):
    F = cfg.form_obj()
    counting.require_smooth(F, budget=cfg.budget)
    rng = suite_rng(cfg.seed, "weyl")
    P = F.d * cfg.e + 1
    digits = expsums.random_alpha_digits(F.field, cfg.m, P, rng, args.samples)
    S = expsums.exp_sums(F, cfg.e, cfg.m, digits, cfg.budget)
    passes = 0
    failures = []
    worst = 0.0
    for i in range(args.samples):
        alpha = JetLaurent.from_digits(F.field, digits[i].tolist())
        rep = expsums.check_weyl_lemma(F, alpha, cfg.e, cfg.m, cfg.budget, s_value=RootSum.from_array(F.field.p, S[i]))
        if rep.rhs:
            worst = max(worst, rep.lhs / rep.rhs)
        if rep.passed:
            passes += 1
        elif len(failures) < 3:
            failures.append({"alpha_digits": digits[i].tolist(), **rep.to_dict()})
    out = {
        "check": "weyl differencing",
        "params": _params(cfg, F),
        "samples": args.samples,
        "passes": passes,
        "max_lhs_over_rhs": worst,
        "counterexamples": failures,
        "pass": passes == args.samples,
    }
    return out, passes == args.samples


def _verify_shrink(cfg, args):
    field = cfg.field_obj()
    n = cfg.n or 1
    rng = suite_rng(cfg.seed, "shrink")
    top = args.ab_max
    depth = 2 * top
    checked = 0
    failures = []
    for sysno in range(args.samples):
        L = expsums.random_linear_system(field, n, cfg.m, depth, rng)
        for a in range(1, top + 1):
            for b in range(a, top + 1):
                for r in range(a):
                    rep = expsums.check_shrinking(L, a, b, r, cfg.m, cfg.budget)
                    checked += 1
                    if not rep.passed and len(failures) < 3:
                        failures.append({"system": sysno, **rep.to_dict()})
    ok = not failures
    out = {
        "check": "shrinking",
        "reading": "K_m(a-r, b+r) at the same jet order",
        "params": {"field": field.spec_string(), "n": n, "m": cfg.m, "ab_max": top},
        "systems": args.samples,
        "checked": checked,
        "counterexamples": failures,
        "pass": ok,
    }
    return out, ok


def _arc_rows(cfg):
    field = cfg.field_obj()
    params = arcs.ArcParams(cfg.d, cfg.e)
    table = arcs.layer_table(field, params)
    coverage = int((table > params.M).sum())
    rows = [arcs.arc_measure_count(field, J, params, cfg.m).to_dict() for J in range(params.M + 1)]
    hist = {str(J): int((table == J).sum()) for J in range(params.M + 1)}
    ok = coverage == 0 and all(r["bound_ok"] for r in rows)
    out = {
        "check": "dirichlet coverage and major-arc measure",
        "params": {"field": field.spec_string(), "d": cfg.d, "e": cfg.e, "m": cfg.m, "M": params.M, "depth": params.depth},
        "alpha0_classes": int(table.size),
        "minimal_J_histogram": hist,
        "uncovered": coverage,
        "rows": rows,
        "pass": ok,
    }
    return out, ok


def _verify_diagonal(cfg, args):
    F = cfg.form_obj()
    rep = counting.check_diagonal_implication(F, cfg.m, budget=cfg.budget)
    return {"params": _params(cfg, F), **rep.to_dict()}, rep.passed


def _verify_recursion(cfg, args):
    F = cfg.form_obj()
    if cfg.m < 1:
        raise UsageError("recursion needs m >= 1")
    q, n, d, e = F.field.q, F.n, F.d, cfg.e
    major = arcs.circle_integral(F, e, cfg.m, ("major", 0), cfg.budget)
    prev = counting.count_direct_Nm(F, e, cfg.m - 1, cfg.budget, workers=cfg.workers).value
    expected = Fraction(q) ** (n * (e + 1) - d * e - 1) * prev
    ok = major.value == expected
    out = {
        "check": "major arc M(0) reproduces the lower jet count",
        "params": _params(cfg, F),
        "major_integral": str(major.value),
        "N_previous": prev,
        "expected": str(expected),
        "pass": ok,
    }
    return out, ok


def _verify_projective(cfg, args):
    F = cfg.form_obj()
    rep = counting.count_projective_jets(F, cfg.e, cfg.m, cfg.budget)
    return rep.to_dict(), rep.passed


def _verify_minor(cfg, args):
    F = cfg.form_obj()
    rows = counting.check_minor_arc_vanishing(F, cfg.e, cfg.m, cfg.budget)
    ok = all(r.violations == 0 for r in rows)
    return {"check": "minor arcs force Psi = 0", "params": _params(cfg, F), "rows": [r.to_dict() for r in rows], "pass": ok}, ok


def cmd_verify(cfg, args):
    suite = args.suite
    if suite == "ball-integral":
        return _verify_harmonic(cfg, args, harmonic.verify_integral_orthogonality)
    if suite == "box-sum":
        return _verify_harmonic(cfg, args, harmonic.verify_box_orthogonality)
    if suite == "arcs":
        return _arc_rows(cfg)
    return {
        "weyl": _verify_weyl,
        "shrink": _verify_shrink,
        "diagonal": _verify_diagonal,
        "recursion": _verify_recursion,
        "projective": _verify_projective,
        "minor": _verify_minor,
    }[suite](cfg, args)


def cmd_arcs(cfg, args):
    out, ok = _arc_rows(cfg)
    out["op"] = "arcs"
    if args.layers:
        F = cfg.form_obj()
        rows, total = arcs.layer_report(F, cfg.e, cfg.m, cfg.budget)
        out["layers"] = [r.to_dict() for r in rows]
        out["integral"] = str(total.value)
        layered = sum((r.integral_contribution for r in rows), Fraction(0))
        out["layers_sum_to_integral"] = layered == total.value
        ok = ok and layered == total.value
        out["pass"] = ok
    return out, ok


def cmd_jets(cfg, args):
    field = cfg.field_obj()
    if field.k != 1:
        raise UsageError("jets reads the form over several prime fields; give a prime --field")
    F = cfg.form_obj(field)
    reports = []
    for m in args.m_list or [cfg.m]:
        rep = counting.check_jet_dimension_bound(F, m, args.fields, kappa=args.kappa, budget=cfg.budget)
        reports.append(rep)
    rows = []
    for rep in reports:
        for r in rep.rows:
            rows.append({"m": rep.m, "B": rep.bound_exponent, "spread": rep.spread, "pass": rep.passed, **dict(r)})
    ok = all(r.passed for r in reports)
    return {"op": "jets", "form": F.spec_string(), "n": F.n, "d": F.d, "reports": [r.to_dict() for r in reports], "rows": rows, "pass": ok}, ok


def cmd_exponent(cfg, args):
    if args.grid:
        rep = counting.exponent_grid_check(range(3, 6), range(1, 4), args.m_max)
        return {"op": "exponent", "grid": "d 3..5, e 1..3", "m_max": args.m_max, **rep.to_dict()}, rep.passed
    n = cfg.n if cfg.n is not None else counting.threshold_n(cfg.d, cfg.e) + 1
    rows = [counting.exponent_analysis(n, cfg.d, cfg.e, m).to_dict() for m in range(args.m_max + 1)]
    ok = all(r["verdict"] for r in rows)
    return {"op": "exponent", "n": n, "d": cfg.d, "e": cfg.e, "threshold_n": counting.threshold_n(cfg.d, cfg.e), "rows": rows, "pass": ok}, ok


def cmd_scan(cfg, args):
    field = cfg.field_obj()
    F = cfg.form_obj(field)
    rows = []
    for m in args.m_list or [cfg.m]:
        for r in counting.asymptotic_scan(F, cfg.e, m, args.fields, cfg.budget):
            rows.append({"m": m, **r.to_dict()})
    ok = all(r["in_window"] for r in rows)
    return {"op": "scan", "form": F.spec_string(), "e": cfg.e, "window": "[q^-2, q^2]", "rows": rows, "pass": ok}, ok


COMMANDS = {
    "count": cmd_count,
    "verify": cmd_verify,
    "arcs": cmd_arcs,
    "jets": cmd_jets,
    "exponent": cmd_exponent,
    "scan": cmd_scan,
}


# -- output --------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n"
    if fmt == "csv":
        rows = report.get("rows")
        buf = io.StringIO()
        if rows:
            keys = sorted({k for r in rows for k in r})
            w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _cell(r.get(k)) for k in keys})
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["key", "value"])
            for k in sorted(report):
                w.writerow([k, _cell(report[k])])
        return buf.getvalue()
    lines = []
    for k in sorted(report):
        if k == "rows":
            continue
        lines.append(f"{k}: {_cell(report[k])}")
    for r in report.get("rows") or []:
        lines.append("  " + "  ".join(f"{k}={_cell(v)}" for k, v in sorted(r.items())))
    return "\n".join(lines) + "\n"


def _cell(v):
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, sort_keys=True, default=_jsonable)
    return v


def main(argv=None):
    argv = _split_m(sys.argv[1:] if argv is None else list(argv))
    parser = build_parser()
    try:
        conf = _load_config(parser, argv)
        if conf and argv:
            sub = parser._subparsers._group_actions[0].choices.get(argv[0])
            if sub is not None:
                known = {a.dest for a in sub._actions}
                unknown = sorted(set(conf) - known)
                if unknown:
                    raise UsageError(f"unknown config keys: {', '.join(unknown)}")
                sub.set_defaults(**conf)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"jetcircle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    cfg = _config(args)
    t0 = time.perf_counter()
    try:
        report, ok = COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"jetcircle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"jetcircle: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CoverageViolation, NonIntegralResult) as exc:
        print(f"jetcircle: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (InsufficientPrecision, ValueError, JetCircleError) as exc:
        print(f"jetcircle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = dict(report)
    report["runtime_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    sys.stdout.write(render(report, cfg.output))
    return EXIT_PASS if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
