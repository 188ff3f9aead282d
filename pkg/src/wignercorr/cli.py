"""Command-line entry point: ``wignercorr <subcommand> [options]``.

Every run prints (or writes with ``--out``) one canonical JSON document
``{"kind", "params", "result", "version"}``.  A run manifest next to the
output records the argument vector, seeds, a timestamp and the output
digest; ``--from-manifest`` replays it.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import glob
import hashlib
import io
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from . import __version__, majorant, montecarlo, paths, series, wick
from .errors import DomainError, ReportParseError, WignerCorrError
from .laws import get_law

RUNTIME_FLAGS = ("--out", "--manifest", "--workers")
CHECK_FAILED = 1  # run completed but at least one check failed


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _enc(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _enc(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    return v


def dumps(doc) -> str:
    return json.dumps(_enc(doc), sort_keys=True, indent=2, allow_nan=True) + "\n"


# --------------------------------------------------------------------------
# subcommands: each returns (params, result, csv_rows | None)
# --------------------------------------------------------------------------

def cmd_identities(a):
    params = {"smax": a.smax, "rmax": a.rmax, "wick": a.wick}
    checks = [series.identity_report(a.smax, a.rmax)]
    if a.wick:
        checks.append(wick.ibp_report())
        checks.append(wick.ten_term_report())
    result = {"reports": checks, "pass": all(c["pass"] for c in checks)}
    rows = []
    for rep in checks:
        if isinstance(rep["checks"], list):
            rows += [{"report": rep["kind"], "check": c["check"], "points": c["points"], "pass": c["pass"]}
                     for c in rep["checks"]]
        else:
            rows.append({"report": rep["kind"], "check": rep["kind"], "points": rep["checks"], "pass": rep["pass"]})
    return params, result, rows


def cmd_oracle(a):
    params = {"n": a.n, "quantity": a.quantity, "smax": a.smax, "rmax": a.rmax, "expr": a.expr, "cap": a.cap}
    if a.quantity == "expr":
        if not a.expr:
            raise DomainError("--quantity expr needs --expr")
        spec = wick.MonomialSpec(a.n, wick.parse_monomial(a.expr))
        v = wick.mixed_moment(spec, a.cap)
        return params, {"value": v}, [{"expr": a.expr, "n": a.n, "value": float(v)}]
    if a.quantity == "moment":
        vals = {p: wick.gue_moment(a.n, p) for p in range(0, 2 * a.smax + 1, 2)}
        rows = [{"p": p, "value": float(v)} for p, v in vals.items()]
        return params, {"moments": {str(p): v for p, v in vals.items()}}, rows
    rmax = a.rmax if a.rmax is not None else 2 * a.smax
    if a.quantity == "u":
        table = wick.u_table(a.n, a.smax, a.cap)
    elif a.quantity == "d":
        table = wick.d_table(a.n, a.smax, rmax, a.cap)
    else:
        table = wick.pqt_table(a.n, a.smax, rmax, a.cap)
    rows = [dict(zip(("quantity", "s", "r", "x", "y"), k)) | {"value": v} for k, v in sorted(table.values.items())]
    csv_rows = [r | {"value": float(r["value"])} for r in rows]
    return params, {"rows": rows}, csv_rows


def _bound_params(a) -> majorant.BoundParams:
    return majorant.BoundParams(h=a.h, kappa=a.kappa, C=a.C, chi=a.chi)


def cmd_majorant(a):
    bp = _bound_params(a)
    params = {"n": a.n, "check": a.check, "s0": a.s0, "smax": a.smax, "h": a.h, "kappa": a.kappa, "C": a.C,
              "chi": a.chi}
    if a.check == "hierarchy":
        rep = majorant.check_hierarchy_majorants(a.n, bp, s0=a.s0)
    elif a.check == "moment":
        smax = a.smax or 4
        pts = [majorant.check_moment_bound(a.n, s, a.h, a.kappa) for s in range(1, smax + 1)
               if s**3 <= a.kappa * a.n**2]
        rep = {"kind": "moment_bound", "n": a.n, "points": pts, "pass": all(p["pass"] for p in pts)}
    elif a.check == "correlation":
        rep = majorant.check_correlation_bounds(a.n, bp, s_max=a.smax or 2)
    elif a.check == "pqt":
        rep = majorant.check_pqt_closed_forms(a.n, a.smax or 4, bp)
    else:
        s = a.smax or 1
        d = majorant.assemble_R(a.n, s, s, "oracle", h=a.h).to_dict()
        rep = {"kind": "r_decomposition", **d, "pass": d["recomposes"]}
    rows = [{k: v for k, v in p.items() if not isinstance(v, dict)} for p in rep.get("points", [])]
    return params, rep, rows


def cmd_paths(a):
    laws = a.law or ["gaussian"]
    params = {"n": a.n, "s1": a.s1, "s2": a.s2, "laws": laws}
    per_law = []
    for spec in laws:
        law = get_law(spec)
        classes = paths.sum_by_class(a.n, a.s1, a.s2, law)
        routes = paths.covariance_routes(a.n, a.s1, a.s2, law)
        entry = {"law": law.label(), "classes": classes, "routes": routes,
                 "partition_matches": classes["total"] == routes["full_expansion"] == routes["shared_step_sum"]}
        if a.s1 >= 1 and a.s2 >= 1:
            entry["reduction"] = paths.reduction_report(a.n, a.s1, a.s2, law)
        per_law.append(entry)
    ok = all(e["partition_matches"] and e.get("reduction", {"pass": True})["pass"] for e in per_law)
    rows = list(paths.iter_pair_records(a.n, a.s1, a.s2, get_law(laws[0])))
    return params, {"per_law": per_law, "pass": ok}, rows


def _points(a):
    chi2 = a.chi2 or a.chi1
    if a.s is not None:
        return [(n, None, None, a.s, a.s) for n in a.n]
    if not a.chi1:
        raise DomainError("give --chi1 (and optionally --chi2) or --s")
    if len(chi2) != len(a.chi1):
        raise DomainError("--chi1 and --chi2 need the same number of values")
    return [(n, c1, c2, None, None) for n in a.n for c1, c2 in zip(a.chi1, chi2)]


def _regime(n, c1, c2, s1, s2):
    if s1 is not None:
        return montecarlo.RegimePoint.from_s(n, s1, s2)
    return montecarlo.RegimePoint.from_chi(n, c1, c2)


def _mc_tables(a, laws, same_s: bool):
    per_law, comps = [], []
    for n, c1, c2, s1, s2 in _points(a):
        rp = _regime(n, c1, c2, s1, s2)
        if same_s and rp.s1 != rp.s2:
            raise DomainError("universality compares K(s, s); use equal chi values")
        tag = {"n": n, "chi1": rp.chi1, "chi2": rp.chi2, "s1": rp.s1, "s2": rp.s2}
        ests = [montecarlo.estimate_K(rp, law, a.samples, a.seed, law_index=i, workers=a.workers)
                for i, law in enumerate(laws)]
        for e in ests:
            per_law.append(tag | {"law": e.law, "K_mean": e.mean, "K_stderr": e.stderr, "excluded": e.excluded,
                                  "valid": e.valid})
        for i in range(len(ests)):
            for j in range(i + 1, len(ests)):
                x, y = ests[i], ests[j]
                delta = x.mean - y.mean
                se = (x.stderr**2 + y.stderr**2) ** 0.5
                comps.append(tag | {"law_a": x.law, "law_b": y.law, "delta": delta, "se_combined": se,
                                    "pass": bool(x.valid and y.valid and abs(delta) <= 3 * se)})
    return per_law, comps


def _mc_params(a, laws):
    return {"n": a.n, "chi1": a.chi1, "chi2": a.chi2, "s": a.s, "laws": [x.label() for x in laws],
            "samples": a.samples, "seed": a.seed}


def cmd_montecarlo(a):
    laws = [get_law(x) for x in (a.law or ["gaussian"])]
    per_law, comps = _mc_tables(a, laws, same_s=False)
    result = {"per_law": per_law, "comparisons": comps}
    if a.rterms:
        rterms = []
        for n, c1, c2, s1, s2 in _points(a):
            rp = _regime(n, c1, c2, s1, s2)
            est = montecarlo.estimate_R_terms(rp, a.samples, a.seed, workers=a.workers)
            chi = (rp.chi1, rp.chi2) if rp.chi1 is not None else None
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                dec = majorant.assemble_R(n, est["s1"], est["s2"], "montecarlo", estimates=est, chi=chi)
            rterms.append(dec.to_dict() | {"S_stderr": est["S_stderr"]})
        result["rterms"] = rterms
    return _mc_params(a, laws), result, per_law


def cmd_universality(a):
    laws = [get_law(x) for x in (a.law or ["gaussian", "rademacher"])]
    per_law, comps = _mc_tables(a, laws, same_s=True)
    status = ("inconclusive" if not all(p["valid"] for p in per_law)
              else "pass" if all(c["pass"] for c in comps) else "fail")
    return _mc_params(a, laws), {"per_law": per_law, "comparisons": comps, "status": status,
                                  "pass": status == "pass"}, per_law


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def load_result(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ReportParseError(f"{path}: cannot read JSON result ({exc})") from exc
    if not isinstance(doc, dict) or not {"kind", "params", "result"} <= doc.keys():
        raise ReportParseError(f"{path}: not a wignercorr result (needs kind, params, result)")
    return doc


def _expand(pattern: str) -> list[str]:
    # manifests sit next to results; a glob should not pick them up
    return [f for f in glob.glob(pattern) if not f.endswith(".manifest.json")] or [pattern]


def build_report(patterns) -> dict:
    files = sorted({f for p in patterns for f in _expand(p)})
    if not files:
        raise ReportParseError("no result files")
    sections = []
    for f in files:
        doc = load_result(f)
        leaves = list(_flatten(doc["result"]))
        failed = [k for k, v in leaves if k.split(".")[-1] == "pass" and v is False]
        sections.append({"file": f, "kind": doc["kind"], "params": doc["params"], "result": doc["result"],
                         "failed": failed, "pass": not failed})
    return {"sections": sections, "pass": all(s["pass"] for s in sections)}


def render_report(rep: dict) -> str:
    out = io.StringIO()
    for sec in rep["sections"]:
        status = "PASS" if sec["pass"] else "FAIL"
        out.write(f"== {sec['kind']} [{status}] {sec['file']}\n")
        for k, v in _flatten(sec["result"]):
            flag = "  <-- failed" if k in sec["failed"] else ""
            out.write(f"  {k} = {json.dumps(v)}{flag}\n")
        if sec["kind"] in ("montecarlo", "universality") and not sec["result"].get("comparisons"):
            out.write("  comparisons: (none)\n")
    out.write(f"overall: {'PASS' if rep['pass'] else 'FAIL'}\n")
    return out.getvalue()


def cmd_report(a):
    rep = build_report(a.files)
    return {"files": a.files}, rep, None


# --------------------------------------------------------------------------
# parser and driver
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wignercorr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--from-manifest", metavar="FILE", help="replay the run recorded in a manifest")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--manifest", help="manifest path (default OUT.manifest.json when --out is set)")
    p.add_argument("--workers", type=int, default=None, help=f"worker processes (default ${montecarlo.WORKERS_ENV} or 1)")
    sub = p.add_subparsers(dest="cmd")

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default=argparse.SUPPRESS)
        sp.add_argument("--manifest", default=argparse.SUPPRESS)
        sp.add_argument("--workers", type=int, default=argparse.SUPPRESS)
        return sp

    sp = common(sub.add_parser("identities", help="exact coefficient identities (and Wick checks)"))
    sp.add_argument("--smax", type=int, default=100)
    sp.add_argument("--rmax", type=int, default=50)
    sp.add_argument("--wick", action="store_true", help="also run integration-by-parts and ten-term checks")
    sp.set_defaults(func=cmd_identities)

    sp = common(sub.add_parser("oracle", help="exact GUE moments and tables"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--quantity", choices=("moment", "u", "d", "pqt", "expr"), default="moment")
    sp.add_argument("--smax", type=int, default=2)
    sp.add_argument("--rmax", type=int)
    sp.add_argument("--expr", help='monomial such as "A2[1,1]o L2o"')
    sp.add_argument("--cap", type=int, default=wick.DEFAULT_DEGREE_CAP)
    sp.set_defaults(func=cmd_oracle)

    sp = common(sub.add_parser("majorant", help="majorant iterations, closed forms and bounds"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--check", choices=("hierarchy", "moment", "correlation", "pqt", "rterms"), default="hierarchy")
    sp.add_argument("--s0", type=int)
    sp.add_argument("--smax", type=int)
    sp.add_argument("--h", type=_frac, default=Fraction(1, 8))
    sp.add_argument("--kappa", type=_frac, default=Fraction(5))
    sp.add_argument("--C", type=_frac, default=Fraction(1, 12))
    sp.add_argument("--chi", type=_frac, default=Fraction(1, 128))
    sp.set_defaults(func=cmd_majorant)

    sp = common(sub.add_parser("paths", help="exact path-pair enumeration at tiny n"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s1", type=int, required=True)
    sp.add_argument("--s2", type=int, required=True)
    sp.add_argument("--law", action="append")
    sp.set_defaults(func=cmd_paths)

    mc_help = {"montecarlo": "Monte Carlo covariance of trace powers",
               "universality": "pairwise comparison of the covariance across entry laws"}
    for name, func in (("montecarlo", cmd_montecarlo), ("universality", cmd_universality)):
        sp = common(sub.add_parser(name, help=mc_help[name]))
        sp.add_argument("--n", type=int, nargs="+", required=True)
        sp.add_argument("--chi1", "--chi", type=_frac, nargs="+", dest="chi1")
        sp.add_argument("--chi2", type=_frac, nargs="+")
        sp.add_argument("--s", type=int, help="explicit s' = s'' (overrides chi)")
        sp.add_argument("--law", action="append")
        sp.add_argument("--samples", type=int, default=1000)
        sp.add_argument("--seed", type=int, default=0)
        if name == "montecarlo":
            sp.add_argument("--rterms", action="store_true", help="also estimate the GUE R/S split")
        sp.set_defaults(func=func)

    sp = sub.add_parser("report", help="merge result files into one summary")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--out", default=argparse.SUPPRESS)
    sp.add_argument("--manifest", default=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_report)
    return p


def _strip_runtime(argv: list[str]) -> list[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in RUNTIME_FLAGS or tok == "--from-manifest":
            skip = True
            continue
        if any(tok.startswith(f + "=") for f in (*RUNTIME_FLAGS, "--from-manifest")):
            continue
        out.append(tok)
    return out


def _csv_text(rows) -> str:
    buf = io.StringIO()
    if rows:
        keys = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _enc(v) for k, v in r.items()})
    return buf.getvalue()


def _manifest(argv, args, text: str, out: str | None) -> dict:
    seeds = None
    if getattr(args, "seed", None) is not None:
        seeds = {"master": args.seed, "per_sample": "SeedSequence(master, spawn_key=(stream, law_index, sample))",
                 "law_index": {str(i): x for i, x in enumerate(args.law or [])}}
    return {
        "argv": argv,
        "config": _enc({k: v for k, v in vars(args).items() if k not in ("func", "from_manifest")}),
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "seeds": seeds,
        "outputs": {out or "<stdout>": hashlib.sha256(text.encode()).hexdigest()},
    }


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.from_manifest:
        try:
            recorded = json.loads(Path(args.from_manifest).read_text())["argv"]
        except (OSError, ValueError, KeyError) as exc:
            raise ReportParseError(f"{args.from_manifest}: unreadable manifest ({exc})") from exc
        extra = _strip_runtime(argv)
        if extra:
            parser.error("--from-manifest takes only --out, --manifest and --workers")
        runtime = [t for flag in RUNTIME_FLAGS if getattr(args, flag[2:]) is not None
                   for t in (flag, str(getattr(args, flag[2:])))]
        return run(runtime + recorded)
    if not args.cmd:
        parser.print_help(sys.stderr)
        return 2
    core_argv = _strip_runtime(argv)
    params, result, rows = args.func(args)
    if args.cmd == "report" and args.format == "text":
        text = render_report(result)
    elif getattr(args, "format", "json") == "csv":
        text = _csv_text(rows or [])
    else:
        text = dumps({"kind": args.cmd, "params": params, "result": result, "version": __version__})
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    manifest_path = args.manifest or (f"{args.out}.manifest.json" if args.out else None)
    if manifest_path:
        Path(manifest_path).write_text(dumps(_manifest(core_argv, args, text, args.out)))
    return 0 if result.get("pass", True) else CHECK_FAILED


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    warnings.formatwarning = lambda msg, cat, *_a, **_k: f"warning: {msg}\n"
    try:
        return run(argv)
    except WignerCorrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
