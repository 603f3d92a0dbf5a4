"""Command-line entry point: ``fracvar <command> [options]``.

Exit codes: 0 ok, 2 input error, 3 oracle mismatch, 4 witness rejected,
5 certificate violated.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import classify as cl
from .funcmodel.detect import detect_K_report
from .funcmodel.sets import ClosedSetDesc, Interval, cantor_prefix
from .io import InputError, dumps, load_function, load_set, load_witness, read_json
from .reparam import (all_decaying, assemble, cantor_witness, certify_derivatives, from_function,
                      make_bridge, verify_homeomorphism, zahorski_build)
from .reparam.assemble import WeightScheduleError, WitnessRejected
from .reparam.bridge import QUAD_TOL
from .reparam.certify import CERT_TOL
from .reparam.vfunc import ReparamInputError
from .variation import (BRUTE_FORCE_LIMIT, CandidateLimitError, VariationQuery, brute_force_variation,
                        build_candidates, frac_variation, gen_variation, image_measure_bound,
                        sv_variation, total_variation)

EXIT_OK, EXIT_INPUT, EXIT_ORACLE, EXIT_WITNESS, EXIT_CERT = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, msg: str, code: int = EXIT_INPUT):
        super().__init__(msg)
        self.code = code


# -- argument parsing -----------------------------------------------------------

def _number(text: str):
    text = text.strip()
    if text in ("inf", "infinity"):
        return math.inf
    if "/" in text:
        return float(Fraction(text))
    return float(text)


def _schedule(text: str) -> list:
    vals = [int(v) for v in text.split(",") if v.strip()]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise argparse.ArgumentTypeError("truncation schedule must be strictly increasing")
    return vals


def _positive(text: str) -> float:
    v = _number(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="function JSON (or set JSON for zahorski)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--n", type=int, default=2)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-quad", type=_positive, default=QUAD_TOL)
    common.add_argument("--tol-cert", type=_positive, default=CERT_TOL)

    p = argparse.ArgumentParser(prog="fracvar", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="K_f, total variation, image-measure bounds")

    v = sub.add_parser("variation", parents=[common], help="one variation functional")
    v.add_argument("--alpha", type=_number, default=1.0)
    v.add_argument("--delta", type=_number, default=math.inf)
    v.add_argument("--mode", default="frac", choices=["frac", "full", "bar", "right", "left", "total", "sv"])
    v.add_argument("--set", nargs=2, action="append", default=[], metavar=("NAME", "PATH"),
                   help="'A path' or 'K path'; A defaults to the empty set, K to K_f")
    v.add_argument("--schedule", help="comma-separated decreasing windows for --mode sv")
    v.add_argument("--oracle", action="store_true", help="cross-check against brute force")

    c = sub.add_parser("classify", parents=[common], help="check a decomposition witness")
    c.add_argument("--witness", default="difex",
                   help="witness JSON, or 'difex' / 'sbvg' for the difex family, or 'singletons'")
    c.add_argument("--truncations", type=_schedule, default=None)

    r = sub.add_parser("reparam", parents=[common], help="build h and g = f o h with certificates")
    r.add_argument("--witness", default="auto", help="witness JSON, 'auto', 'difex' or 'singletons'")
    r.add_argument("--raw", action="store_true", help="certify the un-reparametrized function instead")

    z = sub.add_parser("zahorski", parents=[common], help="homeomorphism flat on a closed set")
    z.add_argument("--cantor-depth", type=int, help="use the middle-thirds prefix of this depth")
    z.add_argument("--witness", help="witness JSON (default: depth groups or singletons)")

    b = sub.add_parser("bridge", parents=[common], help="tabulate one smooth bridge")
    b.add_argument("--interval", default="0,1", help="alpha,beta")
    b.add_argument("--values", default="0,1", help="A,B")
    b.add_argument("--samples", type=int, default=1025)

    s = sub.add_parser("selftest", parents=[common], help="randomized property suite")
    s.add_argument("--count", type=int, default=60)
    s.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return p


# -- helpers --------------------------------------------------------------------

def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _function(args):
    if not args.input:
        raise CliError("--input is required")
    try:
        return load_function(read_json(args.input))
    except InputError as exc:
        raise CliError(str(exc)) from exc


def _set(path, domain: Interval) -> ClosedSetDesc:
    try:
        return load_set(read_json(path), domain)
    except InputError as exc:
        raise CliError(str(exc)) from exc


def _write(path: Path, text: str):
    path.write_text(text)


def _num(v):
    return "inf" if v == math.inf else float(v)


# -- commands -------------------------------------------------------------------

def cmd_analyze(args) -> int:
    f = _function(args)
    rep = detect_K_report(f)
    tv = total_variation(f)
    meshes = [2.0 ** -k for k in range(1, 9)]
    bounds = [{"mesh": m, "bound": image_measure_bound(f, rep.K, m)} for m in meshes]
    out = _out_dir(args)
    doc = {
        "function": f.to_json(),
        "K_f": rep.K.to_json(),
        "K_f_points": [float(x) for x in rep.K.points()],
        "conventional": [float(x) for x in rep.conventional],
        "approximate": rep.approximate,
        "warning": rep.warning,
        "total_variation": float(tv.value),
        "measure_bounds": bounds,
    }
    _write(out / "analysis.json", dumps(doc))
    with open(out / "kf.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "f", "conventional"])
        for x in rep.K.points():
            wr.writerow([repr(float(x)), repr(float(f(x))), int(x in rep.conventional)])
    print(dumps({"K_f": doc["K_f_points"], "total_variation": doc["total_variation"]}), end="")
    return EXIT_OK


def cmd_variation(args) -> int:
    f = _function(args)
    dom = f.domain
    sets = dict(args.set)
    if set(sets) - {"A", "K"}:
        raise CliError("--set takes A or K")
    K = _set(sets["K"], dom) if "K" in sets else detect_K_report(f).K
    A = _set(sets["A"], dom) if "A" in sets else ClosedSetDesc.empty(dom)
    mode = args.mode
    try:
        q = VariationQuery(alpha=args.alpha, delta=args.delta, n=args.n)
        if mode in ("full", "bar", "right", "left") and not A.issubset(K):
            raise CliError("A is not a subset of K")
        if mode == "total":
            res = total_variation(f)
        elif mode == "sv":
            if not args.schedule:
                raise CliError("--mode sv needs --schedule")
            rep = sv_variation(f, K, args.alpha, [_number(t) for t in args.schedule.split(",")])
            doc = rep.to_json()
            _write(_out_dir(args) / "variation.json", dumps(doc))
            print(dumps(doc), end="")
            return EXIT_OK
        elif mode == "frac":
            res = frac_variation(f, K, q)
        else:
            res = gen_variation(f, A, K, args.n, mode, args.delta)
    except (ValueError, CandidateLimitError) as exc:
        if isinstance(exc, CliError):
            raise
        raise CliError(str(exc)) from exc
    doc = res.to_json()
    if args.oracle and mode not in ("total",):
        cand = build_candidates(f, K, A if mode != "frac" else None, delta=args.delta)
        if len(cand) > BRUTE_FORCE_LIMIT:
            doc["oracle"] = f"skipped: {len(cand)} candidates"
        else:
            bf = brute_force_variation(f, A, K, q, mode)
            agree = bf.value == res.value or abs(float(bf.value) - float(res.value)) <= 1e-12
            doc["oracle"] = {"value": _num(bf.value), "agree": agree}
            if not agree:
                print(dumps(doc), end="")
                print(f"oracle mismatch: DP {res.value} vs brute force {bf.value}", file=sys.stderr)
                return EXIT_ORACLE
    _write(_out_dir(args) / "variation.json", dumps(doc))
    print(dumps(doc), end="")
    return EXIT_OK


def _builtin_witness(name: str, f, n: int):
    if name in ("difex", "sbvg") and not isinstance(f, cl.SeqPLFunction):
        raise CliError(f"witness {name!r} is only defined for the difex family")
    if name == "difex":
        return cl.difex_cbvg_witness(f)
    if name == "sbvg":
        return cl.difex_sbvg_witness(f)
    if name in ("singletons", "auto"):
        if name == "auto" and isinstance(f, cl.SeqPLFunction):
            return cl.difex_cbvg_witness(f)
        return cl.heuristic_witness(f, n)
    return None


def _witness(args, f):
    w = _builtin_witness(args.witness, f, args.n)
    if w is not None:
        return w
    try:
        return load_witness(read_json(args.witness), f.domain)
    except InputError as exc:
        raise CliError(str(exc)) from exc


def cmd_classify(args) -> int:
    f = _function(args)
    try:
        if args.witness in ("difex", "sbvg", "singletons"):
            rule = lambda fm: _builtin_witness(args.witness, fm, args.n)  # noqa: E731
            w = rule(f)
        else:
            w = _witness(args, f)
            rule = None
        if w.kind == "cbvg":
            rep = cl.check_cbvg(f, w, args.n, args.truncations, rule)
        elif w.kind == "sbvg":
            rep = cl.check_sbvg(f, w, args.n)
        else:
            res = cl.collapse_sbvg_bar(f, w, args.n)
            doc = {"witness": res.witness.to_json(), "values": res.values, "ok": res.ok}
            _write(_out_dir(args) / "classify.json", dumps(doc))
            print(dumps(doc), end="")
            return EXIT_OK
    except (cl.WitnessError, cl.BudgetExhausted) as exc:
        print(f"witness rejected: {exc}", file=sys.stderr)
        return EXIT_WITNESS
    doc = rep.to_json()
    _write(_out_dir(args) / "classify.json", dumps(doc))
    print(dumps(doc), end="")
    return EXIT_OK


def _write_bundle(out: Path, r, certs, extra: dict):
    doc = r.to_json()
    doc.update(extra)
    _write(out / "repar.json", dumps(doc))
    with open(out / "samples.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "h", "g"])
        for t, hv, gv in r.samples():
            wr.writerow([repr(t), repr(float(hv)), repr(float(gv))])
    _write(out / "certificates.json", dumps([c.to_json() for c in certs]))


def _finish(certs) -> int:
    ok = all_decaying(certs)
    print(f"{sum(c.verdict == 'decaying' for c in certs)}/{len(certs)} certificates decaying")
    if not ok:
        bad = [c.point for c in certs if c.verdict != "decaying"]
        print(f"certificate violated at {bad}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_CERT


def cmd_reparam(args) -> int:
    f = _function(args)
    out = _out_dir(args)
    if args.raw:
        c = from_function(f, args.n)
        certs = certify_derivatives(c, c.points, tol=args.tol_cert)
        _write(out / "certificates.json", dumps([x.to_json() for x in certs]))
        return _finish(certs)
    try:
        w = _witness(args, f)
        r = assemble(f, w, args.n, quad_tol=args.tol_quad)
    except (WitnessRejected, WeightScheduleError, cl.WitnessError) as exc:
        print(f"witness rejected: {exc}", file=sys.stderr)
        return EXIT_WITNESS
    except ReparamInputError as exc:
        raise CliError(str(exc)) from exc
    certs = certify_derivatives(r, r.K_g, tol=args.tol_cert)
    hom = verify_homeomorphism(r)
    _write_bundle(out, r, certs, {"homeomorphism": vars(hom)})
    return _finish(certs)


def cmd_zahorski(args) -> int:
    if args.cantor_depth is not None:
        K = cantor_prefix(args.cantor_depth, as_points=True)
        default = cantor_witness(args.cantor_depth)
    elif args.input:
        try:
            obj = read_json(args.input)
            K = ClosedSetDesc.from_json(obj)
        except (InputError, KeyError, TypeError, ValueError) as exc:
            raise CliError(f"malformed set: {exc}") from exc
        K = K.with_endpoints()[0]
        default = cl.DecompositionWitness("cbvg", tuple(ClosedSetDesc.from_points(K.domain, [p])
                                                        for p in K.points()))
    else:
        raise CliError("zahorski needs --input or --cantor-depth")
    if args.witness:
        try:
            w = load_witness(read_json(args.witness), K.domain)
        except InputError as exc:
            raise CliError(str(exc)) from exc
    else:
        w = default
    try:
        r, certs = zahorski_build(K, w, args.n)
    except (WitnessRejected, WeightScheduleError) as exc:
        print(f"witness rejected: {exc}", file=sys.stderr)
        return EXIT_WITNESS
    except ReparamInputError as exc:
        raise CliError(str(exc)) from exc
    if args.tol_cert != CERT_TOL:
        certs = certify_derivatives(r, r.K_g, tol=args.tol_cert)
    _write_bundle(_out_dir(args), r, certs, {"homeomorphism": vars(verify_homeomorphism(r))})
    return _finish(certs)


def cmd_bridge(args) -> int:
    lo, hi = (_number(t) for t in args.interval.split(","))
    A, B = (_number(t) for t in args.values.split(","))
    try:
        br = make_bridge(lo, hi, A, B, args.n, args.tol_quad)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    out = _out_dir(args)
    doc = {**br.to_json(), "c_norm": br.c_norm, "H_alpha": br(lo), "H_beta": br(hi),
           "ratio_iii": br.ratio_iii()}
    _write(out / "bridge.json", dumps(doc))
    with open(out / "bridge.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "H"] + [f"d{i}" for i in range(1, args.n + 1)])
        for k in range(args.samples):
            x = lo + (hi - lo) * k / (args.samples - 1)
            wr.writerow([repr(x), repr(br(x))] + [repr(br.derivative(x, i)) for i in range(1, args.n + 1)])
    print(dumps(doc), end="")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_suite

    res = run_suite(args.seed, args.count, fault=args.inject_fault)
    print(f"seed {args.seed}: {res.summary()}")
    for name in res.failures:
        print(f"FAIL {name}")
    return EXIT_OK if res.failed == 0 else 1


COMMANDS = {
    "analyze": cmd_analyze, "variation": cmd_variation, "classify": cmd_classify,
    "reparam": cmd_reparam, "zahorski": cmd_zahorski, "bridge": cmd_bridge, "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
