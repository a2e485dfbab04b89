"""Command-line front end for the package.

Subcommands expose the fan constructors, the closed-form Euler and Hilbert
evaluations, the sheaf-datum helpers, the series engines, and the
verification suite.  All numeric output is exact: integers and fraction
strings, never floats, and identical invocations produce identical bytes.

Exit codes: 0 on success, 1 on a domain error (one line on stderr), 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import verify as verify_mod
from .geometry import (
    chart_weight_tables,
    coarse_cartier_ample,
    coarse_fan,
    derive_params,
    euler_characteristic,
    hilbert_polynomial,
    inertia_components,
    modified_hilbert_polynomial,
)
from .genfun import (
    crosscheck,
    rank1_series,
    rank2_vb_closed_p12,
    rank2_vb_csets,
    rank2_vb_lambda,
    rank2_vb_r0,
    vb_to_tf,
)
from .sheafdata import (
    EquivLineBundle,
    Rank2Datum,
    fine_gradings,
    gauge_fix,
    rank2_c1_chi,
    stability_check,
    underlying_c1,
)
from .stackyfan import (
    hirzebruch_fan,
    line_bundle_total_space,
    projective_bundle,
    wps_fan,
    wps_gerbe_fan,
)


def _min2exp(text: str) -> int:
    """Cutoff exponent as a doubled integer; accepts forms like -4 or -7/2.

    Half-integer cutoffs begin with a minus sign in practice, so pass them
    attached: --min-exp=-7/2.
    """
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(
            "expected an integer or half-integer, got %r" % text)
    doubled = value * 2
    if doubled.denominator != 1:
        raise argparse.ArgumentTypeError(
            "cutoff must be an integer or half-integer, got %r" % text)
    return int(doubled)


def _parse_incidence(text: str):
    parts = text.replace(":", " ").replace(",", " ").split()
    if not parts:
        raise argparse.ArgumentTypeError("empty incidence")
    try:
        return (parts[0],) + tuple(int(x) for x in parts[1:])
    except ValueError:
        raise argparse.ArgumentTypeError(
            "incidence indices must be integers, got %r" % text)


def _parse_divisor(text: str):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "divisor must be comma-separated integers, got %r" % text)


def _add_surface(p: argparse.ArgumentParser):
    p.add_argument("-a", type=int, required=True, help="first chart order")
    p.add_argument("-b", type=int, required=True, help="second chart order")
    p.add_argument("-r", type=int, default=0, help="twist (default 0)")


def _add_class(p: argparse.ArgumentParser):
    p.add_argument("-m", type=int, required=True, help="class coordinate m")
    p.add_argument("-n", type=int, required=True, help="class coordinate n")


def _add_output(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true",
                   help="print the JSON payload instead of text")
    p.add_argument("--out", metavar="FILE",
                   help="also write the JSON payload to FILE")


def _add_datum(p: argparse.ArgumentParser):
    p.add_argument("--b1", type=int, required=True, help="first grading")
    p.add_argument("--b2", type=int, required=True, help="second grading")
    p.add_argument("--lam", type=int, nargs=4, required=True,
                   metavar=("L1", "L2", "L3", "L4"),
                   help="filtration jumps")
    p.add_argument("--incidence", type=_parse_incidence, default=("type1",),
                   help="type1, type2:i, or type3:i,j (default type1)")


ENGINES = ("csets", "r0", "closed", "lambda", "all")


def _series_engine(name, params, cls, min2exp):
    if name == "csets":
        return rank2_vb_csets(params, cls, min2exp)
    if name == "r0":
        if params.r != 0:
            raise ValueError("engine r0 needs r = 0")
        return rank2_vb_r0(params.a, params.b, cls, min2exp)
    if name == "closed":
        if (params.a, params.b, params.r) != (1, 2, 0):
            raise ValueError("engine closed covers only the (1,2,0) surface")
        return rank2_vb_closed_p12(cls, min2exp)
    if name == "lambda":
        return rank2_vb_lambda(params, cls, min2exp)
    raise ValueError("unknown engine %r" % name)


# ------------------------------------------------------------------ handlers
#
# Each handler returns (payload, text); payload is what --json and --out
# serialize, text is the default stdout rendering.


def _cmd_fan_wps(args):
    fan = wps_fan(tuple(args.weights))
    return fan.to_json(), str(fan)


def _cmd_fan_gerbe(args):
    fan = wps_gerbe_fan(tuple(args.weights))
    return fan.to_json(), str(fan)


def _cmd_fan_hirzebruch(args):
    fan = hirzebruch_fan(args.a, args.b, args.r)
    return fan.to_json(), str(fan)


def _cmd_fan_linebundle(args):
    fan = line_bundle_total_space(wps_fan(tuple(args.weights)),
                                  tuple(args.coeffs))
    return fan.to_json(), str(fan)


def _cmd_fan_projbundle(args):
    fan = projective_bundle(wps_fan(tuple(args.weights)),
                            tuple(args.divisors))
    return fan.to_json(), str(fan)


def _cmd_charts(args):
    params = derive_params(args.a, args.b, args.r)
    charts = chart_weight_tables(params)
    payload = {"charts": [
        {"index": c.index,
         "coordinates": list(c.coordinates),
         "group_order": c.group_order,
         "action_exponents": list(c.action_exponents),
         "t_weights": [list(w) for w in c.t_weights],
         "overlap_t_weights": [list(w) for w in c.overlap_t_weights]}
        for c in charts]}
    lines = []
    for c in charts:
        lines.append("chart %d (%s, %s): order %d, action %s, weights %s"
                     % (c.index, c.coordinates[0], c.coordinates[1],
                        c.group_order, c.action_exponents, c.t_weights))
    return payload, "\n".join(lines)


def _cmd_euler(args):
    params = derive_params(args.a, args.b, args.r)
    chi = euler_characteristic(params, (args.m, args.n))
    return {"chi": chi}, str(chi)


def _poly_payload(poly):
    doc = poly.to_json()
    doc["variable"] = "T"
    return doc


def _cmd_hilbert(args):
    params = derive_params(args.a, args.b, args.r)
    poly = hilbert_polynomial(params, (args.m, args.n))
    return _poly_payload(poly), str(poly)


def _cmd_mhp(args):
    params = derive_params(args.a, args.b, args.r)
    poly = modified_hilbert_polynomial(params, (args.m, args.n))
    return _poly_payload(poly), str(poly)


def _cmd_inertia(args):
    params = derive_params(args.a, args.b, args.r)
    components = inertia_components(params)
    payload = {"components": [
        {"source": c.source,
         "stabilizer_params": list(c.stabilizer_params),
         "dimension": c.dimension}
        for c in components]}
    lines = []
    for c in components:
        if c.source == "identity":
            lines.append("identity: dimension %d" % c.dimension)
        else:
            lines.append("%s: l in %s, dimension %d"
                         % (c.source, list(c.stabilizer_params), c.dimension))
    return payload, "\n".join(lines)


def _cmd_coarse(args):
    params = derive_params(args.a, args.b, args.r)
    fan = coarse_fan(params)
    payload = {"fan": fan.to_json()}
    text = str(fan)
    if args.t1 is not None or args.t4 is not None:
        if args.t1 is None or args.t4 is None:
            raise ValueError("--t1 and --t4 must be given together")
        cartier, ample = coarse_cartier_ample(params, args.t1, args.t4)
        payload["divisor"] = {"t1": args.t1, "t4": args.t4,
                              "cartier": cartier, "ample": ample}
        text += "\ndivisor (%d, %d): cartier %s, ample %s" % (
            args.t1, args.t4, cartier, ample)
    return payload, text


def _cmd_sheaf_c1(args):
    params = derive_params(args.a, args.b, args.r)
    cls = underlying_c1(EquivLineBundle(*args.gradings), params)
    return {"m": cls.m, "n": cls.n}, "(%d, %d)" % (cls.m, cls.n)


def _cmd_sheaf_grading(args):
    params = derive_params(args.a, args.b, args.r)
    fine = fine_gradings(EquivLineBundle(*args.gradings), params)
    return {"fine_gradings": list(fine)}, " ".join(str(x) for x in fine)


def _cmd_sheaf_gaugefix(args):
    params = derive_params(args.a, args.b, args.r)
    fixed = gauge_fix(EquivLineBundle(*args.gradings), params)
    quad = fixed.as_tuple()
    return {"gradings": list(quad)}, " ".join(str(x) for x in quad)


def _datum(args):
    return Rank2Datum(args.b1, args.b2, tuple(args.lam), args.incidence)


def _cmd_sheaf_stable(args):
    params = derive_params(args.a, args.b, args.r)
    stable = stability_check(_datum(args), params)
    return {"stable": stable}, "stable" if stable else "unstable"


def _cmd_sheaf_chi(args):
    params = derive_params(args.a, args.b, args.r)
    c1, chi = rank2_c1_chi(_datum(args), params)
    payload = {"c1": {"m": c1.m, "n": c1.n}, "chi": chi}
    return payload, "c1 (%d, %d), chi %d" % (c1.m, c1.n, chi)


def _cmd_genfun_rank1(args):
    params = derive_params(args.a, args.b, args.r)
    series = rank1_series(params, (args.m, args.n), args.min_exp)
    return series.to_json(), str(series)


def _cmd_genfun_rank2_vb(args):
    params = derive_params(args.a, args.b, args.r)
    cls = (args.m, args.n)
    if args.engine == "all":
        report = crosscheck(params, cls, args.min_exp)
        return report.to_json(), _crosscheck_text(report)
    series = _series_engine(args.engine, params, cls, args.min_exp)
    return series.to_json(), str(series)


def _cmd_genfun_rank2_tf(args):
    if args.engine == "all":
        raise ValueError("rank2-tf needs a single engine, not all")
    params = derive_params(args.a, args.b, args.r)
    vb = _series_engine(args.engine, params, (args.m, args.n), args.min_exp)
    series = vb_to_tf(vb, 2, params)
    return series.to_json(), str(series)


def _crosscheck_text(report):
    lines = ["engines: %s" % ", ".join(report.engines)]
    for name, window in report.windows:
        lines.append("%s: %s" % (name, window))
    if report.agree:
        lines.append("agree: yes")
    else:
        lines.append("agree: no, first disagreement at q^%s"
                     % Fraction(report.first_disagreement2, 2))
    return "\n".join(lines)


def _cmd_crosscheck(args):
    params = derive_params(args.a, args.b, args.r)
    report = crosscheck(params, (args.m, args.n), args.min_exp,
                        include_lambda=args.include_lambda)
    return report.to_json(), _crosscheck_text(report)


def _cmd_verify(args):
    results = verify_mod.run_all()
    payload = {"criteria": [
        {"index": res.index, "name": res.name,
         "passed": res.passed, "detail": res.detail}
        for res in results],
        "passed": all(res.passed for res in results)}
    return payload, verify_mod.format_report(results)


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbifold",
        description="Exact invariants and counting series for a family of "
                    "orbifold surfaces fibered over weighted projective "
                    "lines.")
    sub = parser.add_subparsers(dest="command", required=True)

    fan = sub.add_parser("fan", help="stacky fan constructors")
    fan_sub = fan.add_subparsers(dest="kind", required=True)

    p = fan_sub.add_parser("wps", help="weighted projective space")
    p.add_argument("weights", type=int, nargs="+")
    _add_output(p)
    p.set_defaults(handler=_cmd_fan_wps)

    p = fan_sub.add_parser("gerbe", help="gerby weighted projective space")
    p.add_argument("weights", type=int, nargs="+")
    _add_output(p)
    p.set_defaults(handler=_cmd_fan_gerbe)

    p = fan_sub.add_parser("hirzebruch", help="orbifold surface fan")
    _add_surface(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_fan_hirzebruch)

    p = fan_sub.add_parser("linebundle",
                           help="line bundle total space over a weighted "
                                "projective base")
    p.add_argument("weights", type=int, nargs="+", help="base weights")
    p.add_argument("--coeffs", type=int, nargs="+", required=True,
                   help="one divisor coefficient per base ray")
    _add_output(p)
    p.set_defaults(handler=_cmd_fan_linebundle)

    p = fan_sub.add_parser("projbundle",
                           help="projectivized sum of line bundles over a "
                                "weighted projective base")
    p.add_argument("weights", type=int, nargs="+", help="base weights")
    p.add_argument("--divisors", type=_parse_divisor, nargs="+",
                   required=True, metavar="C1,C2,...",
                   help="per-ray coefficients of each summand")
    _add_output(p)
    p.set_defaults(handler=_cmd_fan_projbundle)

    p = sub.add_parser("charts", help="affine chart weight tables")
    _add_surface(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_charts)

    p = sub.add_parser("euler", help="Euler characteristic of a line bundle")
    _add_surface(p)
    _add_class(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_euler)

    p = sub.add_parser("hilbert", help="Hilbert polynomial of a line bundle")
    _add_surface(p)
    _add_class(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_hilbert)

    p = sub.add_parser("mhp", help="modified Hilbert polynomial")
    _add_surface(p)
    _add_class(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_mhp)

    p = sub.add_parser("inertia", help="inertia stack components")
    _add_surface(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_inertia)

    p = sub.add_parser("coarse", help="coarse space fan and divisor tests")
    _add_surface(p)
    p.add_argument("--t1", type=int, help="first divisor coordinate")
    p.add_argument("--t4", type=int, help="fourth divisor coordinate")
    _add_output(p)
    p.set_defaults(handler=_cmd_coarse)

    sheaf = sub.add_parser("sheaf", help="equivariant sheaf data")
    sheaf_sub = sheaf.add_subparsers(dest="kind", required=True)

    p = sheaf_sub.add_parser("c1", help="underlying first Chern class")
    _add_surface(p)
    p.add_argument("--gradings", type=int, nargs=4, required=True,
                   metavar=("B1", "B2", "B3", "B4"))
    _add_output(p)
    p.set_defaults(handler=_cmd_sheaf_c1)

    p = sheaf_sub.add_parser("grading", help="fine chart gradings")
    _add_surface(p)
    p.add_argument("--gradings", type=int, nargs=4, required=True,
                   metavar=("B1", "B2", "B3", "B4"))
    _add_output(p)
    p.set_defaults(handler=_cmd_sheaf_grading)

    p = sheaf_sub.add_parser("gaugefix", help="canonical grading quadruple")
    _add_surface(p)
    p.add_argument("--gradings", type=int, nargs=4, required=True,
                   metavar=("B1", "B2", "B3", "B4"))
    _add_output(p)
    p.set_defaults(handler=_cmd_sheaf_gaugefix)

    p = sheaf_sub.add_parser("stable", help="slope stability of a datum")
    _add_surface(p)
    _add_datum(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_sheaf_stable)

    p = sheaf_sub.add_parser("chi", help="class and Euler characteristic "
                                         "of a datum")
    _add_surface(p)
    _add_datum(p)
    _add_output(p)
    p.set_defaults(handler=_cmd_sheaf_chi)

    genfun = sub.add_parser("genfun", help="counting series")
    genfun_sub = genfun.add_subparsers(dest="kind", required=True)

    p = genfun_sub.add_parser("rank1", help="rank-1 torsion-free series")
    _add_surface(p)
    _add_class(p)
    p.add_argument("--min-exp", dest="min_exp", type=_min2exp, required=True,
                   help="window cutoff; attach half-integers: --min-exp=-7/2")
    _add_output(p)
    p.set_defaults(handler=_cmd_genfun_rank1)

    p = genfun_sub.add_parser("rank2-vb", help="rank-2 bundle series")
    _add_surface(p)
    _add_class(p)
    p.add_argument("--min-exp", dest="min_exp", type=_min2exp, required=True,
                   help="window cutoff; attach half-integers: --min-exp=-7/2")
    p.add_argument("--engine", choices=ENGINES, default="csets")
    _add_output(p)
    p.set_defaults(handler=_cmd_genfun_rank2_vb)

    p = genfun_sub.add_parser("rank2-tf", help="rank-2 torsion-free series")
    _add_surface(p)
    _add_class(p)
    p.add_argument("--min-exp", dest="min_exp", type=_min2exp, required=True,
                   help="window cutoff; attach half-integers: --min-exp=-7/2")
    p.add_argument("--engine", choices=ENGINES, default="csets")
    _add_output(p)
    p.set_defaults(handler=_cmd_genfun_rank2_tf)

    p = sub.add_parser("crosscheck", help="compare every applicable engine")
    _add_surface(p)
    _add_class(p)
    p.add_argument("--min-exp", dest="min_exp", type=_min2exp, required=True,
                   help="window cutoff; attach half-integers: --min-exp=-7/2")
    p.add_argument("--include-lambda", action="store_true",
                   help="also run the experimental stratum engine")
    _add_output(p)
    p.set_defaults(handler=_cmd_crosscheck)

    p = sub.add_parser("verify", help="run the full verification suite")
    _add_output(p)
    p.set_defaults(handler=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, text = args.handler(args)
    except (ValueError, ArithmeticError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    doc = json.dumps(payload, sort_keys=True, indent=2)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(doc + "\n")
    print(doc if getattr(args, "json", False) else text)
    if args.handler is _cmd_verify and not payload["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
