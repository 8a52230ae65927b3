"""Deterministic command-line front end.

Every subcommand writes a single JSON (or CSV) artifact to stdout or to
``--out``; identical inputs produce byte-identical outputs (sorted JSON
keys, exact rational strings, correctly rounded decimals, no timestamps).
Commands attach audit flags to their reports; ``--strict`` turns any
``discrepancy:`` flag into exit status 1.  Exit status 2 marks a
configuration error, 3 an ingestion error.  DIVFILT_THREADS caps the
worker count of the large scans.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from divfilt import asymptotics, beatty, monomial, picard
from divfilt.intersection import DivisorExpr, POLY_X, POLY_Y, form_from_json, triple_product
from divfilt.quadfield import QuadExt, parse_rational

_DN_EXPR = DivisorExpr({"S": POLY_X, "F": POLY_Y})
_K_EXPR = DivisorExpr.single("K")

__all__ = ["main", "ConfigError", "IngestError"]


class ConfigError(ValueError):
    """Invalid parameter combination (exit status 2)."""


class IngestError(ValueError):
    """Unreadable or malformed input document (exit status 3)."""


def _dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IngestError(f"{path} is not valid JSON: {exc}") from exc


def _positive(kind: str, value: int) -> int:
    if value < 1:
        raise ConfigError(f"{kind} must be positive, got {value}")
    return value


def _parse_quad(args) -> QuadExt:
    try:
        a = parse_rational(args.a)
        b = parse_rational(args.b)
        return QuadExt(a, b, args.d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _alpha_from_args(args) -> QuadExt:
    try:
        alpha = QuadExt(parse_rational(args.alpha_a), parse_rational(args.alpha_b), args.alpha_d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if alpha.is_rational() or alpha.sign() <= 0:
        raise ConfigError("alpha must be a positive irrational")
    return alpha


# -- subcommands ----------------------------------------------------------------


def _cmd_quad_eval(args) -> tuple[str, list[str]]:
    x = _parse_quad(args)
    payload = {
        "value": x.to_json(args.digits),
        "sign": x.sign(),
        "is_rational": x.is_rational(),
        "minimal_quadratic": list(x.minimal_quadratic()),
        "audit_flags": [],
    }
    if args.scale is not None:
        n = _positive("--scale", args.scale)
        payload["scale"] = n
        payload["floor_scaled"] = x.floor_scaled(n)
        payload["ceil_scaled"] = x.ceil_scaled(n)
    return _dumps(payload), []


def _cmd_beatty_scan(args) -> tuple[str, list[str]]:
    alpha = _alpha_from_args(args)
    n_max = _positive("--n-max", args.n_max)
    seq = beatty.BeattySequence(alpha)
    if args.bins is not None:
        if args.bins < 2:
            raise ConfigError("--bins must be at least 2")
        report = beatty.equidistribution_histogram(seq, n_max, args.bins)
    else:
        if not (0 < alpha < 1):
            raise ConfigError("binary partition labeling needs 0 < alpha < 1; pass --bins")
        report = beatty.partition(seq, n_max)
    payload = {
        "alpha": alpha.to_json(args.digits),
        "window_constant": beatty.window_constant(seq),
        "report": report.to_json(),
        "audit_flags": [],
    }
    if 0 < alpha < 1:
        gap = abs(report.sigma2_density - alpha)
        payload["density_gap"] = gap.to_json(args.digits)
    return _dumps(payload), []


def _example_model_from_args(args) -> asymptotics.ExampleModel:
    if args.table is None:
        doc = json.loads(
            resources.files("divfilt").joinpath("data/intersection_table.json").read_text()
        )
    else:
        doc = _load_json(args.table)
    try:
        form = form_from_json(doc)
        p3 = triple_product(form, _DN_EXPR, _DN_EXPR, _DN_EXPR)
        p2 = triple_product(form, _DN_EXPR, _DN_EXPR, _K_EXPR)
        return asymptotics.ExampleModel(asymptotics.example_alpha(), p3, p2)
    except ValueError as exc:
        raise IngestError(f"bad intersection table: {exc}") from exc


def _cmd_example_limits(args) -> tuple[str, list[str]]:
    model = _example_model_from_args(args)
    report = asymptotics.limit_exists_report(model)
    return _dumps(report.to_json(args.digits)), list(report.audit_flags)


def _cmd_example_scan(args) -> tuple[str, list[str]]:
    model = _example_model_from_args(args)
    n_max = args.n_max
    if n_max < 10:
        raise ConfigError("--n-max must be at least 10")
    stride = _positive("--stride", args.stride)
    checkpoints = tuple(sorted({c for c in (args.checkpoint or [])}))
    for c in checkpoints:
        if not 1 <= c <= n_max:
            raise ConfigError(f"--checkpoint {c} outside [1, {n_max}]")
    scan = asymptotics.empirical_scan(model, n_max, stride, checkpoints)
    lines = ["n,sigma,ceil_alpha_n,delta_exact,delta_over_n2_decimal"]
    for row in scan.rows:
        delta = f"{row.delta.numerator}/{row.delta.denominator}" if row.delta.denominator != 1 else str(row.delta.numerator)
        dec = QuadExt.from_rational(row.ratio, model.alpha.d).to_decimal(args.digits)
        lines.append(f"{row.n},{row.sigma},{row.ceil_alpha_n},{delta},{dec}")
    csv_text = "\n".join(lines) + "\n"
    if args.summary_out is not None:
        _emit(_dumps(scan.to_json(args.digits)), args.summary_out)
    return csv_text, []


def _cmd_monomial_check(args) -> tuple[str, list[str]]:
    n_max = _positive("--n-max", args.n_max)
    if args.sigma is None:
        f = monomial.SigmaFiltration(table=tuple(range(1, 2 * n_max + 1)))
        source = "identity"
    else:
        doc = _load_json(args.sigma)
        try:
            f = monomial.SigmaFiltration.from_json(doc)
        except ValueError as exc:
            raise IngestError(f"bad sigma table: {exc}") from exc
        source = args.sigma
        if len(f.table) < n_max:
            raise IngestError(
                f"sigma table has {len(f.table)} entries but --n-max is {n_max}"
            )
    flags: list[str] = []
    rows = []
    for n in range(1, n_max + 1):
        ideal = monomial.build_In(f, n)
        count = monomial.min_gens_count(ideal)
        expected = f.sigma(n) + 2
        ok = count == expected
        if not ok:
            flags.append(f"discrepancy:min-gens-count n={n} count={count} expected={expected}")
        rows.append(
            {
                "n": n,
                "gens": sorted(list(g) for g in ideal.generators),
                "count": count,
                "expected": expected,
                "ok": ok,
            }
        )
    payload = {
        "sigma_source": source,
        "n_max": n_max,
        "rows": rows,
        "all_ok": not flags,
        "audit_flags": flags,
    }
    if args.filtration_max is not None:
        m = _positive("--filtration-max", args.filtration_max)
        if args.sigma is not None and len(f.table) < 2 * m:
            raise IngestError(f"filtration check up to {m} needs {2 * m} sigma entries")
        rep = monomial.filtration_check(f, m, m)
        payload["filtration"] = rep.to_json()
        if not rep.ok:
            flags.extend(
                f"discrepancy:filtration-containment m={m_} n={n_}" for m_, n_, _, _ in rep.failures
            )
            payload["audit_flags"] = flags
            payload["all_ok"] = False
    return _dumps(payload), flags


def _cmd_elliptic_qn(args) -> tuple[str, list[str]]:
    if args.curve is None:
        curve, p, q = picard.default_curve()
        points = {"p": p, "q": q}
    else:
        doc = _load_json(args.curve)
        try:
            curve, points = picard.curve_from_json(doc)
        except ValueError as exc:
            raise IngestError(f"bad curve document: {exc}") from exc
        if "p" not in points or "q" not in points:
            raise IngestError("curve document must name points 'p' and 'q'")
        p, q = points["p"], points["q"]
    n_max = _positive("--n-max", args.n_max)
    bound = _positive("--witness-bound", args.witness_bound)
    restrict_max = _positive("--restriction-max", args.restriction_max)
    flags: list[str] = []
    step = curve.sub(q, p)
    witness = picard.infinite_order_witness(curve, step, bound)
    if not witness.passed:
        flags.append(f"discrepancy:torsion-step order={witness.failed_at}")
    seq = picard.qn_sequence(curve, p, q, n_max)
    if not seq.all_distinct:
        flags.append(f"discrepancy:qn-collisions count={len(seq.collisions)}")
    if not seq.avoids_q:
        flags.append("discrepancy:qn-returns-to-q")
    restriction = []
    all_trivial = True
    for n in range(1, restrict_max + 1):
        rep = picard.restriction_report(curve, p, q, n)
        ok = rep.trivial and rep.abel_jacobi_consistent and rep.exceptional_rules_coherent
        all_trivial = all_trivial and ok
        if not ok:
            flags.append(f"discrepancy:restriction-nontrivial n={n}")
            restriction.append(rep.to_json())
    payload = {
        "curve": picard.curve_to_json(curve, {"p": p, "q": q}),
        "witness": witness.to_json(),
        "qn": seq.to_json(),
        "restriction": {
            "max_n": restrict_max,
            "all_trivial": all_trivial,
            "failures": restriction,
        },
        "audit_flags": flags,
    }
    return _dumps(payload), flags


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report to this path instead of stdout")
    common.add_argument("--digits", type=int, default=30, help="decimal digits in renderings")
    common.add_argument(
        "--strict",
        action="store_true",
        help="exit with status 1 when any discrepancy audit flag is raised",
    )
    parser = argparse.ArgumentParser(
        prog="divfilt",
        description="Exact-arithmetic reports on divisorial-filtration asymptotics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str):
        return sub.add_parser(name, help=help_text, parents=[common])

    q = add("quad-eval", "evaluate one quadratic-field value")
    q.add_argument("--a", required=True, help="rational part, as 'p' or 'p/q'")
    q.add_argument("--b", required=True, help="sqrt coefficient, as 'p' or 'p/q'")
    q.add_argument("--d", type=int, required=True, help="squarefree radicand >= 2")
    q.add_argument("--scale", type=int, help="also report floor/ceil of scale*value")
    q.set_defaults(func=_cmd_quad_eval)

    b = add("beatty-scan", "two-value partition and equidistribution scan")
    b.add_argument("--n-max", type=int, required=True)
    b.add_argument("--bins", type=int, help="fractional-part histogram bins (>= 2)")
    b.add_argument("--alpha-a", default="9/26")
    b.add_argument("--alpha-b", default="1/26")
    b.add_argument("--alpha-d", type=int, default=3)
    b.set_defaults(func=_cmd_beatty_scan)

    el = add("example-limits", "limit report for the bundled example model")
    el.add_argument("--table", help="intersection table JSON (default: bundled table)")
    el.set_defaults(func=_cmd_example_limits)

    es = add("example-scan", "exact first-difference scan (CSV)")
    es.add_argument("--n-max", type=int, required=True)
    es.add_argument("--stride", type=int, default=1)
    es.add_argument("--checkpoint", type=int, action="append", help="record running max here")
    es.add_argument("--table", help="intersection table JSON (default: bundled table)")
    es.add_argument("--summary-out", help="also write the JSON scan summary to this path")
    es.set_defaults(func=_cmd_example_scan)

    mc = add("monomial-check", "minimal-generator counts of the z-filtration")
    mc.add_argument("--sigma", help="JSON array; entry k (0-based) is sigma(k+1)")
    mc.add_argument("--n-max", type=int, required=True)
    mc.add_argument("--filtration-max", type=int, help="also check I_m I_n in I_(m+n) up to here")
    mc.set_defaults(func=_cmd_monomial_check)

    eq = add("elliptic-qn", "elliptic point sequence and restriction audit")
    eq.add_argument("--curve", help="curve JSON (default: y^2 = x^3 - 2 over Q, p=O, q=(3,5))")
    eq.add_argument("--n-max", type=int, default=60)
    eq.add_argument("--witness-bound", type=int, default=12)
    eq.add_argument("--restriction-max", type=int, default=50)
    eq.set_defaults(func=_cmd_elliptic_qn)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.digits < 1 or args.digits > 10_000:
        parser.exit(2, "divfilt: --digits must be in [1, 10000]\n")
    try:
        text, flags = args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"divfilt: configuration error: {exc}\n")
        return 2
    except IngestError as exc:
        sys.stderr.write(f"divfilt: ingestion error: {exc}\n")
        return 3
    _emit(text, args.out)
    if args.strict and any(f.startswith("discrepancy:") for f in flags):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
