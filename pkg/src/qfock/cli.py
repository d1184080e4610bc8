"""Command-line front end: ``qfock stirling | eval | verify``.

Exit codes: 0 when every check holds, 1 when a check fails, 2 for usage or
domain errors (reported as a JSON object ``{"error": {...}}``).
"""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .errors import DivergenceError, QFockError, TruncationError
from .qnum import DEFAULT_EXACT_ORDER, DEFAULT_NUMERIC_ORDER, QContext, eq_exp_summation
from .realization import build_realization, eval_Sq, verify_realization
from .report import Report, dumps
from .series import SeriesIdentity, verify_coefficient_recovery, verify_series_identity
from .spaces import (FUNCTIONAL_IDENTITIES, MATRIX_IDENTITIES, AnalyticCheck, KernelId,
                     kernel_eval, verify_analytic, verify_space_identity, verify_Tq)
from .stirling import (stirling_oracle, stirling_recursive, stirling_table_render,
                       verify_stirling)
from .transform import jackson_integral, verify_transform

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("series", "stirling", "spaces", "transform", "realization")
REALIZATION_ORDER = 48


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("UsageError", message)
        raise SystemExit(EXIT_USAGE)


def _emit_error(kind: str, message: str) -> None:
    sys.stdout.write(dumps({"error": {"type": kind, "message": message}}) + "\n")


def _q_value(text: str):
    if text == "exact":
        return None
    try:
        q = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"q must be a number in [0, 1] or 'exact', got {text!r}")
    if not (0.0 <= q <= 1.0) or math.isnan(q):
        raise argparse.ArgumentTypeError(f"q must lie in [0, 1], got {text}")
    return q


def _numeric_q(text: str) -> float:
    q = _q_value(text)
    if q is None:
        raise argparse.ArgumentTypeError("this command needs a numeric q")
    return q


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _order(text: str) -> int:
    n = int(text)
    if n < 4:
        raise argparse.ArgumentTypeError(f"N must be >= 4, got {n}")
    return n


def _num(z: complex):
    """Real numbers print as floats, others as ``{"re", "im"}``."""
    z = complex(z)
    if z.imag == 0.0:
        return z.real
    return {"re": z.real, "im": z.imag}


def _text_num(z) -> str:
    v = _num(z)
    if isinstance(v, float):
        return repr(v)
    return repr(complex(v["re"], v["im"]))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qfock", description="q-calculus operators, spaces and identity checks")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    st = sub.add_parser("stirling", help="table of q-Stirling numbers")
    st.add_argument("--n", type=int, default=4, dest="n_max")
    st.add_argument("--format", choices=("text", "json"), default="text")
    st.add_argument("--check-oracle", action="store_true",
                    help="compare the recursion with the operator-expansion oracle")

    ev = sub.add_parser("eval", help="evaluate one object")
    evs = ev.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    e1 = evs.add_parser("eq_exp")
    e1.add_argument("--z", type=_complex, required=True)
    e1.add_argument("--method", choices=("series", "product"), default="series")
    e2 = evs.add_parser("kernel")
    e2.add_argument("--which", choices=("k1", "k2", "k1_minus_k2"), default="k1")
    e2.add_argument("--z", type=_complex, required=True)
    e2.add_argument("--w", type=_complex, required=True)
    e3 = evs.add_parser("Sq")
    e3.add_argument("--z", type=_complex, required=True)
    e3.add_argument("--N", type=_order, default=REALIZATION_ORDER)
    e4 = evs.add_parser("jackson")
    e4.add_argument("--pow", type=int, default=0, dest="power")
    e4.add_argument("--a", type=float, required=True)
    for e in (e1, e2, e3, e4):
        e.add_argument("--q", type=_numeric_q, required=True)
        e.add_argument("--format", choices=("text", "json"), default="text")

    vf = sub.add_parser("verify", help="run identity suites")
    vf.add_argument("--suite", choices=SUITES + ("all",), default="all")
    vf.add_argument("--q", type=_q_value, nargs="+", default=None,
                    help="one or more q values in [0, 1], or 'exact'")
    vf.add_argument("--exact", action="store_true", help="shorthand for --q exact")
    vf.add_argument("--N", type=_order, default=None)
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--format", choices=("text", "json"), default="json")
    vf.add_argument("--output", default=None, help="write the report here instead of stdout")
    return p


# -- commands ----------------------------------------------------------------

def cmd_stirling(args) -> int:
    if args.n_max < 1:
        _emit_error("UsageError", f"--n must be >= 1, got {args.n_max}")
        return EXIT_USAGE
    table = stirling_recursive(args.n_max)
    print(stirling_table_render(table, args.format))
    if args.check_oracle:
        bad = [n for n in range(1, args.n_max + 1)
               if stirling_oracle(n) != [p for p in table.row(n)]]
        if bad:
            print(f"oracle mismatch in rows {bad}", file=sys.stderr)
            return EXIT_FAIL
        print(f"oracle agrees for n <= {args.n_max}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    kind = args.kind
    ctx = QContext.numeric(args.q)
    meta: dict = {"kind": kind, "q": args.q}
    if kind == "eq_exp":
        t = eq_exp_summation(args.z, ctx, args.method)
        meta.update(z=_num(args.z), method=args.method, terms=t.terms, tail=t.tail)
        value = t.value
    elif kind == "kernel":
        kid = {"k1": KernelId.K1Q, "k2": KernelId.K2Q, "k1_minus_k2": KernelId.K1_MINUS_K2}[args.which]
        value = kernel_eval(kid, args.z, args.w, ctx)
        meta.update(which=kid.value, z=_num(args.z), w=_num(args.w))
    elif kind == "Sq":
        sys_ = build_realization(ctx, args.N)
        value = eval_Sq(sys_, args.z)
        meta.update(z=_num(args.z), N=args.N, defect_rank=sys_.d)
    else:
        power = args.power
        if power < 0:
            raise ValueError(f"--pow must be >= 0, got {power}")
        t = jackson_integral(lambda x: x**power, args.a, ctx)
        value = t.value
        meta.update(power=power, a=args.a, terms=t.terms, tail=t.tail)
    meta["value"] = _num(value)
    if args.format == "json":
        print(dumps(meta))
    else:
        print(_text_num(value))
    return EXIT_OK


def _contexts(args) -> list[float | None]:
    qs = args.q if args.q is not None else []
    if args.exact:
        qs = [None] + [q for q in qs if q is not None]
    if not qs:
        qs = [0.5]
    seen, out = set(), []
    for q in qs:
        key = "exact" if q is None else q
        if key not in seen:
            seen.add(key)
            out.append(q)
    return out


def _suite_reports(suite: str, q, N: int | None, seed: int, skipped: list) -> list[Report]:
    exact = q is None
    order = N if N is not None else (DEFAULT_EXACT_ORDER if exact else DEFAULT_NUMERIC_ORDER)
    ctx = QContext.exact(order) if exact else QContext.numeric(q, order)
    label = "exact" if exact else f"q={q}"
    out: list[Report] = []

    if suite == "series":
        for ident in SeriesIdentity:
            if ctx.classical and ident in (SeriesIdentity.ITERATED_POWERS, SeriesIdentity.RQ_FACTORED):
                skipped.append(f"{ident.value} at {label}: involves 1/(1-q)")
                continue
            out.append(verify_series_identity(ident, ctx))
        out.append(verify_coefficient_recovery(ctx, seed=seed))
    elif suite == "stirling":
        out.append(verify_stirling())
    elif suite == "spaces":
        for ident in MATRIX_IDENTITIES:
            out.append(verify_space_identity(ident, ctx))
        out.append(verify_Tq(ctx))
        if exact:
            skipped.append(f"functional and analytic spaces checks at {label}: numeric only")
        else:
            for ident in FUNCTIONAL_IDENTITIES:
                out.append(verify_space_identity(ident, ctx, seed=seed))
            for check in AnalyticCheck:
                if ctx.classical and check is AnalyticCheck.MZ_NORM_BOUND:
                    skipped.append(f"{check.value} at {label}: M_z is unbounded")
                    continue
                out.append(verify_analytic(check, ctx, seed))
    elif suite == "transform":
        if exact or ctx.classical:
            skipped.append(f"transform suite at {label}: needs numeric q < 1")
        else:
            out.extend(verify_transform(ctx))
    elif suite == "realization":
        if exact or ctx.classical:
            skipped.append(f"realization suite at {label}: needs numeric q < 1")
        else:
            out.append(verify_realization(ctx, N if N is not None else REALIZATION_ORDER, seed))
    return out


def _sort_key(r: Report):
    return (r.identity, -1.0 if r.q is None else r.q, r.mode)


def cmd_verify(args) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    reports: list[Report] = []
    skipped: list[str] = []
    for suite in suites:
        if suite == "stirling":
            reports.extend(_suite_reports(suite, None, args.N, args.seed, skipped))
            continue
        for q in _contexts(args):
            reports.extend(_suite_reports(suite, q, args.N, args.seed, skipped))
    reports.sort(key=_sort_key)
    if args.format == "json":
        text = dumps([r.to_dict() for r in reports]) + "\n"
    else:
        lines = []
        for r in reports:
            q = "exact" if r.q is None else repr(r.q)
            lines.append(f"{'PASS' if r.holds else 'FAIL'}  {r.identity:<28} q={q:<6} N={r.N:<3} "
                         f"max_defect={r.max_defect}")
        text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for s in skipped:
        print(f"skipped: {s}", file=sys.stderr)
    failed = [r.identity for r in reports if not r.holds]
    if failed:
        print(f"failed: {', '.join(sorted(set(failed)))}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"stirling": cmd_stirling, "eval": cmd_eval, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except (DivergenceError, TruncationError) as exc:
        # a numerical contract broke while checking: a failed check, not a usage error
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_FAIL
    except (QFockError, ValueError, ArithmeticError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
