"""Command-line driver.

Exit codes: 0 success, 1 bad input or singular parameters, 2 inadmissible
contour, 3 evaluation budget exceeded, 4 rewrite pattern mismatch,
5 numeric check outside tolerance.
"""

import argparse
from dataclasses import dataclass, field
import sys
import time

import numpy as np

from .engine import (
    apply_barnes_first,
    apply_barnes_second,
    check_contour,
    choose_contour,
    reduce_identity_lhs,
)
from .errors import BudgetExceeded, DivergentTailError, MBError, ParseError, PatternMismatch, PoleError
from .expr import Gamma, LinearForm, evaluate, expr_equal_numeric
from .quad import QuadConfig, integrate_one, integrate_two
from .text import format_expr, parse_expr
from .ud import RegTriple, build_lhs_integrand, build_rhs_terms

EXIT_OK, EXIT_INPUT, EXIT_CONTOUR, EXIT_BUDGET, EXIT_PATTERN, EXIT_TOL = 0, 1, 2, 3, 4, 5


def parse_complex(text):
    """``a+bi`` style literal; ``i`` and ``j`` are both accepted."""
    s = text.strip().replace(" ", "").replace("i", "j")
    if s.endswith("j") and s[:-1] in ("", "+", "-"):
        s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def fmt_complex(z, digits=12):
    z = complex(z)
    sign = "-" if z.imag < 0 or (z.imag == 0 and np.signbit(z.imag)) else "+"
    return f"{z.real:.{digits}g}{sign}{abs(z.imag):.{digits}g}i"


def _rel(a, b):
    return abs(a - b) / abs(b)


def _print_kv(out, pairs):
    print("---", file=out)
    for k, v in pairs:
        print(f"{k}={v}", file=out)


# --------------------------------------------------------------------------
# barnes


def barnes_integrand(kind, n):
    z = LinearForm.symbol("z")
    ls = [LinearForm.symbol(f"l{k}") for k in range(1, n + 1)]
    if kind == "first":
        return Gamma(ls[0] + z) * Gamma(ls[1] + z) * Gamma(ls[2] - z) * Gamma(ls[3] - z)
    total = ls[0] + ls[1] + ls[2] + ls[3] + ls[4]
    return (
        Gamma(ls[0] + z) * Gamma(ls[1] + z) * Gamma(ls[2] + z) * Gamma(ls[3] - z) * Gamma(ls[4] - z)
        * Gamma(total + z, -1)
    )


def cmd_barnes(args, out=sys.stdout):
    n = 4 if args.kind == "first" else 5
    if len(args.lambdas) != n:
        print(f"error: the {args.kind} lemma takes {n} parameters", file=sys.stderr)
        return EXIT_INPUT
    e = barnes_integrand(args.kind, n)
    params = {f"l{k}": lam for k, lam in enumerate(args.lambdas, 1)}
    spec = choose_contour(e, params)
    if not spec.admissible:
        print("no separating contour: " + ", ".join(spec.describe_violations()), file=out)
        return EXIT_CONTOUR
    lemma = apply_barnes_first if args.kind == "first" else apply_barnes_second
    closed = complex(evaluate(lemma(e, "z"), params))
    cfg = QuadConfig.one_fold(rel_tol=min(1e-10, args.tol / 10), max_evaluations=args.max_evals or 200_000)
    try:
        res = integrate_one(e, "z", spec, params, cfg)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=out)
        return EXIT_BUDGET
    err = _rel(res.value, closed)
    ok = err < args.tol
    print(f"Barnes {args.kind} lemma, offset {spec.offsets['z']:g}", file=out)
    print(f"  numeric     {fmt_complex(res.value)}  (+- {res.abs_error_estimate:.2e})", file=out)
    print(f"  closed form {fmt_complex(closed)}", file=out)
    print(f"  rel. error  {err:.3e}  {'PASS' if ok else 'FAIL'}", file=out)
    _print_kv(out, [
        ("numeric", fmt_complex(res.value)), ("closed_form", fmt_complex(closed)), ("rel_error", f"{err:.6e}"),
        ("evaluations", res.evaluations), ("verdict", "PASS" if ok else "FAIL"),
    ])
    return EXIT_OK if ok else EXIT_TOL


# --------------------------------------------------------------------------
# reduce


def _singular_check(reg_values, exprs):
    for e in exprs:
        try:
            evaluate(e, {**reg_values, "u": -0.3 + 0.1j, "v": -0.2 - 0.15j})
        except (PoleError, ZeroDivisionError) as exc:
            return str(exc)
    return None


def cmd_reduce(args, out=sys.stdout):
    eps = {"eps1": args.eps1, "eps2": args.eps2}
    try:
        result, trace = reduce_identity_lhs(RegTriple())
    except PatternMismatch as exc:
        print(f"pattern mismatch: {exc}", file=out)
        return EXIT_PATTERN
    rhs = build_rhs_terms()
    # the residue term carries both double-pole locations; it and the RHS are
    # singular exactly when the parameters collide with a pole
    problem = _singular_check(eps, [trace.residues()[-1].value, rhs])
    if problem:
        print(f"singular at eps1={fmt_complex(args.eps1)}, eps2={fmt_complex(args.eps2)}: {problem}", file=out)
        return EXIT_INPUT
    rng = np.random.default_rng(args.seed)
    ok, witness = expr_equal_numeric(result, rhs, n_samples=50, tol=args.tol, rng=rng, fixed=eps)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(trace.to_text())
    print("reduced left-hand side:", file=out)
    for t in result.terms:
        print(f"  {format_expr(t)}", file=out)
    print(f"steps: {', '.join(trace.rules())}", file=out)
    print(f"numeric equality with the closed form: {'PASS' if ok else 'FAIL'}", file=out)
    if witness:
        print(f"  witness: {witness}", file=out)
    _print_kv(out, [("terms", len(result.terms)), ("steps", len(trace.steps)), ("verdict", "PASS" if ok else "FAIL")])
    return EXIT_OK if ok else EXIT_TOL


# --------------------------------------------------------------------------
# verify


@dataclass
class VerificationReport:
    parameters: dict
    offsets: dict
    lhs_numeric: complex
    lhs_error: float
    rhs_closed_form: complex
    residue_term_value: complex
    discrepancy_with_residues: float
    discrepancy_without_residues: float
    tol: float
    runtime: float
    evaluations: int
    verdict: str = field(init=False)

    def __post_init__(self):
        with_ok = self.discrepancy_with_residues < self.tol
        without_ok = self.discrepancy_without_residues < self.tol
        if with_ok and without_ok:
            self.verdict = "ambiguous"
        elif without_ok:
            self.verdict = "straight-line"
        elif with_ok:
            self.verdict = "straight-line-plus-residues"
        else:
            self.verdict = "none"

    @property
    def passed(self):
        return self.verdict in ("straight-line", "straight-line-plus-residues")

    def to_text(self, timing=True):
        p = self.parameters
        lines = [
            "two-fold check of the D x D reduction",
            "  parameters  " + ", ".join(f"{k}={fmt_complex(v)}" for k, v in p.items()),
            "  offsets     " + ", ".join(f"{k}={v:g}" for k, v in self.offsets.items()),
            f"  lhs numeric {fmt_complex(self.lhs_numeric)}  (+- {self.lhs_error:.2e})",
            f"  rhs closed  {fmt_complex(self.rhs_closed_form)}",
            f"  residue     {fmt_complex(self.residue_term_value)}",
            f"  |lhs - rhs| / |rhs|           {self.discrepancy_without_residues:.3e}",
            f"  |lhs + res - rhs| / |rhs|     {self.discrepancy_with_residues:.3e}",
            f"  convention  {self.verdict}  ({'PASS' if self.passed else 'FAIL'} at tol {self.tol:g})",
        ]
        kv = [(k, fmt_complex(v)) for k, v in p.items()]
        kv += [(f"offset_{k}", f"{v:.6g}") for k, v in self.offsets.items()]
        kv += [
            ("lhs_numeric", fmt_complex(self.lhs_numeric)),
            ("lhs_error", f"{self.lhs_error:.3e}"),
            ("rhs_closed_form", fmt_complex(self.rhs_closed_form)),
            ("residue_term_value", fmt_complex(self.residue_term_value)),
            ("discrepancy_without_residues", f"{self.discrepancy_without_residues:.6e}"),
            ("discrepancy_with_residues", f"{self.discrepancy_with_residues:.6e}"),
            ("verdict", self.verdict),
            ("evaluations", self.evaluations),
        ]
        if timing:
            kv.append(("runtime_s", f"{self.runtime:.2f}"))
        return "\n".join(lines + ["---"] + [f"{k}={v}" for k, v in kv]) + "\n"


def run_verification(eps1, eps2, u, v, offsets=None, tol=1e-4, max_evals=None):
    """Numeric two-fold integral against the closed form; raises on bad contour or budget."""
    params = {"eps1": eps1, "eps2": eps2, "u": u, "v": v}
    e = build_lhs_integrand()
    if offsets is None:
        spec = choose_contour(e, params)
    else:
        spec = check_contour(e, {"z2": offsets[0], "z3": offsets[1]}, params)
    _, trace = reduce_identity_lhs()
    residue = complex(evaluate(trace.residues()[-1].value, params))
    rhs = complex(evaluate(build_rhs_terms(), params))
    cfg = QuadConfig.two_fold(rel_tol=min(1e-6, tol / 100), max_evaluations=max_evals or 40_000_000)
    start = time.perf_counter()
    res = integrate_two(e, "z2", "z3", spec, params, cfg)
    runtime = time.perf_counter() - start
    return VerificationReport(
        parameters=params,
        offsets=dict(spec.offsets),
        lhs_numeric=res.value,
        lhs_error=res.abs_error_estimate,
        rhs_closed_form=rhs,
        residue_term_value=residue,
        discrepancy_with_residues=_rel(res.value + residue, rhs),
        discrepancy_without_residues=_rel(res.value, rhs),
        tol=tol,
        runtime=runtime,
        evaluations=res.evaluations,
    )


def cmd_verify(args, out=sys.stdout):
    from .errors import NotAdmissible

    try:
        report = run_verification(args.eps1, args.eps2, args.u, args.v, args.offsets, args.tol, args.max_evals)
    except NotAdmissible as exc:
        print("inadmissible contour", file=out)
        for form in exc.violated:
            print(f"  violated: Re({form}) > 0", file=out)
        return EXIT_CONTOUR
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=out)
        return EXIT_BUDGET
    except (PoleError, ZeroDivisionError) as exc:
        print(f"singular parameters: {exc}", file=out)
        return EXIT_INPUT
    out.write(report.to_text(timing=not args.no_timing))
    return EXIT_OK if report.passed else EXIT_TOL


# --------------------------------------------------------------------------
# eval


def _binding(text):
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    return name.strip(), parse_complex(value)


def cmd_eval(args, out=sys.stdout):
    e = parse_expr(args.expr)
    point = dict(args.bindings)
    missing = sorted(set(e.symbols) - set(point))
    if missing:
        print(f"error: unbound symbols {', '.join(missing)}", file=sys.stderr)
        return EXIT_INPUT
    try:
        value = complex(evaluate(e, point))
    except (PoleError, ZeroDivisionError) as exc:
        print(f"singular: {exc}", file=out)
        return EXIT_INPUT
    print(fmt_complex(value, 16), file=out)
    return EXIT_OK


# --------------------------------------------------------------------------


def _offsets(text):
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected c2,c3, got {text!r}") from None
    return a, b


def build_parser():
    p = argparse.ArgumentParser(prog="mbarnes", description="Barnes-lemma reduction of MB integrals")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("barnes", help="check a Barnes lemma numerically")
    b.add_argument("kind", choices=["first", "second"])
    b.add_argument("lambdas", nargs="+", type=parse_complex)
    b.add_argument("--tol", type=float, default=1e-9)
    b.add_argument("--max-evals", type=int, default=None)
    b.set_defaults(func=cmd_barnes)

    r = sub.add_parser("reduce", help="reduce the D x D integral and check it symbolically")
    r.add_argument("--eps1", type=parse_complex, default=0.1)
    r.add_argument("--eps2", type=parse_complex, default=0.07)
    r.add_argument("--trace", default=None, help="write the proof trace here")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--tol", type=float, default=1e-10)
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="two-fold numeric check against the closed form")
    v.add_argument("--eps1", type=parse_complex, default=0.1)
    v.add_argument("--eps2", type=parse_complex, default=0.07)
    v.add_argument("--u", type=parse_complex, default=complex(-0.4, 0.3))
    v.add_argument("--v", type=parse_complex, default=complex(-0.35, -0.2))
    v.add_argument("--offsets", type=_offsets, default=None, help="c2,c3 (default: chosen automatically)")
    v.add_argument("--tol", type=float, default=1e-4)
    v.add_argument("--max-evals", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--no-timing", action="store_true", help="omit the runtime line")
    v.set_defaults(func=cmd_verify)

    ev = sub.add_parser("eval", help="evaluate an expression at a point")
    ev.add_argument("expr")
    ev.add_argument("bindings", nargs="*", type=_binding)
    ev.set_defaults(func=cmd_eval)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PatternMismatch as exc:
        print(f"pattern mismatch: {exc}", file=sys.stderr)
        return EXIT_PATTERN
    except DivergentTailError as exc:
        print(f"divergent integral: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MBError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
