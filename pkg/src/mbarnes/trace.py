"""Proof traces: replayable records of rewrite steps.

Text format, one record per step::

    mbarnes-trace 1
    step 1
    rule: residue
    arg variable: z2
    arg pole: eps2
    input: product 1 * Gamma(-z2) * ...
    output: product ...
    residue: z2 | eps2 | 1 * Gamma(...)
    end
"""

from dataclasses import dataclass, field

from .errors import ParseError
from .expr import ExprSum, GammaProduct, lf, normalize
from .text import format_expr, parse_expr

HEADER = "mbarnes-trace 1"


@dataclass(frozen=True)
class Residue:
    variable: str
    pole: object  # LinearForm
    value: GammaProduct


@dataclass(frozen=True)
class Step:
    rule: str
    input: object
    output: object
    args: tuple = ()  # sorted (name, text) pairs
    residues: tuple = ()

    @property
    def arg(self):
        return dict(self.args)


@dataclass
class ProofTrace:
    steps: list = field(default_factory=list)

    def add(self, rule, input, output, residues=(), **args):
        step = Step(rule, input, output, tuple(sorted((k, str(v)) for k, v in args.items())), tuple(residues))
        self.steps.append(step)
        return output

    def rules(self):
        return [s.rule for s in self.steps]

    def residues(self):
        return [r for s in self.steps for r in s.residues]

    def to_text(self):
        lines = [HEADER]
        for i, s in enumerate(self.steps, 1):
            lines.append(f"step {i}")
            lines.append(f"rule: {s.rule}")
            lines += [f"arg {k}: {v}" for k, v in s.args]
            lines.append(f"input: {_dump(s.input)}")
            lines.append(f"output: {_dump(s.output)}")
            lines += [f"residue: {r.variable} | {r.pole} | {_dump(r.value)}" for r in s.residues]
            lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != HEADER:
            raise ParseError("not a proof trace")
        trace = cls()
        cur = None
        for ln in lines[1:]:
            if ln.startswith("step "):
                cur = {"args": [], "residues": []}
            elif ln == "end":
                trace.steps.append(
                    Step(cur["rule"], cur["input"], cur["output"], tuple(sorted(cur["args"])), tuple(cur["residues"]))
                )
                cur = None
            elif cur is None:
                raise ParseError(f"line outside a step: {ln!r}")
            elif ln.startswith("rule: "):
                cur["rule"] = ln[6:].strip()
            elif ln.startswith("arg "):
                k, v = ln[4:].split(":", 1)
                cur["args"].append((k.strip(), v.strip()))
            elif ln.startswith("input: "):
                cur["input"] = _load(ln[7:])
            elif ln.startswith("output: "):
                cur["output"] = _load(ln[8:])
            elif ln.startswith("residue: "):
                var, pole, value = (x.strip() for x in ln[9:].split("|"))
                cur["residues"].append(Residue(var, lf(pole), _load(value)))
            else:
                raise ParseError(f"unknown trace line {ln!r}")
        return trace


def _dump(e):
    kind = "sum" if isinstance(e, ExprSum) else "product"
    return f"{kind} {format_expr(e)}"


def _load(text):
    kind, _, body = text.strip().partition(" ")
    if kind == "sum":
        # term order is part of the record; only the terms are normalized
        raw = parse_expr(body, normalized=False)
        terms = raw.terms if isinstance(raw, ExprSum) else (raw,) if body.strip() != "0" else ()
        return ExprSum(tuple(normalize(t, collapse=False) for t in terms))
    e = parse_expr(body, collapse=False)
    if kind != "product" or isinstance(e, ExprSum):
        raise ParseError(f"bad expression record {text!r}")
    return e


def replay(trace):
    """Re-apply every step; returns the list of step indices that disagree."""
    from .engine import RULES

    bad = []
    for i, s in enumerate(trace.steps, 1):
        out = RULES[s.rule](s.input, **s.arg)
        if out != s.output:
            bad.append(i)
    return bad
