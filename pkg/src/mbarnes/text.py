"""Text form of expressions.

Products print as ``c * Gamma(a)^p * ... * (L)^q``; linear forms as
``1 - eps1 - eps2 + z2 + z3``. Sums join products with `` + ``.
``parse_expr(format_expr(e)) == e`` for every normalized ``e``.
"""

from fractions import Fraction
import re

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _fmt_rational(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_linear_form(form):
    parts = []
    if form.const != 0 or not form.terms:
        parts.append(("-" if form.const < 0 else "+", _fmt_rational(abs(form.const))))
    for name, c in form.terms:
        mag = abs(c)
        body = name if mag == 1 else f"{_fmt_rational(mag)}*{name}"
        parts.append(("-" if c < 0 else "+", body))
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _fmt_power(p):
    return "" if p == 1 else f"^{p}"


def format_product(e):
    items = [_fmt_rational(e.scalar)]
    items += [f"Gamma({format_linear_form(f)}){_fmt_power(p)}" for f, p in e.gammas]
    items += [f"({format_linear_form(f)}){_fmt_power(p)}" for f, p in e.prefactors]
    return " * ".join(items)


def format_expr(e):
    from .expr import ExprSum

    if isinstance(e, ExprSum):
        if not e.terms:
            return "0"
        return " + ".join(format_product(t) for t in e.terms)
    return format_product(e)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"cannot tokenize {text[pos:]!r}")
            num, name, op = m.groups()
            if num is not None:
                self.toks.append(("num", num))
            elif name is not None:
                self.toks.append(("name", name))
            else:
                self.toks.append(("op", op))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if kind is not None and tok[0] != kind or value is not None and tok[1] != value:
            raise ParseError(f"expected {value or kind}, got {tok[1]!r} in {self.text!r}")
        self.i += 1
        return tok

    def accept(self, value):
        if self.peek() == ("op", value):
            self.i += 1
            return True
        return False

    def done(self):
        if self.peek()[0] != "eof":
            raise ParseError(f"trailing input {self.peek()[1]!r} in {self.text!r}")

    # linear forms -------------------------------------------------------
    def lin_expr(self):
        from .expr import LinearForm

        neg = False
        while self.peek() in (("op", "-"), ("op", "+")):
            neg ^= self.take()[1] == "-"
        out = self.lin_term()
        if neg:
            out = -out
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.lin_term()
            out = out + rhs if op == "+" else out - rhs
        return out if isinstance(out, LinearForm) else LinearForm.constant(out)

    def lin_term(self):
        out = self.lin_atom()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.lin_atom()
            out = _lin_mul(out, rhs) if op == "*" else _lin_div(out, rhs)
        return out

    def lin_atom(self):
        from .expr import LinearForm

        kind, val = self.peek()
        if kind == "num":
            self.take()
            return LinearForm.constant(Fraction(val))
        if kind == "name":
            self.take()
            return LinearForm.symbol(val)
        if self.accept("("):
            out = self.lin_expr()
            self.take("op", ")")
            return out
        if self.accept("-"):
            return -self.lin_atom()
        raise ParseError(f"unexpected {val!r} in linear form {self.text!r}")

    # products and sums ---------------------------------------------------
    def sum_expr(self):
        from .expr import ExprSum

        terms = [self.product()]
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.product()
            terms.append(t if op == "+" else -t)
        return terms[0] if len(terms) == 1 else ExprSum(tuple(terms))

    def product(self):
        neg = False
        while self.peek() in (("op", "-"), ("op", "+")):
            neg ^= self.take()[1] == "-"
        out = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            f = self.factor()
            out = out * f if op == "*" else out * f.inverse()
        return -out if neg else out

    def power(self):
        if not self.accept("^"):
            return 1
        neg = self.accept("-")
        p = int(self.take("num")[1])
        return -p if neg else p

    def factor(self):
        from .expr import Gamma, GammaProduct, LinearForm, const, poly

        kind, val = self.peek()
        if kind == "num":
            self.take()
            base = const(Fraction(val))
            p = self.power()
            return GammaProduct(base.scalar**p)
        if kind == "name" and val == "Gamma":
            self.take()
            self.take("op", "(")
            arg = self.lin_expr()
            self.take("op", ")")
            return Gamma(arg, self.power())
        if kind == "name":
            self.take()
            return poly(LinearForm.symbol(val), self.power())
        if self.accept("("):
            mark = self.i
            try:
                arg = self.lin_expr()
                self.take("op", ")")
            except ParseError:
                # not a linear form: a parenthesized product
                self.i = mark
                group = self.sum_expr()
                self.take("op", ")")
                if not isinstance(group, GammaProduct):
                    raise ParseError("sums inside products are not supported") from None
                p = self.power()
                return group if p == 1 else _product_power(group, p)
            return poly(arg, self.power())
        raise ParseError(f"unexpected {val!r} in {self.text!r}")


def _product_power(e, p):
    from .expr import GammaProduct

    base = e if p > 0 else e.inverse()
    return GammaProduct(
        base.scalar ** abs(p),
        tuple((f, q * abs(p)) for f, q in base.gammas),
        tuple((f, q * abs(p)) for f, q in base.prefactors),
    )


def _lin_mul(a, b):
    if b.is_constant():
        return a * b.const
    if a.is_constant():
        return b * a.const
    raise ParseError("product of two non-constant linear forms")


def _lin_div(a, b):
    if not b.is_constant() or b.const == 0:
        raise ParseError("division by a non-constant or zero linear form")
    return a * (1 / b.const)


def parse_linear_form(text):
    p = _Parser(text)
    out = p.lin_expr()
    p.done()
    return out


def parse_expr(text, normalized=True, collapse=True):
    """Parse a product or sum; the result is normalized unless asked otherwise."""
    from .expr import normalize

    p = _Parser(text)
    out = p.sum_expr()
    p.done()
    return normalize(out, collapse=collapse) if normalized else out
