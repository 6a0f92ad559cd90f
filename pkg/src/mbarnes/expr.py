"""Immutable algebra of gamma-product integrands.

A :class:`GammaProduct` is ``scalar * prod Gamma(L_i)^p_i * prod (M_j)^q_j``
where every ``L_i`` and ``M_j`` is a :class:`LinearForm` with rational
coefficients. Sums of such products are :class:`ExprSum`.

Constructors do not canonicalize; call :func:`normalize` (all rewrites in
this module return normalized results).
"""

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
import numbers

import numpy as np

from .errors import DivisionByZero, PatternMismatch, PoleError
from .gamma import log_gamma

# Gamma(L + k) / Gamma(L) is collapsed into a polynomial for integer k up to this
MAX_COLLAPSE_SHIFT = 8

ELIMINATED = {"eps3": {"eps1": Fraction(-1), "eps2": Fraction(-1)}}


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    raise TypeError(f"cannot use {x!r} as a rational coefficient")


@dataclass(frozen=True)
class LinearForm:
    """Affine form ``const + sum(coeff * symbol)`` with exact rational coefficients.

    ``terms`` is sorted by symbol name and never holds a zero coefficient.
    """

    const: Fraction = Fraction(0)
    terms: tuple = ()

    @classmethod
    def make(cls, const=0, coeffs=None):
        acc = defaultdict(Fraction)
        for name, c in (coeffs or {}).items():
            c = _frac(c)
            if name in ELIMINATED:
                for sub, k in ELIMINATED[name].items():
                    acc[sub] += c * k
            else:
                acc[name] += c
        terms = tuple(sorted((n, c) for n, c in acc.items() if c != 0))
        return cls(_frac(const), terms)

    @classmethod
    def symbol(cls, name):
        return cls.make(0, {name: 1})

    @classmethod
    def constant(cls, value):
        return cls(_frac(value), ())

    @classmethod
    def parse(cls, text):
        from .text import parse_linear_form

        return parse_linear_form(text)

    @property
    def coeffs(self):
        return dict(self.terms)

    @property
    def symbols(self):
        return frozenset(n for n, _ in self.terms)

    def is_constant(self):
        return not self.terms

    def coeff(self, name):
        for n, c in self.terms:
            if n == name:
                return c
        return Fraction(0)

    def key(self):
        return (self.terms, self.const)

    def __lt__(self, other):
        return self.key() < other.key()

    def _coerce(self, other):
        if isinstance(other, LinearForm):
            return other
        return LinearForm.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = self.coeffs
        for n, c in other.terms:
            acc[n] = acc.get(n, 0) + c
        return LinearForm.make(self.const + other.const, acc)

    __radd__ = __add__

    def __neg__(self):
        return LinearForm(-self.const, tuple((n, -c) for n, c in self.terms))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, k):
        k = _frac(k)
        return LinearForm.make(self.const * k, {n: c * k for n, c in self.terms})

    __rmul__ = __mul__

    def subs(self, mapping):
        """Simultaneously replace symbols by linear forms."""
        out = LinearForm.constant(self.const)
        for n, c in self.terms:
            out = out + (mapping[n] * c if n in mapping else LinearForm.make(0, {n: c}))
        return out

    def value(self, assignment):
        val = complex(self.const)
        for n, c in self.terms:
            try:
                x = assignment[n]
            except KeyError:
                raise KeyError(f"no value assigned to symbol {n!r}") from None
            val = val + float(c) * x
        return val

    def __str__(self):
        from .text import format_linear_form

        return format_linear_form(self)

    def __repr__(self):
        return f"LinearForm({str(self)!r})"


def lf(x):
    """Coerce a string, number or LinearForm to a LinearForm."""
    if isinstance(x, LinearForm):
        return x
    if isinstance(x, str):
        return LinearForm.parse(x)
    return LinearForm.constant(x)


def _orient(form, toward=None):
    """Return (form', sign) with form = sign * form'.

    The leading coefficient is made positive: the coefficient of ``toward``
    if it occurs, otherwise the first symbol in canonical order.
    """
    if not form.terms:
        return form, 1
    lead = form.coeff(toward) if toward is not None and form.coeff(toward) != 0 else form.terms[0][1]
    if lead < 0:
        return -form, -1
    return form, 1


@dataclass(frozen=True)
class GammaProduct:
    scalar: Fraction = Fraction(1)
    gammas: tuple = ()
    prefactors: tuple = ()

    @classmethod
    def parse(cls, text):
        from .text import parse_expr

        out = parse_expr(text)
        if isinstance(out, ExprSum):
            raise PatternMismatch("text holds a sum, not a single product")
        return out

    @property
    def symbols(self):
        out = set()
        for form, _ in self.gammas + self.prefactors:
            out |= form.symbols
        return frozenset(out)

    def is_zero(self):
        return self.scalar == 0

    def __mul__(self, other):
        if isinstance(other, ExprSum):
            return ExprSum(tuple(self * t for t in other.terms))
        if not isinstance(other, GammaProduct):
            return GammaProduct(self.scalar * _frac(other), self.gammas, self.prefactors)
        return GammaProduct(
            self.scalar * other.scalar,
            self.gammas + other.gammas,
            self.prefactors + other.prefactors,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return GammaProduct(-self.scalar, self.gammas, self.prefactors)

    def inverse(self):
        if self.scalar == 0:
            raise DivisionByZero("cannot invert the zero expression")
        return GammaProduct(
            1 / self.scalar,
            tuple((f, -p) for f, p in self.gammas),
            tuple((f, -p) for f, p in self.prefactors),
        )

    def __truediv__(self, other):
        if isinstance(other, GammaProduct):
            return self * other.inverse()
        return self * (1 / _frac(other))

    def __add__(self, other):
        return ExprSum((self,)) + other

    def __str__(self):
        from .text import format_expr

        return format_expr(self)

    def __repr__(self):
        return f"GammaProduct({str(self)!r})"


ONE = GammaProduct()
ZERO = GammaProduct(Fraction(0))


def Gamma(form, power=1):
    """Single factor Gamma(form)^power."""
    return GammaProduct(Fraction(1), ((lf(form), int(power)),), ())


def poly(form, power=1):
    """Single rational factor (form)^power."""
    return GammaProduct(Fraction(1), (), ((lf(form), int(power)),))


def const(value):
    return GammaProduct(_frac(value))


@dataclass(frozen=True)
class ExprSum:
    terms: tuple = ()

    @classmethod
    def of(cls, *terms):
        return normalize(cls(tuple(terms)))

    @property
    def symbols(self):
        out = set()
        for t in self.terms:
            out |= t.symbols
        return frozenset(out)

    def __add__(self, other):
        if isinstance(other, GammaProduct):
            other = ExprSum((other,))
        return ExprSum(self.terms + other.terms)

    def __mul__(self, other):
        if isinstance(other, ExprSum):
            return ExprSum(tuple(a * b for a in self.terms for b in other.terms))
        return ExprSum(tuple(t * other for t in self.terms))

    __rmul__ = __mul__

    def __neg__(self):
        return ExprSum(tuple(-t for t in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __str__(self):
        from .text import format_expr

        return format_expr(self)

    def __repr__(self):
        return f"ExprSum({str(self)!r})"


# --------------------------------------------------------------------------
# canonical form


def _fold_constant_gamma(form, power):
    """Scalar value of Gamma(c)^power for a constant form, or None if not folded."""
    c = form.const
    if c.denominator != 1:
        return None
    n = c.numerator
    if n >= 1:
        return Fraction(factorial(n - 1)) ** power
    if power < 0:
        return Fraction(0)  # 1/Gamma at a pole
    return None


def _collapse(gam):
    """One Gamma(L+k)/Gamma(L) -> polynomial step. Returns prefactor list or None."""
    forms = sorted(gam)
    for i, a in enumerate(forms):
        for b in forms[i + 1 :]:
            if a.terms != b.terms:
                continue
            shift = b.const - a.const
            if shift.denominator != 1 or shift == 0 or abs(shift) > MAX_COLLAPSE_SHIFT:
                continue
            lo, hi = (a, b) if shift > 0 else (b, a)
            p_lo, p_hi = gam[lo], gam[hi]
            if p_lo * p_hi >= 0:
                continue
            m = min(abs(p_lo), abs(p_hi))
            s = 1 if p_hi > 0 else -1
            gam[hi] -= s * m
            gam[lo] += s * m
            return [(lo + j, s * m) for j in range(abs(int(shift)))]
    return None


def _lower(gam, pre):
    """Fold rational prefactors into gammas via Gamma(L + 1) = L Gamma(L).

    Gamma(L+1)/L -> Gamma(L), L Gamma(L) -> Gamma(L+1), 1/(L Gamma(L)) ->
    1/Gamma(L+1) and L/Gamma(L+1) -> 1/Gamma(L). ``L`` may be either
    orientation of the prefactor. Returns the scalar picked up from signs.
    """
    scalar = Fraction(1)
    for form in list(pre):
        for L, sign in ((form, 1), (-form, -1)):
            q = pre[form]
            if q == 0:
                break
            lo, hi = gam.get(L, 0), gam.get(L + 1, 0)
            # (gamma moved from, gamma moved to, available power with matching sign)
            if q < 0 and hi > 0:
                src, dst, avail = L + 1, L, hi
            elif q > 0 and lo > 0:
                src, dst, avail = L, L + 1, lo
            elif q < 0 and lo < 0:
                src, dst, avail = L, L + 1, lo
            elif q > 0 and hi < 0:
                src, dst, avail = L + 1, L, hi
            else:
                continue
            m = min(abs(avail), abs(q))
            step = m if avail > 0 else -m
            gam[src] -= step
            gam[dst] += step
            pre[form] -= m if q > 0 else -m
            scalar *= Fraction(sign) ** m
    return scalar


def normalize(e, absorb=False, orient=None, collapse=True, lower=False):
    """Canonical form of a product (or of every term of a sum).

    Equal gamma arguments are merged, constant factors are folded into the
    scalar, rational prefactors get a positive leading coefficient and
    ``Gamma(L + k) / Gamma(L)`` (integer ``k``) collapses to the polynomial
    ``L (L+1) ... (L+k-1)``.

    With ``absorb=True`` the opposite happens: every prefactor ``1/L`` is
    rewritten as ``Gamma(L) / Gamma(1 + L)`` (and ``L`` as
    ``Gamma(1 + L) / Gamma(L)``), with ``L`` oriented so that the symbol
    ``orient`` has a positive coefficient when it occurs.

    ``collapse=False`` only merges, folds and sorts (used where a gamma
    ratio must keep its shape for pattern matching).

    ``lower=True`` also trades prefactors for gamma shifts, ``Gamma(L+1)/L ->
    Gamma(L)``. That makes closed forms comparable structurally but can move
    a pole from a ``Gamma(a - v)`` factor to a ``Gamma(v - a)`` one, so the
    rewrite pipeline never uses it.
    """
    if isinstance(e, ExprSum):
        merged = {}
        for t in e.terms:
            t = normalize(t, absorb=absorb, orient=orient, collapse=collapse, lower=lower)
            if t.scalar == 0:
                continue
            k = (t.gammas, t.prefactors)
            merged[k] = merged.get(k, Fraction(0)) + t.scalar
        terms = [GammaProduct(s, g, p) for (g, p), s in merged.items() if s != 0]
        terms.sort(key=_term_key)
        return ExprSum(tuple(terms))

    scalar = _frac(e.scalar)
    if scalar == 0:
        return ZERO
    gam = defaultdict(int)
    pre = defaultdict(int)
    for form, p in e.gammas:
        gam[form] += int(p)
    for form, p in e.prefactors:
        pre[form] += int(p)

    while True:
        before = (scalar, _snapshot(gam), _snapshot(pre))
        # rational prefactors: fold constants, orient the rest
        new_pre = defaultdict(int)
        for form, p in pre.items():
            if p == 0:
                continue
            if form.is_constant():
                if form.const != 0:
                    scalar *= form.const**p
                elif p > 0:
                    return ZERO
                else:
                    new_pre[form] += p
                continue
            oriented, sign = _orient(form, orient if absorb else None)
            scalar *= Fraction(sign) ** p
            if absorb:
                gam[oriented + 1] += p
                gam[oriented] -= p
            else:
                new_pre[oriented] += p
        pre = new_pre

        for form in list(gam):
            p = gam[form]
            if p == 0:
                del gam[form]
            elif form.is_constant():
                v = _fold_constant_gamma(form, p)
                if v == 0:
                    return ZERO
                if v is not None:
                    scalar *= v
                    del gam[form]

        if collapse and not absorb:
            for form, p in _collapse(gam) or ():
                pre[form] += p
            if lower:
                scalar *= _lower(gam, pre)
        if (scalar, _snapshot(gam), _snapshot(pre)) == before:
            break

    gammas = tuple(sorted(((f, p) for f, p in gam.items() if p != 0), key=_factor_key))
    prefs = tuple(sorted(((f, p) for f, p in pre.items() if p != 0), key=_factor_key))
    return GammaProduct(scalar, gammas, prefs)


def _snapshot(d):
    return frozenset((f, p) for f, p in d.items() if p != 0)


def _factor_key(item):
    form, p = item
    return (form.key(), p)


def _term_key(t):
    return (
        tuple(_factor_key(x) for x in t.gammas),
        tuple(_factor_key(x) for x in t.prefactors),
    )


# --------------------------------------------------------------------------
# evaluation


def evaluate(e, assignment):
    """Numeric value at ``assignment`` (symbol name -> complex or array).

    Gamma factors are combined in log space with a single exponential.
    Raises PoleError, DivisionByZero or OverflowError.
    """
    if isinstance(e, ExprSum):
        total = 0j
        for t in e.terms:
            total = total + evaluate(t, assignment)
        return total
    if e.scalar == 0:
        return 0j
    logv = 0j
    for form, p in e.gammas:
        try:
            logv = logv + p * log_gamma(form.value(assignment))
        except PoleError as exc:
            raise PoleError(f"Gamma({form}) is at a pole: {exc}") from None
    factor = complex(e.scalar)
    for form, p in e.prefactors:
        x = form.value(assignment)
        if np.any(np.abs(x) == 0):
            if p < 0:
                raise DivisionByZero(f"prefactor ({form}) vanishes")
        factor = factor * x**p
    re = np.real(logv)
    if np.any(re > 709.0):
        raise OverflowError("gamma product overflows double precision")
    out = factor * np.exp(logv)
    return complex(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# structural rewrites


def substitute(e, s, f=None):
    """Replace symbol ``s`` by linear form ``f`` (or apply a mapping simultaneously)."""
    mapping = s if isinstance(s, dict) else {s: f}
    mapping = {k: lf(v) for k, v in mapping.items()}
    if isinstance(e, ExprSum):
        return normalize(ExprSum(tuple(_subs_product(t, mapping) for t in e.terms)))
    return normalize(_subs_product(e, mapping))


def _subs_product(e, mapping):
    return GammaProduct(
        e.scalar,
        tuple((form.subs(mapping), p) for form, p in e.gammas),
        tuple((form.subs(mapping), p) for form, p in e.prefactors),
    )


def relabel(e, swaps):
    """Swap symbol names pairwise, e.g. ``{"z2": "z3", "u": "v"}``."""
    mapping = {}
    for a, b in swaps.items():
        mapping[a] = LinearForm.symbol(b)
        mapping[b] = LinearForm.symbol(a)
    return substitute(e, mapping)


def reflect_variable(e, v):
    """Rewrite the integrand under ``v -> -v``.

    A vertical contour integral over ``v`` keeps its value when the offset
    is negated: ``dv -> -dv`` and the reversed orientation cancel. The
    offset change is the caller's business (see ``reflect_offset``).
    """
    return substitute(e, v, -LinearForm.symbol(v))


def reflect_offset(offsets, v):
    out = dict(offsets)
    out[v] = -out[v]
    return out


def _take_prefactor(e, target):
    """Split off one power of ``1/target`` from e; return (rest, sign) with
    e = rest * sign / target."""
    for i, (form, p) in enumerate(e.prefactors):
        if p >= 0:
            continue
        if form == target:
            sign = 1
        elif form == -target:
            sign = -1
        else:
            continue
        prefs = list(e.prefactors)
        prefs[i] = (form, p + 1)
        return GammaProduct(e.scalar, e.gammas, tuple(prefs)), sign
    raise PatternMismatch(f"no prefactor 1/({target}) present")


def _split_terms(e, p1, p2):
    e = normalize(e)
    p1, p2 = lf(p1), lf(p2)
    g = p1 + p2 + 1
    rest, s1 = _take_prefactor(e, p1)
    rest, s2 = _take_prefactor(rest, p2)
    gammas = list(rest.gammas)
    for i, (form, p) in enumerate(gammas):
        if form == g and p > 0:
            gammas[i] = (form, p - 1)
            break
    else:
        raise PatternMismatch(f"no Gamma({g}) = Gamma(1 + ({p1}) + ({p2})) factor present")
    gammas.append((g - 1, 1))
    core = GammaProduct(rest.scalar * s1 * s2, tuple(gammas), rest.prefactors)
    return normalize(core * poly(p1, -1)), normalize(core * poly(p2, -1))


def partial_fraction_split(e, p1, p2):
    """Gamma(1+X) / (p1 p2) = Gamma(X) (1/p1 + 1/p2) for X = p1 + p2.

    The term carrying ``1/p1`` comes first in the returned sum's term list
    only by canonical ordering; use the prefactors to tell them apart.
    """
    t1, t2 = _split_terms(e, p1, p2)
    return normalize(ExprSum((t1, t2)))


# --------------------------------------------------------------------------
# probabilistic equality

# sampling boxes (real lo, real hi); imaginary parts in [-0.5, 0.5]
VARIABLE_BOX = (-0.45, -0.05)
EPS_BOX = (0.03, 0.15)
IMAG_BOX = (-0.5, 0.5)


def sample_point(names, rng, fixed=None):
    fixed = fixed or {}
    point = {}
    for n in sorted(names):
        if n in fixed:
            point[n] = complex(fixed[n])
            continue
        lo, hi = EPS_BOX if n.startswith("eps") else VARIABLE_BOX
        point[n] = complex(rng.uniform(lo, hi), rng.uniform(*IMAG_BOX))
    return point


def expr_equal_numeric(a, b, n_samples=50, tol=1e-10, rng=None, fixed=None):
    """Compare two expressions at random non-singular points.

    Returns ``(equal, witness)``; ``witness`` is the first point where the
    relative difference ``|a-b| / max(|a|, |b|, 1)`` reached ``tol`` (None
    when equal). ``fixed`` pins some symbols to given values.
    """
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    names = set(a.symbols) | set(b.symbols)
    accepted = 0
    draws = 0
    while accepted < n_samples:
        if draws >= 100 * n_samples:
            raise RuntimeError("too many singular sample points")
        draws += 1
        point = sample_point(names, rng, fixed)
        try:
            va = evaluate(a, point)
            vb = evaluate(b, point)
        except (PoleError, DivisionByZero, OverflowError):
            continue
        accepted += 1
        scale = max(abs(va), abs(vb), 1.0)
        if not abs(va - vb) / scale < tol:
            return False, point
    return True, None
