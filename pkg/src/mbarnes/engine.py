"""Barnes-lemma rewrite engine.

Pole bookkeeping, contour choice, the two Barnes lemmas as pattern-matched
rewrites, residue extraction, and the full reduction of the two-fold
integral of a product of two triangle MB transforms.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .errors import HigherOrderPole, NotARightPole, PatternMismatch
from .expr import (
    ExprSum,
    Gamma,
    GammaProduct,
    LinearForm,
    lf,
    normalize,
    partial_fraction_split,
    reflect_variable,
    relabel,
    substitute,
    _split_terms,
)
from .gamma import gamma_residue
from .trace import ProofTrace, Residue
from .ud import RegTriple, U, V, Z2, Z3, build_lhs_integrand

# strictness margin for Re(arg) > 0
SLACK_TOL = 1e-12


@dataclass(frozen=True)
class PoleFamily:
    """Poles at ``variable = base + n`` (right) or ``variable = -base - n`` (left)."""

    variable: str
    side: str
    base: LinearForm
    origin: int
    kind: str = "gamma"  # or "prefactor" (a single simple pole)

    @property
    def first(self):
        return self.base if self.side == "right" else -self.base


@dataclass
class ContourSpec:
    offsets: dict
    admissible: bool
    violated: list = field(default_factory=list)

    def describe_violations(self):
        return [f"Re({form}) > 0" for form in self.violated]


def _name(v):
    if isinstance(v, LinearForm):
        if len(v.terms) != 1 or v.const != 0:
            raise ValueError(f"{v} is not a bare symbol")
        return v.terms[0][0]
    return v


# --------------------------------------------------------------------------
# poles and contours


def classify_poles(e, v):
    v = _name(v)
    e = normalize(e, collapse=False)
    out = []
    for i, (form, p) in enumerate(e.gammas):
        c = form.coeff(v)
        if c == 0 or p <= 0:
            continue
        if abs(c) != 1:
            raise PatternMismatch(f"{v} enters Gamma({form}) with coefficient {c}")
        rest = form - LinearForm.symbol(v) * c
        out.append(PoleFamily(v, "right" if c < 0 else "left", rest, i))
    for j, (form, p) in enumerate(e.prefactors):
        c = form.coeff(v)
        if c == 0 or p >= 0:
            continue
        if abs(c) != 1:
            raise PatternMismatch(f"{v} enters ({form}) with coefficient {c}")
        rest = form - LinearForm.symbol(v) * c
        out.append(PoleFamily(v, "right" if c < 0 else "left", rest, j, "prefactor"))
    return out


def _constraints(e, variables):
    """Forms that must have positive real part on an admissible contour."""
    e = normalize(e, collapse=False)
    vs = set(variables)
    rows = [form for form, p in e.gammas if p > 0 and form.symbols & vs]
    # a prefactor 1/L behaves like Gamma(L)/Gamma(1+L) in its canonical orientation
    rows += [form for form, p in e.prefactors if p < 0 and form.symbols & vs]
    return rows


def _real_parts(form, params):
    base = float(form.const)
    for n, c in form.terms:
        if n in params:
            base += float(c) * complex(params[n]).real
    return base


def check_contour(e, offsets, params):
    """Admissibility of given offsets; parameters contribute their real parts."""
    point = dict(params)
    point.update(offsets)
    violated = [form for form in _constraints(e, offsets) if _real_parts(form, point) <= SLACK_TOL]
    return ContourSpec(dict(offsets), not violated, violated)


def _lp_rows(rows, variables, params):
    A = np.array([[float(r.coeff(v)) for v in variables] for r in rows])
    b = np.array([_real_parts(r, params) for r in rows])
    return A, b


def choose_contour(e, params, variables=None):
    """Straight-line offsets separating left from right poles.

    Each integration variable (symbols of ``e`` not fixed by ``params``, in
    canonical order) is put at the midpoint of its feasible interval given
    the variables already placed. Infeasibility is reported, not raised.
    """
    if variables is None:
        variables = sorted(set(e.symbols) - set(params))
    variables = [_name(v) for v in variables]
    rows = _constraints(e, variables)
    if not rows:
        return ContourSpec({v: 0.0 for v in variables}, True, [])
    A, b = _lp_rows(rows, variables, params)

    offsets = {}
    fixed = np.zeros(len(variables))
    for k, v in enumerate(variables):
        free = list(range(k, len(variables)))
        Af = A[:, free]
        bf = b + A[:, :k] @ fixed[:k]
        lo = _extreme(Af, bf, +1)
        hi = _extreme(Af, bf, -1)
        if lo is None or (np.isfinite(lo) and np.isfinite(hi) and hi - lo <= 1e-9):
            return _infeasible(rows, variables, params, A, b)
        if np.isfinite(lo) and np.isfinite(hi):
            c = 0.5 * (lo + hi)
        elif np.isfinite(lo):
            c = lo + 0.5
        elif np.isfinite(hi):
            c = hi - 0.5
        else:
            c = 0.0
        fixed[k] = c
        offsets[v] = float(c)
    return check_contour(e, offsets, params)


def _extreme(A, b, sense):
    """min (sense=+1) or max (sense=-1) of the first free variable over A x + b >= 0."""
    n = A.shape[1]
    cost = np.zeros(n)
    cost[0] = sense
    res = linprog(cost, A_ub=-A, b_ub=b, bounds=[(None, None)] * n, method="highs")
    if res.status == 2:
        return None
    if res.status == 3:
        return -np.inf if sense > 0 else np.inf
    return float(res.x[0])


def _infeasible(rows, variables, params, A, b):
    # maximize the smallest slack to report the tightest violated set
    n = len(variables)
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-A, np.ones((len(rows), 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * n + [(None, 1.0)], method="highs")
    x = res.x[:n] if res.x is not None else np.zeros(n)
    offsets = {v: float(c) for v, c in zip(variables, x)}
    point = dict(params)
    point.update(offsets)
    violated = [r for r in rows if _real_parts(r, point) <= SLACK_TOL]
    return ContourSpec(offsets, False, violated)


# --------------------------------------------------------------------------
# Barnes lemmas


def _lemma_split(e, v):
    """Separate the v-free content from the v-dependent gamma factors."""
    e = normalize(e, collapse=False)
    if any(form.coeff(v) != 0 for form, _ in e.prefactors):
        raise PatternMismatch(f"rational prefactor depends on {v}")
    sym = LinearForm.symbol(v)
    plus, minus, denom, rest = [], [], [], []
    for form, p in e.gammas:
        c = form.coeff(v)
        if c == 0:
            rest.append((form, p))
        elif c == 1 and p > 0:
            plus += [form - sym] * p
        elif c == -1 and p > 0:
            minus += [form + sym] * p
        elif c == 1 and p < 0:
            denom += [form - sym] * -p
        else:
            raise PatternMismatch(f"Gamma({form})^{p} does not fit a Barnes lemma in {v}")
    content = GammaProduct(e.scalar, tuple(rest), e.prefactors)
    return content, plus, minus, denom


def apply_barnes_first(e, v):
    """Integrate Gamma(l1+v) Gamma(l2+v) Gamma(l3-v) Gamma(l4-v) over v."""
    v = _name(v)
    content, plus, minus, denom = _lemma_split(e, v)
    if len(plus) != 2 or len(minus) != 2 or denom:
        raise PatternMismatch(
            f"first lemma needs 2 + 2 gamma factors in {v}, got {len(plus)} + {len(minus)} / {len(denom)}"
        )
    l1, l2 = plus
    l3, l4 = minus
    closed = Gamma(l1 + l3) * Gamma(l1 + l4) * Gamma(l2 + l3) * Gamma(l2 + l4) * Gamma(l1 + l2 + l3 + l4, -1)
    return normalize(content * closed)


def apply_barnes_second(e, v):
    """Integrate Gamma(l1+v)Gamma(l2+v)Gamma(l3+v)Gamma(l4-v)Gamma(l5-v)/Gamma(l1+...+l5+v)."""
    v = _name(v)
    content, plus, minus, denom = _lemma_split(e, v)
    if len(plus) != 3 or len(minus) != 2 or len(denom) != 1:
        raise PatternMismatch(
            f"second lemma needs 3 + 2 gamma factors over 1 in {v}, got {len(plus)} + {len(minus)} / {len(denom)}"
        )
    l1, l2, l3 = plus
    l4, l5 = minus
    total = l1 + l2 + l3 + l4 + l5
    if denom[0] != total:
        raise PatternMismatch(f"denominator Gamma({denom[0]} + {v}) breaks the sum rule ({total})")
    closed = (
        Gamma(l1 + l4) * Gamma(l2 + l4) * Gamma(l3 + l4) * Gamma(l1 + l5) * Gamma(l2 + l5) * Gamma(l3 + l5)
        * Gamma(l1 + l2 + l4 + l5, -1) * Gamma(l1 + l3 + l4 + l5, -1) * Gamma(l2 + l3 + l4 + l5, -1)
    )
    return normalize(content * closed)


def absorb_prefactors(e, v):
    """Rewrite every prefactor 1/L depending on v as Gamma(L)/Gamma(1+L), L increasing in v."""
    v = _name(v)
    e = normalize(e, collapse=False)
    keep = tuple((f, p) for f, p in e.prefactors if f.coeff(v) == 0)
    move = GammaProduct(Fraction(1), (), tuple((f, p) for f, p in e.prefactors if f.coeff(v) != 0))
    absorbed = normalize(move, absorb=True, orient=v)
    out = GammaProduct(e.scalar * absorbed.scalar, e.gammas + absorbed.gammas, keep)
    return normalize(out, collapse=False)


# --------------------------------------------------------------------------
# residues


def take_right_residue(e, v, pole):
    """Contribution of a right pole when the v-contour collapses onto it.

    With 1/(2 pi i) per fold and the contour closed to the right this is
    minus the residue; at the first pole of Gamma(a - v) it is the rest of
    the integrand at v = a.
    """
    v = _name(v)
    pole = lf(pole)
    e = normalize(e, collapse=False)
    at = {v: pole}
    hits = []
    for i, (form, p) in enumerate(e.gammas):
        c = form.coeff(v)
        if c == 0:
            continue
        arg = form.subs(at)
        if p > 0 and arg.is_constant() and arg.const.denominator == 1 and arg.const <= 0:
            hits.append(("gamma", i, c, p, -arg.const.numerator))
    for j, (form, p) in enumerate(e.prefactors):
        c = form.coeff(v)
        if c == 0:
            continue
        arg = form.subs(at)
        if p < 0 and arg.is_constant() and arg.const == 0:
            hits.append(("prefactor", j, c, p, 0))
    if not hits:
        raise NotARightPole(f"the integrand is regular at {v} = {pole}")
    if len(hits) > 1 or abs(hits[0][3]) > 1:
        raise HigherOrderPole(f"pole at {v} = {pole} is not simple")
    kind, idx, c, p, n = hits[0]
    if c > 0:
        raise NotARightPole(f"{v} = {pole} is a left pole")
    if kind == "gamma":
        if c != -1:
            raise PatternMismatch(f"{v} has coefficient {c} in a gamma argument")
        weight = gamma_residue(n)
        gammas = e.gammas[:idx] + e.gammas[idx + 1 :]
        prefs = e.prefactors
    else:
        weight = Fraction(1) / -c
        gammas = e.gammas
        prefs = e.prefactors[:idx] + e.prefactors[idx + 1 :]
    rest = GammaProduct(e.scalar * weight, gammas, prefs)
    return substitute(rest, v, pole)


# --------------------------------------------------------------------------
# the full reduction


def _barnes_branch(term, inner, outer, trace):
    """Inner first lemma, reflection of the outer variable, outer second lemma."""
    step = trace.add("barnes-first", term, apply_barnes_first(term, inner), variable=inner)
    reflected = trace.add("reflect", step, reflect_variable(step, outer), variable=outer)
    absorbed = trace.add("absorb", reflected, absorb_prefactors(reflected, outer), variable=outer)
    return trace.add("barnes-second", absorbed, apply_barnes_second(absorbed, outer), variable=outer)


def _swap_text(swaps):
    return ",".join(f"{a}:{b}" for a, b in sorted(swaps.items()))


def _parse_swaps(text):
    return dict(pair.split(":") for pair in text.split(","))


def reduce_identity_lhs(reg=None):
    """Reduce the two-fold integral of the D x D integrand to three D terms.

    Returns ``(ExprSum, ProofTrace)``. Steps: the double right residue at
    z2 = eps2, z3 = eps1; the partial-fraction split of
    Gamma(1 + z2 + z3 + eps3) / ((z3 - eps1)(z2 - eps2)); on the 1/(z2 - eps2)
    term the first lemma in z3, reflection of z2 and the second lemma in z2;
    the 1/(z3 - eps1) term by the relabeling z2<->z3, u<->v, eps1<->eps2.
    """
    reg = reg or RegTriple()
    z2, z3 = _name(Z2), _name(Z3)
    e1n, e2n = reg.names
    trace = ProofTrace()
    integrand = build_lhs_integrand(reg)

    first = take_right_residue(integrand, z2, reg.eps2)
    trace.add("residue", integrand, first, [Residue(z2, reg.eps2, first)], variable=z2, pole=reg.eps2)
    residue_term = take_right_residue(first, z3, reg.eps1)
    trace.add("residue", first, residue_term, [Residue(z3, reg.eps1, residue_term)], variable=z3, pole=reg.eps1)

    p1, p2 = Z3 - reg.eps1, Z2 - reg.eps2
    with_p1, with_p2 = _split_terms(integrand, p1, p2)
    trace.add("split", integrand, partial_fraction_split(integrand, p1, p2), p1=p1, p2=p2)

    term_u = _barnes_branch(with_p2, z3, z2, trace)

    swaps = {z2: z3, _name(U): _name(V), e1n: e2n}
    swapped = trace.add("relabel", with_p1, relabel(with_p1, swaps), swaps=_swap_text(swaps))
    mirrored = _barnes_branch(swapped, z3, z2, trace)
    term_v = trace.add("relabel", mirrored, relabel(mirrored, swaps), swaps=_swap_text(swaps))

    collected = ExprSum((term_v, residue_term, term_u))
    result = trace.add("assemble", collected, normalize(collected))
    return result, trace


RULES = {
    "residue": lambda e, variable, pole: take_right_residue(e, variable, lf(pole)),
    "split": lambda e, p1, p2: partial_fraction_split(e, lf(p1), lf(p2)),
    "barnes-first": lambda e, variable: apply_barnes_first(e, variable),
    "barnes-second": lambda e, variable: apply_barnes_second(e, variable),
    "reflect": lambda e, variable: reflect_variable(e, variable),
    "absorb": lambda e, variable: absorb_prefactors(e, variable),
    "relabel": lambda e, swaps: relabel(e, _parse_swaps(swaps)),
    "assemble": lambda e: normalize(e),
}
