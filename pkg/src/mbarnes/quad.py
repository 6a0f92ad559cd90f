"""Numerical MB integrals along straight vertical contours.

Each fold carries 1/(2 pi i) and dz = i dt, so the integral over t is
weighted by 1/(2 pi). Panels use the 7/15-point Gauss-Kronrod pair; the
window [-T, T] (shifted to cover every kink) grows until the Stirling tail
estimate falls below a tenth of the requested tolerance.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import BudgetExceeded, DivergentTailError, NotAdmissible
from .expr import ExprSum, GammaProduct, LinearForm, evaluate, normalize
from .gamma import decay_rate, log_gamma

# 15-point Kronrod abscissae (non-negative half) and weights; every other
# node carries the 7-point Gauss rule.
XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-XGK[:-1], XGK[::-1]])
KRONROD = np.concatenate([WGK[:-1], WGK[::-1]])
GAUSS = np.zeros(15)
GAUSS[1::2] = np.concatenate([WG[:-1], WG[::-1]])

MAX_PANEL = 2.0
MAX_T = 400.0
GROWTH = 1.5
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-10
    max_evaluations: int = 200_000
    initial_T: float = 20.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.max_evaluations > 0:
            raise ValueError("max_evaluations must be positive")

    @classmethod
    def one_fold(cls, **kw):
        return cls(**kw)

    @classmethod
    def two_fold(cls, **kw):
        kw.setdefault("rel_tol", 1e-6)
        kw.setdefault("max_evaluations", 40_000_000)
        return cls(**kw)


@dataclass(frozen=True)
class QuadResult:
    value: complex
    abs_error_estimate: float
    truncation_T: float
    evaluations: int


class _Counter:
    def __init__(self, limit):
        self.limit = limit
        self.n = 0

    def spend(self, k):
        self.n += k
        if self.n > self.limit:
            raise _OutOfBudget


class _OutOfBudget(Exception):
    """Raised mid-integration; each enclosing level overwrites ``partial`` with its own sum."""

    partial = complex("nan")


# --------------------------------------------------------------------------
# compiled integrands


class _Compiled:
    """Integrand on the contour as a function of the imaginary parts t.

    Every factor argument is ``base + i * (slope @ t)``; the factors free of
    integration variables are folded into one constant.
    """

    def __init__(self, e, variables, offsets, assignment):
        e = normalize(e, collapse=False)
        terms = e.terms if isinstance(e, ExprSum) else (e,)
        self.variables = list(variables)
        point = {k: complex(v) for k, v in assignment.items()}
        point.update({v: complex(offsets[v]) for v in variables})
        missing = set(e.symbols) - set(point)
        if missing:
            raise ValueError(f"unbound symbols {sorted(missing)}")
        self.terms = [self._compile(t, point) for t in terms]

    def _compile(self, t, point):
        vs = set(self.variables)

        def rows(factors):
            base, slope, power = [], [], []
            for form, p in factors:
                base.append(complex(form.value(point)))
                slope.append([float(form.coeff(v)) for v in self.variables])
                power.append(p)
            return (np.array(base, complex), np.array(slope, float).reshape(-1, len(self.variables)),
                    np.array(power, float))

        fixed = GammaProduct(
            t.scalar,
            tuple(g for g in t.gammas if not g[0].symbols & vs),
            tuple(f for f in t.prefactors if not f[0].symbols & vs),
        )
        const = complex(evaluate(fixed, point))
        gam = rows([g for g in t.gammas if g[0].symbols & vs])
        pre = rows([f for f in t.prefactors if f[0].symbols & vs])
        return const, gam, pre

    def __call__(self, T):
        """T has shape (n_variables, N); returns N integrand values."""
        out = np.zeros(T.shape[1], complex)
        for const, (gb, gs, gp), (pb, ps, pp) in self.terms:
            if const == 0:
                continue
            logs = np.zeros(T.shape[1], complex)
            if len(gb):
                args = gb[:, None] + 1j * (gs @ T)
                logs = gp @ log_gamma(args)
            val = const * np.exp(logs)
            if len(pb):
                args = pb[:, None] + 1j * (ps @ T)
                val = val * np.prod(args ** pp[:, None], axis=0)
            out += val
        return out

    def factor_rows(self):
        for const, gam, pre in self.terms:
            if const != 0:
                yield gam, pre

    def kinks(self, k, fixed_t=None):
        """t positions where a factor argument in variable k crosses the real axis."""
        out = [0.0]
        for gam, pre in self.factor_rows():
            for base, slope, _ in (gam, pre):
                for b, s in zip(base, slope):
                    if s[k] == 0:
                        continue
                    im = b.imag
                    if fixed_t is not None:
                        im += sum(s[j] * fixed_t[j] for j in range(len(s)) if j != k)
                    elif np.count_nonzero(s) > 1:
                        continue
                    out.append(-im / s[k])
        return out

    def decay(self, k):
        """(exponential rate, power of |t|) of the integrand along variable k; slowest term wins."""
        rates, powers = [], []
        for (gb, gs, gp), (pb, ps, pp) in self.factor_rows():
            num = sum(p * abs(s[k]) for s, p in zip(gs, gp) if p > 0)
            den = sum(-p * abs(s[k]) for s, p in zip(gs, gp) if p < 0)
            rates.append(decay_rate(num, den))
            powers.append(sum(p * (b.real - 0.5) for b, s, p in zip(gb, gs, gp) if s[k] != 0)
                          + sum(p for s, p in zip(ps, pp) if s[k] != 0))
        if not rates:
            raise DivergentTailError("integrand is identically zero")
        return min(rates), max(powers)


# --------------------------------------------------------------------------
# adaptive panel integration


class _Panels:
    def __init__(self, f, counter):
        self.f = f
        self.counter = counter
        self.a = np.zeros(0)
        self.b = np.zeros(0)
        self.val = np.zeros(0, complex)
        self.err = np.zeros(0)
        self.resabs = np.zeros(0)

    def add(self, a, b):
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        if a.size == 0:
            return
        self.counter.spend(15 * a.size)
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        t = mid[:, None] + half[:, None] * NODES[None, :]
        vals, errs = self.f(t.ravel())
        vals = vals.reshape(t.shape)
        k = half * (vals @ KRONROD)
        g = half * (vals @ GAUSS)
        err = np.abs(k - g)
        if errs is not None:
            err = err + half * (errs.reshape(t.shape) @ KRONROD)
        self.a = np.concatenate([self.a, a])
        self.b = np.concatenate([self.b, b])
        self.val = np.concatenate([self.val, k])
        self.err = np.concatenate([self.err, err])
        self.resabs = np.concatenate([self.resabs, half * (np.abs(vals) @ KRONROD)])

    def refine(self, rel_tol):
        while True:
            total = self.val.sum()
            target = max(rel_tol * abs(total), 50 * _EPS * self.resabs.sum())
            if self.err.sum() <= target:
                return
            pick = self.err > target / len(self.err)
            if not pick.any():
                pick = self.err == self.err.max()
            a, b = self.a[pick], self.b[pick]
            m = 0.5 * (a + b)
            if np.any(b - a < 1e-12 * np.maximum(1.0, np.abs(m))):
                raise _OutOfBudget
            n_old = len(self.a)
            # children first, so an exhausted budget leaves the parents in place
            self.add(np.concatenate([a, m]), np.concatenate([m, b]))
            keep = np.concatenate([~pick, np.ones(len(self.a) - n_old, bool)])
            for name in ("a", "b", "val", "err", "resabs"):
                setattr(self, name, getattr(self, name)[keep])

    @property
    def value(self):
        return complex(self.val.sum())

    @property
    def error(self):
        return float(self.err.sum())


def _grid(lo, hi, breaks):
    """Panel edges between lo and hi: breakpoints, then pieces of width <= MAX_PANEL."""
    pts = sorted({lo, hi, *(x for x in breaks if lo < x < hi)})
    a, b = [], []
    for x, y in zip(pts[:-1], pts[1:]):
        n = max(1, math.ceil((y - x) / MAX_PANEL))
        edges = np.linspace(x, y, n + 1)
        a += list(edges[:-1])
        b += list(edges[1:])
    return a, b


def _integrate_line(f, kinks, rate, power, rel_tol, initial_T, counter):
    """(1/2pi) * integral of f over the real line; f(t) -> (values, errors or None)."""
    if rate <= 0:
        raise DivergentTailError("integrand does not decay along the contour")
    panels = _Panels(f, counter)
    try:
        return _grow(panels, f, kinks, rate, power, rel_tol, initial_T, counter)
    except _OutOfBudget as exc:
        exc.partial = panels.value / (2 * math.pi) if len(panels.val) else complex("nan")
        raise


def _grow(panels, f, kinks, rate, power, rel_tol, T, counter):
    lo_k, hi_k = min(kinks), max(kinks)
    lo, hi = lo_k - T, hi_k + T
    panels.add(*_grid(lo, hi, kinks))
    panels.refine(rel_tol)
    while True:
        ends, _ = f(np.array([lo, hi]))
        counter.spend(2)
        tail = _tail(np.abs(ends).max(), rate, power, T)
        value = panels.value
        if tail < rel_tol / 10 * abs(value) or tail == 0:
            break
        if T >= MAX_T:
            raise DivergentTailError(f"tail {tail:.3g} still above tolerance at T = {T:g}")
        new_T = min(T * GROWTH, MAX_T)
        a1, b1 = _grid(lo_k - new_T, lo, ())
        a2, b2 = _grid(hi, hi_k + new_T, ())
        panels.add(a1 + a2, b1 + b2)
        panels.refine(rel_tol)
        T = new_T
        lo, hi = lo_k - T, hi_k + T
    scale = 1 / (2 * math.pi)
    return panels.value * scale, (panels.error + tail) * scale, T


def _tail(f_end, rate, power, T):
    # integral of |f(T)| (t/T)^p exp(-rate (t - T)) over t > T, both sides
    slack = rate - max(power, 0.0) / T
    if slack <= 0:
        return math.inf
    return 2 * f_end / slack


# --------------------------------------------------------------------------
# public entry points


def _offsets(spec, variables):
    from .engine import ContourSpec

    if isinstance(spec, ContourSpec):
        return spec.offsets
    if isinstance(spec, dict):
        return spec
    return {variables[0]: float(spec)}


def _admissible(e, offsets, assignment, require):
    from .engine import check_contour

    if not require:
        return
    terms = e.terms if isinstance(e, ExprSum) else (e,)
    for t in terms:
        spec = check_contour(t, offsets, assignment)
        if not spec.admissible:
            raise NotAdmissible(
                "contour does not separate the poles: " + ", ".join(spec.describe_violations()),
                spec.violated,
            )


def _name(v):
    return v.terms[0][0] if isinstance(v, LinearForm) else v


def integrate_one(e, v, spec, assignment, cfg=None, require_admissible=True):
    """(1/2 pi i) times the integral of e over Re(v) = offset."""
    cfg = cfg or QuadConfig.one_fold()
    v = _name(v)
    offsets = {v: float(_offsets(spec, [v])[v])}
    _admissible(e, offsets, assignment, require_admissible)
    comp = _Compiled(e, [v], offsets, assignment)
    rate, power = comp.decay(0)
    counter = _Counter(cfg.max_evaluations)

    def f(t):
        return comp(t[None, :]), None

    try:
        value, err, T = _integrate_line(f, comp.kinks(0), rate, power, cfg.rel_tol, cfg.initial_T, counter)
    except _OutOfBudget as exc:
        raise _budget(cfg, exc, counter) from None
    return QuadResult(complex(value), float(err), float(T), counter.n)


# conservative decay of the inner integral along the outer variable
OUTER_RATE = math.pi / 2


def integrate_two(e, v1, v2, spec, assignment, cfg=None, require_admissible=True):
    """Iterated two-fold integral; the inner variable is the first in canonical order."""
    cfg = cfg or QuadConfig.two_fold()
    inner, outer = sorted([_name(v1), _name(v2)])
    given = _offsets(spec, [inner, outer])
    offsets = {inner: float(given[inner]), outer: float(given[outer])}
    _admissible(e, offsets, assignment, require_admissible)
    comp = _Compiled(e, [inner, outer], offsets, assignment)
    rate, power = comp.decay(0)
    counter = _Counter(cfg.max_evaluations)

    def inner_value(t_out):
        def f(t):
            T = np.vstack([t, np.full_like(t, t_out)])
            return comp(T), None

        kinks = comp.kinks(0, {1: t_out})
        val, err, _ = _integrate_line(f, kinks, rate, power, cfg.rel_tol, cfg.initial_T, counter)
        return val * 2 * math.pi, err * 2 * math.pi

    def g(ts):
        out = np.array([inner_value(t) for t in ts])
        return out[:, 0], out[:, 1].real

    try:
        value, err, T = _integrate_line(
            g, comp.kinks(1), OUTER_RATE, 0.0, 10 * cfg.rel_tol, cfg.initial_T, counter
        )
    except _OutOfBudget as exc:
        exc.partial /= 2 * math.pi
        raise _budget(cfg, exc, counter) from None
    return QuadResult(complex(value) / (2 * math.pi), float(err) / (2 * math.pi), float(T), counter.n)


def _budget(cfg, exc, counter):
    best = QuadResult(complex(exc.partial), math.inf, math.nan, counter.n)
    return BudgetExceeded(f"more than {cfg.max_evaluations} integrand evaluations", best)


def tail_bound(e, v, offset, T, assignment=None):
    """Estimate of (1/2pi) times the integral of |e| over |t| > T on Re(v) = offset.

    Heuristic-rigorous: the Stirling envelope |t|^p exp(-r|t|) is pinned to
    the integrand at t = +-T, so the constant comes from one evaluation.
    """
    v = _name(v)
    assignment = assignment or {}
    comp = _Compiled(e, [v], {v: offset}, assignment)
    rate, power = comp.decay(0)
    if rate <= 0:
        raise DivergentTailError("net gamma decay is not positive")
    ends = np.abs(comp(np.array([[-T, T]], float)))
    return _tail(ends.max(), rate, power, T) / (2 * math.pi)
