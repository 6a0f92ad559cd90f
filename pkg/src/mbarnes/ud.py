"""Builders for MB transforms of one-loop triangles and the ladder recurrence.

``D(mb1, mb2)[nu1, nu2, nu3]`` is the two-fold MB transform of the one-loop
triangle with indices ``nu`` in ``dim`` dimensions. Everything here is built
over the regularization symbols ``eps1``, ``eps2``; the third one is always
``-eps1 - eps2``.
"""

from dataclasses import dataclass, field

from .expr import ExprSum, Gamma, LinearForm, lf, normalize, poly, substitute

U, V = LinearForm.symbol("u"), LinearForm.symbol("v")
Z2, Z3 = LinearForm.symbol("z2"), LinearForm.symbol("z3")


def _pure_symbol(form):
    return form.const == 0 and len(form.terms) == 1 and form.terms[0][1] == 1


@dataclass(frozen=True)
class RegTriple:
    """Analytic-regularization parameters; ``eps3`` is derived, never stored."""

    eps1: LinearForm = field(default_factory=lambda: LinearForm.symbol("eps1"))
    eps2: LinearForm = field(default_factory=lambda: LinearForm.symbol("eps2"))

    def __post_init__(self):
        for name in ("eps1", "eps2"):
            form = lf(getattr(self, name))
            if not _pure_symbol(form):
                raise ValueError(f"{name} must be a bare symbol, got {form}")
            object.__setattr__(self, name, form)
        if self.eps1 == self.eps2:
            raise ValueError("eps1 and eps2 must be distinct symbols")

    @property
    def eps3(self):
        return -(self.eps1 + self.eps2)

    @property
    def names(self):
        return self.eps1.terms[0][0], self.eps2.terms[0][0]


@dataclass(frozen=True)
class DParams:
    mb1: LinearForm
    mb2: LinearForm
    nu1: LinearForm
    nu2: LinearForm
    nu3: LinearForm
    dim: LinearForm = LinearForm.constant(4)

    def __post_init__(self):
        for name in ("mb1", "mb2", "nu1", "nu2", "nu3", "dim"):
            object.__setattr__(self, name, lf(getattr(self, name)))


def build_D(p, normalized=True):
    """MB transform of the one-loop triangle as a gamma product."""
    half = p.dim * "1/2"
    total = p.nu1 + p.nu2 + p.nu3
    num = (
        Gamma(-p.mb1)
        * Gamma(-p.mb2)
        * Gamma(-p.mb1 - p.nu2 - p.nu3 + half)
        * Gamma(-p.mb2 - p.nu1 - p.nu3 + half)
        * Gamma(p.mb1 + p.mb2 + p.nu3)
        * Gamma(total - half + p.mb1 + p.mb2)
    )
    den = Gamma(p.nu1) * Gamma(p.nu2) * Gamma(p.nu3) * Gamma(p.dim - total)
    out = num / den
    return normalize(out) if normalized else out


def build_D_short(u, v, nu):
    """``D(u, v)[1 + nu]``, shorthand for indices ``(1, 1, 1 + nu)`` at d = 4."""
    return build_D(DParams(lf(u), lf(v), 1, 1, 1 + lf(nu)))


def build_J(reg=None):
    reg = reg or RegTriple()
    e1, e2, e3 = reg.eps1, reg.eps2, reg.eps3
    out = Gamma(1 - e1) * Gamma(1 - e2) * Gamma(1 - e3) / (Gamma(1 + e1) * Gamma(1 + e2) * Gamma(1 + e3))
    return normalize(out)


def lhs_factors(reg=None):
    """The two D-functions whose product is integrated over z2, z3."""
    reg = reg or RegTriple()
    e1, e2, e3 = reg.eps1, reg.eps2, reg.eps3
    outer = DParams(U, V, 1 + e1 - Z3, 1 + e2 - Z2, 1 + e3)
    inner = DParams(Z2, Z3, 1 + e2, 1 + e1, 1 + e3)
    return outer, inner


def build_lhs_integrand(reg=None):
    outer, inner = lhs_factors(reg)
    return normalize(build_D(outer) * build_D(inner))


def rhs_terms(reg=None):
    """The three right-hand-side terms, unsummed: (v-shifted, unshifted, u-shifted)."""
    reg = reg or RegTriple()
    e1, e2, e3 = reg.eps1, reg.eps2, reg.eps3
    J = build_J(reg)
    v_name = V.terms[0][0]
    u_name = U.terms[0][0]
    shifted_v = substitute(build_D_short(U, V, -e1), v_name, V - e2)
    plain = build_D_short(U, V, e3)
    shifted_u = substitute(build_D_short(U, V, -e2), u_name, U - e1)
    return (
        normalize(J * shifted_v * poly(e2, -1) * poly(e3, -1)),
        normalize(J * plain * poly(e1, -1) * poly(e2, -1)),
        normalize(J * shifted_u * poly(e1, -1) * poly(e3, -1)),
    )


def build_rhs_terms(reg=None):
    return normalize(ExprSum(rhs_terms(reg)))
