"""Reference values for the test suite, computed with mpmath at 30 digits.

Everything here is transcribed directly from the displayed formulas and is
independent of the package. Run once; the printed numbers are frozen in
tests/oracles.py.
"""

import mpmath as mp

mp.mp.dps = 30
G = mp.gamma


def eq4(u, v, z2, z3, e1, e2):
    e3 = -e1 - e2
    outer = G(-u) * G(-v) * G(1 + u + v + e3) / (G(1 + e1) * G(1 + e2) * G(1 + e3) ** 2)
    inner = (G(-z2) * G(-z3) * G(1 + z2 + z3 + e3) * G(-u + e1 + z2) * G(-v + e2 + z3) * G(1 - z2 - z3 + u + v)
             / ((e1 - z3) * (e2 - z2)))
    return outer * inner


def rhs(u, v, e1, e2):
    e3 = -e1 - e2
    J = G(1 - e1) * G(1 - e2) * G(1 - e3) / (G(1 + e1) * G(1 + e2) * G(1 + e3))
    sq = G(1 + e3 + u + v) ** 2
    t5 = G(-u) * G(-v) * G(-e3 - u) * G(-e3 - v) * sq / (G(1 - e3) * G(1 + e3))
    t6 = G(-u) * G(e2 - v) * G(e1 - u) * G(-e3 - v) * sq / (G(1 - e1) * G(1 + e1))
    t7 = G(e1 - u) * G(-v) * G(-e3 - u) * G(e2 - v) * sq / (G(1 - e2) * G(1 + e2))
    return J * (t6 / (e2 * e3) + t5 / (e1 * e2) + t7 / (e1 * e3)), J


def line(f, c):
    return mp.quad(lambda t: f(mp.mpc(c, t)), [-mp.inf, -5, 0, 5, mp.inf]) / (2 * mp.pi)


def show(name, z):
    z = mp.mpc(z)
    print(f"{name} = complex({mp.nstr(z.real, 20)}, {mp.nstr(z.imag, 20)})")


show("LOG_GAMMA_3_4I", mp.loggamma(mp.mpc(3, 4)))
show("EQ4_AT_POINT", eq4(-0.4, -0.4, -0.2, -0.2, 0.1, 0.07))
show("EQ4_AT_COMPLEX_POINT", eq4(mp.mpc(-0.4, 0.3), mp.mpc(-0.35, -0.2), mp.mpc(-0.2, 1.3), mp.mpc(-0.2, -0.7), 0.1, 0.07))
val, J = rhs(mp.mpc(-0.4, 0.3), mp.mpc(-0.35, -0.2), 0.1, 0.07)
show("RHS_HEADLINE", val)
show("J_AT_HEADLINE", J)

l1, l2, l3, l4 = map(mp.mpf, ("0.3", "0.4", "0.5", "0.6"))
show("BARNES1_CLOSED", G(l1 + l3) * G(l1 + l4) * G(l2 + l3) * G(l2 + l4) / G(l1 + l2 + l3 + l4))
show("BARNES1_LINE", line(lambda z: G(l1 + z) * G(l2 + z) * G(l3 - z) * G(l4 - z), 0.1))
ls = [mp.mpf(x) for x in ("0.2", "0.3", "0.4", "0.5", "0.6")]
s = sum(ls)
show("BARNES2_LINE", line(lambda z: G(ls[0] + z) * G(ls[1] + z) * G(ls[2] + z) * G(ls[3] - z) * G(ls[4] - z)
                          / G(s + z), 0.0))
