"""Complex gamma and log-gamma kernels.

Everything works on Python scalars and on numpy arrays alike; scalar input
gives a Python ``complex`` back.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, pi

import numpy as np

from .errors import DivergentTailError, PoleError

# Lanczos approximation, g = 7 (9 coefficients).
LANCZOS_G = 7.0
LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

POLE_TOL = 1e-12
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)
# exp() overflows past this real part
_MAX_LOG = np.log(np.finfo(float).max)


@dataclass(frozen=True)
class GammaPole:
    """Pole of Gamma at ``-location`` together with its residue."""

    location: int

    @property
    def residue(self):
        return gamma_residue(self.location)


def _lanczos(z):
    # valid for Re z >= 0.5
    w = z - 1.0
    acc = np.full_like(w, LANCZOS_COEF[0])
    for k in range(1, len(LANCZOS_COEF)):
        acc = acc + LANCZOS_COEF[k] / (w + k)
    t = w + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(acc)


def _log_sin_pi(z):
    """log(sin(pi z)) modulo 2*pi*i."""
    m = np.round(z.real)
    r = z.real - m
    y = z.imag
    out = np.empty_like(z)
    small = np.abs(y) <= 50.0
    zs = r[small] + 1j * y[small]
    out[small] = np.log(np.sin(np.pi * zs))
    big = ~small
    if big.any():
        # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}) for Im z > 0, conjugate otherwise
        sgn = np.sign(y[big])
        zb = r[big] + 1j * np.abs(y[big])
        val = -1j * np.pi * zb + np.log1p(-np.exp(2j * np.pi * zb)) + np.log(0.5) + 0.5j * np.pi
        out[big] = np.where(sgn > 0, val, np.conj(val))
    return out + 1j * np.pi * np.mod(m, 2.0)


def _check_poles(z):
    near = np.round(z.real)
    bad = (near <= 0) & (np.abs(z - near) < POLE_TOL)
    if np.any(bad):
        where = np.asarray(z)[bad].ravel()[0]
        raise PoleError(f"Gamma has a pole at {where!r}")


def log_gamma(z):
    """Principal branch of log Gamma(z).

    Lanczos approximation for Re z >= 1/2, reflection formula below that.
    The imaginary part follows the branch defined by
    ``log_gamma(z) = log_gamma(z + 1) - log(z)`` with the principal log, i.e.
    the same branch as ``scipy.special.loggamma``.

    Raises PoleError within 1e-12 of a nonpositive integer.
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    _check_poles(arr)

    out = np.empty_like(arr)
    right = arr.real >= 0.5
    if right.any():
        out[right] = _lanczos(arr[right])
    left = ~right
    if left.any():
        zl = arr[left]
        val = _LOG_PI - _log_sin_pi(zl) - _lanczos(1.0 - zl)
        # pin the branch of the imaginary part with the recurrence
        n = np.ceil(0.5 - zl.real).astype(int)
        est = _lanczos(zl + n).imag
        for k in range(int(n.max())):
            active = k < n
            est = est - np.where(active, np.angle(zl + k), 0.0)
        turns = np.round((est - val.imag) / (2.0 * np.pi))
        out[left] = val + 2j * np.pi * turns

    if not np.all(np.isfinite(out)):
        raise OverflowError("log_gamma result is not representable")
    return complex(out[0]) if scalar else out


def gamma(z):
    """Gamma(z) = exp(log_gamma(z))."""
    lg = log_gamma(z)
    if np.any(np.real(lg) > _MAX_LOG):
        raise OverflowError("gamma overflows double precision")
    return np.exp(lg) if not isinstance(lg, complex) else complex(np.exp(lg))


def gamma_residue(n):
    """Residue of Gamma at -n, exactly: (-1)^n / n!."""
    if n < 0:
        raise ValueError("pole index must be nonnegative")
    return Fraction((-1) ** n, factorial(n))


def decay_rate(numerator, denominator=0):
    """Exponential decay coefficient in |t| of a gamma ratio on a vertical line.

    Each Gamma(x + i t) behaves like exp(-pi |t| / 2), so the rate is
    pi/2 times the net factor count.
    """
    net = numerator - denominator
    if net <= 0:
        raise DivergentTailError(f"net gamma count {net} gives no exponential decay")
    return 0.5 * pi * net
