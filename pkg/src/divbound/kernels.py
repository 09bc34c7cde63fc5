"""Odlyzko-Poitou kernel functions and signature-dependent Odlyzko constants.

All discriminant quantities are carried as natural logarithms.  The kernel

    f(x) = (3 x^-3 (sin x - x cos x))^2

and its truncation ``h`` (zero for x > 4) weight the small-prime corrections
``C_f`` and ``C_h``.  ``base_term_log`` is the log of

    e^{r1} e^{d(gamma + log 4 pi)} e^{-12 pi / (5 sqrt y)} e^{-I_{r1,d}(y)}

and ``odlyzko_constant`` maximizes it over y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

EULER_GAMMA = 0.57721566490153286060651209
PI = 3.14159265358979323846264338
LOG_4PI = math.log(4 * PI)

# below this, f is evaluated from its Taylor series (sin x - x cos x cancels)
SERIES_SWITCH = 1e-2
# 1 - f is formed from a series below this point inside I(y)
_ONE_MINUS_SWITCH = 0.5

# coefficients of s(x) = 3 x^-3 (sin x - x cos x) = sum_k c_k x^{2k}
_S_COEFFS = [
    3.0 * (-1) ** (k + 1) * 2 * k / math.factorial(2 * k + 1) for k in range(1, 14)
]


class KernelError(ValueError):
    pass


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class SignatureField:
    """Signature (r1, r2) of a number field; ``d`` is derived."""

    r1: int
    r2: int

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0 or self.r1 + 2 * self.r2 < 1:
            raise KernelError(f"invalid signature ({self.r1}, {self.r2})")

    @property
    def d(self) -> int:
        return self.r1 + 2 * self.r2

    @classmethod
    def totally_complex(cls, d: int) -> "SignatureField":
        if d % 2:
            raise KernelError(f"totally complex field needs even degree, got {d}")
        return cls(0, d // 2)

    @classmethod
    def from_degree(cls, r1: int, d: int) -> "SignatureField":
        if (d - r1) % 2 or r1 > d:
            raise KernelError(f"r1={r1} incompatible with degree {d}")
        return cls(r1, (d - r1) // 2)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    upper_cut: float = 60.0
    series_tol: float = 1e-12

    def __post_init__(self):
        if min(self.rel_tol, self.upper_cut, self.series_tol) <= 0:
            raise KernelError("quadrature settings must be positive")

    def refined(self) -> "QuadratureConfig":
        """Twice as strict: used to check precision invariance."""
        return QuadratureConfig(self.rel_tol / 2, self.upper_cut * 1.5, self.series_tol / 2)


DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class OdlyzkoConstant:
    r1: int
    d: int
    value_log: float
    y_opt: float

    @property
    def per_degree_root(self) -> float:
        return math.exp(self.value_log / self.d)


def _s_series(x):
    x2 = x * x
    acc = 0.0
    for c in reversed(_S_COEFFS[:6]):
        acc = acc * x2 + c
    return acc


def _s(x: float) -> float:
    if x < SERIES_SWITCH:
        return _s_series(x)
    return 3.0 * (math.sin(x) - x * math.cos(x)) / x**3


def kernel_f(x: float) -> float:
    if x < 0:
        raise KernelError(f"kernel_f needs x >= 0, got {x}")
    s = _s(x)
    return s * s


def kernel_h(x: float) -> float:
    if x < 0:
        raise KernelError(f"kernel_h needs x >= 0, got {x}")
    return kernel_f(x) if x <= 4 else 0.0


def kernel_f_array(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < SERIES_SWITCH
    xs = x[small]
    out[small] = _s_series(xs) ** 2
    xl = x[~small]
    out[~small] = (3.0 * (np.sin(xl) - xl * np.cos(xl)) / xl**3) ** 2
    return out


def one_minus_f(x: float) -> float:
    """1 - f(x) without cancellation near 0."""
    if x < _ONE_MINUS_SWITCH:
        # 1 - s = -sum_{k>=1} c_k x^{2k}, then 1 - s^2 = (1 - s)(1 + s)
        x2 = x * x
        acc = 0.0
        for c in reversed(_S_COEFFS[1:]):
            acc = acc * x2 + c
        one_minus_s = -acc * x2
        return one_minus_s * (2.0 - one_minus_s)
    return 1.0 - kernel_f(x)


def _check_base(x):
    if x <= 1:
        raise KernelError(f"prime-power argument must exceed 1, got {x}")


def c_h(x: float, y: float) -> float:
    """Finite sum 4 * sum_j log(x)/(1+x^j) h(j sqrt(y) log x)."""
    _check_base(x)
    if y <= 0:
        raise KernelError(f"y must be positive, got {y}")
    lx = math.log(x)
    step = math.sqrt(y) * lx
    total = 0.0
    j = 1
    while j * step <= 4.0:
        total += lx / (1.0 + x**j) * kernel_f(j * step)
        j += 1
    return 4.0 * total


def c_h_array(xs, y: float) -> np.ndarray:
    """Vectorized ``c_h`` over an array of prime powers."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 1):
        raise KernelError("prime-power arguments must exceed 1")
    if y <= 0:
        raise KernelError(f"y must be positive, got {y}")
    lx = np.log(xs)
    step = math.sqrt(y) * lx
    total = np.zeros_like(xs)
    jmax = int(4.0 / step.min()) if len(xs) else 0
    for j in range(1, jmax + 1):
        arg = j * step
        live = arg <= 4.0
        if not live.any():
            break
        # x**j overflows to inf for huge x, which correctly sends the term to 0
        with np.errstate(over="ignore"):
            term = lx[live] / (1.0 + xs[live] ** j) * kernel_f_array(arg[live])
        total[live] += term
    return 4.0 * total


def c_f(x: float, y: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Infinite series with untruncated kernel, stopped by a geometric tail bound."""
    _check_base(x)
    if y <= 0:
        raise KernelError(f"y must be positive, got {y}")
    lx = math.log(x)
    step = math.sqrt(y) * lx
    total = 0.0
    j = 1
    while True:
        total += lx / (1.0 + x**j) * kernel_f(j * step)
        j += 1
        # f <= 1, so the remaining terms sum to at most this
        tail = lx * x ** (-j) / (1.0 - 1.0 / x)
        if 4.0 * tail < cfg.series_tol:
            break
    return 4.0 * total


def _sech_half(x: float) -> float:
    # sech(x/2) without overflow for large x
    e = math.exp(-0.5 * x)
    return 2.0 * e / (1.0 + e * e)


def _csch(x: float) -> float:
    e = math.exp(-x)
    return 2.0 * e / (1.0 - e * e)


def poitou_I(sig: SignatureField, y: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """I_{r1,d}(y) by adaptive Gauss-Kronrod quadrature."""
    if y <= 0:
        raise KernelError(f"y must be positive, got {y}")
    sy = math.sqrt(y)
    d, r1 = sig.d, sig.r1

    def integrand(x):
        if x == 0.0:
            return 0.0
        g = one_minus_f(x * sy)
        val = d * g * _csch(x)
        if r1:
            val += r1 * g * _sech_half(x)
        return val

    # roughly one subinterval per oscillation of f plus headroom
    limit = max(200, int(cfg.upper_cut * sy) * 4 + 50)
    val, err, info = _quad(integrand, 0.0, cfg.upper_cut, cfg.rel_tol, limit)
    if r1:
        # sech(x/2) decays slowly enough that the tail past upper_cut matters
        tail, terr, _ = _quad(lambda x: r1 * one_minus_f(x * sy) * _sech_half(x),
                              cfg.upper_cut, math.inf, cfg.rel_tol, limit)
        val += tail
        err += terr
    return val


def _quad(fn, a, b, rel_tol, limit):
    res = integrate.quad(fn, a, b, epsabs=0.0, epsrel=rel_tol, limit=limit, full_output=1)
    val, err, info = res[0], res[1], res[2]
    ier = res[3] if len(res) > 3 else 0
    if ier not in (0,) and not (abs(err) <= 10 * rel_tol * max(abs(val), 1e-300)):
        msg = res[4] if len(res) > 4 else ""
        raise QuadratureError(
            f"quadrature on [{a}, {b}] did not reach rel_tol={rel_tol}: "
            f"value={val!r} abserr={err!r} evaluations={info.get('neval')} ier={ier} {msg}"
        )
    return val, err, info


def base_term_log(sig: SignatureField, y: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    return (sig.r1 + sig.d * (EULER_GAMMA + LOG_4PI)
            - 12.0 * PI / (5.0 * math.sqrt(y))
            - poitou_I(sig, y, cfg))


Y_MIN, Y_MAX, Y_GRID = 1e-4, 50.0, 200


def odlyzko_constant(sig: SignatureField, cfg: QuadratureConfig = DEFAULT_QUAD) -> OdlyzkoConstant:
    """Maximize ``base_term_log`` over y; returns log C_{r1,d} and the maximizer."""
    return _odlyzko_cached(sig.r1, sig.r2, cfg)


@lru_cache(maxsize=512)
def _odlyzko_cached(r1: int, r2: int, cfg: QuadratureConfig) -> OdlyzkoConstant:
    sig = SignatureField(r1, r2)
    t = np.linspace(math.log(Y_MIN), math.log(Y_MAX), Y_GRID)
    vals = np.array([base_term_log(sig, math.exp(ti), cfg) for ti in t])
    i = int(np.argmax(vals))
    if i == 0 or i == len(t) - 1:
        raise KernelError(
            f"maximizer of the base term for signature ({r1}, {r2}) is at the edge "
            f"of y in [{Y_MIN}, {Y_MAX}]; cannot bracket"
        )
    neg = lambda s: -base_term_log(sig, math.exp(s), cfg)
    res = optimize.minimize_scalar(neg, bracket=(t[i - 1], t[i], t[i + 1]), method="golden",
                                   options={"xtol": 1e-10})
    return OdlyzkoConstant(r1=r1, d=sig.d, value_log=float(-res.fun), y_opt=float(math.exp(res.x)))
