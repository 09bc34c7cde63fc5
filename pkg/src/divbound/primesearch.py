"""Minimize the three small-prime objectives over pairs of prime powers.

For case ``k`` the objective (in log form) is

    a_k(n) log p1 + b_k(n) log p2 + C_h(p1, y0) + C_h(p2, y0)

with exponents

    Unramified       a = b = 1 - 1/n
    OneRealPlace     a = 1 - 1/n,  b = 1/4 - 1/(2n)
    ManyRealPlaces   a = b = 1/4 - 1/(2n)

The objective separates into ``u1(p1) + u2(p2)``, so the pair minimum is the
pair of one-dimensional minima.  Each one-dimensional search runs over a
finite region certified by ``C_h >= 0``: a minimizer of ``u`` must satisfy
``e log p <= u(seed)`` for any seed.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .kernels import c_h, c_h_array

Y0_VALUES = (0.1, 2.0)
# relative slack when deciding ties between floating objective values
TIE_RTOL = 1e-12


class SearchError(ValueError):
    pass


class CaseKind(enum.Enum):
    UNRAMIFIED = 1
    ONE_REAL_PLACE = 2
    MANY_REAL_PLACES = 3

    @classmethod
    def coerce(cls, case) -> "CaseKind":
        if isinstance(case, cls):
            return case
        if isinstance(case, str):
            key = case.strip().upper().replace("-", "_")
            aliases = {"1": 1, "2": 2, "3": 3, "UNRAMIFIED": 1, "ONEREALPLACE": 2,
                       "ONE_REAL_PLACE": 2, "MANYREALPLACES": 3, "MANY_REAL_PLACES": 3}
            if key in aliases:
                return cls(aliases[key])
            raise SearchError(f"unknown case {case!r}")
        return cls(int(case))


@dataclass(frozen=True, order=True)
class PrimePowerPair:
    p1: int
    p2: int
    value_log: float = field(compare=False, default=math.nan)


@dataclass(frozen=True)
class Witness:
    name: str
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs < self.rhs


@dataclass(frozen=True)
class Region:
    """Finite search region for one (case, n, y0), with the inequalities behind it."""

    case: CaseKind
    n: int
    y0: float
    p1_max: int
    p2_max: int
    seed: tuple[int, int]
    witnesses: tuple[Witness, ...]
    witness_region: str

    def describe(self) -> str:
        return (f"case {self.case.value}, n={self.n}, y0={self.y0}: "
                f"p1 <= {self.p1_max}, p2 <= {self.p2_max} (seed {self.seed}); "
                f"entry region {self.witness_region}")


@dataclass(frozen=True)
class MinimizerResult:
    case: CaseKind
    n: int
    y0: float
    pair: PrimePowerPair
    region: Region


def prime_powers_upto(limit: int) -> list[int]:
    """All p^k <= limit with p prime and k >= 1, ascending."""
    if limit < 2:
        return []
    return _prime_powers(int(limit)).tolist()


@lru_cache(maxsize=8)
def _prime_powers(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    primes = np.flatnonzero(sieve)
    higher = []
    for p in primes[primes <= math.isqrt(limit)].tolist():
        q = p * p
        while q <= limit:
            higher.append(q)
            q *= p
    allpp = np.unique(np.concatenate([primes, np.array(higher, dtype=np.int64)]))
    allpp.flags.writeable = False
    return allpp


def is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = _smallest_factor(q)
    while q % p == 0:
        q //= p
    return q == 1


def _smallest_factor(q: int) -> int:
    if q % 2 == 0:
        return 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return f
        f += 2
    return q


def exponents(case, n: int) -> tuple[float, float]:
    """Exponents (a, b) of p1 and p2 in the case objective."""
    case = CaseKind.coerce(case)
    if n < 2:
        raise SearchError(f"algebra degree must be >= 2, got {n}")
    if case is CaseKind.UNRAMIFIED:
        a = 1.0 - 1.0 / n
        return a, a
    if n % 2 or (n // 2) % 2 == 0:
        raise SearchError(f"case {case.value} needs n = 2m with m odd, got n={n}")
    b = 0.25 - 0.5 / n
    if case is CaseKind.ONE_REAL_PLACE:
        return 1.0 - 1.0 / n, b
    return b, b


def _check_y0(y0: float) -> float:
    y0 = float(y0)
    if not any(abs(y0 - v) < 1e-12 for v in Y0_VALUES):
        raise SearchError(f"y0 must be one of {Y0_VALUES}, got {y0}")
    return y0


def objective(case, n: int, y0: float, p1: int, p2: int) -> float:
    """Log of the case objective at a prime-power pair."""
    a, b = exponents(case, n)
    y0 = _check_y0(y0)
    for p in (p1, p2):
        if not is_prime_power(int(p)):
            raise SearchError(f"{p} is not a prime power")
    return a * math.log(p1) + b * math.log(p2) + c_h(p1, y0) + c_h(p2, y0)


def aux_g(case, y: float, p1: int, p2: int) -> float:
    """Auxiliary majorant of the case objective (its n -> infinity limit)."""
    case = CaseKind.coerce(case)
    a, b = {CaseKind.UNRAMIFIED: (1.0, 1.0),
            CaseKind.ONE_REAL_PLACE: (1.0, 0.25),
            CaseKind.MANY_REAL_PLACES: (0.25, 0.25)}[case]
    return p1**a * p2**b * math.exp(c_h(p1, y) + c_h(p2, y))


# (pair, bound) behind each case's finite region, evaluated at y = 0.1
_WITNESS = {
    CaseKind.UNRAMIFIED: ((2, 2), 214.0, "2 <= p1, p2 <= 214^2/2"),
    CaseKind.ONE_REAL_PLACE: ((2, 41), 49.0, "p1 <= 47, p2 <= 992129"),
    CaseKind.MANY_REAL_PLACES: ((37, 37), 11.0, "p1 p2 < 11^(57/14)"),
}


def witness_inequalities() -> list[Witness]:
    out = []
    for case, ((q1, q2), bound, _) in _WITNESS.items():
        out.append(Witness(f"g_{case.value}({q1},{q2}) < {bound:g}",
                           aux_g(case, 0.1, q1, q2), bound))
    return out


def _zero_threshold(y0: float) -> float:
    # C_h(x, y0) vanishes identically once sqrt(y0) log x > 4
    return math.exp(4.0 / math.sqrt(y0))


def _axis_bound(e: float, seed: int, y0: float) -> int:
    if e <= 0:
        pp = _prime_powers(int(_zero_threshold(y0) * 1.01) + 64)
        return int(pp[np.searchsorted(pp, _zero_threshold(y0), side="right")])
    u_seed = e * math.log(seed) + c_h(seed, y0)
    return int(math.floor(math.exp(u_seed / e) * (1 + 1e-12)))


def certify_region(case, n: int, y0: float) -> Region:
    """Check the witness inequalities and derive a finite region holding every minimizer."""
    case = CaseKind.coerce(case)
    y0 = _check_y0(y0)
    a, b = exponents(case, n)
    ws = tuple(witness_inequalities())
    # the same pairs at y0 = 2 are bounded by the y = 0.1 values (C_h decreases in y)
    (q1, q2), bound, text = _WITNESS[case]
    ws = ws + (Witness(f"g_{case.value}({q1},{q2}) at y0={y0:g} < {bound:g}",
                       aux_g(case, y0, q1, q2), bound),)
    failed = [w.name for w in ws if not w.holds]
    if failed:
        raise SearchError(f"witness inequality failed: {failed}")
    s1, s2 = _seed(a, y0), _seed(b, y0)
    return Region(case, n, y0, _axis_bound(a, s1, y0), _axis_bound(b, s2, y0),
                  (s1, s2), ws, text)


def _seed(e: float, y0: float) -> int:
    """Best prime power <= 1000 for one axis; any seed works, a good one keeps regions small."""
    pp = _prime_powers(1000)
    u = e * np.log(pp) + c_h_array(pp, y0)
    return int(pp[int(np.argmin(u))])


@lru_cache(maxsize=4)
def _c_h_table(limit: int, y0: float) -> tuple[np.ndarray, np.ndarray]:
    pp = _prime_powers(limit)
    vals = c_h_array(pp, y0)
    vals.flags.writeable = False
    return pp, vals


def _axis_min(e: float, limit: int, y0: float) -> tuple[int, float]:
    pp, ch = _c_h_table(max(limit, 1000), y0)
    stop = np.searchsorted(pp, limit, side="right")
    u = e * np.log(pp[:stop]) + ch[:stop]
    best = u.min()
    i = int(np.flatnonzero(u <= best + TIE_RTOL * max(1.0, abs(best)))[0])
    return int(pp[i]), float(u[i])


def minimize_case(case, n: int, y0: float) -> MinimizerResult:
    """Exact prime-power minimizer; ties go to the smallest p1, then p2."""
    case = CaseKind.coerce(case)
    y0 = _check_y0(y0)
    return _minimize_cached(case, int(n), y0)


@lru_cache(maxsize=1024)
def _minimize_cached(case: CaseKind, n: int, y0: float) -> MinimizerResult:
    a, b = exponents(case, n)
    region = certify_region(case, n, y0)
    p1, u1 = _axis_min(a, region.p1_max, y0)
    p2, u2 = _axis_min(b, region.p2_max, y0)
    return MinimizerResult(case, n, y0, PrimePowerPair(p1, p2, u1 + u2), region)


def brute_force_minimize(case, n: int, y0: float, limit: int) -> PrimePowerPair:
    """Reference: scan every pair of prime powers <= limit without using separability."""
    a, b = exponents(case, n)
    pp = _prime_powers(limit)
    ch = c_h_array(pp, y0)
    lp = np.log(pp)
    grid = (a * lp + ch)[:, None] + (b * lp + ch)[None, :]
    best = grid.min()
    i, j = np.argwhere(grid <= best + TIE_RTOL * max(1.0, abs(best)))[0]
    return PrimePowerPair(int(pp[i]), int(pp[j]), float(grid[i, j]))


# the n values tabulated for each (case, y0)
TABLE_ROWS = {
    (1, 0.1): tuple(range(2, 7)),
    (1, 2.0): tuple(range(2, 7)),
    (2, 0.1): (2, 6, 10, 14, 18, 22, 26),
    (2, 2.0): (2, 6, 10),
    (3, 0.1): tuple(range(6, 115, 4)),
    (3, 2.0): (6, 10),
}


def table(case, y0: float) -> list[MinimizerResult]:
    case = CaseKind.coerce(case)
    y0 = _check_y0(y0)
    return [minimize_case(case, n, y0) for n in TABLE_ROWS[(case.value, y0)]]


def table_csv(rows: list[MinimizerResult], group: bool = False) -> str:
    """CSV with columns case, y0, n, p1, p2, objective_log.

    With ``group`` consecutive rows sharing a minimizer collapse into one
    row whose ``n`` reads ``first-last``; ``objective_log`` is then that of
    the first n.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "y0", "n", "p1", "p2", "objective_log"])
    chunks: list[list[MinimizerResult]] = []
    for r in rows:
        if group and chunks and (chunks[-1][-1].pair.p1, chunks[-1][-1].pair.p2) == (r.pair.p1, r.pair.p2):
            chunks[-1].append(r)
        else:
            chunks.append([r])
    for ch in chunks:
        first, last = ch[0], ch[-1]
        nlabel = str(first.n) if first.n == last.n else f"{first.n}-{last.n}"
        w.writerow([first.case.value, f"{first.y0:g}", nlabel, first.pair.p1, first.pair.p2,
                    f"{first.pair.value_log:.12g}"])
    return buf.getvalue()
