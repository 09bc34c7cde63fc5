"""Regenerate ``deg4_totally_complex.json``: all totally complex quartic
fields with discriminant up to a bound.

Hunter search: every quartic field has a generator with trace in {0, 1, 2}
and bounded T2.  The T2 bound used here is twice Hunter's constant so that
imprimitive fields, whose Hunter element may sit in a quadratic subfield,
are still reached through a genuinely quartic generator.

Candidates are grouped into fields by their splitting types at primes below
400 (arithmetically equivalent quartic fields are isomorphic).  Dedekind's
criterion decides for each candidate and prime p whether Z[theta] is
p-maximal; a p-maximal candidate gives v_p(d_K) and the splitting of p
exactly.  Where no candidate is p-maximal, a Round 2 computation
(round2.py) gives the p-maximal order, hence v_p(d_K) and the residue
degrees above p.

    python scripts/make_quartic_fixture.py 2700 > src/divbound/data/deg4_totally_complex.json
"""
import json
import math
import sys
from itertools import product

import numpy as np
from sympy import ZZ, Poly, factorint, primerange, symbols
from sympy.polys.densearith import dup_mul, dup_sub
from sympy.polys.galoistools import (gf_factor, gf_from_int_poly, gf_gcd, gf_mul, gf_quo,
                                     gf_to_int_poly)

from round2 import p_maximal_order, residue_degrees

x = symbols("x")
PRIMES = list(primerange(2, 400))
MIN_COMMON = 40  # shared unramified primes needed to identify two candidates


def quartic_disc(a, b, c, d):
    # discriminant of x^4 + a x^3 + b x^2 + c x + d
    return (256 * d**3 - 192 * a * c * d**2 - 128 * b**2 * d**2 + 144 * b * c**2 * d
            - 27 * c**4 + 144 * a**2 * b * d**2 - 6 * a**2 * c**2 * d - 80 * a * b**2 * c * d
            + 18 * a * b * c**3 + 16 * b**4 * d - 4 * b**3 * c**2 - 27 * a**4 * d**2
            + 18 * a**3 * b * c * d - 4 * a**3 * c**3 - 4 * a**2 * b**3 * d + a**2 * b**2 * c**2)


def dedekind(coeffs, p):
    """(Z[theta] is p-maximal, sorted (degree, multiplicity) of the factors mod p)."""
    fbar = gf_from_int_poly(coeffs, p)
    _, facs = gf_factor(fbar, p, ZZ)
    split = tuple(sorted((len(g) - 1, e) for g, e in facs))
    if all(e == 1 for _, e in facs):
        return True, split
    g = [1]
    for fac, _ in facs:
        g = gf_mul(g, fac, p, ZZ)
    h = gf_quo(fbar, g, p, ZZ)
    gi, hi = gf_to_int_poly(g, p, symmetric=False), gf_to_int_poly(h, p, symmetric=False)
    diff = dup_sub(list(coeffs), dup_mul(gi, hi, ZZ), ZZ)
    F = gf_from_int_poly([int(c) // p for c in diff], p)
    common = gf_gcd(gf_gcd(F, g, p, ZZ), h, p, ZZ)
    return len(common) == 1, split


class Field:
    def __init__(self):
        self.types = {}  # p -> splitting type
        self.vals = {}  # p -> v_p(d_K), from a p-maximal candidate
        self.cands = []  # (coeffs, D)

    def agrees(self, types):
        common = [p for p in types if p in self.types]
        return len(common) >= MIN_COMMON and all(self.types[p] == types[p] for p in common)


def main(bound):
    t2_max = 2.0 * (1.0 + 2 ** (1 / 3) * (bound / 4) ** (1 / 3))
    r = t2_max / 4
    A2, A3, A4 = int(6 * r) + 1, int(4 * r**1.5) + 1, int(r**2) + 1
    coeffs = np.array([c for c in product((0, -1, -2), range(-A2, A2 + 1),
                                          range(-A3, A3 + 1), range(1, A4 + 1))], dtype=float)
    comp = np.zeros((len(coeffs), 4, 4))
    comp[:, 1, 0] = comp[:, 2, 1] = comp[:, 3, 2] = 1.0
    comp[:, :, 3] = -coeffs[:, ::-1]
    roots = np.linalg.eigvals(comp)
    t2 = (np.abs(roots) ** 2).sum(axis=1)
    no_real = (np.abs(roots.imag) > 1e-9).all(axis=1)
    keep = coeffs[(t2 <= t2_max + 1e-9) & no_real].astype(int)

    fields = []
    for i, (a, b, c, d) in enumerate(keep.tolist()):
        if i % 5000 == 0:
            print(f"{i}/{len(keep)} candidates, {len(fields)} fields", file=sys.stderr, flush=True)
        D = quartic_disc(a, b, c, d)
        if D <= 0:
            continue
        fac = factorint(D)
        core = 1
        for p, e in fac.items():
            core *= p ** (e % 2)
        if core > bound:
            continue  # d_K >= squarefree kernel of D
        poly = [1, a, b, c, d]
        if not Poly(poly, x, domain=ZZ).is_irreducible:
            continue
        types, vals = {}, {}
        for p in sorted(set(PRIMES) | set(fac)):
            maximal, split = dedekind(poly, p)
            if sum(deg * e for deg, e in split) != 4:
                raise AssertionError(f"{poly} mod {p}")
            if maximal:
                types[p] = split
                vals[p] = fac.get(p, 0)
        home = next((f for f in fields if f.agrees(types)), None)
        if home is None:
            home = Field()
            fields.append(home)
        home.types.update(types)
        home.vals.update(vals)
        home.cands.append((poly, D))

    records, dropped, enlarged = [], 0, 0
    for f in fields:
        D0 = f.cands[0][1]
        fac0 = factorint(D0)
        ram = set(fac0)
        missing = sorted(p for p in ram if p not in f.vals)
        lower = math.prod(p ** (f.vals[p] if p in f.vals else fac0[p] % 2) for p in ram)
        if lower > bound:
            continue  # d_K is already known to exceed the bound
        for p in missing:
            poly = f.cands[0][0][::-1]
            B, steps = p_maximal_order(poly, p)
            enlarged += 1
            f.vals[p] = fac0[p] - 2 * steps
            f.types[p] = tuple((deg, 0) for deg in residue_degrees(poly, p, B))  # 0: e not computed
        dK = 1
        for p in ram:
            dK *= p ** f.vals[p]
        if dK > bound:
            continue
        if any(D % dK or not _is_square(D // dK) for _, D in f.cands):
            print(f"inconsistent discriminant {dK} for {f.cands[0][0]}", file=sys.stderr)
            dropped += 1
            continue
        poly, D = min(f.cands, key=lambda pc: (pc[1], sum(abs(v) for v in pc[0])))
        unknown = [p for p in PRIMES if p not in f.types]
        limit = unknown[0] if unknown else PRIMES[-1] + 1
        norms = sorted(p ** deg for p, split in f.types.items() if p < limit
                       for deg, _ in split if p ** deg < limit)
        records.append((dK, poly, norms[:6]))
    print(f"{len(fields)} candidate classes, {enlarged} primes settled by Round 2, "
          f"{dropped} dropped", file=sys.stderr)

    out, by_disc = [], {}
    for dK, poly, norms in sorted(records, key=lambda r: (r[0], sum(abs(v) for v in r[1]), r[1])):
        by_disc[dK] = by_disc.get(dK, 0) + 1
        out.append({"label": f"4.0.{dK}.{by_disc[dK]}", "degree": 4, "signature": [0, 2],
                    "disc": str(dK), "min_poly": poly[::-1], "prime_norms": norms})
    json.dump({"complete_upto": bound, "fields": out}, sys.stdout, indent=1)
    print()


def _is_square(v):
    return math.isqrt(v) ** 2 == v


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 2700)
