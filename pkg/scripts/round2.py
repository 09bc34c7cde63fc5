"""p-maximal orders by the Round 2 (Pohst-Zassenhaus) step, exact over Q.

Elements of K = Q[x]/(f) are ascending coefficient lists of Fractions; an
order is a list of n basis elements.  Used by make_quartic_fixture.py where
Dedekind's criterion fails for every candidate polynomial.
"""
from fractions import Fraction
from itertools import combinations_with_replacement
from math import gcd, lcm


def mulmod(a, b, f):
    n = len(f) - 1
    prod = [Fraction(0)] * (2 * n - 1)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b):
                prod[i + j] += u * v
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n):
                prod[k - n + i] -= c * f[i]
    return prod[:n]


def powmod(a, e, f):
    n = len(f) - 1
    out = [Fraction(1)] + [Fraction(0)] * (n - 1)
    while e:
        if e & 1:
            out = mulmod(out, a, f)
        a = mulmod(a, a, f)
        e >>= 1
    return out


def _inverse(B):
    n = len(B)
    M = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(B)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                fac = M[r][c]
                M[r] = [a - fac * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def coords(v, Binv):
    """Coordinates c with v = sum c_i B_i."""
    n = len(Binv)
    return [sum(v[k] * Binv[k][i] for k in range(n)) for i in range(n)]


def lattice_basis(vectors):
    """Z-basis (echelon form) of the full-rank lattice spanned by rational vectors."""
    den = lcm(*(x.denominator for v in vectors for x in v))
    rows = [[int(x * den) for x in v] for v in vectors]
    n = len(rows[0])
    basis = []
    for c in range(n):
        while True:
            nz = [r for r in rows if r[c] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[c]))
            piv = nz[0]
            rows = [r if r is piv or r[c] == 0 else [a - (r[c] // piv[c]) * b for a, b in zip(r, piv)]
                    for r in rows]
        piv = next((r for r in rows if r[c] != 0), None)
        if piv is None:
            raise ValueError("vectors do not span a full-rank lattice")
        basis.append(piv)
        rows = [r for r in rows if r is not piv]
    return [[Fraction(x, den) for x in r] for r in basis]


def _nullspace_mod_p(rows, p):
    """Basis of {c in F_p^m : sum c_i rows_i = 0}, rows given as integer lists."""
    m = len(rows)
    width = len(rows[0]) if rows else 0
    # transpose: solve A c = 0 with A columns = rows
    A = [[rows[i][j] % p for i in range(m)] for j in range(width)]
    pivots, r = [], 0
    for c in range(m):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [v * inv % p for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                fac = A[i][c]
                A[i] = [(a - fac * b) % p for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(m) if c not in pivots]
    out = []
    for fc in free:
        v = [0] * m
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][fc] % p
        out.append(v)
    return out


def _int_mod(x, p):
    if x.denominator % p == 0:
        raise ArithmeticError("element is not p-integral in this basis")
    return x.numerator * pow(x.denominator, -1, p) % p


def _combine(B, c):
    n = len(B[0])
    return [sum(ci * B[i][k] for i, ci in enumerate(c)) for k in range(n)]


def p_maximal_order(f, p):
    """(basis of an order p-maximal at p containing Z[theta], log_p of its index over Z[theta])."""
    n = len(f) - 1
    f = [Fraction(c) for c in f]
    B = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    q = p
    while q < n:
        q *= p
    steps = 0
    while True:
        Binv = _inverse(B)
        frob = [[_int_mod(x, p) for x in coords(powmod(b, q, f), Binv)] for b in B]
        rad = _nullspace_mod_p(frob, p)
        I = lattice_basis([[p * x for x in b] for b in B] + [_combine(B, c) for c in rad])
        Iinv = _inverse(I)
        cond = []
        for b in B:
            row = []
            for e in I:
                row.extend(_int_mod(x, p) for x in coords(mulmod(b, e, f), Iinv))
            cond.append(row)
        ker = _nullspace_mod_p(cond, p)
        if not ker:
            return B, steps
        B = lattice_basis(B + [[x / p for x in _combine(B, c)] for c in ker])
        steps += len(ker)


def _rank_mod_p(M, p):
    return len(M) - len(_nullspace_mod_p([list(r) for r in zip(*M)], p)) if M else 0


def residue_degrees(f, p, B=None):
    """Residue degrees of the primes above p, from Frobenius on O/pO (O p-maximal)."""
    n = len(f) - 1
    if B is None:
        B, _ = p_maximal_order(f, p)
    fr = [Fraction(c) for c in f]
    Binv = _inverse(B)
    phi = [[_int_mod(x, p) for x in coords(powmod(b, p, fr), Binv)] for b in B]
    dims = []
    power = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(n):
        power = [[sum(power[i][k] * phi[k][j] for k in range(n)) % p for j in range(n)] for i in range(n)]
        shifted = [[(power[i][j] - int(i == j)) % p for j in range(n)] for i in range(n)]
        dims.append(n - _rank_mod_p(shifted, p))
    for size in range(1, n + 1):
        for degs in combinations_with_replacement(range(1, n + 1), size):
            if sum(degs) <= n and [sum(gcd(k, d) for d in degs) for k in range(1, n + 1)] == dims:
                return sorted(degs)
    raise ArithmeticError(f"no residue degree pattern matches {dims}")
