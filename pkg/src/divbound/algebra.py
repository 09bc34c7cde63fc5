"""Cyclic algebras (E/K, sigma, gamma), their natural orders and multiblock lattices.

Arithmetic is exact: K = Q[kappa]/(p_K) and E = K[t]/(g) are carried as
nested tuples of Fractions against the power bases.  Complex numbers only
appear when generator matrices are emitted.

An algebra element is a tuple (x_0, ..., x_{n-1}) of E-elements standing for
sum_j u^j x_j, with x u = u sigma(x) and u^n = gamma.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
import sympy

from .numfields import FieldRecord

ROOT_TOL = 1e-10
MAX_DENOM = 10**6


class AlgebraError(ValueError):
    pass


def _frac(v) -> Fraction:
    return Fraction(str(v)) if isinstance(v, str) else Fraction(v)


class KArith:
    """Exact arithmetic in Q[kappa]/(p), p monic with integer coefficients."""

    def __init__(self, min_poly):
        self.p = tuple(Fraction(c) for c in min_poly)
        self.d = len(self.p) - 1
        self.zero = (Fraction(0),) * self.d
        self.one = (Fraction(1),) + (Fraction(0),) * (self.d - 1)

    def elem(self, coeffs) -> tuple:
        c = [_frac(v) for v in coeffs]
        if len(c) > self.d:
            raise AlgebraError(f"center element has {len(c)} coefficients, degree is {self.d}")
        return tuple(c + [Fraction(0)] * (self.d - len(c)))

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def mul(self, a, b):
        d = self.d
        prod = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            if c:
                for j in range(d):
                    prod[k - d + j] -= c * self.p[j]
        return tuple(prod[:d])

    def embed(self, a, kappa: complex) -> complex:
        return complex(sum(float(c) * kappa**j for j, c in enumerate(a)))


class EArith:
    """Exact arithmetic in K[t]/(g), g monic over K; elements are n-tuples of K-elements."""

    def __init__(self, K: KArith, g):
        self.K = K
        self.g = tuple(g)
        self.n = len(self.g) - 1
        if self.g[-1] != K.one:
            raise AlgebraError("extension polynomial must be monic")
        self.zero = (K.zero,) * self.n
        self.one = (K.one,) + (K.zero,) * (self.n - 1)
        self.t = (K.zero, K.one) + (K.zero,) * (self.n - 2) if self.n > 1 else None

    def from_k(self, a):
        return (a,) + (self.K.zero,) * (self.n - 1)

    def add(self, a, b):
        return tuple(self.K.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(self.K.sub(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        K, n = self.K, self.n
        prod = [K.zero] * (2 * n - 1)
        for i, x in enumerate(a):
            if any(x):
                for j, y in enumerate(b):
                    if any(y):
                        prod[i + j] = K.add(prod[i + j], K.mul(x, y))
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if any(c):
                for j in range(n):
                    prod[k - n + j] = K.sub(prod[k - n + j], K.mul(c, self.g[j]))
        return tuple(prod[:n])

    def is_zero(self, a) -> bool:
        return not any(any(c) for c in a)

    def eval_poly(self, coeffs_k, x):
        """Evaluate a polynomial with K-coefficients at x in E (Horner)."""
        acc = self.zero
        for c in reversed(coeffs_k):
            acc = self.add(self.mul(acc, x), self.from_k(c))
        return acc

    def embed(self, a, kappa: complex, troot: complex) -> complex:
        return sum(self.K.embed(c, kappa) * troot**i for i, c in enumerate(a))


def _sorted_roots(coeffs_asc) -> np.ndarray:
    """Roots of a complex polynomial, Newton-polished, in a canonical order."""
    c = np.asarray(coeffs_asc, dtype=complex)
    roots = np.roots(c[::-1]).astype(complex)
    dc = np.arange(1, len(c)) * c[1:]
    for _ in range(4):
        fv = np.polyval(c[::-1], roots)
        dv = np.polyval(dc[::-1], roots)
        ok = np.abs(dv) > 0
        roots[ok] = roots[ok] - fv[ok] / dv[ok]
    keys = [(round(r.real, 9), round(r.imag, 9)) for r in roots]
    return roots[np.lexsort((np.array([k[1] for k in keys]), np.array([k[0] for k in keys])))]


def _center_roots(K: KArith) -> np.ndarray:
    """Real roots ascending, then roots with Im > 0 by real part, then their conjugates."""
    roots = _sorted_roots([float(c) for c in K.p])
    real = [r.real for r in roots if abs(r.imag) < ROOT_TOL]
    upper = [r for r in roots if r.imag >= ROOT_TOL]
    return np.array(real + upper + [np.conj(r) for r in upper], dtype=complex)


@dataclass(frozen=True)
class EmbeddingSet:
    """Chosen embeddings of E: alpha_i sends kappa -> kappa[i] and t -> troot[i]."""

    kind: str  # "reg1" or "reg2"
    kappa: tuple[complex, ...]
    troot: tuple[complex, ...]

    def conjugated(self, i: int) -> "EmbeddingSet":
        kap, tr = list(self.kappa), list(self.troot)
        kap[i], tr[i] = kap[i].conjugate(), tr[i].conjugate()
        return EmbeddingSet(self.kind, tuple(kap), tuple(tr))


@dataclass
class CyclicAlgebraSpec:
    center: FieldRecord
    ext_poly: list  # n+1 center elements, ascending, monic
    sigma_root_index: int
    gamma: list  # center element
    n: int
    division_asserted: bool = True
    ext_integral_basis: list | None = None  # n*d extension elements spanning O_E

    def __post_init__(self):
        if len(self.ext_poly) != self.n + 1:
            raise AlgebraError(f"extension polynomial has degree {len(self.ext_poly) - 1}, n = {self.n}")
        if self.n < 1:
            raise AlgebraError("n must be >= 1")

    @cached_property
    def K(self) -> KArith:
        return KArith(self.center.min_poly)

    @cached_property
    def E(self) -> EArith:
        return EArith(self.K, [self.K.elem(c) for c in self.ext_poly])

    @cached_property
    def gamma_k(self):
        g = self.K.elem(self.gamma)
        if not any(g):
            raise AlgebraError("gamma must be nonzero")
        return g

    @property
    def d(self) -> int:
        return self.K.d

    @cached_property
    def sigma_t(self):
        return _find_sigma(self)

    def sigma(self, x, power: int = 1):
        for _ in range(power % self.n):
            x = self.E.eval_poly(x, self.sigma_t)
        return x

    def e_elem(self, rows):
        if len(rows) != self.n:
            raise AlgebraError(f"extension element needs {self.n} center coefficients")
        return tuple(self.K.elem(r) for r in rows)

    # ---- algebra arithmetic -------------------------------------------------

    def mul(self, a, b):
        """(sum u^j x_j)(sum u^k y_k) = sum u^{j+k} sigma^k(x_j) y_k, u^n = gamma."""
        E, n = self.E, self.n
        out = [E.zero] * n
        gam = E.from_k(self.gamma_k)
        for j, x in enumerate(a):
            if E.is_zero(x):
                continue
            for k, y in enumerate(b):
                if E.is_zero(y):
                    continue
                term = E.mul(self.sigma(x, k), y)
                if j + k >= n:
                    term = E.mul(gam, term)
                out[(j + k) % n] = E.add(out[(j + k) % n], term)
        return tuple(out)

    def add(self, a, b):
        return tuple(self.E.add(x, y) for x, y in zip(a, b))

    def one(self):
        return (self.E.one,) + (self.E.zero,) * (self.n - 1)

    def u(self):
        if self.n == 1:
            return (self.E.from_k(self.gamma_k),)
        return (self.E.zero, self.E.one) + (self.E.zero,) * (self.n - 2)

    def flatten(self, a) -> list[Fraction]:
        return [c for x in a for kc in x for c in kc]

    def unflatten(self, v):
        d, n = self.d, self.n
        v = list(v)
        return tuple(tuple(tuple(v[(j * n + i) * d:(j * n + i + 1) * d]) for i in range(n))
                     for j in range(n))

    # ---- serialization ------------------------------------------------------

    @classmethod
    def from_json(cls, raw: dict) -> "CyclicAlgebraSpec":
        for key in ("center", "ext_poly_over_center", "sigma_root_index", "gamma", "n"):
            if key not in raw:
                raise AlgebraError(f"algebra spec: field '{key}' is missing")
        return cls(FieldRecord.from_json(raw["center"], "algebra spec center"),
                   raw["ext_poly_over_center"], int(raw["sigma_root_index"]), raw["gamma"],
                   int(raw["n"]), bool(raw.get("division_asserted", True)),
                   raw.get("ext_integral_basis"))

    def to_json(self) -> dict:
        out = {"center": self.center.to_json(), "ext_poly_over_center": self.ext_poly,
               "sigma_root_index": self.sigma_root_index, "gamma": self.gamma, "n": self.n,
               "division_asserted": self.division_asserted}
        if self.ext_integral_basis is not None:
            out["ext_integral_basis"] = self.ext_integral_basis
        return out


def load_algebra_spec(path) -> CyclicAlgebraSpec:
    with open(path) as fh:
        return CyclicAlgebraSpec.from_json(json.load(fh))


def _ext_roots(spec: CyclicAlgebraSpec, kappa: complex) -> np.ndarray:
    return _sorted_roots([spec.K.embed(c, kappa) for c in spec.E.g])


def _n_cycles(n: int, first: int | None = None):
    """Permutations of range(n) forming a single n-cycle, optionally with perm[0] fixed."""
    for rest in itertools.permutations(range(1, n)):
        cyc = (0,) + rest
        perm = [0] * n
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            perm[a] = b
        if first is None or perm[0] == first:
            yield perm


def _find_sigma(spec: CyclicAlgebraSpec):
    """Exact sigma(t) in E from the requested root image under the first embedding."""
    K, E, n, d = spec.K, spec.E, spec.n, spec.d
    if n == 1:
        return None  # sigma is the identity
    idx = spec.sigma_root_index
    if not 0 < idx < n:
        raise AlgebraError(f"sigma_root_index must be in 1..{n - 1} (0 is the identity)")
    kap = _center_roots(K)
    n_real = sum(1 for z in kap if abs(z.imag) < ROOT_TOL)
    m = (d - n_real) // 2
    free = list(range(n_real + m))  # conjugate embeddings reuse their partner's permutation
    roots = {}
    for k in free:
        roots[k] = _ext_roots(spec, kap[k])
    for k in range(n_real + m, d):
        roots[k] = np.conj(roots[k - m])
    # embedding matrix of the Q-basis t^i kappa^j
    M = np.array([[roots[k][l] ** i * kap[k] ** j for i in range(n) for j in range(d)]
                  for k in range(d) for l in range(n)])
    choices = [list(_n_cycles(n, idx if k == 0 else None)) for k in free]
    for combo in itertools.product(*choices):
        perms = dict(zip(free, combo))
        for k in range(n_real + m, d):
            perms[k] = perms[k - m]
        rhs = np.array([roots[k][perms[k][l]] for k in range(d) for l in range(n)])
        try:
            sol = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            raise AlgebraError("extension power basis is degenerate under embedding") from None
        if np.max(np.abs(sol.imag)) > 1e-6:
            continue
        c = [Fraction(float(v)).limit_denominator(MAX_DENOM) for v in sol.real]
        S = tuple(tuple(c[i * d:(i + 1) * d]) for i in range(n))
        if not E.is_zero(E.eval_poly(E.g, S)):
            continue
        x = S
        for _ in range(n - 2):
            x = E.eval_poly(x, S)
        if x == E.t:
            continue  # order below n
        if E.eval_poly(x, S) != E.t:
            continue
        return S
    raise AlgebraError("no K-automorphism of order n matches sigma_root_index; is E/K cyclic?")


def left_regular_matrix(spec: CyclicAlgebraSpec, element):
    """n x n matrix over E: entry (i, j) is sigma^j(x_{i-j}), times gamma above the diagonal."""
    n, E = spec.n, spec.E
    if len(element) != n:
        raise AlgebraError(f"element needs {n} components")
    gam = E.from_k(spec.gamma_k)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i >= j:
                row.append(spec.sigma(element[i - j], j))
            else:
                row.append(E.mul(gam, spec.sigma(element[n + i - j], j)))
        rows.append(row)
    return rows


def embeddings(spec: CyclicAlgebraSpec, kind: str) -> EmbeddingSet:
    """reg1: one E-embedding over each K-embedding; reg2: one per conjugate pair."""
    kap = _center_roots(spec.K)
    n_real = sum(1 for z in kap if abs(z.imag) < ROOT_TOL)
    m = (spec.d - n_real) // 2
    if kind == "reg2":
        if n_real:
            raise AlgebraError("reg2 needs a totally complex center")
        ks = list(range(m))
    elif kind == "reg1":
        ks = list(range(spec.d))
    else:
        raise AlgebraError(f"unknown construction {kind!r}")
    kappa, troot = [], []
    for k in ks:
        if k >= n_real + m:
            kappa.append(complex(np.conj(kap[k - m])))
            troot.append(complex(np.conj(troot[k - m])))
        else:
            kappa.append(complex(kap[k]))
            troot.append(complex(_ext_roots(spec, kap[k])[0]))
    es = EmbeddingSet(kind, tuple(kappa), tuple(troot))
    check_embeddings(spec, es)
    return es


def check_embeddings(spec: CyclicAlgebraSpec, es: EmbeddingSet) -> None:
    K, E = spec.K, spec.E
    for kappa, troot in zip(es.kappa, es.troot):
        if abs(K.embed(K.p, kappa)) > ROOT_TOL * max(1.0, abs(kappa)) ** K.d:
            raise AlgebraError(f"{kappa} is not a root of the center polynomial")
        gval = sum(K.embed(c, kappa) * troot**i for i, c in enumerate(E.g))
        if abs(gval) > ROOT_TOL * max(1.0, abs(troot)) ** E.n * 10:
            raise AlgebraError(f"restriction check failed: g^beta({troot}) = {gval}")
    kap = np.array(es.kappa)
    dist = np.abs(kap[:, None] - kap[None, :]) + np.eye(len(kap))
    if np.min(dist) < 1e-8:
        raise AlgebraError("two chosen embeddings restrict to the same embedding of K")
    if es.kind == "reg1":
        if len(kap) != spec.d:
            raise AlgebraError(f"reg1 needs all {spec.d} embeddings of K, got {len(kap)}")
    else:
        if np.any(np.abs(kap.imag) < ROOT_TOL):
            raise AlgebraError("reg2 embeddings must be complex")
        cdist = np.abs(kap[:, None] - np.conj(kap)[None, :])
        if len(kap) != spec.d // 2 or np.min(cdist) < 1e-8:
            raise AlgebraError("reg2 needs one embedding from each conjugate pair")


@dataclass(frozen=True)
class OrderBasis:
    elements: tuple  # algebra elements spanning a Z-order
    labels: tuple[str, ...] = field(default=())

    def __len__(self):
        return len(self.elements)


def _is_integral_k(spec: CyclicAlgebraSpec, a) -> bool:
    """a in K is an algebraic integer iff its characteristic polynomial is in Z[x]."""
    K = spec.K
    basis = [tuple(Fraction(int(i == j)) for i in range(K.d)) for j in range(K.d)]
    cols = [K.mul(a, b) for b in basis]
    M = sympy.Matrix(K.d, K.d, lambda i, j: sympy.Rational(cols[j][i].numerator, cols[j][i].denominator))
    return all(c.is_integer for c in M.charpoly().all_coeffs())


def natural_order(spec: CyclicAlgebraSpec) -> OrderBasis:
    """Basis u^j e_l of O_E + u O_E + ... + u^{n-1} O_E, closure checked exactly."""
    if not _is_integral_k(spec, spec.gamma_k):
        raise AlgebraError("gamma is not an algebraic integer; the natural order needs it to be")
    E, n, d = spec.E, spec.n, spec.d
    if spec.ext_integral_basis is not None:
        ebasis = [spec.e_elem(b) for b in spec.ext_integral_basis]
        labels_e = [f"e{l}" for l in range(len(ebasis))]
    else:
        ebasis = [tuple(tuple(Fraction(int(i == a and j == b)) for j in range(d)) for i in range(n))
                  for a in range(n) for b in range(d)]
        labels_e = [f"t^{a}k^{b}" for a in range(n) for b in range(d)]
    if len(ebasis) != n * d:
        raise AlgebraError(f"integral basis of E needs {n * d} elements, got {len(ebasis)}")
    elems, labels = [], []
    for j in range(n):
        for l, e in enumerate(ebasis):
            elems.append(tuple(e if jj == j else E.zero for jj in range(n)))
            labels.append(f"u^{j}*{labels_e[l]}")
    basis = OrderBasis(tuple(elems), tuple(labels))
    check_order(spec, basis)
    return basis


def coordinates(spec: CyclicAlgebraSpec, basis: OrderBasis):
    """Function mapping an algebra element to its rational coordinates in ``basis``."""
    B = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in spec.flatten(b)]
                      for b in basis.elements]).T
    if B.rows != B.cols or B.det() == 0:
        raise AlgebraError(f"order basis has {B.cols} elements, not a basis of the {B.rows}-dim algebra")
    Binv = B.inv()

    def coords(a):
        v = sympy.Matrix([sympy.Rational(c.numerator, c.denominator) for c in spec.flatten(a)])
        return [Fraction(int(x.p), int(x.q)) for x in Binv * v]

    return coords


def check_order(spec: CyclicAlgebraSpec, basis: OrderBasis) -> None:
    """Identity and all basis products must have integer coordinates."""
    coords = coordinates(spec, basis)
    if any(c.denominator != 1 for c in coords(spec.one())):
        raise AlgebraError("order does not contain the identity")
    for i, a in enumerate(basis.elements):
        for j, b in enumerate(basis.elements):
            if any(c.denominator != 1 for c in coords(spec.mul(a, b))):
                raise AlgebraError(f"order not closed: product of basis elements {i} and {j}")


def _embedded_blocks(spec: CyclicAlgebraSpec, element, es: EmbeddingSet) -> np.ndarray:
    psi = left_regular_matrix(spec, element)
    n = spec.n
    blocks = []
    for kappa, troot in zip(es.kappa, es.troot):
        blk = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                blk[i, j] = spec.E.embed(psi[i][j], kappa, troot)
        blocks.append(blk)
    return np.hstack(blocks)


def _build(spec, order: OrderBasis, es: EmbeddingSet, kind: str):
    from .lattice import OrderLattice

    if es.kind != kind:
        raise AlgebraError(f"embedding set is for {es.kind}, not {kind}")
    check_embeddings(spec, es)
    gens = [_embedded_blocks(spec, b, es) for b in order.elements]
    return OrderLattice.from_generators(gens, blocks=len(es.kappa))


def build_lattice_reg1(spec: CyclicAlgebraSpec, order: OrderBasis, es: EmbeddingSet | None = None):
    return _build(spec, order, es or embeddings(spec, "reg1"), "reg1")


def build_lattice_reg2(spec: CyclicAlgebraSpec, order: OrderBasis, es: EmbeddingSet | None = None):
    if not spec.center.totally_complex:
        raise AlgebraError("reg2 needs a totally complex center")
    return _build(spec, order, es or embeddings(spec, "reg2"), "reg2")


def multiblock_diag(lattice):
    """Place each generator's n x n blocks on the diagonal of an nm x nm matrix."""
    from .lattice import OrderLattice

    n, m = lattice.n, lattice.blocks
    if lattice.T != n * m:
        raise AlgebraError("blocks must be square to assemble diag(L)")
    gens = []
    for X in lattice.generators:
        D = np.zeros((n * m, n * m), dtype=complex)
        for b in range(m):
            D[b * n:(b + 1) * n, b * n:(b + 1) * n] = X[:, b * n:(b + 1) * n]
        gens.append(D)
    return OrderLattice.from_generators(gens, blocks=1)
