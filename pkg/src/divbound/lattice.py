"""Lattices of complex matrices: volume, ball enumeration, minimum determinants, shaping and PEP bounds.

A lattice is spanned over Z by k complex n x T matrices.  Inner products are
<X, Y> = Re Tr(X Y^*), i.e. the Euclidean product of the real flattening
(Re X, Im X).
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

VOL_RTOL = 1e-10
# |det| below this (times the scale^n) counts as a vanishing determinant
SINGULAR_TOL = 1e-9


class LatticeError(ValueError):
    pass


class DetMode(enum.Enum):
    ONE_SHOT = "oneshot"
    MULTIBLOCK = "multiblock"


class PepForm(enum.Enum):
    EXACT = "exact"
    HIGH_SNR = "high_snr"
    MINDET = "mindet"


def _flatten(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    return np.concatenate([X.real.ravel(), X.imag.ravel()])


def gram_and_volume(generators) -> tuple[np.ndarray, float]:
    """Gram matrix of Re Tr(X Y^*) and the covolume sqrt(det G)."""
    gram, vol, _ = _gram_vol(np.array([_flatten(X) for X in generators]))
    return gram, vol


def _gram_vol(B: np.ndarray):
    if B.shape[0] > B.shape[1]:
        raise LatticeError(f"{B.shape[0]} generators in a {B.shape[1]}-dimensional real space")
    gram = B @ B.T
    gram = 0.5 * (gram + gram.T)
    try:
        L = linalg.cholesky(gram, lower=True)
    except linalg.LinAlgError:
        raise LatticeError("generators are not linearly independent (Gram not positive definite)") from None
    diag = np.diag(L)
    eig = np.linalg.eigvalsh(gram)
    if eig[0] <= 1e-12 * eig[-1]:
        raise LatticeError(f"generators are numerically dependent (eigenvalue ratio {eig[0] / eig[-1]:.3g})")
    log_vol = float(np.sum(np.log(diag)))
    R = linalg.qr(B.T, mode="r")[0]
    log_vol_qr = float(np.sum(np.log(np.abs(np.diag(R)[:B.shape[0]]))))
    if abs(log_vol - log_vol_qr) > VOL_RTOL * max(1.0, abs(log_vol)) * 10:
        raise LatticeError(f"volume mismatch: Cholesky {math.exp(log_vol)!r} vs QR {math.exp(log_vol_qr)!r}")
    return gram, math.exp(log_vol), math.exp(log_vol_qr)


@dataclass(frozen=True)
class OrderLattice:
    generators: tuple  # k complex n x T matrices
    basis: np.ndarray  # k x 2nT real flattening
    gram: np.ndarray
    vol: float
    vol_qr: float
    blocks: int = 1

    @classmethod
    def from_generators(cls, generators, blocks: int = 1) -> "OrderLattice":
        gens = tuple(np.atleast_2d(np.asarray(X, dtype=complex)) for X in generators)
        if not gens:
            raise LatticeError("empty generator list")
        shape = gens[0].shape
        if any(X.shape != shape for X in gens):
            raise LatticeError("generators must share one shape")
        if shape[1] % blocks:
            raise LatticeError(f"T = {shape[1]} is not divisible into {blocks} blocks")
        B = np.array([_flatten(X) for X in gens])
        gram, vol, vol_qr = _gram_vol(B)
        return cls(gens, B, gram, vol, vol_qr, blocks)

    @property
    def n(self) -> int:
        return self.generators[0].shape[0]

    @property
    def T(self) -> int:
        return self.generators[0].shape[1]

    @property
    def k(self) -> int:
        return len(self.generators)

    def scaled(self, alpha: float) -> "OrderLattice":
        return OrderLattice.from_generators([alpha * X for X in self.generators], self.blocks)

    def matrices(self, coords) -> np.ndarray:
        """Lattice points for integer coordinate rows, as an array of n x T matrices."""
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        flat = coords @ self.basis
        half = self.n * self.T
        return (flat[:, :half] + 1j * flat[:, half:]).reshape(-1, self.n, self.T)

    def to_json(self) -> list:
        return [[[[float(z.real), float(z.imag)] for z in row] for row in X] for X in self.generators]


@dataclass(frozen=True)
class BallPoints:
    radius: float
    coords: np.ndarray  # N x k integers
    sqnorms: np.ndarray

    def __len__(self):
        return len(self.coords)


def _fp_chunks(gram: np.ndarray, R: float):
    """Fincke-Pohst: yield (coords, sqnorm) arrays, one per innermost line, covering x^T G x <= R^2."""
    k = gram.shape[0]
    U = linalg.cholesky(gram, lower=False)  # G = U^T U
    d = np.diag(U)
    mu = U / d[:, None]
    r2 = R * R * (1 + 1e-10) + 1e-300
    x = np.zeros(k, dtype=np.int64)

    def rec(i, rem):
        c = -float(mu[i, i + 1:] @ x[i + 1:]) if i + 1 < k else 0.0
        w = math.sqrt(max(rem, 0.0)) / d[i]
        lo, hi = math.ceil(c - w), math.floor(c + w)
        if lo > hi:
            return
        if i == 0:
            xs = np.arange(lo, hi + 1, dtype=np.int64)
            used = r2 - rem
            sq = used + d[0] ** 2 * (xs - c) ** 2
            keep = sq <= r2
            if keep.any():
                pts = np.repeat(x[None, :], int(keep.sum()), axis=0)
                pts[:, 0] = xs[keep]
                yield pts, sq[keep]
            return
        for xi in range(lo, hi + 1):
            x[i] = xi
            yield from rec(i - 1, rem - d[i] ** 2 * (xi - c) ** 2)
        x[i] = 0

    yield from rec(k - 1, r2)


def enumerate_ball(lattice: OrderLattice, R: float) -> BallPoints:
    """All nonzero lattice points with ||X||_F <= R (boundary included)."""
    if R <= 0:
        raise LatticeError(f"radius must be positive, got {R}")
    gram = lattice.gram if isinstance(lattice, OrderLattice) else np.asarray(lattice, dtype=float)
    k = gram.shape[0]
    chunks = list(_fp_chunks(gram, R))
    if chunks:
        coords = np.concatenate([c for c, _ in chunks])
    else:
        coords = np.zeros((0, k), dtype=np.int64)
    nz = np.any(coords != 0, axis=1)
    coords = coords[nz]
    sq = np.einsum("ij,jk,ik->i", coords, gram, coords) if len(coords) else np.zeros(0)
    keep = sq <= R * R * (1 + 1e-10)
    return BallPoints(float(R), coords[keep], sq[keep])


def ball_count_energy(lattice: OrderLattice, R: float) -> tuple[int, float]:
    """|L(R)| and sum of ||X||^2 over L(R), without listing the points.

    The two innermost coordinates are handled in closed form: for each x_1
    the admissible x_0 form an integer interval whose count and energy are
    sums of powers.
    """
    gram = lattice.gram
    k = gram.shape[0]
    if k < 2:
        pts = enumerate_ball(lattice, R)
        return len(pts), float(pts.sqnorms.sum())
    U = linalg.cholesky(gram, lower=False)
    d = np.diag(U)
    mu = U / d[:, None]
    r2 = R * R * (1 + 1e-10) + 1e-300
    x = np.zeros(k, dtype=np.int64)
    total = [0, 0.0]

    def line_sums(i_used, c1, rem):
        # level 1 vectorized, level 0 in closed form
        w1 = math.sqrt(max(rem, 0.0)) / d[1]
        lo1, hi1 = math.ceil(c1 - w1), math.floor(c1 + w1)
        if lo1 > hi1:
            return
        x1 = np.arange(lo1, hi1 + 1, dtype=float)
        rem0 = rem - d[1] ** 2 * (x1 - c1) ** 2
        c0 = -(mu[0, 1] * x1 + i_used)
        w0 = np.sqrt(np.maximum(rem0, 0.0)) / d[0]
        lo0, hi0 = np.ceil(c0 - w0), np.floor(c0 + w0)
        cnt = np.maximum(hi0 - lo0 + 1, 0)
        ok = cnt > 0
        lo0, hi0, cnt, c0, rem0 = lo0[ok], hi0[ok], cnt[ok], c0[ok], rem0[ok]
        s1 = (hi0 * (hi0 + 1) - (lo0 - 1) * lo0) / 2
        s2 = (hi0 * (hi0 + 1) * (2 * hi0 + 1) - (lo0 - 1) * lo0 * (2 * lo0 - 1)) / 6
        used = r2 - rem0
        energy = cnt * used + d[0] ** 2 * (s2 - 2 * c0 * s1 + cnt * c0 * c0)
        total[0] += int(cnt.sum())
        total[1] += float(energy.sum())

    def rec(i, rem):
        c = -float(mu[i, i + 1:] @ x[i + 1:]) if i + 1 < k else 0.0
        if i == 1:
            line_sums(float(mu[0, 2:] @ x[2:]) if k > 2 else 0.0, c, rem)
            return
        w = math.sqrt(max(rem, 0.0)) / d[i]
        for xi in range(math.ceil(c - w), math.floor(c + w) + 1):
            x[i] = xi
            rec(i - 1, rem - d[i] ** 2 * (xi - c) ** 2)
        x[i] = 0

    rec(k - 1, r2)
    # drop the origin, which always lies in the ball
    return total[0] - 1, total[1]


def brute_force_ball(lattice: OrderLattice, R: float) -> np.ndarray:
    """Reference enumeration over the coordinate box |x_i| <= R sqrt((G^-1)_ii)."""
    G = lattice.gram
    box = np.floor(R * np.sqrt(np.diag(np.linalg.inv(G))) + 1e-9).astype(int)
    axes = [np.arange(-b, b + 1) for b in box]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(box))
    sq = np.einsum("ij,jk,ik->i", grid, G, grid)
    keep = (sq <= R * R * (1 + 1e-10)) & np.any(grid != 0, axis=1)
    return grid[keep]


def _diag_assemble(mats: np.ndarray, blocks: int) -> np.ndarray:
    N, n, T = mats.shape
    if T != n * blocks:
        raise LatticeError(f"multiblock mode needs {blocks} square {n}x{n} blocks, got {n}x{T}")
    out = np.zeros((N, T, T), dtype=complex)
    for b in range(blocks):
        out[:, b * n:(b + 1) * n, b * n:(b + 1) * n] = mats[:, :, b * n:(b + 1) * n]
    return out


def _det_values(mats: np.ndarray, mode: DetMode, blocks: int) -> np.ndarray:
    if mode is DetMode.MULTIBLOCK:
        return np.abs(np.linalg.det(_diag_assemble(mats, blocks)))
    gram = mats @ np.conj(np.transpose(mats, (0, 2, 1)))
    return np.sqrt(np.abs(np.linalg.det(gram)))


@dataclass(frozen=True)
class MinDetResult:
    value: float
    witness: np.ndarray  # integer coordinates
    witness_matrix: np.ndarray
    point_count: int
    radius: float

    @property
    def nvd_violated(self) -> bool:
        scale = math.sqrt(float(np.sum(np.abs(self.witness_matrix) ** 2)))
        return self.value < SINGULAR_TOL * max(scale, 1.0) ** self.witness_matrix.shape[0]


def min_det(lattice: OrderLattice, R: float, mode=DetMode.MULTIBLOCK) -> MinDetResult:
    """Smallest determinant over the nonzero points of the radius-R ball.

    An upper estimate of the true infimum; ties go to the shortest point,
    then the lexicographically smallest coordinate vector.
    """
    mode = DetMode(mode) if not isinstance(mode, DetMode) else mode
    pts = enumerate_ball(lattice, R)
    if len(pts) == 0:
        raise LatticeError(f"no nonzero lattice point within radius {R}; increase the radius")
    mats = lattice.matrices(pts.coords)
    vals = _det_values(mats, mode, lattice.blocks)
    best = vals.min()
    ties = np.flatnonzero(vals <= best * (1 + 1e-12) + 1e-300)
    # shortest witness first, then lexicographic
    keys = np.column_stack([np.round(pts.sqnorms[ties], 9), pts.coords[ties]])
    order = np.lexsort(keys.T[::-1])
    i = ties[order[0]]
    return MinDetResult(float(vals[i]), pts.coords[i].copy(), mats[i], len(pts), float(R))


def normalized_min_det(lattice: OrderLattice, R: float) -> float:
    """delta = mindet(diag L) / vol^{N/k} with N = n * blocks."""
    res = min_det(lattice, R, DetMode.MULTIBLOCK)
    N = lattice.n * lattice.blocks
    return res.value / lattice.vol ** (N / lattice.k)


@dataclass(frozen=True)
class ShapedCode:
    matrices: np.ndarray  # N x n x T
    radius: float
    theta: float
    T: int
    lattice: OrderLattice | None = field(default=None, repr=False)

    @classmethod
    def from_matrices(cls, mats, T: int, radius: float = math.nan) -> "ShapedCode":
        mats = np.asarray(mats, dtype=complex)
        if mats.ndim == 1:
            mats = mats[:, None, None]
        energy = float(np.sum(np.abs(mats) ** 2))
        if energy == 0:
            raise LatticeError("code has zero energy")
        return cls(mats, radius, math.sqrt(T * len(mats) / energy), T)

    @property
    def mean_energy(self) -> float:
        return float(np.sum(np.abs(self.theta * self.matrices) ** 2)) / len(self.matrices)


def shape_and_theta(lattice: OrderLattice, R: float, T: int) -> ShapedCode:
    pts = enumerate_ball(lattice, R)
    if len(pts) == 0:
        raise LatticeError(f"no nonzero lattice point within radius {R}")
    theta = math.sqrt(T * len(pts) / float(pts.sqnorms.sum()))
    return ShapedCode(lattice.matrices(pts.coords), float(R), theta, T, lattice)


@dataclass(frozen=True)
class PepParams:
    rho: float
    n_r: int
    n: int
    c: float = 1.0

    def __post_init__(self):
        if self.rho <= 0 or self.n_r < 1 or self.n < 1 or self.c < 0:
            raise LatticeError(f"invalid PEP parameters {self}")


def difference_matrices(code: ShapedCode) -> np.ndarray:
    """Nonzero differences: the 2R ball of the lattice, or pairwise for explicit codes."""
    if code.lattice is not None and math.isfinite(code.radius):
        pts = enumerate_ball(code.lattice, 2 * code.radius)
        return code.lattice.matrices(pts.coords)
    M = code.matrices
    diffs = (M[:, None] - M[None, :]).reshape(-1, *M.shape[1:])
    nz = np.any(np.abs(diffs) > 1e-12, axis=(1, 2))
    flat = np.round(diffs[nz].reshape(len(diffs[nz]), -1), 12)
    _, idx = np.unique(flat, axis=0, return_index=True)
    return diffs[nz][np.sort(idx)]


def pep_union_bound(code: ShapedCode, params: PepParams, form=PepForm.EXACT,
                    diffs: np.ndarray | None = None) -> float:
    form = PepForm(form) if not isinstance(form, PepForm) else form
    n, nr, rho, th = params.n, params.n_r, params.rho, code.theta
    if form is PepForm.MINDET:
        if params.c <= 0:
            raise LatticeError("MinDet form needs a positive minimum determinant c")
        count = len(diffs) if diffs is not None else len(difference_matrices(code))
        return count * (4 * n) ** (n * nr) / (params.c ** (2 * nr) * th ** (2 * n * nr) * rho ** (n * nr))
    D = difference_matrices(code) if diffs is None else diffs
    DD = D @ np.conj(np.transpose(D, (0, 2, 1)))
    if DD.shape[1] != n:
        raise LatticeError(f"difference matrices have {DD.shape[1]} rows, params say n={n}")
    if form is PepForm.EXACT:
        a = rho * th * th / (4 * n)
        dets = np.real(np.linalg.det(np.eye(n) + a * DD))
        return float(np.sum(dets ** (-nr)))
    dets = np.abs(np.linalg.det(DD))
    scale = np.max(np.sum(np.abs(D) ** 2, axis=(1, 2)))
    if np.any(dets < SINGULAR_TOL * max(scale, 1.0) ** n):
        raise LatticeError("HighSnr form needs invertible differences; the code violates NVD")
    return float(np.sum((4 * n) ** (n * nr) / (rho ** (n * nr) * th ** (2 * n * nr) * dets ** nr)))


def pep_table(code: ShapedCode, n_r: int, c: float, rhos) -> list[dict]:
    diffs = difference_matrices(code)
    n = code.matrices.shape[1]
    rows = []
    for rho in rhos:
        p = PepParams(float(rho), n_r, n, c)
        rows.append({"rho": float(rho),
                     "exact": pep_union_bound(code, p, PepForm.EXACT, diffs),
                     "high_snr": pep_union_bound(code, p, PepForm.HIGH_SNR, diffs),
                     "mindet_form": pep_union_bound(code, p, PepForm.MINDET, diffs)})
    return rows


@dataclass(frozen=True)
class ScalingFit:
    count_slope: float
    energy_slope: float
    radii: tuple[float, ...]
    counts: tuple[int, ...]
    energies: tuple[float, ...]


def spherical_scaling_check(lattice: OrderLattice, radii) -> ScalingFit:
    """Log-log slopes of |L(R)| and sum ||X||^2 against R (expected k and k + 2)."""
    radii = sorted(float(r) for r in radii)
    if len(radii) < 4 or radii[-1] < 4 * radii[0]:
        raise LatticeError("need at least 4 radii spanning a factor of 4")
    stats = [ball_count_energy(lattice, R) for R in radii]
    counts = [c for c, _ in stats]
    energies = [e for _, e in stats]
    if min(counts) == 0:
        raise LatticeError("a radius holds no lattice points; the fit is degenerate")
    lr = np.log(radii)
    a = float(np.polyfit(lr, np.log(counts), 1)[0])
    b = float(np.polyfit(lr, np.log(energies), 1)[0])
    return ScalingFit(a, b, tuple(radii), tuple(counts), tuple(energies))


def lattice_report(lattice: OrderLattice, R: float, construction: str | None = None,
                   d: int | None = None, n: int | None = None) -> dict:
    """Report row; with a construction, delta_formula evaluates the discriminant formula at D = vol^2 (x 2^{d n^2} for reg2)."""
    from .discbounds import mindet_upper_bound

    res = min_det(lattice, R, DetMode.MULTIBLOCK)
    N = lattice.n * lattice.blocks
    delta = res.value / lattice.vol ** (N / lattice.k)
    formula = None
    if construction is not None:
        disc_log = 2 * math.log(lattice.vol)
        if construction == "reg2":
            disc_log += d * n * n * math.log(2)
        formula = math.exp(mindet_upper_bound(disc_log, d, n, construction))
    return {"vol": lattice.vol, "k": lattice.k, "mindet_enumerated": res.value, "mindet_lower": 1.0,
            "delta": delta, "delta_formula": formula, "radius": float(R), "point_count": res.point_count,
            "witness": [int(v) for v in res.witness]}


def dumps_generators(lattice: OrderLattice) -> str:
    return json.dumps(lattice.to_json())
