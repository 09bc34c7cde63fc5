"""Number-field records, smallest prime-ideal norms, and the optimal-center search."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from sympy import Poly, ZZ, symbols
from sympy.ntheory import primerange
from sympy.polys.galoistools import gf_factor, gf_from_int_poly

_X = symbols("x")
FIXTURE_ENV = "DIVBOUND_FIXTURES"
MAX_SEARCH_BOUND = 1 << 20


class FieldSchemaError(ValueError):
    pass


class PrimeNormError(ValueError):
    pass


@dataclass(frozen=True)
class FieldRecord:
    label: str
    degree: int
    r1: int
    r2: int
    disc: int
    min_poly: tuple[int, ...]  # ascending: c0, c1, ..., 1
    prime_norms: tuple[int, ...] | None = None

    @property
    def totally_complex(self) -> bool:
        return self.r1 == 0

    @classmethod
    def from_json(cls, rec: dict, where: str = "record") -> "FieldRecord":
        def bad(key, why):
            return FieldSchemaError(f"{where} ({rec.get('label', '?')}): field '{key}' {why}")

        for key in ("label", "degree", "signature", "disc", "min_poly"):
            if key not in rec:
                raise bad(key, "is missing")
        try:
            r1, r2 = (int(v) for v in rec["signature"])
        except (TypeError, ValueError):
            raise bad("signature", "must be a pair [r1, r2]") from None
        try:
            disc = int(str(rec["disc"]))
        except ValueError:
            raise bad("disc", "must be an integer (decimal string)") from None
        poly = rec["min_poly"]
        if not isinstance(poly, list) or not all(isinstance(c, int) for c in poly):
            raise bad("min_poly", "must be a list of integers")
        degree = rec["degree"]
        if not isinstance(degree, int):
            raise bad("degree", "must be an integer")
        norms = rec.get("prime_norms")
        if norms is not None and (not isinstance(norms, list) or norms != sorted(norms)):
            raise bad("prime_norms", "must be an ascending list")
        if r1 < 0 or r2 < 0 or r1 + 2 * r2 != degree:
            raise bad("signature", f"r1 + 2 r2 = {r1 + 2 * r2} does not match degree {degree}")
        if len(poly) != degree + 1 or poly[-1] != 1:
            raise bad("min_poly", f"must be monic of degree {degree}")
        if disc == 0:
            raise bad("disc", "must be nonzero")
        if (disc < 0) != (r2 % 2 == 1):
            raise bad("disc", f"sign must be (-1)^r2 = {(-1) ** r2}")
        return cls(str(rec["label"]), degree, r1, r2, disc, tuple(poly),
                   tuple(norms) if norms is not None else None)

    def to_json(self) -> dict:
        out = {"label": self.label, "degree": self.degree, "signature": [self.r1, self.r2],
               "disc": str(self.disc), "min_poly": list(self.min_poly)}
        if self.prime_norms is not None:
            out["prime_norms"] = list(self.prime_norms)
        return out


@dataclass(frozen=True)
class FieldTable:
    fields: list[FieldRecord]
    # every field of this degree/signature with |disc| <= complete_upto is present
    complete_upto: int | None = None


@dataclass(frozen=True)
class PrimeNormList:
    norms: tuple[int, ...]
    complete_upto: int
    source: str = "computed"  # or "record"
    blocked: tuple[int, ...] = ()


def fixture_path(name: str) -> Path:
    root = os.environ.get(FIXTURE_ENV)
    if root:
        return Path(root) / name
    return Path(__file__).parent / "data" / name


def load_field_table(path) -> FieldTable:
    with open(path) as fh:
        raw = json.load(fh)
    complete = None
    if isinstance(raw, dict):
        complete = raw.get("complete_upto")
        raw = raw.get("fields")
    if not isinstance(raw, list):
        raise FieldSchemaError(f"{path}: expected a list of field records")
    fields = [FieldRecord.from_json(rec, f"{path}[{i}]") for i, rec in enumerate(raw)]
    return FieldTable(fields, int(complete) if complete is not None else None)


def load_fields(path) -> list[FieldRecord]:
    return load_field_table(path).fields


def _poly(field: FieldRecord) -> Poly:
    return Poly(list(reversed(field.min_poly)), _X, domain=ZZ)


@lru_cache(maxsize=256)
def _index_squared(field: FieldRecord) -> int:
    dpoly = int(_poly(field).discriminant())
    q, r = divmod(dpoly, field.disc)
    if r or q <= 0 or math.isqrt(q) ** 2 != q:
        raise PrimeNormError(
            f"{field.label}: disc(min_poly) = {dpoly} is not a square multiple of disc {field.disc}")
    return q


def splitting_type(field: FieldRecord, p: int) -> list[tuple[int, int]]:
    """(residue degree, multiplicity) per irreducible factor of min_poly mod p.

    Only meaningful for primes not dividing the index [O_K : Z[theta]].
    """
    f = gf_from_int_poly(list(reversed(field.min_poly)), p)
    _, facs = gf_factor(f, p, ZZ)
    return sorted((len(g) - 1, e) for g, e in facs)


def smallest_prime_norms(field: FieldRecord, how_many: int = 2,
                         search_bound: int = 100) -> PrimeNormList:
    """Norms of the ``how_many`` smallest prime ideals, by factoring min_poly mod p."""
    if how_many < 1:
        raise PrimeNormError("how_many must be positive")
    isq = _index_squared(field)
    bound = max(int(search_bound), 2)
    while True:
        norms, blocked = [], []
        for p in primerange(2, bound + 1):
            if isq % p == 0:
                blocked.append(int(p))
                continue
            st = splitting_type(field, int(p))
            if sum(f * e for f, e in st) != field.degree:
                raise PrimeNormError(f"{field.label}: factorization mod {p} lost degree")
            norms.extend(int(p) ** f for f, _ in st)
        norms.sort()
        if len(norms) >= how_many and norms[how_many - 1] <= bound:
            cut = norms[how_many - 1]
            blocking = [p for p in blocked if p <= cut]
            if not blocking:
                return PrimeNormList(tuple(norms[:how_many]), bound, "computed", tuple(blocked))
            if field.prime_norms is not None and len(field.prime_norms) >= how_many:
                return PrimeNormList(tuple(field.prime_norms[:how_many]), field.prime_norms[how_many - 1],
                                     "record", tuple(blocking))
            raise PrimeNormError(
                f"{field.label}: index-divisor primes {blocking} block certification "
                "of the smallest norms and the record carries no prime_norms")
        if bound >= MAX_SEARCH_BOUND:
            raise PrimeNormError(f"{field.label}: fewer than {how_many} norms up to {bound}")
        bound *= 2


@dataclass(frozen=True)
class RankedCenter:
    field: FieldRecord
    norms: tuple[int, int]
    disc: "ExactDisc"  # noqa: F821


@dataclass(frozen=True)
class CenterSearch:
    n: int
    ranking: list[RankedCenter]
    # any better center must have |disc| below this
    cutoff: float
    complete: bool
    complete_upto: int | None = None

    @property
    def winner(self) -> RankedCenter:
        return self.ranking[0]


def optimal_center_search(fields, n: int, complete_upto: int | None = None) -> CenterSearch:
    """Rank totally complex centers by the minimal Z-discriminant of a degree-n algebra over them."""
    from .discbounds import center_fixed_min_disc

    if isinstance(fields, FieldTable):
        complete_upto = fields.complete_upto if complete_upto is None else complete_upto
        fields = fields.fields
    fields = list(fields)
    if not fields:
        raise ValueError("optimal_center_search needs at least one field")
    if n < 2:
        raise ValueError(f"algebra degree must be >= 2, got {n}")
    degrees = {f.degree for f in fields}
    if len(degrees) != 1 or any(not f.totally_complex for f in fields):
        raise ValueError("all fields must be totally complex of one degree")

    ranked = []
    for f in fields:
        ed = center_fixed_min_disc(f, n)
        ranked.append(RankedCenter(f, ed.norms, ed))
    ranked.sort(key=lambda rc: (rc.disc.value, abs(rc.field.disc), rc.field.label))
    best = ranked[0]
    cutoff = (best.norms[0] * best.norms[1]) ** (1 - 1 / n) * abs(best.field.disc)
    complete = complete_upto is not None and complete_upto >= cutoff
    return CenterSearch(n, ranked, cutoff, complete, complete_upto)


def ranking_csv(search: CenterSearch, top: int | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "label", "disc_K", "p1", "p2", "n", "disc_order", "disc_order_log"])
    for i, rc in enumerate(search.ranking[:top] if top else search.ranking, 1):
        w.writerow([i, rc.field.label, rc.field.disc, rc.norms[0], rc.norms[1], search.n,
                    rc.disc.value, f"{rc.disc.log:.12g}"])
    return buf.getvalue()
