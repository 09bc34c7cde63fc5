"""Lower bounds on order discriminants for a few algebra signatures."""
from divbound.discbounds import AlgebraSignature, BoundError, corollary_bound, naive_bound, theorem_bound
from divbound.kernels import SignatureField, odlyzko_constant

print("per-degree Odlyzko roots, totally complex fields")
for d in (2, 4, 8, 10, 20, 40):
    print(f"  d={d:3d}  {odlyzko_constant(SignatureField.totally_complex(d)).per_degree_root:.4f}")



def _log10_or_na(fn):
    try:
        return f"{fn().bound_log10:9.3f}"
    except BoundError:
        return "      n/a"


print("\nalgebra bounds (log10 of the discriminant bound)")
for sig, y0 in ((AlgebraSignature(0, 0, 2, 2), 2.0), (AlgebraSignature(0, 0, 4, 2), 2.0),
                (AlgebraSignature(1, 1, 1, 6), 2.0), (AlgebraSignature(0, 0, 4, 3), 2.0)):
    th = theorem_bound(sig, y0)
    co = _log10_or_na(lambda: corollary_bound(sig, y0))
    nv = _log10_or_na(lambda: naive_bound(sig.d, sig.n))
    print(f"  {sig}: pair ({th.pair.p1},{th.pair.p2})  theorem {th.bound_log10:9.3f}  "
          f"corollary {co}  naive {nv}")
