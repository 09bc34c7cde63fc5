"""Minimum determinant and error bounds for the 2x2 golden-code order."""
from divbound.algebra import build_lattice_reg2, load_algebra_spec, natural_order
from divbound.lattice import lattice_report, min_det, pep_table, shape_and_theta
from divbound.numfields import fixture_path

spec = load_algebra_spec(fixture_path("golden.json"))
lat = build_lattice_reg2(spec, natural_order(spec))
for key, val in lattice_report(lat, 2.0, "reg2", spec.n, spec.d).items():
    print(f"{key:18s} {val}")

code = shape_and_theta(lat, 2.0, lat.T)
c = min_det(lat, 2.0).value
print("\nrho_dB   exact        high_snr     mindet_form")
for db in range(10, 45, 5):
    r = pep_table(code, 1, c, [10 ** (db / 10)])[0]
    print(f"{db:6d}   {r['exact']:.4e}   {r['high_snr']:.4e}   {r['mindet_form']:.4e}")
