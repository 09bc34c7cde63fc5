"""Best totally complex quartic centers for degree-n division algebras."""
from divbound.numfields import fixture_path, load_field_table, optimal_center_search

table = load_field_table(fixture_path("deg4_totally_complex.json"))
print(f"{len(table.fields)} fields, complete up to |d_K| <= {table.complete_upto}")
for n in range(2, 11):
    res = optimal_center_search(table, n)
    w = res.winner
    print(f"n={n:2d}  {w.field.label:12s} norms {w.norms}  log disc {w.disc.log:10.3f}  "
          f"{'complete' if res.complete else 'INCOMPLETE'}")
