"""Discriminant bounds for central division algebras and multiblock lattice codes."""
from .kernels import SignatureField, QuadratureConfig, odlyzko_constant, c_h, c_f, base_term_log
from .primesearch import CaseKind, minimize_case
from .discbounds import (AlgebraSignature, theorem_bound, corollary_bound, naive_bound,
                         center_fixed_min_disc, mindet_upper_bound, delta_bound_formula)
from .numfields import FieldRecord, load_fields, smallest_prime_norms, optimal_center_search

__version__ = "0.1.0"
