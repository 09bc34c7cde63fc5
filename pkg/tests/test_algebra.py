import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divbound.algebra import (AlgebraError, CyclicAlgebraSpec, build_lattice_reg1, build_lattice_reg2,
                              coordinates, embeddings, left_regular_matrix, load_algebra_spec,
                              multiblock_diag, natural_order)
from divbound.lattice import DetMode, min_det, normalized_min_det
from divbound.numfields import FieldRecord, fixture_path

GOLDEN = load_algebra_spec(fixture_path("golden.json"))
EISENSTEIN = FieldRecord("2.0.3.1", 2, 0, 1, -3, (1, 1, 1))
# E = Q(zeta_9) = K(t), t^3 = omega, sigma(t) = omega t
NONIC = CyclicAlgebraSpec(EISENSTEIN, [[0, -1], [0, 0], [0, 0], [1, 0]], 1, [2, 0], 3)
GAUSS = FieldRecord("2.0.4.1", 2, 0, 1, -4, (1, 0, 1))
TRIVIAL = CyclicAlgebraSpec(GAUSS, [[0, -1], [1, 0]], 0, [1, 0], 1)


def _mat_mul(spec, A, B):
    E, n = spec.E, spec.n
    return [[_sum(E, [E.mul(A[i][k], B[k][j]) for k in range(n)]) for j in range(n)] for i in range(n)]


def _sum(E, xs):
    out = E.zero
    for x in xs:
        out = E.add(out, x)
    return out


def _element(spec, ints):
    size = spec.n * spec.n * spec.d
    return spec.unflatten([Fraction(v) for v in ints[:size]])


coeffs = st.lists(st.integers(-3, 3), min_size=18, max_size=18)


@settings(max_examples=50, deadline=None)
@given(coeffs, coeffs)
def test_psi_is_multiplicative_golden(a, b):
    x, y = _element(GOLDEN, a), _element(GOLDEN, b)
    assert left_regular_matrix(GOLDEN, GOLDEN.mul(x, y)) == _mat_mul(
        GOLDEN, left_regular_matrix(GOLDEN, x), left_regular_matrix(GOLDEN, y))


@settings(max_examples=50, deadline=None)
@given(coeffs, coeffs)
def test_psi_is_multiplicative_degree_three(a, b):
    x, y = _element(NONIC, a), _element(NONIC, b)
    assert left_regular_matrix(NONIC, NONIC.mul(x, y)) == _mat_mul(
        NONIC, left_regular_matrix(NONIC, x), left_regular_matrix(NONIC, y))


@settings(max_examples=30, deadline=None)
@given(coeffs, coeffs, coeffs)
def test_algebra_multiplication_is_associative(a, b, c):
    x, y, z = (_element(NONIC, v) for v in (a, b, c))
    assert NONIC.mul(NONIC.mul(x, y), z) == NONIC.mul(x, NONIC.mul(y, z))


@pytest.mark.parametrize("spec", [GOLDEN, NONIC])
def test_u_power_is_gamma(spec):
    p = spec.one()
    for _ in range(spec.n):
        p = spec.mul(p, spec.u())
    gamma = spec.E.from_k(spec.gamma_k)
    assert p == (gamma,) + (spec.E.zero,) * (spec.n - 1)


@pytest.mark.parametrize("spec", [GOLDEN, NONIC])
def test_det_of_u_block(spec):
    es = embeddings(spec, "reg2")
    U = np.array([[spec.E.embed(e, es.kappa[0], es.troot[0]) for e in row]
                  for row in left_regular_matrix(spec, spec.u())])
    gamma = spec.K.embed(spec.gamma_k, es.kappa[0])
    assert np.linalg.det(U) == pytest.approx((-1) ** (spec.n - 1) * gamma, abs=1e-12)


@pytest.mark.parametrize("spec", [GOLDEN, NONIC])
def test_sigma_is_automorphism_of_order_n(spec):
    E, t = spec.E, spec.E.t
    assert spec.sigma(t, spec.n) == t
    assert all(spec.sigma(t, k) != t for k in range(1, spec.n))
    assert E.is_zero(E.eval_poly(E.g, spec.sigma_t))


def test_golden_sigma():
    assert GOLDEN.sigma_t == ((Fraction(1), Fraction(0)), (Fraction(-1), Fraction(0)))


def test_u_commutation():
    # elements are written sum u^j x_j, so x u = u sigma(x)
    Z = NONIC.E.zero
    x = NONIC.e_elem([[1, 2], [0, -1], [3, 1]])
    assert NONIC.mul((x, Z, Z), NONIC.u()) == (Z, NONIC.sigma(x), Z)


def test_golden_order_closed():
    order = natural_order(GOLDEN)
    assert len(order) == 8
    coords = coordinates(GOLDEN, order)
    assert coords(GOLDEN.one()) == [1, 0, 0, 0, 0, 0, 0, 0]


def test_non_integral_gamma_rejected():
    raw = GOLDEN.to_json()
    raw["gamma"] = [Fraction(1, 2), 0]
    with pytest.raises(AlgebraError, match="algebraic integer"):
        natural_order(CyclicAlgebraSpec.from_json(raw))


def test_spec_schema_errors(tmp_path):
    raw = GOLDEN.to_json()
    del raw["gamma"]
    with pytest.raises(AlgebraError, match="gamma"):
        CyclicAlgebraSpec.from_json(raw)
    bad = GOLDEN.to_json()
    bad["n"] = 3
    with pytest.raises(AlgebraError):
        CyclicAlgebraSpec.from_json(bad)
    p = tmp_path / "spec.json"
    p.write_text(json.dumps(GOLDEN.to_json()))
    again = load_algebra_spec(p)
    assert again.to_json() == GOLDEN.to_json()


def test_non_cyclic_sigma_index_rejected():
    raw = GOLDEN.to_json()
    raw["sigma_root_index"] = 0
    with pytest.raises(AlgebraError):
        CyclicAlgebraSpec.from_json(raw).sigma_t


def test_golden_volumes():
    order = natural_order(GOLDEN)
    reg2 = build_lattice_reg2(GOLDEN, order)
    reg1 = build_lattice_reg1(GOLDEN, order)
    assert reg2.vol == pytest.approx(25, rel=1e-10)
    assert reg1.vol == pytest.approx(400, rel=1e-10)
    # reg1 stacks both conjugates: the real dimension doubles
    assert reg1.vol**2 / (reg2.vol**2 * 2**8) == pytest.approx(1, rel=1e-10)


def test_golden_mindet_and_delta():
    reg2 = build_lattice_reg2(GOLDEN, natural_order(GOLDEN))
    res = min_det(reg2, 2.0)
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert not res.nvd_violated
    assert normalized_min_det(reg2, 2.0) == pytest.approx(1 / math.sqrt(5), rel=1e-9)


def test_identity_attains_golden_mindet():
    reg2 = build_lattice_reg2(GOLDEN, natural_order(GOLDEN))
    one = reg2.matrices(np.eye(1, len(reg2.basis), 0))[0]
    assert abs(np.linalg.det(one)) == pytest.approx(min_det(reg2, 2.0).value, abs=1e-9)


def test_commutative_case():
    order = natural_order(TRIVIAL)
    reg1 = build_lattice_reg1(TRIVIAL, order)
    np.testing.assert_allclose(reg1.gram, 2 * np.eye(2), atol=1e-12)
    assert reg1.vol == pytest.approx(2)
    assert normalized_min_det(reg1, 2.0) == pytest.approx(0.5)
    reg2 = build_lattice_reg2(TRIVIAL, order)
    assert reg2.vol == pytest.approx(1)
    assert normalized_min_det(reg2, 2.0) == pytest.approx(1.0)


def test_reg2_volume_independent_of_conjugate_choice():
    order = natural_order(GOLDEN)
    es = embeddings(GOLDEN, "reg2")
    swapped = es.conjugated(0)
    a = build_lattice_reg2(GOLDEN, order, es)
    b = build_lattice_reg2(GOLDEN, order, swapped)
    assert a.vol == pytest.approx(b.vol, rel=1e-10)
    assert min_det(a, 2.0).value == pytest.approx(min_det(b, 2.0).value, abs=1e-9)


def test_reg1_rejects_wrong_embedding_set():
    order = natural_order(GOLDEN)
    with pytest.raises(AlgebraError):
        build_lattice_reg1(GOLDEN, order, embeddings(GOLDEN, "reg2"))


def test_reg2_needs_complex_center():
    real = FieldRecord("2.2.5.1", 2, 2, 0, 5, (-1, -1, 1))
    spec = CyclicAlgebraSpec(real, [[0, -1], [1, 0]], 0, [1, 0], 1)
    with pytest.raises(AlgebraError):
        embeddings(spec, "reg2")


def test_multiblock_diag_matches_oneshot_determinant():
    reg2 = build_lattice_reg2(NONIC, natural_order(NONIC))
    sq = multiblock_diag(reg2)
    assert sq.T == reg2.n * reg2.blocks
    a = min_det(reg2, 2.5, DetMode.MULTIBLOCK).value
    b = min_det(sq, 2.5, DetMode.ONE_SHOT).value
    assert a == pytest.approx(b, rel=1e-9)
