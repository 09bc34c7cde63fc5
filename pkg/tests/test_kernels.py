import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divbound.kernels import (KernelError, QuadratureConfig, SignatureField, base_term_log, c_f,
                              c_h, c_h_array, kernel_f, kernel_f_array, kernel_h,
                              odlyzko_constant, one_minus_f, poitou_I)

# values from a 120-digit mpmath evaluation of the closed forms (tests/oracles.py)
F_ORACLE = {
    1e-4: 0.99999999800000000171,
    0.005: 0.99999500001071427249,
    0.3: 0.9821382417995999393,
    1.0: 0.81632315856886474144,
    2.5: 0.24945588351586032045,
    4.0: 0.0075834596776066511237,
    7.7: 1.6053123147722192762e-6,
}
CH_ORACLE = {
    (2, 0.1): 1.9893815533213037944,
    (2, 2.0): 1.0480684893066175302,
    (41, 0.1): 0.26955266809691233406,
    (41, 2.0): 0.0,
    (37, 0.1): 0.29477155970603671512,
    (9, 2.0): 0.086623201623711953989,
    (11, 2.0): 0.043689816307578629604,
    (7, 2.0): 0.17254954045355737292,
    (13, 0.1): 0.67786718668781171007,
    (1000003, 0.1): 0.0,
}
CF_ORACLE = {
    (2, 0.1): 1.9893815744662479481,
    (3, 2.0): 0.70958131998945821804,
    (5, 0.5): 0.9068534535875315532,
}
# (r1, d, y) -> (I, base term)
I_ORACLE = {
    (0, 8, 1.7): (5.2168708295785160887, 13.866268686531729062),
    (0, 2, 15.0): (3.1829576670232672337, 1.0867483922510463629),
    (2, 4, 0.5): (3.5867231329374772331, 0.1833174629657383884),
    (1, 3, 3.0): (4.7447536633864729215, 1.2268475980638751978),
    (0, 40, 0.3): (7.9896005815168179528, 102.57422659040698448),
}


@pytest.mark.parametrize("x,expected", sorted(F_ORACLE.items()))
def test_kernel_f_matches_oracle(x, expected):
    assert kernel_f(x) == pytest.approx(expected, rel=1e-12, abs=1e-16)


def test_kernel_f_series_branch_is_continuous():
    # the closed form loses about 1e-11 to cancellation just above the switch
    eps = 1e-9
    assert kernel_f(1e-2 - eps) == pytest.approx(kernel_f(1e-2 + eps), rel=1e-10)
    assert kernel_f(0.0) == 1.0


def test_kernel_h_truncates_at_four():
    assert kernel_h(4.0) == kernel_f(4.0)
    assert kernel_h(4.0 + 1e-12) == 0.0


def test_kernel_rejects_negative():
    with pytest.raises(KernelError):
        kernel_f(-1.0)


def test_kernel_array_agrees_with_scalar():
    xs = np.concatenate([np.linspace(0, 0.02, 41), np.linspace(0.02, 20, 400)])
    np.testing.assert_allclose(kernel_f_array(xs), [kernel_f(x) for x in xs], rtol=1e-13, atol=1e-18)


@given(st.floats(min_value=0.0, max_value=50.0))
def test_kernel_bounds(x):
    f, h = kernel_f(x), kernel_h(x)
    assert 0.0 <= h <= f <= 1.0


ONE_MINUS_F_ORACLE = {
    1e-6: 1.9999999999998285714e-13,
    1e-3: 1.999999828571437037e-7,
    0.25: 0.012433241975385007967,
    0.49: 0.047043375052653490964,
}


@pytest.mark.parametrize("x,expected", sorted(ONE_MINUS_F_ORACLE.items()))
def test_one_minus_f_matches_oracle(x, expected):
    assert one_minus_f(x) == pytest.approx(expected, rel=1e-14)


@given(st.floats(min_value=1e-2, max_value=2.0))
def test_one_minus_f_consistent(x):
    # the closed form of f carries a cancellation error of order eps / x^2
    assert one_minus_f(x) == pytest.approx(1.0 - kernel_f(x), abs=2e-15 / x**2)
    assert one_minus_f(x) >= 0.0


@pytest.mark.parametrize("key,expected", sorted(CH_ORACLE.items()))
def test_c_h_matches_oracle(key, expected):
    assert c_h(*key) == pytest.approx(expected, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("key,expected", sorted(CF_ORACLE.items()))
def test_c_f_matches_oracle(key, expected):
    assert c_f(*key) == pytest.approx(expected, rel=1e-11)


def test_c_h_array_agrees():
    xs = np.array([2, 3, 4, 5, 7, 8, 9, 11, 41, 10**6 + 3])
    for y in (0.1, 2.0):
        np.testing.assert_allclose(c_h_array(xs, y), [c_h(x, y) for x in xs], rtol=1e-14)


@pytest.mark.parametrize("bad", [1.0, 0.5])
def test_c_h_rejects_small_base(bad):
    with pytest.raises(KernelError):
        c_h(bad, 1.0)


@given(st.integers(min_value=2, max_value=10**6), st.floats(min_value=0.01, max_value=5.0))
def test_correction_ordering(x, y):
    ch = c_h(x, y)
    assert 0.0 <= ch <= c_f(x, y) + 1e-12


@given(st.integers(min_value=2, max_value=10**4), st.floats(min_value=0.01, max_value=4.0),
       st.floats(min_value=1.01, max_value=3.0))
def test_c_h_nonincreasing_in_y(x, y, factor):
    # fewer terms survive the truncation and f decreases on [0, 4]
    assert c_h(x, y * factor) <= c_h(x, y) + 1e-12


@pytest.mark.parametrize("key,expected", sorted(I_ORACLE.items()))
def test_poitou_matches_oracle(key, expected):
    r1, d, y = key
    sig = SignatureField.from_degree(r1, d)
    assert poitou_I(sig, y) == pytest.approx(expected[0], rel=1e-10)
    assert base_term_log(sig, y) == pytest.approx(expected[1], rel=1e-10, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.05, max_value=10.0))
def test_poitou_linear_in_signature(y):
    a2 = poitou_I(SignatureField(0, 1), y)  # d = 2
    r1 = poitou_I(SignatureField(1, 0), y)  # d = 1, r1 = 1
    mixed = poitou_I(SignatureField(2, 1), y)  # d = 4, r1 = 2
    # I = d A + r1 B: A = a2/2, B = r1 - A
    A = a2 / 2
    B = r1 - A
    assert mixed == pytest.approx(4 * A + 2 * B, rel=1e-9)


def test_precision_invariance():
    sig = SignatureField(0, 4)
    cfg = QuadratureConfig()
    assert poitou_I(sig, 1.7, cfg.refined()) == pytest.approx(poitou_I(sig, 1.7, cfg), rel=1e-9)


def test_signature_validation():
    with pytest.raises(KernelError):
        SignatureField.totally_complex(5)
    with pytest.raises(KernelError):
        SignatureField.from_degree(1, 4)
    assert SignatureField.from_degree(2, 6).r2 == 2


# per-degree Odlyzko roots for totally complex fields, recomputed independently (mpmath)
@pytest.mark.parametrize("d,root,y_opt", [(2, 1.722, 15.57), (4, 3.2546, 4.70), (8, 5.6594, 1.724),
                                          (10, 6.6003, 1.303)])
def test_odlyzko_roots(d, root, y_opt):
    oc = odlyzko_constant(SignatureField.totally_complex(d))
    assert oc.per_degree_root == pytest.approx(root, abs=2e-3)
    assert oc.y_opt == pytest.approx(y_opt, rel=2e-2)


def test_odlyzko_is_a_maximum():
    sig = SignatureField.totally_complex(8)
    oc = odlyzko_constant(sig)
    for f in (0.9, 1.1):
        assert base_term_log(sig, oc.y_opt * f) < oc.value_log


def test_odlyzko_roots_increase_with_degree():
    roots = [odlyzko_constant(SignatureField.totally_complex(d)).per_degree_root for d in (2, 4, 8, 16, 40)]
    assert roots == sorted(roots)
    assert roots[-1] < 22.4
