from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochres.bitstream import (
    BitStream,
    b2s,
    b2s_unipolar,
    from_prob,
    make_delayed_copies,
    mux_expected,
    s2b_bipolar,
    s2b_unipolar,
    sc_bernstein,
    sc_mul,
    sc_mux,
    sc_neg,
    to_prob,
    transition_density,
    xnor_expected,
)
from stochres.lfsr import Lfsr

bits_strategy = st.lists(st.integers(0, 1), min_size=1, max_size=64).map(BitStream)


def gen(seed):
    return Lfsr(seed)


# --- value mappings ---------------------------------------------------------

def test_to_prob_worked_example():
    assert to_prob(-0.5) == 0.25


def test_to_prob_endpoints():
    assert to_prob(0.0) == 0.5
    assert to_prob(1.0) == 1.0


def test_from_prob_examples():
    assert from_prob(0.25) == -0.5
    assert from_prob(0.5) == 0.0
    assert from_prob(0.0) == -1.0


def test_round_trip_identity():
    for q in np.linspace(-1, 1, 21):
        assert to_prob(from_prob(to_prob(q))) == pytest.approx(to_prob(q), abs=1e-15)


def test_range_validation():
    with pytest.raises(ValueError):
        to_prob(1.5)
    with pytest.raises(ValueError):
        from_prob(-0.1)


# --- streams and converters -------------------------------------------------

def test_bitstream_basics():
    s = BitStream.from01("00101000")
    assert len(s) == 8
    assert s.to01() == "00101000"
    assert s.ones_fraction() == 0.25
    with pytest.raises(ValueError):
        BitStream([])
    with pytest.raises(ValueError):
        BitStream([0, 2])


def test_b2s_endpoints_exact():
    assert np.all(b2s(1.0, gen(3), 200).bits == 1)
    assert np.all(b2s(-1.0, gen(3), 200).bits == 0)


def test_b2s_expected_ones_fraction():
    s = b2s(-0.5, gen(17), 8192)
    assert s.ones_fraction() == pytest.approx(0.25, abs=5 / np.sqrt(8192))


def test_b2s_advances_generator():
    g = gen(5)
    b2s(0.0, g, 100)
    assert g.state != 5


def test_b2s_unipolar_endpoints():
    assert np.all(b2s_unipolar(0.0, gen(9), 100).bits == 0)
    assert np.all(b2s_unipolar(1.0, gen(9), 100).bits == 1)


def test_s2b_bipolar_worked_example():
    assert s2b_bipolar(BitStream.from01("00101000")) == -0.5
    assert s2b_bipolar(BitStream.from01("11111111")) == 1.0
    assert s2b_bipolar(BitStream.from01("0101")) == 0.0


def test_s2b_unipolar_examples():
    assert s2b_unipolar(BitStream.from01("00101000")) == 0.25
    assert s2b_unipolar(BitStream.from01("0000")) == 0.0
    assert s2b_unipolar(BitStream.from01("0101")) == 0.5


def test_roundtrip_concentration():
    # q grid, 100 seeded trials each at L=4096: within 5/sqrt(L) in >=95%
    length = 4096
    tol = 5 / np.sqrt(length)
    fails = 0
    trials = 0
    for qi, q in enumerate(np.linspace(-1, 1, 21)):
        for t in range(100):
            s = b2s(float(q), gen(qi * 100 + t + 1), length)
            trials += 1
            fails += abs(s2b_bipolar(s) - q) > tol
    assert fails / trials <= 0.05


# --- gates -------------------------------------------------------------------

def test_sc_mul_identity_and_negation():
    b = b2s(0.3, gen(21), 256)
    ones = BitStream(np.ones(256, dtype=np.uint8))
    zeros = BitStream(np.zeros(256, dtype=np.uint8))
    assert sc_mul(ones, b) == b
    assert sc_mul(zeros, b) == sc_neg(b)


def test_sc_mul_statistical_product():
    a = b2s(0.5, gen(100), 4096)
    b = b2s(-0.5, gen(200), 4096)
    assert s2b_bipolar(sc_mul(a, b)) == pytest.approx(-0.25, abs=0.05)


def test_sc_mul_length_mismatch():
    with pytest.raises(ValueError):
        sc_mul(BitStream([1, 0]), BitStream([1]))


def test_xnor_exhaustive_expectation():
    # weighted enumeration over all 4-bit stream pairs: the expected decoded
    # product equals (2 p_a - 1)(2 p_b - 1) exactly
    for p_a, p_b in [(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)]:
        expect = 0.0
        for a_bits in product((0, 1), repeat=4):
            wa = np.prod([p_a if x else 1 - p_a for x in a_bits])
            for b_bits in product((0, 1), repeat=4):
                wb = np.prod([p_b if x else 1 - p_b for x in b_bits])
                expect += wa * wb * s2b_bipolar(sc_mul(BitStream(a_bits), BitStream(b_bits)))
        assert expect == pytest.approx((2 * p_a - 1) * (2 * p_b - 1), abs=1e-12)
        assert 2 * xnor_expected(p_a, p_b) - 1 == pytest.approx((2 * p_a - 1) * (2 * p_b - 1), abs=1e-15)


def test_sc_neg_examples():
    assert sc_neg(BitStream.from01("0101")).to01() == "1010"
    ones = BitStream(np.ones(8, dtype=np.uint8))
    assert np.all(sc_neg(ones).bits == 0)


@given(bits_strategy)
@settings(max_examples=60, deadline=None)
def test_sc_neg_involution_and_exact_negation(s):
    assert sc_neg(sc_neg(s)) == s
    assert s2b_bipolar(sc_neg(s)) == -s2b_bipolar(s)


def test_sc_mux_select_all_ones():
    a = b2s(0.3, gen(31), 128)
    b = b2s(-0.8, gen(37), 128)
    sel = BitStream(np.ones(128, dtype=np.uint8))
    assert sc_mux(sel, a, b) == a


def test_sc_mux_balanced_symmetry():
    sel = b2s_unipolar(0.5, gen(41), 8192)
    a = BitStream(np.ones(8192, dtype=np.uint8))
    b = BitStream(np.zeros(8192, dtype=np.uint8))
    assert s2b_bipolar(sc_mux(sel, a, b)) == pytest.approx(0.0, abs=0.06)


def test_sc_mux_statistical_mix():
    sel = b2s_unipolar(0.6, gen(43), 4096)
    a = b2s(0.5, gen(47), 4096)
    b = b2s(-0.5, gen(53), 4096)
    assert s2b_bipolar(sc_mux(sel, a, b)) == pytest.approx(0.1, abs=0.05)


def test_mux_exhaustive_expectation():
    for p_s, p_a, p_b in [(0.3, 0.8, 0.1), (0.5, 0.5, 0.5)]:
        expect = 0.0
        for s_bits in product((0, 1), repeat=3):
            ws = np.prod([p_s if x else 1 - p_s for x in s_bits])
            for a_bits in product((0, 1), repeat=3):
                wa = np.prod([p_a if x else 1 - p_a for x in a_bits])
                for b_bits in product((0, 1), repeat=3):
                    wb = np.prod([p_b if x else 1 - p_b for x in b_bits])
                    out = sc_mux(BitStream(s_bits), BitStream(a_bits), BitStream(b_bits))
                    expect += ws * wa * wb * s2b_unipolar(out)
        assert expect == pytest.approx(mux_expected(p_s, p_a, p_b), abs=1e-12)


# --- delayed copies and the polynomial node ----------------------------------

def test_delayed_copies_identity():
    a = b2s(0.2, gen(61), 64)
    assert make_delayed_copies(a, 1) == [a]


def test_delayed_copy_shift():
    a = BitStream.from01("1100")
    copies = make_delayed_copies(a, 2, d=1)
    assert copies[0] == a
    assert copies[1].to01() == "0110"  # wraps from its own tail


def test_delayed_copies_with_history():
    a = BitStream.from01("1100")
    hist = BitStream.from01("0011")
    copies = make_delayed_copies(a, 3, d=1, history=hist)
    assert copies[1].to01() == "1110"
    assert copies[2].to01() == "1111"
    with pytest.raises(ValueError):
        make_delayed_copies(a, 5, d=2, history=hist)


def test_delayed_copies_decorrelated():
    a = b2s(0.0, gen(67), 4096)
    c0, c1 = make_delayed_copies(a, 2, d=1)
    x = c0.bits.astype(float)
    y = c1.bits.astype(float)
    rho = np.corrcoef(x, y)[0, 1]
    assert abs(rho) <= 0.05


def test_bernstein_constant_coefficients():
    length = 256
    c = b2s_unipolar(0.375, gen(71), length)
    copies = [b2s_unipolar(0.5, gen(73 + k), length) for k in range(4)]
    out = sc_bernstein(copies, [c] * 5)
    assert out == c  # identical coefficient streams select the same bits


def test_bernstein_identity_by_enumeration():
    # beta_k = k/n reproduces the argument: enumerate all copy-bit patterns
    # at n=3 and weight them by p
    n = 3
    beta = [k / n for k in range(n + 1)]
    for p in np.linspace(0.1, 0.9, 9):
        expect = 0.0
        for pattern in product((0, 1), repeat=n):
            w = np.prod([p if x else 1 - p for x in pattern])
            expect += w * beta[sum(pattern)]
        assert expect == pytest.approx(p, abs=1e-12)


def test_bernstein_statistical_identity():
    length = 4096
    n = 8
    p = 0.37
    copies = [b2s_unipolar(p, gen(600 + k), length) for k in range(n)]
    coeffs = [b2s_unipolar(k / n, gen(700 + k), length) for k in range(n + 1)]
    out = sc_bernstein(copies, coeffs)
    assert s2b_unipolar(out) == pytest.approx(p, abs=5 / np.sqrt(length))


def test_bernstein_zero_selector():
    length = 64
    zeros = BitStream(np.zeros(length, dtype=np.uint8))
    coeffs = [b2s_unipolar(k / 3, gen(800 + k), length) for k in range(4)]
    out = sc_bernstein([zeros, zeros, zeros], coeffs)
    assert out == coeffs[0]


def test_bernstein_argument_validation():
    s = BitStream.from01("0101")
    with pytest.raises(ValueError):
        sc_bernstein([s], [s])
    with pytest.raises(ValueError):
        sc_bernstein([s, BitStream.from01("01")], [s, s, s])


# --- diagnostics --------------------------------------------------------------

def test_transition_density_alternating():
    assert transition_density(BitStream.from01("0101010101")) == 1.0


def test_transition_density_single_step():
    assert transition_density(BitStream.from01("0000011111")) == pytest.approx(1 / 9)


def test_transition_density_constant():
    assert transition_density(BitStream.from01("1111")) == 0.0
    with pytest.raises(ValueError):
        transition_density(BitStream.from01("1"))


def test_streams_deterministic():
    s1 = b2s(0.123, gen(90), 512)
    s2 = b2s(0.123, gen(90), 512)
    assert s1 == s2
