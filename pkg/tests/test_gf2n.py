"""Field arithmetic tests, including an independent re-verification of
every frozen polynomial's irreducibility (deg-N f over GF(2) is
irreducible iff x^{2^N} = x mod f and gcd(x^{2^{N/p}} + x, f) = 1 for
every prime p dividing N)."""

import random

import numpy as np
import pytest

from seqkey.errors import ParameterError
from seqkey.gf2n import POLY_TAPS, gf_mul, gf_mul_vec, gf_pow, modulus


def _clmul(a, b):
    r = 0
    shift = 0
    while b:
        if b & 1:
            r ^= a << shift
        b >>= 1
        shift += 1
    return r


def _pmod(a, f):
    df = f.bit_length() - 1
    while a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def _pgcd(a, b):
    while b:
        a, b = b, _pmod(a, b)
    return a


def _primes(n):
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


class TestPolynomialTable:
    def test_covers_required_range(self):
        assert sorted(POLY_TAPS) == list(range(8, 65))

    def test_taps_well_formed(self):
        for n, taps in POLY_TAPS.items():
            assert len(taps) in (1, 3)
            assert all(0 < k < n for k in taps)
            assert list(taps) == sorted(taps, reverse=True)

    @pytest.mark.parametrize("n", sorted(POLY_TAPS))
    def test_irreducible(self, n):
        f = modulus(n)
        x = 2
        chain = [x]
        for _ in range(n):
            chain.append(_pmod(_clmul(chain[-1], chain[-1]), f))
        assert chain[n] == x  # x^{2^n} = x in the field
        for p in _primes(n):
            assert _pgcd(chain[n // p] ^ x, f) == 1

    def test_aes_field_sanity(self):
        # 0x53 and 0xCA are multiplicative inverses in the (4,3,1) field
        assert POLY_TAPS[8] == (4, 3, 1)
        assert gf_mul(0x53, 0xCA, 8) == 1


class TestScalarMul:
    def test_identity_and_zero(self):
        for n in (8, 12, 33, 64):
            v = (1 << n) - 3
            assert gf_mul(v, 1, n) == v
            assert gf_mul(1, v, n) == v
            assert gf_mul(v, 0, n) == 0

    def test_ring_axioms_random(self):
        rng = random.Random(5)
        for n in (8, 12, 16, 29, 47, 64):
            for _ in range(20):
                a, b, c = (rng.getrandbits(n) for _ in range(3))
                assert gf_mul(a, b, n) == gf_mul(b, a, n)
                assert gf_mul(gf_mul(a, b, n), c, n) == gf_mul(
                    a, gf_mul(b, c, n), n)
                assert gf_mul(a ^ b, c, n) == gf_mul(a, c, n) ^ gf_mul(
                    b, c, n)

    def test_no_zero_divisors(self):
        rng = random.Random(6)
        for n in (8, 12, 64):
            for _ in range(50):
                a = 1 + rng.getrandbits(n - 1)
                b = 1 + rng.getrandbits(n - 1)
                assert gf_mul(a, b, n) != 0

    def test_multiplicative_order_divides_group(self):
        # a^{2^n - 1} = 1 for every nonzero a; spot-check a few fields
        rng = np.random.default_rng(7)
        for n in (8, 12, 16, 24):
            for _ in range(5):
                a = int(rng.integers(1, 1 << n))
                assert gf_pow(a, (1 << n) - 1, n) == 1

    def test_domain_errors(self):
        with pytest.raises(ParameterError):
            gf_mul(1, 1, 7)
        with pytest.raises(ParameterError):
            gf_mul(1, 1, 65)
        with pytest.raises(ParameterError):
            gf_mul(1 << 8, 1, 8)
        with pytest.raises(ParameterError):
            gf_mul(-1, 1, 8)
        with pytest.raises(ParameterError):
            gf_pow(2, -1, 8)


class TestVectorMul:
    @pytest.mark.parametrize("n", [8, 12, 16, 32])
    def test_matches_scalar(self, n):
        rng = np.random.default_rng(n)
        a = rng.integers(0, 1 << n, size=200).astype(np.uint64)
        b = rng.integers(0, 1 << n, size=200).astype(np.uint64)
        out = gf_mul_vec(a, b, n)
        for i in range(a.size):
            assert int(out[i]) == gf_mul(int(a[i]), int(b[i]), n)

    def test_broadcasting(self):
        a = np.arange(16, dtype=np.uint64)
        out = gf_mul_vec(a, np.uint64(7), 12)
        assert out.shape == a.shape
        assert int(out[3]) == gf_mul(3, 7, 12)

    def test_wide_fields_rejected(self):
        with pytest.raises(ParameterError):
            gf_mul_vec(np.array([1], dtype=np.uint64),
                       np.array([1], dtype=np.uint64), 40)

    def test_out_of_range_rejected(self):
        with pytest.raises(ParameterError):
            gf_mul_vec(np.array([1 << 12], dtype=np.uint64),
                       np.array([1], dtype=np.uint64), 12)
