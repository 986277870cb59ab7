"""
扩域塔与配对测试

使用方法：
    pytest test_pairing.py
"""

import random

import pytest
from py_ecc import bn128

from app.curve import BN254_G1, AffinePoint, affine_infinity, scalar_mul, to_affine, to_jacobian
from app.errors import InvalidPairingInput, InvalidPoint, ZeroInverse
from app.field import BN254_BASE, TINY_13
from app.pairing import (
    G2_GENERATOR,
    G2_INFINITY,
    P,
    Fq2,
    Fq6,
    Fq12,
    G2AffinePoint,
    GtElement,
    PairingZeroPolicy,
    final_exponentiate,
    g2_add,
    g2_decode,
    g2_double,
    g2_encode,
    g2_negate,
    g2_scalar_mul,
    is_on_twist,
    miller_loop,
    pairing,
    pairing_product_check,
)

ZERO_IS_IDENTITY = PairingZeroPolicy.ZERO_IS_IDENTITY
REJECT = PairingZeroPolicy.REJECT_NON_GROUP_INPUT


def g1_mul(k):
    return to_affine(scalar_mul(k, to_jacobian(BN254_G1.generator)))


def zero_g1():
    return AffinePoint(BN254_G1, BN254_BASE.zero(), BN254_BASE.zero())


def random_fq2(rng):
    return Fq2(rng.randrange(P), rng.randrange(P))


def random_fq12(rng):
    return Fq12(
        Fq6(random_fq2(rng), random_fq2(rng), random_fq2(rng)),
        Fq6(random_fq2(rng), random_fq2(rng), random_fq2(rng)),
    )


@pytest.fixture(scope="module")
def base_pairing():
    return pairing(BN254_G1.generator, G2_GENERATOR)


class TestTower:
    def test_fq2_identity(self, rng):
        a = random_fq2(rng)
        assert Fq2.one() * a == a

    def test_i_squared(self):
        assert Fq2(0, 1) * Fq2(0, 1) == Fq2(-1, 0)
        assert Fq2(0, 1).square() == Fq2(P - 1, 0)

    def test_fq2_over_tiny_field(self):
        assert Fq2(2, 3, TINY_13) * Fq2(4, 5, TINY_13) == Fq2(6, 9, TINY_13)

    def test_fq2_inverse(self, rng):
        a = random_fq2(rng)
        assert a * a.inverse() == Fq2.one()
        with pytest.raises(ZeroInverse):
            Fq2.zero().inverse()

    def test_fq6_inverse(self, rng):
        a = Fq6(random_fq2(rng), random_fq2(rng), random_fq2(rng))
        assert a * a.inverse() == Fq6.one()

    def test_fq12_inverse(self, rng):
        a = random_fq12(rng)
        assert a * a.inverse() == Fq12.one()
        with pytest.raises(ZeroInverse):
            Fq12.zero().inverse()

    def test_fq12_square_matches_mul(self, rng):
        a = random_fq12(rng)
        assert a.square() == a * a

    def test_fq12_mul_commutes_and_distributes(self, rng):
        a, b, c = random_fq12(rng), random_fq12(rng), random_fq12(rng)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c

    def test_frobenius_is_p_power(self, rng):
        a = random_fq12(rng)
        assert a.frobenius(1) == a ** P
        assert a.frobenius(12) == a

    def test_conjugate_is_p6_frobenius(self, rng):
        a = random_fq12(rng)
        assert a.conjugate() == a.frobenius(6)

    def test_fq6_frobenius_is_p_power(self, rng):
        a = Fq6(random_fq2(rng), random_fq2(rng), random_fq2(rng))
        expected = Fq6.one()
        base, e = a, P
        while e:
            if e & 1:
                expected = expected * base
            base = base * base
            e >>= 1
        assert a.frobenius(1) == expected


class TestG2:
    def test_generator_on_twist(self):
        assert is_on_twist(G2_GENERATOR)
        assert is_on_twist(G2_INFINITY)

    def test_order(self):
        assert g2_scalar_mul(BN254_G1.order, G2_GENERATOR).infinity

    def test_matches_py_ecc(self):
        for k in (2, 5, 0xC0FFEE):
            ours = g2_scalar_mul(k, G2_GENERATOR)
            theirs = bn128.multiply(bn128.G2, k)
            assert (ours.x.c0, ours.x.c1) == tuple(int(c) for c in theirs[0].coeffs)
            assert (ours.y.c0, ours.y.c1) == tuple(int(c) for c in theirs[1].coeffs)

    def test_group_ops(self):
        q = G2_GENERATOR
        assert g2_double(q) == g2_add(q, q)
        assert g2_add(q, g2_negate(q)).infinity
        assert g2_add(g2_scalar_mul(3, q), g2_scalar_mul(4, q)) == g2_scalar_mul(7, q)

    def test_encode_round_trip(self):
        q = g2_scalar_mul(12345, G2_GENERATOR)
        assert g2_decode(g2_encode(q)) == q
        assert g2_decode(g2_encode(G2_INFINITY)).infinity

    def test_decode_off_twist(self):
        bad = G2AffinePoint(Fq2(1, 0), Fq2(2, 0))
        with pytest.raises(InvalidPoint):
            g2_decode(g2_encode(bad))


class TestPairing:
    def test_non_degenerate(self, base_pairing):
        assert not base_pairing.is_identity()

    def test_bilinear_small(self, base_pairing):
        two_p = pairing(g1_mul(2), G2_GENERATOR)
        two_q = pairing(BN254_G1.generator, g2_scalar_mul(2, G2_GENERATOR))
        assert two_p == two_q == base_pairing ** 2

    def test_bilinearity_random(self, base_pairing):
        rng = random.Random(11)
        for _ in range(20):
            a, b = rng.randint(1, 2 ** 16), rng.randint(1, 2 ** 16)
            assert pairing(g1_mul(a), g2_scalar_mul(b, G2_GENERATOR)) == base_pairing ** (a * b)

    def test_result_in_cyclotomic_subgroup(self, base_pairing):
        g = base_pairing.value
        assert g.conjugate() * g == Fq12.one()
        assert g.frobenius(4) * g == g.frobenius(2)
        assert (g ** BN254_G1.order).is_one()

    def test_final_exponentiation_of_miller_loop(self):
        f = miller_loop(G2_GENERATOR, BN254_G1.generator)
        g = final_exponentiate(f)
        assert g.conjugate() * g == Fq12.one()

    def test_zero_is_identity(self):
        rng = random.Random(12)
        for _ in range(20):
            r = g2_scalar_mul(rng.randrange(1, 2 ** 64), G2_GENERATOR)
            assert pairing(zero_g1(), r, ZERO_IS_IDENTITY).is_identity()
            with pytest.raises(InvalidPairingInput):
                pairing(zero_g1(), r, REJECT)

    def test_zero_g2_input(self):
        zero_q = G2AffinePoint(Fq2.zero(), Fq2.zero())
        assert pairing(BN254_G1.generator, zero_q, ZERO_IS_IDENTITY).is_identity()
        with pytest.raises(InvalidPairingInput):
            pairing(BN254_G1.generator, zero_q, REJECT)

    def test_off_curve_rejected(self):
        bad = AffinePoint(BN254_G1, BN254_BASE.element(1), BN254_BASE.element(1))
        with pytest.raises(InvalidPairingInput):
            pairing(bad, G2_GENERATOR, REJECT)

    @pytest.mark.parametrize("policy", [ZERO_IS_IDENTITY, REJECT])
    def test_infinity_is_identity(self, policy):
        assert pairing(affine_infinity(BN254_G1), G2_GENERATOR, policy).is_identity()
        assert pairing(BN254_G1.generator, G2_INFINITY, policy).is_identity()

    def test_policies_agree_on_valid_input(self):
        p, q = g1_mul(3), g2_scalar_mul(5, G2_GENERATOR)
        assert pairing(p, q, ZERO_IS_IDENTITY) == pairing(p, q, REJECT)


class TestProductCheck:
    def test_inverse_pair(self):
        p = g1_mul(7)
        neg_p = to_affine(scalar_mul(-7, to_jacobian(BN254_G1.generator)))
        q = g2_scalar_mul(3, G2_GENERATOR)
        assert pairing_product_check([(p, q), (neg_p, q)])

    def test_zero_points_pass_under_zero_is_identity(self):
        g2_x = g2_scalar_mul(999, G2_GENERATOR)
        assert pairing_product_check([(zero_g1(), g2_x), (zero_g1(), G2_GENERATOR)], ZERO_IS_IDENTITY)
        with pytest.raises(InvalidPairingInput):
            pairing_product_check([(zero_g1(), g2_x), (zero_g1(), G2_GENERATOR)], REJECT)

    def test_single_pair_fails(self):
        assert not pairing_product_check([(BN254_G1.generator, G2_GENERATOR)])

    def test_moves_scalar_across(self):
        # e(aP, Q) · e(-P, aQ) = 1
        a = 0xABCDEF
        assert pairing_product_check([
            (g1_mul(a), G2_GENERATOR),
            (g1_mul(BN254_G1.order - 1), g2_scalar_mul(a, G2_GENERATOR)),
        ])

    def test_gt_identity(self):
        assert GtElement.one().is_identity()
