"""
批量 KZG 验证测试：可信设置、承诺/打开、最终检查和完整流水线

使用方法：
    pytest test_verifier.py
"""

import random

import pytest

from app.curve import (
    BN254_G1,
    AffinePoint,
    PointValidity,
    affine_infinity,
    canonical_infinity,
    point_add,
    point_negate,
    scalar_mul,
    to_affine,
    to_jacobian,
)
from app.errors import (
    DegreeTooLarge,
    InfinityPointRejected,
    InvalidPoint,
    InvalidSetup,
    WireFormatError,
    ZCoordinateZero,
)
from app.field import BN254_BASE, BN254_SCALAR, fe_encode
from app.pairing import G2_GENERATOR, g2_scalar_mul, pairing
from app.schemas import VulnProfile
from app.verifier import (
    SRS,
    BatchedOpeningProof,
    VerifierKey,
    assemble_check_inputs,
    check_infinity,
    compute_F_E,
    create_batched_proof,
    final_pairing_check,
    format_batch_normalize,
    kzg_commit,
    kzg_open,
    normalize_check_inputs,
    replay_reference_normalization,
    root_of_unity,
    srs_setup,
    verify,
)
from conftest import TEST_SECRET

R = BN254_SCALAR.modulus
VULNERABLE = VulnProfile.vulnerable()
HARDENED = VulnProfile.hardened()

ZERO_HEX = "0x" + "0" * 64
ONE_HEX = "0x" + "0" * 63 + "1"
REFERENCE_BLOCK = "\n".join([
    "Before batch_normalize",
    "P[0]: { 0x12270675066dbf202e8766f5fa48648f95032fbff46996a08e05e427ed0fffb9,",
    "0x2cce89ca786bd0a3db55776a24aa3253bce3b8ef689849f93596b5b26afec90f,",
    "0x04ae1f4cd5f84a484acc4ba115fbd02a879d2e30b8cd97e18f3865887213823b }",
    f"P[1]: {{ {ZERO_HEX},",
    f"{ZERO_HEX},",
    f"{ZERO_HEX} }}",
    "After batch_normalize",
    f"P[0]: {{ {ZERO_HEX},",
    f"{ZERO_HEX},",
    f"{ONE_HEX} }}",
    f"P[1]: {{ {ZERO_HEX},",
    f"{ZERO_HEX},",
    f"{ONE_HEX} }}",
])


def g1_mul(k):
    return to_affine(scalar_mul(k, to_jacobian(BN254_G1.generator)))


def zero_point():
    return AffinePoint(BN254_G1, BN254_BASE.zero(), BN254_BASE.zero(), validity=PointValidity.INVALID)


def zero_w_forgery(proof_bytes, vk):
    """把诚实证明的 W 点替换成 64 个零字节"""
    return proof_bytes[:vk.proof_size - 128] + bytes(128)


class TestSetup:
    def test_degree_one_structure(self):
        srs = srs_setup(1, secret=5)
        assert srs.g1_powers[0] == BN254_G1.generator
        assert srs.g1_powers[1] == g1_mul(5)
        assert srs.g2_x == g2_scalar_mul(5, G2_GENERATOR)

    def test_g2_x_consistent_via_pairing(self, srs):
        assert pairing(srs.g1_powers[1], srs.g2_gen) == pairing(srs.g1_powers[0], srs.g2_x)

    def test_powers_match_secret(self, srs):
        for i, power in enumerate(srs.g1_powers):
            assert power == g1_mul(pow(TEST_SECRET, i, R))

    @pytest.mark.parametrize("degree, secret", [(0, 5), (3, 0), (3, R)])
    def test_invalid_setup(self, degree, secret):
        with pytest.raises(InvalidSetup):
            srs_setup(degree, secret=secret)

    def test_sampled_secret_is_reproducible(self):
        a = srs_setup(1, rng=random.Random(1))
        b = srs_setup(1, rng=random.Random(1))
        assert a.secret == b.secret and a.secret != 0

    def test_srs_serialization(self, srs):
        restored = SRS.from_bytes(srs.to_bytes())
        assert restored.g1_powers == srs.g1_powers
        assert restored.g2_x == srs.g2_x
        assert restored.secret is None

    def test_vk_serialization(self, vk):
        data = vk.to_bytes()
        assert len(data) == 8 + 32 + 16 + 256
        assert int.from_bytes(data[:8], "big") == 16
        assert VerifierKey.from_bytes(data) == vk

    def test_root_of_unity(self):
        omega = root_of_unity(16)
        assert omega ** 16 == 1
        assert omega ** 8 != 1
        with pytest.raises(InvalidSetup):
            root_of_unity(12)


class TestKzg:
    def test_zero_polynomial(self, srs):
        result = kzg_commit([], srs)
        assert result.infinity and result.Z == 0
        assert kzg_commit([0, 0], srs).infinity

    def test_commit_x(self, srs):
        assert to_affine(kzg_commit([0, 1], srs)) == srs.g1_powers[1]

    def test_commit_with_known_secret(self, srs):
        expected = g1_mul((TEST_SECRET * TEST_SECRET + 1) % R)
        assert to_affine(kzg_commit([1, 0, 1], srs)) == expected

    def test_degree_overflow(self, srs):
        with pytest.raises(DegreeTooLarge):
            kzg_commit([1] * (srs.degree + 2), srs)
        with pytest.raises(DegreeTooLarge):
            kzg_open([1] * (srs.degree + 2), 3, srs)

    def test_open_constant(self, srs):
        value, w = kzg_open([42], 7, srs)
        assert value == 42
        assert w.infinity

    def test_open_x(self, srs):
        value, w = kzg_open([0, 1], 9, srs)
        assert value == 9
        assert to_affine(w) == BN254_G1.generator

    def test_open_quotient_matches_secret(self, srs, rng):
        poly = [rng.randrange(R) for _ in range(5)]
        z = rng.randrange(R)
        value, w = kzg_open(poly, z, srs)
        s = TEST_SECRET
        f_s = sum(c * pow(s, i, R) for i, c in enumerate(poly)) % R
        quotient = (f_s - value.value) * pow(s - z, -1, R) % R
        assert to_affine(w) == g1_mul(quotient)


class TestCombine:
    def test_single_commitment_u_zero(self):
        c = g1_mul(11)
        s = BN254_SCALAR.element(5)
        v = BN254_SCALAR.element(3)
        F, E = compute_F_E([c], [s], [], v, BN254_SCALAR.zero(), VULNERABLE)
        assert to_affine(F) == c
        assert to_affine(E) == g1_mul(5)

    def test_all_invalid_skipped(self):
        s = BN254_SCALAR.element(0)
        F, E = compute_F_E([zero_point(), zero_point()], [s], [s], BN254_SCALAR.element(2),
                           BN254_SCALAR.element(3), VULNERABLE)
        assert F.infinity and F.Z == 0
        assert E.infinity

    def test_invalid_commitment_rejected_when_hardened(self):
        with pytest.raises(InvalidPoint):
            compute_F_E([zero_point()], [BN254_SCALAR.zero()], [], BN254_SCALAR.element(2),
                        BN254_SCALAR.element(3), VulnProfile.single_fix(1))

    def test_batched_combination(self):
        c0, c1, c2 = g1_mul(2), g1_mul(3), g1_mul(4)
        v, u = BN254_SCALAR.element(10), BN254_SCALAR.element(100)
        evals_z = [BN254_SCALAR.element(1), BN254_SCALAR.element(2)]
        evals_zw = [BN254_SCALAR.element(3)]
        F, E = compute_F_E([c0, c1, c2], evals_z, evals_zw, v, u, HARDENED)
        assert to_affine(F) == g1_mul(2 + 10 * 3 + 100 * 4)
        assert to_affine(E) == g1_mul(1 + 10 * 2 + 100 * 3)

    def test_zero_w_points(self):
        F = scalar_mul(17, to_jacobian(BN254_G1.generator))
        E = scalar_mul(5, to_jacobian(BN254_G1.generator))
        zero = zero_point()
        for u in (1, 2, 0xFFFF):
            ci = assemble_check_inputs(zero, zero, F, E, BN254_SCALAR.element(u),
                                       BN254_SCALAR.element(7), root_of_unity(16))
            assert ci.p1.is_all_zero()
            # 零点项把累加值翻倍两次
            assert to_affine(ci.p0) == g1_mul(-4 * 12 % R)
            assert to_affine(ci.p0) == to_affine(point_negate(scalar_mul(4, point_add(F, point_negate(E)))))

    def test_all_zero_inputs_give_zero_p0(self):
        zero = zero_point()
        infinity = canonical_infinity(BN254_G1)
        ci = assemble_check_inputs(zero, zero, infinity, infinity, BN254_SCALAR.element(9),
                                   BN254_SCALAR.element(7), root_of_unity(16))
        assert ci.p0.is_all_zero() and ci.p1.is_all_zero()

    def test_u_zero_gives_w_z(self):
        w_z, w_zw = g1_mul(3), g1_mul(8)
        infinity = canonical_infinity(BN254_G1)
        ci = assemble_check_inputs(w_z, w_zw, infinity, infinity, BN254_SCALAR.zero(),
                                   BN254_SCALAR.element(7), root_of_unity(16))
        assert to_affine(ci.p1) == w_z


class TestFinalCheck:
    @pytest.fixture
    def forged_inputs(self):
        F = scalar_mul(17, to_jacobian(BN254_G1.generator))
        E = scalar_mul(5, to_jacobian(BN254_G1.generator))
        return assemble_check_inputs(zero_point(), zero_point(), F, E, BN254_SCALAR.element(3),
                                     BN254_SCALAR.element(7), root_of_unity(16))

    def test_forgery_accepted_when_vulnerable(self, forged_inputs, srs):
        assert final_pairing_check(forged_inputs, srs, VULNERABLE)

    def test_forgery_rejected_with_z_check(self, forged_inputs, srs):
        with pytest.raises(ZCoordinateZero):
            final_pairing_check(forged_inputs, srs, VulnProfile.single_fix(4))

    def test_honest_inputs_pass_hardened(self, srs):
        # P1 = W, P0 = -s·W 满足 e(P1, [s]_2)·e(P0, [1]_2) = 1
        w = g1_mul(123)
        p0 = scalar_mul(-TEST_SECRET, to_jacobian(w))
        F = point_negate(p0)
        ci = assemble_check_inputs(w, g1_mul(1), F, canonical_infinity(BN254_G1), BN254_SCALAR.zero(),
                                   BN254_SCALAR.zero(), root_of_unity(16))
        assert final_pairing_check(ci, srs, HARDENED)

    @pytest.fixture
    def identity_inputs(self):
        # 常数多项式：W_z = W_zω = ∞ 且 F = E
        F = scalar_mul(9, to_jacobian(BN254_G1.generator))
        return assemble_check_inputs(affine_infinity(BN254_G1), affine_infinity(BN254_G1), F, F,
                                     BN254_SCALAR.element(3), BN254_SCALAR.element(7), root_of_unity(16))

    def test_flagged_points_are_identity(self, identity_inputs):
        assert identity_inputs.p0.infinity and identity_inputs.p1.infinity
        check_infinity(identity_inputs, HARDENED)
        normalized = normalize_check_inputs(identity_inputs, HARDENED)
        assert all(point.infinity for point in normalized)

    @pytest.mark.parametrize("profile", [VULNERABLE, HARDENED], ids=["vulnerable", "hardened"])
    def test_identity_inputs_accepted(self, identity_inputs, srs, profile):
        assert final_pairing_check(identity_inputs, srs, profile)

    def test_unflagged_z_zero_rejected_at_step_two(self, forged_inputs):
        assert not forged_inputs.p1.infinity
        with pytest.raises(InfinityPointRejected):
            check_infinity(forged_inputs, VulnProfile.single_fix(2))
        check_infinity(forged_inputs, VULNERABLE)

    def test_flagged_point_kept_out_of_shared_normalization(self):
        # u = 0 且 W_z = ∞：P1 带标志，P0 = -(F - E) 有限
        F = scalar_mul(17, to_jacobian(BN254_G1.generator))
        E = scalar_mul(5, to_jacobian(BN254_G1.generator))
        ci = assemble_check_inputs(affine_infinity(BN254_G1), g1_mul(5), F, E, BN254_SCALAR.zero(),
                                   BN254_SCALAR.element(3), root_of_unity(16))
        assert ci.p1.infinity and not ci.p0.infinity

        p0, p1 = normalize_check_inputs(ci, HARDENED)
        assert p1.infinity
        assert p0.Z.value == 1
        expected = point_negate(to_jacobian(g1_mul(12)))
        assert to_affine(p0).x == to_affine(expected).x
        assert to_affine(p0).y == to_affine(expected).y


class TestVerify:
    def test_all_zero_proof_vulnerable(self, vk):
        verdict, trace = verify(bytes(vk.proof_size), vk, VULNERABLE)
        assert verdict.accepted
        assert trace.verdict == verdict

    def test_all_zero_proof_hardened(self, vk):
        verdict, _ = verify(bytes(vk.proof_size), vk, HARDENED)
        assert not verdict.accepted
        assert verdict.step == 1

    def test_wrong_length(self, vk):
        with pytest.raises(WireFormatError):
            verify(bytes(vk.proof_size - 1), vk, VULNERABLE)

    def test_non_canonical_eval_rejected_without_step(self, vk):
        data = bytearray(vk.proof_size)
        offset = 64 * vk.num_commitments
        data[offset:offset + 32] = b"\xff" * 32
        verdict, _ = verify(bytes(data), vk, VULNERABLE)
        assert not verdict.accepted
        assert verdict.step is None

    @pytest.mark.parametrize("step", [1, 2, 3, 4, 5])
    def test_single_fix_kills_zero_w_forgery(self, step, vk, make_honest_proof):
        forged = zero_w_forgery(make_honest_proof(random.Random(step)), vk)
        assert verify(forged, vk, VULNERABLE)[0].accepted
        verdict, _ = verify(forged, vk, VulnProfile.single_fix(step))
        assert not verdict.accepted
        assert verdict.step == step

    def test_fixing_both_normalization_steps_reports_z_check(self, vk):
        profile = VulnProfile.from_flags((True, True, False, False, True))
        verdict, _ = verify(bytes(vk.proof_size), vk, profile)
        assert verdict.step == 4

    def test_honest_proofs_accept_under_both_profiles(self, vk, honest_proofs):
        for proof in honest_proofs:
            assert verify(proof, vk, HARDENED)[0].accepted
            assert verify(proof, vk, VULNERABLE)[0].accepted

    def test_honest_proof_accepts_under_every_single_fix(self, vk, honest_proofs):
        for step in range(1, 6):
            assert verify(honest_proofs[0], vk, VulnProfile.single_fix(step))[0].accepted

    @pytest.mark.parametrize(
        "profile",
        [VULNERABLE, HARDENED] + [VulnProfile.single_fix(step) for step in range(1, 6)],
        ids=lambda profile: profile.name,
    )
    def test_constant_polynomials_accept_under_every_profile(self, srs, vk, profile):
        proof = create_batched_proof([[7], [11]], [[13]], srs, vk)
        assert proof.w_z[0] & 0x80 and proof.w_zw[0] & 0x80
        verdict, _ = verify(proof.to_bytes(), vk, profile)
        assert verdict.accepted, verdict.reason

    def test_constant_z_group_with_linear_zw_group(self, srs, vk):
        proof = create_batched_proof([[7], [11]], [[13, 2]], srs, vk).to_bytes()
        assert verify(proof, vk, HARDENED)[0].accepted
        assert verify(proof, vk, VULNERABLE)[0].accepted

    def test_eval_mutation_rejected(self, vk, honest_proofs):
        rng = random.Random(9)
        for proof in honest_proofs:
            index = rng.randrange(vk.num_commitments)
            offset = 64 * vk.num_commitments + 32 * index
            value = (int.from_bytes(proof[offset:offset + 32], "big") + rng.randrange(1, R)) % R
            mutated = proof[:offset] + value.to_bytes(32, "big") + proof[offset + 32:]
            verdict, _ = verify(mutated, vk, HARDENED)
            assert not verdict.accepted

    def test_salt_does_not_change_forgery_verdict(self, vk, make_honest_proof):
        forged = zero_w_forgery(make_honest_proof(random.Random(3)), vk)
        rng = random.Random(10)
        for _ in range(100):
            salt = rng.getrandbits(256).to_bytes(32, "big")
            assert verify(forged, vk, VULNERABLE, salt=salt)[0].accepted

    def test_salt_must_match_for_honest_proof(self, vk, make_honest_proof):
        proof = make_honest_proof(random.Random(4), salt=b"prover-salt")
        assert verify(proof, vk, HARDENED, salt=b"prover-salt")[0].accepted
        assert not verify(proof, vk, HARDENED, salt=b"other")[0].accepted


class TestTrace:
    def test_batch_normalize_stage_on_zero_w_forgery(self, vk, make_honest_proof):
        forged = zero_w_forgery(make_honest_proof(random.Random(1)), vk)
        verdict, trace = verify(forged, vk, VULNERABLE)
        assert verdict.accepted
        lines = trace.stage("batch_normalize").text.splitlines()
        assert lines[0] == "Before batch_normalize"
        assert lines[1] != f"P[0]: {{ {ZERO_HEX},"
        assert lines[4:7] == [f"P[1]: {{ {ZERO_HEX},", f"{ZERO_HEX},", f"{ZERO_HEX} }}"]
        assert lines[7] == "After batch_normalize"
        assert lines[8:11] == [f"P[0]: {{ {ZERO_HEX},", f"{ZERO_HEX},", f"{ONE_HEX} }}"]
        assert lines[11:14] == [f"P[1]: {{ {ZERO_HEX},", f"{ZERO_HEX},", f"{ONE_HEX} }}"]

    def test_reference_replay_matches_byte_for_byte(self):
        _, after, text = replay_reference_normalization()
        assert text == REFERENCE_BLOCK
        assert [p.coordinates() for p in after] == [(0, 0, 1), (0, 0, 1)]

    def test_rejected_run_stops_early(self, vk):
        _, trace = verify(bytes(vk.proof_size), vk, HARDENED)
        assert [record.stage for record in trace.stages] == ["decode"]
        assert "verdict: REJECT" in trace.render()

    def test_trace_records_all_stages(self, vk):
        _, trace = verify(bytes(vk.proof_size), vk, VULNERABLE)
        assert [record.stage for record in trace.stages] == [
            "decode", "challenges", "combine", "infinity_check", "batch_normalize", "pairing",
        ]
        assert trace.stage("decode").values["w_z"] == "invalid"

    def test_format_helper(self):
        point = canonical_infinity(BN254_G1)
        text = format_batch_normalize([point], [point])
        assert text.splitlines()[1] == f"P[0]: {{ {ZERO_HEX},"


def test_proof_wire_round_trip(vk, make_honest_proof):
    data = make_honest_proof(random.Random(8))
    proof = BatchedOpeningProof.from_bytes(data, vk)
    assert proof.to_bytes() == data
    assert len(proof.commitments) == vk.num_commitments
    assert len(proof.evals_z) == vk.num_z and len(proof.evals_zw) == vk.num_zw
    assert fe_encode(proof.evals_z[0]) == data[64 * vk.num_commitments:64 * vk.num_commitments + 32]
