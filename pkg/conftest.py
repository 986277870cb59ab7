"""
测试公共夹具：保留秘密的 SRS、验证密钥和诚实证明工厂
"""

import random

import pytest

from app.field import BN254_SCALAR
from app.verifier import VerifierKey, create_batched_proof, srs_setup

TEST_SECRET = 0x1B2E3D4C5F60718293A4B5C6D7E8F9012345678
TEST_DEGREE = 4
TEST_DOMAIN = 16
TEST_LAYOUT = (2, 1)


@pytest.fixture(scope="session")
def srs():
    return srs_setup(TEST_DEGREE, secret=TEST_SECRET)


@pytest.fixture(scope="session")
def vk(srs):
    return VerifierKey.from_srs(srs, TEST_DOMAIN, *TEST_LAYOUT)


@pytest.fixture
def rng():
    return random.Random(20240229)


def _random_poly(rng: random.Random, degree: int):
    """次数恰好为 degree 的随机多项式（首项非零）"""
    r = BN254_SCALAR.modulus
    return [rng.randrange(r) for _ in range(degree)] + [rng.randrange(1, r)]


@pytest.fixture(scope="session")
def make_honest_proof(srs, vk):
    """返回 (rng, salt) -> 证明字节 的工厂"""

    def _make(rng: random.Random, salt: bytes = b""):
        polys = [_random_poly(rng, rng.randint(1, srs.degree)) for _ in range(vk.num_commitments)]
        proof = create_batched_proof(polys[:vk.num_z], polys[vk.num_z:], srs, vk, salt)
        return proof.to_bytes()

    return _make


@pytest.fixture(scope="session")
def honest_proofs(make_honest_proof):
    """100 个随机诚实证明，完备性和变异测试共用"""
    rng = random.Random(7)
    return [make_honest_proof(rng) for _ in range(100)]
