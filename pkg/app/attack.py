"""
攻击模块
1. 零点伪造证明：全零字节，或只把 W_z / W_zω 置零
2. ECDSA (r, s) = (0, 0) 绕过，以及加固的对照实现
3. 对抗样本库（按漏洞配置给出期望结论）
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple
import hashlib
import logging
import random

from app.config import settings
from app.curve import (
    BN254_G1,
    ENCODED_POINT_SIZE,
    SECP256K1,
    AffinePoint,
    CurveParams,
    batch_normalize,
    is_on_curve,
    jacobian,
    point_add,
    point_encode,
    scalar_mul,
    to_affine,
    to_jacobian,
)
from app.errors import InvalidPoint, InvalidPrivateKey, InvalidSetup, LabError, WireFormatError
from app.field import InversePolicy, fe_inverse
from app.schemas import VectorRecord, VulnProfile
from app.verifier import REFERENCE_P0, VerifierKey, rejection_step

logger = logging.getLogger(__name__)

ENCODED_SIGNATURE_SIZE = 64


class FillMode(str, Enum):
    """伪造证明的填充方式"""
    ALL_ZERO_BYTES = "all-zero"
    ZERO_W_ONLY = "zero-w"


@dataclass(frozen=True)
class ForgeryTemplate:
    """伪造模板：布局来自目标验证密钥"""
    num_z: int
    num_zw: int
    mode: FillMode = FillMode.ALL_ZERO_BYTES
    commitments: Optional[Tuple[bytes, ...]] = None  # ZERO_W_ONLY 可复用真实承诺

    @classmethod
    def for_key(cls, vk: VerifierKey, mode: FillMode = FillMode.ALL_ZERO_BYTES, **kwargs) -> "ForgeryTemplate":
        return cls(vk.num_z, vk.num_zw, FillMode(mode), **kwargs)

    @property
    def num_commitments(self) -> int:
        return self.num_z + self.num_zw

    @property
    def proof_size(self) -> int:
        return self.num_commitments * (ENCODED_POINT_SIZE + 32) + 2 * ENCODED_POINT_SIZE


def forge_zero_proof(template: ForgeryTemplate, rng: Optional[random.Random] = None) -> bytes:
    """
    构造零点伪造证明

    Args:
        template: 伪造模板
        rng: ZERO_W_ONLY 模式下生成承诺与评估值的随机源

    Returns:
        与布局等长的证明字节
    """
    if template.mode is FillMode.ALL_ZERO_BYTES:
        return bytes(template.proof_size)

    rng = rng or random.Random(settings.DEFAULT_SEED)
    r = BN254_G1.order
    if template.commitments is not None:
        if len(template.commitments) != template.num_commitments:
            raise WireFormatError("模板承诺数量与布局不符")
        commitments = list(template.commitments)
    else:
        g1 = to_jacobian(BN254_G1.generator)
        commitments = [
            point_encode(to_affine(scalar_mul(rng.randrange(1, r), g1)))
            for _ in range(template.num_commitments)
        ]
    evals = [rng.randrange(r).to_bytes(32, "big") for _ in range(template.num_commitments)]
    zero_w = bytes(ENCODED_POINT_SIZE)
    proof = b"".join(commitments) + b"".join(evals) + zero_w + zero_w
    logger.debug(f"生成 {template.mode.value} 伪造证明，{len(proof)} 字节")
    return proof


def expected_forgery_verdict(profile: VulnProfile) -> Tuple[bool, Optional[int]]:
    """
    零点伪造在给定配置下的期望结论

    最早加固的步骤触发拒绝；第3、4步同时加固时 Z 检查先执行，报告第4步。
    """
    hardened = profile.hardened_steps()
    if not hardened:
        return True, None
    first = hardened[0]
    if first == 3 and 4 in hardened:
        return False, 4
    return False, first


# ---------------------------------------------------------------------------
# ECDSA
# ---------------------------------------------------------------------------

class EcdsaPolicy(str, Enum):
    """ECDSA 验证策略"""
    VULNERABLE_NO_RANGE_CHECK = "vulnerable"
    HARDENED = "hardened"


@dataclass(frozen=True)
class EcdsaParams:
    """ECDSA 参数：曲线及其素数阶 n"""
    curve: CurveParams

    def __post_init__(self):
        if not scalar_mul(self.n, to_jacobian(self.curve.generator)).infinity:
            raise InvalidSetup(f"{self.curve.name}: 生成元的阶不是 n")

    @property
    def n(self) -> int:
        return self.curve.order

    @property
    def generator(self) -> AffinePoint:
        return self.curve.generator

    @classmethod
    def from_name(cls, name: str) -> "EcdsaParams":
        curves = {"bn254": BN254_G1, "secp256k1": SECP256K1}
        if name not in curves:
            raise ValueError(f"不支持的曲线: {name}，可选 {sorted(curves)}")
        return cls(curves[name])


@dataclass(frozen=True)
class EcdsaSignature:
    """(r, s)，类型层面不做范围约束"""
    r: int
    s: int

    def to_bytes(self) -> bytes:
        return self.r.to_bytes(32, "big") + self.s.to_bytes(32, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "EcdsaSignature":
        if len(data) != ENCODED_SIGNATURE_SIZE:
            raise WireFormatError(f"签名必须是{ENCODED_SIGNATURE_SIZE}字节，实际 {len(data)}")
        return cls(int.from_bytes(data[:32], "big"), int.from_bytes(data[32:], "big"))


def hash_message(msg: bytes, params: EcdsaParams) -> int:
    """SHA-256 摘要，截取与 n 等长的最高位"""
    digest = int.from_bytes(hashlib.sha256(msg).digest(), "big")
    shift = 256 - params.n.bit_length()
    if shift > 0:
        digest >>= shift
    return digest


def ecdsa_public_key(params: EcdsaParams, private_key: int) -> AffinePoint:
    if not 1 <= private_key < params.n:
        raise InvalidPrivateKey("私钥必须在 [1, n-1] 内")
    return to_affine(scalar_mul(private_key, to_jacobian(params.generator)))


def ecdsa_sign(
    params: EcdsaParams, private_key: int, msg_hash: int, rng: Optional[random.Random] = None
) -> EcdsaSignature:
    """
    标准 ECDSA 签名，r 或 s 为 0 时重新选取随机数

    Args:
        params: ECDSA 参数
        private_key: 私钥 [1, n-1]
        msg_hash: 消息摘要（整数）
        rng: 随机数来源

    Returns:
        签名
    """
    n = params.n
    if not 1 <= private_key < n:
        raise InvalidPrivateKey("私钥必须在 [1, n-1] 内")
    rng = rng or random.Random()
    scalar = params.curve.scalar_field
    g = to_jacobian(params.generator)
    while True:
        k = rng.randrange(1, n)
        point = to_affine(scalar_mul(k, g))
        r = point.x.value % n
        if r == 0:
            continue
        k_inv = fe_inverse(scalar.element(k))
        s = (k_inv * scalar.element(msg_hash + r * private_key)).value
        if s == 0:
            continue
        return EcdsaSignature(r, s)


def ecdsa_verify(
    params: EcdsaParams,
    public_key: AffinePoint,
    msg_hash: int,
    sig: EcdsaSignature,
    policy: EcdsaPolicy = EcdsaPolicy.HARDENED,
) -> bool:
    """
    ECDSA 验证

    VULNERABLE_NO_RANGE_CHECK：不检查 r、s 的范围，s 用费马求逆（inverse(0) = 0），
    R 为无穷远时 x 读作 0，因此 (0, 0) 对任意密钥和消息都通过。
    HARDENED：要求 1 <= r, s <= n-1 且 R 不是无穷远。

    Raises:
        InvalidPoint: 公钥不在曲线上或为无穷远
    """
    if public_key.infinity or not is_on_curve(public_key):
        raise InvalidPoint("公钥不是有效的曲线点")
    n = params.n
    scalar = params.curve.scalar_field

    if policy is EcdsaPolicy.HARDENED:
        if not (1 <= sig.r < n and 1 <= sig.s < n):
            logger.debug(f"签名分量超出范围: r={sig.r}, s={sig.s}")
            return False
        w = fe_inverse(scalar.element(sig.s), InversePolicy.CHECKED)
    else:
        w = fe_inverse(scalar.element(sig.s), InversePolicy.FERMAT_NO_ZERO_CHECK)

    u1 = scalar.element(msg_hash) * w
    u2 = scalar.element(sig.r) * w
    point = point_add(
        scalar_mul(u1, to_jacobian(params.generator)),
        scalar_mul(u2, to_jacobian(public_key)),
    )

    if point.infinity:
        if policy is EcdsaPolicy.HARDENED:
            return False
        x = 0  # 无穷远点的 x 读作 0
    else:
        x = to_affine(point).x.value
    return x % n == sig.r % n


# ---------------------------------------------------------------------------
# 对抗样本库
# ---------------------------------------------------------------------------

CORPUS_PROFILES = ["vulnerable", "fix-1", "fix-2", "fix-3", "fix-4", "fix-5", "hardened"]


def _verdict_text(accepted: bool) -> str:
    return "ACCEPT" if accepted else "REJECT"


def _z_zero_records() -> List[VectorRecord]:
    """批量归一化 [P0, (0,0,0)] 在不同策略下的结果"""
    before = [jacobian(BN254_G1, *REFERENCE_P0), jacobian(BN254_G1, 0, 0, 0)]
    payload = b"".join(
        v.to_bytes(32, "big") for point in before for v in point.coordinates()
    ).hex()
    records = []
    cases = [
        ("vulnerable", InversePolicy.FERMAT_NO_ZERO_CHECK, False),
        ("fix-3", InversePolicy.CHECKED, False),
        ("fix-4", InversePolicy.FERMAT_NO_ZERO_CHECK, True),
        ("hardened", InversePolicy.CHECKED, True),
    ]
    for name, policy, reject in cases:
        try:
            after = batch_normalize(before, policy, reject_z_zero=reject)
        except LabError as e:
            records.append(VectorRecord(
                category="z_zero_points", payload=payload, profile=name,
                expected="REJECT", step=rejection_step(e),
            ))
            continue
        records.append(VectorRecord(
            category="z_zero_points", payload=payload, profile=name, expected="ACCEPT",
            extra={"after": [list(f"0x{v:064x}" for v in point.coordinates()) for point in after]},
        ))
    return records


def build_vector_corpus(
    vk: VerifierKey,
    seed: int = settings.DEFAULT_SEED,
    ecdsa_params: Optional[EcdsaParams] = None,
    ecdsa_cases: int = 4,
) -> List[VectorRecord]:
    """
    生成对抗样本库，同一 seed 输出完全一致

    Args:
        vk: 目标验证密钥（决定证明布局）
        seed: 随机种子
        ecdsa_params: ECDSA 曲线，默认按配置
        ecdsa_cases: (0, 0) 签名的随机密钥/消息组数

    Returns:
        记录列表
    """
    rng = random.Random(seed)
    records: List[VectorRecord] = []

    forgeries = [
        ("all_zero_proof", forge_zero_proof(ForgeryTemplate.for_key(vk, FillMode.ALL_ZERO_BYTES))),
        ("zero_w_proof", forge_zero_proof(ForgeryTemplate.for_key(vk, FillMode.ZERO_W_ONLY), rng)),
    ]
    for category, proof in forgeries:
        for name in CORPUS_PROFILES:
            accepted, step = expected_forgery_verdict(VulnProfile.parse(name))
            records.append(VectorRecord(
                category=category, payload=proof.hex(), profile=name,
                expected=_verdict_text(accepted), step=step,
            ))

    records.extend(_z_zero_records())

    params = ecdsa_params or EcdsaParams.from_name(settings.ECDSA_CURVE)
    zero_sig = EcdsaSignature(0, 0)
    for _ in range(ecdsa_cases):
        private_key = rng.randrange(1, params.n)
        public_key = ecdsa_public_key(params, private_key)
        msg = rng.getrandbits(256).to_bytes(32, "big")
        extra = {
            "curve": params.curve.name,
            "public_key": [f"0x{public_key.x.value:064x}", f"0x{public_key.y.value:064x}"],
            "msg_hash": f"0x{hash_message(msg, params):064x}",
        }
        for policy in EcdsaPolicy:
            records.append(VectorRecord(
                category="ecdsa_zero_signature", payload=zero_sig.to_bytes().hex(), profile=policy.value,
                expected=_verdict_text(policy is EcdsaPolicy.VULNERABLE_NO_RANGE_CHECK), extra=extra,
            ))
    logger.info(f"对抗样本库生成完成，共 {len(records)} 条")
    return records
