"""
批量 KZG 验证模块
可信设置（测试用，保留秘密）、KZG 承诺与打开、诚实批量证明、以及串联五个漏洞标志的 PLONK 式最终检查

最终检查：e(P1, [x]_2) · e(P0, [1]_2) == 1
    P1 = W_z + u·W_zω
    P0 = -(z·W_z + uzω·W_zω + F - E)
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union
import logging
import random

from app.config import settings
from app.curve import (
    BN254_G1,
    ENCODED_POINT_SIZE,
    AffinePoint,
    CurveParams,
    JacobianPoint,
    PointValidationPolicy,
    PointValidity,
    batch_normalize,
    canonical_infinity,
    is_infinity_msb,
    jacobian,
    point_add,
    point_decode,
    point_encode,
    point_negate,
    scalar_mul,
    to_affine,
    to_jacobian,
)
from app.errors import (
    DegreeTooLarge,
    InfinityPointRejected,
    InvalidPairingInput,
    InvalidPoint,
    InvalidSetup,
    LabError,
    NonCanonicalEncoding,
    WireFormatError,
    ZCoordinateZero,
    ZeroInverse,
)
from app.field import (
    BN254_SCALAR,
    ENCODED_SCALAR_SIZE,
    FieldElement,
    InversePolicy,
    fe_decode,
    fe_encode,
)
from app.pairing import (
    ENCODED_G2_SIZE,
    G2_GENERATOR,
    G2AffinePoint,
    PairingZeroPolicy,
    g2_decode,
    g2_encode,
    g2_scalar_mul,
    pairing_product_check,
)
from app.schemas import VerifierTrace, Verdict, VulnProfile
from app.transcript import Challenges, Transcript, absorb, challenge

logger = logging.getLogger(__name__)

R = BN254_SCALAR.modulus
TWO_ADICITY = 28  # r - 1 = 2^28 · 奇数
MULTIPLICATIVE_GENERATOR = 5

# 异常 -> 攻击链步骤编号
REJECTION_STEPS = {
    InvalidPoint: 1,
    InfinityPointRejected: 2,
    ZeroInverse: 3,
    ZCoordinateZero: 4,
    InvalidPairingInput: 5,
}

# 已公开的零点伪造记录中 batch_normalize 之前的 P[0]
REFERENCE_P0 = (
    0x12270675066DBF202E8766F5FA48648F95032FBFF46996A08E05E427ED0FFFB9,
    0x2CCE89CA786BD0A3DB55776A24AA3253BCE3B8EF689849F93596B5B26AFEC90F,
    0x04AE1F4CD5F84A484ACC4BA115FBD02A879D2E30B8CD97E18F3865887213823B,
)


def rejection_step(exc: Exception) -> Optional[int]:
    """异常对应的攻击链步骤，没有对应步骤时返回 None"""
    for exc_type, step in REJECTION_STEPS.items():
        if isinstance(exc, exc_type):
            return step
    return None


def _scalar(value: Union[int, FieldElement]) -> int:
    return int(value) % R


# ---------------------------------------------------------------------------
# 可信设置
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SRS:
    """结构化参考串；secret 仅供测试做对照"""
    g1_powers: Tuple[AffinePoint, ...]
    g2_gen: G2AffinePoint
    g2_x: G2AffinePoint
    secret: Optional[int] = None

    @property
    def degree(self) -> int:
        return len(self.g1_powers) - 1

    def to_bytes(self) -> bytes:
        """次数(8) || g1_powers(每个64) || g2_gen(128) || g2_x(128)，不含秘密"""
        parts = [self.degree.to_bytes(8, "big")]
        parts.extend(point_encode(p) for p in self.g1_powers)
        parts.append(g2_encode(self.g2_gen))
        parts.append(g2_encode(self.g2_x))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "SRS":
        if len(data) < 8:
            raise WireFormatError("SRS 数据过短")
        degree = int.from_bytes(data[:8], "big")
        expected = 8 + (degree + 1) * ENCODED_POINT_SIZE + 2 * ENCODED_G2_SIZE
        if degree < 1 or len(data) != expected:
            raise WireFormatError(f"SRS 长度不符: 期望 {expected}，实际 {len(data)}")
        offset = 8
        powers = []
        for _ in range(degree + 1):
            powers.append(point_decode(data[offset:offset + ENCODED_POINT_SIZE], BN254_G1))
            offset += ENCODED_POINT_SIZE
        g2_gen = g2_decode(data[offset:offset + ENCODED_G2_SIZE])
        g2_x = g2_decode(data[offset + ENCODED_G2_SIZE:])
        return cls(tuple(powers), g2_gen, g2_x)


def srs_setup(degree: int, secret: Optional[int] = None, rng: Optional[random.Random] = None) -> SRS:
    """
    生成测试用 SRS

    Args:
        degree: 支持的最高多项式次数（>= 1）
        secret: 秘密 x，不给则随机采样
        rng: 随机源，默认使用配置中的种子

    Returns:
        保留秘密的 SRS
    """
    if degree < 1:
        raise InvalidSetup(f"SRS 次数必须 >= 1，实际 {degree}")
    if secret is None:
        rng = rng or random.Random(settings.DEFAULT_SEED)
        secret = rng.randrange(1, R)
    secret = int(secret)
    if secret % R == 0:
        raise InvalidSetup("秘密不能为 0")
    secret %= R

    g1 = to_jacobian(BN254_G1.generator)
    powers = []
    power = 1
    for _ in range(degree + 1):
        powers.append(to_affine(scalar_mul(power, g1)))
        power = power * secret % R
    srs = SRS(tuple(powers), G2_GENERATOR, g2_scalar_mul(secret, G2_GENERATOR), secret)
    logger.info(f"SRS 已生成，次数 {degree}")
    return srs


def root_of_unity(domain_size: int) -> FieldElement:
    """domain_size 次本原单位根 ω = 5^((r-1)/n)"""
    if domain_size < 1 or domain_size & (domain_size - 1):
        raise InvalidSetup(f"评估域大小必须是 2 的幂: {domain_size}")
    if domain_size > 1 << TWO_ADICITY:
        raise InvalidSetup(f"评估域大小超过 2^{TWO_ADICITY}")
    return BN254_SCALAR.element(pow(MULTIPLICATIVE_GENERATOR, (R - 1) // domain_size, R))


@dataclass(frozen=True)
class VerifierKey:
    """验证密钥：评估域、承诺布局和 G2 句柄"""
    domain_size: int
    omega: FieldElement
    num_z: int
    num_zw: int
    g2_gen: G2AffinePoint
    g2_x: G2AffinePoint

    @classmethod
    def from_srs(cls, srs: SRS, domain_size: int, num_z: int, num_zw: int) -> "VerifierKey":
        if num_z < 1 or num_zw < 0:
            raise InvalidSetup(f"承诺布局非法: num_z={num_z}, num_zw={num_zw}")
        return cls(domain_size, root_of_unity(domain_size), num_z, num_zw, srs.g2_gen, srs.g2_x)

    @property
    def num_commitments(self) -> int:
        return self.num_z + self.num_zw

    @property
    def proof_size(self) -> int:
        return self.num_commitments * (ENCODED_POINT_SIZE + ENCODED_SCALAR_SIZE) + 2 * ENCODED_POINT_SIZE

    def to_bytes(self) -> bytes:
        return b"".join([
            self.domain_size.to_bytes(8, "big"),
            fe_encode(self.omega),
            self.num_z.to_bytes(8, "big"),
            self.num_zw.to_bytes(8, "big"),
            g2_encode(self.g2_gen),
            g2_encode(self.g2_x),
        ])

    @classmethod
    def from_bytes(cls, data: bytes) -> "VerifierKey":
        expected = 8 + ENCODED_SCALAR_SIZE + 16 + 2 * ENCODED_G2_SIZE
        if len(data) != expected:
            raise WireFormatError(f"验证密钥长度不符: 期望 {expected}，实际 {len(data)}")
        domain_size = int.from_bytes(data[:8], "big")
        omega = fe_decode(data[8:40], BN254_SCALAR)
        if omega != root_of_unity(domain_size):
            raise InvalidSetup("ω 与评估域大小不匹配")
        num_z = int.from_bytes(data[40:48], "big")
        num_zw = int.from_bytes(data[48:56], "big")
        g2_gen = g2_decode(data[56:56 + ENCODED_G2_SIZE])
        g2_x = g2_decode(data[56 + ENCODED_G2_SIZE:])
        return cls(domain_size, omega, num_z, num_zw, g2_gen, g2_x)


# ---------------------------------------------------------------------------
# KZG
# ---------------------------------------------------------------------------

def kzg_commit(poly: Sequence[Union[int, FieldElement]], srs: SRS) -> JacobianPoint:
    """Σ coeff_i · [x^i]_1，系数从低次到高次"""
    if len(poly) > srs.degree + 1:
        raise DegreeTooLarge(f"多项式有 {len(poly)} 个系数，SRS 只支持次数 {srs.degree}")
    acc = canonical_infinity(BN254_G1)
    for coeff, base in zip(poly, srs.g1_powers):
        c = _scalar(coeff)
        if c:
            acc = point_add(acc, scalar_mul(c, to_jacobian(base)))
    return acc


def poly_eval(poly: Sequence[Union[int, FieldElement]], point: Union[int, FieldElement]) -> FieldElement:
    z = _scalar(point)
    acc = 0
    for coeff in reversed(poly):
        acc = (acc * z + _scalar(coeff)) % R
    return BN254_SCALAR.element(acc)


def kzg_open(
    poly: Sequence[Union[int, FieldElement]], point: Union[int, FieldElement], srs: SRS
) -> Tuple[FieldElement, JacobianPoint]:
    """
    打开 poly 在 point 处的值

    Returns:
        (poly(point), 商多项式 (poly - eval)/(X - point) 的承诺)
    """
    if len(poly) > srs.degree + 1:
        raise DegreeTooLarge(f"多项式有 {len(poly)} 个系数，SRS 只支持次数 {srs.degree}")
    z = _scalar(point)
    coeffs = [_scalar(c) for c in poly]
    if not coeffs:
        return BN254_SCALAR.zero(), canonical_infinity(BN254_G1)

    # 综合除法，从最高次往下
    quotient = [0] * (len(coeffs) - 1)
    acc = 0
    for i in range(len(coeffs) - 1, -1, -1):
        acc = (acc * z + coeffs[i]) % R
        if i > 0:
            quotient[i - 1] = acc
    return BN254_SCALAR.element(acc), kzg_commit(quotient, srs)


# ---------------------------------------------------------------------------
# 证明线格式与 Fiat-Shamir
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BatchedOpeningProof:
    """
    批量打开证明

    线格式：z 组承诺 || zω 组承诺（各64字节）|| 评估值（各32字节，z 组在前）|| W_z(64) || W_zω(64)
    """
    commitments: Tuple[bytes, ...]
    evals_z: Tuple[FieldElement, ...]
    evals_zw: Tuple[FieldElement, ...]
    w_z: bytes
    w_zw: bytes

    def to_bytes(self) -> bytes:
        parts = list(self.commitments)
        parts.extend(fe_encode(e) for e in self.evals_z)
        parts.extend(fe_encode(e) for e in self.evals_zw)
        parts.append(self.w_z)
        parts.append(self.w_zw)
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes, vk: VerifierKey) -> "BatchedOpeningProof":
        if len(data) != vk.proof_size:
            raise WireFormatError(f"证明长度不符: 期望 {vk.proof_size}，实际 {len(data)}")
        offset = 0
        commitments = []
        for _ in range(vk.num_commitments):
            commitments.append(data[offset:offset + ENCODED_POINT_SIZE])
            offset += ENCODED_POINT_SIZE
        evals = []
        for _ in range(vk.num_commitments):
            evals.append(fe_decode(data[offset:offset + ENCODED_SCALAR_SIZE], BN254_SCALAR))
            offset += ENCODED_SCALAR_SIZE
        w_z = data[offset:offset + ENCODED_POINT_SIZE]
        w_zw = data[offset + ENCODED_POINT_SIZE:]
        return cls(tuple(commitments), tuple(evals[:vk.num_z]), tuple(evals[vk.num_z:]), w_z, w_zw)


def _commitment_challenges(
    vk: VerifierKey, commitments: Sequence[bytes], salt: bytes = b""
) -> Tuple[FieldElement, FieldElement, Transcript]:
    """吸收验证密钥和承诺，派生 v、z"""
    t = Transcript.new(settings.TRANSCRIPT_DOMAIN.encode(), salt)
    t = absorb(t, b"vk", vk.to_bytes())
    for commitment in commitments:
        t = absorb(t, b"commitment", commitment)
    v, t = challenge(t, b"v")
    z, t = challenge(t, b"z")
    return v, z, t


def _opening_challenge(
    t: Transcript,
    evals_z: Sequence[FieldElement],
    evals_zw: Sequence[FieldElement],
    w_z: bytes,
    w_zw: bytes,
) -> Tuple[FieldElement, Transcript]:
    """吸收评估值和 W 点，派生 u"""
    for e in evals_z:
        t = absorb(t, b"eval_z", fe_encode(e))
    for e in evals_zw:
        t = absorb(t, b"eval_zw", fe_encode(e))
    t = absorb(t, b"w_z", w_z)
    t = absorb(t, b"w_zw", w_zw)
    return challenge(t, b"u")


def derive_challenges(proof: BatchedOpeningProof, vk: VerifierKey, salt: bytes = b"") -> Challenges:
    """按 v、z、u 的顺序派生挑战"""
    v, z, t = _commitment_challenges(vk, proof.commitments, salt)
    u, _ = _opening_challenge(t, proof.evals_z, proof.evals_zw, proof.w_z, proof.w_zw)
    return Challenges(u=u, v=v, z=z, omega=vk.omega)


def _combine_polys(polys: Sequence[Sequence[Union[int, FieldElement]]], v: int) -> List[int]:
    width = max((len(p) for p in polys), default=0)
    combined = [0] * width
    power = 1
    for poly in polys:
        for i, coeff in enumerate(poly):
            combined[i] = (combined[i] + power * _scalar(coeff)) % R
        power = power * v % R
    return combined


def create_batched_proof(
    polys_z: Sequence[Sequence[Union[int, FieldElement]]],
    polys_zw: Sequence[Sequence[Union[int, FieldElement]]],
    srs: SRS,
    vk: VerifierKey,
    salt: bytes = b"",
) -> BatchedOpeningProof:
    """
    诚实证明者：承诺全部多项式，在 z 和 zω 处批量打开

    Args:
        polys_z: 在 z 处打开的多项式（系数从低到高）
        polys_zw: 在 zω 处打开的多项式
        srs: 可信设置
        vk: 验证密钥（决定布局和 ω）
        salt: 转录盐值，需与验证时一致

    Returns:
        批量打开证明
    """
    if len(polys_z) != vk.num_z or len(polys_zw) != vk.num_zw:
        raise WireFormatError(
            f"多项式数量 ({len(polys_z)}, {len(polys_zw)}) 与布局 ({vk.num_z}, {vk.num_zw}) 不符"
        )
    commitments = tuple(point_encode(to_affine(kzg_commit(p, srs))) for p in list(polys_z) + list(polys_zw))
    v, z, _ = _commitment_challenges(vk, commitments, salt)
    zw = z * vk.omega

    evals_z = tuple(poly_eval(p, z) for p in polys_z)
    evals_zw = tuple(poly_eval(p, zw) for p in polys_zw)
    _, w_z = kzg_open(_combine_polys(polys_z, v.value), z, srs)
    _, w_zw = kzg_open(_combine_polys(polys_zw, v.value), zw, srs)
    return BatchedOpeningProof(
        commitments, evals_z, evals_zw, point_encode(to_affine(w_z)), point_encode(to_affine(w_zw))
    )


# ---------------------------------------------------------------------------
# 最终检查
# ---------------------------------------------------------------------------

def decode_policy(profile: VulnProfile) -> PointValidationPolicy:
    if profile.continue_on_invalid_point:
        return PointValidationPolicy.CONTINUE_ON_INVALID
    return PointValidationPolicy.REJECT_INVALID


def compute_F_E(
    decoded_commitments: Sequence[AffinePoint],
    evals_z: Sequence[FieldElement],
    evals_zw: Sequence[FieldElement],
    v: FieldElement,
    u: FieldElement,
    profile: VulnProfile,
) -> Tuple[JacobianPoint, JacobianPoint]:
    """
    F = Σ v^i·C_i + u·Σ v^j·C'_j，E = (Σ v^i·s_i + u·Σ v^j·s'_j)·G1

    前 len(evals_z) 个承诺属于 z 组，其余属于 zω 组。continue_on_invalid_point 下跳过 INVALID 承诺。
    """
    if not decoded_commitments:
        raise ValueError("承诺列表不能为空")
    num_z = len(evals_z)
    groups = (decoded_commitments[:num_z], decoded_commitments[num_z:])
    accs = []
    for group_index, group in enumerate(groups):
        acc = canonical_infinity(BN254_G1)
        power = 1
        for i, commitment in enumerate(group):
            if commitment.validity is PointValidity.INVALID:
                if not profile.continue_on_invalid_point:
                    raise InvalidPoint(f"承诺 {group_index}:{i} 不在曲线上")
                logger.debug(f"跳过非法承诺 {group_index}:{i}")
            else:
                acc = point_add(acc, scalar_mul(power, to_jacobian(commitment)))
            power = power * v.value % R
        accs.append(acc)
    F = point_add(accs[0], scalar_mul(u, accs[1]))

    def _batched(evals: Sequence[FieldElement]) -> int:
        total, power = 0, 1
        for e in evals:
            total = (total + power * e.value) % R
            power = power * v.value % R
        return total

    e_scalar = (_batched(evals_z) + u.value * _batched(evals_zw)) % R
    E = scalar_mul(e_scalar, to_jacobian(BN254_G1.generator))
    return F, E


@dataclass(frozen=True)
class CheckInputs:
    """最终配对检查的输入，只由 assemble_check_inputs 构造"""
    p0: JacobianPoint
    p1: JacobianPoint
    f: JacobianPoint
    e_point: JacobianPoint


def assemble_check_inputs(
    w_z: AffinePoint,
    w_zw: AffinePoint,
    F: JacobianPoint,
    E: JacobianPoint,
    u: FieldElement,
    z: FieldElement,
    omega: FieldElement,
) -> CheckInputs:
    """
    P1 = W_z + u·W_zω；P0 = -(((F - E) + z·W_z) + uzω·W_zω)

    W 点不看有效性标记，直接参与运算。
    """
    jw_z = to_jacobian(w_z)
    jw_zw = to_jacobian(w_zw)
    p1 = point_add(jw_z, scalar_mul(u, jw_zw))

    uzw = u * z * omega
    acc = point_add(F, point_negate(E))
    acc = point_add(acc, scalar_mul(z, jw_z))
    acc = point_add(acc, scalar_mul(uzw, jw_zw))
    return CheckInputs(p0=point_negate(acc), p1=p1, f=F, e_point=E)


def check_infinity(ci: CheckInputs, profile: VulnProfile) -> None:
    """
    第2步：P0/P1 是否为无穷远

    带最高位标志的点是群单位元（常数多项式的商即为无穷远），直接放行。
    有漏洞时只看这一位；加固后不带标志但 Z = 0 的点同样是无穷远，拒绝。
    """
    if profile.msb_infinity_check:
        return
    for index, point in enumerate((ci.p0, ci.p1)):
        if not is_infinity_msb(point) and point.Z.value == 0:
            raise InfinityPointRejected(f"P[{index}] 的 Z = 0 但没有无穷远标志")


def normalize_check_inputs(ci: CheckInputs, profile: VulnProfile) -> List[JacobianPoint]:
    """
    第3、4步：把 [P0, P1] 中不带无穷远标志的点作为一个数组共享批量归一化

    带标志的点原位保留，不进入求逆。两个标志都加固时 Z 检查先于求逆执行，报告的是第4步。
    """
    points = [ci.p0, ci.p1]
    finite = [index for index, point in enumerate(points) if not is_infinity_msb(point)]
    if not finite:
        return points

    policy = InversePolicy.FERMAT_NO_ZERO_CHECK if profile.fermat_zero_inverse else InversePolicy.CHECKED
    normalized = batch_normalize(
        [points[index] for index in finite],
        policy_inv=policy,
        reject_z_zero=not profile.shared_batch_normalize_no_z_check,
    )
    for index, point in zip(finite, normalized):
        points[index] = point
    return points


def pairing_check(
    normalized: Sequence[JacobianPoint],
    g2_gen: G2AffinePoint,
    g2_x: G2AffinePoint,
    profile: VulnProfile,
) -> bool:
    """第5步：e(P1, [x]_2) · e(P0, [1]_2) == 1"""
    policy = (
        PairingZeroPolicy.ZERO_IS_IDENTITY
        if profile.pairing_zero_is_identity
        else PairingZeroPolicy.REJECT_NON_GROUP_INPUT
    )
    p0, p1 = (to_affine(p, InversePolicy.FERMAT_NO_ZERO_CHECK) for p in normalized)
    return pairing_product_check([(p1, g2_x), (p0, g2_gen)], policy)


def final_pairing_check(ci: CheckInputs, srs: Union[SRS, VerifierKey], profile: VulnProfile) -> bool:
    """
    依次执行无穷远检查、共享批量归一化、配对乘积检查

    Raises:
        InfinityPointRejected / ZeroInverse / ZCoordinateZero / InvalidPairingInput: 加固的步骤拒绝
    """
    check_infinity(ci, profile)
    normalized = normalize_check_inputs(ci, profile)
    return pairing_check(normalized, srs.g2_gen, srs.g2_x, profile)


def verify(
    proof_bytes: bytes, vk: VerifierKey, profile: VulnProfile, salt: bytes = b""
) -> Tuple[Verdict, VerifierTrace]:
    """
    完整验证流水线

    Args:
        proof_bytes: 证明线格式
        vk: 验证密钥
        profile: 漏洞配置
        salt: 转录盐值

    Returns:
        (结论, 各阶段记录)

    Raises:
        WireFormatError: 长度与布局不符
    """
    if len(proof_bytes) != vk.proof_size:
        raise WireFormatError(f"证明长度不符: 期望 {vk.proof_size}，实际 {len(proof_bytes)}")

    from workflow.graph import verification_graph

    result = verification_graph.invoke({
        "proof_bytes": proof_bytes,
        "vk": vk,
        "profile": profile,
        "salt": salt,
        "stages": [],
    })
    rejection = result.get("rejection")
    if rejection is not None:
        verdict = Verdict(accepted=False, step=rejection["step"], reason=rejection["reason"])
        logger.warning(f"[{profile.name}] 拒绝: {verdict}")
    elif result.get("accepted"):
        verdict = Verdict(accepted=True)
        logger.info(f"[{profile.name}] 接受")
    else:
        verdict = Verdict(accepted=False, reason="配对等式不成立")
        logger.info(f"[{profile.name}] 拒绝: 配对等式不成立")
    trace = VerifierTrace(profile=profile.name, stages=result["stages"], verdict=verdict)
    return verdict, trace


def to_rejection(exc: LabError) -> dict:
    """把流水线异常转换成拒绝记录"""
    if isinstance(exc, NonCanonicalEncoding):
        return {"step": None, "reason": str(exc)}
    return {"step": rejection_step(exc), "reason": str(exc)}


# ---------------------------------------------------------------------------
# 跟踪输出
# ---------------------------------------------------------------------------

def _format_point(index: int, point: JacobianPoint) -> List[str]:
    X, Y, Z = point.coordinates()
    return [f"P[{index}]: {{ 0x{X:064x},", f"0x{Y:064x},", f"0x{Z:064x} }}"]


def format_batch_normalize(before: Sequence[JacobianPoint], after: Sequence[JacobianPoint]) -> str:
    """Before/After 两段，每个点三行十六进制坐标"""
    lines = ["Before batch_normalize"]
    for index, point in enumerate(before):
        lines.extend(_format_point(index, point))
    lines.append("After batch_normalize")
    for index, point in enumerate(after):
        lines.extend(_format_point(index, point))
    return "\n".join(lines)


def replay_reference_normalization(
    p0: Tuple[int, int, int] = REFERENCE_P0, curve: CurveParams = BN254_G1
) -> Tuple[List[JacobianPoint], List[JacobianPoint], str]:
    """
    在批量归一化入口注入参考 P[0] 与 P[1] = (0, 0, 0)，按有漏洞的策略重放

    Returns:
        (归一化前, 归一化后, 排版文本)
    """
    before = [jacobian(curve, *p0), jacobian(curve, 0, 0, 0)]
    after = batch_normalize(before, InversePolicy.FERMAT_NO_ZERO_CHECK, reject_z_zero=False)
    return before, after, format_batch_normalize(before, after)
