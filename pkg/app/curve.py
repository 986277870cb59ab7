"""
短 Weierstrass 曲线运算模块（y^2 = x^3 + b）
三种点表示：字节数组（EncodedPoint）、仿射坐标（AffinePoint）、Jacobian 射影坐标（JacobianPoint）

无穷远点标志放在 x 寄存器的第 255 位，全零编码因此不是无穷远点。
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple, Union
import logging

from app.errors import InvalidPoint, InvalidSetup, NonCanonicalEncoding, WireFormatError, ZCoordinateZero
from app.field import (
    BN254_BASE,
    BN254_SCALAR,
    SECP256K1_BASE,
    SECP256K1_SCALAR,
    TINY_13,
    TINY_19,
    FieldElement,
    FieldParams,
    InversePolicy,
    fe_batch_inverse,
    fe_inverse,
)

logger = logging.getLogger(__name__)

INFINITY_FLAG = 1 << 255
ENCODED_POINT_SIZE = 64

EncodedPoint = bytes
Scalar = Union[int, FieldElement]


class PointValidity(str, Enum):
    """解码时写入的有效性标记"""
    VALID = "valid"
    INVALID = "invalid"


class PointValidationPolicy(str, Enum):
    """解码时遇到曲线外的点如何处理"""
    REJECT_INVALID = "reject_invalid"
    CONTINUE_ON_INVALID = "continue_on_invalid"


@dataclass(frozen=True)
class CurveParams:
    """曲线参数，a = 0"""
    name: str
    base_field: FieldParams
    scalar_field: FieldParams
    b: FieldElement
    generator_xy: Tuple[int, int]

    def __post_init__(self):
        gx, gy = self.generator_xy
        p = self.base_field.modulus
        if (gy * gy - gx * gx * gx - self.b.value) % p != 0:
            raise InvalidSetup(f"{self.name}: 生成元不在曲线上")

    @property
    def generator(self) -> "AffinePoint":
        gx, gy = self.generator_xy
        return AffinePoint(self, FieldElement(gx, self.base_field), FieldElement(gy, self.base_field))

    @property
    def order(self) -> int:
        return self.scalar_field.modulus

    @property
    def supports_flag_encoding(self) -> bool:
        """模数占用第 255 位的曲线无法携带无穷远标志"""
        return self.base_field.modulus < INFINITY_FLAG


@dataclass(frozen=True)
class AffinePoint:
    """仿射点 (x, y)，x 存放在 256 位寄存器中"""
    curve: CurveParams
    x: FieldElement
    y: FieldElement
    infinity: bool = False
    validity: PointValidity = PointValidity.VALID

    @property
    def x_register(self) -> int:
        return self.x.value | (INFINITY_FLAG if self.infinity else 0)

    def is_zero(self) -> bool:
        """(0, 0) 伪点：坐标全零且没有无穷远标志"""
        return not self.infinity and self.x.value == 0 and self.y.value == 0


@dataclass(frozen=True)
class JacobianPoint:
    """Jacobian 点，(x, y) = (X/Z^2, Y/Z^3)"""
    curve: CurveParams
    X: FieldElement
    Y: FieldElement
    Z: FieldElement
    infinity: bool = False

    @property
    def x_register(self) -> int:
        return self.X.value | (INFINITY_FLAG if self.infinity else 0)

    def coordinates(self) -> Tuple[int, int, int]:
        return self.X.value, self.Y.value, self.Z.value

    def is_all_zero(self) -> bool:
        return self.X.value == 0 and self.Y.value == 0 and self.Z.value == 0


def affine_infinity(curve: CurveParams) -> AffinePoint:
    zero = curve.base_field.zero()
    return AffinePoint(curve, zero, zero, infinity=True)


def canonical_infinity(curve: CurveParams) -> JacobianPoint:
    """规范无穷远点：Z = 0 且带标志"""
    base = curve.base_field
    return JacobianPoint(curve, base.zero(), base.one(), base.zero(), infinity=True)


def set_infinity(point: Union[AffinePoint, JacobianPoint]) -> Union[AffinePoint, JacobianPoint]:
    """写入无穷远标志"""
    if isinstance(point, AffinePoint):
        return affine_infinity(point.curve)
    return canonical_infinity(point.curve)


def jacobian(curve: CurveParams, x: int, y: int, z: int) -> JacobianPoint:
    """从整数坐标构造 Jacobian 点（不做任何校验）"""
    base = curve.base_field
    return JacobianPoint(curve, base.element(x), base.element(y), base.element(z))


def is_on_curve(point: AffinePoint) -> bool:
    """y^2 = x^3 + b，或带无穷远标志"""
    if point.infinity:
        return True
    x, y = point.x, point.y
    return y * y == x * x * x + point.curve.b


def is_infinity_msb(point: Union[AffinePoint, JacobianPoint]) -> bool:
    """读取 x 寄存器的最高位（第 255 位）"""
    return bool(point.x_register >> 255)


def point_decode(
    enc: EncodedPoint,
    curve: CurveParams,
    policy: PointValidationPolicy = PointValidationPolicy.REJECT_INVALID,
) -> AffinePoint:
    """
    解码64字节 x||y 点

    Args:
        enc: 64字节编码
        curve: 曲线参数
        policy: REJECT_INVALID 遇到曲线外点报错；CONTINUE_ON_INVALID 标记为 INVALID 后继续

    Returns:
        仿射点
    """
    if len(enc) != ENCODED_POINT_SIZE:
        raise WireFormatError(f"点编码必须是{ENCODED_POINT_SIZE}字节，实际 {len(enc)}")
    if not curve.supports_flag_encoding:
        raise WireFormatError(f"{curve.name} 不支持带标志位的点编码")

    base = curve.base_field
    x_raw = int.from_bytes(enc[:32], "big")
    y_raw = int.from_bytes(enc[32:], "big")
    infinity = bool(x_raw & INFINITY_FLAG)
    x_val = x_raw & (INFINITY_FLAG - 1)
    if x_val >= base.modulus or y_raw >= base.modulus:
        raise NonCanonicalEncoding(f"{curve.name}: 点坐标不是规范编码")
    if infinity:
        if x_val or y_raw:
            raise NonCanonicalEncoding(f"{curve.name}: 无穷远点的坐标必须为 0")
        return affine_infinity(curve)

    point = AffinePoint(curve, FieldElement(x_val, base), FieldElement(y_raw, base))
    if is_on_curve(point):
        return point
    if policy is PointValidationPolicy.REJECT_INVALID:
        raise InvalidPoint(f"{curve.name}: (0x{x_val:064x}, 0x{y_raw:064x}) 不在曲线上")
    logger.debug(f"点 (0x{x_val:x}, 0x{y_raw:x}) 不在曲线上，标记为 INVALID 并继续")
    return AffinePoint(curve, point.x, point.y, validity=PointValidity.INVALID)


def point_encode(point: AffinePoint) -> EncodedPoint:
    """编码为64字节 x||y，无穷远点在 x 半部置标志位"""
    if not point.curve.supports_flag_encoding:
        raise WireFormatError(f"{point.curve.name} 不支持带标志位的点编码")
    return point.x_register.to_bytes(32, "big") + point.y.value.to_bytes(32, "big")


def to_jacobian(point: AffinePoint) -> JacobianPoint:
    """仿射 -> Jacobian；有效性标记不参与，非法点照样进入运算"""
    if point.infinity:
        return canonical_infinity(point.curve)
    return JacobianPoint(point.curve, point.x, point.y, point.curve.base_field.one())


def to_affine(point: JacobianPoint, policy: InversePolicy = InversePolicy.CHECKED) -> AffinePoint:
    """
    Jacobian -> 仿射

    Args:
        point: Jacobian 点
        policy: CHECKED 下 Z = 0 报 ZCoordinateZero；FERMAT_NO_ZERO_CHECK 下 zinv = 0

    Returns:
        仿射点（曲线外的结果标记为 INVALID）
    """
    if point.infinity:
        return affine_infinity(point.curve)
    if point.Z.value == 0 and policy is InversePolicy.CHECKED:
        raise ZCoordinateZero("Z = 0 的点无法转换为仿射坐标", index=0)
    zinv = fe_inverse(point.Z, policy)
    zinv2 = zinv * zinv
    result = AffinePoint(point.curve, point.X * zinv2, point.Y * zinv2 * zinv)
    if is_on_curve(result):
        return result
    return AffinePoint(point.curve, result.x, result.y, validity=PointValidity.INVALID)


def point_double(point: JacobianPoint) -> JacobianPoint:
    """
    倍点：S = 4XY^2, M = 3X^2, X' = M^2 - 2S, Y' = M(S - X') - 8Y^4, Z' = 2YZ

    只有带标志的无穷远点走捷径；(0, 0, 1) 会得到 (0, 0, 0)。
    """
    if point.infinity:
        return point
    X, Y, Z = point.X, point.Y, point.Z
    yy = Y * Y
    s = X * yy
    s = s + s
    s = s + s
    xx = X * X
    m = xx + xx + xx
    x3 = m * m - (s + s)
    yyyy = yy * yy
    eight_yyyy = yyyy + yyyy
    eight_yyyy = eight_yyyy + eight_yyyy
    eight_yyyy = eight_yyyy + eight_yyyy
    y3 = m * (s - x3) - eight_yyyy
    yz = Y * Z
    return JacobianPoint(point.curve, x3, y3, yz + yz)


def point_add(p: JacobianPoint, q: JacobianPoint) -> JacobianPoint:
    """
    Jacobian 加法

    U1 == U2 且 S1 == S2 时转入倍点，因此 (0,0,*) 这类退化输入一定走到倍点的清零路径。
    """
    if p.infinity:
        return q
    if q.infinity:
        return p
    z1z1 = p.Z * p.Z
    z2z2 = q.Z * q.Z
    u1 = p.X * z2z2
    u2 = q.X * z1z1
    s1 = p.Y * z2z2 * q.Z
    s2 = q.Y * z1z1 * p.Z
    if u1 == u2:
        if s1 == s2:
            return point_double(p)
        return canonical_infinity(p.curve)
    h = u2 - u1
    r = s2 - s1
    hh = h * h
    hhh = hh * h
    u1hh = u1 * hh
    x3 = r * r - hhh - (u1hh + u1hh)
    y3 = r * (u1hh - x3) - s1 * hhh
    z3 = h * p.Z * q.Z
    return JacobianPoint(p.curve, x3, y3, z3)


def point_negate(point: JacobianPoint) -> JacobianPoint:
    if point.infinity:
        return point
    return JacobianPoint(point.curve, point.X, -point.Y, point.Z)


def scalar_mul(k: Scalar, point: JacobianPoint) -> JacobianPoint:
    """从高位到低位的倍点-加法"""
    k = int(k)
    if k < 0:
        return scalar_mul(-k, point_negate(point))
    acc = canonical_infinity(point.curve)
    if k == 0:
        return acc
    for bit in bin(k)[2:]:
        acc = point_double(acc)
        if bit == "1":
            acc = point_add(acc, point)
    return acc


def batch_normalize(
    points: Sequence[JacobianPoint],
    policy_inv: InversePolicy = InversePolicy.CHECKED,
    reject_z_zero: bool = True,
) -> List[JacobianPoint]:
    """
    共享一次求逆的批量归一化

    Args:
        points: 非空 Jacobian 点列表
        policy_inv: Z 列批量求逆的策略
        reject_z_zero: 为 True 时，任何 Z = 0 的点在修改前就报错

    Returns:
        (X*zinv^2, Y*zinv^3, 1) 列表；FERMAT_NO_ZERO_CHECK 下一个 Z = 0 会把所有点清成 (0, 0, 1)
    """
    if not points:
        raise ValueError("批量归一化需要非空列表")
    if reject_z_zero:
        for index, point in enumerate(points):
            if point.Z.value == 0:
                raise ZCoordinateZero(f"第 {index} 个点的 Z 坐标为 0", index=index)

    try:
        zinvs = fe_batch_inverse([point.Z for point in points], policy_inv)
    except Exception as e:
        logger.warning(f"批量归一化失败: {e}")
        raise

    one = points[0].curve.base_field.one()
    normalized = []
    for point, zinv in zip(points, zinvs):
        zinv2 = zinv * zinv
        normalized.append(JacobianPoint(point.curve, point.X * zinv2, point.Y * zinv2 * zinv, one))
    return normalized


def normalize_independently(points: Sequence[JacobianPoint]) -> List[JacobianPoint]:
    """逐点归一化，只在 CHECKED 策略下提供（Z = 0 直接报错）"""
    normalized = []
    for index, point in enumerate(points):
        if point.Z.value == 0:
            raise ZCoordinateZero(f"第 {index} 个点的 Z 坐标为 0", index=index)
        normalized.append(to_jacobian(to_affine(point, InversePolicy.CHECKED)))
    return normalized


BN254_G1 = CurveParams("bn254-g1", BN254_BASE, BN254_SCALAR, BN254_BASE.element(3), (1, 2))

# y^2 = x^3 + 2 over F13，群阶为素数 19，只用于穷举群律测试
TINY_CURVE = CurveParams("tiny-13", TINY_13, TINY_19, TINY_13.element(2), (1, 4))

SECP256K1 = CurveParams(
    "secp256k1",
    SECP256K1_BASE,
    SECP256K1_SCALAR,
    SECP256K1_BASE.element(7),
    (
        0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798,
        0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8,
    ),
)
