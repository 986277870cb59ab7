"""
扩域塔与双线性配对模块
Fq2 = Fq[i]/(i^2 + 1)，Fq6 = Fq2[v]/(v^3 - ξ)，Fq12 = Fq6[w]/(w^2 - v)，ξ = 9 + i
BN254 上的 optimal ate 配对：Miller 循环 + 最终幂

ZERO_IS_IDENTITY 策略在进入 Miller 循环前就把全零坐标或无穷远输入映射为 1。
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple
import logging

from app.curve import AffinePoint, is_on_curve, INFINITY_FLAG
from app.errors import InvalidPairingInput, InvalidPoint, NonCanonicalEncoding, WireFormatError, ZeroInverse
from app.field import BN254_BASE, BN254_SCALAR, FieldParams

logger = logging.getLogger(__name__)

P = BN254_BASE.modulus
R = BN254_SCALAR.modulus
ATE_LOOP_COUNT = 29793968203157093288  # 6u + 2
LOG_ATE_LOOP_COUNT = 63
ENCODED_G2_SIZE = 128


class PairingZeroPolicy(str, Enum):
    """配对对非群元素输入的处理"""
    ZERO_IS_IDENTITY = "zero_is_identity"  # e(0, R) = 1
    REJECT_NON_GROUP_INPUT = "reject_non_group_input"


class Fq2:
    """a + b*i，i^2 = -1"""

    __slots__ = ("c0", "c1", "params")

    def __init__(self, c0: int, c1: int = 0, params: FieldParams = BN254_BASE):
        p = params.modulus
        self.c0 = c0 % p
        self.c1 = c1 % p
        self.params = params

    @classmethod
    def zero(cls, params: FieldParams = BN254_BASE) -> "Fq2":
        return cls(0, 0, params)

    @classmethod
    def one(cls, params: FieldParams = BN254_BASE) -> "Fq2":
        return cls(1, 0, params)

    def __add__(self, other: "Fq2") -> "Fq2":
        return Fq2(self.c0 + other.c0, self.c1 + other.c1, self.params)

    def __sub__(self, other: "Fq2") -> "Fq2":
        return Fq2(self.c0 - other.c0, self.c1 - other.c1, self.params)

    def __neg__(self) -> "Fq2":
        return Fq2(-self.c0, -self.c1, self.params)

    def __mul__(self, other) -> "Fq2":
        if isinstance(other, int):
            return Fq2(self.c0 * other, self.c1 * other, self.params)
        t0 = self.c0 * other.c0
        t1 = self.c1 * other.c1
        cross = (self.c0 + self.c1) * (other.c0 + other.c1) - t0 - t1
        return Fq2(t0 - t1, cross, self.params)

    __rmul__ = __mul__

    def square(self) -> "Fq2":
        a, b = self.c0, self.c1
        return Fq2((a + b) * (a - b), 2 * a * b, self.params)

    def inverse(self) -> "Fq2":
        p = self.params.modulus
        norm = (self.c0 * self.c0 + self.c1 * self.c1) % p
        if norm == 0:
            raise ZeroInverse("Fq2 元素不可逆")
        inv = pow(norm, -1, p)
        return Fq2(self.c0 * inv, -self.c1 * inv, self.params)

    def conjugate(self) -> "Fq2":
        return Fq2(self.c0, -self.c1, self.params)

    def frobenius(self, power: int = 1) -> "Fq2":
        # p ≡ 3 (mod 4) 时 x -> x^p 就是共轭
        return self.conjugate() if power % 2 else self

    def mul_by_nonresidue(self) -> "Fq2":
        """乘以 ξ = 9 + i"""
        a, b = self.c0, self.c1
        return Fq2(9 * a - b, a + 9 * b, self.params)

    def __pow__(self, exponent: int) -> "Fq2":
        result, base = Fq2.one(self.params), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base.square()
            exponent >>= 1
        return result

    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Fq2) and self.c0 == other.c0 and self.c1 == other.c1

    def __hash__(self) -> int:
        return hash((self.c0, self.c1))

    def __repr__(self) -> str:
        return f"Fq2({self.c0}, {self.c1})"


class Fq6:
    """c0 + c1*v + c2*v^2，v^3 = ξ"""

    __slots__ = ("c0", "c1", "c2")

    def __init__(self, c0: Fq2, c1: Fq2, c2: Fq2):
        self.c0 = c0
        self.c1 = c1
        self.c2 = c2

    @classmethod
    def zero(cls) -> "Fq6":
        return cls(Fq2.zero(), Fq2.zero(), Fq2.zero())

    @classmethod
    def one(cls) -> "Fq6":
        return cls(Fq2.one(), Fq2.zero(), Fq2.zero())

    def __add__(self, other: "Fq6") -> "Fq6":
        return Fq6(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other: "Fq6") -> "Fq6":
        return Fq6(self.c0 - other.c0, self.c1 - other.c1, self.c2 - other.c2)

    def __neg__(self) -> "Fq6":
        return Fq6(-self.c0, -self.c1, -self.c2)

    def __mul__(self, other: "Fq6") -> "Fq6":
        a0, a1, a2 = self.c0, self.c1, self.c2
        b0, b1, b2 = other.c0, other.c1, other.c2
        t0 = a0 * b0
        t1 = a1 * b1
        t2 = a2 * b2
        c0 = t0 + ((a1 + a2) * (b1 + b2) - t1 - t2).mul_by_nonresidue()
        c1 = (a0 + a1) * (b0 + b1) - t0 - t1 + t2.mul_by_nonresidue()
        c2 = (a0 + a2) * (b0 + b2) - t0 - t2 + t1
        return Fq6(c0, c1, c2)

    def mul_by_fq2(self, k: Fq2) -> "Fq6":
        return Fq6(self.c0 * k, self.c1 * k, self.c2 * k)

    def mul_by_v(self) -> "Fq6":
        return Fq6(self.c2.mul_by_nonresidue(), self.c0, self.c1)

    def inverse(self) -> "Fq6":
        a0, a1, a2 = self.c0, self.c1, self.c2
        A = a0.square() - (a1 * a2).mul_by_nonresidue()
        B = a2.square().mul_by_nonresidue() - a0 * a1
        C = a1.square() - a0 * a2
        F = a0 * A + (a2 * B + a1 * C).mul_by_nonresidue()
        f_inv = F.inverse()
        return Fq6(A * f_inv, B * f_inv, C * f_inv)

    def frobenius(self, power: int = 1) -> "Fq6":
        result = self
        for _ in range(power % 6):
            result = Fq6(
                result.c0.conjugate(),
                result.c1.conjugate() * FROBENIUS_GAMMA[2],
                result.c2.conjugate() * FROBENIUS_GAMMA[4],
            )
        return result

    def is_zero(self) -> bool:
        return self.c0.is_zero() and self.c1.is_zero() and self.c2.is_zero()

    def __eq__(self, other) -> bool:
        return isinstance(other, Fq6) and self.c0 == other.c0 and self.c1 == other.c1 and self.c2 == other.c2

    def __repr__(self) -> str:
        return f"Fq6({self.c0}, {self.c1}, {self.c2})"


class Fq12:
    """c0 + c1*w，w^2 = v"""

    __slots__ = ("c0", "c1")

    def __init__(self, c0: Fq6, c1: Fq6):
        self.c0 = c0
        self.c1 = c1

    @classmethod
    def zero(cls) -> "Fq12":
        return cls(Fq6.zero(), Fq6.zero())

    @classmethod
    def one(cls) -> "Fq12":
        return cls(Fq6.one(), Fq6.zero())

    def __add__(self, other: "Fq12") -> "Fq12":
        return Fq12(self.c0 + other.c0, self.c1 + other.c1)

    def __sub__(self, other: "Fq12") -> "Fq12":
        return Fq12(self.c0 - other.c0, self.c1 - other.c1)

    def __neg__(self) -> "Fq12":
        return Fq12(-self.c0, -self.c1)

    def __mul__(self, other: "Fq12") -> "Fq12":
        a0, a1 = self.c0, self.c1
        b0, b1 = other.c0, other.c1
        t0 = a0 * b0
        t1 = a1 * b1
        return Fq12(t0 + t1.mul_by_v(), (a0 + a1) * (b0 + b1) - t0 - t1)

    def square(self) -> "Fq12":
        a0, a1 = self.c0, self.c1
        t = a0 * a1
        c0 = (a0 + a1) * (a0 + a1.mul_by_v()) - t - t.mul_by_v()
        return Fq12(c0, t + t)

    def inverse(self) -> "Fq12":
        a0, a1 = self.c0, self.c1
        t = (a0 * a0 - (a1 * a1).mul_by_v()).inverse()
        return Fq12(a0 * t, -(a1 * t))

    def conjugate(self) -> "Fq12":
        """x -> x^(p^6)"""
        return Fq12(self.c0, -self.c1)

    def frobenius(self, power: int = 1) -> "Fq12":
        result = self
        for _ in range(power % 12):
            c1 = result.c1
            result = Fq12(
                result.c0.frobenius(1),
                Fq6(
                    c1.c0.conjugate() * FROBENIUS_GAMMA[1],
                    c1.c1.conjugate() * FROBENIUS_GAMMA[3],
                    c1.c2.conjugate() * FROBENIUS_GAMMA[5],
                ),
            )
        return result

    def __pow__(self, exponent: int) -> "Fq12":
        result, base = Fq12.one(), self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base.square()
        return result

    def is_one(self) -> bool:
        return self == Fq12.one()

    def __eq__(self, other) -> bool:
        return isinstance(other, Fq12) and self.c0 == other.c0 and self.c1 == other.c1

    def __repr__(self) -> str:
        return f"Fq12({self.c0}, {self.c1})"


XI = Fq2(9, 1)
# w^(k(p-1)) = ξ^(k(p-1)/6)，Fq12 Frobenius 在 w 基上的系数
FROBENIUS_GAMMA = [XI ** ((P - 1) // 6 * k) for k in range(6)]
TWIST_B = Fq2(3) * XI.inverse()

# 扭曲线上的 Frobenius：π(x, y) = (conj(x)·ξ^((p-1)/3), conj(y)·ξ^((p-1)/2))
TWIST_FROB_X1 = XI ** ((P - 1) // 3)
TWIST_FROB_Y1 = XI ** ((P - 1) // 2)
TWIST_FROB_X2 = XI ** ((P * P - 1) // 3)
TWIST_FROB_Y2 = XI ** ((P * P - 1) // 2)

HARD_EXPONENT = (P ** 4 - P ** 2 + 1) // R


@dataclass(frozen=True)
class G2AffinePoint:
    """扭曲线 y^2 = x^3 + 3/ξ 上的仿射点"""
    x: Fq2
    y: Fq2
    infinity: bool = False

    def is_zero(self) -> bool:
        return not self.infinity and self.x.is_zero() and self.y.is_zero()


G2_INFINITY = G2AffinePoint(Fq2.zero(), Fq2.zero(), infinity=True)
G2_GENERATOR = G2AffinePoint(
    Fq2(
        10857046999023057135944570762232829481370756359578518086990519993285655852781,
        11559732032986387107991004021392285783925812861821192530917403151452391805634,
    ),
    Fq2(
        8495653923123431417604973247489272438418190587263600148770280649306958101930,
        4082367875863433681332203403145435568316851327593401208105741076214120093531,
    ),
)


def is_on_twist(point: G2AffinePoint) -> bool:
    if point.infinity:
        return True
    return point.y.square() == point.x.square() * point.x + TWIST_B


def g2_negate(point: G2AffinePoint) -> G2AffinePoint:
    if point.infinity:
        return point
    return G2AffinePoint(point.x, -point.y)


def g2_double(point: G2AffinePoint) -> G2AffinePoint:
    if point.infinity or point.y.is_zero():
        return G2_INFINITY
    lam = point.x.square() * 3 * (point.y * 2).inverse()
    x3 = lam.square() - point.x * 2
    y3 = lam * (point.x - x3) - point.y
    return G2AffinePoint(x3, y3)


def g2_add(p: G2AffinePoint, q: G2AffinePoint) -> G2AffinePoint:
    if p.infinity:
        return q
    if q.infinity:
        return p
    if p.x == q.x:
        if p.y == q.y:
            return g2_double(p)
        return G2_INFINITY
    lam = (q.y - p.y) * (q.x - p.x).inverse()
    x3 = lam.square() - p.x - q.x
    y3 = lam * (p.x - x3) - p.y
    return G2AffinePoint(x3, y3)


def g2_scalar_mul(k: int, point: G2AffinePoint) -> G2AffinePoint:
    k = int(k)
    if k < 0:
        return g2_scalar_mul(-k, g2_negate(point))
    acc = G2_INFINITY
    if k == 0:
        return acc
    for bit in bin(k)[2:]:
        acc = g2_double(acc)
        if bit == "1":
            acc = g2_add(acc, point)
    return acc


def g2_encode(point: G2AffinePoint) -> bytes:
    """128字节：x.c0 || x.c1 || y.c0 || y.c1，无穷远标志在 x.c0 的最高位"""
    x0 = point.x.c0 | (INFINITY_FLAG if point.infinity else 0)
    return b"".join(v.to_bytes(32, "big") for v in (x0, point.x.c1, point.y.c0, point.y.c1))


def g2_decode(data: bytes) -> G2AffinePoint:
    """解码并校验在扭曲线上"""
    if len(data) != ENCODED_G2_SIZE:
        raise WireFormatError(f"G2 编码必须是{ENCODED_G2_SIZE}字节，实际 {len(data)}")
    x0, x1, y0, y1 = (int.from_bytes(data[i:i + 32], "big") for i in range(0, ENCODED_G2_SIZE, 32))
    infinity = bool(x0 & INFINITY_FLAG)
    x0 &= INFINITY_FLAG - 1
    if any(v >= P for v in (x0, x1, y0, y1)):
        raise NonCanonicalEncoding("G2 坐标不是规范编码")
    if infinity:
        if x0 or x1 or y0 or y1:
            raise NonCanonicalEncoding("G2 无穷远点的坐标必须为 0")
        return G2_INFINITY
    point = G2AffinePoint(Fq2(x0, x1), Fq2(y0, y1))
    if not is_on_twist(point):
        raise InvalidPoint("G2 点不在扭曲线上")
    return point


def _line(r: G2AffinePoint, t: G2AffinePoint, xp: int, yp: int) -> Fq12:
    """
    过 ψ(r)、ψ(t) 的直线在 P = (xp, yp) 处的值，ψ(x, y) = (x·w^2, y·w^3)

    非竖直线：-yp + λ·xp·w + (yr - λ·xr)·w^3；竖直线：xp - xr·w^2
    """
    zero = Fq2.zero()
    if r.x != t.x:
        lam = (t.y - r.y) * (t.x - r.x).inverse()
    elif r.y == t.y:
        lam = r.x.square() * 3 * (r.y * 2).inverse()
    else:
        return Fq12(Fq6(Fq2(xp), -r.x, zero), Fq6.zero())
    return Fq12(Fq6(Fq2(-yp), zero, zero), Fq6(lam * xp, r.y - lam * r.x, zero))


def miller_loop(q: G2AffinePoint, p: AffinePoint) -> Fq12:
    """optimal ate Miller 循环（不含最终幂）"""
    if q.infinity or p.infinity:
        return Fq12.one()
    xp, yp = p.x.value, p.y.value
    r = q
    f = Fq12.one()
    for i in range(LOG_ATE_LOOP_COUNT, -1, -1):
        f = f.square() * _line(r, r, xp, yp)
        r = g2_double(r)
        if ATE_LOOP_COUNT & (1 << i):
            f = f * _line(r, q, xp, yp)
            r = g2_add(r, q)

    q1 = G2AffinePoint(q.x.conjugate() * TWIST_FROB_X1, q.y.conjugate() * TWIST_FROB_Y1)
    nq2 = G2AffinePoint(q.x * TWIST_FROB_X2, -(q.y * TWIST_FROB_Y2))
    f = f * _line(r, q1, xp, yp)
    r = g2_add(r, q1)
    f = f * _line(r, nq2, xp, yp)
    return f


def final_exponentiate(f: Fq12) -> Fq12:
    """f^((p^12 - 1)/r) = 简单部分 (p^6 - 1)(p^2 + 1) 再乘困难部分 (p^4 - p^2 + 1)/r"""
    f1 = f.conjugate() * f.inverse()
    f2 = f1.frobenius(2) * f1
    return f2 ** HARD_EXPONENT


@dataclass(frozen=True)
class GtElement:
    """配对值域中的元素"""
    value: Fq12

    @classmethod
    def one(cls) -> "GtElement":
        return cls(Fq12.one())

    def is_identity(self) -> bool:
        return self.value.is_one()

    def __mul__(self, other: "GtElement") -> "GtElement":
        return GtElement(self.value * other.value)

    def __pow__(self, exponent: int) -> "GtElement":
        return GtElement(self.value ** (exponent % R))


def _screen(p: AffinePoint, q: G2AffinePoint, policy: PairingZeroPolicy) -> bool:
    """
    按策略检查配对输入

    Returns:
        True 表示这一对直接贡献 1，不进入 Miller 循环
    """
    if policy is PairingZeroPolicy.REJECT_NON_GROUP_INPUT:
        if p.is_zero() or not is_on_curve(p):
            raise InvalidPairingInput(f"G1 输入 (0x{p.x.value:x}, 0x{p.y.value:x}) 不是群元素")
        if q.is_zero() or not is_on_twist(q):
            raise InvalidPairingInput("G2 输入不是群元素")
        return p.infinity or q.infinity

    if p.infinity or q.infinity:
        return True
    if p.is_zero() or q.is_zero():
        logger.debug("配对输入坐标全零，按无穷远点处理，e = 1")
        return True
    return False


def pairing(p: AffinePoint, q: G2AffinePoint, policy: PairingZeroPolicy = PairingZeroPolicy.REJECT_NON_GROUP_INPUT) -> GtElement:
    """
    e(P, Q)

    Args:
        p: G1 仿射点
        q: G2 仿射点
        policy: 非群元素输入的处理策略

    Returns:
        Gt 元素
    """
    if _screen(p, q, policy):
        return GtElement.one()
    return GtElement(final_exponentiate(miller_loop(q, p)))


def pairing_product_check(
    pairs: Iterable[Tuple[AffinePoint, G2AffinePoint]],
    policy: PairingZeroPolicy = PairingZeroPolicy.REJECT_NON_GROUP_INPUT,
) -> bool:
    """Π e(P_i, Q_i) == 1，共享一次最终幂"""
    acc = Fq12.one()
    for p, q in pairs:
        if _screen(p, q, policy):
            continue
        acc = acc * miller_loop(q, p)
    return final_exponentiate(acc).is_one()
