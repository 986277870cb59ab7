"""
素数域运算模块
提供按模数参数化的域元素、两种求逆策略（费马无零检查 / 检查）以及 Montgomery 批量求逆
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence
import logging

from ecdsa.numbertheory import is_prime

from app.errors import NonCanonicalEncoding, ParamsMismatch, WireFormatError, ZeroInverse, InvalidSetup

logger = logging.getLogger(__name__)

ENCODED_SCALAR_SIZE = 32


class InversePolicy(str, Enum):
    """求逆策略"""
    FERMAT_NO_ZERO_CHECK = "fermat_no_zero_check"  # a^(p-2)，inverse(0) = 0
    CHECKED = "checked"  # 0 没有逆元，直接报错


class FieldOp(str, Enum):
    """二元域运算"""
    ADD = "add"
    SUB = "sub"
    MUL = "mul"


@dataclass(frozen=True)
class FieldParams:
    """域参数"""
    modulus: int
    name: str

    def __post_init__(self):
        if self.modulus <= 3 or not is_prime(self.modulus):
            raise InvalidSetup(f"模数必须是大于3的素数: {self.name}")

    def element(self, value: int) -> "FieldElement":
        """把任意整数约化为本域元素"""
        return FieldElement(value % self.modulus, self)

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1, self)


class FieldElement:
    """域元素，构造后不可变"""

    __slots__ = ("value", "params")

    def __init__(self, value: int, params: FieldParams):
        if not 0 <= value < params.modulus:
            raise ValueError(f"{value} 不在 [0, {params.modulus}) 内")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "params", params)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement 不可变")

    def _check(self, other: "FieldElement") -> int:
        if other.params is not self.params and other.params != self.params:
            raise ParamsMismatch(f"域参数不一致: {self.params.name} vs {other.params.name}")
        return self.params.modulus

    def __add__(self, other: "FieldElement") -> "FieldElement":
        p = self._check(other)
        return FieldElement((self.value + other.value) % p, self.params)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        p = self._check(other)
        return FieldElement((self.value - other.value) % p, self.params)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        p = self._check(other)
        return FieldElement((self.value * other.value) % p, self.params)

    def __neg__(self) -> "FieldElement":
        return FieldElement(-self.value % self.params.modulus, self.params)

    def __pow__(self, exponent: int) -> "FieldElement":
        return fe_pow(self, exponent)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.value == other.value and self.params == other.params
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.params.modulus))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"FieldElement({self.value}, {self.params.name})"

    def is_zero(self) -> bool:
        return self.value == 0


def fe_decode(data: bytes, params: FieldParams) -> FieldElement:
    """
    解码32字节大端序的规范域元素

    Args:
        data: 32字节
        params: 域参数

    Returns:
        域元素

    Raises:
        WireFormatError: 长度不是32
        NonCanonicalEncoding: 数值 >= 模数
    """
    if len(data) != ENCODED_SCALAR_SIZE:
        raise WireFormatError(f"域元素编码必须是{ENCODED_SCALAR_SIZE}字节，实际 {len(data)}")
    value = int.from_bytes(data, "big")
    if value >= params.modulus:
        raise NonCanonicalEncoding(f"{params.name}: 0x{value:064x} 不是规范编码")
    return FieldElement(value, params)


def fe_encode(a: FieldElement) -> bytes:
    """编码为32字节大端序"""
    return a.value.to_bytes(ENCODED_SCALAR_SIZE, "big")


def fe_arith(a: FieldElement, b: FieldElement, op: FieldOp) -> FieldElement:
    """加 / 减 / 乘"""
    op = FieldOp(op)
    if op is FieldOp.ADD:
        return a + b
    if op is FieldOp.SUB:
        return a - b
    return a * b


def fe_pow(a: FieldElement, exponent: int) -> FieldElement:
    """平方-乘法求幂，exponent 为非负整数"""
    if exponent < 0:
        raise ValueError("指数必须非负")
    p = a.params.modulus
    result, base = 1, a.value
    while exponent:
        if exponent & 1:
            result = result * base % p
        base = base * base % p
        exponent >>= 1
    return FieldElement(result, a.params)


def fe_inverse(a: FieldElement, policy: InversePolicy = InversePolicy.CHECKED) -> FieldElement:
    """
    求逆元

    Args:
        a: 域元素
        policy: FERMAT_NO_ZERO_CHECK 无条件返回 a^(p-2)（因此 inverse(0) = 0）；
                CHECKED 对 0 报错

    Returns:
        逆元
    """
    if policy is InversePolicy.FERMAT_NO_ZERO_CHECK:
        return fe_pow(a, a.params.modulus - 2)
    if a.value == 0:
        raise ZeroInverse(f"{a.params.name}: 0 没有逆元")
    return FieldElement(pow(a.value, -1, a.params.modulus), a.params)


def fe_batch_inverse(items: Sequence[FieldElement], policy: InversePolicy = InversePolicy.CHECKED) -> List[FieldElement]:
    """
    Montgomery 批量求逆：前缀积、对总积做一次求逆、回代

    FERMAT_NO_ZERO_CHECK 下只要有一个 0，总积为 0，其逆为 0，回代后所有输出都是 0。

    Args:
        items: 非空、同一域参数的元素列表
        policy: 求逆策略

    Returns:
        逐元素的逆
    """
    if not items:
        raise ValueError("批量求逆需要非空列表")
    params = items[0].params
    for item in items[1:]:
        item._check(items[0])

    if policy is InversePolicy.CHECKED:
        for index, item in enumerate(items):
            if item.value == 0:
                raise ZeroInverse(f"批量求逆第 {index} 个元素为 0", index=index)

    prefix = [params.one()]
    for item in items:
        prefix.append(prefix[-1] * item)

    acc = fe_inverse(prefix[-1], policy)
    if acc.value == 0:
        logger.debug(f"批量求逆总积的逆为 0（{params.name}），所有输出被清零")

    result = [params.zero()] * len(items)
    for index in range(len(items) - 1, -1, -1):
        result[index] = acc * prefix[index]
        acc = acc * items[index]
    return result


BN254_BASE = FieldParams(
    21888242871839275222246405745257275088696311157297823662689037894645226208583, "bn254-base"
)
BN254_SCALAR = FieldParams(
    21888242871839275222246405745257275088548364400416034343698204186575808495617, "bn254-scalar"
)
TINY_13 = FieldParams(13, "tiny-13")
TINY_19 = FieldParams(19, "tiny-19")  # TINY_CURVE 的群阶
SECP256K1_BASE = FieldParams(
    0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F, "secp256k1-base"
)
SECP256K1_SCALAR = FieldParams(
    0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141, "secp256k1-scalar"
)
