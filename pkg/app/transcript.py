"""
Fiat-Shamir 转录模块
SHA-256 累加器，每条记录按 4字节标签长度 || 标签 || 8字节数据长度 || 数据 成帧
"""

from dataclasses import dataclass, field
from typing import Tuple
import hashlib
import logging

from app.field import BN254_SCALAR, FieldElement, FieldParams

logger = logging.getLogger(__name__)


def _frame(label: bytes, data: bytes) -> bytes:
    return len(label).to_bytes(4, "big") + label + len(data).to_bytes(8, "big") + data


@dataclass(frozen=True)
class Transcript:
    """不可变转录，absorb / challenge 返回新对象"""
    state: bytes = b""
    records: Tuple[Tuple[bytes, bytes], ...] = field(default_factory=tuple)
    scalar_field: FieldParams = BN254_SCALAR

    @classmethod
    def new(cls, domain: bytes, salt: bytes = b"", scalar_field: FieldParams = BN254_SCALAR) -> "Transcript":
        """以域分隔标签和可选盐值开始"""
        t = cls(scalar_field=scalar_field)
        t = absorb(t, b"domain", domain)
        return absorb(t, b"salt", salt)


def absorb(t: Transcript, label: bytes, data: bytes) -> Transcript:
    """追加一条带长度前缀的记录"""
    frame = _frame(label, data)
    state = hashlib.sha256(t.state + frame).digest()
    return Transcript(state, t.records + ((label, data),), t.scalar_field)


def challenge(t: Transcript, label: bytes) -> Tuple[FieldElement, Transcript]:
    """
    派生一个挑战值

    Args:
        t: 当前转录
        label: 挑战标签

    Returns:
        (模标量域阶约化后的挑战, 吸收了摘要的新转录)
    """
    digest = hashlib.sha256(t.state + _frame(b"challenge", label)).digest()
    value = t.scalar_field.element(int.from_bytes(digest, "big"))
    return value, absorb(t, b"challenge:" + label, digest)


@dataclass(frozen=True)
class Challenges:
    """验证者在一次检查中用到的全部挑战"""
    u: FieldElement
    v: FieldElement
    z: FieldElement
    omega: FieldElement
