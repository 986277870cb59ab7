from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field


STEP_NAMES = {
    1: "曲线上检查（非法点继续）",
    2: "无穷远判定（只看最高位）",
    3: "费马求逆（不检查 0）",
    4: "共享批量归一化（不拒绝 Z = 0）",
    5: "配对把 0 当作无穷远",
}

_FLAG_ORDER = (
    "continue_on_invalid_point",
    "msb_infinity_check",
    "fermat_zero_inverse",
    "shared_batch_normalize_no_z_check",
    "pairing_zero_is_identity",
)

_TRUE_WORDS = {"1", "true", "t", "yes", "y", "vuln", "v"}
_FALSE_WORDS = {"0", "false", "f", "no", "n", "fixed", "h"}


class VulnProfile(BaseModel):
    """漏洞配置：每个标志对应攻击链的一步，True 表示保留有漏洞的行为"""
    continue_on_invalid_point: bool = Field(True, description="第1步：解码遇到曲线外的点时继续")
    msb_infinity_check: bool = Field(True, description="第2步：只用 x 寄存器最高位判断无穷远")
    fermat_zero_inverse: bool = Field(True, description="第3步：费马求逆，inverse(0) = 0")
    shared_batch_normalize_no_z_check: bool = Field(True, description="第4步：共享批量归一化且不拒绝 Z = 0")
    pairing_zero_is_identity: bool = Field(True, description="第5步：配对把全零输入当作单位元")

    class Config:
        frozen = True

    @classmethod
    def vulnerable(cls) -> "VulnProfile":
        return cls()

    @classmethod
    def hardened(cls) -> "VulnProfile":
        return cls(**{name: False for name in _FLAG_ORDER})

    @classmethod
    def single_fix(cls, step: int) -> "VulnProfile":
        """除第 step 步外全部保留漏洞"""
        if step not in STEP_NAMES:
            raise ValueError(f"步骤编号必须在 1-5 之间: {step}")
        return cls(**{_FLAG_ORDER[step - 1]: False})

    @classmethod
    def from_flags(cls, flags: Tuple[bool, bool, bool, bool, bool]) -> "VulnProfile":
        if len(flags) != len(_FLAG_ORDER):
            raise ValueError(f"需要 {len(_FLAG_ORDER)} 个标志，实际 {len(flags)}")
        return cls(**dict(zip(_FLAG_ORDER, flags)))

    @classmethod
    def parse(cls, text: str) -> "VulnProfile":
        """
        解析配置字符串

        Args:
            text: "vulnerable" | "hardened" | "fix-N" | 五个逗号分隔的布尔值（按步骤顺序，true 为有漏洞）

        Returns:
            漏洞配置
        """
        value = text.strip().lower()
        if value == "vulnerable":
            return cls.vulnerable()
        if value == "hardened":
            return cls.hardened()
        if value.startswith("fix-"):
            try:
                step = int(value[4:])
            except ValueError:
                raise ValueError(f"无法解析配置: {text}")
            return cls.single_fix(step)

        parts = [part.strip() for part in value.split(",")]
        if len(parts) != len(_FLAG_ORDER):
            raise ValueError(f"无法解析配置: {text}")
        flags = []
        for part in parts:
            if part in _TRUE_WORDS:
                flags.append(True)
            elif part in _FALSE_WORDS:
                flags.append(False)
            else:
                raise ValueError(f"无法解析标志 '{part}'")
        return cls.from_flags(tuple(flags))

    def flags(self) -> Tuple[bool, ...]:
        return tuple(getattr(self, name) for name in _FLAG_ORDER)

    def hardened_steps(self) -> List[int]:
        return [step for step, flag in enumerate(self.flags(), start=1) if not flag]

    @property
    def name(self) -> str:
        hardened = self.hardened_steps()
        if not hardened:
            return "vulnerable"
        if len(hardened) == len(_FLAG_ORDER):
            return "hardened"
        if len(hardened) == 1:
            return f"fix-{hardened[0]}"
        return ",".join("1" if flag else "0" for flag in self.flags())


class Verdict(BaseModel):
    """验证结论"""
    accepted: bool = Field(..., description="是否接受")
    step: Optional[int] = Field(None, description="触发拒绝的步骤编号")
    reason: str = Field(default="", description="拒绝原因")

    def __str__(self) -> str:
        if self.accepted:
            return "ACCEPT"
        if self.step is None:
            return f"REJECT: {self.reason}"
        return f"REJECT (step {self.step}: {STEP_NAMES[self.step]}): {self.reason}"


class StageRecord(BaseModel):
    """验证流水线中一个阶段的中间值"""
    stage: str = Field(..., description="阶段名")
    values: Dict[str, str] = Field(default_factory=dict, description="中间值（十六进制或标记）")
    text: Optional[str] = Field(None, description="预先排版的文本块")


class VerifierTrace(BaseModel):
    """一次验证的完整记录"""
    profile: str = Field(..., description="漏洞配置名")
    stages: List[StageRecord] = Field(default_factory=list, description="按执行顺序的阶段记录")
    verdict: Optional[Verdict] = Field(None, description="最终结论")

    def stage(self, name: str) -> Optional[StageRecord]:
        for record in self.stages:
            if record.stage == name:
                return record
        return None

    def render(self) -> str:
        lines = [f"profile: {self.profile}"]
        for record in self.stages:
            lines.append(f"== {record.stage} ==")
            for key, value in record.values.items():
                lines.append(f"{key}: {value}")
            if record.text:
                lines.append(record.text)
        if self.verdict is not None:
            lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


class VectorRecord(BaseModel):
    """对抗样本库中的一条记录"""
    category: str = Field(..., description="类别: all_zero_proof, zero_w_proof, z_zero_points, ecdsa_zero_signature 等")
    payload: str = Field(..., description="十六进制载荷")
    profile: str = Field(..., description="漏洞配置或 ECDSA 策略")
    expected: str = Field(..., description="期望结论: ACCEPT / REJECT")
    step: Optional[int] = Field(None, description="期望触发的步骤编号")
    extra: Dict[str, Any] = Field(default_factory=dict, description="附加信息")
