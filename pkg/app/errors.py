"""
实验室异常定义
所有错误都继承 LabError（ValueError 子类），调用方可以统一捕获
"""

from typing import Optional


class LabError(ValueError):
    """实验室基础异常"""


class NonCanonicalEncoding(LabError):
    """字节编码不是规范形式（数值 >= 模数）"""


class ParamsMismatch(LabError):
    """两个域元素属于不同的域参数"""


class ZeroInverse(LabError):
    """对 0 求逆（Checked 策略）"""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class InvalidPoint(LabError):
    """点不在曲线上"""


class ZCoordinateZero(LabError):
    """射影坐标 Z = 0 的点被拒绝"""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class InfinityPointRejected(LabError):
    """配对输入被识别为无穷远点"""


class InvalidPairingInput(LabError):
    """配对输入不是群元素"""


class InvalidSetup(LabError):
    """可信设置参数非法"""


class DegreeTooLarge(LabError):
    """多项式次数超过 SRS 支持范围"""


class WireFormatError(LabError):
    """线格式长度或布局错误"""


class InvalidPrivateKey(LabError):
    """ECDSA 私钥超出 [1, n-1]"""
