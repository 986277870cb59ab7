import operator
from typing import Annotated, Dict, List, Optional, TypedDict

from app.curve import AffinePoint, JacobianPoint
from app.schemas import StageRecord, VulnProfile
from app.transcript import Challenges
from app.verifier import BatchedOpeningProof, CheckInputs, VerifierKey


class VerificationState(TypedDict, total=False):
    """验证流水线状态"""
    # 输入
    proof_bytes: bytes
    vk: VerifierKey
    profile: VulnProfile
    salt: bytes

    # 各阶段产物
    proof: BatchedOpeningProof
    commitments: List[AffinePoint]
    w_z: AffinePoint
    w_zw: AffinePoint
    challenges: Challenges
    check_inputs: CheckInputs
    normalized: List[JacobianPoint]

    # 结论
    accepted: bool
    rejection: Optional[Dict]  # {"step": int | None, "reason": str}
    stages: Annotated[List[StageRecord], operator.add]
