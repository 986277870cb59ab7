import logging
from typing import Dict

from app.curve import JacobianPoint, point_decode, BN254_G1
from app.errors import LabError
from app.schemas import StageRecord
from app.verifier import (
    BatchedOpeningProof,
    assemble_check_inputs,
    check_infinity,
    compute_F_E,
    decode_policy,
    derive_challenges,
    format_batch_normalize,
    normalize_check_inputs,
    pairing_check,
    to_rejection,
)
from workflow.state import VerificationState

logger = logging.getLogger(__name__)


def _hex_point(point: JacobianPoint) -> str:
    X, Y, Z = point.coordinates()
    flag = " (inf)" if point.infinity else ""
    return f"(0x{X:064x}, 0x{Y:064x}, 0x{Z:064x}){flag}"


def _rejected(stage: str, exc: LabError) -> Dict:
    rejection = to_rejection(exc)
    logger.debug(f"{stage} 阶段拒绝: {exc}")
    return {
        "rejection": rejection,
        "stages": [StageRecord(stage=stage, values={"rejected": f"step={rejection['step']} {rejection['reason']}"})],
    }


def decode_node(state: VerificationState) -> Dict:
    """
    title: 解码
    desc: 拆分线格式，按第1步的策略解码所有承诺和 W 点
    """
    policy = decode_policy(state["profile"])
    try:
        proof = BatchedOpeningProof.from_bytes(state["proof_bytes"], state["vk"])
        commitments = [point_decode(c, BN254_G1, policy) for c in proof.commitments]
        w_z = point_decode(proof.w_z, BN254_G1, policy)
        w_zw = point_decode(proof.w_zw, BN254_G1, policy)
    except LabError as e:
        return _rejected("decode", e)

    values = {f"commitment[{i}]": c.validity.value for i, c in enumerate(commitments)}
    values["w_z"] = w_z.validity.value
    values["w_zw"] = w_zw.validity.value
    return {
        "proof": proof,
        "commitments": commitments,
        "w_z": w_z,
        "w_zw": w_zw,
        "stages": [StageRecord(stage="decode", values=values)],
    }


def challenges_node(state: VerificationState) -> Dict:
    """
    title: 挑战
    desc: Fiat-Shamir 派生 v、z、u
    """
    challenges = derive_challenges(state["proof"], state["vk"], state.get("salt", b""))
    values = {name: f"0x{getattr(challenges, name).value:064x}" for name in ("u", "v", "z", "omega")}
    return {"challenges": challenges, "stages": [StageRecord(stage="challenges", values=values)]}


def combine_node(state: VerificationState) -> Dict:
    """
    title: 组合
    desc: 计算 F、E，组装 P0、P1
    """
    proof = state["proof"]
    ch = state["challenges"]
    try:
        F, E = compute_F_E(state["commitments"], proof.evals_z, proof.evals_zw, ch.v, ch.u, state["profile"])
    except LabError as e:
        return _rejected("combine", e)
    ci = assemble_check_inputs(state["w_z"], state["w_zw"], F, E, ch.u, ch.z, ch.omega)
    values = {"F": _hex_point(ci.f), "E": _hex_point(ci.e_point), "P[0]": _hex_point(ci.p0), "P[1]": _hex_point(ci.p1)}
    return {"check_inputs": ci, "stages": [StageRecord(stage="combine", values=values)]}


def infinity_check_node(state: VerificationState) -> Dict:
    """
    title: 无穷远检查
    desc: 第2步，带标志的点为单位元；加固后拒绝不带标志的 Z = 0
    """
    try:
        check_infinity(state["check_inputs"], state["profile"])
    except LabError as e:
        return _rejected("infinity_check", e)
    return {"stages": [StageRecord(stage="infinity_check", values={"result": "pass"})]}


def normalize_node(state: VerificationState) -> Dict:
    """
    title: 批量归一化
    desc: 第3、4步，[P0, P1] 中不带标志的点共享一次求逆
    """
    ci = state["check_inputs"]
    before = [ci.p0, ci.p1]
    try:
        normalized = normalize_check_inputs(ci, state["profile"])
    except LabError as e:
        return _rejected("batch_normalize", e)
    record = StageRecord(stage="batch_normalize", text=format_batch_normalize(before, normalized))
    return {"normalized": normalized, "stages": [record]}


def pairing_node(state: VerificationState) -> Dict:
    """
    title: 配对检查
    desc: 第5步，e(P1, [x]_2) · e(P0, [1]_2) == 1
    """
    vk = state["vk"]
    try:
        ok = pairing_check(state["normalized"], vk.g2_gen, vk.g2_x, state["profile"])
    except LabError as e:
        return _rejected("pairing", e)
    return {"accepted": ok, "stages": [StageRecord(stage="pairing", values={"result": "1" if ok else "!= 1"})]}
