"""
命令行入口

使用方法：
    python zero_lab.py setup
    python zero_lab.py prove
    python zero_lab.py forge --mode all-zero
    python zero_lab.py verify --profile vulnerable lab_data/forged.bin
    python zero_lab.py trace --profile vulnerable lab_data/forged.bin
    python zero_lab.py ecdsa-demo --policy vulnerable
    python zero_lab.py vectors --out lab_data/vectors.jsonl

退出码：0 接受，1 拒绝，2 用法错误
"""

import argparse
import logging
import random
import sys
from pathlib import Path
from typing import List, Optional

from app.attack import (
    EcdsaParams,
    EcdsaPolicy,
    EcdsaSignature,
    FillMode,
    ForgeryTemplate,
    build_vector_corpus,
    ecdsa_public_key,
    ecdsa_sign,
    ecdsa_verify,
    forge_zero_proof,
    hash_message,
)
from app.config import settings
from app.errors import LabError
from app.schemas import VulnProfile
from app.verifier import (
    SRS,
    VerifierKey,
    create_batched_proof,
    replay_reference_normalization,
    srs_setup,
    verify,
)

logger = logging.getLogger(__name__)

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """参数或文件错误，退出码 2"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _data_path(value: Optional[str], default_name: str) -> Path:
    return Path(value) if value else Path(settings.DATA_DIR) / default_name


def _read(path: Path) -> bytes:
    if not path.is_file():
        raise UsageError(f"文件不存在: {path}")
    return path.read_bytes()


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _profile(text: str) -> VulnProfile:
    try:
        return VulnProfile.parse(text)
    except ValueError as e:
        raise UsageError(str(e))


def _salt(value: Optional[str]) -> bytes:
    if not value:
        return b""
    try:
        return bytes.fromhex(value)
    except ValueError:
        raise UsageError(f"盐值必须是十六进制: {value}")


def _parse_poly(text: str) -> List[int]:
    try:
        return [int(part, 0) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"无法解析多项式系数: {text}")


def build_parser() -> argparse.ArgumentParser:
    """构建参数解析器"""
    parser = _Parser(prog="zero_lab", description="批量 KZG 零点伪造差分实验")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="随机种子")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("setup", help="生成 SRS 和验证密钥", parents=[common])
    p.add_argument("--degree", type=int, default=settings.SRS_DEGREE, help="SRS 次数")
    p.add_argument("--domain-size", type=int, default=settings.DOMAIN_SIZE, help="评估域大小")
    p.add_argument("--num-z", type=int, default=settings.LAYOUT_Z, help="在 z 处打开的承诺数")
    p.add_argument("--num-zw", type=int, default=settings.LAYOUT_ZW, help="在 zω 处打开的承诺数")
    p.add_argument("--secret", type=lambda s: int(s, 0), default=None, help="指定秘密（测试用）")
    p.add_argument("--srs", type=str, default=None, help="SRS 输出路径")
    p.add_argument("--vk", type=str, default=None, help="验证密钥输出路径")

    p = sub.add_parser("prove", help="生成诚实批量证明", parents=[common])
    p.add_argument("--srs", type=str, default=None, help="SRS 路径")
    p.add_argument("--vk", type=str, default=None, help="验证密钥路径")
    p.add_argument("--poly", action="append", default=None,
                   help="逗号分隔的系数（低次在前），按 z 组、zω 组顺序重复给出")
    p.add_argument("--salt", type=str, default=None, help="转录盐值（十六进制）")
    p.add_argument("--out", type=str, default=None, help="证明输出路径")

    p = sub.add_parser("forge", help="生成零点伪造证明", parents=[common])
    p.add_argument("--mode", choices=[m.value for m in FillMode], default=FillMode.ALL_ZERO_BYTES.value,
                   help="填充方式")
    p.add_argument("--vk", type=str, default=None, help="验证密钥路径")
    p.add_argument("--out", type=str, default=None, help="证明输出路径")

    for name, help_text in (("verify", "验证证明"), ("trace", "打印完整验证记录")):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.add_argument("proof", type=str, help="证明文件")
        p.add_argument("--profile", type=str, default="vulnerable",
                       help="vulnerable | hardened | fix-N | 五个逗号分隔的标志")
        p.add_argument("--vk", type=str, default=None, help="验证密钥路径")
        p.add_argument("--salt", type=str, default=None, help="转录盐值（十六进制）")
        if name == "trace":
            p.add_argument("--inject-reference", action="store_true",
                           help="额外打印在批量归一化入口注入参考 P[0] 的重放")

    p = sub.add_parser("ecdsa-demo", help="ECDSA (0, 0) 签名演示", parents=[common])
    p.add_argument("--policy", choices=[e.value for e in EcdsaPolicy], default=EcdsaPolicy.VULNERABLE_NO_RANGE_CHECK.value,
                   help="验证策略")
    p.add_argument("--curve", choices=["bn254", "secp256k1"], default=settings.ECDSA_CURVE, help="曲线")

    p = sub.add_parser("vectors", help="生成对抗样本库", parents=[common])
    p.add_argument("--out", type=str, required=True, help="输出路径（每行一条 JSON）")
    p.add_argument("--vk", type=str, default=None, help="验证密钥路径，不给则按配置现场生成")

    return parser


def cmd_setup(args) -> int:
    srs = srs_setup(args.degree, args.secret, random.Random(args.seed))
    vk = VerifierKey.from_srs(srs, args.domain_size, args.num_z, args.num_zw)
    srs_path = _data_path(args.srs, "srs.bin")
    vk_path = _data_path(args.vk, "vk.bin")
    _write(srs_path, srs.to_bytes())
    _write(vk_path, vk.to_bytes())
    print(f"✅ SRS (degree {srs.degree}) -> {srs_path}")
    print(f"✅ verifier key (domain {vk.domain_size}, layout {vk.num_z}+{vk.num_zw}) -> {vk_path}")
    return EXIT_ACCEPT


def cmd_prove(args) -> int:
    srs = SRS.from_bytes(_read(_data_path(args.srs, "srs.bin")))
    vk = VerifierKey.from_bytes(_read(_data_path(args.vk, "vk.bin")))
    if args.poly:
        polys = [_parse_poly(text) for text in args.poly]
        if len(polys) != vk.num_commitments:
            raise UsageError(f"需要 {vk.num_commitments} 个多项式，实际 {len(polys)}")
    else:
        rng = random.Random(args.seed)
        r = srs.g1_powers[0].curve.order
        polys = [[rng.randrange(r) for _ in range(srs.degree + 1)] for _ in range(vk.num_commitments)]
    proof = create_batched_proof(polys[:vk.num_z], polys[vk.num_z:], srs, vk, _salt(args.salt))
    out = _data_path(args.out, "proof.bin")
    _write(out, proof.to_bytes())
    print(f"✅ honest proof ({vk.proof_size} bytes) -> {out}")
    return EXIT_ACCEPT


def cmd_forge(args) -> int:
    vk = VerifierKey.from_bytes(_read(_data_path(args.vk, "vk.bin")))
    template = ForgeryTemplate.for_key(vk, FillMode(args.mode))
    proof = forge_zero_proof(template, random.Random(args.seed))
    out = _data_path(args.out, "forged.bin")
    _write(out, proof)
    print(f"✅ forged proof ({args.mode}, {len(proof)} bytes) -> {out}")
    return EXIT_ACCEPT


def cmd_verify(args) -> int:
    vk = VerifierKey.from_bytes(_read(_data_path(args.vk, "vk.bin")))
    proof = _read(Path(args.proof))
    profile = _profile(args.profile)
    verdict, trace = verify(proof, vk, profile, _salt(args.salt))

    if args.command == "trace":
        print(trace.render())
        if args.inject_reference:
            _, _, text = replay_reference_normalization()
            print("== reference replay ==")
            print(text)
    else:
        print(f"profile: {profile.name}")
    if verdict.accepted:
        print(f"✅ {verdict}")
        return EXIT_ACCEPT
    print(f"❌ {verdict}")
    return EXIT_REJECT


def cmd_ecdsa_demo(args) -> int:
    params = EcdsaParams.from_name(args.curve)
    policy = EcdsaPolicy(args.policy)
    rng = random.Random(args.seed)
    private_key = rng.randrange(1, params.n)
    public_key = ecdsa_public_key(params, private_key)
    msg_hash = hash_message(rng.getrandbits(256).to_bytes(32, "big"), params)

    honest = ecdsa_sign(params, private_key, msg_hash, rng)
    honest_ok = ecdsa_verify(params, public_key, msg_hash, honest, policy)
    zero_ok = ecdsa_verify(params, public_key, msg_hash, EcdsaSignature(0, 0), policy)

    print(f"curve: {params.curve.name}, policy: {policy.value}")
    print(f"honest signature: {'ACCEPT' if honest_ok else 'REJECT'}")
    print(f"(r, s) = (0, 0): {'ACCEPT' if zero_ok else 'REJECT'}")
    return EXIT_ACCEPT if zero_ok else EXIT_REJECT


def cmd_vectors(args) -> int:
    if args.vk:
        vk = VerifierKey.from_bytes(_read(Path(args.vk)))
    else:
        srs = srs_setup(settings.SRS_DEGREE, rng=random.Random(args.seed))
        vk = VerifierKey.from_srs(srs, settings.DOMAIN_SIZE, settings.LAYOUT_Z, settings.LAYOUT_ZW)
    records = build_vector_corpus(vk, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("".join(record.model_dump_json() + "\n" for record in records))
    print(f"✅ {len(records)} records -> {out}")
    return EXIT_ACCEPT


COMMANDS = {
    "setup": cmd_setup,
    "prove": cmd_prove,
    "forge": cmd_forge,
    "verify": cmd_verify,
    "trace": cmd_verify,
    "ecdsa-demo": cmd_ecdsa_demo,
    "vectors": cmd_vectors,
}


def run(argv: Optional[List[str]] = None) -> int:
    """
    执行一条命令

    Args:
        argv: 参数列表（不含程序名）

    Returns:
        退出码
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().rstrip())
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except LabError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    sys.exit(run())
