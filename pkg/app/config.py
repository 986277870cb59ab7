from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    LOG_LEVEL: str = "INFO"
    DEFAULT_SEED: int = 20240229  # 所有命令的默认随机种子，保证可复现

    # 可信设置 / 验证密钥布局
    SRS_DEGREE: int = 4  # SRS 支持的最高多项式次数
    DOMAIN_SIZE: int = 16  # 评估域大小（2的幂）
    LAYOUT_Z: int = 2  # 在 z 处打开的承诺数量
    LAYOUT_ZW: int = 1  # 在 zω 处打开的承诺数量
    TRANSCRIPT_DOMAIN: str = "zero-lab/batched-kzg/v1"  # Fiat-Shamir 域分隔标签

    # ECDSA 实验曲线：bn254 或 secp256k1
    ECDSA_CURVE: str = "bn254"

    # 命令行输出目录
    DATA_DIR: str = "./lab_data"

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"


settings = Settings()
