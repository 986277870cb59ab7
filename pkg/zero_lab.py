"""
零点伪造实验启动脚本

使用方法：
    python zero_lab.py setup
    python zero_lab.py forge --mode zero-w
    python zero_lab.py verify --profile vulnerable lab_data/forged.bin

功能：
    1. 生成测试用可信设置与验证密钥
    2. 生成诚实证明和零点伪造证明
    3. 在任意漏洞配置下验证并打印批量归一化前后的坐标
    4. ECDSA (0, 0) 签名绕过演示
"""

from app.cli import main


if __name__ == "__main__":
    main()
