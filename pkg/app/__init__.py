# 零点伪造实验：域、曲线、配对、KZG 验证器与攻击
