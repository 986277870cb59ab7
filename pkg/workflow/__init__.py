# 验证流水线（LangGraph）
