from typing import Literal
from langgraph.graph import StateGraph, START, END
from workflow.state import VerificationState
from workflow.nodes import (
    decode_node,
    challenges_node,
    combine_node,
    infinity_check_node,
    normalize_node,
    pairing_node,
)

PIPELINE = [
    ("decode", decode_node),
    ("challenges", challenges_node),
    ("combine", combine_node),
    ("infinity_check", infinity_check_node),
    ("normalize", normalize_node),
    ("pairing", pairing_node),
]


def should_continue(state: VerificationState) -> Literal["continue", "stop"]:
    """
    title: 决策是否继续
    desc: 已经记录拒绝时立即结束（最早触发的步骤即为拒绝原因）
    """
    if state.get("rejection") is None:
        return "continue"
    else:
        return "stop"


def build_verification_graph() -> StateGraph:
    """
    构建验证工作流图
    """
    workflow = StateGraph(VerificationState)

    for name, node in PIPELINE:
        workflow.add_node(name, node)

    workflow.add_edge(START, PIPELINE[0][0])

    # 每个阶段之后都可能提前结束
    for (name, _), (next_name, _) in zip(PIPELINE, PIPELINE[1:]):
        workflow.add_conditional_edges(
            name,
            should_continue,
            {
                "continue": next_name,
                "stop": END
            }
        )

    workflow.add_edge(PIPELINE[-1][0], END)

    return workflow.compile()


# 创建全局图实例
verification_graph = build_verification_graph()
