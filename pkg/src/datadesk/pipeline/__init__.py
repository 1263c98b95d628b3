"""Conversation pipeline: task mapping, dataset resolution, plan translation,
session orchestration and explanation."""

from .agent import AgentInterface, DeterministicAgent, LlmAgent, RecordingAgent
from .intents import IntentRule, extract_k, extract_topic, load_rules, match_intent
from .plans import (
    AggPlan,
    BarChart,
    Choropleth,
    ClusterScatter,
    MqlPlan,
    QueryPlan,
    TrendLine,
    VizDirective,
    VizPlan,
    describe_plan,
)
from .resolver import ResolvedData, resolve_data, score_descriptions
from .session import (
    ArtifactRecord,
    ChatTurn,
    ExecFailure,
    Session,
    SessionConfig,
    serialize_result,
    serialize_table,
    turn_document,
    write_transcript,
)
from .tasks import Task, TaskList
from .translator import translate

__all__ = [
    "AgentInterface", "AggPlan", "ArtifactRecord", "BarChart", "ChatTurn",
    "Choropleth", "ClusterScatter", "DeterministicAgent", "ExecFailure",
    "IntentRule", "LlmAgent", "MqlPlan", "QueryPlan", "RecordingAgent",
    "ResolvedData", "Session", "SessionConfig", "Task", "TaskList",
    "TrendLine", "VizDirective", "VizPlan",
    "describe_plan", "extract_k", "extract_topic", "load_rules",
    "match_intent", "resolve_data", "score_descriptions", "serialize_result",
    "serialize_table", "translate", "turn_document", "write_transcript",
]
