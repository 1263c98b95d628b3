"""Agents: the query-to-tasks mapper and the explanation generator.

The deterministic agent is the tested default; the LLM adapter speaks the
documented JSON contract (docs/formats.md) over HTTP and must return the
same task schema, which is validated structurally on receipt.
"""

from __future__ import annotations

import os
from abc import ABC, abstractmethod
from typing import Any

import httpx

from ..errors import AgentError, UnmappableQuery
from ..store.table import Table
from ..viz.render import format_value
from .intents import IntentRule, extract_k, extract_topic, load_rules, match_intent
from .plans import AggPlan, MqlPlan, QueryPlan, describe_plan
from .tasks import Task, TaskList

ENDPOINT_ENV = "DATADESK_LLM_ENDPOINT"
API_KEY_ENV = "DATADESK_LLM_API_KEY"


class AgentInterface(ABC):
    """μ and ρ behind one interface; implementations must be deterministic
    given (input, seed) when running in deterministic mode."""

    @abstractmethod
    def map_query(self, query: str) -> TaskList:
        ...

    @abstractmethod
    def explain(self, task: Task | None, plan: QueryPlan | None, result: Any) -> str:
        ...


# --- deterministic default ------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (int, float)):
        return format_value(float(value))
    return str(value)


def _peak_and_low(keys: list, values: list) -> tuple:
    peak_i = max(range(len(values)), key=lambda i: (values[i], -i))
    low_i = min(range(len(values)), key=lambda i: (values[i], i))
    return keys[peak_i], values[peak_i], keys[low_i], values[low_i]


class DeterministicAgent(AgentInterface):
    """Rule-table mapper plus template explainer.

    Every number a template emits is a cell of the result it explains; the
    test harness asserts this anti-hallucination property.
    """

    def __init__(self, rules: list[IntentRule] | None = None):
        self.rules = rules if rules is not None else load_rules()

    def map_query(self, query: str) -> TaskList:
        if not query or not query.strip():
            raise UnmappableQuery(query)
        rule = match_intent(query, self.rules)
        if rule is None:
            raise UnmappableQuery(query)
        topic = extract_topic(query, rule)
        data_need = rule.data_need.replace("{topic}", topic)
        query_need = rule.query_need.replace("{topic}", topic).replace(
            "{k}", str(extract_k(query, default=3))
        )
        return TaskList.from_pairs([("data", data_need), ("query", query_need)])

    # -- explanation templates ----------------------------------------------

    def explain(self, task: Task | None, plan: QueryPlan | None, result: Any) -> str:
        from .session import ArtifactRecord, ExecFailure  # local import, no cycle at module load

        if isinstance(result, ExecFailure):
            return f"This step failed: {result.error.message}"
        if isinstance(result, ArtifactRecord):
            return f"A {result.kind.replace('-', ' ')} was drawn alongside this answer."
        if isinstance(plan, AggPlan):
            return self._explain_aggregation(plan, result)
        if isinstance(plan, MqlPlan):
            return self._explain_mql(plan, result)
        if isinstance(result, Table):
            return f"The result table holds the requested rows from {result.name}."
        return "Done."

    def _explain_aggregation(self, plan: AggPlan, table: Table) -> str:
        if table.row_count == 0:
            return "No matching records were found."
        spec = plan.plan
        measure = spec.aggregates[0].output_name
        values = table.column(measure)
        if not spec.group_by:
            count = values[0]
            if not count:
                return "No matching records were found."
            return f"The dataset holds {_fmt(count)} matching records."
        key_name = spec.group_by[0].output_name
        keys = [str(k) for k in table.column(key_name)]
        peak_k, peak_v, low_k, low_v = _peak_and_low(keys, values)
        if spec.group_by[0].derive == "month":
            return (
                f"Counts per month run from {keys[0]} to {keys[-1]}. "
                f"The peak is {peak_k} with {_fmt(peak_v)} and the quietest month "
                f"is {low_k} with {_fmt(low_v)}."
            )
        if spec.group_by[0].derive == "year" or "year" in key_name.lower():
            return (
                f"Annual totals run from {keys[0]} to {keys[-1]}. "
                f"The highest year is {peak_k} with {_fmt(peak_v)} and the lowest "
                f"is {low_k} with {_fmt(low_v)}."
            )
        # Region-style grouping (hotspot plans sort descending by count).
        top_key, top_v = keys[0], values[0]
        if table.row_count > 1:
            return (
                f"{top_key} has the most reported cases with {_fmt(top_v)}; "
                f"next is {keys[1]} with {_fmt(values[1])}."
            )
        return f"{top_key} has the most reported cases with {_fmt(top_v)}."

    def _explain_mql(self, plan: MqlPlan, result: Any) -> str:
        from ..ml.executor import Classifications, Clustering, Predictions

        if isinstance(result, Clustering):
            sizes = result.sizes()
            parts = [f"cluster {i} holds {sizes[i]} items" for i in range(result.k)]
            largest = max(range(result.k), key=lambda i: (sizes[i], -i))
            return (
                "Grouped the rows: " + "; ".join(parts) + ". "
                f"The largest is cluster {largest} with {sizes[largest]} items."
            )
        if isinstance(result, Predictions):
            lo = min(result.values)
            hi = max(result.values)
            return (
                f"Predicted {result.target} values range from {_fmt(lo)} to {_fmt(hi)}."
            )
        if isinstance(result, Classifications):
            seen: list[str] = []
            for c in result.assigned:
                if c not in seen:
                    seen.append(c)
            return "Rows were assigned to " + ", ".join(seen) + "."
        if isinstance(result, Table) and result.name == "model_metadata":
            return (
                f"Stored model {result.column('name')[0]} "
                f"({result.column('task')[0]}, {result.column('algorithm')[0]}) "
                f"trained on {_fmt(result.column('rows')[0])} rows; holdout accuracy "
                f"{_fmt(result.column('holdout_accuracy')[0])}."
            )
        if isinstance(result, Table):
            return f"The cleaned version of {plan.table} replaces it for this session."
        return "Done."


# --- external LLM adapter ----------------------------------------------------------


class LlmAgent(AgentInterface):
    """HTTP adapter for an external completion service.

    Request/response bodies follow the documented agent contract; the
    endpoint and key come from DATADESK_LLM_ENDPOINT / DATADESK_LLM_API_KEY
    unless given explicitly. Explanations pass through verbatim behind an
    attribution marker.
    """

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV, "")
        if not self.endpoint:
            raise AgentError(f"no LLM endpoint configured (set {ENDPOINT_ENV})")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def _post(self, mode: str, payload: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = self._client.post(
                self.endpoint, json={"mode": mode, "payload": payload}, headers=headers
            )
            response.raise_for_status()
            return response.json()
        except httpx.HTTPError as exc:
            raise AgentError(f"LLM adapter transport error: {exc}") from exc
        except ValueError as exc:
            raise AgentError(f"LLM adapter returned non-JSON output: {exc}") from exc

    def map_query(self, query: str) -> TaskList:
        body = self._post("map", {"query": query})
        tasks = body.get("tasks")
        if not isinstance(tasks, list) or not tasks:
            raise AgentError("LLM adapter returned no task list")
        pairs = []
        for t in tasks:
            chi = t.get("chi")
            kappa = t.get("kappa")
            if chi not in ("data", "query") or not isinstance(kappa, str) or not kappa.strip():
                raise AgentError(f"LLM adapter returned a malformed task: {t!r}")
            pairs.append((chi, kappa))
        return TaskList.from_pairs(pairs)

    def explain(self, task: Task | None, plan: QueryPlan | None, result: Any) -> str:
        payload = {
            "task": {"chi": task.chi, "kappa": task.kappa, "ordinal": task.ordinal} if task else None,
            "plan": describe_plan(plan) if plan is not None else None,
            "result": _result_summary(result),
        }
        body = self._post("explain", payload)
        text = body.get("text")
        if not isinstance(text, str):
            raise AgentError("LLM adapter returned no explanation text")
        return f"[llm] {text}"


def _result_summary(result: Any) -> Any:
    from .session import serialize_result

    try:
        return serialize_result(result)
    except Exception:
        return str(result)


class RecordingAgent(AgentInterface):
    """Wraps another agent and captures (mode, input, output) transcripts so
    conversations can be replayed in tests."""

    def __init__(self, inner: AgentInterface):
        self.inner = inner
        self.recorded: list[dict] = []

    def map_query(self, query: str) -> TaskList:
        tasks = self.inner.map_query(query)
        self.recorded.append(
            {"mode": "map", "input": query,
             "output": [{"chi": t.chi, "kappa": t.kappa} for t in tasks]}
        )
        return tasks

    def explain(self, task, plan, result) -> str:
        text = self.inner.explain(task, plan, result)
        self.recorded.append(
            {"mode": "explain",
             "input": {"kappa": task.kappa if task else None,
                       "plan": describe_plan(plan) if plan is not None else None},
             "output": text}
        )
        return text
