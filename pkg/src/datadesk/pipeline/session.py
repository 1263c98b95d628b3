"""Conversation sessions: question in, explained results and artifacts out.

A turn maps the query to a task list, binds data needs to registered
datasets, translates query needs into plans against the most recent
binding, executes every plan in task order, renders chart directives to
SVG artifacts with delimited sidecars, and explains each executed plan.
Stage errors become diagnostic explanations; the session always survives.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..errors import DatadeskError, OrderingError, VizError
from ..ml.executor import (
    Classifications,
    Clustering,
    ExecutionContext,
    Predictions,
    execute_mql,
)
from ..store.aggregate import run_aggregation
from ..store.registry import Registry
from ..store.table import Table
from ..viz.render import (
    ChartOptions,
    project_top2,
    render_bar,
    render_choropleth,
    render_cluster_scatter,
    render_trend,
)
from ..viz.series import RegionGeometry, load_geojson, quantile_bins, series_from_table
from .agent import AgentInterface, DeterministicAgent
from .intents import load_rules
from .plans import AggPlan, BarChart, Choropleth, ClusterScatter, MqlPlan, QueryPlan, TrendLine, VizPlan, describe_plan
from .resolver import ResolvedData, resolve_data
from .tasks import TaskList


@dataclass
class SessionConfig:
    out_dir: Path
    model_dir: Path | None = None
    geometry_path: Path | None = None
    region_property: str = "district"
    seed: int = 42
    rules_path: Path | None = None


@dataclass
class ArtifactRecord:
    kind: str          # "trend-line" | "bar-chart" | "choropleth" | "cluster-scatter"
    path: Path
    sidecar_path: Path


@dataclass
class ExecFailure:
    error: DatadeskError


@dataclass
class ChatTurn:
    session_id: str
    index: int
    query: str
    tasks: TaskList | None
    bindings: list[ResolvedData]
    plans: list[QueryPlan]
    results: list[Any]            # Table | MlResult | ArtifactRecord | ExecFailure
    artifacts: list[ArtifactRecord]
    explanation: str
    error: str | None
    elapsed_seconds: float        # never serialized: transcripts stay byte-stable


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_table(table: Table) -> dict:
    return {
        "name": table.name,
        "columns": [{"name": n, "kind": k.value} for n, k in table.schema],
        "rows": [[_fmt_cell(v) for v in row] for row in table.rows()],
    }


def serialize_result(result: Any) -> dict:
    if isinstance(result, Table):
        return {"type": "table", "table": serialize_table(result)}
    if isinstance(result, Clustering):
        return {
            "type": "clustering",
            "k": result.k,
            "sizes": result.sizes(),
            "inertia": repr(result.inertia),
            "table": serialize_table(result.summary_table()),
            "warnings": list(result.warnings),
        }
    if isinstance(result, Predictions):
        return {
            "type": "predictions",
            "target": result.target,
            "table": serialize_table(result.to_table()),
            "warnings": list(result.warnings),
        }
    if isinstance(result, Classifications):
        return {
            "type": "classifications",
            "table": serialize_table(result.to_table()),
            "warnings": list(result.warnings),
        }
    if isinstance(result, ArtifactRecord):
        return {
            "type": "artifact",
            "kind": result.kind,
            "path": result.path.name,
            "sidecar": result.sidecar_path.name,
        }
    if isinstance(result, ExecFailure):
        return {"type": "error", "message": result.error.message}
    return {"type": "opaque", "repr": str(result)}


def turn_document(turn: ChatTurn) -> dict:
    """JSON-safe turn record; excludes timing so transcripts are reproducible."""
    return {
        "turn": turn.index,
        "query": turn.query,
        "tasks": [
            {"chi": t.chi, "kappa": t.kappa, "ordinal": t.ordinal} for t in (turn.tasks or [])
        ],
        "bindings": [
            {
                "dataset": b.name,
                "score": repr(b.score),
                "runner_up": {"dataset": b.runner_up[0], "score": repr(b.runner_up[1])}
                if b.runner_up
                else None,
            }
            for b in turn.bindings
        ],
        "plans": [describe_plan(p) for p in turn.plans],
        "task_ordinals": [p.task_ordinal for p in turn.plans],
        "results": [serialize_result(r) for r in turn.results],
        "artifacts": [r.path.name for r in turn.artifacts],
        "explanation": turn.explanation,
        "error": turn.error,
    }


class Session:
    """One conversation; turns run strictly sequentially."""

    def __init__(
        self,
        registry: Registry,
        config: SessionConfig,
        agent: AgentInterface | None = None,
        session_id: str = "session",
    ):
        self.registry = registry
        self.config = config
        self.session_id = session_id
        self.rules = load_rules(config.rules_path)
        self.agent = agent if agent is not None else DeterministicAgent(self.rules)
        self.turns: list[ChatTurn] = []
        self.context = ExecutionContext(
            registry,
            str(config.model_dir) if config.model_dir else None,
            config.seed,
        )
        self._geometry_cache: dict[str, RegionGeometry] = {}

    def set_agent(self, agent: AgentInterface) -> None:
        self.agent = agent

    # -- geometry ------------------------------------------------------------

    def _geometry_for(self, ref: str) -> RegionGeometry:
        path = Path(ref) if ref else self.config.geometry_path
        if path is None:
            raise VizError(
                "no region geometry configured; pass --geometry GEOJSON to draw maps"
            )
        key = str(path)
        if key not in self._geometry_cache:
            self._geometry_cache[key] = load_geojson(path, self.config.region_property)
        return self._geometry_cache[key]

    # -- the turn loop --------------------------------------------------------

    def run_turn(self, query: str) -> ChatTurn:
        started = time.perf_counter()
        index = len(self.turns) + 1
        tasks: TaskList | None = None
        bindings: list[ResolvedData] = []
        plans: list[QueryPlan] = []
        results: list[Any] = []
        artifacts: list[ArtifactRecord] = []
        error: str | None = None
        explanations: list[str] = []

        try:
            tasks = self.agent.map_query(query)
            for task in tasks:
                if task.chi == "data":
                    bindings.append(resolve_data(task.kappa, self.registry))
                else:
                    if not bindings:
                        raise OrderingError(
                            f"query need {task.kappa!r} has no preceding data need to bind a table"
                        )
                    bound = self.context.resolve(bindings[-1].name)
                    plans.extend(
                        translate_need(
                            bound,
                            task.kappa,
                            rules=self.rules,
                            task_ordinal=task.ordinal,
                            geometry_ref=str(self.config.geometry_path or ""),
                            plan_base=len(plans),
                        )
                    )
        except DatadeskError as exc:
            error = exc.message
            explanations.append(f"I could not act on that: {exc.message}")

        if error is None:
            for plan_index, plan in enumerate(plans):
                results.append(self._execute_plan(plan, plan_index, index, results))
            task_by_ordinal = {t.ordinal: t for t in tasks} if tasks else {}
            for plan, result in zip(plans, results):
                if isinstance(result, ArtifactRecord):
                    artifacts.append(result)
                explanations.append(
                    self.agent.explain(task_by_ordinal.get(plan.task_ordinal), plan, result)
                )
            if not plans:
                explanations.append("That question needed no computation.")

        turn = ChatTurn(
            session_id=self.session_id,
            index=index,
            query=query,
            tasks=tasks,
            bindings=bindings,
            plans=plans,
            results=results,
            artifacts=artifacts,
            explanation="\n".join(explanations),
            error=error,
            elapsed_seconds=time.perf_counter() - started,
        )
        self.turns.append(turn)
        return turn

    # -- plan execution ---------------------------------------------------------

    def _execute_plan(self, plan: QueryPlan, plan_index: int, turn_index: int, prior: list[Any]):
        try:
            if isinstance(plan, AggPlan):
                return run_aggregation(plan.plan, self.context.resolve(plan.table))
            if isinstance(plan, MqlPlan):
                return execute_mql(plan.statement, self.registry, context=self.context)
            return self._render(plan, plan_index, turn_index, prior)
        except DatadeskError as exc:
            return ExecFailure(exc)

    def _artifact_paths(self, turn_index: int, plan_index: int, kind: str) -> tuple[Path, Path]:
        base = f"turn-{turn_index:03d}-{plan_index:02d}-{kind}"
        out = Path(self.config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        return out / f"{base}.svg", out / f"{base}.csv"

    def _write_artifact(
        self, kind: str, turn_index: int, plan_index: int, svg: bytes, rows: list[list]
    ) -> ArtifactRecord:
        svg_path, csv_path = self._artifact_paths(turn_index, plan_index, kind)
        svg_path.write_bytes(svg)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(rows)
        csv_path.write_text(buf.getvalue(), encoding="utf-8")
        return ArtifactRecord(kind, svg_path, csv_path)

    def _render(self, plan: VizPlan, plan_index: int, turn_index: int, prior: list[Any]):
        if not (0 <= plan.input_index < len(prior)):
            raise VizError(f"chart input plan #{plan.input_index + 1} is missing")
        source = prior[plan.input_index]
        if isinstance(source, ExecFailure):
            raise VizError("chart input failed; nothing to draw")
        directive = plan.directive

        if isinstance(directive, TrendLine):
            series = series_from_table(source, directive.time_key, directive.measure)
            title = f"{directive.measure} per {directive.time_key}: {plan.table}"
            svg = render_trend(series, ChartOptions(title=title, time_grain=directive.time_key))
            rows = [[directive.time_key, directive.measure]] + [
                [k, _fmt_cell(v)] for k, v in series.points
            ]
            return self._write_artifact("trend-line", turn_index, plan_index, svg, rows)

        if isinstance(directive, BarChart):
            series = series_from_table(source, directive.category_key, directive.measure)
            title = f"{directive.measure} per {directive.category_key}: {plan.table}"
            svg = render_bar(series, ChartOptions(title=title, time_grain="year"))
            rows = [[directive.category_key, directive.measure]] + [
                [k, _fmt_cell(v)] for k, v in series.points
            ]
            return self._write_artifact("bar-chart", turn_index, plan_index, svg, rows)

        if isinstance(directive, Choropleth):
            series = series_from_table(source, directive.region_key, directive.measure)
            geometry = self._geometry_for(directive.geometry_ref)
            svg = render_choropleth(
                series, geometry, title=f"{directive.measure} by {directive.region_key}: {plan.table}"
            )
            bins = quantile_bins(series.values)
            rows = [[directive.region_key, directive.measure, "bin"]] + [
                [k, _fmt_cell(v), b] for (k, v), b in zip(series.points, bins)
            ]
            return self._write_artifact("choropleth", turn_index, plan_index, svg, rows)

        # ClusterScatter
        if not isinstance(source, Clustering):
            raise VizError("cluster scatter needs a clustering result as input")
        svg = render_cluster_scatter(source, title=f"headline clusters: {plan.table}")
        coords = project_top2(source.features.data)
        rows = [["component_1", "component_2", "cluster"]] + [
            [repr(float(coords[i, 0])), repr(float(coords[i, 1])), source.assignments[i]]
            for i in range(len(source.assignments))
        ]
        return self._write_artifact("cluster-scatter", turn_index, plan_index, svg, rows)


# Imported late so plans/translator stay import-cycle free.
from .translator import translate as translate_need  # noqa: E402


def write_transcript(turns: list[ChatTurn], text_path: Path, json_path: Path) -> None:
    """Plain-text transcript plus a JSON sidecar; both byte-stable per seed."""
    lines: list[str] = []
    for turn in turns:
        lines.append(f"=== turn {turn.index:03d}")
        lines.append(f"> {turn.query}")
        lines.append(turn.explanation)
        for artifact in turn.artifacts:
            lines.append(f"artifact: {artifact.path.name}")
        lines.append("")
    text_path.parent.mkdir(parents=True, exist_ok=True)
    text_path.write_text("\n".join(lines), encoding="utf-8")
    json_path.write_text(
        json.dumps([turn_document(t) for t in turns], indent=2) + "\n", encoding="utf-8"
    )
