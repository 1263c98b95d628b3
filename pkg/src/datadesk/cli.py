"""Operator command line: dataset management, MQL execution, scripted and
interactive chat, fixture generation, and the HTTP service."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .errors import DatadeskError, LexError, ParseError
from .fixtures import generate_fixtures
from .mql import parse_script
from .mql.nodes import GenerateBody, MqlStatement
from .ml.executor import Classifications, Clustering, ExecutionContext, Predictions, execute_mql
from .pipeline.agent import DeterministicAgent, LlmAgent
from .pipeline.session import Session, SessionConfig, write_transcript
from .store.registry import Registry
from .store.table import Table, ingest_csv
from .store.values import Kind
from .viz.render import render_bar, render_cluster_scatter
from .viz.series import Series

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INTERNAL = 2


def _fail(message: str, code: int = EXIT_USER_ERROR) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def format_table(table: Table, limit: int | None = 20) -> str:
    """Aligned text rendering of a result table."""
    headers = table.column_names
    rows = table.rows()
    clipped = rows[:limit] if limit is not None else rows
    cells = [[("" if v is None else str(v)) for v in row] for row in clipped]
    widths = [
        max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
        for i, h in enumerate(headers)
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    if limit is not None and len(rows) > limit:
        lines.append(f"... {len(rows) - limit} more rows")
    return "\n".join(lines)


def _caret_diagnostic(text: str, span: tuple[int, int] | None) -> str:
    if span is None:
        return ""
    start = max(0, min(span[0], len(text)))
    line_start = text.rfind("\n", 0, start) + 1
    line_end = text.find("\n", start)
    if line_end == -1:
        line_end = len(text)
    line = text[line_start:line_end]
    caret = " " * (start - line_start) + "^"
    return f"  {line}\n  {caret}"


@click.group()
def main() -> None:
    """Conversational investigative analytics over tabular datasets."""


# --- dataset ------------------------------------------------------------------


@main.group()
def dataset() -> None:
    """Manage the dataset manifest."""


def _parse_schema_option(schema: str | None) -> dict[str, Kind] | None:
    if not schema:
        return None
    declared: dict[str, Kind] = {}
    for part in schema.split(","):
        if "=" not in part:
            _fail(f"bad --schema entry {part!r}; use column=kind")
        col, kind = part.split("=", 1)
        try:
            declared[col.strip()] = Kind(kind.strip().lower())
        except ValueError:
            _fail(f"unknown kind {kind!r}; use int/decimal/text/date/timestamp")
    return declared


@dataset.command("add")
@click.argument("csv_path", type=click.Path(exists=True, path_type=Path))
@click.option("--manifest", type=click.Path(path_type=Path), required=True)
@click.option("--name", default=None, help="Dataset name (defaults to the file stem).")
@click.option("--description", required=True, help="Natural-language dataset description.")
@click.option("--schema", default=None, help="Declared kinds: col=int,col2=text,...")
def dataset_add(csv_path: Path, manifest: Path, name: str | None, description: str, schema: str | None) -> None:
    """Ingest a CSV and register it with its description."""
    try:
        declared = _parse_schema_option(schema)
        registry = Registry(manifest)
        table = ingest_csv(csv_path, name=name, declared_schema=declared)
        registry.register(table, description, csv_path, declared)
        click.echo(f"registered {table.name} ({table.row_count} rows)")
    except DatadeskError as exc:
        _fail(exc.message)


@dataset.command("list")
@click.option("--manifest", type=click.Path(path_type=Path), required=True)
def dataset_list(manifest: Path) -> None:
    """List registered datasets."""
    try:
        registry = Registry(manifest)
        rows: list[list] = []
        for d in registry.descriptors():
            table = registry.table(d.name)
            snippet = d.description if len(d.description) <= 60 else d.description[:57] + "..."
            rows.append([d.name, table.row_count, snippet])
        out = Table(
            "datasets",
            [("name", Kind.TEXT), ("rows", Kind.INT), ("description", Kind.TEXT)],
            [[r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows]],
        )
        click.echo(format_table(out, limit=None))
    except DatadeskError as exc:
        _fail(exc.message)


@dataset.command("describe")
@click.argument("name")
@click.option("--manifest", type=click.Path(path_type=Path), required=True)
def dataset_describe(name: str, manifest: Path) -> None:
    """Print the full descriptor and schema of one dataset."""
    try:
        registry = Registry(manifest)
        d = registry.descriptor(name)
        table = registry.table(name)
        click.echo(f"name:        {d.name}")
        click.echo(f"source:      {d.source_path}")
        click.echo(f"rows:        {table.row_count}")
        click.echo(f"ingested at: {d.ingested_at}")
        click.echo("schema:      " + ", ".join(f"{n} ({k.value})" for n, k in table.schema))
        click.echo(f"description: {d.description}")
    except DatadeskError as exc:
        _fail(exc.message)


# --- mql ---------------------------------------------------------------------


def _display_artifacts(stmt: MqlStatement, result, out_dir: Path, index: int) -> list[Path]:
    if not (isinstance(stmt.body, GenerateBody) and stmt.body.display):
        return []
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if isinstance(result, Clustering):
        path = out_dir / f"mql-{index:03d}-cluster-scatter.svg"
        path.write_bytes(render_cluster_scatter(result))
        written.append(path)
    elif isinstance(result, Predictions):
        series = Series(
            result.target,
            tuple((str(r[0]), float(v)) for r, v in zip(result.labels.rows, result.values)),
        )
        path = out_dir / f"mql-{index:03d}-bar-chart.svg"
        path.write_bytes(render_bar(series))
        written.append(path)
    elif isinstance(result, Classifications):
        counts: dict[str, int] = {}
        for c in result.assigned:
            counts[c] = counts.get(c, 0) + 1
        series = Series("class counts", tuple((c, float(n)) for c, n in counts.items()))
        path = out_dir / f"mql-{index:03d}-bar-chart.svg"
        path.write_bytes(render_bar(series))
        written.append(path)
    return written


def _print_mql_result(result) -> None:
    if isinstance(result, Clustering):
        click.echo(format_table(result.summary_table(), limit=None))
        click.echo(f"inertia: {result.inertia:.6g}")
    elif isinstance(result, (Predictions, Classifications)):
        click.echo(format_table(result.to_table()))
    elif isinstance(result, Table):
        click.echo(format_table(result))
    for warning in getattr(result, "warnings", []):
        click.echo(f"warning: {warning}")


@main.command("mql")
@click.argument("statement", required=False)
@click.option("--file", "script_file", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--manifest", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), default=Path("artifacts"))
@click.option("--models", type=click.Path(path_type=Path), default=None, help="Model store directory.")
@click.option("--seed", type=int, default=42)
def mql_command(statement: str | None, script_file: Path | None,
                manifest: Path, out: Path, models: Path | None, seed: int) -> None:
    """Execute an MQL statement (or a ';'-separated script with --file)."""
    if statement is None and script_file is None:
        _fail("give a statement or --file SCRIPT")
    source = statement if statement is not None else script_file.read_text(encoding="utf-8")
    try:
        statements = parse_script(source)
    except (ParseError, LexError) as exc:
        click.echo(f"error: {exc.message}", err=True)
        diagnostic = _caret_diagnostic(source, exc.span)
        if diagnostic:
            click.echo(diagnostic, err=True)
        sys.exit(EXIT_USER_ERROR)
    if not statements:
        _fail("no statements to execute")
    registry = Registry(manifest)
    model_dir = str(models) if models else str(manifest.parent / "models")
    context = ExecutionContext(registry, model_dir, seed)
    for i, stmt in enumerate(statements, start=1):
        try:
            result = execute_mql(stmt, registry, context=context)
        except DatadeskError as exc:
            click.echo(f"error: {exc.message}", err=True)
            diagnostic = _caret_diagnostic(source, exc.span)
            if diagnostic:
                click.echo(diagnostic, err=True)
            sys.exit(EXIT_USER_ERROR)
        _print_mql_result(result)
        for path in _display_artifacts(stmt, result, out, i):
            click.echo(f"artifact: {path}")


# --- chat ----------------------------------------------------------------------


@main.command("chat")
@click.option("--script", "script_file", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--manifest", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), default=Path("chat-out"))
@click.option("--seed", type=int, default=42)
@click.option("--agent", "agent_name", type=click.Choice(["deterministic", "llm"]), default="deterministic")
@click.option("--endpoint", default=None, help="LLM adapter endpoint (llm agent).")
@click.option("--geometry", type=click.Path(path_type=Path), default=None, help="GeoJSON for hotspot maps.")
@click.option("--models", type=click.Path(path_type=Path), default=None)
def chat_command(script_file: Path | None, manifest: Path, out: Path, seed: int,
                 agent_name: str, endpoint: str | None, geometry: Path | None,
                 models: Path | None) -> None:
    """Converse over the registered datasets; per-turn errors stay in the
    transcript and the conversation continues (exit code 0)."""
    registry = Registry(manifest)
    if geometry is None:
        default_geometry = manifest.parent / "districts.geojson"
        geometry = default_geometry if default_geometry.exists() else None
    config = SessionConfig(
        out_dir=out,
        model_dir=models or (manifest.parent / "models"),
        geometry_path=geometry,
        seed=seed,
    )
    try:
        agent = LlmAgent(endpoint=endpoint) if agent_name == "llm" else DeterministicAgent()
    except DatadeskError as exc:
        _fail(exc.message)
    session = Session(registry, config, agent=agent)

    def handle(query: str) -> None:
        turn = session.run_turn(query)
        click.echo(f"> {query}")
        click.echo(turn.explanation)
        for artifact in turn.artifacts:
            click.echo(f"artifact: {artifact.path}")
        click.echo("")

    if script_file is not None:
        for line in script_file.read_text(encoding="utf-8").splitlines():
            query = line.strip()
            if not query or query.startswith("#"):
                continue
            handle(query)
    else:
        click.echo("type a question; 'exit' quits")
        while True:
            try:
                query = input("you> ").strip()
            except EOFError:
                break
            if not query:
                continue
            if query.lower() in ("exit", "quit"):
                break
            handle(query)

    out.mkdir(parents=True, exist_ok=True)
    write_transcript(session.turns, out / "transcript.txt", out / "transcript.json")
    click.echo(f"transcript: {out / 'transcript.txt'}")


# --- fixture --------------------------------------------------------------------


@main.group()
def fixture() -> None:
    """Synthetic fixture datasets with ground-truth sidecars."""


@fixture.command("generate")
@click.option("--out", type=click.Path(path_type=Path), default=Path("fixtures"))
@click.option("--rows", type=int, default=300)
@click.option("--seed", type=int, default=42)
def fixture_generate(out: Path, rows: int, seed: int) -> None:
    """Emit prothomalo.csv, ngorep.csv, districts.geojson, manifest.json and
    the ground_truth.json oracle sidecar."""
    paths = generate_fixtures(out, rows=rows, seed=seed)
    for label, path in paths.items():
        click.echo(f"{label}: {path}")


# --- serve ----------------------------------------------------------------------


@main.command("serve")
@click.option("--manifest", type=click.Path(path_type=Path), required=True)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8040)
@click.option("--artifacts", type=click.Path(path_type=Path), default=Path("service-artifacts"))
@click.option("--geometry", type=click.Path(path_type=Path), default=None)
@click.option("--models", type=click.Path(path_type=Path), default=None)
@click.option("--cors", "cors_origins", multiple=True, help="Allowed UI origins.")
def serve_command(manifest: Path, host: str, port: int, artifacts: Path,
                  geometry: Path | None, models: Path | None,
                  cors_origins: tuple[str, ...]) -> None:
    """Run the chat HTTP service."""
    import uvicorn

    from .service import create_app

    if geometry is None:
        default_geometry = manifest.parent / "districts.geojson"
        geometry = default_geometry if default_geometry.exists() else None
    app = create_app(
        manifest_path=manifest,
        artifact_root=artifacts,
        geometry_path=geometry,
        model_dir=models or (manifest.parent / "models"),
        cors_origins=list(cors_origins),
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


def entrypoint() -> None:
    try:
        main(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_USER_ERROR)
    except click.Abort:
        sys.exit(EXIT_USER_ERROR)
    except SystemExit:
        raise
    except Exception as exc:  # pragma: no cover - internal error guard
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)


if __name__ == "__main__":
    entrypoint()
