"""Command-line interface: prepare, run, validate, report."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import langs
from .config import RunConfig
from .corpus import Language, load_corpus, load_task
from .errors import VerilabError
from .llm import Cassette, LiveClient, RecordingClient, ReplayClient
from .runner import emit_report, load_records, run_benchmark
from .runner import aggregate as aggregate_records
from .taskprep import PromptOptions, build_prompts, prepare_task
from .validator import validate
from .verifier import Verifier

log = logging.getLogger(__name__)

_LANGUAGE = click.Choice([lang.value for lang in Language])


def _build_verifier(cfg: RunConfig) -> Verifier:
    return Verifier(
        tools=cfg.tools,
        timeouts_s=cfg.timeouts_s,
        extra_args=cfg.tool_args,
        pattern_path=Path(cfg.pattern_table) if cfg.pattern_table else None,
        max_concurrent=cfg.max_concurrent_verifiers,
    )


def _build_client(cfg: RunConfig, replay: str | None, record: str | None):
    if replay:
        return ReplayClient(Cassette.load(Path(replay)))
    live = LiveClient(
        url=cfg.llm_url,
        token=cfg.llm_token,
        seed=cfg.seed,
        request_timeout_s=cfg.request_timeout_s,
        max_retries=cfg.llm_max_retries,
        backoff_s=cfg.llm_backoff_s,
        max_concurrent=cfg.max_concurrent_requests,
        min_interval_s=cfg.min_request_interval_s,
    )
    if record:
        return RecordingClient(live, Path(record))
    return live


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="Path to verilab.yaml (default: ./verilab.yaml if present).")
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
@click.pass_context
def main(ctx: click.Context, config_path: Path | None, verbose: bool):
    """Benchmark harness for LLM-generated verified code."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


def _config(ctx: click.Context) -> RunConfig:
    return RunConfig.load(ctx.obj.get("config_path"))


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--language", required=True, type=_LANGUAGE)
@click.option("--mode", required=True, type=click.IntRange(1, 6))
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.pass_context
def prepare(ctx, corpus: Path, language: str, mode: int, out: Path):
    """Write the stripped skeleton and prompt bundle for every task."""
    cfg = _config(ctx)
    options = PromptOptions(
        include_hints=cfg.include_hints,
        include_sample=cfg.include_sample,
        prompt_dir=Path(cfg.prompt_dir) if cfg.prompt_dir else None,
    )
    ext = langs.info(language).extension
    for task in load_corpus(corpus, Language(language)):
        prepared = prepare_task(task, mode)
        bundle = build_prompts(prepared, options)
        task_out = out / task.id
        task_out.mkdir(parents=True, exist_ok=True)
        (task_out / f"skeleton.{ext}").write_text(prepared.skeleton, encoding="utf-8")
        (task_out / "prompt-system.txt").write_text(bundle.system, encoding="utf-8")
        (task_out / "prompt-user.txt").write_text(bundle.user, encoding="utf-8")
        (task_out / "prompt-followup.txt").write_text(
            bundle.followup_template, encoding="utf-8"
        )
        click.echo(f"prepared {task.id} (mode {mode}) -> {task_out}")


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--language", required=True, type=_LANGUAGE)
@click.option("--modes", default="1", show_default=True,
              help="Comma-separated list of modes, e.g. 1,3,4.")
@click.option("--runs", default=None, type=int, help="Repetitions per task.")
@click.option("--retries", default=None, type=int, help="Repair rounds after the first attempt.")
@click.option("--replay", default=None, type=click.Path(exists=True),
              help="Serve model replies from this cassette (no network).")
@click.option("--record", default=None, type=click.Path(),
              help="Record live model replies into this cassette.")
@click.option("--workers", default=None, type=int)
@click.option("--timeout-s", default=None, type=float,
              help="Override the verifier timeout for the selected language.")
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.pass_context
def run(ctx, corpus: Path, language: str, modes: str, runs, retries, replay,
        record, workers, timeout_s, out: Path):
    """Run the benchmark loop over a corpus."""
    if replay and record:
        raise click.UsageError("--replay and --record are mutually exclusive")
    cfg = _config(ctx)
    if runs is not None:
        cfg.runs = runs
    if retries is not None:
        cfg.retries = retries
    if workers is not None:
        cfg.workers = workers
    if timeout_s is not None:
        cfg.timeouts_s[language] = timeout_s

    mode_list = sorted({int(m) for m in modes.split(",") if m.strip()})
    tasks = load_corpus(corpus, Language(language))
    client = _build_client(cfg, replay, record)
    verifier = _build_verifier(cfg)

    report = run_benchmark(tasks, mode_list, client, verifier, cfg, out)
    for lang_name, by_mode in sorted(report.cells.items()):
        for mode, cell in sorted(by_mode.items(), key=lambda kv: int(kv[0])):
            click.echo(
                f"{lang_name} mode {mode}: {cell.unique_verified}/{cell.total} "
                f"({cell.percentage}%)"
            )
    click.echo(f"records and report written to {out}")


@main.command("validate")
@click.option("--task", "task_dir", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--candidate", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--mode", required=True, type=click.IntRange(1, 6))
@click.option("--language", default=None, type=_LANGUAGE,
              help="Defaults to the extension of the task source file.")
@click.pass_context
def validate_cmd(ctx, task_dir: Path, candidate: Path, mode: int, language):
    """Validate a single candidate file against a task."""
    cfg = _config(ctx)
    if language is None:
        by_ext = {info.extension: name for name, info in langs.LANGUAGES.items()}
        found = [p.suffix.lstrip(".") for p in task_dir.glob("task.*")]
        language = next((by_ext[e] for e in found if e in by_ext), None)
        if language is None:
            raise click.UsageError("cannot infer language; pass --language")
    task = load_task(task_dir, Language(language))
    verifier = _build_verifier(cfg)
    outcome = validate(
        candidate.read_text(encoding="utf-8"),
        task,
        mode,
        verify=lambda lang, src, scr: verifier.verify(
            lang, src, cfg.timeouts_s.get(lang), scr
        ),
        scratch=Path("validation-scratch") / task.id,
    )
    click.echo(json.dumps(outcome.to_dict(), indent=2, sort_keys=True))
    sys.exit(0 if outcome.passed else 1)


@main.command()
@click.option("--in", "results_dir", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--format", "fmt", default="markdown", show_default=True,
              type=click.Choice(["markdown", "json", "csv"]))
@click.option("--out", required=True, type=click.Path(path_type=Path))
def report(results_dir: Path, fmt: str, out: Path):
    """Aggregate persisted run records into a report file."""
    records = load_records(results_dir)
    emit_report(aggregate_records(records), fmt, out)
    click.echo(f"wrote {fmt} report for {len(records)} records to {out}")


def cli_main():
    try:
        main(obj={})
    except VerilabError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    cli_main()
