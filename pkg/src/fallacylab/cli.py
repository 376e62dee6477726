"""Operator command line.

Exit codes are a stable contract: 0 success, 1 validation findings,
2 input error, 3 provider error.
"""
from __future__ import annotations

import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from .errors import FallacyLabError, ProviderError, UnknownSchemaError
from .gateway import (
    Gateway,
    HttpProvider,
    Provider,
    ProviderConfig,
    RecordingProvider,
    ReplayProvider,
)
from .kb import KnowledgeBase
from .labels import FallacyCode, parse_code
from .metrics import build_report, load_benchmark, load_predictions
from .pipeline import (
    generate_bundle,
    judge_benchmark,
    score_sentences,
    write_bundle,
    write_report,
    write_scores,
)
from .schemas import derive_instances, ordering_diagnostic, validate_kb_against_schema
from .seeds import load_seed

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INPUT = 2
EXIT_PROVIDER = 3

log = logging.getLogger(__name__)


@dataclass
class RunConfig:
    generator: ProviderConfig = field(default_factory=ProviderConfig)
    evaluator: ProviderConfig = field(default_factory=ProviderConfig)
    mode: str = "replay"  # live | replay | record
    cassette: str | None = None
    batch_size: int = 20
    random_seed: int = 0

    def __post_init__(self):
        if self.mode not in ("live", "replay", "record"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "replay" and not self.cassette:
            raise ValueError("replay mode requires a cassette path")
        if self.mode == "record" and not self.cassette:
            raise ValueError("record mode requires a cassette path to write")


def parse_config(
    path: str | Path | None,
    *,
    mode: str | None = None,
    cassette: str | None = None,
) -> RunConfig:
    """Read the simple ``key = value`` config format.

    ``mode`` and ``cassette`` arguments override the file's values, so
    command-line flags win; validation runs on the final combination.
    """
    values: dict[str, str] = {}
    if path is not None:
        for line_no, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{line_no}: expected key = value")
            key, _, value = stripped.partition("=")
            values[key.strip()] = value.strip()

    def provider(prefix: str) -> ProviderConfig:
        return ProviderConfig(
            endpoint=values.get(f"{prefix}.endpoint", ""),
            model_name=values.get(f"{prefix}.model", "unspecified"),
            temperature=float(values.get(f"{prefix}.temperature", "1.0")),
            max_retries=int(values.get(f"{prefix}.max_retries", "3")),
            parallelism_limit=int(values.get(f"{prefix}.parallelism", "4")),
            credentials_env=values.get(f"{prefix}.credentials_env") or None,
        )

    return RunConfig(
        generator=provider("generator"),
        evaluator=provider("evaluator"),
        mode=mode or values.get("mode", "replay"),
        cassette=cassette or values.get("cassette") or None,
        batch_size=int(values.get("batch_size", "20")),
        random_seed=int(values.get("random_seed", "0")),
    )


def _make_provider(run: RunConfig, which: str) -> Provider:
    provider_cfg = run.generator if which == "generator" else run.evaluator
    if run.mode == "replay":
        return ReplayProvider(run.cassette, model_name=provider_cfg.model_name)
    live = HttpProvider(provider_cfg)
    if run.mode == "record":
        return RecordingProvider(live, run.cassette)
    return live


def _finish_provider(provider: Provider) -> None:
    if isinstance(provider, RecordingProvider):
        provider.save()


def _resolve_run(config, mode, cassette) -> RunConfig:
    return parse_config(
        config, mode=mode, cassette=str(cassette) if cassette else None
    )


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_kb(kb_path: str | None, code: FallacyCode | None) -> KnowledgeBase:
    if kb_path:
        return KnowledgeBase.from_text(Path(kb_path).read_text(encoding="utf-8"))
    if code is None:
        raise ValueError("either --kb or --code is required")
    return load_seed(code)


def _code_option(required: bool = True):
    return click.option(
        "--code",
        "code_text",
        required=required,
        help="Fallacy code (AF, FC, ...), alias, or full name.",
    )


@click.group()
@click.option("--verbose", is_flag=True, help="Log at INFO level.")
def main(verbose: bool) -> None:
    """Generate fallacious test sentences via the logic oracle and evaluate
    model predictions."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@_code_option()
def validate(kb_path: str, code_text: str) -> None:
    """Check a fact file against a schema's predicate signatures."""
    try:
        code = parse_code(code_text)
        kb = KnowledgeBase.from_text(Path(kb_path).read_text(encoding="utf-8"))
        report = validate_kb_against_schema(code, kb)
    except (FallacyLabError, ValueError, OSError) as exc:
        _fail(EXIT_INPUT, str(exc))
        return
    click.echo(report.render())
    sys.exit(EXIT_OK if report.clean else EXIT_FINDINGS)


@main.command()
@_code_option()
@click.option("--kb", "kb_path", type=click.Path(exists=True), default=None)
def derive(code_text: str, kb_path: str | None) -> None:
    """Print derived fallacy tuples, one per line in canonical syntax."""
    try:
        code = parse_code(code_text)
        kb = _load_kb(kb_path, code)
        tuples = derive_instances(code, kb)
        note = ordering_diagnostic(code, kb)
    except (FallacyLabError, ValueError, OSError) as exc:
        _fail(EXIT_INPUT, str(exc))
        return
    for item in tuples:
        click.echo(item.render())
    if note:
        click.echo(f"diagnostic: {note}", err=True)
    sys.exit(EXIT_OK)


@main.command()
@_code_option()
@click.option("--n", default=None, type=int, help="Fact combinations to request.")
@click.option("--mode", type=click.Choice(["live", "replay", "record"]), default=None)
@click.option("--cassette", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
def generate(code_text, n, mode, cassette, config_path, out_dir) -> None:
    """Run the full generation loop for one code and write its artifacts."""
    try:
        code = parse_code(code_text)
        run = _resolve_run(config_path, mode, cassette)
        provider = _make_provider(run, "generator")
    except (UnknownSchemaError, FallacyLabError, ValueError, OSError) as exc:
        _fail(EXIT_INPUT, str(exc))
        return
    gateway = Gateway(
        provider,
        generation_temperature=run.generator.temperature,
        batch_size=run.batch_size,
    )
    try:
        bundle = generate_bundle(code, n if n is not None else run.batch_size, gateway)
        _finish_provider(provider)
        paths = write_bundle(bundle, out_dir)
    except ProviderError as exc:
        _fail(EXIT_PROVIDER, str(exc))
        return
    except (FallacyLabError, ValueError) as exc:
        _fail(EXIT_INPUT, str(exc))
        return
    for note in bundle.diagnostics:
        click.echo(f"diagnostic: {note}", err=True)
    for path in paths:
        click.echo(str(path))
    sys.exit(EXIT_OK)


@main.command()
@click.option("--sentences", "sentences_path", required=True, type=click.Path(exists=True))
@click.option("--method-tag", default="generated", show_default=True)
@click.option("--mode", type=click.Choice(["live", "replay", "record"]), default=None)
@click.option("--cassette", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
def score(sentences_path, method_tag, mode, cassette, config_path, out_dir) -> None:
    """Triple-score labeled sentences and summarize per-code means."""
    try:
        rows = []
        for line in Path(sentences_path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            labels = record.get("labels") or [record.get("code")]
            rows.append(
                (str(record["id"]), str(record["sentence"]), parse_code(labels[0]))
            )
        run = _resolve_run(config_path, mode, cassette)
        provider = _make_provider(run, "evaluator")
    except (FallacyLabError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _fail(EXIT_INPUT, str(exc))
        return
    gateway = Gateway(provider)
    try:
        scored = score_sentences(rows, gateway)
        _finish_provider(provider)
        paths = write_scores(scored, method_tag, out_dir)
    except ProviderError as exc:
        _fail(EXIT_PROVIDER, str(exc))
        return
    except (FallacyLabError, ValueError) as exc:
        _fail(EXIT_INPUT, str(exc))
        return
    for path in paths:
        click.echo(str(path))
    sys.exit(EXIT_OK)


@main.command(name="eval")
@click.option("--benchmark", "benchmark_path", required=True, type=click.Path(exists=True))
@click.option(
    "--predictions",
    "predictions_path",
    type=click.Path(exists=True),
    default=None,
    help="Pre-computed predictions; omit to judge via the provider.",
)
@click.option("--mode", type=click.Choice(["live", "replay", "record"]), default=None)
@click.option("--cassette", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
def eval_cmd(benchmark_path, predictions_path, mode, cassette, config_path, out_dir) -> None:
    """Compute detection and categorization metrics for a benchmark."""
    try:
        entries = load_benchmark(benchmark_path)
    except (FallacyLabError, ValueError, OSError) as exc:
        _fail(EXIT_INPUT, str(exc))
        return
    try:
        if predictions_path:
            preds = load_predictions(predictions_path)
        else:
            run = _resolve_run(config_path, mode, cassette)
            provider = _make_provider(run, "evaluator")
            preds = judge_benchmark(entries, Gateway(provider))
            _finish_provider(provider)
        report = build_report(entries, preds)
        paths = write_report(report, preds, out_dir)
    except ProviderError as exc:
        _fail(EXIT_PROVIDER, str(exc))
        return
    except (FallacyLabError, ValueError) as exc:
        _fail(EXIT_INPUT, str(exc))
        return
    for path in paths:
        click.echo(str(path))
    click.echo(report.to_text(), nl=False)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
