"""End-to-end flows behind the CLI commands.

Keeping these out of the CLI lets record-mode fixture builders and tests run
the exact same code paths the operator does, which is what makes replay runs
byte-reproducible.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .gateway import Gateway, ScoreTriple
from .kb import FactRecord, KnowledgeBase
from .labels import FallacyCode
from .metrics import (
    BenchmarkEntry,
    EvalReport,
    Prediction,
    predictions_from_verdicts,
    score_stats,
)
from .schemas import ValidTuple, derive_instances, ordering_diagnostic
from .seeds import load_seed

#: Implication-form style examples shown to the transformation prompt.
STYLE_EXAMPLES: dict[FallacyCode, tuple[str, ...]] = {
    FallacyCode.ID: (
        "Since brushing my teeth for two minutes keeps them healthy for a day, therefore brushing for twenty-eight minutes once a week keeps them healthy all week.",
    ),
    FallacyCode.FA: (
        "Since coconuts have hair and produce milk, therefore coconuts are mammals.",
    ),
    FallacyCode.FP: (
        "Since people with two lungs breathe out carbon dioxide, therefore people with one lung breathe out carbon monoxide.",
    ),
    FallacyCode.AF: (
        "Since the shampoo bottle says lather, rinse, repeat, therefore I can never stop washing my hair.",
    ),
    FallacyCode.FC: (
        "Since seat belts survive crashes, therefore cars made out of seat belts would be indestructible.",
    ),
    FallacyCode.BQ: (
        "Since the scripture says it is true, therefore the scripture must be true.",
    ),
    FallacyCode.CT: (
        "Since time is money and poor countries have less money, therefore time moves slower in poor countries.",
    ),
    FallacyCode.IE: (
        "Since pedaling forwards on an exercise bike burns calories, therefore pedaling backwards must add them.",
    ),
    FallacyCode.IT: (
        "Since rain makes the ground wet, therefore wet ground means it has rained.",
    ),
    FallacyCode.WD: (
        "Since we always find meteors in craters, therefore craters cause meteors.",
    ),
    FallacyCode.FS: (
        "Since the room goes dark right after I flip the switch, therefore the switch emits darkness.",
    ),
}


@dataclass
class GenerationBundle:
    code: FallacyCode
    seed: KnowledgeBase
    generated: list[FactRecord]
    kb: KnowledgeBase
    tuples: list[ValidTuple]
    sentences: list[tuple[str, FallacyCode]]
    diagnostics: list[str]


def generate_bundle(code: FallacyCode, n: int, gateway: Gateway) -> GenerationBundle:
    """Full generation loop for one code: expand facts, derive, transform.

    Only tuples that are not already derivable from the seed alone are
    transformed, so the output covers exactly the newly generated instances.
    """
    seed = load_seed(code)
    generated = gateway.generate_facts(code, seed, n)
    kb = seed.extended(records=generated)
    baseline = {t.args for t in derive_instances(code, seed)}
    tuples = [t for t in derive_instances(code, kb) if t.args not in baseline]
    diagnostics = []
    note = ordering_diagnostic(code, kb)
    if note:
        diagnostics.append(note)
    sentences: list[tuple[str, FallacyCode]] = []
    if tuples:
        sentences = gateway.transform_to_sentences(tuples, STYLE_EXAMPLES[code])
    return GenerationBundle(code, seed, generated, kb, tuples, sentences, diagnostics)


def write_bundle(bundle: GenerationBundle, out_dir: str | Path) -> list[Path]:
    """Write facts, tuples, and labeled sentences; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    code = bundle.code.value

    facts_path = out / f"{code.lower()}_facts.pl"
    facts_path.write_text(bundle.kb.serialize(), encoding="utf-8")

    tuples_path = out / f"{code.lower()}_tuples.pl"
    tuples_path.write_text(
        "".join(f"{t.render()}.\n" for t in bundle.tuples), encoding="utf-8"
    )

    sentences_path = out / f"{code.lower()}_sentences.jsonl"
    lines = []
    for i, (sentence, label) in enumerate(bundle.sentences):
        lines.append(
            json.dumps(
                {
                    "id": f"{code}-{i:03d}",
                    "sentence": sentence,
                    "labels": [label.value],
                    "source": "augmented",
                },
                sort_keys=True,
                ensure_ascii=True,
            )
        )
    sentences_path.write_text(
        "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
    )
    return [facts_path, tuples_path, sentences_path]


def score_sentences(
    rows: Sequence[tuple[str, str, FallacyCode]], gateway: Gateway
) -> list[tuple[str, ScoreTriple]]:
    """(id, triple) for each (id, sentence, code) row, in order."""
    return [(rid, gateway.score_sentence(sentence, code)) for rid, sentence, code in rows]


def write_scores(
    scored: Sequence[tuple[str, ScoreTriple]], method_tag: str, out_dir: str | Path
) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jsonl_path = out / "scores.jsonl"
    lines = []
    for rid, triple in scored:
        lines.append(
            json.dumps(
                {
                    "id": rid,
                    "sentence": triple.sentence,
                    "code": triple.code.value,
                    "scores": list(triple.scores),
                    "mean": round(float(triple.mean), 6),
                },
                sort_keys=True,
                ensure_ascii=True,
            )
        )
    jsonl_path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    stats = score_stats([t for _, t in scored], method_tag)
    summary_path = out / "score_summary.txt"
    summary_path.write_text(stats.means_table(), encoding="utf-8")
    histogram_path = out / "score_histogram.csv"
    histogram_path.write_text(stats.histogram_csv(), encoding="utf-8")
    return [jsonl_path, summary_path, histogram_path]


def judge_benchmark(
    entries: Sequence[BenchmarkEntry], gateway: Gateway
) -> list[Prediction]:
    verdicts = [gateway.judge_sentence(entry.sentence) for entry in entries]
    return predictions_from_verdicts([e.id for e in entries], verdicts)


def write_report(
    report: EvalReport,
    preds: Sequence[Prediction],
    out_dir: str | Path,
) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    json_path.write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True, ensure_ascii=True)
        + "\n",
        encoding="utf-8",
    )
    text_path = out / "report.txt"
    text_path.write_text(report.to_text(), encoding="utf-8")
    preds_path = out / "predictions.jsonl"
    lines = [
        json.dumps(
            {
                "id": p.entry_id,
                "logic_error": p.logic_error,
                "labels": [c.value for c in p.labels],
            },
            sort_keys=True,
            ensure_ascii=True,
        )
        for p in preds
    ]
    preds_path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return [json_path, text_path, preds_path]
