"""LLM interactions: fact generation, sentence transformation, 0-3 quality
scoring, and fallacy judging, over pluggable live / record / replay backends.

Scoring and judging always run at temperature 0.  Fact generation and
sentence transformation use the configured generation temperature (default
1.0).  A recorded cassette makes every pipeline run byte-reproducible: the
same cassette and inputs yield identical outputs.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import string
import threading
import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import requests

from .errors import (
    CountMismatchError,
    EmptyYieldError,
    JudgeJsonError,
    ProviderError,
    ReplayMissError,
    ScoreParseError,
    TemplateError,
    UnknownLabelError,
)
from .kb import FactRecord, KnowledgeBase
from .labels import FallacyCode, definitions_block, parse_code
from .parser import ParseError, parse_program, serialize_clause
from .schemas import ValidTuple, schema_for, validate_kb_against_schema

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Prompt templates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    instruction: str
    query: str

    def render(self, **values: object) -> str:
        text = f"{self.instruction}\n\n{self.query}"
        fields = {
            name
            for _, name, _, _ in string.Formatter().parse(text)
            if name is not None
        }
        missing = fields - set(values)
        if missing:
            raise TemplateError(
                f"template {self.id!r} missing placeholder(s): {sorted(missing)}"
            )
        return text.format(**values)


GEN_FACTS_TEMPLATE = PromptTemplate(
    id="gen_facts",
    instruction=(
        "generate {n} new {fallacy_type} prolog knowledge combinations, "
        "below are examples. Keep the same predicates and arities, keep every "
        "fact ground, group the facts of one combination together, separate "
        "combinations with a blank line, and annotate each fact with an "
        "inline % comment explaining it."
    ),
    query="{prolog_facts}\n\n{prolog_rule}",
)

TRANSFORM_TEMPLATE = PromptTemplate(
    id="transform",
    instruction=(
        "Generate {n} new {fallacy_type} sentences. Study the style of the "
        "sentences in the provided list and transform the given Prolog facts "
        "into natural language sentences that follow a similar style and "
        "structure. Return exactly one sentence per fact line, in order, and "
        "nothing else."
    ),
    query="List:\n[{list_of_sentence}]\n\nProlog Facts:\n{prolog_facts}",
)

SCORE_TEMPLATE = PromptTemplate(
    id="score",
    instruction=(
        "You are a professional logical fallacy evaluator. Your task is to "
        "review sentences that illustrate specific logical fallacies and "
        "assign each a score based on how well the sentence demonstrates the "
        "intended fallacy (as indicated by its type field). Evaluate them "
        "holistically based on your understanding of how these fallacies "
        "manifest in real-world human communication and reasoning. Do not "
        "use code-based methods.\n"
        "Scoring Guide:\n"
        "- Score 0: The sentence makes no sense or does not exhibit the "
        "intended logical error.\n"
        "- Score 1: The sentence shows only minor applicability of the "
        "fallacy in its type field.\n"
        "- Score 2: The sentence largely demonstrates the fallacy.\n"
        "- Score 3: The sentence is a perfect example of the logical fallacy "
        "as described in its type.\n"
        "Definitions:\n{fallacy_definitions}"
    ),
    query=(
        "Score the following sentence. Reply with a single integer from 0 "
        "to 3.\n"
        "type: {fallacy_type}\n"
        "sentence: {sentence}"
    ),
)

JUDGE_TEMPLATE = PromptTemplate(
    id="judge",
    instruction=(
        "You're an expert in logic. Here's a categorisation of the 14 logic "
        "errors. Given sentences with logical errors, reflect on them and "
        "deal with them as required.\n{fallacy_definitions}"
    ),
    query=(
        "Judge the following element:\n\n{sentence}\n\n"
        "Please return the result in JSON format as follows:\n\n"
        "{{\n"
        '  "sentence": "The input sentence as provided.",\n'
        '  "logic_error": "yes or no - indicate whether the sentence '
        'contains a logical error.",\n'
        '  "logic_fallacies": "List all applicable fallacy categories, '
        'ranked by relevance.",\n'
        '  "details": "Provide a clear and explicit explanation supporting '
        'your judgment."\n'
        "}}"
    ),
)

TEMPLATES = {
    t.id: t
    for t in (GEN_FACTS_TEMPLATE, TRANSFORM_TEMPLATE, SCORE_TEMPLATE, JUDGE_TEMPLATE)
}


# ---------------------------------------------------------------------------
# Providers
# ---------------------------------------------------------------------------


@dataclass
class ProviderConfig:
    endpoint: str = ""
    model_name: str = "unspecified"
    temperature: float = 1.0
    max_retries: int = 3
    parallelism_limit: int = 4
    credentials_env: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")


def fingerprint(model: str, temperature: float, prompt: str) -> str:
    payload = json.dumps(
        {"model": model, "temperature": temperature, "prompt": prompt},
        sort_keys=True,
        ensure_ascii=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Provider(Protocol):
    model_name: str
    request_count: int

    def complete(self, prompt: str, *, temperature: float) -> str: ...


class HttpProvider:
    """Chat-completion style HTTP backend with exponential-backoff retries."""

    def __init__(self, config: ProviderConfig, *, session=None, sleep=time.sleep):
        if not config.endpoint:
            raise ValueError("live provider needs an endpoint")
        self.config = config
        self.model_name = config.model_name
        self.request_count = 0
        self._session = session or requests.Session()
        self._sleep = sleep

    def complete(self, prompt: str, *, temperature: float) -> str:
        headers = {"Content-Type": "application/json"}
        if self.config.credentials_env:
            key = os.environ.get(self.config.credentials_env, "")
            if key:
                headers["Authorization"] = f"Bearer {key}"
        payload = {
            "model": self.model_name,
            "temperature": temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            self.request_count += 1
            try:
                response = self._session.post(
                    self.config.endpoint, json=payload, headers=headers, timeout=120
                )
                if response.status_code in (429,) or response.status_code >= 500:
                    raise ProviderError(f"status {response.status_code}")
                response.raise_for_status()
                body = response.json()
                return body["choices"][0]["message"]["content"]
            except Exception as exc:  # noqa: BLE001 - every failure is retryable here
                last_error = exc
                if attempt < self.config.max_retries:
                    self._sleep(2**attempt)
        raise ProviderError(f"provider failed after retries: {last_error}")


class ReplayProvider:
    """Serves recorded responses; an unmatched request is an error."""

    def __init__(self, cassette_path: str | Path, *, model_name: str = "unspecified"):
        self.model_name = model_name
        self.request_count = 0
        self._lock = threading.Lock()
        self._queues: dict[str, deque[str]] = {}
        for entry in load_cassette(cassette_path):
            self._queues.setdefault(entry["fingerprint"], deque()).append(
                entry["response"]
            )

    def complete(self, prompt: str, *, temperature: float) -> str:
        key = fingerprint(self.model_name, temperature, prompt)
        with self._lock:
            self.request_count += 1
            queue = self._queues.get(key)
            if not queue:
                raise ReplayMissError(
                    f"no recorded response for fingerprint {key[:12]}... "
                    f"(prompt starts: {prompt[:60]!r})"
                )
            return queue.popleft()


class RecordingProvider:
    """Wraps a live provider and captures every exchange into a cassette."""

    def __init__(self, inner: Provider, cassette_path: str | Path):
        self.inner = inner
        self.model_name = inner.model_name
        self.path = Path(cassette_path)
        self._lock = threading.Lock()
        self._entries: list[dict[str, str]] = []

    @property
    def request_count(self) -> int:
        return self.inner.request_count

    def complete(self, prompt: str, *, temperature: float) -> str:
        response = self.inner.complete(prompt, temperature=temperature)
        key = fingerprint(self.model_name, temperature, prompt)
        with self._lock:
            self._entries.append({"fingerprint": key, "response": response})
        return response

    def save(self) -> None:
        write_cassette(self.path, self._entries)


def load_cassette(path: str | Path) -> list[dict[str, str]]:
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            entries.append(json.loads(line))
    return entries


def write_cassette(path: str | Path, entries: Iterable[dict[str, str]]) -> None:
    lines = [json.dumps(e, sort_keys=True, ensure_ascii=True) for e in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Verdicts and score triples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JudgeVerdict:
    sentence: str
    logic_error: bool
    logic_fallacies: tuple[FallacyCode, ...]  # order encodes rank
    details: str


@dataclass(frozen=True)
class ScoreTriple:
    sentence: str
    code: FallacyCode
    scores: tuple[int, int, int]

    def __post_init__(self):
        if len(self.scores) != 3 or any(s not in (0, 1, 2, 3) for s in self.scores):
            raise ValueError("a score triple is exactly three integers in 0..3")

    @property
    def mean(self) -> Fraction:
        return Fraction(sum(self.scores), 3)


# ---------------------------------------------------------------------------
# Gateway
# ---------------------------------------------------------------------------


_SCORE_RE = re.compile(r"(?<![\d.])([0-3])(?![\d.])")
_FENCE_RE = re.compile(r"^```[a-zA-Z0-9_-]*\s*$")


class Gateway:
    """High-level LLM operations over one provider."""

    def __init__(
        self,
        provider: Provider,
        *,
        generation_temperature: float = 1.0,
        batch_size: int = 20,
    ):
        self.provider = provider
        self.generation_temperature = generation_temperature
        self.batch_size = batch_size

    # -- fact generation ----------------------------------------------------

    def generate_facts(
        self, code: FallacyCode, seed: KnowledgeBase, n: int | None = None
    ) -> list[FactRecord]:
        """Ask the model for ``n`` new fact groups (default: the configured
        batch size); keep only groups that parse and validate cleanly against
        the schema."""
        if n is None:
            n = self.batch_size
        if n <= 0:
            raise EmptyYieldError("requested zero fact combinations")
        if not seed.facts:
            raise ValueError("seed knowledge base is empty")
        schema = schema_for(code)
        prompt = GEN_FACTS_TEMPLATE.render(
            n=n,
            fallacy_type=code.display_name,
            prolog_facts=_grouped_fact_text(seed),
            prolog_rule=schema.source(),
        )
        response = self.provider.complete(
            prompt, temperature=self.generation_temperature
        )
        records, rejected = self._harvest_fact_groups(code, seed, response)
        if rejected:
            log.warning(
                "%s: rejected %d of %d generated group(s)",
                code.value,
                rejected,
                rejected + _group_count(records),
            )
        if not records:
            raise EmptyYieldError(f"{code.value}: no generated group parsed cleanly")
        return records

    def _harvest_fact_groups(
        self, code: FallacyCode, seed: KnowledgeBase, response: str
    ) -> tuple[list[FactRecord], int]:
        records: list[FactRecord] = []
        rejected = 0
        next_group = seed.max_group_id() + 1
        for block in _split_blocks(_strip_fences(response)):
            try:
                parsed = parse_program(block)
            except ParseError as exc:
                rejected += 1
                log.warning("%s: dropped unparseable group: %s", code.value, exc)
                continue
            clauses = [item.clause for item in parsed]
            if not clauses or not all(c.is_fact for c in clauses):
                rejected += 1
                log.warning("%s: dropped group containing non-facts", code.value)
                continue
            report = validate_kb_against_schema(code, clauses)
            if not report.clean:
                rejected += 1
                log.warning("%s: dropped invalid group: %s", code.value, report.render())
                continue
            for item in parsed:
                records.append(FactRecord(item.clause, item.comment, next_group))
            next_group += 1
        return records, rejected

    # -- sentence transformation ---------------------------------------------

    def transform_to_sentences(
        self, tuples: Sequence[ValidTuple], style_examples: Sequence[str]
    ) -> list[tuple[str, FallacyCode]]:
        """One sentence per derived tuple, in order."""
        if not tuples:
            raise ValueError("no tuples to transform")
        codes = {t.code for t in tuples}
        if len(codes) != 1:
            raise ValueError("all tuples in one transformation batch share a code")
        code = tuples[0].code
        prompt = TRANSFORM_TEMPLATE.render(
            n=len(tuples),
            fallacy_type=code.display_name,
            list_of_sentence=", ".join(f'"{s}"' for s in style_examples),
            prolog_facts="\n".join(f"{t.render()}." for t in tuples),
        )
        sentences = self._sentences_from_response(
            self.provider.complete(prompt, temperature=self.generation_temperature)
        )
        if len(sentences) != len(tuples):
            corrective = (
                prompt
                + f"\n\nYou must return exactly {len(tuples)} sentences, "
                "one per line, with no extra text."
            )
            sentences = self._sentences_from_response(
                self.provider.complete(
                    corrective, temperature=self.generation_temperature
                )
            )
            if len(sentences) != len(tuples):
                raise CountMismatchError(
                    f"expected {len(tuples)} sentences, got {len(sentences)}"
                )
        return [(sentence, code) for sentence in sentences]

    @staticmethod
    def _sentences_from_response(response: str) -> list[str]:
        sentences = []
        for line in _strip_fences(response).splitlines():
            cleaned = re.sub(r"^\s*(?:[-*•]|\d+[.)])\s*", "", line).strip()
            if cleaned:
                sentences.append(cleaned)
        return sentences

    # -- quality scoring ------------------------------------------------------

    def score_sentence(self, sentence: str, code: FallacyCode) -> ScoreTriple:
        """Three independent temperature-0 scores with an exact mean."""
        prompt = SCORE_TEMPLATE.render(
            fallacy_definitions=definitions_block(),
            fallacy_type=code.display_name,
            sentence=sentence,
        )
        scores = []
        for _ in range(3):
            scores.append(self._one_score(prompt))
        return ScoreTriple(sentence, code, tuple(scores))

    def _one_score(self, prompt: str) -> int:
        for attempt in range(2):
            response = self.provider.complete(prompt, temperature=0.0)
            match = _SCORE_RE.search(response)
            if match:
                return int(match.group(1))
            if attempt == 0:
                log.warning("score response had no 0-3 integer, retrying once")
        raise ScoreParseError(f"no 0-3 integer in response: {response[:80]!r}")

    # -- judging ---------------------------------------------------------------

    def judge_sentence(self, sentence: str) -> JudgeVerdict:
        """Detection plus rank-ordered categorization with all 14 definitions."""
        prompt = JUDGE_TEMPLATE.render(
            fallacy_definitions=definitions_block(), sentence=sentence
        )
        last: Exception | None = None
        for attempt in range(2):
            response = self.provider.complete(prompt, temperature=0.0)
            try:
                return self._parse_verdict(sentence, response)
            except (JudgeJsonError, UnknownLabelError) as exc:
                last = exc
                if attempt == 0:
                    log.warning("judge response unusable (%s), retrying once", exc)
        raise JudgeJsonError(f"judge response unusable after retry: {last}")

    @staticmethod
    def _parse_verdict(sentence: str, response: str) -> JudgeVerdict:
        raw = _extract_json(response)
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise JudgeJsonError(f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise JudgeJsonError("expected a JSON object")
        flag = data.get("logic_error")
        if isinstance(flag, bool):
            logic_error = flag
        elif isinstance(flag, str) and flag.strip().lower() in ("yes", "no"):
            logic_error = flag.strip().lower() == "yes"
        else:
            raise JudgeJsonError(f"logic_error must be yes/no, got {flag!r}")
        labels_raw = data.get("logic_fallacies", [])
        if not isinstance(labels_raw, list):
            raise JudgeJsonError("logic_fallacies must be a list")
        labels = tuple(parse_code(item) for item in labels_raw)
        return JudgeVerdict(
            sentence=str(data.get("sentence", sentence)),
            logic_error=logic_error,
            logic_fallacies=labels,
            details=str(data.get("details", "")),
        )


# ---------------------------------------------------------------------------
# Response cleanup helpers
# ---------------------------------------------------------------------------


def _strip_fences(text: str) -> str:
    lines = [line for line in text.splitlines() if not _FENCE_RE.match(line)]
    return "\n".join(lines)


def _split_blocks(text: str) -> list[str]:
    blocks = []
    current: list[str] = []
    for line in text.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            blocks.append("\n".join(current))
            current = []
    if current:
        blocks.append("\n".join(current))
    return blocks


def _extract_json(text: str) -> str:
    stripped = text.strip()
    if stripped.startswith("```"):
        inner = _strip_fences(stripped).strip()
        return inner
    return stripped


def _grouped_fact_text(kb: KnowledgeBase) -> str:
    lines: list[str] = []
    current: int | None = None
    for record in kb.facts:
        if current is not None and record.group_id != current:
            lines.append("")
        current = record.group_id
        lines.append(serialize_clause(record.clause, record.comment))
    return "\n".join(lines)


def _group_count(records: Sequence[FactRecord]) -> int:
    return len({r.group_id for r in records})
