from __future__ import annotations

from fractions import Fraction

import pytest

from fallacylab.errors import (
    CountMismatchError,
    EmptyYieldError,
    JudgeJsonError,
    ProviderError,
    ReplayMissError,
    ScoreParseError,
    TemplateError,
)
from fallacylab.gateway import (
    GEN_FACTS_TEMPLATE,
    Gateway,
    HttpProvider,
    ProviderConfig,
    PromptTemplate,
    RecordingProvider,
    ReplayProvider,
    ScoreTriple,
    fingerprint,
    load_cassette,
    write_cassette,
)
from fallacylab.labels import FallacyCode
from fallacylab.schemas import ValidTuple, validate_kb_against_schema
from fallacylab.seeds import load_seed

from conftest import FakeProvider


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------


def test_template_renders_placeholders():
    text = GEN_FACTS_TEMPLATE.render(
        n=20, fallacy_type="Accident Fallacy", prolog_facts="f.", prolog_rule="r."
    )
    assert "generate 20 new Accident Fallacy prolog knowledge combinations" in text
    assert text.endswith("f.\n\nr.")


def test_template_rejects_unbound_placeholder():
    template = PromptTemplate("t", "hello {name}", "{payload}")
    with pytest.raises(TemplateError):
        template.render(name="x")


# ---------------------------------------------------------------------------
# Providers: fingerprints, replay, record
# ---------------------------------------------------------------------------


def test_fingerprint_is_stable_and_sensitive():
    a = fingerprint("m", 0.0, "prompt")
    assert a == fingerprint("m", 0.0, "prompt")
    assert a != fingerprint("m", 1.0, "prompt")
    assert a != fingerprint("other", 0.0, "prompt")


def test_replay_pops_fifo_per_fingerprint(tmp_path):
    path = tmp_path / "tape.jsonl"
    key = fingerprint("m", 0.0, "p")
    write_cassette(
        path,
        [
            {"fingerprint": key, "response": "first"},
            {"fingerprint": key, "response": "second"},
        ],
    )
    provider = ReplayProvider(path, model_name="m")
    assert provider.complete("p", temperature=0.0) == "first"
    assert provider.complete("p", temperature=0.0) == "second"
    with pytest.raises(ReplayMissError):
        provider.complete("p", temperature=0.0)


def test_record_then_replay_round_trip(tmp_path):
    path = tmp_path / "tape.jsonl"
    recorder = RecordingProvider(FakeProvider(["pong"], model_name="m"), path)
    assert recorder.complete("ping", temperature=0.5) == "pong"
    recorder.save()
    assert len(load_cassette(path)) == 1
    replay = ReplayProvider(path, model_name="m")
    assert replay.complete("ping", temperature=0.5) == "pong"


def test_http_provider_retries_then_errors(monkeypatch):
    class Session:
        def __init__(self):
            self.posts = 0

        def post(self, *a, **k):
            self.posts += 1
            raise ConnectionError("down")

    session = Session()
    provider = HttpProvider(
        ProviderConfig(endpoint="http://localhost:9/v1", model_name="m", max_retries=2),
        session=session,
        sleep=lambda _: None,
    )
    with pytest.raises(ProviderError):
        provider.complete("x", temperature=0.0)
    assert session.posts == 3  # initial try plus two retries


def test_http_provider_parses_chat_response():
    class Response:
        status_code = 200

        def raise_for_status(self):
            pass

        def json(self):
            return {"choices": [{"message": {"content": "hi"}}]}

    class Session:
        def post(self, url, json, headers, timeout):
            assert json["messages"][0]["content"] == "x"
            return Response()

    provider = HttpProvider(
        ProviderConfig(endpoint="http://localhost:9/v1", model_name="m"),
        session=Session(),
    )
    assert provider.complete("x", temperature=0.0) == "hi"


def test_provider_config_validates_temperature():
    with pytest.raises(ValueError):
        ProviderConfig(temperature=2.5)


# ---------------------------------------------------------------------------
# Fact generation
# ---------------------------------------------------------------------------


def af_group(i: int) -> str:
    return (
        f"hr(object_{i}, rule_{i}). % object {i} carries rule {i}\n"
        f"rri(rule_{i}, sane_reading_{i}). % read reasonably\n"
        f"rui(rule_{i}, absurd_reading_{i}). % read rigidly"
    )


def test_generate_facts_accepts_twenty_groups():
    response = "\n\n".join(af_group(i) for i in range(20))
    gateway = Gateway(FakeProvider([response]))
    records = gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF), 20)
    assert len(records) == 60
    assert len({r.group_id for r in records}) == 20
    # Fresh groups never collide with the seed's.
    assert min(r.group_id for r in records) > load_seed(FallacyCode.AF).max_group_id()


def test_generate_facts_drops_malformed_group(caplog):
    groups = [af_group(i) for i in range(19)]
    groups.append("hr(object_19 rule_19).")  # missing comma
    gateway = Gateway(FakeProvider(["\n\n".join(groups)]))
    with caplog.at_level("WARNING"):
        records = gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF), 20)
    assert len({r.group_id for r in records}) == 19
    assert any("dropped" in r.message for r in caplog.records)


def test_generate_facts_drops_group_with_wrong_vocabulary():
    groups = [af_group(0), "zz(a, b).\nrri(r, i).\nrui(r, k)."]
    gateway = Gateway(FakeProvider(["\n\n".join(groups)]))
    records = gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF), 2)
    assert len({r.group_id for r in records}) == 1


def test_generate_facts_strips_code_fences():
    response = f"```prolog\n{af_group(0)}\n```"
    gateway = Gateway(FakeProvider([response]))
    records = gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF), 1)
    assert len(records) == 3


def test_generate_facts_zero_request_rejected():
    gateway = Gateway(FakeProvider([]))
    with pytest.raises(EmptyYieldError):
        gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF), 0)


def test_generate_facts_all_bad_raises_empty_yield():
    gateway = Gateway(FakeProvider(["not prolog at all !!!"]))
    with pytest.raises(EmptyYieldError):
        gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF), 5)


def test_accepted_records_validate_clean():
    response = "\n\n".join(af_group(i) for i in range(8))
    gateway = Gateway(FakeProvider([response]))
    records = gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF), 8)
    report = validate_kb_against_schema(FallacyCode.AF, [r.clause for r in records])
    assert report.clean


def test_generation_prompt_carries_grouped_seed_and_rule():
    provider = FakeProvider([af_group(0)])
    gateway = Gateway(provider, generation_temperature=0.7)
    gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF), 1)
    prompt, temperature = provider.calls[0]
    assert temperature == 0.7
    assert "hr(shampoo_bottle, lather_rinse_repeat). % " in prompt
    assert "pd(O, R, I, K) :- hr(O, R), rri(R, I), rui(R, K), I \\= K." in prompt


# ---------------------------------------------------------------------------
# Sentence transformation
# ---------------------------------------------------------------------------


def wd_tuple(effect: str, cause: str) -> ValidTuple:
    from fallacylab.engine import Atom

    return ValidTuple(FallacyCode.WD, (Atom(effect), Atom(cause)))


def test_transform_returns_labeled_sentences_in_order():
    tuples = [wd_tuple("craters_observed", "meteor_landing"), wd_tuple("b", "a")]
    response = (
        "Since we always find meteors in craters, therefore craters cause meteors.\n"
        "Since b follows a, therefore b causes a."
    )
    gateway = Gateway(FakeProvider([response]))
    out = gateway.transform_to_sentences(tuples, ["style one"])
    assert [code for _, code in out] == [FallacyCode.WD, FallacyCode.WD]
    assert out[0][0].startswith("Since we always find meteors")


def test_transform_strips_list_numbering():
    gateway = Gateway(FakeProvider(["1. First sentence.\n2) Second sentence."]))
    out = gateway.transform_to_sentences([wd_tuple("x", "y"), wd_tuple("p", "q")], [])
    assert [s for s, _ in out] == ["First sentence.", "Second sentence."]


def test_transform_retries_once_then_raises_count_mismatch():
    provider = FakeProvider(["only one line", "still one line"])
    gateway = Gateway(provider)
    with pytest.raises(CountMismatchError):
        gateway.transform_to_sentences([wd_tuple("x", "y"), wd_tuple("p", "q")], [])
    assert provider.request_count == 2


def test_transform_corrective_retry_recovers():
    provider = FakeProvider(["only one line", "line one\nline two"])
    gateway = Gateway(provider)
    out = gateway.transform_to_sentences([wd_tuple("x", "y"), wd_tuple("p", "q")], [])
    assert len(out) == 2


def test_transform_requires_tuples():
    gateway = Gateway(FakeProvider([]))
    with pytest.raises(ValueError):
        gateway.transform_to_sentences([], [])


def test_transform_requires_single_code():
    from fallacylab.engine import Atom

    mixed = [wd_tuple("x", "y"), ValidTuple(FallacyCode.FC, (Atom("a"), Atom("b"), Atom("c")))]
    gateway = Gateway(FakeProvider([]))
    with pytest.raises(ValueError):
        gateway.transform_to_sentences(mixed, [])


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------


def test_score_sentence_constant_triple():
    gateway = Gateway(FakeProvider(["3", "3", "3"]))
    triple = gateway.score_sentence("s", FallacyCode.AF)
    assert triple.scores == (3, 3, 3)
    assert triple.mean == Fraction(3)


def test_score_sentence_mixed_triple_exact_mean():
    provider = FakeProvider(["2", "Score: 3", "3"])
    gateway = Gateway(provider)
    triple = gateway.score_sentence("s", FallacyCode.IE)
    assert triple.scores == (2, 3, 3)
    assert triple.mean == Fraction(8, 3)
    assert all(t == 0.0 for _, t in provider.calls)


def test_score_sentence_unparseable_raises_after_retry():
    gateway = Gateway(FakeProvider(["great sentence!", "still no digits"]))
    with pytest.raises(ScoreParseError):
        gateway.score_sentence("s", FallacyCode.AF)


def test_score_triple_validates_values():
    with pytest.raises(ValueError):
        ScoreTriple("s", FallacyCode.AF, (4, 0, 0))


# ---------------------------------------------------------------------------
# Judging
# ---------------------------------------------------------------------------


def test_judge_negative_verdict():
    response = (
        '{"sentence": "s", "logic_error": "no", "logic_fallacies": [], "details": "fine"}'
    )
    gateway = Gateway(FakeProvider([response]))
    verdict = gateway.judge_sentence("s")
    assert verdict.logic_error is False
    assert verdict.logic_fallacies == ()


def test_judge_maps_full_names_in_rank_order():
    response = (
        '{"sentence": "s", "logic_error": "yes", '
        '"logic_fallacies": ["False Premise", "Equivocation"], "details": "d"}'
    )
    gateway = Gateway(FakeProvider([response]))
    verdict = gateway.judge_sentence("s")
    assert verdict.logic_fallacies == (FallacyCode.FP, FallacyCode.EC)


def test_judge_normalizes_ac_alias_to_af():
    response = (
        '{"sentence": "s", "logic_error": "yes", "logic_fallacies": ["AC"], "details": ""}'
    )
    gateway = Gateway(FakeProvider([response]))
    assert gateway.judge_sentence("s").logic_fallacies == (FallacyCode.AF,)


def test_judge_accepts_single_fenced_block():
    response = '```json\n{"sentence": "s", "logic_error": "yes", "logic_fallacies": ["WD"], "details": ""}\n```'
    gateway = Gateway(FakeProvider([response]))
    assert gateway.judge_sentence("s").logic_fallacies == (FallacyCode.WD,)


def test_judge_retries_once_then_raises():
    provider = FakeProvider(["not json", "also not json"])
    gateway = Gateway(provider)
    with pytest.raises(JudgeJsonError):
        gateway.judge_sentence("s")
    assert provider.request_count == 2


def test_judge_unknown_label_is_an_error():
    bad = '{"sentence": "s", "logic_error": "yes", "logic_fallacies": ["Made Up"], "details": ""}'
    gateway = Gateway(FakeProvider([bad, bad]))
    with pytest.raises(JudgeJsonError):
        gateway.judge_sentence("s")


def test_judge_runs_at_temperature_zero():
    provider = FakeProvider(
        ['{"sentence": "s", "logic_error": "no", "logic_fallacies": [], "details": ""}']
    )
    Gateway(provider, generation_temperature=1.0).judge_sentence("s")
    assert provider.calls[0][1] == 0.0


def test_generate_facts_drops_group_containing_rules():
    groups = [af_group(0), "hr(sign, rule_x).\nrri(R, I) :- hr(R, I)."]
    gateway = Gateway(FakeProvider(["\n\n".join(groups)]))
    records = gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF), 2)
    assert len({r.group_id for r in records}) == 1


def test_generate_facts_defaults_to_batch_size():
    provider = FakeProvider(["\n\n".join(af_group(i) for i in range(4))])
    gateway = Gateway(provider, batch_size=4)
    records = gateway.generate_facts(FallacyCode.AF, load_seed(FallacyCode.AF))
    assert len({r.group_id for r in records}) == 4
    assert "generate 4 new" in provider.calls[0][0]
