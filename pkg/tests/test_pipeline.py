"""Pipeline orchestration: stages, failure handling, aggregation, tables."""

from __future__ import annotations

import dataclasses
import json

import pytest

from faithsum.config import load_config
from faithsum.corpus import ChqRecord, Language
from faithsum.errors import BackendError, ConfigError
from faithsum.generate import MODE_NO_CONTEXT, MODE_SINGLE, MockBackend
from faithsum.pipeline import (
    SCORER_URL_ENV,
    aggregate,
    build_backend,
    build_scorer,
    extract_record,
    ingest_records,
    load_resources,
    render_table,
    run_extraction,
    run_metadata,
    run_pipeline,
    summarize_record,
    sweep_temperatures,
    write_json,
    write_jsonl,
)
from faithsum.scoring import CachedScorerClient, HttpScorerClient, StubScorerClient

from conftest import write_config


@pytest.fixture
def small_config(tmp_path, e2e_csv):
    path = write_config(
        tmp_path / "run.yaml", e2e_csv,
        out_dir=tmp_path / "out", run={"limit": 6},
    )
    return load_config(path)


@pytest.fixture
def resources(small_config):
    return load_resources(small_config)


def sample_record(record_id="x1"):
    return ChqRecord(
        id=record_id,
        question=(
            "I am a 45 year old with diabetes. "
            "I take metformin every day. "
            "My cousin visited us last week. "
            "There is no chest pain. "
            "What should I do about the fever?"
        ),
        reference_summary="What should a person with diabetes do about fever?",
        language=Language.ENGLISH,
    )


# ---------------------------------------------------------------------------
# Resource and client construction.
# ---------------------------------------------------------------------------

def test_load_resources_packaged_defaults(small_config):
    res = load_resources(small_config)
    assert "the" in res.stopwords
    assert len(res.gazetteer) > 20
    assert res.abbreviations is not None and "dr." in res.abbreviations
    assert res.templates_dir is None


def test_build_backend_mock(small_config):
    backend = build_backend(small_config)
    assert isinstance(backend, MockBackend)


def test_build_backend_http(tmp_path, e2e_csv):
    path = write_config(
        tmp_path / "run.yaml", e2e_csv,
        out_dir=tmp_path / "out",
        generation={
            "backend": "openai-compatible-http",
            "base_url": "http://127.0.0.1:1",
            "model": "m1",
        },
    )
    backend = build_backend(load_config(path))
    assert backend.model == "m1"


def test_build_scorer_stub(small_config):
    scorer = build_scorer(small_config)
    assert isinstance(scorer, StubScorerClient)


def test_build_scorer_requires_url_for_summac(small_config, monkeypatch):
    monkeypatch.delenv(SCORER_URL_ENV, raising=False)
    small_config.scorer.url = None
    with pytest.raises(ConfigError, match="scorer"):
        build_scorer(small_config)


def test_build_scorer_none_when_not_needed(small_config, monkeypatch):
    monkeypatch.delenv(SCORER_URL_ENV, raising=False)
    small_config.scorer.url = None
    small_config.selector = dataclasses.replace(
        small_config.selector, kind="rouge1", rouge1_target="source"
    )
    assert build_scorer(small_config) is None


def test_build_scorer_env_fallback(small_config, monkeypatch):
    small_config.scorer.url = None
    monkeypatch.setenv(SCORER_URL_ENV, "stub")
    assert isinstance(build_scorer(small_config), StubScorerClient)
    monkeypatch.setenv(SCORER_URL_ENV, "http://127.0.0.1:9/")
    assert isinstance(build_scorer(small_config), HttpScorerClient)


def test_build_scorer_wraps_cache(small_config, tmp_path):
    small_config.scorer.cache_dir = tmp_path / "cache"
    scorer = build_scorer(small_config)
    assert isinstance(scorer, CachedScorerClient)
    assert scorer.model_id == StubScorerClient.model_id


def test_ingest_respects_limit(small_config):
    records, _ = ingest_records(small_config)
    assert len(records) == 6
    assert records[0].id == "q00000"


# ---------------------------------------------------------------------------
# Per-record stages.
# ---------------------------------------------------------------------------

def test_extract_record_shapes(small_config, resources):
    extraction = extract_record(sample_record(), resources, small_config)
    assert len(extraction.sentences) == 5
    assert len(extraction.scores) == 5
    assert extraction.iterations >= 1
    keys = {(m.canonical_id, m.negated) for m in extraction.mentions}
    assert keys == {
        ("diabetes", False),
        ("metformin", False),
        ("chest_pain", True),
        ("fever", False),
    }
    selected = extraction.context.selected
    assert selected == sorted(selected)
    assert len(selected) == 3  # default budget for five sentences
    assert 2 not in selected  # the entity-free small-talk sentence loses
    assert set(extraction.context.reasons) == set(selected)


def test_extraction_to_json_round_trips(small_config, resources):
    extraction = extract_record(sample_record(), resources, small_config)
    payload = json.loads(json.dumps(extraction.to_json()))
    assert payload["id"] == "x1"
    assert payload["n_sentences"] == 5
    assert len(payload["entities"]) == 4
    assert payload["selected"] == extraction.context.selected


def test_extract_record_empty_question_raises(small_config, resources):
    bad = ChqRecord(
        id="bad", question="   ", reference_summary=None, language=Language.ENGLISH
    )
    with pytest.raises(ValueError, match="no sentences"):
        extract_record(bad, resources, small_config)


def test_summarize_record_best_of_n(small_config, resources):
    extraction = extract_record(sample_record(), resources, small_config)
    output = summarize_record(
        extraction, resources, small_config, MockBackend(), StubScorerClient()
    )
    assert len(output.candidates) == 3
    assert [c.index for c in output.candidates] == [0, 1, 2]
    assert output.best.index in (0, 1, 2)
    assert output.best.text
    assert output.best.report.summac_zs is not None
    assert output.retries == 0


def test_summarize_record_single_mode(small_config, resources):
    config = dataclasses.replace(small_config, mode=MODE_SINGLE)
    extraction = extract_record(sample_record(), resources, config)
    output = summarize_record(
        extraction, resources, config, MockBackend(), StubScorerClient()
    )
    assert len(output.candidates) == 1
    assert output.best.index == 0


def test_summarize_record_no_context_mode(small_config, resources):
    config = dataclasses.replace(small_config, mode=MODE_NO_CONTEXT)
    extraction = extract_record(sample_record(), resources, config)
    output = summarize_record(
        extraction, resources, config, MockBackend(), StubScorerClient()
    )
    # The bare question is the whole context, so the single mock "sentence"
    # is the question itself (possibly truncated to the token budget).
    assert output.best.text.startswith("I am a 45 year old")


def test_record_output_to_json(small_config, resources):
    extraction = extract_record(sample_record(), resources, small_config)
    output = summarize_record(
        extraction, resources, small_config, MockBackend(), StubScorerClient()
    )
    payload = json.loads(json.dumps(output.to_json()))
    assert payload["best_index"] == output.best.index
    assert payload["summary"] == output.best.text
    assert len(payload["candidates"]) == 3
    assert payload["report"]["summac_zs"] == pytest.approx(
        output.best.report.summac_zs
    )


# ---------------------------------------------------------------------------
# Corpus driver and failure handling.
# ---------------------------------------------------------------------------

def test_run_extraction_collects_failures(small_config, resources):
    bad = ChqRecord(
        id="bad", question="  ", reference_summary=None, language=Language.ENGLISH
    )
    extractions, failures = run_extraction(
        [sample_record("a"), bad, sample_record("b")], small_config, resources
    )
    assert [e.record.id for e in extractions] == ["a", "b"]
    assert len(failures) == 1
    assert failures[0].record_id == "bad"
    assert failures[0].stage == "extract"


def test_run_extraction_strict_raises(small_config, resources):
    small_config.run.strict = True
    bad = ChqRecord(
        id="bad", question="  ", reference_summary=None, language=Language.ENGLISH
    )
    with pytest.raises(ValueError):
        run_extraction([bad], small_config, resources)


def test_run_pipeline_end_to_end(small_config, resources):
    records, _ = ingest_records(small_config)
    result = run_pipeline(
        records, small_config, resources, MockBackend(), StubScorerClient()
    )
    assert not result.failures
    assert [o.record.id for o in result.outputs] == [r.id for r in records]
    assert all(o.best.text for o in result.outputs)
    assert len(result.reports) == len(records)


def test_run_pipeline_is_deterministic(small_config, resources):
    records, _ = ingest_records(small_config)

    def payloads():
        result = run_pipeline(
            records, small_config, resources, MockBackend(), StubScorerClient()
        )
        return [o.to_json() for o in result.outputs]

    assert payloads() == payloads()


def test_run_pipeline_worker_count_does_not_change_output(small_config, resources):
    records, _ = ingest_records(small_config)
    serial_config = dataclasses.replace(small_config)
    serial_config.run = dataclasses.replace(small_config.run, workers=1)
    parallel = run_pipeline(
        records, small_config, resources, MockBackend(), StubScorerClient()
    )
    serial = run_pipeline(
        records, serial_config, resources, MockBackend(), StubScorerClient()
    )
    assert [o.to_json() for o in parallel.outputs] == [
        o.to_json() for o in serial.outputs
    ]


def test_run_pipeline_records_summarize_failures(small_config, resources):
    class ExplodingBackend:
        backend_id = "exploding"

        def complete(self, prompt, params, index):
            raise BackendError("scripted failure")

    records, _ = ingest_records(small_config)
    result = run_pipeline(
        records[:2], small_config, resources, ExplodingBackend(), StubScorerClient()
    )
    assert not result.outputs
    assert [f.stage for f in result.failures] == ["summarize", "summarize"]


# ---------------------------------------------------------------------------
# Aggregation and rendering.
# ---------------------------------------------------------------------------

def test_aggregate_empty():
    agg = aggregate([])
    assert agg["n_records"] == 0
    assert agg["rouge1"] is None
    assert agg["negation_consistency"] is None


def test_aggregate_means_and_none_handling(small_config, resources):
    records, _ = ingest_records(small_config)
    scored = run_pipeline(
        records, small_config, resources, MockBackend(), StubScorerClient()
    )
    agg = aggregate(scored.reports)
    assert agg["n_records"] == len(records)
    manual_r1 = sum(r.r1.f1 for r in scored.reports) / len(scored.reports)
    assert agg["rouge1"] == pytest.approx(manual_r1)
    assert 0.0 <= agg["negation_consistency"] <= 1.0

    # Without a scorer the NLI-based metrics aggregate to None; the
    # selector must then be one that works from ROUGE alone.
    rouge_config = dataclasses.replace(
        small_config,
        selector=dataclasses.replace(
            small_config.selector, kind="rouge1", rouge1_target="source"
        ),
    )
    unscored = run_pipeline(
        records, rouge_config, resources, MockBackend(), None
    )
    agg = aggregate(unscored.reports)
    assert agg["summac_zs"] is None
    assert agg["align"] is None
    assert agg["bert_f1"] is None
    assert agg["rouge1"] is not None


def test_render_table_language_columns():
    agg = {
        "rouge1": 0.5, "rouge2": 0.25, "rougeL": 0.5, "bert_f1": None,
        "fre": 62.5, "summac_zs": 0.4, "align": 0.9,
    }
    english = render_table([("mock", agg)], Language.ENGLISH)
    assert "Read." in english
    assert "62.50" in english
    assert "50.00" in english  # rouge1 is scaled by 100
    assert "n/a" in english  # missing bert
    bangla = render_table([("mock", agg)], Language.BANGLA)
    assert "Read." not in bangla
    assert "62.50" not in bangla


def test_render_table_alignment():
    agg = {"rouge1": 1.0}
    text = render_table([("a", agg), ("longer-name", agg)], Language.BANGLA)
    lines = text.splitlines()
    assert len({len(line) for line in lines if line}) == 1  # rectangular
    assert lines[0].startswith("system")


# ---------------------------------------------------------------------------
# Artifacts, metadata, sweeps.
# ---------------------------------------------------------------------------

def test_write_json_and_jsonl(tmp_path):
    target = tmp_path / "deep" / "out.json"
    write_json(target, {"b": 1, "a": [1, 2]})
    text = target.read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"b"')  # sorted keys
    assert text.endswith("\n")

    rows = [{"x": 1}, {"x": 2}, {"x": 3}]
    count = write_jsonl(tmp_path / "rows.jsonl", rows)
    assert count == 3
    lines = (tmp_path / "rows.jsonl").read_text(encoding="utf-8").splitlines()
    assert [json.loads(line) for line in lines] == rows


def test_run_metadata_marks_overrides(small_config):
    meta = run_metadata(small_config)
    assert "fingerprint" in meta
    assert meta["kernels"] in ("native", "pure")
    assert "generation_override" not in meta

    override = dataclasses.replace(small_config.generation, temperature=0.9)
    meta = run_metadata(small_config, override)
    assert meta["generation_override"]["temperature"] == 0.9


def test_sweep_temperatures_orders_rows(small_config, resources):
    records, _ = ingest_records(small_config)
    rows, failures = sweep_temperatures(
        records[:4], small_config, resources, MockBackend(), StubScorerClient(),
        temperatures=[0.1, 0.9],
    )
    assert not failures
    assert [t for t, _ in rows] == [0.1, 0.9]
    for _, agg in rows:
        assert agg["n_records"] == 4
