"""Judge prompt rendering and output parsing, including the one-retry policy."""

from __future__ import annotations

import json
import logging

import pytest
from conftest import ScriptedProvider

from geodistill.judging import (
    ScoreParseError,
    VerdictParseError,
    call_pairwise,
    call_reference,
    parse_pairwise,
    parse_reference,
    render_pairwise_prompt,
    render_reference_prompt,
)


class TestParsePairwise:
    def test_canonical_format(self):
        assert parse_pairwise("Score A: [7], Score B: [8.5]") == (7.0, 8.5)

    def test_brackets_optional(self):
        assert parse_pairwise("Score A: 7, Score B: 8") == (7.0, 8.0)

    def test_case_insensitive_decimals(self):
        assert parse_pairwise("score a: [6.25]  score b: [9.75]") == (6.25, 9.75)

    def test_scores_after_justification(self):
        text = (
            "Model A confuses thrust and normal faulting.\n"
            "Model B cites Andersonian theory correctly.\n\n"
            "Score A: [4], Score B: [9]"
        )
        assert parse_pairwise(text) == (4.0, 9.0)

    def test_out_of_range_clamps_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING):
            assert parse_pairwise("Score A: [12], Score B: [3]") == (10.0, 3.0)
        assert "clamped" in caplog.text

    def test_prose_only_raises(self):
        with pytest.raises(VerdictParseError):
            parse_pairwise("Model A is clearly better overall.")

    def test_single_score_raises(self):
        with pytest.raises(VerdictParseError):
            parse_pairwise("Score A: [7]")


class TestParseReference:
    def test_documented_example(self):
        raw = '{"score": 8, "reason": "brief professional explanation"}'
        score, reason = parse_reference(raw)
        assert (score, reason) == (8.0, "brief professional explanation")
        # the parsed fields rebuild the original object exactly
        assert {"score": int(score), "reason": reason} == json.loads(raw)

    def test_fenced_json(self):
        text = '```json\n{"score": 6.5, "reason": "partial coverage"}\n```'
        assert parse_reference(text) == (6.5, "partial coverage")

    def test_prose_wrapped_json(self):
        text = 'Here is my assessment:\n{"score": 7.5, "reason": "ok"}\nThank you.'
        assert parse_reference(text) == (7.5, "ok")

    def test_numeric_string_score(self):
        assert parse_reference('{"score": "8.5", "reason": "x"}') == (8.5, "x")

    def test_braces_inside_reason(self):
        text = '{"score": 6, "reason": "uses {curly} notation and [brackets]"}'
        assert parse_reference(text) == (6.0, "uses {curly} notation and [brackets]")

    def test_clamps_out_of_range(self, caplog):
        with caplog.at_level(logging.WARNING):
            assert parse_reference('{"score": 14, "reason": "generous"}')[0] == 10.0
            assert parse_reference('{"score": -2, "reason": "harsh"}')[0] == 0.0
        assert "clamped" in caplog.text

    def test_missing_reason_defaults_empty(self):
        assert parse_reference('{"score": 5}') == (5.0, "")

    def test_non_string_reason_is_coerced(self):
        score, reason = parse_reference('{"score": 5, "reason": ["a", "b"]}')
        assert score == 5.0
        assert isinstance(reason, str)

    def test_missing_score_raises(self):
        with pytest.raises(ScoreParseError):
            parse_reference('{"reason": "no score given"}')

    def test_boolean_score_raises(self):
        with pytest.raises(ScoreParseError):
            parse_reference('{"score": true, "reason": "x"}')

    def test_non_numeric_score_raises(self):
        with pytest.raises(ScoreParseError):
            parse_reference('{"score": "high", "reason": "x"}')

    def test_no_json_raises(self):
        with pytest.raises(ScoreParseError):
            parse_reference("The answer deserves an eight.")


class TestPromptRendering:
    def test_pairwise_slots_are_filled(self):
        prompt = render_pairwise_prompt("Why do faults dip?", "answer one", "answer two")
        assert "Why do faults dip?" in prompt
        assert "answer one" in prompt
        assert "answer two" in prompt
        assert "[Insert" not in prompt

    def test_pairwise_prompt_is_blind(self):
        # models are only ever called A and B inside the prompt
        prompt = render_pairwise_prompt("q", "a1", "a2")
        assert "Model A" in prompt
        assert "Model B" in prompt

    def test_reference_slots_are_filled(self):
        prompt = render_reference_prompt("What is gneiss?", "a banded rock", "some answer")
        assert "What is gneiss?" in prompt
        assert "a banded rock" in prompt
        assert "some answer" in prompt
        # the JSON output example must survive slot filling
        assert '{"score": 8, "reason"' in prompt


class TestCallRetries:
    def test_pairwise_first_try(self):
        provider = ScriptedProvider(["Score A: [6], Score B: [7]"])
        a, b, raw = call_pairwise(provider, "judge", "q", "ans-a", "ans-b")
        assert (a, b) == (6.0, 7.0)
        assert provider.calls == 1
        assert "Score A" in raw

    def test_pairwise_retry_appends_reminder(self):
        provider = ScriptedProvider(["I refuse to score.", "Score A: [6], Score B: [7]"])
        a, b, _ = call_pairwise(provider, "judge", "q", "ans-a", "ans-b")
        assert (a, b) == (6.0, 7.0)
        assert provider.calls == 2
        assert "could not be parsed" in provider.requests[1].user
        assert provider.requests[0].user in provider.requests[1].user

    def test_pairwise_gives_up_after_one_retry(self):
        provider = ScriptedProvider(["bad", "still bad"])
        with pytest.raises(VerdictParseError):
            call_pairwise(provider, "judge", "q", "a", "b")
        assert provider.calls == 2

    def test_reference_retry(self):
        provider = ScriptedProvider(["no json", '{"score": 9, "reason": "solid"}'])
        score, reason, _ = call_reference(provider, "judge", "q", "ref", "ans")
        assert (score, reason) == (9.0, "solid")
        assert provider.calls == 2

    def test_reference_gives_up_after_one_retry(self):
        provider = ScriptedProvider(["bad", "worse"])
        with pytest.raises(ScoreParseError):
            call_reference(provider, "judge", "q", "ref", "ans")
        assert provider.calls == 2

    def test_judge_requests_run_cold(self):
        provider = ScriptedProvider(["Score A: [5], Score B: [5]"])
        call_pairwise(provider, "judge", "q", "a", "b")
        req = provider.requests[0]
        assert req.temperature == 0.0
        assert req.request_tag == "judge_pairwise"

        provider = ScriptedProvider(['{"score": 5, "reason": "mid"}'])
        call_reference(provider, "judge", "q", "ref", "ans")
        req = provider.requests[0]
        assert req.temperature == 0.0
        assert req.request_tag == "judge_reference"
