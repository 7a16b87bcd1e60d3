"""Dump parsing, cleansing passes, and candidate filtering."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruhate.ingest import (
    CleansedText,
    CleansingConfig,
    Dropped,
    MalformedLine,
    RawTweet,
    cleanse,
    filter_candidates,
    filter_candidates_audit,
    parse_dump,
    render_tsv,
    run_pipeline,
)
from ruhate.normalize import NormalizationLexicon


class TestParseDump:
    def test_single_minimal_record(self):
        out = parse_dump(['{"id":"1","text":"salam"}'])
        assert len(out) == 1
        assert out[0].id == "1"
        assert out[0].text == "salam"
        assert not out[0].has_media
        assert not out[0].is_retweet

    def test_empty_stream(self):
        assert parse_dump([]) == []

    def test_blank_lines_skipped_but_counted(self):
        out = parse_dump(['{"id":"1","text":"a"}', "", "   ", '{"id":"2","text":"b"}'])
        assert [t.id for t in out] == ["1", "2"]

    def test_missing_text_aborts_with_line_number(self):
        lines = ['{"id":"1","text":"a"}', '{"id":"2"}', '{"id":"3","text":"c"}']
        with pytest.raises(MalformedLine) as exc:
            parse_dump(lines)
        assert exc.value.line_no == 2

    def test_bad_json_aborts(self):
        with pytest.raises(MalformedLine) as exc:
            parse_dump(["{nope"])
        assert exc.value.line_no == 1

    def test_duplicate_id_aborts(self):
        lines = ['{"id":"1","text":"a"}', '{"id":"1","text":"b"}']
        with pytest.raises(MalformedLine) as exc:
            parse_dump(lines)
        assert exc.value.line_no == 2

    def test_invalid_utf8_bytes_abort(self):
        with pytest.raises(MalformedLine) as exc:
            parse_dump([b'{"id":"1","text":"a"}', b"\xff\xfe{"])
        assert exc.value.line_no == 2

    def test_optional_fields(self):
        line = json.dumps(
            {
                "id": "9",
                "text": "t",
                "media": ["pic.jpg"],
                "urls": ["http://x.example"],
                "mentions": ["@a"],
                "in_reply_to": "5",
                "retweet": True,
                "sequence": {"part": 1, "of": 3},
            }
        )
        (t,) = parse_dump([line])
        assert t.has_media
        assert t.urls == ("http://x.example",)
        assert t.mentions == ("@a",)
        assert t.in_reply_to == "5"
        assert t.is_retweet
        assert t.sequence_marker == (1, 3)

    def test_non_string_id_rejected(self):
        with pytest.raises(MalformedLine):
            parse_dump(['{"id":7,"text":"a"}'])

    def test_order_preserved(self):
        lines = [json.dumps({"id": str(i), "text": "x"}) for i in range(20)]
        assert [t.id for t in parse_dump(lines)] == [str(i) for i in range(20)]


def _cleanse_text(text: str, **kw) -> str:
    out = cleanse(RawTweet(id="t", text=text, **kw))
    assert isinstance(out, CleansedText), out
    return out.text


class TestCleanse:
    def test_mention_removal(self):
        got = _cleanse_text(
            "in amreeki kutton ko afghanistan se nikal jana chahiye @realDonaldTrump"
        )
        assert got == "in amreeki kutton ko afghanistan se nikal jana chahiye"

    def test_special_character_removal(self):
        got = _cleanse_text("khabardar jo tum ne mery samney bakwas ki!!!!!!")
        assert got == "khabardar jo tum ne mery samney bakwas ki"

    def test_url_only_tweet_dropped(self):
        out = cleanse(RawTweet(id="t", text="http://x.example"))
        assert out == Dropped("t", "UrlOnly")

    def test_media_tweet_dropped(self):
        out = cleanse(RawTweet(id="t", text="dekho yeh", has_media=True))
        assert out == Dropped("t", "Imagery")

    def test_url_stripped_text_kept(self):
        got = _cleanse_text("yeh parho http://x.example abhi")
        assert got == "yeh parho abhi"

    def test_bare_www_url_stripped(self):
        got = _cleanse_text("yeh parho www.example.com abhi")
        assert got == "yeh parho abhi"

    def test_ascii_emoticons_stripped(self):
        assert _cleanse_text("in hindu zalimon ko goli maar do :@ :@ :@") == (
            "in hindu zalimon ko goli maar do"
        )
        assert _cleanse_text("bura laga :-(") == "bura laga"
        assert _cleanse_text("khatam karo :((((") == "khatam karo"
        assert _cleanse_text("rona aya :’(") == "rona aya"

    def test_unicode_emoji_stripped(self):
        assert _cleanse_text("wah \U0001F600 kya baat") == "wah kya baat"
        assert _cleanse_text("jeet ❤️ gaye") == "jeet gaye"

    def test_hashtag_marker_stripped_word_kept(self):
        assert _cleanse_text("saza do #JamiaProtests") == "saza do JamiaProtests"

    def test_apostrophes_survive(self):
        assert _cleanse_text("don't aisa karo") == "don't aisa karo"

    def test_empty_after_cleansing_dropped(self):
        out = cleanse(RawTweet(id="t", text="!!! ???"))
        assert out == Dropped("t", "Empty")

    def test_removals_record_fired_categories(self):
        out = cleanse(RawTweet(id="t", text="salam @dost :-( dekho http://a.example !"))
        assert isinstance(out, CleansedText)
        assert out.removals == frozenset({"Url", "Mention", "Emoji", "SpecialChar"})
        plain = cleanse(RawTweet(id="t", text="salam dost"))
        assert plain.removals == frozenset()

    def test_whitespace_collapsed_and_trimmed(self):
        assert _cleanse_text("  salam   dost \n aao  ") == "salam dost aao"


printable = st.text(
    alphabet=st.characters(min_codepoint=1, max_codepoint=0x2FFF),
    max_size=80,
)


class TestCleanseProperties:
    @given(text=printable)
    @settings(max_examples=300, deadline=None)
    def test_idempotent(self, text):
        first = cleanse(RawTweet(id="t", text=text))
        if isinstance(first, Dropped):
            return
        second = cleanse(RawTweet(id="t", text=first.text))
        assert isinstance(second, CleansedText)
        assert second.text == first.text

    @given(text=printable)
    @settings(max_examples=300, deadline=None)
    def test_alphabet_closure(self, text):
        cfg = CleansingConfig()
        out = cleanse(RawTweet(id="t", text=text), cfg)
        if isinstance(out, Dropped):
            return
        for ch in out.text:
            assert cfg.is_allowed(ch)
            assert not cfg.is_emoji(ch)

    @given(text=printable)
    @settings(max_examples=300, deadline=None)
    def test_no_invention(self, text):
        out = cleanse(RawTweet(id="t", text=text))
        if isinstance(out, Dropped):
            return
        # removals only substitute spaces, so every output word is a
        # contiguous substring of the input
        for word in out.text.split():
            assert word in text

    @given(text=printable)
    @settings(max_examples=200, deadline=None)
    def test_total_on_parsed_input(self, text):
        out = cleanse(RawTweet(id="t", text=text))
        assert isinstance(out, (CleansedText, Dropped))


LEX = NormalizationLexicon(
    variants={"mai": "main"},
    stopwords=frozenset({"hai", "ko", "se"}),
    lemmas={},
    pos={},
    protected=frozenset({"CPEC"}),
)


def _ct(i, text):
    return CleansedText(id=i, text=text)


class TestFilterCandidates:
    def test_retweet_excluded(self):
        raw = [RawTweet(id="1", text="x", is_retweet=True)]
        assert filter_candidates([_ct("1", "mai hai")], raw, LEX) == []

    def test_reply_excluded(self):
        raw = [RawTweet(id="1", text="x", in_reply_to="0")]
        assert filter_candidates([_ct("1", "mai hai")], raw, LEX) == []

    def test_sequence_member_excluded(self):
        raw = [RawTweet(id="1", text="x", sequence_marker=(1, 2))]
        assert filter_candidates([_ct("1", "mai hai")], raw, LEX) == []

    def test_lexicon_fraction_thresholds(self):
        raw = [RawTweet(id="1", text="x"), RawTweet(id="2", text="y")]
        none_known = _ct("1", "alpha beta gamma delta epsilon")
        all_known = _ct("2", "mai hai ko se main")
        kept = filter_candidates([none_known, all_known], raw, LEX, threshold=0.4)
        assert kept == [all_known]

    def test_order_preserved_subsequence(self):
        raw = [RawTweet(id=str(i), text="x") for i in range(4)]
        ts = [
            _ct("0", "mai hai"),
            _ct("1", "zzz yyy"),
            _ct("2", "ko se"),
            _ct("3", "main hai"),
        ]
        kept = filter_candidates(ts, raw, LEX)
        assert [c.id for c in kept] == ["0", "2", "3"]

    def test_audit_reasons(self):
        raw = [
            RawTweet(id="1", text="x", is_retweet=True),
            RawTweet(id="2", text="y"),
        ]
        ts = [_ct("1", "mai hai"), _ct("2", "qqq www")]
        kept, dropped = filter_candidates_audit(ts, raw, LEX)
        assert kept == []
        assert {d.id: d.reason for d in dropped} == {"1": "Retweet", "2": "Language"}

    def test_bad_threshold_rejected(self):
        with pytest.raises(ValueError):
            filter_candidates([], [], LEX, threshold=0.0)

    def test_missing_raw_counterpart_rejected(self):
        with pytest.raises(ValueError):
            filter_candidates([_ct("1", "mai")], [], LEX)


class TestPipelineAndTsv:
    def test_run_pipeline_routes_everything(self):
        raw = [
            RawTweet(id="1", text="mai hai @dost"),
            RawTweet(id="2", text="http://only.example"),
            RawTweet(id="3", text="unrelated words here"),
        ]
        result = run_pipeline(raw, lex=LEX)
        assert [c.id for c in result.kept] == ["1"]
        reasons = {d.id: d.reason for d in result.dropped}
        assert reasons == {"2": "UrlOnly", "3": "Language"}

    def test_tsv_rendering(self):
        raw = [
            RawTweet(id="1", text="mai hai @dost"),
            RawTweet(id="2", text="http://only.example"),
        ]
        result = run_pipeline(raw, lex=LEX)
        text = render_tsv(result.ordered(raw))
        assert text == "1\tmai hai\t-\n2\t\tUrlOnly\n"

    def test_tsv_empty(self):
        assert render_tsv([]) == ""
