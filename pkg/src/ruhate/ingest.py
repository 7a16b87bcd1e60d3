"""Tweet-dump parsing, text cleansing, and candidate filtering.

The cleansing passes run in a fixed order: imagery drop, URL strip,
mention strip, emoji and emoticon strip, special-character strip,
whitespace collapse, trim.  Every removal substitutes a space, so the
surviving words are exactly words of the input and token boundaries
never merge.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

CLEANSING_CATEGORIES = ("Imagery", "Url", "Mention", "Emoji", "SpecialChar")

DROP_REASONS = ("Imagery", "UrlOnly", "Empty", "Reply", "Retweet", "Sequence", "Language")


class MalformedLine(ValueError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        msg = f"line {line_no}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


@dataclass(frozen=True)
class RawTweet:
    id: str
    text: str
    has_media: bool = False
    urls: tuple[str, ...] = ()
    mentions: tuple[str, ...] = ()
    in_reply_to: str | None = None
    is_retweet: bool = False
    sequence_marker: tuple[int, int] | None = None


@dataclass(frozen=True)
class CleansedText:
    id: str
    text: str
    removals: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        unknown = set(self.removals) - set(CLEANSING_CATEGORIES)
        if unknown:
            raise ValueError(f"unknown removal categories {sorted(unknown)}")


@dataclass(frozen=True)
class Dropped:
    id: str
    reason: str

    def __post_init__(self) -> None:
        if self.reason not in DROP_REASONS:
            raise ValueError(f"unknown drop reason {self.reason!r}")


# --------------------------------------------------------------------------
# dump parsing
# --------------------------------------------------------------------------

def parse_dump(stream: Iterable[str | bytes]) -> list[RawTweet]:
    """Parse line-delimited JSON into tweets, preserving input order.

    Empty lines are skipped.  Bad JSON, a missing or non-string id/text,
    undecodable bytes, or a repeated id abort with the 1-based line number.
    """
    tweets: list[RawTweet] = []
    seen: set[str] = set()
    for line_no, raw_line in enumerate(stream, start=1):
        if isinstance(raw_line, bytes):
            try:
                line = raw_line.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise MalformedLine(line_no, f"invalid UTF-8: {exc}") from exc
        else:
            line = raw_line
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"bad JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise MalformedLine(line_no, "expected a JSON object")
        tid = obj.get("id")
        text = obj.get("text")
        if not isinstance(tid, str) or not tid:
            raise MalformedLine(line_no, "missing or non-string id")
        if not isinstance(text, str):
            raise MalformedLine(line_no, "missing or non-string text")
        if tid in seen:
            raise MalformedLine(line_no, f"duplicate id {tid!r}")
        seen.add(tid)
        seq = obj.get("sequence")
        marker = None
        if seq is not None:
            try:
                marker = (int(seq["part"]), int(seq["of"]))
            except (TypeError, KeyError, ValueError) as exc:
                raise MalformedLine(line_no, "sequence needs integer part/of") from exc
        tweets.append(
            RawTweet(
                id=tid,
                text=text,
                has_media=bool(obj.get("media")),
                urls=tuple(str(u) for u in obj.get("urls", ())),
                mentions=tuple(str(m) for m in obj.get("mentions", ())),
                in_reply_to=obj.get("in_reply_to"),
                is_retweet=bool(obj.get("retweet", False)),
                sequence_marker=marker,
            )
        )
    return tweets


# --------------------------------------------------------------------------
# cleansing
# --------------------------------------------------------------------------

# scheme-prefixed links plus bare www. tokens
_URL_RE = re.compile(r"(?:https?://\S+|\bwww\.\S+)")
_MENTION_RE = re.compile(r"@\w+")
# eyes, optional nose (including the curly apostrophe), one or more mouths;
# Table 3.3 strips ":-(", ":@", ":((((", and ":'(" written with U+2019
_EMOTICON_RE = re.compile(r"[:;=8]['’\-o^]?[()\[\]{}dDpP@\\/|*3]+")

# covers pictographs, transport, supplemental symbols, flags, dingbats,
# misc symbols, and variation selectors
DEFAULT_EMOJI_RANGES: tuple[tuple[int, int], ...] = (
    (0x1F300, 0x1F6FF),
    (0x1F700, 0x1F77F),
    (0x1F900, 0x1FAFF),
    (0x1F1E6, 0x1F1FF),
    (0x2600, 0x27BF),
    (0x2B00, 0x2BFF),
    (0xFE00, 0xFE0F),
    (0x200D, 0x200D),
)


@dataclass(frozen=True)
class CleansingConfig:
    drop_media: bool = True
    emoji_ranges: tuple[tuple[int, int], ...] = DEFAULT_EMOJI_RANGES
    extra_allowed: str = "'’"

    def is_allowed(self, ch: str) -> bool:
        return ch.isalnum() or ch.isspace() or ch in self.extra_allowed

    def is_emoji(self, ch: str) -> bool:
        cp = ord(ch)
        return any(lo <= cp <= hi for lo, hi in self.emoji_ranges)


def _sub_with_flag(pattern: re.Pattern, text: str) -> tuple[str, bool]:
    new, count = pattern.subn(" ", text)
    return new, count > 0


def cleanse(t: RawTweet, cfg: CleansingConfig | None = None) -> CleansedText | Dropped:
    """Apply the five removal passes; total on parsed input."""
    cfg = cfg or CleansingConfig()
    if cfg.drop_media and t.has_media:
        return Dropped(t.id, "Imagery")
    removals: set[str] = set()

    text, hit = _sub_with_flag(_URL_RE, t.text)
    if hit:
        removals.add("Url")
        if not text.strip():
            return Dropped(t.id, "UrlOnly")

    text, hit = _sub_with_flag(_MENTION_RE, text)
    if hit:
        removals.add("Mention")

    text, hit = _sub_with_flag(_EMOTICON_RE, text)
    chars = []
    emoji_hit = hit
    for ch in text:
        if cfg.is_emoji(ch):
            chars.append(" ")
            emoji_hit = True
        else:
            chars.append(ch)
    text = "".join(chars)
    if emoji_hit:
        removals.add("Emoji")

    chars = []
    special_hit = False
    for ch in text:
        if cfg.is_allowed(ch):
            chars.append(ch)
        else:
            chars.append(" ")
            special_hit = True
    text = "".join(chars)
    if special_hit:
        removals.add("SpecialChar")

    text = re.sub(r"\s+", " ", text).strip()
    if not text:
        return Dropped(t.id, "Empty")
    return CleansedText(id=t.id, text=text, removals=frozenset(removals))


# --------------------------------------------------------------------------
# candidate filtering
# --------------------------------------------------------------------------

def _lexicon_vocabulary(lex) -> set[str]:
    """Union of every token the lexicon knows, lowercased."""
    vocab: set[str] = set()
    vocab.update(lex.variants.keys())
    vocab.update(lex.variants.values())
    vocab.update(lex.stopwords)
    vocab.update(lex.lemmas.keys())
    vocab.update(lex.lemmas.values())
    vocab.update(tok.lower() for tok in lex.protected)
    return {v.lower() for v in vocab}


def filter_candidates_audit(
    ts: Sequence[CleansedText],
    raw: Sequence[RawTweet],
    lex,
    threshold: float = 0.4,
) -> tuple[list[CleansedText], list[Dropped]]:
    """Like filter_candidates but also reports why each text was excluded."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    by_id = {r.id: r for r in raw}
    known = _lexicon_vocabulary(lex)
    kept: list[CleansedText] = []
    dropped: list[Dropped] = []
    for ct in ts:
        r = by_id.get(ct.id)
        if r is None:
            raise ValueError(f"cleansed text {ct.id!r} has no raw counterpart")
        if r.in_reply_to is not None:
            dropped.append(Dropped(ct.id, "Reply"))
            continue
        if r.is_retweet:
            dropped.append(Dropped(ct.id, "Retweet"))
            continue
        if r.sequence_marker is not None:
            dropped.append(Dropped(ct.id, "Sequence"))
            continue
        tokens = ct.text.split()
        hits = sum(1 for tok in tokens if tok.lower() in known)
        fraction = hits / len(tokens) if tokens else 0.0
        if fraction < threshold:
            dropped.append(Dropped(ct.id, "Language"))
            continue
        kept.append(ct)
    return kept, dropped


def filter_candidates(
    ts: Sequence[CleansedText],
    raw: Sequence[RawTweet],
    lex,
    threshold: float = 0.4,
) -> list[CleansedText]:
    kept, _ = filter_candidates_audit(ts, raw, lex, threshold)
    return kept


# --------------------------------------------------------------------------
# TSV interface
# --------------------------------------------------------------------------

def render_tsv(
    results: Iterable[CleansedText | Dropped],
) -> str:
    """One row per tweet: id, surviving text (empty when dropped), reason or -."""
    lines = []
    for r in results:
        if isinstance(r, Dropped):
            lines.append(f"{r.id}\t\t{r.reason}")
        else:
            lines.append(f"{r.id}\t{r.text}\t-")
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class PipelineResult:
    kept: list[CleansedText] = field(default_factory=list)
    dropped: list[Dropped] = field(default_factory=list)

    def ordered(self, raw: Sequence[RawTweet]) -> list[CleansedText | Dropped]:
        by_id: dict[str, CleansedText | Dropped] = {}
        for item in self.kept:
            by_id[item.id] = item
        for item in self.dropped:
            by_id[item.id] = item
        return [by_id[t.id] for t in raw]


def run_pipeline(
    raw: Sequence[RawTweet],
    lex=None,
    cfg: CleansingConfig | None = None,
    threshold: float = 0.4,
) -> PipelineResult:
    """Cleanse every tweet, then (when a lexicon is given) filter candidates."""
    cleansed: list[CleansedText] = []
    result = PipelineResult()
    for t in raw:
        out = cleanse(t, cfg)
        if isinstance(out, Dropped):
            result.dropped.append(out)
        else:
            cleansed.append(out)
    if lex is None:
        result.kept = cleansed
        return result
    kept, dropped = filter_candidates_audit(cleansed, raw, lex, threshold)
    result.kept = kept
    result.dropped.extend(dropped)
    return result
