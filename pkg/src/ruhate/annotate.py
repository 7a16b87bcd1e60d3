"""Guideline rule catalog and the staged decision procedure.

An annotator works through up to three stages: Neutral/Hostile at the
top, then Simple/Complex structure, then the fine Hateful/Offensive call
using the rule block that matches the structure.  decide() turns the
ordered list of invoked rule ids into a label path, applying the
superior-class rule: if any hateful-stage rule fired alongside offensive
ones, the fine label is Hateful.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import LabelPath, rule_block

STAGES = ("TopLevel", "Structure", "SimpleFine", "ComplexFine")
_STAGE_ORDER = {"TopLevel": 0, "Structure": 1, "SimpleFine": 2, "ComplexFine": 2}


class StageOrderError(ValueError):
    """A rule from an earlier stage appeared after a later stage."""


class InapplicableRule(ValueError):
    """A rule that cannot apply given the answers so far."""


class IncompleteAnswers(ValueError):
    """A mandatory stage has no rule."""


class UnknownRule(KeyError):
    pass


class OutOfOrder(ValueError):
    pass


class UnknownComment(KeyError):
    pass


@dataclass(frozen=True)
class GuidelineRule:
    id: str
    stage: str
    verdict: str
    prompt: str
    example: str
    mto_based: bool = False

    def __post_init__(self) -> None:
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        expected_block = {"TopLevel": ("N", "H"), "Structure": ("S", "C"),
                          "SimpleFine": ("SH", "SO"), "ComplexFine": ("CH", "CO")}[self.stage]
        if rule_block(self.id) not in expected_block:
            raise ValueError(f"rule {self.id} inconsistent with stage {self.stage}")
        allowed = {
            "TopLevel": ("Neutral", "Hostile"),
            "Structure": ("Simple", "Complex"),
            "SimpleFine": ("Hateful", "Offensive"),
            "ComplexFine": ("Hateful", "Offensive"),
        }[self.stage]
        if self.verdict not in allowed:
            raise ValueError(f"verdict {self.verdict!r} invalid for stage {self.stage}")


_CATALOG: tuple[GuidelineRule, ...] = (
    GuidelineRule(
        "N1", "TopLevel", "Neutral",
        "An expression that does not ignite anger or leave a pleasant feeling "
        "for an unbiased reader.",
        "Aap ke daant sitaron ki tarah hain (Your teeth are like the stars).",
    ),
    GuidelineRule(
        "N2", "TopLevel", "Neutral",
        "That shares information, knowledge, or a fact, about a subject.",
        "Ethiopia k log ghareeb hain (Ethiopian people are poor).",
    ),
    GuidelineRule(
        "N3", "TopLevel", "Neutral",
        "A quotation from a religious scripture, Prophets, Saints, or Gurus.",
        "Dunya mein aman qaim karo (Make the world peaceful).",
    ),
    GuidelineRule(
        "H1", "TopLevel", "Hostile",
        "A hostile expression that promotes hostility, ignites anger, or "
        "incites harm to an individual or a small group.",
        "Tum eik ehsan faramosh kutia ho (You are an ungrateful bitch).",
    ),
    GuidelineRule(
        "H2", "TopLevel", "Hostile",
        "A hostile sentence or information that portrays negativity or hatred "
        "about a community.",
        "Afghani dehshat gard hotay hain. (Afghans are terrorists).",
    ),
    GuidelineRule(
        "H3", "TopLevel", "Hostile",
        "A misquote from religious scripture having hostile or disrespectful "
        "content.",
        "Islam ghair muslim logon ke sath imteyazi sulooq ka hukum deta hai "
        "(Islam commands to discriminate with non-Muslim people).",
    ),
    GuidelineRule(
        "S1", "Structure", "Simple",
        "A sentence having a single clause. Where clause is a sentence portion "
        "containing both subject and verb.",
        "Us k baad us kutia ne shower lia (That bitch took shower after that).",
    ),
    GuidelineRule(
        "S2", "Structure", "Simple",
        "A direct speech expression.",
        "Mein usey apni kutia bulata hun (I call him my bitch).",
    ),
    GuidelineRule(
        "S3", "Structure", "Simple",
        "Does not contain any kind of Sarcasm. Where sarcasm is a taunt in "
        "which the author implicitly says something and everyone knows they "
        "mean the opposite.",
        "Mein usy apni kutia bulata hun (I call him my bitch).",
    ),
    GuidelineRule(
        "C1", "Structure", "Complex",
        "A sentence having more than one clauses.",
        "Wo kutia tung krti hai aur usey mernay ki zaroorat hai (That bitch is "
        "annoying and she needs to die).",
    ),
    GuidelineRule(
        "C2", "Structure", "Complex",
        "A sentence with indirect speech, quotation or reference (including "
        "retweets and posts sharing).",
        "Usne kaha k mji us kutia se nafrat hai jo behas krti hai (He said "
        "that he hates a bitch that likes to argue).",
    ),
    GuidelineRule(
        "C3", "Structure", "Complex",
        "Contains sarcasm, ridicule or mockery.",
        "Tumhara chehra gadhey se milta hai (Your face resembles a donkey face).",
    ),
    GuidelineRule(
        "SH1", "SimpleFine", "Hateful",
        "That shows a clear desire to ignite harm, or to encourage hatred, by "
        "targeting individuals by indirectly referring to a group on the basis "
        "of their characteristics.",
        "Jo b Mumtaz Qadri k khilaf bhonkay usey qatal ker do (Kill anyone who "
        "barks against Mumtaz Qadri).",
    ),
    GuidelineRule(
        "SH2", "SimpleFine", "Hateful",
        "It is a speech that sweepingly victimizes disadvantaged social groups "
        "in a way that is possibly unsafe and harmful to them.",
        "In andhon ko dhakky mar k bahir nikalo (Push these blinds out).",
    ),
    GuidelineRule(
        "SH3", "SimpleFine", "Hateful",
        "That shows a clear desire to be hurtful, to ignite harm, or to "
        "encourage hatred and attacks a group on the basis of attributes such "
        "as religion, race, sex, national origin, ethnic origin, disability, "
        "sexual orientation, gender originality, or politics and sometimes "
        "provokes them to take revenge.",
        "Yeh musalman panah guzeen chor hain (These muslim refugees are thieves).",
    ),
    GuidelineRule(
        "SO1", "SimpleFine", "Offensive",
        "It doesn't incite or inflict any direct harm to any individual person "
        "by indirectly referring to a group and doesn't target specifically on "
        "the basis of their characteristics.",
        "qanoon ka samna karo jahil patwariyo (Face the law ignorant patwaris).",
    ),
    GuidelineRule(
        "SO2", "SimpleFine", "Offensive",
        "It is a speech that degrades a community and results in someone "
        "getting angry, hurt, upset, insulting or rude without being harmful "
        "in actual.",
        "Afghani namak harami krtay hain (Afghans are thankless by nature).",
    ),
    GuidelineRule(
        "SO3", "SimpleFine", "Offensive",
        "It is a speech that often conveys the purpose of insulting groups, "
        "and can include disrespectful, hurtful and abusive language.",
        "Tamam sarkari hukmaran chor hain (All government officials are thieves).",
    ),
    GuidelineRule(
        "CH1", "ComplexFine", "Hateful",
        "Explicit or implicit clue in the text suggesting that the speaker or "
        "author is in a state of aggression, hostile, antipathetic etc.",
        "Maar do, Taliban ko bhi aur unke hamiyon ko b (Kill Talibans and "
        "their supporters as well).",
    ),
    GuidelineRule(
        "CH2", "ComplexFine", "Hateful",
        "Explicit or implicit clue in the text suggesting that the speaker’s "
        "attitude or judgment of the MTO is hateful i.e. speaker is "
        "frustrated, agitated, or very critical of the main entity.",
        "yahoodiyon ko qatal kerna sawab ka kaam hai!! (It is an act of virtue "
        "to kill jews!!)",
        mto_based=True,
    ),
    GuidelineRule(
        "CH3", "ComplexFine", "Hateful",
        "The MTO is considered predominantly hateful.",
        "Usama Bin Laden ne 9/11 attacks ki zimmadari qabool ki (Usama Bin "
        "Laden accepted the responsibility of 9/11 attacks).",
        mto_based=True,
    ),
    GuidelineRule(
        "CO1", "ComplexFine", "Offensive",
        "Explicit or implicit clue in the text suggesting that the speaker or "
        "author is in a state of anger, violent, irritated etc.",
        "aahh! Sb siyasatdan jhooty aur na-ahal hain (aahh! All the "
        "politicians are liars and incompetent).",
    ),
    GuidelineRule(
        "CO2", "ComplexFine", "Offensive",
        "Explicit or implicit clue in the text suggesting that the speaker’s "
        "attitude or judgment of the MTO is offensive i.e. speaker is angry, "
        "disappointed, pessimistic, expressing sarcasm about, or mocking the "
        "main entity.",
        "Musharraf k masoom logon ko qatal krny per awam mein ghussa hai "
        "(People are angry on Musharraf for killing innocent people).",
        mto_based=True,
    ),
    GuidelineRule(
        "CO3", "ComplexFine", "Offensive",
        "The MTO is considered predominantly offensive.",
        "Jung k faislay ne lakhon logon ko be ghar kar diya (The war decision "
        "made many people homeless).",
        mto_based=True,
    ),
)

_BY_ID: Mapping[str, GuidelineRule] = {r.id: r for r in _CATALOG}


def rule_catalog() -> tuple[GuidelineRule, ...]:
    return _CATALOG


def lookup(rule_id: str) -> GuidelineRule:
    try:
        return _BY_ID[rule_id]
    except KeyError:
        raise UnknownRule(rule_id) from None


# --------------------------------------------------------------------------
# the decision procedure
# --------------------------------------------------------------------------

def decide(answers: Sequence[str]) -> LabelPath:
    """Turn the ordered rule ids an annotator invoked into a LabelPath.

    Pure in the answers; the comment text plays no part.  Stage order must
    be non-decreasing, the first rule must be top-level, and every later
    rule must be applicable given the verdicts already reached.
    """
    if not answers:
        raise IncompleteAnswers("no answers given")
    rules = [lookup(a) for a in answers]
    if rules[0].stage != "TopLevel":
        raise StageOrderError(f"first rule must be top-level, got {rules[0].id}")
    last_order = 0
    for prev, cur in zip(rules, rules[1:]):
        order = _STAGE_ORDER[cur.stage]
        if order < last_order:
            raise StageOrderError(
                f"{cur.id} ({cur.stage}) after a {prev.stage} rule"
            )
        last_order = max(last_order, order)

    top_rules = [r for r in rules if r.stage == "TopLevel"]
    structure_rules = [r for r in rules if r.stage == "Structure"]
    fine_rules = [r for r in rules if r.stage in ("SimpleFine", "ComplexFine")]

    top_verdicts = {r.verdict for r in top_rules}
    if top_verdicts == {"Neutral", "Hostile"}:
        raise InapplicableRule("top-level rules mix Neutral and Hostile verdicts")
    top = top_verdicts.pop()

    if top == "Neutral":
        if structure_rules or fine_rules:
            raise InapplicableRule(
                "structure and fine rules do not apply to a Neutral comment"
            )
        return LabelPath(top="Neutral", rules=tuple(answers))

    if not structure_rules:
        raise IncompleteAnswers("Hostile comments need a Structure verdict")
    structure_verdicts = {r.verdict for r in structure_rules}
    if len(structure_verdicts) > 1:
        raise InapplicableRule("structure rules mix Simple and Complex verdicts")
    structure = structure_verdicts.pop()

    wanted_stage = "SimpleFine" if structure == "Simple" else "ComplexFine"
    misplaced = [r.id for r in fine_rules if r.stage != wanted_stage]
    if misplaced:
        raise InapplicableRule(
            f"{misplaced} do not apply to a {structure} comment"
        )
    if not fine_rules:
        raise IncompleteAnswers("Hostile comments need at least one fine-stage rule")
    # superior class: a single hateful-stage rule makes the comment Hateful
    fine = "Hateful" if any(r.verdict == "Hateful" for r in fine_rules) else "Offensive"
    return LabelPath(top=top, structure=structure, fine=fine, rules=tuple(answers))


# --------------------------------------------------------------------------
# annotation sessions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SubmitEvent:
    comment_id: str
    path: LabelPath
    amended: bool


@dataclass
class AnnotationSession:
    session_id: str
    annotator: str
    queue: tuple[str, ...]
    cursor: int = 0
    decisions: dict[str, LabelPath] = field(default_factory=dict)
    audit: list[SubmitEvent] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(set(self.queue)) != len(self.queue):
            raise ValueError("queue contains duplicate comment ids")
        if not 0 <= self.cursor <= len(self.queue):
            raise ValueError("cursor out of range")

    @property
    def finished(self) -> bool:
        return self.cursor >= len(self.queue)

    def next_comment(self) -> str | None:
        return None if self.finished else self.queue[self.cursor]


def submit(session: AnnotationSession, comment_id: str, path: LabelPath) -> AnnotationSession:
    """Record a decision for the cursor's current comment and advance.

    Resubmitting an already-decided comment overwrites the decision and
    leaves both events in the audit trail; the cursor does not move again.
    """
    if comment_id not in session.queue:
        raise UnknownComment(comment_id)
    if comment_id in session.decisions:
        decisions = dict(session.decisions)
        decisions[comment_id] = path
        out = AnnotationSession(
            session_id=session.session_id,
            annotator=session.annotator,
            queue=session.queue,
            cursor=session.cursor,
            decisions=decisions,
            audit=session.audit + [SubmitEvent(comment_id, path, amended=True)],
        )
        return out
    if session.next_comment() != comment_id:
        raise OutOfOrder(
            f"expected {session.next_comment()!r}, got {comment_id!r}"
        )
    decisions = dict(session.decisions)
    decisions[comment_id] = path
    return AnnotationSession(
        session_id=session.session_id,
        annotator=session.annotator,
        queue=session.queue,
        cursor=session.cursor + 1,
        decisions=decisions,
        audit=session.audit + [SubmitEvent(comment_id, path, amended=False)],
    )


# --------------------------------------------------------------------------
# event-log persistence
# --------------------------------------------------------------------------

def _path_to_obj(path: LabelPath) -> dict:
    return {
        "top": path.top,
        "structure": path.structure,
        "fine": path.fine,
        "rules": list(path.rules),
    }


def _path_from_obj(obj: dict) -> LabelPath:
    return LabelPath(
        top=obj["top"],
        structure=obj.get("structure"),
        fine=obj.get("fine"),
        rules=tuple(obj.get("rules", ())),
    )


def session_events(session: AnnotationSession) -> list[dict]:
    """The full history as JSON-serializable event objects."""
    events: list[dict] = [
        {
            "event": "open",
            "session_id": session.session_id,
            "annotator": session.annotator,
            "queue": list(session.queue),
        }
    ]
    for ev in session.audit:
        events.append(
            {
                "event": "submit",
                "session_id": session.session_id,
                "annotator": session.annotator,
                "comment_id": ev.comment_id,
                "path": _path_to_obj(ev.path),
                "amended": ev.amended,
            }
        )
    return events


def save_events(session: AnnotationSession, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in session_events(session):
            fh.write(json.dumps(event, sort_keys=True) + "\n")


def replay_events(events: Iterable[dict]) -> AnnotationSession:
    """Rebuild a session by replaying its event log through submit()."""
    session: AnnotationSession | None = None
    for event in events:
        kind = event.get("event")
        if kind == "open":
            if session is not None:
                raise ValueError("duplicate open event")
            session = AnnotationSession(
                session_id=event["session_id"],
                annotator=event["annotator"],
                queue=tuple(event["queue"]),
            )
        elif kind == "submit":
            if session is None:
                raise ValueError("submit before open")
            session = submit(session, event["comment_id"], _path_from_obj(event["path"]))
        else:
            raise ValueError(f"unknown event kind {kind!r}")
    if session is None:
        raise ValueError("empty event log")
    return session


def load_events(path) -> AnnotationSession:
    with open(path, encoding="utf-8") as fh:
        events = [json.loads(line) for line in fh if line.strip()]
    return replay_events(events)


# --------------------------------------------------------------------------
# validation sampling
# --------------------------------------------------------------------------

def sample_for_validation(ids: Sequence[str], seed: int, fraction: float = 0.10) -> list[str]:
    """Seeded uniform sample (without replacement) in original order."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1]")
    k = round(len(ids) * fraction)
    rng = random.Random(seed)
    chosen = sorted(rng.sample(range(len(ids)), k))
    return [ids[i] for i in chosen]
