"""User interest models built from chats and questionnaires."""

from collections import Counter
from dataclasses import dataclass

from chatrank.corpus import DOMAINS, tokenize
from chatrank.errors import DataError

SCOPES = ("general",) + DOMAINS
SCOPE_CONFIGS = ("All", "Gen", "Dom", "DomGen")
SOURCES = ("chats", "questionnaire")


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str


@dataclass(frozen=True)
class ChatSession:
    session_id: str
    participants: tuple
    scope: str
    utterances: tuple

    @classmethod
    def from_record(cls, record):
        try:
            participants = tuple(str(p) for p in record["participants"])
            utterances = tuple(Utterance(str(u["speaker"]), str(u["text"])) for u in record["utterances"])
            session = cls(str(record["session_id"]), participants, record["scope"], utterances)
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed chat record: {exc}") from exc
        if len(participants) != 2:
            raise DataError(f"session {session.session_id}: expected two participants")
        if session.scope not in SCOPES:
            raise DataError(f"session {session.session_id}: unknown scope {session.scope!r}")
        for u in utterances:
            if u.speaker not in participants:
                raise DataError(f"session {session.session_id}: speaker {u.speaker!r} is not a participant")
        return session


@dataclass(frozen=True)
class Answer:
    question: str
    answer: str


@dataclass(frozen=True)
class Questionnaire:
    user: str
    scope: str
    answers: tuple

    @property
    def record_id(self):
        return f"{self.user}/{self.scope}"

    @classmethod
    def from_record(cls, record):
        try:
            answers = tuple(Answer(str(a["question"]), str(a["answer"])) for a in record["answers"])
            q = cls(str(record["user"]), record["scope"], answers)
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed questionnaire record: {exc}") from exc
        if q.scope not in SCOPES:
            raise DataError(f"questionnaire {q.record_id}: unknown scope {q.scope!r}")
        return q


def load_questionnaires(records):
    out = []
    seen = set()
    for record in records:
        q = Questionnaire.from_record(record)
        if (q.user, q.scope) in seen:
            raise DataError(f"duplicate questionnaire for user {q.user!r}, scope {q.scope!r}")
        seen.add((q.user, q.scope))
        out.append(q)
    return out


@dataclass(frozen=True)
class UserModel:
    """Multinomial over terms. ``record_ids`` lists the inputs that fed it."""

    user: str
    source: str
    scope_config: str
    domain: str
    term_counts: dict
    term_probs: dict
    record_ids: tuple = ()

    @classmethod
    def from_counts(cls, user, source, scope_config, domain, counts, record_ids=()):
        counts = {t: c for t, c in sorted(counts.items()) if c > 0}
        total = sum(counts.values())
        if total <= 0:
            raise DataError("empty user model")
        probs = {t: c / total for t, c in counts.items()}
        return cls(user, source, scope_config, domain, counts, probs, tuple(record_ids))


def selected_scopes(scope_config, domain=None):
    if scope_config not in SCOPE_CONFIGS:
        raise ValueError(f"unknown scope config {scope_config!r}")
    if scope_config in ("Dom", "DomGen"):
        if domain not in DOMAINS:
            raise ValueError(f"scope config {scope_config} needs a domain, got {domain!r}")
    if scope_config == "All":
        return set(SCOPES)
    if scope_config == "Gen":
        return {"general"}
    if scope_config == "Dom":
        return {domain}
    return {"general", domain}


def user_texts(user, source, scopes, chats=(), questionnaires=(), include_prompts=False, include_partner=False):
    """Yield ``(record_id, text)`` for every input of ``user`` inside ``scopes``."""
    if source == "chats":
        for session in chats:
            if user not in session.participants or session.scope not in scopes:
                continue
            for u in session.utterances:
                if include_partner or u.speaker == user:
                    yield session.session_id, u.text
    elif source == "questionnaire":
        for q in questionnaires:
            if q.user != user or q.scope not in scopes:
                continue
            for a in q.answers:
                if include_prompts:
                    yield q.record_id, a.question
                yield q.record_id, a.answer
    else:
        raise ValueError(f"unknown source {source!r}")


def build_user_model(user, source, scope_config, domain=None, chats=(), questionnaires=(),
                     stopwords=None, include_prompts=False, include_partner=False):
    """Count the user's tokens over the inputs selected by ``scope_config``.

    Chats contribute only the user's own utterances unless ``include_partner``;
    questionnaires contribute answers only unless ``include_prompts``.
    """
    scopes = selected_scopes(scope_config, domain)
    counts = Counter()
    record_ids = []
    for record_id, text in user_texts(user, source, scopes, chats, questionnaires,
                                      include_prompts, include_partner):
        if record_id not in record_ids:
            record_ids.append(record_id)
        counts.update(tokenize(text, stopwords))
    if not counts:
        raise DataError(f"empty user model for user {user!r} ({source}, {scope_config}, {domain})")
    return UserModel.from_counts(user, source, scope_config,
                                 domain if scope_config in ("Dom", "DomGen") else None,
                                 counts, record_ids)


def top_terms(counts, k):
    """The ``k`` highest-count terms, ties broken lexicographically.

    ``counts`` may be a mapping or a ``UserModel``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if isinstance(counts, UserModel):
        counts = counts.term_counts
    return [t for t, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k]]


def write_model(model):
    """Serialize as a header line plus ``term<TAB>count`` lines."""
    head = (f"# user={model.user} source={model.source} scope={model.scope_config} "
            f"domain={model.domain or '-'} records={','.join(model.record_ids) or '-'}")
    lines = [head] + [f"{t}\t{c!r}" for t, c in model.term_counts.items()]
    return "\n".join(lines) + "\n"


def read_model(text):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise DataError("user model file must start with a '#' header")
    meta = dict(part.split("=", 1) for part in lines[0][1:].split())
    counts = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        term, value = line.split("\t")
        counts[term] = float(value) if "." in value or "e" in value else int(value)
    domain = meta.get("domain")
    records = meta.get("records", "-")
    return UserModel.from_counts(meta.get("user", ""), meta.get("source", "chats"), meta.get("scope", "All"),
                                 None if domain in (None, "-") else domain, counts,
                                 () if records == "-" else records.split(","))
