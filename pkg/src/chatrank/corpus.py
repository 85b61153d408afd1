"""Documents, tokenization and collection statistics."""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path

from chatrank.errors import DataError

log = logging.getLogger(__name__)

DOMAINS = ("books", "travel", "food")
DOCUMENT_FIELDS = ("id", "domain", "entity_key", "title", "body", "url")

# letters and digits only; underscore is part of \w and must be excluded
_TOKEN_RE = re.compile(r"[^\W_]+")


def load_stopwords(path=None):
    """Read a stopword file (one term per line). ``None`` loads the bundled list."""
    if path is None:
        text = resources.files("chatrank").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=1)
def default_stopwords():
    return load_stopwords()


def tokenize(text, stopwords=None):
    """Lowercase ``text`` and split it into letter/digit runs, dropping stopwords.

    >>> tokenize("Scandinavian suspense")
    ['scandinavian', 'suspense']
    """
    if stopwords is None:
        stopwords = default_stopwords()
    return [tok for tok in _TOKEN_RE.findall(text.lower()) if tok not in stopwords]


@dataclass(frozen=True)
class Document:
    id: str
    domain: str
    entity_key: str
    title: str
    body: str
    url: str

    @property
    def text(self):
        # title and body (description plus reviews) are concatenated unweighted
        return f"{self.title}\n{self.body}"


@dataclass(frozen=True)
class TokenizedDoc:
    doc_id: str
    tokens: tuple
    length: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "length", len(self.tokens))

    @cached_property
    def tf(self):
        return Counter(self.tokens)


@dataclass(frozen=True)
class CorpusStats:
    """Document and collection frequencies over a set of tokenized documents."""

    df: dict
    cf: dict
    doc_count: int
    total_tokens: int

    @classmethod
    def from_docs(cls, docs):
        df = Counter()
        cf = Counter()
        total = 0
        n = 0
        for doc in docs:
            n += 1
            total += doc.length
            cf.update(doc.tf)
            df.update(doc.tf.keys())
        return cls(dict(sorted(df.items())), dict(sorted(cf.items())), n, total)

    @classmethod
    def merge(cls, *pools):
        """Statistics of the union of disjoint document pools."""
        df = Counter()
        cf = Counter()
        for pool in pools:
            df.update(pool.df)
            cf.update(pool.cf)
        return cls(
            dict(sorted(df.items())),
            dict(sorted(cf.items())),
            sum(p.doc_count for p in pools),
            sum(p.total_tokens for p in pools),
        )

    @property
    def has_avg_doc_len(self):
        return self.doc_count > 0

    @property
    def avg_doc_len(self):
        """Exact mean document length; 0 for an empty pool (see ``has_avg_doc_len``)."""
        if self.doc_count == 0:
            return Fraction(0)
        return Fraction(self.total_tokens, self.doc_count)

    def to_dict(self):
        return {
            "doc_count": self.doc_count,
            "total_tokens": self.total_tokens,
            "df": self.df,
            "cf": self.cf,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(dict(data["df"]), dict(data["cf"]), int(data["doc_count"]), int(data["total_tokens"]))


@dataclass(frozen=True)
class BackgroundModel:
    probabilities: dict
    mass_default: float

    def prob(self, term):
        return self.probabilities.get(term, self.mass_default)


def _validate_record(record, lineno):
    missing = [f for f in DOCUMENT_FIELDS if f not in record]
    if missing:
        raise DataError(f"record {lineno}: missing field(s) {', '.join(missing)}")
    if record["domain"] not in DOMAINS:
        raise DataError(f"record {lineno}: unknown domain {record['domain']!r} (id {record['id']!r})")


def ingest_documents(records, stopwords=None):
    """Tokenize document records and collect statistics.

    Returns ``(documents, tokenized, stats)`` where ``documents`` and
    ``tokenized`` are lists in input order.
    """
    documents = []
    tokenized = []
    seen = set()
    for lineno, record in enumerate(records, start=1):
        _validate_record(record, lineno)
        doc = Document(**{f: str(record[f]) for f in DOCUMENT_FIELDS})
        if doc.id in seen:
            raise DataError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)
        tokens = tokenize(doc.text, stopwords)
        if not tokens:
            raise DataError(f"document {doc.id!r} has no tokens")
        documents.append(doc)
        tokenized.append(TokenizedDoc(doc.id, tokens))
    stats = CorpusStats.from_docs(tokenized)
    if stats.doc_count == 0:
        log.warning("no documents ingested; average document length undefined")
    return documents, tokenized, stats


def background_model(corpora, floor=None):
    """Collection language model over the union of ``corpora``.

    Unseen terms get ``floor``, by default 1 / (10 * total tokens).
    """
    cf = Counter()
    total = 0
    for stats in corpora:
        cf.update(stats.cf)
        total += stats.total_tokens
    if total == 0:
        raise DataError("background model needs at least one non-empty corpus")
    if floor is None:
        floor = 1.0 / (10 * total)
    if floor <= 0:
        raise ValueError("floor must be positive")
    probs = {term: count / total for term, count in sorted(cf.items()) if count > 0}
    return BackgroundModel(probs, floor)


def read_background_frequencies(path):
    """Read a ``term<TAB>count`` file into a single-pool ``CorpusStats``."""
    cf = Counter()
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected term<TAB>count")
            try:
                count = int(parts[1])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad count {parts[1]!r}") from exc
            if count < 0:
                raise DataError(f"{path}:{lineno}: negative count")
            cf[parts[0]] += count
    # df is unknown for external counts; only cf and total matter for smoothing
    return CorpusStats({}, dict(sorted(cf.items())), 0, sum(cf.values()))
