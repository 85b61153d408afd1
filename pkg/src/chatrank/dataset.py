"""Loading an experiment data directory.

Expected layout (``*`` marks optional files)::

    documents.jsonl      {id, domain, entity_key, title, body, url}
    queries.jsonl        {query_id, domain, text}
    pools.jsonl          {query_id, doc_id, se_rank}
    judgments.jsonl      {user, query_id, doc_id, grade, pool_tag}
    chats.jsonl          {session_id, participants, scope, utterances}
    questionnaires.jsonl {user, scope, answers}
    annotations.jsonl*   {user, kind, record_id, surface, entity_id, is_named_entity}
    catalog.jsonl*       {entity_id, description, is_named_entity}
    word_vectors.txt*    text vector format (terms)
    entity_vectors.txt*  text vector format (terms and entity ids)
    stopwords.txt*       one term per line
    background.tsv*      term<TAB>count
"""

from dataclasses import dataclass, field
from pathlib import Path

from chatrank.corpus import DOMAINS, CorpusStats, background_model, ingest_documents, load_stopwords, \
    read_background_frequencies
from chatrank.embeddings import load_embeddings
from chatrank.entity_expansion import EntityAnnotation, EntityCatalog
from chatrank.errors import DataError
from chatrank.eval.metrics import Judgment
from chatrank.jsonl import read_jsonl
from chatrank.user_model import ChatSession, load_questionnaires


@dataclass(frozen=True)
class Query:
    query_id: str
    domain: str
    text: str


@dataclass
class Dataset:
    documents: dict
    tokenized: dict
    domain_stats: dict
    all_stats: CorpusStats
    background: object
    queries: dict
    se_ranks: dict
    judgments: list
    chats: list = field(default_factory=list)
    questionnaires: list = field(default_factory=list)
    annotations: list = field(default_factory=list)
    catalog: dict = field(default_factory=dict)
    word_vectors: object = None
    entity_vectors: object = None
    stopwords: frozenset = None

    def pairs(self):
        """Sorted ``(user, query_id)`` pairs that have random20 judgments."""
        return sorted({(j.user, j.query_id) for j in self.judgments if j.pool_tag == "random20"})

    def judged(self, user, query_id, pool_tag):
        """``doc_id -> grade`` for one user, query and pool."""
        if "_judged" not in self.__dict__:
            index = {}
            for j in self.judgments:
                index.setdefault((j.user, j.query_id, j.pool_tag), {})[j.doc_id] = j.grade
            self.__dict__["_judged"] = index
        return dict(self.__dict__["_judged"].get((user, query_id, pool_tag), {}))


def _required(root, name):
    path = root / name
    if not path.exists():
        raise FileNotFoundError(str(path))
    return path


def load_dataset(root, stopwords_path=None, background_path=None):
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(str(root))
    if stopwords_path is None and (root / "stopwords.txt").exists():
        stopwords_path = root / "stopwords.txt"
    stopwords = load_stopwords(stopwords_path)

    documents, tokenized, all_stats = ingest_documents(read_jsonl(_required(root, "documents.jsonl")), stopwords)
    documents = {d.id: d for d in documents}
    tokenized = {t.doc_id: t for t in tokenized}
    domain_stats = {
        dom: CorpusStats.from_docs(t for t in tokenized.values() if documents[t.doc_id].domain == dom)
        for dom in DOMAINS
    }
    if background_path is None and (root / "background.tsv").exists():
        background_path = root / "background.tsv"
    if background_path is not None:
        background = background_model([read_background_frequencies(background_path)])
    else:
        background = background_model(list(domain_stats.values()))

    queries = {}
    for r in read_jsonl(_required(root, "queries.jsonl")):
        q = Query(str(r["query_id"]), r["domain"], str(r["text"]))
        if q.domain not in DOMAINS:
            raise DataError(f"query {q.query_id}: unknown domain {q.domain!r}")
        queries[q.query_id] = q

    se_ranks = {}
    for r in read_jsonl(_required(root, "pools.jsonl")):
        qid, did = str(r["query_id"]), str(r["doc_id"])
        if did not in documents:
            raise DataError(f"pool entry for query {qid} names unknown document {did!r}")
        se_ranks.setdefault(qid, {})[did] = int(r["se_rank"])

    judgments = [Judgment.from_record(r) for r in read_jsonl(_required(root, "judgments.jsonl"))]
    for j in judgments:
        if j.query_id not in queries:
            raise DataError(f"judgment names unknown query {j.query_id!r}")
        if j.doc_id not in documents:
            raise DataError(f"judgment names unknown document {j.doc_id!r}")

    chats = [ChatSession.from_record(r) for r in read_jsonl(root / "chats.jsonl")] \
        if (root / "chats.jsonl").exists() else []
    questionnaires = load_questionnaires(read_jsonl(root / "questionnaires.jsonl")) \
        if (root / "questionnaires.jsonl").exists() else []
    annotations = [EntityAnnotation.from_record(r) for r in read_jsonl(root / "annotations.jsonl")] \
        if (root / "annotations.jsonl").exists() else []
    catalog = EntityCatalog.from_records(read_jsonl(root / "catalog.jsonl")) \
        if (root / "catalog.jsonl").exists() else EntityCatalog()
    word_vectors = load_embeddings(root / "word_vectors.txt") if (root / "word_vectors.txt").exists() else None
    entity_vectors = load_embeddings(root / "entity_vectors.txt") \
        if (root / "entity_vectors.txt").exists() else None

    return Dataset(documents, tokenized, domain_stats, all_stats, background, queries, se_ranks, judgments,
                   chats, questionnaires, annotations, catalog, word_vectors, entity_vectors, stopwords)
