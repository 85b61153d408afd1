"""Experiment configurations, per-pair evaluation and reports."""

import itertools
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

from chatrank.corpus import DOMAINS, CorpusStats, TokenizedDoc, tokenize
from chatrank.domain_vocab import apply_spy, spy_weights
from chatrank.entity_expansion import domain_vector, expand_user_model, select_entities
from chatrank.errors import ConfigError, DataError
from chatrank.eval.crossval import KnrmItem, cross_validate_knrm
from chatrank.eval.metrics import mean, ndcg_at_k, precision_at_1
from chatrank.eval.significance import ALPHA, paired_t_test
from chatrank.rankers.base import QueryModel, ScoredDoc, rerank
from chatrank.rankers.bm25 import score_bm25
from chatrank.rankers.knrm import KnrmModel, doc_terms, knrm_features, query_terms
from chatrank.rankers.lm import score_lm, score_lm_embed
from chatrank.user_model import SCOPE_CONFIGS, UserModel, build_user_model, user_texts

RANKERS = ("lm", "lm-embed", "bm25", "knrm", "knrm-all", "se")
SOURCES = ("query-only", "questionnaire", "chats")
EXPANSIONS = ("none", "all", "domain", "ne-all", "ne-dom")
DEFAULT_SEEDS = {"books": "ENTITY/Book", "travel": "ENTITY/Travel", "food": "ENTITY/Food"}


@dataclass(frozen=True)
class ExperimentConfig:
    ranker: str = "lm"
    source: str = "query-only"
    scope: str = "All"
    spy: bool = False
    spy_mode: str = "weight"
    spy_tau: float = 1.0
    user_spy: bool = False
    expansion: str = "none"
    lam: float = 0.0
    mu: float = 0.0
    k1: float = 1.5
    b: float = 0.75
    tau_sim: float = 0.5
    tau: float = 0.4
    tau_books: float = math.nan
    tau_travel: float = math.nan
    tau_food: float = math.nan
    m: int = 50
    seed_books: str = DEFAULT_SEEDS["books"]
    seed_travel: str = DEFAULT_SEEDS["travel"]
    seed_food: str = DEFAULT_SEEDS["food"]
    include_prompts: bool = False
    include_partner: bool = False
    epochs: int = 20
    lr: float = 0.01
    folds: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.ranker not in RANKERS:
            raise ConfigError("ranker", f"must be one of {', '.join(RANKERS)}")
        if self.source not in SOURCES:
            raise ConfigError("source", f"must be one of {', '.join(SOURCES)}")
        if self.scope not in SCOPE_CONFIGS:
            raise ConfigError("scope", f"must be one of {', '.join(SCOPE_CONFIGS)}")
        if self.expansion not in EXPANSIONS:
            raise ConfigError("expansion", f"must be one of {', '.join(EXPANSIONS)}")
        if self.spy_mode not in ("weight", "prune"):
            raise ConfigError("spy_mode", "must be weight or prune")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError("lam", "must lie in [0, 1]")
        if self.mu < 0:
            raise ConfigError("mu", "must be positive (0 selects the average document length)")
        if self.m < 1:
            raise ConfigError("m", "must be >= 1")
        if self.folds < 2:
            raise ConfigError("folds", "must be >= 2")
        if self.source == "query-only" and self.expansion != "none":
            raise ConfigError("expansion", "query-only runs cannot expand a user model")
        if self.source == "query-only" and self.scope != "All":
            raise ConfigError("scope", "query-only runs take no scope")

    @property
    def personalized(self):
        return self.ranker != "se" and self.source != "query-only"

    def tau_for(self, domain):
        value = getattr(self, f"tau_{domain}")
        return self.tau if math.isnan(value) else value

    def seed_for(self, domain):
        return getattr(self, f"seed_{domain}")

    def effective(self):
        """Canonical form: fields a ranker ignores are reset to defaults."""
        cfg = self
        if cfg.ranker == "se":
            cfg = replace(cfg, source="query-only", scope="All", spy=False, expansion="none", user_spy=False)
        if cfg.source == "query-only":
            cfg = replace(cfg, scope="All", expansion="none")
        return cfg

    def baseline(self):
        return replace(self, source="query-only", scope="All", expansion="none", spy=False, user_spy=False)

    def label(self):
        cfg = self.effective()
        if not cfg.personalized:
            return f"{cfg.ranker}/query-only" + ("/spy" if cfg.spy else "")
        parts = [cfg.ranker, cfg.source, cfg.scope]
        if cfg.spy:
            parts.append("spy" if cfg.spy_mode == "weight" else f"spy-prune{cfg.spy_tau:g}")
        if cfg.expansion != "none":
            parts.append(f"exp-{cfg.expansion}")
        return "/".join(parts)

    def to_dict(self):
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(self).items()}


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(name, value):
    kind = _FIELD_TYPES[name]
    if not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "on", "yes"):
                return True
            if low in ("0", "false", "off", "no"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError as exc:
        raise ConfigError(name, f"cannot parse {text!r} as {kind.__name__}") from exc
    return text


def make_config(values):
    """Build a config from a ``name -> value`` mapping (string values are parsed).

    Dashes in names are accepted for underscores.
    """
    kwargs = {}
    for key, value in values.items():
        name = key.replace("-", "_")
        if name not in _FIELD_TYPES:
            raise ConfigError(key, "unknown configuration key")
        kwargs[name] = _coerce(name, value)
    return ExperimentConfig(**kwargs)


def parse_config_text(text):
    """``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


@dataclass
class MetricReport:
    label: str
    config: dict
    rows: list
    means: dict
    domain_means: dict
    significance: dict = field(default_factory=dict)

    def to_jsonl(self):
        lines = [json.dumps({"type": "config", "label": self.label, "config": self.config}, sort_keys=True)]
        for row in self.rows:
            lines.append(json.dumps({"type": "pair", **row}, sort_keys=True))
        lines.append(json.dumps({"type": "summary", "label": self.label, "means": self.means,
                                 "domain_means": self.domain_means, "significance": self.significance},
                                sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_text(self):
        head = f"{'user':<12} {'query':<12} {'domain':<8} {'ndcg@20':>8} {'p@1':>5} {'ndcg@top10':>10}"
        out = [f"# {self.label}", head]
        for r in self.rows:
            top = "-" if r["ndcg_top10"] is None else f"{r['ndcg_top10']:.4f}"
            out.append(f"{r['user']:<12} {r['query_id']:<12} {r['domain']:<8} {r['ndcg20']:>8.4f} "
                       f"{r['p1']:>5d} {top:>10}")
        out.append("")
        out.append(f"{'scope':<8} {'pairs':>5} {'ndcg@20':>8} {'p@1':>6} {'ndcg@top10':>10}")
        for name, m in [("overall", self.means)] + sorted(self.domain_means.items()):
            top = "-" if m["ndcg_top10"] is None else f"{m['ndcg_top10']:.4f}"
            out.append(f"{name:<8} {m['pairs']:>5d} {m['ndcg20']:>8.4f} {m['p1']:>6.4f} {top:>10}")
        if self.significance:
            s = self.significance
            mark = "*" if s["significant"] else ""
            out.append("")
            out.append(f"vs {s['baseline']}: t={s['t']:.4f} p={s['p']:.4g}{mark}")
        return "\n".join(out) + "\n"


def _summary(rows):
    tops = [r["ndcg_top10"] for r in rows if r["ndcg_top10"] is not None]
    return {
        "pairs": len(rows),
        "ndcg20": mean(r["ndcg20"] for r in rows),
        "p1": mean(r["p1"] for r in rows),
        "ndcg_top10": mean(tops) if tops else None,
    }


class Experiment:
    """Runs configurations against one loaded dataset, caching shared pieces."""

    def __init__(self, dataset):
        self.data = dataset
        self._spy = {}
        self._dv = {}
        self._reports = {}
        self._knrm_features = {}

    # -- building blocks -------------------------------------------------

    def spy_for(self, domain):
        if domain not in self._spy:
            self._spy[domain] = spy_weights(self.data.domain_stats[domain], self.data.all_stats, domain)
        return self._spy[domain]

    def user_spy_for(self, user):
        key = ("user", user)
        if key not in self._spy:
            tokens = [t for _, text in user_texts(user, "chats", set(["general", *DOMAINS]), self.data.chats)
                      for t in tokenize(text, self.data.stopwords)]
            if not tokens:
                raise DataError(f"user {user!r} has no chat text for user-specific weights")
            user_pool = CorpusStats.from_docs([TokenizedDoc(user, tokens)])
            universal = CorpusStats.merge(self.data.all_stats, user_pool)
            self._spy[key] = spy_weights(user_pool, universal, user)
        return self._spy[key]

    def domain_vector_for(self, cfg, domain):
        key = (cfg.seed_for(domain), cfg.m)
        if key not in self._dv:
            if self.data.entity_vectors is None:
                raise DataError("selective expansion needs entity_vectors.txt")
            self._dv[key] = domain_vector(key[0], self.data.entity_vectors, cfg.m, domain)
        return self._dv[key]

    def query_model(self, query_id):
        q = self.data.queries[query_id]
        return QueryModel.from_text(q.query_id, q.domain, q.text, self.data.stopwords)

    def user_model(self, cfg, user, domain):
        if not cfg.personalized:
            return None
        data = self.data
        u = build_user_model(user, cfg.source, cfg.scope, domain, data.chats, data.questionnaires,
                             data.stopwords, cfg.include_prompts, cfg.include_partner)
        if cfg.expansion != "none":
            kind = "chat" if cfg.source == "chats" else "questionnaire"
            records = set(u.record_ids)
            anns = [a for a in data.annotations if a.user == user and a.kind == kind and a.record_id in records]
            variant = cfg.expansion.replace("-", "_")
            dv = None
            if variant in ("domain", "ne_dom"):
                dv = self.domain_vector_for(cfg, domain)
            selected = select_entities(anns, variant, dv, cfg.tau_for(domain), data.entity_vectors)
            # domain-specific models weight description terms by domain specificity
            spy = self.spy_for(domain) if cfg.scope in ("Dom", "DomGen") else None
            u = expand_user_model(u, selected, data.catalog, spy, data.stopwords)
        if cfg.spy and cfg.spy_mode == "prune":
            kept = apply_spy(u.term_counts, self.weights_for(cfg, user, domain), "prune", cfg.spy_tau)
            if not kept:
                raise DataError(f"pruning at tau={cfg.spy_tau} empties the model of user {user!r}")
            u = UserModel.from_counts(u.user, u.source, u.scope_config, u.domain, kept, u.record_ids)
        return u

    def weights_for(self, cfg, user, domain):
        return self.user_spy_for(user) if cfg.user_spy else self.spy_for(domain)

    def scorer(self, cfg, q, u, user, domain):
        """A ``TokenizedDoc -> float`` function for the non-neural rankers."""
        data = self.data
        spy = self.weights_for(cfg, user, domain) if cfg.spy and cfg.spy_mode == "weight" else None
        mu = cfg.mu if cfg.mu > 0 else float(data.all_stats.avg_doc_len)
        lam = cfg.lam if u is not None else 1.0
        if cfg.ranker == "lm":
            return lambda d: score_lm(q, u, d, lam, mu, data.background, spy)
        if cfg.ranker == "lm-embed":
            if data.word_vectors is None:
                raise DataError("lm-embed needs word_vectors.txt")
            return lambda d: score_lm_embed(q, u, d, lam, mu, data.background, data.word_vectors, spy, cfg.tau_sim)
        if cfg.ranker == "bm25":
            q_terms = list(q.term_counts)
            return lambda d: score_bm25(q_terms, u, d, data.all_stats, cfg.k1, cfg.b, spy)
        raise ConfigError("ranker", f"{cfg.ranker} has no direct scorer")

    def rank(self, cfg, user, query_id, doc_ids):
        """Rank ``doc_ids`` for one user and query (not for the neural rankers)."""
        cfg = cfg.effective()
        doc_ids = sorted(doc_ids)
        if cfg.ranker == "se":
            ranks = self.data.se_ranks.get(query_id, {})
            missing = [d for d in doc_ids if d not in ranks]
            if missing:
                raise DataError(f"no search-engine rank for {missing[0]!r} in query {query_id}")
            order = sorted(doc_ids, key=lambda d: (ranks[d], d))
            return [ScoredDoc(d, -float(ranks[d]), i) for i, d in enumerate(order, start=1)]
        domain = self.data.queries[query_id].domain
        q = self.query_model(query_id)
        u = self.user_model(cfg, user, domain)
        score = self.scorer(cfg, q, u, user, domain)
        tokenized = self.data.tokenized
        return rerank(doc_ids, lambda d: score(tokenized[d]))

    # -- evaluation ------------------------------------------------------

    def _pair_rows(self, cfg):
        rows = []
        for user, qid in self.data.pairs():
            judged = self.data.judged(user, qid, "random20")
            ranking = self.rank(cfg, user, qid, judged)
            top = self.data.judged(user, qid, "top10")
            ndcg_top = ndcg_at_k(self.rank(cfg, user, qid, top), top, 10) if top else None
            rows.append(self._row(user, qid, ndcg_at_k(ranking, judged, 20), precision_at_1(ranking, judged),
                                  ndcg_top))
        return rows

    def _row(self, user, qid, ndcg20, p1, ndcg_top):
        return {"user": user, "query_id": qid, "domain": self.data.queries[qid].domain,
                "ndcg20": ndcg20, "p1": int(p1), "ndcg_top10": ndcg_top}

    def knrm_items(self, cfg):
        """Kernel features for every judged doc of every (user, query) pair."""
        data = self.data
        store = data.word_vectors
        if store is None:
            raise DataError("knrm needs word_vectors.txt")
        proto = KnrmModel()
        items = []
        for user, qid in data.pairs():
            domain = data.queries[qid].domain
            q = self.query_model(qid)
            u = self.user_model(cfg, user, domain)
            spy = self.weights_for(cfg, user, domain) if cfg.spy and cfg.spy_mode == "weight" else None
            q_terms = query_terms(q, u, proto.max_query_terms, spy)
            pools = {tag: data.judged(user, qid, tag) for tag in ("random20", "top10")}
            pools = {tag: judged for tag, judged in pools.items() if judged}
            features = {}
            for judged in pools.values():
                for doc_id in judged:
                    if doc_id not in features:
                        d_terms = doc_terms(data.tokenized[doc_id], proto.max_doc_terms)
                        features[doc_id] = knrm_features(proto, q_terms, d_terms, store)
            items.append(KnrmItem((user, qid), domain, pools, features))
        return items

    def _knrm_rows(self, cfg):
        items = self.knrm_items(cfg)
        init = KnrmModel.initial(cfg.seed)
        if cfg.ranker == "knrm-all":
            groups = [items]
        else:
            groups = [[it for it in items if it.domain == dom] for dom in DOMAINS]
            groups = [g for g in groups if g]
        metrics = {}
        for group in groups:
            result = cross_validate_knrm(group, init, cfg.folds, cfg.seed, cfg.epochs, cfg.lr)
            metrics.update(result.pair_metrics)
        rows = []
        for user, qid in self.data.pairs():
            m = metrics[(user, qid)]
            rows.append(self._row(user, qid, m["ndcg20"], m["p1"], m.get("ndcg_top10")))
        return rows

    def run(self, cfg):
        """Evaluate ``cfg``; personalized configs are tested against their query-only baseline."""
        cfg = cfg.effective()
        key = cfg
        if key in self._reports:
            return self._reports[key]
        if not self.data.pairs():
            raise DataError("no random20 judgments to evaluate")
        rows = self._knrm_rows(cfg) if cfg.ranker in ("knrm", "knrm-all") else self._pair_rows(cfg)
        by_domain = {}
        for r in rows:
            by_domain.setdefault(r["domain"], []).append(r)
        report = MetricReport(cfg.label(), cfg.to_dict(), rows, _summary(rows),
                              {dom: _summary(rs) for dom, rs in sorted(by_domain.items())})
        if cfg.personalized:
            base = self.run(cfg.baseline())
            a = [r["ndcg20"] for r in rows]
            b = [r["ndcg20"] for r in base.rows]
            if len(a) >= 2:
                res = paired_t_test(a, b)
                report.significance = {"baseline": base.label, "t": res.t, "p": res.p,
                                       "degenerate": res.degenerate,
                                       "significant": bool(res.significant(ALPHA) and res.t > 0)}
        self._reports[key] = report
        return report


def run_experiment(config, dataset):
    """Evaluate one configuration on ``dataset`` and return its ``MetricReport``."""
    if isinstance(config, dict):
        config = make_config(config)
    return Experiment(dataset).run(config)


def expand_grid(base, matrix):
    """Cross product of ``matrix`` (``name -> list of values``) applied over ``base`` values.

    Cells come out in lexicographic order of the matrix keys' value lists.
    """
    names = list(matrix)
    cells = []
    for combo in itertools.product(*(matrix[n] for n in names)):
        values = dict(base)
        values.update(zip(names, combo))
        cells.append(values)
    return cells


def run_grid(base, matrix, dataset):
    exp = Experiment(dataset)
    reports = []
    for values in expand_grid(base, matrix):
        reports.append(exp.run(make_config(values)))
    return reports
