"""Command-line front end.

Exit status: 0 on success, 1 for usage or configuration errors, 2 for data
errors (missing or malformed input files).
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from chatrank.corpus import CorpusStats, DOMAINS, ingest_documents, load_stopwords
from chatrank.dataset import load_dataset
from chatrank.domain_vocab import read_weights, spy_weights, write_weights
from chatrank.embeddings import load_embeddings
from chatrank.entity_expansion import EntityAnnotation, EntityCatalog, VARIANTS, domain_vector, \
    expand_user_model, select_entities
from chatrank.errors import ConfigError, DataError
from chatrank.eval.experiment import EXPANSIONS, Experiment, expand_grid, make_config, parse_config_text
from chatrank.jsonl import read_jsonl, write_text_atomic
from chatrank.rankers.knrm import KnrmModel, knrm_train
from chatrank.synthetic import bundled_path
from chatrank.user_model import ChatSession, SCOPE_CONFIGS, build_user_model, load_questionnaires, \
    read_model, write_model

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _need(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    return path


def _stopwords(args):
    return load_stopwords(_need(args.stopwords)) if getattr(args, "stopwords", None) else None


def _emit(text, out):
    if out:
        write_text_atomic(out, text)
    else:
        sys.stdout.write(text)


def _config_values(args):
    values = {}
    if getattr(args, "config", None):
        values.update(parse_config_text(_need(args.config).read_text(encoding="utf-8")))
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(item, "overrides must look like key=value")
        key, value = item.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _dataset(args):
    return load_dataset(_need(args.data) if args.data else bundled_path(),
                        stopwords_path=_need(args.stopwords) if getattr(args, "stopwords", None) else None)


# -- commands ---------------------------------------------------------------

def cmd_ingest(args):
    documents, tokenized, stats = ingest_documents(read_jsonl(_need(args.docs)), _stopwords(args))
    by_domain = {d: [] for d in DOMAINS}
    for doc, tok in zip(documents, tokenized):
        by_domain[doc.domain].append(tok)
    payload = {"all": stats.to_dict(), "avg_doc_len": str(stats.avg_doc_len),
               "avg_doc_len_defined": stats.has_avg_doc_len,
               "domains": {d: CorpusStats.from_docs(ts).to_dict() for d, ts in by_domain.items()}}
    _emit(json.dumps(payload, sort_keys=True) + "\n", args.out)


def cmd_build_model(args):
    chats = [ChatSession.from_record(r) for r in read_jsonl(_need(args.chats))] if args.chats else []
    questionnaires = load_questionnaires(read_jsonl(_need(args.questionnaires))) if args.questionnaires else []
    model = build_user_model(args.user, args.source, args.scope, args.domain, chats, questionnaires,
                             _stopwords(args), args.include_prompts, args.include_partner)
    _emit(write_model(model), args.out)


def cmd_spy(args):
    documents, tokenized, all_stats = ingest_documents(read_jsonl(_need(args.docs)), _stopwords(args))
    dom = CorpusStats.from_docs(t for d, t in zip(documents, tokenized) if d.domain == args.domain)
    _emit(write_weights(spy_weights(dom, all_stats, args.domain)), args.out)


def cmd_domain_vector(args):
    store = load_embeddings(_need(args.vectors))
    dv = domain_vector(args.seed, store, args.m, args.domain)
    name = args.domain or args.seed
    _emit(f"1 {store.dimension}\n{name} " + " ".join(repr(float(x)) for x in dv.vector) + "\n", args.out)


def cmd_expand(args):
    model = read_model(_need(args.model).read_text(encoding="utf-8"))
    kind = "chat" if model.source == "chats" else "questionnaire"
    anns = [EntityAnnotation.from_record(r) for r in read_jsonl(_need(args.annotations))]
    anns = [a for a in anns if a.user == model.user and a.kind == kind
            and (not model.record_ids or a.record_id in model.record_ids)]
    catalog = EntityCatalog.from_records(read_jsonl(_need(args.catalog)))
    variant = args.variant.replace("-", "_")
    dv = store = None
    if variant in ("domain", "ne_dom"):
        if not (args.vectors and args.seed and args.tau is not None):
            raise ConfigError("variant", f"{args.variant} needs --vectors, --seed and --tau")
        store = load_embeddings(_need(args.vectors))
        dv = domain_vector(args.seed, store, args.m)
    selected = select_entities(anns, variant, dv, args.tau, store)
    spy = read_weights(_need(args.spy)) if args.spy else None
    _emit(write_model(expand_user_model(model, selected, catalog, spy, _stopwords(args))), args.out)


def cmd_rank(args):
    data = _dataset(args)
    cfg = make_config(_config_values(args))
    if args.query not in data.queries:
        raise DataError(f"unknown query {args.query!r}")
    if args.pool == "all":
        doc_ids = sorted(data.se_ranks.get(args.query, {}))
    else:
        doc_ids = sorted(data.judged(args.user, args.query, args.pool))
    if not doc_ids:
        raise DataError(f"empty pool for query {args.query!r}")
    if cfg.ranker in ("knrm", "knrm-all"):
        raise ConfigError("ranker", "use evaluate for the cross-validated neural rankers")
    ranking = Experiment(data).rank(cfg, args.user, args.query, doc_ids)
    _emit("".join(f"{r.rank}\t{r.doc_id}\t{r.score!r}\n" for r in ranking), args.out)


def cmd_train_knrm(args):
    data = _dataset(args)
    cfg = make_config({**_config_values(args), "ranker": "knrm-all"})
    exp = Experiment(data)
    items = exp.knrm_items(cfg.effective())
    pairs = [p for it in items for p in it.train_pairs()]
    model = knrm_train(KnrmModel.initial(cfg.seed), pairs, cfg.epochs, cfg.lr)
    text = json.dumps(model.to_dict(), indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)


def cmd_evaluate(args):
    data = _dataset(args)
    report = Experiment(data).run(make_config(_config_values(args)))
    if args.out:
        write_text_atomic(f"{args.out}.txt", report.to_text())
        write_text_atomic(f"{args.out}.jsonl", report.to_jsonl())
    else:
        sys.stdout.write(report.to_jsonl() if args.jsonl else report.to_text())


def _parse_vary(items):
    matrix = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(item, "--vary entries must look like key=v1,v2")
        key, values = item.split("=", 1)
        matrix[key.strip()] = [v.strip() for v in values.split(",") if v.strip()]
        if not matrix[key.strip()]:
            raise ConfigError(key, "no values given")
    return matrix


def cmd_grid(args):
    data = _dataset(args)
    base = _config_values(args)
    matrix = _parse_vary(args.vary)
    cells = expand_grid(base, matrix)
    configs = [make_config(values) for values in cells]  # validate every cell before running
    exp = Experiment(data)
    out_dir = Path(args.out_dir)
    summary = [f"{'cell':<6} {'label':<40} {'ndcg@20':>8} {'p@1':>6} {'p-value':>9}"]
    for i, cfg in enumerate(configs):
        report = exp.run(cfg)
        stem = out_dir / f"cell-{i:02d}"
        write_text_atomic(f"{stem}.txt", report.to_text())
        write_text_atomic(f"{stem}.jsonl", report.to_jsonl())
        p = report.significance.get("p")
        summary.append(f"{i:<6d} {report.label:<40} {report.means['ndcg20']:>8.4f} {report.means['p1']:>6.4f} "
                       f"{'-' if p is None else format(p, '.3g'):>9}")
    write_text_atomic(out_dir / "summary.txt", "\n".join(summary) + "\n")
    sys.stdout.write("\n".join(summary) + "\n")


def build_parser():
    parser = _Parser(prog="chatrank", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def experiment_flags(p):
        p.add_argument("--data", help="dataset directory (default: bundled synthetic fixture)")
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a configuration key")
        p.add_argument("--stopwords")

    p = sub.add_parser("ingest", help="tokenize documents and write collection statistics")
    p.add_argument("--docs", required=True)
    p.add_argument("--stopwords")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("build-model", help="build a user model")
    p.add_argument("--user", required=True)
    p.add_argument("--source", choices=["chats", "questionnaire"], required=True)
    p.add_argument("--scope", choices=SCOPE_CONFIGS, default="All")
    p.add_argument("--domain", choices=DOMAINS)
    p.add_argument("--chats")
    p.add_argument("--questionnaires")
    p.add_argument("--stopwords")
    p.add_argument("--include-prompts", action="store_true")
    p.add_argument("--include-partner", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_model)

    p = sub.add_parser("spy", help="domain-specificity weights of one domain")
    p.add_argument("--docs", required=True)
    p.add_argument("--domain", choices=DOMAINS, required=True)
    p.add_argument("--stopwords")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spy)

    p = sub.add_parser("domain-vector", help="centroid of a seed's embedding neighbourhood")
    p.add_argument("--vectors", required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--domain", choices=DOMAINS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_domain_vector)

    p = sub.add_parser("expand", help="expand a user model with entity descriptions")
    p.add_argument("--model", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--variant", choices=[v for v in EXPANSIONS if v != "none"] + list(VARIANTS), required=True)
    p.add_argument("--vectors")
    p.add_argument("--seed")
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--tau", type=float)
    p.add_argument("--spy", help="term<TAB>weight file applied to added terms")
    p.add_argument("--stopwords")
    p.add_argument("--out")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("rank", help="re-rank one query's pool for one user")
    experiment_flags(p)
    p.add_argument("--user", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--pool", choices=["all", "random20", "top10"], default="all")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("train-knrm", help="train the kernel ranker on all judged pairs")
    experiment_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_train_knrm)

    p = sub.add_parser("evaluate", help="evaluate one configuration")
    experiment_flags(p)
    p.add_argument("--jsonl", action="store_true", help="print the line-delimited report")
    p.add_argument("--out", help="write <out>.txt and <out>.jsonl")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("grid", help="evaluate the cross product of configuration values")
    experiment_flags(p)
    p.add_argument("--vary", action="append", metavar="KEY=V1,V2", help="a grid axis")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"chatrank: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"chatrank: missing input file: {exc.filename or exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"chatrank: data error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
