"""Deterministic synthetic dataset in the experiment directory layout.

Users prefer one topic per domain; documents are built around topics; chats,
questionnaires, entity mentions and graded judgments follow from those
preferences, so personalization has signal to pick up. Vectors cluster by
domain and topic.
"""

import json
from importlib import resources
from pathlib import Path

import numpy as np

TOPICS = {
    "books": {
        "mystery": ["suspense", "detective", "crime", "thriller", "murder", "scandinavian", "noir", "clues"],
        "fantasy": ["dragons", "magic", "wizard", "quest", "kingdom", "sword", "elves", "prophecy"],
        "romance": ["romance", "love", "heart", "wedding", "passion", "regency", "letters", "courtship"],
        "history": ["empire", "war", "biography", "ancient", "revolution", "medieval", "dynasty", "archive"],
    },
    "travel": {
        "beach": ["beach", "island", "surf", "sunshine", "coast", "lagoon", "snorkeling", "palm"],
        "culture": ["temples", "museum", "culture", "heritage", "cathedral", "ruins", "festival", "art"],
        "wine": ["wine", "vineyard", "tasting", "cellar", "harvest", "chateau", "grapes", "sommelier"],
        "hiking": ["mountains", "hiking", "trail", "alpine", "camping", "summit", "glacier", "backpacking"],
    },
    "food": {
        "vegetarian": ["vegetarian", "tofu", "lentils", "spinach", "vegan", "chickpeas", "quinoa", "kale"],
        "breakfast": ["breakfast", "pancakes", "eggs", "bacon", "waffles", "omelette", "granola", "toast"],
        "spicy": ["spicy", "curry", "chili", "pepper", "jalapeno", "salsa", "masala", "sriracha"],
        "dessert": ["chocolate", "cake", "dessert", "cookies", "caramel", "pastry", "vanilla", "brownies"],
    },
}
COMMON = ["great", "good", "price", "bargain", "nice", "place", "people", "time", "really", "like",
          "best", "make", "review", "recommend", "favorite", "enjoy", "easy", "classic", "new", "world"]
GENERAL_TOPICS = {
    "music": ["guitar", "concerts", "jazz", "piano", "band"],
    "sports": ["football", "running", "tennis", "gym", "cycling"],
    "games": ["chess", "videogames", "puzzles", "boardgames", "strategy"],
}
ENTITIES = {
    # topic -> [(entity id, surface, is named entity)]
    "mystery": [("ENTITY/Agatha_Christie", "Agatha Christie", True), ("ENTITY/Jo_Nesbo", "Jo Nesbo", True),
                ("ENTITY/Crime_fiction", "crime fiction", False)],
    "fantasy": [("ENTITY/Tolkien", "Tolkien", True), ("ENTITY/Earthsea", "Earthsea", True),
                ("ENTITY/High_fantasy", "high fantasy", False)],
    "romance": [("ENTITY/Jane_Austen", "Jane Austen", True), ("ENTITY/Bronte", "Bronte", True),
                ("ENTITY/Romance_novel", "romance novels", False)],
    "history": [("ENTITY/Gibbon", "Gibbon", True), ("ENTITY/Herodotus", "Herodotus", True),
                ("ENTITY/Military_history", "military history", False)],
    "beach": [("ENTITY/Bali", "Bali", True), ("ENTITY/Maldives", "Maldives", True),
              ("ENTITY/Surfing", "surfing", False)],
    "culture": [("ENTITY/Borobudur", "Borobudur", True), ("ENTITY/Delphi", "Delphi", True),
                ("ENTITY/Buddhist_art", "Buddhist art", False)],
    "wine": [("ENTITY/Bordeaux", "Bordeaux", True), ("ENTITY/Tuscany", "Tuscany", True),
             ("ENTITY/Winemaking", "winemaking", False)],
    "hiking": [("ENTITY/Patagonia", "Patagonia", True), ("ENTITY/Dolomites", "Dolomites", True),
               ("ENTITY/Trekking", "trekking", False)],
    "vegetarian": [("ENTITY/Ottolenghi", "Ottolenghi", True), ("ENTITY/Falafel", "falafel", False),
                   ("ENTITY/Veganism", "veganism", False)],
    "breakfast": [("ENTITY/Eggs_Benedict", "Eggs Benedict", True), ("ENTITY/Brunch", "brunch", False),
                  ("ENTITY/Porridge", "porridge", False)],
    "spicy": [("ENTITY/Sichuan", "Sichuan", True), ("ENTITY/Vindaloo", "vindaloo", False),
              ("ENTITY/Hot_sauce", "hot sauce", False)],
    "dessert": [("ENTITY/Sacher_torte", "Sacher torte", True), ("ENTITY/Tiramisu", "tiramisu", False),
                ("ENTITY/Patisserie", "patisserie", False)],
    "music": [("ENTITY/Miles_Davis", "Miles Davis", True), ("ENTITY/Jazz", "jazz", False)],
    "sports": [("ENTITY/Wimbledon", "Wimbledon", True), ("ENTITY/Marathon", "marathon", False)],
    "games": [("ENTITY/Magnus_Carlsen", "Magnus Carlsen", True), ("ENTITY/Chess", "chess", False)],
}
DOMAIN_SEEDS = {"books": "ENTITY/Book", "travel": "ENTITY/Travel", "food": "ENTITY/Food"}
QUESTIONS = {
    "general": ["What are your hobbies?", "What makes you happy?", "Your golden rule?"],
    "books": ["Which books do you love?", "Favourite genres?"],
    "travel": ["Where would you like to travel?", "What do you do on a trip?"],
    "food": ["What do you like to cook?", "Favourite dishes?"],
}
N_USERS = 8
DOCS_PER_DOMAIN = 24
QUERIES_PER_DOMAIN = 4
QUERIES_JUDGED = 3
DIM = 16


def bundled_path():
    """Directory of the synthetic dataset shipped with the package."""
    return Path(str(resources.files("chatrank").joinpath("data/synthetic")))


def _words(rng, pool, n):
    return [pool[i] for i in rng.integers(0, len(pool), n)]


def _sentence(rng, words):
    return " ".join(words).capitalize() + "."


def _documents(rng):
    docs = []
    doc_topics = {}
    for domain, topics in TOPICS.items():
        names = sorted(topics)
        for i in range(DOCS_PER_DOMAIN):
            topic = names[i % len(names)]
            other = names[(i // len(names) + 1 + names.index(topic)) % len(names)]
            body = _words(rng, topics[topic], 14) + _words(rng, topics[other], 4) + _words(rng, COMMON, 10)
            rng.shuffle(body)
            doc_id = f"{domain[0]}{i:02d}"
            title = f"{topic} {domain} entity {i}"
            docs.append({"id": doc_id, "domain": domain, "entity_key": f"{domain}:{topic}:{i}",
                         "title": title, "body": _sentence(rng, body), "url": f"https://example.org/{doc_id}"})
            doc_topics[doc_id] = (topic, other)
    return docs, doc_topics


def _queries(rng):
    queries = []
    query_topics = {}
    for domain, topics in TOPICS.items():
        names = sorted(topics)
        for i in range(QUERIES_PER_DOMAIN):
            topic = names[i]
            words = list(rng.choice(topics[topic], 2, replace=False)) + [COMMON[int(rng.integers(len(COMMON)))]]
            qid = f"{domain}-q{i}"
            queries.append({"query_id": qid, "domain": domain, "text": " ".join(words)})
            query_topics[qid] = topic
    return queries, query_topics


def _users(rng):
    users = {}
    for k in range(N_USERS):
        prefs = {domain: sorted(topics)[int(rng.integers(len(topics)))] for domain, topics in TOPICS.items()}
        prefs["general"] = sorted(GENERAL_TOPICS)[k % len(GENERAL_TOPICS)]
        users[f"u{k}"] = prefs
    return users


def _topic_words(scope, topic):
    return GENERAL_TOPICS[topic] if scope == "general" else TOPICS[scope][topic]


def _utterance(rng, scope, topic, mention=None):
    words = _words(rng, _topic_words(scope, topic), 3) + _words(rng, COMMON, 3)
    rng.shuffle(words)
    text = "I " + " ".join(words)
    if mention is not None:
        text += f", especially {mention}"
    return text + "."


def _chats_and_annotations(rng, users):
    chats = []
    annotations = []
    names = sorted(users)
    sid = 0
    for scope in ("general", "books", "travel", "food"):
        order = list(rng.permutation(len(names)))
        for a, b in zip(order[0::2], order[1::2]):
            pair = [names[a], names[b]]
            for _ in range(2 if scope == "general" else 3):
                session_id = f"s{sid:03d}"
                sid += 1
                utterances = []
                for turn in range(6):
                    speaker = pair[turn % 2]
                    topic = users[speaker][scope]
                    mention = None
                    if turn >= 4:
                        eid, surface, is_ne = ENTITIES[topic][int(rng.integers(len(ENTITIES[topic])))]
                        mention = surface
                        annotations.append({"user": speaker, "kind": "chat", "record_id": session_id,
                                            "surface": surface, "entity_id": eid, "is_named_entity": is_ne})
                    utterances.append({"speaker": speaker, "text": _utterance(rng, scope, topic, mention)})
                chats.append({"session_id": session_id, "participants": pair, "scope": scope,
                              "utterances": utterances})
    return chats, annotations


def _questionnaires(rng, users):
    out = []
    annotations = []
    for user in sorted(users):
        for scope in ("general", "books", "travel", "food"):
            topic = users[user][scope]
            eid, surface, is_ne = ENTITIES[topic][0]
            answers = []
            for i, question in enumerate(QUESTIONS[scope]):
                words = _words(rng, _topic_words(scope, topic), 3)
                text = " ".join(words) + (f" and {surface}" if i == 0 else "")
                answers.append({"question": question, "answer": text})
            annotations.append({"user": user, "kind": "questionnaire", "record_id": f"{user}/{scope}",
                                "surface": surface, "entity_id": eid, "is_named_entity": is_ne})
            out.append({"user": user, "scope": scope, "answers": answers})
    return out, annotations


def _catalog(rng):
    out = []
    for topic, entities in sorted(ENTITIES.items()):
        scope = next((d for d, t in TOPICS.items() if topic in t), "general")
        for eid, surface, is_ne in entities:
            words = _words(rng, _topic_words(scope, topic), 8) + _words(rng, COMMON, 4)
            out.append({"entity_id": eid, "description": f"{surface} is " + " ".join(words) + ".",
                        "is_named_entity": is_ne})
    return out


def _vectors(rng):
    """Word vectors (terms only) and entity vectors (terms plus entity ids)."""
    domain_c = {d: rng.normal(0, 1, DIM) for d in list(TOPICS) + ["general"]}
    topic_c = {}
    for d, topics in TOPICS.items():
        for t in topics:
            topic_c[t] = domain_c[d] + 0.8 * rng.normal(0, 1, DIM)
    for t in GENERAL_TOPICS:
        topic_c[t] = domain_c["general"] + 0.8 * rng.normal(0, 1, DIM)
    words = {}
    for d, topics in TOPICS.items():
        for t, ws in sorted(topics.items()):
            for w in ws:
                words.setdefault(w, topic_c[t] + 0.4 * rng.normal(0, 1, DIM))
    for t, ws in sorted(GENERAL_TOPICS.items()):
        for w in ws:
            words.setdefault(w, topic_c[t] + 0.4 * rng.normal(0, 1, DIM))
    for w in COMMON:
        words[w] = rng.normal(0, 1, DIM)
    entities = dict(words)
    for d, seed in DOMAIN_SEEDS.items():
        entities[seed] = domain_c[d] + 0.2 * rng.normal(0, 1, DIM)
    for topic, ents in sorted(ENTITIES.items()):
        for eid, _, _ in ents:
            entities[eid] = topic_c[topic] + 0.5 * rng.normal(0, 1, DIM)
    return words, entities


def _judgments(rng, users, queries, query_topics, doc_topics, pools):
    out = []
    for user in sorted(users):
        prefs = users[user]
        for domain in TOPICS:
            qids = sorted(q["query_id"] for q in queries if q["domain"] == domain)
            chosen = sorted(rng.choice(qids, QUERIES_JUDGED, replace=False))
            for qid in chosen:
                ranked = sorted(pools[qid], key=lambda d: pools[qid][d])
                sample = sorted(rng.choice(ranked, 20, replace=False))
                for tag, docs in (("random20", sample), ("top10", ranked[:10])):
                    for doc_id in docs:
                        topic, other = doc_topics[doc_id]
                        score = 2.0 * (topic == prefs[domain]) + 0.8 * (other == prefs[domain]) \
                            + 0.7 * (topic == query_topics[qid]) + rng.normal(0, 0.45)
                        grade = 2 if score >= 1.6 else 1 if score >= 0.7 else 0
                        out.append({"user": user, "query_id": qid, "doc_id": doc_id, "grade": grade,
                                    "pool_tag": tag})
    return out


def _pools(rng, queries, query_topics, doc_topics):
    pools = {}
    for q in queries:
        docs = sorted(d for d in doc_topics if d[0] == q["domain"][0])
        noise = rng.normal(0, 1.0, len(docs))
        keyed = [(-(1.0 * (doc_topics[d][0] == query_topics[q["query_id"]])) + noise[i], d)
                 for i, d in enumerate(docs)]
        pools[q["query_id"]] = {d: r for r, (_, d) in enumerate(sorted(keyed), start=1)}
    return pools


def _write_jsonl(path, records):
    path.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in records), encoding="utf-8")


def _write_vectors(path, vectors):
    lines = [f"{len(vectors)} {DIM}"]
    lines += [k + " " + " ".join(f"{x:.6f}" for x in v) for k, v in vectors.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def generate(out_dir, seed=7):
    """Write the synthetic dataset into ``out_dir`` and return its path."""
    rng = np.random.default_rng(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    docs, doc_topics = _documents(rng)
    queries, query_topics = _queries(rng)
    users = _users(rng)
    chats, chat_ann = _chats_and_annotations(rng, users)
    questionnaires, q_ann = _questionnaires(rng, users)
    catalog = _catalog(rng)
    words, entities = _vectors(rng)
    pools = _pools(rng, queries, query_topics, doc_topics)
    judgments = _judgments(rng, users, queries, query_topics, doc_topics, pools)

    _write_jsonl(out / "documents.jsonl", docs)
    _write_jsonl(out / "queries.jsonl", queries)
    _write_jsonl(out / "pools.jsonl", [{"query_id": qid, "doc_id": d, "se_rank": r}
                                       for qid in sorted(pools) for d, r in sorted(pools[qid].items())])
    _write_jsonl(out / "judgments.jsonl", judgments)
    _write_jsonl(out / "chats.jsonl", chats)
    _write_jsonl(out / "questionnaires.jsonl", questionnaires)
    _write_jsonl(out / "annotations.jsonl", chat_ann + q_ann)
    _write_jsonl(out / "catalog.jsonl", catalog)
    _write_vectors(out / "word_vectors.txt", words)
    _write_vectors(out / "entity_vectors.txt", entities)
    return out


if __name__ == "__main__":
    import sys

    generate(sys.argv[1] if len(sys.argv) > 1 else bundled_path())
