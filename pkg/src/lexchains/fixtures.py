"""Deterministic miniature assets: a two-topic lexical database, matching
word vectors and a labeled raw-text corpus, plus the toy sentence
database.  ``write_fixture_files`` regenerates the copies shipped under
``lexchains/data``.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from lexchains.embeddings import EmbeddingModel, save_text_model
from lexchains.wordnet import LexicalDatabase, RelationKind, Synset, SynsetId, dumps_portable

FIGURE2_SENTENCE = "Beets, carrots, and potatoes are grandma and grandpa's favorite dish for lunch!"

# topic -> category synset lemma -> member words
TOPICS = {
    "food": {
        "root_vegetable": ["beet", "carrot", "potato", "turnip", "radish", "parsnip"],
        "edible_fruit": ["apple", "banana", "cherry", "grape", "lemon", "mango"],
        "meal": ["lunch", "dinner", "breakfast", "supper", "brunch", "feast"],
        "beverage": ["juice", "coffee", "tea", "milk", "soda", "cider"],
        "kitchenware": ["spoon", "fork", "kettle", "oven", "skillet", "ladle"],
    },
    "sport": {
        "sports_venue": ["stadium", "arena", "gym", "rink", "velodrome", "racetrack"],
        "sports_equipment": ["ball", "racket", "helmet", "glove", "net", "puck"],
        "athlete": ["player", "coach", "referee", "striker", "goalie", "umpire"],
        "team_sport": ["soccer", "tennis", "hockey", "rugby", "baseball", "cricket"],
        "contest": ["tournament", "championship", "league", "final", "derby", "playoff"],
    },
}

# word -> (food category, sport category)
POLYSEMOUS = {
    "plate": ("kitchenware", "sports_equipment"),
    "bowl": ("kitchenware", "contest"),
    "punch": ("beverage", "contest"),
    "course": ("meal", "sports_venue"),
    "squash": ("root_vegetable", "team_sport"),
    "batter": ("meal", "athlete"),
    "pitcher": ("kitchenware", "athlete"),
    "court": ("meal", "sports_venue"),
}

# each neutral word gets its own category so neutral words never chain
NEUTRAL = ["day", "people", "time", "week", "city", "friend", "morning", "family"]

UNMAPPABLE = ["housd", "xqzt", "blorp"]
FILLER = ["the", "and", "a", "with", "of", "for", "was", "very", "then", "our"]

DIM = 16


class _Offsets:
    def __init__(self):
        self.next = {"n": 1740, "v": 1740, "a": 1740, "s": 1740, "r": 1740}

    def __call__(self, pos):
        off = self.next[pos]
        self.next[pos] += 97
        return SynsetId(pos, off)


def _gloss(rng, category, words):
    picks = rng.choice(words, size=3, replace=False)
    return f"{category.replace('_', ' ')} such as {picks[0]}, {picks[1]} or {picks[2]}"


def mini_database(seed: int = 7) -> LexicalDatabase:
    rng = np.random.default_rng(seed)
    ids = _Offsets()
    db = LexicalDatabase()
    pointers: dict[SynsetId, list] = {}

    def add(sid, lemmas, gloss):
        db.synsets[sid] = Synset(sid, tuple(lemmas), gloss)
        for lemma in lemmas:
            db.sense_index.setdefault((lemma, "a" if sid.pos == "s" else sid.pos), []).append(sid)

    def link(src, kind, dst):
        pointers.setdefault(src, []).append((kind, dst))

    cat_ids = {}
    for topic, cats in TOPICS.items():
        top = ids("n")
        add(top, [topic], f"things belonging to {topic}")
        for cat, words in cats.items():
            cid = ids("n")
            cat_ids[cat] = (topic, cid, words)
            add(cid, [cat], _gloss(rng, topic, [w for c in cats.values() for w in c]))
            link(cid, RelationKind.HYPERNYM, top)
            link(top, RelationKind.HYPONYM, cid)
            for w in words:
                wid = ids("n")
                add(wid, [w], _gloss(rng, cat, [x for x in words if x != w]))
                link(wid, RelationKind.HYPERNYM, cid)
                link(cid, RelationKind.HYPONYM, wid)

    for word, cats in POLYSEMOUS.items():
        order = list(cats) if rng.random() < 0.5 else list(reversed(cats))
        for cat in order:
            _, cid, words = cat_ids[cat]
            wid = ids("n")
            add(wid, [word], _gloss(rng, cat, words))
            link(wid, RelationKind.HYPERNYM, cid)

    for word in NEUTRAL:
        cid = ids("n")
        add(cid, [f"{word}_kind"], f"general notion of {word}")
        wid = ids("n")
        add(wid, [word], f"an ordinary {word}")
        link(wid, RelationKind.HYPERNYM, cid)

    # a few non-noun senses so every part of speech is exercised
    tasty = ids("a")
    add(tasty, ["tasty"], "pleasing to the taste like juice or mango")
    savory = ids("s")
    add(savory, ["savory", "tasty"], "pleasant tasting like potato or turnip")
    link(savory, RelationKind.SIMILAR_TO, tasty)
    link(tasty, RelationKind.SIMILAR_TO, savory)
    cook = ids("v")
    add(cook, ["cook"], "prepare dinner or lunch in an oven or skillet")
    eat = ids("v")
    add(eat, ["eat"], "take breakfast or supper with a fork or spoon")
    link(cook, RelationKind.CAUSE, eat)
    kick = ids("v")
    add(kick, ["kick"], "strike the ball in soccer or rugby")
    score = ids("v")
    add(score, ["score"], "win points in hockey or tennis in a tournament")
    link(kick, RelationKind.ENTAILMENT, score)
    link(score, RelationKind.VERB_GROUP, kick)
    quickly = ids("r")
    add(quickly, ["quickly"], "with speed")

    for sid, ptrs in pointers.items():
        syn = db.synsets[sid]
        db.synsets[sid] = Synset(sid, syn.lemmas, syn.gloss, tuple(ptrs))
    db.validate()
    return db


def mini_word_model(seed: int = 11) -> EmbeddingModel:
    rng = np.random.default_rng(seed)
    topic_vec = {t: rng.normal(size=DIM) for t in TOPICS}
    table = {}
    cat_vec = {}
    for topic, cats in TOPICS.items():
        table[topic] = topic_vec[topic] + 0.2 * rng.normal(size=DIM)
        for cat, words in cats.items():
            cat_vec[cat] = topic_vec[topic] + 0.8 * rng.normal(size=DIM)
            table[cat] = cat_vec[cat] + 0.2 * rng.normal(size=DIM)
            for w in words:
                table[w] = cat_vec[cat] + 0.3 * rng.normal(size=DIM)
    for word, (fc, sc) in POLYSEMOUS.items():
        table[word] = 0.5 * (cat_vec[fc] + cat_vec[sc]) + 0.3 * rng.normal(size=DIM)
    for word in NEUTRAL:
        table[word] = rng.normal(size=DIM)
    for word, topic in (("tasty", "food"), ("savory", "food"), ("cook", "food"), ("eat", "food"),
                        ("kick", "sport"), ("score", "sport")):
        table[word] = topic_vec[topic] + 0.5 * rng.normal(size=DIM)
    for extra in ("things", "belonging", "ordinary", "general", "notion", "speed", "pleasing",
                  "taste", "prepare", "win", "points", "strike", "take"):
        table[extra] = rng.normal(size=DIM)
    table["such"] = 0.1 * rng.normal(size=DIM)
    return EmbeddingModel.from_dict({k: np.round(v, 4) for k, v in table.items()})


def mini_corpus(n_docs: int = 200, seed: int = 5) -> list[tuple[str, str]]:
    """``(label, raw_text)`` pairs, balanced over the two topics."""
    rng = np.random.default_rng(seed)
    poly_by_topic = {"food": [], "sport": []}
    for word, (fc, sc) in POLYSEMOUS.items():
        poly_by_topic["food"].append(word)
        poly_by_topic["sport"].append(word)
    verbs = {"food": ["cook", "eat", "tasty"], "sport": ["kick", "score"]}
    docs = []
    for i in range(n_docs):
        topic = "food" if i % 2 == 0 else "sport"
        cats = list(TOPICS[topic].values())
        length = int(rng.integers(10, 19))
        words = []
        while len(words) < length:
            r = rng.random()
            if r < 0.70:
                # short runs within a category give flexible chains something to join
                cat = cats[int(rng.integers(len(cats)))]
                run = int(rng.integers(1, 4))
                words.extend(str(w) for w in rng.choice(cat, size=run))
            elif r < 0.82:
                words.append(str(rng.choice(poly_by_topic[topic])))
            elif r < 0.90:
                words.append(str(rng.choice(verbs[topic])))
            elif r < 0.97:
                words.append(str(rng.choice(NEUTRAL)))
            else:
                words.append(str(rng.choice(UNMAPPABLE)))
        pieces = []
        for w in words[:length]:
            if rng.random() < 0.3:
                pieces.append(str(rng.choice(FILLER)))
            pieces.append(w.capitalize() if rng.random() < 0.1 else w)
            if rng.random() < 0.15:
                pieces[-1] += rng.choice([",", ";", "!"])
        docs.append((topic, " ".join(pieces) + "."))
    return docs


def cooccurrence_corpus(n_sentences: int = 40, length: int = 10, seed: int = 0) -> list[list[str]]:
    """Token sentences in which A and B co-occur and C only appears with D."""
    rng = np.random.default_rng(seed)
    return ([[str(t) for t in rng.choice(["A", "B"], length)] for _ in range(n_sentences)]
            + [[str(t) for t in rng.choice(["C", "D"], length)] for _ in range(n_sentences)])


def figure2_database() -> LexicalDatabase:
    """Toy database for the example sentence.

    Pointer pattern: the three vegetables share a hypernym, the
    grandparents, "favorite" and "dish" share a topic domain, and "lunch"
    relates to nothing else in the sentence.
    """
    ids = _Offsets()
    db = LexicalDatabase()
    pointers: dict[SynsetId, list] = {}

    def add(lemma, gloss, pos="n"):
        sid = ids(pos)
        db.synsets[sid] = Synset(sid, (lemma,), gloss)
        db.sense_index.setdefault((lemma, pos), []).append(sid)
        return sid

    root_veg = add("root_vegetable", "any of various fleshy edible underground roots or tubers")
    family_meal = add("home_cooking", "food prepared at home by family")
    meal = add("meal", "the food served and eaten at one time")
    grandparent = add("grandparent", "a parent of your father or mother")
    for word in ("beets", "carrots", "potatoes"):
        sid = add(word, f"{word} eaten as a root vegetable")
        pointers.setdefault(sid, []).append((RelationKind.HYPERNYM, root_veg))
    for word in ("grandma", "grandpa"):
        sid = add(word, "the parent of your father or mother")
        pointers.setdefault(sid, []).append((RelationKind.HYPERNYM, grandparent))
        pointers[sid].append((RelationKind.TOPIC_DOMAIN, family_meal))
    fav = add("favorite", "something regarded with special favor or liking")
    pointers.setdefault(fav, []).append((RelationKind.TOPIC_DOMAIN, family_meal))
    dish = add("dish", "a particular item of prepared food")
    pointers.setdefault(dish, []).append((RelationKind.TOPIC_DOMAIN, family_meal))
    lunch = add("lunch", "a midday meal")
    pointers.setdefault(lunch, []).append((RelationKind.HYPERNYM, meal))
    for sid, ptrs in pointers.items():
        syn = db.synsets[sid]
        db.synsets[sid] = Synset(sid, syn.lemmas, syn.gloss, tuple(ptrs))
    db.validate()
    return db


def data_path(name: str) -> Path:
    return Path(str(resources.files("lexchains").joinpath("data", name)))


def write_fixture_files(directory) -> dict[str, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "wordnet": directory / "mini_wordnet.txt",
        "words": directory / "mini_words.vec",
        "corpus": directory / "mini_corpus.tsv",
        "figure2_wordnet": directory / "figure2_wordnet.txt",
    }
    paths["wordnet"].write_text(dumps_portable(mini_database()), encoding="utf-8")
    save_text_model(mini_word_model(), paths["words"])
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for label, text in mini_corpus():
            fh.write(f"{label}\t{text}\n")
    paths["figure2_wordnet"].write_text(dumps_portable(figure2_database()), encoding="utf-8")
    return paths


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else data_path("")
    for name, p in write_fixture_files(target).items():
        print(f"{name}: {p}")
