import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexchains.corpus import AnnotatedDocument, AnnotatedToken, Document
from lexchains.embeddings import EmbeddingModel, TrainConfig, train_cbow
from lexchains.fixtures import FIGURE2_SENTENCE, POLYSEMOUS, TOPICS
from lexchains.mssa import annotate_corpus, disambiguate, preprocess, refine, stopwords
from lexchains.wordnet import SynsetId, loads_portable, senses

from oracles import mssa_exhaustive


class TestPreprocess:
    def test_example_sentence(self):
        assert preprocess(FIGURE2_SENTENCE) == [
            "beets", "carrots", "potatoes", "grandma", "grandpa", "favorite", "dish", "lunch"]

    def test_empty(self):
        assert preprocess("") == []

    def test_all_stopwords(self):
        assert preprocess("The THE the") == []

    def test_unicode_punctuation(self):
        assert preprocess("«Cats»—dogs… ¿birds?") == ["cats", "dogs", "birds"]

    def test_shipped_list(self):
        assert len(stopwords()) == 127


BANK_DB = loads_portable("""\
S n00000001 bank | sloping land beside river water
S n00000002 bank | institution that accepts money deposits and makes loans
S n00000003 money | a medium of exchange
S n00000004 loan | money lent
S n00000005 river | a stream of water
S n00000006 fish | a cold-blooded animal
""")


def _bank_words():
    e = np.eye(4)
    return EmbeddingModel.from_dict({
        "sloping": e[0], "land": e[0], "river": e[0], "water": e[0],
        "institution": e[1], "accepts": e[1], "money": e[1], "deposits": e[1], "makes": e[1], "loans": e[1],
        "loan": e[1] + 0.1 * e[2], "bank": e[0] + e[1], "fish": e[0] + 0.2 * e[3],
    })


class TestDisambiguate:
    def test_single_sense_regardless_of_context(self):
        doc = disambiguate(["river", "money", "loan"], _bank_words(), BANK_DB)
        assert doc.tokens[0].synset == SynsetId("n", 5)

    def test_single_token_takes_first_sense(self):
        doc = disambiguate(["bank"], _bank_words(), BANK_DB)
        assert doc.tokens == [AnnotatedToken("bank", SynsetId("n", 1))]

    def test_context_selects_sharing_sense(self):
        words = ["money", "bank", "loan"]
        doc = disambiguate(words, _bank_words(), BANK_DB)
        assert doc.tokens[1].synset == SynsetId("n", 2)
        assert [(t.word, t.synset) for t in doc.tokens] == mssa_exhaustive(words, _bank_words(), BANK_DB)

    def test_river_context(self):
        doc = disambiguate(["river", "bank", "fish"], _bank_words(), BANK_DB)
        assert doc.tokens[1].synset == SynsetId("n", 1)

    def test_unmappable_tokens_dropped(self):
        doc = disambiguate(["housd", "money", "xyz", "bank"], _bank_words(), BANK_DB)
        assert [t.word for t in doc.tokens] == ["money", "bank"]

    def test_all_glosses_oov_falls_back_to_first(self):
        doc = disambiguate(["money", "bank", "loan"], EmbeddingModel.from_dict({"zzz": [1.0]}), BANK_DB)
        assert doc.tokens[1].synset == SynsetId("n", 1)

    def test_mini_corpus_brute_force(self, mini_db, mini_words, data_dir):
        lines = (data_dir / "mini_corpus.tsv").read_text().splitlines()[:30]
        for line in lines:
            words = preprocess(line.split("\t", 1)[1])
            got = disambiguate(words, mini_words, mini_db)
            assert [(t.word, t.synset) for t in got] == mssa_exhaustive(words, mini_words, mini_db)

    def test_mini_corpus_context_resolves_polysemy(self, mini_db, mini_words, data_dir):
        # a polysemous word should mostly get the sense of its document's topic
        cat_topic = {c: t for t, cats in TOPICS.items() for c in cats}
        hyper = {}
        for sid, syn in mini_db.synsets.items():
            for _, target in syn.pointers:
                hyper.setdefault(sid, mini_db.synsets[target].lemmas[0])
        right = total = 0
        for line in (data_dir / "mini_corpus.tsv").read_text().splitlines():
            label, text = line.split("\t", 1)
            for tok in disambiguate(preprocess(text), mini_words, mini_db):
                if tok.word in POLYSEMOUS:
                    total += 1
                    right += cat_topic[hyper[tok.synset]] == label
        assert total > 100
        assert right / total > 0.8


def _sense_vectors(doc_words, db, chosen):
    """Synset model where only the chosen sense of each word has a vector,
    all pointing the same way, so that sense maximises the window score."""
    table = {}
    for w in doc_words:
        table[f"{w}#{chosen[w].offset8}#{chosen[w].pos}"] = np.array([1.0, 0.0, 0.0])
    return EmbeddingModel.from_dict(table)


class TestRefine:
    def test_exact_sense_vectors_win(self):
        chosen = {"money": SynsetId("n", 3), "bank": SynsetId("n", 2), "loan": SynsetId("n", 4)}
        sv = _sense_vectors(chosen, BANK_DB, chosen)
        doc = refine(["money", "bank", "loan"], sv, BANK_DB)
        assert doc.tokens[1].synset == SynsetId("n", 2)
        prev = AnnotatedDocument([AnnotatedToken(w, s) for w, s in chosen.items()])
        assert refine(prev, sv, BANK_DB).tokens[1].synset == SynsetId("n", 2)

    def test_absent_token_falls_back_to_first_sense(self):
        sv = EmbeddingModel.from_dict({"unrelated#00000009#n": [1.0, 0.0]})
        doc = refine(["bank"], sv, BANK_DB)
        assert doc.tokens[0].synset == SynsetId("n", 1)

    def test_gloss_fallback_uses_first_senses(self):
        # no direct vector for either bank sense: the institution gloss
        # mentions "money", whose first sense is in the model
        sv = EmbeddingModel.from_dict({
            "money#00000003#n": [0.0, 1.0],
            "loan#00000004#n": [0.0, 1.0],
            "river#00000005#n": [1.0, 0.0],
        })
        doc = refine(["money", "bank", "loan"], sv, BANK_DB)
        assert doc.tokens[1].synset == SynsetId("n", 2)

    def test_refine_on_trained_model_keeps_length(self, mini_db, mini_words, data_dir):
        lines = (data_dir / "mini_corpus.tsv").read_text().splitlines()[:40]
        docs = [Document([ln.split("\t", 1)[1]], ln.split("\t", 1)[0]) for ln in lines]
        annotated, _ = annotate_corpus(docs, mini_words, mini_db)
        sv = train_cbow([d.rendered() for d in annotated],
                        TrainConfig(dimension=8, window=3, min_count=1, epochs=2))
        for doc in annotated:
            again = refine(doc, sv, mini_db)
            assert len(again) == len(doc)
            assert [t.word for t in again] == [t.word for t in doc]


class TestAnnotateCorpus:
    def test_stats_and_labels(self, mini_db, mini_words):
        docs = [Document(["Beets and housd carrots!"], "x"), Document(["the"], None)]
        out, stats = annotate_corpus(docs, mini_words, mini_db)
        assert [d.label for d in out] == ["x", None]
        assert stats.tokens_in == 3 and stats.tokens_dropped == 3
        # plural surface forms are not lemmatized
        assert len(out[0]) == 0

    def test_passes_with_provided_model_change_only_argmax(self):
        docs = [Document(["money bank loan"])]
        base, _ = annotate_corpus(docs, _bank_words(), BANK_DB)
        # synset model pushing 'bank' to the river sense
        sv = EmbeddingModel.from_dict({
            "money#00000003#n": [1.0, 0.0], "loan#00000004#n": [1.0, 0.0],
            "bank#00000001#n": [1.0, 0.0], "bank#00000002#n": [-1.0, 0.0],
        })
        refined, stats = annotate_corpus(docs, _bank_words(), BANK_DB, passes=1, synset_model=sv)
        diff = [i for i, (a, b) in enumerate(zip(base[0].tokens, refined[0].tokens)) if a != b]
        assert diff == [1]
        assert stats.changed_by_refinement == 1

    def test_parallel_matches_serial(self, mini_db, mini_words, data_dir):
        lines = (data_dir / "mini_corpus.tsv").read_text().splitlines()[:20]
        docs = [Document([ln.split("\t", 1)[1]], ln.split("\t", 1)[0]) for ln in lines]
        a, _ = annotate_corpus(docs, mini_words, mini_db, workers=1)
        b, _ = annotate_corpus(docs, mini_words, mini_db, workers=4)
        assert a == b


@st.composite
def windows(draw):
    """Random database + word model + a short document."""
    vocab = [f"w{i}" for i in range(12)]
    n_words = draw(st.integers(1, 5))
    doc_words = draw(st.lists(st.sampled_from(vocab[:6]), min_size=n_words, max_size=n_words))
    lines, off = [], 1
    for w in sorted(set(doc_words)):
        for _ in range(draw(st.integers(1, 4))):
            gloss = " ".join(draw(st.lists(st.sampled_from(vocab + ["oov"]), min_size=0, max_size=4)))
            pos = draw(st.sampled_from("nvar"))
            lines.append(f"S {pos}{off:08d} {w} | {gloss}")
            off += 1
    db = loads_portable("\n".join(lines) + "\n")
    dim = 3
    table = {}
    for w in vocab:
        if draw(st.booleans()) or w in doc_words:
            table[w] = draw(st.lists(st.integers(-3, 3), min_size=dim, max_size=dim))
    if not table:
        table["w0"] = [1, 0, 0]
    return doc_words, EmbeddingModel.from_dict(table), db


@settings(max_examples=150, deadline=None)
@given(windows())
def test_brute_force_equivalence(case):
    words, wv, db = case
    got = disambiguate(words, wv, db)
    assert [(t.word, t.synset) for t in got] == mssa_exhaustive(words, wv, db)
    assert len(got) <= len(words)
    assert all(senses(t.word, None, db) for t in got)
