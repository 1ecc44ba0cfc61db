import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from corrnmf import (
    Corpus,
    Document,
    STOPWORDS,
    build_tfidf,
    filter_topics,
    load_corpus,
    porter_stem,
    preprocess,
    save_corpus,
    write_vocabulary,
)


def corpus_from(pairs):
    return Corpus(
        tuple(Document(f"d{i}", label, text) for i, (label, text) in enumerate(pairs))
    )


class TestPorterStemmer:
    # Expected stems hand-traced through the published algorithm.
    REFERENCE = {
        "caresses": "caress",
        "ponies": "poni",
        "ties": "ti",
        "caress": "caress",
        "cats": "cat",
        "feed": "feed",
        "agreed": "agre",
        "plastered": "plaster",
        "bled": "bled",
        "motoring": "motor",
        "sing": "sing",
        "happy": "happi",
        "sky": "sky",
        "connected": "connect",
        "connections": "connect",
        "running": "run",
        "runs": "run",
        "relational": "relat",
        "conditional": "condit",
        "rational": "ration",
        "generalization": "gener",
        "oscillators": "oscil",
        "controlled": "control",
        "university": "univers",
        "hopping": "hop",
        "falling": "fall",
        "hissing": "hiss",
        "failing": "fail",
        "filing": "file",
        "nation": "nation",
        "element": "element",
        "replacement": "replac",
    }

    @pytest.mark.parametrize("word,expected", sorted(REFERENCE.items()))
    def test_reference_pairs(self, word, expected):
        assert porter_stem(word) == expected

    def test_short_words_untouched(self):
        assert porter_stem("go") == "go"
        assert porter_stem("a") == "a"


class TestPreprocess:
    def test_stems_and_drops_stopwords(self):
        assert preprocess("The connected connections") == ["connect", "connect"]

    def test_all_stopwords_give_empty(self):
        assert preprocess("the a an") == []

    def test_case_insensitive(self):
        assert preprocess("Running RUNS") == ["run", "run"]

    def test_splits_on_non_alphabetic(self):
        assert preprocess("state-of-the-art v2 speed!") == ["state", "art", "speed"]

    def test_drops_short_stems(self):
        # "ties" stems to "ti" (kept), a lone letter is dropped
        assert preprocess("x ties") == ["ti"]

    @given(
        st.lists(
            st.sampled_from(
                [
                    "market", "trade", "wheat", "price", "export", "ship",
                    "million", "government", "report", "week", "crude", "oil",
                    "bank", "rate", "profit", "grain", "tonnes", "deal",
                ]
            ),
            min_size=0,
            max_size=30,
        )
    )
    def test_fixed_point_tokens_pass_through(self, words):
        # A stream of already-stemmed, stopword-free tokens is left unchanged.
        once = preprocess(" ".join(words))
        stable = [t for t in once if porter_stem(t) == t]
        assert preprocess(" ".join(stable)) == stable

    def test_stopword_list_contains_articles(self):
        assert {"the", "a", "an"} <= STOPWORDS


class TestBuildTfidf:
    def test_ubiquitous_term_gets_zero_row(self):
        corpus = corpus_from([("t", "wheat market"), ("t", "wheat price")])
        x, vocab = build_tfidf(corpus)
        row = list(vocab.terms).index("wheat")
        assert (x.toarray()[row] == 0.0).all()

    def test_hand_weight_before_normalization(self):
        corpus = corpus_from([("t", "apple apple banana"), ("t", "banana cherry")])
        x, vocab = build_tfidf(corpus, normalize=False)
        dense = x.toarray()
        apple = list(vocab.terms).index("appl")  # "apple" stems to "appl"
        assert dense[apple, 0] == pytest.approx(2 * math.log(2), abs=1e-12)
        banana = list(vocab.terms).index("banana")
        assert (dense[banana] == 0.0).all()  # appears in both documents

    def test_columns_unit_norm_or_zero(self):
        corpus = corpus_from(
            [("a", "wheat market price"), ("a", "crude oil"), ("b", "the an")]
        )
        x, _ = build_tfidf(corpus)
        norms = np.sqrt((x.toarray() ** 2).sum(axis=0))
        for norm in norms:
            assert norm == pytest.approx(1.0, abs=1e-12) or norm == 0.0

    def test_nonnegative_and_sparse(self):
        corpus = corpus_from([("a", "wheat trade"), ("b", "oil trade report")])
        x, _ = build_tfidf(corpus)
        assert x.is_sparse
        assert x.toarray().min() >= 0.0

    def test_deterministic(self):
        corpus = corpus_from([("a", "wheat trade oil"), ("b", "oil report")])
        x1, v1 = build_tfidf(corpus)
        x2, v2 = build_tfidf(corpus)
        assert v1.terms == v2.terms
        assert v1.doc_freq == v2.doc_freq
        np.testing.assert_array_equal(x1.toarray(), x2.toarray())

    def test_vocabulary_sorted_with_df(self):
        corpus = corpus_from([("a", "wheat oil"), ("b", "oil")])
        _, vocab = build_tfidf(corpus)
        assert list(vocab.terms) == sorted(vocab.terms)
        assert vocab.doc_freq[list(vocab.terms).index("oil")] == 2

    def test_rejects_token_free_corpus(self):
        corpus = corpus_from([("a", "the of and"), ("b", "...")])
        with pytest.raises(ValueError, match="usable tokens"):
            build_tfidf(corpus)


class TestLoadCorpus:
    def test_jsonl_single_record(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id":"d1","label":"trade","text":"wheat deal"}\n')
        corpus = load_corpus(path)
        assert len(corpus) == 1
        assert corpus.documents[0].label == "trade"
        assert corpus.topics == ("trade",)

    def test_directory_layout(self, tmp_path):
        for topic in ("grain", "crude"):
            d = tmp_path / topic
            d.mkdir()
            for i in range(3):
                (d / f"{topic}{i}.txt").write_text(f"text {i}")
        corpus = load_corpus(tmp_path)
        assert len(corpus) == 6
        assert corpus.topics == ("crude", "grain")

    def test_duplicate_id_names_the_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(
            '{"id":"d1","label":"a","text":"x"}\n{"id":"d1","label":"b","text":"y"}\n'
        )
        with pytest.raises(ValueError, match="d1"):
            load_corpus(path)

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id":"d1","label":"a","text":"x"}\nnot json\n')
        with pytest.raises(ValueError, match="line 2"):
            load_corpus(path)

    def test_missing_field_reports_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id":"d1","text":"x"}\n')
        with pytest.raises(ValueError, match="line 1"):
            load_corpus(path)

    def test_roundtrip_via_save(self, tmp_path):
        corpus = corpus_from([("a", "wheat deal"), ("b", "oil price")])
        path = tmp_path / "c.jsonl"
        save_corpus(corpus, path)
        back = load_corpus(path)
        assert back.documents == corpus.documents

    def test_duplicate_ids_rejected_at_construction(self):
        with pytest.raises(ValueError, match="duplicate"):
            Corpus((Document("d", "a", "x"), Document("d", "b", "y")))


class TestFilterTopics:
    def test_threshold(self):
        docs = [("A", f"text {i}") for i in range(6)] + [("B", f"text {i}") for i in range(3)]
        corpus = corpus_from(docs)
        kept = filter_topics(corpus, 5)
        assert kept.topics == ("A",)
        assert len(kept) == 6

    def test_min_docs_one_is_identity(self):
        corpus = corpus_from([("A", "x"), ("B", "y")])
        assert filter_topics(corpus, 1).documents == corpus.documents

    def test_all_below_threshold_fails(self):
        corpus = corpus_from([("A", "x"), ("B", "y")])
        with pytest.raises(ValueError, match="at least 5"):
            filter_topics(corpus, 5)

    def test_rejects_zero_min_docs(self):
        corpus = corpus_from([("A", "x")])
        with pytest.raises(ValueError):
            filter_topics(corpus, 0)


def test_write_vocabulary(tmp_path):
    corpus = corpus_from([("a", "wheat oil"), ("b", "oil")])
    _, vocab = build_tfidf(corpus)
    path = tmp_path / "vocab.txt"
    write_vocabulary(vocab, path)
    assert path.read_text().splitlines() == list(vocab.terms)
