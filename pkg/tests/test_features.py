import numpy as np
import pytest

from topiclabel.corpus import Article, TitleLexicon
from topiclabel.errors import FormatError, NoTrigramsError, UnknownLabelError
from topiclabel.features import (
    FeatureVector,
    LinkGraph,
    compute_features,
    letter_trigram_similarity,
    num_words,
    pagerank,
    read_features,
    read_pagerank,
    title_pagerank,
    topic_overlap,
    trigram_distribution,
    unsupervised_rank,
    write_features,
    write_pagerank,
)
from topiclabel.generation import Topic

from oracles import dense_pagerank, trigram_cosine

EXAMPLE_TOPIC = Topic(
    "t-example", "blogs",
    ["blogs", "vmware", "server", "virtual", "oracle", "update",
     "virtualization", "application", "infrastructure", "management"],
)


class TestTrigramDistribution:
    def test_single_trigram(self):
        assert trigram_distribution(["cat"]) == {"cat": 1.0}

    def test_two_substrings(self):
        assert trigram_distribution(["abcd"]) == {"abc": 0.5, "bcd": 0.5}

    def test_strings_are_not_concatenated(self):
        separate = trigram_distribution(["cat", "car"])
        joined = trigram_distribution(["catcar"])
        assert separate == {"cat": 0.5, "car": 0.5}
        assert "atc" in joined and "atc" not in separate

    def test_no_trigrams_error(self):
        with pytest.raises(NoTrigramsError):
            trigram_distribution(["ab", "x", ""])

    def test_sums_to_one(self):
        import random

        rng = random.Random(4)
        for _ in range(100):
            strings = [
                "".join(rng.choice("abcdef") for _ in range(rng.randrange(1, 9)))
                for _ in range(rng.randrange(1, 6))
            ]
            try:
                dist = trigram_distribution(strings)
            except NoTrigramsError:
                continue
            assert abs(sum(dist.values()) - 1.0) <= 1e-9
            assert all(len(k) == 3 for k in dist)
            assert all(v > 0 for v in dist.values())


class TestTrigramSimilarity:
    def test_identical_strings_score_one(self):
        topic = Topic("t", "news", ["education"])
        assert letter_trigram_similarity("education", topic) == pytest.approx(1.0)

    def test_disjoint_trigrams_score_zero(self):
        topic = Topic("t", "news", ["aaa"])
        assert letter_trigram_similarity("zzz", topic) == 0.0

    def test_hand_case(self):
        # label {cat: 1}; topic {cat: .5, car: .5} -> 0.5 / sqrt(0.5)
        topic = Topic("t", "news", ["cat", "car"])
        assert letter_trigram_similarity("cat", topic) == pytest.approx(
            0.7071068, abs=1e-6
        )

    def test_short_label_scores_zero(self):
        topic = Topic("t", "news", ["cat"])
        assert letter_trigram_similarity("ab of x", topic) == 0.0

    def test_multiword_labels_use_per_word_distributions(self):
        topic = Topic("t", "news", ["catcar"])
        whole = letter_trigram_similarity("catcar", topic)
        split = letter_trigram_similarity("cat car", topic)
        assert whole > split

    def test_underscores_count_as_word_breaks(self):
        topic = Topic("t", "news", ["cat", "car"])
        assert letter_trigram_similarity("cat_car", topic) == pytest.approx(1.0)

    def test_duplicating_inputs_is_invariant(self):
        topic = Topic("t", "news", ["server", "virtual"])
        doubled = Topic("t", "news", ["server", "virtual", "server", "virtual"])
        assert letter_trigram_similarity("virtual server", topic) == pytest.approx(
            letter_trigram_similarity("virtual server", doubled)
        )

    def test_symmetric_in_the_two_string_sets(self):
        a, b = ["virtual", "server"], ["cloud", "compute"]
        forward = letter_trigram_similarity(" ".join(a), Topic("t", "x", b))
        backward = letter_trigram_similarity(" ".join(b), Topic("t", "x", a))
        assert forward == pytest.approx(backward, abs=1e-15)

    def test_against_counter_oracle(self):
        import random

        rng = random.Random(12)
        words = ["server", "virtualization", "cloud", "infra", "cat", "dog",
                 "management", "oracle", "update", "xyz"]
        for _ in range(200):
            label = " ".join(rng.sample(words, rng.randrange(1, 4)))
            terms = rng.sample(words, rng.randrange(1, 6))
            topic = Topic("t", "news", terms)
            expected = trigram_cosine(label.split(), [t.lower() for t in terms])
            assert letter_trigram_similarity(label, topic) == pytest.approx(
                expected, abs=1e-9
            )


class TestUnsupervisedRank:
    def test_single_candidate(self):
        assert unsupervised_rank(["anything"], EXAMPLE_TOPIC) == ["anything"]

    def test_order_follows_similarity(self):
        topic = Topic("t", "news", ["education"])
        labels = ["education", "educator", "zebra"]
        assert unsupervised_rank(labels, topic) == ["education", "educator", "zebra"]

    def test_dual_implementation_oracle(self):
        import random

        rng = random.Random(7)
        words = ["server", "virtual", "cloud", "oracle", "update", "manage",
                 "infra", "network", "storage", "compute"]
        labels = sorted(
            {" ".join(rng.sample(words, rng.randrange(1, 3))) for _ in range(30)}
        )[:19]
        topic = Topic("t", "news", rng.sample(words, 5))
        expected = sorted(
            labels,
            key=lambda lab: (-trigram_cosine(lab.split(), topic.terms), lab),
        )
        assert unsupervised_rank(labels, topic) == expected


class TestPagerank:
    def graph(self, n, edges):
        articles = [
            Article(id=i, title=f"a{i}", body_tokens=[],
                    outlinks=frozenset(d for s, d in edges if s == i))
            for i in range(n)
        ]
        return LinkGraph.from_articles(articles)

    def test_three_cycle_is_uniform(self):
        scores = pagerank(self.graph(3, [(0, 1), (1, 2), (2, 0)]))
        for v in scores.values():
            assert v == pytest.approx(1 / 3, abs=1e-12)

    def test_two_node_hand_solution(self):
        # A -> B with B dangling; the fixed point solves to exactly
        # a = 20/57 and b = 37/57 at damping 0.85.
        scores = pagerank(self.graph(2, [(0, 1)]), damping=0.85, tol=1e-14)
        assert scores[0] == pytest.approx(20 / 57, abs=1e-6)
        assert scores[1] == pytest.approx(37 / 57, abs=1e-6)

    def test_star_hub_dominates(self):
        edges = [(i, 0) for i in range(1, 8)]
        scores = pagerank(self.graph(8, edges))
        assert scores[0] == max(scores.values())
        assert all(scores[0] > scores[i] for i in range(1, 8))

    def test_scores_sum_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            n = int(rng.integers(2, 30))
            edges = [
                (int(s), int(d))
                for s, d in zip(rng.integers(0, n, 60), rng.integers(0, n, 60))
                if s != d
            ]
            scores = pagerank(self.graph(n, sorted(set(edges))))
            assert sum(scores.values()) == pytest.approx(1.0, abs=1e-8)
            assert all(v > 0 for v in scores.values())

    def test_matches_dense_solve(self):
        rng = np.random.default_rng(42)
        for _ in range(15):
            n = int(rng.integers(2, 50))
            m = int(rng.integers(0, 4 * n))
            edges = sorted(
                {
                    (int(s), int(d))
                    for s, d in zip(rng.integers(0, n, m), rng.integers(0, n, m))
                    if s != d
                }
            )
            scores = pagerank(self.graph(n, edges), tol=1e-13, max_iter=500)
            expected = dense_pagerank(n, edges, 0.85)
            for i in range(n):
                assert scores[i] == pytest.approx(expected[i], abs=1e-6)

    def test_nonconvergence_still_returns(self, caplog):
        import logging

        with caplog.at_level(logging.WARNING):
            scores = pagerank(self.graph(5, [(0, 1), (1, 0), (2, 3)]), max_iter=2)
        assert len(scores) == 5
        assert any("converge" in r.message for r in caplog.records)

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            pagerank(LinkGraph(nodes=[], edges={}))

    def test_edges_to_filtered_articles_dropped(self):
        articles = [Article(id=1, title="a", body_tokens=[], outlinks=frozenset({2, 99}))]
        graph = LinkGraph.from_articles(articles)
        assert graph.edges[1] == ()


class TestTitlePagerank:
    def test_single_article(self):
        lex = TitleLexicon(entries={"economy": {5}})
        assert title_pagerank("economy", lex, {5: 0.25}) == 0.25

    def test_merged_titles_take_max(self):
        lex = TitleLexicon(entries={"democratic party": {1, 2}})
        scores = {1: 0.01, 2: 0.002}
        assert title_pagerank("democratic party", lex, scores) == 0.01

    def test_unknown_label(self):
        with pytest.raises(UnknownLabelError):
            title_pagerank("mystery", TitleLexicon(entries={}), {})


class TestLexicalFeatures:
    def test_topic_overlap_example(self):
        assert topic_overlap("desktop virtualization", EXAMPLE_TOPIC) == 1

    def test_topic_overlap_zero(self):
        assert topic_overlap("completely unrelated", EXAMPLE_TOPIC) == 0

    def test_topic_overlap_counts_types_not_tokens(self):
        assert topic_overlap("server server", EXAMPLE_TOPIC) == 1

    def test_topic_overlap_underscores(self):
        assert topic_overlap("virtual_server_update", EXAMPLE_TOPIC) == 3

    def test_num_words(self):
        assert num_words("operating system") == 2
        assert num_words("virtualization") == 1
        assert num_words("microsoft_visual_studio") == 3

    def test_num_words_empty(self):
        with pytest.raises(ValueError):
            num_words("  ")

    def test_overlap_bounded_by_num_words(self):
        import random

        rng = random.Random(5)
        vocab = ["server", "virtual", "cloud", "alpha", "beta"]
        for _ in range(100):
            label = " ".join(rng.choices(vocab, k=rng.randrange(1, 5)))
            topic = Topic("t", "news", rng.sample(vocab, 3))
            overlap = topic_overlap(label, topic)
            assert 0 <= overlap <= num_words(label)
            assert overlap <= len(topic.terms)


class TestComputeFeatures:
    def test_full_vector(self):
        lex = TitleLexicon(entries={"virtual server": {1}, "cloud": {2}})
        scores = {1: 0.6, 2: 0.4}
        topic = Topic("t", "news", ["server", "virtual"])
        fvs = compute_features(topic, ["virtual server", "cloud"], lex, scores)
        assert fvs["virtual server"] == FeatureVector(1, 0.6, 2, 2)
        assert fvs["cloud"].letter_trigram_rank == 2
        assert fvs["cloud"].num_words == 1

    def test_as_array_order(self):
        fv = FeatureVector(3, 0.5, 1, 2)
        assert fv.as_array().tolist() == [3.0, 0.5, 1.0, 2.0]


class TestFeatureIO:
    def test_pagerank_round_trip(self, tmp_path):
        path = tmp_path / "pr.tsv"
        scores = {3: 0.125, 1: 0.875}
        write_pagerank(scores, path)
        assert read_pagerank(path) == scores

    def test_pagerank_bad_row(self, tmp_path):
        path = tmp_path / "pr.tsv"
        path.write_text("1\n")
        with pytest.raises(FormatError):
            read_pagerank(path)

    def test_features_round_trip(self, tmp_path):
        table = {
            "t1": {"alpha": FeatureVector(1, 0.5, 2, 3), "beta": FeatureVector(2, 0.1, 0, 1)},
            "t2": {"gamma": FeatureVector(1, 0.9, 1, 1)},
        }
        path = tmp_path / "features.tsv"
        write_features(table, path)
        assert read_features(path) == table

    def test_features_bad_header(self, tmp_path):
        path = tmp_path / "features.tsv"
        path.write_text("nope\n")
        with pytest.raises(FormatError):
            read_features(path)
