import itertools

import pytest

from tripwire.corpus import Corpus, DocumentRecord, Label
from tripwire.keywords import (
    Direction,
    KeywordConfig,
    chi_squared,
    keyword_bias,
    keyword_report_csv,
    mention_scan,
    word_tree,
)


def corpus_from(pairs):
    return Corpus(
        tuple(
            DocumentRecord(id=i, author="a", text=text, label=label)
            for i, (text, label) in enumerate(pairs)
        )
    )


def brute_force_chi2(a, b, c, d):
    """Independent oracle via expected-count cells: sum (obs-exp)^2/exp."""
    n = a + b + c + d
    rows = (a + b, c + d)
    cols = (a + c, b + d)
    if 0 in rows or 0 in cols:
        return 0.0
    obs = ((a, b), (c, d))
    total = 0.0
    for i in range(2):
        for j in range(2):
            expected = rows[i] * cols[j] / n
            total += (obs[i][j] - expected) ** 2 / expected
    return total


class TestChiSquared:
    def test_hand_computed_toy(self):
        docs = [
            ("kuf attack now", Label.HATE),
            ("kuf again here", Label.HATE),
            ("peace and tea", Label.SAFE),
            ("sports news", Label.SAFE),
        ]
        stats = keyword_bias(corpus_from(docs), KeywordConfig(min_count=1))
        by_word = {s.word: s for s in stats}
        assert by_word["kuf"].chi2 == pytest.approx(4.0)
        assert by_word["kuf"].p_hate == 1.0

    def test_word_in_every_doc_is_flat(self):
        docs = [
            ("the cat", Label.HATE),
            ("the dog", Label.HATE),
            ("the bird", Label.SAFE),
            ("the fish", Label.SAFE),
        ]
        stats = keyword_bias(corpus_from(docs), KeywordConfig(min_count=1))
        the = next(s for s in stats if s.word == "the")
        assert the.chi2 == 0.0
        assert the.p_hate == 0.5
        assert not the.significant

    def test_posterior_from_tweet_counts(self):
        # 1322 HATE + 27 SAFE tweet hits: posterior ~0.98 over 1349 tweets
        assert 1322 / (1322 + 27) == pytest.approx(0.98, abs=1e-3)
        docs = [(f"kafir filler{i}", Label.HATE) for i in range(25)]
        docs += [(f"kafir other{i}", Label.SAFE) for i in range(1)]
        docs += [(f"noise{i} blah", Label.SAFE) for i in range(10)]
        stats = keyword_bias(corpus_from(docs), KeywordConfig(min_count=5))
        kafir = next(s for s in stats if s.word == "kafir")
        assert kafir.count_hate == 25
        assert kafir.count_safe == 1
        assert kafir.p_hate == pytest.approx(25 / 26)

    def test_exhaustive_small_corpora_match_brute_force(self):
        # every labeled corpus of up to 4 docs over a 3-token alphabet,
        # docs being nonempty token subsets (binary counting makes
        # repeats irrelevant); full 6-doc sweep runs in acceptance
        doc_types = []
        for r in (1, 2, 3):
            doc_types.extend(itertools.combinations("abc", r))
        options = [
            (words, label)
            for words in doc_types
            for label in (Label.HATE, Label.SAFE)
        ]
        checked = 0
        for size in (2, 3, 4):
            for combo in itertools.combinations_with_replacement(options, size):
                labels = {label for _, label in combo}
                if len(labels) != 2:
                    continue
                corpus = corpus_from(
                    [(" ".join(words), label) for words, label in combo]
                )
                n_hate = sum(1 for _, lab in combo if lab is Label.HATE)
                n_safe = len(combo) - n_hate
                stats = keyword_bias(corpus, KeywordConfig(min_count=1))
                for st in stats:
                    expected = brute_force_chi2(
                        st.count_hate,
                        st.count_safe,
                        n_hate - st.count_hate,
                        n_safe - st.count_safe,
                    )
                    assert st.chi2 == pytest.approx(expected, abs=1e-9)
                    checked += 1
        assert checked > 1000

    def test_single_label_corpus_errors(self):
        docs = [("a b", Label.HATE), ("b c", Label.HATE)]
        with pytest.raises(ValueError):
            keyword_bias(corpus_from(docs), KeywordConfig(min_count=1))

    def test_binary_per_tweet_counting(self):
        docs = [
            ("kuf kuf kuf", Label.HATE),
            ("calm words here", Label.SAFE),
            ("kuf appears once", Label.HATE),
        ]
        stats = keyword_bias(corpus_from(docs), KeywordConfig(min_count=1))
        kuf = next(s for s in stats if s.word == "kuf")
        assert kuf.count_hate == 2  # two tweets, not four occurrences
        assert kuf.occurrences == 4

    def test_sorted_by_chi2_then_word(self):
        docs = [
            ("aa bb", Label.HATE),
            ("aa bb", Label.HATE),
            ("cc dd", Label.SAFE),
            ("cc dd", Label.SAFE),
        ]
        stats = keyword_bias(corpus_from(docs), KeywordConfig(min_count=1))
        assert [s.word for s in stats] == ["aa", "bb", "cc", "dd"]

    def test_min_count_floor(self):
        docs = [("rare word", Label.HATE), ("word again", Label.SAFE)]
        stats = keyword_bias(corpus_from(docs), KeywordConfig(min_count=2))
        assert [s.word for s in stats] == ["word"]

    def test_alpha_validation(self):
        with pytest.raises(ValueError):
            KeywordConfig(alpha=0.02)
        with pytest.raises(ValueError):
            KeywordConfig(alpha=1.5)

    def test_significance_threshold(self):
        # 10 of 10 HATE docs contain the word, 0 of 10 SAFE: chi2 = 20
        docs = [(f"boom x{i}", Label.HATE) for i in range(10)]
        docs += [(f"calm y{i}", Label.SAFE) for i in range(10)]
        stats = keyword_bias(corpus_from(docs), KeywordConfig(min_count=5))
        boom = next(s for s in stats if s.word == "boom")
        assert boom.chi2 == pytest.approx(20.0)
        assert boom.significant  # 20 >= 6.635

    def test_report_csv_shape(self):
        docs = [("kafir kafir", Label.HATE), ("tea time", Label.SAFE)]
        stats = keyword_bias(corpus_from(docs), KeywordConfig(min_count=1))
        report = keyword_report_csv(stats)
        lines = report.strip().split("\r\n")
        assert lines[0] == "KEYWORD,HATE %,#"
        assert any("kafir,100%,2" in line for line in lines)


class TestWordTree:
    def test_right_depth_one(self):
        docs = [
            ("die in your rage kuffar", Label.HATE),
            ("die in your rage !", Label.HATE),
        ]
        tree = word_tree(corpus_from(docs), "rage", Direction.RIGHT, depth=1)
        assert tree.count == 2
        assert set(tree.branches) == {"kuffar", "!"}
        assert tree.branches["kuffar"].count == 1
        assert tree.branches["!"].count == 1

    def test_absent_keyword(self):
        docs = [("nothing here", Label.SAFE)]
        tree = word_tree(corpus_from(docs), "rage", Direction.RIGHT, depth=2)
        assert tree.count == 0
        assert tree.branches == {}

    def test_left_depth_two_path(self):
        docs = [("die in your rage", Label.HATE)]
        tree = word_tree(corpus_from(docs), "rage", Direction.LEFT, depth=2)
        assert tree.count == 1
        assert set(tree.branches) == {"your"}
        your = tree.branches["your"]
        assert your.count == 1
        assert set(your.children) == {"in"}
        assert your.children["in"].count == 1

    def test_branch_counts_bounded_by_root(self):
        docs = [
            ("rage quit now", Label.HATE),
            ("rage quit later", Label.HATE),
            ("rage", Label.HATE),
        ]
        tree = word_tree(corpus_from(docs), "rage", Direction.RIGHT, depth=2)
        assert tree.count == 3
        total_level_one = sum(n.count for n in tree.branches.values())
        assert total_level_one == 2  # the bare "rage" has no right context
        for node in tree.branches.values():
            assert node.count <= tree.count

    def test_multiple_occurrences_in_one_doc(self):
        docs = [("rage and rage again", Label.HATE)]
        tree = word_tree(corpus_from(docs), "rage", Direction.RIGHT, depth=1)
        assert tree.count == 2

    def test_depth_validation(self):
        with pytest.raises(ValueError):
            word_tree(Corpus(()), "x", Direction.RIGHT, depth=0)

    def test_text_and_json_render(self):
        docs = [("rage quit", Label.HATE)]
        tree = word_tree(corpus_from(docs), "rage", "right", depth=1)
        assert "rage (1)" in tree.to_text()
        assert "quit (1)" in tree.to_text()
        data = tree.to_json_dict()
        assert data["count"] == 1
        assert data["branches"][0]["token"] == "quit"


class TestMentionScan:
    def test_binary_per_tweet(self):
        docs = [
            ("fighting in syria continues, syria burns", Label.HATE),
            ("aid reaches syria today", Label.SAFE),
            ("nothing to see", Label.SAFE),
        ]
        counts = mention_scan(corpus_from(docs), {"syria": "Syria"})
        assert counts == {"Syria": 2}

    def test_empty_gazetteer(self):
        docs = [("anything", Label.SAFE)]
        assert mention_scan(corpus_from(docs), {}) == {}

    def test_repeat_mentions_count_once(self):
        docs = [("paris paris paris", Label.SAFE)]
        counts = mention_scan(corpus_from(docs), {"paris": "Paris"})
        assert counts == {"Paris": 1}

    def test_aliases_map_to_one_place(self):
        docs = [("brussel and bruxelles both", Label.SAFE)]
        gaz = {"brussel": "Brussels", "bruxelles": "Brussels"}
        assert mention_scan(corpus_from(docs), gaz) == {"Brussels": 1}

    def test_punctuation_tolerant_token_match(self):
        docs = [("they reached syria!", Label.SAFE), ("comparison text", Label.SAFE)]
        counts = mention_scan(corpus_from(docs), {"syria": "Syria", "paris": "Paris"})
        assert counts == {"Syria": 1}  # "comparison" must not match "paris"

    def test_multiword_phrase(self):
        docs = [("attack in new york today", Label.SAFE), ("york minster", Label.SAFE)]
        counts = mention_scan(corpus_from(docs), {"new york": "New York"})
        assert counts == {"New York": 1}

    def test_case_insensitive_via_normalization(self):
        docs = [("SYRIA in the news", Label.SAFE)]
        assert mention_scan(corpus_from(docs), {"Syria": "Syria"}) == {"Syria": 1}
