import io
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from lexevo.errors import (
    ConfigError,
    DegenerateCorpusError,
    EmptyMatrixError,
    UndefinedStatisticError,
    ValidationError,
)
from lexevo.textpipe import (
    DocTermMatrix,
    TokenStream,
    WeightScheme,
    auto_stop_terms,
    build_dtm,
    build_vocabulary,
    dtm_from_triplets,
    load_stoplist,
    read_counts_tsv,
    read_vocabulary_tsv,
    remove_stopwords,
    tokenize,
    uniqueness_stats,
    weight_matrix,
    write_counts_tsv,
    write_vocabulary_tsv,
)


def _streams(*token_lists):
    return [TokenStream(f"d{i}", tuple(ts)) for i, ts in enumerate(token_lists)]


# --- tokenization -----------------------------------------------------------


def test_tokenize_lowercases_and_splits_on_non_letters():
    assert tokenize("Big Data, 2023-era (clinical)!") == [
        "big", "data", "era", "clinical",
    ]


def test_tokenize_digits_and_underscores_break_tokens():
    assert tokenize("covid19 twenty_one x2y") == ["covid", "twenty", "one"]


def test_tokenize_keeps_accented_letters_together():
    assert tokenize("salud pública año") == ["salud", "pública", "año"]


def test_tokenize_min_length():
    assert tokenize("a of the be longer", min_len=3) == ["the", "longer"]
    assert tokenize("a b c", min_len=1) == ["a", "b", "c"]


def test_tokenize_empty_input():
    assert tokenize("") == []
    assert tokenize("123 --- _") == []


@given(st.text(max_size=200))
def test_tokenize_is_idempotent_on_its_own_output(text):
    once = tokenize(text)
    assert tokenize(" ".join(once)) == once


@given(st.text(max_size=200))
def test_tokens_are_normalized(text):
    for token in tokenize(text):
        assert token == token.lower()
        assert len(token) >= 2
        assert all(c.isalpha() for c in token)


# --- stopwords --------------------------------------------------------------


def test_remove_stopwords_preserves_order():
    stream = TokenStream("d0", ("data", "the", "mining", "of", "data"))
    out = remove_stopwords(stream, frozenset({"the", "of"}))
    assert out.tokens == ("data", "mining", "data")
    assert out.doc_id == "d0"


@given(st.lists(st.sampled_from(["data", "the", "of", "mining", "care"]), max_size=30))
def test_remove_stopwords_is_idempotent(tokens):
    stoplist = frozenset({"the", "of"})
    stream = TokenStream("d", tuple(tokens))
    once = remove_stopwords(stream, stoplist)
    assert remove_stopwords(once, stoplist) == once


def test_load_stoplist_skips_comments_and_lowercases(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment\nThe\n\n  of  \n#another\nAND\n", encoding="utf-8")
    assert load_stoplist(path) == frozenset({"the", "of", "and"})


def test_auto_stop_terms_threshold():
    streams = _streams(
        ["data", "care"], ["data", "mining"], ["data"], ["care"],
    )
    # "data" appears in 3/4 documents, "care" in 2/4.
    assert auto_stop_terms(streams, 0.5) == frozenset({"data"})
    assert auto_stop_terms(streams, 0.75) == frozenset()
    assert auto_stop_terms(streams, 1.0) == frozenset()


def test_auto_stop_terms_validates_fraction():
    with pytest.raises(ValidationError):
        auto_stop_terms(_streams(["a"]), 0.0)
    with pytest.raises(ValidationError):
        auto_stop_terms(_streams(["a"]), 1.5)


# --- uniqueness -------------------------------------------------------------


def test_uniqueness_stats_hand_computed():
    stats = uniqueness_stats(_streams(["a", "b", "a", "c"], ["x", "x"]))
    assert stats.mean_tokens == 3.0
    assert stats.mean_unique == 2.0
    assert stats.unique_ratio == pytest.approx((3 / 4 + 1 / 2) / 2)
    assert stats.ratio_of_means == pytest.approx(2 / 3)


def test_uniqueness_stats_skips_empty_docs_in_the_ratio_only():
    stats = uniqueness_stats(_streams(["a", "a"], []))
    assert stats.mean_tokens == 1.0   # empty doc still counts in the means
    assert stats.unique_ratio == 0.5  # but not in the ratio mean


def test_uniqueness_stats_undefined_cases():
    with pytest.raises(UndefinedStatisticError):
        uniqueness_stats([])
    with pytest.raises(UndefinedStatisticError):
        uniqueness_stats(_streams([], []))


# --- vocabulary -------------------------------------------------------------


def test_build_vocabulary_orders_by_frequency_then_term():
    streams = _streams(["bb", "bb", "aa", "cc"], ["aa", "cc", "cc"])
    vocab = build_vocabulary(streams, min_total_frequency=2)
    # cc:3, aa:2, bb:2 -> ties between aa and bb broken lexicographically
    assert vocab.terms == ("cc", "aa", "bb")
    assert vocab.total_frequency == {"cc": 3, "aa": 2, "bb": 2}
    assert vocab.doc_frequency == {"cc": 2, "aa": 2, "bb": 1}
    assert vocab.index == {"cc": 0, "aa": 1, "bb": 2}


def test_build_vocabulary_threshold_drops_rare_terms():
    streams = _streams(["aa", "aa", "bb"])
    vocab = build_vocabulary(streams, min_total_frequency=2)
    assert vocab.terms == ("aa",)


def test_build_vocabulary_empty_result_names_the_threshold():
    with pytest.raises(ConfigError, match="min_total_frequency=9"):
        build_vocabulary(_streams(["aa"]), min_total_frequency=9)


def test_build_vocabulary_rejects_non_positive_threshold():
    with pytest.raises(ValidationError):
        build_vocabulary(_streams(["aa"]), min_total_frequency=0)


@given(
    st.lists(
        st.lists(st.sampled_from("abcdef"), max_size=12).map(
            lambda chars: [c * 2 for c in chars]
        ),
        min_size=1,
        max_size=10,
    ),
    st.integers(min_value=1, max_value=4),
)
def test_vocabulary_threshold_monotonicity(token_lists, threshold):
    streams = _streams(*token_lists)
    try:
        low = build_vocabulary(streams, threshold)
    except ConfigError:
        return  # nothing reaches the lower threshold; nothing to compare
    try:
        high = build_vocabulary(streams, threshold + 1)
    except ConfigError:
        return
    assert set(high.terms) <= set(low.terms)


def test_vocabulary_matches_counter_oracle(mini_streams):
    vocab = build_vocabulary(mini_streams, min_total_frequency=5)
    totals, dfs = oracles.vocabulary_counter([s.tokens for s in mini_streams])
    for term in vocab.terms:
        assert vocab.total_frequency[term] == totals[term]
        assert vocab.doc_frequency[term] == dfs[term]
    expected_terms = sorted(
        (t for t, c in totals.items() if c >= 5),
        key=lambda t: (-totals[t], t),
    )
    assert list(vocab.terms) == expected_terms


# --- document-term matrix ---------------------------------------------------


def test_build_dtm_counts_match_counter_oracle():
    streams = _streams(
        ["aa", "bb", "aa"],
        ["bb", "cc"],
        ["aa", "cc", "cc", "dd"],
    )
    vocab = build_vocabulary(streams, min_total_frequency=1)
    dtm = build_dtm(streams, vocab)
    dense = dtm.counts.toarray()
    for i, stream in enumerate(streams):
        counts = Counter(stream.tokens)
        for term, j in vocab.index.items():
            assert dense[i, j] == counts[term]
    assert dtm.grand_total == dense.sum()
    assert np.array_equal(dtm.row_margins, dense.sum(axis=1))
    assert np.array_equal(dtm.col_margins, dense.sum(axis=0))


def test_build_dtm_prunes_empty_rows_and_reports_them():
    streams = _streams(["aa", "aa"], ["zz"], ["aa"])
    vocab = build_vocabulary(streams, min_total_frequency=2)  # only "aa" kept
    dtm = build_dtm(streams, vocab)
    assert dtm.rows == ("d0", "d2")
    assert dtm.pruned_rows == ("d1",)
    assert dtm.shape == (2, 1)


def test_build_dtm_prunes_all_zero_columns_and_narrows_vocabulary():
    streams = _streams(["aa", "bb"], ["aa"])
    vocab = build_vocabulary(_streams(["aa", "bb", "cc"], ["aa", "cc"]), 1)
    assert "cc" in vocab.terms
    dtm = build_dtm(streams, vocab)  # cc never occurs in these streams
    assert "cc" not in dtm.terms
    assert "cc" in dtm.pruned_terms
    assert dtm.vocabulary.index == {t: i for i, t in enumerate(dtm.terms)}


def test_build_dtm_all_rows_empty_is_an_error():
    vocab = build_vocabulary(_streams(["aa"]), 1)
    with pytest.raises(EmptyMatrixError):
        build_dtm(_streams([], []), vocab)


@given(st.permutations(range(4)))
def test_build_dtm_row_order_follows_stream_order(perm):
    base = [["aa", "bb"], ["bb"], ["aa", "aa"], ["bb", "aa"]]
    streams = _streams(*base)
    vocab = build_vocabulary(streams, 1)
    shuffled = [streams[i] for i in perm]
    dtm = build_dtm(shuffled, vocab)
    assert dtm.rows == tuple(f"d{i}" for i in perm)
    dense = dtm.counts.toarray()
    for pos, i in enumerate(perm):
        counts = Counter(base[i])
        for term, j in vocab.index.items():
            assert dense[pos, j] == counts[term]


# --- weighting --------------------------------------------------------------


@pytest.fixture()
def small_dtm():
    streams = _streams(
        ["aa", "aa", "bb"],
        ["aa", "cc"],
        ["bb", "bb", "cc", "aa"],
    )
    vocab = build_vocabulary(streams, 1)
    return build_dtm(streams, vocab)


def test_relative_frequency_rows_sum_to_one(small_dtm):
    wm = weight_matrix(small_dtm, WeightScheme.RELATIVE_FREQUENCY)
    sums = np.asarray(wm.values.sum(axis=1)).ravel()
    assert np.allclose(sums, 1.0, atol=1e-12)


def test_relative_frequency_hand_computed(small_dtm):
    wm = weight_matrix(small_dtm, WeightScheme.RELATIVE_FREQUENCY)
    dense = wm.values.toarray()
    j = small_dtm.vocabulary.index["aa"]
    assert dense[0, j] == pytest.approx(2 / 3)
    assert dense[1, j] == pytest.approx(1 / 2)


def test_tf_idf_hand_computed(small_dtm):
    wm = weight_matrix(small_dtm, WeightScheme.TF_IDF)
    dense = wm.values.toarray()
    vocab = small_dtm.vocabulary.index
    # "cc" appears in 2 of 3 documents -> idf = ln(3/2)
    assert dense[1, vocab["cc"]] == pytest.approx((1 / 2) * math.log(3 / 2))
    # "aa" appears in every document -> idf = ln(1) = 0, entry vanishes
    assert dense[:, vocab["aa"]].sum() == 0.0


def test_tf_idf_single_document_is_degenerate():
    streams = _streams(["aa", "bb"])
    dtm = build_dtm(streams, build_vocabulary(streams, 1))
    with pytest.raises(DegenerateCorpusError):
        weight_matrix(dtm, WeightScheme.TF_IDF)
    with pytest.raises(DegenerateCorpusError):
        weight_matrix(dtm, WeightScheme.ENTROPY)


def test_entropy_hand_computed():
    # Column "uu" is uniform across both docs -> factor 0 -> weight 0.
    # Column "kk" is concentrated in one doc -> factor 1 -> weight ln(1+f).
    streams = _streams(["uu", "kk", "kk"], ["uu"])
    dtm = build_dtm(streams, build_vocabulary(streams, 1))
    wm = weight_matrix(dtm, WeightScheme.ENTROPY)
    dense = wm.values.toarray()
    vocab = dtm.vocabulary.index
    assert dense[:, vocab["uu"]].sum() == pytest.approx(0.0)
    assert dense[0, vocab["kk"]] == pytest.approx(math.log(3))


def test_entropy_factor_never_negative(small_dtm):
    wm = weight_matrix(small_dtm, WeightScheme.ENTROPY)
    assert (wm.values.toarray() >= 0).all()


@pytest.mark.parametrize("scheme", list(WeightScheme))
def test_weighting_never_grows_sparsity(small_dtm, scheme):
    wm = weight_matrix(small_dtm, scheme)
    count_nnz = set(zip(*small_dtm.counts.nonzero()))
    weight_nnz = set(zip(*wm.values.nonzero()))
    assert weight_nnz <= count_nnz


def test_weight_matrix_accepts_scheme_strings(small_dtm):
    wm = weight_matrix(small_dtm, "tf-idf")
    assert wm.scheme is WeightScheme.TF_IDF


# --- TSV round-trips ---------------------------------------------------------


def test_vocabulary_tsv_round_trip(small_dtm):
    buf = io.StringIO()
    write_vocabulary_tsv(small_dtm.vocabulary, buf)
    buf.seek(0)
    again = read_vocabulary_tsv(buf)
    assert again.terms == small_dtm.vocabulary.terms
    assert again.total_frequency == small_dtm.vocabulary.total_frequency
    assert again.doc_frequency == small_dtm.vocabulary.doc_frequency


def test_counts_tsv_round_trip(small_dtm):
    buf = io.StringIO()
    write_counts_tsv(small_dtm.rows, small_dtm.terms, small_dtm.counts, buf)
    buf.seek(0)
    rows, triplets = read_counts_tsv(buf)
    rebuilt = dtm_from_triplets(rows, small_dtm.vocabulary, triplets)
    assert rebuilt.rows == small_dtm.rows
    assert (rebuilt.counts != small_dtm.counts).nnz == 0
    assert rebuilt.grand_total == small_dtm.grand_total
    assert np.array_equal(rebuilt.row_margins, small_dtm.row_margins)


def test_weights_tsv_preserves_exact_floats(small_dtm):
    wm = weight_matrix(small_dtm, WeightScheme.TF_IDF)
    buf = io.StringIO()
    write_counts_tsv(wm.rows, wm.terms, wm.values, buf, value_name="weight")
    buf.seek(0)
    _, triplets = read_counts_tsv(buf)
    dense = wm.values.toarray()
    index = wm.vocabulary.index
    row_index = {r: i for i, r in enumerate(wm.rows)}
    for doc_id, term, value in triplets:
        # repr() round-trips doubles exactly
        assert value == dense[row_index[doc_id], index[term]]
