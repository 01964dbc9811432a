"""Abstract text processing: tokens, stopwords, vocabulary and the
sparse document-term matrix, plus the pluggable weighting schemes.

Counting is commutative, so per-document work could run in parallel; the
built structures are immutable afterwards and safe to share.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np
from scipy import sparse

from .corpus import Corpus
from .errors import (
    ConfigError,
    DegenerateCorpusError,
    EmptyMatrixError,
    UndefinedStatisticError,
    ValidationError,
)
from .stopwords import ENGLISH_STOPWORDS

__all__ = [
    "TokenStream",
    "UniquenessStats",
    "Vocabulary",
    "DocTermMatrix",
    "WeightScheme",
    "WeightedMatrix",
    "tokenize",
    "tokenize_documents",
    "load_stoplist",
    "auto_stop_terms",
    "remove_stopwords",
    "uniqueness_stats",
    "build_vocabulary",
    "build_dtm",
    "weight_matrix",
    "write_vocabulary_tsv",
    "read_vocabulary_tsv",
    "write_counts_tsv",
    "read_counts_tsv",
    "dtm_from_triplets",
    "ENGLISH_STOPWORDS",
]

DEFAULT_MIN_TOKEN_LEN = 2
DEFAULT_MIN_TERM_FREQUENCY = 5

# Candidate runs: word characters minus digits and underscore. This is
# almost "runs of Unicode letters", except that a few numeric-letter code
# points (superscripts, Roman numerals — categories Nl/No) slip through;
# those are split out in a second pass so only true letters remain.
_RUN = re.compile(r"[^\W\d_]+", re.UNICODE)


def _alpha_fragments(run: str) -> Iterator[str]:
    current: list[str] = []
    for ch in run:
        if ch.isalpha():
            current.append(ch)
        elif current:
            yield "".join(current)
            current = []
    if current:
        yield "".join(current)


@dataclass(frozen=True)
class TokenStream:
    """Ordered normalized tokens of one document."""

    doc_id: str
    tokens: tuple[str, ...]


def tokenize(text: str, min_len: int = DEFAULT_MIN_TOKEN_LEN) -> list[str]:
    """Lowercase, split on anything that is not a Unicode letter, drop
    fragments shorter than ``min_len``. Order preserved; empty input gives
    an empty list."""
    out: list[str] = []
    for run in _RUN.findall(text.lower()):
        if run.isalpha():  # the common case: the run is already all letters
            if len(run) >= min_len:
                out.append(run)
        else:
            out.extend(f for f in _alpha_fragments(run) if len(f) >= min_len)
    return out


def tokenize_documents(
    corpus: Corpus, min_len: int = DEFAULT_MIN_TOKEN_LEN
) -> list[TokenStream]:
    """Tokenize every abstract of the corpus, in corpus order."""
    return [
        TokenStream(doc.id, tuple(tokenize(doc.abstract, min_len)))
        for doc in corpus.documents
    ]


def load_stoplist(path: str | Path) -> frozenset[str]:
    """Read a stoplist file: UTF-8, one term per line, ``#`` comments."""
    terms: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        term = line.strip()
        if term and not term.startswith("#"):
            terms.add(term.lower())
    return frozenset(terms)


def auto_stop_terms(
    streams: Sequence[TokenStream], max_doc_fraction: float
) -> frozenset[str]:
    """Terms whose document frequency exceeds ``max_doc_fraction`` of the
    streams; used to optionally extend the stoplist."""
    if not 0.0 < max_doc_fraction <= 1.0:
        raise ValidationError(
            f"max_doc_fraction must be in (0, 1], got {max_doc_fraction}"
        )
    n = len(streams)
    if n == 0:
        return frozenset()
    df: Counter[str] = Counter()
    for stream in streams:
        df.update(set(stream.tokens))
    return frozenset(t for t, d in df.items() if d / n > max_doc_fraction)


def remove_stopwords(
    stream: TokenStream, stoplist: frozenset[str] | set[str]
) -> TokenStream:
    """Drop stoplisted tokens, preserving the order of survivors.

    Idempotent: a second pass with the same list changes nothing.
    """
    return TokenStream(
        stream.doc_id, tuple(t for t in stream.tokens if t not in stoplist)
    )


@dataclass(frozen=True)
class UniquenessStats:
    """Per-document token statistics averaged over a corpus."""

    mean_tokens: float
    mean_unique: float
    unique_ratio: float  # mean of per-document unique/total ratios

    @property
    def ratio_of_means(self) -> float:
        return self.mean_unique / self.mean_tokens


def uniqueness_stats(streams: Sequence[TokenStream]) -> UniquenessStats:
    """Mean token count, mean distinct-term count and the mean per-document
    unique/total ratio. Zero-token documents count toward the means but are
    excluded from the ratio mean (their ratio is undefined)."""
    if not streams:
        raise UndefinedStatisticError("no token streams given")
    totals = [len(s.tokens) for s in streams]
    uniques = [len(set(s.tokens)) for s in streams]
    ratios = [u / t for u, t in zip(uniques, totals) if t > 0]
    if not ratios:
        raise UndefinedStatisticError("every token stream is empty")
    return UniquenessStats(
        mean_tokens=sum(totals) / len(streams),
        mean_unique=sum(uniques) / len(streams),
        unique_ratio=sum(ratios) / len(ratios),
    )


@dataclass(frozen=True, eq=False)
class Vocabulary:
    """Corpus vocabulary, ordered by descending total frequency then term.

    ``index`` is a bijection term -> column position consistent with
    ``terms``.
    """

    terms: tuple[str, ...]
    index: dict[str, int]
    doc_frequency: dict[str, int]
    total_frequency: dict[str, int]

    def __len__(self) -> int:
        return len(self.terms)


def build_vocabulary(
    streams: Sequence[TokenStream],
    min_total_frequency: int = DEFAULT_MIN_TERM_FREQUENCY,
) -> Vocabulary:
    """Collect every term whose corpus-wide count reaches the threshold."""
    if min_total_frequency < 1:
        raise ValidationError(
            f"min_total_frequency must be >= 1, got {min_total_frequency}"
        )
    totals: Counter[str] = Counter()
    df: Counter[str] = Counter()
    for stream in streams:
        totals.update(stream.tokens)
        df.update(set(stream.tokens))
    kept = [t for t, c in totals.items() if c >= min_total_frequency]
    if not kept:
        raise ConfigError(
            f"vocabulary is empty at min_total_frequency={min_total_frequency}"
        )
    kept.sort(key=lambda t: (-totals[t], t))
    return Vocabulary(
        terms=tuple(kept),
        index={t: i for i, t in enumerate(kept)},
        doc_frequency={t: df[t] for t in kept},
        total_frequency={t: totals[t] for t in kept},
    )


def _subset_vocabulary(vocab: Vocabulary, keep: Sequence[str]) -> Vocabulary:
    """Restrict a vocabulary to ``keep`` (order preserved, stats carried)."""
    return Vocabulary(
        terms=tuple(keep),
        index={t: i for i, t in enumerate(keep)},
        doc_frequency={t: vocab.doc_frequency[t] for t in keep},
        total_frequency={t: vocab.total_frequency[t] for t in keep},
    )


@dataclass(frozen=True, eq=False)
class DocTermMatrix:
    """Sparse counts with marginals; rows are documents, columns terms.

    Invariants (checked at construction time by the builders): marginals
    equal the row/column sums, the grand total equals the sum of all
    counts, and no row or column is all zero.
    """

    rows: tuple[str, ...]
    vocabulary: Vocabulary
    counts: sparse.csr_matrix
    row_margins: np.ndarray
    col_margins: np.ndarray
    grand_total: int
    pruned_rows: tuple[str, ...] = ()
    pruned_terms: tuple[str, ...] = ()

    @property
    def terms(self) -> tuple[str, ...]:
        return self.vocabulary.terms

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape


def build_dtm(streams: Sequence[TokenStream], vocab: Vocabulary) -> DocTermMatrix:
    """Count term occurrences per document over the vocabulary columns.

    Documents whose row comes out all zero (every token out of vocabulary)
    are pruned and reported in ``pruned_rows``; vocabulary terms absent
    from every stream are likewise pruned into ``pruned_terms`` so the
    matrix never carries an all-zero row or column.
    """
    if len(vocab) == 0:
        raise ValidationError("vocabulary is empty")
    data: list[int] = []
    indices: list[int] = []
    indptr: list[int] = [0]
    kept_rows: list[str] = []
    pruned: list[str] = []
    for stream in streams:
        counts = Counter(t for t in stream.tokens if t in vocab.index)
        if not counts:
            pruned.append(stream.doc_id)
            continue
        cols = sorted(vocab.index[t] for t in counts)
        by_col = {vocab.index[t]: c for t, c in counts.items()}
        indices.extend(cols)
        data.extend(by_col[c] for c in cols)
        indptr.append(len(indices))
        kept_rows.append(stream.doc_id)
    if not kept_rows:
        raise EmptyMatrixError("every document row was pruned (all tokens OOV)")

    matrix = sparse.csr_matrix(
        (np.asarray(data, dtype=np.int64), indices, indptr),
        shape=(len(kept_rows), len(vocab)),
    )
    col_margins = np.asarray(matrix.sum(axis=0)).ravel()
    dead_cols = np.flatnonzero(col_margins == 0)
    pruned_terms: tuple[str, ...] = ()
    if dead_cols.size:
        keep_mask = col_margins > 0
        pruned_terms = tuple(vocab.terms[j] for j in dead_cols)
        vocab = _subset_vocabulary(
            vocab, [t for t, k in zip(vocab.terms, keep_mask) if k]
        )
        matrix = sparse.csr_matrix(matrix[:, keep_mask])
        col_margins = col_margins[keep_mask]

    row_margins = np.asarray(matrix.sum(axis=1)).ravel()
    return DocTermMatrix(
        rows=tuple(kept_rows),
        vocabulary=vocab,
        counts=matrix,
        row_margins=row_margins,
        col_margins=col_margins,
        grand_total=int(matrix.sum()),
        pruned_rows=tuple(pruned),
        pruned_terms=pruned_terms,
    )


class WeightScheme(str, Enum):
    RELATIVE_FREQUENCY = "relative-frequency"
    TF_IDF = "tf-idf"
    ENTROPY = "entropy"


@dataclass(frozen=True, eq=False)
class WeightedMatrix:
    """Real-valued reweighting of a DocTermMatrix (same shape and labels)."""

    rows: tuple[str, ...]
    vocabulary: Vocabulary
    values: sparse.csr_matrix
    scheme: WeightScheme

    @property
    def terms(self) -> tuple[str, ...]:
        return self.vocabulary.terms


def weight_matrix(dtm: DocTermMatrix, scheme: WeightScheme) -> WeightedMatrix:
    """Apply a weighting scheme to the counts.

    relative-frequency : f_ij / f_i. (each row sums to 1)
    tf-idf             : (f_ij / f_i.) * ln(N / df_j)
    entropy            : ln(1 + f_ij) * (1 + sum_i(p_ij ln p_ij) / ln N)
                         with p_ij = f_ij / f_.j and 0 ln 0 = 0

    The sparsity pattern is preserved or shrunk (weights may reach zero,
    e.g. a term present in every document under tf-idf), never grown.
    """
    scheme = WeightScheme(scheme)
    coo = dtm.counts.tocoo()
    f = coo.data.astype(np.float64)
    ri, cj = coo.row, coo.col
    n_rows = len(dtm.rows)

    if scheme is WeightScheme.RELATIVE_FREQUENCY:
        vals = f / dtm.row_margins[ri]
    elif scheme is WeightScheme.TF_IDF:
        if n_rows == 1:
            raise DegenerateCorpusError("tf-idf is undefined for a single document")
        df = np.bincount(cj, minlength=len(dtm.terms))
        vals = (f / dtm.row_margins[ri]) * np.log(n_rows / df[cj])
    else:
        if n_rows == 1:
            raise DegenerateCorpusError("entropy weighting is undefined for a single document")
        p = f / dtm.col_margins[cj]
        ent = np.zeros(len(dtm.terms))
        np.add.at(ent, cj, p * np.log(p))
        factor = np.maximum(1.0 + ent / np.log(n_rows), 0.0)
        vals = np.log1p(f) * factor[cj]

    values = sparse.csr_matrix((vals, (ri, cj)), shape=dtm.counts.shape)
    values.eliminate_zeros()
    return WeightedMatrix(dtm.rows, dtm.vocabulary, values, scheme)


# ---------------------------------------------------------------------------
# On-disk formats (TSV, documented in the README)
# ---------------------------------------------------------------------------


def write_vocabulary_tsv(vocab: Vocabulary, dest: str | Path | IO[str]) -> None:
    lines = ["term\ttotal_frequency\tdoc_frequency\n"]
    lines += [
        f"{t}\t{vocab.total_frequency[t]}\t{vocab.doc_frequency[t]}\n"
        for t in vocab.terms
    ]
    _write_text(dest, "".join(lines))


def read_vocabulary_tsv(src: str | Path | IO[str]) -> Vocabulary:
    text = _read_text(src)
    terms: list[str] = []
    totals: dict[str, int] = {}
    dfs: dict[str, int] = {}
    for line in text.splitlines()[1:]:
        term, total, df = line.split("\t")
        terms.append(term)
        totals[term] = int(total)
        dfs[term] = int(df)
    return Vocabulary(
        terms=tuple(terms),
        index={t: i for i, t in enumerate(terms)},
        doc_frequency=dfs,
        total_frequency=totals,
    )


def write_counts_tsv(
    rows: Sequence[str],
    terms: Sequence[str],
    matrix: sparse.spmatrix,
    dest: str | Path | IO[str],
    value_name: str = "count",
) -> None:
    """Sparse triplet dump (doc_id, term, value), row-major order."""
    csr = sparse.csr_matrix(matrix)
    csr.sort_indices()
    out = [f"doc_id\tterm\t{value_name}\n"]
    for i, doc_id in enumerate(rows):
        start, end = csr.indptr[i], csr.indptr[i + 1]
        for j, v in zip(csr.indices[start:end], csr.data[start:end]):
            value = int(v) if value_name == "count" else repr(float(v))
            out.append(f"{doc_id}\t{terms[j]}\t{value}\n")
    _write_text(dest, "".join(out))


def read_counts_tsv(
    src: str | Path | IO[str],
) -> tuple[list[str], list[tuple[str, str, float]]]:
    """Read a triplet dump; returns (row ids in first-appearance order,
    triplets)."""
    text = _read_text(src)
    rows: list[str] = []
    seen: set[str] = set()
    triplets: list[tuple[str, str, float]] = []
    for line in text.splitlines()[1:]:
        doc_id, term, value = line.split("\t")
        if doc_id not in seen:
            seen.add(doc_id)
            rows.append(doc_id)
        triplets.append((doc_id, term, float(value)))
    return rows, triplets


def dtm_from_triplets(
    rows: Sequence[str],
    vocab: Vocabulary,
    triplets: Iterable[tuple[str, str, float]],
    pruned_rows: Sequence[str] = (),
) -> DocTermMatrix:
    """Rebuild a DocTermMatrix from a triplet dump and its vocabulary."""
    row_index = {r: i for i, r in enumerate(rows)}
    data, ris, cjs = [], [], []
    for doc_id, term, value in triplets:
        data.append(int(value))
        ris.append(row_index[doc_id])
        cjs.append(vocab.index[term])
    matrix = sparse.csr_matrix(
        (np.asarray(data, dtype=np.int64), (ris, cjs)),
        shape=(len(rows), len(vocab)),
    )
    return DocTermMatrix(
        rows=tuple(rows),
        vocabulary=vocab,
        counts=matrix,
        row_margins=np.asarray(matrix.sum(axis=1)).ravel(),
        col_margins=np.asarray(matrix.sum(axis=0)).ravel(),
        grand_total=int(matrix.sum()),
        pruned_rows=tuple(pruned_rows),
    )


def _write_text(dest: str | Path | IO[str], text: str) -> None:
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="utf-8")
    else:
        dest.write(text)


def _read_text(src: str | Path | IO[str]) -> str:
    if isinstance(src, (str, Path)):
        return Path(src).read_text(encoding="utf-8")
    return src.read()
