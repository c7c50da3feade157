"""Text mining and classification of multi-book corpora.

Thin wrapper over the C++ core: corpus loading, preprocessing, document-term
matrices, distance analysis, four classifiers and cross-validation.
"""

from ._canon import (
    Book,
    CanonError,
    Corpus,
    DocTermMatrix,
    Document,
    Linkage,
    Measure,
    Model,
    book_linkage,
    build_dtm,
    cross_validate,
    frequencies,
    load_corpus,
    make_folds,
    measure_correlation,
    metric_violations,
    pairwise,
    predict,
    preprocess,
    scores,
    sentences,
    stem,
    tokenize,
    train,
)

__all__ = [
    "Book",
    "CanonError",
    "Corpus",
    "DocTermMatrix",
    "Document",
    "Linkage",
    "Measure",
    "Model",
    "book_linkage",
    "build_dtm",
    "cross_validate",
    "frequencies",
    "load_corpus",
    "make_folds",
    "measure_correlation",
    "metric_violations",
    "pairwise",
    "predict",
    "preprocess",
    "scores",
    "sentences",
    "stem",
    "tokenize",
    "train",
]
