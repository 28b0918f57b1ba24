"""Pseudo quality-estimation dataset builder."""

from ._pseudoqe import (  # noqa: F401
    __version__,
    PseudoqeError,
    Aligner,
    build_mono,
    build_parallel,
    levenshtein_align,
    mock_noise_apply,
    mock_sentence_id,
    normalize,
    source_tags,
    symmetrize,
    ter_score,
    tokenize,
    train_aligner,
    word_tags,
)
