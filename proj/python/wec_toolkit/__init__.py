"""Python access to the event coreference corpus toolkit.

The heavy lifting happens in the compiled ``_core`` module; records are
plain dicts and partitions are lists of lists of mention ids.
"""

from ._core import (
    ContractError,
    Error,
    InputError,
    __version__,
    agglomerate,
    agreement,
    conll_f1,
    corpus_stats,
    evaluate,
    extract,
    infobox_type,
    lemma_baseline,
    normalize_infobox_type,
    normalize_title,
    parse_page,
    tokenize,
    tune_threshold,
)

__all__ = [
    "ContractError",
    "Error",
    "InputError",
    "__version__",
    "agglomerate",
    "agreement",
    "conll_f1",
    "corpus_stats",
    "evaluate",
    "extract",
    "infobox_type",
    "lemma_baseline",
    "normalize_infobox_type",
    "normalize_title",
    "parse_page",
    "tokenize",
    "tune_threshold",
]
