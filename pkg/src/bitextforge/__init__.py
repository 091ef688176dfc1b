"""bitextforge: turn extracted bilingual documents into a cleaned, sentence-aligned corpus."""

__version__ = "0.1.0"

from .clean import CleanReport, PairCleaner, clean_pairs  # noqa: E402
from .corpus import (  # noqa: E402
    CorpusStats,
    ParallelCorpus,
    SentencePair,
    TextDocument,
    compute_stats,
    read_corpus,
    tokenize,
    write_corpus,
)
from .docalign import DocAlignResult, DocumentPair, align_documents, score_pair  # noqa: E402
from .langid import (  # noqa: E402
    LanguageDetector,
    LanguagePrediction,
    LanguageProfile,
    detect_file,
    detect_string,
    load_default_profiles,
    train_profile,
)
from .normalize import NormalizationReport, UnicodeNormalizer, normalize_text  # noqa: E402
from .pipeline import ConfigError, PipelineConfig, run_pipeline  # noqa: E402
from .sentalign import (  # noqa: E402
    AlignmentLink,
    BeadCostModel,
    align_sentences,
    bead_cost,
    brute_force_align,
)
from .splitter import AbbreviationLexicon, SentenceList, SentenceSplitter, split_editable, split_line, split_pdf_text  # noqa: E402
