"""Patent novelty search pipeline.

Builds claim/description training pairs from patents themselves, scores
candidate patents with a pluggable sequence-pair classifier, aggregates
per-piece results into per-patent density scores, and ranks a corpus
against a claim of interest.
"""

__version__ = "0.1.0"

from .classify import (ClassificationResult, LexicalBaseline,
                       RemoteClassifier, baseline_probability, classify_batch)
from .corpus import (Corpus, CorpusGroup, Patent, assign_groups,
                     filter_by_class, ingest, read_corpus, write_corpus)
from .errors import (ClassifierError, ConfigError, CorpusError,
                     EvaluationError, PairError, PipelineError, ProtocolError,
                     ScoringError, SearchError, SliceError, TransportError)
from .evaluation import (ConfusionCounts, PretestResult, XReport, XReportRow,
                         confusion_counts, f1_score, own_description_top1,
                         pretest, x_position_report, x_report_from_audits)
from .pairs import (AssembledPair, AssemblyConfig, PairInput,
                    build_negative_pairs, build_positive_pairs, assemble,
                    split_validation, write_pairs)
from .scoring import (PatentScore, Ranking, rank, score_patents,
                      write_ranking_csv, write_ranking_json)
from .search import (PieceResult, SearchJob, SearchOutcome,
                     build_query_inputs, position_of, ranking_from_audit,
                     read_audit, run_search, write_audit)
from .slicer import (DescriptionPiece, SliceConfig, slice_corpus,
                     slice_description, slice_patent)
from .synthetic import planted_corpus, random_corpus, toy_corpus
