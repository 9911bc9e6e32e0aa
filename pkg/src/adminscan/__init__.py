"""Administrated-token detection and safe-administration governance tools."""

from .classify import (
    EvaluationReport,
    Label,
    LabeledSample,
    ModelKind,
    TrainedModel,
    classify_corpus,
    evaluate,
    kfold_split,
    select_best,
    train,
)
from .corpus import (
    CorpusManifest,
    SampleSpec,
    SourceUnit,
    flatten_multipart,
    ingest,
    select_sample,
    slovin,
    strip_comments,
)
from .features import (
    FeatureVector,
    SignatureRule,
    Witness,
    explain_features,
    extract_features,
    registry_dump,
)
from .governance import (
    GovEvent,
    GovernanceConfig,
    GovernanceState,
    TrusteeBoard,
    replay_events,
    replay_trace,
    run_scenario,
)
from .report import CorpusReport, render_json, render_text, summarize

__version__ = "0.1.0"
