"""Static detection of design smells in feedforward/convolutional Keras models."""

from .decorate import decorate
from .engine import Attr, Const, Guard, Match, Pattern, PNode, Rule, apply, find_matches, run_to_fixpoint
from .errors import (
    EmptyModel,
    FnnlintError,
    IoError,
    LexError,
    NoModelFound,
    ParseError,
    SchemaError,
    StaleMatch,
    UnknownCode,
    UnsupportedExtension,
    UsageError,
    VersionError,
)
from .frontend import ExtractionDiagnostic, extract_from_path, extract_model
from .graph import TypedGraph, TypeGraph, to_dot
from .irjson import load_ir_json, save_ir_json
from .lexer import SourceToken, Tok, tokenize
from .model import (
    LayerKind,
    LayerRecord,
    Learner,
    ModelIR,
    SourceSpan,
    Violation,
    analysis_metamodel,
    build_graph,
    builtin_metamodel,
    check_conformance,
)
from .pipeline import Analysis, analyze
from .report import Finding, Report, collect_findings, parse_report_json, render_json, render_text
from .smells import CATALOGUE, SmellCode, default_ruleset
from .thresholds import Thresholds

__version__ = "0.1.0"
