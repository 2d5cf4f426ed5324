"""Adaptive multi-hop retrieval-augmented question answering.

Routes each query into one of four handling strategies (direct answer,
single filtered retrieval, parallel sub-query retrieval, iterative seed
refinement), with BM25 retrieval, LLM-judged noise filtering, evaluation
metrics, and synthetic benchmark construction.
"""

from .corpus import Corpus, Passage, ingest
from .evaluation import (
    EvalExample,
    MetricsReport,
    acc_contains,
    compound_accuracy,
    evaluate,
    exact_match,
    f1,
    load_dataset,
)
from .gateway import GenParams, HttpBackend, ScriptedBackend, ScriptedOracle
from .llmops import QueryClass, ReasoningTrace, StepRecord, SubQuery
from .pipeline import AblationFlags, PipelineConfig, PipelineResult, QAEngine
from .retriever import RankedPassage, RetrievalConfig, build_index, retrieve, tokenize
from .textnorm import normalize_answer

__all__ = [
    "AblationFlags",
    "Corpus",
    "EvalExample",
    "GenParams",
    "HttpBackend",
    "MetricsReport",
    "Passage",
    "PipelineConfig",
    "PipelineResult",
    "QAEngine",
    "QueryClass",
    "RankedPassage",
    "ReasoningTrace",
    "RetrievalConfig",
    "ScriptedBackend",
    "ScriptedOracle",
    "StepRecord",
    "SubQuery",
    "acc_contains",
    "build_index",
    "compound_accuracy",
    "evaluate",
    "exact_match",
    "f1",
    "ingest",
    "load_dataset",
    "normalize_answer",
    "retrieve",
    "tokenize",
]

__version__ = "0.1.0"
