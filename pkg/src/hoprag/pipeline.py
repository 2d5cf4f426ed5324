"""Query answering pipelines.

``QAEngine.answer`` routes each query to one of four strategies:
  - straightforward: direct generation, no retrieval (0 steps);
  - single: one noise-filtered retrieve-generate cycle (1 step);
  - compound: decompose, answer sub-queries in parallel, merge (1 step);
  - complex: iterative seed refinement until the ending judge stops it.

``answer_iterative`` is the naive baseline that treats every query as
iterative, one retrieval per hop.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import llmops
from .corpus import Corpus
from .errors import (
    DecompositionParseError,
    EndingParseError,
    RefinementError,
    RelevanceParseError,
    RoutingParseError,
)
from .gateway import Backend
from .llmops import QueryClass, ReasoningTrace, StepRecord, SubQuery
from .prompts import render_doc_list, render_prompt
from .retriever import Index, RetrievalConfig, build_index, retrieve

logger = logging.getLogger(__name__)


@dataclass
class AblationFlags:
    relevance_filter_enabled: bool = True
    ending_check_enabled: bool = True
    refiner_enabled: bool = True


@dataclass
class PipelineConfig:
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    max_steps: int = 5
    ablation: AblationFlags = field(default_factory=AblationFlags)
    parallel_subqueries: bool = True
    max_workers: int = 4

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class PipelineResult:
    answer: str
    query_class: QueryClass
    steps: int
    trace: ReasoningTrace = field(default_factory=ReasoningTrace)
    sub_results: list[tuple[SubQuery, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self, query: str = "") -> dict:
        return {
            "query": query,
            "class": self.query_class.value,
            "steps": self.steps,
            "answer": self.answer,
            "trace": [
                {
                    "seed": s.seed.text,
                    "answer": s.answer,
                    "passages_used": list(s.passages_used),
                }
                for s in self.trace.steps
            ],
            "sub_results": [
                {"sub_query": sq.text, "answer": ans} for sq, ans in self.sub_results
            ],
            "warnings": list(self.warnings),
        }


def _pair_doc(seed: str, answer: str) -> str:
    return f"sub-question: {seed}\nanswer: {answer}"


class QAEngine:
    """Binds a corpus, its BM25 index, a completion backend, and config."""

    def __init__(
        self,
        corpus: Corpus,
        backend: Backend,
        config: PipelineConfig | None = None,
        index: Index | None = None,
    ):
        self.corpus = corpus
        self.backend = backend
        self.config = config or PipelineConfig()
        self.index = index if index is not None else build_index(corpus)

    # -- single noise-filtered retrieve-generate cycle ----------------------

    def single_step_answer(
        self, question: str, warnings: list[str] | None = None
    ) -> tuple[str, list[str], list[str]]:
        """Retrieve, filter noise, generate.

        Returns (answer, passage ids used as context, passage ids filtered
        out as irrelevant).
        """
        cfg = self.config
        candidates = retrieve(
            self.index,
            self.corpus,
            question,
            cfg.retrieval.top_k_retrieve,
            k1=cfg.retrieval.k1,
            b=cfg.retrieval.b,
        )
        filtered_out: list[str] = []
        if cfg.ablation.relevance_filter_enabled:
            kept = []
            for ranked, is_rel in zip(
                candidates, self._judge_all(question, candidates)
            ):
                if is_rel:
                    kept.append(ranked)
                else:
                    filtered_out.append(ranked.passage.id)
            if candidates and not kept and warnings is not None:
                warnings.append("all_filtered")
            context = kept[: cfg.retrieval.top_k_context]
        else:
            context = candidates[: cfg.retrieval.top_k_context]
        prompt = render_prompt(
            "generator",
            {
                "your_query": question,
                "your_doc_list": render_doc_list(
                    [r.passage.rendered_text() for r in context]
                ),
            },
        )
        answer = self.backend.complete(prompt).strip()
        return answer, [r.passage.id for r in context], filtered_out

    def _judge_all(self, question, candidates) -> list[bool]:
        def judge(ranked) -> bool:
            try:
                return llmops.judge_relevance(self.backend, question, ranked.passage)
            except RelevanceParseError:
                logger.warning(
                    "unparseable relevance verdict for %s; treating as irrelevant",
                    ranked.passage.id,
                )
                return False

        if len(candidates) <= 1:
            return [judge(r) for r in candidates]
        with ThreadPoolExecutor(max_workers=self.config.max_workers) as pool:
            return list(pool.map(judge, candidates))

    # -- four-way dispatch ---------------------------------------------------

    def answer(self, query: str) -> PipelineResult:
        warnings: list[str] = []
        cls = QueryClass.COMPLEX
        try:
            try:
                cls = llmops.route(self.backend, query)
            except RoutingParseError:
                warnings.append("routing_parse_failed")
            if cls is QueryClass.STRAIGHTFORWARD:
                return self._answer_straightforward(query, warnings)
            if cls is QueryClass.SINGLE:
                return self._answer_single(query, warnings)
            if cls is QueryClass.COMPOUND:
                return self.answer_compound(query, warnings)
            return self.answer_complex(query, warnings)
        except Exception as exc:  # per-query failures never abort a run
            logger.warning("pipeline error for %r: %s", query, exc)
            warnings.append(f"error: {exc}")
            return PipelineResult(
                answer="", query_class=cls, steps=0, warnings=warnings
            )

    def _answer_straightforward(self, query, warnings) -> PipelineResult:
        prompt = render_prompt(
            "generator", {"your_query": query, "your_doc_list": ""}
        )
        answer = self.backend.complete(prompt).strip()
        return PipelineResult(
            answer=answer,
            query_class=QueryClass.STRAIGHTFORWARD,
            steps=0,
            warnings=warnings,
        )

    def _answer_single(self, query, warnings) -> PipelineResult:
        answer, used, _ = self.single_step_answer(query, warnings)
        trace = ReasoningTrace(
            [StepRecord(seed=SubQuery(query, 1), answer=answer, passages_used=used)]
        )
        return PipelineResult(
            answer=answer,
            query_class=QueryClass.SINGLE,
            steps=1,
            trace=trace,
            warnings=warnings,
        )

    def answer_compound(self, query: str, warnings: list[str] | None = None) -> PipelineResult:
        warnings = warnings if warnings is not None else []
        try:
            sub_queries = llmops.decompose(self.backend, query)
        except DecompositionParseError:
            warnings.append("decomposition_failed")
            result = self._answer_single(query, warnings)
            return PipelineResult(
                answer=result.answer,
                query_class=QueryClass.COMPOUND,
                steps=1,
                trace=result.trace,
                warnings=warnings,
            )

        def run(sq: SubQuery) -> tuple[str, list[str]]:
            answer, used, _ = self.single_step_answer(sq.text, warnings)
            return answer, used

        if self.config.parallel_subqueries and len(sub_queries) > 1:
            with ThreadPoolExecutor(max_workers=self.config.max_workers) as pool:
                outcomes = list(pool.map(run, sub_queries))
            steps = 1
        else:
            outcomes = [run(sq) for sq in sub_queries]
            steps = 1 if self.config.parallel_subqueries else len(sub_queries)

        trace = ReasoningTrace(
            [
                StepRecord(seed=sq, answer=ans, passages_used=used)
                for sq, (ans, used) in zip(sub_queries, outcomes)
            ]
        )
        sub_results = [(sq, ans) for sq, (ans, _) in zip(sub_queries, outcomes)]
        if len(sub_queries) == 1:
            final = sub_results[0][1]
        else:
            final = self._aggregate(query, trace)
        return PipelineResult(
            answer=final,
            query_class=QueryClass.COMPOUND,
            steps=steps,
            trace=trace,
            sub_results=sub_results,
            warnings=warnings,
        )

    def answer_complex(self, query: str, warnings: list[str] | None = None) -> PipelineResult:
        warnings = warnings if warnings is not None else []
        trace = self._iterate(query, warnings)
        final = self._aggregate(query, trace) if trace.steps else ""
        return PipelineResult(
            answer=final,
            query_class=QueryClass.COMPLEX,
            steps=len(trace),
            trace=trace,
            warnings=warnings,
        )

    def _iterate(self, query: str, warnings: list[str]) -> ReasoningTrace:
        """The shared retrieve-generate loop (complex queries and baseline)."""
        cfg = self.config
        trace = ReasoningTrace()
        while True:
            if cfg.ablation.ending_check_enabled and self._is_ended(query, trace):
                break
            if len(trace) >= cfg.max_steps:
                if cfg.ablation.ending_check_enabled:
                    warnings.append("max_steps_exhausted")
                break
            if cfg.ablation.refiner_enabled:
                try:
                    seed = llmops.refine(self.backend, query, trace)
                except RefinementError:
                    warnings.append("refinement_failed")
                    seed = SubQuery(query, len(trace) + 1)
            else:
                seed = SubQuery(query, len(trace) + 1)
            answer, used, _ = self.single_step_answer(seed.text, warnings)
            trace.append(StepRecord(seed=seed, answer=answer, passages_used=used))
        return trace

    def _is_ended(self, query: str, trace: ReasoningTrace) -> bool:
        try:
            return llmops.judge_ending(self.backend, query, trace)
        except EndingParseError:
            logger.warning("unparseable ending verdict; continuing")
            return False

    def _aggregate(self, query: str, trace: ReasoningTrace) -> str:
        """Final generation over all (seed, answer) pairs."""
        prompt = render_prompt(
            "generator",
            {
                "your_query": query,
                "your_doc_list": render_doc_list(
                    [_pair_doc(seed, ans) for seed, ans in trace.pairs()]
                ),
            },
        )
        return self.backend.complete(prompt).strip()

    # -- naive iterative baseline ---------------------------------------------

    def answer_iterative(self, query: str) -> PipelineResult:
        """Iterative retrieval for every query, no routing, no parallelism."""
        warnings: list[str] = []
        trace = self._iterate(query, warnings)
        final = self._aggregate(query, trace) if trace.steps else ""
        return PipelineResult(
            answer=final,
            query_class=QueryClass.COMPLEX,
            steps=len(trace),
            trace=trace,
            warnings=warnings,
        )
