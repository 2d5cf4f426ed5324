"""The five query-understanding operations: routing, decomposition,
refinement, relevance judgment, and ending judgment.

Each operation is one prompt render, at most one backend call, and a
strict parse. Parsers raise typed errors on non-conforming output; the
pipeline owns the fallback policies.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

from .corpus import Passage
from .errors import (
    DecompositionParseError,
    EndingParseError,
    RefinementError,
    RelevanceParseError,
    RoutingParseError,
)
from .gateway import Backend
from .prompts import render_prompt, render_thought


class QueryClass(str, Enum):
    STRAIGHTFORWARD = "straightforward"
    SINGLE = "single"
    COMPOUND = "compound"
    COMPLEX = "complex"


@dataclass(frozen=True)
class SubQuery:
    text: str
    index: int

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("sub-query text must be non-empty")
        if self.index < 1:
            raise ValueError("sub-query index must be >= 1")


@dataclass
class StepRecord:
    seed: SubQuery
    answer: str
    passages_used: list[str] = field(default_factory=list)


@dataclass
class ReasoningTrace:
    steps: list[StepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def append(self, record: StepRecord) -> None:
        self.steps.append(record)

    def pairs(self) -> list[tuple[str, str]]:
        return [(s.seed.text, s.answer) for s in self.steps]

    def thought(self) -> str:
        return render_thought(self.pairs())


_LABELS = {
    "straightforward": QueryClass.STRAIGHTFORWARD,
    "straightforward question": QueryClass.STRAIGHTFORWARD,
    "single": QueryClass.SINGLE,
    "single-step": QueryClass.SINGLE,
    "single step": QueryClass.SINGLE,
    "single-step question": QueryClass.SINGLE,
    "single step question": QueryClass.SINGLE,
    "compound": QueryClass.COMPOUND,
    "compound question": QueryClass.COMPOUND,
    "complex": QueryClass.COMPLEX,
    "complex question": QueryClass.COMPLEX,
}

_EDGE_PUNCT = re.compile(r"^[\s\.\,\:\;\!\?\"\'`]+|[\s\.\,\:\;\!\?\"\'`]+$")


def _clean(output: str) -> str:
    return _EDGE_PUNCT.sub("", output).lower()


def route(backend: Backend, query: str) -> QueryClass:
    """Classify a query into one of the four handling categories."""
    if not query.strip():
        raise ValueError("query must be non-empty")
    output = backend.complete(render_prompt("router", {"your_query": query}))
    label = _LABELS.get(_clean(output))
    if label is None:
        raise RoutingParseError(f"unrecognized routing label: {output!r}")
    return label


def _parse_json_object(output: str) -> dict:
    text = output.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    # tolerate surrounding chatter by trying the outermost brace span
    start, end = text.find("{"), text.rfind("}")
    if 0 <= start < end:
        try:
            return json.loads(text[start:end + 1])
        except json.JSONDecodeError:
            pass
    raise DecompositionParseError(f"not a JSON object: {output!r}")


def decompose(backend: Backend, query: str) -> list[SubQuery]:
    """Split a compound query into its sub-questions (JSON array order)."""
    output = backend.complete(render_prompt("decomposer", {"your_query": query}))
    payload = _parse_json_object(output)
    if "decomposition" not in payload:
        raise DecompositionParseError("missing 'decomposition' key")
    items = payload["decomposition"]
    if not isinstance(items, list) or not items:
        raise DecompositionParseError("'decomposition' must be a non-empty list")
    sub_queries = []
    for i, item in enumerate(items, start=1):
        if not isinstance(item, str) or not item.strip():
            raise DecompositionParseError(f"sub-query {i} is empty or not a string")
        sub_queries.append(SubQuery(text=item.strip(), index=i))
    return sub_queries


def refine(backend: Backend, query: str, trace: ReasoningTrace) -> SubQuery:
    """Produce the next seed question given the completed steps so far."""
    output = backend.complete(
        render_prompt(
            "refiner", {"your_query": query, "your_thought": trace.thought()}
        )
    )
    text = output.strip()
    if not text:
        raise RefinementError("refiner returned empty output")
    return SubQuery(text=text, index=len(trace) + 1)


def judge_relevance(backend: Backend, query: str, passage: Passage) -> bool:
    """True iff the passage is judged useful for answering the query."""
    output = backend.complete(
        render_prompt(
            "relevance",
            {"your_query": query, "your_doc": passage.rendered_text()},
        )
    )
    cleaned = _clean(output)
    if cleaned == "true":
        return True
    if cleaned == "false":
        return False
    raise RelevanceParseError(f"expected true/false, got {output!r}")


def judge_ending(backend: Backend, query: str, trace: ReasoningTrace) -> bool:
    """True iff the trace already suffices to answer the query.

    An empty trace is never "finished"; no backend call is made for it.
    """
    if len(trace) == 0:
        return False
    output = backend.complete(
        render_prompt(
            "ending", {"your_query": query, "your_thought": trace.thought()}
        )
    )
    cleaned = _clean(output)
    if cleaned == "yes":
        return True
    if cleaned == "no":
        return False
    raise EndingParseError(f"expected yes/no, got {output!r}")
