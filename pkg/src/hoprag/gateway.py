"""Completion backends: a deterministic scripted oracle and a remote
OpenAI-compatible HTTP endpoint.

The scripted backend stands in for the fine-tuned judgment model in all
tests. It classifies each incoming prompt by its template, extracts the
embedded question (and document / thought block), builds a canonical
lookup key, and returns the scripted value. Key construction helpers are
public so fixtures and the backend always agree.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .corpus import Corpus
from .errors import BackendError, OracleMissError, PromptError
from .prompts import classify_prompt
from .textnorm import normalize_answer

_SEED_MARKER = re.compile(r"\*\*seed query-\d+\*\*")


@dataclass
class GenParams:
    max_tokens: int = 256
    temperature: float = 0.0
    stop: list[str] | None = None


DEFAULT_PARAMS = GenParams()


class Backend(Protocol):
    def complete(self, prompt: str, params: GenParams = DEFAULT_PARAMS) -> str: ...


# ---------------------------------------------------------------------------
# canonical lookup keys


def route_key(question: str) -> str:
    return normalize_answer(question)


def decompose_key(question: str) -> str:
    return "decompose::" + normalize_answer(question)


def refine_key(question: str, completed_steps: int) -> str:
    return f"refine::{normalize_answer(question)}::{completed_steps}"


def answer_key(question: str) -> str:
    return "answer::" + normalize_answer(question)


def aggregate_key(question: str) -> str:
    return "aggregate::" + normalize_answer(question)


def qa_key(title: str, doc_ref: str) -> str:
    return f"qa::{normalize_answer(title)}::{doc_ref}"


def compose_key(sub_questions: list[str]) -> str:
    return "compose::" + " && ".join(normalize_answer(q) for q in sub_questions)


def relevance_key(question: str, doc_ref: str) -> str:
    return f"{normalize_answer(question)}||{doc_ref}"


def ending_key(question: str, completed_steps: int) -> str:
    return f"{normalize_answer(question)}||{completed_steps}"


def make_decomposition(sub_questions: list[str], thought: str = "split") -> str:
    """Serialize a scripted decomposer output."""
    return json.dumps({"thought": thought, "decomposition": sub_questions})


# ---------------------------------------------------------------------------
# prompt field extraction


def _final_segment(prompt: str, marker: str) -> str:
    pos = prompt.rfind(marker)
    if pos < 0:
        raise PromptError(f"marker {marker!r} not found in prompt")
    return prompt[pos + len(marker):]


def _up_to(text: str, stop: str) -> str:
    pos = text.find(stop)
    return text if pos < 0 else text[:pos]


def extract_query(prompt: str) -> str:
    """The final Query: line of a router/decomposer prompt."""
    return _up_to(_final_segment(prompt, "\nQuery: "), "\nAnswer:").strip()


def extract_question_and_thought(prompt: str) -> tuple[str, str]:
    """Final Question plus fenced Thought block (refiner/ending prompts)."""
    segment = _final_segment(prompt, "\nQuestion: ")
    question = _up_to(segment, "\nThought:").strip()
    fence_open = segment.find("```")
    fence_close = segment.find("```", fence_open + 3)
    if fence_open < 0 or fence_close < 0:
        raise PromptError("thought block not fenced")
    thought = segment[fence_open + 3:fence_close].strip("\n")
    return question, thought


def extract_question_and_doc(prompt: str) -> tuple[str, str]:
    segment = _final_segment(prompt, "\nQuestion: ")
    question = _up_to(segment, "\nDoc: ").strip()
    doc = _up_to(_final_segment(segment, "\nDoc: "), "\nAnswer:").strip()
    return question, doc


def extract_question_and_docs(prompt: str) -> tuple[str, list[str]]:
    """Final Question plus Doc1..DocN contents of a generator prompt."""
    segment = _final_segment(prompt, "\nQuestion: ")
    question = segment.split("\n", 1)[0].strip()
    region = _up_to(segment, "\nAnswer:")
    docs = re.findall(r"^Doc\d+: ```(.*?)```$", region, re.MULTILINE | re.DOTALL)
    return question, docs


def extract_title_and_doc(prompt: str) -> tuple[str, str]:
    segment = _final_segment(prompt, "\nTitle: ")
    title = segment.split("\n", 1)[0].strip()
    doc = _up_to(_final_segment(segment, "\nDoc: "), "\nOutput:").strip()
    return title, doc


def extract_simple_questions(prompt: str) -> list[str]:
    region = _up_to(
        _final_segment(prompt, "irrelevant content:\n"), "\nCompound Question:"
    )
    return [q.strip() for q in re.findall(r"Simple Question\d+: ```(.*?)```", region)]


def count_thought_steps(thought: str) -> int:
    return len(_SEED_MARKER.findall(thought))


# ---------------------------------------------------------------------------
# scripted backend

ORACLE_KINDS = ("fact", "route", "relevance", "ending")


@dataclass
class ScriptedOracle:
    """Table-driven stand-in for the judgment/generation model."""

    facts: dict[str, str] = field(default_factory=dict)
    routes: dict[str, str] = field(default_factory=dict)
    relevance: dict[str, str] = field(default_factory=dict)
    ending: dict[str, str] = field(default_factory=dict)
    defaults: dict[str, str] = field(default_factory=dict)

    def add(self, kind: str, key: str, value: str) -> None:
        self._table(kind)[key] = value

    def _table(self, kind: str) -> dict[str, str]:
        if kind not in ORACLE_KINDS:
            raise ValueError(f"unknown oracle kind: {kind!r}")
        return {
            "fact": self.facts,
            "route": self.routes,
            "relevance": self.relevance,
            "ending": self.ending,
        }[kind]

    def lookup(self, kind: str, key: str) -> str:
        table = self._table(kind)
        if key in table:
            return table[key]
        if kind in self.defaults:
            return self.defaults[kind]
        raise OracleMissError(kind, key)

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ScriptedOracle":
        oracle = cls()
        with open(path, "r", encoding="utf-8") as fh:
            for line_number, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise BackendError(f"oracle file line {line_number}: {exc}")
                kind = record["kind"]
                if kind == "default":
                    oracle.defaults[record["key"]] = str(record["value"])
                else:
                    oracle.add(kind, record["key"], str(record["value"]))
        return oracle

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for kind in ORACLE_KINDS:
                for key, value in self._table(kind).items():
                    fh.write(
                        json.dumps(
                            {"kind": kind, "key": key, "value": value},
                            ensure_ascii=False,
                        )
                        + "\n"
                    )
            for kind, value in self.defaults.items():
                fh.write(
                    json.dumps(
                        {"kind": "default", "key": kind, "value": value},
                        ensure_ascii=False,
                    )
                    + "\n"
                )


class ScriptedBackend:
    """Pure function of (prompt, oracle tables); zero network activity.

    A corpus, when supplied, lets the backend map document text embedded
    in prompts back to passage ids, so relevance and QA-generation keys
    can be expressed in terms of passage ids.
    """

    def __init__(self, oracle: ScriptedOracle, corpus: Corpus | None = None):
        self.oracle = oracle
        self._doc_to_id: dict[str, str] = {}
        if corpus is not None:
            for passage in corpus:
                self._doc_to_id[passage.rendered_text()] = passage.id
                self._doc_to_id.setdefault(passage.text, passage.id)
        self.calls: list[tuple[str, str]] = []  # (template_id, key) per call
        self._lock = threading.Lock()

    def _doc_ref(self, doc: str) -> str:
        return self._doc_to_id.get(doc, normalize_answer(doc))

    def complete(self, prompt: str, params: GenParams = DEFAULT_PARAMS) -> str:
        template_id = classify_prompt(prompt)
        kind, key = self._resolve(template_id, prompt)
        with self._lock:
            self.calls.append((template_id, key))
        return self.oracle.lookup(kind, key)

    def _resolve(self, template_id: str, prompt: str) -> tuple[str, str]:
        if template_id == "router":
            return "route", route_key(extract_query(prompt))
        if template_id == "decomposer":
            return "fact", decompose_key(extract_query(prompt))
        if template_id == "refiner":
            question, thought = extract_question_and_thought(prompt)
            return "fact", refine_key(question, count_thought_steps(thought))
        if template_id == "relevance":
            question, doc = extract_question_and_doc(prompt)
            return "relevance", relevance_key(question, self._doc_ref(doc))
        if template_id == "ending":
            question, thought = extract_question_and_thought(prompt)
            return "ending", ending_key(question, count_thought_steps(thought))
        if template_id == "generator":
            question, docs = extract_question_and_docs(prompt)
            # answer aggregation renders sub-question/answer pairs as docs
            if docs and all(d.startswith("sub-question: ") for d in docs):
                return "fact", aggregate_key(question)
            return "fact", answer_key(question)
        if template_id == "single_qa_gen":
            title, doc = extract_title_and_doc(prompt)
            return "fact", qa_key(title, self._doc_ref(doc))
        if template_id == "compound_compose":
            return "fact", compose_key(extract_simple_questions(prompt))
        raise PromptError(f"unhandled template id: {template_id!r}")


# ---------------------------------------------------------------------------
# HTTP backend


class HttpBackend:
    """OpenAI-compatible chat-completions client with bounded retries."""

    def __init__(
        self,
        endpoint_url: str,
        model_name: str,
        api_key_env: str | None = None,
        max_parallel: int = 4,
        max_attempts: int = 3,
        backoff_seconds: float = 0.2,
        timeout: float = 60.0,
    ):
        import httpx

        self.endpoint_url = endpoint_url
        self.model_name = model_name
        self.max_attempts = max_attempts
        self.backoff_seconds = backoff_seconds
        self.timeout = timeout
        headers = {}
        if api_key_env:
            api_key = os.environ.get(api_key_env)
            if not api_key:
                raise BackendError(f"environment variable {api_key_env!r} is not set")
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(headers=headers, timeout=timeout)
        self._semaphore = threading.Semaphore(max_parallel)

    def complete(self, prompt: str, params: GenParams = DEFAULT_PARAMS) -> str:
        import httpx

        body = {
            "model": self.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        if params.stop:
            body["stop"] = params.stop
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff_seconds * (2 ** (attempt - 1)))
            try:
                with self._semaphore:
                    response = self._client.post(self.endpoint_url, json=body)
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = BackendError(f"server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"completion request failed: HTTP {response.status_code}"
                )
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as exc:
                raise BackendError(f"malformed completion response: {exc}")
        raise BackendError(f"transport failure after {self.max_attempts} attempts: {last_error}")

    def close(self) -> None:
        self._client.close()
