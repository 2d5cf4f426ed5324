"""Answer metrics (EM / F1 / Acc / Steps), dataset loading, and batch
evaluation reports.

All metrics share one normalization (lowercase, no punctuation, no
articles, collapsed whitespace); multi-reference golds take the max.
Compound ground truths join their entities with "&&" and are scored by
entity containment.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

from .errors import DatasetError
from .textnorm import normalize_answer

if TYPE_CHECKING:
    from .pipeline import QAEngine


@dataclass
class EvalExample:
    id: str
    question: str
    answers: list[str]
    hop_count: int | None = None
    gold_class: str | None = None

    def __post_init__(self):
        if not self.answers:
            raise DatasetError(f"example {self.id!r} has no answers")

    def is_compound(self) -> bool:
        if self.gold_class is not None:
            return self.gold_class == "compound"
        return any("&&" in a for a in self.answers)


def exact_match(prediction: str, answers: list[str]) -> int:
    pred = normalize_answer(prediction)
    return int(any(pred == normalize_answer(a) for a in answers))


def _f1_single(prediction: str, gold: str) -> float:
    pred_tokens = normalize_answer(prediction).split()
    gold_tokens = normalize_answer(gold).split()
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    overlap = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def f1(prediction: str, answers: list[str]) -> float:
    return max(_f1_single(prediction, a) for a in answers)


def acc_contains(prediction: str, answers: list[str]) -> int:
    pred = normalize_answer(prediction)
    return int(any(normalize_answer(a) in pred for a in answers))


def split_gold_entities(gold: str) -> list[str]:
    return [part.strip() for part in gold.split("&&") if part.strip()]


def compound_accuracy(prediction: str, gold_entities: list[str]) -> float:
    """Fraction of gold entities contained in the prediction."""
    if not gold_entities:
        raise DatasetError("compound accuracy needs at least one gold entity")
    pred = normalize_answer(prediction)
    hits = sum(1 for e in gold_entities if normalize_answer(e) in pred)
    return hits / len(gold_entities)


@dataclass
class MetricsReport:
    per_query: list[dict] = field(default_factory=list)
    count: int = 0
    em: float = 0.0  # percent
    f1: float = 0.0  # mean fraction
    acc: float = 0.0  # percent
    steps: float = 0.0

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "aggregates": {
                "em": self.em,
                "f1": self.f1,
                "acc": self.acc,
                "steps": self.steps,
            },
            "per_query": self.per_query,
        }

    def table(self) -> str:
        header = f"{'Count':>6}  {'EM':>7}  {'F1':>7}  {'Acc':>7}  {'Steps':>7}"
        row = (
            f"{self.count:>6}  {self.em:>7.2f}  {self.f1:>7.4f}  "
            f"{self.acc:>7.2f}  {self.steps:>7.2f}"
        )
        return header + "\n" + row


def load_dataset(path: str | Path, format: str = "jsonl") -> list[EvalExample]:
    """Load evaluation examples, preserving file order.

    Accepts either an ``answers`` list or an ``answer`` string with
    optional ``answer_aliases``.
    """
    if format != "jsonl":
        raise DatasetError(f"unsupported dataset format: {format!r}")
    examples: list[EvalExample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {line_number}: {exc}", line_number)
            if "question" not in record:
                raise DatasetError(f"line {line_number}: missing question", line_number)
            answers = record.get("answers")
            if answers is None and "answer" in record:
                answers = [record["answer"]] + list(record.get("answer_aliases", []))
            if not answers:
                raise DatasetError(f"line {line_number}: missing answers", line_number)
            examples.append(
                EvalExample(
                    id=str(record.get("id", line_number)),
                    question=str(record["question"]),
                    answers=[str(a) for a in answers],
                    hop_count=record.get("hop_count"),
                    gold_class=record.get("gold_class"),
                )
            )
    return examples


def score_example(example: EvalExample, prediction: str, steps: int) -> dict:
    row = {
        "id": example.id,
        "em": exact_match(prediction, example.answers),
        "f1": f1(prediction, example.answers),
        "steps": steps,
    }
    if example.is_compound():
        entities = split_gold_entities(example.answers[0])
        row["acc"] = compound_accuracy(prediction, entities)
    else:
        row["acc"] = acc_contains(prediction, example.answers)
    return row


def evaluate(
    examples: list[EvalExample],
    engine: "QAEngine",
    max_workers: int = 4,
) -> MetricsReport:
    """Run the pipeline on every example and aggregate the metrics."""
    if not examples:
        raise DatasetError("no examples")

    def run(example: EvalExample) -> dict:
        result = engine.answer(example.question)
        row = score_example(example, result.answer, result.steps)
        row["class"] = result.query_class.value
        errors = [w for w in result.warnings if w.startswith("error:")]
        if errors:
            row.update(em=0, f1=0.0, acc=0)
            row["error"] = errors[0]
        return row

    if max_workers > 1 and len(examples) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(run, examples))
    else:
        rows = [run(e) for e in examples]

    n = len(rows)
    return MetricsReport(
        per_query=rows,
        count=n,
        em=100.0 * sum(r["em"] for r in rows) / n,
        f1=sum(r["f1"] for r in rows) / n,
        acc=100.0 * sum(r["acc"] for r in rows) / n,
        steps=sum(r["steps"] for r in rows) / n,
    )
