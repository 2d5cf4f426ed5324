"""Synthetic benchmark construction and trainer dataset emission.

Compound benchmark: sample entities from the corpus, generate one simple
question per passage, then combine 2-4 per entity into a compound
question whose ground truth joins the sub-answers with " && ". Splits are
disjoint by entity and by compound question.

Training sets: routing / decomposition / refinement / relevance / ending
records derived from provenance-labelled sources.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Passage
from .errors import GenerationError
from .gateway import Backend
from .prompts import render_prompt, render_simple_questions, render_thought
from .textnorm import normalize_answer

MAX_ANSWER_TOKENS = 8  # "a few words" validation threshold
MAX_PASSAGES_PER_ENTITY = 10
HOP_RANGE = (2, 3, 4)


@dataclass(frozen=True)
class EntityQA:
    entity: str
    passage_id: str
    question: str
    answer: str


@dataclass(frozen=True)
class CompoundExample:
    entity: str
    sub_questions: tuple[str, ...]
    sub_answers: tuple[str, ...]
    compound_question: str

    @property
    def hop_count(self) -> int:
        return len(self.sub_questions)

    @property
    def answer(self) -> str:
        return " && ".join(self.sub_answers)


def sample_entities(
    corpus: Corpus, n: int, rng_seed: int
) -> list[tuple[str, list[Passage]]]:
    """Sample n distinct entities (seeded, without replacement), each with
    up to 10 of its passages."""
    if n < 1:
        raise GenerationError("n must be >= 1")
    groups = corpus.entities()
    if len(groups) < n:
        raise GenerationError(
            f"cannot sample {n} entities: {len(groups)} available"
        )
    rng = random.Random(rng_seed)
    chosen = rng.sample(sorted(groups), n)
    return [(e, groups[e][:MAX_PASSAGES_PER_ENTITY]) for e in chosen]


def gen_single_qa(
    entity: str, passage: Passage, backend: Backend
) -> EntityQA | None:
    """Generate one simple question about the entity from one passage.

    Returns None (a counted rejection) when the output is malformed or
    the answer cannot be found in the passage.
    """
    output = backend.complete(
        render_prompt(
            "single_qa_gen", {"your_title": entity, "your_doc": passage.text}
        )
    )
    try:
        payload = json.loads(output.strip())
        question = str(payload["Question"]).strip()
        answer = str(payload["Answer"]).strip()
    except (json.JSONDecodeError, KeyError, TypeError):
        return None
    if not question or not answer:
        return None
    norm_answer = normalize_answer(answer)
    if not norm_answer or len(norm_answer.split()) > MAX_ANSWER_TOKENS:
        return None
    if norm_answer not in normalize_answer(passage.text):
        return None
    return EntityQA(entity=entity, passage_id=passage.id, question=question, answer=answer)


def compose_compound(
    qa_list: list[EntityQA], backend: Backend
) -> CompoundExample | None:
    """Combine 2-4 same-entity questions; None when the backend declines."""
    if not 2 <= len(qa_list) <= 4:
        raise GenerationError("compose_compound takes 2-4 questions")
    entities = {qa.entity for qa in qa_list}
    if len(entities) != 1:
        raise GenerationError("all questions must share one entity")
    output = backend.complete(
        render_prompt(
            "compound_compose",
            {
                "simple_questions": render_simple_questions(
                    [qa.question for qa in qa_list]
                )
            },
        )
    ).strip()
    if not output:
        raise GenerationError("empty compound composition output")
    if output.strip("`\"' .").lower() == "no":
        return None
    return CompoundExample(
        entity=qa_list[0].entity,
        sub_questions=tuple(qa.question for qa in qa_list),
        sub_answers=tuple(qa.answer for qa in qa_list),
        compound_question=output.strip("`").strip(),
    )


@dataclass
class BuildSummary:
    emitted: dict[str, int] = field(default_factory=dict)
    qa_rejections: int = 0
    compose_rejections: int = 0


def _write_jsonl(path: Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def build_benchmark(
    corpus: Corpus,
    counts: dict[str, int],
    rng_seed: int,
    backend: Backend,
    out_dir: str | Path,
) -> BuildSummary:
    """Emit train/dev/test compound-question files, disjoint by entity."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for split in ("train", "dev", "test"):
        if split not in counts:
            raise GenerationError(f"counts missing {split!r}")
    total_needed = sum(counts.values())

    groups = corpus.entities()
    entities = sample_entities(corpus, len(groups), rng_seed)
    summary = BuildSummary()
    pool: list[CompoundExample] = []
    seen_questions: set[str] = set()
    for i, (entity, passages) in enumerate(entities):
        if len(pool) >= total_needed:
            break
        qas = []
        for passage in passages:
            qa = gen_single_qa(entity, passage, backend)
            if qa is None:
                summary.qa_rejections += 1
            else:
                qas.append(qa)
        hop = HOP_RANGE[i % len(HOP_RANGE)]
        hop = min(hop, len(qas))
        if hop < 2:
            continue
        example = compose_compound(qas[:hop], backend)
        if example is None:
            summary.compose_rejections += 1
            continue
        if example.compound_question in seen_questions:
            continue
        seen_questions.add(example.compound_question)
        pool.append(example)

    if len(pool) < total_needed:
        raise GenerationError(
            f"pool exhausted: needed {total_needed}, generated {len(pool)} "
            f"(shortfall {total_needed - len(pool)})"
        )

    offset = 0
    for split in ("train", "dev", "test"):
        n = counts[split]
        records = []
        for j, example in enumerate(pool[offset:offset + n]):
            records.append(
                {
                    "id": f"{split}-{j}",
                    "question": example.compound_question,
                    "answers": [example.answer],
                    "hop_count": example.hop_count,
                    "gold_class": "compound",
                    "entity": example.entity,
                    "sub_questions": list(example.sub_questions),
                }
            )
        _write_jsonl(out_dir / f"{split}.jsonl", records)
        summary.emitted[split] = n
        offset += n
    return summary


# ---------------------------------------------------------------------------
# trainer datasets


@dataclass
class ReasoningChain:
    """A multi-hop question with its per-hop seed questions and answers."""

    question: str
    steps: list[tuple[str, str]]  # (seed question, answer)
    gold_passage_ids: list[str] = field(default_factory=list)


@dataclass
class TrainingSources:
    straightforward: list[str] = field(default_factory=list)
    single_hop: list[tuple[str, str, str]] = field(default_factory=list)  # (q, a, gold pid)
    chains: list[ReasoningChain] = field(default_factory=list)
    compounds: list[CompoundExample] = field(default_factory=list)


def build_training_sets(
    sources: TrainingSources,
    corpus: Corpus,
    rng_seed: int,
    out_dir: str | Path,
    negatives_per_positive: int = 1,
) -> dict[str, int | str]:
    """Emit the five task files; tasks whose source is missing are reported
    as errors in the returned summary instead of aborting the others."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(rng_seed)
    summary: dict[str, int | str] = {}

    routing: list[dict] = []
    for q in sources.straightforward:
        routing.append({"task": "routing", "query": q, "label": "straightforward"})
    for q, _, _ in sources.single_hop:
        routing.append({"task": "routing", "query": q, "label": "single"})
    for example in sources.compounds:
        routing.append(
            {"task": "routing", "query": example.compound_question, "label": "compound"}
        )
    for chain in sources.chains:
        routing.append({"task": "routing", "query": chain.question, "label": "complex"})
    _write_jsonl(out_dir / "routing.jsonl", routing)
    summary["routing"] = len(routing)

    decomposition = [
        {
            "task": "decomposition",
            "query": example.compound_question,
            "sub_questions": list(example.sub_questions),
        }
        for example in sources.compounds
    ]
    _write_jsonl(out_dir / "decomposition.jsonl", decomposition)
    summary["decomposition"] = len(decomposition)

    if sources.chains:
        refinement = []
        ending = []
        for chain in sources.chains:
            for i in range(len(chain.steps)):
                refinement.append(
                    {
                        "task": "refinement",
                        "query": chain.question,
                        "thought": render_thought(chain.steps[:i]),
                        "next_seed": chain.steps[i][0],
                    }
                )
            for i in range(1, len(chain.steps) + 1):
                ending.append(
                    {
                        "task": "ending",
                        "query": chain.question,
                        "thought": render_thought(chain.steps[:i]),
                        "is_ending": i == len(chain.steps),
                    }
                )
        _write_jsonl(out_dir / "refinement.jsonl", refinement)
        _write_jsonl(out_dir / "ending.jsonl", ending)
        summary["refinement"] = len(refinement)
        summary["ending"] = len(ending)
    else:
        summary["refinement"] = "error: no reasoning chains in sources"
        summary["ending"] = "error: no reasoning chains in sources"

    relevance: list[dict] = []
    all_ids = [p.id for p in corpus]
    pairs = list(sources.single_hop) + [
        (seed, answer, pid)
        for chain in sources.chains
        for (seed, answer), pid in zip(chain.steps, chain.gold_passage_ids)
    ]
    for question, _, gold_pid in pairs:
        if gold_pid not in corpus:
            continue
        relevance.append(
            {
                "task": "relevance",
                "query": question,
                "passage_id": gold_pid,
                "is_rel": True,
            }
        )
        negatives = [pid for pid in all_ids if pid != gold_pid]
        for pid in rng.sample(negatives, min(negatives_per_positive, len(negatives))):
            relevance.append(
                {
                    "task": "relevance",
                    "query": question,
                    "passage_id": pid,
                    "is_rel": False,
                }
            )
    _write_jsonl(out_dir / "relevance.jsonl", relevance)
    summary["relevance"] = len(relevance)
    return summary
