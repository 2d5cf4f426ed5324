"""Shared fixtures: scripted-oracle corpora for the worked examples, the
synthetic n-hop suites, the adversarial noise fixture, and the benchmark
generation corpus."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import pytest

from hoprag.corpus import Corpus, Passage
from hoprag.gateway import (
    ScriptedBackend,
    ScriptedOracle,
    aggregate_key,
    answer_key,
    compose_key,
    decompose_key,
    ending_key,
    make_decomposition,
    qa_key,
    refine_key,
    relevance_key,
    route_key,
)

# ---------------------------------------------------------------------------
# independent brute-force BM25 oracle (used only by tests)


def brute_force_scores(corpus, query, k1=1.2, b=0.75):
    """Score every passage from raw texts, no index involved."""
    toks = lambda s: re.findall(r"[^\W_]+", s.lower())
    docs = {p.id: toks(p.rendered_text()) for p in corpus}
    n = len(docs)
    avg = sum(len(t) for t in docs.values()) / n if n else 0.0
    query_terms = toks(query)
    df = {t: sum(1 for d in docs.values() if t in d) for t in set(query_terms)}
    scores = {}
    for pid, doc in docs.items():
        total = 0.0
        for term in query_terms:
            tf = doc.count(term)
            if tf == 0:
                continue
            idf = math.log((n - df[term] + 0.5) / (df[term] + 0.5) + 1.0)
            norm = 1.0 - b + b * len(doc) / avg
            total += idf * tf * (k1 + 1.0) / (tf + k1 * norm)
        scores[pid] = total
    return scores


def brute_force_ranking(corpus, query, k1=1.2, b=0.75):
    scores = brute_force_scores(corpus, query, k1, b)
    return sorted(
        ((pid, s) for pid, s in scores.items() if s > 0.0),
        key=lambda item: (-item[1], item[0]),
    )


# ---------------------------------------------------------------------------
# worked-example fixtures

SINGLE_Q = "Which English King was married to Edith Swan-Neck, also known as Edith the Fair?"

COMPOUND_Q = (
    "When did Lionel Cranfield, 3rd Earl of Middlesex succeed his brother "
    "James as Earl of Middlesex and who is his wife?"
)
COMPOUND_SUB1 = (
    "when did Lionel Cranfield, 3rd Earl of Middlesex succeed his brother "
    "James as Earl of Middlesex?"
)
COMPOUND_SUB2 = "who is Lionel Cranfield, 3rd Earl of Middlesex's wife?"

COMPLEX_Q = "What is the Danish Football Union an instance of?"
COMPLEX_SEED2 = "What does the FIFA stand for?"
COMPLEX_FINAL = "International Federation of Association Football"


def single_step_passages() -> list[Passage]:
    return [
        Passage(
            id="edith-wessex",
            title="Edith of Wessex",
            text=(
                "brother-in-law. Edith was originally named Gytha, but renamed "
                "Ealdgyth (or Edith) when she married King Edward the Confessor. "
                "Her brothers were Sweyn (c. 1020 - 1052), Harold (later Harold II) "
                "(c. 1022 - 1066), Tostig (c. 1026 - 1066), but Sweyn was the "
                "firstborn and Harold was the second son."
            ),
        ),
        Passage(
            id="edith-pargeter",
            title="Edith Pargeter",
            text=(
                "Edith Pargeter Edith Mary Pargeter, OBE, BEM (28 September 1913 - "
                "14 October 1995), also known by her nom de plume Ellis Peters. "
                "She was educated at Dawley Church of England School."
            ),
        ),
        Passage(
            id="edith-rigby",
            title="Edith Rigby",
            text=(
                "Edith Rigby Edith Rigby (nee Rayner) (18 October 1872 - 1948) was "
                "an English suffragette. She married Dr. Charles Rigby and lived."
            ),
        ),
    ]


def compound_passages() -> list[Passage]:
    return [
        Passage(
            id="lionel-succession",
            title="Lionel Cranfield, 3rd Earl of Middlesex",
            text=(
                "Lionel Cranfield, 3rd Earl of Middlesex succeeded his brother "
                "James as Earl of Middlesex in 1651 after James died without issue."
            ),
        ),
        Passage(
            id="lionel-wife",
            title="Lionel Cranfield marriage",
            text=(
                "Lionel Cranfield, 3rd Earl of Middlesex married Rachael, daughter "
                "of Francis Fane, 1st Earl of Westmorland."
            ),
        ),
    ]


def complex_passages() -> list[Passage]:
    return [
        Passage(
            id="futsal",
            title="Denmark national futsal team",
            text=(
                "The Denmark national futsal team is controlled by the Danish "
                "Football Association, the governing body for futsal in Denmark "
                "and represents the country in international futsal competitions, "
                "such as the FIFA Futsal World Cup and UEFA Futsal Championship."
            ),
        ),
        Passage(
            id="lyngby",
            title="Lyngby Boldklub",
            text=(
                "Lyngby Boldklub is a professional Danish football club founded "
                "in 1921. It is based at Lyngby Stadion in Kongens Lyngby, Denmark."
            ),
        ),
        Passage(
            id="hobro",
            title="Hobro IK",
            text="Hobro IK is a Danish professional football club based in Hobro.",
        ),
        Passage(
            id="fifa-hq",
            title="Switzerland",
            text=(
                "Swiss are fans of football and the national team is nicknamed the "
                "'Nati'. The headquarters of the sport's governing body, the "
                "International Federation of Association Football (FIFA), is "
                "located in Zurich."
            ),
        ),
    ]


def case_study_oracle() -> ScriptedOracle:
    oracle = ScriptedOracle(defaults={"relevance": "false"})
    # single-step replay
    oracle.add("route", route_key(SINGLE_Q), "single-step question")
    oracle.add("relevance", relevance_key(SINGLE_Q, "edith-wessex"), "true")
    oracle.add("fact", answer_key(SINGLE_Q), "Harold II")
    # compound replay
    oracle.add("route", route_key(COMPOUND_Q), "compound question")
    oracle.add(
        "fact",
        decompose_key(COMPOUND_Q),
        make_decomposition([COMPOUND_SUB1, COMPOUND_SUB2]),
    )
    oracle.add("relevance", relevance_key(COMPOUND_SUB1, "lionel-succession"), "true")
    oracle.add("relevance", relevance_key(COMPOUND_SUB2, "lionel-wife"), "true")
    oracle.add("fact", answer_key(COMPOUND_SUB1), "1651")
    oracle.add("fact", answer_key(COMPOUND_SUB2), "Rachael")
    oracle.add("fact", aggregate_key(COMPOUND_Q), "1651 && Rachael")
    # complex replay
    oracle.add("route", route_key(COMPLEX_Q), "complex question")
    oracle.add("fact", refine_key(COMPLEX_Q, 0), COMPLEX_Q)
    oracle.add("fact", refine_key(COMPLEX_Q, 1), COMPLEX_SEED2)
    oracle.add("relevance", relevance_key(COMPLEX_Q, "futsal"), "true")
    oracle.add("relevance", relevance_key(COMPLEX_SEED2, "fifa-hq"), "true")
    oracle.add("fact", answer_key(COMPLEX_Q), "FIFA")
    oracle.add("fact", answer_key(COMPLEX_SEED2), COMPLEX_FINAL)
    oracle.add("fact", aggregate_key(COMPLEX_Q), COMPLEX_FINAL)
    oracle.add("ending", ending_key(COMPLEX_Q, 1), "no")
    oracle.add("ending", ending_key(COMPLEX_Q, 2), "yes")
    return oracle


@pytest.fixture
def case_corpus() -> Corpus:
    return Corpus(single_step_passages() + compound_passages() + complex_passages())


@pytest.fixture
def case_backend(case_corpus) -> ScriptedBackend:
    return ScriptedBackend(case_study_oracle(), case_corpus)


# ---------------------------------------------------------------------------
# synthetic n-hop compound / complex suite


@dataclass
class HopSuite:
    corpus: Corpus
    oracle: ScriptedOracle
    compound: list[tuple[str, int, str]] = field(default_factory=list)  # (q, hops, gold)
    complex: list[tuple[str, int, str]] = field(default_factory=list)


def make_hop_suite(per_n: int = 12, max_steps: int = 5) -> HopSuite:
    passages: list[Passage] = []
    oracle = ScriptedOracle(defaults={"relevance": "false"})
    compound: list[tuple[str, int, str]] = []
    complex_: list[tuple[str, int, str]] = []
    qi = 0
    for hops in (2, 3, 4):
        for _ in range(per_n):
            qi += 1
            entity = f"entity{qi}"
            subs, answers = [], []
            for j in range(1, hops + 1):
                pid = f"p{qi}-{j}"
                answer = f"value{qi}x{j}"
                passages.append(
                    Passage(
                        id=pid,
                        title=f"{entity} record {j}",
                        text=f"{entity} has attribute{j} equal to {answer}.",
                        entity=entity,
                    )
                )
                sub = f"What is attribute{j} of {entity}?"
                subs.append(sub)
                answers.append(answer)
                oracle.add("relevance", relevance_key(sub, pid), "true")
                oracle.add("fact", answer_key(sub), answer)
            gold = " && ".join(answers)

            # compound framing of the same facts
            q = f"What are attribute1 through attribute{hops} of {entity}?"
            oracle.add("route", route_key(q), "compound question")
            oracle.add("fact", decompose_key(q), make_decomposition(subs))
            oracle.add("fact", aggregate_key(q), gold)
            # baseline (iterative) path over the same compound question
            for i in range(max(hops, max_steps)):
                oracle.add("fact", refine_key(q, i), subs[min(i, hops - 1)])
            for i in range(1, max(hops, max_steps) + 1):
                oracle.add("ending", ending_key(q, i), "yes" if i >= hops else "no")
            compound.append((q, hops, gold))

            # complex framing: same hops, but sequentially chained
            cq = f"What is the final chained attribute of {entity} ({hops} hops)?"
            oracle.add("route", route_key(cq), "complex question")
            for i in range(max(hops, max_steps)):
                oracle.add("fact", refine_key(cq, i), subs[min(i, hops - 1)])
                oracle.add("relevance", relevance_key(subs[min(i, hops - 1)], f"p{qi}-{min(i + 1, hops)}"), "true")
            for i in range(1, max(hops, max_steps) + 1):
                oracle.add("ending", ending_key(cq, i), "yes" if i >= hops else "no")
            oracle.add("fact", aggregate_key(cq), answers[-1])
            complex_.append((cq, hops, answers[-1]))
    return HopSuite(
        corpus=Corpus(passages), oracle=oracle, compound=compound, complex=complex_
    )


@pytest.fixture(scope="session")
def hop_suite() -> HopSuite:
    return make_hop_suite()


# ---------------------------------------------------------------------------
# adversarial noise fixture


@dataclass
class NoiseSuite:
    corpus: Corpus
    oracle: ScriptedOracle
    queries: list[str]
    relevant_ids: dict[str, str]
    distractor_ids: set[str]


def make_noise_suite(n_queries: int = 20) -> NoiseSuite:
    passages: list[Passage] = []
    oracle = ScriptedOracle(defaults={"relevance": "false"})
    queries: list[str] = []
    relevant_ids: dict[str, str] = {}
    distractor_ids: set[str] = set()
    for i in range(1, n_queries + 1):
        query = f"What is the attribute of thing{i}?"
        answer = f"answer{i}"
        good_id = f"good{i}"
        passages.append(
            Passage(
                id=good_id,
                title=f"thing{i} reference",
                text=f"thing{i} attribute is {answer}.",
            )
        )
        # distractors repeat the query terms so they outrank the good passage
        for d in range(1, 4):
            pid = f"bad{i}-{d}"
            distractor_ids.add(pid)
            passages.append(
                Passage(
                    id=pid,
                    title=f"thing{i} noise {d}",
                    text=f"thing{i} attribute attribute attribute thing{i} noise only.",
                )
            )
        oracle.add("route", route_key(query), "single-step question")
        oracle.add("relevance", relevance_key(query, good_id), "true")
        oracle.add("fact", answer_key(query), answer)
        queries.append(query)
        relevant_ids[query] = good_id
    return NoiseSuite(
        corpus=Corpus(passages),
        oracle=oracle,
        queries=queries,
        relevant_ids=relevant_ids,
        distractor_ids=distractor_ids,
    )


@pytest.fixture(scope="session")
def noise_suite() -> NoiseSuite:
    return make_noise_suite()


# ---------------------------------------------------------------------------
# benchmark-generation fixture


@dataclass
class BenchFixture:
    corpus: Corpus
    oracle: ScriptedOracle


def make_bench_fixture(n_entities: int = 30, per_entity: int = 4) -> BenchFixture:
    passages: list[Passage] = []
    oracle = ScriptedOracle(defaults={"relevance": "false"})
    for e in range(1, n_entities + 1):
        entity = f"Topic{e}"
        questions = []
        for j in range(1, per_entity + 1):
            pid = f"t{e}-{j}"
            answer = f"value{e}f{j}"
            passages.append(
                Passage(
                    id=pid,
                    title=entity,
                    text=f"{entity} fact {j} is {answer}.",
                    entity=entity,
                )
            )
            question = f"What is fact {j} of {entity}?"
            questions.append(question)
            oracle.add(
                "fact",
                qa_key(entity, pid),
                f'{{"Question": "{question}", "Answer": "{answer}"}}',
            )
        for hop in (2, 3, 4):
            if hop <= len(questions):
                oracle.add(
                    "fact",
                    compose_key(questions[:hop]),
                    f"What are facts 1 through {hop} of {entity}?",
                )
    return BenchFixture(corpus=Corpus(passages), oracle=oracle)


@pytest.fixture(scope="session")
def bench_fixture() -> BenchFixture:
    return make_bench_fixture()
