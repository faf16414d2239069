"""Fabricated patent corpora for offline runs and tests.

Two flavors:

* ``random_corpus`` draws every text from a shared word pool; useful for
  structural checks (counts, balance, round trips) where content is
  irrelevant.
* ``planted_corpus`` gives each patent a claim built around patent-unique
  technical terms and a description that repeats every claim word in each
  sentence, so any slice window big enough to cover two sentences contains
  the full claim vocabulary. A lexical claim-coverage classifier then sees
  its own description pieces as near-perfect matches and everyone else's
  as misses, which is the planted-relevance scenario the offline
  evaluations rely on.
"""

from __future__ import annotations

import random

from .corpus import Corpus, Patent

SHARED_WORDS = (
    "apparatus device method system assembly configured comprising unit "
    "module signal surface member portion housing element material layer "
    "sensor controller circuit support channel actuator interface frame "
    "output input adjacent formed coupled between further wherein first "
    "second plurality substantially operable arranged"
).split()

TERM_STEMS = (
    "rotor valve flange gear piston clamp lens nozzle bearing coil spring "
    "filter duct blade shaft cam diode prism anode stator manifold spindle "
    "gasket impeller solenoid"
).split()

IPC_POOL = ("G06T1/00", "G06T1/20", "G06T3/40", "H04L9/00", "F16H57/04")

# Words every claim and every planted sentence share, beyond the terms.
_CLAIM_FRAME = ("an", "apparatus", "comprising", "a", "and")


def _patent_terms(index: int, n_terms: int) -> list[str]:
    return [
        f"{TERM_STEMS[(index + j) % len(TERM_STEMS)]}{index:03d}{chr(97 + j)}"
        for j in range(n_terms)
    ]


def _planted_claim(terms: list[str]) -> str:
    body = " and a ".join(terms)
    return f"An apparatus comprising a {body}."


def _planted_sentence(terms: list[str], rng: random.Random) -> list[str]:
    fillers = rng.sample(SHARED_WORDS, 6)
    words = ["the", "an", "apparatus", "comprising", "a", "and"]
    words += terms
    words += fillers
    rng.shuffle(words)
    words[-1] += "."
    return words


def planted_patent(index: int, rng: random.Random, n_terms: int = 6,
                   min_sentences: int = 25, max_sentences: int = 50,
                   ipc_class: str = "G06T1/00", kind_code: str = "A1") -> Patent:
    terms = _patent_terms(index, n_terms)
    n_sentences = rng.randint(min_sentences, max_sentences)
    sentences = [" ".join(_planted_sentence(terms, rng))
                 for _ in range(n_sentences)]
    return Patent(
        patent_id=f"TP{index:04d}{kind_code}",
        kind_code=kind_code,
        ipc_classes=(ipc_class,),
        first_claim=_planted_claim(terms),
        description=" ".join(sentences),
        language="en",
    )


def planted_corpus(n_patents: int, seed: int, **kwargs) -> Corpus:
    rng = random.Random(seed)
    return Corpus(planted_patent(i, rng, **kwargs) for i in range(n_patents))


def random_patent(index: int, rng: random.Random,
                  min_desc_words: int = 40, max_desc_words: int = 400) -> Patent:
    pool = SHARED_WORDS + TERM_STEMS
    claim = " ".join(rng.choices(pool, k=rng.randint(8, 25)))
    description = " ".join(
        rng.choices(pool, k=rng.randint(min_desc_words, max_desc_words))
    )
    return Patent(
        patent_id=f"RP{index:04d}A1",
        kind_code="A1",
        ipc_classes=(rng.choice(IPC_POOL),),
        first_claim=claim,
        description=description,
        language="en",
    )


def random_corpus(n_patents: int, seed: int, **kwargs) -> Corpus:
    rng = random.Random(seed)
    return Corpus(random_patent(i, rng, **kwargs) for i in range(n_patents))


def toy_corpus(n_patents: int = 20, seed: int = 20210301) -> Corpus:
    """The bundled demo corpus: planted patents across a few IPC classes."""
    rng = random.Random(seed)
    patents = []
    for i in range(n_patents):
        if i % 5 == 4:
            ipc, kind = "H04L9/00", "B2"
        elif i % 3 == 0:
            ipc, kind = "G06T1/00", "A1"
        else:
            ipc, kind = "G06T3/40", "A1"
        patents.append(planted_patent(i, rng, ipc_class=ipc, kind_code=kind))
    return Corpus(patents)
