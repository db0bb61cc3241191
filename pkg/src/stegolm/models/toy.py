"""Word-level trigram backend over a bundled caption corpus.

The corpus is partitioned into topics; the conditioning bytes select one
topic's sub-corpus (standing in for image conditioning), or the whole corpus
when empty. Counts use Laplace smoothing with alpha=1 over the global
vocabulary, so every token keeps nonzero probability at every step.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from importlib import resources

import numpy as np

from ..core import NextTokenDistribution, TokenId, Vocabulary, quantize, validate_distribution
from ..errors import BackendUnavailableError
from . import DEFAULT_MAX_LEN, ModelSession

EOS_TOKEN = "</s>"
_BOS = -1  # context padding marker, not part of the vocabulary


def _load_corpus() -> list[tuple[str, list[str]]]:
    text = resources.files(__package__).joinpath("data/toy_corpus.txt").read_text()
    sentences = []
    for line in text.splitlines():
        topic, _, sentence = line.partition("\t")
        sentences.append((topic, sentence.split()))
    return sentences


class _TrigramModel:
    def __init__(self, topic: str):
        corpus = _load_corpus()
        topics = sorted({t for t, _ in corpus})
        if topic and topic not in topics:
            raise BackendUnavailableError(
                f"unknown topic {topic!r}; available: {', '.join(topics)}"
            )
        words = sorted({w for _, sent in corpus for w in sent})
        # EOS sits at id 0 so the ascending-id tie break on fully unseen
        # (uniform) contexts ends the caption instead of babbling
        self.vocabulary = Vocabulary((EOS_TOKEN,) + tuple(words), eos_id=0)
        index = {w: i for i, w in enumerate(self.vocabulary.tokens)}

        self._counts: dict[tuple[int, int], Counter] = {}
        for sent_topic, sentence in corpus:
            if topic and sent_topic != topic:
                continue
            ids = [index[w] for w in sentence] + [self.vocabulary.eos_id]
            context = (_BOS, _BOS)
            for token in ids:
                self._counts.setdefault(context, Counter())[token] += 1
                context = (context[1], token)
        self._topic_tokens = {
            t for counter in self._counts.values() for t in counter
        }
        self._cache: dict[tuple[int, int], NextTokenDistribution] = {}

    def distribution(self, context: tuple[int, int]) -> NextTokenDistribution:
        if context not in self._cache:
            size = len(self.vocabulary)
            counts = np.ones(size)
            observed = self._counts.get(context)
            total = 0
            if observed:
                for token, count in observed.items():
                    counts[token] += count
                total = sum(observed.values())
            probs = counts / (total + size)
            raw = list(zip(range(size), probs.tolist()))
            self._cache[context] = quantize(validate_distribution(raw, size, dense=True))
        return self._cache[context]


@lru_cache(maxsize=None)
def _model_for(topic: str) -> _TrigramModel:
    return _TrigramModel(topic)


class ToySession(ModelSession):
    def __init__(self, conditioning: bytes = b"", max_len: int = DEFAULT_MAX_LEN):
        topic = conditioning.decode("utf-8", errors="strict") if conditioning else ""
        self._model = _model_for(topic)
        super().__init__(self._model.vocabulary, max_len=max_len)

    @property
    def topic_token_ids(self) -> frozenset[TokenId]:
        """Tokens observed in the conditioned sub-corpus (for semantic checks)."""
        return frozenset(self._model._topic_tokens)

    def _distribution(self, last_token: TokenId | None) -> NextTokenDistribution:
        tail = ([_BOS, _BOS] + self.context)[-2:]
        return self._model.distribution((tail[0], tail[1]))
