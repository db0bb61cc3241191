import shlex
import sys
from importlib import resources
from pathlib import Path

import pytest

from stegolm import (
    BackendUnavailableError,
    BridgeProtocolError,
    ReplayExhaustedError,
    StepLimitExceededError,
    UnknownBackendError,
    Vocabulary,
    open_session,
    quantize,
    validate_distribution,
)
from stegolm.models.replay import write_replay

from oracles import laplace_prob, recount_trigram

FAKE_ADAPTER = Path(__file__).parent / "fake_adapter.py"


def bridge_spec(extra: str = "") -> str:
    return f"bridge:{shlex.quote(sys.executable)} {shlex.quote(str(FAKE_ADAPTER))} {extra}".strip()


# --- session bookkeeping ---

def test_step_zero_takes_no_last_token():
    session = open_session("synthetic:seed=1,shape=uniform-2")
    with pytest.raises(ValueError):
        session.next_distribution(3)
    session.next_distribution()
    with pytest.raises(ValueError):
        session.next_distribution()


def test_step_limit_enforced():
    session = open_session("synthetic:seed=1,shape=uniform-2", max_len=2)
    session.next_distribution()
    session.next_distribution(0)
    session.next_distribution(1)
    with pytest.raises(StepLimitExceededError):
        session.next_distribution(2)


def test_unknown_backend():
    with pytest.raises(UnknownBackendError):
        open_session("quantum")
    with pytest.raises(UnknownBackendError):
        open_session("synthetic:shape=banana-4")


# --- toy backend ---

def corpus_lines():
    text = resources.files("stegolm.models").joinpath("data/toy_corpus.txt").read_text()
    return text.splitlines()


def test_toy_counts_match_independent_recount():
    lines = corpus_lines()
    vocab, counts = recount_trigram(lines, "animals")
    session = open_session("toy", b"animals")
    assert list(session.vocabulary.tokens) == vocab
    assert session.eos_id == 0

    dist = session.next_distribution()
    start = counts[(-1, -1)]
    for token, prob in dist.entries[:10]:
        assert prob == round(laplace_prob(start, token, len(vocab)), 6)

    # walk two observed tokens and re-check the conditional
    first = dist.entries[0][0]
    dist2 = session.next_distribution(first)
    second = dist2.entries[0][0]
    dist3 = session.next_distribution(second)
    expected = counts.get((first, second), {})
    for token, prob in dist3.entries[:10]:
        assert prob == round(laplace_prob(expected, token, len(vocab)), 6)


def test_toy_distribution_is_dense_with_full_support():
    lines = corpus_lines()
    vocab, counts = recount_trigram(lines, "food")
    session = open_session("toy", b"food")
    dist = session.next_distribution()
    # every vocabulary token keeps mass under Laplace smoothing
    assert len(dist) == len(vocab)
    raw_total = sum(
        laplace_prob(counts[(-1, -1)], t, len(vocab)) for t in range(len(vocab))
    )
    assert abs(raw_total - 1.0) < 1e-6
    assert abs(sum(p for _, p in dist.entries) - 1.0) < 5e-5


def test_toy_topics_differ_and_union_accepted():
    animals = open_session("toy", b"animals").next_distribution()
    vehicles = open_session("toy", b"vehicles").next_distribution()
    assert animals.entries != vehicles.entries
    union = open_session("toy").next_distribution()
    assert len(union) == len(animals)


def test_toy_unknown_topic():
    with pytest.raises(BackendUnavailableError):
        open_session("toy", b"spaceships")


def test_toy_deterministic_across_sessions():
    a = open_session("toy", b"weather")
    b = open_session("toy", b"weather")
    assert a.next_distribution().entries == b.next_distribution().entries
    the = a.vocabulary.tokens.index("the")
    assert a.next_distribution(the).entries == b.next_distribution(the).entries


# --- synthetic backend ---

def test_synthetic_same_key_same_distribution():
    a = open_session("synthetic:seed=7,shape=zipf-8")
    b = open_session("synthetic:seed=7,shape=zipf-8")
    assert a.next_distribution().entries == b.next_distribution().entries
    assert a.next_distribution(3).entries == b.next_distribution(3).entries


def test_synthetic_seed_and_conditioning_matter():
    base = open_session("synthetic:seed=7,shape=zipf-8").next_distribution()
    other_seed = open_session("synthetic:seed=8,shape=zipf-8").next_distribution()
    other_cond = open_session("synthetic:seed=7,shape=zipf-8", b"img").next_distribution()
    assert base.entries != other_seed.entries
    assert base.entries != other_cond.entries


def test_synthetic_uniform_shape():
    dist = open_session("synthetic:seed=3,shape=uniform-4").next_distribution()
    assert len(dist) == 4
    assert all(p == 0.25 for _, p in dist.entries)


def test_synthetic_eos_mass():
    session = open_session("synthetic:seed=3,shape=uniform-4,eos=0.5")
    dist = session.next_distribution()
    assert dist.prob_of(session.eos_id) == 0.5


def test_synthetic_context_changes_distribution():
    session = open_session("synthetic:seed=5,shape=zipf-16")
    first = session.next_distribution()
    second = session.next_distribution(first.entries[0][0])
    assert first.entries != second.entries


# --- replay backend ---

def make_replay(tmp_path, dists, vocab=None):
    vocab = vocab or Vocabulary(("a", "b", "c", "</s>"), eos_id=3)
    path = tmp_path / "replay.jsonl"
    quantized = [quantize(validate_distribution(d, len(vocab), dense=False)) for d in dists]
    write_replay(path, vocab, quantized)
    return path


def test_replay_round_trip_and_exhaustion(tmp_path):
    path = make_replay(tmp_path, [[(0, 0.5), (1, 0.5)], [(2, 1.0)], [(0, 1.0)]])
    session = open_session(f"replay:{path}")
    assert session.next_distribution().entries == ((0, 0.5), (1, 0.5))
    assert session.next_distribution(0).entries == ((2, 1.0),)
    assert session.next_distribution(2).entries == ((0, 1.0),)
    with pytest.raises(ReplayExhaustedError):
        session.next_distribution(0)


def test_replay_missing_file():
    with pytest.raises(BackendUnavailableError):
        open_session("replay:does/not/exist.jsonl")


def test_replay_rejects_out_of_order_steps(tmp_path):
    path = make_replay(tmp_path, [[(0, 1.0)]])
    text = path.read_text().replace('"step": 0', '"step": 5')
    path.write_text(text)
    with pytest.raises(BackendUnavailableError):
        open_session(f"replay:{path}")


# --- bridge backend ---

def test_bridge_handshake_and_steps():
    with open_session(bridge_spec(), b"cover-image") as session:
        assert len(session.vocabulary) == 16
        assert session.eos_id == 0
        first = session.next_distribution()
        assert sum(p for _, p in first.entries) <= 1.0 + 1e-6
        token = first.entries[0][0]
        second = session.next_distribution(token)
        assert second.entries


def test_bridge_is_deterministic_per_conditioning():
    with open_session(bridge_spec(), b"x") as a, open_session(bridge_spec(), b"x") as b:
        da, db = a.next_distribution(), b.next_distribution()
        assert da.entries == db.entries
    with open_session(bridge_spec(), b"y") as c:
        assert c.next_distribution().entries != da.entries


def test_bridge_malformed_dist():
    with open_session(bridge_spec("--garbage-dist")) as session:
        with pytest.raises(BridgeProtocolError):
            session.next_distribution()


def test_bridge_dead_process_mid_session():
    with open_session(bridge_spec("--die-after 1")) as session:
        session.next_distribution()
        with pytest.raises(BridgeProtocolError):
            session.next_distribution(1)


def test_bridge_bad_handshake():
    with pytest.raises(BackendUnavailableError):
        open_session(bridge_spec("--bad-hello"))


def test_bridge_missing_command():
    with pytest.raises(BackendUnavailableError):
        open_session("bridge:/no/such/binary-anywhere")
