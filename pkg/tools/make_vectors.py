"""Regenerate the checked-in conformance vectors under tests/vectors/.

The replay distributions are fixed integer-micro tables (no RNG), so the
files are reproducible byte for byte. Run from the repository root:

    python3 tools/make_vectors.py
"""

from pathlib import Path

from stegolm import (
    BitMessage,
    PoolParams,
    StegoParams,
    Vocabulary,
    hide,
    open_session,
    validate_distribution,
    quantize,
)
from stegolm.models.replay import write_replay
from stegolm.stego_io import StegoFile, save_stego_file

ROOT = Path(__file__).resolve().parent.parent
VECTOR_DIR = ROOT / "tests" / "vectors"
REPLAY_REL = "tests/vectors/caption_replay.jsonl"
STEGO_REL = "tests/vectors/caption_stego.json"

VOCAB = Vocabulary(
    ("</s>", "arch", "beam", "cove", "dune", "fern", "glen", "harbor", "isle"),
    eos_id=0,
)
EARLY_WORD_MICROS = (294000, 215600, 156800, 117600, 88200, 58800, 29400, 19600)
LATE_WORD_MICROS = (90000, 66000, 48000, 36000, 27000, 18000, 9000, 6000)
EOS_FLIP_STEP = 28
N_STEPS = 72

PAYLOAD_HEX = "c0ffee"
PARAMS = StegoParams(pool=PoolParams(t_a=0.02, t_r=0.5), max_len=56)


def step_distribution(step: int):
    if step < EOS_FLIP_STEP:
        word_micros, eos_micro = EARLY_WORD_MICROS, 20000
    else:
        word_micros, eos_micro = LATE_WORD_MICROS, 700000
    entries = [(0, eos_micro / 1_000_000)]
    for word in range(8):
        micro = word_micros[(word + step) % 8]
        entries.append((word + 1, micro / 1_000_000))
    return quantize(validate_distribution(entries, len(VOCAB)))


def main() -> None:
    VECTOR_DIR.mkdir(parents=True, exist_ok=True)
    dists = [step_distribution(i) for i in range(N_STEPS)]
    write_replay(VECTOR_DIR / "caption_replay.jsonl", VOCAB, dists)

    payload = BitMessage.from_hex(PAYLOAD_HEX)
    session = open_session(f"replay:{VECTOR_DIR / 'caption_replay.jsonl'}",
                           max_len=PARAMS.max_len)
    output = hide(session, payload, PARAMS)
    save_stego_file(VECTOR_DIR / "caption_stego.json", StegoFile(
        backend=f"replay:{REPLAY_REL}",
        conditioning=b"",
        params=PARAMS,
        token_ids=output.tokens,
        tokens=tuple(VOCAB.tokens[t] for t in output.tokens),
    ))
    print(f"steps: {len(output.steps)}  tokens: {len(output.tokens)}  "
          f"gross bits: {output.gross_bits}")


if __name__ == "__main__":
    main()
