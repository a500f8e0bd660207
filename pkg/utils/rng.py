import hashlib
import zlib

import numpy as np

SEED_MASK = (1 << 63) - 1


def stream_key(name: str) -> int:
    """Stable 32-bit key for a named random stream."""
    return zlib.crc32(name.encode("utf-8"))


def draw(seed: int, stream: str, counter: int, bound: int) -> int:
    """
    Counter-based draw: a uniform integer in [0, bound) that depends only on
    (seed, stream, counter). Replaying the same triple always gives the same
    value, so a stream can be handed to another owner by handing over its
    counter.
    """
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    rng = np.random.default_rng([seed & SEED_MASK, stream_key(stream), counter])
    return int(rng.integers(bound))


def derive_seed(*parts) -> int:
    """
    Derive a 63-bit seed from arbitrary parts: the first 8 bytes of BLAKE2b
    over the parts joined with '/'.
    """
    text = "/".join(str(p) for p in parts)
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") & SEED_MASK
