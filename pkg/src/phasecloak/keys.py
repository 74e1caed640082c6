"""Key material: splitmix64 keystream of phase shifts and dummy positions."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

EIGHTH_TURNS = "eighth_turns"
CONTINUOUS = "continuous"
QUANTIZATIONS = (EIGHTH_TURNS, CONTINUOUS)

BITS_PER_PHASE_GATE = 3


def splitmix64_mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def splitmix64_at(seed: int, index: int) -> int:
    """Output ``index`` (0-based) of the splitmix64 sequence seeded with ``seed``.

    The generator state advances by a fixed increment, so any output can be
    computed directly without replaying the ones before it.
    """
    return splitmix64_mix((seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return splitmix64_mix(self.state)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next()
            if r < limit:
                return r % n


@dataclass(frozen=True)
class KeySpec:
    seed: int
    quantization: str = EIGHTH_TURNS
    dummy_layer_count: int = 0
    dummy_position_seed: int = 0

    def __post_init__(self):
        for name in ("seed", "dummy_position_seed"):
            v = getattr(self, name)
            if not 0 <= v <= MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v}")
        if self.quantization not in QUANTIZATIONS:
            raise ValueError(f"quantization must be one of {QUANTIZATIONS}")
        if self.dummy_layer_count < 0:
            raise ValueError("dummy_layer_count must be non-negative")

    def public_params(self) -> dict:
        """Everything except the secret seed."""
        return {
            "quantization": self.quantization,
            "dummy_layer_count": self.dummy_layer_count,
            "dummy_position_seed": self.dummy_position_seed,
        }


def shift_from_word(word: int, quantization: str) -> float:
    if quantization == EIGHTH_TURNS:
        return (word & 7) * (math.pi / 4)
    # top 53 bits -> [0, 1)
    return (word >> 11) * (1.0 / (1 << 53)) * (2 * math.pi)


def derive_keystream(key: KeySpec, count: int) -> list[float]:
    """Phase shifts ``delta_0 .. delta_{count-1}``; element k depends only on
    ``(seed, quantization, k)``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    return [shift_from_word(splitmix64_at(key.seed, k), key.quantization)
            for k in range(count)]


def sample_positions(seed: int, population: int, k: int) -> list[int]:
    """``k`` distinct values from ``range(population)``, ascending.

    Partial Fisher-Yates driven by splitmix64 so the draw is reproducible
    across platforms.
    """
    if k > population:
        raise ValueError(f"cannot draw {k} distinct positions from {population}")
    rng = SplitMix64(seed)
    pool = list(range(population))
    for i in range(k):
        j = i + rng.below(population - i)
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:k])


def derive_position_seed(seed: int) -> int:
    """Default dummy-position seed for a key seed.

    One-way (BLAKE2b), so publishing positions reveals nothing about the seed.
    """
    digest = hashlib.blake2b(seed.to_bytes(8, "little"), digest_size=8,
                             person=b"dummy-positions").digest()
    return int.from_bytes(digest, "little")
