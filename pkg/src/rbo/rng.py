"""Counter-based SplitMix64 streams.

A draw is a pure function of ``(master seed, trial, counter)``, so trials can
run in any order or process and still see the same numbers. Algorithm:

    mix64(z):   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
                z ^= z >> 27; z *= 0x94D049BB133111EB
                z ^= z >> 31                     (all mod 2^64)
    trial_key(seed, trial) = mix64(seed + (trial + 1) * GOLDEN)
    draw(key, counter)     = mix64(key + (counter + 1) * GOLDEN)
    uniform                = (draw >> 11) * 2^-53

with ``GOLDEN = 0x9E3779B97F4A7C15``.
"""

from __future__ import annotations

GENERATOR_NAME = "splitmix64-counter"

GOLDEN = 0x9E3779B97F4A7C15
_M64 = (1 << 64) - 1


def mix64(z: int) -> int:
    z &= _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def trial_key(seed: int, trial: int) -> int:
    return mix64(seed + (trial + 1) * GOLDEN)


def draw(key: int, counter: int) -> int:
    return mix64(key + (counter + 1) * GOLDEN)


def uniform(key: int, counter: int) -> float:
    return (draw(key, counter) >> 11) * 2.0**-53
