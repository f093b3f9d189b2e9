"""Bernoulli 0/1 sampling masks: configuration, generation, fixtures.

Masks are immutable once built; generation is a pure function of
(seed, trial_index) via a counter-based RNG, so any execution order or
degree of parallelism reproduces the same sequence of masks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MaskConfig",
    "Mask",
    "is_prime",
    "generate_mask",
    "worst_case_mask",
    "mask_to_text",
    "mask_from_text",
]

_UINT64_SPAN = 1 << 64


def is_prime(n: int) -> bool:
    """Trial-division primality test (sufficient for mask lengths)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class MaskConfig:
    """Experiment parameters: mask length ``n``, keep-probability ``p``, RNG seed."""

    n: int
    p: float
    seed: int = 0
    n_is_prime: bool = field(init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"mask length n must be an integer >= 2, got {self.n!r}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"sampling rate p must lie in (0, 1), got {self.p!r}")
        if not 0 <= int(self.seed) < _UINT64_SPAN:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")
        object.__setattr__(self, "n_is_prime", is_prime(self.n))


@dataclass(frozen=True)
class Mask:
    """A realized 0/1 sequence with its support (indices of ones)."""

    bits: np.ndarray
    support: np.ndarray = field(init=False)
    n_p: int = field(init=False)

    def __post_init__(self) -> None:
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ValueError("mask bits must be one-dimensional")
        if bits.size and bits.max() > 1:
            raise ValueError("mask bits must be 0 or 1")
        support = np.flatnonzero(bits)
        bits.flags.writeable = False
        support.flags.writeable = False
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "n_p", int(support.size))

    @property
    def n(self) -> int:
        return int(self.bits.size)


def _trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    # Philox is counter-based: the 128-bit key (seed, trial) fully determines
    # the stream, independent of how many draws other trials made.
    key = (int(seed) << 64) + int(trial_index)
    return np.random.Generator(np.random.Philox(key=key))


def generate_mask(config: MaskConfig, trial_index: int = 0) -> Mask:
    """Draw one i.i.d. Bernoulli(p) mask for the given trial index.

    The same (config.seed, trial_index) always yields the same bits.
    """
    if trial_index < 0 or trial_index >= _UINT64_SPAN:
        raise ValueError(f"trial_index must fit in 64 unsigned bits, got {trial_index!r}")
    rng = _trial_rng(config.seed, trial_index)
    bits = rng.random(config.n) < config.p
    return Mask(bits.astype(np.uint8))


def worst_case_mask(n: int, n_p: int) -> Mask:
    """The mask with n_p ones in a contiguous block at the origin.

    Among all masks with a fixed number of ones (and prime length), this
    arrangement maximizes the peak off-center DFT magnitude.
    """
    if not 0 <= n_p <= n:
        raise ValueError(f"n_p must lie in [0, {n}], got {n_p}")
    bits = np.zeros(n, dtype=np.uint8)
    bits[:n_p] = 1
    return Mask(bits)


def mask_to_text(mask: Mask) -> str:
    """Fixture format: one line of '0'/'1' characters, newline-terminated."""
    return "".join("1" if b else "0" for b in mask.bits) + "\n"


def mask_from_text(text: str) -> Mask:
    line = text.rstrip("\n")
    if not line or set(line) - {"0", "1"}:
        raise ValueError("mask text must be a nonempty line of '0'/'1' characters")
    return Mask(np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0"))
