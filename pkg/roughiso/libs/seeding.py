"""Labelled seed streams.

Every random draw in the package comes from a :class:`Seed`: a 64-bit master
value plus a path of ``(label, counter)`` pairs.  The path is fed to numpy's
``SeedSequence`` as its spawn key, so adding a new labelled stream never
perturbs the draws of an existing one.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

U64_MASK = (1 << 64) - 1
_TRIAL_PERSON = b"ri-trial"


def _label_key(label: str) -> int:
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def hash64(master: int, index: int) -> int:
    """Return the 64-bit per-trial seed for ``(master, index)``.

    BLAKE2b with an 8-byte digest and personalisation ``b"ri-trial"`` over the
    16-byte little-endian encoding of both integers, read back little-endian.
    """

    payload = struct.pack("<QQ", master & U64_MASK, index & U64_MASK)
    digest = hashlib.blake2b(payload, digest_size=8, person=_TRIAL_PERSON).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True, slots=True)
class Seed:
    """Reproducible position in the seed tree."""

    master: int
    labels: tuple[tuple[str, int], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not 0 <= self.master <= U64_MASK:
            raise ValueError(f"master seed must fit in 64 bits, got {self.master}")
        for label, counter in self.labels:
            if not 0 <= counter <= U64_MASK:
                raise ValueError(f"counter for '{label}' must fit in 64 bits")

    def child(self, label: str, counter: int = 0) -> "Seed":
        return Seed(self.master, self.labels + ((label, counter),))

    def spawn_key(self) -> tuple[int, ...]:
        key: list[int] = []
        for label, counter in self.labels:
            key.extend((_label_key(label), counter))
        return tuple(key)

    def generator(self) -> np.random.Generator:
        """Return a fresh PCG64 generator positioned at this seed."""

        sequence = np.random.SeedSequence(entropy=self.master, spawn_key=self.spawn_key())
        return np.random.Generator(np.random.PCG64(sequence))

    def describe(self) -> str:
        path = "/".join(f"{label}:{counter}" for label, counter in self.labels)
        return f"{self.master}" + (f"/{path}" if path else "")


def trial_seed(master: int, index: int) -> Seed:
    """Seed of trial ``index`` in a run started from ``master``."""

    return Seed(hash64(master, index))
