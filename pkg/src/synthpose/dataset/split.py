"""Deterministic train/val/test split, stratified per sequence.

Each sequence's frame keys are shuffled with a seed derived from the split
seed and the sequence id, then partitioned by largest-remainder rounding so
every stratum lands within one frame of the target fractions.
"""

from __future__ import annotations

import hashlib
import random
from pathlib import Path

from .jsonio import write_canonical_json

SPLIT_NAMES = ("train", "val", "test")
DEFAULT_FRACTIONS = (0.75, 0.20, 0.05)


class SplitError(ValueError):
    pass


def _sequence_seed(seed: int, sequence_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{sequence_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def largest_remainder_counts(n: int, fractions: tuple[float, float, float]) -> list[int]:
    exact = [n * f for f in fractions]
    counts = [int(e) for e in exact]
    remainders = [e - c for e, c in zip(exact, counts)]
    short = n - sum(counts)
    # distribute leftovers to the largest remainders; ties go in split order
    order = sorted(range(len(fractions)), key=lambda i: (-remainders[i], i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def split_frames(
    frames: list[tuple[str, str]],
    seed: int,
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS,
) -> dict[str, str]:
    """frames: (sequence_id, frame_key) pairs -> {frame_key: split label}."""
    if not frames:
        raise SplitError("cannot split an empty frame list")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise SplitError("split fractions must sum to 1")
    if len(fractions) != len(SPLIT_NAMES):
        raise SplitError("expected train/val/test fractions")

    by_sequence: dict[str, list[str]] = {}
    for sequence_id, key in frames:
        by_sequence.setdefault(sequence_id, []).append(key)

    assignment: dict[str, str] = {}
    for sequence_id in sorted(by_sequence):
        keys = sorted(by_sequence[sequence_id])
        if len(set(keys)) != len(keys):
            raise SplitError(f"duplicate frame keys in sequence '{sequence_id}'")
        rng = random.Random(_sequence_seed(seed, sequence_id))
        rng.shuffle(keys)
        counts = largest_remainder_counts(len(keys), fractions)
        pos = 0
        for name, count in zip(SPLIT_NAMES, counts):
            for key in keys[pos : pos + count]:
                assignment[key] = name
            pos += count
    return assignment


def write_splits(
    assignment: dict[str, str],
    seed: int,
    fractions: tuple[float, float, float],
    path,
) -> Path:
    doc = {
        "seed": seed,
        "fractions": list(fractions),
        "assignments": dict(sorted(assignment.items())),
    }
    path = Path(path)
    write_canonical_json(doc, path)
    return path
