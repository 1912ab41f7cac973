from __future__ import annotations

import hashlib
import logging
import os
import sys

import numpy as np


LOG_ENV_VAR = "REALIZER_LOG"
LOG_LEVELS = {
    "quiet": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}
DEFAULT_LOG_MODE = "info"

SeedLike = int | str


def configure_logging(mode: str | None = None) -> int:
    """Install the package log handler according to REALIZER_LOG."""
    requested = mode if mode is not None else os.environ.get(LOG_ENV_VAR, DEFAULT_LOG_MODE)
    requested = requested.strip().lower()
    level = LOG_LEVELS.get(requested)

    root = logging.getLogger("realizer")
    if not any(getattr(handler, "_realizer", False) for handler in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._realizer = True  # type: ignore[attr-defined]
        root.addHandler(handler)
        root.propagate = False

    if level is None:
        level = LOG_LEVELS[DEFAULT_LOG_MODE]
        root.setLevel(level)
        root.warning("Unknown %s value %r, using %r", LOG_ENV_VAR, requested, DEFAULT_LOG_MODE)
    else:
        root.setLevel(level)
    return level


def seed_entropy(seed: SeedLike) -> int:
    """Map an int or string seed to a non-negative integer."""
    if isinstance(seed, (int, np.integer)) and not isinstance(seed, bool):
        if seed >= 0:
            return int(seed)
    digest = hashlib.sha256(str(seed).encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "big")


def make_rng(seed: SeedLike, *salt: int) -> np.random.Generator:
    """Deterministic generator for `seed`, optionally derived with integer salts."""
    sequence = np.random.SeedSequence(seed_entropy(seed), spawn_key=tuple(int(s) for s in salt))
    return np.random.default_rng(sequence)
