"""Shared helpers for the test suite."""

import numpy as np

from calibgames import Transcript, make_grid


def random_transcript(rng: np.random.Generator, m: int, T: int) -> Transcript:
    """A structurally valid transcript with no particular strategy behind it.

    Mixes degenerate and two-bin actions, realizes a random endpoint,
    and draws outcomes from the full interval [0, 1].
    """
    grid = make_grid(m)
    lo = rng.integers(0, m, size=T)
    width = rng.integers(0, 2, size=T)
    hi = np.minimum(lo + width, m - 1)
    pick_hi = rng.integers(0, 2, size=T).astype(bool)
    realized = np.where(pick_hi, hi, lo)
    outcomes = rng.random(T)
    return Transcript(
        grid=grid,
        action_lo=lo.astype(np.int64),
        action_hi=hi.astype(np.int64),
        realized=realized.astype(np.int64),
        outcomes=outcomes,
    )
