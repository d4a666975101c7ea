"""Calibration error metrics over completed game transcripts.

The central quantity is the binned calibration error

    CE_T = sum_i | (1/T) sum_t 1{realized_t = i} (M_i - y_t) |,

the l1 norm of the per-bin averaged signed deviations between forecast
midpoints and outcomes. Because forecasts are midpoints of width-1/m
bins, a slack of epsilon = 1/(2m) is unavoidable, and the operative
metric is eps_CE_T = max(CE_T - epsilon, 0).

Each round also induces a reward vector with a single nonzero component
(M_i - y_t at the realized bin). The l1 distance from the average reward
vector to the radius-epsilon l1 ball equals eps_CE_T exactly; both sides
of that identity are implemented here by separate routes so they can be
checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid


@dataclass(frozen=True, eq=False)
class Transcript:
    """Completed game record in columnar form.

    action_lo/action_hi give each round's action as bin indices (equal
    for point forecasts, adjacent for interval forecasts), realized is
    the bin whose statistics the round updated, outcomes lie in [0, 1].
    """

    grid: Grid
    action_lo: np.ndarray
    action_hi: np.ndarray
    realized: np.ndarray
    outcomes: np.ndarray

    def __post_init__(self):
        n = len(self.realized)
        if not (len(self.action_lo) == len(self.action_hi) == len(self.outcomes) == n):
            raise ValueError("transcript columns have mismatched lengths")
        if n:
            lo, hi = self.action_lo, self.action_hi
            if (lo < 0).any() or (hi >= self.grid.m).any():
                raise ValueError("action indices outside the grid")
            width = hi - lo
            if (width < 0).any() or (width > 1).any():
                raise ValueError("actions must span one bin or two adjacent bins")
            if ((self.realized != lo) & (self.realized != hi)).any():
                raise ValueError("realized bin must be an action endpoint")
            if (self.outcomes < 0).any() or (self.outcomes > 1).any():
                raise ValueError("outcomes outside [0, 1]")

    def __len__(self) -> int:
        return len(self.realized)

    def prefix(self, t: int) -> "Transcript":
        """First t rounds as a transcript (array views, no copies)."""
        if not 0 <= t <= len(self):
            raise ValueError(f"prefix length {t} outside 0..{len(self)}")
        return Transcript(
            grid=self.grid,
            action_lo=self.action_lo[:t],
            action_hi=self.action_hi[:t],
            realized=self.realized[:t],
            outcomes=self.outcomes[:t],
        )


def _require_rounds(transcript: Transcript) -> int:
    t = len(transcript)
    if t == 0:
        raise ValueError("metric needs at least one round")
    return t


def _bin_sums(transcript: Transcript) -> np.ndarray:
    """Per-bin sums of signed deviations midpoint - outcome."""
    dev = transcript.grid.midpoints[transcript.realized] - transcript.outcomes
    return np.bincount(transcript.realized, weights=dev, minlength=transcript.grid.m)


def calibration_error(transcript: Transcript) -> float:
    """CE_T: l1 norm of per-bin averaged signed deviations."""
    t = _require_rounds(transcript)
    return float(np.abs(_bin_sums(transcript)).sum() / t)


def eps_calibration_error(transcript: Transcript) -> float:
    """CE_T less the grid slack epsilon, clamped at zero."""
    return max(calibration_error(transcript) - transcript.grid.epsilon, 0.0)


def interval_calibration_error(transcript: Transcript) -> float:
    """Calibration error charged against interval actions.

    Each round's outcome is projected onto the interval spanned by the
    action's endpoint midpoints; the signed gap projection - outcome is
    charged to the endpoint bin it projects to (zero when the outcome
    falls inside the interval). The epsilon slack and clamp match
    eps_calibration_error, and the two metrics agree whenever outcomes
    are binary and realized bins follow the closest-endpoint rule.
    """
    t = _require_rounds(transcript)
    grid = transcript.grid
    lo_mid = grid.midpoints[transcript.action_lo]
    hi_mid = grid.midpoints[transcript.action_hi]
    proj = np.clip(transcript.outcomes, lo_mid, hi_mid)
    dev = proj - transcript.outcomes
    bins = np.where(proj >= hi_mid, transcript.action_hi, transcript.action_lo)
    sums = np.bincount(bins, weights=dev, minlength=grid.m)
    return max(float(np.abs(sums).sum() / t) - grid.epsilon, 0.0)


def reward(grid: Grid, realized_index: int, outcome: float) -> np.ndarray:
    """One round's reward vector: M_i - y at the realized bin, else 0."""
    if not 0 <= realized_index < grid.m:
        raise ValueError(f"bin index {realized_index} outside 0..{grid.m - 1}")
    if not 0.0 <= outcome <= 1.0:
        raise ValueError(f"outcome {outcome} outside [0, 1]")
    out = np.zeros(grid.m)
    out[realized_index] = grid.midpoints[realized_index] - outcome
    return out


def avg_reward(transcript: Transcript) -> np.ndarray:
    """Average of the per-round reward vectors.

    Deliberately averages reward() outputs round by round, as an
    independent route to the same vector as _bin_sums/T.
    """
    t = _require_rounds(transcript)
    total = np.zeros(transcript.grid.m)
    for idx, y in zip(transcript.realized, transcript.outcomes):
        total += reward(transcript.grid, int(idx), float(y))
    return total / t


def l1_dist_to_ball(v: np.ndarray, eps: float) -> float:
    """l1 distance from v to the closed l1 ball of radius eps.

    For the l1 norm this has the closed form max(||v||_1 - eps, 0).
    """
    if eps < 0:
        raise ValueError(f"ball radius must be nonnegative, got {eps}")
    return max(float(np.abs(np.asarray(v)).sum()) - eps, 0.0)
