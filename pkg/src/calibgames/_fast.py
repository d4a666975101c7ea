"""JIT kernels for acceptance-scale runs of specific matchups.

Round-for-round equivalents of the canonical engine loops for four
matchup families: the interval strategy in the binary and bounded
action games, the drift-cancelling point strategy against the greedy
adversary, and the doubling-epoch strategy against a Bernoulli nature.
Each kernel reproduces the engine's arithmetic exactly (same operation
order, same uniform-draw consumption) so the test suite can compare
transcripts bit for bit; the equivalence is what licenses using the
kernels for the million-round sweeps.

Kernels return checkpoint metrics plus running maxima used by the
guarantee gates: sup_t of (sum_i |S_i| - t * eps), which is the
tightest prefix witness of t * eps_CE_t, and the largest played-bin
potential N_i * max(deficit, excess).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .forecasters import DoublingSchedule

RESYNC_EVERY = 1024  # rounds between exact recomputations of sum_i |S_i|


@njit(cache=True)
def _mean_at(counts, sums, mids, i):
    if counts[i] == 0:
        return mids[i]
    return sums[i] / counts[i]


@njit(cache=True)
def _cond_a(counts, sums, mids, lefts, rights, largest):
    m = counts.shape[0]
    if largest:
        for i in range(m - 1, -1, -1):
            p = _mean_at(counts, sums, mids, i)
            if lefts[i] <= p and p <= rights[i]:
                return i
        return -1
    for i in range(m):
        p = _mean_at(counts, sums, mids, i)
        if lefts[i] <= p and p <= rights[i]:
            return i
    return -1


@njit(cache=True)
def _cond_b(counts, sums, mids, lefts, rights, largest):
    m = counts.shape[0]
    if largest:
        for i in range(m - 2, -1, -1):
            if _mean_at(counts, sums, mids, i) > rights[i] and _mean_at(
                counts, sums, mids, i + 1
            ) < lefts[i + 1]:
                return i
        return -1
    for i in range(m - 1):
        if _mean_at(counts, sums, mids, i) > rights[i] and _mean_at(
            counts, sums, mids, i + 1
        ) < lefts[i + 1]:
            return i
    return -1


@njit(cache=True)
def _grid_arrays(m):
    mids = np.empty(m)
    lefts = np.empty(m)
    rights = np.empty(m)
    for i in range(m):
        mids[i] = (2 * i + 1) / (2 * m)
        lefts[i] = i / m
        rights[i] = (i + 1) / m
    return mids, lefts, rights


@njit(cache=True)
def _abs_sum(s):
    tot = 0.0
    for i in range(s.shape[0]):
        tot += abs(s[i])
    return tot


@njit(cache=True)
def potc_binary_run(m, T, mode, outcomes, checkpoints, largest):
    """Interval strategy vs a binary adversary.

    mode: 0 greedy, 1 constant 0, 2 constant 1, 3 alternating,
    4 presampled outcomes array.
    """
    mids, lefts, rights = _grid_arrays(m)
    eps = 1.0 / (2 * m)
    counts = np.zeros(m, np.int64)
    sums = np.zeros(m)
    S = np.zeros(m)
    # the greedy adversary's running |S| total is incremental-only so
    # its decisions stay bit-identical to the engine's; the bound-check
    # total is resynced for accuracy
    g_total = 0.0
    total = 0.0
    ncp = checkpoints.shape[0]
    ce = np.zeros(ncp)
    counts_snap = np.zeros((ncp, m), np.int64)
    means_snap = np.zeros((ncp, m))
    ci = 0
    max_excess = -1e300
    max_pot = 0.0
    for t in range(1, T + 1):
        lo = _cond_a(counts, sums, mids, lefts, rights, largest)
        hi = lo
        if lo < 0:
            lo = _cond_b(counts, sums, mids, lefts, rights, largest)
            if lo < 0:
                ce[:] = np.nan
                return ce, 1e300, 1e300, counts_snap, means_snap
            hi = lo + 1
        if mode == 0:
            dev1 = mids[hi] - 1.0
            e1 = (g_total + abs(S[hi] + dev1) - abs(S[hi])) / t - eps
            e0 = (g_total + abs(S[lo] + mids[lo]) - abs(S[lo])) / t - eps
            if e1 < 0.0:
                e1 = 0.0
            if e0 < 0.0:
                e0 = 0.0
            y = 1.0 if e1 >= e0 else 0.0
        elif mode == 1:
            y = 0.0
        elif mode == 2:
            y = 1.0
        elif mode == 3:
            y = 1.0 if t % 2 == 1 else 0.0
        else:
            y = outcomes[t - 1]
        ridx = hi if y == 1.0 else lo
        counts[ridx] += 1
        sums[ridx] += y
        s_old = S[ridx]
        s_new = s_old + (mids[ridx] - y)
        S[ridx] = s_new
        delta_abs = abs(s_new) - abs(s_old)
        g_total += delta_abs
        total += delta_abs
        p = sums[ridx] / counts[ridx]
        d = lefts[ridx] - p
        e = p - rights[ridx]
        pot = counts[ridx] * (d if d > e else e)
        if pot > max_pot:
            max_pot = pot
        if t % RESYNC_EVERY == 0:
            total = _abs_sum(S)
        excess = total - t * eps
        if excess > max_excess:
            max_excess = excess
        if ci < ncp and t == checkpoints[ci]:
            total = _abs_sum(S)
            ce[ci] = total / t
            for i in range(m):
                counts_snap[ci, i] = counts[i]
                means_snap[ci, i] = _mean_at(counts, sums, mids, i)
            ci += 1
    return ce, max_excess, max_pot, counts_snap, means_snap


@njit(cache=True)
def potc_bounded_run(m, T, mode, values, delta, checkpoints, largest):
    """Interval strategy in the bounded game.

    mode: 0 presampled values array, 1 boundary probe cycling
    (-delta, 0, +delta) around the action's threshold edge, 2 constant
    values[0].
    """
    mids, lefts, rights = _grid_arrays(m)
    eps = 1.0 / (2 * m)
    counts = np.zeros(m, np.int64)
    sums = np.zeros(m)
    S = np.zeros(m)
    total = 0.0
    ncp = checkpoints.shape[0]
    ce = np.zeros(ncp)
    counts_snap = np.zeros((ncp, m), np.int64)
    means_snap = np.zeros((ncp, m))
    ci = 0
    max_excess = -1e300
    max_pot = 0.0
    for t in range(1, T + 1):
        lo = _cond_a(counts, sums, mids, lefts, rights, largest)
        hi = lo
        if lo < 0:
            lo = _cond_b(counts, sums, mids, lefts, rights, largest)
            if lo < 0:
                ce[:] = np.nan
                return ce, 1e300, 1e300, counts_snap, means_snap
            hi = lo + 1
        if mode == 0:
            v = values[t - 1]
        elif mode == 1:
            r = (t - 1) % 3
            if r == 0:
                v = rights[lo] - delta
            elif r == 1:
                v = rights[lo]
            else:
                v = rights[lo] + delta
            if v < 0.0:
                v = 0.0
            if v > 1.0:
                v = 1.0
        else:
            v = values[0]
        ridx = lo if v <= rights[lo] else hi
        counts[ridx] += 1
        sums[ridx] += v
        s_old = S[ridx]
        s_new = s_old + (mids[ridx] - v)
        S[ridx] = s_new
        total += abs(s_new) - abs(s_old)
        p = sums[ridx] / counts[ridx]
        d = lefts[ridx] - p
        e = p - rights[ridx]
        pot = counts[ridx] * (d if d > e else e)
        if pot > max_pot:
            max_pot = pot
        if t % RESYNC_EVERY == 0:
            total = _abs_sum(S)
        excess = total - t * eps
        if excess > max_excess:
            max_excess = excess
        if ci < ncp and t == checkpoints[ci]:
            total = _abs_sum(S)
            ce[ci] = total / t
            for i in range(m):
                counts_snap[ci, i] = counts[i]
                means_snap[ci, i] = _mean_at(counts, sums, mids, i)
            ci += 1
    return ce, max_excess, max_pot, counts_snap, means_snap


@njit(cache=True)
def foster99_greedy_run(m, T, u01, checkpoints):
    """Drift-cancelling point strategy vs the greedy adversary.

    u01 holds 2T uniforms; round t consumes u01[2t-2] for the forecast
    realization and u01[2t-1] for the outcome, matching the engine's
    draw order.
    """
    mids, lefts, rights = _grid_arrays(m)
    eps = 1.0 / (2 * m)
    counts = np.zeros(m, np.int64)
    sums = np.zeros(m)
    S = np.zeros(m)
    g_total = 0.0  # greedy's incremental-only total, engine-identical
    ncp = checkpoints.shape[0]
    ce = np.zeros(ncp)
    counts_snap = np.zeros((ncp, m), np.int64)
    means_snap = np.zeros((ncp, m))
    ci = 0
    for t in range(1, T + 1):
        b0 = _cond_a(counts, sums, mids, lefts, rights, False)
        b1 = -1
        w0 = 1.0
        if b0 < 0:
            b = _cond_b(counts, sums, mids, lefts, rights, False)
            if b < 0:
                ce[:] = np.nan
                return ce, counts_snap, means_snap
            mean1 = _mean_at(counts, sums, mids, b + 1)
            mean0 = _mean_at(counts, sums, mids, b)
            w = counts[b + 1] * (lefts[b + 1] - mean1)
            z = counts[b] * (mean0 - rights[b])
            if w + z <= 0.0:
                w0 = 0.5
            else:
                w0 = w / (w + z)
            b0 = b
            b1 = b + 1
        # greedy adversary: expected clamped error for each outcome
        if b1 < 0:
            dev1 = mids[b0] - 1.0
            e0 = max((g_total + abs(S[b0] + mids[b0]) - abs(S[b0])) / t - eps, 0.0)
            e1 = max((g_total + abs(S[b0] + dev1) - abs(S[b0])) / t - eps, 0.0)
        else:
            dev1a = mids[b0] - 1.0
            dev1b = mids[b1] - 1.0
            c0a = max((g_total + abs(S[b0] + mids[b0]) - abs(S[b0])) / t - eps, 0.0)
            c0b = max((g_total + abs(S[b1] + mids[b1]) - abs(S[b1])) / t - eps, 0.0)
            c1a = max((g_total + abs(S[b0] + dev1a) - abs(S[b0])) / t - eps, 0.0)
            c1b = max((g_total + abs(S[b1] + dev1b) - abs(S[b1])) / t - eps, 0.0)
            e0 = w0 * c0a + (1.0 - w0) * c0b
            e1 = w0 * c1a + (1.0 - w0) * c1b
        v = 1.0 if e1 >= e0 else 0.0
        uf = u01[2 * (t - 1)]
        if b1 < 0:
            idx = b0
        else:
            idx = b0 if uf < w0 else b1
        uy = u01[2 * (t - 1) + 1]
        y = 1.0 if uy < v else 0.0
        counts[idx] += 1
        sums[idx] += y
        s_old = S[idx]
        s_new = s_old + (mids[idx] - y)
        S[idx] = s_new
        g_total += abs(s_new) - abs(s_old)
        if ci < ncp and t == checkpoints[ci]:
            ce[ci] = _abs_sum(S) / t
            for i in range(m):
                counts_snap[ci, i] = counts[i]
                means_snap[ci, i] = _mean_at(counts, sums, mids, i)
            ci += 1
    return ce, counts_snap, means_snap


@njit(cache=True)
def pif99_bernoulli_run(m, T, p, kk, cum, u01, checkpoints):
    """Doubling-epoch point strategy vs Bernoulli(p).

    kk[k] is the per-bin initialization count of epoch k, cum[k] the
    cumulative round count through epoch k (cum[0] = 0); both come from
    the same schedule object the engine uses. u01 as in
    foster99_greedy_run.
    """
    mids, lefts, rights = _grid_arrays(m)
    eps = 1.0 / (2 * m)
    counts_e = np.zeros(m, np.int64)  # epoch-local strategy state
    sums_e = np.zeros(m)
    counts_g = np.zeros(m, np.int64)  # whole-run state for metrics
    sums_g = np.zeros(m)
    S = np.zeros(m)
    ncp = checkpoints.shape[0]
    ce = np.zeros(ncp)
    counts_snap = np.zeros((ncp, m), np.int64)
    means_snap = np.zeros((ncp, m))
    ci = 0
    k = 1
    for t in range(1, T + 1):
        while t > cum[k]:
            k += 1
            for i in range(m):
                counts_e[i] = 0
                sums_e[i] = 0.0
        tau = t - cum[k - 1]
        kkk = kk[k]
        b0 = 0
        b1 = -1
        w0 = 1.0
        if tau <= m * kkk:
            b0 = (tau - 1) // kkk
        else:
            b0 = _cond_a(counts_e, sums_e, mids, lefts, rights, False)
            if b0 < 0:
                b = _cond_b(counts_e, sums_e, mids, lefts, rights, False)
                if b < 0:
                    ce[:] = np.nan
                    return ce, counts_snap, means_snap
                mean1 = _mean_at(counts_e, sums_e, mids, b + 1)
                mean0 = _mean_at(counts_e, sums_e, mids, b)
                w = counts_e[b + 1] * (lefts[b + 1] - mean1)
                z = counts_e[b] * (mean0 - rights[b])
                if w + z <= 0.0:
                    w0 = 0.5
                else:
                    w0 = w / (w + z)
                b0 = b
                b1 = b + 1
        uf = u01[2 * (t - 1)]
        if b1 < 0:
            idx = b0
        else:
            idx = b0 if uf < w0 else b1
        uy = u01[2 * (t - 1) + 1]
        y = 1.0 if uy < p else 0.0
        counts_e[idx] += 1
        sums_e[idx] += y
        counts_g[idx] += 1
        sums_g[idx] += y
        S[idx] += mids[idx] - y
        if ci < ncp and t == checkpoints[ci]:
            ce[ci] = _abs_sum(S) / t
            for i in range(m):
                counts_snap[ci, i] = counts_g[i]
                means_snap[ci, i] = _mean_at(counts_g, sums_g, mids, i)
            ci += 1
    return ce, counts_snap, means_snap


# --- Python-side wrappers -------------------------------------------------


@dataclass(frozen=True, eq=False)
class FastRun:
    """Checkpoint metrics and run-level maxima from one kernel run."""

    ts: np.ndarray
    ce: np.ndarray
    eps_ce: np.ndarray
    counts: np.ndarray
    means: np.ndarray
    max_excess: float | None = None
    max_potential: float | None = None


_BINARY_MODES = {"greedy": 0, "constant:0": 1, "constant:1": 2, "alternating": 3}


def _finish(m, cps, ce, counts, means, max_excess=None, max_potential=None) -> FastRun:
    if np.isnan(ce).any():
        raise RuntimeError("kernel hit an unplayable state: deficit/excess dichotomy violated")
    eps = 1.0 / (2 * m)
    return FastRun(
        ts=cps,
        ce=ce,
        eps_ce=np.maximum(ce - eps, 0.0),
        counts=counts,
        means=means,
        max_excess=max_excess,
        max_potential=max_potential,
    )


def fast_potc_binary(
    m: int, T: int, nature: str, seed: int | None, checkpoints, tie_break: str = "smallest"
) -> FastRun:
    cps = np.asarray(checkpoints, dtype=np.int64)
    largest = tie_break == "largest"
    outcomes = np.empty(0)
    if nature in _BINARY_MODES:
        mode = _BINARY_MODES[nature]
    elif nature.startswith("bernoulli:"):
        if seed is None:
            raise ValueError("bernoulli nature needs a seed")
        p = float(nature.split(":", 1)[1])
        outcomes = (np.random.default_rng(seed).random(T) < p).astype(np.float64)
        mode = 4
    else:
        raise ValueError(f"no binary-game kernel for nature {nature!r}")
    ce, max_excess, max_pot, counts, means = potc_binary_run(m, T, mode, outcomes, cps, largest)
    return _finish(m, cps, ce, counts, means, float(max_excess), float(max_pot))


def fast_potc_bounded(
    m: int, T: int, nature: str, seed: int | None, checkpoints, tie_break: str = "smallest"
) -> FastRun:
    cps = np.asarray(checkpoints, dtype=np.int64)
    largest = tie_break == "largest"
    delta = 0.0
    if nature == "uniform-v":
        if seed is None:
            raise ValueError("uniform-v nature needs a seed")
        values = np.random.default_rng(seed).random(T)
        mode = 0
    elif nature.startswith("boundary:"):
        delta = float(nature.split(":", 1)[1])
        values = np.empty(0)
        mode = 1
    elif nature.startswith("bernoulli:"):
        values = np.array([float(nature.split(":", 1)[1])])
        mode = 2
    elif nature == "midpoint":
        values = np.array([1.0 / m])
        mode = 2
    elif nature.startswith("constant:"):
        values = np.array([float(int(nature.split(":", 1)[1]))])
        mode = 2
    else:
        raise ValueError(f"no bounded-game kernel for nature {nature!r}")
    ce, max_excess, max_pot, counts, means = potc_bounded_run(
        m, T, mode, values, delta, cps, largest
    )
    return _finish(m, cps, ce, counts, means, float(max_excess), float(max_pot))


def fast_foster99_greedy(m: int, T: int, seed: int, checkpoints) -> FastRun:
    cps = np.asarray(checkpoints, dtype=np.int64)
    u01 = np.random.default_rng(seed).random(2 * T)
    ce, counts, means = foster99_greedy_run(m, T, u01, cps)
    return _finish(m, cps, ce, counts, means)


def fast_pif99_bernoulli(
    schedule: DoublingSchedule, T: int, p: float, seed: int, checkpoints
) -> FastRun:
    m = schedule.grid.m
    cps = np.asarray(checkpoints, dtype=np.int64)
    # the kernel's segment index is epoch + 1: segment k spans
    # (cum[k-1], cum[k]] and uses kk[k] = K_{k-1} of the schedule
    kmax = schedule.epoch_of(T) + 1
    cum = np.array([schedule.cumulative(k) for k in range(kmax + 1)], dtype=np.int64)
    kk = np.array([0] + [schedule.k_k(k - 1) for k in range(1, kmax + 1)], dtype=np.int64)
    u01 = np.random.default_rng(seed).random(2 * T)
    ce, counts, means = pif99_bernoulli_run(m, T, p, kk, cum, u01, cps)
    return _finish(m, cps, ce, counts, means)
