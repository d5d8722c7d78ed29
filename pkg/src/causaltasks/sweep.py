"""Exhaustive single-call vs multi-call comparison over a lattice window.

Enumerates every valid token task with ``n_pairs`` pairs in the window and
decides both modes with a compiled backward-induction kernel.  The kernel
solves the same game as :func:`causaltasks.token.token_feasible`, indexed
by ``(t, x, pattern)`` where the pattern stands for its knowledge class at
``(t, x)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InputError, ResourceLimitError
from .geometry import Point
from .tasks import CallMode, CallReturnPair, SummoningTask, subsets
from .token import Window

DEFAULT_WINDOW = Window(-4, 4, 6)
MAX_SWEEP_TASKS = 50_000_000


@njit(cache=True)
def _solve(row, n, pats, x_min, x_max, win):
    st = row[0]
    sx = row[1]
    horizon = st
    for i in range(n):
        if row[2 + 4 * i + 2] > horizon:
            horizon = row[2 + 4 * i + 2]
    width = x_max - x_min + 1
    m = pats.shape[0]
    for t in range(horizon, st - 1, -1):
        ti = t - st
        # only the start's future cone is ever reached
        lo = max(0, sx - x_min - ti)
        hi = min(width - 1, sx - x_min + ti)
        for xi in range(lo, hi + 1):
            x = x_min + xi
            known = 0
            ret = 0
            for i in range(n):
                ct = row[2 + 4 * i]
                cx = row[3 + 4 * i]
                dt = t - ct
                if dt >= 0 and dt >= abs(x - cx):
                    known |= 1 << i
                if row[4 + 4 * i] == t and row[5 + 4 * i] == x:
                    ret |= 1 << i
            for p in range(m):
                key = pats[p] & known
                res = True
                for q in range(m):
                    if (pats[q] & known) == key and (pats[q] & ret) == 0:
                        res = False
                        break
                if not res and t < horizon:
                    for dx in range(-1, 2):
                        nxi = xi + dx
                        if nxi < 0 or nxi >= width:
                            continue
                        good = True
                        for q in range(m):
                            if (pats[q] & known) == key and not win[ti + 1, nxi, q]:
                                good = False
                                break
                        if good:
                            res = True
                            break
                win[ti, xi, p] = res
    for p in range(m):
        if not win[0, sx - x_min, p]:
            return False
    return True


@njit(cache=True)
def _solve_batch(rows, n, pats, x_min, x_max, t_span, out):
    win = np.zeros((t_span + 1, x_max - x_min + 1, pats.shape[0]), dtype=np.bool_)
    for k in range(rows.shape[0]):
        out[k] = _solve(rows[k], n, pats, x_min, x_max, win)


def pattern_masks(n: int, mode: CallMode) -> np.ndarray:
    if mode is CallMode.SINGLE:
        return np.array([1 << i for i in range(n)], dtype=np.int64)
    return np.array([sum(1 << (i - 1) for i in s) for s in subsets(list(range(1, n + 1)))], dtype=np.int64)


def task_row(task: SummoningTask) -> np.ndarray:
    vals = [task.start.t, task.start.pos]
    for p in task.pairs:
        vals += [p.call.t, p.call.pos, p.ret.t, p.ret.pos]
    return np.array(vals, dtype=np.int64)


def row_task(row, n: int, mode: CallMode = CallMode.SINGLE) -> SummoningTask:
    row = [int(v) for v in row]
    pairs = tuple(CallReturnPair(Point(row[2 + 4 * i], (row[3 + 4 * i],)), Point(row[4 + 4 * i], (row[5 + 4 * i],)))
                  for i in range(n))
    return SummoningTask(Point(row[0], (row[1],)), pairs, mode)


def batch_feasible(rows: np.ndarray, n: int, mode: CallMode, window: Window) -> np.ndarray:
    """Feasibility of every task row (start t, x, then ct, cx, rt, rx per pair) in ``mode``."""
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    out = np.zeros(rows.shape[0], dtype=np.bool_)
    if rows.shape[0]:
        _solve_batch(rows, n, pattern_masks(n, mode), window.x_min, window.x_max,
                     window.t_max - window.t_min, out)
    return out


# --------------------------------------------------------------- enumeration


def _points(window: Window) -> np.ndarray:
    return np.array([(t, x) for t in range(window.t_min, window.t_max + 1)
                     for x in range(window.x_min, window.x_max + 1)], dtype=np.int64)


def _after(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise: is ``b`` strictly in the causal future of ``a``."""
    dt = b[..., 0] - a[..., 0]
    return (dt > 0) & (dt * dt >= (b[..., 1] - a[..., 1]) ** 2)


def valid_pairs(window: Window) -> np.ndarray:
    """All ``(ct, cx, rt, rx)`` with the return strictly after the call, lexicographic."""
    pts = _points(window)
    ci, ri = np.nonzero(_after(pts[:, None, :], pts[None, :, :]))
    pairs = np.concatenate([pts[ci], pts[ri]], axis=1)
    order = np.lexsort(pairs.T[::-1])
    return pairs[order]


def _combos(m: int, k: int) -> np.ndarray:
    if k == 1:
        return np.arange(m).reshape(-1, 1)
    if k == 2:
        a, b = np.triu_indices(m, 1)
        return np.stack([a, b], axis=1)
    return np.array(list(itertools.combinations(range(m), k)), dtype=np.int64).reshape(-1, k)


def _count(m: int, k: int) -> int:
    from math import comb
    return comb(m, k)


def _start_pairs(window: Window):
    pts = _points(window)
    pairs = valid_pairs(window)
    for s in pts:
        ok = _after(s[None, :], pairs[:, 2:4])
        yield s, pairs[ok]


def count_tasks(window: Window, n_pairs: int) -> int:
    return sum(_count(len(pp), n_pairs) for _, pp in _start_pairs(window))


def task_rows(window: Window, n_pairs: int):
    """Yield one array of task rows per start point, in canonical order."""
    for s, pp in _start_pairs(window):
        idx = _combos(len(pp), n_pairs)
        if not len(idx):
            continue
        rows = np.empty((len(idx), 2 + 4 * n_pairs), dtype=np.int64)
        rows[:, 0:2] = s
        for j in range(n_pairs):
            rows[:, 2 + 4 * j:6 + 4 * j] = pp[idx[:, j]]
        yield rows


# --------------------------------------------------------------------- sweep


@dataclass(frozen=True)
class SweepReport:
    window: Window
    n_pairs: int
    tasks: int
    single_feasible: int
    multi_feasible: int
    counterexamples: tuple[SummoningTask, ...]


def _sweep_chunk(rows: np.ndarray, n: int, window: Window):
    single = batch_feasible(rows, n, CallMode.SINGLE, window)
    multi = batch_feasible(rows, n, CallMode.MULTIPLE, window)
    bad = rows[single & ~multi]
    return len(rows), int(single.sum()), int(multi.sum()), bad


def monotonicity_sweep(window: Window = DEFAULT_WINDOW, n_pairs: int = 2, *, workers: int = 1,
                       max_tasks: int = MAX_SWEEP_TASKS) -> SweepReport:
    """Every valid task in ``window`` that single-call mode can do but multi-call mode cannot."""
    if n_pairs < 1:
        raise InputError("n_pairs must be ≥ 1")
    total = count_tasks(window, n_pairs)
    if total > max_tasks:
        raise ResourceLimitError(f"sweep would enumerate more than {max_tasks} tasks", total)
    chunks = list(task_rows(window, n_pairs))
    if workers > 1 and len(chunks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_chunk, chunks, [n_pairs] * len(chunks), [window] * len(chunks)))
    else:
        results = [_sweep_chunk(c, n_pairs, window) for c in chunks]
    tasks = sum(r[0] for r in results)
    single = sum(r[1] for r in results)
    multi = sum(r[2] for r in results)
    bad = tuple(row_task(row, n_pairs) for r in results for row in r[3])
    return SweepReport(window, n_pairs, tasks, single, multi, bad)
