"""Compiled inner loops. Both take a numpy Generator and advance it in place."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def exchange(money, gen):
    """One tick of unit gifts in a shuffled order; returns the number of units moved.

    Draws exactly 2n uniforms per tick: n for the Fisher-Yates shuffle and
    n for recipient choices (one per action slot, used only if the giver is
    eligible).
    """
    n = money.shape[0]
    u = gen.random(2 * n)
    order = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(u[i] * (i + 1))
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp
    moved = 0
    for s in range(n):
        giver = order[s]
        if money[giver] >= 1:
            r = int(u[n + s] * (n - 1))
            if r >= giver:
                r += 1
            money[giver] -= 1
            money[r] += 1
            moved += 1
    return moved


@njit(cache=True, nogil=True)
def tail_sums(money, bottom_count, top_count):
    """Sum of the ``bottom_count`` smallest and ``top_count`` largest holdings."""
    s = np.sort(money)
    n = s.shape[0]
    bottom = 0
    for i in range(bottom_count):
        bottom += s[i]
    top = 0
    for i in range(n - top_count, n):
        top += s[i]
    return bottom, top


@njit(cache=True, nogil=True)
def exchange_gap(money, gen, bottom_count, top_count):
    """:func:`exchange` followed by :func:`tail_sums`, in one call."""
    moved = exchange(money, gen)
    bottom, top = tail_sums(money, bottom_count, top_count)
    return moved, bottom, top


@njit(cache=True, nogil=True)
def run_span(money, gen, bottom_count, top_count, n_ticks, threshold, stop_on_critical, bottoms, tops):
    """Up to ``n_ticks`` exchange ticks, recording tail sums per tick.

    Stops right after a tick whose gap is <= ``threshold`` when
    ``stop_on_critical`` is set. Returns the number of ticks performed.
    """
    for i in range(n_ticks):
        exchange(money, gen)
        bottom, top = tail_sums(money, bottom_count, top_count)
        bottoms[i] = bottom
        tops[i] = top
        if stop_on_critical and bottom - top <= threshold:
            return i + 1
    return n_ticks
