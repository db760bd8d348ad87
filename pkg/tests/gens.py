"""Shared random generators and independent oracles for the test suite.

The oracles here deliberately avoid the code paths they are used to
check: the block scanner looks at raw color sequences, the subformula
counter enumerates trees, and colorings are stamped directly onto
lassos.
"""

from __future__ import annotations

import math
import random

from promptsynth.formulas import (
    And,
    Atom,
    FALSE,
    Formula,
    Lasso,
    NotAtom,
    Next,
    Or,
    PromptF,
    Release,
    TRUE,
    Until,
)

_BIN = [And, Or, Until, Release]


def random_formula(
    rng: random.Random,
    props: list[str],
    max_size: int,
    allow_prompt: bool = False,
) -> Formula:
    """Random NNF formula with at most ``max_size`` syntax nodes."""
    if max_size <= 1:
        choice = rng.randrange(6)
        if choice == 0:
            return TRUE
        if choice == 1:
            return FALSE
        name = rng.choice(props)
        return Atom(name) if rng.random() < 0.5 else NotAtom(name)
    roll = rng.random()
    if roll < 0.2:
        return random_formula(rng, props, 1, allow_prompt)
    if max_size < 3 or roll < 0.45:
        arg = random_formula(rng, props, max_size - 1, allow_prompt)
        if allow_prompt and rng.random() < 0.3:
            return PromptF(arg)
        return Next(arg)
    op = rng.choice(_BIN)
    left_budget = rng.randint(1, max_size - 2)
    left = random_formula(rng, props, left_budget, allow_prompt)
    right = random_formula(rng, props, max_size - 1 - left_budget, allow_prompt)
    return op(left, right)


def random_lasso(
    rng: random.Random,
    props: list[str],
    max_prefix: int = 4,
    max_loop: int = 4,
) -> Lasso:
    def vals(count):
        return tuple(
            frozenset(p for p in props if rng.random() < 0.5) for _ in range(count)
        )

    return Lasso(vals(rng.randint(0, max_prefix)), vals(rng.randint(1, max_loop)))


# ---------------------------------------------------------------------------
# Color-block oracle

def color_sequence(w: Lasso, color: str, steps: int) -> list[bool]:
    return [color in w.valuation(i) for i in range(steps)]


def block_view(w: Lasso, color: str) -> tuple[bool, int, int]:
    """(infinitely many change points, max block length, min block length).

    Block lengths are taken over all blocks of the infinite word; the
    lengths are meaningful only when change points are infinite, since
    otherwise the last block never ends.
    """
    plen, llen = len(w.prefix), len(w.loop)
    loop_colors = [color in v for v in w.loop]
    infinite = any(
        loop_colors[i] != loop_colors[(i + 1) % llen] for i in range(llen)
    )
    if not infinite:
        return False, -1, -1
    # All block lengths stabilize within the prefix plus a few loop turns.
    steps = plen + 4 * llen
    seq = color_sequence(w, color, steps + 1)
    lengths = []
    start = 0
    for i in range(1, steps + 1):
        if seq[i] != seq[i - 1]:
            lengths.append(i - start)
            start = i
    return True, max(lengths), min(lengths)


def is_k_bounded(w: Lasso, color: str, k: int) -> bool:
    infinite, longest, _ = block_view(w, color)
    return infinite and longest <= k


def is_k_spaced(w: Lasso, color: str, k: int) -> bool:
    infinite, _, shortest = block_view(w, color)
    return infinite and shortest >= k


# ---------------------------------------------------------------------------
# Coloring constructors

def stamp_spaced_coloring(w: Lasso, color: str, block: int, start_on: bool) -> Lasso:
    """Overlay a periodic coloring with constant block length onto ``w``.

    The loop is unrolled so that the stamped pattern closes; every block
    has length exactly ``block``, so the result is block-spaced and
    block-bounded at the same time.
    """
    plen, llen = len(w.prefix), len(w.loop)
    period = 2 * block
    unrolled = llen * period // math.gcd(llen, period)

    def colored(pos: int) -> frozenset:
        on = (pos // block) % 2 == (0 if start_on else 1)
        v = w.valuation(pos)
        return v | {color} if on else v

    prefix = tuple(colored(i) for i in range(plen))
    loop = tuple(colored(plen + i) for i in range(unrolled))
    return Lasso(prefix, loop)


def random_bounded_coloring(rng: random.Random, w: Lasso, color: str, k: int) -> Lasso:
    """Random coloring of ``w`` with all blocks of length at most ``k``.

    Rejection-sampled against the block oracle; the loop may be unrolled
    a few turns so the color pattern can close.
    """
    plen, llen = len(w.prefix), len(w.loop)

    def alternating(span: int) -> list[bool]:
        flags: list[bool] = []
        on = rng.random() < 0.5
        while len(flags) < span:
            flags.extend([on] * rng.randint(1, k))
            on = not on
        del flags[span:]
        return flags

    def paint(v, on):
        return v | {color} if on else v

    for _ in range(200):
        turns = rng.choice([1, 2, 2, 3, 4])
        span = llen * turns
        loop_flags = alternating(span)
        prefix_flags = alternating(plen)
        prefix = tuple(paint(w.prefix[i], prefix_flags[i]) for i in range(plen))
        loop = tuple(paint(w.loop[i % llen], loop_flags[i]) for i in range(span))
        candidate = Lasso(prefix, loop)
        if is_k_bounded(candidate, color, k):
            return candidate
    raise AssertionError("failed to sample a bounded coloring")


# ---------------------------------------------------------------------------
# Brute-force subformula oracle

def enumerate_subtrees(f: Formula) -> set[Formula]:
    out = {f}
    if isinstance(f, (And, Or, Until, Release)):
        out |= enumerate_subtrees(f.left)
        out |= enumerate_subtrees(f.right)
    elif isinstance(f, (Next, PromptF)):
        out |= enumerate_subtrees(f.arg)
    return out
