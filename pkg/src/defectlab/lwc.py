"""Locally rewritable codes: localities, write costs, and LRC-based construction.

The masking code of a LinearCode (the column span of its H) determines how
cheaply a stuck cell can be compensated: a coordinate covered by a light
masking word only drags a few neighbours along when it must be rewritten.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import bdc, gf2
from .codes import ENUM_CAP, LinearCode
from .errors import CapacityError, ConstructionError, LocalityError, MaskingError


@dataclass(frozen=True)
class LwcProfile:
    """Code dimensions plus masking distance and per-coordinate localities."""

    n: int
    k: int
    d_star: int
    r_star: int
    per_coordinate: tuple[int, ...]

    @property
    def is_optimal(self) -> bool:
        return self.d_star == singleton_like_bound(self.n, self.k, self.r_star)


@dataclass(frozen=True)
class CostReport:
    initial_cost: int
    rewrite_cost: int
    bound: int


def masking_codeword_ints(code: LinearCode, cap: int = ENUM_CAP) -> list[int]:
    """All 2^(n-k) masking words (column combinations of H) as packed ints."""
    width = code.n - code.k
    if width > cap:
        raise CapacityError(f"n-k={width} exceeds enumeration cap {cap}")
    cols = gf2.pack_rows(code.H.T)
    words = [0]
    word = 0
    for i in range(1, 1 << width):
        word ^= cols[(i & -i).bit_length() - 1]
        words.append(word)
    return words


def _coverage_weights(code: LinearCode, cap: int) -> list[int | None]:
    """Per coordinate: weight of the lightest masking word covering it."""
    best: list[int | None] = [None] * code.n
    for word in masking_codeword_ints(code, cap):
        if not word:
            continue
        weight = word.bit_count()
        rest = word
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            if best[i] is None or weight < best[i]:
                best[i] = weight
            rest ^= low
    return best


def _locality_at(code: LinearCode, i: int, cap: int) -> int:
    cover = _coverage_weights(code, cap)[i]
    if cover is None:
        raise LocalityError(
            f"coordinate {i} lies outside every masking word; a defect there cannot be compensated")
    return cover - 1


def info_locality(code: LinearCode, i: int, cap: int = ENUM_CAP) -> int:
    """Cells to rewrite when updating the message bit at info coordinate i
    while that cell is stuck."""
    if i not in code.info_positions:
        raise ValueError(f"coordinate {i} is not an information position of {code.name}")
    return _locality_at(code, i, cap)


def parity_locality(code: LinearCode, j: int, cap: int = ENUM_CAP) -> int:
    """Extra cells to write when storing one symbol against a stuck parity
    cell at coordinate j."""
    if j not in code.parity_positions:
        raise ValueError(f"coordinate {j} is not a parity position of {code.name}")
    return _locality_at(code, j, cap)


@lru_cache(maxsize=None)
def rewriting_locality(code: LinearCode, cap: int = ENUM_CAP) -> LwcProfile:
    """Full locality profile; the maximum is the code's rewriting locality."""
    cover = _coverage_weights(code, cap)
    uncovered = [i for i, c in enumerate(cover) if c is None]
    if uncovered:
        raise LocalityError(f"coordinates {uncovered} lie outside every masking word")
    per_coordinate = tuple(c - 1 for c in cover)
    d_star = code.min_distance(cap=max(cap, ENUM_CAP))
    profile = LwcProfile(code.n, code.k, d_star, max(per_coordinate), per_coordinate)
    bound = singleton_like_bound(profile.n, profile.k, profile.r_star)
    if profile.d_star > bound:
        raise AssertionError(f"profile {profile} violates the distance bound {bound}")
    return profile


def cyclic_locality(code: LinearCode, cap: int = ENUM_CAP) -> int:
    """For a cyclic masking code the locality is its minimum distance minus one."""
    if not code.cyclic:
        raise ValueError("rewriting locality shortcut requires a cyclic code")
    d0 = code.dual().min_distance(cap)
    return d0 - 1


def initial_writing_cost(codeword, pattern: bdc.DefectPattern) -> int:
    """Cells physically programmed when first storing into zeroed memory:
    the word's weight minus the defects already stuck at one."""
    codeword = gf2.as_bit_vector(codeword, pattern.n)
    if bdc.error_count(codeword, pattern):
        raise ValueError("codeword does not mask the stuck cells")
    stuck_nonzero = int((pattern.s == 1).sum())
    return int(codeword.sum()) - stuck_nonzero


def rewrite_update(code: LinearCode, stored, message, new_message,
                   pattern: bdc.DefectPattern,
                   cap: int = ENUM_CAP) -> tuple[np.ndarray, CostReport]:
    """Re-encode an update, flipping as few cells as possible.

    Requires at most one stuck cell, and that `stored` encodes `message` and
    masks it.  Ties between equally cheap rewrites go to the lexicographically
    smallest new word.
    """
    message = gf2.as_bit_vector(message, code.k)
    new_message = gf2.as_bit_vector(new_message, code.k)
    stored = gf2.as_bit_vector(stored, code.n)
    if pattern.num_defects > 1:
        raise ValueError("rewrite locality arguments assume at most one stuck cell")
    if not np.array_equal(bdc.decode(code, stored), message):
        raise ValueError("stored word does not encode the current message")
    if bdc.error_count(stored, pattern):
        raise ValueError("stored word does not mask the stuck cell")

    pins = [(int(i), int(pattern.s[i])) for i in pattern.defect_set]
    base = gf2.pack_vector(code.embed(new_message))
    stored_int = gf2.pack_vector(stored)
    best = None
    best_cost = code.n + 1
    for word in masking_codeword_ints(code, cap):
        cand = base ^ word
        if any((cand >> i) & 1 != v for i, v in pins):
            continue
        cost = (cand ^ stored_int).bit_count()
        if cost < best_cost:
            best, best_cost = cand, cost
        elif cost == best_cost and cand != best:
            diff = cand ^ best
            low = (diff & -diff).bit_length() - 1
            if not (cand >> low) & 1:
                best = cand
    if best is None:
        raise MaskingError("no word of the new message's coset matches the stuck cell")
    profile = rewriting_locality(code, cap)
    delta = int((message ^ new_message).sum())
    report = CostReport(initial_cost=initial_writing_cost(stored, pattern),
                        rewrite_cost=best_cost,
                        bound=delta + profile.r_star - 1)
    return gf2.unpack_vector(best, code.n), report


def lwc_from_lrc(h_lrc) -> LinearCode:
    """Reuse a cyclic repair code's parity-check matrix as a masking generator.

    The resulting code has masking distance equal to the repair code's
    minimum distance and rewriting locality one less than the dual distance.
    """
    h_lrc = gf2.as_bit_matrix(h_lrc)
    code = LinearCode.from_parity(h_lrc, name="lwc_from_lrc")
    if not code.closed_under_shift():
        raise ConstructionError("parity-check matrix does not define a cyclic code")
    code.cyclic = True
    return code


def singleton_like_bound(n: int, k: int, r: int) -> int:
    """Distance cap n - k - ceil(k/r) + 2 for locality r."""
    if not 1 <= r <= k <= n:
        raise ValueError(f"need 1 <= r <= k <= n, got n={n}, k={k}, r={r}")
    return n - k - (-(-k // r)) + 2
