"""Binary erasure channel: MAP decoding and failure-probability analysis.

Received words are int8 vectors over {0, 1, ERASED}.  The decoder solves the
unerased restriction of the generator system; when several codewords agree on
the surviving bits it picks one uniformly at random, which is where decoding
failures come from.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import gf2
from .codes import LinearCode
from .errors import CapacityError, InvariantViolation
from .stats import FailureEstimate, as_fraction

ERASED = -1

EXHAUSTIVE_CAP = 20


def capacity(alpha: float) -> float:
    """Channel capacity at erasure probability alpha."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    return 1.0 - alpha


@dataclass
class ErasureObservation:
    """Channel output: -1 marks an erased coordinate."""

    y: np.ndarray

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.int8)
        if self.y.ndim != 1:
            raise ValueError("observation must be a vector")
        if self.y.size and (self.y.min() < -1 or self.y.max() > 1):
            raise ValueError("entries must be 0, 1, or ERASED (-1)")

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def erased_set(self) -> np.ndarray:
        return np.flatnonzero(self.y == ERASED)

    @property
    def unerased_set(self) -> np.ndarray:
        return np.flatnonzero(self.y != ERASED)


@dataclass
class DecodeOutcome:
    message_estimate: np.ndarray
    success: bool
    ambiguity_dim: int


@dataclass
class FailureBound:
    """Piecewise failure-probability value: exactly zero, exact, or an upper bound."""

    value: Fraction
    regime: str  # "zero" | "exact" | "upper"


def erase(codeword, erased) -> ErasureObservation:
    """Erase the given coordinates of a codeword."""
    c = gf2.as_bit_vector(codeword)
    erased = np.asarray(erased, dtype=np.intp)
    if erased.size and (erased.min() < 0 or erased.max() >= c.shape[0]):
        raise ValueError("erasure index out of range")
    y = c.astype(np.int8)
    y[erased] = ERASED
    return ErasureObservation(y)


def sample_erasures(n: int, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Each coordinate is erased independently with probability alpha."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    return np.flatnonzero(rng.random(n) < alpha)


def map_decode_generator(code: LinearCode, obs: ErasureObservation, true_message,
                         rng: np.random.Generator) -> DecodeOutcome:
    """Solve the unerased generator equations; break ties uniformly at random."""
    if obs.n != code.n:
        raise ValueError(f"observation length {obs.n} != blocklength {code.n}")
    true_message = gf2.as_bit_vector(true_message, code.k)
    kept = obs.unerased_set
    space = gf2.solve(code.G[kept], obs.y[kept].astype(np.uint8))
    if space.status == "inconsistent":
        raise InvariantViolation("received word agrees with no codeword; input is corrupted")
    estimate = space.sample(rng) if space.dimension else space.particular
    return DecodeOutcome(estimate, bool(np.array_equal(estimate, true_message)),
                         space.dimension)


def map_decode_parity(code: LinearCode, obs: ErasureObservation) -> gf2.SolutionSpace:
    """Solution space for the erased coordinates via the parity-check equations."""
    if obs.n != code.n:
        raise ValueError(f"observation length {obs.n} != blocklength {code.n}")
    erased = obs.erased_set
    kept = obs.unerased_set
    syndrome_target = gf2.mat_mul(code.H[kept].T, obs.y[kept].astype(np.uint8))
    return gf2.solve(code.H[erased].T, syndrome_target)


def conditional_failure_exact(code: LinearCode, erased) -> Fraction:
    """Failure probability of random tie-breaking given the erasure pattern."""
    erased = np.asarray(erased, dtype=np.intp)
    if erased.size and (erased.min() < 0 or erased.max() >= code.n):
        raise ValueError("erasure index out of range")
    rows = [code.h_rows_packed[i] for i in erased]
    j = len(rows) - _packed_rank(rows)
    return Fraction((1 << j) - 1, 1 << j)


def _packed_rank(rows) -> int:
    rref = gf2._OnlineRref()
    for row in rows:
        rref.insert(row)
    return len(rref.pivots)


def failure_bound(n: int, e: int, d: int, wd) -> FailureBound:
    """Piecewise conditional failure probability for e erasures.

    Below the minimum distance the failure probability is exactly zero; in
    the window d <= e <= d + floor((d-1)/2) the halved weight-enumerator sum
    is exact; beyond it the unhalved sum is only an upper bound (clamped to 1).
    """
    if not (0 <= e <= n) or not (1 <= d <= n):
        raise ValueError(f"need 0 <= e <= n and 1 <= d <= n, got n={n}, e={e}, d={d}")
    wd = tuple(int(x) for x in wd)
    if len(wd) != n + 1 or wd[0] != 1:
        raise ValueError("weight distribution must have n+1 entries and start at 1")
    if any(wd[w] for w in range(1, d)):
        raise ValueError("weight distribution is inconsistent with the claimed distance")
    if e < d:
        return FailureBound(Fraction(0), "zero")
    total = sum(wd[w] * comb(n - w, e - w) for w in range(d, e + 1))
    ratio = Fraction(total, comb(n, e))
    if e <= d + (d - 1) // 2:
        return FailureBound(ratio / 2, "exact")
    return FailureBound(min(ratio, Fraction(1)), "upper")


def failure_prob(code: LinearCode, alpha, mode: str = "exhaustive", *,
                 trials: int = 10_000, seed: int = 0,
                 rng: np.random.Generator | None = None) -> FailureEstimate:
    """Overall P(decoding failure) at erasure probability alpha.

    Exhaustive mode sums the exact conditional failure over every erasure
    pattern with exact rational pattern weights.  Monte Carlo mode simulates
    encode/erase/decode trials and reports a Wilson 95% interval.
    """
    if mode == "exhaustive":
        return FailureEstimate.from_exact(_exhaustive_failure(code, as_fraction(alpha)))
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    alpha = float(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
    failures = 0
    for chunk in _chunk_sizes(trials):
        failures += _mc_decode_failures(code, alpha, chunk, rng)
    return FailureEstimate.from_counts(failures, trials)


def _chunk_sizes(total: int, chunk: int = 1 << 16):
    while total > 0:
        yield min(total, chunk)
        total -= chunk


def _mc_decode_failures(code: LinearCode, alpha: float, trials: int,
                        rng: np.random.Generator) -> int:
    """Simulate encode/erase/decode trials on packed words; count failures.

    Equivalent to map_decode_generator per trial (same solve, same uniform
    tie-break), with the sampling and the encoding done in bulk.
    """
    n, k = code.n, code.k
    g_rows = code.g_rows_packed
    messages = rng.integers(0, 2, (trials, k), dtype=np.uint8)
    codewords = gf2.pack_rows((messages @ code.G.T.astype(np.int64)) % 2)
    masks = gf2.pack_rows((rng.random((trials, n)) < alpha).astype(np.uint8))
    msg_ints = gf2.pack_rows(messages)
    full = (1 << n) - 1
    failures = 0
    for m_int, c_int, mask in zip(msg_ints, codewords, masks):
        rows = []
        rhs = 0
        kept = ~mask & full
        t = 0
        while kept:
            low = kept & -kept
            i = low.bit_length() - 1
            rows.append(g_rows[i])
            if (c_int >> i) & 1:
                rhs |= 1 << t
            t += 1
            kept ^= low
        sol = gf2.solve_packed(rows, k, rhs)
        estimate = sol.particular
        if sol.basis:
            combo = _random_bits(rng, len(sol.basis))
            for idx, vec in enumerate(sol.basis):
                if (combo >> idx) & 1:
                    estimate ^= vec
        if estimate != m_int:
            failures += 1
    return failures


def _random_bits(rng: np.random.Generator, width: int) -> int:
    out = 0
    for shift in range(0, width, 32):
        out |= int(rng.integers(0, 1 << min(32, width - shift))) << shift
    return out


def _exhaustive_failure(code: LinearCode, alpha: Fraction) -> Fraction:
    if code.n > EXHAUSTIVE_CAP:
        raise CapacityError(f"exhaustive mode is capped at n <= {EXHAUSTIVE_CAP}, got n={code.n}")
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    n = code.n
    rows = code.h_rows_packed
    total = Fraction(0)
    for e in range(n + 1):
        if alpha == 0 and e > 0:
            continue
        if alpha == 1 and e < n:
            continue
        weight = alpha ** e * (1 - alpha) ** (n - e)
        pattern_sum = Fraction(0)
        for pattern in itertools.combinations(range(n), e):
            j = e - _packed_rank([rows[i] for i in pattern])
            if j:
                pattern_sum += Fraction((1 << j) - 1, 1 << j)
        total += weight * pattern_sum
    return total
