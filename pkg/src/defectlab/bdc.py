"""Binary defect channel: stuck-at masking encoders and failure analysis.

The masking role of a LinearCode: its parity-check matrix H generates the
masking code (the encoder may add any column combination of H), its k info
positions carry the message, and its systematic decode map reads the message
back out.  Channel state vectors are int8 over {0, 1, NORMAL}; a stuck cell
outputs its stuck value no matter what is written.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bec, gf2
from .codes import LinearCode
from .errors import CapacityError
from .stats import FailureEstimate, as_fraction

NORMAL = -1

EXHAUSTIVE_CAP = 20
MDE_CAP = 20


def capacity(beta: float) -> float:
    """Channel capacity at defect probability beta (state known to the encoder)."""
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    return 1.0 - beta


@dataclass
class DefectPattern:
    """Memory state: -1 marks a normal cell, 0/1 a stuck-at value."""

    s: np.ndarray

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=np.int8)
        if self.s.ndim != 1:
            raise ValueError("state must be a vector")
        if self.s.size and (self.s.min() < -1 or self.s.max() > 1):
            raise ValueError("entries must be 0, 1, or NORMAL (-1)")
        self.defect_set = np.flatnonzero(self.s != NORMAL)

    @property
    def n(self) -> int:
        return self.s.shape[0]

    @property
    def normal_set(self) -> np.ndarray:
        return np.flatnonzero(self.s == NORMAL)

    @property
    def num_defects(self) -> int:
        return self.defect_set.size

    @classmethod
    def all_normal(cls, n: int) -> "DefectPattern":
        return cls(np.full(n, NORMAL, dtype=np.int8))

    @classmethod
    def from_stuck(cls, n: int, stuck: dict[int, int]) -> "DefectPattern":
        s = np.full(n, NORMAL, dtype=np.int8)
        for i, v in stuck.items():
            s[i] = v
        return cls(s)


@dataclass
class EncodeOutcome:
    """Result of a masking attempt; success means every stuck cell is matched."""

    codeword: np.ndarray
    parity: np.ndarray
    success: bool
    residual_errors: int


def apply_channel(x, pattern: DefectPattern) -> np.ndarray:
    """Write x through the memory: stuck cells output their stuck value."""
    x = gf2.as_bit_vector(x)
    if x.shape[0] != pattern.n:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {pattern.n}")
    y = x.copy()
    defects = pattern.defect_set
    y[defects] = pattern.s[defects]
    return y


def error_count(x, pattern: DefectPattern) -> int:
    """Number of cells whose readback differs from what was written."""
    x = gf2.as_bit_vector(x)
    if x.shape[0] != pattern.n:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {pattern.n}")
    defects = pattern.defect_set
    return int((x[defects] != pattern.s[defects]).sum())


def sample_defects(n: int, beta: float, rng: np.random.Generator,
                   stuck_one_prob: float = 0.5) -> DefectPattern:
    """Each cell is stuck independently with probability beta, value Bernoulli."""
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    stuck = rng.random(n) < beta
    values = (rng.random(n) < stuck_one_prob).astype(np.int8)
    s = np.where(stuck, values, np.int8(NORMAL)).astype(np.int8)
    return DefectPattern(s)


def _check_instance(code: LinearCode, message, pattern: DefectPattern):
    message = gf2.as_bit_vector(message, code.k)
    if pattern.n != code.n:
        raise ValueError(f"state length {pattern.n} != blocklength {code.n}")
    return message


def additive_encode(code: LinearCode, message, pattern: DefectPattern) -> EncodeOutcome:
    """Mask defects by solving for a parity vector; free parities default to 0.

    When no exact masking exists, the codeword from the consistent subsystem
    (earlier stuck cells take priority) is returned with its residual count.
    """
    message = _check_instance(code, message, pattern)
    base = code.embed(message)
    defects = pattern.defect_set
    stuck = pattern.s[defects].astype(np.uint8)
    rows = [code.h_rows_packed[i] for i in defects]
    rhs = gf2.pack_vector(base[defects] ^ stuck)
    sol = gf2.solve_packed(rows, code.n - code.k, rhs)
    parity = gf2.unpack_vector(sol.particular, code.n - code.k)
    codeword = base ^ gf2.mat_mul(code.H, parity)
    residual = error_count(codeword, pattern)
    return EncodeOutcome(codeword, parity, residual == 0, residual)


def mde_encode(code: LinearCode, message, pattern: DefectPattern,
               cap: int = MDE_CAP) -> EncodeOutcome:
    """Exhaustive error-minimizing encoder; ties go to the smallest parity."""
    width = code.n - code.k
    if width > cap:
        raise CapacityError(f"n-k={width} exceeds the exhaustive parity cap {cap}")
    message = _check_instance(code, message, pattern)
    base = code.embed(message)
    defects = pattern.defect_set
    stuck = pattern.s[defects].astype(np.uint8)
    restricted_cols = gf2.pack_rows(code.H[defects].T)  # column j of the masking generator on U
    target = gf2.pack_vector(base[defects] ^ stuck)

    best_parity = 0
    best_residual = target.bit_count()
    parity_word = 0
    mismatch = target
    for i in range(1, 1 << width):
        bit = (i & -i).bit_length() - 1
        parity_word ^= 1 << bit
        mismatch ^= restricted_cols[bit]
        residual = mismatch.bit_count()
        if residual < best_residual:
            best_residual, best_parity = residual, parity_word
        elif residual == best_residual and parity_word != best_parity:
            low = ((parity_word ^ best_parity) & -(parity_word ^ best_parity)).bit_length() - 1
            if not (parity_word >> low) & 1:
                best_parity = parity_word
    parity = gf2.unpack_vector(best_parity, width)
    codeword = base ^ gf2.mat_mul(code.H, parity)
    assert error_count(codeword, pattern) == best_residual
    return EncodeOutcome(codeword, parity, best_residual == 0, best_residual)


def binning_encode(code: LinearCode, message, pattern: DefectPattern) -> EncodeOutcome:
    """Pick a codeword of the message's coset that agrees with the stuck cells.

    The system stacks the k syndrome equations (always satisfiable) above one
    pin equation per stuck cell, so a failed attempt still decodes to the
    requested message and its residual counts the unsatisfiable pins.
    """
    message = _check_instance(code, message, pattern)
    defects = pattern.defect_set
    stuck = pattern.s[defects].astype(np.uint8)
    rows = list(code.decode_rows_packed) + [1 << int(i) for i in defects]
    rhs = gf2.pack_vector(message) | (gf2.pack_vector(stuck) << code.k)
    sol = gf2.solve_packed(rows, code.n, rhs)
    codeword = gf2.unpack_vector(sol.particular, code.n)
    masking_word = codeword ^ code.embed(message)
    parity = gf2.mat_mul(code.h_left_inverse, masking_word)
    residual = error_count(codeword, pattern)
    return EncodeOutcome(codeword, parity, residual == 0, residual)


def decode(code: LinearCode, y) -> np.ndarray:
    """Read the message back through the systematic decode map."""
    y = gf2.as_bit_vector(y, code.n)
    return gf2.mat_mul(code.decode_map, y)


def conditional_encfail_exact(code: LinearCode, defect_set) -> Fraction:
    """Masking failure probability over uniform stuck values, given the locations."""
    defect_set = np.asarray(defect_set, dtype=np.intp)
    if defect_set.size and (defect_set.min() < 0 or defect_set.max() >= code.n):
        raise ValueError("defect index out of range")
    rows = [code.h_rows_packed[i] for i in defect_set]
    rref = gf2._OnlineRref()
    for row in rows:
        rref.insert(row)
    j = len(rows) - len(rref.pivots)
    return Fraction((1 << j) - 1, 1 << j)


def enc_failure_bound(n: int, u: int, d_star: int, wd_dual) -> bec.FailureBound:
    """Piecewise masking-failure value for u defects; mirrors the erasure side
    with the masking distance and the dual weight distribution."""
    return bec.failure_bound(n, u, d_star, wd_dual)


def enc_failure_prob(code: LinearCode, beta, mode: str = "exhaustive", *,
                     trials: int = 10_000, seed: int = 0,
                     rng: np.random.Generator | None = None) -> FailureEstimate:
    """Overall P(masking failure) at defect probability beta."""
    if mode == "exhaustive":
        return FailureEstimate.from_exact(_exhaustive_encfail(code, as_fraction(beta)))
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    beta = float(beta)
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
    failures = 0
    for chunk in bec._chunk_sizes(trials):
        failures += _mc_masking_failures(code, beta, chunk, rng)
    return FailureEstimate.from_counts(failures, trials)


def _mc_masking_failures(code: LinearCode, beta: float, trials: int,
                         rng: np.random.Generator) -> int:
    """Simulate message/state draws and the solvability of the parity system.

    Matches additive_encode's success indicator trial for trial; sampling and
    message embedding happen in bulk.
    """
    n, k = code.n, code.k
    h_rows = code.h_rows_packed
    width = n - k
    aug = 1 << width
    messages = rng.integers(0, 2, (trials, k), dtype=np.uint8)
    defect_masks = (rng.random((trials, n)) < beta).astype(np.uint8)
    stuck_values = rng.integers(0, 2, (trials, n), dtype=np.uint8)
    embedded = np.zeros((trials, n), dtype=np.uint8)
    if k:
        embedded[:, list(code.info_positions)] = messages
    targets = gf2.pack_rows(embedded ^ stuck_values)
    masks = gf2.pack_rows(defect_masks)
    failures = 0
    for b_int, mask in zip(targets, masks):
        rref = gf2._OnlineRref()
        while mask:
            low = mask & -mask
            i = low.bit_length() - 1
            mask ^= low
            word = rref.reduce(h_rows[i] | (aug if (b_int >> i) & 1 else 0))
            if word == aug:
                failures += 1
                break
            if word:
                rref.insert_reduced(word, (word & -word).bit_length() - 1)
    return failures


def _exhaustive_encfail(code: LinearCode, beta: Fraction) -> Fraction:
    if code.n > EXHAUSTIVE_CAP:
        raise CapacityError(f"exhaustive mode is capped at n <= {EXHAUSTIVE_CAP}, got n={code.n}")
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    n = code.n
    rows = code.h_rows_packed
    total = Fraction(0)
    for u in range(n + 1):
        if beta == 0 and u > 0:
            continue
        if beta == 1 and u < n:
            continue
        weight = beta ** u * (1 - beta) ** (n - u)
        pattern_sum = Fraction(0)
        for pattern in itertools.combinations(range(n), u):
            rref = gf2._OnlineRref()
            for i in pattern:
                rref.insert(rows[i])
            j = u - len(rref.pivots)
            if j:
                pattern_sum += Fraction((1 << j) - 1, 1 << j)
        total += weight * pattern_sum
    return total
