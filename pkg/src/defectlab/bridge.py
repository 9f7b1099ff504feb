"""Reductions between erasure quantization, write-once memories, and defects.

An erasure-quantization source over {0, 1, *} maps to a defect pattern: the
determined symbols become stuck cells the quantizer must match, the erasures
become normal cells whose content is free.  A write-once memory state maps
the same way with every stored 1 treated as stuck-at 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bdc, gf2
from .codes import LinearCode

FREE = -1


def beq_rate(alpha: float) -> float:
    """Zero-distortion quantization rate for erasure fraction alpha."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    return 1.0 - alpha


@dataclass
class BeqSource:
    """Source word over {0, 1, FREE}; FREE symbols cost nothing to quantize."""

    samples: np.ndarray
    alpha: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.int8)
        if self.samples.ndim != 1:
            raise ValueError("source must be a vector")
        if self.samples.size and (self.samples.min() < -1 or self.samples.max() > 1):
            raise ValueError("entries must be 0, 1, or FREE (-1)")

    @property
    def n(self) -> int:
        return self.samples.shape[0]


@dataclass
class WomState:
    """Write-once memory cells; a stored 1 can never return to 0."""

    cells: np.ndarray

    def __post_init__(self):
        self.cells = gf2.as_bit_vector(self.cells)

    @property
    def n(self) -> int:
        return self.cells.shape[0]


def sample_source(n: int, alpha: float, rng: np.random.Generator) -> BeqSource:
    """Each symbol is an erasure with probability alpha, else uniform 0/1."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    erased = rng.random(n) < alpha
    values = rng.integers(0, 2, n).astype(np.int8)
    return BeqSource(np.where(erased, np.int8(FREE), values), alpha)


def beq_to_bdc(src: BeqSource) -> bdc.DefectPattern:
    """Erasures become normal cells; determined symbols become stuck cells."""
    return bdc.DefectPattern(src.samples.copy())


def quantize(code: LinearCode, src: BeqSource) -> tuple[np.ndarray, int]:
    """Quantize a source with the masking codebook; distortion counts the
    determined symbols the chosen word fails to match."""
    pattern = beq_to_bdc(src)
    out = bdc.additive_encode(code, np.zeros(code.k, dtype=np.uint8), pattern)
    return out.codeword, out.residual_errors


def wom_to_defects(state: WomState) -> bdc.DefectPattern:
    """Stored ones become stuck-at-1 cells; zeros stay writable."""
    s = np.where(state.cells == 1, np.int8(1), np.int8(FREE))
    return bdc.DefectPattern(s)


def wom_write(code: LinearCode, state: WomState, message) -> tuple[WomState, bool]:
    """Store a message without lowering any cell; on failure the state is kept."""
    out = bdc.additive_encode(code, message, wom_to_defects(state))
    if not out.success:
        return state, False
    new_state = WomState(out.codeword)
    if np.any(new_state.cells < state.cells):
        raise AssertionError("write lowered a cell despite masking success")
    return new_state, True
