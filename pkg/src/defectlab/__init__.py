"""Channel-coding laboratory for erasures and stuck-at defects."""

from . import bdc, bec, bridge, codes, gf2, lwc, stats
from .codes import (
    LinearCode,
    bch,
    build,
    cyclic_code,
    hamming,
    load_code,
    lrc_pyramid,
    macwilliams_transform,
    reed_muller,
    repetition,
    save_code,
    single_parity,
    two_block,
)
from .gf2 import SolutionSpace, nullspace, rank, solve

__version__ = "0.1.0"
