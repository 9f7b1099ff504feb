"""Binary linear block codes: construction and analysis.

A code is stored column-major: the generator G is n x k (codeword = G @ m),
the parity check H is n x (n-k) with H.T @ G = 0.  Cyclic families carry
their generator polynomial as an integer bit mask (bit i = coefficient of
x^i).  BCH generators come from cyclotomic cosets and minimal polynomials
over GF(2^m), using the primitive polynomials tabulated below.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from . import gf2
from .errors import CapacityError, ConstructionError, InvariantViolation

ENUM_CAP = 24

#: Primitive polynomial per extension degree m (bit i = coefficient of x^i).
PRIMITIVE_POLYS = {
    2: 0b111,        # x^2 + x + 1
    3: 0b1011,       # x^3 + x + 1
    4: 0b10011,      # x^4 + x + 1
    5: 0b100101,     # x^5 + x^2 + 1
    6: 0b1000011,    # x^6 + x + 1
    7: 0b10001001,   # x^7 + x^3 + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}


class LinearCode:
    """Immutable (n, k) binary linear code with cached analysis results."""

    def __init__(self, G, H=None, *, name: str = "", cyclic: bool = False,
                 generator_poly: int | None = None):
        G = gf2.as_bit_matrix(G)
        n, k = G.shape
        if H is None:
            H = _stack_columns(gf2.nullspace(G.T), n)
        H = gf2.as_bit_matrix(H)
        if H.shape != (n, n - k):
            raise ValueError(f"parity check must be {n}x{n - k}, got {H.shape}")
        if gf2.rank(G) != k:
            raise ConstructionError("generator matrix is rank deficient")
        if gf2.rank(H) != n - k:
            raise ConstructionError("parity-check matrix is rank deficient")
        if np.any(gf2.mat_mul(H.T, G)):
            raise ConstructionError("H.T @ G != 0")
        self.G = G
        self.H = H
        self.G.setflags(write=False)
        self.H.setflags(write=False)
        self.name = name or f"code({n},{k})"
        self.cyclic = cyclic
        self.generator_poly = generator_poly

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def k(self) -> int:
        return self.G.shape[1]

    @property
    def rate(self) -> float:
        return self.k / self.n

    def __repr__(self) -> str:
        return f"LinearCode({self.n}, {self.k}, {self.name!r})"

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_generator(cls, G, **meta) -> "LinearCode":
        return cls(G, **meta)

    @classmethod
    def from_parity(cls, H, **meta) -> "LinearCode":
        H = gf2.as_bit_matrix(H)
        n = H.shape[0]
        if gf2.rank(H) != H.shape[1]:
            raise ConstructionError("parity-check matrix is rank deficient")
        G = _stack_columns(gf2.nullspace(H.T), n)
        return cls(G, H, **meta)

    # -- systematic form -----------------------------------------------------

    @cached_property
    def _systematic(self) -> tuple[tuple[int, ...], np.ndarray]:
        reduced, pivots = gf2.rref_with_pivots(self.G.T)
        reduced.setflags(write=False)
        return pivots, reduced

    @property
    def info_positions(self) -> tuple[int, ...]:
        """Coordinates that carry the message symbols verbatim."""
        return self._systematic[0]

    @property
    def parity_positions(self) -> tuple[int, ...]:
        info = set(self.info_positions)
        return tuple(i for i in range(self.n) if i not in info)

    @property
    def decode_map(self) -> np.ndarray:
        """k x n matrix M with M @ c = m for every codeword; M[:, info] = I."""
        return self._systematic[1]

    def embed(self, message) -> np.ndarray:
        """Place a message on the info positions, zeros elsewhere."""
        message = gf2.as_bit_vector(message, self.k)
        x = np.zeros(self.n, dtype=np.uint8)
        x[list(self.info_positions)] = message
        return x

    # -- packed caches used by the channel engines ----------------------------

    @cached_property
    def g_rows_packed(self) -> list[int]:
        return gf2.pack_rows(self.G)

    @cached_property
    def h_rows_packed(self) -> list[int]:
        return gf2.pack_rows(self.H)

    @cached_property
    def decode_rows_packed(self) -> list[int]:
        return gf2.pack_rows(self.decode_map)

    @cached_property
    def h_left_inverse(self) -> np.ndarray:
        """(n-k) x n matrix Q with Q @ H = I."""
        _, rows = gf2.rref_with_pivots(self.H.T)
        q = np.zeros((self.n - self.k, self.n), dtype=np.uint8)
        if rows:
            q[:, list(rows)] = gf2.invert(self.H[list(rows), :])
        q.setflags(write=False)
        return q

    # -- enumeration ----------------------------------------------------------

    def codeword_ints(self, cap: int = ENUM_CAP):
        """All 2^k codewords as packed integers, in Gray-walk order."""
        if self.k > cap:
            raise CapacityError(f"k={self.k} exceeds enumeration cap {cap}")
        cols = gf2.pack_rows(self.G.T)
        return _gray_combinations(cols, self.k)

    def codewords(self, cap: int = ENUM_CAP):
        for word in self.codeword_ints(cap):
            yield gf2.unpack_vector(word, self.n)

    def weight_distribution(self, cap: int = ENUM_CAP) -> tuple[int, ...]:
        """Exact codeword counts by weight, A_0 .. A_n."""
        if getattr(self, "_wd", None) is None:
            if self.k <= cap:
                counts = [0] * (self.n + 1)
                for word in self.codeword_ints(cap):
                    counts[word.bit_count()] += 1
                self._wd = tuple(counts)
            elif self.n - self.k <= cap:
                dual_counts = [0] * (self.n + 1)
                for word in _gray_combinations(gf2.pack_rows(self.H.T), self.n - self.k):
                    dual_counts[word.bit_count()] += 1
                self._wd = macwilliams_transform(tuple(dual_counts), self.n, self.n - self.k)
            else:
                raise CapacityError(
                    f"both k={self.k} and n-k={self.n - self.k} exceed enumeration cap {cap}")
        return self._wd

    def min_distance(self, cap: int = ENUM_CAP) -> int:
        """Smallest nonzero codeword weight."""
        if getattr(self, "_dmin", None) is None:
            if self.k == 0:
                raise ValueError("the zero code has no nonzero codewords")
            wd = self.weight_distribution(cap)
            self._dmin = next(w for w in range(1, self.n + 1) if wd[w])
        return self._dmin

    def dual(self) -> "LinearCode":
        """Swap the generator/parity-check roles."""
        gpoly = None
        if self.generator_poly is not None:
            quotient, _ = _poly_divmod(((1 << self.n) | 1), self.generator_poly)
            gpoly = _poly_reciprocal(quotient, self.k)
        return LinearCode(self.H, self.G, name=f"dual({self.name})",
                          cyclic=self.cyclic, generator_poly=gpoly)

    def closed_under_shift(self) -> bool:
        """True when every cyclic shift of a codeword is again a codeword."""
        shifted = np.roll(self.G, 1, axis=0)
        return gf2.rank(np.hstack([self.G, shifted])) == self.k

    def same_codewords(self, other: "LinearCode") -> bool:
        if (self.n, self.k) != (other.n, other.k):
            return False
        return gf2.rank(np.hstack([self.G, other.G])) == self.k


def _stack_columns(vectors, n: int) -> np.ndarray:
    if not vectors:
        return np.zeros((n, 0), dtype=np.uint8)
    return np.stack(vectors, axis=1)


def _gray_combinations(generators: list[int], dim: int):
    word = 0
    yield word
    for i in range(1, 1 << dim):
        word ^= generators[(i & -i).bit_length() - 1]
        yield word


# -- weight enumerator algebra ------------------------------------------------

def macwilliams_transform(counts, n: int, k: int) -> tuple[int, ...]:
    """Weight distribution of the dual of an (n, k) code with distribution `counts`."""
    from math import comb

    counts = tuple(int(x) for x in counts)
    if len(counts) != n + 1 or any(x < 0 for x in counts):
        raise ValueError(f"need {n + 1} nonnegative counts")
    if sum(counts) != 1 << k:
        raise ValueError(f"counts sum to {sum(counts)}, expected 2^{k}")
    out = []
    for j in range(n + 1):
        total = 0
        for w, a_w in enumerate(counts):
            if not a_w:
                continue
            kraw = sum((-1) ** i * comb(w, i) * comb(n - w, j - i) for i in range(min(w, j) + 1))
            total += a_w * kraw
        q, r = divmod(total, 1 << k)
        if r or q < 0:
            raise InvariantViolation("transform produced a non-integral count; input is corrupted")
        out.append(q)
    return tuple(out)


# -- GF(2) polynomial arithmetic (ints, bit i = coefficient of x^i) ------------

def _poly_deg(p: int) -> int:
    return p.bit_length() - 1


def _poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    return out


def _poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = _poly_deg(b)
    while _poly_deg(a) >= db and a:
        shift = _poly_deg(a) - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


def _poly_reciprocal(p: int, deg: int) -> int:
    out = 0
    for i in range(deg + 1):
        if (p >> i) & 1:
            out |= 1 << (deg - i)
    return out


# -- GF(2^m) tables and minimal polynomials ------------------------------------

def _gf2m_tables(m: int) -> tuple[list[int], list[int]]:
    prim = PRIMITIVE_POLYS[m]
    size = 1 << m
    exp = [0] * (size - 1)
    log = [0] * size
    x = 1
    for i in range(size - 1):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & size:
            x ^= prim
    return exp, log


def _cyclotomic_coset(s: int, n: int) -> tuple[int, ...]:
    coset = []
    x = s % n
    while x not in coset:
        coset.append(x)
        x = (x * 2) % n
    return tuple(sorted(coset))


def _minimal_polynomial(s: int, m: int, exp: list[int], log: list[int]) -> int:
    """Minimal polynomial over GF(2) of alpha^s, alpha primitive in GF(2^m)."""
    n = (1 << m) - 1
    size_mask = n  # multiplicative order
    poly = [1]  # coefficients in GF(2^m), index = degree
    for j in _cyclotomic_coset(s, n):
        root = exp[j % size_mask]
        # poly *= (x + root)
        nxt = [0] * (len(poly) + 1)
        for d, coeff in enumerate(poly):
            nxt[d + 1] ^= coeff
            if coeff:
                nxt[d] ^= exp[(log[coeff] + log[root]) % size_mask] if root else 0
        poly = nxt
    out = 0
    for d, coeff in enumerate(poly):
        if coeff not in (0, 1):
            raise InvariantViolation("minimal polynomial has coefficients outside GF(2)")
        if coeff:
            out |= 1 << d
    return out


# -- code families --------------------------------------------------------------

def cyclic_code(n: int, generator_poly: int, *, name: str = "") -> LinearCode:
    """Cyclic code of length n from a generator polynomial dividing x^n - 1."""
    if n < 2:
        raise ConstructionError("cyclic codes need n >= 2")
    generator_poly = int(generator_poly)
    if generator_poly <= 0:
        raise ConstructionError("generator polynomial must be a positive bit mask")
    quotient, remainder = _poly_divmod((1 << n) | 1, generator_poly)
    if remainder:
        raise ConstructionError(f"generator polynomial {bin(generator_poly)} does not divide x^{n} - 1")
    k = n - _poly_deg(generator_poly)
    if k <= 0:
        raise ConstructionError("generator polynomial leaves no message bits")
    G = np.zeros((n, k), dtype=np.uint8)
    for j in range(k):
        G[:, j] = gf2.unpack_vector(generator_poly << j, n)
    hstar = _poly_reciprocal(quotient, k)
    H = np.zeros((n, n - k), dtype=np.uint8)
    for j in range(n - k):
        H[:, j] = gf2.unpack_vector(hstar << j, n)
    return LinearCode(G, H, name=name or f"cyclic({n},{generator_poly:#b})",
                      cyclic=True, generator_poly=generator_poly)


def hamming(m: int) -> LinearCode:
    """Cyclic Hamming code (2^m - 1, 2^m - 1 - m), minimum distance 3."""
    if m not in PRIMITIVE_POLYS:
        raise ConstructionError(f"m must be one of {sorted(PRIMITIVE_POLYS)}")
    n = (1 << m) - 1
    return cyclic_code(n, PRIMITIVE_POLYS[m], name=f"hamming({m})")


def bch(m: int, t: int) -> LinearCode:
    """Primitive narrow-sense BCH code of length 2^m - 1 correcting t errors."""
    if m not in PRIMITIVE_POLYS:
        raise ConstructionError(f"m must be one of {sorted(PRIMITIVE_POLYS)}")
    if t < 1:
        raise ConstructionError("t must be >= 1")
    n = (1 << m) - 1
    exp, log = _gf2m_tables(m)
    g = 1
    seen = set()
    for s in range(1, 2 * t + 1):
        coset = _cyclotomic_coset(s, n)
        if coset in seen:
            continue
        seen.add(coset)
        g = _poly_mul(g, _minimal_polynomial(s, m, exp, log))
    if _poly_deg(g) >= n:
        raise ConstructionError(f"bch({m},{t}) has no message bits")
    return cyclic_code(n, g, name=f"bch({m},{t})")


def repetition(n: int) -> LinearCode:
    """(n, 1) repetition code."""
    if n < 2:
        raise ConstructionError("repetition needs n >= 2")
    return cyclic_code(n, (1 << n) - 1, name=f"repetition({n})")


def single_parity(n: int) -> LinearCode:
    """(n, n-1) single parity-check code; its H column is the all-ones vector."""
    if n < 2:
        raise ConstructionError("single_parity needs n >= 2")
    return cyclic_code(n, 0b11, name=f"single_parity({n})")


def reed_muller(r: int, m: int) -> LinearCode:
    """Reed-Muller code RM(r, m) from monomial-evaluation columns."""
    if not 0 <= r <= m:
        raise ConstructionError(f"rm requires 0 <= r <= m, got r={r}, m={m}")
    n = 1 << m
    points = np.arange(n)
    variables = [((points >> i) & 1).astype(np.uint8) for i in range(m)]

    def eval_columns(max_deg):
        cols = []
        for deg in range(max_deg + 1):
            for subset in itertools.combinations(range(m), deg):
                col = np.ones(n, dtype=np.uint8)
                for i in subset:
                    col &= variables[i]
                cols.append(col)
        return np.stack(cols, axis=1)

    G = eval_columns(r)
    H = eval_columns(m - r - 1) if r < m else np.zeros((n, 0), dtype=np.uint8)
    return LinearCode(G, H, name=f"rm({r},{m})")


def lrc_pyramid(n: int, groups: int) -> LinearCode:
    """(n, n-groups) code with one even-weight parity constraint per group."""
    if groups < 1 or n % groups != 0 or n // groups < 2:
        raise ConstructionError(
            f"lrc_pyramid needs groups >= 1 dividing n with group size >= 2, got n={n}, groups={groups}")
    size = n // groups
    H = np.zeros((n, groups), dtype=np.uint8)
    for g in range(groups):
        H[g * size:(g + 1) * size, g] = 1
    return LinearCode.from_parity(H, name=f"lrc_pyramid({n},{groups})")


def two_block(n: int) -> LinearCode:
    """Two even-weight groups of size n/2; the masking side of one extra parity bit."""
    if n % 2 or n < 4:
        raise ConstructionError(f"two_block requires even n >= 4, got {n}")
    code = lrc_pyramid(n, 2)
    code.name = f"two_block({n})"
    return code


FAMILIES = {
    "hamming": hamming,
    "bch": bch,
    "rm": reed_muller,
    "repetition": repetition,
    "single_parity": single_parity,
    "cyclic": cyclic_code,
    "two_block": two_block,
    "lrc_pyramid": lrc_pyramid,
}


def build(family: str, *params: int) -> LinearCode:
    """Construct a code family by name, e.g. build("hamming", 3)."""
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise ConstructionError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    return builder(*params)


# -- plain-text import/export ----------------------------------------------------

def to_text(code: LinearCode) -> str:
    """Render a code as: "n k" header, n rows of k bits (G), n rows of n-k bits (H)."""
    lines = [f"{code.n} {code.k}"]
    lines += ["".join(str(b) for b in row) for row in code.G]
    lines += ["".join(str(b) for b in row) for row in code.H]
    return "\n".join(lines) + "\n"


def from_text(text: str, *, name: str = "") -> LinearCode:
    """Parse the to_text format; the H block may be omitted."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty code file")
    try:
        n, k = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise ValueError(f"bad header {lines[0]!r}; expected 'n k'") from None
    body = lines[1:]
    if len(body) not in (n, 2 * n):
        raise ValueError(f"expected {n} G rows (and optionally {n} H rows), got {len(body)} rows")

    def parse_block(rows, width):
        block = np.zeros((n, width), dtype=np.uint8)
        for i, row in enumerate(rows):
            if len(row) != width or set(row) - {"0", "1"}:
                raise ValueError(f"row {i}: expected {width} bits, got {row!r}")
            block[i] = [int(ch) for ch in row]
        return block

    G = parse_block(body[:n], k)
    H = parse_block(body[n:], n - k) if len(body) == 2 * n else None
    return LinearCode(G, H, name=name or f"code({n},{k})")


def save_code(code: LinearCode, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(to_text(code))


def load_code(path, *, name: str = "") -> LinearCode:
    with open(path, "r", encoding="ascii") as fh:
        return from_text(fh.read(), name=name)
