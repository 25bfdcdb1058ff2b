"""PSK constellations, labelings, joint modulation and subset demapping.

Point ``k`` of an M-PSK constellation sits at angle ``2*pi*k/M`` on the unit
circle. A labeling is stored as ``point_of[word]``: the index of the point
that carries the ``log2(M)``-bit word, bits read most significant first.
With that convention BPSK maps bit 0 to +1 and bit 1 to -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SUPPORTED_ORDERS = (2, 4, 8)
TIE_TOL = 1e-12


def psk_points(M: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(M) / M)


def gray_labeling(M: int) -> tuple[int, ...]:
    """Point k carries the binary-reflected Gray label ``k ^ (k >> 1)``."""
    point_of = [0] * M
    for k in range(M):
        point_of[k ^ (k >> 1)] = k
    return tuple(point_of)


def natural_labeling(M: int) -> tuple[int, ...]:
    return tuple(range(M))


def word_bits(M: int) -> np.ndarray:
    """``(M, log2 M)`` table of the bits of every word, MSB first."""
    k = int(np.log2(M))
    w = np.arange(M)[:, None]
    return ((w >> (k - 1 - np.arange(k))) & 1).astype(np.uint8)


@dataclass(frozen=True)
class Constellation:
    order: int
    point_of: tuple[int, ...]
    name: str = ""
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.order not in SUPPORTED_ORDERS:
            raise ValueError(f"order must be one of {SUPPORTED_ORDERS}, got {self.order}")
        if sorted(self.point_of) != list(range(self.order)):
            raise ValueError("labeling must be a bijection onto the points")
        object.__setattr__(self, "point_of", tuple(int(p) for p in self.point_of))
        object.__setattr__(self, "points", psk_points(self.order)[list(self.point_of)])

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))

    @classmethod
    def gray(cls, M: int) -> Constellation:
        return cls(M, gray_labeling(M), "gray")

    @classmethod
    def natural(cls, M: int) -> Constellation:
        return cls(M, natural_labeling(M), "natural")

    def label_of_point(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=int)
        inv[list(self.point_of)] = np.arange(self.order)
        return inv


BPSK = Constellation(2, (0, 1), "bpsk")


def bits_to_words(bits: np.ndarray, k: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % k:
        raise ValueError(f"bit count {bits.size} is not a multiple of {k}")
    weights = 1 << np.arange(k - 1, -1, -1)
    return bits.reshape(-1, k) @ weights


def words_to_bits(words: np.ndarray, k: int) -> np.ndarray:
    words = np.asarray(words, dtype=np.int64)
    return ((words[..., None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.uint8)


def psk_modulate(bits: np.ndarray, c: Constellation) -> np.ndarray:
    return c.points[bits_to_words(bits, c.bits_per_symbol)]


def hard_demap(y: np.ndarray, c: Constellation) -> np.ndarray:
    """Nearest-point demapping over the whole constellation, returned as bits."""
    y = np.asarray(y, dtype=complex).ravel()
    words = np.argmin(np.abs(y[:, None] - c.points[None, :]) ** 2, axis=1)
    return words_to_bits(words, c.bits_per_symbol).ravel()


# -- joint modulation at the relay ------------------------------------------

@dataclass(frozen=True)
class BitWord:
    bits: tuple[int, ...]
    role: str = "w_R"          # "w_A" | "w_B" | "w_R"

    def __post_init__(self) -> None:
        if self.role not in ("w_A", "w_B", "w_R"):
            raise ValueError(f"unknown role {self.role!r}")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")


def dfjm_compose(wA, wB) -> BitWord:
    """Concatenate the two decoded words into the relay word ``[w_A w_B]``."""
    a = wA.bits if isinstance(wA, BitWord) else tuple(int(b) for b in wA)
    b = wB.bits if isinstance(wB, BitWord) else tuple(int(x) for x in wB)
    return BitWord(a + b, "w_R")


def joint_bits(bits_a: np.ndarray, bits_b: np.ndarray, n_a: int, n_b: int) -> np.ndarray:
    """Interleave two bit streams into relay words: n_a bits of A, then n_b of B."""
    a = np.asarray(bits_a, dtype=np.uint8).reshape(-1, n_a) if n_a else None
    b = np.asarray(bits_b, dtype=np.uint8).reshape(-1, n_b) if n_b else None
    parts = [p for p in (a, b) if p is not None]
    if len(parts) == 2 and parts[0].shape[0] != parts[1].shape[0]:
        raise ValueError("streams cover different numbers of symbols")
    return np.concatenate(parts, axis=1).ravel()


# -- subset demapping -------------------------------------------------------

def _candidate_mask(c: Constellation, known_bits: np.ndarray, known_positions) -> np.ndarray:
    """``(n, M)`` boolean mask of words agreeing with each symbol's side information."""
    table = word_bits(c.order)
    pos = list(known_positions)
    if not pos:
        return np.ones((known_bits.shape[0], c.order), dtype=bool)
    return np.all(table[None, :, pos] == known_bits[:, None, :], axis=2)


def _prepare(y, known_bits, known_positions, c):
    y = np.atleast_1d(np.asarray(y, dtype=complex)).ravel()
    pos = tuple(int(p) for p in known_positions)
    k = c.bits_per_symbol
    if any(not 0 <= p < k for p in pos) or len(set(pos)) != len(pos):
        raise ValueError(f"known positions {pos} invalid for {k}-bit words")
    kb = np.asarray(known_bits, dtype=np.uint8).reshape(-1, len(pos)) if pos else np.zeros((1, 0), np.uint8)
    if kb.shape[0] == 1 and y.size > 1:
        kb = np.broadcast_to(kb, (y.size, len(pos)))
    if kb.shape[0] != y.size:
        raise ValueError("need one row of side information per symbol")
    unknown = [i for i in range(k) if i not in pos]
    return y, kb, pos, unknown


def subset_demap(y, known_bits, known_positions, c: Constellation, h: complex = 1.0, P: float = 1.0) -> np.ndarray:
    """Minimum-distance decision restricted to words consistent with the known bits.

    Returns the unknown bits, shape ``(n, n_unknown)``. Distances within
    ``TIE_TOL`` (relative) of the minimum count as equal; ties go to the
    smallest word value.
    """
    y, kb, pos, unknown = _prepare(y, known_bits, known_positions, c)
    ref = np.sqrt(P) * h * c.points
    d = np.abs(y[:, None] - ref[None, :]) ** 2
    d = np.where(_candidate_mask(c, kb, pos), d, np.inf)
    # geometric ties can differ by an ulp; treat them as equal and take the first word
    dmin = d.min(axis=1, keepdims=True)
    words = np.argmax(d <= dmin + TIE_TOL * (1.0 + dmin), axis=1)
    return word_bits(c.order)[words][:, unknown]


def subset_llrs(y, known_bits, known_positions, c: Constellation, sigma2: float,
                h: complex = 1.0, P: float = 1.0) -> np.ndarray:
    """Max-log LLRs ``log P(b=0)/P(b=1)`` for the unknown bits, shape ``(n, n_unknown)``."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    y, kb, pos, unknown = _prepare(y, known_bits, known_positions, c)
    ref = np.sqrt(P) * h * c.points
    d = np.abs(y[:, None] - ref[None, :]) ** 2
    d = np.where(_candidate_mask(c, kb, pos), d, np.inf)
    table = word_bits(c.order)
    out = np.empty((y.size, len(unknown)))
    for j, i in enumerate(unknown):
        d0 = np.min(np.where(table[:, i] == 0, d, np.inf), axis=1)
        d1 = np.min(np.where(table[:, i] == 1, d, np.inf), axis=1)
        out[:, j] = (d1 - d0) / sigma2
    return out
