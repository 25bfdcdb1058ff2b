"""Search for relay constellation labelings that suit side-information decoding.

With split ``(nA, nB)`` the relay word is ``[w_A w_B]``. Sink A knows the
first ``nA`` bits, so it decides among the points whose labels share that
prefix; sink B knows the last ``nB`` bits. Each sink therefore sees a family of
subsets, and what matters is how far apart the points inside a subset are.

The search ranks labelings lexicographically by

1. the minimum intra-subset distance of the family with the smaller subsets
   (the minimum over both families when their subsets have equal size),
2. the minimum intra-subset distance of the remaining family,
3. the mean, over all points, of the distance to the nearest point sharing
   its subset (either family),
4. a lower mean Hamming distance between geometric neighbours.

Ranking is invariant under rotation of the constellation, so the search fixes
word 0 on point 0 and enumerates the remaining ``(M-1)!`` labelings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, psk_points, word_bits

MAX_ORDER = 8
_DIGITS = 12


class SearchBudgetError(ValueError):
    """Raised when an exhaustive search would be too large."""


@dataclass(frozen=True)
class LabelingScore:
    primary: float
    secondary: float
    mean_nearest: float
    neighbour_hamming: float
    sink_a: float
    sink_b: float

    def key(self) -> tuple[float, float, float, float]:
        return (
            round(self.primary, _DIGITS),
            round(self.secondary, _DIGITS),
            round(self.mean_nearest, _DIGITS),
            -round(self.neighbour_hamming, _DIGITS),
        )

    def __gt__(self, other: LabelingScore) -> bool:
        return self.key() > other.key()


@dataclass(frozen=True)
class LabelingResult:
    constellation: Constellation
    score: LabelingScore
    split: tuple[int, int]
    evaluated: int

    def table(self) -> list[tuple[str, int, float]]:
        """Rows of (label bits, point index, angle in degrees), sorted by label."""
        k = self.constellation.bits_per_symbol
        M = self.constellation.order
        return [
            (format(w, f"0{k}b"), p, 360.0 * p / M)
            for w, p in enumerate(self.constellation.point_of)
        ]


def _check(M: int, split: tuple[int, int]) -> int:
    if M > MAX_ORDER:
        raise SearchBudgetError(f"exhaustive search limited to M <= {MAX_ORDER}, got {M}")
    if M not in (2, 4, 8):
        raise ValueError(f"M must be 2, 4 or 8, got {M}")
    k = int(np.log2(M))
    nA, nB = split
    if nA < 0 or nB < 0 or nA + nB != k:
        raise ValueError(f"split {split} does not add up to {k} bits")
    return k


def _pair_tables(M: int, split: tuple[int, int]):
    """Word pairs sharing sink A's or sink B's known bits, plus the word bit table."""
    k = int(np.log2(M))
    nA, nB = split
    bits = word_bits(M)
    same_a = np.all(bits[:, None, :nA] == bits[None, :, :nA], axis=2)
    same_b = np.all(bits[:, None, k - nB:] == bits[None, :, k - nB:], axis=2)
    off_diag = ~np.eye(M, dtype=bool)
    return same_a & off_diag, same_b & off_diag, bits


def score_batch(perms: np.ndarray, split: tuple[int, int]) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    """Vectorised scores for labelings given as rows of ``point_of``.

    Returns an ``(n, 4)`` array of sort keys (larger is better) and the raw
    per-sink minimum distances and neighbour Hamming means.
    """
    perms = np.atleast_2d(np.asarray(perms, dtype=int))
    M = perms.shape[1]
    k = _check(M, split)
    nA, nB = split
    pa, pb, bits = _pair_tables(M, split)
    pts = psk_points(M)
    # distance between the points carrying words i and j, per labeling
    geo = np.abs(pts[:, None] - pts[None, :])
    dist = geo[perms[:, :, None], perms[:, None, :]]
    inf = np.inf
    da = np.where(pa[None], dist, inf)
    db = np.where(pb[None], dist, inf)
    min_a = da.min(axis=(1, 2))
    min_b = db.min(axis=(1, 2))
    size_a, size_b = 2 ** (k - nA), 2 ** (k - nB)
    if size_a < size_b:
        primary, secondary = min_a, min_b
    elif size_b < size_a:
        primary, secondary = min_b, min_a
    else:
        primary, secondary = np.minimum(min_a, min_b), np.maximum(min_a, min_b)
    nearest = np.concatenate([da.min(axis=2), db.min(axis=2)], axis=1)
    finite = np.isfinite(nearest)
    mean_nearest = np.where(finite, nearest, 0.0).sum(axis=1) / np.maximum(finite.sum(axis=1), 1)
    # Hamming distance between labels of geometrically adjacent points
    label_of = np.argsort(perms, axis=1)
    nxt = np.roll(label_of, -1, axis=1)
    ham = (bits[label_of] != bits[nxt]).sum(axis=2).mean(axis=1)
    keys = np.stack([primary, secondary, mean_nearest, -ham], axis=1)
    keys = np.where(np.isfinite(keys), keys, 1e9).round(_DIGITS)
    return keys, (min_a, min_b, ham)


def score_labeling(c: Constellation, split: tuple[int, int]) -> LabelingScore:
    keys, (min_a, min_b, ham) = score_batch(np.array([c.point_of]), split)
    p, s, m, _ = keys[0]
    return LabelingScore(float(p), float(s), float(m), float(ham[0]), float(min_a[0]), float(min_b[0]))


def _best(perms: np.ndarray, split: tuple[int, int]) -> int:
    keys, _ = score_batch(perms, split)
    # first labeling in enumeration order among the maxima
    return max(range(len(keys)), key=lambda i: (tuple(keys[i]), -i))


def all_labelings(M: int, fix_zero: bool = True) -> np.ndarray:
    if fix_zero:
        rest = np.array(list(itertools.permutations(range(1, M))), dtype=int).reshape(-1, M - 1)
        return np.hstack([np.zeros((len(rest), 1), dtype=int), rest])
    return np.array(list(itertools.permutations(range(M))), dtype=int)


def search_optimal_labeling(M: int, split: tuple[int, int]) -> LabelingResult:
    """Exhaustive symmetry-reduced search; deterministic on ties."""
    _check(M, split)
    perms = all_labelings(M, fix_zero=True)
    i = _best(perms, split)
    c = Constellation(M, tuple(int(p) for p in perms[i]), "optimal")
    return LabelingResult(c, score_labeling(c, split), tuple(split), len(perms))
