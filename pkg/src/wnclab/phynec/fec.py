"""Rate-1/2 regular (3,6) LDPC code with sum-product decoding.

The parity-check matrix is drawn from a seeded socket permutation, redrawn
until it has no repeated edges and full rank, so the code is systematic with
exactly ``k = n/2`` information bits. Decoding works on LLRs
``log P(b=0)/P(b=1)`` and processes a batch of codewords at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

COL_WEIGHT = 3
ROW_WEIGHT = 6
LLR_CLIP = 30.0


def _random_regular_h(n: int, rng: np.random.Generator) -> np.ndarray | None:
    m = n * COL_WEIGHT // ROW_WEIGHT
    sockets = np.repeat(np.arange(n), COL_WEIGHT)
    rng.shuffle(sockets)
    rows = sockets.reshape(m, ROW_WEIGHT)
    if any(len(set(r)) < ROW_WEIGHT for r in rows):
        return None
    H = np.zeros((m, n), dtype=np.uint8)
    H[np.repeat(np.arange(m), ROW_WEIGHT), rows.ravel()] = 1
    return H


def _systematic_form(H: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Reduce H over GF(2) to ``[A | I]`` under a column permutation.

    Returns ``(A, perm)`` with ``H[:, perm]`` row-equivalent to ``[A | I]``,
    or None if H is rank deficient.
    """
    m, n = H.shape
    M = H.astype(bool).copy()
    cols = np.arange(n)
    # pivots are placed in the last m columns, in order
    for r in range(m):
        target = n - m + r
        pivot = None
        # columns not yet holding a pivot: the target onwards, then the information part
        for c in itertools.chain(range(target, n), range(n - m)):
            hits = np.flatnonzero(M[r:, c])
            if hits.size:
                pivot = (r + hits[0], c)
                break
        if pivot is None:
            return None
        pr, pc = pivot
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
        if pc != target:
            M[:, [target, pc]] = M[:, [pc, target]]
            cols[[target, pc]] = cols[[pc, target]]
        others = np.flatnonzero(M[:, target])
        others = others[others != r]
        M[others] ^= M[r]
    return M[:, : n - m].astype(np.uint8), cols


@dataclass
class LdpcCode:
    n: int = 1152
    seed: int = 2024
    H: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n % ROW_WEIGHT or self.n <= 0:
            raise ValueError(f"block length must be a positive multiple of {ROW_WEIGHT}")
        rng = np.random.default_rng(self.seed)
        for _ in range(1000):
            H = _random_regular_h(self.n, rng)
            if H is None:
                continue
            sys = _systematic_form(H)
            if sys is not None:
                break
        else:
            raise RuntimeError("could not draw a full-rank parity-check matrix")
        self.H = H
        A, perm = sys
        self._A = A                                   # parity = A @ info (mod 2)
        self._perm = perm                             # codeword position of each systematic column
        self.k = self.n - H.shape[0]
        self._check_vars = np.nonzero(H)[1].reshape(H.shape[0], ROW_WEIGHT)
        flat = self._check_vars.ravel()
        order = np.argsort(flat, kind="stable")
        self._var_edges = order.reshape(self.n, COL_WEIGHT)

    @property
    def m(self) -> int:
        return self.H.shape[0]

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def info_positions(self) -> np.ndarray:
        return self._perm[: self.k]

    def encode(self, u: np.ndarray) -> np.ndarray:
        """Encode one block ``(k,)`` or a batch ``(b, k)`` of information bits."""
        u = np.asarray(u, dtype=np.uint8)
        single = u.ndim == 1
        u = np.atleast_2d(u)
        if u.shape[1] != self.k:
            raise ValueError(f"information blocks have {self.k} bits, got {u.shape[1]}")
        parity = (u.astype(np.int64) @ self._A.T.astype(np.int64)) & 1
        c = np.empty((u.shape[0], self.n), dtype=np.uint8)
        c[:, self._perm[: self.k]] = u
        c[:, self._perm[self.k:]] = parity
        return c[0] if single else c

    def syndrome(self, c: np.ndarray) -> np.ndarray:
        c = np.atleast_2d(np.asarray(c, dtype=np.int64))
        return c[:, self._check_vars].sum(axis=2) & 1

    def decode(self, llr: np.ndarray, max_iter: int = 50) -> tuple[np.ndarray, np.ndarray]:
        """Sum-product decoding. Returns (information bits, parity-satisfied flags)."""
        llr = np.clip(np.asarray(llr, dtype=float), -LLR_CLIP, LLR_CLIP)
        single = llr.ndim == 1
        llr = np.atleast_2d(llr)
        if llr.shape[1] != self.n:
            raise ValueError(f"codewords have {self.n} LLRs, got {llr.shape[1]}")
        b = llr.shape[0]
        cv = self._check_vars
        ve = self._var_edges
        c2v = np.zeros((b, self.m, ROW_WEIGHT))
        total = llr.copy()
        hard = (total < 0).astype(np.uint8)
        ok = ~self.syndrome(hard).any(axis=1)
        for _ in range(max_iter):
            if ok.all():
                break
            v2c = total[:, cv] - c2v
            t = np.tanh(np.clip(v2c, -LLR_CLIP, LLR_CLIP) / 2.0)
            # leave-one-out products without division
            pre = np.ones_like(t)
            suf = np.ones_like(t)
            pre[:, :, 1:] = np.cumprod(t[:, :, :-1], axis=2)
            suf[:, :, :-1] = np.cumprod(t[:, :, :0:-1], axis=2)[:, :, ::-1]
            prod = np.clip(pre * suf, -0.999999999999, 0.999999999999)
            new = 2.0 * np.arctanh(prod)
            # codewords that already satisfy all checks keep their messages
            c2v = np.where(ok[:, None, None], c2v, new)
            total = llr + c2v.reshape(b, -1)[:, ve].sum(axis=2)
            hard = (total < 0).astype(np.uint8)
            ok = ~self.syndrome(hard).any(axis=1)
        info = hard[:, self._perm[: self.k]]
        return (info[0], ok[0]) if single else (info, ok)


@lru_cache(maxsize=8)
def default_code(n: int = 1152, seed: int = 2024) -> LdpcCode:
    return LdpcCode(n=n, seed=seed)


def interleaver(length: int, seed: int) -> np.ndarray:
    """Seeded permutation: transmitted position ``i`` carries coded bit ``perm[i]``."""
    return np.random.default_rng(seed).permutation(length)
