"""Walker alias method: O(K) table construction, O(1) weighted draws."""

from __future__ import annotations

import numpy as np

from .errors import GraphError


def alias_arrays(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Build raw alias arrays for a probability vector.

    Zero-probability slots end up with acceptance probability 0 and are never
    returned, so distributions with empty support entries are handled exactly.
    """
    probs = np.asarray(probs, dtype=np.float64)
    k = probs.shape[0]
    prob = np.empty(k, dtype=np.float64)
    alias = np.zeros(k, dtype=np.int64)

    scaled = probs * k
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        l = large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] -= 1.0 - scaled[s]
        if scaled[l] < 1.0:
            small.append(l)
        else:
            large.append(l)
    for i in large:
        prob[i] = 1.0
    for i in small:
        # only reachable through float round-off; treat as full slots
        prob[i] = 1.0
    return prob, alias


class AliasTable:
    """O(1) sampler for a fixed discrete distribution over ids [0, K)."""

    def __init__(self, prob: np.ndarray, alias: np.ndarray):
        self.prob = prob
        self.alias = alias

    @classmethod
    def from_probs(cls, probs) -> "AliasTable":
        probs = np.asarray(probs, dtype=np.float64)
        if probs.size == 0 or not np.any(probs > 0):
            raise GraphError("cannot build an alias table for an all-zero distribution")
        return cls(*alias_arrays(probs))

    def __len__(self) -> int:
        return self.prob.shape[0]

    def sample(self, rng: np.random.Generator) -> int:
        k = self.prob.shape[0]
        slot = min(int(rng.random() * k), k - 1)
        if rng.random() < self.prob[slot]:
            return slot
        return int(self.alias[slot])

    def sample_many(self, rng: np.random.Generator, size: int) -> np.ndarray:
        k = self.prob.shape[0]
        slot = np.minimum((rng.random(size) * k).astype(np.int64), k - 1)
        take_alias = rng.random(size) >= self.prob[slot]
        return np.where(take_alias, self.alias[slot], slot)


def build_alias_table(dist) -> AliasTable:
    """Build an AliasTable from a Distribution (or bare probability vector)."""
    probs = getattr(dist, "probs", dist)
    return AliasTable.from_probs(probs)


def alias_sample(table: AliasTable, rng: np.random.Generator) -> int:
    """Draw one id from the table; O(1) per draw."""
    return table.sample(rng)


def csr_alias_arrays(indptr: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-segment alias arrays for CSR-stored neighbor weights.

    Returns flattened (prob, alias) aligned with ``weights``; alias entries are
    local slot offsets within their segment. Empty segments are allowed and
    simply never sampled from.
    """
    prob = np.empty_like(weights)
    alias = np.zeros(weights.shape[0], dtype=np.int64)
    for v in range(indptr.shape[0] - 1):
        lo, hi = indptr[v], indptr[v + 1]
        if hi == lo:
            continue
        seg = weights[lo:hi]
        p, a = alias_arrays(seg / seg.sum())
        prob[lo:hi] = p
        alias[lo:hi] = a
    return prob, alias
