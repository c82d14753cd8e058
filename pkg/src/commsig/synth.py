"""Planted-partition benchmark graphs."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .graph import Graph, Group

NOISE_SWEEP = tuple(round(0.025 * k, 3) for k in range(1, 10))


@dataclass(frozen=True)
class SyntheticSpec:
    group_sizes: tuple
    internal_probs: tuple
    noise_prob: float
    seed: int = 0
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "group_sizes", tuple(int(s) for s in self.group_sizes))
        object.__setattr__(self, "internal_probs", tuple(float(p) for p in self.internal_probs))
        if len(self.group_sizes) != len(self.internal_probs):
            raise ValueError("group_sizes and internal_probs differ in length")
        if any(s < 1 for s in self.group_sizes):
            raise ValueError("group sizes must be positive")
        for p in (*self.internal_probs, self.noise_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")

    def with_noise(self, noise_prob: float) -> "SyntheticSpec":
        return replace(self, noise_prob=noise_prob)

    def with_seed(self, seed: int) -> "SyntheticSpec":
        return replace(self, seed=seed)


def preset(name: str, noise_prob: float = 0.05, seed: int = 0) -> SyntheticSpec:
    """``syn1``: 10x30 nodes, half at 0.6 and half at 0.2 internal probability;
    ``syn2``: 10x30 at 0.4; ``syn3``: uneven sizes at 0.4."""
    name = name.lower()
    if name == "syn1":
        sizes, probs = [30] * 10, [0.6] * 5 + [0.2] * 5
    elif name == "syn2":
        sizes, probs = [30] * 10, [0.4] * 10
    elif name == "syn3":
        sizes = [160, 60, 50, 40, 40, 30, 30, 30, 30, 20]
        probs = [0.4] * 10
    else:
        raise ValueError(f"unknown preset {name!r}")
    return SyntheticSpec(tuple(sizes), tuple(probs), noise_prob, seed, name=name)


def _block_rng(seed: int, i: int, j: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i, j))))


def generate(spec: SyntheticSpec) -> tuple[Graph, list[Group]]:
    """Sample a simple graph and return it with the planted groups.

    Every node pair inside group ``i`` is an edge with probability
    ``internal_probs[i]``; every pair across groups with ``noise_prob``.
    Block ``(i, j)`` draws from its own PCG64 stream keyed by
    ``(seed, i, j)``, so output does not depend on generation order.
    """
    sizes = spec.group_sizes
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    us, vs = [], []
    for i, si in enumerate(sizes):
        for j in range(i, len(sizes)):
            rng = _block_rng(spec.seed, i, j)
            if i == j:
                p = spec.internal_probs[i]
                a, b = np.triu_indices(si, k=1)
            else:
                p = spec.noise_prob
                a, b = np.indices((si, sizes[j])).reshape(2, -1)
            if p <= 0.0 or a.size == 0:
                continue
            keep = rng.random(a.size) < p
            us.append(a[keep] + offsets[i])
            vs.append(b[keep] + offsets[j])
    n = int(offsets[-1])
    u = np.concatenate(us) if us else np.empty(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.empty(0, dtype=np.int64)
    graph = Graph._from_arrays(u.astype(np.int64), v.astype(np.int64),
                               np.ones(u.size, dtype=np.int64), [str(x) for x in range(n)])
    groups = [Group(str(i), frozenset(range(offsets[i], offsets[i + 1]))) for i in range(len(sizes))]
    return graph, groups
