"""Random ladder-model generation for tests and benchmarks.

Every generated model is SPD by strict diagonal dominance and keeps all
block sparsity graphs, and their union over the ladder, cycle-free. The
union constraint is what makes generation non-obvious: consecutive
blocks see the same k boundary variables, so whatever edge structure one
block puts on a boundary group must be repeated, not resampled, by its
neighbor, or the two structures would union into a cycle.
"""

import bisect
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleStructure
from .model import LadderModel

STRUCTURES = ("star_pattern", "random_tree", "diagonal")


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one random model.

    weight_range bounds the magnitude of off-diagonal weights; signs are
    random. Must not straddle or touch zero.
    """

    k: int
    L: int
    seed: int
    structure: str = "star_pattern"
    weight_range: tuple = (0.2, 1.0)


def _check(spec):
    if spec.k < 1:
        raise InfeasibleStructure(f"k must be >= 1, got {spec.k}")
    if spec.L < 1:
        raise InfeasibleStructure(f"L must be >= 1, got {spec.L}")
    if spec.structure not in STRUCTURES:
        raise InfeasibleStructure(
            f"unknown structure {spec.structure!r}; choose from {STRUCTURES}"
        )
    lo, hi = spec.weight_range
    if not 0.0 < lo <= hi:
        raise InfeasibleStructure(
            f"weight_range must satisfy 0 < lo <= hi, got {spec.weight_range}"
        )


def _path_edges(k):
    return [(p, p + 1) for p in range(k - 1)]


def _random_tree_edges(k, rng):
    """Uniform random labelled tree on k vertices (Prüfer decoding)."""
    if k <= 1:
        return []
    if k == 2:
        return [(0, 1)]
    prufer = rng.integers(0, k, size=k - 2)
    degree = np.ones(k, dtype=np.int64)
    for v in prufer:
        degree[v] += 1
    edges = []
    leaves = sorted(v for v in range(k) if degree[v] == 1)
    for v in prufer:
        leaf = leaves.pop(0)
        edges.append((min(leaf, int(v)), max(leaf, int(v))))
        degree[v] -= 1
        if degree[v] == 1:
            bisect.insort(leaves, int(v))
    edges.append((leaves[0], leaves[1]))
    return edges


def generate(spec):
    """Build the LadderModel a GenSpec describes; deterministic per seed.

    Structures:

    * ``star_pattern``: each half of every block carries a path
      0–1–…–(k−1), plus one cross edge joining vertex 0 of each half.
    * ``random_tree``: each of the L+1 boundary groups gets one random
      tree topology, shared by the two blocks that see it; same single
      cross edge. Weights are still drawn independently per block.
    * ``diagonal``: no off-diagonal entries at all.

    Diagonals are set to the absolute incident weight sum plus a draw
    from [0.5, 1.5], making every block strictly diagonally dominant and
    hence SPD.
    """
    _check(spec)
    k, L = spec.k, spec.L
    rng = np.random.default_rng(spec.seed)

    if spec.structure == "star_pattern":
        group_edges = [_path_edges(k)] * (L + 1)
    elif spec.structure == "random_tree":
        group_edges = [_random_tree_edges(k, rng) for _ in range(L + 1)]
    else:
        group_edges = [[]] * (L + 1)

    # Per-block edge lists as (L, E) index arrays; E is constant across
    # blocks (k-1 edges per half plus one cross edge, or none).
    per_block = [
        group_edges[ell]
        + [(i + k, j + k) for i, j in group_edges[ell + 1]]
        + ([] if spec.structure == "diagonal" else [(0, k)])
        for ell in range(L)
    ]
    ei = np.asarray(
        [[e[0] for e in edges] for edges in per_block], dtype=np.int64
    ).reshape(L, -1)
    ej = np.asarray(
        [[e[1] for e in edges] for edges in per_block], dtype=np.int64
    ).reshape(L, -1)

    blocks = np.zeros((L, 2 * k, 2 * k))
    n_edges = ei.shape[1]
    if n_edges:
        lo, hi = spec.weight_range
        mags = rng.uniform(lo, hi, size=(L, n_edges))
        signs = np.where(rng.random(size=(L, n_edges)) < 0.5, 1.0, -1.0)
        w = mags * signs
        li = np.arange(L)[:, None]
        blocks[li, ei, ej] = w
        blocks[li, ej, ei] = w

    abssum = np.abs(blocks).sum(axis=2)
    d = np.arange(2 * k)
    blocks[:, d, d] = abssum + rng.uniform(0.5, 1.5, size=(L, 2 * k))
    return LadderModel(k, L, blocks)
