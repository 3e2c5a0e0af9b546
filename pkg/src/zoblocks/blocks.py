"""Block decomposition of decision vectors.

A decision space R^n is split into b contiguous blocks with sizes
(n_1, ..., n_b).  Block s of a vector x is the slice
x[offsets[s] : offsets[s] + n_s]; embedding a block vector back into R^n
places it at the same slice with zeros elsewhere.  Contiguous slices
realize column-selector matrices of the identity without any copying.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class BlockLayout:
    """Partition of R^n into contiguous blocks.

    Parameters
    ----------
    block_sizes : sequence of positive ints
        Sizes (n_1, ..., n_b); their sum is the total dimension n.
    """

    block_sizes: tuple[int, ...]
    offsets: tuple[int, ...] = field(init=False)
    n: int = field(init=False)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if len(sizes) < 1:
            raise ValueError("layout needs at least one block")
        if any(s < 1 for s in sizes):
            raise ValueError(f"block sizes must be positive, got {sizes}")
        offsets = (0,) + tuple(np.cumsum(sizes[:-1]).tolist())
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "n", int(sum(sizes)))

    @property
    def b(self) -> int:
        return len(self.block_sizes)

    def slice(self, s: int) -> slice:
        """Index slice of block s (0-based)."""
        if not 0 <= s < self.b:
            raise IndexError(f"block index {s} out of range [0, {self.b})")
        off = self.offsets[s]
        return slice(off, off + self.block_sizes[s])

    def check_vector(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"vector has shape {x.shape}, layout expects ({self.n},)")
        return x

    @staticmethod
    def uniform(n: int, b: int) -> "BlockLayout":
        """Split n coordinates into b near-equal blocks (remainder spread over the
        leading blocks)."""
        if b < 1 or n < b:
            raise ValueError(f"cannot split {n} coordinates into {b} blocks")
        base, extra = divmod(n, b)
        return BlockLayout(tuple(base + (1 if i < extra else 0) for i in range(b)))


def block_view(x: np.ndarray, s: int, layout: BlockLayout) -> np.ndarray:
    """Slice of block s of x (a view; equal by value to the block)."""
    x = layout.check_vector(x)
    return x[layout.slice(s)]


def embed(g_s: np.ndarray, s: int, layout: BlockLayout) -> np.ndarray:
    """Full vector with block s set to g_s and all other blocks zero."""
    g_s = np.asarray(g_s, dtype=float)
    sl = layout.slice(s)
    if g_s.shape != (layout.block_sizes[s],):
        raise ValueError(
            f"block {s} expects length {layout.block_sizes[s]}, got shape {g_s.shape}"
        )
    out = np.zeros(layout.n)
    out[sl] = g_s
    return out


def block_norm(x: np.ndarray, s: int, layout: BlockLayout) -> float:
    """Euclidean norm of block s of x."""
    return float(np.linalg.norm(block_view(x, s, layout)))


def gather(blocks: list[np.ndarray], layout: BlockLayout) -> np.ndarray:
    """Concatenate per-block vectors back into a full vector."""
    if len(blocks) != layout.b:
        raise ValueError(f"expected {layout.b} blocks, got {len(blocks)}")
    parts = []
    for s, g in enumerate(blocks):
        g = np.asarray(g, dtype=float)
        if g.shape != (layout.block_sizes[s],):
            raise ValueError(
                f"block {s} expects length {layout.block_sizes[s]}, got shape {g.shape}"
            )
        parts.append(g)
    return np.concatenate(parts)
