"""Index conventions for frames on a (2n+1)-dimensional contact manifold.

Frame indices run over 0..2n where 0 labels the Reeb direction.
Horizontal indices are 1..2n; the first n are "holomorphic" slots and
bar(alpha) = alpha + n is the conjugate slot.  The order of an index is
2 for the Reeb direction and 1 otherwise, matching the parabolic
dilation weights (z of degree 1, t of degree 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product


@dataclass(frozen=True)
class IndexScheme:
    """Index bookkeeping for complex dimension n (n >= 2 for the Yamabe suite)."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("complex dimension must be at least 1")

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def horizontal(self) -> range:
        return range(1, 2 * self.n + 1)

    @property
    def all(self) -> range:
        return range(0, 2 * self.n + 1)

    @property
    def holomorphic(self) -> range:
        return range(1, self.n + 1)

    def bar(self, j: int) -> int:
        """Conjugation on indices: swaps alpha <-> alpha+n and fixes 0."""
        if j == 0:
            return 0
        if not 1 <= j <= 2 * self.n:
            raise IndexError(f"index {j} out of range for n={self.n}")
        return j + self.n if j <= self.n else j - self.n

    def is_holomorphic(self, j: int) -> bool:
        return 1 <= j <= self.n

    def order(self, j: int) -> int:
        if not 0 <= j <= 2 * self.n:
            raise IndexError(f"index {j} out of range for n={self.n}")
        return 2 if j == 0 else 1

    def multi_index_order(self, J) -> int:
        """o(J) = o(j_1) + ... + o(j_s); the empty multi-index has order 0."""
        return sum(self.order(j) for j in J)

    def multi_indices(self, order: int):
        """All multi-indices J (tuples over 0..2n) with o(J) == order."""
        out = []
        for length in range(order + 1):
            for J in product(self.all, repeat=length):
                if self.multi_index_order(J) == order:
                    out.append(J)
        return out
