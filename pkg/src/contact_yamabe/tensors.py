"""Complex tensor components in a special frame.

Components are stored as dense complex arrays.  Horizontal axes have
size 2n and are indexed by frame labels 1..2n (array offset 1); full
axes have size 2n+1 indexed by 0..2n with 0 the Reeb slot.  In a
special frame the horizontal metric is h_{alpha, beta+n} = delta, so
raising and lowering is the involution swapping the two blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .indexing import IndexScheme

UP = "up"
DOWN = "down"


def special_metric(n: int) -> np.ndarray:
    """Horizontal metric matrix h_{ab} of a special frame: [[0, I], [I, 0]]."""
    h = np.zeros((2 * n, 2 * n), dtype=complex)
    h[:n, n:] = np.eye(n)
    h[n:, :n] = np.eye(n)
    return h


@dataclass
class ComplexTensorField:
    """Multi-indexed complex components with per-slot variance labels.

    ``kinds`` entries are "h" (horizontal, size 2n) or "f" (full,
    size 2n+1); ``variance`` entries are "up" or "down".
    """

    scheme: IndexScheme
    components: np.ndarray
    variance: tuple
    kinds: tuple
    conjugation_pairing: bool = True

    def __post_init__(self):
        expected = tuple(
            2 * self.scheme.n if k == "h" else 2 * self.scheme.n + 1
            for k in self.kinds
        )
        if self.components.shape != expected:
            raise ValueError(
                f"component shape {self.components.shape} does not match kinds {self.kinds}"
            )
        if len(self.variance) != len(self.kinds):
            raise ValueError("variance and kinds must have equal length")

    # -- index translation ---------------------------------------------

    def _offset(self, slot: int, frame_index: int) -> int:
        if self.kinds[slot] == "h":
            if frame_index == 0:
                raise IndexError("horizontal slot cannot take the Reeb index")
            return frame_index - 1
        return frame_index

    def entry(self, *frame_indices) -> complex:
        pos = tuple(self._offset(s, j) for s, j in enumerate(frame_indices))
        return self.components[pos]

    def _bar_perm(self, kind: str) -> np.ndarray:
        n = self.scheme.n
        if kind == "h":
            return np.array([self.scheme.bar(a) - 1 for a in range(1, 2 * n + 1)])
        return np.array([self.scheme.bar(j) for j in range(0, 2 * n + 1)])

    # -- operations ----------------------------------------------------

    def conjugate(self) -> "ComplexTensorField":
        """Entrywise conjugate with all indices bar-swapped.

        For tensors built from a special frame this returns the same
        tensor (the conjugation-pairing invariant).
        """
        comp = np.conj(self.components)
        for slot, kind in enumerate(self.kinds):
            comp = np.take(comp, self._bar_perm(kind), axis=slot)
        return ComplexTensorField(
            self.scheme, comp, self.variance, self.kinds, self.conjugation_pairing
        )

    def conjugation_defect(self) -> float:
        if not self.conjugation_pairing:
            raise ValueError("tensor does not declare conjugation pairing")
        return float(np.max(np.abs(self.conjugate().components - self.components)))

    def lower_index(self, slot: int) -> "ComplexTensorField":
        """Contract an upper horizontal slot with h_{ab} (special frame)."""
        if self.variance[slot] != UP:
            raise ValueError(f"slot {slot} is not an upper index")
        if self.kinds[slot] != "h":
            raise ValueError("only horizontal slots carry the metric")
        h = special_metric(self.scheme.n)
        comp = np.tensordot(h, self.components, axes=([1], [slot]))
        comp = np.moveaxis(comp, 0, slot)
        variance = tuple(
            DOWN if s == slot else v for s, v in enumerate(self.variance)
        )
        return ComplexTensorField(
            self.scheme, comp, variance, self.kinds, self.conjugation_pairing
        )

    def raise_index(self, slot: int) -> "ComplexTensorField":
        if self.variance[slot] != DOWN:
            raise ValueError(f"slot {slot} is not a lower index")
        if self.kinds[slot] != "h":
            raise ValueError("only horizontal slots carry the metric")
        h = special_metric(self.scheme.n)  # self-inverse
        comp = np.tensordot(h, self.components, axes=([1], [slot]))
        comp = np.moveaxis(comp, 0, slot)
        variance = tuple(UP if s == slot else v for s, v in enumerate(self.variance))
        return ComplexTensorField(
            self.scheme, comp, variance, self.kinds, self.conjugation_pairing
        )
