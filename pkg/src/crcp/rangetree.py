"""Balanced 1D range trees with canonical-node decomposition.

Leaves hold single points; ordering is by (key, point id) so duplicate
coordinates get a deterministic order.  Separator values between
consecutive canonical subsets are midpoints of the adjacent extreme keys;
with duplicate keys the midpoint can coincide with the shared coordinate,
which downstream anchored queries tolerate because bounding-box
containment is closed.
"""

from __future__ import annotations

from typing import Callable, List, Optional

import numpy as np

__all__ = ["TreeNode", "RangeTree1D"]


class TreeNode:
    __slots__ = ("lo", "hi", "kmin", "kmax", "left", "right", "payload", "tree")

    def __init__(self, lo, hi, kmin, kmax):
        self.lo = lo
        self.hi = hi
        self.kmin = kmin
        self.kmax = kmax
        self.left: Optional[TreeNode] = None
        self.right: Optional[TreeNode] = None
        self.payload = None
        self.tree: Optional["RangeTree1D"] = None

    @property
    def size(self) -> int:
        return self.hi - self.lo

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def rows(self) -> np.ndarray:
        return self.tree.ids_sorted[self.lo : self.hi]

    def separator(self) -> float:
        """A value separating the two child subsets (strictly, when keys allow)."""
        return 0.5 * (self.left.kmax + self.right.kmin)


class RangeTree1D:
    def __init__(self, keys, ids, payload_factory: Optional[Callable] = None):
        keys = np.asarray(keys, dtype=np.float64)
        ids = np.asarray(ids, dtype=np.int64)
        order = np.lexsort((ids, keys))
        self.keys_sorted = keys[order]
        self.ids_sorted = ids[order]
        self.nodes: List[TreeNode] = []
        self.root = self._build(0, len(ids)) if len(ids) else None
        if payload_factory is not None:
            for node in self.nodes:
                node.payload = payload_factory(node)

    def _build(self, lo, hi) -> TreeNode:
        node = TreeNode(lo, hi, self.keys_sorted[lo], self.keys_sorted[hi - 1])
        node.tree = self
        self.nodes.append(node)
        if hi - lo > 1:
            mid = (lo + hi) // 2
            node.left = self._build(lo, mid)
            node.right = self._build(mid, hi)
        return node

    def __len__(self) -> int:
        return len(self.ids_sorted)

    def canonical_nodes(self, lo_val: float, hi_val: float) -> List[TreeNode]:
        """Disjoint subtrees covering exactly the keys in [lo_val, hi_val],
        ordered left to right."""
        out: List[TreeNode] = []
        if self.root is None:
            return out

        def visit(node: TreeNode):
            if node.kmin > hi_val or node.kmax < lo_val:
                return
            if node.kmin >= lo_val and node.kmax <= hi_val:
                out.append(node)
                return
            if node.is_leaf:
                return
            visit(node.left)
            visit(node.right)

        visit(self.root)
        return out

    def splitting_node(self, lo_val: float, hi_val: float) -> Optional[TreeNode]:
        """Deepest node whose subtree contains every in-range point."""
        node = self.root
        if node is None:
            return None
        while not node.is_leaf:
            if hi_val < node.right.kmin:
                node = node.left
            elif lo_val > node.left.kmax:
                node = node.right
            else:
                break
        return node

    @staticmethod
    def separators(nodes: List[TreeNode]) -> List[float]:
        """Values between consecutive canonical subsets."""
        return [
            0.5 * (a.kmax + b.kmin) for a, b in zip(nodes, nodes[1:])
        ]
