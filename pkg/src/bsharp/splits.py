"""The two ways to take a tree apart.

*Ordered-subtree splits* choose a parent-closed set of nodes containing the
root (plus the empty choice).  The chosen nodes form the kept subtree; each
maximal unchosen branch falls off intact, and together they form the
complement forest.  These splits drive series composition.

*Partition splits* choose a set of edges to remove.  The connected
components left behind form the forest; contracting each component to a
single node gives the skeleton.  These splits drive series substitution.

Both enumerations yield one split per subset, so equal-shaped splits appear
with multiplicity — that multiplicity is exactly what the series laws need,
and nothing here deduplicates it.  The public iterators are lazy (a tree of
order 40 has ~2**39 edge subsets; taking the first few must not enumerate
them all).  The ``*_table`` functions materialize and cache whole split
tables keyed by tree; series operations use those, so the 2**n cost is paid
once per tree shape and only for the small orders a truncated series
actually contains.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, NamedTuple, Union

from . import _kernels
from .trees import EMPTY_TREE, RootedTree, _EmptyTree

SubtreeOrEmpty = Union[RootedTree, _EmptyTree]


class Forest(tuple):
    """A multiset of trees, kept sorted by (order, level sequence)."""

    __slots__ = ()

    def __new__(cls, trees: tuple[RootedTree, ...] = ()):
        return super().__new__(cls, sorted(trees))

    @property
    def order(self) -> int:
        return sum(t.order for t in self)

    def __str__(self) -> str:
        return "{" + ", ".join(str(t) for t in self) + "}"

    def __repr__(self) -> str:
        return f"Forest({list(self)!r})"


class SubtreeSplit(NamedTuple):
    """One ordered-subtree split: the kept subtree (or ∅) and the forest of
    branches that were cut off."""

    subtree: SubtreeOrEmpty
    forest: Forest


class PartitionSplit(NamedTuple):
    """One partition split: the contracted skeleton and the component
    forest.  The skeleton always has exactly one node per forest member."""

    skeleton: RootedTree
    forest: Forest


def _iter_closed_masks(parents: bytes) -> Iterator[int]:
    # depth-first over node indices, exclude branch first; bit 0 always set
    n = len(parents)

    def rec(i: int, mask: int) -> Iterator[int]:
        if i == n:
            yield mask
            return
        yield from rec(i + 1, mask)
        if (mask >> parents[i]) & 1:
            yield from rec(i + 1, mask | (1 << i))

    return rec(1, 1)


def ordered_subtrees(tree: RootedTree) -> Iterator[SubtreeSplit]:
    """Lazily enumerate every ordered-subtree split of ``tree``.

    Root-only split first, whole-tree split last but one, then the empty
    split.  The number of splits is (number of parent-closed subsets) + 1.
    """
    levels = tree._levels
    parents = _kernels.parents_of(levels)
    for mask in _iter_closed_masks(parents):
        sub, forest = _kernels.subtree_split_for_mask(levels, mask)
        yield SubtreeSplit(
            RootedTree._wrap(sub),
            Forest(tuple(RootedTree._wrap(m) for m in forest)),
        )
    yield SubtreeSplit(EMPTY_TREE, Forest((RootedTree._wrap(_kernels.canonical_levels(levels)),)))


def partitions(tree: RootedTree) -> Iterator[PartitionSplit]:
    """Lazily enumerate all 2**(order-1) partition splits of ``tree``.

    The no-edges-removed split (forest = {tree}, skeleton = the one-node
    tree) comes first; the all-edges-removed split (forest of single nodes,
    skeleton shaped like the tree itself) comes last.
    """
    levels = tree._levels
    for mask in range(1 << (tree.order - 1)):
        skel, forest = _kernels.partition_split_for_mask(levels, mask)
        yield PartitionSplit(
            RootedTree._wrap(skel),
            Forest(tuple(RootedTree._wrap(m) for m in forest)),
        )


@lru_cache(maxsize=None)
def subtree_split_table(tree: RootedTree) -> tuple[tuple[SubtreeOrEmpty, tuple[RootedTree, ...]], ...]:
    """All ordered-subtree splits of ``tree`` as a cached flat table.

    Entries are (kept subtree or EMPTY_TREE, forest trees).  Same order as
    :func:`ordered_subtrees`.
    """
    out = []
    for sub, forest in _kernels.subtree_splits(tree._levels):
        kept: SubtreeOrEmpty = EMPTY_TREE if sub is None else RootedTree._wrap(sub)
        out.append((kept, tuple(RootedTree._wrap(m) for m in forest)))
    return tuple(out)


@lru_cache(maxsize=None)
def partition_split_table(tree: RootedTree) -> tuple[tuple[RootedTree, tuple[RootedTree, ...]], ...]:
    """All partition splits of ``tree`` as a cached flat table.

    Entries are (skeleton, forest trees).  Same order as :func:`partitions`;
    in particular the first entry is always (one-node tree, (tree,)).
    """
    return tuple(
        (RootedTree._wrap(skel), tuple(RootedTree._wrap(m) for m in forest))
        for skel, forest in _kernels.partition_splits(tree._levels)
    )


def clear_split_caches() -> None:
    """Drop the cached split tables (cold-start measurements only)."""
    subtree_split_table.cache_clear()
    partition_split_table.cache_clear()
