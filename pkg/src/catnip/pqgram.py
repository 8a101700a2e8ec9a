"""pq-gram profiles and distance for labeled ordered trees.

A pq-gram is a tuple of p labels down one root path (padded with the dummy
``*``, anchor last) followed by a window of q consecutive child labels of the
anchor, taken from the tree extended with q-1 dummies on each side of every
non-empty child list and q dummies under each leaf. The profile is the bag of
all grams; the distance between two trees is

    1 - 2 * |profile1 ⊓ profile2| / (|profile1| + |profile2|)

with ⊓ the bag intersection (per-gram minimum multiplicity). Equal profiles
give distance 0, disjoint ones 1.

Gram enumeration is the hot loop of candidate ranking and script matching, so
it lives in a compiled kernel (``catnip._kernel``) when that extension built;
otherwise a pure-Python twin with identical semantics is used. Set
``CATNIP_NO_KERNEL=1`` to force the fallback.
"""

from __future__ import annotations

import os
from array import array
from collections import Counter
from dataclasses import dataclass, field

from .errors import ParamMismatch, ReservedLabel
from .model import Node, Program, program_tree

DUMMY = "*"

if os.environ.get("CATNIP_NO_KERNEL"):
    _kernel = None
else:
    try:
        from . import _kernel
    except ImportError:
        _kernel = None


def backend() -> str:
    """Name of the gram-enumeration backend in use: "compiled" or "python"."""
    return "compiled" if _kernel is not None else "python"


@dataclass(frozen=True)
class PqParams:
    p: int = 2
    q: int = 3

    def __post_init__(self) -> None:
        if self.p < 1 or self.q < 1:
            raise ValueError(f"p and q must be >= 1, got p={self.p} q={self.q}")


@dataclass
class PqGramProfile:
    """Bag of pq-grams of one tree; grams are tuples of p+q labels."""

    grams: Counter
    params: PqParams
    size: int = field(init=False)

    def __post_init__(self) -> None:
        self.size = sum(self.grams.values())


def flatten_tree(root: Node) -> tuple[list[str], array, array, array]:
    """Preorder-flatten a tree into parallel arrays for the kernels.

    Returns (labels, parent, child_start, child_index): node i has children
    child_index[child_start[i]:child_start[i+1]].
    """
    labels: list[str] = []
    parents = array("i")
    order: list[Node] = []
    stack = [(root, -1)]
    while stack:
        node, parent = stack.pop()
        if node.label == DUMMY:
            raise ReservedLabel("node labeled with reserved dummy label '*'")
        idx = len(order)
        order.append(node)
        labels.append(node.label)
        parents.append(parent)
        for child in reversed(node.children):
            stack.append((child, idx))
    child_counts = [0] * len(order)
    for i, p in enumerate(parents):
        if p >= 0:
            child_counts[p] += 1
    child_start = array("i", [0] * (len(order) + 1))
    for i, c in enumerate(child_counts):
        child_start[i + 1] = child_start[i] + c
    fill = array("i", child_start[:-1])
    child_index = array("i", [0] * len(parents))
    # children end up in preorder positions, which is their sibling order
    for i, p in enumerate(parents):
        if p >= 0:
            child_index[fill[p]] = i
            fill[p] += 1
    return labels, parents, child_start, child_index


def _profile_counts_py(
    labels: list[str],
    parents: array,
    child_start: array,
    child_index: array,
    p: int,
    q: int,
) -> Counter:
    counts: Counter = Counter()
    dummy_tail = (DUMMY,) * q
    for v in range(len(labels)):
        chain: list[str] = []
        up = parents[v]
        while up >= 0 and len(chain) < p - 1:
            chain.append(labels[up])
            up = parents[up]
        head = [DUMMY] * (p - 1 - len(chain))
        head.extend(reversed(chain))
        head.append(labels[v])
        begin, end = child_start[v], child_start[v + 1]
        if begin == end:
            counts[tuple(head) + dummy_tail] += 1
            continue
        window = [DUMMY] * (q - 1)
        window.extend(labels[child_index[i]] for i in range(begin, end))
        window.extend([DUMMY] * (q - 1))
        base = tuple(head)
        for i in range(end - begin + q - 1):
            counts[base + tuple(window[i : i + q])] += 1
    return counts


def profile(tree: Node, params: PqParams = PqParams()) -> PqGramProfile:
    """Compute the pq-gram profile of a labeled tree."""
    labels, parents, child_start, child_index = flatten_tree(tree)
    if _kernel is not None:
        counts = Counter()
        counts.update(
            _kernel.profile_counts(
                labels, parents, child_start, child_index, params.p, params.q
            )
        )
    else:
        counts = _profile_counts_py(
            labels, parents, child_start, child_index, params.p, params.q
        )
    return PqGramProfile(grams=counts, params=params)


def bag_intersection_size(a: Counter, b: Counter) -> int:
    if len(b) < len(a):
        a, b = b, a
    return sum(min(count, b.get(gram, 0)) for gram, count in a.items())


def distance(p1: PqGramProfile, p2: PqGramProfile) -> float:
    """pq-gram distance between two profiles built with the same params."""
    if p1.params != p2.params:
        raise ParamMismatch(f"profiles built with {p1.params} vs {p2.params}")
    total = p1.size + p2.size
    if total == 0:
        return 0.0
    return 1.0 - 2.0 * bag_intersection_size(p1.grams, p2.grams) / total


def tree_distance(t1: Node, t2: Node, params: PqParams = PqParams()) -> float:
    return distance(profile(t1, params), profile(t2, params))


def program_profile(program: Program, params: PqParams = PqParams()) -> PqGramProfile:
    return profile(program_tree(program), params)


def program_distance(
    src: Program, tgt: Program, params: PqParams = PqParams()
) -> float:
    """Distance between the whole-program trees of two parsed projects."""
    return distance(program_profile(src, params), program_profile(tgt, params))
