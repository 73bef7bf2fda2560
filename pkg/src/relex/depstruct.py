"""Dependency trees, lowest common ancestors, shortest paths, and the three
relation substructures (shortest path, LCA subtree, full tree)."""

from __future__ import annotations

from dataclasses import dataclass

SPTREE = "SPTree"
SUBTREE = "SubTree"
FULLTREE = "FullTree"
KINDS = (SPTREE, SUBTREE, FULLTREE)

ON_PATH = 0
OFF_PATH = 1


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class DepTree:
    """Parent pointers over tokens ``1..n``; parent 0 marks the root."""

    parent: tuple[int, ...]  # parent[i] for i in 0..n, parent[0] unused
    deprel: tuple[str, ...]
    children: tuple[tuple[int, ...], ...]
    root: int
    depth: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.parent) - 1

    def ancestors(self, a: int) -> list[int]:
        """``a`` and all its ancestors, bottom-up, ending at the root."""
        out = [a]
        while self.parent[a] != 0:
            a = self.parent[a]
            out.append(a)
        return out


def validate_tree(tokens) -> DepTree:
    """Check that heads form a single-rooted tree and index it.

    ``tokens`` is any sequence of objects with ``head`` and ``deprel``
    attributes, token i at position i-1.
    """
    n = len(tokens)
    if n == 0:
        raise TreeError("empty sentence")
    parent = [0] + [t.head for t in tokens]
    roots = [i for i in range(1, n + 1) if parent[i] == 0]
    for i in range(1, n + 1):
        if not 0 <= parent[i] <= n:
            raise TreeError(f"token {i}: head {parent[i]} does not exist")
        if parent[i] == i:
            raise TreeError(f"token {i} is its own head (cycle)")
    if not roots:
        raise TreeError("no root token (every token has a head; the heads form a cycle)")
    if len(roots) > 1:
        raise TreeError(f"multiple roots: tokens {roots}")
    depth = [-1] * (n + 1)
    depth[roots[0]] = 0
    for i in range(1, n + 1):
        path = []
        j = i
        while depth[j] < 0:
            path.append(j)
            j = parent[j]
            if j in path:
                raise TreeError(f"cycle through tokens {sorted(path)}")
        for k in reversed(path):
            depth[k] = depth[parent[k]] + 1
    children = [[] for _ in range(n + 1)]
    for i in range(1, n + 1):
        if parent[i]:
            children[parent[i]].append(i)
    return DepTree(tuple(parent), ("",) + tuple(t.deprel for t in tokens),
                   tuple(tuple(c) for c in children), roots[0], tuple(depth))


def lca(tree: DepTree, a: int, b: int) -> int:
    da, db = tree.depth[a], tree.depth[b]
    while da > db:
        a = tree.parent[a]
        da -= 1
    while db > da:
        b = tree.parent[b]
        db -= 1
    while a != b:
        a, b = tree.parent[a], tree.parent[b]
    return a


def shortest_path(tree: DepTree, a: int, b: int) -> list[int]:
    """Tokens from ``a`` up to the LCA and down to ``b``, inclusive."""
    top = lca(tree, a, b)
    up = []
    while a != top:
        up.append(a)
        a = tree.parent[a]
    down = []
    while b != top:
        down.append(b)
        b = tree.parent[b]
    return up + [top] + down[::-1]


@dataclass(frozen=True)
class PathStructure:
    kind: str
    nodes: tuple[int, ...]  # ascending token order
    parent: dict  # node -> parent within the structure (anchor -> 0)
    children: dict  # node -> tuple of children within the structure, ascending
    anchor: int  # top of the structure: the LCA, or the tree root for FullTree
    targets: tuple[int, int]
    node_type: dict  # node -> ON_PATH / OFF_PATH
    lca: int

    def bottom_up_order(self) -> list[int]:
        """Nodes with every child before its parent."""
        order = []
        stack = [(self.anchor, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            stack.append((node, True))
            for c in reversed(self.children[node]):
                stack.append((c, False))
        return order

    def top_down_order(self) -> list[int]:
        return self.bottom_up_order()[::-1]


def extract_structure(tree: DepTree, p1: int, p2: int, kind: str = SPTREE) -> PathStructure:
    if kind not in KINDS:
        raise ValueError(f"structure kind must be one of {KINDS}, got {kind!r}")
    path = shortest_path(tree, p1, p2)
    on_path = set(path)
    top = lca(tree, p1, p2)
    if kind == SPTREE:
        nodes = on_path
    elif kind == SUBTREE:
        nodes = set()
        stack = [top]
        while stack:
            x = stack.pop()
            nodes.add(x)
            stack.extend(tree.children[x])
    else:
        nodes = set(range(1, tree.n + 1))
    anchor = top if kind != FULLTREE else tree.root
    parent = {x: (tree.parent[x] if x != anchor else 0) for x in nodes}
    children = {x: tuple(c for c in tree.children[x] if c in nodes) for x in nodes}
    node_type = {x: (ON_PATH if x in on_path else OFF_PATH) for x in nodes}
    return PathStructure(kind, tuple(sorted(nodes)), parent, children, anchor, (p1, p2),
                         node_type, top)
