"""Trees: construction, enumeration, bare paths, and layered splitting.

A tree on vertices 0..n-1 is split into a chain of subforests
T0 c T1 c ... c Tl = T where layer 0 is a small base forest, layer 1 adds
vertex-disjoint stars with many leaves, exactly one layer adds short bare
paths, and every other layer adds leaves with pairwise distinct parents.
The embedding pipeline replays these layers in order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SizeError

ENUMERATION_CUTOFF = 10


class Tree:
    """An unrooted tree on vertices 0..n-1."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n, edges):
        if n < 1:
            raise ParameterError("tree needs at least one vertex")
        edges = [tuple(sorted((int(u), int(v)))) for u, v in edges]
        if len(edges) != n - 1:
            raise ParameterError(f"tree on {n} vertices needs {n - 1} edges, got {len(edges)}")
        adj = [[] for _ in range(n)]
        seen = set()
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"bad edge ({u}, {v})")
            if (u, v) in seen:
                raise ParameterError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            adj[u].append(v)
            adj[v].append(u)
        # connectivity check
        if n > 1:
            stack, reached = [0], {0}
            while stack:
                for w in adj[stack.pop()]:
                    if w not in reached:
                        reached.add(w)
                        stack.append(w)
            if len(reached) != n:
                raise ParameterError("edge list is not connected")
        self.n = n
        self.edges = sorted(edges)
        self.adj = [sorted(a) for a in adj]

    def degree(self, v):
        return len(self.adj[v])

    def leaves(self):
        return [v for v in range(self.n) if len(self.adj[v]) == 1]

    def bfs_order(self, root=0):
        """Vertices in BFS order from root, with parent map (root's parent -1)."""
        order, parent = [root], [-1] * self.n
        seen = [False] * self.n
        seen[root] = True
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for w in self.adj[v]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    order.append(w)
        return order, parent

    def __eq__(self, other):
        return isinstance(other, Tree) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, tuple(self.edges)))

    def __repr__(self):
        return f"Tree(n={self.n})"

    # -- canonical form -------------------------------------------------

    def canonical_key(self):
        """Isomorphism-invariant key (AHU encoding rooted at the centroid)."""
        if self.n == 1:
            return "()"
        # centroid(s): minimize the largest component after removal
        size = [1] * self.n
        order, parent = self.bfs_order(0)
        for v in reversed(order[1:]):
            size[parent[v]] += size[v]
        best, cents = self.n + 1, []
        for v in range(self.n):
            heaviest = self.n - size[v]
            for w in self.adj[v]:
                if parent[w] == v:
                    heaviest = max(heaviest, size[w])
            if heaviest < best:
                best, cents = heaviest, [v]
            elif heaviest == best:
                cents.append(v)
        return min(self._ahu(c) for c in cents)

    def _ahu(self, root):
        order, parent = self.bfs_order(root)
        code = [""] * self.n
        for v in reversed(order):
            kids = sorted(code[w] for w in self.adj[v] if parent[w] == v)
            code[v] = "(" + "".join(kids) + ")"
        return code[root]

    # -- text file format ----------------------------------------------

    def to_text(self):
        lines = [str(self.n)]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ParameterError("empty tree file")
        try:
            n = int(lines[0])
            edges = [tuple(int(x) for x in ln.split()) for ln in lines[1:]]
        except ValueError as exc:
            raise ParameterError(f"malformed tree file: {exc}") from exc
        return cls(n, edges)


def prufer_decode(seq, n):
    """Tree on n vertices from a Prufer sequence of length n-2."""
    if n == 1:
        return Tree(1, [])
    if n == 2:
        return Tree(2, [(0, 1)])
    seq = [int(x) for x in seq]
    deg = [1] * n
    for x in seq:
        deg[x] += 1
    edges = []
    import heapq

    leaves = [v for v in range(n) if deg[v] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        deg[x] -= 1
        if deg[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Tree(n, edges)


def random_tree(n, seed):
    """Uniform random labelled tree (Prufer decode), deterministic in seed."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if n <= 2:
        return prufer_decode([], n)
    return prufer_decode(rng.integers(0, n, size=n - 2), n)


def enumerate_trees(n):
    """One representative per isomorphism class of trees on n vertices."""
    if n > ENUMERATION_CUTOFF:
        raise SizeError(f"tree enumeration bounded at n <= {ENUMERATION_CUTOFF}")
    if n < 1:
        raise ParameterError("n must be >= 1")
    if n == 1:
        return [Tree(1, [])]
    if n == 2:
        return [Tree(2, [(0, 1)])]
    import networkx as nx

    return [Tree(n, list(g.edges())) for g in nx.nonisomorphic_trees(n)]


# -- bare paths ---------------------------------------------------------


def _maximal_bare_paths_adj(adj, vertices):
    """Maximal bare paths of a forest given as adjacency sets.

    Each edge lies in exactly one path; interior vertices have degree 2.
    """
    paths = []
    done = set()
    branch = [v for v in sorted(vertices) if len(adj[v]) != 2]
    for v in branch:
        for u in sorted(adj[v]):
            if (v, u) in done:
                continue
            seq = [v, u]
            done.add((v, u))
            done.add((u, v))
            while len(adj[seq[-1]]) == 2:
                a, b = sorted(adj[seq[-1]])
                nxt = b if a == seq[-2] else a
                done.add((seq[-1], nxt))
                done.add((nxt, seq[-1]))
                seq.append(nxt)
            paths.append(seq)
    # normalize direction and order for determinism
    paths = [p if p[0] < p[-1] else p[::-1] for p in paths]
    paths.sort()
    return paths


def find_maximal_bare_paths(T: Tree):
    """Maximal bare paths of T as vertex sequences (every edge in exactly one)."""
    if T.n == 1:
        return []
    adj = [set(a) for a in T.adj]
    return _maximal_bare_paths_adj(adj, range(T.n))


def _pack_subpaths(bare_paths, m):
    """Vertex-disjoint length-m subpaths packed into maximal bare paths.

    Per maximal path with L vertices this yields floor((L-2)/(m+1))
    subpaths, at start offsets 1 + t(m+1), avoiding both endpoints.
    """
    out = []
    for q in bare_paths:
        L = len(q)
        j = (L - 2) // (m + 1)
        for t in range(j):
            s = 1 + t * (m + 1)
            out.append(q[s : s + m + 1])
    return out


def extract_bare_subpaths(T: Tree, m):
    """Vertex-disjoint bare subpaths of length exactly m avoiding the
    endpoints of the maximal bare paths of T."""
    if m < 2:
        raise ParameterError("subpath length must be >= 2")
    return _pack_subpaths(find_maximal_bare_paths(T), m)


# -- layered decomposition ---------------------------------------------

KIND_BASE = "base"
KIND_STARS = "stars"
KIND_PATHS3 = "paths3"
KIND_LEAVES = "leaves"


@dataclass
class Layer:
    kind: str
    vertices: list  # vertices this layer adds
    stars: list = field(default_factory=list)  # (root, [leaves]) for stars layers
    paths: list = field(default_factory=list)  # (a, x, y, b) for the paths3 layer
    pairs: list = field(default_factory=list)  # (parent, leaf) for leaves layers

    def to_json(self):
        d = {"kind": self.kind, "vertices": list(self.vertices)}
        if self.kind == KIND_STARS:
            d["stars"] = [[r, list(ls)] for r, ls in self.stars]
        elif self.kind == KIND_PATHS3:
            d["paths"] = [list(p) for p in self.paths]
        elif self.kind == KIND_LEAVES:
            d["pairs"] = [list(p) for p in self.pairs]
        return d


@dataclass
class LayeredDecomposition:
    layers: list
    j: int  # index of the paths3 layer

    @property
    def ell(self):
        return len(self.layers) - 1

    def to_json(self):
        return json.dumps(
            {"ell": self.ell, "j": self.j, "layers": [la.to_json() for la in self.layers]},
            indent=1,
        )

    def validate(self, T: Tree, D, mu, n_target):
        """Check all structural invariants against T; raises ParameterError."""
        n = T.n
        edge_set = set(map(tuple, T.edges))
        if self.layers[0].kind != KIND_BASE:
            raise ParameterError("layer 0 must be the base layer")
        if self.layers[1].kind != KIND_STARS:
            raise ParameterError("layer 1 must be the stars layer")
        if len(self.layers[0].vertices) > mu * n_target:
            raise ParameterError(f"base layer too large: {len(self.layers[0].vertices)}")
        seen = set()
        for idx, la in enumerate(self.layers):
            for v in la.vertices:
                if v in seen:
                    raise ParameterError(f"vertex {v} appears in two layers")
                seen.add(v)
            if idx == 0:
                continue
            prefix = seen - set(la.vertices)
            if la.kind == KIND_STARS:
                if idx != 1:
                    raise ParameterError("stars layer must be layer 1")
                used_leaves = set()
                for root, ls in la.stars:
                    if len(ls) < D:
                        raise ParameterError(f"star at {root} has only {len(ls)} leaves")
                    if root not in prefix:
                        raise ParameterError(f"star root {root} not in base layer")
                    for leaf in ls:
                        if leaf in used_leaves or leaf == root:
                            raise ParameterError("star leaf sets not disjoint")
                        used_leaves.add(leaf)
                        if tuple(sorted((root, leaf))) not in edge_set:
                            raise ParameterError(f"({root},{leaf}) is not a tree edge")
                if used_leaves != set(la.vertices):
                    raise ParameterError("stars layer vertex set mismatch")
            elif la.kind == KIND_PATHS3:
                if idx != self.j:
                    raise ParameterError("paths3 layer index mismatch")
                if len(la.paths) > mu * n_target:
                    raise ParameterError(f"too many length-3 paths: {len(la.paths)}")
                interiors = set()
                for a, x, y, b in la.paths:
                    if a not in prefix or b not in prefix:
                        raise ParameterError(f"path endpoint not in earlier layers: {a},{b}")
                    for p, q in ((a, x), (x, y), (y, b)):
                        if tuple(sorted((p, q))) not in edge_set:
                            raise ParameterError(f"({p},{q}) is not a tree edge")
                    for w in (x, y):
                        if w in interiors:
                            raise ParameterError("path interiors not disjoint")
                        interiors.add(w)
                if interiors != set(la.vertices):
                    raise ParameterError("paths3 layer vertex set mismatch")
            elif la.kind == KIND_LEAVES:
                parents = set()
                added = set()
                for parent, leaf in la.pairs:
                    if parent in parents:
                        raise ParameterError(f"two leaves share parent {parent} in layer {idx}")
                    parents.add(parent)
                    if parent not in prefix:
                        raise ParameterError(f"leaf parent {parent} not in earlier layers")
                    if tuple(sorted((parent, leaf))) not in edge_set:
                        raise ParameterError(f"({parent},{leaf}) is not a tree edge")
                    added.add(leaf)
                if added != set(la.vertices):
                    raise ParameterError("leaves layer vertex set mismatch")
            else:
                raise ParameterError(f"unknown layer kind {la.kind!r}")
        if seen != set(range(n)):
            raise ParameterError("layers do not partition the vertex set")
        if sum(1 for la in self.layers if la.kind == KIND_PATHS3) != 1:
            raise ParameterError("need exactly one paths3 layer")
        # every prefix union must induce a subforest: it contains, for each
        # layer, only edges back into earlier layers, which holds by the
        # per-layer checks above (each added vertex attaches into the prefix).
        return True


def split_tree(T: Tree, D, mu, n_target):
    """Split T into the layered structure used by the embedding pipeline.

    Strategy (removal order, later reversed into layers): strip large
    batches of non-neighbouring leaves while batches stay big, freezing
    any vertex that accumulates >= D leaf children as a star with its
    current leaves; then cut length-3 end pieces out of packed bare
    subpaths of the remaining core (the single paths3 layer); then keep
    stripping leaves until at most mu*n_target unfrozen vertices remain.
    Frozen stars are never stripped, so their roots end in the base layer.
    """
    if not (0 < mu < 1):
        raise ParameterError("mu must be in (0,1)")
    if D < 1:
        raise ParameterError("D must be >= 1")
    if mu * n_target < 1:
        raise ParameterError(f"infeasible mu: mu*n_target = {mu * n_target:.3g} < 1")
    if T.n > n_target:
        raise ParameterError(f"|T| = {T.n} exceeds n_target = {n_target}")

    n = T.n
    target = int(mu * n_target)
    s_cap = int(mu * n_target) // 2  # extracted segments; 2 paths each
    max_roots = max(1, target - 1)
    stall = max(2, min(n_target // 32, 150))

    adj = [set(a) for a in T.adj]
    alive = [True] * n
    alive_count = n
    protected = set()  # frozen star leaves
    roots = set()
    star_of = {}

    removal = []  # batches in removal order
    paths_batch = None  # (paths, interior vertices)

    def protect_stars():
        nonlocal max_roots
        by_parent = {}
        for v in range(n):
            if alive[v] and len(adj[v]) == 1 and v not in protected and v not in roots:
                (p,) = adj[v]
                by_parent.setdefault(p, []).append(v)
        cands = [
            (len(ls), p)
            for p, ls in by_parent.items()
            if len(ls) >= D and p not in roots and p not in protected
        ]
        for _, p in sorted(cands, reverse=True):
            if len(roots) >= max_roots:
                break
            roots.add(p)
            frozen = sorted(by_parent[p])
            star_of[p] = frozen
            protected.update(frozen)

    def peel(limit):
        """One maximal distinct-parent leaf batch (trimmed to `limit`)."""
        nonlocal alive_count
        by_parent = {}
        for v in range(n):
            if alive[v] and len(adj[v]) == 1 and v not in protected and v not in roots:
                (p,) = adj[v]
                if p not in by_parent:
                    by_parent[p] = v
        batch = []
        chosen_parents, chosen_leaves = set(), set()
        for p, v in sorted(by_parent.items()):
            if len(batch) >= limit:
                break
            # in a 2-vertex component each endpoint is the other's parent;
            # never remove a vertex that serves as a parent in this batch
            if p in chosen_leaves or v in chosen_parents:
                continue
            batch.append((p, v))
            chosen_parents.add(p)
            chosen_leaves.add(v)
        for p, v in batch:
            adj[p].discard(v)
            adj[v].clear()
            alive[v] = False
            alive_count -= 1
        if batch:
            removal.append(batch)
        return len(batch)

    def effective():
        return alive_count - len(protected)

    # phase 1: strip fat outer batches
    while True:
        protect_stars()
        room = effective() - target
        if room <= 0:
            break
        got = 0
        if room >= stall:
            got = peel(room)
        if got < stall:
            break

    # phase 2: cut the paths3 batch out of the remaining core
    if effective() > target and s_cap > 0:
        core = [v for v in range(n) if alive[v] and v not in protected]
        core_adj = [set() for _ in range(n)]
        for v in core:
            core_adj[v] = {w for w in adj[v] if w not in protected}
        bare = _maximal_bare_paths_adj(core_adj, core)
        segs = []
        for m in range(7, n + 1):
            segs = _pack_subpaths(bare, m)
            if len(segs) <= s_cap:
                break
        if segs:
            items = []
            for q in segs:
                mq = len(q) - 1
                items.append((q[0], q[1], q[2], q[3]))
                items.append((q[mq], q[mq - 1], q[mq - 2], q[mq - 3]))
            interior = []
            for a, x, y, b in items:
                for w in (x, y):
                    for u in adj[w]:
                        adj[u].discard(w)
                    adj[w].clear()
                    alive[w] = False
                    alive_count -= 1
                    interior.append(w)
            paths_batch = (items, interior)
            removal.append(("__paths__", None))

    # phase 3: strip everything else down to the base target
    while effective() > target:
        protect_stars()
        room = effective() - target
        if room <= 0:
            break
        if peel(room) == 0:
            # stuck: every leaf is frozen; demote the smallest star
            if not star_of:
                break
            root = min(star_of, key=lambda r: (len(star_of[r]), r))
            protected.difference_update(star_of.pop(root))
            roots.discard(root)

    # assemble layers: base, stars, then reversed removal
    base = sorted(v for v in range(n) if alive[v] and v not in protected)
    layers = [Layer(KIND_BASE, base)]
    star_list = sorted((r, star_of[r]) for r in star_of)
    layers.append(
        Layer(KIND_STARS, sorted(v for _, ls in star_list for v in ls), stars=star_list)
    )
    j = None
    if paths_batch is None:
        layers.append(Layer(KIND_PATHS3, [], paths=[]))
        j = 2
    for batch in reversed(removal):
        if isinstance(batch, tuple) and batch[0] == "__paths__":
            items, interior = paths_batch
            j = len(layers)
            layers.append(Layer(KIND_PATHS3, sorted(interior), paths=items))
        else:
            layers.append(
                Layer(KIND_LEAVES, sorted(v for _, v in batch), pairs=list(batch))
            )
    return LayeredDecomposition(layers, j)
