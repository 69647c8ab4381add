"""Edge-coloured complete graphs.

An :class:`EdgeColouring` assigns a colour to every unordered pair of
distinct vertices of K_n.  Colourings are either explicit (a stored
table) or implicit (a closed-form rule evaluated on demand), which lets
instances with n in the thousands exist without storing ~n^2/2 edges.

Colour ids are always dense: every id in ``[0, n_colours)`` occurs on at
least one edge.  A colouring is *locally k-bounded* when every vertex
touches at most k edges of any single colour; ``k`` stores the declared
bound, :meth:`EdgeColouring.max_local_multiplicity` measures the true one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidEdgeError, ParameterError, ScanLimitError

# kind codes shared with the compiled kernels
KIND_EXPLICIT = 0
KIND_ND = 1
KIND_ZSUM = 2
KIND_Z2K = 3
KIND_ROUND_ROBIN = 4
KIND_RR_MERGED = 5

DEFAULT_SCAN_LIMIT = 5000

_EMPTY_LUT = np.zeros(0, dtype=np.int64)
_EMPTY_TABLE = np.zeros((0, 0), dtype=np.int64)


@dataclass(frozen=True)
class GroupSpec:
    """A finite Abelian group used to colour edges by endpoint sums.

    kind is one of "cyclic", "elementary_two", "product"; param is the
    cyclic order, the exponent k (group Z_2^k), or a tuple of cyclic
    orders respectively.
    """

    kind: str
    param: object

    @property
    def order(self) -> int:
        if self.kind == "cyclic":
            return int(self.param)
        if self.kind == "elementary_two":
            return 2 ** int(self.param)
        if self.kind == "product":
            out = 1
            for m in self.param:
                out *= int(m)
            return out
        raise ParameterError(f"unknown group kind {self.kind!r}")

    def add(self, i: int, j: int) -> int:
        """Sum of the group elements with indices i and j."""
        if self.kind == "cyclic":
            return (i + j) % self.order
        if self.kind == "elementary_two":
            return i ^ j
        # mixed-radix componentwise addition
        out, base = 0, 1
        for m in self.param:
            out += ((i // base + j // base) % m) * base
            base *= m
        return out

    @property
    def has_exponent_two(self) -> bool:
        if self.kind == "elementary_two":
            return True
        if self.kind == "product":
            return all(int(m) == 2 for m in self.param)
        return self.order == 2


class EdgeColouring:
    """A total edge colouring of K_n with dense colour ids.

    Construct via the module-level factories (nd_colouring,
    group_sum_colouring, round_robin_proper, random_locally_k_bounded,
    explicit_colouring) rather than directly.  Instances are immutable
    after construction and safe to share between threads.
    """

    def __init__(self, kind, n, k, n_colours, *, a=0, b=0, lut=None, table=None, meta=None):
        self.kind = kind
        self.n = int(n)
        self.k = int(k)
        self.n_colours = int(n_colours)
        self._a = int(a)
        self._b = int(b)
        self._lut = _EMPTY_LUT if lut is None else np.asarray(lut, dtype=np.int64)
        self._table = _EMPTY_TABLE if table is None else np.asarray(table, dtype=np.int64)
        self.meta = dict(meta or {})

    # -- queries -------------------------------------------------------

    def _check_vertex(self, v):
        if not 0 <= v < self.n:
            raise InvalidEdgeError(f"vertex {v} out of range [0, {self.n})")

    def colour_of(self, u: int, v: int) -> int:
        """Colour of the edge {u, v}; symmetric and deterministic."""
        u, v = int(u), int(v)
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise InvalidEdgeError(f"loop at vertex {u} is not an edge")
        return int(self.colour_row(u, np.asarray([v]))[0])

    def colour_row(self, v: int, xs=None) -> np.ndarray:
        """Colours of the edges {v, x} for each x in xs (vectorized).

        With xs None, returns a length-n row whose entry at v itself is -1.
        """
        if xs is None:
            xs = np.arange(self.n)
            diag = v
        else:
            xs = np.asarray(xs, dtype=np.int64)
            diag = None
        kind = self.kind
        if kind == KIND_EXPLICIT:
            out = self._table[v, xs].astype(np.int64)
        elif kind == KIND_ND:
            n = self._a
            d = (xs - v) % n
            out = np.minimum(d, n - d) - 1
        elif kind == KIND_ZSUM:
            out = (xs + v) % self._a
        elif kind == KIND_Z2K:
            out = (xs ^ v) - 1
        elif kind in (KIND_ROUND_ROBIN, KIND_RR_MERGED):
            N, inv2 = self._a, self._b
            out = np.where(
                xs == N - 1, v, np.where(v == N - 1, xs, (xs + v) * inv2 % (N - 1))
            )
            # diagonal slots are not edges; pin to 0 so lut indexing is safe
            out = np.where(xs == v, 0, out).astype(np.int64)
            if kind == KIND_RR_MERGED:
                out = self._lut[out]
        else:  # pragma: no cover
            raise ParameterError(f"unknown colouring kind {kind}")
        if diag is not None:
            out = np.asarray(out, dtype=np.int64)
            out[diag] = -1
        return np.asarray(out, dtype=np.int64)

    def colour_degree(self, v: int, c: int) -> int:
        """Number of edges at v with colour c."""
        self._check_vertex(v)
        if not 0 <= c < self.n_colours:
            raise InvalidEdgeError(f"colour {c} out of range [0, {self.n_colours})")
        return int(np.count_nonzero(self.colour_row(v) == c))

    def neighbours_in(self, v: int, colours, vertices) -> np.ndarray:
        """Vertices u in `vertices` with u != v and colour({u,v}) in `colours`.

        `colours` may be a boolean mask of length n_colours or an iterable
        of colour ids; likewise `vertices` an array of vertex ids.
        """
        self._check_vertex(v)
        xs = np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices)
        xs = xs[xs != v]
        if xs.size == 0:
            return xs.astype(np.int64)
        mask = self.colour_mask(colours)
        cols = self.colour_row(v, xs)
        return xs[mask[cols]].astype(np.int64)

    def colour_mask(self, colours) -> np.ndarray:
        """Normalize a colour collection to a boolean mask."""
        if isinstance(colours, np.ndarray) and colours.dtype == bool:
            if colours.shape != (self.n_colours,):
                raise ParameterError("colour mask has wrong length")
            return colours
        mask = np.zeros(self.n_colours, dtype=bool)
        idx = np.asarray(list(colours), dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= self.n_colours:
                raise InvalidEdgeError("colour id out of range")
            mask[idx] = True
        return mask

    def max_local_multiplicity(self, scan_limit: int = DEFAULT_SCAN_LIMIT) -> int:
        """Exact max over (vertex, colour) of the number of same-coloured edges.

        Scans all n rows; refuses explicit colourings above `scan_limit`.
        Implicit kinds above the limit answer from their defining rule.
        """
        if self.n <= scan_limit:
            best = 0
            for v in range(self.n):
                row = self.colour_row(v)
                counts = np.bincount(row[row >= 0], minlength=self.n_colours)
                best = max(best, int(counts.max()))
            return best
        if self.kind == KIND_EXPLICIT:
            raise ScanLimitError(
                f"explicit colouring on {self.n} vertices exceeds scan limit {scan_limit}"
            )
        return {
            KIND_ND: 2,
            KIND_ZSUM: 1,
            KIND_Z2K: 1,
            KIND_ROUND_ROBIN: 1,
            KIND_RR_MERGED: self.k,
        }[self.kind]

    # -- kernels / serialization --------------------------------------

    def kernel_spec(self):
        """(kind, a, b, lut, table) consumed by the compiled/pure kernels."""
        return (self.kind, self._a, self._b, self._lut, self._table)

    def to_json(self) -> dict:
        if self.kind == KIND_EXPLICIT:
            edges = [
                [u, v, int(self._table[u, v])]
                for u in range(self.n)
                for v in range(u + 1, self.n)
            ]
            return {"n": self.n, "k": self.k, "edges": edges}
        return dict(self.meta["json"])

    def __repr__(self):
        return (
            f"EdgeColouring({self.meta.get('name', self.kind)}, n={self.n}, "
            f"k={self.k}, colours={self.n_colours})"
        )


# -- factories ---------------------------------------------------------


def nd_colouring(m: int) -> EdgeColouring:
    """Cyclic near-distance colouring of K_{2m+1}.

    The edge {i, j} gets the cyclic distance min(+-(i-j) mod 2m+1); there
    are m colours (ids 0..m-1 for distances 1..m), each class is a
    (2m+1)-cycle and the colouring is locally 2-bounded.
    """
    if m < 1:
        raise ParameterError("nd colouring needs m >= 1")
    n = 2 * m + 1
    return EdgeColouring(
        KIND_ND, n, 2, m, a=n,
        meta={"name": f"nd({m})", "json": {"kind": "nd", "m": m}, "colour_id_offset": 1},
    )


def group_sum_colouring(spec: GroupSpec) -> EdgeColouring:
    """Colour edge {g, h} of K_|Gamma| by the group sum g+h; always proper.

    For exponent-2 groups the sum 0 never occurs on an edge, so colour ids
    are shifted down by one to stay dense.
    """
    order = spec.order
    if order < 3:
        raise ParameterError("group sum colouring needs |group| >= 3")
    if spec.kind == "cyclic":
        return EdgeColouring(
            KIND_ZSUM, order, 1, order, a=order,
            meta={"name": f"zsum({order})", "json": {"kind": "zsum", "n": order},
                  "group": spec},
        )
    if spec.has_exponent_two:
        k = int(spec.param) if spec.kind == "elementary_two" else len(spec.param)
        return EdgeColouring(
            KIND_Z2K, order, 1, order - 1, a=order,
            meta={"name": f"z2k({k})", "json": {"kind": "z2k", "k": k},
                  "group": spec, "colour_id_offset": 1},
        )
    # mixed product group: small use only, store the table
    idx = np.arange(order)
    table = np.zeros((order, order), dtype=np.int32)
    for g in range(order):
        table[g] = [spec.add(g, h) for h in idx]
    np.fill_diagonal(table, -1)
    col = EdgeColouring(
        KIND_EXPLICIT, order, 1, order, table=table,
        meta={"name": f"gsum{tuple(spec.param)}", "group": spec},
    )
    return col


def round_robin_proper(n: int) -> EdgeColouring:
    """Proper (n-1)-colouring of K_n for even n; each class a perfect matching.

    Circle method with pivot vertex n-1: round r pairs the pivot with r and
    otherwise pairs {i, j} with i+j = 2r (mod n-1).
    """
    if n < 2 or n % 2:
        raise ParameterError("round robin colouring needs even n >= 2")
    inv2 = pow(2, -1, n - 1) if n > 2 else 0
    return EdgeColouring(
        KIND_ROUND_ROBIN, n, 1, n - 1, a=n, b=inv2,
        meta={"name": f"rr({n})", "json": {"kind": "round_robin", "n": n}},
    )


def random_locally_k_bounded(n: int, k: int, seed: int) -> EdgeColouring:
    """Random locally k-bounded colouring, deterministic in the seed.

    Starts from the round-robin proper colouring of K_n (padded to even N)
    and merges a seed-shuffled ordering of its N-1 classes into groups of
    at most k, so the bound holds by construction.
    """
    if n < 2 or k < 1:
        raise ParameterError("need n >= 2 and k >= 1")
    N = n if n % 2 == 0 else n + 1
    rng = np.random.default_rng(seed)
    perm = rng.permutation(N - 1)
    merged = np.zeros(N - 1, dtype=np.int64)
    for pos, c in enumerate(perm):
        merged[c] = pos // k
    n_colours = int(merged.max()) + 1
    inv2 = pow(2, -1, N - 1) if N > 2 else 0
    return EdgeColouring(
        KIND_RR_MERGED, n, k, n_colours, a=N, b=inv2, lut=merged,
        meta={"name": f"rand({n},{k},{seed})",
              "json": {"kind": "random_k_bounded", "n": n, "k": k, "seed": seed}},
    )


def explicit_colouring(n: int, k: int, edges) -> EdgeColouring:
    """Explicit colouring from a full list of (u, v, colour) triples.

    Every unordered pair must appear exactly once.  Colour ids are
    normalized to a dense 0-based range (order-preserving).
    """
    if n < 2:
        raise ParameterError("need n >= 2")
    table = np.full((n, n), -2, dtype=np.int64)
    np.fill_diagonal(table, -1)
    for u, v, c in edges:
        u, v, c = int(u), int(v), int(c)
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise InvalidEdgeError(f"bad edge ({u}, {v})")
        if c < 0:
            raise ParameterError(f"negative colour {c}")
        if table[u, v] != -2:
            raise ParameterError(f"edge ({u}, {v}) listed twice")
        table[u, v] = table[v, u] = c
    if (table == -2).any():
        miss = np.argwhere(table == -2)[0]
        raise ParameterError(f"edge ({miss[0]}, {miss[1]}) missing from explicit colouring")
    used = np.unique(table[table >= 0])
    remap = {int(c): i for i, c in enumerate(used)}
    dense = np.full((n, n), -1, dtype=np.int32)
    for u in range(n):
        for v in range(n):
            if table[u, v] >= 0:
                dense[u, v] = remap[int(table[u, v])]
    return EdgeColouring(
        KIND_EXPLICIT, n, k, len(used), table=dense,
        meta={"name": f"explicit({n})", "colour_remap": remap},
    )


def colouring_from_json(obj: dict) -> EdgeColouring:
    """Parse the colouring JSON schema (explicit or implicit)."""
    if "edges" in obj:
        return explicit_colouring(obj["n"], obj.get("k", 0) or _infer_k(obj), obj["edges"])
    kind = obj.get("kind")
    if kind == "nd":
        return nd_colouring(int(obj["m"]))
    if kind == "zsum":
        return group_sum_colouring(GroupSpec("cyclic", int(obj["n"])))
    if kind == "z2k":
        return group_sum_colouring(GroupSpec("elementary_two", int(obj["k"])))
    if kind == "round_robin":
        return round_robin_proper(int(obj["n"]))
    if kind == "random_k_bounded":
        return random_locally_k_bounded(int(obj["n"]), int(obj["k"]), int(obj["seed"]))
    raise ParameterError(f"unknown colouring JSON kind {kind!r}")


def _infer_k(obj):
    col = explicit_colouring(obj["n"], 1, obj["edges"])
    return col.max_local_multiplicity()


def colouring_from_spec(spec: str) -> EdgeColouring:
    """Parse an inline colouring spec like nd:8, zsum:101, z2k:4, rr:10,
    rand:20:2:7."""
    parts = spec.split(":")
    name, args = parts[0], [int(x) for x in parts[1:]]
    if name == "nd":
        return nd_colouring(args[0])
    if name == "zsum":
        return group_sum_colouring(GroupSpec("cyclic", args[0]))
    if name == "z2k":
        return group_sum_colouring(GroupSpec("elementary_two", args[0]))
    if name == "rr":
        return round_robin_proper(args[0])
    if name == "rand":
        return random_locally_k_bounded(*args)
    raise ParameterError(f"unknown colouring spec {spec!r}")
