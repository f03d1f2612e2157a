"""Weighted rooted path graphs, balls, rooted isomorphism and the local metric.

Only two shapes occur: a finite path built from a tridiagonal matrix, and a
bi-infinite path with constant loop and edge weights (the local limit).
Edges of weight exactly zero are treated as absent, so a ball never crosses
them.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .ensembles import LimitWeights, TridiagonalMatrix
from .errors import ParameterError, UnsupportedRegimeError
from .sampling import RngStream

DEGREE_BOUND = 3  # two neighbours plus the loop


class PathKind(str, Enum):
    FINITE = "finite"
    BIINFINITE = "biinfinite"


@dataclass(frozen=True)
class WeightedRootedGraph:
    kind: PathKind
    loop_weights: np.ndarray  # length n (finite) or 1 (constant)
    edge_weights: np.ndarray  # length n-1 (finite) or 1 (constant)
    root: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", PathKind(self.kind))
        loops = np.array(self.loop_weights, dtype=float).ravel()
        edges = np.array(self.edge_weights, dtype=float).ravel()
        if self.kind is PathKind.FINITE:
            if loops.size < 1 or edges.size != loops.size - 1:
                raise ParameterError("finite path needs n >= 1 loops and n-1 edges")
            if not 0 <= self.root < loops.size:
                raise ParameterError(f"root {self.root} outside 0..{loops.size - 1}")
        else:
            if loops.size != 1 or edges.size != 1:
                raise ParameterError("bi-infinite path takes one loop and one edge weight")
            if self.root != 0:
                raise ParameterError("the bi-infinite path is rooted at 0")
        if not (np.all(np.isfinite(loops)) and np.all(np.isfinite(edges))):
            raise ParameterError("weights must be finite")
        loops.setflags(write=False)
        edges.setflags(write=False)
        object.__setattr__(self, "loop_weights", loops)
        object.__setattr__(self, "edge_weights", edges)
        object.__setattr__(self, "root", int(self.root))

    @classmethod
    def finite_path(cls, loops, edges, root: int = 0) -> "WeightedRootedGraph":
        return cls(PathKind.FINITE, loops, edges, root)

    @classmethod
    def biinfinite_path(cls, loop_weight: float, edge_weight: float) -> "WeightedRootedGraph":
        return cls(PathKind.BIINFINITE, [loop_weight], [edge_weight], 0)

    @classmethod
    def from_limit(cls, w: LimitWeights) -> "WeightedRootedGraph":
        return cls.biinfinite_path(w.loop_weight, w.edge_weight)

    @property
    def is_finite(self) -> bool:
        return self.kind is PathKind.FINITE

    @property
    def n(self) -> int | None:
        return self.loop_weights.size if self.is_finite else None

    @property
    def degree_bound(self) -> int:
        return DEGREE_BOUND

    @property
    def weight_bound(self) -> float:
        """M_w: the largest absolute loop or edge weight."""
        return float(max(np.abs(self.loop_weights).max(), np.abs(self.edge_weights).max(initial=0.0)))

    def with_root(self, root: int) -> "WeightedRootedGraph":
        root = int(root)
        valid = 0 <= root < self.n if self.is_finite else root == 0
        if not valid:
            raise ParameterError(f"invalid root {root}")
        # weights are validated and read-only, so they can be shared
        g = object.__new__(WeightedRootedGraph)
        for name, val in (("kind", self.kind), ("loop_weights", self.loop_weights),
                          ("edge_weights", self.edge_weights), ("root", root)):
            object.__setattr__(g, name, val)
        return g

    def has_vertex(self, v: int) -> bool:
        return (not self.is_finite) or 0 <= v < self.n

    def loop(self, v: int) -> float:
        if not self.has_vertex(v):
            raise ParameterError(f"no vertex {v}")
        return float(self.loop_weights[v if self.is_finite else 0])

    def edge(self, v: int) -> float:
        """Weight of the edge between v and v+1 (0 if there is none)."""
        if not (self.has_vertex(v) and self.has_vertex(v + 1)):
            return 0.0
        return float(self.edge_weights[v if self.is_finite else 0])

    def neighbors(self, v: int) -> list[tuple[int, float]]:
        out = []
        for u, w in ((v - 1, self.edge(v - 1)), (v + 1, self.edge(v))):
            if w != 0.0:
                out.append((u, w))
        return out


@dataclass(frozen=True)
class RootedBall:
    """Vertices within hop distance ``radius`` of the root, listed left to right."""

    radius: int
    loops: np.ndarray
    edges: np.ndarray
    root_pos: int

    def __post_init__(self):
        object.__setattr__(self, "loops", np.asarray(self.loops, dtype=float))
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=float))

    @property
    def arms(self) -> tuple[int, int]:
        """Number of vertices left and right of the root."""
        return self.root_pos, self.loops.size - 1 - self.root_pos

    def reflected(self) -> "RootedBall":
        return RootedBall(self.radius, self.loops[::-1], self.edges[::-1],
                          self.loops.size - 1 - self.root_pos)


def graph_from_tridiagonal(T: TridiagonalMatrix) -> WeightedRootedGraph:
    return WeightedRootedGraph.finite_path(T.diag, T.offdiag, 0)


def choose_root_uniform(G: WeightedRootedGraph, stream: RngStream) -> WeightedRootedGraph:
    if not G.is_finite:
        raise UnsupportedRegimeError("uniform rooting needs a finite graph")
    return G.with_root(int(stream.integers(0, G.n)))


def ball(G: WeightedRootedGraph, r: int) -> RootedBall:
    if int(r) != r or r < 0:
        raise ParameterError("radius must be a nonnegative integer")
    r = int(r)
    o = G.root
    left = 0
    while left < r and G.edge(o - left - 1) != 0.0:
        left += 1
    right = 0
    while right < r and G.edge(o + right) != 0.0:
        right += 1
    verts = range(o - left, o + right + 1)
    loops = np.array([G.loop(v) for v in verts])
    edges = np.array([G.edge(v) for v in verts[:-1]])
    return RootedBall(r, loops, edges, left)


def _same_layout(a: RootedBall, b: RootedBall, tol: float) -> bool:
    if a.root_pos != b.root_pos or a.loops.size != b.loops.size:
        return False
    return bool(np.all(np.abs(a.loops - b.loops) <= tol) and np.all(np.abs(a.edges - b.edges) <= tol))


def rooted_isomorphic(B1: RootedBall, B2: RootedBall, tol: float = 0.0) -> bool:
    """Root-preserving isomorphism of two path balls: the identity or the reflection."""
    if B1.radius != B2.radius:
        raise ParameterError(f"balls have different radii {B1.radius} and {B2.radius}")
    if tol < 0:
        raise ParameterError("tol must be nonnegative")
    return _same_layout(B1, B2, tol) or _same_layout(B1, B2.reflected(), tol)


def isomorphism_depth(G1: WeightedRootedGraph, G2: WeightedRootedGraph, r_max: int,
                      tol: float = 0.0) -> int | None:
    """Largest r <= r_max with isomorphic r-balls; -1 if even the roots differ, None if all match."""
    for r in range(int(r_max) + 1):
        if not rooted_isomorphic(ball(G1, r), ball(G2, r), tol):
            return r - 1
    return None


def graph_distance(G1: WeightedRootedGraph, G2: WeightedRootedGraph, r_max: int,
                   tol: float = 0.0) -> float:
    """2**-k with k the largest radius of isomorphic balls.

    Returns 0 when the balls agree up to ``r_max`` (the distance is then at most
    2**-r_max). If the root balls already differ the distance is capped at 1.
    """
    if int(r_max) != r_max or r_max < 1:
        raise ParameterError("r_max must be a positive integer")
    k = isomorphism_depth(G1, G2, r_max, tol)
    if k is None:
        return 0.0
    return 2.0 ** -max(k, 0)


def apply_adjacency(G: WeightedRootedGraph, f, v: int) -> float:
    """[A f](v): loop(v) f(v) plus the weighted values at the neighbours of v.

    ``f`` is a mapping vertex -> value (missing vertices are 0) or, for a finite
    graph, an array indexed by vertex.
    """
    if isinstance(f, Mapping):
        get = lambda u: float(f.get(u, 0.0))  # noqa: E731
    else:
        arr = np.asarray(f, dtype=float)
        if not G.is_finite or arr.shape != (G.n,):
            raise ParameterError("array-valued f needs a finite graph and one value per vertex")
        get = lambda u: float(arr[u])  # noqa: E731
    total = G.loop(v) * get(v)
    for u, w in G.neighbors(v):
        total += w * get(u)
    return total
