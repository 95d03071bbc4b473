"""Compact metric graphs: edges with lengths and piecewise-constant potentials.

The operator never sees vertices directly; everything downstream works on the
boundary data of the edges.  The boundary of a graph with ``E`` edges is the
set of ``2E`` endpoints, ordered so that endpoint ``a`` of edge ``i`` sits at
index ``2i`` and endpoint ``b`` at ``2i+1``.  The full trace space has
dimension ``4E``: first the ``2E`` boundary values, then the ``2E`` inward
derivatives.

Sign convention (fixed globally): edge ``e`` is parametrized from ``a`` to
``b``; the inward derivative is ``+f'`` at ``a`` and ``-f'`` at ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FRACTION_TOL = 1e-12


def constant_potential(q: float) -> tuple[tuple[float, float], ...]:
    """A single-segment piecewise-constant potential covering the edge."""
    return ((1.0, float(q)),)


@dataclass(frozen=True)
class Edge:
    """One edge: a positive length and a piecewise-constant potential.

    ``potential`` is a tuple of ``(fraction, value)`` pairs; the fractions are
    relative to the edge length and must sum to 1.
    """

    length: float
    potential: tuple[tuple[float, float], ...] = ((1.0, 0.0),)

    def max_abs_potential(self) -> float:
        return max(abs(v) for _, v in self.potential)


@dataclass(frozen=True)
class MetricGraph:
    """An ordered collection of edges; immutable after validation.

    ``vertex_map`` is advisory metadata used by builders (endpoint -> vertex
    id); self-adjointness is carried entirely by the boundary matrices.
    """

    edges: tuple[Edge, ...]
    vertex_map: dict[tuple[int, str], int] | None = field(default=None, compare=False)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def boundary_dim(self) -> int:
        return 2 * len(self.edges)

    @property
    def trace_dim(self) -> int:
        return 4 * len(self.edges)

    def max_abs_potential(self) -> float:
        return max(e.max_abs_potential() for e in self.edges)


@dataclass
class TraceVector:
    """Element of the trace space: boundary values and inward derivatives."""

    dirichlet: np.ndarray
    neumann: np.ndarray

    def __post_init__(self):
        self.dirichlet = np.asarray(self.dirichlet, dtype=complex)
        self.neumann = np.asarray(self.neumann, dtype=complex)
        if self.dirichlet.shape != self.neumann.shape or self.dirichlet.ndim != 1:
            raise ValueError("trace halves must be 1-d vectors of equal length")

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "TraceVector":
        v = np.asarray(v, dtype=complex)
        half = v.shape[0] // 2
        return cls(v[:half], v[half:])

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.dirichlet, self.neumann])


def validate_graph(g: MetricGraph) -> MetricGraph:
    """Check all invariants; returns the graph unchanged on success."""
    if g.n_edges < 1:
        raise ValueError("graph must have at least one edge")
    for i, e in enumerate(g.edges):
        if not (e.length > 0):
            raise ValueError(f"edge {i}: non-positive length {e.length}")
        if len(e.potential) == 0:
            raise ValueError(f"edge {i}: empty potential segment list")
        total = 0.0
        for frac, val in e.potential:
            if not (frac > 0):
                raise ValueError(f"edge {i}: non-positive segment fraction {frac}")
            if not np.isfinite(val):
                raise ValueError(f"edge {i}: non-finite potential value {val}")
            total += frac
        if abs(total - 1.0) > FRACTION_TOL:
            raise ValueError(f"edge {i}: fractions do not sum to 1 (got {total})")
    return g


def boundary_index(g: MetricGraph, edge: int, endpoint: str) -> int:
    """Index of the (edge, endpoint) boundary point in [0, 2E)."""
    if not (0 <= edge < g.n_edges):
        raise ValueError(f"edge index {edge} out of range for {g.n_edges} edges")
    if endpoint == "a":
        return 2 * edge
    if endpoint == "b":
        return 2 * edge + 1
    raise ValueError(f"endpoint must be 'a' or 'b', got {endpoint!r}")


def make_interval(length: float, q: float | tuple = 0.0) -> MetricGraph:
    """A single edge of the given length; the simplest graph."""
    pot = constant_potential(q) if np.isscalar(q) else tuple(q)
    return validate_graph(MetricGraph(edges=(Edge(float(length), pot),)))


def make_star(degree: int, lengths, q=0.0) -> MetricGraph:
    """Star graph with all edges directed outward: endpoint ``a`` is the center.

    ``q`` is either a scalar (same constant potential on every edge) or a
    sequence of one scalar per edge.
    """
    if degree < 2:
        raise ValueError("degree >= 2 required for a star graph")
    lengths = list(lengths)
    if len(lengths) != degree:
        raise ValueError(f"expected {degree} lengths, got {len(lengths)}")
    if np.isscalar(q):
        qs = [float(q)] * degree
    else:
        qs = [float(v) for v in q]
        if len(qs) != degree:
            raise ValueError(f"expected {degree} potential values, got {len(qs)}")
    edges = tuple(Edge(float(l), constant_potential(v)) for l, v in zip(lengths, qs))
    vmap = {(i, "a"): 0 for i in range(degree)}
    for i in range(degree):
        vmap[(i, "b")] = i + 1
    return validate_graph(MetricGraph(edges=edges, vertex_map=vmap))
