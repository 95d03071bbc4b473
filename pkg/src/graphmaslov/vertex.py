"""Vertex conditions A f + B f' = 0 as matrix pairs and C^1 families.

A pair (A, B) of 2E x 2E matrices with rank(A, B) = 2E and A B* = B A*
selects a self-adjoint realization; the corresponding Lagrangian plane is
the range of the frame with top block -B* and bottom block A*.

Builders cover the standard menu (Dirichlet, Neumann, Robin) plus the
delta-coupling star family used by the interlacing application.  Any valid
dense (A, B) can also be supplied directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graph import MetricGraph, TraceVector, boundary_index
from .symplectic import LagrangianFrame, SymplecticSpace, is_lagrangian

DEFAULT_TOL = 1e-9


@dataclass
class BoundaryPair:
    """The matrices (A, B) of a vertex condition."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        self.b = np.asarray(self.b, dtype=complex)
        if self.a.shape != self.b.shape or self.a.ndim != 2 or self.a.shape[0] != self.a.shape[1]:
            raise ValueError("A and B must be square matrices of equal size")

    @property
    def size(self) -> int:
        return self.a.shape[0]


@dataclass
class HypothesisReport:
    ok: bool
    rank: int
    sigma_min: float
    symmetry_residual: float
    det_gap: float
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_hypothesis(p: BoundaryPair, tol: float = DEFAULT_TOL) -> HypothesisReport:
    """Full-rank and Hermitian-compatibility diagnostics for a pair."""
    n = p.size
    concat = np.hstack([p.a, p.b])
    sv = np.linalg.svd(concat, compute_uv=False)
    scale = max(1.0, float(sv[0]))
    rank = int(np.sum(sv > tol * scale))
    sym = float(np.linalg.norm(p.a @ p.b.conj().T - p.b @ p.a.conj().T, 2))
    det_gap = abs(np.linalg.det(p.a @ p.a.conj().T - p.b @ p.b.conj().T))
    ok = rank == n and sym <= tol * scale**2
    reason = ""
    if rank != n:
        reason = f"rank(A, B) = {rank} < {n}"
    elif sym > tol * scale**2:
        reason = f"A B* - B A* residual {sym:.2e} exceeds tolerance"
    return HypothesisReport(ok, rank, float(sv[-1]), sym, det_gap, reason)


def l_frame(p: BoundaryPair) -> LagrangianFrame:
    """Lagrangian frame of the plane ker(A, B): top -B*, bottom A*."""
    rep = check_hypothesis(p)
    if not rep:
        raise ValueError(f"boundary pair fails the self-adjointness hypothesis: {rep.reason}")
    mat = np.vstack([-p.b.conj().T, p.a.conj().T])
    return LagrangianFrame(SymplecticSpace(p.size), mat)


def pair_residual(p: BoundaryPair, trace: TraceVector) -> float:
    """Norm of A*phi + B*psi for a trace (phi, psi)."""
    return float(np.linalg.norm(p.a @ trace.dirichlet + p.b @ trace.neumann))


def recover_f(p: BoundaryPair, trace: TraceVector, tol: float = 1e-8) -> np.ndarray:
    """The unique f with phi = -B* f, psi = A* f for a trace in the plane."""
    res = pair_residual(p, trace)
    scale = max(1.0, float(np.linalg.norm(trace.vector)))
    if res > tol * scale:
        raise ValueError(f"trace is not in the plane of (A, B): residual {res:.2e}")
    gram = p.a @ p.a.conj().T - p.b @ p.b.conj().T
    if abs(np.linalg.det(gram)) < 1e-14:
        raise ValueError("A A* - B B* is singular, contradicting the hypothesis")
    return np.linalg.solve(gram, p.b @ trace.dirichlet + p.a @ trace.neumann)


@dataclass
class BoundaryFamily:
    """C^1 one-parameter family t -> (A_t, B_t) with derivatives.

    If ``derivative`` is omitted it is formed by central differences with
    step ``h = fd_step_scale * (1 + |t|)``.
    """

    evaluator: Callable[[float], BoundaryPair]
    derivative: Callable[[float], tuple[np.ndarray, np.ndarray]] | None = None
    fd_step_scale: float = 1e-5

    def pair(self, t: float) -> BoundaryPair:
        return self.evaluator(t)

    def pair_derivative(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        if self.derivative is not None:
            return self.derivative(t)
        h = self.fd_step_scale * (1.0 + abs(t))
        pp, pm = self.evaluator(t + h), self.evaluator(t - h)
        return (pp.a - pm.a) / (2 * h), (pp.b - pm.b) / (2 * h)

    def l_sampler(self) -> Callable[[float], LagrangianFrame]:
        return lambda t: l_frame(self.evaluator(t))


def check_family(family: BoundaryFamily, ts, tol: float = DEFAULT_TOL) -> list[HypothesisReport]:
    """Hypothesis diagnostics at sampled parameters, plus derivative consistency."""
    reports = []
    for t in ts:
        p = family.pair(t)
        rep = check_hypothesis(p, tol)
        reports.append(rep)
        if family.derivative is not None:
            h = family.fd_step_scale * (1.0 + abs(t))
            pp, pm = family.pair(t + h), family.pair(t - h)
            fd_a = (pp.a - pm.a) / (2 * h)
            fd_b = (pp.b - pm.b) / (2 * h)
            da, db = family.derivative(t)
            bound_a = 1e-6 * (1.0 + np.linalg.norm(da))
            bound_b = 1e-6 * (1.0 + np.linalg.norm(db))
            if np.linalg.norm(fd_a - da) > bound_a or np.linalg.norm(fd_b - db) > bound_b:
                raise ValueError(
                    f"supplied derivative disagrees with central differences at t={t}"
                )
    return reports


# ---------------------------------------------------------------------------
# Builders


def dirichlet_pair(n: int) -> BoundaryPair:
    return BoundaryPair(np.eye(n), np.zeros((n, n)))


def neumann_pair(n: int) -> BoundaryPair:
    return BoundaryPair(np.zeros((n, n)), np.eye(n))


def robin_interval_pair(t: float, right: str = "dirichlet") -> BoundaryPair:
    """Interval with f'(0) = t f(0) at the left end.

    ``right`` selects the condition at the other endpoint ('dirichlet' or
    'neumann').  With the inward convention the Robin row reads
    -t f(a) + partial_n f(a) = 0.
    """
    a = np.zeros((2, 2))
    b = np.zeros((2, 2))
    a[0, 0] = -t
    b[0, 0] = 1.0
    if right == "dirichlet":
        a[1, 1] = 1.0
    elif right == "neumann":
        b[1, 1] = 1.0
    else:
        raise ValueError(f"unknown right condition {right!r}")
    return BoundaryPair(a, b)


def robin_interval_family(right: str = "dirichlet") -> BoundaryFamily:
    """The family t -> (f'(0) = t f(0), fixed condition at the right end)."""

    def deriv(t: float):
        da = np.zeros((2, 2))
        da[0, 0] = -1.0
        return da, np.zeros((2, 2))

    return BoundaryFamily(lambda t: robin_interval_pair(t, right), deriv)


def delta_star_pair(g: MetricGraph, t: float, outer: str = "dirichlet", robin_c: float = 0.0) -> BoundaryPair:
    """Delta coupling of strength t at the star center, chosen outer conditions.

    Row layout (documented for reproducible reports): outer-vertex rows first,
    one per edge, then the center block with degree-1 continuity rows followed
    by the single delta row  -t f(v) + sum of inward derivatives = 0.
    """
    d = g.n_edges
    if d < 2:
        raise ValueError("degree >= 2 required for a delta star")
    n = 2 * d
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    centers = [boundary_index(g, i, "a") for i in range(d)]
    outers = [boundary_index(g, i, "b") for i in range(d)]
    for r, idx in enumerate(outers):
        if outer == "dirichlet":
            a[r, idx] = 1.0
        elif outer == "neumann":
            b[r, idx] = 1.0
        elif outer == "robin":
            a[r, idx] = -robin_c
            b[r, idx] = 1.0
        else:
            raise ValueError(f"unknown outer condition {outer!r}")
    row = d
    for i in range(d - 1):
        a[row, centers[i]] = 1.0
        a[row, centers[i + 1]] = -1.0
        row += 1
    a[row, centers[0]] = -t
    for idx in centers:
        b[row, idx] = 1.0
    return BoundaryPair(a, b)


def delta_star_family(g: MetricGraph, outer: str = "dirichlet", robin_c: float = 0.0) -> BoundaryFamily:
    """One-parameter delta family at the star center; derivative in closed form."""
    d = g.n_edges
    n = 2 * d

    def deriv(t: float):
        da = np.zeros((n, n))
        da[n - 1, boundary_index(g, 0, "a")] = -1.0
        return da, np.zeros((n, n))

    return BoundaryFamily(lambda t: delta_star_pair(g, t, outer, robin_c), deriv)
