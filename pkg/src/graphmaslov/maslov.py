"""Maslov index of paths of Lagrangian planes, crossing forms, two-path index.

The index is computed from the partition definition: along the path the plane
is turned into a unitary via the Souriau map, the product with the reference
unitary is formed, and the counting function

    k(s, eps) = #{ eigenphases of T(s) in [0, eps] }

is accumulated over subintervals whose barrier eps avoids all eigenphases at
the subinterval ends.  Orientation: T(s) = W(s)^* W_ref, which makes a plane
rotating counterclockwise through the reference count negatively, in
agreement with the crossing-form signature formula.

The two-path index doubles the space with the form omega + (-omega); after a
coordinate shuffle the doubled structure is again in canonical block form, so
the same machinery applies verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .symplectic import (
    LagrangianFrame,
    SymplecticSpace,
    intersection_basis,
    intersection_dim,
    omega_gram,
    souriau_unitary,
)

TWO_PI = 2 * np.pi

# Refinement triggers: maximum matched eigenphase motion per subinterval and
# minimum admissible barrier margin.
MAX_PHASE_STEP = np.pi / 4
MIN_BARRIER_MARGIN = 1e-8


@dataclass
class LagrangianPath:
    """A path of Lagrangian planes given by a sampler over [a, b].

    The sampler must be evaluable slightly outside the interval as well (the
    crossing form uses central differences).
    """

    space: SymplecticSpace
    sampler: Callable[[float], LagrangianFrame]
    interval: tuple[float, float]
    c1: bool = True
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def constant(cls, f: LagrangianFrame, interval) -> "LagrangianPath":
        return cls(f.space, lambda s: f, (float(interval[0]), float(interval[1])))

    def frame(self, s: float) -> LagrangianFrame:
        if s not in self._cache:
            self._cache[s] = self.sampler(s)
        return self._cache[s]

    def reversed(self) -> "LagrangianPath":
        a, b = self.interval
        return LagrangianPath(self.space, lambda s: self.sampler(a + b - s), (a, b), self.c1)


@dataclass
class PathCrossing:
    s: float
    dim: int
    min_phase: float


@dataclass
class MaslovResult:
    index: int
    crossings: list[PathCrossing]
    n_samples: int

    def __int__(self) -> int:
        return self.index


class GridTooCoarse(RuntimeError):
    pass


def _fold(phases: np.ndarray) -> np.ndarray:
    """Fold angles into (-pi, pi]."""
    return np.mod(phases + np.pi, TWO_PI) - np.pi


class _UnitaryFlow:
    """Caches eigendecompositions of T(s) = W(s)^* W_ref along the path."""

    def __init__(self, path: LagrangianPath, reference: LagrangianFrame):
        self.path = path
        self.w_ref = souriau_unitary(reference)
        self._eig: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def tmat(self, s: float) -> np.ndarray:
        return souriau_unitary(self.path.frame(s)).conj().T @ self.w_ref

    def eig(self, s: float):
        if s not in self._eig:
            vals, vecs = np.linalg.eig(self.tmat(s))
            self._eig[s] = (np.angle(vals), vecs)
        return self._eig[s]

    def min_abs_phase(self, s: float) -> float:
        phases, _ = self.eig(s)
        return float(np.min(np.abs(_fold(phases))))

    @property
    def n_samples(self) -> int:
        return len(self._eig)


def _matched_motion(flow: _UnitaryFlow, s0: float, s1: float) -> float:
    """Largest eigenphase movement between two samples, matched by overlap."""
    p0, v0 = flow.eig(s0)
    p1, v1 = flow.eig(s1)
    overlap = np.abs(v0.conj().T @ v1)
    rows, cols = linear_sum_assignment(-overlap)
    deltas = _fold(p1[cols] - p0[rows])
    return float(np.max(np.abs(deltas)))


def _barrier(phases0: np.ndarray, phases1: np.ndarray) -> tuple[float, float]:
    """Pick eps in (0, pi) inside the largest gap of folded |phases|.

    Returns (eps, margin); margin is the half-width of the gap.
    """
    pooled = np.abs(_fold(np.concatenate([phases0, phases1])))
    pts = np.unique(np.concatenate([[0.0], pooled, [np.pi]]))
    gaps = np.diff(pts)
    j = int(np.argmax(gaps))
    eps = float(np.clip((pts[j] + pts[j + 1]) / 2, 1e-6, np.pi - 1e-6))
    return eps, float(gaps[j] / 2)


def _count_k(phases: np.ndarray, eps: float) -> int:
    """k(s, eps): eigenphases in [0, eps], phases taken mod 2*pi."""
    wrapped = np.mod(phases, TWO_PI)
    return int(np.sum(wrapped <= eps + 1e-15))


def maslov_index(
    path: LagrangianPath,
    reference: LagrangianFrame,
    init_samples: int = 17,
    max_depth: int = 40,
    eval_budget: int = 40000,
    tol_phase: float = 1e-7,
    locate_crossings: bool = True,
) -> MaslovResult:
    """Maslov index of a path against a fixed reference plane.

    Raises GridTooCoarse when no admissible partition is found within the
    refinement budget.
    """
    if reference.space != path.space:
        raise ValueError("reference plane lives in a different space")
    flow = _UnitaryFlow(path, reference)
    a, b = path.interval
    if b == a:
        return MaslovResult(0, [], 0)
    grid = list(np.linspace(a, b, init_samples))
    stack = [(grid[i], grid[i + 1], 0) for i in range(len(grid) - 1)]
    index = 0
    done_cells: list[tuple[float, float]] = []
    while stack:
        s0, s1, depth = stack.pop()
        if flow.n_samples > eval_budget:
            raise GridTooCoarse("grid too coarse: sample budget exhausted")
        p0, _ = flow.eig(s0)
        p1, _ = flow.eig(s1)
        motion = _matched_motion(flow, s0, s1)
        eps, margin = _barrier(p0, p1)
        if (motion > MAX_PHASE_STEP or margin < MIN_BARRIER_MARGIN) and depth < max_depth:
            mid = (s0 + s1) / 2
            stack.append((s0, mid, depth + 1))
            stack.append((mid, s1, depth + 1))
            continue
        if motion > MAX_PHASE_STEP or margin < MIN_BARRIER_MARGIN:
            raise GridTooCoarse(
                f"grid too coarse on [{s0}, {s1}]: motion {motion:.3f}, margin {margin:.2e}"
            )
        index += _count_k(p1, eps) - _count_k(p0, eps)
        done_cells.append((s0, s1))
    crossings = _locate_crossings(flow, done_cells, tol_phase) if locate_crossings else []
    return MaslovResult(index, crossings, flow.n_samples)


def _locate_crossings(
    flow: _UnitaryFlow, cells: list[tuple[float, float]], tol_phase: float
) -> list[PathCrossing]:
    """Refine cells where some eigenphase approaches zero."""
    cells = sorted(cells)
    candidates = []
    for s0, s1 in cells:
        if min(flow.min_abs_phase(s0), flow.min_abs_phase(s1)) < 0.4:
            if candidates and abs(candidates[-1][1] - s0) < 1e-15:
                candidates[-1] = (candidates[-1][0], s1)
            else:
                candidates.append((s0, s1))
    crossings = []
    for lo, hi in candidates:
        res = minimize_scalar(
            flow.min_abs_phase, bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-10},
        )
        g_end = min(flow.min_abs_phase(lo), flow.min_abs_phase(hi))
        s_star, g_star = float(res.x), float(res.fun)
        if g_end < g_star:  # crossing pinned at a cell end (path endpoint)
            s_star = lo if flow.min_abs_phase(lo) < flow.min_abs_phase(hi) else hi
            g_star = g_end
        if g_star <= max(tol_phase, 1e-6):
            phases, _ = flow.eig(s_star)
            dim = int(np.sum(np.abs(_fold(phases)) <= max(10 * g_star, tol_phase)))
            crossings.append(PathCrossing(s_star, dim, g_star))
    return crossings


@dataclass
class CrossingReport:
    s_star: float
    dim: int
    form: np.ndarray
    eigenvalues: np.ndarray
    n_plus: int
    n_minus: int
    signature: int
    regular: bool
    fd_consistent: bool


def crossing_form(
    path: LagrangianPath,
    s_star: float,
    reference: LagrangianFrame,
    h: float | None = None,
    basis: np.ndarray | None = None,
    tol_phase: float = 1e-6,
    regularity_tol: float = 1e-6,
) -> CrossingReport:
    """Crossing form of a C^1 path at a conjugate point, by central differences.

    The form is  m(u, v) = d/ds omega(u, R_s v)  on a basis of the
    intersection of the plane at ``s_star`` with the reference; ``R_s u`` is
    the component orthogonal to the plane at ``s_star`` of the unique lift of
    ``u`` into the plane at ``s``.  Pass ``basis`` (columns, 2m x d) to
    evaluate the form on specific intersection vectors, e.g. traces of
    normalized eigenfunctions.
    """
    f_star = path.frame(s_star)
    if basis is None:
        basis = intersection_basis(f_star, reference, tol_phase)
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim == 1:
        basis = basis[:, None]
    d = basis.shape[1]
    if d == 0:
        raise ValueError(f"no crossing at s = {s_star}")
    a, b = path.interval
    if h is None:
        h = 1e-5 * max(abs(b - a), 1e-3)
    q_star = f_star.orthonormalized()

    def lifted(s: float) -> np.ndarray:
        qs = path.frame(s).orthonormalized()
        coef = np.linalg.solve(q_star.conj().T @ qs, q_star.conj().T @ basis)
        return qs @ coef

    def form_at(step: float) -> np.ndarray:
        wp = lifted(s_star + step)
        wm = lifted(s_star - step)
        m = (omega_gram(basis, wp) - omega_gram(basis, wm)) / (2 * step)
        return (m + m.conj().T) / 2

    form = form_at(h)
    form_half = form_at(h / 2)
    # Richardson check: halving the step must barely move the entries.
    denom = max(1.0, float(np.linalg.norm(form)))
    fd_consistent = float(np.linalg.norm(form - form_half)) / denom < 1e-4
    form = (4 * form_half - form) / 3
    eigs = np.linalg.eigvalsh(form)
    n_plus = int(np.sum(eigs > regularity_tol))
    n_minus = int(np.sum(eigs < -regularity_tol))
    regular = bool(np.all(np.abs(eigs) > regularity_tol))
    return CrossingReport(
        s_star, d, form, eigs, n_plus, n_minus, n_plus - n_minus, regular, fd_consistent
    )


# ---------------------------------------------------------------------------
# Two-path index via the doubled space


def doubled_space(space: SymplecticSpace) -> SymplecticSpace:
    return SymplecticSpace(2 * space.half_dim)


def doubled_frame(f1: LagrangianFrame, f2: LagrangianFrame) -> LagrangianFrame:
    """Frame of F1 + F2 in the doubled space with form omega + (-omega).

    Coordinates are shuffled so the doubled complex structure is again the
    canonical block J: top block diag(X1, Y2), bottom block diag(Y1, X2).
    """
    if f1.space != f2.space:
        raise ValueError("frames live in different symplectic spaces")
    m = f1.space.half_dim
    top = np.zeros((2 * m, 2 * m), dtype=complex)
    bot = np.zeros((2 * m, 2 * m), dtype=complex)
    top[:m, :m] = f1.x_block
    top[m:, m:] = f2.y_block
    bot[:m, :m] = f1.y_block
    bot[m:, m:] = f2.x_block
    return LagrangianFrame(doubled_space(f1.space), np.vstack([top, bot]))


def diagonal_frame(space: SymplecticSpace) -> LagrangianFrame:
    """The diagonal plane {(p, p)} in the doubled coordinates."""
    m = space.half_dim
    top = np.eye(2 * m, dtype=complex)
    bot = np.zeros((2 * m, 2 * m), dtype=complex)
    bot[:m, m:] = np.eye(m)
    bot[m:, :m] = np.eye(m)
    return LagrangianFrame(doubled_space(space), np.vstack([top, bot]))


def maslov_two_paths(path1: LagrangianPath, path2: LagrangianPath, **kwargs) -> MaslovResult:
    """Maslov index of two paths: the doubled path against the diagonal."""
    if path1.space != path2.space:
        raise ValueError("paths live in different symplectic spaces")
    if path1.interval != path2.interval:
        raise ValueError("paths must share the parameter interval")
    space = path1.space

    def sample(s: float) -> LagrangianFrame:
        return doubled_frame(path1.frame(s), path2.frame(s))

    doubled = LagrangianPath(doubled_space(space), sample, path1.interval,
                             path1.c1 and path2.c1)
    return maslov_index(doubled, diagonal_frame(space), **kwargs)


def pair_intersection_dim(f1: LagrangianFrame, f2: LagrangianFrame,
                          tol_phase: float = 1e-7) -> int:
    """dim(F1 cap F2) computed through the doubled-space diagonal test."""
    return intersection_dim(doubled_frame(f1, f2), diagonal_frame(f1.space), tol_phase)
