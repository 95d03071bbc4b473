"""Symplectic linear algebra on C^{2m}.

The complex structure is the block matrix ``J = [[0, I_m], [-I_m, 0]]`` and
the form is ``omega(u, v) = <J u, v>`` with the inner product linear in the
first argument.  A Lagrangian plane is stored as a full-rank 2m x m frame
whose top block X holds the first m rows and bottom block Y the rest.

Planes are identified with unitary matrices through the Souriau map
``W = (X + iY)(X - iY)^{-1}`` computed on an orthonormalized frame; W depends
on the plane only, not the frame.  Intersection counting and the Maslov
machinery read off eigenphases of products of these unitaries.  The raw
entries of W are convention-dependent and carry no meaning on their own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9
DEFAULT_TOL_PHASE = 1e-7


@dataclass(frozen=True)
class SymplecticSpace:
    """The space C^{2m} with the standard block complex structure."""

    half_dim: int

    @property
    def dim(self) -> int:
        return 2 * self.half_dim

    def j_matrix(self) -> np.ndarray:
        m = self.half_dim
        j = np.zeros((2 * m, 2 * m))
        j[:m, m:] = np.eye(m)
        j[m:, :m] = -np.eye(m)
        return j


@dataclass
class LagrangianFrame:
    """A 2m x m frame whose columns span a Lagrangian plane."""

    space: SymplecticSpace
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        m = self.space.half_dim
        if self.matrix.shape != (2 * m, m):
            raise ValueError(
                f"frame must be {2 * m}x{m}, got {self.matrix.shape}"
            )

    @property
    def x_block(self) -> np.ndarray:
        return self.matrix[: self.space.half_dim]

    @property
    def y_block(self) -> np.ndarray:
        return self.matrix[self.space.half_dim :]

    def orthonormalized(self) -> np.ndarray:
        """Column-orthonormal basis of the plane (QR of the frame)."""
        q, _ = np.linalg.qr(self.matrix)
        return q

    def projector(self) -> np.ndarray:
        q = self.orthonormalized()
        return q @ q.conj().T


def frame(matrix: np.ndarray) -> LagrangianFrame:
    """Wrap a 2m x m matrix as a frame, inferring the space."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != 2 * matrix.shape[1]:
        raise ValueError(f"expected a 2m x m matrix, got {matrix.shape}")
    return LagrangianFrame(SymplecticSpace(matrix.shape[1]), matrix)


def omega(u: np.ndarray, v: np.ndarray) -> complex:
    """The symplectic form: sum of u2*conj(v1) - u1*conj(v2) over boundary points."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 1 or u.shape[0] % 2:
        raise ValueError("omega needs two equal-length even-dimension vectors")
    m = u.shape[0] // 2
    return complex(u[m:] @ v[:m].conj() - u[:m] @ v[m:].conj())


def omega_gram(u_cols: np.ndarray, w_cols: np.ndarray) -> np.ndarray:
    """Matrix of omega(u_j, w_k) for columns of two 2m x d arrays."""
    m = u_cols.shape[0] // 2
    u1, u2 = u_cols[:m], u_cols[m:]
    w1, w2 = w_cols[:m], w_cols[m:]
    return u2.T @ w1.conj() - u1.T @ w2.conj()


@dataclass
class IsotropyReport:
    ok: bool
    rank_sigma_min: float
    isotropy_residual: float

    def __bool__(self) -> bool:
        return self.ok


def is_lagrangian(f, tol: float = DEFAULT_TOL) -> IsotropyReport:
    """Check full rank and omega-isotropy of a frame; returns diagnostics.

    Accepts a LagrangianFrame or a bare 2m x m matrix.
    """
    mat = f.matrix if isinstance(f, LagrangianFrame) else np.asarray(f, dtype=complex)
    m = mat.shape[1]
    sv = np.linalg.svd(mat, compute_uv=False)
    sigma_min = float(sv[-1]) if len(sv) == m else 0.0
    x, y = mat[:m], mat[m:]
    residual = float(np.linalg.norm(y.conj().T @ x - x.conj().T @ y, 2))
    # The isotropy residual scales quadratically with the column norms.
    scale = max(1.0, float(sv[0]) ** 2)
    ok = sigma_min > tol and residual <= tol * scale
    return IsotropyReport(ok, sigma_min, residual)


def souriau_unitary(f: LagrangianFrame) -> np.ndarray:
    """Unitary representative W = (X + iY)(X - iY)^{-1} of the plane."""
    rep = is_lagrangian(f)
    if not rep:
        raise ValueError(
            f"frame is not Lagrangian (sigma_min={rep.rank_sigma_min:.2e}, "
            f"isotropy residual={rep.isotropy_residual:.2e})"
        )
    q = f.orthonormalized()
    m = f.space.half_dim
    x, y = q[:m], q[m:]
    # W = (X + iY) (X - iY)^{-1}, solved rather than inverted.
    return np.linalg.solve((x - 1j * y).T, (x + 1j * y).T).T


def _principal_svd(f1: LagrangianFrame, f2: LagrangianFrame):
    q1 = f1.orthonormalized()
    q2 = f2.orthonormalized()
    u, s, vh = np.linalg.svd(q1.conj().T @ q2)
    return q1, q2, u, s, vh


def intersection_dim(
    f1: LagrangianFrame, f2: LagrangianFrame, tol_phase: float = DEFAULT_TOL_PHASE
) -> int:
    """Dimension of the intersection of two Lagrangian planes.

    Counted as the number of eigenvalues of W1 W2^* with phase within
    ``tol_phase`` of zero.
    """
    if f1.space != f2.space:
        raise ValueError("frames live in different symplectic spaces")
    w1 = souriau_unitary(f1)
    w2 = souriau_unitary(f2)
    phases = np.angle(np.linalg.eigvals(w1 @ w2.conj().T))
    return int(np.sum(np.abs(phases) <= tol_phase))


def intersection_basis(
    f1: LagrangianFrame, f2: LagrangianFrame, tol_phase: float = DEFAULT_TOL_PHASE
) -> np.ndarray:
    """Orthonormal basis (2m x d columns) of the intersection of two planes.

    The dimension d comes from ``intersection_dim``; the directions are the
    top principal vectors between the two planes.
    """
    d = intersection_dim(f1, f2, tol_phase)
    q1, _, u, _, _ = _principal_svd(f1, f2)
    return q1 @ u[:, :d]


def plane_distance(f1: LagrangianFrame, f2: LagrangianFrame) -> float:
    """Operator-norm distance between the orthogonal projections."""
    if f1.space != f2.space:
        raise ValueError("frames live in different symplectic spaces")
    return float(np.linalg.norm(f1.projector() - f2.projector(), 2))


def frame_from_unitary(space: SymplecticSpace, w: np.ndarray) -> LagrangianFrame:
    """Frame of the plane whose Souriau representative is the unitary ``w``.

    Blocks X = (W + I)/2, Y = (W - I)/(2i) satisfy X*X + Y*Y = I and
    X*Y = Y*X, so the resulting frame is Lagrangian and already orthonormal.
    """
    m = space.half_dim
    w = np.asarray(w, dtype=complex)
    x = (w + np.eye(m)) / 2
    y = (w - np.eye(m)) / (2j)
    return LagrangianFrame(space, np.vstack([x, y]))


def random_lagrangian_frame(
    space: SymplecticSpace, rng: np.random.Generator, skew: bool = True
) -> LagrangianFrame:
    """Random Lagrangian frame; test and diagnostics utility, not core API.

    Draws a Haar-ish unitary from the QR of a complex Ginibre matrix, builds
    its Souriau preimage, and (optionally) right-multiplies by a random
    invertible matrix so the frame is not orthonormal.
    """
    m = space.half_dim
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(g)
    w = q * (np.diag(r) / np.abs(np.diag(r)))
    f = frame_from_unitary(space, w)
    if skew:
        gl = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        gl += 2 * np.eye(m)  # keep comfortably invertible
        f = LagrangianFrame(space, f.matrix @ gl)
    return f
