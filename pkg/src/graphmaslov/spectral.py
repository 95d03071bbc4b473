"""Eigenvalues of H = -d^2/dx^2 + q with vertex conditions (A, B).

lambda is an eigenvalue exactly when the solution plane K_lambda meets the
vertex-condition plane L, so root finding happens on the smallest singular
value of the stacked orthonormalized frames (the "secular gap").  That
detector sees planes, not frames, works for complex (A, B), and reads off
multiplicities from the singular spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .edge_solver import assemble_eigenfunction, k_lambda_frame
from .graph import MetricGraph, TraceVector
from .symplectic import LagrangianFrame
from .vertex import BoundaryFamily, BoundaryPair, l_frame

DEFAULT_TOL_EIG = 1e-8
DEFAULT_GRID_STEP = 0.05


def secular_values(g: MetricGraph, p: BoundaryPair, lam: float,
                   frame_l: LagrangianFrame | None = None) -> np.ndarray:
    """All singular values of [Q_K | Q_L], ascending."""
    qk = k_lambda_frame(g, lam).orthonormalized()
    ql = (frame_l if frame_l is not None else l_frame(p)).orthonormalized()
    sv = np.linalg.svd(np.hstack([qk, ql]), compute_uv=False)
    return sv[::-1]


def secular_gap(g: MetricGraph, p: BoundaryPair, lam: float,
                frame_l: LagrangianFrame | None = None) -> float:
    """Smallest singular value of the combined frames; zero iff eigenvalue."""
    return float(secular_values(g, p, lam, frame_l)[0])


@dataclass
class EigenvalueHit:
    lam: float
    multiplicity: int
    residual: float


@dataclass
class Spectrum:
    eigenvalues: list[EigenvalueHit]
    window: tuple[float, float]
    grid_step: float

    @property
    def lams(self) -> np.ndarray:
        return np.array([h.lam for h in self.eigenvalues])

    def count(self) -> int:
        return sum(h.multiplicity for h in self.eigenvalues)


def _golden_min(f, lo, hi, xatol=1e-12):
    """Golden-section minimum of a V-shaped function; robust to the kink."""
    invphi = (np.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xatol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _scan_roots(g, p, frame_l, lo, hi, step, tol_eig):
    """One grid sweep: bracket local minima of the gap and refine them."""
    n = max(int(np.ceil((hi - lo) / step)) + 1, 5)
    grid = np.linspace(lo, hi, n)
    gaps = np.array([secular_gap(g, p, x, frame_l) for x in grid])
    hits = []
    last = len(grid) - 1
    for i in range(len(grid)):
        if 0 < i < last:
            if not (gaps[i] <= gaps[i - 1] and gaps[i] <= gaps[i + 1]):
                continue
            left, right = grid[i - 1], grid[i + 1]
        elif i == 0:
            # A root can hide inside the first cell even when the endpoint
            # itself is clear; same for the last cell below.
            if gaps[0] >= gaps[1]:
                continue
            left, right = grid[0], grid[1]
        else:
            if gaps[last] >= gaps[last - 1]:
                continue
            left, right = grid[last - 1], grid[last]
        x_min, g_min = _golden_min(
            lambda x: secular_gap(g, p, x, frame_l), left, right
        )
        if g_min <= tol_eig:
            sv = secular_values(g, p, x_min, frame_l)
            mult = int(np.sum(sv <= tol_eig))
            hits.append(EigenvalueHit(x_min, max(mult, 1), float(g_min)))
    # Merge near-duplicates produced by adjacent brackets.
    hits.sort(key=lambda h: h.lam)
    merged: list[EigenvalueHit] = []
    for h in hits:
        if merged and abs(h.lam - merged[-1].lam) < 1e-8:
            keep = h if h.residual < merged[-1].residual else merged[-1]
            merged[-1] = keep
        else:
            merged.append(h)
    return merged


def eigenvalues_in(
    g: MetricGraph,
    p: BoundaryPair,
    window: tuple[float, float],
    grid_step: float = DEFAULT_GRID_STEP,
    tol_eig: float = DEFAULT_TOL_EIG,
    max_halvings: int = 6,
) -> Spectrum:
    """All eigenvalues in a window, with multiplicities and residuals.

    Scans the secular gap on a grid, golden-refines bracketed minima, and
    re-scans at half step until the eigenvalue count repeats.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy lambda_min < lambda_max")
    frame_l = l_frame(p)
    for x in (lo, hi):
        if secular_gap(g, p, x, frame_l) <= tol_eig:
            raise ValueError(f"window endpoints are eigenvalues (gap at {x} below tol)")
    step = float(grid_step)
    prev = None
    for _ in range(max_halvings + 1):
        hits = _scan_roots(g, p, frame_l, lo, hi, step, tol_eig)
        count = sum(h.multiplicity for h in hits)
        if prev is not None and count == prev:
            return Spectrum(hits, (lo, hi), step)
        prev = count
        step /= 2
    return Spectrum(hits, (lo, hi), step)


@dataclass
class FloorCertificate:
    lam_inf: float
    min_gap: float
    scanned: tuple[float, float]
    t_samples: list[float] = field(default_factory=list)


def spectral_floor(
    g: MetricGraph,
    pairs: list[BoundaryPair],
    grid_step: float = 0.25,
    max_doublings: int = 12,
    tol_eig: float = DEFAULT_TOL_EIG,
) -> FloorCertificate:
    """A level below every eigenvalue of every supplied pair, with certificate.

    Starts at -(1 + max |q|) and doubles downward until the strip
    [2*lam_inf, lam_inf] carries no eigenvalue for any pair; the certificate
    records the minimum secular gap seen over that strip.
    """
    lam = -(1.0 + g.max_abs_potential())
    for _ in range(max_doublings):
        strip = (2 * lam, lam)
        found = False
        min_gap = np.inf
        for p in pairs:
            frame_l = l_frame(p)
            try:
                spec = eigenvalues_in(g, p, strip, grid_step, tol_eig, max_halvings=2)
            except ValueError:
                found = True  # endpoint eigenvalue: descend further
                break
            if spec.eigenvalues:
                found = True
                break
            grid = np.linspace(strip[0], strip[1], max(int((strip[1] - strip[0]) / grid_step) + 1, 5))
            min_gap = min(min_gap, min(secular_gap(g, p, x, frame_l) for x in grid))
        if not found:
            return FloorCertificate(lam, float(min_gap), strip)
        lam *= 2
    raise RuntimeError("spectral floor search failed to stabilize")


def morse_index(
    g: MetricGraph,
    p: BoundaryPair,
    floor: float | None = None,
    upper: float = 0.0,
    grid_step: float = DEFAULT_GRID_STEP,
    tol_eig: float = DEFAULT_TOL_EIG,
) -> int:
    """Number of eigenvalues below ``upper`` (default 0)."""
    if secular_gap(g, p, upper) <= tol_eig:
        raise ValueError("zero is an eigenvalue; Morse index undefined at this parameter")
    if floor is None:
        floor = spectral_floor(g, [p]).lam_inf
    spec = eigenvalues_in(g, p, (floor, upper), grid_step, tol_eig)
    return spec.count()


@dataclass
class EigenfunctionData:
    lam: float
    trace: TraceVector        # trace of the L2-normalized eigenfunction
    coeffs: np.ndarray        # per-edge (alpha, beta) of the normalized function
    norm_raw: float
    residual: float

    def value_at(self, boundary_idx: int) -> complex:
        return self.trace.dirichlet[boundary_idx]


def eigenfunction_trace(
    g: MetricGraph, p: BoundaryPair, lam: float, samples_per_edge: int = 401
) -> EigenfunctionData:
    """Trace and solution coefficients of the (simple) eigenfunction at lam.

    The null direction of [Q_K | Q_L] gives the trace; the K-frame least
    squares recovers the per-edge Cauchy coefficients, and Simpson quadrature
    on the assembled function fixes the L2 normalization.
    """
    kf = k_lambda_frame(g, lam)
    qk = kf.orthonormalized()
    ql = l_frame(p).orthonormalized()
    u, sv, vh = np.linalg.svd(np.hstack([qk, ql]))
    null = vh[-1].conj()
    mk = qk.shape[1]
    trace_vec = qk @ null[:mk] - ql @ null[mk:]
    trace_vec /= np.linalg.norm(trace_vec)
    # The problem is real-symmetric: rotate the phase so the trace is real.
    pivot = trace_vec[np.argmax(np.abs(trace_vec))]
    trace_vec = (trace_vec * np.conj(pivot / abs(pivot))).real.astype(float)
    coeffs, *_ = np.linalg.lstsq(kf.matrix.real, trace_vec, rcond=None)
    ef = assemble_eigenfunction(g, lam, coeffs, samples_per_edge)
    if ef.norm == 0:
        raise ValueError("degenerate null vector: zero eigenfunction")
    return EigenfunctionData(
        lam,
        TraceVector.from_vector(trace_vec / ef.norm),
        coeffs / ef.norm,
        ef.norm,
        float(sv[-1]),
    )


def _nearest_eigenvalue(g, p, lam0: float, halfwidth: float, grid_step, tol_eig):
    """Eigenvalue of (g, p) closest to lam0 within a local window."""
    for bump in (0.0, 0.31 * grid_step, 0.57 * grid_step):
        window = (lam0 - halfwidth - bump, lam0 + halfwidth + bump)
        try:
            spec = eigenvalues_in(g, p, window, grid_step, tol_eig)
        except ValueError:
            continue
        if spec.eigenvalues:
            lams = spec.lams
            return float(lams[np.argmin(np.abs(lams - lam0))])
        return None
    raise ValueError("could not frame a clean local window around the branch")


@dataclass
class FlowResult:
    flow: int
    morse_alpha: int
    morse_beta: int
    tracking_flow: int
    floor: FloorCertificate
    crossings: list[float]


def spectral_flow(
    g: MetricGraph,
    family: BoundaryFamily,
    interval: tuple[float, float],
    t_samples: int = 21,
    track_window: float = 1.0,
    grid_step: float = DEFAULT_GRID_STEP,
    tol_eig: float = DEFAULT_TOL_EIG,
) -> FlowResult:
    """Net signed count of eigenvalues crossing zero as t runs over [alpha, beta].

    The primary value is the Morse-index difference; an independent
    branch-tracking count near zero must agree, otherwise the run errors.
    """
    alpha, beta = float(interval[0]), float(interval[1])
    ts = list(np.linspace(alpha, beta, t_samples))
    pairs = {t: family.pair(t) for t in ts}
    for t in (alpha, beta):
        if secular_gap(g, pairs[t], 0.0) <= tol_eig:
            raise ValueError(f"zero eigenvalue at endpoint t = {t}")
    floor = spectral_floor(g, [pairs[alpha], pairs[beta]])
    mor_a = morse_index(g, pairs[alpha], floor.lam_inf, grid_step=grid_step, tol_eig=tol_eig)
    mor_b = morse_index(g, pairs[beta], floor.lam_inf, grid_step=grid_step, tol_eig=tol_eig)
    flow = mor_a - mor_b

    # Cross-check: follow branches through a window around zero and count
    # signed crossings (up through zero as t grows counts +1).
    w = _pick_track_window(g, family, ts, track_window, tol_eig)
    tracking, crossings = _track_zero_crossings(g, family, ts, w, grid_step, tol_eig)
    if tracking != flow:
        raise RuntimeError(
            f"tracking/Morse mismatch: Morse difference {flow}, tracked {tracking} "
            f"(crossings at t = {crossings})"
        )
    return FlowResult(flow, mor_a, mor_b, tracking, floor, crossings)


def _pick_track_window(g, family, ts, w0, tol_eig):
    """A window half-width whose edges stay clear of branches at all samples."""
    for w in (w0, 1.37 * w0, 1.71 * w0, 2.23 * w0):
        clear = all(
            min(secular_gap(g, family.pair(t), w), secular_gap(g, family.pair(t), -w))
            > 1e-4
            for t in ts
        )
        if clear:
            return w
    raise RuntimeError("could not place a clean tracking window around zero")


def _branches_near_zero(g, p, w, grid_step, tol_eig):
    spec = eigenvalues_in(g, p, (-w, w), grid_step, tol_eig)
    return sorted(spec.lams)


def _segment_crossings(prev, cur, t0, t1, w):
    """Signed zero crossings between two sorted branch snapshots.

    Branches drifting in or out through the window edges are trimmed before
    pairing; returns None when the snapshots still cannot be paired,
    prompting refinement.
    """
    prev, cur = list(prev), list(cur)
    guard = 0
    while len(prev) != len(cur) and guard < 8:
        longer = prev if len(prev) > len(cur) else cur
        lo_slack = longer[0] + w
        hi_slack = w - longer[-1]
        if min(lo_slack, hi_slack) > 0.35 * w:
            return None
        longer.pop(0 if lo_slack <= hi_slack else -1)
        guard += 1
    if len(prev) != len(cur):
        return None
    signed = 0
    hits = []
    for x0, x1 in zip(prev, cur):
        if abs(x1 - x0) > 0.45 * max(abs(x0) + abs(x1), 1e-3) + 0.2:
            return None  # pairing too uncertain, refine
        if x0 < 0 <= x1:
            signed += 1
            hits.append((t0 + t1) / 2)
        elif x1 < 0 <= x0:
            signed -= 1
            hits.append((t0 + t1) / 2)
    return signed, hits


def _track_zero_crossings(g, family, ts, w, grid_step, tol_eig, depth: int = 0):
    total = 0
    crossings: list[float] = []
    prev = _branches_near_zero(g, family.pair(ts[0]), w, grid_step, tol_eig)
    for t0, t1 in zip(ts, ts[1:]):
        cur = _branches_near_zero(g, family.pair(t1), w, grid_step, tol_eig)
        seg = _segment_crossings(prev, cur, t0, t1, w)
        if seg is None:
            if depth >= 14 or (t1 - t0) <= 1e-10:
                raise RuntimeError(
                    f"branch tracking lost a pairing on [{t0}, {t1}]"
                )
            mid = (t0 + t1) / 2
            # A branch can sit exactly on the window edge at the midpoint;
            # shift the split point rather than the window.
            if min(secular_gap(g, family.pair(mid), w),
                   secular_gap(g, family.pair(mid), -w)) <= tol_eig:
                mid = t0 + 0.382 * (t1 - t0)
            sub, subcross = _track_zero_crossings(
                g, family, [t0, mid, t1], w, grid_step, tol_eig, depth + 1
            )
            total += sub
            crossings.extend(subcross)
        else:
            signed, hits = seg
            total += signed
            crossings.extend(hits)
        prev = cur
    return total, crossings
