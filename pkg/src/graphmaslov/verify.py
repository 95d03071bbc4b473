"""Verification pipelines: the Morse-Maslov box, the Hadamard-type eigenvalue
derivative formula, and the delta-star interlacing inequalities.

All three pipelines pit independently computed quantities against each other:
integer Maslov indices against Morse-index differences, the boundary-matrix
derivative formula against finite differences and against the crossing form,
and eigenvalue orderings against the counting dichotomy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .edge_solver import k_lambda_frame, k_path_sampler
from .graph import MetricGraph, boundary_index
from .maslov import (
    CrossingReport,
    LagrangianPath,
    crossing_form,
    maslov_two_paths,
)
from .spectral import (
    FloorCertificate,
    eigenfunction_trace,
    eigenvalues_in,
    secular_gap,
    spectral_floor,
    _nearest_eigenvalue,
)
from .symplectic import SymplecticSpace
from .vertex import BoundaryFamily, check_family, l_frame

DEFAULT_TOL_EIG = 1e-8


@dataclass
class BoxCrossing:
    side: int            # 1 or 3: which horizontal side of the box
    lam: float
    report: CrossingReport
    normalized_diagonal: list[float]


@dataclass
class BoxReport:
    interval: tuple[float, float]
    lam_top: float
    floor: FloorCertificate
    mas_sides: tuple[int, int, int, int]
    morse_alpha: int
    morse_beta: int
    spectral_flow: int
    mas_index_theorem: int   # the Sigma_2 value, Mas(path of L_t, K at lam_top)
    crossings: list[BoxCrossing]
    eq_312: bool
    sigma4_zero: bool
    box_sum_zero: bool
    flow_equals_mas: bool
    crossing_forms_ok: bool

    @property
    def ok(self) -> bool:
        return (self.eq_312 and self.sigma4_zero and self.box_sum_zero
                and self.flow_equals_mas and self.crossing_forms_ok)


def _k_path(g: MetricGraph, lo: float, hi: float) -> LagrangianPath:
    space = SymplecticSpace(g.boundary_dim)
    return LagrangianPath(space, k_path_sampler(g), (lo, hi))


def _horizontal_crossings(g, pair, frame_ref, lo, hi, side, grid_step, tol_eig):
    """Crossing forms of the solution-plane path at each eigenvalue in (lo, hi).

    The form is evaluated on traces of L2-normalized eigenfunctions, so every
    diagonal entry should come out near -1.
    """
    out = []
    spec = eigenvalues_in(g, pair, (lo, hi), grid_step, tol_eig)
    kpath = _k_path(g, lo, hi)
    for hit in spec.eigenvalues:
        cols = []
        if hit.multiplicity == 1:
            data = eigenfunction_trace(g, pair, hit.lam)
            cols.append(data.trace.vector)
        else:
            # Degenerate level: fall back to the principal intersection basis
            # (not eigenfunction-normalized); flagged by an empty diagonal.
            rep = crossing_form(kpath, hit.lam, frame_ref)
            out.append(BoxCrossing(side, hit.lam, rep, []))
            continue
        basis = np.column_stack(cols)
        rep = crossing_form(kpath, hit.lam, frame_ref, basis=basis)
        out.append(BoxCrossing(side, hit.lam, rep, [float(x.real) for x in np.diag(rep.form)]))
    return out


def maslov_box(
    g: MetricGraph,
    family: BoundaryFamily,
    interval: tuple[float, float],
    t_check_samples: int = 7,
    grid_step: float = 0.05,
    tol_eig: float = DEFAULT_TOL_EIG,
    compute_crossing_forms: bool = True,
) -> BoxReport:
    """Run the four-sided (lambda, t) loop and check all its integer identities.

    Sides: 1 fixes t = alpha and runs lambda from the floor to the top level;
    2 fixes the top level and runs t from alpha to beta; 3 and 4 close the
    loop.  Each side is a two-path Maslov index (the moving component paired
    with the frozen one), so signs come out of one single convention.
    """
    alpha, beta = float(interval[0]), float(interval[1])
    ts = np.linspace(alpha, beta, t_check_samples)
    check_family(family, ts)
    pair_a = family.pair(alpha)
    pair_b = family.pair(beta)
    floor = spectral_floor(g, [family.pair(t) for t in ts])
    lam_inf = floor.lam_inf

    # Corner regularity: shift the top level off zero when a corner operator
    # has a zero eigenvalue.
    lam_top = 0.0
    gap_a = secular_gap(g, pair_a, 0.0)
    gap_b = secular_gap(g, pair_b, 0.0)
    if min(gap_a, gap_b) <= tol_eig:
        nearest = np.inf
        for p in (pair_a, pair_b):
            spec = eigenvalues_in(g, p, (lam_inf, 1.0 + abs(lam_inf) * 0.05),
                                  grid_step, tol_eig)
            lams = spec.lams
            nonzero = lams[np.abs(lams) > 1e-6]
            if len(nonzero):
                nearest = min(nearest, float(np.min(np.abs(nonzero))))
        if not np.isfinite(nearest):
            raise ValueError("corner eigenvalue at zero and no neighbor to shift past")
        lam_top = -nearest / 2
        for p in (pair_a, pair_b):
            if secular_gap(g, p, lam_top) <= tol_eig:
                raise ValueError("corner regularization failed: shifted level hits spectrum")

    space = SymplecticSpace(g.boundary_dim)
    l_path = LagrangianPath(space, family.l_sampler(), (alpha, beta))
    k_up = _k_path(g, lam_inf, lam_top)
    k_frame_top = k_lambda_frame(g, lam_top)
    k_frame_inf = k_lambda_frame(g, lam_inf)

    sigma1 = maslov_two_paths(k_up, LagrangianPath.constant(l_frame(pair_a), k_up.interval))
    sigma2 = maslov_two_paths(LagrangianPath.constant(k_frame_top, l_path.interval), l_path)
    sigma3 = maslov_two_paths(k_up.reversed(),
                              LagrangianPath.constant(l_frame(pair_b), k_up.interval))
    sigma4 = maslov_two_paths(LagrangianPath.constant(k_frame_inf, l_path.interval),
                              l_path.reversed())
    if sigma4.index != 0 and sigma4.crossings:
        raise ValueError("floor certificate failure: crossing found at lambda_inf")

    spec_a = eigenvalues_in(g, pair_a, (lam_inf, lam_top), grid_step, tol_eig)
    spec_b = eigenvalues_in(g, pair_b, (lam_inf, lam_top), grid_step, tol_eig)
    mor_a, mor_b = spec_a.count(), spec_b.count()

    crossings: list[BoxCrossing] = []
    forms_ok = True
    if compute_crossing_forms:
        for pair, side in ((pair_a, 1), (pair_b, 3)):
            found = _horizontal_crossings(
                g, pair, l_frame(pair), lam_inf, lam_top, side, grid_step, tol_eig
            )
            crossings.extend(found)
        for c in crossings:
            if c.report.n_plus != 0 or not c.report.regular:
                forms_ok = False
            for d in c.normalized_diagonal:
                if abs(d + 1.0) > 1e-4:
                    forms_ok = False

    sides = (sigma1.index, sigma2.index, sigma3.index, sigma4.index)
    flow = mor_a - mor_b
    return BoxReport(
        interval=(alpha, beta),
        lam_top=lam_top,
        floor=floor,
        mas_sides=sides,
        morse_alpha=mor_a,
        morse_beta=mor_b,
        spectral_flow=flow,
        mas_index_theorem=sigma2.index,
        crossings=crossings,
        eq_312=(sides[0] == -mor_a and sides[2] == mor_b),
        sigma4_zero=(sides[3] == 0),
        box_sum_zero=(sum(sides) == 0),
        flow_equals_mas=(flow == sigma2.index),
        crossing_forms_ok=forms_ok,
    )


@dataclass
class HadamardReport:
    t0: float
    lam: float
    finite_difference: float
    formula: float
    crossing_form_value: float
    max_rel_diff: float
    ok: bool


def _branch_eigenvalue(g, pair, lam0, halfwidth, grid_step, tol_eig):
    lam = _nearest_eigenvalue(g, pair, lam0, halfwidth, grid_step, tol_eig)
    if lam is None:
        raise ValueError(f"lost the eigenvalue branch near {lam0}")
    return lam


def hadamard_check(
    g: MetricGraph,
    family: BoundaryFamily,
    t0: float,
    branch_lam: float | None = None,
    branch_index: int = 1,
    h_t: float = 1e-3,
    grid_step: float = 0.05,
    tol_eig: float = DEFAULT_TOL_EIG,
    rel_tol: float = 1e-5,
) -> HadamardReport:
    """Three independent values of d(lambda)/dt at a simple eigenvalue branch.

    (m1) Richardson-extrapolated central differences of the tracked branch;
    (m2) the boundary-matrix formula on the normalized eigenfunction trace;
    (m3) the crossing form of the vertex-condition path against the frozen
    solution plane, with the two-path orientation sign.
    """
    pair0 = family.pair(t0)
    if branch_lam is None:
        floor = spectral_floor(g, [pair0]).lam_inf
        upper = _upper_for(g, pair0, floor, branch_index, grid_step, tol_eig)
        spec = eigenvalues_in(g, pair0, (floor, upper), grid_step, tol_eig)
        hits = spec.eigenvalues
        if len(hits) < branch_index:
            raise ValueError(f"fewer than {branch_index} eigenvalues found")
        hit = hits[branch_index - 1]
    else:
        lam = _branch_eigenvalue(g, pair0, branch_lam, 1.0, grid_step, tol_eig)
        spec = eigenvalues_in(g, pair0, (lam - 0.5, lam + 0.5), grid_step, tol_eig)
        hit = min(spec.eigenvalues, key=lambda h: abs(h.lam - lam))
    if hit.multiplicity != 1:
        raise ValueError(f"eigenvalue {hit.lam} is not simple (multiplicity {hit.multiplicity})")
    lam0 = hit.lam

    # m1: finite differences along the branch, two steps + extrapolation.
    def branch(t):
        return _branch_eigenvalue(g, family.pair(t), lam0, 0.75, grid_step, tol_eig)

    d_h = (branch(t0 + h_t) - branch(t0 - h_t)) / (2 * h_t)
    d_h2 = (branch(t0 + h_t / 2) - branch(t0 - h_t / 2)) / h_t
    m1 = (4 * d_h2 - d_h) / 3

    # m2: the boundary formula on phi = (AA* - BB*)^{-1} (B gamma_D u + A gamma_N u).
    data = eigenfunction_trace(g, pair0, lam0)
    a, b = pair0.a, pair0.b
    da, db = family.pair_derivative(t0)
    gram = a @ a.conj().T - b @ b.conj().T
    phi = np.linalg.solve(gram, b @ data.trace.dirichlet + a @ data.trace.neumann)
    m2 = float(np.real(np.vdot(phi, (a @ db.conj().T - b @ da.conj().T) @ phi)))

    # m3: crossing form of t -> L_t against the frozen solution plane; the
    # two-path convention contributes the overall minus sign.
    space = SymplecticSpace(g.boundary_dim)
    l_path = LagrangianPath(space, family.l_sampler(), (t0 - 1.0, t0 + 1.0))
    rep = crossing_form(l_path, t0, k_lambda_frame(g, lam0),
                        basis=data.trace.vector[:, None])
    m3 = -float(np.real(rep.form[0, 0]))

    vals = np.array([m1, m2, m3])
    scale = 1.0 + abs(m2)
    max_rel = float(np.max(np.abs(vals[:, None] - vals[None, :])) / scale)
    return HadamardReport(t0, lam0, m1, m2, m3, max_rel, max_rel <= rel_tol)


def _upper_for(g, pair, floor, count, grid_step, tol_eig, start: float = 5.0):
    """An upper window edge containing at least ``count`` eigenvalues."""
    upper = start
    for _ in range(12):
        try:
            spec = eigenvalues_in(g, pair, (floor, upper), grid_step, tol_eig)
        except ValueError:
            upper += 0.617 * grid_step
            continue
        if spec.count() >= count:
            return upper
        upper = upper * 1.7 + 2.0
    raise RuntimeError(f"could not find {count} eigenvalues above the floor")


def eigenvalues_up_to(g, pair, count, floor=None, grid_step: float = 0.05,
                      tol_eig: float = DEFAULT_TOL_EIG):
    """First ``count`` eigenvalues (with multiplicity) above the floor."""
    if floor is None:
        floor = spectral_floor(g, [pair]).lam_inf
    upper = _upper_for(g, pair, floor, count, grid_step, tol_eig)
    spec = eigenvalues_in(g, pair, (floor, upper), grid_step, tol_eig)
    lams = []
    for h in spec.eigenvalues:
        lams.extend([h.lam] * h.multiplicity)
    return lams[:count]


@dataclass
class ProbeResult:
    t: float
    lower: float | None      # lambda_{n-1}(t), None for n = 1
    upper: float             # lambda_{n+1}(t)
    margin_lower: float | None
    margin_upper: float
    uniqueness_gap: float
    count_below: int
    dichotomy_ok: bool


@dataclass
class InterlacingReport:
    n: int
    nu: float
    lam_n: float
    u_center: float
    slope: float
    hypothesis_ok: bool
    message: str
    probes: list[ProbeResult] = field(default_factory=list)
    # The derivative of the n-th branch against both candidate powers of the
    # center value; ``slope_matches`` records which one agrees with finite
    # differences ("abs", "square", or "neither").
    abs_center: float = 0.0
    abs_center_sq: float = 0.0
    slope_matches: str = ""

    @property
    def ok(self) -> bool:
        if not self.hypothesis_ok:
            return False
        for p in self.probes:
            if p.margin_lower is not None and p.margin_lower <= 0:
                return False
            if p.margin_upper <= 0 or not p.dichotomy_ok:
                return False
            if p.uniqueness_gap <= 1e-6:
                return False
        return self.slope > 0


def interlacing_check(
    g: MetricGraph,
    family: BoundaryFamily,
    nu: float,
    n: int,
    probe_ts,
    center_tol: float = 1e-6,
    grid_step: float = 0.05,
    tol_eig: float = DEFAULT_TOL_EIG,
) -> InterlacingReport:
    """Eigenvalue interlacing across a delta family, probed on a t grid.

    Verifies lambda_{n-1}(mu) < lambda_n(nu) < lambda_{n+1}(theta) for all
    probes, strict local monotonicity of the n-th branch at nu, uniqueness of
    the crossing on its lambda-level, and the counting dichotomy (the number
    of eigenvalues below the level is n-1 or n at every probe).
    """
    pair_nu = family.pair(nu)
    floor = spectral_floor(
        g, [family.pair(t) for t in sorted(set(list(probe_ts) + [nu]))]
    )
    lams_nu = eigenvalues_up_to(g, pair_nu, n + 1, floor.lam_inf, grid_step, tol_eig)
    lam_n = lams_nu[n - 1]

    # Hypothesis: simple eigenpair with nonvanishing center value.
    spec_local = eigenvalues_in(g, pair_nu, (lam_n - 0.25, lam_n + 0.25),
                                grid_step / 2, tol_eig)
    hit = min(spec_local.eigenvalues, key=lambda h: abs(h.lam - lam_n))
    if hit.multiplicity != 1:
        return InterlacingReport(n, nu, lam_n, 0.0, 0.0, False,
                                 f"hypothesis not met: multiplicity {hit.multiplicity}")
    data = eigenfunction_trace(g, pair_nu, lam_n)
    u_center = float(np.real(data.value_at(boundary_index(g, 0, "a"))))
    if abs(u_center) <= center_tol:
        return InterlacingReport(n, nu, lam_n, u_center, 0.0, False,
                                 "hypothesis not met: eigenfunction vanishes at the center")

    h = 1e-4 * (1.0 + abs(nu))
    lam_p = _branch_eigenvalue(g, family.pair(nu + h), lam_n, 0.5, grid_step, tol_eig)
    lam_m = _branch_eigenvalue(g, family.pair(nu - h), lam_n, 0.5, grid_step, tol_eig)
    slope = (lam_p - lam_m) / (2 * h)
    abs_c, abs_c_sq = abs(u_center), u_center * u_center
    rel = lambda x: abs(slope - x) / (1.0 + abs(slope))
    if rel(abs_c_sq) < 1e-3 and rel(abs_c_sq) < rel(abs_c):
        matches = "square"
    elif rel(abs_c) < 1e-3:
        matches = "abs"
    else:
        matches = "neither"

    probes = []
    for t in probe_ts:
        if abs(t - nu) < 1e-12:
            continue
        pair_t = family.pair(t)
        lams_t = eigenvalues_up_to(g, pair_t, n + 1, floor.lam_inf, grid_step, tol_eig)
        lower = lams_t[n - 2] if n >= 2 else None
        upper = lams_t[n]
        count_below = sum(1 for x in lams_t if x < lam_n)
        # Branches above index n+1 cannot dip below lam_n when interlacing
        # holds, so counting within the first n+1 suffices.
        probes.append(ProbeResult(
            t=float(t),
            lower=lower,
            upper=upper,
            margin_lower=None if lower is None else lam_n - lower,
            margin_upper=upper - lam_n,
            uniqueness_gap=secular_gap(g, pair_t, lam_n),
            count_below=count_below,
            dichotomy_ok=count_below in (n - 1, n),
        ))
    return InterlacingReport(n, nu, lam_n, u_center, slope, True, "", probes,
                             abs_c, abs_c_sq, matches)
