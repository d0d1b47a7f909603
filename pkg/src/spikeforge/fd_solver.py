"""Axisymmetric finite-difference solver for the full eps-system.

With radial coefficients the least-energy spike selects an axis through its
concentration point, so the n-dimensional Neumann problem

    -eps^2 Lap u + c(x) u = b(x) |v|^{q-1} v,
    -eps^2 Lap v + c(x) v = a(x) |u|^{p-1} u

reduces to a meridian half-plane (r, theta), theta in [0, pi], with

    Lap = d_rr + (n-1)/r d_r + (1/r^2) (d_tt + (n-2) cot(theta) d_t),

Neumann ghosts at the radial boundaries and zero angular flux at the poles,
where the cot singularity is absorbed into the symmetric limit
(n-1) d_tt.  Damped Newton with positivity projection solves each eps;
continuation warm-starts smaller eps from the previous solution pulled back
in spike-centered coordinates (the spike width scales with eps, so plain
reuse of the previous iterate loses the Newton basin).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import splu

from .core import (BadResolution, CoefficientField, CollapsedToTrivial,
                   DomainSpec, Exponents, NewtonDivergence)
from .ground_state import RadialProfile, sphere_area
from .concentration import ConcentrationExponents

__all__ = [
    "FDOptions", "MeridianGrid", "DiscreteSolution", "build_grid",
    "initial_guess_bump", "solve_system", "continuation_sweep",
    "discrete_energy", "residual_direct", "jacobian_consistency_error",
    "lowest_nonzero_neumann_eigenvalue", "mass_fraction_near_argmax",
    "save_solution", "sweep_records", "save_sweep",
]

BALL_CORE_FRACTION = 1e-3   # excised core radius for ball domains


@dataclass(frozen=True)
class FDOptions:
    newton_tol: float = 1e-9
    max_newton: int = 50
    max_backtracks: int = 30
    positivity_floor: float = 1e-14
    trivial_energy_floor: float = 0.5    # reject c_eps <= floor * eps^n
    collapse_variation_tol: float = 1e-3


@dataclass
class MeridianGrid:
    """Tensor grid on the meridian half-plane with its discrete -Laplacian."""

    domain: DomainSpec
    n: int
    Nr: int                    # radial cell count
    Nt: int                    # angular cell count
    r: np.ndarray              # Nr + 1 nodes
    theta: np.ndarray          # Nt + 1 nodes
    lap: sp.csr_matrix = field(repr=False)   # -Laplacian on flattened nodes

    @property
    def hr(self) -> float:
        return float(self.r[1] - self.r[0])

    @property
    def ht(self) -> float:
        return float(self.theta[1] - self.theta[0])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.r), len(self.theta)

    @property
    def num_nodes(self) -> int:
        return len(self.r) * len(self.theta)

    def dist_to_boundary(self, radius: float) -> float:
        if self.domain.shape == "annulus":
            aa, bb = self.domain.radii
            return min(radius - aa, bb - radius)
        return self.domain.radii[0] - radius


def _assemble_neg_laplacian(n: int, r: np.ndarray, theta: np.ndarray) -> sp.csr_matrix:
    nr, nt = len(r), len(theta)
    hr = r[1] - r[0]
    ht = theta[1] - theta[0]
    I, J = np.meshgrid(np.arange(nr), np.arange(nt), indexing="ij")
    I, J = I.ravel(), J.ravel()
    k = I * nt + J
    R = r[I]
    rows, cols, vals = [], [], []

    def put(mask, col_k, v):
        rows.append(k[mask])
        cols.append(col_k[mask])
        vals.append(v[mask] if isinstance(v, np.ndarray) else np.full(mask.sum(), v))

    # radial part
    interior = (I > 0) & (I < nr - 1)
    cr = np.zeros_like(R)
    cr[interior] = (n - 1) / R[interior]
    put(interior, k - nt, -(1.0 / hr**2) + cr / (2 * hr))
    put(interior, k, np.full_like(R, 2.0 / hr**2))
    put(interior, k + nt, -(1.0 / hr**2) - cr / (2 * hr))
    lo = I == 0
    put(lo, k, np.full_like(R, 2.0 / hr**2))
    put(lo, k + nt, np.full_like(R, -2.0 / hr**2))
    hi = I == nr - 1
    put(hi, k, np.full_like(R, 2.0 / hr**2))
    put(hi, k - nt, np.full_like(R, -2.0 / hr**2))

    # angular part
    interior = (J > 0) & (J < nt - 1)
    ct = np.zeros_like(R)
    ct[interior] = (n - 2) / np.tan(theta[J[interior]])
    r2 = R**2
    put(interior, k - 1, (-(1.0 / ht**2) + ct / (2 * ht)) / r2)
    put(interior, k, np.full_like(R, 2.0 / ht**2) / r2)
    put(interior, k + 1, (-(1.0 / ht**2) - ct / (2 * ht)) / r2)
    pole_lo = J == 0
    put(pole_lo, k, (n - 1) * 2.0 / ht**2 / r2)
    put(pole_lo, k + 1, -(n - 1) * 2.0 / ht**2 / r2)
    pole_hi = J == nt - 1
    put(pole_hi, k, (n - 1) * 2.0 / ht**2 / r2)
    put(pole_hi, k - 1, -(n - 1) * 2.0 / ht**2 / r2)

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    return sp.csr_matrix((vals, (rows, cols)), shape=(nr * nt, nr * nt))


def build_grid(domain: DomainSpec, n: int, Nr: int, Nt: int) -> MeridianGrid:
    """Validated meridian grid; Nr, Nt are cell counts (>= 16 each).

    A ball excises a small core (radius 1e-3 R) with a zero-flux condition
    to avoid the coordinate singularity; spike solutions vanish there.
    The assembled stencil must annihilate constant fields to roundoff.
    """
    if Nr < 16 or Nt < 16:
        raise BadResolution(f"need Nr, Nt >= 16, got ({Nr}, {Nt})")
    if domain.shape == "annulus":
        r_lo, r_hi = domain.radii
    else:
        r_hi = domain.radii[0]
        r_lo = BALL_CORE_FRACTION * r_hi
    r = np.linspace(r_lo, r_hi, Nr + 1)
    theta = np.linspace(0.0, math.pi, Nt + 1)
    lap = _assemble_neg_laplacian(n, r, theta)
    const_residual = np.max(np.abs(lap @ np.ones(lap.shape[0])))
    scale = np.max(np.abs(lap.data))
    if const_residual > 1e-12 * scale:
        raise BadResolution(
            f"constant-field test failed: |L 1| = {const_residual:.3e} vs scale {scale:.3e}")
    return MeridianGrid(domain, n, Nr, Nt, r, theta, lap)


# --------------------------------------------------------------------------
# fields on the grid, residual, Jacobian
# --------------------------------------------------------------------------

def _fields_on_grid(grid: MeridianGrid, a, b, c):
    nt = len(grid.theta)
    av = np.repeat([a.value_radial(rr) for rr in grid.r], nt)
    bv = np.repeat([b.value_radial(rr) for rr in grid.r], nt)
    cv = np.repeat([c.value_radial(rr) for rr in grid.r], nt)
    return av, bv, cv


def _residual_flat(grid, av, bv, cv, exp, eps, u, v):
    e2 = eps * eps
    ru = e2 * (grid.lap @ u) + cv * u - bv * np.abs(v) ** (exp.q - 1) * v
    rv = e2 * (grid.lap @ v) + cv * v - av * np.abs(u) ** (exp.p - 1) * u
    return ru, rv


def residual_direct(grid: MeridianGrid, a, b, c, exp: Exponents, eps: float,
                    u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Independently coded residual (slicing with ghost mirrors, no assembled
    matrix); cross-checks the sparse assembly at converged solutions."""
    n = grid.n
    r = grid.r[:, None]
    th = grid.theta[None, :]
    hr, ht = grid.hr, grid.ht

    def neg_lap(w):
        wp = np.pad(w, ((1, 1), (1, 1)), mode="reflect")
        d_rr = (wp[2:, 1:-1] - 2 * w + wp[:-2, 1:-1]) / hr**2
        d_r = (wp[2:, 1:-1] - wp[:-2, 1:-1]) / (2 * hr)
        d_tt = (wp[1:-1, 2:] - 2 * w + wp[1:-1, :-2]) / ht**2
        d_t = (wp[1:-1, 2:] - wp[1:-1, :-2]) / (2 * ht)
        ang = d_tt.copy()
        ang[:, 1:-1] += (n - 2) / np.tan(th[:, 1:-1]) * d_t[:, 1:-1]
        ang[:, 0] = (n - 1) * d_tt[:, 0]
        ang[:, -1] = (n - 1) * d_tt[:, -1]
        rad = d_rr + (n - 1) / r * d_r
        rad[0, :] = (wp[2, 1:-1] - 2 * w[0] + wp[0, 1:-1]) / hr**2
        rad[-1, :] = (wp[-1, 1:-1] - 2 * w[-1] + wp[-3, 1:-1]) / hr**2
        return -(rad + ang / r**2)

    av = np.array([a.value_radial(rr) for rr in grid.r])[:, None]
    bv = np.array([b.value_radial(rr) for rr in grid.r])[:, None]
    cv = np.array([c.value_radial(rr) for rr in grid.r])[:, None]
    e2 = eps * eps
    ru = e2 * neg_lap(u) + cv * u - bv * np.abs(v) ** (exp.q - 1) * v
    rv = e2 * neg_lap(v) + cv * v - av * np.abs(u) ** (exp.p - 1) * u
    return ru, rv


@dataclass
class DiscreteSolution:
    """Converged positive solution of the eps-system on a meridian grid."""

    grid: MeridianGrid
    exponents: Exponents
    eps: float
    u: np.ndarray              # (Nr+1, Nt+1)
    v: np.ndarray
    residual_norm: float
    c_eps: float
    argmax_u: tuple[int, int]
    argmax_v: tuple[int, int]
    newton_iterations: int

    @property
    def argmax_radius(self) -> float:
        return float(self.grid.r[self.argmax_u[0]])

    @property
    def argmax_theta(self) -> float:
        return float(self.grid.theta[self.argmax_u[1]])

    @property
    def dist_to_boundary(self) -> float:
        return float(self.grid.dist_to_boundary(self.argmax_radius))

    def argmax_cell_separation(self) -> int:
        return int(max(abs(self.argmax_u[0] - self.argmax_v[0]),
                       abs(self.argmax_u[1] - self.argmax_v[1])))


def initial_guess_bump(prof: RadialProfile, a, b, c, x0_radius: float,
                       eps: float, grid: MeridianGrid,
                       theta0: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Plant the rescaled limit profile at the boundary point (x0_radius, theta0).

    u = A U(sqrt(c0) d / eps), v = B V(...), with d the ambient distance to
    the planting point and (A, B, sqrt(c0)) the frozen-coefficient scaling
    at x0.  Values beyond the profile truncation radius are zero.
    """
    a0 = a.value_radial(x0_radius)
    b0 = b.value_radial(x0_radius)
    c0 = c.value_radial(x0_radius)
    ce = ConcentrationExponents.from_exponents(prof.exponents)
    amp_u = (b0 / c0) ** (-ce.alpha1) * (a0 / c0) ** (-ce.beta1)
    amp_v = (b0 / c0) ** (-ce.alpha2) * (a0 / c0) ** (-ce.beta2)
    rr = grid.r[:, None]
    dth = grid.theta[None, :] - theta0
    dist_sq = rr**2 + x0_radius**2 - 2.0 * rr * x0_radius * np.cos(dth)
    arg = math.sqrt(c0) * np.sqrt(np.maximum(dist_sq, 0.0)) / eps
    U_i, V_i = prof.interp(arg)
    return amp_u * U_i, amp_v * V_i


def solve_system(grid: MeridianGrid, a, b, c, exp: Exponents, eps: float,
                 init: tuple[np.ndarray, np.ndarray],
                 opts: FDOptions = FDOptions()) -> DiscreteSolution:
    """Damped Newton on the coupled system from the given initial pair.

    Backtracking halves the step until the max-norm residual decreases
    (at most ``max_backtracks`` times); entries pushed below zero are
    clamped to ``positivity_floor`` inside the line search.  Raises
    NewtonDivergence when the residual cannot reach ~1e-8 and
    CollapsedToTrivial when the converged state is zero / near-constant
    or its energy is below the configured floor.
    """
    nr, nt = grid.shape
    N = nr * nt
    av, bv, cv = _fields_on_grid(grid, a, b, c)
    u = np.asarray(init[0], dtype=float).ravel().copy()
    v = np.asarray(init[1], dtype=float).ravel().copy()
    e2 = eps * eps
    ru, rv = _residual_flat(grid, av, bv, cv, exp, eps, u, v)
    rn = max(np.max(np.abs(ru)), np.max(np.abs(rv)))
    iterations = 0
    for it in range(opts.max_newton):
        if rn <= opts.newton_tol:
            break
        iterations = it + 1
        diag_block = e2 * grid.lap + sp.diags(cv)
        J = sp.bmat([[diag_block, sp.diags(-exp.q * bv * np.abs(v) ** (exp.q - 1))],
                     [sp.diags(-exp.p * av * np.abs(u) ** (exp.p - 1)), diag_block]],
                    format="csc")
        step = splu(J).solve(-np.concatenate([ru, rv]))
        du, dv = step[:N], step[N:]
        t, accepted = 1.0, False
        for _ in range(opts.max_backtracks):
            ut = np.maximum(u + t * du, opts.positivity_floor)
            vt = np.maximum(v + t * dv, opts.positivity_floor)
            rut, rvt = _residual_flat(grid, av, bv, cv, exp, eps, ut, vt)
            rt = max(np.max(np.abs(rut)), np.max(np.abs(rvt)))
            if rt < rn:
                u, v, ru, rv, rn, accepted = ut, vt, rut, rvt, rt, True
                break
            t *= 0.5
        if not accepted:
            break
    if rn > 1e-8 and not (rn == 0.0):
        raise NewtonDivergence(f"meridian Newton stalled at residual {rn:.3e} (eps={eps})")
    u2 = u.reshape(nr, nt)
    v2 = v.reshape(nr, nt)
    c_eps = discrete_energy_fields(grid, a, b, c, exp, eps, u2, v2)
    max_u = float(np.max(u2))
    if max_u <= 1e-8 or (max_u - np.min(u2)) <= opts.collapse_variation_tol * max_u \
            or c_eps <= opts.trivial_energy_floor * eps ** exp.n:
        raise CollapsedToTrivial(
            f"converged to trivial/near-constant state at eps={eps}: "
            f"max u = {max_u:.3e}, c_eps/eps^n = {c_eps / eps**exp.n:.3e}")
    am_u = np.unravel_index(int(np.argmax(u2)), u2.shape)
    am_v = np.unravel_index(int(np.argmax(v2)), v2.shape)
    return DiscreteSolution(grid, exp, eps, u2, v2, float(rn), c_eps,
                            (int(am_u[0]), int(am_u[1])), (int(am_v[0]), int(am_v[1])),
                            iterations)


def discrete_energy_fields(grid: MeridianGrid, a, b, c, exp: Exponents,
                           eps: float, u: np.ndarray, v: np.ndarray) -> float:
    """Meridian quadrature of the energy functional.

    int_Omega [eps^2 grad u . grad v + c u v - a F(u) - b G(v)] with the
    measure r^{n-1} sin^{n-2}(theta) dr dtheta times |S^{n-2}|; derivatives
    by centered differences, composite trapezoid in both directions.
    """
    p, q, n = exp.p, exp.q, exp.n
    r = grid.r[:, None]
    th = grid.theta[None, :]
    ur = np.gradient(u, grid.hr, axis=0, edge_order=2)
    vr = np.gradient(v, grid.hr, axis=0, edge_order=2)
    ut = np.gradient(u, grid.ht, axis=1, edge_order=2)
    vt = np.gradient(v, grid.ht, axis=1, edge_order=2)
    av = np.array([a.value_radial(rr) for rr in grid.r])[:, None]
    bv = np.array([b.value_radial(rr) for rr in grid.r])[:, None]
    cv = np.array([c.value_radial(rr) for rr in grid.r])[:, None]
    grad = ur * vr + ut * vt / r**2
    integrand = (eps**2 * grad + cv * u * v
                 - av * np.abs(u) ** (p + 1) / (p + 1)
                 - bv * np.abs(v) ** (q + 1) / (q + 1))
    weighted = integrand * r ** (n - 1) * np.sin(th) ** (n - 2)
    inner = np.trapezoid(weighted, grid.theta, axis=1)
    return sphere_area(n - 1) * float(np.trapezoid(inner, grid.r))


def discrete_energy(sol: DiscreteSolution, a, b, c) -> float:
    return discrete_energy_fields(sol.grid, a, b, c, sol.exponents, sol.eps,
                                  sol.u, sol.v)


# --------------------------------------------------------------------------
# continuation
# --------------------------------------------------------------------------

def _pullback_warm_start(w: np.ndarray, grid: MeridianGrid,
                         center: tuple[float, float], ratio: float) -> np.ndarray:
    """Sample the previous solution at center + ratio * (P - center) in the
    meridian plane; narrows the spike by eps_prev/eps_new."""
    rc, tc = center
    xc, yc = rc * math.cos(tc), rc * math.sin(tc)
    Rg, Tg = np.meshgrid(grid.r, grid.theta, indexing="ij")
    Xp = xc + ratio * (Rg * np.cos(Tg) - xc)
    Yp = yc + ratio * (Rg * np.sin(Tg) - yc)
    Rp = np.clip(np.hypot(Xp, Yp), grid.r[0], grid.r[-1])
    Tp = np.clip(np.arctan2(Yp, Xp), grid.theta[0], grid.theta[-1])
    itp = RegularGridInterpolator((grid.r, grid.theta), w, method="linear")
    return itp(np.stack([Rp, Tp], axis=-1))


def continuation_sweep(grid: MeridianGrid, a, b, c, exp: Exponents,
                       eps_sequence, prof: RadialProfile, x0_radius: float,
                       opts: FDOptions = FDOptions()) -> list[DiscreteSolution]:
    """Solve along a decreasing eps sequence, warm-starting each entry.

    The largest eps starts from the planted bump at x0; every later entry
    pulls the previous solution back in spike-centered coordinates.  If the
    warm-started Newton fails, the bump is re-planted at the previous argmax
    before giving up.  Consecutive ratios must stay in [0.5, 1).
    """
    eps_list = [float(e) for e in eps_sequence]
    if len(eps_list) < 1:
        raise ValueError("empty eps sequence")
    for e_prev, e_next in zip(eps_list, eps_list[1:]):
        if not e_next < e_prev:
            raise ValueError(f"eps sequence must be strictly decreasing, got {eps_list}")
        if e_next / e_prev < 0.5:
            raise ValueError(
                f"eps ratio {e_next / e_prev:.3f} below 0.5 between {e_prev} and {e_next}")
    sols: list[DiscreteSolution] = []
    u0, v0 = initial_guess_bump(prof, a, b, c, x0_radius, eps_list[0], grid)
    prev_eps = None
    for eps in eps_list:
        if prev_eps is not None:
            last = sols[-1]
            center = (last.argmax_radius, last.argmax_theta)
            u0 = _pullback_warm_start(sols[-1].u, grid, center, prev_eps / eps)
            v0 = _pullback_warm_start(sols[-1].v, grid, center, prev_eps / eps)
        try:
            sol = solve_system(grid, a, b, c, exp, eps, (u0, v0), opts)
        except NewtonDivergence:
            if prev_eps is None:
                raise
            last = sols[-1]
            u0, v0 = initial_guess_bump(prof, a, b, c, last.argmax_radius, eps,
                                        grid, theta0=last.argmax_theta)
            try:
                sol = solve_system(grid, a, b, c, exp, eps, (u0, v0), opts)
            except (NewtonDivergence, CollapsedToTrivial) as err:
                raise NewtonDivergence(f"sweep failed at eps={eps}: {err}") from err
        except CollapsedToTrivial as err:
            raise CollapsedToTrivial(f"sweep failed at eps={eps}: {err}") from err
        sols.append(sol)
        prev_eps = eps
    return sols


# --------------------------------------------------------------------------
# diagnostics
# --------------------------------------------------------------------------

def jacobian_consistency_error(grid: MeridianGrid, a, b, c, exp: Exponents,
                               eps: float, u: np.ndarray, v: np.ndarray,
                               seed: int = 0) -> float:
    """Relative error between the assembled Jacobian action and a centered
    finite difference of the residual along a random direction."""
    av, bv, cv = _fields_on_grid(grid, a, b, c)
    u = u.ravel()
    v = v.ravel()
    rng = np.random.default_rng(seed)
    wu = rng.standard_normal(u.size)
    wv = rng.standard_normal(v.size)
    e2 = eps * eps
    diag_block = e2 * grid.lap + sp.diags(cv)
    ju = diag_block @ wu + (-exp.q * bv * np.abs(v) ** (exp.q - 1)) * wv
    jv = (-exp.p * av * np.abs(u) ** (exp.p - 1)) * wu + diag_block @ wv
    hstep = 1e-6 * max(1.0, float(np.max(np.abs(u))))
    rup, rvp = _residual_flat(grid, av, bv, cv, exp, eps, u + hstep * wu, v + hstep * wv)
    rum, rvm = _residual_flat(grid, av, bv, cv, exp, eps, u - hstep * wu, v - hstep * wv)
    fd_u = (rup - rum) / (2 * hstep)
    fd_v = (rvp - rvm) / (2 * hstep)
    num = max(np.max(np.abs(fd_u - ju)), np.max(np.abs(fd_v - jv)))
    den = max(np.max(np.abs(ju)), np.max(np.abs(jv)))
    return float(num / den)


def lowest_nonzero_neumann_eigenvalue(grid: MeridianGrid, k: int = 6) -> float:
    """Smallest nonzero eigenvalue of the discrete -Laplacian (shift-invert
    around -1, where the operator has no spectrum)."""
    from scipy.sparse.linalg import eigs
    vals = eigs(grid.lap.astype(float), k=k, sigma=-1.0,
                return_eigenvectors=False)
    vals = np.sort(np.real(vals))
    nonzero = vals[np.abs(vals) > 1e-6]
    return float(nonzero[0])


def mass_fraction_near_argmax(sol: DiscreteSolution, radius: float) -> float:
    """Fraction of the discrete L2 mass of u within ambient distance
    ``radius`` of the argmax (meridian-plane chordal distance)."""
    g = sol.grid
    r = g.r[:, None]
    th = g.theta[None, :]
    r_star = sol.argmax_radius
    t_star = sol.argmax_theta
    dist = np.sqrt(np.maximum(
        r**2 + r_star**2 - 2.0 * r * r_star * np.cos(th - t_star), 0.0))
    weight = r ** (g.n - 1) * np.sin(th) ** (g.n - 2)
    dens = sol.u**2 * weight
    total = np.trapezoid(np.trapezoid(dens, g.theta, axis=1), g.r)
    near = np.trapezoid(np.trapezoid(np.where(dist <= radius, dens, 0.0),
                                     g.theta, axis=1), g.r)
    return float(near / total)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def save_solution(sol: DiscreteSolution, csv_path, json_path) -> None:
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "theta", "u", "v"])
        for i, rr in enumerate(sol.grid.r):
            for j, tt in enumerate(sol.grid.theta):
                writer.writerow([repr(float(rr)), repr(float(tt)),
                                 repr(float(sol.u[i, j])), repr(float(sol.v[i, j]))])
    with open(json_path, "w") as fh:
        json.dump(solution_header(sol), fh, indent=2, sort_keys=True)
        fh.write("\n")


def solution_header(sol: DiscreteSolution) -> dict:
    return {
        "eps": sol.eps,
        "residual_norm": sol.residual_norm,
        "c_eps": sol.c_eps,
        "argmax_u": list(sol.argmax_u),
        "argmax_v": list(sol.argmax_v),
        "argmax_radius": sol.argmax_radius,
        "argmax_theta": sol.argmax_theta,
        "dist_to_boundary": sol.dist_to_boundary,
        "grid": {"Nr": sol.grid.Nr, "Nt": sol.grid.Nt,
                 "shape": sol.grid.domain.shape,
                 "radii": list(sol.grid.domain.radii), "n": sol.grid.n},
        "p": sol.exponents.p, "q": sol.exponents.q,
        "newton_iterations": sol.newton_iterations,
        "min_u": float(np.min(sol.u)), "min_v": float(np.min(sol.v)),
    }


def sweep_records(sols: list[DiscreteSolution]) -> list[dict]:
    return [solution_header(s) for s in sols]


def save_sweep(sols: list[DiscreteSolution], jsonl_path) -> None:
    with open(jsonl_path, "w") as fh:
        for rec in sweep_records(sols):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
