"""Half-space boundary-layer (Milne) problems in the stretched wall variable.

The layer unknown Phi(eta, fv) solves

    v_eta dPhi/deta + nu_w Phi - K_w[Phi] = source,   eta in (0, eta_max),

with prescribed incoming data at eta = 0 on v_eta > 0 and relaxation to a
hydrodynamic state at infinity.  The discretization is discrete ordinates:
half-range Gauss nodes in v_eta (the grazing set v_eta = 0 is a genuine
kink) times full Gauss-Hermite nodes tangentially, a geometric eta grid,
and exponentially-fitted upwind sweeps with linear-in-eta sources.  The
collision term is lagged (source iteration) with restarted Aitken
extrapolation.

Truncation closure: at eta_max the re-entering distribution is the
hydrodynamic projection of Phi(eta_max) with the normal-momentum coordinate
removed; this is simultaneously the missing scalar condition of the
truncated half-space problem and the zero mass-flux constraint (the
asymptote carries no normal momentum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .collision import (CollisionModel, HardSphere, LinearizedBGK,
                        collision_frequency, _hs_kernel)
from .velocity import (ConfigurationError, DomainError, MaxwellianParams,
                       wall_maxwellian_params)


# ---------------------------------------------------------------------------
# Layer velocity grid (half-range x tangential Hermite)
# ---------------------------------------------------------------------------

def _half_range_gauss(n: int, n_fine: int = 600, x_max: float = 9.0):
    """Gauss rule for int_0^infty f(s) e^{-s^2/2} ds (unit temperature).

    Recurrence coefficients by the Stieltjes procedure on a fine Legendre
    grid (the weight decays fast; the discretization error is ~1e-15 for
    n <= 40), then Golub-Welsch.
    """
    xg, wg = np.polynomial.legendre.leggauss(n_fine)
    x = 0.5 * x_max * (xg + 1.0)
    w = 0.5 * x_max * wg * np.exp(-x * x / 2.0)
    a = np.zeros(n)
    b = np.zeros(n)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    norm = np.sum(w)
    for k in range(n):
        a[k] = np.sum(w * x * p * p) / norm
        if k == n - 1:
            break
        p_next = (x - a[k]) * p - (b[k - 1] if k > 0 else 0.0) * p_prev
        norm_next = np.sum(w * p_next * p_next)
        b[k] = norm_next / norm
        p_prev, p, norm = p, p_next, norm_next
    J = np.diag(a) + np.diag(np.sqrt(b[: n - 1]), 1) + np.diag(np.sqrt(b[: n - 1]), -1)
    nodes, vecs = np.linalg.eigh(J)
    mu0 = math.sqrt(math.pi / 2.0)
    weights = mu0 * vecs[0, :] ** 2
    return nodes, weights


@dataclass(frozen=True)
class LayerGrid:
    """Velocity nodes (v_eta, v_phi, v_psi) and plain-dv quadrature weights."""

    T_w: float
    nodes: np.ndarray            # (Nv, 3) frame components
    weights: np.ndarray          # (Nv,) for int f(v) dv of mu_w-enveloped f
    n_half: int
    n_tan: int

    @property
    def v_eta(self) -> np.ndarray:
        return self.nodes[:, 0]


def build_layer_grid(T_w: float, n_half: int = 16, n_tan: int = 8) -> LayerGrid:
    """Half-range x2 Gauss in v_eta times tensor Hermite tangentially.

    Weights are for plain dv integration: the generating rules carry the
    Gaussian e^{-|v|^2/2T_w}, which is divided back out here, so
    sum(weights * F(nodes)) is exact for F = polynomial * e^{-|v|^2/2T_w}
    (per-axis degree within the rules' exactness).  Layer functions carry a
    mu_w^{1/2} envelope, so their pairwise moments are of exactly that form.
    """
    if n_half < 8:
        raise ConfigurationError("need at least 8 half-range nodes")
    s = math.sqrt(T_w)
    hn, hw = _half_range_gauss(n_half)
    v_eta = np.concatenate([s * hn, -s * hn])
    w_eta = np.concatenate([s * hw, s * hw]) * np.exp(v_eta ** 2 / (2.0 * T_w))
    tn, tw = np.polynomial.hermite_e.hermegauss(n_tan)
    tn = s * tn
    tw = s * tw * np.exp(tn ** 2 / (2.0 * T_w))
    VE, V1, V2 = np.meshgrid(v_eta, tn, tn, indexing="ij")
    W = (w_eta[:, None, None] * tw[None, :, None] * tw[None, None, :])
    nodes = np.stack([VE.ravel(), V1.ravel(), V2.ravel()], axis=-1)
    return LayerGrid(T_w=float(T_w), nodes=nodes, weights=W.ravel(),
                     n_half=n_half, n_tan=n_tan)


def sqrt_mu_values(grid: LayerGrid, rho: float | None = None) -> np.ndarray:
    """mu_w^{1/2} on the grid; density defaults to the P=1 wall value 1/T_w."""
    rho = (1.0 / grid.T_w) if rho is None else rho
    q = np.sum(grid.nodes ** 2, axis=-1)
    return math.sqrt(rho) * (2.0 * math.pi * grid.T_w) ** -0.75 \
        * np.exp(-q / (4.0 * grid.T_w))


def _gaussian_weight(grid: LayerGrid) -> np.ndarray:
    return np.exp(-np.sum(grid.nodes ** 2, axis=-1) / (2.0 * grid.T_w))


# ---------------------------------------------------------------------------
# Wall collision operator on the layer grid
# ---------------------------------------------------------------------------

class WallOperator:
    """nu_w and K_w acting on layer-grid samples at wall temperature T_w."""

    def __init__(self, model: CollisionModel, grid: LayerGrid, P: float = 1.0):
        self.model = model
        self.grid = grid
        self.P = P
        self.params = MaxwellianParams(rho=P / grid.T_w, T=grid.T_w)
        self.nu = collision_frequency(model, self.params, grid.nodes)
        w = grid.weights
        sq = sqrt_mu_values(grid, self.params.rho)
        # discrete invariants mu^{1/2} psi with quadrature-exact orthogonality
        T = grid.T_w
        polys = [np.ones(grid.nodes.shape[0]), grid.nodes[:, 0],
                 grid.nodes[:, 1], grid.nodes[:, 2],
                 np.sum(grid.nodes ** 2, axis=-1) - 3.0 * T]
        E = np.stack([p * sq for p in polys], axis=1)   # (Nv, 5)
        G = E.T @ (w[:, None] * E)
        self.inv_funcs = E
        self.inv_gram_inv = np.linalg.inv(G)
        self._kmat: np.ndarray | None = None
        if isinstance(model, HardSphere):
            # kernel matrix with plain-dv weights; the integrable diagonal
            # singularity is dropped (loose-tolerance regime)
            K = _hs_kernel(self.params, model.q0, grid.nodes, grid.nodes)
            np.fill_diagonal(K, 0.0)
            self._kmat = K * w[None, :]

    def project_hydro(self, phi: np.ndarray, drop_normal_momentum: bool = False) \
            -> np.ndarray:
        """Discrete projection onto the invariants; phi indexed (..., Nv)."""
        w = self.grid.weights
        raw = phi @ (w[:, None] * self.inv_funcs)          # (..., 5)
        coords = raw @ self.inv_gram_inv
        if drop_normal_momentum:
            coords = coords.copy()
            coords[..., 1] = 0.0
        return coords @ self.inv_funcs.T

    def hydro_coords(self, phi: np.ndarray) -> np.ndarray:
        """Coordinates (rho^B-like, uB_eta, uB_phi, uB_psi, TB-like) of P[phi].

        Returned in the normalization of Phi_infty: rho^B/rho_w, uB/T_w,
        TB/(2 T_w^2) multiply the basis {1, v, |v|^2 - 3T} mu_w^{1/2}; the
        physically scaled (rho^B, uB, TB) follow from the wall parameters.
        """
        w = self.grid.weights
        raw = phi @ (w[:, None] * self.inv_funcs)
        return raw @ self.inv_gram_inv

    def apply_K(self, phi: np.ndarray) -> np.ndarray:
        if isinstance(self.model, LinearizedBGK):
            return self.model.nu0 * self.project_hydro(phi)
        return phi @ self._kmat.T

    def mass_flux(self, phi: np.ndarray) -> np.ndarray:
        """int v_eta mu_w^{1/2} phi dv, phi indexed (..., Nv)."""
        w = self.grid.weights
        sq = sqrt_mu_values(self.grid, self.params.rho)
        return phi @ (w * self.grid.v_eta * sq)


# ---------------------------------------------------------------------------
# Problems and solutions
# ---------------------------------------------------------------------------

@dataclass
class MilneProblem:
    T_w: float
    incoming: np.ndarray                   # values on v_eta > 0 nodes (full Nv ok)
    model: CollisionModel
    source: np.ndarray | None = None       # (Neta, Nv) volumetric source
    zero_mass_flux: bool = True
    P: float = 1.0


@dataclass
class MilneNumerics:
    n_half: int = 16
    n_tan: int = 8
    eta_max: float = 30.0
    n_eta: int = 120
    first_cell: float = 0.01
    tol: float = 1e-11
    max_iter: int = 10_000
    accel_depth: int = 6        # Anderson depth; 1 recovers plain Aitken
    method: str = "gmres"       # "gmres" (Krylov sweeps) or "source" (Anderson)
    fit_window: tuple[float, float] = (5.0, 20.0)


@dataclass
class MilneSolution:
    eta: np.ndarray
    values: np.ndarray                     # (Neta, Nv)
    grid: LayerGrid
    op: WallOperator
    asym_coords: np.ndarray                # 5 projection coordinates at eta_max
    asym_values: np.ndarray                # Phi_infty on the grid
    decay_rate: float
    decay_norm: float                      # sup of e^{K0 eta} |Phi - Phi_inf|
    flux_profile: np.ndarray
    iterations: int
    residual_history: list = field(repr=False, default_factory=list)

    @property
    def hydro_asymptote(self) -> dict:
        """(rho^B, u^B, T^B) in the Phi_infty normalization of the wall state."""
        c = self.asym_coords
        T_w = self.grid.T_w
        rho_w = self.op.params.rho
        return {"rho_B": float(c[0] * rho_w),
                "u_B": (float(c[1] * T_w), float(c[2] * T_w), float(c[3] * T_w)),
                "T_B": float(c[4] * 2.0 * T_w * T_w)}

    def tilde_values(self) -> np.ndarray:
        return self.values - self.asym_values[None, :]

    def to_csv(self, path):
        import csv
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["eta", "mass", "mom_eta", "mom_phi", "mom_psi",
                         "energy", "flux", "tilde_sup"])
            tilde = self.tilde_values()
            for j, eta in enumerate(self.eta):
                coords = self.op.hydro_coords(self.values[j])
                wr.writerow([f"{x:.17g}" for x in
                             [eta, *coords, self.flux_profile[j],
                              np.max(np.abs(tilde[j]))]])


def geometric_eta_grid(eta_max: float, n_eta: int, first_cell: float) -> np.ndarray:
    """eta_0 = 0 < ... < eta_max with geometrically growing cells."""
    from scipy.optimize import brentq
    m = n_eta - 1

    def total(r):
        return first_cell * (r ** m - 1.0) / (r - 1.0) - eta_max

    r = brentq(total, 1.0 + 1e-9, 2.0)
    cells = first_cell * r ** np.arange(m)
    return np.concatenate([[0.0], np.cumsum(cells)])


def _sweep(eta: np.ndarray, v_eta: np.ndarray, nu: np.ndarray,
           source: np.ndarray, inflow: np.ndarray, outflow_bc: np.ndarray) \
        -> np.ndarray:
    """Exact exponential upwind sweep with linear-in-eta source.

    source is nu*Phi-lagged + volumetric, indexed (Neta, Nv); inflow fills
    v_eta > 0 at eta=0, outflow_bc fills v_eta < 0 at eta_max.
    """
    n_eta = eta.size
    pos = v_eta > 0
    neg = ~pos
    out = np.empty_like(source)
    out[0, pos] = inflow[pos]
    out[-1, neg] = outflow_bc[neg]

    d_eta = np.diff(eta)
    vp = v_eta[pos]
    nup = nu[pos] if nu.ndim else np.full(vp.shape, nu)
    vn = -v_eta[neg]
    nun = nu[neg] if nu.ndim else np.full(vn.shape, nu)
    for j in range(n_eta - 1):
        h = d_eta[j]
        a = nup * h / vp
        E = np.exp(-a)
        em = -np.expm1(-a)                   # 1 - e^{-a}
        w_far = em / a - E                   # weight of the upwind source node
        w_near = 1.0 - em / a                # weight of the downwind node
        out[j + 1, pos] = (E * out[j, pos]
                           + (source[j, pos] * w_far
                              + source[j + 1, pos] * w_near) / nup)
        jj = n_eta - 1 - j
        b = nun * h_rev(d_eta, jj) / vn
        E2 = np.exp(-b)
        em2 = -np.expm1(-b)
        w_far2 = em2 / b - E2
        w_near2 = 1.0 - em2 / b
        out[jj - 1, neg] = (E2 * out[jj, neg]
                            + (source[jj, neg] * w_far2
                               + source[jj - 1, neg] * w_near2) / nun)
    return out


def h_rev(d_eta: np.ndarray, jj: int) -> float:
    return d_eta[jj - 1]


def solve_milne(problem: MilneProblem, numerics: MilneNumerics | None = None,
                grid: LayerGrid | None = None, op: WallOperator | None = None) \
        -> MilneSolution:
    """Discrete-ordinates solution of the half-space problem."""
    num = numerics or MilneNumerics()
    if num.eta_max < 20.0:
        raise ConfigurationError("eta_max must cover >= 20 mean free paths")
    grid = grid or build_layer_grid(problem.T_w, num.n_half, num.n_tan)
    op = op or WallOperator(problem.model, grid, P=problem.P)
    eta = geometric_eta_grid(num.eta_max, num.n_eta, num.first_cell)
    nv = grid.nodes.shape[0]
    vol_source = problem.source if problem.source is not None \
        else np.zeros((eta.size, nv))
    inflow = np.asarray(problem.incoming, dtype=float)
    if inflow.shape != (nv,):
        raise ConfigurationError("incoming data must be sampled on the grid")

    def apply_map(state: np.ndarray) -> np.ndarray:
        scat = op.apply_K(state) + vol_source
        far = op.project_hydro(state[-1],
                               drop_normal_momentum=problem.zero_mass_flux)
        return _sweep(eta, grid.v_eta, op.nu, scat, inflow, far)

    shape = (eta.size, nv)
    history: list[float] = []
    if num.method == "gmres":
        # Krylov-accelerated sweeps: the lagged-collision fixed point is
        # linear, x = A x + b, and full GMRES on (I - A) converges in a few
        # dozen sweeps where single-mode extrapolation needs thousands.
        from scipy.sparse.linalg import LinearOperator, gmres
        b = apply_map(np.zeros(shape))
        counter = {"n": 0}
        zero_inflow = np.zeros(nv)

        def mv(y):
            counter["n"] += 1
            Y = y.reshape(shape)
            scat = op.apply_K(Y)
            far = op.project_hydro(Y[-1],
                                   drop_normal_momentum=problem.zero_mass_flux)
            AY = _sweep(eta, grid.v_eta, op.nu, scat, zero_inflow, far)
            return y - AY.ravel()

        Aop = LinearOperator((b.size, b.size), matvec=mv)
        bn = float(np.linalg.norm(b.ravel())) or 1.0
        x, info = gmres(Aop, b.ravel(), rtol=min(num.tol / bn, 1e-8), atol=0.0,
                        restart=min(num.max_iter, 400),
                        maxiter=4, callback=lambda r: history.append(float(r)),
                        callback_type="pr_norm")
        phi = x.reshape(shape)
        it = counter["n"]
        diff = float(np.max(np.abs(apply_map(phi) - phi)))
        history.append(diff)
        if info != 0 or diff > num.tol:
            raise RuntimeError(
                f"Milne Krylov solve did not reach tol={num.tol} in {it} "
                f"sweeps (final successive-iterate gap {diff:.3e})")
    else:
        # Anderson-accelerated source iteration (depth 1 ~ classical Aitken).
        phi = np.zeros(shape)
        x_hist: list[np.ndarray] = []
        f_hist: list[np.ndarray] = []
        it = 0
        converged = False
        while it < num.max_iter:
            it += 1
            gx = apply_map(phi)
            f = gx - phi
            diff = float(np.max(np.abs(f)))
            history.append(diff)
            if diff < num.tol:
                phi = gx
                converged = True
                break
            x_hist.append(phi)
            f_hist.append(f.ravel())
            if len(x_hist) > num.accel_depth + 1:
                x_hist.pop(0)
                f_hist.pop(0)
            if len(x_hist) >= 2:
                F = np.stack([fk - f_hist[-1] for fk in f_hist[:-1]], axis=1)
                try:
                    alpha, *_ = np.linalg.lstsq(F, -f_hist[-1], rcond=1e-12)
                except np.linalg.LinAlgError:
                    alpha = None
                if alpha is not None and np.all(np.isfinite(alpha)) \
                        and np.abs(alpha).sum() < 1e4:
                    cand = gx.copy()
                    for ak, xk, fk in zip(alpha, x_hist[:-1], f_hist[:-1]):
                        cand += ak * ((xk + fk.reshape(gx.shape)) - gx)
                    phi = cand
                    continue
            phi = gx
        if not converged:
            raise RuntimeError(
                f"Milne sweep did not converge in {num.max_iter} iterations; "
                f"residual history tail {[f'{d:.3e}' for d in history[-5:]]}")

    coords = op.hydro_coords(phi[-1])
    if problem.zero_mass_flux:
        coords[1] = 0.0
    asym = coords @ op.inv_funcs.T
    tilde = phi - asym[None, :]
    sup = np.max(np.abs(tilde), axis=1)
    lo, hi = num.fit_window
    sel = (eta >= lo) & (eta <= hi) & (sup > 1e-300)
    if np.count_nonzero(sel) >= 2:
        slope, icept = np.polyfit(eta[sel], np.log(sup[sel]), 1)
        k0 = -float(slope)
    else:
        k0 = float("nan")
    decay_norm = float(np.max(np.exp(np.clip(k0 * eta, None, 600.0)) * sup)) \
        if np.isfinite(k0) else float("nan")
    flux = op.mass_flux(phi)
    return MilneSolution(eta=eta, values=phi, grid=grid, op=op,
                         asym_coords=coords, asym_values=asym,
                         decay_rate=k0, decay_norm=decay_norm,
                         flux_profile=flux, iterations=it,
                         residual_history=history)


# ---------------------------------------------------------------------------
# Elementary problems and the slip coefficient
# ---------------------------------------------------------------------------

def _heat_flux_inflow(grid: LayerGrid, op: WallOperator, component: int,
                      model: CollisionModel, Lmat=None) -> np.ndarray:
    """-(A . unit_component) / (2 T_w^2) sampled on the layer grid.

    For BGK, A = Abar/nu0 in closed form.  For hard spheres, A is taken
    from the operator matrix in the Hermite basis and evaluated on the
    layer nodes.
    """
    T = grid.T_w
    if isinstance(model, LinearizedBGK):
        sq = sqrt_mu_values(grid, op.params.rho)
        comp = grid.nodes[:, component]
        a_val = comp * (np.sum(grid.nodes ** 2, axis=-1) - 5.0 * T) * sq / model.nu0
        return -a_val / (2.0 * T * T)
    if Lmat is None:
        raise ConfigurationError("hard-sphere elementary problems need the "
                                 "assembled operator matrix")
    from .collision import special_solutions
    S = special_solutions(Lmat)
    vals = S.A[component].eval(grid.nodes)
    return -vals / (2.0 * T * T)


def solve_elementary(kind: str, T_w: float, model: CollisionModel,
                     numerics: MilneNumerics | None = None, P: float = 1.0,
                     Lmat=None, grid: LayerGrid | None = None,
                     op: WallOperator | None = None) -> MilneSolution:
    """The elementary layer problems: tangential-1, tangential-2, normal.

    Incoming data is -(A . direction)/(2 T_w^2); the frame components are
    ordered (eta, phi, psi), so 'normal' drives component 0 and
    'tangential-i' drives component i.
    """
    comp = {"tangential-1": 1, "tangential-2": 2, "normal": 0}.get(kind)
    if comp is None:
        raise ConfigurationError(f"unknown elementary problem '{kind}'")
    num = numerics or MilneNumerics()
    grid = grid or build_layer_grid(T_w, num.n_half, num.n_tan)
    op = op or WallOperator(model, grid, P=P)
    inflow = _heat_flux_inflow(grid, op, comp, model, Lmat=Lmat)
    problem = MilneProblem(T_w=T_w, incoming=inflow, model=model,
                           zero_mass_flux=True, P=P)
    return solve_milne(problem, num, grid=grid, op=op)


def slip_coefficient_beta0(T_w: float, model: CollisionModel,
                           numerics: MilneNumerics | None = None,
                           P: float = 1.0, kind: str = "tangential-1",
                           Lmat=None) -> float:
    """Thermal-creep slip coefficient: u^B along the driving tangential axis.

    The layer driven by a unit tangential temperature gradient carries the
    asymptotic slip velocity beta0; by isotropy the two tangential problems
    give the same value (checked in the tests, not assumed here).
    """
    sol = solve_elementary(kind, T_w, model, numerics, P=P, Lmat=Lmat)
    comp = {"tangential-1": 1, "tangential-2": 2}[kind]
    return float(sol.hydro_asymptote["u_B"][comp])


# ---------------------------------------------------------------------------
# Cutoff layer
# ---------------------------------------------------------------------------

def bump_chi(y) -> np.ndarray:
    """Smooth cutoff: 1 on |y|<=1, 0 on |y|>=2, exp(-1/t) glue between."""
    y = np.abs(np.asarray(y, dtype=float))
    out = np.zeros_like(y)
    out[y <= 1.0] = 1.0
    mid = (y > 1.0) & (y < 2.0)
    t1 = 2.0 - y[mid]
    t2 = y[mid] - 1.0
    g1 = np.exp(-1.0 / t1)
    g2 = np.exp(-1.0 / t2)
    out[mid] = g1 / (g1 + g2)
    return out


def bump_chi_bar(y) -> np.ndarray:
    return 1.0 - bump_chi(y)


@dataclass
class CutoffLayer:
    """f^B_1 = chibar(v_eta/eps) chi(eps eta) (Phi - Phi_infty) on the grid."""

    eta: np.ndarray
    values: np.ndarray          # (Neta, Nv)
    eps: float
    grid: LayerGrid
    op: WallOperator
    solution: MilneSolution
    wall_location: tuple[float, float] = (0.0, 0.0)

    def commutator_sources(self) -> dict:
        """The cutoff defect terms of the layer equation.

        term_eta = v_eta chibar(v_eta/eps) d/deta[chi(eps eta)] Phi_tilde;
        term_K   = chi(eps eta) (chibar K_w[Phi_tilde] - K_w[chibar Phi_tilde]).
        """
        tilde = self.solution.tilde_values()
        cb = bump_chi_bar(self.grid.v_eta / self.eps)
        deta = 1e-6
        dchi = (bump_chi(self.eps * (self.eta + deta))
                - bump_chi(self.eps * (self.eta - deta))) / (2.0 * deta)
        term_eta = (self.grid.v_eta[None, :] * cb[None, :]
                    * dchi[:, None] * tilde)
        K_t = self.op.apply_K(tilde)
        K_cb = self.op.apply_K(cb[None, :] * tilde)
        term_K = bump_chi(self.eps * self.eta)[:, None] * (cb[None, :] * K_t - K_cb)
        return {"eta_cutoff": term_eta, "velocity_cutoff": term_K}


def cutoff_layer(sol: MilneSolution, eps: float,
                 wall_location: tuple[float, float] = (0.0, 0.0)) -> CutoffLayer:
    if not (0.0 < eps <= 0.1):
        raise ConfigurationError("cutoff layer requires 0 < eps <= 0.1")
    tilde = sol.tilde_values()
    cb = bump_chi_bar(sol.grid.v_eta / eps)
    chi_eta = bump_chi(eps * sol.eta)
    vals = cb[None, :] * chi_eta[:, None] * tilde
    return CutoffLayer(eta=sol.eta, values=vals, eps=eps, grid=sol.grid,
                       op=sol.op, solution=sol, wall_location=wall_location)


def mass_flux_defect(layer: CutoffLayer) -> float:
    """Y = -eps^{-1} P^{-1} int v_eta mu_w^{1/2} f^B_1(0) dv (wall sample)."""
    flux0 = float(layer.op.mass_flux(layer.values[0]))
    return -flux0 / (layer.eps * layer.op.P)
