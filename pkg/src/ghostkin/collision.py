"""Linearized collision operator algebra.

Two collision models are provided.

* LinearizedBGK: L = nu0 (I - P).  Its quadratic correction is realized as
  the second derivative of the moments -> Maxwellian map, so it depends on
  its arguments only through their five hydrodynamic moments; the family of
  translated Maxwellians then satisfies the same structural identities as
  the full bilinear operator, which makes the identity suite analytically
  checkable.

* HardSphere: L = nu - K with the collision frequency in closed form and K
  assembled from the classical gain/loss kernels

      k1(v,v') = 2 pi q0 |v-v'| mu^{1/2}(v) mu^{1/2}(v'),
      k2(v,v') = 4 q0 rho (2 pi T)^{-1/2} / |v-v'|
                 * exp(-|v-v'|^2/(8T) - (|v|^2-|v'|^2)^2 / (8T |v-v'|^2)),

  followed by symmetrization and an exact projection of the kernel onto the
  five collision invariants (the raw quadrature is loose; the structural
  properties are enforced exactly).  The bilinear operator is applied by
  direct (u, omega) quadrature with a kink-aligned sphere rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from . import cache
from .velocity import (ConfigurationError, DomainError, HermiteBasis,
                       MaxwellianParams, Poly, VelocityFunction, build_grid,
                       from_poly, inner, invariant_functions, project_null)

_INVARIANT_NAMES = ("mass", "momentum_x", "momentum_y", "momentum_z", "energy")


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearizedBGK:
    nu0: float = 1.0

    def __post_init__(self):
        if not self.nu0 > 0:
            raise ConfigurationError("nu0 must be positive")

    kind = "bgk"

    def describe(self) -> dict:
        return {"kind": "bgk", "nu0": self.nu0}


@dataclass(frozen=True)
class HardSphere:
    q0: float = 1.0
    quad_order: int = 12       # per-axis order of the outer velocity grid
    n_omega_polar: int = 4     # Gauss-Legendre nodes in |cos| on [0, 1]
    n_omega_azimuth: int = 8
    n_radial_panels: int = 18  # composite GL panels for the kernel radius
    n_radial_gl: int = 10
    n_sphere_polar: int = 20   # smooth sphere rule for the kernel direction
    n_sphere_azimuth: int = 20

    def __post_init__(self):
        if not self.q0 > 0:
            raise ConfigurationError("q0 must be positive")

    kind = "hardsphere"

    def describe(self) -> dict:
        return {"kind": "hardsphere", "q0": self.q0,
                "quad_order": self.quad_order,
                "n_omega": [self.n_omega_polar, self.n_omega_azimuth],
                "radial": [self.n_radial_panels, self.n_radial_gl],
                "sphere": [self.n_sphere_polar, self.n_sphere_azimuth]}


CollisionModel = LinearizedBGK | HardSphere


def collision_frequency(model: CollisionModel, params: MaxwellianParams,
                        v: np.ndarray) -> np.ndarray:
    """nu(v).  Constant for BGK; closed form for hard spheres."""
    v = np.asarray(v, dtype=float)
    if isinstance(model, LinearizedBGK):
        return np.full(v.shape[:-1], model.nu0)
    T, rho = params.T, params.rho
    r = np.sqrt(np.sum(v * v, axis=-1))
    small = r < 1e-12
    rs = np.where(small, 1.0, r)
    out = (math.sqrt(2.0 * T / math.pi) * np.exp(-r * r / (2.0 * T))
           + (rs + T / rs) * erf(rs / math.sqrt(2.0 * T)))
    out = np.where(small, 2.0 * math.sqrt(2.0 * T / math.pi), out)
    return 2.0 * math.pi * model.q0 * rho * out


# ---------------------------------------------------------------------------
# Operator matrix
# ---------------------------------------------------------------------------

@dataclass
class OperatorMatrix:
    """Dense symmetric matrix of L in the Hermite basis, kernel tagged."""

    matrix: np.ndarray
    basis: HermiteBasis
    params: MaxwellianParams
    model: CollisionModel
    null_basis: np.ndarray = field(repr=False)  # (N, 5) orthonormal kernel
    _eig: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eig is None:
            w, V = np.linalg.eigh(self.matrix)
            self._eig = (w, V)
        return self._eig

    def spectral_gap(self) -> float:
        """Sixth-smallest eigenvalue (the first above the 5-dim kernel)."""
        w, _ = self.eig()
        return float(np.sort(w)[5])

    def apply(self, f: VelocityFunction) -> VelocityFunction:
        return VelocityFunction(self.matrix @ f.coeffs, self.basis, self.params)

    def null_projector(self) -> np.ndarray:
        return self.null_basis @ self.null_basis.T


def _null_basis(basis: HermiteBasis, params: MaxwellianParams) -> np.ndarray:
    inv = invariant_functions(basis, params)
    M = np.stack([e.coeffs for e in inv], axis=1)
    Q, _ = np.linalg.qr(M)
    return Q


def assemble_operator(model: CollisionModel, params: MaxwellianParams,
                      basis: HermiteBasis, use_cache: bool = True) -> OperatorMatrix:
    """Matrix of <phi_m, L phi_n>; symmetric PSD with exact 5-dim kernel."""
    if params.u != (0.0, 0.0, 0.0):
        raise DomainError("assemble_operator requires params.u = 0")
    nb = _null_basis(basis, params)
    if isinstance(model, LinearizedBGK):
        mat = model.nu0 * (np.eye(basis.size) - nb @ nb.T)
        return OperatorMatrix(mat, basis, params, model, nb)

    key = cache.content_hash({"what": "hs_operator", "model": model.describe(),
                              "order": basis.order, "T_ref": basis.T_ref,
                              "rho": params.rho, "T": params.T})
    if use_cache:
        hit = cache.load_arrays(key)
        if hit is not None:
            _, arrays = hit
            return OperatorMatrix(arrays["matrix"], basis, params, model, nb)

    mat = _assemble_hardsphere(model, params, basis, nb)
    if use_cache:
        cache.save_arrays(key, {"what": "hs_operator"}, {"matrix": mat})
    return OperatorMatrix(mat, basis, params, model, nb)


def _sphere_rule(n_polar: int, n_azimuth: int) -> tuple[np.ndarray, np.ndarray]:
    """Product rule for smooth integrands over the unit sphere."""
    t, wt = np.polynomial.legendre.leggauss(n_polar)
    phi = 2.0 * np.pi * (np.arange(n_azimuth) + 0.5) / n_azimuth
    st = np.sqrt(1.0 - t * t)
    dirs = np.stack([np.outer(st, np.cos(phi)).ravel(),
                     np.outer(st, np.sin(phi)).ravel(),
                     np.outer(t, np.ones_like(phi)).ravel()], axis=-1)
    w = np.outer(wt, np.full(n_azimuth, 2.0 * np.pi / n_azimuth)).ravel()
    return dirs, w


def _radial_rule(r_max: float, n_panels: int, n_gl: int) \
        -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre on [0, r_max] resolving unit-width bumps."""
    x, w = np.polynomial.legendre.leggauss(n_gl)
    edges = np.linspace(0.0, r_max, n_panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _hs_K_apply_nodes(model: HardSphere, params: MaxwellianParams,
                      basis: HermiteBasis, v: np.ndarray) -> np.ndarray:
    """Y[i, n] = (K phi_n)(v_i) exp(+|v_i|^2/4T) (2 pi T)^{3/4}.

    Spherical quadrature around each node: v' = v + r what.  The r^2
    Jacobian cancels the 1/r of the gain kernel, so all integrands are
    smooth Gaussians times polynomials; the returned values are normalized
    by the basis envelope so the caller can pair them exactly on the mass
    grid.
    """
    from .velocity import _normalized_hermite_table

    T, rho, q0 = params.T, params.rho, model.q0
    s = math.sqrt(T)
    dirs, wdir = _sphere_rule(model.n_sphere_polar, model.n_sphere_azimuth)
    vmax = float(np.max(np.linalg.norm(v, axis=-1)))
    r_max = vmax + 6.0 * s
    n_panels = max(model.n_radial_panels, int(math.ceil(r_max / (1.2 * s))))
    r, wr = _radial_rule(r_max, n_panels, model.n_radial_gl)
    nr, nd = r.size, dirs.shape[0]
    p = basis.order
    mi = basis.multi_index
    Y = np.zeros((v.shape[0], basis.size))
    chunk = max(1, int(2.0e6 // (nr * nd)))
    c_gauss = (2.0 * math.pi * T) ** -0.75     # basis envelope normalization
    for lo in range(0, v.shape[0], chunk):
        vc = v[lo:lo + chunk]                                 # (c, 3)
        z = vc @ dirs.T                                       # (c, nd)
        v2 = np.sum(vc * vc, axis=-1)[:, None]                # (c, 1)
        # r^2 k2 = 4 q0 rho (2 pi T)^{-1/2} r exp(-((r+z)^2 + z^2)/4T)
        rz = r[None, None, :] + z[..., None]
        ex2 = -(rz * rz + (z * z)[..., None]) / (4.0 * T)
        ker2 = (4.0 * q0 * rho * (2.0 * math.pi * T) ** -0.5
                * r[None, None, :] * np.exp(ex2))
        # r^2 k1 = 2 pi q0 rho (2 pi T)^{-3/2} r^3 e^{-(|v|^2+|v'|^2)/4T}
        vp2 = v2[..., None] + 2.0 * r[None, None, :] * z[..., None] \
            + (r ** 2)[None, None, :]
        ker1 = (2.0 * math.pi * q0 * rho * (2.0 * math.pi * T) ** -1.5
                * r[None, None, :] ** 3 * np.exp(-(v2[..., None] + vp2) / (4.0 * T)))
        envel = np.exp(-vp2 / (4.0 * T)) * c_gauss
        kern = ((ker2 - ker1) * envel
                * (wdir[None, :, None] * wr[None, None, :])).reshape(vc.shape[0], -1)
        vprime = (vc[:, None, None, :] + r[None, None, :, None]
                  * dirs[None, :, None, :]).reshape(vc.shape[0], -1, 3)
        sc = vprime / s
        t1 = _normalized_hermite_table(sc[..., 0], p)          # (c, P, p)
        t2 = _normalized_hermite_table(sc[..., 1], p)
        t3 = _normalized_hermite_table(sc[..., 2], p)
        # D[c, P, (m1 m2)] carries the kernel weight and the first two axes;
        # the point axis is then contracted against the third-axis table.
        D = (kern[..., None, None] * t1[..., :, None]
             * t2[..., None, :]).reshape(vc.shape[0], -1, p * p)
        Yc = np.matmul(D.transpose(0, 2, 1), t3)   # (c, p^2, p)
        Y[lo:lo + chunk] = Yc.reshape(vc.shape[0], p ** 3)
    # normalize out the row envelope: caller pairs with poly_m on mass grid
    return Y / c_gauss * np.exp(np.sum(v * v, axis=-1) / (4.0 * T))[:, None]


def _octahedral_orbits(nodes: np.ndarray, basis: HermiteBasis):
    """Orbit reduction of an isotropic node kernel under signs/permutations.

    Returns (reps, rep_of, gather, parity) such that for any isotropic
    integral operator Y[i, m] = parity[i, m] * Yrep[rep_of[i], gather[i, m]].
    """
    mi = basis.multi_index
    p = basis.order
    absn = np.abs(nodes)
    order = np.argsort(-absn, axis=1, kind="stable")           # (N, 3)
    sorted_abs = np.take_along_axis(absn, order, axis=1)
    keys = np.round(sorted_abs, 12)
    reps, rep_of = np.unique(keys, axis=0, return_inverse=True)
    signs = np.where(nodes < 0, -1.0, 1.0)                     # (N, 3)
    parity = np.prod(np.where(signs[:, None, :] < 0,
                              np.where(mi[None, :, :] % 2 == 1, -1.0, 1.0),
                              1.0), axis=2)                    # (N, size)
    mi_perm = mi[:, :][None, :, :]
    mi_perm = np.take_along_axis(np.broadcast_to(mi[None, :, :],
                                                 (nodes.shape[0],) + mi.shape),
                                 order[:, None, :], axis=2)
    gather = (mi_perm[..., 0] * p * p + mi_perm[..., 1] * p
              + mi_perm[..., 2])                               # (N, size)
    return reps, rep_of, gather, parity


def _assemble_hardsphere(model: HardSphere, params: MaxwellianParams,
                         basis: HermiteBasis, nb: np.ndarray) -> np.ndarray:
    T = params.T
    n = basis.size
    qo = max(model.quad_order, basis.order + 2)

    # Both the nu part and the K pairing live on the mass grid
    # (weight e^{-v^2/2T}); integrands are poly * smooth.
    gmass = build_grid(qo, T)
    Vm = basis.vandermonde_poly(gmass.nodes)
    nu_vals = collision_frequency(model, params, gmass.nodes)
    c_mass = (2.0 * math.pi * T) ** -1.5
    Nu = c_mass * (Vm.T * (gmass.weights * nu_vals)) @ Vm

    # K applications are isotropic: evaluate on canonical octant
    # representatives only and map back through parity/permutation.
    reps, rep_of, gather, parity = _octahedral_orbits(gmass.nodes, basis)
    Yrep = _hs_K_apply_nodes(model, params, basis, reps)
    Y = parity * np.take_along_axis(Yrep[rep_of], gather, axis=1)
    Kmat = c_mass * (Vm.T * gmass.weights) @ Y

    raw = Nu - Kmat
    sym = 0.5 * (raw + raw.T)
    proj = np.eye(n) - nb @ nb.T
    mat = proj @ sym @ proj
    mat = 0.5 * (mat + mat.T)
    # PSD enforcement: clip the (loose-quadrature) negative tail.
    w, V = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    mat = (V * w) @ V.T
    mat = 0.5 * (mat + mat.T)
    return proj @ mat @ proj


def _hs_kernel(params: MaxwellianParams, q0: float,
               v: np.ndarray, vp: np.ndarray) -> np.ndarray:
    """k(v, v') = k2 - k1 for the hard-sphere gain/loss kernels."""
    T, rho = params.T, params.rho
    d = v[:, None, :] - vp[None, :, :]
    r2 = np.sum(d * d, axis=-1)
    r = np.sqrt(r2)
    s2 = np.sum(v * v, axis=-1)[:, None]
    sp2 = np.sum(vp * vp, axis=-1)[None, :]
    k1 = (2.0 * math.pi * q0 * rho * (2.0 * math.pi * T) ** -1.5
          * r * np.exp(-(s2 + sp2) / (4.0 * T)))
    rs = np.where(r < 1e-300, 1.0, r)
    expo = -r2 / (8.0 * T) - (s2 - sp2) ** 2 / (8.0 * T * rs * rs)
    k2 = (4.0 * q0 * rho * (2.0 * math.pi * T) ** -0.5 / rs) * np.exp(expo)
    k2 = np.where(r < 1e-300, 0.0, k2)
    return k2 - k1


# ---------------------------------------------------------------------------
# Quasi-inverse
# ---------------------------------------------------------------------------

def quasi_inverse(Lmat: OperatorMatrix, g: VelocityFunction,
                  hydro_tol: float = 1e-10, rel_cut: float = 1e-12) -> VelocityFunction:
    """Solve L h = g on the orthogonal complement of the kernel.

    Raises DomainError naming the offending invariant when g has a
    hydrodynamic component above hydro_tol (relative).
    """
    proj = Lmat.null_basis.T @ g.coeffs
    scale = max(float(np.linalg.norm(g.coeffs)), 1e-300)
    bad = np.abs(proj) > hydro_tol * max(scale, 1.0)
    if np.any(bad):
        name = _INVARIANT_NAMES[int(np.argmax(np.abs(proj)))]
        raise DomainError(
            f"quasi_inverse input has a hydrodynamic component along '{name}' "
            f"(relative size {float(np.max(np.abs(proj))) / scale:.3e})")
    w, V = Lmat.eig()
    cut = rel_cut * float(np.max(w))
    inv_w = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
    coeffs = V @ (inv_w * (V.T @ g.coeffs))
    return VelocityFunction(coeffs, Lmat.basis, Lmat.params)


# ---------------------------------------------------------------------------
# Special solutions and transport coefficients
# ---------------------------------------------------------------------------

def heat_flux_generators(basis: HermiteBasis, params: MaxwellianParams) \
        -> list[VelocityFunction]:
    """The three components v_i (|v|^2 - 5T) mu^{1/2}."""
    T = params.T
    return [from_poly(basis, params,
                      Poly.v(i) * (Poly.vsq() - Poly.const(5.0 * T)))
            for i in range(3)]


def stress_generators(basis: HermiteBasis, params: MaxwellianParams) \
        -> list[list[VelocityFunction]]:
    """The 3x3 components (v_i v_j - delta_ij |v|^2/3) mu^{1/2}."""
    out = []
    for i in range(3):
        row = []
        for j in range(3):
            p = Poly.v(i) * Poly.v(j)
            if i == j:
                p = p - Poly.vsq() * (1.0 / 3.0)
            row.append(from_poly(basis, params, p))
        out.append(row)
    return out


@dataclass
class SpecialSolutions:
    A: list[VelocityFunction]
    Abar: list[VelocityFunction]
    B: list[list[VelocityFunction]]
    Bbar: list[list[VelocityFunction]]
    kappa: float
    lam: float
    heat_offdiag_max: float
    params: MaxwellianParams


def special_solutions(Lmat: OperatorMatrix) -> SpecialSolutions:
    basis, params = Lmat.basis, Lmat.params
    Abar = heat_flux_generators(basis, params)
    Bbar = stress_generators(basis, params)
    A = [quasi_inverse(Lmat, a) for a in Abar]
    B = [[quasi_inverse(Lmat, b) for b in row] for row in Bbar]
    heat = np.array([[inner(A[i], Abar[j]) for j in range(3)] for i in range(3)])
    kappa = float(np.trace(heat) / 3.0)
    offdiag = float(np.max(np.abs(heat - np.diag(np.diag(heat)))))
    pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
    lam = float(np.mean([inner(B[i][j], Bbar[i][j]) for i, j in pairs])) / params.T
    if kappa <= 0 or lam <= 0:
        raise ConfigurationError("nonpositive transport coefficient; "
                                 "operator assembly is inconsistent")
    return SpecialSolutions(A=A, Abar=Abar, B=B, Bbar=Bbar, kappa=kappa,
                            lam=lam, heat_offdiag_max=offdiag, params=params)


def bgk_kappa(P: float, T: float, nu0: float) -> float:
    """Closed form for the BGK heat conductivity, kappa = 10 P T^2 / nu0."""
    return 10.0 * P * T * T / nu0


def bgk_lambda(P: float, nu0: float) -> float:
    """Closed form for the BGK viscosity, lambda = P / nu0."""
    return P / nu0


# ---------------------------------------------------------------------------
# Bilinear operator
# ---------------------------------------------------------------------------

@dataclass
class GammaTensor:
    """Handle for the bilinear collision operator in the basis.

    `kind` is "bgk-moment" (closed-form, moment-structured; a dense third
    order tensor can be materialized on request) or "hardsphere-quad"
    (direct (u, omega) quadrature with per-application disk memoization).
    """

    model: CollisionModel
    basis: HermiteBasis
    params: MaxwellianParams
    dense: np.ndarray | None = None
    use_cache: bool = True

    @property
    def kind(self) -> str:
        return ("bgk-moment" if isinstance(self.model, LinearizedBGK)
                else "hardsphere-quad")

    def describe(self) -> dict:
        return {"model": self.model.describe(), "order": self.basis.order,
                "T_ref": self.basis.T_ref, "rho": self.params.rho,
                "T": self.params.T}


def build_gamma(model: CollisionModel, params: MaxwellianParams,
                basis: HermiteBasis, materialize: bool = False) -> GammaTensor:
    G = GammaTensor(model=model, basis=basis, params=params)
    if materialize:
        if not isinstance(model, LinearizedBGK):
            raise ConfigurationError(
                "dense tensor materialization is only supported for the BGK "
                "model; hard-sphere applications are quadrature-backed")
        if basis.size > 216:
            raise ConfigurationError("dense tensor limited to order <= 6")
        n = basis.size
        dense = np.zeros((n, n, n))
        eye = np.eye(n)
        for m in range(n):
            fm = VelocityFunction(eye[m], basis, params)
            for nn in range(m, n):
                gn = VelocityFunction(eye[nn], basis, params)
                col = _gamma_bgk(model, params, basis, fm, gn).coeffs
                dense[:, m, nn] = col
                dense[:, nn, m] = col
        G.dense = dense
    return G


def gamma_apply(G: GammaTensor, f: VelocityFunction, g: VelocityFunction) \
        -> VelocityFunction:
    """Gamma[f, g]: symmetric, bilinear, range orthogonal to the kernel."""
    if G.dense is not None:
        coeffs = np.einsum("kmn,m,n->k", G.dense, f.coeffs, g.coeffs)
        return VelocityFunction(coeffs, G.basis, G.params)
    if isinstance(G.model, LinearizedBGK):
        return _gamma_bgk(G.model, G.params, G.basis, f, g)
    return _gamma_hardsphere(G, f, g)


def _hydro_moments(params: MaxwellianParams, f: VelocityFunction) \
        -> tuple[float, np.ndarray, float]:
    """(delta rho / rho, delta u, delta T) of mu^{1/2} f."""
    basis = f.basis
    rho, T = params.rho, params.T
    one = from_poly(basis, params, Poly.const(1.0))
    vs = [from_poly(basis, params, Poly.v(i)) for i in range(3)]
    en = from_poly(basis, params, Poly.vsq() - Poly.const(3.0 * T))
    a = inner(one, f) / rho
    b = np.array([inner(v, f) for v in vs]) / rho
    c = inner(en, f) / (3.0 * rho)
    return a, b, c


def _gamma_bgk(model: LinearizedBGK, params: MaxwellianParams,
               basis: HermiteBasis, f: VelocityFunction,
               g: VelocityFunction) -> VelocityFunction:
    """Second derivative of the moments -> Maxwellian map, polarized."""
    T = params.T
    af, bf, cf = _hydro_moments(params, f)
    ag, bg, cg = _hydro_moments(params, g)

    u2 = -0.5 * (bf * ag + bg * af)                  # second-order velocity
    T2 = -(bf @ bg) / 3.0 - 0.5 * (cf * ag + cg * af)

    vpol = [Poly.v(i) for i in range(3)]
    en = Poly.vsq() - Poly.const(3.0 * T)

    def lin(a, b, c) -> Poly:
        p = Poly.const(a)
        for i in range(3):
            p = p + vpol[i] * (b[i] / T)
        return p + en * (c / (2.0 * T * T))

    poly = Poly.const(0.0)
    for i in range(3):
        poly = poly + vpol[i] * (u2[i] / T)
    poly = poly + en * (T2 / (2.0 * T * T))
    # quadratic part of the log-Maxwellian, polarized
    poly = poly + Poly.const(-0.5 * af * ag + 0.75 * cf * cg / T ** 2
                             - (bf @ bg) / (2.0 * T))
    for i in range(3):
        poly = poly + vpol[i] * (-(bf[i] * cg + bg[i] * cf) / (2.0 * T * T))
    poly = poly + Poly.vsq() * (-cf * cg / (2.0 * T ** 3))
    # exp quadratic cross term A_f A_g / 2
    poly = poly + lin(af, bf, cf) * lin(ag, bg, cg) * 0.5

    out = from_poly(basis, params, poly)
    return VelocityFunction(model.nu0 * out.coeffs, basis, params)


def _omega_rule(n_polar: int, n_azimuth: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (t, phi) and weights for int_{S^2} |omega . what| F domega with the
    polar axis along what; evenness in omega halves the polar range."""
    t, wt = np.polynomial.legendre.leggauss(n_polar)
    t = 0.5 * (t + 1.0)       # |cos| in (0, 1)
    wt = 0.5 * wt * 2.0       # factor 2 for the omega -> -omega fold
    phi = 2.0 * np.pi * (np.arange(n_azimuth) + 0.5) / n_azimuth
    wphi = np.full(n_azimuth, 2.0 * np.pi / n_azimuth)
    T, P = np.meshgrid(t, phi, indexing="ij")
    W = np.outer(wt, wphi)
    return np.stack([T.ravel(), P.ravel()], axis=-1), W.ravel()


def _eval_series(basis: HermiteBasis, coeffs: np.ndarray, pts: np.ndarray) \
        -> np.ndarray:
    """Evaluate the polynomial part of a coefficient vector at points."""
    from .velocity import _normalized_hermite_table
    p = basis.order
    s = pts / math.sqrt(basis.T_ref)
    t1 = _normalized_hermite_table(s[..., 0], p)
    t2 = _normalized_hermite_table(s[..., 1], p)
    t3 = _normalized_hermite_table(s[..., 2], p)
    C = coeffs.reshape(p, p, p)
    tmp = np.einsum("...k,ijk->...ij", t3, C)
    tmp = np.einsum("...j,...ij->...i", t2, tmp)
    return np.einsum("...i,...i->...", t1, tmp)


def _gamma_hardsphere(G: GammaTensor, f: VelocityFunction,
                      g: VelocityFunction) -> VelocityFunction:
    model: HardSphere = G.model
    basis, params = G.basis, G.params
    key = cache.content_hash({"what": "hs_gamma_apply", "G": G.describe(),
                              "f": f.coeffs.round(15).tolist(),
                              "g": g.coeffs.round(15).tolist()})
    if G.use_cache:
        hit = cache.load_arrays(key)
        if hit is not None:
            return VelocityFunction(hit[1]["coeffs"], basis, params)

    T, rho, q0 = params.T, params.rho, model.q0
    qo = max(model.quad_order, basis.order + 2)
    gv = build_grid(qo, T)
    gu = build_grid(qo - 1, T)
    om, wom = _omega_rule(model.n_omega_polar, model.n_omega_azimuth)
    nom = om.shape[0]

    u = gu.nodes
    fu = _eval_series(basis, f.coeffs, u)
    gu_vals = _eval_series(basis, g.coeffs, u)

    out_accum = np.zeros(gv.nodes.shape[0])
    chunk = max(1, int(2.0e6 // (u.shape[0] * nom)))
    for lo in range(0, gv.nodes.shape[0], chunk):
        v = gv.nodes[lo:lo + chunk]
        fv = _eval_series(basis, f.coeffs, v)
        gv_vals = _eval_series(basis, g.coeffs, v)
        w = v[:, None, :] - u[None, :, :]                      # (cv, Nu, 3)
        r = np.linalg.norm(w, axis=-1)
        rs = np.where(r < 1e-14, 1.0, r)
        e1 = w / rs[..., None]
        helper = np.zeros_like(e1)
        helper[..., 0] = 1.0
        swap = np.abs(e1[..., 0]) > 0.9
        helper[swap] = np.array([0.0, 1.0, 0.0])
        e2 = np.cross(e1, helper)
        e2 /= np.linalg.norm(e2, axis=-1)[..., None]
        e3 = np.cross(e1, e2)
        t = om[:, 0]
        ph = om[:, 1]
        dirs = (t[:, None] * e1[..., None, :]
                + (np.sqrt(1 - t * t) * np.cos(ph))[:, None] * e2[..., None, :]
                + (np.sqrt(1 - t * t) * np.sin(ph))[:, None] * e3[..., None, :])
        # omega (omega . (v - u)) with omega . w = |w| t
        shift = dirs * (rs[..., None, None] * t[None, None, :, None])
        ustar = u[None, :, None, :] + shift
        vstar = v[:, None, None, :] - shift
        f_us = _eval_series(basis, f.coeffs, ustar)
        f_vs = _eval_series(basis, f.coeffs, vstar)
        g_us = _eval_series(basis, g.coeffs, ustar)
        g_vs = _eval_series(basis, g.coeffs, vstar)
        bracket = (f_us * g_vs + f_vs * g_us
                   - (fu[None, :, None] * gv_vals[:, None, None]
                      + fv[:, None, None] * gu_vals[None, :, None]))
        qfac = q0 * r[..., None] * t[None, None, :] * wom[None, None, :]
        inner_uo = np.einsum("cuo,cuo,u->c", qfac, bracket, gu.weights)
        out_accum[lo:lo + chunk] = inner_uo

    pref = math.sqrt(rho) / (2.0 * (2.0 * math.pi * T) ** 3)
    Vp = basis.vandermonde_poly(gv.nodes)
    coeffs = pref * (Vp.T @ (gv.weights * out_accum))
    if G.use_cache:
        cache.save_arrays(key, {"what": "hs_gamma_apply"}, {"coeffs": coeffs})
    return VelocityFunction(coeffs, basis, params)


# ---------------------------------------------------------------------------
# Structural identities
# ---------------------------------------------------------------------------

def verify_identities(S: SpecialSolutions, G: GammaTensor, u1,
                      Lmat: OperatorMatrix) -> dict:
    """Residuals of the two structural identities of the bilinear operator.

    Identity I (translated-family): for w1 = (u1.v) mu^{1/2},

        int B_ij Gamma[w1, A_k] = -int B_ij (u1.v)/2 Abar_k
                                  + T int B_ij (u1 . Bbar)_k.

    Identity II (Maxwellian-family): for m = (u1.v)/T and g = mu^{1/2} m,

        Gamma[g, g] = (1/2) L [(I - P)(mu^{1/2} m^2)].

    Both sides of each are computed independently; relative residuals are
    returned together with the raw tensors.
    """
    basis, params = G.basis, G.params
    T = params.T
    u1 = np.asarray(u1, dtype=float)

    u1v = Poly.const(0.0)
    for i in range(3):
        u1v = u1v + Poly.v(i) * u1[i]
    w1 = from_poly(basis, params, u1v)

    lhs = np.zeros((3, 3, 3))
    for k in range(3):
        gam = gamma_apply(G, w1, S.A[k])
        for i in range(3):
            for j in range(3):
                lhs[i, j, k] = inner(S.B[i][j], gam)

    rhs = np.zeros((3, 3, 3))
    for k in range(3):
        half_uv_abar = from_poly(basis, params,
                                 u1v * (Poly.v(k) * (Poly.vsq() - Poly.const(5 * T)))
                                 * 0.5)
        for i in range(3):
            for j in range(3):
                t1 = -inner(S.B[i][j], half_uv_abar)
                t2 = T * sum(u1[l] * inner(S.B[i][j], S.Bbar[l][k])
                             for l in range(3))
                rhs[i, j, k] = t1 + t2
    scale1 = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)),
                 S.lam * T * max(float(np.linalg.norm(u1)), 1e-30), 1e-30)
    res1 = float(np.max(np.abs(lhs - rhs)) / scale1)

    m_poly = u1v * (1.0 / T)
    g = from_poly(basis, params, m_poly)
    lhs2 = gamma_apply(G, g, g)
    m2 = from_poly(basis, params, m_poly * m_poly)
    _, m2_perp = project_null(m2)
    rhs2 = VelocityFunction(0.5 * (Lmat.matrix @ m2_perp.coeffs), basis, params)
    scale2 = max(rhs2.norm(), lhs2.norm(), 1e-30)
    res2 = float(np.linalg.norm(lhs2.coeffs - rhs2.coeffs) / scale2)

    return {"translated_family": {"lhs": lhs, "rhs": rhs, "residual": res1},
            "maxwellian_family": {"lhs": lhs2.coeffs, "rhs": rhs2.coeffs,
                                  "residual": res2}}


# ---------------------------------------------------------------------------
# Fluid coefficient constants
# ---------------------------------------------------------------------------

def compute_k1(S: SpecialSolutions) -> float:
    """K1 from the isotropy contraction int B_12 v_1 A_2 = alpha_A.

    The second-gradient stress block equals (lambda^2/P) K1 (Hess T - tr/3)
    with K1 = alpha_A P / (lambda^2 T^2).
    """
    basis, params = S.B[0][1].basis, S.params
    v1A2 = VelocityFunction(basis.mult_v_ops()[0] @ S.A[1].coeffs, basis, params)
    alpha = inner(S.B[0][1], v1A2)
    P, T = params.pressure, params.T
    return float(alpha * P / (S.lam ** 2 * T ** 2))


def compute_k2(S: SpecialSolutions, G: GammaTensor, Lmat: OperatorMatrix,
               dT: float = 1e-4) -> float:
    """K2 from the two grad-T x grad-T kinetic integrals.

    Part B: int B_ij mu^{-1/2} v_k v_l dT-derivative(mu^{1/2} A_l / 2T^2);
    part C: int B_ij Gamma[A_k, A_l] / (4 T^4).  Both contracted through the
    traceless isotropy tensor at (i,j,k,l) = (1,2,1,2).  Exactly zero for
    the BGK model.
    """
    basis, params = Lmat.basis, Lmat.params
    P, T = params.pressure, params.T
    lam = S.lam

    def a_scaled(Tval: float) -> np.ndarray:
        pr = MaxwellianParams(rho=P / Tval, T=Tval)
        bas = basis if abs(Tval - basis.T_ref) < 1e-13 else None
        if bas is None:
            # re-expand the perturbed-temperature solution in the same basis
            Lp = assemble_operator(Lmat.model, pr, basis, use_cache=False) \
                if not isinstance(Lmat.model, LinearizedBGK) else None
            if isinstance(Lmat.model, LinearizedBGK):
                abar = from_poly(basis, pr,
                                 Poly.v(1) * (Poly.vsq() - Poly.const(5 * Tval)))
                return abar.coeffs / Lmat.model.nu0
            Sp = special_solutions(Lp)
            return Sp.A[1].coeffs
        return S.A[1].coeffs

    # d/dT of A_2's coefficients at fixed basis (rho = P/T constraint)
    a_plus = a_scaled(T + dT)
    a_minus = a_scaled(T - dT)
    dA = (a_plus - a_minus) / (2.0 * dT)
    A2 = S.A[1].coeffs
    # mu^{-1/2} v_1 v_2 d/dT(mu^{1/2} A_2 / 2T^2)
    #   = v_1 v_2 [dA + A ((|v|^2-5T)/(4T^2) - 2/T)] / (2T^2)
    radial = basis.mult_poly_op((Poly.vsq() - Poly.const(5 * T)) * (1 / (4 * T * T))
                                - Poly.const(2.0 / T))
    core = dA + radial @ A2
    v1v2 = basis.mult_poly_op(Poly.v(0) * Poly.v(1))
    termB_vec = VelocityFunction((v1v2 @ core) / (2.0 * T * T), basis, params)
    beta_B = inner(S.B[0][1], termB_vec)
    K2_B = 2.0 * beta_B * P * T / lam ** 2

    gam = gamma_apply(G, S.A[0], S.A[1])
    gamma_C = 0.5 * (inner(S.B[0][1], gam) + inner(S.B[1][0], gam))
    K2_C = gamma_C * P / (2.0 * lam ** 2 * T ** 3)
    return float(K2_B + K2_C)
