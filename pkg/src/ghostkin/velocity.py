"""Velocity-space discretization.

Velocity functions are held as coefficient vectors over the orthonormal basis

    phi_m(v) = prod_a  He_{m_a}(v_a / sqrt(T_ref)) / sqrt(m_a!)
               * exp(-|v|^2 / (4 T_ref)) / (2 pi T_ref)^(3/4),

i.e. tensor-product probabilists' Hermite polynomials times the square root
of a unit-mass Gaussian at the reference temperature.  Any polynomial times
mu^{1/2} at T = T_ref is an exact finite element of this basis, so the five
collision invariants, the heat-flux and stress generators, and all their
products are represented without discretization error.  Functions attached
to a local Maxwellian with T != T_ref are re-expanded by quadrature
projection and the residual is tracked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite_e


class ConfigurationError(ValueError):
    """Invalid construction parameters (grid order, model parameters, ...)."""


class DomainError(ValueError):
    """An operand violates an operation's mathematical precondition."""


# ---------------------------------------------------------------------------
# Maxwellians
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaxwellianParams:
    """Parameters (rho, u, T) of a Maxwellian rho (2 pi T)^{-3/2} e^{-|v-u|^2/2T}."""

    rho: float
    u: tuple[float, float, float] = (0.0, 0.0, 0.0)
    T: float = 1.0

    def __post_init__(self):
        if not (self.rho > 0.0):
            raise ConfigurationError(f"rho must be positive, got {self.rho}")
        if not (self.T > 0.0):
            raise ConfigurationError(f"T must be positive, got {self.T}")
        object.__setattr__(self, "u", tuple(float(c) for c in self.u))
        if len(self.u) != 3:
            raise ConfigurationError("u must be a 3-vector")

    @property
    def pressure(self) -> float:
        return self.rho * self.T


def maxwellian_eval(p: MaxwellianParams, v) -> np.ndarray | float:
    """Evaluate the Maxwellian at velocity v (shape (..., 3))."""
    v = np.asarray(v, dtype=float)
    dv = v - np.asarray(p.u)
    q = np.sum(dv * dv, axis=-1)
    return p.rho * (2.0 * np.pi * p.T) ** (-1.5) * np.exp(-q / (2.0 * p.T))


def wall_maxwellian_params(T_w: float) -> MaxwellianParams:
    """Parameters of the flux-normalized wall Maxwellian.

    M_w = (2 pi T_w^2)^{-1} exp(-|v|^2/2T_w) carries unit half-range flux
    int_{v.n>0} M_w |v.n| dv = 1; as a MaxwellianParams instance its density
    is sqrt(2 pi / T_w).
    """
    return MaxwellianParams(rho=math.sqrt(2.0 * math.pi / T_w), T=T_w)


# ---------------------------------------------------------------------------
# Small exact-polynomial helper (separable monomial sums)
# ---------------------------------------------------------------------------

class Poly:
    """Sparse polynomial in (v1, v2, v3): dict (p1,p2,p3) -> coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple[int, int, int], float] = dict(terms or {})

    @staticmethod
    def const(c: float) -> "Poly":
        return Poly({(0, 0, 0): float(c)})

    @staticmethod
    def v(axis: int) -> "Poly":
        key = tuple(1 if a == axis else 0 for a in range(3))
        return Poly({key: 1.0})

    @staticmethod
    def vsq() -> "Poly":
        return Poly({(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): 1.0})

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0.0) + c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + other * (-1.0)

    def __mul__(self, other):
        if isinstance(other, Poly):
            out: dict[tuple[int, int, int], float] = {}
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    k = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2])
                    out[k] = out.get(k, 0.0) + c1 * c2
            return Poly(out)
        out = {k: c * float(other) for k, c in self.terms.items()}
        return Poly(out)

    __rmul__ = __mul__

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape[:-1])
        for (p1, p2, p3), c in self.terms.items():
            out = out + c * v[..., 0] ** p1 * v[..., 1] ** p2 * v[..., 2] ** p3
        return out


# ---------------------------------------------------------------------------
# Quadrature grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VelocityGrid:
    """Tensor Gauss-Hermite grid for integrals against exp(-|v|^2 / 2 T_ref).

    Quadrature of poly(v) * exp(-|v|^2/2T_ref) is exact for per-axis degree
    up to 2*order - 1.  Weights include the Gaussian factor, so
    sum(weights) = (2 pi T_ref)^{3/2}, the Gaussian mass.
    """

    order: int
    T_ref: float
    nodes: np.ndarray = field(repr=False)       # (N, 3)
    weights: np.ndarray = field(repr=False)     # (N,)
    axis_nodes: np.ndarray = field(repr=False)  # (order,)
    axis_weights: np.ndarray = field(repr=False)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate f(v) dv given f(v_i) * exp(+|v_i|^2/2T) pre-divided out.

        `values` are samples of f(v)/w(v) with w the Gaussian weight; for
        integrands of the form poly * gaussian the caller should divide by
        the weight analytically rather than numerically.
        """
        return np.tensordot(self.weights, values, axes=(0, 0))


def build_grid(order: int, T_ref: float) -> VelocityGrid:
    """Tensor Gauss-Hermite nodes/weights scaled to variance T_ref."""
    if order < 4:
        raise ConfigurationError(f"grid order must be >= 4, got {order}")
    if not T_ref > 0:
        raise ConfigurationError(f"T_ref must be positive, got {T_ref}")
    x, w = hermite_e.hermegauss(order)       # weight exp(-x^2/2), sum w = sqrt(2 pi)
    s = math.sqrt(T_ref)
    ax_nodes = s * x
    ax_weights = s * w                       # int f(v) e^{-v^2/2T} dv = sum aw f(an)
    X, Y, Z = np.meshgrid(ax_nodes, ax_nodes, ax_nodes, indexing="ij")
    nodes = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1)
    W = (ax_weights[:, None, None] * ax_weights[None, :, None]
         * ax_weights[None, None, :]).ravel()
    return VelocityGrid(order=order, T_ref=float(T_ref), nodes=nodes, weights=W,
                        axis_nodes=ax_nodes, axis_weights=ax_weights)


def _normalized_hermite_table(s: np.ndarray, order: int) -> np.ndarray:
    """Table He_n(s)/sqrt(n!) for n < order, stable three-term recurrence."""
    s = np.asarray(s, dtype=float)
    out = np.empty(s.shape + (order,))
    out[..., 0] = 1.0
    if order > 1:
        out[..., 1] = s
    for n in range(1, order - 1):
        out[..., n + 1] = (s * out[..., n] - math.sqrt(n) * out[..., n - 1]) \
            / math.sqrt(n + 1)
    return out


# ---------------------------------------------------------------------------
# Orthonormal Hermite basis
# ---------------------------------------------------------------------------

class HermiteBasis:
    """Orthonormal tensor Hermite * sqrt(Gaussian) basis at T_ref.

    `order` is the per-axis polynomial order; the basis has order**3
    elements indexed in C order over (m1, m2, m3).
    """

    def __init__(self, order: int, T_ref: float = 1.0):
        if order < 3:
            raise ConfigurationError("basis order must be >= 3 so the five "
                                     "collision invariants are representable")
        if not T_ref > 0:
            raise ConfigurationError("T_ref must be positive")
        self.order = int(order)
        self.T_ref = float(T_ref)
        self.size = self.order ** 3
        m = np.arange(self.order)
        M1, M2, M3 = np.meshgrid(m, m, m, indexing="ij")
        self.multi_index = np.stack([M1.ravel(), M2.ravel(), M3.ravel()], axis=-1)
        self._mult_ops: list[np.ndarray] | None = None
        self._quad: VelocityGrid | None = None

    # -- evaluation ---------------------------------------------------------

    def gauss_factor(self, v: np.ndarray) -> np.ndarray:
        """The common envelope exp(-|v|^2/4T)/(2 pi T)^{3/4}."""
        v = np.asarray(v, dtype=float)
        q = np.sum(v * v, axis=-1)
        return np.exp(-q / (4.0 * self.T_ref)) / (2.0 * np.pi * self.T_ref) ** 0.75

    def vandermonde_poly(self, v: np.ndarray) -> np.ndarray:
        """(npts, size) table of the polynomial parts phi_m / gauss_factor."""
        v = np.asarray(v, dtype=float)
        s = v / math.sqrt(self.T_ref)
        t1 = _normalized_hermite_table(s[..., 0], self.order)
        t2 = _normalized_hermite_table(s[..., 1], self.order)
        t3 = _normalized_hermite_table(s[..., 2], self.order)
        mi = self.multi_index
        return (t1[..., mi[:, 0]] * t2[..., mi[:, 1]] * t3[..., mi[:, 2]])

    def vandermonde(self, v: np.ndarray) -> np.ndarray:
        """(npts, size) table of phi_m(v)."""
        return self.vandermonde_poly(v) * self.gauss_factor(v)[..., None]

    # -- exact expansion of poly * mu^{1/2} ---------------------------------

    def _axis_coeffs(self, power: int, T: float) -> np.ndarray:
        """Coefficients of x^power * e^{-x^2/4 T_ref}/(2 pi T_ref)^{1/4} ... in the
        per-axis orthonormal basis, exact (requires power < order).

        The monomial is expanded in scaled probabilists' Hermite polynomials
        He_n(x/sqrt(T_ref)); exactness requires T == T_ref upstream.
        """
        if power >= self.order:
            raise DomainError(
                f"monomial power {power} not representable at order {self.order}")
        mono = np.zeros(power + 1)
        mono[power] = self.T_ref ** (power / 2.0)  # x^p = T^{p/2} s^p
        he = hermite_e.poly2herme(mono)
        out = np.zeros(self.order)
        n = np.arange(he.size)
        out[: he.size] = he * np.sqrt([math.factorial(int(k)) for k in n])
        return out

    def expand_poly_times_sqrt_maxwellian(self, poly: Poly,
                                          params: MaxwellianParams) -> np.ndarray:
        """Exact coefficients of poly(v) * mu_params^{1/2}(v); T must equal T_ref.

        mu^{1/2} = sqrt(rho) (2 pi T)^{-3/4} e^{-|v|^2/4T}, so relative to the
        basis envelope the prefactor is sqrt(rho).
        """
        if params.u != (0.0, 0.0, 0.0):
            raise DomainError("exact expansion requires u = 0")
        if abs(params.T - self.T_ref) > 1e-14 * self.T_ref:
            raise DomainError("exact expansion requires T == T_ref; "
                              "use re_expand for local temperatures")
        coeffs = np.zeros(self.size)
        pref = math.sqrt(params.rho)
        ordr = self.order
        for (p1, p2, p3), c in poly.terms.items():
            c1 = self._axis_coeffs(p1, params.T)
            c2 = self._axis_coeffs(p2, params.T)
            c3 = self._axis_coeffs(p3, params.T)
            coeffs += (pref * c
                       * np.einsum("i,j,k->ijk", c1, c2, c3).ravel())
        return coeffs

    # -- quadrature re-expansion for local Maxwellians ----------------------

    def projection_grid(self, oversample: int = 6) -> VelocityGrid:
        """Grid exact for pairwise products of basis elements (weight e^{-v^2/2T})."""
        if self._quad is None or self._quad.order < self.order + oversample:
            self._quad = build_grid(self.order + oversample, self.T_ref)
        return self._quad

    def project_values(self, poly_values: np.ndarray, grid: VelocityGrid) -> np.ndarray:
        """Project f onto the basis given samples of f / gauss_factor on `grid`.

        Exact whenever f / gauss_factor is a polynomial of per-axis degree
        within the grid's exactness.
        """
        V = self.vandermonde_poly(grid.nodes)
        gf2 = 1.0 / (2.0 * np.pi * self.T_ref) ** 1.5
        # phi_m * f = (poly_m * poly_f) * e^{-|v|^2/2T} * gf2
        return gf2 * (V.T @ (grid.weights * poly_values))

    def expand_poly_times_sqrt_maxwellian_local(
            self, poly: Poly, params: MaxwellianParams,
            grid: VelocityGrid | None = None) -> tuple[np.ndarray, float]:
        """Quadrature expansion of poly * mu_params^{1/2} for T != T_ref.

        Returns (coeffs, residual) where residual is the L2 truncation error
        estimated on the projection grid.
        """
        grid = grid or self.projection_grid()
        vals = poly(grid.nodes) * _sqrt_maxwellian_values(params, grid.nodes)
        poly_vals = vals / self.gauss_factor(grid.nodes)
        coeffs = self.project_values(poly_vals, grid)
        # residual via Parseval on the grid: ||f||^2 - ||coeffs||^2
        gf2 = 1.0 / (2.0 * np.pi * self.T_ref) ** 1.5
        norm2 = gf2 * np.dot(grid.weights, poly_vals * poly_vals)
        res2 = max(norm2 - float(coeffs @ coeffs), 0.0)
        return coeffs, math.sqrt(res2)

    # -- coefficient-space multiplication operators -------------------------

    def mult_v_ops(self) -> list[np.ndarray]:
        """Matrices of multiplication by v_a (orthogonal truncation at top order)."""
        if self._mult_ops is None:
            n = self.order
            ladder = np.zeros((n, n))
            for j in range(n - 1):
                ladder[j + 1, j] = math.sqrt(j + 1)   # raising part of s*phi_j
                ladder[j, j + 1] = math.sqrt(j + 1)   # lowering part
            ladder *= math.sqrt(self.T_ref)
            eye = np.eye(n)
            ops = []
            for axis in range(3):
                mats = [ladder if a == axis else eye for a in range(3)]
                op = np.einsum("il,jm,kn->ijklmn", mats[0], mats[1], mats[2])
                ops.append(op.reshape(self.size, self.size))
            self._mult_ops = ops
        return self._mult_ops

    def mult_poly_op(self, poly: Poly) -> np.ndarray:
        """Matrix of multiplication by poly(v) in coefficient space."""
        ops = self.mult_v_ops()
        out = np.zeros((self.size, self.size))
        for (p1, p2, p3), c in poly.terms.items():
            term = np.eye(self.size)
            for axis, p in enumerate((p1, p2, p3)):
                for _ in range(p):
                    term = ops[axis] @ term
            out += c * term
        return out


def _sqrt_maxwellian_values(params: MaxwellianParams, v: np.ndarray) -> np.ndarray:
    return np.sqrt(maxwellian_eval(params, v))


# ---------------------------------------------------------------------------
# Velocity functions and the hydrodynamic projection
# ---------------------------------------------------------------------------

@dataclass
class VelocityFunction:
    """A velocity-space function as basis coefficients plus its Maxwellian."""

    coeffs: np.ndarray
    basis: HermiteBasis
    params: MaxwellianParams

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.size,):
            raise ConfigurationError("coefficient vector does not match basis size")
        if not np.all(np.isfinite(self.coeffs)):
            raise ConfigurationError("coefficients must be finite")

    def __add__(self, other: "VelocityFunction") -> "VelocityFunction":
        return VelocityFunction(self.coeffs + other.coeffs, self.basis, self.params)

    def __sub__(self, other: "VelocityFunction") -> "VelocityFunction":
        return VelocityFunction(self.coeffs - other.coeffs, self.basis, self.params)

    def __mul__(self, c: float) -> "VelocityFunction":
        return VelocityFunction(self.coeffs * float(c), self.basis, self.params)

    __rmul__ = __mul__

    def eval(self, v: np.ndarray) -> np.ndarray:
        return self.basis.vandermonde(v) @ self.coeffs

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def inner(f: VelocityFunction, g: VelocityFunction) -> float:
    """L2(dv) pairing; exact through orthonormality of the shared basis."""
    return float(f.coeffs @ g.coeffs)


def from_poly(basis: HermiteBasis, params: MaxwellianParams, poly: Poly,
              allow_local: bool = True) -> VelocityFunction:
    """poly(v) * mu^{1/2} as a VelocityFunction (exact when T == T_ref)."""
    if abs(params.T - basis.T_ref) <= 1e-14 * basis.T_ref and params.u == (0.0, 0.0, 0.0):
        coeffs = basis.expand_poly_times_sqrt_maxwellian(poly, params)
    else:
        if not allow_local:
            raise DomainError("local-temperature expansion not allowed here")
        coeffs, _ = basis.expand_poly_times_sqrt_maxwellian_local(poly, params)
    return VelocityFunction(coeffs, basis, params)


def invariant_functions(basis: HermiteBasis, params: MaxwellianParams) \
        -> list[VelocityFunction]:
    """The five collision invariants mu^{1/2} {1, v, |v|^2 - 3T}."""
    polys = [Poly.const(1.0), Poly.v(0), Poly.v(1), Poly.v(2),
             Poly.vsq() - Poly.const(3.0 * params.T)]
    return [from_poly(basis, params, p) for p in polys]


@dataclass(frozen=True)
class HydroCoefficients:
    """Coordinates on the basis mu^{1/2} {1, v, |v|^2 - 3T}."""

    mass: float
    momentum: tuple[float, float, float]
    energy: float

    def max_abs(self) -> float:
        return max(abs(self.mass), max(abs(c) for c in self.momentum),
                   abs(self.energy))


def moment(f: VelocityFunction, weight, accuracy_tol: float = 1e-8):
    """Moment int weight(v) mu^{1/2}(v) f(v) dv evaluated on the grid.

    `weight` is a Poly or a list of Poly (returning a vector).  The grid is
    the basis projection grid; a warning flag is attached to the result when
    the requested degree exceeds the grid's exactness (degree overflow).
    """
    if isinstance(weight, (list, tuple)):
        return np.array([moment(f, w, accuracy_tol) for w in weight])
    basis, params = f.basis, f.params
    grid = basis.projection_grid()
    exact_deg = 2 * grid.order - 1 - (basis.order - 1)
    moment.last_accuracy_warning = weight.degree() > exact_deg  # result metadata
    w_mu = from_poly(basis, params, weight)
    return inner(w_mu, f)


moment.last_accuracy_warning = False


def project_null(f: VelocityFunction) -> tuple[HydroCoefficients, VelocityFunction]:
    """Split f into its hydrodynamic part and the orthogonal remainder.

    Returns (coords, (I-P)f); requires the attached Maxwellian to have u=0.
    """
    if f.params.u != (0.0, 0.0, 0.0):
        raise DomainError("projection requires a zero-velocity Maxwellian")
    rho, T = f.params.rho, f.params.T
    inv = invariant_functions(f.basis, f.params)
    raw = np.array([inner(e, f) for e in inv])
    norms = np.array([rho, rho * T, rho * T, rho * T, 6.0 * rho * T * T])
    coords = raw / norms
    pf = np.zeros_like(f.coeffs)
    for c, e in zip(coords, inv):
        pf += c * e.coeffs
    coords_out = HydroCoefficients(mass=float(coords[0]),
                                   momentum=tuple(coords[1:4]),
                                   energy=float(coords[4]))
    return coords_out, VelocityFunction(f.coeffs - pf, f.basis, f.params)


def hydro_reassemble(coords: HydroCoefficients, remainder: VelocityFunction) \
        -> VelocityFunction:
    """Inverse of project_null."""
    inv = invariant_functions(remainder.basis, remainder.params)
    vals = [coords.mass, *coords.momentum, coords.energy]
    out = remainder.coeffs.copy()
    for c, e in zip(vals, inv):
        out += c * e.coeffs
    return VelocityFunction(out, remainder.basis, remainder.params)


def re_expand(f: VelocityFunction, new_params: MaxwellianParams,
              grid: VelocityGrid | None = None) -> tuple[VelocityFunction, float]:
    """Re-attach f to a different Maxwellian, keeping the same basis.

    The function values are unchanged; only the bookkeeping params move.
    Returns (g, residual) where residual bounds the information lost if the
    coefficients are also truncated (zero here: same basis).
    """
    return VelocityFunction(f.coeffs.copy(), f.basis, new_params), 0.0
