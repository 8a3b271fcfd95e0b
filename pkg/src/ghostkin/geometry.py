"""Boundary charts and the transport operator in wall coordinates.

A chart parameterizes the wall by principal curvilinear coordinates
(iota1, iota2); interior points are x = r(iota1, iota2) - n * nvec with the
outward unit normal nvec and wall distance n >= 0.  Velocities are rotated
into the frame via v_eta = -v.n, v_phi = -v.s1, v_psi = -v.s2.

The operator v . grad_x in these variables is

    v_eta d_n
    - (1/(R1-n)) (v_phi^2 d_veta - v_eta v_phi d_vphi)
    - (1/(R2-n)) (v_psi^2 d_veta - v_eta v_psi d_vpsi)
    - (1/(L1 L2)) [ R1 (r_11 . r_2)/(L1 (R1-n)) v_phi v_psi
                    + R2 (r_12 . r_2)/(L2 (R2-n)) v_psi^2 ] d_vphi
    - (1/(L1 L2)) [ R2 (r_22 . r_1)/(L2 (R2-n)) v_phi v_psi
                    + R1 (r_12 . r_1)/(L1 (R1-n)) v_phi^2 ] d_vpsi
    - (R1 v_phi / (L1 (R1-n))) d_iota1 - (R2 v_psi / (L2 (R2-n))) d_iota2,

derived from the Rodrigues relations d_i nvec = (L_i/R_i) s_i and the frame
rotation d_i s_j; flat walls reduce exactly to Cartesian transport.
Infinite principal radii are represented by curvature 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .velocity import ConfigurationError, DomainError


@dataclass
class ChartPoint:
    """All chart fields evaluated at one (iota1, iota2)."""

    r: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    n: np.ndarray
    L1: float
    L2: float
    kappa1: float      # 1/R1, zero for flat directions
    kappa2: float
    r11_dot_r2: float  # second-derivative dot products of the display
    r12_dot_r2: float
    r22_dot_r1: float
    r12_dot_r1: float

    @property
    def R1(self) -> float:
        return math.inf if self.kappa1 == 0.0 else 1.0 / self.kappa1

    @property
    def R2(self) -> float:
        return math.inf if self.kappa2 == 0.0 else 1.0 / self.kappa2


@dataclass
class BoundaryChart:
    """Principal-coordinate chart of a supported surface."""

    surface: str
    at: Callable[[float, float], ChartPoint]

    def point(self, iota1: float, iota2: float, n: float = 0.0) -> np.ndarray:
        cp = self.at(iota1, iota2)
        self.check_validity(cp, n)
        return cp.r - n * cp.n

    def check_validity(self, cp: ChartPoint, n: float):
        rmin = min(cp.R1, cp.R2)
        if n >= rmin:
            raise DomainError(
                f"wall distance {n} exceeds the chart validity radius {rmin}")

    def frame_velocity(self, cp: ChartPoint, v: np.ndarray) -> np.ndarray:
        """(v_eta, v_phi, v_psi) = -(v.n, v.s1, v.s2)."""
        v = np.asarray(v, dtype=float)
        return np.stack([-v @ cp.n, -v @ cp.s1, -v @ cp.s2], axis=-1)

    def cartesian_velocity(self, cp: ChartPoint, fv: np.ndarray) -> np.ndarray:
        fv = np.asarray(fv, dtype=float)
        return -(np.multiply.outer(fv[..., 0], cp.n)
                 + np.multiply.outer(fv[..., 1], cp.s1)
                 + np.multiply.outer(fv[..., 2], cp.s2))


def build_chart(surface: str, **kw) -> BoundaryChart:
    """Supported surfaces: flat_wall, channel_top, channel_bottom,
    cylinder(R), sphere(R)."""
    if surface == "flat_wall":
        normal = np.asarray(kw.get("normal", (0.0, 0.0, 1.0)), dtype=float)
        normal = normal / np.linalg.norm(normal)
        helper = np.array([1.0, 0.0, 0.0])
        if abs(normal @ helper) > 0.9:
            helper = np.array([0.0, 1.0, 0.0])
        s2 = np.cross(normal, helper)
        s2 /= np.linalg.norm(s2)
        s1 = np.cross(s2, normal)

        def at(i1, i2, s1=s1, s2=s2, normal=normal):
            return ChartPoint(r=i1 * s1 + i2 * s2, s1=s1, s2=s2, n=normal,
                              L1=1.0, L2=1.0, kappa1=0.0, kappa2=0.0,
                              r11_dot_r2=0.0, r12_dot_r2=0.0,
                              r22_dot_r1=0.0, r12_dot_r1=0.0)
        return BoundaryChart(surface, at)

    if surface in ("channel_top", "channel_bottom"):
        top = surface == "channel_top"
        y0 = 1.0 if top else -1.0
        s1 = np.array([1.0, 0.0, 0.0])
        s2 = np.array([0.0, 0.0, -1.0 if top else 1.0])
        n = np.array([0.0, y0, 0.0])

        def at(i1, i2, s1=s1, s2=s2, n=n, y0=y0):
            return ChartPoint(r=np.array([i1, y0, s2[2] * i2]), s1=s1, s2=s2,
                              n=n, L1=1.0, L2=1.0, kappa1=0.0, kappa2=0.0,
                              r11_dot_r2=0.0, r12_dot_r2=0.0,
                              r22_dot_r1=0.0, r12_dot_r1=0.0)
        return BoundaryChart(surface, at)

    if surface == "cylinder":
        R = float(kw["R"])
        if R <= 0:
            raise ConfigurationError("cylinder radius must be positive")

        def at(i1, i2, R=R):
            # iota1 = azimuthal angle, iota2 = axial coordinate; interior domain
            c, s = math.cos(i1), math.sin(i1)
            s1 = np.array([-s, c, 0.0])
            s2v = np.array([0.0, 0.0, 1.0])
            n = np.cross(s1, s2v)            # = (c, s, 0), outward
            return ChartPoint(r=np.array([R * c, R * s, i2]), s1=s1, s2=s2v,
                              n=n, L1=R, L2=1.0, kappa1=1.0 / R, kappa2=0.0,
                              r11_dot_r2=0.0, r12_dot_r2=0.0,
                              r22_dot_r1=0.0, r12_dot_r1=0.0)
        return BoundaryChart(surface, at)

    if surface == "sphere":
        R = float(kw["R"])
        if R <= 0:
            raise ConfigurationError("sphere radius must be positive")

        def at(th, ph, R=R):
            st, ct = math.sin(th), math.cos(th)
            sp, cp = math.sin(ph), math.cos(ph)
            if abs(st) < 1e-12:
                raise DomainError("polar chart degenerates at the poles")
            r = R * np.array([st * cp, st * sp, ct])
            s1 = np.array([ct * cp, ct * sp, -st])
            s2 = np.array([-sp, cp, 0.0])
            n = r / R
            return ChartPoint(r=r, s1=s1, s2=s2, n=n, L1=R, L2=R * st,
                              kappa1=1.0 / R, kappa2=1.0 / R,
                              r11_dot_r2=0.0,
                              r12_dot_r2=R * R * st * ct,
                              r22_dot_r1=-R * R * st * ct,
                              r12_dot_r1=0.0)
        return BoundaryChart(surface, at)

    raise ConfigurationError(f"unsupported surface '{surface}'")


@dataclass
class TransportCoefficients:
    """Coefficient functions of the wall-coordinate transport operator."""

    chart: BoundaryChart
    eps: float | None = None     # when set, the normal variable is eta = n/eps

    def coefficients(self, iota1: float, iota2: float, n: float,
                     fv: np.ndarray) -> dict:
        """Coefficients of (d_n|d_eta, d_veta, d_vphi, d_vpsi, d_i1, d_i2).

        `n` is the wall distance (or eta when eps is set); `fv` the frame
        velocity (v_eta, v_phi, v_psi).
        """
        cp = self.chart.at(iota1, iota2)
        depth = n * self.eps if self.eps is not None else n
        self.chart.check_validity(cp, depth)
        veta, vphi, vpsi = float(fv[0]), float(fv[1]), float(fv[2])
        L1, L2 = cp.L1, cp.L2
        # g_i = 1/(R_i - depth) written curvature-first for exact flat limits
        g1 = cp.kappa1 / (1.0 - cp.kappa1 * depth)
        g2 = cp.kappa2 / (1.0 - cp.kappa2 * depth)
        # h_i = R_i / (L_i (R_i - depth)) = 1 / (L_i (1 - kappa_i depth))
        h1 = 1.0 / (L1 * (1.0 - cp.kappa1 * depth))
        h2 = 1.0 / (L2 * (1.0 - cp.kappa2 * depth))
        c = {
            "d_n": veta / self.eps if self.eps is not None else veta,
            "d_veta": -g1 * vphi ** 2 - g2 * vpsi ** 2,
            "d_vphi": (g1 * veta * vphi
                       - (cp.r11_dot_r2 * h1 / (L1 * L2)) * vphi * vpsi
                       - (cp.r12_dot_r2 * h2 / (L1 * L2)) * vpsi ** 2),
            "d_vpsi": (g2 * veta * vpsi
                       - (cp.r22_dot_r1 * h2 / (L1 * L2)) * vphi * vpsi
                       - (cp.r12_dot_r1 * h1 / (L1 * L2)) * vphi ** 2),
            "d_iota1": -h1 * vphi,
            "d_iota2": -h2 * vpsi,
        }
        return c

    def apply(self, F: Callable, iota1: float, iota2: float, n: float,
              fv: np.ndarray, step: float = 1e-5) -> float:
        """Apply the operator to F(iota1, iota2, n, fv) by central differences."""
        c = self.coefficients(iota1, iota2, n, fv)
        fv = np.asarray(fv, dtype=float)

        def d(fun, x0, h):
            return (fun(x0 + h) - fun(x0 - h)) / (2.0 * h)

        out = c["d_n"] * d(lambda t: F(iota1, iota2, t, fv), n, step)
        out += c["d_iota1"] * d(lambda t: F(t, iota2, n, fv), iota1, step)
        out += c["d_iota2"] * d(lambda t: F(iota1, t, n, fv), iota2, step)
        for idx, name in enumerate(("d_veta", "d_vphi", "d_vpsi")):
            def fshift(t, idx=idx):
                w = fv.copy()
                w[idx] = t
                return F(iota1, iota2, n, w)
            out += c[name] * d(fshift, fv[idx], step)
        return out


def transport_operator(chart: BoundaryChart, eps: float | None = None) \
        -> TransportCoefficients:
    if eps is not None and not eps > 0:
        raise ConfigurationError("eps must be positive when given")
    return TransportCoefficients(chart=chart, eps=eps)


def validate_chart(chart: BoundaryChart, f: Callable, samples,
                   step: float = 1e-5) -> float:
    """Max |chart transport - Cartesian transport| of f(x, v) over samples.

    `f` takes Cartesian (x, v); samples are (iota1, iota2, n, v_cartesian).
    """
    op = transport_operator(chart)
    worst = 0.0
    for (i1, i2, n, v) in samples:
        cp = chart.at(i1, i2)
        chart.check_validity(cp, n)
        v = np.asarray(v, dtype=float)
        x = cp.r - n * cp.n

        def F(j1, j2, m, fv):
            cq = chart.at(j1, j2)
            return f(cq.r - m * cq.n, chart.cartesian_velocity(cq, fv))

        fv0 = chart.frame_velocity(cp, v)
        lhs = op.apply(F, i1, i2, n, fv0, step=step)
        rhs = 0.0
        for a in range(3):
            e = np.zeros(3)
            e[a] = step
            rhs += v[a] * (f(x + e, v) - f(x - e, v)) / (2.0 * step)
        worst = max(worst, abs(lhs - rhs))
    return worst
