"""Exact hyperbolic plane geometry in the Poincare disk model.

Isometries are unit-determinant pairs (a, c) acting by
z -> (a z + c) / (conj(c) z + conj(a)), the SU(1,1) picture of the
orientation-preserving isometry group of the disk.  Busemann functions,
Gromov products and the boundary metric all come from the Poisson-kernel
closed form; the sign convention makes horoballs sup-level sets.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

EPS_DISK = 1e-12
EPS_NORM = 1e-10
EPS_BUSE = 1e-8
EPS_CLASS = 1e-8
RENORM_EVERY = 64

TWO_PI = 2.0 * math.pi


def norm_angle(theta: float) -> float:
    """Normalize an angle to [0, 2*pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


@dataclass(frozen=True)
class DiskPoint:
    """Point of the open unit disk."""

    z: complex

    def __post_init__(self):
        if abs(self.z) >= 1.0 - EPS_DISK:
            raise ValueError(f"point outside the open disk: |z|={abs(self.z)!r}")

    @property
    def conformal_factor(self) -> float:
        return 1.0 - abs(self.z) ** 2


ORIGIN = DiskPoint(0j)


@dataclass(frozen=True)
class BoundaryPoint:
    """Point of the boundary circle, stored as an angle in [0, 2*pi)."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", norm_angle(float(self.theta)))

    @property
    def unit(self) -> complex:
        return cmath.exp(1j * self.theta)

    def close_to(self, other: "BoundaryPoint", eps: float = 1e-9) -> bool:
        d = abs(norm_angle(self.theta - other.theta))
        return d < eps or TWO_PI - d < eps


PointLike = Union[DiskPoint, BoundaryPoint]


@dataclass(frozen=True)
class Isometry:
    """Moebius transformation z -> (a z + c)/(conj(c) z + conj(a)).

    The pair is kept with |a|^2 - |c|^2 = 1 up to EPS_NORM; renormalize()
    projects back onto the constraint after long composition chains.
    """

    a: complex
    c: complex

    @staticmethod
    def identity() -> "Isometry":
        return Isometry(1.0 + 0j, 0j)

    @property
    def det(self) -> float:
        return abs(self.a) ** 2 - abs(self.c) ** 2

    @property
    def trace(self) -> float:
        # trace of [[a, c], [conj(c), conj(a)]] is real
        return 2.0 * self.a.real

    def renormalize(self) -> "Isometry":
        d = self.det
        if d <= 0.0:
            raise ValueError("degenerate isometry, det <= 0")
        s = 1.0 / math.sqrt(d)
        return Isometry(self.a * s, self.c * s)

    def compose(self, other: "Isometry") -> "Isometry":
        a1, c1 = self.a, self.c
        a2, c2 = other.a, other.c
        return Isometry(a1 * a2 + c1 * c2.conjugate(), a1 * c2 + c1 * a2.conjugate())

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return self.compose(other)

    def inverse(self) -> "Isometry":
        return Isometry(self.a.conjugate(), -self.c)

    def classify(self, eps: float = EPS_CLASS) -> str:
        if abs(self.a - 1.0) < eps and abs(self.c) < eps:
            return "identity"
        t = abs(self.trace)
        if abs(t - 2.0) < eps:
            return "parabolic"
        return "elliptic" if t < 2.0 else "hyperbolic"

    def is_parabolic(self, eps: float = EPS_CLASS) -> bool:
        return self.classify(eps) == "parabolic"

    def apply_complex(self, z: complex) -> complex:
        return (self.a * z + self.c) / (self.c.conjugate() * z + self.a.conjugate())

    def apply_angle(self, theta):
        """Boundary action on angles; accepts scalars or ndarrays."""
        a, c = self.a, self.c
        u = np.exp(1j * np.asarray(theta))
        w = (a * u + c) / (np.conjugate(c) * u + np.conjugate(a))
        out = np.angle(w) % TWO_PI
        if np.isscalar(theta) or np.asarray(theta).ndim == 0:
            return float(out)
        return out

    def __call__(self, p: PointLike) -> PointLike:
        if isinstance(p, DiskPoint):
            return DiskPoint(self.apply_complex(p.z))
        if isinstance(p, BoundaryPoint):
            return BoundaryPoint(self.apply_angle(p.theta))
        raise TypeError(f"cannot apply isometry to {type(p)!r}")

    def power(self, n: int) -> "Isometry":
        """Integer power; exact for parabolics via (M - s I)^2 = 0."""
        if n == 0:
            return Isometry.identity()
        if n < 0:
            return self.inverse().power(-n)
        if self.is_parabolic():
            s = 1.0 if self.a.real > 0 else -1.0
            na = s * self.a - 1.0
            nc = s * self.c
            sn = 1.0 if (s > 0 or n % 2 == 0) else -1.0
            return Isometry(sn * (1.0 + n * na), sn * n * nc)
        result = Isometry.identity()
        base = self
        k = n
        steps = 0
        while k:
            if k & 1:
                result = result.compose(base)
                steps += 1
            base = base.compose(base)
            steps += 1
            if steps % RENORM_EVERY == 0:
                result = result.renormalize()
                base = base.renormalize()
            k >>= 1
        return result.renormalize()


def compose_many(isos, renorm_every: int = RENORM_EVERY) -> Isometry:
    """Left-to-right product g_1 g_2 ... g_n with periodic renormalization."""
    out = Isometry.identity()
    for k, g in enumerate(isos, 1):
        out = out.compose(g)
        if k % renorm_every == 0:
            out = out.renormalize()
    return out.renormalize()


def hyp_dist(p: DiskPoint, q: DiskPoint) -> float:
    """Hyperbolic distance (curvature -1) between disk points."""
    d2 = abs(p.z - q.z) ** 2
    den = p.conformal_factor * q.conformal_factor
    return math.acosh(1.0 + max(0.0, 2.0 * d2 / den))


def _log_poisson(u: complex, z: complex) -> float:
    # ln[(1-|z|^2)/|u-z|^2] for |u| = 1, |z| < 1
    return math.log(1.0 - abs(z) ** 2) - 2.0 * math.log(abs(u - z))


def busemann(xi: BoundaryPoint, p: DiskPoint, q: DiskPoint) -> float:
    """Busemann cocycle B_xi(p, q) = lim_{z->xi} [d(p, z) - d(q, z)].

    Increases as q moves toward xi, so horoballs are sup-level sets.
    """
    u = xi.unit
    return _log_poisson(u, q.z) - _log_poisson(u, p.z)


def geodesic_apex(x: BoundaryPoint, y: BoundaryPoint) -> DiskPoint:
    """The point of the geodesic (x, y) closest to the origin."""
    ux, uy = x.unit, y.unit
    if abs(ux - uy) < 1e-14:
        raise ValueError("geodesic endpoints coincide")
    s = ux + uy
    if abs(s) < 1e-14:
        return ORIGIN  # diameter
    u = s / abs(s)
    half = 0.5 * abs(cmath.phase(uy / ux))
    # closest point at Euclidean radius cos(phi)/(1+sin(phi))
    r = math.cos(half) / (1.0 + math.sin(half))
    return DiskPoint(u * r)


def gromov_product(x: BoundaryPoint, y: BoundaryPoint, o: DiskPoint = ORIGIN) -> float:
    """(x|y)_o = [B_x(o, z) + B_y(o, z)]/2 for z on the geodesic (x, y)."""
    if x.close_to(y, eps=1e-13):
        raise ValueError("Gromov product of equal boundary points is infinite")
    z = geodesic_apex(x, y)
    return 0.5 * (busemann(x, o, z) + busemann(y, o, z))


def gromov_origin_fast(theta_x, theta_y):
    """(x|y)_{origin} = -ln(|u_x - u_y|/2); vectorized closed form."""
    ux = np.exp(1j * np.asarray(theta_x))
    uy = np.exp(1j * np.asarray(theta_y))
    val = -np.log(np.abs(ux - uy) / 2.0)
    if np.isscalar(theta_x) and np.isscalar(theta_y):
        return float(val)
    return val


def boundary_metric(x: BoundaryPoint, y: BoundaryPoint, kappa: float = 1.0) -> float:
    """Visual metric D(x, y) = exp(-kappa (x|y)_origin), with D(x, x) = 0."""
    if x.close_to(y, eps=1e-15):
        return 0.0
    return math.exp(-kappa * gromov_origin_fast(x.theta, y.theta))


def conformal_derivative(g: Isometry, x: BoundaryPoint, kappa: float = 1.0) -> float:
    """|g'(x)| = exp(-kappa B_x(g^{-1} origin, origin))."""
    q = g.inverse().apply_complex(0j)
    base = (1.0 - abs(q) ** 2) / abs(x.unit - q) ** 2
    return base ** kappa


def conformal_derivative_array(g: Isometry, thetas: np.ndarray, kappa: float = 1.0) -> np.ndarray:
    q = g.inverse().apply_complex(0j)
    u = np.exp(1j * thetas)
    base = (1.0 - abs(q) ** 2) / np.abs(u - q) ** 2
    return base ** kappa


def parabolic_from_points(xi: BoundaryPoint, eta_prev: BoundaryPoint,
                          eta_next: BoundaryPoint) -> Isometry:
    """The unique parabolic fixing xi that maps eta_prev to eta_next.

    Built by conjugating a half-plane translation through the Cayley-type
    map C(z) = i (xi + z)/(xi - z), which sends xi to infinity.
    """
    pts = (xi, eta_prev, eta_next)
    for i in range(3):
        for j in range(i + 1, 3):
            if pts[i].close_to(pts[j], eps=1e-12):
                raise ValueError("parabolic_from_points needs pairwise distinct points")
    u = xi.unit
    C = np.array([[1j, 1j * u], [-1.0, u]], dtype=complex)
    Cinv = np.linalg.inv(C)

    def to_line(b: BoundaryPoint) -> float:
        w = (C[0, 0] * b.unit + C[0, 1]) / (C[1, 0] * b.unit + C[1, 1])
        return w.real

    t = to_line(eta_next) - to_line(eta_prev)
    T = np.array([[1.0, t], [0.0, 1.0]], dtype=complex)
    M = Cinv @ T @ C
    M = M / np.sqrt(np.linalg.det(M))
    a = 0.5 * (M[0, 0] + np.conjugate(M[1, 1]))
    c = 0.5 * (M[0, 1] + np.conjugate(M[1, 0]))
    sym_defect = max(abs(M[0, 0] - np.conjugate(M[1, 1])), abs(M[0, 1] - np.conjugate(M[1, 0])))
    if sym_defect > 1e-8:
        raise ValueError(f"conjugated matrix is not an SU(1,1) pair (defect {sym_defect:g})")
    g = Isometry(complex(a), complex(c)).renormalize()
    if not g.is_parabolic(eps=1e-7):
        raise ValueError(f"constructed isometry is not parabolic (|trace|={abs(g.trace)!r})")
    if not g(xi).close_to(xi, 1e-8) or not g(eta_prev).close_to(eta_next, 1e-8):
        raise ValueError("parabolic constraint system not satisfied")
    return g


@dataclass(frozen=True)
class Horoball:
    """Horoball {z : B_base(origin, z) >= t}; internally a Euclidean disk
    tangent to the unit circle at base."""

    base: BoundaryPoint
    t: float

    @property
    def euclidean_radius(self) -> float:
        return 1.0 / (1.0 + math.exp(self.t))

    @property
    def euclidean_center(self) -> complex:
        return (1.0 - self.euclidean_radius) * self.base.unit

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return abs(z - self.euclidean_center) <= self.euclidean_radius + slack

    def level(self, p: DiskPoint) -> float:
        """Height of p above the bounding horosphere (negative outside)."""
        return busemann(self.base, ORIGIN, p) - self.t


def translate_horoball(g: Isometry, h: Horoball) -> Horoball:
    """Image g.H as a horoball at g.base."""
    new_base = g(h.base)
    shift = busemann(new_base, ORIGIN, DiskPoint(g.apply_complex(0j)))
    return Horoball(new_base, h.t + shift)


# ---------------------------------------------------------------------------
# geodesic segments and horoball intersections


def _geodesic_support(p: DiskPoint, q: DiskPoint):
    """Support of the geodesic through p, q.

    Returns ('segment',) when the geodesic is a diameter chord, else
    ('arc', w, r) for the circle of center w, radius r orthogonal to S^1.
    """
    zp, zq = p.z, q.z
    # B_x(p) system: 2 Re(conj(z) w) = |z|^2 + 1 for z in {p, q}
    a11, a12 = zp.real, zp.imag
    a21, a22 = zq.real, zq.imag
    det = a11 * a22 - a12 * a21
    if abs(det) < 1e-13 * max(1.0, abs(zp), abs(zq)):
        return ("segment",)
    b1 = 0.5 * (abs(zp) ** 2 + 1.0)
    b2 = 0.5 * (abs(zq) ** 2 + 1.0)
    wx = (b1 * a22 - b2 * a12) / det
    wy = (a11 * b2 - a21 * b1) / det
    w = complex(wx, wy)
    r = math.sqrt(max(abs(w) ** 2 - 1.0, 0.0))
    return ("arc", w, r)


def _circle_circle_crossings(w: complex, r: float, c: complex, rho: float):
    """Intersection points of circles (w, r) and (c, rho)."""
    d = abs(c - w)
    if d < 1e-15:
        return []
    a = (r * r - rho * rho + d * d) / (2.0 * d)
    h2 = r * r - a * a
    if h2 <= 0.0:
        return []
    h = math.sqrt(h2)
    u = (c - w) / d
    base = w + a * u
    off = h * u * 1j
    return [base + off, base - off]


def geodesic_horoball_intersection(
    p: DiskPoint, q: DiskPoint, h: Horoball
) -> Optional[Tuple[DiskPoint, DiskPoint]]:
    """Sub-segment of the geodesic arc [p, q] inside the horoball.

    Entry precedes exit in the p -> q orientation; returns None when the
    arc avoids the horoball.  Horoballs are convex, so the intersection is
    a single segment.
    """
    c, rho = h.euclidean_center, h.euclidean_radius

    def inside(z: complex) -> bool:
        return abs(z - c) < rho

    support = _geodesic_support(p, q)
    if support[0] == "segment":
        zp, zq = p.z, q.z
        dz = zq - zp
        L2 = abs(dz) ** 2
        if L2 < 1e-30:
            return (p, q) if inside(zp) else None
        # |zp + s dz - c|^2 = rho^2
        f = zp - c
        A = L2
        B = 2.0 * (f.real * dz.real + f.imag * dz.imag)
        Cq = abs(f) ** 2 - rho * rho
        disc = B * B - 4.0 * A * Cq
        crossings = []
        if disc > 0.0:
            rt = math.sqrt(disc)
            crossings = sorted(((-B - rt) / (2 * A), (-B + rt) / (2 * A)))
        param = lambda s: zp + s * dz
        ss = [s for s in crossings if 0.0 < s < 1.0]
    else:
        _, w, r = support
        phi_p = cmath.phase(p.z - w)
        phi_q = cmath.phase(q.z - w)
        dphi = (phi_q - phi_p) % TWO_PI
        if dphi > math.pi:
            dphi -= TWO_PI
        # the inside-the-disk arc is the shorter one (|dphi| < pi here since
        # an orthogonal circle meets the unit disk in an arc of angle < pi)
        param = lambda s: w + r * cmath.exp(1j * (phi_p + s * dphi))
        ss = []
        for z in _circle_circle_crossings(w, r, c, rho):
            s = ((cmath.phase(z - w) - phi_p) % TWO_PI) / dphi if dphi > 0 else \
                (-((phi_p - cmath.phase(z - w)) % TWO_PI)) / dphi
            # normalize: s in [0, 1] iff crossing lies on the arc
            if dphi < 0:
                s = ((phi_p - cmath.phase(z - w)) % TWO_PI) / (-dphi)
            if 1e-12 < s < 1.0 - 1e-12:
                ss.append(s)
        ss.sort()

    in_p = inside(p.z)
    in_q = inside(q.z)
    if in_p and in_q:
        return (p, q)
    if in_p:
        if not ss:
            return (p, q)  # q on boundary within tolerance
        return (p, DiskPoint(param(ss[0])))
    if in_q:
        if not ss:
            return (DiskPoint(param(0.0)), q) if inside(param(0.0)) else (p, q)
        return (DiskPoint(param(ss[-1])), q)
    if len(ss) >= 2:
        mid = param(0.5 * (ss[0] + ss[1]))
        if inside(mid):
            return (DiskPoint(param(ss[0])), DiskPoint(param(ss[1])))
    return None


def point_on_ray(xi: BoundaryPoint, dist: float) -> DiskPoint:
    """Point at hyperbolic distance `dist` from the origin toward xi."""
    return DiskPoint(math.tanh(0.5 * dist) * xi.unit)
