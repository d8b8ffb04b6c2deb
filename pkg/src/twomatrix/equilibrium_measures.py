"""Measures, fields and potentials of the vector equilibrium problem.

For each xi the measures mu_j^xi live on the sets Gamma_j(xi), where the
j-th and (j+1)-th modulus-ordered roots of the spectral curve have equal
modulus. Their density is the jump of w'/w across the set divided by 2 pi
(with an extra factor 1/2 in the two-cut regime). On the set the two
boundary values are exactly the two equal-modulus roots, so the jump is
evaluated directly as |g_j - g_{j+1}| with g = w'/w, rather than through a
displaced solve.

Averaging over xi in (0, 1) gives nu_1, nu_2, nu_3, the minimisers of the
vector equilibrium problem with external fields V1, V3 and the upper
constraint sigma on the imaginary axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import AxisError, BranchPointError, ConstraintError, RegimeError, SelectionError
from .quadrature import Piece, cos_rule, gauss_legendre01, half_axis_pieces
from .spectral_curve import (
    ModelParams,
    axis_coordinate,
    endpoints,
    onecut_abc,
    sheet_roots,
    xi_star_array,
)

TWO_PI = 2.0 * math.pi
MASSES = {1: 1.0, 2: 2.0 / 3.0, 3: 1.0 / 3.0}
AXIS = {1: "real", 2: "imaginary", 3: "real"}

# Gauss-Legendre nodes per xi-panel and per spatial panel
N_XI = 40
N_SPACE = 40

# beyond this distance densities on unbounded sets follow their s^(-5/3) law;
# solving the quartic directly there loses the small roots to cancellation
S_ASYMPTOTIC = 1e6
# allowed excess of the middle measure over the constraint; the computed nu2
# carries evaluation noise of a few 1e-8 next to the double branch point
# at gamma(xi_cr), where it touches the constraint
CONSTRAINT_TOL = 1e-7


# ---------------------------------------------------------------------------
# omega roots, external fields, constraint
# ---------------------------------------------------------------------------

def _cubic_roots(t: float, rhs) -> np.ndarray:
    """Roots of w^3 + t w - rhs = 0 for an array of rhs, shape (..., 3)."""
    rhs = np.asarray(rhs)
    dtype = complex if np.iscomplexobj(rhs) else float
    comp = np.zeros(rhs.shape + (3, 3), dtype=dtype)
    comp[..., 0, 1] = -t
    comp[..., 0, 2] = rhs
    comp[..., 1, 0] = 1.0
    comp[..., 2, 1] = 1.0
    w = np.linalg.eigvals(comp).astype(complex)
    r = rhs[..., None]
    for _ in range(2):
        f = w**3 + t * w - r
        df = 3.0 * w * w + t
        ok = np.abs(df) > 1e-14
        w = np.where(ok, w - f / np.where(ok, df, 1.0), w)
    return w


def omega1_real(p: ModelParams, x) -> np.ndarray:
    """omega_1(x) on the real line: the real root of largest modulus."""
    x = np.asarray(x, dtype=float)
    w = _cubic_roots(p.t, p.tau * np.abs(x))
    # exactly one positive root for |x| > 0; at x = 0 the x -> 0+ limit
    pos = np.max(np.where(np.abs(w.imag) < 1e-7 * (1 + np.abs(w)), w.real, -np.inf), axis=-1)
    pos = np.maximum(pos, 0.0)
    return np.where(x < 0, -pos, pos)


def omega1_imag(p: ModelParams, y) -> np.ndarray:
    """omega_1(iy): the root with the largest real part."""
    y = np.asarray(y, dtype=float)
    w = _cubic_roots(p.t, 1j * p.tau * y)
    idx = np.argmax(w.real, axis=-1)
    return np.take_along_axis(w, idx[..., None], axis=-1)[..., 0]


@dataclass(frozen=True)
class OmegaRoots:
    point: complex
    omega1: complex
    omega2: float | None = None
    omega3: float | None = None


def omega_roots(p: ModelParams, point) -> OmegaRoots:
    """Solutions of w^3 + t w = tau z with the selection used for the fields."""
    z = complex(point)
    if z.imag == 0.0:
        x = z.real
        w1 = float(omega1_real(p, x))
        roots = _cubic_roots(p.t, p.tau * abs(x))
        real = np.abs(roots.imag) < 1e-7 * (1 + np.abs(roots))
        if p.t < 0 and abs(x) <= p.x_star and real.all():
            neg = np.sort(roots.real)[:2]  # omega2 < omega3 <= 0 for x >= 0
            sgn = -1.0 if x < 0 else 1.0
            return OmegaRoots(z, w1, sgn * float(neg[0]), sgn * float(neg[1]))
        return OmegaRoots(z, w1)
    if z.real == 0.0:
        y = z.imag
        if p.t > 0 and abs(y) < p.y_star:
            raise SelectionError("no root with positive real part inside (-i y*, i y*)")
        return OmegaRoots(z, complex(omega1_imag(p, y)))
    raise AxisError("omega roots are defined on the real and imaginary axes")


def v1_field(p: ModelParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    w = omega1_real(p, x)
    return x * x / 2.0 - 0.75 * w**4 - 0.5 * p.t * w * w


def v3_field(p: ModelParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    if p.t >= 0:
        return out
    inside = np.abs(x) < p.x_star
    if np.any(inside):
        roots = _cubic_roots(p.t, p.tau * np.abs(x[inside])).real
        roots = np.sort(roots, axis=-1)
        w2, w3 = roots[..., 0], roots[..., 1]
        g = lambda w: 0.75 * w**4 + 0.5 * p.t * w * w  # noqa: E731
        out[inside] = g(w2) - g(w3)
    return out


def external_field(p: ModelParams, which: Literal["V1", "V3"], x) -> float | np.ndarray:
    fn = {"V1": v1_field, "V3": v3_field}[which]
    out = fn(p, x)
    return float(out) if np.ndim(out) == 0 else out


def sigma_density_array(p: ModelParams, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    w = omega1_imag(p, y)
    dens = p.tau / math.pi * np.maximum(w.real, 0.0)
    return np.where(np.abs(y) < p.y_star, 0.0, dens)


def sigma_density(p: ModelParams, z) -> float:
    y = axis_coordinate(z, "imaginary")
    return float(sigma_density_array(p, y))


# ---------------------------------------------------------------------------
# per-xi densities
# ---------------------------------------------------------------------------

def _point(coord, j: int):
    coord = np.asarray(coord, dtype=float)
    return 1j * coord if j == 2 else coord


def cut_density(p: ModelParams, xi, coord, j: int) -> np.ndarray:
    """kappa |g_j - g_{j+1}| / 2 pi with g = w'/w, without a membership test.

    Only meaningful for points on Gamma_j(xi); kappa is 1/2 in the two-cut
    regime and 1 otherwise.
    """
    xi = np.asarray(xi, dtype=float)
    coord = np.asarray(coord, dtype=float)
    r = np.abs(coord)
    far = r > S_ASYMPTOTIC
    c_eval = np.where(far, np.sign(coord) * S_ASYMPTOTIC, coord)
    w, dw = sheet_roots(p, xi, _point(c_eval, j))
    g = dw / w
    kappa = np.where(np.broadcast_to(xi, g.shape[:-1]) < p.xi_cr, 0.5, 1.0)
    dens = kappa * np.abs(g[..., j - 1] - g[..., j]) / TWO_PI
    return np.where(far, dens * (S_ASYMPTOTIC / np.maximum(r, S_ASYMPTOTIC)) ** (5.0 / 3.0), dens)


def _inside(e: dict, r: np.ndarray, j: int) -> np.ndarray:
    if j == 1:
        return (e["beta"] <= r) & (r <= e["alpha"])
    if j == 2:
        return r >= e["gamma"]
    return r >= e["delta"]


def _at_endpoint(e: dict, r: np.ndarray, j: int) -> np.ndarray:
    keys = {1: ("alpha", "beta"), 2: ("gamma",), 3: ("delta",)}[j]
    hit = np.zeros(r.shape, dtype=bool)
    for k in keys:
        end = e[k]
        # the origin is a regular point of the undoubled density
        hit |= (np.abs(r - end) <= 1e-14 * (1.0 + r)) & (end > 0)
    return hit


def mu_density_array(p: ModelParams, xi: float, j: int, coord) -> np.ndarray:
    """Density of mu_j^xi per unit length at axis coordinates ``coord``."""
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    if not xi > 0:
        raise ValueError("xi must be positive")
    coord = np.atleast_1d(np.asarray(coord, dtype=float))
    r = np.abs(coord)
    e = {k: v[0] for k, v in endpoints(p, xi).items()}
    if np.any(_at_endpoint(e, r, j)):
        raise BranchPointError("density is singular at a branch point")
    out = np.zeros_like(r)
    inside = _inside(e, r, j)
    if np.any(inside):
        # the origin is a branch point of the doubled curve; use the limit
        rr = np.where(r[inside] == 0.0, 1e-9 * (1.0 + e["alpha"]), r[inside])
        out[inside] = cut_density(p, xi, rr, j)
    return out


def mu_density(p: ModelParams, xi: float, j: int, point) -> float:
    coord = axis_coordinate(point, AXIS[j])
    return float(mu_density_array(p, xi, j, coord)[0])


# ---------------------------------------------------------------------------
# integrals over xi
# ---------------------------------------------------------------------------

def _specials(p: ModelParams) -> list[float]:
    return sorted(s for s in {p.xi_cr, p.ray} if s > 0)


def _xi_rule(p: ModelParams, lo: np.ndarray, hi: np.ndarray, n: int, log_left: bool = False,
             singular: Literal["lo", "hi"] | None = None):
    """Composite rule over [lo, hi] per row, split at xi_cr and -t tau^2.

    Every panel uses the cosine map, which absorbs square-root behaviour at
    either end. With ``log_left`` the first panel is split again and its left
    half uses xi = lo + h v^4 to absorb a logarithmic singularity at lo.

    ``singular`` names the end carrying an inverse square-root singularity.
    When a split point lies close to that end, the neighbouring panel sees
    the singularity from just outside; extra breaks at geometrically growing
    distances keep every panel no longer than a few times its distance to it.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.maximum(np.asarray(hi, dtype=float), lo)
    specials = [np.clip(s, lo, hi) for s in _specials(p)]
    extra = []
    if singular is not None and specials:
        end = hi if singular == "hi" else lo
        gaps = [np.where((sp > lo) & (sp < hi), np.abs(sp - end), np.inf) for sp in specials]
        delta = np.min(gaps, axis=0)
        finite = np.isfinite(delta)
        direction = -1.0 if singular == "hi" else 1.0
        for k in range(1, 13):
            pt = end + direction * np.where(finite, delta, 0.0) * 3.0**k
            extra.append(np.clip(pt, lo, hi))
    inner = np.sort(np.stack(specials + extra, axis=-1), axis=-1) if specials or extra else None
    edges = [lo] + ([inner[..., i] for i in range(inner.shape[-1])] if inner is not None else []) + [hi]
    nodes, weights = [], []
    for k, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        if k == 0 and log_left:
            m = 0.5 * (a + b)
            v, w = gauss_legendre01(n)
            h = (m - a)[..., None]
            nodes.append(a[..., None] + h * v**4)
            weights.append(h * 4.0 * v**3 * w)
            a = m
        s, w = cos_rule(a, b, n)
        nodes.append(s)
        weights.append(w)
    return np.concatenate(nodes, axis=-1), np.concatenate(weights, axis=-1)


def _integrate_xi(integrand: Callable, coord: np.ndarray, xi: np.ndarray, wts: np.ndarray) -> np.ndarray:
    out = np.zeros(coord.shape)
    active = wts > 0
    rows = np.any(active, axis=-1)
    if not np.any(rows):
        return out
    cc = np.broadcast_to(coord[:, None], xi.shape)[active]
    vals = integrand(xi[active], cc)
    full = np.zeros(xi.shape)
    full[active] = vals
    return np.sum(full * wts, axis=-1)


def nu_density_array(p: ModelParams, j: int, coord, n: int = N_XI, upper: float = 1.0) -> np.ndarray:
    """Average of mu_j^xi over xi in (0, upper] at axis coordinates ``coord``."""
    coord = np.atleast_1d(np.asarray(coord, dtype=float))
    r = np.abs(coord)
    r = np.where(r == 0.0, 1e-9, r)
    xs = xi_star_array(p, r, j)
    if j == 2:
        lo = np.zeros_like(r)
        hi = np.minimum(xs, upper)
    else:
        lo = np.minimum(xs, upper)
        hi = np.full_like(r, upper)
    xi, w = _xi_rule(p, lo, hi, n, singular="hi" if j == 2 else "lo")
    return _integrate_xi(lambda x, c: cut_density(p, x, c, j), r, xi, w)


def nu_density(p: ModelParams, j: int, point) -> float:
    coord = axis_coordinate(point, AXIS[j])
    return float(nu_density_array(p, j, coord)[0])


def sigma_tilde_array(p: ModelParams, y, n: int = N_XI) -> np.ndarray:
    """Integral of mu_2^xi(iy) over all xi > 0."""
    return nu_density_array(p, 2, y, n=n, upper=np.inf)


def sigma_tilde_density(p: ModelParams, z) -> float:
    y = axis_coordinate(z, "imaginary")
    return float(sigma_tilde_array(p, y)[0])


def _log_ratio(p: ModelParams, xi, x, j: int) -> np.ndarray:
    w, _ = sheet_roots(p, xi, x)
    kappa = np.where(xi < p.xi_cr, 0.5, 1.0)
    return kappa * np.log(np.abs(w[..., j - 1] / w[..., j]))


def integrated_field_array(p: ModelParams, which: Literal["V1tilde", "V3tilde"], x, n: int = N_XI) -> np.ndarray:
    """xi-integral of log|w_j / w_{j+1}| over the xi for which x is off Gamma_j."""
    j = {"V1tilde": 1, "V3tilde": 3}[which]
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = np.where(np.abs(x) == 0.0, 1e-9, np.abs(x))
    xs = xi_star_array(p, r, j)
    lo = np.zeros_like(r)
    xi, w = _xi_rule(p, lo, xs, n, log_left=True)
    return _integrate_xi(lambda a, c: _log_ratio(p, a, c, j), r, xi, w)


def integrated_field(p: ModelParams, which: Literal["V1tilde", "V3tilde"], x) -> float | np.ndarray:
    out = integrated_field_array(p, which, x)
    return float(out[0]) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# F and G functions
# ---------------------------------------------------------------------------

def fg_function(p: ModelParams, xi: float, z, j: int, kind: Literal["F", "G"]) -> complex:
    """F_j = z - tau^2 a/w_j - w_j (one-cut) or G_j = z xi/(w_j + xi) (two-cut)."""
    if j not in (1, 2, 3, 4):
        raise IndexError("j must be in 1..4")
    z = complex(z)
    if kind == "F":
        if not xi > p.xi_cr:
            raise RegimeError("F is defined for xi above the critical value")
        a = float(onecut_abc(p, xi)[0])
        w, _ = sheet_roots(p, xi, z)
        wj = complex(w[j - 1])
        return z - p.tau2 * a / wj - wj
    if kind == "G":
        if not (p.t < p.tau2 and 0 < xi < p.xi_cr):
            raise RegimeError("G is defined for t < tau^2 and 0 < xi < xi_cr")
        w, _ = sheet_roots(p, xi, z)
        return z * xi / (complex(w[j - 1]) + xi)
    raise ValueError("kind must be 'F' or 'G'")


# ---------------------------------------------------------------------------
# sampled measures and their potentials
# ---------------------------------------------------------------------------

@dataclass
class MeasureDensity:
    """A measure on the real or imaginary axis stored on quadrature panels.

    ``parts`` holds (piece, sign, factor): the piece's density is placed at
    coordinate sign*s and multiplied by factor. Symmetric measures carry every
    piece twice, once with each sign.
    """

    axis: Literal["real", "imaginary"]
    parts: list = field(default_factory=list)
    declared_mass: float | None = None
    label: str = ""

    @classmethod
    def symmetric(cls, axis, pieces: Sequence[Piece], declared_mass=None, label="") -> "MeasureDensity":
        parts = [(pc, s, 1.0) for pc in pieces for s in (1.0, -1.0)]
        return cls(axis, parts, declared_mass, label)

    # -- sampling ---------------------------------------------------------
    @property
    def grid(self) -> np.ndarray:
        g = np.concatenate([sg * pc.s for pc, sg, _ in self.parts])
        return np.unique(g)

    @property
    def values(self) -> np.ndarray:
        return self.density(self.grid)

    def density(self, coord) -> np.ndarray:
        coord = np.atleast_1d(np.asarray(coord, dtype=float))
        out = np.zeros_like(coord)
        for pc, sg, fac in self.parts:
            s = sg * coord
            hi = pc.b if pc.kind == "cos" else np.inf
            m = (s >= pc.a) & (s <= hi)
            if np.any(m):
                v = pc.inverse(s[m])
                _, jac = pc.map(v)
                with np.errstate(divide="ignore", invalid="ignore"):
                    val = fac * pc.f_at(v) / jac
                out[m] += np.where(np.isfinite(val), val, 0.0)
        return out

    # -- integrals --------------------------------------------------------
    def mass(self) -> float:
        return float(sum(fac * np.dot(pc.vw, pc.f) for pc, _, fac in self.parts))

    def mass_between(self, lo: float, hi: float) -> float:
        total = 0.0
        for pc, sg, fac in self.parts:
            a, b = (lo, hi) if sg > 0 else (-hi, -lo)
            total += fac * pc.integral(a, b)
        return float(total)

    def cdf(self, coord) -> np.ndarray:
        coord = np.atleast_1d(np.asarray(coord, dtype=float))
        return np.array([self.mass_between(-np.inf, c) for c in coord])

    def integrate(self, fn: Callable) -> float:
        """Integral of fn(coordinate) against the measure."""
        total = 0.0
        for pc, sg, fac in self.parts:
            total += fac * float(np.dot(pc.vw * pc.f, fn(sg * pc.s)))
        return total

    def _zeta(self, z) -> complex:
        z = complex(z)
        return z if self.axis == "real" else -1j * z

    def potential(self, z) -> float:
        """-int log|z - s| dm(s)."""
        zeta = self._zeta(z)
        return -sum(fac * pc.log_integral(sg * zeta) for pc, sg, fac in self.parts)

    def potential_array(self, zs) -> np.ndarray:
        return np.array([self.potential(z) for z in np.atleast_1d(zs)])

    # -- algebra ----------------------------------------------------------
    def scaled(self, c: float) -> "MeasureDensity":
        mass = None if self.declared_mass is None else c * self.declared_mass
        return MeasureDensity(self.axis, [(pc, s, c * f) for pc, s, f in self.parts], mass, self.label)

    def __add__(self, other: "MeasureDensity") -> "MeasureDensity":
        if other.axis != self.axis:
            raise AxisError("cannot add measures on different axes")
        mass = None
        if self.declared_mass is not None and other.declared_mass is not None:
            mass = self.declared_mass + other.declared_mass
        return MeasureDensity(self.axis, self.parts + other.parts, mass, self.label)

    def reflected(self) -> "MeasureDensity":
        return MeasureDensity(self.axis, [(pc, -s, f) for pc, s, f in self.parts],
                              self.declared_mass, self.label)


def log_potential(m: MeasureDensity, z) -> float:
    return m.potential(z)


def measure_from_function(axis, pieces: Sequence[Piece], rho: Callable, declared_mass=None,
                          label="", symmetric=True) -> MeasureDensity:
    """Sample a density function on the nodes of ``pieces``."""
    for pc in pieces:
        pc.set_density(np.maximum(rho(pc.s), 0.0))
    if symmetric:
        return MeasureDensity.symmetric(axis, pieces, declared_mass, label)
    return MeasureDensity(axis, [(pc, 1.0, 1.0) for pc in pieces], declared_mass, label)


def _tail_start(values: Sequence[float]) -> float:
    return 2.0 * max([1.0] + [v for v in values if np.isfinite(v)])


def mu_measure(p: ModelParams, xi: float, j: int, n: int = N_SPACE) -> MeasureDensity:
    """mu_j^xi sampled on panels adapted to its support."""
    e = {k: float(v[0]) for k, v in endpoints(p, xi).items()}
    # geometric grading toward the inner end absorbs the cube-root
    # behaviour that appears where three roots meet
    if j == 1:
        lo, hi = e["beta"], e["alpha"]
        graded = [lo + (hi - lo) * 10.0**-k for k in range(1, 7)]
        pieces = half_axis_pieces([lo, *graded, hi], n)
    else:
        lo = e["gamma"] if j == 2 else e["delta"]
        R = _tail_start([lo, e["alpha"]])
        inner = [s for s in (e["beta"], e["alpha"]) if lo < s < R]
        first = (inner + [R])[0]
        graded = [lo + (first - lo) * 10.0**-k for k in range(1, 7)]
        pieces = half_axis_pieces([lo, *graded, *inner, R], n, tail_from=R)
    rho = lambda s: cut_density(p, xi, np.where(s == 0.0, 1e-9, s), j)  # noqa: E731
    return measure_from_function(AXIS[j], pieces, rho, MASSES[j], f"mu{j}")


def nu_breaks(p: ModelParams, j: int) -> tuple[list[float], float | None]:
    """Panel boundaries on the half-axis for nu_j, and the start of the tail."""
    sp = [s for s in _specials(p) if s < 1.0]
    e = endpoints(p, np.array([1.0] + sp))
    r0 = p.tau * math.sqrt(p.tau2 - p.t) if p.t < p.tau2 else 0.0
    if j == 1:
        lo, hi = float(e["beta"][0]), float(e["alpha"][0])
        inner = list(e["alpha"][1:]) + list(e["beta"][1:]) + [r0]
        br = [lo] + [b for b in inner if lo < b < hi] + [hi]
        return sorted(br), None
    if j == 3:
        lo = float(e["delta"][0])
        inner = list(e["delta"][1:]) + [p.x_star]
    else:
        lo = p.y_star
        inner = list(e["gamma"])
    R = _tail_start([lo, float(e["alpha"][0])] + inner)
    br = [lo] + [b for b in inner if lo < b < R] + [R]
    return sorted(br), R


def nu_measure(p: ModelParams, j: int, n: int = N_SPACE, n_xi: int = N_XI) -> MeasureDensity:
    br, tail = nu_breaks(p, j)
    pieces = half_axis_pieces(br, n, tail_from=tail)
    rho = lambda s: nu_density_array(p, j, s, n=n_xi)  # noqa: E731
    return measure_from_function(AXIS[j], pieces, rho, MASSES[j], f"nu{j}")


def sigma_measure(p: ModelParams, upto: float, n: int = N_SPACE) -> MeasureDensity:
    """The constraint restricted to |y| <= upto (its total mass is infinite)."""
    br = sorted({p.y_star, max(upto, p.y_star)})
    pieces = half_axis_pieces(br, n)
    return measure_from_function("imaginary", pieces, lambda s: sigma_density_array(p, s),
                                 None, "sigma")


# ---------------------------------------------------------------------------
# Euler-Lagrange residuals
# ---------------------------------------------------------------------------

@dataclass
class ELReport:
    ell: float
    residuals: dict
    margins: dict
    grids: dict
    per_xi_ell: float | None = None
    per_xi_residual: float | None = None

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


@dataclass
class EquilibriumTriple:
    p: ModelParams
    nu1: MeasureDensity
    nu2: MeasureDensity
    nu3: MeasureDensity


def equilibrium_triple(p: ModelParams, n: int = N_SPACE, n_xi: int = N_XI) -> EquilibriumTriple:
    return EquilibriumTriple(p, nu_measure(p, 1, n, n_xi), nu_measure(p, 2, n, n_xi),
                             nu_measure(p, 3, n, n_xi))


def _collar(lo: float, hi: float, count: int, frac: float = 0.02) -> np.ndarray:
    """Points strictly inside (lo, hi), staying ``frac`` of the length away from both ends."""
    d = hi - lo
    return np.linspace(lo + frac * d, hi - frac * d, count)


def default_el_grids(p: ModelParams, count: int = 50) -> dict:
    e = {k: float(v[0]) for k, v in endpoints(p, 1.0).items()}
    a, b, g, d = e["alpha"], e["beta"], e["gamma"], e["delta"]
    grids = {}
    grids["on1"] = _collar(b, a, count, 0.0) if b > 0 else np.linspace(0.0, a, count)
    off1 = [np.linspace(a * 1.02, 2.0 * a, count)]
    if b > 0:
        off1.append(_collar(0.0, b, count // 2, 0.0)[:-1] * 0.98)
    grids["off1"] = np.concatenate(off1)
    R2 = max(2.0 * max(g, 1.0), 3.0)
    grids["on2"] = np.linspace(g, R2, count) if g > 0 else np.linspace(0.0, R2, count)
    grids["off2"] = _collar(0.0, g, count, 0.02)[: -1] if g > 0 else np.array([])
    R3 = max(2.0 * max(d, 1.0), 3.0)
    grids["on3"] = np.linspace(d, R3, count)
    grids["off3"] = _collar(0.0, d, count, 0.02)[:-1] if d > 0 else np.array([])
    return grids


def el_residuals(p: ModelParams, grids: dict | None = None, triple: EquilibriumTriple | None = None,
                 per_xi_points: Sequence[complex] | None = None) -> ELReport:
    """Residuals of the three Euler-Lagrange conditions for (nu1, nu2, nu3)."""
    tr = triple or equilibrium_triple(p)
    grids = grids or default_el_grids(p)
    U1, U2, U3 = tr.nu1.potential_array, tr.nu2.potential_array, tr.nu3.potential_array

    def el1(x):
        return 2.0 * U1(x) - U2(x) + v1_field(p, x)

    def el2(y):
        z = 1j * np.asarray(y, dtype=float)
        return -U1(z) + 2.0 * U2(z) - U3(z)

    def el3(x):
        return -U2(x) + 2.0 * U3(x) + v3_field(p, x)

    on1 = el1(grids["on1"])
    ell = float(np.mean(on1))
    res = {
        "el1": float(np.max(np.abs(on1 - ell))),
        "el2": float(np.max(np.abs(el2(grids["on2"])))),
        "el3": float(np.max(np.abs(el3(grids["on3"])))),
    }
    margins = {"el1": float(np.min(el1(grids["off1"]) - ell))}
    # conditions 2 and 3 hold with the opposite / same inequality off support
    margins["el2"] = float(np.min(-el2(grids["off2"]))) if grids["off2"].size else math.inf
    margins["el3"] = float(np.min(el3(grids["off3"]))) if grids["off3"].size else math.inf
    report = ELReport(ell, res, margins, grids)
    if per_xi_points is not None:
        report.per_xi_ell, report.per_xi_residual = per_xi_identity(p, 1.0, per_xi_points)
    return report


def per_xi_identity(p: ModelParams, xi: float, points: Sequence[complex]) -> tuple[float, float]:
    """Fit ell^xi in ell - 2U^{mu1} + U^{mu2} = kappa log|w1/w2| and return the worst deviation."""
    m1, m2 = mu_measure(p, xi, 1), mu_measure(p, xi, 2)
    zs = np.asarray(points, dtype=complex)
    w, _ = sheet_roots(p, xi, zs)
    kappa = 0.5 if xi < p.xi_cr else 1.0
    rhs = kappa * np.log(np.abs(w[:, 0] / w[:, 1]))
    lhs = -2.0 * m1.potential_array(zs) + m2.potential_array(zs)
    ell = float(np.mean(rhs - lhs))
    return ell, float(np.max(np.abs(lhs + ell - rhs)))


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

def _mutual(m: MeasureDensity, other: MeasureDensity) -> float:
    """I(m, other) = int U^other dm."""
    total = 0.0
    for pc, sg, fac in m.parts:
        pts = sg * pc.s
        zs = pts if m.axis == "real" else 1j * pts
        u = other.potential_array(zs)
        total += fac * float(np.dot(pc.vw * pc.f, u))
    return total


def energy_functional(m1: MeasureDensity, m2: MeasureDensity, m3: MeasureDensity, p: ModelParams,
                      check: bool = True) -> float:
    """Energy of a triple of measures in the vector equilibrium problem."""
    if check:
        for m, target in ((m1, 1.0), (m2, 2.0 / 3.0), (m3, 1.0 / 3.0)):
            if abs(m.mass() - target) > 1e-6:
                raise ConstraintError(f"measure {m.label} has mass {m.mass()} instead of {target}")
        for pc, sg, _ in m2.parts:
            y = sg * pc.s
            excess = m2.density(y) - sigma_density_array(p, y)
            if np.max(excess) > CONSTRAINT_TOL * (1.0 + np.max(sigma_density_array(p, y))):
                raise ConstraintError("middle measure exceeds the constraint")
    energy = (
        _mutual(m1, m1) - _mutual(m1, m2) + _mutual(m2, m2) - _mutual(m2, m3) + _mutual(m3, m3)
        + m1.integrate(lambda x: v1_field(p, x)) + m3.integrate(lambda x: v3_field(p, x))
    )
    return float(energy)


# ---------------------------------------------------------------------------
# admissible competitors for the energy
# ---------------------------------------------------------------------------

def semicircle_measure(axis, radius: float, mass: float, n: int = N_SPACE) -> MeasureDensity:
    """Semicircle density of the given radius and total mass."""
    scale = 2.0 * mass / (np.pi * radius**2)
    rho = lambda s: scale * np.sqrt(np.maximum(radius**2 - s**2, 0.0))  # noqa: E731
    return measure_from_function(axis, half_axis_pieces([0.0, radius], n), rho, mass, "semicircle")


def sigma_band(p: ModelParams, inner: float, mass: float = MASSES[2], n: int = N_SPACE) -> MeasureDensity:
    """The constraint restricted to inner <= |y| <= outer, with outer fixed by the mass."""
    inner = max(inner, p.y_star)
    band = lambda hi: sigma_measure(p, hi, n).mass_between(inner, hi) * 2.0 - mass  # noqa: E731
    hi = inner + 1.0
    while band(hi) < 0.0:
        hi *= 2.0
    outer = brentq(band, inner, hi, xtol=1e-14)
    pieces = half_axis_pieces([inner, outer], n)
    return measure_from_function("imaginary", pieces, lambda s: sigma_density_array(p, s), mass, "sigma-band")


def admissible_perturbation(p: ModelParams, triple: EquilibriumTriple, rng: np.random.Generator,
                            n: int = N_SPACE) -> tuple[MeasureDensity, MeasureDensity, MeasureDensity]:
    """A random triple with the right masses that respects the upper constraint.

    Each component is moved toward a competitor of equal mass by a random
    convex weight. Competitors for the first and third measures are
    semicircles of random radius. The competitor for the middle measure is the
    constraint on a band |y| >= gamma(1), where the middle measure is strictly
    below the constraint, so every convex combination stays admissible.
    """
    e = {k: float(v[0]) for k, v in endpoints(p, 1.0).items()}
    alpha = e["alpha"]
    w1, w2, w3 = rng.uniform(0.05, 0.5, size=3)
    r1 = alpha * rng.uniform(0.5, 1.5)
    r3 = max(alpha, 1.0) * rng.uniform(0.5, 2.0)
    inner = max(e["gamma"], p.y_star) * rng.uniform(1.0, 2.0) + rng.uniform(0.0, 1.0)
    m1 = triple.nu1.scaled(1.0 - w1) + semicircle_measure("real", r1, MASSES[1], n).scaled(w1)
    m2 = triple.nu2.scaled(1.0 - w2) + sigma_band(p, inner, MASSES[2], n).scaled(w2)
    m3 = triple.nu3.scaled(1.0 - w3) + semicircle_measure("real", r3, MASSES[3], n).scaled(w3)
    return m1, m2, m3
