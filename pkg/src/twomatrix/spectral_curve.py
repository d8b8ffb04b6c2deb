"""Geometry of the spectral curve for V(x) = x^2/2, W(y) = y^4/4 + t y^2/2.

Everything here is a function of the model parameters (t, tau) and of the
ratio xi = k/n in the limit. For xi above the critical value the recurrence
coefficients have a single limit (one-cut regime) and the curve is described
by the symbol

    s1(w) = w + b/w + c/w^3.

Below it they are two-periodic (two-cut regime) and the relevant symbol is the
doubled one, s2(w) = w + A + B/w + C/w^2 + D/w^3, whose variable lives on the
squared z-plane. ``sheet_roots`` hides that difference: it always returns the
roots w_j(z; xi) as functions of the undoubled variable z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .algebraic import LaurentSymbol, monic_quartic_roots, quartic_roots, root_order
from .errors import AxisError, RegimeError

Regime = Literal["one-cut", "two-cut"]

_CLASS_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the model: W(y) = y^4/4 + t y^2/2 and interaction tau > 0."""

    t: float
    tau: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and math.isfinite(self.tau)):
            raise ValueError("t and tau must be finite")
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    @property
    def tau2(self) -> float:
        return self.tau * self.tau

    @property
    def xi_cr(self) -> float:
        return xi_critical(self)

    @property
    def x_star(self) -> float:
        return 2.0 * (-self.t) ** 1.5 / (3.0 * math.sqrt(3.0) * self.tau) if self.t < 0 else 0.0

    @property
    def y_star(self) -> float:
        return 2.0 * self.t ** 1.5 / (3.0 * math.sqrt(3.0) * self.tau) if self.t > 0 else 0.0

    @property
    def ray(self) -> float:
        """The value xi = -t tau^2 separating the two-cut subregions."""
        return -self.t * self.tau2


def xi_critical(p: ModelParams) -> float:
    """Critical ratio separating the one-cut and two-cut regimes."""
    gap = p.tau2 - p.t
    return gap * gap / 4.0 if gap > 0 else 0.0


# ---------------------------------------------------------------------------
# limits of the recurrence coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitCoefficients:
    regime: Regime
    xi: float
    a: float | None = None
    b: float | None = None
    c: float | None = None
    a0: float | None = None
    a1: float | None = None
    b0: float | None = None
    b1: float | None = None
    c0: float | None = None
    c1: float | None = None


def _check_xi(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if np.any(~(xi > 0)) or np.any(~np.isfinite(xi)):
        raise ValueError("xi must be positive and finite")
    return xi


def onecut_abc(p: ModelParams, xi):
    """Limits a, b, c for xi >= xi_cr (any positive xi is accepted)."""
    xi = np.asarray(xi, dtype=float)
    g = p.tau2 - p.t
    root = np.sqrt(g * g + 12.0 * xi)
    # the two forms agree; the second avoids cancellation when g < 0
    a = (g + root) / 6.0 if g >= 0 else 2.0 * xi / (root - g)
    return a, p.tau2 * a + xi, p.tau2 * a**3


def twocut_a(p: ModelParams, xi):
    """Limits (a0, a1) of the even and odd subsequences, for xi <= xi_cr."""
    xi = np.asarray(xi, dtype=float)
    g = p.tau2 - p.t
    root = np.sqrt(np.maximum(g * g - 4.0 * xi, 0.0))
    a1 = (g + root) / 2.0
    return xi / a1, a1


def limit_coefficients(p: ModelParams, xi: float) -> LimitCoefficients:
    xi = float(_check_xi(xi))
    if xi >= p.xi_cr:
        a, b, c = (float(v) for v in onecut_abc(p, xi))
        return LimitCoefficients("one-cut", xi, a=a, b=b, c=c)
    a0, a1 = (float(v) for v in twocut_a(p, xi))
    t2 = p.tau2
    return LimitCoefficients(
        "two-cut",
        xi,
        a0=a0,
        a1=a1,
        b0=a0 * (a0 + 2.0 * a1 + p.t),
        b1=a1 * (2.0 * a0 + a1 + p.t),
        c0=t2 * a0 * a0 * a1,
        c1=t2 * a0 * a1 * a1,
    )


def onecut_coefficients(p: ModelParams, xi) -> np.ndarray:
    """(d0, d1, d2, d3) of s1 for an array of xi."""
    _, b, c = onecut_abc(p, xi)
    zero = np.zeros_like(b)
    return np.stack([zero, b, zero, c], axis=-1)


def doubled_coefficients(p: ModelParams, xi) -> np.ndarray:
    """(A, B, C, D) of the doubled symbol, choosing the regime per entry of xi."""
    xi = np.asarray(xi, dtype=float)
    t2 = p.tau2
    # two-cut: symmetric functions of a0, a1 with a0 + a1 = tau^2 - t, a0 a1 = xi
    g = t2 - p.t
    b0b1 = t2 * t2 * xi + t2 * xi * g + xi * xi
    A2 = t2 * g + 2.0 * xi
    B2 = t2 * xi * g + b0b1
    C2 = t2 * xi * (2.0 * t2 * xi + xi * g)
    D2 = t2 * t2 * xi**3
    _, b, c = onecut_abc(p, xi)
    one = xi >= p.xi_cr
    return np.stack(
        [
            np.where(one, 2.0 * b, A2),
            np.where(one, 2.0 * c + b * b, B2),
            np.where(one, 2.0 * b * c, C2),
            np.where(one, c * c, D2),
        ],
        axis=-1,
    )


def symbol_onecut(p: ModelParams, xi: float) -> LaurentSymbol:
    xi = float(_check_xi(xi))
    if xi < p.xi_cr:
        raise RegimeError(f"xi={xi} is below the critical value {p.xi_cr}")
    return LaurentSymbol(*(float(v) for v in onecut_coefficients(p, xi)))


def symbol_doubled(p: ModelParams, xi: float) -> LaurentSymbol:
    xi = float(_check_xi(xi))
    sym = LaurentSymbol(*(float(v) for v in doubled_coefficients(p, xi)))
    if xi < p.xi_cr:
        # the two-cut doubled symbol must carry a double zero at w = -xi
        w = np.linspace(0.3, 3.0, 9) * np.exp(0.7j)
        resid = np.abs(sym(w) - doubled_factored(p, xi, w)) / (1.0 + np.abs(sym(w)))
        if resid.max() > 1e-10:
            raise ArithmeticError("doubled symbol does not factor as expected")
    return sym


def doubled_factored(p: ModelParams, xi, w):
    """(w+xi)^2 (w^2 + tau^2 (tau^2 - t) w + tau^4 xi) / w^3, the two-cut doubled symbol."""
    w = np.asarray(w, dtype=complex)
    t2 = p.tau2
    return (w + xi) ** 2 * (w * w + t2 * (t2 - p.t) * w + t2 * t2 * xi) / w**3


# ---------------------------------------------------------------------------
# roots on the sheets
# ---------------------------------------------------------------------------

def sheet_roots(p: ModelParams, xi, z):
    """Ordered roots w_j(z; xi) and their z-derivatives.

    ``xi`` and ``z`` broadcast against each other. In the two-cut regime the
    roots are those of the doubled symbol at z^2, and the derivative is taken
    with respect to z, i.e. 2 z / s2'(w).

    Returns
    -------
    w, dw : complex arrays of shape ``broadcast + (4,)``
    """
    xi = np.asarray(xi, dtype=float)
    z = np.asarray(z)
    shape = np.broadcast_shapes(xi.shape, z.shape)
    xi_b = np.broadcast_to(xi, shape)
    z_b = np.broadcast_to(z, shape)
    w = np.empty(shape + (4,), dtype=complex)
    dw = np.empty(shape + (4,), dtype=complex)
    one = xi_b >= p.xi_cr
    if np.any(one):
        coef = onecut_coefficients(p, xi_b[one])
        ww = quartic_roots(coef, z_b[one])
        b, c = coef[:, 1:2], coef[:, 3:4]
        w[one] = ww
        dw[one] = 1.0 / (1.0 - b / ww**2 - 3.0 * c / ww**4)
    two = ~one
    if np.any(two):
        zz = z_b[two]
        ww, dd = _twocut_roots(p, xi_b[two], zz * zz)
        w[two] = ww
        dw[two] = 2.0 * zz[:, None] / dd
    return w, dw


def _twocut_roots(p: ModelParams, xi: np.ndarray, zsq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ordered roots of the two-cut doubled symbol at zsq and the symbol derivative there.

    The symbol is (w+xi)^2 q(w) / w^3 with q(w) = w^2 + k w + tau^4 xi and
    k = tau^2 (tau^2 - t). Near the origin of the z-plane and for small xi,
    three roots cluster around -xi. Writing w = -xi + e gives the quartic

        e^4 + (k - 2 xi - Z) e^3 + (xi (xi + tau^2 t) + 3 Z xi) e^2
            - 3 Z xi^2 e + Z xi^3 = 0,

    whose coefficients carry no cancellation, so the cluster is resolved
    relative to its own size. For |Z| xi >> k the small roots instead gather
    near w = 0, where the unshifted quartic is the well-conditioned one, so the
    variable is chosen per entry. The derivative is evaluated from e as well.
    """
    k = p.tau2 * (p.tau2 - p.t)
    Z = np.asarray(zsq)
    Z = np.real(Z) if np.all(np.imag(Z) == 0) else Z.astype(complex)
    x = xi
    shifted = np.abs(Z) * x <= k
    w = np.empty(x.shape + (4,), dtype=complex)
    e = np.empty(x.shape + (4,), dtype=complex)
    if np.any(shifted):
        xs, zs = x[shifted], Z[shifted]
        es = monic_quartic_roots(k - 2.0 * xs - zs, xs * (xs + p.tau2 * p.t) + 3.0 * zs * xs,
                                 -3.0 * zs * xs * xs, zs * xs**3)
        e[shifted] = es
        w[shifted] = es - xs[:, None]
    if not np.all(shifted):
        xu, zu = x[~shifted], Z[~shifted]
        wu = quartic_roots(doubled_coefficients(p, xu), zu)
        w[~shifted] = wu
        e[~shifted] = wu + xu[:, None]
    idx = root_order(w)
    w = np.take_along_axis(w, idx, axis=-1)
    e = np.take_along_axis(e, idx, axis=-1)
    q = w * w + k * w + p.tau2 * p.tau2 * x[:, None]
    dq = 2.0 * w + k
    ds = e * (2.0 * q + e * dq) / w**3 - 3.0 * e * e * q / w**4
    return w, ds


# ---------------------------------------------------------------------------
# branch points
# ---------------------------------------------------------------------------

def _twocut_critical_points(p: ModelParams, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Critical points (w0, w1, w2, w3) of the two-cut doubled symbol, with e = w + xi.

    w0 > 0 and w1 <= w2 <= w3 < 0. The double zero w = -xi (e = 0) is divided
    out analytically; in the shifted variable the remaining critical points
    solve

        e^3 - 4 xi e^2 - (q0 + 3 xi q1) e - 2 xi q0 = 0,

    where q(w) = e^2 + q1 e + q0, q1 = k - 2 xi, q0 = xi (xi + tau^2 t).
    These coefficients are cancellation free, which keeps critical points
    that approach -xi accurate relative to their distance from it.
    """
    k = p.tau2 * (p.tau2 - p.t)
    q1 = k - 2.0 * xi
    q0 = xi * (xi + p.tau2 * p.t)
    c2, c1, c0 = -4.0 * xi, -(q0 + 3.0 * xi * q1), -2.0 * xi * q0
    comp = np.zeros(xi.shape + (3, 3))
    comp[..., 0, 0] = -c2
    comp[..., 0, 1] = -c1
    comp[..., 0, 2] = -c0
    comp[..., 1, 0] = 1.0
    comp[..., 2, 1] = 1.0
    e = np.linalg.eigvals(comp).real
    c2, c1, c0 = (c[..., None] for c in (c2, c1, c0))
    for _ in range(3):
        f = ((e + c2) * e + c1) * e + c0
        df = (3.0 * e + 2.0 * c2) * e + c1
        ok = np.abs(df) > 1e-300
        e_new = np.where(ok, e - f / np.where(ok, df, 1.0), e)
        f_new = ((e_new + c2) * e_new + c1) * e_new + c0
        e = np.where(np.abs(f_new) <= np.abs(f), e_new, e)
    e = np.concatenate([e, np.zeros(xi.shape + (1,))], axis=-1)
    w = e - xi[..., None]
    idx = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, idx, axis=-1)
    e = np.take_along_axis(e, idx, axis=-1)
    # largest (positive) critical point first, then the negative ones ascending
    order = [3, 0, 1, 2]
    return w[..., order], e[..., order]


def _doubled_value_shifted(p: ModelParams, xi, w, e):
    """Two-cut doubled symbol e^2 q(w) / w^3 written in the shifted variable."""
    k = p.tau2 * (p.tau2 - p.t)
    q = e * e + (k - 2.0 * xi) * e + xi * (xi + p.tau2 * p.t)
    return e * e * q / w**3


def endpoints(p: ModelParams, xi) -> dict[str, np.ndarray]:
    """Vectorised branch points alpha, beta, gamma, delta for an array of xi.

    Also returns ``u``, ``v`` (nan in the two-cut regime) and the doubled-scale
    values ``hat_alpha`` ... ``hat_delta`` (nan in the one-cut regime).
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = {k: np.full(xi.shape, np.nan) for k in
           ("alpha", "beta", "gamma", "delta", "u", "v",
            "hat_alpha", "hat_beta", "hat_gamma", "hat_delta")}
    one = xi >= p.xi_cr
    if np.any(one):
        _, b, c = onecut_abc(p, xi[one])
        disc = np.sqrt(b * b + 12.0 * c)
        u2 = (b + disc) / 2.0
        v2 = 6.0 * c / (disc + b)
        u, v = np.sqrt(u2), np.sqrt(v2)
        out["u"][one] = u
        out["v"][one] = v
        out["alpha"][one] = 2.0 * u - 2.0 * v2 / (3.0 * u)
        out["gamma"][one] = 2.0 * u2 / (3.0 * v) - 2.0 * v
        out["beta"][one] = 0.0
        out["delta"][one] = 0.0
    two = ~one
    if np.any(two):
        x2 = xi[two]
        crit, shift = _twocut_critical_points(p, x2)
        vals = _doubled_value_shifted(p, x2[:, None], crit, shift)
        ha, hb, hg, hd = vals.T
        out["hat_alpha"][two] = ha
        out["hat_beta"][two] = hb
        out["hat_gamma"][two] = hg
        out["hat_delta"][two] = hd
        out["alpha"][two] = np.sqrt(np.maximum(ha, 0.0))
        out["beta"][two] = np.sqrt(np.maximum(hb, 0.0))
        out["gamma"][two] = np.sqrt(np.maximum(-hg, 0.0))
        out["delta"][two] = np.sqrt(np.maximum(hd, 0.0))
    return out


@dataclass(frozen=True)
class SupportSet:
    """Symmetric union of closed intervals on the real or the imaginary axis.

    Intervals are stored in the axis coordinate (Im z for the imaginary axis).
    """

    axis: Literal["real", "imaginary"]
    intervals: tuple

    def coordinate(self, point) -> float:
        return axis_coordinate(point, self.axis)

    def contains(self, point) -> bool:
        s = self.coordinate(point)
        return any(lo <= s <= hi for lo, hi in self.intervals)

    def boundary(self) -> list[float]:
        return sorted({e for iv in self.intervals for e in iv if math.isfinite(e)})


def axis_coordinate(point, axis: str) -> float:
    z = complex(point)
    if axis == "real":
        if z.imag != 0.0:
            raise AxisError(f"{point} is not on the real axis")
        return z.real
    if z.real != 0.0:
        raise AxisError(f"{point} is not on the imaginary axis")
    return z.imag


def _symmetric(axis: str, inner: float, outer: float) -> SupportSet:
    if inner <= 0.0:
        return SupportSet(axis, ((-outer, outer),))
    return SupportSet(axis, ((-outer, -inner), (inner, outer)))


@dataclass(frozen=True)
class BranchData:
    xi: float
    regime: Regime
    alpha: float
    beta: float
    gamma: float
    delta: float
    u: float | None = None
    v: float | None = None
    hat_alpha: float | None = None
    hat_beta: float | None = None
    hat_gamma: float | None = None
    hat_delta: float | None = None
    supports: dict = field(default_factory=dict)

    @property
    def gamma1(self) -> SupportSet:
        return self.supports[1]

    @property
    def gamma2(self) -> SupportSet:
        return self.supports[2]

    @property
    def gamma3(self) -> SupportSet:
        return self.supports[3]


def branch_points(p: ModelParams, xi: float) -> BranchData:
    xi = float(_check_xi(xi))
    e = {k: float(v[0]) for k, v in endpoints(p, xi).items()}
    regime: Regime = "one-cut" if xi >= p.xi_cr else "two-cut"
    supports = {
        1: _symmetric("real", e["beta"], e["alpha"]),
        2: _symmetric("imaginary", e["gamma"], math.inf),
        3: _symmetric("real", e["delta"], math.inf),
    }
    extra = {}
    if regime == "one-cut":
        extra = {"u": e["u"], "v": e["v"]}
    else:
        extra = {k: e[k] for k in ("hat_alpha", "hat_beta", "hat_gamma", "hat_delta")}
    return BranchData(xi=xi, regime=regime, alpha=e["alpha"], beta=e["beta"],
                      gamma=e["gamma"], delta=e["delta"], supports=supports, **extra)


# ---------------------------------------------------------------------------
# phases
# ---------------------------------------------------------------------------

Subregion = Literal["C1", "C2a", "C2b", "C2c", "boundary"]


@dataclass(frozen=True)
class PhaseClass:
    case: str
    subregion: Subregion | None
    xi_cr: float
    x_star: float
    y_star: float


def _near(a: float, b: float) -> bool:
    return abs(a - b) <= _CLASS_TOL * max(1.0, abs(a), abs(b))


def classify_subregion(p: ModelParams, xi: float) -> Subregion:
    xi = float(_check_xi(xi))
    xc = p.xi_cr
    if xc > 0 and _near(xi, xc):
        return "boundary"
    if xi > xc:
        return "C1"
    if p.t < 0 and _near(xi, p.ray):
        return "boundary"
    if p.t < 0 and xi < p.ray:
        return "C2b"
    if p.t < -p.tau2:
        return "C2a"
    return "C2c"


_CASE_OF = {"C1": "I", "C2a": "II", "C2b": "III", "C2c": "IV"}


def classify_phase(p: ModelParams, xi: float | None = None) -> PhaseClass:
    """Case I-IV of the phase diagram, read off from the subregion at xi = 1."""
    at_one = classify_subregion(p, 1.0)
    if at_one == "boundary":
        if _near(p.xi_cr, 1.0) and _near(p.ray, 1.0):
            case = "multicritical"
        else:
            case = "critical-curve"
    else:
        case = _CASE_OF[at_one]
    sub = classify_subregion(p, xi) if xi is not None else None
    return PhaseClass(case=case, subregion=sub, xi_cr=p.xi_cr,
                      x_star=p.x_star, y_star=p.y_star)


# ---------------------------------------------------------------------------
# xi*(point): where a point enters or leaves the support sets
# ---------------------------------------------------------------------------

def _member(p: ModelParams, xi: np.ndarray, r: np.ndarray, j: int) -> np.ndarray:
    e = endpoints(p, xi)
    if j == 1:
        return (e["beta"] <= r) & (r <= e["alpha"])
    if j == 2:
        return e["gamma"] <= r
    return e["delta"] <= r


def xi_star_array(p: ModelParams, r, j: int, iterations: int = 64) -> np.ndarray:
    """xi*(r) for an array of axis distances r = |point|.

    For j = 1, 3 this is the smallest xi with the point in Gamma_j(xi), since
    those sets grow with xi; for j = 2 it is the largest xi with the point in
    Gamma_2(xi), which shrinks. Returns 0 when the point is in Gamma_j for all
    xi > 0 (j = 1, 3) or for no xi > 0 (j = 2), and inf when no finite xi
    exists.
    """
    r = np.abs(np.atleast_1d(np.asarray(r, dtype=float)))
    lo = np.full(r.shape, 1e-12)
    hi = 10.0 * np.maximum.reduce([np.ones_like(r), np.full(r.shape, p.xi_cr), r * r + 1.0])
    want_lo = j == 2  # predicate is True on the low side for j = 2
    at_lo = _member(p, lo, r, j)
    for _ in range(8):
        at_hi = _member(p, hi, r, j)
        grow = at_hi == want_lo
        if not np.any(grow):
            break
        hi = np.where(grow, hi * 10.0, hi)
    at_hi = _member(p, hi, r, j)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        m = _member(p, mid, r, j)
        go_right = m == want_lo
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    out = 0.5 * (lo + hi)
    if want_lo:
        out = np.where(~at_lo, 0.0, out)
        out = np.where(at_hi, np.inf, out)
    else:
        out = np.where(at_lo, 0.0, out)
        out = np.where(~at_hi, np.inf, out)
    return out


def xi_star(p: ModelParams, point, j: int) -> float:
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    coord = axis_coordinate(point, "imaginary" if j == 2 else "real")
    return float(xi_star_array(p, abs(coord), j)[0])
