"""Panel quadrature on half-axes with endpoint singularities and infinite tails.

Two kinds of panels are used, both parametrised by v in [0, 1]:

* ``cos``: s = a + (b - a)(1 - cos(pi v))/2. Near either end s - a ~ v^2, so
  inverse square-root and square-root endpoint behaviour become smooth in v.
* ``tail``: s = a / v^3 for a > 0, covering [a, inf). Densities decaying like
  s^(-5/3) with corrections in powers of s^(-2/3) turn into smooth functions
  of v.

A measure on a panel is stored through f(v) = rho(s(v)) s'(v) sampled on
Gauss-Legendre nodes, which allows interpolation and product integration of
logarithmic kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import BarycentricInterpolator


@lru_cache(maxsize=None)
def gauss_legendre01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def cos_map(a, b, v):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = a + (b - a) * np.sin(0.5 * np.pi * v) ** 2
    ds = (b - a) * 0.5 * np.pi * np.sin(np.pi * v)
    return s, ds


def cos_rule(a, b, n: int):
    """Nodes and weights of the cosine-mapped rule on [a, b] (broadcast over a, b)."""
    v, w = gauss_legendre01(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    s, ds = cos_map(a, b, v)
    return s, w * ds


@dataclass
class Piece:
    """One panel of a half-axis measure.

    ``kind`` is ``"cos"`` on [a, b] or ``"tail"`` on [a, inf).
    """

    kind: str
    a: float
    b: float
    n: int

    def __post_init__(self) -> None:
        self.v, self.vw = gauss_legendre01(self.n)
        self.s, self.jac = self.map(self.v)
        self._interp = None
        self.f = None

    def map(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind == "cos":
            return cos_map(self.a, self.b, v)
        s = self.a / v**3
        return s, 3.0 * self.a / v**4

    def inverse(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "cos":
            if self.b == self.a:
                return np.zeros_like(s)
            c = np.clip(1.0 - 2.0 * (s - self.a) / (self.b - self.a), -1.0, 1.0)
            return np.arccos(c) / np.pi
        return np.cbrt(self.a / np.maximum(s, self.a))

    @property
    def length(self) -> float:
        return self.b - self.a if self.kind == "cos" else np.inf

    def separation(self, zeta: complex, v: np.ndarray, vs: float) -> np.ndarray:
        """|zeta - s(v)| computed relative to s(vs) without cancellation."""
        s_star = float(self.map(np.array([vs]))[0][0])
        if self.kind == "cos":
            step = (self.b - self.a) * np.sin(0.5 * np.pi * (v + vs)) * np.sin(0.5 * np.pi * (vs - v))
        else:
            step = self.a * (v - vs) * (v * v + v * vs + vs * vs) / (v * vs) ** 3
        return np.hypot((zeta.real - s_star) + step, zeta.imag)

    def distance(self, zeta: complex) -> float:
        x = min(max(zeta.real, self.a), self.b if self.kind == "cos" else np.inf)
        return abs(zeta - x)

    def set_density(self, rho: np.ndarray) -> None:
        self.f = np.asarray(rho, dtype=float) * self.jac
        self._interp = None

    @property
    def weights(self) -> np.ndarray:
        return self.vw * self.jac

    def f_at(self, v) -> np.ndarray:
        if self._interp is None:
            self._interp = BarycentricInterpolator(self.v, self.f)
        return self._interp(np.asarray(v, dtype=float))

    def integral(self, lo: float = -np.inf, hi: float = np.inf, m: int = 48) -> float:
        """Integral of the stored density over [lo, hi] intersected with the panel."""
        if lo <= self.a and hi >= (self.b if self.kind == "cos" else np.inf):
            return float(np.dot(self.vw, self.f))
        v1, v2 = (float(x) for x in self.inverse(np.array([lo, hi])))
        if self.kind == "tail":
            v1, v2 = v2, v1
            if not np.isfinite(hi):
                v1 = 0.0
        if v2 <= v1:
            return 0.0
        u, w = gauss_legendre01(m)
        v = v1 + (v2 - v1) * u
        return float(np.dot(w, self.f_at(v))) * (v2 - v1)

    def log_integral(self, zeta: complex, m: int = 40) -> float:
        """Integral of log|zeta - s| against the stored density on this panel."""
        if self.kind == "cos":
            near = self.distance(zeta) < 1.5 * self.length
        else:
            near = self.distance(zeta) < max(abs(zeta), self.a)
        if not near:
            return float(np.dot(self.vw * self.f, np.log(np.abs(zeta - self.s))))
        vs = float(self.inverse(np.array([zeta.real]))[0])
        u, w = gauss_legendre01(m)
        total = 0.0
        c = u**3
        dc = 3.0 * u**2
        if vs > 0.0:
            v = vs - vs * c
            total += vs * np.dot(w * dc, self.f_at(v) * np.log(self.separation(zeta, v, vs)))
        if vs < 1.0:
            v = vs + (1.0 - vs) * c
            if self.kind == "tail" and vs == 0.0:
                # the point lies at infinity of the tail map; use plain distances
                s, _ = self.map(v)
                dist = np.abs(zeta - s)
            else:
                dist = self.separation(zeta, v, vs)
            total += (1.0 - vs) * np.dot(w * dc, self.f_at(v) * np.log(dist))
        return float(total)


def half_axis_pieces(breaks, n: int, tail_from: float | None = None) -> list[Piece]:
    """Cosine panels between consecutive ``breaks`` plus an optional tail."""
    br = np.unique(np.asarray(breaks, dtype=float))
    pieces = [Piece("cos", float(a), float(b), n) for a, b in zip(br[:-1], br[1:]) if b > a]
    if tail_from is not None:
        pieces.append(Piece("tail", float(tail_from), np.inf, n))
    return pieces
