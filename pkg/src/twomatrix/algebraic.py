"""Roots of the degree-four symbol equation s(w) = z.

A symbol here is the Laurent polynomial

    s(w) = w + d0 + d1/w + d2/w**2 + d3/w**3,

so s(w) = z is the monic quartic w**4 + (d0 - z) w**3 + d1 w**2 + d2 w + d3 = 0.
Roots are always returned ordered by decreasing modulus, because the sheet
structure of the spectral curve is defined through that ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import BranchPointError, InvalidSymbolError

# relative tolerance under which two moduli (or real parts) count as equal
_TIE_RTOL = 1e-10


@dataclass(frozen=True)
class LaurentSymbol:
    """Symbol ``w + d0 + d1/w + d2/w^2 + d3/w^3`` with real coefficients."""

    d0: float
    d1: float
    d2: float
    d3: float

    def __post_init__(self) -> None:
        if not np.isfinite([self.d0, self.d1, self.d2, self.d3]).all():
            raise InvalidSymbolError("symbol coefficients must be finite")
        if self.d3 == 0.0:
            raise InvalidSymbolError("d3 must be nonzero")

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.d0, self.d1, self.d2, self.d3])

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        return w + self.d0 + self.d1 / w + self.d2 / w**2 + self.d3 / w**3

    def derivative(self, w):
        w = np.asarray(w, dtype=complex)
        return 1.0 - self.d1 / w**2 - 2.0 * self.d2 / w**3 - 3.0 * self.d3 / w**4


@dataclass(frozen=True)
class RootQuadruple:
    """The four solutions of s(w) = z, ordered |w1| >= |w2| >= |w3| >= |w4|."""

    z: complex
    roots: tuple
    symbol: LaurentSymbol

    @property
    def w1(self) -> complex:
        return self.roots[0]

    @property
    def w2(self) -> complex:
        return self.roots[1]

    @property
    def w3(self) -> complex:
        return self.roots[2]

    @property
    def w4(self) -> complex:
        return self.roots[3]

    def __getitem__(self, j: int) -> complex:
        """One-based access, ``q[1]`` is w1."""
        if not 1 <= j <= 4:
            raise IndexError("root index must be in 1..4")
        return self.roots[j - 1]


def _precedes(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """True where ``a`` should come before ``b`` in the root ordering."""
    ma, mb = np.abs(a), np.abs(b)
    scale = _TIE_RTOL * np.maximum(ma, mb)
    mod_tie = np.abs(ma - mb) <= scale
    re_tie = np.abs(a.real - b.real) <= scale
    by_imag = a.imag > b.imag
    by_real = np.where(re_tie, by_imag, a.real > b.real)
    return np.where(mod_tie, by_real, ma > mb)


def root_order(w: np.ndarray) -> np.ndarray:
    """Permutation of the last axis that puts roots in the canonical order."""
    w = np.asarray(w, dtype=complex)
    idx = np.argsort(-np.abs(w), axis=-1, kind="stable")
    cur = np.take_along_axis(w, idx, axis=-1)
    # near-ties are resolved by a few bubble passes with the tolerant comparator
    for _ in range(w.shape[-1]):
        for i in range(w.shape[-1] - 1):
            a, b = cur[..., i].copy(), cur[..., i + 1].copy()
            swap = _precedes(b, a) & ~_precedes(a, b)
            cur[..., i] = np.where(swap, b, a)
            cur[..., i + 1] = np.where(swap, a, b)
            ia, ib = idx[..., i].copy(), idx[..., i + 1].copy()
            idx[..., i] = np.where(swap, ib, ia)
            idx[..., i + 1] = np.where(swap, ia, ib)
    return idx


def order_roots(w: np.ndarray) -> np.ndarray:
    """Sort the last axis by decreasing modulus, then real part, then imaginary part."""
    w = np.asarray(w, dtype=complex)
    return np.take_along_axis(w, root_order(w), axis=-1)


def polish_quartic(w: np.ndarray, c3, c2, c1, c0, steps: int = 2) -> np.ndarray:
    """Guarded Newton steps for roots of w^4 + c3 w^3 + c2 w^2 + c1 w + c0."""
    for _ in range(steps):
        p = (((w + c3) * w + c2) * w + c1) * w + c0
        dp = ((4.0 * w + 3.0 * c3) * w + 2.0 * c2) * w + c1
        ok = np.abs(dp) > 1e-300
        step = np.where(ok, p / np.where(ok, dp, 1.0), 0.0)
        # keep the current estimate where Newton would not improve it
        new = w - step
        p_new = (((new + c3) * new + c2) * new + c1) * new + c0
        w = np.where(np.abs(p_new) <= np.abs(p), new, w)
    return w


def monic_quartic_roots(c3, c2, c1, c0) -> np.ndarray:
    """Unordered roots of w^4 + c3 w^3 + c2 w^2 + c1 w + c0 (broadcast over coefficients)."""
    c3, c2, c1, c0 = np.broadcast_arrays(*(np.asarray(c) for c in (c3, c2, c1, c0)))
    dtype = np.result_type(c3, c2, c1, c0, float)
    comp = np.zeros(c3.shape + (4, 4), dtype=dtype)
    comp[..., 0, 0] = -c3
    comp[..., 0, 1] = -c2
    comp[..., 0, 2] = -c1
    comp[..., 0, 3] = -c0
    comp[..., 1, 0] = 1.0
    comp[..., 2, 1] = 1.0
    comp[..., 3, 2] = 1.0
    w = np.linalg.eigvals(comp).astype(complex)
    return polish_quartic(w, *(c[..., None] for c in (c3, c2, c1, c0)))


def quartic_roots(coeffs: np.ndarray, z) -> np.ndarray:
    """Ordered roots of ``w^4 + (d0-z) w^3 + d1 w^2 + d2 w + d3`` for an array of z.

    ``coeffs`` has shape ``(..., 4)`` holding (d0, d1, d2, d3) and broadcasts
    against ``z``. Returns an array of shape ``broadcast + (4,)``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    z = np.asarray(z)
    d0, d1, d2, d3 = (coeffs[..., i] for i in range(4))
    shape = np.broadcast_shapes(d0.shape, z.shape)
    real_input = not np.iscomplexobj(z) or bool(np.all(np.imag(z) == 0))
    dtype = float if real_input else complex
    zz = np.broadcast_to(np.real(z) if real_input else z, shape).astype(dtype)
    c3 = np.broadcast_to(d0, shape) - zz
    c2 = np.broadcast_to(d1, shape).astype(dtype)
    c1 = np.broadcast_to(d2, shape).astype(dtype)
    c0 = np.broadcast_to(d3, shape).astype(dtype)
    w = monic_quartic_roots(c3, c2, c1, c0)
    return order_roots(w)


def solve_symbol(sym: LaurentSymbol, z: complex) -> RootQuadruple:
    """Solve s(w) = z and return the modulus-ordered roots."""
    if not isinstance(sym, LaurentSymbol):
        raise InvalidSymbolError("expected a LaurentSymbol")
    if not np.isfinite(z):
        raise ValueError("z must be finite")
    w = quartic_roots(sym.coefficients, z)
    return RootQuadruple(z=complex(z), roots=tuple(complex(v) for v in w), symbol=sym)


def root_derivative(sym: LaurentSymbol, w: complex) -> complex:
    """dw/dz = 1/s'(w) along the root branch through ``w``."""
    ds = complex(sym.derivative(w))
    if abs(ds) < 1e-12 * (1.0 + abs(w) ** 3):
        raise BranchPointError(f"s'(w) vanishes at w={w}")
    return 1.0 / ds


def _cut_normal(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0.0:
        return 1j
    if z.real == 0.0:
        return -1.0
    raise ValueError("side limits are defined on the real or imaginary axis only")


def side_limit_root(
    sym: LaurentSymbol,
    z: complex,
    j: int,
    side: Literal["plus", "minus"],
    eps: float = 1e-5,
) -> tuple[complex, complex]:
    """Boundary value of the j-th root and its derivative on one side of an axis.

    The "+" side is the upper half-plane for points on the real axis and the
    left half-plane for points on the imaginary axis. The root is evaluated at
    two displacements ``eps*(1+|z|)`` and half of it, then linearly
    extrapolated to zero displacement.
    """
    if j not in (1, 2, 3, 4):
        raise IndexError("root index must be in 1..4")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    normal = _cut_normal(z) * (1.0 if side == "plus" else -1.0)
    h = eps * (1.0 + abs(z))
    pts = complex(z) + normal * np.array([h, 0.5 * h])
    w = quartic_roots(sym.coefficients, pts)[:, j - 1]
    wp = 1.0 / sym.derivative(w)
    return complex(2.0 * w[1] - w[0]), complex(2.0 * wp[1] - wp[0])
