"""Finite-n ground truth from the recurrence relations.

The polynomials q_k in the second variable are orthogonal for the even weight

    w(y) = exp(-n (y^4/4 + t y^2/2 - tau^2 y^2/2)),

with three-term recurrence y q_k = q_{k+1} + a_k q_{k-1}. The coefficients a_k
are computed here by a discretised Stieltjes procedure. The polynomials p_k in
the first variable then follow the five-term recurrence

    x p_k = p_{k+1} + b_k p_{k-1} + c_k p_{k-3},
    b_k = tau^2 a_k + k/n,   c_k = tau^2 a_{k-2} a_{k-1} a_k,

whose zeros are compared against the limiting measure nu_1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import PrecisionError, ResolutionError
from .quadrature import gauss_legendre01
from .spectral_curve import ModelParams, endpoints

# drop of the log-integrand below its peak at which the weight is truncated
LOG_DROP = 70.0
# composite Gauss-Legendre rule: panels per unit length and nodes per panel
PANELS_PER_UNIT = 8
NODES_PER_PANEL = 64
MAX_DOUBLINGS = 4
STABILITY_TOL = 1e-10


@dataclass(frozen=True)
class RecurrenceTable:
    """Recurrence coefficients a_k, b_k, c_k for k = 0..K at fixed n."""

    n: int
    t: float
    tau: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    cutoff: float = 0.0
    nodes: int = 0

    @property
    def K(self) -> int:
        return len(self.a) - 1

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.t, self.tau)

    def string_residual(self) -> np.ndarray:
        """|a_k (a_{k-1} + a_k + a_{k+1} + t - tau^2) - k/n| for k = 1..K-1."""
        a = self.a
        k = np.arange(1, self.K)
        lhs = a[k] * (a[k - 1] + a[k] + a[k + 1] + self.t - self.tau**2)
        return np.abs(lhs - k / self.n)


def _potential(p: ModelParams, y: np.ndarray) -> np.ndarray:
    return y**4 / 4.0 + (p.t - p.tau2) * y**2 / 2.0


def _log_tail(p: ModelParams, n: int, K: int, y):
    """log of y^(2K) w(y), the size of q_K^2 w far out on the axis."""
    return 2.0 * K * np.log(np.maximum(y, 1e-300)) - n * _potential(p, y)


def truncation_length(p: ModelParams, n: int, K: int, log_norm: float | None = None) -> float:
    """Half-width L beyond which q_K^2 w is below exp(-LOG_DROP) times ||q_K||^2.

    Without ``log_norm`` the peak of y^(2K) w stands in for the squared norm,
    which gives a first cut. The squared norm itself can be far smaller than
    that peak, so the caller repeats with the computed log ||q_K||^2.
    """
    ys = np.linspace(1e-6, 1.0, 2001)
    peak = _log_tail(p, n, K, ys).max()
    while True:
        ref = max(peak, _log_tail(p, n, K, ys).max()) if log_norm is None else log_norm
        if _log_tail(p, n, K, ys[-1]) < ref - LOG_DROP and ys[-1] > 1.0:
            break
        ys = np.linspace(1e-6, 2.0 * ys[-1], 2001)
    vals = _log_tail(p, n, K, ys)
    i = int(np.argmax(vals))
    lo, hi = max(ys[i], 1.0), ys[-1]
    # past its maximum the tail is decreasing; refine the crossing by bisection
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if _log_tail(p, n, K, mid) > ref - LOG_DROP else (lo, mid)
    return hi


def _composite_rule(L: float, panels_per_unit: int) -> tuple[np.ndarray, np.ndarray]:
    m = max(2, int(np.ceil(2.0 * L * panels_per_unit)))
    edges = np.linspace(-L, L, m + 1)
    v, w = gauss_legendre01(NODES_PER_PANEL)
    h = np.diff(edges)[:, None]
    return (edges[:-1, None] + h * v).ravel(), (h * w).ravel()


def _stieltjes(y: np.ndarray, weights: np.ndarray, K: int) -> np.ndarray:
    """a_1..a_K of the discrete measure by the orthonormal Stieltjes recursion.

    The recursion is run in its Lanczos form on the vectors sqrt(weights) *
    q_k(y), with every new vector reorthogonalised against all earlier ones.
    Without that step the recursion loses accuracy geometrically once the
    coefficients become two-periodic. The weight is even, so the diagonal
    recurrence coefficients vanish and only the off-diagonal ones are kept.
    """
    a = np.zeros(K + 1)
    basis = np.zeros((K + 1, y.size))
    basis[0] = np.sqrt(weights) / np.sqrt(weights.sum())
    beta = 0.0
    for k in range(K):
        nxt = y * basis[k] - (beta * basis[k - 1] if k > 0 else 0.0)
        for _ in range(2):
            nxt -= basis[: k + 1].T @ (basis[: k + 1] @ nxt)
        beta = np.linalg.norm(nxt)
        a[k + 1] = beta * beta
        basis[k + 1] = nxt / beta
    return a


def _coefficients_on(p: ModelParams, n: int, K: int, L: float) -> tuple[np.ndarray, np.ndarray]:
    """a_0..a_K on [-L, L], doubling the nodes until a_K is stable."""
    panels = PANELS_PER_UNIT
    previous = None
    for _ in range(MAX_DOUBLINGS + 1):
        y, wq = _composite_rule(L, panels)
        logw = -n * _potential(p, y)
        weights = wq * np.exp(logw - logw.max())
        a = _stieltjes(y, weights, K)
        if previous is not None and abs(a[K] - previous[K]) <= STABILITY_TOL * max(1.0, abs(a[K])):
            return a, y
        previous = a
        panels *= 2
    raise PrecisionError(f"a_K did not stabilise to {STABILITY_TOL} under node doubling")


def _log_norm(p: ModelParams, n: int, L: float, a: np.ndarray) -> float:
    """log ||q_K||^2 = log int w + sum_k log a_k for the last index K."""
    y, wq = _composite_rule(L, PANELS_PER_UNIT)
    logw = -n * _potential(p, y)
    top = logw.max()
    return float(top + np.log(np.dot(wq, np.exp(logw - top))) + np.sum(np.log(a[1:])))


def compute_recurrence(p: ModelParams, n: int, K: int) -> RecurrenceTable:
    """Recurrence coefficients up to index K for the weight at scale n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 1 <= K <= 2 * n:
        raise ValueError("K must satisfy 1 <= K <= 2n")
    # q_{K+1} is needed for a_{K+1} in the string-equation check
    L = truncation_length(p, n, K + 1)
    for _ in range(8):
        a, y = _coefficients_on(p, n, K + 1, L)
        log_norm = _log_norm(p, n, L, a)
        L_needed = truncation_length(p, n, K + 1, log_norm)
        if L_needed <= L:
            break
        L = L_needed
    else:
        raise PrecisionError("weight truncation did not settle")
    k = np.arange(K + 2)
    b = p.tau2 * a + k / n
    b[0] = 0.0
    c = np.zeros_like(a)
    c[2:] = p.tau2 * a[:-2] * a[1:-1] * a[2:]
    return RecurrenceTable(n=n, t=p.t, tau=p.tau, a=a, b=b, c=c, cutoff=L, nodes=y.size)


# ---------------------------------------------------------------------------
# evaluation and zeros
# ---------------------------------------------------------------------------

def p_eval(table: RecurrenceTable, x, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log-magnitude of p_k(x), by the rescaled five-term recurrence.

    The rolling state (p_j, p_{j-1}, p_{j-2}, p_{j-3}) is divided by its
    largest entry after every step. The recurrence is linear in the state,
    so signs and zeros are unaffected and the removed factor is accumulated
    in the log-magnitude.
    """
    if not 0 <= k <= table.K + 1:
        raise ValueError(f"degree {k} needs coefficients beyond K={table.K}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    state = np.zeros((4,) + x.shape)
    state[0] = 1.0
    logscale = np.zeros_like(x)
    b, c = table.b, table.c
    for j in range(k):
        nxt = x * state[0] - b[j] * state[1] - c[j] * state[3]
        state = np.stack([nxt, state[0], state[1], state[2]])
        m = np.max(np.abs(state), axis=0)
        m = np.where(m > 0, m, 1.0)
        state /= m
        logscale += np.log(m)
    val = state[0]
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(val)) + logscale
    return np.sign(val), logmag


def five_diagonal_matrix(table: RecurrenceTable, k: int) -> np.ndarray:
    """The k x k matrix whose characteristic polynomial is p_k."""
    H = np.zeros((k, k))
    for i in range(k):
        if i + 1 < k:
            H[i, i + 1] = 1.0
        if i >= 1:
            H[i, i - 1] = table.b[i]
        if i >= 3:
            H[i, i - 3] = table.c[i]
    return H


@dataclass(frozen=True)
class ZeroSet:
    """Sorted real zeros of p_k at scale n, contained in [-M, M]."""

    k: int
    n: int
    zeros: np.ndarray
    bound: float
    method: str = "scan"
    extra: dict = field(default_factory=dict)

    @property
    def min_gap(self) -> float:
        return float(np.min(np.diff(self.zeros))) if self.k > 1 else np.inf

    @property
    def positive(self) -> np.ndarray:
        return self.zeros[self.zeros > 0]


def zero_bound(p: ModelParams) -> float:
    return float(endpoints(p, 1.0)["alpha"][0]) + 1.0


def _bisect(table: RecurrenceTable, k: int, lo: np.ndarray, hi: np.ndarray, tol: float) -> np.ndarray:
    s_lo, _ = p_eval(table, lo, k)
    for _ in range(200):
        if np.all(hi - lo <= tol * np.maximum(1.0, np.abs(lo))):
            break
        mid = 0.5 * (lo + hi)
        s_mid, _ = p_eval(table, mid, k)
        left = s_mid == s_lo
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
        # an exact zero at mid ends that bracket
        exact = s_mid == 0
        lo = np.where(exact, mid, lo)
        hi = np.where(exact, mid, hi)
    return 0.5 * (lo + hi)


def p_zeros(p: ModelParams, n: int, k: int, table: RecurrenceTable | None = None,
            tol: float = 1e-12, retries: int = 3) -> ZeroSet:
    """Zeros of p_k by a sign-change scan of [0, M] and bisection.

    p_k has parity (-1)^k, so only the positive half-axis is scanned and the
    zeros are mirrored; odd degrees also vanish at the origin.
    """
    if not 1 <= k <= n:
        raise ValueError("k must satisfy 1 <= k <= n")
    table = table or compute_recurrence(p, n, max(k, 2))
    M = zero_bound(p)
    expected = k // 2
    count = int(np.ceil(40 * k)) + 1
    for _ in range(retries + 1):
        # start just off zero so the odd-degree zero at the origin is not counted
        grid = np.linspace(0.0, M, count)
        grid[0] = M * 1e-14
        s, _ = p_eval(table, grid, k)
        change = np.flatnonzero(s[:-1] * s[1:] < 0)
        exact = np.flatnonzero(s[1:-1] == 0) + 1
        if change.size + exact.size == expected:
            pos = np.concatenate([_bisect(table, k, grid[change], grid[change + 1], tol), grid[exact]])
            pos = np.sort(pos)
            mid = [0.0] if k % 2 else []
            zeros = np.concatenate([-pos[::-1], mid, pos])
            return ZeroSet(k=k, n=n, zeros=zeros, bound=M, method="scan")
        count = 2 * count - 1
    raise ResolutionError(f"scan found {change.size + exact.size} positive zeros of p_{k}, expected {expected}")


def p_zeros_eig(p: ModelParams, n: int, k: int, table: RecurrenceTable | None = None) -> ZeroSet:
    """Zeros of p_k as eigenvalues of the five-diagonal recurrence matrix."""
    table = table or compute_recurrence(p, n, max(k, 2))
    ev = np.linalg.eigvals(five_diagonal_matrix(table, k))
    return ZeroSet(k=k, n=n, zeros=np.sort(ev.real), bound=zero_bound(p), method="eig",
                   extra={"max_imag": float(np.max(np.abs(ev.imag))) if k else 0.0})


def q_zeros(table: RecurrenceTable, k: int) -> ZeroSet:
    """Zeros of q_k: eigenvalues of the symmetric tridiagonal Jacobi matrix."""
    if not 1 <= k <= table.K:
        raise ValueError("k out of range for the table")
    off = np.sqrt(table.a[1:k])
    ev = eigvalsh_tridiagonal(np.zeros(k), off)
    return ZeroSet(k=k, n=table.n, zeros=np.sort(ev), bound=float(np.max(np.abs(ev))), method="jacobi")


# ---------------------------------------------------------------------------
# interlacing
# ---------------------------------------------------------------------------

def interlacing_check(z1: ZeroSet, z2: ZeroSet,
                      mode: Literal["consecutive", "skip-even"] = "consecutive") -> tuple[bool, float]:
    """Strict interlacing of two zero sets and the smallest separation.

    ``consecutive`` compares degrees k and k+1. ``skip-even`` compares the
    positive zeros of degrees k and k+2.
    """
    if mode == "consecutive":
        if z2.k != z1.k + 1:
            raise ValueError("consecutive mode needs degrees k and k+1")
        inner, outer = z1.zeros, z2.zeros
    elif mode == "skip-even":
        if z2.k != z1.k + 2:
            raise ValueError("skip-even mode needs degrees k and k+2")
        inner, outer = z1.positive, z2.positive
    else:
        raise ValueError("mode must be 'consecutive' or 'skip-even'")
    if outer.size != inner.size + 1:
        return False, -np.inf
    merged = np.empty(inner.size + outer.size)
    merged[0::2] = outer
    merged[1::2] = inner
    gaps = np.diff(merged)
    margin = float(np.min(gaps)) if gaps.size else np.inf
    return bool(np.all(gaps > 0)), margin


# ---------------------------------------------------------------------------
# comparison with the limiting measure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroDistribution:
    ks: float
    zeros: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    expected: np.ndarray
    outside_mass: float


def ks_distance(sample: np.ndarray, cdf_values: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance of a sorted sample to a continuous cdf."""
    N = sample.size
    i = np.arange(1, N + 1)
    return float(max(np.max(i / N - cdf_values), np.max(cdf_values - (i - 1) / N)))


def empirical_vs_nu1(p: ModelParams, n: int, bins: int = 40, nu1=None) -> ZeroDistribution:
    """KS distance between the zero counting measure of p_n and nu_1."""
    from .equilibrium_measures import nu_measure

    if n < 10:
        raise ValueError("n must be at least 10")
    zs = p_zeros(p, n, n).zeros
    nu1 = nu1 or nu_measure(p, 1)
    ks = ks_distance(zs, nu1.cdf(zs))
    M = zero_bound(p)
    edges = np.linspace(-M, M, bins + 1)
    counts, _ = np.histogram(zs, edges)
    cdf_edges = nu1.cdf(edges)
    alpha = float(endpoints(p, 1.0)["alpha"][0])
    outside = float(np.mean(np.abs(zs) > alpha + 0.1))
    return ZeroDistribution(ks=ks, zeros=zs, bin_edges=edges, counts=counts / zs.size,
                            expected=np.diff(cdf_edges), outside_mass=outside)
