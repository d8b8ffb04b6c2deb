"""Named numerical checks grouped into suites, shared by the CLI and the tests.

Every check records the measured value, the tolerance it is compared with and
the direction of the comparison, so a report can be serialised as data and a
failure never turns into a crash.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .equilibrium_measures import (
    MASSES,
    admissible_perturbation,
    el_residuals,
    energy_functional,
    equilibrium_triple,
    integrated_field_array,
    nu_measure,
    sigma_density_array,
    sigma_tilde_array,
    v1_field,
    v3_field,
)
from .orthopoly_oracle import compute_recurrence, interlacing_check, p_zeros
from .spectral_curve import (
    ModelParams,
    doubled_factored,
    endpoints,
    symbol_doubled,
    symbol_onecut,
)

DEFAULT_N = 40
PERTURBATIONS = 20


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    comparison: Literal["<=", ">"] = "<="

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        if self.comparison == "<=":
            return self.value <= self.tolerance
        return self.value > self.tolerance

    def as_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance,
                "comparison": self.comparison, "pass": self.passed}


def _test_circle(count: int = 64) -> np.ndarray:
    theta = np.linspace(0.05, 2.0 * np.pi - 0.05, count)
    return np.exp(1j * theta) * np.linspace(0.4, 2.5, count)


def check_masses(p: ModelParams, **_) -> list[Check]:
    return [Check(f"nu{j}_mass_error", abs(nu_measure(p, j).mass() - MASSES[j]), 1e-6)
            for j in (1, 2, 3)]


def check_el(p: ModelParams, **_) -> list[Check]:
    rep = el_residuals(p)
    checks = [Check(f"{name}_residual", val, 5e-3) for name, val in rep.residuals.items()]
    # an empty off-support grid has no inequality to check
    checks += [Check(f"{name}_margin", val, 0.0, ">")
               for name, val in rep.margins.items() if math.isfinite(val)]
    return checks


def check_fields(p: ModelParams, **_) -> list[Check]:
    x = np.linspace(0.03, 4.0, 50)
    diff = integrated_field_array(p, "V1tilde", x) - v1_field(p, x)
    v3 = np.max(np.abs(integrated_field_array(p, "V3tilde", x) - v3_field(p, x)))
    y = np.linspace(0.05, 4.0, 20)
    sig = np.max(np.abs(sigma_tilde_array(p, y) - sigma_density_array(p, y)))
    return [
        Check("v1tilde_minus_v1_std", float(np.std(diff)), 1e-4),
        Check("v3tilde_minus_v3_max", float(v3), 1e-4),
        Check("sigma_tilde_minus_sigma_max", float(sig), 1e-5),
    ]


def check_consistency(p: ModelParams, **_) -> list[Check]:
    w = _test_circle()
    checks = []
    xi_one = max(1.0, 2.0 * p.xi_cr)
    s1, s2 = symbol_onecut(p, xi_one), symbol_doubled(p, xi_one)
    checks.append(Check("one_cut_doubling", _rel(s2(w**2), s1(w) ** 2), 1e-10))
    xc = p.xi_cr
    if xc > 0:
        s1 = symbol_onecut(p, xc)
        checks.append(Check("s1_s2_identity_at_xi_cr", _rel(doubled_factored(p, xc, w**2), s1(w) ** 2), 1e-10))
        below = xc / 2.0
        sym = symbol_doubled(p, below)
        checks.append(Check("two_cut_factorization", _rel(sym(w), doubled_factored(p, below, w)), 1e-10))
        h = 1e-10
        lo, hi = endpoints(p, xc * (1.0 - h)), endpoints(p, xc * (1.0 + h))
        for key in ("alpha", "gamma"):
            checks.append(Check(f"{key}_continuity_at_xi_cr", float(abs(lo[key][0] - hi[key][0])), 1e-8))
    return checks


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(b))))


def check_string(p: ModelParams, n: int | None = None, **_) -> list[Check]:
    n = n or DEFAULT_N
    table = compute_recurrence(p, n, n)
    return [Check(f"string_equation_residual_n{n}", float(np.max(table.string_residual())), 1e-8)]


def check_interlacing(p: ModelParams, n: int | None = None, **_) -> list[Check]:
    n = n or DEFAULT_N
    table = compute_recurrence(p, n, n + 2)
    zs = {k: p_zeros(p, n, k, table=table) for k in range(1, n + 1)}
    consec, skip = math.inf, math.inf
    for k in range(1, n):
        ok, m = interlacing_check(zs[k], zs[k + 1], "consecutive")
        consec = min(consec, m if ok else -abs(m))
        if k + 2 <= n:
            ok, m = interlacing_check(zs[k], zs[k + 2], "skip-even")
            skip = min(skip, m if ok else -abs(m))
    return [Check(f"consecutive_interlacing_margin_n{n}", consec, 0.0, ">"),
            Check(f"skip_even_interlacing_margin_n{n}", skip, 0.0, ">")]


def check_energy(p: ModelParams, seed: int = 0, **_) -> list[Check]:
    triple = equilibrium_triple(p)
    e0 = energy_functional(triple.nu1, triple.nu2, triple.nu3, p)
    rng = np.random.default_rng(seed)
    gaps = [energy_functional(*admissible_perturbation(p, triple, rng), p) - e0
            for _ in range(PERTURBATIONS)]
    return [Check("energy_minimizer_margin", float(min(gaps)), 0.0, ">")]


SUITES: dict[str, Callable[..., list[Check]]] = {
    "masses": check_masses,
    "el": check_el,
    "interlacing": check_interlacing,
    "string": check_string,
    "consistency": check_consistency,
    "fields": check_fields,
    "energy": check_energy,
}


def run_suite(name: str, p: ModelParams, n: int | None = None, seed: int = 0) -> list[Check]:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key](p, n=n, seed=seed)]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](p, n=n, seed=seed)
