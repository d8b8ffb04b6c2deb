"""Command-line interface: phase classification, density tables, zero sets and checks.

Exit codes: 0 on success (or when every check passes), 1 for usage errors,
2 for numerical failures and 3 when a verification check fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from .equilibrium_measures import (
    AXIS,
    mu_density_array,
    mu_measure,
    nu_density_array,
    nu_measure,
    sigma_density_array,
    sigma_measure,
)
from .errors import AxisError, BranchPointError, PrecisionError, TwoMatrixError
from .orthopoly_oracle import compute_recurrence, ks_distance, p_zeros
from .spectral_curve import ModelParams, classify_phase, endpoints
from .verification import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3
MEASURES = ("nu1", "nu2", "nu3", "sigma", "mu1", "mu2", "mu3")


class UsageError(Exception):
    """Raised for malformed or inconsistent command-line input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int
    imaginary: bool

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


def parse_grid(text: str) -> Grid:
    """Parse ``start:stop:count`` with inclusive ends.

    Values may carry an ``i`` suffix to mark an imaginary-axis grid; plain
    numbers are read as the coordinate along the measure's own axis.
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("grid must look like start:stop:count")
    ends = [s.strip() for s in parts[:2]]
    imag = [e.endswith(("i", "j")) for e in ends]
    if imag[0] != imag[1]:
        raise UsageError("grid endpoints must both be real or both imaginary")
    try:
        start, stop = (float(e[:-1] if im else e) for e, im in zip(ends, imag))
        count = int(parts[2])
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}") from exc
    if count < 2:
        raise UsageError("grid count must be at least 2")
    if not (np.isfinite(start) and np.isfinite(stop)) or stop <= start:
        raise UsageError("grid needs finite start < stop")
    return Grid(start, stop, count, imag[0])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twomatrix", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--t", type=float, default=0.0, help="coupling t in W(y) = y^4/4 + t y^2/2")
    common.add_argument("--tau", type=float, default=1.0, help="interaction strength tau > 0")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ph = sub.add_parser("phase", parents=[common], help="phase case, subregion and branch points")
    ph.add_argument("--xi", type=float, default=None)

    de = sub.add_parser("density", parents=[common], help="density table of a measure on a grid")
    de.add_argument("--measure", choices=MEASURES, required=True)
    de.add_argument("--grid", required=True, help="start:stop:count")
    de.add_argument("--xi", type=float, default=None, help="ratio k/n for the mu measures")

    ze = sub.add_parser("zeros", parents=[common], help="zeros of the biorthogonal polynomial p_k")
    ze.add_argument("--n", type=int, required=True)
    ze.add_argument("--k", type=int, default=None, help="degree (default: n)")
    ze.add_argument("--compare", action="store_true", help="append the KS distance to nu1")

    ve = sub.add_parser("verify", parents=[common], help="run a suite of numerical checks")
    ve.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    ve.add_argument("--n", type=int, default=None, help="polynomial scale for oracle suites")
    ve.add_argument("--seed", type=int, default=0, help="seed for the perturbation suite")
    return parser


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def fmt(x: float) -> str:
    return "%.15g" % x


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def write_output(text: str, path: str | None) -> None:
    """Write to stdout or atomically replace ``path``."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".twomatrix-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _params(args) -> ModelParams:
    try:
        return ModelParams(args.t, args.tau)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _check_xi(xi) -> None:
    if xi is not None and not (np.isfinite(xi) and xi > 0):
        raise UsageError("--xi must be positive")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_phase(args) -> tuple[str, int]:
    p = _params(args)
    _check_xi(args.xi)
    pc = classify_phase(p, args.xi)
    at = args.xi if args.xi is not None else 1.0
    e = endpoints(p, at)
    report = {
        "t": p.t,
        "tau": p.tau,
        "case": pc.case,
        "xi": at,
    }
    if args.xi is not None:
        report["subregion_at_xi"] = pc.subregion
    report.update({"xi_cr": pc.xi_cr, "x_star": pc.x_star, "y_star": pc.y_star})
    report.update({k: float(e[k][0]) for k in ("alpha", "beta", "gamma", "delta")})
    if args.format == "csv":
        rows = ["key,value"] + [f"{k},{fmt(v) if isinstance(v, float) else v}" for k, v in report.items()]
        return "\n".join(rows) + "\n", EXIT_OK
    return to_json(report), EXIT_OK


def _density_values(p: ModelParams, measure: str, xi, coord: np.ndarray) -> np.ndarray:
    if measure == "sigma":
        return sigma_density_array(p, coord)
    j = int(measure[-1])
    if measure.startswith("nu"):
        return nu_density_array(p, j, coord)
    try:
        return mu_density_array(p, xi, j, coord)
    except BranchPointError:
        # the density blows up at a branch point; report it pointwise
        out = np.empty_like(coord)
        for i, c in enumerate(coord):
            try:
                out[i] = mu_density_array(p, xi, j, c)[0]
            except BranchPointError:
                out[i] = np.inf
        return out


def _grid_mass(p: ModelParams, measure: str, xi, lo: float, hi: float) -> float:
    if measure == "sigma":
        m = sigma_measure(p, max(abs(lo), abs(hi)))
    elif measure.startswith("nu"):
        m = nu_measure(p, int(measure[-1]))
    else:
        m = mu_measure(p, xi, int(measure[-1]))
    return m.mass_between(lo, hi)


def cmd_density(args) -> tuple[str, int]:
    p = _params(args)
    grid = parse_grid(args.grid)
    measure = args.measure
    if measure.startswith("mu"):
        if args.xi is None:
            raise UsageError("the mu measures need --xi")
        _check_xi(args.xi)
    elif args.xi is not None:
        raise UsageError("--xi applies only to the mu measures")
    axis = "imaginary" if measure == "sigma" else AXIS[int(measure[-1])]
    if grid.imaginary and axis == "real":
        raise AxisError(f"{measure} lives on the real axis but the grid is imaginary")
    coord = grid.points
    dens = _density_values(p, measure, args.xi, coord)
    mass = _grid_mass(p, measure, args.xi, grid.start, grid.stop)
    if args.format == "json":
        report = {"measure": measure, "axis": axis, "t": p.t, "tau": p.tau, "xi": args.xi,
                  "coordinate": coord.tolist(), "density": [_json_num(v) for v in dens], "mass": mass}
        return to_json(report), EXIT_OK
    lines = [f"# measure,{measure}", f"# axis,{axis}", f"# t,{fmt(p.t)}", f"# tau,{fmt(p.tau)}"]
    if args.xi is not None:
        lines.append(f"# xi,{fmt(args.xi)}")
    lines.append("coordinate,density")
    lines += [f"{fmt(c)},{fmt(d)}" for c, d in zip(coord, dens)]
    lines.append(f"# mass,{fmt(mass)}")
    return "\n".join(lines) + "\n", EXIT_OK


def _json_num(v: float):
    return float(v) if np.isfinite(v) else None


def cmd_zeros(args) -> tuple[str, int]:
    p = _params(args)
    n = args.n
    k = n if args.k is None else args.k
    if n < 1 or not 1 <= k <= n:
        raise UsageError("need n >= 1 and 1 <= k <= n")
    if args.compare and k != n:
        raise UsageError("--compare needs k = n, where the limit is nu1")
    table = compute_recurrence(p, n, max(k, 2))
    zs = p_zeros(p, n, k, table=table).zeros
    footer = None
    if args.compare:
        nu1 = nu_measure(p, 1)
        footer = {"ks": ks_distance(zs, nu1.cdf(zs)), "n": n, "k": k}
    if args.format == "json":
        report = {"t": p.t, "tau": p.tau, "n": n, "k": k, "zeros": zs.tolist()}
        if footer is not None:
            report["ks"] = footer["ks"]
        return to_json(report), EXIT_OK
    lines = [f"# t,{fmt(p.t)}", f"# tau,{fmt(p.tau)}", f"# n,{n}", f"# k,{k}", "zero"]
    lines += [fmt(z) for z in zs]
    if footer is not None:
        lines.append("# " + json.dumps(footer))
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_verify(args) -> tuple[str, int]:
    p = _params(args)
    if args.n is not None and args.n < 3:
        raise UsageError("--n must be at least 3")
    checks = run_suite(args.suite, p, n=args.n, seed=args.seed)
    ok = all(c.passed for c in checks)
    if args.format == "csv":
        rows = ["name,value,tolerance,comparison,pass"]
        rows += [f"{c.name},{fmt(c.value)},{fmt(c.tolerance)},{c.comparison},{str(c.passed).lower()}"
                 for c in checks]
        rows.append(f"# pass,{str(ok).lower()}")
        text = "\n".join(rows) + "\n"
    else:
        report = {"suite": args.suite, "t": p.t, "tau": p.tau, "seed": args.seed,
                  "checks": [c.as_dict() for c in checks], "pass": ok}
        text = to_json(report)
    return text, EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {"phase": cmd_phase, "density": cmd_density, "zeros": cmd_zeros, "verify": cmd_verify}


def _join_grid(argv: list[str]) -> list[str]:
    """Glue ``--grid`` to its value so a leading minus is not read as a flag."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--grid" and i + 1 < len(argv):
            out.append("--grid=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_grid(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
        text, code = COMMANDS[args.command](args)
    except (UsageError, AxisError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (PrecisionError, TwoMatrixError, ArithmeticError, FloatingPointError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    write_output(text, args.out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
