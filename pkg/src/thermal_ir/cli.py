"""Command-line front end.

    thermal-ir <subcommand> [--config PATH] [--out DIR] [--tol X]

Every run writes one or more CSV tables (unit-suffixed columns, fixed float
formatting) and ``manifest.json`` with the inputs, library versions and a
sha256 per output.  Exit codes: 0 ok, 1 acceptance failure, 2 bad config,
3 scale-hierarchy violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import platform
import sys
from pathlib import Path
from typing import Callable

import numpy as np
import scipy

from . import __version__, acceptance, field, oneloop, resum, ward
from .config import ConfigError, Scenario, load
from .diracalg import FourVector
from .params import SchemeTag
from .quad import ScaleHierarchyError, scale_check

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_HIERARCHY = 0, 1, 2, 3


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12e}"


def write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out: Path, command: str, scen: Scenario, outputs: list[Path], status: int) -> Path:
    manifest = {
        "command": command,
        "status": status,
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "inputs": scen.to_dict(),
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# subcommands: each returns (exit status, written files)
# ---------------------------------------------------------------------------


def cmd_selfenergy(scen: Scenario, out: Path, tol: float | None):
    params = scen.params
    rows = []
    for eps in scen.section("selfenergy").get("eps_values", [params.eps]):
        p = params.with_(eps=eps)
        vac, heat = oneloop.sigma_vac_asym(p), oneloop.sigma_heat_asym(p)
        tot, num = oneloop.sigma_total_asym(p), oneloop.sigma_numeric(p)
        rows.append([eps, vac.X, heat.X, tot.sigma1, tot.sigma2, num.sigma1, num.sigma2, num.X / tot.X - 1])
    header = [
        "eps_m2", "X_vac_asym_dimless", "X_heat_asym_dimless", "sigma1_asym_dimless", "sigma2_asym_dimless",
        "sigma1_numeric_dimless", "sigma2_numeric_dimless", "numeric_over_asym_minus_1",
    ]
    return EXIT_OK, [write_csv(out / "selfenergy.csv", header, rows)]


def cmd_fixedpoint(scen: Scenario, out: Path, tol: float | None):
    sec = scen.section("fixedpoint")
    rows = []
    for beta in sec.get("beta_values", [scen.params.beta]):
        for e2 in sec.get("e2_values", [scen.params.e**2]):
            e = math.sqrt(e2)
            it, closed = oneloop.solve_E(beta, e), oneloop.E_closed(beta, e)
            rel = abs(it / closed - 1) if closed else abs(it)
            rows.append([beta, e2, it, closed, rel])
    header = ["beta_m", "e2_dimless", "E_iter_m2", "E_closed_m2", "rel_diff"]
    return EXIT_OK, [write_csv(out / "fixedpoint.csv", header, rows)]


def _with_p(params, p):
    return params.with_(p3=(0.0, 0.0, float(p)))


def cmd_vertex(scen: Scenario, out: Path, tol: float | None):
    scale_check(scen.params, SchemeTag.EPSILON)
    rows = []
    for p in scen.section("vertex").get("p_values", [scen.params.p3[2]]):
        par = _with_p(scen.params, p)
        num = oneloop.J2_vertex_numeric(par)
        e = par.e or 1.0
        rows.append([p, num.real / e, num.imag / e, oneloop.J2_vertex_asym(par) / e, oneloop.J2_vertex_asym(par, leading=True) / e])
    header = ["p_m", "J2_numeric_re_e", "J2_numeric_im_e", "J2_asym_e", "J2_leading_e"]
    return EXIT_OK, [write_csv(out / "vertex.csv", header, rows)]


def cmd_nullify(scen: Scenario, out: Path, tol: float | None):
    scale_check(scen.params, SchemeTag.EPSILON)
    tol = 0.05 if tol is None else tol
    e = scen.params.e or 1.0
    rows = []
    status = EXIT_OK
    for path in ("asymptotic", "numeric"):
        rep = oneloop.coulomb_nullification(scen.params, path)
        limit = 1e-14 if path == "asymptotic" else tol
        ok = rep.rel(scen.params.e) <= limit
        status = status if ok else EXIT_FAIL
        rows.append([path, complex(rep.tree).real / e, complex(rep.J2).real / e, complex(rep.J3).real / e, complex(rep.total).real / e, ok])
    header = ["path", "tree_e", "J2_e", "J3_e", "total_e", "within_tol"]
    return status, [write_csv(out / "nullify.csv", header, rows)]


def cmd_resum(scen: Scenario, out: Path, tol: float | None):
    scale_check(scen.params, SchemeTag.LAMBDA)
    sec = scen.section("resum")
    rows = []
    for p in sec.get("p_values", [scen.params.p3[2]]):
        par = _with_p(scen.params, p)
        ex = resum.soft_exponent(par)
        J = resum.J_resummed(par)
        rows.append([p, ex.d11.real, ex.d22.real, ex.d12.real, ex.combined.real, ex.singular.real, resum.small_p_exponent(par), abs(J) / par.e if par.e else 0.0])
    header = ["p_m", "d11_dimless", "d22_dimless", "d12_dimless", "exponent_dimless", "exponent_singular_dimless", "exponent_small_p_dimless", "abs_J_e"]
    files = [write_csv(out / "resum.csv", header, rows)]
    par = scen.params
    x = resum.soft_exponent(par).combined
    full = resum.J_resummed(par)
    series = []
    for n in range(sec.get("n_max", 12) + 1):
        err = abs(resum.J_resummed(par, n_max=n) - full)
        series.append([n, err / (par.e or 1.0), resum.series_tail_bound(x, n)])
    files.append(write_csv(out / "resum_series.csv", ["n_max", "abs_err_e", "tail_bound_e"], series))
    return EXIT_OK, files


def cmd_field(scen: Scenario, out: Path, tol: float | None):
    sec = scen.section("field")
    src = field.SourceModel(sec.get("source_width", 0.01))
    prof = field.radial_profile(sec.get("r_values", [10.0]), scen.scheme, scen.params, src, sec.get("model", "full"))
    return EXIT_OK, [prof.to_csv(out / "field.csv")]


def cmd_ward(scen: Scenario, out: Path, tol: float | None):
    sec = scen.section("ward")
    rows = []
    q = FourVector(1.2, 0.1, 0.0, 0.3)
    p = FourVector(0.3, 0.2, -0.1, 0.1)
    for eps in [0.0] + list(sec.get("eps_values", [1e-6])):
        rows.append(["111_tree", eps, 0.0, ward.ward_111_tree(q, p, eps).rel_residual])
    for pm in sec.get("p_values", [0.01]):
        par = _with_p(scen.params, pm)
        res = ward.ward_211_relation(par)
        rows.append(["211_one_loop", -oneloop.solve_E(par.beta, par.e) if par.e else 0.0, pm, res.rel_residual])
    header = ["identity", "eps_m2", "p_m", "rel_residual"]
    return EXIT_OK, [write_csv(out / "ward.csv", header, rows)]


def cmd_verify(scen: Scenario, out: Path, tol: float | None):
    results = acceptance.run_all()
    for r in results:
        print(r.line())
    # timings go to stdout only, keeping the table reproducible
    rows = [[r.number, r.name, r.passed, r.detail] for r in results]
    path = write_csv(out / "acceptance.csv", ["criterion", "name", "passed", "detail"], rows)
    return (EXIT_OK if all(r.passed for r in results) else EXIT_FAIL), [path]


COMMANDS: dict[str, Callable] = {
    "selfenergy": cmd_selfenergy,
    "fixedpoint": cmd_fixedpoint,
    "vertex": cmd_vertex,
    "nullify": cmd_nullify,
    "resum": cmd_resum,
    "field": cmd_field,
    "ward": cmd_ward,
    "verify": cmd_verify,
}


HELP = {
    "selfenergy": "imaginary self-energy coefficients, asymptotic and numeric",
    "fixedpoint": "thermal regulator E by iteration and in closed form",
    "vertex": "vertex contribution J2, numeric and asymptotic",
    "nullify": "tree + J2 + J3 on both paths",
    "resum": "soft integrals, exponent and truncated series",
    "field": "radial profile of the effective potential",
    "ward": "Ward identity residuals",
    "verify": "full acceptance suite",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thermal-ir", description="Infrared checks for the thermal effective Coulomb field.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sp = sub.add_parser(name, help=HELP[name])
        sp.add_argument("--config", type=Path, default=None, help="scenario YAML (default: packaged default)")
        sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
        sp.add_argument("--tol", type=float, default=None, help="override the pass tolerance where one applies")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scen = load(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    tol = args.tol if args.tol is not None else scen.tol
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command != "verify":
            scale_check(scen.params, scen.scheme)
        status, files = COMMANDS[args.command](scen, out, tol)
    except ScaleHierarchyError as exc:
        print(f"hierarchy violation: {exc}", file=sys.stderr)
        return EXIT_HIERARCHY
    write_manifest(out, args.command, scen, files, status)
    for f in files:
        print(f"wrote {f}")
    return status


if __name__ == "__main__":
    sys.exit(main())
