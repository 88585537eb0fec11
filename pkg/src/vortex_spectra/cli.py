"""Batch front door: parse profile configs, dispatch analyses, emit files.

Every command loads a profile config, runs one analysis, and writes CSV
or JSON.  Outputs are deterministic byte-for-byte for a fixed config:
no timestamps, sorted keys, repr-round-tripped floats; each file embeds
the tool version and a hash of the resolved configuration.

Exit codes: 0 success, 2 validation failure, 3 numeric failure (JSON
diagnostics on stderr), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import dispersion, kernel_transversality, modes, operator_lab, prufer
from .errors import (
    BadTable,
    NonMonotone,
    NotAdmissible,
    ProfileError,
    SignChange,
    VortexSpectraError,
)
from .profile import constants, load_profile, validate_hypotheses

__all__ = ["main", "build_parser"]


def _config_hash(args, profile_bytes):
    payload = {k: v for k, v in sorted(vars(args).items())
               if k not in ("out", "func")}
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob + profile_bytes).hexdigest()[:12]


def _emit(args, meta, payload, rows, header):
    """Write JSON (payload) or CSV (rows) with embedded provenance."""
    if args.format == "json":
        document = {"meta": meta}
        document.update(payload)
        text = json.dumps(document, indent=2, sort_keys=True,
                          default=float) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# vortex-spectra {meta['tool_version']} "
                  f"config={meta['config_hash']}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating))
                             else v for v in row])
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _window(text):
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def cmd_analyze(args, profile):
    report = validate_hypotheses(profile, grid_size=args.grid)
    c = constants(profile)
    payload = {
        "validation": report.as_dict(),
        "constants": {
            "kappa1": c.kappa1,
            "kappa2": c.kappa2,
            "amplitude": c.amplitude,
            "f0_at_0": c.f0_at_0,
            "f0_at_1": c.f0_at_1,
            "f0p_at_1": c.f0p_at_1,
        },
    }
    rows = [(k, v) for k, v in sorted(payload["constants"].items())]
    rows += [("min_slope", report.min_slope), ("sign", report.sign)]
    return payload, rows, ("quantity", "value")


def cmd_scan(args, profile):
    if args.regime == "scarcity":
        scan = dispersion.scan_scarcity(profile, args.m, tol=args.tol,
                                        samples=args.samples,
                                        grid_size=args.grid)
    else:
        scan = dispersion.scan_abundance(profile, args.m, alpha=args.alpha,
                                         tol=args.tol, samples=args.samples,
                                         grid_size=args.grid)
    payload = {
        "m": scan.n,
        "regime": scan.regime,
        "window": list(scan.window),
        "omega": list(scan.omega_samples),
        "zeta": list(scan.zeta_values),
        "brackets": [list(b) for b in scan.brackets],
        "roots": scan.roots,
        "root_residuals": scan.root_residuals,
        "sign_change_found": scan.sign_change_found,
        "endpoint_values": list(scan.endpoint_values),
    }
    rows = [(w, z, "") for w, z in zip(scan.omega_samples, scan.zeta_values)]
    rows += [(r, res, "root") for r, res in
             zip(scan.roots, scan.root_residuals)]
    return payload, rows, ("omega", "zeta", "kind")


def cmd_find_eigenvalues(args, profile):
    found = []
    if args.regime == "scarcity":
        bound = dispersion.scarcity_bound(profile)
        hi = min(args.m_max if args.m_max else args.m, int(bound))
        for m in range(args.m, hi + 1):
            scan = dispersion.scan_scarcity(profile, m, tol=args.tol,
                                            samples=args.samples,
                                            grid_size=args.grid)
            for root, res in zip(scan.roots, scan.root_residuals):
                found.append({"m": m, "omega": root, "residual": res})
    else:
        m_used, scan = dispersion.find_abundance_root(
            profile, args.m, alpha=args.alpha, tol=args.tol,
            samples=args.samples, grid_size=args.grid)
        for root, res in zip(scan.roots, scan.root_residuals):
            found.append({"m": m_used, "omega": root, "residual": res})
    payload = {"eigenvalues": found}
    rows = [(e["m"], e["omega"], e["residual"]) for e in found]
    return payload, rows, ("m", "omega", "zeta_residual")


def cmd_certify(args, profile):
    cert = dispersion.certify(profile, args.m, args.omega, N=args.n_max,
                              tol=args.tol, grid_size=args.grid)
    payload = {
        "m": cert.m,
        "omega_m": cert.omega_m,
        "zeta_residual": cert.zeta_residual,
        "higher_mode_margins": [list(p) for p in cert.higher_mode_margins],
        "singular_set_distance": cert.singular_set_distance,
        "mode0_distance": cert.mode0_distance,
    }
    rows = [(n, margin) for n, margin in cert.higher_mode_margins]
    return payload, rows, ("mode", "zeta_margin")


def cmd_kernel(args, profile):
    kg = kernel_transversality.kernel_generator(
        profile, args.m, args.omega, tol=args.tol, grid_size=args.grid)
    payload = {
        "m": kg.m,
        "omega_m": kg.omega_m,
        "normalization_check": kg.normalization_check,
        "normalization_target": 0.5 / (kg.m + 1.0),
        "kernel_residual": kg.kernel_residual,
        "grid": list(kg.grid),
        "h_star": list(kg.h_star),
    }
    rows = list(zip(kg.grid, kg.h_star))
    return payload, rows, ("r", "h_star")


def cmd_transversality(args, profile):
    rep = kernel_transversality.transversality(
        profile, args.m, args.omega, tol=args.tol, grid_size=args.grid)
    payload = {
        "m": rep.m,
        "omega_m": rep.omega_m,
        "I_m": rep.I_m,
        "parts": list(rep.parts),
        "kappa": None if np.isnan(rep.kappa) else rep.kappa,
        "kappa_laplace": None if np.isnan(rep.kappa_laplace)
        else rep.kappa_laplace,
        "verdict": rep.verdict,
        "error_bar": rep.error_bar,
        "dominance": rep.dominance,
    }
    rows = [("I_m", rep.I_m), ("I_m_1", rep.parts[0]),
            ("I_m_2", rep.parts[1]), ("I_m_3", rep.parts[2]),
            ("kappa", rep.kappa), ("error_bar", rep.error_bar),
            ("verdict", rep.verdict)]
    return payload, rows, ("quantity", "value")


def cmd_operator_spectrum(args, profile):
    op = operator_lab.discretize(profile, args.omega, args.n, N=args.nystrom)
    import scipy.linalg as sla

    eigvals = np.sort(sla.eigh(op.sym_matrix, eigvals_only=True))
    count = args.count if args.count else len(eigvals)
    payload = {
        "n": args.n,
        "omega": args.omega,
        "N": args.nystrom,
        "eigenvalues": list(eigvals[:count]),
        "smallest": float(eigvals[0]),
    }
    rows = [(args.n, args.omega, args.nystrom, i, v)
            for i, v in enumerate(eigvals[:count])]
    return payload, rows, ("n", "omega", "N", "index", "eigenvalue")


def cmd_mode0(args, profile):
    lo, hi = args.window
    found = prufer.mode0_exceptional_set(
        profile, (lo, hi), grid=args.samples, tol=args.tol)
    payload = {
        "window": [lo, hi],
        "tolerance": args.tol,
        "exceptional_omega": found,
    }
    rows = [(w,) for w in found]
    return payload, rows, ("omega",)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="vortex-spectra",
        description="Spectral and bifurcation analysis around radial "
                    "monotone vortex profiles.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, omega=False, m=False):
        p.add_argument("--profile", required=True,
                       help="profile config file (JSON or TOML key/value)")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--grid", type=int, default=512,
                       help="radial grid size for generator solves")
        if omega:
            p.add_argument("--omega", type=float, required=True)
        if m:
            p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("analyze", help="validate profile, report constants")
    common(p)
    p.set_defaults(func=cmd_analyze)
    p.set_defaults(grid=256)

    p = sub.add_parser("scan-dispersion", help="sample zeta and bracket roots")
    common(p, m=True)
    p.add_argument("--regime", choices=("scarcity", "abundance"),
                   required=True)
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--samples", type=int, default=17)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("find-eigenvalues",
                       help="locate dispersion roots (escalates m in the "
                            "abundance regime)")
    common(p, m=True)
    p.add_argument("--regime", choices=("scarcity", "abundance"),
                   required=True)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--samples", type=int, default=17)
    p.set_defaults(func=cmd_find_eigenvalues)

    p = sub.add_parser("certify", help="certify a one-dimensional kernel")
    common(p, omega=True, m=True)
    p.add_argument("--n-max", type=int, default=8)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("kernel", help="kernel generator at a certified root")
    common(p, omega=True, m=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("transversality",
                       help="crossing integral I_m and parts")
    common(p, omega=True, m=True)
    p.set_defaults(func=cmd_transversality)

    p = sub.add_parser("operator-spectrum",
                       help="eigenvalues of the discretized operator")
    common(p, omega=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nystrom", type=int, default=256,
                   help="number of Nystrom quadrature nodes")
    p.add_argument("--count", type=int, default=12,
                   help="how many eigenvalues to report (0 = all)")
    p.set_defaults(func=cmd_operator_spectrum)

    p = sub.add_parser("mode0", help="mode-zero exceptional set in a window")
    common(p)
    p.add_argument("--window", type=_window, required=True,
                   metavar="LO:HI")
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(func=cmd_mode0)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        profile_bytes = Path(args.profile).read_bytes()
    except OSError as exc:
        print(f"cannot read profile config: {exc}", file=sys.stderr)
        return 4
    try:
        profile = load_profile(args.profile)
        meta = {
            "tool_version": __version__,
            "config_hash": _config_hash(args, profile_bytes),
            "command": args.command,
        }
        payload, rows, header = args.func(args, profile)
    except (ProfileError, NonMonotone, SignChange, BadTable,
            NotAdmissible) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        report = getattr(exc, "report", None)
        if report is not None:
            diag["report"] = report.as_dict()
        print(json.dumps(diag, indent=2, sort_keys=True), file=sys.stderr)
        return 2
    except VortexSpectraError as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(diag, indent=2, sort_keys=True), file=sys.stderr)
        return 3
    try:
        _emit(args, meta, payload, rows, header)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
