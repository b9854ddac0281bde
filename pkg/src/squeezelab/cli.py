"""Command-line scenario runner.

Every subcommand reads a TOML config (see :mod:`squeezelab.config`), writes
CSV tables with a provenance header and prints JSON summaries on stdout.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
from contextlib import contextmanager
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .algebra import from_bogoliubov
from .channels import b_operator, dp_propagate, privileged_state, schrodinger_propagate
from .config import ScenarioConfig, load_config, parse_complex
from .entropy import delta_t_formula, nu_second_derivative, scan_window, wehrl_gaussian
from .errors import ConfigError, NumericalError, PhysicalityError
from .fockoracle import (
    build_generator,
    gaussian_ket,
    gaussian_to_fock,
    integrate_master,
    moments,
    optical_generator,
    wdp_fock,
)
from .gaussian import STATE_COLUMNS, canonical_frame, default_rng, eigenstate_of, fidelity, purity
from .model import make_optical_model
from .qubit import TRANSCRIPT_COLUMNS, CnotGrid, cnot_apply, not_circuit, not_target, secure_transcript
from .wsolve import solve_w

log = logging.getLogger("squeezelab")

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_PHYSICALITY, EXIT_NUMERICAL = 0, 1, 2, 3, 4


def load_schema() -> dict:
    return json.loads(resources.files("squeezelab").joinpath("schema.json").read_text())


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@contextmanager
def _sink(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path: str | None, command: str, digest: str, columns: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    with _sink(path) as fh:
        fh.write(f"# squeezelab {__version__} {command} config_sha256={digest}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _emit_json(obj, path: str | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=float)
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _parse_times(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"--times: {exc}") from exc


def _setup(args) -> tuple[ScenarioConfig, object, object]:
    cfg = load_config(args.config)
    coeffs = cfg.build_model()
    _, hi = cfg.time_window(coeffs)
    traj = solve_w(coeffs, hi, rel_tol=cfg.rel_tol, strict=True)
    return cfg, coeffs, traj


def cmd_solve_w(args) -> int:
    cfg, coeffs, traj = _setup(args)
    if args.times:
        times = _parse_times(args.times)
        cfg.check_times(coeffs, times, "--times")
        rows = [(t, *traj(t)) for t in times]
    else:
        rows = [(t, *w) for t, w in zip(traj.t, traj.samples)]
    write_csv(args.out, "solve-w", cfg.sha256, ("t", "w1", "w2", "w3", "w4"), rows)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg, coeffs, traj = _setup(args)
    times = _parse_times(args.times)
    cfg.check_times(coeffs, times, "--times")
    s0 = cfg.initial_state(coeffs, traj)
    prop = schrodinger_propagate if args.picture == "schrodinger" else dp_propagate
    rows = []
    for t in times:
        s = prop(coeffs, s0, t, cfg.split, traj)
        rows.append((t, *s.as_row(), purity(s)))
    write_csv(args.out, "simulate", cfg.sha256, ("t", *STATE_COLUMNS, "purity"), rows)
    return EXIT_OK


def cmd_entropy_scan(args) -> int:
    cfg, coeffs, traj = _setup(args)
    eps = cfg.epsilon if args.eps is None else args.eps
    if not eps > 0:
        raise ConfigError("--eps must be positive")
    lo, hi = cfg.time_window(coeffs)
    s0 = privileged_state(coeffs, cfg.t_star, cfg.beta, cfg.split, traj)
    rows = []
    for t in np.linspace(lo, hi, args.points):
        s = dp_propagate(coeffs, s0, float(t), cfg.split, traj)
        rows.append((float(t), wehrl_gaussian(s), purity(s)))
    write_csv(args.out, "entropy-scan", cfg.sha256, ("t", "wehrl", "purity"), rows)

    window = scan_window(coeffs, cfg.t_star, cfg.beta, eps, cfg.split, (lo, hi), traj)
    w4 = traj.point(cfg.t_star).w4
    d2 = nu_second_derivative(coeffs, cfg.t_star, cfg.split, traj)
    formula = delta_t_formula(eps, w4, d2) if d2 > 0 else float("nan")
    _emit_json({
        "epsilon": eps,
        "t_star": cfg.t_star,
        "w4_star": w4,
        "d2_nu": d2,
        "delta_t_formula": formula,
        "scan": {"t_lo": window.t_lo, "t_hi": window.t_hi, "lo_found": window.lo_found,
                 "hi_found": window.hi_found, "half_width": window.half_width},
        "ratio_scan_to_formula": window.half_width / formula,
        "config_sha256": cfg.sha256,
    }, args.summary)
    return EXIT_OK


def _default_not_config() -> ScenarioConfig:
    from .config import parse_config

    data = {"model": {"name": "reference", "params": {"omega": 1.0, "g": 1.0, "c": 2.0}},
            "scenario": {"t_star": 1.0, "beta": "1,0"}}
    digest = hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()
    return parse_config(data, sha256=digest)


def cmd_not_demo(args) -> int:
    cfg = load_config(args.config) if args.config else _default_not_config()
    coeffs = cfg.build_model()
    traj = solve_w(coeffs, cfg.t_star, rel_tol=cfg.rel_tol, strict=True)
    out = not_circuit(coeffs, cfg.beta, cfg.t_star, cfg.split, traj)
    target = not_target(coeffs, cfg.beta, cfg.t_star, cfg.split, traj)
    B, _ = b_operator(traj, cfg.t_star, cfg.split)
    amp = canonical_frame(B) @ out.mean / math.sqrt(2.0 * coeffs.hbar)
    if args.out:
        write_csv(args.out, "not-demo", cfg.sha256, ("label", *STATE_COLUMNS),
                  [("output", *out.as_row()), ("target", *target.as_row())])
    _emit_json({
        "beta": [cfg.beta.real, cfg.beta.imag],
        "t_star": cfg.t_star,
        "w4_star": traj.point(cfg.t_star).w4,
        "amplitude_in_B_frame": [float(amp[0]), float(amp[1])],
        "purity": purity(out),
        "fidelity_to_target": fidelity(out, target),
        "config_sha256": cfg.sha256,
    })
    return EXIT_OK


def cmd_cnot_demo(args) -> int:
    beta = parse_complex(args.beta, "--beta")
    if args.nu < 0:
        raise ConfigError("--nu must be non-negative")
    op = from_bogoliubov(math.sqrt(1.0 + args.nu**2), args.nu)
    grid, table = cnot_apply(beta, op, CnotGrid(args.n, args.half_width))
    digest = hashlib.sha256(json.dumps(
        {"beta": [beta.real, beta.imag], "nu": args.nu, "n": args.n, "half_width": args.half_width},
        sort_keys=True).encode()).hexdigest()
    if args.out:
        stride = max(1, args.stride)
        q1, q2, psi = grid.q1[::stride], grid.q2[::stride], grid.psi[::stride, ::stride]

        def rows():
            for i, x in enumerate(q1):
                for j, y in enumerate(q2):
                    yield x, y, psi[i, j].real, psi[i, j].imag

        write_csv(args.out, "cnot-demo", digest, ("q1", "q2", "re_psi", "im_psi"), rows())
    _emit_json({
        "beta": [beta.real, beta.imag],
        "nu": args.nu,
        "norm": grid.norm,
        "control_probs": grid.control_probs.tolist(),
        "conditional_table": table.tolist(),
        "joint_table": grid.joint_probs().tolist(),
        "config_sha256": digest,
    })
    return EXIT_OK


def cmd_secure_demo(args) -> int:
    cfg, coeffs, traj = _setup(args)
    if not cfg.eavesdrop_times:
        raise ConfigError("missing required key 'secure.eavesdrop_times'")
    rows = secure_transcript(coeffs, cfg.t_star, cfg.beta, cfg.eavesdrop_times, cfg.split, traj)
    write_csv(args.out, "secure-demo", cfg.sha256, TRANSCRIPT_COLUMNS,
              [[r[c] for c in TRANSCRIPT_COLUMNS] for r in rows])
    return EXIT_OK


def _check(report: list, name: str, fn) -> None:
    try:
        entry = fn()
    except (ValueError, NumericalError, PhysicalityError) as exc:
        entry = {"passed": False, "error": str(exc)}
    entry["name"] = name
    report.append(entry)


def run_validation(cfg: ScenarioConfig, seed: int | None = None) -> list[dict]:
    """Gaussian shortcuts against the dense Fock integrator; one entry per check."""
    coeffs = cfg.build_model()
    traj = solve_w(coeffs, cfg.t_star, rel_tol=cfg.rel_tol, strict=True)
    N, dt, t_star = cfg.oracle_n, cfg.oracle_dt, cfg.t_star
    s0 = cfg.initial_state(coeffs, traj)
    rng = default_rng(seed)
    report: list[dict] = []

    def factorization():
        gauss = schrodinger_propagate(coeffs, s0, t_star, cfg.split, traj)
        rho = integrate_master(gaussian_to_fock(s0, N), coeffs, t_star, dt, strict=False)
        mean, cov = moments(rho)
        d_mean = float(np.abs(mean - gauss.mean).max())
        d_cov = float(np.abs(cov - gauss.cov).max())
        d_tr = rho.flags["trace_error"]
        return {"passed": d_mean <= 1e-6 and d_cov <= 1e-5 and d_tr <= 1e-8 and rho.flags["ok"],
                "mean_delta": d_mean, "cov_delta": d_cov, "trace_error": d_tr,
                "min_eigenvalue": rho.flags["min_eigenvalue"]}

    def filtered_ket():
        start = privileged_state(coeffs, t_star, cfg.beta, cfg.split, traj)
        B, _ = b_operator(traj, t_star, cfg.split)
        w4 = traj.point(t_star).w4
        psi = wdp_fock(gaussian_ket(start, N), coeffs, t_star, B, w4, dt)
        target = gaussian_ket(eigenstate_of(B, cfg.beta * math.exp(-0.5 * w4)), N)
        f = float(abs(np.vdot(target, psi)) ** 2)
        return {"passed": bool(f >= 1 - 1e-6), "infidelity": 1.0 - f}

    def generator_symmetry():
        X = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
        rho = X @ X.conj().T
        rho /= np.trace(rho)
        d = build_generator(coeffs, t_star, N)(rho)
        tr = float(abs(np.trace(d)))
        herm = float(np.abs(d - d.conj().T).max())
        return {"passed": tr <= 1e-10 and herm <= 1e-10, "trace": tr, "hermiticity": herm}

    def optical_mapping():
        gamma, nbar = 1.0, 0.5
        X = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
        rho = X @ X.conj().T
        rho /= np.trace(rho)
        d1 = build_generator(make_optical_model(gamma, nbar), 0.0, N)(rho)
        d2 = optical_generator(gamma, nbar, N)(rho)
        delta = float(np.abs(d1 - d2).max())
        return {"passed": delta <= 1e-10, "max_delta": delta}

    _check(report, "factorization_vs_oracle", factorization)
    _check(report, "filtered_ket_eigenstate", filtered_ket)
    _check(report, "generator_trace_hermiticity", generator_symmetry)
    _check(report, "optical_generator_mapping", optical_mapping)
    return report


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    checks = run_validation(cfg)
    passed = all(c["passed"] for c in checks)
    _emit_json({"passed": passed, "checks": checks, "oracle": {"N": cfg.oracle_n, "dt": cfg.oracle_dt},
                "version": __version__, "config_sha256": cfg.sha256}, args.out)
    return EXIT_OK if passed else EXIT_NUMERICAL


def _columns_help(schema: dict, command: str) -> str:
    cols = schema["tables"][command]
    return "columns:\n" + "\n".join(f"  {k:<20} {v}" for k, v in cols.items())


def build_parser() -> argparse.ArgumentParser:
    schema = load_schema()
    exit_help = "exit codes: " + ", ".join(f"{k} {v}" for k, v in schema["exit_codes"].items())
    parser = argparse.ArgumentParser(
        prog="squeezelab",
        description="Gaussian simulations of quadratic dissipative dynamics and the impurity filter.",
        epilog=exit_help,
    )
    parser.add_argument("--version", action="version", version=f"squeezelab {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    def add(name, help_, func, table=None, config=True):
        p = sub.add_parser(name, help=help_, description=help_, formatter_class=fmt,
                           epilog=_columns_help(schema, table) if table else None)
        if config:
            p.add_argument("--config", required=True, help="scenario TOML file")
        p.set_defaults(func=func)
        return p

    p = add("solve-w", "integrate the noise coefficients w1..w4", cmd_solve_w, "solve-w")
    p.add_argument("--times", help="comma-separated output times (default: solver steps)")
    p.add_argument("--out", help="output CSV (default stdout)")

    p = add("simulate", "propagate the initial Gaussian state", cmd_simulate, "simulate")
    p.add_argument("--times", required=True, help="comma-separated output times")
    p.add_argument("--picture", choices=("schrodinger", "dp"), default="schrodinger",
                   help="full master equation or the filtered picture")
    p.add_argument("--out", help="output CSV (default stdout)")

    p = add("entropy-scan", "Wehrl entropy around t_star and the low-noise window",
            cmd_entropy_scan, "entropy-scan")
    p.add_argument("--eps", type=float, help="override entropy.epsilon")
    p.add_argument("--points", type=int, default=201, help="number of tabulated times")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.add_argument("--summary", help="JSON summary path (default stdout)")

    p = add("not-demo", "NOT gate through the dynamics and the impurity filter",
            cmd_not_demo, "not-demo", config=False)
    p.add_argument("--config", help="scenario TOML file (default: reference model, t_star=1, beta=1)")
    p.add_argument("--out", help="CSV with output and target states")

    p = add("cnot-demo", "CNOT on a position grid", cmd_cnot_demo, "cnot-demo", config=False)
    p.add_argument("--beta", default="1,0.5", help="target eigenvalue as re,im")
    p.add_argument("--nu", type=float, default=0.3, help="squeezing |nu| of the qubit basis")
    p.add_argument("--n", type=int, default=512, help="grid points per axis")
    p.add_argument("--half-width", type=float, default=8.0, help="grid half-width in standard deviations")
    p.add_argument("--stride", type=int, default=1, help="write every stride-th grid point")
    p.add_argument("--out", help="grid CSV")

    p = add("secure-demo", "receiver and eavesdroppers filtering at different times",
            cmd_secure_demo, "secure-demo")
    p.add_argument("--out", help="transcript CSV (default stdout)")

    p = add("validate", "compare Gaussian results with the Fock-space oracle", cmd_validate)
    p.add_argument("--out", help="JSON report path (default stdout)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"squeezelab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicalityError as exc:
        print(f"squeezelab: physicality violation: {exc}", file=sys.stderr)
        return EXIT_PHYSICALITY
    except NumericalError as exc:
        print(f"squeezelab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"squeezelab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"squeezelab: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
