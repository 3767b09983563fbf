"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 bad configuration,
3 solver / inversion / simulation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from scipy import constants

from . import verify as verify_mod
from .catalog import CatalogEntry, catalog_energy, catalog_radius
from .core import (
    Coulomb,
    DiscreteParams,
    Extrapolation,
    Linear,
    Logarithmic,
    PhaseState,
    Polynomial,
    read_tabulated_csv,
    write_tabulated_csv,
)
from .dynamics import check_closure, circular_orbit_state, simulate
from .errors import (
    CollapseError,
    DomainError,
    MonotonicityError,
    NegativeRadicandError,
    RangeError,
    ReconstructionCheckError,
    SolverError,
)
from .inverse import (
    HydrogenLaw,
    LinearLaw,
    PowerLaw,
    beta_epsilon_conversions,
    hydrogen_potential,
    oscillator_potential,
    radius_profile,
    read_law_csv,
    reconstruct_potential,
    reconstruction_sidecar,
    write_sidecar,
    default_radius_grid,
)
from .spectrum import SolverOptions, compute_spectrum

EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3

RUNTIME_ERRORS = (
    SolverError,
    NegativeRadicandError,
    RangeError,
    MonotonicityError,
    CollapseError,
    ReconstructionCheckError,
)

# ev-sec preset: energies in eV, time in s, lengths in m, so mass is in eV s^2 / m^2
UNIT_PRESETS = {
    "working": {},
    "ev-sec": {"mass": constants.m_e / constants.e, "gamma": 13.6},
}

POTENTIALS = (
    "coulomb",
    "linear",
    "logarithmic",
    "polynomial",
    "hydrogen-reconstructed",
    "oscillator-reconstructed",
    "tabulated",
)


class ConfigError(Exception):
    pass


def parse_range(text: str) -> tuple[int, int]:
    """``"3"`` -> (3, 3); ``"1..5"`` -> (1, 5)."""
    text = str(text).strip()
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise ConfigError(f"bad --n range {text!r}; expected N or A..B") from exc
    if not 1 <= lo <= hi:
        raise ConfigError(f"bad --n range {text!r}; need 1 <= A <= B")
    return lo, hi


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file whose keys mirror the flags (flags win)")
    p.add_argument("--tau", type=float, default=1.0, help="time quantum")
    p.add_argument("--mass", type=float, default=None, help="particle mass (default 1, or the unit preset)")
    p.add_argument("--units", choices=sorted(UNIT_PRESETS), default="working")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--tol", type=float, default=1e-12, help="relative residual tolerance")


def _potential_flags(p: argparse.ArgumentParser, required=True):
    p.add_argument("--potential", choices=POTENTIALS, required=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--pot-xi", type=float, help="xi frozen into a reconstructed potential (default: from tau, mass)")
    p.add_argument("--potential-csv", help="r,U table for --potential tabulated")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtspectra", description="Discrete-time orbits and spectra.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="orbit radii and energies of a potential")
    _common(p)
    _potential_flags(p)
    p.add_argument("--n", default="1..10")
    p.add_argument("--skip-no-orbit", action="store_true", help="drop leading n without a real orbit")

    p = sub.add_parser("reconstruct", help="tabulate a potential from a prescribed spectrum")
    _common(p)
    p.add_argument("--law", choices=("hydrogen", "linear", "power"))
    p.add_argument("--spectrum-csv", help="n,E table (tabulated law)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--coef", type=float)
    p.add_argument("--exponent", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--n-max", type=float, default=64.0, help="outermost orbit index covered by the grid")
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--with-slopes", action="store_true", help="add a dU column holding the exact knot slopes")

    p = sub.add_parser("simulate", help="iterate the discrete dynamics")
    _common(p)
    _potential_flags(p)
    p.add_argument("--n", help="orbit indices to start on (circular orbits)")
    p.add_argument("--state", help="explicit initial state r,p_r,phi,p_phi")
    p.add_argument("--steps", type=int, help="number of steps (default: n for orbit mode)")

    p = sub.add_parser("verify", help="run the verification suites")
    _common(p)
    p.add_argument("--suite", choices=("all", *verify_mod.SUITES), default="all")
    p.add_argument("--n-max", type=int, help="closure suite: scan n = 1..N")

    p = sub.add_parser("catalog", help="closed-form spectra of the catalog potentials")
    _common(p)
    p.add_argument("--kind", choices=("coulomb", "linear", "logarithmic", "polynomial"), required=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--n", default="1..10")
    return parser


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = set(k.replace("-", "_") for k in cfg) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        subparser.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
        args = parser.parse_args(argv)
    return args


def make_params(args) -> DiscreteParams:
    preset = UNIT_PRESETS[args.units]
    mass = args.mass if args.mass is not None else preset.get("mass", 1.0)
    return DiscreteParams(args.tau, mass)


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError(f"{getattr(args, 'potential', None) or args.command} needs {', '.join(missing)}")


def make_potential(args, params: DiscreteParams):
    kind = args.potential
    if kind is None:
        raise ConfigError("--potential is required")
    gamma = args.gamma if args.gamma is not None else UNIT_PRESETS[args.units].get("gamma")
    if kind == "coulomb":
        _need(args, "alpha")
        return Coulomb(args.alpha)
    if kind == "linear":
        _need(args, "alpha")
        return Linear(args.alpha)
    if kind == "logarithmic":
        _need(args, "alpha")
        return Logarithmic(args.alpha)
    if kind == "polynomial":
        _need(args, "alpha", "sigma")
        return Polynomial(args.alpha, args.sigma)
    xi = args.pot_xi if args.pot_xi is not None else params.xi
    if kind == "hydrogen-reconstructed":
        if gamma is None:
            raise ConfigError("hydrogen-reconstructed needs --gamma")
        beta = args.beta
        if beta is None:
            if args.epsilon is None:
                raise ConfigError("hydrogen-reconstructed needs --beta or --epsilon")
            beta = beta_epsilon_conversions("hydrogen", args.epsilon, gamma, xi).derived
        return hydrogen_potential(gamma, beta, xi)
    if kind == "oscillator-reconstructed":
        _need(args, "alpha")
        beta = args.beta
        if beta is None:
            eps = args.epsilon if args.epsilon is not None else 0.5 * args.alpha
            beta = beta_epsilon_conversions("oscillator", eps, args.alpha, xi).derived
        return oscillator_potential(args.alpha, beta, xi)
    _need(args, "potential_csv")
    return read_tabulated_csv(Path(args.potential_csv), extrapolation=Extrapolation.CLAMP_SLOPE)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_spectrum(args) -> int:
    params = make_params(args)
    pot = make_potential(args, params)
    lo, hi = parse_range(args.n)
    table = compute_spectrum(pot, params, lo, hi, SolverOptions(tol=args.tol), skip_no_orbit=args.skip_no_orbit)
    _emit(table.to_json() if args.format == "json" else table.to_csv(), args.out)
    if table.skipped:
        print(f"no real orbit for n = {list(table.skipped)}", file=sys.stderr)
    return 0


def _make_law(args):
    if args.spectrum_csv:
        return read_law_csv(Path(args.spectrum_csv)), None
    gamma = args.gamma if args.gamma is not None else UNIT_PRESETS[args.units].get("gamma")
    if args.law == "hydrogen":
        if gamma is None:
            raise ConfigError("hydrogen law needs --gamma")
        return HydrogenLaw(gamma), "hydrogen"
    if args.law == "linear":
        _need(args, "alpha")
        return LinearLaw(args.alpha), "oscillator"
    if args.law == "power":
        _need(args, "coef", "exponent")
        return PowerLaw(args.coef, args.exponent), None
    raise ConfigError("reconstruct needs --law or --spectrum-csv")


def cmd_reconstruct(args) -> int:
    params = make_params(args)
    law, closed_kind = _make_law(args)
    _need(args, "epsilon")
    n_max = args.n_max
    if args.spectrum_csv:
        n_max = min(n_max, float(law.n_max))
    profile = radius_profile(law, params, args.epsilon)
    grid = default_radius_grid(profile, n_max, args.points)
    pot = reconstruct_potential(law, params, args.epsilon, grid)
    meta = reconstruction_sidecar(law, params, args.epsilon)
    if closed_kind is not None:
        if closed_kind == "hydrogen":
            closed = hydrogen_potential(law.gamma, meta["beta"]["derived"], params.xi)
        else:
            closed = oscillator_potential(law.alpha, max(meta["beta"]["derived"], 0.0), params.xi)
        dev = float(np.max(np.abs(pot.u_values / closed.value(pot.r_grid) - 1.0)))
        meta["overlay"] = {"closed_form": closed.describe(), "max_relative_deviation": dev}
        print(f"max relative deviation from closed form: {dev:.3e}", file=sys.stderr)
    if args.format == "json":
        meta["r"] = [float(x) for x in pot.r_grid]
        meta["U"] = [float(x) for x in pot.u_values]
        _emit(json.dumps(meta, indent=2) + "\n", args.out)
        return 0
    _emit(write_tabulated_csv(pot, slopes=args.with_slopes), args.out)
    if args.out:
        write_sidecar(meta, Path(args.out).with_suffix(".json"))
    return 0


def _parse_state(text):
    try:
        values = [float(v) for v in str(text).split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --state {text!r}") from exc
    if len(values) != 4:
        raise ConfigError("--state needs four comma-separated numbers r,p_r,phi,p_phi")
    return PhaseState(*values)


def _suffixed(out, n):
    path = Path(out)
    return path.with_name(f"{path.stem}_n{n}{path.suffix or '.csv'}")


def cmd_simulate(args) -> int:
    params = make_params(args)
    pot = make_potential(args, params)
    if args.state is not None:
        if args.steps is None:
            raise ConfigError("explicit --state needs --steps")
        traj = simulate(_parse_state(args.state), pot, params, args.steps)
        _emit(traj.to_csv(), args.out)
        return 0
    if args.n is None:
        raise ConfigError("simulate needs --n (orbit mode) or --state")
    lo, hi = parse_range(args.n)
    table = compute_spectrum(pot, params, lo, hi, SolverOptions(tol=args.tol))
    chunks = []
    for row in table.rows:
        steps = args.steps if args.steps is not None else row.n
        traj = simulate(circular_orbit_state(row, params), pot, params, max(steps, row.n))
        rep = check_closure(traj, row.n, 1e-12 * row.n, r_tol=1e-12 * row.r_n, p_r_tol=1e-12 * row.r_n)
        header = (
            f"# closure n={row.n} r_n={row.r_n!r} E_n={row.e_n!r} "
            f"phi_residual={rep.phi_residual:.3e} r_residual={rep.r_residual:.3e} "
            f"p_r_residual={rep.p_r_residual:.3e} passed={rep.passed}\n"
        )
        text = header + traj.to_csv()
        if args.out and len(table.rows) > 1:
            _suffixed(args.out, row.n).write_text(text)
        else:
            chunks.append(text)
    if chunks:
        _emit("".join(chunks), args.out)
    return 0


def cmd_verify(args) -> int:
    results = verify_mod.run(args.suite, n_max=args.n_max)
    lines = [res.line() for res in results]
    for res in results:
        if "table" in res.extra:
            lines.append(res.extra["table"])
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if all(res.passed for res in results) else EXIT_VERIFY


def cmd_catalog(args) -> int:
    if args.kind is None or args.alpha is None:
        raise ConfigError("catalog needs --kind and --alpha")
    params = make_params(args)
    entry = CatalogEntry(args.kind, args.alpha, args.sigma)
    lo, hi = parse_range(args.n)
    rows = [(n, catalog_radius(entry, n, params.xi), catalog_energy(entry, n, params.xi)) for n in range(lo, hi + 1)]
    if args.format == "json":
        text = json.dumps({
            "params": params.to_dict(),
            "entry": {"kind": entry.kind, "alpha": entry.alpha, "sigma": entry.sigma},
            "rows": [{"n": n, "r_n": r, "E_n": e} for n, r, e in rows],
        }, indent=2) + "\n"
    else:
        text = "n,r_n,E_n\n" + "".join(f"{n},{r!r},{e!r}\n" for n, r, e in rows)
    _emit(text, args.out)
    return 0


COMMANDS = {
    "spectrum": cmd_spectrum,
    "reconstruct": cmd_reconstruct,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "catalog": cmd_catalog,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RUNTIME_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
