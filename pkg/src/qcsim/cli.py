"""Command-line front end: config ingestion, sweep orchestration, data files.

Subcommands: modes, coupling, switchoff, zz, leakage, validate.  Every
run reads a JSON device config (--config), writes deterministic data
files under --out (default ./out) plus a JSON sidecar with metadata and
per-point errors, and finishes by atomically writing a run manifest.

Exit codes: 0 success, 1 usage error, 2 validation failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
import warnings
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .circuit import DeviceConfig, SquidState, device_to_dict, load_device, qubit_spectrum
from .constants import TWO_PI, angular_to_ghz, ghz_to_angular
from .coupling import effective_coupling, switch_off
from .crosstalk import DEFAULT_COUPLER_ANHARM, TruncationSpec, zz_report
from .dynamics import leakage_sweep, propagator
from .errors import ConfigError, LabelingError, RegimeError
from .modes import flux_for_frequency, fundamental_approx, solve_dispersion
from .sweeps import (
    RunManifest,
    device_hash,
    format_float,
    map_points,
    parse_axis,
    write_csv,
    write_json_atomic,
    write_sidecar,
)

_POINT_ERRORS = (ConfigError, RegimeError, LabelingError)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="qcs", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qcs {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="device config JSON")
    common.add_argument("--out", default="./out", help="output directory (default ./out)")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p_modes = sub.add_parser("modes", parents=[common], help="resonator mode sweep over flux")
    p_modes.add_argument("--flux", default="0:0.45:46", help="flux axis start:stop:count")
    p_modes.add_argument("--n-modes", type=int, default=3)
    p_modes.add_argument("--m-max", type=int, default=4)

    p_cpl = sub.add_parser("coupling", parents=[common], help="coupling sweep over coupler frequency")
    p_cpl.add_argument("--omega-c", default="4.2:6.0:91", help="coupler axis (GHz) start:stop:count")

    sub.add_parser("switchoff", parents=[common], help="locate the zero of the net coupling")

    p_zz = sub.add_parser("zz", parents=[common], help="ZZ crosstalk sweep")
    p_zz.add_argument("--omega-c", default="4.3:4.8:51", help="coupler axis (GHz) start:stop:count")
    p_zz.add_argument("--c12", type=float, default=None, help="override qubit-qubit capacitance (fF)")
    p_zz.add_argument(
        "--anharm-mhz",
        type=float,
        default=DEFAULT_COUPLER_ANHARM / TWO_PI * 1e3,
        help="coupler two-photon anharmonicity (MHz)",
    )
    p_zz.add_argument("--levels", type=int, default=4, help="levels per subsystem")

    p_leak = sub.add_parser("leakage", parents=[common], help="gate leakage sweep")
    p_leak.add_argument("--amp", default="3.9:4.3:41", help="pulse amplitude axis (GHz)")
    p_leak.add_argument("--ncz", default="1:20:20", help="gate count axis start:stop:count")
    p_leak.add_argument("--channel", choices=["single", "double"], default="single")
    p_leak.add_argument("--duration-ns", type=float, default=40.0)
    p_leak.add_argument("--idle", type=float, default=None, help="idle coupler frequency (GHz)")

    sub.add_parser("validate", parents=[common], help="run the model invariant battery")
    return parser


def _metadata(device: DeviceConfig, args: argparse.Namespace) -> dict:
    return {
        "device_hash": device_hash(device_to_dict(device)),
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": args.config,
    }


def _emit(
    out_dir: Path,
    name: str,
    header: Sequence[str],
    rows: Sequence[Sequence],
    metadata: dict,
    errors: List[dict],
) -> List[str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    write_csv(csv_path, header, rows)
    sidecar = out_dir / f"{name}.meta.json"
    write_sidecar(sidecar, header, rows, {**metadata, "errors": errors})
    return [str(csv_path), str(sidecar)]


def _run_modes(device: DeviceConfig, args: argparse.Namespace, out_dir: Path) -> List[str]:
    axis = parse_axis(args.flux)
    errors: List[dict] = []

    def point(flux: float):
        try:
            return solve_dispersion(device, SquidState(flux=flux), args.n_modes, args.m_max)
        except _POINT_ERRORS as exc:
            return exc

    results = map_points(point, axis.values())
    rows: List[list] = []
    for flux, res in zip(axis.values(), results):
        if isinstance(res, Exception):
            errors.append({"row": len(rows), "flux": flux, "error": str(res)})
            rows.append([flux, None, None, None, None, None])
            continue
        for mode in res:
            rows.append(
                [
                    flux,
                    float(mode.index),
                    mode.kl,
                    angular_to_ghz(mode.omega),
                    mode.lam,
                    angular_to_ghz(mode.anharmonicity) * 1e3,
                ]
            )
    header = ["flux", "mode", "kl", "freq_ghz", "lambda", "anharm_mhz"]
    return _emit(out_dir, "modes", header, rows, _metadata(device, args), errors)


def _run_coupling(device: DeviceConfig, args: argparse.Namespace, out_dir: Path) -> List[str]:
    axis = parse_axis(args.omega_c)
    errors: List[dict] = []

    def point(f_ghz: float):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return effective_coupling(device, ghz_to_angular(f_ghz))
        except _POINT_ERRORS as exc:
            return exc

    results = map_points(point, axis.values())
    rows: List[list] = []
    for f_ghz, res in zip(axis.values(), results):
        if isinstance(res, Exception):
            errors.append({"row": len(rows), "omega_c_ghz": f_ghz, "error": str(res)})
            rows.append([f_ghz, None, None, None, None])
            continue
        rows.append(
            [
                f_ghz,
                angular_to_ghz(res.g12) * 1e3,
                angular_to_ghz(res.g1c) * 1e3,
                angular_to_ghz(res.g2c) * 1e3,
                angular_to_ghz(res.g_eff) * 1e3,
            ]
        )
    header = ["omega_c_ghz", "g12_mhz", "g1c_mhz", "g2c_mhz", "geff_mhz"]
    return _emit(out_dir, "coupling", header, rows, _metadata(device, args), errors)


def _run_switchoff(device: DeviceConfig, args: argparse.Namespace, out_dir: Path) -> List[str]:
    result = switch_off(device)
    document = {
        "omega_off_ghz": float(format_float(angular_to_ghz(result.omega_off))),
        "flux_off": None if result.flux_off is None else float(format_float(result.flux_off)),
        "residual_khz": float(format_float(angular_to_ghz(result.residual) * 1e6)),
        "dispersive_guard": float(format_float(result.guard)),
    }
    print(json.dumps(document, sort_keys=True))
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "switchoff.json"
    write_json_atomic(path, document)
    sidecar = out_dir / "switchoff.meta.json"
    write_json_atomic(
        sidecar,
        {
            **_metadata(device, args),
            "roots_ghz": [angular_to_ghz(r) for r in result.roots],
            "band_ghz": [angular_to_ghz(result.band[0]), angular_to_ghz(result.band[1])],
        },
    )
    return [str(path), str(sidecar)]


def _run_zz(device: DeviceConfig, args: argparse.Namespace, out_dir: Path) -> List[str]:
    axis = parse_axis(args.omega_c)
    if args.c12 is not None:
        device = dataclasses.replace(
            device, caps=dataclasses.replace(device.caps, c12=args.c12)
        )
    anharm = ghz_to_angular(args.anharm_mhz * 1e-3)
    trunc = TruncationSpec(args.levels, args.levels, args.levels)
    errors: List[dict] = []

    def point(f_ghz: float):
        try:
            return zz_report(device, ghz_to_angular(f_ghz), trunc, anharm)
        except _POINT_ERRORS as exc:
            return exc

    results = map_points(point, axis.values())
    rows: List[list] = []
    for f_ghz, res in zip(axis.values(), results):
        if isinstance(res, Exception):
            errors.append({"row": len(rows), "omega_c_ghz": f_ghz, "error": str(res)})
            rows.append([f_ghz, None, None, None, None, None])
            continue
        to_khz = lambda w: angular_to_ghz(w) * 1e6  # noqa: E731
        rows.append(
            [
                f_ghz,
                to_khz(res.xi2),
                to_khz(res.xi3),
                to_khz(res.xi4),
                to_khz(res.xi_pert),
                to_khz(res.xi_exact),
            ]
        )
    header = ["omega_c_ghz", "xi2_khz", "xi3_khz", "xi4_khz", "xi_pert_khz", "xi_exact_khz"]
    return _emit(out_dir, "zz", header, rows, _metadata(device, args), errors)


def _run_leakage(device: DeviceConfig, args: argparse.Namespace, out_dir: Path) -> List[str]:
    amp_axis = parse_axis(args.amp)
    ncz_axis = parse_axis(args.ncz)
    if args.idle is None:
        idle = solve_dispersion(device, SquidState(flux=0.0), 1)[0].omega
    else:
        idle = ghz_to_angular(args.idle)
    result = leakage_sweep(
        device,
        idle,
        [ghz_to_angular(a) for a in amp_axis.values()],
        list(ncz_axis.int_values()),
        channel=args.channel,
        duration=args.duration_ns,
    )
    rows: List[list] = []
    i = 0
    for amp in result.axes["amp_ghz"]:
        for ncz in result.axes["n_cz"]:
            rows.append(
                [
                    amp,
                    float(ncz),
                    result.columns["p_comp"][i],
                    result.columns["p_leak"][i],
                    args.channel,
                ]
            )
            i += 1
    header = ["amp_ghz", "n_cz", "p_comp", "p_leak", "channel"]
    metadata = {**_metadata(device, args), **result.metadata}
    return _emit(out_dir, "leakage", header, rows, metadata, [])


def _validate_checks(device: DeviceConfig) -> List[tuple]:
    """(name, ok, detail) triples for the built-in invariant battery."""
    checks: List[tuple] = []

    def run(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
        except Exception as exc:  # report, keep going
            checks.append((name, False, str(exc)))

    def monotone():
        grid = np.linspace(0.0, 0.45, 16)
        freqs = [solve_dispersion(device, SquidState(flux=f), 1)[0].omega for f in grid]
        if any(b >= a for a, b in zip(freqs, freqs[1:])):
            raise AssertionError("fundamental mode not strictly decreasing with flux")

    def approx():
        for flux in (0.0, 0.2, 0.4):
            exact = solve_dispersion(device, SquidState(flux=flux), 1)[0].omega
            est = fundamental_approx(device, SquidState(flux=flux))
            if abs(est - exact) / exact > 0.02:
                raise AssertionError(f"analytic estimate off by >2% at flux {flux}")

    def mediated_identity():
        w_probe = max(qubit_spectrum(device.qubit1).omega, qubit_spectrum(device.qubit2).omega)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = effective_coupling(device, w_probe + TWO_PI * 0.4)
        lhs = rep.mediated
        rhs = 0.5 * rep.g1c * rep.g2c * (
            1.0 / rep.delta1 + 1.0 / rep.delta2 - 1.0 / rep.lambda1 - 1.0 / rep.lambda2
        )
        if abs(lhs - rhs) > 1e-12 * max(abs(lhs), 1e-30):
            raise AssertionError("mediated-term identity broken")

    def hamiltonian_structure():
        from .crosstalk import DEFAULT_COUPLER_ANHARM, TruncationSpec, build_hamiltonian, coupler_shifts

        w_probe = max(qubit_spectrum(device.qubit1).omega, qubit_spectrum(device.qubit2).omega)
        trunc = TruncationSpec()
        h = build_hamiltonian(
            device, w_probe + TWO_PI * 0.4, coupler_shifts(DEFAULT_COUPLER_ANHARM, 4), trunc
        )
        if not np.array_equal(h, h.T):
            raise AssertionError("three-body Hamiltonian not symmetric")
        d1, dc, d2 = trunc.dims
        total = np.array(
            [n1 + nc + n2 for n1 in range(d1) for nc in range(dc) for n2 in range(d2)]
        )
        nz = np.argwhere(h != 0.0)
        if not np.all(total[nz[:, 0]] == total[nz[:, 1]]):
            raise AssertionError("Hamiltonian mixes excitation-number blocks")

    def unitarity():
        for g, delta, t in ((0.05, 0.0, 10.0), (0.02, 0.4, 37.0), (0.08, -1.0, 5.0)):
            u = propagator(delta / 2, -delta / 2, g, t)
            dev = np.abs(u.conj().T @ u - np.eye(2)).max()
            if dev > 1e-12:
                raise AssertionError(f"propagator unitarity off by {dev:.1e}")

    def roundtrip():
        target = solve_dispersion(device, SquidState(flux=0.25), 1)[0].omega
        flux = flux_for_frequency(device, target)
        if abs(flux - 0.25) > 1e-6:
            raise AssertionError(f"flux round trip off by {abs(flux - 0.25):.2e}")

    def zz_consistency():
        w_probe = max(qubit_spectrum(device.qubit1).omega, qubit_spectrum(device.qubit2).omega)
        rep = zz_report(device, w_probe + TWO_PI * 0.4)
        tol = max(0.25 * abs(rep.xi_exact), TWO_PI * 1e-6)
        if abs(rep.xi_exact - rep.xi_pert) > tol:
            raise AssertionError(
                f"perturbative/exact mismatch {abs(rep.xi_exact - rep.xi_pert):.3e} rad/ns"
            )

    run("flux monotonicity", monotone)
    run("analytic-approximation consistency", approx)
    run("mediated-coupling identity", mediated_identity)
    run("Hamiltonian symmetry and block structure", hamiltonian_structure)
    run("propagator unitarity", unitarity)
    run("flux inversion round trip", roundtrip)
    run("perturbative vs exact crosstalk", zz_consistency)
    return checks


def _run_validate(device: DeviceConfig, args: argparse.Namespace, out_dir: Path) -> List[str]:
    checks = _validate_checks(device)
    for name, ok, detail in checks:
        print(f"{'ok  ' if ok else 'FAIL'} - {name}" + (f": {detail}" if detail else ""))
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "validate.json"
    write_json_atomic(
        path,
        {
            **_metadata(device, args),
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in checks],
        },
    )
    if not all(ok for _, ok, _ in checks):
        raise _ValidationFailure("one or more invariant checks failed")
    return [str(path)]


class _ValidationFailure(Exception):
    pass


_RUNNERS = {
    "modes": _run_modes,
    "coupling": _run_coupling,
    "switchoff": _run_switchoff,
    "zz": _run_zz,
    "leakage": _run_leakage,
    "validate": _run_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out)
    started = time.monotonic()
    try:
        device = load_device(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, RegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        outputs = _RUNNERS[args.subcommand](device, args, out_dir)
    except (ConfigError, RegimeError, LabelingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        _write_manifest(args, out_dir, [], time.monotonic() - started)
        return 2
    except ValueError as exc:
        # Bad axis specs and similar argument problems are usage errors.
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1
    _write_manifest(args, out_dir, outputs, time.monotonic() - started)
    return 0


def _write_manifest(args, out_dir: Path, outputs: List[str], duration: float) -> None:
    flags = {
        key: value
        for key, value in vars(args).items()
        if key not in ("subcommand", "config", "out") and value is not None
    }
    RunManifest(
        config_path=str(args.config),
        subcommand=args.subcommand,
        flags=flags,
        output_paths=tuple(outputs),
        duration_s=duration,
    ).write(out_dir)


if __name__ == "__main__":
    sys.exit(main())
