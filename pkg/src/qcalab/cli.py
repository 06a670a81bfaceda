"""Command-line front end.

    qcalab dispersion        --kind fermion --n 64 --theta 0.05 --path x
    qcalab invariants        --seed 1
    qcalab multiparticle-demo --kind fermion --modes "0,0,0,0;0,0,1,2"
    qcalab fields            --n 8 --modes "0,0,1,1,1,0" --t 0.5

A JSON file given with ``--config`` supplies defaults; explicit flags win.
Exit codes: 0 success, 2 configuration error, 3 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from qcalab import export, fields, invariants, multiparticle as mp
from qcalab.coin import build_boson_coin, build_fermion_coin, max_abs
from qcalab.errors import QCAError
from qcalab.lattice import LatticeSpec, MomentumIndex, axis_path, build_blocks, spectrum_scan
from qcalab.spectrum import reference_phases

log = logging.getLogger("qcalab")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3

DEFAULTS = {"kind": "fermion", "n": 8, "dx": 1.0, "dt": 1.0, "theta": 0.0, "format": "csv"}
COMMAND_DEFAULTS = {
    "dispersion": {"path": "x", "workers": None, "out": "dispersion.csv"},
    "invariants": {"debug_corrupt_coin": False, "out": "invariants.json", "format": "json"},
    "multiparticle-demo": {"n": 2, "modes": None, "nmax": None, "out": "multiparticle.json", "format": "json"},
    "fields": {
        "modes": None,
        "random_modes": None,
        "t": 0.0,
        "dispersion_mode": "continuum",
        "debug_corrupt_frequency": False,
        "out": "fields.csv",
    },
}


class ConfigError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--kind", choices=("fermion", "boson"))
    p.add_argument("--n", type=int, help="sites per dimension (even)")
    p.add_argument("--dx", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))


def build_parser() -> argparse.ArgumentParser:
    # argument_default=SUPPRESS keeps unset flags out of the namespace so
    # config-file values can fill them in
    parser = argparse.ArgumentParser(prog="qcalab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", argument_default=argparse.SUPPRESS, help="spectrum scan along a path")
    _add_common(p)
    p.add_argument("--path", help='"x", "y", "z", "diag" or explicit "n,o,p;n,o,p;..."')
    p.add_argument("--workers", type=int)

    p = sub.add_parser("invariants", argument_default=argparse.SUPPRESS, help="run every invariant check")
    _add_common(p)
    p.add_argument("--debug-corrupt-coin", action="store_true", dest="debug_corrupt_coin")

    p = sub.add_parser(
        "multiparticle-demo", argument_default=argparse.SUPPRESS, help="two-picture multiparticle check"
    )
    _add_common(p)
    p.add_argument("--modes", help='"n,o,p,branch;..." (default: two modes)')
    p.add_argument("--nmax", type=int)

    p = sub.add_parser("fields", argument_default=argparse.SUPPRESS, help="photon field snapshot")
    _add_common(p)
    p.add_argument("--modes", help='"n,o,p,pol,re,im;..."')
    p.add_argument("--random-modes", type=int, dest="random_modes")
    p.add_argument("--t", type=float)
    p.add_argument("--dispersion", choices=("continuum", "lattice"), dest="dispersion_mode")
    p.add_argument("--debug-corrupt-frequency", action="store_true", dest="debug_corrupt_frequency")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults with the optional config file; explicit flags win."""
    cmd = args.command
    cfg = {**DEFAULTS, "seed": None, **COMMAND_DEFAULTS[cmd]}
    given = vars(args)
    if given.get("config"):
        try:
            data = json.loads(Path(given["config"]).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        unknown = set(data) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    cfg.update({k: v for k, v in given.items() if k not in ("command", "config")})
    cfg["command"] = cmd
    return cfg


def lattice_from_config(cfg: dict) -> LatticeSpec:
    theta = 0.0 if cfg["kind"] == "boson" and cfg["command"] == "fields" else cfg["theta"]
    if cfg["kind"] == "boson" and theta != 0:
        raise ConfigError("the bosonic walk is massless; --theta must be 0")
    try:
        return LatticeSpec(N=cfg["n"], dx=float(cfg["dx"]), dt=float(cfg["dt"]), theta=float(theta))
    except (QCAError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _coin(kind: str):
    return build_fermion_coin() if kind == "fermion" else build_boson_coin()


def _int_groups(text: str, width: int, what: str) -> list[list[str]]:
    groups = []
    for chunk in str(text).split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [x.strip() for x in chunk.split(",")]
        if len(parts) != width:
            raise ConfigError(f"each {what} entry needs {width} comma-separated values: {chunk!r}")
        groups.append(parts)
    return groups


def parse_path(text: str, spec: LatticeSpec) -> list[MomentumIndex]:
    named = {"x": 0, "y": 1, "z": 2}
    if text in named:
        return axis_path(spec, named[text])
    if text == "diag":
        return [MomentumIndex(n, n, n) for n in range(spec.N // 2 + 1)]
    try:
        return [MomentumIndex(*(int(v) for v in g)) for g in _int_groups(text, 3, "path")]
    except ValueError:
        raise ConfigError(f"bad path {text!r}") from None


def _out_path(cfg: dict) -> Path:
    return Path(cfg["out"])


def cmd_dispersion(cfg: dict) -> int:
    spec = lattice_from_config(cfg)
    coin = _coin(cfg["kind"])
    path = parse_path(cfg["path"], spec)
    if not path:
        raise ConfigError("empty momentum path")
    try:
        rows = spectrum_scan(spec, coin, path, workers=cfg.get("workers"))
        blocks = build_blocks(spec, coin, path)
    except QCAError as exc:
        if isinstance(exc, (IndexError, ValueError)):
            raise ConfigError(str(exc)) from None
        raise
    eye = np.eye(coin.dim)
    bad = max(max_abs(b.U.conj().T @ b.U - eye) for b in blocks)
    if bad > 1e-12:
        log.error("block unitarity residual %.3e", bad)
        return EXIT_INVARIANT

    out_rows = []
    for r in rows:
        ref = reference_phases(cfg["kind"], (r.kx, r.ky, r.kz), spec)
        phase_ref = float(ref[np.argmin(np.abs(ref - r.phase))])
        err = abs(r.phase - phase_ref)
        rel = err / abs(phase_ref) if phase_ref != 0 else err
        out_rows.append((*r, phase_ref, rel))
    header = export.SCAN_HEADER + ("phase_ref", "rel_err")
    export.write_table(_out_path(cfg), header, out_rows, cfg["format"])
    return EXIT_OK


def cmd_invariants(cfg: dict) -> int:
    if cfg["seed"] is None:
        raise ConfigError("invariants runs randomized checks: --seed is required")
    spec = lattice_from_config({**cfg, "kind": "fermion"})
    checks = invariants.run_all(spec, int(cfg["seed"]), corrupt_coin=bool(cfg["debug_corrupt_coin"]))
    report = {
        "config": {k: cfg[k] for k in ("n", "dx", "dt", "theta", "seed")},
        "checks": [c.as_dict() for c in checks],
        "all_pass": all(c.passed for c in checks),
    }
    _emit_json(cfg, report)
    for c in checks:
        if not c.passed:
            log.error("check %s failed: residual %r > %r", c.name, c.residual, c.tol)
    return EXIT_OK if report["all_pass"] else EXIT_INVARIANT


def _emit_json(cfg: dict, obj) -> None:
    if cfg["out"] == "-":
        sys.stdout.write(export.dumps(obj) + "\n")
    else:
        export.write_json(_out_path(cfg), obj)


def _parse_modes(text: str | None, coin_dim: int) -> list[mp.Mode]:
    if text is None:
        return [mp.Mode.of(0, 0, 0, 0), mp.Mode.of(0, 0, 1, coin_dim - 1)]
    try:
        return [mp.Mode.of(*(int(v) for v in g)) for g in _int_groups(text, 4, "mode")]
    except ValueError:
        raise ConfigError(f"bad mode list {text!r}") from None


def cmd_multiparticle_demo(cfg: dict) -> int:
    spec = lattice_from_config(cfg)
    coin = _coin(cfg["kind"])
    stats = mp.FERMI if cfg["kind"] == "fermion" else mp.BOSE
    modes = _parse_modes(cfg["modes"], coin.dim)
    n_max = cfg["nmax"] if cfg["nmax"] is not None else max(len(modes), 1)
    try:
        for m in modes:
            if not 0 <= m.branch < coin.dim:
                raise ConfigError(f"branch {m.branch} out of range for the {cfg['kind']} coin")
        built = mp.build_basis_state(modes, stats, spec, coin, n_max=n_max)
        evolved = mp.evolve_distinguishable(built, spec, coin)
        phases = mp.mode_phases(spec, coin, modes)
        residual = mp.fock_tensor_isomorphism_check(modes, stats, spec, coin, n_max=n_max)
    except QCAError as exc:
        if isinstance(exc, (ValueError, IndexError, KeyError)):
            raise ConfigError(f"{type(exc).__name__}: {exc}") from None
        raise
    total = sum(phases[m] for m in modes)
    overlap = built.inner(evolved)
    expected = complex(np.exp(1j * total))
    basis = mp.ModeBasis(tuple(modes)) if modes else mp.ModeBasis((mp.Mode.of(0, 0, 0, 0),))
    occ = mp.vacuum_state(basis, stats, n_max)
    for m in reversed(modes):
        occ = mp.apply_creation(occ, m)
    occ_evolved = mp.evolve_occupation(occ, phases)
    occ_phase = occ.inner(occ_evolved) / occ.inner(occ) if occ.norm else 0.0
    counts: dict = {}
    for m in modes:
        counts[m] = counts.get(m, 0) + 1
    transcript = {
        "statistics": stats,
        "n_max": n_max,
        "lattice": {k: cfg[k] for k in ("n", "dx", "dt", "theta")},
        "modes": [[*m.index, m.branch] for m in modes],
        "phases": [phases[m] for m in modes],
        "tensor_overlap": {"re": overlap.real, "im": overlap.imag},
        "expected_phase_factor": {"re": expected.real, "im": expected.imag},
        "tensor_phase_error": abs(overlap - expected),
        "occupation_phase_error": abs(occ_phase - expected),
        "ladder_norm": occ.norm,
        "factorial_normalization": math.sqrt(math.prod(math.factorial(c) for c in counts.values())),
        "isomorphism_residual": residual,
        "occupation_state": occ.to_dict(),
    }
    _emit_json(cfg, transcript)
    ok = max(transcript["tensor_phase_error"], transcript["occupation_phase_error"]) <= 1e-10
    return EXIT_OK if ok and residual <= 1e-12 else EXIT_INVARIANT


def _parse_field_modes(cfg: dict, spec: LatticeSpec) -> fields.ModeAmplitudes:
    if cfg["random_modes"] is not None:
        if cfg["seed"] is None:
            raise ConfigError("--random-modes needs --seed")
        count = int(cfg["random_modes"])
        if count <= 0:
            raise ConfigError("no modes requested")
        return fields.random_mode_amplitudes(spec, count, np.random.default_rng(int(cfg["seed"])))
    if cfg["modes"] is None:
        raise ConfigError("no modes requested (use --modes or --random-modes)")
    amps = {}
    try:
        for g in _int_groups(cfg["modes"], 6, "field mode"):
            idx = MomentumIndex(*(int(v) for v in g[:3]))
            amps[(idx, int(g[3]))] = complex(float(g[4]), float(g[5]))
        modes = fields.ModeAmplitudes(spec, amps)
    except (QCAError, ValueError, IndexError) as exc:
        raise ConfigError(f"bad field modes: {exc}") from None
    if not len(modes):
        raise ConfigError("EmptyModes: no modes requested")
    return modes


def cmd_fields(cfg: dict) -> int:
    spec = lattice_from_config({**cfg, "kind": "boson", "theta": 0.0})
    modes = _parse_field_modes(cfg, spec)
    scale = 1.1 if cfg["debug_corrupt_frequency"] else 1.0
    t = float(cfg["t"])
    kw = {"dispersion": cfg["dispersion_mode"], "frequency_scale": scale}
    snap = fields.field_snapshot(modes, t, **kw)
    report = fields.maxwell_residuals(modes, t, **kw)
    out = _out_path(cfg)
    export.write_table(out, fields.SNAPSHOT_HEADER, fields.snapshot_rows(snap), cfg["format"])
    res = {**report.as_dict(), "imag_residue": snap.imag_residue, "photon_energy": fields.photon_energy(modes)}
    export.write_json(out.with_name(out.stem + ".residuals.json"), res)
    return EXIT_OK if max(report.worst(), snap.imag_residue) <= 1e-11 else EXIT_INVARIANT


COMMANDS = {
    "dispersion": cmd_dispersion,
    "invariants": cmd_invariants,
    "multiparticle-demo": cmd_multiparticle_demo,
    "fields": cmd_fields,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg["command"]](cfg)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except QCAError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
