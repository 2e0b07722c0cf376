"""Command-line front end: ``dfalgebra {verify,decompose,commutant,gns,simulate,version}``.

Every command prints one JSON document (unless ``--quiet``) and optionally
writes it to ``--json``. Exit status 0 means every check held, 1 means a
check failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .df import (
    GENERATOR_SETS,
    commutant,
    expected_casimir,
    two_qubit_factored_space,
    two_qubit_pi_tau,
    verify_relations,
)
from .gns import (
    MatrixAlgebra,
    StateFunctional,
    gns_construct,
    generated_algebra,
    pauli_algebra,
    state_from_pauli_expectations,
)
from .opensys import random_state
from .spin import decompose, factorize, format_spin, total_spin
from .scenarios import get_preset, load_config, run_scenario, scenario_names

VERIFY_TARGETS = ["two-qubit", "three-qubit", "four-qubit-j0", "four-qubit-j1"]


@dataclass
class RunManifest:
    command: str
    config_digest: str
    seeds: list = field(default_factory=list)
    tool_version: str = __version__
    timestamp: str = ""
    outputs: list = field(default_factory=list)


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()


def _emit(args, payload: dict, manifest: RunManifest) -> None:
    if args.json:
        manifest.outputs.append(str(args.json))
    manifest.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    payload = {**payload, "manifest": asdict(manifest)}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.json:
        Path(args.json).write_text(text + "\n")
    if not args.quiet:
        print(text)


def _read_yaml(path) -> dict:
    return yaml.safe_load(Path(path).read_text()) or {}


def cmd_verify(args) -> int:
    targets = VERIFY_TARGETS if args.target == "all" else [args.target]
    reports = []
    ok = True
    for target in targets:
        for g in GENERATOR_SETS[target](args.variant):
            rep = verify_relations(g)
            passed = rep.passed(args.tol, expected_casimir(g.name))
            ok = ok and passed
            reports.append({**rep.to_json(), "expected_casimir": expected_casimir(g.name), "passed": passed})
    payload = {"target": args.target, "variant": args.variant, "tol": args.tol,
               "reports": reports, "passed": ok}
    _emit(args, payload, RunManifest("verify", _digest([args.target, args.variant, args.tol])))
    return 0 if ok else 1


def cmd_decompose(args) -> int:
    decomp = decompose(total_spin(args.n_qubits))
    payload = {"n_qubits": args.n_qubits, "blocks": decomp.to_json(include_basis=args.basis)}
    _emit(args, payload, RunManifest("decompose", _digest([args.n_qubits, args.basis])))
    return 0


def _commutant_errors(name: str, n_qubits: int):
    if name == "collective":
        return list(total_spin(n_qubits).components)
    if name in ("pi", "tau"):
        if n_qubits != 2:
            raise ValueError("pi/tau error sets live on two qubits")
        pi, tau = two_qubit_pi_tau()
        return list((pi if name == "pi" else tau).generators.values())
    raise ValueError(f"unknown error set {name!r}")


def cmd_commutant(args) -> int:
    cfg = {"n_qubits": 3, "errors": "collective", "j": None, "dump_basis": False}
    if args.config:
        cfg.update(_read_yaml(args.config))
    if args.n_qubits is not None:
        cfg["n_qubits"] = args.n_qubits
    if args.j is not None:
        cfg["j"] = args.j
    n = int(cfg["n_qubits"])
    errors = _commutant_errors(cfg["errors"], n)
    subspace = None
    if cfg["j"] is not None:
        subspace = factorize(decompose(total_spin(n)), cfg["j"])
        cfg["j"] = format_spin(cfg["j"])
    basis = commutant(errors, subspace)
    payload = {**cfg, "dimension": basis.dimension, "subspace_dim": basis.subspace_dim}
    if cfg["dump_basis"]:
        payload["basis"] = [[[float(z.real), float(z.imag)] for z in b.ravel()] for b in basis.basis]
    _emit(args, payload, RunManifest("commutant", _digest(cfg)))
    return 0


def build_gns_state(cfg: dict) -> StateFunctional:
    """State functional described by a ``gns`` config mapping."""
    algebra = cfg.get("algebra", "pi")
    state = cfg.get("state", {}) or {}
    if algebra == "pi":
        gens = list(two_qubit_pi_tau()[0].generators.values())
        alg = generated_algebra("pi", gens)
        return state_from_pauli_expectations(alg, gens, state.get("expectations", [0, 0, -1]))
    if algebra == "pauli":
        n = int(cfg.get("n_qubits", 2))
        alg = pauli_algebra(n)
        if state.get("kind", "maximally-mixed") != "maximally-mixed":
            raise ValueError("the pauli algebra config supports kind: maximally-mixed")
        return StateFunctional(alg, np.eye(2**n) / 2**n)
    if algebra == "df-collective":
        n = int(cfg.get("n_qubits", 3))
        spins = total_spin(n)
        basis = commutant(spins.components).basis
        alg = MatrixAlgebra(f"df-collective-{n}", tuple(basis))
        fs = factorize(decompose(spins), cfg.get("j", "1/2"))
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        psi = random_state(rng, fs.mult_dim)
        gauge = rng.dirichlet(np.ones(fs.irrep_dim))
        rho = np.kron(np.outer(psi, psi.conj()), np.diag(gauge))
        return StateFunctional(alg, fs.embed(rho))
    if algebra == "two-qubit-factored":
        fs = two_qubit_factored_space()
        alg = pauli_algebra(2)
        return StateFunctional(alg, fs.embed(np.diag([0.5, 0.5, 0, 0])))
    raise ValueError(f"unknown algebra {algebra!r}")


def cmd_gns(args) -> int:
    cfg = _read_yaml(args.config) if args.config else {"algebra": "pi"}
    if args.seed is not None:
        cfg["seed"] = args.seed
    f = build_gns_state(cfg)
    summary = gns_construct(f).summary()
    seeds = [cfg["seed"]] if "seed" in cfg else []
    _emit(args, {"config": cfg, **summary}, RunManifest("gns", _digest(cfg), seeds))
    return 0


def cmd_simulate(args) -> int:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = get_preset(args.scenario)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    report = run_scenario(cfg)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    manifest = RunManifest("simulate", cfg.digest(), [cfg.universe.seed])
    if args.csv:
        manifest.outputs.append(str(args.csv))
    _emit(args, {"config": cfg.to_dict(), "report": report.to_json()}, manifest)
    return 0 if report.passed else 1


def cmd_version(args) -> int:
    print(__version__)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", type=Path, help="also write the JSON result here")
    common.add_argument("--quiet", action="store_true", help="suppress stdout")

    ap = argparse.ArgumentParser(prog="dfalgebra", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check DF generator relations")
    p.add_argument("target", choices=VERIFY_TARGETS + ["all"])
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--variant", choices=["printed", "repaired"], default="printed")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", parents=[common], help="Clebsch-Gordan table of N qubits")
    p.add_argument("n_qubits", type=int)
    p.add_argument("--basis", action="store_true", help="include the full |k,m> basis")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("commutant", parents=[common], help="commutant of an error set")
    p.add_argument("--config", type=Path)
    p.add_argument("--n-qubits", type=int)
    p.add_argument("--j", help="restrict to this S^2 eigenspace, e.g. 1/2")
    p.set_defaults(func=cmd_commutant)

    p = sub.add_parser("gns", parents=[common], help="GNS summary of a state")
    p.add_argument("--config", type=Path)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_gns)

    p = sub.add_parser("simulate", parents=[common], help="run a system+bath scenario")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path)
    src.add_argument("--scenario", choices=scenario_names())
    p.add_argument("--seed", type=int)
    p.add_argument("--csv", type=Path)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("version", help="print the package version")
    p.set_defaults(func=cmd_version)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
