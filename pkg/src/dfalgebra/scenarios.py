"""Scenario configs, shipped presets and trajectory reports.

A config has four sections (``universe``, ``hamiltonian``, ``schedule``,
``initial``) plus optional ``assertions``; it round-trips through YAML.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from .opensys import (
    BathSpec,
    SystemHamiltonianSpec,
    bath_state,
    build_universe,
    df_reduce,
    evolve,
    purification,
    random_state,
    system_state,
    unitary_prediction,
)
from .spin import decompose, format_spin, total_spin
from .states import fidelity, purity, von_neumann_entropy

DF_FIDELITY_FLOOR = 1 - 1e-8
COLLECTIVE_LEAKAGE_CEILING = 1e-10
FIDELITY_CONVENTION = "uhlmann-squared"


@dataclass
class UniverseConfig:
    n_qubits: int = 3
    j: str = "1/2"
    d_b: int = 3
    seed: int = 42
    coupling_strength: float = 1.0
    model: str = "collective"
    bath_state: str = "pure"


@dataclass
class HamiltonianConfig:
    epsilon: float = 1.0
    alpha: list = field(default_factory=list)
    beta: list = field(default_factory=list)
    exchange: list = field(default_factory=list)

    def spec(self) -> SystemHamiltonianSpec:
        return SystemHamiltonianSpec(
            float(self.epsilon),
            tuple((int(a), int(b), float(s)) for a, b, s in self.exchange),
            tuple(float(x) for x in self.alpha),
            tuple(float(x) for x in self.beta),
        )


@dataclass
class ScheduleConfig:
    t_max: float = 5.0
    steps: int = 50

    def times(self) -> np.ndarray:
        return np.linspace(0.0, float(self.t_max), int(self.steps))


@dataclass
class InitialConfig:
    kind: str = "df-product"
    df_state: object = "random"
    gauge_state: object = "random"
    sectors: list = field(default_factory=list)


@dataclass
class AssertionsConfig:
    min_df_fidelity: float | None = None
    max_leakage: float | None = None
    system_purity_below: float | None = None
    sector_leakage: float | None = None
    sector_leakage_tol: float = 1e-6


@dataclass
class ScenarioConfig:
    name: str
    universe: UniverseConfig = field(default_factory=UniverseConfig)
    hamiltonian: HamiltonianConfig = field(default_factory=HamiltonianConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    assertions: AssertionsConfig = field(default_factory=AssertionsConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        sections = {
            "universe": UniverseConfig,
            "hamiltonian": HamiltonianConfig,
            "schedule": ScheduleConfig,
            "initial": InitialConfig,
            "assertions": AssertionsConfig,
        }
        kwargs = {"name": data.get("name", "custom")}
        for key, klass in sections.items():
            raw = dict(data.get(key) or {})
            known = {f.name for f in fields(klass)}
            unknown = set(raw) - known
            if unknown:
                raise ValueError(f"unknown keys in [{key}]: {sorted(unknown)}")
            kwargs[key] = klass(**raw)
        cfg = cls(**kwargs)
        cfg.universe.j = format_spin(cfg.universe.j) if cfg.universe.model == "collective" else cfg.universe.j
        return cfg

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, universe=replace(self.universe, seed=int(seed)))


def load_config(path) -> ScenarioConfig:
    data = yaml.safe_load(Path(path).read_text())
    return ScenarioConfig.from_dict(data)


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


def _df_assertions(**extra) -> AssertionsConfig:
    return AssertionsConfig(
        min_df_fidelity=DF_FIDELITY_FLOOR, max_leakage=COLLECTIVE_LEAKAGE_CEILING, **extra
    )


def _preset(name, universe, hamiltonian=None, initial=None, assertions=None) -> ScenarioConfig:
    return ScenarioConfig(
        name,
        universe,
        hamiltonian or HamiltonianConfig(),
        ScheduleConfig(),
        initial or InitialConfig(),
        assertions or _df_assertions(),
    )


EXCHANGE_3 = [[1, 2, 0.7], [2, 3, -0.4], [1, 3, 0.25]]
EXCHANGE_4 = [[1, 2, 0.5], [3, 4, -0.3], [1, 4, 0.8], [2, 3, 0.2]]

PRESETS: dict[str, ScenarioConfig] = {
    "two-qubit-pi": _preset(
        "two-qubit-pi",
        UniverseConfig(n_qubits=2, j="pi", model="pi-tau"),
        HamiltonianConfig(epsilon=0.0, alpha=[0.6, -0.3, 0.9], beta=[0.4, 0.2, -0.7]),
    ),
    "three-qubit-j12": _preset(
        "three-qubit-j12",
        UniverseConfig(n_qubits=3, j="1/2"),
        assertions=_df_assertions(system_purity_below=0.999),
    ),
    "three-qubit-j12-exchange": _preset(
        "three-qubit-j12-exchange",
        UniverseConfig(n_qubits=3, j="1/2"),
        HamiltonianConfig(epsilon=1.0, exchange=EXCHANGE_3),
        assertions=_df_assertions(system_purity_below=0.999),
    ),
    "four-qubit-j0": _preset("four-qubit-j0", UniverseConfig(n_qubits=4, j="0")),
    "four-qubit-j0-exchange": _preset(
        "four-qubit-j0-exchange",
        UniverseConfig(n_qubits=4, j="0"),
        HamiltonianConfig(epsilon=1.0, exchange=EXCHANGE_4),
    ),
    "four-qubit-j1": _preset("four-qubit-j1", UniverseConfig(n_qubits=4, j="1")),
    "four-qubit-j1-exchange": _preset(
        "four-qubit-j1-exchange",
        UniverseConfig(n_qubits=4, j="1"),
        HamiltonianConfig(epsilon=1.0, exchange=EXCHANGE_4),
        assertions=_df_assertions(system_purity_below=0.999),
    ),
    "negative-control-single-qubit": _preset(
        "negative-control-single-qubit",
        UniverseConfig(n_qubits=1, j="1/2"),
        assertions=AssertionsConfig(system_purity_below=0.9),
    ),
    "negative-control-superposition": _preset(
        "negative-control-superposition",
        UniverseConfig(n_qubits=3, j="1/2"),
        initial=InitialConfig(kind="sector-superposition", sectors=["3/2", "1/2"]),
        assertions=AssertionsConfig(sector_leakage=0.5),
    ),
}


def get_preset(name: str) -> ScenarioConfig:
    try:
        return ScenarioConfig.from_dict(PRESETS[name].to_dict())
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass
class TrajectoryReport:
    scenario: str
    config_digest: str
    seed: int
    times: list
    df_purity: list
    df_fidelity: list
    system_purity: list
    leakage: list
    bath_entropy: list
    sector_leakage: dict = field(default_factory=dict)
    cross_sector_coherence: list = field(default_factory=list)
    assertions: dict = field(default_factory=dict)
    fidelity_convention: str = FIDELITY_CONVENTION

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions.values())

    def to_json(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "df_fidelity", "df_purity", "system_purity", "leakage", "bath_entropy"])
        for row in zip(self.times, self.df_fidelity, self.df_purity, self.system_purity,
                       self.leakage, self.bath_entropy):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def _vector(spec, dim: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(spec, str):
        if spec != "random":
            raise ValueError(f"state spec must be 'random' or a list of amplitudes, got {spec!r}")
        return random_state(rng, dim)
    v = np.array([complex(x) if not isinstance(x, (list, tuple)) else complex(*x) for x in spec])
    if v.size != dim:
        raise ValueError(f"expected {dim} amplitudes, got {v.size}")
    return v / np.linalg.norm(v)


def _initial_system(cfg: ScenarioConfig, u, rng) -> tuple[np.ndarray, list]:
    init = cfg.initial
    if init.kind == "df-product":
        n, d = u.factored.dims
        psi = _vector(init.df_state, n, rng)
        phi = _vector(init.gauge_state, d, rng)
        return u.factored.isometry @ np.kron(psi, phi), []
    if init.kind == "sector-superposition":
        if cfg.universe.model != "collective" or len(init.sectors) < 2:
            raise ValueError("sector superposition needs the collective model and >= 2 sectors")
        decomp = decompose(total_spin(cfg.universe.n_qubits))
        blocks = [decomp.block(j) for j in init.sectors]
        parts = [b.basis @ random_state(rng, b.dimension) for b in blocks]
        v = sum(parts) / np.sqrt(len(parts))
        return v, blocks
    raise ValueError(f"unknown initial kind {init.kind!r}")


def run_scenario(scenario: str | ScenarioConfig) -> TrajectoryReport:
    cfg = get_preset(scenario) if isinstance(scenario, str) else scenario
    uc = cfg.universe
    bath_seq, state_seq = np.random.SeedSequence(int(uc.seed)).spawn(2)
    n_err = 3
    bath = BathSpec.random(uc.d_b, n_err, int(bath_seq.generate_state(1)[0]), uc.coupling_strength)
    mixed = uc.bath_state == "mixed"
    if uc.bath_state not in ("pure", "mixed"):
        raise ValueError(f"bath_state must be 'pure' or 'mixed', got {uc.bath_state!r}")
    model_bath = bath.purified() if mixed else bath
    j = uc.j if uc.model == "collective" else None
    hspec = cfg.hamiltonian.spec()
    u = build_universe(uc.n_qubits, model_bath, hspec, j=j, model=uc.model)

    rng = np.random.default_rng(state_seq)
    sys0, sector_blocks = _initial_system(cfg, u, rng)
    if mixed:
        w = rng.dirichlet(np.ones(uc.d_b))
        q, _ = np.linalg.qr(rng.normal(size=(uc.d_b, uc.d_b)) + 1j * rng.normal(size=(uc.d_b, uc.d_b)))
        bath0 = purification((q * w) @ q.conj().T)
    else:
        bath0 = random_state(rng, uc.d_b)
    psi0 = np.kron(sys0, bath0)

    times = cfg.schedule.times()
    states = evolve(u, psi0, times)
    rho_df_0, _ = df_reduce(psi0, u)
    predicted = unitary_prediction(rho_df_0, hspec, u, times)

    rep = TrajectoryReport(cfg.name, cfg.digest(), int(uc.seed), [float(t) for t in times],
                           [], [], [], [], [])
    if sector_blocks:
        rep.sector_leakage = {format_spin(b.j): [] for b in sector_blocks}
    for psi, pred in zip(states, predicted):
        rho_df, leak = df_reduce(psi, u)
        rho_s = system_state(psi, u)
        rep.df_purity.append(purity(rho_df))
        rep.df_fidelity.append(fidelity(rho_df, pred))
        rep.system_purity.append(purity(rho_s))
        rep.leakage.append(leak)
        rep.bath_entropy.append(von_neumann_entropy(bath_state(psi, u)))
        if sector_blocks:
            projs = [b.projector for b in sector_blocks]
            for b, p in zip(sector_blocks, projs):
                w = float(np.real(np.trace(p @ rho_s)))
                rep.sector_leakage[format_spin(b.j)].append(1.0 - w)
            rep.cross_sector_coherence.append(float(np.linalg.norm(projs[0] @ rho_s @ projs[1])))
    rep.assertions = _check(cfg.assertions, rep)
    return rep


def _check(a: AssertionsConfig, rep: TrajectoryReport) -> dict:
    out = {}
    if a.min_df_fidelity is not None:
        v = min(rep.df_fidelity)
        out["min_df_fidelity"] = {"value": v, "threshold": a.min_df_fidelity, "passed": v >= a.min_df_fidelity}
    if a.max_leakage is not None:
        v = max(rep.leakage)
        out["max_leakage"] = {"value": v, "threshold": a.max_leakage, "passed": v <= a.max_leakage}
    if a.system_purity_below is not None:
        v = min(rep.system_purity)
        out["system_purity_below"] = {
            "value": v, "threshold": a.system_purity_below, "passed": v < a.system_purity_below
        }
    if a.sector_leakage is not None:
        worst = max(
            (abs(x - a.sector_leakage) for series in rep.sector_leakage.values() for x in series),
            default=float("inf"),
        )
        out["sector_leakage"] = {
            "value": worst, "threshold": a.sector_leakage_tol, "passed": worst <= a.sector_leakage_tol
        }
    return out


def scenario_names() -> list[str]:
    return list(PRESETS)

