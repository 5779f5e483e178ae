"""Config-driven experiment harness.

One JSON document describes an experiment (environment, solver, episode
schedule, certificate constants, concentration schedule); unknown keys are
hard errors so misspelled knobs cannot be silently ignored. The runners write
machine-readable artifacts: a per-episode CSV (``episode,seed,return,
wallclock_s``), a summary JSON, per-decision telemetry JSON, a certificate
report JSON, and a concentration tail report JSON.

Episodes are independent: episode ``e`` uses the RNG stream seeded with
``base_seed + e``, so results do not depend on the number of worker
processes. All aggregation sorts by episode index before writing.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import multiprocessing
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import oracle
from .certificate import (
    CertificateInputs,
    build_ladder,
    certificate,
    ladder_eta_preservation,
    tail_bound,
    validate_ladder,
)
from .core import ParticleBelief, PlanningConfig, discounted_return, particle_filter_step
from .corrected import BonusParams, search
from .envs import ModifiedLightDark, OriginalLightDark, TabularPOMDP, two_state_pomdp
from .pomcpow import PomcpowParams, PwParams, pomcpow_search, voro_search


class ConfigError(ValueError):
    """Malformed experiment config; the message names the offending key."""


class MissingTelemetryError(ValueError):
    """A certificate report was requested without search telemetry."""


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class EnvSpec:
    name: str = "modified_lightdark"
    overrides: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SolverSpec:
    name: str = "voro_pomcpow"
    n_sims: int = 5000
    gamma: float = 0.95
    horizon: int = 3
    bonus_mode: str = "practical"
    eta: float = 0.5
    c0: float = 1.0
    xi0: float = 2.0
    beta0: float = 2.0
    k_z: float = 8.0
    alpha_z: float = 0.5
    log_bonus: bool = True
    r_max: float | None = None


@dataclass(frozen=True)
class CertificateSpec:
    cover_c: float = 20.0
    cover_k: float = 1.0
    radius_cap: float = 1.0
    l_v: float = 1.0
    l_psi: float = 1.0
    alpha_h: float = 1.0
    beta_h: float = 1.0
    delta1_fraction: float = 0.75


@dataclass(frozen=True)
class ConcentrationSpec:
    m_runs: int = 2000
    n_schedule: tuple[int, ...] = (128, 512)
    z_grid: tuple[float, ...] = (2.1, 2.5, 3.0, 4.0, 5.0, 7.0, 10.0)


@dataclass(frozen=True)
class OutputSpec:
    per_step_csv: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvSpec = field(default_factory=EnvSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    episode_steps: int = 10
    n_episodes: int = 100
    base_seed: int = 20260504
    n_particles: int = 1000
    confidence_levels: tuple[float, ...] = (0.8, 0.85, 0.9)
    certificate: CertificateSpec = field(default_factory=CertificateSpec)
    concentration: ConcentrationSpec = field(default_factory=ConcentrationSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def __post_init__(self) -> None:
        if self.n_episodes < 1:
            raise ConfigError(f"n_episodes must be >= 1, got {self.n_episodes}")
        if self.episode_steps < 0:
            raise ConfigError(f"episode_steps must be >= 0, got {self.episode_steps}")
        if self.n_particles < 1:
            raise ConfigError(f"n_particles must be >= 1, got {self.n_particles}")
        for c in self.confidence_levels:
            if not 0.0 < c < 1.0:
                raise ConfigError(f"confidence levels must be in (0, 1), got {c}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_ENV_NAMES = ("modified_lightdark", "original_lightdark", "two_state")
_SOLVER_NAMES = ("voro_pomcpow", "pomcpow", "corrected_pomcp")


def _take(raw: dict, path: str, spec_cls, coercions: dict | None = None):
    """Build a spec dataclass from a raw dict, rejecting unknown keys."""
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must be an object, got {type(raw).__name__}")
    fields = {f.name: f for f in dataclasses.fields(spec_cls)}
    kwargs = {}
    for key, value in raw.items():
        if key not in fields:
            raise ConfigError(f"unknown key: {path}.{key}")
        if coercions and key in coercions:
            value = coercions[key](value)
        kwargs[key] = value
    try:
        return spec_cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _as_number_tuple(value, path: str) -> tuple:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{path} must be a list")
    return tuple(value)


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a raw config dict; any unrecognized key is a hard error."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be an object, got {type(raw).__name__}")
    top_fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for key in raw:
        if key not in top_fields:
            raise ConfigError(f"unknown key: {key}")

    env_raw = raw.get("env", {})
    if not isinstance(env_raw, dict):
        raise ConfigError(f"env must be an object, got {type(env_raw).__name__}")
    env_raw = dict(env_raw)
    name = env_raw.pop("name", "modified_lightdark")
    if name not in _ENV_NAMES:
        raise ConfigError(f"env.name must be one of {_ENV_NAMES}, got {name!r}")
    overrides = env_raw.pop("overrides", {})
    if env_raw:
        raise ConfigError(f"unknown key: env.{sorted(env_raw)[0]}")
    if not isinstance(overrides, dict):
        raise ConfigError("env.overrides must be an object")
    _validate_env_overrides(name, overrides)
    env = EnvSpec(name=name, overrides=dict(overrides))

    solver = _take(raw.get("solver", {}), "solver", SolverSpec)
    if solver.name not in _SOLVER_NAMES:
        raise ConfigError(f"solver.name must be one of {_SOLVER_NAMES}, got {solver.name!r}")
    if solver.n_sims < 1:
        raise ConfigError(f"solver.n_sims must be >= 1, got {solver.n_sims}")
    if solver.bonus_mode not in ("practical", "theoretical"):
        raise ConfigError(f"solver.bonus_mode must be 'practical' or 'theoretical', got {solver.bonus_mode!r}")

    cert = _take(raw.get("certificate", {}), "certificate", CertificateSpec)
    if not 0.0 < cert.delta1_fraction < 1.0:
        raise ConfigError(f"certificate.delta1_fraction must be in (0, 1), got {cert.delta1_fraction}")
    conc = _take(
        raw.get("concentration", {}),
        "concentration",
        ConcentrationSpec,
        coercions={
            "n_schedule": lambda v: tuple(int(x) for x in _as_number_tuple(v, "concentration.n_schedule")),
            "z_grid": lambda v: tuple(float(x) for x in _as_number_tuple(v, "concentration.z_grid")),
        },
    )
    if conc.m_runs < 1:
        raise ConfigError(f"concentration.m_runs must be >= 1, got {conc.m_runs}")
    if any(n < 1 for n in conc.n_schedule):
        raise ConfigError("concentration.n_schedule entries must be >= 1")
    out = _take(raw.get("output", {}), "output", OutputSpec)

    levels = raw.get("confidence_levels", (0.8, 0.85, 0.9))
    return ExperimentConfig(
        env=env,
        solver=solver,
        episode_steps=int(raw.get("episode_steps", 10)),
        n_episodes=int(raw.get("n_episodes", 100)),
        base_seed=int(raw.get("base_seed", 20260504)),
        n_particles=int(raw.get("n_particles", 1000)),
        confidence_levels=tuple(float(c) for c in _as_number_tuple(levels, "confidence_levels")),
        certificate=cert,
        concentration=conc,
        output=out,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_config(raw)


def _validate_env_overrides(name: str, overrides: dict) -> None:
    if name == "two_state":
        if overrides:
            raise ConfigError(f"unknown key: env.overrides.{sorted(overrides)[0]} (two_state takes no overrides)")
        return
    cls = ModifiedLightDark if name == "modified_lightdark" else OriginalLightDark
    allowed = {f.name for f in dataclasses.fields(cls)}
    for key in overrides:
        if key not in allowed:
            raise ConfigError(f"unknown key: env.overrides.{key}")


def build_env(spec: EnvSpec):
    if spec.name == "modified_lightdark":
        overrides = dict(spec.overrides)
        if "actions" in overrides:
            overrides["actions"] = tuple(overrides["actions"])
        return ModifiedLightDark(**overrides)
    if spec.name == "original_lightdark":
        overrides = dict(spec.overrides)
        if "actions" in overrides:
            overrides["actions"] = tuple(overrides["actions"])
        return OriginalLightDark(**overrides)
    if spec.name == "two_state":
        return two_state_pomdp()
    raise ConfigError(f"unknown environment {spec.name!r}")


def build_bonus_params(spec: SolverSpec, env) -> BonusParams:
    r_max = spec.r_max if spec.r_max is not None else getattr(env, "r_max", 1.0)
    plan = PlanningConfig(gamma=spec.gamma, horizon=spec.horizon, r_max=r_max)
    ladder = None
    if spec.bonus_mode == "theoretical":
        ladder = build_ladder(spec.xi0, spec.eta, spec.horizon, spec.beta0)
    return BonusParams(mode=spec.bonus_mode, plan=plan, eta=spec.eta, c0=spec.c0, ladder=ladder)


def build_ladder_from_solver(spec: SolverSpec):
    return build_ladder(spec.xi0, spec.eta, spec.horizon, spec.beta0)


# ---------------------------------------------------------------------------
# episodes


@dataclass(frozen=True)
class StepRecord:
    action: int
    observation: float
    reward: float
    planning_s: float


@dataclass(frozen=True)
class EpisodeRecord:
    """One episode's trace plus the certificate snapshot of its first
    (initial-belief) decision, which is what the certificate report is
    evaluated on."""

    index: int
    seed: int
    steps: tuple[StepRecord, ...]
    discounted_return: float
    wallclock_s: float
    certificate_snapshot: dict | None
    degenerate_filter_steps: tuple[int, ...] = ()

    @property
    def rewards(self) -> list[float]:
        return [s.reward for s in self.steps]


def _telemetry_snapshot(tel) -> dict:
    return {
        "n_sims": tel.n_sims,
        "m_max": tel.m_max,
        "edge_count": tel.edge_count,
        "depth_l_histories": tel.depth_l_histories,
        "total_cells": tel.total_cells,
        "radius_max": tel.radius_max,
        "cells_by_depth": tel.cells_by_depth(),
        "m_max_by_depth": tel.m_max_by_depth(),
        "duplicate_adds": tel.duplicate_adds,
    }


def run_episode(config: ExperimentConfig, index: int) -> EpisodeRecord:
    """Play one seeded episode: plan, act, observe, filter, repeat."""
    seed = config.base_seed + index
    rng = np.random.default_rng(seed)
    env = build_env(config.env)
    solver = config.solver
    bonus_params = build_bonus_params(solver, env)
    pw = PwParams(k_z=solver.k_z, alpha_z=solver.alpha_z)
    pomcpow_params = PomcpowParams(bonus=bonus_params, log_bonus=solver.log_bonus) if solver.name == "pomcpow" else None

    state = env.sample_initial_state(rng)
    if isinstance(env, TabularPOMDP):
        belief = env.initial_belief()
    else:
        belief = env.initial_belief(config.n_particles, rng)

    steps: list[StepRecord] = []
    snapshot = None
    degenerate: list[int] = []
    for t in range(config.episode_steps):
        t0 = time.perf_counter()
        if solver.name == "voro_pomcpow":
            action, _, tel = voro_search(belief, env, bonus_params, pw, solver.n_sims, rng)
            if t == 0:
                snapshot = _telemetry_snapshot(tel)
        elif solver.name == "pomcpow":
            action, _ = pomcpow_search(belief, env, pomcpow_params, pw, solver.n_sims, rng)
        else:
            action, _ = search(belief, env, bonus_params, solver.n_sims, rng)
        planning_s = time.perf_counter() - t0
        state, obs, reward = env.step(state, action, rng)
        info: dict = {}
        belief = particle_filter_step(belief, action, obs, env, config.n_particles, rng, info)
        if info.get("degenerate_filter"):
            degenerate.append(t)
        steps.append(StepRecord(action=action, observation=float(obs), reward=float(reward), planning_s=planning_s))

    rewards = [s.reward for s in steps]
    return EpisodeRecord(
        index=index,
        seed=seed,
        steps=tuple(steps),
        discounted_return=discounted_return(rewards, solver.gamma),
        wallclock_s=sum(s.planning_s for s in steps),
        certificate_snapshot=snapshot,
        degenerate_filter_steps=tuple(degenerate),
    )


def _episode_worker(args: tuple[ExperimentConfig, int]) -> EpisodeRecord:
    config, index = args
    return run_episode(config, index)


def _run_episodes(config: ExperimentConfig, jobs: int) -> list[EpisodeRecord]:
    indices = range(config.n_episodes)
    if jobs <= 1:
        records = [run_episode(config, i) for i in indices]
    else:
        with multiprocessing.Pool(jobs) as pool:
            records = pool.map(_episode_worker, [(config, i) for i in indices])
    return sorted(records, key=lambda r: r.index)


# ---------------------------------------------------------------------------
# benchmark runner


def run_benchmark(
    config: ExperimentConfig,
    out_dir: str | Path,
    jobs: int = 1,
    plots: bool = False,
) -> dict:
    """Run the configured benchmark and write episodes.csv, summary.json, and
    telemetry.json (plus optional per-step CSV and figures) into ``out_dir``.

    Returns the summary dict. Failures inside an episode are re-raised with
    the failing seed attached.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        records = _run_episodes(config, jobs)
    except Exception as exc:
        if isinstance(exc, ConfigError):
            raise
        raise RuntimeError(f"episode failed (seeds start at {config.base_seed}): {exc}") from exc
    total_s = time.perf_counter() - t0

    returns = np.array([r.discounted_return for r in records])
    mean = float(returns.mean())
    std = float(returns.std(ddof=1)) if len(returns) > 1 else 0.0
    stderr = std / math.sqrt(len(returns)) if len(returns) > 1 else 0.0

    _write_episode_csv(out / "episodes.csv", records)
    if config.output.per_step_csv:
        _write_step_csv(out / "steps.csv", records)
    telemetry = [
        {"episode": r.index, "seed": r.seed, "snapshot": r.certificate_snapshot}
        for r in records
        if r.certificate_snapshot is not None
    ]
    _write_json(out / "telemetry.json", {"solver": config.solver.name, "entries": telemetry})

    summary = {
        "config": config.to_dict(),
        "n_episodes": len(records),
        "seeds": {"first": records[0].seed, "last": records[-1].seed},
        "mean_return": mean,
        "std_return": std,  # sample std, ddof=1
        "stderr_return": stderr,
        "min_return": float(returns.min()),
        "max_return": float(returns.max()),
        "std_estimator": "sample (ddof=1)",
        "degenerate_filter_episodes": [r.index for r in records if r.degenerate_filter_steps],
        "total_wallclock_s": total_s,
    }
    _write_json(out / "summary.json", summary)
    if plots:
        from .plots import render_return_histogram

        render_return_histogram(list(returns), out / "returns.png", title=f"{config.solver.name} returns")
    return summary


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_episode_csv(path: Path, records: Sequence[EpisodeRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "seed", "return", "wallclock_s"])
        for r in records:
            writer.writerow([r.index, r.seed, _fmt(r.discounted_return), _fmt(r.wallclock_s)])


def _write_step_csv(path: Path, records: Sequence[EpisodeRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "step", "action", "observation", "reward", "planning_s"])
        for r in records:
            for t, s in enumerate(r.steps):
                writer.writerow([r.index, t, s.action, _fmt(s.observation), _fmt(s.reward), _fmt(s.planning_s)])


def read_episode_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        {
            "episode": int(row["episode"]),
            "seed": int(row["seed"]),
            "return": float(row["return"]),
            "wallclock_s": float(row["wallclock_s"]),
        }
        for row in rows
    ]


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# certificate report


def certificate_inputs_from_snapshot(
    snapshot: dict, config: ExperimentConfig, delta: float
) -> CertificateInputs:
    """Map one realized-tree snapshot to certificate inputs.

    The partition term is evaluated at the largest realized cell count and the
    union bound ranges over every (history, action) partition the search
    instantiated (``edge_count``); the depth-L history count is kept in the
    snapshot for comparison but is typically zero at bench widening settings
    because deep edges see too few visits to close their budgets.
    """
    cert = config.certificate
    delta1 = cert.delta1_fraction * delta
    delta2 = delta - delta1
    m_max = int(snapshot["m_max"])
    if m_max < 1:
        raise MissingTelemetryError("snapshot has no cells; cannot evaluate the partition term")
    return CertificateInputs(
        n=int(snapshot["n_sims"]),
        delta=delta,
        delta1=delta1,
        delta2=delta2,
        gamma=config.solver.gamma,
        horizon=config.solver.horizon,
        l_v=cert.l_v,
        l_psi=cert.l_psi,
        alpha_h=cert.alpha_h,
        beta_h=cert.beta_h,
        cover_c=cert.cover_c,
        cover_k=cert.cover_k,
        radius_cap=cert.radius_cap,
        m_list=(m_max,),
        h_l_size=max(1, int(snapshot["edge_count"])),
    )


def run_certificate_report(config: ExperimentConfig, snapshots: Sequence[dict]) -> dict:
    """Evaluate the certificate on each telemetry snapshot at every configured
    confidence level and average the bounds per level."""
    if not snapshots:
        raise MissingTelemetryError("no telemetry snapshots; run the benchmark first")
    ladder = build_ladder_from_solver(config.solver)
    rows = []
    assumptions: set[str] = set()
    for level in sorted(config.confidence_levels):
        delta = 1.0 - level
        bounds, estimations, partitions = [], [], []
        for snap in snapshots:
            inputs = certificate_inputs_from_snapshot(snap, config, delta)
            cert = certificate(inputs, ladder)
            bounds.append(cert.bound)
            estimations.append(cert.estimation)
            partitions.append(cert.partition)
            assumptions.update(cert.assumptions)
        rows.append(
            {
                "confidence": level,
                "delta": delta,
                "delta1": config.certificate.delta1_fraction * delta,
                "delta2": delta - config.certificate.delta1_fraction * delta,
                "mean_bound": float(np.mean(bounds)),
                "mean_estimation": float(np.mean(estimations)),
                "mean_partition": float(np.mean(partitions)),
                "n_decisions": len(snapshots),
            }
        )
    return {
        "rows": rows,
        "assumptions": sorted(assumptions),
        "ladder": {
            "eta": ladder.eta,
            "xi": list(ladder.xi),
            "alpha": list(ladder.alpha),
            "beta0": ladder.beta0,
        },
        "interpretation": {
            "decisions": "initial-belief decision of each episode",
            "m_list": "largest realized per-(history, action) cell count of the tree",
            "union_bound_size": "count of (history, action) partitions instantiated by the search",
        },
        "seeds": sorted({int(s.get("seed", -1)) for s in snapshots if "seed" in s}),
    }


def load_telemetry(path: str | Path) -> list[dict]:
    with open(path) as fh:
        payload = json.load(fh)
    entries = payload.get("entries", [])
    snapshots = []
    for entry in entries:
        snap = dict(entry["snapshot"])
        seed = entry.get("seed")
        if seed is not None:
            snap["seed"] = seed
        snapshots.append(snap)
    return snapshots


def run_certificate_report_from_dir(config: ExperimentConfig, out_dir: str | Path, plots: bool = False) -> dict:
    """CLI path: read telemetry.json from ``out_dir``, write certificate.json."""
    out = Path(out_dir)
    telemetry_path = out / "telemetry.json"
    if not telemetry_path.exists():
        raise MissingTelemetryError(f"{telemetry_path} not found; run `bench` into this directory first")
    snapshots = load_telemetry(telemetry_path)
    if not snapshots:
        raise MissingTelemetryError(f"{telemetry_path} has no snapshots (solver without partition telemetry?)")
    report = run_certificate_report(config, snapshots)
    _write_json(out / "certificate.json", report)
    if plots:
        from .plots import render_certificate_rows

        render_certificate_rows(report["rows"], out / "certificate.png")
    return report


# ---------------------------------------------------------------------------
# concentration experiment


def _concentration_worker(args: tuple[ExperimentConfig, int, int]) -> float:
    config, n_sims, run_index = args
    env = build_env(config.env)
    bonus_params = build_bonus_params(config.solver, env)
    rng = np.random.default_rng(config.base_seed + run_index)
    belief = env.initial_belief()
    _, root = search(belief, env, bonus_params, n_sims, rng)
    return root.value()


def run_concentration(config: ExperimentConfig, out_dir: str | Path | None = None, jobs: int = 1, plots: bool = False) -> dict:
    """Estimate tail frequencies of the scaled root error against the
    polynomial tail bound.

    Runs ``m_runs`` independent searches at each simulation budget in the
    schedule on a tabular environment, computes the exact optimal value with
    the oracle, and reports quantiles of ``|V_hat - V*|`` plus, for each
    threshold ``z``, the empirical frequency of ``n^(1-eta) * |V_hat - V*| >= z``
    next to the two-sided bound ``min(1, 2 * beta0 * z^-xi0)``.
    """
    env = build_env(config.env)
    if not isinstance(env, TabularPOMDP):
        raise ConfigError(f"concentration needs a tabular env, got {config.env.name!r}")
    if config.solver.name != "corrected_pomcp":
        raise ConfigError(f"concentration runs corrected_pomcp, got {config.solver.name!r}")
    solver = config.solver
    vstar = oracle.optimal_value(env, env.initial_belief_vec, solver.horizon, solver.gamma)
    ladder = build_ladder_from_solver(solver)
    conc = config.concentration

    per_n = []
    for n_index, n_sims in enumerate(conc.n_schedule):
        offset = n_index * conc.m_runs
        tasks = [(config, n_sims, offset + i) for i in range(conc.m_runs)]
        if jobs <= 1:
            values = [_concentration_worker(t) for t in tasks]
        else:
            with multiprocessing.Pool(jobs) as pool:
                values = pool.map(_concentration_worker, tasks)
        errors = np.abs(np.array(values) - vstar)
        scaled = errors * n_sims ** (1.0 - solver.eta)
        tails = []
        for z in conc.z_grid:
            bound = min(1.0, 2.0 * tail_bound(ladder, n_sims, z))
            freq = float(np.mean(scaled >= z))
            tails.append(
                {
                    "z": z,
                    "frequency": freq,
                    "bound": bound,
                    "slack": bound + 3.0 * math.sqrt(bound / conc.m_runs) - freq,
                }
            )
        per_n.append(
            {
                "n_sims": n_sims,
                "m_runs": conc.m_runs,
                "seed_range": [config.base_seed + offset, config.base_seed + offset + conc.m_runs - 1],
                "v_star": vstar,
                "error_quantiles": {
                    "p25": float(np.quantile(errors, 0.25)),
                    "p50": float(np.quantile(errors, 0.50)),
                    "p75": float(np.quantile(errors, 0.75)),
                    "p90": float(np.quantile(errors, 0.90)),
                },
                "mean_error": float(errors.mean()),
                "tails": tails,
            }
        )

    report = {
        "env": config.env.name,
        "solver": solver.name,
        "bonus_mode": solver.bonus_mode,
        "eta": solver.eta,
        "xi0": solver.xi0,
        "beta0": solver.beta0,
        "horizon": solver.horizon,
        "gamma": solver.gamma,
        "base_seed": config.base_seed,
        "v_star": vstar,
        "per_n": per_n,
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "concentration.json", report)
        if plots:
            from .plots import render_concentration_tails

            render_concentration_tails(report, out / "concentration.png")
    return report


# ---------------------------------------------------------------------------
# ladder report


def run_ladder_report(config: ExperimentConfig) -> dict:
    """Build the solver's ladder and report every level check."""
    ladder = build_ladder_from_solver(config.solver)
    rows = validate_ladder(ladder)
    return {
        "eta": ladder.eta,
        "beta0": ladder.beta0,
        "xi": list(ladder.xi),
        "alpha": list(ladder.alpha),
        "kappa": ladder.kappa,
        "eta_preserved": ladder_eta_preservation(ladder),
        "levels": rows,
    }
