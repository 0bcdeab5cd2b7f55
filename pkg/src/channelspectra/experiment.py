"""Reproducible simulation experiments: config, trial runner, reports.

A run is fully determined by its config (including the seed root): trials
use per-index Philox streams and results are merged in ascending trial
order, so output files are byte-identical however many worker threads
execute the trials.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import yaml

from . import channel, stats
from .densities import DensitySpec
from .ensembles import (
    EnsembleSpec,
    GUE,
    HERMITIAN_KINDS,
    ROTATED_DETERMINISTIC,
    ROTATED_RADEMACHER,
    WISHART_CENTERED,
    sample_family,
)
from .freemoments import (
    FixedD,
    GrowingD,
    MarginalLaw,
    centered_mp_law,
    law_from_moments,
    predict_limit_moments,
    rademacher_law,
    semicircle_law,
)
from .linalg import hermitian_eigenvalues, hutchinson_normalized_trace_power
from .seeding import PROBE_SALT, Seed


class ConfigError(Exception):
    """The experiment configuration cannot be parsed or validated."""


DEFAULT_TOLERANCE = 0.1

_EXPECTATION_NAMES = ("zero", "analytic-gue", "analytic-twirl", "empirical")
_MODES = ("auto", "dense", "matfree")
_TARGETS = ("auto", "none", "semicircle", "kesten-mckay", "dilated-kesten-mckay")

LAW_NAMES = ("rademacher", "semicircle", "centered-mp")


def stock_law(name: str) -> MarginalLaw:
    if name == "rademacher":
        return rademacher_law()
    if name == "semicircle":
        return semicircle_law()
    if name == "centered-mp":
        return centered_mp_law()
    raise ConfigError(f"unknown law {name!r}; expected one of {LAW_NAMES}")


@dataclass(frozen=True)
class DRule:
    """Kraus count rule: a fixed value, d = n, or d = ceil(sqrt(n))."""

    kind: str  # "fixed" | "n" | "sqrt-n"
    value: Optional[int] = None

    def resolve(self, n: int) -> int:
        if self.kind == "fixed":
            return int(self.value)
        if self.kind == "n":
            return n
        if self.kind == "sqrt-n":
            return math.ceil(math.sqrt(n))
        raise ConfigError(f"unknown d rule {self.kind!r}")

    @property
    def grows(self) -> bool:
        return self.kind != "fixed"

    def describe(self) -> str:
        return str(self.value) if self.kind == "fixed" else self.kind

    @classmethod
    def parse(cls, raw) -> "DRule":
        if isinstance(raw, bool):
            raise ConfigError("d must be an integer or one of 'n', 'sqrt-n'")
        if isinstance(raw, int):
            if raw < 1:
                raise ConfigError("d must be >= 1")
            return cls("fixed", raw)
        if isinstance(raw, str):
            if raw in ("n", "sqrt-n"):
                return cls(raw)
            try:
                value = int(raw)
            except ValueError:
                raise ConfigError(f"d must be an integer or one of 'n', 'sqrt-n', got {raw!r}")
            if value < 1:
                raise ConfigError("d must be >= 1")
            return cls("fixed", value)
        raise ConfigError(f"d must be an integer or one of 'n', 'sqrt-n', got {raw!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a simulation run depends on, seed included."""

    ensemble: EnsembleSpec
    n: int
    d_rule: DRule
    trials: int
    seed_root: int
    expectation: str = "zero"
    expectation_trials: int = 100
    p_max: int = 4
    histogram_bins: int = 64
    mode: str = "auto"
    probes: int = 256
    target: str = "auto"
    tolerances: Optional[tuple] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 1 <= self.p_max <= 10:
            raise ConfigError("p_max must be in [1, 10]")
        if self.histogram_bins < 1:
            raise ConfigError("histogram_bins must be >= 1")
        if self.expectation not in _EXPECTATION_NAMES:
            raise ConfigError(f"expectation must be one of {_EXPECTATION_NAMES}")
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}")
        if self.target not in _TARGETS:
            raise ConfigError(f"target must be one of {_TARGETS}")
        if self.probes < 1:
            raise ConfigError("probes must be >= 1")
        if self.ensemble.kind not in HERMITIAN_KINDS:
            raise ConfigError(
                f"simulation needs a Hermitian ensemble, got {self.ensemble.kind!r}"
            )

    @property
    def d(self) -> int:
        return self.d_rule.resolve(self.n)

    def expectation_model(self):
        if self.expectation == "zero":
            return channel.ZeroExpectation()
        if self.expectation == "analytic-gue":
            if self.ensemble.kind != GUE:
                raise ConfigError("analytic-gue expectation applies to the gue ensemble")
            return channel.AnalyticGUEExpectation()
        if self.expectation == "analytic-twirl":
            s, q = channel.twirl_parameters(self.ensemble)
            return channel.AnalyticTwirlExpectation(s, q)
        return channel.EmpiricalExpectation(self.expectation_trials)

    def marginal_law(self) -> MarginalLaw:
        """Limiting marginal law of one ensemble member."""
        kind = self.ensemble.kind
        if kind == ROTATED_RADEMACHER:
            return rademacher_law()
        if kind == GUE:
            return semicircle_law()
        if kind == WISHART_CENTERED:
            return centered_mp_law()
        if kind == ROTATED_DETERMINISTIC:
            lam = np.asarray(self.ensemble.spectrum, dtype=np.float64)
            moments = [float(np.mean(lam**p)) for p in range(1, 11)]
            return law_from_moments(moments, name="SpectrumESD")
        raise ConfigError(f"no marginal law for ensemble {kind!r}")

    def regime(self):
        if self.d_rule.grows:
            return GrowingD(self.marginal_law())
        return FixedD(self.d, self.marginal_law())

    def regime_tag(self) -> str:
        return "growing-d" if self.d_rule.grows else f"fixed-d({self.d})"

    def density_target(self) -> Optional[DensitySpec]:
        """Goodness-of-fit target, resolving "auto" from the regime.

        Auto: semicircle in the growing-d regime; dilated Kesten-McKay for
        fixed even d with the rotated-Rademacher ensemble; otherwise no
        density is available and only moments are compared.
        """
        if self.target == "none":
            return None
        if self.target == "semicircle":
            return DensitySpec("semicircle")
        if self.target == "kesten-mckay":
            return DensitySpec("kesten-mckay", float(self.d))
        if self.target == "dilated-kesten-mckay":
            return DensitySpec("dilated-kesten-mckay", float(self.d))
        if self.d_rule.grows:
            return DensitySpec("semicircle")
        if self.ensemble.kind == ROTATED_RADEMACHER and self.d >= 2 and self.d % 2 == 0:
            return DensitySpec("dilated-kesten-mckay", float(self.d))
        return None

    def tolerance_list(self) -> "list[float]":
        if self.tolerances is None:
            return [DEFAULT_TOLERANCE] * self.p_max
        tols = list(self.tolerances)
        if len(tols) < self.p_max:
            tols += [DEFAULT_TOLERANCE] * (self.p_max - len(tols))
        return tols[: self.p_max]

    def to_dict(self) -> dict:
        return {
            "ensemble": self.ensemble.to_dict(),
            "n": self.n,
            "d": self.d_rule.describe(),
            "trials": self.trials,
            "seed_root": self.seed_root,
            "expectation": self.expectation,
            "expectation_trials": self.expectation_trials,
            "p_max": self.p_max,
            "histogram_bins": self.histogram_bins,
            "mode": self.mode,
            "probes": self.probes,
            "target": self.target,
            "tolerances": list(self.tolerances) if self.tolerances is not None else None,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        try:
            ens_raw = raw["ensemble"]
            n = int(raw["n"])
            if isinstance(ens_raw, str):
                ens_raw = {"kind": ens_raw}
            ens_raw = dict(ens_raw)
            ens_raw.setdefault("n", n)
            ensemble = EnsembleSpec.from_dict(ens_raw)
            if ensemble.n != n:
                raise ConfigError("ensemble dimension and n disagree")
            tolerances = raw.get("tolerances")
            return cls(
                ensemble=ensemble,
                n=n,
                d_rule=DRule.parse(raw.get("d", 1)),
                trials=int(raw.get("trials", 1)),
                seed_root=int(raw.get("seed_root", 0)),
                expectation=str(raw.get("expectation", "zero")),
                expectation_trials=int(raw.get("expectation_trials", 100)),
                p_max=int(raw.get("p_max", 4)),
                histogram_bins=int(raw.get("histogram_bins", 64)),
                mode=str(raw.get("mode", "auto")),
                probes=int(raw.get("probes", 256)),
                target=str(raw.get("target", "auto")),
                tolerances=tuple(float(t) for t in tolerances) if tolerances else None,
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    @classmethod
    def from_yaml(cls, path) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as handle:
                raw = yaml.safe_load(handle)
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)


@dataclass
class TrialOutput:
    index: int
    esd: Optional[stats.ESD] = None
    moment_estimates: Optional[list] = None
    moment_stderrs: Optional[list] = None


@dataclass
class SimulationResult:
    config: ExperimentConfig
    mode: str
    trials: "list[TrialOutput]"
    pooled: Optional[stats.ESD]
    moments_mean: "list[float]"
    moments_stderr: "list[float]"
    moments_variance: "list[float]"
    notes: "list[str]" = field(default_factory=list)


def _run_trial(config: ExperimentConfig, mode: str, index: int) -> TrialOutput:
    seed = Seed(config.seed_root, index)
    family = sample_family(config.ensemble, config.d, seed)
    model = config.expectation_model()
    delta = channel.build_delta(
        family,
        model,
        dense=(True if mode == "dense" else False),
        spec=config.ensemble,
        seed=seed,
    )
    if mode == "dense":
        values = hermitian_eigenvalues(delta.dense)
        return TrialOutput(index=index, esd=stats.esd_from_spectrum(values, seed))
    estimates, stderrs = [], []
    # Probe streams live in a salted space, 16 slots per trial so orders
    # p <= 10 never collide across trials.
    probe_base = Seed(config.seed_root, index * 16).salted(PROBE_SALT)
    for p in range(1, config.p_max + 1):
        est, se = hutchinson_normalized_trace_power(
            delta.matfree, p, config.probes, probe_base.substream(p)
        )
        estimates.append(est)
        stderrs.append(se)
    return TrialOutput(index=index, moment_estimates=estimates, moment_stderrs=stderrs)


def resolve_mode(config: ExperimentConfig, override: Optional[str] = None) -> str:
    """Pick dense vs matrix-free: explicit override > config > dimension cap."""
    from .linalg import max_dense_dim

    mode = override or config.mode
    if mode == "auto":
        return "dense" if config.n * config.n <= max_dense_dim() else "matfree"
    return mode


def run_simulation(
    config: ExperimentConfig,
    threads: int = 1,
    mode_override: Optional[str] = None,
) -> SimulationResult:
    """Run all trials (optionally in a thread pool) and aggregate.

    Results are merged in ascending trial order whatever the pool size, so
    the outcome is identical at any thread count.
    """
    mode = resolve_mode(config, mode_override)
    indices = range(config.trials)
    if threads <= 1:
        outputs = [_run_trial(config, mode, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(lambda i: _run_trial(config, mode, i), indices))
    outputs.sort(key=lambda t: t.index)

    notes = []
    if config.ensemble.kind == WISHART_CENTERED:
        notes.append(
            "centered Wishart is normalized only asymptotically; finite-n moments "
            "carry an O(1/n) bias that is not rescaled away"
        )
    if config.expectation == "zero":
        notes.append("zero expectation model: spectra include the uncentered mean term")

    if mode == "dense":
        esds = [t.esd for t in outputs]
        mean, stderr, variance = stats.moment_statistics(esds, config.p_max)
        pooled = stats.pool_esds(esds)
        return SimulationResult(
            config=config,
            mode=mode,
            trials=outputs,
            pooled=pooled,
            moments_mean=mean,
            moments_stderr=stderr,
            moments_variance=variance,
            notes=notes,
        )

    per_trial = np.array([t.moment_estimates for t in outputs])
    mean = [float(m) for m in per_trial.mean(axis=0)]
    k = per_trial.shape[0]
    if k > 1:
        variance = [float(v) for v in per_trial.var(axis=0, ddof=1)]
        stderr = [float(s) for s in np.sqrt(np.array(variance) / k)]
    else:
        variance = [0.0] * config.p_max
        stderr = list(outputs[0].moment_stderrs)
    notes.append(f"matrix-free moment estimates from {config.probes} sign probes per trial")
    return SimulationResult(
        config=config,
        mode=mode,
        trials=outputs,
        pooled=None,
        moments_mean=mean,
        moments_stderr=stderr,
        moments_variance=variance,
        notes=notes,
    )


def predicted_moments(config: ExperimentConfig) -> "list[float]":
    return predict_limit_moments(config.regime(), config.p_max)


def simulation_report(result: SimulationResult) -> dict:
    config = result.config
    report = {
        "regime": config.regime_tag(),
        "ensemble": config.ensemble.to_dict(),
        "n": config.n,
        "d": config.d,
        "trials": config.trials,
        "seed_root": config.seed_root,
        "expectation_model": config.expectation_model().label(),
        "mode": result.mode,
        "moments": [
            {
                "order": p + 1,
                "empirical": result.moments_mean[p],
                "stderr": result.moments_stderr[p],
                "across_trial_variance": result.moments_variance[p],
            }
            for p in range(config.p_max)
        ],
        "notes": result.notes,
        "config": config.to_dict(),
    }
    return report


def write_json(report: dict, path: Path) -> None:
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_histogram_csv(esd: stats.ESD, bins: int, path: Path) -> None:
    rows = stats.histogram_rows(esd, bins)
    lines = ["bin_left,bin_right,count,density"]
    for left, right, count, density in rows:
        lines.append(f"{left!r},{right!r},{count},{density!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_moment_csv(orders: Sequence[int], values: Sequence[float], regime: str, path: Path) -> None:
    lines = ["order,predicted,regime"]
    for p, v in zip(orders, values):
        lines.append(f"{p},{v!r},{regime}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_simulate_command(
    config: ExperimentConfig,
    out_dir: Path,
    threads: int = 1,
    mode_override: Optional[str] = None,
) -> "tuple[dict, list[Path]]":
    """The simulate verb: run, then write report.json (+ histogram.csv)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_simulation(config, threads=threads, mode_override=mode_override)
    report = simulation_report(result)
    written = []
    if result.pooled is not None:
        hist_path = out_dir / "histogram.csv"
        write_histogram_csv(result.pooled, config.histogram_bins, hist_path)
        report["histogram_file"] = hist_path.name
        written.append(hist_path)
    report_path = out_dir / "report.json"
    write_json(report, report_path)
    written.insert(0, report_path)
    return report, written


def run_compare_command(
    config: ExperimentConfig,
    out_dir: Path,
    threads: int = 1,
    mode_override: Optional[str] = None,
) -> "tuple[dict, bool, list[Path]]":
    """The compare verb: simulate, predict, test each order, optional KS."""
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_simulation(config, threads=threads, mode_override=mode_override)
    predicted = predicted_moments(config)
    report = simulation_report(result)
    moment_report = stats.MomentReport(
        orders=tuple(range(1, config.p_max + 1)),
        empirical=tuple(result.moments_mean),
        empirical_stderr=tuple(result.moments_stderr),
        predicted=tuple(predicted),
        regime=config.regime_tag(),
    )
    tolerances = config.tolerance_list()
    rows = stats.compare_report(moment_report, tolerances)
    all_passed = all(r.passed for r in rows)
    report["comparison"] = [
        {
            "order": r.order,
            "empirical": r.empirical,
            "predicted": r.predicted,
            "stderr": r.stderr,
            "tolerance": r.tolerance,
            "passed": r.passed,
        }
        for r in rows
    ]
    target = config.density_target()
    if target is not None and result.pooled is not None:
        ks = stats.ks_distance(result.pooled, target)
        report["ks"] = {
            "target": target.label(),
            "statistic": ks.statistic,
            "sample_size": ks.sample_size,
        }
    written = []
    if result.pooled is not None:
        hist_path = out_dir / "histogram.csv"
        write_histogram_csv(result.pooled, config.histogram_bins, hist_path)
        report["histogram_file"] = hist_path.name
        written.append(hist_path)
    report_path = out_dir / "report.json"
    write_json(report, report_path)
    written.insert(0, report_path)
    return report, all_passed, written
