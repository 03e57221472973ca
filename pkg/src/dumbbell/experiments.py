"""Experiment runners behind the command line: single runs, Monte Carlo
bound checks, adiabatic scaling scans and straight-wedge trials.

Randomness comes from numpy's PCG64 generator.  Each mass ratio or ladder
rung gets its own child stream spawned from ``SeedSequence(seed)``, so a
``(config, seed)`` pair fixes every sample regardless of how trials are
scheduled.  Trials are run in index order and results are aggregated in
that order.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import platform
import statistics
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    AdiabaticTrace,
    WedgeSpec,
    collision_bound,
    fit_power_law,
    unfolding_count,
    wedge_reflections,
)
from .errors import ConfigError, OnVertex
from .geometry import TOL_CORNER, Branch
from .model import (
    BilliardState,
    DumbbellParams,
    PhysState,
    check_admissible,
    from_billiard,
    kinetic_energy,
    to_billiard,
)
from .collision import collide_mass1
from .simulate import Limits, ScatterOutcome, Termination, next_collision_physical, scatter

log = logging.getLogger(__name__)

MODES = ("simulate", "bound-check", "adiabatic-scan", "wedge-oracle")
FORMATS = ("csv", "json")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2


@dataclass
class ScatterSampler:
    """Uniform ranges for the scattering ensemble.

    ``y0`` is a fixed start height; ``None`` means twice the largest height the
    floor contact can reach, ``2 * max(beta1, beta2)``.
    """

    y0: float | None = None
    phi: tuple[float, float] = (0.0, 2.0 * math.pi)
    y_dot: tuple[float, float] = (-1.0, -0.1)
    phi_dot: tuple[float, float] = (-5.0, 5.0)


@dataclass
class AdiabaticSampler:
    """First light-mass contacts with ``eps = delta**2``.

    The contact angle lies in the annulus ``c1*sqrt(delta) <= |phi - 3pi/2| <=
    c2*sqrt(delta)``, the descent speed in ``delta * y_dot_fraction`` and the
    rotation speed is fixed (only the ratio of the two speeds matters).
    """

    c1: float = 0.5
    c2: float = 2.0
    y_dot_fraction: tuple[float, float] = (0.5, 1.0)
    phi_dot: float = 1.0
    # start height, as a multiple of the top of the boundary
    start_height: float = 1.05


@dataclass
class ExperimentConfig:
    mode: str = "simulate"
    m1: float = 1.0
    m2: float = 1.0
    ratios: list[float] | None = None
    trials: int = 1000
    seed: int = 0
    delta_ladder: list[float] = field(default_factory=lambda: [0.1, 0.05, 0.025])
    out: str | None = None
    format: str = "csv"
    initial: PhysState | None = None
    max_bounces: int | None = None
    max_time: float = 1e6
    sampler: ScatterSampler = field(default_factory=ScatterSampler)
    adiabatic: AdiabaticSampler = field(default_factory=AdiabaticSampler)

    def validate(self) -> ExperimentConfig:
        if self.mode not in MODES:
            raise ConfigError("mode", f"expected one of {', '.join(MODES)}, got {self.mode!r}")
        if self.format not in FORMATS:
            raise ConfigError("format", f"expected one of {', '.join(FORMATS)}, got {self.format!r}")
        for name in ("m1", "m2"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(name, f"must be a positive number, got {v!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials", f"must be an integer >= 1, got {self.trials!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        if self.ratios is not None:
            if not self.ratios or any(not (r > 0 and math.isfinite(r)) for r in self.ratios):
                raise ConfigError("ratios", "must be a nonempty list of positive numbers")
        if self.mode == "adiabatic-scan":
            if not self.delta_ladder:
                raise ConfigError("delta_ladder", "must not be empty")
            if any(not 0 < d < 1 for d in self.delta_ladder):
                raise ConfigError("delta_ladder", "values must lie in (0, 1)")
            a = self.adiabatic
            if not 0 < a.c1 <= a.c2:
                raise ConfigError("adiabatic.c1", "need 0 < c1 <= c2")
            lo, hi = a.y_dot_fraction
            if not 0 <= lo < hi <= 1:
                raise ConfigError("adiabatic.y_dot_fraction", "need 0 <= lo < hi <= 1")
        if self.mode == "simulate" and self.initial is None:
            raise ConfigError("initial", "simulate mode needs an explicit initial state")
        for name in ("phi", "y_dot", "phi_dot"):
            lo, hi = getattr(self.sampler, name)
            if not lo <= hi:
                raise ConfigError(f"sampler.{name}", "range must be (low, high) with low <= high")
        if self.max_bounces is not None and self.max_bounces < 1:
            raise ConfigError("max_bounces", "must be >= 1")
        return self

    @property
    def params(self) -> DumbbellParams:
        return DumbbellParams(float(self.m1), float(self.m2))

    def ratio_list(self) -> list[float]:
        return list(self.ratios) if self.ratios else [self.m2 / self.m1]

    def limits(self, params: DumbbellParams) -> Limits:
        mb = self.max_bounces if self.max_bounces is not None else 10 * collision_bound(params)
        return Limits(max_bounces=mb, max_time=self.max_time)

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.initial is not None:
            d["initial"] = self.initial._asdict()
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> ExperimentConfig:
        raw = {k.replace("-", "_"): v for k, v in raw.items()}
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown configuration key")
        kw = dict(raw)
        if kw.get("initial") is not None:
            init = kw["initial"]
            try:
                kw["initial"] = PhysState(**init) if isinstance(init, dict) else PhysState(*init)
            except TypeError as exc:
                raise ConfigError("initial", f"expected y, phi, y_dot, phi_dot ({exc})") from None
        for key, kind in (("sampler", ScatterSampler), ("adiabatic", AdiabaticSampler)):
            if isinstance(kw.get(key), dict):
                sub = dict(kw[key])
                allowed = {f.name for f in fields(kind)}
                bad = sorted(set(sub) - allowed)
                if bad:
                    raise ConfigError(f"{key}.{bad[0]}", "unknown configuration key")
                for k, v in sub.items():
                    if isinstance(v, list):
                        sub[k] = tuple(v)
                kw[key] = kind(**sub)
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> ExperimentConfig:
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"{path}: invalid JSON ({exc})") from None
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be an object")
        return cls.from_dict(raw)


def streams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(n)]


# --- samplers ----------------------------------------------------------------

def _corner_aimed(s: PhysState) -> bool:
    return s.phi_dot == 0.0 and abs(math.sin(s.phi)) <= TOL_CORNER


def sample_scatter_states(params: DumbbellParams, sampler: ScatterSampler, n: int,
                          rng: np.random.Generator) -> list[PhysState]:
    """Draw ``n`` admissible, incoming states from the uniform ensemble."""
    y0 = sampler.y0 if sampler.y0 is not None else 2.0 * max(params.beta1, params.beta2)
    out: list[PhysState] = []
    while len(out) < n:
        k = n - len(out)
        phi = rng.uniform(*sampler.phi, size=k)
        yd = rng.uniform(*sampler.y_dot, size=k)
        pd = rng.uniform(*sampler.phi_dot, size=k)
        for a, b, c in zip(phi.tolist(), yd.tolist(), pd.tolist()):
            s = PhysState(y0, a, b, c)
            if s.is_admissible(params) and not _corner_aimed(s):
                out.append(s)
    return out


@dataclass(frozen=True)
class AdiabaticSample:
    contact: PhysState   # state at the first light-mass contact
    initial: PhysState   # the same trajectory backed off above the floor
    attempts: int


def is_first_contact(params: DumbbellParams, contact: PhysState) -> bool:
    """True when the time-reversed trajectory leaves without touching the
    floor again, i.e. ``contact`` is reached straight from far away."""
    return next_collision_physical(params, contact.reversed()) is None


def sample_adiabatic(delta: float, spec: AdiabaticSampler, rng: np.random.Generator,
                     max_attempts: int = 100_000) -> AdiabaticSample:
    params = DumbbellParams(delta ** 2, 1.0 - delta ** 2)
    root = math.sqrt(delta)
    for attempt in range(1, max_attempts + 1):
        side = 1.0 if rng.random() < 0.5 else -1.0
        phi = 1.5 * math.pi + side * rng.uniform(spec.c1, spec.c2) * root
        y = -params.beta2 * math.sin(phi)
        yd = -rng.uniform(*spec.y_dot_fraction) * delta
        pd = -side * spec.phi_dot
        contact = PhysState(y, phi, yd, pd)
        # the light mass has to be moving into the floor
        if yd + params.beta2 * pd * math.cos(phi) >= 0.0:
            continue
        if not is_first_contact(params, contact):
            continue
        b = to_billiard(params, contact)
        back = (spec.start_height * params.boundary_max - b.Y) / -b.Y_dot
        b0 = BilliardState(b.Y - b.Y_dot * back, b.phi - b.phi_dot * back, b.Y_dot, b.phi_dot)
        return AdiabaticSample(contact, from_billiard(params, b0), attempt)
    raise RuntimeError(f"no admissible first contact after {max_attempts} attempts")


@dataclass(frozen=True)
class SingleBounce:
    pre: PhysState       # light-mass contact, incoming
    post: PhysState      # the same contact, outgoing
    next_pre: PhysState  # the following light-mass contact


def exact_bounce(params: DumbbellParams, pre: PhysState) -> SingleBounce | None:
    """Resolve one light-mass impact and fly to the next contact; ``None``
    unless that contact is again the light mass."""
    post = collide_mass1(params, pre).post
    hit = next_collision_physical(params, post)
    if hit is None or hit.branch is not Branch.MASS1:
        return None
    t = hit.time
    nxt = PhysState(post.y + post.y_dot * t, post.phi + post.phi_dot * t, post.y_dot, post.phi_dot)
    return SingleBounce(pre, post, nxt)


def sample_single_bounces(delta: float, n: int, rng: np.random.Generator,
                          spec: AdiabaticSampler | None = None,
                          offset: tuple[float, float] | None = None) -> list[SingleBounce]:
    """``n`` light-mass bounces with ``eps = delta**2`` that are followed by
    another light-mass contact.

    ``offset`` bounds ``|phi - 3pi/2|`` in radians; by default it is the
    sampler's annulus ``[c1, c2] * sqrt(delta)``.
    """
    spec = spec or AdiabaticSampler()
    params = DumbbellParams(delta ** 2, 1.0 - delta ** 2)
    if offset is None:
        offset = (spec.c1 * math.sqrt(delta), spec.c2 * math.sqrt(delta))
    out: list[SingleBounce] = []
    while len(out) < n:
        side = 1.0 if rng.random() < 0.5 else -1.0
        phi = 1.5 * math.pi + side * rng.uniform(*offset)
        pd = -side * spec.phi_dot
        yd = -rng.uniform(*spec.y_dot_fraction) * delta
        if yd + params.beta2 * pd * math.cos(phi) >= 0.0:
            continue
        bounce = exact_bounce(params, PhysState(-params.beta2 * math.sin(phi), phi, yd, pd))
        if bounce is not None:
            out.append(bounce)
    return out


def adiabatic_violations(delta: float, spec: AdiabaticSampler, sample: AdiabaticSample) -> list[str]:
    """Constraint checks on an emitted sample; empty when compliant."""
    params = DumbbellParams(delta ** 2, 1.0 - delta ** 2)
    c = sample.contact
    bad = []
    off = abs(c.phi - 1.5 * math.pi) / math.sqrt(delta)
    if not spec.c1 * (1 - 1e-12) <= off <= spec.c2 * (1 + 1e-12):
        bad.append(f"angle offset {off:.4g} sqrt(delta) outside [{spec.c1}, {spec.c2}]")
    if not -delta < c.y_dot < 0:
        bad.append(f"y_dot {c.y_dot:.4g} outside (-delta, 0)")
    y1, _ = c.heights(params)
    if abs(y1) > 1e-9:
        bad.append("light mass not on the floor")
    if not is_first_contact(params, c):
        bad.append("not a first contact")
    return bad


# --- runners -----------------------------------------------------------------

def metadata(config: ExperimentConfig, **extra) -> dict:
    return {
        "config": config.to_dict(),
        "seed": config.seed,
        "generator": "numpy PCG64, one SeedSequence child per ratio or ladder rung",
        "versions": {
            "dumbbell": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        **extra,
    }


EVENT_FIELDS = ("index", "time", "mass_hit", "y", "phi", "y_dot_pre", "phi_dot_pre",
                "y_dot_post", "phi_dot_post", "phi_travel", "energy")


def event_rows(outcome: ScatterOutcome) -> list[dict]:
    rows = []
    for e in outcome.events:
        rows.append({
            "index": e.index, "time": e.time, "mass_hit": e.mass_hit.value,
            "y": e.pre.y, "phi": e.pre.phi,
            "y_dot_pre": e.pre.y_dot, "phi_dot_pre": e.pre.phi_dot,
            "y_dot_post": e.post.y_dot, "phi_dot_post": e.post.phi_dot,
            "phi_travel": e.phi_travel,
            "energy": kinetic_energy(outcome.params, e.post),
        })
    return rows


@dataclass
class RunResult:
    """What a runner produced: the main table, a summary and the exit status."""

    table: list[dict]
    summary: list[dict]
    meta: dict
    exit_code: int = EXIT_OK
    outcomes: list = field(default_factory=list, repr=False)


def run_simulate(config: ExperimentConfig) -> RunResult:
    config.validate()
    params = config.params
    check_admissible(params, config.initial)
    outcome = scatter(params, config.initial, config.limits(params))
    trace = AdiabaticTrace.from_events(outcome.events)
    summary = {
        "collision_count": outcome.collision_count,
        "termination": outcome.termination.value,
        "energy_drift": outcome.energy_drift(),
        "bound": collision_bound(params),
        "final_time": outcome.final_time,
        "invariant_initial": trace.initial,
        "invariant_final": trace.final,
    }
    meta = metadata(config, invariant_trace=list(trace.invariant))
    return RunResult(event_rows(outcome), [summary], meta, EXIT_OK, [outcome])


def run_bound_check(config: ExperimentConfig) -> RunResult:
    """Monte Carlo test of the collision bound, one row per mass ratio."""
    config.validate()
    ratios = config.ratio_list()
    rows = []
    for ratio, rng in zip(ratios, streams(config.seed, len(ratios))):
        params = DumbbellParams(1.0, float(ratio))
        bound = collision_bound(params)
        limits = config.limits(params)
        states = sample_scatter_states(params, config.sampler, config.trials, rng)
        counts = []
        terms = {t: 0 for t in Termination}
        worst_energy = 0.0
        for s in states:
            o = scatter(params, s, limits)
            counts.append(o.collision_count)
            terms[o.termination] += 1
            worst_energy = max(worst_energy, o.energy_drift())
        over = sum(1 for c in counts if c > bound) + terms[Termination.HORIZON_EXCEEDED]
        rows.append({
            "ratio": ratio, "m1": params.m1, "m2": params.m2, "beta1": params.beta1,
            "gamma": params.wedge_angle, "bound": bound, "trials": len(counts),
            "max_count": max(counts), "mean_count": statistics.fmean(counts),
            "escaped": terms[Termination.ESCAPED], "corner_hits": terms[Termination.CORNER_HIT],
            "horizon_exceeded": terms[Termination.HORIZON_EXCEEDED],
            "stationary": terms[Termination.STATIONARY],
            "over_bound": over, "violation": over > 0,
            "max_energy_drift": worst_energy,
        })
        log.info("ratio %g: max %d collisions, bound %d", ratio, max(counts), bound)
    code = EXIT_VIOLATION if any(r["violation"] for r in rows) else EXIT_OK
    return RunResult(rows, rows, metadata(config), code)


def _quantile(xs, q):
    return float(np.quantile(np.asarray(xs), q)) if xs else math.nan


def run_adiabatic_scan(config: ExperimentConfig) -> RunResult:
    """Invariant drift and bounce counts along a ladder of ``delta``."""
    config.validate()
    ladder = list(config.delta_ladder)
    spec = config.adiabatic
    rows = []
    per_run = []
    for delta, rng in zip(ladder, streams(config.seed, len(ladder))):
        params = DumbbellParams(delta ** 2, 1.0 - delta ** 2)
        limits = config.limits(params)
        drifts, bounces, attempts = [], [], 0
        repeat_heavy = max_heavy = noncompliant = 0
        for i in range(config.trials):
            smp = sample_adiabatic(delta, spec, rng)
            attempts += smp.attempts
            if adiabatic_violations(delta, spec, smp):
                noncompliant += 1
            o = scatter(params, smp.initial, limits)
            trace = AdiabaticTrace.from_events(o.events, delta, delta ** 2)
            heavy = o.count(Branch.MASS2)
            max_heavy = max(max_heavy, heavy)
            repeat_heavy += heavy > 1
            drifts.append(trace.drift)
            bounces.append(o.collision_count)
            per_run.append({
                "delta": delta, "trial": i, "collision_count": o.collision_count,
                "mass2_events": heavy, "termination": o.termination.value,
                "invariant_initial": trace.initial, "invariant_final": trace.final,
                "drift": trace.drift,
            })
        rows.append({
            "delta": delta, "epsilon": delta ** 2, "runs": config.trials,
            "resample_rate": 1.0 - config.trials / attempts,
            "median_drift": statistics.median(drifts), "mean_drift": statistics.fmean(drifts),
            "p90_drift": _quantile(drifts, 0.9), "max_drift": max(drifts),
            "mean_bounces": statistics.fmean(bounces), "max_bounces": max(bounces),
            "max_mass2_events": max_heavy, "runs_with_repeat_mass2": repeat_heavy,
            "noncompliant_samples": noncompliant,
        })
    medians = [r["median_drift"] for r in rows]
    order = sorted(range(len(ladder)), key=lambda k: -ladder[k])
    decreasing = all(medians[order[k + 1]] < medians[order[k]] for k in range(len(order) - 1))
    fit = {"c1": spec.c1, "c2": spec.c2, "drift_decreases": decreasing}
    if len(ladder) >= 2:
        fit["drift_exponent"] = fit_power_law(ladder, medians).exponent
        fit["bounce_exponent"] = fit_power_law(ladder, [r["mean_bounces"] for r in rows]).exponent
    ok = decreasing and not any(r["runs_with_repeat_mass2"] for r in rows)
    return RunResult(per_run, rows, metadata(config, fit=fit),
                     EXIT_OK if ok else EXIT_VIOLATION)


def sample_wedge_trial(rng: np.random.Generator, min_gamma: float = 0.05,
                       apex_clearance: float = 1e-6):
    """Random wedge, interior start point and direction whose line clears the apex."""
    while True:
        gamma = rng.uniform(min_gamma, math.pi)
        theta = rng.uniform(0.0, gamma)
        r = rng.uniform(0.1, 10.0)
        ang = rng.uniform(-math.pi, math.pi)
        start = (r * math.cos(theta), r * math.sin(theta))
        d = (math.cos(ang), math.sin(ang))
        # distance from the apex to the forward ray
        along = -(start[0] * d[0] + start[1] * d[1])
        miss = abs(start[0] * d[1] - start[1] * d[0]) if along > 0 else r
        if miss > apex_clearance and 0.0 < theta < gamma:
            return WedgeSpec(gamma), start, d


def run_wedge_oracle(config: ExperimentConfig) -> RunResult:
    config.validate()
    (rng,) = streams(config.seed, 1)
    rows = []
    mismatches = over = 0
    for i in range(config.trials):
        while True:
            spec, start, d = sample_wedge_trial(rng)
            try:
                sim = wedge_reflections(spec, start, d)
            except OnVertex:
                continue
            break
        unf = unfolding_count(spec, start, d)
        mismatches += sim != unf
        over += sim > spec.max_reflections
        rows.append({"trial": i, "gamma": spec.gamma, "x": start[0], "y": start[1],
                     "dx": d[0], "dy": d[1], "simulated": sim, "unfolded": unf,
                     "max_reflections": spec.max_reflections})
    summary = {"trials": config.trials, "mismatches": mismatches, "over_bound": over}
    code = EXIT_OK if mismatches == 0 and over == 0 else EXIT_VIOLATION
    return RunResult(rows, [summary], metadata(config), code)


RUNNERS = {
    "simulate": run_simulate,
    "bound-check": run_bound_check,
    "adiabatic-scan": run_adiabatic_scan,
    "wedge-oracle": run_wedge_oracle,
}


def run(config: ExperimentConfig) -> RunResult:
    return RUNNERS[config.validate().mode](config)


# --- output ------------------------------------------------------------------

def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o).__name__)


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_result(result: RunResult, out, fmt: str = "csv") -> list[Path]:
    """Write the main table to ``out``, the summary next to it and the
    metadata to ``<out>.meta.json``.  Returns the paths written."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    meta_path = out.with_name(out.name + ".meta.json")
    if fmt == "json":
        out.write_text(to_json({"table": result.table, "summary": result.summary}))
        paths = [out]
    else:
        summary_path = out.with_name(out.name + ".summary.csv")
        out.write_text(to_csv(result.table))
        summary_path.write_text(to_csv(result.summary))
        paths = [out, summary_path]
    meta_path.write_text(to_json({**result.meta, "summary": result.summary,
                                  "exit_code": result.exit_code}))
    return paths + [meta_path]
