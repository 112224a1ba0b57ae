"""Seeded multi-trial experiments: geodesic tracking and switched-ARX prediction.

Every trial derives its random streams from ``(base_seed, trial, role)`` only,
so results do not depend on how trials are scheduled across workers. Results
are merged in trial order before anything is written.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arx import REGIME_1, REGIME_2, SwitchedArx, gen_input, nsr_noise, simulate
from .behavior import (
    Layout,
    SubspacePredictor,
    TrajectoryData,
    build_hankel_partition,
    context_at,
    init_flag_from_svd,
    window_vector,
)
from .errors import InvalidConfig, InvalidInput, NumericalFailure
from .flag import (
    FlagPoint,
    Signature,
    canonical_point,
    chordal_distance,
    exp,
    prefix_basis,
    random_point,
    random_tangent,
)
from .linalg import RngStream, gaussian_matrix
from .past import PastState, past_basis, past_update
from .tracker import ArmijoParams, FrontTracker, TrackerConfig

ROLES_PER_TRIAL = 16


def stream_id(trial: int, role: int) -> int:
    return trial * ROLES_PER_TRIAL + role


# ---------------------------------------------------------------- configs


def _from_dict(cls, data: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise InvalidConfig(f"unknown config keys for {cls.__name__}: {sorted(unknown)}")
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        v = data[f.name]
        if isinstance(v, list):
            v = tuple(tuple(x) if isinstance(x, list) else x for x in v)
        kwargs[f.name] = v
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidConfig):
            raise
        raise InvalidConfig(str(exc)) from exc


def load_config(cls, path: str | Path | None):
    if path is None:
        return cls()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidConfig("config must be a JSON object")
    return _from_dict(cls, data)


def _armijo(cfg) -> ArmijoParams:
    return ArmijoParams(cfg.initial_step, cfg.contraction, cfg.sufficient_decrease, cfg.max_backtracks)


@dataclass(frozen=True)
class GeodesicConfig:
    p: int = 10
    truth_q_pre: tuple[int, ...] = (1, 2, 3, 4, 5)
    truth_q_post: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    tracker_q: tuple[int, ...] = (5, 6)
    alpha: float = 5e-5
    noise_std: float = 1e-2
    T_switch: int = 100
    horizon: int = 200
    window_sizes: tuple[int, ...] = (1, 20, 50)
    trials: int = 100
    seed: int = 0
    steps_K: int = 5
    tracker_init: str = "random"
    initial_step: float = 1.0
    contraction: float = 0.5
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 25

    def __post_init__(self):
        try:
            pre = Signature(self.p, self.truth_q_pre)
            post = Signature(self.p, self.truth_q_post)
            trk = Signature(self.p, self.tracker_q)
            _armijo(self)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc
        if not 0 <= self.T_switch < self.horizon:
            raise InvalidConfig("need 0 <= T_switch < horizon")
        for q in (pre.qd, post.qd):
            if q not in trk.q:
                raise InvalidConfig(f"truth dimension {q} is not tracked by signature {trk.q}")
        if not self.window_sizes or min(self.window_sizes) < 1 or max(self.window_sizes) > self.horizon + 1:
            raise InvalidConfig("window sizes must lie in 1..horizon+1")
        if self.trials < 1 or self.seed < 0 or self.steps_K < 1:
            raise InvalidConfig("trials and steps_K must be >= 1, seed >= 0")
        if self.alpha < 0 or self.noise_std < 0:
            raise InvalidConfig("alpha and noise_std must be non-negative")
        if self.tracker_init not in ("random", "canonical"):
            raise InvalidConfig("tracker_init must be 'random' or 'canonical'")


@dataclass(frozen=True)
class ArxConfig:
    T_sim: int = 300
    T_switch: int = 100
    T_d: int = 30
    T_ini: int = 4
    T_f: int = 4
    window_T: int = 20
    steps_K: int = 5
    flag_signatures: tuple[tuple[int, ...], ...] = ((9, 10), (8, 9, 10, 11, 12, 13, 14, 15))
    grassmann_dims: tuple[int, ...] = (9, 10, 11)
    past_dim: int = 10
    past_beta: float = 0.95
    nsr_levels: tuple[float, ...] = (0.01, 0.02, 0.05, 0.1, 0.2)
    rank_breakdown: bool = True
    trials: int = 100
    seed: int = 0
    initial_step: float = 1.0
    contraction: float = 0.5
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 25

    @property
    def layout(self) -> Layout:
        return Layout(1, 1, self.T_ini, self.T_f)

    @property
    def t_start(self) -> int:
        return max(self.T_ini, self.window_T - 1) + 1

    @property
    def t_stop(self) -> int:
        # last scored time index (inclusive)
        return self.T_sim - self.T_f - 1

    def __post_init__(self):
        object.__setattr__(self, "flag_signatures", tuple(tuple(s) for s in self.flag_signatures))
        try:
            layout = self.layout
            for q in self.flag_signatures:
                Signature(layout.p, q)
            for q in self.grassmann_dims:
                Signature(layout.p, (q,))
            Signature(layout.p, (self.past_dim,))
            _armijo(self)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc
        N = self.T_d - layout.L + 1
        if N < 1:
            raise InvalidConfig("T_d shorter than T_ini + T_f")
        dims = [max(q) for q in self.flag_signatures] + list(self.grassmann_dims) + [self.past_dim]
        if max(dims) > min(layout.p, N):
            raise InvalidConfig(f"subspace dimension exceeds the Hankel rank budget {min(layout.p, N)}")
        if self.t_start > self.t_stop:
            raise InvalidConfig("empty scoring range; increase T_sim")
        if not self.nsr_levels or min(self.nsr_levels) < 0:
            raise InvalidConfig("nsr levels must be non-negative and non-empty")
        if not 0 < self.past_beta <= 1:
            raise InvalidConfig("past_beta must lie in (0, 1]")
        if self.trials < 1 or self.seed < 0 or self.window_T < 1 or self.steps_K < 1:
            raise InvalidConfig("trials, window_T, steps_K must be >= 1 and seed >= 0")
        if self.T_switch < REGIME_2.max_lag:
            raise InvalidConfig("T_switch must be at least the regime-2 lag")


@dataclass
class TrialResult:
    seed: int
    trial: int
    traces: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    predictions: dict = field(default_factory=dict)

    def check_finite(self):
        for group in (self.traces, self.errors, self.predictions):
            for key, v in group.items():
                if not np.all(np.isfinite(v)):
                    raise NumericalFailure(f"non-finite values in trial {self.trial}, {key}")
        return self


# ---------------------------------------------------------------- statistics


def summarize(values) -> tuple[float, float, float]:
    """(median, 30th percentile, 70th percentile) with linear interpolation."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise InvalidInput("cannot summarize an empty group")
    med, p30, p70 = np.percentile(v, [50, 30, 70])
    return float(med), float(p30), float(p70)


def closest_to_median(values) -> int:
    """Index of the value closest to the median (first one on ties)."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise InvalidInput("cannot select from an empty group")
    return int(np.argmin(np.abs(v - np.median(v))))


def _map_trials(fn, cfg, workers: int):
    trials = range(cfg.trials)
    if workers <= 1:
        return [fn(cfg, i) for i in trials]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, [cfg] * cfg.trials, trials))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


# ---------------------------------------------------------------- geodesic tracking


def geodesic_trial(cfg: GeodesicConfig, trial: int) -> TrialResult:
    """One trial; traces[T] holds d(estimate, truth) for t = T-1 .. horizon."""
    seed = cfg.seed
    rng_drift = RngStream(seed, stream_id(trial, 0))
    rng_coef = RngStream(seed, stream_id(trial, 1))
    rng_noise = RngStream(seed, stream_id(trial, 2))
    rng_init = RngStream(seed, stream_id(trial, 3))

    pre, post = Signature(cfg.p, cfg.truth_q_pre), Signature(cfg.p, cfg.truth_q_post)
    trk_sig = Signature(cfg.p, cfg.tracker_q)
    if cfg.tracker_init == "random":
        init = random_point(trk_sig, rng_init)
    else:
        init = canonical_point(trk_sig)
    line = _armijo(cfg)
    trackers = {T: FrontTracker(TrackerConfig(trk_sig, T, cfg.steps_K, line), init) for T in cfg.window_sizes}
    traces = {T: [] for T in cfg.window_sizes}

    truth = canonical_point(pre)
    for t in range(cfg.horizon + 1):
        if t == cfg.T_switch:
            truth = canonical_point(post)
        q_true = truth.sig.qd
        k = trk_sig.q.index(q_true) + 1
        a = rng_coef.normal(q_true)
        w = truth.Y @ a + gaussian_matrix(rng_noise, cfg.p, 1, cfg.noise_std)[:, 0]
        for T, tracker in trackers.items():
            if t >= T - 1:
                traces[T].append(chordal_distance(prefix_basis(tracker.estimate, k), truth.Y))
            tracker.push(w)
            if t >= T - 1:
                tracker.step()
        H = random_tangent(truth, rng_drift)
        truth = exp(truth, H, cfg.alpha)

    res = TrialResult(seed, trial, traces={T: np.array(v) for T, v in traces.items()})
    return res.check_finite()


def run_geodesic_tracking(cfg: GeodesicConfig, workers: int = 1) -> list[TrialResult]:
    return _map_trials(geodesic_trial, cfg, workers)


def geodesic_summary_rows(cfg: GeodesicConfig, results: list[TrialResult]):
    for T in cfg.window_sizes:
        stack = np.vstack([r.traces[T] for r in results])
        for i, t in enumerate(range(T - 1, cfg.horizon + 1)):
            med, p30, p70 = summarize(stack[:, i])
            yield T, t, med, p30, p70, float(np.mean(stack[:, i]))


def write_geodesic_outputs(cfg: GeodesicConfig, results, out, raw: bool = False) -> list[Path]:
    out = Path(out)
    paths = [
        _write(
            out,
            "geodesic_summary.csv",
            _csv_text(["window_T", "t", "median_dist", "p30", "p70", "mean_dist"], geodesic_summary_rows(cfg, results)),
        )
    ]
    if raw:
        rows = (
            (T, r.trial, t, d)
            for T in cfg.window_sizes
            for r in results
            for t, d in zip(range(T - 1, cfg.horizon + 1), r.traces[T])
        )
        paths.append(_write(out, "geodesic_raw.csv", _csv_text(["window_T", "trial", "t", "dist"], rows)))
    return paths


# ---------------------------------------------------------------- switched ARX prediction


def _label(q) -> str:
    q = tuple(q)
    if len(q) > 2 and q == tuple(range(q[0], q[-1] + 1)):
        return f"{q[0]}_to_{q[-1]}"
    return "_".join(map(str, q))


def arx_model_names(cfg: ArxConfig) -> list[str]:
    names = ["no_learning"]
    for q in cfg.flag_signatures:
        names.append(f"ensemble_{_label(q)}")
    if cfg.rank_breakdown:
        for q in cfg.flag_signatures:
            names.extend(f"flag_{_label(q)}_rank_{r}" for r in q)
    names.extend(f"gr_{q}" for q in cfg.grassmann_dims)
    names.append(f"past_{cfg.past_dim}")
    return names


def arx_trial_data(cfg: ArxConfig, trial: int) -> dict:
    """Noise-free signals and standard-normal noise draws shared by all models and NSR levels."""
    seed = cfg.seed
    u_d = gen_input(RngStream(seed, stream_id(trial, 0)), cfg.T_d)
    z_d = RngStream(seed, stream_id(trial, 1)).normal(cfg.T_d)
    u = gen_input(RngStream(seed, stream_id(trial, 2)), cfg.T_sim)
    z = RngStream(seed, stream_id(trial, 3)).normal(cfg.T_sim)
    # offline data always comes from the pre-switch regime
    y_d = simulate(SwitchedArx(REGIME_1, REGIME_1), u_d)
    y = simulate(SwitchedArx(REGIME_1, REGIME_2, cfg.T_switch), u)
    return {"u_d": u_d, "y_d": y_d, "z_d": z_d, "u": u, "y": y, "z": z}


def run_arx_online(cfg: ArxConfig, u_d, y_d_meas, u, y_meas) -> dict[str, np.ndarray]:
    """First-step predictions of every model over the scored range.

    At time t every model predicts y_t from its state after consuming the
    streaming samples that end at t-1; then the sample ending at t is pushed.
    """
    layout = cfg.layout
    L, p = layout.L, layout.p
    part = build_hankel_partition(TrajectoryData(u_d, y_d_meas), cfg.T_ini, cfg.T_f)
    line = _armijo(cfg)

    # the Hankel matrix itself as "basis" gives exactly the offline predictor
    offline = SubspacePredictor(part.H, layout)
    flag_trackers = {}
    for q in cfg.flag_signatures:
        sig = Signature(p, q)
        flag_trackers[q] = FrontTracker(TrackerConfig(sig, cfg.window_T, cfg.steps_K, line), init_flag_from_svd(part, sig))
    gr_trackers = {}
    for q in cfg.grassmann_dims:
        sig = Signature(p, (q,))
        gr_trackers[q] = FrontTracker(TrackerConfig(sig, cfg.window_T, cfg.steps_K, line), init_flag_from_svd(part, sig))
    svd_basis = init_flag_from_svd(part, Signature(p, (cfg.past_dim,))).Y
    past = PastState.from_basis(svd_basis, beta=cfg.past_beta)

    names = arx_model_names(cfg)
    preds = {name: [] for name in names}
    scored = range(cfg.t_start, cfg.t_stop + 1)
    for t in range(cfg.T_sim):
        if cfg.t_start <= t <= cfg.t_stop:
            ctx = context_at(u, y_meas, t, layout).vector
            preds["no_learning"].append(offline(ctx)[0])
            for q, trk in flag_trackers.items():
                firsts = [SubspacePredictor(prefix_basis(trk.estimate, k), layout)(ctx)[0] for k in range(1, len(q) + 1)]
                preds[f"ensemble_{_label(q)}"].append(float(np.mean(firsts)))
                if cfg.rank_breakdown:
                    for r, v in zip(q, firsts):
                        preds[f"flag_{_label(q)}_rank_{r}"].append(v)
            for q, trk in gr_trackers.items():
                preds[f"gr_{q}"].append(SubspacePredictor(trk.estimate.Y, layout)(ctx)[0])
            preds[f"past_{cfg.past_dim}"].append(SubspacePredictor(past_basis(past), layout)(ctx)[0])
        if t >= L - 1:
            w = window_vector(u, y_meas, t - L + 1, L)
            for trk in flag_trackers.values():
                trk.update(w)
            for trk in gr_trackers.values():
                trk.update(w)
            past_update(past, w)
    assert all(len(v) == len(scored) for v in preds.values())
    return {k: np.asarray(v, dtype=float) for k, v in preds.items()}


def arx_trial(cfg: ArxConfig, trial: int) -> TrialResult:
    data = arx_trial_data(cfg, trial)
    y_true = data["y"][cfg.t_start : cfg.t_stop + 1]
    res = TrialResult(cfg.seed, trial)
    for sigma in cfg.nsr_levels:
        y_d_meas = data["y_d"] + nsr_noise(data["y_d"], sigma, data["z_d"])
        y_meas = data["y"] + nsr_noise(data["y"], sigma, data["z"])
        preds = run_arx_online(cfg, data["u_d"], y_d_meas, data["u"], y_meas)
        for name, yhat in preds.items():
            res.errors[(name, sigma)] = float(np.sum((y_true - yhat) ** 2))
            res.predictions[(name, sigma)] = yhat
    res.traces["y_true"] = y_true
    return res.check_finite()


def run_arx_prediction(cfg: ArxConfig, workers: int = 1) -> list[TrialResult]:
    return _map_trials(arx_trial, cfg, workers)


def arx_summary_rows(cfg: ArxConfig, results: list[TrialResult]):
    for name in arx_model_names(cfg):
        for sigma in cfg.nsr_levels:
            med, p30, p70 = summarize([r.errors[(name, sigma)] for r in results])
            yield name, float(sigma), med, p30, p70


def arx_median_table(cfg: ArxConfig, results) -> dict[tuple[str, float], float]:
    return {(name, sigma): med for name, sigma, med, _, _ in arx_summary_rows(cfg, results)}


def write_arx_outputs(cfg: ArxConfig, results, out) -> list[Path]:
    out = Path(out)
    paths = [
        _write(out, "arx_summary.csv", _csv_text(["model", "nsr", "median_cpe", "p30", "p70"], arx_summary_rows(cfg, results)))
    ]
    raw = (
        (name, float(sigma), r.trial, r.errors[(name, sigma)])
        for name in arx_model_names(cfg)
        for sigma in cfg.nsr_levels
        for r in results
    )
    paths.append(_write(out, "arx_raw.csv", _csv_text(["model", "nsr", "trial", "cpe"], raw)))

    def trajectories():
        ts = range(cfg.t_start, cfg.t_stop + 1)
        for name in arx_model_names(cfg):
            for sigma in cfg.nsr_levels:
                best = results[closest_to_median([r.errors[(name, sigma)] for r in results])]
                for t, yt, yp in zip(ts, best.traces["y_true"], best.predictions[(name, sigma)]):
                    yield name, float(sigma), t, float(yt), float(yp)

    paths.append(
        _write(out, "arx_trajectories.csv", _csv_text(["model", "nsr", "t", "y_true", "y_pred"], trajectories()))
    )
    return paths
