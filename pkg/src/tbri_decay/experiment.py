"""Ensemble experiments: configuration, the run pipeline, sweeps and figure data.

A run draws `realizations` independent TBRI Hamiltonians, evolves a set of
initial basis states in each, and reduces the results in realization order,
so outputs are identical whatever the number of worker threads.
"""
from __future__ import annotations

import configparser
import hashlib
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .analytic import (
    T_C_NOTE,
    asymptotic_tail_prefactor,
    closed_form_w,
    crossover_time,
    fit_decay,
    weak_tail_prefactor,
)
from .dynamics import (
    ShellStats,
    SurvivalSeries,
    TimeGrid,
    class_count,
    oscillation_analysis,
    population_participation,
    return_amplitude,
    time_average,
)
from .exceptions import ConfigError, InsufficientRange, SaturationDominates
from .export import sha256_file, write_csv, write_json, write_manifest
from .fock_basis import enumerate_basis
from .spectral import density_of_states, diagonalize, local_spacing
from .tbri_model import ModelConfig, build_realization, direct_coupling_stats, delta_e_squared_theory

log = logging.getLogger(__name__)


# ----------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class GridSpec:
    """Time grid; None fields are derived from the ensemble's Delta_E and Gamma_0."""

    log_start: Optional[float] = None
    log_stop: Optional[float] = None
    log_points: int = 160
    sat_start: Optional[float] = None
    sat_stop: Optional[float] = None
    sat_points: int = 1500


@dataclass(frozen=True)
class InitialStateSpec:
    """Either one basis index, or the `count` states closest in H0 energy to `energy`.

    ``energy`` None means the centre (mean) of the unperturbed spectrum.
    """

    mode: str = "energy"
    index: int = 0
    energy: Optional[float] = None
    count: int = 10


@dataclass(frozen=True)
class AnalysisSpec:
    early_window: Optional[tuple] = None
    late_window: Optional[tuple] = None
    bandwidth: Optional[float] = None
    tc_scan: Optional[tuple] = None
    saturation_factor: float = 10.0
    npc_states: int = 1
    sf_span: float = 5.0
    dos_bins: int = 60


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "tbri_out"
    format: str = "both"


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelConfig
    realizations: int = 20
    threads: int = 1
    times: GridSpec = field(default_factory=GridSpec)
    initial_state: InitialStateSpec = field(default_factory=InitialStateSpec)
    analysis: AnalysisSpec = field(default_factory=AnalysisSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def __post_init__(self):
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.threads < 0:
            raise ConfigError("threads must be >= 0")
        if self.initial_state.mode not in ("index", "energy"):
            raise ConfigError("initial state selector must be index:K or energy:E")
        if self.initial_state.count < 1:
            raise ConfigError("initial state count must be >= 1")
        if self.output.format not in ("csv", "json", "both"):
            raise ConfigError("format must be csv, json or both")
        g = self.times
        if g.log_points < 2 or g.sat_points < 2:
            raise ConfigError("grids need at least two points")
        if g.log_start is not None and g.log_stop is not None and not 0 < g.log_start < g.log_stop:
            raise ConfigError("need 0 < log_start < log_stop")
        if g.sat_start is not None and g.sat_stop is not None and not g.sat_start < g.sat_stop:
            raise ConfigError("need sat_start < sat_stop")


def _auto(conv):
    def parse(text):
        text = text.strip()
        return None if text.lower() == "auto" else conv(text)
    return parse


def _pair(text):
    parts = [float(x) for x in text.replace(",", " ").split()]
    if len(parts) != 2:
        raise ValueError("expected two numbers")
    return tuple(parts)


def _selector(text):
    kind, _, value = text.strip().partition(":")
    kind = kind.strip().lower()
    if kind == "index":
        return {"mode": "index", "index": int(value)}
    if kind == "energy":
        value = value.strip().lower()
        return {"mode": "energy", "energy": None if value in ("", "center", "centre") else float(value)}
    raise ValueError("expected index:K or energy:E|center")


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return value


# section -> key -> (target, attribute, parser)
_SCHEMA = {
    "model": {
        "n": ("model", "n", int),
        "m": ("model", "m", int),
        "v0": ("model", "v0", float),
        "d0": ("model", "d0", float),
        "seed": ("model", "seed", _seed),
        "spectrum": ("model", "spectrum_kind", str.strip),
        "jitter": ("model", "jitter", float),
    },
    "ensemble": {
        "realizations": ("top", "realizations", int),
        "threads": ("top", "threads", int),
    },
    "initial_state": {
        "select": ("initial_state", None, _selector),
        "count": ("initial_state", "count", int),
    },
    "times": {
        "log_start": ("times", "log_start", _auto(float)),
        "log_stop": ("times", "log_stop", _auto(float)),
        "log_points": ("times", "log_points", int),
        "sat_start": ("times", "sat_start", _auto(float)),
        "sat_stop": ("times", "sat_stop", _auto(float)),
        "sat_points": ("times", "sat_points", int),
    },
    "analysis": {
        "early_window": ("analysis", "early_window", _auto(_pair)),
        "late_window": ("analysis", "late_window", _auto(_pair)),
        "bandwidth": ("analysis", "bandwidth", _auto(float)),
        "tc_scan": ("analysis", "tc_scan", _auto(_pair)),
        "saturation_factor": ("analysis", "saturation_factor", float),
        "npc_states": ("analysis", "npc_states", int),
        "sf_span": ("analysis", "sf_span", float),
        "dos_bins": ("analysis", "dos_bins", int),
    },
    "output": {
        "directory": ("output", "directory", str.strip),
        "format": ("output", "format", str.strip),
    },
}
_REQUIRED = (("model", "n"), ("model", "m"), ("model", "v0"))


def _line_numbers(text: str) -> dict:
    lines, section = {}, None
    for k, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            lines.setdefault((section, None), k)
        elif section and s and s[0] not in "#;" and ("=" in s or ":" in s):
            key = s.split("=", 1)[0].split(":", 1)[0].strip().lower()
            lines.setdefault((section, key), k)
    return lines


def parse_config(text: str) -> ExperimentConfig:
    """Parse the INI-style experiment description.

    Errors are raised as ConfigError carrying the line of the offending
    entry.
    """
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(exc.message.splitlines()[0] if hasattr(exc, "message") else str(exc),
                          getattr(exc, "lineno", None)) from exc
    lines = _line_numbers(text)
    parts = {"model": {}, "top": {}, "initial_state": {}, "times": {}, "analysis": {}, "output": {}}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", lines.get((section, None)))
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", lines.get((section, key)))
            target, attr, conv = _SCHEMA[section][key]
            try:
                value = conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}", lines.get((section, key))) from None
            if attr is None:
                parts[target].update(value)
            else:
                parts[target][attr] = value
    for section, key in _REQUIRED:
        attr = _SCHEMA[section][key][1]
        if attr not in parts[section]:
            raise ConfigError(f"missing required key [{section}] {key}")
    try:
        model = ModelConfig(**parts["model"])
        return ExperimentConfig(
            model=model,
            times=GridSpec(**parts["times"]),
            initial_state=InitialStateSpec(**parts["initial_state"]),
            analysis=AnalysisSpec(**parts["analysis"]),
            output=OutputSpec(**parts["output"]),
            **parts["top"],
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def _show(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_ini(cfg: ExperimentConfig) -> str:
    """Canonical text form; ``parse_config(to_ini(c)) == c``."""
    m = cfg.model
    sel = (f"index:{cfg.initial_state.index}" if cfg.initial_state.mode == "index"
           else f"energy:{'center' if cfg.initial_state.energy is None else repr(float(cfg.initial_state.energy))}")
    out = [
        "[model]",
        f"n = {m.n}",
        f"m = {m.m}",
        f"v0 = {float(m.v0)!r}",
        f"d0 = {float(m.d0)!r}",
        f"seed = {m.seed}",
        f"spectrum = {m.spectrum_kind}",
        f"jitter = {float(m.jitter)!r}",
        "",
        "[ensemble]",
        f"realizations = {cfg.realizations}",
        f"threads = {cfg.threads}",
        "",
        "[initial_state]",
        f"select = {sel}",
        f"count = {cfg.initial_state.count}",
        "",
        "[times]",
    ]
    out += [f"{f.name} = {_show(getattr(cfg.times, f.name))}" for f in fields(GridSpec)]
    out += ["", "[analysis]"]
    out += [f"{f.name} = {_show(getattr(cfg.analysis, f.name))}" for f in fields(AnalysisSpec)]
    out += ["", "[output]", f"directory = {cfg.output.directory}", f"format = {cfg.output.format}", ""]
    return "\n".join(out)


def _result_config(cfg: ExperimentConfig) -> ExperimentConfig:
    # output location and thread count never change results
    return replace(cfg, threads=1, output=replace(cfg.output, directory="."))


def config_hash(cfg: ExperimentConfig) -> str:
    """sha256 of the canonical config, ignoring output directory and threads."""
    return hashlib.sha256(to_ini(_result_config(cfg)).encode()).hexdigest()


def with_overrides(cfg: ExperimentConfig, *, seed=None, out=None, realizations=None,
                   threads=None, fmt=None, v0=None) -> ExperimentConfig:
    model = cfg.model
    if seed is not None:
        model = replace(model, seed=int(seed))
    if v0 is not None:
        model = replace(model, v0=float(v0))
    output = cfg.output
    if out is not None:
        output = replace(output, directory=str(out))
    if fmt is not None:
        output = replace(output, format=fmt)
    kw = {}
    if realizations is not None:
        kw["realizations"] = int(realizations)
    if threads is not None:
        kw["threads"] = int(threads)
    return replace(cfg, model=model, output=output, **kw)


# ----------------------------------------------------------------------------
# the run pipeline


def select_initial_states(h0: np.ndarray, spec: InitialStateSpec) -> np.ndarray:
    """Basis indices of the initial states; energy ties are broken by index."""
    if spec.mode == "index":
        if not 0 <= spec.index < len(h0):
            raise ConfigError(f"initial state index {spec.index} outside [0, {len(h0)})")
        return np.array([spec.index])
    target = float(np.mean(h0)) if spec.energy is None else float(spec.energy)
    order = np.lexsort((np.arange(len(h0)), np.abs(h0 - target)))
    return order[: min(spec.count, len(h0))]


def _prepass(cfg: ExperimentConfig, basis, r: int) -> dict:
    H = build_realization(cfg.model, r, basis)
    A = H.matrix
    states = select_initial_states(H.h0, cfg.initial_state)
    stats = [direct_coupling_stats(H, int(i)) for i in states]
    N = A.shape[0]
    mean = float(np.trace(A)) / N
    var = float(np.sum(A * A)) / N - mean**2
    return {
        "states": states,
        "sum_sq": np.array([s.sum_sq for s in stats]),
        "gamma0": np.array([s.gamma0 for s in stats]),
        "spec_mean": mean,
        "spec_var": max(var, 0.0),
    }


@dataclass
class _Plan:
    grid: TimeGrid
    sat_window: tuple
    sf_edges: np.ndarray
    dos_edges: np.ndarray
    bandwidth: float
    delta_e: float
    gamma0: float
    shell: float
    osc_times: np.ndarray


def _plan(cfg: ExperimentConfig, pre: list) -> _Plan:
    m = cfg.model
    sum_sq = np.concatenate([p["sum_sq"] for p in pre])
    gamma0 = float(np.mean(np.concatenate([p["gamma0"] for p in pre])))
    delta_e = math.sqrt(float(np.mean(sum_sq)))
    N = math.comb(m.m, m.n)
    spec_sd = math.sqrt(np.mean([p["spec_var"] for p in pre]))
    spec_mean = float(np.mean([p["spec_mean"] for p in pre]))
    scale = delta_e if delta_e > 0 else m.d0
    g = gamma0 if gamma0 > 0 else scale
    shell = min(g, scale)
    n_c_max = max(1, -(-min(m.n, m.m - m.n) // 2))

    T = cfg.times
    log_start = T.log_start if T.log_start is not None else 1e-3 / scale
    log_stop = T.log_stop if T.log_stop is not None else max(10.0 * g / scale**2, 10.0 / scale)
    sat_start = T.sat_start if T.sat_start is not None else log_stop
    span_default = max(20.0 * n_c_max / shell, 200.0 / scale)
    sat_stop = T.sat_stop if T.sat_stop is not None else sat_start + span_default
    logs = np.geomspace(log_start, log_stop, T.log_points)
    lin = np.linspace(sat_start, sat_stop, T.sat_points)
    t = np.unique(np.concatenate([[0.0], logs, lin]))
    span = sat_stop - sat_start
    sat_window = (sat_start + 0.25 * span, sat_stop)

    D_est = math.sqrt(2 * math.pi) * spec_sd / N if spec_sd > 0 else m.d0
    bw = cfg.analysis.bandwidth if cfg.analysis.bandwidth is not None else 5.0 * D_est
    half = cfg.analysis.sf_span * scale
    nb = max(1, int(math.ceil(half / bw)))
    sf_edges = (np.arange(-nb, nb + 2) - 0.5) * bw
    width = max(4.5 * spec_sd, m.d0)
    dos_edges = np.linspace(spec_mean - width, spec_mean + width, cfg.analysis.dos_bins + 1)
    osc_times = np.linspace(0.0, 30.0 / shell, 601)
    return _Plan(TimeGrid(t), sat_window, sf_edges, dos_edges, bw, delta_e, gamma0, shell, osc_times)


def _run_realization(cfg: ExperimentConfig, basis, r: int, plan: _Plan) -> dict:
    H = build_realization(cfg.model, r, basis)
    A = H.matrix
    states = select_initial_states(H.h0, cfg.initial_state)
    dec = diagonalize(H)
    E = dec.energies
    C = dec.components
    diag = np.diag(A)
    t = plan.grid.t_values

    Ebar = float(np.mean(E))
    W = np.empty((len(t), len(states)))
    Wts = (C[states] ** 2).T
    for s in range(0, len(t), 256):
        ph = np.outer(t[s:s + 256], E - Ebar)
        re = np.cos(ph) @ Wts
        im = np.sin(ph) @ Wts
        W[s:s + 256] = re**2 + im**2

    dos = density_of_states(dec, plan.dos_edges)
    rho_hist = dos.rho
    kernel = np.exp(-0.5 * ((E[:, None] - E[None, :]) / plan.bandwidth) ** 2)
    kernel /= kernel.sum(axis=1, keepdims=True)
    sat_sel = (t >= plan.sat_window[0]) & (t <= plan.sat_window[1])

    per_state = []
    sf_acc = np.zeros(len(plan.sf_edges) - 1)
    for j, i in enumerate(states):
        i = int(i)
        cs = direct_coupling_stats(H, i)
        w = C[i] ** 2
        centroid = float(w @ E)
        variance = float(w @ (E - centroid) ** 2)
        delta_e = math.sqrt(cs.sum_sq) if cs.sum_sq > 0 else 0.0
        if delta_e > 0:
            t_short = 0.01 / delta_e
            W_short = abs(return_amplitude(dec, i, [t_short])[0]) ** 2
            short_dev = ((1.0 - W_short) / t_short**2) / cs.sum_sq - 1.0
        else:
            short_dev = 0.0
        avg = kernel @ w
        avg /= avg.sum()
        npc_raw = float(1.0 / np.sum(w**2))
        # without interaction the levels are degenerate and smoothing is meaningless
        npc = float(1.0 / np.sum(avg**2)) if cfg.model.v0 != 0 else npc_raw
        W_inf = time_average(t[sat_sel], W[sat_sel, j])
        shell = min(cs.gamma0, delta_e) if cs.gamma0 > 0 else delta_e
        n_c = class_count(basis, i, diag, diag[i], shell) if shell > 0 else 0
        D_loc = local_spacing(E, A[i, i])
        hist, _ = np.histogram(E - A[i, i], plan.sf_edges, weights=w)
        sf_acc += hist / np.diff(plan.sf_edges)
        per_state.append({
            "index": i,
            "H_ii": float(A[i, i]),
            "delta_e_sq_empirical": cs.sum_sq,
            "delta_e_sq_spectral": variance,
            "identity_residual": abs(variance - cs.sum_sq) / cs.sum_sq if cs.sum_sq > 0 else abs(variance),
            "centroid_shift": centroid - float(A[i, i]),
            "peak_shift": float(E[np.argmax(w)] - A[i, i]),
            "second_order_shift": cs.delta_i,
            "gamma0": cs.gamma0,
            "rho_f": cs.rho_f_at_Ei,
            "mean_v_sq": cs.mean_v_sq,
            "short_time_rel_dev": short_dev,
            "W_inf": W_inf,
            "N_pc": npc,
            "N_pc_raw": npc_raw,
            "saturation_ratio": W_inf * npc / 3.0,
            "n_c": n_c,
            "Delta": shell,
            "D": D_loc,
        })

    n_npc = max(0, min(cfg.analysis.npc_states, len(states)))
    npc_t = np.zeros(len(t))
    osc = None
    if n_npc:
        for i in states[:n_npc]:
            npc_t += population_participation(dec, int(i), t)
        npc_t /= n_npc
        i0 = int(states[0])
        st0 = per_state[0]
        if st0["Delta"] > 0:
            series = population_participation(dec, i0, plan.osc_times)
            keep = plan.osc_times >= 0.5 / plan.shell
            shell_stats = ShellStats(st0["Delta"], st0["W_inf"], st0["N_pc"], max(st0["n_c"], 1), st0["D"])
            res = oscillation_analysis(plan.osc_times[keep], series[keep], shell_stats)
            osc = {"status": res.status, "period": res.period, "ratio": res.ratio, "n_c": st0["n_c"],
                   "Delta": st0["Delta"]}

    return {
        "index": r,
        "states": [int(i) for i in states],
        "W": W,
        "npc_t": npc_t,
        "sf": sf_acc / len(states),
        "rho": rho_hist,
        "dos_fit": {"sigma": dos.sigma, "E_center": dos.E_center, "D": dos.D, "r_squared": dos.fit_r_squared},
        "spectrum_variance": float(np.var(E)),
        "per_state": per_state,
        "oscillation": osc,
    }


def regime_label(v0: float, gamma0: float, delta_e: float) -> str:
    """'trivial' without interaction, else 'gaussian' when Gamma_0 >= Delta_E, otherwise 'breit-wigner'."""
    if v0 == 0 or delta_e == 0:
        return "trivial"
    return "gaussian" if gamma0 >= delta_e else "breit-wigner"


@dataclass
class RunSummary:
    data: dict
    files: dict = field(default_factory=dict)
    directory: Optional[Path] = None

    @property
    def regime(self) -> str:
        return self.data["regime"]

    @property
    def ensemble(self) -> dict:
        return self.data["ensemble"]

    def verify(self) -> bool:
        return all(sha256_file(self.directory / n) == h for n, h in self.files.items())


def _map(fn, items, threads: int):
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    import os
    workers = threads if threads > 0 else (os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> RunSummary:
    """Run the full ensemble pipeline and (optionally) write its output files.

    Files: ``survival.csv`` (t, W_exact, W_gauss_law, W_interp, W_exp_tail,
    N_pc_t), ``strength_function.csv``, ``dos.csv``, ``summary.json`` and
    ``manifest.json``; ``output.format`` selects CSV, JSON or both.
    """
    m = cfg.model
    basis = enumerate_basis(m.n, m.m)
    R = range(cfg.realizations)
    pre = _map(lambda r: _prepass(cfg, basis, r), R, cfg.threads)
    plan = _plan(cfg, pre)
    results = _map(lambda r: _run_realization(cfg, basis, r, plan), R, cfg.threads)

    t = plan.grid.t_values
    W_all = np.concatenate([res["W"] for res in results], axis=1)
    W_mean = W_all.mean(axis=1)
    npc_t = np.mean([res["npc_t"] for res in results], axis=0)
    states = [s for res in results for s in res["per_state"]]

    def mean_of(key):
        vals = [s[key] for s in states if s[key] is not None]
        return float(np.mean(vals)) if vals else float("nan")

    d2_theory = delta_e_squared_theory(m)
    d2_emp = mean_of("delta_e_sq_empirical")
    d2_spec = mean_of("delta_e_sq_spectral")
    gamma0 = mean_of("gamma0")
    delta_e = math.sqrt(d2_emp) if d2_emp > 0 else 0.0
    regime = regime_label(m.v0, gamma0, delta_e)
    W_inf = mean_of("W_inf")

    ens = {
        "delta_e_sq_theory": d2_theory,
        "delta_e_sq_empirical": d2_emp,
        "delta_e_sq_spectral": d2_spec,
        "empirical_over_theory": d2_emp / d2_theory if d2_theory > 0 else float("nan"),
        "identity_max_residual": max(s["identity_residual"] for s in states),
        "short_time_max_rel_dev": max(abs(s["short_time_rel_dev"]) for s in states),
        "gamma0": gamma0,
        "gamma0_over_delta_e": gamma0 / delta_e if delta_e > 0 else float("nan"),
        "W_inf": W_inf,
        "N_pc": mean_of("N_pc"),
        "N_pc_raw": mean_of("N_pc_raw"),
        "saturation_ratio": mean_of("saturation_ratio"),
        "n_c": max(s["n_c"] for s in states),
        "Delta": mean_of("Delta"),
        "D": mean_of("D"),
        "saturation_window": list(plan.sat_window),
        "bandwidth": plan.bandwidth,
        "dos_sigma": float(np.mean([res["dos_fit"]["sigma"] for res in results])),
        "spectrum_variance": float(np.mean([res["spectrum_variance"] for res in results])),
    }

    if regime == "trivial":
        ones = np.ones_like(t)
        W_gauss, W_interp, W_tail = ones, ones, ones
        tail_law = "none"
        fit = {"status": "skipped: no interaction"}
        ens["t_c"] = None
    else:
        W_gauss = closed_form_w("gaussian", t, delta_e=delta_e)
        W_interp = closed_form_w("interpolation", t, gamma=gamma0, delta_e=delta_e)
        if regime == "gaussian":
            W_tail = closed_form_w("asymptotic_tail", t, gamma=gamma0, delta_e=delta_e)
            tail_law = "asymptotic_tail"
            C_theory = asymptotic_tail_prefactor(gamma0, delta_e)
        else:
            W_tail = closed_form_w("weak_tail", t, gamma=gamma0, delta_e=delta_e)
            tail_law = "weak_tail"
            C_theory = weak_tail_prefactor(gamma0, delta_e)
        cross = crossover_time(gamma0, delta_e, C_theory, cfg.analysis.tc_scan, strict=False)
        ens["t_c"] = {"gamma_over_delta_sq": cross.t_ratio, "gamma_over_2delta_sq": cross.t_half,
                      "intersection": cross.t_intersection, "note": cross.note}
        series = SurvivalSeries(plan.grid, W_mean, "exact-spectral", {"W_inf": W_inf})
        try:
            df = fit_decay(series, gamma=gamma0, delta_e=delta_e, early_window=cfg.analysis.early_window,
                           late_window=cfg.analysis.late_window, w_inf=W_inf,
                           saturation_factor=cfg.analysis.saturation_factor, check_range=False,
                           require_tail=False)
            status = "ok" if df.n_late >= 3 else "partial: tail window below the saturation guard"
            fit = {"status": status, **df.as_dict(), "tail_prefactor_theory": C_theory,
                   "delta_sq_fit_over_measured": df.delta_sq_fit / d2_spec}
        except (InsufficientRange, SaturationDominates) as exc:
            fit = {"status": f"failed: {exc}"}

    osc = [res["oscillation"] for res in results if res["oscillation"]]
    ok = [o for o in osc if o["status"] == "ok"]
    ens["oscillation"] = {
        "detected": len(ok),
        "analysed": len(osc),
        "median_period": float(np.median([o["period"] for o in ok])) if ok else None,
        "median_ratio": float(np.median([o["ratio"] for o in ok])) if ok else None,
    }

    data = {
        "tool": "tbri-decay",
        "version": __version__,
        "config_sha256": config_hash(cfg),
        "config": asdict(_result_config(cfg)),
        "regime": regime,
        "ensemble": ens,
        "decay_fit": fit,
        "realizations": [
            {"index": res["index"], "states": res["states"], "dos_fit": res["dos_fit"],
             "oscillation": res["oscillation"], "per_state": res["per_state"]}
            for res in results
        ],
    }
    summary = RunSummary(data)
    if not write:
        summary.data["_arrays"] = {"t": t, "W_mean": W_mean, "npc_t": npc_t, "W_all": W_all}
        return summary

    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    head = [
        "tbri-decay " + __version__,
        f"config_sha256 = {data['config_sha256']}",
        f"n = {m.n}, m = {m.m}, v0 = {m.v0!r}, seed = {m.seed}, realizations = {cfg.realizations}",
        f"regime = {regime}",
    ]
    names = []
    if cfg.output.format in ("csv", "both"):
        sf = np.mean([res["sf"] for res in results], axis=0)
        Ec = 0.5 * (plan.sf_edges[1:] + plan.sf_edges[:-1])
        if regime == "trivial":
            P_gauss = np.zeros_like(Ec)
            P_bw = np.zeros_like(Ec)
        else:
            P_gauss = np.exp(-0.5 * (Ec / delta_e) ** 2) / math.sqrt(2 * math.pi * d2_emp)
            P_bw = gamma0 / (2 * math.pi) / (Ec**2 + 0.25 * gamma0**2) if gamma0 > 0 else np.zeros_like(Ec)
        write_csv(out / "survival.csv", {
            "t": t, "W_exact": W_mean, "W_gauss_law": W_gauss, "W_interp": W_interp,
            "W_exp_tail": W_tail, "N_pc_t": npc_t,
        }, head + [
            "units: t in 1/energy (hbar = 1), energies in units of d0",
            "W_exact: mean over realizations and initial states of the exact return probability",
            f"W_exp_tail: {tail_law} law with Gamma_0 = {gamma0:.12g}, Delta_E = {delta_e:.12g}",
            f"N_pc_t: participation number of the evolved state, first {n_npc_label(cfg)} initial state(s)",
        ])
        write_csv(out / "strength_function.csv", {"E_minus_Hii": Ec, "P_exact": sf, "P_gauss": P_gauss,
                                                  "P_breit_wigner": P_bw},
                  head + [f"bin width = {plan.bandwidth:.12g}", "energies relative to H_ii"])
        rho = np.mean([res["rho"] for res in results], axis=0)
        Ed = 0.5 * (plan.dos_edges[1:] + plan.dos_edges[:-1])
        write_csv(out / "dos.csv", {"E": Ed, "rho": rho}, head + ["ensemble-mean density of states"])
        names += ["survival.csv", "strength_function.csv", "dos.csv"]
    files = {n: sha256_file(out / n) for n in names}
    summary.files = dict(files)
    summary.directory = out
    if cfg.output.format in ("json", "both"):
        data["files"] = files
        write_json(out / "summary.json", data)
        names.append("summary.json")
        summary.files["summary.json"] = sha256_file(out / "summary.json")
    write_manifest(out, names)
    return summary


def n_npc_label(cfg: ExperimentConfig) -> str:
    return str(max(0, cfg.analysis.npc_states))


# ----------------------------------------------------------------------------
# sweeps


@dataclass
class SweepResult:
    points: list
    aggregate: Optional[Path]


SWEEP_COLUMNS = ("v0", "gamma0", "delta_e", "gamma0_over_delta_e", "gamma_fit", "delta_sq_fit",
                 "prefactor_fit", "saturation_ratio")


def run_sweep(cfg: ExperimentConfig, v0_values: Sequence[float], write: bool = True) -> SweepResult:
    """Run one experiment per interaction strength and tabulate the fits.

    Duplicate values are dropped with a warning.  A failing point is
    recorded with its error and NaN entries; the table is still written.
    """
    seen, values = set(), []
    for v in v0_values:
        v = float(v)
        if v in seen:
            warnings.warn(f"duplicate sweep value v0={v} ignored", stacklevel=2)
            continue
        seen.add(v)
        values.append(v)
    if len(values) < 2:
        raise ConfigError("a sweep needs at least two distinct v0 values")
    base = Path(cfg.output.directory)

    def one(v):
        point_cfg = with_overrides(cfg, v0=v, out=base / f"v0_{v:.6g}", threads=1)
        try:
            s = run_experiment(point_cfg, write=write)
            e, f = s.ensemble, s.data["decay_fit"]
            row = {
                "v0": v,
                "gamma0": e["gamma0"],
                "delta_e": math.sqrt(e["delta_e_sq_empirical"]),
                "gamma0_over_delta_e": e["gamma0_over_delta_e"],
                "gamma_fit": f.get("gamma_fit", float("nan")),
                "delta_sq_fit": f.get("delta_sq_fit", float("nan")),
                "prefactor_fit": f.get("prefactor_fit", float("nan")),
                "saturation_ratio": e["saturation_ratio"],
                "regime": s.regime,
                "status": f["status"].split(":")[0],
            }
        except Exception as exc:  # partial-failure reporting
            log.warning("sweep point v0=%g failed: %s", v, exc)
            row = {k: float("nan") for k in SWEEP_COLUMNS}
            row.update(v0=v, regime="error", status=f"error: {type(exc).__name__}: {exc}")
        return row

    rows = _map(one, values, cfg.threads)
    path = None
    if write:
        base.mkdir(parents=True, exist_ok=True)
        cols = {k: [r[k] for r in rows] for k in SWEEP_COLUMNS}
        cols["regime"] = [r["regime"] for r in rows]
        cols["status"] = [r["status"].replace(",", ";") for r in rows]
        path = write_csv(base / "sweep.csv", cols, [
            "tbri-decay " + __version__,
            f"config_sha256 = {config_hash(cfg)}",
            "saturation_ratio = W_inf * N_pc / 3",
        ])
        write_manifest(base, ["sweep.csv"])
    return SweepResult(rows, path)


# ----------------------------------------------------------------------------
# schematic crossover figure


def figure1_data(gamma: float = 0.5, delta_e: float = 1.2, t_max: float = 3.0, points: int = 301) -> dict:
    """Curves of the Gaussian law, the interpolation, the tails and the crossover markers."""
    if not (gamma > 0 and delta_e > 0):
        raise ValueError("gamma and delta_e must be positive")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if points < 2:
        raise ValueError("need at least two points")
    t = np.linspace(0.0, t_max, points)
    C = asymptotic_tail_prefactor(gamma, delta_e)
    cross = crossover_time(gamma, delta_e, C, strict=False)
    curves = {
        "t": t,
        "W_gauss": closed_form_w("gaussian", t, delta_e=delta_e),
        "W_interp": closed_form_w("interpolation", t, gamma=gamma, delta_e=delta_e),
        "W_tail": closed_form_w("asymptotic_tail", t, gamma=gamma, delta_e=delta_e),
        "W_simple_exp": closed_form_w("exponential", t, gamma=gamma),
    }
    markers = {
        "t_c_ratio": cross.t_ratio,
        "t_c_half": cross.t_half,
        "t_c_intersection": cross.t_intersection,
    }
    return {"gamma": gamma, "delta_e": delta_e, "tail_prefactor": C, "curves": curves,
            "markers": markers, "note": T_C_NOTE, "crossover_note": cross.note}


def write_figure1(out, gamma: float = 0.5, delta_e: float = 1.2, t_max: float = 3.0,
                  points: int = 301) -> list:
    """Write figure1.csv, figure1_markers.csv and figure1.json into `out`."""
    d = figure1_data(gamma, delta_e, t_max, points)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    mk = d["markers"]
    head = [
        f"gamma = {gamma!r}, Delta_E = {delta_e!r}",
        f"t_c_ratio = {mk['t_c_ratio']:.6f}  (gamma / Delta_E^2)",
        f"t_c_half = {mk['t_c_half']:.6f}  (gamma / (2 Delta_E^2))",
        "note: " + d["note"],
        f"W_tail prefactor C = {d['tail_prefactor']:.12g}",
    ]
    write_csv(out / "figure1.csv", d["curves"], head)
    names = [k for k, v in mk.items() if v is not None]
    tv = [mk[k] for k in names]
    write_csv(out / "figure1_markers.csv", {
        "marker": names,
        "t": tv,
        "W_gauss": [math.exp(-(delta_e * x) ** 2) for x in tv],
    }, head[:1] + ["note: " + d["note"]])
    summary = {k: v for k, v in d.items() if k != "curves"}
    write_json(out / "figure1.json", summary)
    files = ["figure1.csv", "figure1_markers.csv", "figure1.json"]
    write_manifest(out, files)
    return [out / f for f in files]
