"""Deterministic seed-averaged experiment sweeps with CSV output.

Each experiment evaluates a grid of scenarios, averaging every statistic
over `repetitions` independently seeded runs. Seeds are pure hashes of
(base_seed, scenario coordinates, repetition index), so re-running a sweep
reproduces its CSV byte for byte, grid points can be computed in any order
by a worker pool, and extending a grid never perturbs existing rows.

The repetition hash deliberately omits n_layers and the control rank: rows
that differ only in those reuse the same drawn couplings (one physical
device, probed at different depths / with different antennas), which makes
the documented monotonicity trends hold per repetition instead of merely on
average.
"""

import csv
import hashlib
import math
import multiprocessing
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from .eavesdropper import (
    EavesdropQuery,
    analytic_pguess,
    helstrom_pguess,
    key_rate,
    mutual_information,
    nested_control_pguess,
    restricted_pguess,
    ControlSpec,
)
from .errors import DegeneracyError
from .model import (
    COMPUTATIONAL,
    HADAMARD,
    MODE_ANALYTIC,
    MODE_HAAR,
    DecoherenceFactorParams,
    ScenarioSpec,
    decoherence_factor,
    run_exchange_pair,
)

EXPERIMENTS = (
    "decoherence_sweep",
    "pguess_vs_epsilon",
    "partial_control_table",
    "layers_table",
    "conjecture_check",
)

DEFAULT_BASE_SEED = 101
DEFAULT_REPETITIONS = 200

CSV_HEADER = (
    "experiment", "epsilon", "alpha", "n_layers", "qubits_per_layer",
    "controlled_qubits", "statistic", "mean", "std", "repetitions", "seed",
    "skip_reason",
)

# Table of control percentages: 100 / 2**j, j = 0..6. A cell is feasible
# when the implied rank 2**k has k >= 1.
CONTROL_PERCENT_STEPS = tuple(range(7))


def derive_seed(*parts):
    """Stable 64-bit seed from arbitrary hashable coordinates."""
    token = "|".join(f"{type(p).__name__}:{p!r}" for p in parts)
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def scenario_seed(base_seed, basis, mode, epsilon, alpha, qubits_per_layer, rep):
    """Per-repetition seed; independent of n_layers and of the control rank."""
    return derive_seed(base_seed, "scenario", basis, mode, float(epsilon),
                       float(alpha), int(qubits_per_layer), int(rep))


def control_seed(seed_of_scenario):
    """Sub-stream for the eavesdropper's antenna subspace."""
    return derive_seed(seed_of_scenario, "control")


@dataclass(frozen=True)
class SweepConfig:
    """Grid, averaging and output settings for one experiment run."""

    experiment: str
    eps_grid: tuple = ()
    ne_grid: tuple = ()
    nl_grid: tuple = ()
    alpha_grid: tuple = ()
    repetitions: int = DEFAULT_REPETITIONS
    base_seed: int = DEFAULT_BASE_SEED
    output_path: str | None = None
    jobs: int = 1
    eve_layer: int | None = None
    control_mode: str = "rank"
    basis: str = COMPUTATIONAL

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.control_mode not in ("rank", "subset"):
            raise ValueError("control_mode must be 'rank' or 'subset'")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in self.eps_grid))
        object.__setattr__(self, "ne_grid", tuple(int(n) for n in self.ne_grid))
        object.__setattr__(self, "nl_grid", tuple(int(n) for n in self.nl_grid))
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))


_DEFAULT_GRIDS = {
    "decoherence_sweep": dict(
        eps_grid=(0.0, 0.25, 0.5, 0.75, 1.0),
        ne_grid=(1, 2, 3, 4, 5, 6, 7),
        nl_grid=(1,),
        alpha_grid=(0.0,),
    ),
    "pguess_vs_epsilon": dict(
        eps_grid=tuple(round(0.1 * i, 1) for i in range(11)),
        ne_grid=(3, 4, 5, 6, 7),
        nl_grid=(1,),
        alpha_grid=(0.0,),
    ),
    "partial_control_table": dict(
        eps_grid=(0.0,),
        ne_grid=(3, 4, 5, 6, 7),
        nl_grid=(1,),
        alpha_grid=(0.0,),
    ),
    "layers_table": dict(
        eps_grid=(0.5, 0.7, 0.9),
        ne_grid=(2,),
        nl_grid=(1, 2, 3),
        alpha_grid=(0.0,),
    ),
    "conjecture_check": dict(
        eps_grid=tuple(round(0.1 * i, 1) for i in range(11)),
        ne_grid=(1,),
        nl_grid=(1, 2, 3, 4, 5),
        alpha_grid=(0.0, math.pi / 6, math.pi / 4),
    ),
}


def resolve_config(config):
    """Fill empty grids with the experiment's documented defaults."""
    defaults = _DEFAULT_GRIDS[config.experiment]
    updates = {}
    for name, value in defaults.items():
        if not getattr(config, name):
            updates[name] = value
    if config.experiment == "layers_table" and config.eve_layer is None:
        # The published multi-layer table reads the first layer: it is hit
        # by the first interlayer projector pair and untouched afterwards.
        updates["eve_layer"] = 1
    return replace(config, **updates) if updates else config


@dataclass(frozen=True)
class ResultRow:
    """One CSV row: a seed-averaged statistic at one grid point."""

    experiment: str
    epsilon: float | None
    alpha: float | None
    n_layers: int | None
    qubits_per_layer: int | None
    controlled_qubits: int | None
    statistic: str
    mean: float | None
    std: float | None
    repetitions: int | None
    seed: int
    skip_reason: str = ""

    def to_csv(self):
        def fmt(x):
            return "" if x is None else (repr(x) if isinstance(x, float) else str(x))
        return [fmt(getattr(self, name)) for name in CSV_HEADER]

    def sort_key(self):
        def key(x):
            return -math.inf if x is None else x
        return (self.experiment, key(self.epsilon), key(self.alpha),
                key(self.n_layers), key(self.qubits_per_layer),
                key(self.controlled_qubits), self.statistic)


def _mean_std(values):
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, std


def _row_seed(config, *coords):
    return derive_seed(config.base_seed, config.experiment, *coords)


def _pguess_values(config, epsilon, alpha, n_layers, ne, eve_layer):
    """Full-control guessing probabilities across repetitions."""
    values = []
    for rep in range(config.repetitions):
        seed = scenario_seed(config.base_seed, config.basis, MODE_HAAR,
                             epsilon, alpha, ne, rep)
        spec = ScenarioSpec(
            basis=config.basis, key_bit=0, n_layers=n_layers,
            qubits_per_layer=ne, epsilon=epsilon, alpha=alpha,
            mode=MODE_HAAR, seed=seed, eve_layer=eve_layer)
        out0, out1 = run_exchange_pair(spec)
        values.append(helstrom_pguess(
            EavesdropQuery(out0.rho_eve_layer, out1.rho_eve_layer)))
    return values


def _layers_job(config, point):
    epsilon, n_layers = point
    alpha = config.alpha_grid[0]
    ne = config.ne_grid[0]
    values = _pguess_values(config, epsilon, alpha, n_layers, ne, config.eve_layer)
    mean, std = _mean_std(values)
    return [ResultRow(config.experiment, epsilon, alpha, n_layers, ne, ne,
                      "p_guess", mean, std, config.repetitions,
                      _row_seed(config, epsilon, n_layers))]


def _pguess_vs_epsilon_job(config, point):
    epsilon, ne = point
    alpha = config.alpha_grid[0]
    n_layers = config.nl_grid[0]
    values = _pguess_values(config, epsilon, alpha, n_layers, ne, config.eve_layer)
    mean, std = _mean_std(values)
    return [ResultRow(config.experiment, epsilon, alpha, n_layers, ne, ne,
                      "p_guess", mean, std, config.repetitions,
                      _row_seed(config, epsilon, ne))]


def _partial_control_job(config, point):
    epsilon, ne = point
    alpha = config.alpha_grid[0]
    n_layers = config.nl_grid[0]
    ks = [ne - j for j in CONTROL_PERCENT_STEPS if ne - j >= 1]

    samples = {k: [] for k in ks}
    for rep in range(config.repetitions):
        seed = scenario_seed(config.base_seed, config.basis, MODE_HAAR,
                             epsilon, alpha, ne, rep)
        spec = ScenarioSpec(
            basis=config.basis, key_bit=0, n_layers=n_layers,
            qubits_per_layer=ne, epsilon=epsilon, alpha=alpha,
            mode=MODE_HAAR, seed=seed, eve_layer=config.eve_layer)
        out0, out1 = run_exchange_pair(spec)
        rho0, rho1 = out0.rho_eve_layer, out1.rho_eve_layer
        if config.control_mode == "rank":
            rng = np.random.default_rng(control_seed(seed))
            per_k = nested_control_pguess(rho0, rho1, ks, rng)
        else:
            per_k = {
                k: restricted_pguess(EavesdropQuery(
                    rho0, rho1, control=ControlSpec.qubit_subset(range(k))))
                for k in ks
            }
        for k, value in per_k.items():
            samples[k].append(value)

    rows = []
    for j in CONTROL_PERCENT_STEPS:
        k = ne - j
        if k >= 1:
            mean, std = _mean_std(samples[k])
            rows.append(ResultRow(
                config.experiment, epsilon, alpha, n_layers, ne, k,
                "p_guess", mean, std, config.repetitions,
                _row_seed(config, epsilon, ne, k)))
        else:
            rows.append(ResultRow(
                config.experiment, epsilon, alpha, n_layers, ne, k,
                "p_guess", None, None, None,
                _row_seed(config, epsilon, ne, k),
                skip_reason="k_out_of_range"))
    return rows


def _decoherence_job(config, point):
    epsilon, ne = point
    n_layers = config.nl_grid[0]
    values = []
    for rep in range(config.repetitions):
        for basis in (COMPUTATIONAL, HADAMARD):
            seed = scenario_seed(config.base_seed, basis, MODE_HAAR,
                                 epsilon, 0.0, ne, rep)
            spec = ScenarioSpec(
                basis=basis, key_bit=0, n_layers=n_layers,
                qubits_per_layer=ne, epsilon=epsilon, alpha=0.0,
                mode=MODE_HAAR, seed=seed)
            params = DecoherenceFactorParams(pointer_basis=basis)
            values.append(decoherence_factor(spec, params))
    mean, std = _mean_std(values)
    return [ResultRow(config.experiment, epsilon, None, n_layers, ne, None,
                      "gamma", mean, std, config.repetitions,
                      _row_seed(config, epsilon, ne))]


def _conjecture_job(config, point):
    epsilon, alpha, n_layers = point
    seed = scenario_seed(config.base_seed, config.basis, MODE_ANALYTIC,
                         epsilon, alpha, 1, 0)
    row_seed = _row_seed(config, epsilon, alpha, n_layers)

    def row(statistic, value, skip=""):
        return ResultRow(config.experiment, epsilon, alpha, n_layers, 1, 1,
                         statistic, value, 0.0 if value is not None else None,
                         1 if value is not None else None, row_seed, skip)

    try:
        predicted = analytic_pguess(n_layers, epsilon, alpha)
    except DegeneracyError:
        return [row(stat, None, skip="degenerate_coupling")
                for stat in ("analytic_p_guess", "p_guess", "deviation",
                             "key_rate", "mutual_information")]

    spec = ScenarioSpec(
        basis=config.basis, key_bit=0, n_layers=n_layers, qubits_per_layer=1,
        epsilon=epsilon, alpha=alpha, mode=MODE_ANALYTIC, seed=seed)
    out0, out1 = run_exchange_pair(spec)
    simulated = helstrom_pguess(EavesdropQuery(out0.rho_eve_layer, out1.rho_eve_layer))
    return [
        row("analytic_p_guess", predicted),
        row("p_guess", simulated),
        row("deviation", abs(simulated - predicted)),
        row("key_rate", key_rate(predicted)),
        row("mutual_information", mutual_information(predicted)),
    ]


_JOB_BUILDERS = {
    "layers_table": (
        _layers_job,
        lambda c: [(e, nl) for e in c.eps_grid for nl in c.nl_grid]),
    "pguess_vs_epsilon": (
        _pguess_vs_epsilon_job,
        lambda c: [(e, ne) for e in c.eps_grid for ne in c.ne_grid]),
    "partial_control_table": (
        _partial_control_job,
        lambda c: [(e, ne) for e in c.eps_grid for ne in c.ne_grid]),
    "decoherence_sweep": (
        _decoherence_job,
        lambda c: [(e, ne) for e in c.eps_grid for ne in c.ne_grid]),
    "conjecture_check": (
        _conjecture_job,
        lambda c: [(e, a, nl) for e in c.eps_grid for a in c.alpha_grid
                   for nl in c.nl_grid]),
}


def run_experiment(config):
    """Evaluate a sweep and return its rows, stably sorted."""
    config = resolve_config(config)
    worker, points_of = _JOB_BUILDERS[config.experiment]
    points = points_of(config)
    bound = partial(worker, config)
    if config.jobs > 1 and len(points) > 1:
        with multiprocessing.Pool(config.jobs) as pool:
            chunks = pool.map(bound, points)
    else:
        chunks = [bound(p) for p in points]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=ResultRow.sort_key)
    return rows


def write_csv(rows, path):
    """Write rows with the fixed schema: UTF-8, LF endings, '.' decimals."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.to_csv())


def run_and_write(config):
    """Run a sweep and write its CSV; returns (rows, path)."""
    config = resolve_config(config)
    rows = run_experiment(config)
    path = config.output_path or f"{config.experiment}.csv"
    write_csv(rows, path)
    return rows, path
