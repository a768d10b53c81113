"""End-to-end pipeline orchestration: sketch -> solve -> k-NN graph ->
spectral clustering, plus n-sweeps with CSV + figure reports."""

import csv
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict, replace

import numpy as np

from . import data as data_mod
from . import sketch as sketch_mod
from .evaluation import EvalReport, StageTimer, clustering_accuracy
from .graph import build_affinity_binary, build_affinity_heat
from .solvers import SolverConfig, solve
from .spectral import spectral_cluster

SWEEP_FIELDS = ["n", "seed", "status", "accuracy",
                "t_sketch", "t_solve", "t_graph", "t_spectral"]


class ConfigError(ValueError):
    """Invalid pipeline configuration (CLI exit code 2)."""


class DataError(ValueError):
    """Unreadable or malformed input data (CLI exit code 3)."""


class NumericalError(RuntimeError):
    """Solver or eigensolver failure (CLI exit code 4)."""


@dataclass
class PipelineConfig:
    # exactly one of input_path / synth
    input_path: str | None = None
    input_format: str = "csv"
    input_labels: bool = False
    synth: dict | None = None
    method: str = "lsr"
    n: int = 100
    d: int | None = None
    sketch_kind: str = "rademacher"
    dim_sketch_kind: str = "rademacher"
    lam: float = 1.0
    nu0: float | None = None
    nu_max: float = 1e6
    p: float = 1.1
    tol: float = 1e-6
    max_iter: int = 500
    knn: int = 5
    affinity: str = "binary"
    sigma: float | str = "auto"
    K: int = 2
    seed: int = 0
    normalize: bool = False
    output_dir: str = "out"

    def validate(self):
        if (self.input_path is None) == (self.synth is None):
            raise ConfigError("exactly one of input_path / synth is required")
        if self.method not in ("lsr", "ssc", "lrr"):
            raise ConfigError(f"unknown method {self.method!r}")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.d is not None and self.d < 1:
            raise ConfigError("d must be >= 1 when set")
        if self.affinity not in ("binary", "heat"):
            raise ConfigError(f"unknown affinity {self.affinity!r}")
        if self.knn < 1 or self.K < 1:
            raise ConfigError("knn and K must be >= 1")
        if self.lam <= 0:
            raise ConfigError("lambda must be positive")
        if self.synth is not None:
            D = self.synth.get("D")
            if D is not None and self.d is not None and self.d > D:
                raise ConfigError(f"d={self.d} exceeds data dimension D={D}")

    def solver_config(self):
        nu0 = self.nu0
        if nu0 is None:
            nu0 = 1.0 if self.method == "ssc" else 1e-2
        return SolverConfig(lam=self.lam, nu0=nu0, nu_max=self.nu_max,
                            p=self.p, tol=self.tol, max_iter=self.max_iter)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, s):
        return cls(**json.loads(s))

    def run_id(self):
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:12]


def _load_input(cfg):
    if cfg.synth is not None:
        s = dict(cfg.synth)
        try:
            model = data_mod.random_subspace_model(
                K=s["K"], D=s["D"], dims=s.get("d", s.get("dims")),
                noise_std=s.get("noise_std", 0.0),
                seed=s.get("model_seed", cfg.seed),
                affine=s.get("affine", False))
            counts = s.get("counts") or [s["per_cluster"]] * s["K"]
            return data_mod.generate_union_of_subspaces(
                model, counts, seed=cfg.seed)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad synth spec: {exc}") from exc
    try:
        return data_mod.load_matrix(cfg.input_path, cfg.input_format,
                                    labels=cfg.input_labels)
    except OSError as exc:
        raise DataError(f"cannot read {cfg.input_path}: {exc}") from exc
    except ValueError as exc:
        raise DataError(str(exc)) from exc


def run_pipeline(cfg, write=True):
    """Execute one clustering run; returns (EvalReport, ClusterAssignment).

    With write=True the assignment CSV and report JSON land under
    output_dir/run_<id>/ where <id> is a hash of the config."""
    cfg.validate()
    X = _load_input(cfg)
    if cfg.d is not None and cfg.d > X.D:
        raise ConfigError(f"d={cfg.d} exceeds data dimension D={X.D}")
    if cfg.knn >= X.N:
        raise ConfigError(f"knn={cfg.knn} must be below N={X.N}")
    if cfg.normalize:
        try:
            X = data_mod.normalize_columns(X)
        except ValueError as exc:
            raise DataError(str(exc)) from exc

    timer = StageTimer()
    try:
        with timer.stage("sketch"):
            work = X.values
            descriptors = {}
            if cfg.d is not None:
                Rcheck = sketch_mod.make_operator(
                    cfg.dim_sketch_kind, rows=X.D, cols=cfg.d,
                    seed=cfg.seed ^ 1)
                work = sketch_mod.apply_left(Rcheck, work)
                descriptors["dim_sketch"] = Rcheck.descriptor()
            R = sketch_mod.make_operator(cfg.sketch_kind, rows=X.N,
                                         cols=cfg.n, seed=cfg.seed)
            B = sketch_mod.apply_right(work, R)
            descriptors["sketch"] = R.descriptor()
        with timer.stage("solve"):
            coef = solve(cfg.method, work, B, cfg.solver_config())
        with timer.stage("graph"):
            if cfg.affinity == "binary":
                W = build_affinity_binary(coef.values, cfg.knn)
            else:
                W = build_affinity_heat(coef.values, cfg.knn, cfg.sigma)
        with timer.stage("spectral"):
            assign = spectral_cluster(W, cfg.K, seed=cfg.seed)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(str(exc)) from exc

    accuracy = None
    if X.labels is not None:
        accuracy = clustering_accuracy(assign, X.labels)
    report = EvalReport(
        accuracy=accuracy,
        wall_time_s=dict(timer.times),
        params={"config": asdict(cfg), "run_id": cfg.run_id(),
                "sketch_operators": descriptors,
                "solver": asdict(coef.diagnostics)})
    if write:
        run_dir = os.path.join(cfg.output_dir, f"run_{cfg.run_id()}")
        os.makedirs(run_dir, exist_ok=True)
        assign.save_csv(os.path.join(run_dir, "assignments.csv"))
        with open(os.path.join(run_dir, "report.json"), "w") as f:
            f.write(report.to_json())
    return report, assign


def _sweep_one(args):
    cfg, n, seed = args
    run_cfg = replace(cfg, n=n, seed=seed)
    row = {"n": n, "seed": seed, "status": "ok", "accuracy": "",
           "t_sketch": "", "t_solve": "", "t_graph": "", "t_spectral": ""}
    try:
        report, _ = run_pipeline(run_cfg, write=False)
    except Exception as exc:  # record the failure, keep sweeping
        row["status"] = f"error: {type(exc).__name__}"
        return row
    if report.accuracy is not None:
        row["accuracy"] = report.accuracy
    for stage in ("sketch", "solve", "graph", "spectral"):
        row[f"t_{stage}"] = report.wall_time_s.get(stage, 0.0)
    return row


def run_sweep(cfg, n_values, seeds, out_dir=None, workers=1, figures=True):
    """One pipeline run per (n, seed); returns rows sorted by (n, seed).

    Writes sweep.csv to out_dir and, on the report path, renders
    accuracy-vs-n and time-vs-n figures next to it."""
    if not n_values or not seeds:
        raise ConfigError("n_values and seeds must be nonempty")
    jobs = [(cfg, n, seed) for n in n_values for seed in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    rows.sort(key=lambda r: (r["n"], r["seed"]))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        csv_path = os.path.join(out_dir, "sweep.csv")
        with open(csv_path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=SWEEP_FIELDS)
            writer.writeheader()
            writer.writerows(rows)
        if figures:
            from .plots import render_sweep_figures
            render_sweep_figures(csv_path, out_dir)
    return rows
