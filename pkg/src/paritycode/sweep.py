"""Batch experiments over random instances, penalty ratios and gadget variants."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .codes import ParityCode
from .errors import InvalidParameterError, ParityCodeError
from .layouts import build_square_lattice
from .instances import generate_instance, instance_seed
from .metrics import metric_chi, metric_delta_e, reciprocal_mean
from .program import VARIANT_NU, VARIANTS, compile_program
from .spectral import DEFAULT_DIM_CAP, DEFAULT_DRIVER_SIGN, AnnealSchedule

WORKERS_ENV = "PARITYCODE_WORKERS"
# chi below this counts as the physical curve touching the axis
NEAR_ZERO_CHI = 0.05


def default_r_grid(points: int = 25, low: float = 1.0, high: float = 1e3) -> tuple[float, ...]:
    return tuple(float(r) for r in np.geomspace(low, high, points))


@dataclass(frozen=True)
class ExperimentConfig:
    n_logical: int
    variants: tuple[str, ...] = ("even_qutrit", "odd_qubit")
    nu_policy: str | None = None  # None: the policy each variant is built for
    J: float = 1.0
    R_grid: tuple[float, ...] = field(default_factory=default_r_grid)
    instances: int = 1
    base_seed: int = 0
    schedule_points: int = 101
    metrics: tuple[str, ...] = ("delta_e", "chi")
    driver_sign: int = DEFAULT_DRIVER_SIGN
    drive_ancillas: bool = True
    refine: bool = False
    dim_cap: int = DEFAULT_DIM_CAP
    output: str | None = None

    def __post_init__(self) -> None:
        if self.n_logical < 2:
            raise InvalidParameterError("n_logical must be >= 2")
        if not self.J > 0:
            raise InvalidParameterError("J must be positive")
        if self.instances < 1:
            raise InvalidParameterError("instances must be >= 1")
        if not self.R_grid or any(not r > 0 for r in self.R_grid):
            raise InvalidParameterError("every R must be positive")
        for v in self.variants:
            if v not in VARIANTS:
                raise InvalidParameterError(f"unknown variant {v!r}")
        for m in self.metrics:
            if m not in ("delta_e", "chi"):
                raise InvalidParameterError(f"unknown metric {m!r}")
        object.__setattr__(self, "variants", tuple(self.variants))
        object.__setattr__(self, "R_grid", tuple(float(r) for r in self.R_grid))
        object.__setattr__(self, "metrics", tuple(self.metrics))

    @property
    def J_av(self) -> float:
        return self.J / 2

    def delta_for(self, R: float) -> float:
        return R * self.J / 2

    def policy_for(self, variant: str) -> str:
        return self.nu_policy or VARIANT_NU.get(variant, "all_even")

    @classmethod
    def from_dict(cls, doc: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise InvalidParameterError(f"unknown config keys {sorted(unknown)}")
        doc = dict(doc)
        for key in ("variants", "R_grid", "metrics"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return cls(**doc)


@dataclass
class SweepRecord:
    seed: int
    instance_id: int
    N: int
    variant: str
    R: float
    Delta: float
    e_logic: float | None = None
    e_phys: float | None = None
    delta_e: float | None = None
    min_gap_logic: float | None = None
    min_gap_phys: float | None = None
    chi: float | None = None
    flags: str = ""
    solver_ms: float = 0.0

    @property
    def sort_key(self) -> tuple:
        return (self.variant, self.R, self.instance_id)


CSV_COLUMNS = tuple(f.name for f in fields(SweepRecord))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _instance_task(args: tuple[ExperimentConfig, int]) -> list[SweepRecord]:
    """Every (variant, R) row for one instance; the logical anneal is shared."""
    cfg, instance_id = args
    seed = instance_seed(cfg.base_seed, instance_id)
    model = generate_instance(cfg.n_logical, cfg.J, seed)
    schedule = AnnealSchedule.uniform(cfg.schedule_points)
    codes: dict[str, ParityCode] = {}
    rows = []
    for variant in cfg.variants:
        policy = cfg.policy_for(variant)
        if policy not in codes:
            codes[policy] = build_square_lattice(cfg.n_logical, policy)
        for R in cfg.R_grid:
            rec = SweepRecord(seed, instance_id, cfg.n_logical, variant, R, cfg.delta_for(R))
            t0 = time.perf_counter()
            flags = []
            try:
                program = compile_program(model, codes[policy], variant, rec.Delta)
                if "delta_e" in cfg.metrics:
                    d = metric_delta_e(model, program, subspace=False, cap=cfg.dim_cap)
                    rec.e_logic, rec.e_phys, rec.delta_e = d.e_logic, d.e_phys, d.delta_e
                if "chi" in cfg.metrics:
                    c = metric_chi(
                        model, program, schedule, driver_sign=cfg.driver_sign,
                        drive_ancillas=cfg.drive_ancillas, refine=cfg.refine, cap=cfg.dim_cap,
                    )
                    rec.min_gap_logic, rec.min_gap_phys, rec.chi = c.min_gap_logic, c.min_gap_phys, c.chi
                    flags += c.flags
            except ParityCodeError as exc:
                flags.append(f"error:{type(exc).__name__}")
            rec.flags = ";".join(flags)
            rec.solver_ms = (time.perf_counter() - t0) * 1e3
            rows.append(rec)
    return rows


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidParameterError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


@dataclass
class SummaryRow:
    variant: str
    R: float
    Delta: float
    n_instances: int
    mean_delta_e: float | None
    median_delta_e: float | None
    chi_bar: float | None
    n_excluded: int
    n_near_zero: int
    n_errors: int


SUMMARY_COLUMNS = tuple(f.name for f in fields(SummaryRow))


@dataclass
class SweepResult:
    config: ExperimentConfig
    records: list[SweepRecord]
    summary: list[SummaryRow]

    def records_csv(self) -> str:
        return _to_csv(CSV_COLUMNS, [asdict(r) for r in self.records])

    def summary_csv(self) -> str:
        return _to_csv(SUMMARY_COLUMNS, [asdict(r) for r in self.summary])

    def write(self, path: str | Path, summary_path: str | Path | None = None) -> tuple[Path, Path]:
        path = Path(path)
        summary_path = Path(summary_path) if summary_path else path.with_name(path.stem + "_summary.csv")
        path.write_text(self.records_csv())
        summary_path.write_text(self.summary_csv())
        return path, summary_path


def _to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def summarise(records: list[SweepRecord]) -> list[SummaryRow]:
    groups: dict[tuple[str, float], list[SweepRecord]] = defaultdict(list)
    for r in records:
        groups[(r.variant, r.R)].append(r)
    out = []
    for (variant, R), rows in sorted(groups.items()):
        ok = [r for r in rows if not r.flags.startswith("error")]
        de = [r.delta_e for r in ok if r.delta_e is not None]
        chis = [r.chi for r in ok if r.chi is not None and not r.flags]
        measured = [r for r in ok if r.min_gap_logic is not None]
        out.append(SummaryRow(
            variant, R, rows[0].Delta, len(rows),
            float(np.mean(de)) if de else None,
            float(np.median(de)) if de else None,
            reciprocal_mean(chis) if chis else None,
            sum(1 for r in measured if r.flags),
            sum(1 for r in measured if r.chi is not None and r.chi < NEAR_ZERO_CHI),
            len(rows) - len(ok),
        ))
    return out


def run_sweep(config: ExperimentConfig, workers: int | None = None) -> SweepResult:
    """Run every (variant, R, instance) task and aggregate.

    Instance ``i`` uses seed ``base_seed XOR i``; rows are sorted by
    (variant, R, instance) before writing, so output does not depend on the
    worker count.
    """
    workers = workers or worker_count()
    tasks = [(config, i) for i in range(config.instances)]
    if workers == 1:
        chunks = [_instance_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_instance_task, tasks, chunksize=max(1, math.ceil(len(tasks) / (4 * workers)))))
    records = sorted((r for chunk in chunks for r in chunk), key=lambda r: r.sort_key)
    result = SweepResult(config, records, summarise(records))
    if config.output:
        result.write(config.output)
    return result
