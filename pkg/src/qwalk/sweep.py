"""Experiment sweeps over graph-family size grids, with scaling fits.

A sweep config names a family, a size grid, one of the three algorithms and
its parameters. Each grid point is independent (workers capped by the
QWALK_WORKERS environment variable), failures are recorded per point in an
error column instead of aborting, and reruns with the same config and seeds
are byte-identical: the CSV is fully determined by the config except for its
leading timestamp comment line, which consumers exclude from hashes. The
wall-clock column lives in the JSON mirror only, so it cannot perturb the
CSV bytes.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cg_prime as cg
from . import interpolated as ip
from .chains import make_lazy
from .errors import BadParams, InsufficientData, NonPositiveValue, ValidationError
from .graphs import FamilySpec, generate
from .hitting import extended_hitting_time, hitting_time, monte_carlo_hitting_time
from .spectral import discriminant

__all__ = [
    "SweepConfig",
    "SweepRow",
    "run_sweep",
    "fit_scaling",
    "write_csv",
    "write_json",
    "read_csv_rows",
    "COLUMNS",
]

ALGORITHMS = ("hitting", "cg_prime", "interpolated")

COLUMNS = {
    "hitting": [
        "family", "size", "n", "marked", "p_M", "gap", "ht", "ht_plus",
        "mc_mean", "mc_stderr", "mc_samples", "seed", "error",
    ],
    "cg_prime": [
        "family", "size", "n", "marked", "epsilon_overlap", "mu",
        "coupling_norm_formula", "coupling_norm_numeric", "gap",
        "condition_ratio", "condition_ok", "t1", "t2", "nu_final",
        "nu_predicted", "success_probability", "error",
    ],
    "interpolated": [
        "family", "size", "n", "marked", "p_M", "s_star", "ht_plus", "T",
        "alpha_n_sq", "success_probability", "success_stderr",
        "dephasing_error", "mode", "samples", "seed", "error",
    ],
}


@dataclass(frozen=True)
class SweepConfig:
    family: str
    sizes: tuple
    algorithm: str
    family_params: dict = field(default_factory=dict)
    marked: tuple = (0,)
    lazy: bool = True
    params: dict = field(default_factory=dict)
    output: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        fam = data.get("family")
        if isinstance(fam, dict):
            family = fam.get("family")
            family_params = dict(fam.get("params", {}))
        else:
            family = fam
            family_params = dict(data.get("family_params", {}))
        algorithm = data.get("algorithm")
        if algorithm not in ALGORITHMS:
            raise ValidationError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
        sizes = tuple(data.get("sizes", ()))
        if not sizes:
            raise ValidationError("size grid must be nonempty")
        return cls(
            family=family,
            sizes=sizes,
            algorithm=algorithm,
            family_params=family_params,
            marked=tuple(data.get("marked", (0,))),
            lazy=bool(data.get("lazy", True)),
            params=dict(data.get("params", {})),
            output=data.get("output"),
        )

    def to_dict(self) -> dict:
        return {
            "family": {"family": self.family, "params": self.family_params},
            "sizes": list(self.sizes),
            "algorithm": self.algorithm,
            "marked": list(self.marked),
            "lazy": self.lazy,
            "params": self.params,
            "output": self.output,
        }


@dataclass
class SweepRow:
    values: dict
    seconds: float = 0.0
    error: str | None = None

    def get(self, key, default=None):
        return self.values.get(key, default)


def _size_params(family: str, size, template: dict) -> dict:
    """Map a grid entry onto the family's size knob."""
    params = dict(template)
    if family in ("complete", "cycle", "random_reversible"):
        params["n"] = int(size)
    elif family == "torus":
        params.setdefault("d", 2)
        params["side"] = int(size)
    elif family == "hypercube":
        params["d"] = int(size)
    elif family in ("rook", "weighted_rook"):
        params["n1"] = int(size)
        params.setdefault("n2", 2)
        if family == "weighted_rook":
            p = params.get("p", "auto")
            if p == "auto":
                p = 1.0 / np.sqrt(params["n1"] * params["n2"])
            params["p"] = float(p)
    else:
        raise BadParams(f"unknown family {family!r}")
    return params


def _run_point(config: SweepConfig, size) -> SweepRow:
    params = _size_params(config.family, size, config.family_params)
    chain = generate(FamilySpec(config.family, params), marked=config.marked)
    if config.lazy:
        chain = make_lazy(chain)
    marked_repr = ";".join(str(x) for x in sorted(config.marked))
    base = {"family": config.family, "size": size, "n": chain.n, "marked": marked_repr}
    opts = config.params

    if config.algorithm == "hitting":
        base["p_M"] = chain.p_marked
        base["gap"] = discriminant(chain).gap
        base["ht"] = hitting_time(chain)
        base["ht_plus"] = extended_hitting_time(chain)
        samples = int(opts.get("mc_samples", 0) or 0)
        seed = int(opts.get("seed", 0))
        base["seed"] = seed
        if samples:
            mc = monte_carlo_hitting_time(chain, samples, seed)
            base.update(mc_mean=mc.mean, mc_stderr=mc.stderr, mc_samples=samples)
        else:
            base.update(mc_mean=None, mc_stderr=None, mc_samples=0)
    elif config.algorithm == "cg_prime":
        if len(config.marked) != 1:
            raise ValidationError("cg_prime sweeps need exactly one marked node")
        result, diag = cg.run_cg_prime(chain, config.marked[0], float(opts.get("c", 0.1)))
        base.update(
            epsilon_overlap=diag.epsilon_overlap,
            mu=diag.mu,
            coupling_norm_formula=diag.coupling_norm_formula,
            coupling_norm_numeric=diag.coupling_norm_numeric,
            gap=diag.gap,
            condition_ratio=diag.condition_ratio,
            condition_ok=result.condition_ok,
            t1=result.t1,
            t2=result.t2,
            nu_final=result.nu_final,
            nu_predicted=result.nu_predicted,
            success_probability=result.success_probability,
        )
    else:  # interpolated
        pr_config = ip.PhaseRandomConfig(
            epsilon_precision=float(opts.get("epsilon_precision", 0.1)),
            T=opts.get("T"),
            mode=opts.get("mode", "exact"),
            samples=int(opts.get("samples", 10_000)),
            seed=int(opts.get("seed", 0)),
        )
        res = ip.run_phase_random(chain, pr_config)
        base.update(
            p_M=res.p_M,
            s_star=res.s_star,
            ht_plus=res.ht_plus,
            T=res.T,
            alpha_n_sq=res.alpha_n_sq,
            success_probability=res.success_probability,
            success_stderr=res.success_stderr,
            dephasing_error=res.dephasing_error,
            mode=res.mode,
            samples=res.samples,
            seed=res.seed,
        )
    return SweepRow(values=base)


def _worker_count() -> int:
    raw = os.environ.get("QWALK_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_sweep(config: SweepConfig, output: str | None = None) -> list[SweepRow]:
    """Execute every grid point; failures become rows with an error message.

    Writes <output>.csv and <output>.json when an output stem is configured.
    """
    def point(size):
        start = time.perf_counter()
        try:
            row = _run_point(config, size)
        except Exception as exc:  # failures are data
            row = SweepRow(
                values={"family": config.family, "size": size},
                error=f"{type(exc).__name__}: {exc}",
            )
        row.seconds = time.perf_counter() - start
        return row

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(point, config.sizes))
    else:
        rows = [point(size) for size in config.sizes]

    stem = output or config.output
    if stem:
        write_csv(rows, config, f"{stem}.csv")
        write_json(rows, config, f"{stem}.json")
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def render_csv(rows: list[SweepRow], config: SweepConfig, timestamp: str | None = None) -> str:
    columns = COLUMNS[config.algorithm]
    buf = io.StringIO()
    stamp = timestamp or time.strftime("%Y-%m-%dT%H:%M:%S")
    buf.write(f"# generated {stamp}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = dict(row.values)
        values["error"] = row.error or ""
        writer.writerow([_format_cell(values.get(col)) for col in columns])
    return buf.getvalue()


def write_csv(rows, config, path) -> None:
    with open(path, "w") as fh:
        fh.write(render_csv(rows, config))


def write_json(rows, config, path) -> None:
    payload = {
        "config": config.to_dict(),
        "rows": [
            {**row.values, "seconds": row.seconds, "error": row.error} for row in rows
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_csv_rows(path) -> list[dict]:
    """Parse a sweep CSV back into dicts (numbers converted where possible)."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    rows = []
    for record in reader:
        parsed = {}
        for key, raw in record.items():
            if raw is None or raw == "":
                parsed[key] = None
                continue
            try:
                value = float(raw)
                parsed[key] = int(value) if value.is_integer() and "." not in raw else value
            except ValueError:
                parsed[key] = raw
        rows.append(parsed)
    return rows


def fit_scaling(rows, x_field: str, y_field: str) -> tuple[float, float]:
    """Least-squares slope of log y against log x, with its R^2.

    Rows may be SweepRow objects or plain dicts; at least three points with
    strictly positive x and y are required.
    """
    xs, ys = [], []
    for row in rows:
        get = row.get if hasattr(row, "get") else row.__getitem__
        x, y = get(x_field), get(y_field)
        if x is None or y is None:
            continue
        xs.append(float(x))
        ys.append(float(y))
    if len(xs) < 3:
        raise InsufficientData(f"need >= 3 rows with {x_field} and {y_field}, got {len(xs)}")
    xs, ys = np.array(xs), np.array(ys)
    if xs.min() <= 0 or ys.min() <= 0:
        raise NonPositiveValue("log-log fit needs strictly positive values")
    lx, ly = np.log(xs), np.log(ys)
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    fitted = design @ coef
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(coef[0]), r_squared
