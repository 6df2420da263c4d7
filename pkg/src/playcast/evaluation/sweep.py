"""Experiment grids: train cells in isolation, evaluate, emit reports.

Cells cover the study's axes: training-time sparsity, constant motion
order, long horizons, full-trajectory conditioning and evaluation-time
sparsity. Every cell trains its own seeds so a diverging baseline cannot
poison the rest of the grid; failures are recorded and the sweep moves on.
"""

from __future__ import annotations

import csv
import json
import traceback
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..models.spec import ModelSpec
from ..training.config import DataBundle, TrainConfig
from ..training.loop import train
from .harness import EvalReport, eval_model
from .plotting import write_curve_svg


@dataclass
class SweepCell:
    name: str
    spec: ModelSpec
    eval_strides: tuple[int, ...] = (1,)
    epochs: int | None = None
    learning_rate: float | None = None


@dataclass
class SweepResult:
    reports: dict[tuple[str, int], EvalReport]  # (cell name, eval stride) -> report
    failures: dict[str, str]


def seconds_to_steps(seconds: float, frame_rate_hz: float) -> int:
    steps = round(seconds * frame_rate_hz)
    if steps < 1:
        raise ValueError(f"sparsity {seconds}s is below one step at {frame_rate_hz} Hz")
    return int(steps)


TRAIN_SPARSITIES_S = (0.1, 0.4, 1.0, 2.0, 4.0)
LONG_HORIZON_SPARSITIES_S = (0.1, 2.0, 6.0, 24.0)
EVAL_STRIDES_4S = (1, 2, 4, 10, 20, 40)
CONDITIONED_SPARSITIES_S = (0.1, 1.0, 4.0)


def build_experiment_cells(
    experiment: str,
    frame_rate_hz: float = 10.0,
    horizon: int = 40,
    input_len: int = 10,
    kinds: tuple[str, ...] = ("granma",),
    embedding_width: int = 128,
    heads: int = 4,
    decoder_hidden: int | None = None,
) -> list[SweepCell]:
    """Cells for one of the named experiment grids."""

    def spec(kind, stride, order=2, conditioned=False, hor=horizon):
        return ModelSpec(kind=kind, horizon=hor, input_len=input_len,
                         output_stride=stride, order=order, conditioned=conditioned,
                         embedding_width=embedding_width, heads=heads,
                         decoder_hidden=decoder_hidden)

    cells: list[SweepCell] = []
    if experiment == "training_sparsity":
        for kind in kinds:
            for s in TRAIN_SPARSITIES_S:
                stride = seconds_to_steps(s, frame_rate_hz)
                cells.append(SweepCell(name=f"{kind}_train{s}s", spec=spec(kind, stride)))
    elif experiment == "motion_order":
        stride = seconds_to_steps(2.0, frame_rate_hz)
        for kind in kinds:
            for order in (1, 2, 3, 4):
                cells.append(SweepCell(name=f"{kind}_order{order}",
                                       spec=spec(kind, stride, order=order)))
    elif experiment == "long_horizon":
        for kind in kinds:
            for s in LONG_HORIZON_SPARSITIES_S:
                stride = seconds_to_steps(s, frame_rate_hz)
                cells.append(SweepCell(name=f"{kind}_long{s}s",
                                       spec=spec(kind, stride, hor=horizon)))
    elif experiment == "conditioning":
        for kind in kinds:
            cells.append(SweepCell(name=f"{kind}_standard", spec=spec(kind, 1)))
            for s in CONDITIONED_SPARSITIES_S:
                stride = seconds_to_steps(s, frame_rate_hz)
                cells.append(SweepCell(name=f"{kind}_cond{s}s",
                                       spec=spec(kind, stride, conditioned=True)))
    elif experiment == "eval_sparsity":
        strides = tuple(s for s in EVAL_STRIDES_4S if s <= horizon)
        for kind in kinds:
            cells.append(SweepCell(name=f"{kind}_dense", spec=spec(kind, 1),
                                   eval_strides=strides))
    else:
        raise ValueError(f"unknown experiment {experiment!r}")
    return cells


def _stride_seconds(spec: ModelSpec, frame_rate_hz: float) -> float:
    return spec.output_stride / frame_rate_hz


def run_sweep(
    cells: list[SweepCell],
    data: DataBundle,
    out_dir: str | Path,
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4, 5, 6),
    epochs: int = 200,
    batch_size: int = 64,
    learning_rate: float = 0.0005,
    frame_rate_hz: float = 10.0,
    log=None,
) -> SweepResult:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "curves").mkdir(exist_ok=True)
    eval_split = data.test if data.test is not None else data.val

    reports: dict[tuple[str, int], EvalReport] = {}
    failures: dict[str, str] = {}
    rows: list[list] = []
    for cell in cells:
        try:
            config = TrainConfig(
                model=cell.spec,
                epochs=cell.epochs or epochs,
                batch_size=batch_size,
                learning_rate=cell.learning_rate or learning_rate,
                seeds=tuple(seeds),
            )
            result = train(config, data, run_dir=out / "runs" / cell.name, log=log)
            models = result.models
            if not models:
                raise RuntimeError(
                    f"all seeds aborted: {[r.aborted for r in result.seeds.values()]}")
            curves = {}
            for es in cell.eval_strides:
                report = eval_model(models, eval_split, eval_stride=es,
                                    provenance={"cell": cell.name,
                                                "spec": cell.spec.to_dict()})
                reports[(cell.name, es)] = report
                t_s = np.arange(1, report.cumulative_cm.size + 1) / frame_rate_hz
                curves[f"eval {es / frame_rate_hz:.1f}s"] = (t_s, report.cumulative_cm)
                with open(out / "curves" / f"{cell.name}_es{es}.csv", "w", newline="") as f:
                    writer = csv.writer(f)
                    writer.writerow(["t_s", "cumulative_l2_cm"])
                    for tv, cv in zip(t_s, report.cumulative_cm):
                        writer.writerow([repr(float(tv)), repr(float(cv))])
                for seed, val in report.per_seed_overall.items():
                    rows.append([cell.spec.kind,
                                 _stride_seconds(cell.spec, frame_rate_hz),
                                 es / frame_rate_hz, cell.spec.order,
                                 int(cell.spec.conditioned), seed, repr(float(val))])
            write_curve_svg(out / f"{cell.name}.svg", curves,
                            title=cell.name, xlabel="t (s)",
                            ylabel="cumulative L2 (cm)")
        except Exception as exc:  # cell isolation: record and continue
            failures[cell.name] = f"{exc}\n{traceback.format_exc()}"

    with open(out / "results.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["model", "train_stride_s", "eval_stride_s", "order",
                         "conditioned", "seed", "mean_l2_cm"])
        writer.writerows(rows)
    with open(out / "summary.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["cell", "eval_stride_s", "mean_l2_cm", "std_cm", "n_seeds"])
        for (name, es), report in reports.items():
            writer.writerow([name, es / frame_rate_hz, repr(report.overall_cm),
                             repr(report.std_cm), len(report.per_seed_overall)])
    if failures:
        (out / "failures.json").write_text(json.dumps(failures, indent=2))
    return SweepResult(reports=reports, failures=failures)
