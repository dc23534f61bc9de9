"""Plain-text artifact formats.

Every format is line-oriented text with a documented header; reals are
written with 17 significant digits so values round-trip bit-faithfully.

instance document (JSON)   {"m_levels", "n_states", "costs": [...]}
density CSV                cost,empirical_nu,ideal_nu,label
                           one row per cost ascending, plus one row per
                           partition threshold labeled c_1..c_M
trace CSV                  step,index,re,im,abs  for steps 0..M
result document (JSON)     {"winner_index", "success_probability",
                            "steps": [{"step", "support_size", "mass_on_good"}]}
robustness CSV             trial,offset_vector,success_probability with one
                           footer row: aggregate,<stat names>,<stat values>
factor document (JSON)     {"dim", "factors": [{"p", "q", "block"}], "diagonal"}
                           with complex entries as [re, im] pairs
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .decompose import Factorization, TwoLevelFactor
from .problem import (
    PartitionSchedule,
    ProblemInstance,
    empirical_cdos,
    ideal_cdos,
)
from .robustness import RobustnessSummary
from .search import SearchResult, StateVector


def format_real(x: float) -> str:
    """17-significant-digit decimal, enough to identify any binary64 exactly."""
    return format(float(x), ".17g")


def _write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def write_instance(instance: ProblemInstance, path) -> None:
    lines = [
        "{",
        f'  "m_levels": {instance.m_levels},',
        f'  "n_states": {instance.n_states},',
        '  "costs": [',
    ]
    body = ",\n".join(f"    {format_real(c)}" for c in instance.costs)
    lines.append(body)
    lines.append("  ]")
    lines.append("}")
    _write_text(path, "\n".join(lines) + "\n")


def read_instance(path) -> ProblemInstance:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not a valid instance document: {exc}") from exc
    try:
        m_levels = doc["m_levels"]
        n_states = doc["n_states"]
        costs = doc["costs"]
    except (TypeError, KeyError) as exc:
        raise ValueError(f"{path}: missing instance field {exc}") from exc
    instance = ProblemInstance(m_levels, np.asarray(costs, dtype=np.float64))
    if instance.n_states != n_states:
        raise ValueError(
            f"{path}: n_states={n_states} disagrees with m_levels={m_levels}"
        )
    return instance


def write_cdos_csv(instance: ProblemInstance, schedule: PartitionSchedule, path) -> None:
    """The realized and ideal cumulative densities, thresholds annotated."""
    density = empirical_cdos(instance)
    n = instance.n_states
    by_cost = {float(c): i for i, c in enumerate(schedule.thresholds)}
    lines = ["cost,empirical_nu,ideal_nu,label"]
    for rank, cost in enumerate(density.sorted_costs, start=1):
        ideal = ideal_cdos(cost, n)
        lines.append(f"{format_real(cost)},{rank},{format_real(ideal)},")
        hit = by_cost.get(float(cost))
        if hit is not None:
            nu = int(schedule.sizes[hit])
            lines.append(f"{format_real(cost)},{nu},{format_real(ideal)},c_{hit + 1}")
    _write_text(path, "\n".join(lines) + "\n")


def write_trace_csv(states: list[StateVector], path) -> None:
    """Per-step amplitudes, one row per (step, basis index)."""
    lines = ["step,index,re,im,abs"]
    for step, state in enumerate(states):
        for index, amp in enumerate(state):
            lines.append(
                f"{step},{index},{format_real(amp.real)},{format_real(amp.imag)},"
                f"{format_real(abs(amp))}"
            )
    _write_text(path, "\n".join(lines) + "\n")


def write_result_json(result: SearchResult, path) -> None:
    lines = [
        "{",
        f'  "winner_index": {result.winner_index},',
        f'  "success_probability": {format_real(result.success_probability)},',
        '  "steps": [',
    ]
    rows = []
    for r in result.reports:
        rows.append(
            f'    {{"step": {r.step_index}, "support_size": {r.support_size}, '
            f'"mass_on_good": {format_real(r.mass_on_good)}}}'
        )
    lines.append(",\n".join(rows))
    lines.append("  ]")
    lines.append("}")
    _write_text(path, "\n".join(lines) + "\n")


def write_robustness_csv(summary: RobustnessSummary, path) -> None:
    lines = ["trial,offset_vector,success_probability"]
    for trial, (offsets, success) in enumerate(zip(summary.offsets, summary.successes)):
        vec = ";".join(str(o) for o in offsets)
        lines.append(f"{trial},{vec},{format_real(success)}")
    stats = {
        "mean": format_real(summary.mean),
        "min": format_real(summary.min),
        "frac_ge_0.99": format_real(summary.frac_ge_99),
        "redraws": str(summary.redraws),
    }
    lines.append(
        "aggregate," + ";".join(stats.keys()) + "," + ";".join(stats.values())
    )
    _write_text(path, "\n".join(lines) + "\n")


def _pair(z: complex) -> str:
    return f"[{format_real(z.real)}, {format_real(z.imag)}]"


def write_factorization(factorization: Factorization, path) -> None:
    dim = factorization.diagonal.size
    lines = ["{", f'  "dim": {dim},', '  "factors": [']
    rows = []
    for f in factorization.factors:
        block = ", ".join(
            "[" + ", ".join(_pair(f.block[r, c]) for c in (0, 1)) + "]" for r in (0, 1)
        )
        rows.append(f'    {{"p": {f.p}, "q": {f.q}, "block": [{block}]}}')
    lines.append(",\n".join(rows))
    lines.append("  ],")
    diag = ", ".join(_pair(d) for d in factorization.diagonal)
    lines.append(f'  "diagonal": [{diag}]')
    lines.append("}")
    _write_text(path, "\n".join(lines) + "\n")


def read_factorization(path) -> Factorization:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not a valid factor document: {exc}") from exc

    def as_complex(pair):
        re, im = pair
        return complex(re, im)

    factors = tuple(
        TwoLevelFactor(
            p=entry["p"],
            q=entry["q"],
            block=np.array(
                [[as_complex(z) for z in row] for row in entry["block"]], dtype=complex
            ),
        )
        for entry in doc["factors"]
    )
    diagonal = np.array([as_complex(z) for z in doc["diagonal"]], dtype=complex)
    if diagonal.size != doc["dim"]:
        raise ValueError(f"{path}: diagonal length disagrees with dim")
    return Factorization(factors=factors, diagonal=diagonal)
