"""Named preset experiments, one per acceptance scenario.

Each preset computes its measurements and returns them in a uniform result
record; the command-line layer serializes results, and the acceptance test
suite asserts the tolerances.  Replicate counts default to the full study
sizes but can be overridden for quick looks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exact import (
    exact_hitting_table,
    mc_submultiplicativity,
    verify_coupling_bound,
    verify_monotone,
)
from .fpp import variance_bound_report
from .graphs import (
    WeightedGraph,
    from_edge_tuples,
    make_complete,
    make_coupled_complete,
    make_line_exp,
)
from .limits import coupled_reach_time_law, giant_fraction
from .montecarlo import (
    ExperimentSpec,
    SummaryStats,
    concentration_scan,
    estimate_curve,
    hitting_time_samples,
    run_ensemble,
)

__all__ = ["PresetResult", "PRESETS", "run_preset", "oracle_pack"]


@dataclass
class PresetResult:
    name: str
    config: dict
    kind: str  # "summary" (param,count,mean,...) or "reports" (check records)
    rows: list[dict]
    values: dict[str, np.ndarray] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def _summary_row(param, stats: SummaryStats) -> dict:
    row = {"param": param}
    row.update(stats.as_dict())
    return row


def oracle_pack() -> list[WeightedGraph]:
    """Small graphs (|E| <= 12) used by the exact-oracle presets."""
    return [
        make_complete(3, 1.0),
        make_complete(4, 1.0),
        make_line_exp(4),
        make_line_exp(5),
        make_coupled_complete(2, "bridge"),
        make_coupled_complete(2, "transitive"),
    ]


def _make_path(n: int, weight: float) -> WeightedGraph:
    return from_edge_tuples(
        n,
        [(i, i + 1, weight) for i in range(n - 1)],
        label=f"path(n={n}, w={weight:g})",
    )


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def preset_exact_closed_forms(seed=0, replicates=None, workers=1) -> PresetResult:
    """Exact hitting tables against hand closed forms."""
    cases = [
        # (graph, threshold, expected value, description)
        (make_complete(2, 2.0), 2, 0.5, "single edge: one Exponential(2) wait"),
        (make_complete(3, 1.0), 2, 1.0 / 3.0, "triangle: min of three unit waits"),
        (make_complete(3, 1.0), 3, 5.0 / 6.0, "triangle: 1/3 then 1/2 to finish"),
    ]
    rows = []
    for g, threshold, expected, why in cases:
        got = exact_hitting_table(g, threshold).expected_time
        rel = abs(got - expected) / expected
        rows.append(
            {
                "check": "exact_closed_form",
                "graph": g.label,
                "params": {"threshold": threshold, "note": why},
                "statistic": rel,
                "pass": rel <= 1e-12,
                "details": {"exact": got, "expected": expected},
            }
        )
    return PresetResult(
        name="exact-closed-forms",
        config={"seed": seed},
        kind="reports",
        rows=rows,
    )


def preset_oracle_verify(seed=0, replicates=None, workers=1) -> PresetResult:
    """Monotonicity and coupling bounds, exhaustively, on the small-graph pack."""
    rows = []
    for g in oracle_pack():
        n = g.vertex_count
        for threshold in range(2, n + 1):
            rows.append(verify_monotone(exact_hitting_table(g, threshold)).as_dict())
        for k1 in range(2, n // 2 + 1):
            rows.append(verify_coupling_bound(g, n / k1).as_dict())
    return PresetResult(
        name="oracle-verify",
        config={"seed": seed},
        kind="reports",
        rows=rows,
    )


def preset_oracle_mc(seed=0, replicates=None, workers=1) -> PresetResult:
    """Monte Carlo means of the full-connection time vs the exact tables."""
    R = replicates or 100_000
    rows = []
    values = {}
    for i, g in enumerate(oracle_pack()):
        n = g.vertex_count
        exact = exact_hitting_table(g, n).expected_time
        samples = hitting_time_samples(
            g, [n], R, seed, path=("oracle_mc", i), workers=workers
        )[:, 0]
        stats = SummaryStats.from_values(samples)
        z = abs(stats.mean - exact) / stats.se
        rows.append(
            {
                "check": "oracle_mc_agreement",
                "graph": g.label,
                "params": {"threshold": n, "replicates": R},
                "statistic": z,
                "pass": z <= 4.0,
                "details": {"mc_mean": stats.mean, "se": stats.se, "exact": exact},
            }
        )
        values[g.label] = samples
    return PresetResult(
        name="oracle-mc",
        config={"seed": seed, "replicates": R},
        kind="reports",
        rows=rows,
        values=values,
    )


_ER_THETA_GRID = (0.5, 0.75, 0.9, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0)


def preset_er_theta(seed=0, replicates=None, workers=1) -> PresetResult:
    """Largest-component fraction curve of the mean-field graph vs its limit."""
    R = replicates or 100
    m = 2000
    g = make_complete(m, 1.0 / m)
    grid = np.array(_ER_THETA_GRID)
    curve = estimate_curve(g, grid, R, seed, workers=workers, return_values=True)
    rows = [_summary_row(float(t), s) for t, s in zip(grid, curve.largest)]
    values = {f"largest@{t:g}": curve.largest_values[:, j] for j, t in enumerate(grid)}
    return PresetResult(
        name="er-theta",
        config={"seed": seed, "replicates": R, "m": m, "grid": list(map(float, grid))},
        kind="summary",
        rows=rows,
        values=values,
        extra={"limit_fraction": {f"{t:g}": float(giant_fraction(t)) for t in grid}},
    )


def preset_er_concentration(seed=0, replicates=None, workers=1) -> PresetResult:
    """Variance of the half-graph reach time along the mean-field family."""
    R = replicates or 200
    sizes = [500, 1000, 2000, 4000]
    rows_data = concentration_scan(
        lambda m: make_complete(m, 1.0 / m),
        sizes,
        "time_to_fraction",
        0.5,
        R,
        seed,
        workers=workers,
    )
    rows = [_summary_row(r.size, r.stats) for r in rows_data]
    values = {f"size={r.size}": r.values for r in rows_data}
    return PresetResult(
        name="er-concentration",
        config={"seed": seed, "replicates": R, "sizes": sizes, "s": 0.5},
        kind="summary",
        rows=rows,
        values=values,
    )


def preset_coupled_concentration(seed=0, replicates=None, workers=1) -> PresetResult:
    """Reach-time variance along the bridged coupled family vs the limit law."""
    R = replicates or 400
    sizes = [500, 1000, 2000]
    law = coupled_reach_time_law(0.5, "bridge")
    rows_data = concentration_scan(
        lambda m: make_coupled_complete(m, "bridge"),
        sizes,
        "time_to_fraction",
        0.5,
        R,
        seed,
        workers=workers,
    )
    rows = [_summary_row(r.size, r.stats) for r in rows_data]
    values = {f"size={r.size}": r.values for r in rows_data}
    return PresetResult(
        name="coupled-concentration",
        config={"seed": seed, "replicates": R, "sizes": sizes, "s": 0.5},
        kind="summary",
        rows=rows,
        values=values,
        extra={"limit_mean": law.mean, "limit_variance": law.variance},
    )


def preset_jump_diagnostics(seed=0, replicates=None, workers=1) -> PresetResult:
    """Maximal jump and second-giant peak: mean-field vs bridged coupled."""
    R = replicates or 200
    m = 2000
    er = make_complete(m, 1.0 / m)
    coupled = make_coupled_complete(m, "bridge")
    rows = []
    values = {}
    for label, g, statistic in (
        ("er_max_jump", er, "max_jump_fraction"),
        ("coupled_max_jump", coupled, "max_jump_fraction"),
        ("coupled_sup_second", coupled, "sup_second_fraction"),
    ):
        spec = ExperimentSpec(graph=g, statistic=statistic, replicates=R, seed=seed)
        stats, vals = run_ensemble(spec, workers=workers, return_values=True)
        rows.append(_summary_row(label, stats))
        values[label] = vals
    return PresetResult(
        name="jump-diagnostics",
        config={"seed": seed, "replicates": R, "m": m},
        kind="summary",
        rows=rows,
        values=values,
    )


def preset_submultiplicativity(seed=0, replicates=None, workers=1) -> PresetResult:
    """Tail submultiplicativity z-tests on two contrasting graphs."""
    R = replicates or 20_000
    rows = [
        mc_submultiplicativity(
            make_complete(20, 1.0 / 20.0), 10, 0.75, 0.75, R, seed, workers=workers
        ).as_dict(),
        mc_submultiplicativity(
            make_line_exp(8), 4, 4.0, 4.0, R, seed + 1, workers=workers
        ).as_dict(),
    ]
    return PresetResult(
        name="submultiplicativity",
        config={"seed": seed, "replicates": R},
        kind="reports",
        rows=rows,
    )


def preset_line_blowup(seed=0, replicates=None, workers=1) -> PresetResult:
    """Reach-time blow-up along the halving-rate path family."""
    R = replicates or 500
    sizes = [10, 12, 14]
    rows_data = concentration_scan(
        make_line_exp, sizes, "time_to_fraction", 0.5, R, seed, workers=workers
    )
    rows = [_summary_row(r.size, r.stats) for r in rows_data]
    values = {f"size={r.size}": r.values for r in rows_data}
    return PresetResult(
        name="line-blowup",
        config={"seed": seed, "replicates": R, "sizes": sizes, "s": 0.5},
        kind="summary",
        rows=rows,
        values=values,
    )


def preset_fpp_variance(seed=0, replicates=None, workers=1) -> PresetResult:
    """First-passage variance bounds: tight small cases plus the torus."""
    from .graphs import make_torus

    small_R = replicates or 100_000
    torus_R = replicates or 5000
    rows = []
    rows += [
        r.as_dict()
        for r in variance_bound_report(
            make_complete(2, 1.0),
            source=0,
            target_vertices=[1],
            replicates=small_R,
            seed=seed,
        )
    ]
    rows += [
        r.as_dict()
        for r in variance_bound_report(
            _make_path(3, 1.0),
            source=0,
            target_vertices=[2],
            replicates=small_R,
            seed=seed + 1,
        )
    ]
    L = 20
    torus = make_torus(L, 1.0)
    far_corner = (L // 2) * L + (L // 2)
    rows += [
        r.as_dict()
        for r in variance_bound_report(
            torus,
            source=0,
            target_vertices=[far_corner],
            fractions=[0.5],
            replicates=torus_R,
            seed=seed + 2,
        )
    ]
    return PresetResult(
        name="fpp-variance",
        config={"seed": seed, "replicates": small_R, "torus_replicates": torus_R},
        kind="reports",
        rows=rows,
    )


@dataclass(frozen=True)
class PresetSpec:
    func: Callable[..., PresetResult]
    description: str


PRESETS: dict[str, PresetSpec] = {
    "exact-closed-forms": PresetSpec(
        preset_exact_closed_forms, "exact hitting tables vs hand closed forms"
    ),
    "oracle-verify": PresetSpec(
        preset_oracle_verify, "exhaustive monotonicity + coupling bounds on the pack"
    ),
    "oracle-mc": PresetSpec(
        preset_oracle_mc, "Monte Carlo means vs exact tables on the pack"
    ),
    "er-theta": PresetSpec(
        preset_er_theta, "mean-field giant-fraction curve vs the fixed-point limit"
    ),
    "er-concentration": PresetSpec(
        preset_er_concentration, "vanishing reach-time variance on the mean-field family"
    ),
    "coupled-concentration": PresetSpec(
        preset_coupled_concentration,
        "non-vanishing reach-time variance on the bridged coupled family",
    ),
    "jump-diagnostics": PresetSpec(
        preset_jump_diagnostics, "max-jump and second-giant peaks, mean-field vs coupled"
    ),
    "submultiplicativity": PresetSpec(
        preset_submultiplicativity, "tail submultiplicativity z-tests"
    ),
    "line-blowup": PresetSpec(
        preset_line_blowup, "reach-time blow-up on the halving-rate path family"
    ),
    "fpp-variance": PresetSpec(
        preset_fpp_variance, "first-passage variance bounds incl. tight cases"
    ),
}


def run_preset(
    name: str, seed: int = 0, replicates: int | None = None, workers: int = 1
) -> PresetResult:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown preset {name!r}; known presets: {known}")
    return PRESETS[name].func(seed=seed, replicates=replicates, workers=workers)
