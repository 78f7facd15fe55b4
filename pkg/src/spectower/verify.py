"""Independent verification of a built tower.

Every check is recomputed from the serialized matrices with the dense
eigensolver; nothing is trusted from builder-reported metrics.  Results are
collected into a machine-readable report, one record per check, rendered as
tab-separated text for diffing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import prefix
from .spectra import covering_radius_points, dense_enumerate, distance_to_set
from .symmetric import SymmetricMatrix, eigh_dense, hausdorff, op_norm_dense
from .tower import Tower, assemble_truncation

__all__ = [
    "Check",
    "Report",
    "WindowGap",
    "verify_tower",
    "window_spectrum_gap",
    "weyl_check",
    "render_report",
]

ROUNDING_SLACK = 1e-12  # accumulation allowance for the telescoping/column sums
WEYL_SLACK = 1e-10
DEFAULT_WINDOW = (-10.0, 10.0)


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    bound: float
    context: str = ""


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def n_failed(self) -> int:
        return sum(not c.passed for c in self.checks)

    def add(self, name, measured, bound, context="", cmp="<="):
        """Record a check; cmp is the relation measured-vs-bound: <=, < or >=."""
        measured = float(measured)
        bound = float(bound)
        if cmp == "<=":
            ok = measured <= bound
        elif cmp == "<":
            ok = measured < bound
        elif cmp == ">=":
            ok = measured >= bound
        else:
            raise ValueError(f"unknown comparison {cmp!r}")
        self.checks.append(Check(name, ok, measured, bound, context))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def render_report(report: Report) -> str:
    lines = ["status\tname\tmeasured\tbound\tcontext"]
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{status}\t{c.name}\t{c.measured!r}\t{c.bound!r}\t{c.context}")
    lines.append(
        f"# overall: {'PASS' if report.passed else 'FAIL'} "
        f"({len(report.checks) - report.n_failed}/{len(report.checks)} checks)"
    )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class WindowGap:
    gap_out: float  # worst distance from in-window truncation eigenvalues to the set
    gap_in: float  # worst distance from the windowed set to the truncation spectrum
    empty: bool


def window_spectrum_gap(
    tower: Tower,
    n: int,
    order: int,
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid_step: float | None = None,
) -> WindowGap:
    w_lo, w_hi = window
    if grid_step is None:
        grid_step = (w_hi - w_lo) / 1e4
    trunc = assemble_truncation(tower, n, order)
    values = eigh_dense(trunc.to_dense()).values
    inside = values[(values >= w_lo) & (values <= w_hi)]
    gap_out = float(np.max(distance_to_set(tower.spec, inside))) if inside.size else 0.0
    cover = covering_radius_points(tower.spec, values, window, grid_step)
    empty = cover.empty_window and inside.size == 0
    return WindowGap(gap_out=gap_out, gap_in=cover.value, empty=empty)


def weyl_check(a: SymmetricMatrix, e: SymmetricMatrix) -> Check:
    """Spectrum movement under a symmetric perturbation, against the norm bound."""
    if a.order != e.order:
        raise ValueError("matrices must have equal order")
    base = eigh_dense(a.to_dense()).values
    moved = eigh_dense(a.to_dense() + e.to_dense()).values
    bound = op_norm_dense(e.to_dense())
    d_h = hausdorff(moved, base)
    d_pair = float(np.max(np.abs(moved - base)))
    measured = max(d_h, d_pair)
    return Check(
        name="weyl_bound",
        passed=measured <= bound + WEYL_SLACK,
        measured=measured,
        bound=bound + WEYL_SLACK,
        context=f"hausdorff={d_h!r} sorted_pairing={d_pair!r} perturbation_norm={bound!r}",
    )


def _check_pattern(report: Report, tower: Tower, n: int, matrix: SymmetricMatrix):
    graph = prefix(tower.family, n)
    stored = matrix.pattern()
    spurious = sorted(stored - graph.edges)
    missing = sorted(graph.edges - stored)
    mismatches = len(spurious) + len(missing)
    if spurious:
        i, j = spurious[0]
        ctx = f"step n={n}: nonzero entry on non-edge (i={i}, j={j})"
    elif missing:
        i, j = missing[0]
        ctx = f"step n={n}: zero entry on edge (i={i}, j={j})"
    else:
        ctx = f"step n={n}"
    report.add(f"pattern[{n}]", measured=mismatches, bound=0, context=ctx)


def verify_tower(
    tower: Tower,
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid_step: float | None = None,
    k_extra: int = 10,
) -> Report:
    """Re-derive every per-step and cross-step inequality for the tower."""
    report = Report()
    n_steps = tower.n_steps
    eps = tower.epsilon
    tol = tower.params.tol_spec
    tau = tower.params.tau_edge

    dense_steps = {}
    for step in tower.steps:
        n = step.n
        matrix = step.matrix
        dense_steps[n] = matrix.to_dense()
        _check_pattern(report, tower, n, matrix)

        if matrix.offdiag:
            worst = min(matrix.offdiag, key=lambda e: abs(matrix.offdiag[e]))
            report.add(
                f"edge_floor[{n}]",
                measured=abs(matrix.offdiag[worst]),
                bound=tau,
                context=f"step n={n}: smallest edge magnitude at edge {worst}",
                cmp=">=",
            )

        values = eigh_dense(dense_steps[n]).values
        target = np.sort(tower.lambda_prefix(n))
        report.add(
            f"spectrum[{n}]",
            measured=float(np.max(np.abs(values - target))),
            bound=tol,
            context=f"step n={n}: eigenvalues vs first {n} enumerated values",
        )

        if n >= 2:
            prev_sum = tower.steps[n - 2].matrix.direct_sum(tower.lambdas.terms[n - 1])
            delta = op_norm_dense(dense_steps[n] - prev_sum.to_dense())
            report.add(
                f"closeness[{n}]",
                measured=delta,
                bound=tower.budget(n),
                context=f"step n={n}: distance from previous direct sum",
                cmp="<",
            )

    # Cross-step bounds on truncations at a common order.
    k_order = n_steps + k_extra
    trunc_dense = {
        n: assemble_truncation(tower, n, k_order).to_dense() for n in range(1, n_steps + 1)
    }

    worst_excess = -math.inf
    worst_ctx = ""
    worst_measured = worst_bound = 0.0
    for n in range(1, n_steps + 1):
        for m in range(n + 1, n_steps + 1):
            allowance = sum(eps / 2.0**k for k in range(n, m)) + ROUNDING_SLACK
            dist = op_norm_dense(trunc_dense[m] - trunc_dense[n])
            if dist - allowance > worst_excess:
                worst_excess = dist - allowance
                worst_measured, worst_bound = dist, allowance
                worst_ctx = f"truncations n={n}, m={m} at order {k_order}"
    if n_steps >= 2:
        report.add(
            "telescoping", measured=worst_measured, bound=worst_bound, context=worst_ctx
        )

    for n in range(1, n_steps):
        diff = trunc_dense[n] - trunc_dense[n + 1]
        col_norms = np.linalg.norm(diff, axis=0)
        i_worst = int(np.argmax(col_norms))
        report.add(
            f"column_bound[{n}]",
            measured=float(col_norms[i_worst]),
            bound=eps / 2.0**n + ROUNDING_SLACK,
            context=f"columns of truncations n={n} vs n={n + 1}, worst i={i_worst + 1}",
            cmp="<",
        )

    # Spectral containment of the final truncation, both directions.
    tail_sum = eps * 2.0 ** (1 - n_steps)  # sum of budgets from step n_steps on
    final_vals = eigh_dense(trunc_dense[n_steps]).values
    lam = tower.lambda_prefix(n_steps)
    inclusion = float(
        np.max(np.min(np.abs(lam[:, None] - final_vals[None, :]), axis=1))
    )
    report.add(
        "spectral_inclusion",
        measured=inclusion,
        bound=tol + tail_sum + WEYL_SLACK,
        context=f"first {n_steps} enumerated values vs eigenvalues at order {k_order}",
    )

    gaps = window_spectrum_gap(tower, n_steps, k_order, window, grid_step)
    report.add(
        "gap_out",
        measured=gaps.gap_out,
        bound=tol + tail_sum + WEYL_SLACK,
        context=f"window {window}, truncation order {k_order}",
    )
    w_lo, w_hi = window
    step_used = (w_hi - w_lo) / 1e4 if grid_step is None else grid_step
    seq_terms = tower.lambdas.terms
    if len(seq_terms) < k_order:
        seq_terms = dense_enumerate(tower.spec, k_order).terms
    cover = covering_radius_points(tower.spec, seq_terms[:k_order], window, step_used)
    report.add(
        "gap_in",
        measured=gaps.gap_in,
        bound=cover.value + tol + ROUNDING_SLACK,
        context=(
            f"window {window}: spectrum covering vs covering radius "
            f"{cover.value!r} of the first {k_order} enumerated values"
        ),
    )
    return report
