"""Inductive construction of the matrix tower.

Step n+1 extends the order-n matrix with one vertex carrying the next
enumerated eigenvalue, seeds the new edges, and re-solves the inverse
eigenvalue problem under a hard closeness gate: the solved matrix must stay
within budget = epsilon / 2^n of the direct sum in operator norm.  The
geometric budget makes the truncation columns a Cauchy sequence, which is
what the convergence checks in the verifier quantify.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphs import Graph, GraphFamily, new_edges_at, parse_graph, prefix, render_graph
from .iepg import IepgError, IepgProblem, SolverParams, solve_iepg
from .spectra import (
    DenseSequence,
    SpectrumSpec,
    dense_enumerate,
    parse_spectrum_spec,
    render_spectrum_spec,
)
from .symmetric import (
    SymmetricMatrix,
    eigh_dense,
    op_norm_dense,
    parse_matrix_csv,
    render_matrix_csv,
)

__all__ = [
    "TowerStep",
    "Tower",
    "TruncatedMatrix",
    "BudgetUnattainableError",
    "StepFailedError",
    "TowerFormatError",
    "build_tower",
    "extend_step",
    "assemble_truncation",
    "save_tower",
    "load_tower",
]

_SEED_RETRIES = 8  # halvings of the seed magnitude before giving up
MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = "spectower-tower/1"


class BudgetUnattainableError(RuntimeError):
    """The closeness budget cannot be met with the configured edge floor."""


class TowerFormatError(ValueError):
    """Raised for corrupt or incomplete serialized towers."""


@dataclass
class StepFailedError(RuntimeError):
    """Extension failed at step_n; the partial tower is preserved."""

    step_n: int
    partial: "Tower"
    cause: Exception

    def __str__(self) -> str:
        return f"step {self.step_n} failed after retries: {self.cause}"


@dataclass
class TowerStep:
    n: int
    matrix: SymmetricMatrix
    closeness: float  # op-norm distance from previous-step direct sum (0 for n=1)
    residual: float  # spectrum residual reported by the solve
    min_edge: float  # smallest edge magnitude (inf when there are no edges)
    eta_used: float  # seed magnitude that succeeded (0 when no solve was needed)
    iterations: int = 0


@dataclass
class Tower:
    family: GraphFamily
    spec: SpectrumSpec
    epsilon: float
    lambdas: DenseSequence
    steps: list[TowerStep]
    params: SolverParams

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    def budget(self, n: int) -> float:
        """Closeness bound for step n >= 2: epsilon / 2^(n-1)."""
        return self.epsilon / 2.0 ** (n - 1)

    def lambda_prefix(self, n: int) -> np.ndarray:
        return np.asarray(self.lambdas.terms[:n], dtype=float)


@dataclass
class TruncatedMatrix:
    """Order-K matrix: the step-n block, then a diagonal tail of enumerated values."""

    base: SymmetricMatrix
    tail: tuple[float, ...]
    order: int

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.order, self.order))
        nb = self.base.order
        a[:nb, :nb] = self.base.to_dense()
        for k, lam in enumerate(self.tail):
            a[nb + k, nb + k] = lam
        return a


def _seed_candidate(
    candidate: SymmetricMatrix, edges: list[tuple[int, int]], eta: float
) -> SymmetricMatrix:
    off = dict(candidate.offdiag)
    for idx, edge in enumerate(edges):
        off[edge] = eta if idx % 2 == 0 else -eta
    return SymmetricMatrix(order=candidate.order, diag=candidate.diag.copy(), offdiag=off)


def extend_step(
    a_n: SymmetricMatrix,
    family: GraphFamily,
    lambda_next: float,
    budget: float,
    params: SolverParams,
    targets_prev=None,
) -> TowerStep:
    """Extend an order-n matrix to order n+1 within the closeness budget.

    targets_prev optionally supplies the exact eigenvalue prefix; without it
    the previous spectrum is recomputed from a_n, which lets accumulated
    solve error leak into later targets.
    """
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    n_next = a_n.order + 1
    graph = prefix(family, n_next)
    candidate = a_n.direct_sum(lambda_next)
    if targets_prev is None:
        targets_prev = eigh_dense(a_n.to_dense()).values
    targets = tuple(float(t) for t in targets_prev) + (float(lambda_next),)

    new_edges = new_edges_at(family, n_next)
    m = len(new_edges)
    if m == 0:
        eig = eigh_dense(candidate.to_dense())
        residual = float(np.max(np.abs(eig.values - np.sort(np.asarray(targets)))))
        min_edge = (
            min(abs(v) for v in candidate.offdiag.values())
            if candidate.offdiag
            else math.inf
        )
        return TowerStep(
            n=n_next,
            matrix=candidate,
            closeness=0.0,
            residual=residual,
            min_edge=min_edge,
            eta_used=0.0,
            iterations=0,
        )

    tau = params.tau_edge
    eta_floor = 2.0 * tau
    seed_norm_floor = eta_floor * math.sqrt(m)
    if budget < seed_norm_floor:
        raise BudgetUnattainableError(
            f"budget unattainable at vertex {n_next}: budget {budget:.6e} is below "
            f"2*tau_edge*sqrt(new_edges) = {seed_norm_floor:.6e} ({m} new edge(s) "
            f"must carry entries of magnitude >= {tau:.1e}, so the extension is at "
            f"least {tau * math.sqrt(m):.6e} away in operator norm)"
        )

    candidate_dense = candidate.to_dense()
    eta = max(budget / (4.0 * math.sqrt(m + 1)), eta_floor)
    last_error: Exception | None = None
    for attempt in range(1 + _SEED_RETRIES):
        init = _seed_candidate(candidate, new_edges, eta)
        problem = IepgProblem(
            graph=graph,
            targets=targets,
            init=init,
            tol_spec=params.tol_spec,
            tau_edge=tau,
            max_iter=params.max_iter,
            seed=params.seed + 7919 * n_next + attempt,
        )
        try:
            sol = solve_iepg(problem)
        except IepgError as err:
            last_error = err
        else:
            closeness = op_norm_dense(sol.matrix.to_dense() - candidate_dense)
            if closeness < budget:
                min_edge = min(abs(v) for v in sol.matrix.offdiag.values())
                return TowerStep(
                    n=n_next,
                    matrix=sol.matrix,
                    closeness=closeness,
                    residual=sol.residual,
                    min_edge=min_edge,
                    eta_used=eta,
                    iterations=sol.iterations,
                )
            last_error = BudgetUnattainableError(
                f"budget unattainable at vertex {n_next}: closeness {closeness:.6e} "
                f">= budget {budget:.6e} at seed magnitude {eta:.6e}"
            )
        if eta <= eta_floor:
            break  # halving further is clamped, retries would repeat exactly
        eta = max(eta / 2.0, eta_floor)
    raise last_error


def build_tower(
    family: GraphFamily,
    spec: SpectrumSpec,
    n_steps: int,
    epsilon: float,
    params: SolverParams | None = None,
) -> Tower:
    """Run the induction for n_steps steps; step 1 is the 1x1 matrix [lambda_1]."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be positive, got {n_steps}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    params = params or SolverParams()
    lambdas = dense_enumerate(spec, n_steps)
    first = SymmetricMatrix(order=1, diag=np.array([lambdas.terms[0]]), offdiag={})
    steps = [
        TowerStep(
            n=1, matrix=first, closeness=0.0, residual=0.0, min_edge=math.inf,
            eta_used=0.0, iterations=0,
        )
    ]
    tower = Tower(
        family=family, spec=spec, epsilon=epsilon, lambdas=lambdas,
        steps=steps, params=params,
    )
    for n in range(1, n_steps):
        budget = epsilon / 2.0**n
        try:
            step = extend_step(
                steps[-1].matrix,
                family,
                lambdas.terms[n],
                budget,
                params,
                targets_prev=lambdas.terms[:n],
            )
        except (IepgError, BudgetUnattainableError) as err:
            raise StepFailedError(step_n=n + 1, partial=tower, cause=err)
        steps.append(step)
    return tower


def assemble_truncation(tower: Tower, n: int, order: int) -> TruncatedMatrix:
    """Order-`order` truncation: step-n block plus the diagonal tail of
    enumerated values n+1 .. order."""
    if not (1 <= n <= tower.n_steps):
        raise ValueError(f"step index {n} out of range 1..{tower.n_steps}")
    if order < n:
        raise ValueError(f"truncation order {order} must be >= step index {n}")
    if order <= len(tower.lambdas.terms):
        tail = tower.lambdas.terms[n:order]
    else:
        tail = dense_enumerate(tower.spec, order).terms[n:order]
    return TruncatedMatrix(base=tower.steps[n - 1].matrix, tail=tuple(tail), order=order)


def _family_descriptor(family: GraphFamily) -> dict:
    desc: dict = {"kind": family.kind}
    if family.kind == "random":
        desc["seed"] = family.seed
        desc["edge_probability"] = family.edge_probability
    if family.kind == "explicit":
        desc["graph"] = render_graph(family.base)
        desc["tail"] = family.tail
    return desc


def _family_from_descriptor(desc: dict) -> GraphFamily:
    kind = desc["kind"]
    if kind == "random":
        return GraphFamily(
            kind="random", seed=int(desc["seed"]),
            edge_probability=float(desc["edge_probability"]),
        )
    if kind == "explicit":
        return GraphFamily(kind="explicit", base=parse_graph(desc["graph"]), tail=desc["tail"])
    return GraphFamily(kind=kind)


def _step_filename(n: int) -> str:
    return f"step_{n:03d}.csv"


def save_tower(tower: Tower, directory) -> Path:
    """Serialize into a directory: manifest.json plus one CSV per step."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format": MANIFEST_FORMAT,
        "family": _family_descriptor(tower.family),
        "spectrum": render_spectrum_spec(tower.spec),
        "epsilon": tower.epsilon,
        "n_steps": tower.n_steps,
        "params": {
            "tol_spec": tower.params.tol_spec,
            "tau_edge": tower.params.tau_edge,
            "max_iter": tower.params.max_iter,
            "seed": tower.params.seed,
        },
        "lambdas": list(tower.lambdas.terms),
        "steps": [
            {
                "n": s.n,
                "matrix_file": _step_filename(s.n),
                "closeness": s.closeness,
                "residual": s.residual,
                "min_edge": s.min_edge if math.isfinite(s.min_edge) else None,
                "eta_used": s.eta_used,
                "iterations": s.iterations,
            }
            for s in tower.steps
        ],
    }
    (directory / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for s in tower.steps:
        (directory / _step_filename(s.n)).write_text(
            render_matrix_csv(s.matrix), encoding="utf-8"
        )
    return directory


def load_tower(directory) -> Tower:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        raise TowerFormatError(f"missing {MANIFEST_NAME} in {directory}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise TowerFormatError(f"corrupt manifest: {err}")
    if manifest.get("format") != MANIFEST_FORMAT:
        raise TowerFormatError(f"unsupported tower format {manifest.get('format')!r}")

    family = _family_from_descriptor(manifest["family"])
    spec = parse_spectrum_spec(manifest["spectrum"])
    lambdas = DenseSequence(spec=spec, terms=tuple(float(v) for v in manifest["lambdas"]))
    p = manifest["params"]
    params = SolverParams(
        tol_spec=float(p["tol_spec"]), tau_edge=float(p["tau_edge"]),
        max_iter=int(p["max_iter"]), seed=int(p["seed"]),
    )
    steps = []
    for rec in manifest["steps"]:
        path = directory / rec["matrix_file"]
        if not path.is_file():
            raise TowerFormatError(f"missing matrix file {rec['matrix_file']}")
        matrix = parse_matrix_csv(path.read_text(encoding="utf-8"))
        if matrix.order != rec["n"]:
            raise TowerFormatError(
                f"{rec['matrix_file']}: order {matrix.order} does not match step {rec['n']}"
            )
        steps.append(
            TowerStep(
                n=int(rec["n"]),
                matrix=matrix,
                closeness=float(rec["closeness"]),
                residual=float(rec["residual"]),
                min_edge=math.inf if rec["min_edge"] is None else float(rec["min_edge"]),
                eta_used=float(rec["eta_used"]),
                iterations=int(rec["iterations"]),
            )
        )
    if len(steps) != int(manifest["n_steps"]):
        raise TowerFormatError("step count does not match manifest n_steps")
    return Tower(
        family=family, spec=spec, epsilon=float(manifest["epsilon"]),
        lambdas=lambdas, steps=steps, params=params,
    )
