"""Graph-constrained inverse eigenvalue solver.

Given a graph on n vertices and n distinct target eigenvalues, find a
symmetric matrix whose nonzero pattern is exactly the graph and whose
spectrum matches the targets, staying close to a supplied initial matrix.

The free coordinates are the n diagonal entries followed by the edge
entries in lexicographic order.  Newton iterates on the sorted-eigenvalue
residual; the Jacobian row for eigenvalue k against coordinate (i, i) is
q_k[i]^2 and against edge (i, j) is 2 q_k[i] q_k[j], with q_k the unit
eigenvector.  The linear system has n equations and n + |E| unknowns, so
each step takes the minimum-norm least-squares solution, which is what
keeps the displacement from the initial matrix small.  Steps are damped by
halving until the residual norm decreases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph
from .symmetric import SymmetricMatrix, eigh_dense, op_norm_dense

__all__ = [
    "IepgProblem",
    "IepgSolution",
    "SolverParams",
    "IepgError",
    "MaxIterationsError",
    "EigenvalueCollisionError",
    "EdgeFloorError",
    "free_coordinates",
    "spectral_jacobian",
    "solve_iepg",
]

_GAP_REL = 1e-9  # eigenvalue gap below _GAP_REL * (1 + op_norm) counts as a collision
_PERTURB_NORM = 1e-8
_MAX_COLLISION_RETRIES = 8
_MAX_HALVINGS = 30


class IepgError(RuntimeError):
    """Base for solver failures; callers use these as retry signals."""


class MaxIterationsError(IepgError):
    pass


class EigenvalueCollisionError(IepgError):
    pass


class EdgeFloorError(IepgError):
    pass


@dataclass(frozen=True)
class SolverParams:
    tol_spec: float = 1e-9
    tau_edge: float = 1e-3
    max_iter: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.tol_spec <= 0 or self.tau_edge <= 0 or self.max_iter < 1:
            raise ValueError("solver parameters must be positive")


@dataclass(frozen=True)
class IepgProblem:
    graph: Graph
    targets: tuple[float, ...]
    init: SymmetricMatrix
    tol_spec: float = 1e-9
    tau_edge: float = 1e-3
    max_iter: int = 200
    seed: int = 0

    def __post_init__(self):
        n = self.graph.n_vertices
        object.__setattr__(self, "targets", tuple(float(t) for t in self.targets))
        if len(self.targets) != n:
            raise ValueError(f"need {n} targets, got {len(self.targets)}")
        if len(set(self.targets)) != n:
            raise ValueError("targets must be pairwise distinct")
        if self.init.order != n:
            raise ValueError("initial matrix order does not match the graph")
        if not self.init.pattern() <= self.graph.edges:
            raise ValueError("initial matrix pattern is not a subset of the graph")
        if self.tol_spec <= 0 or self.tau_edge <= 0 or self.max_iter < 1:
            raise ValueError("tol_spec, tau_edge and max_iter must be positive")


@dataclass
class IepgSolution:
    matrix: SymmetricMatrix
    residual: float  # max_k |lambda_k - target_k| after ascending sort
    displacement: float  # op_norm(matrix - init)
    iterations: int
    residual_history: list[float] = field(default_factory=list)


def free_coordinates(graph: Graph) -> list[tuple[int, int]]:
    """Diagonal positions (i, i) for i = 1..n, then edges in lexicographic order."""
    coords = [(i, i) for i in range(1, graph.n_vertices + 1)]
    coords.extend(graph.sorted_edges())
    return coords


def _dense_from_x(x: np.ndarray, graph: Graph) -> np.ndarray:
    n = graph.n_vertices
    a = np.zeros((n, n))
    a[np.diag_indices(n)] = x[:n]
    for idx, (i, j) in enumerate(graph.sorted_edges()):
        a[i - 1, j - 1] = x[n + idx]
        a[j - 1, i - 1] = x[n + idx]
    return a


def _matrix_from_x(x: np.ndarray, graph: Graph) -> SymmetricMatrix:
    n = graph.n_vertices
    off = {
        edge: float(x[n + idx]) for idx, edge in enumerate(graph.sorted_edges())
    }
    return SymmetricMatrix(order=n, diag=x[:n].copy(), offdiag=off)


def _x_from_matrix(a: SymmetricMatrix, graph: Graph) -> np.ndarray:
    n = graph.n_vertices
    x = np.zeros(n + len(graph.edges))
    x[:n] = a.diag
    for idx, edge in enumerate(graph.sorted_edges()):
        x[n + idx] = a.offdiag.get(edge, 0.0)
    return x


def _min_gap(values: np.ndarray) -> float:
    if values.size < 2:
        return math.inf
    return float(np.min(np.diff(values)))


def _jacobian_from_vectors(vectors: np.ndarray, graph: Graph) -> np.ndarray:
    n = graph.n_vertices
    edges = graph.sorted_edges()
    jac = np.empty((n, n + len(edges)))
    jac[:, :n] = (vectors**2).T
    for idx, (i, j) in enumerate(edges):
        jac[:, n + idx] = 2.0 * vectors[i - 1, :] * vectors[j - 1, :]
    return jac


def spectral_jacobian(a: SymmetricMatrix, graph: Graph) -> np.ndarray:
    """Derivatives of the sorted eigenvalues against the free coordinates.

    Row k, column e holds the first-order sensitivity of eigenvalue k to
    coordinate e.  Requires a simple spectrum.
    """
    if a.order != graph.n_vertices:
        raise ValueError("matrix order does not match the graph")
    eig = eigh_dense(a.to_dense())
    scale = 1.0 + float(np.max(np.abs(eig.values)))
    if _min_gap(eig.values) <= _GAP_REL * scale:
        raise EigenvalueCollisionError(
            f"eigenvalue collision: minimum gap {_min_gap(eig.values):.3e} "
            f"below {_GAP_REL * scale:.3e}"
        )
    return _jacobian_from_vectors(eig.vectors, graph)


def _pattern_perturbation(rng: np.random.Generator, graph: Graph) -> np.ndarray:
    """Random coordinate vector whose matrix has operator norm _PERTURB_NORM."""
    g = rng.standard_normal(graph.n_vertices + len(graph.edges))
    dense = _dense_from_x(g, graph)
    norm = op_norm_dense(dense)
    if norm == 0.0:
        g[0] = 1.0
        norm = 1.0
    return g * (_PERTURB_NORM / norm)


def solve_iepg(problem: IepgProblem) -> IepgSolution:
    """Newton iteration on the sorted-spectrum residual.

    Raises MaxIterationsError, EigenvalueCollisionError or EdgeFloorError;
    all are retry signals for the caller, which typically reseeds and calls
    again.
    """
    graph = problem.graph
    n = graph.n_vertices
    targets = np.array(sorted(problem.targets))
    rng = np.random.default_rng(problem.seed)
    x = _x_from_matrix(problem.init, graph)
    init_dense = problem.init.to_dense()

    history: list[float] = []
    collisions = 0
    for iteration in range(1, problem.max_iter + 1):
        dense = _dense_from_x(x, graph)
        eig = eigh_dense(dense)
        scale = 1.0 + float(np.max(np.abs(eig.values)))
        if _min_gap(eig.values) <= _GAP_REL * scale:
            collisions += 1
            if collisions > _MAX_COLLISION_RETRIES:
                raise EigenvalueCollisionError(
                    "eigenvalue collision persisted after "
                    f"{_MAX_COLLISION_RETRIES} pattern perturbations"
                )
            x = x + _pattern_perturbation(rng, graph)
            continue
        collisions = 0

        f = eig.values - targets
        res_inf = float(np.max(np.abs(f)))
        res_2 = float(np.linalg.norm(f))
        history.append(res_2)

        if res_inf <= problem.tol_spec:
            matrix = _matrix_from_x(x, graph)
            if graph.edges:
                min_edge = min(abs(matrix.offdiag[e]) for e in graph.sorted_edges())
                if min_edge < problem.tau_edge:
                    raise EdgeFloorError(
                        f"edge floor violated: smallest edge entry {min_edge:.3e} "
                        f"below tau_edge {problem.tau_edge:.3e}"
                    )
            return IepgSolution(
                matrix=matrix,
                residual=res_inf,
                displacement=op_norm_dense(dense - init_dense),
                iterations=iteration - 1,
                residual_history=history,
            )

        jac = _jacobian_from_vectors(eig.vectors, graph)
        step, *_ = np.linalg.lstsq(jac, -f, rcond=None)

        alpha = 1.0
        improved = False
        for _halving in range(_MAX_HALVINGS):
            trial = x + alpha * step
            trial_vals = eigh_dense(_dense_from_x(trial, graph)).values
            if float(np.linalg.norm(trial_vals - targets)) < res_2:
                improved = True
                break
            alpha *= 0.5
        if not improved:
            raise MaxIterationsError(
                f"max_iter exceeded: line search stalled at iteration {iteration} "
                f"with residual {res_inf:.3e}"
            )
        x = x + alpha * step

    raise MaxIterationsError(
        f"max_iter exceeded: {problem.max_iter} iterations, "
        f"residual {history[-1] if history else math.nan:.3e}"
    )
