"""Desk-scale variational search for compatible gauge/constraint pairs.

A lattice torus carries a Lie-algebra-valued gauge field on directed edges
and a dual-vector field on nodes.  The main energy term is the squared
residual of the discrete covariant-constancy equation
lambda(head) - lambda(tail) + ad*_omega lambda(tail) on every edge; two
penalties are added, a compatibility pairing term and a sup-norm barrier.
The (1,1)-obstruction penalty slot alpha2 is accepted in configurations but
unused: the obstruction class it would weight has no computable definition
at this scale.

This module works in floating point; everything else in the package is
exact.  Tolerances are explicit configuration values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chevalley import LieAlgebraTable


class SolverDivergence(RuntimeError):
    """Energy increased and backtracking hit the minimum step size."""


@dataclass
class LatticeBundle:
    """Cubical torus lattice with a gauge field on directed edges."""

    d: int
    n: int
    alg: LieAlgebraTable
    nodes: list[tuple[int, ...]] = field(repr=False, default_factory=list)
    node_index: dict[tuple[int, ...], int] = field(repr=False, default_factory=dict)
    edges: list[tuple[int, int, int]] = field(repr=False, default_factory=list)
    omega: np.ndarray = field(repr=False, default=None)  # (n_edges, dim)

    def __post_init__(self):
        from itertools import product

        if not self.nodes:
            self.nodes = sorted(product(range(self.n), repeat=self.d))
            self.node_index = {p: i for i, p in enumerate(self.nodes)}
            edges = []
            for i, pos in enumerate(self.nodes):
                for axis in range(self.d):
                    head = list(pos)
                    head[axis] = (head[axis] + 1) % self.n
                    edges.append((i, self.node_index[tuple(head)], axis))
            self.edges = edges
        if self.omega is None:
            self.omega = np.zeros((len(self.edges), self.alg.dim))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def coadjoint_tensor(self) -> np.ndarray:
        """M[a][b, c] with (ad*_{x_a} mu)_b = sum_c M[a][b, c] mu_c."""
        dim = self.alg.dim
        t = np.zeros((dim, dim, dim))
        for a in range(dim):
            for b, entries in self.alg.bracket_rows[a].items():
                for c, coeff in entries:
                    t[a, b, c] -= float(coeff)
        return t

    def edge_matrices(self) -> np.ndarray:
        """Per-edge coadjoint matrices M_e = sum_a omega_e[a] * M[a]."""
        t = self.coadjoint_tensor()
        return np.einsum("ea,abc->ebc", self.omega, t)


@dataclass
class FieldConfig:
    """Node field of dual vectors, shape (n_nodes, dim)."""

    lam: np.ndarray

    def copy(self) -> "FieldConfig":
        return FieldConfig(self.lam.copy())


@dataclass
class Weights:
    alpha1: float = 1.0
    alpha2: float = 0.0  # reserved, unused
    alpha3: float = 1.0
    bound_c: float = 1.0


@dataclass
class EnergyBreakdown:
    main: float
    pen1: float
    pen3: float
    alpha1: float
    alpha3: float
    bound_c: float
    total: float

    def as_dict(self) -> dict:
        return {
            "main": self.main,
            "pen1": self.pen1,
            "pen3": self.pen3,
            "alpha1": self.alpha1,
            "alpha3": self.alpha3,
            "bound_c": self.bound_c,
            "total": self.total,
        }


def _edge_residuals(bundle: LatticeBundle, config: FieldConfig, mats: np.ndarray) -> np.ndarray:
    tails = np.array([e[0] for e in bundle.edges])
    heads = np.array([e[1] for e in bundle.edges])
    lam_t = config.lam[tails]
    lam_h = config.lam[heads]
    return lam_h - lam_t + np.einsum("ebc,ec->eb", mats, lam_t)


def energy(
    bundle: LatticeBundle,
    config: FieldConfig,
    weights: Weights,
    mats: np.ndarray | None = None,
) -> EnergyBreakdown:
    """Main residual energy plus the two active penalties."""
    if mats is None:
        mats = bundle.edge_matrices()
    res = _edge_residuals(bundle, config, mats)
    main = float(np.sum(res * res))
    tails = np.array([e[0] for e in bundle.edges])
    pairings = np.einsum("eb,eb->e", config.lam[tails], bundle.omega)
    pen1 = float(np.sum(pairings * pairings))
    sup2 = float(np.max(config.lam * config.lam)) if config.lam.size else 0.0
    pen3 = max(0.0, sup2 - weights.bound_c)
    total = main + weights.alpha1 * pen1 + weights.alpha3 * pen3
    return EnergyBreakdown(main, pen1, pen3, weights.alpha1, weights.alpha3, weights.bound_c, total)


def gradient(
    bundle: LatticeBundle,
    config: FieldConfig,
    weights: Weights,
    mats: np.ndarray | None = None,
) -> np.ndarray:
    """Exact analytic gradient with respect to every lambda coefficient.

    The sup-norm barrier uses a subgradient convention: zero while the
    bound is inactive, and the one-sided derivative 2*lambda at the first
    maximising (node, coordinate) when active.
    """
    if mats is None:
        mats = bundle.edge_matrices()
    res = _edge_residuals(bundle, config, mats)
    tails = np.array([e[0] for e in bundle.edges])
    heads = np.array([e[1] for e in bundle.edges])
    grad = np.zeros_like(config.lam)
    np.add.at(grad, heads, 2.0 * res)
    back = -2.0 * res + 2.0 * np.einsum("ebc,eb->ec", mats, res)
    np.add.at(grad, tails, back)
    pairings = np.einsum("eb,eb->e", config.lam[tails], bundle.omega)
    np.add.at(grad, tails, weights.alpha1 * 2.0 * pairings[:, None] * bundle.omega)
    sq = config.lam * config.lam
    sup2 = float(np.max(sq)) if sq.size else 0.0
    if sup2 > weights.bound_c:
        flat = int(np.argmax(sq))
        node, coord = divmod(flat, config.lam.shape[1])
        grad[node, coord] += weights.alpha3 * 2.0 * config.lam[node, coord]
    return grad


@dataclass
class SolverConfig:
    step: float = 0.1
    max_iters: int = 2000
    tol: float = 1e-8
    backtrack_factor: float = 0.5
    sufficient_decrease: float = 1e-4
    min_step: float = 1e-18


@dataclass
class TraceRow:
    iteration: int
    breakdown: EnergyBreakdown
    grad_norm: float
    step: float


def minimize(
    bundle: LatticeBundle,
    config0: FieldConfig,
    weights: Weights,
    solver: SolverConfig,
) -> tuple[FieldConfig, list[TraceRow]]:
    """Deterministic gradient descent with backtracking line search.

    The energy trace is non-increasing by construction; if backtracking
    exhausts the step size on an ascent direction the run raises
    SolverDivergence rather than returning silently.
    """
    mats = bundle.edge_matrices()
    config = config0.copy()
    step = solver.step
    eb = energy(bundle, config, weights, mats)
    g = gradient(bundle, config, weights, mats)
    gnorm = float(np.linalg.norm(g))
    trace = [TraceRow(0, eb, gnorm, step)]
    for it in range(1, solver.max_iters + 1):
        if gnorm < solver.tol:
            break
        step = min(step * 2.0, 1e6)
        while True:
            cand = FieldConfig(config.lam - step * g)
            eb_new = energy(bundle, cand, weights, mats)
            if eb_new.total <= eb.total - solver.sufficient_decrease * step * gnorm * gnorm:
                break
            step *= solver.backtrack_factor
            if step < solver.min_step:
                raise SolverDivergence(
                    f"backtracking exhausted at iteration {it}: energy "
                    f"{eb.total} cannot be decreased along the gradient"
                )
        config = cand
        eb = eb_new
        g = gradient(bundle, config, weights, mats)
        gnorm = float(np.linalg.norm(g))
        trace.append(TraceRow(it, eb, gnorm, step))
    return config, trace


def cartan_residual(bundle: LatticeBundle, config: FieldConfig) -> float:
    """Square root of the main energy term; zero iff the discrete
    covariant-constancy equation holds on every edge."""
    mats = bundle.edge_matrices()
    res = _edge_residuals(bundle, config, mats)
    return float(np.sqrt(np.sum(res * res)))


def edge_residual_norms(bundle: LatticeBundle, config: FieldConfig) -> np.ndarray:
    mats = bundle.edge_matrices()
    res = _edge_residuals(bundle, config, mats)
    return np.sqrt(np.sum(res * res, axis=1))


def spanning_tree(bundle: LatticeBundle) -> list[int]:
    """Edge indices of a BFS spanning tree rooted at node 0."""
    from collections import deque

    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(bundle.n_nodes)}
    for e_idx, (t, h, _) in enumerate(bundle.edges):
        adj[t].append((h, e_idx))
    visited = {0}
    tree = []
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for nbr, e_idx in adj[node]:
            if nbr not in visited:
                visited.add(nbr)
                tree.append(e_idx)
                queue.append(nbr)
    return tree


def covariant_config(bundle: LatticeBundle, seed_value: np.ndarray) -> tuple[FieldConfig, list[int]]:
    """Parallel-transport a seed dual vector from node 0 along a BFS tree.

    Along every tree edge the transported field satisfies the discrete
    covariant-constancy equation exactly (in floating point, to roundoff of
    the identical expression), so the residual restricted to tree edges
    vanishes.
    """
    mats = bundle.edge_matrices()
    lam = np.zeros((bundle.n_nodes, bundle.alg.dim))
    lam[0] = seed_value
    tree = spanning_tree(bundle)
    placed = {0}
    pending = list(tree)
    while pending:
        still = []
        for e_idx in pending:
            t, h, _ = bundle.edges[e_idx]
            if t in placed and h not in placed:
                lam[h] = lam[t] - mats[e_idx] @ lam[t]
                placed.add(h)
            elif h in placed and t in placed:
                pass
            else:
                still.append(e_idx)
        if len(still) == len(pending):
            break
        pending = still
    return FieldConfig(lam), tree


@dataclass
class NodeCertificate:
    node: int
    lambda_sup: float
    pairings: list[float]
    annihilated_axes: list[int]
    rank_d: int
    rank_v: int
    rank_t: int
    verdict: str  # split | degenerate

    def as_dict(self) -> dict:
        return {
            "node": self.node,
            "lambda_sup": self.lambda_sup,
            "pairings": self.pairings,
            "annihilated_axes": self.annihilated_axes,
            "rank_d": self.rank_d,
            "rank_v": self.rank_v,
            "rank_t": self.rank_t,
            "verdict": self.verdict,
        }


def certify_compatible_pair(
    bundle: LatticeBundle, config: FieldConfig, tol: float = 1e-8
) -> list[NodeCertificate]:
    """Per-node compatibility and transversality proxy.

    At each node the pairing functional ell(axis) = <lambda, omega(axis)>
    defines a linear functional on the d incident axis directions; its
    annihilator is the constraint distribution proxy D.  The dimension
    split rank(D) + rank(V) = d holds with rank(V) = 1 exactly when the
    functional is nonzero; nodes with lambda below tolerance are flagged
    degenerate rather than failed.
    """
    out = []
    edge_of = {}
    for e_idx, (t, _h, axis) in enumerate(bundle.edges):
        edge_of[(t, axis)] = e_idx
    for node in range(bundle.n_nodes):
        lam = config.lam[node]
        sup = float(np.max(np.abs(lam))) if lam.size else 0.0
        pairings = []
        for axis in range(bundle.d):
            e_idx = edge_of[(node, axis)]
            pairings.append(float(np.dot(lam, bundle.omega[e_idx])))
        if sup <= tol:
            out.append(
                NodeCertificate(node, sup, pairings, list(range(bundle.d)), bundle.d, 0, bundle.d, "degenerate")
            )
            continue
        annihilated = [a for a, p in enumerate(pairings) if abs(p) <= tol]
        rank_v = 1 if any(abs(p) > tol for p in pairings) else 0
        rank_d = bundle.d - rank_v
        verdict = "split" if rank_d + rank_v == bundle.d else "failed"
        out.append(
            NodeCertificate(node, sup, pairings, annihilated, rank_d, rank_v, bundle.d, verdict)
        )
    return out


def random_bundle_and_config(
    alg: LieAlgebraTable, d: int, n: int, seed: int, omega_scale: float = 0.3, lam_scale: float = 0.5
) -> tuple[LatticeBundle, FieldConfig]:
    """Deterministic random instance for tests and CLI runs."""
    rng = np.random.default_rng(seed)
    bundle = LatticeBundle(d, n, alg)
    bundle.omega = omega_scale * rng.standard_normal((bundle.n_edges, alg.dim))
    lam = lam_scale * rng.standard_normal((bundle.n_nodes, alg.dim))
    return bundle, FieldConfig(lam)
