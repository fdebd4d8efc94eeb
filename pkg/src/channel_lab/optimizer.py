"""Extremize ``<psi psi| H |psi psi>`` over unit vectors psi, optionally inside a subspace.

Multistart Riemannian gradient descent on the unit sphere of C^k (k = dim C),
with Barzilai-Borwein trial steps and Armijo backtracking. A grid search over
the Bloch sphere serves as an independent oracle for qubits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .hamiltonian import ChannelHamiltonian, _require_hermitian, compress
from .tensor import SubspaceBasis, haar_random_state, swap_operator

ARMIJO = 1e-4
MAX_BACKTRACKS = 60
# Accepted steps may raise the objective by at most this much (floating-point noise).
ROUNDOFF_SLACK = 1e-15
DFS_TOL = 1e-8


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 2000
    step_size: float = 0.5
    gradient_tolerance: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if not self.gradient_tolerance > 0:
            raise ValueError(f"gradient_tolerance must be positive, got {self.gradient_tolerance}")
        if self.max_iterations < 0 or not self.step_size > 0:
            raise ValueError("max_iterations must be >= 0 and step_size positive")


@dataclass
class OptimizationResult:
    value: float
    state: np.ndarray
    converged: bool
    iterations_used: int
    restart_values: list[float]
    history: list[float] = field(default_factory=list, repr=False)
    dfs_candidate: bool = False


def effective_matrix(h: ChannelHamiltonian | np.ndarray, psi) -> np.ndarray:
    """``M_ij = sum_kl conj(psi_k) H_(ik),(jl) psi_l``, so ``<psi|M|psi> = <psi psi|H|psi psi>``."""
    m = h.matrix if isinstance(h, ChannelHamiltonian) else np.asarray(h)
    psi = np.asarray(psi, dtype=complex).ravel()
    d = psi.shape[0]
    if m.shape != (d * d, d * d):
        raise DimensionError(f"Hamiltonian of shape {m.shape} does not act on ({d} x {d})")
    return np.einsum("k,ikjl,l->ij", psi.conj(), m.reshape(d, d, d, d), psi)


def symmetrized(m: np.ndarray) -> np.ndarray:
    """``P+ m P+`` with ``P+ = (I + S)/2``: same values on every ``psi (x) psi``."""
    d = int(round(np.sqrt(m.shape[0])))
    p = (np.eye(d * d) + swap_operator(d)) / 2
    return p @ m @ p


def riemannian_gradient(h: ChannelHamiltonian, psi) -> np.ndarray:
    """Sphere-projected gradient of ``psi -> <psi psi|h|psi psi>``, packed as a complex vector.

    For a tangent direction ``v`` (``Re<psi, v> = 0``) the directional
    derivative is ``Re<gradient, v>``.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    g = 4 * effective_matrix(symmetrized(h.matrix), psi) @ psi
    return g - np.vdot(psi, g).real * psi


class _Objective:
    def __init__(self, m: np.ndarray):
        self.k = int(round(np.sqrt(m.shape[0])))
        self.h4 = symmetrized(m).reshape(self.k, self.k, self.k, self.k)

    def value(self, x: np.ndarray) -> float:
        return float(np.einsum("i,k,ikjl,j,l->", x.conj(), x.conj(), self.h4, x, x).real)

    def value_and_gradient(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        """Value and the Riemannian gradient (real-sphere metric, complex packing)."""
        mx = np.einsum("k,ikjl,j,l->i", x.conj(), self.h4, x, x)
        f = float(np.vdot(x, mx).real)
        g = 4 * mx
        return f, g - np.vdot(x, g).real * x


def _descend(obj: _Objective, x: np.ndarray, cfg: OptimizerConfig):
    f, g = obj.value_and_gradient(x)
    history = [f]
    step = cfg.step_size
    prev = None
    for it in range(cfg.max_iterations + 1):
        gnorm2 = float(np.vdot(g, g).real)
        if np.sqrt(gnorm2) <= cfg.gradient_tolerance:
            return x, f, True, it, history
        if it == cfg.max_iterations:
            break
        if prev is not None:
            s, y = x - prev[0], g - prev[1]
            sy = float(np.vdot(s, y).real)
            if sy > 0:
                step = float(np.vdot(s, s).real) / sy
        for _ in range(MAX_BACKTRACKS):
            trial = x - step * g
            trial /= np.linalg.norm(trial)
            f_trial, g_trial = obj.value_and_gradient(trial)
            if f_trial <= f - ARMIJO * step * gnorm2 + ROUNDOFF_SLACK * max(1.0, abs(f)):
                break
            step /= 2
        else:
            return x, f, False, it, history
        prev = (x, g)
        x, f, g = trial, f_trial, g_trial
        history.append(f)
    return x, f, False, cfg.max_iterations, history


def _run(h: ChannelHamiltonian, c: SubspaceBasis | None, cfg: OptimizerConfig, sign: float) -> OptimizationResult:
    _require_hermitian(h)
    c = c or SubspaceBasis.full(h.source_dim)
    if c.ambient_dim != h.source_dim:
        raise DimensionError(f"subspace lives in dimension {c.ambient_dim}, Hamiltonian in {h.source_dim}")
    obj = _Objective(sign * compress(h, c).matrix)
    runs = []
    for ss in np.random.SeedSequence(cfg.seed).spawn(cfg.restarts):
        x0 = haar_random_state(c.dim, np.random.default_rng(ss))
        runs.append(_descend(obj, x0, cfg))
    values = [sign * r[1] for r in runs]
    best = int(np.argmin([r[1] for r in runs]))
    x, _, converged, iters, history = runs[best]
    state = c.vectors @ x
    state /= np.linalg.norm(state)
    return OptimizationResult(
        value=float(h.expectation(state).real),
        state=state,
        converged=converged,
        iterations_used=iters,
        restart_values=values,
        history=[sign * v for v in history],
    )


def minimize_product_expectation(
    h: ChannelHamiltonian, c: SubspaceBasis | None = None, cfg: OptimizerConfig | None = None
) -> OptimizationResult:
    """Minimize ``<psi psi|h|psi psi>`` over unit psi in ``c`` (default: the whole space)."""
    return _run(h, c, cfg or OptimizerConfig(), 1.0)


def maximize_product_expectation(
    h: ChannelHamiltonian, c: SubspaceBasis | None = None, cfg: OptimizerConfig | None = None
) -> OptimizationResult:
    """Maximize instead; for purity Hamiltonians flags a candidate DFS direction when the value reaches one."""
    res = _run(h, c, cfg or OptimizerConfig(), -1.0)
    res.dfs_candidate = h.kind == "purity" and res.value >= 1 - DFS_TOL
    return res


@dataclass(frozen=True)
class GridResult:
    min_value: float
    argmin: np.ndarray
    max_value: float
    argmax: np.ndarray


def bloch_grid(resolution: int) -> np.ndarray:
    """States ``cos(t/2)|0> + e^{ip} sin(t/2)|1>`` on a resolution x 2*resolution (t, p) grid."""
    theta = np.linspace(0, np.pi, resolution)
    phi = np.arange(2 * resolution) * (np.pi / resolution)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    t, p = t.ravel(), p.ravel()
    return np.stack([np.cos(t / 2), np.exp(1j * p) * np.sin(t / 2)], axis=1)


def brute_force_grid(h: ChannelHamiltonian, resolution: int = 200) -> GridResult:
    """Grid extrema of ``<psi psi|h|psi psi>`` for a qubit (d = 2) Hamiltonian."""
    if h.source_dim != 2:
        raise DimensionError(f"brute_force_grid only handles d = 2, got d = {h.source_dim}")
    psis = bloch_grid(resolution)
    h4 = h.matrix.reshape(2, 2, 2, 2)
    vals = np.einsum("ni,nk,ikjl,nj,nl->n", psis.conj(), psis.conj(), h4, psis, psis).real
    lo, hi = int(np.argmin(vals)), int(np.argmax(vals))
    return GridResult(float(vals[lo]), psis[lo], float(vals[hi]), psis[hi])
