"""Output purity and fidelity of pure inputs: pointwise values, bounds, averages, DFS and QECC checks.

Every pointwise quantity is computed directly from the channel action and
again as an expectation of the matching Hamiltonian on ``psi (x) psi``; a
disagreement beyond ``ROUTE_TOL`` raises :class:`NumericalError`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .channel import KrausChannel, apply, is_unital
from .errors import NumericalError
from .hamiltonian import (
    ROUTE_TOL,
    ChannelHamiltonian,
    InvariantSubspace,
    compress,
    fidelity_hamiltonian,
    invariant_subspace,
    purity_hamiltonian,
    symmetric_sector_spectrum,
)
from .optimizer import OptimizerConfig, minimize_product_expectation
from .tensor import (
    SubspaceBasis,
    check_state,
    haar_random_state,
    swap_operator,
    symmetric_basis,
    symmetric_projector,
    tensor_product,
)

Quantity = Literal["purity", "fidelity"]

QECC_TOL = 1e-9
DFS_SAMPLES = 20
# Below this a Monte-Carlo standard error counts as zero (pointwise-constant quantity).
STDERR_FLOOR = 1e-12


def _omega(t: KrausChannel, omega: ChannelHamiltonian | None) -> ChannelHamiltonian:
    return omega if omega is not None else purity_hamiltonian(t)


def output_purity(t: KrausChannel, psi, omega: ChannelHamiltonian | None = None) -> float:
    """``Tr[T(|psi><psi|)^2]``, cross-checked against ``<psi psi|Omega|psi psi>``.

    Pass a precomputed ``omega`` when evaluating many states.
    """
    psi = check_state(psi, t.dim)
    out = apply(t, np.outer(psi, psi.conj()))
    direct = float(np.real(np.trace(out @ out)))
    via_omega = _omega(t, omega).expectation(psi)
    if abs(direct - via_omega) > ROUTE_TOL:
        raise NumericalError(f"output purity {direct!r} disagrees with Omega expectation {via_omega!r}")
    return direct


def pure_state_fidelity(t: KrausChannel, psi, omega1: ChannelHamiltonian | None = None) -> float:
    """``<psi|T(|psi><psi|)|psi>``, cross-checked against ``<psi psi|Omega_1|psi psi>``."""
    psi = check_state(psi, t.dim)
    direct = float(np.real(psi.conj() @ apply(t, np.outer(psi, psi.conj())) @ psi))
    via = (omega1 if omega1 is not None else fidelity_hamiltonian(t)).expectation(psi)
    if abs(via.imag) > ROUTE_TOL or abs(direct - via.real) > ROUTE_TOL:
        raise NumericalError(f"fidelity {direct!r} disagrees with Omega_1 expectation {via!r}")
    return direct


@dataclass(frozen=True)
class PurityBounds:
    upper: float
    lower_global: float
    lower_subspace: float


def purity_bounds(t: KrausChannel, c: SubspaceBasis | None = None, omega: ChannelHamiltonian | None = None) -> PurityBounds:
    """Bounds ``lower_subspace <= P(T, C) <= upper``.

    ``upper`` is ``Tr[Pi+(C) Omega]`` (the Haar average over C), ``lower_global``
    the least eigenvalue of Omega on all of Sym(H (x) H), and ``lower_subspace``
    the least eigenvalue of Omega compressed to Sym(C (x) C), which is never
    below ``lower_global``.
    """
    c = c or SubspaceBasis.full(t.dim)
    omega = _omega(t, omega)
    upper = float(np.real(np.trace(symmetric_projector(c) @ omega.matrix)))
    lower_global = symmetric_sector_spectrum(omega).min_eigenvalue
    lower_subspace = symmetric_sector_spectrum(compress(omega, c)).min_eigenvalue
    return PurityBounds(upper, lower_global, lower_subspace)


@dataclass(frozen=True)
class DFSCheck:
    is_dfs: bool
    unital: bool
    criterion: str
    residual: float | None
    sampled_min: float | None
    optimizer_min: float
    upper_bound: float

    def __bool__(self):
        return self.is_dfs


def dfs_check(
    t: KrausChannel,
    c: SubspaceBasis,
    tol: float = 1e-8,
    cfg: OptimizerConfig | None = None,
    seed: int = 0,
) -> DFSCheck:
    """Decide whether ``c`` is decoherence free for ``t``.

    Unital channels use the exact criterion: Omega fixes every vector of
    Sym(C (x) C). For non-unital channels there is no such criterion, so the
    check samples output purities (basis vectors plus random superpositions)
    and requires the optimizer's minimum over C to reach ``1 - tol`` as well.
    """
    omega = purity_hamiltonian(t)
    unital, _ = is_unital(t)
    cfg = cfg or OptimizerConfig(restarts=8, seed=seed)
    opt_min = minimize_product_expectation(omega, c, cfg).value
    upper = purity_bounds(t, c, omega).upper
    if unital:
        w = np.kron(c.vectors, c.vectors) @ symmetric_basis(c.dim)
        residual = float(np.max(np.linalg.norm(omega.matrix @ w - w, axis=0)))
        return DFSCheck(residual <= tol, True, "eigenvalue-one", residual, None, opt_min, upper)
    rng = np.random.default_rng(seed)
    probes = [c.vectors[:, k] for k in range(c.dim)]
    probes += [c.vectors @ haar_random_state(c.dim, rng) for _ in range(DFS_SAMPLES)]
    sampled = min(output_purity(t, psi, omega) for psi in probes)
    passed = sampled >= 1 - tol and opt_min >= 1 - tol
    return DFSCheck(passed, False, "sampled", None, sampled, opt_min, upper)


def average_purity(t: KrausChannel, omega: ChannelHamiltonian | None = None) -> float:
    """Haar average of the output purity: ``Tr[S (T(I) (x) T(I)) + Omega] / (d(d+1))``."""
    d = t.dim
    t_id = apply(t, np.eye(d))
    s = swap_operator(d)
    total = np.trace(s @ tensor_product(t_id, t_id) + _omega(t, omega).matrix)
    return float(np.real(total)) / (d * (d + 1))


def average_fidelity(t: KrausChannel) -> float:
    """Haar average of the pure-state fidelity: ``Tr[Omega_1 + S (I (x) T(I))] / (d(d+1))``."""
    d = t.dim
    s = swap_operator(d)
    total = np.trace(fidelity_hamiltonian(t).matrix + s @ tensor_product(np.eye(d), apply(t, np.eye(d))))
    return float(np.real(total)) / (d * (d + 1))


def haar_states(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _batch_values(t: KrausChannel, quantity: Quantity, psis: np.ndarray, h: ChannelHamiltonian) -> np.ndarray:
    d = t.dim
    phi = np.einsum("kij,nj->nki", t.kraus, psis)  # A_k psi
    h4 = h.matrix.reshape(d, d, d, d)
    via = np.einsum("ni,nk,ikjl,nj,nl->n", psis.conj(), psis.conj(), h4, psis, psis)
    if quantity == "purity":
        gram = np.einsum("nki,nli->nkl", phi.conj(), phi)
        direct = np.sum(np.abs(gram) ** 2, axis=(1, 2))
    else:
        amp = np.einsum("ni,nki->nk", psis.conj(), phi)
        direct = np.sum(np.abs(amp) ** 2, axis=1)
    gap = np.max(np.abs(direct - via)) if len(direct) else 0.0
    if gap > ROUTE_TOL:
        raise NumericalError(f"Monte-Carlo {quantity}: direct and Hamiltonian values differ by {gap:.3e}")
    return direct


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    n: int

    def zscore(self, analytic: float) -> float:
        """``|estimate - analytic| / stderr``; a zero stderr gives 0 or inf."""
        diff = abs(self.estimate - analytic)
        if self.stderr > STDERR_FLOOR:
            return diff / self.stderr
        return 0.0 if diff <= ROUTE_TOL else float("inf")


def monte_carlo_average(
    t: KrausChannel, quantity: Quantity = "purity", n: int = 10_000, seed: int = 0, partitions: int = 1
) -> MonteCarloEstimate:
    """Sample mean and standard error of the pointwise quantity over ``n`` Haar states.

    Partition ``j`` draws from the ``j``-th child of ``SeedSequence(seed)``, so
    the result depends only on ``(seed, partitions)``, never on how the
    partitions are scheduled.
    """
    if n < 2:
        raise ValueError(f"monte_carlo_average needs n >= 2, got {n}")
    if quantity not in ("purity", "fidelity"):
        raise ValueError(f"unknown quantity {quantity!r}")
    h = purity_hamiltonian(t) if quantity == "purity" else fidelity_hamiltonian(t)
    sizes = [len(chunk) for chunk in np.array_split(np.arange(n), partitions)]
    values = []
    for ss, m in zip(np.random.SeedSequence(seed).spawn(partitions), sizes):
        psis = haar_states(t.dim, m, np.random.default_rng(ss))
        values.append(_batch_values(t, quantity, psis, h))
    v = np.concatenate(values)
    return MonteCarloEstimate(float(v.mean()), float(v.std(ddof=1) / np.sqrt(n)), n)


@dataclass(frozen=True)
class CodeMatrix:
    c: np.ndarray
    kl_residual: float
    holds: bool
    purity: float | None = None
    codeword_purities: tuple[float, ...] = ()
    rank: int = 0


def qecc_code_matrix(t: KrausChannel, code: SubspaceBasis, tol: float = QECC_TOL) -> CodeMatrix:
    """Code matrix ``c_ij = <psi_0|A_i^dag A_j|psi_0>`` and the error-correction residual.

    The residual is the largest deviation of ``<psi_a|A_i^dag A_j|psi_b>`` from
    ``c_ij delta_ab`` over all codeword pairs. When it is within ``tol`` the
    channel purity on the code is ``Tr(c^2)``, which is checked against the
    output purity of every codeword.
    """
    phi = np.einsum("kij,ja->kia", t.kraus, code.vectors)  # A_k psi_a
    e = np.einsum("kia,lib->klab", phi.conj(), phi)
    c = e[:, :, 0, 0]
    expected = np.einsum("kl,ab->klab", c, np.eye(code.dim))
    residual = float(np.max(np.abs(e - expected)))
    rank = int(np.sum(np.linalg.eigvalsh((c + c.conj().T) / 2) > tol))
    if residual > tol:
        return CodeMatrix(c, residual, False, rank=rank)
    purity = float(np.real(np.trace(c @ c)))
    omega = purity_hamiltonian(t)
    per_word = tuple(output_purity(t, code.vectors[:, a], omega) for a in range(code.dim))
    worst = max(abs(p - purity) for p in per_word)
    if worst > QECC_TOL:
        raise NumericalError(f"Tr(c^2) = {purity!r} differs from a codeword output purity by {worst:.3e}")
    return CodeMatrix(c, residual, True, purity, per_word, rank)


@dataclass
class PurityReport:
    label: str
    entries: list[dict] = field(default_factory=list)
    bounds: PurityBounds | None = None
    average_purity: float = float("nan")
    average_fidelity: float = float("nan")
    dfs_basis: InvariantSubspace | None = None


def purity_report(t: KrausChannel, states=(), c: SubspaceBasis | None = None) -> PurityReport:
    omega = purity_hamiltonian(t)
    omega1 = fidelity_hamiltonian(t)
    entries = [
        {"state": np.asarray(psi), "output_purity": output_purity(t, psi, omega), "fidelity": pure_state_fidelity(t, psi, omega1)}
        for psi in states
    ]
    return PurityReport(
        label=t.label,
        entries=entries,
        bounds=purity_bounds(t, c, omega),
        average_purity=average_purity(t, omega),
        average_fidelity=average_fidelity(t),
        dfs_basis=invariant_subspace(omega),
    )
