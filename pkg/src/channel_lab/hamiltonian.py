"""Purity and fidelity Hamiltonians of a channel on H (x) H.

The purity Hamiltonian is built twice: from products of Kraus operators and
from the dual map applied slot-by-slot to SWAP. The two routes share no code
beyond the Kraus array, which is what makes the cross-check meaningful.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .channel import KrausChannel
from .errors import NotHermitianError, NumericalError
from .tensor import (
    TOL,
    SubspaceBasis,
    dagger,
    hermitian_eigensystem,
    hermiticity_deviation,
    swap_operator,
    symmetric_basis,
)

Kind = Literal["purity", "fidelity", "fidelity-hermitian"]

ROUTE_TOL = 1e-10
# Eigenvalues within this distance of one count as invariant.
EIGENVALUE_ONE_TOL = 1e-8


@dataclass(frozen=True)
class ChannelHamiltonian:
    kind: Kind
    matrix: np.ndarray = field(repr=False)
    source_dim: int

    @property
    def hermitian(self) -> bool:
        """``False`` for ``kind="fidelity"``, which is generally non-Hermitian."""
        return self.kind != "fidelity" and hermiticity_deviation(self.matrix) <= TOL

    def expectation(self, psi) -> complex:
        """``<psi psi| H |psi psi>`` for a state vector on the source space."""
        psi = np.asarray(psi, dtype=complex).ravel()
        d = self.source_dim
        h = self.matrix.reshape(d, d, d, d)
        return complex(np.einsum("i,k,ikjl,j,l->", psi.conj(), psi.conj(), h, psi, psi))


def _from_slots(t4: np.ndarray) -> np.ndarray:
    d = t4.shape[0]
    return t4.reshape(d * d, d * d)


def purity_hamiltonian(t: KrausChannel) -> ChannelHamiltonian:
    """``sum_ij (A_i^dag A_j)^dag (x) (A_i^dag A_j)``."""
    a = t.kraus
    omega = np.einsum("ipa,jpb->ijab", a.conj(), a)  # omega[i, j] = A_i^dag A_j
    # first factor is omega_ij^dag: entry [x, z] = conj(omega_ij[z, x])
    t4 = np.einsum("ijzx,ijyw->xyzw", omega.conj(), omega)
    return ChannelHamiltonian("purity", _from_slots(t4), t.dim)


def _dual_on_slot(t: KrausChannel, x: np.ndarray, slot: int) -> np.ndarray:
    """Apply the dual map to one tensor factor of an operator on H (x) H."""
    d = t.dim
    x4 = x.reshape(d, d, d, d)
    a = t.kraus
    if slot == 0:
        y4 = np.einsum("kpa,pbqe,kqc->abce", a.conj(), x4, a)
    else:
        y4 = np.einsum("kpb,apcq,kqe->abce", a.conj(), x4, a)
    return y4.reshape(d * d, d * d)


def dual_swap_image(t: KrausChannel) -> np.ndarray:
    """``(T_* (x) T_*)(S)``."""
    s = swap_operator(t.dim)
    return _dual_on_slot(t, _dual_on_slot(t, s, 0), 1)


def purity_hamiltonian_dual(t: KrausChannel) -> ChannelHamiltonian:
    """``(T_* (x) T_*)(S) S``, computed without forming any ``A_i^dag A_j``."""
    return ChannelHamiltonian("purity", dual_swap_image(t) @ swap_operator(t.dim), t.dim)


def fidelity_hamiltonian(t: KrausChannel) -> ChannelHamiltonian:
    """``sum_i A_i (x) A_i^dag``. Not Hermitian in general."""
    a = t.kraus
    t4 = np.einsum("kac,kdb->abcd", a, a.conj())
    return ChannelHamiltonian("fidelity", _from_slots(t4), t.dim)


def fidelity_hamiltonian_hermitian(t: KrausChannel) -> ChannelHamiltonian:
    """``(I (x) T_*)(S)``: Hermitian, same expectations as Omega_1 on symmetric states."""
    m = _dual_on_slot(t, swap_operator(t.dim), 1)
    return ChannelHamiltonian("fidelity-hermitian", m, t.dim)


def cross_check_routes(t: KrausChannel, tol: float = ROUTE_TOL) -> ChannelHamiltonian:
    """Build Omega(T) by both routes; raise :class:`NumericalError` if they disagree."""
    direct = purity_hamiltonian(t)
    dual = purity_hamiltonian_dual(t)
    gap = float(np.max(np.abs(direct.matrix - dual.matrix)))
    if not gap <= tol:
        raise NumericalError(f"Kraus-product and dual-map routes to Omega(T) differ by {gap:.3e} > {tol:.1e}")
    return direct


@dataclass(frozen=True)
class SymmetricSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def min_eigenvalue(self) -> float:
        """omega_0^+, the least eigenvalue on the symmetric sector."""
        return float(self.eigenvalues[0])


@dataclass(frozen=True)
class InvariantSubspace:
    basis: np.ndarray = field(repr=False)
    eigenvalue_tolerance: float
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def _require_hermitian(h: ChannelHamiltonian, tol: float = TOL) -> None:
    if h.kind == "fidelity":
        raise NotHermitianError(hermiticity_deviation(h.matrix), "Omega_1 (use the fidelity-hermitian kind)")
    dev = hermiticity_deviation(h.matrix)
    if dev > tol:
        raise NotHermitianError(dev, f"{h.kind} Hamiltonian")


def full_spectrum(h: ChannelHamiltonian) -> tuple[np.ndarray, np.ndarray]:
    _require_hermitian(h)
    return hermitian_eigensystem(h.matrix)


def symmetric_sector_spectrum(h: ChannelHamiltonian) -> SymmetricSpectrum:
    """Spectrum of ``h`` compressed to Sym(H (x) H), eigenvectors embedded back in H (x) H."""
    _require_hermitian(h)
    b = symmetric_basis(h.source_dim)
    evals, evecs = hermitian_eigensystem(dagger(b) @ h.matrix @ b)
    return SymmetricSpectrum(evals, b @ evecs)


def invariant_subspace(h: ChannelHamiltonian, tol: float = EIGENVALUE_ONE_TOL) -> InvariantSubspace:
    """Orthonormal basis of the eigenvalue-one eigenspace of Omega (may be empty)."""
    if h.kind != "purity":
        raise ValueError(f"invariant_subspace needs a purity Hamiltonian, got {h.kind!r}")
    evals, evecs = full_spectrum(h)
    keep = np.abs(evals - 1) <= tol
    return InvariantSubspace(evecs[:, keep], tol, evals[keep])


def compress(h: ChannelHamiltonian, c: SubspaceBasis) -> ChannelHamiltonian:
    """Restrict ``h`` to ``C (x) C`` in the coordinates of the basis of C."""
    w = np.kron(c.vectors, c.vectors)
    return ChannelHamiltonian(h.kind, dagger(w) @ h.matrix @ w, c.dim)
