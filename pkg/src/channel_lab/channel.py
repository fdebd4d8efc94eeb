"""Kraus-form channels, their duals, and the named channel families."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ChannelValidationError, DimensionError
from .tensor import TOL, _rng, as_matrix, dagger, haar_random_unitary, tensor_product

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, SX, SY, SZ)

# Kraus operators with Frobenius norm below this are dropped.
ZERO_KRAUS = 1e-14
# Probability vectors this close to normalized are rescaled; further off is an error.
PROB_RENORM = 1e-9


@dataclass(frozen=True)
class KrausChannel:
    """A map ``rho -> sum_i A_i rho A_i^dagger`` on C^d.

    ``kraus`` is stored as a ``(k, d, d)`` complex array. Construction only
    checks shapes; trace preservation is checked by :func:`validate`.
    """

    kraus: np.ndarray
    label: str = ""

    def __post_init__(self):
        ops = [as_matrix(a) for a in self.kraus]
        if not ops:
            raise DimensionError("a channel needs at least one Kraus operator")
        shapes = {a.shape for a in ops}
        if len(shapes) != 1:
            raise DimensionError(f"Kraus operators have mismatched shapes {sorted(shapes)}")
        (shape,) = shapes
        if shape[0] != shape[1]:
            raise DimensionError(f"Kraus operators must be square, got {shape}")
        kept = [a for a in ops if np.linalg.norm(a) >= ZERO_KRAUS] or ops[:1]
        arr = np.stack(kept)
        arr.setflags(write=False)
        object.__setattr__(self, "kraus", arr)

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def num_kraus(self) -> int:
        return self.kraus.shape[0]

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    @property
    def dual(self) -> "DualMap":
        return DualMap(self.kraus)


@dataclass(frozen=True)
class DualMap:
    """``X -> sum_i A_i^dagger X A_i`` for the Kraus set of a channel."""

    kraus: np.ndarray

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    def __call__(self, x) -> np.ndarray:
        x = _square(x, self.dim)
        return np.einsum("kji,jl,klm->im", self.kraus.conj(), x, self.kraus)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    deviation: float
    tol: float

    def __bool__(self):
        return self.passed


def _square(x, d: int) -> np.ndarray:
    x = as_matrix(x)
    if x.shape != (d, d):
        raise DimensionError(f"operator has shape {x.shape}, channel acts on dimension {d}")
    return x


def validate(t: KrausChannel, tol: float = TOL) -> ValidationReport:
    """Check ``sum_i A_i^dagger A_i = I`` to within ``tol`` (max-entry deviation)."""
    total = np.einsum("kji,kjl->il", t.kraus.conj(), t.kraus)
    dev = float(np.max(np.abs(total - np.eye(t.dim))))
    if np.isnan(dev):
        dev = float("inf")
    return ValidationReport(dev <= tol, dev, tol)


def require_valid(t: KrausChannel, tol: float = TOL) -> KrausChannel:
    report = validate(t, tol)
    if not report:
        raise ChannelValidationError(
            f"Kraus operators are not trace preserving: max|sum A^dagger A - I| = "
            f"{report.deviation:.3e} > tol {tol:.1e}",
            deviation=report.deviation,
        )
    return t


def apply(t: KrausChannel, rho) -> np.ndarray:
    rho = _square(rho, t.dim)
    return np.einsum("kij,jl,kml->im", t.kraus, rho, t.kraus.conj())


def apply_dual(t: KrausChannel, x) -> np.ndarray:
    return t.dual(x)


def is_unital(t: KrausChannel, tol: float = TOL) -> tuple[bool, float]:
    """Whether ``sum_i A_i A_i^dagger = I``; also returns the max-entry deviation."""
    total = np.einsum("kij,klj->il", t.kraus, t.kraus.conj())
    dev = float(np.max(np.abs(total - np.eye(t.dim))))
    return dev <= tol, dev


def is_unitary(u, tol: float = TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0])))) <= tol


def mix_kraus(t: KrausChannel, u, tol: float = TOL) -> KrausChannel:
    """Equivalent Kraus set ``A'_i = sum_j u_ij A_j`` for a unitary ``u``."""
    u = as_matrix(u)
    if u.shape != (t.num_kraus, t.num_kraus):
        raise DimensionError(f"mixing matrix must be {t.num_kraus}x{t.num_kraus}, got {u.shape}")
    if not is_unitary(u, tol):
        raise ChannelValidationError("Kraus mixing matrix is not unitary")
    return KrausChannel(np.einsum("ij,jab->iab", u, t.kraus), t.label)


# --- named families ---------------------------------------------------------


def _probabilities(p, n: int | None = None, name: str = "probabilities") -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if n is not None and p.shape[0] != n:
        raise ChannelValidationError(f"{name} must have {n} entries, got {p.shape[0]}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ChannelValidationError(f"{name} must be non-negative and finite")
    total = p.sum()
    if abs(total - 1) > PROB_RENORM:
        raise ChannelValidationError(f"{name} sum to {total!r}, not 1", deviation=abs(total - 1))
    return p / total


def pauli(p: Sequence[float]) -> KrausChannel:
    """Single-qubit Pauli channel ``rho -> sum_i p_i s_i rho s_i`` with ``s_0 = I``."""
    p = _probabilities(p, 4, "pauli probabilities")
    return KrausChannel(
        [np.sqrt(pi) * s for pi, s in zip(p, PAULIS)],
        f"pauli({', '.join(f'{x:g}' for x in p)})",
    )


def depolarizing(p0: float) -> KrausChannel:
    """Isotropic Pauli channel, weight ``p0`` on the identity and ``(1-p0)/3`` on each Pauli."""
    if not 0 <= p0 <= 1:
        raise ChannelValidationError(f"depolarizing p0 must lie in [0, 1], got {p0}")
    q = (1 - p0) / 3
    t = pauli([p0, q, q, q])
    return KrausChannel(t.kraus, f"depolarizing({p0:g})")


def correlated_pauli2(p: Sequence[float]) -> KrausChannel:
    """Two-qubit channel applying the same Pauli ``s_a (x) s_a`` to both qubits with prob ``p_a``."""
    p = _probabilities(p, 4, "correlated_pauli2 probabilities")
    return KrausChannel(
        [np.sqrt(pa) * tensor_product(s, s) for pa, s in zip(p, PAULIS)],
        f"correlated_pauli2({', '.join(f'{x:g}' for x in p)})",
    )


def partial_replacement(d: int, p: float) -> KrausChannel:
    """``rho -> (1-p) rho + p |0><0|`` on C^d.

    Kraus set: ``sqrt(1-p) I`` together with ``sqrt(p) |0><i|`` for i = 0..d-1.
    """
    d = int(d)
    if d < 1:
        raise ChannelValidationError(f"partial_replacement needs d >= 1, got {d}")
    if not 0 <= p <= 1:
        raise ChannelValidationError(f"partial_replacement p must lie in [0, 1], got {p}")
    ops = [np.sqrt(1 - p) * np.eye(d, dtype=complex)]
    for i in range(d):
        a = np.zeros((d, d), dtype=complex)
        a[0, i] = np.sqrt(p)
        ops.append(a)
    return KrausChannel(ops, f"partial_replacement(d={d}, p={p:g})")


def projective(projectors: Sequence, tol: float = 1e-9) -> KrausChannel:
    """Measurement channel ``rho -> sum_i P_i rho P_i`` for a complete orthogonal family."""
    ps = [as_matrix(pi) for pi in projectors]
    if not ps:
        raise ChannelValidationError("projective channel needs at least one projector")
    d = ps[0].shape[0]
    for i, pi in enumerate(ps):
        if pi.shape != (d, d):
            raise DimensionError(f"projector {i} has shape {pi.shape}, expected {(d, d)}")
        if np.max(np.abs(pi - dagger(pi))) > tol or np.max(np.abs(pi @ pi - pi)) > tol:
            raise ChannelValidationError(f"projector {i} is not an orthogonal projector")
        for j in range(i):
            if np.max(np.abs(pi @ ps[j])) > tol:
                raise ChannelValidationError(f"projectors {j} and {i} are not mutually orthogonal")
    dev = float(np.max(np.abs(sum(ps) - np.eye(d))))
    if dev > tol:
        raise ChannelValidationError(f"projectors do not sum to the identity (deviation {dev:.3e})", dev)
    return KrausChannel(ps, f"projective({len(ps)} projectors, d={d})")


def unitary_mixture(probs: Sequence[float], unitaries: Sequence, tol: float = 1e-9) -> KrausChannel:
    """``rho -> sum_g p_g U_g rho U_g^dagger``."""
    us = [as_matrix(u) for u in unitaries]
    p = _probabilities(probs, len(us), "unitary_mixture probabilities")
    for g, u in enumerate(us):
        if not is_unitary(u, tol):
            raise ChannelValidationError(f"U_{g} is not unitary")
    return KrausChannel(
        [np.sqrt(pg) * u for pg, u in zip(p, us)],
        f"unitary_mixture({len(us)} unitaries, d={us[0].shape[0]})",
    )


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel([np.eye(d, dtype=complex)], f"identity(d={d})")


FAMILIES = {
    "pauli": lambda params: pauli(params["p"]),
    "depolarizing": lambda params: depolarizing(float(params["p0"])),
    "correlated_pauli2": lambda params: correlated_pauli2(params["p"]),
    "partial_replacement": lambda params: partial_replacement(int(params["d"]), float(params["p"])),
    "projective": lambda params: projective(params["projectors"]),
    "unitary_mixture": lambda params: unitary_mixture(params["probs"], params["unitaries"]),
}


def build_named_channel(descriptor: Mapping) -> KrausChannel:
    """Build a channel from ``{"family": name, "params": {...}}``.

    Parameters per family::

        pauli               p: [p0, px, py, pz]
        depolarizing        p0
        correlated_pauli2   p: [p0, px, py, pz]
        partial_replacement d, p
        projective          projectors: list of d x d matrices
        unitary_mixture     probs, unitaries
    """
    family = descriptor.get("family")
    if family not in FAMILIES:
        raise ChannelValidationError(f"unknown channel family {family!r}; expected one of {sorted(FAMILIES)}")
    params = descriptor.get("params") or {}
    try:
        return FAMILIES[family](params)
    except KeyError as exc:
        raise ChannelValidationError(f"{family}: missing parameter {exc.args[0]!r}") from None


# --- random channels (tests and experiments) ---------------------------------


def random_channel(d: int, k: int | None = None, seed=None) -> KrausChannel:
    """Random channel with ``k`` Kraus operators, from a Haar-random isometry C^d -> C^(kd)."""
    rng = _rng(seed)
    k = k or d
    z = rng.standard_normal((k * d, d)) + 1j * rng.standard_normal((k * d, d))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return KrausChannel(q.reshape(k, d, d), f"random(d={d}, k={k})")


def random_unital_channel(d: int, k: int | None = None, seed=None) -> KrausChannel:
    """Random mixture of ``k`` Haar unitaries with Dirichlet weights."""
    rng = _rng(seed)
    k = k or d
    p = rng.dirichlet(np.ones(k))
    us = [haar_random_unitary(d, rng) for _ in range(k)]
    t = unitary_mixture(p, us)
    return KrausChannel(t.kraus, f"random_unital(d={d}, k={k})")
