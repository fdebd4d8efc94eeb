import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from channel_lab.channel import (
    PAULIS,
    SX,
    SZ,
    KrausChannel,
    apply,
    apply_dual,
    build_named_channel,
    correlated_pauli2,
    depolarizing,
    identity_channel,
    is_unital,
    mix_kraus,
    partial_replacement,
    pauli,
    projective,
    random_channel,
    random_unital_channel,
    unitary_mixture,
    validate,
)
from channel_lab.errors import ChannelValidationError, DimensionError
from channel_lab.hamiltonian import purity_hamiltonian
from channel_lab.tensor import haar_random_state, haar_random_unitary

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_density(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def test_validate_identity():
    r = validate(identity_channel(3))
    assert r.passed and r.deviation == 0


def test_validate_pauli():
    assert validate(pauli([0.4, 0.3, 0.2, 0.1]))


def test_validate_trace_decreasing():
    r = validate(KrausChannel([np.sqrt(0.5) * np.eye(2)]))
    assert not r.passed
    assert r.deviation == pytest.approx(0.5)


def test_mismatched_kraus_dims():
    with pytest.raises(DimensionError):
        KrausChannel([np.eye(2), np.eye(3)])


def test_apply_identity():
    rho = random_density(3, np.random.default_rng(0))
    assert np.array_equal(apply(identity_channel(3), rho), rho)


def test_apply_fully_depolarizing():
    out = apply(depolarizing(0.25), np.diag([1.0, 0.0]))
    assert np.max(np.abs(out - np.eye(2) / 2)) <= 1e-15


def test_apply_replacement():
    rho = random_density(3, np.random.default_rng(1))
    out = apply(partial_replacement(3, 1.0), rho)
    expected = np.zeros((3, 3))
    expected[0, 0] = 1
    assert np.max(np.abs(out - expected)) <= 1e-15


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply(identity_channel(2), np.eye(3))
    with pytest.raises(DimensionError):
        apply_dual(identity_channel(2), np.eye(3))


def test_dual_identity_channel():
    x = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(apply_dual(identity_channel(3), x), x)


@pytest.mark.parametrize("seed", range(5))
def test_dual_of_identity_operator(seed):
    t = random_channel(3, 4, seed)
    assert np.max(np.abs(apply_dual(t, np.eye(3)) - np.eye(3))) <= 1e-12


def test_dual_replacement_on_ground_projector():
    # sum_i |i><0|0><0|0><i| = I
    p0 = np.diag([1.0, 0, 0])
    assert np.max(np.abs(apply_dual(partial_replacement(3, 1.0), p0) - np.eye(3))) <= 1e-15


def test_unital_pauli_and_projective():
    assert is_unital(pauli([0.1, 0.2, 0.3, 0.4]))[0]
    assert is_unital(projective([np.diag([1.0, 0]), np.diag([0, 1.0])]))[0]


@pytest.mark.parametrize("d", [2, 3, 5])
def test_replacement_not_unital(d):
    unital, dev = is_unital(partial_replacement(d, 1.0))
    assert not unital
    assert dev == pytest.approx(d - 1)


def test_mix_identity_matrix():
    t = pauli([0.4, 0.3, 0.2, 0.1])
    assert np.array_equal(mix_kraus(t, np.eye(4)).kraus, t.kraus)


def test_mix_random_unitary_preserves_action():
    t = pauli([0.4, 0.3, 0.2, 0.1])
    u = haar_random_unitary(4, 7)
    t2 = mix_kraus(t, u)
    rng = np.random.default_rng(8)
    for _ in range(10):
        psi = haar_random_state(2, rng)
        rho = np.outer(psi, psi.conj())
        assert np.max(np.abs(apply(t, rho) - apply(t2, rho))) <= 1e-10


def test_mix_permutation_reorders():
    t = pauli([0.4, 0.3, 0.2, 0.1])
    perm = np.eye(4)[[2, 0, 3, 1]]
    t2 = mix_kraus(t, perm)
    assert np.array_equal(t2.kraus, t.kraus[[2, 0, 3, 1]])
    assert np.max(np.abs(purity_hamiltonian(t).matrix - purity_hamiltonian(t2).matrix)) <= 1e-15


def test_mix_rejects_non_unitary():
    with pytest.raises(ChannelValidationError):
        mix_kraus(pauli([0.25] * 4), 2 * np.eye(4))


def test_named_pauli_identity():
    t = build_named_channel({"family": "pauli", "params": {"p": [1, 0, 0, 0]}})
    assert t.num_kraus == 1
    assert np.array_equal(t.kraus[0], np.eye(2))


def test_named_projective_dephasing():
    t = build_named_channel(
        {"family": "projective", "params": {"projectors": [np.diag([1.0, 0]), np.diag([0, 1.0])]}}
    )
    assert validate(t) and is_unital(t)[0]
    out = apply(t, np.full((2, 2), 0.5))
    assert np.array_equal(out, np.eye(2) / 2)


def test_named_full_replacement():
    t = build_named_channel({"family": "partial_replacement", "params": {"d": 2, "p": 1}})
    rng = np.random.default_rng(3)
    for _ in range(5):
        out = apply(t, random_density(2, rng))
        assert np.max(np.abs(out - np.diag([1.0, 0]))) <= 1e-15


def test_replacement_p0_is_identity():
    t = partial_replacement(4, 0.0)
    assert t.num_kraus == 1
    assert np.array_equal(t.kraus[0], np.eye(4))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_replacement_trace_preserving(d, p):
    t = partial_replacement(d, p)
    total = sum(a.conj().T @ a for a in t.kraus)
    assert np.max(np.abs(total - np.eye(d))) <= 1e-15


def test_correlated_pauli2_structure():
    t = correlated_pauli2([0.4, 0.3, 0.2, 0.1])
    assert t.dim == 4 and validate(t) and is_unital(t)[0]
    assert np.allclose(t.kraus[3], np.sqrt(0.1) * np.kron(SZ, SZ))


@pytest.mark.parametrize(
    "descriptor",
    [
        {"family": "pauli", "params": {"p": [0.5, 0.5, 0.5, 0.0]}},
        {"family": "pauli", "params": {"p": [0.5, 0.5]}},
        {"family": "depolarizing", "params": {"p0": 1.5}},
        {"family": "projective", "params": {"projectors": [np.diag([1.0, 0])]}},
        {"family": "projective", "params": {"projectors": [np.diag([1.0, 0]), np.diag([1.0, 1.0])]}},
        {"family": "unitary_mixture", "params": {"probs": [1.0], "unitaries": [2 * np.eye(2)]}},
        {"family": "nonsense", "params": {}},
        {"family": "partial_replacement", "params": {"d": 2}},
    ],
)
def test_named_rejects_bad_parameters(descriptor):
    with pytest.raises(ChannelValidationError):
        build_named_channel(descriptor)


def test_probabilities_renormalized_within_rounding():
    t = pauli([0.25, 0.25, 0.25, 0.25 + 5e-10])
    assert validate(t, 1e-14)


def test_zero_kraus_dropped():
    t = unitary_mixture([1.0, 0.0], [np.eye(2), SX])
    assert t.num_kraus == 1


@settings(max_examples=20, deadline=None)
@given(seed=seeds, d=st.integers(2, 4))
def test_trace_preserved_and_duality(seed, d):
    rng = np.random.default_rng(seed)
    t = random_channel(d, 3, rng)
    assert validate(t)
    for _ in range(20):
        rho = random_density(d, rng)
        assert abs(np.trace(apply(t, rho)) - 1) <= 1e-10
    x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = random_density(d, rng)
    assert abs(np.trace(apply(t, rho) @ x) - np.trace(rho @ apply_dual(t, x))) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_mix_kraus_is_channel_equality(seed):
    rng = np.random.default_rng(seed)
    t = random_channel(3, 3, rng)
    t2 = mix_kraus(t, haar_random_unitary(3, rng))
    for _ in range(5):
        rho = random_density(3, rng)
        assert np.max(np.abs(apply(t, rho) - apply(t2, rho))) <= 1e-10


def test_random_unital_channel():
    t = random_unital_channel(3, 4, 0)
    assert validate(t) and is_unital(t)[0]


def test_pauli_matrices():
    for s in PAULIS[1:]:
        assert np.array_equal(s @ s, np.eye(2))
