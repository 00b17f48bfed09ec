import json

import numpy as np
import pytest

from squeezechain.errors import InvalidParameters, SizeTooLarge
from squeezechain.model import ModelParams, bogoliubov_frame, momentum_grid
from squeezechain.oracle import (annihilators, fermion_hamiltonian, fermion_parity_op, fock_evolve,
                                 fock_ground_state, fock_measure, majoranas, reference_values,
                                 spin_hamiltonian, write_fixture)

P8 = ModelParams(8, 0.8)


def test_fermion_algebra():
    c = annihilators(4)
    for i in range(4):
        for j in range(4):
            anti = c[i] @ c[j].T + c[j].T @ c[i]
            assert np.allclose(anti, np.eye(16) * (i == j))
            assert np.allclose(c[i] @ c[j] + c[j] @ c[i], 0)


def test_majorana_squares_to_identity():
    # A_l A_l = 1 as an operator, so its expectation is 1 in every state
    a, b = majoranas(6)
    state = fock_evolve(fock_ground_state(ModelParams(6, 0.8), 0.5), 1.5, 0.9)
    for l in range(6):
        assert np.allclose(a[l] @ a[l], np.eye(64))
        assert fock_measure(state, ("AA", l, l)) == pytest.approx(1.0)
        assert np.allclose(b[l] @ b[l], -np.eye(64))


def test_norm_and_energy_conserved():
    state = fock_ground_state(P8, 0.5)
    e0 = fock_measure(state, ("energy", 1.5)).real
    for t in (0.3, 2.0, 11.0):
        s = fock_evolve(state, 1.5, t)
        assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-12)
        assert fock_measure(s, ("energy", 1.5)).real == pytest.approx(e0, abs=1e-12)


@pytest.mark.parametrize("n, h", [(4, 0.5), (6, 1.7), (5, 0.9), (8, 1.0), (8, 0.3)])
def test_ground_energy_quasiparticle_sum(n, h):
    p = ModelParams(n, 0.8)
    state = fock_ground_state(p, h)
    grid = momentum_grid(p, antiperiodic=state.boundary_sign < 0)
    energy = -0.5 * bogoliubov_frame(p, h, grid).energy.sum()
    assert fock_measure(state, ("energy", h)).real == pytest.approx(energy, abs=1e-10)


def test_n2_large_field():
    p = ModelParams(2, 0.8)
    state = fock_ground_state(p, 1e4)
    assert fock_measure(state, ("energy", 1e4)).real == pytest.approx(-1e4, rel=1e-6)
    assert fock_measure(state, ("Jz",)).real == pytest.approx(1.0, abs=1e-6)


def test_null_quench_stationary():
    state = fock_ground_state(P8, 0.7)
    later = fock_evolve(state, 0.7, 7.3)
    for obs in [("AB", 0, 3), ("S", "x", 0, "x", 2), ("J", "y", "y"), ("Jz",)]:
        assert fock_measure(later, obs) == pytest.approx(fock_measure(state, obs), abs=1e-12)


@pytest.mark.parametrize("n", [4, 6, 8])
@pytest.mark.parametrize("h", [0.3, 1.0, 1.6])
def test_auto_state_is_spin_chain_eigenstate(n, h):
    p = ModelParams(n, 0.8)
    psi = fock_ground_state(p, h).amplitudes
    hs = spin_hamiltonian(p, h)
    e = np.vdot(psi, hs @ psi).real
    assert np.linalg.norm(hs @ psi - e * psi) < 1e-10
    # in the ferromagnet the two parity sectors are only split by O(exp(-N))
    assert e == pytest.approx(np.linalg.eigvalsh(hs)[0], abs=1e-2)


@pytest.mark.parametrize("h", [0.4, 1.5])
def test_auto_sector_parity(h):
    state = fock_ground_state(P8, h)
    parity = state.expect(fermion_parity_op(8))
    # periodic ring with odd fermion number, or antiperiodic with even
    assert parity.real == pytest.approx(-state.boundary_sign)


def test_boundary_choice_forced():
    assert fock_ground_state(P8, 1.5, "periodic").boundary_sign == 1
    assert fock_ground_state(P8, 0.5, "antiperiodic").boundary_sign == -1
    with pytest.raises(InvalidParameters):
        fock_ground_state(P8, 0.5, "open")


def test_hamiltonian_hermitian():
    for sign in (1, -1):
        ham = fermion_hamiltonian(ModelParams(5, 0.6), 0.7, sign)
        assert np.allclose(ham, ham.T)


def test_size_limit():
    with pytest.raises(SizeTooLarge):
        fock_ground_state(ModelParams(11, 0.8), 1.0)


def test_unknown_observable():
    with pytest.raises(InvalidParameters):
        fock_measure(fock_ground_state(ModelParams(4, 0.8), 1.0), ("XX", 0, 1))


def test_fixture_roundtrip(tmp_path):
    path = tmp_path / "ref.json"
    write_fixture(path, [(ModelParams(4, 0.8), 0.5, 1.5, 0.7)])
    rows = json.loads(path.read_text())
    assert rows[0]["fermions"] == "auto"
    assert rows[0]["xi2"] == pytest.approx(reference_values(ModelParams(4, 0.8), 0.5, 1.5, 0.7)["xi2"])
