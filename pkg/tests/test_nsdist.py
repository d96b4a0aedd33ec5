import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from src.quantum.algebra import AlgebraSpec, random_state
from src.quantum.nsdist import (
    ATOM_COLUMNS,
    build_ns,
    ns_distributions,
    simultaneous_spectrum,
    support_defects_direct,
)

from .helpers import KET0, PLUS, QUBIT, WEIGHTED, make_state

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
rank_choices = st.sampled_from([None, [1, 2, 1], [2, 0, 1], [0, 3, 1], [1, 1, 0]])


def test_maximally_mixed_pair_is_diagonal():
    s = make_state(QUBIT, np.eye(2) * 0.5)
    ns = ns_distributions(QUBIT, s, s)
    assert_allclose(ns.fphi, 0.5)
    assert_allclose(ns.fomega, 0.5)
    assert_allclose(ns.nu.reshape(2, 2), np.eye(2), atol=1e-14)
    assert ns.marginal_sums() == pytest.approx((1.0, 1.0))


def test_pure_pair_atoms_and_defects(pure_pair):
    phi, omega = pure_pair
    ns = ns_distributions(QUBIT, phi, omega)
    assert len(ns.atoms) == 4
    assert_allclose(ns.overlap, 0.5, atol=1e-14)
    # P lives on the atoms where phi is 1, Q on those where omega is 1
    assert_allclose(ns.p_mass[ns.fphi > 0.5], [0.5, 0.5], atol=1e-14)
    assert_allclose(ns.q_mass[ns.fomega > 0.5], [0.5, 0.5], atol=1e-14)
    null = (ns.fphi == 0) & (ns.fomega == 0)
    assert null.sum() == 1
    assert np.all(ns.nu[null] == 0)
    assert ns.defect_phi_support == pytest.approx(0.5, abs=1e-12)
    assert ns.defect_omega_support == pytest.approx(0.5, abs=1e-12)


def test_full_matrix_algebra_matches_eigen_overlaps():
    spec = AlgebraSpec.from_pairs([(4, 1.0)])
    phi, omega = random_state(spec, 3), random_state(spec, 4)
    p, e = np.linalg.eigh(phi.h.blocks[0])
    q, f = np.linalg.eigh(omega.h.blocks[0])
    overlap = np.abs(e.conj().T @ f) ** 2
    ns = ns_distributions(spec, phi, omega)
    assert_allclose(ns.p_mass.reshape(4, 4), p[:, None] * overlap, atol=1e-12)
    assert_allclose(ns.q_mass.reshape(4, 4), q[None, :] * overlap, atol=1e-12)


def test_abelian_algebra_reduces_to_classical():
    spec = AlgebraSpec.from_pairs([(1, 0.5), (1, 2.0), (1, 1.0)])
    p = np.array([0.4, 0.3, 0.2])   # tau = sum t_k p_k = 1
    q = np.array([0.2, 0.1, 0.7])
    ns = ns_distributions(spec, make_state(spec, *[[[x]] for x in p]), make_state(spec, *[[[x]] for x in q]))
    assert_allclose(ns.nu, spec.weights)
    assert_allclose(ns.fphi, p, atol=1e-15)
    assert_allclose(ns.fomega, q, atol=1e-15)


def test_atoms_are_lexicographic(weighted):
    ns = ns_distributions(weighted, random_state(weighted, 1), random_state(weighted, 2))
    keys = list(zip(ns.block, ns.i, ns.j))
    assert keys == sorted(keys)
    assert len(keys) == sum(d * d for d in weighted.dims)
    frame = ns.to_frame()
    assert list(frame.columns) == ATOM_COLUMNS
    assert len(frame) == len(keys)


@settings(max_examples=40, deadline=None)
@given(seeds, rank_choices, rank_choices)
def test_ns_structure(seed, phi_ranks, omega_ranks):
    phi = random_state(WEIGHTED, seed, phi_ranks)
    omega = random_state(WEIGHTED, seed + 1, omega_ranks)
    sim = simultaneous_spectrum(WEIGHTED, phi, omega)
    ns = build_ns(WEIGHTED, sim)

    for blk in sim.blocks:
        assert_allclose(blk.overlap.sum(axis=0), 1.0, atol=1e-12)
        assert_allclose(blk.overlap.sum(axis=1), 1.0, atol=1e-12)

    p_sum, q_sum = ns.marginal_sums()
    assert p_sum == pytest.approx(1.0, abs=1e-10)
    assert q_sum == pytest.approx(1.0, abs=1e-10)
    assert np.all(ns.nu >= 0)
    assert np.all(ns.nu[(ns.fphi == 0) & (ns.fomega == 0)] == 0)

    # vanishing: Q puts no mass where f_omega = 0, exactly
    assert np.sum(ns.q_mass[ns.fomega == 0]) == 0.0

    direct = support_defects_direct(WEIGHTED, phi, omega)
    assert ns.defect_phi_support == pytest.approx(direct[0], abs=1e-9)
    assert ns.defect_omega_support == pytest.approx(direct[1], abs=1e-9)


def test_support_defects_direct_examples(pure_pair):
    s = make_state(QUBIT, np.diag([0.5, 0.5]))
    assert support_defects_direct(QUBIT, s, s) == (0.0, 0.0)

    phi, omega = pure_pair
    assert support_defects_direct(QUBIT, phi, omega) == pytest.approx((0.5, 0.5), abs=1e-12)

    pure = make_state(QUBIT, PLUS)
    defects = support_defects_direct(QUBIT, s, pure)
    assert defects[0] == 0.0
    assert defects[1] == pytest.approx(0.5, abs=1e-12)


def test_kernel_mass_of_rank_deficient_phi():
    phi = make_state(QUBIT, KET0)
    omega = make_state(QUBIT, np.diag([0.25, 0.75]))
    ns = ns_distributions(QUBIT, phi, omega)
    assert ns.defect_phi_support == pytest.approx(0.75, abs=1e-12)
    assert ns.defect_omega_support == 0.0
