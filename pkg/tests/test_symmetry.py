import numpy as np
import pytest

from asymdense import capacity, checks, qmat, symmetry
from asymdense.qmat import BipartiteLayout, Sampler


@pytest.mark.parametrize(
    "rep",
    [symmetry.weyl_heisenberg(2), symmetry.weyl_heisenberg(3), symmetry.diagonal_phases(3), symmetry.diagonal_phases(4, 2), symmetry.pauli_words(2)],
    ids=lambda r: r.name,
)
def test_finite_reps_validate(rep):
    rep.validate()


def test_single_qubit_clifford_has_24_elements():
    assert len(symmetry.single_qubit_clifford()) == 24


def test_tampered_table_detected():
    rep = symmetry.weyl_heisenberg(2)
    rep.table = rep.table.copy()
    rep.table[1, 1] = 2
    with pytest.raises(ValueError):
        rep.validate()


def test_missing_element_detected():
    rep = symmetry.pauli_words(1)
    rep.unitaries = rep.unitaries[:3] + [np.diag([1, 1j])]
    with pytest.raises(ValueError):
        rep.validate()


def test_tampered_blocks_detected():
    blocks = symmetry.casimir_su2_blocks(2)
    bad = symmetry.IsotypicDecomposition([blocks.projectors[0], np.eye(4) - blocks.projectors[0] + 0.01], blocks.labels, blocks.rep)
    assert checks.twirler_failures(bad)


@pytest.mark.parametrize("N,dims", [(1, [2]), (2, [3, 1]), (3, [4, 4]), (4, [5, 9, 2])])
def test_casimir_block_dims(N, dims):
    blocks = symmetry.casimir_su2_blocks(N)
    blocks.validate()
    assert blocks.dims == dims


@pytest.mark.parametrize(
    "rep,expected,commutant",
    [
        (symmetry.weyl_heisenberg(3), True, 1),
        (symmetry.diagonal_phases(3), True, 3),
        (symmetry.diagonal_phases(4, 2), False, 8),
        (symmetry.schur_group(3), True, 2),
        (symmetry.u2_tensor(3), False, 5),
        (symmetry.u2_tensor(2), True, 2),
    ],
    ids=lambda x: getattr(x, "name", str(x)),
)
def test_certificate(rep, expected, commutant):
    c = symmetry.multiplicity_free_check(rep, samples=10, sampler=Sampler(1))
    assert c.certificate is expected
    assert c.commutant_dim == commutant
    assert c.randomized_witness is expected


def test_require_multiplicity_free_raises():
    with pytest.raises(ValueError, match="not multiplicity-free"):
        symmetry.require_multiplicity_free(symmetry.u2_tensor(3))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_isotypic_dephasing(d):
    dec = symmetry.isotypic_decomposition(symmetry.diagonal_phases(d))
    dec.validate()
    assert sorted(dec.dims) == [1] * d


@pytest.mark.parametrize("N", [2, 3])
def test_compact_twirl_matches_design(N, sampler):
    # the Clifford group is a unitary 3-design, so its N-fold average agrees with Haar for N <= 3
    rho = sampler.random_density(2**N)
    exact = symmetry.twirl(symmetry.clifford_schur_subgroup(N), rho)
    assert np.abs(symmetry.twirl(symmetry.casimir_su2_blocks(N), rho) - exact).max() < 1e-10
    assert np.abs(symmetry.twirl(symmetry.schur_group(N), rho) - exact).max() < 1e-10


@pytest.mark.parametrize("d", [2, 3])
def test_weyl_heisenberg_depolarizes(d, sampler):
    rho = sampler.random_density(d)
    assert np.abs(symmetry.twirl(symmetry.weyl_heisenberg(d), rho) - np.eye(d) / d).max() < 1e-12


def test_twirl_dimension_mismatch():
    with pytest.raises(qmat.DimensionError):
        symmetry.twirl(symmetry.weyl_heisenberg(2), np.eye(3) / 3)


@pytest.mark.parametrize("tw", [symmetry.weyl_heisenberg(3), symmetry.diagonal_phases(3), symmetry.casimir_su2_blocks(3)])
def test_twirler_invariants(tw):
    assert checks.twirler_failures(tw, samples=5) == []


@pytest.mark.parametrize("dF", [2, 4])
def test_xi_assembles_to_twirled_state(dF, sampler):
    blocks = symmetry.casimir_su2_blocks(2)
    L = BipartiteLayout(4, dF)
    psi = sampler.random_pure(4 * dF)
    xi = symmetry.symmetric_decomposition(psi, blocks, L)
    expect = capacity.twirl_A(blocks, qmat.proj(psi), L)
    assert np.abs(xi.assemble() - expect).max() < 1e-10
    assert abs(xi.pk.sum() - 1) < 1e-12


def test_xi_omits_empty_blocks():
    blocks = symmetry.casimir_su2_blocks(2)
    v = np.zeros(16, dtype=complex)
    v[0] = 1  # |00>_A |0>_F lies in the triplet
    xi = symmetry.symmetric_decomposition(v, blocks, BipartiteLayout(4, 4))
    assert xi.labels == [0] and xi.omitted == [1]


def test_xi_tensor_weights(sampler):
    blocks = symmetry.casimir_su2_blocks(2)
    L = BipartiteLayout(4, 2)
    xi = symmetry.symmetric_decomposition(sampler.random_pure(8), blocks, L)
    x2 = xi.tensor(xi)
    assert np.abs(np.sort(x2.pk) - np.sort(np.outer(xi.pk, xi.pk).ravel())).max() < 1e-14
    assert x2.layout == BipartiteLayout(16, 4)


def test_channel_choi_conventions():
    tau = symmetry.transpose_channel(2)
    assert tau.is_tp and not tau.is_cp and tau.is_choi_ppt
    assert abs(np.linalg.eigvalsh(tau.choi_state).min() + 0.5) < 1e-12
    assert abs(np.trace(tau.choi_state) - 1) < 1e-12


@pytest.mark.parametrize("d", [2, 3])
def test_unitary_channel_apply(d, sampler):
    U = sampler.haar_unitary(d)
    rho = sampler.random_density(d)
    assert np.abs(symmetry.unitary_channel(U).apply(rho) - U @ rho @ U.conj().T).max() < 1e-12


def test_classify_pauli_x_under_weyl_heisenberg():
    c = symmetry.classify_encoder(symmetry.unitary_channel(symmetry.PAULI["X"]), symmetry.weyl_heisenberg(2))
    assert c.co1 and c.in_Eg and c.in_Ecp and c.in_Eppt is False


def test_classify_transpose_under_weyl_heisenberg():
    c = symmetry.classify_encoder(symmetry.transpose_channel(2), symmetry.weyl_heisenberg(2))
    assert c.co1 and not c.in_Ecp and c.in_Eppt and c.in_Ep_necessary


def test_classify_rejects_non_tp():
    E = symmetry.ChannelRep(0.5 * np.eye(4, dtype=complex))
    with pytest.raises(ValueError):
        symmetry.classify_encoder(E, symmetry.weyl_heisenberg(2))


@pytest.mark.parametrize("tw", [symmetry.diagonal_phases(2), symmetry.weyl_heisenberg(2)])
def test_twirl_channel_commutes_with_itself(tw):
    G = symmetry.twirl_channel(tw)
    assert symmetry.check_co1(G, tw)
    assert symmetry.check_co1(symmetry.identity_channel(2), tw)


def test_replacement_channel_breaks_co1():
    assert not symmetry.check_co1(symmetry.replacement_channel(np.diag([1.0, 0.0])), symmetry.weyl_heisenberg(2))


def test_build_rep_unknown():
    with pytest.raises(ValueError):
        symmetry.build_rep("nope")
