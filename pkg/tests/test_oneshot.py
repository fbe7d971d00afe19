import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymdense import capacity, entropy, oneshot, qmat, symmetry
from asymdense.qmat import BipartiteLayout, Sampler


def _bell_xi():
    wh = symmetry.weyl_heisenberg(2)
    return symmetry.symmetric_decomposition(qmat.bell_state(2), symmetry.require_multiplicity_free(wh), BipartiteLayout(2, 2))


def _schur_xi():
    psi, L = capacity.schur_state(2, 0.25, "uniform")
    return symmetry.symmetric_decomposition(psi, symmetry.casimir_su2_blocks(2), L)


def _random_xi(seed):
    s = Sampler(seed)
    L = BipartiteLayout(4, 3)
    return symmetry.symmetric_decomposition(s.random_pure(12), symmetry.casimir_su2_blocks(2), L)


def _brute_legendre(xi, R):
    # independent path: matrix Renyi entropies of the F-dephased state on a dense s grid
    cq = entropy.xi_cq_matrix(xi)
    L = xi.layout
    rho_a = qmat.partial_trace(cq, L, "A")
    best = 0.0
    for s in np.linspace(1e-6, 1 - 1e-6, 1001):
        h_af = entropy.renyi_entropy(cq, 1 + s).value
        h_fa = entropy.conditional_renyi(cq, 1 - s, "F|A", L).value
        h_a = entropy.renyi_entropy(rho_a, 1 + s).value
        best = max(best, s * R + min(s * (h_af - h_fa), s * h_a))
    return best


@pytest.mark.parametrize("R", [-2.0, -1.0, -0.3, 0.5])
@pytest.mark.parametrize("make", [_bell_xi, _schur_xi], ids=["bell", "schur"])
def test_legendre_matches_brute_force(R, make):
    xi = make()
    assert abs(oneshot.legendre(xi, R) - _brute_legendre(xi, R)) < 1e-5


def test_legendre_nonnegative_and_monotone():
    xi = _schur_xi()
    vals = [oneshot.legendre(xi, R) for R in np.linspace(-4, 1, 11)]
    assert min(vals) >= 0
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01])
def test_bell_statement_rate(eps):
    # for Bell/WH both branches are s bits, so L(R) = max(0, R + 1) and the rate is 1 + log2(eps)
    assert abs(oneshot.oneshot_achievable_rate(_bell_xi(), eps, "statement") - (1 + np.log2(eps))) < 1e-6


def test_proof_variant_is_more_conservative():
    xi = _schur_xi()
    assert oneshot.oneshot_achievable_rate(xi, 0.1, "proof") < oneshot.oneshot_achievable_rate(xi, 0.1, "statement")


@pytest.mark.parametrize("bad", [dict(epsilon=0.0), dict(epsilon=1.0), dict(epsilon=0.1, variant="other")])
def test_rate_rejects(bad):
    with pytest.raises(ValueError):
        oneshot.oneshot_achievable_rate(_bell_xi(), **bad)


def test_inverse_zero_target():
    assert oneshot.legendre_inverse(_bell_xi(), 0.0) == -np.inf
    with pytest.raises(ValueError):
        oneshot.legendre_inverse(_bell_xi(), -1.0)


@pytest.mark.parametrize("target", [0.5, 2.0, 7.0])
def test_inverse_roundtrip(target):
    xi = _schur_xi()
    R = oneshot.legendre_inverse(xi, target)
    assert abs(oneshot.legendre(xi, R) - target) < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.floats(-3.0, 1.0))
def test_tensorization_property(seed, R):
    xi = _random_xi(seed)
    assert abs(oneshot.legendre(xi.tensor(xi), 2 * R) - 2 * oneshot.legendre(xi, R)) < 1e-7


def test_copies_equals_tensor_power():
    xi = _random_xi(1)
    assert abs(oneshot.legendre(xi, -1.4, copies=2) - oneshot.legendre(xi.tensor(xi), -1.4)) < 1e-9


@pytest.mark.parametrize("make", [_schur_xi, lambda: _random_xi(2)], ids=["schur", "random"])
def test_variance_matches_finite_differences(make):
    xi = make()
    t = oneshot.variance_terms(xi)
    c1, c2 = oneshot.finite_difference_curvatures(xi, h=1e-4)
    assert abs(-c1 - t["V_branch1"]) < 1e-2 * max(1, t["V_branch1"])
    assert abs(-c2 - t["V_branch2"]) < 1e-2 * max(1, t["V_branch2"])
    assert t["V_xi"] == max(t["V_branch1"], t["V_branch2"])


def test_second_order_skips_flat():
    tab = oneshot.second_order_check(_bell_xi(), [100])
    assert tab.skipped and not tab.rows


def test_second_order_trend():
    tab = oneshot.second_order_check(_schur_xi(), [100, 1000])
    r100, r1000 = tab.rows
    assert abs(r1000.scaled_residual) <= abs(r100.scaled_residual)
    assert abs(r1000.rate - r1000.approx) < abs(r100.rate - r100.approx)


def test_second_order_rejects_large_n():
    with pytest.raises(ValueError):
        oneshot.second_order_check(_schur_xi(), [2000])


def test_converse_flat_at_capacity():
    b = oneshot.strong_converse_success(np.eye(2) / 2, 2, alpha=1.5)
    assert abs(b.raw - 1) < 1e-12 and b.alpha == 1.5


@pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
def test_converse_formula(alpha):
    lam = np.array([0.6, 0.3, 0.1])
    h = entropy.renyi_entropy(np.diag(lam), 2 - alpha).value
    expect = min(1.0, 2 ** ((alpha - 1) / alpha * (h - np.log2(8))))
    assert abs(oneshot.strong_converse_success(lam, 8, alpha=alpha).bound - expect) < 1e-12


@pytest.mark.parametrize("alpha", [1.0, 2.0, 0.5])
def test_converse_alpha_range(alpha):
    with pytest.raises(ValueError):
        oneshot.strong_converse_success(np.eye(2) / 2, 2, alpha=alpha)


def test_converse_optimized_below_fixed():
    lam = np.array([0.75, 0.25])
    opt = oneshot.strong_converse_success(lam, 4).raw
    assert all(opt <= oneshot.strong_converse_success(lam, 4, alpha=a).raw + 1e-12 for a in (1.1, 1.5, 1.9))


def test_converse_decay_is_geometric():
    rows = oneshot.converse_decay(np.array([0.75, 0.25]), 0.2, [5, 10, 20])
    b = [r["bound"] for r in rows]
    assert b[2] < b[1] < b[0]
    assert abs(np.log(b[2] / b[1]) / 10 - np.log(b[1] / b[0]) / 5) < 1e-9


def test_local_converse():
    rho = np.diag([0.75, 0.25]).astype(complex)
    b = oneshot.local_strong_converse_success(rho, symmetry.weyl_heisenberg(2), 2, 1.5)
    div = entropy.sandwiched_renyi(rho, np.eye(2) / 2, 1.5).value
    assert abs(b.raw - 2 ** ((0.5 / 1.5) * (div - 1))) < 1e-12
    with pytest.raises(ValueError):
        oneshot.local_strong_converse_success(rho, symmetry.weyl_heisenberg(2), 2, 1.0)


def test_report_json():
    r = oneshot.OneShotReport(1.0, 0.5, "proof", 0.1, 0.2)
    js = r.to_json()
    assert js["variant"] == "proof" and js["alpha_star"] is None and type(js["R"]) is float
