"""Acceptance gate: one test per criterion, each reported as a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the summary section lists every
criterion) or ``python3 tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest

from asymdense import capacity, entropy, oneshot, protocol, qmat, symmetry
from asymdense.qmat import BipartiteLayout, Sampler

H14 = 0.8112781244591328  # h(1/4) in bits


def _report(name, failures):
    line = f"{name}: {'PASS' if not failures else 'FAIL'}"
    print(line + "".join(f"\n  - {f}" for f in failures))
    assert not failures, "; ".join(failures)


def test_criterion_1_purity_triple():
    t0 = time.perf_counter()
    fails = []
    L = BipartiteLayout(2, 2)
    wh = symmetry.weyl_heisenberg(2)
    r = capacity.capacity_report(qmat.bell_state(2), wh, L)
    got = np.array([r.c_local, r.c_oneway, r.c_global])
    if np.abs(got - [0, 1, 2]).max() > 1e-7:
        fails.append(f"Bell triple {got}")
    psi = np.sqrt(0.75) * qmat.ket(0, 4) + np.sqrt(0.25) * qmat.ket(3, 4)
    r = capacity.capacity_report(psi, wh, L)
    got = np.array([r.c_local, r.c_oneway, r.c_global])
    if np.abs(got - [1 - H14, 1, 1 + H14]).max() > 1e-6:
        fails.append(f"partially entangled triple {got}")
    if time.perf_counter() - t0 > 1.0:
        fails.append("runtime above 1 s")
    _report("criterion 1 (purity triple)", fails)


def test_criterion_2_coherence():
    t0 = time.perf_counter()
    s = Sampler(2)
    tw = symmetry.diagonal_phases(4)
    L = BipartiteLayout(4, 4)
    gap_global = gap_local = 0.0
    for _ in range(50):
        psi = s.random_pure(16)
        r = capacity.capacity_report(psi, tw, L)
        rho = capacity.marginal_A(psi, L)
        expect = entropy.von_neumann(np.diag(np.diag(rho))).value - entropy.von_neumann(rho).value
        gap_global = max(gap_global, abs(r.c_oneway - r.c_global))
        gap_local = max(gap_local, abs(r.c_local - expect))
    fails = []
    if gap_global > 1e-6:
        fails.append(f"|c_oneway - c_global| = {gap_global:.3g}")
    if gap_local > 1e-6:
        fails.append(f"|c_local - (H(D(rho)) - H(rho))| = {gap_local:.3g}")
    if time.perf_counter() - t0 > 10.0:
        fails.append("runtime above 10 s")
    _report("criterion 2 (coherence equalities)", fails)


def test_criterion_3_schur_figure():
    t0 = time.perf_counter()
    rows = capacity.figure_series(range(1, 9), 0.25, "oracle")
    fails = [f"ordering broken at N={r['N']}" for r in rows if not r["c_local"] < r["c_oneway"] < r["c_global"]]
    n2 = rows[1]
    got = np.array([n2["c_local"], n2["c_oneway"], n2["c_global"]])
    if np.abs(got - [0.3614, 1.9840, 2.9104]).max() > 1e-3:
        fails.append(f"N=2 oracle values {got}")
    # the printed dimension factor is evaluated and its offset reported, not asserted
    printed = capacity.schur_example(2, 0.25, "printed")
    print(f"  printed-factor mode at N=2: c_oneway = {printed.c_oneway:.4f} (oracle {n2['c_oneway']:.4f})")
    if time.perf_counter() - t0 > 30.0:
        fails.append("runtime above 30 s")
    _report("criterion 3 (Schur figure)", fails)


CERT_CASES = [
    ("weyl_heisenberg d=2..4", [symmetry.weyl_heisenberg(d) for d in (2, 3, 4)], True),
    ("diagonal phases d=2..4", [symmetry.diagonal_phases(d) for d in (2, 3, 4)], True),
    ("casimir blocks N=1..4", [symmetry.casimir_su2_blocks(n) for n in (1, 2, 3, 4)], True),
    ("pauli words n=2", [symmetry.pauli_words(2)], True),
    ("U(2)-only on 2 qubits", [symmetry.u2_tensor(2)], False),
]


def test_criterion_4_multiplicity_free():
    fails = []
    for label, reps, expected in CERT_CASES:
        for rep in reps:
            c = symmetry.multiplicity_free_check(rep, samples=20, sampler=Sampler(4))
            if c.certificate != expected:
                fails.append(f"{label}: certificate {c.certificate} (commutant {c.commutant_dim}, blocks {c.block_count}), expected {expected}")
            if c.randomized_witness != c.certificate:
                fails.append(f"{label}: witness {c.randomized_witness} disagrees with certificate {c.certificate}")
    _report("criterion 4 (multiplicity-free biconditional)", fails)


def test_criterion_5_pt_modulus():
    fails = []
    s = Sampler(5)
    for dims, n in (((2, 2), 167), ((2, 3), 167), ((3, 3), 166)):
        states = [qmat.bell_state(2)] if dims == (2, 2) else []
        r = protocol.pt_modulus_check(n, dims, "literal", sampler=s.child(dims), states=states)
        if max(r["residual"], r["residual_rotated"]) > 1e-8:
            fails.append(f"dims {dims}: residual {r['residual']:.3g}, rotated {r['residual_rotated']:.3g}")
    _report("criterion 5 (partial-transpose modulus identity)", fails)


SIM_SCENARIOS = [
    ("bell d=2 T=2 M=2", "bell", 2, 2),
    ("schur N=2 T=2 M=2", "schur", 2, 2),
    ("schur N=2 T=2 M=4", "schur", 2, 4),
    ("schur N=2 T=1 M=8", "schur", 1, 8),
]


def _sim_setup(kind):
    if kind == "bell":
        wh = symmetry.weyl_heisenberg(2)
        return qmat.bell_state(2), symmetry.require_multiplicity_free(wh), BipartiteLayout(2, 2), wh
    psi, L = capacity.schur_state(2, 0.25, "uniform")
    b = symmetry.casimir_su2_blocks(2)
    return psi, b, L, b


def _simulations():
    out = []
    for label, kind, T, M in SIM_SCENARIOS:
        psi, blocks, L, group = _sim_setup(kind)
        recs = protocol.simulate_random_codes(psi, blocks, L, group, T, M, range(100))
        out.append((label, psi, L, group, M, recs))
    return out


def test_criterion_6_achievability():
    t0 = time.perf_counter()
    fails = []
    wh = symmetry.weyl_heisenberg(2)
    L = BipartiteLayout(2, 2)
    code = protocol.two_stage_protocol(qmat.bell_state(2), wh, L, protocol.make_hash(2, 2, Sampler(6)), wh, 2, [0, 2])
    cap = capacity.capacity_report(qmat.bell_state(2), wh, L).c_oneway
    if code.exact_error > 1e-12:
        fails.append(f"Bell/Pauli exact error {code.exact_error:.3g}")
    if abs(np.log2(code.M) - cap) > 1e-9:
        fails.append(f"rate {np.log2(code.M)} differs from capacity {cap}")
    for label, _, _, _, _, recs in _simulations():
        err = np.array([r["exact_error"] for r in recs])
        lim = np.mean([r["bound"] for r in recs]) + 3 * err.std(ddof=1) / np.sqrt(len(err))
        print(f"  {label}: mean error {err.mean():.4f}, bound + 3 sigma {lim:.4f}")
        if err.mean() > lim:
            fails.append(f"{label}: mean error {err.mean():.4f} above {lim:.4f}")
    if time.perf_counter() - t0 > 300.0:
        fails.append("runtime above 5 min")
    _report("criterion 6 (one-shot achievability)", fails)


def test_criterion_7_strong_converse():
    fails = []
    for label, psi, L, group, M, recs in _simulations():
        sym = symmetry.twirl(group, capacity.marginal_A(psi, L))
        for a in (1.1, 1.5, 1.9):
            bound = oneshot.strong_converse_success(sym, M, alpha=a).bound
            worst = max(1 - r["exact_error"] for r in recs)
            if worst > bound + 1e-9:
                fails.append(f"{label}, alpha={a}: success {worst:.4f} above bound {bound:.4f}")
    psi, L = capacity.schur_state(2, 0.25, "uniform")
    b = symmetry.casimir_su2_blocks(2)
    for label, sym in (("flat d=2", np.eye(2) / 2), ("schur N=2", symmetry.twirl(b, capacity.marginal_A(psi, L)))):
        rows = oneshot.converse_decay(sym, 0.2, [5, 10, 20])
        b5, b10, b20 = (r["bound"] for r in rows)
        print(f"  {label}: bound at n=5,10,20 = {b5:.4f}, {b10:.4f}, {b20:.4f}")
        if not (b10 / b5 < 1 and b20 / b10 < 1 and abs(np.log(b20 / b10) / 10 - np.log(b10 / b5) / 5) < 1e-9):
            fails.append(f"{label}: decay not geometric")
        if b20 > 0.2:
            fails.append(f"{label}: bound at n=20 is {b20:.4f} > 0.2")
    _report("criterion 7 (strong converse)", fails)


def _random_xi(s):
    kind = s.rng.integers(3)
    if kind == 0:
        blocks, L = symmetry.casimir_su2_blocks(2), BipartiteLayout(4, int(s.rng.integers(2, 5)))
    elif kind == 1:
        blocks, L = symmetry.require_multiplicity_free(symmetry.diagonal_phases(3)), BipartiteLayout(3, int(s.rng.integers(2, 4)))
    else:
        blocks, L = symmetry.casimir_su2_blocks(3), BipartiteLayout(8, 2)
    return symmetry.symmetric_decomposition(s.random_pure(L.dim), blocks, L)


def test_criterion_8_legendre():
    fails = []
    s = Sampler(8)
    worst = 0.0
    for _ in range(20):
        xi = _random_xi(s)
        x2 = xi.tensor(xi)
        for R in s.rng.uniform(-3, 1, size=3):
            worst = max(worst, abs(oneshot.legendre(x2, 2 * R) - 2 * oneshot.legendre(xi, R)))
    if worst > 1e-7:
        fails.append(f"tensorization gap {worst:.3g}")
    psi, L = capacity.schur_state(2, 0.25, "uniform")
    xi = symmetry.symmetric_decomposition(psi, symmetry.casimir_su2_blocks(2), L)
    tab = oneshot.second_order_check(xi, [100, 1000])
    scaled = [abs(r.scaled_residual) for r in tab.rows]
    print(f"  |residual| * sqrt(n) at n=100, 1000: {scaled}")
    if tab.skipped or not scaled[1] <= scaled[0]:
        fails.append(f"second-order residual trend {scaled}")
    _report("criterion 8 (Legendre machinery)", fails)


def test_criterion_9_transpose_witness():
    fails = []
    L = BipartiteLayout(2, 2)
    tw = symmetry.diagonal_phases(2)
    tau = symmetry.transpose_channel(2)
    if not symmetry.check_co1(tau, tw):
        fails.append("transpose does not pass check_co1")
    r = protocol.transpose_encoder_experiment(qmat.bell_state(2), tw, L, samples=1000, sampler=Sampler(9))
    if r["is_cp"]:
        fails.append("transpose reported CP")
    if abs(r["choi_min_eig"] + 0.5) > 1e-9:
        fails.append(f"Choi min eigenvalue {r['choi_min_eig']}")
    if abs(r["output_min_eig"] + 0.5) > 1e-9:
        fails.append(f"output min eigenvalue {r['output_min_eig']}")
    if r["min_product_value"] < -1e-9:
        fails.append(f"product value {r['min_product_value']}")
    _report("criterion 9 (super-quantum encoder witness)", fails)


def test_criterion_10_assistance_sandwich():
    fails = []
    s = Sampler(10)
    twirlers = [symmetry.diagonal_phases(2), symmetry.diagonal_phases(3), symmetry.weyl_heisenberg(3), symmetry.casimir_su2_blocks(2)]
    for i in range(100):
        tw = twirlers[i % len(twirlers)]
        rho = s.random_density(symmetry.twirler_dim(tw), rank=int(s.rng.integers(1, 3)))
        try:
            b = entropy.assistance_bounds(rho, tw, budget=20, sampler=s)
        except RuntimeError as exc:
            fails.append(f"pair {i}: {exc}")
            continue
        if b.lower.value > b.upper.value + 1e-9:
            fails.append(f"pair {i}: lower {b.lower.value} above upper {b.upper.value}")
    for d in (2, 3, 4):
        b = entropy.assistance_bounds(s.random_density(d), symmetry.weyl_heisenberg(d), budget=20, sampler=s)
        if abs(b.lower.value - b.upper.value) > 1e-6:
            fails.append(f"depolarizing d={d}: lower {b.lower.value} vs upper {b.upper.value}")
    _report("criterion 10 (assistance sandwich)", fails)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
