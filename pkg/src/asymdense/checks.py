"""Cross-module invariant suites used by ``asymdense verify``.

Each check returns ``(passed, detail)``; failures are reported, never raised.
"""

from __future__ import annotations

import time
from typing import Callable

import numpy as np

from . import capacity, entropy, oneshot, protocol, qmat, symmetry
from .qmat import BipartiteLayout, Sampler


def twirler_failures(twirler, samples: int = 20, sampler=None) -> list:
    """Structural and behavioural failures of a twirler (empty list when healthy)."""
    sampler = sampler or Sampler(5)
    fails = []
    if isinstance(twirler, symmetry.IsotypicDecomposition):
        try:
            twirler.validate()
        except ValueError as exc:
            fails.append(f"blocks: {exc}")
    else:
        try:
            twirler.validate()
        except ValueError as exc:
            fails.append(f"group: {exc}")
    d = symmetry.twirler_dim(twirler)
    gens = symmetry._generators(twirler) if not isinstance(twirler, symmetry.IsotypicDecomposition) or twirler.rep else []
    worst_idem = worst_sym = 0.0
    for _ in range(samples):
        rho = sampler.random_density(d)
        g = symmetry._twirl_linear(twirler, rho)
        worst_idem = max(worst_idem, np.abs(symmetry._twirl_linear(twirler, g) - g).max())
        for U in gens:
            worst_sym = max(worst_sym, np.abs(U @ g @ U.conj().T - g).max())
    if worst_idem > 1e-8:
        fails.append(f"idempotence residual {worst_idem:.3g}")
    if worst_sym > 1e-8:
        fails.append(f"symmetry residual {worst_sym:.3g}")
    return fails


def _bell_triple():
    L = BipartiteLayout(2, 2)
    r = capacity.capacity_report(qmat.bell_state(2), symmetry.weyl_heisenberg(2), L)
    got = (r.c_local, r.c_oneway, r.c_global)
    return max(abs(a - b) for a, b in zip(got, (0, 1, 2))) <= 1e-7, f"triple {got}"


def _coherence():
    s = Sampler(11)
    tw = symmetry.diagonal_phases(4)
    L = BipartiteLayout(4, 4)
    worst = 0.0
    for _ in range(10):
        r = capacity.capacity_report(s.random_pure(16), tw, L)
        worst = max(worst, abs(r.c_oneway - r.c_global))
    return worst <= 1e-6, f"max |c_oneway - c_global| = {worst:.3g}"


def _schur_ordering():
    rows = capacity.figure_series(range(1, 9), 0.25)
    ok = all(r["c_local"] < r["c_oneway"] < r["c_global"] for r in rows)
    return ok, "strict ordering for N = 1..8"


def _twirlers():
    fails = []
    for tw in (symmetry.weyl_heisenberg(3), symmetry.diagonal_phases(3), symmetry.casimir_su2_blocks(3)):
        fails += twirler_failures(tw)
    return not fails, "; ".join(fails) or "all twirlers idempotent and symmetric"


def _commuting_outputs():
    s = Sampler(12)
    worst = 0.0
    for tw in (symmetry.weyl_heisenberg(2), symmetry.diagonal_phases(3), symmetry.casimir_su2_blocks(2)):
        d = symmetry.twirler_dim(tw)
        for _ in range(20):
            a = symmetry.twirl(tw, s.random_density(d))
            b = symmetry.twirl(tw, s.random_density(d))
            worst = max(worst, np.abs(a @ b - b @ a).max())
    return worst <= 1e-8, f"max commutator {worst:.3g}"


def _data_processing():
    s = Sampler(13)
    worst = -np.inf
    for tw in (symmetry.weyl_heisenberg(2), symmetry.diagonal_phases(2)):
        for _ in range(20):
            r, q = s.random_density(2), s.random_density(2)
            gap = entropy.relative_entropy(symmetry.twirl(tw, r), symmetry.twirl(tw, q)).value - entropy.relative_entropy(r, q).value
            worst = max(worst, gap)
    return worst <= 1e-8, f"max D(G r||G s) - D(r||s) = {worst:.3g}"


def _tensorization():
    psi, L = capacity.schur_state(2, 0.25, "uniform")
    xi = symmetry.symmetric_decomposition(psi, symmetry.casimir_su2_blocks(2), L)
    x2 = xi.tensor(xi)
    worst = max(abs(oneshot.legendre(x2, 2 * R) - 2 * oneshot.legendre(xi, R)) for R in (-1.5, -0.5, 0.5))
    return worst <= 1e-7, f"max tensorization gap {worst:.3g}"


def _bell_code():
    wh = symmetry.weyl_heisenberg(2)
    h = protocol.make_hash(2, 2, Sampler(0))
    code = protocol.two_stage_protocol(qmat.bell_state(2), wh, BipartiteLayout(2, 2), h, wh, 2, [0, 2])
    return code.exact_error <= 1e-12, f"Bell/Pauli exact error {code.exact_error:.3g}"


def _transpose():
    rep = protocol.transpose_encoder_experiment(qmat.bell_state(2), symmetry.diagonal_phases(2), BipartiteLayout(2, 2), samples=200)
    ok = abs(rep["choi_min_eig"] + 0.5) <= 1e-9 and rep["min_product_value"] >= -1e-9
    return ok, f"choi min {rep['choi_min_eig']:.3g}, product min {rep['min_product_value']:.3g}"


def _monte_carlo():
    psi, L = capacity.schur_state(2, 0.25, "uniform")
    b = symmetry.casimir_su2_blocks(2)
    recs = protocol.simulate_random_codes(psi, b, L, b, 2, 2, range(100))
    err = np.array([r["exact_error"] for r in recs])
    bound = np.mean([r["bound"] for r in recs])
    lim = bound + 3 * err.std(ddof=1) / np.sqrt(len(err))
    return err.mean() <= lim, f"mean error {err.mean():.4f} vs bound {lim:.4f}"


def _pt_modulus_sweep():
    worst = 0.0
    for dims in ((2, 2), (2, 3), (3, 3)):
        worst = max(worst, protocol.pt_modulus_check(100, dims, "transposed")["residual"])
    return worst <= 1e-8, f"transposed-form residual {worst:.3g}"


FAST: list[tuple[str, Callable]] = [
    ("bell_purity_triple", _bell_triple),
    ("coherence_equality", _coherence),
    ("schur_ordering", _schur_ordering),
    ("twirler_invariants", _twirlers),
    ("twirled_outputs_commute", _commuting_outputs),
    ("data_processing", _data_processing),
    ("legendre_tensorization", _tensorization),
    ("bell_pauli_zero_error", _bell_code),
    ("transpose_witness", _transpose),
]
FULL = FAST + [("monte_carlo_bound", _monte_carlo), ("pt_modulus_transposed_sweep", _pt_modulus_sweep)]


def run_suite(name: str = "fast") -> list:
    suite = {"fast": FAST, "full": FULL}[name]
    out = []
    for label, fn in suite:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a failing check is reported, not raised
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append({"name": label, "passed": bool(ok), "detail": detail, "seconds": round(time.perf_counter() - t0, 3)})
    return out
