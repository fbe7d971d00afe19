"""Explicit one-way LOCC dense coding codes and their exact decoding error.

The construction has two stages.  Fred first measures a hash partition
``{Pi^{f,t}}`` of his register and announces ``t``.  On the post-measurement
state ``L^{-1/2} sum_l psi_l (x) |l>`` he then measures the Fourier basis
and announces ``l``.  Alice encodes with a group unitary ``U_g`` and Bob
decodes with a square-root measurement that depends on ``(t, l)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import qmat
from .qmat import BipartiteLayout, PSD_TOL, Sampler
from .symmetry import (
    IsotypicDecomposition,
    Twirler,
    UnitaryRep,
    check_co1,
    require_multiplicity_free,
    transpose_channel,
    twirl,
)

S_GRID = (np.arange(64) + 0.5) / 64


# ---------------------------------------------------------------------------
# hashing


def _prime_power(n: int) -> Optional[tuple[int, int]]:
    if n < 2:
        return None
    p = next(q for q in range(2, n + 1) if n % q == 0)
    a, m = 0, n
    while m % p == 0:
        m //= p
        a += 1
    return (p, a) if m == 1 else None


def _rank_mod_p(A: np.ndarray, p: int) -> int:
    A = A.copy() % p
    rank, rows, cols = 0, A.shape[0], A.shape[1]
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r, c]), None)
        if piv is None:
            continue
        A[[rank, piv]] = A[[piv, rank]]
        A[rank] = (A[rank] * pow(int(A[rank, c]), -1, p)) % p
        for r in range(rows):
            if r != rank and A[r, c]:
                A[r] = (A[r] - A[r, c] * A[rank]) % p
        rank += 1
    return rank


@dataclass
class HashPartition:
    N: int
    T: int
    table: np.ndarray
    family: str

    @property
    def L(self) -> int:
        return self.N // self.T

    def fiber(self, t: int) -> np.ndarray:
        return np.flatnonzero(self.table == t)

    def projector(self, t: int) -> np.ndarray:
        return np.diag((self.table == t).astype(complex))

    def validate(self) -> None:
        counts = np.bincount(self.table, minlength=self.T)
        if len(counts) != self.T or np.any(counts != self.L):
            raise ValueError(f"hash fibers are not balanced: {counts.tolist()}")


def make_hash(N: int, T: int, sampler: Sampler, family: str = "auto") -> HashPartition:
    """Draw a surjective hash ``{0..N-1} -> {0..T-1}`` with fibers of size ``N / T``.

    ``affine``: ``x -> A x + c`` over ``F_p`` with ``A`` of full rank (needs
    ``N``, ``T`` powers of one prime).  ``balanced``: a uniformly random
    balanced function, ``x -> pi(x) mod T`` for a random permutation ``pi``.
    Both families are 2-universal.
    """
    if T < 1 or N % T:
        raise ValueError(f"T={T} must divide N={N}")
    pn, pt = _prime_power(N), _prime_power(T)
    if family == "auto":
        family = "affine" if T == 1 or (pn and pt and pn[0] == pt[0]) else "balanced"
    if family == "affine" and T > 1:
        if not (pn and pt and pn[0] == pt[0]):
            raise ValueError("affine hashing needs N and T to be powers of the same prime")
        p, a = pn
        b = pt[1]
        while True:
            A = sampler.rng.integers(0, p, size=(b, a))
            if _rank_mod_p(A, p) == b:
                break
        c = sampler.rng.integers(0, p, size=b)
        digits = np.array([[(x // p**i) % p for i in range(a)] for x in range(N)])
        img = (digits @ A.T + c) % p
        table = img @ (p ** np.arange(b))
    elif family == "affine":
        table = np.zeros(N, dtype=int)
    elif family == "balanced":
        table = sampler.rng.permutation(N) % T
    else:
        raise ValueError(f"unknown hash family {family!r}")
    h = HashPartition(N, T, np.asarray(table, dtype=int), family)
    h.validate()
    return h


def collision_rate(N: int, T: int, family: str, samples: int, sampler: Sampler) -> tuple[float, float]:
    """Empirical ``Pr[f(x) = f(y)]`` for fresh hashes and random ``x != y``, with its standard error."""
    hits = 0
    for i in range(samples):
        h = make_hash(N, T, sampler, family)
        x, y = sampler.rng.choice(N, size=2, replace=False)
        hits += int(h.table[x] == h.table[y])
    p = hits / samples
    return p, float(np.sqrt(max(p * (1 - p), 1e-12) / samples))


# ---------------------------------------------------------------------------
# Lemma instance


@dataclass
class LemmaInstance:
    psi_l: list
    blocks: IsotypicDecomposition
    assignment: list
    Q: list
    delta: float
    sigma_bar: np.ndarray

    @property
    def L(self) -> int:
        return len(self.psi_l)

    def state(self) -> np.ndarray:
        """``L^{-1/2} sum_l psi_l (x) |l>`` as a vector on ``A (x) F``."""
        return np.stack(self.psi_l, axis=1).reshape(-1) / np.sqrt(self.L)


def block_masses(psi_l: Sequence[np.ndarray], blocks: IsotypicDecomposition) -> np.ndarray:
    """``m[l, k] = <psi_l|P_k|psi_l>``."""
    return np.array([[np.vdot(v, P @ v).real for P in blocks.projectors] for v in psi_l])


def greedy_assignment(psi_l, blocks) -> list:
    """Give each block to the ``l`` with the largest mass (ties to the smallest ``l``); optimal for delta."""
    m = block_masses(psi_l, blocks)
    owner = np.argmax(m, axis=0)
    return [set(np.flatnonzero(owner == l).tolist()) for l in range(len(psi_l))]


def exhaustive_delta(psi_l, blocks) -> float:
    """Smallest delta over every map from blocks to conditional indices."""
    m = block_masses(psi_l, blocks)
    L, K = m.shape
    best = np.inf
    for owner in itertools.product(range(L), repeat=K):
        kept = sum(m[owner[k], k] for k in range(K))
        best = min(best, 1 - kept / L)
    return float(best)


def build_lemma_instance(psi, blocks: IsotypicDecomposition, layout: BipartiteLayout, rule="greedy") -> LemmaInstance:
    """Lemma data for ``Psi = L^{-1/2} sum_l psi_l (x) |l>`` with ``L = dimF``.

    ``rule`` is ``"greedy"`` or an explicit list of disjoint block-index sets.
    """
    blocks = require_multiplicity_free(blocks)
    psi = qmat.check_pure(psi)
    if layout.dimA != blocks.ambient_dim or psi.size != layout.dim:
        raise qmat.DimensionError("state, layout and blocks disagree on dimensions")
    L = layout.dimF
    M = psi.reshape(layout.dimA, L)
    psi_l = [np.sqrt(L) * M[:, l] for l in range(L)]
    if isinstance(rule, str):
        if rule != "greedy":
            raise ValueError(f"unknown partition rule {rule!r}")
        assignment = greedy_assignment(psi_l, blocks)
    else:
        assignment = [set(s) for s in rule]
        if len(assignment) != L:
            raise ValueError("explicit rule needs one block set per conditional index")
        seen = set()
        for s in assignment:
            if seen & s:
                raise ValueError("explicit block sets overlap")
            seen |= s
    dA = layout.dimA
    Q = [sum((blocks.projectors[k] for k in s), np.zeros((dA, dA), dtype=complex)) for s in assignment]
    kept = sum(np.vdot(v, q @ v).real for v, q in zip(psi_l, Q)) / L
    sigma = sum(q @ twirl(blocks, qmat.proj(v)) @ q for v, q in zip(psi_l, Q)) / L
    return LemmaInstance(psi_l, blocks, assignment, Q, float(1 - kept), sigma)


def fourier_measurement(L: int) -> list:
    """Rank-one projectors onto ``b^{l'} = L^{-1/2} sum_l zeta^{l l'} |l>``."""
    if L < 1:
        raise ValueError("L must be positive")
    n = np.arange(L)
    B = np.exp(2j * np.pi * np.outer(n, n) / L) / np.sqrt(L)
    return [qmat.proj(B[:, lp]) for lp in range(L)]


def lemma_bound(delta: float, sigma_bar: np.ndarray, M: int, s_grid=S_GRID) -> tuple[float, float]:
    """``min_s 8 M^s (1-delta)^{-s} tr sigma^{1+s} + 2 delta`` and the minimizing ``s``."""
    if delta >= 1:
        return np.inf, np.nan
    lam = np.clip(np.linalg.eigvalsh((sigma_bar + sigma_bar.conj().T) / 2), 0, None)
    lam = lam[lam > 1e-15]
    vals = [8 * (M / (1 - delta)) ** s * np.sum(lam ** (1 + s)) + 2 * delta for s in s_grid]
    i = int(np.argmin(vals))
    return float(vals[i]), float(s_grid[i])


# ---------------------------------------------------------------------------
# codes


@dataclass
class DenseCode:
    codewords: list
    codeword_ids: list
    fred_povm: list
    bob_decoders: dict
    exact_error: float
    bound: float
    delta: float
    details: list = field(default_factory=list)

    @property
    def M(self) -> int:
        return len(self.codewords)

    def validate(self, tol: float = 1e-8) -> None:
        d = self.fred_povm[0].shape[0]
        if np.abs(sum(self.fred_povm) - np.eye(d)).max() > tol:
            raise RuntimeError("Fred's POVM does not resolve the identity")
        for key, povm in self.bob_decoders.items():
            dB = povm[0].shape[0]
            if np.abs(sum(povm) - np.eye(dB)).max() > tol:
                raise RuntimeError(f"decoder {key} does not resolve the identity")
            for E in povm:
                if np.linalg.eigvalsh((E + E.conj().T) / 2).min() < -PSD_TOL:
                    raise RuntimeError(f"decoder {key} has a non-PSD element")
        if not -1e-12 <= self.exact_error <= 1 + 1e-12:
            raise RuntimeError(f"error {self.exact_error} outside [0, 1]")


def pretty_good_measurement(states: Sequence[np.ndarray]) -> list:
    """Square-root measurement for pure states, plus an abort element on the kernel of their sum."""
    d = states[0].shape[0]
    omegas = [qmat.proj(v) for v in states]
    S = sum(omegas)
    if len(states) == 1:
        return [np.eye(d, dtype=complex), np.zeros((d, d), dtype=complex)]
    if np.abs(S).max() < 1e-14:
        return [np.zeros((d, d), dtype=complex) for _ in states] + [np.eye(d, dtype=complex)]
    R = qmat.matrix_power(S, -0.5)
    povm = [R @ w @ R for w in omegas]
    abort = np.eye(d) - sum(povm)
    return povm + [(abort + abort.conj().T) / 2]


def _rep_of(group: Twirler) -> UnitaryRep:
    rep = group.rep if isinstance(group, IsotypicDecomposition) else group
    if rep is None:
        raise ValueError("codewords need a group representation")
    return rep


def draw_codewords(group: Twirler, M: int, rule, sampler: Optional[Sampler] = None) -> tuple[list, list]:
    """``rule`` is ``"random"`` (independent uniform draws) or an explicit list of indices or unitaries."""
    rep = _rep_of(group)
    if isinstance(rule, str):
        if rule != "random":
            raise ValueError(f"unknown codeword rule {rule!r}")
        sampler = sampler or Sampler(0)
        if rep.finite:
            ids = sampler.rng.integers(len(rep.unitaries), size=M).tolist()
            return [rep.unitaries[i] for i in ids], ids
        return [rep.sample(sampler) for _ in range(M)], [None] * M
    items = list(rule)
    if len(items) != M:
        raise ValueError(f"explicit codeword list has {len(items)} entries, expected M={M}")
    if all(isinstance(x, (int, np.integer)) for x in items):
        if len(set(items)) != len(items):
            raise ValueError("explicit codewords must not repeat")
        return [rep.unitaries[i] for i in items], [int(i) for i in items]
    return [np.asarray(U, dtype=complex) for U in items], [None] * M


def _decode_branches(branches, codewords, M):
    """Decoders and exact error for Fred outcomes with (unprojected, projected) conditional vectors."""
    decoders, err = {}, 0.0
    for key, chi, phi in branches:
        nphi = np.linalg.norm(phi)
        if M == 1:
            povm = pretty_good_measurement([chi])
        elif nphi < 1e-12:
            d = chi.shape[0]
            povm = [np.zeros((d, d), dtype=complex)] * M + [np.eye(d, dtype=complex)]
        else:
            povm = pretty_good_measurement([U @ (phi / nphi) for U in codewords])
        decoders[key] = povm
        for m, U in enumerate(codewords):
            v = U @ chi
            err += (np.vdot(v, v) - np.vdot(v, povm[m] @ v)).real / M
    return decoders, float(min(max(err, 0.0), 1.0))


def lemma_branches(inst: LemmaInstance, prefix=()) -> list:
    """Fourier outcomes ``l'``: ``chi = <b^{l'}|Psi>`` and its projected part ``phi``."""
    L = inst.L
    n = np.arange(L)
    zeta = np.exp(-2j * np.pi * np.outer(n, n) / L)  # zeta^{-l l'}
    out = []
    for lp in range(L):
        chi = sum(zeta[l, lp] * inst.psi_l[l] for l in range(L)) / L
        phi = sum(zeta[l, lp] * (inst.Q[l] @ inst.psi_l[l]) for l in range(L)) / L
        out.append((prefix + (lp,), chi, phi))
    return out


def build_code(inst: LemmaInstance, group: Twirler, M: int, codeword_rule="random", sampler: Optional[Sampler] = None, s_grid=S_GRID) -> DenseCode:
    """One-way LOCC code for a single Lemma instance; ``M = 1`` uses the trivial decoder."""
    if inst.delta >= 1 - 1e-12:
        raise ValueError("degenerate instance: delta = 1")
    codewords, ids = draw_codewords(group, M, codeword_rule, sampler)
    decoders, err = _decode_branches(lemma_branches(inst), codewords, M)
    bound, s = lemma_bound(inst.delta, inst.sigma_bar, M, s_grid)
    code = DenseCode(codewords, ids, fourier_measurement(inst.L), decoders, err, bound, inst.delta, [{"s": s}])
    code.validate()
    return code


def two_stage_protocol(
    psi,
    blocks: IsotypicDecomposition,
    layout: BipartiteLayout,
    hash_partition: HashPartition,
    group: Twirler,
    M: int,
    codeword_rule="random",
    sampler: Optional[Sampler] = None,
    s_grid=S_GRID,
) -> DenseCode:
    """Hash measurement, then per-outcome Lemma protocol; the error is the outcome average.

    Codewords are shared across hash outcomes since Alice does not learn
    ``t``; Bob's decoder depends on Fred's message ``(t, l)``.
    """
    psi = qmat.check_pure(psi)
    h = hash_partition
    if h.N != layout.dimF:
        raise qmat.DimensionError("hash alphabet must match the F dimension")
    blocks = require_multiplicity_free(blocks)
    sampler = sampler or Sampler(0)
    codewords, ids = draw_codewords(group, M, codeword_rule, sampler.child("codewords"))
    Mat = psi.reshape(layout.dimA, layout.dimF)
    L = h.L
    n = np.arange(L)
    B = np.exp(2j * np.pi * np.outer(n, n) / L) / np.sqrt(L)
    fred, branches, details = [], [], []
    bound = delta = 0.0
    for t in range(h.T):
        fib = h.fiber(t)
        sub = Mat[:, fib]
        p_t = float(np.vdot(sub, sub).real)
        for lp in range(L):
            vec = np.zeros(h.N, dtype=complex)
            vec[fib] = B[:, lp]
            fred.append(qmat.proj(vec))
        if p_t < 1e-14:
            details.append({"t": t, "p_t": p_t})
            continue
        post = (sub / np.sqrt(p_t)).reshape(-1)
        inst = build_lemma_instance(post, blocks, BipartiteLayout(layout.dimA, L))
        for key, chi, phi in lemma_branches(inst, (t,)):
            branches.append((key, np.sqrt(p_t) * chi, phi))
        b_t, s_t = lemma_bound(inst.delta, inst.sigma_bar, M, s_grid)
        bound += p_t * b_t
        delta += p_t * inst.delta
        details.append({"t": t, "p_t": p_t, "delta": inst.delta, "bound": b_t, "s": s_t, "blocks": [sorted(s) for s in inst.assignment]})
    decoders, err = _decode_branches(branches, codewords, M)
    code = DenseCode(codewords, ids, fred, decoders, err, bound, delta, details)
    code.validate()
    return code


def simulate_random_codes(psi, blocks, layout: BipartiteLayout, group: Twirler, T: int, M: int, seeds: Sequence[int], base_seed: int = 0) -> list:
    """Per-seed records ``{seed, exact_error, bound, delta}`` for random hashes and codebooks."""
    root = Sampler(base_seed)
    out = []
    for seed in seeds:
        s = root.child(("simulate", int(seed)))
        h = make_hash(layout.dimF, T, s.child("hash"))
        code = two_stage_protocol(psi, blocks, layout, h, group, M, "random", s)
        out.append({"seed": int(seed), "exact_error": code.exact_error, "bound": code.bound, "delta": code.delta})
    return out


# ---------------------------------------------------------------------------
# transpose encoder and the partial-transpose modulus identity


def _transpose_A(X, layout: BipartiteLayout, V) -> np.ndarray:
    W = np.kron(V, np.eye(layout.dimF))
    return W @ qmat.partial_transpose(W.conj().T @ X @ W, layout, "A") @ W.conj().T


def random_effect(d: int, sampler: Sampler) -> np.ndarray:
    """Random POVM element ``0 <= E <= I``."""
    H = sampler.random_density(d, rank=int(sampler.rng.integers(1, d + 1)))
    return H / np.linalg.eigvalsh(H).max() * sampler.rng.uniform(0.2, 1.0)


def transpose_encoder_experiment(psi, twirler: Twirler, layout: BipartiteLayout, basis=None, samples: int = 1000, sampler: Optional[Sampler] = None) -> dict:
    """Transpose encoder on A: symmetry preserving, not CP, yet nonnegative on product effects."""
    psi = qmat.check_pure(psi)
    dA = layout.dimA
    V = np.eye(dA, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    tau = transpose_channel(dA, V)
    if not check_co1(tau, twirler):
        raise ValueError("transpose basis does not leave the twirled states invariant")
    choi_min = float(np.linalg.eigvalsh(tau.choi_state).min())
    out = _transpose_A(qmat.proj(psi), layout, V)
    out_min = float(np.linalg.eigvalsh((out + out.conj().T) / 2).min())
    sampler = sampler or Sampler(0)
    vals = []
    for _ in range(samples):
        P = random_effect(dA, sampler)
        Q = random_effect(layout.dimF, sampler)
        vals.append(np.trace(np.kron(P, Q) @ out).real)
    return {
        "co1": True,
        "choi_min_eig": choi_min,
        "is_cp": bool(tau.is_cp),
        "output_min_eig": out_min,
        "min_product_value": float(min(vals)),
        "samples": samples,
    }


def pt_modulus_check(
    samples: int,
    dims: Sequence[int],
    convention: str = "literal",
    sampler: Optional[Sampler] = None,
    rotate: bool = True,
    states: Sequence = (),
) -> dict:
    """Residual of ``|tau_F(X)| = sqrt(tr_F X) (x) sqrt(tr_A X)`` over random rank-one ``X``.

    ``literal`` uses the right-hand side as written; ``transposed`` uses
    ``sqrt(tr_A X)^T`` (transpose in the same basis as ``tau_F``), which is
    the form that holds for complex ``X``.  With ``rotate`` the check is
    repeated with the transpose taken in a Haar-random basis of F.
    Vectors in ``states`` are checked in addition to the random samples.
    """
    if convention not in ("literal", "transposed"):
        raise ValueError(f"unknown convention {convention!r}")
    dA, dF = dims
    layout = BipartiteLayout(dA, dF)
    sampler = sampler or Sampler(0)
    V = sampler.haar_unitary(dF) if rotate else None

    def residual(X, basis):
        W = np.kron(np.eye(dA), basis)
        lhs = qmat.operator_abs(W @ qmat.partial_transpose(W.conj().T @ X @ W, layout, "F") @ W.conj().T)
        rA = qmat.matrix_sqrt(qmat.partial_trace(X, layout, "A"))
        rF = qmat.matrix_sqrt(qmat.partial_trace(X, layout, "F"))
        if convention == "transposed":
            rF = basis @ (basis.conj().T @ rF @ basis).T @ basis.conj().T
        return float(np.abs(lhs - np.kron(rA, rF)).max())

    worst = worst_rot = 0.0
    vectors = [qmat.check_pure(v) for v in states] + [sampler.random_pure(dA * dF) for _ in range(samples)]
    for v in vectors:
        X = qmat.proj(v)
        worst = max(worst, residual(X, np.eye(dF)))
        if V is not None:
            worst_rot = max(worst_rot, residual(X, V))
    return {"dims": [dA, dF], "samples": samples, "convention": convention, "residual": worst, "residual_rotated": worst_rot}
