"""Group representations, twirling channels and encoder classes.

A *twirler* is either a :class:`UnitaryRep` or an
:class:`IsotypicDecomposition`.  Finite groups are twirled by the group
average; compact groups are twirled in closed form, either through their
isotypic projectors or through the Hilbert-Schmidt projection onto the
commutant of a generating set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import expm

from . import qmat
from .qmat import BipartiteLayout, PSD_TOL, Sampler

# joint weights below this are treated as round-off (see XiState.joint_weights)
WEIGHT_TOL = 1e-15

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass
class UnitaryRep:
    """A (projective) unitary representation.

    For finite groups ``unitaries`` lists every group element.  For compact
    groups it lists a generating set and ``haar`` draws Haar-random elements.
    """

    name: str
    unitaries: list
    finite: bool = True
    projective: bool = False
    table: Optional[np.ndarray] = None
    haar: Optional[Callable[[Sampler], np.ndarray]] = None
    blocks: Optional["IsotypicDecomposition"] = None

    @property
    def dim(self) -> int:
        return self.unitaries[0].shape[0]

    @property
    def group_size(self):
        return len(self.unitaries) if self.finite else "closed-form-compact"

    def sample(self, sampler: Sampler) -> np.ndarray:
        if self.finite:
            return self.unitaries[int(sampler.rng.integers(len(self.unitaries)))]
        if self.haar is None:
            raise ValueError(f"representation {self.name!r} has no Haar sampler")
        return self.haar(sampler)

    def validate(self, tol: float = 1e-9) -> None:
        d = self.dim
        for U in self.unitaries:
            if np.abs(U @ U.conj().T - np.eye(d)).max() > 1e-10:
                raise ValueError(f"{self.name}: element is not unitary")
        if not self.finite:
            return
        if self.table is not None:
            for i, j in itertools.product(range(len(self.unitaries)), repeat=2):
                P = self.unitaries[i] @ self.unitaries[j]
                if not _equal_up_to_phase(P, self.unitaries[self.table[i, j]], tol, self.projective):
                    raise ValueError(f"{self.name}: multiplication table violated at ({i}, {j})")
            return
        keys = {_phase_key(U) for U in self.unitaries}
        for U, V in itertools.product(self.unitaries, repeat=2):
            if _phase_key(U @ V) not in keys:
                raise ValueError(f"{self.name}: set is not closed under multiplication")


def _phase_key(U: np.ndarray, decimals: int = 8):
    flat = U.ravel()
    i = int(np.argmax(np.abs(flat) > 1e-6))
    V = flat * (abs(flat[i]) / flat[i])
    V = np.round(V, decimals) + 0.0
    return V.real.tobytes() + V.imag.tobytes()


def _equal_up_to_phase(A, B, tol, projective) -> bool:
    if not projective:
        return np.abs(A - B).max() <= tol
    inner = np.vdot(B, A)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return np.abs(A - phase * B).max() <= tol


@dataclass
class IsotypicDecomposition:
    projectors: list
    labels: list
    rep: Optional[UnitaryRep] = None
    multiplicity_free: Optional[bool] = True

    @property
    def ambient_dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def dims(self) -> list:
        return [int(round(np.trace(P).real)) for P in self.projectors]

    def validate(self, tol: float = 1e-9) -> None:
        d = self.ambient_dim
        total = np.zeros((d, d), dtype=complex)
        for i, P in enumerate(self.projectors):
            if np.abs(P @ P - P).max() > tol or np.abs(P - P.conj().T).max() > tol:
                raise ValueError(f"block {self.labels[i]} is not an orthogonal projector")
            for Q in self.projectors[i + 1:]:
                if np.abs(P @ Q).max() > tol:
                    raise ValueError("block projectors are not mutually orthogonal")
            total += P
        if np.abs(total - np.eye(d)).max() > tol:
            raise ValueError("block projectors do not resolve the identity")
        if self.rep is not None:
            for U in self.rep.unitaries:
                for P in self.projectors:
                    if np.abs(P @ U - U @ P).max() > tol:
                        raise ValueError("block projector is not invariant under the group")


Twirler = Union[UnitaryRep, IsotypicDecomposition]


# ---------------------------------------------------------------------------
# representation builders


def weyl_heisenberg(d: int) -> UnitaryRep:
    if d < 2:
        raise ValueError("d must be at least 2")
    X = np.roll(np.eye(d), 1, axis=0).astype(complex)
    Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    els = [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) for a in range(d) for b in range(d)]
    idx = {(a, b): a * d + b for a in range(d) for b in range(d)}
    # X^a Z^b X^c Z^e = omega^{bc} X^{a+c} Z^{b+e}, so the table holds up to phase
    table = np.array(
        [[idx[((a + c) % d, (b + e) % d)] for c in range(d) for e in range(d)] for a in range(d) for b in range(d)]
    )
    return UnitaryRep(f"weyl_heisenberg({d})", els, finite=True, projective=True, table=table)


def diagonal_phases(d: int, levels: Optional[int] = None) -> UnitaryRep:
    """Cyclic group ``Z_levels`` acting as ``diag(w**(b*j))``; dephasing when ``levels >= d``."""
    levels = d if levels is None else levels
    if d < 2 or levels < 1:
        raise ValueError("need d >= 2 and levels >= 1")
    w = np.exp(2j * np.pi / levels)
    els = [np.diag(w ** (np.arange(d) * j)) for j in range(levels)]
    table = np.array([[(i + j) % levels for j in range(levels)] for i in range(levels)])
    return UnitaryRep(f"diagonal_phases({d},{levels})", els, finite=True, table=table)


def pauli_words(n: int) -> UnitaryRep:
    els = [qmat.tensor(*(PAULI[c] for c in word)) for word in itertools.product("IXYZ", repeat=n)]
    return UnitaryRep(f"pauli_words({n})", els, finite=True, projective=True)


def _total_spin(N: int) -> list:
    ops = []
    for name in "XYZ":
        S = np.zeros((2**N, 2**N), dtype=complex)
        for i in range(N):
            S += qmat.tensor(*(PAULI[name] if j == i else PAULI["I"] for j in range(N))) / 2
        ops.append(S)
    return ops


def permutation_unitary(perm: Sequence[int], d: int = 2) -> np.ndarray:
    """Unitary sending tensor factor ``i`` to position ``perm[i]``."""
    N = len(perm)
    D = d**N
    W = np.zeros((D, D))
    for idx in itertools.product(range(d), repeat=N):
        out = [0] * N
        for i, p in enumerate(perm):
            out[p] = idx[i]
        W[np.ravel_multi_index(out, (d,) * N), np.ravel_multi_index(idx, (d,) * N)] = 1
    return W.astype(complex)


def _random_permutation_unitary(N: int, sampler: Sampler) -> np.ndarray:
    return permutation_unitary(list(sampler.rng.permutation(N)))


def _su2_generators(N: int, theta: float = 0.7) -> list:
    return [qmat.tensor(*[expm(1j * theta * PAULI[a])] * N) for a in "XYZ"]


def u2_tensor(N: int) -> UnitaryRep:
    """``U -> U^{(x)N}`` on ``N`` qubits, without the permutation action."""
    gens = _su2_generators(N)
    return UnitaryRep(
        f"u2_tensor({N})",
        gens,
        finite=False,
        haar=lambda s: qmat.tensor(*[s.haar_unitary(2)] * N),
    )


def schur_group(N: int) -> UnitaryRep:
    """``U(2) x S(N)`` acting as ``W_pi U^{(x)N}``."""
    gens = _su2_generators(N) + [permutation_unitary([*range(i), i + 1, i, *range(i + 2, N)]) for i in range(N - 1)]

    def haar(s: Sampler) -> np.ndarray:
        return _random_permutation_unitary(N, s) @ qmat.tensor(*[s.haar_unitary(2)] * N)

    return UnitaryRep(f"u2_x_s{N}", gens, finite=False, haar=haar)


def single_qubit_clifford() -> list:
    H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    S = np.diag([1, 1j])
    group = {_phase_key(np.eye(2)): np.eye(2, dtype=complex)}
    frontier = [np.eye(2, dtype=complex)]
    while frontier:
        nxt = []
        for U in frontier:
            for g in (H, S):
                V = g @ U
                k = _phase_key(V)
                if k not in group:
                    group[k] = V
                    nxt.append(V)
        frontier = nxt
    return list(group.values())


def clifford_schur_subgroup(N: int) -> UnitaryRep:
    """Finite subgroup ``{W_pi C^{(x)N}}`` with ``C`` single-qubit Clifford (a unitary 3-design)."""
    cl = single_qubit_clifford()
    perms = [permutation_unitary(p) for p in itertools.permutations(range(N))]
    els = [W @ qmat.tensor(*[C] * N) for W in perms for C in cl]
    return UnitaryRep(f"clifford_schur({N})", els, finite=True, projective=True)


def casimir_su2_blocks(N: int) -> IsotypicDecomposition:
    """Total-spin isotypic blocks of ``N`` qubits (eigenspaces of the Casimir operator).

    Block ``k`` carries spin ``j = N/2 - k`` and has dimension
    ``(N + 1 - 2k) * (C(N, k) - C(N, k - 1))``.
    """
    if not 1 <= N <= 10:
        raise ValueError("casimir blocks supported for 1 <= N <= 10")
    Sx, Sy, Sz = _total_spin(N)
    C = (Sx @ Sx + Sy @ Sy + Sz @ Sz).real
    w, V = np.linalg.eigh(C)
    projectors, labels = [], []
    for k in range(N // 2 + 1):
        j = N / 2 - k
        cols = np.abs(w - j * (j + 1)) < 1e-6
        B = V[:, cols]
        projectors.append((B @ B.T).astype(complex))
        labels.append(k)
    rep = schur_group(N)
    dec = IsotypicDecomposition(projectors, labels, rep=rep, multiplicity_free=True)
    rep.blocks = dec
    return dec


def build_rep(kind: str, **params) -> Twirler:
    builders = {
        "weyl_heisenberg": lambda: weyl_heisenberg(params["d"]),
        "diagonal_phases": lambda: diagonal_phases(params["d"], params.get("levels")),
        "pauli_words": lambda: pauli_words(params["n"]),
        "casimir_su2_blocks": lambda: casimir_su2_blocks(params["N"]),
        "u2_tensor": lambda: u2_tensor(params["N"]),
        "clifford_schur": lambda: clifford_schur_subgroup(params["N"]),
    }
    if kind not in builders:
        raise ValueError(f"unsupported representation kind {kind!r}")
    return builders[kind]()


# ---------------------------------------------------------------------------
# commutant and multiplicity-free certificate


def null_space(A: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal null-space basis with an absolute singular-value cutoff."""
    _, s, Vh = np.linalg.svd(A)
    rank = int(np.sum(s > tol))
    return Vh[rank:].conj().T


def commutant_basis(unitaries: Sequence[np.ndarray], tol: float = 1e-9) -> list:
    """Orthonormal (Hilbert-Schmidt) basis of ``{X : [X, U] = 0 for all U}``."""
    d = unitaries[0].shape[0]
    Id = np.eye(d)
    # row-major vec: vec(UX) = (U (x) I) vec X, vec(XU) = (I (x) U^T) vec X
    A = np.vstack([np.kron(U, Id) - np.kron(Id, U.T) for U in unitaries])
    ns = null_space(A, tol)
    return [ns[:, i].reshape(d, d) for i in range(ns.shape[1])]


def _center_dim(basis: list, tol: float = 1e-9) -> int:
    if len(basis) <= 1:
        return len(basis)
    cols = []
    for C in basis:
        cols.append(np.concatenate([(C @ D - D @ C).ravel() for D in basis]))
    return null_space(np.array(cols).T, tol).shape[1]


def _generators(obj: Twirler) -> list:
    rep = obj.rep if isinstance(obj, IsotypicDecomposition) else obj
    if rep is None:
        raise ValueError("decomposition carries no representation")
    return rep.unitaries


@dataclass
class MultiplicityCertificate:
    certificate: bool
    commutant_dim: int
    block_count: int
    randomized_witness: Optional[bool] = None
    max_commutator: Optional[float] = None


def multiplicity_free_check(
    rep: Twirler, samples: int = 0, sampler: Optional[Sampler] = None
) -> MultiplicityCertificate:
    """Exact commutant-dimension certificate plus an optional randomized witness.

    The representation is multiplicity-free iff its commutant is abelian,
    i.e. the commutant dimension equals the number of isotypic blocks
    (the dimension of the commutant's center).  The witness checks that
    twirled random states commute pairwise.
    """
    basis = commutant_basis(_generators(rep))
    blocks = _center_dim(basis)
    cert = MultiplicityCertificate(len(basis) == blocks, len(basis), blocks)
    if samples:
        sampler = sampler or Sampler(0)
        d = basis[0].shape[0]
        worst = 0.0
        for _ in range(samples):
            a = _twirl_linear(rep, sampler.random_density(d), basis=basis)
            b = _twirl_linear(rep, sampler.random_density(d), basis=basis)
            worst = max(worst, np.abs(a @ b - b @ a).max())
        cert.randomized_witness = bool(worst <= 1e-8)
        cert.max_commutator = float(worst)
    return cert


def isotypic_decomposition(rep: UnitaryRep, sampler: Optional[Sampler] = None) -> IsotypicDecomposition:
    """Isotypic blocks of ``rep`` from the eigenspaces of a random central element."""
    basis = commutant_basis(rep.unitaries)
    cert_ok = len(basis) == _center_dim(basis)
    sampler = sampler or Sampler(12345)
    if cert_ok:
        central = basis
    else:
        cols = [np.concatenate([(C @ D - D @ C).ravel() for D in basis]) for C in basis]
        coeffs = null_space(np.array(cols).T)
        central = [sum(c * B for c, B in zip(coeffs[:, i], basis)) for i in range(coeffs.shape[1])]
    H = sum(sampler.rng.normal() * (C + C.conj().T) for C in central)
    H = H + sum(sampler.rng.normal() * 1j * (C - C.conj().T) for C in central)
    w, V = np.linalg.eigh((H + H.conj().T) / 2)
    projectors, labels, start = [], [], 0
    order = np.argsort(w)
    w, V = w[order], V[:, order]
    groups = np.split(np.arange(len(w)), np.where(np.diff(w) > 1e-6)[0] + 1)
    for i, g in enumerate(groups):
        B = V[:, g]
        projectors.append(B @ B.conj().T)
        labels.append(i)
    return IsotypicDecomposition(projectors, labels, rep=rep, multiplicity_free=cert_ok)


# ---------------------------------------------------------------------------
# twirling


def _commutant_projection(X, basis) -> np.ndarray:
    return sum(np.vdot(B, X) * B for B in basis)


def _twirl_linear(obj: Twirler, X: np.ndarray, basis=None) -> np.ndarray:
    if isinstance(obj, IsotypicDecomposition):
        if obj.multiplicity_free is False:
            raise ValueError("block-mode twirl requires a multiplicity-free decomposition")
        out = np.zeros_like(X, dtype=complex)
        for P, d in zip(obj.projectors, obj.dims):
            out += np.trace(P @ X) / d * P
        return out
    if obj.finite:
        U = np.asarray(obj.unitaries)
        return np.einsum("gij,jk,glk->il", U, X, U.conj()) / len(U)
    if obj.blocks is not None:
        return _twirl_linear(obj.blocks, X)
    basis = basis if basis is not None else commutant_basis(obj.unitaries)
    return _commutant_projection(X, basis)


def twirl(obj: Twirler, rho) -> np.ndarray:
    rho = qmat.as_matrix(rho)
    d = obj.ambient_dim if isinstance(obj, IsotypicDecomposition) else obj.dim
    if rho.shape[0] != d:
        raise qmat.DimensionError(f"state of dimension {rho.shape[0]} does not match twirler dimension {d}")
    return _twirl_linear(obj, rho)


def twirl_pure(obj: Twirler, v) -> np.ndarray:
    return twirl(obj, qmat.proj(v))


def twirler_dim(obj: Twirler) -> int:
    return obj.ambient_dim if isinstance(obj, IsotypicDecomposition) else obj.dim


def require_multiplicity_free(obj: Twirler) -> IsotypicDecomposition:
    """Return certified isotypic blocks, or raise if the twirler has multiplicities."""
    if isinstance(obj, IsotypicDecomposition):
        if obj.multiplicity_free is False:
            raise ValueError("twirler is not multiplicity-free")
        return obj
    if obj.blocks is not None:
        return obj.blocks
    cert = multiplicity_free_check(obj)
    if not cert.certificate:
        raise ValueError(
            f"{obj.name} is not multiplicity-free: commutant dimension {cert.commutant_dim}"
            f" exceeds block count {cert.block_count}"
        )
    obj.blocks = isotypic_decomposition(obj)
    return obj.blocks


# ---------------------------------------------------------------------------
# symmetric decomposition xi_AF


@dataclass
class XiState:
    """``xi_AF = sum_k P_K(k) pi_k (x) rho_{F,k}`` for a twirled pure state."""

    pk: np.ndarray
    block_dims: np.ndarray
    rho_F: list
    layout: Optional[BipartiteLayout] = None
    labels: list = field(default_factory=list)
    projectors: Optional[list] = None
    omitted: list = field(default_factory=list)

    def assemble(self) -> np.ndarray:
        if self.projectors is None:
            raise ValueError("assembly needs the block projectors")
        return sum(p * qmat.tensor(P / d, r) for p, P, d, r in zip(self.pk, self.projectors, self.block_dims, self.rho_F))

    def joint_weights(self) -> np.ndarray:
        """``w[n, k] = <n| P_K(k) rho_{F,k} |n>``: the F-dephased block masses.

        Round-off entries below ``WEIGHT_TOL`` are zeroed so that they do not
        count as support in Renyi sums with small exponents.
        """
        w = np.array([p * np.diag(r).real for p, r in zip(self.pk, self.rho_F)]).T
        w[w < WEIGHT_TOL] = 0.0
        return w

    def tensor(self, other: "XiState") -> "XiState":
        pk, dims, rhos, labels = [], [], [], []
        for (p1, d1, r1, l1), (p2, d2, r2, l2) in itertools.product(
            zip(self.pk, self.block_dims, self.rho_F, self.labels or range(len(self.pk))),
            zip(other.pk, other.block_dims, other.rho_F, other.labels or range(len(other.pk))),
        ):
            pk.append(p1 * p2)
            dims.append(d1 * d2)
            rhos.append(np.kron(r1, r2))
            labels.append((l1, l2))
        layout = None
        if self.layout and other.layout:
            layout = BipartiteLayout(self.layout.dimA * other.layout.dimA, self.layout.dimF * other.layout.dimF)
        return XiState(np.array(pk), np.array(dims), rhos, layout, labels)


def symmetric_decomposition(psi, blocks: IsotypicDecomposition, layout: BipartiteLayout) -> XiState:
    psi = qmat.check_pure(psi)
    if layout.dimA != blocks.ambient_dim or psi.size != layout.dim:
        raise qmat.DimensionError("state, layout and blocks disagree on dimensions")
    M = psi.reshape(layout.dimA, layout.dimF)
    pk, dims, rhos, labels, omitted, projs = [], [], [], [], [], []
    for P, d, lab in zip(blocks.projectors, blocks.dims, blocks.labels):
        v = P @ M  # (P_k (x) I)|psi> as a dimA x dimF matrix
        p = float(np.vdot(v, v).real)
        if p <= 1e-14:
            omitted.append(lab)
            continue
        rho = (v.T @ v.conj()) / p  # tr_A, F indices
        pk.append(p)
        dims.append(d)
        rhos.append(rho)
        labels.append(lab)
        projs.append(P)
    pk = np.array(pk)
    return XiState(pk / pk.sum(), np.array(dims), rhos, layout, labels, projs, omitted)


# ---------------------------------------------------------------------------
# channels and encoder classes


def _vec(X) -> np.ndarray:
    return np.asarray(X).reshape(-1)


@dataclass
class ChannelRep:
    superop: np.ndarray
    analytic_positive: Optional[bool] = None
    name: str = ""

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.superop.shape[0])))

    def apply(self, X) -> np.ndarray:
        d = self.dim
        return (self.superop @ _vec(X)).reshape(d, d)

    @property
    def choi(self) -> np.ndarray:
        d = self.dim
        return self.superop.reshape(d, d, d, d).transpose(2, 0, 3, 1).reshape(d * d, d * d)

    @property
    def choi_state(self) -> np.ndarray:
        """Normalized Choi operator ``(id (x) E)(Phi)`` with ``Phi`` maximally entangled."""
        return self.choi / self.dim

    @property
    def is_tp(self) -> bool:
        d = self.dim
        return bool(np.abs(qmat.partial_trace(self.choi, BipartiteLayout(d, d), "A") - np.eye(d)).max() <= 1e-8)

    @property
    def is_cp(self) -> bool:
        return bool(np.linalg.eigvalsh(_herm(self.choi)).min() >= -PSD_TOL)

    @property
    def is_choi_ppt(self) -> bool:
        d = self.dim
        pt = qmat.partial_transpose(self.choi, BipartiteLayout(d, d), "F")
        return bool(np.linalg.eigvalsh(_herm(pt)).min() >= -PSD_TOL)


def _herm(X):
    return (X + X.conj().T) / 2


def channel_from_function(fn: Callable[[np.ndarray], np.ndarray], d: int, **kw) -> ChannelRep:
    S = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1
            S[:, i * d + j] = _vec(fn(E))
    return ChannelRep(S, **kw)


def unitary_channel(U) -> ChannelRep:
    U = np.asarray(U, dtype=complex)
    return ChannelRep(np.kron(U, U.conj()), analytic_positive=True, name="unitary")


def identity_channel(d: int) -> ChannelRep:
    return unitary_channel(np.eye(d))


def transpose_channel(d: int, basis=None) -> ChannelRep:
    """Transpose in the orthonormal basis given by the columns of ``basis``."""
    V = np.eye(d, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    return channel_from_function(lambda X: V @ (V.conj().T @ X @ V).T @ V.conj().T, d, analytic_positive=True, name="transpose")


def dephasing_channel(d: int) -> ChannelRep:
    return channel_from_function(lambda X: np.diag(np.diag(X)), d, analytic_positive=True, name="dephasing")


def replacement_channel(sigma) -> ChannelRep:
    sigma = np.asarray(sigma, dtype=complex)
    return channel_from_function(lambda X: np.trace(X) * sigma, sigma.shape[0], analytic_positive=True, name="replace")


def twirl_channel(obj: Twirler) -> ChannelRep:
    return channel_from_function(lambda X: _twirl_linear(obj, X), twirler_dim(obj), analytic_positive=True, name="twirl")


def check_co1(E: ChannelRep, twirler: Twirler, tol: float = 1e-8) -> bool:
    """``E o G = G = G o E`` at the superoperator level."""
    SG = twirl_channel(twirler).superop
    SE = E.superop
    return bool(np.abs(SE @ SG - SG).max() <= tol and np.abs(SG @ SE - SG).max() <= tol)


@dataclass
class EncoderClass:
    in_Eg: Optional[bool]
    in_Ecp: bool
    in_Eppt: Optional[bool]
    in_Ep_necessary: bool
    co1: bool


def sampled_positive(E: ChannelRep, samples: int = 1000, sampler: Optional[Sampler] = None) -> bool:
    sampler = sampler or Sampler(7)
    for _ in range(samples):
        out = E.apply(qmat.proj(sampler.random_pure(E.dim)))
        if np.linalg.eigvalsh(_herm(out)).min() < -PSD_TOL:
            return False
    return True


def classify_encoder(E: ChannelRep, twirler: Twirler, samples: int = 1000, sampler: Optional[Sampler] = None) -> EncoderClass:
    """Three-valued membership in the encoder classes (``None`` = undecided)."""
    if not E.is_tp:
        raise ValueError("encoder is not trace preserving")
    co1 = check_co1(E, twirler)
    cp = E.is_cp
    if E.analytic_positive or cp:
        positive: Optional[bool] = True
        sampled = True
    else:
        sampled = sampled_positive(E, samples, sampler)
        positive = None if sampled else False

    rep = twirler.rep if isinstance(twirler, IsotypicDecomposition) else twirler
    in_eg: Optional[bool] = None
    if rep is not None and rep.finite:
        in_eg = any(np.abs(unitary_channel(U).superop - E.superop).max() <= 1e-8 for U in rep.unitaries)
    elif rep is not None and any(np.abs(unitary_channel(U).superop - E.superop).max() <= 1e-8 for U in rep.unitaries):
        in_eg = True

    if not (co1 and E.is_choi_ppt) or positive is False:
        in_eppt: Optional[bool] = False
    else:
        in_eppt = positive
    return EncoderClass(
        in_Eg=in_eg,
        in_Ecp=bool(cp and co1),
        in_Eppt=in_eppt,
        in_Ep_necessary=bool(co1 and sampled),
        co1=co1,
    )
