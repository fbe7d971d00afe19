"""Dense complex matrix kernel and quantum-state primitives.

Operators are plain ``numpy`` arrays.  Bipartite operators on ``A (x) F`` use
the composite index ``i = a * dimF + f`` (the ``numpy.kron`` convention).
Every matrix function goes through one Hermitian eigendecomposition.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

HERM_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-9
REPORT_TOL = 1e-8


class DimensionError(ValueError):
    pass


class NotConvergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class BipartiteLayout:
    dimA: int
    dimF: int

    @property
    def dim(self) -> int:
        return self.dimA * self.dimF

    def check(self, X: np.ndarray) -> None:
        if X.shape[0] != self.dim:
            raise DimensionError(
                f"operator of dimension {X.shape[0]} does not match layout {self.dimA}x{self.dimF}"
            )


def as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-d array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix has non-finite entries")
    return X


def is_hermitian(X, tol: float = HERM_TOL) -> bool:
    X = np.asarray(X)
    return X.shape[0] == X.shape[1] and np.abs(X - X.conj().T).max() <= tol


def check_hermitian(X, tol: float = HERM_TOL) -> np.ndarray:
    X = as_matrix(X)
    if X.shape[0] != X.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {X.shape}")
    err = np.abs(X - X.conj().T).max()
    if err > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {err:.3g})")
    return X


def check_density(rho, psd_tol: float = PSD_TOL, trace_tol: float = TRACE_TOL) -> np.ndarray:
    """Validate a density operator and return it as a complex array."""
    rho = check_hermitian(rho)
    tr = np.trace(rho).real
    if abs(tr - 1) > trace_tol:
        raise ValueError(f"trace {tr!r} differs from 1")
    lmin = np.linalg.eigvalsh(rho).min()
    if lmin < -psd_tol:
        raise ValueError(f"density has negative eigenvalue {lmin:.3g}")
    return rho


def check_pure(v, tol: float = HERM_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if abs(nrm - 1) > tol:
        raise ValueError(f"state vector has norm {nrm!r}")
    return v


def ket(i: int, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1
    return v


def proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def tensor(*ops) -> np.ndarray:
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def partial_trace(X, layout: BipartiteLayout, keep: str = "A") -> np.ndarray:
    X = as_matrix(X)
    layout.check(X)
    T = X.reshape(layout.dimA, layout.dimF, layout.dimA, layout.dimF)
    if keep == "A":
        return np.einsum("afbf->ab", T)
    if keep == "F":
        return np.einsum("afag->fg", T)
    raise ValueError(f"keep must be 'A' or 'F', got {keep!r}")


def partial_transpose(X, layout: BipartiteLayout, side: str = "F") -> np.ndarray:
    X = as_matrix(X)
    layout.check(X)
    T = X.reshape(layout.dimA, layout.dimF, layout.dimA, layout.dimF)
    if side == "F":
        T = T.transpose(0, 3, 2, 1)
    elif side == "A":
        T = T.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"side must be 'A' or 'F', got {side!r}")
    return T.reshape(layout.dim, layout.dim)


def hermitian_eig(X) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and the matching unitary eigenvector matrix."""
    X = check_hermitian(X)
    X = (X + X.conj().T) / 2
    try:
        w, V = np.linalg.eigh(X)
    except np.linalg.LinAlgError as exc:
        raise NotConvergedError(f"eigensolver failed on {X.shape[0]}x{X.shape[0]} input: {exc}") from exc
    return w[::-1], V[:, ::-1]


def _apply_spectral(X, fn) -> np.ndarray:
    w, V = hermitian_eig(X)
    return (V * fn(w)) @ V.conj().T


def operator_abs(X) -> np.ndarray:
    return _apply_spectral(X, np.abs)


def clamp_spectrum(w: np.ndarray, psd_tol: float = PSD_TOL) -> np.ndarray:
    if w.min(initial=0.0) < -psd_tol:
        raise ValueError(f"operator is not PSD (eigenvalue {w.min():.3g})")
    return np.clip(w, 0.0, None)


def matrix_power(X, p: float, psd_tol: float = PSD_TOL) -> np.ndarray:
    """``X**p`` on the support of a PSD operator; zero eigenvalues stay zero for every ``p``."""
    w, V = hermitian_eig(X)
    w = clamp_spectrum(w, psd_tol)
    support = w > psd_tol
    if p < 0 and not support.any():
        raise ValueError("negative power of the zero operator")
    out = np.zeros_like(w)
    out[support] = w[support] ** p
    return (V * out) @ V.conj().T


def matrix_sqrt(X) -> np.ndarray:
    return matrix_power(X, 0.5)


def purify(rho, dimF: int | None = None, mode: str = "spectral") -> np.ndarray:
    """Purify ``rho`` onto ``A (x) F``.

    ``spectral`` puts the Schmidt vectors on the first basis states of F.
    ``uniform`` returns ``N**-0.5 * sum_n |psi_n>|n>`` with normalized
    ``psi_n`` (Fourier mixing of the spectral decomposition), ``N = dimF``.
    """
    rho = check_density(rho)
    w, V = hermitian_eig(rho)
    w = clamp_spectrum(w)
    rank = int(np.sum(w > PSD_TOL))
    if dimF is None:
        dimF = rank
    if dimF < rank:
        raise DimensionError(f"dimF={dimF} is smaller than rank {rank}")
    dA = rho.shape[0]
    w, V = w[:rank], V[:, :rank]
    if mode == "spectral":
        M = np.zeros((dA, dimF), dtype=complex)
        M[:, :rank] = V * np.sqrt(w)
    elif mode == "uniform":
        N = dimF
        n = np.arange(N)
        fourier = np.exp(2j * np.pi * np.outer(n, np.arange(rank)) / N) / np.sqrt(N)
        # column n of M is psi_n / sqrt(N)
        M = (V * np.sqrt(w)) @ fourier.T
    else:
        raise ValueError(f"unknown purification mode {mode!r}")
    v = M.reshape(-1)
    return v / np.linalg.norm(v)


def bell_state(d: int = 2) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * d + np.arange(d)] = 1 / np.sqrt(d)
    return v


class Sampler:
    """Deterministic random source built on the counter-based Philox generator.

    ``child(label)`` derives an independent stream from a text label, so
    results do not depend on the order in which streams are consumed.
    """

    def __init__(self, seed: int = 0, _key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self._key = _key
        ss = np.random.SeedSequence(self.seed, spawn_key=_key)
        self.rng = np.random.Generator(np.random.Philox(ss))

    def child(self, label) -> "Sampler":
        return Sampler(self.seed, self._key + (zlib.crc32(str(label).encode()),))

    def ginibre(self, rows: int, cols: int) -> np.ndarray:
        return self.rng.normal(size=(rows, cols)) + 1j * self.rng.normal(size=(rows, cols))

    def haar_unitary(self, d: int) -> np.ndarray:
        Q, R = np.linalg.qr(self.ginibre(d, d))
        phases = np.diag(R) / np.abs(np.diag(R))
        return Q * phases

    def random_pure(self, d: int) -> np.ndarray:
        v = self.ginibre(d, 1).ravel()
        return v / np.linalg.norm(v)

    def random_density(self, d: int, rank: int | None = None) -> np.ndarray:
        G = self.ginibre(d, rank or d)
        rho = G @ G.conj().T
        rho = (rho + rho.conj().T) / 2
        return rho / np.trace(rho).real

    def random_hermitian(self, d: int) -> np.ndarray:
        G = self.ginibre(d, d)
        return (G + G.conj().T) / 2


def matrix_to_json(X) -> dict:
    X = as_matrix(X)
    return {
        "rows": X.shape[0],
        "cols": X.shape[1],
        "re": X.real.ravel().tolist(),
        "im": X.imag.ravel().tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.size != rows * cols or im.size != rows * cols:
        raise DimensionError(f"expected {rows * cols} entries, got {re.size}/{im.size}")
    return as_matrix((re + 1j * im).reshape(rows, cols))
