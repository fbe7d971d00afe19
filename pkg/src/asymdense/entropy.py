"""Entropic functionals: von Neumann, relative and Renyi quantities.

Everything is computed in nats and converted to bits once, when an
:class:`EntropyValue` is built.  Orders within ``ALPHA_ONE_TOL`` of 1 are
rerouted to the von Neumann expressions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import qmat
from .qmat import BipartiteLayout, PSD_TOL, Sampler
from .symmetry import Twirler, XiState, twirl

LN2 = np.log(2.0)
ALPHA_ONE_TOL = 1e-4
SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class EntropyValue:
    value: float
    alpha: Optional[float] = None
    kind: str = ""

    def __float__(self) -> float:
        return self.value

    @property
    def nats(self) -> float:
        return self.value * LN2

    def to_json(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha, "bits": self.value}


def _bits(nats: float, alpha=None, kind="") -> EntropyValue:
    return EntropyValue(float(nats / LN2), alpha, kind)


def shannon_nats(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def spectrum(rho) -> np.ndarray:
    w, _ = qmat.hermitian_eig(rho)
    return qmat.clamp_spectrum(w)


def binary_entropy(p: float) -> float:
    """``h(p)`` in bits."""
    return shannon_nats([p, 1 - p]) / LN2


def von_neumann(rho) -> EntropyValue:
    rho = qmat.check_density(rho)
    return _bits(shannon_nats(spectrum(rho)), kind="von_neumann")


def _support_violated(rho, sigma) -> bool:
    w, V = qmat.hermitian_eig(sigma)
    ker = V[:, w <= SUPPORT_TOL]
    if ker.shape[1] == 0:
        return False
    return float(np.trace(ker.conj().T @ rho @ ker).real) > SUPPORT_TOL


def _log_on_support(X) -> np.ndarray:
    w, V = qmat.hermitian_eig(X)
    w = qmat.clamp_spectrum(w)
    out = np.zeros_like(w)
    pos = w > SUPPORT_TOL
    out[pos] = np.log(w[pos])
    return (V * out) @ V.conj().T


def relative_entropy(rho, sigma) -> EntropyValue:
    rho = qmat.check_density(rho)
    sigma = qmat.check_hermitian(sigma)
    if _support_violated(rho, sigma):
        return EntropyValue(np.inf, kind="relative_entropy")
    val = np.trace(rho @ (_log_on_support(rho) - _log_on_support(sigma))).real
    return _bits(val, kind="relative_entropy")


def _near_one(alpha: float) -> bool:
    return abs(alpha - 1) < ALPHA_ONE_TOL


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise ValueError(f"Renyi order must be positive, got {alpha}")


def petz_renyi(rho, sigma, alpha: float) -> EntropyValue:
    _check_alpha(alpha)
    if _near_one(alpha):
        v = relative_entropy(rho, sigma).value
        return EntropyValue(v, alpha, "petz_renyi")
    rho = qmat.check_density(rho)
    sigma = qmat.check_hermitian(sigma)
    if alpha > 1 and _support_violated(rho, sigma):
        return EntropyValue(np.inf, alpha, "petz_renyi")
    q = np.trace(qmat.matrix_power(rho, alpha) @ qmat.matrix_power(sigma, 1 - alpha)).real
    if q <= 0:
        return EntropyValue(np.inf, alpha, "petz_renyi")
    return _bits(np.log(q) / (alpha - 1), alpha, "petz_renyi")


def sandwiched_renyi(rho, sigma, alpha: float) -> EntropyValue:
    _check_alpha(alpha)
    if _near_one(alpha):
        v = relative_entropy(rho, sigma).value
        return EntropyValue(v, alpha, "sandwiched_renyi")
    rho = qmat.check_density(rho)
    sigma = qmat.check_hermitian(sigma)
    if alpha > 1 and _support_violated(rho, sigma):
        return EntropyValue(np.inf, alpha, "sandwiched_renyi")
    S = qmat.matrix_power(sigma, (1 - alpha) / (2 * alpha))
    inner = S @ rho @ S
    q = np.sum(qmat.clamp_spectrum(qmat.hermitian_eig((inner + inner.conj().T) / 2)[0]) ** alpha)
    if q <= 0:
        return EntropyValue(np.inf, alpha, "sandwiched_renyi")
    return _bits(np.log(q) / (alpha - 1), alpha, "sandwiched_renyi")


def renyi_entropy_nats(w, alpha: float) -> float:
    """Renyi entropy of a probability vector, in nats."""
    w = np.asarray(w, dtype=float).ravel()
    w = w[w > 0]
    if _near_one(alpha):
        return shannon_nats(w)
    return float(np.log(np.sum(w**alpha)) / (1 - alpha))


def renyi_entropy(rho, alpha: float) -> EntropyValue:
    _check_alpha(alpha)
    rho = qmat.check_density(rho)
    return _bits(renyi_entropy_nats(spectrum(rho), alpha), alpha, "renyi_entropy")


# ---------------------------------------------------------------------------
# conditional entropies


def _generic_conditional(rho_AF, layout: BipartiteLayout, alpha: float, which: str) -> float:
    """Petz conditional entropy ``-D_alpha(rho_AF || I (x) rho_F)`` (or the F|A analogue), in bits."""
    if which == "A|F":
        ref = np.kron(np.eye(layout.dimA), qmat.partial_trace(rho_AF, layout, "F"))
    elif which == "F|A":
        ref = np.kron(qmat.partial_trace(rho_AF, layout, "A"), np.eye(layout.dimF))
    else:
        raise ValueError(f"conditioning must be 'A|F' or 'F|A', got {which!r}")
    return -petz_renyi(rho_AF, ref, alpha).value


def xi_cq_matrix(xi: XiState) -> np.ndarray:
    """``xi_AF`` dephased in the computational basis of F (a classical-quantum state)."""
    layout = xi.layout
    X = xi.assemble().reshape(layout.dimA, layout.dimF, layout.dimA, layout.dimF)
    out = np.zeros_like(X)
    for n in range(layout.dimF):
        out[:, n, :, n] = X[:, n, :, n]
    return out.reshape(layout.dim, layout.dim)


def xi_renyi_nats(xi: XiState, alpha: float, which: str) -> float:
    """Block closed forms for the F-dephased ``xi``, in nats.

    With joint weights ``w[n, k]``, block dims ``d_k``, block masses ``P_k``
    and F marginal ``f_n``, the cq state has eigenvalue ``w[n, k] / d_k``
    with multiplicity ``d_k``.
    """
    w = xi.joint_weights()
    d = np.asarray(xi.block_dims, dtype=float)
    P = np.asarray(xi.pk, dtype=float)
    f = w.sum(axis=1)
    mask = w > 0
    Dm = np.broadcast_to(d, w.shape)[mask]
    Pm = np.broadcast_to(P, w.shape)[mask]
    fm = np.broadcast_to(f[:, None], w.shape)[mask]
    wm = w[mask]
    if _near_one(alpha):
        h_af = float(-np.sum(wm * np.log(wm / Dm)))
        h_a = shannon_nats(P) + float(np.sum(P * np.log(d)))
        table = {"AF": h_af, "A": h_a, "F": shannon_nats(f), "A|F": h_af - shannon_nats(f), "F|A": h_af - h_a}
        if which not in table:
            raise ValueError(f"unknown entropy {which!r}")
        return table[which]
    a = alpha
    if which == "AF":
        s = np.sum(Dm * (wm / Dm) ** a)
    elif which == "A":
        s = np.sum(P**a * d ** (1 - a))
    elif which == "F":
        s = np.sum(f[f > 0] ** a)
    elif which == "A|F":
        s = np.sum(wm**a * Dm ** (1 - a) * fm ** (1 - a))
    elif which == "F|A":
        s = np.sum(wm**a * Pm ** (1 - a))
    else:
        raise ValueError(f"unknown entropy {which!r}")
    return float(np.log(s) / (1 - a))


def conditional_renyi(state, alpha: float, which: str = "A|F", layout: Optional[BipartiteLayout] = None) -> EntropyValue:
    """Petz conditional Renyi entropy ``H_alpha(A|F)`` or ``H_alpha(F|A)``.

    For an :class:`XiState` the block closed forms are used; they refer to
    the state dephased in the F basis.  A bipartite density goes through the
    generic divergence definition.
    """
    _check_alpha(alpha)
    if isinstance(state, XiState):
        return _bits(xi_renyi_nats(state, alpha, which), alpha, f"H({which})")
    if layout is None:
        raise ValueError("a bipartite density needs a layout")
    rho = qmat.check_density(state)
    layout.check(rho)
    if _near_one(alpha):
        marg = qmat.partial_trace(rho, layout, "F" if which == "A|F" else "A")
        val = von_neumann(rho).value - von_neumann(marg).value
        return EntropyValue(val, alpha, f"H({which})")
    return EntropyValue(_generic_conditional(rho, layout, alpha, which), alpha, f"H({which})")


# ---------------------------------------------------------------------------
# asymmetry measures


def rea(rho, twirler: Twirler, tol: float = 1e-7) -> EntropyValue:
    """Relative entropy of asymmetry ``D(rho || G(rho))``, checked against ``H(G(rho)) - H(rho)``."""
    rho = qmat.check_density(rho)
    g = twirl(twirler, rho)
    d = relative_entropy(rho, g).value
    alt = von_neumann(g).value - von_neumann(rho).value
    if abs(d - alt) > tol:
        raise RuntimeError(f"asymmetry identity violated: {d} vs {alt}")
    return EntropyValue(d, kind="rea")


@dataclass
class AssistanceBounds:
    lower: EntropyValue
    upper: EntropyValue
    best_source: str
    best_probs: np.ndarray
    best_states: np.ndarray


def _decomposition_value(twirler, probs, states) -> float:
    total = 0.0
    for p, v in zip(probs, states):
        if p > 1e-15:
            total += p * shannon_nats(spectrum(twirl(twirler, qmat.proj(v))))
    return total


def _from_isometry(lam, V, W):
    """Ensemble ``{p_x, psi_x}`` with ``sqrt(p_x) psi_x = sum_i W[x, i] sqrt(lam_i) e_i``."""
    vecs = (W * np.sqrt(lam)) @ V.T
    probs = np.sum(np.abs(vecs) ** 2, axis=1)
    keep = probs > 1e-15
    states = vecs[keep] / np.sqrt(probs[keep])[:, None]
    return probs[keep], states


def assistance_bounds(rho, twirler: Twirler, budget: int = 1000, sampler: Optional[Sampler] = None) -> AssistanceBounds:
    """Bounds on the asymmetry of assistance ``max sum_x p_x H(G(psi_x))``.

    Candidates are the eigen-decomposition, the uniform Fourier
    decomposition and ``budget`` random decompositions drawn from Haar
    isometries on a purifying register.  The upper bound is ``H(G(rho))``.
    """
    rho = qmat.check_density(rho)
    sampler = sampler or Sampler(0)
    w, V = qmat.hermitian_eig(rho)
    w = qmat.clamp_spectrum(w)
    r = int(np.sum(w > PSD_TOL))
    lam, V = w[:r], V[:, :r]
    upper = shannon_nats(spectrum(twirl(twirler, rho)))

    n = np.arange(r)
    fourier = np.exp(2j * np.pi * np.outer(n, n) / r) / np.sqrt(r)
    candidates = [("eigen", np.eye(r)), ("fourier", fourier)]
    m = max(2 * r, 2)
    for i in range(budget):
        candidates.append((f"haar[{i}]", sampler.haar_unitary(m)[:, :r]))

    best = (-np.inf, "", None, None)
    for name, W in candidates:
        probs, states = _from_isometry(lam, V, W)
        val = _decomposition_value(twirler, probs, states)
        if val > best[0] + 1e-12:
            best = (val, name, probs, states)
    if best[0] > upper + 1e-9 * LN2:
        raise RuntimeError(f"decomposition value {best[0]} exceeds H(G(rho)) = {upper}")
    return AssistanceBounds(_bits(best[0], kind="assistance_lower"), _bits(upper, kind="assistance_upper"), best[1], best[2], best[3])
