"""One-shot bounds: Legendre transform, achievable rate, strong converse.

The Legendre objective is built from the classical-quantum state ``xi``
(the symmetric decomposition dephased in the F basis):

    f1(s) = s H_{1+s}(AF) - s H_{1-s}(F|A)
    f2(s) = s H_{1+s}(A)
    L(R)  = max_{s in [0, 1]} s R + min(f1(s), f2(s))

All internal work is in nats; arguments and results are in bits.  Since
``L`` is homogeneous under a change of log base, the conversion is a
single factor of ``ln 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import qmat
from .entropy import LN2, renyi_entropy_nats, sandwiched_renyi, spectrum
from .qmat import NotConvergedError
from .symmetry import Twirler, XiState, twirl

S_RESOLUTION = 1000
INVERSE_TOL = 1e-7
ALPHA_GRID = np.linspace(1.0005, 1.9995, 1999)


@dataclass
class LegendreProfile:
    """Block data of ``xi`` needed by ``f1`` and ``f2``; ``copies`` scales for tensor powers."""

    w: np.ndarray
    d: np.ndarray
    P: np.ndarray
    copies: int = 1

    @classmethod
    def from_xi(cls, xi: XiState, copies: int = 1) -> "LegendreProfile":
        w = xi.joint_weights()
        mask = w > 0
        d = np.broadcast_to(np.asarray(xi.block_dims, dtype=float), w.shape)[mask]
        P = np.broadcast_to(np.asarray(xi.pk, dtype=float), w.shape)[mask]
        return cls(w[mask], d, P, copies)

    @property
    def block_P(self):
        return self.P

    def f1(self, s: float) -> float:
        # s H_{1+s}(AF) = -log sum d (w/d)^{1+s};  s H_{1-s}(F|A) = log sum w^{1-s} P^s
        a = -np.log(np.sum(self.d * (self.w / self.d) ** (1 + s)))
        b = np.log(np.sum(self.w ** (1 - s) * self.P**s))
        return self.copies * float(a - b)

    def f2(self, s: float) -> float:
        Pk, dk = self._blocks()
        return self.copies * float(-np.log(np.sum(Pk ** (1 + s) * dk ** (-s))))

    def _blocks(self):
        # distinct (P_k, d_k) pairs; weights of one block share P and d
        pairs = sorted(set(zip(self.P.tolist(), self.d.tolist())))
        Pk = np.array([p for p, _ in pairs])
        dk = np.array([d for _, d in pairs])
        return Pk, dk

    def objective(self, s: float, R_nats: float) -> float:
        return s * R_nats + min(self.f1(s), self.f2(s))

    def entropies(self) -> dict:
        """von Neumann entropies and varentropies (nats) of the cq state."""
        w, d, P = self.w, self.d, self.P
        Pk, dk = self._blocks()
        x_af = -np.log(w / d)
        x_fa = -np.log(w / P)
        x_a = -np.log(Pk / dk)
        H = {
            "AF": float(np.sum(w * x_af)),
            "F|A": float(np.sum(w * x_fa)),
            "A": float(np.sum(Pk * x_a)),
        }
        V = {
            "AF": float(np.sum(w * (x_af - H["AF"]) ** 2)),
            "F|A": float(np.sum(w * (x_fa - H["F|A"]) ** 2)),
            "A": float(np.sum(Pk * (x_a - H["A"]) ** 2)),
        }
        c = self.copies
        return {"H": {k: c * v for k, v in H.items()}, "V": {k: c * v for k, v in V.items()}}


def _profile(xi, copies: int = 1) -> LegendreProfile:
    if isinstance(xi, LegendreProfile):
        return xi if copies == 1 else LegendreProfile(xi.w, xi.d, xi.P, xi.copies * copies)
    return LegendreProfile.from_xi(xi, copies)


def legendre_nats(prof: LegendreProfile, R_nats: float, s_resolution: int = S_RESOLUTION) -> tuple[float, float]:
    """``(L, s*)`` by grid search plus golden-section refinement on the winning cell."""
    if s_resolution < 2:
        raise ValueError("s_resolution must be at least 2")
    grid = np.linspace(0.0, 1.0, s_resolution + 1)
    vals = np.array([prof.objective(s, R_nats) for s in grid])
    i = int(np.argmax(vals))
    best, s_best = float(vals[i]), float(grid[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda s: -prof.objective(s, R_nats), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if -res.fun > best:
            best, s_best = float(-res.fun), float(res.x)
    return max(best, 0.0) + 0.0, s_best


def legendre(xi, R: float, s_resolution: int = S_RESOLUTION, copies: int = 1) -> float:
    """``L_xi(R)`` in bits, ``R`` in bits."""
    return legendre_nats(_profile(xi, copies), R * LN2, s_resolution)[0] / LN2


def legendre_inverse(xi, target: float, copies: int = 1, tol: float = INVERSE_TOL) -> float:
    """Smallest ``R`` (bits) with ``L(R) >= target``; ``-inf`` when ``target <= 0``."""
    if target < 0:
        raise ValueError("target must be nonnegative")
    if target == 0:
        return -np.inf
    prof = _profile(xi, copies)
    t = target * LN2
    # L(R) >= R + min(f1(1), f2(1)), so this R reaches the target
    hi = t - min(prof.f1(1.0), prof.f2(1.0))
    step = max(1.0, abs(hi))
    lo = hi - step
    for _ in range(200):
        if legendre_nats(prof, lo)[0] < t:
            break
        step *= 2
        lo = hi - step
    else:
        raise NotConvergedError("could not bracket the Legendre inverse")
    while hi - lo > tol * LN2:
        mid = 0.5 * (lo + hi)
        if legendre_nats(prof, mid)[0] >= t:
            hi = mid
        else:
            lo = mid
    return hi / LN2


def oneshot_achievable_rate(xi, epsilon: float, variant: str = "proof", copies: int = 1) -> float:
    """Achievable one-shot rate in bits.

    ``statement``: ``-L^{-1}(-log eps)``; ``proof``: ``-L^{-1}(-2 log(eps / 36))``.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if variant == "statement":
        target = -np.log2(epsilon)
    elif variant == "proof":
        target = -2 * np.log2(epsilon / 36)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return -legendre_inverse(xi, target, copies)


@dataclass
class OneShotReport:
    R: float
    L: float
    variant: str
    epsilon: float
    rate_bits: float
    alpha_star: Optional[float] = None
    bound: Optional[float] = None

    def to_json(self) -> dict:
        return {k: (None if v is None else (v if isinstance(v, str) else float(v))) for k, v in self.__dict__.items()}


# ---------------------------------------------------------------------------
# strong converse bounds


@dataclass
class ConverseBound:
    bound: float
    raw: float
    alpha: float
    flag: str = ""


def _check_open_alpha(alpha: float) -> None:
    if not 1 < alpha < 2:
        raise ValueError(f"alpha must lie in the open interval (1, 2), got {alpha}")


def strong_converse_success(sym_state, M: float, alpha: Optional[float] = None, copies: int = 1) -> ConverseBound:
    """Success-probability bound ``2^{((a-1)/a)(H_{2-a}(G(Psi_A)) - log M)}``.

    ``sym_state`` is ``G(Psi_A)`` or its spectrum.  With ``alpha=None`` the
    bound is minimized over a grid in (1, 2).  ``copies`` evaluates the
    bound for the tensor power, for which the Renyi entropy is additive.
    """
    lam = np.asarray(sym_state)
    lam = spectrum(lam) if lam.ndim == 2 else lam
    logM = np.log(M)
    alphas = ALPHA_GRID if alpha is None else [alpha]
    best = None
    for a in alphas:
        _check_open_alpha(a)
        h = copies * renyi_entropy_nats(lam, 2 - a)
        e = (a - 1) / a * (h - logM)
        if best is None or e < best[0]:
            best = (e, a)
    raw = float(np.exp(best[0]))
    return ConverseBound(min(raw, 1.0), raw, float(best[1]))


def local_strong_converse_success(psi_A, twirler: Twirler, M: float, alpha: float) -> ConverseBound:
    """Local-decoder bound ``2^{((a-1)/a)(D~_a(Psi_A || G(Psi_A)) - log M)}`` for ``a > 1``."""
    if not alpha > 1:
        raise ValueError("alpha must exceed 1")
    rho = qmat.check_density(psi_A)
    div = sandwiched_renyi(rho, twirl(twirler, rho), alpha).value
    if not np.isfinite(div):
        return ConverseBound(1.0, np.inf, alpha, "support violation")
    raw = float(2.0 ** ((alpha - 1) / alpha * (div - np.log2(M))))
    return ConverseBound(min(raw, 1.0), raw, alpha)


def converse_decay(sym_state, excess: float, n_list: Sequence[int]) -> list:
    """Optimized converse bound at ``M = 2^{n R}`` with ``R = H(G(Psi_A)) + excess`` (bits)."""
    lam = np.asarray(sym_state)
    lam = spectrum(lam) if lam.ndim == 2 else lam
    R = renyi_entropy_nats(lam, 1.0) / LN2 + excess
    out = []
    for n in n_list:
        b = strong_converse_success(lam, 2.0 ** (n * R), copies=n)
        out.append({"n": int(n), "bound": b.raw, "alpha": b.alpha})
    return out


# ---------------------------------------------------------------------------
# second order


def variance_terms(xi) -> dict:
    """Varentropies (nats^2) and the two branch curvatures of ``min(f1, f2)`` at ``s = 0``.

    ``f1`` has curvature ``-(V(AF) + V(F|A))`` and ``f2`` has ``-V(A)``;
    ``V_xi`` is the larger of the two.  ``V_printed`` is the combination
    ``max(V(A) + V(AF), V(F|A))`` kept for comparison.
    """
    e = _profile(xi).entropies()
    V = e["V"]
    v1 = V["AF"] + V["F|A"]
    v2 = V["A"]
    return {
        "H_A": e["H"]["A"],
        "V_AF": V["AF"],
        "V_F_given_A": V["F|A"],
        "V_A": V["A"],
        "V_branch1": v1,
        "V_branch2": v2,
        "V_xi": max(v1, v2),
        "V_printed": max(V["A"] + V["AF"], V["F|A"]),
    }


def finite_difference_curvatures(xi, h: float = 1e-3) -> tuple[float, float]:
    """One-sided second differences of ``f1`` and ``f2`` at 0 (valid since both vanish there)."""
    prof = _profile(xi)
    out = []
    for f in (prof.f1, prof.f2):
        out.append((f(2 * h) - 2 * f(h) + f(0.0)) / h**2)
    return out[0], out[1]


@dataclass
class SecondOrderRow:
    n: int
    rate: float
    approx: float
    approx_printed: float
    residual: float
    scaled_residual: float


@dataclass
class SecondOrderTable:
    rows: list = field(default_factory=list)
    skipped: bool = False
    note: str = ""
    terms: dict = field(default_factory=dict)


def second_order_check(xi, n_list: Sequence[int], epsilon: float = 1e-2) -> SecondOrderTable:
    """Compare ``-L^{-1}_{xi^n}(-log eps) / n`` with ``H(A) - sqrt(2 V log(1/eps) / n)``.

    Values in bits.  A flat-spectrum ``xi`` has ``V_xi = 0`` and is skipped.
    """
    terms = variance_terms(xi)
    if terms["V_xi"] <= 1e-12:
        return SecondOrderTable(skipped=True, note="V_xi = 0 (flat spectrum); expansion degenerate", terms=terms)
    log_inv = np.log(1 / epsilon)
    table = SecondOrderTable(terms=terms)
    for n in n_list:
        if n > 1000:
            raise ValueError("n must not exceed 1000")
        rate = oneshot_achievable_rate(xi, epsilon, "statement", copies=int(n)) / n
        approx = (terms["H_A"] - np.sqrt(2 * terms["V_xi"] * log_inv / n)) / LN2
        printed = (terms["H_A"] - np.sqrt(2 * terms["V_printed"] * log_inv / n)) / LN2
        res = rate - approx
        table.rows.append(SecondOrderRow(int(n), rate, approx, printed, res, res * np.sqrt(n)))
    return table
