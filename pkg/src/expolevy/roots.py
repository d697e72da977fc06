"""Rational form of psi and the root structure of psi(z) = q.

psi is a ratio Q(z)/P(z) with P(z) = prod (rho_j - z)^{m_j} * prod
(rhohat_j + z)^{mhat_j}. The equation psi(z) = q then has exactly
deg Q roots; their counts on each side of the imaginary axis obey

    sigma > 0           : K = M+1, Khat = Mhat+1
    sigma = 0, mu > 0   : K = M+1, Khat = Mhat
    sigma = 0, mu < 0   : K = M,   Khat = Mhat+1
    sigma = mu = 0      : K = M,   Khat = Mhat

where M, Mhat are the total pole multiplicities. The solver finds all
roots simultaneously (Aberth iteration), polishes them on psi directly,
and verifies the count law.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import model as model_mod
from .errors import (ConvergenceError, MultipleRootError, PoleError,
                     PreconditionError, RootCountError)
from .model import LevyModel

MULTIPLE_ROOT_RTOL = 1e-6
INTEGER_SPACING_ATOL = 1e-8
INTEGER_SPACING_WARN = 1e-4


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial, coefficients ascending in degree."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return npoly.polyval(z, np.asarray(self.coeffs, dtype=complex))


@dataclass(frozen=True)
class RationalForm:
    num: Polynomial
    den: Polynomial
    kind: str  # sigma_pos | drift_only | pure_jump

    def __call__(self, z):
        return self.num(z) / self.den(z)


@dataclass(frozen=True)
class RootSet:
    """Roots of psi(z) = q, split by half-plane.

    zeta are the roots with positive real part, ascending in real part;
    zeta_hat stores the *negated* left-half-plane roots (so all stored
    values have nonnegative real part as well). zeta[0] and zeta_hat[0]
    are real, with strictly minimal real part on their side.
    """

    q: float
    zeta: tuple
    zeta_hat: tuple

    @property
    def K(self) -> int:
        return len(self.zeta)

    @property
    def Khat(self) -> int:
        return len(self.zeta_hat)

    def to_dict(self) -> dict:
        return {"q": self.q,
                "zeta": [[z.real, z.imag] for z in self.zeta],
                "zeta_hat": [[z.real, z.imag] for z in self.zeta_hat]}

    @staticmethod
    def from_dict(d) -> "RootSet":
        return RootSet(q=float(d["q"]),
                       zeta=tuple(complex(re, im) for re, im in d["zeta"]),
                       zeta_hat=tuple(complex(re, im) for re, im in d["zeta_hat"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def to_rational(model: LevyModel) -> RationalForm:
    """Expand psi into the rational form Q(z)/P(z).

    P is the product of the pole factors; Q is assembled exactly as
    (sigma^2 z^2/2 + mu z - lambda) P plus the cleared jump numerators, so
    no trailing-coefficient trimming is ever needed: the leading term of Q
    comes out structurally nonzero in every case of the degree trichotomy.
    """
    lam = model_mod.jump_intensity(model)

    # pole factors, ascending coefficients
    pos_factors = [np.array([t.rho, -1.0], dtype=complex) for t in model.positive_jumps]
    neg_factors = [np.array([t.rho, 1.0], dtype=complex) for t in model.negative_jumps]

    P = np.array([1.0 + 0j])
    for t, f in zip(model.positive_jumps, pos_factors):
        for _ in range(t.multiplicity):
            P = npoly.polymul(P, f)
    for t, f in zip(model.negative_jumps, neg_factors):
        for _ in range(t.multiplicity):
            P = npoly.polymul(P, f)

    if model.sigma > 0:
        bracket = np.array([-lam, model.mu, 0.5 * model.sigma ** 2], dtype=complex)
        kind = "sigma_pos"
    elif model.mu != 0:
        bracket = np.array([-lam, model.mu], dtype=complex)
        kind = "drift_only"
    else:
        bracket = np.array([-lam], dtype=complex)
        kind = "pure_jump"

    Q = npoly.polymul(bracket, P)

    # cleared jump numerators: alpha_ij (i-1)! (rho_j -+ z)^(m_j - i) times
    # every other pole factor at full multiplicity
    pos_all = np.array([1.0 + 0j])
    for t, f in zip(model.positive_jumps, pos_factors):
        for _ in range(t.multiplicity):
            pos_all = npoly.polymul(pos_all, f)
    neg_all = np.array([1.0 + 0j])
    for t, f in zip(model.negative_jumps, neg_factors):
        for _ in range(t.multiplicity):
            neg_all = npoly.polymul(neg_all, f)

    Qj = np.zeros(1, dtype=complex)
    for j, t in enumerate(model.positive_jumps):
        others = neg_all.copy()
        for k, (tk, fk) in enumerate(zip(model.positive_jumps, pos_factors)):
            if k == j:
                continue
            for _ in range(tk.multiplicity):
                others = npoly.polymul(others, fk)
        for i, a in enumerate(t.alphas, start=1):
            piece = others
            for _ in range(t.multiplicity - i):
                piece = npoly.polymul(piece, pos_factors[j])
            Qj = npoly.polyadd(Qj, a * math.factorial(i - 1) * piece)
    for j, t in enumerate(model.negative_jumps):
        others = pos_all.copy()
        for k, (tk, fk) in enumerate(zip(model.negative_jumps, neg_factors)):
            if k == j:
                continue
            for _ in range(tk.multiplicity):
                others = npoly.polymul(others, fk)
        for i, a in enumerate(t.alphas, start=1):
            piece = others
            for _ in range(t.multiplicity - i):
                piece = npoly.polymul(piece, neg_factors[j])
            Qj = npoly.polyadd(Qj, a * math.factorial(i - 1) * piece)

    n = max(len(Q), len(Qj))
    Qfull = np.zeros(n, dtype=complex)
    Qfull[:len(Q)] += Q
    Qfull[:len(Qj)] += Qj

    deg_expected = (len(P) - 1) + (len(bracket) - 1)
    Qfull = Qfull[:deg_expected + 1]
    return RationalForm(num=Polynomial(tuple(Qfull)),
                        den=Polynomial(tuple(P)),
                        kind=kind)


def _aberth(coeffs: np.ndarray, maxiter: int = 200, tol: float = 1e-14) -> np.ndarray:
    """All roots of the polynomial (ascending coeffs) by Aberth iteration."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / c[-1]
    n = len(c) - 1
    if n == 0:
        return np.empty(0, dtype=complex)
    dc = npoly.polyder(c)

    # initial guesses on a slightly irrational spiral inside the Cauchy bound
    radius = 1.0 + np.max(np.abs(c[:-1]))
    k = np.arange(n)
    z = radius * 0.8 * np.exp(2j * np.pi * (k / n + 0.4)) * (0.9 + 0.2 * k / max(n, 1))

    for _ in range(maxiter):
        pz = npoly.polyval(z, c)
        dpz = npoly.polyval(z, dc)
        w = np.where(dpz != 0, pz / np.where(dpz == 0, 1, dpz), 0.1)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        step = w / np.where(denom == 0, 1e-30, denom)
        z = z - step
        if np.max(np.abs(step) / (1.0 + np.abs(z))) < tol:
            return z
    raise ConvergenceError("aberth iteration did not converge")


def solve(model: LevyModel, q: float) -> RootSet:
    """Find, polish and classify all roots of psi(z) = q.

    Requires q > 0, or q = 0 with E[X_1] < 0 (then the root at z = 0 is
    assigned to the hatted side, matching the q -> 0+ limit). Raises
    MultipleRootError when two roots nearly coincide and RootCountError
    when the per-side counts contradict the count law.
    """
    if q < 0:
        raise PreconditionError("solve: q must be nonnegative")
    if q == 0 and model_mod.mean(model) >= 0:
        raise PreconditionError("solve: q = 0 requires E[X_1] < 0")

    rf = to_rational(model)
    R = npoly.polysub(np.asarray(rf.num.coeffs), q * np.asarray(rf.den.coeffs))
    roots = _aberth(R)

    # Newton polish on psi directly; skip roots inside the pole guard
    poles = [t.rho for t in model.positive_jumps] + \
            [-t.rho for t in model.negative_jumps]
    polished = []
    for z in roots:
        zc = z
        for _ in range(50):
            if any(abs(zc - p) < 10 * model_mod.POLE_GUARD * (1 + abs(p)) for p in poles):
                break
            f = model_mod.laplace_exponent(model, zc) - q
            df = model_mod.laplace_exponent_deriv(model, zc)
            if df == 0:
                break
            step = f / df
            zc = zc - step
            if abs(step) < 1e-15 * (1 + abs(zc)):
                break
        polished.append(zc)
    roots = np.array(polished)

    # enforce exact conjugate symmetry by averaging matched pairs
    used = np.zeros(len(roots), dtype=bool)
    sym = roots.copy()
    for i in range(len(roots)):
        if used[i]:
            continue
        if abs(roots[i].imag) < 1e-8 * (1 + abs(roots[i])):
            sym[i] = roots[i].real
            used[i] = True
            continue
        dist = np.abs(roots - roots[i].conjugate())
        dist[used] = np.inf
        dist[i] = np.inf
        j = int(np.argmin(dist))
        if not np.isfinite(dist[j]):
            raise RootCountError(f"unpaired complex root {roots[i]}")
        avg = 0.5 * (roots[i] + roots[j].conjugate())
        sym[i], sym[j] = avg, avg.conjugate()
        used[i] = used[j] = True
    roots = sym

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < MULTIPLE_ROOT_RTOL * (1 + abs(roots[i])):
                raise MultipleRootError(
                    f"roots {roots[i]} and {roots[j]} nearly coincide")

    zeta, zeta_hat = [], []
    for z in roots:
        if q == 0 and abs(z) < 1e-8:
            zeta_hat.append(0j)  # mean < 0: the zero root belongs to the hatted side
        elif z.real > 0:
            zeta.append(z)
        else:
            zeta_hat.append(-z)
    zeta.sort(key=lambda z: (z.real, abs(z.imag)))
    zeta_hat.sort(key=lambda z: (z.real, abs(z.imag)))

    M = model.total_positive_multiplicity
    Mhat = model.total_negative_multiplicity
    if model.sigma > 0:
        expect = (M + 1, Mhat + 1)
    elif model.mu > 0:
        expect = (M + 1, Mhat)
    elif model.mu < 0:
        expect = (M, Mhat + 1)
    else:
        expect = (M, Mhat)
    if (len(zeta), len(zeta_hat)) != expect:
        raise RootCountError(
            f"count law violated: (K, Khat) = ({len(zeta)}, {len(zeta_hat)}), "
            f"expected {expect} for sigma={model.sigma}, mu={model.mu}")

    for name, lst in (("zeta", zeta), ("zeta_hat", zeta_hat)):
        if lst and abs(lst[0].imag) != 0:
            raise RootCountError(f"{name}[0] = {lst[0]} is not real")

    for z in roots:
        try:
            resid = abs(model_mod.laplace_exponent(model, z) - q)
        except PoleError:
            raise RootCountError(f"root {z} sits on a pole")
        if resid > 1e-9 * max(1.0, abs(q)):
            raise ConvergenceError(f"root residual |psi(z)-q| = {resid:.2e} at z={z}")

    return RootSet(q=float(q), zeta=tuple(zeta), zeta_hat=tuple(zeta_hat))


def _nearest_positive_integer_distance(z: complex) -> float:
    n = round(z.real)
    if n < 1:
        return abs(z - 1)
    return abs(z - n)


@dataclass(frozen=True)
class AssumptionReport:
    passed: dict       # name -> bool for A.1 .. A.5
    warnings: tuple    # near-integer spacings inside the warning band

    @property
    def all_pass(self) -> bool:
        return all(self.passed.values())

    def failures(self) -> list:
        return [k for k, ok in self.passed.items() if not ok]


def check_assumptions(model: LevyModel, roots: RootSet) -> AssumptionReport:
    """Audit A.1-A.5 (the conditions excluding multiple gamma poles).

    A.1: every negative-side multiplicity is 1. A.2: no rhohat is a
    positive integer. A.3: no two rhohat differ by a nonzero integer.
    A.4: no multiple zeros in Re > 0. A.5: no two zeta differ by a
    nonzero integer. Integer checks use absolute tolerance 1e-8, with a
    warning band at 1e-4 (gamma ratios degrade before they blow up).
    """
    passed = {}
    warnings = []

    passed["A.1"] = all(t.multiplicity == 1 for t in model.negative_jumps)

    def near_integer(dist, what):
        if dist < INTEGER_SPACING_ATOL:
            return True
        if dist < INTEGER_SPACING_WARN:
            warnings.append(f"{what}: distance {dist:.2e} to an integer")
        return False

    ok = True
    for t in model.negative_jumps:
        if near_integer(_nearest_positive_integer_distance(t.rho),
                        f"rhohat={t.rho}"):
            ok = False
    passed["A.2"] = ok

    def spacing_ok(values, label):
        ok = True
        for i in range(len(values)):
            for j in range(i + 1, len(values)):
                d = values[j] - values[i]
                n = round(d.real)
                if n == 0:
                    continue
                if near_integer(abs(d - n), f"{label} spacing {values[i]},{values[j]}"):
                    ok = False
        return ok

    passed["A.3"] = spacing_ok([t.rho for t in model.negative_jumps], "rhohat")

    ok = True
    for i in range(roots.K):
        for j in range(i + 1, roots.K):
            if abs(roots.zeta[i] - roots.zeta[j]) < MULTIPLE_ROOT_RTOL * (
                    1 + abs(roots.zeta[i])):
                ok = False
    passed["A.4"] = ok

    passed["A.5"] = spacing_ok(list(roots.zeta), "zeta")

    return AssumptionReport(passed=passed, warnings=tuple(warnings))


def cramer_abscissa(roots: RootSet) -> float:
    """theta = zeta_1; bounds the Mellin strip Re(s) in (0, 1+theta)."""
    if roots.K == 0:
        return math.inf
    return roots.zeta[0].real
