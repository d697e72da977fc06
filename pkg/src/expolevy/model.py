"""Levy process with rational-transform jumps.

The process is X_t = sigma W_t + mu t + compound Poisson jumps whose density
is a mixed polynomial-exponential on each half-line:

    pi(x) = sum_j sum_i alpha_ij x^(i-1) exp(-rho_j x)        for x > 0,
    pi(x) = sum_j sum_i alphahat_ij |x|^(i-1) exp(rhohat_j x) for x < 0,

which makes the Laplace exponent psi(z) = log E[exp(z X_1)] a rational
function of z. This module holds the model container, its validation, and
closed-form evaluation of pi, the jump intensity lambda, psi and E[X_1].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError

# Relative guard radius around the poles of psi.
POLE_GUARD = 1e-10


@dataclass(frozen=True)
class JumpTerm:
    """One exponential family on one side of the jump density.

    rho is the decay rate (Re(rho) > 0); alphas[i-1] multiplies x^(i-1) in
    the density, so the multiplicity m equals len(alphas) and the last
    coefficient must be nonzero.
    """

    rho: complex
    alphas: tuple

    def __post_init__(self):
        object.__setattr__(self, "rho", complex(self.rho))
        object.__setattr__(self, "alphas", tuple(complex(a) for a in self.alphas))

    @property
    def multiplicity(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class LevyModel:
    sigma: float
    mu: float
    positive_jumps: tuple = ()
    negative_jumps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "positive_jumps", tuple(
            t if isinstance(t, JumpTerm) else JumpTerm(*t) for t in self.positive_jumps))
        object.__setattr__(self, "negative_jumps", tuple(
            t if isinstance(t, JumpTerm) else JumpTerm(*t) for t in self.negative_jumps))

    @property
    def total_positive_multiplicity(self) -> int:
        return sum(t.multiplicity for t in self.positive_jumps)

    @property
    def total_negative_multiplicity(self) -> int:
        return sum(t.multiplicity for t in self.negative_jumps)


def _conjugate_partner_missing(terms) -> bool:
    # every non-real rho needs a partner with conjugate rho and alphas
    unmatched = [t for t in terms if abs(t.rho.imag) > 1e-14 * (1 + abs(t.rho))]
    while unmatched:
        t = unmatched.pop()
        for k, other in enumerate(unmatched):
            if (abs(other.rho - t.rho.conjugate()) <= 1e-12 * (1 + abs(t.rho))
                    and len(other.alphas) == len(t.alphas)
                    and all(abs(a - b.conjugate()) <= 1e-12 * (1 + abs(b))
                            for a, b in zip(other.alphas, t.alphas))):
                unmatched.pop(k)
                break
        else:
            return True
    return False


def validate(model: LevyModel) -> list:
    """Check the structural invariants; return the list of violations.

    An empty list means the model is valid. Positivity of pi is checked on
    a log-spaced grid of 2000 points per side spanning
    [1e-6, 50/min Re(rho)], since no analytic criterion is available for
    complex rho.
    """
    violations = []
    if model.sigma < 0:
        violations.append("sigma < 0")
    if (model.sigma == 0 and model.mu == 0
            and not model.positive_jumps and not model.negative_jumps):
        violations.append("degenerate model: sigma = mu = 0 and no jumps")

    for side, terms in (("positive", model.positive_jumps),
                        ("negative", model.negative_jumps)):
        for t in terms:
            if t.rho.real <= 0:
                violations.append(f"{side} term rho={t.rho}: Re(rho) <= 0")
            if len(t.alphas) == 0:
                violations.append(f"{side} term rho={t.rho}: empty alpha list")
            elif t.alphas[-1] == 0:
                violations.append(f"{side} term rho={t.rho}: trailing alpha is zero")
        rhos = [t.rho for t in terms]
        for i in range(len(rhos)):
            for j in range(i + 1, len(rhos)):
                if abs(rhos[i] - rhos[j]) <= 1e-12 * (1 + abs(rhos[i])):
                    violations.append(f"duplicate {side} rho={rhos[i]}")
        if _conjugate_partner_missing(terms):
            violations.append(f"{side} side: non-real rho without conjugate partner")

    if violations:
        return violations

    for sign, terms in ((1.0, model.positive_jumps), (-1.0, model.negative_jumps)):
        if not terms:
            continue
        rmin = min(t.rho.real for t in terms)
        grid = np.geomspace(1e-6, 50.0 / rmin, 2000)
        vals = np.array([levy_density(model, sign * x) for x in grid])
        scale = 1.0 + np.max(np.abs(vals))
        if np.min(vals) < -1e-12 * scale:
            side = "positive" if sign > 0 else "negative"
            violations.append(f"negative jump density on the {side} side "
                              f"(min {np.min(vals):.3e})")
    return violations


def levy_density(model: LevyModel, x: float) -> float:
    """Evaluate the jump density pi(x); x = 0 is outside the domain."""
    if x == 0:
        raise DomainError("levy_density: x = 0")
    total = 0j
    if x > 0:
        for t in model.positive_jumps:
            e = np.exp(-t.rho * x)
            total += sum(a * x ** i for i, a in enumerate(t.alphas)) * e
    else:
        ax = -x
        for t in model.negative_jumps:
            e = np.exp(-t.rho * ax)
            total += sum(a * ax ** i for i, a in enumerate(t.alphas)) * e
    # conjugate-pair structure leaves only a rounding-level imaginary residue
    return total.real


def jump_intensity(model: LevyModel) -> float:
    """Total jump rate lambda = integral of pi over the real line."""
    total = 0j
    for terms in (model.positive_jumps, model.negative_jumps):
        for t in terms:
            for i, a in enumerate(t.alphas, start=1):
                total += a * math.factorial(i - 1) / t.rho ** i
    return total.real


def _check_pole(model: LevyModel, z: complex):
    for t in model.positive_jumps:
        if abs(z - t.rho) < POLE_GUARD * (1 + abs(t.rho)):
            raise PoleError(f"laplace_exponent: z={z} at pole rho={t.rho}",
                            pole=t.rho, multiplicity=t.multiplicity)
    for t in model.negative_jumps:
        if abs(z + t.rho) < POLE_GUARD * (1 + abs(t.rho)):
            raise PoleError(f"laplace_exponent: z={z} at pole -rhohat={-t.rho}",
                            pole=-t.rho, multiplicity=t.multiplicity)


def laplace_exponent(model: LevyModel, z: complex) -> complex:
    """Evaluate psi(z) from the partial-fraction decomposition.

    psi(z) = sigma^2 z^2 / 2 + mu z
             + sum alpha_ij (i-1)! / (rho_j - z)^i
             + sum alphahat_ij (i-1)! / (rhohat_j + z)^i  -  lambda.

    Raises PoleError when z is within the relative guard radius of a pole.
    """
    z = complex(z)
    _check_pole(model, z)
    out = 0.5 * model.sigma ** 2 * z * z + model.mu * z
    for t in model.positive_jumps:
        for i, a in enumerate(t.alphas, start=1):
            out += a * math.factorial(i - 1) / (t.rho - z) ** i
    for t in model.negative_jumps:
        for i, a in enumerate(t.alphas, start=1):
            out += a * math.factorial(i - 1) / (t.rho + z) ** i
    return out - jump_intensity(model)


def laplace_exponent_deriv(model: LevyModel, z: complex) -> complex:
    """psi'(z), used by the Newton polish of the root solver."""
    z = complex(z)
    _check_pole(model, z)
    out = model.sigma ** 2 * z + model.mu
    for t in model.positive_jumps:
        for i, a in enumerate(t.alphas, start=1):
            out += a * math.factorial(i - 1) * i / (t.rho - z) ** (i + 1)
    for t in model.negative_jumps:
        for i, a in enumerate(t.alphas, start=1):
            out -= a * math.factorial(i - 1) * i / (t.rho + z) ** (i + 1)
    return out


def mean(model: LevyModel) -> float:
    """E[X_1] = psi'(0), in closed form."""
    out = complex(model.mu)
    for t in model.positive_jumps:
        for i, a in enumerate(t.alphas, start=1):
            out += a * math.factorial(i) / t.rho ** (i + 1)
    for t in model.negative_jumps:
        for i, a in enumerate(t.alphas, start=1):
            out -= a * math.factorial(i) / t.rho ** (i + 1)
    return out.real


# ---------------------------------------------------------------------------
# JSON round-trip. Complex numbers are stored as [re, im] pairs.

def _c2j(z):
    z = complex(z)
    return [z.real, z.imag]


def _j2c(v):
    if isinstance(v, (int, float)):
        return complex(v)
    return complex(v[0], v[1])


def model_to_dict(model: LevyModel) -> dict:
    return {
        "sigma": model.sigma,
        "mu": model.mu,
        "positive_jumps": [
            {"rho": _c2j(t.rho), "alphas": [_c2j(a) for a in t.alphas]}
            for t in model.positive_jumps],
        "negative_jumps": [
            {"rho": _c2j(t.rho), "alphas": [_c2j(a) for a in t.alphas]}
            for t in model.negative_jumps],
    }


def model_from_dict(d: dict) -> LevyModel:
    return LevyModel(
        sigma=d["sigma"],
        mu=d["mu"],
        positive_jumps=tuple(
            JumpTerm(_j2c(t["rho"]), tuple(_j2c(a) for a in t["alphas"]))
            for t in d.get("positive_jumps", [])),
        negative_jumps=tuple(
            JumpTerm(_j2c(t["rho"]), tuple(_j2c(a) for a in t["alphas"]))
            for t in d.get("negative_jumps", [])),
    )


def load_model(path) -> LevyModel:
    with open(path) as f:
        return model_from_dict(json.load(f))


def dump_model(model: LevyModel, path):
    with open(path, "w") as f:
        json.dump(model_to_dict(model), f, indent=2)
        f.write("\n")
