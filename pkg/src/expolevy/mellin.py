"""Mellin transform M(s) = E[I_q^(s-1)] of the exponential functional.

M(s) = A^(1-s) Gamma(s) G(s)/G(1) on the strip Re(s) in (0, 1+theta), where

    G(s) = prod Gamma(1+zeta_j-s) / prod Gamma(1+rho_j-s)^(m_j)
         * prod Gamma(rhohat_j+s)^(mhat_j) / prod Gamma(zetahat_j+s)

and A is sigma^2/2, |mu| or q+lambda depending on the case. Everything is
evaluated in log space; with up to a few dozen gamma factors the direct
product would overflow doubles long before the transform itself does.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.special as sps

from . import model as model_mod
from . import roots as roots_mod
from .errors import MomentError, PoleError, PreconditionError, StripError
from .model import LevyModel
from .roots import RootSet

_NONPOS_INT_TOL = 1e-12


def _near_nonpositive_integer(z: complex) -> bool:
    if z.real > 0.5:
        return False
    n = round(z.real)
    return n <= 0 and abs(z - n) < _NONPOS_INT_TOL


def log_gamma(z):
    """Principal-branch log Gamma, continuous on the cut plane.

    Scalars near a nonpositive integer raise PoleError; array input is
    passed through unchecked (used on pole-free vertical contours).
    """
    if np.isscalar(z) or isinstance(z, complex):
        zc = complex(z)
        if _near_nonpositive_integer(zc):
            raise PoleError(f"log_gamma: pole at z={zc}", pole=round(zc.real))
        return complex(sps.loggamma(zc))
    return sps.loggamma(np.asarray(z, dtype=complex))


def reciprocal_gamma(z) -> complex:
    """Entire function 1/Gamma(z); exactly 0.0 at nonpositive integers."""
    zc = complex(z)
    if _near_nonpositive_integer(zc):
        return 0.0 + 0.0j
    return complex(sps.rgamma(zc))


@dataclass(frozen=True)
class MellinParams:
    """Everything needed to evaluate M(s) and the density machinery."""

    A: float
    q: float
    sigma: float
    mu: float
    lam: float
    zeta: tuple
    zeta_hat: tuple
    rho: tuple        # (rho_j, m_j) pairs, positive side
    rho_hat: tuple    # (rhohat_j, mhat_j) pairs
    theta: float
    logG1: complex

    @property
    def K(self) -> int:
        return len(self.zeta)

    @property
    def Khat(self) -> int:
        return len(self.zeta_hat)

    @property
    def M(self) -> int:
        return sum(m for _, m in self.rho)

    @property
    def Mhat(self) -> int:
        return sum(m for _, m in self.rho_hat)


def _log_G_raw(zeta, zeta_hat, rho, rho_hat, s):
    """log G(s); s may be scalar or ndarray (complex)."""
    s = np.asarray(s, dtype=complex)
    out = np.zeros_like(s)
    for z in zeta:
        out = out + sps.loggamma(1 + z - s)
    for r, m in rho:
        out = out - m * sps.loggamma(1 + r - s)
    for r, m in rho_hat:
        out = out + m * sps.loggamma(r + s)
    for z in zeta_hat:
        out = out - sps.loggamma(z + s)
    return out


def build_params(model: LevyModel, q: float, roots: RootSet) -> MellinParams:
    """Assemble MellinParams; requires q > 0 or (q = 0 and E[X_1] < 0)."""
    if q < 0:
        raise PreconditionError("build_params: q must be nonnegative")
    if q == 0 and model_mod.mean(model) >= 0:
        raise PreconditionError("build_params: q = 0 requires E[X_1] < 0")

    lam = model_mod.jump_intensity(model)
    if model.sigma > 0:
        A = 0.5 * model.sigma ** 2
    elif model.mu != 0:
        A = abs(model.mu)
    else:
        A = q + lam

    zeta = tuple(roots.zeta)
    zeta_hat = tuple(roots.zeta_hat)
    rho = tuple((t.rho, t.multiplicity) for t in model.positive_jumps)
    rho_hat = tuple((t.rho, t.multiplicity) for t in model.negative_jumps)
    logG1 = complex(_log_G_raw(zeta, zeta_hat, rho, rho_hat, 1.0))
    return MellinParams(A=A, q=float(q), sigma=model.sigma, mu=model.mu,
                        lam=lam, zeta=zeta, zeta_hat=zeta_hat, rho=rho,
                        rho_hat=rho_hat,
                        theta=roots_mod.cramer_abscissa(roots), logG1=logG1)


def params_from_model(model: LevyModel, q: float) -> MellinParams:
    """Convenience: solve the roots and build the params in one step."""
    return build_params(model, q, roots_mod.solve(model, q))


def _check_G_poles(params: MellinParams, s: complex):
    for z in params.zeta:
        if _near_nonpositive_integer(1 + z - s):
            raise PoleError(f"big_G: Gamma(1+zeta-s) pole at s={s}", pole=s)
    for r, _ in params.rho_hat:
        if _near_nonpositive_integer(r + s):
            raise PoleError(f"big_G: Gamma(rhohat+s) pole at s={s}", pole=s)


def big_G(params: MellinParams, s):
    """log G(s). Scalar input is pole-checked; arrays are not."""
    if np.isscalar(s) or isinstance(s, complex):
        _check_G_poles(params, complex(s))
        return complex(_log_G_raw(params.zeta, params.zeta_hat,
                                  params.rho, params.rho_hat, complex(s)))
    return _log_G_raw(params.zeta, params.zeta_hat,
                      params.rho, params.rho_hat, s)


def _in_strip(params: MellinParams, s) -> bool:
    re = np.real(np.asarray(s))
    return bool(np.all(re > 0) and np.all(re < 1 + params.theta))


def log_mellin(params: MellinParams, s):
    """log M(s) without exponentiation; s scalar or ndarray in the strip."""
    s_arr = np.asarray(s, dtype=complex)
    out = ((1 - s_arr) * math.log(params.A)
           + sps.loggamma(s_arr)
           + _log_G_raw(params.zeta, params.zeta_hat, params.rho,
                        params.rho_hat, s_arr)
           - params.logG1)
    return out if out.shape else complex(out)


def mellin_transform(params: MellinParams, s):
    """M(s) = E[I_q^(s-1)] for Re(s) in the open strip (0, 1+theta)."""
    if not _in_strip(params, s):
        raise StripError(f"mellin_transform: Re(s)={np.real(s)} outside "
                         f"(0, {1 + params.theta})")
    if np.isscalar(s) or isinstance(s, complex):
        _check_G_poles(params, complex(s))
        if _near_nonpositive_integer(complex(s)):
            raise PoleError(f"mellin_transform: Gamma(s) pole at s={s}", pole=s)
        return cmath.exp(log_mellin(params, complex(s)))
    return np.exp(log_mellin(params, s))


def joint_transform(model: LevyModel, q: float, u: complex, s: complex,
                    params: MellinParams | None = None) -> complex:
    """E[exp(u X_e(q)) I_q^(s-1)] = q A^(1-s)/(q-psi(u)) Gamma(s) G(s+u)/G(1+u).

    Needs q > 0, Re(u) in (-zetahat_1, zeta_1) and
    Re(s) in (0, 1+zeta_1-Re(u)); u = 0 reduces to mellin_transform(s).
    """
    if q <= 0:
        raise PreconditionError("joint_transform: q must be positive")
    if params is None:
        params = params_from_model(model, q)
    u = complex(u)
    s = complex(s)
    zeta1 = params.theta
    zetahat1 = params.zeta_hat[0].real if params.Khat else math.inf
    if not (-zetahat1 < u.real < zeta1):
        raise StripError(f"joint_transform: Re(u)={u.real} outside "
                         f"({-zetahat1}, {zeta1})")
    if not (0 < s.real < 1 + zeta1 - u.real):
        raise StripError(f"joint_transform: Re(s)={s.real} outside "
                         f"(0, {1 + zeta1 - u.real})")
    psi_u = model_mod.laplace_exponent(model, u)
    log_core = ((1 - s) * math.log(params.A) + log_gamma(s)
                + big_G(params, s + u) - big_G(params, 1 + u))
    return q / (q - psi_u) * cmath.exp(log_core)


def moment(params: MellinParams, n: int) -> float:
    """E[I_q^n] = M(n+1); exists only for n < theta."""
    if n < 1 or n != int(n):
        raise PreconditionError("moment: n must be a positive integer")
    if n >= params.theta:
        raise MomentError(f"moment of order {n} does not exist "
                          f"(theta = {params.theta})")
    v = mellin_transform(params, float(n) + 1.0)
    return v.real
