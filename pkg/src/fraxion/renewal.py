"""Closed-form densities, counting objects and renewal functions of the
Mittag-Leffler renewal family, plus the classical Poisson/Erlang references.

Conventions (unit rate throughout):

  waiting density    phi(t)   = t^{a-1} E_{a,a}(-t^a)
  failure marginal   Phi(t)   = t^{2a-1} E_{a,2a}(-t^a)
  survival marginal  Psi(t)   = t^{a-1}/Gamma(a) - Phi(t)   ( = phi(t) )
  Erlang density     q_n(t)   = t^{na-1} E^n_{a,na}(-t^a), n-fold convolution
  counting object    P_n(t)   = ((l)_n/n!) t^{(n+l)a-1} E^{n+l}_{a,(n+l)a}(-t^a)
  renewal function   m(t)     = l t^{(l+1)a-1}/Gamma((l+1)a)

The P_n are generalized densities: they sum over n to t^{la-1}/Gamma(la),
not to 1, and the API never renormalizes them.  The probability-normalized
counting law of the same waiting-time process is classic_fpp_pmf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate, special

from . import specfun
from .errors import DomainError, QuadratureFailure


@dataclass(frozen=True)
class FracOrder:
    """Fractional order strictly inside (0, 1); endpoints rejected."""

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie strictly in (0,1), got {self.alpha}")


@dataclass(frozen=True)
class ProcessSpec:
    """A process of order alpha built from `fold` superposed components."""

    order: FracOrder
    fold: int = 1

    def __post_init__(self):
        if self.fold < 1 or self.fold != int(self.fold):
            raise DomainError(f"fold must be a positive integer, got {self.fold}")


def as_order(order) -> FracOrder:
    if isinstance(order, FracOrder):
        return order
    return FracOrder(float(order))


def as_spec(spec) -> ProcessSpec:
    if isinstance(spec, ProcessSpec):
        return spec
    if isinstance(spec, FracOrder):
        return ProcessSpec(spec, 1)
    order, fold = spec
    return ProcessSpec(as_order(order), int(fold))


def _check_t(t: float):
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"t must be positive and finite, got {t}")


def ml_density(order, t: float) -> float:
    """Waiting-time density phi(t) = t^{a-1} E_{a,a}(-t^a); the delta peak a
    renewal density may carry at the origin is excluded (t > 0 only)."""
    a = as_order(order).alpha
    _check_t(t)
    return t ** (a - 1.0) * specfun.ml_e2(a, a, -(t ** a)).value


def failure(order, t: float) -> float:
    """Failure marginal Phi(t) = t^{2a-1} E_{a,2a}(-t^a), the order-a
    fractional integral of the waiting density."""
    a = as_order(order).alpha
    _check_t(t)
    return t ** (2.0 * a - 1.0) * specfun.ml_e2(a, 2.0 * a, -(t ** a)).value


def survival(order, t: float) -> float:
    """Survival marginal Psi(t) = t^{a-1}/Gamma(a) - Phi(t).

    Equals the waiting density itself; the library computes the difference
    form here and keeps the identity as a verified property.
    """
    a = as_order(order).alpha
    _check_t(t)
    return t ** (a - 1.0) * float(special.rgamma(a)) - failure(order, t)


def erlang_density(spec, n: int, t: float) -> float:
    """Density of the n-th epoch: the (n*fold)-fold convolution power of the
    waiting density, t^{ka-1} E^k_{a,ka}(-t^a) with k = n*fold."""
    sp = as_spec(spec)
    if n < 1 or n != int(n):
        raise DomainError(f"n must be a positive integer, got {n}")
    _check_t(t)
    a = sp.order.alpha
    k = int(n) * sp.fold
    return t ** (k * a - 1.0) * specfun.mittag_leffler((a, k * a, float(k)), -(t ** a)).value


def counting_probability(spec, n: int, t: float, verify: bool = False,
                         verify_rel_tol: float = 1e-8) -> float:
    """Generalized counting object P_n(t) of the fold-l process.

    Returns the three-parameter closed form
        ((l)_n / n!) t^{(n+l)a-1} E^{n+l}_{a,(n+l)a}(-t^a).
    With verify=True the independent derivative form
        ((l)_n / n!) t^{(n+l)a-1} E^{(n+l-1)}_{a,a}(-t^a) / (n+l-1)!
    (term-by-term differentiated series) is evaluated as well and must agree
    to verify_rel_tol.
    """
    sp = as_spec(spec)
    if n < 0 or n != int(n):
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    _check_t(t)
    n = int(n)
    a, l = sp.order.alpha, sp.fold
    coef = float(special.poch(l, n)) / math.factorial(n)
    k = n + l
    value = coef * t ** (k * a - 1.0) * specfun.mittag_leffler((a, k * a, float(k)), -(t ** a)).value
    if verify:
        dv = specfun.mittag_leffler_deriv(a, a, k - 1, -(t ** a), method="series").value
        alt = coef * t ** (k * a - 1.0) * dv / math.factorial(k - 1)
        scale = max(abs(value), abs(alt), 1e-300)
        if abs(value - alt) > verify_rel_tol * scale:
            raise AssertionError(
                f"counting_probability forms disagree: {value} vs {alt} "
                f"(rel {abs(value - alt) / scale:.2e}) at n={n}, t={t}")
    return value


def renewal_function(spec, t: float) -> float:
    """m(t) = l t^{(l+1)a-1} / Gamma((l+1)a); reduces to t^{2a-1}/Gamma(2a)
    for a single component."""
    sp = as_spec(spec)
    _check_t(t)
    a, l = sp.order.alpha, sp.fold
    return l * t ** ((l + 1) * a - 1.0) * float(special.rgamma((l + 1) * a))


def classic_poisson_pmf(n: int, t: float) -> float:
    """p(n,t) = t^n e^{-t}/n!, unit rate."""
    if n < 0 or n != int(n):
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    _check_t(t)
    return math.exp(int(n) * math.log(t) - t - float(special.gammaln(n + 1)))


def classic_erlang_density(n: int, t: float) -> float:
    """q_n(t) = t^{n-1} e^{-t}/(n-1)!, unit rate."""
    if n < 1 or n != int(n):
        raise DomainError(f"n must be a positive integer, got {n}")
    _check_t(t)
    return math.exp((n - 1) * math.log(t) - t - float(special.gammaln(n)))


def classic_fpp_pmf(order, n: int, t: float) -> float:
    """Probability-normalized fractional counting pmf
    P{N(t)=n} = t^{an} E^{n+1}_{a,an+1}(-t^a); sums to 1 over n."""
    a = as_order(order).alpha
    if n < 0 or n != int(n):
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    _check_t(t)
    n = int(n)
    return t ** (a * n) * specfun.mittag_leffler((a, a * n + 1.0, n + 1.0), -(t ** a)).value


# truncation policy for the infinite sums over n (formal series in the source
# formulas): stop on relative stagnation, hard cap below
SUM_EPS = 1e-10
SUM_CAP = 500


def counting_sum(spec, t: float, weight_n: bool = False) -> tuple[float, int]:
    """Partial sum over n of P_n(t) (or n*P_n(t)); returns (sum, terms_used).

    Stops when a term falls below SUM_EPS * running_sum, capped at SUM_CAP.
    """
    sp = as_spec(spec)
    _check_t(t)
    total = 0.0
    for n in range(SUM_CAP):
        p = counting_probability(sp, n, t)
        total += (n * p) if weight_n else p
        if n > 2 and p * (n if weight_n else 1.0) < SUM_EPS * max(abs(total), 1e-300):
            return total, n + 1
    return total, SUM_CAP


def subordination_check(order, n: int, t: float, tol: float = 1e-6) -> float:
    """Right-hand side of the operational-time representation

        P_n(t) = int_0^oo (u^n/n!) e^{-u} (a u / t^{1+a}) M_a(u/t^a) du

    evaluated by adaptive quadrature (substituted to the scale-free variable
    u/t^a).  The caller compares against counting_probability; raises
    QuadratureFailure when the certified error exceeds tol.
    """
    a = as_order(order).alpha
    if n < 0 or n != int(n):
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    _check_t(t)
    n = int(n)
    ta = t ** a
    pref = a * t ** (a * n + a - 1.0) / math.factorial(n)

    def integrand(u):
        return u ** (n + 1) * math.exp(-u * ta) * specfun.mainardi(a, u).value

    # integrand decays like exp(-u t^a) times the superexponential M-tail
    v1, e1 = integrate.quad(integrand, 0.0, 8.0, limit=200)
    v2, e2 = integrate.quad(integrand, 8.0, 60.0 / min(ta, 1.0), limit=200)
    val = pref * (v1 + v2)
    err = pref * (e1 + e2)
    if err > tol:
        raise QuadratureFailure(
            f"subordination integral error {err:.2e} exceeds {tol} at n={n}, t={t}")
    return val
