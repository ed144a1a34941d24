"""Modified Bessel function of the second kind, real order.

Regime split: Temme's series for x < 2, a Steed-type continued fraction for
2 <= x <= 30 and the large-argument asymptotic expansion beyond.  Each
branch produces K at a fractional order mu in [-1/2, 1/2] together with
K at mu + 1; the target order is reached by the (upward stable) recurrence
K_{s+1} = K_{s-1} + (2 s / x) K_s.
"""

from __future__ import annotations

import math

_EULER_GAMMA = 0.5772156649015329
_ZETA3 = 1.2020569031595943
# 1/Gamma(1+z) = 1 + g z + a2 z^2 + a3 z^3 + ...
_A3 = _EULER_GAMMA**3 / 6.0 - _EULER_GAMMA * math.pi**2 / 12.0 + _ZETA3 / 3.0

_MAX_ITER = 400
_EPS = 1.0e-17


def _temme_gammas(mu: float):
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    if abs(mu) < 1.0e-5:
        gam1 = -_EULER_GAMMA - _A3 * mu * mu
    else:
        gam1 = (gammi - gampl) / (2.0 * mu)
    gam2 = 0.5 * (gammi + gampl)
    return gam1, gam2, gampl, gammi


def _k_series(mu: float, x: float):
    """Temme series for (K_mu, K_{mu+1}), valid for x <= 2, |mu| <= 1/2."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < 1.0e-15 else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < 1.0e-15 else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    summ = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    d2 = x2 * x2
    sum1 = p
    for i in range(1, _MAX_ITER):
        ff = (i * ff + p + q) / (i * i - mu * mu)
        c *= d2 / i
        p /= i - mu
        q /= i + mu
        dele = c * ff
        summ += dele
        sum1 += c * (p - i * ff)
        if abs(dele) < abs(summ) * _EPS:
            break
    return summ, sum1 * (2.0 / x)


def _k_continued_fraction(mu: float, x: float):
    """Steed continued fraction for (K_mu, K_{mu+1}), x >= 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAX_ITER):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    h = a1 * h
    rkmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    return rkmu, rkmu * (mu + x + 0.5 - h) / x


def _k_asymptotic_one(mu: float, x: float) -> float:
    mu4 = 4.0 * mu * mu
    term = 1.0
    s = 1.0
    for k in range(1, 40):
        term *= (mu4 - (2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        s += term
        if abs(term) < _EPS * abs(s):
            break
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * s


def besselk(nu: float, x: float) -> float:
    """K_nu(x) for real order and x > 0 (K is even in the order)."""
    if x <= 0.0:
        raise ValueError("besselk requires x > 0")
    nu = abs(float(nu))
    m = int(math.floor(nu + 0.5))
    mu = nu - m
    if x < 2.0:
        kmu, kmu1 = _k_series(mu, x)
    elif x <= 30.0:
        kmu, kmu1 = _k_continued_fraction(mu, x)
    else:
        kmu, kmu1 = _k_asymptotic_one(mu, x), _k_asymptotic_one(mu + 1.0, x)
    for i in range(1, m):
        kmu, kmu1 = kmu1, kmu + (2.0 * (mu + i) / x) * kmu1
    return kmu1 if m > 0 else kmu
