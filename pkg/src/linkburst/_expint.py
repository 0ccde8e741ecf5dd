"""Generalized exponential integral E_a(r) for real order, vectorized.

E_a(r) = int_1^inf u^-a exp(-r u) du, the normalizer of a power law with
exponential cutoff. scipy only ships integer orders, and the textbook
incomplete-gamma recurrences cancel catastrophically just above integer a,
so two branches are used instead:

* r >= 1: Legendre continued fraction (modified Lentz), valid for any a.
* r < 1: ascending series with the pole term at k = m (m the integer
  nearest a - 1) merged analytically with Gamma(1 - a), which removes the
  cancellation at integer a.
"""
import numpy as np
from scipy.special import gammaln, zeta

_EULER = 0.5772156649015329
_TINY = 1e-300
_SERIES_TERMS = 40
_CF_MAXITER = 500
_R_SPLIT = 1.0

# lgamma(1+e)/e = -euler + sum_{k>=2} (-1)^k zeta(k) e^(k-1) / k
_LGAMMA1P_COEF = np.array(
    [(-1) ** k * zeta(k) / k for k in range(2, 34)], dtype=float)


def _lgamma1p_over(eps):
    """lgamma(1+eps)/eps, accurate down to eps = 0."""
    out = np.empty_like(eps)
    small = np.abs(eps) < 0.25
    e = eps[small]
    acc = np.zeros_like(e)
    for c in _LGAMMA1P_COEF[::-1]:
        acc = acc * e + c
    out[small] = -_EULER + acc * e
    big = ~small
    out[big] = gammaln(1.0 + eps[big]) / eps[big]
    return out


def _series(a, r):
    s = 1.0 - a
    m = np.maximum(0, np.rint(-s)).astype(np.int64)
    eps = s + m
    lnr = np.log(r)

    # L(eps)/eps with L = lgamma(1+eps) - sum_{i<=m} log1p(-eps/i)
    q = _lgamma1p_over(eps)
    nz = eps != 0
    for i in range(1, int(m.max(initial=0)) + 1):
        sel = m >= i
        term = np.full(eps.shape, -1.0 / i)
        both = sel & nz
        term[both] = np.log1p(-eps[both] / i) / eps[both]
        q -= np.where(sel, term, 0.0)
    q -= lnr
    x = eps * q
    phi = np.ones_like(x)
    xnz = x != 0
    phi[xnz] = np.expm1(x[xnz]) / x[xnz]

    lfact_m = gammaln(m + 1.0)
    sign_m = np.where(m % 2 == 0, 1.0, -1.0)
    total = sign_m * np.exp(m * lnr - lfact_m) * q * phi

    # remaining terms (-r)^k / (k! (s+k)) for k != m
    pw = np.ones_like(r)
    for k in range(_SERIES_TERMS):
        if k > 0:
            pw = pw * (-r) / k
        term = np.where(m == k, 0.0, pw / np.where(m == k, 1.0, s + k))
        total = total - term
    return np.log(total)


def _contfrac(a, r):
    s = 1.0 - a
    b = r + 1.0 - s
    c = np.full_like(r, 1.0 / _TINY)
    d = 1.0 / np.where(np.abs(b) < _TINY, _TINY, b)
    h = d.copy()
    out = np.empty_like(r)
    idx = np.arange(r.size)
    for i in range(1, _CF_MAXITER + 1):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d[np.abs(d) < _TINY] = _TINY
        c = b + an / c
        c[np.abs(c) < _TINY] = _TINY
        d = 1.0 / d
        delta = d * c
        h = h * delta
        done = np.abs(delta - 1.0) < 4e-16
        if done.any():
            out[idx[done]] = h[done]
            keep = ~done
            idx, s, b, c, d, h = idx[keep], s[keep], b[keep], c[keep], d[keep], h[keep]
            if idx.size == 0:
                break
    out[idx] = h
    return -r + np.log(out)


def log_expint(a, r):
    """Return log E_a(r) for a > 0, r > 0 (a <= 1 needs r > 0 strictly).

    Args:
        a: order, array-like.
        r: argument, array-like; broadcast against ``a``.
    """
    a, r = np.broadcast_arrays(np.asarray(a, dtype=float),
                               np.asarray(r, dtype=float))
    shape = a.shape
    a = a.ravel()
    r = r.ravel()
    out = np.empty(a.shape, dtype=float)
    lo = r < _R_SPLIT
    if lo.any():
        out[lo] = _series(a[lo], r[lo])
    hi = ~lo
    if hi.any():
        out[hi] = _contfrac(a[hi], r[hi])
    return out.reshape(shape)
