"""Compute reference values independently of the package and freeze them.

Uses only the standard library and mpmath (50-digit arithmetic), so the
numbers do not share code paths with linkburst. Output goes to
tests/oracle_values.json; rerun after changing an oracle definition.
"""
import json
import math
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50
OUT = Path(__file__).resolve().parents[1] / "tests" / "oracle_values.json"


def second_difference(n, dt=1):
    d = []
    total = 0
    for x in n:
        total += x
        d.append(total)
    at = lambda t: d[t] if t >= 0 else 0
    return [(at(t) - 2 * at(t - dt) + at(t - 2 * dt)) / dt**2 for t in range(len(n))]


def label(a, c, th1=2, th2=-2):
    if a > th1:
        return "acc"
    if a < th2:
        return "dec"
    if c:
        return "cruise"
    return "inact"


def scripted_node():
    # weekly counts [0, 3, 8, 8, 4, 0]; the node joins in week 1
    n = [3, 8, 8, 4, 0]
    a = second_difference(n)
    labels = [label(x, k >= 1) for x, k in zip(a, n)]
    life = len(n)
    deg = sum(n)
    psi_l = {p: sum(1 for s in labels if s == p) / life for p in ("acc", "dec", "cruise", "inact")}
    psi_e = {p: sum(k for s, k in zip(labels, n) if s == p) / deg
             for p in ("acc", "dec", "cruise", "inact")}
    return dict(n=n, join_week=1, a=a, labels=labels, psi_l=psi_l, psi_e=psi_e)


def exp_fit(gaps):
    mu = mp.mpf(len(gaps)) / mp.fsum(gaps)
    ll = len(gaps) * mp.log(mu) - mu * mp.fsum(gaps)
    return dict(gaps=gaps, mu=float(mu), loglik=float(ll), aic=float(2 - 2 * ll))


def log_expint(a, r):
    # two independent routes: incomplete gamma closed form and direct quadrature
    closed = mp.log(mp.gammainc(1 - a, r) * mp.mpf(r) ** (a - 1))
    quad = mp.log(mp.quad(lambda u: u ** (-a) * mp.exp(-r * u), [1, 2, 10, mp.inf]))
    assert abs(closed - quad) < 1e-12 * max(1, abs(closed)), (a, r)
    return float(closed)


def pareto_cdf(t, alpha, lam, xmin):
    f = lambda x: x ** (-alpha) * mp.exp(-x / lam)
    pts = [xmin] + [p for p in (10, 1e3, 1e5, 1e6, 1e7) if p > xmin] + [mp.inf]
    z = mp.quad(f, pts)
    pts_t = [xmin] + [p for p in (10, 1e3, 1e5, 1e6) if xmin < p < t] + [t]
    return float(mp.quad(f, pts_t) / z)


def acceptance(alpha, lam, xmin):
    # Pareto(alpha, xmin) proposal accepted with exp(-(t - xmin)/lam); alpha > 1
    g = lambda t: (alpha - 1) / xmin * (t / xmin) ** (-alpha) * mp.exp(-(t - xmin) / lam)
    return float(mp.quad(g, [xmin, 10 * xmin, 1e3 * xmin, lam, mp.inf]))


def main():
    oracles = {
        "scripted_node": scripted_node(),
        "exp_fit_123": exp_fit([1, 2, 3]),
        "powerlaw_1248_alpha": float(1 + 4 / (mp.log(2) + mp.log(4) + mp.log(8))),
        "log_expint": [dict(a=a, r=r, value=log_expint(a, r))
                       for a in (-2.5, -1.0, 0.0, 0.3, 1.0, 1.5, 2.0, 3.7)
                       for r in (1e-7, 1e-3, 0.2, 0.99, 1.0, 3.0, 40.0)],
        "pareto_cdf": [dict(t=t, alpha=1.0, lam=1e6, xmin=1.0, value=pareto_cdf(t, 1.0, 1e6, 1.0))
                       for t in (2.0, 10.0, 1e3, 1e5, 1e6, 3e6)],
        "acceptance": [dict(alpha=a, lam=lam, xmin=x, value=acceptance(a, lam, x))
                       for a, lam, x in ((1.5, 1e3, 1.0), (2.5, 10.0, 1.0), (1.8, 50.0, 5.0))],
        "nearest_rank_q80_tenths": 0.8,
    }
    OUT.write_text(json.dumps(oracles, indent=2) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
