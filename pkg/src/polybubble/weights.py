"""Weighted norms adapted to a bubble-tree (the Psi weight, the star and
double-star norms, the eta control sequences) and numerical verifiers for the
convolution-integral lemmas: Giraud's lemma and the bubble-tree estimates it
feeds.

Verification here means measured boundedness: the source bounds carry
unspecified constants, so each verifier reports LHS/RHS ratios across sweeps
and the tests check stability/decay, not particular values.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .bubbles import positive_bubble, theta
from .quadrature import (Ball, BallMinusBalls, Singularity,
                         integrate_axisymmetric, integrate_volume)
from .radial import critical_exponent
from .tree import InfluenceData, TreeConfig, classify, epsilon

__all__ = [
    "psi_weight",
    "star_norm",
    "starstar_norm",
    "eta_sequences",
    "giraud_verify",
    "convolution_bound_verify",
    "ratio_table_csv",
    "weight_grid",
]


# ---------------------------------------------------------------------------
# Weights and norms
# ---------------------------------------------------------------------------

def psi_weight(cfg: TreeConfig, y) -> np.ndarray:
    """Psi(y) = sum_i theta_i^{2-2k} B_i + sum_{i != j} B_j^{2#-2} B_i with
    indices running over 0..N and the zeroth profile B^0 = 1, theta^0 = 1."""
    y = np.atleast_2d(np.asarray(y, float))
    n, k = cfg.n, cfg.k
    ts = critical_exponent(n, k)
    N = len(cfg.bubbles)
    B = [np.ones(len(y))] + [positive_bubble(b, y) for b in cfg.bubbles]
    out = np.zeros(len(y))
    for i, b in enumerate(cfg.bubbles):
        out += theta(b, y) ** (2 - 2 * k) * B[i + 1]
    for i in range(N + 1):
        for j in range(N + 1):
            if i != j:
                out += B[j] ** (ts - 2.0) * B[i]
    return out


def _weight_denominator(cfg: TreeConfig, l: int, y) -> np.ndarray:
    y = np.atleast_2d(np.asarray(y, float))
    den = np.ones(len(y))
    for b in cfg.bubbles:
        den += theta(b, y) ** (-l) * positive_bubble(b, y)
    return den


def weight_grid(cfg: TreeConfig, count: int = 600, seed: int = 0) -> np.ndarray:
    """Documented sample grid on the closed domain: shells around each bubble
    center at dyadic multiples of its scale, plus uniform background."""
    rng = np.random.default_rng(seed)
    n = cfg.n
    dom = cfg.domain
    pts = [np.asarray(dom.center, float)[None, :]]
    for b in cfg.bubbles:
        radius = 0.5 * b.mu
        while radius < 2.0 * dom.radius:
            dirs = rng.normal(size=(12, n))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            pts.append(b.center + radius * dirs)
            radius *= 2.0
        pts.append(b.center[None, :])
    m = max(count, 64)
    dirs = rng.normal(size=(m, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = dom.radius * rng.uniform(0, 1, size=m) ** (1.0 / n)
    pts.append(np.asarray(dom.center) + radii[:, None] * dirs)
    pts = np.concatenate(pts, axis=0)
    return pts[dom.contains(pts)][:count + 13 * len(cfg.bubbles)]


def star_norm(phi, cfg: TreeConfig, grid) -> float:
    """max over the grid of sum_{l=0}^{2k-1} |grad^l phi| / (1 + sum theta^{-l} B).

    phi must expose value(points) and tensor_norm(l, points).
    """
    grid = np.atleast_2d(np.asarray(grid, float))
    total = np.zeros(len(grid))
    for l in range(2 * cfg.k):
        mag = np.abs(phi.value(grid)) if l == 0 else phi.tensor_norm(l, grid)
        total += mag / _weight_denominator(cfg, l, grid)
    return float(np.max(total))


def starstar_norm(R, cfg: TreeConfig, grid, eta: float) -> float:
    """max over the grid of |R| / (Psi + eta sum_{i=0..N} B_i^{2#-1})."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    grid = np.atleast_2d(np.asarray(grid, float))
    ts = critical_exponent(cfg.n, cfg.k)
    den = psi_weight(cfg, grid) + eta * np.ones(len(grid))  # index-0 profile
    for b in cfg.bubbles:
        den += eta * positive_bubble(b, grid) ** (ts - 1.0)
    vals = np.abs(np.asarray(R(grid), float))
    return float(np.max(vals / den))


# ---------------------------------------------------------------------------
# Quadrature helpers for convolution integrals
# ---------------------------------------------------------------------------

def _common_axis(cfg: TreeConfig, extra_points=()):
    """A symmetry axis through the domain center covering all bubble centers
    and the extra points, or None if the configuration is not collinear."""
    dom_c = np.asarray(cfg.domain.center, float)
    pts = [np.asarray(b.center, float) for b in cfg.bubbles]
    pts += [np.asarray(p, float) for p in extra_points]
    rel = [p - dom_c for p in pts]
    rel = [r for r in rel if np.linalg.norm(r) > 1e-12]
    if not rel:
        e = np.zeros(cfg.n)
        e[0] = 1.0
        return (dom_c, e)
    d = rel[0] / np.linalg.norm(rel[0])
    for r in rel[1:]:
        if np.linalg.norm(r - (r @ d) * d) > 1e-10:
            return None
    return (dom_c, d)


def _conv_integral(cfg: TreeConfig, x, expo: float, weight, peak_centers,
                   hole: Ball | None = None, seed: int = 0,
                   tol: float = 5e-4) -> tuple[float, float]:
    """int_domain |x-y|^{expo} * weight(y) dy with expo < 0.

    Declares the kernel singularity at x and the weight peaks; uses the
    axisymmetric reduction when everything is collinear, QMC otherwise.
    Returns (value, error_estimate).
    """
    x = np.asarray(x, float)
    n = cfg.n
    sigma = -expo
    sings = [Singularity(tuple(x), sigma, 0.0)]
    for (c, scale) in peak_centers:
        sings.append(Singularity(tuple(np.asarray(c, float)), 0.0, scale))
    base = cfg.domain
    if hole is not None:
        dom = BallMinusBalls(Ball(tuple(base.center), base.radius), (hole,),
                             singularities=tuple(sings))
    else:
        dom = Ball(tuple(base.center), base.radius, singularities=tuple(sings))

    def f(y):
        d = np.linalg.norm(y - x, axis=1)
        return np.maximum(d, 1e-300) ** expo * weight(y)

    axis = _common_axis(cfg, [x] + [c for c, _ in peak_centers])
    if axis is not None:
        res = integrate_axisymmetric(f, dom, axis[0], axis[1])
    else:
        res = integrate_volume(f, dom, seed=seed, n_points=2**13)
    return res.value, res.error_estimate


def sample_x_points(cfg: TreeConfig, i: int, count: int = 6,
                    seed: int = 0) -> list[np.ndarray]:
    """Evaluation points for convolution sup checks: on the configuration
    axis at bubble-scale, influence-scale and domain-scale distances."""
    b = cfg.bubbles[i]
    axis = _common_axis(cfg)
    d = axis[1] if axis is not None else np.eye(cfg.n)[0]
    offs = [0.0, b.mu, 4.0 * b.mu, math.sqrt(b.mu), 0.45, 0.9]
    pts = [b.center + o * d for o in offs[:count]]
    R = cfg.domain.radius
    cc = np.asarray(cfg.domain.center, float)
    out = []
    for p in pts:
        r = np.linalg.norm(p - cc)
        out.append(p if r < R else cc + (p - cc) * (0.98 * R / r))
    return out


# ---------------------------------------------------------------------------
# eta sequences
# ---------------------------------------------------------------------------

def eta_sequences(cfg: TreeConfig, A_deltas=(), nu_max: float | None = None,
                  data: InfluenceData | None = None, x_count: int = 4,
                  seed: int = 0) -> dict:
    """The four control sequences of the weighted-norm machinery:

    eta1 = L^{2n/(n+2k)} norm of Psi over the domain (quadrature);
    eta2 = sup_x max_l int |x-y|^{2k-n-l} Psi(y) dy / (1 + sum theta^{-l} B);
    eta3 = (max eps^{-1/2})^m + (max scale-ratio^{(2k-1)/(2(n-1))})^m
           + max_i mu_i^{min((n-2k)/2, 2k, 1)},  m = min(n-2k, 4k);
    eta4 = max |nu| + sum of the coefficient-tensor C^l distances.
    """
    n, k = cfg.n, cfg.k
    if data is None:
        data = classify(cfg)
    N = len(cfg.bubbles)

    # eta1 by quadrature
    q = 2.0 * n / (n + 2 * k)
    sings = tuple(Singularity(tuple(b.center), 0.0, b.mu) for b in cfg.bubbles)
    dom = Ball(tuple(cfg.domain.center), cfg.domain.radius, singularities=sings)
    axis = _common_axis(cfg)

    def psi_q(y):
        return psi_weight(cfg, y) ** q

    if axis is not None:
        r1 = integrate_axisymmetric(psi_q, dom, axis[0], axis[1])
    else:
        r1 = integrate_volume(psi_q, dom, seed=seed)
    eta1 = r1.value ** (1.0 / q)

    # eta2 by quadrature over sampled x
    eta2 = 0.0
    for x in sample_x_points(cfg, 0, count=x_count, seed=seed):
        for l in range(2 * k):
            val, _ = _conv_integral(
                cfg, x, 2 * k - n - l, lambda y: psi_weight(cfg, y),
                [(b.center, b.mu) for b in cfg.bubbles], seed=seed)
            den = float(_weight_denominator(cfg, l, x[None, :])[0])
            eta2 = max(eta2, val / den)

    # eta3, eta4: arithmetic on the configuration
    m = min(n - 2 * k, 4 * k)
    t1 = 0.0
    t2 = 0.0
    for i in range(N):
        for j in data.slower[i]:
            t1 = max(t1, epsilon(cfg, i, j) ** -0.5)
        for j in data.faster[i]:
            t2 = max(t2, (cfg.bubbles[j].mu / cfg.bubbles[i].mu)
                     ** ((2 * k - 1) / (2.0 * (n - 1))))
    eta3 = t1**m + t2**m + max(b.mu for b in cfg.bubbles) ** min(0.5 * (n - 2 * k), 2 * k, 1)
    if nu_max is None:
        nu_max = max((abs(v) for v in cfg.nu.values()), default=0.0)
    eta4 = nu_max + float(sum(A_deltas))

    return {"eta1": eta1, "eta2": eta2, "eta3": eta3, "eta4": eta4,
            "eta": max(eta1, eta2, eta3, eta4)}


# ---------------------------------------------------------------------------
# Giraud's lemma
# ---------------------------------------------------------------------------

def giraud_verify(gamma: float, beta: float, mu: float, x, y,
                  domain: Ball, seed: int = 0, with_log: bool = True) -> dict:
    """Z(x,y) = int (mu+|x-z|)^{gamma-n} |z-y|^{beta-n} dz against the
    three-case bound:

        gamma < 0:  mu^gamma (mu+d)^{beta-n}
        gamma = 0:  (mu+d)^{beta-n} (1 + |log((mu+d)/mu)|)   [log optional]
        gamma > 0:  (mu+d)^{beta+gamma-n}

    with d = |x-y|.  Returns the integral, the bound, their ratio and the
    quadrature error.
    """
    n = domain.dim
    if beta <= 0 or beta + gamma >= n or not (0 < mu < 1):
        raise ValueError("need beta > 0, beta + gamma < n, 0 < mu < 1")
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    d = float(np.linalg.norm(x - y))

    def f(z):
        rx = np.linalg.norm(z - x, axis=1)
        ry = np.maximum(np.linalg.norm(z - y, axis=1), 1e-300)
        return (mu + rx) ** (gamma - n) * ry ** (beta - n)

    sings = (Singularity(tuple(x), 0.0, mu), Singularity(tuple(y), n - beta, 0.0))
    dom = Ball(tuple(domain.center), domain.radius, singularities=sings)
    cc = np.asarray(domain.center, float)
    rel = [x - cc, y - cc]
    rel = [r for r in rel if np.linalg.norm(r) > 1e-12]
    collinear = True
    if rel:
        dref = rel[0] / np.linalg.norm(rel[0])
        for r in rel[1:]:
            if np.linalg.norm(r - (r @ dref) * dref) > 1e-10:
                collinear = False
    if collinear:
        dref = rel[0] / np.linalg.norm(rel[0]) if rel else np.eye(n)[0]
        res = integrate_axisymmetric(f, dom, cc, dref)
    else:
        res = integrate_volume(f, dom, seed=seed, n_points=2**13)

    if gamma < 0:
        bound = mu**gamma * (mu + d) ** (beta - n)
    elif gamma == 0:
        bound = (mu + d) ** (beta - n)
        if with_log:
            bound *= 1.0 + abs(math.log((mu + d) / mu))
    else:
        bound = (mu + d) ** (beta + gamma - n)
    return {"Z": res.value, "bound": bound, "ratio": res.value / bound,
            "quad_error": res.error_estimate, "d": d, "mu": mu,
            "gamma": gamma, "beta": beta}


# ---------------------------------------------------------------------------
# Convolution-lemma verifiers
# ---------------------------------------------------------------------------

def convolution_bound_verify(kind: str, cfg: TreeConfig, params: dict,
                             seed: int = 0) -> list[dict]:
    """LHS/RHS ratio rows for one of the bubble-tree integral lemmas.

    kind: "ordre2" | "trou0" | "trou" | "BiBj" | "lem2".  params carries
    (i, l, M, j, p) as relevant.  Each row reports lhs, rhs, their ratio and
    the quadrature error estimate.
    """
    n, k = cfg.n, cfg.k
    ts = critical_exponent(n, k)
    i = params.get("i", 0)
    b = cfg.bubbles[i]
    rows = []

    if kind in ("ordre2", "trou0", "trou", "lem2"):
        ls = params.get("l")
        ls = range(2 * k) if ls is None else [ls]
        xs = params.get("x_points")
        if xs is None:
            xs = sample_x_points(cfg, i, count=params.get("x_count", 5),
                                 seed=seed)
        for l in ls:
            expo = 2 * k - n - l
            for x in xs:
                if kind == "ordre2":
                    weight = lambda y: theta(b, y) * positive_bubble(b, y) ** (ts - 1.0)
                    val, err = _conv_integral(cfg, x, expo, weight,
                                              [(b.center, b.mu)], seed=seed)
                    rhs = b.mu * float(theta(b, x[None, :])[0] ** (-l)
                                       * positive_bubble(b, x[None, :])[0])
                elif kind == "trou0":
                    weight = lambda y: positive_bubble(b, y) ** (ts - 2.0)
                    val, err = _conv_integral(cfg, x, expo, weight,
                                              [(b.center, b.mu)], seed=seed)
                    rhs = 1.0 + float(theta(b, x[None, :])[0] ** (-l)
                                      * positive_bubble(b, x[None, :])[0])
                elif kind == "trou":
                    M = params["M"]
                    hole = Ball(tuple(b.center), M * b.mu)
                    weight = lambda y: positive_bubble(b, y) ** (ts - 1.0)
                    val, err = _conv_integral(cfg, x, expo, weight,
                                              [(b.center, b.mu)], hole=hole,
                                              seed=seed)
                    rhs = M ** (-2.0 * k) * float(theta(b, x[None, :])[0] ** (-l)
                                                  * positive_bubble(b, x[None, :])[0])
                else:  # lem2
                    weight = lambda y: psi_weight(cfg, y)
                    val, err = _conv_integral(
                        cfg, x, expo, weight,
                        [(bb.center, bb.mu) for bb in cfg.bubbles], seed=seed)
                    rhs = float(_weight_denominator(cfg, l, x[None, :])[0])
                rows.append({"kind": kind, "i": i, "l": l,
                             "x_off": float(np.linalg.norm(x - b.center)),
                             "mu_or_alpha": b.mu, "lhs": val, "rhs": rhs,
                             "ratio": val / rhs, "quad_error": err,
                             **({"M": params["M"]} if kind == "trou" else {})})
        return rows

    if kind == "BiBj":
        j = params["j"]
        part = params.get("part", 1)
        bj = cfg.bubbles[j]
        pref = (b.mu * bj.mu) ** (0.5 * (n - 2 * k))
        if part == 1:
            expo_i = expo_j = k - n
        else:
            p = params["p"]
            if n <= 4 * k - 2 * p:
                raise ValueError(f"need n > 4k-2p = {4 * k - 2 * p}")
            expo_i = expo_j = 2 * k - p - n
        sings = (Singularity(tuple(b.center), 0.0, b.mu),
                 Singularity(tuple(bj.center), 0.0, bj.mu))
        dom = Ball(tuple(cfg.domain.center), cfg.domain.radius,
                   singularities=sings)

        def f(y):
            return (theta(b, y) ** expo_i) * (theta(bj, y) ** expo_j)

        axis = _common_axis(cfg)
        if axis is not None:
            res = integrate_axisymmetric(f, dom, axis[0], axis[1])
        else:
            res = integrate_volume(f, dom, seed=seed, n_points=2**13)
        lhs = pref * res.value
        if part == 1:
            rhs = 1.0
        else:
            rhs = (b.mu * bj.mu) ** (k - params["p"])
        rows.append({"kind": f"BiBj{part}", "i": i, "j": j,
                     "mu_or_alpha": b.mu, "lhs": lhs, "rhs": rhs,
                     "ratio": lhs / rhs,
                     "quad_error": pref * res.error_estimate})
        return rows

    raise ValueError(f"unknown lemma kind {kind!r}")


def ratio_table_csv(rows: list[dict], path) -> None:
    """Write verifier rows as a CSV ratio table."""
    if not rows:
        raise ValueError("no rows to write")
    keys = sorted({k for row in rows for k in row}, key=str)
    front = [c for c in ("kind", "i", "j", "l", "M", "x_off",
                         "mu_or_alpha", "lhs", "rhs", "ratio", "quad_error")
             if c in keys]
    cols = front + [c for c in keys if c not in front]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for row in rows:
            w.writerow(row)
