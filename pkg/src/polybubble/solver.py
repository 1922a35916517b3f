"""Radial shooting and continuation for the critical polyharmonic problem

    (-Delta)^k u + mu (-Delta)^p u = |u|^{2#-2} u   on the unit ball,
    Dirichlet data of order k on the boundary,

written as k coupled radial second-order equations for v_i = (-Delta)^i u:
-v_i'' - (n-1)/r v_i' = v_{i+1} (i < k-1), closing with the nonlinearity.
The classical lower-order-coefficient convention maps to mu = -lambda, so the
blow-up experiment runs mu upward toward 0 through negative values.

Only the positive radial ground-state branch is targeted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .quadrature import sphere_area
from .radial import bubble_constant, critical_exponent, make_bubble

__all__ = [
    "IntegrationBlowUp",
    "NewtonFailure",
    "ProblemParams",
    "RadialSolution",
    "BranchPoint",
    "shoot",
    "newton_solve",
    "continuation",
    "fit_bubble",
    "pohozaev_scaling",
    "synthetic_bubble_branch",
    "branch_csv",
    "run_manifest",
]

_EPS0 = 1e-6       # Taylor start radius, removes the (n-1)/r singularity
_BLOW_CAP = 1e9


class IntegrationBlowUp(RuntimeError):
    def __init__(self, radius):
        super().__init__(f"solution blew up at r = {radius:.6g}")
        self.radius = radius


class NewtonFailure(RuntimeError):
    def __init__(self, msg, condition=None):
        super().__init__(msg)
        self.condition = condition


@dataclass
class ProblemParams:
    n: int
    k: int
    p: int
    mu: float  # lower-order coefficient; classical lambda corresponds to -mu

    def __post_init__(self):
        if not 0 <= self.p <= self.k - 1:
            raise ValueError("need 0 <= p <= k-1")
        if self.n <= 2 * self.k:
            raise ValueError("need n > 2k")

    @property
    def two_sharp(self):
        return critical_exponent(self.n, self.k)


@dataclass
class RadialSolution:
    params: ProblemParams
    d: np.ndarray              # shooting data v_i(0)
    r: np.ndarray              # dense grid on [0, 1]
    v: np.ndarray              # (k, m) values of (-Delta)^i u
    dv: np.ndarray             # (k, m) radial derivatives
    mismatch: np.ndarray       # (u(1), u'(1), ..., u^{(k-1)}(1))
    sup_norm: float
    energy: float
    collocation_residual: float = float("nan")

    def u(self, r):
        return np.interp(r, self.r, self.v[0])

    def du(self, r):
        return np.interp(r, self.r, self.dv[0])


@dataclass
class BranchPoint:
    mu_param: float
    sup_norm: float
    energy: float
    mu_fit: float
    fit_residual: float
    poho_term: float
    d: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Shooting
# ---------------------------------------------------------------------------

def _nonlinearity(params: ProblemParams, v0, vp):
    ts = params.two_sharp
    return np.abs(v0) ** (ts - 2.0) * v0 - params.mu * vp


def _rhs(params: ProblemParams):
    n, k = params.n, params.k

    def rhs(r, y):
        out = np.empty_like(y)
        vs = y[0::2]
        dvs = y[1::2]
        for i in range(k):
            nxt = vs[i + 1] if i < k - 1 else _nonlinearity(params, vs[0], vs[params.p])
            out[2 * i] = dvs[i]
            out[2 * i + 1] = -(n - 1) / r * dvs[i] - nxt
        return out

    return rhs


def _taylor_start(params: ProblemParams, d, eps):
    """4-term even Taylor expansion at the origin fixing y(eps)."""
    n, k, p = params.n, params.k, params.p
    ts = params.two_sharp
    w = list(d) + [_nonlinearity(params, d[0], d[p])]
    c2 = [-w[i + 1] / (2.0 * n) for i in range(k)]
    F2 = (ts - 1.0) * abs(d[0]) ** (ts - 2.0) * c2[0] - params.mu * c2[p]
    c4 = [(-c2[i + 1] if i < k - 1 else -F2) / (4.0 * (n + 2)) for i in range(k)]
    y = np.empty(2 * k)
    for i in range(k):
        y[2 * i] = d[i] + c2[i] * eps**2 + c4[i] * eps**4
        y[2 * i + 1] = 2 * c2[i] * eps + 4 * c4[i] * eps**3
    return y


def _boundary_derivatives(params: ProblemParams, y_end):
    """(u(1), u'(1), ..., u^{(k-1)}(1)) reconstructed from the v_i chain.

    Uses v_i'' = -(n-1)/r v_i' - v_{i+1} and its r-derivatives at r = 1;
    reconstruction of u^{(m)} for m <= k-1 never reaches the nonlinear level.
    """
    n, k = params.n, params.k
    vs = y_end[0::2]
    dvs = y_end[1::2]
    order = k + 1
    D = {}
    for i in range(k):
        D[(i, 0)] = vs[i]
        D[(i, 1)] = dvs[i]

    def get(i, j):
        if (i, j) in D:
            return D[(i, j)]
        if i >= k:
            raise ValueError("reconstruction hit the nonlinear level")
        m = j - 2
        tot = 0.0
        for mm in range(m + 1):
            tot += (math.comb(m, mm) * (-1.0) ** mm * math.factorial(mm)
                    * get(i, j - 1 - mm))
        val = -(n - 1) * tot - (get(i + 1, m) if i < k - 1 else _nl_deriv(m))
        D[(i, j)] = val
        return val

    def _nl_deriv(m):
        raise ValueError("reconstruction hit the nonlinear level")

    return np.array([get(0, m) for m in range(k)])


def shoot(params: ProblemParams, d, rtol: float = 1e-10,
          dense_points: int = 400):
    """Integrate the radial system from the Taylor start to r = 1.

    Returns (mismatch, RadialSolution); raises IntegrationBlowUp with the
    blow-up radius when the solution escapes before reaching the boundary.
    """
    d = np.asarray(d, float)
    if d.shape != (params.k,):
        raise ValueError(f"shooting data needs {params.k} values")
    if not np.all(np.isfinite(d)):
        raise ValueError("shooting data must be finite")
    y0 = _taylor_start(params, d, _EPS0)
    cap = max(_BLOW_CAP, 1e6 * np.max(np.abs(y0)))

    def blow(r, y):
        return np.max(np.abs(y)) - cap

    blow.terminal = True
    blow.direction = 1
    sol = solve_ivp(_rhs(params), (_EPS0, 1.0), y0, method="RK45",
                    rtol=rtol, atol=rtol * max(1.0, np.max(np.abs(d))),
                    dense_output=True, events=blow)
    if sol.status == 1 or sol.t[-1] < 1.0 - 1e-12:
        raise IntegrationBlowUp(sol.t[-1])
    rr = np.linspace(_EPS0, 1.0, dense_points)
    Y = sol.sol(rr)
    v = Y[0::2]
    dv = Y[1::2]
    mismatch = _boundary_derivatives(params, sol.y[:, -1])
    n, k = params.n, params.k
    sup = float(np.max(np.abs(v[0])))
    # energy int |(-Delta)^{k/2} u|^2: middle Laplacian iterate (even k) or
    # the gradient of one (odd k)
    if k % 2 == 0:
        integrand = v[k // 2] ** 2
    else:
        integrand = dv[(k - 1) // 2] ** 2
    energy = sphere_area(n) * float(np.trapezoid(integrand * rr ** (n - 1), rr))
    return mismatch, RadialSolution(params, d, rr, v, dv, mismatch, sup, energy)


def _rk4(rhs, y0, r0, r1, steps):
    """Classical fixed-step RK4, the independent verification integrator."""
    y = np.asarray(y0, float).copy()
    h = (r1 - r0) / steps
    r = r0
    for _ in range(steps):
        k1 = rhs(r, y)
        k2 = rhs(r + h / 2, y + h / 2 * k1)
        k3 = rhs(r + h / 2, y + h / 2 * k2)
        k4 = rhs(r + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        r += h
    return y


def collocation_check(params: ProblemParams, solution: RadialSolution,
                      steps: int = 20000) -> float:
    """Sup difference of u against an independent fixed-step RK4
    re-integration of the same shooting data on a fresh grid."""
    y0 = _taylor_start(params, solution.d, _EPS0)
    rhs = _rhs(params)
    y = np.asarray(y0, float).copy()
    grid = solution.r
    out = [y0[0]]
    r_prev = _EPS0
    for r_next in grid[1:]:
        substeps = max(2, int(steps * (r_next - r_prev)))
        y = _rk4(rhs, y, r_prev, r_next, substeps)
        out.append(y[0])
        r_prev = r_next
    diff = np.abs(np.asarray(out) - solution.v[0])
    return float(np.max(diff) / max(solution.sup_norm, 1e-300))


# ---------------------------------------------------------------------------
# Newton and continuation
# ---------------------------------------------------------------------------

def newton_solve(params: ProblemParams, d_init, rtol: float = 1e-9,
                 max_iter: int = 50) -> RadialSolution:
    """Damped Newton on the shooting map, Jacobian by finite differences."""
    d = np.asarray(d_init, float).copy()
    k = params.k

    def mm(dd):
        return shoot(params, dd, rtol=min(1e-10, rtol))[0]

    F = mm(d)
    for _ in range(max_iter):
        if np.linalg.norm(F) < rtol:
            _, sol = shoot(params, d, rtol=min(1e-10, rtol))
            sol.collocation_residual = collocation_check(params, sol)
            return sol
        J = np.empty((k, k))
        for j in range(k):
            h = 1e-6 * max(1.0, abs(d[j]))
            dp = d.copy()
            dp[j] += h
            J[:, j] = (mm(dp) - F) / h
        cond = np.linalg.cond(J)
        if not np.isfinite(cond) or cond > 1e14:
            raise NewtonFailure("singular shooting Jacobian", condition=cond)
        step = np.linalg.solve(J, -F)
        lam = 1.0
        base = np.linalg.norm(F)
        while lam > 1e-8:
            try:
                F_new = mm(d + lam * step)
            except IntegrationBlowUp:
                lam *= 0.5
                continue
            if np.linalg.norm(F_new) < base:
                d = d + lam * step
                F = F_new
                break
            lam *= 0.5
        else:
            raise NewtonFailure("damping failed to reduce the mismatch")
    raise NewtonFailure(f"no convergence in {max_iter} iterations")


def fit_bubble(solution: RadialSolution) -> tuple[float, float]:
    """Fit the flat-profile scale from the center value:
    mu_fit = u(0)^{-2/(n-2k)}; residual is the relative sup deviation from
    the rescaled profile on r <= 10 mu_fit."""
    params = solution.params
    n, k = params.n, params.k
    u0 = solution.v[0][0]
    if u0 <= 0 or u0 < solution.sup_norm * (1 - 1e-8):
        raise ValueError("bubble fit needs the max at the center")
    mu_fit = u0 ** (-2.0 / (n - 2 * k))
    a = bubble_constant(n, k)
    mask = solution.r <= min(1.0, 10.0 * mu_fit)
    rr = solution.r[mask]
    model = (mu_fit / (mu_fit**2 + a * rr**2)) ** (0.5 * (n - 2 * k))
    resid = float(np.max(np.abs(solution.v[0][mask] - model)) / u0)
    return mu_fit, resid


def _grad_p_square_integral(params: ProblemParams, solution: RadialSolution) -> float:
    """int_ball |grad^p u|^2 from the radial profile (p <= 2)."""
    n, p = params.n, params.p
    rr = solution.r
    u = solution.v[0]
    du = solution.dv[0]
    if p == 0:
        integrand = u**2
    elif p == 1:
        integrand = du**2
    else:
        d2u = np.gradient(du, rr)
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = d2u**2 + (n - 1) * np.where(rr > 0, du / rr, 0.0) ** 2
    return sphere_area(n) * float(np.trapezoid(integrand * rr ** (n - 1), rr))


def continuation(params: ProblemParams, mu_grid, d_seed,
                 rtol: float = 1e-9, max_halvings: int = 6):
    """Natural-parameter continuation along the mu grid with step halving.

    Returns (branch points, flag) where flag is "complete" or "fold" when
    the branch was lost despite halving.
    """
    mu_grid = list(mu_grid)
    points = []
    d = np.asarray(d_seed, float)
    mu_prev = None
    i = 0
    pending = list(mu_grid)
    halvings = 0
    while pending:
        mu_target = pending[0]
        pars = ProblemParams(params.n, params.k, params.p, mu_target)
        try:
            sol = newton_solve(pars, d, rtol=rtol)
        except (NewtonFailure, IntegrationBlowUp):
            if mu_prev is None or halvings >= max_halvings:
                return points, "fold"
            pending.insert(0, 0.5 * (mu_prev + mu_target))
            halvings += 1
            continue
        mu_fit, resid = fit_bubble(sol)
        poho = _grad_p_square_integral(pars, sol)
        if abs(mu_target - pending[0]) < 1e-300 and mu_target in mu_grid:
            points.append(BranchPoint(mu_target, sol.sup_norm, sol.energy,
                                      mu_fit, resid, poho, sol.d.copy()))
        d = sol.d.copy()
        mu_prev = mu_target
        pending.pop(0)
        halvings = 0
    return points, "complete"


def pohozaev_scaling(branch: list[BranchPoint]) -> float:
    """Fitted exponent of the lower-order integral against the bubble scale:
    log poho_term vs log mu_fit slope (expect 2(k-p))."""
    if len(branch) < 4:
        raise ValueError("need at least 4 branch points")
    mus = np.array([b.mu_fit for b in branch])
    vals = np.array([b.poho_term for b in branch])
    if np.any(np.diff(mus) >= 0):
        order = np.argsort(-mus)
        mus, vals = mus[order], vals[order]
    if np.any(vals <= 0) or mus[0] <= mus[-1]:
        raise ValueError("degenerate branch: cannot fit a scaling exponent")
    return float(np.polyfit(np.log(mus), np.log(vals), 1)[0])


def synthetic_bubble_branch(n: int, k: int, p: int, mus) -> list[BranchPoint]:
    """Branch of exact rescaled flat profiles (no PDE solve), for scaling
    tests: poho_term is the p-gradient square integral over the unit ball,
    computed by adaptive quadrature in the scaled variable t = r/mu so that
    the peak is exactly resolved for arbitrarily small scales."""
    from scipy.integrate import quad

    from .fields import RationalProfile

    a = bubble_constant(n, k)
    prof = RationalProfile(make_bubble(n, k), a)
    out = []
    for mu in mus:
        amp = mu ** (-0.5 * (n - 2 * k))

        def integrand(t):
            if p == 0:
                G = prof.d(0, t) ** 2
            elif p == 1:
                G = prof.d(1, t) ** 2
            else:
                g1 = prof.d(1, t)
                G = prof.d(2, t) ** 2 + (n - 1) * (g1 / t if t > 0 else 0.0) ** 2
            return G * t ** (n - 1)

        val, _ = quad(integrand, 0.0, 1.0 / mu, epsabs=1e-300, epsrel=1e-11,
                      limit=400)
        poho = sphere_area(n) * mu ** (2 * (k - p)) * val
        out.append(BranchPoint(float("nan"), amp, float("nan"), mu, 0.0, poho))
    return out


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def branch_csv(points: list[BranchPoint], path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mu_param", "sup_norm", "energy", "mu_fit",
                    "fit_residual", "poho_term"])
        for b in points:
            w.writerow([b.mu_param, b.sup_norm, b.energy, b.mu_fit,
                        b.fit_residual, b.poho_term])


def run_manifest(params: ProblemParams, mu_grid, d_seed, rtol, extra=None) -> str:
    d = {"n": params.n, "k": params.k, "p": params.p,
         "mu_grid": list(map(float, mu_grid)),
         "d_seed": list(map(float, np.atleast_1d(d_seed))),
         "rtol": rtol, "taylor_start": _EPS0, "blow_cap": _BLOW_CAP,
         "integrator": "rk45-adaptive", "newton": {"max_iter": 50,
                                                   "damping": "halving"}}
    if extra:
        d.update(extra)
    return json.dumps(d, indent=2)
