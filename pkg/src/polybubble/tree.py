"""Bubble-tree geometry: the structure relation, slower/faster bubble sets,
radii of influence, dominance regions, interaction estimates, and evaluation
of a whole tree (bubbles + kernel corrections + weak limit).

Asymptotic sets are limit statements about sequences, so configurations can
carry a power-law family mu^i(alpha) = c_i alpha^{-gamma_i}; limits are then
decided exactly from exponents.  Snapshot configurations use a ratio
threshold band and refuse ambiguous scale pairs rather than guessing.

Bubble indices are 0-based throughout the code; index -1 never appears and
the constant zeroth profile (B^0 = 1, theta^0 = 1) is handled separately.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .bubbles import BubbleSpec, bubble_field, kernel_elements, positive_bubble, theta
from .fields import ProductProfile, RadialTermField, cutoff_profile
from .quadrature import Ball
from .radial import bubble_constant, critical_exponent

__all__ = [
    "AmbiguousScalesError",
    "FamilyLaw",
    "TreeConfig",
    "Region",
    "InfluenceData",
    "epsilon",
    "classify",
    "check_dominance",
    "interaction_sup",
    "eval_tree",
    "tree_value",
    "stratified_samples",
]


class AmbiguousScalesError(ValueError):
    """Snapshot scale ratio falls inside the undecidable threshold band."""


@dataclass
class FamilyLaw:
    """Power-law family: mu^i(a) = c_i a^{-gamma_i},
    x^i(a) = base_i + a^{-delta_i} dir_i."""

    mu_coeff: list
    mu_exp: list
    center_base: list
    center_exp: list | None = None
    center_dir: list | None = None

    def n_bubbles(self):
        return len(self.mu_coeff)

    def mu(self, i, alpha):
        return self.mu_coeff[i] * alpha ** (-self.mu_exp[i])

    def center(self, i, alpha):
        base = np.asarray(self.center_base[i], float)
        if self.center_exp is None:
            return base
        return base + alpha ** (-self.center_exp[i]) * np.asarray(self.center_dir[i], float)


@dataclass
class TreeConfig:
    """An ordered bubble family with kernel coefficients.

    bubbles must satisfy mu^{N-1} <= ... <= mu^0 < 1 (slowest first); nu maps
    (bubble index, kernel index 0..n) to a small coefficient; include_u0
    treats the zeroth slot as the constant profile u0.
    """

    bubbles: list
    nu: dict = dc_field(default_factory=dict)
    include_u0: bool = False
    u0_value: float = 0.0
    family_law: FamilyLaw | None = None
    domain: Ball | None = None
    alpha: float | None = None  # materialization parameter in family mode

    def __post_init__(self):
        if not self.bubbles:
            raise ValueError("a bubble-tree needs at least one bubble")
        mus = [b.mu for b in self.bubbles]
        if any(m >= 1.0 for m in mus):
            raise ValueError("all scales must lie in (0, 1)")
        if any(m2 > m1 + 1e-15 for m1, m2 in zip(mus, mus[1:])):
            raise ValueError("bubbles must be ordered by nonincreasing mu")
        nk = {(b.n, b.k) for b in self.bubbles}
        if len(nk) != 1:
            raise ValueError("all bubbles must share (n, k)")
        if self.domain is None:
            n = self.bubbles[0].n
            self.domain = Ball((0.0,) * n, 1.0)
        if self.family_law is not None and self.family_law.n_bubbles() != len(self.bubbles):
            raise ValueError("family law size mismatch")
        for g in (self.family_law.mu_exp if self.family_law else []):
            if g <= 0:
                raise ValueError("family-law scale exponents must be positive")

    @property
    def n(self):
        return self.bubbles[0].n

    @property
    def k(self):
        return self.bubbles[0].k

    @classmethod
    def from_family(cls, law: FamilyLaw, alpha: float, n: int, k: int,
                    nu=None, include_u0=False, u0_value=0.0, domain=None):
        specs = []
        for i in range(law.n_bubbles()):
            specs.append(BubbleSpec("interior", n, k, law.center(i, alpha),
                                    law.mu(i, alpha)))
        order = np.argsort([-s.mu for s in specs], kind="stable")
        specs = [specs[i] for i in order]
        law2 = FamilyLaw([law.mu_coeff[i] for i in order],
                         [law.mu_exp[i] for i in order],
                         [law.center_base[i] for i in order],
                         None if law.center_exp is None else [law.center_exp[i] for i in order],
                         None if law.center_dir is None else [law.center_dir[i] for i in order])
        return cls(specs, nu or {}, include_u0, u0_value, law2, domain, alpha)

    # -- JSON ----------------------------------------------------------------

    def to_json(self) -> str:
        d = {
            "bubbles": [json.loads(b.to_json()) for b in self.bubbles],
            "nu": {f"{i},{j}": v for (i, j), v in self.nu.items()},
            "include_u0": self.include_u0,
            "u0_value": self.u0_value,
            "domain": {"center": list(map(float, self.domain.center)),
                       "radius": self.domain.radius},
        }
        if self.family_law is not None:
            fl = self.family_law
            d["family_law"] = {
                "mu_coeff": list(fl.mu_coeff), "mu_exp": list(fl.mu_exp),
                "center_base": [list(map(float, c)) for c in fl.center_base],
                "center_exp": fl.center_exp,
                "center_dir": None if fl.center_dir is None else
                              [list(map(float, c)) for c in fl.center_dir],
            }
            d["alpha"] = self.alpha
        return json.dumps(d, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TreeConfig":
        d = json.loads(text)
        bubbles = [BubbleSpec(b["kind"], b["n"], b["k"], b["center"], b["mu"],
                              b.get("profile", "standard")) for b in d["bubbles"]]
        nu = {}
        for key, v in d.get("nu", {}).items():
            i, j = key.split(",")
            nu[(int(i), int(j))] = float(v)
        dom = None
        if "domain" in d:
            dom = Ball(tuple(d["domain"]["center"]), d["domain"]["radius"])
        law = None
        if "family_law" in d:
            fl = d["family_law"]
            law = FamilyLaw(fl["mu_coeff"], fl["mu_exp"], fl["center_base"],
                            fl.get("center_exp"), fl.get("center_dir"))
        return cls(bubbles, nu, d.get("include_u0", False),
                   d.get("u0_value", 0.0), law, dom, d.get("alpha"))


# ---------------------------------------------------------------------------
# Structure relation and classification
# ---------------------------------------------------------------------------

def epsilon(cfg: TreeConfig, i: int, j: int) -> float:
    """|x^i-x^j|^2/(mu^i mu^j) + mu^i/mu^j + mu^j/mu^i; symmetric, >= 2."""
    if i == j:
        raise ValueError("epsilon needs two distinct bubbles")
    bi, bj = cfg.bubbles[i], cfg.bubbles[j]
    d2 = float(np.sum((bi.center - bj.center) ** 2))
    return d2 / (bi.mu * bj.mu) + bi.mu / bj.mu + bj.mu / bi.mu


def _faster(cfg: TreeConfig, j: int, i: int, lo: float, hi: float) -> bool:
    """True iff mu^j = o(mu^i)."""
    if cfg.family_law is not None:
        return cfg.family_law.mu_exp[j] > cfg.family_law.mu_exp[i]
    ratio = cfg.bubbles[j].mu / cfg.bubbles[i].mu
    if ratio >= hi:
        return False
    if ratio <= lo:
        return True
    raise AmbiguousScalesError(
        f"scale ratio mu^{j}/mu^{i} = {ratio:.3g} falls in the ambiguity band "
        f"({lo:.3g}, {hi:.3g}); use a family-law configuration")


class Region:
    """Influence region: (ball of radius r about the bubble center) minus the
    faster bubbles' dominance balls, clipped to the ambient domain."""

    def __init__(self, outer: Ball, holes, clip: Ball):
        self.outer = outer
        self.holes = list(holes)
        self.clip = clip

    def contains(self, x):
        x = np.atleast_2d(np.asarray(x, float))
        mask = self.outer.contains(x) & self.clip.contains(x)
        for h in self.holes:
            c = np.asarray(h.center)
            mask &= np.sum((x - c) ** 2, axis=1) >= h.radius**2
        return mask

    def describe(self):
        return {
            "outer": {"center": list(map(float, self.outer.center)),
                      "radius": self.outer.radius},
            "holes": [{"center": list(map(float, h.center)), "radius": h.radius}
                      for h in self.holes],
            "clip": {"center": list(map(float, self.clip.center)),
                     "radius": self.clip.radius},
        }


@dataclass
class InfluenceData:
    slower: dict          # i -> sorted list (the set A_i)
    faster: dict          # i -> sorted list (the set A_i^c)
    interacting: dict     # i -> sorted list (the set B_i)
    s: dict               # (i, j) -> s^{ij} for j in A_i
    r: dict               # i -> radius of influence r^i
    rho: dict             # (j, i) -> rho^{ji} for j in B_i
    m: dict               # (i, j) -> limit of scale-ratio sums, comparable pairs
    regions: dict         # i -> Region

    def to_json(self) -> str:
        return json.dumps({
            "slower": {str(i): v for i, v in self.slower.items()},
            "faster": {str(i): v for i, v in self.faster.items()},
            "interacting": {str(i): v for i, v in self.interacting.items()},
            "s": {f"{i},{j}": v for (i, j), v in self.s.items()},
            "r": {str(i): v for i, v in self.r.items()},
            "rho": {f"{j},{i}": v for (j, i), v in self.rho.items()},
            "m": {f"{i},{j}": v for (i, j), v in self.m.items()},
            "regions": {str(i): reg.describe() for i, reg in self.regions.items()},
        }, indent=2)


def classify(cfg: TreeConfig, thresholds=(1e-2, 1e-1)) -> InfluenceData:
    """Full influence data for a configuration.

    s^{ij} has two branches: the strict o(mu^j) branch and the comparable
    branch carrying the extra 1/(4 m_ij) factor; r^i caps at sqrt(mu^i);
    rho^{ji} = 2 (mu^j/mu^i)^{(n-2k)/(2(n-1))} (|x^j-x^i| + mu^i).
    """
    lo, hi = thresholds
    N = len(cfg.bubbles)
    n, k = cfg.n, cfg.k
    a = bubble_constant(n, k)
    slower, faster, inter = {}, {}, {}
    s_rad, r_rad, rho_rad, m_lim, regions = {}, {}, {}, {}, {}

    for i in range(N):
        Ai, Aic = [], []
        for j in range(N):
            if j == i:
                continue
            if _faster(cfg, j, i, lo, hi):
                Aic.append(j)
            else:
                Ai.append(j)
        slower[i], faster[i] = Ai, Aic

    for i in range(N):
        bi = cfg.bubbles[i]
        best = math.sqrt(bi.mu)
        for j in slower[i]:
            bj = cfg.bubbles[j]
            d2 = float(np.sum((bi.center - bj.center) ** 2))
            base = (bi.mu / bj.mu) * (bj.mu**2 + a * d2)
            if _faster(cfg, i, j, lo, hi):      # mu^i = o(mu^j): strict branch
                s2 = base / a
            else:                                # comparable bubbles
                if cfg.family_law is not None:
                    ci = cfg.family_law.mu_coeff[i]
                    cj = cfg.family_law.mu_coeff[j]
                    mij = ci / cj + cj / ci
                else:
                    mij = bi.mu / bj.mu + bj.mu / bi.mu
                m_lim[(i, j)] = mij
                s2 = base / (4.0 * a * mij)
            s_rad[(i, j)] = math.sqrt(s2)
            best = min(best, s_rad[(i, j)])
        r_rad[i] = best

    for i in range(N):
        bi = cfg.bubbles[i]
        Bi = []
        for j in faster[i]:
            bj = cfg.bubbles[j]
            dij = float(np.linalg.norm(bi.center - bj.center))
            if dij <= 2.0 * r_rad[i]:
                Bi.append(j)
                rho_rad[(j, i)] = (2.0 * (bj.mu / bi.mu) ** ((n - 2 * k) / (2.0 * (n - 1)))
                                   * (dij + bi.mu))
        inter[i] = Bi
        holes = [Ball(tuple(cfg.bubbles[j].center), rho_rad[(j, i)]) for j in Bi]
        regions[i] = Region(Ball(tuple(bi.center), r_rad[i]), holes, cfg.domain)

    return InfluenceData(slower, faster, inter, s_rad, r_rad, rho_rad, m_lim,
                         regions)


# ---------------------------------------------------------------------------
# Sampling and sweep measurements
# ---------------------------------------------------------------------------

def stratified_samples(region: Region, cfg: TreeConfig, count: int = 512,
                       seed: int = 0) -> np.ndarray:
    """Sample points of a region: shells at radii mu 2^t around each bubble
    center plus a uniform background (sups live near centers and shell
    boundaries)."""
    rng = np.random.default_rng(seed)
    n = cfg.n
    pts = []
    r_out = region.outer.radius
    for b in cfg.bubbles:
        radius = b.mu
        while radius < 2.0 * r_out:
            dirs = rng.normal(size=(8, n))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            pts.append(b.center + radius * dirs)
            radius *= 2.0
    # uniform background in the outer ball
    m = max(count, 64)
    dirs = rng.normal(size=(m, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = r_out * rng.uniform(0, 1, size=m) ** (1.0 / n)
    pts.append(np.asarray(region.outer.center) + radii[:, None] * dirs)
    pts = np.concatenate(pts, axis=0)
    keep = pts[region.contains(pts)]
    if len(keep) == 0:
        raise ValueError("influence region contains no sample points")
    return keep[:count] if len(keep) > count else keep


def _theta_pow_B(cfg: TreeConfig, j: int, l: int, pts) -> np.ndarray:
    b = cfg.bubbles[j]
    return theta(b, pts) ** (-l) * positive_bubble(b, pts)


def check_dominance(cfg: TreeConfig, data: InfluenceData, i: int, l: int,
                    sample_count: int = 512, seed: int = 0) -> dict:
    """Measured sup over the influence region of
    (1 + sum_j theta_j^{-l} B_j) / (theta_i^{-l} B_i)."""
    pts = stratified_samples(data.regions[i], cfg, sample_count, seed)
    num = np.ones(len(pts))
    for j in range(len(cfg.bubbles)):
        num += _theta_pow_B(cfg, j, l, pts)
    den = _theta_pow_B(cfg, i, l, pts)
    ratios = num / den
    return {"i": i, "l": l, "constant": float(np.max(ratios)),
            "samples": len(pts)}


def interaction_sup(cfg: TreeConfig, data: InfluenceData, i: int,
                    sample_count: int = 512, seed: int = 0) -> dict:
    """Pointwise interaction estimate on the influence region:

    lhs   = (mu^i)^{(n+2k)/2} sup sum_{r != s} (B^r)^{2#-2} B^s  (indices 0..N)
    bound = (max eps^{-1/2})^{min(n-2k,4k)} over comparable pairs
          + (max scale ratio^{(2k-1)/(2(n-1))})^{min(n-2k,4k)} over faster pairs
          + max_i (mu^i)^{min((n-2k)/2, 2k)}   (zeroth-profile contribution)
    """
    n, k = cfg.n, cfg.k
    N = len(cfg.bubbles)
    two_sharp = critical_exponent(n, k)
    pts = stratified_samples(data.regions[i], cfg, sample_count, seed)
    B = [np.ones(len(pts))]  # index 0 profile
    for j in range(N):
        B.append(positive_bubble(cfg.bubbles[j], pts))
    tot = np.zeros(len(pts))
    for r in range(N + 1):
        for s in range(N + 1):
            if r != s:
                tot += B[r] ** (two_sharp - 2.0) * B[s]
    lhs = cfg.bubbles[i].mu ** (0.5 * (n + 2 * k)) * float(np.max(tot))

    expo = min(n - 2 * k, 4 * k)
    t1 = 0.0
    t2 = 0.0
    for a_ in range(N):
        for b_ in range(N):
            if a_ == b_:
                continue
            if b_ in data.slower[a_]:
                t1 = max(t1, epsilon(cfg, a_, b_) ** -0.5)
            if b_ in data.faster[a_]:
                t2 = max(t2, (cfg.bubbles[b_].mu / cfg.bubbles[a_].mu)
                         ** ((2 * k - 1) / (2.0 * (n - 1))))
    t3 = max(b.mu for b in cfg.bubbles) ** min(0.5 * (n - 2 * k), 2 * k)
    bound = t1**expo + t2**expo + t3
    return {"i": i, "lhs": lhs, "bound": bound, "ratio": lhs / bound,
            "samples": len(pts)}


# ---------------------------------------------------------------------------
# Tree evaluation
# ---------------------------------------------------------------------------

def _tree_fields(cfg: TreeConfig):
    fields = []
    dom = cfg.domain
    for idx, b in enumerate(cfg.bubbles):
        if b.profile != "standard":
            if any(key[0] == idx for key in cfg.nu):
                raise ValueError(
                    "kernel coefficients need explicit kernel jets; external "
                    "profiles do not provide them")
            raise ValueError("eval_tree supports standard profiles only")
        fields.append(bubble_field(b, dom))
        kers = None
        for (i2, j2), nuv in cfg.nu.items():
            if i2 != idx or nuv == 0.0:
                continue
            if kers is None:
                kers = kernel_elements(b.n, b.k)
            base = kers[j2]
            bdist = dom.radius - float(np.linalg.norm(b.center - np.asarray(dom.center)))
            chi = cutoff_profile()
            comps = []
            for comp in base.components:
                prof = ProductProfile([(chi, bdist / b.mu), (comp.profile, 1.0)])
                comps.append((comp.beta0, prof, comp.coeff))
            amp = nuv * b.mu ** (-0.5 * (b.n - 2 * b.k))
            fields.append(RadialTermField(b.n, b.center, comps, mu=b.mu,
                                          amplitude=amp))
    return fields


def tree_value(cfg: TreeConfig, x) -> np.ndarray:
    """Signed value of the tree W = u0 + sum V_i + sum nu Z_ij at points x."""
    x = np.atleast_2d(np.asarray(x, float))
    tot = np.full(len(x), cfg.u0_value if cfg.include_u0 else 0.0)
    for F in _tree_fields(cfg):
        tot += F.value(x)
    return tot


def eval_tree(cfg: TreeConfig, x, l: int) -> np.ndarray:
    """Magnitude of the order-l derivative tensor of the tree at points x."""
    if not 0 <= l <= 2 * cfg.k - 1:
        raise ValueError("need 0 <= l <= 2k-1")
    x = np.atleast_2d(np.asarray(x, float))
    if l == 0:
        return np.abs(tree_value(cfg, x))
    from .jets import multiset_multiplicity, multisets
    fields = _tree_fields(cfg)
    tot = np.zeros(len(x))
    for alpha in multisets(cfg.n, l):
        entry = np.zeros(len(x))
        for F in fields:
            entry += F.partial(alpha, x)
        tot += multiset_multiplicity(alpha) * entry**2
    return np.sqrt(tot)
