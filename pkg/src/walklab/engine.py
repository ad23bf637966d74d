"""Exact path functionals of absorbed lattice walks.

Everything here is a thin, typed layer over the DP in walklab.dp: free
evolution, kill-at-origin and kill-on-halfline kernels, first-passage
and entrance laws, partial absorption, negative-side mass, and the
finite-strip exit problem (solved as a dense linear system).

"Exact" means exact up to float64 rounding; an optional rational mode
(evolve_free_exact / absorbed_at_origin_exact, n <= 64) computes the
same kernels in Fraction arithmetic and is used to calibrate the float
tolerances quoted elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import dp
from .errors import SingularSystem, TailNotNegligible
from .laws import StepLaw, moments

EXACT_STEP_LIMIT = 64


@dataclass
class LatticeDistribution:
    """Dense window of weights over consecutive sites."""

    offset: int
    weights: np.ndarray

    def prob(self, y: int) -> float:
        i = y - self.offset
        if 0 <= i < len(self.weights):
            return float(self.weights[i])
        return 0.0

    def mass(self) -> float:
        return float(self.weights.sum())

    def sites(self) -> np.ndarray:
        return self.offset + np.arange(len(self.weights))

    def restricted_sum(self, lo: int, hi: int) -> float:
        """Sum of weights over sites in [lo, hi]."""
        a = max(lo - self.offset, 0)
        b = min(hi - self.offset + 1, len(self.weights))
        if b <= a:
            return 0.0
        return float(self.weights[a:b].sum())


@dataclass
class AbsorbedKernelSlice:
    mode: str  # "free" | "point" | "halfline" | "partial"
    alpha: float
    x: int
    n: int
    distribution: LatticeDistribution
    absorbed_by_step: np.ndarray | None = None
    snapshots: dict[int, LatticeDistribution] = field(default_factory=dict)

    def absorbed_total(self) -> float:
        if self.absorbed_by_step is None:
            return 0.0
        return float(self.absorbed_by_step.sum())


@dataclass
class FirstPassageSeries:
    """Passage-to-origin law: values[k-1] = P_x[tau_0 = k]."""

    x: int
    values: np.ndarray

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.values)


@dataclass
class EntranceTable:
    """Joint law of (T, S_T) where T = first time the walk is <= 0.

    h[k-1, j] = P_x[T = k, S_T = entry_base + j].
    """

    x: int
    n: int
    entry_base: int
    h: np.ndarray
    deficit: float  # P_x[T > n]

    def t_pmf(self) -> np.ndarray:
        return self.h.sum(axis=1)

    def h_at(self, k: int, y: int) -> float:
        j = y - self.entry_base
        if 1 <= k <= self.n and 0 <= j < self.h.shape[1]:
            return float(self.h[k - 1, j])
        return 0.0

    def partial_entrance(self) -> tuple[int, np.ndarray]:
        """(base, column sums): H_x^+ truncated at n, deficit aside."""
        return self.entry_base, self.h.sum(axis=0)


def _snapshots_to_dists(raw: dict) -> dict[int, LatticeDistribution]:
    return {k: LatticeDistribution(off, w) for k, (off, w) in raw.items()}


def evolve_free(law: StepLaw, x: int, n: int,
                snapshot_steps=()) -> AbsorbedKernelSlice:
    zmin, pmf = law.pmf_array()
    res = dp.run_dp(x, np.ones(1), zmin, pmf, n, mode=dp.FREE,
                    snapshot_steps=snapshot_steps)
    return AbsorbedKernelSlice(
        mode="free", alpha=0.0, x=x, n=n,
        distribution=LatticeDistribution(res.offset, res.weights),
        snapshots=_snapshots_to_dists(res.snapshots),
    )


def absorbed_at_origin(law: StepLaw, x: int, n: int, snapshot_steps=(),
                       track_negative: bool = False):
    """Kill-at-origin kernel q^k(x, .) and passage law f_x(k), k <= n."""
    zmin, pmf = law.pmf_array()
    res = dp.run_dp(x, np.ones(1), zmin, pmf, n, mode=dp.POINT, alpha=1.0,
                    snapshot_steps=snapshot_steps,
                    track_negative=track_negative)
    sl = AbsorbedKernelSlice(
        mode="point", alpha=1.0, x=x, n=n,
        distribution=LatticeDistribution(res.offset, res.weights),
        absorbed_by_step=res.absorbed,
        snapshots=_snapshots_to_dists(res.snapshots),
    )
    fp = FirstPassageSeries(x=x, values=res.absorbed)
    if track_negative:
        sl.neg_mass = res.neg_mass  # per-step sum over sites <= -1
    return sl, fp


def absorbed_on_halfline(law: StepLaw, x: int, n: int, snapshot_steps=()):
    """Kill-on-(-inf,0] kernel and the entrance table h_x(k, y)."""
    if x < 1:
        raise ValueError("halfline absorption requires start x >= 1")
    zmin, pmf = law.pmf_array()
    res = dp.run_dp(x, np.ones(1), zmin, pmf, n, mode=dp.HALFLINE,
                    snapshot_steps=snapshot_steps)
    sl = AbsorbedKernelSlice(
        mode="halfline", alpha=1.0, x=x, n=n,
        distribution=LatticeDistribution(res.offset, res.weights),
        absorbed_by_step=res.entry.sum(axis=1),
        snapshots=_snapshots_to_dists(res.snapshots),
    )
    table = EntranceTable(x=x, n=n, entry_base=res.entry_base, h=res.entry,
                          deficit=float(res.weights.sum()))
    return sl, table


def entrance_law(law: StepLaw, x: int, n: int) -> EntranceTable:
    _, table = absorbed_on_halfline(law, x, n)
    return table


def partial_absorption(law: StepLaw, alpha: float, x: int, n: int,
                       snapshot_steps=()) -> AbsorbedKernelSlice:
    """q_alpha^k(x, .): mass arriving at 0 is removed with probability alpha.

    Starting at 0 does not count as an arrival; the zero-step kernel is
    the identity for every alpha.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    zmin, pmf = law.pmf_array()
    res = dp.run_dp(x, np.ones(1), zmin, pmf, n, mode=dp.POINT, alpha=alpha,
                    snapshot_steps=snapshot_steps)
    return AbsorbedKernelSlice(
        mode="partial", alpha=alpha, x=x, n=n,
        distribution=LatticeDistribution(res.offset, res.weights),
        absorbed_by_step=res.absorbed,
        snapshots=_snapshots_to_dists(res.snapshots),
    )


def r_alpha(law: StepLaw, alpha: float, x: int, n: int) -> LatticeDistribution:
    """r_alpha^n = q_alpha^n - q^n as a window over the union of supports."""
    qa = partial_absorption(law, alpha, x, n).distribution
    q1, _ = absorbed_at_origin(law, x, n)
    q = q1.distribution
    lo = min(qa.offset, q.offset)
    hi = max(qa.offset + len(qa.weights), q.offset + len(q.weights))
    out = np.zeros(hi - lo)
    out[qa.offset - lo: qa.offset - lo + len(qa.weights)] += qa.weights
    out[q.offset - lo: q.offset - lo + len(q.weights)] -= q.weights
    return LatticeDistribution(lo, out)


def negative_mass(law: StepLaw, x: int, n: int):
    """Q_x^+(n) = sum_{y <= -1} q^n(x, y), plus the per-step table."""
    zmin, pmf = law.pmf_array()
    res = dp.run_dp(x, np.ones(1), zmin, pmf, n, mode=dp.POINT, alpha=1.0,
                    track_negative=True)
    return float(res.neg_mass[n]), res.neg_mass


def nu_and_particles(law: StepLaw, n: int, x_max: int | None = None,
                     ell: float = 1.0, tol: float = 0.05):
    """Truncation of nu_n = sum_{x>=1} Q_x^+(n), with a tail bound, and
    the expected count of surviving particles in [-ell*sqrt(sigma2 n), -1]
    when one particle starts on every site of 1..x_max.

    A single point-absorbed DP with unit mass on every start site gives
    both sums by linearity.  The tail over x > x_max is bounded by the
    Gaussian envelope sum_{x > x_max} g_{4n}(x) plus the exact big-jump
    term sum_{y<0} |y| P[Y < y - x/2], which vanishes for finite support
    once x_max exceeds twice the largest down-jump.
    """
    m = moments(law)
    sigma2 = float(m.sigma2)
    n_star = sigma2 * n
    if x_max is None:
        x_max = math.ceil(8.0 * math.sqrt(n_star))
    zmin, pmf = law.pmf_array()
    init = np.ones(x_max)
    res = dp.run_dp(1, init, zmin, pmf, n, mode=dp.POINT, alpha=1.0,
                    track_negative=True)
    nu_trunc = float(res.neg_mass[n])

    # Gaussian envelope tail (the big-jump term is identically zero here
    # because x_max/2 >= |support_min|).
    tail = 0.0
    var4 = 4.0 * n_star
    x = x_max + 1
    while True:
        t = math.exp(-x * x / (2.0 * var4)) / math.sqrt(2.0 * math.pi * var4)
        if x > x_max + 1 and t < 1e-18:
            break
        tail += t
        x += 1
    if x_max < 2 * (-law.zmin):
        raise TailNotNegligible("x_max below twice the largest down-jump")
    if tail > tol:
        raise TailNotNegligible(f"tail bound {tail:.3g} exceeds tol {tol:.3g}")

    dist = LatticeDistribution(res.offset, res.weights)
    lo = -int(math.floor(ell * math.sqrt(n_star)))
    expected_particles = dist.restricted_sum(lo, -1)
    return nu_trunc, tail, expected_particles


@dataclass
class StripExit:
    """Exit data for the strip 0 < x < N.

    p_exit_high_before_halfline: P_x[walk enters [N, inf) before (-inf, 0]].
    mean_overshoot: E_x[S - N at that entry | entry above N first].
    p_hit_high_before_origin: P_x[walk enters [N, inf) before site 0],
        computed on states (-L, N) with mass escaping below -L dropped;
        undecided bounds the error (zero for left-continuous laws).
    """

    x: int
    N: int
    p_exit_high_before_halfline: float
    mean_overshoot: float
    p_hit_high_before_origin: float
    undecided: float


def _interior_system(law: StepLaw, states: np.ndarray):
    """I - P restricted to `states`, as a dense matrix."""
    idx = {int(s): i for i, s in enumerate(states)}
    m = len(states)
    A = np.eye(m)
    for i, s in enumerate(states):
        for z, w in law.items():
            j = idx.get(int(s) + z)
            if j is not None:
                A[i, j] -= float(w)
    return A, idx


def strip_exit(law: StepLaw, x: int, N: int, lower_cut: int | None = None) -> StripExit:
    if not 0 < x < N:
        raise ValueError("need 0 < x < N")
    fw = {z: float(w) for z, w in law.items()}

    # Half-line variant: states 1..N-1, absorbed below 1 or at/above N.
    states = np.arange(1, N)
    A, _ = _interior_system(law, states)
    b_hit = np.array([sum(w for z, w in fw.items() if s + z >= N) for s in states])
    b_over = np.array([sum((s + z - N) * w for z, w in fw.items() if s + z >= N)
                       for s in states])
    try:
        lu = lu_factor(A)
    except Exception as e:  # pragma: no cover - cannot occur for valid laws
        raise SingularSystem(str(e)) from e
    u = lu_solve(lu, b_hit)
    v = lu_solve(lu, b_over)
    p_high = float(u[x - 1])
    overshoot = float(v[x - 1] / u[x - 1]) if u[x - 1] > 0 else 0.0

    # Point variant: absorbed only at site 0 or at/above N.  States run
    # down to lower_cut+1; mass jumping to <= lower_cut is dropped and
    # reported as `undecided` (an upper bound on the truncation error).
    if lower_cut is None:
        # a left-continuous walk cannot pass 0 downward without hitting it
        lower_cut = -1 if law.zmin >= -1 else -4 * N
    states2 = np.array([s for s in range(lower_cut + 1, N) if s != 0])
    A2, _ = _interior_system(law, states2)
    b2 = np.array([sum(w for z, w in fw.items() if s + z >= N) for s in states2])
    b_drop = np.array([sum(w for z, w in fw.items() if s + z <= lower_cut)
                       for s in states2])
    try:
        lu2 = lu_factor(A2)
    except Exception as e:  # pragma: no cover
        raise SingularSystem(str(e)) from e
    u2 = lu_solve(lu2, b2)
    d2 = lu_solve(lu2, b_drop)
    i_x = int(np.where(states2 == x)[0][0])
    return StripExit(
        x=x, N=N,
        p_exit_high_before_halfline=p_high,
        mean_overshoot=overshoot,
        p_hit_high_before_origin=float(u2[i_x]),
        undecided=float(d2[i_x]),
    )


# ---------------------------------------------------------------------------
# Exact rational mode (small n), used to calibrate float tolerances.

def _conv_exact(cur: dict[int, Fraction], law: StepLaw) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for s, m in cur.items():
        for z, w in law.items():
            out[s + z] = out.get(s + z, Fraction(0)) + m * w
    return out


def evolve_free_exact(law: StepLaw, x: int, n: int) -> dict[int, Fraction]:
    if n > EXACT_STEP_LIMIT:
        raise ValueError(f"exact mode limited to n <= {EXACT_STEP_LIMIT}")
    cur = {x: Fraction(1)}
    for _ in range(n):
        cur = _conv_exact(cur, law)
    return cur


def absorbed_at_origin_exact(law: StepLaw, x: int, n: int):
    """Rational q^n(x, .) and passage law; n <= 64."""
    if n > EXACT_STEP_LIMIT:
        raise ValueError(f"exact mode limited to n <= {EXACT_STEP_LIMIT}")
    cur = {x: Fraction(1)}
    passage = []
    for _ in range(n):
        cur = _conv_exact(cur, law)
        passage.append(cur.pop(0, Fraction(0)))
    return cur, passage


def slice_rows(sl: AbsorbedKernelSlice):
    """Deterministic (mode, x, n, y, value) rows, y ascending."""
    d = sl.distribution
    for i, w in enumerate(d.weights):
        yield (sl.mode, sl.x, sl.n, d.offset + i, float(w))
