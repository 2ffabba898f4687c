"""Statistical estimators for the benchmarking harnesses.

Every estimator is a pure function of aggregated counts: exponential-decay
maximum-likelihood fits for cycle benchmarking, survival fits for memory
experiments, depolarizing-model fits for mirror benchmarking, power-law
slope fits for error-rate scaling, union bounds on process infidelity, and
single-shot / verification-operator entangled-state fidelity estimates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, stats

_EPS = 1e-12


# ---------------------------------------------------------------------------
# binomial confidence intervals
# ---------------------------------------------------------------------------

def _z_value(confidence: float) -> float:
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    # two-sided normal quantile (~0.9945 for 68%)
    return float(stats.norm.ppf(0.5 + confidence / 2))


def wilson_interval(successes: int, trials: int,
                    confidence: float = 0.68) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    z = _z_value(confidence)
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = p + z2 / (2 * trials)
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    return ((centre - half) / denom, (centre + half) / denom)


# ---------------------------------------------------------------------------
# exponential decay of Pauli expectation values (cycle benchmarking)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    """mu(L) = A f^L fitted through the match probability q(L) = (1+A f^L)/2.

    ci is a bootstrap percentile interval on the per-cycle fidelity f;
    saturated marks degenerate data (every shot matched at every depth), for
    which f sits at the upper bound by construction.
    """
    amplitude: float
    fidelity: float
    ci: Tuple[float, float]
    saturated: bool = False
    nll: float = 0.0

    def match_probability(self, depth: float) -> float:
        return (1 + self.amplitude * self.fidelity ** depth) / 2


def _decay_nll(params, depths, matches, trials):
    a, f = params
    q = np.clip((1 + a * np.power(f, depths)) / 2, _EPS, 1 - _EPS)
    return -np.sum(matches * np.log(q) + (trials - matches) * np.log(1 - q))


def _fit_decay_point(depths: np.ndarray, matches: np.ndarray,
                     trials: np.ndarray) -> Tuple[float, float, float]:
    """Single MLE fit; returns (A, f, nll)."""
    mu = np.clip(2 * matches / trials - 1, _EPS, 1.0)
    # crude log-linear seed for f (and A from extrapolating to depth 0)
    with np.errstate(divide="ignore"):
        slope, icept = np.polyfit(depths, np.log(mu), 1) if len(depths) > 1 \
            else (0.0, math.log(mu[0]))
    f0 = float(np.clip(math.exp(min(slope, 0.0)), 0.1, 1.0))
    a0 = float(np.clip(math.exp(min(icept, 0.0)), 0.1, 1.0))
    best = None
    for start in ((a0, f0), (1.0, f0), (1.0, 0.999), (0.9, 0.9)):
        res = optimize.minimize(
            _decay_nll, start, args=(depths, matches, trials),
            method="L-BFGS-B", bounds=((0.0, 1.0), (0.0, 1.0)))
        if best is None or res.fun < best.fun:
            best = res
    return float(best.x[0]), float(best.x[1]), float(best.fun)


def fit_decay_mle(counts: Mapping[int, Tuple[int, int]],
                  bootstrap: int = 500, confidence: float = 0.68,
                  seed: int = 0) -> DecayFit:
    """Binomial MLE of the exponential decay from per-depth match counts.

    counts maps cycle depth L to (matches, accepted shots).  The bootstrap
    CI comes from parametric resampling of the fitted binomials.
    """
    items = sorted((l, m, n) for l, (m, n) in counts.items() if n > 0)
    if len(items) < 2:
        raise ValueError("need match counts at two or more depths")
    depths = np.array([l for l, _, _ in items], dtype=float)
    matches = np.array([m for _, m, _ in items], dtype=float)
    trials = np.array([n for _, _, n in items], dtype=float)
    if np.any(matches > trials) or np.any(matches < 0):
        raise ValueError("match counts must lie in [0, shots]")

    if np.all(matches == trials):
        # all depths saturated: f is pinned to the upper bound
        return DecayFit(1.0, 1.0, (1.0, 1.0), saturated=True)

    a_hat, f_hat, nll = _fit_decay_point(depths, matches, trials)
    lo = hi = f_hat
    if bootstrap > 0:
        rng = np.random.default_rng(seed)
        q = np.clip((1 + a_hat * np.power(f_hat, depths)) / 2, 0.0, 1.0)
        fs = np.empty(bootstrap)
        for b in range(bootstrap):
            k = rng.binomial(trials.astype(int), q)
            _, fs[b], _ = _fit_decay_point(depths, k.astype(float), trials)
        tail = (1 - confidence) / 2
        lo, hi = np.quantile(fs, (tail, 1 - tail))
    return DecayFit(a_hat, f_hat, (float(lo), float(hi)), nll=nll)


@dataclass(frozen=True)
class CycleFidelity:
    """Process fidelity of one cycle and the derived per-2Q-gate numbers."""
    f_pro: float
    f_pro_2q: float
    f_avg: float


def fidelity_from_cycle(f_pro: float, gates_per_cycle: int) -> CycleFidelity:
    """Average gate fidelity from the cycle process fidelity.

    gates_per_cycle is the number of two-qubit gates in one benchmarked
    cycle; F_pro,2Q = F_pro^(1/n) and F_avg = (4 F_pro,2Q + 1)/5.
    """
    if gates_per_cycle < 1:
        raise ValueError("gates_per_cycle must be >= 1")
    if not 0 <= f_pro <= 1:
        raise ValueError("process fidelity must lie in [0, 1]")
    f2q = f_pro ** (1.0 / gates_per_cycle)
    return CycleFidelity(f_pro, f2q, (4 * f2q + 1) / 5)


# ---------------------------------------------------------------------------
# memory survival and infidelity bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurvivalFit:
    """p(c) = 1/2 + (s - 1/2)(1 - 2q)^c: SPAM term s, per-cycle flip q."""
    spam: float
    flip_rate: float
    ci: Tuple[float, float]   # bootstrap interval on flip_rate

    def survival(self, cycles: float) -> float:
        return 0.5 + (self.spam - 0.5) * (1 - 2 * self.flip_rate) ** cycles


def _survival_nll(params, cycles, good, trials):
    s, q = params
    p = np.clip(0.5 + (s - 0.5) * np.power(1 - 2 * q, cycles),
                _EPS, 1 - _EPS)
    return -np.sum(good * np.log(p) + (trials - good) * np.log(1 - p))


def _fit_survival_point(cycles, good, trials) -> Tuple[float, float]:
    best = None
    for start in ((0.99, 0.01), (0.9, 0.05), (1.0, 0.001)):
        res = optimize.minimize(
            _survival_nll, start, args=(cycles, good, trials),
            method="L-BFGS-B", bounds=((0.5, 1.0), (0.0, 0.5)))
        if best is None or res.fun < best.fun:
            best = res
    return float(best.x[0]), float(best.x[1])


def fit_survival(points: Mapping[int, Tuple[int, int]],
                 bootstrap: int = 500, confidence: float = 0.68,
                 seed: int = 0) -> SurvivalFit:
    """Binomial MLE of the memory survival curve over cycle counts.

    points maps cycle count c to (surviving shots, accepted shots).
    """
    items = sorted((c, g, n) for c, (g, n) in points.items() if n > 0)
    if len(items) < 2:
        raise ValueError("need survival counts at two or more cycle counts")
    cycles = np.array([c for c, _, _ in items], dtype=float)
    good = np.array([g for _, g, _ in items], dtype=float)
    trials = np.array([n for _, _, n in items], dtype=float)
    s_hat, q_hat = _fit_survival_point(cycles, good, trials)
    lo = hi = q_hat
    if bootstrap > 0:
        rng = np.random.default_rng(seed)
        p = np.clip(0.5 + (s_hat - 0.5) * np.power(1 - 2 * q_hat, cycles),
                    0.0, 1.0)
        qs = np.empty(bootstrap)
        for b in range(bootstrap):
            k = rng.binomial(trials.astype(int), p)
            _, qs[b] = _fit_survival_point(cycles, k.astype(float), trials)
        tail = (1 - confidence) / 2
        lo, hi = np.quantile(qs, (tail, 1 - tail))
    return SurvivalFit(s_hat, q_hat, (float(lo), float(hi)))


@dataclass(frozen=True)
class InfidelityBound:
    """Two-term union bound on process infidelity from basis flip rates.

    Any Pauli error containing an X or Y flips the Z-basis memory readout,
    and any containing a Z or Y flips the X-basis readout; the two measured
    flip probabilities therefore bracket the total Pauli error weight:
    (p0 + p+)/2 <= I <= p0 + p+.  With qubits > 1 the per-qubit fields
    convert the block-level bound into an average per-qubit infidelity.
    """
    lower: float
    upper: float
    mode: str
    qubits: int = 1
    lower_per_qubit: float = 0.0
    upper_per_qubit: float = 0.0


def union_bounds(p_zero_basis: float, p_plus_basis: float,
                 mode: str = "multi", qubits: int = 1) -> InfidelityBound:
    if mode not in ("multi", "single-qubit"):
        raise ValueError("mode must be 'multi' or 'single-qubit'")
    for p in (p_zero_basis, p_plus_basis):
        if not 0 <= p <= 1:
            raise ValueError("flip probabilities must lie in [0, 1]")
    if qubits < 1:
        raise ValueError("qubits must be >= 1")
    upper = p_zero_basis + p_plus_basis
    lower = upper / 2
    per = (1 - (1 - min(lower, 1.0)) ** (1 / qubits),
           1 - (1 - min(upper, 1.0)) ** (1 / qubits))
    return InfidelityBound(lower, upper, mode, qubits, per[0], per[1])


# ---------------------------------------------------------------------------
# depolarizing-model and power-law fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DepolFit:
    """F(N) = A (1 - 5/4 eps)^N fitted to survival vs two-qubit gate count."""
    amplitude: float
    eps2q: float
    residuals: Tuple[float, ...]   # log-domain residuals, one per point


def _weighted_line(x: np.ndarray, y: np.ndarray,
                   w: np.ndarray) -> Tuple[float, float]:
    """Weighted least-squares slope and intercept."""
    wt = w / w.sum()
    xm, ym = np.sum(wt * x), np.sum(wt * y)
    slope = np.sum(wt * (x - xm) * (y - ym)) / np.sum(wt * (x - xm) ** 2)
    return float(slope), float(ym - slope * xm)


def fit_depolarizing(points: Mapping[int, Tuple[int, int]]) -> DepolFit:
    """Fit the depolarizing survival model over two-qubit gate counts.

    points maps the circuit's 2Q gate count N to (survivors, accepted).
    Least squares on log F with binomial weights; zero-survivor points are
    dropped with a warning.
    """
    xs, ys, ws = [], [], []
    for n, (g, t) in sorted(points.items()):
        if t <= 0 or g <= 0:
            warnings.warn(f"dropping gate count {n}: nonpositive rate")
            continue
        r = min(g / t, 1 - 0.5 / t)   # keep the log-variance finite
        xs.append(float(n))
        ys.append(math.log(r))
        ws.append(t * r / (1 - r))    # inverse variance of log(r)
    if len(xs) < 3:
        raise ValueError("need at least three usable gate counts")
    slope, icept = _weighted_line(np.array(xs), np.array(ys), np.array(ws))
    eps = (1 - math.exp(min(slope, 0.0))) * 4 / 5
    resid = tuple(float(y - (icept + slope * x)) for x, y in zip(xs, ys))
    return DepolFit(math.exp(icept), eps, resid)


@dataclass(frozen=True)
class PowerlawFit:
    """rate = C p^beta fitted on the log-log grid."""
    slope: float
    intercept: float          # log C
    ci: Tuple[float, float]   # bootstrap interval on the slope

    def rate(self, p: float) -> float:
        return math.exp(self.intercept) * p ** self.slope


def _powerlaw_point(ps, events, trials,
                    transform: str = "identity"
                    ) -> Optional[Tuple[float, float]]:
    xs, ys, ws = [], [], []
    for p, e, t in zip(ps, events, trials):
        if e <= 0 or e >= t:
            continue
        r = e / t
        val = -math.log1p(-r) if transform == "intensity" else r
        xs.append(math.log(p))
        ys.append(math.log(val))
        ws.append(float(e))       # var log(rate) ~ 1/events
    if len(xs) < 2:
        return None
    return _weighted_line(np.array(xs), np.array(ys), np.array(ws))


def fit_powerlaw(points: Mapping[float, Tuple[int, int]],
                 bootstrap: int = 500, confidence: float = 0.68,
                 seed: int = 0, transform: str = "identity") -> PowerlawFit:
    """Log-log slope of an event rate versus physical error rate.

    points maps p to (events, trials).  Weighted least squares in the log
    domain with binomial weights; zero-event points are dropped with a
    warning; the slope CI comes from a parametric bootstrap.

    transform="intensity" fits the exponential event intensity
    -ln(1 - rate) instead of the raw rate.  When each trial can host many
    independent rare events and any of them trips the counter, the raw
    rate saturates toward 1 while the intensity keeps the underlying
    power law linear on the log-log grid; use it for discard-rate fits
    that extend into the saturated regime.
    """
    items = sorted(points.items())
    if len(items) < 3:
        raise ValueError("need at least three error-rate points")
    ps = [p for p, _ in items]
    events = [e for _, (e, _) in items]
    trials = [t for _, (_, t) in items]
    if any(t <= 0 for t in trials):
        raise ValueError("every point needs a positive trial count")
    if transform not in ("identity", "intensity"):
        raise ValueError(f"unknown transform {transform!r}")
    if any(e <= 0 for e in events):
        warnings.warn("dropping zero-event points from the power-law fit")
    fit = _powerlaw_point(ps, events, trials, transform)
    if fit is None:
        raise ValueError("fewer than two points with nonzero events")
    slope, icept = fit
    lo = hi = slope
    if bootstrap > 0:
        rng = np.random.default_rng(seed)
        rates = [e / t for e, t in zip(events, trials)]
        bs = []
        for _ in range(bootstrap):
            k = [int(rng.binomial(t, r)) for t, r in zip(trials, rates)]
            f = _powerlaw_point(ps, k, trials, transform)
            if f is not None:
                bs.append(f[0])
        if bs:
            tail = (1 - confidence) / 2
            lo, hi = np.quantile(bs, (tail, 1 - tail))
    return PowerlawFit(slope, icept, (float(lo), float(hi)))


# ---------------------------------------------------------------------------
# entangled-state fidelity estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GhzVerifierSpec:
    """Verification-operator test mix for N-qubit GHZ fidelity estimation.

    A third of the shots run the Z-type test (all-equal outcome in the
    computational basis); the rest draw uniformly from the 2^(N-1) XY-type
    stabilizers (tensor products of X and Y with an even number of Y
    factors, passed when the outcome parity matches the stabilizer's sign).
    The pass-rate functional Omega has Tr[Omega rho] = beta + (1-beta) F,
    so F = (pass rate - beta)/(1 - beta) with beta = 1/3.
    """
    beta: float = 1.0 / 3.0
    z_fraction: float = 1.0 / 3.0

    def fidelity(self, pass_rate: float) -> float:
        return (pass_rate - self.beta) / (1 - self.beta)

    def variance(self, fidelity: float) -> float:
        """Single-test variance of the fidelity estimator at the given F."""
        return (1 - fidelity) * (fidelity + self.beta / (1 - self.beta))


@dataclass(frozen=True)
class GhzFidelity:
    estimate: float
    ci: Tuple[float, float]
    mode: str
    accepted: int


def ghz_fidelity(counts: Mapping[str, int], mode: str = "logical_single_shot",
                 confidence: float = 0.68) -> GhzFidelity:
    """Entangled-state fidelity from harness counts.

    logical_single_shot: counts has `accepted` and `stabilizers_ok` (shots
    among the accepted whose decoded state satisfies every entangled-state
    stabilizer; the stabilizers themselves are not post-selected on), and
    the fidelity is their ratio with a Wilson interval.

    unencoded_verification: counts has `z_pass`, `z_trials`, `xy_pass`,
    `xy_trials` from the randomized verification tests; the fidelity is
    (3/2) * (1/3 z-rate + 2/3 xy-rate) - 1/2 with a propagated normal CI.
    """
    if mode == "logical_single_shot":
        accepted = int(counts["accepted"])
        if accepted <= 0:
            raise ValueError("no accepted shots")
        good = int(counts["stabilizers_ok"])
        lo, hi = wilson_interval(good, accepted, confidence)
        return GhzFidelity(good / accepted, (lo, hi), mode, accepted)
    if mode == "unencoded_verification":
        zt, xt = int(counts["z_trials"]), int(counts["xy_trials"])
        if zt <= 0 or xt <= 0:
            raise ValueError("no accepted shots")
        zr, xr = counts["z_pass"] / zt, counts["xy_pass"] / xt
        spec = GhzVerifierSpec()
        omega = spec.z_fraction * zr + (1 - spec.z_fraction) * xr
        f = spec.fidelity(omega)
        var = (spec.z_fraction ** 2 * zr * (1 - zr) / zt
               + (1 - spec.z_fraction) ** 2 * xr * (1 - xr) / xt)
        sigma = math.sqrt(var) / (1 - spec.beta)
        z = _z_value(confidence)
        return GhzFidelity(f, (f - z * sigma, f + z * sigma), mode, zt + xt)
    raise ValueError(f"unknown mode {mode!r}")
