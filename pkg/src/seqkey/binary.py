"""Closed-form binary capacities and the reconciliation counterexample.

Two binary source families live here. ``BscCascadeSource`` is the symmetric
degraded cascade X -> Y -> Z (BSC(p) then BSC(q)) whose rate-limited
reconciliation and weak secret-key capacities have closed forms through the
root beta0 of ``H_b(p * beta) - H_b(beta) = R1`` when the input is uniform.
``AsymBinarySource`` is the asymmetric cascade behind the counterexample
showing that reconciliation and privacy amplification are not independent
under a rate limit: the test channel that maximizes the reconciliation rate
f subject to the public-rate constraint (h - f) = R1 can be strictly worse
for the achievable key rate (f - g) than the key-rate optimum, by more than
ten percent on the reference parameter set.

All rates here are in bits. Closed forms assume a uniform input; a
non-uniform prior routes through the generic test-channel optimizer instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from seqkey.errors import InfeasibleError, ParameterError, RateSaturated
from seqkey.measures import (
    binary_entropy,
    check_prob,
    conditional_entropy,
    joint_from_cascade,
    mutual_information,
    star,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bsc_matrix(t):
    """Row-stochastic binary symmetric channel with crossover t."""
    t = check_prob(t, "crossover")
    return np.array([[1.0 - t, t], [t, 1.0 - t]])


def _check_rate(r1):
    r = float(r1)
    if math.isnan(r) or r < 0.0:
        raise ParameterError(f"public rate must be >= 0, got {r1!r}")
    return r


@dataclass(frozen=True)
class BscCascadeSource:
    """X -> Y -> Z through BSC(p) then BSC(q), with X ~ Bernoulli(prior).

    The closed-form capacity paths require ``prior = 1/2``; other priors are
    legal and fall back to the generic optimizer on the induced joint.
    """

    p: float
    q: float
    prior: float = 0.5

    def __post_init__(self):
        check_prob(self.p, "p")
        check_prob(self.q, "q")
        check_prob(self.prior, "prior")

    def _px(self):
        return np.array([1.0 - self.prior, self.prior])

    def joint_xy(self):
        """Induced joint over (X, Y) with a singleton Z axis."""
        return joint_from_cascade(self._px(), bsc_matrix(self.p))

    def joint(self):
        """Induced degraded joint over (X, Y, Z)."""
        return joint_from_cascade(self._px(), bsc_matrix(self.p),
                                  bsc_matrix(self.q))

    def h_x_given_y(self):
        """H(X|Y) in bits; equals H_b(p) at the uniform prior."""
        return conditional_entropy(self.joint_xy(), "x", "y")


def beta0_solve(p, r1):
    """Solve ``H_b(p * beta) - H_b(beta) = r1`` for beta.

    Parameters
    ----------
    p : float
        BSC crossover, strictly inside (0, 1/2).
    r1 : float
        Public communication rate in bits, 0 < r1 <= H_b(p).

    Returns
    -------
    (float, float)
        The two symmetric roots (beta0, 1 - beta0), the first in [0, 1/2].

    The left side decreases strictly from H_b(p) at beta = 0 to 0 at
    beta = 1/2, so bisection brackets the unique root in [0, 1/2]; the
    mirror root follows from the beta <-> 1 - beta symmetry of both entropy
    terms. Rates above H_b(p) = H(X|Y) raise RateSaturated so callers can
    switch to the unconstrained formula.
    """
    p = check_prob(p, "p")
    if not 0.0 < p < 0.5:
        raise ParameterError(f"crossover must lie strictly in (0, 1/2), got {p!r}")
    r1 = _check_rate(r1)
    if r1 == 0.0:
        raise ParameterError("rate must be positive; at zero the useless "
                             "channel beta = 1/2 is the only solution")
    cap = binary_entropy(p)
    if r1 > cap:
        raise RateSaturated(
            f"rate {r1!r} exceeds H(X|Y) = {cap!r}; the constraint is inactive")
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if binary_entropy(star(p, mid)) - binary_entropy(mid) > r1:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    return beta, 1.0 - beta


def _optimized(joint, objective, r1):
    # non-uniform priors have no closed form; defer to the generic optimizer
    hxy = conditional_entropy(joint, "x", "y")
    if r1 >= hxy:
        val = mutual_information(joint, "x", "y")
        if objective == "wsk":
            val -= mutual_information(joint, "x", "z")
        return max(val, 0.0)
    from seqkey.optimizer import optimize_oneway

    return optimize_oneway(joint, r1, objective=objective).value


def c_rec_bsc(src, r1):
    """Rate-limited reconciliation capacity of the BSC cascade, in bits.

    ``1 - H_b(p * beta0)`` while the rate constraint binds, saturating at
    ``1 - H_b(p) = I(X;Y)`` once r1 reaches H(X|Y).
    """
    r1 = _check_rate(r1)
    if src.prior != 0.5:
        return _optimized(src.joint(), "rec", r1)
    pp = min(src.p, 1.0 - src.p)  # relabeling Y maps p to 1-p, capacities agree
    if r1 >= binary_entropy(pp):
        return 1.0 - binary_entropy(pp)
    if r1 == 0.0 or pp == 0.5:
        return 0.0
    beta, _ = beta0_solve(pp, r1)
    return 1.0 - binary_entropy(star(pp, beta))


def c_wsk_bsc(src, r1):
    """Rate-limited weak secret-key capacity of the BSC cascade, in bits.

    ``H_b(p * beta0 * q) - H_b(p * beta0)`` while the constraint binds,
    saturating at ``H_b(p * q) - H_b(p)``. Reduces to c_rec_bsc when
    q = 1/2 (the eavesdropper's symbol carries nothing).
    """
    r1 = _check_rate(r1)
    if src.prior != 0.5:
        return _optimized(src.joint(), "wsk", r1)
    pp = min(src.p, 1.0 - src.p)
    qq = min(src.q, 1.0 - src.q)
    if r1 >= binary_entropy(pp):
        return binary_entropy(star(pp, qq)) - binary_entropy(pp)
    if r1 == 0.0 or pp == 0.5:
        return 0.0
    beta, _ = beta0_solve(pp, r1)
    e = star(pp, beta)
    return binary_entropy(star(e, qq)) - binary_entropy(e)


def c_wsk_bec(src, epsilon, r1):
    """WSK capacity when the eavesdropper sees Y through a BEC.

    ``epsilon`` is the erasure probability, so epsilon = 1 blinds the
    eavesdropper completely and recovers the reconciliation capacity. The
    value is epsilon * c_rec_bsc(src, r1) at every rate.
    """
    epsilon = check_prob(epsilon, "epsilon")
    return epsilon * c_rec_bsc(src, r1)


@dataclass(frozen=True)
class AsymBinarySource:
    """X ~ Bernoulli(p) through asymmetric binary channels X -> Y -> Z.

    beta1 and gamma1 are the crossover probabilities out of symbol 0,
    beta2 and gamma2 out of symbol 1; so beta1 = P[Y=1|X=0] and
    beta2 = P[Y=0|X=1]. Under this convention the derived quantities read
    p_y = P[Y=0] and p_z = P[Z=0]; only their (symmetric) entropies enter
    the f/g/h formulas, so the 0/1 orientation is immaterial.
    """

    p: float
    beta1: float
    beta2: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        for name in ("p", "beta1", "beta2", "gamma1", "gamma2"):
            check_prob(getattr(self, name), name)
        check_prob(self.p_y, "p_y")
        check_prob(self.p_z, "p_z")

    @property
    def p_y(self):
        """P[Y = 0]."""
        return (1.0 - self.p) * (1.0 - self.beta1) + self.p * self.beta2

    @property
    def p_z(self):
        """P[Z = 0]."""
        return self.p_y * (1.0 - self.gamma1) + (1.0 - self.p_y) * self.gamma2

    def channel_xy(self):
        return np.array([[1.0 - self.beta1, self.beta1],
                         [self.beta2, 1.0 - self.beta2]])

    def channel_yz(self):
        return np.array([[1.0 - self.gamma1, self.gamma1],
                         [self.gamma2, 1.0 - self.gamma2]])

    def joint(self):
        """Induced degraded joint over (X, Y, Z)."""
        px = np.array([1.0 - self.p, self.p])
        return joint_from_cascade(px, self.channel_xy(), self.channel_yz())

    def h_x_given_y(self):
        """H(X|Y) in bits."""
        return conditional_entropy(self.joint(), "x", "y")


@dataclass(frozen=True)
class AlphaPair:
    """The two parameters of the binary test channel U.

    alpha1 = P[X=1 | U=u1] and alpha2 = P[X=0 | U=u2]; the mixture weight
    p_u = P[U=u1] is pinned by consistency with P[X=1] = p.
    """

    alpha1: float
    alpha2: float

    def __post_init__(self):
        check_prob(self.alpha1, "alpha1")
        check_prob(self.alpha2, "alpha2")


def mixture_weight(src, ap):
    """P[U = u1] implied by the pair; raises InfeasibleError off the region."""
    denom = (1.0 - ap.alpha2) - ap.alpha1
    if abs(denom) < 1e-15:
        raise InfeasibleError(
            "alpha1 = 1 - alpha2 leaves the mixture weight undefined")
    pu = ((1.0 - ap.alpha2) - src.p) / denom
    if not -1e-12 <= pu <= 1.0 + 1e-12:
        raise InfeasibleError(
            f"pair ({ap.alpha1}, {ap.alpha2}) implies P[U=u1] = {pu}, "
            "outside [0, 1]")
    return min(max(pu, 0.0), 1.0)


def counterexample_channel(src, ap):
    """(p_U, p_{X|U}) of the induced test channel, rows indexed by U."""
    pu = mixture_weight(src, ap)
    p_u = np.array([pu, 1.0 - pu])
    x_given_u = np.array([[1.0 - ap.alpha1, ap.alpha1],
                          [ap.alpha2, 1.0 - ap.alpha2]])
    return p_u, x_given_u


def counterexample_fgh(src, ap):
    """The triple (f, g, h) in bits for a feasible test-channel pair.

    f is the forward rate term I(Y;U), g the eavesdropper term I(Z;U) and
    h the source term I(X;U); h - f equals the public rate I(X;U|Y) spent
    by the pair, and f - g the key rate it achieves.
    """
    pu = mixture_weight(src, ap)
    a1, a2 = ap.alpha1, ap.alpha2
    a1b, a2b = 1.0 - a1, 1.0 - a2
    b1, b2 = src.beta1, src.beta2
    g1, g2 = src.gamma1, src.gamma2
    a = a1 * b2 + a1b * (1.0 - b1)
    b = a2 * (1.0 - b1) + a2b * b2
    c = (a1b * (1.0 - b1) * (1.0 - g1) + a1b * b1 * g2
         + a1 * b2 * (1.0 - g1) + a1 * (1.0 - b2) * g2)
    d = (a2b * (1.0 - b2) * g2 + a2b * b2 * (1.0 - g1)
         + a2 * (1.0 - b1) * (1.0 - g1) + a2 * b1 * g2)
    pub = 1.0 - pu
    f = binary_entropy(src.p_y) - pu * binary_entropy(a) - pub * binary_entropy(b)
    g = binary_entropy(src.p_z) - pu * binary_entropy(c) - pub * binary_entropy(d)
    h = binary_entropy(src.p) - pu * binary_entropy(a1) - pub * binary_entropy(a2)
    return f, g, h


@dataclass(frozen=True)
class CounterexampleReport:
    """Both constrained optima of the counterexample and their gap."""

    r1: float
    c_wsk: float                  # max (f - g) subject to (h - f) = r1
    wsk_pair: AlphaPair
    c_rec: float                  # max f subject to the same constraint
    rec_pair: AlphaPair
    key_rate_at_rec: float        # (f - g) at the reconciliation optimum
    relative_loss: float          # 1 - key_rate_at_rec / c_wsk
    constraint_residual: float    # max |h - f - r1| over the two optima


def _trace_alpha2(src, a1, r1):
    # root of (h - f)(a1, .) = r1 in [0, 1 - p); the constraint decreases
    # from its value at alpha2 = 0 to 0 as the channel degenerates
    lo, hi = 0.0, 1.0 - src.p - 1e-13
    f, _, h = counterexample_fgh(src, AlphaPair(a1, lo))
    if h - f < r1:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        f, _, h = counterexample_fgh(src, AlphaPair(a1, mid))
        if h - f >= r1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _golden_max(fun, lo, hi, tol=1e-11):
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = fun(d)
    return 0.5 * (lo + hi)


def counterexample_solve(src, r1, grid=512):
    """Both constrained optima of the counterexample source.

    Parameters
    ----------
    src : AsymBinarySource
    r1 : float
        Public rate in bits, strictly inside (0, H(X|Y)).
    grid : int
        Points of the alpha1 sweep before golden-section refinement.

    Returns
    -------
    CounterexampleReport

    The feasible pairs form a 1-D curve: for each alpha1 in [0, p) the
    constraint (h - f) = r1 pins alpha2 by bisection (the mirror region
    alpha1 > p describes the same channels with the U labels swapped, so
    sweeping one region is exhaustive). Both objectives are maximized
    along the curve by a scan plus golden-section refinement; ties keep
    the lexicographically smallest pair because the scan only replaces a
    candidate on strict improvement from the low end.
    """
    r1 = float(r1)
    hxy = src.h_x_given_y()
    if not 0.0 < r1 < hxy:
        raise ParameterError(
            f"rate must lie strictly inside (0, H(X|Y)) = (0, {hxy}), got {r1!r}")

    def on_curve(a1):
        a2 = _trace_alpha2(src, a1, r1)
        if a2 is None:
            return None
        pair = AlphaPair(a1, a2)
        f, g, _ = counterexample_fgh(src, pair)
        return pair, f, g

    alphas = np.linspace(0.0, src.p, grid, endpoint=False)
    best_wsk = best_rec = None
    step = alphas[1] - alphas[0]
    for a1 in alphas:
        got = on_curve(float(a1))
        if got is None:
            continue
        pair, f, g = got
        if best_wsk is None or f - g > best_wsk[0]:
            best_wsk = (f - g, pair)
        if best_rec is None or f > best_rec[0]:
            best_rec = (f, pair)
    if best_wsk is None:
        raise InfeasibleError("the constraint curve is empty in the feasible region")

    def refined(center, key):
        lo = max(center - step, 0.0)
        hi = min(center + step, src.p - 1e-12)

        def value(a1):
            got = on_curve(a1)
            if got is None:
                return -math.inf
            _, f, g = got
            return f - g if key == "wsk" else f

        a1 = _golden_max(value, lo, hi)
        got = on_curve(a1)
        return got if got is not None else on_curve(center)

    wsk_pair, fw, gw = refined(best_wsk[1].alpha1, "wsk")
    rec_pair, fr, gr = refined(best_rec[1].alpha1, "rec")
    _, _, hw = counterexample_fgh(src, wsk_pair)
    _, _, hr = counterexample_fgh(src, rec_pair)
    c_wsk = fw - gw
    key_at_rec = fr - gr
    loss = 1.0 - key_at_rec / c_wsk if c_wsk > 0.0 else 0.0
    residual = max(abs(hw - fw - r1), abs(hr - fr - r1))
    return CounterexampleReport(
        r1=r1,
        c_wsk=c_wsk,
        wsk_pair=wsk_pair,
        c_rec=fr,
        rec_pair=rec_pair,
        key_rate_at_rec=key_at_rec,
        relative_loss=loss,
        constraint_residual=residual,
    )
