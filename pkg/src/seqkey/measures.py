"""Information-theoretic primitives over finite joints and Gaussian correlations.

Every other module builds on this one, so the package-wide conventions are
fixed here:

* Discrete quantities default to bits and Gaussian ones to nats. Functions
  returning an information quantity take a ``units`` argument (``BITS`` or
  ``NATS``) rather than baking the base in, and values never carry an
  implicit unit across module boundaries.
* ``0 log 0 = 0``. Masses at or below ``ZERO_MASS`` are exact zeros.
* Distributions must sum to one within ``SUM_TOL``. Tiny negative masses
  above ``-SUM_TOL`` (float dust from upstream arithmetic) are clipped to
  zero; anything more negative is rejected.
* Joints are dense arrays indexed ``(x, y, z)``. Alphabets in this package
  stay small (tens of symbols per axis), so dense storage is both faster
  and easier to audit than sparse.

Axis arguments name a joint's coordinates by letter (``"x"``, ``"yz"``) or
by index (``0``, ``(1, 2)``).
"""

from __future__ import annotations

import math

import numpy as np

from seqkey.errors import ParameterError

BITS = "bits"
NATS = "nats"
LN2 = math.log(2.0)

SUM_TOL = 1e-12        # normalization slack for incoming distributions
DEGRADED_TOL = 1e-10   # conditional-equality slack for X -> Y -> Z checks
ZERO_MASS = 1e-300     # at or below this a mass is an exact zero

_AXIS_BY_NAME = {"x": 0, "y": 1, "z": 2}


def _scale(units):
    # factor converting nats into the requested units
    if units == NATS:
        return 1.0
    if units == BITS:
        return 1.0 / LN2
    raise ParameterError(f"unknown units {units!r}; expected {BITS!r} or {NATS!r}")


def convert_units(value, src, dst):
    """Convert an information quantity between bits and nats."""
    s, d = _scale(src), _scale(dst)
    return float(value) if src == dst else float(value) * d / s


def check_prob(value, name="probability"):
    """Validate a probability and return it as a float."""
    v = float(value)
    if math.isnan(v) or not 0.0 <= v <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {value!r}")
    return v


def star(p, q):
    """Binary convolution ``p(1-q) + (1-p)q``.

    Commutative and associative; 0 is the identity and 1/2 is absorbing.
    """
    p = check_prob(p, "p")
    q = check_prob(q, "q")
    return p * (1.0 - q) + (1.0 - p) * q


def binary_entropy(p, units=BITS):
    """Entropy of a Bernoulli(p) variable, in ``units``."""
    p = check_prob(p, "p")
    if p <= ZERO_MASS or 1.0 - p <= ZERO_MASS:
        return 0.0
    return _scale(units) * (-p * math.log(p) - (1.0 - p) * math.log(1.0 - p))


def inverse_binary_entropy(h):
    """The unique p in [0, 1/2] with ``binary_entropy(p) == h`` (bits).

    Bisection runs until the entropy residual drops to 1e-13 (the public
    tolerance is 1e-12). The residual rather than the interval width decides
    convergence because the slope of the entropy blows up near p = 0, where
    a narrow p-interval still allows a visible entropy error.
    """
    h = float(h)
    if math.isnan(h) or not 0.0 <= h <= 1.0:
        raise ParameterError(f"binary entropy must lie in [0, 1] bits, got {h!r}")
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        val = binary_entropy(mid)
        if abs(val - h) <= 1e-13:
            return mid
        if val < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _clipped(arr):
    low = float(arr.min()) if arr.size else 0.0
    if low < -SUM_TOL:
        raise ParameterError(f"negative probability mass {low!r}")
    return np.where(arr > 0.0, arr, 0.0)


def _entropy_nats(masses):
    a = np.asarray(masses, dtype=float).reshape(-1)
    a = a[a > ZERO_MASS]
    if a.size == 0:
        return 0.0
    return float(-(a * np.log(a)).sum())


class DiscreteDist:
    """A validated pmf over one finite alphabet."""

    __slots__ = ("masses",)

    def __init__(self, masses):
        arr = np.array(masses, dtype=float).reshape(-1)
        if arr.size == 0:
            raise ParameterError("a distribution needs at least one symbol")
        arr = _clipped(arr)
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ParameterError(
                f"masses sum to {total!r}; expected 1 within {SUM_TOL}")
        arr.flags.writeable = False
        self.masses = arr

    def __len__(self):
        return self.masses.size

    def __repr__(self):
        return f"DiscreteDist({self.masses.tolist()!r})"


class DiscreteJoint:
    """A dense joint pmf over (X, Y, Z), indexed ``masses[x, y, z]``.

    Two-axis arrays are accepted and promoted to a singleton Z axis, so pair
    sources and triple sources share one type.
    """

    __slots__ = ("masses",)

    def __init__(self, masses):
        arr = np.array(masses, dtype=float)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ParameterError(
                f"a joint must be 2-D or 3-D, got shape {arr.shape}")
        arr = _clipped(arr)
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ParameterError(
                f"masses sum to {total!r}; expected 1 within {SUM_TOL}")
        arr.flags.writeable = False
        self.masses = arr

    @property
    def dims(self):
        return self.masses.shape

    def marginal(self, axes):
        """Marginal mass array over ``axes``, axes kept in (x, y, z) order."""
        keep = _normalize_axes(axes)
        drop = tuple(i for i in range(3) if i not in keep)
        return self.masses.sum(axis=drop) if drop else self.masses

    def dist(self, axis):
        """One-axis marginal as a DiscreteDist."""
        return DiscreteDist(self.marginal(axis))

    def is_degraded(self, tol=DEGRADED_TOL):
        """True when p(z | x, y) = p(z | y) wherever p(x, y) > 0."""
        m = self.masses
        pxy = m.sum(axis=2)
        py = pxy.sum(axis=0)
        pzy = m.sum(axis=0)
        cond_y = np.divide(pzy, py[:, None],
                           out=np.zeros_like(pzy), where=py[:, None] > ZERO_MASS)
        cond_xy = np.divide(m, pxy[:, :, None],
                            out=np.zeros(m.shape), where=pxy[:, :, None] > ZERO_MASS)
        mask = pxy > ZERO_MASS
        if not mask.any():
            return True
        gap = np.abs(cond_xy - cond_y[None, :, :]).max(axis=2)
        return bool(gap[mask].max() <= tol)

    def __repr__(self):
        return f"DiscreteJoint(dims={self.dims})"


def _normalize_axes(axes):
    if isinstance(axes, str):
        bad = [c for c in axes if c not in _AXIS_BY_NAME]
        if bad:
            raise ParameterError(f"unknown axis letters {bad!r}; use x, y, z")
        idx = tuple(_AXIS_BY_NAME[c] for c in axes)
    elif isinstance(axes, (int, np.integer)):
        idx = (int(axes),)
    else:
        idx = tuple(int(a) for a in axes)
    if not idx:
        raise ParameterError("empty axis set")
    if any(a not in (0, 1, 2) for a in idx):
        raise ParameterError(f"axis indices must be 0, 1 or 2, got {idx!r}")
    if len(set(idx)) != len(idx):
        raise ParameterError(f"repeated axis in {axes!r}")
    return tuple(sorted(idx))


def _disjoint(*sets):
    seen = set()
    for s in sets:
        if seen & set(s):
            raise ParameterError("axis sets must be pairwise disjoint")
        seen |= set(s)


def entropy(d, units=BITS):
    """Shannon entropy of a distribution (DiscreteDist or mass array)."""
    if not isinstance(d, DiscreteDist):
        d = DiscreteDist(d)
    return _scale(units) * _entropy_nats(d.masses)


def min_entropy(d):
    """Min-entropy -log2 max_i p_i, in bits."""
    if not isinstance(d, DiscreteDist):
        d = DiscreteDist(d)
    return -math.log2(float(d.masses.max()))


def mutual_information(j, first, second, units=BITS):
    """I(first; second) on a DiscreteJoint, via H(A) + H(B) - H(AB)."""
    a = _normalize_axes(first)
    b = _normalize_axes(second)
    _disjoint(a, b)
    val = (_entropy_nats(j.marginal(a)) + _entropy_nats(j.marginal(b))
           - _entropy_nats(j.marginal(a + b)))
    return max(_scale(units) * val, 0.0)


def conditional_mutual_information(j, first, second, given, units=BITS):
    """I(first; second | given) via H(AC) + H(BC) - H(ABC) - H(C)."""
    a = _normalize_axes(first)
    b = _normalize_axes(second)
    c = _normalize_axes(given)
    _disjoint(a, b, c)
    val = (_entropy_nats(j.marginal(tuple(sorted(a + c))))
           + _entropy_nats(j.marginal(tuple(sorted(b + c))))
           - _entropy_nats(j.marginal(tuple(sorted(a + b + c))))
           - _entropy_nats(j.marginal(c)))
    return max(_scale(units) * val, 0.0)


def conditional_entropy(j, target, given, units=BITS):
    """H(target | given) via H(TG) - H(G)."""
    t = _normalize_axes(target)
    g = _normalize_axes(given)
    _disjoint(t, g)
    val = (_entropy_nats(j.marginal(tuple(sorted(t + g))))
           - _entropy_nats(j.marginal(g)))
    return max(_scale(units) * val, 0.0)


def gaussian_mi(rho):
    """Mutual information of a bivariate normal with correlation rho, nats."""
    r = float(rho)
    if math.isnan(r) or not abs(r) < 1.0:
        raise ParameterError(f"correlation must satisfy |rho| < 1, got {rho!r}")
    return -0.5 * math.log1p(-r * r)


def joint_from_cascade(p_x, p_y_given_x, p_z_given_y=None):
    """Joint p(x) p(y|x) p(z|y) of a Markov cascade X -> Y -> Z.

    Channel arrays are row-stochastic with rows indexed by the input symbol.
    With ``p_z_given_y`` omitted the result keeps a singleton Z axis. The
    construction is degraded by definition, which makes it the standard way
    to build sources for the closed-form capacity paths.
    """
    px = np.asarray(p_x, dtype=float).reshape(-1)
    ch1 = np.asarray(p_y_given_x, dtype=float)
    if ch1.ndim != 2 or ch1.shape[0] != px.size:
        raise ParameterError(
            f"channel X->Y must be ({px.size}, |Y|), got shape {ch1.shape}")
    pxy = px[:, None] * ch1
    if p_z_given_y is None:
        return DiscreteJoint(pxy)
    ch2 = np.asarray(p_z_given_y, dtype=float)
    if ch2.ndim != 2 or ch2.shape[0] != ch1.shape[1]:
        raise ParameterError(
            f"channel Y->Z must be ({ch1.shape[1]}, |Z|), got shape {ch2.shape}")
    return DiscreteJoint(pxy[:, :, None] * ch2[None, :, :])
