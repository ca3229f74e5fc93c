"""Desk-scale Monte-Carlo simulation of sequential key distillation.

One experiment = a fixed random code, then independent trials of:
i.i.d. source sampling, two-message Wyner-Ziv style reconciliation
(typicality encoding into a doubly indexed codebook, bin index exchanged,
conditional covering of the V layer), and privacy amplification of the
reconciled sequence pair through the GF(2^N) multiplication hash. The
empirical outputs are the reliability, leakage, and uniformity metrics.

The reconciliation steps follow the random-coding protocol literally,
lowest-index tie-breaks and the (1,1) fallback included. Two consequences
at n <= 14 are worth knowing before reading any numbers:

* Robust typicality is brutally quantized at these block lengths: a cell
  with mass 0.05 admits no valid count at all below n = 18, so the decoder
  falls back to index 1 almost always. Reliability then hinges on the
  encoder's bin position, not on channel noise. The "ml" decoder flag
  (maximum conditional likelihood within the bin) restores the asymptotic
  intuition that more rate slack buys more reliability.
* Exact leakage conditioning is exponentially large, so the eavesdropper
  view is coarsened to (her decoded key, the type of z^N). She decodes by
  running Bob's procedure on z. The plug-in MI estimate carries a bias
  that is measured by shuffling the key column against the views; both
  numbers are reported.

Discrete-side conventions: rates and information quantities in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from seqkey.errors import InfeasibleError, ParameterError
from seqkey.gf2n import POLY_TAPS, gf_mul
from seqkey.measures import DiscreteJoint
from seqkey.optimizer import TestChannel, rate_constraint

LOG_ZERO = -1e18          # finite stand-in for log 0 in ML scores
MAX_U_CODEWORDS = 1 << 22  # exhaustive encoder scan budget
MAX_V_CODEWORDS = 1 << 16  # per-bin V codebook budget
SHUFFLE_ROUNDS = 32
_COUNT_FUZZ = 1e-9         # absorbs float error at integer window edges


def _stream(seed, *ids):
    """Counter-based generator keyed by (seed, stream path)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(ids))
    return np.random.Generator(np.random.Philox(ss))


def _h_bits(p, axis=None):
    p = np.asarray(p, dtype=float)
    safe = np.where(p > 0.0, p, 1.0)
    return float(-np.sum(np.where(p > 0.0, p * np.log2(safe), 0.0),
                         axis=axis))


def _bits_per_symbol(size):
    return 0 if size <= 1 else (size - 1).bit_length()


@dataclass(frozen=True)
class Rates:
    """Code-construction rates in bits per symbol.

    eps1 is carried for completeness: the construction defines it next to
    eps2 but only eps (U layer) and eps2 (V layer) parameterize the
    typicality tests; eps1 lives in the surrounding analysis.
    """

    r_u: float
    r_u_prime: float
    r_v: float
    r_v_prime: float
    eps: float
    eps1: float
    eps2: float


def design_rates(j, tc_u, v_given_yu=None, epsilon=0.15):
    """R_u = I(X;U|Y) + 6 eps H(U) and companions, all in bits."""
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must be in (0, 1), got {epsilon!r}")
    eps2 = 2.0 * epsilon
    p_x = j.marginal((0,))
    p_xy = j.marginal((0, 1))
    p_u = p_x @ tc_u.rows
    h_u = _h_bits(p_u)
    p_yu = np.einsum("ab,au->bu", p_xy, tc_u.rows)
    i_yu = _h_bits(p_yu.sum(axis=1)) + h_u - _h_bits(p_yu)
    r_u = rate_constraint(j, tc_u) + 6.0 * epsilon * h_u
    r_u_prime = i_yu - 3.0 * epsilon * h_u
    if v_given_yu is None:
        r_v = r_v_prime = 0.0
    else:
        # designed joint over (x, y, u, v)
        p4 = np.einsum("ab,au,buv->abuv", p_xy, tc_u.rows, v_given_yu)
        h = _h_bits
        i_v_y_xu = (h(p4.sum(axis=1)) + h(p4.sum(axis=3))
                    - h(p4.sum(axis=(1, 3))) - h(p4))
        p_uv = p4.sum(axis=(0, 1))
        i_v_x_u = (h(p4.sum(axis=(1, 3))) + h(p_uv)
                   - h(p_uv.sum(axis=1)) - h(p4.sum(axis=1)))
        h_v_u = h(p_uv) - h(p_uv.sum(axis=1))
        r_v = i_v_y_xu + 6.0 * eps2 * h_v_u
        r_v_prime = i_v_x_u - 3.0 * eps2 * h_v_u
    return Rates(r_u=r_u, r_u_prime=r_u_prime, r_v=r_v,
                 r_v_prime=r_v_prime, eps=epsilon, eps1=0.5 * epsilon,
                 eps2=eps2)


def _size(rate_bits, n):
    return max(1, math.ceil(2.0 ** (n * max(rate_bits, 0.0))))


def _typical_mask(codes, pmf_flat, eps, n):
    """Row mask of robust typicality: |N(c)/n - p(c)| <= eps p(c) per cell.

    codes is (W, n) of flattened cell indices; zero-mass cells must not
    occur at all.
    """
    ok = np.ones(codes.shape[0], dtype=bool)
    for c, p in enumerate(pmf_flat):
        cnt = (codes == c).sum(axis=1)
        if p <= 0.0:
            ok &= cnt == 0
        else:
            ok &= (cnt >= n * p * (1.0 - eps) - _COUNT_FUZZ) \
                & (cnt <= n * p * (1.0 + eps) + _COUNT_FUZZ)
    return ok


def _log_table(p):
    return np.where(p > 0.0, np.log(np.where(p > 0.0, p, 1.0)), LOG_ZERO)


@dataclass(frozen=True)
class ReconCode:
    """Fixed random code for one experiment.

    The U codebook is materialized (row r = pair (omega, nu) with
    r = omega * w_nu + nu, so row order is the lexicographic pair order).
    V codebooks are per-(omega, nu) and are regenerated on demand from
    their own stream key, which keeps them fixed across trials without
    materializing all of them.
    """

    n: int
    seed: int
    rates: Rates
    w_u: int
    w_nu: int
    w_k: int
    w_l: int
    tc_rows: np.ndarray
    v_given_yu: np.ndarray          # (ny, nu, nv); nv = 1 means no V layer
    u_codebook: np.ndarray          # (w_u * w_nu, n) symbols of U
    pmf_xu: np.ndarray              # flat typicality references
    pmf_yu: np.ndarray
    pmf_uyv: np.ndarray
    pmf_xuv: np.ndarray
    ll_y_given_u: np.ndarray        # (ny, nu) nat-log ML tables
    ll_v_given_uy: np.ndarray       # (nu, ny, nv)
    ll_v_given_xu: np.ndarray       # (nx, nu, nv)
    p_v_cum_by_u: np.ndarray        # (nu, nv) cumulative p_{V|U}

    @property
    def nu_size(self):
        return self.tc_rows.shape[1]

    @property
    def nv_size(self):
        return self.v_given_yu.shape[2]

    @classmethod
    def generate(cls, j, tc_u, n, epsilon, seed, v_given_yu=None,
                 rates=None):
        if not isinstance(n, int) or not 2 <= n <= 14:
            raise ParameterError(
                f"block length must be an integer in [2, 14], got {n!r}")
        nx, ny, _ = j.dims
        if tc_u.rows.shape[0] != nx:
            raise ParameterError(
                f"test channel has {tc_u.rows.shape[0]} rows for an "
                f"alphabet of {nx}")
        nu = tc_u.u_size
        if v_given_yu is None:
            v_given_yu = np.ones((ny, nu, 1))
        else:
            v_given_yu = np.asarray(v_given_yu, dtype=float)
            if v_given_yu.shape[:2] != (ny, nu):
                raise ParameterError(
                    f"v channel must be shaped ({ny}, {nu}, nv), got "
                    f"{v_given_yu.shape}")
            if np.any(v_given_yu < 0.0) or not np.allclose(
                    v_given_yu.sum(axis=2), 1.0, atol=1e-12):
                raise ParameterError("v channel rows must be pmfs")
        if rates is None:
            v_arg = None if v_given_yu.shape[2] == 1 else v_given_yu
            rates = design_rates(j, tc_u, v_arg, epsilon)
        nv = v_given_yu.shape[2]

        w_u, w_nu = _size(rates.r_u, n), _size(rates.r_u_prime, n)
        w_k, w_l = _size(rates.r_v, n), _size(rates.r_v_prime, n)
        if w_u * w_nu > MAX_U_CODEWORDS:
            raise InfeasibleError(
                f"U codebook of {w_u} x {w_nu} codewords exceeds the "
                f"exhaustive-scan budget 2^22; lower n or the rates")
        if w_k * w_l > MAX_V_CODEWORDS:
            raise InfeasibleError(
                f"V codebook of {w_k} x {w_l} codewords per bin exceeds "
                "2^16; lower n or the rates")

        p_x = j.marginal((0,))
        p_xy = j.marginal((0, 1))
        p_xu = p_x[:, None] * tc_u.rows
        p_u = p_xu.sum(axis=0)
        p_yu = np.einsum("ab,au->bu", p_xy, tc_u.rows)
        p_uyv = p_yu.T[:, :, None] * v_given_yu.transpose(1, 0, 2)
        p_xuv = np.einsum("ab,au,buv->auv", p_xy, tc_u.rows, v_given_yu)

        with np.errstate(divide="ignore", invalid="ignore"):
            cond_y_u = np.where(p_u[None, :] > 0.0,
                                p_yu / np.where(p_u > 0.0, p_u, 1.0), 0.0)
            p_v_by_u = p_uyv.sum(axis=1)
            row = p_v_by_u.sum(axis=1, keepdims=True)
            p_v_by_u = np.where(row > 0.0, p_v_by_u / np.where(
                row > 0.0, row, 1.0), 1.0 / nv)
            cond_v_uy = np.where(
                p_uyv.sum(axis=2, keepdims=True) > 0.0,
                p_uyv / np.where(p_uyv.sum(axis=2, keepdims=True) > 0.0,
                                 p_uyv.sum(axis=2, keepdims=True), 1.0),
                1.0 / nv)
            p_xu_v = p_xuv.sum(axis=2, keepdims=True)
            cond_v_xu = np.where(p_xu_v > 0.0,
                                 p_xuv / np.where(p_xu_v > 0.0, p_xu_v,
                                                  1.0), 1.0 / nv)

        u_codebook = _stream(seed, 0).choice(
            nu, size=(w_u * w_nu, n), p=p_u).astype(np.uint8)

        return cls(
            n=n, seed=int(seed), rates=rates, w_u=w_u, w_nu=w_nu, w_k=w_k,
            w_l=w_l, tc_rows=tc_u.rows, v_given_yu=v_given_yu,
            u_codebook=u_codebook,
            pmf_xu=p_xu.ravel(), pmf_yu=p_yu.ravel(),
            pmf_uyv=p_uyv.ravel(), pmf_xuv=p_xuv.ravel(),
            ll_y_given_u=_log_table(cond_y_u),
            ll_v_given_uy=_log_table(cond_v_uy),
            ll_v_given_xu=_log_table(cond_v_xu),
            p_v_cum_by_u=np.cumsum(p_v_by_u, axis=1),
        )

    def v_codebook(self, omega_idx, nu_idx):
        """(w_k * w_l, n) V codewords of bin (omega, nu), symbols drawn
        conditionally on that bin's U codeword."""
        u_row = self.u_codebook[omega_idx * self.w_nu + nu_idx]
        rng = _stream(self.seed, 2, omega_idx, nu_idx)
        r = rng.random((self.w_k * self.w_l, self.n))
        out = np.empty_like(r, dtype=np.uint8)
        for i in range(self.n):
            out[:, i] = np.searchsorted(self.p_v_cum_by_u[u_row[i]],
                                        r[:, i], side="right")
        return np.minimum(out, self.nv_size - 1)


@dataclass(frozen=True)
class ReconcileResult:
    s_u: np.ndarray      # Alice's U-layer sequence (the key material)
    s_v: np.ndarray      # Alice's recovered V layer
    shat_u: np.ndarray   # Bob's U-layer estimate
    shat_v: np.ndarray   # Bob's own V layer
    a_msg: int           # bin index omega, 1-based
    b_msg: int           # V bin index k, 1-based
    alice_found: bool
    bob_found: bool

    @property
    def agree(self):
        return (np.array_equal(self.s_u, self.shat_u)
                and np.array_equal(self.s_v, self.shat_v))


def _encode_alice(x, code):
    nu = code.nu_size
    codes = x.astype(np.int16)[None, :] * nu + code.u_codebook
    mask = _typical_mask(codes, code.pmf_xu, code.rates.eps, code.n)
    if mask.any():
        flat = int(np.argmax(mask))
        return flat // code.w_nu, flat % code.w_nu, True
    return 0, 0, False


def _decode_bob(y, omega_idx, code, decoder):
    """Bob's side given the public bin index: pick nu within the bin, then
    cover (u, y) with a V codeword. Also the eavesdropper's procedure when
    run on z."""
    nu = code.nu_size
    lo = omega_idx * code.w_nu
    cand = code.u_codebook[lo:lo + code.w_nu]
    found = False
    if decoder == "typicality":
        codes = y.astype(np.int16)[None, :] * nu + cand
        mask = _typical_mask(codes, code.pmf_yu, code.rates.eps, code.n)
        nu_idx = int(np.argmax(mask)) if mask.any() else 0
        found = bool(mask.any())
    else:
        scores = code.ll_y_given_u[y[None, :], cand].sum(axis=1)
        nu_idx = int(np.argmax(scores))
        found = True
    shat_u = cand[nu_idx]

    vcands = code.v_codebook(omega_idx, nu_idx)
    ny, nv = code.v_given_yu.shape[0], code.nv_size
    if decoder == "typicality":
        codes = (shat_u.astype(np.int32)[None, :] * ny
                 + y.astype(np.int32)[None, :]) * nv + vcands
        mask = _typical_mask(codes, code.pmf_uyv, code.rates.eps2, code.n)
        flat = int(np.argmax(mask)) if mask.any() else 0
    else:
        scores = code.ll_v_given_uy[shat_u, y][
            np.arange(code.n)[None, :], vcands].sum(axis=1)
        flat = int(np.argmax(scores))
    k_idx, l_idx = flat // code.w_l, flat % code.w_l
    return shat_u, nu_idx, k_idx, vcands[flat], found


def _recover_alice(x, s_u, omega_idx, nu_idx, k_idx, code, decoder):
    lo = k_idx * code.w_l
    acands = code.v_codebook(omega_idx, nu_idx)[lo:lo + code.w_l]
    nu, nv = code.nu_size, code.nv_size
    if decoder == "typicality":
        codes = (x.astype(np.int32)[None, :] * nu
                 + s_u.astype(np.int32)[None, :]) * nv + acands
        mask = _typical_mask(codes, code.pmf_xuv, code.rates.eps2, code.n)
        l_idx = int(np.argmax(mask)) if mask.any() else 0
    else:
        scores = code.ll_v_given_xu[x, s_u][
            np.arange(code.n)[None, :], acands].sum(axis=1)
        l_idx = int(np.argmax(scores))
    return acands[l_idx]


def reconcile(x, y, code, decoder="typicality"):
    """One block of the two-message protocol; see the module docstring.

    Alice encodes x into the lowest typical (omega, nu) pair, falling back
    to (1, 1), and publishes omega. Bob picks the lowest admissible nu in
    the bin, covers (u, y) with a V codeword, and publishes its k index.
    Alice then recovers her own V estimate inside (her nu, his k).
    """
    if decoder not in ("typicality", "ml"):
        raise ParameterError(
            f"decoder must be 'typicality' or 'ml', got {decoder!r}")
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != (code.n,) or y.shape != (code.n,):
        raise ParameterError(
            f"x and y must be length-{code.n} sequences")
    omega_idx, nu_idx, alice_found = _encode_alice(x, code)
    s_u = code.u_codebook[omega_idx * code.w_nu + nu_idx]
    shat_u, _, k_idx, shat_v, bob_found = _decode_bob(
        y, omega_idx, code, decoder)
    s_v = _recover_alice(x, s_u, omega_idx, nu_idx, k_idx, code, decoder)
    return ReconcileResult(
        s_u=s_u, s_v=s_v, shat_u=shat_u, shat_v=shat_v,
        a_msg=omega_idx + 1, b_msg=k_idx + 1,
        alice_found=alice_found, bob_found=bob_found)


def sample_source(j, n, seed):
    """n i.i.d. draws from the joint; returns (x^n, y^n, z^n)."""
    if not isinstance(n, int) or n < 1:
        raise ParameterError(f"sample count must be a positive int, got "
                             f"{n!r}")
    rng = seed if isinstance(seed, np.random.Generator) else _stream(seed)
    flat = j.masses.ravel()
    cum = np.cumsum(flat)
    cum[-1] = 1.0
    idx = np.searchsorted(cum, rng.random(n), side="right")
    x, y, z = np.unravel_index(idx, j.dims)
    return x.astype(np.uint8), y.astype(np.uint8), z.astype(np.uint8)


def _bits_to_int(bits):
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def privacy_amplify(s_bits, hash_seed, k):
    """First k bits of the GF(2^N) product of s with the public seed.

    Both inputs are bit sequences of equal length N (MSB first); N must
    have a field table entry (8..64).
    """
    s_bits = np.asarray(s_bits)
    hash_seed = np.asarray(hash_seed)
    n_bits = s_bits.size
    if hash_seed.size != n_bits:
        raise ParameterError(
            f"hash seed has {hash_seed.size} bits, input has {n_bits}")
    if n_bits not in POLY_TAPS:
        raise ParameterError(
            f"input length must be in [8, 64] bits, got {n_bits}")
    if not isinstance(k, int) or not 1 <= k <= n_bits:
        raise ParameterError(
            f"key length must be an int in [1, {n_bits}], got {k!r}")
    for name, arr in (("s", s_bits), ("hash seed", hash_seed)):
        if np.any((arr != 0) & (arr != 1)):
            raise ParameterError(f"{name} must contain only bits")
    prod = gf_mul(_bits_to_int(s_bits), _bits_to_int(hash_seed), n_bits)
    return np.array([(prod >> (n_bits - 1 - i)) & 1 for i in range(k)],
                    dtype=np.uint8)


@dataclass(frozen=True)
class ProtocolParams:
    """One experiment's knobs. rates = None means the designed defaults."""

    n: int
    m: int
    k: int
    epsilon: float
    trials: int
    seed: int
    decoder: str = "typicality"
    rates: Rates = None

    def __post_init__(self):
        if not isinstance(self.n, int) or not 2 <= self.n <= 14:
            raise ParameterError(
                f"block length must be an int in [2, 14], got {self.n!r}")
        if not isinstance(self.m, int) or self.m < 1:
            raise ParameterError(
                f"block count must be a positive int, got {self.m!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise ParameterError(
                f"key length must be a positive int, got {self.k!r}")
        if self.k > self.n * self.m:
            raise ParameterError(
                f"key length {self.k} exceeds the n*m = "
                f"{self.n * self.m} source budget")
        if not 0.0 < self.epsilon < 1.0:
            raise ParameterError(
                f"epsilon must be in (0, 1), got {self.epsilon!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ParameterError(
                f"trials must be a positive int, got {self.trials!r}")
        if self.decoder not in ("typicality", "ml"):
            raise ParameterError(
                f"decoder must be 'typicality' or 'ml', got "
                f"{self.decoder!r}")


@dataclass(frozen=True)
class RunMetrics:
    """Empirical reliability/secrecy metrics of one experiment."""

    p_e: float            # fraction of trials with key disagreement
    leakage_est: float    # plug-in MI of key vs eavesdropper view, bits
    leakage_bias: float   # shuffle-null mean of the same estimator
    leakage_null_sd: float
    uniformity_est: float  # k - plug-in key entropy, bits
    trials: int
    n_bits: int           # hash input length N
    alice_encode_rate: float
    bob_decode_rate: float
    eve_match_rate: float  # fraction of trials where Eve's key guess hit


def _plugin_mi_bits(pairs, trials):
    joint = {}
    left = {}
    right = {}
    for a, b in pairs:
        joint[(a, b)] = joint.get((a, b), 0) + 1
        left[a] = left.get(a, 0) + 1
        right[b] = right.get(b, 0) + 1
    mi = 0.0
    for (a, b), c in joint.items():
        mi += (c / trials) * math.log2(
            c * trials / (left[a] * right[b]))
    return mi


def leakage_estimate(keys, views, rng, shuffles=SHUFFLE_ROUNDS):
    """Plug-in MI between keys and views plus its shuffle-null statistics.

    Returns (mi, null_mean, null_sd). The null repeatedly permutes the key
    column against the views, which measures the estimator's finite-sample
    bias on exactly this view layout; mi landing inside the null band means
    no detectable leakage.
    """
    trials = len(keys)
    if trials != len(views) or trials == 0:
        raise ParameterError("keys and views must be equal-length and "
                             "non-empty")
    mi = _plugin_mi_bits(list(zip(keys, views)), trials)
    nulls = []
    for _ in range(shuffles):
        perm = rng.permutation(trials)
        nulls.append(_plugin_mi_bits(
            [(keys[p], views[i]) for i, p in enumerate(perm)], trials))
    nulls = np.asarray(nulls)
    return mi, float(nulls.mean()), float(nulls.std())


def run_experiment(j, tc_u, params, v_given_yu=None):
    """End-to-end experiment; deterministic in (params.seed, params)."""
    code = ReconCode.generate(
        j, tc_u, n=params.n, epsilon=params.epsilon, seed=params.seed,
        v_given_yu=v_given_yu, rates=params.rates)
    bits_u = _bits_per_symbol(code.nu_size)
    bits_v = _bits_per_symbol(code.nv_size)
    n_bits = params.m * params.n * (bits_u + bits_v)
    if n_bits not in POLY_TAPS:
        raise InfeasibleError(
            f"hash input of {n_bits} bits has no field table entry; "
            "choose n, m so that m*n*(symbol bits) lands in [8, 64]")
    if params.k > n_bits:
        raise ParameterError(
            f"key length {params.k} exceeds the {n_bits}-bit hash input")

    def serialize(u_seqs, v_seqs):
        chunks = []
        for u_s, v_s in zip(u_seqs, v_seqs):
            if bits_u:
                shifts = np.arange(bits_u - 1, -1, -1)
                chunks.append(((u_s[:, None] >> shifts) & 1).ravel())
            if bits_v:
                shifts = np.arange(bits_v - 1, -1, -1)
                chunks.append(((v_s[:, None] >> shifts) & 1).ravel())
        return np.concatenate(chunks).astype(np.uint8)

    nz = j.dims[2]
    ny = j.dims[1]
    errors = 0
    encode_hits = 0
    decode_hits = 0
    eve_hits = 0
    key_counts = {}
    views = []
    keys_seen = []
    for t in range(params.trials):
        src = _stream(params.seed, 1, t)
        xs, ys, zs = sample_source(j, params.n * params.m, src)
        xs = xs.reshape(params.m, params.n)
        ys = ys.reshape(params.m, params.n)
        zs = zs.reshape(params.m, params.n)
        s_u, s_v, sh_u, sh_v = [], [], [], []
        eve_u, eve_v = [], []
        for blk in range(params.m):
            res = reconcile(xs[blk], ys[blk], code, params.decoder)
            s_u.append(res.s_u)
            s_v.append(res.s_v)
            sh_u.append(res.shat_u)
            sh_v.append(res.shat_v)
            encode_hits += res.alice_found
            decode_hits += res.bob_found
            if nz == ny:
                e_u, _, _, e_v, _ = _decode_bob(
                    zs[blk], res.a_msg - 1, code, params.decoder)
                eve_u.append(e_u)
                eve_v.append(e_v)
        hs = _stream(params.seed, 3, t).integers(
            0, 2, n_bits).astype(np.uint8)
        key = privacy_amplify(serialize(s_u, s_v), hs, params.k)
        key_hat = privacy_amplify(serialize(sh_u, sh_v), hs, params.k)
        errors += not np.array_equal(key, key_hat)
        key_int = _bits_to_int(key)
        if nz == ny:
            eve_key = _bits_to_int(
                privacy_amplify(serialize(eve_u, eve_v), hs, params.k))
        else:
            eve_key = 0
        eve_hits += eve_key == key_int
        z_type = tuple(int((zs == c).sum()) for c in range(nz))
        keys_seen.append(key_int)
        key_counts[key_int] = key_counts.get(key_int, 0) + 1
        views.append((eve_key, z_type))

    trials = params.trials
    h_key = 0.0
    for c in key_counts.values():
        h_key -= (c / trials) * math.log2(c / trials)
    leakage, null_mean, null_sd = leakage_estimate(
        keys_seen, views, _stream(params.seed, 4))
    blocks = trials * params.m
    return RunMetrics(
        p_e=errors / trials,
        leakage_est=leakage,
        leakage_bias=null_mean,
        leakage_null_sd=null_sd,
        uniformity_est=params.k - h_key,
        trials=trials,
        n_bits=n_bits,
        alice_encode_rate=encode_hits / blocks,
        bob_decode_rate=decode_hits / blocks,
        eve_match_rate=eve_hits / trials,
    )
