"""Finite-blocklength simulation of the cover-and-bin secrecy scheme.

The encoder describes the source block in two parts:

* a *cover index* naming a codeword ``u^n`` (drawn i.i.d. from the
  auxiliary marginal) that is jointly typical with ``x^n``;
* a *bin index* of ``x^n``, padded with the secret key by modular addition.

Two binnings are offered.  ``hash`` gives every block a keyed-hash bin, a
plain random binning.  ``index`` (the default) numbers the blocks typical
with the chosen codeword in a keyed pseudo-random order and sends that
number; it is a random binning that never collides inside one codeword's
typical set, which matters a great deal at short block lengths.

Two encoders are offered.  ``likelihood`` (the default) draws the codeword
with probability proportional to ``p(x^n | u^n)``; ``typical`` takes the
lowest-index jointly typical codeword.  With ``avoid_collisions`` either one
prefers codewords under which the block can be decoded.

The legitimate decoder removes the pad and searches the bin among the
sequences typical with the named codeword.  The eavesdropper sees both
indices but not the key, so the padded bin is useless to it; what is left
is the codeword, which it answers letter by letter with the best response
to ``p(x|u)``.  An exact Bayesian causal eavesdropper is available for
short blocks.

Typicality is strong (Csiszar-Korner) typicality: the joint type lies
within ``delta`` of ``p(u, x)`` in every cell and pairs of probability zero
never occur.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .adversary import TIE_TOL, best_response, best_response_rows
from .core import ProblemInstance, ValidationError, entropy
from .oracle import AuxChannel, evaluate_channel

_CHUNK = 1024
MAX_MESSAGE_BITS = 30
MAX_COVER_BITS = 20
MAX_TYPICAL_SET = 1 << 22
MAX_EXACT_N = 12
MAX_EXACT_SEQUENCES = 1 << 20
DEFAULT_EPS = 0.15
DEFAULT_DELTA = 0.5
BINNINGS = ("hash", "index")
ENCODERS = ("typical", "likelihood")


class SizeGuardError(ValidationError):
    """Requested block is too large to simulate at desk scale."""


@dataclass(frozen=True)
class SchemeConfig:
    instance: ProblemInstance
    channel: AuxChannel
    n: int
    eps: float = DEFAULT_EPS
    seed: int = 0
    delta: float = DEFAULT_DELTA
    binning: str = "index"
    encoder: str = "likelihood"
    avoid_collisions: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("block length n must be at least 1")
        if not self.eps > 0:
            raise ValidationError("rate slack eps must be positive")
        if not self.delta > 0:
            raise ValidationError("typicality delta must be positive")
        if self.binning not in BINNINGS:
            raise ValidationError(f"binning must be one of {BINNINGS}")
        if self.encoder not in ENCODERS:
            raise ValidationError(f"encoder must be one of {ENCODERS}")
        if self.channel.cond.shape[1] != len(self.instance.source):
            raise ValidationError("channel input size does not match the source alphabet")


@dataclass(frozen=True)
class Key:
    omega: int


@dataclass(frozen=True)
class Message:
    cover_index: int
    padded_bin: int
    covered: bool = True


@dataclass
class SimReport:
    trials: int
    n: int
    decode_error_rate: float
    coverage_failure_rate: float
    per_letter_distortion: float
    pad_mutual_information: float
    rates_used: dict
    theory: dict
    exact_causal_distortion: float | None = None
    per_letter_conditional_distortion: float | None = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _joint_target(config: SchemeConfig) -> np.ndarray:
    return config.channel.joint(config.instance.source.probs)


def scheme_rates(config: SchemeConfig) -> tuple[float, float, int, int]:
    """Cover rate, bin (key) rate and their rounded bit counts."""
    joint = _joint_target(config)
    pu = joint.sum(axis=1)
    h_x = entropy(config.instance.source)
    h_joint = entropy(joint.ravel())
    h_u = entropy(pu)
    h_x_given_u = max(h_joint - h_u, 0.0)
    mutual = max(h_x - h_x_given_u, 0.0)
    r1 = mutual + config.eps
    r2 = h_x_given_u + config.eps
    return r1, r2, math.ceil(config.n * r1 - 1e-12), math.ceil(config.n * r2 - 1e-12)


@dataclass
class _TypicalSet:
    codes: np.ndarray          # sorted integer codes of typical x^n
    seqs: np.ndarray           # (L, n)
    bins: np.ndarray           # bin of each sequence
    unique_bins: np.ndarray    # sorted bins holding exactly one typical sequence
    by_bin: dict


class SchemeInstance:
    """A realized code: codebook, keyed bin map and the typicality rule."""

    def __init__(self, config: SchemeConfig):
        self.config = config
        self.r1, self.r2, self.cover_bits, self.bin_bits = scheme_rates(config)
        if self.cover_bits + self.bin_bits > MAX_MESSAGE_BITS:
            raise SizeGuardError(
                f"message needs {self.cover_bits + self.bin_bits} bits; limit is {MAX_MESSAGE_BITS}"
            )
        if self.cover_bits > MAX_COVER_BITS:
            raise SizeGuardError(f"codebook of 2^{self.cover_bits} sequences is too large")
        self.n_cover = 1 << self.cover_bits
        self.n_bins = 1 << self.bin_bits
        self.nx = len(config.instance.source)
        if self.nx ** config.n >= 2**62:
            raise SizeGuardError("source blocks do not fit in a 64-bit index")

        self.joint = _joint_target(config)
        self.pu = self.joint.sum(axis=1)
        seq = np.random.SeedSequence([config.seed & 0xFFFFFFFFFFFFFFFF, 0x5EC])
        cb_seed, hash_seed = seq.spawn(2)
        rng = np.random.default_rng(cb_seed)
        self.codebook = rng.choice(self.pu.size, size=(self.n_cover, config.n), p=self.pu / self.pu.sum())
        self.hash_key = hash_seed.generate_state(4, dtype=np.uint64).tobytes()

        n = config.n
        self.upper = np.floor(n * (self.joint + config.delta) + 1e-9)
        self.lower = np.ceil(n * (self.joint - config.delta) - 1e-9)
        self.forbidden = self.joint <= 0
        self.weights = self.nx ** np.arange(n - 1, -1, -1, dtype=np.int64)
        self._typical: dict[int, _TypicalSet] = {}
        self._cb_onehot = np.eye(self.pu.size)[self.codebook]  # (M1, n, U)

    # ------------------------------------------------------------------
    # sequences and hashing

    def code_of(self, seqs: np.ndarray) -> np.ndarray:
        return np.asarray(seqs, dtype=np.int64) @ self.weights

    def _hash64(self, codes) -> list[int]:
        out = []
        for code in np.asarray(codes, dtype=np.int64).tolist():
            h = hashlib.blake2b(code.to_bytes(8, "little"), key=self.hash_key, digest_size=8)
            out.append(int.from_bytes(h.digest(), "little"))
        return out

    def hash_bins(self, codes) -> np.ndarray:
        return np.array([h % self.n_bins for h in self._hash64(codes)], dtype=np.int64)

    def bin_map(self, x_n) -> int:
        """Bin of a source block under the keyed hash."""
        return int(self.hash_bins([self.code_of(np.asarray(x_n))])[0])

    # ------------------------------------------------------------------
    # typicality

    def joint_counts(self, xs: np.ndarray) -> np.ndarray:
        """Joint counts ``N[k, c, u, x]`` of blocks ``xs[k]`` against every codeword."""
        x_onehot = np.eye(self.nx)[np.asarray(xs)]  # (K, n, X)
        return np.einsum("cnu,knx->kcux", self._cb_onehot, x_onehot, optimize=True)

    def distances(self, xs: np.ndarray) -> np.ndarray:
        """L-inf distance of joint types to the target; inf when a forbidden pair occurs."""
        counts = self.joint_counts(xs)
        dist = np.abs(counts / self.config.n - self.joint).max(axis=(2, 3))
        bad = (counts > 0) & self.forbidden
        return np.where(bad.any(axis=(2, 3)), np.inf, dist)

    def _is_typical(self, dist: np.ndarray) -> np.ndarray:
        return dist <= self.config.delta + 1e-12

    def typical_set(self, c: int) -> _TypicalSet:
        """All source blocks jointly typical with codeword ``c`` (cached)."""
        if c in self._typical:
            return self._typical[c]
        u_seq = self.codebook[c]
        n = self.config.n
        U, X = self.joint.shape
        remaining = np.array([[np.sum(u_seq[i:] == u) for u in range(U)] for i in range(n + 1)])
        need = np.clip(self.lower, 0, None)
        seqs = np.zeros((1, 0), dtype=np.int64)
        counts = np.zeros((1, U, X))
        for i in range(n):
            u = u_seq[i]
            new_seqs, new_counts = [], []
            for x in range(X):
                if self.forbidden[u, x]:
                    continue
                cnt = counts.copy()
                cnt[:, u, x] += 1
                ok = cnt[:, u, x] <= self.upper[u, x]
                short = np.clip(need[u][None, :] - cnt[:, u, :], 0, None).sum(axis=1)
                ok &= short <= remaining[i + 1, u]
                if ok.any():
                    new_seqs.append(np.hstack([seqs[ok], np.full((int(ok.sum()), 1), x)]))
                    new_counts.append(cnt[ok])
            if not new_seqs:
                seqs = np.zeros((0, i + 1), dtype=np.int64)
                break
            seqs = np.vstack(new_seqs)
            counts = np.vstack(new_counts)
            if len(seqs) > MAX_TYPICAL_SET:
                raise SizeGuardError("typical set too large to enumerate")
        if len(seqs) and seqs.shape[1] == n:
            dist = np.abs(counts / n - self.joint).max(axis=(1, 2))
            seqs = seqs[self._is_typical(dist)]
        else:
            seqs = np.zeros((0, n), dtype=np.int64)
        codes = self.code_of(seqs) if len(seqs) else np.zeros(0, dtype=np.int64)
        order = np.argsort(codes)
        codes, seqs = codes[order], seqs[order]
        if self.config.binning == "hash":
            bins = self.hash_bins(codes)
        else:
            # rank in a keyed pseudo-random order; ranks past the index range are unusable
            order = sorted(range(len(codes)), key=self._hash64(codes).__getitem__)
            rank = np.empty(len(codes), dtype=np.int64)
            rank[order] = np.arange(len(codes))
            bins = np.where(rank < self.n_bins, rank, -1)
        by_bin: dict[int, list[int]] = {}
        for k, b in enumerate(bins.tolist()):
            if b >= 0:
                by_bin.setdefault(b, []).append(k)
        uniq = np.array(sorted(b for b, ks in by_bin.items() if len(ks) == 1), dtype=np.int64)
        ts = _TypicalSet(codes=codes, seqs=seqs, bins=bins, unique_bins=uniq, by_bin=by_bin)
        self._typical[c] = ts
        return ts

    def _decodable(self, c: int, codes: np.ndarray) -> np.ndarray:
        ts = self.typical_set(c)
        pos = np.searchsorted(ts.codes, codes)
        pos = np.clip(pos, 0, max(len(ts.codes) - 1, 0))
        if not len(ts.codes):
            return np.zeros(len(codes), dtype=bool)
        member = ts.codes[pos] == codes
        bins = ts.bins[pos]
        unique = np.isin(bins, ts.unique_bins) & (bins >= 0)
        return member & unique

    def log_likelihoods(self, counts: np.ndarray) -> np.ndarray:
        """log prod_i p(x_i | u_i) from joint counts; -inf on forbidden pairs."""
        with np.errstate(divide="ignore", invalid="ignore"):
            logpost = np.log(np.where(self.forbidden, 1.0, self.joint / self.pu[:, None]))
        ll = np.einsum("kcux,ux->kc", counts, logpost)
        bad = ((counts > 0) & self.forbidden).any(axis=(2, 3))
        return np.where(bad, -np.inf, ll)

    def encoder_distribution(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Probability of each cover index for each block, plus a coverage flag.

        ``typical``: the lowest-index jointly typical codeword under which
        the block is decodable, else the lowest-index typical one.
        ``likelihood``: codeword ``c`` with probability proportional to
        ``prod_i p(x_i | u_i(c))``, restricted to decodable codewords when
        any exist.  Uncovered blocks go to index 0.
        """
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        codes = self.code_of(xs)
        counts = self.joint_counts(xs)
        dist = np.abs(counts / self.config.n - self.joint).max(axis=(2, 3))
        dist = np.where(((counts > 0) & self.forbidden).any(axis=(2, 3)), np.inf, dist)
        typical = self._is_typical(dist)
        decodable = np.zeros_like(typical)
        for c in np.flatnonzero(typical.any(axis=0) if self.config.avoid_collisions else []):
            rows = np.flatnonzero(typical[:, c])
            decodable[rows, c] = self._decodable(int(c), codes[rows])

        if self.config.encoder == "typical":
            covered = typical.any(axis=1)
            score = np.where(decodable, 0, np.where(typical, 1, 2))
            pick = np.argmin(score, axis=1)  # argmin returns the lowest index on ties
            pick[~covered] = 0
            probs = np.zeros(typical.shape)
            probs[np.arange(len(xs)), pick] = 1.0
            return probs, covered

        ll = self.log_likelihoods(counts)
        covered = np.isfinite(ll).any(axis=1)
        top = np.where(covered, ll.max(axis=1, initial=-np.inf), 0.0)
        lik = np.exp(ll - top[:, None])
        restricted = lik * decodable
        use = restricted.sum(axis=1) > 0
        weights = np.where(use[:, None], restricted, lik)
        weights[~covered] = 0.0
        weights[~covered, 0] = 1.0
        return weights / weights.sum(axis=1, keepdims=True), covered

    def cover_indices(self, xs: np.ndarray, uniforms=None) -> tuple[np.ndarray, np.ndarray]:
        """Sample the encoder's cover index for each block.

        ``uniforms`` supplies the encoder's private randomness (one draw per
        block); it is ignored by the deterministic typicality encoder.
        """
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        cover = np.empty(len(xs), dtype=np.int64)
        covered = np.empty(len(xs), dtype=bool)
        if uniforms is None:
            uniforms = np.full(len(xs), 0.5)
        for s in range(0, len(xs), _CHUNK):
            probs, cov = self.encoder_distribution(xs[s:s + _CHUNK])
            cdf = np.cumsum(probs, axis=1)
            u = np.asarray(uniforms[s:s + _CHUNK])[:, None] * cdf[:, -1:]
            idx = (cdf <= u).sum(axis=1)
            # never land on a zero-probability codeword through rounding
            idx = np.minimum(idx, probs.shape[1] - 1)
            zero = probs[np.arange(len(idx)), idx] <= 0
            if zero.any():
                idx[zero] = np.argmax(probs[zero] > 0, axis=1)
            cover[s:s + _CHUNK] = idx
            covered[s:s + _CHUNK] = cov
        return cover, covered

    def block_bins(self, xs: np.ndarray, cover: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        codes = self.code_of(xs)
        if self.config.binning == "hash":
            return self.hash_bins(codes)
        out = np.zeros(len(codes), dtype=np.int64)
        for k, (code, c) in enumerate(zip(codes, cover)):
            ts = self.typical_set(int(c))
            pos = int(np.searchsorted(ts.codes, code))
            if pos < len(ts.codes) and ts.codes[pos] == code and ts.bins[pos] >= 0:
                out[k] = ts.bins[pos]
        return out

    # ------------------------------------------------------------------
    # eavesdropper view

    @cached_property
    def letter_responses(self) -> np.ndarray:
        """Best reconstruction for each auxiliary symbol (lowest index on ties)."""
        d = self.config.instance.distortion
        out = np.zeros(self.pu.size, dtype=np.int64)
        for u in range(self.pu.size):
            if self.pu[u] > 0:
                out[u] = best_response(self.joint[u] / self.pu[u], d).choice
        return out


def build_scheme(config: SchemeConfig) -> SchemeInstance:
    return SchemeInstance(config)


def encode(scheme: SchemeInstance, x_n, key: Key | int, rng: np.random.Generator | None = None) -> Message:
    """Cover index plus padded bin for one block.

    ``rng`` is the encoder's private randomness (likelihood encoder only);
    by default it is derived from the scheme seed and the block itself.
    """
    omega = key.omega if isinstance(key, Key) else int(key)
    x_n = np.asarray(x_n, dtype=np.int64)
    if x_n.shape != (scheme.config.n,) or x_n.min() < 0 or x_n.max() >= scheme.nx:
        raise ValidationError("source block has the wrong length or alphabet")
    if rng is None:
        rng = np.random.default_rng([scheme.config.seed & 0xFFFFFFFFFFFFFFFF, int(scheme.code_of(x_n)), 1])
    cover, covered = scheme.cover_indices(x_n[None, :], [rng.random()])
    b = int(scheme.block_bins(x_n[None, :], cover)[0])
    return Message(int(cover[0]), (b + omega) % scheme.n_bins, bool(covered[0]))


def decode(scheme: SchemeInstance, msg: Message, key: Key | int):
    """Recovered block, or ``None`` when zero or several candidates remain."""
    omega = key.omega if isinstance(key, Key) else int(key)
    b = (msg.padded_bin - omega) % scheme.n_bins
    ts = scheme.typical_set(msg.cover_index)
    ks = ts.by_bin.get(b, [])
    if len(ks) != 1:
        return None
    return ts.seqs[ks[0]].copy()


def eavesdrop_per_letter(scheme: SchemeInstance, msg: Message) -> np.ndarray:
    return scheme.letter_responses[scheme.codebook[msg.cover_index]]


class ExactCausalEavesdropper:
    """Bayes-optimal causal eavesdropper for short blocks.

    The pad makes the padded bin independent of the source, so the posterior
    of ``x^n`` given the message is proportional to the source law times the
    encoder's probability of emitting the observed cover index.
    """

    def __init__(self, scheme: SchemeInstance):
        n, X = scheme.config.n, scheme.nx
        if n > MAX_EXACT_N or X**n > MAX_EXACT_SEQUENCES:
            raise SizeGuardError(f"exact eavesdropper limited to n <= {MAX_EXACT_N} and {MAX_EXACT_SEQUENCES} blocks")
        self.scheme = scheme
        total = X**n
        all_x = (np.arange(total)[:, None] // scheme.weights[None, :]) % X
        p0 = scheme.config.instance.source.probs
        logw = np.log(np.where(p0 > 0, p0, 1.0))[all_x].sum(axis=1)
        zero = (p0[all_x] <= 0).any(axis=1)
        self.prior = np.where(zero, 0.0, np.exp(logw))
        if total * scheme.n_cover > MAX_EXACT_SEQUENCES * 64:
            raise SizeGuardError("codebook too large for the exact eavesdropper")
        # joint law of (block, cover index); the padded bin carries nothing
        self.mass = np.empty((total, scheme.n_cover))
        for s in range(0, total, _CHUNK):
            probs, _ = scheme.encoder_distribution(all_x[s:s + _CHUNK])
            self.mass[s:s + _CHUNK] = probs * self.prior[s:s + _CHUNK, None]
        self._cums: dict[int, np.ndarray] = {}

    def _cum(self, c: int) -> np.ndarray:
        if c not in self._cums:
            self._cums[c] = np.concatenate([[0.0], np.cumsum(self.mass[:, c])])
        return self._cums[c]

    def posteriors(self, msg: Message, x_n) -> np.ndarray:
        """Unnormalized mass of ``x_i = a`` given the message and ``x^{i-1}``, shape (n, X)."""
        s = self.scheme
        n, X = s.config.n, s.nx
        cum = self._cum(msg.cover_index)
        code = int(s.code_of(np.asarray(x_n)))
        out = np.zeros((n, X))
        for i in range(n):
            block = X ** (n - i - 1)
            prefix = code // (block * X)
            starts = (prefix * X + np.arange(X)) * block
            out[i] = cum[starts + block] - cum[starts]
        return out

    def next_estimate(self, msg: Message, x_prefix) -> int:
        x_prefix = list(x_prefix)
        i = len(x_prefix)
        s = self.scheme
        n, X = s.config.n, s.nx
        if i >= n:
            raise ValueError("prefix already covers the whole block")
        cum = self._cum(msg.cover_index)
        prefix = 0
        for a in x_prefix:
            prefix = prefix * X + int(a)
        block = X ** (n - i - 1)
        starts = (prefix * X + np.arange(X)) * block
        mass = cum[starts + block] - cum[starts]
        if mass.sum() <= 0:
            return int(s.letter_responses[s.codebook[msg.cover_index][i]])
        return best_response(mass / mass.sum(), s.config.instance.distortion).choice


def eavesdrop_exact_causal(scheme: SchemeInstance, msg: Message, x_prefix, eve: ExactCausalEavesdropper | None = None) -> int:
    eve = eve if eve is not None else ExactCausalEavesdropper(scheme)
    return eve.next_estimate(msg, x_prefix)


def _plugin_mi(a: np.ndarray, b: np.ndarray, groups: int) -> float:
    table = np.zeros((groups, groups))
    np.add.at(table, (a, b), 1.0)
    table /= table.sum()
    pa, pb = table.sum(axis=1), table.sum(axis=0)
    mask = table > 0
    return float(np.sum(table[mask] * np.log2(table[mask] / np.outer(pa, pb)[mask])))


def pad_mutual_information(bins: np.ndarray, padded: np.ndarray, n_bins: int, groups: int = 8) -> float:
    """Plug-in MI (bits) between bin and padded bin, each coarsened to ``groups`` cells.

    Coarsening keeps the estimator's small-sample bias well below the
    quantities of interest; independent variables stay independent under it.
    """
    groups = min(groups, n_bins)
    return _plugin_mi(bins * groups // n_bins, padded * groups // n_bins, groups)


def run_monte_carlo(config: SchemeConfig, trials: int, exact_causal: bool = False, scheme: SchemeInstance | None = None) -> SimReport:
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    scheme = scheme if scheme is not None else build_scheme(config)
    n, nx = config.n, scheme.nx
    p0 = config.instance.source.probs
    D = config.instance.distortion.values

    xs = np.empty((trials, n), dtype=np.int64)
    keys = np.empty(trials, dtype=np.int64)
    private = np.empty(trials)
    for t in range(trials):
        rng = np.random.default_rng([config.seed & 0xFFFFFFFFFFFFFFFF, t])
        xs[t] = rng.choice(nx, size=n, p=p0)
        keys[t] = rng.integers(scheme.n_bins)
        private[t] = rng.random()

    cover, covered = scheme.cover_indices(xs, private)
    bins = scheme.block_bins(xs, cover)
    padded = (bins + keys) % scheme.n_bins

    errors = 0
    for t in range(trials):
        x_hat = decode(scheme, Message(int(cover[t]), int(padded[t]), bool(covered[t])), int(keys[t]))
        if x_hat is None or not np.array_equal(x_hat, xs[t]):
            errors += 1

    z = scheme.letter_responses[scheme.codebook[cover]]
    per_letter = float(D[xs, z].mean())

    exact = cond_pl = None
    if exact_causal:
        eve = ExactCausalEavesdropper(scheme)
        tot_exact = tot_pl = 0.0
        for t in range(trials):
            msg = Message(int(cover[t]), int(padded[t]), bool(covered[t]))
            mass = eve.posteriors(msg, xs[t])
            post = mass / mass.sum(axis=1, keepdims=True)
            _, best = best_response_rows(post, D, TIE_TOL)
            tot_exact += best.sum()
            tot_pl += (post @ D)[np.arange(n), z[t]].sum()
        exact = tot_exact / (trials * n)
        cond_pl = tot_pl / (trials * n)

    point = evaluate_channel(config.instance, config.channel)
    return SimReport(
        trials=trials,
        n=n,
        decode_error_rate=errors / trials,
        coverage_failure_rate=float(1.0 - covered.mean()),
        per_letter_distortion=per_letter,
        pad_mutual_information=pad_mutual_information(bins, padded, scheme.n_bins),
        rates_used={
            "cover_rate": scheme.cover_bits / n,
            "key_rate": scheme.bin_bits / n,
            "public_rate": (scheme.cover_bits + scheme.bin_bits) / n,
            "cover_bits": scheme.cover_bits,
            "bin_bits": scheme.bin_bits,
        },
        theory={
            "key_rate": point.key_rate,
            "distortion": point.distortion,
            "public_rate": entropy(config.instance.source),
        },
        exact_causal_distortion=exact,
        per_letter_conditional_distortion=cond_pl,
        config={
            "n": n,
            "eps": config.eps,
            "delta": config.delta,
            "seed": config.seed,
            "binning": config.binning,
            "encoder": config.encoder,
        },
    )
