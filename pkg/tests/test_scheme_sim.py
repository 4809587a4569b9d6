import math

import numpy as np
import pytest
from scipy.stats import binom

from secrecy import DistortionMatrix, ProblemInstance, ValidationError, entropy
from secrecy.oracle import AuxChannel
from secrecy.scheme_sim import (
    ExactCausalEavesdropper,
    Key,
    Message,
    SchemeConfig,
    SizeGuardError,
    build_scheme,
    decode,
    eavesdrop_exact_causal,
    eavesdrop_per_letter,
    encode,
    pad_mutual_information,
    run_monte_carlo,
    scheme_rates,
)

from oracles import h2, reveal_zeros_channel

BINARY = ProblemInstance([0.75, 0.25], DistortionMatrix.hamming(2))
REVEAL = AuxChannel(reveal_zeros_channel(0.25))


def config(n=12, **kw):
    return SchemeConfig(BINARY, REVEAL, n, **kw)


@pytest.fixture(scope="module")
def scheme12():
    return build_scheme(config(12))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValidationError):
            config(0)
        with pytest.raises(ValidationError):
            config(eps=0.0)
        with pytest.raises(ValidationError):
            config(binning="table")
        with pytest.raises(ValidationError):
            SchemeConfig(BINARY, AuxChannel.identity(3), 4)

    def test_rates(self):
        r1, r2, cover_bits, bin_bits = scheme_rates(config(12))
        assert r1 == pytest.approx(h2(0.25) - 0.5 + 0.15, abs=1e-12)
        assert r1 == pytest.approx(0.461, abs=1e-3)
        assert r2 == pytest.approx(0.65, abs=1e-12)
        assert (cover_bits, bin_bits) == (6, 8)

    def test_size_guard(self):
        with pytest.raises(SizeGuardError):
            build_scheme(config(40))


class TestBuild:
    def test_single_letter(self):
        s = build_scheme(config(1))
        r1 = h2(0.25) - 0.5 + 0.15
        assert s.codebook.shape == (2 ** math.ceil(r1), 1)

    def test_codebook_size_and_marginal(self, scheme12):
        assert scheme12.codebook.shape == (64, 12)
        # u = 0 has marginal 0.5 under the reveal-zeros channel
        assert abs(scheme12.codebook.mean() - 0.5) < 0.05

    def test_deterministic(self):
        a, b = build_scheme(config(12, seed=9)), build_scheme(config(12, seed=9))
        assert np.array_equal(a.codebook, b.codebook)
        c = build_scheme(config(12, seed=10))
        assert not np.array_equal(a.codebook, c.codebook)

    def test_typical_set_is_typical(self, scheme12):
        for c in range(5):
            ts = scheme12.typical_set(c)
            if len(ts.seqs):
                dist = scheme12.distances(ts.seqs)[np.arange(len(ts.seqs)), c]
                assert np.all(dist <= scheme12.config.delta + 1e-12)

    def test_typical_set_complete(self):
        s = build_scheme(config(8))
        all_x = (np.arange(2**8)[:, None] >> np.arange(7, -1, -1)) & 1
        dist = s.distances(all_x)
        for c in range(s.n_cover):
            brute = np.sort(s.code_of(all_x[dist[:, c] <= s.config.delta + 1e-12]))
            assert np.array_equal(brute, s.typical_set(c).codes)

    def test_index_bins_unique_per_codeword(self, scheme12):
        ts = scheme12.typical_set(0)
        used = ts.bins[ts.bins >= 0]
        assert len(np.unique(used)) == len(used)
        assert used.max(initial=0) < scheme12.n_bins


class TestEncodeDecode:
    def test_zero_key_is_identity(self, scheme12):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = (rng.random(12) < 0.25).astype(int)
            msg = encode(scheme12, x, Key(0))
            cover = np.array([msg.cover_index])
            assert msg.padded_bin == scheme12.block_bins(x[None], cover)[0]

    def test_distinct_keys_distinct_bins(self, scheme12):
        x = np.array([0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0])
        bins = {encode(scheme12, x, k).padded_bin for k in range(scheme12.n_bins)}
        assert len(bins) == scheme12.n_bins

    def test_hash_bin_map(self):
        s = build_scheme(config(12, binning="hash"))
        x = np.zeros(12, dtype=int)
        assert encode(s, x, 0).padded_bin == s.bin_map(x)
        assert 0 <= s.bin_map(x) < s.n_bins

    def test_rejects_bad_block(self, scheme12):
        with pytest.raises(ValidationError):
            encode(scheme12, [0, 1], 0)
        with pytest.raises(ValidationError):
            encode(scheme12, [2] * 12, 0)

    def test_round_trip_when_decodable(self, scheme12):
        rng = np.random.default_rng(1)
        xs = (rng.random((300, 12)) < 0.25).astype(int)
        keys = rng.integers(scheme12.n_bins, size=300)
        checked = 0
        for x, k in zip(xs, keys):
            msg = encode(scheme12, x, int(k))
            if not msg.covered:
                continue
            ok = scheme12._decodable(msg.cover_index, scheme12.code_of(x[None]))[0]
            if ok:
                checked += 1
                assert np.array_equal(decode(scheme12, msg, int(k)), x)
        assert checked > 200

    def test_wrong_key(self, scheme12):
        rng = np.random.default_rng(2)
        hits = 0
        trials = 2000
        for _ in range(trials):
            x = (rng.random(12) < 0.25).astype(int)
            k = int(rng.integers(scheme12.n_bins))
            wrong = (k + 1 + int(rng.integers(scheme12.n_bins - 1))) % scheme12.n_bins
            x_hat = decode(scheme12, encode(scheme12, x, k), wrong)
            hits += x_hat is not None and np.array_equal(x_hat, x)
        assert hits / trials < 0.05

    def test_undecodable_bin_returns_none(self):
        s = build_scheme(config(12, binning="hash"))
        ts = s.typical_set(0)
        empty = next(b for b in range(s.n_bins) if b not in ts.by_bin)
        assert decode(s, Message(0, empty), 0) is None
        crowded = next(b for b, ks in ts.by_bin.items() if len(ks) > 1)
        assert decode(s, Message(0, crowded), 0) is None

    def test_encoder_distribution_rows(self, scheme12):
        xs = (np.random.default_rng(3).random((50, 12)) < 0.25).astype(int)
        probs, covered = scheme12.encoder_distribution(xs)
        assert probs.sum(axis=1) == pytest.approx(np.ones(50))
        assert np.all(probs >= 0)
        # a codeword that pairs u = 0 with x = 1 is never used
        bad = ((scheme12.codebook[None] == 0) & (xs[:, None] == 1)).any(axis=2)
        assert np.all(probs[covered][bad[covered]] == 0)


class TestEavesdroppers:
    def test_per_letter_reveal_zeros(self, scheme12):
        # revealed zero -> 0; coin flip ties and breaks to 0
        assert list(scheme12.letter_responses) == [0, 0]
        msg = Message(3, 0)
        assert np.all(eavesdrop_per_letter(scheme12, msg) == 0)

    def test_per_letter_identity(self):
        s = build_scheme(SchemeConfig(BINARY, AuxChannel.identity(2), 6))
        c = 1
        assert np.array_equal(eavesdrop_per_letter(s, Message(c, 0)), s.codebook[c])

    def test_per_letter_constant(self):
        inst = ProblemInstance([0.2, 0.8], DistortionMatrix.hamming(2))
        s = build_scheme(SchemeConfig(inst, AuxChannel.constant(2), 6))
        assert np.all(eavesdrop_per_letter(s, Message(0, 0)) == 1)

    def test_exact_revealing_code(self):
        s = build_scheme(SchemeConfig(BINARY, AuxChannel.identity(2), 1))
        for x in (0, 1):
            msg = encode(s, [x], 0)
            if msg.covered:
                assert eavesdrop_exact_causal(s, msg, []) == x

    def test_exact_perfect_secrecy(self):
        inst = ProblemInstance([0.3, 0.7], DistortionMatrix.hamming(2))
        s = build_scheme(SchemeConfig(inst, AuxChannel.constant(2), 6))
        eve = ExactCausalEavesdropper(s)
        rng = np.random.default_rng(4)
        x = rng.integers(2, size=6)
        msg = encode(s, x, 5)
        for i in range(6):
            assert eve.next_estimate(msg, x[:i]) == 1
            post = eve.posteriors(msg, x)[i]
            assert post / post.sum() == pytest.approx([0.3, 0.7], abs=1e-12)

    def test_exact_size_guard(self):
        s = build_scheme(config(14))
        with pytest.raises(SizeGuardError):
            ExactCausalEavesdropper(s)

    def test_exact_never_worse_pointwise(self):
        report = run_monte_carlo(config(8), 400, exact_causal=True)
        assert report.exact_causal_distortion <= report.per_letter_conditional_distortion + 1e-12

    def test_prefix_estimate_matches_posteriors(self):
        s = build_scheme(config(6))
        eve = ExactCausalEavesdropper(s)
        x = np.array([0, 1, 0, 0, 1, 0])
        msg = encode(s, x, 3)
        post = eve.posteriors(msg, x)
        for i in range(6):
            if post[i].sum() > 0:
                costs = post[i] @ BINARY.distortion.values
                assert costs[eve.next_estimate(msg, x[:i])] == pytest.approx(costs.min())


class TestMonteCarlo:
    def test_reproducible(self):
        a = run_monte_carlo(config(12, seed=5), 1)
        b = run_monte_carlo(config(12, seed=5), 1)
        assert a.to_dict() == b.to_dict()

    def test_trials_validated(self):
        with pytest.raises(ValidationError):
            run_monte_carlo(config(12), 0)

    def test_no_key_revealing_channel(self):
        # covered blocks are revealed exactly; only coverage failures cost anything
        report = run_monte_carlo(SchemeConfig(BINARY, AuxChannel.identity(2), 8), 2000)
        assert report.theory["key_rate"] == 0.0
        assert report.per_letter_distortion <= report.coverage_failure_rate
        roomy = run_monte_carlo(SchemeConfig(BINARY, AuxChannel.identity(2), 6, eps=1.0), 2000)
        assert roomy.per_letter_distortion < 0.01

    def test_coverage_default(self):
        report = run_monte_carlo(config(12), 10_000)
        assert report.coverage_failure_rate < 0.2

    def test_coverage_typical_lower_bound(self):
        # a block is coverable only if its number of ones fits the u=1, x=1 cell
        n, delta = 12, 0.1
        lo, hi = math.ceil(n * (0.25 - delta)), math.floor(n * (0.25 + delta))
        bound = 1 - (binom.cdf(hi, n, 0.25) - binom.cdf(lo - 1, n, 0.25))
        report = run_monte_carlo(config(n, delta=delta, encoder="typical"), 10_000)
        assert report.coverage_failure_rate >= bound - 0.015

    def test_decode_error_trend(self):
        e6 = run_monte_carlo(config(6), 5000).decode_error_rate
        e12 = run_monte_carlo(config(12), 5000).decode_error_rate
        assert e12 <= e6 + 0.05

    def test_distortion_consistency(self):
        report = run_monte_carlo(config(12), 10_000)
        assert abs(report.per_letter_distortion - report.theory["distortion"]) < 0.05

    def test_report_fields(self):
        report = run_monte_carlo(config(12), 50)
        d = report.to_dict()
        assert d["rates_used"]["cover_bits"] == 6
        assert d["rates_used"]["key_rate"] == pytest.approx(8 / 12)
        assert d["theory"]["public_rate"] == pytest.approx(entropy(BINARY.source))
        assert d["exact_causal_distortion"] is None

    def test_other_variants_run(self):
        for kw in (dict(binning="hash"), dict(encoder="typical"), dict(avoid_collisions=False)):
            report = run_monte_carlo(config(10, **kw), 300)
            assert 0 <= report.decode_error_rate <= 1


class TestPadInformation:
    def test_independent_is_small(self):
        rng = np.random.default_rng(0)
        a, b = rng.integers(256, size=(2, 10_000))
        assert pad_mutual_information(a, b, 256) < 0.01

    def test_dependent_is_large(self):
        a = np.random.default_rng(0).integers(256, size=10_000)
        assert pad_mutual_information(a, a, 256) > 2.9

    def test_few_bins(self):
        a = np.array([0, 1, 0, 1])
        assert pad_mutual_information(a, a, 2) == pytest.approx(1.0)
