import numpy as np
import pytest
from scipy import stats

from orbconv import (
    InvariantViolation,
    OrbitalConvolution,
    compare,
    density_profile,
    empirical_transform,
    histogram,
    sample_convolution,
    transform_of_convolution,
)
from orbconv.montecarlo import CHUNK_SIZE


def test_single_generator_is_deterministic(h2):
    out = sample_convolution(OrbitalConvolution(h2, (1.0,)), 1000, seed=7)
    np.testing.assert_allclose(out, 1.0, rtol=1e-14)


def test_seeded_reproducibility_and_threads(h2, monkeypatch):
    conv = OrbitalConvolution(h2, (0.7, 1.1, 0.4))
    a = sample_convolution(conv, 25_000, seed=11, chunk_size=10_000)
    b = sample_convolution(conv, 25_000, seed=11, chunk_size=10_000, threads=3)
    monkeypatch.setenv("ORBCONV_THREADS", "2")
    c = sample_convolution(conv, 25_000, seed=11, chunk_size=10_000)
    assert np.array_equal(a, b) and np.array_equal(a, c)
    d = sample_convolution(conv, 25_000, seed=12, chunk_size=10_000)
    assert not np.array_equal(a, d)


def test_prefix_stability(h2):
    # a longer run extends a shorter one chunk by chunk
    conv = OrbitalConvolution(h2, (1.0, 0.5))
    short = sample_convolution(conv, CHUNK_SIZE, seed=3)
    long = sample_convolution(conv, CHUNK_SIZE + 10, seed=3)
    assert np.array_equal(short, long[:CHUNK_SIZE])


def test_support_and_two_step_law(h3):
    # in H^3, cosh d = cosh s cosh u + sinh s sinh u x with x uniform on [-1, 1]
    s, u = 0.8, 1.3
    out = sample_convolution(OrbitalConvolution(h3, (s, u)), 40_000, seed=5)
    assert out.min() >= abs(s - u) - 1e-12 and out.max() <= s + u + 1e-12
    x = (np.cosh(out) - np.cosh(s) * np.cosh(u)) / (np.sinh(s) * np.sinh(u))
    assert stats.kstest(x, stats.uniform(-1, 2).cdf).pvalue > 1e-3


def test_sl2_and_so21_same_law(h2):
    conv = OrbitalConvolution(h2, (0.6, 0.9, 1.2))
    a = sample_convolution(conv, 30_000, seed=1, realization="sl2")
    b = sample_convolution(conv, 30_000, seed=2, realization="so(n,1)")
    assert stats.ks_2samp(a, b).pvalue > 1e-3


def test_histogram_normalization(h2):
    conv = OrbitalConvolution(h2, (1.0, 1.0, 1.0))
    samples = sample_convolution(conv, 50_000, seed=9)
    hist = histogram(samples, bins=60, space=h2, range_=(0.0, 3.0))
    assert hist.counts.sum() == samples.size
    mass = np.sum(hist.density_estimate * np.diff(hist.bin_edges) * 2 * np.sinh(hist.centres))
    assert mass == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        histogram(samples, bins=5, space=h2)
    with pytest.raises(ValueError):
        histogram([], bins=20, space=h2)


def test_compare_with_profile(h2):
    conv = OrbitalConvolution(h2, (1.0, 1.0, 1.0))
    prof = density_profile(conv, levels=6)
    samples = sample_convolution(conv, 200_000, seed=21)
    cmp = compare(histogram(samples, bins=100, space=h2, range_=(0.0, 3.0)), prof)
    assert cmp["ks"] < 0.005
    assert cmp["l1"] < 0.05
    # a wrong profile is detected
    wrong = density_profile(OrbitalConvolution(h2, (1.0, 1.0, 0.8)), levels=6)
    bad = compare(histogram(samples, bins=100, space=h2, range_=(0.0, 3.0)), wrong)
    assert bad["ks"] > 0.02


def test_empirical_transform(h2):
    conv = OrbitalConvolution(h2, (1.0, 1.5))
    samples = sample_convolution(conv, 50_000, seed=4)
    lam = [0.5, 2.0, 5.0]
    emp = empirical_transform(samples, conv, lam)
    exact = transform_of_convolution(conv, lam).real
    z = np.abs(np.array(emp["mean"]) - exact) / np.array(emp["stderr"])
    assert np.all(z < 4)


def test_invariant_violation(h2, monkeypatch):
    import orbconv.montecarlo as mc

    monkeypatch.setattr(mc, "sample_product_radii",
                        lambda real, gens, size, rng: np.full(size, sum(gens) + 0.1))
    with pytest.raises(InvariantViolation):
        sample_convolution(OrbitalConvolution(h2, (1.0, 1.0)), 10, seed=0)


def test_compare_profile_with_itself(h2):
    # counts drawn exactly from the profile's bin masses: only rounding remains
    from orbconv.montecarlo import RadialHistogram

    prof = density_profile(OrbitalConvolution(h2, (1.0, 1.0, 1.0)), levels=6)
    edges = np.linspace(0.0, 3.0, 61)
    n = 10 ** 9
    counts = np.round(np.diff(prof.cdf(edges)) * n).astype(np.int64)
    n = int(counts.sum())
    mids = 0.5 * (edges[1:] + edges[:-1])
    dens = counts / (n * np.diff(edges) * 2 * np.sinh(mids))
    cmp = compare(RadialHistogram(edges, counts, n, dens), prof)
    assert cmp["l1"] < 1e-6 and cmp["ks"] < 1e-6
