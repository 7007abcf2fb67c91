"""Shared statistical utilities for the test suite."""

import numpy as np
from scipy import stats


def merge_count_bins(counts_a, counts_b, min_per_bin=10):
    """Merge adjacent count bins until each pooled bin holds >= min_per_bin."""
    rows = []
    acc_a = acc_b = 0
    for a, b in zip(counts_a, counts_b):
        acc_a += int(a)
        acc_b += int(b)
        if acc_a + acc_b >= min_per_bin:
            rows.append((acc_a, acc_b))
            acc_a = acc_b = 0
    if acc_a + acc_b > 0:
        if rows:
            rows[-1] = (rows[-1][0] + acc_a, rows[-1][1] + acc_b)
        else:
            rows.append((acc_a, acc_b))
    return np.array(rows).T


def two_sample_count_pvalue(sample_a, sample_b, min_per_bin=10):
    """Chi-square p-value for two integer-valued samples having one law."""
    sample_a = np.asarray(sample_a)
    sample_b = np.asarray(sample_b)
    top = int(max(sample_a.max(), sample_b.max()))
    counts_a = np.bincount(sample_a, minlength=top + 1)
    counts_b = np.bincount(sample_b, minlength=top + 1)
    table = merge_count_bins(counts_a, counts_b, min_per_bin)
    if table.shape[1] < 2:
        return 1.0
    _, p, _, _ = stats.chi2_contingency(table)
    return float(p)


def binned_two_sample_pvalue(sample_a, sample_b, bin_edges, min_per_bin=10):
    """Chi-square p-value on shared histogram bins (for wide-range values)."""
    counts_a, _ = np.histogram(sample_a, bin_edges)
    counts_b, _ = np.histogram(sample_b, bin_edges)
    keep = (counts_a + counts_b) >= min_per_bin
    table = np.array([counts_a[keep], counts_b[keep]])
    _, p, _, _ = stats.chi2_contingency(table)
    return float(p)


def poisson_fit_pvalue(draws, mean, kmax=None):
    """Chi-square p-value of integer draws against a Poisson pmf."""
    draws = np.asarray(draws)
    if kmax is None:
        kmax = int(draws.max())
    clipped = np.clip(draws, 0, kmax + 1)
    observed = np.bincount(clipped, minlength=kmax + 2).astype(float)
    pmf = stats.poisson.pmf(np.arange(kmax + 1), mean)
    pmf = np.append(pmf, max(1.0 - pmf.sum(), 0.0))
    expected = pmf * len(draws)
    # merge thin bins from the right so every expected count is >= 5
    while len(expected) > 2 and expected[-1] < 5:
        expected[-2] += expected[-1]
        observed[-2] += observed[-1]
        expected = expected[:-1]
        observed = observed[:-1]
    expected *= observed.sum() / expected.sum()
    _, p = stats.chisquare(observed, expected)
    return float(p)


def pooled_binomial_se(p_a, n_a, p_b, n_b):
    return float(np.sqrt(p_a * (1 - p_a) / n_a + p_b * (1 - p_b) / n_b))
