"""Epsilon-differentially-private independent-marginal synthesizer.

The baseline generator: build one histogram per attribute (equal-width bins
for numeric columns, the observed category set for categorical columns),
perturb every count with Laplace noise of scale 1/eps_a, clamp negatives,
normalize, and sample each attribute independently from its noisy marginal.

Privacy accounting uses the add/remove-one neighboring convention: each
count query has sensitivity 1, the per-attribute budget is eps_a =
epsilon / (number of attributes), and the marginals compose sequentially to
the total epsilon because every attribute touches the same records.

Randomness is fully pinned for reproducibility: a PCG64 stream seeds one
SeedSequence child per attribute (substream id = attribute ordinal), and
Laplace noise is drawn by inverse CDF from explicit 64-bit uniforms, so a
(dataset, epsilon, n, num_bins, seed) tuple always produces the same output
dataset, regardless of how attributes are scheduled.

Numeric binning spans the observed [min, max] of the real data. That range
is itself disclosed by construction; this is a documented limitation of the
independent-marginal design, and it also guarantees boundary adherence of
the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import AttributeSchema, Dataset, Kind
from .errors import ConfigError, DataError

DEFAULT_NUM_BINS = 32


@dataclass(frozen=True)
class PrivacyBudget:
    """Total epsilon split equally across attributes (sequential composition)."""

    epsilon: float
    attribute_count: int

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.attribute_count < 1:
            raise ConfigError("budget needs at least one attribute")

    @property
    def per_attribute_epsilon(self) -> float:
        return self.epsilon / self.attribute_count


@dataclass(frozen=True)
class NoisyHistogram:
    """One attribute's Laplace-noised marginal, normalized to a distribution."""

    attribute: str
    kind: Kind
    bins: tuple  # category tuple, or ndarray of bin edges (len = bins + 1)
    noisy_counts: np.ndarray = field(repr=False)
    probabilities: np.ndarray = field(repr=False)


def _laplace_noise(rng: np.random.Generator, scale: float, size: int) -> np.ndarray:
    """Laplace(0, scale) via inverse CDF over uniforms from the raw 64-bit stream.

    Uniforms are built as (raw >> 11 + 0.5) * 2^-53, open at both ends, so
    the log never sees 0 and the draws are an exact function of the PCG64
    stream.
    """
    raw = rng.bit_generator.random_raw(size)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    centered = u - 0.5
    return -scale * np.sign(centered) * np.log1p(-2.0 * np.abs(centered))


def _normalize(noisy: np.ndarray) -> np.ndarray:
    clamped = np.maximum(noisy, 0.0)
    total = clamped.sum()
    if total <= 0:
        return np.full(len(clamped), 1.0 / len(clamped))
    return clamped / total


def build_noisy_histogram(
    ds: Dataset,
    attr: str,
    eps_a: float,
    num_bins: int = DEFAULT_NUM_BINS,
    rng: np.random.Generator | None = None,
) -> NoisyHistogram:
    """Count, perturb with Laplace(1/eps_a), clamp, and normalize one marginal.

    Numeric attributes use ``num_bins`` equal-width bins over the observed
    range (a constant column collapses to a single bin); categorical
    attributes use their observed category set, in sorted order.
    """
    if not eps_a > 0:
        raise ConfigError(f"per-attribute epsilon must be positive, got {eps_a}")
    if num_bins < 1:
        raise ConfigError(f"num_bins must be >= 1, got {num_bins}")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(0))
    schema = ds.attribute(attr)
    col = ds.columns[attr]
    if ds.row_count == 0:
        raise DataError("cannot build a histogram from an empty dataset")

    if schema.kind is Kind.NUMERICAL:
        lo, hi = float(np.min(col)), float(np.max(col))
        if hi == lo:
            edges = np.array([lo, hi])
            counts = np.array([float(len(col))])
        else:
            edges = np.linspace(lo, hi, num_bins + 1)
            counts, _ = np.histogram(col, bins=edges)
            counts = counts.astype(np.float64)
        bins: tuple = tuple(edges)
    else:
        cats = sorted(set(col))
        index = {c: k for k, c in enumerate(cats)}
        counts = np.zeros(len(cats))
        for value in col:
            counts[index[value]] += 1
        bins = tuple(cats)

    noisy = counts + _laplace_noise(rng, 1.0 / eps_a, len(counts))
    return NoisyHistogram(
        attribute=attr,
        kind=schema.kind,
        bins=bins,
        noisy_counts=noisy,
        probabilities=_normalize(noisy),
    )


def _sample_from_histogram(
    hist: NoisyHistogram, n: int, rng: np.random.Generator
) -> np.ndarray:
    cum = np.cumsum(hist.probabilities)
    cum[-1] = 1.0  # guard against float undersum
    picks = np.searchsorted(cum, rng.random(n), side="right")
    picks = np.minimum(picks, len(hist.probabilities) - 1)

    if hist.kind is Kind.CATEGORICAL:
        cats = np.array(hist.bins, dtype=object)
        return cats[picks]

    edges = np.asarray(hist.bins, dtype=np.float64)
    if len(edges) == 2 and edges[0] == edges[1]:
        return np.full(n, edges[0])
    lows = edges[picks]
    highs = edges[picks + 1]
    values = lows + rng.random(n) * (highs - lows)
    # uniform-in-bin can graze the upper edge after rounding; keep in range
    return np.minimum(values, edges[-1])


def synthesize(
    ds: Dataset,
    epsilon: float,
    n: int,
    num_bins: int = DEFAULT_NUM_BINS,
    seed: int = 0,
) -> Dataset:
    """Generate n rows by sampling every attribute from its noisy marginal.

    Deterministic for a fixed (dataset, epsilon, n, num_bins, seed); the
    output carries the input schema unchanged.
    """
    if ds.row_count == 0:
        raise DataError("cannot synthesize from an empty dataset")
    if n < 1:
        raise ConfigError(f"row count n must be >= 1, got {n}")
    budget = PrivacyBudget(epsilon=epsilon, attribute_count=len(ds.schema))
    eps_a = budget.per_attribute_epsilon

    children = np.random.SeedSequence(seed).spawn(len(ds.schema))
    columns: dict[str, np.ndarray] = {}
    for ordinal, attr in enumerate(ds.schema):
        rng = np.random.Generator(np.random.PCG64(children[ordinal]))
        hist = build_noisy_histogram(ds, attr.name, eps_a, num_bins, rng)
        columns[attr.name] = _sample_from_histogram(hist, n, rng)
    return Dataset.from_columns(ds.schema, columns)


def generator_metadata(
    schema: tuple[AttributeSchema, ...], epsilon: float, n: int, num_bins: int, seed: int
) -> dict:
    """Provenance block recorded in run reports for generated variants."""
    budget = PrivacyBudget(epsilon=epsilon, attribute_count=len(schema))
    return {
        "type": "dp_independent_marginals",
        "epsilon": epsilon,
        "per_attribute_epsilon": budget.per_attribute_epsilon,
        "n": n,
        "num_bins": num_bins,
        "seed": seed,
    }
