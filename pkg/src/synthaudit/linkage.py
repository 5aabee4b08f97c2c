"""The linkage attack engine.

Original-dataset outliers are compared against every row of a synthetic
variant (optionally only its outliers), each configured QI is scored with
its comparator, and a pair is a possible match only when EVERY QI score
meets its threshold (conjunctive, worst-case semantics). Aggregation then
counts matches per original record; an original with exactly one possible
match is a unique match, the maximum-risk case.

Scoring is vectorized over blocks of targets and parallelizable across
blocks; any schedule produces a result identical to the sequential one,
and the match set is identical to naive pair-by-pair enumeration.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .comparators import ComparatorKind, ComparatorSpec
from .dataset import Dataset, Kind
from .errors import ConfigError, DataError
from .outliers import OutlierConfig, OutlierSet, detect_outliers

# Default match thresholds: numeric QIs pass at half similarity, categorical
# QIs only on exact agreement.
NUMERIC_THRESHOLD = 0.5
CATEGORICAL_THRESHOLD = 1.0


@dataclass(frozen=True)
class QIRule:
    """One quasi-identifier: attribute, comparator, and match threshold."""

    name: str
    comparator: ComparatorSpec
    threshold: float | None = None

    def __post_init__(self) -> None:
        if self.threshold is None:
            default = (
                NUMERIC_THRESHOLD
                if self.comparator.kind is ComparatorKind.GAUSS
                else CATEGORICAL_THRESHOLD
            )
            object.__setattr__(self, "threshold", default)
        if not 0 < self.threshold <= 1:
            raise ConfigError(f"threshold for {self.name!r} must be in (0, 1], got {self.threshold}")


@dataclass(frozen=True)
class QIConfig:
    """The attacker's background-knowledge model: an ordered set of QI rules."""

    rules: tuple[QIRule, ...]

    def __post_init__(self) -> None:
        names = [r.name for r in self.rules]
        if not names:
            raise ConfigError("QI config needs at least one quasi-identifier")
        if len(set(names)) != len(names):
            raise ConfigError("duplicate quasi-identifier in QI config")

    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.rules)

    def rule(self, name: str) -> QIRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise ConfigError(f"no QI rule for {name!r}")

    def subset(self, names: Iterable[str]) -> "QIConfig":
        """Restrict to the given QIs, keeping configured order."""
        wanted = list(names)
        unknown = sorted(set(wanted) - set(self.names()))
        if unknown:
            raise ConfigError(f"QI subset names not configured: {unknown}")
        return QIConfig(rules=tuple(r for r in self.rules if r.name in wanted))

    def validate_against(self, ds: Dataset) -> None:
        """Check attribute existence and comparator/kind compatibility."""
        if not any(a.role.value == "qi" for a in ds.schema):
            raise ConfigError("schema used for linkage declares no QI attribute")
        for r in self.rules:
            kind = ds.attribute(r.name).kind
            if r.comparator.kind is ComparatorKind.GAUSS and kind is not Kind.NUMERICAL:
                raise ConfigError(f"gauss comparator on non-numeric attribute {r.name!r}")
            if r.comparator.kind is not ComparatorKind.GAUSS and kind is not Kind.CATEGORICAL:
                raise ConfigError(
                    f"{r.comparator.kind.value} comparator on non-categorical attribute {r.name!r}"
                )


@dataclass(frozen=True)
class ScoredPair:
    original: int
    synthetic: int
    scores: dict[str, float] = field(repr=False)


@dataclass(frozen=True)
class LinkageResult:
    """Possible-match pairs plus per-original aggregation."""

    pairs: tuple[ScoredPair, ...]
    per_original_match_count: dict[int, int]
    unique_match_count: int
    attack_surface: tuple[int, int]  # (targets, variant rows considered)

    @classmethod
    def from_pairs(
        cls, pairs: tuple[ScoredPair, ...], attack_surface: tuple[int, int]
    ) -> "LinkageResult":
        counts = Counter(p.original for p in pairs)
        return cls(
            pairs=pairs,
            per_original_match_count=dict(sorted(counts.items())),
            unique_match_count=sum(1 for c in counts.values() if c == 1),
            attack_surface=attack_surface,
        )

    @property
    def distinct_original_count(self) -> int:
        return len(self.per_original_match_count)


def _check_same_schema(original: Dataset, variant: Dataset) -> None:
    if original.schema != variant.schema:
        raise DataError("variant does not share the original's schema")


def _validate_blocking(blocking: str, ds: Dataset, qi_cfg: QIConfig | None) -> None:
    # Blocking is only score-equivalent to full enumeration when the blocked
    # QI demands exact agreement, i.e. a categorical comparator at threshold 1.
    if qi_cfg is None:
        raise ConfigError("blocking requires the QI config to verify a threshold of 1")
    if ds.attribute(blocking).kind is not Kind.CATEGORICAL:
        raise ConfigError(f"blocking attribute {blocking!r} is not categorical")
    rule = qi_cfg.rule(blocking)
    if rule.threshold != 1:
        raise ConfigError(
            f"blocking on {blocking!r} requires threshold 1, configured {rule.threshold}"
        )


def candidate_pairs(
    targets: OutlierSet,
    original: Dataset,
    variant: Dataset,
    blocking: str | None = None,
    qi_cfg: QIConfig | None = None,
) -> Iterator[tuple[int, int]]:
    """Yield (original ordinal, variant ordinal) candidate pairs.

    Without blocking this is the full cross product of targets and variant
    rows. With blocking, only pairs agreeing exactly on the blocking QI are
    yielded, which is match-equivalent whenever that QI's threshold is 1.
    """
    _check_same_schema(original, variant)
    ordered = sorted(targets.flagged)
    if blocking is None:
        for i in ordered:
            for j in range(variant.row_count):
                yield i, j
        return

    _validate_blocking(blocking, original, qi_cfg)
    groups: dict[str, list[int]] = {}
    for j, value in enumerate(variant.columns[blocking]):
        groups.setdefault(value, []).append(j)
    orig_col = original.columns[blocking]
    for i in ordered:
        for j in groups.get(orig_col[i], ()):
            yield i, j


def score_pairs(
    pairs: Iterable[tuple[int, int]],
    original: Dataset,
    variant: Dataset,
    cfg: QIConfig,
) -> Iterator[ScoredPair]:
    """Score every candidate pair on every configured QI."""
    cfg.validate_against(original)
    cfg.validate_against(variant)
    cols = [(r, original.columns[r.name], variant.columns[r.name]) for r in cfg.rules]
    for i, j in pairs:
        scores = {r.name: r.comparator.score(ocol[i], vcol[j]) for r, ocol, vcol in cols}
        yield ScoredPair(original=i, synthetic=j, scores=scores)


def filter_matches(
    scored: Iterable[ScoredPair],
    cfg: QIConfig,
    attack_surface: tuple[int, int] = (0, 0),
) -> LinkageResult:
    """Keep pairs whose every QI score meets its threshold; aggregate counts."""
    names = cfg.names()
    matches = []
    for pair in scored:
        if set(pair.scores) != set(names):
            raise ConfigError("scored pair does not carry one score per configured QI")
        if all(pair.scores[r.name] >= r.threshold for r in cfg.rules):
            matches.append(pair)
    matches.sort(key=lambda p: (p.original, p.synthetic))
    return LinkageResult.from_pairs(tuple(matches), attack_surface)


# ---------------------------------------------------------------------------
# Vectorized scoring used by attack(). Produces results identical to the
# candidate_pairs -> score_pairs -> filter_matches pipeline above.


class _RuleScorer:
    """Per-rule score matrices/vectors over (target ordinals, variant ordinals)."""

    def __init__(self, rule: QIRule, original: Dataset, variant: Dataset):
        self.rule = rule
        self.numeric = rule.comparator.kind is ComparatorKind.GAUSS
        if self.numeric:
            self._o = original.columns[rule.name]
            self._v = variant.columns[rule.name]
        else:
            o_col = original.columns[rule.name]
            v_col = variant.columns[rule.name]
            cats = sorted(set(o_col) | set(v_col))
            code = {c: k for k, c in enumerate(cats)}
            self._o = np.fromiter((code[c] for c in o_col), dtype=np.int64, count=len(o_col))
            self._v = np.fromiter((code[c] for c in v_col), dtype=np.int64, count=len(v_col))
            comp = rule.comparator
            self._table = np.array(
                [[comp.score(a, b) for b in cats] for a in cats], dtype=np.float64
            )

    def _gauss(self, diff: np.ndarray) -> np.ndarray:
        comp = self.rule.comparator
        surplus = np.maximum(0.0, diff - comp.offset)
        return 2.0 ** (-((surplus / comp.scale) ** 2))

    def matrix(self, t_ids: np.ndarray, r_ids: np.ndarray) -> np.ndarray:
        if self.numeric:
            diff = np.abs(self._o[t_ids][:, None] - self._v[r_ids][None, :])
            return self._gauss(diff)
        return self._table[self._o[t_ids][:, None], self._v[r_ids][None, :]]

    def pairwise(self, t_sel: np.ndarray, r_sel: np.ndarray) -> np.ndarray:
        if self.numeric:
            return self._gauss(np.abs(self._o[t_sel] - self._v[r_sel]))
        return self._table[self._o[t_sel], self._v[r_sel]]


def _score_block(
    scorers: list[_RuleScorer], t_ids: np.ndarray, r_ids: np.ndarray
) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Return matched (original, variant) ordinals and per-rule scores for one block."""
    mask = None
    for scorer in scorers:
        hit = scorer.matrix(t_ids, r_ids) >= scorer.rule.threshold
        mask = hit if mask is None else mask & hit
        if not mask.any():
            break
    if mask is None or not mask.any():
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, [np.empty(0) for _ in scorers]
    ti, rj = np.nonzero(mask)
    t_sel = t_ids[ti]
    r_sel = r_ids[rj]
    return t_sel, r_sel, [s.pairwise(t_sel, r_sel) for s in scorers]


def attack(
    original: Dataset,
    variant: Dataset,
    outlier_cfg: OutlierConfig,
    qi_cfg: QIConfig,
    qi_subset: Iterable[str] | None = None,
    *,
    blocking: str | None = None,
    restrict_variant_outliers: bool = False,
    workers: int = 1,
    chunk_size: int = 256,
) -> LinkageResult:
    """Run the full attack: outlier targets scored against a variant.

    ``qi_subset`` restricts the attacker's background knowledge to a subset
    of the configured QIs. ``restrict_variant_outliers`` additionally limits
    the synthetic side to its own outlier rows. Results are independent of
    ``workers`` and ``chunk_size``.
    """
    _check_same_schema(original, variant)
    cfg = qi_cfg if qi_subset is None else qi_cfg.subset(qi_subset)
    cfg.validate_against(original)

    targets = np.array(sorted(detect_outliers(original, outlier_cfg).flagged), dtype=np.int64)
    if restrict_variant_outliers:
        rows = np.array(
            sorted(detect_outliers(variant, outlier_cfg).flagged), dtype=np.int64
        )
    else:
        rows = np.arange(variant.row_count, dtype=np.int64)
    surface = (len(targets), len(rows))
    if len(targets) == 0 or len(rows) == 0:
        return LinkageResult.from_pairs((), surface)

    scorers = [_RuleScorer(r, original, variant) for r in cfg.rules]

    # Partition the pair space: one partition per blocking category, or a
    # single partition spanning everything. Each partition is chunked over
    # targets; blocks are independent, so execution order cannot matter.
    if blocking is not None:
        _validate_blocking(blocking, original, cfg)
        v_col = variant.columns[blocking]
        groups: dict[str, list[int]] = {}
        for j in rows:
            groups.setdefault(v_col[j], []).append(int(j))
        o_col = original.columns[blocking]
        partitions = []
        for value in sorted({o_col[i] for i in targets}):
            t_ids = np.array([i for i in targets if o_col[i] == value], dtype=np.int64)
            r_ids = np.array(groups.get(value, []), dtype=np.int64)
            if len(r_ids):
                partitions.append((t_ids, r_ids))
    else:
        partitions = [(targets, rows)]

    blocks = [
        (t_ids[k : k + chunk_size], r_ids)
        for t_ids, r_ids in partitions
        for k in range(0, len(t_ids), chunk_size)
    ]

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _score_block(scorers, *b), blocks))
    else:
        results = [_score_block(scorers, *b) for b in blocks]

    names = cfg.names()
    pairs = []
    for t_sel, r_sel, rule_scores in results:
        for k in range(len(t_sel)):
            pairs.append(
                ScoredPair(
                    original=int(t_sel[k]),
                    synthetic=int(r_sel[k]),
                    scores={name: float(rule_scores[q][k]) for q, name in enumerate(names)},
                )
            )
    pairs.sort(key=lambda p: (p.original, p.synthetic))
    return LinkageResult.from_pairs(tuple(pairs), surface)


def save_matches(result: LinkageResult, cfg: QIConfig, path: str | Path) -> None:
    """Export possible-match pairs with per-QI scores (6 fractional digits)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = cfg.names()
    lines = [",".join(["original_index", "synthetic_index"] + [f"score_{n}" for n in names])]
    for p in result.pairs:
        lines.append(
            ",".join(
                [str(p.original), str(p.synthetic)] + [f"{p.scores[n]:.6f}" for n in names]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
