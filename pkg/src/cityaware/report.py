"""End-to-end pipeline: load inputs, compute every index, write report files."""

from __future__ import annotations

import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analysis
from .channel import ChannelResult, channel_result
from .errors import ConfigError, ValidationError
from .indices import IndexVector, awareness_index, gai_reference, spatial_awareness_index
from .ingest import load_catalog, load_records
from .model import (
    DEFAULT_TIERS,
    AwarenessMatrix,
    CityCatalog,
    IndexReport,
    InteractionRecord,
    Period,
    PeriodReport,
    WeightMatrix,
    build_matrix,
    require_valid,
)
from .spatial import SpatialConfig, global_distance_matrix, weight_matrix

log = logging.getLogger(__name__)

__all__ = [
    "RunConfig",
    "PipelineResult",
    "aggregate_period",
    "group_records",
    "compute",
    "run_pipeline",
    "write_reports",
    "SECTIONS",
]

SECTIONS = ("indices", "deltas", "groups", "summary", "ranktail", "bands", "channel")
INDEX_FIELDS = ("iai", "oai", "siai", "soai", "gai")


@dataclass(frozen=True)
class RunConfig:
    catalog_path: Path
    records_path: Path
    output_path: Path
    periods: tuple[Period, ...]
    convention: str = "canonical"
    distance_source: str = "great_circle"
    hsr_speed_kmh: float = 300.0
    thresholds: tuple[float, ...] = analysis.DEFAULT_THRESHOLDS
    channel_pairs: tuple[tuple[str, str], ...] = ()
    output_format: str = "csv"
    # how monthly records are combined into a multi-month period
    aggregation: str = "median"
    sections: tuple[str, ...] = SECTIONS

    def __post_init__(self):
        for name in ("catalog_path", "records_path", "output_path"):
            value = getattr(self, name)
            if value is None or not str(value):
                raise ConfigError(f"{name} must be set")
            object.__setattr__(self, name, Path(value))
        object.__setattr__(self, "periods", tuple(self.periods))
        if not self.periods:
            raise ConfigError("at least one period is required")
        if self.convention not in ("canonical", "paper_literal"):
            raise ConfigError(f"unknown convention {self.convention!r}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        if self.aggregation not in ("median", "sum"):
            raise ConfigError(f"unknown aggregation {self.aggregation!r}")
        thresholds = tuple(float(t) for t in self.thresholds)
        if not thresholds or any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ConfigError("thresholds must be nonempty and strictly increasing")
        object.__setattr__(self, "thresholds", thresholds)
        pairs = tuple(tuple(p) for p in self.channel_pairs)
        for i, j in pairs:
            if i == j:
                raise ConfigError("channel pair must be distinct cities")
        object.__setattr__(self, "channel_pairs", pairs)
        unknown = set(self.sections) - set(SECTIONS)
        if unknown:
            raise ConfigError(f"unknown report sections {sorted(unknown)}")
        # surfaces speed/source errors as ConfigError early
        self.spatial

    @property
    def spatial(self) -> SpatialConfig:
        return SpatialConfig(hsr_speed_kmh=self.hsr_speed_kmh, distance_source=self.distance_source)


@dataclass
class PipelineResult:
    catalog: CityCatalog
    weights: WeightMatrix
    matrices: list[AwarenessMatrix]
    report: IndexReport
    deltas: dict[str, np.ndarray] | None = None
    gaps: dict[str, np.ndarray] = field(default_factory=dict)
    groups: list[tuple[str, str, str, float]] = field(default_factory=list)
    summary: list[dict] = field(default_factory=list)
    ranktail: dict[str, list[tuple[int, float]]] = field(default_factory=dict)
    bands: list[analysis.BandCurve] = field(default_factory=list)


def group_records(records: Sequence[InteractionRecord]) -> dict[Period, list[InteractionRecord]]:
    by_period: dict[Period, list[InteractionRecord]] = defaultdict(list)
    for r in records:
        by_period[r.period].append(r)
    return by_period


def aggregate_period(
    by_period: dict[Period, list[InteractionRecord]],
    catalog: CityCatalog,
    period: Period,
    method: str = "median",
) -> AwarenessMatrix:
    """Matrix for ``period`` from records grouped by their own period.

    ``median`` takes the cellwise median over the calendar months of
    ``period`` (a single month is built directly); ``sum`` adds every record
    inside the period.
    """

    def build(p: Period) -> AwarenessMatrix:
        recs = [r for rp, rs in by_period.items() if rp.overlaps(p) for r in rs]
        return build_matrix(recs, catalog, p)

    if method == "sum":
        return build(period)
    months = period.months()
    if len(months) == 1:
        return build(period)
    return analysis.median_matrix([build(p) for p in months], period)


def _populations(catalog: CityCatalog, cities) -> list[float] | None:
    pops = [catalog[c].population for c in cities]
    return None if any(p is None for p in pops) else pops


def compute(cfg: RunConfig, catalog: CityCatalog, records: Sequence[InteractionRecord]) -> PipelineResult:
    analyzed = catalog.filter(DEFAULT_TIERS)
    if len(analyzed) < 2:
        raise ValidationError("need at least two analyzable cities")
    for pair in cfg.channel_pairs:
        for cid in pair:
            if cid not in analyzed:
                raise ConfigError(f"channel city {cid!r} is not an analyzed catalog city")
    spatial_cfg = cfg.spatial
    w = weight_matrix(analyzed, spatial_cfg)
    g = global_distance_matrix(analyzed, spatial_cfg)
    pops = _populations(catalog, analyzed.ids)
    by_period = group_records(records)

    matrices, period_reports = [], []
    for period in cfg.periods:
        m = aggregate_period(by_period, catalog, period, cfg.aggregation)
        require_valid(m)
        matrices.append(m)
        channel = tuple(channel_result(m, w, catalog, i, j) for i, j in cfg.channel_pairs)
        period_reports.append(
            PeriodReport(
                period=period,
                cities=m.cities,
                iai=awareness_index(m, "in", cfg.convention).values,
                oai=awareness_index(m, "out").values,
                siai=spatial_awareness_index(m, w, "in").values,
                soai=spatial_awareness_index(m, w, "out").values,
                gai=None if pops is None else gai_reference(m, g, pops).values,
                channel=channel,
                convention=cfg.convention,
            )
        )
    if pops is None:
        log.warning("population missing for some cities; GAI not reported")

    result = PipelineResult(analyzed, w, matrices, IndexReport(tuple(period_reports)))
    for pr, m in zip(period_reports, matrices):
        label = pr.period.label
        result.gaps[label] = pr.iai - pr.oai
        for kind in INDEX_FIELDS:
            if getattr(pr, kind) is None:
                continue
            vec = IndexVector(pr.cities, getattr(pr, kind), kind.upper(), pr.convention)
            for group, mean in analysis.group_mean(vec, catalog, "central_vs_tc").items():
                result.groups.append((label, kind, group, mean))
        dom = analysis.dominance_counts(m)
        r = None
        if pops is not None:
            try:
                r = analysis.pearson(pops, m.diagonal)
            except ValidationError:
                r = None
        result.summary.append({
            "period": label,
            "n": m.n,
            "count_over_target": dom.count_over_target,
            "count_over_self": dom.count_over_self,
            "total_offdiag": dom.total_offdiag,
            "share_over_target": dom.share_over_target,
            "share_over_self": dom.share_over_self,
            "population_local_r": r,
            "duplicates": m.duplicate_count,
        })
        result.ranktail[label] = analysis.rank_tail(m)

    if len(period_reports) >= 2:
        first, last = period_reports[0], period_reports[-1]
        result.deltas = {
            k: getattr(last, k) - getattr(first, k)
            for k in INDEX_FIELDS
            if getattr(first, k) is not None
        }
        for kind in ("SIAI", "SOAI"):
            curves = analysis.band_improvement(
                matrices[0], matrices[-1], w, catalog, spatial_cfg, cfg.thresholds, kind
            )
            result.bands.extend(curves.values())
    return result


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"non-finite value in report: {x}")
    text = f"{x:.6f}"
    return text[1:] if text == "-0.000000" else text


def _csv(path: Path, header: Sequence[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else _fmt(c) for c in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _pair_label(c: ChannelResult) -> str:
    return f"{c.pair[0]}-{c.pair[1]}"


def write_reports(result: PipelineResult, cfg: RunConfig) -> list[Path]:
    """Write the requested sections; returns the files written, in order."""
    out = cfg.output_path
    out.mkdir(parents=True, exist_ok=True)
    if cfg.output_format == "json":
        path = out / "report.json"
        path.write_text(
            json.dumps(_json_payload(result, cfg), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
        return [path]

    written = []
    sections = set(cfg.sections)
    reports = result.report.periods
    if "indices" in sections:
        for pr in reports:
            path = out / f"indices_{pr.period.label}.csv"
            rows = []
            for k, city in enumerate(pr.cities):
                rows.append([city] + [None if getattr(pr, f) is None else getattr(pr, f)[k] for f in INDEX_FIELDS])
            _csv(path, ("city",) + INDEX_FIELDS, rows)
            written.append(path)
        path = out / "gaps.csv"
        _csv(
            path,
            ("period", "city", "iai_minus_oai"),
            ([label, city, v] for label, vals in result.gaps.items()
             for city, v in zip(reports[0].cities, vals)),
        )
        written.append(path)
    if "deltas" in sections and result.deltas is not None:
        path = out / "deltas.csv"
        cities = reports[0].cities
        _csv(
            path,
            ("city",) + INDEX_FIELDS,
            ([city] + [result.deltas[f][k] if f in result.deltas else None for f in INDEX_FIELDS]
             for k, city in enumerate(cities)),
        )
        written.append(path)
    if "groups" in sections:
        path = out / "groups.csv"
        _csv(path, ("period", "kind", "group", "mean"), (list(g) for g in result.groups))
        written.append(path)
    if "summary" in sections:
        path = out / "summary.csv"
        header = tuple(result.summary[0].keys())
        _csv(path, header, ([s[h] for h in header] for s in result.summary))
        written.append(path)
    if "ranktail" in sections:
        for label, pairs in result.ranktail.items():
            path = out / f"ranktail_{label}.csv"
            _csv(path, ("rank", "value"), ([r, float(v)] for r, v in pairs))
            written.append(path)
    if "bands" in sections and result.bands:
        path = out / "bands.csv"
        rows = []
        for curve in result.bands:
            for t, d in zip(curve.thresholds, curve.deltas):
                rows.append([t, curve.group, curve.kind, d])
        _csv(path, ("threshold_h", "group", "kind", "delta"), rows)
        written.append(path)
    if "channel" in sections and cfg.channel_pairs:
        path = out / "channel.csv"
        rows = []
        for pr in reports:
            for c in pr.channel:
                rows.append([pr.period.label, _pair_label(c), c.ts_ij, c.ts_ji,
                             c.ts_combined, c.te_ij, c.te_ji, c.expected])
        _csv(path, ("period", "pair", "ts_ij", "ts_ji", "ts", "te_ij", "te_ji", "expected"), rows)
        written.append(path)
    return written


def _floats(values) -> list:
    return [None if v is None else float(v) for v in values]


def _json_payload(result: PipelineResult, cfg: RunConfig) -> dict:
    sections = set(cfg.sections)
    reports = result.report.periods
    payload: dict = {"cities": list(result.catalog.ids), "convention": cfg.convention}
    if "indices" in sections:
        payload["indices"] = {
            pr.period.label: {
                f: None if getattr(pr, f) is None else _floats(getattr(pr, f))
                for f in INDEX_FIELDS
            }
            for pr in reports
        }
        payload["gaps"] = {label: _floats(v) for label, v in result.gaps.items()}
    if "deltas" in sections and result.deltas is not None:
        payload["deltas"] = {f: _floats(v) for f, v in result.deltas.items()}
    if "groups" in sections:
        payload["groups"] = [
            {"period": p, "kind": k, "group": g, "mean": float(m)} for p, k, g, m in result.groups
        ]
    if "summary" in sections:
        payload["summary"] = [
            {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in s.items()}
            for s in result.summary
        ]
    if "ranktail" in sections:
        payload["ranktail"] = {
            label: [[r, float(v)] for r, v in pairs] for label, pairs in result.ranktail.items()
        }
    if "bands" in sections and result.bands:
        payload["bands"] = [
            {"group": c.group, "kind": c.kind, "thresholds": list(c.thresholds), "deltas": list(c.deltas)}
            for c in result.bands
        ]
    if "channel" in sections and cfg.channel_pairs:
        payload["channel"] = [
            {
                "period": pr.period.label,
                "pair": list(c.pair),
                "ts_ij": c.ts_ij,
                "ts_ji": c.ts_ji,
                "ts": c.ts_combined,
                "te_ij": c.te_ij,
                "te_ji": c.te_ji,
                "expected": c.expected,
                "zero_share": c.zero_share,
            }
            for pr in reports
            for c in pr.channel
        ]
    return payload


def run_pipeline(cfg: RunConfig) -> tuple[PipelineResult, list[Path]]:
    catalog = load_catalog(cfg.catalog_path)
    records = load_records(cfg.records_path, catalog)
    result = compute(cfg, catalog, records)
    return result, write_reports(result, cfg)
