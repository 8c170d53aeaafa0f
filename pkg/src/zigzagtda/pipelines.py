"""Experiment drivers: configuration, run reports, and SVG rendering.

A pipeline reads one INI-style config (plus CLI overrides), funnels all
randomness through a single seeded generator, and produces a RunReport whose
JSON serialization is byte-deterministic for a given config and seed.
"""

from __future__ import annotations

import configparser
import json
import time
from dataclasses import dataclass, field, fields

import numpy as np

from . import filters, homology, metric, zigzag
from .complexes import weak_witness_complex
from .metric import DistanceMatrix

PIPELINE_KINDS = ("bootstrap", "threshold", "witness", "pairwise")

_RETRY_CAP = 1000  # rejection-sampling attempts per Betti-filtered stage


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


@dataclass
class ExperimentConfig:
    """Everything needed to rerun one experiment deterministically."""

    kind: str
    seed: int = 0
    # input source: exactly one of (shape, input_path, matrix_path)
    shape: str | None = None
    n_points: int | None = None
    input_path: str | None = None
    matrix_path: str | None = None
    # shared construction parameters
    epsilon: float | None = None
    max_dim: int = 2
    dims: tuple[int, ...] = (0, 1)
    sequence: str = "union"  # union | intersection
    keep_half_integral: bool = False
    # stage schedules
    stages: int | None = None
    sample_size: int | None = None
    sizes: tuple[int, ...] | None = None
    # threshold pipeline
    filter_name: str | None = None  # codensity | kde
    schedule: tuple[float, ...] | None = None
    percent: float | None = None
    subsample: int | None = None
    # witness / pairwise pipelines
    landmark_size: int | None = None
    accept_betti: tuple[int, ...] | None = None
    exclude_landmark_witnesses: bool = False
    criterion: dict[int, list] | None = None

    def echo(self) -> dict:
        """JSON-safe dump of the non-default settings, for the report."""
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None or v == f.default:
                continue
            if isinstance(v, tuple):
                v = list(v)
            elif isinstance(v, dict):
                v = {str(k): [list(iv.endpoints()) for iv in ivs]
                     for k, ivs in v.items()}
            out[f.name] = v
        return out


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())

def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())

def _parse_sizes(text: str) -> tuple[int, ...]:
    """Either an explicit list `2, 5, 9` or a range `2:153[:step]`."""
    text = text.strip()
    if ":" in text:
        parts = [int(t) for t in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        if len(parts) != 3:
            raise ConfigError(f"bad size range {text!r}")
        return tuple(range(parts[0], parts[1], parts[2]))
    return _parse_int_list(text)

def _parse_intervals(text: str) -> list:
    """`0:1, 1:1` -> [Interval(0,1), Interval(1,1)] (half-integers allowed)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        s, e = part.split(":")
        out.append(zigzag.interval(float(s), float(e)))
    return out


_INPUT_KEYS = {
    "shape": str, "n": int, "file": str, "matrix": str, "seed": int,
}
_PIPE_KEYS = {
    "epsilon": float, "max_dim": int, "dims": _parse_int_list,
    "sequence": str, "keep_half_integral": lambda s: s.lower() == "true",
    "stages": int, "sample_size": int, "sizes": _parse_sizes,
    "filter": str, "schedule": _parse_float_list, "percent": float,
    "subsample": int, "landmark_size": int, "accept_betti": _parse_int_list,
    "exclude_landmark_witnesses": lambda s: s.lower() == "true",
}
_KEY_TO_FIELD = {"n": "n_points", "file": "input_path", "matrix": "matrix_path",
                 "filter": "filter_name"}


def load_config(path, kind: str) -> ExperimentConfig:
    """Read the `[input]` and `[<kind>]` sections of an INI config file."""
    if kind not in PIPELINE_KINDS:
        raise ConfigError(f"unknown pipeline kind {kind!r}")
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    cfg = ExperimentConfig(kind=kind)
    if parser.has_section("input"):
        for key, raw in parser.items("input"):
            if key not in _INPUT_KEYS:
                raise ConfigError(f"unknown [input] key {key!r}")
            setattr(cfg, _KEY_TO_FIELD.get(key, key), _INPUT_KEYS[key](raw))
    if parser.has_section(kind):
        for key, raw in parser.items(kind):
            if key.startswith("criterion_dim"):
                p = int(key[len("criterion_dim"):])
                cfg.criterion = cfg.criterion or {}
                cfg.criterion[p] = _parse_intervals(raw)
                continue
            if key not in _PIPE_KEYS:
                raise ConfigError(f"unknown [{kind}] key {key!r}")
            try:
                value = _PIPE_KEYS[key](raw)
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
            setattr(cfg, _KEY_TO_FIELD.get(key, key), value)
    return cfg


@dataclass
class RunReport:
    """Result of one pipeline run.

    `timings` is informational only and deliberately excluded from the JSON
    serialization so reruns are byte-identical.
    """

    kind: str
    seed: int
    config: dict
    stage_sizes: list[int]
    betti: list[tuple[int, ...]]
    barcodes: dict[int, zigzag.Barcode]
    edges: list[tuple[int, int]] | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        entries = []
        for p in sorted(self.barcodes):
            entries.extend(self.barcodes[p].to_json_obj())
        obj = {
            "kind": self.kind,
            "seed": self.seed,
            "config": self.config,
            "stage_sizes": list(self.stage_sizes),
            "betti": [list(b) for b in self.betti],
            "barcodes": entries,
        }
        if self.edges is not None:
            obj["edges"] = [list(e) for e in self.edges]
        return obj

    def json_bytes(self) -> bytes:
        return (json.dumps(self.to_json_obj(), indent=2, sort_keys=True)
                + "\n").encode()


def _load_space(cfg: ExperimentConfig):
    """Resolve the configured input to (dm, cloud-or-None)."""
    sources = [cfg.shape is not None, cfg.input_path is not None,
               cfg.matrix_path is not None]
    if sum(sources) != 1:
        raise ConfigError("configure exactly one input: shape, file, or matrix")
    if cfg.matrix_path is not None:
        return metric.load_distance_matrix(cfg.matrix_path), None
    if cfg.input_path is not None:
        cloud = metric.load_point_cloud(cfg.input_path)
    else:
        if cfg.n_points is None:
            raise ConfigError("generator input needs n")
        cloud = metric.generate(cfg.shape, cfg.n_points, cfg.seed)
    return metric.distance_matrix(cloud), cloud


def _size_schedule(cfg: ExperimentConfig, size_field: str) -> tuple[int, ...]:
    if cfg.sizes is not None:
        sizes = cfg.sizes
    else:
        per_stage = getattr(cfg, size_field)
        if cfg.stages is None or per_stage is None:
            raise ConfigError(f"need either sizes or stages + {size_field}")
        sizes = (per_stage,) * cfg.stages
    if len(sizes) < 2:
        raise ConfigError("need at least 2 stages")
    return sizes


def _sequence_zigzag(cfg: ExperimentConfig, stage_sets, dm) -> dict:
    if cfg.epsilon is None:
        raise ConfigError("epsilon is required")
    if cfg.sequence == "union":
        run = zigzag.union_zigzag
    elif cfg.sequence == "intersection":
        run = zigzag.intersection_zigzag
    else:
        raise ConfigError(f"unknown sequence kind {cfg.sequence!r}")
    barcodes, timings = {}, {}
    for p in cfg.dims:
        t0 = time.perf_counter()
        barcodes[p] = run(stage_sets, dm, cfg.epsilon, cfg.max_dim, p,
                          keep_half_integral=cfg.keep_half_integral)
        timings[f"dim{p}"] = time.perf_counter() - t0
    return barcodes, timings


def _covering_betti(barcodes: dict, dims, n_stages: int) -> list[tuple]:
    return [tuple(barcodes[p].covering_count(p, j) for p in sorted(dims))
            for j in range(n_stages)]


def run_bootstrap(cfg: ExperimentConfig) -> RunReport:
    """Union (or intersection) zigzag over random subsamples of one cloud."""
    dm, _ = _load_space(cfg)
    sizes = _size_schedule(cfg, "sample_size")
    if max(sizes) > dm.n or min(sizes) < 1:
        raise ConfigError(f"sample sizes must lie in [1, {dm.n}]")
    rng = np.random.default_rng(cfg.seed)
    stage_sets = [tuple(sorted(int(i) for i in rng.choice(dm.n, size=s, replace=False)))
                  for s in sizes]
    barcodes, timings = _sequence_zigzag(cfg, stage_sets, dm)
    return RunReport(cfg.kind, cfg.seed, cfg.echo(), [len(s) for s in stage_sets],
                     _covering_betti(barcodes, cfg.dims, len(sizes)),
                     barcodes, timings=timings)


def _maxmin_subset(dm: DistanceMatrix, subset, k: int) -> tuple[int, ...]:
    """Max-min reduce a global index subset to k points (start at its first)."""
    sub = np.asarray(dm.submatrix(subset), dtype=float)
    sub = np.triu(sub, 1)
    order = metric.maxmin_landmarks(DistanceMatrix(sub + sub.T), k, 0)
    return tuple(sorted(subset[i] for i in order))


def run_threshold(cfg: ExperimentConfig) -> RunReport:
    """Zigzag over top-percent levelsets of a parameterized filter."""
    dm, cloud = _load_space(cfg)
    if not cfg.schedule or len(cfg.schedule) < 2:
        raise ConfigError("need a filter schedule with at least 2 values")
    if cfg.percent is None:
        raise ConfigError("percent is required")
    stage_sets = []
    for theta in cfg.schedule:
        if cfg.filter_name == "codensity":
            fv = filters.codensity(dm, int(theta))
        elif cfg.filter_name == "kde":
            if cloud is None:
                raise ConfigError("kde filter needs point coordinates")
            fv = filters.gaussian_kde(cloud, theta)
        else:
            raise ConfigError(f"unknown filter {cfg.filter_name!r}")
        level = filters.top_percent(fv, cfg.percent)
        if cfg.subsample is not None:
            if cfg.subsample > len(level):
                raise ConfigError(
                    f"subsample {cfg.subsample} exceeds levelset size {len(level)}")
            level = _maxmin_subset(dm, level, cfg.subsample)
        stage_sets.append(level)
    barcodes, timings = _sequence_zigzag(cfg, stage_sets, dm)
    return RunReport(cfg.kind, cfg.seed, cfg.echo(), [len(s) for s in stage_sets],
                     _covering_betti(barcodes, cfg.dims, len(stage_sets)),
                     barcodes, timings=timings)


def _draw_landmark_stages(cfg: ExperimentConfig, dm) -> tuple[list, list]:
    """Random landmark sets per stage, rejection-sampled against an optional
    Betti accept-filter; returns (stage sets, per-stage Betti tuples)."""
    sizes = _size_schedule(cfg, "landmark_size")
    if max(sizes) > dm.n or min(sizes) < 1:
        raise ConfigError(f"landmark sizes must lie in [1, {dm.n}]")
    rng = np.random.default_rng(cfg.seed)
    witnesses = tuple(range(dm.n))
    betti_depth = (len(cfg.accept_betti) - 1 if cfg.accept_betti
                   else max(cfg.dims))
    stage_sets, betti = [], []
    for s in sizes:
        for _ in range(_RETRY_CAP):
            lm = tuple(sorted(int(i) for i in rng.choice(dm.n, size=s, replace=False)))
            w = weak_witness_complex(dm, witnesses, lm, cfg.max_dim,
                                     exclude_landmark_witnesses=cfg.exclude_landmark_witnesses)
            b = homology.betti_numbers(w, betti_depth)
            if cfg.accept_betti is None or b == tuple(cfg.accept_betti):
                stage_sets.append(lm)
                betti.append(b)
                break
        else:
            raise RuntimeError(
                f"no landmark set of size {s} met the Betti filter "
                f"{tuple(cfg.accept_betti)} within {_RETRY_CAP} draws")
    return stage_sets, betti


def run_witness(cfg: ExperimentConfig) -> RunReport:
    """Biwitness zigzag over random landmark stages on one witness cloud."""
    dm, _ = _load_space(cfg)
    stage_sets, betti = _draw_landmark_stages(cfg, dm)
    witnesses = tuple(range(dm.n))
    barcodes, timings = {}, {}
    for p in cfg.dims:
        t0 = time.perf_counter()
        barcodes[p] = zigzag.bicomplex_zigzag(
            stage_sets, witnesses, dm, cfg.max_dim, p,
            keep_half_integral=cfg.keep_half_integral,
            exclude_landmark_witnesses=cfg.exclude_landmark_witnesses)
        timings[f"dim{p}"] = time.perf_counter() - t0
    return RunReport(cfg.kind, cfg.seed, cfg.echo(), [len(s) for s in stage_sets],
                     betti, barcodes, timings=timings)


def run_pairwise(cfg: ExperimentConfig) -> RunReport:
    """All-pairs 2-stage biwitness comparison against a criterion barcode."""
    dm, _ = _load_space(cfg)
    if not cfg.criterion:
        raise ConfigError("pairwise needs at least one criterion_dimP entry")
    stage_sets, betti = _draw_landmark_stages(cfg, dm)
    witnesses = tuple(range(dm.n))
    t0 = time.perf_counter()
    edges = zigzag.pairwise_compatibility_graph(
        stage_sets, witnesses, dm, cfg.max_dim, cfg.criterion,
        exclude_landmark_witnesses=cfg.exclude_landmark_witnesses)
    return RunReport(cfg.kind, cfg.seed, cfg.echo(), [len(s) for s in stage_sets],
                     betti, {}, edges=edges,
                     timings={"pairs": time.perf_counter() - t0})


RUNNERS = {
    "bootstrap": run_bootstrap,
    "threshold": run_threshold,
    "witness": run_witness,
    "pairwise": run_pairwise,
}


def run(cfg: ExperimentConfig) -> RunReport:
    return RUNNERS[cfg.kind](cfg)


# ---------------------------------------------------------------------------
# SVG rendering

def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def render_barcode_entries(entries, title: str = "") -> str:
    """Deterministic SVG barcode plot from JSON-style barcode entries
    (list of {"dimension": p, "intervals": [{"start", "end"}, ...]})."""
    left, right, top, row_h = 60.0, 600.0, 40.0, 14.0
    spans = [(e["dimension"], iv["start"], iv["end"])
             for e in entries for iv in e["intervals"]]
    hi = max([max(s, e) for _, s, e in spans] + [1.0])
    lo = 0.0

    def x(v):
        return left + (right - left) * (v - lo) / (hi - lo)

    lines = []
    y = top
    dims = sorted({e["dimension"] for e in entries})
    for p in dims:
        lines.append(f'<text x="10" y="{_fmt(y + 4)}" font-size="12" '
                     f'font-family="monospace">dim {p}</text>')
        rows = sorted((s, e) for q, s, e in spans if q == p)
        if not rows:
            y += row_h
        for s, e in rows:
            if s == e:
                lines.append(f'<circle cx="{_fmt(x(s))}" cy="{_fmt(y)}" r="3" '
                             f'fill="#1f4e79"/>')
            else:
                lines.append(f'<line x1="{_fmt(x(s))}" y1="{_fmt(y)}" '
                             f'x2="{_fmt(x(e))}" y2="{_fmt(y)}" '
                             f'stroke="#1f4e79" stroke-width="3"/>')
            y += row_h
        y += row_h  # gap between dimension groups
    height = y + 30
    axis_y = height - 22
    ticks = []
    for t in range(int(hi) + 1):
        ticks.append(f'<line x1="{_fmt(x(t))}" y1="{_fmt(axis_y - 4)}" '
                     f'x2="{_fmt(x(t))}" y2="{_fmt(axis_y + 4)}" stroke="#333"/>')
        ticks.append(f'<text x="{_fmt(x(t))}" y="{_fmt(axis_y + 16)}" '
                     f'font-size="10" font-family="monospace" '
                     f'text-anchor="middle">{t}</text>')
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="640" '
            f'height="{_fmt(height)}" viewBox="0 0 640 {_fmt(height)}">')
    body = [head,
            f'<text x="10" y="20" font-size="13" font-family="monospace">'
            f'{title}</text>',
            f'<line x1="{_fmt(left)}" y1="{_fmt(axis_y)}" x2="{_fmt(right)}" '
            f'y2="{_fmt(axis_y)}" stroke="#333"/>']
    body.extend(ticks)
    body.extend(lines)
    body.append("</svg>")
    return "\n".join(body) + "\n"


def render_barcode(barcode: zigzag.Barcode, title: str = "") -> str:
    """SVG plot of one Barcode: a horizontal line per interval, grouped by
    dimension, stage indices on the axis."""
    return render_barcode_entries(barcode.to_json_obj(), title=title)


def render_graph(n_nodes: int, edges, title: str = "") -> str:
    """SVG plot of the pairwise comparison graph: nodes on a circle."""
    import math
    cx, cy, r = 320.0, 200.0, 150.0
    pos = [(cx + r * math.cos(2 * math.pi * i / max(n_nodes, 1) - math.pi / 2),
            cy + r * math.sin(2 * math.pi * i / max(n_nodes, 1) - math.pi / 2))
           for i in range(n_nodes)]
    body = ['<svg xmlns="http://www.w3.org/2000/svg" width="640" height="400" '
            'viewBox="0 0 640 400">',
            f'<text x="10" y="20" font-size="13" font-family="monospace">'
            f'{title}</text>']
    for i, j in sorted(edges):
        body.append(f'<line x1="{_fmt(pos[i][0])}" y1="{_fmt(pos[i][1])}" '
                    f'x2="{_fmt(pos[j][0])}" y2="{_fmt(pos[j][1])}" '
                    f'stroke="#888"/>')
    for i, (px, py) in enumerate(pos):
        body.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="10" '
                    f'fill="#1f4e79"/>')
        body.append(f'<text x="{_fmt(px)}" y="{_fmt(py + 4)}" font-size="10" '
                    f'fill="#fff" font-family="monospace" '
                    f'text-anchor="middle">{i}</text>')
    body.append("</svg>")
    return "\n".join(body) + "\n"


def render_report(report_obj: dict) -> str:
    """SVG for a serialized RunReport: graph for pairwise, barcode otherwise."""
    title = f'{report_obj.get("kind", "barcode")} seed={report_obj.get("seed", "?")}'
    if "edges" in report_obj:
        return render_graph(len(report_obj.get("stage_sizes", [])),
                            [tuple(e) for e in report_obj["edges"]], title=title)
    return render_barcode_entries(report_obj.get("barcodes", []), title=title)
