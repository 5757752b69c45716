"""Experiment harness: batch studies over random networks plus a thin
command line around the library.

Every study is driven by an ExperimentSpec and a base seed; instance i
always draws from a child generator keyed (seed, i), so runs are
reproducible row for row no matter how instances are dispatched. CSV
files are the single source of truth; charts are rendered from them
and never parsed back.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import click
import numpy as np

from .auxgraph import build_auxiliary
from .backpressure import (
    DynamicEvery,
    Fixed,
    SCHEDULER_COMPONENTS,
    SCHEDULER_WHOLE_GENERAL,
    SimConfig,
    run,
    stability_sweep,
)
from .capacity import FlowVector, lambda_extension, lb_bound, mu_extension
from .errors import (
    GuardViolationError,
    MalformedInputError,
    NoEdgesError,
    SectornetError,
)
from .matching import warm_up
from .netgen import (
    ConnectivityGraph,
    grid_network,
    load_network,
    random_geometric,
    save_network,
    theta_threshold,
)
from .optimizer import brute_force_opt, brute_force_search_size, sectorize_network
from .sectorization import (
    even_homogeneous,
    sectorization_from_json,
    sectorization_to_json,
    unsectorized,
)

EXPERIMENT_KINDS = (
    "theta-cdf",
    "gain-sweep",
    "lb-sweep",
    "gain-cdf",
    "grid-capacity",
    "mwm-timing",
)

DEFAULT_INSTANCES = 100


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    instances: int = DEFAULT_INSTANCES
    n_values: tuple[int, ...] = (60,)
    range_values: tuple[float, ...] = (0.3,)
    k_values: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8)
    phi_values: tuple[float, ...] = (10.0,)
    seed: int = 0
    out_dir: str = "."

    def __post_init__(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.instances < 1:
            raise ValueError("instance count must be >= 1")
        for grid_name in ("n_values", "range_values", "k_values", "phi_values"):
            if not getattr(self, grid_name):
                raise ValueError(f"{grid_name} must be nonempty")


def instance_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for one instance, stable under any dispatch order."""
    return np.random.default_rng(np.random.SeedSequence((seed, index)))


def generate_flows(
    graph: ConnectivityGraph, phi: float, seed: int | np.random.Generator
) -> FlowVector:
    """Uniform per-edge demands in [1, phi], scaled to unit Euclidean
    norm. The max/min ratio never exceeds phi."""
    if phi < 1.0:
        raise ValueError("phi must be >= 1")
    if not graph.edges:
        raise NoEdgesError("flow generation needs at least one edge")
    rng = (
        seed
        if isinstance(seed, np.random.Generator)
        else np.random.default_rng(seed)
    )
    raw = rng.uniform(1.0, phi, len(graph.edges))
    scaled = raw / np.linalg.norm(raw)
    return FlowVector.from_undirected(tuple(float(v) for v in scaled))


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def theta_cdf_rows(spec: ExperimentSpec) -> list[tuple]:
    rows: list[tuple] = []
    for n in spec.n_values:
        for r in spec.range_values:
            samples = []
            for i in range(spec.instances):
                rng = instance_rng(spec.seed, i)
                _, g = random_geometric(n, r, seed=int(rng.integers(2**63)))
                theta = theta_threshold(g)
                if math.isfinite(theta):
                    samples.append(theta)
            samples.sort()
            for rank, theta in enumerate(samples, start=1):
                rows.append((n, r, rank, theta))
    return rows


def _instance_gains(
    graph: ConnectivityGraph, flows: FlowVector, k_values: Sequence[int]
) -> dict[int, float]:
    base_aux = build_auxiliary(graph, unsectorized(graph))
    mu_base, _ = mu_extension(base_aux, flows)
    gains: dict[int, float] = {}
    for k in k_values:
        result = sectorize_network(graph, flows, k)
        g_mu = result.mu_pi / mu_base
        if g_mu > k * (1.0 + 1e-12):
            raise RuntimeError(
                f"inverse-load gain {g_mu} exceeded the sector cap {k}"
            )
        gains[k] = g_mu
    return gains


def gain_sweep_rows(spec: ExperimentSpec) -> list[tuple]:
    rows: list[tuple] = []
    for n in spec.n_values:
        for r in spec.range_values:
            for phi in spec.phi_values:
                per_k: dict[int, list[float]] = {k: [] for k in spec.k_values}
                for i in range(spec.instances):
                    rng = instance_rng(spec.seed, i)
                    _, g = random_geometric(n, r, seed=int(rng.integers(2**63)))
                    if not g.edges:
                        continue
                    flows = generate_flows(g, phi, rng)
                    for k, g_mu in _instance_gains(g, flows, spec.k_values).items():
                        per_k[k].append(g_mu)
                for k in spec.k_values:
                    vals = per_k[k]
                    if not vals:
                        continue
                    mean = sum(vals) / len(vals)
                    if len(vals) > 1:
                        var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
                        stderr = math.sqrt(var / len(vals))
                    else:
                        stderr = 0.0
                    rows.append((n, r, phi, k, mean, stderr, len(vals)))
    return rows


def gain_cdf_rows(spec: ExperimentSpec) -> list[tuple]:
    rows: list[tuple] = []
    for n in spec.n_values:
        for r in spec.range_values:
            for phi in spec.phi_values:
                for k in spec.k_values:
                    samples = []
                    for i in range(spec.instances):
                        rng = instance_rng(spec.seed, i)
                        _, g = random_geometric(
                            n, r, seed=int(rng.integers(2**63))
                        )
                        if not g.edges:
                            continue
                        flows = generate_flows(g, phi, rng)
                        result = sectorize_network(g, flows, k)
                        base_aux = build_auxiliary(g, unsectorized(g))
                        mu_base, _ = mu_extension(base_aux, flows)
                        samples.append(result.mu_pi / mu_base)
                    samples.sort()
                    for rank, g_mu in enumerate(samples, start=1):
                        rows.append((n, r, phi, k, rank, g_mu))
    return rows


LB_BRUTE_FORCE_BUDGET = 2000


def lb_sweep_rows(spec: ExperimentSpec) -> list[tuple]:
    rows: list[tuple] = []
    for n in spec.n_values:
        for r in spec.range_values:
            for phi in spec.phi_values:
                for k in spec.k_values:
                    for i in range(spec.instances):
                        rng = instance_rng(spec.seed, i)
                        _, g = random_geometric(
                            n, r, seed=int(rng.integers(2**63))
                        )
                        if not g.edges:
                            continue
                        flows = generate_flows(g, phi, rng)
                        result = sectorize_network(g, flows, k)
                        lb = lb_bound(result.mu_pi, flows)
                        if lb > 1.0 + 1e-12:
                            raise RuntimeError(f"lower bound {lb} exceeds 1")
                        ratio = ""
                        if (
                            g.n_nodes <= 8
                            and brute_force_search_size(g, k)
                            <= LB_BRUTE_FORCE_BUDGET
                        ):
                            try:
                                report = lambda_extension(
                                    build_auxiliary(g, result.sigma),
                                    flows,
                                    vertex_limit=20,
                                )
                                _, lam_star = brute_force_opt(
                                    g, flows, k, vertex_limit=20
                                )
                                if report.exact:
                                    ratio = repr(float(report.lam) / lam_star)
                            except GuardViolationError:
                                ratio = ""
                        rows.append((n, r, phi, k, i, lb, ratio))
    return rows


GRID_ALPHA_DEFAULT = (
    0.004, 0.006, 0.008, 0.010, 0.012, 0.014, 0.017, 0.020, 0.024, 0.028
)


def grid_capacity_rows(
    rows_cols: tuple[int, int],
    alphas: Sequence[float],
    horizon: int,
    seed: int,
    sectors: int = 2,
) -> tuple[list[tuple], dict[str, float | None]]:
    _, g = grid_network(rows_cols[0], rows_cols[1], with_diagonals=True)
    policies = {
        "unsectorized": unsectorized(g),
        f"even-{sectors}": even_homogeneous(g, sectors),
    }
    out: list[tuple] = []
    knees: dict[str, float | None] = {}
    for name, sigma in policies.items():
        sweep = stability_sweep(
            g, sigma, list(alphas), horizon=horizon, seed=seed
        )
        knees[name] = sweep.knee
        for alpha, backlog, slope in zip(
            sweep.alphas, sweep.final_backlogs, sweep.tail_slopes
        ):
            out.append(
                (name, alpha, backlog, slope, int(alpha == sweep.knee))
            )
    return out, knees


def mwm_timing_rows(
    rows_cols: tuple[int, int],
    alphas: Sequence[float],
    horizon: int,
    seed: int,
    sectors: int = 2,
) -> list[tuple]:
    _, g = grid_network(rows_cols[0], rows_cols[1], with_diagonals=True)
    sigma = even_homogeneous(g, sectors)
    out: list[tuple] = []
    for scheduler in (SCHEDULER_COMPONENTS, SCHEDULER_WHOLE_GENERAL):
        sweep = stability_sweep(
            g,
            sigma,
            list(alphas),
            horizon=horizon,
            seed=seed,
            scheduler=scheduler,
        )
        for alpha, seconds in zip(sweep.alphas, sweep.mwm_seconds):
            out.append((scheduler, alpha, seconds))
    return out


CHART_LAYOUTS: dict[str, dict] = {
    "theta-cdf": {
        "x": "theta_degrees",
        "y": "__cdf__",
        "series": ("n_nodes", "comm_range"),
        "value": "theta_degrees",
        "x_label": "threshold beamwidth (degrees)",
        "y_label": "empirical CDF",
    },
    "gain-sweep": {
        "x": "sectors",
        "y": "mean_g_mu",
        "series": ("n_nodes", "comm_range", "phi"),
        "x_label": "sectors per node",
        "y_label": "mean inverse-load gain",
    },
    "gain-cdf": {
        "x": "g_mu",
        "y": "__cdf__",
        "series": ("n_nodes", "comm_range", "phi", "sectors"),
        "value": "g_mu",
        "x_label": "inverse-load gain",
        "y_label": "empirical CDF",
    },
    "lb-sweep": {
        "x": "lb",
        "y": "__cdf__",
        "series": ("n_nodes", "comm_range", "phi", "sectors"),
        "value": "lb",
        "x_label": "guaranteed fraction of optimum",
        "y_label": "empirical CDF",
    },
    "grid-capacity": {
        "x": "alpha",
        "y": "final_backlog",
        "series": ("policy",),
        "x_label": "arrival rate per commodity",
        "y_label": "final total backlog (packets)",
    },
    "mwm-timing": {
        "x": "alpha",
        "y": "mwm_seconds",
        "series": ("scheduler",),
        "x_label": "arrival rate per commodity",
        "y_label": "cumulative scheduling time (s)",
    },
    "trace": {
        "x": "slot",
        "y": "total_backlog",
        "series": (),
        "x_label": "slot",
        "y_label": "total backlog (packets)",
    },
}

CSV_HEADERS: dict[str, tuple[str, ...]] = {
    "theta-cdf": ("n_nodes", "comm_range", "rank", "theta_degrees"),
    "gain-sweep": (
        "n_nodes", "comm_range", "phi", "sectors",
        "mean_g_mu", "stderr_g_mu", "instances",
    ),
    "gain-cdf": ("n_nodes", "comm_range", "phi", "sectors", "rank", "g_mu"),
    "lb-sweep": (
        "n_nodes", "comm_range", "phi", "sectors", "instance", "lb", "lam_ratio",
    ),
    "grid-capacity": ("policy", "alpha", "final_backlog", "tail_slope", "is_knee"),
    "mwm-timing": ("scheduler", "alpha", "mwm_seconds"),
}

SVG_WIDTH = 640
SVG_HEIGHT = 420
SVG_MARGIN = 56
SERIES_COLORS = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#17becf", "#7f7f7f",
)


def _scale(lo: float, hi: float, v: float, out_lo: float, out_hi: float) -> float:
    if hi == lo:
        return (out_lo + out_hi) / 2.0
    return out_lo + (v - lo) * (out_hi - out_lo) / (hi - lo)


def render_line_chart(
    series: dict[str, list[tuple[float, float]]],
    x_label: str,
    y_label: str,
    title: str,
) -> str:
    """Self-contained SVG line chart: one polyline per series plus
    axes, tick labels, and a legend."""
    if not series or all(not pts for pts in series.values()):
        raise MalformedInputError("chart needs at least one nonempty series")
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    left, right = SVG_MARGIN, SVG_WIDTH - 24
    top, bottom = 40, SVG_HEIGHT - SVG_MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" '
        f'height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<text x="{SVG_WIDTH / 2}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" '
        'stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" '
        'stroke="black"/>',
        f'<text x="{(left + right) / 2}" y="{SVG_HEIGHT - 14}" '
        'text-anchor="middle" font-family="sans-serif" font-size="12">'
        f"{x_label}</text>",
        f'<text x="16" y="{(top + bottom) / 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {(top + bottom) / 2})">{y_label}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        px = _scale(x_lo, x_hi, xv, left, right)
        py = _scale(y_lo, y_hi, yv, bottom, top)
        parts.append(
            f'<text x="{px:.1f}" y="{bottom + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{xv:.4g}</text>'
        )
        parts.append(
            f'<text x="{left - 6}" y="{py + 3:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{yv:.4g}</text>'
        )
    for idx, (name, pts) in enumerate(series.items()):
        color = SERIES_COLORS[idx % len(SERIES_COLORS)]
        coords = " ".join(
            f"{_scale(x_lo, x_hi, x, left, right):.1f},"
            f"{_scale(y_lo, y_hi, y, bottom, top):.1f}"
            for x, y in sorted(pts)
        )
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{coords}"/>'
        )
        ly = top + 14 * idx
        parts.append(
            f'<line x1="{right - 150}" y1="{ly}" x2="{right - 130}" '
            f'y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{right - 124}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="10">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def chart_from_csv(csv_path: str, kind: str, out_path: str) -> None:
    """Group a study CSV into series per the kind's layout and render
    the SVG chart."""
    if kind not in CHART_LAYOUTS:
        raise MalformedInputError(f"no chart layout for kind {kind!r}")
    layout = CHART_LAYOUTS[kind]
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        records = list(reader)
    if not records:
        raise MalformedInputError(f"{csv_path} has no data rows")
    needed = [layout["x"]] + list(layout["series"])
    if layout["y"] != "__cdf__":
        needed.append(layout["y"])
    else:
        needed.append(layout["value"])
    for col in needed:
        if col not in records[0]:
            raise MalformedInputError(f"{csv_path} lacks column {col!r}")
    groups: dict[str, list[dict]] = {}
    for rec in records:
        key = (
            ", ".join(f"{c}={rec[c]}" for c in layout["series"])
            or "series"
        )
        groups.setdefault(key, []).append(rec)
    series: dict[str, list[tuple[float, float]]] = {}
    for name, recs in groups.items():
        if layout["y"] == "__cdf__":
            vals = sorted(float(r[layout["value"]]) for r in recs)
            pts = [
                (v, (i + 1) / len(vals)) for i, v in enumerate(vals)
            ]
        else:
            pts = [
                (float(r[layout["x"]]), float(r[layout["y"]])) for r in recs
            ]
        series[name] = pts
    svg = render_line_chart(
        series,
        x_label=layout["x_label"],
        y_label=layout["y_label"],
        title=kind,
    )
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(svg)
        fh.write("\n")


def _fail(exc: Exception) -> "SystemExit":
    code = 3 if isinstance(exc, GuardViolationError) else 2
    click.echo(f"error: {exc}", err=True)
    return SystemExit(code)


def _guarded(fn: Callable[[], None]) -> None:
    try:
        fn()
    except (SectornetError, ValueError, OSError) as exc:
        raise _fail(exc) from exc


@click.group()
@click.option("--seed", default=0, show_default=True, help="Base RNG seed.")
@click.option(
    "--instances",
    default=DEFAULT_INSTANCES,
    show_default=True,
    help="Monte Carlo instances per cell.",
)
@click.option(
    "--out-dir",
    default=".",
    show_default=True,
    help="Directory for CSV and chart outputs.",
)
@click.pass_context
def main(ctx: click.Context, seed: int, instances: int, out_dir: str) -> None:
    """Sector-layout capacity studies and scheduling simulations."""
    ctx.obj = {"seed": seed, "instances": instances, "out_dir": out_dir}


def _spec(ctx: click.Context, kind: str, **overrides) -> ExperimentSpec:
    base = ExperimentSpec(
        kind=kind,
        instances=ctx.obj["instances"],
        seed=ctx.obj["seed"],
        out_dir=ctx.obj["out_dir"],
    )
    return replace(base, **overrides)


def _emit(spec: ExperimentSpec, rows: list[tuple]) -> str:
    path = f"{spec.out_dir}/{spec.kind}.csv"
    _write_csv(path, CSV_HEADERS[spec.kind], rows)
    click.echo(f"wrote {len(rows)} rows to {path}")
    return path


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise MalformedInputError(f"bad float list {text!r}") from exc


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise MalformedInputError(f"bad int list {text!r}") from exc


@main.command("gen-network")
@click.option("--nodes", type=int, default=None, help="Random placement size.")
@click.option("--range", "comm_range", type=float, default=0.1, show_default=True)
@click.option("--grid", "grid_shape", default=None, help="RxC lattice instead.")
@click.option("--diagonals", is_flag=True, help="Add lattice diagonals.")
@click.option("--out", "out_path", required=True)
@click.pass_context
def gen_network_cmd(ctx, nodes, comm_range, grid_shape, diagonals, out_path):
    """Generate a network file (random placement or lattice)."""

    def go():
        if (nodes is None) == (grid_shape is None):
            raise MalformedInputError("pass exactly one of --nodes or --grid")
        if grid_shape is not None:
            try:
                rows, cols = (int(v) for v in grid_shape.lower().split("x"))
            except ValueError as exc:
                raise MalformedInputError(
                    f"bad grid shape {grid_shape!r}, expected RxC"
                ) from exc
            geometry, graph = grid_network(rows, cols, with_diagonals=diagonals)
        else:
            geometry, graph = random_geometric(
                nodes, comm_range, seed=ctx.obj["seed"]
            )
        save_network(out_path, geometry, graph)
        click.echo(
            f"wrote {graph.n_nodes} nodes / {len(graph.edges)} edges to {out_path}"
        )

    _guarded(go)


@main.command("sectorize")
@click.option("--network", "network_path", required=True)
@click.option("--flows", "flows_path", default=None)
@click.option("--phi", type=float, default=10.0, show_default=True)
@click.option("--sectors", type=int, required=True)
@click.option("--epsilon", type=float, default=None)
@click.option("--out", "out_path", required=True)
@click.pass_context
def sectorize_cmd(ctx, network_path, flows_path, phi, sectors, epsilon, out_path):
    """Search per-node sector layouts for a network and report gains."""

    def go():
        import json

        from .capacity import flows_from_json

        _, graph = load_network(network_path)
        if flows_path is not None:
            with open(flows_path, "r", encoding="utf-8") as fh:
                flows = flows_from_json(graph, fh.read())
        else:
            flows = generate_flows(graph, phi, ctx.obj["seed"])
        result = sectorize_network(graph, flows, sectors, epsilon=epsilon)
        base_aux = build_auxiliary(graph, unsectorized(graph))
        mu_base, _ = mu_extension(base_aux, flows)
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(sectorization_to_json(result.sigma), fh, indent=2)
            fh.write("\n")
        click.echo(f"mu_pi={result.mu_pi!r}")
        click.echo(f"mu_base={mu_base!r}")
        click.echo(f"g_mu={result.mu_pi / mu_base!r}")
        click.echo(f"lb={lb_bound(result.mu_pi, flows)!r}")
        click.echo(f"wrote layout to {out_path}")

    _guarded(go)


@main.command("theta-cdf")
@click.option("--n-grid", default="20,40,60", show_default=True)
@click.option("--range", "comm_range", type=float, default=0.1, show_default=True)
@click.pass_context
def theta_cdf_cmd(ctx, n_grid, comm_range):
    """Sample the narrowest-gap threshold over random networks."""

    def go():
        spec = _spec(
            ctx,
            "theta-cdf",
            n_values=_parse_ints(n_grid),
            range_values=(comm_range,),
        )
        _emit(spec, theta_cdf_rows(spec))

    _guarded(go)


@main.command("gain-sweep")
@click.option("--n-grid", default="60", show_default=True)
@click.option("--range-grid", default="0.3", show_default=True)
@click.option("--k-grid", default="2,3,4,5,6,7,8", show_default=True)
@click.option("--phi-grid", default="10", show_default=True)
@click.pass_context
def gain_sweep_cmd(ctx, n_grid, range_grid, k_grid, phi_grid):
    """Mean inverse-load gain per sector budget."""

    def go():
        spec = _spec(
            ctx,
            "gain-sweep",
            n_values=_parse_ints(n_grid),
            range_values=_parse_floats(range_grid),
            k_values=_parse_ints(k_grid),
            phi_values=_parse_floats(phi_grid),
        )
        _emit(spec, gain_sweep_rows(spec))

    _guarded(go)


@main.command("gain-cdf")
@click.option("--n-grid", default="60", show_default=True)
@click.option("--range-grid", default="0.3", show_default=True)
@click.option("--k-grid", default="4", show_default=True)
@click.option("--phi-grid", default="10", show_default=True)
@click.pass_context
def gain_cdf_cmd(ctx, n_grid, range_grid, k_grid, phi_grid):
    """Distribution of per-instance inverse-load gains."""

    def go():
        spec = _spec(
            ctx,
            "gain-cdf",
            n_values=_parse_ints(n_grid),
            range_values=_parse_floats(range_grid),
            k_values=_parse_ints(k_grid),
            phi_values=_parse_floats(phi_grid),
        )
        _emit(spec, gain_cdf_rows(spec))

    _guarded(go)


@main.command("lb-sweep")
@click.option("--n-grid", default="8", show_default=True)
@click.option("--range-grid", default="0.5", show_default=True)
@click.option("--k-grid", default="2", show_default=True)
@click.option("--phi-grid", default="10", show_default=True)
@click.pass_context
def lb_sweep_cmd(ctx, n_grid, range_grid, k_grid, phi_grid):
    """Per-instance guaranteed fraction of the optimal layout."""

    def go():
        spec = _spec(
            ctx,
            "lb-sweep",
            n_values=_parse_ints(n_grid),
            range_values=_parse_floats(range_grid),
            k_values=_parse_ints(k_grid),
            phi_values=_parse_floats(phi_grid),
        )
        _emit(spec, lb_sweep_rows(spec))

    _guarded(go)


@main.command("grid-capacity")
@click.option("--grid", "grid_shape", default="4x4", show_default=True)
@click.option("--alpha-grid", default=None, help="Comma list; default preset.")
@click.option("--horizon", type=int, default=200_000, show_default=True)
@click.option("--sectors", type=int, default=2, show_default=True)
@click.pass_context
def grid_capacity_cmd(ctx, grid_shape, alpha_grid, horizon, sectors):
    """Stability knees of a lattice, split versus unsplit."""

    def go():
        warm_up()
        rows, cols = (int(v) for v in grid_shape.lower().split("x"))
        alphas = (
            GRID_ALPHA_DEFAULT if alpha_grid is None else _parse_floats(alpha_grid)
        )
        out, knees = grid_capacity_rows(
            (rows, cols), alphas, horizon, ctx.obj["seed"], sectors
        )
        path = f"{ctx.obj['out_dir']}/grid-capacity.csv"
        _write_csv(path, CSV_HEADERS["grid-capacity"], out)
        for name, knee in knees.items():
            click.echo(f"knee[{name}]={knee!r}")
        click.echo(f"wrote {len(out)} rows to {path}")

    _guarded(go)


@main.command("mwm-timing")
@click.option("--grid", "grid_shape", default="4x4", show_default=True)
@click.option("--alpha-grid", default=None)
@click.option("--horizon", type=int, default=20_000, show_default=True)
@click.option("--sectors", type=int, default=2, show_default=True)
@click.pass_context
def mwm_timing_cmd(ctx, grid_shape, alpha_grid, horizon, sectors):
    """Cumulative scheduling time: per-component path vs whole-graph."""

    def go():
        warm_up()
        rows, cols = (int(v) for v in grid_shape.lower().split("x"))
        alphas = (
            (0.008, 0.012) if alpha_grid is None else _parse_floats(alpha_grid)
        )
        out = mwm_timing_rows(
            (rows, cols), alphas, horizon, ctx.obj["seed"], sectors
        )
        path = f"{ctx.obj['out_dir']}/mwm-timing.csv"
        _write_csv(path, CSV_HEADERS["mwm-timing"], out)
        click.echo(f"wrote {len(out)} rows to {path}")

    _guarded(go)


@main.command("simulate")
@click.option("--network", "network_path", required=True)
@click.option(
    "--sigma",
    "sigma_arg",
    default="unsectorized",
    show_default=True,
    help="Layout: file path, 'unsectorized', 'even:K', or 'dynamic:K'.",
)
@click.option("--alpha", type=float, required=True)
@click.option("--slots", type=int, required=True)
@click.option("--trace", "trace_path", required=True)
@click.pass_context
def simulate_cmd(ctx, network_path, sigma_arg, alpha, slots, trace_path):
    """Run the queue simulator and write its per-slot trace."""

    def go():
        import json

        from .capacity import ArrivalMatrix

        warm_up()
        _, graph = load_network(network_path)
        policy = Fixed()
        if sigma_arg == "unsectorized":
            sigma = unsectorized(graph)
        elif sigma_arg.startswith("even:"):
            sigma = even_homogeneous(graph, int(sigma_arg.split(":", 1)[1]))
        elif sigma_arg.startswith("dynamic:"):
            k = int(sigma_arg.split(":", 1)[1])
            sigma = even_homogeneous(graph, k)
            policy = DynamicEvery()
        else:
            with open(sigma_arg, "r", encoding="utf-8") as fh:
                sigma = sectorization_from_json(json.load(fh))
        config = SimConfig(
            horizon=slots,
            alpha=ArrivalMatrix.uniform(graph.n_nodes, alpha),
            policy=policy,
            seed=ctx.obj["seed"],
        )
        trace = run(config, graph, sigma)
        trace.write_csv(trace_path)
        click.echo(
            f"final backlog {int(trace.total_backlog[-1])}, "
            f"tail slope {trace.tail_slope()!r}, trace in {trace_path}"
        )

    _guarded(go)


@main.command("chart")
@click.option("--csv", "csv_path", required=True)
@click.option(
    "--kind",
    type=click.Choice(sorted(CHART_LAYOUTS)),
    required=True,
)
@click.option("--out", "out_path", required=True)
def chart_cmd(csv_path, kind, out_path):
    """Render a study CSV as a self-contained SVG chart."""

    def go():
        chart_from_csv(csv_path, kind, out_path)
        click.echo(f"wrote {out_path}")

    _guarded(go)


if __name__ == "__main__":
    main(prog_name="sectornet")
