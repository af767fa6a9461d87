"""Command-line entry point: experiment configs in, tables and figures out."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click
import numpy as np
import pandas as pd
from scipy import stats

from hilbert_lab import __version__, const
from hilbert_lab.boundary import beta_from_exponents, entropy_lower_bound, local_convexity_exponents, shape_exponent
from hilbert_lab.config.experiment import ExperimentConfig
from hilbert_lab.dynamics.flow import FlowState, curvature_scalar, flow_orbit, sample_states, transverse_frame
from hilbert_lab.dynamics.transport import (
    anosov_rates,
    axis_transport_curve,
    eta_estimate,
    periodic_transport_curve,
    transport_norm_curve,
)
from hilbert_lab.entropy import orbit_entropy, orbital_length_spectrum, ruelle_bound, volume_entropy
from hilbert_lab.geometry.domain import ConvexDomain, make_domain
from hilbert_lab.geometry.metric import MetricContext, finsler_norm, hilbert_distance, hilbert_distances
from hilbert_lab.group import (
    GeneratorFamily,
    chart_action,
    enumerate_conjugacy_classes,
    evaluate_word,
    fit_conic,
    generate_domain_hull,
    hull_invariance_gap,
    is_biproximal,
    make_family,
    periodic_lyapunov,
    translation_length,
)
from hilbert_lab.utils.errors import ConfigError, LabError, handle_lab_error
from hilbert_lab.utils.io import Provenance, config_hash, write_csv, write_metadata, write_svg
from hilbert_lab.utils.logging import ExperimentLogger, get_logger, setup_logging
from hilbert_lab.utils.svg import domain_figure, line_plot

logger = get_logger("main")

# Default sample counts of the commands that draw random states.
CURVATURE_STATES = 1000
ANOSOV_STATES = 100


@dataclass
class RunContext:
    """Everything a command handler needs: parsed config, outputs and randomness."""

    command: str
    config: ExperimentConfig
    provenance: Provenance
    output_dir: Path
    rng: np.random.Generator

    @cached_property
    def domain(self) -> ConvexDomain:
        return make_domain(self.config.domain)

    @cached_property
    def metric(self) -> MetricContext:
        return MetricContext(self.domain)

    @cached_property
    def family(self) -> GeneratorFamily:
        if not self.config.group:
            msg = f"Command {self.command} needs a group section"
            raise ConfigError(msg)
        return make_family(self.config.group)

    @property
    def threads(self) -> int:
        return self.config.run.threads

    def require(self, name: str) -> np.ndarray:
        value = getattr(self.config.experiment, name)
        if value is None:
            msg = f"experiment.{name} is required for {self.command}"
            raise ConfigError(msg)
        return np.asarray(value, dtype=float)

    def optional(self, name: str) -> Optional[np.ndarray]:
        value = getattr(self.config.experiment, name)
        return None if value is None else np.asarray(value, dtype=float)

    def samples(self, default: int) -> int:
        value = self.config.experiment.samples
        return default if value is None else value

    def csv(self, frame: pd.DataFrame, suffix: str = "") -> None:
        write_csv(self.output_dir / f"{self.command}{suffix}.csv", frame, self.provenance)

    def svg(self, text: str, suffix: str = "") -> None:
        write_svg(self.output_dir / f"{self.command}{suffix}.svg", text, self.provenance)

    def state(self) -> FlowState:
        return FlowState(self.require("x"), self.require("direction"))


Handler = Callable[[RunContext], Dict[str, Any]]
HANDLERS: Dict[str, Handler] = {}


def handler(name: str) -> Callable[[Handler], Handler]:
    def register(func: Handler) -> Handler:
        HANDLERS[name] = func
        return func

    return register


def _fit_line(x: np.ndarray, y: np.ndarray) -> tuple:
    fit = stats.linregress(x, y)
    return float(fit.slope), float(fit.intercept)


####################################################################################################
# METRIC AND FLOW
####################################################################################################


@handler("distance")
def _distance(run: RunContext) -> Dict[str, Any]:
    x, y = run.require("x"), run.require("y")
    d = hilbert_distance(run.metric, x, y)
    click.echo(f"{d:.7f}")
    if run.domain.dimension == 2:
        run.svg(domain_figure(run.domain, point_sets=[np.vstack([x, y])]))
    return {"distance": d}


@handler("norm")
def _norm(run: RunContext) -> Dict[str, Any]:
    norm = finsler_norm(run.metric, run.require("x"), run.require("vector"))
    click.echo(f"{norm:.7f}")
    return {"norm": norm}


@handler("flow")
def _flow(run: RunContext) -> Dict[str, Any]:
    exp = run.config.experiment
    w = run.state()
    times = np.linspace(0.0, exp.horizon, exp.steps + 1)
    states = flow_orbit(run.metric, w, times)
    points = np.vstack([s.x for s in states])
    travelled = hilbert_distances(run.metric, np.broadcast_to(w.x, points.shape), points)

    frame = pd.DataFrame({"t": times})
    for i in range(points.shape[1]):
        frame[f"x{i + 1}"] = points[:, i]
    frame["distance"] = travelled
    run.csv(frame)
    if run.domain.dimension == 2:
        run.svg(domain_figure(run.domain, point_sets=[points[:: max(1, exp.steps // 50)]]))

    error = float(np.max(np.abs(travelled - times)))
    click.echo(" ".join(f"{c:.10g}" for c in points[-1]))
    return {"endpoint": points[-1].tolist(), "max_distance_error": error}


@handler("curvature")
def _curvature(run: RunContext) -> Dict[str, Any]:
    states = sample_states(run.metric, run.rng, run.samples(CURVATURE_STATES))
    with ThreadPoolExecutor(max_workers=run.threads) as executor:
        values = np.array(list(executor.map(lambda w: curvature_scalar(run.metric, w), states)))
    run.csv(pd.DataFrame({"curvature": values}))
    low, high = float(values.min()), float(values.max())
    click.echo(f"min={low:.6f} max={high:.6f}")
    return {"min": low, "max": high, "states": len(values)}


####################################################################################################
# TRANSPORT AND EXPONENTS
####################################################################################################


@handler("transport")
def _transport(run: RunContext) -> Dict[str, Any]:
    exp = run.config.experiment
    w = run.state()
    v0 = run.optional("vector")
    if v0 is None:
        v0 = transverse_frame(w.direction)[0]
    record = transport_norm_curve(run.metric, w, v0, exp.horizon, exp.steps)
    estimate = eta_estimate(record, run.config.numerics.transient_fraction)
    run.csv(record.to_frame())

    start, end = estimate.window
    window = (record.times >= start) & (record.times <= end)
    fit = (estimate.eta, _fit_line(record.times[window], np.log(record.transport_norm[window]))[1])
    run.svg(line_plot(record.times, np.log(record.transport_norm), fit, "t", "log N(t)"))
    click.echo(f"eta={estimate.eta:.6f} chi+={estimate.chi_plus:.6f} chi-={estimate.chi_minus:.6f} stderr={estimate.stderr:.2e}")
    return {"estimate": estimate.to_dict()}


def _periodic_rows(run: RunContext) -> pd.DataFrame:
    family = run.family
    exp = run.config.experiment
    words = exp.words
    if not words:
        enumeration = enumerate_conjugacy_classes(family.generators, exp.max_len, family.presentation, run.threads)
        words = [c.word for c in enumeration if is_biproximal(c.element)]

    # Planar families are measured along the axis inside the limit-set hull.
    hull_ctx = None
    if family.generators[0].dimension == 2:
        hull = generate_domain_hull(family.generators, exp.max_len, family.presentation, family.base_point, run.threads)
        hull_ctx = MetricContext(hull)

    rows = []
    for word in words:
        g = evaluate_word(family.generators, word)
        length = translation_length(g)
        # The exponent fit needs a horizon of MIN_RECORD_HORIZON.
        periods = max(exp.periods, int(np.ceil(const.MIN_RECORD_HORIZON / length)) + 1)
        index = 1
        for triple in periodic_lyapunov(g):
            if hull_ctx is not None:
                record = axis_transport_curve(hull_ctx, chart_action(hull_ctx.domain, g), periods)
            else:
                record = periodic_transport_curve(g, periods, direction=index)
            measured = eta_estimate(record)
            index += triple.multiplicity
            rows.append(
                {
                    "word": word,
                    "length": length,
                    "direction": index - triple.multiplicity,
                    "eta": triple.eta,
                    "chi_plus": triple.chi_plus,
                    "chi_minus": triple.chi_minus,
                    "multiplicity": triple.multiplicity,
                    "eta_transport": measured.eta,
                }
            )
    return pd.DataFrame(rows)


@handler("lyapunov")
def _lyapunov(run: RunContext) -> Dict[str, Any]:
    if run.config.group:
        frame = _periodic_rows(run)
        run.csv(frame)
        gap = float(np.max(np.abs(frame["eta"] - frame["eta_transport"]))) if len(frame) else 0.0
        click.echo(f"orbits={frame['word'].nunique()} max|eta-eta_transport|={gap:.2e}")
        return {"orbits": int(frame["word"].nunique()), "max_gap": gap}

    exp = run.config.experiment
    states = sample_states(run.metric, run.rng, run.samples(ANOSOV_STATES))
    with ThreadPoolExecutor(max_workers=run.threads) as executor:
        rates = list(executor.map(lambda w: anosov_rates(run.metric, w, exp.horizon, exp.steps), states))
    frame = pd.DataFrame(rates, columns=["alpha", "beta"])
    run.csv(frame)
    summary = {key: [float(frame[key].min()), float(frame[key].max())] for key in ("alpha", "beta")}
    click.echo(
        f"alpha=[{summary['alpha'][0]:.4f}, {summary['alpha'][1]:.4f}] "
        f"beta=[{summary['beta'][0]:.4f}, {summary['beta'][1]:.4f}]"
    )
    return summary


####################################################################################################
# GROUPS AND ENTROPY
####################################################################################################


@handler("group-scan")
def _group_scan(run: RunContext) -> Dict[str, Any]:
    family = run.family
    max_len = run.config.experiment.max_len
    enumeration = enumerate_conjugacy_classes(family.generators, max_len, family.presentation, run.threads)
    rows = []
    for c in enumeration:
        biproximal = is_biproximal(c.element)
        rows.append(
            {
                "word": c.word,
                "word_length": c.word_length,
                "trace": float(np.trace(c.element.matrix)),
                "biproximal": biproximal,
                "length": translation_length(c.element) if biproximal else np.nan,
            }
        )
    run.csv(pd.DataFrame(rows))
    results: Dict[str, Any] = {
        "classes": len(enumeration),
        "candidates": enumeration.candidates,
        "merged": enumeration.merged,
    }

    if family.generators[0].dimension == 2:
        hull = generate_domain_hull(family.generators, max_len, family.presentation, family.base_point, run.threads)
        results["hull_vertices"] = len(hull.hull.vertices)
        results["invariance_gap"] = hull_invariance_gap(hull, family.generators)
        try:
            conic = fit_conic(hull.vertices)
            results["conic_residual"] = conic.residual
        except LabError as e:
            logger.warning(f"No conic fit: {e}")
        run.csv(pd.DataFrame(hull.vertices, columns=["x1", "x2"]), suffix="_hull")
        run.svg(domain_figure(hull, point_sets=[hull.vertices]))

    click.echo(" ".join(f"{key}={value:.6g}" if isinstance(value, float) else f"{key}={value}" for key, value in results.items()))
    return results


@handler("entropy-vol")
def _entropy_vol(run: RunContext) -> Dict[str, Any]:
    exp = run.config.experiment
    estimate = volume_entropy(
        run.metric,
        x0=run.optional("x"),
        r_max=exp.r_max,
        samples=run.samples(run.config.numerics.mc_samples_per_ball),
        radii=exp.radii,
        rng=run.rng,
        polynomial_correction=exp.polynomial_correction,
        threads=run.threads,
    )
    frame = estimate.to_frame()
    run.csv(frame)
    window = frame["r"] >= estimate.window[0]
    fit = _fit_line(frame["r"][window], np.log(frame["volume"][window]))
    run.svg(line_plot(frame["r"], np.log(frame["volume"]), fit, "r", "log vol B(x, r)"))
    click.echo(f"h_vol={estimate.value:.4f} stderr={estimate.fit_stderr:.4f}")
    return {"estimate": estimate.to_dict()}


@handler("entropy-orbit")
def _entropy_orbit(run: RunContext) -> Dict[str, Any]:
    family = run.family
    max_len = run.config.experiment.max_len
    spectrum = orbital_length_spectrum(family.generators, max_len, family.presentation, run.threads)
    run.csv(spectrum, suffix="_spectrum")
    estimate = orbit_entropy(family.generators, max_len, family.presentation, spectrum=spectrum)
    frame = estimate.to_frame()
    run.csv(frame)

    window = frame["T"] >= estimate.window[0]
    margulis = np.log(frame["P_T"] * frame["T"])
    run.svg(line_plot(frame["T"], margulis, _fit_line(frame["T"][window], margulis[window]), "T", "log(P_T T)"))
    bound = ruelle_bound(family.generators[0].dimension, spectrum["eta"].tolist())
    click.echo(f"h_top={estimate.value:.4f} stderr={estimate.fit_stderr:.4f} ruelle_bound={bound:.4f} ({estimate.orientation})")
    return {"estimate": estimate.to_dict(), "ruelle_bound": bound}


####################################################################################################
# BOUNDARY
####################################################################################################


@handler("boundary-exponent")
def _boundary_exponent(run: RunContext) -> Dict[str, Any]:
    exp = run.config.experiment
    result = shape_exponent(
        run.domain,
        run.require("xplus"),
        v=run.optional("vector"),
        scales=exp.scales,
        xminus=run.optional("xminus"),
    )
    frame = result.to_frame()
    run.csv(frame)
    log_x = np.log(frame["scale"])
    log_y = 0.5 * (np.log(frame["y_plus"]) + np.log(frame["y_minus"]))
    run.svg(line_plot(log_x, log_y, _fit_line(log_x, log_y), "log x", "log y"))
    click.echo(f"exponent={result.exponent:.5f} eta={result.eta:.5f} stderr={result.stderr:.2e}")
    return {"result": result.to_dict()}


@handler("beta")
def _beta(run: RunContext) -> Dict[str, Any]:
    table = local_convexity_exponents(
        run.domain, run.samples(const.BETA_PAIRS), run.config.numerics.beta_max_separation
    )
    run.csv(table)
    beta, alpha = beta_from_exponents(table)
    results: Dict[str, Any] = {"beta": beta, "alpha": alpha}
    line = f"beta={beta:.4f} alpha={alpha:.4f}"
    try:
        results["entropy_lower_bound"] = entropy_lower_bound(beta, run.domain.dimension)
        line += f" bound={results['entropy_lower_bound']:.4f}"
    except LabError as e:
        logger.warning(f"No entropy bound: {e}")
    click.echo(line)
    return results


####################################################################################################
# RUN
####################################################################################################


def _load_config(config_path: Optional[Path], overrides: Dict[str, Any]) -> ExperimentConfig:
    config = ExperimentConfig.from_file(config_path) if config_path else ExperimentConfig.from_env()
    exp = config.experiment
    for key in ("horizon", "max_len", "samples"):
        if overrides.get(key) is not None:
            setattr(exp, key, overrides[key])
    if overrides.get("seed") is not None:
        config.run.seed = overrides["seed"]
    if overrides.get("threads") is not None:
        config.run.threads = overrides["threads"]
    if overrides.get("log_level"):
        config.logging.level = overrides["log_level"].upper()
    if overrides.get("json_logs"):
        config.logging.enable_json_logging = True

    errors = config.validate()
    if errors:
        msg = "Invalid configuration: " + "; ".join(errors)
        raise ConfigError(msg, {"errors": errors})
    return config


@handle_lab_error
def run(
    command: str,
    config_path: Optional[Path],
    output_dir: Optional[Path],
    overrides: Optional[Dict[str, Any]] = None,
) -> int:
    """Run one command and write its outputs.

    Parameters
    ----------
    command : str
        One of the registered command names.
    config_path : Optional[Path]
        The experiment config; defaults apply when omitted.
    output_dir : Optional[Path]
        Output directory, overriding the config.
    overrides : Optional[Dict[str, Any]]
        Values of the shared command-line flags.

    Returns
    -------
    int
        0 on success, 2 on a configuration error, 3 on a numeric failure.

    """
    if command not in HANDLERS:
        msg = f"Unknown command: {command}"
        raise ConfigError(msg, {"supported": sorted(HANDLERS)})

    config = _load_config(config_path, overrides or {})
    root = setup_logging(config.logging)
    digest = config_hash(config.document())
    provenance = Provenance(digest, config.run.seed, __version__, command)
    out = Path(output_dir) if output_dir else Path(config.run.output_dir)

    context = RunContext(command, config, provenance, out, np.random.default_rng(config.run.seed))
    with ExperimentLogger(root, command, digest[:12], config.run.seed):
        results = HANDLERS[command](context)
    write_metadata(out / "metadata.json", provenance, config.document(), results)
    return 0


####################################################################################################
# CLICK SURFACE
####################################################################################################


def _shared_options(func: Callable) -> Callable:
    options = [
        click.option("--config", "config_path", type=click.Path(exists=False, path_type=Path), help="Experiment config (YAML or JSON)."),
        click.option("--out", "output_dir", type=click.Path(file_okay=False, path_type=Path), help="Output directory."),
        click.option("--seed", type=int, help="Random seed."),
        click.option("--threads", type=click.IntRange(min=1), help="Worker threads."),
        click.option("--horizon", type=float, help="Flow horizon."),
        click.option("--max-len", "max_len", type=int, help="Maximal word length."),
        click.option("--samples", type=int, help="Sample count of the command."),
        click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False)),
        click.option("--json-logs", is_flag=True, help="Emit JSON log records."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.version_option(__version__, prog_name="hilbert-lab")
def cli() -> None:
    """Numerical laboratory for Hilbert geometries and their geodesic flows."""


def _register(name: str, summary: str) -> None:
    @cli.command(name, help=summary)
    @_shared_options
    @click.pass_context
    def command(ctx: click.Context, config_path: Optional[Path], output_dir: Optional[Path], **overrides: Any) -> None:
        ctx.exit(run(name, config_path, output_dir, overrides))


for _name, _summary in (
    ("distance", "Hilbert distance between experiment.x and experiment.y."),
    ("norm", "Finsler norm of experiment.vector at experiment.x."),
    ("flow", "Geodesic flow orbit from (experiment.x, experiment.direction)."),
    ("curvature", "Curvature of the flow on random states."),
    ("transport", "Transport norm curve and its exponent along one orbit."),
    ("lyapunov", "Periodic Lyapunov exponents of a group, or Anosov rates of a domain."),
    ("group-scan", "Conjugacy classes, length spectrum and limit-set hull of a group."),
    ("entropy-vol", "Volume entropy from Hilbert ball growth."),
    ("entropy-orbit", "Closed-orbit counting entropy of a group."),
    ("boundary-exponent", "Boundary shape exponent at experiment.xplus."),
    ("beta", "Convexity exponent beta and regularity alpha of the boundary."),
):
    _register(_name, _summary)


if __name__ == "__main__":
    cli()
