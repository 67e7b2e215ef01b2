"""
Command line interface of PSISS.

Every command reads one JSON configuration (a file path or the name of a
bundled configuration) and writes its artifacts under ``--out``:
``report.txt`` always, ``signal.csv`` and ``run_XXX.csv`` where relevant.

Exit codes: 0 on success, 1 when a check refuses or a run diverges, 2 on
invalid input.
"""

import functools
import logging
import sys
from pathlib import Path

import click
import numpy as np

from .certificate import assemble_certificate
from .check.average_dwell_time import AverageDwellTime
from .check.cascade import Cascade
from .check.envelope import Envelope
from .check.gain_candidate import GainCandidate
from .check.lyapunov_decay import LyapunovDecay
from .check.lyapunov_sandwich import LyapunovSandwich
from .check.mu_compatibility import MuCompatibility
from .check.signal_bounds import SignalBounds
from .config import load_config
from .exceptions import ConfigError, GenerationError, PSISSException
from .generators import (
    generate_admissible_signal,
    generate_adt_signal,
    generate_worst_case_signal,
)
from .report import Report
from .sim import batch_simulate
from .signal import SwitchingSignal

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

DEFAULT_STATE_BOX = (-10.0, 10.0)
DEFAULT_INPUT_BOX = (-1.0, 1.0)

SEC4_CONFIG = "example_sec4"

# final norm allowed after the reproduction run, relative to the initial norm
SEC4_FINAL_RATIO = 0.01
SEC4_FINAL_CONSTANT = 10.0


def _configure_logging(verbose: int):
    level = max(logging.DEBUG, logging.WARNING - 10 * verbose)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _guard(function):
    """Turn library errors escaping a command into exit code 2."""

    @functools.wraps(function)
    def wrapper(*args, **kwargs):
        try:
            return function(*args, **kwargs)
        except PSISSException as e:
            click.echo(f"error: {e}", err=True)
            click.get_current_context().exit(EXIT_INVALID)

    return wrapper


def _invalid(ctx, errors):
    for error in errors:
        click.echo(f"config error: {error}", err=True)
    ctx.exit(EXIT_INVALID)


def _load(ctx, source):
    try:
        return load_config(source)
    except ConfigError as e:
        _invalid(ctx, e.errors)


def _require(ctx, config, *blocks):
    missing = [block for block in blocks if getattr(config, block) is None]
    if missing:
        _invalid(ctx, [f"{block}: missing" for block in missing])


def _out_dir(out) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_report(out: Path, report: Report):
    (out / "report.txt").write_text(report.render(), encoding="utf-8")


def _default_t(config):
    if config.certificate is not None and config.certificate.horizon is not None:
        return config.certificate.horizon
    if config.simulation is not None:
        return config.simulation.t_end
    return None


def _generate(config, seed=None) -> SwitchingSignal:
    """Build the configured signal, running its generator when there is one."""

    if config.signal.signal is not None:
        return config.signal.signal

    params = dict(config.signal.params)
    t = params.get("t") or _default_t(config)
    if t is None:
        raise ConfigError(["signal.t: missing and no horizon to default to"])

    grid_step = config.certificate.grid_step if config.certificate else 0.01
    generator = config.signal.generator
    logger.info("generating a %s signal on [0, %g]", generator, t)

    if generator == "adt":
        return generate_adt_signal(
            params["tau_a"],
            params["n0"],
            t,
            params["mode_cycle"],
            seed=params.get("seed", seed),
            transitions=config.family.transitions,
            grid_step=grid_step,
        )

    if config.bounds is None:
        raise ConfigError([f"bounds: missing, required by the {generator} generator"])
    if generator == "worst_case":
        return generate_worst_case_signal(
            config.bounds,
            t,
            mode_cycle=params.get("mode_cycle"),
            n0=params.get("n0"),
            grid_step=grid_step,
        )

    return generate_admissible_signal(
        config.bounds, t, mode_cycle=params.get("mode_cycle"), grid_step=grid_step
    )


def _resolve_signal(ctx, config, seed=None):
    _require(ctx, config, "signal")
    try:
        return _generate(config, seed)
    except ConfigError as e:
        _invalid(ctx, e.errors)
    except GenerationError as e:
        click.echo(f"generation failed: {e}", err=True)
        ctx.exit(EXIT_FAILED)


def _write_signal(out: Path, signal: SwitchingSignal):
    """Write ``signal.csv`` and make sure it reads back to the same signal."""

    text = signal.to_csv()
    (out / "signal.csv").write_text(text, encoding="utf-8")
    if SwitchingSignal.from_csv(text) != signal:
        raise PSISSException("signal.csv does not read back to the generated signal")


def _boxes(config):
    family = config.family
    state_box = config.certificate.state_box
    if state_box is None:
        if config.simulation is not None and config.simulation.box is not None:
            state_box = config.simulation.box
        else:
            state_box = [DEFAULT_STATE_BOX] * family.state_dim
    input_box = config.certificate.input_box or [DEFAULT_INPUT_BOX] * family.input_dim

    return state_box, input_box


def _family_checks(config, seed):
    """Sample the Lyapunov data of every mode and transition; return report and verdict."""

    family = config.family
    state_box, input_box = _boxes(config)
    n_samples = config.certificate.n_samples

    report = Report()
    passed = True
    for mode in family.modes:
        sandwich = LyapunovSandwich(family, mode, state_box, n_samples, seed)
        decay = LyapunovDecay(family, mode, state_box, input_box, n_samples, seed)
        report[f"mode.{mode}.sandwich"] = "pass" if sandwich.passed else "fail"
        report[f"mode.{mode}.sandwich.worst_margin"] = float(sandwich.worst_margin)
        report[f"mode.{mode}.decay"] = "pass" if decay.passed else "fail"
        report[f"mode.{mode}.decay.worst_margin"] = float(decay.worst_margin)
        if not decay.passed:
            report[f"mode.{mode}.decay.violations"] = len(decay)
            worst = decay.worst
            report[f"mode.{mode}.decay.witness"] = (
                f"x={worst.state.tolist()} v={worst.input.tolist()}"
            )
        passed &= sandwich.passed and decay.passed

    for m, n in sorted(family.transitions):
        compatibility = MuCompatibility(family, (m, n), state_box, n_samples, seed)
        report[f"transition.{m}-{n}.mu"] = "pass" if compatibility.passed else "fail"
        report[f"transition.{m}-{n}.mu_hat"] = float(compatibility.mu_hat)
        passed &= compatibility.passed

    gain = GainCandidate(family)
    report["gain"] = "pass" if gain.passed else "fail"
    passed &= gain.passed

    return report, passed


def _report_bounds(report: Report, bounds: SignalBounds):
    report["bounds"] = "pass" if bounds.passed else "fail"
    for k, violation in enumerate(bounds):
        report[f"bounds.violation.{k}"] = (
            f"{violation.condition} {violation.key!r} on ]{violation.start!r}, "
            f"{violation.end!r}] value={violation.value!r} bound={violation.bound!r}"
        )


def _verify_generated(config, signal):
    """
    Check the CSV form of ``signal`` against the configured bounds.

    The horizon is the generator's ``t``, else the configured horizon, else
    the last switching instant. Worst-case signals are held to the anchored
    aggregate switch bound they are built for.

    :return: Report section and verdict.
    """

    report = Report()
    horizon = config.signal.params.get("t") or _default_t(config) or signal.taus[-1]
    if config.bounds is None or not horizon > 0:
        report["bounds"] = "unchecked"
        return report, True

    parsed = SwitchingSignal.from_csv(signal.to_csv())
    grid_step = config.certificate.grid_step if config.certificate else 0.01
    options = {}
    if config.signal.generator == "worst_case":
        options = dict(anchored=True, aggregate=True, conditions=("switches",))

    bounds = SignalBounds(
        config.bounds, parsed, horizon=horizon, grid_step=grid_step, **options
    )
    _report_bounds(report, bounds)
    passed = bounds.passed

    if config.signal.generator == "adt":
        params = config.signal.params
        adt = AverageDwellTime(
            parsed, params["tau_a"], params["n0"], horizon=horizon, grid_step=grid_step
        )
        report["average_dwell_time"] = "pass" if adt.passed else "fail"
        passed &= adt.passed

    return report, passed


def _signal_checks(config, signal):
    certificate = config.certificate
    bounds = SignalBounds(
        config.bounds,
        signal,
        horizon=certificate.horizon,
        grid_step=certificate.grid_step,
    )

    report = Report()
    report["switches"] = len(signal.switches)
    _report_bounds(report, bounds)

    if config.signal.generator == "adt":
        params = config.signal.params
        adt = AverageDwellTime(
            signal,
            params["tau_a"],
            params["n0"],
            horizon=certificate.horizon,
            grid_step=certificate.grid_step,
        )
        report["average_dwell_time"] = "pass" if adt.passed else "fail"

    return report, bounds.passed


def _certify(config, signal):
    certificate = config.certificate
    return assemble_certificate(
        config.family,
        config.bounds,
        certificate.rho,
        certificate.c1,
        certificate.horizons,
        [signal],
        stated_lhs=certificate.stated_lhs,
        s_max=certificate.s_max,
    )


def _run_check(config, signal, seed):
    """Family checks, signal checks and the certificate in one report."""

    report = Report("psiss check")
    report["config"] = config.source

    family_report, family_passed = _family_checks(config, seed)
    report.update(family_report, "family.")
    signal_report, signal_passed = _signal_checks(config, signal)
    report.update(signal_report, "signal.")

    result = _certify(config, signal)
    report.update(result.to_report(), "certificate.")

    passed = result.issued and family_passed and signal_passed
    report["verdict"] = "certified" if passed else "refused"
    return report, passed


def _run_simulation(config, signal, seed, out: Path, write_runs: bool):
    """Run the batch, write per-run CSVs and confront runs with the certificate."""

    simulation = config.simulation
    summaries = batch_simulate(
        config.family,
        signal,
        simulation.inputs,
        simulation.box,
        simulation.n_runs,
        seed,
        simulation.t_end,
        dt=simulation.dt,
        keep_trajectories=True,
        x0=simulation.x0,
    )

    certificate = None
    if config.certificate is not None and config.bounds is not None:
        certificate = _certify(config, signal)

    report = Report()
    report["runs"] = len(summaries)
    report["diverged"] = sum(s.diverged or s.error is not None for s in summaries)
    for summary in summaries:
        prefix = f"run.{summary.run:03d}."
        report[prefix + "x0_norm"] = float(np.linalg.norm(summary.x0))
        report[prefix + "sup_norm"] = summary.sup_norm
        report[prefix + "final_norm"] = summary.final_norm
        report[prefix + "diverged"] = "yes" if summary.diverged else "no"
        if summary.error is not None:
            report[prefix + "error"] = summary.error

        trajectory = summary.trajectory
        if write_runs:
            path = out / f"run_{summary.run:03d}.csv"
            path.write_text(trajectory.to_csv(), encoding="utf-8")

        if certificate is not None and certificate.issued:
            envelope = Envelope(trajectory, certificate)
            report[prefix + "envelope"] = "pass" if envelope.passed else "fail"
            report[prefix + "envelope.worst_margin"] = envelope.worst_margin
        if not (summary.diverged or summary.error):
            cascade = Cascade(trajectory, config.family, signal, seed=seed)
            report[prefix + "cascade"] = cascade.label

    if certificate is not None:
        report["certificate"] = "certified" if certificate.issued else "refused"

    return report, summaries


def _seed(seed, config):
    if seed is not None:
        return seed
    return config.simulation.seed if config.simulation is not None else 0


def config_option(function):
    """Add the ``--config`` option."""
    return click.option(
        "--config",
        "config_source",
        required=True,
        help="Configuration file, or the name of a bundled configuration.",
    )(function)


def out_option(function):
    """Add the ``--out`` option."""
    return click.option(
        "--out",
        default="out",
        show_default=True,
        type=click.Path(file_okay=False),
        help="Directory the report and CSV artifacts are written to.",
    )(function)


def seed_option(function):
    """Add the ``--seed`` option."""
    return click.option(
        "--seed",
        type=click.IntRange(min=0),
        default=None,
        help="Override the configured seed.",
    )(function)


@click.group()
@click.option("-v", "--verbose", count=True, help="Log more; repeat for debug output.")
@click.version_option(package_name="psiss")
def main(verbose: int):
    """Certify input-to-state stability of switched systems under rate-bounded switching."""
    _configure_logging(verbose)


@main.command()
@config_option
@out_option
@seed_option
@click.pass_context
@_guard
def check(ctx, config_source: str, out: str, seed):
    """Run the family and signal checks and assemble the certificate."""

    config = _load(ctx, config_source)
    _require(ctx, config, "bounds", "certificate", "signal")
    seed = _seed(seed, config)
    out = _out_dir(out)

    signal = _resolve_signal(ctx, config, seed)
    _write_signal(out, signal)
    report, passed = _run_check(config, signal, seed)
    _write_report(out, report)

    click.echo(f"{report['verdict']}: report written to {out / 'report.txt'}")
    ctx.exit(EXIT_OK if passed else EXIT_FAILED)


@main.command()
@config_option
@out_option
@seed_option
@click.option(
    "--allow-divergence",
    is_flag=True,
    default=False,
    help="Exit 0 even when runs diverge.",
)
@click.option(
    "--summary-only",
    is_flag=True,
    default=False,
    help="Write the report but no per-run CSV files.",
)
@click.pass_context
@_guard
def simulate(ctx, config_source, out, seed, allow_divergence, summary_only):
    """Simulate a seeded batch of initial conditions under the configured signal."""

    config = _load(ctx, config_source)
    _require(ctx, config, "simulation", "signal")
    seed = _seed(seed, config)
    out = _out_dir(out)

    signal = _resolve_signal(ctx, config, seed)
    _write_signal(out, signal)

    section, _ = _run_simulation(config, signal, seed, out, not summary_only)
    report = Report("psiss simulate")
    report["config"] = config.source
    report["seed"] = seed
    report.update(section)
    _write_report(out, report)

    diverged = int(report["diverged"])
    click.echo(f"{report['runs']} runs, {diverged} diverged")
    ctx.exit(EXIT_FAILED if diverged and not allow_divergence else EXIT_OK)


@main.command()
@config_option
@out_option
@seed_option
@click.pass_context
@_guard
def generate(ctx, config_source, out, seed):
    """Generate the configured switching signal and write it as CSV."""

    config = _load(ctx, config_source)
    seed = _seed(seed, config)
    out = _out_dir(out)

    signal = _resolve_signal(ctx, config, seed)
    verification, verified = _verify_generated(config, signal)

    report = Report("psiss generate")
    report["config"] = config.source
    report["generator"] = config.signal.generator or "inline"
    report["switches"] = len(signal.switches)
    report.update(verification, "verify.")
    _write_report(out, report)

    if not verified:
        click.echo("generated signal violates the configured bounds", err=True)
        ctx.exit(EXIT_FAILED)

    _write_signal(out, signal)
    click.echo(f"{len(signal.switches)} switches written to {out / 'signal.csv'}")
    ctx.exit(EXIT_OK)


@main.command("reproduce-sec4")
@out_option
@seed_option
@click.option(
    "--n-runs", type=click.IntRange(min=1), default=None, help="Override n_runs."
)
@click.pass_context
@_guard
def reproduce_sec4(ctx, out, seed, n_runs):
    """Generate, simulate and check the bundled two-mode example in one go."""

    config = _load(ctx, SEC4_CONFIG)
    if n_runs is not None:
        config = config._replace(simulation=config.simulation._replace(n_runs=n_runs))
    seed = _seed(seed, config)
    out = _out_dir(out)

    signal = _resolve_signal(ctx, config, seed)
    _write_signal(out, signal)
    signal_report, signal_passed = _signal_checks(config, signal)

    simulation_report, summaries = _run_simulation(config, signal, seed, out, False)
    check_report, _ = _run_check(config, signal, seed)

    bounded = all(
        not summary.diverged
        and summary.error is None
        and summary.final_norm
        <= SEC4_FINAL_RATIO * np.linalg.norm(summary.x0) + SEC4_FINAL_CONSTANT
        for summary in summaries
    )

    report = Report("psiss reproduce-sec4")
    report["seed"] = seed
    report["signal_bounds"] = "pass" if signal_passed else "fail"
    report["trajectories_bounded"] = "yes" if bounded else "no"
    report.update(signal_report, "generate.")
    report.update(simulation_report, "simulate.")
    report.update(check_report, "check.")
    _write_report(out, report)

    click.echo(
        f"signal bounds {report['signal_bounds']}, trajectories bounded "
        f"{report['trajectories_bounded']}, certificate {check_report['verdict']}"
    )
    ctx.exit(EXIT_OK if signal_passed and bounded else EXIT_FAILED)


if __name__ == "__main__":
    main()
