"""
fusedock command line: dataset generation, training, evaluation, propagation and calibration.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
Config files are JSON mirroring the typed configs. Precedence, lowest first:
dataclass defaults, config file, --set key=value overrides, dedicated flags such as --seed.
"""
from typing import Any, List, Optional, Sequence, Type
import json
import logging
import os
import sys

import click
from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException

from fusedock.utils.errors import ConfigInvalid, FuseDockError, Malformed

lgr = logging.getLogger("Fuse")

PRESETS = ("synthetic", "experimental", "miniature")


class DockGroup(click.Group):
    """maps usage errors to exit code 1, domain and OS errors to exit code 2"""

    def main(self, args: Optional[Sequence[str]] = None, prog_name: Optional[str] = None, standalone_mode: bool = True, **extra: Any) -> Any:  # type: ignore[override]
        try:
            rv = super().main(args=args, prog_name=prog_name or "fusedock", standalone_mode=False, **extra)
            code = rv if isinstance(rv, int) else 0
        except click.ClickException as e:
            e.show()
            code = 1
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = 1
        except (FuseDockError, OSError) as e:
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            code = 2
        if standalone_mode:
            sys.exit(code)
        return code


class RunContext:
    def __init__(self, out_dir: str, seed: Optional[int], verbose: int):
        self.out_dir = out_dir
        self.seed = seed
        self.verbose = verbose

    def resolve_seed(self, local: Optional[int], default: int = 0) -> int:
        if local is not None:
            return local
        return self.seed if self.seed is not None else default

    def output_path(self, name: str) -> str:
        """resolves name inside --out-dir; paths escaping it are rejected"""
        root = os.path.realpath(self.out_dir)
        path = os.path.realpath(os.path.join(root, name))
        if os.path.commonpath([root, path]) != root:
            raise click.UsageError(f"output {name!r} is outside --out-dir {self.out_dir}")
        os.makedirs(os.path.dirname(path) or root, exist_ok=True)
        return path


def setup_logging(verbose: int) -> None:
    level = logging.WARNING if verbose <= 0 else logging.INFO if verbose == 1 else logging.DEBUG
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(level)


def load_configs(path: Optional[str], schema: Type, overrides: Sequence[str]) -> List[Any]:
    """
    Reads a JSON object or list of objects and merges each over the dataclass defaults.
    """
    items: list = [{}]
    if path is not None:
        try:
            with open(path) as f:
                values = json.load(f)
        except json.JSONDecodeError as e:
            raise Malformed(f"{path}: {e}")
        items = values if isinstance(values, list) else [values]
    try:
        dotlist = OmegaConf.from_dotlist(list(overrides))
        configs = [OmegaConf.to_object(OmegaConf.merge(OmegaConf.structured(schema), item, dotlist)) for item in items]
    except OmegaConfBaseException as e:
        raise ConfigInvalid(f"invalid {schema.__name__} config: {e}")
    return [c.validate() for c in configs]


def _verbosity(ctx: RunContext) -> int:
    return max(ctx.verbose, 0)


set_option = click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="config override, dotlist syntax")
seed_option = click.option("--seed", type=int, default=None, help="overrides the global --seed")


@click.group(cls=DockGroup)
@click.option("--out-dir", default=".", show_default=True, type=click.Path(file_okay=False), help="every output is written below this directory")
@click.option("--seed", type=int, default=None, help="random seed of the run")
@click.option("--verbose", "-v", count=True, help="INFO logging, repeat for DEBUG")
@click.pass_context
def cli(ctx: click.Context, out_dir: str, seed: Optional[int], verbose: int) -> None:
    setup_logging(verbose)
    os.makedirs(out_dir, exist_ok=True)
    ctx.obj = RunContext(out_dir=out_dir, seed=seed, verbose=verbose)


@cli.command()
@click.option("--tle", "tle_path", required=True, type=click.Path(exists=True, dir_okay=False), help="two-line element set file")
@click.option("--duration", required=True, type=float, help="[s]")
@click.option("--dt", required=True, type=float, help="RK4 step [s]")
@click.option("--two-body", is_flag=True, help="disable J2 and drag")
@click.option("--output", default="ephemeris.csv", show_default=True)
@click.pass_obj
def propagate(ctx: RunContext, tle_path: str, duration: float, dt: float, two_body: bool, output: str) -> None:
    """Propagates the first element set of a TLE file."""
    from fusedock.simulation.orbit import DEFAULT_FORCES, TWO_BODY, read_tle_file, tle_to_state, write_ephemeris_csv
    from fusedock.simulation.orbit import propagate as propagate_orbit
    from fusedock.simulation.orbit.propagator import SpacecraftProperties

    tle = read_tle_file(tle_path)[0]
    states = propagate_orbit(tle_to_state(tle), SpacecraftProperties(), dt, duration, TWO_BODY if two_body else DEFAULT_FORCES, verbose=_verbosity(ctx))
    path = ctx.output_path(output)
    write_ephemeris_csv(states, path)
    click.echo(f"propagated {len(states)} states over {duration:g} s -> {path}")


def _preset_build_configs(preset: str, seed: int, count: Optional[int]) -> list:
    from fusedock.data.docking import default_build_configs, experimental_build_configs, miniature_build_configs

    if preset == "miniature":
        return miniature_build_configs(seed=seed, count=count if count is not None else 2)
    configs = default_build_configs(seed=seed) if preset == "synthetic" else experimental_build_configs(seed=seed)
    return configs if count is None else configs[:count]


def _build_configs(ctx: RunContext, config_path: Optional[str], defaults: bool, preset: str, count: Optional[int], seed: Optional[int], overrides: Sequence[str]) -> list:
    from fusedock.data.docking import SequenceBuildConfig

    if (config_path is None) == (not defaults):
        raise click.UsageError("exactly one of --config and --defaults is required")
    if defaults:
        configs = _preset_build_configs(preset, ctx.resolve_seed(seed), count)
        if len(overrides) > 0:
            try:
                base = OmegaConf.from_dotlist(list(overrides))
                configs = [OmegaConf.to_object(OmegaConf.merge(OmegaConf.structured(c), base)) for c in configs]
            except OmegaConfBaseException as e:
                raise ConfigInvalid(f"invalid SequenceBuildConfig override: {e}")
        return [c.validate() for c in configs]
    configs = load_configs(config_path, SequenceBuildConfig, overrides)
    effective_seed = ctx.resolve_seed(seed, default=-1)
    if effective_seed >= 0:
        for i, c in enumerate(configs):
            c.trajectory.seed = effective_seed + i
    return configs


def _source_options(f: Any) -> Any:
    f = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON config (object or list)")(f)
    f = click.option("--defaults", is_flag=True, help="use a built-in campaign")(f)
    f = click.option("--preset", type=click.Choice(PRESETS), default="synthetic", show_default=True, help="campaign used with --defaults")(f)
    f = click.option("--count", type=int, default=None, help="number of sequences of the campaign")(f)
    return f


@cli.command("gen-traj")
@_source_options
@seed_option
@set_option
@click.option("--output-dir", default="trajectories", show_default=True)
@click.pass_obj
def gen_traj(ctx: RunContext, config_path: Optional[str], defaults: bool, preset: str, count: Optional[int], seed: Optional[int], overrides: Sequence[str], output_dir: str) -> None:
    """Generates relative trajectories (JSON lines, one file per sequence)."""
    from fusedock.simulation.trajectory import TrajectoryConfig, generate, write_trajectory_jsonl

    if defaults:
        configs = [(c.id, c.trajectory) for c in _build_configs(ctx, None, True, preset, count, seed, [f"trajectory.{o}" for o in overrides])]
    elif config_path is not None:
        trajectories = load_configs(config_path, TrajectoryConfig, overrides)
        effective_seed = ctx.resolve_seed(seed, default=-1)
        if effective_seed >= 0:
            for i, t in enumerate(trajectories):
                t.seed = effective_seed + i
        configs = [(f"{i + 1:02d}", t) for i, t in enumerate(trajectories)]
    else:
        raise click.UsageError("exactly one of --config and --defaults is required")

    frames = 0
    for sequence_id, trajectory in configs:
        samples = generate(trajectory)
        write_trajectory_jsonl(samples, ctx.output_path(os.path.join(output_dir, f"{sequence_id}.jsonl")))
        frames += len(samples)
    click.echo(f"generated {len(configs)} trajectories ({frames} samples) -> {ctx.output_path(output_dir)}")


@cli.command("build-dataset")
@_source_options
@seed_option
@set_option
@click.option("--workers", type=int, default=1, show_default=True, help="parallel sequence builds")
@click.option("--dataset-dir", default="dataset", show_default=True)
@click.pass_obj
def build_dataset_command(ctx: RunContext, config_path: Optional[str], defaults: bool, preset: str, count: Optional[int], seed: Optional[int], overrides: Sequence[str], workers: int, dataset_dir: str) -> None:
    """Renders image sequences with pose labels."""
    from fusedock.data.docking import build_dataset

    if workers < 1:
        raise click.UsageError("--workers must be >= 1")
    configs = _build_configs(ctx, config_path, defaults, preset, count, seed, overrides)
    root = ctx.output_path(dataset_dir)
    records = build_dataset(configs, root, workers=workers, verbose=_verbosity(ctx))
    click.echo(f"built {len(records)} sequences ({sum(len(r) for r in records)} frames) -> {root}")


@cli.command("split")
@click.option("--root", required=True, type=click.Path(exists=True, file_okay=False), help="dataset root")
@seed_option
@click.option("--output", default="split.json", show_default=True)
@click.pass_obj
def split_command(ctx: RunContext, root: str, seed: Optional[int], output: str) -> None:
    """Splits the non-test sequences into train and validation chunks."""
    from fusedock.data.docking import discover_sequences, split, write_split

    records = list(discover_sequences(root, check_images=False).values())
    plan = split(records, seed=ctx.resolve_seed(seed))
    path = ctx.output_path(output)
    write_split(plan, path)
    click.echo(f"split: {len(plan.train)} train chunks, {len(plan.val)} val chunks ({100 * plan.val_fraction:.1f}% val), {len(plan.test)} test sequences -> {path}")


@cli.command("train")
@click.option("--root", required=True, type=click.Path(exists=True, file_okay=False), help="dataset root")
@click.option("--split", "split_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON train config")
@seed_option
@set_option
@click.option("--run-dir", default=".", show_default=True, help="receives model.dkz and metrics.csv")
@click.pass_obj
def train_command(ctx: RunContext, root: str, split_path: str, config_path: Optional[str], seed: Optional[int], overrides: Sequence[str], run_dir: str) -> None:
    """Trains the pose regressor."""
    from fusedock.data.docking import discover_sequences, read_split
    from fusedock.dl.config import TrainConfig
    from fusedock.dl.train import CHECKPOINT_FILE, train

    config: TrainConfig = load_configs(config_path, TrainConfig, overrides)[0]
    if seed is not None or ctx.seed is not None:
        config.seed = ctx.resolve_seed(seed)
    plan = read_split(split_path)
    records = discover_sequences(root)
    missing = sorted({i for i, _, _ in plan.train + plan.val} - set(records.keys()))
    if len(missing) > 0:
        raise Malformed(f"split references sequences missing under {root}: {missing}")
    out_dir = ctx.output_path(run_dir)
    _, rows = train(records, plan, config, out_dir=out_dir, verbose=_verbosity(ctx))
    last = rows[-1]
    click.echo(f"trained {config.epochs} epochs, last {last['split']} loss {last['loss']:.4f} mean dt {last['mean_dt_m']:.4f} m -> {os.path.join(out_dir, CHECKPOINT_FILE)}")


@cli.command("eval")
@click.option("--sequence", "sequence_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--predictions", type=click.Path(exists=True, dir_okay=False), default=None, help="CSV t,tx,ty,tz,qx,qy,qz,qw")
@click.option("--emit-csv", default=None, help="per frame errors t_s,dt_m,dq_deg,dtr_frac,phase")
@click.option("--emit-svg", default=None, help="error against time chart")
@click.option("--summary", "summary_name", default="eval_summary.json", show_default=True)
@click.option("--position-threshold", type=float, default=0.05, show_default=True, help="range normalised")
@click.option("--attitude-threshold", type=float, default=5.0, show_default=True, help="[deg]")
@click.pass_obj
def eval_command(
    ctx: RunContext,
    sequence_dir: str,
    checkpoint: Optional[str],
    predictions: Optional[str],
    emit_csv: Optional[str],
    emit_svg: Optional[str],
    summary_name: str,
    position_threshold: float,
    attitude_threshold: float,
) -> None:
    """Evaluates a checkpoint or external predictions on one sequence."""
    from fusedock.data.docking import load_sequence
    from fusedock.eval.evaluate import (
        Thresholds,
        evaluate,
        evaluate_predictions,
        read_predictions_csv,
        write_error_chart_svg,
        write_frame_errors_csv,
    )

    if (checkpoint is None) == (predictions is None):
        raise click.UsageError("exactly one of --checkpoint and --predictions is required")
    thresholds = Thresholds(position_frac=position_threshold, attitude_deg=attitude_threshold)
    if checkpoint is not None:
        from fusedock.dl.train import load_trained_model

        sequence = load_sequence(sequence_dir)
        model, config = load_trained_model(checkpoint)
        frame_errors, summary = evaluate(model, sequence, thresholds, downscale_factor=config.downscale, verbose=_verbosity(ctx))
    else:
        sequence = load_sequence(sequence_dir, check_images=False)
        frame_errors, summary = evaluate_predictions(sequence, read_predictions_csv(predictions, sequence), thresholds)

    if emit_csv is not None:
        write_frame_errors_csv(frame_errors, ctx.output_path(emit_csv))
    if emit_svg is not None:
        write_error_chart_svg(frame_errors, ctx.output_path(emit_svg), thresholds, title=sequence.id)
    with open(ctx.output_path(summary_name), "w") as f:
        json.dump(dict(sequence=sequence.id, **summary.to_dict()), f, indent=2, sort_keys=True)
        f.write("\n")
    click.echo(f"{sequence.id}: {summary.summary_line()}")


@cli.command("calibrate")
@click.option("--samples", "samples_path", required=True, type=click.Path(exists=True, dir_okay=False), help="CSV k,T_oi(7),T_os(7),T_cb(7)")
@click.option("--stream", "stream_path", type=click.Path(exists=True, dir_okay=False), default=None, help="CSV t,T_oi(7),T_os(7)")
@click.option("--output", default="calibration.json", show_default=True)
@click.option("--emit-stream", default="ground_truth.csv", show_default=True, help="calibrated poses of --stream")
@click.pass_obj
def calibrate(ctx: RunContext, samples_path: str, stream_path: Optional[str], output: str, emit_stream: str) -> None:
    """Recovers the static transforms of the motion capture setup."""
    from fusedock.calibration import calibrate_stream, read_samples_csv, solve_statics, write_result_json

    result = solve_statics(read_samples_csv(samples_path), verbose=_verbosity(ctx))
    path = ctx.output_path(output)
    write_result_json(result, path)
    message = f"calibrated from {result.samples} samples: rms residual {result.rms_rotation_residual:.4f} deg, {1000 * result.rms_translation_residual:.3f} mm -> {path}"
    if stream_path is not None:
        count = calibrate_stream(result, stream_path, ctx.output_path(emit_stream), verbose=_verbosity(ctx))
        message += f", {count} stream poses"
    click.echo(message)


def main(argv: Optional[Sequence[str]] = None) -> int:
    return cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
