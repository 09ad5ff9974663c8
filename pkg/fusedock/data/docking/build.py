from typing import List, Tuple
import logging
import os

from fuse.utils.multiprocessing import run_multiprocessed

from fusedock.utils.errors import ConfigInvalid, IoFailure
from fusedock.simulation.trajectory import generate
from fusedock.data.imaging import RenderSettings, default_fixture, render, sun_in_camera, write_ppm
from fusedock.data.docking.config import SequenceBuildConfig
from fusedock.data.docking.sequence_io import FrameRecord, SequenceRecord, frame_file_name, write_index, FRAMES_DIR

lgr = logging.getLogger("Fuse")


def build_sequence(config: SequenceBuildConfig, root: str, verbose: int = 1) -> SequenceRecord:
    """
    Generates the trajectory of one sequence, renders every sample and writes frames and index below root.
    Output depends only on the config.
    """
    config.validate()
    samples = generate(config.trajectory)
    K = config.render.camera.intrinsics()
    sun_target = config.render.sun_target(config.trajectory.approach)
    fixture = default_fixture()

    sequence_dir = os.path.join(root, config.id)
    try:
        os.makedirs(os.path.join(sequence_dir, FRAMES_DIR), exist_ok=True)
    except OSError as e:
        raise IoFailure(f"failed creating {sequence_dir}: {e}")

    record = SequenceRecord(
        id=config.id, rate=config.trajectory.rate, camera=K, test=config.test, directory=os.path.abspath(sequence_dir)
    )
    for k, sample in enumerate(samples):
        settings = RenderSettings(
            background=config.render.background,
            sun_direction=tuple(sun_in_camera(sample.pose, sun_target)),
            seed=config.render.background_seed,
        )
        img = render(K, sample.pose, fixture, settings)
        image_path = frame_file_name(k)
        write_ppm(img, os.path.join(sequence_dir, image_path))
        record.frames.append(FrameRecord(t=sample.t, image_path=image_path, pose=sample.pose, phase=sample.phase))
        if verbose > 1 and k % 1000 == 0:
            lgr.info(f"{config.id}: rendered {k}/{len(samples)} frames")

    write_index(record, sequence_dir)
    if verbose > 0:
        lgr.info(f"built sequence {config.id}: {len(record)} frames, {record.duration:.1f} s")
    return record


def _build_worker(args: Tuple[SequenceBuildConfig, str, int]) -> SequenceRecord:
    config, root, verbose = args
    return build_sequence(config, root, verbose=verbose)


def build_dataset(configs: List[SequenceBuildConfig], root: str, workers: int = 1, verbose: int = 1) -> List[SequenceRecord]:
    """
    :param workers: sequences built in parallel; results do not depend on it
    """
    ids = [c.validate().id for c in configs]
    if len(set(ids)) != len(ids):
        raise ConfigInvalid(f"sequence ids must be unique, got {ids}")

    args_list = [(c, root, verbose) for c in configs]
    if workers <= 1:
        records = [_build_worker(args) for args in args_list]
    else:
        records = run_multiprocessed(
            worker_func=_build_worker,
            args_list=args_list,
            workers=workers,
            verbose=verbose,
            keep_results_order=True,
        )
    if verbose > 0:
        lgr.info(f"built {len(records)} sequences under {root}")
    return list(records)
