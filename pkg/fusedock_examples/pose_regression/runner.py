import os
from typing import Any, Dict, List
import json
import logging

import hydra
from omegaconf import DictConfig, OmegaConf

from fuse.utils.ndict import NDict
from fuse.utils.utils_logger import fuse_logger_start

from fusedock.data.docking import (
    SequenceRecord,
    SplitPlan,
    build_dataset,
    default_build_configs,
    experimental_build_configs,
    miniature_build_configs,
    split,
    write_split,
)
from fusedock.dl.train import CHECKPOINT_FILE, config_from_dict, load_trained_model, train
from fusedock.eval.evaluate import Thresholds, evaluate, write_error_chart_svg, write_frame_errors_csv


@hydra.main(config_path="configs", config_name="train_config")
def main(cfg: DictConfig) -> None:
    """
    runs build dataset -> train -> evaluation pipeline using the "./configs/train_config.yaml" file.

    :param cfg: Hydra's config object that the decorator supplies.
    """
    cfg_dict = OmegaConf.to_object(hydra.utils.instantiate(cfg))
    cfg = NDict(cfg_dict)
    cfg.print_tree(True)

    paths = cfg["paths"]
    fuse_logger_start(output_path=paths["model_dir"], console_verbose_level=logging.INFO)

    data_params = cfg_dict["params"]["data"]
    records = run_build(paths, data_params)
    run_train(paths, cfg_dict["params"]["train"], data_params, records)
    run_eval(paths, NDict(cfg["params.eval"]), records)


def create_build_configs(params: Dict[str, Any]) -> list:
    preset = params["preset"]
    if preset == "miniature":
        configs = miniature_build_configs(seed=params["seed"], count=params["count"])
    elif preset == "synthetic":
        configs = default_build_configs(seed=params["seed"])[: params["count"]]
    elif preset == "experimental":
        configs = experimental_build_configs(seed=params["seed"])[: params["count"]]
    else:
        raise Exception(f"Error: unexpected preset {preset}")
    # nested SequenceBuildConfig fields applied to every sequence, e.g. {"render": {"camera": {"width": 186}}}
    overrides = params.get("overrides") or {}
    if len(overrides) > 0:
        configs = [OmegaConf.to_object(OmegaConf.merge(OmegaConf.structured(c), overrides)) for c in configs]
    for c in configs:
        if c.id in params["test_ids"]:
            c.test = True
    return configs


def create_split(records: Dict[str, SequenceRecord], params: Dict[str, Any]) -> SplitPlan:
    """
    random chunk split, or whole held out validation sequences when val_ids is given

    :param records: sequences by id
    :param params: data params
    """
    if len(params["val_ids"]) == 0:
        return split(list(records.values()), seed=params["seed"])
    pool = [r for r in records.values() if not r.test]
    return SplitPlan(
        train=sorted((r.id, 0, len(r)) for r in pool if r.id not in params["val_ids"]),
        val=sorted((r.id, 0, len(r)) for r in pool if r.id in params["val_ids"]),
        seed=params["seed"],
        test=sorted(r.id for r in records.values() if r.test),
    )


def run_build(paths: Dict[str, str], params: Dict[str, Any]) -> Dict[str, SequenceRecord]:
    """
    run dataset build stage

    :param paths: paths dictionary
    :param params: data params
    """
    lgr = logging.getLogger("Fuse")
    lgr.info("Fuse Dock Build", {"attrs": ["bold", "underline"]})
    lgr.info(f'data_dir={paths["data_dir"]}', {"color": "magenta"})

    records = build_dataset(create_build_configs(params), paths["data_dir"], workers=params["workers"])
    lgr.info("Fuse Dock Build: Done", {"attrs": ["bold", "underline"]})
    return {r.id: r for r in records}


def run_train(paths: Dict[str, str], params: Dict[str, Any], data_params: Dict[str, Any], records: Dict[str, SequenceRecord]) -> None:
    """
    run train stage

    :param paths: paths dictionary
    :param params: training params
    :param data_params: data params, used for the split
    :param records: sequences by id
    """
    lgr = logging.getLogger("Fuse")
    lgr.info("Fuse Dock Train", {"attrs": ["bold", "underline"]})
    lgr.info(f'model_dir={paths["model_dir"]}', {"color": "magenta"})

    os.makedirs(paths["model_dir"], exist_ok=True)
    plan = create_split(records, data_params)
    write_split(plan, os.path.join(paths["model_dir"], "split.json"))
    lgr.info(f"split: {len(plan.train)} train ranges, {len(plan.val)} val ranges", {"color": "cyan"})

    config = config_from_dict(params)
    train(records, plan, config, out_dir=paths["model_dir"])
    lgr.info("Fuse Dock Train: Done", {"attrs": ["bold", "underline"]})


def run_eval(paths: Dict[str, str], params: Dict[str, Any], records: Dict[str, SequenceRecord]) -> List[dict]:
    """
    run evaluation stage on every test sequence

    :param paths: paths dictionary
    :param params: evaluation params
    :param records: sequences by id
    """
    lgr = logging.getLogger("Fuse")
    lgr.info("Fuse Dock Eval", {"attrs": ["bold", "underline"]})

    model, config = load_trained_model(os.path.join(paths["model_dir"], CHECKPOINT_FILE))
    thresholds = Thresholds(position_frac=params["position_threshold"], attitude_deg=params["attitude_threshold"])
    os.makedirs(paths["eval_dir"], exist_ok=True)
    results = []
    for sequence_id in sorted(i for i, r in records.items() if r.test):
        frame_errors, summary = evaluate(model, records[sequence_id], thresholds, downscale_factor=config.downscale)
        out_dir = os.path.join(paths["eval_dir"], sequence_id)
        os.makedirs(out_dir, exist_ok=True)
        write_frame_errors_csv(frame_errors, os.path.join(out_dir, "frame_errors.csv"))
        write_error_chart_svg(frame_errors, os.path.join(out_dir, "frame_errors.svg"), thresholds, title=sequence_id)
        lgr.info(f"{sequence_id}: {summary.summary_line()}", {"color": "green"})
        results.append(dict(sequence=sequence_id, **summary.to_dict()))

    with open(os.path.join(paths["eval_dir"], "summary.json"), "w") as f:
        json.dump(results, f, indent=2)
    lgr.info("Fuse Dock Eval: Done", {"attrs": ["bold", "underline"]})
    return results


if __name__ == "__main__":
    main()
