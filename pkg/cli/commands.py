# cli/commands.py
"""
Subcommand implementations.

Every command takes the parsed argparse namespace plus the process Settings
and returns an exit code; errors propagate to cli.main, which maps them to
exit codes.
"""

import json
import sys
from argparse import Namespace
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from tqdm import tqdm

from augment.config import AugmentConfig, load_augment_config
from augment.pipeline import augment_case
from cli.exit_codes import ExitCode
from config.logging_config import get_logger
from config.settings import Settings, parse_dims
from distance_transform.transform import edt, signed_edt
from gradcheck.suite import default_specs, gradcheck_suite
from losses.boundary import hausdorff_reciprocal
from losses.dispatch import evaluate_loss
from losses.spec import LossKind, LossSpec, load_loss_spec
from metrics.report import MetricReport, encode_real, evaluate_case
from optimdemo.descent import DescentConfig, load_descent_config, run_descent
from optimdemo.phantoms import make_phantom
from preproc.pipeline import DEFAULT_CHANNEL_NAMES, PreprocessMeta, describe_case, preprocess_case
from preproc.resample import restore_geometry
from volume.errors import GeometryError, PairingError
from volume.volume import BinaryMask, MultiChannelVolume, ProbVolume, binarize
from volume_io.mha import read_mha, write_array_mha, write_mha
from volume_io.reports import emit_report, write_trajectory


logger = get_logger(__name__)

CHANNEL_FILES = ("input_ch0.mha", "input_ch1.mha")
LABEL_FILE = "label.mha"
META_FILE = "meta.json"


def _print_json(data: Dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(data, indent=2) + "\n")


def _dims(raw: str):
    try:
        return parse_dims(raw)
    except ValueError as e:
        raise GeometryError(str(e)) from e


def cmd_preprocess(args: Namespace, settings: Settings) -> int:
    adc = read_mha(args.adc, as_mask=False)
    zadc = read_mha(args.zadc, as_mask=False)
    label = read_mha(args.label, as_mask=True)
    target_dims = _dims(args.dims) if args.dims else settings.target_dims

    x, resampled_label = preprocess_case(adc, zadc, label, target_dims)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for channel, name in zip(x.channels, CHANNEL_FILES):
        write_mha(channel, out / name, compressed=args.compress)
    write_mha(resampled_label, out / LABEL_FILE, compressed=args.compress)
    meta = describe_case(Path(args.label).stem, adc, target_dims)
    (out / META_FILE).write_text(json.dumps(meta.to_dict(), indent=2))

    logger.info("preprocess_written", out=str(out), target_dims=target_dims)
    return ExitCode.OK


def pair_cases(pred_dir: Path, truth_dir: Path) -> List[str]:
    """Filenames present in both directories; PairingError on any orphan"""
    if not pred_dir.is_dir():
        raise FileNotFoundError(f"prediction directory not found: {pred_dir}")
    if not truth_dir.is_dir():
        raise FileNotFoundError(f"truth directory not found: {truth_dir}")
    pred_names = {p.name for p in pred_dir.glob("*.mha")}
    truth_names = {p.name for p in truth_dir.glob("*.mha")}
    orphans = sorted(pred_names ^ truth_names)
    if orphans:
        raise PairingError(f"unpaired files: {', '.join(orphans)}")
    if not pred_names:
        raise PairingError(f"no .mha files found in {pred_dir}")
    return sorted(pred_names)


def _evaluate_pair(pred_dir: Path, truth_dir: Path, name: str, tau_mm: float, label: str) -> MetricReport:
    pred = read_mha(pred_dir / name, as_mask=True)
    truth = read_mha(truth_dir / name, as_mask=True)
    return evaluate_case(pred, truth, tau_mm, case_id=Path(name).stem, label=label)


def cmd_eval(args: Namespace, settings: Settings) -> int:
    pred_dir, truth_dir = Path(args.pred), Path(args.truth)
    names = pair_cases(pred_dir, truth_dir)
    tau_mm = args.tau if args.tau is not None else settings.tau_mm
    workers = args.workers or settings.workers

    def evaluate(name: str) -> MetricReport:
        return _evaluate_pair(pred_dir, truth_dir, name, tau_mm, args.label)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(evaluate, names))
    else:
        reports = [evaluate(name) for name in names]
    reports.sort(key=lambda r: r.case_id)

    emit_report(reports, args.format, args.out, label=args.label)
    return ExitCode.OK


def _read_probabilities(path: str) -> ProbVolume:
    volume = read_mha(path)
    return ProbVolume(volume.geometry, volume.array)


def cmd_loss(args: Namespace, settings: Settings) -> int:
    spec = load_loss_spec(args.spec)
    p = _read_probabilities(args.pred)
    g = read_mha(args.truth, as_mask=True)

    result = evaluate_loss(spec, p, g)
    output = result.to_dict()
    output["hausdorff_reciprocal"] = hausdorff_reciprocal(binarize(p), g)
    _print_json(output)

    if args.grad:
        write_array_mha(result.gradient, g.geometry, args.grad, element_type="MET_DOUBLE")
    return ExitCode.OK


def _loss_specs(names: Optional[List[str]]) -> List[LossSpec]:
    if not names:
        return default_specs()
    return [LossSpec.default(LossKind.parse(name)) for name in names]


def cmd_gradcheck(args: Namespace, settings: Settings) -> int:
    sizes = [_dims(s) for s in args.sizes]
    report = gradcheck_suite(
        seed=args.seed if args.seed is not None else 0,
        sizes=sizes,
        specs=_loss_specs(args.loss),
        n_pairs=args.pairs,
        h=args.h,
        empty_truth=args.empty_truth,
        show_progress=args.progress,
    )
    sys.stdout.write(report.to_text() + "\n")
    return ExitCode.OK if report.all_passed else ExitCode.FAILED


def descent_config_from_args(args: Namespace, loss: Optional[str] = None) -> DescentConfig:
    """DescentConfig from --config, overridden by explicit flags"""
    base = load_descent_config(args.config) if args.config else DescentConfig()
    overrides: Dict[str, Any] = {}
    loss_name = loss or args.loss
    if loss_name:
        overrides["loss"] = base.loss.model_copy(update={"kind": LossKind.parse(loss_name)})
    for flag, key in (("steps", "steps"), ("step_size", "step_size"), ("clip", "clip_max_norm"),
                      ("rescale", "rescale"), ("seed", "seed"), ("log_every", "log_every"), ("tau", "tau_mm")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    return DescentConfig.model_validate({**base.model_dump(), **overrides})


def _descent_target(args: Namespace) -> BinaryMask:
    if args.target:
        return read_mha(args.target, as_mask=True)
    return make_phantom(args.phantom, _dims(args.dims))


def cmd_demo_optimize(args: Namespace, settings: Settings) -> int:
    cfg = descent_config_from_args(args)
    target = _descent_target(args)
    result = run_descent(target, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory(result.to_frame(), out / "trajectory.csv")
    write_mha(result.final_mask, out / "final_mask.mha")

    final = result.final
    _print_json({
        "loss": cfg.loss.kind.cli_name,
        "steps": cfg.steps,
        "step_size": cfg.effective_step_size,
        "initial_loss": result.trajectory[0].loss,
        "final_loss": final.loss,
        "final_dice": final.dice,
        "final_msd_mm": encode_real(final.msd_mm),
        "final_nsd": final.nsd,
        "false_negatives": final.false_negatives,
    })
    return ExitCode.OK


def cmd_compare(args: Namespace, settings: Settings) -> int:
    target = _descent_target(args)
    kinds = [LossKind.parse(name) for name in args.loss] if args.loss else list(LossKind)

    reports = []
    for kind in tqdm(kinds, desc="compare", disable=not args.progress):
        cfg = descent_config_from_args(args, loss=kind.cli_name)
        result = run_descent(target, cfg)
        reports.append(evaluate_case(result.final_mask, target, cfg.tau_mm,
                                     case_id=kind.cli_name, label=kind.table_label))

    emit_report(reports, args.format, args.out)
    return ExitCode.OK


def cmd_edt(args: Namespace, settings: Settings) -> int:
    mask = read_mha(args.mask, as_mask=True)
    field = signed_edt(mask) if args.signed else edt(mask)
    write_array_mha(field.array, mask.geometry, args.out, element_type="MET_DOUBLE")

    finite = field.array[np.isfinite(field.array)]
    _print_json({
        "signed": field.signed,
        "empty_source": field.is_empty_source,
        "min_mm": float(finite.min()) if finite.size else None,
        "max_mm": float(finite.max()) if finite.size else None,
    })
    return ExitCode.OK


def _read_preprocessed(directory: Path):
    channels = tuple(read_mha(directory / name, as_mask=False) for name in CHANNEL_FILES)
    label = read_mha(directory / LABEL_FILE, as_mask=True)
    meta_path = directory / META_FILE
    names = DEFAULT_CHANNEL_NAMES
    if meta_path.is_file():
        names = PreprocessMeta.from_dict(json.loads(meta_path.read_text())).channel_names
    return MultiChannelVolume(channels, names), label


def cmd_augment(args: Namespace, settings: Settings) -> int:
    cfg = load_augment_config(args.config) if args.config else AugmentConfig()
    if args.seed is not None:
        cfg = cfg.model_copy(update={"seed": args.seed})
    x, label = _read_preprocessed(Path(args.input))

    x, label, log = augment_case(x, label, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for channel, name in zip(x.channels, CHANNEL_FILES):
        write_mha(channel, out / name)
    write_mha(label, out / LABEL_FILE)
    (out / "applied_log.json").write_text(log.to_json())
    _print_json(log.to_dict())
    return ExitCode.OK


def cmd_restore(args: Namespace, settings: Settings) -> int:
    meta = PreprocessMeta.from_dict(json.loads(Path(args.meta).read_text()))
    pred = read_mha(args.pred, as_mask=True)
    restored = restore_geometry(pred, meta.original_geometry)
    write_mha(restored, args.out)
    logger.info("prediction_restored", dims=restored.dims, case_id=meta.case_id)
    return ExitCode.OK


def schema_documents() -> Dict[str, Any]:
    """JSON schemas of the config files the commands accept"""
    return {
        "LossSpec": LossSpec.model_json_schema(),
        "AugmentConfig": AugmentConfig.model_json_schema(),
        "DescentConfig": DescentConfig.model_json_schema(),
    }


def cmd_schema(args: Namespace, settings: Settings) -> int:
    _print_json(schema_documents())
    return ExitCode.OK
