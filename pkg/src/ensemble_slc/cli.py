"""
Command-line front end: ``ensemble-slc {train|test|trajectory|reproduce}``.

Exit codes: 0 success, 1 numerical failure, 2 invalid configuration or
input, 3 acceptance miss (``reproduce`` only). Nothing is written to the
output directory unless the whole configuration validates.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .config import PRESETS, THRESHOLDS, resolve
from .dynamics import ControlField, propagate
from .errors import ConfigurationError, DimensionError, NumericalFailure, ValidationError
from .model import MemberParams, make_model
from .objective import performance
from .sampling import DispersionSpec, build_training_grid, sample_test_members
from .slc import TrainConfig, evaluate, train

logger = logging.getLogger("ensemble_slc")

EXIT_OK, EXIT_NUMERICAL, EXIT_INVALID, EXIT_MISS = 0, 1, 2, 3


class AcceptanceMiss(Exception):
    pass


def named_control(name, cfg, n_controls):
    """``"sin"``, ``"zero"`` or a control CSV, shaped for ``cfg``."""
    if name == "sin":
        return ControlField.from_function(np.sin, cfg.T, cfg.Q, n_controls)
    if name == "zero":
        return ControlField(cfg.T, np.zeros((cfg.Q, n_controls)))
    return io.read_control(name, n_slices=cfg.Q, n_controls=n_controls, T=cfg.T)


def training_grid(cfg):
    return build_training_grid(DispersionSpec(cfg.Omega, cfg.Theta, cfg.N_Omega, cfg.N_Theta))


def evaluation_members(cfg, pinned=None):
    if pinned:
        return list(pinned)
    return sample_test_members(cfg.Omega, cfg.Theta, cfg.test_count, cfg.seed)


def _train_files(cfg, model, workers):
    grid = training_grid(cfg)
    initial = named_control(cfg.initial_control, cfg, model.n_controls)
    tc = TrainConfig(eta=cfg.eta, epsilon=cfg.epsilon, initial_control=initial, max_iterations=cfg.max_iterations)

    def progress(k, j):
        if k % 1000 == 0:
            logger.info("iteration %d  J_N = %.10f", k, j)

    result = train(model, grid, tc, workers=workers, callback=progress)
    run_id = cfg.run_id
    files = {
        "control.csv": io.control_csv(result.learned_control, run_id),
        "convergence.csv": io.convergence_csv(result.convergence_log, run_id),
        "manifest.txt": io.manifest_text(
            cfg,
            "train",
            version=__version__,
            converged=result.converged,
            iterations_used=result.iterations_used,
            initial_J_N=result.convergence_log[0][1],
            final_J_N=result.final_performance,
            J_N_decreases=result.decreases,
        ),
    }
    return result, files


def run_train(cfg, out_dir, workers=1):
    """Train ``cfg`` and write control.csv, convergence.csv and manifest.txt."""
    model = make_model(cfg.model)
    result, files = _train_files(cfg, model, workers)
    io.write_outputs(out_dir, files)
    logger.info(
        "converged=%s after %d iterations, J_N=%.10f", result.converged, result.iterations_used, result.final_performance
    )
    return result


def _test_files(cfg, model, control, members, workers, **extra):
    report = evaluate(model, control, members, seed=cfg.seed, workers=workers)
    grid_j = performance(model, training_grid(cfg), control, workers=workers)
    run_id = cfg.run_id
    files = {
        "fidelities.csv": io.fidelities_csv(report, run_id),
        "summary.json": io.summary_json(
            report, run_id, model=cfg.model, preset=cfg.preset, training_grid_J_N=grid_j, **extra
        ),
    }
    return report, files


def run_test(cfg, control_path, out_dir, members=None, workers=1):
    """Evaluate a stored control on random (or pinned) members."""
    model = make_model(cfg.model)
    control = io.read_control(control_path, n_slices=cfg.Q, n_controls=model.n_controls, T=cfg.T)
    report, files = _test_files(cfg, model, control, evaluation_members(cfg, members), workers)
    io.write_outputs(out_dir, files)
    logger.info("tested %d members: mean %.6f min %.6f max %.6f", report.count, report.mean, report.min, report.max)
    return report


def run_trajectory(cfg, control_name, out_dir, members=None, count=5, bloch=None):
    """Write one CSV per member with its state along the pulse.

    ``bloch=None`` picks Bloch coordinates for two-level models and
    amplitudes otherwise.
    """
    model = make_model(cfg.model)
    if bloch is None:
        bloch = model.dim == 2
    elif bloch and model.dim != 2:
        raise ValidationError(f"Bloch output needs a two-level model, {cfg.model} has dim {model.dim}")
    control = named_control(control_name, cfg, model.n_controls)
    if not members:
        members = sample_test_members(cfg.Omega, cfg.Theta, count, cfg.seed)
    files = {}
    for i, member in enumerate(members):
        traj = propagate(model, member, control)
        files[f"trajectory_{i:03d}.csv"] = io.trajectory_csv(traj.times, traj.states, cfg.run_id, bloch)
    rows = [(i, float(w), float(t)) for i, (w, t) in enumerate(members)]
    files["trajectory_members.csv"] = io.csv_text(["index", "omega", "theta"], rows, cfg.run_id)
    return io.write_outputs(out_dir, files)


def run_reproduce(cfg, out_dir, workers=1):
    """Train and test a preset, then check it against its acceptance bounds."""
    if cfg.preset not in THRESHOLDS:
        raise ConfigurationError("reproduce needs --preset")
    thresholds = THRESHOLDS[cfg.preset]
    model = make_model(cfg.model)
    result, files = _train_files(cfg, model, workers)
    misses = []
    if thresholds.require_converged and not result.converged:
        misses.append(f"training did not reach J_N > 1 - {cfg.epsilon}")
    report = evaluate(model, result.learned_control, evaluation_members(cfg), seed=cfg.seed, workers=workers)
    misses += thresholds.check(report.mean, report.min)
    _, test_files = _test_files(
        cfg, model, result.learned_control, report.members, workers, acceptance="pass" if not misses else "miss", misses=misses
    )
    files.update(test_files)
    io.write_outputs(out_dir, files)
    print(f"{cfg.preset}: mean {report.mean:.6f} min {report.min:.6f} max {report.max:.6f}")
    if misses:
        raise AcceptanceMiss("; ".join(misses))
    return result, report


def _member(text):
    try:
        w, t = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected OMEGA,THETA, got {text!r}") from None
    return MemberParams(w, t)


def _assignment(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def build_parser():
    parser = argparse.ArgumentParser(prog="ensemble-slc", description="Sampling-based learning control of inhomogeneous quantum ensembles.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS), help="start from a named experiment")
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--out", help="output directory (default runs/<preset or custom>)")
    common.add_argument("--seed", type=int, help="test-member RNG seed")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads (results do not depend on it)")
    common.add_argument("--eta", help="learning rate")
    common.add_argument("--epsilon", help="stop once J_N > 1 - epsilon")
    common.add_argument("--max-iterations", dest="max_iterations")
    common.add_argument("--test-count", dest="test_count")
    common.add_argument("--set", action="append", type=_assignment, default=[], metavar="KEY=VALUE", help="override any configuration key")
    common.add_argument("-q", "--quiet", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("train", parents=[common], help="learn a control on the training grid")
    p = sub.add_parser("test", parents=[common], help="evaluate a control on random members")
    p.add_argument("--control", required=True, help="control.csv written by train")
    p.add_argument("--member", action="append", type=_member, metavar="OMEGA,THETA", help="test this member instead of sampling (repeatable)")
    p = sub.add_parser("trajectory", parents=[common], help="export state trajectories")
    p.add_argument("--control", required=True, help="control.csv, or 'sin' / 'zero'")
    p.add_argument("--member", action="append", type=_member, metavar="OMEGA,THETA")
    p.add_argument("--count", type=int, default=5, help="random members when --member is absent")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--bloch", dest="bloch", action="store_true", default=None, help="x, y, z columns (two-level only)")
    fmt.add_argument("--amplitudes", dest="bloch", action="store_false", help="Re/Im amplitude columns")
    sub.add_parser("reproduce", parents=[common], help="train + test a preset and check its acceptance bounds")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        overrides = dict(args.set)
        for key in ("seed", "eta", "epsilon", "max_iterations", "test_count"):
            if getattr(args, key) is not None:
                overrides[key] = str(getattr(args, key))
        cfg = resolve(args.preset, args.config, overrides)
        out = Path(args.out or Path("runs") / (cfg.preset or "custom"))
        workers = max(1, args.threads)
        if args.command == "train":
            run_train(cfg, out, workers)
        elif args.command == "test":
            run_test(cfg, args.control, out, members=args.member, workers=workers)
        elif args.command == "trajectory":
            if args.count < 1:
                raise ConfigurationError("--count must be >= 1")
            run_trajectory(cfg, args.control, out, members=args.member, count=args.count, bloch=args.bloch)
        else:
            run_reproduce(cfg, out, workers)
    except (ConfigurationError, ValidationError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except AcceptanceMiss as exc:
        print(f"acceptance miss: {exc}", file=sys.stderr)
        return EXIT_MISS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
