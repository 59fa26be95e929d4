"""Command-line front end for scenario runs, dataset generation, and one-off tools.

Exit codes: 0 on success, 2 when a configuration or input value fails
validation, 1 on any runtime failure.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from ._validation import ValidationError
from .arraymodel import ArrayGeometry
from .compression import (TruncationPolicy, energy_fraction, svd, truncate,
                          truncation_rank)
from .dataset import generate_dataset, parse_dataset_spec
from .farfield import array_factor, default_grid
from .pso import PsoConfig, make_objective_context, optimize
from .scenario import (export_pattern, load_scenario, read_complex_csv,
                       run_scenario, write_complex_csv)


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None,
                        help="override the rng seed")
    parser.add_argument("--out", default=None,
                        help="override the output path")
    parser.add_argument("--grid-step", type=float, default=None,
                        help="evaluation grid step in degrees")


def _grid(args):
    return default_grid(args.grid_step if args.grid_step is not None else 0.05)


def _cmd_scenario_run(args):
    scenario = load_scenario(args.scenario)
    scenario = scenario.with_overrides(seed=args.seed, output_dir=args.out,
                                       grid_step_deg=args.grid_step)
    result = run_scenario(scenario)
    print(f"bundle: {result.output_dir}")
    for name, cut in sorted(result.summary["cuts"].items()):
        print(f"{name} pointing mae: {cut['pointing_mae_deg']:.6f} deg")
    print(f"max |K|: {result.summary['max_abs_k']:.6f}")
    if "pso" in result.summary:
        pso = result.summary["pso"]
        print(f"pso objective: {pso['objective']:.6f} "
              f"(feasible: {pso['feasible']})")
    return 0


def _cmd_dataset_generate(args):
    spec = parse_dataset_spec(args.spec)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    if args.grid_step is not None:
        spec = dataclasses.replace(spec, grid_step_deg=args.grid_step)
    out = args.out if args.out is not None else "dataset.jsonl"

    def progress(done, total, cell):
        angle, n, rank = cell
        print(f"[{done}/{total}] angle={angle} n={n} rank={rank}", flush=True)

    result = generate_dataset(spec, out, progress=progress)
    if result.resumed_from:
        print(f"resumed from record {result.resumed_from}")
    print(f"dataset: {result.path} ({result.total} records)")
    return 0


def _cmd_pattern_export(args):
    weights = read_complex_csv(args.weights)
    if not 0 <= args.row < weights.shape[0]:
        raise ValidationError(
            f"--row: must lie in [0, {weights.shape[0]})")
    geometry = ArrayGeometry.linear(weights.shape[1], spacing=args.spacing)
    pattern = array_factor(weights[args.row], _grid(args), geometry)
    out = args.out if args.out is not None else f"pattern.{args.format}"
    export_pattern(pattern, out, format=args.format)
    print(f"pattern: {out}")
    return 0


def _cmd_compress(args):
    matrix = read_complex_csv(args.weights)
    policy = TruncationPolicy(kind=args.policy, value=args.value)
    factors = svd(matrix)
    kept = truncation_rank(factors, policy)
    b = truncate(factors, policy)
    out = args.out if args.out is not None else "compressed.csv"
    write_complex_csv(out, b.values)
    print(f"compressed: {out}")
    print(f"kept rank: {kept}")
    print(f"energy fraction: {energy_fraction(factors, kept):.6f} "
          f"(squared: {energy_fraction(factors, kept, squared=True):.6f})")
    return 0


def _cmd_pso(args):
    matrix = read_complex_csv(args.weights)
    geometry = ArrayGeometry.linear(matrix.shape[1], spacing=args.spacing)
    b = truncate(svd(matrix), TruncationPolicy.fixed_rank(args.rank))
    ctx = make_objective_context(matrix, b.values, geometry,
                                 grid_deg=_grid(args), rank=args.rank)
    config = PsoConfig(swarm_size=args.swarm_size, iterations=args.iterations,
                       rng_seed=args.seed if args.seed is not None else 0)
    result = optimize(ctx, config)
    out = Path(args.out if args.out is not None else "pso_out")
    out.mkdir(parents=True, exist_ok=True)
    write_complex_csv(out / "livg.csv", result.livg.c)
    history = "\n".join(f"{i},{repr(float(v))}"
                        for i, v in enumerate(result.history))
    (out / "history.csv").write_text("iteration,gbest_objective\n"
                                     + history + "\n")
    (out / "result.json").write_text(json.dumps(
        {"indices": [int(i) for i in result.indices],
         "objective": float(result.objective),
         "max_abs_k": float(result.max_k),
         "feasible": bool(result.feasible)},
        indent=2, sort_keys=True) + "\n")
    print(f"indices: {list(result.indices)}")
    print(f"objective: {result.objective:.6f}")
    print(f"max |K|: {result.max_k:.6f} (feasible: {result.feasible})")
    print(f"artifacts: {out}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="beambasis",
        description="Beam-steering weight compression and basis selection.")
    sub = parser.add_subparsers(dest="command", required=True)

    scenario = sub.add_parser("scenario", help="scenario bundle operations")
    scenario_sub = scenario.add_subparsers(dest="scenario_command",
                                           required=True)
    run = scenario_sub.add_parser("run", help="run one scenario end to end")
    run.add_argument("scenario",
                     help="scenario file path or bundled scenario name")
    _add_common(run)
    run.set_defaults(func=_cmd_scenario_run)

    dataset = sub.add_parser("dataset", help="training dataset operations")
    dataset_sub = dataset.add_subparsers(dest="dataset_command", required=True)
    generate = dataset_sub.add_parser("generate",
                                      help="generate (or resume) a dataset")
    generate.add_argument("spec", help="dataset spec file")
    _add_common(generate)
    generate.set_defaults(func=_cmd_dataset_generate)

    pattern = sub.add_parser("pattern", help="far-field pattern operations")
    pattern_sub = pattern.add_subparsers(dest="pattern_command", required=True)
    export = pattern_sub.add_parser("export", help="export one row's pattern")
    export.add_argument("weights", help="complex weight-matrix csv")
    export.add_argument("--row", type=int, default=0,
                        help="weight-matrix row to evaluate")
    export.add_argument("--spacing", type=float, default=0.5,
                        help="element pitch in wavelengths")
    export.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_common(export)
    export.set_defaults(func=_cmd_pattern_export)

    compress = sub.add_parser("compress",
                              help="rank-truncate a weight matrix")
    compress.add_argument("weights", help="complex weight-matrix csv")
    compress.add_argument("--policy", choices=("rank", "threshold", "energy"),
                          default="rank")
    compress.add_argument("--value", type=float, default=4)
    _add_common(compress)
    compress.set_defaults(func=_cmd_compress)

    pso = sub.add_parser("pso", help="swarm-optimize a basis selection")
    pso.add_argument("weights", help="complex weight-matrix csv")
    pso.add_argument("--rank", type=int, default=4)
    pso.add_argument("--spacing", type=float, default=0.5,
                     help="element pitch in wavelengths")
    pso.add_argument("--swarm-size", type=int, default=50)
    pso.add_argument("--iterations", type=int, default=200)
    _add_common(pso)
    pso.set_defaults(func=_cmd_pso)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary: report and exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
