"""Command-line interface.

Subcommands: ``run`` (execute a scenario file), ``preset`` (list or emit the
built-in scenarios), ``thresholds`` (collapse-threshold calculator) and
``selftest`` (quick oracle suite).  Exit codes: 0 success, 1 internal error,
2 configuration error, 3 run terminated by blow-up (distinct so parameter
sweeps can classify outcomes without parsing logs).
"""

from __future__ import annotations

import argparse
import math
import sys
import traceback

import numpy as np

from .config import ConfigError, emit_toml, load_config
from .diagnostics import MassPreconditionError, case1_threshold, case2_threshold
from .presets import preset, preset_names
from .runner import execute

__all__ = ["main", "console_main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocalpop",
        description="Pseudo-spectral simulator for interacting populations "
        "with nonlocal advection on periodic domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a TOML config")
    p_run.add_argument("--config", required=True, help="path to the scenario file")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--seed", type=int, default=None, help="initial-data seed override")
    p_run.add_argument("--threads", type=int, default=None, help="FFT worker threads")

    p_preset = sub.add_parser("preset", help="list or emit built-in scenarios")
    p_preset.add_argument("--list", action="store_true", help="list preset names")
    p_preset.add_argument("--name", default=None, help="preset to emit")
    p_preset.add_argument("--emit", default=None, help="path for the emitted TOML")

    p_thr = sub.add_parser("thresholds", help="collapse-threshold calculator")
    p_thr.add_argument("--case", type=int, choices=(1, 2), required=True)
    p_thr.add_argument("--mass", type=float, required=True, help="total initial mass P")
    p_thr.add_argument("--dmax", type=float, required=True, help="largest diffusion coefficient")
    p_thr.add_argument("--volume", type=float, required=True, help="torus volume |T^n|")
    p_thr.add_argument("--species", type=int, default=None, help="species count (case 2)")

    sub.add_parser("selftest", help="run the built-in oracle checks")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    result = execute(config, out_dir=args.out, seed=args.seed, threads=args.threads)
    print(
        f"terminated: {result.termination.label} at t = {result.termination.t:.6g} "
        f"after {result.termination.step_count} steps -> {result.out_dir}"
    )
    return result.exit_code


def _cmd_preset(args) -> int:
    if args.list:
        for name in preset_names():
            print(name)
        return 0
    if args.name is None:
        raise ConfigError("preset: give --list or --name NAME")
    try:
        config = preset(args.name)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc
    text = emit_toml(config)
    if args.emit:
        with open(args.emit, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.emit}")
    else:
        print(text, end="")
    return 0


def _cmd_thresholds(args) -> int:
    try:
        if args.case == 1:
            gamma_star = case1_threshold(args.mass, args.dmax, args.volume)
            print(f"gamma_star = {gamma_star!r}")
            print(
                f"mass precondition: satisfied (P = {args.mass} > |T|/2 = {args.volume / 2})"
            )
        else:
            if args.species is None:
                raise ConfigError("thresholds: case 2 needs --species N")
            gamma_star = case2_threshold(args.mass, args.dmax, args.volume, args.species)
            print(f"gamma_star = {gamma_star!r}")
            print(
                f"mass precondition: satisfied (P = {args.mass} > N|T|/2 = "
                f"{args.species * args.volume / 2})"
            )
        print("collapse predicted when the relevant coupling lies below gamma_star")
    except MassPreconditionError as exc:
        print(f"mass precondition: FAILED ({exc})")
    return 0


def _selftest_convolution() -> bool:
    from .grid import make_grid
    from .kernels import cosine_bump, delta, gaussian_periodic, kernel_symbol, sample_on_grid, top_hat
    from .spectral import convolve
    from .grid import Field

    grid = make_grid(2, (0.5, 0.5), (8, 8))
    rng = np.random.default_rng(7)
    specs = [cosine_bump(0.3), top_hat(0.2), gaussian_periodic(0.1), delta()]
    worst = 0.0
    for spec in specs:
        sym = kernel_symbol(spec, grid)
        if spec.is_delta:
            kernel_offsets = None
        else:
            sampled = sample_on_grid(spec, grid).values
            kernel_offsets = np.fft.ifftshift(sampled)
        for _ in range(10):
            u = rng.standard_normal(grid.shape)
            fast = convolve(sym, Field(grid, u)).values
            if kernel_offsets is None:
                direct = u
            else:
                direct = np.zeros(grid.shape)
                nx, ny = grid.shape
                for ix in range(nx):
                    for iy in range(ny):
                        acc = 0.0
                        for jx in range(nx):
                            for jy in range(ny):
                                acc += (
                                    kernel_offsets[(ix - jx) % nx, (iy - jy) % ny]
                                    * u[jx, jy]
                                )
                        direct[ix, iy] = acc * grid.cell_volume
            worst = max(worst, float(np.max(np.abs(fast - direct))))
    return worst < 1e-12


def _selftest_semigroup() -> bool:
    from .grid import Field, make_grid
    from .spectral import heat_propagate

    grid = make_grid(1, (0.5,), (64,))
    x = grid.coordinates()[0]
    u = Field(grid, np.sin(2.0 * math.pi * x))
    decayed = heat_propagate(u, 1.0, 0.01)
    expected = math.exp(-4.0 * math.pi**2 * 0.01)
    err_decay = float(np.max(np.abs(decayed.values - expected * u.values)))
    two_step = heat_propagate(heat_propagate(u, 1.0, 0.004), 1.0, 0.006)
    err_semi = float(np.max(np.abs(two_step.values - decayed.values)))
    return err_decay < 1e-10 and err_semi < 1e-12


def _selftest_clamp_inequalities() -> bool:
    from .grid import Field, make_grid
    from .spectral import gradient

    grid = make_grid(1, (0.5,), (64,))
    cell = grid.cell_volume
    rng = np.random.default_rng(11)
    for _ in range(100):
        v = rng.standard_normal(grid.shape)
        w = rng.standard_normal(grid.shape)
        hv = np.maximum(v, 0.0)
        hw = np.maximum(w, 0.0)
        grad = gradient(Field(grid, v))[0].values
        masked = np.where(v > 0.0, grad, 0.0)
        if np.sum(hv**2) > np.sum(v**2) + 1e-12:
            return False
        if np.sum(masked**2) > np.sum(grad**2) + 1e-12:
            return False
        if np.sum(np.abs(hv * grad)) > np.sum(np.abs(v * grad)) + 1e-12:
            return False
        lhs = math.sqrt(np.sum((hv - hw) ** 2) * cell)
        rhs = math.sqrt(np.sum((v - w) ** 2) * cell)
        if lhs > rhs + 1e-12:
            return False
    return True


def _cmd_selftest(args) -> int:
    checks = [
        ("convolution vs direct quadrature (8x8, all kernel kinds)", _selftest_convolution),
        ("heat semigroup decay and composition", _selftest_semigroup),
        ("positive-part cutoff norm inequalities", _selftest_clamp_inequalities),
    ]
    failed = 0
    for label, check in checks:
        ok = check()
        print(f"{'PASS' if ok else 'FAIL'}  {label}")
        if not ok:
            failed += 1
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "preset":
            return _cmd_preset(args)
        if args.command == "thresholds":
            return _cmd_thresholds(args)
        if args.command == "selftest":
            return _cmd_selftest(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


def console_main() -> None:
    sys.exit(main())
