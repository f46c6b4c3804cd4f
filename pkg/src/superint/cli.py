"""Command-line front end: verify, simulate, catalog.

Exit codes: 0 all asserted properties pass, 1 verification/simulation
failure, 2 configuration or usage error.  Reports and trajectories are
plain text with round-trip-safe floats (shortest repr by default,
hexadecimal with --hex-floats), so identical config + seed gives byte
identical output.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .brackets import independence_rank, involution_table, max_bracket_residual
from .catalog import EUCLIDEAN, FAMILIES, build, extra_integral
from .config import ExperimentConfig, load_config
from .core import energy_quantity
from .dynamics import IntegratorConfig, detect_closure, integrate
from .errors import ConfigError, InsufficientData, SingularApproach, SuperintError
from .integrals import universal_set


def _fmt(value: float, hex_floats: bool) -> str:
    return float(value).hex() if hex_floats else repr(float(value))


def _classification(cfg: ExperimentConfig, ms_established: bool) -> str:
    n = cfg.n
    if n == 2:
        base = "integrable (single universal integral)"
    elif n == 3:
        base = "minimally ('weak') superintegrable"
    else:
        base = "quasi-maximally superintegrable"
    if ms_established:
        return base + "; maximally superintegrable with the verified extra integrals"
    return base


def cmd_verify(config_path: Path, out_dir: Path, seed_override, threads: int,
               hex_floats: bool) -> int:
    cfg = load_config(config_path)
    seed = cfg.seed if seed_override is None else seed_override
    spec = build(cfg.descriptor)
    uni = universal_set(spec.realization)
    ver = cfg.verification
    n = cfg.n
    rng = np.random.default_rng(seed)

    table = involution_table(
        spec, uni, ver.sample_points, rng=rng, tolerance=ver.bracket_tol,
        threads=threads,
    )
    h = energy_quantity(spec)
    cert = independence_rank(
        [h, *uni.all], ver.sample_points, rng=rng,
        rank_tolerance=ver.rank_tol, kappa=cfg.descriptor.kappa,
        space=cfg.descriptor.space, threads=threads,
    )
    expected_rank = 2 * n - 2
    rank_ok = cert.numerical_rank == expected_rank

    extras = []
    extras_ok = True
    from .brackets import sample_for_spec

    points = sample_for_spec(spec, ver.sample_points, rng)
    for axis in cfg.extra_axes:
        quantity = extra_integral(cfg.descriptor, axis)
        raw, norm = max_bracket_residual(h, quantity, points)
        cert_x = independence_rank(
            [h, *uni.all, quantity], ver.sample_points, rng=rng,
            rank_tolerance=ver.rank_tol, kappa=cfg.descriptor.kappa,
            space=cfg.descriptor.space, threads=threads,
        )
        ok = norm < ver.bracket_tol and cert_x.numerical_rank == 2 * n - 1
        extras_ok &= ok
        extras.append((quantity.name, raw, norm, cert_x.numerical_rank, ok))

    identity_residual = None
    if cfg.descriptor.family == "sw" and cfg.descriptor.space == EUCLIDEAN:
        # sum_i I_i = 2 m H is an exact linear identity of the flat oscillator.
        mass = cfg.descriptor.params["mass"]
        all_extras = [extra_integral(cfg.descriptor, a) for a in range(n)]
        worst = 0.0
        for x in points:
            total = sum(e.value(x) for e in all_extras)
            hval = h.value(x)
            worst = max(worst, abs(total - 2.0 * mass * hval) / max(1.0, abs(2.0 * mass * hval)))
        identity_residual = worst
        extras_ok &= worst < 1e-12

    passed = table.passed and rank_ok and extras_ok
    lines = ["[meta]"]
    lines.append(f"tool = superint {__version__} verify")
    lines.append(f"config = {config_path.name}")
    lines.append(f"seed = {seed}")
    lines.append(f"family = {cfg.descriptor.family}")
    lines.append(f"space = {cfg.descriptor.space}")
    lines.append(f"n = {n}")
    lines.append(f"universal_integrals = {uni.count}")
    lines.append(f"classification = {_classification(cfg, extras_ok and bool(extras))}")
    lines.append("")
    lines.append("[involution]")
    lines.append(f"samples = {table.samples}")
    lines.append(f"tolerance = {_fmt(table.tolerance, hex_floats)}")
    for pair in table.pairs:
        lines.append(
            f"residual {pair.name_a} {pair.name_b} = "
            f"{_fmt(pair.max_raw, hex_floats)} {_fmt(pair.max_normalized, hex_floats)}"
        )
    worst = table.worst
    lines.append(f"worst_pair = {worst.name_a} {worst.name_b}")
    lines.append(f"pass = {str(table.passed).lower()}")
    lines.append("")
    lines.append("[independence]")
    lines.append(f"functions = {' '.join(cert.functions)}")
    lines.append(f"rank = {cert.numerical_rank}")
    lines.append(f"expected = {expected_rank}")
    lines.append(f"rank_tolerance = {_fmt(cert.rank_tolerance, hex_floats)}")
    lines.append(f"pass = {str(rank_ok).lower()}")
    if extras or identity_residual is not None:
        lines.append("")
        lines.append("[extras]")
        for name, raw, norm, rank, ok in extras:
            lines.append(
                f"bracket {name} = {_fmt(raw, hex_floats)} {_fmt(norm, hex_floats)}"
            )
            lines.append(f"rank_with {name} = {rank} (ceiling {2 * n - 1})")
            lines.append(f"pass {name} = {str(ok).lower()}")
        if identity_residual is not None:
            lines.append(
                f"oscillator_sum_identity_residual = {_fmt(identity_residual, hex_floats)}"
            )
    lines.append("")
    lines.append("[result]")
    lines.append(f"pass = {str(passed).lower()}")

    report_path = out_dir / f"{config_path.stem}.report.txt"
    report_path.write_text("\n".join(lines) + "\n")
    print(f"{'PASS' if passed else 'FAIL'}: report written to {report_path}")
    return 0 if passed else 1


def _build_monitors(cfg: ExperimentConfig, spec, uni):
    monitors = []
    tokens = cfg.simulation.monitors
    if "energy" in tokens:
        monitors.append(energy_quantity(spec))
    if "universal" in tokens:
        monitors.extend(uni.all)
    if "extras" in tokens:
        monitors.extend(extra_integral(cfg.descriptor, a) for a in cfg.extra_axes)
    return monitors


def cmd_simulate(config_path: Path, out_dir: Path, seed_override, threads: int,
                 hex_floats: bool) -> int:
    cfg = load_config(config_path)
    if cfg.simulation is None:
        raise ConfigError("a [simulation] section is required for simulate")
    seed = cfg.seed if seed_override is None else seed_override
    sim = cfg.simulation
    spec = build(cfg.descriptor)
    uni = universal_set(spec.realization)
    monitors = _build_monitors(cfg, spec, uni)
    n = cfg.n
    from .core import PhasePoint

    x0 = PhasePoint(sim.x0[:n], sim.x0[n:])
    icfg = IntegratorConfig(
        method=sim.method, step=sim.step, fixed_point_tol=sim.fixed_point_tol
    )
    halted = None
    try:
        traj = integrate(spec, x0, sim.t_final, icfg, monitors)
    except SingularApproach as err:
        traj = getattr(err, "trajectory", None)
        halted = err
        if traj is None:
            raise

    cols = ["t"] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)]
    cols += [m.name for m in monitors]
    lines = [
        f"# superint {__version__} trajectory",
        f"# config = {config_path.name}",
        f"# seed = {seed}",
        f"# system = {cfg.descriptor.family} {cfg.descriptor.space} n={n}",
        f"# method = {sim.method} step = {_fmt(sim.step, hex_floats)}",
        "# columns: " + " ".join(cols),
    ]
    stride = sim.output_stride
    for i in range(traj.n_states):
        if i % stride and i != traj.n_states - 1:
            continue
        row = [_fmt(traj.times[i], hex_floats)]
        row += [_fmt(v, hex_floats) for v in traj.q[i]]
        row += [_fmt(v, hex_floats) for v in traj.p[i]]
        row += [_fmt(traj.monitors[m.name][i], hex_floats) for m in monitors]
        lines.append(" ".join(row))
    for name, value in traj.drift.items():
        lines.append(f"# drift {name} = {_fmt(value, hex_floats)}")
    if traj.drift:
        lines.append(
            f"# max_normalized_drift = {_fmt(max(traj.drift.values()), hex_floats)}"
        )
    if halted is not None:
        lines.append(f"# halted = {halted}")
    elif sim.closure_tol is not None:
        try:
            report = detect_closure(traj, sim.closure_tol)
            lines.append(f"# closure is_closed = {str(report.is_closed).lower()}")
            lines.append(
                f"# closure distance = {_fmt(report.closure_distance, hex_floats)}"
            )
            if report.period_estimate is not None:
                lines.append(
                    f"# closure period_estimate = {_fmt(report.period_estimate, hex_floats)}"
                )
        except InsufficientData as exc:
            lines.append(f"# closure unavailable = {exc}")

    traj_path = out_dir / f"{config_path.stem}.traj.txt"
    traj_path.write_text("\n".join(lines) + "\n")
    if halted is not None:
        print(f"HALTED: {halted}; partial trajectory written to {traj_path}",
              file=sys.stderr)
        return 1
    print(f"trajectory written to {traj_path}")
    return 0


def cmd_catalog() -> int:
    print("Hamiltonian families (central construction: H = h(J-, J+, J3))")
    print()
    for name, info in FAMILIES.items():
        print(f"{name}")
        params = ", ".join(info["params"]) if info["params"] else "none"
        print(f"  parameters : {params} + barrier coefficients")
        if info["profiles"]:
            print(f"  profiles   : {', '.join(info['profiles'])} "
                  "(polynomial coefficients in configs)")
        print(f"  spaces     : {', '.join(info['spaces'])}")
        print(f"  integrals  : {info['ms']}")
        print()
    print("Every family shares the universal integrals C^2..C^N and C_2..C_N")
    print("(2N-3 distinct functions; the two N-member sets are in involution).")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="superint",
        description="Construct and numerically certify superintegrable "
        "Hamiltonians on flat and curved spaces.",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (default: $SUPERINT_OUT or the "
                        "current directory)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for sample sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify", "simulate"):
        p = sub.add_parser(name)
        p.add_argument("config", type=Path)
        p.add_argument("--hex-floats", action="store_true",
                       help="write floats as hexadecimal literals")
    sub.add_parser("catalog")
    args = parser.parse_args(argv)

    if args.out is not None:
        out_dir = args.out
    elif os.environ.get("SUPERINT_OUT"):
        out_dir = Path(os.environ["SUPERINT_OUT"])
    else:
        out_dir = Path.cwd()
    try:
        if args.command == "catalog":
            return cmd_catalog()
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "verify":
            return cmd_verify(args.config, out_dir, args.seed, args.threads,
                              args.hex_floats)
        return cmd_simulate(args.config, out_dir, args.seed, args.threads,
                            args.hex_floats)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SingularApproach as exc:
        print(f"singular approach: {exc}", file=sys.stderr)
        return 1
    except SuperintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
