"""Command-line surface: generate corpora, run each verification, emit reports.

Commands: gen, norm, decompose, jn, expint, duality.

Exit codes: 0 success; 1 bad input or flags; 2 the tool ran but a verified
inequality failed, so CI can gate on the math.  Output files are written
atomically (temp file + rename), so a failing run leaves no partial output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from .cubes import DyadicCube, root_address
from .decomposition import check_features, decompose
from .duality import duality_report, load_atomic_sum, random_atomic_sum
from .grids import GENERATOR_KINDS, GridFunction, dumps, generate, load
from .integrability import exp_integrability_sweep, sweep_to_csv
from .john_nirenberg import containment_check, verify_jn
from .oscillation import bmo_seminorm

_EXPINT_SLACK = 1e-9


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; 2 is reserved for violated
    # inequalities here, so usage errors become exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _write_bytes(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        _write_bytes(args.output, text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _parse_params(items: list[str] | None) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise ValueError(f"--param expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        if "," in raw:
            params[key] = tuple(float(tok) for tok in raw.split(","))
        else:
            params[key] = float(raw)
    return params


def _parse_cube(text: str | None, dimension: int) -> DyadicCube:
    if text is None:
        return root_address(dimension)
    try:
        level_part, _, index_part = text.partition(":")
        level = int(level_part)
        index = tuple(int(tok) for tok in index_part.split(","))
    except ValueError:
        raise ValueError(f"--cube expects LEVEL:I0,I1,..., got {text!r}") from None
    if len(index) != dimension:
        raise ValueError(
            f"--cube index has {len(index)} components, function has dimension {dimension}"
        )
    return DyadicCube(level, index)


def _load_input(args) -> GridFunction:
    return load(args.input)


def _maybe_render(args, render, *render_args) -> bytes | None:
    # rendering happens before any output is written, so a plot failure
    # (exit 1) leaves no files behind
    if not getattr(args, "plot", None):
        return None
    from . import plots

    return getattr(plots, render)(*render_args)


def _write_plot(args, data: bytes | None) -> None:
    if data is not None:
        _write_bytes(args.plot, data)


def cmd_gen(args) -> int:
    phi = generate(
        args.kind,
        n=args.n,
        levels=args.levels,
        params=_parse_params(args.param),
        seed=args.seed,
        origin=tuple(float(t) for t in args.origin.split(",")) if args.origin else None,
        side=args.side,
    )
    _write_bytes(args.output, dumps(phi, args.format).encode("utf-8"))
    return 0


def cmd_norm(args) -> int:
    result = bmo_seminorm(_load_input(args))
    cube = result.argmax_cube
    _emit(
        args,
        _json_text(
            {
                "bmo_norm": result.value,
                "argmax_cube": {"level": cube.level, "index": list(cube.index)},
            }
        ),
    )
    return 0


def cmd_decompose(args) -> int:
    phi = _load_input(args)
    decomp = decompose(phi, theta=args.theta, max_generations=args.max_generations)
    features = check_features(phi, decomp)
    containment = [
        containment_check(phi, decomp, lam)
        for lam in range(1, decomp.max_generation + 1)
    ]
    payload = decomp.to_dict()
    payload["features"] = features.to_dict()
    payload["containment"] = [c.to_dict() for c in containment]
    figure = _maybe_render(args, "render_decomposition", phi, decomp)
    _emit(args, _json_text(payload))
    _write_plot(args, figure)
    ok = features.all_passed and all(c.passed for c in containment)
    return 0 if ok else 2


def cmd_jn(args) -> int:
    phi = _load_input(args)
    report = verify_jn(
        phi,
        cube=_parse_cube(args.cube, phi.dimension),
        alpha_max=args.alpha_max,
        steps=args.steps,
    )
    figure = _maybe_render(args, "render_jn_curve", report)
    _emit(args, report.to_csv() if args.format == "csv" else _json_text(report.to_dict()))
    _write_plot(args, figure)
    return 0 if report.dominated else 2


def cmd_expint(args) -> int:
    phi = _load_input(args)
    rows = exp_integrability_sweep(
        phi,
        cube=_parse_cube(args.cube, phi.dimension),
        zeta_max=args.zeta_max,
        steps=args.zeta_steps,
    )
    passed = all(not r.admissible or r.lhs <= r.bound + _EXPINT_SLACK for r in rows)
    figure = _maybe_render(args, "render_exp_sweep", rows)
    if args.format == "csv":
        _emit(args, sweep_to_csv(rows))
    else:
        _emit(
            args,
            _json_text(
                {
                    "check": "exponential-integrability",
                    "passed": passed,
                    "rows": [r.to_dict() for r in rows],
                }
            ),
        )
    _write_plot(args, figure)
    return 0 if passed else 2


def cmd_duality(args) -> int:
    phi = _load_input(args)
    if args.atoms:
        atomic_sum = load_atomic_sum(args.atoms, phi)
    else:
        atomic_sum = random_atomic_sum(phi, args.random_atoms, seed=args.atom_seed)
    report = duality_report(phi, atomic_sum)
    payload = report.to_dict()
    payload["terms"] = len(atomic_sum.terms)
    _emit(args, _json_text(payload))
    return 0 if report.passed else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="dyadic-bmo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a grid function")
    p.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--side", type=float, default=1.0)
    p.add_argument("--origin", help="comma-separated root origin (default zeros)")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("norm", help="dyadic BMO seminorm and its argmax cube")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("decompose", help="stopping-time decomposition + feature checks")
    p.add_argument("--input", required=True)
    p.add_argument("--theta", type=float, default=math.e)
    p.add_argument("--max-generations", type=int, default=5)
    p.add_argument("--output")
    p.add_argument("--plot", metavar="PNG")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("jn", help="distribution measure vs exponential bound")
    p.add_argument("--input", required=True)
    p.add_argument("--cube", metavar="LEVEL:I0,I1,...")
    p.add_argument("--alpha-max", type=float)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output")
    p.add_argument("--plot", metavar="PNG")
    p.set_defaults(func=cmd_jn)

    p = sub.add_parser("expint", help="exponential integrability sweep")
    p.add_argument("--input", required=True)
    p.add_argument("--cube", metavar="LEVEL:I0,I1,...")
    p.add_argument("--zeta-max", type=float)
    p.add_argument("--zeta-steps", type=int, default=20)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output")
    p.add_argument("--plot", metavar="PNG")
    p.set_defaults(func=cmd_expint)

    p = sub.add_parser("duality", help="atomic-sum pairing vs the duality bound")
    p.add_argument("--input", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--atoms", help="atomic sum JSON file")
    group.add_argument("--random-atoms", type=int, metavar="COUNT")
    p.add_argument("--atom-seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_duality)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"dyadic-bmo {args.command}: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
