"""Command-line interface.

Subcommands: ``dfunc``, ``state``, ``wigner``, ``interferometer`` and
``verify``. Exit status is 0 on success, 1 when a verification suite misses
its tolerance, and 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .core import HalfInteger
from .interferometer import InterferometerConfig, output_state_direct, output_wigner_covariant
from .io import SpecError, dfunc_table, field_to_gridfile, format_gridfile, load_spec, spec_to_json
from .special import dfunction_matrix
from .states import FOLDS, build_state, decompose
from .verify import SUITES, run_all
from .wigner import DEFAULT_TAIL_TOL, GridSpec, PhaseConvention, WignerField, wigner_grid

__all__ = ["main", "build_parser", "CONFIG_SCHEMA"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CONFIG_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["gain"],
    "properties": {
        "gain": {"type": "number", "minimum": 0},
        "pump_phase": {"type": "number"},
        "total_phase": {"type": "number"},
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 as well, but keep the message terse
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _half(value: str) -> HalfInteger:
    try:
        return HalfInteger.of(value)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a half-integer: {value!r}") from exc


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("grid")
    g.add_argument("--grid", choices=("disk", "polar"), default="disk")
    g.add_argument("--n", type=int, default=201, help="disk grid points per axis")
    g.add_argument("--extent", type=float, default=0.99, help="disk grid half-width")
    g.add_argument("--n-tau", type=int, default=60)
    g.add_argument("--n-chi", type=int, default=96)
    g.add_argument("--tau-max", type=float, default=3.0)
    p.add_argument(
        "--convention",
        choices=[c.value for c in PhaseConvention],
        default=PhaseConvention.PER_IRREP_NORMALIZED.value,
    )
    p.add_argument("--fold", choices=FOLDS, default="sectors")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
    p.add_argument("--no-timestamp", action="store_true", help="omit the creation time from headers")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="su11wigner", description="SU(1,1) Wigner functions of two-mode states.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dfunc", help="tabulate d-functions")
    p.add_argument("--k", type=_half, required=True)
    p.add_argument("--mu", type=_half, help="single row index (default: all)")
    p.add_argument("--mu-prime", type=_half, help="single column index (default: all)")
    p.add_argument("--count", type=int, default=5, help="weights per axis when --mu/--mu-prime are absent")
    p.add_argument("--tau", type=float, nargs="+", required=True)
    p.add_argument("--out", default="-")

    p = sub.add_parser("state", help="build a state and summarize its irrep content")
    p.add_argument("spec")
    p.add_argument("--fold", choices=FOLDS, default="sectors")
    p.add_argument("--out", default="-")

    p = sub.add_parser("wigner", help="evaluate the Wigner function on a grid")
    p.add_argument("spec")
    _add_grid_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("interferometer", help="input and output fields of a balanced interferometer")
    p.add_argument("spec")
    p.add_argument("--config", help="JSON file with gain, pump_phase, total_phase")
    p.add_argument("--gain", type=float)
    p.add_argument("--pump-phase", type=float, default=0.0)
    p.add_argument("--phase", type=float, default=0.0, help="total phase in the arms")
    p.add_argument("--route", choices=("covariant", "direct"), default="covariant")
    _add_grid_flags(p)
    p.add_argument("--out-input", required=True)
    p.add_argument("--out-output", required=True)

    p = sub.add_parser("verify", help="run oracle-equivalence suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--out", default="-")
    return parser


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _grid(args) -> GridSpec:
    if args.grid == "disk":
        return GridSpec.disk(args.n, args.extent)
    return GridSpec.polar(args.n_tau, args.n_chi, args.tau_max)


def _stamp(args) -> dict:
    if args.no_timestamp:
        return {}
    return {"created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}


def _field_text(field: WignerField, extra: dict) -> str:
    return format_gridfile(field_to_gridfile(field, extra))


def cmd_dfunc(args) -> int:
    k = args.k
    if k.twice < 1:
        raise UsageError("k must be >= 1/2")
    for name in ("mu", "mu_prime"):
        v = getattr(args, name)
        if v is not None and (v < k or not (v - k).is_integer):
            raise UsageError(f"--{name.replace('_', '-')} must be k, k+1, ...")
    if args.count < 1:
        raise UsageError("--count must be positive")
    for t in args.tau:
        if not (math.isfinite(t) and t >= 0):
            raise UsageError("tau must be finite and >= 0")
    rows_i = [(args.mu - k).twice // 2] if args.mu is not None else list(range(args.count))
    cols_j = [(args.mu_prime - k).twice // 2] if args.mu_prime is not None else list(range(args.count))
    size = max(rows_i + cols_j) + 1
    rows = []
    for t in args.tau:
        m = dfunction_matrix(k, t, size)
        for i in rows_i:
            for j in cols_j:
                rows.append((k.twice, k.twice + 2 * i, k.twice + 2 * j, t, float(m[i, j])))
    _write(args.out, dfunc_table(rows))
    return EXIT_OK


def cmd_state(args) -> int:
    spec = load_spec(args.spec)
    st = build_state(spec)
    dec = decompose(st, fold=args.fold)
    blocks = [
        {"k": str(b.k), "copies": b.copies, "mu_count": b.mu_count, "norm_squared": b.norm_squared}
        for b in dec.blocks
    ]
    doc = {"spec": spec_to_json(spec), "state": st.metadata(), "fold": dec.fold, "norm_squared": dec.norm_squared,
           "blocks": blocks}
    _write(args.out, json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")
    return EXIT_OK


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [obj.real, obj.imag]
    if isinstance(obj, (tuple, np.ndarray)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _jsonable(value):
    return json.loads(json.dumps(value, default=_json_default))


def cmd_wigner(args) -> int:
    spec = load_spec(args.spec)
    st = build_state(spec)
    dec = decompose(st, fold=args.fold)
    field = wigner_grid(dec, _grid(args), args.convention, args.tail_tol)
    extra = {"spec": spec_to_json(spec), "state": _jsonable(st.metadata()), **_stamp(args)}
    field = WignerField(field.grid, field.values, field.convention, _jsonable(field.metadata))
    _write(args.out, _field_text(field, extra))
    return EXIT_OK


def _config(args) -> InterferometerConfig:
    if args.config:
        import jsonschema

        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
        try:
            jsonschema.validate(doc, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SpecError(f"interferometer config: {exc.message}") from None
        return InterferometerConfig(doc["gain"], doc.get("pump_phase", 0.0), doc.get("total_phase", 0.0))
    if args.gain is None:
        raise UsageError("either --config or --gain is required")
    return InterferometerConfig(args.gain, args.pump_phase, args.phase)


def cmd_interferometer(args) -> int:
    cfg = _config(args)
    spec = load_spec(args.spec)
    st = build_state(spec)
    dec = decompose(st, fold=args.fold)
    grid = _grid(args)
    conv = PhaseConvention.parse(args.convention)
    field_in = wigner_grid(dec, grid, conv, args.tail_tol)
    if args.route == "covariant":
        field_out = output_wigner_covariant(dec, cfg, grid, conv, args.tail_tol)
    else:
        out_state = output_state_direct(st, cfg)
        field_out = wigner_grid(decompose(out_state, fold=args.fold), grid, conv, args.tail_tol)
        meta = dict(field_out.metadata)
        meta.update({"route": "direct", "interferometer": cfg.to_dict(), "output_state": out_state.metadata()})
        field_out = WignerField(grid, field_out.values, conv, meta)
    common = {"spec": spec_to_json(spec), "interferometer": cfg.to_dict(), **_stamp(args)}
    for path, field, role in ((args.out_input, field_in, "input"), (args.out_output, field_out, "output")):
        field = WignerField(field.grid, field.values, field.convention, _jsonable(field.metadata))
        _write(path, _field_text(field, {**common, "role": role, "route": args.route}))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(['all', *SUITES])}")
    report = run_all(None if args.suite == "all" else [args.suite])
    _write(args.out, json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report["passed"] else EXIT_FAIL


COMMANDS = {
    "dfunc": cmd_dfunc,
    "state": cmd_state,
    "wigner": cmd_wigner,
    "interferometer": cmd_interferometer,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SpecError, ValueError, OSError) as exc:
        print(f"su11wigner {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
