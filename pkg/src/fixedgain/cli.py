"""Command-line interface.

Four subcommands:

* ``design``  - run the pole placement and print the full design document
  (gains, realizations, transforms, transfer coefficients) as JSON.
* ``analyze`` - CSV response analyses of a design: white-noise gain,
  frequency response, step/impulse response, dc flatness.
* ``filter``  - run a design over a CSV of samples.
* ``tables``  - regenerate the two benchmark tables (second-order white-noise
  gain over memory length and lag; optimal lag and its gain).

All numeric output is emitted with ``repr`` so every value re-parses to the
exact in-memory double, and runs are byte-for-byte deterministic.

Exit codes: 0 success, 2 usage or parameter error, 3 design infeasibility
(unstable poles, unobservable or uncontrollable pair), 4 malformed input data.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Sequence

from . import analyze
from .design import (
    DesignResult,
    ObserverSpec,
    design,
    memory_to_pole,
    placement_residual,
    pole_to_memory,
)
from .errors import (
    FixedGainError,
    Uncontrollable,
    Unobservable,
    UnstablePoles,
)
from .linalg import Matrix
from .poly import Polynomial
from .process import ProcessModel
from .realize import ccf_realization, ocf_realization, pcf_realization, transfer_coefficients
from . import realize


class InputDataError(FixedGainError):
    """Input CSV could not be parsed as sample data."""


# ---------------------------------------------------------------------------
# argument parsing

def _pole_list(text: str) -> tuple[complex, ...]:
    try:
        return tuple(complex(tok.strip()) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse pole list {text!r}") from exc


def _add_design_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--order", type=int, required=True, metavar="K",
                        help="filter order (number of tracked states)")
    parser.add_argument("--ts", type=float, default=1.0, metavar="SEC",
                        help="sampling period in seconds (default 1.0)")
    where = parser.add_mutually_exclusive_group(required=True)
    where.add_argument("--pole", type=float, metavar="P",
                       help="repeated real pole in [0, 1)")
    where.add_argument("--memory", type=float, metavar="L",
                       help="memory length in samples; sets the pole to exp(-1/L)")
    where.add_argument("--poles", type=_pole_list, metavar="LIST",
                       help="comma-separated pole list (complex ok, e.g. '0.5,0.4+0.2j,0.4-0.2j')")
    parser.add_argument("--lag", type=float, default=0.0, metavar="Q",
                        help="read-out lag in samples (fractional/negative ok, default 0)")
    parser.add_argument("--deriv", type=int, default=0, metavar="D",
                        help="derivative order of the output (0 = position)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fixedgain",
        description="Design and analyze fixed-gain tracking filters by pole placement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser("design", help="run a design, print the JSON document")
    _add_design_args(p_design)
    p_design.add_argument("--form", choices=["kin", "pcf", "ocf", "ccf", "all"],
                          default="all", help="which realizations to include (default all)")
    p_design.set_defaults(func=cmd_design)

    p_analyze = sub.add_parser("analyze", help="CSV response analyses of a design")
    _add_design_args(p_analyze)
    what = p_analyze.add_mutually_exclusive_group(required=True)
    what.add_argument("--wng", action="store_true", help="white-noise gain")
    what.add_argument("--freq", action="store_true",
                      help="frequency response on 1024 points over [0, 0.5] cycles/sample")
    what.add_argument("--step", type=int, metavar="N", help="step response through sample N")
    what.add_argument("--impulse", action="store_true", help="impulse response until truncation")
    what.add_argument("--flatness", action="store_true",
                      help="dc derivative targets vs. measurements")
    p_analyze.set_defaults(func=cmd_analyze)

    p_filter = sub.add_parser("filter", help="run a design over CSV samples")
    _add_design_args(p_filter)
    p_filter.add_argument("--input", required=True, metavar="PATH",
                          help="CSV of samples: one column (value) or two (n,value); '-' for stdin")
    p_filter.add_argument("--emit", choices=["position", "state"], default="position",
                          help="emit the scalar output or the full kinematic state")
    p_filter.set_defaults(func=cmd_filter)

    p_tables = sub.add_parser("tables", help="regenerate the benchmark tables")
    p_tables.add_argument("--table", type=int, choices=[1, 2], required=True)
    p_tables.set_defaults(func=cmd_tables)

    return parser


def _design_from_args(args) -> DesignResult:
    model = ProcessModel(args.order, args.ts)
    if args.poles is not None:
        spec = ObserverSpec(model, args.poles, lag=args.lag, deriv=args.deriv)
    else:
        pole = args.pole if args.pole is not None else memory_to_pole(args.memory)
        spec = ObserverSpec.repeated(model, pole, lag=args.lag, deriv=args.deriv)
    return design(spec)


# ---------------------------------------------------------------------------
# document assembly

def _matrix_rows(m: Matrix) -> list[list[float]]:
    return [list(row) for row in m.data]


def _realization_entry(ss) -> dict:
    return {
        "transition": _matrix_rows(ss.transition),
        "input_gain": list(ss.input_gain.col(0)),
        "output_row": list(ss.output_row.row(0)),
        "kin_from_form": _matrix_rows(ss.kin_from_form),
        "form_from_kin": _matrix_rows(ss.form_from_kin),
    }


def design_document(
    result: DesignResult,
    forms: Sequence[str] = ("kin", "pcf", "ocf", "ccf"),
    omit_uncertifiable: bool = False,
) -> dict:
    """Serializable dictionary describing one design end to end.

    With ``omit_uncertifiable`` set, a realization whose transform fails
    certification is dropped from the document (its error message recorded
    under ``realizations_omitted``) instead of aborting the whole document;
    used when the caller asked for every form rather than a specific one.
    """
    spec = result.spec
    model = spec.process
    order = model.order
    ts = model.ts

    doc: dict = {
        "design": {
            "order": order,
            "sampling_period": ts,
            "poles": [[p.real, p.imag] for p in spec.poles],
            "lag": spec.lag,
            "derivative": spec.deriv,
        }
    }
    first = spec.poles[0]
    if first.imag == 0.0 and all(p == first for p in spec.poles):
        doc["design"]["pole"] = first.real
        if 0.0 < first.real < 1.0:
            doc["design"]["memory"] = pole_to_memory(first.real)

    kin = list(result.gains.kin.col(0))
    gains = {"kin": kin, "pcf": list(result.gains.pcf.col(0))}
    if order <= 3:
        gains["alpha"] = kin[0]
        if order >= 2:
            gains["beta"] = kin[1] * ts
        if order >= 3:
            gains["gamma"] = 2.0 * ts * ts * kin[2]
    doc["gains"] = gains

    doc["char_poly"] = list(result.char_poly.coeffs)
    doc["process_char_poly"] = list(model.char_poly.coeffs)
    doc["companion_columns"] = {
        "observer": list(result.companion_col_obs),
        "process": list(result.companion_col_prc),
    }
    doc["transforms"] = {
        "kin_from_pcf": _matrix_rows(result.kin_from_pcf),
        "pcf_from_kin": _matrix_rows(result.pcf_from_kin),
    }

    builders = {
        "kin": lambda: result.ss_kin,
        "pcf": lambda: pcf_realization(result),
        "ocf": lambda: ocf_realization(result),
        "ccf": lambda: ccf_realization(result),
    }
    realizations = {}
    omitted = {}
    for form in forms:
        try:
            realizations[form] = _realization_entry(builders[form]())
        except (Unobservable, Uncontrollable) as exc:
            if not omit_uncertifiable:
                raise
            omitted[form] = str(exc)
    doc["realizations"] = realizations
    if omitted:
        doc["realizations_omitted"] = omitted

    num, den = transfer_coefficients(result)
    doc["transfer"] = {
        "numerator": list(num.coeffs),
        "denominator": list(den.coeffs),
    }

    analysis = {"white_noise_gain": analyze.white_noise_gain(num, den)}
    if order == 2 and "pole" in doc["design"]:
        analysis["optimal_lag"] = analyze.optimal_lag_k2(doc["design"]["pole"])
    doc["analysis"] = analysis

    doc["verification"] = {"placement_residual": result.placement_residual}
    return doc


def verify_document(doc: dict) -> float:
    """Re-run the pole-placement residual check from a parsed document.

    Rebuilds the closed-loop transition and the companion similarity from the
    document's own matrices and evaluates the recovered characteristic
    polynomial at the document's poles.  A healthy document verifies to
    roundoff (comparable to its recorded placement_residual).
    """
    try:
        transition = Matrix(doc["realizations"]["kin"]["transition"])
        kin_from_pcf = Matrix(doc["transforms"]["kin_from_pcf"])
        pcf_from_kin = Matrix(doc["transforms"]["pcf_from_kin"])
        poles = [complex(re, im) for re, im in doc["design"]["poles"]]
    except (KeyError, TypeError) as exc:
        raise InputDataError(f"document is missing required fields: {exc}") from exc
    rotated = pcf_from_kin @ transition @ kin_from_pcf
    col = rotated.col(rotated.cols - 1)
    char = Polynomial([1.0] + [-c for c in reversed(col)])
    return placement_residual(char, poles)


# ---------------------------------------------------------------------------
# output helpers

def _fmt(value: float) -> str:
    return repr(float(value))


def _write_csv(header: Sequence[str], rows) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)


# ---------------------------------------------------------------------------
# subcommands

def cmd_design(args) -> int:
    result = _design_from_args(args)
    forms = ("kin", "pcf", "ocf", "ccf") if args.form == "all" else (args.form,)
    doc = design_document(result, forms=forms, omit_uncertifiable=args.form == "all")
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_analyze(args) -> int:
    result = _design_from_args(args)
    num, den = transfer_coefficients(result)
    spec = result.spec

    if args.wng:
        _write_csv(["quantity", "value"],
                   [["wng", _fmt(analyze.white_noise_gain(num, den))]])
    elif args.freq:
        rows = []
        for f, h in analyze.frequency_grid(num, den):
            mag = abs(h)
            db = 20.0 * math.log10(mag) if mag > 0.0 else -math.inf
            rows.append([_fmt(f), _fmt(h.real), _fmt(h.imag), _fmt(db),
                         _fmt(math.degrees(math.atan2(h.imag, h.real)))])
        _write_csv(["f", "re", "im", "magnitude_db", "phase_deg"], rows)
    elif args.step is not None:
        ys = analyze.step_response(result, args.step)
        _write_csv(["n", "y"], [[str(n), _fmt(y)] for n, y in enumerate(ys)])
    elif args.impulse:
        hs = analyze.impulse_response(num, den)
        _write_csv(["n", "h"], [[str(n), _fmt(h)] for n, h in enumerate(hs)])
    elif args.flatness:
        profile = analyze.flatness_profile(
            num, den, spec.deriv, spec.lag, spec.process.ts, spec.process.order
        )
        rows = [
            [str(k), _fmt(t.real), _fmt(t.imag), _fmt(m.real), _fmt(m.imag),
             _fmt(abs(m - t))]
            for k, (t, m) in enumerate(profile)
        ]
        _write_csv(["order", "target_re", "target_im", "measured_re",
                    "measured_im", "deviation"], rows)
    return 0


def _read_samples(path: str) -> list[tuple[str, float]]:
    """Parse the filter input CSV into (label, value) pairs.

    Accepts one column (value) or two (n,value); a single leading non-numeric
    row is treated as a header.  Anything else is an InputDataError.
    """
    try:
        if path == "-":
            lines = sys.stdin.read().splitlines()
        else:
            with open(path, "r", encoding="utf-8", newline="") as fh:
                lines = fh.read().splitlines()
    except OSError as exc:
        raise InputDataError(f"cannot read {path!r}: {exc}") from exc

    rows = [row for row in csv.reader(lines) if row]
    samples: list[tuple[str, float]] = []
    for i, row in enumerate(rows):
        if len(row) not in (1, 2):
            raise InputDataError(f"row {i + 1}: expected 1 or 2 columns, got {len(row)}")
        try:
            value = float(row[-1])
        except ValueError:
            if i == 0:
                continue  # header row
            raise InputDataError(f"row {i + 1}: non-numeric value {row[-1]!r}") from None
        label = row[0] if len(row) == 2 else str(len(samples))
        samples.append((label, value))
    return samples


def cmd_filter(args) -> int:
    result = _design_from_args(args)
    samples = _read_samples(args.input)
    order = result.order

    if args.emit == "position":
        header = ["n", "y"]
    else:
        header = ["n", "y"] + [f"state{i}" for i in range(order)]

    rows = []
    ss = result.ss_kin
    state = None
    for label, value in samples:
        if state is None:
            state = realize.initialize_state(ss, value)
            y = realize.read_output(ss, state)
        else:
            y = realize.step(ss, state, value)
        row = [label, _fmt(y)]
        if args.emit == "state":
            row.extend(_fmt(v) for v in realize.extract_kinematic(ss, state))
        rows.append(row)
    _write_csv(header, rows)
    return 0


_TABLE_MEMORIES = (2.0, 4.0, 8.0, 12.0, 16.0)
_TABLE_LAGS = (1.0, 0.0, -1.0)


def _second_order_wng(pole: float, lag: float) -> float:
    """White-noise gain of the order-2 design at the given pole and lag,
    computed through the full pipeline (design, realize, sum the impulse
    response) rather than the closed form."""
    model = ProcessModel(2, 1.0)
    result = design(ObserverSpec.repeated(model, pole, lag=lag))
    num, den = transfer_coefficients(result)
    return analyze.white_noise_gain(num, den)


def cmd_tables(args) -> int:
    header = ["q" if args.table == 1 else "quantity"] + [
        f"l={int(l)}" for l in _TABLE_MEMORIES
    ]
    rows = []
    if args.table == 1:
        for lag in _TABLE_LAGS:
            row = [_fmt(lag)]
            for memory in _TABLE_MEMORIES:
                row.append(_fmt(_second_order_wng(memory_to_pole(memory), lag)))
            rows.append(row)
    else:
        lag_row, wng_row = ["optimal_lag"], ["wng"]
        for memory in _TABLE_MEMORIES:
            pole = memory_to_pole(memory)
            lag = analyze.optimal_lag_k2(pole)
            lag_row.append(_fmt(lag))
            wng_row.append(_fmt(_second_order_wng(pole, lag)))
        rows = [lag_row, wng_row]
    _write_csv(header, rows)
    return 0


# ---------------------------------------------------------------------------

def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (UnstablePoles, Unobservable, Uncontrollable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InputDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except FixedGainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    try:
        code = main()
        sys.stdout.flush()
    except BrokenPipeError:
        # The reader went away (e.g. piped into `head`); behave like any
        # well-mannered filter instead of dumping a traceback.
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        code = 141
    sys.exit(code)


if __name__ == "__main__":
    console_main()
