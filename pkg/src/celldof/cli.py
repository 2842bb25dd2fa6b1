"""Command-line interface.

Subcommands map one-to-one onto the analysis modules: ``analyze`` (spectrum
and mode transforms), ``loops``, ``power``, ``simulate``, ``classify``,
``clarke``, ``catalog`` and ``fixtures``.  Inputs are topology JSON files or
``catalog:<name>`` references.  All exact values are printed as ``p/q``
strings; floating values (simulation traces, normalized bases, Clarke
matrices) are printed with 12 significant digits, so identical inputs
produce byte-identical outputs.

Exit codes: 0 success, 1 bad input, 2 fixture mismatch, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction

from . import classify as classify_mod
from . import loops as loops_mod
from . import power as power_mod
from . import simulate as simulate_mod
from . import spectral as spectral_mod
from . import topology as topology_mod
from .catalog import CATALOG_NAMES, catalog as load_catalog_entry, verify_all
from .ratmat import RationalMatrix, SingularMatrixError
from .spectral import UnsupportedSpectrumError


class CliInputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; 2 means fixture mismatch here
        raise CliInputError(message)


def _fmt_float(x: float) -> str:
    return format(float(x), ".12g")


def _frac(x: Fraction) -> str:
    return str(x)


def _mat_doc(m: RationalMatrix) -> list[list[str]]:
    return [[_frac(x) for x in row] for row in m.rows]


def _float_rows(rows) -> list[list[float]]:
    return [[float(x) for x in row] for row in rows]


def _resolve_input(ref: str):
    """(topology, catalog entry or None) from a path or catalog:<name>."""
    if ref.startswith("catalog:"):
        entry = load_catalog_entry(ref.split(":", 1)[1])
        return entry.topology, entry
    try:
        topo = topology_mod.load_topology(ref)
    except FileNotFoundError:
        raise CliInputError(f"topology file not found: {ref}")
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise CliInputError(f"bad topology document {ref}: {exc}")
    return topo, None


def _basis_for(topo, entry):
    if entry is not None:
        return entry.computed_basis()
    return spectral_mod.topology_basis(topo)


def _emit(doc, args) -> int:
    if args.format == "json":
        text = json.dumps(doc, indent=2) + "\n"
    elif args.format == "text":
        buf = io.StringIO()
        _render_text(doc, buf, 0)
        text = buf.getvalue()
    elif args.format == "csv":
        buf = io.StringIO()
        _render_csv(doc, buf, "")
        text = buf.getvalue()
    else:
        raise CliInputError(f"unknown format {args.format!r}")
    _write_out(text, args.out)
    return 0


def _write_out(text: str, out: str | None):
    if out in (None, "-", "stdout"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _render_text(doc, fh, depth):
    pad = "  " * depth
    if isinstance(doc, dict):
        for k, v in doc.items():
            if isinstance(v, (dict, list)):
                fh.write(f"{pad}{k}:\n")
                _render_text(v, fh, depth + 1)
            else:
                fh.write(f"{pad}{k}: {v}\n")
    elif isinstance(doc, list):
        if doc and all(isinstance(x, list) for x in doc):
            for row in doc:
                fh.write(pad + "  ".join(str(x) for x in row) + "\n")
        else:
            for x in doc:
                if isinstance(x, (dict, list)):
                    fh.write(f"{pad}-\n")
                    _render_text(x, fh, depth + 1)
                else:
                    fh.write(f"{pad}- {x}\n")
    else:
        fh.write(f"{pad}{doc}\n")


def _render_csv(doc, fh, path):
    if isinstance(doc, dict):
        for k, v in doc.items():
            _render_csv(v, fh, f"{path}.{k}" if path else str(k))
    elif isinstance(doc, list):
        for i, v in enumerate(doc):
            _render_csv(v, fh, f"{path}[{i}]")
    else:
        fh.write(f"{path},{doc}\n")


# -- subcommands -----------------------------------------------------------------

def _cmd_analyze(args) -> int:
    topo, entry = _resolve_input(args.input)
    spec = spectral_mod.spectrum(topo)
    doc: dict = {
        "topology": topology_mod.topology_to_dict(topo),
        "spectrum_method": spec.method,
        "spectrum_exact": spec.exact,
    }
    if not spec.exact:
        doc["eigenvalues"] = [_fmt_float(v) for v in spec.values]
        doc["note"] = "non-integer spectrum: eigenbasis unavailable on the exact path"
        return _emit(doc, args)
    basis = _basis_for(topo, entry)
    g_arm = Fraction(args.g_arm)
    modal = spectral_mod.modal_conductance(basis, g_arm)
    doc["eigenvalues"] = [_frac(v) for v in basis.eigenvalues]
    doc["mode_labels"] = list(basis.labels)
    doc["vectors"] = _mat_doc(basis.vectors)
    doc["vectors_inv"] = _mat_doc(basis.vectors_inv)
    doc["g_arm"] = _frac(g_arm)
    doc["modal_diagonal"] = [_frac(v) for v in modal.diagonal]
    doc["edge_voltage_matrix"] = _mat_doc(spectral_mod.edge_voltage_matrix(topo, basis))
    doc["edge_current_matrix"] = _mat_doc(spectral_mod.edge_current_matrix(topo, basis))
    if topo.external_conductance is not None:
        doc["composite_laplacian"] = _mat_doc(spectral_mod.composite_laplacian(topo))
    if entry is not None:
        doc["deviations"] = [
            {
                "fixture": d.fixture_id,
                "published": d.published,
                "derived": d.derived,
                "rationale": d.rationale,
            }
            for d in entry.deviations
        ]
    return _emit(doc, args)


def _cmd_loops(args) -> int:
    topo, _ = _resolve_input(args.input)
    lb = loops_mod.topology_loops(topo)
    doc = {
        "signs": _mat_doc(lb.signs),
        "rank": lb.rank,
        "columns": _mat_doc(lb.columns),
        "squared_norms": [_frac(x) for x in lb.squared_norms],
        "labels": list(lb.labels),
        "edge_members": [list(m) for m in lb.edge_members()],
    }
    return _emit(doc, args)


def _cmd_power(args) -> int:
    topo, entry = _resolve_input(args.input)
    basis = _basis_for(topo, entry)
    modal = spectral_mod.modal_conductance(basis, Fraction(args.g_arm))
    lb = loops_mod.topology_loops(topo) if args.with_loops else None
    if args.loop_voltage and lb is None:
        raise CliInputError("--loop-voltage requires --with-loops")
    dec = power_mod.power_decomposition(
        topo, basis, modal, loops=lb, include_loop_voltage=args.loop_voltage
    )

    def pm_doc(pm):
        return {
            "labels": [[lab.current_mode, lab.voltage_mode] for lab in pm.labels],
            "coeffs": _mat_doc(pm.coeffs),
        }

    balance = power_mod.power_balance(
        topo, basis, modal, loops=lb, include_loop_voltage=args.loop_voltage
    )
    doc = {
        "node_power": pm_doc(dec.nodes),
        "edge_power": pm_doc(dec.edges),
        "node_rank": dec.node_rank,
        "edge_rank": dec.edge_rank,
        "node_basis": _mat_doc(dec.node_basis),
        "node_basis_squared_norms": [_frac(x) for x in dec.node_basis_norms],
        "edge_basis": _mat_doc(dec.edge_basis),
        "edge_basis_squared_norms": [_frac(x) for x in dec.edge_basis_norms],
        "balance": {
            f"{lab.current_mode},{lab.voltage_mode}": _frac(v)
            for lab, v in balance.items()
        },
    }
    return _emit(doc, args)


def _load_schedule(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise CliInputError(f"schedule file not found: {path}")
    except json.JSONDecodeError as exc:
        raise CliInputError(f"bad schedule JSON: {exc}")

    def block(key):
        return {
            str(lab): simulate_mod.waveform_from_dict(w)
            for lab, w in doc.get(key, {}).items()
        }

    try:
        return block("external"), block("internal"), block("loops")
    except (TypeError, ValueError, AttributeError) as exc:
        raise CliInputError(f"bad schedule document: {exc}")


def _cmd_simulate(args) -> int:
    topo, entry = _resolve_input(args.input)
    basis = _basis_for(topo, entry)
    external, internal, loop_drives = _load_schedule(args.schedule)
    lb = loops_mod.topology_loops(topo)
    config = simulate_mod.SimConfig(
        mode=args.mode,
        g_arm=args.g_arm_si,
        l_arm=args.l_arm_si,
        dt=args.dt,
        duration=args.T,
        integrator=args.method,
    )
    if args.mode == "resistive":
        trace = simulate_mod.solve_resistive(
            topo, basis, external, internal, loop_drives, config, loops=lb
        )
    else:
        trace = simulate_mod.solve_inductive(
            topo, basis, external, internal, loop_drives, config, loops=lb
        )
    drives = dict(external)
    for lab, w in internal.items():
        drives.setdefault(lab, w)
    report = simulate_mod.verify_decoupling(trace, drives)
    buf = io.StringIO()
    trace.write_csv(buf)
    buf.write("# decoupling " + json.dumps(report.as_dict(), sort_keys=True) + "\n")
    buf.write(
        "# kcl_residual " + _fmt_float(simulate_mod.kcl_residual(topo, trace)) + "\n"
    )
    _write_out(buf.getvalue(), args.out)
    return 0


def _cmd_classify(args) -> int:
    topo, entry = _resolve_input(args.input)
    try:
        with open(args.ports, "r", encoding="utf-8") as fh:
            spec = classify_mod.PortSpec.from_dict(json.load(fh))
    except FileNotFoundError:
        raise CliInputError(f"ports file not found: {args.ports}")
    except (json.JSONDecodeError, ValueError) as exc:
        raise CliInputError(f"bad ports document: {exc}")
    result = classify_mod.classify_ports(topo, spec)
    doc = {
        "ports": {name: list(vs) for name, vs in spec.ports},
        "gip": result.gip,
        "dcp": result.dcp,
        "category": result.category,
    }
    if topo.partitions is not None:
        tb = _basis_for(topo, entry)
        report = classify_mod.decoupled_ports(tb, topo.partitions)
        doc["mode_ports"] = [
            {"vertices": list(vs), "modes": list(modes)} for vs, modes in report.ports
        ]
    return _emit(doc, args)


def _cmd_clarke(args) -> int:
    entry = load_catalog_entry("Y")
    result = classify_mod.clarke_transition(entry.reference_basis(), args.variant)
    doc = {
        "variant": result.variant,
        "transition": [[_fmt_float(x) for x in row] for row in result.transition],
        "clarke": [[_fmt_float(x) for x in row] for row in result.clarke],
        "residual": _fmt_float(result.residual),
        "reference_comparison": {
            "reference": [
                [_fmt_float(x) for x in row] for row in classify_mod.REFERENCE_TRANSITION
            ],
            "max_abs_diff": _fmt_float(result.reference_max_diff),
            "matches": result.reference_max_diff < 1e-9,
        },
    }
    return _emit(doc, args)


def _cmd_catalog(args) -> int:
    if args.list or args.name is None:
        return _emit({"topologies": list(CATALOG_NAMES)}, args)
    entry = load_catalog_entry(args.name)
    doc = {
        "name": entry.name,
        "topology": topology_mod.topology_to_dict(entry.topology),
        "eigenvalues": [_frac(v) for v in entry.eigenvalues],
        "mode_labels": list(entry.labels),
        "reference_inverse_rows": [
            [_frac(x) for x in row] for row in entry.reference_inverse_rows
        ],
        "deviations": [
            {
                "fixture": d.fixture_id,
                "published": d.published,
                "derived": d.derived,
                "rationale": d.rationale,
            }
            for d in entry.deviations
        ],
    }
    return _emit(doc, args)


def _cmd_fixtures(args) -> int:
    if not args.verify:
        raise CliInputError("fixtures requires --verify")
    checks = verify_all()
    lines = []
    worst = 0
    for c in checks:
        lines.append(f"{c.entry}:{c.fixture_id}: {c.status}" + (f" ({c.note})" if c.note else ""))
        if c.status == "mismatch":
            worst = 2
    counts = {
        "match": sum(1 for c in checks if c.status == "match"),
        "deviation": sum(1 for c in checks if c.status == "deviation"),
        "mismatch": sum(1 for c in checks if c.status == "mismatch"),
    }
    lines.append(
        f"summary: {counts['match']} match, {counts['deviation']} explained deviations, "
        f"{counts['mismatch']} mismatches"
    )
    _write_out("\n".join(lines) + "\n", args.out)
    return worst


def build_parser() -> _Parser:
    parser = _Parser(prog="celldof", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text", "csv"), default="json")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--quiet", action="store_true", help="suppress warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="spectrum, eigenbasis, modal matrices")
    p.add_argument("input", help="topology JSON path or catalog:<name>")
    p.add_argument("--g-arm", default="1", help="arm conductance as p/q (exact)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("loops", parents=[common], help="circulating-current loop basis")
    p.add_argument("input")
    p.set_defaults(func=_cmd_loops)

    p = sub.add_parser("power", parents=[common], help="instantaneous power decomposition")
    p.add_argument("input")
    p.add_argument("--g-arm", default="1")
    p.add_argument("--with-loops", action="store_true")
    p.add_argument("--loop-voltage", action="store_true")
    p.set_defaults(func=_cmd_power)

    p = sub.add_parser("simulate", parents=[common], help="time-domain modal simulation")
    p.add_argument("input")
    p.add_argument("--schedule", required=True, help="schedule JSON path")
    p.add_argument("--mode", choices=("resistive", "inductive"), default="resistive")
    p.add_argument("--method", choices=("rk4", "exact"), default="rk4")
    p.add_argument("--dt", type=float, default=1e-5)
    p.add_argument("--T", type=float, default=0.16)
    p.add_argument("--g-arm-si", type=float, default=100.0, help="arm conductance in S")
    p.add_argument("--l-arm-si", type=float, default=5e-3, help="arm inductance in H")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("classify", parents=[common], help="GIP/DCP port classification")
    p.add_argument("input")
    p.add_argument("--ports", required=True, help='ports JSON: {"ports": {"P1": [0,2]}}')
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("clarke", parents=[common], help="Clarke transition for the star topology")
    p.add_argument("--variant", choices=("amplitude", "power"), default="amplitude")
    p.set_defaults(func=_cmd_clarke)

    p = sub.add_parser("catalog", parents=[common], help="reference topology catalog")
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("fixtures", parents=[common], help="verify published fixtures")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=_cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    import warnings as _warnings

    try:
        if args.quiet:
            with _warnings.catch_warnings():
                _warnings.simplefilter("ignore")
                return args.func(args)
        return args.func(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SingularMatrixError, UnsupportedSpectrumError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
