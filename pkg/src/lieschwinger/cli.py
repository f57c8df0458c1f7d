"""Command-line runner: load a model file, sweep, certify, compare, report.

Reports serialize deterministically: keys are emitted in sorted order and
floats with 17 significant digits, so identical inputs and flags reproduce
byte-identical output apart from the "timings" section.

Exit codes: 0 success, 2 validation or parse failure, 3 series not
converged, 4 gap assumption violated.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import kitaev as kit
from .certify import certify
from .errors import (
    CertificationError,
    ChainError,
    DimensionError,
    GapError,
    RegroupError,
    SeriesError,
    ValidationError,
)
from .intervals import Interval
from .model import ChainModel, build_chain_model
from .oracle import GUARD, compare
from .sweep import SeriesControls, sweep

SPEC_VERSION = "1"


# ---------------------------------------------------------------------------
# model file parsing

def _parse_matrix(rows, what: str) -> np.ndarray:
    try:
        mat = np.array([[complex(re, im) for re, im in row] for row in rows])
    except (TypeError, ValueError) as err:
        raise ValidationError(f"{what}: matrix entries must be [re, im] pairs") from err
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"{what}: matrix must be square, got shape {mat.shape}")
    return mat


def _matrix_to_json(mat: np.ndarray):
    mat = np.asarray(mat, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in mat]


def load_model(path):
    """Parse and validate a model file; returns ChainModel or KitaevModel."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"model file not found: {path}")
    try:
        spec = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise ValidationError(f"model file is not valid JSON: {err}") from err
    if spec.get("version") != SPEC_VERSION:
        raise ValidationError(f"unsupported model file version {spec.get('version')!r}")
    if "kitaev" in spec:
        return _load_kitaev(spec["kitaev"])
    return _load_chain(spec)


def _load_chain(spec) -> ChainModel:
    for key in ("N", "M", "H", "interactions", "t"):
        if key not in spec:
            raise ValidationError(f"model file missing required field {key!r}")
    H = _parse_matrix(spec["H"], "on-site matrix")
    interactions = {}
    for entry in spec["interactions"]:
        first, last = entry["support"]
        iv = Interval(last - first, first)
        interactions[iv] = _parse_matrix(entry["matrix"], f"interaction on {iv}")
    return build_chain_model(
        N=spec["N"], M=spec["M"], onsite=H, interactions=interactions,
        t=spec["t"], kbar=spec.get("kbar"),
    )


def _load_kitaev(block) -> kit.KitaevModel:
    for key in ("N", "beta", "perturbations"):
        if key not in block:
            raise ValidationError(f"kitaev block missing required field {key!r}")
    alg = kit.fermion_algebra(int(block["N"]))
    perts = []
    for entry in block["perturbations"]:
        first, last = entry["support"]
        mat = kit.perturbation_matrix(alg, entry["terms"])
        perts.append((Interval(last - first, first), mat))
    return kit.build_kitaev_model(
        N=block["N"], beta=block["beta"], perturbations=perts,
        mu=block.get("mu", 0.0), tau=block.get("tau", 1.0),
        delta=block.get("delta", 1.0), meta={"source": "file"},
    )


# ---------------------------------------------------------------------------
# deterministic serialization

def _format_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValidationError("reports must not contain NaN or infinite values")
    return format(float(x), ".17g")


def _write_json(obj, out, indent: int) -> None:
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for i, key in enumerate(keys):
            out.append(pad + "  " + json.dumps(str(key)) + ": ")
            _write_json(obj[key], out, indent + 2)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(pad + "  ")
            _write_json(item, out, indent + 2)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    else:
        out.append(json.dumps(str(obj)))


def emit(report, fmt: str = "json") -> str:
    """Serialize a report (or list of reports) as JSON or CSV."""
    if fmt == "json":
        out: list[str] = []
        _write_json(report, out, 0)
        out.append("\n")
        return "".join(out)
    if fmt == "csv":
        reports = report if isinstance(report, list) else [report]
        lines = ["kind,t,k,q,E,gap,series_order,od_residual,s_norm,r,interval_q,norm,bound,ok"]
        for rep in reports:
            t = rep.get("controls", {}).get("t", 0.0)
            ts = _format_float(t)
            for row in rep.get("steps", []):
                lines.append(",".join([
                    "step", ts, str(row["k"]), str(row["q"]),
                    _format_float(row["E"]), _format_float(row["gap"]),
                    str(row["series_order"]), _format_float(row["od_residual"]),
                    _format_float(row["s_norm"]), "", "", "", "", "",
                ]))
            for row in rep.get("ledger", []):
                lines.append(",".join([
                    "ledger", ts, "", "", "", "", "", "", "",
                    str(row["r"]), str(row["interval_q"]),
                    _format_float(row["norm"]), _format_float(row["bound"]),
                    str(row["ok"]).lower(),
                ]))
        return "\n".join(lines) + "\n"
    raise ValidationError(f"unsupported report format {fmt!r}")


# ---------------------------------------------------------------------------
# run orchestration

_EXIT_CODES = (
    (SeriesError, 3),
    (GapError, 4),
    (ValidationError, 2),
    (DimensionError, 2),
    (RegroupError, 2),
    (CertificationError, 2),
)


def _exit_code_for(err: ChainError) -> int:
    for cls, code in _EXIT_CODES:
        if isinstance(err, cls):
            return code
    return 1


def _steps_json(state) -> list:
    return [
        {
            "k": d.step.k, "q": d.step.q, "E": d.E, "gap": d.gap,
            "series_order": d.series_order, "od_residual": d.od_residual,
            "s_norm": d.s_norm,
        }
        for d in state.diagnostics
    ]


def _model_echo(model: ChainModel) -> dict:
    return {
        "N": model.N, "M": model.M, "t": model.t, "kbar": model.kbar,
        "energy_offset": model.energy_offset,
        "H": _matrix_to_json(model.onsite),
        "interactions": [
            {"support": [iv.q, iv.last], "matrix": _matrix_to_json(op.matrix)}
            for iv, op in sorted(model.interactions.items())
        ],
        "seed_info": {k: v for k, v in sorted(model.seed_info.items())},
    }


def run(model, controls: SeriesControls, oracle_policy: str = "auto",
        seed=None, kitaev_extra=None):
    """Execute sweep + certification + oracle; returns (report dict, exit code)."""
    started = time.perf_counter()
    report = {
        "version": SPEC_VERSION,
        "status": "ok",
        "error": None,
        "model": _model_echo(model),
        "controls": {
            "jmax": controls.jmax, "tol_series": controls.tol_series,
            "tol_od": controls.tol_od, "gap_min": controls.gap_min,
            "oracle": oracle_policy, "seed": seed, "t": model.t,
        },
        "steps": [], "ledger": [], "gap_report": None, "oracle": None,
        "kitaev": kitaev_extra, "timings": {},
    }
    code = 0
    try:
        t0 = time.perf_counter()
        state = sweep(model, controls)
        report["timings"]["sweep_s"] = time.perf_counter() - t0
        report["steps"] = _steps_json(state)
        gap_report = certify(state, model, controls.tol_od)
        report["ledger"] = [
            {"r": e.interval.k, "interval_q": e.interval.q, "norm": e.norm,
             "bound": e.bound, "ok": e.ok}
            for e in gap_report.ledger
        ]
        report["gap_report"] = {
            "ground_energy": gap_report.ground_energy,
            "gap": gap_report.gap,
            "unique_ground": gap_report.unique_ground,
            "od_residual": gap_report.od_residual,
        }
        run_oracle = oracle_policy == "force" or (
            oracle_policy == "auto" and model.M ** model.N <= GUARD
        )
        if run_oracle:
            cmp_ = compare(state, model, gap_report.ground_energy)
            report["oracle"] = {
                "spectrum_distance": cmp_.spectrum_distance,
                "gap_ed": cmp_.gap_ed,
                "ground_degeneracy": cmp_.ground_degeneracy,
                "blockwise_match": cmp_.blockwise_match,
                "ground_ed": cmp_.ground_ed,
                "low_spectrum": list(cmp_.low_spectrum),
            }
    except ChainError as err:
        code = _exit_code_for(err)
        report["status"] = "failed"
        step = getattr(err, "step", None)
        report["error"] = {
            "type": type(err).__name__,
            "message": str(err),
            "step": [step.k, step.q] if step is not None else None,
            "exit_code": code,
        }
        partial = getattr(err, "partial_state", None)
        if partial is not None:
            report["steps"] = _steps_json(partial)
    report["timings"]["total_s"] = time.perf_counter() - started
    return report, code


def _prepare_model(loaded, t_value):
    """Resolve a loaded model and an optional coupling override to a ChainModel."""
    kitaev_extra = None
    if isinstance(loaded, kit.KitaevModel):
        kmodel = loaded if t_value is None else dataclasses.replace(loaded, beta=float(t_value))
        bulk, boundary = kit.regroup_perturbations(kmodel)
        model = kit.restricted_chain_model(bulk, kmodel.beta)
        kitaev_extra = {
            "N_fermion": kmodel.N, "beta": kmodel.beta,
            "bulk_terms": len(bulk), "boundary_terms": len(boundary),
            "norm_scale": model.seed_info.get("norm_scale", 1.0),
            "doubling_ok": (
                kit.doubling_check_terms(kmodel.N, bulk, kmodel.beta)
                if 2 ** kmodel.N <= GUARD else None
            ),
        }
        if boundary and 2 ** kmodel.N <= GUARD:
            splitting, gap_above = kit.boundary_gap_check(kmodel)
            kitaev_extra["boundary_splitting"] = splitting
            kitaev_extra["boundary_gap_above_pair"] = gap_above
        return model, kitaev_extra
    model = loaded if t_value is None else dataclasses.replace(loaded, t=float(t_value))
    return model, kitaev_extra


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lieschwinger",
        description="Block-diagonalize a gapped chain model and certify its spectral gap.",
    )
    parser.add_argument("--config", required=True, help="model file (JSON)")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--t", type=float, default=None, help="override coupling")
    group.add_argument("--t-sweep", default=None,
                       help="comma-separated couplings; emits one report per value")
    parser.add_argument("--jmax", type=int, default=20)
    parser.add_argument("--tol-od", type=float, default=1e-8)
    parser.add_argument("--tol-series", type=float, default=1e-14)
    parser.add_argument("--gap-min", type=float, default=0.5)
    parser.add_argument("--oracle", choices=["auto", "force", "off"], default="auto")
    parser.add_argument("--report", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--seed", type=int, default=None,
                        help="echoed into the report controls")
    args = parser.parse_args(argv)

    controls = SeriesControls(jmax=args.jmax, tol_series=args.tol_series,
                              tol_od=args.tol_od, gap_min=args.gap_min)

    def emit_out(payload) -> None:
        text = emit(payload, args.format)
        if args.report:
            Path(args.report).write_text(text)
        else:
            sys.stdout.write(text)

    try:
        loaded = load_model(args.config)
    except ChainError as err:
        code = _exit_code_for(err)
        emit_out({
            "version": SPEC_VERSION, "status": "failed",
            "error": {"type": type(err).__name__, "message": str(err),
                      "step": None, "exit_code": code},
            "model": None, "controls": None, "steps": [], "ledger": [],
            "gap_report": None, "oracle": None, "kitaev": None, "timings": {},
        })
        return code

    t_values = [None]
    if args.t is not None:
        t_values = [args.t]
    elif args.t_sweep is not None:
        try:
            t_values = [float(v) for v in args.t_sweep.split(",") if v.strip()]
        except ValueError:
            parser.error("--t-sweep expects comma-separated numbers")

    reports, worst = [], 0
    for t_value in t_values:
        try:
            model, kitaev_extra = _prepare_model(loaded, t_value)
        except ChainError as err:
            code = _exit_code_for(err)
            reports.append({
                "version": SPEC_VERSION, "status": "failed",
                "error": {"type": type(err).__name__, "message": str(err),
                          "step": None, "exit_code": code},
                "model": None, "controls": {"t": t_value}, "steps": [],
                "ledger": [], "gap_report": None, "oracle": None,
                "kitaev": None, "timings": {},
            })
            worst = worst or code
            continue
        report, code = run(model, controls, args.oracle, args.seed, kitaev_extra)
        reports.append(report)
        worst = worst or code
    emit_out(reports if len(reports) > 1 else reports[0])
    return worst


if __name__ == "__main__":
    sys.exit(main())
