"""
Command-line interface: classify, kernels, reconstruct and verify.

Exit codes: 0 success (case 1), 2 and 3 for determinant cases 2 and 3,
1 for failed checks or other library errors, 64 malformed input,
65 unknown operator type, 66 family mismatch.
"""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import numpy as np
import pandas as pd

from src.config import SamplingSettings, load_settings
from src.sampling.closed_forms import CLOSED_FORM_KINDS, closed_form_kernels
from src.sampling.criterion import Case, classify_theorem1, classify_theorem2, det_profile
from src.sampling.errors import (
    FamilyMismatchError,
    NoFormulaError,
    SamplingError,
    SpecFileError,
    UnknownOperatorError,
)
from src.sampling.family_io import load_family, load_signal
from src.sampling.kernels import synthesize_spectral, verify_biorthogonality
from src.sampling.multiplier import OperatorFamily, common_root_scan
from src.sampling.reconstruct import (
    ReconstructionSummary,
    frame_ratio,
    frame_ratio_range,
    probe_signals,
    reconstruct,
    residual_norms,
)
from src.sampling.signals import sample_family
from src.sampling.suites import SUITES, run_suite
from src.utils.exporters import (
    export_profile,
    kernel_frame,
    reconstruction_frame,
    samples_frame,
    spectra_frame,
    write_csv,
    write_json,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MALFORMED = 64
EXIT_UNKNOWN_OPERATOR = 65
EXIT_FAMILY_MISMATCH = 66

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: Optional[str] = None):
    level = (level or os.getenv("LOG_LEVEL") or "INFO").upper()
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)


def _pick(flag, default):
    return default if flag is None else flag


def _profile_options(args, settings: SamplingSettings) -> dict:
    criterion = settings.criterion
    return {
        "tol_det": _pick(args.tol_det, criterion.tol_det),
        "initial_grid": _pick(args.initial_grid, criterion.initial_grid),
        "refine_levels": _pick(args.refine_levels, criterion.refine_levels),
        "polish": criterion.polish and not args.no_polish,
    }


def _quad_options(args, settings: SamplingSettings) -> dict:
    return {
        "order": _pick(args.quad, settings.signals.quad_order),
        "periods_per_panel": _pick(args.periods_per_panel, settings.signals.periods_per_panel),
    }


def _emit(payload):
    """Structured results go to stdout as JSON"""
    if hasattr(payload, "model_dump_json"):
        print(payload.model_dump_json(indent=2))
    else:
        print(json.dumps(payload, indent=2))


def _build_kernels(args, settings: SamplingSettings, family: OperatorFamily):
    """(kernel set, None) on success or (None, exit code) when the family has no formula"""
    if args.closed_form:
        options = {
            "grid_per_piece": _pick(args.grid, settings.kernels.grid_per_piece),
            "method": _pick(args.dynamical_method, settings.kernels.dynamical_method),
            "j_dyn": _pick(args.j_dyn, settings.kernels.j_dyn),
            "tol_root": _pick(args.tol_root, settings.multiplier.tol_root),
        }
        try:
            return closed_form_kernels(args.closed_form, family, **options), None
        except NoFormulaError as e:
            logger.error(f"No {args.closed_form} formula for {family.name or args.family}: {e}")
            report = classify_theorem1(det_profile(family, **_profile_options(args, settings)))
            return None, report.exit_code or EXIT_FAILED

    field = det_profile(family, **_profile_options(args, settings))
    report = classify_theorem1(field)
    if report.case != Case.PositiveEssInf:
        logger.error(
            f"Family {family.name or args.family} is {report.case.value} (essinf ~ {report.essinf_estimate:.3e}); "
            f"no interpolation formula to synthesize"
        )
        return None, report.exit_code
    kset = synthesize_spectral(
        family,
        grid_per_piece=_pick(args.grid, settings.kernels.grid_per_piece),
        tol_inv=_pick(args.tol_inv, settings.kernels.tol_inv),
        tol_det=_profile_options(args, settings)["tol_det"],
    )
    return kset, None


# ---------------------------------------------------------------------------
# Commands


def cmd_classify(args, settings: SamplingSettings) -> int:
    family = load_family(args.family)
    field = det_profile(family, **_profile_options(args, settings))
    if args.profile:
        export_profile(field, args.profile)

    roots = common_root_scan(
        family, settings.multiplier.root_scan_grid, _pick(args.tol_root, settings.multiplier.tol_root)
    )
    if roots:
        logger.warning(f"All multipliers vanish at xi = {', '.join(f'{r:.6g}' for r in roots)}")

    if args.delta is not None or not np.isclose(family.rho, family.N):
        verdict = classify_theorem2(family, args.delta, field=field)
        _emit(verdict)
        return EXIT_OK if verdict.case == Case.PositiveEssInf else verdict.case.number

    report = classify_theorem1(field)
    _emit(report)
    return report.exit_code


def cmd_kernels(args, settings: SamplingSettings) -> int:
    family = load_family(args.family)
    kset, code = _build_kernels(args, settings, family)
    if kset is None:
        return code

    quad = _quad_options(args, settings)
    lo, hi = args.x_range or settings.kernels.x_range
    x = np.linspace(lo, hi, _pick(args.x_points, settings.kernels.x_points))
    write_csv(spectra_frame(kset, quad["order"]), f"{args.out_prefix}_spectra.csv")
    write_csv(kernel_frame(kset, x), f"{args.out_prefix}_kernels.csv")

    residual = verify_biorthogonality(family, kset, _pick(args.j_range, settings.kernels.j_range), **quad)
    _emit({"kernels": kset.label, "N": kset.N, "biorthogonality_residual": residual})
    return EXIT_OK


def cmd_reconstruct(args, settings: SamplingSettings) -> int:
    family = load_family(args.family)
    signal = load_signal(args.signal)
    kset, code = _build_kernels(args, settings, family)
    if kset is None:
        return code
    if kset.N != family.N:
        raise FamilyMismatchError(f"kernels were built for N={kset.N}, family has N={family.N}")

    M = _pick(args.M, settings.reconstruct.M)
    lo, hi = args.grid_range or settings.reconstruct.grid_range
    grid = np.linspace(lo, hi, _pick(args.grid_points, settings.reconstruct.grid_points))

    samples = sample_family(family, signal, M, **_quad_options(args, settings))
    result = reconstruct(samples, kset, grid)
    norms = residual_norms(signal, samples, kset, grid)
    frame = frame_ratio(family, signal, M, samples=samples)
    probes = probe_signals(family.N, settings.reconstruct.probes)
    r_min, r_max, _ = frame_ratio_range(family, M, probes)
    summary = ReconstructionSummary(
        sup_err=norms.sup_err,
        l2_err=norms.l2_err,
        frame_ratio=frame.ratio,
        tail_fraction=frame.tail_fraction,
        probe_ratio_min=r_min,
        probe_ratio_max=r_max,
        max_tail=float(np.max(result.tail)),
        M=M,
        N=family.N,
        grid_points=int(grid.size),
    )

    prefix = args.out or os.path.join(settings.output.directory, family.name or "reconstruction")
    write_csv(reconstruction_frame(grid, signal(grid), result.value), f"{prefix}_reconstruction.csv")
    write_csv(samples_frame(samples), f"{prefix}_samples.csv")
    write_json(summary, f"{prefix}_summary.json")
    _emit(summary)
    return EXIT_OK


def cmd_verify(args, settings: SamplingSettings) -> int:
    results = run_suite(args.suite, settings.profile_options())
    table = pd.DataFrame([r.model_dump() for r in results])
    with pd.option_context("display.max_colwidth", 80, "display.width", 160):
        print(table.to_string(index=False))
    failed = int((~table["passed"]).sum())
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAILED


# ---------------------------------------------------------------------------
# Parser


def _add_profile_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--tol-det", type=float, help="determinant zero threshold (default 1e-10)")
    parser.add_argument("--initial-grid", type=int, help="initial determinant grid size (default 4096)")
    parser.add_argument("--refine-levels", type=int, help="adaptive refinement levels (default 3)")
    parser.add_argument("--no-polish", action="store_true", help="skip polishing of determinant minima")
    parser.add_argument("--tol-root", type=float, help="common multiplier zero threshold (default 1e-10)")


def _add_kernel_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--closed-form", choices=CLOSED_FORM_KINDS, help="use an explicit kernel formula")
    parser.add_argument("--grid", type=int, help="spectral nodes per piece (default 64)")
    parser.add_argument("--quad", type=int, help="Gauss-Legendre nodes per panel (default 64)")
    parser.add_argument("--periods-per-panel", type=float, help="oscillation periods per panel (default 4)")
    parser.add_argument("--tol-inv", type=float, help="inverse residual tolerance (default 1e-9)")
    parser.add_argument(
        "--dynamical-method",
        choices=("periodized", "series"),
        help="correction used by the dynamical closed form (default periodized)",
    )
    parser.add_argument("--j-dyn", type=int, help="truncation of the series correction (default 64)")
    _add_profile_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sampling",
        description="Generalized sampling on the Paley-Wiener space: criteria, kernels and reconstruction",
    )
    parser.add_argument("--settings", help="settings JSON file (default settings.json or $SAMPLING_SETTINGS)")
    parser.add_argument("--log-level", help="logging level (default $LOG_LEVEL or INFO)")
    commands = parser.add_subparsers(dest="command", required=True)

    classify = commands.add_parser("classify", help="decide which determinant case a family falls in")
    classify.add_argument("family", help="operator-family JSON file")
    classify.add_argument("--profile", help="write the determinant profile to this CSV file")
    classify.add_argument("--delta", type=float, help="band parameter for the stable-sampling verdicts")
    _add_profile_flags(classify)
    classify.set_defaults(handler=cmd_classify)

    kernels = commands.add_parser("kernels", help="synthesize or evaluate reconstruction kernels")
    kernels.add_argument("family", help="operator-family JSON file")
    kernels.add_argument("out_prefix", help="prefix for the spectra and kernel CSV files")
    kernels.add_argument("--j-range", type=int, help="biorthogonality check range (default 3)")
    kernels.add_argument("--x-range", type=float, nargs=2, metavar=("LO", "HI"), help="kernel value grid range")
    kernels.add_argument("--x-points", type=int, help="kernel value grid size")
    _add_kernel_flags(kernels)
    kernels.set_defaults(handler=cmd_kernels)

    rec = commands.add_parser("reconstruct", help="reconstruct a signal from its generalized samples")
    rec.add_argument("family", help="operator-family JSON file")
    rec.add_argument("signal", help="signal JSON file")
    rec.add_argument("--M", type=int, help="sample window |m| <= M (default 60)")
    rec.add_argument("--grid-range", type=float, nargs=2, metavar=("LO", "HI"), help="evaluation grid range")
    rec.add_argument("--grid-points", type=int, help="evaluation grid size")
    rec.add_argument("--out", help="output prefix (default <output directory>/<family name>)")
    _add_kernel_flags(rec)
    rec.set_defaults(handler=cmd_reconstruct)

    verify = commands.add_parser("verify", help="run a cross-check suite")
    verify.add_argument("suite", choices=list(SUITES))
    verify.set_defaults(handler=cmd_verify)
    return parser


def _exit_code_for(e: SamplingError) -> int:
    if isinstance(e, UnknownOperatorError):
        return EXIT_UNKNOWN_OPERATOR
    if isinstance(e, SpecFileError):
        return EXIT_MALFORMED
    if isinstance(e, FamilyMismatchError):
        return EXIT_FAMILY_MISMATCH
    return EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_MALFORMED

    configure_logging(args.log_level)
    settings = load_settings(args.settings)
    try:
        return args.handler(args, settings)
    except SamplingError as e:
        logger.error(f"Error running {args.command}: {e}")
        return _exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
