"""Command-line front end: ``wga <kind> --preset NAME | --params FILE --out PATH``.

All energies on the command line and in the output are detunings from
``omega_c`` in units of ``Gamma``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Sequence, TextIO

import numpy as np

from . import __version__
from .correlation import BACKGROUND_NORMALIZED, g2_trace, g2_zero_map
from .errors import InvalidParams, NumericalFailure, UnknownColumns, WgaError
from .linalg import eig_general
from .model import ModelParams, apply_dissipation, build_heff1, build_heff2, classify_regime, params_to_dict
from .onephoton import spectrum_scan
from .output import PRESET_NAMES, load_params_file, load_preset, write_csv
from .plotting import emit_plot_script
from .twophoton import Channel, TwoPhotonConfig, fluorescence_map, two_photon_wavefunction

KINDS = ("spectrum", "fluorescence", "wavefunction", "g2trace", "g2map", "eigen")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# Named one-command reproductions: (kind, parameter preset, options).
FIGURES: dict[str, tuple[str, str, dict[str, Any]]] = {
    "spectrum_a": ("spectrum", "fig_spectrum_a", {}),
    "spectrum_b": ("spectrum", "fig_spectrum_b", {}),
    "fluorescence_a_m14": ("fluorescence", "fig_spectrum_a", {"E": -14.0}),
    "fluorescence_b_m10": ("fluorescence", "fig_spectrum_b", {"E": -10.0}),
    "fluorescence_a_13": ("fluorescence", "fig_spectrum_a", {"E": 13.0}),
    "fluorescence_b_17": ("fluorescence", "fig_spectrum_b", {"E": 17.0}),
    "g2_a_jc": ("g2trace", "fig_spectrum_a", {"E_half": -7.0}),
    "g2_a_free": ("g2trace", "fig_spectrum_a", {"E_half": 0.0}),
    "g2_b_jc_low": ("g2trace", "fig_spectrum_b", {"E_half": -5.0}),
    "g2_b_jc_high": ("g2trace", "fig_spectrum_b", {"E_half": 9.0}),
    "g2_b_free": ("g2trace", "fig_spectrum_b", {"E_half": -2.0}),
    "spectrum_twomode": ("spectrum", "fig_twomode", {}),
    "g2map_twomode": ("g2map", "fig_twomode", {}),
    "g2_twomode_low": ("g2trace", "fig_twomode", {"E_half": -7.39}),
    "g2_twomode_mid": ("g2trace", "fig_twomode", {"E_half": 1.0}),
    "g2_twomode_high": ("g2trace", "fig_twomode", {"E_half": 10.84}),
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "spectrum": {"dk_min": -15.0, "dk_max": 15.0, "points": 2001},
    "fluorescence": {"dk_min": -15.0, "dk_max": 15.0, "dp_min": -15.0, "dp_max": 15.0, "points": 201},
    "wavefunction": {"delta_k": 0.0, "channel": "R", "x_max": 10.0, "points": 1001},
    "g2trace": {"delta_k": 0.0, "channel": "R", "tau_max": 5.0, "points": 501},
    "g2map": {
        "E_half_min": -15.0,
        "E_half_max": 15.0,
        "E_points": 301,
        "theta_min": 0.0,
        "theta_max": 2 * math.pi,
        "theta_points": 91,
    },
    "eigen": {"subspace": 1},
}
REQUIRED = {"fluorescence": ("E",), "wavefunction": ("E_half",), "g2trace": ("E_half",)}


@dataclass
class ExperimentSpec:
    kind: str
    params: ModelParams
    source: str
    options: dict[str, Any] = field(default_factory=dict)
    out: Path | None = None
    emit_plot: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParams(f"unknown experiment kind {self.kind!r}")
        self.options = {**DEFAULTS[self.kind], **{k: v for k, v in self.options.items() if v is not None}}
        missing = [k for k in REQUIRED.get(self.kind, ()) if k not in self.options]
        if missing:
            raise InvalidParams(f"{self.kind} requires {', '.join('--' + m.replace('_', '-') for m in missing)}")
        for key in ("points", "E_points", "theta_points"):
            if key in self.options and int(self.options[key]) < 1:
                raise InvalidParams(f"{key} must be positive")
        if self.emit_plot and self.out is None:
            raise InvalidParams("--emit-plot needs --out")
        if self.out is not None and not self.out.parent.exists():
            raise InvalidParams(f"output directory {self.out.parent} does not exist")


def _metadata(spec: ExperimentSpec, **extra: Any) -> dict[str, Any]:
    regime = classify_regime(spec.params) if not (spec.params.g_a == 0 and spec.params.g_b == 0) else None
    meta: dict[str, Any] = {
        "tool": f"wga {__version__}",
        "kind": spec.kind,
        "params_source": spec.source,
        "params": json.dumps(params_to_dict(spec.params), separators=(",", ":")),
        "units": "energies and momenta in units of Gamma, measured from omega_c; lengths and delays in 1/Gamma",
        "regime": regime.tag.value if regime else "Decoupled",
    }
    for key in sorted(spec.options):
        value = spec.options[key]
        meta[f"option.{key}"] = _format_option(value)
    meta.update(extra)
    return meta


def _format_option(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _linspace(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(float(lo), float(hi), int(n))


def _table(spec: ExperimentSpec) -> tuple[list[str], list[np.ndarray], dict[str, Any], list[tuple[str, list[str], list]]]:
    """Compute the experiment; returns (columns, data, extra metadata, side tables)."""
    p, o = spec.params, spec.options
    wc = float(np.real(p.omega_c))
    if spec.kind == "spectrum":
        detuning = _linspace(o["dk_min"], o["dk_max"], o["points"])
        s = spectrum_scan(p, wc + detuning)
        return ["k", "T2", "R2", "argT", "argR"], [detuning, s.T2, s.R2, s.argT, s.argR], {}, []

    if spec.kind == "fluorescence":
        dk = _linspace(o["dk_min"], o["dk_max"], o["points"])
        dp = _linspace(o["dp_min"], o["dp_max"], o["points"])
        fm = fluorescence_map(p, 2 * wc + float(o["E"]), dk, dp)
        return list(fm.columns), fm.as_columns(), {}, []

    if spec.kind in ("wavefunction", "g2trace"):
        cfg = TwoPhotonConfig(2 * (wc + float(o["E_half"])), float(o["delta_k"]), Channel.parse(o["channel"]))
        if spec.kind == "wavefunction":
            x = _linspace(0.0, o["x_max"], o["points"])
            psi = two_photon_wavefunction(p, cfg)(x)
            extra = {"center_of_mass_phase": "omitted"}
            return ["x", "re_psi", "im_psi", "abs2"], [x, psi.real, psi.imag, np.abs(psi) ** 2], extra, []
        tau = _linspace(0.0, o["tau_max"], o["points"])
        tr = g2_trace(p, cfg, tau)
        extra = {
            "normalization": tr.normalization,
            "normalization_note": "g2(tau) = |psi(tau)|^2 / |background(tau)|^2; the integral normalization diverges for plane-wave input",
        }
        return ["tau", "g2"], [tr.tau, tr.g2], extra, []

    if spec.kind == "g2map":
        e_half = _linspace(o["E_half_min"], o["E_half_max"], o["E_points"])
        theta = _linspace(o["theta_min"], o["theta_max"], o["theta_points"])
        gm = g2_zero_map(p, wc + e_half, theta)
        cols = gm.as_columns()
        cols[0] = cols[0] - wc
        contour = [(e - wc, t) for e, t in gm.contour]
        extra = {"normalization": BACKGROUND_NORMALIZED, "contour_points": len(contour)}
        side = [("contour", ["E_half", "theta0"], [np.array([c[0] for c in contour]), np.array([c[1] for c in contour])])]
        return ["E_half", "theta0", "ln_g2_0", "flag"], cols, extra, side

    # eigen
    sub = int(o["subspace"])
    if sub not in (1, 2):
        raise InvalidParams("--subspace must be 1 or 2")
    pd = apply_dissipation(p)
    H = (build_heff1(pd) if sub == 1 else build_heff2(pd)).entries
    vals = eig_general(H).values
    n = len(vals)
    extra = {"trace": f"{np.trace(H).real:.12g}{np.trace(H).imag:+.12g}j"}
    return ["subspace", "index", "re", "im"], [np.full(n, sub), np.arange(n), vals.real, vals.imag], extra, []


def run(spec: ExperimentSpec, stdout: TextIO | None = None) -> int:
    """Run one experiment and write its CSV; returns the process exit code."""
    columns, data, extra, side = _table(spec)
    meta = _metadata(spec, **extra)
    with _open_out(spec.out, stdout) as fh:
        write_csv(fh, columns, data, meta)
    if spec.out is not None:
        for suffix, cols, values in side:
            side_path = spec.out.with_name(f"{spec.out.stem}_{suffix}{spec.out.suffix or '.csv'}")
            with open(side_path, "w", encoding="utf-8", newline="\n") as fh:
                write_csv(fh, cols, values, {"tool": f"wga {__version__}", "of": spec.out.name, "level": "g2(0) = 1"})
        if spec.emit_plot:
            emit_plot_script(spec.out, spec.kind)
    return EXIT_OK


@contextmanager
def _open_out(path: Path | None, stdout: TextIO | None) -> Iterator[TextIO]:
    if path is None:
        yield stdout or sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yield fh


def _add_common(sp: argparse.ArgumentParser) -> None:
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESET_NAMES, help="bundled parameter set")
    src.add_argument("--params", type=Path, help="JSON parameter file")
    sp.add_argument("--out", type=Path, help="output CSV path (default: standard output)")
    sp.add_argument("--emit-plot", action="store_true", help="also write <out>.plot.py rendering the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wga",
        description="Single- and two-photon scattering off a waveguide-coupled whispering-gallery resonator with an atom.",
    )
    parser.add_argument("--version", action="version", version=f"wga {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True, metavar="KIND")

    sp = sub.add_parser("spectrum", help="single-photon |T|^2, |R|^2 and phases versus detuning")
    _add_common(sp)
    sp.add_argument("--dk-min", type=float, help="lowest detuning (default -15)")
    sp.add_argument("--dk-max", type=float, help="highest detuning (default 15)")
    sp.add_argument("--points", type=int, help="grid points (default 2001)")

    sp = sub.add_parser("fluorescence", help="two-photon background fluorescence over (Delta_k, Delta_p)")
    _add_common(sp)
    sp.add_argument("--E", type=float, help="total energy detuning E - 2 omega_c (required)")
    sp.add_argument("--dk-min", type=float, help="default -15")
    sp.add_argument("--dk-max", type=float, help="default 15")
    sp.add_argument("--dp-min", type=float, help="default -15")
    sp.add_argument("--dp-max", type=float, help="default 15")
    sp.add_argument("--points", type=int, help="points per axis (default 201)")

    for kind, help_text, span in (
        ("wavefunction", "outgoing two-photon wavefunction versus relative coordinate", ("--x-max", "largest x (default 10)")),
        ("g2trace", "second-order correlation g2(tau)", ("--tau-max", "largest delay (default 5)")),
    ):
        sp = sub.add_parser(kind, help=help_text)
        _add_common(sp)
        sp.add_argument("--E-half", dest="E_half", type=float, help="single-photon detuning E/2 - omega_c (required)")
        sp.add_argument("--delta-k", dest="delta_k", type=float, help="incident relative momentum (default 0)")
        sp.add_argument("--channel", choices=("R", "T"), help="reflected or transmitted pair (default R)")
        sp.add_argument(span[0], type=float, help=span[1])
        sp.add_argument("--points", type=int, help="grid points")

    sp = sub.add_parser("g2map", help="ln g2_R(0) over (E/2, theta0) with the g2 = 1 contour")
    _add_common(sp)
    sp.add_argument("--E-half-min", dest="E_half_min", type=float, help="default -15")
    sp.add_argument("--E-half-max", dest="E_half_max", type=float, help="default 15")
    sp.add_argument("--E-points", dest="E_points", type=int, help="default 301")
    sp.add_argument("--theta-min", type=float, help="default 0")
    sp.add_argument("--theta-max", type=float, help="default 2 pi")
    sp.add_argument("--theta-points", type=int, help="default 91")

    sp = sub.add_parser("eigen", help="eigenvalues of the effective Hamiltonian")
    _add_common(sp)
    sp.add_argument("--subspace", type=int, choices=(1, 2), help="excitation number (default 1)")

    sp = sub.add_parser("figure", help="run a named reproduction preset")
    sp.add_argument("name", choices=sorted(FIGURES))
    sp.add_argument("--out", type=Path, help="output CSV path (default: standard output)")
    sp.add_argument("--emit-plot", action="store_true")
    return parser


_NON_OPTIONS = {"kind", "preset", "params", "out", "emit_plot", "name"}


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.kind == "figure":
        kind, preset, options = FIGURES[args.name]
        return ExperimentSpec(kind, load_preset(preset), f"preset:{preset}", dict(options), args.out, args.emit_plot)
    if args.preset:
        params, source = load_preset(args.preset), f"preset:{args.preset}"
    else:
        params, source = load_params_file(args.params), f"file:{args.params.name}"
    options = {k: v for k, v in vars(args).items() if k not in _NON_OPTIONS}
    return ExperimentSpec(args.kind, params, source, options, args.out, args.emit_plot)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
    except (OSError, json.JSONDecodeError, InvalidParams, KeyError) as exc:
        print(f"wga: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(spec)
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK
    except (InvalidParams, UnknownColumns) as exc:
        print(f"wga: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        print(f"wga: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except WgaError as exc:
        print(f"wga: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
