"""Command-line front end: ``spdcmodes <command> [options]``.

Every command writes its artifacts plus a ``manifest.json`` into the output
directory and prints a short delimited summary on stdout.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import logging
import platform
import sys
import time
from pathlib import Path

import matplotlib
import numpy as np
import scipy

from . import __version__
from . import io as aio
from . import plotting
from .config import RunConfig
from .correlations import oam_correlation_matrix_hygg, oam_correlation_matrix_lg, p_correlation_matrix
from .detection import FiberSpec, Grid, build_crosstalk_matrix
from .errors import ConfigError, SpdcModesError
from .holograms import field_overlap, generation_mask, mode_on_pixels, simulate_first_order
from .modes import ModeSpec
from .overlap import PumpSpec, conserves_oam, overlap_closed_form, overlap_quadrature, paired_modes
from .tomography import fidelity, reconstruct, simulate_records, theory_state

log = logging.getLogger("spdcmodes")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

OVERLAP_FIELDS = ["p_p", "ell_p", "p_s", "ell_s", "p_i", "ell_i"]


class Run:
    """Output directory bookkeeping for one command invocation."""

    def __init__(self, command: str, cfg: RunConfig):
        self.command = command
        self.cfg = cfg
        self.out = Path(cfg["output"]["dir"])
        self.out.mkdir(parents=True, exist_ok=True)
        self.formats = cfg["output"]["formats"]
        self.files: list[Path] = []
        self.summary: dict = {}
        self.t0 = time.perf_counter()

    def path(self, name: str) -> Path:
        return self.out / name

    def add(self, *paths):
        for p in paths:
            if isinstance(p, (list, tuple)):
                self.add(*p)
            else:
                self.files.append(Path(p))

    def table(self, stem: str, header, rows):
        """Write ``rows`` under every configured format."""
        if "csv" in self.formats:
            self.add(aio.write_rows_csv(self.path(stem + ".csv"), header, rows))
        if "json" in self.formats:
            recs = [dict(zip(header, r)) for r in rows]
            self.add(aio.dump_json(recs, self.path(stem + ".json")))

    def manifest(self):
        files = {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(set(self.files))}
        data = {
            "command": self.command,
            "config_hash": self.cfg.hash,
            "config": dict(self.cfg),
            "versions": {
                "spdcmodes": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "matplotlib": matplotlib.__version__,
            },
            "runtime_s": round(time.perf_counter() - self.t0, 6),
            "files": files,
            "summary": self.summary,
        }
        return aio.dump_json(data, self.path("manifest.json"))


def _pump(cfg) -> PumpSpec:
    p = cfg["pump"]
    return PumpSpec.of(p["p"], p["ell"], p["waist"])


def _emit(header, rows, stream=None):
    w = csv.writer(stream or sys.stdout, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([aio.fmt(v) if isinstance(v, float) else v for v in r])


# overlap -------------------------------------------------------------------------

def _read_batch(path):
    """Index tuples from a CSV with an ``p_p,ell_p,p_s,ell_s,p_i,ell_i`` header (or none)."""
    rows = []
    try:
        lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read batch file {path}: {exc}") from None
    if lines and lines[0].replace(" ", "").split(",") == OVERLAP_FIELDS:
        lines = lines[1:]
    for n, ln in enumerate(lines, 1):
        parts = [x.strip() for x in ln.replace("\t", ",").split(",")]
        try:
            vals = [int(x) for x in parts]
        except ValueError:
            raise ConfigError(f"batch line {n}: expected six integers, got {ln!r}") from None
        if len(vals) != 6:
            raise ConfigError(f"batch line {n}: expected six integers, got {len(vals)}")
        rows.append(tuple(vals))
    if not rows:
        raise ConfigError("batch file has no index tuples")
    return rows


def overlap_row(cfg, p_p, ell_p, p_s, ell_s, p_i, ell_i):
    if min(p_p, p_s, p_i) < 0:
        raise ConfigError("radial indices must be non-negative")
    pump = PumpSpec.of(p_p, ell_p, cfg["pump"]["waist"])
    sig, idl = paired_modes(pump, p_s, ell_s, p_i, ell_i, cfg["waist_ratio"])
    if not conserves_oam(pump, sig, idl):
        note = f"violates l_s+l_i=l_p ({ell_s}+{ell_i}!={ell_p})"
        closed = quad = 0j
        disc = 0.0
    else:
        note = "ok"
        closed = overlap_closed_form(pump, sig, idl)
        quad = overlap_quadrature(pump, sig, idl)
        scale = max(abs(closed), abs(quad))
        disc = abs(closed - quad) / scale if scale > 0 else 0.0
    return [p_p, ell_p, p_s, ell_s, p_i, ell_i, closed.real, quad.real, abs(closed) ** 2, disc, note]


def cmd_overlap(args, cfg):
    run = Run("overlap", cfg)
    if args.batch:
        tuples = _read_batch(args.batch)
    else:
        pump = cfg["pump"]
        tuples = [(pump["p"], pump["ell"], *args.signal, *args.idler)]
    header = OVERLAP_FIELDS + ["c_closed", "c_quadrature", "probability", "discrepancy", "note"]
    rows = [overlap_row(cfg, *t) for t in tuples]
    run.table("overlap", header, rows)
    run.summary = {"tuples": len(rows), "max_discrepancy": max(r[9] for r in rows)}
    _emit(header, rows)
    return run


# correlate -----------------------------------------------------------------------

def _matrix_artifacts(run, matrix, stem, title):
    if "csv" in run.formats:
        run.add(aio.write_matrix_csv(run.path(stem + ".csv"), matrix.values, matrix.axis_s, matrix.axis_i))
    if "json" in run.formats:
        run.add(aio.dump_json(matrix.to_dict(), run.path(stem + ".json")))
    run.add(aio.write_pgm(run.path(stem + ".pgm"), matrix.values))
    run.add(plotting.render_correlation(matrix, run.path(stem + ".png"), title=title))


def cmd_correlate(args, cfg):
    run = Run("correlate", cfg)
    pump = _pump(cfg)
    ells = cfg["correlate"]["ell_s"] if args.ell_s is None else args.ell_s
    rows = []
    for ls in ells:
        m = p_correlation_matrix(pump, ls, cfg["p_range"], cfg["waist_ratio"])
        stem = f"p_lg_ls{ls}"
        _matrix_artifacts(run, m, stem, f"p correlations, l_s={ls}")
        rows.append([stem, "lg", m.off_diagonal_mass(), int(m.is_diagonal_dominant())])
    m = oam_correlation_matrix_lg(pump, cfg["ell_range"], waist_ratio=cfg["waist_ratio"])
    _matrix_artifacts(run, m, "oam_lg", "OAM correlations, LG")
    rows.append(["oam_lg", "lg", m.off_diagonal_mass(), int(m.is_diagonal_dominant())])
    m = oam_correlation_matrix_hygg(pump, cfg["ell_range"], cfg["hygg_waist_ratio"] * pump.waist)
    _matrix_artifacts(run, m, "oam_hygg", "OAM correlations, HyGG")
    rows.append(["oam_hygg", "hygg", m.off_diagonal_mass(), int(m.is_diagonal_dominant())])
    header = ["matrix", "model", "off_diagonal_mass", "diagonal_dominant"]
    run.table("correlate_summary", header, rows)
    _emit(header, rows)
    return run


# hologram ------------------------------------------------------------------------

def cmd_hologram(args, cfg):
    run = Run("hologram", cfg)
    h = cfg["hologram"]
    p = h["p"] if args.p is None else args.p
    ell = h["ell"] if args.ell is None else args.ell
    if p < 0:
        raise ConfigError("radial index must be non-negative")
    shape = (h["size"], h["size"])
    waist_px = h["waist_px"] or None
    mode = ModeSpec.of(p, ell)
    mask = generation_mask(mode, h["period"], shape, waist_px, h["pixel_pitch"])
    fid = field_overlap(mode_on_pixels(mode, shape, waist_px), simulate_first_order(mask))
    stem = f"mask_p{p}_l{ell}"
    gray = mask.to_gray()
    run.add(aio.write_pgm(run.path(stem + ".pgm"), gray))
    run.add(plotting.render_mask(gray, run.path(stem + ".png")))
    side = {"p": p, "ell": ell, "grating_period_px": mask.grating_period, "pixel_pitch_m": mask.pixel_pitch,
            "shape": list(shape), "waist_px": mask.meta["waist_px"], "round_trip_fidelity": fid}
    run.add(aio.dump_json(side, run.path(stem + ".json")))
    header = ["p", "ell", "grating_period", "round_trip_fidelity"]
    rows = [[p, ell, float(h["period"]), fid]]
    run.table("hologram_report", header, rows)
    run.summary = {"round_trip_fidelity": fid}
    _emit(header, rows)
    return run


# tomography ----------------------------------------------------------------------

def _theory(cfg):
    return theory_state(_pump(cfg), cfg["tomo"]["ell_i"], cfg["p_range"], cfg["waist_ratio"])


def _density_artifacts(run, rho, stem):
    run.add(aio.dump_json(aio.density_to_dict(rho), run.path(stem + ".json")))
    run.add(aio.write_density_bars(run.path(stem + "_bars.csv"), rho))
    run.add(plotting.render_density(rho, run.path(stem), aio.basis_labels()))


def cmd_tomo_simulate(args, cfg):
    run = Run("tomo simulate", cfg)
    rho = _theory(cfg)
    noise = cfg["noise"]
    records = simulate_records(rho, noise["mean_counts"], noise["dark"], noise["seed"], normalize=False)
    if "csv" in run.formats:
        run.add(aio.write_records_csv(run.path("records.csv"), records))
    if "json" in run.formats:
        run.add(aio.write_records_json(run.path("records.json"), records))
    _density_artifacts(run, rho, "rho_theory")
    header = ["records", "total_counts", "theory_purity"]
    rows = [[len(records), float(sum(r.count for r in records)), rho.purity]]
    run.summary = dict(zip(header, rows[0]))
    _emit(header, rows)
    return run


def cmd_tomo_fit(args, cfg):
    run = Run("tomo fit", cfg)
    path = Path(args.input)
    if not path.exists():
        raise ConfigError(f"records file {path} not found")
    records = aio.read_records(path)
    rec = reconstruct(records, purity_constrained=not args.unconstrained, return_details=True)
    _density_artifacts(run, rec.rho, "rho_fit")
    theory = _theory(cfg)
    f = fidelity(rec.rho, theory)
    header = ["fidelity_to_theory", "purity", "residual", "mu"]
    rows = [[f, rec.rho.purity, rec.residual, "none" if rec.mu is None else float(rec.mu)]]
    run.table("tomo_report", header, rows)
    run.summary = dict(zip(header, rows[0]))
    _emit(header, rows)
    return run


# calibrate -----------------------------------------------------------------------

def cmd_calibrate(args, cfg):
    run = Run("calibrate", cfg)
    specs = [ModeSpec.of(p, ell) for p, ell in cfg["calibrate"]["modes"]]
    grid = Grid.for_waist(1.0, cfg["grid"]["size"], cfg["grid"]["extent"])
    ct = build_crosstalk_matrix(specs, FiberSpec(cfg["fiber"]["sigma"]), grid)
    labels = [str(m.index) for m in specs]
    if "csv" in run.formats:
        run.add(aio.write_matrix_csv(run.path("crosstalk.csv"), ct.values, labels, labels, corner="gen\\proj"))
    if "json" in run.formats:
        run.add(aio.dump_json({"modes": labels, "values": ct.values}, run.path("crosstalk.json")))
    run.add(aio.write_pgm(run.path("crosstalk.pgm"), ct.values))
    run.add(plotting.render_matrix(ct.values, run.path("crosstalk.png"), labels, labels, title="crosstalk",
                                   xlabel="projected", ylabel="generated"))
    eff = ct.efficiencies()
    header = ["mode", "efficiency"]
    rows = [[lab, float(e)] for lab, e in zip(labels, eff)]
    run.table("efficiencies", header, rows)
    _emit(header, rows)
    return run


# argument parsing ----------------------------------------------------------------

def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="TOML run configuration")
    p.add_argument("--seed", type=int, help="override noise.seed")
    p.add_argument("--out", metavar="DIR", help="override output.dir")
    p.add_argument("--format", choices=("csv", "json"), help="override output.formats")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _pair(text):
    return [int(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="spdcmodes", description="LG-mode SPDC correlations, holograms and tomography.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("overlap", parents=[common], help="pump/signal/idler overlap amplitudes")
    p.add_argument("--pump", nargs=2, type=int, metavar=("P", "ELL"))
    p.add_argument("--signal", nargs=2, type=int, metavar=("P", "ELL"), default=[0, 0])
    p.add_argument("--idler", nargs=2, type=int, metavar=("P", "ELL"), default=[0, 0])
    p.add_argument("--batch", metavar="FILE", help="CSV of p_p,ell_p,p_s,ell_s,p_i,ell_i tuples")
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("correlate", parents=[common], help="radial and OAM correlation matrices")
    p.add_argument("--pump", nargs=2, type=int, metavar=("P", "ELL"))
    p.add_argument("--ell-s", type=_pair, help="comma-separated signal OAM values for the p matrices")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("hologram", parents=[common], help="phase mask for one LG mode")
    p.add_argument("--p", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--period", type=float)
    p.set_defaults(func=cmd_hologram)

    p = sub.add_parser("tomo", help="two-photon radial tomography")
    tsub = p.add_subparsers(dest="tomo_command", required=True)
    t = tsub.add_parser("simulate", parents=[common], help="records from the theory state")
    t.add_argument("--pump", nargs=2, type=int, metavar=("P", "ELL"))
    t.add_argument("--ell-i", type=int)
    t.set_defaults(func=cmd_tomo_simulate)
    t = tsub.add_parser("fit", parents=[common], help="reconstruct a density matrix from records")
    t.add_argument("--input", required=True, metavar="FILE", help="records CSV or JSON")
    t.add_argument("--pump", nargs=2, type=int, metavar=("P", "ELL"))
    t.add_argument("--ell-i", type=int)
    t.add_argument("--unconstrained", action="store_true", help="skip the purity penalty")
    t.set_defaults(func=cmd_tomo_fit)

    p = sub.add_parser("calibrate", parents=[common], help="crosstalk matrix and efficiencies")
    p.add_argument("--sigma", type=float)
    p.set_defaults(func=cmd_calibrate)
    return ap


def _overrides(args) -> dict:
    o: dict = {}
    if args.seed is not None:
        o.setdefault("noise", {})["seed"] = args.seed
    if args.out is not None:
        o.setdefault("output", {})["dir"] = args.out
    if args.format is not None:
        o.setdefault("output", {})["formats"] = [args.format]
    if getattr(args, "pump", None) is not None:
        o.setdefault("pump", {}).update(p=args.pump[0], ell=args.pump[1])
    if getattr(args, "ell_i", None) is not None:
        o["tomo"] = {"ell_i": args.ell_i}
    if getattr(args, "period", None) is not None:
        o["hologram"] = {"period": args.period}
    if getattr(args, "sigma", None) is not None:
        o["fiber"] = {"sigma": args.sigma}
    return o


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.load(args.config, _overrides(args))
        run = args.func(args, cfg)
        run.manifest()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SpdcModesError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
