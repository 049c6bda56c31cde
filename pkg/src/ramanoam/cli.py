"""Batch front-end.

    ramanoam <mode> --config FILE --out DIR [--override key=value ...]

Exit status: 0 success, 1 configuration error, 2 runtime or solver error.
A ``summary.json`` is written to ``DIR`` in every case where ``DIR`` is known.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from ramanoam import bloch, diagnostics, io as rio, spectra
from ramanoam._backend import BACKEND
from ramanoam.config import MODES, RunConfig, parse_config
from ramanoam.errors import ConfigError, RamanOAMError, SingularSystemError
from ramanoam.fields import Grid2D, LGIndex, lg_field, propagate
from ramanoam.medium import GainMedium, apply_gain_medium, thin_slab_ratio

log = logging.getLogger("ramanoam")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _Stages:
    """Runs named stages, timing each and recording failures."""

    def __init__(self):
        self.records = []
        self.failed = False

    def run(self, name, fn, *args, **kwargs):
        if self.failed:
            self.records.append({"name": name, "status": "skipped", "seconds": 0.0})
            return None
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kwargs)
        except RamanOAMError as exc:
            self.failed = True
            self.records.append({"name": name, "status": "failed",
                                 "seconds": time.perf_counter() - t0,
                                 "error": f"{type(exc).__name__}: {exc}"})
            log.error("stage %s failed: %s", name, exc)
            return None
        self.records.append({"name": name, "status": "ok",
                             "seconds": time.perf_counter() - t0})
        return out


def _density_json(rho):
    return {
        "sigma_aa": rho.sigma_aa, "sigma_bb": rho.sigma_bb, "sigma_cc": rho.sigma_cc,
        "sigma_ab": [rho.sigma_ab.real, rho.sigma_ab.imag],
        "sigma_cb": [rho.sigma_cb.real, rho.sigma_cb.imag],
        "sigma_ac": [rho.sigma_ac.real, rho.sigma_ac.imag],
    }


def _medium(cfg: RunConfig):
    return GainMedium(
        optical_density=cfg["medium.optical_density"],
        coupling_waist=cfg["medium.coupling_waist"],
        coupling_peak_rabi=cfg["atomic.omega_c"],
        atomic=cfg.system(),
        length=cfg["medium.length"],
    )


def _signal(cfg: RunConfig):
    grid = Grid2D.square(cfg["grid.n"], cfg["grid.window"])
    return lg_field(grid, LGIndex(cfg["beam.ell"], cfg["beam.p"]), cfg["beam.waist"],
                    cfg["beam.power"], cfg["beam.wavelength"])


# ---------------------------------------------------------------------------
# modes


def _steady_state(cfg, out, stages, results, artifacts):
    sys_ = cfg.system()
    results["delta"] = sys_.delta
    if sys_.gamma_ba == sys_.gamma_bc:
        rho0 = stages.run("zero-order", bloch.zero_order_steady_state, sys_)
        if rho0 is not None:
            results["zero_order"] = _density_json(rho0)
        ratio = stages.run("first-order", bloch.signal_response_ratio, sys_)
        if ratio is not None:
            results["first_order_ratio"] = [ratio.real, ratio.imag]
            results["first_order_sigma_cb"] = [(sys_.omega_s * ratio).real,
                                               (sys_.omega_s * ratio).imag]

    dark_point = sys_.gamma_p == 0 and sys_.delta == 0
    path = None
    rho = None
    if not dark_point:
        t0 = time.perf_counter()
        try:
            rho = bloch.full_steady_state(sys_)
            path = "linear-solve"
            stages.records.append({"name": "full-solve", "status": "ok",
                                   "seconds": time.perf_counter() - t0})
        except SingularSystemError as exc:
            stages.records.append({"name": "full-solve", "status": "singular",
                                   "seconds": time.perf_counter() - t0, "error": str(exc)})
    if rho is None:
        start = bloch.DensityMatrix.pure(cfg["steady.rho0"])
        res = stages.run("integrate", bloch.integrate_to_steady_state, sys_, start,
                         cfg["steady.t_end"], cfg["steady.tol"])
        if res is not None:
            rho = res.rho
            path = "integration-fallback"
            results["integration"] = {"t": res.t, "criterion": res.criterion,
                                      "residual": res.residual, "steps": res.n_steps,
                                      "rho0": cfg["steady.rho0"]}
    if dark_point and rho is not None:
        # The linear solve is still well posed here; report it as a cross-check.
        try:
            results["linear_solve_max_diff"] = rho.max_abs_diff(bloch.full_steady_state(sys_))
        except SingularSystemError:
            results["linear_solve_max_diff"] = None
    results["dark_state_point"] = dark_point
    results["path"] = path
    if rho is not None:
        results["steady_state"] = _density_json(rho)
        results["invariant_violations"] = rho.violations()


def _spectrum(cfg, out, stages, results, artifacts):
    medium = spectra.MediumSpec(cfg["medium.optical_density"])
    scan = stages.run("scan", spectra.scan_spectrum, cfg.system(), medium,
                      (cfg["spectrum.delta_min"], cfg["spectrum.delta_max"]),
                      cfg["spectrum.n_points"], cfg["spectrum.workers"])
    if scan is None:
        return
    artifacts.append(str(rio.atomic_write(out / "spectrum.csv", scan.to_csv())))
    rep = stages.run("peak", spectra.analyze_peak, scan)
    if rep is not None:
        results["peak"] = {
            "is_gain": rep.is_gain,
            "peak_delta_gamma": rep.peak_delta, "peak_delta_mhz": rep.peak_delta_mhz,
            "peak_transmission": rep.peak_transmission,
            "fwhm_gamma": rep.fwhm, "fwhm_mhz": rep.fwhm_mhz,
            "fwhm_truncated": rep.fwhm_truncated,
        }
        if not rep.is_gain:
            results["peak"]["note"] = "no gain: maximum transmission <= 1"


def _to_lens(cfg, field):
    d = cfg["diagnostic.lens_distance"]
    return propagate(field, d) if d > 0 else field


def _tilted(cfg, field, label, out, artifacts):
    at_lens = _to_lens(cfg, field)
    geo = diagnostics.LensGeometry.for_field(at_lens, cfg["diagnostic.tilt"],
                                             cfg["diagnostic.focal"],
                                             cfg["diagnostic.observe_z"])
    image = diagnostics.tilted_lens_transform(at_lens, geo.focal, geo.tilt_deg, geo.observe_z)
    count = diagnostics.count_fringes(image.intensity, image.grid,
                                      cfg["diagnostic.threshold"],
                                      cfg["diagnostic.prominence"])
    artifacts.append(str(rio.write_pgm(out / f"{label}_tilted_lens.pgm", image.intensity)))
    tilt_sign, ell = diagnostics.charge_from_fringes(count)
    return geo, count, tilt_sign, ell


def _fringe_json(geo, count, tilt_sign, ell):
    return {
        "focal_mm": geo.focal, "tilt_deg": geo.tilt_deg, "observe_z_mm": geo.observe_z,
        "bright_fringes": count.bright_fringes, "axis_angle_deg": count.axis_angle_deg,
        "tilt_sign": tilt_sign, "inferred_ell": ell,
    }


def _amplify(cfg, out, stages, results, artifacts):
    signal = stages.run("synthesize", _signal, cfg)
    if signal is None:
        return None, None
    amp = stages.run("amplify", lambda: apply_gain_medium(signal, _medium(cfg)))
    if amp is None:
        return signal, None
    results["power_gain"] = amp.power() / signal.power()
    results["thin_slab_ratio"] = thin_slab_ratio(signal, _medium(cfg))
    artifacts.append(str(rio.write_field(out / "incident_field.raw", signal)))
    artifacts.append(str(rio.write_field(out / "amplified_field.raw", amp)))
    artifacts.append(str(rio.write_pgm(out / "amplified_intensity.pgm", amp.intensity)))
    return signal, amp


def _modal(cfg, field, stages, results):
    def winding():
        return diagnostics.phase_winding(field, diagnostics.ring_radius(field))

    w = stages.run("phase-winding", winding)
    if w is not None:
        results["phase_winding"] = w
    table = stages.run("decompose", diagnostics.decompose_lg, field, cfg["beam.waist"],
                       cfg["decomposition.max_ell"], cfg["decomposition.max_p"])
    if table is not None:
        ell, frac = table.dominant()
        results["dominant_ell"] = ell
        results["dominant_mode_fraction"] = frac
        results["mode_table_total"] = table.total()


def _beam_gain(cfg, out, stages, results, artifacts):
    _, amp = _amplify(cfg, out, stages, results, artifacts)
    if amp is not None:
        _modal(cfg, amp, stages, results)


def _tilted_lens(cfg, out, stages, results, artifacts):
    signal = stages.run("synthesize", _signal, cfg)
    if signal is None:
        return
    res = stages.run("tilted-lens", _tilted, cfg, signal, "incident", out, artifacts)
    if res is not None:
        results["incident"] = _fringe_json(*res)
        results["bright_fringes"] = res[1].bright_fringes
        results["inferred_ell"] = res[3]


def _profiles_csv(a, b):
    n = max(a.profile.size, b.profile.size)
    rows = ["index,incident,amplified"]
    for i in range(n):
        u = a.profile[i] if i < a.profile.size else float("nan")
        v = b.profile[i] if i < b.profile.size else float("nan")
        rows.append(f"{i},{float(u)!r},{float(v)!r}")
    return "\n".join(rows) + "\n"


def _full_pipeline(cfg, out, stages, results, artifacts):
    signal, amp = _amplify(cfg, out, stages, results, artifacts)
    if amp is None:
        return
    inc = stages.run("tilted-lens-incident", _tilted, cfg, signal, "incident", out, artifacts)
    res = stages.run("tilted-lens-amplified", _tilted, cfg, amp, "amplified", out, artifacts)
    if inc is not None:
        results["incident"] = _fringe_json(*inc)
    if res is not None:
        results["amplified"] = _fringe_json(*res)
        results["bright_fringes"] = res[1].bright_fringes
        results["tilt_sign"] = res[2]
        results["inferred_ell"] = res[3]
    if inc is not None and res is not None:
        artifacts.append(str(rio.atomic_write(out / "fringe_profiles.csv",
                                              _profiles_csv(inc[1], res[1]))))
    _modal(cfg, amp, stages, results)


_RUNNERS = {
    "steady-state": _steady_state,
    "spectrum": _spectrum,
    "beam-gain": _beam_gain,
    "tilted-lens": _tilted_lens,
    "full-pipeline": _full_pipeline,
}


def run(cfg: RunConfig, out_dir) -> dict:
    """Execute ``cfg.mode``, write artifacts and ``summary.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stages = _Stages()
    results, artifacts = {}, []
    t0 = time.perf_counter()
    try:
        _RUNNERS[cfg.mode](cfg, out, stages, results, artifacts)
    except RamanOAMError as exc:
        stages.failed = True
        stages.records.append({"name": "run", "status": "failed", "seconds": 0.0,
                               "error": f"{type(exc).__name__}: {exc}"})
    failed = stages.failed or any(r["status"] == "failed" for r in stages.records)
    summary = {
        "mode": cfg.mode,
        "status": "failed" if failed else "ok",
        "exit_code": EXIT_RUNTIME if failed else EXIT_OK,
        "backend": BACKEND,
        "config": cfg.echo(),
        "defaulted": list(cfg.defaulted),
        "results": _jsonable(results),
        "stages": stages.records,
        "artifacts": sorted(Path(a).name for a in artifacts),
        "wall_seconds": time.perf_counter() - t0,
    }
    rio.atomic_write(out / "summary.json", json.dumps(summary, indent=2, allow_nan=True))
    return summary


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def build_parser():
    ap = argparse.ArgumentParser(
        prog="ramanoam",
        description="Raman gain of vortex beams in a pumped Lambda medium",
    )
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", type=Path, help="key = value configuration file")
    ap.add_argument("--out", type=Path, required=True, help="output directory")
    ap.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                    help="replace one configuration entry (repeatable)")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, args.mode, args.override)
    except (ConfigError, OSError, UnicodeDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        args.out.mkdir(parents=True, exist_ok=True)
        rio.atomic_write(args.out / "summary.json", json.dumps({
            "mode": args.mode, "status": "invalid", "exit_code": EXIT_CONFIG,
            "error": str(exc),
        }, indent=2))
        return EXIT_CONFIG
    summary = run(cfg, args.out)
    print(json.dumps({k: summary[k] for k in ("mode", "status", "results")}, indent=2))
    return summary["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
