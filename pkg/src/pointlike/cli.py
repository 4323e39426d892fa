"""Batch front-end: every experiment as a subcommand with CSV file outputs.

Configuration is explicit: either direct flags or a flat key=value config
file (keys optionally prefixed with "<subcommand>."), with flags taking
precedence.  Unknown keys are rejected.  Output CSV carries a '#'-prefixed
header block recording the full effective configuration; the body is
deterministic for identical configuration.
"""

from __future__ import annotations

import argparse
import math
import sys
from importlib.metadata import version as _pkg_version

import numpy as np

from . import chain as chain_mod
from . import dynamics, solver, spectrum
from .errors import PointlikeError
from .regulated import (
    Kind,
    RegulatedPotentialSpec,
    eval_potential,
    eval_v,
    fundamental_solutions,
)

KINDS = {"boson": Kind.BOSON_DELTA, "fermion": Kind.FERMION_ETA}

SCHEMAS: dict[str, dict[str, type]] = {
    "potential": {"kind": str, "c": float, "nu": float, "a": float,
                  "xmin": float, "xmax": float, "n": int},
    "converge": {"kind": str, "c": float, "nu": float, "E": float,
                 "a_list": str, "x_out": float},
    "spectrum": {"kind": str, "c": float, "nu": float, "L": float,
                 "count": int},
    "duality": {"c": float, "nu": float, "L": float, "count": int},
    "evolve": {"c": float, "nu": float, "L": str, "t_max": float,
               "n_t": int, "deficit": float},
    "chain": {"envelope": str, "v0": float, "nu": float, "L": float,
              "N_list": str, "count": int},
    "selftest": {},
}

DEFAULTS: dict[str, dict] = {
    "potential": {"kind": "boson", "c": 1.0, "nu": 1.0, "a": 0.01,
                  "xmin": -0.1, "xmax": 0.1, "n": 800},
    "converge": {"kind": "boson", "c": 1.0, "nu": 1.0, "E": 4.0,
                 "a_list": "1e-2,3e-3,1e-3", "x_out": 1.0},
    "spectrum": {"kind": "boson", "c": 1.0, "nu": 1.0, "L": 1.0, "count": 30},
    "duality": {"c": 1.0, "nu": 1.0, "L": 1.0, "count": 10},
    "evolve": {"c": 1.0, "nu": 1.0, "L": "1", "t_max": 0.2, "n_t": 200,
               "deficit": 1e-3},
    "chain": {"envelope": "cosine", "v0": 1.0, "nu": 0.5, "L": 1.0,
              "N_list": "16,32,64,128", "count": 5},
    "selftest": {},
}


class ConfigError(Exception):
    pass


def parse_config_file(path: str, sub: str) -> dict:
    known = SCHEMAS[sub]
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if "." in key:
            prefix, _, bare = key.partition(".")
            if prefix != sub:
                continue  # another subcommand's section
            key = bare
        if key == "out":
            out["out"] = value
            continue
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r} for {sub!r}")
        try:
            out[key] = known[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}")
    return out


def effective_config(sub: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[sub])
    if getattr(args, "config", None):
        cfg.update(parse_config_file(args.config, sub))
    for key in SCHEMAS[sub]:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def write_csv(path: str, sub: str, cfg: dict, header: list[str],
              rows: list[list]):
    def fmt(x):
        if isinstance(x, float):
            return f"{x:.12g}"
        return str(x)

    lines = [f"# pointlike {_pkg_version('pointlike')}", f"# subcommand={sub}"]
    lines += [f"# {k}={cfg[k]}" for k in sorted(cfg)]
    lines.append(",".join(header))
    lines += [",".join(fmt(x) for x in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _kind(cfg) -> Kind:
    try:
        return KINDS[cfg["kind"]]
    except KeyError:
        raise ConfigError(f"kind must be one of {sorted(KINDS)}")


def run_potential(cfg: dict, out: str):
    spec = RegulatedPotentialSpec(kind=_kind(cfg), c=cfg["c"], nu=cfg["nu"],
                                  a=cfg["a"])
    xs = np.linspace(cfg["xmin"], cfg["xmax"], cfg["n"])
    if spec.kind is Kind.FERMION_ETA:
        xs = xs[np.abs(xs) >= spec.guard]
    v, _, w, _ = fundamental_solutions(spec, xs)
    V = eval_potential(spec, xs)
    rows = [[float(x), float(Vx), float(vx), float(wx)]
            for x, Vx, vx, wx in zip(xs, V, v, w)]
    write_csv(out, "potential", cfg, ["x", "V", "v", "w"], rows)


def run_converge(cfg: dict, out: str):
    a_list = [float(s) for s in cfg["a_list"].split(",")]
    rows_out = []
    study = solver.convergence_study(_kind(cfg), cfg["c"], cfg["nu"], a_list,
                                     cfg["E"], x_out=cfg["x_out"])
    for row in study:
        if row.failure is not None:
            rows_out.append([row.a, math.nan, math.nan, row.target, math.nan])
        else:
            rows_out.append([row.a, row.jump.real, row.jump.imag, row.target,
                             row.rel_error])
    try:
        cfg = dict(cfg,
                   extrapolated=f"{solver.extrapolate_jump(study).real:.12g}")
    except Exception:
        pass
    write_csv(out, "converge", cfg,
              ["a", "jump_re", "jump_im", "target", "rel_error"], rows_out)


def run_spectrum(cfg: dict, out: str):
    model = spectrum.PointlikeModel(kind=_kind(cfg), c=cfg["c"], nu=cfg["nu"],
                                    L=cfg["L"])
    rows = []
    for sector in ("interacting", "free"):
        for n, m in enumerate(spectrum.solve_modes(model, cfg["count"], sector),
                              start=1):
            rows.append([sector, n, m.k, m.alpha, m.Z, m.E])
    write_csv(out, "spectrum", cfg, ["sector", "n", "k", "alpha", "Z", "E"],
              rows)


def run_duality(cfg: dict, out: str):
    model = spectrum.PointlikeModel(kind=Kind.BOSON_DELTA, c=cfg["c"],
                                    nu=cfg["nu"], L=cfg["L"])
    modes = spectrum.solve_modes(model, cfg["count"])
    rows = [[n, m.k, spectrum.duality_residual(model, m)]
            for n, m in enumerate(modes, start=1)]
    write_csv(out, "duality", cfg, ["n", "k", "residual"], rows)


def run_evolve(cfg: dict, out: str):
    times = np.linspace(0.0, cfg["t_max"], cfg["n_t"])
    if cfg["L"] in ("inf", "infinity"):
        p = dynamics.infinite_capture_curve(cfg["c"], cfg["nu"], times)
    else:
        model = spectrum.PointlikeModel(kind=Kind.BOSON_DELTA, c=cfg["c"],
                                        nu=cfg["nu"], L=float(cfg["L"]))
        modes = dynamics.modes_for_completeness(model, target=cfg["deficit"])
        result = dynamics.finite_capture_curve(
            model, dynamics.captured_at_origin(), modes, times)
        p = result.p
    rows = [[float(t), float(pt)] for t, pt in zip(times, p)]
    write_csv(out, "evolve", cfg, ["t", "p"], rows)


def _make_envelope(cfg: dict):
    name = cfg["envelope"]
    L, v0 = cfg["L"], cfg["v0"]
    if name == "const":
        return lambda x: v0 * np.ones_like(np.asarray(x, dtype=float))
    if name == "cosine":
        return lambda x: v0 * (1.0 + np.cos(2.0 * np.pi * np.asarray(x) / L))
    # otherwise: a two-column sample file, interpolated with a periodic spline
    from scipy.interpolate import CubicSpline
    data = np.loadtxt(name)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ConfigError("envelope sample file must have two columns: x, V")
    xs, vs = data[:, 0], data[:, 1]
    spline = CubicSpline(xs, vs, bc_type="periodic" if vs[0] == vs[-1] else
                         "not-a-knot")
    return spline


def run_chain(cfg: dict, out: str):
    envelope = _make_envelope(cfg)
    n_list = [int(s) for s in cfg["N_list"].split(",")]
    table = chain_mod.convergence_table(envelope, cfg["nu"], cfg["L"], n_list,
                                        cfg["count"])
    reference = chain_mod.solve_continuum(envelope, cfg["nu"], cfg["L"],
                                          cfg["count"])
    rows = []
    for entry in table:
        for level, (ec, er) in enumerate(zip(entry.eigenvalues, reference),
                                         start=1):
            rows.append([entry.N, level, ec, er, abs(ec - er)])
    write_csv(out, "chain", cfg,
              ["N", "level", "E_chain", "E_continuum", "abs_error"], rows)


def run_selftest(cfg: dict, out: str):
    checks = []

    def check(name, fn):
        try:
            ok = bool(fn())
        except Exception:
            ok = False
        checks.append((name, ok))
        print(("PASS" if ok else "FAIL") + f" {name}")

    spec = RegulatedPotentialSpec(kind=Kind.BOSON_DELTA, c=1.0, nu=1.0, a=0.01)
    xs = np.linspace(-0.2, 0.2, 41)
    check("regulated.parity",
          lambda: np.allclose(eval_v(spec, xs), eval_v(spec, -xs[::-1])[::-1],
                              atol=1e-12))
    check("regulated.positivity", lambda: np.all(eval_v(spec, xs) >= 1.0))

    def wronskian():
        v, dv, w, dw = fundamental_solutions(spec, xs)
        return np.max(np.abs(v * dw - dv * w - 1.0)) < 1e-8
    check("regulated.wronskian", wronskian)

    model = spectrum.PointlikeModel(kind=Kind.BOSON_DELTA, c=1.0, nu=1.0, L=1.0)
    modes = spectrum.solve_modes(model, 8)
    check("spectrum.gram",
          lambda: np.max(np.abs(spectrum.gram_matrix(model, modes)
                                - np.eye(8))) < 1e-8)
    check("spectrum.duality",
          lambda: max(spectrum.duality_residual(model, m) for m in modes)
          < 1e-12)
    cm = spectrum.ConnectionMatrix(model)
    check("spectrum.connection_det",
          lambda: all(abs(np.linalg.det(cm(E)) - 1.0) < 1e-12
                      for E in np.linspace(-50, 50, 100)))
    check("dynamics.completeness",
          lambda: abs(dynamics.completeness_check(model, 200).total - 1.0)
          < 1e-3)
    free = chain_mod.ChainSpec(N=4, envelope=lambda x: np.zeros_like(x),
                               nu=0.0, L=1.0)
    check("chain.free_trace",
          lambda: all(abs(chain_mod.ring_trace(free, E)
                          - 2 * math.cos(math.sqrt(E) * free.L)) < 1e-9
                      for E in (0.5, 3.0, 17.0)))
    failed = [name for name, ok in checks if not ok]
    if failed:
        raise PointlikeError(f"selftest failures: {', '.join(failed)}")


RUNNERS = {
    "potential": run_potential,
    "converge": run_converge,
    "spectrum": run_spectrum,
    "duality": run_duality,
    "evolve": run_evolve,
    "chain": run_chain,
    "selftest": run_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pointlike",
        description="Energy-dependent pointlike interactions: experiments")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for sub, schema in SCHEMAS.items():
        sp = subs.add_parser(sub)
        sp.add_argument("--config", help="flat key=value config file")
        sp.add_argument("--out", default="-", help="output CSV path (- = stdout)")
        for key, typ in schema.items():
            sp.add_argument(f"--{key.replace('_', '-')}", dest=key, type=typ,
                            default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    sub = args.subcommand
    try:
        cfg = effective_config(sub, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = cfg.pop("out", None) or args.out
    try:
        RUNNERS[sub](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PointlikeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
