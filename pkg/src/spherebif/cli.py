"""Command-line front end: configuration, dispatch, persistence.

Commands
--------
eigen       print and save the bifurcation ladder lambda_1 .. lambda_k
poly        save polynomial values, zeros, and weighted integrals
branch      trace both branches off (0, lambda_k) and save the points
degenerate  locate a degenerate solution on the branch and save a report
verify      check the isoparametric identities and the lifted PDE residual

Usage: spherebif <command> [--config PATH] [key=value ...]

The config file is a flat key = value document ('#' comments allowed);
command-line overrides take precedence.  Exit codes: 0 success, 2 solver
non-convergence, 3 configuration error.  Output files are byte-identical
across runs for a fixed config and seed on one platform; floats are
written with 17 significant digits so values round-trip exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import continuation, manifold
from .collocation import DiscreteSystem, build_grid
from .continuation import ConvergenceError
from .gegenbauer import (
    cube_integral,
    gegenbauer_eval,
    gegenbauer_norm2,
    gegenbauer_zeros,
    linearization_coeffs,
)
from .model import ModelParams, lambda_k, yamabe_lambda

__all__ = [
    "RunConfig",
    "ConfigError",
    "parse_config",
    "dispatch",
    "main",
    "read_branch_records",
]

COMMANDS = ("eigen", "poly", "branch", "degenerate", "verify")


class ConfigError(ValueError):
    """Invalid configuration (bad file, unknown key, or constraint hit)."""


@dataclass
class RunConfig:
    """Validated run settings; every field has a documented default.

    ``quad_points`` defaults to N + 1 and ``lambda_floor`` to
    1e-3 * lambda_1; both are resolved at build time when left unset.
    """

    n: int = 2
    delta: float = 1.0
    q: float = 3.0
    k: int = 2
    N: int = 96
    quad_points: int | None = None
    newton_tol: float = 1e-10
    max_iter: int = 30
    ds_init: float = 1e-2
    ds_min: float = 1e-6
    ds_max: float = 0.1
    sigma_tol: float = 1e-6
    lambda_floor: float | None = None
    s0: float = 1e-2
    h: float = 1e-3
    sample_count: int = 200
    seed: int = 0
    output_dir: str = "."

    def params(self) -> ModelParams:
        return ModelParams(n=self.n, delta=self.delta, q=self.q)

    def system(self) -> DiscreteSystem:
        return DiscreteSystem(build_grid(self.N), self.params(), self.quad_points)

    def floor(self) -> float:
        if self.lambda_floor is not None:
            return self.lambda_floor
        return 1e-3 * lambda_k(1, self.params())


_INT_KEYS = {"n", "k", "N", "quad_points", "max_iter", "sample_count", "seed"}
_STR_KEYS = {"output_dir"}


def _parse_value(key: str, raw: str):
    raw = raw.strip().strip("'\"")
    if key in _STR_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse value for {key!r}: {raw!r}") from exc


def parse_config(path: str | None = None, overrides=()) -> RunConfig:
    """Build a RunConfig from an optional file plus key=value overrides."""
    known = {f.name for f in fields(RunConfig)}
    values: dict = {}

    def set_kv(key, raw, where):
        key = key.strip()
        if key not in known:
            raise ConfigError(f"unknown configuration key {key!r} ({where})")
        values[key] = _parse_value(key, raw)

    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        for lineno, line in enumerate(lines, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key = value, got {line.rstrip()!r}")
            key, raw = stripped.split("=", 1)
            set_kv(key, raw, f"{path}:{lineno}")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, raw = item.split("=", 1)
        set_kv(key, raw, "command line")

    cfg = RunConfig(**values)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    try:
        cfg.params()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.k < 1:
        raise ConfigError(f"mode index k must be >= 1, got {cfg.k}")
    if cfg.N < 2:
        raise ConfigError(f"N must be >= 2, got {cfg.N}")
    if cfg.quad_points is not None and cfg.quad_points < 1:
        raise ConfigError(f"quad_points must be >= 1, got {cfg.quad_points}")
    for key in ("newton_tol", "ds_init", "ds_min", "ds_max", "sigma_tol"):
        if getattr(cfg, key) <= 0:
            raise ConfigError(f"{key} must be positive")
    if not cfg.ds_min <= cfg.ds_init <= cfg.ds_max:
        raise ConfigError("need ds_min <= ds_init <= ds_max")
    if cfg.max_iter < 1:
        raise ConfigError("max_iter must be >= 1")
    if cfg.lambda_floor is not None and cfg.lambda_floor < 0:
        raise ConfigError("lambda_floor must be >= 0")
    if cfg.s0 == 0:
        raise ConfigError("s0 must be nonzero")
    if not 0 < cfg.h < 0.1:
        raise ConfigError(f"h must lie in (0, 0.1), got {cfg.h}")
    if cfg.sample_count < 1:
        raise ConfigError("sample_count must be >= 1")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _log(msg: str, err: bool = False):
    stream = sys.stderr
    if err and stream.isatty() and not os.environ.get("NO_COLOR"):
        msg = f"\x1b[31m{msg}\x1b[0m"
    print(msg, file=stream)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def _point_record(pt, event: str = "") -> dict:
    return {
        "s_coord": pt.s_coord,
        "lambda": pt.lam,
        "nodal_count": pt.nodal_count,
        "sigma_min": pt.sigma_min,
        "u_min": pt.u_min,
        "phi": [float(v) for v in pt.phi],
        "event": event,
    }


def read_branch_records(path) -> list:
    """Load a JSON-lines branch file back into dictionaries."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records


def _write_branch(branch, cfg, tag):
    events = {}
    for idx, kind in branch.events:
        events[idx] = events.get(idx, "") + (";" if idx in events else "") + kind
    jsonl = os.path.join(cfg.output_dir, f"branch_k{branch.k}_{tag}.jsonl")
    with open(jsonl, "w", encoding="utf-8", newline="\n") as fh:
        for i, pt in enumerate(branch.points):
            fh.write(json.dumps(_point_record(pt, events.get(i, ""))))
            fh.write("\n")
    csv = os.path.join(cfg.output_dir, f"branch_k{branch.k}_{tag}.csv")
    _write_csv(
        csv,
        "s,lambda,sigma_min",
        [(pt.s_coord, pt.lam, pt.sigma_min) for pt in branch.points],
    )
    return jsonl, csv


def _cmd_eigen(cfg: RunConfig) -> int:
    params = cfg.params()
    rows = [(j, lambda_k(j, params)) for j in range(1, cfg.k + 1)]
    path = os.path.join(cfg.output_dir, "eigen.csv")
    _write_csv(path, "k,lambda", rows)
    print("k,lambda")
    for j, lam in rows:
        print(f"{j},{_fmt(lam)}")
    _log(f"wrote {path}")
    return 0


def _cmd_poly(cfg: RunConfig) -> int:
    k, n = cfg.k, cfg.n
    ts = np.linspace(-1.0, 1.0, 201)
    _write_csv(
        os.path.join(cfg.output_dir, "poly_values.csv"),
        "t,value",
        zip(ts.tolist(), gegenbauer_eval(k, n, ts).tolist()),
    )
    _write_csv(
        os.path.join(cfg.output_dir, "poly_zeros.csv"),
        "zero",
        [(z,) for z in gegenbauer_zeros(k, n).tolist()],
    )
    _write_csv(
        os.path.join(cfg.output_dir, "poly_integrals.csv"),
        "name,value",
        [("norm_squared", gegenbauer_norm2(k, n)), ("cube", cube_integral(k, n))],
    )
    _write_csv(
        os.path.join(cfg.output_dir, "poly_coeffs.csv"),
        "j,coeff",
        list(enumerate(linearization_coeffs(k, n).coeffs.tolist())),
    )
    _log(f"wrote poly_*.csv for k={k}, n={n} in {cfg.output_dir}")
    return 0


def _trace(cfg, system, direction):
    return continuation.trace_branch(
        cfg.k,
        direction,
        system,
        lambda_floor=cfg.floor(),
        s0=cfg.s0,
        ds_init=cfg.ds_init,
        ds_min=cfg.ds_min,
        ds_max=cfg.ds_max,
        tol=cfg.newton_tol,
        max_iter=cfg.max_iter,
    )


def _cmd_branch(cfg: RunConfig) -> int:
    system = cfg.system()
    code = 0
    for direction, tag in ((1, "plus"), (-1, "minus")):
        try:
            branch = _trace(cfg, system, direction)
        except ConvergenceError as exc:
            _log(f"branch k={cfg.k} {tag}: {exc}", err=True)
            code = 2
            continue
        jsonl, csv = _write_branch(branch, cfg, tag)
        _log(f"branch k={cfg.k} {tag}: {len(branch.points)} points -> {jsonl}, {csv}")
    return code


def _cmd_degenerate(cfg: RunConfig) -> int:
    system = cfg.system()
    try:
        branch = _trace(cfg, system, 1)
        report = continuation.locate_degenerate(
            branch, cfg.sigma_tol, system, tol=cfg.newton_tol
        )
    except ConvergenceError as exc:
        _log(f"degenerate k={cfg.k}: {exc}", err=True)
        return 2
    path = os.path.join(cfg.output_dir, f"degenerate_k{cfg.k}.json")
    payload = {
        "found": report is not None,
        "k": cfg.k,
        "n": cfg.n,
        "delta": cfg.delta,
        "q": cfg.q,
        "N": cfg.N,
        "lambda_k": lambda_k(cfg.k, cfg.params()),
    }
    if report is not None:
        payload.update(
            {
                "lambda_star": report.lambda_star,
                "sigma_at_star": report.sigma_at_star,
                "nodal_count": report.nodal_count,
                "u_min": report.u_min,
                "s_bracket": list(report.s_bracket),
                "residual_norm": report.residual_norm,
                "branch_lambda_min": report.branch_lambda_min,
                "crossing_index": report.crossing_index,
                "endpoint_derivs": list(report.endpoint_derivs),
                "phi": [float(v) for v in report.phi_star],
            }
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    if report is None:
        _log(f"degenerate k={cfg.k}: no eigenvalue crossing found -> {path}", err=True)
        return 2
    _write_csv(
        os.path.join(cfg.output_dir, f"degenerate_k{cfg.k}_profile.csv"),
        "t,phi",
        zip(system.grid.nodes.tolist(), report.phi_star.tolist()),
    )
    _log(
        f"degenerate k={cfg.k}: lambda* = {report.lambda_star:.9g}, "
        f"sigma = {report.sigma_at_star:.3e} -> {path}"
    )
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    params = cfg.params()
    # isoparametric identities, with an h-halving order estimate
    err_h = manifold.identity_residuals(cfg.n, cfg.delta, cfg.h, 1000, cfg.seed)
    err_h2 = manifold.identity_residuals(cfg.n, cfg.delta, cfg.h / 2, 1000, cfg.seed)
    ident = {}
    for name in ("laplacian", "gradient"):
        ident[name] = {
            "err_h": err_h[name],
            "err_half_h": err_h2[name],
            "order": float(np.log2(err_h[name] / err_h2[name])),
        }

    # lift the located degenerate profile when available, else the trivial one
    grid = build_grid(cfg.N)
    source = "trivial"
    phi = np.zeros(cfg.N + 1)
    lam = yamabe_lambda(cfg.n, cfg.delta)
    report_path = os.path.join(cfg.output_dir, f"degenerate_k{cfg.k}.json")
    if os.path.exists(report_path):
        with open(report_path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("found") and payload.get("N") == cfg.N:
            phi = np.array(payload["phi"], dtype=float)
            lam = float(payload["lambda_star"])
            source = f"degenerate_k{cfg.k}"
    residual = manifold.lifted_residual(
        grid, phi, lam, params, cfg.sample_count, cfg.h, cfg.seed
    )
    out = {
        "n": cfg.n,
        "delta": cfg.delta,
        "h": cfg.h,
        "identity_samples": 1000,
        "identities": ident,
        "lifted": {
            "source": source,
            "lambda": lam,
            "sample_count": cfg.sample_count,
            "max_residual": residual,
        },
    }
    path = os.path.join(cfg.output_dir, "verify.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    _log(
        f"verify: identity errors {err_h['laplacian']:.3e}/{err_h['gradient']:.3e}, "
        f"lifted residual {residual:.3e} ({source}) -> {path}"
    )
    return 0


_HANDLERS = {
    "eigen": _cmd_eigen,
    "poly": _cmd_poly,
    "branch": _cmd_branch,
    "degenerate": _cmd_degenerate,
    "verify": _cmd_verify,
}


def dispatch(command: str, cfg: RunConfig) -> int:
    """Run one command; returns the process exit code."""
    if command not in _HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    os.makedirs(cfg.output_dir, exist_ok=True)
    return _HANDLERS[command](cfg)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spherebif",
        description="Bifurcation branches and degenerate solutions of "
        "Yamabe-type equations on products of spheres.",
        epilog="Trailing key=value arguments override the config file.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None, help="key = value config file")
    args, overrides = parser.parse_known_args(argv)
    try:
        for item in overrides:
            if item.startswith("-"):
                raise ConfigError(f"unrecognized option {item!r}")
        cfg = parse_config(args.config, overrides)
        return dispatch(args.command, cfg)
    except ConfigError as exc:
        _log(f"configuration error: {exc}", err=True)
        return 3
    except ConvergenceError as exc:
        _log(f"solver failed to converge: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
