"""Configuration-driven command line front end.

Subcommands dispatch the library computations and write deterministic
artifacts: ``results.json`` (every value as re/im with error bound and
method provenance, defaults echoed for reproducibility), ``results.csv``
(one row per sampled quantity), and ``partition.csv`` for sector splits.
Flags mirror config-file keys and override them; configs are TOML or JSON,
auto-detected by extension.

Exit codes: 0 success, 2 config error, 3 numeric non-convergence.
``CONIC_XI_THREADS`` caps the parallelism of multi-point sweeps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from conic_xi.char_algebra import TorusElement
from conic_xi.gelfand_robbin import (
    Predomain,
    adjoint_predomain,
    gr_basis,
    pairing_matrix,
    xi_with_predomain,
)
from conic_xi.lefschetz import assemble, eta12_extrapolated, eta1_closed, eta2_closed, quadric_model
from conic_xi.model_cones import ConeModel, catalog, isolation_margin, xi_tilde, xi_tilde_closed
from conic_xi.regularize import DEFAULT_S_GRID, LimitEstimate
from conic_xi.spectral_partition import circle_link_spectrum, xi_spectral

__all__ = ["RunConfig", "ConfigError", "parse_config", "run", "main"]

COMMANDS = ("xi", "eta", "partition", "gr", "lefschetz", "report")
MODELS = ("flat_cn", "circle", "quadric", "quadric_vertex", "cyclic")


class ConfigError(ValueError):
    """Invalid or unparseable run configuration."""


@dataclass
class RunConfig:
    command: str = "xi"
    model: str = "flat_cn"
    twist: str = "dolbeault"
    n: int = 1
    alpha: Fraction = Fraction(1)
    order: int = 2
    weights: tuple[int, ...] = (1,)
    angles: tuple[float, ...] = ()
    phi: float = 0.0
    predomain: tuple[complex, ...] = ()
    #: empty means "use the library default for the command"
    s_grid: tuple[float, ...] = ()
    cutoff: int = 2000
    n_terms: int = 2000
    tol: float = 1e-6
    output_dir: str = "."
    threads: int = 1

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; valid commands: {', '.join(COMMANDS)}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; valid models: {', '.join(MODELS)}")
        if self.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.order < 1:
            raise ConfigError("order must be >= 1")
        if self.cutoff < 1:
            raise ConfigError("cutoff must be >= 1")
        if self.n_terms < 1:
            raise ConfigError("n_terms must be >= 1")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        if self.s_grid:
            if len(self.s_grid) < 4:
                raise ConfigError("s_grid needs at least 4 points")
            if any(s <= 0 for s in self.s_grid) or any(
                a <= b for a, b in zip(self.s_grid, self.s_grid[1:])
            ):
                raise ConfigError("s_grid must be positive and strictly decreasing")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


_KEY_TYPES = {f.name for f in fields(RunConfig)}


def _coerce(key: str, value: Any) -> Any:
    try:
        if key in ("n", "order", "cutoff", "n_terms", "threads"):
            return int(value)
        if key in ("phi", "tol"):
            return float(value)
        if key == "alpha":
            return Fraction(str(value)) if isinstance(value, str) else Fraction(value).limit_denominator(10**9)
        if key == "weights":
            return tuple(int(w) for w in value)
        if key in ("angles", "s_grid"):
            return tuple(float(x) for x in value)
        if key == "predomain":
            out = []
            for item in value:
                if isinstance(item, (list, tuple)):
                    re_, im_ = item
                    out.append(complex(float(re_), float(im_)))
                else:
                    out.append(complex(float(item), 0.0))
            return tuple(out)
        if key in ("command", "model", "twist", "output_dir"):
            return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value for key {key!r}: {value!r} ({exc})") from None
    raise ConfigError(f"unknown config key {key!r}")


def config_from_mapping(data: dict[str, Any]) -> RunConfig:
    cfg = RunConfig()
    for key, value in data.items():
        if key not in _KEY_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(cfg, key, _coerce(key, value))
    cfg.validate()
    return cfg


def parse_config(path: str | Path) -> RunConfig:
    """Load and validate a TOML or JSON run configuration."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"JSON parse error in {p} at line {exc.lineno}: {exc.msg}") from None
    elif p.suffix.lower() == ".toml":
        try:
            import tomllib  # type: ignore[import-not-found]
        except ModuleNotFoundError:
            import tomli as tomllib  # type: ignore[no-redef]
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"TOML parse error in {p}: {exc}") from None
    else:
        raise ConfigError(f"unsupported config extension {p.suffix!r} (use .toml or .json)")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table/object")
    return config_from_mapping(data)


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if x != x:
        return '"nan"'
    if x in (float("inf"), float("-inf")):
        return f'"{x}"'
    return f"{x:.17g}"


def _to_json(obj: Any, indent: int = 0) -> str:
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{k}": {_to_json(obj[k], indent + 2)}' for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_to_json(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _complex_entry(value: complex, error_bound: float | None = None,
                   method: str | None = None, converged: bool | None = None) -> dict:
    out: dict[str, Any] = {"re": float(value.real), "im": float(value.imag)}
    if error_bound is not None:
        out["error_bound"] = float(error_bound)
    if method is not None:
        out["method"] = method
    if converged is not None:
        out["converged"] = converged
    return out


def _estimate_entry(est: LimitEstimate) -> dict:
    return _complex_entry(est.value, est.error_bound, est.method, est.converged)


def _echo_config(cfg: RunConfig) -> dict:
    return {
        "command": cfg.command,
        "model": cfg.model,
        "twist": cfg.twist,
        "n": cfg.n,
        "alpha": str(cfg.alpha),
        "order": cfg.order,
        "weights": list(cfg.weights),
        "angles": list(cfg.angles),
        "phi": cfg.phi,
        "predomain": [[v.real, v.imag] for v in cfg.predomain],
        "s_grid": list(cfg.s_grid),
        "cutoff": cfg.cutoff,
        "n_terms": cfg.n_terms,
        "tol": cfg.tol,
        "threads": cfg.threads,
    }


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            cells.append(f"{v:.17g}" if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------


def _build_model(cfg: RunConfig) -> ConeModel:
    if cfg.model == "flat_cn":
        return ConeModel.flat(cfg.n, cfg.twist)
    if cfg.model == "circle":
        return ConeModel.circle(cfg.alpha)
    if cfg.model == "quadric_vertex":
        return ConeModel.quadric_vertex(cfg.twist)
    if cfg.model == "cyclic":
        return ConeModel.cyclic(cfg.order, cfg.weights)
    raise ConfigError(f"model {cfg.model!r} is not a single-cone model")


def _element(cfg: RunConfig, expected: int | None = None) -> TorusElement:
    angles = cfg.angles if cfg.angles else (cfg.phi,)
    if expected is not None and len(angles) != expected:
        raise ConfigError(f"model needs {expected} angles, got {len(angles)}")
    return TorusElement(angles)


def _cmd_xi(cfg: RunConfig) -> tuple[dict, list, int]:
    rows: list[tuple] = []
    if cfg.model == "quadric":
        g = _element(cfg, 2)
        res = assemble(quadric_model(cfg.twist), g)
        values = {}
        for label, v in res.breakdown:
            print(f"  {label}: {v.real:+.12f} {v.imag:+.12f}i")
            values[label] = _complex_entry(v)
        print(f"  sum: {res.total.real:+.12f} {res.total.imag:+.12f}i")
        values["sum"] = _complex_entry(res.total)
        rows = [(label, 0.0, v["re"], v["im"]) for label, v in values.items()]
        return {"values": values}, rows, 0

    model = _build_model(cfg)
    g = _element(cfg, model.n)
    est = xi_tilde(model, g, cfg.s_grid or None, n_terms=cfg.n_terms, tol=cfg.tol)
    cfg.s_grid = tuple(est.s_grid)
    closed = xi_tilde_closed(model, g)
    print(f"  xi({model.label}) = {est.value.real:+.12f} {est.value.imag:+.12f}i "
          f"(bound {est.error_bound:.2e}, {est.method})")
    values = {
        "xi_tilde": _estimate_entry(est),
        "xi_tilde_closed": _complex_entry(closed, method="closed form at s=0"),
    }
    rows = [("xi_tilde", 0.0, est.value.real, est.value.imag)]
    return {"values": values}, rows, 0 if est.converged else 3


def _cmd_eta(cfg: RunConfig) -> tuple[dict, list, int]:
    g = _element(cfg, cfg.n)
    cfg.s_grid = cfg.s_grid or DEFAULT_S_GRID
    e1, e2 = eta12_extrapolated(cfg.n, g, cfg.s_grid, cfg.n_terms, cfg.tol)
    c1, c2 = eta1_closed(g), eta2_closed(g)
    print(f"  eta1(0) = {e1.value:+.12f}  closed {c1:+.12f}")
    print(f"  eta2(0) = {e2.value:+.12f}  closed {c2:+.12f}")
    values = {
        "eta1": _estimate_entry(e1),
        "eta2": _estimate_entry(e2),
        "eta1_closed": _complex_entry(c1),
        "eta2_closed": _complex_entry(c2),
        "eta_total": _complex_entry(e1.value + e2.value,
                                    e1.error_bound + e2.error_bound),
    }
    rows = [("eta1", 0.0, e1.value.real, e1.value.imag),
            ("eta2", 0.0, e2.value.real, e2.value.imag)]
    code = 0 if (e1.converged and e2.converged) else 3
    return {"values": values}, rows, code


def _cmd_partition(cfg: RunConfig) -> tuple[dict, list, int]:
    modes = circle_link_spectrum(cfg.alpha, cfg.cutoff, cfg.phi)
    cfg.s_grid = cfg.s_grid or DEFAULT_S_GRID
    report = xi_spectral(modes, cfg.s_grid, alpha=cfg.alpha, tol=cfg.tol)
    closed = xi_tilde_closed(ConeModel.circle(cfg.alpha), TorusElement([cfg.phi]))
    print(f"  xi1(0)={report.xi1_zero.value:+.9f} xi2(0)={report.xi2_zero.value:+.9f} "
          f"xi3(0)={report.xi3_zero.value:+.9f}")
    print(f"  xi(0) = {report.xi_zero:+.12f}, cohomological {closed:+.12f}")
    values = {
        "xi1_zero": _estimate_entry(report.xi1_zero),
        "xi2_zero": _estimate_entry(report.xi2_zero),
        "xi3_zero": _estimate_entry(report.xi3_zero),
        "xi_zero": _complex_entry(report.xi_zero, report.error_bound),
        "xi_cohomological": _complex_entry(closed),
        "h": [_complex_entry(h) for h in report.h],
    }
    rows = report.rows()
    ok = all(e.converged for e in (report.xi1_zero, report.xi2_zero, report.xi3_zero))
    return {"values": values}, rows, 0 if ok else 3


def _cmd_gr(cfg: RunConfig) -> tuple[dict, list, int]:
    basis = gr_basis(cfg.alpha)
    hol = [b for b in basis if b.degree == 0]
    if cfg.predomain and len(cfg.predomain) != len(hol):
        raise ConfigError(f"predomain needs {len(hol)} coefficients for alpha={cfg.alpha}")
    W = Predomain(cfg.alpha, [list(cfg.predomain)] if cfg.predomain else np.zeros((0, len(hol))))
    W = adjoint_predomain(W)
    model = ConeModel.circle(cfg.alpha)
    xi_closed = xi_with_predomain(model, W, cfg.phi, trace_method="closed")
    xi_quad = xi_with_predomain(model, W, cfg.phi, trace_method="quadrature")
    P = pairing_matrix(cfg.alpha)
    print(f"  ambiguous block dimension: {len(hol)}")
    print(f"  xi_W = {xi_closed.real:+.12f} {xi_closed.imag:+.12f}i "
          f"(quadrature route {abs(xi_closed - xi_quad):.2e} away)")
    values = {
        "xi_predomain": _complex_entry(xi_closed, method="closed traces"),
        "xi_predomain_quadrature": _complex_entry(xi_quad, method="quadrature traces"),
        "pairing_matrix": [[_complex_entry(P[i, j]) for j in range(P.shape[1])]
                           for i in range(P.shape[0])],
        "exponents_holomorphic": [str(b.radial_exponent) for b in hol],
    }
    rows = [("xi_predomain", 0.0, xi_closed.real, xi_closed.imag)]
    return {"values": values}, rows, 0


def _cmd_lefschetz(cfg: RunConfig) -> tuple[dict, list, int]:
    if cfg.model != "quadric":
        raise ConfigError("the lefschetz command currently assembles the quadric model")
    g = _element(cfg, 2)
    res = assemble(quadric_model(cfg.twist), g)
    values: dict[str, Any] = {}
    rows = []
    for label, v in res.breakdown:
        print(f"  {label}: {v.real:+.12f} {v.imag:+.12f}i")
        values[label] = _complex_entry(v)
        rows.append((label, 0.0, v.real, v.imag))
    values["sum"] = _complex_entry(res.total)
    rows.append(("sum", 0.0, res.total.real, res.total.imag))
    print(f"  sum: {res.total.real:+.12f} {res.total.imag:+.12f}i")
    return {"values": values}, rows, 0


def _cmd_report(cfg: RunConfig) -> tuple[dict, list, int]:
    """Catalog battery: duality residuals and xi values per model."""
    rng = np.random.default_rng(20240901)

    def one(model: ConeModel) -> tuple[str, dict, tuple]:
        g = TorusElement(rng.uniform(0.3, 2 * np.pi - 0.3, size=model.n))
        while isolation_margin(model, g) < 0.25:
            g = TorusElement(rng.uniform(0.3, 2 * np.pi - 0.3, size=model.n))
        est = xi_tilde(model, g, cfg.s_grid or None, tol=cfg.tol)
        closed = xi_tilde_closed(model, g)
        resid = abs(est.value - closed)
        entry = {
            "xi": _estimate_entry(est),
            "closed": _complex_entry(closed),
            "extrapolation_vs_closed": resid,
        }
        return model.label, entry, (model.label, 0.0, est.value.real, est.value.imag)

    threads = cfg.threads
    models = catalog()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, models))
    else:
        results = [one(m) for m in models]
    values = {}
    rows = []
    worst = 0.0
    for label, entry, row in results:
        values[label] = entry
        rows.append(row)
        worst = max(worst, entry["extrapolation_vs_closed"])
        print(f"  {label}: residual {entry['extrapolation_vs_closed']:.2e}")
    print(f"  worst extrapolation residual: {worst:.2e}")
    return {"values": values, "worst_residual": worst}, rows, 0 if worst < cfg.tol else 3


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def run(cfg: RunConfig) -> int:
    """Execute a validated config; write artifacts; return the exit code."""
    cfg.validate()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    dispatch = {
        "xi": _cmd_xi,
        "eta": _cmd_eta,
        "partition": _cmd_partition,
        "gr": _cmd_gr,
        "lefschetz": _cmd_lefschetz,
        "report": _cmd_report,
    }
    try:
        payload, rows, code = dispatch[cfg.command](cfg)
    except ConfigError:
        raise
    except (ValueError, ArithmeticError) as exc:
        err = {"error": str(exc), "config": _echo_config(cfg)}
        (out / "results.json").write_text(_to_json(err) + "\n", encoding="utf-8")
        print(f"error: {exc}", file=sys.stderr)
        return 3
    payload = {"config": _echo_config(cfg), **payload}
    (out / "results.json").write_text(_to_json(payload) + "\n", encoding="utf-8")
    _write_csv(out / "results.csv", ("quantity", "s", "re", "im"), rows)
    if cfg.command == "partition":
        _write_csv(out / "partition.csv", ("sector", "s", "re", "im"), rows)
    return code


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, default=None, help="TOML or JSON config file")
    p.add_argument("--output-dir", type=str, default=None)
    p.add_argument("--s-grid", type=float, nargs="+", default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--n-terms", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conic-xi",
                                 description="equivariant index defects of model cones")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("xi", help="local (or assembled) index defect")
    p.add_argument("--model", type=str, default=None, choices=MODELS)
    p.add_argument("--twist", type=str, default=None, choices=("dolbeault", "spin"))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--alpha", type=str, default=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--weights", type=int, nargs="+", default=None)
    p.add_argument("--angles", type=float, nargs="+", default=None)
    _add_common(p)

    p = sub.add_parser("eta", help="sphere eta series")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--angles", type=float, nargs="+", default=None)
    _add_common(p)

    p = sub.add_parser("partition", help="sector split of the spectral xi function")
    p.add_argument("--alpha", type=str, default=None)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--cutoff", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("gr", help="boundary pairings and predomain correction")
    p.add_argument("--alpha", type=str, default=None)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--predomain", type=float, nargs="+", default=None)
    _add_common(p)

    p = sub.add_parser("lefschetz", help="global fixed-point assembly")
    p.add_argument("--model", type=str, default=None, choices=("quadric",))
    p.add_argument("--twist", type=str, default=None, choices=("dolbeault", "spin"))
    p.add_argument("--angles", type=float, nargs="+", default=None)
    _add_common(p)

    p = sub.add_parser("report", help="catalog verification battery")
    _add_common(p)

    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = parse_config(args.config)
        else:
            cfg = RunConfig()
        cfg.command = args.command
        overrides = {
            k.replace("-", "_"): v
            for k, v in vars(args).items()
            if k not in ("command", "config") and v is not None
        }
        for key, value in overrides.items():
            setattr(cfg, key, _coerce(key, value))
        env_threads = os.environ.get("CONIC_XI_THREADS")
        if env_threads:
            try:
                cfg.threads = max(1, min(cfg.threads if cfg.threads > 1 else 64,
                                         int(env_threads)))
            except ValueError:
                raise ConfigError("CONIC_XI_THREADS must be an integer") from None
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
