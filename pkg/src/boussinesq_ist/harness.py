"""Command-line pipeline: scatter -> asym -> pde -> compare, with cached artifacts.

A single JSON config drives every command; flags override individual fields.
Each stage records a digest of the config slice it depends on together with
sha256 digests of its outputs in ``manifest.json``; a stage whose digest and
outputs are unchanged is not recomputed.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from importlib import metadata
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import asymptotics, pderef, scatter
from .errors import BoussinesqError, SectorError, ValidationError
from .profiles import make_profile

DEFAULTS: dict[str, Any] = {
    "profile": {"u0": [{"family": "gaussian", "amplitude": 0.1, "width": 1.0, "center": 0.0}]},
    "k_grid": {"k_lo": 0.01, "k_hi": 8.0, "dk": 0.01},
    "k_min": 1e-3,
    "tol": 1e-10,
    "zeta": [0.6, 1.0, 1.4],
    "t": [40.0, 80.0, 160.0],
    "margin": asymptotics.DEFAULT_MARGIN,
    "epsilon": asymptotics.DEFAULT_EPSILON,
    "threads": 1,
    "pde": {"L": 1280.0, "N": 2**14, "c_cfl": 0.5, "dealias": True, "allow_wrap": False},
    "assumptions": {},
}
T_MIN_COMPARE = 20.0


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


# ---------------------------------------------------------------------------
# config


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict) and key != "profile":
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _set_dotted(cfg: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = cfg
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ValidationError(f"cannot override inside non-mapping {key!r}", field=dotted)
    node[keys[-1]] = value


def _float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of numbers, got {text!r}", field=flag) from None


def load_config(path: str | None, args: argparse.Namespace | None = None) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if path:
        try:
            user = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config: {exc}", field="config") from None
        if not isinstance(user, dict):
            raise ValidationError("config must be a JSON object", field="config")
        cfg = _merge(cfg, user)
    if args is not None:
        if getattr(args, "zeta", None):
            cfg["zeta"] = _float_list(args.zeta, "zeta")
        if getattr(args, "t", None):
            cfg["t"] = _float_list(args.t, "t")
        if getattr(args, "kmax", None) is not None:
            cfg["k_grid"]["k_hi"] = float(args.kmax)
        if getattr(args, "threads", None) is not None:
            cfg["threads"] = int(args.threads)
        for item in getattr(args, "override", None) or []:
            if "=" not in item:
                raise ValidationError(f"override must look like key=value, got {item!r}", field="override")
            key, val = item.split("=", 1)
            _set_dotted(cfg, key.strip(), _parse_value(val.strip()))
    return cfg


def k_grid_from(cfg: dict) -> np.ndarray:
    g = cfg["k_grid"]
    if isinstance(g, list):
        return np.asarray(g, dtype=float)
    return scatter.default_k_grid(float(g["k_lo"]), float(g["k_hi"]), float(g["dk"]))


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


# ---------------------------------------------------------------------------
# artifact store


class Store:
    def __init__(self, out: Path):
        self.out = out
        out.mkdir(parents=True, exist_ok=True)
        self.path = out / "manifest.json"
        self.manifest = json.loads(self.path.read_text()) if self.path.exists() else {}
        self.manifest.setdefault("stages", {})

    def fresh(self, stage: str, key: str) -> bool:
        entry = self.manifest["stages"].get(stage)
        if not entry or entry.get("digest") != key:
            return False
        for name, sha in entry["outputs"].items():
            f = self.out / name
            if not f.exists() or hashlib.sha256(f.read_bytes()).hexdigest() != sha:
                return False
        return True

    def write(self, name: str, text: str) -> str:
        (self.out / name).write_text(text)
        return hashlib.sha256(text.encode()).hexdigest()

    def record(self, stage: str, key: str, outputs: dict[str, str], seconds: float, extra: dict | None = None):
        self.manifest["stages"][stage] = {
            "digest": key,
            "outputs": outputs,
            "seconds": round(seconds, 3),
            **(extra or {}),
        }

    def save(self, cfg: dict):
        self.manifest["tool_version"] = tool_version()
        self.manifest["config_hash"] = digest(cfg)
        self.manifest["profile"] = cfg["profile"]
        self.manifest["k_grid"] = cfg["k_grid"]
        self.manifest["zeta"] = cfg["zeta"]
        self.manifest["t"] = cfg["t"]
        files = {}
        for stage in self.manifest["stages"].values():
            files.update(stage["outputs"])
        self.manifest["files"] = dict(sorted(files.items()))
        self.path.write_text(json.dumps(self.manifest, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# stages


def _scatter_key(cfg):
    return digest({k: cfg[k] for k in ("profile", "k_grid", "k_min", "tol")})


def stage_scatter(cfg: dict, store: Store) -> scatter.SpectralLine:
    key = _scatter_key(cfg)
    if store.fresh("scatter", key):
        return scatter.SpectralLine.from_csv((store.out / "spectral_line.csv").read_text())
    t0 = time.perf_counter()
    p = make_profile(cfg["profile"])
    line = scatter.spectral_line(p, k_grid_from(cfg), tol=cfg["tol"], k_min=cfg["k_min"], threads=cfg["threads"])
    sha = store.write("spectral_line.csv", line.to_csv())
    store.record(
        "scatter",
        key,
        {"spectral_line.csv": sha},
        time.perf_counter() - t0,
        {
            "max_est_error": float(np.max(line.est_error)),
            "k_max": line.k_max,
            "origin_distance_to_omega": line.origin_distance(),
            "truncated": line.truncated,
        },
    )
    return line


def _asym_key(cfg):
    return digest({"scatter": _scatter_key(cfg), **{k: cfg[k] for k in ("zeta", "margin", "epsilon")}})


def stage_asym(cfg: dict, store: Store, line: scatter.SpectralLine) -> list[asymptotics.AsymptoticParams]:
    key = _asym_key(cfg)
    if store.fresh("asym", key):
        data = json.loads((store.out / "rays.json").read_text())
        return [asymptotics.AsymptoticParams.from_json_dict(d) for d in data]
    t0 = time.perf_counter()
    zeta0 = scatter.compute_zeta0(line)
    params = [
        asymptotics.asym_params(line, z, margin=cfg["margin"], epsilon=cfg["epsilon"], zeta0=zeta0) for z in cfg["zeta"]
    ]
    sha = store.write("rays.json", asymptotics.rays_json(params) + "\n")
    store.record(
        "asym",
        key,
        {"rays.json": sha},
        time.perf_counter() - t0,
        {"zeta0": zeta0, "tail_error": max((p.tail_error for p in params), default=0.0)},
    )
    return params


def _pde_config(cfg: dict) -> pderef.SolverConfig:
    pc = cfg["pde"]
    times = sorted(float(t) for t in cfg["t"])
    if not times:
        raise ValidationError("need at least one sample time", field="t")
    x_obs = max((abs(z) * times[-1] for z in cfg["zeta"]), default=0.0)
    return pderef.SolverConfig(
        L=float(pc["L"]),
        N=int(pc["N"]),
        t_end=times[-1],
        dt=pc.get("dt"),
        c_cfl=float(pc.get("c_cfl", 0.5)),
        dealias=bool(pc.get("dealias", True)),
        sample_times=times,
        x_observe=x_obs,
        allow_wrap=bool(pc.get("allow_wrap", False)),
    )


def _field_name(t: float) -> str:
    return f"fields_t{t:g}.csv"


def _pde_key(cfg):
    return digest({k: cfg[k] for k in ("profile", "pde", "t", "zeta")})


def stage_pde(cfg: dict, store: Store) -> dict[float, pderef.WaveField]:
    key = _pde_key(cfg)
    solver = _pde_config(cfg)
    if store.fresh("pde", key):
        return {t: _read_field(store.out / _field_name(t), solver) for t in solver.sample_times}
    t0 = time.perf_counter()
    run = pderef.pde_run(make_profile(cfg["profile"]), solver)
    outputs = {}
    for f in run.fields:
        outputs[_field_name(f.t)] = store.write(_field_name(f.t), f.to_csv())
    store.record("pde", key, outputs, time.perf_counter() - t0, {"run": run.manifest()})
    return {f.t: f for f in run.fields}


def _read_field(path: Path, solver: pderef.SolverConfig) -> pderef.WaveField:
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    u = np.array([float(r["u"]) for r in rows])
    v = np.array([float(r["v"]) for r in rows])
    t = float(path.stem.split("_t", 1)[1])
    return pderef.WaveField(solver.L, solver.N, t, u, v)


@dataclass
class ComparisonRow:
    zeta: float
    t: float
    u_num: float
    u_asym: float
    envelope: float
    residual: float
    residual_over_envelope: float


def comparison_rows(params, fields) -> list[ComparisonRow]:
    rows = []
    for p in params:
        for t in sorted(fields):
            x = p.zeta * t
            ua = asymptotics.u_asym(p, x, t)
            un = pderef.sample_ray(fields[t], x)
            res = un - ua.u
            ratio = res / ua.envelope if ua.envelope > 0 else (0.0 if res == 0 else math.inf)
            rows.append(ComparisonRow(p.zeta, t, un, ua.u, ua.envelope, res, ratio))
    return rows


def fit_summary(rows: Sequence[ComparisonRow]) -> list[dict]:
    out = []
    for zeta in sorted({r.zeta for r in rows}):
        sel = sorted((r for r in rows if r.zeta == zeta), key=lambda r: r.t)
        res = np.array([abs(r.residual) for r in sel])
        ts = np.array([r.t for r in sel])
        last = sel[-1]
        entry = {"zeta": zeta, "t_max": last.t, "rel_error_at_t_max": abs(last.residual_over_envelope)}
        if len(sel) < 2 or np.any(res == 0):
            entry["slope"] = None
            entry["note"] = "degenerate (zero residual or single time)"
        else:
            entry["slope"] = float(np.polyfit(np.log(ts), np.log(res), 1)[0])
        out.append(entry)
    return out


def comparison_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    buf.write("# schema=1\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["zeta", "t", "u_num", "u_asym", "envelope", "residual", "residual_over_envelope"])
    for r in rows:
        w.writerow([repr(float(v)) for v in asdict(r).values()])
    return buf.getvalue()


def run_compare(cfg: dict, store: Store) -> tuple[list[ComparisonRow], list[dict]]:
    times = cfg["t"]
    if not times or min(times) < T_MIN_COMPARE:
        raise ValidationError(f"compare needs t >= {T_MIN_COMPARE}", field="t")
    # zeta0 >= 0, so rays at or below the margin fail before the spectral sweep
    low = [z for z in cfg["zeta"] if not z > cfg["margin"]]
    if low:
        raise SectorError(f"rays {low} lie outside the validity sector", field="zeta")
    line = stage_scatter(cfg, store)
    params = stage_asym(cfg, store, line)
    fields = stage_pde(cfg, store)
    rows = comparison_rows(params, fields)
    fits = fit_summary(rows)
    store.write("comparison.csv", comparison_csv(rows))
    fit_text = json.dumps(fits, indent=2, sort_keys=True) + "\n"
    store.write("fit_summary.json", fit_text)
    store.record(
        "compare",
        digest({"asym": _asym_key(cfg), "pde": _pde_key(cfg)}),
        {
            "comparison.csv": hashlib.sha256(comparison_csv(rows).encode()).hexdigest(),
            "fit_summary.json": hashlib.sha256(fit_text.encode()).hexdigest(),
        },
        0.0,
    )
    return rows, fits


def render_report(out: Path) -> str:
    lines = []
    rays = out / "rays.json"
    if rays.exists():
        lines.append("rays")
        lines.append(f"{'zeta':>8} {'k0':>8} {'nu':>12} {'|q|':>10} {'tail':>12}")
        for d in json.loads(rays.read_text()):
            lines.append(
                f"{d['zeta']:8.4f} {d['k0']:8.4f} {d['nu']:12.5e} {math.hypot(*d['q']):10.6f} {d['tail']:12.5e}"
            )
    comp = out / "comparison.csv"
    if comp.exists():
        text = [ln for ln in comp.read_text().splitlines() if not ln.startswith("#")]
        lines.append("")
        lines.append("comparison")
        lines.append(f"{'zeta':>8} {'t':>8} {'u_num':>13} {'u_asym':>13} {'envelope':>11} {'res/env':>10}")
        for r in csv.DictReader(text):
            lines.append(
                f"{float(r['zeta']):8.4f} {float(r['t']):8.1f} {float(r['u_num']):13.5e} "
                f"{float(r['u_asym']):13.5e} {float(r['envelope']):11.4e} {float(r['residual_over_envelope']):10.4f}"
            )
    fits = out / "fit_summary.json"
    if fits.exists():
        lines.append("")
        lines.append("fit")
        for f in json.loads(fits.read_text()):
            slope = "n/a" if f["slope"] is None else f"{f['slope']:.3f}"
            lines.append(f"zeta={f['zeta']:g} slope={slope} rel_error(t={f['t_max']:g})={f['rel_error_at_t_max']:.4f}")
    if not lines:
        raise ValidationError(f"no artifacts found in {out}", field="out")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CLI


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boussinesq-ist", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", default="out", help="artifact directory")
    common.add_argument("--zeta", help="comma-separated rays x/t")
    common.add_argument("--t", help="comma-separated sample times")
    common.add_argument("--kmax", type=float, help="upper end of the k-grid")
    common.add_argument("--threads", type=int, help="worker threads for k-sweeps")
    common.add_argument("--override", action="append", metavar="KEY=VALUE", help="override a config field (dotted keys)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("scatter", "sample r1 on the k-grid (spectral_line.csv)"),
        ("asym", "asymptotic parameters per ray (rays.json)"),
        ("pde", "direct PDE solution (fields_t*.csv)"),
        ("compare", "PDE versus asymptotic formula (comparison.csv, fit_summary.json)"),
        ("report", "plain-text summary of the artifacts in --out"),
        ("check-assumptions", "spectral assumption report (assumptions.json)"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    if args.command == "report":
        sys.stdout.write(render_report(out))
        return 0
    cfg = load_config(args.config, args)
    store = Store(out)
    code = 0
    try:
        if args.command == "scatter":
            line = stage_scatter(cfg, store)
            print(f"spectral line: {len(line.k_grid)} nodes, k_max = {line.k_max:g}, max|r1| = {np.abs(line.r1).max():.6f}")
        elif args.command == "asym":
            params = stage_asym(cfg, store, stage_scatter(cfg, store))
            for p in params:
                print(f"zeta={p.zeta:g} k0={p.k0:g} nu={p.nu:.6e} tail={p.tail:.6e}")
        elif args.command == "pde":
            fields = stage_pde(cfg, store)
            print(f"fields at t = {', '.join(f'{t:g}' for t in sorted(fields))}")
        elif args.command == "compare":
            _, fits = run_compare(cfg, store)
            for f in fits:
                slope = "n/a" if f["slope"] is None else f"{f['slope']:.3f}"
                print(f"zeta={f['zeta']:g} slope={slope} rel_error(t={f['t_max']:g})={f['rel_error_at_t_max']:.4f}")
        elif args.command == "check-assumptions":
            t0 = time.perf_counter()
            acfg = scatter.AssumptionConfig(k_min=cfg["k_min"], **cfg.get("assumptions", {}))
            report = scatter.assumption_checks(make_profile(cfg["profile"]), acfg, threads=cfg["threads"])
            text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
            sha = store.write("assumptions.json", text)
            store.record("check-assumptions", digest(cfg), {"assumptions.json": sha}, time.perf_counter() - t0)
            print(json.dumps(report.verdict, sort_keys=True))
            if "fail" in report.verdict.values():
                code = 4
    finally:
        store.save(cfg)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        return run(argv)
    except BoussinesqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except TypeError as exc:
        # malformed config values (e.g. unknown assumption keys)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
