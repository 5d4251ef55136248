"""Batch command-line front end: configure a field, run analyses, emit reports.

Commands
    density     point densities (Theta^S / Theta^M / Theta^V)
    count       high-density set extraction and component counting
    strata      quantitative stratum with tube volumes and covering counts
    energy      theta_F / theta_G profiles with monotonicity verdicts
    minkowski   tube-volume bound ratios and log-log slope
    cover       scale-indexed decomposition covering trace
    verify      full acceptance battery

Configuration is an INI file with sections [field], [analysis], [quadrature],
[output]; every key is also available as ``--section.key value`` and flags
override the file.  Reports are deterministic JSON (sorted keys, no
timestamps) carrying the config hash, seed, and quadrature budgets.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys

import numpy as np

from . import acceptance
from .covering import decomposition_cover, minkowski_bound_check
from .density import density, high_density_set
from .energy import GrassmannianFamily, f_energy_profile, g_energy_profile
from .errors import ConfigError, RieszStratError
from .examples import harmonic_plus_kernel, log_modulus, plane_kernel, riesz_sum
from .fields import Ball, PlaneFrame, grid_from_csv
from .homogeneity import stratum_set

SCHEMA = "rieszstrat-report/1"
COMMANDS = ("density", "count", "strata", "energy", "minkowski", "cover", "verify")


# ---------------------------------------------------------------------------
# configuration plumbing


def _parse_args(argv):
    parser = argparse.ArgumentParser(prog="rieszstrat", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="INI config file")
    known, extra = parser.parse_known_args(argv)
    overrides = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or "." not in tok:
            raise ConfigError(f"unrecognized argument {tok!r} (expected --section.key value)")
        if "=" in tok:
            key, val = tok[2:].split("=", 1)
        else:
            if i + 1 >= len(extra):
                raise ConfigError(f"flag {tok!r} is missing a value")
            key, val = tok[2:], extra[i + 1]
            i += 1
        section, _, name = key.partition(".")
        if section not in ("field", "analysis", "quadrature", "output"):
            raise ConfigError(f"unknown config section {section!r}")
        overrides[(section, name)] = val
        i += 1
    return known, overrides


def load_config(path: str | None, overrides: dict) -> dict:
    cfg = {"field": {}, "analysis": {}, "quadrature": {}, "output": {}}
    if path:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError(f"config file {path!r} not found or unreadable")
        for section in parser.sections():
            if section not in cfg:
                raise ConfigError(f"unknown config section [{section}]")
            cfg[section].update(dict(parser[section]))
    for (section, name), val in overrides.items():
        cfg[section][name] = val
    return cfg


def _floats(text: str) -> list:
    return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]


def _vectors(text: str) -> np.ndarray:
    return np.array([[float(c) for c in row.split(",")] for row in text.split(";") if row.strip()])


def build_field(cfg: dict):
    fc = cfg["field"]
    name = fc.get("name")
    if name is None:
        raise ConfigError("[field] name is required")
    if name == "riesz_sum":
        centers = _vectors(fc["centers"])
        weights = _floats(fc["weights"])
        return riesz_sum(centers, weights, p=float(fc["p"]), n=int(fc["n"]),
                         domain_radius=float(fc.get("domain_radius", 2.0)))
    if name == "plane_kernel":
        V = PlaneFrame(_vectors(fc["plane"]))
        return plane_kernel(V, p=float(fc["p"]),
                            domain_radius=float(fc.get("domain_radius", 2.0)))
    if name == "log_modulus":
        poly = {}
        for term in fc["poly"].split(";"):
            if not term.strip():
                continue
            expo, _, coeff = term.partition(":")
            key = tuple(int(e) for e in expo.split(","))
            poly[key] = complex(coeff.replace(" ", ""))
        return log_modulus(poly, m=int(fc["m"]),
                           domain_radius=float(fc.get("domain_radius", 2.0)))
    if name == "harmonic_plus_kernel":
        coeffs = {}
        for term in fc.get("h_coeffs", "").split(";"):
            if not term.strip():
                continue
            expo, _, coeff = term.partition(":")
            coeffs[tuple(int(e) for e in expo.split(","))] = float(coeff)
        n = int(fc["n"])
        center = np.array(_floats(fc.get("center", ",".join("0" * n))))
        return harmonic_plus_kernel(coeffs, center, float(fc.get("weight", 1.0)),
                                    p=float(fc["p"]), n=n,
                                    domain_radius=float(fc.get("domain_radius", 2.0)))
    if name == "grid_csv":
        with open(fc["path"]) as fh:
            return grid_from_csv(fh.read())
    raise ConfigError(f"unknown field name {name!r}")


def _quad(cfg: dict) -> tuple[int, int]:
    qc = cfg["quadrature"]
    return int(qc.get("count", 1024)), int(qc.get("seed", 0))


def _point(cfg: dict, n: int, key: str = "x") -> np.ndarray:
    text = cfg["analysis"].get(key)
    if text is None:
        return np.zeros(n)
    x = np.array(_floats(text))
    if x.size != n:
        raise ConfigError(f"[analysis] {key} needs {n} coordinates")
    return x


# ---------------------------------------------------------------------------
# commands


def cmd_density(cfg: dict) -> dict:
    u = build_field(cfg)
    count, seed = _quad(cfg)
    x = _point(cfg, u.n)
    ladder = cfg["analysis"].get("ladder")
    est = density(u, x, ladder=_floats(ladder) if ladder else None,
                  count=count, seed=seed)
    return {"theta_S": est.theta_S, "theta_M": est.theta_M, "theta_V": est.theta_V,
            "radii_used": list(est.radii_used), "consistency_sv": est.consistency_sv,
            "consistency_sm": est.consistency_sm,
            "monotone_violation": est.monotone_violation, "x": x.tolist()}


def cmd_count(cfg: dict) -> dict:
    u = build_field(cfg)
    count, seed = _quad(cfg)
    ac = cfg["analysis"]
    ball = Ball(_point(cfg, u.n, "search_center"), float(ac.get("search_radius", 1.0)))
    E = high_density_set(u, float(ac.get("c", 1.0)), ball,
                         float(ac.get("grid_step", 0.02)),
                         tol=float(ac.get("tol", 0.05)),
                         sharpen=ac.get("sharpen", "false").lower() == "true",
                         count=count, seed=seed)
    return {"components": E.count, "points": np.round(E.points, 12).tolist(),
            "thetas": np.round(E.thetas, 12).tolist(), "c": float(ac.get("c", 1.0))}


def cmd_strata(cfg: dict) -> dict:
    u = build_field(cfg)
    count, seed = _quad(cfg)
    ac = cfg["analysis"]
    ball = Ball(_point(cfg, u.n, "search_center"), float(ac.get("search_radius", 1.0)))
    tube_radii = _floats(ac.get("tube_radii", ac.get("r", "0.1")))
    rep = stratum_set(u, float(ac.get("eta", 1.0)), float(ac.get("r", 0.1)),
                      int(ac.get("k", 0)), ball, float(ac.get("grid_step", 0.05)),
                      count=count, seed=seed, tube_radii=tube_radii)
    return {"members": len(rep.points), "indeterminate": len(rep.indeterminate),
            "excluded": rep.metadata["excluded"],
            "tube_volumes": {str(k): v for k, v in rep.tube_volumes.items()},
            "cover_counts": {str(k): v for k, v in rep.cover_counts.items()},
            "eta": rep.metadata["eta"], "r": rep.metadata["r"], "k": rep.metadata["k"]}


def cmd_energy(cfg: dict) -> dict:
    u = build_field(cfg)
    count, seed = _quad(cfg)
    ac = cfg["analysis"]
    x = _point(cfg, u.n)
    radii = _floats(ac.get("radii", "0.1,0.2,0.3,0.4,0.5"))
    out = {"x": x.tolist(), "radii": radii}
    if u.p > 2:
        prof = f_energy_profile(u, x, radii, count=count, seed=seed)
        diffs = np.diff(prof.values)
        out["theta_F"] = prof.values.tolist()
        out["theta_F_nondecreasing"] = bool(np.all(diffs >= -2e-3))
    family = GrassmannianFamily(u.n, int(round(u.p)) if u.p > 2 else 2,
                                kind=ac.get("family_kind", "full"),
                                sample_count=int(ac.get("family_count", 16)), seed=seed)
    gprof = g_energy_profile(u, x, radii, family, count=count, seed=seed)
    stderr = gprof.metadata["mc_stderr"]
    diffs = np.diff(gprof.values)
    tol = 3.0 * (np.array(stderr[:-1]) + np.array(stderr[1:])) + 1e-12
    out["theta_G"] = gprof.values.tolist()
    out["theta_G_stderr"] = list(stderr)
    out["theta_G_nondecreasing"] = bool(np.all(diffs >= -tol))
    return out


def cmd_minkowski(cfg: dict) -> dict:
    u = build_field(cfg)
    count, seed = _quad(cfg)
    ac = cfg["analysis"]
    r_grid = _floats(ac.get("radii", "0.02,0.05,0.1,0.2"))
    ball = Ball(_point(cfg, u.n, "search_center"), float(ac.get("search_radius", 1.0)))
    rep = minkowski_bound_check(u, float(ac.get("eta", 1.0)), r_grid,
                                search_ball=ball,
                                grid_step=float(ac.get("grid_step", r_grid[0] / 2.0)),
                                count=count, seed=seed)
    return {"slope": rep.metadata["slope"], "components": rep.metadata["components"],
            "tube_volumes": {str(k): v for k, v in rep.tube_volumes.items()},
            "bound_ratios": {str(k): v for k, v in rep.bound_ratios.items()},
            "eta": rep.metadata["eta"]}


def cmd_cover(cfg: dict) -> dict:
    u = build_field(cfg)
    count, seed = _quad(cfg)
    ac = cfg["analysis"]
    ball = Ball(_point(cfg, u.n, "search_center"), float(ac.get("search_radius", 1.0)))
    trace = decomposition_cover(u, float(ac.get("eta", 1.0)),
                                float(ac.get("gamma", 0.25)), int(ac.get("j_max", 3)),
                                int(ac.get("k", 0)), eps=float(ac.get("eps", 0.1)),
                                search_ball=ball, seed=seed,
                                coarse_count=min(count, 64))
    return {"counts": trace.counts, "tuple_counts": trace.tuple_counts,
            "tuple_histogram": trace.tuple_histogram, "gamma": trace.metadata["gamma"],
            "j_max": trace.metadata["j_max"], "eps": trace.metadata["eps"]}


def cmd_verify(cfg: dict) -> dict:
    ac = cfg["analysis"]
    subset = ac.get("criteria")
    ids = [int(t) for t in subset.replace(",", " ").split()] if subset else None
    _, seed = _quad(cfg)
    results = acceptance.run_battery(seed=seed, criteria=ids, log=print)
    return {"criteria": results, "all_passed": all(r["passed"] for r in results)}


# ---------------------------------------------------------------------------
# entry point


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    return obj


def render_report(command: str, cfg: dict, results: dict) -> str:
    cfg_text = json.dumps(_sanitize(cfg), sort_keys=True)
    report = {
        "schema": SCHEMA,
        "command": command,
        "config": _sanitize(cfg),
        "config_sha256": hashlib.sha256(cfg_text.encode()).hexdigest(),
        "seed": int(cfg["quadrature"].get("seed", 0)),
        "quadrature_count": int(cfg["quadrature"].get("count", 1024)),
        "results": _sanitize(results),
    }
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args, overrides = _parse_args(argv)
        cfg = load_config(args.config, overrides)
    except (ConfigError, SystemExit) as exc:
        if isinstance(exc, SystemExit):
            return int(exc.code or 0)
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    handler = {"density": cmd_density, "count": cmd_count, "strata": cmd_strata,
               "energy": cmd_energy, "minkowski": cmd_minkowski,
               "cover": cmd_cover, "verify": cmd_verify}[args.command]
    try:
        results = handler(cfg)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except RieszStratError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except (KeyError, ValueError) as exc:
        print(f"usage error: missing or malformed config key: {exc}", file=sys.stderr)
        return 2
    text = render_report(args.command, cfg, results)
    out_path = cfg["output"].get("path")
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and not results["all_passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
