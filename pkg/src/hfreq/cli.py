"""hfreq command line: config parsing, experiment runs, JSON reports and CSV tables.

Exit status: 0 when every check passes, 1 on a failed check, 2 on a config error.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import os
import sys

import numpy as np
import yaml

from . import __version__

COMMANDS = ("transform", "invert", "plancherel", "convolve", "kernel", "gh", "asymptotics", "identities")
TOP_KEYS = {"command", "d", "seed", "threads", "out", "function", "function2", "horizontal", "horizontal2",
            "grid", "tolerances", "params", "golden"}
GRID_KEYS = {"d", "N_max", "lambda_min", "lambda_max", "panels", "nodes_per_panel"}

TOLERANCES = {
    "transform": {"hermiticity": 1e-12, "diagonalization": 1e-6},
    "invert": {"pointwise": 1e-4},
    "plancherel": {"ratio": 1e-3},
    "convolve": {"relative": 1e-5},
    "kernel": {"symmetry": 1e-12, "refinement": 1e-12},
    "gh": {"inversion": 1e-3, "plancherel": 1e-3, "convolution": 1e-7, "closed_form": 1e-6},
    "asymptotics": {"slope_min": 0.45, "r2_min": 0.98, "concentration": 5e-3, "horizontal": 1e-2},
    "identities": {"symmetry": 1e-12, "laplace": 1e-6, "T_relation": 1e-6, "convolution": 1e-8,
                   "radial_ode": 1e-5, "wigner_symmetry": 1e-12},
}

PARAMS = {
    "transform": {"method": "auto"},
    "invert": {"samples": 10, "scale": 1.0},
    "plancherel": {"refine": [75, 150, 300]},
    "convolve": {"floor": 1e-6},
    "kernel": {"xdot": 1.0, "kmax": 5, "grid": 64, "extent": 2.0, "nz": 256},
    "gh": {"xdot_max": 6.0, "grid": 25, "kmax": 4, "samples": 5, "scale": 1.0, "k_max": 12},
    "asymptotics": {"xdot": 1.0, "k": 1, "Y": [0.5, 0.5], "lambdas": [1e-1, 1e-3, 7], "ell": 2},
    "identities": {"xdot": [0.5, 2.0, 4.0], "k": [-4, 0, 3], "samples": 3, "scale": 0.8},
}

GRID_DEFAULTS = {
    "transform": {"N_max": 24},
    "invert": {"N_max": 24, "lambda_max": 8.0},
    "convolve": {"N_max": 16},
}


class ConfigError(ValueError):
    def __init__(self, key, msg):
        super().__init__(f"{key}: {msg}")
        self.key = key


# config


def _load_yaml(path):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"YAML parse error: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a mapping")
    return data


def _num(tree, key, kind=float, positive=False, where=None):
    path = f"{where}.{key}" if where else key
    val = tree[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(path, f"expected a number, got {val!r}")
    if kind is int and int(val) != val:
        raise ConfigError(path, f"expected an integer, got {val!r}")
    val = kind(val)
    if not math.isfinite(val):
        raise ConfigError(path, "must be finite")
    if positive and not val > 0:
        raise ConfigError(path, f"must be > 0, got {val!r}")
    return val


def resolve(raw: dict, overrides: dict) -> dict:
    """Merge config and flags (flags win), fill defaults and validate. Raises ConfigError."""
    cfg = copy.deepcopy(raw)
    for key in cfg:
        if key not in TOP_KEYS:
            raise ConfigError(key, "unknown key")
    for key in ("command", "seed", "threads", "out", "golden"):
        if overrides.get(key) is not None:
            cfg[key] = overrides[key]
    cmd = cfg.get("command")
    if cmd not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}, got {cmd!r}")
    cfg.setdefault("d", 1)
    cfg.setdefault("seed", 0)
    cfg.setdefault("threads", 1)
    cfg["d"] = _num(cfg, "d", int)
    if cfg["d"] not in (1, 2):
        raise ConfigError("d", f"must be 1 or 2, got {cfg['d']}")
    cfg["seed"] = _num(cfg, "seed", int)
    cfg["threads"] = _num(cfg, "threads", int, positive=True)

    params = dict(PARAMS[cmd])
    user = cfg.get("params") or {}
    if not isinstance(user, dict):
        raise ConfigError("params", "must be a mapping")
    for key, val in user.items():
        if key not in params:
            raise ConfigError(f"params.{key}", f"unknown parameter for {cmd}")
        params[key] = val
    for key, val in (overrides.get("params") or {}).items():
        if val is not None:
            if key not in params:
                raise ConfigError(f"--{key}", f"not a parameter of {cmd}")
            params[key] = val
    cfg["params"] = params

    tol = dict(TOLERANCES[cmd])
    user = cfg.get("tolerances") or {}
    if not isinstance(user, dict):
        raise ConfigError("tolerances", "must be a mapping")
    for key in user:
        if key not in tol:
            raise ConfigError(f"tolerances.{key}", f"unknown tolerance for {cmd}")
        tol[key] = user[key]
        tol[key] = _num(tol, key, float, positive=True, where="tolerances")
    cfg["tolerances"] = tol

    if cmd in ("transform", "invert", "convolve", "plancherel"):
        grid = dict(GRID_DEFAULTS.get(cmd, {}))
        user = cfg.get("grid") or {}
        if not isinstance(user, dict):
            raise ConfigError("grid", "must be a mapping")
        for key in user:
            if key not in GRID_KEYS:
                raise ConfigError(f"grid.{key}", "unknown grid key")
        grid.update(user)
        if overrides.get("grid") is not None:
            grid["N_max"] = overrides["grid"]
        grid.setdefault("d", cfg["d"])
        for key in list(grid):
            kind = float if key.startswith("lambda") else int
            grid[key] = _num(grid, key, kind, positive=key != "N_max", where="grid")
        if grid["d"] != cfg["d"]:
            raise ConfigError("grid.d", "must equal d")
        cfg["grid"] = grid
    elif overrides.get("grid") is not None:
        if "grid" not in params:
            raise ConfigError("--grid", f"not a parameter of {cmd}")
        params["grid"] = overrides["grid"]
    _check_params(cmd, params)

    for key, cls_name in (("function", "GaussHermiteFunction"), ("function2", "GaussHermiteFunction"),
                          ("horizontal", "HorizontalFunction"), ("horizontal2", "HorizontalFunction")):
        if cfg.get(key) is not None:
            _build_function(cfg[key], key, cls_name, cfg["d"])
    return cfg


def _check_params(cmd, p):
    ints = {"samples", "kmax", "grid", "nz", "k", "ell", "k_max"}
    for key, val in p.items():
        if key in ("method",):
            if val not in ("auto", "gh", "ladder"):
                raise ConfigError(f"params.{key}", f"unknown method {val!r}")
            continue
        vals = val if isinstance(val, list) else [val]
        for v in vals:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"params.{key}", f"expected numbers, got {val!r}")
            if (key in ints or key in ("refine",) or (cmd == "identities" and key == "k")) and int(v) != v:
                raise ConfigError(f"params.{key}", f"expected integers, got {val!r}")
    for key in ("samples", "grid", "nz", "extent", "scale", "xdot_max"):
        if key in p and not p[key] > 0:
            raise ConfigError(f"params.{key}", "must be > 0")
    if cmd == "asymptotics":
        if len(p["Y"]) != 2:
            raise ConfigError("params.Y", "expected [y, eta]")
        if len(p["lambdas"]) != 3 or not 0 < p["lambdas"][1] < p["lambdas"][0]:
            raise ConfigError("params.lambdas", "expected [lambda_hi, lambda_lo, count] with 0 < lo < hi")
        if not p["xdot"] > 0:
            raise ConfigError("params.xdot", "must be > 0")
    if cmd == "kernel" and 2 * p["kmax"] + 1 > p["nz"]:
        raise ConfigError("params.nz", "must exceed 2 kmax + 1")


def _build_function(rec, key, cls_name, d):
    from .heisenberg import GaussHermiteFunction
    from .horizontal import HorizontalFunction
    cls = GaussHermiteFunction if cls_name == "GaussHermiteFunction" else HorizontalFunction
    if not isinstance(rec, dict):
        raise ConfigError(key, "must be a mapping")
    rec = dict(rec)
    rec.setdefault("d", d)
    try:
        f = cls.from_dict(rec)
    except KeyError as exc:
        raise ConfigError(f"{key}.{exc.args[0]}", "missing") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from None
    if f.d != d:
        raise ConfigError(f"{key}.d", "must equal d")
    return f


def digest(cfg: dict) -> str:
    keep = {k: v for k, v in cfg.items() if k not in ("out", "golden")}
    blob = json.dumps(keep, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


# output helpers


def _f17(v):
    return "%.17g" % v


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_f17(v) if isinstance(v, float) else v for v in r])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def _clean(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


class Report:
    def __init__(self):
        self.checks = []
        self.values = {}
        self.flags = []

    def upper(self, name, value, tol):
        value = float(value)
        self.checks.append({"name": name, "value": _clean(value), "tol": tol, "kind": "<=",
                            "pass": bool(value <= tol)})

    def lower(self, name, value, tol):
        value = float(value)
        self.checks.append({"name": name, "value": _clean(value), "tol": tol, "kind": ">=",
                            "pass": bool(value >= tol)})

    def truth(self, name, ok):
        self.checks.append({"name": name, "value": bool(ok), "tol": None, "kind": "true", "pass": bool(ok)})

    @property
    def passed(self):
        return all(c["pass"] for c in self.checks)


# experiments


def _function(cfg, key="function"):
    from .heisenberg import GaussHermiteFunction
    if cfg.get(key) is not None:
        return _build_function(cfg[key], key, "GaussHermiteFunction", cfg["d"])
    if key == "function2":
        # polynomial-prefactor partner: (1 + y_1) e^{-|Y|^2 - s^2}
        d = cfg["d"]
        one = (0,) * (2 * d + 1)
        y1 = (1,) + (0,) * (2 * d)
        return GaussHermiteFunction(d, 1.0, 1.0, {one: 1.0, y1: 1.0})
    return GaussHermiteFunction.gaussian(cfg["d"])


def _horizontal(cfg, key="horizontal"):
    from .horizontal import HorizontalFunction
    if cfg.get(key) is not None:
        return _build_function(cfg[key], key, "HorizontalFunction", cfg["d"])
    if key == "horizontal2":
        d = cfg["d"]
        return HorizontalFunction(d, 0.7, {(0,) * (2 * d): 1.0, (1,) + (0,) * (2 * d - 1): 0.5})
    return HorizontalFunction.gaussian(cfg["d"])


def _grid(cfg):
    from .frequency import FrequencyGrid
    return FrequencyGrid.build(**cfg["grid"])


def run_transform(cfg, out, rep):
    from .transform import diag_check, forward_field, hermiticity_check
    f = _function(cfg)
    grid = _grid(cfg)
    F = forward_field(f, grid, cfg["params"]["method"])
    F.to_csv(os.path.join(out, "transform.csv"))
    rep.values["method"] = F.meta["method"]
    rep.values["masked_cells"] = int(F.mask.sum()) if F.mask is not None else 0
    if rep.values["masked_cells"]:
        rep.flags.append("non-finite cells masked")
    t = cfg["tolerances"]
    rep.upper("hermiticity", hermiticity_check(f, grid), t["hermiticity"])
    rep.upper("diagonalization", diag_check(f, grid, 1, cfg["params"]["method"]), t["diagonalization"])
    return ["transform.csv"]


def _sample_points(cfg, count, scale):
    from .heisenberg import random_points
    rng = np.random.default_rng(cfg["seed"])
    return random_points(rng, int(count), cfg["d"], scale)


def run_invert(cfg, out, rep):
    from .transform import forward_field, inverse_point
    f = _function(cfg)
    F = forward_field(f, _grid(cfg))
    rows, worst = [], 0.0
    for w in _sample_points(cfg, cfg["params"]["samples"], cfg["params"]["scale"]):
        exact = complex(f(w))
        rec = inverse_point(F, w)
        err = abs(rec - exact)
        worst = max(worst, err)
        rows.append([*map(float, w.y), *map(float, w.eta), float(w.s), exact.real, exact.imag,
                     rec.real, rec.imag, err])
    d = cfg["d"]
    header = [f"y{j + 1}" for j in range(d)] + [f"eta{j + 1}" for j in range(d)] + \
        ["s", "exact_re", "exact_im", "recon_re", "recon_im", "abs_err"]
    write_csv(os.path.join(out, "inversion.csv"), header, rows)
    rep.upper("pointwise_max_error", worst, cfg["tolerances"]["pointwise"])
    return ["inversion.csv"]


def run_plancherel(cfg, out, rep):
    from .frequency import FrequencyGrid
    from .transform import plancherel_check, plancherel_grid
    f = _function(cfg)
    user = dict(cfg["grid"])
    base = plancherel_grid(f, N_max=user.get("N_max")).to_spec()
    base.update(user)
    lhs, rhs, ratio = plancherel_check(f, FrequencyGrid.build(**base))
    rep.values.update({"lhs": lhs, "rhs": rhs, "ratio": ratio})
    rep.upper("ratio_deviation", abs(ratio - 1.0), cfg["tolerances"]["ratio"])
    rows = [["base", base["N_max"], ratio]]
    refine = [int(v) for v in cfg["params"]["refine"]]
    if refine:
        spec = dict(base)
        ratios = []
        for N in refine:
            spec["N_max"] = N
            ratios.append(plancherel_check(f, FrequencyGrid.build(**spec))[2])
        devs = [abs(r - 1.0) for r in ratios]
        rows += [["refine", N, r] for N, r in zip(refine, ratios)]
        rep.truth("refinement_monotone", all(b < a for a, b in zip(devs, devs[1:])))
    write_csv(os.path.join(out, "plancherel.csv"), ["stage", "N_max", "ratio"], rows)
    return ["plancherel.csv"]


def run_convolve(cfg, out, rep):
    from .transform import convolution_check
    if cfg["d"] != 1:
        raise ConfigError("d", "convolve runs in d = 1")
    f, g = _function(cfg), _function(cfg, "function2")
    res = convolution_check(f, g, _grid(cfg), cfg["params"]["floor"])
    rep.values.update({"entries": res["entries"], "truncation_residual": res["residual"]})
    rep.upper("max_relative_deviation", res["max_rel"], cfg["tolerances"]["relative"])
    write_csv(os.path.join(out, "convolve.csv"), ["quantity", "value"],
              [["max_rel", float(res["max_rel"])], ["entries", res["entries"]],
               ["residual", float(res["residual"])]])
    return ["convolve.csv"]


def run_kernel(cfg, out, rep):
    from .kernel import kernel_K, kernel_K_table
    p = cfg["params"]
    xdot, kmax, G, ext, nz = float(p["xdot"]), int(p["kmax"]), int(p["grid"]), float(p["extent"]), int(p["nz"])
    axis = np.linspace(-ext, ext, G)
    Y1, Y2 = np.meshgrid(axis, axis, indexing="ij")
    tab = kernel_K_table(xdot, kmax, Y1, Y2, nz)
    rows = []
    for i in range(G):
        for j in range(G):
            for k in range(-kmax, kmax + 1):
                v = tab[k + kmax, i, j]
                rows.append([float(axis[i]), float(axis[j]), k, float(v.real), float(v.imag)])
    write_csv(os.path.join(out, "kernel.csv"), ["y", "eta", "k", "re", "im"], rows)
    ks = np.arange(-kmax, kmax + 1)[:, None, None]
    sym = 0.0
    for k in range(-kmax, kmax + 1):
        base = tab[k + kmax]
        refl = kernel_K_table(xdot, kmax, -Y1, -Y2, nz)[-k + kmax]
        sym = max(sym, float(np.max(np.abs(refl - np.conj(base)))))
    par = np.max(np.abs(kernel_K_table(-xdot, kmax, Y1, Y2, nz)[::-1] - (-1.0) ** ks * tab))
    ref = kernel_K_table(xdot, kmax, Y1, Y2, 2 * nz)
    rep.upper("symmetry", max(sym, float(par)), cfg["tolerances"]["symmetry"])
    rep.upper("trapezoid_refinement", float(np.max(np.abs(ref - tab))), cfg["tolerances"]["refinement"])
    rep.values["K_origin_k0"] = float(abs(kernel_K(xdot, 0, (0.0, 0.0), nz=nz)))
    return ["kernel.csv"]


def run_gh(cfg, out, rep):
    from .horizontal import gh_convolve_check, gh_inverse, gh_plancherel_check, gh_table, gh_values
    p, t = cfg["params"], cfg["tolerances"]
    g = _horizontal(cfg)
    d = cfg["d"]
    lhs, rhs, ratio = gh_plancherel_check(g, int(p["k_max"]))
    rep.values.update({"plancherel_lhs": lhs, "plancherel_rhs": rhs})
    rep.upper("plancherel_ratio_deviation", abs(ratio - 1.0), t["plancherel"])
    G = gh_values(g)
    worst = 0.0
    for w in _sample_points(cfg, p["samples"], p["scale"]):
        Y = (np.array(w.y), np.array(w.eta))
        exact = complex(g.evaluate(Y[0][0], Y[1][0])) if d == 1 else complex(g.evaluate(Y[0], Y[1]))
        worst = max(worst, abs(gh_inverse(G, Y, d, int(p["k_max"])) - exact))
    rep.upper("inversion_max_error", worst, t["inversion"])
    if d == 1:
        dev, tail = gh_convolve_check(g, _horizontal(cfg, "horizontal2"), 1.3, 1)
        rep.values["convolution_tail_bound"] = tail
        rep.upper("convolution", dev, t["convolution"])
    if len(g.terms) == 1 and next(iter(g.terms)) == (0,) * (2 * d):
        c = next(iter(g.terms.values()))
        xs = np.linspace(0.0, float(p["xdot_max"]), 13)
        pts = xs if d == 1 else np.stack([xs, xs], -1)
        vals = gh_table(g, pts, 0)[:, 0] if d == 1 else gh_table(g, pts, 0)[:, 0, 0]
        exact = c * (math.pi / g.a) ** d * np.exp(-(d * xs) / g.a)
        rep.upper("closed_form", float(np.max(np.abs(vals - exact))), t["closed_form"])
    if d == 1:
        xs = np.linspace(-float(p["xdot_max"]), float(p["xdot_max"]), int(p["grid"]))
        kmax = int(p["kmax"])
        tab = gh_table(g, xs, kmax)
        rows = [[float(x), k, float(tab[i, k + kmax].real), float(tab[i, k + kmax].imag)]
                for i, x in enumerate(xs) for k in range(-kmax, kmax + 1)]
        write_csv(os.path.join(out, "gh.csv"), ["xdot", "k", "re", "im"], rows)
        return ["gh.csv"]
    return []


def run_asymptotics(cfg, out, rep):
    from . import asymptotics as asy
    from .horizontal import HorizontalFunction
    if cfg["d"] != 1:
        raise ConfigError("d", "asymptotics runs in d = 1")
    p, t = cfg["params"], cfg["tolerances"]
    hi, lo, cnt = p["lambdas"]
    lams = np.geomspace(hi, lo, int(cnt))
    errs, slope, r2 = asy.w_to_k_limit(float(p["xdot"]), int(p["k"]), tuple(p["Y"]), lams)
    rep.lower("w_to_k_slope", slope, t["slope_min"])
    rep.lower("w_to_k_r2", r2, t["r2_min"])
    lerrs, lslope, lr2 = asy.ladder_bound_fit(int(p["ell"]), float(p["xdot"]), lams)
    rep.lower("ladder_slope", lslope, t["slope_min"])
    rep.lower("ladder_r2", lr2, t["r2_min"])
    cdev, climit = asy.concentration_limit(asy.exp_profile)
    rep.values["concentration_limit"] = climit.real
    rep.upper("concentration_final", cdev[-1], t["concentration"])
    rep.truth("concentration_decreasing", asy.is_eventually_decreasing(cdev, skip=0))
    g = _horizontal(cfg) if cfg.get("horizontal") is not None else HorizontalFunction.gaussian(1)
    hdev, hlimit = asy.horizontal_limit(g, asy.smooth_bump())
    rep.values["horizontal_limit"] = hlimit.real
    rep.upper("horizontal_final", hdev[-1], t["horizontal"])
    rep.truth("horizontal_decreasing", asy.is_eventually_decreasing(hdev, skip=0))
    rows = [["w_to_k", float(x), float(e)] for x, e in zip(lams, errs)]
    rows += [["ladder", float(x), float(e)] for x, e in zip(lams, lerrs)]
    rows += [["concentration", float(x), float(e)] for x, e in zip(asy.DEFAULT_EPS, cdev)]
    rows += [["horizontal", float(x), float(e)] for x, e in zip(asy.DEFAULT_EPS, hdev)]
    write_csv(os.path.join(out, "asymptotics.csv"), ["series", "x", "deviation"], rows)
    return ["asymptotics.csv"]


def run_identities(cfg, out, rep):
    from .frequency import FrequencyPoint
    from .kernel import kernel_identity_suite
    from .wigner import wigner_symmetries_check
    p, t = cfg["params"], cfg["tolerances"]
    rng = np.random.default_rng(cfg["seed"])
    xdots = p["xdot"] if isinstance(p["xdot"], list) else [p["xdot"]]
    ks = p["k"] if isinstance(p["k"], list) else [p["k"]]
    agg = {}
    rows = []
    for xd in xdots:
        for k in ks:
            for _ in range(int(p["samples"])):
                Y = tuple(float(v) for v in rng.uniform(-p["scale"], p["scale"], 2))
                res = kernel_identity_suite(float(xd), int(k), Y)
                for name, v in sorted(res.items()):
                    agg[name] = max(agg.get(name, 0.0), float(v))
                    rows.append([float(xd), int(k), Y[0], Y[1], name, float(v)])
    rep.upper("kernel_symmetry", agg["symmetry_max"], t["symmetry"])
    rep.upper("kernel_laplace", agg["laplace"], t["laplace"])
    rep.upper("kernel_T_relation", agg["T_relation"], t["T_relation"])
    rep.upper("kernel_convolution", agg["convolution"], t["convolution"])
    rep.values["kernel_convolution_tail"] = agg["convolution_tail"]
    if "radial_ode" in agg:
        rep.upper("kernel_radial_ode", agg["radial_ode"], t["radial_ode"])
    wmax = 0.0
    for _ in range(int(p["samples"])):
        n, m = (int(v) for v in rng.integers(0, 6, 2))
        lam = float(rng.uniform(0.2, 2.0)) * (1 if rng.random() < 0.5 else -1)
        Y = tuple(float(v) for v in rng.uniform(-1, 1, 2))
        wmax = max(wmax, wigner_symmetries_check(FrequencyPoint(n, m, lam), Y)["max"])
    rep.upper("wigner_symmetry", wmax, t["wigner_symmetry"])
    write_csv(os.path.join(out, "identities.csv"), ["xdot", "k", "y", "eta", "identity", "value"], rows)
    return ["identities.csv"]


RUNNERS = {
    "transform": run_transform, "invert": run_invert, "plancherel": run_plancherel, "convolve": run_convolve,
    "kernel": run_kernel, "gh": run_gh, "asymptotics": run_asymptotics, "identities": run_identities,
}


def _golden(rep, path):
    try:
        with open(path) as fh:
            ref = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError("golden", f"cannot read golden report {path}: {exc}") from None
    old = {c["name"]: c["value"] for c in ref.get("checks", [])}
    worst = 0.0
    for c in rep.checks:
        v, o = c["value"], old.get(c["name"])
        if isinstance(v, bool) or o is None or isinstance(o, bool) or not isinstance(v, float):
            if o != v:
                worst = math.inf
            continue
        worst = max(worst, abs(v - o) / max(abs(o), 1e-300))
    rep.upper("golden_relative_drift", worst, 1e-9)


def run(cfg: dict) -> tuple[int, dict]:
    out = cfg.get("out") or "."
    os.makedirs(out, exist_ok=True)
    rep = Report()
    files = RUNNERS[cfg["command"]](cfg, out, rep)
    if cfg.get("golden"):
        _golden(rep, cfg["golden"])
    report = {
        "command": cfg["command"],
        "version": __version__,
        "config_digest": digest(cfg),
        "inputs_digest": _inputs_digest(cfg),
        "config": {k: v for k, v in cfg.items() if k not in ("out", "golden")},
        "checks": rep.checks,
        "values": {k: _clean(v) for k, v in rep.values.items()},
        "flags": rep.flags,
        "outputs": files,
        "pass": rep.passed,
    }
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    with open(os.path.join(out, "report.json"), "w") as fh:
        fh.write(text)
    return (0 if rep.passed else 1), report


def _inputs_digest(cfg):
    parts = []
    for key in ("function", "function2", "horizontal", "horizontal2"):
        if key in ("function", "function2") and cfg["command"] in ("transform", "invert", "plancherel", "convolve"):
            parts.append(_function(cfg, key).digest())
        if key in ("horizontal", "horizontal2") and cfg["command"] in ("gh", "asymptotics"):
            parts.append(_horizontal(cfg, key).digest())
    return hashlib.sha256("|".join(parts).encode()).hexdigest()


def build_parser():
    ap = argparse.ArgumentParser(prog="hfreq", description="Heisenberg-group frequency-space experiments.")
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="experiment to run (or set in the config)")
    ap.add_argument("--config", help="YAML config file")
    ap.add_argument("--out", help="output directory (default: current directory)")
    ap.add_argument("--seed", type=int, help="seed for sample points")
    ap.add_argument("--threads", type=int, help="worker threads (accepted; sweeps run serially)")
    ap.add_argument("--golden", help="reference report.json to compare check values against")
    ap.add_argument("--grid", type=int, help="N_max for frequency grids, sample count per axis for kernel/gh")
    ap.add_argument("--xdot", type=float)
    ap.add_argument("--kmax", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--nz", type=int)
    ap.add_argument("--method", choices=("auto", "gh", "ladder"))
    ap.add_argument("--version", action="version", version=f"hfreq {__version__}")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = _load_yaml(args.config) if args.config else {}
        overrides = {"command": args.command, "seed": args.seed, "threads": args.threads, "out": args.out,
                     "golden": args.golden, "grid": args.grid,
                     "params": {"xdot": args.xdot, "kmax": args.kmax, "samples": args.samples, "nz": args.nz,
                                "method": args.method}}
        cfg = resolve(raw, overrides)
        status, report = run(cfg)
    except ConfigError as exc:
        print(f"hfreq: config error: {exc}", file=sys.stderr)
        return 2
    for c in report["checks"]:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']} value={c['value']} tol={c['tol']}")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
