"""Command line scenario runner.

    asymdense run <config.json | bundled-name> [--out DIR] [--seed N] [--threads N]
    asymdense verify [--suite fast|full]
    asymdense figure [--p 0.25] [--n-max 8] [--mode oracle|printed] [--out FILE]

Exit codes: 0 success, 1 configuration error, 2 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import capacity, checks, entropy, oneshot, protocol, qmat, symmetry
from .qmat import BipartiteLayout, Sampler

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2

TASKS = {"capacities", "figure", "oneshot", "simulate", "identities"}
STATES = {"bell", "purified_product", "matrix", "tmsv_truncated"}
GROUPS = {"weyl_heisenberg", "diagonal_phases", "pauli_words", "casimir_su2_blocks", "u2_tensor", "clifford_schur"}

DEFAULTS = {
    "name": "scenario",
    "state": "bell",
    "d": 2,
    "p": 0.25,
    "N": 1,
    "matrix_file": None,
    "nbar": 1.0,
    "cutoff": 4,
    "group": "weyl_heisenberg",
    "levels": None,
    "tasks": [],
    "seed": 0,
    "epsilon": 0.01,
    "variant": "proof",
    "R": 0.0,
    "T": 1,
    "M": 2,
    "seeds": 100,
    "s_grid": 64,
    "codeword_rule": "random",
    "figure_p": 0.25,
    "figure_n_max": 8,
    "figure_mode": "oracle",
}


class ConfigError(ValueError):
    pass


@dataclass
class Scenario:
    cfg: dict
    psi: np.ndarray = None
    layout: BipartiteLayout = None
    twirler: object = None
    notes: list = field(default_factory=list)


def _type_check(cfg: dict) -> None:
    ints = ("d", "N", "cutoff", "seed", "T", "M", "seeds", "s_grid", "figure_n_max")
    for k in ints:
        if not isinstance(cfg[k], int) or isinstance(cfg[k], bool):
            raise ConfigError(f"key {k!r}: expected an integer, got {cfg[k]!r}")
    for k in ("p", "nbar", "epsilon", "R", "figure_p"):
        if not isinstance(cfg[k], (int, float)) or isinstance(cfg[k], bool):
            raise ConfigError(f"key {k!r}: expected a number, got {cfg[k]!r}")
    if not isinstance(cfg["tasks"], list) or not set(cfg["tasks"]) <= TASKS:
        raise ConfigError(f"key 'tasks': expected a subset of {sorted(TASKS)}, got {cfg['tasks']!r}")
    if cfg["state"] not in STATES:
        raise ConfigError(f"key 'state': unknown state {cfg['state']!r}")
    if cfg["group"] not in GROUPS:
        raise ConfigError(f"key 'group': unknown group {cfg['group']!r}")
    if cfg["variant"] not in ("proof", "statement"):
        raise ConfigError(f"key 'variant': expected 'proof' or 'statement'")
    if cfg["figure_mode"] not in ("oracle", "printed"):
        raise ConfigError(f"key 'figure_mode': expected 'oracle' or 'printed'")
    if not 0 < cfg["epsilon"] < 1:
        raise ConfigError("key 'epsilon': must lie in (0, 1)")
    if not 0 <= cfg["p"] <= 0.5 or not 0 <= cfg["figure_p"] <= 0.5:
        raise ConfigError("keys 'p'/'figure_p': must lie in [0, 1/2]")
    if cfg["M"] < 1 or cfg["T"] < 1 or cfg["seeds"] < 1 or cfg["s_grid"] < 2:
        raise ConfigError("keys 'M', 'T', 'seeds' must be positive and 's_grid' at least 2")
    rule = cfg["codeword_rule"]
    if not (rule == "random" or (isinstance(rule, list) and all(isinstance(i, int) for i in rule))):
        raise ConfigError("key 'codeword_rule': expected 'random' or a list of group-element indices")


def load_config(source: str) -> dict:
    """Parse a config file (or bundled scenario name) with strict key validation."""
    path = Path(source)
    if not path.exists():
        bundled = resources.files("asymdense") / "scenarios" / f"{source}.json"
        if not bundled.is_file():
            raise ConfigError(f"config {source!r} not found (and not a bundled scenario)")
        text = bundled.read_text()
    else:
        text = path.read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    cfg = {**DEFAULTS, **raw}
    _type_check(cfg)
    return cfg


def _build_state(cfg: dict, base: Path):
    kind = cfg["state"]
    if kind == "bell":
        d = cfg["d"]
        return qmat.bell_state(d), BipartiteLayout(d, d)
    if kind == "purified_product":
        if not 1 <= cfg["N"] <= 6:
            raise ConfigError("key 'N': purified_product supports 1 <= N <= 6")
        return capacity.schur_state(cfg["N"], cfg["p"], "uniform")
    if kind == "tmsv_truncated":
        c = cfg["cutoff"]
        r = math.asinh(math.sqrt(cfg["nbar"]))
        return capacity.tmsv_truncated(r, c), BipartiteLayout(c, c)
    fn = cfg["matrix_file"]
    if not fn:
        raise ConfigError("key 'matrix_file' is required for state 'matrix'")
    p = Path(fn) if Path(fn).is_absolute() else base / fn
    try:
        rho = qmat.matrix_from_json(json.loads(p.read_text()))
        rho = qmat.check_density(rho)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"key 'matrix_file': {exc}") from exc
    d = rho.shape[0]
    return qmat.purify(rho, d, "uniform"), BipartiteLayout(d, d)


def _build_twirler(cfg: dict, dA: int):
    g = cfg["group"]
    n = int(round(math.log2(dA))) if dA > 0 else 0
    qubits = 2**n == dA
    if g == "weyl_heisenberg":
        return symmetry.weyl_heisenberg(dA)
    if g == "diagonal_phases":
        return symmetry.diagonal_phases(dA, cfg["levels"])
    if not qubits:
        raise ConfigError(f"group {g!r} needs a qubit register, but dimA = {dA}")
    if g == "pauli_words":
        return symmetry.pauli_words(n)
    if g == "casimir_su2_blocks":
        return symmetry.casimir_su2_blocks(n)
    if g == "u2_tensor":
        return symmetry.u2_tensor(n)
    return symmetry.clifford_schur_subgroup(n)


def build_scenario(cfg: dict, base: Path = Path(".")) -> Scenario:
    psi, layout = _build_state(cfg, base)
    tw = _build_twirler(cfg, layout.dimA)
    if "simulate" in cfg["tasks"] and layout.dimF % cfg["T"]:
        raise ConfigError(f"key 'T': {cfg['T']} does not divide the F dimension {layout.dimF}")
    return Scenario(cfg, psi, layout, tw)


def _tagged(value, formula: str) -> dict:
    return {"value": float(value), "formula": formula}


class Invariants:
    def __init__(self):
        self.items = []

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.items.append({"name": name, "passed": bool(passed), "detail": detail})

    @property
    def ok(self) -> bool:
        return all(i["passed"] for i in self.items)


def _task_capacities(sc: Scenario, inv: Invariants) -> dict:
    rep = capacity.capacity_report(sc.psi, sc.twirler, sc.layout)
    inv.add("capacity_hierarchy", rep.c_local <= rep.c_oneway + 1e-8 <= rep.c_global + 2e-8)
    inv.add("oneway_minus_local_is_H_F", abs(rep.c_oneway - rep.c_local - rep.stats["H_F"]) <= 1e-7)
    return {
        "c_local": _tagged(rep.c_local, "H(G(Psi_A)) - H(Psi_A)  [local decoders]"),
        "c_oneway": _tagged(rep.c_oneway, "H(G(Psi_A)) = H(A)_xi  [one-way LOCC decoders]"),
        "c_global": _tagged(rep.c_global, "H(A)_xi + H(F|K)_xi  [global decoders]"),
        "stats": {k: _tagged(v, f"{k} of the symmetric decomposition") for k, v in rep.stats.items()},
    }


def _task_figure(sc: Scenario, inv: Invariants) -> list:
    cfg = sc.cfg
    rows = capacity.figure_series(range(1, cfg["figure_n_max"] + 1), cfg["figure_p"], cfg["figure_mode"])
    if 0 < cfg["figure_p"] < 0.5:
        inv.add("figure_strict_ordering", all(r["c_local"] < r["c_oneway"] < r["c_global"] for r in rows))
    return rows


def _xi(sc: Scenario):
    blocks = symmetry.require_multiplicity_free(sc.twirler)
    return symmetry.symmetric_decomposition(sc.psi, blocks, sc.layout)


def _task_oneshot(sc: Scenario, inv: Invariants) -> dict:
    cfg = sc.cfg
    xi = _xi(sc)
    rate = oneshot.oneshot_achievable_rate(xi, cfg["epsilon"], cfg["variant"])
    L = oneshot.legendre(xi, cfg["R"])
    sym = symmetry.twirl(sc.twirler, capacity.marginal_A(sc.psi, sc.layout))
    conv = oneshot.strong_converse_success(sym, cfg["M"])
    inv.add("legendre_nonnegative", L >= 0)
    rep = oneshot.OneShotReport(cfg["R"], L, cfg["variant"], cfg["epsilon"], rate, conv.alpha, conv.bound)
    out = rep.to_json()
    out["formulas"] = {
        "L": "max_s sR + min(s H_{1+s}(AF) - s H_{1-s}(F|A), s H_{1+s}(A))",
        "rate_bits": "-L^{-1}(-2 log(eps/36))" if cfg["variant"] == "proof" else "-L^{-1}(-log eps)",
        "bound": "min_alpha 2^{((alpha-1)/alpha)(H_{2-alpha}(G(Psi_A)) - log M)}",
    }
    return out


def _sim_one(args):
    sc, seed = args
    cfg = sc.cfg
    s = Sampler(cfg["seed"]).child(("simulate", seed))
    h = protocol.make_hash(sc.layout.dimF, cfg["T"], s.child("hash"))
    grid = (np.arange(cfg["s_grid"]) + 0.5) / cfg["s_grid"]
    code = protocol.two_stage_protocol(sc.psi, sc.twirler, sc.layout, h, sc.twirler, cfg["M"], cfg["codeword_rule"], s, grid)
    return {"seed": seed, "exact_error": code.exact_error, "bound": code.bound, "delta": code.delta}


def _task_simulate(sc: Scenario, inv: Invariants, threads: int) -> list:
    cfg = sc.cfg
    n = 1 if isinstance(cfg["codeword_rule"], list) else cfg["seeds"]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        recs = list(ex.map(_sim_one, [(sc, i) for i in range(n)]))
    err = np.array([r["exact_error"] for r in recs])
    bound = float(np.mean([r["bound"] for r in recs]))
    sigma = err.std(ddof=1) / np.sqrt(len(err)) if len(err) > 1 else 0.0
    inv.add("mean_error_below_lemma_bound", err.mean() <= bound + 3 * sigma, f"{err.mean():.6g} vs {bound:.6g}")
    sym = symmetry.twirl(sc.twirler, capacity.marginal_A(sc.psi, sc.layout))
    worst = max(1 - e - oneshot.strong_converse_success(sym, cfg["M"], a).bound for e in err for a in (1.1, 1.5, 1.9))
    inv.add("success_below_converse_bound", worst <= 1e-9, f"max excess {worst:.3g}")
    return recs


def _task_identities(sc: Scenario, inv: Invariants) -> dict:
    s = Sampler(sc.cfg["seed"]).child("identities")
    dims = (sc.layout.dimA, sc.layout.dimF)
    lit = protocol.pt_modulus_check(100, dims, "literal", s.child("literal"), states=[sc.psi])
    tr = protocol.pt_modulus_check(100, dims, "transposed", s.child("transposed"), states=[sc.psi])
    inv.add("pt_modulus_identity_transposed_form", tr["residual"] <= 1e-8 and tr["residual_rotated"] <= 1e-8)
    out = {"pt_modulus_literal": lit, "pt_modulus_transposed": tr}
    rho = capacity.marginal_A(sc.psi, sc.layout)
    out["asymmetry"] = _tagged(entropy.rea(rho, sc.twirler).value, "D(Psi_A || G(Psi_A))")
    try:
        out["transpose_encoder"] = protocol.transpose_encoder_experiment(sc.psi, sc.twirler, sc.layout, samples=200, sampler=s.child("tau"))
        inv.add("transpose_product_values_nonnegative", out["transpose_encoder"]["min_product_value"] >= -1e-9)
    except ValueError as exc:
        out["transpose_encoder"] = {"skipped": str(exc)}
    return out


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    with os.fdopen(fd, "w", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run_scenario(cfg: dict, out_dir: Path, threads: int = 1, base: Path = Path(".")) -> int:
    sc = build_scenario(cfg, base)
    inv = Invariants()
    results, rows, sim = {}, None, []
    tasks = cfg["tasks"]
    if "capacities" in tasks:
        results["capacities"] = _task_capacities(sc, inv)
    if "figure" in tasks:
        rows = _task_figure(sc, inv)
    if "oneshot" in tasks:
        results["oneshot"] = _task_oneshot(sc, inv)
    if "simulate" in tasks:
        sim = _task_simulate(sc, inv, threads)
        results["simulate"] = {"records": len(sim), "file": "sim.jsonl"}
    if "identities" in tasks:
        results["identities"] = _task_identities(sc, inv)
    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": {k: cfg[k] for k in sorted(cfg)},
        "results": results,
        "invariants": inv.items,
        "ok": inv.ok,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "report.json", _dumps(report))
    if rows is not None:
        _write_atomic(out_dir / "figure.csv", capacity.series_to_csv(rows))
    if sim:
        _write_atomic(out_dir / "sim.jsonl", "".join(json.dumps(r, sort_keys=True) + "\n" for r in sim))
    return EXIT_OK if inv.ok else EXIT_INVARIANT


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="asymdense", description="Dense coding under symmetry constraints.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("config")
    r.add_argument("--out", default="out")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--threads", type=int, default=1)
    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--suite", choices=["fast", "full"], default="fast")
    f = sub.add_parser("figure", help="emit the capacity-vs-N table as CSV")
    f.add_argument("--p", type=float, default=0.25)
    f.add_argument("--n-max", type=int, default=8)
    f.add_argument("--mode", choices=["oracle", "printed"], default="oracle")
    f.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    if args.cmd == "run":
        try:
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg["seed"] = args.seed
            base = Path(args.config).parent if Path(args.config).exists() else Path(".")
            code = run_scenario(cfg, Path(args.out), args.threads, base)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (RuntimeError, ValueError) as exc:
            print(f"invariant failure: {exc}", file=sys.stderr)
            return EXIT_INVARIANT
        if code == EXIT_INVARIANT:
            report = json.loads((Path(args.out) / "report.json").read_text())
            failed = [i["name"] for i in report["invariants"] if not i["passed"]]
            print(f"invariant failure: {', '.join(failed)}", file=sys.stderr)
        return code

    if args.cmd == "verify":
        res = checks.run_suite(args.suite)
        for item in res:
            print(f"{'PASS' if item['passed'] else 'FAIL'}  {item['name']}: {item['detail']} ({item['seconds']} s)")
        failed = sum(not i["passed"] for i in res)
        print(f"{len(res) - failed} passed, {failed} failed")
        return EXIT_OK if not failed else EXIT_INVARIANT

    if not 0 <= args.p <= 0.5 or not 1 <= args.n_max <= 20:
        print("config error: need 0 <= p <= 1/2 and 1 <= n-max <= 20", file=sys.stderr)
        return EXIT_CONFIG
    text = capacity.series_to_csv(capacity.figure_series(range(1, args.n_max + 1), args.p, args.mode))
    if args.out == "-":
        sys.stdout.write(text)
    else:
        _write_atomic(Path(args.out), text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
