"""Command-line front end.

Every command writes machine-readable files into ``--out`` together with
``config.json`` (the fully resolved configuration) and ``meta.json`` (timestamp,
version, kernel backend).  Only ``meta.json`` changes between identical runs.

Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 partial
success (some cycles unsupported), 4 insufficient data, 5 I/O error, 6 numeric
failure.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (BudgetExceededError, DegenerateFitError, HetRingError, InsufficientDataError, NumericError,
                     SimulationError, UnsupportedCycleError, ValidationError)
from .graph import make_ring
from .io import graph_spec, load_graph, network_to_dict, network_to_dot, write_json
from .network import build_network, cycle_from_labels, enumerate_cycles
from .stability import analyze_cycle, eigenpair_check, theorem_verdict, transition_matrix_for_cycle, \
    transition_matrix_symmetric

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_PARTIAL, EXIT_DATA, EXIT_IO, EXIT_NUMERIC = range(7)

DEFAULTS = {
    "n": 5,
    "m": 1,
    "graph": None,
    "r": 2.0,
    "gamma": 3.04,
    "out": ".",
    "format": None,
    "jobs": 1,
    "seed": 1,
    "steps": 100_000,
    "theta": None,
    "floor": None,
}


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(" ", "").split(",") if v)


def _range(text: str) -> list[int]:
    """``1-5`` or ``1,3,4``."""
    if "-" in text:
        lo, hi = text.split("-")
        return list(range(int(lo), int(hi) + 1))
    return list(_csv_ints(text))


def _float_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive of stop) or a comma list."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + step * k, 10) for k in range(max(count, 0))]
    return [float(v) for v in text.split(",") if v]


def _resolve(args: argparse.Namespace, command_defaults: dict) -> dict:
    """CLI flags override the config file, which overrides defaults."""
    cfg = dict(DEFAULTS)
    cfg.update(command_defaults)
    if getattr(args, "config", None):
        cfg.update(json.loads(Path(args.config).read_text()))
    for key, val in vars(args).items():
        if key in ("func", "config") or val is None:
            continue
        cfg[key] = val
    cfg["command"] = args.command
    return cfg


def _graph(cfg):
    if cfg.get("graph"):
        return load_graph(cfg["graph"])
    return make_ring(int(cfg["n"]), int(cfg["m"]))


def _prepare_out(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(out: Path, cfg: dict, extra: dict | None = None):
    resolved = dict(cfg)
    if extra:
        resolved.update(extra)
    write_json(out / "config.json", resolved)
    from .dynamics import backend

    meta = {
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
        "backend": backend.name_of(backend.get()),
    }
    write_json(out / "meta.json", meta)


def _select_cycles(net, selector: str, max_len):
    """``all``, ``symmetric``, ``j=<k>``, comma-free index list like ``0;2``, or
    fixed points separated by ``/`` such as ``1,3/3,5/2,5/2,4/1,4``."""
    if "/" in selector:
        seq = [_csv_ints(part) for part in selector.split("/")]
        return [cycle_from_labels(net, seq)]
    cycles = enumerate_cycles(net, max_len=max_len)
    if selector == "all":
        return cycles
    if selector == "symmetric":
        return [c for c in cycles if c.symmetric]
    if selector.startswith("j="):
        j = int(selector[2:])
        return [c for c in cycles if c.j == j and c.symmetric]
    picks = [int(v) for v in selector.split(";") if v]
    try:
        return [cycles[i] for i in picks]
    except IndexError as exc:
        raise ValidationError(f"cycle index out of range (network has {len(cycles)} cycles)") from exc


def cmd_network(args) -> int:
    cfg = _resolve(args, {})
    g = _graph(cfg)
    net = build_network(g, cfg["r"], cfg["gamma"])
    out = _prepare_out(cfg)
    data = network_to_dict(net)
    fmt = cfg["format"]
    if fmt in (None, "json"):
        write_json(out / "network.json", data)
    if fmt in (None, "dot"):
        (out / "network.dot").write_text(network_to_dot(net))
    if fmt == "csv":
        with open(out / "connections.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["source", "target", "entering", "kind"])
            for c in data["connections"]:
                w.writerow([c["source"], c["target"], c["entering"], c["kind"]])
    _echo_config(out, cfg, {"graph_spec": graph_spec(g)})
    census = " / ".join(f"{v}" for v in net.census().values())
    print(f"fixed points by active count: {census}; connections: {len(net.connections)}; "
          f"sinks: {', '.join(fp.label for fp in net.sinks) or 'none'}")
    return EXIT_OK


def cmd_cycles(args) -> int:
    cfg = _resolve(args, {"select": "all"})
    net = build_network(_graph(cfg), cfg["r"], cfg["gamma"])
    cycles = _select_cycles(net, cfg["select"], cfg.get("max_len"))
    out = _prepare_out(cfg)
    rows = [{"index": i, "cycle": c.label, "length": len(c), "j": c.j, "symmetric": c.symmetric,
             "rotation": c.rotation, "class": str(c.symmetry_class)} for i, c in enumerate(cycles)]
    if cfg["format"] == "csv":
        with open(out / "cycles.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["index", "cycle"])
            w.writeheader()
            w.writerows(rows)
    else:
        write_json(out / "cycles.json", rows)
    _echo_config(out, cfg)
    for row in rows:
        print(f"{row['index']:3d}  len={row['length']}  j={row['j']}  {row['class']:<12} {row['cycle']}")
    return EXIT_OK


def cmd_stability(args) -> int:
    cfg = _resolve(args, {"select": "symmetric"})
    g = _graph(cfg)
    net = build_network(g, cfg["r"], cfg["gamma"])
    cycles = _select_cycles(net, cfg["select"], cfg.get("max_len"))
    out = _prepare_out(cfg)
    reports = []
    failed = 0
    for c in cycles:
        try:
            rep = analyze_cycle(net, c).to_dict()
            reports.append(rep)
            print(f"{c.label}: {rep['status']}, lambda_max={complex(rep['lambda_max']['re'], rep['lambda_max']['im']):.6g}")
        except (UnsupportedCycleError, NumericError) as exc:
            failed += 1
            reports.append({"cycle": c.label, "error": str(exc)})
            print(f"{c.label}: unsupported ({exc})")
    write_json(out / "stability.json", reports)
    _echo_config(out, cfg)
    return EXIT_PARTIAL if failed else EXIT_OK


SWEEP_FIELDS = ["j", "p", "q", "delta", "delta_star", "excluded", "lambda_max_re", "lambda_max_im", "status", "fas",
                "theorem_verdict", "agreement", "error"]


def _sweep_cell(cell):
    j, p, q, d, excluded = cell
    row = {"j": j, "p": p, "q": q, "delta": d, "delta_star": (q + 1 - j) / j, "excluded": excluded}
    try:
        rep = eigenpair_check(transition_matrix_symmetric(j, q, d))
        tv = theorem_verdict(j, q, d)
        row.update(lambda_max_re=rep.lambda_max.real, lambda_max_im=rep.lambda_max.imag, status=rep.status,
                   fas=rep.fas, theorem_verdict=tv.stable,
                   agreement=None if rep.fas is None else rep.fas == tv.stable, error="")
    except HetRingError as exc:
        row.update(status="error", error=str(exc))
    return row


def cmd_sweep(args) -> int:
    from .verify import grid_cells

    cfg = _resolve(args, {"j": "1-5", "p": "2-5", "delta": "0.1:5.0:0.15", "exclusion": 0.05})
    js, deltas = _range(cfg["j"]), _float_grid(cfg["delta"])
    if cfg.get("q"):
        qs = _range(cfg["q"])
        cells = []
        for j in js:
            for q in qs:
                if q < j:
                    continue
                dstar = (q + 1 - j) / j
                p = q // j + 1 if q % j == 0 else None
                cells.extend((j, p, q, d, abs(d - dstar) < cfg["exclusion"]) for d in deltas)
    else:
        cells = list(grid_cells(js, _range(cfg["p"]), deltas, cfg["exclusion"]))
    jobs = max(1, int(cfg["jobs"]))
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_cell, cells, chunksize=max(1, len(cells) // (4 * jobs))))
    else:
        rows = [_sweep_cell(c) for c in cells]
    out = _prepare_out(cfg)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS)
        w.writeheader()
        w.writerows(rows)
    _echo_config(out, cfg)
    judged = [r for r in rows if not r["excluded"] and r.get("agreement") is not None]
    agree = sum(1 for r in judged if r["agreement"])
    print(f"{len(rows)} cells; agreement {agree}/{len(judged)} outside the exclusion band")
    return EXIT_OK if all(r.get("status") != "error" for r in rows) else EXIT_PARTIAL


def cmd_simulate(args) -> int:
    from .dynamics import SimParams, eigenvector_ic, extract_epochs, perturbed_ic, run_epochs, simulate

    cfg = _resolve(args, {"ic": "perturbed", "fixed_point": "1", "epsilon": 1e-6, "record_every": 1,
                          "select": None, "which": None, "scale": -1e3, "max_epochs": 64})
    g = _graph(cfg)
    r, gamma = cfg["r"], cfg["gamma"]
    initial_is_log = False
    if cfg["ic"] == "perturbed":
        net = build_network(g, r, gamma)
        fp = net.find(*_csv_ints(cfg["fixed_point"]))
        x0 = perturbed_ic(fp, cfg["epsilon"], cfg["seed"])
    elif cfg["ic"] == "eigenvector":
        net = build_network(g, r, gamma)
        if not cfg["select"]:
            raise ValidationError("--ic eigenvector needs --select naming one cycle")
        cycle = _select_cycles(net, cfg["select"], None)[0]
        tm = transition_matrix_for_cycle(net, cycle)
        which = cfg["which"]
        if which is None:
            which = int(np.argmax([abs(z.imag) < 1e-9 for z in eigenpair_check(tm).roots]))
        x0 = eigenvector_ic(cycle, tm, int(which), cfg["scale"], log=True)
        initial_is_log = True
        cfg["which"] = which
    else:
        x0 = np.asarray(json.loads(Path(cfg["ic"]).read_text()), dtype=float)
    log_space = bool(cfg.get("log_space")) or initial_is_log or bool(cfg.get("online"))
    params = SimParams(g, r, gamma, int(cfg["steps"]), x0, floor=cfg["floor"], record_every=int(cfg["record_every"]),
                       log_space=log_space, initial_is_log=initial_is_log)
    out = _prepare_out(cfg)
    if cfg.get("online"):
        epochs = run_epochs(params, theta=cfg["theta"], max_epochs=int(cfg["max_epochs"]))
    else:
        traj = simulate(params)
        traj.to_csv(out / "trajectory.csv", log_columns=log_space)
        try:
            epochs = extract_epochs(traj, theta=cfg["theta"])
        except InsufficientDataError as exc:
            print(f"trajectory written; no epochs: {exc}")
            _echo_config(out, cfg, {"graph_spec": graph_spec(g), "log_space": log_space})
            return EXIT_OK
    epochs.to_csv(out / "epochs.csv")
    _echo_config(out, cfg, {"graph_spec": graph_spec(g), "log_space": log_space})
    print(f"{len(epochs)} epochs; last shadowed: {epochs.labels()[-1]}")
    return EXIT_OK


def cmd_fit(args) -> int:
    from .dynamics import EpochSeries, cycle_valleys, fit_decay, fit_single
    from .dynamics.fit import decay_eigenvalues

    cfg = _resolve(args, {"select": "j=1"})
    if not cfg.get("epochs"):
        raise ValidationError("fit needs --epochs pointing at an epochs.csv")
    g = _graph(cfg)
    net = build_network(g, cfg["r"], cfg["gamma"])
    cycle = _select_cycles(net, cfg["select"], None)[0]
    tm = transition_matrix_for_cycle(net, cycle)
    lam1, lam2 = decay_eigenvalues(tm.entries)
    series = EpochSeries.from_csv(cfg["epochs"])
    idx, vals = cycle_valleys(series, cycle)
    fit = fit_decay(vals, lam1, lam2)
    single = fit_single(vals, lam2)
    out = _prepare_out(cfg)
    result = fit.to_dict()
    result.update(cycle=cycle.label, epochs_used=[int(k) for k in idx],
                  single_eigenvalue_rms=single.rms_residual, valley_range=float(np.ptp(vals)))
    write_json(out / "fit.json", result)
    with open(out / "model.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "epoch", "X_data", "X_model", "X_single"])
        for j, (k, x) in enumerate(zip(idx, vals)):
            w.writerow([j, int(k), repr(float(x)), repr(float(fit.model(j))), repr(float(single.model(j)))])
    _echo_config(out, cfg)
    print(f"rms {fit.rms_residual:.6g} ({fit.rms_residual / np.ptp(vals):.2%} of range) over {len(vals)} valleys")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_all

    only = _range(args.only) if args.only else None
    results = run_all(only)
    for res in results:
        print(res.line())
        if args.verbose or not res.passed:
            for line in res.details:
                print(f"    {line}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def _add_common(p: argparse.ArgumentParser, sim: bool = False):
    g = p.add_argument_group("graph and parameters")
    g.add_argument("--graph", help="JSON graph spec ({n, m} or {n, edges})")
    g.add_argument("--n", type=int, help="ring size (default 5)")
    g.add_argument("--m", type=int, help="ring reach (default 1)")
    g.add_argument("--r", type=float, help="logistic parameter (default 2)")
    g.add_argument("--gamma", type=float, help="coupling strength (default 3.04)")
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--format", choices=("csv", "json", "dot"))
    p.add_argument("--config", help="JSON file of defaults; flags take precedence")
    if sim:
        p.add_argument("--steps", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--theta", type=float, help="epoch threshold (default xhat/2)")
        p.add_argument("--floor", type=float, help="clamp components at max(x, floor)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetring", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("network", help="fixed points, connections and sinks")
    _add_common(p)
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("cycles", help="enumerate simple cycles")
    _add_common(p)
    p.add_argument("--select", help="all | symmetric | j=<k> | i;j | 1,3/3,5/...")
    p.add_argument("--max-len", dest="max_len", type=int)
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("stability", help="stability report per cycle")
    _add_common(p)
    p.add_argument("--select", help="cycle selector (default symmetric)")
    p.add_argument("--max-len", dest="max_len", type=int)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("sweep", help="closed form against eigenpair test over a grid")
    _add_common(p)
    p.add_argument("--j", help="active counts, e.g. 1-5")
    p.add_argument("--p", help="spacings, q = j (p - 1), e.g. 2-5")
    p.add_argument("--q", help="explicit q values (overrides --p)")
    p.add_argument("--delta", help="start:stop:step or comma list")
    p.add_argument("--exclusion", type=float, help="band around delta* left unjudged")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="iterate the map and segment into epochs")
    _add_common(p, sim=True)
    p.add_argument("--ic", help="perturbed | eigenvector | path to a JSON state")
    p.add_argument("--fixed-point", dest="fixed_point", help="active nodes for --ic perturbed, e.g. 1,3")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--select", help="cycle for --ic eigenvector")
    p.add_argument("--which", type=int, help="eigenvalue index (default: leading real one)")
    p.add_argument("--scale", type=float, help="log scale of the eigenvector IC, negative (write --scale=-1e4)")
    p.add_argument("--record-every", dest="record_every", type=int)
    p.add_argument("--log-space", dest="log_space", action="store_true", default=None)
    p.add_argument("--online", action="store_true", default=None,
                   help="detect epochs on the fly and skip the trajectory file")
    p.add_argument("--max-epochs", dest="max_epochs", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit the two-eigenvalue decay model to valley logs")
    _add_common(p)
    p.add_argument("--epochs", help="epochs.csv from simulate")
    p.add_argument("--select", help="cycle supplying the eigenvalues (default j=1)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--only", help="criterion numbers, e.g. 1-5 or 6,7")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InsufficientDataError, DegenerateFitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValidationError, BudgetExceededError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except HetRingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
