"""Command-line front end: ``twrelay {region,classify,sweep,verify}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from twrelay.channel import ChannelGains, DomainError, NodeLayout, PowerBudget, gains_from_layout
from twrelay.fullduplex import SchemeKind, SearchConfig, optimize_fd_region
from twrelay.halfduplex import HdSchemeKind, HdSearchConfig, optimize_hd_region
from twrelay.regimes import analyze, classify_regime, optimal_gammas
from twrelay.survey import SweepGrid, sweep_regime_map, throughput_gain
from twrelay.verify import faulty_classifier, run_verification

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3


class InputError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".9g")


def num(x):
    """JSON-friendly number at 9 significant digits (``None`` for NaN)."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return float(format(float(x), ".9g"))


def floats(text: str, n: int | None, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise InputError(f"{what}: expected {n} values, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise InputError(f"{what}: values must be finite")
    return vals


def gains_of(args) -> ChannelGains:
    if (args.gains is None) == (args.layout is None):
        raise InputError("give exactly one of --gains or --layout")
    if args.gains is not None:
        return ChannelGains.from_sequence(floats(args.gains, 6, "--gains"))
    x, y = floats(args.layout, 2, "--layout")
    return gains_from_layout(NodeLayout((x, y), pathloss_exponent=args.pathloss))


def power_of(args) -> PowerBudget:
    return PowerBudget(*floats(args.power, 3, "--power"))


def emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


FD_SCHEMES = {k.value: k for k in SchemeKind}
HD_SCHEMES = {k.value: k for k in HdSchemeKind}


def cmd_region(args) -> str:
    g, p = gains_of(args), power_of(args)
    if args.duplex == "fd":
        kind = FD_SCHEMES.get(args.scheme or "composite")
        if kind is None:
            raise InputError(f"unknown full-duplex scheme {args.scheme!r}; choose from {sorted(FD_SCHEMES)}")
        if args.tau is not None:
            raise InputError("--tau applies to half-duplex regions only")
        search = SearchConfig() if args.grid is None else SearchConfig(args.grid, args.grid)
        region = optimize_fd_region(g, p, kind, search)
        meta = {"points_low_dim": search.points_low_dim, "points_high_dim": search.points_high_dim,
                "halvings": search.halvings, "directions": search.directions}
    else:
        kind = HD_SCHEMES.get(args.scheme or "full")
        if kind is None:
            raise InputError(f"unknown half-duplex scheme {args.scheme!r}; choose from {sorted(HD_SCHEMES)}")
        tau = None if args.tau is None else tuple(floats(args.tau, 6, "--tau"))
        search = HdSearchConfig(
            tau_step=args.tau_step, tau=tau,
            power_points=HdSearchConfig.power_points if args.grid is None else args.grid,
        )
        region = optimize_hd_region(g, p, kind, search)
        meta = {"tau_step": search.tau_step, "tau": None if tau is None else list(tau),
                "power_points": search.power_points, "halvings": search.halvings,
                "directions": search.directions}
    if args.format == "json":
        return json_text({"scheme": kind.value,
                          "vertices": [[num(a), num(b)] for a, b in region.vertices],
                          "search": meta})
    return csv_text(["scheme", "r1_bits", "r2_bits"], [[kind.value, fmt(a), fmt(b)] for a, b in region.vertices])


rec_keys = ["regime", "sub", "timeshare_equivalent", "mu", "gamma_star", "r_s", "r_ts", "gain_percent"]


def classify_record(g: ChannelGains, p: PowerBudget) -> dict:
    label, cert = analyze(g, p)
    gam = optimal_gammas(label, cert, p)
    rec = {
        "regime": label.major,
        "sub": label.sub,
        "timeshare_equivalent": label.timeshare_equivalent,
        "mu": None, "gamma_star": None, "r_s": None, "r_ts": None, "gain_percent": None,
    }
    if not math.isnan(gam[0]):
        rec["gamma_star"] = [num(gam[0]), num(gam[1])]
    if cert is not None:
        rec.update(mu=num(cert.mu), r_s=num(cert.r_s), r_ts=num(cert.r_ts))
        rec["gain_percent"] = 0.0 if label.timeshare_equivalent else num(throughput_gain(cert))
    return rec


def cmd_classify(args) -> str:
    rec = classify_record(gains_of(args), power_of(args))
    if args.format == "json":
        return json_text(rec)
    cells = []
    for key in rec_keys:
        v = rec[key]
        if v is None:
            cells.append("")
        elif key == "gamma_star":
            cells.append(" ".join(fmt(x) for x in v))
        elif isinstance(v, float):
            cells.append(fmt(v))
        else:
            cells.append(str(v))
    return csv_text(rec_keys, [cells])


def cmd_sweep(args) -> str:
    x0, x1, y0, y1 = floats(args.window, 4, "--window")
    nx, ny = floats(args.res, 2, "--res")
    if nx != int(nx) or ny != int(ny):
        raise InputError("--res takes two integers")
    grid = SweepGrid(x0, x1, y0, y1, int(nx), int(ny), args.pathloss, power_of(args))
    cells = sweep_regime_map(grid)
    if args.format == "json":
        rows = [{
            "x": num(c.x), "y": num(c.y),
            "regime": "near-user" if c.near_user else c.label.major,
            "sub": None if c.label is None else c.label.sub,
            "gain_percent": num(c.gain_percent),
            "gamma_star": [num(c.gamma_star[0]), num(c.gamma_star[1])],
        } for c in cells]
        return json_text({"window": [x0, x1, y0, y1], "res": [grid.nx, grid.ny], "cells": rows})
    rows = [[
        fmt(c.x), fmt(c.y),
        "near-user" if c.near_user else c.label.major,
        "" if c.label is None or c.label.sub is None else c.label.sub,
        fmt(c.gain_percent), fmt(c.gamma_star[0]), fmt(c.gamma_star[1]),
    ] for c in cells]
    return csv_text(["x", "y", "regime", "sub", "gain_percent", "gamma1_star", "gamma2_star"], rows)


def cmd_verify(args) -> tuple[str, bool]:
    if args.draws <= 0:
        raise InputError("--draws must be positive")
    grid = 201 if args.grid is None else args.grid
    if grid < 2:
        raise InputError("--grid must be >= 2")
    clf = faulty_classifier if args.inject_fault else classify_regime
    report = run_verification(args.seed, args.draws, grid, power_of(args), clf)
    return json_text(report), report["passed"]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twrelay", description="Two-way relay decode-forward rate regions and regimes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, channel=True, fmt_default="csv"):
        if channel:
            sp.add_argument("--gains", help="six link amplitudes g12,g1r,g21,g2r,gr1,gr2")
            sp.add_argument("--layout", help="relay position x,y with users at (-1,0) and (1,0)")
        sp.add_argument("--pathloss", type=float, default=2.4, help="path-loss exponent (default 2.4)")
        sp.add_argument("--power", default="1,1,1", help="power budgets p1,p2,pr (default 1,1,1)")
        sp.add_argument("--out", default="-", help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    r = sub.add_parser("region", help="optimized rate region vertices")
    r.add_argument("duplex", choices=("fd", "hd"))
    r.add_argument("--scheme", help="scheme name (fd: %s; hd: %s)" % (", ".join(FD_SCHEMES), ", ".join(HD_SCHEMES)))
    r.add_argument("--grid", type=int, help="grid points per free dimension")
    r.add_argument("--tau-step", type=float, default=0.1, help="phase-duration lattice step (hd)")
    r.add_argument("--tau", help="fixed phase durations tau1..tau6 (hd)")
    common(r)

    c = sub.add_parser("classify", help="regime label and time-share certificate")
    common(c, fmt_default="json")

    s = sub.add_parser("sweep", help="regime and gain map over relay positions")
    s.add_argument("--window", default="-2,2,-2,2", help="x_min,x_max,y_min,y_max")
    s.add_argument("--res", default="81,81", help="nx,ny")
    common(s, channel=False)

    v = sub.add_parser("verify", help="classifier and closed-form checks on seeded draws")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--draws", type=int, default=200)
    v.add_argument("--grid", type=int, help="oracle grid size per axis (default 201)")
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    common(v, channel=False, fmt_default="json")
    return ap


_LIST_FLAGS = {"--gains", "--layout", "--power", "--tau", "--window", "--res"}


def _join_negative_lists(argv: list[str]) -> list[str]:
    # argparse treats "-2,2,-2,2" as an option; bind it to its flag instead
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok in _LIST_FLAGS and nxt is not None and nxt[:1] == "-" and nxt[1:2] in set("0123456789."):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_lists(argv))
    ok = True
    try:
        if args.command == "region":
            text = cmd_region(args)
        elif args.command == "classify":
            text = cmd_classify(args)
        elif args.command == "sweep":
            text = cmd_sweep(args)
        else:
            text, ok = cmd_verify(args)
    except (InputError, DomainError) as exc:
        print(f"twrelay: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        emit(text, args.out)
    except OSError as exc:
        print(f"twrelay: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if ok else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
