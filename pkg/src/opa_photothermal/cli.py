"""Command-line front end.

Every command writes a CSV (17 significant digits, ``\\n`` line endings) and,
when ``--out`` is given, a JSON sidecar with the resolved parameter set.
``--plot`` additionally drops a small matplotlib script next to the CSV.

Examples::

    opa-photothermal spectrum --config params/table1.cfg --out fig2.csv \\
        --family "phi_b=0,180 deg"
    opa-photothermal threshold --config params/table1.cfg
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from .config import DEFAULTS, OpaParams, derive_rates, load_params_file, parse_setting
from .errors import OpaError
from .gw import FREQUENCY_DEPENDENT, IfoParams, filtered_noise, gw_noise, h_sql
from .sde import sde_oracle
from .spectra import build_model, log_grid
from .steady_state import operating_point

GW_SCHEMES = ("unsqueezed", "fixed", "fixed-no-photothermal", "frequency-dependent", "filter")


def _code_version():
    try:
        return version("artifact")
    except PackageNotFoundError:  # running from a source checkout
        return "unknown"


def fmt(x) -> str:
    return f"{float(x):.17g}"


def db(v):
    return 10 * np.log10(v)


def _float_list(text):
    return [float(v) for v in text.replace(",", " ").split()]


def parse_family(text):
    """``"key=v1,v2,... [unit]"`` -> ``(key, [SI values], [labels])``."""
    key, _, rest = text.partition("=")
    raw, _, unit = rest.strip().partition(" ")
    labels = [v for v in raw.split(",") if v]
    if not labels:
        raise argparse.ArgumentTypeError(f"no values in family {text!r}")
    values = [parse_setting(f"{key.strip()} = {v} {unit}".strip())[1] for v in labels]
    suffix = f" {unit}" if unit else ""
    return key.strip(), values, [f"{key.strip()}={v}{suffix}" for v in labels]


def resolve_params(args) -> OpaParams:
    p = load_params_file(args.config) if args.config else DEFAULTS
    changes = {}
    for item in args.set or []:
        key, value = parse_setting(item)
        changes[key] = value
    if args.seed_mw is not None:
        changes["P_seed"] = args.seed_mw * 1e-3
    if args.pump_frac is not None:
        changes["pump_fraction"] = args.pump_frac
    if args.pump_w is not None:
        changes["P_pump"] = args.pump_w
    if args.squeeze == "phase":
        changes["phi_b"] = 0.0
    elif args.squeeze == "amplitude":
        changes["phi_b"] = np.pi
    if args.no_photothermal:
        changes["sigma_a_abs"] = 0.0
        changes["sigma_b_abs"] = 0.0
    return p.replace(**changes) if changes else p


def _grid(args):
    if not args.f_min < args.f_max:
        raise argparse.ArgumentTypeError("--f-min must be below --f-max")
    if args.ppd < 10:
        raise argparse.ArgumentTypeError("--ppd must be at least 10")
    return log_grid(args.f_min, args.f_max, args.ppd)


def cmd_spectrum(args, p):
    Omega = _grid(args)
    rows = []
    if args.family:
        key, values, labels = parse_family(args.family)
        header = "freq_hz,V1_dB,V2_dB,label"
        for value, label in zip(values, labels):
            V1, V2 = build_model(p.replace(**{key: value})).variances(Omega)
            rows += [(w / (2 * np.pi), a, b, label) for w, a, b in zip(Omega, V1, V2)]
    else:
        header = "freq_hz,V1_dB,V2_dB"
        V1, V2 = build_model(p).variances(Omega)
        rows = [(w / (2 * np.pi), a, b) for w, a, b in zip(Omega, V1, V2)]
    lines = [header]
    for r in rows:
        cells = [fmt(r[0]), fmt(db(r[1])), fmt(db(r[2]))] + list(r[3:])
        lines.append(",".join(cells))
    return lines, {"grid_hz": [args.f_min, args.f_max, args.ppd], "family": args.family}


def cmd_sweep(args, p):
    freqs = _float_list(args.freqs)
    ss = operating_point(p)
    if args.axis == "pump":
        if args.values:
            settings = [{"P_pump": v} for v in _float_list(args.values)]
        else:
            settings = [{"pump_fraction": f} for f in np.linspace(0.02, 0.98, 49)]
    else:
        values = _float_list(args.values) if args.values else np.geomspace(1e-4, 1e-1, 61)
        settings = [{"P_seed": v} for v in values]
    column = "pump_watts" if args.axis == "pump" else "seed_watts"
    lines = [f"{column},freq_hz,V1_dB,V2_dB"]
    Omega = 2 * np.pi * np.asarray(freqs)
    for change in settings:
        q = p.replace(**change)
        model = build_model(q)
        x = model.steady.P_pump if args.axis == "pump" else q.P_seed
        V1, V2 = model.variances(Omega)
        for f, a, b in zip(freqs, V1, V2):
            lines.append(",".join([fmt(x), fmt(f), fmt(db(a)), fmt(db(b))]))
    return lines, {"axis": args.axis, "freqs_hz": freqs, "P_th_W": ss.P_th}


def _fixed_angle(args, V1, V2):
    if args.theta != "auto":
        return float(args.theta)
    # couple the quadrature that is squeezed at the top of the band to the
    # shot-noise-dominated (high-frequency) readout
    return np.pi / 2 if V1[-1] < V2[-1] else 0.0


def cmd_gw(args, p):
    Omega = _grid(args)
    ifo = IfoParams(m=args.mass, L=args.arm_length, gamma_arm=2 * np.pi * args.arm_linewidth_hz,
                    power_ratio=args.power_ratio,
                    gamma_f=2 * np.pi * args.filter_linewidth_hz if args.filter_linewidth_hz else None)
    V1, V2 = build_model(p).variances(Omega)
    theta = _fixed_angle(args, V1, V2)
    fixed = ifo.replace(theta=theta)
    h2 = h_sql(Omega, ifo.m, ifo.L) ** 2
    schemes = args.schemes.split(",") if args.schemes else list(GW_SCHEMES)
    curves = {}
    for scheme in schemes:
        if scheme == "unsqueezed":
            S = gw_noise(Omega, 1.0, 1.0, fixed)
        elif scheme == "fixed":
            S = gw_noise(Omega, V1, V2, fixed)
        elif scheme == "fixed-no-photothermal":
            W1, W2 = build_model(p, photothermal=False).variances(Omega)
            S = gw_noise(Omega, W1, W2, fixed)
        elif scheme == "frequency-dependent":
            S = gw_noise(Omega, V1, V2, ifo.replace(theta=FREQUENCY_DEPENDENT))
        elif scheme == "filter":
            S = filtered_noise(Omega, V1, V2, ifo)
        else:
            raise argparse.ArgumentTypeError(f"unknown scheme {scheme!r}; choose from {', '.join(GW_SCHEMES)}")
        curves[scheme] = S / h2
    lines = ["freq_hz,S_over_hsql2_dB,scheme"]
    for scheme, S in curves.items():
        lines += [",".join([fmt(w / (2 * np.pi)), fmt(db(s)), scheme]) for w, s in zip(Omega, S)]
    meta = {"grid_hz": [args.f_min, args.f_max, args.ppd], "ifo": dataclasses.asdict(fixed)}
    return lines, meta


def cmd_threshold(args, p):
    rates = derive_rates(p)
    model = build_model(p)
    ss = model.steady
    items = {
        "P_th_W": ss.P_th, "P_pump_W": ss.P_pump, "gain": ss.gain,
        "eps_real_per_s": ss.eps_bar.real, "eps_imag_per_s": ss.eps_bar.imag,
        "a_bar_abs": abs(ss.a_bar), "b_bar_abs": abs(ss.b_bar),
        "omega_T_rad_per_s": model.thermal.omega_T,
    }
    for f in dataclasses.fields(rates):
        unit = "s" if f.name == "tau_rt" else "per_s"
        items[f"{f.name}_{unit}"] = getattr(rates, f.name)
    lines = ["quantity,value"] + [f"{k},{fmt(v)}" for k, v in items.items()]
    return lines, {}


def cmd_oracle(args, p):
    probes = _float_list(args.probes)
    est = sde_oracle(p, probes, rng_seed=args.rng_seed, replicas=args.replicas, segments=args.segments)
    V1, V2 = build_model(p).variances(2 * np.pi * np.asarray(probes))
    lines = ["freq_hz,V1_oracle,V1_err,V2_oracle,V2_err,V1_model,V2_model"]
    for e, a, b in zip(est, V1, V2):
        lines.append(",".join(fmt(v) for v in (e.freq_hz, e.V1, e.V1_err, e.V2, e.V2_err, a, b)))
    return lines, {"rng_seed": args.rng_seed, "replicas": args.replicas, "segments": args.segments}


PLOT_SCRIPT = '''"""Plot {csv} (generated by opa-photothermal)."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

with open("{csv}", newline="") as fh:
    rows = list(csv.reader(fh))
header, rows = rows[0], rows[1:]
numeric = [i for i, name in enumerate(header) if name not in ("label", "scheme")]
group = header.index("scheme") if "scheme" in header else header.index("label") if "label" in header else None
curves = defaultdict(list)
for row in rows:
    curves[row[group] if group is not None else ""].append([float(row[i]) for i in numeric])
fig, ax = plt.subplots()
x = numeric[0]
for name, pts in curves.items():
    for j in range(1, len(numeric)):
        col = header[numeric[j]]
        ax.plot([r[0] for r in pts], [r[j] for r in pts], label=(name + " " + col).strip())
ax.set_xscale("log")
ax.set_xlabel(header[x])
ax.legend(fontsize="small")
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "{stem}.png", dpi=150)
'''


def write_outputs(args, lines, meta, p):
    text = "\n".join(lines) + "\n"
    if not args.out:
        sys.stdout.write(text)
        return
    with open(args.out, "w", newline="\n") as fh:
        fh.write(text)
    sidecar = {
        "command": args.command,
        "code_version": _code_version(),
        "params": {k: v for k, v in dataclasses.asdict(p).items()},
        **meta,
    }
    with open(args.out + ".json", "w", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.plot:
        stem = args.out.rsplit(".", 1)[0]
        with open(stem + "_plot.py", "w", newline="\n") as fh:
            fh.write(PLOT_SCRIPT.format(csv=args.out, stem=stem))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="parameter file (key = value [unit]); built-in defaults if omitted")
    common.add_argument("--set", action="append", metavar="'KEY=VALUE [UNIT]'",
                        help="override one parameter (repeatable)")
    common.add_argument("--seed-mw", type=float, help="seed power in mW")
    pump = common.add_mutually_exclusive_group()
    pump.add_argument("--pump-frac", type=float, help="pump power as a fraction of threshold")
    pump.add_argument("--pump-w", type=float, help="pump power in W")
    sq = common.add_mutually_exclusive_group()
    sq.add_argument("--phase-squeeze", dest="squeeze", action="store_const", const="phase",
                    help="pump phase 0 (phase quadrature squeezed)")
    sq.add_argument("--amplitude-squeeze", dest="squeeze", action="store_const", const="amplitude",
                    help="pump phase pi (amplitude quadrature squeezed)")
    common.add_argument("--no-photothermal", action="store_true",
                        help="set both absorption coefficients to zero")
    common.add_argument("--out", help="CSV path (stdout if omitted; sidecar written as OUT.json)")
    common.add_argument("--plot", action="store_true", help="also write a matplotlib script")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--f-min", type=float, default=1.0, help="lowest frequency, Hz")
    grid.add_argument("--f-max", type=float, default=1e7, help="highest frequency, Hz")
    grid.add_argument("--ppd", type=int, default=100, help="grid points per decade")

    parser = argparse.ArgumentParser(prog="opa-photothermal", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common, grid], help="V1/V2 versus frequency")
    s.add_argument("--family", help="one curve per value, e.g. 'P_seed=0.1,1,10 mW'")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("sweep", parents=[common], help="V1/V2 versus pump or seed power")
    s.add_argument("--axis", choices=("pump", "seed"), required=True)
    s.add_argument("--values", help="powers in W (default: a built-in range)")
    s.add_argument("--freqs", default="10,100,1000,10000", help="sideband frequencies in Hz")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("gw", parents=[common, grid], help="interferometer noise, SQL-normalized")
    s.set_defaults(f_max=1e4)
    s.add_argument("--schemes", help=f"comma list from {','.join(GW_SCHEMES)} (default: all)")
    s.add_argument("--theta", default="auto",
                   help="fixed injection angle in rad, or 'auto' to couple the squeezed quadrature at high frequency")
    s.add_argument("--mass", type=float, default=40.0, help="mirror mass, kg")
    s.add_argument("--arm-length", type=float, default=4e3, help="arm length, m")
    s.add_argument("--arm-linewidth-hz", type=float, default=100.0)
    s.add_argument("--power-ratio", type=float, default=1.0, help="I0 / I_SQL")
    s.add_argument("--filter-linewidth-hz", type=float, default=400.0)
    s.set_defaults(func=cmd_gw)

    s = sub.add_parser("threshold", parents=[common], help="operating point and rates")
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("oracle", parents=[common], help="Monte-Carlo check at probe frequencies")
    s.add_argument("--probes", default="10,2000,200000", help="probe frequencies in Hz")
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--replicas", type=int, default=32)
    s.add_argument("--segments", type=int, default=64)
    s.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        p = resolve_params(args)
        lines, meta = args.func(args, p)
        write_outputs(args, lines, meta, p)
    except OpaError as exc:
        print(f"error [{exc.category}]: {exc}", file=sys.stderr)
        return 3
    except argparse.ArgumentTypeError as exc:
        print(f"error [usage]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
