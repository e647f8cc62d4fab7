"""Command-line experiment runner.

    nncoop constants  [--lambda L]
    nncoop analytic   [network flags] [--out FILE]
    nncoop simulate   [network flags] [--model nn|superposition|baseline] [--trials N]
    nncoop compare    [network flags] [--model ...]      analytic vs MC vs baseline
    nncoop figures    [--out DIR] [--trials N]            six CSV + six SVG files

Values come from built-in defaults, then ``--config FILE`` (flat key=value),
then explicit flags.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import (ClosestCluster, FixedTransmitter, NetworkConfig, ParameterError,
                     baseline_constants, derive_constants, read_config_file)
from .coverage import coverage_closest, coverage_fixed, threshold_grid
from .curves import CoverageCurve, curves_to_csv, write_curves_csv
from .montecarlo import Model, SimulationPlan, simulate_coverage
from .plotting import render_svg, write_svg
from .quadrature import QuadratureError
from .signals import Max, NSC, Off, UnsupportedSchemeError, parse_scheme, scheme_label

DEFAULTS = {
    "lambda": 0.25,
    "beta": 3.0,
    "power": 1.0,
    "sigma2": 0.0,
    "scheme": "nsc",
    "q": None,
    "association": "fixed",
    "r0": 1.0,
    "t_min_db": -10.0,
    "t_max_db": 20.0,
    "t_steps": 31,
    "trials": 10_000,
    "seed": 12345,
    "window_radius": None,
    "guard_radius": None,
    "model": None,
    "out": None,
    "format": "csv",
}


def _add_common(p):
    g = p.add_argument_group("network")
    g.add_argument("--config", help="key=value file; flags override its values")
    g.add_argument("--lambda", dest="lambda", type=float, help="BS density per km^2 (default 0.25)")
    g.add_argument("--beta", type=float, help="path-loss exponent > 2 (default 3)")
    g.add_argument("--power", type=float, help="transmit power in W (default 1)")
    g.add_argument("--sigma2", type=float, help="noise power in W (default 0)")
    g.add_argument("--scheme", help="nsc | off[:q] | max | ph | ph-coherent | SERVING/INTERFERER, "
                                    "e.g. max/off (default nsc)")
    g.add_argument("--q", type=float, help="probability that the first station of an OFF pair "
                                           "transmits (default 0.5)")
    g.add_argument("--association", choices=["fixed", "closest"], help="default fixed")
    g.add_argument("--r0", type=float, help="fixed transmitter distance in km (default 1)")
    t = p.add_argument_group("thresholds")
    t.add_argument("--t-min-db", dest="t_min_db", type=float, help="default -10")
    t.add_argument("--t-max-db", dest="t_max_db", type=float, help="default 20")
    t.add_argument("--t-steps", dest="t_steps", type=int, help="default 31")
    s = p.add_argument_group("simulation")
    s.add_argument("--trials", type=int, help="Monte Carlo trials (default 10000)")
    s.add_argument("--seed", type=int, help="base seed (default 12345)")
    s.add_argument("--window-radius", dest="window_radius", type=float,
                   help="simulation window radius in km (default 15/sqrt(lambda))")
    s.add_argument("--guard-radius", dest="guard_radius", type=float,
                   help="guard band in km (default 3/sqrt(lambda))")
    s.add_argument("--model", choices=[m.value for m in Model],
                   help="simulated model (simulate: nn, compare: superposition)")
    o = p.add_argument_group("output")
    o.add_argument("--out", help="output file (figures: directory); CSV to stdout if omitted")
    o.add_argument("--format", choices=["csv", "svg", "both"], help="default csv")


def build_parser():
    p = argparse.ArgumentParser(prog="nncoop", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("constants", "print the derived model constants"),
        ("analytic", "superposition-model coverage from the Laplace-transform formulas"),
        ("simulate", "Monte Carlo coverage"),
        ("compare", "analytic vs Monte Carlo vs non-cooperative baseline"),
        ("figures", "reproduce the closeness, gain and validation figures"),
    ]:
        _add_common(sub.add_parser(name, help=help_))
    return p


def resolve_settings(args):
    values = dict(DEFAULTS)
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return values


def _with_q(scheme, q):
    if q is not None and isinstance(scheme, Off):
        return Off(q)
    return scheme


def network_from_settings(v):
    serving, interferer = parse_scheme(v["scheme"])
    serving = _with_q(serving, v["q"])
    interferer = _with_q(interferer, v["q"]) if interferer is not None else None
    if v["association"] == "fixed":
        assoc = FixedTransmitter(v["r0"])
    elif v["association"] == "closest":
        assoc = ClosestCluster()
    else:
        raise ParameterError(f"unknown association {v['association']!r}")
    return NetworkConfig(lam=v["lambda"], beta=v["beta"], power=v["power"], sigma2=v["sigma2"],
                         scheme=serving, association=assoc, interferer_scheme=interferer)


def thresholds_from_settings(v):
    return threshold_grid(v["t_min_db"], v["t_max_db"], v["t_steps"])


def plan_from_settings(v, model, thresholds):
    return SimulationPlan(model=model, thresholds=tuple(thresholds), trials=v["trials"],
                          window_radius=v["window_radius"], guard_radius=v["guard_radius"],
                          base_seed=v["seed"])


def _assoc_name(cfg):
    return "fixed" if isinstance(cfg.association, FixedTransmitter) else "closest"


def analytic_curve(cfg, thresholds, *, baseline=False):
    consts = baseline_constants(cfg) if baseline else derive_constants(cfg)
    if isinstance(cfg.association, FixedTransmitter):
        vals = coverage_fixed(thresholds, cfg.association.r0, cfg, consts)
    else:
        vals = coverage_closest(thresholds, cfg.scheme, cfg, consts)
    return CoverageCurve(np.asarray(thresholds), np.asarray(vals), method="analytic",
                         model="baseline" if baseline else "superposition",
                         scheme="none" if baseline else scheme_label(cfg),
                         association=_assoc_name(cfg))


def mc_curve(cfg, plan):
    return simulate_coverage(plan, cfg, derive_constants(cfg))


# -- output ---------------------------------------------------------------------

def _emit(curves, v, title, out=None):
    out = out if out is not None else v["out"]
    fmt = v["format"]
    if out is None:
        if fmt != "csv":
            raise ParameterError("--format svg/both needs --out")
        sys.stdout.write(curves_to_csv(curves))
        return []
    out = Path(out)
    written = []
    if fmt in ("csv", "both"):
        path = out if fmt == "csv" else out.with_suffix(".csv")
        write_curves_csv(path, curves)
        written.append(path)
    if fmt in ("svg", "both"):
        path = out if fmt == "svg" else out.with_suffix(".svg")
        write_svg(path, [(title, curves)])
        written.append(path)
    return written


# -- commands -------------------------------------------------------------------

def cmd_constants(v):
    cfg = network_from_settings(v)
    c = derive_constants(cfg)
    for name in ("gamma", "delta", "alpha", "xi", "zeta"):
        print(f"{name}={getattr(c, name):.4f}")
    return 0


def cmd_analytic(v):
    cfg = network_from_settings(v)
    curve = analytic_curve(cfg, thresholds_from_settings(v))
    _emit([curve], v, f"analytic, beta={cfg.beta:g}")
    return 0


def cmd_simulate(v):
    cfg = network_from_settings(v)
    model = v["model"] or "nn"
    curve = mc_curve(cfg, plan_from_settings(v, model, thresholds_from_settings(v)))
    for w in curve.metadata.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    _emit([curve], v, f"{model} Monte Carlo, beta={cfg.beta:g}")
    return 0


def cmd_compare(v):
    cfg = network_from_settings(v)
    T = thresholds_from_settings(v)
    model = v["model"] or "superposition"
    ana = analytic_curve(cfg, T)
    mc = mc_curve(cfg, plan_from_settings(v, model, T))
    base = analytic_curve(cfg, T, baseline=True)
    gap = np.abs(ana.values - mc.values)
    outside = int(np.sum(~mc.covers(ana.values)))
    k = int(np.argmax(gap))
    print(f"max |analytic - mc| = {gap[k]:.4f} at T = {mc.t_db[k]:g} dB "
          f"(CI half-width there {mc.half_width[k]:.4f}); "
          f"analytic outside the 95% CI at {outside} of {T.size} thresholds",
          file=sys.stderr if v["out"] is None else sys.stdout)
    _emit([ana, mc, base], v, f"{scheme_label(cfg)}, {_assoc_name(cfg)}, beta={cfg.beta:g}")
    return 0


def figure_recipes(v):
    """The six figure recipes as ``(name, [(panel title, [curve factories])])``."""
    T = thresholds_from_settings(v)
    base_cfg = network_from_settings({**v, "scheme": "nsc"})

    def cfg_for(beta, scheme, assoc, interferer=None):
        a = FixedTransmitter(v["r0"]) if assoc == "fixed" else ClosestCluster()
        return replace(base_cfg, beta=beta, scheme=scheme, association=a,
                       interferer_scheme=interferer)

    def mc(model, cfg):
        return lambda: mc_curve(cfg, plan_from_settings(v, model, T))

    def an(cfg, baseline=False):
        return lambda: analytic_curve(cfg, T, baseline=baseline)

    schemes = [NSC(), Off(v["q"] if v["q"] is not None else 0.5), Max()]
    off_half = Off(0.5)
    recipes = []
    closeness = []
    for assoc in ("fixed", "closest"):
        items = []
        for s in schemes:
            items += [mc("nn", cfg_for(3.0, s, assoc)), an(cfg_for(3.0, s, assoc))]
        closeness.append((f"NN vs superposition, {assoc}, beta=3", items))
    recipes.append(("fig3_closeness_beta3", closeness))

    gains = []
    fixed_items = [mc("nn", cfg_for(3.0, s, "fixed")) for s in schemes]
    fixed_items += [mc("baseline", cfg_for(3.0, NSC(), "fixed")),
                    an(cfg_for(3.0, NSC(), "fixed"), baseline=True)]
    gains.append(("cooperation gains, fixed, beta=3", fixed_items))
    closest_items = [mc("nn", cfg_for(3.0, NSC(), "closest")),
                     mc("nn", cfg_for(3.0, Max(), "closest", off_half)),
                     mc("baseline", cfg_for(3.0, NSC(), "closest")),
                     an(cfg_for(3.0, NSC(), "closest"), baseline=True)]
    gains.append(("cooperation gains, closest, beta=3", closest_items))
    recipes.append(("fig4_gains_beta3", gains))

    for assoc in ("fixed", "closest"):
        for beta in (2.5, 4.0):
            items = []
            for s in schemes:
                items += [an(cfg_for(beta, s, assoc)), mc("superposition", cfg_for(beta, s, assoc))]
            recipes.append((f"validation_{assoc}_beta{beta:g}",
                            [(f"superposition analytic vs MC, {assoc}, beta={beta:g}", items)]))
    return recipes


def cmd_figures(v):
    out = Path(v["out"] or "figures")
    out.mkdir(parents=True, exist_ok=True)
    for name, panels in figure_recipes(v):
        built = [(title, [f() for f in items]) for title, items in panels]
        write_curves_csv(out / f"{name}.csv", [c for _, cs in built for c in cs])
        (out / f"{name}.svg").write_text(render_svg(built))
        print(f"wrote {out / name}.csv and .svg")
    return 0


COMMANDS = {
    "constants": cmd_constants,
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "figures": cmd_figures,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        v = resolve_settings(args)
        if v["t_steps"] < 2:
            raise ParameterError("--t-steps must be >= 2")
        return COMMANDS[args.command](v)
    except (ParameterError, UnsupportedSchemeError, QuadratureError, ValueError,
            OSError) as exc:
        print(f"nncoop: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
