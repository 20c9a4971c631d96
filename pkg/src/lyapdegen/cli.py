"""Command line interface: ``lyapdegen push|escape|cert|sample|family``."""
from __future__ import annotations

import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import click

from .certs import bound_at, build_certificate, sample_unit, strong_bound
from .escape import ExactOrbit, _hplus_srat_form, escape_beta, escape_complex, escape_inf, parse_place
from .families import load_family
from .forms import BiForm, deg_s
from .harness import ExperimentConfig, emit_report, run_family
from .pushforward import jacobian
from .scalars import Place, SPoly


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise click.FileError(path, str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise click.BadParameter(f"{path}: invalid JSON ({exc})") from exc


def _parse_t(text: str):
    text = text.strip().replace(" ", "")
    try:
        return Fraction(text)
    except ValueError:
        return complex(text.replace("i", "j"))


def _dump(obj) -> None:
    click.echo(json.dumps(obj, indent=2))


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Lyapunov exponents of degenerating families of rational maps."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, stream=sys.stderr)


@main.command()
@click.option("--family", "family_path", required=True, help="Family JSON ({\"P\",\"Q\"} or {\"preset\"}).")
@click.option("--form", "form_path", required=True, help="Form JSON.")
@click.option("--iters", default=1, show_default=True, type=click.IntRange(0))
@click.option("--stats", is_flag=True, help="Emit deg_X, deg_s, hplus per iterate as CSV.")
def push(family_path, form_path, iters, stats):
    """Exact iterated pushforwards F_*^k(form)."""
    F = load_family(_read_json(family_path))
    phi = BiForm.from_json(_read_json(form_path))
    orbit = ExactOrbit.start(F, phi).extend(iters)
    if stats:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["k", "deg_X", "deg_s", "hplus"])
        for k in range(iters + 1):
            it = orbit.iterate(k)
            w.writerow([k, it.degree, deg_s(it), repr(_hplus_srat_form(it))])
        return
    _dump([orbit.iterate(k).to_json() for k in range(iters + 1)])


@main.command()
@click.option("--family", "family_path", required=True)
@click.option("--place", required=True, help="inf | beta:<poly> | t:<re>,<im>")
@click.option("--iters", default=None, type=click.IntRange(0), help="Depth (default 6 exact, 8 complex).")
@click.option("--form", "form_path", default=None, help="Form JSON (default: the Jacobian).")
def escape(family_path, place, iters, form_path):
    """Escape rate of a form (default det DF) at a place."""
    F = load_family(_read_json(family_path))
    phi = BiForm.from_json(_read_json(form_path)) if form_path else jacobian(F)
    where = parse_place(place)
    if isinstance(where, Place) and where.kind == Place.S_INF:
        _dump(escape_inf(F, phi, 6 if iters is None else iters).to_json())
    elif isinstance(where, Place):
        est, ledger = escape_beta(F, phi, where.m, 6 if iters is None else iters)
        out = est.to_json()
        out["contents"] = [str(a) for a in ledger.alphas]
        out["content_roots_ok"] = ledger.ok()
        _dump(out)
    else:
        _dump(escape_complex(F, phi, where, 8 if iters is None else iters).to_json())


@main.command()
@click.option("--form", "form_path", required=True)
@click.option("--strong", is_flag=True, help="Split off the content first.")
@click.option("--at", "at", default=None, help="Specialization t (rational like 3/2 or complex like 1+2j).")
def cert(form_path, strong, at):
    """Bezout certificate and specialization interval."""
    psi = BiForm.from_json(_read_json(form_path))
    t = _parse_t(at) if at is not None else None
    try:
        if strong:
            interval, c = strong_bound(psi, t if t is not None else 0)
            out = {"certificate": c.to_json() if c else None}
            if t is not None:
                out["interval"] = interval.to_json()
        else:
            c = build_certificate(psi)
            out = {"certificate": c.to_json()}
            if t is not None:
                out["interval"] = bound_at(c, psi, t).to_json()
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    _dump(out)


@main.command()
@click.option("--polys", "polys_path", required=True, help="JSON list of polynomials (lists of \"num/den\").")
@click.option("--place", default="arch", show_default=True, help="arch | p:<prime>")
def sample(polys_path, place):
    """Unit t keeping every |q_i(t)| within kappa of ||q_i||."""
    qs = [SPoly.from_json(q) for q in _read_json(polys_path)]
    try:
        _dump(sample_unit(qs, place).to_json())
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.option("--config", "config_path", required=True)
@click.option("--out", "out_dir", default=None, help="Report directory (overrides config output).")
def family(config_path, out_dir):
    """Degeneration sweep; exit code 0 iff every pass flag holds."""
    cfg = ExperimentConfig.from_json(_read_json(config_path))
    report = run_family(cfg)
    target = out_dir or cfg.output or "report"
    paths = emit_report(report, target)
    summary = {k: v for k, v in report.summary.items() if k != "L_eta_partials"}
    summary["files"] = [str(p) for p in paths]
    _dump(summary)
    sys.exit(0 if report.summary["all_pass"] else 1)


if __name__ == "__main__":
    main()
