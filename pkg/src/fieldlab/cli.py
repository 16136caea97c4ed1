"""Command-line interface.

Usage:
    fieldlab check                        # run every law check, JSON report
    fieldlab check --m-uv 1 --backend dense
    fieldlab propagator --out prop.csv    # both routes for every (dx, dt)
    fieldlab dispersion --m-ir 5 --mass 4/5
    fieldlab commutators --out ccr.csv    # equal-time commutator matrices
    fieldlab export --operator phi --site 0

Every lattice option can also be given in a flat YAML file passed with
``--config``; flags override file values.

Exit codes: 0 all checks pass, 1 a check failed, 2 structural failure,
64 usage or configuration error.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click
import yaml

from . import control, dynamics, fock, lawcheck
from .dispersion import dispersion_table
from .errors import ConfigError, StructuralFailure
from .fock import DENSE_CAP, FockSpace, LOWER, RAISE
from .lattice import LatticeConfig, all_momenta, all_positions, parse_fraction
from .linalg import comm, to_coo_text
from .report import dumps

__all__ = ["cli", "main", "EXIT_OK", "EXIT_FAIL", "EXIT_STRUCTURAL", "EXIT_USAGE"]

EXIT_OK, EXIT_FAIL, EXIT_STRUCTURAL, EXIT_USAGE = 0, 1, 2, 64

KEYS = ("n", "m_ir", "m_uv", "mass", "tau", "tol", "backend", "n_max", "max_dim", "out", "format")
DEFAULTS = {
    "n": 1,
    "m_ir": 3,
    "m_uv": 3,
    "mass": "1",
    "tau": 2,
    "tol": 1e-9,
    "backend": "sparse",
    "n_max": 3,
    "max_dim": DENSE_CAP,
    "out": None,
    "format": None,
}


def load_config_file(path) -> dict:
    """Read a flat key-value YAML document; keys may use dashes or underscores."""
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must be a flat mapping")
    out = {}
    for key, value in data.items():
        k = str(key).replace("-", "_")
        if k not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(value, (dict, list)):
            raise ConfigError(f"config key {key!r} must be a scalar")
        if k == "mass" and isinstance(value, float):
            raise ConfigError("mass must be written as a 'num/den' string, not a float")
        out[k] = value
    return out


def resolve(config_path, flags: dict) -> dict:
    """Defaults, then the config file, then explicit flags."""
    opts = dict(DEFAULTS)
    if config_path:
        opts.update(load_config_file(config_path))
    opts.update({k: v for k, v in flags.items() if v is not None})
    return opts


def build(opts: dict):
    """``(LatticeConfig, FockSpace factory)`` from resolved options."""
    try:
        cfg = LatticeConfig(
            n=int(opts["n"]),
            m_ir=int(opts["m_ir"]),
            m_uv=int(opts["m_uv"]),
            mass=parse_fraction(str(opts["mass"])),
            tau=int(opts["tau"]),
            tol=float(opts["tol"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    backend = str(opts["backend"])
    if backend not in ("dense", "sparse"):
        raise ConfigError(f"backend must be dense or sparse, got {backend!r}")
    max_dim = int(opts["max_dim"])
    if backend == "dense" and (cfg.tau + 1) ** cfg.size > max_dim:
        raise ConfigError(
            f"dense Fock dimension {(cfg.tau + 1) ** cfg.size} exceeds the cap {max_dim}; use --backend sparse"
        )
    return cfg, backend, int(opts["n_max"]), max_dim


def _field(cfg, backend, n_max, max_dim):
    return FockSpace(cfg, backend, n_max=n_max if backend == "sparse" else None, max_dim=max_dim)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def lattice_options(f):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="Flat YAML config file."),
        click.option("--n", type=int, help="Spatial dimension."),
        click.option("--m-ir", "m_ir", type=int, help="Odd infrared factor."),
        click.option("--m-uv", "m_uv", type=int, help="Odd ultraviolet factor."),
        click.option("--tau", type=int, help="Oscillator cutoff, at least 1."),
        click.option("--mass", type=str, help="Mass as 'num/den' on the 1/m_ir grid."),
        click.option("--backend", type=click.Choice(["dense", "sparse"]), help="Fock backend."),
        click.option("--n-max", "n_max", type=int, help="Total-occupation cutoff for the sparse backend."),
        click.option("--max-dim", "max_dim", type=int, help="Largest dense Fock dimension allowed."),
        click.option("--tol", type=float, help="Absolute tolerance."),
        click.option("--out", type=click.Path(dir_okay=False), help="Output file (default stdout)."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Finite-lattice scalar field: law checks, propagators and tables."""


@cli.command()
@lattice_options
@click.option("--format", "format", type=click.Choice(["json", "csv"]), help="Report format (default json).")
def check(config_path, **flags):
    """Run every law check and write the report."""
    opts = resolve(config_path, flags)
    cfg, backend, n_max, max_dim = build(opts)
    reports = lawcheck.run_all(cfg, backend=backend, n_max=n_max, max_dim=max_dim)
    if (opts["format"] or "json") == "json":
        text = dumps(reports)
    else:
        rows = [
            (r.name, r.anchor, repr(r.deviation), r.tol, r.passed, _c(r.scalar), _c(r.tau_scalar), r.backend, json.dumps(r.config))
            for r in reports
        ]
        text = _csv(["name", "anchor", "deviation", "tol", "pass", "scalar", "tau_scalar", "backend", "config"], rows)
    _emit(text, opts["out"])
    for r in reports:
        if not lawcheck.outcome_ok(r):
            click.echo(r.line(), err=True)
    if lawcheck.structural(reports):
        return EXIT_STRUCTURAL
    return EXIT_OK if lawcheck.all_ok(reports) else EXIT_FAIL


def _c(z):
    return "" if z is None else repr(complex(z))


@cli.command()
@lattice_options
@click.option("--dx", multiple=True, type=int, help="Spatial offsets (1D index); default all.")
@click.option("--dt", multiple=True, type=int, help="Time offsets (index); default all.")
def propagator(config_path, dx, dt, **flags):
    """Propagator by the commutator route and the direct sum."""
    opts = resolve(config_path, flags)
    cfg, backend, n_max, max_dim = build(opts)
    if cfg.n != 1 and dx:
        raise ConfigError("--dx takes 1D offsets; omit it for n > 1")
    fs = _field(cfg, backend, n_max, max_dim)
    origin = all_positions(cfg)[cfg.size // 2]
    t0 = dynamics.time_point(cfg, 0)
    xs = [dynamics._as_position(cfg, d) for d in dx] if dx else all_positions(cfg)
    ts = [dynamics.time_point(cfg, d) for d in dt] if dt else dynamics.all_times(cfg)
    rows = []
    structural = False
    for x in xs:
        for t in ts:
            r = dynamics.propagator_check(fs, origin + x, t, origin, t0)
            structural |= not r.details["residue_passed"]
            gap = r.details["route_gap"]
            label = " ".join(str(c) for c in x.j)
            for route, val in (("commutator", r.scalar), ("direct", r.details["direct"])):
                rows.append((label, t.j[0], repr(float(val.real)), repr(float(val.imag)), route, repr(float(gap))))
    _emit(_csv(["dx", "dt", "re", "im", "route", "deviation"], rows), opts["out"])
    if structural:
        return EXIT_STRUCTURAL
    worst = max(float(r[5]) for r in rows)
    return EXIT_OK if worst <= cfg.tol else EXIT_FAIL


@cli.command()
@lattice_options
@click.option("--histogram-out", type=click.Path(dir_okay=False), help="Also write the degeneracy histogram here.")
def dispersion(config_path, histogram_out, **flags):
    """Quantised dispersion table with degeneracy counts."""
    opts = resolve(config_path, flags)
    cfg, *_ = build(opts)
    n = cfg.n
    header = [f"k{i}" for i in range(n)] + [f"p{i}" for i in range(n)] + ["E_p", "degeneracy"]
    rows = [[*k, *(str(v) for v in p), str(E), deg] for k, p, E, deg in dynamics.dispersion_rows(cfg)]
    _emit(_csv(header, rows), opts["out"])
    if histogram_out:
        levels = dispersion_table(cfg, allow_zero_modes=True).levels()
        Path(histogram_out).write_text(_csv(["E", "count"], [(str(e), c) for e, c in levels.items()]))
    return EXIT_OK


@cli.command()
@lattice_options
def commutators(config_path, **flags):
    """Nonzero entries of the equal-time commutator matrices."""
    opts = resolve(config_path, flags)
    cfg, backend, n_max, max_dim = build(opts)
    fs = _field(cfg, backend, n_max, max_dim)
    rows = []

    def dump(label, left, right, C):
        coo = C.sparse().tocoo()
        for t in sorted(range(coo.nnz), key=lambda i: (coo.row[i], coo.col[i])):
            v = coo.data[t]
            if v != 0:
                rows.append((label, left, right, int(coo.row[t]), int(coo.col[t]), repr(float(v.real)), repr(float(v.imag))))

    ps, xs = all_momenta(cfg), all_positions(cfg)
    for p in ps:
        for q in ps:
            C = comm(fock.rescaled_ladder(fs, p, LOWER), fock.rescaled_ladder(fs, q, RAISE))
            dump("[a,a_dag]", " ".join(map(str, p.k)), " ".join(map(str, q.k)), C)
    fields = {"phi": [fock.field_phi(fs, x) for x in xs], "pi": [fock.field_pi(fs, x) for x in xs]}
    for a, b in (("phi", "phi"), ("pi", "pi"), ("phi", "pi")):
        for i, x in enumerate(xs):
            for j, y in enumerate(xs):
                dump(f"[{a},{b}]", " ".join(map(str, x.j)), " ".join(map(str, y.j)), comm(fields[a][i], fields[b][j]))
    _emit(_csv(["operator", "left", "right", "row", "col", "re", "im"], rows), opts["out"])
    return EXIT_OK


OPERATORS = ("phi", "pi", "a", "a_dag", "N", "H", "gamma_dag", "U")


@cli.command()
@lattice_options
@click.option("--operator", "name", type=click.Choice(OPERATORS), default="phi", show_default=True)
@click.option("--site", type=int, default=0, show_default=True, help="Lattice index of the position or momentum.")
def export(config_path, name, site, **flags):
    """Coordinate-list dump of one operator."""
    opts = resolve(config_path, flags)
    cfg, backend, n_max, max_dim = build(opts)
    if not 0 <= site < cfg.size:
        raise ConfigError(f"--site must be in 0..{cfg.size - 1}")
    if name == "U":
        op = dynamics.coherent_module(cfg)
    else:
        fs = _field(cfg, backend, n_max, max_dim)
        p, x = all_momenta(cfg)[site], all_positions(cfg)[site]
        op = {
            "phi": lambda: fock.field_phi(fs, x),
            "pi": lambda: fock.field_pi(fs, x),
            "a": lambda: fock.rescaled_ladder(fs, p, LOWER),
            "a_dag": lambda: fock.rescaled_ladder(fs, p, RAISE),
            "N": lambda: fock.number_operator(fs),
            "H": lambda: fock.hamiltonian(fs),
            "gamma_dag": lambda: control.build_gamma_dagger(fs).op,
        }[name]()
    _emit(to_coo_text(op, name), opts["out"])
    return EXIT_OK


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="fieldlab", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except StructuralFailure as exc:
        click.echo(f"structural failure: {exc}", err=True)
        return EXIT_STRUCTURAL
    return int(rv or 0)


if __name__ == "__main__":
    sys.exit(main())
