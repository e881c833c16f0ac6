"""Command-line front end: wires configurations to computations, emits CSV/JSON.

Subcommands: ``spectrum``, ``scan``, ``evolve``, ``verify``. Runs are driven
by a flat INI-style configuration file; every output starts with ``#``
metadata lines (including the fully resolved configuration) followed by a
header row, so identical inputs produce byte-identical files.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 numerical
error, 4 stability-guard violation.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .atoms import (
    AtomConfiguration,
    collective_model,
    excitation_number,
    line_config,
    reduced_embedding_report,
    reduced_matrix,
    ring_config,
    square_config,
)
from .errors import ConfigError, DFSLabError, NumericalError, StabilityError
from .evolution import evolve, fit_decay_rate
from .independence import dicke_convergence, gram_rank_check, min_nontrivial_eigenvalue
from .lindblad import find_ipdfs, pure_state
from .operators import N_MAX

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_STABILITY = 4

#: Reduced-matrix eigenvalues below this are treated as a protected state
#: in the verify report (strict positivity witness).
WITNESS_FLOOR = 1e-12

SCAN_WORKERS = 8


def _fmt(x) -> str:
    """Serialize one value: 12 significant digits, lowercase exponent."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.11e}"


@dataclass
class RunConfig:
    """Fully resolved run description parsed from the INI file."""

    geometry: str
    n: int = 0
    spacing: float = 0.0
    side: float = 0.0
    radius: float = 0.0
    orientation: str = ""
    dicke: bool = False
    gamma0: float = 1.0
    positions: np.ndarray | None = None
    dipole: np.ndarray | None = None
    scan: tuple | None = None      # (parameter, start, stop, steps)
    evolve: dict | None = None     # initial, t_final, dt
    out_path: str | None = None
    out_format: str = "csv"

    def describe(self) -> list[tuple[str, str]]:
        """Resolved key/value pairs, fixed order, for the output header."""
        items = [("geometry", self.geometry)]
        if self.geometry == "line":
            items += [("n", str(self.n)), ("spacing", _fmt(self.spacing)),
                      ("orientation", self.orientation)]
        elif self.geometry == "square":
            items += [("side", _fmt(self.side))]
        elif self.geometry == "ring":
            items += [("n", str(self.n)), ("radius", _fmt(self.radius)),
                      ("orientation", self.orientation)]
        else:
            pos = "; ".join(" ".join(_fmt(c) for c in row) for row in self.positions)
            dip = " ".join(_fmt(c) for c in self.dipole)
            items += [("positions", pos), ("dipole", dip)]
        items += [("dicke", str(self.dicke).lower()), ("gamma0", _fmt(self.gamma0))]
        if self.scan:
            name, start, stop, steps = self.scan
            items += [("scan.parameter", name), ("scan.start", _fmt(start)),
                      ("scan.stop", _fmt(stop)), ("scan.steps", str(steps))]
        if self.evolve:
            items += [("evolve.initial", self.evolve["initial"]),
                      ("evolve.t_final", _fmt(self.evolve["t_final"])),
                      ("evolve.dt", _fmt(self.evolve["dt"]))]
        return items


def _parse_vector(text: str, name: str) -> np.ndarray:
    try:
        vec = np.array([float(t) for t in text.split()], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {name}: {exc}") from exc
    if vec.shape != (3,):
        raise ConfigError(f"{name} must have exactly three components")
    return vec


def load_config(path: str) -> RunConfig:
    """Parse and validate the INI run configuration."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    if "geometry" not in parser:
        raise ConfigError("missing [geometry] section")
    geo = parser["geometry"]
    gtype = geo.get("type", "").strip()
    if gtype not in ("line", "square", "ring", "custom"):
        raise ConfigError(f"geometry type must be line|square|ring|custom, got {gtype!r}")

    cfg = RunConfig(geometry=gtype)
    try:
        cfg.dicke = geo.getboolean("dicke", fallback=False)
        cfg.gamma0 = geo.getfloat("gamma0", fallback=1.0)
        if gtype == "line":
            cfg.n = geo.getint("n")
            cfg.spacing = geo.getfloat("spacing")
            cfg.orientation = geo.get("orientation", "axial").strip()
        elif gtype == "square":
            cfg.side = geo.getfloat("side")
        elif gtype == "ring":
            cfg.n = geo.getint("n")
            cfg.radius = geo.getfloat("radius")
            cfg.orientation = geo.get("orientation", "normal").strip()
        else:
            rows = [r.strip() for r in geo.get("positions", "").split(";") if r.strip()]
            if not rows:
                raise ConfigError("custom geometry requires positions")
            cfg.positions = np.array([_parse_vector(r, "position") for r in rows])
            cfg.dipole = _parse_vector(geo.get("dipole", ""), "dipole")
    except (configparser.NoOptionError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad [geometry] section: {exc}") from exc

    if gtype in ("line", "square", "ring"):
        length = {"line": cfg.spacing, "square": cfg.side, "ring": cfg.radius}[gtype]
        if not length > 0.0:
            raise ConfigError("geometry lengths must be positive")

    if "scan" in parser:
        sc = parser["scan"]
        try:
            name = sc.get("parameter").strip()
            start = sc.getfloat("start")
            stop = sc.getfloat("stop")
            steps = sc.getint("steps")
        except (ValueError, TypeError, AttributeError) as exc:
            raise ConfigError(f"bad [scan] section: {exc}") from exc
        if steps < 2:
            raise ConfigError("scan steps must be >= 2")
        if not start < stop:
            raise ConfigError("scan start must be < stop")
        allowed = {"line": ("spacing", "n"), "square": ("side",), "ring": ("radius", "n")}
        if gtype == "custom" or name not in allowed[gtype]:
            raise ConfigError(f"cannot scan {name!r} for geometry {gtype!r}")
        if name != "n" and not start > 0.0:
            raise ConfigError("scanned lengths must be positive")
        cfg.scan = (name, start, stop, steps)

    if "evolve" in parser:
        ev = parser["evolve"]
        try:
            cfg.evolve = {
                "initial": ev.get("initial", "ground").strip(),
                "t_final": ev.getfloat("t_final"),
                "dt": ev.getfloat("dt", fallback=1e-3),
            }
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad [evolve] section: {exc}") from exc
        if not cfg.evolve["t_final"] > 0.0 or not cfg.evolve["dt"] > 0.0:
            raise ConfigError("t_final and dt must be positive")

    if "output" in parser:
        out = parser["output"]
        cfg.out_path = out.get("path", fallback=None)
        cfg.out_format = out.get("format", fallback="csv").strip()
        if cfg.out_format not in ("csv", "json"):
            raise ConfigError("output format must be csv or json")
    return cfg


def build_configuration(cfg: RunConfig) -> AtomConfiguration:
    try:
        if cfg.geometry == "line":
            return line_config(cfg.n, cfg.spacing, cfg.orientation,
                               gamma0=cfg.gamma0, dicke=cfg.dicke)
        if cfg.geometry == "square":
            return square_config(cfg.side, gamma0=cfg.gamma0, dicke=cfg.dicke)
        if cfg.geometry == "ring":
            return ring_config(cfg.n, cfg.radius, cfg.orientation,
                               gamma0=cfg.gamma0, dicke=cfg.dicke)
        return AtomConfiguration(cfg.positions, cfg.dipole,
                                 gamma0=cfg.gamma0, dicke=cfg.dicke)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def raw_positions(cfg: RunConfig) -> np.ndarray:
    """Geometry positions without configuration validation (duplicates allowed)."""
    if cfg.geometry == "custom":
        return np.asarray(cfg.positions, dtype=float)
    if cfg.geometry == "line":
        return np.array([(0.0, 0.0, i * cfg.spacing) for i in range(cfg.n)])
    if cfg.geometry == "square":
        s = cfg.side
        return np.array([(0.0, 0.0, 0.0), (s, 0.0, 0.0), (s, s, 0.0), (0.0, s, 0.0)])
    angles = 2.0 * np.pi * np.arange(cfg.n) / cfg.n
    return np.column_stack([cfg.radius * np.cos(angles), cfg.radius * np.sin(angles),
                            np.zeros(cfg.n)])


@dataclass
class Report:
    """Assembled output document (CSV with # metadata, or its JSON mirror)."""

    command: str
    config_items: list[tuple[str, str]]
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    metadata: list[tuple[str, str]] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [f"# dfslab {self.command} v{__version__}"]
        resolved = " ".join(f"{k}={v}" for k, v in self.config_items)
        lines.append(f"# config: {resolved}")
        for key, value in self.metadata:
            lines.append(f"# {key}: {value}")
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_fmt(x) for x in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "version": __version__,
            "config": dict(self.config_items),
            "metadata": dict(self.metadata),
            "columns": self.columns,
            "rows": [[x if isinstance(x, str) else float(_fmt(x)) for x in row]
                     for row in self.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def write(self, path: str | None, fmt: str) -> None:
        text = self.to_json() if fmt == "json" else self.to_csv()
        if path is None or path == "-":
            sys.stdout.write(text)
        else:
            with open(path, "w") as fh:
                fh.write(text)


def cmd_spectrum(cfg: RunConfig, full: bool, tol: float) -> tuple[int, Report]:
    config = build_configuration(cfg)
    reduced = reduced_matrix(config)
    eig = np.linalg.eigvalsh(reduced.entries)
    report = Report("spectrum", cfg.describe(), ["kind", "index", "value"])
    for i, v in enumerate(eig):
        report.rows.append(["reduced", i, config.gamma0 * v])
    if full:
        if config.n > N_MAX:
            raise NumericalError(f"full spectrum needs N <= {N_MAX}, got {config.n}")
        from .atoms import full_gamma

        for i, v in enumerate(np.linalg.eigvalsh(full_gamma(config))):
            report.rows.append(["full", i, v])
    return EXIT_OK, report


def _scan_grid(cfg: RunConfig) -> list:
    name, start, stop, steps = cfg.scan
    if name == "n":
        values = np.unique(np.rint(np.linspace(start, stop, steps)).astype(int))
        return [int(v) for v in values if v >= (2 if cfg.geometry == "ring" else 1)]
    return [float(v) for v in np.linspace(start, stop, steps)]


def cmd_scan(cfg: RunConfig, full: bool, tol: float) -> tuple[int, Report]:
    if cfg.scan is None:
        raise ConfigError("scan command requires a [scan] section")
    name, _, _, _ = cfg.scan
    grid = _scan_grid(cfg)

    def at_value(value):
        sub_kwargs = {
            "n": cfg.n, "spacing": cfg.spacing, "side": cfg.side,
            "radius": cfg.radius,
        }
        sub_kwargs[name] = value
        sub = RunConfig(geometry=cfg.geometry, orientation=cfg.orientation,
                        dicke=cfg.dicke, gamma0=cfg.gamma0, **sub_kwargs)
        config = build_configuration(sub)
        return cfg.gamma0 * np.linalg.eigvalsh(reduced_matrix(config).entries)

    with ThreadPoolExecutor(max_workers=SCAN_WORKERS) as pool:
        results = list(pool.map(at_value, grid))

    if name == "n":
        columns = [name, "eigenvalues"]
    else:
        columns = [name] + [f"eig_{i + 1}" for i in range(results[0].size)]
    report = Report("scan", cfg.describe(), columns)
    for value, eig in zip(grid, results):
        report.rows.append([value] + [float(v) for v in eig])
    return EXIT_OK, report


def _initial_state(config: AtomConfiguration, spec_text: str) -> np.ndarray:
    n = config.n
    dim = 1 << n
    bits = [1 << (n - j) for j in range(1, n + 1)]
    psi = np.zeros(dim, dtype=complex)
    if spec_text == "ground":
        psi[0] = 1.0
    elif spec_text == "excited":
        psi[dim - 1] = 1.0
    elif spec_text == "symmetric":
        for b in bits:
            psi[b] = 1.0 / np.sqrt(n)
    elif spec_text == "antisymmetric":
        if n != 2:
            raise ConfigError("antisymmetric initial state requires exactly 2 atoms")
        psi[bits[0]] = 1.0 / np.sqrt(2)
        psi[bits[1]] = -1.0 / np.sqrt(2)
    elif spec_text in ("subradiant", "superradiant"):
        w, v = np.linalg.eigh(reduced_matrix(config).entries)
        col = v[:, 0] if spec_text == "subradiant" else v[:, -1]
        for l in range(n):
            psi[bits[l]] = col[l]
    elif spec_text.startswith("site:"):
        idx = int(spec_text.split(":", 1)[1])
        if not 1 <= idx <= n:
            raise ConfigError(f"site index {idx} outside 1..{n}")
        psi[bits[idx - 1]] = 1.0
    else:
        raise ConfigError(f"unknown initial state {spec_text!r}")
    return psi


def cmd_evolve(cfg: RunConfig, full: bool, tol: float) -> tuple[int, Report]:
    if cfg.evolve is None:
        raise ConfigError("evolve command requires an [evolve] section")
    config = build_configuration(cfg)
    if config.n > N_MAX:
        raise ConfigError(f"evolution needs N <= {N_MAX}, got {config.n}")
    model = collective_model(config)
    psi = _initial_state(config, cfg.evolve["initial"])
    result = evolve(
        model,
        pure_state(psi),
        t_final=cfg.evolve["t_final"],
        dt=cfg.evolve["dt"],
        observable=excitation_number(config.n).astype(complex),
    )
    report = Report("evolve", cfg.describe(), ["time", "excited_population", "purity"])
    report.metadata.append(("trace_drift", _fmt(result.trace_drift)))
    if result.excited_population.max() < 1e-12:
        report.metadata.append(("fitted_rate", _fmt(0.0)))
    else:
        try:
            report.metadata.append(("fitted_rate", _fmt(fit_decay_rate(result))))
        except ValueError:
            pass  # no clean exponential window; rate omitted
    for t, pop, pur in zip(result.times, result.excited_population, result.purity):
        report.rows.append([t, pop, pur])
    return EXIT_OK, report


def cmd_verify(cfg: RunConfig, full: bool, tol: float) -> tuple[int, Report]:
    report = Report("verify", cfg.describe(),
                    ["check", "detail", "value", "threshold", "status"])
    failures = 0

    def add(check: str, detail: str, value, threshold, passed: bool | None) -> None:
        nonlocal failures
        status = "info" if passed is None else ("pass" if passed else "fail")
        if passed is False:
            failures += 1
        report.rows.append([check, detail, value, threshold, status])

    positions = raw_positions(cfg)
    n_distinct = len({tuple(np.round(p, 15)) for p in positions})
    gram = gram_rank_check(positions)
    sv = gram.singular_values
    add("gram_rank", "rank_at_tol", gram.rank_at_tol, n_distinct,
        gram.rank_at_tol == n_distinct)
    add("gram_rank", "sv_ratio", float(sv[-1] / sv[0]), gram.tol, None)

    try:
        config = build_configuration(cfg)
    except ConfigError as exc:
        add("configuration", str(exc), "", "", False)
        add("min_eigenvalue", "rejected: configuration invalid", "", WITNESS_FLOOR, False)
        return (EXIT_VERIFY_FAILED, report)

    if config.n <= N_MAX:
        emb = reduced_embedding_report(config, tol=tol)
        add("spectrum_embedding", "max_single_excitation_distance",
            float(emb.single_excitation_distances.max()), tol,
            emb.single_excitation_distances.max() <= tol)
        add("spectrum_embedding", "max_complement_distance",
            float(emb.complement_distances.max()), tol,
            emb.complement_distances.max() <= tol)
        add("spectrum_embedding", "max_eigenvector_residual",
            float(max(emb.single_excitation_residuals.max(),
                      emb.complement_residuals.max())), tol,
            max(emb.single_excitation_residuals.max(),
                emb.complement_residuals.max()) <= tol)
    else:
        add("spectrum_embedding", f"skipped: N > {N_MAX}", "", "", None)

    if config.dicke:
        add("min_eigenvalue", "skipped: co-located configuration", "", "", None)
        if config.n <= N_MAX:
            kernel = find_ipdfs(collective_model(config))
            add("ipdfs_kernel", "kernel_dim", kernel.kernel_dim, ">=2",
                kernel.kernel_dim >= 2)
    else:
        witness = min_nontrivial_eigenvalue(config)
        add("min_eigenvalue", "smallest_reduced_eigenvalue", witness, WITNESS_FLOOR,
            witness > WITNESS_FLOOR)

        seps = [np.linalg.norm(positions[j] - positions[k])
                for j in range(len(positions)) for k in range(j + 1, len(positions))]
        if seps:
            start = min(1.0, 0.2 / max(seps))  # start inside the monotone regime
            centroid = positions.mean(axis=0)

            def shrunk(f: float) -> AtomConfiguration:
                return AtomConfiguration(centroid + f * (positions - centroid),
                                         config.dipole, gamma0=config.gamma0)

            # Shrink by halves but stop above the eigensolver noise floor:
            # deeper values are indistinguishable from zero in double precision.
            factors: list[float] = [start]
            while len(factors) < 6:
                if dicke_convergence(shrunk, [factors[-1]])[0, 1] < 1e-9:
                    break
                factors.append(factors[-1] / 2.0)
            table = dicke_convergence(shrunk, factors)
            values = table[:, 1]
            add("dicke_convergence", "all_positive", float(values.min()), 0.0,
                bool(values.min() > 0.0))
            add("dicke_convergence", "monotone_decreasing",
                float(values[-1] / values[0]), 1.0,
                bool(np.all(np.diff(values) < 0.0)))
            for f, v in table:
                add("dicke_convergence", f"scale_{_fmt(f)}", v, "", None)
        else:
            add("dicke_convergence", "skipped: single atom", "", "", None)

    return (EXIT_OK if failures == 0 else EXIT_VERIFY_FAILED, report)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "scan": cmd_scan,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfslab",
        description="Collective decay lab: spectra, scans, evolution, verification.",
    )
    parser.add_argument("--version", action="version", version=f"dfslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("spectrum", "reduced (and optionally full) decay spectrum"),
        ("scan", "reduced spectrum along a geometry parameter grid"),
        ("evolve", "integrate the master equation for an initial state"),
        ("verify", "run the numerical verification battery"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to INI run configuration")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="output format (overrides [output] section)")
        p.add_argument("--full", action="store_true",
                       help="include the full 2^N spectrum where applicable")
        p.add_argument("--tol", type=float, default=1e-9,
                       help="tolerance for verification residuals")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        out_path = args.out if args.out is not None else cfg.out_path
        out_format = args.format if args.format is not None else cfg.out_format
        code, report = COMMANDS[args.command](cfg, args.full, args.tol)
        report.write(out_path, out_format)
        return code
    except ConfigError as exc:
        print(f"dfslab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StabilityError as exc:
        print(f"dfslab: stability guard: {exc}", file=sys.stderr)
        return EXIT_STABILITY
    except (NumericalError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"dfslab: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DFSLabError as exc:
        print(f"dfslab: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
