"""Command-line front end.

Commands
--------
params       gamma*, eps*_delta and mu* on a radius grid (CSV)
stack        finite-n layered stack (JSON)
cell-verify  convergence table of the periodic cell solver (text)
dtn          modal impedance spectrum (JSON)
sweep        distances along an n, delta or rho sweep (CSV or JSON)

Exit codes: 0 success, 1 invalid configuration or usage, 2 a sweep
distance failed to decrease towards its limit, 3 solver error.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from .cell import (
    PeriodicProfile,
    convergence_table,
    sine_profile,
    sine_profile_corrector,
    solve_cell_1d,
    chi1_closed_form,
)
from .errors import CloakError, ConfigError, DomainError
from .laminate import build_stack, solve_phase_pair
from .measure import KINDS, ExperimentConfig, spectrum, sweep
from .params import (
    RECIPROCAL,
    PUSHFORWARD,
    HiddenObject,
    ObjectShell,
    build_reference_media,
    gamma_star_medium,
    normalize_inner_shell,
)
from .special import L_MAX

__all__ = [
    "SCHEMA_VERSION",
    "COMMANDS",
    "RunManifest",
    "parse_config",
    "config_document",
    "config_fingerprint",
    "run",
    "main",
]

SCHEMA_VERSION = 1
COMMANDS = ("params", "stack", "cell-verify", "dtn", "sweep")
EXIT_OK, EXIT_CONFIG, EXIT_TREND, EXIT_SOLVER = 0, 1, 2, 3

_FIELDS = {
    "schema_version", "omega", "rho", "delta", "n", "inner_shell_mode",
    "l_max", "tol", "object", "weights", "kind",
}
_REQUIRED = ("schema_version", "rho", "delta", "n")
PARAMS_GRID = 600
ROWS_COLUMNS = ("param", "value", "distance_sup", "distance_l2", "worst_pol", "worst_l",
                "runtime_s")


def _tool_version():
    try:
        return version("isocloak")
    except PackageNotFoundError:  # pragma: no cover - source checkout without install
        return "0+unknown"


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _complex_field(value, where, problems):
    if _is_number(value):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2 and all(_is_number(v) for v in value)):
        return complex(value[0], value[1])
    problems.append(f"{where}: expected a number or [re, im]")
    return None


def _parse_object(raw, problems):
    if not isinstance(raw, list) or not raw:
        problems.append("object: expected a non-empty list of shells")
        return None
    shells = []
    before = len(problems)
    for i, item in enumerate(raw):
        where = f"object[{i}]"
        if not isinstance(item, dict):
            problems.append(f"{where}: expected an object with r_outer, eps, mu")
            continue
        extra = set(item) - {"r_outer", "eps", "mu"}
        if extra:
            problems.append(f"{where}: unknown keys {sorted(extra)}")
        r = item.get("r_outer")
        if not _is_number(r):
            problems.append(f"{where}.r_outer: expected a number")
            continue
        if not 0.0 < r <= 0.5:
            problems.append(
                f"{where}.r_outer={r}: hidden objects must lie inside the ball of radius 1/2"
            )
        eps = _complex_field(item.get("eps", 1.0), f"{where}.eps", problems)
        mu = _complex_field(item.get("mu", 1.0), f"{where}.mu", problems)
        if eps is not None and mu is not None:
            shells.append(ObjectShell(float(r), eps, mu))
    if len(problems) > before:
        return None
    try:
        return HiddenObject(tuple(shells))
    except DomainError as exc:
        problems.extend(f"object: {p}" for p in str(exc).split("; "))
        return None


def parse_config(text):
    """Validate a JSON configuration document and build an :class:`ExperimentConfig`.

    Every offending field is collected before raising, so one
    :class:`ConfigError` reports all of them.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["top level must be a JSON object"])

    problems = []
    unknown = set(doc) - _FIELDS
    if unknown:
        problems.append(f"unknown fields: {sorted(unknown)}")
    kind = doc.get("kind", "cloak")
    if kind not in KINDS:
        problems.append(f"kind={kind!r}: expected one of {list(KINDS)}")
    required = _REQUIRED if kind == "cloak" else ("schema_version",)
    for key in required:
        if key not in doc:
            problems.append(f"{key}: required field missing")

    if "schema_version" in doc and doc["schema_version"] != SCHEMA_VERSION:
        problems.append(
            f"schema_version={doc['schema_version']!r}: this tool reads version {SCHEMA_VERSION}"
        )

    def number(key, default, check, message):
        value = doc.get(key, default)
        if not _is_number(value):
            problems.append(f"{key}: expected a number")
            return default
        if not check(value):
            problems.append(f"{key}={value}: {message}")
        return value

    rho = number(
        "rho", 0.25, lambda v: 0.0 < v <= 0.5,
        "must lie in (0, 1/2]; the two-phase laminate is only feasible "
        "(positive alpha, beta) for 0 < rho < 1/2",
    )
    delta = number("delta", 0.0, lambda v: 0.0 <= v <= 0.5, "must lie in [0, 0.5]")
    omega = number("omega", 1.0, lambda v: v > 0, "must be positive")
    tol = number("tol", 1e-10, lambda v: 0 < v < 1, "must lie in (0, 1)")

    n = doc.get("n", 0)
    if not (isinstance(n, int) and not isinstance(n, bool) and n >= 0):
        problems.append(f"n={n!r}: expected a non-negative integer (0 = anisotropic reference)")
        n = 0
    l_max = doc.get("l_max", 20)
    if not (isinstance(l_max, int) and not isinstance(l_max, bool) and 1 <= l_max <= L_MAX):
        problems.append(f"l_max={l_max!r}: expected an integer in [1, {L_MAX}]")
        l_max = 20

    inner = doc.get("inner_shell_mode", PUSHFORWARD)
    try:
        inner = normalize_inner_shell(inner)
    except (ValueError, TypeError):
        problems.append(f"inner_shell_mode={inner!r}: expected {PUSHFORWARD!r} or {RECIPROCAL!r}")
        inner = PUSHFORWARD

    weights = doc.get("weights", "sobolev")
    if weights not in ("sobolev", "uniform"):
        problems.append(f"weights={weights!r}: expected 'sobolev' or 'uniform'")

    obj = HiddenObject.vacuum()
    if "object" in doc:
        obj = _parse_object(doc["object"], problems)

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(
        rho=float(rho), delta=float(delta), n=n, omega=float(omega), inner_shell=inner,
        object=obj, l_max=l_max, tol=float(tol), weights=weights, kind=kind,
    )


def config_document(config):
    """Canonical JSON-ready form of ``config`` (all defaults filled in)."""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": config.kind,
        "omega": config.omega,
        "rho": config.rho,
        "delta": config.delta,
        "n": config.n,
        "inner_shell_mode": config.inner_shell,
        "l_max": config.l_max,
        "tol": config.tol,
        "weights": config.weights,
        "object": [
            {"r_outer": s.r_outer, "eps": [s.eps.real, s.eps.imag], "mu": [s.mu.real, s.mu.imag]}
            for s in config.object.shells
        ],
    }


def config_fingerprint(config):
    """sha256 of the canonical configuration document."""
    text = json.dumps(config_document(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Everything a single CLI invocation needs besides the command name.

    ``sequential`` forces single-process execution, which makes every
    output bitwise reproducible.
    """

    config_path: str = None
    command: str = "dtn"
    output_path: str = None
    sequential: bool = False
    tool_version: str = ""
    vary: str = None
    values: tuple = ()
    inner_shell: str = None

    def problems(self):
        out = []
        if self.command not in COMMANDS:
            out.append(f"command {self.command!r}: expected one of {list(COMMANDS)}")
        if self.config_path is None and self.command != "cell-verify":
            out.append("--config is required for this command")
        if self.output_path is not None:
            parent = os.path.dirname(os.path.abspath(self.output_path))
            if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
                out.append(f"--out: directory {parent} is not writable")
        if self.command == "sweep":
            if self.vary not in ("n", "delta", "rho"):
                out.append("--vary: expected n, delta or rho")
            if not self.values:
                out.append("--values: expected a comma-separated list")
        return out


def _load_config(manifest):
    if manifest.config_path is None:
        config = ExperimentConfig()
    else:
        try:
            with open(manifest.config_path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError([f"--config: {exc}"]) from None
        config = parse_config(text)
    if manifest.inner_shell is not None:
        config = config.with_(inner_shell=normalize_inner_shell(manifest.inner_shell))
    return config


def _fmt(x):
    return repr(float(x))


def _header(config):
    return [f"# schema_version={SCHEMA_VERSION}",
            f"# config_fingerprint={config_fingerprint(config)}"]


def _params_samples(media):
    """Radius grid with two-sided samples at every interior breakpoint."""
    cuts = sorted({b for m in media for b in m.breakpoints} - {0.0, 3.0})
    grid = 3.0 * np.arange(1, PARAMS_GRID + 1) / PARAMS_GRID
    samples = [(float(r), "") for r in grid if not np.any(np.isclose(r, cuts, rtol=0, atol=1e-12))]
    for c in cuts:
        samples += [(c, "-"), (c, "+")]
    samples.sort(key=lambda s: (s[0], s[1] != "-"))
    return samples


def _segment(medium, r, side):
    for seg in medium.segments:
        if side == "+" and seg.r_inner <= r < seg.r_outer:
            return seg
        if side != "+" and seg.r_inner < r <= seg.r_outer:
            return seg
    raise DomainError(f"no segment at r={r}{side}")


def _cmd_params(config):
    geom = config.geom
    ref = build_reference_media(geom, config.delta, config.omega, config.object,
                                config.inner_shell)
    gam = gamma_star_medium(geom, config.omega, config.inner_shell)
    buf = io.StringIO()
    buf.write("\n".join(_header(config)) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "side", "gamma_radial", "gamma_tangential",
                "eps_radial_re", "eps_radial_im", "eps_tangential_re", "eps_tangential_im",
                "mu_radial_re", "mu_radial_im", "mu_tangential_re", "mu_tangential_im"])
    for r, side in _params_samples((ref, gam)):
        g = _segment(gam, r, side).eps_at(r)
        seg = _segment(ref, r, side)
        e, m = seg.eps_at(r), seg.mu_at(r)
        row = [_fmt(r), side, _fmt(complex(g.radial).real), _fmt(complex(g.tangential).real)]
        for v in (e.radial, e.tangential, m.radial, m.tangential):
            v = complex(v)
            row += [_fmt(v.real), _fmt(v.imag)]
        w.writerow(row)
    return buf.getvalue(), EXIT_OK


def _dump_json(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _cmd_stack(config):
    if config.n < 1:
        raise ConfigError(["n: the stack command needs n >= 1"])
    stack = build_stack(config.n, config.geom, config.delta, config.omega, config.object,
                        config.inner_shell)
    doc = {"schema_version": SCHEMA_VERSION, "config_fingerprint": config_fingerprint(config),
           "stack": stack.to_dict()}
    return _dump_json(doc), EXIT_OK


def _cmd_cell_verify(config):
    lines = _header(config)
    lines.append("# profile: 2 + sin(2 pi t), error = max |chi_h - chi| at the cell centres")
    lines.append(f"{'N':>6}  {'sup_error':>12}  {'order':>6}")
    for n, err, order in convergence_table(sine_profile, sine_profile_corrector):
        lines.append(f"{n:>6}  {err:12.4e}  {'-' if order is None else f'{order:6.3f}':>6}")
    pair = solve_phase_pair(1.5, config.geom)
    prof = PeriodicProfile.two_phase(pair.alpha, pair.beta, 64)
    err = float(np.max(np.abs(solve_cell_1d(prof).dchi - chi1_closed_form(prof))))
    lines.append(
        f"# two-phase laminate (alpha, beta) = ({pair.alpha:.6f}, {pair.beta:.6f}), "
        f"N = 64: max |dchi_h - (-1 + HM/gamma)| = {err:.3e}"
    )
    return "\n".join(lines) + "\n", EXIT_OK


def _cmd_dtn(config):
    s = spectrum(config)
    doc = {"schema_version": SCHEMA_VERSION, "config_fingerprint": config_fingerprint(config),
           "config": config_document(config), "spectrum": s.to_dict()}
    return _dump_json(doc), EXIT_OK


def _sweep_plan(config, vary, values):
    if vary == "n":
        bad = [v for v in values if not float(v).is_integer() or v < 1]
        if bad:
            raise ConfigError([f"--values: n must be positive integers, got {bad}"])
        configs = [config.with_(n=int(v)) for v in values]
        reference = config.with_(n=0)
    elif vary == "delta":
        configs = [config.with_(delta=float(v)) for v in values]
        reference = config.with_(delta=0.0)
    else:
        configs = [config.with_(rho=float(v)) for v in values]
        reference = config.with_(kind="vacuum")
    return configs, reference


def _cmd_sweep(config, manifest):
    try:
        configs, reference = _sweep_plan(config, manifest.vary, manifest.values)
    except DomainError as exc:
        raise ConfigError([f"--values: {exc}"]) from None
    workers = 1 if manifest.sequential else min(len(configs), os.cpu_count() or 1)
    rows = sweep(configs, reference, workers=workers)
    code = EXIT_OK
    for row in rows:
        if row.error is not None:
            print(f"error at {row.param}={row.value}: {row.error}", file=sys.stderr)
            code = EXIT_SOLVER
        elif row.trend_violation and code == EXIT_OK:
            print(f"trend violation at {row.param}={row.value}", file=sys.stderr)
            code = EXIT_TREND

    def value(row):
        return int(row.value) if row.param == "n" else row.value

    if manifest.output_path and manifest.output_path.endswith(".json"):
        doc = {
            "schema_version": SCHEMA_VERSION,
            "config_fingerprint": config_fingerprint(config),
            "rows": [{**{k: getattr(r, k) for k in ROWS_COLUMNS}, "value": value(r)}
                     for r in rows],
        }
        return json.dumps(doc, indent=2) + "\n", code
    buf = io.StringIO()
    buf.write("\n".join(_header(config)) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROWS_COLUMNS)
    for r in rows:
        w.writerow([r.param, value(r), r.distance_sup, r.distance_l2, r.worst_pol,
                    r.worst_l, f"{r.runtime_s:.4f}"])
    return buf.getvalue(), code


def run(command, manifest):
    """Execute ``command`` and write its report; returns the exit code."""
    manifest = RunManifest(**{**manifest.__dict__, "command": command})
    problems = manifest.problems()
    try:
        if problems:
            raise ConfigError(problems)
        config = _load_config(manifest)
        if command == "params":
            text, code = _cmd_params(config)
        elif command == "stack":
            text, code = _cmd_stack(config)
        elif command == "cell-verify":
            text, code = _cmd_cell_verify(config)
        elif command == "dtn":
            text, code = _cmd_dtn(config)
        else:
            text, code = _cmd_sweep(config, manifest)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except CloakError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if manifest.output_path:
        with open(manifest.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def _values(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="isocloak", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=_tool_version())
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--out", help="output file (default: stdout); .json selects JSON for sweep")
    p.add_argument("--vary", choices=("n", "delta", "rho"), help="sweep parameter")
    p.add_argument("--values", type=_values, default=(), help="comma-separated sweep values")
    p.add_argument("--sequential", action="store_true",
                   help="run in one process (bitwise reproducible)")
    p.add_argument("--inner-shell", choices=("reciprocal", "pushforward"),
                   help="override inner_shell_mode of the config")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    manifest = RunManifest(
        config_path=args.config, command=args.command, output_path=args.out,
        sequential=args.sequential, tool_version=_tool_version(), vary=args.vary,
        values=args.values, inner_shell=args.inner_shell,
    )
    return run(args.command, manifest)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
