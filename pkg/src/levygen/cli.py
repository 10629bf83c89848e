"""Batch front-end: run configured checks and write JSON + CSV reports.

A run configuration is a flat INI-style text file whose sections are all
named ``[job:<name>]``.  Each job selects a job kind, a process preset, a
grid, a test-function family, and an output base path; the runner writes
``<out>.json`` (structured report) and ``<out>.csv`` (plot data, header
comment ``# schema=1``) atomically.  Relative output paths are resolved
against the directory containing the config file.

Exit status: 0 when every job passes, 1 when any job fails or hits a
numerical error (other jobs still run), 2 on a configuration problem.

Reports are byte-identical across reruns of the same config except for the
single ``generated_at`` timestamp field; per-check runtimes are therefore
omitted from the JSON.  The environment variable ``LEVYGEN_WORKERS`` (a
positive integer) selects the number of concurrent job workers; the
default is sequential execution.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import datetime
import io
import json
import os
import platform
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy

from . import __version__
from .errors import ConfigError, LevygenError
from .generator_ops import (
    FAMILY_NAMES,
    Grid,
    apply_convolution,
    apply_ito,
    apply_spectral,
    make_family,
)
from .levy_model import (
    PRESET_SPECS,
    LevyTriplet,
    ProcessPreset,
    char_exponent,
    make_preset,
)
from .tail_kernels import assemble_kernel, cell_averaged_weights, mu_minus, mu_plus
from .verification import (
    check_limit_theorems,
    check_monotonicity,
    compare_forms,
    mc_semigroup_check,
)

__all__ = ["JobSpec", "RunConfig", "load_config", "run", "list_presets", "main"]

JOB_KINDS = (
    "exponent_sweep",
    "kernel_table",
    "compare_forms",
    "theorem_checks",
    "mc_semigroup",
)

_COMMON_KEYS = {"kind", "preset", "family", "center", "half_width", "n",
                "seed", "out"}
_KIND_KEYS = {
    "exponent_sweep": {"z_max", "z_count", "tolerance"},
    "kernel_table": set(),
    "compare_forms": {"tolerance"},
    "theorem_checks": {"m_max"},
    "mc_semigroup": {"x", "t", "count"},
}
_FAMILY_KEYS = {"center", "width", "frequency"}


# ----------------------------------------------------------------------------
# Configuration
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class JobSpec:
    """One validated job: kind, preset, grid, family, seed, output base."""

    name: str
    kind: str
    preset: ProcessPreset
    family_name: str
    family_params: dict
    center: float
    half_width: float
    n: int
    seed: int
    out: str
    options: dict


@dataclass(frozen=True)
class RunConfig:
    """All jobs of one run, in file order."""

    jobs: tuple
    path: str


def _convert(section: str, key: str, raw: str, kind, what: str):
    try:
        return kind(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"expected {what}, got {raw!r}", section=section, field=key
        ) from exc


def _float_list(raw: str):
    return tuple(float(tok) for tok in raw.split(","))


def _parse_job(section: str, name: str, raw: dict, base_dir: str, seen_out: set) -> JobSpec:
    raw = dict(raw)

    kind = raw.pop("kind", None)
    if kind is None:
        raise ConfigError("missing required key", section=section, field="kind")
    if kind not in JOB_KINDS:
        raise ConfigError(
            f"unknown job kind {kind!r}; known kinds: {', '.join(JOB_KINDS)}",
            section=section,
            field="kind",
        )

    preset_name = raw.pop("preset", None)
    if preset_name is None:
        raise ConfigError("missing required key", section=section, field="preset")
    preset_params = {}
    for key in [k for k in raw if k.startswith("preset.")]:
        pname = key[len("preset."):]
        preset_params[pname] = _convert(section, key, raw.pop(key), float, "a number")

    family_name = raw.pop("family", "gaussian_bump")
    family_params = {}
    for key in [k for k in raw if k.startswith("family.")]:
        fname = key[len("family."):]
        if fname not in _FAMILY_KEYS:
            raise ConfigError(
                f"unknown family parameter; known: {', '.join(sorted(_FAMILY_KEYS))}",
                section=section,
                field=key,
            )
        family_params[fname] = _convert(section, key, raw.pop(key), float, "a number")

    center = _convert(section, "center", raw.pop("center", "0.0"), float, "a number")
    half_width = _convert(
        section, "half_width", raw.pop("half_width", "20.0"), float, "a number"
    )
    n = _convert(section, "n", raw.pop("n", "1024"), int, "an integer")
    if n < 16 or n & (n - 1) != 0:
        raise ConfigError(
            f"n must be a power of two >= 16, got {n}", section=section, field="n"
        )
    seed = _convert(section, "seed", raw.pop("seed", "0"), int, "an integer")

    out = raw.pop("out", None)
    if out is None:
        raise ConfigError("missing required key", section=section, field="out")
    out_path = out if os.path.isabs(out) else os.path.join(base_dir, out)
    out_path = os.path.normpath(out_path)
    if out_path in seen_out:
        raise ConfigError(
            f"output path {out!r} is already used by another job",
            section=section,
            field="out",
        )
    seen_out.add(out_path)

    options = {}
    allowed = _KIND_KEYS[kind]
    if kind == "exponent_sweep":
        options["z_max"] = _convert(
            section, "z_max", raw.pop("z_max", "8.0"), float, "a number"
        )
        options["z_count"] = _convert(
            section, "z_count", raw.pop("z_count", "65"), int, "an integer"
        )
        options["tolerance"] = _convert(
            section, "tolerance", raw.pop("tolerance", "1e-10"), float, "a number"
        )
    elif kind == "compare_forms":
        options["tolerance"] = _convert(
            section, "tolerance", raw.pop("tolerance", "1e-3"), float, "a number"
        )
    elif kind == "theorem_checks":
        options["m_max"] = _convert(
            section, "m_max", raw.pop("m_max", "20"), int, "an integer"
        )
    elif kind == "mc_semigroup":
        options["x"] = _convert(
            section, "x", raw.pop("x", "0.0"), _float_list, "a comma-separated list of numbers"
        )
        options["t"] = _convert(section, "t", raw.pop("t", "1e-3"), float, "a number")
        options["count"] = _convert(
            section, "count", raw.pop("count", "100000"), int, "an integer"
        )

    for key in sorted(raw):
        raise ConfigError(
            f"unknown key for job kind {kind!r}; allowed: "
            f"{', '.join(sorted(_COMMON_KEYS | allowed))}, preset.*, family.*",
            section=section,
            field=key,
        )

    job = JobSpec(
        name=name,
        kind=kind,
        preset=ProcessPreset(preset_name, preset_params),
        family_name=family_name,
        family_params=family_params,
        center=center,
        half_width=half_width,
        n=n,
        seed=seed,
        out=out_path,
        options=options,
    )
    _validate_job_semantics(section, job)
    return job


def _validate_job_semantics(section: str, job: JobSpec) -> None:
    """Build the preset and family once so bad names/params fail at load time."""
    try:
        make_preset(job.preset)
    except LevygenError as exc:
        raise ConfigError(str(exc), section=section, field="preset") from exc
    try:
        make_family(job.family_name, **job.family_params)
    except LevygenError as exc:
        raise ConfigError(str(exc), section=section, field="family") from exc


def load_config(path: str) -> RunConfig:
    """Parse and validate a run configuration file."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), strict=True)
    cp.optionxform = str  # keys are case-sensitive (e.g. preset.A)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh, source=path)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if cp.defaults():
        raise ConfigError(
            "top-level keys are not allowed; put every key under a [job:<name>] section"
        )
    jobs = []
    seen_out: set = set()
    base_dir = os.path.dirname(os.path.abspath(path))
    for section in cp.sections():
        if not section.startswith("job:"):
            raise ConfigError(
                "sections must be named [job:<name>]", section=section
            )
        name = section[len("job:"):].strip()
        if not name:
            raise ConfigError("job name must be nonempty", section=section)
        jobs.append(_parse_job(section, name, dict(cp.items(section)), base_dir, seen_out))
    if not jobs:
        raise ConfigError("config defines no [job:<name>] sections")
    return RunConfig(jobs=tuple(jobs), path=os.path.abspath(path))


# ----------------------------------------------------------------------------
# Output plumbing
# ----------------------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _write_csv(path: str, header, rows) -> None:
    buf = io.StringIO()
    buf.write("# schema=1\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt_cell(v) for v in row) + "\n")
    _atomic_write(path, buf.getvalue())


def _strip_runtime(report_dict: dict) -> dict:
    """Drop volatile runtime fields so reruns are byte-identical."""
    return {k: v for k, v in report_dict.items() if k != "runtime"}


def _write_job_json(job: JobSpec, payload: dict) -> None:
    doc = {
        "job": job.name,
        "kind": job.kind,
        "preset": {"name": job.preset.name, "params": dict(job.preset.params)},
        "family": {"name": job.family_name, **job.family_params},
        "grid": {"center": job.center, "half_width": job.half_width, "n": job.n},
        "seed": job.seed,
        "versions": {
            "levygen": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    doc.update(payload)
    _atomic_write(job.out + ".json", json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------------------
# Job runners
# ----------------------------------------------------------------------------


def _grid(job: JobSpec) -> Grid:
    return Grid(center=job.center, half_width=job.half_width, n=job.n)


def _force_generic(t: LevyTriplet) -> LevyTriplet:
    """Copy of the triplet whose jump exponent is computed by quadrature."""
    m = t.measure
    if m.closed is None or m.closed.jump_exponent is None:
        return t
    closed = dataclasses.replace(m.closed, jump_exponent=None)
    return LevyTriplet(
        A=t.A,
        gamma=t.gamma,
        measure=dataclasses.replace(m, closed=closed),
        preset=t.preset,
    )


def _run_exponent_sweep(job: JobSpec):
    t = make_preset(job.preset)
    opts = job.options
    z = np.linspace(-opts["z_max"], opts["z_max"], opts["z_count"])
    lam = np.asarray(char_exponent(t, z), dtype=complex)
    lam_gen = np.asarray(char_exponent(_force_generic(t), z), dtype=complex)
    diff = np.abs(lam - lam_gen)
    max_diff = float(np.max(diff))
    passed = bool(max_diff <= opts["tolerance"]) and bool(
        np.all(np.isfinite(lam.view(float)))
    )
    payload = {
        "passed": passed,
        "max_diff": max_diff,
        "tolerance": opts["tolerance"],
        "closed_form_used": t.measure.closed is not None
        and t.measure.closed.jump_exponent is not None,
    }
    header = ("z", "lambda_re", "lambda_im", "lambda_generic_re",
              "lambda_generic_im", "abs_diff")
    rows = [
        (z[i], lam[i].real, lam[i].imag, lam_gen[i].real, lam_gen[i].imag, diff[i])
        for i in range(z.size)
    ]
    return payload, header, rows


def _run_kernel_table(job: JobSpec):
    t = make_preset(job.preset)
    grid = _grid(job)
    kern = assemble_kernel(t)
    w = cell_averaged_weights(kern, grid)
    j = np.arange(-grid.n, grid.n + 1)
    u = j * grid.h
    m = t.measure
    tail = np.full(u.size, np.nan)
    kval = np.full(u.size, np.nan)
    neg, pos = u < 0, u > 0
    if m.is_empty:
        tail[neg] = 0.0
        tail[pos] = 0.0
    else:
        tail[neg] = mu_minus(m, u[neg])
        tail[pos] = mu_plus(m, u[pos])
    nz = u != 0.0
    kval[nz] = kern.total(u[nz])
    passed = bool(np.all(np.isfinite(w)))
    payload = {
        "passed": passed,
        "gamma_correction": kern.gamma_correction,
        "drift_coefficient": kern.drift_coefficient,
        "weight_count": int(w.size),
        "weight_sum": float(np.sum(w)),
        "all_weights_finite": passed,
    }
    header = ("u", "tail", "kernel", "weight")
    rows = [
        (
            u[i],
            None if not np.isfinite(tail[i]) else float(tail[i]),
            None if not np.isfinite(kval[i]) else float(kval[i]),
            float(w[i]),
        )
        for i in range(u.size)
    ]
    return payload, header, rows


def _run_compare_forms(job: JobSpec):
    t = make_preset(job.preset)
    fam = make_family(job.family_name, **job.family_params)
    ns = [m for m in (job.n // 4, job.n // 2, job.n) if m >= 16]
    grids = [Grid(center=job.center, half_width=job.half_width, n=m) for m in ns]
    rep = compare_forms(t, [fam], grids, tolerance=job.options["tolerance"])
    finest = grids[-1]
    kern = assemble_kernel(t)
    ito = apply_ito(t, fam, finest)
    conv = apply_convolution(kern, t.A, fam, finest)
    spec = apply_spectral(t, fam, finest)
    x = finest.nodes
    abs_diff = np.maximum(
        np.abs(ito.values - conv.values),
        np.maximum(
            np.abs(ito.values - spec.values), np.abs(conv.values - spec.values)
        ),
    )
    payload = {"passed": rep.passed, "report": _strip_runtime(rep.to_dict())}
    header = ("x", "L_ito", "L_conv", "L_spec", "abs_diff")
    rows = [
        (x[i], ito.values[i], conv.values[i], spec.values[i], abs_diff[i])
        for i in range(x.size)
    ]
    return payload, header, rows


def _run_theorem_checks(job: JobSpec):
    t = make_preset(job.preset)
    rep_lim = check_limit_theorems(t.measure, m_max=job.options["m_max"])
    rep_mono = check_monotonicity(t.measure)
    passed = rep_lim.passed and rep_mono.passed
    payload = {
        "passed": passed,
        "limit_theorems": _strip_runtime(rep_lim.to_dict()),
        "monotonicity": _strip_runtime(rep_mono.to_dict()),
    }
    ladder_rows = [r for r in rep_lim.table if "m" in r]
    header = ("m", "eps", "eps2_mu_minus", "eps2_mu_plus", "eps_k_minus", "eps_k_plus")
    rows = [tuple(r[k] for k in header) for r in ladder_rows]
    return payload, header, rows


def _run_mc_semigroup(job: JobSpec):
    t = make_preset(job.preset)
    fam = make_family(job.family_name, **job.family_params)
    opts = job.options
    reports = [
        mc_semigroup_check(
            t, fam, x, t=opts["t"], count=opts["count"], seed=job.seed
        )
        for x in opts["x"]
    ]
    passed = all(r.passed for r in reports)
    payload = {
        "passed": passed,
        "reports": [_strip_runtime(r.to_dict()) for r in reports],
    }
    header = ("x", "estimate", "stderr", "generator", "error", "allowance", "status")
    rows = []
    for r in reports:
        row = r.table[0]
        rows.append(
            (
                row["x"],
                row["mc_estimate"],
                row["stderr"],
                row["generator_value"],
                row["error"],
                row["allowance"],
                row["status"],
            )
        )
    return payload, header, rows


_JOB_RUNNERS = {
    "exponent_sweep": _run_exponent_sweep,
    "kernel_table": _run_kernel_table,
    "compare_forms": _run_compare_forms,
    "theorem_checks": _run_theorem_checks,
    "mc_semigroup": _run_mc_semigroup,
}


def _run_job(job: JobSpec) -> dict:
    """Run one job, write its artifacts, and report its outcome."""
    try:
        payload, header, rows = _JOB_RUNNERS[job.kind](job)
        _write_job_json(job, payload)
        _write_csv(job.out + ".csv", header, rows)
        return {"name": job.name, "passed": bool(payload["passed"]), "error": None}
    except Exception as exc:  # noqa: BLE001 - a failed job must not stop others
        _write_job_json(
            job, {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
        )
        return {
            "name": job.name,
            "passed": False,
            "error": f"{type(exc).__name__}: {exc}",
        }


# ----------------------------------------------------------------------------
# Entry points
# ----------------------------------------------------------------------------


def _worker_count() -> int:
    raw = os.environ.get("LEVYGEN_WORKERS", "").strip()
    if not raw:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise ConfigError(
            f"LEVYGEN_WORKERS must be a positive integer, got {raw!r}"
        ) from None
    if k < 1:
        raise ConfigError(
            f"LEVYGEN_WORKERS must be a positive integer, got {raw!r}"
        )
    return k


def run(config_path: str, stream=None) -> int:
    """Execute the config's jobs; return the process exit status (0/1/2)."""
    stream = stream if stream is not None else sys.stdout
    try:
        cfg = load_config(config_path)
        workers = _worker_count()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if workers == 1:
        results = [_run_job(job) for job in cfg.jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, cfg.jobs))
    for res in results:
        line = f"job {res['name']}: {'PASS' if res['passed'] else 'FAIL'}"
        if res["error"]:
            line += f" ({res['error']})"
        print(line, file=stream)
    n_pass = sum(1 for r in results if r["passed"])
    print(f"{n_pass}/{len(results)} jobs passed", file=stream)
    return 0 if n_pass == len(results) else 1


def _interval(ps) -> str:
    lo = "(" if ps.lo_open else "["
    hi = ")" if ps.hi_open else "]"
    return f"{lo}{ps.lo:g}, {ps.hi:g}{hi}"


def list_presets(as_json: bool = False) -> str:
    """Human- or machine-readable catalogue of the built-in presets."""
    if as_json:
        doc = {
            name: {
                "summary": spec["summary"],
                "simulable": spec["simulable"],
                "params": {
                    pname: {
                        "default": ps.default,
                        "min": None if not np.isfinite(ps.lo) else ps.lo,
                        "max": None if not np.isfinite(ps.hi) else ps.hi,
                        "min_open": ps.lo_open,
                        "max_open": ps.hi_open,
                    }
                    for pname, ps in spec["params"].items()
                },
            }
            for name, spec in PRESET_SPECS.items()
        }
        return json.dumps({"presets": doc, "families": list(FAMILY_NAMES)},
                          indent=2, sort_keys=True)
    lines = []
    for name, spec in PRESET_SPECS.items():
        flag = "exact sampler" if spec["simulable"] else "not simulable"
        lines.append(f"{name}  ({flag})")
        lines.append(f"    {spec['summary']}")
        for pname, ps in spec["params"].items():
            default = "required" if ps.default is None else f"default {ps.default:g}"
            lines.append(f"    {pname:8s} {default:14s} range {_interval(ps)}")
    lines.append("")
    lines.append(f"test-function families: {', '.join(FAMILY_NAMES)}")
    return "\n".join(lines)


def main(argv=None) -> int:
    """Console entry point."""
    parser = argparse.ArgumentParser(
        prog="levygen",
        description="Batch checks for the three realizations of a Levy generator.",
    )
    parser.add_argument("--config", metavar="PATH", help="run the jobs in this config file")
    parser.add_argument(
        "--list-presets", action="store_true", help="print the preset catalogue"
    )
    parser.add_argument(
        "--json", action="store_true",
        help="with --list-presets: machine-readable output",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    args = parser.parse_args(argv)
    if args.list_presets:
        print(list_presets(as_json=args.json))
        return 0
    if args.config:
        return run(args.config)
    parser.print_usage(sys.stderr)
    print("levygen: one of --config or --list-presets is required", file=sys.stderr)
    return 2
