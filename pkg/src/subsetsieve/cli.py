"""Command-line front end: parse problem descriptions, dispatch counting,
bound, verification, and sweep runs, and emit machine-readable reports.

Subcommands: count, bound, verify, sweep, selftest. Configuration comes from
flags and/or a TOML config file (flags override the file). JSON is the
primary output format; CSV is a flat projection of the same rows.

Exit codes: 0 success, 1 verification failure, 2 usage/parse error,
3 budget exceeded globally.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Optional

try:
    import tomllib  # py >= 3.11
except ImportError:  # pragma: no cover
    import tomli as tomllib

from . import __version__, backend
from .algebra import DomainSpec, Fq, GroupSpec, PolySpec, Structure, Zn, build_field
from .bounds import (
    ConstantChoice,
    applicability_abelian,
    applicability_fq,
    applicability_zn,
    bound_abelian,
    bound_fq,
    bound_zn,
    default_constant_zn,
    verify_theorem,
)
from .counting import (
    BudgetError,
    CountQuery,
    CrossCheckError,
    DEFAULT_ENUM_BUDGET,
    DEFAULT_TOLERANCE,
    ResidualError,
    bruteforce_grid,
    charsum_grid,
    closed_form_applies,
    closed_form_grid,
    dp_grid,
    _as_group,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    """Declarative description of one run; mirrors the CLI flags."""

    kind: str = ""  # zn | fq | abelian
    n: int = 0
    p: int = 0
    t: int = 0
    modulus: str = ""  # colon-separated F_p coefficients, constant first
    moduli: list[int] = field(default_factory=list)
    domain: str = "full"
    poly: str = ""  # empty = identity map
    k: str = "0"
    b: str = "all"
    method: str = "auto"
    theorem: str = ""
    constant: str = ""
    tolerance: float = DEFAULT_TOLERANCE
    budget: int = DEFAULT_ENUM_BUDGET
    format: str = "json"
    jobs: int = 0  # 0 = available parallelism
    no_meta: bool = False
    output: str = ""
    sweep_zn: str = ""
    sweep_fq: str = ""

    @classmethod
    def from_toml(cls, text: str) -> "JobConfig":
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"config parse error: {e}") from e
        cfg = cls()
        tables = {"structure", "job", "sweep"}
        for tname in doc:
            if tname not in tables:
                raise ConfigError(f"unknown config table [{tname}]")
        known = {f.name for f in fields(cls)}
        for tname in tables:
            for key, val in doc.get(tname, {}).items():
                name = f"sweep_{key}" if tname == "sweep" else key
                if name not in known:
                    raise ConfigError(f"unknown config key {tname}.{key}")
                setattr(cfg, name, list(val) if name == "moduli" else type(getattr(cfg, name))(val))
        return cfg

    def to_toml(self) -> str:
        def lit(v):
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, (int, float)):
                return repr(v)
            if isinstance(v, list):
                return "[" + ", ".join(repr(x) for x in v) + "]"
            return json.dumps(v)

        lines = ["[structure]"]
        for key in ("kind", "n", "p", "t", "modulus", "moduli"):
            lines.append(f"{key} = {lit(getattr(self, key))}")
        lines.append("")
        lines.append("[job]")
        for key in ("domain", "poly", "k", "b", "method", "theorem", "constant",
                    "tolerance", "budget", "format", "jobs", "no_meta", "output"):
            lines.append(f"{key} = {lit(getattr(self, key))}")
        lines.append("")
        lines.append("[sweep]")
        lines.append(f"zn = {lit(self.sweep_zn)}")
        lines.append(f"fq = {lit(self.sweep_fq)}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing helpers


def parse_structure(cfg: JobConfig) -> Structure:
    if cfg.kind == "zn":
        return Zn(cfg.n)
    if cfg.kind == "fq":
        modulus = [int(x) for x in cfg.modulus.split(":")] if cfg.modulus else None
        return build_field(cfg.p, cfg.t, modulus)
    if cfg.kind == "abelian":
        return GroupSpec(tuple(cfg.moduli))
    raise ConfigError("no structure given (use --zn, --fq, or --abelian)")


def parse_element_list(s: Structure, text: str) -> list:
    """Semicolon-separated elements; bare commas split scalars for Z_n."""
    if ";" in text:
        toks = [t for t in text.split(";") if t]
    elif isinstance(s, Zn):
        toks = [t for t in text.split(",") if t]
    else:
        toks = [text]
    return [s.parse_element(t) for t in toks]


def parse_domain(s: Structure, text: str) -> DomainSpec:
    if text == "full":
        return DomainSpec.full(s)
    if text.startswith("list:"):
        return DomainSpec.of_elements(s, parse_element_list(s, text[5:]))
    if text.startswith("complement:"):
        return DomainSpec.complement(s, parse_element_list(s, text[11:]))
    raise ConfigError(f"bad domain {text!r} (full | list:... | complement:...)")


def parse_poly(s: Structure, text: str) -> Optional[PolySpec]:
    """Coefficients a_0..a_d: semicolon-separated elements, or comma-separated
    integers (element-index shorthand, which is the plain residue for Z_n)."""
    if not text:
        return None
    if isinstance(s, GroupSpec):
        raise ConfigError("polynomials require a ring (Z_n or F_q); groups use f = x")
    toks = [t for t in text.split(";" if ";" in text else ",") if t]
    coeffs = [s.parse_element(t) for t in toks]
    return PolySpec(s, tuple(coeffs))


def parse_k_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        out = list(range(int(lo), int(hi) + 1))
    else:
        out = [int(x) for x in text.split(",")]
    if not out or any(k < 0 for k in out):
        raise ConfigError(f"bad k range {text!r}")
    return out


def parse_b_list(s: Structure, text: str) -> list[int]:
    """b values as element indices; 'all' iterates the structure in index
    (mixed-radix) order."""
    if text == "all":
        return list(range(s.order))
    return [s.index_of(e) for e in parse_element_list(s, text)]


def parse_constant(text: str) -> Optional[ConstantChoice]:
    if not text:
        return None
    try:
        return ConstantChoice(text)
    except ValueError:
        raise ConfigError(f"bad constant {text!r} (hua | dingqi | cz)") from None


def _structure_fields(s: Structure) -> dict:
    return {"structure": s.describe()}


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# subcommand implementations (pure: config -> rows/summary/exit code)


def _count_grids(cfg: JobConfig, s: Structure, dom, f, kmax: int) -> tuple[dict, Optional[float], str]:
    """Whole (k, b) tables for the requested method; one DP pass covers all rows."""
    method = cfg.method
    if method == "auto":
        probe = CountQuery(s, dom, f, 0, s.element(0))
        method = "closedform" if closed_form_applies(probe) else "dp"
    grids: dict[str, list[list[int]]] = {}
    residual = None
    if method in ("dp", "crosscheck"):
        grids["dp"] = dp_grid(s, dom, f, kmax)
    if method in ("charsum", "crosscheck"):
        grids["charsum"], residual = charsum_grid(s, dom, f, kmax, cfg.tolerance)
    if method == "bruteforce":
        grids["bruteforce"] = bruteforce_grid(s, dom, f, kmax, budget=cfg.budget)
    if method in ("closedform", "crosscheck"):
        probe = CountQuery(s, dom, f, 0, s.element(0))
        if closed_form_applies(probe):
            grids["closedform"] = closed_form_grid(_as_group(s), min(kmax, dom.m))
        elif method == "closedform":
            raise ConfigError("closedform requires D = G and f = x")
    return grids, residual, method


def run_count(cfg: JobConfig) -> tuple[list[dict], Optional[dict], int]:
    s = parse_structure(cfg)
    dom = parse_domain(s, cfg.domain)
    f = parse_poly(s, cfg.poly)
    ks = sorted(set(parse_k_range(cfg.k)))
    bs = parse_b_list(s, cfg.b)
    base = dict(_structure_fields(s))
    base.update(domain=dom.describe(), poly=f.describe() if f else "x")
    t0 = time.perf_counter()
    try:
        grids, residual, method = _count_grids(cfg, s, dom, f, max(ks))
    except BudgetError as e:
        rows = [dict(base, k=k, b=s.format_element(s.element(bi)),
                     error=f"budget: {e}", skipped=True) for k in ks for bi in bs]
        return rows, None, EXIT_BUDGET
    except (ResidualError, CrossCheckError) as e:
        return [dict(base, error=str(e))], None, EXIT_VERIFY_FAIL
    rows: list[dict] = []
    mismatch = False
    for k in ks:
        for bi in bs:
            row = dict(base, k=k, b=s.format_element(s.element(bi)), method=method)
            values = {name: (g[k][bi] if k < len(g) else 0) for name, g in grids.items()}
            if len(set(values.values())) > 1:
                row.update(error=f"cross-check mismatch: {values}")
                mismatch = True
            row["N"] = values[next(iter(grids))]
            if residual is not None:
                row["residual"] = residual
            rows.append(row)
    _attribute_wall(rows, time.perf_counter() - t0)
    return rows, None, EXIT_VERIFY_FAIL if mismatch else EXIT_OK


def _theorem_params(cfg: JobConfig, s: Structure, f: Optional[PolySpec]) -> tuple[str, int]:
    theorem = cfg.theorem
    if not theorem:
        theorem = "zn" if isinstance(s, Zn) else "fq" if isinstance(s, Fq) else "abelian"
    d = f.degree if f is not None else 1
    return theorem, d


def run_bound(cfg: JobConfig) -> tuple[list[dict], Optional[dict], int]:
    s = parse_structure(cfg)
    dom = parse_domain(s, cfg.domain)
    f = parse_poly(s, cfg.poly)
    ks = parse_k_range(cfg.k)
    theorem, d = _theorem_params(cfg, s, f)
    c = dom.c
    rows = []
    for k in sorted(set(ks)):
        row = dict(_structure_fields(s))
        row.update(domain=dom.describe(), c=c, k=k, d=d, theorem=theorem)
        if theorem == "zn":
            if not isinstance(s, Zn):
                raise ConfigError("--theorem zn needs a Z_n structure")
            const = parse_constant(cfg.constant) or default_constant_zn(s.n, d)
            content = f.zn_content() if f is not None else 1
            app, reason = applicability_zn(s.n, c, d, const, content or 1)
            row.update(constant=const.value, bound=bound_zn(s.n, c, k, d, const).value)
        elif theorem == "fq":
            if not isinstance(s, Fq):
                raise ConfigError("--theorem fq needs an F_q structure")
            app, reason = applicability_fq(s.q, s.p, c, d)
            row.update(bound=bound_fq(s.q, s.p, c, k, d).value)
        else:
            g = _as_group(s)
            app, reason = applicability_abelian(g.order, c)
            row.update(exponent=g.exponent, bound=bound_abelian(g.order, c, g.exponent, k).value)
        row.update(applicable=app)
        if reason:
            row["reason"] = reason
        rows.append(row)
    return rows, None, EXIT_OK


def run_verify(cfg: JobConfig) -> tuple[list[dict], Optional[dict], int]:
    s = parse_structure(cfg)
    dom = parse_domain(s, cfg.domain)
    f = parse_poly(s, cfg.poly)
    ks = sorted(set(parse_k_range(cfg.k)))
    bs = parse_b_list(s, cfg.b)
    theorem, _d = _theorem_params(cfg, s, f)
    const = parse_constant(cfg.constant)
    rows = []
    stats = {"instances": 0, "applicable": 0, "holds": 0, "failures": 0, "skipped": 0}
    max_ratio = 0.0
    t0 = time.perf_counter()
    try:
        grid = dp_grid(s, dom, f, max(ks))
    except BudgetError as e:
        # budget-exceeded rows are skipped, not failed
        for k in ks:
            for bi in bs:
                rows.append(dict(_structure_fields(s), k=k, b=s.format_element(s.element(bi)),
                                 skipped=True, error=f"budget: {e}"))
                stats["skipped"] += 1
        return rows, {**stats, "max_ratio": max_ratio}, EXIT_BUDGET
    for k in ks:
        for bi in bs:
            b = s.element(bi)
            row = dict(_structure_fields(s))
            row.update(domain=dom.describe(), poly=f.describe() if f else "x",
                       k=k, b=s.format_element(b), method="dp", theorem=theorem)
            stats["instances"] += 1
            n_value = grid[k][bi] if k < len(grid) else 0
            rep = verify_theorem(CountQuery(s, dom, f, k, b), theorem, const, n_value=n_value)
            row.update(
                N=n_value,
                main_term=_frac(rep.main_term),
                deviation=_frac(rep.deviation),
                bound=rep.bound.value,
                applicable=rep.applicable,
            )
            if rep.constant is not None:
                row["constant"] = rep.constant.value
            if rep.reason:
                row["reason"] = rep.reason
            if rep.applicable:
                stats["applicable"] += 1
                row["holds"] = rep.holds
                if rep.holds:
                    stats["holds"] += 1
                else:
                    stats["failures"] += 1
                if rep.bound.value > 0 and not math.isinf(rep.bound.value):
                    max_ratio = max(max_ratio, float(rep.deviation) / rep.bound.value)
            rows.append(row)
    _attribute_wall(rows, time.perf_counter() - t0)
    summary = {**stats, "max_ratio": max_ratio}
    return rows, summary, EXIT_VERIFY_FAIL if stats["failures"] else EXIT_OK


def _sweep_cell(cell: dict) -> tuple[list[dict], Optional[dict], int]:
    cfg = JobConfig(**cell)
    if cfg.theorem:
        return run_verify(cfg)
    return run_count(cfg)


def run_sweep(cfg: JobConfig) -> tuple[list[dict], Optional[dict], int]:
    """Cartesian product over the configured structure lists; deterministic
    output order, optional process pool."""
    cells: list[dict] = []
    for n in _parse_int_list(cfg.sweep_zn):
        d = asdict(cfg)
        d.update(kind="zn", n=n, sweep_zn="", sweep_fq="")
        cells.append(d)
    for q in _parse_int_list(cfg.sweep_fq):
        from .numtheory import factorize

        fac = factorize(q)
        if len(fac) != 1:
            raise ConfigError(f"sweep fq value {q} is not a prime power")
        d = asdict(cfg)
        d.update(kind="fq", p=fac[0][0], t=fac[0][1], modulus="", sweep_zn="", sweep_fq="")
        cells.append(d)
    if not cells:
        return [], {"cells": 0, "rows": 0, "failures": 0}, EXIT_OK
    jobs = cfg.jobs or os.cpu_count() or 1
    if jobs > 1 and len(cells) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell, cells))
    else:
        results = [_sweep_cell(c) for c in cells]
    rows: list[dict] = []
    worst = EXIT_OK
    failures = 0
    for cell_rows, cell_summary, code in results:
        rows.extend(cell_rows)
        if cell_summary:
            failures += cell_summary.get("failures", 0)
        if code == EXIT_VERIFY_FAIL:
            worst = EXIT_VERIFY_FAIL
        elif code == EXIT_BUDGET and worst == EXIT_OK:
            worst = EXIT_BUDGET
    summary = {"cells": len(cells), "rows": len(rows), "failures": failures}
    return rows, summary, worst


def _parse_int_list(text: str) -> list[int]:
    if not text:
        return []
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.replace(";", ",").split(",") if x]


def run_selftest(cfg: JobConfig) -> tuple[list[dict], Optional[dict], int]:
    """Scaled verification suites (< 60 s by default); --budget is seconds here."""
    from . import sweeps

    budget_s = cfg.budget if cfg.budget != DEFAULT_ENUM_BUDGET else 60.0
    jobs = cfg.jobs or os.cpu_count() or 1
    reports, ok, elapsed = sweeps.selftest(jobs=jobs, time_budget=budget_s)
    rows = []
    skipped = 0
    for rep in reports:
        row = {
            "suite": rep.name,
            "instances": rep.instances,
            "failures": rep.failures,
            "ok": rep.ok,
        }
        if rep.applicable is not None:
            row["applicable"] = rep.applicable
        if rep.max_residual is not None:
            row["max_residual"] = rep.max_residual
        if rep.max_ratio is not None:
            row["max_ratio"] = rep.max_ratio
        if rep.info.get("skipped"):
            skipped += 1
        rows.append(row)
    summary = {"suites": len(rows), "ok": ok, "skipped": skipped}
    if not cfg.no_meta:
        summary["elapsed_s"] = round(elapsed, 3)
    code = EXIT_OK if ok else EXIT_VERIFY_FAIL
    if skipped and ok:
        code = EXIT_BUDGET
    return rows, summary, code


def _attribute_wall(rows: list[dict], elapsed: float) -> None:
    if not rows:
        return
    per = 1000.0 * elapsed / len(rows)
    for r in rows:
        r["wall_ms"] = round(per, 6)


# ---------------------------------------------------------------------------
# output


def render(rows: list[dict], summary: Optional[dict], cfg: JobConfig) -> str:
    if cfg.no_meta:
        rows = [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows]
        if summary is not None:
            summary = {k: v for k, v in summary.items() if k != "elapsed_s"}
    if cfg.format == "csv":
        return _render_csv(rows)
    doc: dict = {}
    if not cfg.no_meta:
        doc["meta"] = {
            "tool": "subsetsieve",
            "version": __version__,
            "backend": backend.backend_name(),
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        }
    doc["rows"] = rows
    if summary is not None:
        doc["summary"] = summary
    return json.dumps(doc, indent=2) + "\n"


def _render_csv(rows: list[dict]) -> str:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def emit(text: str, output: str) -> None:
    """Write to stdout, or atomically (write-then-rename) to a file."""
    if not output:
        sys.stdout.write(text)
        return
    tmp = f"{output}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="TOML config file; flags override it")
    p.add_argument("--zn", type=int, metavar="N", help="residue ring Z_N")
    p.add_argument("--fq", metavar="P,T[,MODULUS]",
                   help="field F_{P^T}; MODULUS as colon-separated F_P coefficients, constant first")
    p.add_argument("--abelian", metavar="N1,N2,...", help="product of cyclic groups")
    p.add_argument("--domain", metavar="SPEC", help="full | list:E[;E...] | complement:E[;E...]")
    p.add_argument("--poly", metavar="COEFFS",
                   help="a_0,...,a_d (constant first; semicolon-separated for tuple elements)")
    p.add_argument("--k", metavar="A[..B]", help="subset size or inclusive range")
    p.add_argument("--b", metavar="all|ELT[;ELT...]", help="target values")
    p.add_argument("--method", choices=["auto", "bruteforce", "dp", "charsum", "closedform", "crosscheck"])
    p.add_argument("--theorem", choices=["zn", "fq", "abelian"])
    p.add_argument("--constant", choices=["hua", "dingqi", "cz"])
    p.add_argument("--tolerance", type=float, metavar="FLOAT")
    p.add_argument("--budget", type=int, metavar="INT")
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--jobs", type=int, metavar="INT")
    p.add_argument("--no-meta", action="store_true", default=None)
    p.add_argument("--output", "-o", metavar="FILE")
    p.add_argument("--sweep-zn", metavar="A..B|LIST", help="(sweep) Z_n moduli")
    p.add_argument("--sweep-fq", metavar="A..B|LIST", help="(sweep) prime-power field orders")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subsetsieve", description=__doc__)
    ap.add_argument("--version", action="version", version=f"subsetsieve {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, doc in [
        ("count", "count subset sums N_f(D, k, b)"),
        ("bound", "bound values and applicability, no counting"),
        ("verify", "exact deviations vs bounds, with summary"),
        ("sweep", "Cartesian sweep over structure lists"),
        ("selftest", "run the scaled verification suites"),
    ]:
        sp = sub.add_parser(name, help=doc)
        _add_common(sp)
    return ap


def config_from_args(args: argparse.Namespace) -> JobConfig:
    cfg = JobConfig()
    if args.config:
        with open(args.config) as fh:
            cfg = JobConfig.from_toml(fh.read())
    if args.zn is not None:
        cfg.kind, cfg.n = "zn", args.zn
    if args.fq is not None:
        parts = args.fq.split(",")
        if len(parts) < 2:
            raise ConfigError("--fq needs P,T")
        cfg.kind, cfg.p, cfg.t = "fq", int(parts[0]), int(parts[1])
        cfg.modulus = parts[2] if len(parts) > 2 else ""
    if args.abelian is not None:
        cfg.kind = "abelian"
        cfg.moduli = [int(x) for x in args.abelian.split(",")]
    for name in ("domain", "poly", "k", "b", "method", "theorem", "constant",
                 "tolerance", "budget", "format", "jobs", "output"):
        val = getattr(args, name)
        if val is not None:
            setattr(cfg, name, val)
    if args.no_meta is not None:
        cfg.no_meta = args.no_meta
    if args.sweep_zn is not None:
        cfg.sweep_zn = args.sweep_zn
    if args.sweep_fq is not None:
        cfg.sweep_fq = args.sweep_fq
    return cfg


HANDLERS = {
    "count": run_count,
    "bound": run_bound,
    "verify": run_verify,
    "sweep": run_sweep,
    "selftest": run_selftest,
}


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = config_from_args(args)
        rows, summary, code = HANDLERS[args.command](cfg)
        emit(render(rows, summary, cfg), cfg.output)
        return code
    except BudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
