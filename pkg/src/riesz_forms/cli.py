"""Command-line front end: ``riesz-forms verify | table | numeric``.

Exit status is 0 when no case failed, 1 when some case failed and 2 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from . import conformal, numeric, radial, riesz
from .errors import HypothesisViolation, RieszFormsError, UsageError
from .report import FAIL, INAPPLICABLE, PASS, CheckResult, outcome
from .scalars import parse_poly, parse_rational

SUITES = ("identities", "bernstein-sato", "residues", "convolution", "recurrence",
          "intertwining", "positivity", "numeric", "all")
NAMED_FAMILIES = ("riesz", "scalar", "knapp-stein", "self-dual")
SEMIGROUP_FAMILIES = ("riesz", "scalar", "knapp-stein")
SEMIGROUP_NU = (Fraction(1, 3), Fraction(5, 2), Fraction(3))
FORMATS = ("json", "text", "csv")
TABLE_HEADER = ["k", "constant_exact", "constant_float", "coeff_dd", "coeff_dd_power",
                "coeff_ddelta", "coeff_ddelta_power", "differential"]


@dataclass(frozen=True)
class SuiteConfig:
    """Validated parameters of one run."""

    suite: str
    n: Optional[int] = None
    p: Optional[int] = None
    k_max: int = 3
    family: Optional[str] = None
    A: Optional[str] = None
    B: Optional[str] = None
    grid_n: int = 256
    extent: float = 8.0
    tolerance: float = 5e-2
    lam: Optional[Fraction] = None
    fmt: str = "json"

    def __post_init__(self):
        if self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}; expected one of {', '.join(SUITES)}")
        if self.n is not None and self.n < 1:
            raise UsageError(f"--n must be positive, got {self.n}")
        if self.p is not None:
            if self.p < 0 or (self.n is not None and self.p > self.n):
                raise UsageError(f"--p must satisfy 0 <= p <= n, got p={self.p}, n={self.n}")
        if self.k_max < 0:
            raise UsageError(f"--k-max must be non-negative, got {self.k_max}")
        if self.family is not None and self.family not in riesz.FAMILIES:
            raise UsageError(f"unknown family {self.family!r}; expected one of {', '.join(riesz.FAMILIES)}")
        if self.family == "custom" and (self.A is None or self.B is None):
            raise UsageError("the custom family needs --A and --B")
        if self.tolerance <= 0:
            raise UsageError(f"--tolerance must be positive, got {self.tolerance}")
        if self.fmt not in FORMATS:
            raise UsageError(f"unknown format {self.fmt!r}")
        if self.family == "custom":
            parse_poly(self.A)
            parse_poly(self.B)

    def echo(self) -> Dict[str, Any]:
        out = {"suite": self.suite, "n": self.n, "p": self.p, "k_max": self.k_max,
               "family": self.family, "A": self.A, "B": self.B, "grid_n": self.grid_n,
               "extent": self.extent, "tolerance": self.tolerance,
               "lambda": None if self.lam is None else str(self.lam)}
        return out

    # parameter ranges ------------------------------------------------------
    def dims(self, default: Sequence[int]) -> List[int]:
        return [self.n] if self.n is not None else list(default)

    def degrees(self, n: int) -> List[int]:
        if self.p is not None:
            return [self.p] if self.p <= n else []
        return list(range(n + 1))

    def families(self, default: Sequence[str] = NAMED_FAMILIES) -> List[str]:
        return [self.family] if self.family is not None else list(default)

    def params(self, name: str, n: int, p: int) -> riesz.RieszParams:
        if name == "custom":
            return riesz.family("custom", n, p, parse_poly(self.A), parse_poly(self.B))
        return riesz.family(name, n, p)


@dataclass
class Report:
    suite: str
    config: Dict[str, Any]
    cases: List[CheckResult] = field(default_factory=list)

    @property
    def summary(self) -> Dict[str, int]:
        counts = {PASS: 0, FAIL: 0, INAPPLICABLE: 0}
        for c in self.cases:
            counts[c.status] += 1
        return counts

    @property
    def exit_code(self) -> int:
        return 1 if self.summary[FAIL] else 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "version": __version__,
            "config": self.config,
            "cases": [{"params": _case_params(c), "status": c.status, "detail": c.detail}
                      for c in self.cases],
            "summary": self.summary,
        }


def _plain(v):
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    return str(v)


def _case_params(c: CheckResult) -> Dict[str, Any]:
    out = {"check": c.name}
    out.update({k: _plain(v) for k, v in c.params.items()})
    return out


# --------------------------------------------------------------------------
# case execution

Case = Callable[[], CheckResult]


def _guard(name: str, params: Dict[str, Any], fn: Case) -> CheckResult:
    try:
        return fn()
    except HypothesisViolation as exc:
        return CheckResult(name, INAPPLICABLE, params, str(exc))
    except RieszFormsError as exc:
        return CheckResult(name, FAIL, params, f"{type(exc).__name__}: {exc}")


def _run_one(case: Tuple[str, Dict[str, Any], Case]) -> CheckResult:
    return _guard(*case)


def run_cases(cases: List[Tuple[str, Dict[str, Any], Case]]) -> List[CheckResult]:
    """Run cases, in parallel when RIESZ_FORMS_THREADS > 1; order is kept."""
    workers = min(numeric.worker_count(), max(len(cases), 1))
    if workers <= 1:
        return [_run_one(c) for c in cases]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, cases))


def _case(name: str, params: Dict[str, Any], fn, *args, **kwargs):
    return (name, params, partial(fn, *args, **kwargs))


# --------------------------------------------------------------------------
# suites

def _identity_cases(cfg: SuiteConfig):
    cases = []
    for n in cfg.dims(range(1, 7)):
        cases.append(_case("classical specialization", {"n": n}, riesz.verify_classical, n))
        for p in cfg.degrees(n):
            cases.append(_case("radial identity", {"n": n, "p": p}, radial.verify_radial_identity, n, p))
            for fam in cfg.families():
                cases.append(_case("double fourier", {"family": fam, "n": n, "p": p},
                                   _double_fourier, cfg, fam, n, p))
    return cases


def _double_fourier(cfg, fam, n, p):
    return riesz.verify_double_fourier(cfg.params(fam, n, p))


def _bernstein_sato_cases(cfg: SuiteConfig):
    cases = []
    for fam in cfg.families():
        for n in cfg.dims(range(1, 7)):
            for p in cfg.degrees(n):
                for k in range(1, cfg.k_max + 1):
                    cases.append(_case("bernstein-sato", {"family": fam, "n": n, "p": p, "k": k},
                                       _bernstein_sato, cfg, fam, n, p, k))
    return cases


def _bernstein_sato(cfg, fam, n, p, k):
    return riesz.verify_bernstein_sato(cfg.params(fam, n, p), k)


def _residue_cases(cfg: SuiteConfig):
    cases = []
    for fam in cfg.families():
        for n in cfg.dims(range(1, 7)):
            for p in cfg.degrees(n):
                for k in range(0, cfg.k_max + 1):
                    cases.append(_case("residue", {"family": fam, "n": n, "p": p, "k": k},
                                       _residue, cfg, fam, n, p, k))
    return cases


def _residue(cfg, fam, n, p, k):
    return riesz.verify_residue(cfg.params(fam, n, p), k)


def _convolution(cfg, fam, n, p):
    params = cfg.params(fam, n, p)
    meta = {"family": fam, "n": n, "p": p}
    got = riesz.convolution_constant(params)
    want = riesz.convolution_closed_form(params)
    detail = f"K(l) = {got}"
    if cfg.lam is not None:
        try:
            detail += f"; K({cfg.lam}) = {got.evaluate(cfg.lam):.17g}"
        except RieszFormsError as exc:
            detail += f"; K({cfg.lam}) undefined: {exc}"
    return outcome("convolution", got == want, meta, detail if got == want else f"{got} vs {want}")


def _convolution_cases(cfg: SuiteConfig):
    cases = []
    for n in cfg.dims(range(1, 7)):
        for p in cfg.degrees(n):
            for fam in cfg.families():
                cases.append(_case("convolution", {"family": fam, "n": n, "p": p},
                                   _convolution, cfg, fam, n, p))
            for fam in cfg.families(SEMIGROUP_FAMILIES):
                for nu in SEMIGROUP_NU:
                    cases.append(_case("semigroup", {"family": fam, "n": n, "p": p, "nu": str(nu)},
                                       _semigroup, cfg, fam, n, p, nu))
    return cases


def _semigroup(cfg, fam, n, p, nu):
    params = cfg.params(fam, n, p)
    return riesz.verify_semigroup(params, params, nu)


def _recurrence_cases(cfg: SuiteConfig):
    cases = []
    for n in cfg.dims(range(1, 7)):
        for p in cfg.degrees(n):
            for N in range(1, cfg.k_max + 1):
                cases.append(_case("recurrence", {"n": n, "p": p, "N": N},
                                   conformal.verify_recurrence, n, p, N))
    return cases


def _intertwining_cases(cfg: SuiteConfig):
    cases = []
    for n in cfg.dims((3, 4)):
        for p in cfg.degrees(n):
            for j in range(1, n + 1):
                cases.append(_case("intertwining (Knapp-Stein)", {"n": n, "p": p, "j": j},
                                   conformal.verify_intertwining_knapp_stein, n, p, j))
            for N in range(0, min(cfg.k_max, 2) + 1):
                for j in range(1, n + 1):
                    cases.append(_case("intertwining (Branson-Gover)",
                                       {"n": n, "p": p, "N": N, "j": j},
                                       conformal.verify_intertwining_bg, n, p, N, j))
        if n % 2 == 0:
            cases.append(_case("beurling-ahlfors", {"n": n}, conformal.beurling_ahlfors_check, n))
    return cases


def _positivity_cases(cfg: SuiteConfig):
    cases = []
    for n in cfg.dims(range(1, 7)):
        for p in cfg.degrees(n):
            cases.append(_case("complementary interval", {"n": n, "p": p},
                               conformal.verify_complementary_interval, n, p))
            for j in range(1, 5):
                cases.append(_case("z ratio", {"n": n, "p": p, "j": j},
                                   conformal.verify_z_ratio, n, p, j))
    return cases


def _numeric_refinement(cfg, fam, n, p, lam0):
    params = cfg.params(fam, n, p)
    sizes = [cfg.grid_n // 4, cfg.grid_n // 2, cfg.grid_n]
    meta = {"family": fam, "n": n, "p": p, "lambda": str(lam0), "grid_n": cfg.grid_n}
    runs = numeric.refinement_study(params, lam0, sizes, extent=cfg.extent, tolerance=cfg.tolerance)
    errors = [r.report.relative_l2 for r in runs]
    ok = runs[-1].report.passed and numeric.is_decreasing(errors)
    shown = ", ".join(f"N={N}: {e:.3e}" for N, e in zip(sizes, errors))
    return outcome("numeric cross-check", ok, meta,
                   f"relative interior L2 errors {shown}; tolerance {cfg.tolerance:g}; "
                   f"zero bin {runs[-1].zero_bin}")


def _numeric_involution(n, samples):
    err = numeric.involution_error(n, samples)
    return outcome("reflection involution", err <= 1e-10, {"n": n, "grid_n": samples},
                   f"relative L2 error {err:.3e}")


def _numeric_cases(cfg: SuiteConfig):
    cases = []
    lam0 = Fraction(-1) if cfg.lam is None else cfg.lam
    for n in cfg.dims((2,)):
        for fam in cfg.families(("scalar", "knapp-stein")):
            for p in (cfg.degrees(n) if cfg.p is not None else [0, 1]):
                cases.append(_case("numeric cross-check",
                                   {"family": fam, "n": n, "p": p, "lambda": str(lam0)},
                                   _numeric_refinement, cfg, fam, n, p, lam0))
        if n % 2 == 0:
            cases.append(_case("reflection involution", {"n": n, "grid_n": 128},
                               _numeric_involution, n, 128))
    return cases


SUITE_BUILDERS = {
    "identities": _identity_cases,
    "bernstein-sato": _bernstein_sato_cases,
    "residues": _residue_cases,
    "convolution": _convolution_cases,
    "recurrence": _recurrence_cases,
    "intertwining": _intertwining_cases,
    "positivity": _positivity_cases,
    "numeric": _numeric_cases,
}


def run_suite(cfg: SuiteConfig) -> Report:
    names = [s for s in SUITES if s != "all"] if cfg.suite == "all" else [cfg.suite]
    cases = []
    for s in names:
        cases.extend(SUITE_BUILDERS[s](cfg))
    return Report(cfg.suite, cfg.echo(), run_cases(cases))


# --------------------------------------------------------------------------
# residue table

def residue_table(n: int, p: int, k_max: int, params: riesz.RieszParams) -> List[Dict[str, Any]]:
    """Rows (k, constant, operator coefficients) of the residues at l = -n-2k.

    The residue is written constant * (a (delta d)^k + b (d delta)^k) with
    the leading nonzero coefficient normalized to (-1)^k, so that on
    functions the operator reads constant * Delta^k.  At k = 0 the pair
    (a, b) weights the two projectors unless the residue is differential.
    """
    if (params.n, params.p) != (n, p):
        raise UsageError("table parameters do not match the family")
    rows = []
    for k in range(k_max + 1):
        res = riesz.residue_at(params, k)
        full_a = res.constant * res.multiplier.P
        full_b = res.constant * res.multiplier.Q
        lead = full_b if full_a.is_zero else full_a
        if lead.is_zero:
            constant, a, b = lead, Fraction(0), Fraction(0)
        else:
            constant = lead * (-1) ** k
            a = (full_a / constant).as_rational().constant_value() if not full_a.is_zero else Fraction(0)
            b = (full_b / constant).as_rational().constant_value() if not full_b.is_zero else Fraction(0)
        op = riesz.DiffOpLP(n, p, {k: (a, b)})
        rows.append({
            "k": k,
            "constant_exact": str(constant),
            "constant_float": _float_or_none(constant),
            "coeff_dd": str(a),
            "coeff_dd_power": k,
            "coeff_ddelta": str(b),
            "coeff_ddelta_power": k,
            "differential": res.differential,
            "operator": str(op),
        })
    return rows


def _float_or_none(e) -> Optional[float]:
    try:
        return float(e)
    except RieszFormsError:
        return None


def _table_text(rows) -> str:
    lines = []
    for r in rows:
        f = "nan" if r["constant_float"] is None else f"{r['constant_float']:.17g}"
        lines.append(f"k={r['k']}  constant={r['constant_exact']} (~{f})  operator: {r['operator']}"
                     + ("" if r["differential"] else "  [not differential]"))
    return "\n".join(lines) + "\n"


def _table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    for r in rows:
        f = "" if r["constant_float"] is None else f"{r['constant_float']:.17g}"
        w.writerow([r["k"], r["constant_exact"], f, r["coeff_dd"], r["coeff_dd_power"],
                    r["coeff_ddelta"], r["coeff_ddelta_power"], str(r["differential"]).lower()])
    return buf.getvalue()


# --------------------------------------------------------------------------
# output

def emit_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def report_text(rep: Report) -> str:
    lines = []
    for c in rep.cases:
        params = " ".join(f"{k}={_plain(v)}" for k, v in c.params.items())
        lines.append(f"[{c.status}] {c.name} {params}: {c.detail}")
    s = rep.summary
    lines.append(f"suite {rep.suite}: {s[PASS]} pass, {s[FAIL]} fail, {s[INAPPLICABLE]} inapplicable")
    return "\n".join(lines) + "\n"


def report_csv(rep: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "params", "status", "detail"])
    for c in rep.cases:
        params = json.dumps({k: _plain(v) for k, v in c.params.items()}, sort_keys=True)
        w.writerow([c.name, params, c.status, c.detail])
    return buf.getvalue()


def render_report(rep: Report, fmt: str) -> str:
    if fmt == "json":
        return emit_json(rep.to_dict())
    if fmt == "text":
        return report_text(rep)
    return report_csv(rep)


def _write(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# --------------------------------------------------------------------------
# argument parsing

def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=int, help="ambient dimension")
    sub.add_argument("--p", type=int, help="form degree")
    sub.add_argument("--k-max", type=int, default=3, help="largest k (or N) to check")
    sub.add_argument("--family", help=f"one of {', '.join(riesz.FAMILIES)}")
    sub.add_argument("--A", help="custom A(l): rational coefficients, constant term first "
                                 "(use --A=-1,2 for a leading minus sign)")
    sub.add_argument("--B", help="custom B(l), same format as --A")
    sub.add_argument("--lambda", dest="lam", type=_rational,
                     help="value of l for floating evaluations (rational, e.g. -1 or 1/2)")
    sub.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
    sub.add_argument("--out", help="output file (default: standard output)")


def _numeric_opts(sub: argparse.ArgumentParser, tolerance: float) -> None:
    sub.add_argument("--grid-n", type=int, default=256, help="samples per axis (power of two)")
    sub.add_argument("--extent", type=float, default=8.0, help="half-width L of the cube")
    sub.add_argument("--tolerance", type=float, default=tolerance)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riesz-forms",
                                     description="Riesz distributions on differential forms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    v = subs.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=SUITES, required=True)
    _common(v)
    _numeric_opts(v, 5e-2)

    t = subs.add_parser("table", help="residues at l = -n-2k as a table")
    _common(t)

    m = subs.add_parser("numeric", help="FFT route against direct quadrature")
    _common(m)
    _numeric_opts(m, 5e-2)
    return parser


def _config(args, suite: str) -> SuiteConfig:
    return SuiteConfig(suite=suite, n=args.n, p=args.p, k_max=args.k_max, family=args.family,
                       A=args.A, B=args.B, grid_n=getattr(args, "grid_n", 256),
                       extent=getattr(args, "extent", 8.0),
                       tolerance=getattr(args, "tolerance", 5e-2), lam=args.lam, fmt=args.fmt)


def _cmd_verify(args) -> int:
    rep = run_suite(_config(args, args.suite))
    _write(render_report(rep, args.fmt), args.out)
    return rep.exit_code


def _cmd_table(args) -> int:
    cfg = _config(args, "residues")
    if cfg.n is None or cfg.p is None:
        raise UsageError("table needs --n and --p")
    params = cfg.params(cfg.family or "riesz", cfg.n, cfg.p)
    rows = residue_table(cfg.n, cfg.p, cfg.k_max, params)
    if args.fmt == "json":
        text = emit_json({"family": params.name, "n": cfg.n, "p": cfg.p, "A": str(params.A),
                          "B": str(params.B), "version": __version__, "rows": rows})
    elif args.fmt == "text":
        text = _table_text(rows)
    else:
        text = _table_csv(rows)
    _write(text, args.out)
    return 0


def _cmd_numeric(args) -> int:
    cfg = _config(args, "numeric")
    if args.fmt != "csv":
        rep = run_suite(cfg)
        _write(render_report(rep, args.fmt), args.out)
        return rep.exit_code
    n = cfg.n or 2
    p = 0 if cfg.p is None else cfg.p
    lam0 = Fraction(-1) if cfg.lam is None else cfg.lam
    params = cfg.params(cfg.family or "scalar", n, p)
    grid = numeric.Grid(n, cfg.extent, cfg.grid_n)
    f = numeric.sample(numeric.default_test_form(n, p), grid)
    _write(numeric.to_csv(numeric.riesz_fft(params, lam0, f)), args.out)
    return 0


COMMANDS = {"verify": _cmd_verify, "table": _cmd_table, "numeric": _cmd_numeric}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"riesz-forms: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
