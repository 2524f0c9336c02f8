"""Command line: ``primecover table | audit | selftest``.

Exit codes: 0 pass, 1 mathematical mismatch, 2 resource or limit error,
3 configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction

from sympy import integer_nthroot, isprime

from . import reports
from .convolution import convolution_identity_check
from .cover import four_prime_bound, min_cover_exponent, three_prime_bound, verify_product_cover
from .density import density_probe, mika_default_X
from .errors import DomainError, LimitError, PrimeCoverError, TheoremViolation
from .exceptional import compare_with_published_table, exceptional_table, table_csv, trouble_index_report
from .groups import enumerate_subgroups_of_index, unit_group
from .hypotheses import third_variant_y0
from .selfcheck import run_selftest
from .subgroup_primes import least_P2_in_cosets, least_prime_in_subgroup

EXIT_OK, EXIT_MISMATCH, EXIT_LIMIT, EXIT_CONFIG = 0, 1, 2, 3
AUDIT_KINDS = ("cover", "t1", "p2", "density", "convolution", "trouble-indices")


class ConfigError(Exception):
    pass


def parse_fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"not a rational number: {text!r}") from e


def parse_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_int_list(text):
    try:
        return tuple(int(s) for s in str(text).split(",") if s.strip())
    except ValueError as e:
        raise ConfigError(f"not a comma-separated integer list: {text!r}") from e


@dataclass
class RunConfig:
    command: str = "audit"
    kind: str = "cover"
    q_lo: int = 50
    q_hi: int = 60
    k: int = 3
    y: int | None = None
    exponent: Fraction | None = None
    ell_max: int = 29
    y0: int | None = None
    eta: Fraction = Fraction(11, 32)
    mode: str = "arithmetic"
    density_mode: str = "strict"
    regime: str = "iwa"
    indices: tuple = (2, 3, 4, 5)
    primes_only: bool = False
    squarefree: bool = False
    eps_prime: float = 0.0
    out: str | None = None
    format: str = "json"
    jobs: int = 1
    ceiling: int | None = None
    max_order: int = 16
    random: int = 10_000

    _parsers = {
        "q_lo": int, "q_hi": int, "k": int, "y": int, "exponent": parse_fraction, "ell_max": int,
        "y0": int, "eta": parse_fraction, "indices": parse_int_list, "primes_only": parse_bool,
        "squarefree": parse_bool, "eps_prime": float, "jobs": int, "ceiling": int,
        "max_order": int, "random": int,
    }

    def to_text(self):
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                s = ""
            elif isinstance(v, tuple):
                s = ",".join(map(str, v))
            elif isinstance(v, bool):
                s = "true" if v else "false"
            else:
                s = str(v)
            lines.append(f"{f.name}={s}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_value(cls, key, text):
        names = {f.name for f in fields(cls)}
        if key not in names:
            raise ConfigError(f"unknown config key {key!r}")
        if text == "":
            return None
        parser = cls._parsers.get(key, str)
        try:
            return parser(text)
        except ValueError as e:
            raise ConfigError(f"bad value for {key}: {text!r}") from e

    @classmethod
    def from_text(cls, text, base=None):
        values = dataclasses.asdict(base) if base else {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = cls.parse_value(key.replace("-", "_"), val)
        return cls(**values)

    def validate(self):
        if self.command not in ("table", "audit", "selftest"):
            raise ConfigError(f"unknown command {self.command!r}")
        if self.kind not in AUDIT_KINDS:
            raise ConfigError(f"unknown audit kind {self.kind!r}")
        if self.q_lo < 3 or self.q_hi < self.q_lo:
            raise ConfigError(f"empty or invalid modulus range [{self.q_lo}, {self.q_hi}]")
        if self.k not in (3, 4):
            raise ConfigError("k must be 3 or 4")
        if self.y is not None and self.y < 2:
            raise ConfigError("y must be >= 2")
        if self.exponent is not None and self.exponent <= 0:
            raise ConfigError("exponent must be positive")
        if self.eta <= Fraction(1, 3) or self.eta > 1:
            raise ConfigError("eta must lie in (1/3, 1]")
        if self.mode not in ("arithmetic", "search"):
            raise ConfigError("mode must be arithmetic or search")
        if self.density_mode not in ("strict", "nonstrict"):
            raise ConfigError("density mode must be strict or nonstrict")
        if self.regime not in ("iwa", "mika"):
            raise ConfigError("regime must be iwa or mika")
        if not self.indices or min(self.indices) < 1:
            raise ConfigError("indices must be positive")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.ceiling is not None and self.ceiling < 2:
            raise ConfigError("ceiling must be >= 2")
        if self.ell_max < 2 or self.max_order < 1 or self.random < 0:
            raise ConfigError("ell-max, max-order and random must be positive")
        return self


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="primecover", description="Sumset and prime-product audits.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="key=value file; flags given on the command line take precedence")
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--jobs", type=int)

    t = sub.add_parser("table", help="sizes of exceptional sets in Z/l")
    common(t)
    t.add_argument("--ell-max", type=int)

    a = sub.add_parser("audit", help="run one audit over a modulus range")
    common(a)
    a.add_argument("--kind", choices=AUDIT_KINDS)
    a.add_argument("--q-lo", type=int)
    a.add_argument("--q-hi", type=int)
    a.add_argument("--k", type=int)
    a.add_argument("--y", type=int, help="literal bound (cover, density X, convolution x)")
    a.add_argument("--exponent", help="bound q^exponent, rational such as 3/2")
    a.add_argument("--ell-max", type=int)
    a.add_argument("--y0", type=int, help="largest index for trouble indices")
    a.add_argument("--eta", help="density NUM/DEN")
    a.add_argument("--mode", choices=("arithmetic", "search"))
    a.add_argument("--density-mode", choices=("strict", "nonstrict"))
    a.add_argument("--regime", choices=("iwa", "mika"))
    a.add_argument("--indices", help="comma-separated subgroup indices")
    a.add_argument("--primes-only", action="store_const", const="true")
    a.add_argument("--squarefree", action="store_const", const="true")
    a.add_argument("--eps-prime")
    a.add_argument("--ceiling", type=int)

    s = sub.add_parser("selftest", help="exhaustive small-group suites")
    common(s)
    s.add_argument("--max-order", type=int)
    s.add_argument("--random", type=int)
    return p


def config_from_args(argv):
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(command=ns.command)
    if getattr(ns, "config", None):
        try:
            with open(ns.config) as fh:
                cfg = RunConfig.from_text(fh.read(), cfg)
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from e
        cfg.command = ns.command
    for key, val in vars(ns).items():
        if key in ("command", "config") or val is None:
            continue
        setattr(cfg, key, val if isinstance(val, int) else RunConfig.parse_value(key, val))
    return cfg.validate()


# -- audit rows -----------------------------------------------------------------


def ceil_power(q, exponent):
    """Least integer ``y`` with ``y >= q^exponent`` (exact for rational exponents)."""
    e = Fraction(exponent)
    root, exact = integer_nthroot(q**e.numerator, e.denominator)
    return int(root) if exact else int(root) + 1


def _moduli(cfg):
    qs = range(cfg.q_lo, cfg.q_hi + 1)
    return [q for q in qs if isprime(q)] if cfg.primes_only else list(qs)


def _cover_rows(q, cfg):
    if cfg.y is not None:
        y = cfg.y
    elif cfg.exponent is not None:
        y = ceil_power(q, cfg.exponent)
    else:
        y = three_prime_bound(q) if cfg.k == 3 else four_prime_bound(q, cfg.ceiling)
    rep = verify_product_cover(q, y, cfg.k)
    mc = min_cover_exponent(q, cfg.k, cfg.ceiling)
    row = rep.to_json()
    row["min_cover"] = {"y_star": mc.y_star, "exponent": mc.exponent, "exceeded": mc.exceeded}
    row["ok"] = rep.covered
    return [row]


def _subgroups(q, cfg):
    U = unit_group(q)
    for Y in cfg.indices:
        for i, H in enumerate(enumerate_subgroups_of_index(U.group, Y)):
            yield U, Y, i, H


def _t1_rows(q, cfg):
    rows = []
    for U, Y, i, H in _subgroups(q, cfg):
        a = least_prime_in_subgroup(U, H, cfg.ceiling)
        row = a.to_json()
        row["params"]["subgroup"] = i
        row["ok"] = not a.exceeded
        rows.append(row)
    return rows


def _p2_rows(q, cfg):
    rows = []
    for U, Y, i, H in _subgroups(q, cfg):
        a = least_P2_in_cosets(U, H, cfg.ceiling, cfg.squarefree)
        row = a.to_json()
        row["params"]["subgroup"] = i
        row["ok"] = not a.exceeded
        rows.append(row)
    return rows


def _density_rows(q, cfg):
    if cfg.y is not None:
        X = cfg.y
    elif cfg.regime == "iwa":
        X = ceil_power(q, cfg.exponent if cfg.exponent is not None else Fraction(3, 2))
    else:
        X = mika_default_X(q)
    row = density_probe(q, X, cfg.regime, cfg.eps_prime).to_json()
    row["ok"] = True
    return [row]


def _convolution_rows(q, cfg):
    rows = []
    for U, Y, i, H in _subgroups(q, cfg):
        if cfg.y is not None:
            x = cfg.y
        else:
            a = least_prime_in_subgroup(U, H, cfg.ceiling)
            x = (a.least_prime - 1) if a.least_prime else None
        if x is None or x < 2:
            rows.append({"kind": "convolution", "q": q, "params": {"Y": Y, "subgroup": i, "x": x},
                         "verdict": "no_admissible_x", "ok": True})
            continue
        res = convolution_identity_check(U, H, x)
        row = res.to_json()
        row["params"]["subgroup"] = i
        row["ok"] = res.identity_ok or not res.hypothesis_ok
        rows.append(row)
    return rows


ROW_BUILDERS = {
    "cover": _cover_rows,
    "t1": _t1_rows,
    "p2": _p2_rows,
    "density": _density_rows,
    "convolution": _convolution_rows,
}

CSV_COLUMNS = {
    "cover": ["q", "k", "y", "verdict", "min_exponent"],
    "t1": ["q", "Y", "subgroup", "least_prime", "observed", "theorem"],
    "p2": ["q", "Y", "subgroup", "max", "reference", "verdict"],
    "density": ["q", "X", "regime", "violating", "classes", "eta_formula", "eta_empirical"],
    "convolution": ["q", "Y", "subgroup", "x", "verdict", "relative_error"],
}


def _flat(row):
    out = {"q": row.get("q"), "verdict": row.get("verdict")}
    out.update(row.get("params", {}))
    out.update(row.get("exponents", {}) or {})
    out.update(row.get("witnesses", {}) or {})
    if "min_cover" in row:
        out["min_exponent"] = row["min_cover"]["exponent"]
    return out


def _rows_for(args):
    kind, q, cfg = args
    return ROW_BUILDERS[kind](q, cfg)


def run_rows(cfg):
    tasks = [(cfg.kind, q, cfg) for q in _moduli(cfg)]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            parts = list(pool.map(_rows_for, tasks, chunksize=max(1, len(tasks) // (4 * cfg.jobs))))
    else:
        parts = [_rows_for(t) for t in tasks]
    return [r for part in parts for r in part]


def _emit(text, cfg):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_table(cfg):
    rows = exceptional_table(cfg.ell_max, jobs=cfg.jobs)
    _emit(table_csv(rows), cfg)
    diff = compare_with_published_table(rows, cfg.ell_max)
    for m in diff["mismatches"]:
        print(f"mismatch ell={m['ell']}: published {m['published']} computed {m['computed']}", file=sys.stderr)
    return EXIT_MISMATCH if diff["mismatches"] else EXIT_OK


def cmd_audit(cfg):
    if cfg.kind == "trouble-indices":
        y_max = cfg.y0 if cfg.y0 is not None else third_variant_y0(cfg.eta)
        rep = trouble_index_report(cfg.eta, y_max, jobs=cfg.jobs)
        rep["density_mode"] = cfg.density_mode
        rep["selected"] = rep[f"{cfg.mode}_{cfg.density_mode}"]
        if cfg.format == "csv":
            text = reports.to_csv(rep["discrepancies"], ["Y", "kind", "detail"])
        else:
            text = reports.dumps(rep) + "\n"
        _emit(text, cfg)
        return EXIT_OK
    rows = run_rows(cfg)
    if cfg.format == "csv":
        text = reports.to_csv([_flat(r) for r in rows], CSV_COLUMNS[cfg.kind])
    else:
        text = reports.to_jsonl(rows)
    _emit(text, cfg)
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_MISMATCH


def cmd_selftest(cfg):
    results = run_selftest(cfg.max_order, cfg.random)
    text = "".join(r.line() + "\n" for r in results)
    _emit(text, cfg)
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"selftest failure in {r.failure.get('check', r.name)}: {r.failure}", file=sys.stderr)
    return EXIT_MISMATCH if failed else EXIT_OK


def main(argv=None):
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if cfg.command == "table":
            return cmd_table(cfg)
        if cfg.command == "audit":
            return cmd_audit(cfg)
        return cmd_selftest(cfg)
    except LimitError as e:
        print(f"limit: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except TheoremViolation as e:
        print(f"theorem violation: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except DomainError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PrimeCoverError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
