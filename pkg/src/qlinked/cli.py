"""Command-line entry point: ``qlinked <subcommand> ...``.

Every subcommand prints canonical JSON (sorted keys) or aligned text.
Exit status is 0 on success, 1 on a refuted check or runtime error, 2 on usage errors.
"""
from __future__ import annotations

import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import elim, holo, partitions, qseries, transfer
from .qalg import RationalQ

DEFAULT_DEGREE = 8
DEFAULT_PREFIX = 20


def default_order() -> int:
    v = os.environ.get("QLINKED_Q_ORDER")
    return int(v) if v else 60


TARGET_ALIASES = {"min1": "1", "min2": "2", "min3": "3", "once1": "a"}


class Refuted(Exception):
    """A check ran to completion and failed."""


def emit(obj, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False))
    else:
        click.echo(_as_text(obj))


def _scalar_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _as_text(obj, indent: int = 0) -> str:
    pad = " " * indent
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        lines = []
        for k in sorted(obj, key=str):
            v = obj[k]
            if _scalar_list(v):
                lines.append(f"{pad}{str(k):<{width}} : {' '.join(str(x) for x in v)}")
            elif isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{str(k):<{width}} :")
                lines.append(_as_text(v, indent + 2))
            else:
                lines.append(f"{pad}{str(k):<{width}} : {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        if _scalar_list(obj):
            return "\n".join(f"{pad}{x}" for x in obj)
        out = []
        for v in obj:
            if _scalar_list(v):
                out.append(f"{pad}{' '.join(str(x) for x in v)}")
            else:
                out.append(f"{pad}-")
                out.append(_as_text(v, indent + 2))
        return "\n".join(out)
    return f"{pad}{obj}"


def load_ideal(ideal: str) -> partitions.IdealSpec:
    p = Path(ideal)
    if p.is_file():
        return partitions.load_spec(p.read_text())
    return partitions.get_preset(ideal)


def resolve_target(spec: partitions.IdealSpec, target: str) -> str:
    t = TARGET_ALIASES.get(target.lower(), target)
    if t not in spec.targets:
        raise click.BadParameter(f"unknown target {target!r}; have {sorted(spec.targets)}")
    return t


class Cmd(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except Refuted as exc:
            click.echo(f"refuted: {exc}", err=True)
            ctx.exit(1)
        except Exception as exc:  # diagnostics go to stderr, status 1
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            ctx.exit(1)


fmt_option = click.option("--output", "fmt", type=click.Choice(["json", "text"]), default="json")
ideal_option = click.option("--ideal", required=True, help="preset name or spec file")


@click.group(cls=Cmd)
def cli():
    """Linked partition ideals: systems, q-difference equations, recurrences and sum sides."""


@cli.command()
@ideal_option
@fmt_option
def tails(ideal, fmt):
    """Tails with largest part at most the modulus."""
    spec = load_ideal(ideal)
    ts = partitions.compute_tails(spec.unrestricted())
    emit({"schema": "qlinked.tails/1", "ideal": spec.name, "modulus": spec.modulus,
          "tails": [t.to_text() for t in ts]}, fmt)


@cli.command()
@ideal_option
@fmt_option
def linking(ideal, fmt):
    """Linking set and span of every tail."""
    emit(partitions.compute_linking(load_ideal(ideal)).to_dict(), fmt)


@cli.command()
@ideal_option
@click.option("--raw", is_flag=True, help="skip merging proportional rows")
@fmt_option
def system(ideal, raw, fmt):
    """The q-difference system over tail generating functions."""
    table = partitions.compute_linking(load_ideal(ideal))
    s = transfer.build_system(table)
    emit((s if raw else transfer.merge_proportional(s)).to_dict(), fmt)


def _equation(ideal, target):
    spec = load_ideal(ideal)
    t = resolve_target(spec, target)
    return spec, t, elim.target_equation(transfer.framed_system(spec), t)


@cli.command()
@ideal_option
@click.option("--target", required=True)
@click.option("--golden", type=click.Path(exists=True, dir_okay=False))
@fmt_option
def eliminate(ideal, target, golden, fmt):
    """Single q-difference equation for a target; --golden compares exactly."""
    spec, t, eq = _equation(ideal, target)
    out = eq.to_dict()
    out["ideal"], out["target"] = spec.name, t
    if golden:
        want = json.loads(Path(golden).read_text())
        if isinstance(want, dict):
            want = want.get("coeffs", want)
        if isinstance(want, list):
            want = {f"p{i * eq.m}": c for i, c in enumerate(want)}
        if want != out["coeffs"]:
            bad = sorted(k for k in set(want) | set(out["coeffs"]) if want.get(k) != out["coeffs"].get(k))
            emit(out, fmt)
            raise Refuted(f"coefficients differ from golden file: {', '.join(bad)}")
        out["golden"] = "match"
    emit(out, fmt)


@cli.command()
@ideal_option
@click.option("--target", required=True)
@click.option("--prefix", default=DEFAULT_PREFIX, show_default=True, type=click.IntRange(1))
@fmt_option
def recurrence(ideal, target, prefix, fmt):
    """Recurrence for the x^M coefficients and its first values."""
    spec, t, eq = _equation(ideal, target)
    seq = holo.holo_from_qdiff(eq)
    out = seq.rec.to_dict()
    out.update({"ideal": spec.name, "target": t,
                "initials": [v.to_text() for v in seq.initials],
                "values": [v.to_text() for v in holo.unroll(seq, prefix - 1)]})
    emit(out, fmt)


def _load_sum(ref: str) -> qseries.AndrewsSum:
    p = Path(ref)
    if p.is_file():
        return qseries.AndrewsSum.from_dict(json.loads(p.read_text()))
    return qseries.load_sum(ref)


@cli.command()
@click.argument("sum_ref")
@click.option("--degree", default=DEFAULT_DEGREE, show_default=True, type=click.IntRange(0))
@click.option("--order", type=click.IntRange(1))
@click.option("--exact", is_flag=True, help="print rational functions instead of series")
@fmt_option
def expand(sum_ref, degree, order, exact, fmt):
    """Coefficients of x^0..x^degree of an Andrews-form sum (identity name or JSON file)."""
    s = _load_sum(sum_ref)
    N = order or default_order()
    out = {"schema": "qlinked.expansion/1", "sum": s.to_dict(), "degree": degree}
    if exact:
        out["values"] = [v.to_text() for v in qseries.andrews_expand(s, degree)]
    else:
        out["q_order"] = N
        out["series"] = [list(x.coeffs) for x in qseries.andrews_series(s, degree, N)]
    emit(out, fmt)


@cli.command("enumerate")
@ideal_option
@click.option("--target", default=None)
@click.option("--degree", default=DEFAULT_DEGREE, show_default=True, type=click.IntRange(0))
@click.option("--order", type=click.IntRange(1))
@fmt_option
def enumerate_cmd(ideal, target, degree, order, fmt):
    """Brute-force counts c(m, n) of members with m parts and weight n < order."""
    spec = load_ideal(ideal)
    if target:
        spec = spec.restricted(resolve_target(spec, target))
    N = order or default_order()
    c = partitions.enumerate_counts(spec, N - 1)
    emit({"schema": "qlinked.counts/1", "ideal": spec.name, "restriction": spec.restriction.to_text(),
          "q_order": N, "degree": degree,
          "counts": [[c.get((m, n), 0) for n in range(N)] for m in range(degree + 1)]}, fmt)


@cli.command()
@ideal_option
@click.option("--target", required=True)
@click.option("--degree", default=7, show_default=True, type=click.IntRange(2))
@click.option("--order", default=40, show_default=True, type=click.IntRange(2))
@click.option("--r-max", default=2, show_default=True, type=click.IntRange(1, 3))
@click.option("--q-max", default=5, show_default=True, type=click.IntRange(1), help="bound for Q entries")
@click.option("--bases", default="1,2,3", show_default=True, help="comma list of k for (q^k;q^k)")
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(1))
@fmt_option
def guess(ideal, target, degree, order, r_max, q_max, bases, jobs, fmt):
    """Search Andrews-form sums matching the enumerated x^0..x^degree coefficients."""
    from .qalg import SeriesQ
    spec = load_ideal(ideal)
    spec = spec.restricted(resolve_target(spec, target))
    c = partitions.enumerate_counts(spec, order - 1)
    rows = [SeriesQ([c.get((m, n), 0) for n in range(order)], order) for m in range(degree + 1)]
    ks = [int(k) for k in bases.split(",") if k.strip()]
    box = qseries.SearchBox(r_max=r_max, bases=tuple((k, k) for k in ks),
                            q_diag=tuple(Fraction(k, 2) for k in range(1, 2 * q_max + 1)),
                            q_cross=tuple(Fraction(k, 2) for k in range(0, 2 * q_max + 1)))
    found = qseries.guess(rows, box, order, jobs=jobs)
    emit({"schema": "qlinked.guess/1", "ideal": spec.name, "target": target,
          "candidates": [s.to_dict() for s in found]}, fmt)


@cli.command()
@click.argument("identity", type=click.Choice(sorted(qseries.IDENTITIES)))
@click.option("--order", type=click.IntRange(1))
@click.option("--prefix", default=DEFAULT_PREFIX, show_default=True, type=click.IntRange(1))
@click.option("--sum", "sum_file", type=click.Path(exists=True, dir_okay=False),
              help="override the shipped sum-side data")
@fmt_option
def verify(identity, order, prefix, sum_file, fmt):
    """Full chain for one identity; exit 1 unless every stage passes."""
    s = _load_sum(sum_file) if sum_file else None
    rep = qseries.verify_identity(identity, prefix, order or default_order(), s)
    emit(rep, fmt)
    if not rep["ok"]:
        where = f" (InitialMismatch at M = {rep['mismatch_at']})" if "mismatch_at" in rep else ""
        raise Refuted(f"{identity} failed{where}")


def _source(ref: str, count: int):
    """ideal:NAME:TARGET, sum:NAME or a JSON file with a recurrence and initial values."""
    kind, _, rest = ref.partition(":")
    if kind == "ideal":
        name, _, t = rest.partition(":")
        _, _, eq = _equation(name, t)
        return holo.holo_from_qdiff(eq), None
    if kind == "sum":
        s = qseries.load_sum(rest)
        return qseries.andrews_expand(s, count - 1), qseries.load_sum_recurrence(rest)
    d = json.loads(Path(ref).read_text())
    if d.get("schema") == "qlinked.andrews/1":
        return qseries.andrews_expand(qseries.AndrewsSum.from_dict(d), count - 1), None
    rec = holo.Recurrence.from_dict(d)
    inits = tuple(RationalQ.from_text(v) for v in d["initials"])
    return holo.HoloSequence(rec, inits), None


@cli.command("prove-equal")
@click.argument("a_ref")
@click.argument("b_ref")
@click.option("--prefix", default=DEFAULT_PREFIX, show_default=True, type=click.IntRange(1))
@fmt_option
def prove_equal(a_ref, b_ref, prefix, fmt):
    """Certify A = B; A must carry a recurrence (ideal:TYPE_I:1 or a recurrence file)."""
    A, _ = _source(a_ref, prefix)
    B, b_rec = _source(b_ref, prefix)
    if not isinstance(A, holo.HoloSequence):
        A, B = B, A
    if not isinstance(A, holo.HoloSequence):
        raise click.UsageError("one side needs a recurrence")
    try:
        cert = holo.prove_equal(A, B, prefix, b_rec=b_rec)
    except holo.InitialMismatch as exc:
        emit({"schema": "qlinked.certificate/1", "status": "refuted", "mismatch_at": exc.M}, fmt)
        raise Refuted(str(exc))
    emit(cert.to_dict(), fmt)


PHI21_CHECKS = [
    ("type-iii-1", 1, qseries.Phi21Spec(-1, 1, 2, 6, -1, 3)),
    ("type-iii-2", 2, qseries.Phi21Spec(1, 5, 8, 6, -1, 3)),
    ("type-iv-1", 1, qseries.Phi21Spec(-1, 1, 4, 6, -1, 3)),
    ("type-iv-a", 1, qseries.Phi21Spec(1, 5, 4, 6, -1, 3)),
]
PRODUCT_CHECKS = [
    ("type-iii-a", (1, 3, 4, 6, 7, 10, 11), 12),
    ("type-iv-b", (2, 3, 5, 6, 7, 8, 11), 12),
]


def phi21_report(N: int) -> dict:
    rows = {}
    for name, b, phi in PHI21_CHECKS:
        lhs = qseries.andrews_at_one(qseries.load_sum(name), N)
        rhs = (qseries.pochhammer(b, 1, None, N, negate=True)
               * qseries.pochhammer(3, 6, None, N, negate=True) * qseries.phi21_expand(phi, N))
        rows[f"{name}:phi21"] = lhs == rhs
    for name, res, mod in PRODUCT_CHECKS:
        lhs = qseries.andrews_at_one(qseries.load_sum(name), N)
        rows[f"{name}:product"] = lhs == qseries.congruence_product(res, mod, N)
    return rows


@cli.command("phi21-check")
@click.option("--order", type=click.IntRange(1))
@fmt_option
def phi21_check(order, fmt):
    """The 2phi1 and product identities at x = 1, compared to q^order."""
    N = (order or default_order()) + 1
    rows = phi21_report(N)
    emit({"schema": "qlinked.phi21/1", "q_order": N - 1, "checks": rows}, fmt)
    if not all(rows.values()):
        raise Refuted("some identity fails at this order")


def _params(text: str):
    vals = tuple(int(v) for v in text.split(","))
    if len(vals) != 4:
        raise click.BadParameter("need a,b,c,d")
    return vals


@cli.command("functional-check")
@click.option("--params", "plist", multiple=True, default=["1,4,5,6"], show_default=True)
@click.option("--alpha0", default="1", show_default=True)
@click.option("--alpha1", default="0", show_default=True)
@click.option("--degree", default=DEFAULT_DEGREE, show_default=True, type=click.IntRange(0))
@fmt_option
def functional_check(plist, alpha0, alpha1, degree, fmt):
    """Forward solution against the closed form, coefficient by coefficient."""
    rows = []
    ok = True
    for text in plist:
        a, b, c, d = _params(text)
        try:
            fwd, closed = qseries.solve_functional(a, b, c, d, Fraction(alpha0), Fraction(alpha1), degree)
        except qseries.DivisorVanishes as exc:
            rows.append({"params": [a, b, c, d], "error": str(exc)})
            ok = False
            continue
        agree = fwd == closed
        solves = all(r.is_zero() for r in qseries.functional_residual(a, b, c, d, closed))
        ok = ok and agree and solves
        rows.append({"params": [a, b, c, d], "agree": agree, "closed_form_solves": solves})
    emit({"schema": "qlinked.functional/1", "alpha0": alpha0, "alpha1": alpha1, "degree": degree,
          "checks": rows}, fmt)
    if not ok:
        raise Refuted("closed form and forward solution disagree")


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="qlinked", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
