"""Command-line interface: deterministic JSON on stdout, diagnostics on stderr.

Exit codes (mirrors :mod:`ringkt.errors`):

* 0 — success;
* 2 — bad or unsupported input (including systems outside the certified
  colimit class);
* 3 — a classification hypothesis fails for the supplied field;
* 4 — an internal cross-check or a ``verify`` assertion failed;
* 1 — any other error.
"""

from __future__ import annotations

import json
import sys
import traceback

import click

from . import abgrp, ktheory, numfield
from .errors import CrossCheckError, HypothesisError, InputError, RingKTError


def _emit(obj, pretty):
    if pretty:
        text = json.dumps(obj, indent=2, sort_keys=True)
    else:
        text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    click.echo(text)


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except RingKTError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.exit_code)
    except Exception:
        traceback.print_exc()
        sys.exit(1)


def _load_json_arg(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from exc


def _load_json_file(path, what):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {what} from {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} in {path} is not valid JSON: {exc}") from exc


def _parse_gamma(field, gamma):
    if not gamma:
        return []
    return [field.parse_element(part) for part in gamma.split(";") if part.strip()]


pretty_option = click.option(
    "--pretty", is_flag=True, default=False, help="Indent the JSON output."
)


@click.group()
def main():
    """Exact K-theory of ring C*-algebras over rings of integers."""


@main.command("field-info")
@click.option("--field", "field_str", required=True,
              help="Monic integer polynomial of the generator, e.g. 'x^2 - 2'.")
@pretty_option
def field_info(field_str, pretty):
    """Signature, roots of unity, and unit data of a number field."""

    def work():
        field = numfield.parse_field(field_str)
        out = field.to_json_dict()
        try:
            unit = numfield.fundamental_unit_real_quadratic(field)
            out["fundamental_unit"] = [str(c) for c in unit.coeffs]
            out["fundamental_unit_pretty"] = unit.as_string()
        except RingKTError:
            pass
        return out

    _emit(_run(work), pretty)


@main.command("residues")
@click.option("--field", "field_str", required=True)
@click.option("--modulus", type=int, required=True,
              help="The rational integer d to reduce modulo.")
@click.option("--style", type=click.Choice(["standard", "centered"]),
              default="standard", show_default=True)
@pretty_option
def residues(field_str, modulus, style, pretty):
    """A complete residue system for the ring of integers modulo d."""

    def work():
        field = numfield.parse_field(field_str)
        system = field.residue_system(modulus, style=style)
        return {
            "field": field.to_json_dict(),
            "modulus": modulus,
            "style": style,
            "count": len(system),
            "residues": [[int(c) for c in coords] for coords in system],
        }

    _emit(_run(work), pretty)


@main.command("snf")
@click.option("--matrix", "matrix_str", required=True,
              help="Integer matrix as JSON, e.g. '[[2,4],[6,8]]', or @file.")
@pretty_option
def snf(matrix_str, pretty):
    """Smith normal form A = U D V with unimodular U, V."""

    def work():
        if matrix_str.startswith("@"):
            rows = _load_json_file(matrix_str[1:], "--matrix file")
        else:
            rows = _load_json_arg(matrix_str, "--matrix")
        u, d, v = abgrp.smith_normal_form(rows)
        nrows = len(d)
        ncols = len(d[0]) if d else 0
        diag = [d[i][i] for i in range(min(nrows, ncols))]
        return {
            "matrix": rows,
            "u": u,
            "d": d,
            "v": v,
            "diagonal": diag,
            "cokernel": abgrp.cokernel(rows).to_json_dict(),
            "cokernel_pretty": str(abgrp.cokernel(rows)),
            "kernel_rank": len(abgrp.kernel_lattice_basis(rows)),
        }

    _emit(_run(work), pretty)


_BUILTIN_SYSTEMS = {"rank-one": ktheory.rank_one_system}


def _load_system(path):
    if path in _BUILTIN_SYSTEMS:
        return _BUILTIN_SYSTEMS[path]()
    return abgrp.DirectedSystem.from_json(_load_json_file(path, "directed system"))


@main.command("colim")
@click.option("--system", "system_path", required=True,
              help="Path to a directed-system JSON file, or 'rank-one'.")
@pretty_option
def colim(system_path, pretty):
    """Colimit of a directed system of free abelian groups."""

    def work():
        system = _load_system(system_path)
        return abgrp.colimit(system).to_json_dict()

    _emit(_run(work), pretty)


@main.command("pv")
@click.option("--system", "system_path", required=True,
              help="Path to a JSON file with 'group' and 'action' objects.")
@click.option("--resolution",
              type=click.Choice(["require_split", "elementary_divisors",
                                 "report_both"]),
              default="require_split", show_default=True)
@pretty_option
def pv(system_path, resolution, pretty):
    """One six-term crossed-product step on a graded K-group."""

    def work():
        act = ktheory.ActionDescriptor.from_json(
            _load_json_file(system_path, "action description")
        )
        return ktheory.pv_step(act.domain, act, resolution=resolution).to_json_dict()

    _emit(_run(work), pretty)


_ALGEBRAS = ("A", "B", "A0", "B0", "A_full_Q")


@main.command("kgroups")
@click.option("--algebra", type=click.Choice(_ALGEBRAS), required=True)
@click.option("--field", "field_str", default=None,
              help="Required for A, B, A0, B0.")
@click.option("--gamma", default=None,
              help="Generators as semicolon-separated coefficient vectors, "
                   "e.g. '1,1;2'.")
@click.option("--truncate", type=int, default=None,
              help="Also tabulate ranks after the first 0..m generators.")
@click.option("--grading", type=click.IntRange(0, 1), default=None,
              help="Override the grading offset of classification reports.")
@pretty_option
def kgroups(algebra, field_str, gamma, truncate, grading, pretty):
    """K-groups: level-zero closed forms or full classification reports."""

    def work():
        field = None
        if algebra != "A_full_Q":
            if not field_str:
                raise InputError(f"--field is required for algebra {algebra}")
            field = numfield.parse_field(field_str)
        if algebra == "B0":
            g = ktheory.k_of_B0(field.degree)
            return {
                "algebra": "B0",
                "field": field.to_json_dict(),
                "kgroups": g.to_json_dict(),
                "pretty": str(g),
                "citations": ["fixed-subalgebra-base-k",
                              "adele-scaling-diagonal"],
            }
        if algebra == "A0":
            g = ktheory.k_of_A0(field.degree)
            return {
                "algebra": "A0",
                "field": field.to_json_dict(),
                "kgroups": g.to_json_dict(),
                "pretty": str(g),
                "citations": ["crossed-base-k", "kappa-structure-matrices"],
            }
        if algebra == "B":
            gens = _parse_gamma(field, gamma)
            rep = ktheory.classify_B(field, gens, truncate=truncate,
                                     grading_offset=grading)
            out = rep.to_json_dict()
            out["field"] = field.to_json_dict()
            return out
        if algebra == "A":
            rep = ktheory.classify_A(field, truncate=truncate,
                                     grading_offset=grading)
            out = rep.to_json_dict()
            out["field"] = field.to_json_dict()
            return out
        return ktheory.k_full_adele_Q(
            truncate=truncate, grading_offset=grading
        ).to_json_dict()

    _emit(_run(work), pretty)


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------


def _suite_q_case():
    from .abgrp import GroupDescriptor, colimit, identified

    checks = []

    def add(name, fn):
        checks.append((name, fn))

    add("rank-one inclusion matrix d=2 is [[2,1,0],[0,0,1],[0,0,1]]",
        lambda: ktheory.rank_one_inclusion_matrix(2)
        == [[2, 1, 0], [0, 0, 1], [0, 0, 1]])
    add("rank-one inclusion matrix d=3 is [[3,1,1],[0,1,0],[0,0,1]]",
        lambda: ktheory.rank_one_inclusion_matrix(3)
        == [[3, 1, 1], [0, 1, 0], [0, 0, 1]])
    add("rank-one chain colimit is Z + Q",
        lambda: str(colimit(ktheory.rank_one_system()).invariants) == "Z + Q")
    add("rank-one chain identifies the unit class with twice the mixed class",
        lambda: identified(ktheory.rank_one_system(), (1, (1, 0, 0)),
                           (1, (0, 2, 0))))
    add("rank-one chain separates the two projection classes",
        lambda: not identified(ktheory.rank_one_system(), (1, (0, 1, 0)),
                               (1, (0, 0, 1))))

    def shells():
        for m in range(1, 7):
            g = ktheory.k_of_A_truncated_Q(m)
            half = 2 ** (m - 1)
            if g != ktheory.GradedKGroup(GroupDescriptor.free(half),
                                         GroupDescriptor.free(half)):
                return False
        return True

    add("rational shells are free of rank 2^(m-1) in both degrees (m<=6)",
        shells)
    q = numfield.parse_field("x - 1")
    add("rationals classify as the free exterior pattern",
        lambda: ktheory.classify_B(
            q, [q.parse_element("2")]).case == "odd-reals-even-signs")
    return checks


def _suite_kappa():
    checks = []
    checks.append((
        "structure-matrix composition kappa(n,2).kappa(n,d) = kappa(n,2d) "
        "for n<=4, odd d<=31",
        lambda: all(
            ktheory.kappa(n, 2).compose(ktheory.kappa(n, d))
            == ktheory.kappa(n, 2 * d)
            for n in range(1, 5) for d in range(3, 32, 2)
        ),
    ))
    checks.append((
        "sparse product agrees with dense matrix product (n<=3)",
        lambda: all(
            ktheory.kappa(n, a).compose(ktheory.kappa(n, b)).dense()
            == abgrp.mat_mul(ktheory.kappa(n, a).dense(),
                             ktheory.kappa(n, b).dense())
            for n in range(1, 4) for a, b in ((2, 3), (4, 5), (6, 7))
        ),
    ))
    checks.append((
        "infinite-part diagonal for three levels, multiplier 2 is (8,2,2,2)",
        lambda: ktheory.kappa_inf(3, 2) == (8, 2, 2, 2),
    ))
    checks.append((
        "fixed-subalgebra closed forms match the colimit engine (n<=3)",
        lambda: all(
            str(ktheory.k_of_B0(n)) == expected
            for n, expected in ((1, "K0 = Q, K1 = Z"),
                                (2, "K0 = Z + Q, K1 = Q^2"),
                                (3, "K0 = Q^4, K1 = Z + Q^3"))
        ),
    ))
    checks.append((
        "crossed-base closed forms match the colimit engine (n<=3)",
        lambda: all(
            str(ktheory.k_of_A0(n)) == expected
            for n, expected in ((1, "K0 = Z + Q, K1 = 0"),
                                (2, "K0 = Z^2 + Q, K1 = 0"),
                                (3, "K0 = Z + Q^4, K1 = 0"))
        ),
    ))
    return checks


def _suite_colim():
    from .abgrp import DirectedSystem, GroupDescriptor, colimit
    from .errors import UnsupportedSystemError

    checks = []
    checks.append((
        "unimodular constant system keeps Z^2",
        lambda: colimit(DirectedSystem.explicit([[[0, 1], [1, 0]]] * 4)).invariants
        == GroupDescriptor.free(2),
    ))
    checks.append((
        "multiplication by the chain parameter gives Q",
        lambda: str(colimit(DirectedSystem.symbolic(
            1, [{"kind": "mult_d"}])).invariants) == "Q",
    ))
    checks.append((
        "constant multiplication by 6 localizes at {2, 3}",
        lambda: str(colimit(DirectedSystem.symbolic(
            1, [{"kind": "poly", "coeffs": [6]}])).invariants) == "Loc{2,3}",
    ))

    def rejects():
        bad = DirectedSystem.from_family(
            2, lambda d: [[1, 1], [1, 2 + d]])
        try:
            colimit(bad)
        except UnsupportedSystemError:
            return True
        return False

    checks.append((
        "a family outside the certified class is rejected, not guessed",
        rejects,
    ))
    return checks


def _suite_classify():
    from .abgrp import GroupDescriptor

    checks = []
    checks.append((
        "Gaussian integers: ring algebra classifies free, adelic algebra "
        "refuses (four roots of unity)",
        lambda: ktheory.classify_B(
            numfield.parse_field("x^2 + 1")).case == "no-real-embedding"
        and _raises(HypothesisError,
                    lambda: ktheory.classify_A(numfield.parse_field("x^2 + 1"))),
    ))

    def sqrt2():
        f = numfield.parse_field("x^2 - 2")
        rb = ktheory.classify_B(f, [f.parse_element("1,1")])
        ra = ktheory.classify_A(f)
        return (rb.formula(0) == "(Z/2) (x) Lambda_even(Gamma)"
                and ra.formula(0)
                == "Lambda_even(Gamma) + (Z/2) (x) Lambda_even(Gamma)")

    checks.append(("real quadratic field matches the even-reals pattern",
                   sqrt2))
    checks.append((
        "pure cubic field classifies free in the adelic case",
        lambda: ktheory.classify_A(
            numfield.parse_field("x^3 - 2")).formula(0) == "Lambda_even(Gamma)",
    ))

    def involution():
        for m in (1, 2, 3):
            act = ktheory.involution_action(m)
            res = ktheory.pv_step(act.domain, act,
                                  resolution="elementary_divisors")
            half = 2 ** (m - 1)
            if res.coker0 != GroupDescriptor(free_rank=half,
                                             torsion=(2,) * half):
                return False
            if res.k0 != GroupDescriptor(free_rank=2 ** m,
                                         torsion=(2,) * half):
                return False
        return True

    checks.append((
        "involution step: cokernel and resolved groups in normal form (m<=3)",
        involution,
    ))
    return checks


def _raises(exc_type, fn):
    try:
        fn()
    except exc_type:
        return True
    except Exception:
        return False
    return False


_SUITES = {
    "q-case": _suite_q_case,
    "kappa": _suite_kappa,
    "colim": _suite_colim,
    "classify": _suite_classify,
}


@main.command("verify")
@click.option("--suite", type=click.Choice(sorted(_SUITES) + ["all"]),
              default="all", show_default=True)
def verify(suite):
    """Re-run the bundled assertion suites; one PASS/FAIL line each."""
    names = sorted(_SUITES) if suite == "all" else [suite]
    failures = 0
    for name in names:
        for label, fn in _SUITES[name]():
            try:
                ok = bool(fn())
            except Exception as exc:  # a crash is a failure with a reason
                ok = False
                label = f"{label} (raised {type(exc).__name__}: {exc})"
            line = f"{'PASS' if ok else 'FAIL'} [{name}] {label}"
            click.echo(line)
            if not ok:
                failures += 1
    if failures:
        click.echo(f"{failures} check(s) failed", err=True)
        raise SystemExit(CrossCheckError("verify failed").exit_code)


if __name__ == "__main__":
    main()
