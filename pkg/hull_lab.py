#!/usr/bin/env python3
"""
hull-lab CLI - bounded computations in the left inverse hull of a presented monoid.

Exit codes: 0 holds, 1 fails (counterexample in the report), 2 unknown
(budget or undecided step), 3 usage error.
"""

import re
import sys
from pathlib import Path

import click
from rich.console import Console

import constants
from config import settings, logger
from monoid_functions import (
    DivisionUnknown,
    HullLabError,
    IndexWindow,
    InvalidInstance,
    LimitDivergence,
    Presentation,
    Status,
    Truncation,
    WordSyntaxError,
    equivalent,
    format_word,
    load_presentation,
    parse_pattern_word,
    parse_word,
    rewrite_trace,
)
from utils.cancellativity import check_left_cancellative, left_divides
from utils.hull import format_hull, parse_hull
from utils.ideals import (
    IdealSemilattice,
    finite_alignment_report,
    ideals_containing,
    parse_generalized,
    parse_ideal,
)
from utils.profiler import print_performance_report, reset_performance_stats
from utils.regrep import (
    BallBasis,
    averaged_shift_trace,
    averaging_epsilon,
    cover_relation_check,
    interior_residual,
    is_zero,
    parse_expression,
)
from utils.reports import Report, make_report, render
from utils.spectrum import TAIL_INSIDE, TAIL_OUTSIDE, check_filter, chi_of, find_covers, is_in_omega, limit_character
from workflows.regularity_workflow import (
    RegularityWorkflow,
    condition1_check,
    cstar_regularity_witness,
    gp_eq_g_check,
    hausdorff_witness_search,
    reduce_to_domain,
    strong_regularity_witness,
    sufficient_conditions_check,
)

console = Console()
__version__ = "0.1.0"

EXIT_USAGE = 3
EXIT_UNKNOWN = 2


class HullLabGroup(click.Group):
    """Top-level group: commands return exit codes, usage errors exit 3."""

    def main(self, *args, **kwargs):
        kwargs['standalone_mode'] = False
        try:
            code = super().main(*args, **kwargs)
        except click.exceptions.Abort:
            logger.error("Aborted")
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except (DivisionUnknown, LimitDivergence) as e:
            logger.error(str(e))
            sys.exit(EXIT_UNKNOWN)
        except InvalidInstance as e:
            logger.error(f"Invalid instance: {e}")
            sys.exit(EXIT_USAGE)
        except HullLabError as e:
            logger.error(str(e))
            sys.exit(EXIT_USAGE)
        except ValueError as e:
            logger.error(str(e))
            sys.exit(EXIT_USAGE)
        sys.exit(code if isinstance(code, int) else 0)


# --- Shared options -------------------------------------------------------------------

def _resolve_presentation(value: str) -> Path:
    path = Path(value)
    if path.exists():
        return path
    corpus = Path(settings.corpus_dir)
    if not corpus.is_absolute():
        corpus = Path(__file__).parent / corpus
    fallback = corpus / f"{Path(value).stem}.pres"
    if fallback.exists():
        return fallback
    raise click.BadParameter(f"no presentation file or corpus entry named '{value}'", param_hint="PRESENTATION")


def _load(value: str) -> Presentation:
    path = _resolve_presentation(value)
    logger.debug(f"Loading presentation from {path}")
    return load_presentation(path)


def _window(ctx, param, value) -> IndexWindow:
    try:
        return IndexWindow.parse(value)
    except WordSyntaxError as e:
        raise click.BadParameter(str(e))


def truncation_options(f):
    f = click.option('--bound', type=click.IntRange(min=0), default=settings.default_bound, show_default=True,
                     help="Search bound for equivalence and division.")(f)
    f = click.option('--window', default=settings.default_window, show_default=True, callback=_window,
                     help="Index window a..b (use --window=-2..2 for negative bounds).")(f)
    f = click.option('--radius', type=click.IntRange(min=0), default=settings.default_radius, show_default=True,
                     help="Ball radius.")(f)
    return f


def budget_option(f):
    return click.option('--budget', type=click.IntRange(min=1), default=settings.default_budget, show_default=True,
                        help="Budget for closures and witness searches.")(f)


def format_option(f):
    return click.option('--format', 'fmt', type=click.Choice(['text', 'json']), default=settings.default_format,
                        show_default=True, help="Report format.")(f)


def _emit(report: Report, fmt: str) -> int:
    render(report, fmt, console)
    return report.exit_code


def _closure(p: Presentation, radius: int, window: IndexWindow, bound: int, budget: int) -> IdealSemilattice:
    return IdealSemilattice(p, Truncation(radius, window), bound).close(budget)


def _expand_indexed(texts, window: IndexWindow):
    """Expand every ``[n]`` in the given texts over the window."""
    expanded = []
    for text in texts:
        if re.search(r"\[n\]", text):
            expanded.extend(text.replace('[n]', f'[{n}]') for n in window.indices())
        else:
            expanded.append(text)
    return expanded


@click.group(cls=HullLabGroup)
@click.version_option(__version__)
@click.option('--profile', is_flag=True, help="Print timing of the hot paths after the command.")
@click.pass_context
def cli(ctx, profile):
    """Left inverse hulls, constructible ideals and regularity witnesses of presented monoids."""
    if profile:
        constants.PROFILING_ENABLED = True
        reset_performance_stats()
        ctx.call_on_close(lambda: print_performance_report(Console(stderr=True)))


# --- Words ------------------------------------------------------------------------------

@cli.command()
@click.argument('presentation')
@click.argument('word')
@format_option
def normalize(presentation, word, fmt):
    """Normal form of WORD."""
    p = _load(presentation)
    trace = rewrite_trace(p, parse_word(p, word))
    result = {"input": format_word(trace[0]), "normal_form": format_word(trace[-1]), "steps": len(trace) - 1}
    return _emit(make_report("normalize", p, {}, Status.HOLDS, result), fmt)


@cli.command()
@click.argument('presentation')
@click.argument('first')
@click.argument('second')
@click.option('--bound', type=click.IntRange(min=0), default=settings.default_bound, show_default=True)
@format_option
def equiv(presentation, first, second, bound, fmt):
    """Decide whether FIRST and SECOND are equal in the monoid."""
    p = _load(presentation)
    verdict = equivalent(p, parse_word(p, first), parse_word(p, second), bound)
    result = {"first": first, "second": second, **verdict.to_dict()}
    return _emit(make_report("equiv", p, {"bound": bound}, verdict.status, result), fmt)


@cli.command('cancel-check')
@click.argument('presentation')
@truncation_options
@format_option
def cancel_check(presentation, radius, window, bound, fmt):
    """Left cancellativity on the ball."""
    p = _load(presentation)
    verdict = check_left_cancellative(p, radius, window)
    truncation = {"radius": radius, "window": str(window)}
    return _emit(make_report("cancel-check", p, truncation, verdict.status, verdict.to_dict()), fmt)


@cli.command()
@click.argument('presentation')
@click.argument('divisor')
@click.argument('word')
@click.option('--bound', type=click.IntRange(min=0), default=settings.default_bound, show_default=True)
@format_option
def divides(presentation, divisor, word, bound, fmt):
    """Whether WORD lies in DIVISOR·S, with the cofactor."""
    p = _load(presentation)
    verdict = left_divides(p, parse_word(p, divisor), parse_word(p, word), bound)
    return _emit(make_report("divides", p, {"bound": bound}, verdict.status, verdict.to_dict()), fmt)


# --- Ideals -----------------------------------------------------------------------------

@cli.group()
def ideals():
    """Constructible right ideals."""


@ideals.command('closure')
@click.argument('presentation')
@truncation_options
@budget_option
@format_option
def ideals_closure(presentation, radius, window, bound, budget, fmt):
    """Close the tracked ideals under intersection and letter preimages."""
    p = _load(presentation)
    closure = _closure(p, radius, window, bound, budget)
    status = Status.HOLDS if closure.saturated else Status.UNKNOWN
    report = make_report("ideals closure", p, closure.truncation.describe(), status,
                         dict(closure.to_dict(), budget=budget, rounds=closure.rounds))
    return _emit(report, fmt)


@ideals.command('intersect')
@click.argument('presentation')
@click.argument('first')
@click.argument('second')
@truncation_options
@format_option
def ideals_intersect(presentation, first, second, radius, window, bound, fmt):
    """Intersection of two constructible ideals, named in closed form when possible."""
    p = _load(presentation)
    lattice = IdealSemilattice(p, Truncation(radius, window), bound)
    meet = lattice.intersect(parse_ideal(p, first), parse_ideal(p, second))
    fp = lattice.fingerprint(meet)
    result = {"first": first, "second": second, "intersection": meet.describe(),
              "generators": [format_word(w) for w in lattice.minimal_elements(fp)],
              "fingerprint_hash": lattice.fingerprint_hash(fp), "up_to_radius": radius}
    return _emit(make_report("ideals intersect", p, lattice.truncation.describe(), Status.HOLDS, result), fmt)


@ideals.command('containing')
@click.argument('presentation')
@click.argument('words', nargs=-1, required=True)
@truncation_options
@budget_option
@format_option
def ideals_containing_cmd(presentation, words, radius, window, bound, budget, fmt):
    """Tracked ideals containing every one of WORDS."""
    p = _load(presentation)
    closure = _closure(p, radius, window, bound, budget)
    found = ideals_containing([parse_word(p, w) for w in words], closure)
    result = {"words": list(words), "ideals": [ideal.describe() for ideal in found],
              "saturated": closure.saturated, "tracked": len(closure)}
    return _emit(make_report("ideals containing", p, closure.truncation.describe(), Status.HOLDS, result), fmt)


@cli.command('align-check')
@click.argument('presentation')
@click.option('--pair', 'pairs', multiple=True, help="Pair 's,t' to examine; default is every pair of letters.")
@truncation_options
@format_option
def align_check(presentation, pairs, radius, window, bound, fmt):
    """Generator counts of sS ∩ tS and whether they grow with the window."""
    p = _load(presentation)
    parsed = None
    if pairs:
        parsed = []
        for pair in pairs:
            s, _, t = pair.partition(',')
            if not t:
                raise click.BadParameter(f"expected 's,t', got '{pair}'", param_hint="--pair")
            parsed.append((parse_word(p, s), parse_word(p, t)))
    truncation = Truncation(radius, window)
    result = finite_alignment_report(p, truncation, bound, parsed)
    status = Status.HOLDS if result["finitely_aligned_evidence"] else Status.FAILS
    return _emit(make_report("align-check", p, truncation.describe(), status, result), fmt)


# --- Semi-characters ---------------------------------------------------------------------

def tail_option(f):
    return click.option('--tail', type=click.Choice([TAIL_OUTSIDE, TAIL_INSIDE]), default=TAIL_OUTSIDE, show_default=True,
                        help="Sample the limit just outside the window or at its ends.")(f)


@cli.group()
def spectrum():
    """Semi-characters on the tracked ideals."""


@spectrum.command('chi')
@click.argument('presentation')
@click.argument('word')
@truncation_options
@budget_option
@format_option
def spectrum_chi(presentation, word, radius, window, bound, budget, fmt):
    """The point character of WORD."""
    p = _load(presentation)
    closure = _closure(p, radius, window, bound, budget)
    chi = chi_of(parse_word(p, word), closure)
    result = {"word": word, "ones": chi.describe(closure), "tracked_hash": chi.tracked_hash,
              "undecided": [closure.representatives[k].describe() for k in chi.unknown]}
    status = Status.UNKNOWN if chi.unknown else Status.HOLDS
    return _emit(make_report("spectrum chi", p, closure.truncation.describe(), status, result), fmt)


@spectrum.command('limit')
@click.argument('presentation')
@click.argument('sequence')
@tail_option
@truncation_options
@budget_option
@format_option
def spectrum_limit(presentation, sequence, tail, radius, window, bound, budget, fmt):
    """Limit of the point characters along SEQUENCE, e.g. 'b x[n]'."""
    p = _load(presentation)
    closure = _closure(p, radius, window, bound, budget)
    pattern = parse_pattern_word(p, sequence)
    try:
        chi = limit_character(pattern, closure, tail)
    except LimitDivergence as e:
        result = {"sequence": sequence, "diverging": [closure.representatives[k].describe() for k in e.diverging],
                  "note": str(e)}
        return _emit(make_report("spectrum limit", p, closure.truncation.describe(), Status.UNKNOWN, result), fmt)
    result = {"sequence": sequence, "tail": tail, "ones": chi.describe(closure), "tracked_hash": chi.tracked_hash}
    return _emit(make_report("spectrum limit", p, closure.truncation.describe(), Status.HOLDS, result), fmt)


@spectrum.command('omega')
@click.argument('presentation')
@click.option('--word', help="Check the point character of this word.")
@click.option('--limit', 'sequence', help="Check the limit character along this sequence.")
@tail_option
@truncation_options
@budget_option
@format_option
def spectrum_omega(presentation, word, sequence, tail, radius, window, bound, budget, fmt):
    """Filter and cover conditions for a point or limit character."""
    if bool(word) == bool(sequence):
        raise click.UsageError("give exactly one of --word and --limit")
    p = _load(presentation)
    closure = _closure(p, radius, window, bound, budget)
    chi = chi_of(parse_word(p, word), closure) if word else limit_character(parse_pattern_word(p, sequence), closure, tail)
    covers = find_covers(closure)
    filter_verdict = check_filter(chi, closure)
    omega_verdict = is_in_omega(chi, covers, closure)
    statuses = {filter_verdict.status, omega_verdict.status}
    status = Status.FAILS if Status.FAILS in statuses else Status.HOLDS
    result = {"character": word or sequence, "ones": chi.describe(closure),
              "filter": filter_verdict.to_dict(), "omega": omega_verdict.to_dict()}
    return _emit(make_report("spectrum omega", p, closure.truncation.describe(), status, result), fmt)


# --- Regularity --------------------------------------------------------------------------

@cli.group()
def regularity():
    """Condition 1 and regularity witnesses."""


@regularity.command('check')
@click.argument('presentation')
@click.option('--kind', type=click.Choice(['strong', 'cstar', 'gp-eq-g']), default='strong', show_default=True)
@click.option('--X', 'region', required=True, help="Ideal X, e.g. 'Family(b)'; cstar also accepts 'X \\ Y'.")
@click.option('--minus', 'removed', multiple=True, help="Ideal removed from X (repeatable).")
@click.option('--h', 'hs', multiple=True, required=True, help="Hull element (repeatable); gp-eq-g uses the first.")
@truncation_options
@budget_option
@click.option('--closure-budget', type=click.IntRange(min=1), default=settings.default_budget, show_default=True)
@format_option
def regularity_check(presentation, kind, region, removed, hs, radius, window, bound, budget, closure_budget, fmt):
    """Search a witness that the fixed points of the h's inside X are covered by tracked ideals."""
    p = _load(presentation)
    closure = _closure(p, radius, window, bound, closure_budget)
    elements = [parse_hull(p, h, bound) for h in hs]
    X = parse_generalized(p, region, removed)
    truncation = dict(closure.truncation.describe(), budget=budget)

    if kind == 'gp-eq-g':
        verdict = gp_eq_g_check(p, elements[0], X.base, X.removed, closure, budget)
        result = {"kind": kind, "g": format_hull(elements[0]), **verdict.to_dict()}
        return _emit(make_report("regularity check", p, truncation, verdict.status, result), fmt)

    reduced = reduce_to_domain(p, X, elements, bound)
    condition1 = condition1_check(p, X, reduced, closure)
    if not condition1.holds:
        result = {"kind": kind, "condition1": condition1.to_dict(),
                  "note": "Condition 1 fails, so the instance does not apply"}
        return _emit(make_report("regularity check", p, truncation, Status.FAILS, result), fmt)

    if kind == 'strong':
        verdict = strong_regularity_witness(p, X.base, X.removed, reduced, closure, budget)
    else:
        verdict = cstar_regularity_witness(p, X, reduced, closure, budget)
    result = {"kind": kind, "h": [format_hull(h) for h in reduced], **verdict.to_dict()}
    return _emit(make_report("regularity check", p, truncation, verdict.status, result), fmt)


@regularity.command('scan')
@click.argument('presentation')
@click.option('--limit', type=click.IntRange(min=1), default=constants.INSTANCE_LIMIT, show_default=True,
              help="Auto-generated Condition-1 instances to check.")
@truncation_options
@budget_option
@format_option
def regularity_scan(presentation, limit, radius, window, bound, budget, fmt):
    """Strong-regularity witnesses for auto-generated Condition-1 instances."""
    p = _load(presentation)
    closure = _closure(p, radius, window, bound, budget)
    workflow = RegularityWorkflow(p, closure, show_progress=fmt == 'text')
    results = workflow.run_strong_checks(budget, limit)
    if any(r["status"] == Status.FAILS.value for r in results):
        status = Status.FAILS
    elif all(r["status"] == Status.HOLDS.value for r in results):
        status = Status.HOLDS
    else:
        status = Status.UNKNOWN
    report = make_report("regularity scan", p, closure.truncation.describe(), status,
                         {"instances": len(results), "skipped_outside_domain": workflow.skipped_instances,
                          "results": results})
    return _emit(report, fmt)


@regularity.command('sufficient')
@click.argument('presentation')
@truncation_options
@budget_option
@format_option
def regularity_sufficient(presentation, radius, window, bound, budget, fmt):
    """Hausdorffness, group embeddability and finite alignment, each enough for strong regularity."""
    p = _load(presentation)
    closure = _closure(p, radius, window, bound, budget)
    verdict = sufficient_conditions_check(p, closure, budget)
    return _emit(make_report("regularity sufficient", p, closure.truncation.describe(), verdict.status,
                             verdict.to_dict()), fmt)


@regularity.command('sweep')
@click.argument('presentation')
@click.option('--target', default='y[0]', show_default=True, help="Word the zigzags must fix.")
@click.option('--domain', default='Family(e)', show_default=True, help="Ideal the ball domain must contain.")
@click.option('--max-length', type=click.IntRange(min=0), default=constants.SWEEP_MAX_LENGTH, show_default=True)
@truncation_options
@format_option
def regularity_sweep(presentation, target, domain, max_length, radius, window, bound, fmt):
    """Classify short zigzags fixing TARGET as e, a projection or other."""
    p = _load(presentation)
    lattice = IdealSemilattice(p, Truncation(radius, window), bound)
    workflow = RegularityWorkflow(p, lattice)
    result = workflow.fix_sweep(parse_word(p, target), parse_ideal(p, domain), max_length)
    status = Status.HOLDS if result["all_e_or_projection"] else Status.FAILS
    return _emit(make_report("regularity sweep", p, lattice.truncation.describe(), status, result), fmt)


@cli.group()
def hausdorff():
    """Non-Hausdorffness witnesses."""


@hausdorff.command('scan')
@click.argument('presentation')
@truncation_options
@budget_option
@format_option
def hausdorff_scan(presentation, radius, window, bound, budget, fmt):
    """Pairs (g, sequence) whose limit germ differs from the unit."""
    p = _load(presentation)
    closure = _closure(p, radius, window, bound, budget)
    found = hausdorff_witness_search(p, closure, budget)
    witnesses = [{"g": format_hull(g), "sequence": " ".join(str(letter) for letter in pattern),
                  "limit": chi.describe(closure)} for g, pattern, chi in found]
    status = Status.HOLDS if witnesses else Status.UNKNOWN
    result = {"witnesses": witnesses}
    if not witnesses:
        result["note"] = "no witness within the budget; this does not show the groupoid is Hausdorff"
    return _emit(make_report("hausdorff scan", p, closure.truncation.describe(), status, result), fmt)


# --- Regular representation ------------------------------------------------------------

@cli.group()
def regrep():
    """Operator identities on the truncated regular representation."""


@regrep.command('eval')
@click.argument('presentation')
@click.option('--expr', required=True, help="Polynomial in L[w], Lstar[w], P[ideal], H[zigzag] and integers.")
@truncation_options
@format_option
def regrep_eval(presentation, expr, radius, window, bound, fmt):
    """Maximum interior residual of EXPR; 0 means it vanishes at this truncation."""
    p = _load(presentation)
    basis = BallBasis(p, Truncation(radius, window), bound)
    op = parse_expression(expr, basis)
    residual = interior_residual(op)
    depth = op.depth if op is not None else 0
    result = {"expr": expr, "residual": residual, "depth": depth,
              "interior_vectors": len(basis.interior(depth)), "basis": len(basis)}
    status = Status.HOLDS if is_zero(residual) else Status.FAILS
    return _emit(make_report("regrep eval", p, basis.truncation.describe(), status, result), fmt)


@regrep.command('cover')
@click.argument('presentation')
@click.option('--X', 'region', required=True, help="The covered ideal.")
@click.option('--cover', 'covers', multiple=True, required=True,
              help="Covering ideal (repeatable); '[n]' expands over the window.")
@truncation_options
@format_option
def regrep_cover(presentation, region, covers, radius, window, bound, fmt):
    """Product of (P_X - P_Xi) over a cover of X."""
    p = _load(presentation)
    basis = BallBasis(p, Truncation(radius, window), bound)
    parts = [parse_ideal(p, text) for text in _expand_indexed(covers, window)]
    report = cover_relation_check(parse_ideal(p, region), parts, basis)
    result = {"X": region, "covers": [part.describe() for part in parts], "residual": report.residual,
              "cover_holds": report.cover_holds, "uncovered": list(report.uncovered)}
    if not report.cover_holds:
        status = Status.UNKNOWN
        result["note"] = "X is not the union of the covers on the ball, so the relation is not required"
    else:
        status = Status.HOLDS if is_zero(report.residual) else Status.FAILS
    return _emit(make_report("regrep cover", p, basis.truncation.describe(), status, result), fmt)


@regrep.command('epsilon')
@click.option('--m', 'm_text', default='2', show_default=True, help="Integer m, or 'inf'.")
@click.option('--alpha', type=float, default=0.6, show_default=True)
@format_option
def regrep_epsilon(m_text, alpha, fmt):
    """An epsilon with alpha (1 - m eps)^2 > 1/m, and the trace of the averaged shift."""
    if m_text.lower() in ('inf', 'infinity', '∞'):
        m = None
    else:
        try:
            m = int(m_text)
        except ValueError:
            raise click.BadParameter(f"expected an integer or 'inf', got '{m_text}'", param_hint="--m")
    eps, supremum, m_used = averaging_epsilon(m, alpha)
    lhs = alpha * (1 - m_used * eps) ** 2
    result = {"m": m_text, "alpha": alpha, "m_used": m_used, "epsilon": eps, "supremum": supremum,
              "substitution": lhs, "exceeds": lhs > 1 / m_used,
              "b_trace": averaged_shift_trace(m_used) if m_used >= 2 else None}
    status = Status.HOLDS if result["exceeds"] else Status.FAILS
    report = Report(command="regrep epsilon", presentation="-", presentation_hash="", status=status, result=result)
    return _emit(report, fmt)


regrep.add_command(regrep_cover, name='r4')
regrep.add_command(regrep_epsilon, name='lemma16')


if __name__ == "__main__":
    cli()
