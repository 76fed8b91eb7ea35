"""Command-line front end: every computation and verification as a
subcommand with machine-readable output.

### CONVENTIONS
# Braid words on the command line are comma-separated nonzero integers
# ("1,1,-2"); "-" is the empty word (use --strands to widen).  Grid
# files use the three-line format of transkh.grid.
# Output is text by default; --json emits one canonical JSON document
# (sorted keys).  Timing fields are volatile, so they are stripped from
# JSON unless --timings is passed: identical inputs and seed then give
# byte-identical output.
# Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 size cap.
"""

import functools
import json
import sys

import click

from .braid import BraidWord, format_word, parse_word
from .complexes import build_complex
from .config import RunConfig
from .errors import TooLarge, TranskhError
from .grid import (braid_from_grid, classical_invariants, component_count,
                   parse_grid, verify_flype_sz)
from .homology import homology_bigraded, homology_groups
from .invariants import (cycle_gradings, s_invariant, transverse_cycle,
                         transverse_difference, triviality_obstruction,
                         window_bounds, diff_window_bounds,
                         window_class_vanishes)
from .moves import (apply_script, parse_script, verify_diff_flype,
                    verify_diff_markov, verify_flype, verify_markov,
                    verify_neg_stab)
from . import suite as suite_mod


def _strip_volatile(obj):
    if isinstance(obj, dict):
        return {k: _strip_volatile(v) for k, v in obj.items()
                if k not in ("seconds", "timings")}
    if isinstance(obj, (list, tuple)):
        return [_strip_volatile(v) for v in obj]
    return obj


def _render_text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list, tuple)) and v:
                lines.append("%s%s:" % (pad, k))
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append("%s%s: %s" % (pad, k, v))
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            if isinstance(v, (dict, list, tuple)):
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append("%s- %s" % (pad, v))
    else:
        lines.append("%s%s" % (pad, obj))
    return lines


def _emit(report, cfg, headline=None):
    if cfg.output == "json":
        if not cfg_timings(cfg):
            report = _strip_volatile(report)
        click.echo(json.dumps(report, sort_keys=True, indent=2,
                              default=str))
    else:
        if headline is not None:
            click.echo(headline)
        else:
            click.echo("\n".join(_render_text(report)))


def cfg_timings(cfg):
    return getattr(cfg, "keep_timings", False)


def _guard(fn):
    @functools.wraps(fn)
    def wrapped(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TranskhError as exc:
            cfg = kwargs.get("_cfg") or getattr(
                click.get_current_context(), "obj", None)
            msg = {"error": type(exc).__name__, "message": str(exc)}
            if cfg is not None and cfg.output == "json":
                click.echo(json.dumps(msg, sort_keys=True, indent=2))
            else:
                click.echo("%s: %s" % (type(exc).__name__, exc), err=True)
            sys.exit(exc.exit_code)
    return wrapped


def common_options(fn):
    for deco in (
        click.option("--json", "as_json", is_flag=True,
                     help="canonical JSON output"),
        click.option("--cap", type=int, default=None,
                     help="crossing cap (default TRANSKH_MAX_CROSSINGS "
                          "or 16)"),
        click.option("--rational", is_flag=True,
                     help="solve witness systems over the rationals"),
        click.option("--flip", is_flag=True,
                     help="swap the two cycle label patterns"),
        click.option("--timings", "timings", is_flag=True,
                     help="keep timing fields in JSON output"),
    ):
        fn = deco(fn)
    return fn


def _config(as_json, cap, rational, flip, timings):
    cfg = RunConfig()
    if cap is not None:
        if cap < 1:
            raise TooLarge("crossing cap must be at least 1")
        cfg.max_crossings = cap
    cfg.coefficients = "rational" if rational else "int"
    cfg.output = "json" if as_json else "text"
    cfg.flip_labels = flip
    cfg.keep_timings = timings
    ctx = click.get_current_context(silent=True)
    if ctx is not None:
        ctx.obj = cfg
    return cfg


def _word(text, strands, cfg):
    w = parse_word(text, strands)
    if len(w.letters) > cfg.max_crossings:
        raise TooLarge("word has %d letters; cap is %d (raise with "
                       "--cap or TRANSKH_MAX_CROSSINGS)"
                       % (len(w.letters), cfg.max_crossings))
    return w


def _groups_json(groups):
    return {"%d,%d" % hq: [r, list(t)] for hq, (r, t) in groups.items()}


def _group_str(rank, torsion):
    parts = ["Z"] * rank + ["Z/%d" % t for t in torsion]
    return " + ".join(parts) if parts else "0"


@click.group()
def main():
    """Filtered link homology of transverse braid closures."""


@main.command()
@click.argument("braid")
@click.option("--strands", type=int, default=None)
@common_options
@_guard
def kh(braid, strands, as_json, cap, rational, flip, timings):
    """Undeformed bigraded groups of the closure."""
    cfg = _config(as_json, cap, rational, flip, timings)
    w = _word(braid, strands, cfg)
    groups = homology_bigraded(build_complex(w, "kh"))
    report = {"braid": format_word(w), "strands": w.strands,
              "theory": "kh", "groups": _groups_json(groups)}
    if cfg.output == "json":
        _emit(report, cfg)
    else:
        for (h, q) in sorted(groups):
            r, t = groups[(h, q)]
            click.echo("h=%+d q=%+d: %s" % (h, q, _group_str(r, t)))


@main.command()
@click.argument("braid")
@click.option("--strands", type=int, default=None)
@common_options
@_guard
def bn(braid, strands, as_json, cap, rational, flip, timings):
    """Deformed (filtered) homology by homological degree."""
    cfg = _config(as_json, cap, rational, flip, timings)
    w = _word(braid, strands, cfg)
    groups = homology_groups(build_complex(w, "def"))
    rank = sum(r for r, _ in groups.values())
    report = {"braid": format_word(w), "strands": w.strands,
              "theory": "def", "components": len(w.components()),
              "total_rank": rank,
              "groups": {str(h): [r, list(t)]
                         for h, (r, t) in groups.items()}}
    if cfg.output == "json":
        _emit(report, cfg)
    else:
        for h in sorted(groups):
            r, t = groups[h]
            click.echo("h=%+d: %s" % (h, _group_str(r, t)))
        click.echo("total rank %d (components %d)"
                   % (rank, len(w.components())))


@main.command()
@click.argument("braid")
@click.option("--strands", type=int, default=None)
@click.option("--diff", "difference", is_flag=True,
              help="use the twin-difference cycle")
@click.option("--sign", type=click.Choice(["+1", "-1"]), default="+1")
@click.option("--window", nargs=2, type=int, default=None,
              help="test vanishing in the subquotient window p q")
@common_options
@_guard
def psi(braid, strands, difference, sign, window, as_json, cap, rational,
        flip, timings):
    """Canonical cycle: gradings, and optional window-class test."""
    cfg = _config(as_json, cap, rational, flip, timings)
    w = _word(braid, strands, cfg)
    if difference:
        chain = transverse_difference(w, flip=cfg.flip_labels)
    else:
        chain = transverse_cycle(w, int(sign), flip=cfg.flip_labels)
    hs, q_min, q_max = cycle_gradings(w, chain)
    report = {"braid": format_word(w), "strands": w.strands,
              "difference": difference, "sign": int(sign),
              "self_linking": w.self_linking,
              "gr_h": sorted(hs), "min_gr_q": q_min, "max_gr_q": q_max,
              "terms": len(chain)}
    if window is not None:
        p, q = window
        cx = build_complex(w, "def")
        lo, hi = (diff_window_bounds(w, p, q) if difference
                  else window_bounds(w, p, q))
        vanishes = window_class_vanishes(
            cx, w, chain, p, q, ring=cfg.coefficients,
            difference=difference)
        report["window"] = {"p": p, "q": q, "gr_q_lo": lo, "gr_q_hi": hi,
                            "vanishes": vanishes,
                            "nonzero": not vanishes}
    _emit(report, cfg)


@main.command(name="s")
@click.argument("braid")
@click.option("--strands", type=int, default=None)
@common_options
@_guard
def s_cmd(braid, strands, as_json, cap, rational, flip, timings):
    """Concordance invariant of the closure knot."""
    cfg = _config(as_json, cap, rational, flip, timings)
    w = _word(braid, strands, cfg)
    val = s_invariant(w, ring=cfg.coefficients
                      if cfg.coefficients == "rational" else "rational")
    report = {"braid": format_word(w), "s": val,
              "self_linking": w.self_linking}
    _emit(report, cfg, headline=str(val))


@main.command()
@click.argument("braid")
@click.option("--strands", type=int, default=None)
@common_options
@_guard
def obstruction(braid, strands, as_json, cap, rational, flip, timings):
    """Degree (-1) groups below the self-linking level; when they all
    vanish the first window class is forced nonzero."""
    cfg = _config(as_json, cap, rational, flip, timings)
    w = _word(braid, strands, cfg)
    vanishes, bad = triviality_obstruction(w)
    report = {"braid": format_word(w), "self_linking": w.self_linking,
              "obstruction_vanishes": vanishes,
              "class_forced_nonzero": vanishes,
              "groups": _groups_json(bad)}
    _emit(report, cfg)


@main.command(name="flype-verify")
@click.argument("a")
@click.argument("b")
@click.argument("k", type=int)
@click.option("--m", "block", type=int, default=None,
              help="strand block index (default: smallest legal)")
@click.option("--diff", "difference", is_flag=True)
@common_options
@_guard
def flype_verify(a, b, k, block, difference, as_json, cap, rational, flip,
                 timings):
    """Certify the negative flype with a filtered witness."""
    cfg = _config(as_json, cap, rational, flip, timings)
    A = parse_word(a).letters
    B = parse_word(b).letters
    if difference:
        report = verify_diff_flype(A, B, k, block)
    else:
        report = verify_flype(A, B, k, block, flip=cfg.flip_labels)
    _emit(report, cfg)


@main.command(name="markov-verify")
@click.argument("braid")
@click.option("--script", "script_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--strands", type=int, default=None)
@click.option("--diff", "difference", is_flag=True)
@common_options
@_guard
def markov_verify(braid, script_path, strands, difference, as_json, cap,
                  rational, flip, timings):
    """Transport the cycle along a closure-preserving move script."""
    cfg = _config(as_json, cap, rational, flip, timings)
    w = _word(braid, strands, cfg)
    with open(script_path) as fh:
        moves = parse_script(fh.read())
    target = apply_script(w, moves)
    if len(target.letters) > cfg.max_crossings:
        raise TooLarge("script target has %d letters; cap is %d"
                       % (len(target.letters), cfg.max_crossings))
    if difference:
        report = verify_diff_markov(w, target, moves,
                                    flip=cfg.flip_labels)
    else:
        report = verify_markov(w, target, moves, flip=cfg.flip_labels)
    _emit(report, cfg)


@main.command(name="negstab-verify")
@click.argument("braid")
@click.option("--pos", type=int, default=None,
              help="insertion position (default: end of word)")
@click.option("--strands", type=int, default=None)
@common_options
@_guard
def negstab_verify(braid, pos, strands, as_json, cap, rational, flip,
                   timings):
    """Certify the negative-stabilization correspondence (both twins,
    linearity, and the sign-flip control)."""
    cfg = _config(as_json, cap, rational, flip, timings)
    w = _word(braid, strands, cfg)
    report = verify_neg_stab(w, pos, flip=cfg.flip_labels)
    _emit(report, cfg)


@main.command(name="grid2braid")
@click.argument("gridfile", type=click.File("r"))
@common_options
@_guard
def grid2braid(gridfile, as_json, cap, rational, flip, timings):
    """Extract the ascending closure braid of a grid."""
    cfg = _config(as_json, cap, rational, flip, timings)
    g = parse_grid(gridfile.read())
    w = braid_from_grid(g)
    report = {"n": g.n, "braid": format_word(w), "strands": w.strands,
              "self_linking": w.self_linking,
              "components": component_count(g)}
    if component_count(g) == 1:
        tb, rot = classical_invariants(g)
        report["tb"], report["rot"] = tb, rot
    _emit(report, cfg, headline="%s  (strands %d)"
          % (format_word(w), w.strands))


@main.command(name="sz-verify")
@click.argument("gridfile1", type=click.File("r"))
@click.argument("gridfile2", type=click.File("r"))
@common_options
@_guard
def sz_verify(gridfile1, gridfile2, as_json, cap, rational, flip, timings):
    """Certify that two grids present the two sides of the square-move
    flype."""
    cfg = _config(as_json, cap, rational, flip, timings)
    g1 = parse_grid(gridfile1.read())
    g2 = parse_grid(gridfile2.read())
    report = verify_flype_sz(g1, g2)
    _emit(report, cfg)


@main.command(name="suite")
@click.option("--seed", type=int, default=0)
@click.option("--quick", is_flag=True,
              help="scale the randomized counts down to smoke-test size")
@common_options
@_guard
def suite(seed, quick, as_json, cap, rational, flip, timings):
    """Run all randomized acceptance suites."""
    cfg = _config(as_json, cap, rational, flip, timings)
    report = suite_mod.run_all(seed=seed, scale=0.1 if quick else 1.0)
    if cfg.output == "json":
        _emit(report, cfg)
    else:
        for part in report["parts"]:
            click.echo("%-26s %s  (%d checks, %.1fs)"
                       % (part["name"],
                          "ok" if part["ok"] else "FAILED",
                          part["count"], part["seconds"]))
            for f in part["failures"][:5]:
                click.echo("    failure: %r" % (f,))
        click.echo("suite %s" % ("ok" if report["ok"] else "FAILED"))
    if not report["ok"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
