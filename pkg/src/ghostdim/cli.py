"""Command-line surface: corpus management, dimension runs, verification suites.

Reports are deterministic: the same (ring, command, bound, seed, window)
produces byte-identical JSON.  Exit codes: 0 for PASS / computed values,
1 for a verification FAIL, 2 for errors.  FAIL reports embed replayable
counterexamples.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click

from .complexes import (
    chain_map_from_dict,
    chain_map_to_dict,
    complex_from_dict,
    complex_to_dict,
    module_complex,
    null_homotopy,
    resolution_complex,
)
from .dimensions import (
    DimReport,
    ghdim_ring,
    gldim_ring,
    rouquier_build,
    standard_battery,
    symmetry_report,
    wdim_ring,
)
from .errors import GhostdimError, ParseError, UnknownCommand
from .ghosts import (
    factor_through_projective,
    ghost_tower,
    pdim_complex,
    random_chain_map,
    universal_ghost,
)
from .modules import free_module, is_projective
from .rings import BUILTIN_NAMES, builtin_ring, load_ring_file, ring_to_dict
from .tensor_ss import fdim_via_ss

CORPUS_ENV = "GHOSTDIM_CORPUS_DIR"


def resolve_ring(selector):
    """Builtin name, a file path, or a name resolved in GHOSTDIM_CORPUS_DIR."""
    if selector in BUILTIN_NAMES:
        return builtin_ring(selector)
    if os.path.exists(selector):
        return load_ring_file(selector)
    corpus = os.environ.get(CORPUS_ENV)
    if corpus:
        candidate = os.path.join(corpus, selector + ".json")
        if os.path.exists(candidate):
            return load_ring_file(candidate)
    raise ParseError(
        f"unknown ring {selector!r}: not a builtin ({', '.join(BUILTIN_NAMES)}), "
        f"not a file, and not found under ${CORPUS_ENV}"
    )


def emit(data, output, exit_code=0):
    if output == "json":
        click.echo(json.dumps(data, sort_keys=True, indent=2))
    else:
        _emit_text(data)
    sys.exit(exit_code)


def _emit_text(data, indent=0):
    pad = "  " * indent
    if isinstance(data, dict):
        for key in data:
            val = data[key]
            if isinstance(val, (dict, list)) and val and not _is_flat(val):
                click.echo(f"{pad}{key}:")
                _emit_text(val, indent + 1)
            else:
                click.echo(f"{pad}{key}: {val}")
    elif isinstance(data, list):
        for item in data:
            if isinstance(item, (dict, list)):
                _emit_text(item, indent)
                click.echo("")
            else:
                click.echo(f"{pad}- {item}")
    else:
        click.echo(f"{pad}{data}")


def _is_flat(val):
    if isinstance(val, list):
        return all(not isinstance(x, (dict, list)) for x in val)
    return False


def parse_window(text):
    if text is None:
        return None
    try:
        lo, hi = text.split(":")
        return (int(lo), int(hi))
    except ValueError:
        raise ParseError(f"bad window {text!r}; expected LO:HI") from None


def _run_members(members, fn, jobs):
    """Apply fn to battery members, optionally in parallel; results sorted by id."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda mem: (mem.ident, fn(mem)), members))
    else:
        results = [(mem.ident, fn(mem)) for mem in members]
    return sorted(results, key=lambda pair: pair[0])


@click.group()
def main():
    """Homological dimension calculator for derived categories of finite rings."""


@main.group()
def ring():
    """Ring corpus management."""


@ring.command("list")
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
def ring_list(output):
    data = {"builtins": list(BUILTIN_NAMES)}
    emit(data, output)


@ring.command("describe")
@click.option("--ring", "selector", required=True)
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
def ring_describe(selector, output):
    try:
        r = resolve_ring(selector)
    except GhostdimError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    emit(r.describe(), output)


@main.command("dim")
@click.argument("quantity", type=click.Choice(["wdim", "gldim", "ghdim"]))
@click.option("--ring", "selector", required=True)
@click.option("--bound", default=8, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
def dim_command(quantity, selector, bound, seed, output):
    """Compute a ring-level dimension."""
    try:
        r = resolve_ring(selector)
        if quantity == "wdim":
            verdict, witnesses = wdim_ring(r, bound)
        elif quantity == "gldim":
            verdict, witnesses = gldim_ring(r, bound)
        else:
            verdict, witnesses = ghdim_ring(r, bound, seed=seed)
        rep = DimReport(ring=r.name, quantity=quantity, verdict=verdict,
                        bound=bound, seed=seed, witnesses=witnesses)
    except GhostdimError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    emit(rep.to_json(), output)


@main.command("complex")
@click.argument("quantity", type=click.Choice(["pdim", "fdim"]))
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@click.option("--bound", default=8, show_default=True)
@click.option("--window", default=None)
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
def complex_command(quantity, path, bound, window, output):
    """Compute the projective or flat dimension of a serialized complex."""
    try:
        with open(path) as fh:
            data = json.load(fh)
        cx = complex_from_dict(data)
        win = parse_window(window)
        if quantity == "pdim":
            verdict = pdim_complex(cx, bound)
        else:
            verdict = fdim_via_ss(cx, bound, window=win)
    except (GhostdimError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    emit({"file": os.path.basename(path), "quantity": quantity, "bound": bound,
          "value": verdict.render(), "verdict": verdict.to_json()}, output)


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------

def verify_summary(r, bound, seed, jobs):
    g_verdict, g_rep = ghdim_ring(r, bound, seed=seed)
    w_verdict, w_wit = wdim_ring(r, bound)
    ok = g_verdict.same_verdict(w_verdict)
    report = {
        "suite": "summary",
        "ring": r.name,
        "ghdim": g_verdict.render(),
        "wdim": w_verdict.render(),
        "pass": ok,
        "ghdim_report": g_rep,
        "wdim_witnesses": w_wit,
    }
    if not ok:
        report["counterexamples"] = [{
            "kind": "summary",
            "ring": ring_to_dict(r),
            "bound": bound,
            "seed": seed,
            "ghdim": g_verdict.render(),
            "wdim": w_verdict.render(),
        }]
    return ok, report


def verify_symmetry(r, bound, seed, jobs):
    rep = symmetry_report(r, bound, seed=seed)
    ok = rep["status"] == "equal"
    report = {
        "suite": "symmetry",
        "ring": r.name,
        "ghdim": rep["ghdim"].render(),
        "ghdim_op": rep["ghdim_op"].render(),
        "status": rep["status"],
        "pass": ok,
    }
    if not ok:
        report["counterexamples"] = [{
            "kind": "symmetry",
            "ring": ring_to_dict(r),
            "bound": bound,
            "seed": seed,
            "ghdim": rep["ghdim"].render(),
            "ghdim_op": rep["ghdim_op"].render(),
        }]
    return ok, report


def verify_flatchar(r, bound, seed, jobs):
    import random as _random

    members, _ = standard_battery(r, bound, seed, min_size=12)
    rng = _random.Random(seed + 1)
    rows = []
    failures = []

    def check(mem):
        x = mem.cx
        hom = x.homology()
        flat = all(is_projective(hom[k].module)[0] for k in x.degrees())
        ug = universal_ghost(x)
        ghost_null = null_homotopy(ug.ghost) is not None
        entry = {"member": mem.ident, "flat_homology": flat, "universal_ghost_null": ghost_null}
        if flat != ghost_null:
            entry["fail"] = "ghost nullity disagrees with flatness"
            return entry
        if flat:
            probes = 0
            for _ in range(8):
                a = module_complex(free_module(r, 1))
                f = random_chain_map(a, x, rng)
                if f.is_zero:
                    continue
                try:
                    fact = factor_through_projective(f, ug=ug)
                    fact.validate(f)
                except GhostdimError as exc:
                    entry["fail"] = f"factorization failed: {exc}"
                    entry["map"] = chain_map_to_dict(f)
                    return entry
                probes += 1
                if probes >= 3:
                    break
            entry["factorizations_checked"] = probes
        return entry

    for ident, entry in _run_members(members, check, jobs):
        rows.append(entry)
        if "fail" in entry:
            ce = {
                "kind": "flatchar",
                "ring": ring_to_dict(r),
                "bound": bound,
                "seed": seed,
                "complex": complex_to_dict(next(m.cx for m in members if m.ident == ident)),
                "detail": entry["fail"],
            }
            if "map" in entry:
                ce["map"] = entry.pop("map")
            failures.append(ce)
    ok = not failures
    report = {"suite": "flatchar", "ring": r.name, "members": rows, "pass": ok}
    if failures:
        report["counterexamples"] = failures
    return ok, report


def verify_compact_eq(r, bound, seed, jobs):
    members, _ = standard_battery(r, bound, seed, min_size=25)
    rows = []
    failures = []

    def check(mem):
        v_p = pdim_complex(mem.cx, bound)
        v_f = fdim_via_ss(mem.cx, bound)
        return {"member": mem.ident, "pdim": v_p.render(), "fdim": v_f.render(),
                "agree": v_p.same_verdict(v_f)}

    for ident, entry in _run_members(members, check, jobs):
        rows.append(entry)
        if not entry["agree"]:
            failures.append({
                "kind": "compact-eq",
                "ring": ring_to_dict(r),
                "bound": bound,
                "seed": seed,
                "complex": complex_to_dict(next(m.cx for m in members if m.ident == ident)),
                "pdim": entry["pdim"],
                "fdim": entry["fdim"],
            })
    ok = not failures
    report = {"suite": "compact-eq", "ring": r.name, "battery_size": len(members),
              "members": rows, "pass": ok}
    if failures:
        report["counterexamples"] = failures
    return ok, report


def verify_rouquier(r, bound, seed, jobs):
    members, _ = standard_battery(r, bound, seed, min_size=15)
    rows = []
    failures = []

    def check(mem):
        v = pdim_complex(mem.cx, bound)
        if not v.is_finite or v.n > min(4, bound):
            return {"member": mem.ident, "pdim": v.render(), "skipped": True}
        try:
            cert = rouquier_build(mem.cx, v.n)
            cert.validate(mem.cx)
        except GhostdimError as exc:
            return {"member": mem.ident, "pdim": v.render(), "fail": str(exc)}
        return {
            "member": mem.ident,
            "pdim": v.render(),
            "triangles": len(cert.steps),
            "stage_ranks": [st.free_rank_total for st in cert.steps],
            "retract_exact": not cert.retract_homotopy.mats,
            "ok": len(cert.steps) <= v.n,
        }

    for ident, entry in _run_members(members, check, jobs):
        rows.append(entry)
        if entry.get("fail") or entry.get("ok") is False:
            failures.append({
                "kind": "rouquier",
                "ring": ring_to_dict(r),
                "bound": bound,
                "seed": seed,
                "complex": complex_to_dict(next(m.cx for m in members if m.ident == ident)),
                "detail": entry.get("fail", "too many triangles"),
            })
    ok = not failures
    report = {"suite": "rouquier", "ring": r.name, "members": rows, "pass": ok}
    if failures:
        report["counterexamples"] = failures
    return ok, report


_SUITES = {
    "summary": verify_summary,
    "symmetry": verify_symmetry,
    "flatchar": verify_flatchar,
    "compact-eq": verify_compact_eq,
    "rouquier": verify_rouquier,
}


@main.command("verify")
@click.argument("suite", type=click.Choice(sorted(_SUITES)))
@click.option("--ring", "selector", required=True)
@click.option("--bound", default=8, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--jobs", default=1, show_default=True)
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
def verify_command(suite, selector, bound, seed, jobs, output):
    """Run a theorem-verification suite against one ring."""
    try:
        r = resolve_ring(selector)
        ok, report = _SUITES[suite](r, bound, seed, jobs)
    except GhostdimError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    report["result"] = "PASS" if ok else "FAIL"
    emit(report, output, exit_code=0 if ok else 1)


@main.command("replay")
@click.argument("path", type=click.Path(exists=True))
@click.option("--output", type=click.Choice(["text", "json"]), default="text")
def replay_command(path, output):
    """Re-run the checks recorded in a FAIL report or counterexample file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
        ces = data.get("counterexamples", [data] if "kind" in data else [])
        if not ces:
            raise ParseError("no counterexamples found in file")
        results = [_replay_one(ce) for ce in ces]
    except (GhostdimError, json.JSONDecodeError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    ok = all(res["pass"] for res in results)
    emit({"replayed": results, "result": "PASS" if ok else "FAIL"}, output,
         exit_code=0 if ok else 1)


def _replay_one(ce):
    kind = ce["kind"]
    from .rings import make_ring, ring_spec_from_dict

    r = make_ring(ring_spec_from_dict(ce["ring"]))
    bound = int(ce.get("bound", 8))
    seed = int(ce.get("seed", 0))
    if kind == "summary":
        ok, _ = verify_summary(r, bound, seed, 1)
        return {"kind": kind, "pass": ok}
    if kind == "symmetry":
        ok, _ = verify_symmetry(r, bound, seed, 1)
        return {"kind": kind, "pass": ok}
    if kind in ("compact-eq", "flatchar", "rouquier"):
        cx = complex_from_dict(ce["complex"], ring=r)
        if kind == "compact-eq":
            v_p = pdim_complex(cx, bound)
            v_f = fdim_via_ss(cx, bound)
            return {"kind": kind, "pdim": v_p.render(), "fdim": v_f.render(),
                    "pass": v_p.same_verdict(v_f)}
        if kind == "flatchar":
            hom = cx.homology()
            flat = all(is_projective(hom[k].module)[0] for k in cx.degrees())
            ug = universal_ghost(cx)
            ghost_null = null_homotopy(ug.ghost) is not None
            result = {"kind": kind, "flat": flat, "ghost_null": ghost_null,
                      "pass": flat == ghost_null}
            if "map" in ce and result["pass"] and flat:
                f = chain_map_from_dict(module_complex(free_module(r, 1)), cx,
                                        ce["map"])
                try:
                    factor_through_projective(f, ug=ug).validate(f)
                except GhostdimError as exc:
                    result["pass"] = False
                    result["detail"] = str(exc)
            return result
        v = pdim_complex(cx, bound)
        if not v.is_finite:
            return {"kind": kind, "pass": False, "detail": "pdim not finite"}
        try:
            cert = rouquier_build(cx, v.n)
            cert.validate(cx)
            return {"kind": kind, "pass": len(cert.steps) <= v.n}
        except GhostdimError as exc:
            return {"kind": kind, "pass": False, "detail": str(exc)}
    raise UnknownCommand(f"cannot replay counterexample of kind {kind!r}")


if __name__ == "__main__":
    main()
