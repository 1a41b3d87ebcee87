"""Command line: check suites, normal forms, the contraction run, catalog export.

    ekappa check {hopf,contraction,ideals,calculus,brackets,dual,projections,intersections,all}
    ekappa nf --algebra etilde "a0 a0s"
    ekappa contract --order 2 [--json out.json] [--report full.json]
    ekappa export-catalog [-o file]

Exit codes: 0 all checks pass, 1 some check fails, 2 usage error.

A suite is a list of tasks; a task is a module-level function returning
``Check`` records, so ``--jobs N`` can farm tasks out to processes.  Results
are assembled in task order, never in completion order.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from . import calculus as calc
from . import contract as con
from .catalog import Catalog, FormatError, default_catalog
from .rewrite import quotient_report

__all__ = ["main", "Check", "CheckConfig", "SUITES", "ACCEPTANCE", "run_suite", "report_json", "SCHEMA_PATH"]

TOOL_VERSION = __version__
SCHEMA_PATH = Path(__file__).with_name("report.schema.json")
log = logging.getLogger("ekappa")

ALGEBRAS = ("su_mu2", "etilde", "ekappa", "ekappa_dual")
CONFLUENCE = ("etilde", "ekappa", "ekappa_dual")
CALCULI = ("threeD", "fourDplus", "fourDminus")
IDEALS = {"threeD": "3D", "fourDplus": "4D+", "fourDminus": "4D-"}
QUOTIENTS = {  # ideal -> (algebra key for reps, representative source)
    "r0_tilde": ("threeD_tilde", 3),
    "r0_ekappa": ("threeD", 3),
    "r0plus_tilde": ("fourDplus", 4),
    "r0minus_tilde": ("fourDminus", 4),
}


@dataclass
class Check:
    id: str
    paper_location: str
    status: str  # pass / fail / skipped
    witness: Optional[str] = None
    degree_bound: Optional[int] = None

    def __post_init__(self):
        if self.status == "fail" and not self.witness:
            self.witness = "check failed without a recorded witness"


@dataclass
class CheckConfig:
    deg: int = 4
    order: int = 2
    variant: str = "adopted"
    algebra: Optional[str] = None
    calc: Optional[str] = None
    catalog_files: Tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# helpers


_CATS: Dict[Tuple, Catalog] = {}


def _catalog(cfg: CheckConfig) -> Catalog:
    if not cfg.catalog_files:
        return default_catalog(cfg.order)
    key = (cfg.catalog_files, cfg.order)
    if key not in _CATS:
        _CATS[key] = Catalog.from_files([Path(p) for p in cfg.catalog_files], order=cfg.order)
    return _CATS[key]


def _loc(cat: Catalog, key: str, variant: str = "adopted", default: str = "") -> str:
    try:
        return cat.section(key, variant).location or default
    except KeyError:
        return default


def _from_outcome(o, cid: str, location: str, deg: Optional[int]) -> Check:
    if o.ok:
        return Check(cid, location, "pass", None, deg)
    w = o.witness or ""
    if o.failed > 1:
        w = f"{w} (first of {o.failed} failures, {o.passed} passed)"
    return Check(cid, location, "fail", w, deg)


def _fixture(cid: str, location: str, rejected: bool, reason: str, deg: Optional[int]) -> Check:
    """Regression fixture: passes iff the literal reading is rejected."""
    if rejected:
        return Check(cid, location, "pass", f"literal reading rejected: {reason}", deg)
    return Check(cid, location, "fail", f"literal reading was not rejected ({reason})", deg)


def _error_check(cid: str, location: str, exc: Exception, deg: Optional[int]) -> Check:
    return Check(cid, location, "fail", f"{type(exc).__name__}: {exc}", deg)


# ---------------------------------------------------------------------------
# hopf


def task_hopf_axioms(cfg: CheckConfig, alg: str) -> List[Check]:
    cat = _catalog(cfg)
    loc = _loc(cat, f"algebra.{alg}", default=f"Hopf structure of {alg}")
    cid = f"hopf.{alg}.axioms"
    try:
        h = cat.hopf(alg, mu="exact") if alg == "su_mu2" else cat.hopf(alg)
        rep = h.check_axioms(cfg.deg)
    except Exception as exc:  # a broken presentation is a failed check, not a crash
        return [_error_check(cid, loc, exc, cfg.deg)]
    bad = [(k, r) for k, r in sorted(rep.results.items()) if not r.ok]
    if not bad:
        return [Check(cid, loc, "pass", None, cfg.deg)]
    k, r = bad[0]
    return [Check(cid, loc, "fail", f"{k}: {r.witness} ({r.failed} failures)", cfg.deg)]


def task_confluence(cfg: CheckConfig, alg: str, deg: int = 6) -> List[Check]:
    cat = _catalog(cfg)
    loc = _loc(cat, f"algebra.{alg}", default=f"relations of {alg}")
    cid = f"hopf.{alg}.confluence"
    try:
        pres = cat.presentation(alg)
        rep = pres.check_confluence(deg)
    except Exception as exc:
        return [_error_check(cid, loc, exc, deg)]
    for step in getattr(pres, "completion_log", []) or []:
        log.info("%s completion: %s", alg, step)
    if rep.ok:
        return [Check(cid, loc, "pass", None, deg)]
    return [Check(cid, loc, "fail", f"{len(rep.unresolved)} unresolved overlaps, first {rep.unresolved[0]}", deg)]


def task_covering(cfg: CheckConfig) -> List[Check]:
    cat = _catalog(cfg)
    out = []
    loc = _loc(cat, "covering.ekappa", default="covering map")
    o = con.Covering(cat, cfg.variant).check_homomorphism()
    out.append(_from_outcome(o, f"covering.{cfg.variant}.hopf", loc, None))
    if cfg.variant == "adopted" and cat.has("covering.ekappa", "literal"):
        lit = con.Covering(cat, "literal").check_homomorphism()
        out.append(_fixture("covering.literal.rejected", loc, not lit.ok, lit.witness or "", None))
    return out


def suite_hopf(cfg: CheckConfig):
    algs = (cfg.algebra,) if cfg.algebra else ALGEBRAS
    tasks = [(task_hopf_axioms, (a,)) for a in algs]
    tasks += [(task_confluence, (a,)) for a in (algs if cfg.algebra else CONFLUENCE)]
    if not cfg.algebra or cfg.algebra in ("ekappa", "etilde"):
        tasks.append((task_covering, ()))
    return tasks


# ---------------------------------------------------------------------------
# contraction


def _cm(cfg: CheckConfig):
    return con.ContractionMap.from_catalog(_catalog(cfg), order=cfg.order)


def _limit_checks(cat: Catalog, cm, rep: con.ContractionReport) -> List[Check]:
    loc = _loc(cat, "contraction.su_mu2", default="contraction of SU_mu(2)")
    bad = [r for r in rep.residues if r[2] != "0"]
    out = [Check("contraction.limit_algebra", loc, "pass" if rep.ok else "fail",
                 None if rep.ok else f"{bad[0][0]} at t^{bad[0][1]}: residue {bad[0][2]} "
                                     f"({rep.passed}/{len(rep.residues)} residues zero)", 1)]
    out.append(_from_outcome(con.check_star_equivariance(cm, 3, 1), "contraction.star", loc, 3))
    out.append(_from_outcome(con.check_counit_compatibility(cm), "contraction.counit", loc, None))
    return out


def _form_checks(cat: Catalog, rep: con.FormExpansionReport) -> List[Check]:
    loc = _loc(cat, "identity.expansion.threeD", default="expansion of the SU_mu(2) forms")
    loc2 = _loc(cat, "table.exterior.su_mu2", default="exterior identities")
    out = [Check("contraction.forms.expansion", loc, "fail" if rep.mismatches else "pass",
                 "; ".join(rep.mismatches) or None, 1)]
    w = None
    if not rep.reproduces:
        w = (f"limit relations (rank {rep.obtained_rank}) differ from the printed set (rank {rep.printed_rank}): "
             + "; ".join(rep.relations))
    out.append(Check("contraction.forms.exterior_limit", loc2, "pass" if rep.reproduces else "fail", w, 0))
    return out


def task_limit_algebra(cfg: CheckConfig) -> List[Check]:
    cat = _catalog(cfg)
    cm = _cm(cfg)
    return _limit_checks(cat, cm, con.verify_limit_algebra(cm, con.printed_relations(cat), orders=1))


def task_form_expansion(cfg: CheckConfig) -> List[Check]:
    cat = _catalog(cfg)
    return _form_checks(cat, con.expand_forms(_cm(cfg), cat, cfg.variant))


def suite_contraction(cfg: CheckConfig):
    return [(task_limit_algebra, ()), (task_form_expansion, ())]


# ---------------------------------------------------------------------------
# ideals


def _ideal_check(cid: str, loc: str, rep: con.IdealContractionReport) -> Check:
    if rep.ok:
        return Check(cid, loc, "pass", None, rep.degree)
    parts = [f"limit dim {rep.limit_dim}, claimed dim {rep.claimed_dim}"]
    if not rep.claimed_in_limits:
        parts.append("claimed generators are not all limits")
    if not rep.limits_in_claimed:
        parts.append("some limits lie outside the claimed ideal")
    if rep.missing:
        parts.append("first: " + rep.missing[0])
    return Check(cid, loc, "fail", "; ".join(parts), rep.degree)


def task_ideal_contraction(cfg: CheckConfig, calc_name: str) -> List[Check]:
    cat = _catalog(cfg)
    which = IDEALS[calc_name]
    src, claimed = con.IDEAL_PAIRS[which]
    loc = _loc(cat, f"ideal.{claimed}", default=f"ideal {claimed}")
    v = cfg.variant
    sv = v if cat.has(f"ideal.{src}", v) else "adopted"
    cv = v if cat.has(f"ideal.{claimed}", v) else "adopted"
    cm = _cm(cfg)
    rep = con.contract_ideal_from_catalog(which, cfg.deg, cat, sv, cv, cm=cm, naive=False)
    out = [_ideal_check(f"ideals.{calc_name}.contraction", loc, rep)]
    if v == "adopted":
        for part, key in (("source", src), ("claimed", claimed)):
            if not cat.has(f"ideal.{key}", "literal"):
                continue
            args = ("literal", "adopted") if part == "source" else ("adopted", "literal")
            lit = con.contract_ideal_from_catalog(which, cfg.deg, cat, *args, cm=cm, naive=False)
            reason = f"limit dim {lit.limit_dim} vs claimed dim {lit.claimed_dim}"
            out.append(_fixture(f"ideals.{calc_name}.literal_{part}_rejected", loc, not lit.ok, reason, cfg.deg))
    return out


def task_quotient(cfg: CheckConfig, ideal: str) -> List[Check]:
    cat = _catalog(cfg)
    calc_name, want = QUOTIENTS[ideal]
    sec = cat.section(f"ideal.{ideal}")
    csec = cat.section(f"calculus.{calc_name}")
    h = cat.hopf(sec.meta["algebra"])
    reps = [h.parse(rhs) for _, _, rhs in csec.equations()]
    gens = cat.ideal_generators(ideal, cfg.variant if cat.has(f"ideal.{ideal}", cfg.variant) else "adopted")
    rep = quotient_report(h.base, gens, h.counit, cfg.deg, reps)
    ok = rep.dimension == want and rep.representatives_ok
    w = None
    if not ok:
        w = f"quotient dimension {rep.dimension} (expected {want})"
        if rep.witness:
            w += f"; {rep.witness}"
    return [Check(f"ideals.{ideal}.quotient", sec.location or f"ideal {ideal}", "pass" if ok else "fail", w, cfg.deg)]


def suite_ideals(cfg: CheckConfig):
    tasks = [(task_ideal_contraction, (c,)) for c in CALCULI]
    tasks += [(task_quotient, (i,)) for i in QUOTIENTS]
    return tasks


# ---------------------------------------------------------------------------
# calculus


def _ext_variant(cat: Catalog, name: str, variant: str) -> str:
    return variant if cat.has(f"table.exterior.{name}", variant) else "adopted"


def _calc_degree(cfg: CheckConfig) -> int:
    return max(6, cfg.deg + 2)


def task_calculus(cfg: CheckConfig, name: str) -> List[Check]:
    cat = _catalog(cfg)
    loc = _loc(cat, f"calculus.{name}", default=name)
    out: List[Check] = []
    c = cat.calculus(name, exterior=_ext_variant(cat, name, cfg.variant), degree=_calc_degree(cfg))
    # printed commutation table
    tv = cfg.variant if cat.has(f"table.commutation.{name}", cfg.variant) else "adopted"
    tloc = _loc(cat, f"table.commutation.{name}", tv, loc)
    try:
        table = calc.parse_comm_table(c, cat.section(f"table.commutation.{name}", tv).equations())
        out.append(_from_outcome(calc.check_comm_table(c, table), f"calculus.{name}.comm_table", tloc, 1))
        out.append(_from_outcome(calc.table_consistency(c, table), f"calculus.{name}.comm_table_consistency", tloc, 1))
    except calc.CalculusError as exc:
        out.append(_error_check(f"calculus.{name}.comm_table", tloc, exc, 1))
    eloc = _loc(cat, f"table.exterior.{name}", default=loc)
    for key, o in calc.consistency_suite(c, cfg.deg).items():
        sub = key.split(".", 1)[1]
        bound = cfg.deg if sub == "leibniz" else None
        out.append(_from_outcome(o, f"calculus.{key}", eloc if sub.startswith("exterior") else loc, bound))
    if cat.has(f"table.formstar.{name}"):
        sec = cat.section(f"table.formstar.{name}")
        printed = {}
        for _, lhs, rhs in sec.equations():
            printed[c.labels.index(lhs.rstrip("*").strip())] = c.parse_form(rhs)
        out.append(_from_outcome(calc.check_form_star(c, printed), f"calculus.{name}.form_star", sec.location or loc, 2))
    return out


def _suite_failure(c) -> Optional[str]:
    for o in calc.consistency_suite(c, 2).values():
        if not o.ok:
            return f"{o.name}: {o.witness}"
    return None


def task_calculus_fixtures(cfg: CheckConfig) -> List[Check]:
    cat = _catalog(cfg)
    out = []
    for name in CALCULI:
        if not cat.has(f"table.exterior.{name}", "literal"):
            continue
        loc = _loc(cat, f"table.exterior.{name}", default=name)
        c = cat.calculus(name, exterior="literal", degree=_calc_degree(cfg))
        why = _suite_failure(c)
        out.append(_fixture(f"calculus.{name}.literal_exterior_rejected", loc, why is not None, why or "", 2))
    for name in CALCULI:
        if not cat.has(f"table.commutation.{name}", "literal"):
            continue
        loc = _loc(cat, f"table.commutation.{name}", default=name)
        c = cat.calculus(name, degree=_calc_degree(cfg))
        try:
            table = calc.parse_comm_table(c, cat.section(f"table.commutation.{name}", "literal").equations())
            o = calc.check_comm_table(c, table)
            why = None if o.ok else o.witness
        except calc.CalculusError as exc:
            why = str(exc)
        out.append(_fixture(f"calculus.{name}.literal_comm_table_rejected", loc, why is not None, why or "", 1))
    if cat.has("calculus.threeD_tilde", "literal"):
        loc = _loc(cat, "calculus.threeD_tilde", default="threeD_tilde")
        try:
            cat.calculus("threeD_tilde", variant="literal", degree=_calc_degree(cfg))
            why = None
        except calc.CalculusError as exc:
            why = str(exc)
        out.append(_fixture("calculus.threeD_tilde.literal_rejected", loc, why is not None, why or "", _calc_degree(cfg)))
    return out


def suite_calculus(cfg: CheckConfig):
    names = (cfg.calc,) if cfg.calc else CALCULI
    tasks = [(task_calculus, (n,)) for n in names]
    if cfg.variant == "adopted" and not cfg.calc:
        tasks.append((task_calculus_fixtures, ()))
    return tasks


# ---------------------------------------------------------------------------
# brackets (quantum Lie algebras on the function side)


def task_brackets(cfg: CheckConfig, name: str) -> List[Check]:
    cat = _catalog(cfg)
    c = cat.calculus(name, degree=2 * cfg.deg)
    sec = cat.section(f"table.bracket.{name}")
    loc = sec.location or name
    o, fixes = calc.check_brackets(c, sec.equations(), cfg.deg)
    chk = _from_outcome(o, f"brackets.{name}", loc, cfg.deg)
    if fixes:
        corr = "; ".join(f"{f.identity}: printed {f.printed}, derived {f.derived or f.note}" for f in fixes)
        chk.witness = f"{chk.witness}; corrections: {corr}"
    out = [chk]
    if cat.has(f"table.funcstar.{name}"):
        fs = cat.section(f"table.funcstar.{name}")
        out.append(_from_outcome(calc.check_funcstar(c, fs.equations(), cfg.deg),
                                 f"brackets.{name}.functional_star", fs.location or loc, cfg.deg))
    sdeg = min(cfg.deg, 3)
    for key, o in calc.check_structure(c, sdeg).items():
        sub = key.split(".", 1)[1]
        if sub == "chi_coproduct_transposed":
            continue  # the printed index order is judged on the dual side
        out.append(_from_outcome(o, f"brackets.{name}.{sub}", loc, sdeg))
    return out


def suite_brackets(cfg: CheckConfig):
    names = (cfg.calc,) if cfg.calc else CALCULI
    return [(task_brackets, (n,)) for n in names]


# ---------------------------------------------------------------------------
# dual side


def task_dual(cfg: CheckConfig) -> List[Check]:
    cat = _catalog(cfg)
    loc = _loc(cat, "identity.dual.threeD", default="dual side")
    rep = calc.dual_side_from_catalog(cat, "threeD")
    return [_from_outcome(o, name, loc, None) for name, o in rep.outcomes.items()]


def suite_dual(cfg: CheckConfig):
    return [(task_dual, ())]


# ---------------------------------------------------------------------------
# projections and intersections


def task_projections(cfg: CheckConfig) -> List[Check]:
    cat = _catalog(cfg)
    rep = con.verify_projections(cat, cfg.deg, cfg.variant)
    out = []
    for o in rep.outcomes:
        _, proj, part = o.name.split(".")
        key = "identity.projection." if part == "forms" else "identity.funcprojection."
        out.append(_from_outcome(o, o.name, _loc(cat, key + proj, default=proj),
                                 None if part == "forms" else cfg.deg))
    return out


def task_intersection(cfg: CheckConfig, deg: int) -> List[Check]:
    cat = _catalog(cfg)
    loc = _loc(cat, "ideal.r0plus_tilde", default="4D ideals")
    rep = con.verify_intersections(deg, cat, corollary=True)
    out = []
    if rep.ok:
        out.append(Check(f"intersections.deg{deg}", loc, "pass", "generators: " + "; ".join(rep.generators), deg))
    else:
        out.append(Check(f"intersections.deg{deg}", loc, "fail",
                         f"dims {rep.dims}; equal={rep.equal}; probe in both={rep.contains_probe}", deg))
    cloc = _loc(cat, "ideal.r0_ekappa", default="3D ideal")
    w = None if rep.corollary_ok else f"dims {rep.corollary_dims[0]} vs {rep.corollary_dims[1]}"
    out.append(Check(f"intersections.deg{deg}.corollary", cloc, "pass" if rep.corollary_ok else "fail", w, deg))
    return out


def suite_projections(cfg: CheckConfig):
    return [(task_projections, ())]


def suite_intersections(cfg: CheckConfig):
    return [(task_intersection, (d,)) for d in range(2, cfg.deg + 1)]


SUITES: Dict[str, Callable[[CheckConfig], list]] = {
    "hopf": suite_hopf,
    "contraction": suite_contraction,
    "ideals": suite_ideals,
    "calculus": suite_calculus,
    "brackets": suite_brackets,
    "dual": suite_dual,
    "projections": suite_projections,
    "intersections": suite_intersections,
}

# acceptance criterion -> check ids (default options, all suites)
ACCEPTANCE: Dict[int, Tuple[str, ...]] = {
    1: tuple(f"hopf.{a}.axioms" for a in ALGEBRAS),
    2: tuple(f"hopf.{a}.confluence" for a in CONFLUENCE),
    3: ("contraction.limit_algebra",),
    4: ("ideals.threeD.contraction", "ideals.r0_tilde.quotient", "ideals.r0_ekappa.quotient"),
    5: ("ideals.fourDplus.contraction", "ideals.fourDminus.contraction",
        "ideals.r0plus_tilde.quotient", "ideals.r0minus_tilde.quotient"),
    6: tuple(f"calculus.{c}.comm_table" for c in CALCULI),
    7: ("contraction.forms.expansion", "contraction.forms.exterior_limit"),
    8: tuple(f"calculus.{c}.{k}" for c in CALCULI for k in ("d_squared", "leibniz"))
    + ("calculus.threeD.literal_exterior_rejected", "calculus.fourDminus.literal_exterior_rejected"),
    9: tuple(f"brackets.{c}" for c in CALCULI) + ("brackets.threeD.functional_star",),
    10: ("dual.brackets", "dual.f_coproduct", "dual.f_counit", "dual.chi_coproduct_printed_order", "dual.relations"),
    11: ("projection.threeD.forms", "projection.fourDplus.forms", "projection.fourDplus.functionals",
         "projection.fourDminus.forms", "projection.fourDminus.functionals"),
    12: ("intersections.deg2", "intersections.deg3", "intersections.deg4"),
}


# ---------------------------------------------------------------------------
# running and reporting


def _run_task(item) -> List[Check]:
    fn, args, cfg = item
    t = time.time()
    out = fn(cfg, *args)
    log.info("%s%s: %.1fs", fn.__name__, args, time.time() - t)
    return out


def run_tasks(tasks: Sequence, cfg: CheckConfig, jobs: int = 1) -> List[Check]:
    items = [(fn, args, cfg) for fn, args in tasks]
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_task, items))  # map keeps task order
    else:
        results = [_run_task(it) for it in items]
    return [c for r in results for c in r]


def run_suite(name: str, cfg: Optional[CheckConfig] = None, jobs: int = 1) -> List[Check]:
    cfg = cfg or CheckConfig()
    names = list(SUITES) if name == "all" else [name]
    tasks = [t for n in names for t in SUITES[n](cfg)]
    return run_tasks(tasks, cfg, jobs)


def report_json(suite: str, checks: Sequence[Check], wall_time_ms: int) -> str:
    doc = {
        "tool_version": TOOL_VERSION,
        "suite": suite,
        "checks": [asdict(c) for c in checks],
        "wall_time_ms": wall_time_ms,
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def report_text(suite: str, checks: Sequence[Check], wall_time_ms: int) -> str:
    lines = []
    for c in checks:
        lines.append(f"{c.status.upper():7s} {c.id}  [{c.paper_location}]")
        if c.status == "fail" and c.witness:
            lines.append(f"        {c.witness}")
    n = {s: sum(1 for c in checks if c.status == s) for s in ("pass", "fail", "skipped")}
    lines.append(f"{suite}: {n['pass']} passed, {n['fail']} failed, {n['skipped']} skipped "
                 f"({wall_time_ms / 1000:.1f}s)")
    return "\n".join(lines) + "\n"


def _exit_code(checks: Sequence[Check]) -> int:
    return 1 if any(c.status == "fail" for c in checks) else 0


def _emit(args, suite: str, checks: List[Check], t0: float) -> int:
    ms = 0 if args.no_timing else int((time.time() - t0) * 1000)
    sys.stdout.write(report_text(suite, checks, ms))
    if args.json:
        Path(args.json).write_text(report_json(suite, checks, ms))
    return _exit_code(checks)


# ---------------------------------------------------------------------------
# commands


def _config(args) -> CheckConfig:
    return CheckConfig(deg=args.deg, order=args.order, variant=args.variant, algebra=args.algebra,
                       calc=args.calc, catalog_files=tuple(args.catalog or ()))


def cmd_check(args) -> int:
    t0 = time.time()
    cfg = _config(args)
    cat = _catalog(cfg)
    if cfg.algebra and cfg.algebra not in cat.list("algebra"):
        raise UsageError(f"unknown algebra {cfg.algebra!r}")
    if cfg.calc and cfg.calc not in CALCULI:
        raise UsageError(f"unknown calculus {cfg.calc!r} (choose from {', '.join(CALCULI)})")
    checks = run_suite(args.suite, cfg, args.jobs)
    return _emit(args, args.suite, checks, t0)


def _nf_algebra(spec: str, order: int):
    """Algebra by catalog key, or the first algebra of a presentation file."""
    p = Path(spec)
    if p.suffix and p.exists():
        cat = Catalog.from_files([p], order=order)
        names = cat.list("algebra")
        if not names:
            raise UsageError(f"{spec}: no [algebra] section")
        return cat.hopf(names[0], validate=False) if cat.has(f"coproduct.{names[0]}") else cat.presentation(names[0])
    cat = default_catalog(order)
    if spec not in cat.list("algebra"):
        raise UsageError(f"unknown algebra {spec!r} (choose from {', '.join(cat.list('algebra'))})")
    return cat.presentation(spec)


def cmd_nf(args) -> int:
    alg = _nf_algebra(args.algebra or "etilde", args.order)
    base = getattr(alg, "base", alg)
    status = 0
    for expr in args.expr:
        try:
            p = base.normal_form(base.parse(expr))
        except ValueError as exc:
            sys.stderr.write(f"error: {exc}\n")
            status = 2
            continue
        print(p.to_text())
    return status


def cmd_contract(args) -> int:
    if args.order < 1:
        raise UsageError("--order must be at least 1 (the t^1 residues need it)")
    t0 = time.time()
    cfg = CheckConfig(deg=args.deg, order=args.order, variant=args.variant)
    cat = _catalog(cfg)
    cm = _cm(cfg)
    limit = con.verify_limit_algebra(cm, con.printed_relations(cat), 1)
    checks = _limit_checks(cat, cm, limit)
    full = {"limit_algebra": limit.to_json(), "ideals": {}}
    for calc_name, which in IDEALS.items():
        rep = con.contract_ideal_from_catalog(which, cfg.deg, cat, cm=cm)
        full["ideals"][which] = rep.to_json()
        loc = _loc(cat, f"ideal.{con.IDEAL_PAIRS[which][1]}", default=which)
        checks.append(_ideal_check(f"ideals.{calc_name}.contraction", loc, rep))
    forms = con.expand_forms(cm, cat, cfg.variant)
    full["forms"] = forms.to_json()
    checks += _form_checks(cat, forms)
    if args.report:
        Path(args.report).write_text(json.dumps(full, indent=2, sort_keys=True) + "\n")
    return _emit(args, "contract", checks, t0)


def _export_text(cat: Catalog) -> str:
    out = []
    for s in cat.sections:
        head = f"[{s.kind} {s.name}" + (f" {s.variant}" if s.explicit_variant else "") + "]"
        out.append(head)
        out.extend(f"@{k} {v}" for k, v in s.meta.items())
        out.extend(text for _, text in s.lines)
        out.append("")
    return "\n".join(out)


def cmd_export(args) -> int:
    text = _export_text(_catalog(CheckConfig(order=args.order)))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 already; keep the message format
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ekappa", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, order=True):
        sp.add_argument("--deg", type=int, default=4, help="degree bound (default 4)")
        if order:
            sp.add_argument("--order", type=int, default=2, help="series order in t = 1/R (default 2)")
        sp.add_argument("--json", metavar="PATH", help="also write the JSON report here")
        sp.add_argument("--variant", choices=("adopted", "literal"), default="adopted")
        sp.add_argument("--no-timing", action="store_true", help="write wall_time_ms = 0 (byte-stable reports)")

    c = sub.add_parser("check", help="run a check suite")
    c.add_argument("suite", choices=list(SUITES) + ["all"])
    c.add_argument("--algebra")
    c.add_argument("--calc")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--catalog", action="append", metavar="FILE", help="use these catalog files instead")
    common(c)
    c.set_defaults(func=cmd_check)

    n = sub.add_parser("nf", help="normal form of expressions")
    n.add_argument("--algebra", help="catalog algebra or presentation file (default etilde)")
    n.add_argument("--order", type=int, default=2)
    n.add_argument("expr", nargs="+")
    n.set_defaults(func=cmd_nf)

    k = sub.add_parser("contract", help="run the full contraction")
    k.add_argument("--report", metavar="PATH", help="write the detailed contraction report (JSON)")
    common(k)
    k.set_defaults(func=cmd_contract)

    e = sub.add_parser("export-catalog", help="print the built-in catalog")
    e.add_argument("-o", "--output")
    e.add_argument("--order", type=int, default=2)
    e.set_defaults(func=cmd_export)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if getattr(args, "deg", 1) < 1 or getattr(args, "jobs", 1) < 1:
        sys.stderr.write("ekappa: error: --deg and --jobs must be positive\n")
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"ekappa: error: {exc}\n")
        return 2
    except (FormatError, KeyError) as exc:
        sys.stderr.write(f"ekappa: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
