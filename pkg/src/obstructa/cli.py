"""Command-line runner.  Every verb composes module operations and emits a
deterministic report; exit codes: 0 pass, 1 check failure, 2 usage or
configuration, 3 resource cap."""

import argparse
import json
import sys
from fractions import Fraction

from . import ainfinity as ai
from . import ce_dual, cyclic, examples, hochschild, linfinity
from .novikov import NovikovError
from .window_homology import (LedgerError, ResourceError, Window, bar_complex, homology,
                              nonboundary_certificate, spectral_page)

VERBS = ("validate", "bar", "cyclic", "sym", "hochschild", "reduced-hochschild", "ce", "cyclic-ce",
         "dual-ce", "bicomplex-check", "bb-complex", "alpha", "gamma", "mc-check", "deform", "vanish",
         "pages", "example")


class UsageError(Exception):
    pass


def _val(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    s = str(v)
    if not s or any(ch in s for ch in " \t\"="):
        return json.dumps(s, ensure_ascii=False)
    return s


class Report:
    def __init__(self, command, spec_name, window):
        self.command = command
        self.spec_name = spec_name
        self.window = window
        self.records = []
        self.messages = []

    def add(self, kind, ok=None, **fields):
        if ok is not None:
            fields["ok"] = bool(ok)
        self.records.append((kind, fields))

    def say(self, text):
        self.messages.append(text)
        self.add("message", text=text)

    def defect(self, rep):
        w = rep.worst()
        self.add("check", rep.ok, name=rep.name, checked=rep.checked, failures=len(rep.residuals),
                 first="" if w is None else w[0])

    def homology(self, rep, label=None):
        name = label or rep.name
        self.add("homology", complex=name, margin=rep.margin, ledger=rep.ledger, total=rep.total())
        for d, v in sorted(rep.dims.items()):
            self.add("degree", complex=name, degree=d, cells=v.cells, kernel=v.kernel,
                     image=v.image, homology=v.homology)

    @property
    def ok(self):
        return all(f.get("ok", True) for _, f in self.records)

    def _base(self):
        parts = [f"command={self.command}", f"spec={_val(self.spec_name)}"]
        if self.window is not None:
            parts += [f"{k}={_val(v)}" for k, v in self.window.params().items()]
        return " ".join(parts)

    def emit(self, fmt="records"):
        base = self._base()
        if fmt == "records":
            lines = [f"report {base}"]
            for kind, fields in self.records:
                rest = " ".join(f"{k}={_val(v)}" for k, v in fields.items())
                lines.append(f"{kind} {base} {rest}".rstrip())
            lines.append(f"result {base} ok={_val(self.ok)}")
            return "\n".join(lines) + "\n"
        lines = [f"{self.command} on {self.spec_name}"]
        if self.window is not None:
            lines.append("window: " + ", ".join(f"{k}={_val(v)}" for k, v in self.window.params().items()))
        for kind, fields in self.records:
            if kind == "message":
                lines.append(f"  {fields['text']}")
                continue
            mark = ""
            if "ok" in fields:
                mark = "PASS " if fields["ok"] else "FAIL "
            body = "  ".join(f"{k}={_val(v)}" for k, v in fields.items() if k != "ok")
            lines.append(f"  {mark}{kind:<10} {body}")
        lines.append("result: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines) + "\n"


# argument handling --------------------------------------------------------------

def _rational(text):
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text}")
    return v


def _degrees(text):
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text}")


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--emax", type=_rational, default=Fraction(3))
    common.add_argument("--lmax", type=int, default=4)
    common.add_argument("--kmax", type=int, default=None)
    common.add_argument("--degrees", type=_degrees, default=None)
    common.add_argument("--mode", choices=("z", "z2"), default="z")
    common.add_argument("--spec", default=None, help="spec file (algebra, bimodule or homomorphism)")
    common.add_argument("--example", default=None, help="shipped example name instead of --spec")
    common.add_argument("--bimodule", default=None, help="bimodule spec file, 'diagonal' or 'empty'")
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("text", "records"), default="records")
    common.add_argument("--margin", type=int, default=None)
    common.add_argument("--no-slope", dest="slope", action="store_false",
                        help="fixed length budget at every energy instead of the sloped one")
    p = argparse.ArgumentParser(prog="obstructa", description="Exact windows of filtered A-infinity structures.")
    sub = p.add_subparsers(dest="verb", required=True)
    for v in VERBS:
        sp = sub.add_parser(v, parents=[common])
        if v == "example":
            sp.add_argument("name", choices=examples.NAMES)
        if v == "bb-complex":
            sp.add_argument("--columns", default="2,4,6")
        if v == "vanish":
            sp.add_argument("--samples", type=int, default=20)
            sp.add_argument("--seed", type=int, default=0)
        if v == "pages":
            sp.add_argument("--page", type=int, default=2)
            sp.add_argument("--complex", choices=("bar", "hochschild", "cyclic"), default="bar")
    return p


def _window(args):
    try:
        return Window(L_max=args.lmax, E_max=args.emax, degree_range=args.degrees,
                      K_max=args.kmax, mode=args.mode, slope=args.slope)
    except ValueError as e:
        raise UsageError(str(e))


def _load(args):
    if args.spec and args.example:
        raise UsageError("give --spec or --example, not both")
    if args.spec:
        return examples.load(args.spec)
    if args.example:
        return examples.load_example_algebra(args.example)
    raise UsageError("no input: pass --spec <path> or --example <name>")


def _algebra(spec):
    if isinstance(spec, ai.AlgebraSpec):
        return spec
    if isinstance(spec, ai.BimoduleSpec):
        return spec.left
    raise UsageError("this verb needs an algebra or bimodule spec")


def _bimodule(args, spec, a):
    if isinstance(spec, ai.BimoduleSpec) and args.bimodule is None:
        return spec
    choice = args.bimodule or "diagonal"
    if choice == "diagonal":
        return ai.diagonal_bimodule(a)
    if choice == "empty":
        return ai.empty_bimodule(a)
    m = examples.load(choice)
    if not isinstance(m, ai.BimoduleSpec):
        raise UsageError(f"{choice} is not a bimodule spec")
    if m.left.to_dict() != a.to_dict():
        raise UsageError(f"{choice} is a bimodule over {m.left.name}, not {a.name}")
    return ai.BimoduleSpec(a, a, list(zip(m.mids, m.mdegrees)), m.classes, m.nops, name=m.name)


# verbs ------------------------------------------------------------------------------

def v_validate(args, spec, w, r):
    if isinstance(spec, ai.HomomorphismSpec):
        bad = spec.validate(w.mode)
        r.add("check", not bad, name="degrees", failures=len(bad), first=bad[0] if bad else "")
        r.defect(ai.hom_chainmap_defect(spec, w))
        return
    if isinstance(spec, ai.BimoduleSpec):
        bad = spec.validate(w.mode)
        r.add("check", not bad, name="degrees", failures=len(bad), first=bad[0] if bad else "")
        r.defect(ai.bimodule_defect(spec, w))
        return
    a = spec
    bad = ai.validate_spec(a, w.mode)
    for b in bad:
        r.add("violation", False, text=b)
    r.add("check", not bad, name="spec", failures=len(bad))
    if a.unit is not None:
        ub = ai.unit_check(a)
        r.add("check", not ub, name="unit", failures=len(ub), first=ub[0] if ub else "")
    d1 = ai.ainfty_defect(a, w)
    d2 = ai.direct_relation_defect(a, w)
    r.defect(d1)
    r.defect(d2)
    r.add("check", d1.ok == d2.ok, name="routes-agree")


def v_bar(args, spec, w, r):
    a = _algebra(spec)
    r.homology(homology(bar_complex(a, w), args.margin), "bar")


def v_cyclic(args, spec, w, r):
    a = _algebra(spec)
    r.homology(cyclic.cyclic_homology(a, w, args.margin), "cyclic")
    r.defect(cyclic.cyclic_invariants(a, w))


def v_sym(args, spec, w, r):
    a = _algebra(spec)
    l = linfinity.symmetrize_algebra(a, mode=w.mode)
    for k, table in sorted(l.tables.items()):
        for word, ents in sorted(table.items()):
            for o, c, lam, q in ents:
                r.add("bracket", arity=k, inputs=a.fmt(word), out=a.ids[o], coeff=c, energy=lam, q=q)
    s1 = linfinity.linfty_defect(l, w, "shuffle")
    s2 = linfinity.linfty_defect(l, w, "square")
    r.defect(s1)
    r.defect(s2)
    r.add("check", s1.ok == s2.ok, name="routes-agree")


def v_hochschild(args, spec, w, r):
    a = _algebra(spec)
    m = _bimodule(args, spec, a)
    r.defect(hochschild.hochschild_square_defect(a, m, w))
    r.homology(hochschild.hochschild_homology(a, m, w, args.margin), "hochschild")


def v_reduced(args, spec, w, r):
    a = _algebra(spec)
    m = _bimodule(args, spec, a)
    full = hochschild.hochschild_homology(a, m, w, args.margin)
    red = homology(hochschild.reduced_complex(a, m, w), args.margin)
    r.homology(red, "reduced-hochschild")
    r.homology(full, "hochschild")
    nonzero = lambda rep: {d: h for d, h in rep.homology().items() if h}
    r.add("check", nonzero(full) == nonzero(red), name="reduced-equals-full")


def v_ce(args, spec, w, r):
    a = _algebra(spec)
    m = _bimodule(args, spec, a)
    mod = linfinity.lmodule_from_bimodule(m, mode=w.mode)
    r.defect(linfinity.lmodule_defect(mod, w, "corrected"))
    r.homology(ce_dual.ce_chain_homology(mod.brackets, mod, w, args.margin), "ce")


def v_cyclic_ce(args, spec, w, r):
    a = _algebra(spec)
    l = linfinity.symmetrize_algebra(a, mode=w.mode)
    r.homology(ce_dual.cyclic_ce_homology(l, w, args.margin), "cyclic-ce")


def v_dual_ce(args, spec, w, r):
    a = _algebra(spec)
    cplx = [("cyclic-ce", ce_dual.cyclic_ce_complex(a, w))]
    if args.bimodule is not None or isinstance(spec, ai.BimoduleSpec):
        mod = linfinity.lmodule_from_bimodule(_bimodule(args, spec, a), mode=w.mode)
        cplx.append(("ce", ce_dual.ce_complex(mod, w)))
    for name, c in cplx:
        chain, dual, agree = ce_dual.duality_check(c, args.margin)
        for d in sorted(chain):
            r.add("duality", chain.get(d) == dual.get(d, 0), complex=name, degree=d,
                  chain=chain[d], dual=dual.get(d, 0))
        r.add("check", agree, name=f"{name}-duality")


def v_bicomplex(args, spec, w, r):
    a = _algebra(spec)
    r.defect(cyclic.bicomplex_identities(a, w))
    for name, first in cyclic.mutation_suite(a, w).items():
        r.add("mutation", name=name, detected=first is not None, first=first or "")


def v_bb(args, spec, w, r):
    a = _algebra(spec)
    try:
        cols = tuple(int(x) for x in args.columns.split(","))
    except ValueError:
        raise UsageError(f"bad --columns {args.columns}")
    b = cyclic.connes_B_report(a, w)
    r.defect(b.square)
    r.defect(b.anticommutator)
    r.add("extra-terms", cells=b.checked, differ=b.extra_terms, differ_nondegenerate=b.extra_normalized)
    comps = cyclic.compare_cyclic_methods(a, w, cols, args.margin)
    stable = cyclic.stable_columns(comps) if len(comps) > 1 else []
    for c in comps:
        r.add("tsygan", c.tsygan_agrees(), columns=c.columns,
              dims=";".join(f"{d}:{v}" for d, v in sorted(c.tsygan.items())))
        st = c.columns in stable
        r.add("bB", c.bB_agrees() if st else None, columns=c.columns, stable=st,
              dims=";".join(f"{d}:{c.bB.get(d, 0)}" for d in c.matched))
    r.add("cyclic", dims=";".join(f"{d}:{v}" for d, v in sorted(comps[0].cyclic.items())) if comps else "")


def v_alpha(args, spec, w, r):
    a = _algebra(spec)
    rep = cyclic.alpha_build(a, w, args.kmax)
    for k, res in sorted(rep.lemma.items()):
        r.add("lemma", not res, k=k, terms=len(res))
    for k, res in sorted(rep.shift_lemma.items()):
        r.add("shift-lemma", not res, k=k, terms=len(res))
    r.add("closed", not rep.closed, terms=len(rep.closed))
    r.add("unit-sources", sources=";".join(a.fmt(s) for s in rep.unit_sources))
    r.add("n2-unit", not rep.n2_unit, terms=len(rep.n2_unit))
    c = rep.certificate
    if c is not None:
        r.add("certificate", c.is_certificate and c.verify(), cert_kind=c.kind, level=c.level,
              degree=c.degree, complete=c.complete)


def v_gamma(args, spec, w, r):
    a = _algebra(spec)
    gamma, dg, _ = cyclic.gamma_build(a, w)
    if not dg:
        r.say("d\u0302(\u03b3) = 0 within window")
    r.add("closed", not dg, terms=len(dg))
    for k, sign in sorted(cyclic.gamma_power_identity(a, w).items()):
        r.add("power-identity", k=k, sign=sign or "none")
    c = bar_complex(a, w)
    cert = nonboundary_certificate(c, {k: v for k, v in gamma.items() if k in c.index})
    r.add("certificate", cert.is_certificate and cert.verify(), cert_kind=cert.kind, level=cert.level,
          degree=cert.degree, complete=cert.complete)


def _mc(a, w):
    b = hochschild.solve_mc(a, w)
    return b, hochschild.mc_defect(a, b, w)


def v_mc(args, spec, w, r):
    a = _algebra(spec)
    try:
        b, defect = _mc(a, w)
    except hochschild.ObstructedError as e:
        r.add("check", False, name="mc-solve", reason=str(e))
        return
    r.add("bounding-cochain", terms=";".join(f"{a.ids[x]}@{_val(lam)}:{_val(c)}" for (x, lam, q), c in sorted(b.items())))
    r.add("check", not defect, name="mc-defect", terms=len(defect))
    d = hochschild.deform(a, b, w)
    r.defect(ai.ainfty_defect(d, w))
    sq = hochschild.differential_square(d, w)
    r.add("check", not sq, name="m1b-squared", terms=len(sq))
    if a.unit is not None:
        m = ai.diagonal_bimodule(a)
        g = hochschild.gamma_b(a, b, w)
        dg = hochschild.dhoch_raw(a, m, g, w.E_max, w.mode)
        r.add("check", not dg, name="gamma-b-cycle", terms=len(dg))
    tried, bad = hochschild.augmentation_check(a, b, w)
    r.add("check", not bad, name="augmentation", functionals=tried, failures=len(bad))


def v_deform(args, spec, w, r):
    a = _algebra(spec)
    b, _ = _mc(a, w)
    d = hochschild.deform(a, b, w)
    r.defect(ai.ainfty_defect(d, w))
    text = examples.dumps(d)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        r.add("written", path=args.out)
    else:
        r.add("deformed", spec=json.dumps(d.to_dict(), sort_keys=True))


def v_vanish(args, spec, w, r):
    a = _algebra(spec)
    l = linfinity.symmetrize_algebra(a, mode=w.mode)
    rep = ce_dual.obstruction_extract(a, w, l)
    for c in rep.classes:
        r.add("obstruction", label=c.label, energy=c.energy, maslov=c.maslov,
              cycle=c.is_cycle, exact=c.exact)
    if rep.status != "candidate":
        r.say(rep.summary())
        r.add("check", False, name="vanishing-certificate", status=rep.status)
        return
    cert = rep.certificate
    ok = isinstance(cert, ce_dual.VanishingCertificate)
    r.add("check", ok, name="vanishing-certificate", candidate=rep.candidate.format(),
          reason="" if ok else cert.reason)
    if not ok:
        return
    r.add("contraction", h=cert.h.format(), inverse=cert.inverse.format())
    recs = ce_dual.verify_cyclic_ce_vanishing(cert, w, args.samples, args.seed)
    r.add("check", recs and all(x.verified for x in recs), name="cyclic-ce-witnesses",
          sampled=len(recs), verified=sum(x.verified for x in recs))
    m = _bimodule(args, spec, a)
    mod = linfinity.lmodule_from_bimodule(m, mode=w.mode)
    recs = ce_dual.ce_module_vanishing(mod, cert, w, args.samples, args.seed)
    r.add("check", all(x.verified for x in recs), name="ce-module-witnesses",
          sampled=len(recs), verified=sum(x.verified for x in recs))


def v_pages(args, spec, w, r):
    a = _algebra(spec)
    if args.complex == "bar":
        c = bar_complex(a, w)
    elif args.complex == "cyclic":
        c = cyclic.cyclic_complex(a, w)
    else:
        c = hochschild.hochschild_complex(a, _bimodule(args, spec, a), w)
    for (p, n), dim in sorted(spectral_page(c, args.page).items()):
        r.add("page", complex=c.name, page=args.page, degree=p, level=n, dim=dim)


HANDLERS = {
    "validate": v_validate, "bar": v_bar, "cyclic": v_cyclic, "sym": v_sym,
    "hochschild": v_hochschild, "reduced-hochschild": v_reduced, "ce": v_ce,
    "cyclic-ce": v_cyclic_ce, "dual-ce": v_dual_ce, "bicomplex-check": v_bicomplex,
    "bb-complex": v_bb, "alpha": v_alpha, "gamma": v_gamma, "mc-check": v_mc,
    "deform": v_deform, "vanish": v_vanish, "pages": v_pages,
}


def run(argv, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.verb == "example":
            text = examples.dumps(examples.load_example_algebra(args.name))
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                stdout.write(text)
            return 0
        w = _window(args)
        spec = _load(args)
        r = Report(args.verb, spec.name, w)
        HANDLERS[args.verb](args, spec, w, r)
    except UsageError as e:
        stderr.write(f"obstructa: {e}\n")
        return 2
    except ResourceError as e:
        stderr.write(f"obstructa: {e}\n")
        return 3
    except LedgerError as e:
        stderr.write(f"obstructa: {e}\n")
        return 1
    except hochschild.ObstructedError as e:
        stderr.write(f"obstructa: {e}\n")
        return 1
    except (ai.SpecError, NovikovError, ValueError, OSError) as e:
        stderr.write(f"obstructa: {e}\n")
        return 2
    out = r.emit(args.format)
    if args.out and args.verb != "deform":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        stdout.write(out)
    return 0 if r.ok else 1


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
