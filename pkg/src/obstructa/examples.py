"""Shipped example algebras and the spec-file loader.

Every shipped spec lives in ``data/`` as a JSON file; ``build`` reads it,
validates it and attaches the derived companions (bimodules, the solved
bounding cochain of E3).
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .ainfinity import (AlgebraSpec, BimoduleSpec, HomomorphismSpec, SpecError, ainfty_defect,
                        diagonal_bimodule, empty_bimodule, unit_check, validate_spec)
from .window_homology import Window

FILES = {
    "E-zero": "e-zero.json",
    "E-free": "e-free.json",
    "E1": "e1.json",
    "E2": "e2.json",
    "E3": "e3.json",
    "E4": "e4.json",
}
COMPANION_FILES = {"E2-diagonal": "e2-diagonal.json", "E1-identity": "e1-identity.json"}
NAMES = tuple(FILES)


class SpecParseError(SpecError):
    def __init__(self, message, line=None, col=None, source=None):
        self.line, self.col, self.source = line, col, source
        where = ""
        if line is not None:
            where = f"{source or '<spec>'}:{line}:{col}: "
        super().__init__(where + message)


# positions -------------------------------------------------------------------

_WS = " \t\r\n"


def _positions(text):
    """Map from JSON path tuples to character offsets of their values."""
    dec = json.JSONDecoder()
    pos = {}

    def skip(i):
        while i < len(text) and text[i] in _WS:
            i += 1
        return i

    def value(i, path):
        i = skip(i)
        pos[path] = i
        ch = text[i]
        if ch == "{":
            i = skip(i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = dec.raw_decode(text, skip(i))
                i = skip(i)
                i = value(i + 1, path + (key,))
                i = skip(i)
                if text[i] == "}":
                    return i + 1
                i += 1
        if ch == "[":
            i = skip(i + 1)
            if text[i] == "]":
                return i + 1
            n = 0
            while True:
                i = value(i, path + (n,))
                n += 1
                i = skip(i)
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = dec.raw_decode(text, i)
        return end

    value(0, ())
    return pos


def _line_col(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _Doc:
    def __init__(self, text, source):
        self.text = text
        self.source = source
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecParseError(e.msg, e.lineno, e.colno, source) from None
        self.pos = _positions(text)

    def fail(self, path, message):
        off = None
        p = tuple(path)
        while off is None and p:
            off = self.pos.get(p)
            p = p[:-1]
        if off is None:
            raise SpecParseError(message, source=self.source)
        line, col = _line_col(self.text, off)
        where = ".".join(str(x) for x in path)
        raise SpecParseError(f"{where}: {message}", line, col, self.source)

    def get(self, obj, path, key, kind, required=True, default=None):
        if not isinstance(obj, dict):
            self.fail(path, "expected an object")
        if key not in obj:
            if required:
                self.fail(path, f"missing field '{key}'")
            return default
        v = obj[key]
        p = tuple(path) + (key,)
        if kind == "int":
            if isinstance(v, bool) or not isinstance(v, int):
                self.fail(p, f"expected an integer, got {json.dumps(v)}")
        elif kind == "rat":
            try:
                v = Fraction(v) if not isinstance(v, bool) else None
            except (TypeError, ValueError, ZeroDivisionError):
                v = None
            if v is None:
                self.fail(p, f"expected a rational number, got {json.dumps(obj[key])}")
        elif kind == "str":
            if not isinstance(v, str):
                self.fail(p, f"expected a string, got {json.dumps(v)}")
        elif kind == "list":
            if not isinstance(v, list):
                self.fail(p, "expected a list")
        elif kind == "bool":
            if not isinstance(v, bool):
                self.fail(p, "expected true or false")
        return v


# parsing ---------------------------------------------------------------------

def _classes(doc, d):
    out = {}
    where = {}
    for i, c in enumerate(doc.get(d, (), "classes", "list")):
        p = ("classes", i)
        lab = doc.get(c, p, "label", "str")
        if lab in out:
            doc.fail(p + ("label",), f"duplicate class {lab}")
        out[lab] = (doc.get(c, p, "energy", "rat"), doc.get(c, p, "maslov", "int"))
        where[lab] = p
    return out, where


def _ops(doc, d, field_name, ids_in, ids_out, classes):
    ops = {}
    for i, op in enumerate(doc.get(d, (), field_name, "list")):
        p = (field_name, i)
        lab = doc.get(op, p, "class", "str")
        if lab not in classes:
            doc.fail(p + ("class",), f"undeclared class {lab}")
        if field_name == "n_ops":
            ar = doc.get(op, p, "arity", "list")
            if len(ar) != 2 or not all(isinstance(x, int) and not isinstance(x, bool) for x in ar):
                doc.fail(p + ("arity",), "expected [k1, k0]")
            key = (tuple(ar), lab)
        else:
            key = (doc.get(op, p, "arity", "int"), lab)
        table = ops.setdefault(key, {})
        for j, t in enumerate(doc.get(op, p, "terms", "list")):
            tp = p + ("terms", j)
            if field_name == "n_ops":
                left = [_id(doc, x, tp + ("left", n), ids_in[0]) for n, x in enumerate(doc.get(t, tp, "left", "list"))]
                mid = _id(doc, doc.get(t, tp, "module", "str"), tp + ("module",), ids_in[1])
                right = [_id(doc, x, tp + ("right", n), ids_in[2]) for n, x in enumerate(doc.get(t, tp, "right", "list"))]
                inp = (tuple(left), mid, tuple(right))
            else:
                inp = tuple(_id(doc, x, tp + ("in", n), ids_in) for n, x in enumerate(doc.get(t, tp, "in", "list")))
            outs = table.setdefault(inp, {})
            for n, o in enumerate(doc.get(t, tp, "out", "list")):
                opth = tp + ("out", n)
                oid = _id(doc, doc.get(o, opth, "id", "str"), opth + ("id",), ids_out)
                outs[oid] = outs.get(oid, 0) + doc.get(o, opth, "coeff", "rat")
    return ops


def _id(doc, x, path, known):
    if not isinstance(x, str) or x not in known:
        doc.fail(path, f"unknown basis id {json.dumps(x)}")
    return x


def _algebra_from(doc, d):
    name = doc.get(d, (), "name", "str")
    basis = []
    for i, b in enumerate(doc.get(d, (), "basis", "list")):
        p = ("basis", i)
        basis.append((doc.get(b, p, "id", "str"), doc.get(b, p, "degree", "int"),
                      doc.get(b, p, "unit", "bool", required=False, default=False)))
    ids = {b[0] for b in basis}
    if len(ids) != len(basis):
        doc.fail(("basis",), "duplicate basis ids")
    classes, where = _classes(doc, d)
    ops = _ops(doc, d, "ops", ids, ids, classes)
    a = AlgebraSpec(name, basis, classes, ops)
    bad = validate_spec(a)
    if bad:
        # point at the last class a violation names, when it names one
        named = [(bad[0].rfind(repr(lab)), lab) for lab in where if repr(lab) in bad[0]]
        named += [(0, lab) for lab in where if bad[0].startswith(f"class {lab}:")]
        if named:
            doc.fail(where[max(named)[1]], bad[0])
        doc.fail(("ops",) if "m_" in bad[0] else (), bad[0])
    return a


def _resolve_algebra(doc, d, key):
    ref = d.get(key)
    if isinstance(ref, str):
        if ref not in FILES:
            doc.fail((key,), f"unknown example {ref}")
        return load_example_algebra(ref)
    if isinstance(ref, dict):
        return _algebra_from(_Sub(doc, (key,)), ref)
    doc.fail((key,) if key in d else (), f"'{key}' must name an example or hold an algebra")


class _Sub:
    """View of a nested document with paths prefixed."""

    def __init__(self, doc, prefix):
        self.doc, self.prefix = doc, tuple(prefix)

    def fail(self, path, message):
        self.doc.fail(self.prefix + tuple(path), message)

    def get(self, obj, path, key, kind, required=True, default=None):
        return self.doc.get(obj, self.prefix + tuple(path), key, kind, required, default)


def parse_spec(text, source=None):
    """AlgebraSpec, BimoduleSpec or HomomorphismSpec from spec-file text."""
    doc = _Doc(text, source)
    d = doc.data
    if not isinstance(d, dict):
        doc.fail((), "expected an object at the top level")
    if "n_ops" in d:
        a = _resolve_algebra(doc, d, "algebra")
        classes, _ = _classes(doc, d)
        mb = [(doc.get(b, ("module_basis", i), "id", "str"), doc.get(b, ("module_basis", i), "degree", "int"))
              for i, b in enumerate(doc.get(d, (), "module_basis", "list"))]
        mids = {b[0] for b in mb}
        ops = _ops(doc, d, "n_ops", (set(a.ids), mids, set(a.ids)), mids, classes)
        m = BimoduleSpec(a, a, mb, classes, ops, name=doc.get(d, (), "name", "str"))
        bad = m.validate()
        if bad:
            doc.fail(("n_ops",), bad[0])
        return m
    if "f_ops" in d:
        src = _resolve_algebra(doc, d, "source")
        tgt = _resolve_algebra(doc, d, "target")
        classes, _ = _classes(doc, d)
        ops = _ops(doc, d, "f_ops", set(src.ids), set(tgt.ids), classes)
        f = HomomorphismSpec(src, tgt, classes, ops, name=doc.get(d, (), "name", "str"))
        bad = f.validate()
        if bad:
            doc.fail(("f_ops",), bad[0])
        return f
    return _algebra_from(doc, d)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), str(path))


def dumps(spec, algebra_ref=None):
    d = spec.to_dict()
    if isinstance(spec, BimoduleSpec):
        d = {"name": spec.name, "algebra": algebra_ref or spec.left.to_dict(),
             "module_basis": d["module_basis"],
             "classes": [{"label": lab, "energy": str(e), "maslov": mu}
                         for lab, (e, mu) in sorted(spec.classes.items())],
             "n_ops": d["n_ops"]}
    elif isinstance(spec, HomomorphismSpec):
        d = {"name": spec.name, "source": algebra_ref or spec.source.to_dict(),
             "target": algebra_ref or spec.target.to_dict(),
             "classes": d["classes"], "f_ops": d["f_ops"]}
    return json.dumps(d, indent=2) + "\n"


def save(spec, path, algebra_ref=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(spec, algebra_ref))


# shipped examples ------------------------------------------------------------

def _data_text(fname):
    return resources.files("obstructa").joinpath("data", fname).read_text(encoding="utf-8")


_ALG_CACHE = {}


def load_example_algebra(name):
    if name not in FILES:
        raise SpecError(f"unknown example {name}; choose from {', '.join(NAMES)}")
    a = _ALG_CACHE.get(name)
    if a is None:
        a = _ALG_CACHE[name] = parse_spec(_data_text(FILES[name]), FILES[name])
    return a


def example_path(name):
    fname = FILES.get(name) or COMPANION_FILES.get(name)
    if fname is None:
        raise SpecError(f"unknown example {name}")
    return str(resources.files("obstructa").joinpath("data", fname))


@dataclass
class Example:
    name: str
    algebra: AlgebraSpec
    bimodules: dict = field(default_factory=dict)
    homomorphisms: dict = field(default_factory=dict)
    bounding_cochain: dict = None
    checks: dict = field(default_factory=dict)


def build(name, check_window=None):
    """Load a shipped example, validate it and attach its companions."""
    from .hochschild import mc_defect, solve_mc
    a = load_example_algebra(name)
    w = check_window or Window(L_max=3, E_max=3)
    checks = {"validate": not validate_spec(a), "ainfty": ainfty_defect(a, w).ok}
    if a.unit is not None:
        checks["unit"] = not unit_check(a)
    ex = Example(name, a, {"diagonal": diagonal_bimodule(a), "empty": empty_bimodule(a)}, checks=checks)
    if name == "E2":
        ex.bimodules["file-diagonal"] = parse_spec(_data_text(COMPANION_FILES["E2-diagonal"]), "e2-diagonal.json")
    if name == "E1":
        ex.homomorphisms["identity"] = parse_spec(_data_text(COMPANION_FILES["E1-identity"]), "e1-identity.json")
    if name == "E3":
        b = solve_mc(a, Window(L_max=4, E_max=3))
        ex.bounding_cochain = b
        checks["mc"] = not mc_defect(a, b, Window(L_max=4, E_max=3))
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise SpecError(f"example {name} failed its build checks: {', '.join(failed)}")
    return ex
