"""File formats: JSON codecs for the core values and the CSV report.

All numbers are exact rationals serialized as "p/q" strings; parsers
also accept a bare "p".  No floats appear in any file.  Encoders emit
lists in a fixed sorted order so that identical values produce
byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .scalars import QI, frac_str, parse_frac
from .jets import JetContext, JetFunction, MixedTensor, Deformation
from .realcalc import RealVector, RealForm, JetMap
from .flows import GeneralizedField, GeneralizedFlow
from .normalizer import NormalizationParams
from .linear_gca import LinearGC, LinearBrane, brane_tangent_from_F


class FormatError(ValueError):
    """Input file does not match the expected schema."""


def _qi_str_pair(c):
    return frac_str(c.re), frac_str(c.im)


def _qi_from_pair(re, im):
    try:
        return QI(parse_frac(re), parse_frac(im))
    except (ValueError, ZeroDivisionError) as e:
        raise FormatError(f"bad rational pair ({re!r}, {im!r}): {e}")


def _require(d, key, types=None):
    if key not in d:
        raise FormatError(f"missing key {key!r}")
    v = d[key]
    if types is not None and not isinstance(v, types):
        raise FormatError(f"key {key!r} has wrong type {type(v).__name__}")
    return v


def _context_header(ctx):
    return {"n": ctx.n, "k": ctx.k, "N": ctx.max_degree,
            "r": frac_str(ctx.r)}


def _context_from_header(d, ctx=None):
    n = _require(d, "n", int)
    k = _require(d, "k", int)
    N = _require(d, "N", int)
    r = parse_frac(_require(d, "r", str))
    if ctx is not None:
        if (ctx.n, ctx.k, ctx.max_degree, ctx.r) != (n, k, N, r):
            raise FormatError("file header does not match the context")
        return ctx
    try:
        return JetContext(n=n, k=k, max_degree=N, r=r)
    except ValueError as e:
        raise FormatError(str(e))


def _int_list(v, length, what):
    if (not isinstance(v, list) or len(v) != length
            or any(not isinstance(x, int) for x in v)):
        raise FormatError(f"{what} must be a list of {length} integers")
    return tuple(v)


def _tensor_terms(name, T):
    out = []
    for (alpha, beta), f in T.comps.items():
        for (a, b), c in f.terms.items():
            if not c:
                continue
            re, im = _qi_str_pair(c)
            out.append({"component": name, "p_idx": list(alpha),
                        "q_idx": list(beta), "z_deg": list(a),
                        "zbar_deg": list(b), "re": re, "im": im})
    out.sort(key=lambda t: (t["component"], t["p_idx"], t["q_idx"],
                            t["z_deg"], t["zbar_deg"]))
    return out


def tensor_to_json(T):
    doc = _context_header(T.ctx)
    doc["terms"] = _tensor_terms(f"{T.p}{T.q}", T)
    if not doc["terms"]:
        # shape must survive a round trip even when empty
        doc["p"] = T.p
        doc["q"] = T.q
    return doc


def deformation_to_json(eps):
    doc = _context_header(eps.ctx)
    doc["terms"] = (_tensor_terms("20", eps.e20)
                    + _tensor_terms("02", eps.e02)
                    + _tensor_terms("11", eps.e11))
    doc["terms"].sort(key=lambda t: (t["component"], t["p_idx"], t["q_idx"],
                                     t["z_deg"], t["zbar_deg"]))
    return doc


def _read_terms(doc, ctx, allowed):
    buckets = {}
    terms = _require(doc, "terms", list)
    for i, t in enumerate(terms):
        if not isinstance(t, dict):
            raise FormatError(f"term {i} is not an object")
        comp = _require(t, "component", str)
        if len(comp) != 2 or not comp.isdigit():
            raise FormatError(f"term {i}: bad component {comp!r}")
        if allowed is not None and comp not in allowed:
            raise FormatError(f"term {i}: unexpected component {comp!r}")
        p, q = int(comp[0]), int(comp[1])
        alpha = _int_list(_require(t, "p_idx", list), p, f"term {i} p_idx")
        beta = _int_list(_require(t, "q_idx", list), q, f"term {i} q_idx")
        a = _int_list(_require(t, "z_deg", list), ctx.n, f"term {i} z_deg")
        b = _int_list(_require(t, "zbar_deg", list), ctx.n,
                      f"term {i} zbar_deg")
        for w, kind in ((alpha, "vector"), (beta, "form")):
            if any(x < 0 or x >= ctx.n for x in w):
                raise FormatError(f"term {i}: {kind} index out of range")
            if tuple(sorted(w)) != w or len(set(w)) != len(w):
                raise FormatError(f"term {i}: {kind} indices must be "
                                  "strictly ascending")
        if any(x < 0 for x in a + b):
            raise FormatError(f"term {i}: negative degree")
        if sum(a) + sum(b) > ctx.max_degree:
            raise FormatError(f"term {i}: degree exceeds the cap N")
        c = _qi_from_pair(_require(t, "re", str), _require(t, "im", str))
        T = buckets.setdefault(comp, MixedTensor(ctx, p, q))
        T._add_term(alpha, beta, JetFunction(ctx, {(a, b): c}))
    return buckets


def tensor_from_json(doc, ctx=None):
    ctx = _context_from_header(doc, ctx)
    buckets = _read_terms(doc, ctx, None)
    if len(buckets) > 1:
        raise FormatError("tensor file mixes components; expected one")
    if not buckets:
        p, q = doc.get("p"), doc.get("q")
        if not isinstance(p, int) or not isinstance(q, int):
            raise FormatError("empty tensor needs explicit p and q")
        return MixedTensor(ctx, p, q)
    return next(iter(buckets.values()))


def deformation_from_json(doc, ctx=None):
    ctx = _context_from_header(doc, ctx)
    buckets = _read_terms(doc, ctx, {"20", "11", "02"})
    return Deformation(buckets.get("20", MixedTensor(ctx, 2, 0)),
                       buckets.get("11", MixedTensor(ctx, 1, 1)),
                       buckets.get("02", MixedTensor(ctx, 0, 2)))


# ---------------------------------------------------------------------------
# generalized fields: one record per monomial of a letter's coefficient


def _letter_terms(comps):
    out = []
    for word, f in comps.items():
        letter = word[0] if isinstance(word[0], tuple) else word
        for (a, b), c in f.terms.items():
            if not c:
                continue
            re, im = _qi_str_pair(c)
            out.append({"conj": letter[0], "index": letter[1],
                        "z_deg": list(a), "zbar_deg": list(b),
                        "re": re, "im": im})
    out.sort(key=lambda t: (t["conj"], t["index"], t["z_deg"],
                            t["zbar_deg"]))
    return out


def field_to_json(v):
    doc = _context_header(v.ctx)
    doc["X"] = _letter_terms(v.X.comps)
    doc["xi"] = _letter_terms(v.xi.comps)
    return doc


def _letters_from_json(lst, ctx, what):
    comps = {}
    for i, t in enumerate(lst):
        if not isinstance(t, dict):
            raise FormatError(f"{what} term {i} is not an object")
        conj = _require(t, "conj", int)
        idx = _require(t, "index", int)
        if conj not in (0, 1) or not 0 <= idx < ctx.n:
            raise FormatError(f"{what} term {i}: bad letter "
                              f"({conj}, {idx})")
        a = _int_list(_require(t, "z_deg", list), ctx.n,
                      f"{what} term {i} z_deg")
        b = _int_list(_require(t, "zbar_deg", list), ctx.n,
                      f"{what} term {i} zbar_deg")
        c = _qi_from_pair(_require(t, "re", str), _require(t, "im", str))
        key = (conj, idx)
        f = comps.get(key, JetFunction.zero(ctx))
        comps[key] = f + JetFunction(ctx, {(a, b): c})
    return comps


def field_from_json(doc, ctx=None):
    ctx = _context_from_header(doc, ctx)
    vec = _letters_from_json(_require(doc, "X", list), ctx, "X")
    form = {(letter,): f
            for letter, f in _letters_from_json(_require(doc, "xi", list),
                                                ctx, "xi").items()}
    v = GeneralizedField(RealVector(ctx, vec), RealForm(ctx, 1, form))
    if not v.is_real():
        raise FormatError("generalized field is not real")
    return v


# ---------------------------------------------------------------------------
# flows


def _jet_terms_plain(f):
    out = []
    for (a, b), c in f.terms.items():
        if not c:
            continue
        re, im = _qi_str_pair(c)
        out.append({"z_deg": list(a), "zbar_deg": list(b),
                    "re": re, "im": im})
    out.sort(key=lambda t: (t["z_deg"], t["zbar_deg"]))
    return out


def _jet_from_plain(lst, ctx, what):
    f = JetFunction.zero(ctx)
    for i, t in enumerate(lst):
        a = _int_list(_require(t, "z_deg", list), ctx.n,
                      f"{what} term {i} z_deg")
        b = _int_list(_require(t, "zbar_deg", list), ctx.n,
                      f"{what} term {i} zbar_deg")
        c = _qi_from_pair(_require(t, "re", str), _require(t, "im", str))
        f = f + JetFunction(ctx, {(a, b): c})
    return f


def _map_to_json(phi):
    return {"z": [_jet_terms_plain(f) for f in phi.zim],
            "zbar": [_jet_terms_plain(f) for f in phi.zbim]}


def _map_from_json(d, ctx, what):
    z = _require(d, "z", list)
    zb = _require(d, "zbar", list)
    if len(z) != ctx.n or len(zb) != ctx.n:
        raise FormatError(f"{what}: expected {ctx.n} coordinate images")
    zim = [_jet_from_plain(lst, ctx, f"{what}.z[{i}]")
           for i, lst in enumerate(z)]
    zbim = [_jet_from_plain(lst, ctx, f"{what}.zbar[{i}]")
            for i, lst in enumerate(zb)]
    return JetMap(ctx, zim, zbim)


def _form2_terms(B):
    out = []
    for word, f in B.comps.items():
        (c1, i1), (c2, i2) = word
        for (a, b), c in f.terms.items():
            if not c:
                continue
            re, im = _qi_str_pair(c)
            out.append({"word": [[c1, i1], [c2, i2]], "z_deg": list(a),
                        "zbar_deg": list(b), "re": re, "im": im})
    out.sort(key=lambda t: (t["word"], t["z_deg"], t["zbar_deg"]))
    return out


def _form2_from_json(lst, ctx):
    comps = {}
    for i, t in enumerate(lst):
        w = _require(t, "word", list)
        if (len(w) != 2 or any(len(l) != 2 for l in w)
                or any(l[0] not in (0, 1) or not 0 <= l[1] < ctx.n
                       for l in w)):
            raise FormatError(f"B term {i}: bad word {w!r}")
        word = (tuple(w[0]), tuple(w[1]))
        if not word[0] < word[1]:
            raise FormatError(f"B term {i}: word letters must ascend")
        a = _int_list(_require(t, "z_deg", list), ctx.n, f"B term {i} z_deg")
        b = _int_list(_require(t, "zbar_deg", list), ctx.n,
                      f"B term {i} zbar_deg")
        c = _qi_from_pair(_require(t, "re", str), _require(t, "im", str))
        f = comps.get(word, JetFunction.zero(ctx))
        comps[word] = f + JetFunction(ctx, {(a, b): c})
    return RealForm(ctx, 2, comps)


def flow_to_json(fl):
    doc = _context_header(fl.phi.ctx)
    doc["phi"] = _map_to_json(fl.phi)
    doc["phi_inv"] = _map_to_json(fl.phi_inv)
    doc["B"] = _form2_terms(fl.B)
    return doc


def flow_from_json(doc, ctx=None):
    ctx = _context_from_header(doc, ctx)
    phi = _map_from_json(_require(doc, "phi", dict), ctx, "phi")
    phi_inv = _map_from_json(_require(doc, "phi_inv", dict), ctx, "phi_inv")
    B = _form2_from_json(_require(doc, "B", list), ctx)
    return GeneralizedFlow(phi, phi_inv, B)


# ---------------------------------------------------------------------------
# parameters


def params_to_json(p):
    return {"max_iterations": p.max_iterations,
            "target_order": p.target_order,
            "delta_schedule": [frac_str(d) for d in p.delta_schedule]}


def params_from_json(doc):
    mi = _require(doc, "max_iterations", int)
    to = _require(doc, "target_order", int)
    kwargs = {}
    if "delta_schedule" in doc:
        sched = _require(doc, "delta_schedule", list)
        kwargs["delta_schedule"] = tuple(parse_frac(s) for s in sched)
    try:
        return NormalizationParams(max_iterations=mi, target_order=to,
                                   **kwargs)
    except ValueError as e:
        raise FormatError(str(e))


# ---------------------------------------------------------------------------
# linear instances


def _frac_matrix_json(rows):
    return [[frac_str(x) for x in row] for row in rows]


def _frac_matrix_parse(rows, what, width=None):
    if not isinstance(rows, list) or not rows:
        raise FormatError(f"{what} must be a nonempty list of rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise FormatError(f"{what} row {i} is not a list")
        if width is not None and len(row) != width:
            raise FormatError(f"{what} row {i} must have {width} entries")
        try:
            out.append([parse_frac(x) for x in row])
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise FormatError(f"{what} row {i}: {e}")
    return out


def linear_to_json(gc, brane):
    m = gc.m
    doc = {"n": m, "gc": _frac_matrix_json(gc.op),
           "S_basis": _frac_matrix_json(brane.S_rows),
           "tau_basis": _frac_matrix_json(brane.tau_rows)}
    return doc


def linear_from_json(doc):
    m = _require(doc, "n", int)
    if m <= 0:
        raise FormatError("n must be positive")
    op = _frac_matrix_parse(_require(doc, "gc", list), "gc", 2 * m)
    if len(op) != 2 * m:
        raise FormatError("gc must be a 2n x 2n matrix")
    gc = LinearGC(op)
    S_rows = _frac_matrix_parse(_require(doc, "S_basis", list), "S_basis", m)
    if "tau_basis" in doc:
        tau = _frac_matrix_parse(doc["tau_basis"], "tau_basis", 2 * m)
        brane = LinearBrane(S_rows, tau)
    elif "F" in doc:
        F = _frac_matrix_parse(doc["F"], "F", m)
        if len(F) != m:
            raise FormatError("F must be an n x n matrix")
        brane = brane_tangent_from_F(S_rows, F, m)
    else:
        raise FormatError("instance needs tau_basis or F")
    return gc, brane


# ---------------------------------------------------------------------------
# reports


CSV_COLUMNS = ("iteration", "ord_eps11_02", "norm20", "norm11", "norm02",
               "mc_residual_norm", "S_preserved", "tau_preserved")


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        # orders degenerate to infinity on identically-zero parts; any
        # finite float would break the no-floats file contract
        if v == float("inf"):
            return "inf"
        raise TypeError("finite floats are not allowed in the CSV")
    if isinstance(v, (int, str)):
        return str(v)
    if isinstance(v, Fraction):
        return frac_str(v)
    raise TypeError(f"cannot place {type(v).__name__} in the CSV")


def normalization_csv(rows):
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_csv_cell(row[c]) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def dump_json(obj):
    """Canonical JSON text: sorted keys, stable layout, newline at end."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_json_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise FormatError(f"cannot read {path}: {e}")
