"""Order-two simple-current extension categories for q = p+1, p = 1,2 (mod 4).

Simple objects are induced orbits {x, sigma x} of twist-stable ambient simples
together with split pairs F^+/F^- over the sigma-fixed points.  Products with
at least one split operand are not fully determined by induction alone: the
distribution of split summands over the two signs is reconstructed by a
backtracking solver constrained by induction totals, duality, quantum-dimension
balance, the explicitly known anchor products, and exact associativity of the
completed ring.  Solutions are reported modulo per-fixed-point sign relabelings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .fusion import FusionRing, fuse as amb_fuse
from .minimal_model import KacLabel, MinimalModel
from .modular_data import modular_data


class UnsupportedParameterError(ValueError):
    pass


class SolverInconsistencyError(RuntimeError):
    pass


class Verdict(Enum):
    MODULAR = "MODULAR"
    NOT_MODULAR = "NOT_MODULAR"
    INCONCLUSIVE = "INCONCLUSIVE"


def _validate_p(p: int) -> None:
    if p < 5 or p % 4 not in (1, 2):
        raise UnsupportedParameterError(
            f"the order-two extension exists only for p = 1 or 2 (mod 4) with p >= 5; got p={p}"
        )


@dataclass(frozen=True)
class ExtObject:
    window: tuple[int, int]
    sign: int  # 0 for induced orbits, +1/-1 for the split halves of a fixed point
    orbit: tuple[KacLabel, ...] = field(compare=False)
    h_mod1: Fraction = field(compare=False)
    qd: float = field(compare=False)

    @property
    def kind(self) -> str:
        return "induced" if self.sign == 0 else "split"

    @property
    def name(self) -> str:
        r, s = self.window
        if self.sign == 0:
            return f"N({r},{s})"
        return f"({r},{s}){'+' if self.sign > 0 else '-'}"

    def __repr__(self) -> str:
        return self.name


def _window_of_orbit(p: int, q: int, orbit, fixed: bool) -> tuple[tuple[int, int], bool]:
    """Display label inside the standard parameter window; falls back to the orbit rep."""
    raws = []
    for lab in orbit:
        raws.append((lab.m, lab.n))
        raws.append((p - lab.m, q - lab.n))
    if fixed:
        if p % 4 == 1:
            hits = [(r, s) for r, s in raws if s == (p + 1) // 2 and 1 <= r <= (p - 1) // 2]
        else:
            hits = [(r, s) for r, s in raws if r == p // 2 and 1 <= s <= p // 2]
    else:
        if p % 4 == 1:
            hits = [(r, s) for r, s in raws if 1 <= r <= (p - 1) // 2 and 1 <= s <= (p - 1) // 2 and s % 2 == 1]
        else:
            hits = [(r, s) for r, s in raws if 1 <= s <= p // 2 and 1 <= r < p // 2 and r % 2 == 1]
    hits = sorted(set(hits))
    if len(hits) == 1:
        return hits[0], True
    rep = orbit[0]
    return (rep.m, rep.n), False


def ext_simples(p: int) -> tuple[ExtObject, ...]:
    """Simple objects of the extension, from the sigma-orbit analysis of the ambient."""
    objs, _ = _simples_with_notes(p)
    return objs


@lru_cache(maxsize=None)
def _simples_with_notes(p: int) -> tuple[tuple[ExtObject, ...], tuple[str, ...]]:
    _validate_p(p)
    q = p + 1
    model = MinimalModel(p, q)
    md = modular_data(p, q)
    notes: list[str] = []

    induced: list[ExtObject] = []
    split: list[ExtObject] = []
    seen: set[tuple[KacLabel, ...]] = set()
    for x in model.list_simples():
        sx = model.simple_current_act(x)
        if sx == x:
            window, ok = _window_of_orbit(p, q, (x,), fixed=True)
            if not ok:
                notes.append(f"fixed point {x} has no unique window label; using orbit representative")
            h = model.h_mod1(x)
            qd = md.qdim(md.index[x]) / 2.0
            for sign in (+1, -1):
                split.append(ExtObject(window, sign, (x,), h, qd))
        else:
            orbit = tuple(sorted((x, sx)))
            if orbit in seen:
                continue
            seen.add(orbit)
            if (model.conformal_weight(x) - model.conformal_weight(sx)).denominator != 1:
                continue  # orbit is not twist-stable: not a module of the extension
            window, ok = _window_of_orbit(p, q, orbit, fixed=False)
            if not ok:
                notes.append(f"orbit {orbit} has no unique window label; using orbit representative")
            h = model.h_mod1(x)
            qd = md.qdim(md.index[x])
            induced.append(ExtObject(window, 0, orbit, h, qd))

    induced.sort(key=lambda o: o.window)
    split.sort(key=lambda o: (o.window, -o.sign))
    objs = tuple(induced + split)
    if objs[0].window != (1, 1):
        raise SolverInconsistencyError("unit orbit is not first in the object ordering")
    return objs, tuple(notes)


# -- base fusion data ---------------------------------------------------------------


class _Base:
    """Ambient-derived fusion data shared by the base table and the solver."""

    def __init__(self, p: int):
        _validate_p(p)
        self.p = p
        self.q = p + 1
        self.model = MinimalModel(p, self.q)
        self.objects, self.notes = _simples_with_notes(p)
        self.R = len(self.objects)
        self.index = {o: i for i, o in enumerate(self.objects)}
        self.by_name = {o.name: i for i, o in enumerate(self.objects)}
        # ambient class -> ext object index ("family": split classes map to the + half)
        self.owner: dict[KacLabel, int] = {}
        for i, o in enumerate(self.objects):
            if o.sign == -1:
                continue
            for lab in o.orbit:
                self.owner[lab] = i
        self.flip = tuple(
            self.index[ExtObject(o.window, -o.sign, o.orbit, o.h_mod1, o.qd)] if o.sign else i
            for i, o in enumerate(self.objects)
        )
        self.unit = 0
        self.split_classes = tuple(i for i, o in enumerate(self.objects) if o.sign == +1)
        self.induced = tuple(i for i, o in enumerate(self.objects) if o.sign == 0)
        if p % 4 == 1:
            self.k = (p - 1) // 4
            anchor_window = (1, (p + 1) // 2)
        else:
            self.k = (p - 2) // 4
            anchor_window = (p // 2, 1)
        self.anchor_plus = self.by_name[
            f"({anchor_window[0]},{anchor_window[1]})+"
        ]

    def rep(self, i: int) -> KacLabel:
        return self.objects[i].orbit[0]

    def amb_targets(self, i: int, j: int) -> dict[KacLabel, int]:
        prods = amb_fuse(self.model, self.rep(i), self.rep(j))
        return {c: 1 for c in prods}

    def fold_induced(self, classes: dict[KacLabel, int]) -> tuple[dict[int, int], dict[int, int]]:
        """Split ambient class multiplicities into induced-object and fixed-class parts."""
        ind: dict[int, int] = {}
        fix: dict[int, int] = {}
        for lab, mult in classes.items():
            o = self.owner.get(lab)
            if o is None:
                raise SolverInconsistencyError(f"product hit non-local class {lab}")
            if self.objects[o].sign == 0:
                ind[o] = ind.get(o, 0) + mult
            else:
                fix[o] = fix.get(o, 0) + mult
        return ind, fix


def _known_products(b: _Base) -> dict[tuple[int, int], dict[int, int]]:
    """Products fully fixed by induction: induced x induced, plus unit products."""
    table: dict[tuple[int, int], dict[int, int]] = {}
    for ii, i in enumerate(b.induced):
        for j in b.induced[ii:]:
            ind, fix = b.fold_induced(b.amb_targets(i, j))
            out = dict(ind)
            for fplus, mult in fix.items():
                out[fplus] = out.get(fplus, 0) + mult
                out[b.flip[fplus]] = out.get(b.flip[fplus], 0) + mult
            table[(min(i, j), max(i, j))] = out
    for s in b.split_classes:
        for half in (s, b.flip[s]):
            key = (min(b.unit, half), max(b.unit, half))
            table[key] = {half: 1}
    return table


@dataclass
class ExtProduct:
    """Decomposition of one product, with unresolved split multiplicities marked."""

    known: dict[str, int]
    ambiguous_totals: dict[str, int]

    @property
    def ambiguous(self) -> bool:
        return bool(self.ambiguous_totals)


def ext_fusion_base(p: int, a: ExtObject | str, b: ExtObject | str) -> ExtProduct:
    """Induction-forced part of a product; split-sign distributions may stay open."""
    base = _Base(p)
    ia = base.by_name[a] if isinstance(a, str) else base.index[a]
    ib = base.by_name[b] if isinstance(b, str) else base.index[b]
    oa, ob = base.objects[ia], base.objects[ib]
    if oa.sign == 0 and ob.sign == 0:
        out = _known_products(base)[(min(ia, ib), max(ia, ib))]
        return ExtProduct({base.objects[k].name: v for k, v in out.items()}, {})
    if oa.sign != 0 and ob.sign != 0:
        # Only the totals over the four sign products are forced here.
        ind, fix = base.fold_induced(base.amb_targets(ia, ib))
        amb = {base.objects[k].name: 2 * v for k, v in ind.items()}
        for k, v in fix.items():
            w = base.objects[k].window
            amb[f"({w[0]},{w[1]})+/-"] = v
        return ExtProduct({}, amb)
    if oa.sign == 0:  # normalize to split x induced
        ia, ib = ib, ia
        oa, ob = ob, oa
    known: dict[str, int] = {}
    for z in base.induced:
        if base.rep(ia) in amb_fuse(base.model, base.rep(z), base.rep(ib)):
            known[base.objects[z].name] = 1
    _, fix = base.fold_induced(base.amb_targets(ia, ib))
    amb = {}
    for k, v in fix.items():
        w = base.objects[k].window
        amb[f"({w[0]},{w[1]})+/-"] = v
    return ExtProduct(known, amb)


# -- split-sign solver ----------------------------------------------------------------


def _anchor_tables(b: _Base) -> dict[tuple[int, int], dict[int, int]]:
    """Fully known anchor products (p = 1 mod 4): the three sign products of (1,mid)."""
    if b.p % 4 != 1:
        return {}
    mid = (b.p + 1) // 2
    ap = b.anchor_plus
    am = b.flip[ap]

    def nrow(s_values):
        out = {}
        for s in s_values:
            out[b.by_name[f"N(1,{s})"]] = 1
        return out

    if b.k % 2 == 1:
        pp = nrow(range(3, mid - 3, 4))
        pp[am] = 1
        pm = nrow(range(1, mid - 1, 4))
    else:
        pp = nrow(range(1, mid - 3, 4))
        pp[ap] = 1
        pm = nrow(range(3, mid - 1, 4))
    mm = {b.flip[t] if b.objects[t].sign else t: v for t, v in pp.items()}
    return {
        (min(ap, ap), max(ap, ap)): pp,
        (min(ap, am), max(ap, am)): pm,
        (min(am, am), max(am, am)): mm,
    }


class _AUnit:
    """Decision unit for (split F, induced Y): distribute split targets over signs."""

    __slots__ = ("key", "products", "candidates")

    def __init__(self, b: _Base, fplus: int, y: int):
        fminus = b.flip[fplus]
        self.key = (min(fplus, y), max(fplus, y))
        known: dict[int, int] = {}
        for z in b.induced:
            if b.rep(fplus) in amb_fuse(b.model, b.rep(z), b.rep(y)):
                known[z] = 1
        _, fix = b.fold_induced(b.amb_targets(fplus, y))
        targets = sorted(fix)
        self.products = (
            (min(fplus, y), max(fplus, y)),
            (min(fminus, y), max(fminus, y)),
        )
        cands = []
        for alphas in itertools.product(*(range(fix[h] + 1) for h in targets)):
            d_plus = dict(known)
            d_minus = dict(known)
            for h, a in zip(targets, alphas):
                t = fix[h]
                hm = b.flip[h]
                if a:
                    d_plus[h] = a
                    d_minus[hm] = a
                if t - a:
                    d_plus[hm] = t - a
                    d_minus[h] = t - a
            cands.append((d_plus, d_minus))
        self.candidates = cands


class _BUnit:
    """Decision unit for (split F, split G): distribute both sign products."""

    __slots__ = ("key", "products", "candidates")

    def __init__(self, b: _Base, fplus: int, gplus: int, anchors):
        fminus, gminus = b.flip[fplus], b.flip[gplus]
        same = fplus == gplus
        ind_tot, fix_tot = b.fold_induced(b.amb_targets(fplus, gplus))
        zs = sorted(ind_tot)
        hs = sorted(fix_tot)
        dpp = b.objects[fplus].qd * b.objects[gplus].qd

        key_pp = (min(fplus, gplus), max(fplus, gplus))
        key_pm = (min(fplus, gminus), max(fplus, gminus))
        key_mm = (min(fminus, gminus), max(fminus, gminus))
        key_mp = (min(fminus, gplus), max(fminus, gplus))
        self.key = key_pp
        self.products = (key_pp, key_pm, key_mm) if same else (key_pp, key_pm, key_mm, key_mp)

        beta_choices = []
        for z in zs:
            t = ind_tot[z]
            if same and z == b.unit:
                # duality convention: dual(F^+) = F^- for odd k, F^+ for even k
                beta_choices.append((0,) if b.k % 2 == 1 else (t,))
            else:
                beta_choices.append(tuple(range(t + 1)))

        split_choices = []
        for h in hs:
            n = fix_tot[h]
            opts = []
            for u in range(n + 1):
                for u2 in range(n + 1 - u):
                    rest = n - u - u2
                    if same:
                        if rest % 2 == 0:
                            opts.append((u, u2, rest // 2, rest // 2))
                    else:
                        for w in range(rest + 1):
                            opts.append((u, u2, w, rest - w))
            split_choices.append(tuple(opts))

        anchor_pp = anchors.get(key_pp)
        anchor_pm = anchors.get(key_pm)

        cands = []
        for betas in itertools.product(*beta_choices):
            for sw in itertools.product(*split_choices):
                pp: dict[int, int] = {}
                pm: dict[int, int] = {}
                mm: dict[int, int] = {}
                mp: dict[int, int] = {}
                s_pp = s_pm = 0.0
                for z, beta in zip(zs, betas):
                    t = ind_tot[z]
                    if beta:
                        pp[z] = beta
                        mm[z] = beta
                    if t - beta:
                        pm[z] = t - beta
                        mp[z] = t - beta
                    dz = b.objects[z].qd
                    s_pp += beta * dz
                    s_pm += (t - beta) * dz
                for h, (u, u2, w, w2) in zip(hs, sw):
                    hm = b.flip[h]
                    if u:
                        pp[h] = u
                        mm[hm] = u
                    if u2:
                        pp[hm] = u2
                        mm[h] = u2
                    if w:
                        pm[h] = w
                        mp[hm] = w
                    if w2:
                        pm[hm] = w2
                        mp[h] = w2
                    dh = b.objects[h].qd
                    s_pp += (u + u2) * dh
                    s_pm += (w + w2) * dh
                tol = 1e-7 * max(1.0, dpp)
                if abs(s_pp - dpp) > tol or abs(s_pm - dpp) > tol:
                    continue
                if anchor_pp is not None and pp != anchor_pp:
                    continue
                if anchor_pm is not None and pm != anchor_pm:
                    continue
                cand = {key_pp: pp, key_pm: pm, key_mm: mm}
                if not same:
                    cand[key_mp] = mp
                cands.append(cand)
        self.candidates = cands


def _check_triple(table, a, b_, c):
    """Associativity of (a,b,c) if all needed products are present; None if not yet checkable."""
    p_ab = table.get((min(a, b_), max(a, b_)))
    if p_ab is None:
        return None
    p_bc = table.get((min(b_, c), max(b_, c)))
    if p_bc is None:
        return None
    lhs: dict[int, int] = {}
    for t, m in p_ab.items():
        p_tc = table.get((min(t, c), max(t, c)))
        if p_tc is None:
            return None
        for x, v in p_tc.items():
            lhs[x] = lhs.get(x, 0) + m * v
    rhs: dict[int, int] = {}
    for u, m in p_bc.items():
        p_au = table.get((min(a, u), max(a, u)))
        if p_au is None:
            return None
        for x, v in p_au.items():
            rhs[x] = rhs.get(x, 0) + m * v
    lhs = {k: v for k, v in lhs.items() if v}
    rhs = {k: v for k, v in rhs.items() if v}
    return lhs == rhs


def _solve(b: _Base, find_all: bool = True, cap: int = 100_000):
    """Backtracking over decision units; exact associativity prunes the search."""
    anchors = _anchor_tables(b)
    pins: list[tuple[tuple[int, int], int]] = []
    if b.p % 4 == 2:
        # membership of the second vertical orbit in the anchor square is known
        lab51 = b.model.canonical(5, 1)
        owner = b.owner.get(lab51)
        if owner is not None and b.objects[owner].sign == 0 and owner != b.unit:
            ap = b.anchor_plus
            key_pp = (ap, ap)
            key_pm = (min(ap, b.flip[ap]), max(ap, b.flip[ap]))
            pins.append((key_pm if b.k % 2 == 1 else key_pp, owner))

    units: list[_AUnit | _BUnit] = []
    for fplus in b.split_classes:
        for y in b.induced:
            if y == b.unit:
                continue
            units.append(_AUnit(b, fplus, y))
    for i, fplus in enumerate(b.split_classes):
        for gplus in b.split_classes[i:]:
            units.append(_BUnit(b, fplus, gplus, anchors))
    units.sort(key=lambda u: u.key)

    for key, owner in pins:
        for u in units:
            if isinstance(u, _BUnit) and key in u.products:
                u.candidates = [c for c in u.candidates if c[key].get(owner, 0) >= 1]

    table = _known_products(b)
    triples = [
        (x, y, z)
        for x in range(b.R)
        for y in range(x, b.R)
        for z in range(y, b.R)
    ]
    verified: set[tuple[int, int, int]] = set()
    solutions: list[dict] = []

    def scan_new() -> list[tuple[int, int, int]] | None:
        good = []
        for tr in triples:
            if tr in verified:
                continue
            res = _check_triple(table, *tr)
            if res is False:
                for t in good:
                    verified.discard(t)
                return None
            if res is True:
                verified.add(tr)
                good.append(tr)
        return good

    def dfs(ui: int) -> bool:
        if ui == len(units):
            solutions.append({k: dict(v) for k, v in table.items()})
            return len(solutions) >= cap or not find_all
        unit = units[ui]
        for cand in unit.candidates:
            if isinstance(unit, _AUnit):
                placed = dict(zip(unit.products, cand))
            else:
                placed = cand
            for k, v in placed.items():
                table[k] = v
            good = scan_new()
            if good is not None:
                if dfs(ui + 1):
                    return True
                for t in good:
                    verified.discard(t)
            for k in placed:
                del table[k]
        return False

    dfs(0)
    if not solutions:
        raise SolverInconsistencyError(f"no consistent split resolution found for p={b.p}")
    log = []
    first = solutions[0]
    decided = set()
    for u in units:
        for k in u.products:
            if k in decided:
                continue
            decided.add(k)
            i, j = k
            log.append(
                {
                    "product": [b.objects[i].name, b.objects[j].name],
                    "decomposition": {b.objects[t].name: v for t, v in sorted(first[k].items())},
                }
            )
    return solutions, log


def _gauge_classes(b: _Base, solutions: list[dict]) -> int:
    """Count solutions modulo per-fixed-point sign relabelings."""

    def transport(sol: dict, gauge: dict[int, bool]):
        def g(i: int) -> int:
            o = b.objects[i]
            if o.sign == 0:
                return i
            plus = i if o.sign > 0 else b.flip[i]
            return b.flip[i] if gauge[plus] else i

        out = {}
        for (i, j), targets in sol.items():
            gi, gj = g(i), g(j)
            out[(min(gi, gj), max(gi, gj))] = {g(t): v for t, v in targets.items()}
        return tuple(sorted((k, tuple(sorted(v.items()))) for k, v in out.items()))

    def canonical(sol: dict):
        best = None
        for bits in itertools.product([False, True], repeat=len(b.split_classes)):
            gauge = dict(zip(b.split_classes, bits))
            t = transport(sol, gauge)
            if best is None or t < best:
                best = t
        return best

    return len({canonical(s) for s in solutions})


@dataclass
class ExtFusionRing:
    """Resolved extension fusion ring plus the solver's provenance."""

    p: int
    objects: tuple[ExtObject, ...]
    ring: FusionRing
    resolved: bool
    solutions_found: int
    gauge_classes: int
    ambiguity_log: tuple[dict, ...]
    notes: tuple[str, ...]

    @property
    def h_mod1(self) -> tuple[Fraction, ...]:
        return tuple(o.h_mod1 for o in self.objects)

    @property
    def qdims(self) -> tuple[float, ...]:
        return tuple(o.qd for o in self.objects)

    @property
    def unit(self) -> int:
        return self.ring.unit

    def index(self, name: str) -> int:
        for i, o in enumerate(self.objects):
            if o.name == name:
                return i
        raise KeyError(name)

    def fuse_names(self, a: str, c: str) -> dict[str, int]:
        out = self.ring.fuse(self.index(a), self.index(c))
        return {self.objects[i].name: v for i, v in out}

    def fpdim(self) -> float:
        return float(sum(d * d for d in self.qdims))

    def to_json(self) -> dict:
        data = self.ring.to_json()
        data["p"] = self.p
        data["resolved"] = self.resolved
        data["gauge_classes"] = self.gauge_classes
        data["ambiguity_log"] = list(self.ambiguity_log)
        data["h_mod1"] = [f"{h.numerator}/{h.denominator}" for h in self.h_mod1]
        data["qdims"] = [float(f"{d:.12g}") for d in self.qdims]
        return data


@lru_cache(maxsize=None)
def resolve_split_ambiguities(p: int) -> ExtFusionRing:
    """Reconstruct the full extension fusion ring; deterministic first solution."""
    b = _Base(p)
    solutions, log = _solve(b)
    first = solutions[0]
    coeffs = {(i, j): dict(t) for (i, j), t in first.items()}
    flat = {(i, j, c): v for (i, j), t in coeffs.items() for c, v in t.items()}
    ring = FusionRing(b.objects, b.unit, flat)
    ring.check_axioms()
    classes = _gauge_classes(b, solutions)
    resolved = classes == 1
    notes = list(b.notes)
    if not resolved:
        notes.append(f"{classes} solution classes survive sign relabeling; ring marked unresolved")
    return ExtFusionRing(
        p,
        b.objects,
        ring,
        resolved,
        len(solutions),
        classes,
        tuple(log),
        tuple(notes),
    )
