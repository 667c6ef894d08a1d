"""Graded maps, automorphism constraints, isomorphism search, invariants.

A graded map between Carnot algebras is determined by its matrix on the
first component; :func:`propagate` extends that matrix through the bracket
presentation and verifies well-definedness and multiplicativity exactly.
:func:`iso_search` decides graded isomorphism with certificates: an
invariant-fingerprint mismatch or an infeasible polynomial system proves
non-isomorphism, a verified witness proves isomorphism, and anything the
bounded solver cannot settle is reported as Unknown rather than guessed.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .algebra import GradedLieAlgebra, StructureError
from .cohomology import Cochain2, h2_slice, pair_basis
from .extensions import is_extendable
from .linalg import Matrix, rref, solve
from .poly import Poly, univariate_roots
from .scalars import (
    FIELD_Q,
    FIELD_QI,
    FieldError,
    GaussianRational,
    as_scalar,
    is_square,
    is_zero,
)


class GradedMap:
    """Degree-preserving linear map given by one matrix block per grading.

    Blocks use the column convention: the image of the a-th source basis
    vector of component i is the a-th column of ``blocks[i-1]``.
    """

    __slots__ = ("source", "target", "blocks", "verified")

    def __init__(self, source, target, blocks, verified=False):
        blocks = tuple(blocks)
        if len(blocks) != source.length:
            raise StructureError("one block per grading required")
        for i, b in enumerate(blocks, start=1):
            if b.rows != target.component_dim(i) or b.cols != source.component_dim(i):
                raise StructureError(f"block {i} has the wrong shape")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "verified", verified)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("GradedMap is immutable")

    def apply(self, x):
        if x.algebra is not self.source:
            raise FieldError("element not in the source algebra")
        out = {}
        for (i, a), c in x.coeffs.items():
            col = self.blocks[i - 1]
            for b in range(col.rows):
                v = col.entries[b][a]
                if is_zero(v):
                    continue
                key = (i, b)
                out[key] = out.get(key, as_scalar(0, self.target.field)) + c * v
        from .algebra import Element

        return Element(self.target, out)

    def apply_basis(self, key):
        from .algebra import Element

        i, a = key
        col = self.blocks[i - 1]
        return Element(
            self.target,
            {(i, b): col.entries[b][a] for b in range(col.rows)},
        )

    def is_multiplicative(self) -> bool:
        g, h = self.source, self.target
        keys = list(g.basis_keys())
        for p, k1 in enumerate(keys):
            for k2 in keys[p + 1:]:
                if k1[0] + k2[0] > g.length:
                    continue
                lhs_vec = g.basis_bracket(k1, k2)
                from .algebra import Element

                lhs = (
                    g.zero_element()
                    if lhs_vec is None
                    else Element(
                        g,
                        {
                            (k1[0] + k2[0], b): v
                            for b, v in enumerate(lhs_vec)
                            if not is_zero(v)
                        },
                    )
                )
                if self.apply(lhs) != h.bracket(
                    self.apply_basis(k1), self.apply_basis(k2)
                ):
                    return False
        return True

    def is_invertible(self) -> bool:
        return all(rref(b).rank == b.rows == b.cols for b in self.blocks)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self after other (other's target must be self's source)."""
        if other.target is not self.source:
            raise StructureError("composition needs matching algebras")
        return GradedMap(
            other.source,
            self.target,
            [sb * ob for sb, ob in zip(self.blocks, other.blocks)],
            verified=self.verified and other.verified,
        )

    def inverse(self) -> "GradedMap":
        blocks = []
        for b in self.blocks:
            inv = _invert(b)
            if inv is None:
                raise StructureError("map is not invertible")
            blocks.append(inv)
        return GradedMap(self.target, self.source, blocks, verified=self.verified)

    def __repr__(self):
        return f"GradedMap({self.source.name} -> {self.target.name})"


def _invert(m: Matrix):
    if m.rows != m.cols:
        return None
    n = m.rows
    aug = Matrix(
        n, 2 * n,
        [list(m.entries[i]) + [Fraction(1 if i == j else 0) for j in range(n)]
         for i in range(n)],
    )
    r = rref(aug)
    if r.rank < n or r.pivots[:n] != tuple(range(n)):
        return None
    return Matrix(n, n, [row[n:] for row in r.matrix.entries[:n]])


class PropagationFailure:
    """First relation that could not be propagated consistently."""

    __slots__ = ("grading", "reason")

    def __init__(self, grading, reason):
        object.__setattr__(self, "grading", grading)
        object.__setattr__(self, "reason", reason)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PropagationFailure is immutable")

    def __repr__(self):
        return f"PropagationFailure(grading={self.grading}: {self.reason})"


def _presentation(g: GradedLieAlgebra):
    """Per grading i >= 2: the bracket matrix B_i of g_1 x g_{i-1} -> g_i
    (columns indexed a * dim_{i-1} + b) and a preimage matrix X_i whose
    column t solves B_i x = e_t (free coordinates zero, deterministic)."""
    ok, length = g.is_carnot()
    if not ok:
        raise StructureError("presentations exist for Carnot algebras only")
    q = g.component_dim(1)
    bmats, xmats = {}, {}
    for i in range(2, length + 1):
        d_prev, d_i = g.component_dim(i - 1), g.component_dim(i)
        cols = []
        for a in range(q):
            for b in range(d_prev):
                vec = g.basis_bracket((1, a), (i - 1, b))
                cols.append(
                    [Fraction(0)] * d_i if vec is None else list(vec)
                )
        bmat = Matrix.from_rows(cols).transpose()
        xcols = []
        for t in range(d_i):
            unit = [as_scalar(1 if s == t else 0, g.field) for s in range(d_i)]
            sol = solve(bmat, unit)
            if sol is None:
                raise StructureError("Carnot surjectivity violated")
            xcols.append(list(sol))
        xmat = Matrix.from_rows(xcols).transpose()
        bmats[i], xmats[i] = bmat, xmat
    return q, length, bmats, xmats


def propagate(g: GradedLieAlgebra, a_matrix: Matrix, target=None):
    """Extend a first-component matrix to a full graded map, or report the
    first inconsistency.  With ``target`` the map goes g -> target (equal
    component dimensions required); without it, g -> g."""
    h = target if target is not None else g
    if h.component_dims() != g.component_dims():
        raise StructureError("component dimension vectors differ")
    q, length, bmats, xmats = _presentation(g)
    if a_matrix.rows != q or a_matrix.cols != q:
        raise StructureError(f"first block must be {q}x{q}")
    blocks = [a_matrix]
    for i in range(2, length + 1):
        bh = _bracket_image_matrix(h, blocks[0], blocks[i - 2], i)
        f_i = bh * xmats[i]
        if f_i * bmats[i] != bh:
            return PropagationFailure(
                i, "bracket relations of the source have no consistent image"
            )
        blocks.append(f_i)
    gmap = GradedMap(g, h, blocks, verified=False)
    # multiplicativity on pairs not of the form (1, i-1)
    for (i, j), pairs in _higher_pairs(g).items():
        for (k1, k2) in pairs:
            lhs_vec = g.basis_bracket(k1, k2)
            lhs = (
                g.zero_element()
                if lhs_vec is None
                else g.element_from_flat(_embed(g, k1[0] + k2[0], lhs_vec))
            )
            if gmap.apply(lhs) != h.bracket(
                gmap.apply_basis(k1), gmap.apply_basis(k2)
            ):
                return PropagationFailure(
                    i + j, f"multiplicativity fails on {k1} x {k2}"
                )
    return GradedMap(g, h, blocks, verified=True)


def _embed(g, comp, vec):
    flat = [as_scalar(0, g.field)] * g.dim
    for b, v in enumerate(vec):
        flat[g.flat_index((comp, b))] = v
    return flat


def _higher_pairs(g):
    """Basis pairs with both gradings >= 2 and total within the length."""
    out = {}
    keys = list(g.basis_keys())
    for p, k1 in enumerate(keys):
        if k1[0] < 2:
            continue
        for k2 in keys[p + 1:]:
            if k2[0] < 2 or k1[0] + k2[0] > g.length:
                continue
            out.setdefault((k1[0], k2[0]), []).append((k1, k2))
    return out


def _bracket_image_matrix(h, f1: Matrix, f_prev: Matrix, i: int):
    """Matrix of (x, y) in g_1 x g_{i-1} |-> [f1 x, f_prev y]_h, columns
    indexed like the presentation pair order."""
    q = f1.cols
    d_prev = f_prev.cols
    d_i = h.component_dim(i)
    cols = []
    for a in range(q):
        for b in range(d_prev):
            acc = [as_scalar(0, h.field)] * d_i
            for alpha in range(f1.rows):
                ca = f1.entries[alpha][a]
                if is_zero(ca):
                    continue
                for beta in range(f_prev.rows):
                    cb = f_prev.entries[beta][b]
                    if is_zero(cb):
                        continue
                    vec = h.basis_bracket((1, alpha), (i - 1, beta))
                    if vec is None:
                        continue
                    factor = ca * cb
                    for t, v in enumerate(vec):
                        if not is_zero(v):
                            acc[t] = acc[t] + factor * v
            cols.append(acc)
    return Matrix.from_rows(cols).transpose()


def homothety(g: GradedLieAlgebra, alpha) -> GradedMap:
    """The automorphism scaling component k by alpha^k."""
    alpha = as_scalar(alpha, g.field)
    blocks = []
    power = as_scalar(1, g.field)
    for i in range(1, g.length + 1):
        power = power * alpha
        d = g.component_dim(i)
        blocks.append(
            Matrix(d, d, [[power if r == c else as_scalar(0, g.field)
                           for c in range(d)] for r in range(d)])
        )
    return GradedMap(g, g, blocks, verified=True)


# --- symbolic propagation ---------------------------------------------------

class PolySystem:
    """Polynomial constraints on the first-block entries of a graded map.

    Variables are the q x q matrix entries in row-major order; invertible
    solutions are exactly the valid first blocks.
    """

    __slots__ = ("q", "field", "equations")

    def __init__(self, q, field, equations):
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "equations", tuple(equations))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PolySystem is immutable")

    def __repr__(self):
        return f"PolySystem(q={self.q}, {len(self.equations)} equations)"


def _poly_matmul(a, b, nvars, field):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    zero = Poly.const(nvars, field, 0)
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = zero
            for k in range(inner):
                x = a[i][k]
                if isinstance(x, Poly) and x.is_zero():
                    continue
                if not isinstance(x, Poly) and is_zero(x):
                    continue
                acc = acc + x * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def symbolic_constraints(g: GradedLieAlgebra, h: GradedLieAlgebra):
    """Equations on A forcing the propagated blocks to define a graded map
    g -> h; with h = g these cut out the graded automorphism group."""
    if h.component_dims() != g.component_dims():
        raise StructureError("component dimension vectors differ")
    q, length, bmats, xmats = _presentation(g)
    nvars = q * q
    field = g.field

    def var(r, c):
        return Poly.var(nvars, field, r * q + c)

    f1 = [[var(r, c) for c in range(q)] for r in range(q)]
    blocks = [f1]
    equations = []
    for i in range(2, length + 1):
        bh = _poly_bracket_image(h, f1, blocks[i - 2], i, nvars, field)
        x_num = [[x for x in row] for row in xmats[i].entries]
        f_i = _poly_matmul(bh, x_num, nvars, field)
        b_num = [[x for x in row] for row in bmats[i].entries]
        recon = _poly_matmul(f_i, b_num, nvars, field)
        for r in range(len(bh)):
            for c in range(len(bh[0])):
                eq = recon[r][c] - bh[r][c]
                if not eq.is_zero():
                    equations.append(eq)
        blocks.append(f_i)
    for (i, j), pairs in _higher_pairs(g).items():
        for (k1, k2) in pairs:
            lhs_vec = g.basis_bracket(k1, k2)
            d_target = g.component_dim(i + j)
            lhs = [Poly.const(nvars, field, 0)] * d_target
            if lhs_vec is not None:
                fij = blocks[i + j - 1]
                for b, v in enumerate(lhs_vec):
                    if is_zero(v):
                        continue
                    for t in range(d_target):
                        lhs[t] = lhs[t] + v * fij[t][b]
            rhs = _poly_pair_bracket(h, blocks[i - 1], blocks[j - 1],
                                     k1, k2, nvars, field)
            for t in range(d_target):
                eq = lhs[t] - rhs[t]
                if not eq.is_zero():
                    equations.append(eq)
    # dedupe up to scalar multiples, deterministically
    seen = {}
    for eq in equations:
        seen.setdefault(eq.normalized(), eq)
    return PolySystem(q, field, sorted(
        (p for p in seen), key=lambda p: (p.total_degree(), len(p), repr(p))
    ))


def _poly_bracket_image(h, f1, f_prev, i, nvars, field):
    q = len(f1[0])
    d_prev = len(f_prev[0])
    d_i = h.component_dim(i)
    zero = Poly.const(nvars, field, 0)
    cols = []
    for a in range(q):
        for b in range(d_prev):
            acc = [zero] * d_i
            for alpha in range(len(f1)):
                pa = f1[alpha][a]
                if isinstance(pa, Poly) and pa.is_zero():
                    continue
                for beta in range(len(f_prev)):
                    pb = f_prev[beta][b]
                    if isinstance(pb, Poly) and pb.is_zero():
                        continue
                    vec = h.basis_bracket((1, alpha), (i - 1, beta))
                    if vec is None:
                        continue
                    prod = pa * pb
                    for t, v in enumerate(vec):
                        if not is_zero(v):
                            acc[t] = acc[t] + v * prod
            cols.append(acc)
    # transpose to rows = target coords
    return [[cols[c][t] for c in range(len(cols))] for t in range(d_i)]


def _poly_pair_bracket(h, fi, fj, k1, k2, nvars, field):
    (i, a), (j, b) = k1, k2
    d_target = h.component_dim(i + j)
    zero = Poly.const(nvars, field, 0)
    acc = [zero] * d_target
    for alpha in range(len(fi)):
        pa = fi[alpha][a]
        if isinstance(pa, Poly) and pa.is_zero():
            continue
        for beta in range(len(fj)):
            pb = fj[beta][b]
            if isinstance(pb, Poly) and pb.is_zero():
                continue
            vec = h.basis_bracket((i, alpha), (j, beta))
            if vec is None:
                continue
            prod = pa * pb
            for t, v in enumerate(vec):
                if not is_zero(v):
                    acc[t] = acc[t] + v * prod
    return acc


def constraint_system(g: GradedLieAlgebra) -> PolySystem:
    """Polynomial equations whose invertible solutions are the graded
    automorphisms of g, written on the first-component matrix entries."""
    return symbolic_constraints(g, g)


# --- polynomial system solving by case-split elimination --------------------

class _Guard(Exception):
    """Solver resource bound exceeded; the caller reports Unknown."""


class BranchOutcome:
    """Terminal state of one elimination branch."""

    __slots__ = ("kind", "path", "detail")

    def __init__(self, kind, path, detail):
        # kind: "infeasible" | "solutions" | "undecided"
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "path", tuple(path))
        object.__setattr__(self, "detail", detail)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("BranchOutcome is immutable")

    def __repr__(self):
        return f"BranchOutcome({self.kind}: {self.detail}; path={list(self.path)})"


_MAX_BRANCHES = 4000
_MAX_TERMS = 6000
_MAX_DEPTH = 48

_TRIAL_VALUES_Q = [Fraction(n, d) for n, d in
                   [(1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (1, 2), (-1, 2),
                    (-3, 1), (3, 2), (-3, 2), (1, 3), (-1, 3), (4, 1), (5, 1),
                    (2, 3), (-2, 3), (5, 2), (0, 1)]]


def _trial_values(field):
    if field == FIELD_Q:
        return list(_TRIAL_VALUES_Q)
    base = [GaussianRational(v, 0) for v in _TRIAL_VALUES_Q[:10]]
    imag = [GaussianRational(0, v) for v in _TRIAL_VALUES_Q[:6]]
    mixed = [GaussianRational(1, 1), GaussianRational(1, -1),
             GaussianRational(-1, 1), GaussianRational(0, 0)]
    return base + imag + mixed


class _Solver:
    """Decides solvability of a polynomial system over the field, looking
    for solutions that make a given polynomial (the determinant) nonzero."""

    def __init__(self, nvars, field, det_poly, verify):
        self.nvars = nvars
        self.field = field
        self.det_poly = det_poly
        self.verify = verify  # point -> witness | None, point is the full A
        self.branches = 0
        self.outcomes = []
        self.witness = None
        self.undecided = False

    def run(self, equations, fixed):
        try:
            self._explore(list(equations), dict(fixed), [], [], 0)
        except _Guard:
            self.undecided = True

    # internal ----------------------------------------------------------
    def _explore(self, equations, assignments, conditions, path, depth):
        if self.witness is not None:
            return
        self.branches += 1
        if self.branches > _MAX_BRANCHES or depth > _MAX_DEPTH:
            raise _Guard
        eqs = []
        seen = set()
        for e in equations:
            for var, val in assignments.items():
                if isinstance(val, tuple):
                    continue
                if e.degree_in(var):
                    e = e.substitute_scalar(var, val)
            if e.is_zero():
                continue
            if e.is_constant():
                self.outcomes.append(
                    BranchOutcome("infeasible", path, "nonzero constant remains")
                )
                return
            if len(e) > _MAX_TERMS:
                raise _Guard
            n = e.normalized()
            if n not in seen:
                seen.add(n)
                eqs.append(e)
        if not eqs:
            self._assemble(assignments, conditions, path)
            return
        eqs.sort(key=lambda e: (e.total_degree(), len(e), repr(e)))
        # 1) a univariate equation: branch over its exact roots
        for e in eqs:
            only = e.vars_present()
            if len(only) == 1:
                var = next(iter(only))
                coeffs = e.univariate_coeffs(var)
                roots = univariate_roots(coeffs, self.field)
                if roots is None:
                    raise _Guard
                if not roots:
                    self.outcomes.append(
                        BranchOutcome("infeasible", path,
                                      _no_root_reason(coeffs, self.field, var))
                    )
                    return
                rest = [x for x in eqs if x is not e]
                for r in roots:
                    sub = dict(assignments)
                    sub[var] = r
                    self._explore(rest, sub, list(conditions),
                                  path + [f"v{var}={r}"], depth + 1)
                return
        # 2) an equation linear in some variable with constant coefficient
        for e in eqs:
            for var in sorted(e.vars_present()):
                if e.degree_in(var) != 1:
                    continue
                c1, c0 = None, None
                cs = e.coeffs_in(var)
                if len(cs) == 2 and cs[1].is_constant():
                    rest_expr = cs[0]
                    lead = cs[1].const_value()
                    repl = rest_expr * (as_scalar(-1, self.field) / lead)
                    new_eqs = [_subst_poly(x, var, repl) for x in eqs if x is not e]
                    sub = dict(assignments)
                    sub[var] = ("poly", repl)
                    self._explore(new_eqs, sub, list(conditions),
                                  path + [f"v{var}:=linear"], depth + 1)
                    return
        # 3) linear in some variable with a polynomial coefficient: case split
        for e in eqs:
            for var in sorted(e.vars_present()):
                if e.degree_in(var) != 1:
                    continue
                cs = e.coeffs_in(var)
                lead, rest_expr = cs[1], cs[0]
                # branch A: lead == 0 (then rest must vanish too)
                self._explore(
                    [x for x in eqs if x is not e] + [lead, rest_expr],
                    dict(assignments), list(conditions),
                    path + [f"v{var}-coeff=0"], depth + 1,
                )
                if self.witness is not None:
                    return
                # branch B: lead != 0, eliminate var by clearing denominators
                new_eqs = []
                for x in eqs:
                    if x is e:
                        continue
                    new_eqs.append(_eliminate_linear(x, var, lead, rest_expr))
                sub = dict(assignments)
                sub[var] = ("ratio", lead, -rest_expr)
                self._explore(new_eqs, sub, conditions + [lead],
                              path + [f"v{var}:=ratio"], depth + 1)
                return
        # 4) nothing linear: not handled by the bounded elimination
        raise _Guard

    def _assemble(self, assignments, conditions, path):
        """System solved; search the free parameters for an invertible point."""
        free = [v for v in range(self.nvars) if v not in assignments]
        values = _trial_values(self.field)
        found_solution_point = False
        for combo in itertools.product(values, repeat=len(free)):
            point = dict(zip(free, combo))
            ok = True
            # resolve recorded assignments; iterate until stable
            pending = {v: a for v, a in assignments.items()}
            resolved = {}
            for v, a in list(pending.items()):
                if not isinstance(a, tuple):
                    resolved[v] = a
            progress = True
            while progress:
                progress = False
                for v, a in list(pending.items()):
                    if v in resolved or not isinstance(a, tuple):
                        continue
                    if a[0] == "poly":
                        val = _try_eval(a[1], resolved, point)
                        if val is not None:
                            resolved[v] = val
                            progress = True
                    else:
                        num = _try_eval(a[2], resolved, point)
                        den = _try_eval(a[1], resolved, point)
                        if num is not None and den is not None:
                            if is_zero(den):
                                ok = False
                            else:
                                resolved[v] = num / den
                            progress = True
                    if not ok:
                        break
                if not ok:
                    break
            if not ok or len(resolved) < len(assignments):
                continue
            full = dict(point)
            full.update(resolved)
            vec = [full.get(v, as_scalar(0, self.field)) for v in range(self.nvars)]
            if any(
                is_zero(c.evaluate(vec)) for c in conditions
            ):
                continue
            found_solution_point = True
            if is_zero(self.det_poly.evaluate(vec)):
                continue
            witness = self.verify(vec)
            if witness is not None:
                self.witness = witness
                return
        if found_solution_point:
            # solutions exist but none invertible/verifiable in the trial set
            self.undecided = True
            self.outcomes.append(
                BranchOutcome("undecided", path,
                              "solution family without a verified invertible point")
            )
        else:
            self.outcomes.append(
                BranchOutcome("solutions", path,
                              "solution family outside the trial grid")
            )
            self.undecided = True


def _try_eval(p: Poly, resolved, point):
    vec = []
    for v in range(p.nvars):
        if v in point:
            vec.append(point[v])
        elif v in resolved:
            vec.append(resolved[v])
        else:
            if p.degree_in(v):
                return None
            vec.append(as_scalar(0, p.field))
    return p.evaluate(vec)


def _subst_poly(e: Poly, var, repl: Poly):
    cs = e.coeffs_in(var)
    acc = Poly.const(e.nvars, e.field, 0)
    power = Poly.const(e.nvars, e.field, 1)
    for c in cs:
        acc = acc + c * power
        power = power * repl
    return acc


def _eliminate_linear(e: Poly, var, lead: Poly, rest: Poly):
    """e with var replaced by -rest/lead, cleared of denominators."""
    cs = e.coeffs_in(var)
    d = len(cs) - 1
    acc = Poly.const(e.nvars, e.field, 0)
    for j, c in enumerate(cs):
        term = c
        for _ in range(j):
            term = term * (-rest)
        for _ in range(d - j):
            term = term * lead
        acc = acc + term
    return acc


def _no_root_reason(coeffs, field, var):
    if (
        field == FIELD_Q
        and len(coeffs) == 3
        and is_zero(coeffs[1])
        and not is_zero(coeffs[0])
        and not is_zero(coeffs[2])
    ):
        ratio = -(Fraction(coeffs[0]) / Fraction(coeffs[2]))
        if ratio < 0:
            return f"requires t^2 = {ratio} < 0, impossible over Q"
        return f"requires t^2 = {ratio}, a non-square over Q"
    return f"univariate equation {coeffs} has no roots in {field}"


# --- invariant fingerprint ---------------------------------------------------

_fingerprint_cache: dict = {}


def fingerprint(g: GradedLieAlgebra) -> dict:
    """Graded-isomorphism invariants used for fast non-isomorphism proofs."""
    cached = _fingerprint_cache.get(id(g))
    if cached is not None and cached[0] is g:
        return cached[1]
    ok, length = g.is_carnot()
    fp = {
        "component_dims": g.component_dims(),
        "lcs_dims": tuple(s.dim for s in g.lcs()),
        "carnot": ok,
    }
    if ok:
        fp["h2_dims"] = tuple(
            h2_slice(g, k).dim_h for k in range(2, length + 2)
        )
        fp["extendable"] = is_extendable(g)[0]
        fp["discriminant"] = _discriminant_or_none(g)
    _fingerprint_cache[id(g)] = (g, fp)
    return fp


def _discriminant_or_none(g):
    try:
        disc, _ = real_form_discriminant(g)
        return disc
    except StructureError:
        return None


def fingerprints_differ(fg: dict, fh: dict, field: str):
    """The first mismatching fingerprint field, or None.

    Discriminants compare by square class (their ratio must be a square in
    the field), which is the actual invariance the quadratic form gives.
    """
    for key in ("component_dims", "lcs_dims", "carnot", "h2_dims", "extendable"):
        if key in fg or key in fh:
            if fg.get(key) != fh.get(key):
                return (key, fg.get(key), fh.get(key))
    dg, dh = fg.get("discriminant"), fh.get("discriminant")
    if (dg is None) != (dh is None):
        return ("discriminant", dg, dh)
    if dg is not None and dh is not None:
        zg, zh = is_zero(dg), is_zero(dh)
        if zg != zh:
            return ("discriminant", dg, dh)
        if not zg and not is_square(dg / dh, field):
            return ("discriminant", dg, dh)
    return None


# --- real-form discriminant --------------------------------------------------

def real_form_discriminant(g: GradedLieAlgebra):
    """Discriminant of the binary form Q(a,b) = coefficient of
    [x, [x, z0]] in g_4, where x = a x1 + b x2 runs over g_1 and z0 spans
    g_2.  Requires dim g_1 = 2, dim g_2 = 1, dim g_4 = 1, length >= 4.

    Under any graded automorphism the form changes by substitution and a
    scalar, so the discriminant's square class (and over Q its sign) is an
    isomorphism invariant.  Returns (discriminant, sign class).
    """
    ok, length = g.is_carnot()
    if not (g.component_dim(1) == 2 and length >= 4
            and g.component_dim(2) == 1 and g.component_dim(4) == 1):
        raise StructureError(
            "discriminant needs dims (2,1,*,1,...) and length >= 4"
        )
    x1, x2 = g.basis_element((1, 0)), g.basis_element((1, 1))
    z0 = g.basis_element((2, 0))

    def coeff(u, v):
        w = g.bracket(u, g.bracket(v, z0))
        return w.coeffs.get((4, 0), as_scalar(0, g.field))

    q11 = coeff(x1, x1)
    q22 = coeff(x2, x2)
    q12 = coeff(x1, x2) + coeff(x2, x1)
    disc = q12 * q12 - 4 * q11 * q22
    if g.field == FIELD_Q:
        sign = "zero" if disc == 0 else ("positive" if disc > 0 else "negative")
    else:
        sign = "zero" if is_zero(disc) else "nonzero"
    return disc, sign


# --- induced action on cohomology --------------------------------------------

def induced_h2_action(g: GradedLieAlgebra, gmap: GradedMap, k: int) -> Matrix:
    """Matrix of the pullback action on the chosen H2 representatives.

    Row r holds the class coordinates of rep_r composed with the map; with
    this row convention action(A compose B) = action(A) * action(B).
    """
    if not gmap.verified:
        raise StructureError("induced action needs a verified map")
    if gmap.source is not g or gmap.target is not g:
        raise StructureError("induced action needs an automorphism of g")
    slice_k = h2_slice(g, k)
    rows = []
    for rep in slice_k.h_reps:
        coeffs = {}
        for pair in slice_k.pairs:
            k1, k2 = pair
            val = rep.evaluate(gmap.apply_basis(k1), gmap.apply_basis(k2))
            if not is_zero(val):
                coeffs[pair] = val
        pulled = Cochain2(g, k, coeffs)
        rows.append(list(slice_k.reduce_mod_b(pulled)))
    n = len(slice_k.h_reps)
    if n == 0:
        return Matrix(0, 0, [])
    return Matrix.from_rows(rows)


def pullback_cochain(g: GradedLieAlgebra, gmap: GradedMap, c: Cochain2) -> Cochain2:
    coeffs = {}
    for pair in pair_basis(g, c.grading):
        k1, k2 = pair
        v = c.evaluate(gmap.apply_basis(k1), gmap.apply_basis(k2))
        if not is_zero(v):
            coeffs[pair] = v
    return Cochain2(g, c.grading, coeffs)


# --- isomorphism search -------------------------------------------------------

class IsoVerdict:
    """VerifiedIso(witness) | VerifiedNonIso(certificate) | Unknown(reason)."""

    __slots__ = ("kind", "witness", "certificate", "reason")

    def __init__(self, kind, witness=None, certificate=None, reason=None):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "witness", witness)
        object.__setattr__(self, "certificate", certificate)
        object.__setattr__(self, "reason", reason)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("IsoVerdict is immutable")

    @property
    def is_iso(self):
        return self.kind == "iso"

    @property
    def is_noniso(self):
        return self.kind == "noniso"

    @property
    def is_unknown(self):
        return self.kind == "unknown"

    def __repr__(self):
        extra = self.reason or self.certificate or self.witness
        return f"IsoVerdict({self.kind}, {extra!r})"


def _det_poly(q, nvars, field):
    if q == 1:
        return Poly.var(nvars, field, 0)
    a = Poly.var(nvars, field, 0)
    b = Poly.var(nvars, field, 1)
    c = Poly.var(nvars, field, 2)
    d = Poly.var(nvars, field, 3)
    return a * d - b * c


def iso_search(g: GradedLieAlgebra, h: GradedLieAlgebra, field: str | None = None,
               height: int = 3) -> IsoVerdict:
    """Decide graded isomorphism with a certificate.

    Pipeline: dimension vector, invariant fingerprint, parametric solve of
    the mixed constraint system by case-split elimination (q <= 2), then a
    bounded-height search over first-block matrices; anything unresolved is
    Unknown, never a guess.
    """
    if field is None:
        field = g.field
    if g.field != field or h.field != field:
        raise FieldError("algebras must live over the requested field")
    if g.component_dims() != h.component_dims():
        return IsoVerdict(
            "noniso",
            certificate=("component_dims", g.component_dims(), h.component_dims()),
        )
    if g.components == h.components and g.brackets == h.brackets:
        ident = GradedMap(
            g, h,
            [Matrix.identity(g.component_dim(i)) for i in range(1, g.length + 1)],
            verified=True,
        )
        return IsoVerdict("iso", witness=ident)
    mismatch = fingerprints_differ(fingerprint(g), fingerprint(h), field)
    if mismatch is not None:
        return IsoVerdict("noniso", certificate=("fingerprint",) + mismatch)
    ok_g, _ = g.is_carnot()
    ok_h, _ = h.is_carnot()
    if not (ok_g and ok_h):
        return IsoVerdict("unknown", reason="non-Carnot pair beyond the solver")
    q = g.component_dim(1)
    undecided = False
    if q <= 2:
        system = symbolic_constraints(g, h)
        nvars = q * q
        det = _det_poly(q, nvars, field)

        def verify(vec):
            a_mat = Matrix(q, q, [[vec[r * q + c] for c in range(q)]
                                  for r in range(q)])
            res = propagate(g, a_mat, target=h)
            if isinstance(res, PropagationFailure):
                return None
            if not res.is_invertible():
                return None
            return res

        solver = _Solver(nvars, field, det, verify)
        branch_fixes = [{0: as_scalar(1, field)}]
        if q == 2:
            branch_fixes = [
                {0: as_scalar(1, field)},
                {0: as_scalar(0, field), 1: as_scalar(1, field)},
                {0: as_scalar(0, field), 1: as_scalar(0, field)},
            ]
        for fixed in branch_fixes:
            solver.run(system.equations, fixed)
            if solver.witness is not None:
                return IsoVerdict("iso", witness=solver.witness)
        if not solver.undecided:
            return IsoVerdict(
                "noniso",
                certificate=("system-infeasible", tuple(solver.outcomes)),
            )
        undecided = True
    found = _height_search(g, h, field, height)
    if found is not None:
        return IsoVerdict("iso", witness=found)
    reason = (
        "solver branches undecided and no witness within height bound"
        if undecided
        else f"first component dimension {q} beyond the parametric solver"
    )
    return IsoVerdict("unknown", reason=reason)


def _height_values(field, height):
    vals = [Fraction(0)]
    for num in range(1, height + 1):
        for den in range(1, height + 1):
            f = Fraction(num, den)
            if f not in vals:
                vals.append(f)
            if -f not in vals:
                vals.append(-f)
    vals.sort(key=lambda f: (abs(f.numerator) + f.denominator, f))
    if field == FIELD_Q:
        return vals
    out = [GaussianRational(v, 0) for v in vals]
    out.extend(GaussianRational(0, v) for v in vals if v != 0)
    for re in (1, -1):
        for im in (1, -1):
            out.append(GaussianRational(re, im))
    return out


_HEIGHT_SEARCH_BUDGET = 300_000


def _height_search(g, h, field, height):
    q = g.component_dim(1)
    if q > 2:
        return None
    values = _height_values(field, height)
    count = 0
    for combo in itertools.product(values, repeat=q * q):
        count += 1
        if count > _HEIGHT_SEARCH_BUDGET:
            return None
        a_mat = Matrix(q, q, [[combo[r * q + c] for c in range(q)]
                              for r in range(q)])
        if q == 2:
            det = combo[0] * combo[3] - combo[1] * combo[2]
            if is_zero(det):
                continue
        elif is_zero(combo[0]):
            continue
        res = propagate(g, a_mat, target=h)
        if isinstance(res, PropagationFailure):
            continue
        if res.is_invertible():
            return res
    return None
