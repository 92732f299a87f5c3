"""Exact arithmetic for finitely generated abelian groups and their colimits.

Everything in this module is exact: integer matrices are lists of lists of
Python ints, rational computations use ``fractions.Fraction``.  The two main
exports are

* ``smith_normal_form`` and friends (``cokernel``, ``kernel_lattice_basis``),
  with the convention ``a == u @ d @ v`` where ``u`` and ``v`` are unimodular
  and ``d`` is diagonal, nonnegative, with each entry dividing the next; and

* a classifier for sequential colimits ``Z^k -M1-> Z^k -M2-> ...`` of free
  abelian groups along integer matrices (``DirectedSystem`` / ``colimit``),
  together with ``compose_window`` and the element-identification decision
  procedure ``identified``.

The colimit classifier certifies exact answers for the class of systems whose
matrices become upper triangular under a common permutation of coordinates
(detected from the union zero pattern) or which form a commuting family that
can be put into a common flag over Q; on each filtration direction the
diagonal scaling must follow a monomial law ``c * d**e`` (separately on odd
and even step parameters, which covers parity-dependent laws).  Systems
outside this class are rejected with a diagnostic instead of guessed at.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, UnsupportedSystemError

# ---------------------------------------------------------------------------
# basic integer / rational matrix helpers
# ---------------------------------------------------------------------------


def mat_shape(a):
    """(rows, cols) of a rectangular list-of-lists matrix; validates shape."""
    if not isinstance(a, (list, tuple)) or not a:
        raise InputError("matrix must be a non-empty list of rows")
    rows = len(a)
    cols = len(a[0])
    for row in a:
        if not isinstance(row, (list, tuple)) or len(row) != cols:
            raise InputError("matrix rows must all have the same length")
    return rows, cols


def as_int_matrix(a):
    """Copy ``a`` as a list of lists of Python ints, rejecting non-integers."""
    rows, cols = mat_shape(a)
    out = []
    for row in a:
        new = []
        for x in row:
            if isinstance(x, bool) or not isinstance(x, int):
                if isinstance(x, Fraction) and x.denominator == 1:
                    x = x.numerator
                else:
                    raise InputError(f"matrix entry {x!r} is not an integer")
            new.append(int(x))
        out.append(new)
    return out


def identity_matrix(k):
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def mat_mul(a, b):
    """Matrix product (exact; works for int or Fraction entries)."""
    m, n = mat_shape(a)
    n2, p = mat_shape(b)
    if n != n2:
        raise InputError(f"cannot multiply {m}x{n} by {n2}x{p}")
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    m, n = mat_shape(a)
    if len(v) != n:
        raise InputError(f"vector length {len(v)} does not match {m}x{n} matrix")
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def mat_eq(a, b):
    return mat_shape(a) == mat_shape(b) and all(
        x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb)
    )


def rank(a):
    """Rank over Q (Gaussian elimination on Fractions)."""
    m, n = mat_shape(a)
    rows = [[Fraction(x) for x in row] for row in a]
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(r + 1, m):
            f = rows[i][col]
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == m:
            break
    return r


def determinant(a):
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    m, n = mat_shape(a)
    if m != n:
        raise InputError("determinant needs a square matrix")
    mat = as_int_matrix(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if mat[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if mat[i][k]), None)
            if piv is None:
                return 0
            mat[k], mat[piv] = mat[piv], mat[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                mat[i][j] = (mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]) // prev
            mat[i][k] = 0
        prev = mat[k][k]
    return sign * mat[n - 1][n - 1]


def rref_fractions(a):
    """Reduced row echelon form over Q; returns (rows, pivot_columns)."""
    m, n = mat_shape(a)
    rows = [[Fraction(x) for x in row] for row in a]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    return rows, pivots


def nullspace_rational(a):
    """Basis (list of Fraction vectors) of the rational nullspace of ``a``."""
    m, n = mat_shape(a)
    rows, pivots = rref_fractions(a)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -rows[r][f]
        basis.append(vec)
    return basis


def solve_exact(a, b):
    """Solve ``a @ x = b`` over Q for matrix ``b`` (columns solved jointly).

    ``a`` must have full column rank and the system must be consistent;
    otherwise an ``InputError`` is raised.  Returns a Fraction matrix ``x``
    with ``a @ x == b``.
    """
    m, n = mat_shape(a)
    mb, p = mat_shape(b)
    if mb != m:
        raise InputError("incompatible shapes in solve_exact")
    aug = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(b[i][j]) for j in range(p)]
           for i in range(m)]
    rows, pivots = rref_fractions(aug)
    if len([c for c in pivots if c < n]) != n:
        raise InputError("solve_exact: coefficient matrix is not of full column rank")
    if any(c >= n for c in pivots):
        raise InputError("solve_exact: inconsistent linear system")
    x = [[Fraction(0)] * p for _ in range(n)]
    for r, c in enumerate(pivots):
        for j in range(p):
            x[c][j] = rows[r][n + j]
    return x


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def _snf_with_inverse(a):
    """Core SNF reduction.

    Returns ``(u, d, v, v_inv)`` with ``a == u @ d @ v``, ``v_inv == v^-1``,
    ``u`` and ``v`` unimodular, ``d`` diagonal nonnegative with a divisibility
    chain along the diagonal.
    """
    m, n = mat_shape(a)
    d = as_int_matrix(a)
    u = identity_matrix(m)
    v = identity_matrix(n)
    vi = identity_matrix(n)

    def row_swap(r, s):
        d[r], d[s] = d[s], d[r]
        for row in u:
            row[r], row[s] = row[s], row[r]

    def row_negate(r):
        d[r] = [-x for x in d[r]]
        for row in u:
            row[r] = -row[r]

    def row_add(r, s, q):
        # d: row r += q * row s; compensate u on the right by the inverse op.
        d[r] = [x + q * y for x, y in zip(d[r], d[s])]
        for row in u:
            row[s] -= q * row[r]

    def col_swap(c, s):
        for row in d:
            row[c], row[s] = row[s], row[c]
        v[c], v[s] = v[s], v[c]
        for row in vi:
            row[c], row[s] = row[s], row[c]

    def col_negate(c):
        for row in d:
            row[c] = -row[c]
        v[c] = [-x for x in v[c]]
        for row in vi:
            row[c] = -row[c]

    def col_add(c, s, q):
        # d: col c += q * col s; v gets the inverse row op, vi mirrors d.
        for row in d:
            row[c] += q * row[s]
        v[s] = [x - q * y for x, y in zip(v[s], v[c])]
        for row in vi:
            row[c] += q * row[s]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = d[i][j]
                if x and (best is None or abs(x) < abs(best[0])):
                    best = (x, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        p = d[t][t]
        dirty = False
        for i in range(t + 1, m):
            if d[i][t] % p:
                row_add(i, t, -(d[i][t] // p))
                dirty = True
        if dirty:
            continue
        for j in range(t + 1, n):
            if d[t][j] % p:
                col_add(j, t, -(d[t][j] // p))
                dirty = True
        if dirty:
            continue
        for i in range(t + 1, m):
            if d[i][t]:
                row_add(i, t, -(d[i][t] // p))
        for j in range(t + 1, n):
            if d[t][j]:
                col_add(j, t, -(d[t][j] // p))
        stray = next(
            ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % p),
            None,
        )
        if stray is not None:
            # Pull the offending row into the pivot row; the next pass reduces it.
            row_add(t, stray[0], 1)
            continue
        if d[t][t] < 0:
            row_negate(t)
        t += 1
    return u, d, v, vi


def smith_normal_form(a):
    """Smith normal form with transforms: ``a == u @ d @ v``.

    ``u`` (rows x rows) and ``v`` (cols x cols) are unimodular, ``d`` is
    diagonal with nonnegative entries ``d[0][0] | d[1][1] | ...``.

    >>> u, d, v = smith_normal_form([[2, 4], [6, 8]])
    >>> [d[i][i] for i in range(2)]
    [2, 4]
    """
    u, d, v, _ = _snf_with_inverse(a)
    return u, d, v


def kernel_lattice_basis(a):
    """Basis of the full kernel lattice ``{x in Z^n : a @ x = 0}``.

    Kernels of integer matrices are saturated subgroups, and the basis
    returned here generates the whole kernel (not a finite-index sublattice).
    Vectors are returned as lists of ints.
    """
    m, n = mat_shape(a)
    _, d, _, vi = _snf_with_inverse(a)
    k = min(m, n)
    free_cols = [j for j in range(n) if j >= k or d[j][j] == 0]
    return [[vi[i][j] for i in range(n)] for j in free_cols]


def image_lattice_basis(a):
    """Basis of the subgroup of Z^m generated by the columns of ``a``.

    Column reduction over Z (unimodular column operations preserve the
    generated subgroup); output columns are echelon-shaped with positive
    leading entries.
    """
    m, n = mat_shape(a)
    work = [[a[i][j] for i in range(m)] for j in range(n)]
    work = [list(map(int, c)) for c in work if any(c)]
    basis = []
    for r in range(m):
        while True:
            live = [c for c in work if c[r] != 0]
            if len(live) <= 1:
                break
            live.sort(key=lambda c: abs(c[r]))
            c0 = live[0]
            for c in live[1:]:
                q = c[r] // c0[r]
                for i in range(m):
                    c[i] -= q * c0[i]
            work = [c for c in work if any(c)]
        live = [c for c in work if c[r] != 0]
        if live:
            c0 = live[0]
            if c0[r] < 0:
                c0[:] = [-x for x in c0]
            basis.append(list(c0))
            work.remove(c0)
    return basis


# ---------------------------------------------------------------------------
# group descriptors
# ---------------------------------------------------------------------------


def _is_prime(p):
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def _factor_multiplicity(x):
    """dict prime -> exponent for x >= 2 (trial division; inputs are small)."""
    out = {}
    f = 2
    while f * f <= x:
        while x % f == 0:
            out[f] = out.get(f, 0) + 1
            x //= f
        f += 1 if f == 2 else 2
    if x > 1:
        out[x] = out.get(x, 0) + 1
    return out


def invariant_factors(orders):
    """Normalize a list of cyclic orders to an ascending divisibility chain.

    >>> invariant_factors([4, 2, 3])
    (2, 12)
    >>> invariant_factors([2, 2])
    (2, 2)
    """
    exps = {}
    count = 0
    for x in orders:
        x = int(x)
        if x < 1:
            raise InputError(f"cyclic order {x} is not positive")
        if x == 1:
            continue
        for p, e in _factor_multiplicity(x).items():
            exps.setdefault(p, []).append(e)
        count += 1
    if not exps:
        return ()
    for lst in exps.values():
        lst.sort(reverse=True)
    slots = max(len(lst) for lst in exps.values())
    out = []
    for s in range(slots):
        f = 1
        for p, lst in sorted(exps.items()):
            if s < len(lst):
                f *= p ** lst[s]
        out.append(f)
    return tuple(reversed(out))


class GroupDescriptor:
    """Isomorphism class ``Z^free + sum Loc(S_i) + Q^q + sum Z/t_j``.

    ``Loc(S)`` denotes the integers with the primes in the finite set ``S``
    inverted.  Summands are kept in a canonical order (free part, localized
    parts sorted by support, rational part, torsion as an ascending chain of
    invariant factors), so ``==`` is structural group isomorphism.

    >>> GroupDescriptor(free_rank=1, torsion=(4, 2, 3))
    GroupDescriptor(free_rank=1, q_rank=0, loc=(), torsion=(2, 12))
    >>> print(GroupDescriptor(q_rank=1, free_rank=1))
    Z + Q
    """

    __slots__ = ("free_rank", "q_rank", "loc", "torsion")

    def __init__(self, free_rank=0, q_rank=0, loc=(), torsion=()):
        free_rank = int(free_rank)
        q_rank = int(q_rank)
        if free_rank < 0 or q_rank < 0:
            raise InputError("ranks must be nonnegative")
        supports = []
        for supp in loc:
            s = tuple(sorted({int(p) for p in supp}))
            for p in s:
                if not _is_prime(p):
                    raise InputError(f"{p} is not prime in a localization support")
            if s:
                supports.append(s)
            else:
                free_rank += 1
        object.__setattr__(self, "free_rank", free_rank)
        object.__setattr__(self, "q_rank", q_rank)
        object.__setattr__(self, "loc", tuple(sorted(supports)))
        object.__setattr__(self, "torsion", invariant_factors(torsion))

    def __setattr__(self, name, value):
        raise AttributeError("GroupDescriptor is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def free(cls, n):
        return cls(free_rank=n)

    @classmethod
    def rationals(cls, n=1):
        return cls(q_rank=n)

    @classmethod
    def cyclic(cls, *orders):
        return cls(torsion=orders)

    @classmethod
    def localized(cls, primes, copies=1):
        return cls(loc=[tuple(primes)] * copies)

    # -- structure ----------------------------------------------------------

    def direct_sum(self, *others):
        free = self.free_rank
        q = self.q_rank
        loc = list(self.loc)
        tors = list(self.torsion)
        for o in others:
            free += o.free_rank
            q += o.q_rank
            loc.extend(o.loc)
            tors.extend(o.torsion)
        return GroupDescriptor(free, q, loc, tors)

    @property
    def is_trivial(self):
        return not (self.free_rank or self.q_rank or self.loc or self.torsion)

    @property
    def is_free(self):
        return not (self.q_rank or self.loc or self.torsion)

    @property
    def is_divisible(self):
        """True iff the group is divisible (a rational vector space here)."""
        return not (self.free_rank or self.loc or self.torsion)

    @property
    def is_torsion_free(self):
        return not self.torsion

    def _key(self):
        return (self.free_rank, self.q_rank, self.loc, self.torsion)

    def __eq__(self, other):
        return isinstance(other, GroupDescriptor) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"GroupDescriptor(free_rank={self.free_rank}, q_rank={self.q_rank}, "
            f"loc={self.loc}, torsion={self.torsion})"
        )

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        seen = {}
        for s in self.loc:
            seen[s] = seen.get(s, 0) + 1
        for s in sorted(seen):
            base = "Loc{" + ",".join(str(p) for p in s) + "}"
            parts.append(base if seen[s] == 1 else f"{base}^{seen[s]}")
        if self.q_rank:
            parts.append("Q" if self.q_rank == 1 else f"Q^{self.q_rank}")
        for t in self.torsion:
            parts.append(f"Z/{t}")
        return " + ".join(parts) if parts else "0"

    # -- serialization ------------------------------------------------------

    def to_json_dict(self):
        return {
            "free": self.free_rank,
            "q": self.q_rank,
            "loc": [list(s) for s in self.loc],
            "torsion": list(self.torsion),
        }

    @classmethod
    def from_json_dict(cls, obj):
        if not isinstance(obj, dict):
            raise InputError("group descriptor JSON must be an object")
        return cls(
            free_rank=obj.get("free", 0),
            q_rank=obj.get("q", 0),
            loc=obj.get("loc", ()),
            torsion=obj.get("torsion", ()),
        )


def cokernel(a):
    """``Z^m / (a . Z^n)`` for an integer m x n matrix, as a descriptor.

    >>> print(cokernel([[2, 0], [0, 3]]))
    Z/6
    >>> print(cokernel([[2, 4], [6, 8]]))
    Z/2 + Z/4
    """
    m, n = mat_shape(a)
    _, d, _, _ = _snf_with_inverse(a)
    diag = [d[i][i] for i in range(min(m, n))]
    nonzero = sum(1 for x in diag if x)
    return GroupDescriptor(
        free_rank=m - nonzero, torsion=[x for x in diag if x > 1]
    )


# ---------------------------------------------------------------------------
# directed systems
# ---------------------------------------------------------------------------

_LAW_KINDS = ("identity", "zero", "mult_d", "diag_power", "poly")


def _law_to_poly(obj):
    """Translate a scaling-law JSON object into ascending poly coefficients."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("scaling law must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "identity":
        return (1,)
    if kind == "zero":
        return (0,)
    if kind == "mult_d":
        return (0, 1)
    if kind == "diag_power":
        e = int(obj.get("exp", 1))
        if e < 0:
            raise InputError("diag_power exponent must be nonnegative")
        return (0,) * e + (1,)
    if kind == "poly":
        coeffs = obj.get("coeffs")
        if not isinstance(coeffs, (list, tuple)) or not coeffs:
            raise InputError("poly law needs a non-empty 'coeffs' list")
        return tuple(int(c) for c in coeffs)
    raise InputError(f"unknown scaling-law kind {kind!r} (expected one of {_LAW_KINDS})")


def _poly_eval(coeffs, d):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * d + c
    return acc


class DirectedSystem:
    """A sequential diagram ``Z^dim -M1-> Z^dim -M2-> ...``.

    Three construction styles:

    * ``DirectedSystem.explicit([...matrices...])``: a finite chain given by
      square integer matrices.
    * ``DirectedSystem.symbolic(dim, diag_laws, offdiag)``: one matrix shape
      whose entries are integer polynomials in a parameter ``d``, evaluated
      along the canonical chain ``d = 2, 3, 4, ...`` (divisibility-cofinal,
      so classifications are exact).  An explicit finite ``d_chain`` may be
      supplied instead; the system is then treated like an explicit chain.
    * ``DirectedSystem.from_family(dim, fn)``: an arbitrary callable
      ``d -> matrix`` on the canonical chain (or an explicit ``d_chain``).
    """

    def __init__(self, dim, mode, matrices=None, family=None, d_chain=None,
                 diag_polys=None, offdiag=None):
        if dim < 1:
            raise InputError("system dimension must be at least 1")
        self.dim = int(dim)
        self.mode = mode
        self._matrices = matrices
        self._family = family
        self._d_chain = tuple(d_chain) if d_chain is not None else None
        self._diag_polys = diag_polys
        self._offdiag = offdiag
        self._matrix_cache = {}
        self._analysis_cache = None
        if self._d_chain is not None:
            for d in self._d_chain:
                if not isinstance(d, int) or d < 2:
                    raise InputError("d_chain entries must be integers >= 2")

    # -- constructors -------------------------------------------------------

    @classmethod
    def explicit(cls, matrices):
        mats = [as_int_matrix(m) for m in matrices]
        if not mats:
            raise InputError("explicit system needs at least one matrix")
        dim = len(mats[0])
        for m in mats:
            r, c = mat_shape(m)
            if r != dim or c != dim:
                raise InputError("all matrices must be square of equal size")
        return cls(dim, "explicit", matrices=mats)

    @classmethod
    def symbolic(cls, dim, diag_laws, offdiag=(), d_chain=None):
        dim = int(dim)
        polys = [_law_to_poly(law) for law in diag_laws]
        if len(polys) != dim:
            raise InputError("need exactly one diagonal law per coordinate")
        off = []
        for entry in offdiag:
            if not isinstance(entry, dict):
                raise InputError("offdiag entries must be objects")
            r, c = int(entry.get("row", -1)), int(entry.get("col", -1))
            if not (0 <= r < dim and 0 <= c < dim) or r == c:
                raise InputError("offdiag entry needs distinct in-range row/col")
            if "poly" in entry:
                coeffs = tuple(int(x) for x in entry["poly"])
            else:
                coeffs = _law_to_poly(entry)
            off.append((r, c, coeffs))

        def family(d):
            m = [[0] * dim for _ in range(dim)]
            for i, p in enumerate(polys):
                m[i][i] = _poly_eval(p, d)
            for r, c, coeffs in off:
                m[r][c] = _poly_eval(coeffs, d)
            return m

        return cls(dim, "symbolic", family=family, d_chain=d_chain,
                   diag_polys=polys, offdiag=tuple(off))

    @classmethod
    def from_family(cls, dim, fn, d_chain=None):
        return cls(int(dim), "symbolic", family=fn, d_chain=d_chain)

    # -- serialization ------------------------------------------------------

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "mode" not in obj:
            raise InputError("system JSON must be an object with a 'mode'")
        mode = obj["mode"]
        if mode == "explicit":
            if "matrices" not in obj:
                raise InputError("explicit system JSON needs 'matrices'")
            return cls.explicit(obj["matrices"])
        if mode == "symbolic":
            for key in ("dim", "law"):
                if key not in obj:
                    raise InputError(f"symbolic system JSON needs {key!r}")
            return cls.symbolic(
                obj["dim"], obj["law"], obj.get("offdiag", ()),
                d_chain=obj.get("d_chain"),
            )
        raise InputError(f"unknown system mode {mode!r}")

    def to_json(self):
        if self.mode == "explicit":
            return {"mode": "explicit", "matrices": [list(map(list, m)) for m in self._matrices]}
        if self._diag_polys is None:
            raise InputError("a family-backed system has no JSON form")
        out = {
            "mode": "symbolic",
            "dim": self.dim,
            "law": [{"kind": "poly", "coeffs": list(p)} for p in self._diag_polys],
            "offdiag": [
                {"row": r, "col": c, "poly": list(p)} for r, c, p in self._offdiag
            ],
        }
        if self._d_chain is not None:
            out["d_chain"] = list(self._d_chain)
        return out

    # -- chain access -------------------------------------------------------

    @property
    def finite_length(self):
        """Number of maps if the chain is finite, else None."""
        if self.mode == "explicit":
            return len(self._matrices)
        if self._d_chain is not None:
            return len(self._d_chain)
        return None

    @property
    def is_certifiable(self):
        """True iff classifications of this system are exact (not truncated)."""
        return self.mode == "symbolic" and self._d_chain is None

    def d_value(self, t):
        """Step parameter of the t-th map (1-based); canonical chain is t+1."""
        if self.mode != "symbolic":
            raise InputError("explicit systems have no step parameter")
        if self._d_chain is not None:
            if not 1 <= t <= len(self._d_chain):
                raise InputError(f"step {t} outside the supplied d_chain")
            return self._d_chain[t - 1]
        return t + 1

    def matrix(self, t):
        """The t-th structure map (1-based) as an integer matrix."""
        if t < 1:
            raise InputError("step indices are 1-based")
        if self.mode == "explicit":
            if t > len(self._matrices):
                raise InputError(f"step {t} outside the explicit chain")
            return self._matrices[t - 1]
        if t not in self._matrix_cache:
            self._matrix_cache[t] = self.matrix_at(self.d_value(t))
        return self._matrix_cache[t]

    def matrix_at(self, d):
        """Evaluate a symbolic family at an arbitrary parameter ``d >= 2``."""
        if self.mode != "symbolic":
            raise InputError("explicit systems cannot be evaluated at a parameter")
        m = as_int_matrix(self._family(d))
        r, c = mat_shape(m)
        if r != self.dim or c != self.dim:
            raise InputError("family returned a matrix of the wrong size")
        return m


# ---------------------------------------------------------------------------
# colimit classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColimitReport:
    """Result of classifying a directed system.

    ``invariants`` is exact when ``truncated`` is False; otherwise it reflects
    only the materialized finite chain (free rank observed so far).
    ``relations`` identifies pairs of nonnegative level-1 vectors that become
    equal in the colimit (a spanning set of the level-1 identifications).
    """

    invariants: GroupDescriptor
    relations: tuple
    truncated: bool
    rank: int
    stabilization_level: int
    notes: tuple = ()

    def to_json_dict(self):
        return {
            "invariants": self.invariants.to_json_dict(),
            "pretty": str(self.invariants),
            "relations": [
                [[a[0], list(a[1])], [b[0], list(b[1])]] for a, b in self.relations
            ],
            "truncated": self.truncated,
            "rank": self.rank,
            "stabilization_level": self.stabilization_level,
            "notes": list(self.notes),
        }


def _relation_pairs(kernel_basis):
    rels = []
    for vec in kernel_basis:
        lead = next((x for x in vec if x), 0)
        if lead < 0:
            vec = [-x for x in vec]
        plus = tuple(x if x > 0 else 0 for x in vec)
        minus = tuple(-x if x < 0 else 0 for x in vec)
        rels.append(((1, plus), (1, minus)))
    return tuple(rels)


def _progressive_composites(mats):
    comps = []
    w = None
    for m in mats:
        w = [row[:] for row in m] if w is None else mat_mul(m, w)
        comps.append(w)
    return comps


def _colimit_finite(system, mats):
    dim = system.dim
    comps = _progressive_composites(mats)
    ranks = [rank(w) for w in comps]
    w = comps[-1]
    r = ranks[-1]
    stab = 1 + ranks.index(r)
    unimodular = all(abs(determinant(m)) == 1 for m in mats)
    rels = _relation_pairs(kernel_lattice_basis(w))
    if unimodular:
        return ColimitReport(
            invariants=GroupDescriptor.free(dim),
            relations=rels,
            truncated=False,
            rank=dim,
            stabilization_level=1,
            notes=("all steps unimodular; the chain is a chain of isomorphisms",),
        )
    return ColimitReport(
        invariants=GroupDescriptor.free(r),
        relations=rels,
        truncated=True,
        rank=r,
        stabilization_level=stab,
        notes=("finite horizon: free rank observed along the materialized chain; "
               "divisibility beyond the horizon is not certified",),
    )


def _fit_monomial(samples):
    """Fit ``lambda = c * d**e`` exactly to (d, lambda) samples.

    Returns ``("zero",)`` if all values vanish, ``("monomial", c, e)`` on an
    exact fit with c a nonzero Fraction and integer e >= 0, or None.
    """
    if not samples:
        return ("zero",)
    if all(lam == 0 for _, lam in samples):
        return ("zero",)
    if any(lam == 0 for _, lam in samples):
        return None
    d1, l1 = samples[0]
    for e in range(0, 64):
        c = Fraction(l1, d1 ** e)
        if all(Fraction(lam, d ** e) == c for d, lam in samples[1:]):
            return ("monomial", c, e)
    return None


def _direction_type(samples):
    """Classify one filtration direction from (d, lambda) samples.

    The scaling law must fit a monomial separately on odd and even values of
    ``d`` (this covers parity-dependent laws).  Returns ``None`` for a dead
    direction, a GroupDescriptor for a surviving one, and raises for laws
    outside the certified class.
    """
    odd = [(d, lam) for d, lam in samples if d % 2]
    even = [(d, lam) for d, lam in samples if d % 2 == 0]
    fits = []
    for part in (odd, even):
        fit = _fit_monomial(part)
        if fit is None:
            raise UnsupportedSystemError(
                "diagonal scaling law fits no monomial c*d^e on a parity class; "
                "the system is outside the certified class"
            )
        fits.append(fit)
    if any(f[0] == "zero" for f in fits):
        # Zeros recur on a full parity class of the canonical chain: the
        # direction is annihilated infinitely often, so it dies in the colimit.
        return None
    consts = []
    for _, c, e in fits:
        if e >= 1:
            return GroupDescriptor.rationals(1)
        consts.append(c)
    primes = set()
    for c in consts:
        primes.update(_factor_multiplicity(abs(c.numerator)))
        primes.update(_factor_multiplicity(c.denominator))
    if not primes:
        return GroupDescriptor.free(1)
    return GroupDescriptor.localized(sorted(primes))


def _union_pattern(mats):
    dim = len(mats[0])
    return [
        [any(m[i][j] for m in mats) for j in range(dim)] for i in range(dim)
    ]


def _triangular_order(pattern):
    """Permutation making every matrix with this zero pattern upper triangular.

    Entry (i, j) being set means coordinate j feeds coordinate i, so i must
    come first.  Returns the permutation (list of original indices in new
    order) or None if the feed graph has a cycle.
    """
    dim = len(pattern)
    targets = {j: {i for i in range(dim) if i != j and pattern[i][j]} for j in range(dim)}
    placed = []
    placed_set = set()
    while len(placed) < dim:
        ready = [j for j in range(dim)
                 if j not in placed_set and targets[j] <= placed_set]
        if not ready:
            return None
        nxt = min(ready)
        placed.append(nxt)
        placed_set.add(nxt)
    return placed


def _reachable(pattern, start):
    """All coordinates strictly reachable from ``start`` along feed arcs."""
    dim = len(pattern)
    seen = set()
    stack = [start]
    while stack:
        j = stack.pop()
        for i in range(dim):
            if i != j and pattern[i][j] and i not in seen:
                seen.add(i)
                stack.append(i)
    seen.discard(start)
    return seen


def _classify_triangular(samples_per_coord, pattern, r_expected):
    order = _triangular_order(pattern)
    if order is None:
        return None
    dim = len(pattern)
    types = {}
    for p in range(dim):
        types[p] = _direction_type(samples_per_coord[p])
    survivors = [p for p in order if types[p] is not None]
    if len(survivors) != r_expected:
        raise UnsupportedSystemError(
            f"triangular analysis found {len(survivors)} surviving directions "
            f"but the stabilized composite has rank {r_expected}"
        )
    # Split safety: a non-free filtration quotient is only certified when
    # everything it actually couples into (transitively) is divisible.
    for p in survivors:
        tp = types[p]
        if tp.is_free:
            continue
        for q in _reachable(pattern, p):
            tq = types.get(q)
            if tq is not None and not tq.is_divisible:
                raise UnsupportedSystemError(
                    "cannot certify a split filtration: a non-free direction "
                    f"(coordinate {p}) couples into a non-divisible one "
                    f"(coordinate {q}); refusing to guess the extension"
                )
    total = GroupDescriptor.zero()
    for p in survivors:
        total = total.direct_sum(types[p])
    return total


def _restricted_maps(mats, basis):
    """Express each map's action on the column span of ``basis`` (exactly)."""
    out = []
    for m in mats:
        image = mat_mul(m, basis)
        out.append(solve_exact(basis, image))
    return out


def _sympy_rational_eigenspaces(t):
    """Eigenvalue/eigenbasis pairs of a Fraction matrix; rationals required."""
    import sympy

    mat = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                        for row in t])
    out = []
    for val, _mult, vecs in mat.eigenvects():
        if not val.is_rational:
            raise UnsupportedSystemError(
                "a restricted structure map has an irrational eigenvalue; "
                "the system is outside the certified class"
            )
        basis = [
            [Fraction(sympy.Rational(v[i]).p, sympy.Rational(v[i]).q) for v in vecs]
            for i in range(mat.rows)
        ]
        out.append((Fraction(val.p, val.q), basis))
    return out


def _common_flag_eigenvalues(ts):
    """Eigenvalue tuples of a common flag for the commuting family ``ts``.

    Returns a list (deepest flag direction first) of tuples giving, for each
    map in ``ts``, the scaling on that flag quotient.  Divisible (fast
    growing) directions are placed deepest so the split-safety scan can
    certify the filtration.
    """
    dim = len(ts[0])
    if dim == 0:
        return []

    def common_eigenspaces(maps, basis):
        spaces = [((), basis)]
        for t in maps:
            new = []
            for vals, b in spaces:
                restricted = solve_exact(b, mat_mul(t, b))
                for val, sub in _sympy_rational_eigenspaces(restricted):
                    sub_cols = mat_mul(b, sub)
                    new.append((vals + (val,), sub_cols))
            spaces = new
        return spaces

    identity_basis = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    spaces = common_eigenspaces(ts, identity_basis)

    # Fastest-scaling directions go deepest in the flag so that divisible
    # parts sit at the bottom; exact template fitting happens later with the
    # true step parameters.
    spaces.sort(key=lambda item: (tuple(-abs(v) for v in item[0]), item[0]))
    vals, b = spaces[0]
    vec = [row[0] for row in b]

    # Quotient every map by the chosen common eigendirection.
    pivot = max(range(dim), key=lambda i: (abs(vec[i]), -i))
    others = [i for i in range(dim) if i != pivot]
    basis_cols = [[Fraction(int(i == j)) for j in others] for i in range(dim)]
    full = [[Fraction(vec[i])] + basis_cols[i] for i in range(dim)]
    quotient_maps = []
    for t in ts:
        images = mat_mul(t, basis_cols)
        coords = solve_exact(full, images)
        quotient_maps.append([coords[i + 1] for i in range(dim - 1)])
    return [vals] + _common_flag_eigenvalues(quotient_maps)


def _classify_eigen(mats, d_values, w_final, r_expected):
    # The flag argument needs a commuting family.
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            if not mat_eq(mat_mul(mats[a], mats[b]), mat_mul(mats[b], mats[a])):
                raise UnsupportedSystemError(
                    "structure maps do not commute and no common triangular "
                    "coordinate order exists; the system is outside the "
                    "certified class"
                )
    basis = image_lattice_basis(w_final)
    if not basis:
        return GroupDescriptor.zero()
    # Columns of basis_mat span the stabilized subspace.
    basis_mat = [[basis[j][i] for j in range(len(basis))] for i in range(len(basis[0]))]
    # Every map must preserve the stabilized subspace with full rank.
    for m in mats:
        if rank(mat_mul(m, basis_mat)) != r_expected:
            raise UnsupportedSystemError(
                "a structure map drops rank on the stabilized subspace; "
                "the system is outside the certified class"
            )
    ts = _restricted_maps(mats, basis_mat)
    flag = _common_flag_eigenvalues(ts)
    total = GroupDescriptor.zero()
    seen_non_divisible = False
    for vals in flag:
        samples = list(zip(d_values, vals))
        kind = _direction_type(samples)
        if kind is None:
            raise UnsupportedSystemError(
                "a stabilized flag direction dies; internal inconsistency in "
                "the eigen classifier"
            )
        if not kind.is_free and seen_non_divisible:
            raise UnsupportedSystemError(
                "cannot certify a split filtration in the eigen classifier: "
                "a non-free quotient sits above a non-divisible part"
            )
        if not kind.is_divisible:
            seen_non_divisible = True
        total = total.direct_sum(kind)
    return total


def _colimit_symbolic(system, max_horizon=None):
    dim = system.dim
    cap = max_horizon if max_horizon is not None else max(14, dim + 6)
    if cap < 8:
        raise InputError("symbolic classification needs a horizon of at least 8")
    mats = [system.matrix(t) for t in range(1, cap + 1)]
    d_values = [system.d_value(t) for t in range(1, cap + 1)]
    comps = _progressive_composites(mats)
    ranks = [rank(w) for w in comps]
    r = ranks[-1]
    if any(x != r for x in ranks[-4:]):
        raise UnsupportedSystemError(
            f"composite rank did not stabilize within horizon {cap}: {ranks}"
        )
    stab = 1 + ranks.index(r)
    # The eventual rank must not depend on where the window starts.
    tail_start = cap // 2
    tail = mats[tail_start:]
    tail_comp = tail[0]
    for m in tail[1:]:
        tail_comp = mat_mul(m, tail_comp)
    if rank(tail_comp) != r:
        raise UnsupportedSystemError(
            "window rank depends on the starting level; the system is outside "
            "the certified class"
        )
    # Confirmation samples beyond the horizon guard against families whose
    # behaviour changes past the materialized chain.
    confirm_ds = [101, 102]
    confirm = [(d, system.matrix_at(d)) for d in confirm_ds]
    pattern = _union_pattern(mats + [m for _, m in confirm])
    samples_per_coord = {
        p: [(d, m[p][p]) for d, m in zip(d_values, mats)] + [(d, m[p][p]) for d, m in confirm]
        for p in range(dim)
    }
    invariants = _classify_triangular(samples_per_coord, pattern, r)
    if invariants is None:
        invariants = _classify_eigen(mats, d_values, comps[-1], r)
    rels = _relation_pairs(kernel_lattice_basis(comps[-1]))
    return ColimitReport(
        invariants=invariants,
        relations=rels,
        truncated=False,
        rank=r,
        stabilization_level=stab,
        notes=("classified along the canonical divisibility-cofinal chain d = 2, 3, 4, ...",),
    )


def colimit(system, max_horizon=None):
    """Classify the colimit of a directed system of free abelian groups.

    Symbolic systems on the canonical chain get an exact answer
    (``truncated = False``) or a rejection with a diagnostic.  Explicit
    chains (and symbolic systems with a user-supplied finite ``d_chain``)
    report the exact colimit only when every step is unimodular; otherwise
    the result is marked ``truncated``.

    >>> qs = DirectedSystem.symbolic(1, [{"kind": "mult_d"}])
    >>> print(colimit(qs).invariants)
    Q
    """
    if not isinstance(system, DirectedSystem):
        raise InputError("colimit expects a DirectedSystem")
    if system._analysis_cache is not None and max_horizon is None:
        return system._analysis_cache
    if system.mode == "explicit":
        report = _colimit_finite(system, system._matrices)
    elif system._d_chain is not None:
        mats = [system.matrix(t) for t in range(1, len(system._d_chain) + 1)]
        report = _colimit_finite(system, mats)
    else:
        report = _colimit_symbolic(system, max_horizon)
    if max_horizon is None:
        system._analysis_cache = report
    return report


def compose_window(system, i, j):
    """The composite map from level ``i`` to level ``j + 1``: ``M_j ... M_i``.

    Indices are 1-based and inclusive.

    >>> sys31 = DirectedSystem.symbolic(
    ...     3,
    ...     [{"kind": "poly", "coeffs": [0, 2]}, {"kind": "zero"}, {"kind": "identity"}],
    ...     [{"row": 0, "col": 1, "kind": "mult_d"},
    ...      {"row": 0, "col": 2, "poly": [-1, 1]},
    ...      {"row": 1, "col": 2, "poly": [1]}],
    ...     d_chain=[3, 5],
    ... )
    >>> compose_window(sys31, 1, 1)
    [[6, 3, 2], [0, 0, 1], [0, 0, 1]]
    """
    if not isinstance(system, DirectedSystem):
        raise InputError("compose_window expects a DirectedSystem")
    if not (isinstance(i, int) and isinstance(j, int)) or i < 1 or j < i:
        raise InputError("compose_window needs integer steps 1 <= i <= j")
    length = system.finite_length
    if length is not None and j > length:
        raise InputError(f"window end {j} exceeds the chain length {length}")
    out = system.matrix(i)
    for t in range(i + 1, j + 1):
        out = mat_mul(system.matrix(t), out)
    return out


def _verify_depth_cap(max_depth):
    if max_depth is not None:
        return int(max_depth)
    env = os.environ.get("RKT_VERIFY_DEPTH")
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise InputError("RKT_VERIFY_DEPTH must be an integer") from exc
        if value < 1:
            raise InputError("RKT_VERIFY_DEPTH must be positive")
        return value
    return 64


def identified(system, a, b, max_depth=None):
    """Decide whether two formal elements agree in the colimit.

    Elements are pairs ``(level, vector)`` with 1-based levels; the element
    lives in the copy of Z^dim at that level.  For symbolic systems on the
    canonical chain the answer is exact: pushforwards are compared at a level
    where the window rank from ``max(level_a, level_b)`` has provably
    stabilized, beyond which structure maps are injective on the relevant
    images.  For explicit chains the colimit of the finite diagram is its last
    object, so comparison at the final level is also exact.

    ``RKT_VERIFY_DEPTH`` (or ``max_depth``) bounds how far the chain is
    materialized; an insufficient bound raises instead of guessing.
    """
    if not isinstance(system, DirectedSystem):
        raise InputError("identified expects a DirectedSystem")

    def check_element(el):
        if (not isinstance(el, (tuple, list))) or len(el) != 2:
            raise InputError("elements are (level, vector) pairs")
        level, vec = el
        if not isinstance(level, int) or level < 1:
            raise InputError("element levels are 1-based integers")
        vec = [int(x) for x in vec]
        if len(vec) != system.dim:
            raise InputError(f"element vectors must have length {system.dim}")
        return level, vec

    (la, va), (lb, vb) = check_element(a), check_element(b)
    length = system.finite_length
    cap = _verify_depth_cap(max_depth)

    if length is not None:
        if max(la, lb) > length + 1:
            raise InputError("element level beyond the end of the finite chain")
        for t in range(la, length + 1):
            va = mat_vec(system.matrix(t), va)
        for t in range(lb, length + 1):
            vb = mat_vec(system.matrix(t), vb)
        return va == vb

    # Certify the system first (also caches the analysis).
    colimit(system)
    base = max(la, lb)
    for t in range(la, base):
        va = mat_vec(system.matrix(t), va)
    for t in range(lb, base):
        vb = mat_vec(system.matrix(t), vb)
    if va == vb:
        return True
    window = None
    window_ranks = []
    level = base
    while level - base < cap:
        step = system.matrix(level)
        va = mat_vec(step, va)
        vb = mat_vec(step, vb)
        level += 1
        if va == vb:
            return True
        window = [row[:] for row in step] if window is None else mat_mul(step, window)
        window_ranks.append(rank(window))
        if (
            len(window_ranks) >= 6
            and len(set(window_ranks[-4:])) == 1
        ):
            # Window rank from the base level has stabilized; for a certified
            # system all further maps are injective on the stabilized images,
            # so a present difference can never close up.
            return False
    raise InputError(
        "identified: verification depth exhausted before the window rank "
        "stabilized; raise RKT_VERIFY_DEPTH"
    )
