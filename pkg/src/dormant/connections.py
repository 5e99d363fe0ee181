"""Logarithmic connections d + A dx on framed bundles.

A connection is stored through its apparent matrix in a chosen frame of the
bundle; the frame's section divisor is kept on the bundle label so that
intrinsic residues can be recovered from apparent ones.  The p-curvature is
computed by operator powering: p-fold application of v -> v' + Av to the
identity frame.
"""
from __future__ import annotations

from .errors import (
    CurveMismatch,
    NoRationalGenerator,
    NotDivisibleByP,
    NotFlat,
    UndeclaredPoleDetected,
)
from .field import RatFunc, UPoly
from .curves import (
    INF,
    Differential,
    Divisor,
    FFElem,
    P1Marked,
    RaynaudPlane,
    SeriesBranch,
    Weierstrass,
    branch_at,
    raynaud_p_inf,
    z0_places,
)


class BundleLabel:
    """Name of a framed bundle plus the section divisor of the frame.

    corrections maps a point (a finite value, "inf", or a place key) to the
    valuation of the frame section there; apparent residues of a connection
    matrix exceed intrinsic ones by exactly that coefficient.
    """

    __slots__ = ("curve", "name", "corrections")

    def __init__(self, curve, name: str, corrections=None):
        self.curve = curve
        self.name = name
        self.corrections = dict(corrections or {})

    def degree(self) -> int:
        return sum(self.corrections.values())

    def correction_at(self, point) -> int:
        return self.corrections.get(point, 0)

    def dual(self) -> "BundleLabel":
        return BundleLabel(
            self.curve,
            f"dual({self.name})",
            {pt: -v for pt, v in self.corrections.items()},
        )

    def tensor(self, other: "BundleLabel") -> "BundleLabel":
        corr = dict(self.corrections)
        for pt, v in other.corrections.items():
            corr[pt] = corr.get(pt, 0) + v
        return BundleLabel(self.curve, f"{self.name}*{other.name}", corr)

    def __eq__(self, other):
        return (
            isinstance(other, BundleLabel)
            and other.curve == self.curve
            and other.corrections == self.corrections
        )

    def __repr__(self):
        return f"BundleLabel({self.name}, {self.corrections})"


def trivial_label(curve) -> BundleLabel:
    return BundleLabel(curve, "triv")


def omega_log_label(curve: P1Marked) -> BundleLabel:
    """Log differentials on the marked line, framed by dx / prod(x - a_i).

    The frame is a global section vanishing to order r - 2 at the infinite
    mark, which therefore must be present.
    """
    from .errors import NotOmegaBundle

    if curve.model != "p1" or not curve.stable:
        raise NotOmegaBundle("need a stable marked line")
    if INF not in curve.marks:
        raise NotOmegaBundle("the frame requires the infinite mark")
    r = len(curve.marks)
    return BundleLabel(curve, "omega_log", {INF: r - 2})


def omega_ell_label(curve: Weierstrass) -> BundleLabel:
    """Differentials on an elliptic curve, framed by dx/y (nowhere zero)."""
    return BundleLabel(curve, "omega_ell")


def raynaud_omega_label(curve: RaynaudPlane) -> BundleLabel:
    """Differentials on a Raynaud curve framed by d(-1/y) = dy/y^2."""
    return BundleLabel(curve, "ray_omega", {(0, 0): 2 * curve.genus() - 2})


def omega_frame_differential(label: BundleLabel) -> Differential:
    """The differential that the omega-type frame names."""
    curve = label.curve
    if label.name == "omega_log":
        den = UPoly.one(curve.field)
        for m in curve.marks:
            if m != INF:
                den = den * UPoly(curve.field, (-m, 1))
        return Differential(curve, FFElem(curve, (RatFunc(curve.field, UPoly.one(curve.field), den),)))
    if label.name == "omega_ell":
        return Differential(curve, curve.y_elem().inverse())
    if label.name == "ray_omega":
        return Differential(curve, (-curve.y_elem().inverse()).derivative())
    from .errors import NotOmegaBundle

    raise NotOmegaBundle(f"{label.name} does not name a differential frame")


class LogConnection:
    """d + A dx in a fixed frame; rank is the matrix size."""

    __slots__ = ("curve", "rank", "matrix", "label")

    def __init__(self, curve, matrix, label: BundleLabel | None = None,
                 validate: bool = True):
        rows = []
        for row in matrix:
            cells = []
            for c in row:
                if not isinstance(c, FFElem):
                    c = FFElem(curve, (c,))
                if c.curve != curve:
                    raise CurveMismatch("matrix entry on the wrong curve")
                cells.append(c)
            rows.append(tuple(cells))
        self.curve = curve
        self.rank = len(rows)
        if any(len(r) != self.rank for r in rows):
            raise ValueError("matrix must be square")
        self.matrix = tuple(rows)
        self.label = label if label is not None else trivial_label(curve)
        # pole placement is checked where it is cheap; the other models are
        # validated at their use sites
        if validate and curve.model == "p1":
            _validate_p1_log(self)

    @property
    def marks(self):
        return getattr(self.curve, "marks", ())

    def entry(self, i: int, j: int) -> FFElem:
        return self.matrix[i][j]

    def scalar(self) -> FFElem:
        if self.rank != 1:
            raise ValueError("rank-1 access on a higher-rank connection")
        return self.matrix[0][0]

    def __eq__(self, other):
        return (
            isinstance(other, LogConnection)
            and other.curve == self.curve
            and other.matrix == self.matrix
            and other.label == self.label
        )

    def __repr__(self):
        cells = "; ".join(
            ", ".join(c.render() for c in row) for row in self.matrix
        )
        return f"LogConnection[{self.rank}]({cells})"


def _validate_p1_log(conn: LogConnection) -> None:
    """Poles of the frame-corrected matrix must be simple and sit at marks.

    In a frame vanishing to order k at a point the apparent matrix picks up
    k times the dlog of the local coordinate on the diagonal, so at an
    unmarked point the apparent residue must agree with the correction mod p
    and the pole must stay simple.  At infinity the same comparison reads
    off the valuation of cell + corr/x in the coordinate 1/x.
    """
    curve = conn.curve
    field = curve.field
    marks = set(conn.marks)
    x = RatFunc.x(field)
    for i, row in enumerate(conn.matrix):
        for j, cell in enumerate(row):
            red = cell.as_ratfunc()
            corr = conn.label.corrections if i == j else {}
            den = red.den
            for c in range(field.p):
                lin = UPoly(field, (-c, 1))
                order = 0
                while den.evaluate(c) == 0:
                    den = den // lin
                    order += 1
                if order > 1:
                    raise UndeclaredPoleDetected(f"pole of order {order} at {c}")
                if c not in marks:
                    have = red.residue_at(c) if order else 0
                    if have != corr.get(c, 0) % field.p:
                        raise UndeclaredPoleDetected(
                            f"residue at the unmarked point {c} is off the frame"
                        )
            if den.degree > 0:
                raise UndeclaredPoleDetected("non-rational pole in a matrix entry")
            ci = corr.get(INF, 0) % field.p
            tail = red + RatFunc.const(field, ci) / x if ci else red
            if tail.is_zero:
                continue
            v_inf = tail.valuation_at_infinity() - 2
            if v_inf < (-1 if INF in marks else 0):
                raise UndeclaredPoleDetected("pole at infinity beyond log order")


# ---------------------------------------------------------------------------
# p-curvature

class PCurvatureTensor:
    """Matrix of the p-curvature, valued in (dx)^(tensor p)."""

    __slots__ = ("curve", "rank", "matrix")

    def __init__(self, curve, matrix):
        self.curve = curve
        self.rank = len(matrix)
        self.matrix = tuple(tuple(row) for row in matrix)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for row in self.matrix for c in row)

    def entry(self, i: int, j: int) -> FFElem:
        return self.matrix[i][j]

    def scalar(self) -> FFElem:
        if self.rank != 1:
            raise ValueError("rank-1 access on a higher-rank tensor")
        return self.matrix[0][0]

    def __repr__(self):
        tag = "0" if self.is_zero else "nonzero"
        return f"PCurvatureTensor[{self.rank}]({tag})"


def _mat_apply_d(curve, m):
    return [[c.derivative() for c in row] for row in m]


def _mat_mul(a, b, curve):
    n = len(a)
    zero = curve.ff_const(0)
    out = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for k in range(n):
            if a[i][k].is_zero:
                continue
            for j in range(n):
                if not b[k][j].is_zero:
                    out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out


def p_curvature(conn: LogConnection) -> PCurvatureTensor:
    """(d/dx + A)^p applied to the frame columns; x is separating so the
    p-th derivation power contributes nothing and the result is linear."""
    curve = conn.curve
    n = conn.rank
    a = [list(row) for row in conn.matrix]
    zero = curve.ff_const(0)
    one = curve.ff_const(1)
    m = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for _ in range(curve.p):
        m = [
            [d + s for d, s in zip(drow, srow)]
            for drow, srow in zip(_mat_apply_d(curve, m), _mat_mul(a, m, curve))
        ]
    return PCurvatureTensor(curve, m)


def rank1_p_curvature_closed(conn: LogConnection) -> FFElem:
    """a^p + (d/dx)^(p-1) a for rank one; agrees with operator powering."""
    a = conn.scalar()
    acc = a
    for _ in range(conn.curve.p - 1):
        acc = acc.derivative()
    return a ** conn.curve.p + acc


# ---------------------------------------------------------------------------
# monodromy

class MonodromyVector:
    """Residues at the declared marks, corrected by the frame divisor."""

    __slots__ = ("curve", "marks", "values")

    def __init__(self, curve, marks, values):
        self.curve = curve
        self.marks = tuple(marks)
        self.values = tuple(v % curve.p for v in values)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __eq__(self, other):
        if isinstance(other, MonodromyVector):
            return other.marks == self.marks and other.values == self.values
        if isinstance(other, tuple):
            return self.values == other
        return NotImplemented

    def __repr__(self):
        return f"MonodromyVector({dict(zip(self.marks, self.values))})"


def _apparent_residue_p1(a: RatFunc, mark) -> int:
    if mark == INF:
        return a.residue_at_infinity()
    return a.residue_at(mark)


def monodromy(conn: LogConnection) -> MonodromyVector:
    if conn.rank != 1:
        raise ValueError("monodromy vector is a rank-one notion")
    curve = conn.curve
    marks = conn.marks
    if curve.model == "p1":
        a = conn.scalar().as_ratfunc()
        vals = [
            _apparent_residue_p1(a, m) - conn.label.correction_at(m)
            for m in marks
        ]
    else:
        vals = []
        for m in marks:
            br = branch_at(curve, m, 4 * curve.p)
            vals.append(br.form_residue(conn.scalar()) - conn.label.correction_at(m))
    return MonodromyVector(curve, marks, vals)


def residue_pcurvature_identity(conn: LogConnection):
    """Per-mark check that Res(Psi) equals R^p - R for the residue matrix R.

    Both sides are taken in the working frame; they transform the same way,
    so the comparison is frame-independent.
    """
    curve = conn.curve
    if curve.model != "p1":
        raise CurveMismatch("identity report implemented over the marked line")
    p = curve.p
    psi = p_curvature(conn)
    report = []
    for mark in conn.marks:
        n = conn.rank
        rmat = [
            [_apparent_residue_p1(conn.entry(i, j).as_ratfunc(), mark) % p
             for j in range(n)]
            for i in range(n)
        ]
        lhs = [
            [_p_residue_p1(psi.entry(i, j).as_ratfunc(), mark, p) % p
             for j in range(n)]
            for i in range(n)
        ]
        rhs = _int_mat_sub(_int_mat_pow(rmat, p, p), rmat, p)
        report.append({"mark": mark, "lhs": lhs, "rhs": rhs, "ok": lhs == rhs})
    return report


def _p_residue_p1(f: RatFunc, mark, p: int) -> int:
    """Coefficient of (dt/t)^p in f (dx)^p at the mark."""
    if f.is_zero:
        return 0
    if mark == INF:
        # dx = -t^(-2) dt, (dx)^p = -t^(-2p) (dt)^p for odd p
        s = f.series_at_infinity(p + 1)
        return (-s.coeff(p)) % p
    s = f.series_at(mark, -p + 1)
    return s.coeff(-p)


def _int_mat_pow(m, e, p):
    n = len(m)
    out = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    base = [row[:] for row in m]
    while e:
        if e & 1:
            out = _int_mat_mul(out, base, p)
        base = _int_mat_mul(base, base, p)
        e >>= 1
    return out


def _int_mat_mul(a, b, p):
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) % p for j in range(n)]
        for i in range(n)
    ]


def _int_mat_sub(a, b, p):
    return [
        [(x - y) % p for x, y in zip(ra, rb)] for ra, rb in zip(a, b)
    ]


# ---------------------------------------------------------------------------
# canonical connections and descent

def canonical_connection(curve, unit=1) -> LogConnection:
    """The Frobenius-pullback connection, written in the frame unit * 1.

    With the natural frame the matrix is zero; multiplying the frame by a
    rational unit u shifts the apparent matrix to dlog u.
    """
    if not isinstance(unit, FFElem):
        unit = FFElem(curve, (unit,))
    if unit.is_zero:
        raise ValueError("frame unit must be nonzero")
    a = unit.dlog()
    label = BundleLabel(curve, "canonical", _divisor_points_p1(unit))
    return LogConnection(curve, [[a]], label)


def _divisor_points_p1(u: FFElem):
    """Valuations of a rational u at its rational zeros and poles, plus inf."""
    if u.curve.ext_degree != 1:
        return {}
    r = u.as_ratfunc()
    corr = {}
    for c in range(u.curve.p):
        v = r.valuation_at(c)
        if v:
            corr[c] = v
    v_inf = r.valuation_at_infinity()
    if v_inf:
        corr[INF] = v_inf
    return corr


def solve_dlog(curve, g: FFElem) -> FFElem:
    """Find rational u with dlog u = g, up to p-th powers.

    Complete over the line.  On the other models only a bounded monomial
    search x^i y^j is attempted; a miss raises NoRationalGenerator carrying
    the unresolved form, which is the honest outcome because a formal
    certificate can still decide dormancy downstream.
    """
    if isinstance(g, RatFunc):
        g = FFElem(curve, (g,))
    if g.is_zero:
        return curve.ff_const(1)
    p = curve.p
    if curve.ext_degree == 1:
        r = g.as_ratfunc()
        u = RatFunc.one(curve.field)
        den = r.den
        for c in range(p):
            if den.evaluate(c) == 0:
                e = r.residue_at(c) % p
                if e:
                    u = u * (RatFunc.x(curve.field) - c) ** e
        if u.dlog() == r:
            return FFElem(curve, (u,))
        raise NoRationalGenerator(
            "no rational solution of dlog u = g over the line",
            descent=g - FFElem(curve, (u.dlog(),)),
        )
    x, y = curve.x_elem(), curve.y_elem()
    dlx, dly = x.dlog(), y.dlog()
    for i in range(p):
        for j in range(p):
            if (i * dlx + j * dly - g).is_zero:
                return x**i * y**j
    raise NoRationalGenerator("monomial search exhausted", descent=g)


def horizontal_generator(conn: LogConnection) -> FFElem:
    """Rational u with u' + a u = 0, i.e. dlog u = -a; rank one and flat."""
    if conn.rank != 1:
        raise ValueError("horizontal generator is a rank-one notion")
    if not p_curvature(conn).is_zero:
        raise NotFlat("nonzero p-curvature admits no horizontal generator")
    return solve_dlog(conn.curve, -conn.scalar())


class DescentClass:
    """Descent datum of a flat rank-one connection.

    Principal classes store the descended divisor and the horizontal
    generator; a missing rational generator leaves a residual form which
    still pins the class on the twisted model.
    """

    __slots__ = ("curve", "principal", "divisor", "generator", "residual")

    def __init__(self, curve, principal, divisor=None, generator=None, residual=None):
        self.curve = curve
        self.principal = principal
        self.divisor = divisor
        self.generator = generator
        self.residual = residual

    def __eq__(self, other):
        if not isinstance(other, DescentClass):
            return NotImplemented
        if other.curve != self.curve or other.principal != self.principal:
            return False
        if self.principal:
            # on the twisted line only the degree survives
            return self.divisor.degree() == other.divisor.degree()
        diff = self.residual - other.residual
        if diff.is_zero:
            return True
        try:
            solve_dlog(self.curve, diff)
            return True
        except NoRationalGenerator:
            return False

    def __repr__(self):
        if self.principal:
            return f"DescentClass(principal, {self.divisor.render()})"
        return "DescentClass(non-principal)"


def frobenius_descent(conn: LogConnection) -> DescentClass:
    """Descend a flat rank-one log connection along Frobenius.

    The descended divisor coefficient at a point is
    (v(u) + frame correction + lifted residue) / p for the horizontal u;
    failure of divisibility is a hard error, a missing rational u a
    non-principal class.
    """
    curve = conn.curve
    if conn.rank != 1:
        raise ValueError("descent implemented for rank one")
    p = curve.p
    if not p_curvature(conn).is_zero:
        raise NotFlat("descent requires a flat connection")
    try:
        u = horizontal_generator(conn)
    except NoRationalGenerator:
        return DescentClass(curve, False, residual=conn.scalar())
    mono = monodromy(conn)
    mono_map = dict(zip(mono.marks, mono.values))
    if curve.ext_degree != 1:
        return DescentClass(curve, True, Divisor(), u)
    r = u.as_ratfunc()
    items = []
    support = set(conn.marks) | set(conn.label.corrections)
    for c in range(p):
        if r.valuation_at(c):
            support.add(c)
    if r.valuation_at_infinity():
        support.add(INF)
    for pt in sorted(support, key=str):
        v = r.valuation_at_infinity() if pt == INF else r.valuation_at(pt)
        total = v + conn.label.correction_at(pt) + (mono_map.get(pt, 0) % p)
        if total % p:
            raise NotDivisibleByP(
                f"descent weight {total} at {pt} is not divisible by {p}",
                branch=pt,
            )
        if total:
            items.append((branch_at(curve, pt, 4), total // p))
    return DescentClass(curve, True, Divisor(items), u)


# ---------------------------------------------------------------------------
# tensor and dual

def tensor(c1: LogConnection, c2: LogConnection) -> LogConnection:
    if c1.curve != c2.curve:
        raise CurveMismatch("tensor over different curves")
    if c1.rank == 1 and c2.rank == 1:
        a = c1.scalar() + c2.scalar()
        return LogConnection(c1.curve, [[a]], c1.label.tensor(c2.label))
    if c1.rank == 1:
        a = c1.scalar()
        m = [
            [c2.entry(i, j) + (a if i == j else 0) for j in range(c2.rank)]
            for i in range(c2.rank)
        ]
        return LogConnection(c1.curve, m, c1.label.tensor(c2.label))
    if c2.rank == 1:
        return tensor(c2, c1)
    raise ValueError("tensor of two higher-rank connections is not needed")


def dual(conn: LogConnection) -> LogConnection:
    m = [
        [-conn.entry(j, i) for j in range(conn.rank)]
        for i in range(conn.rank)
    ]
    return LogConnection(conn.curve, m, conn.label.dual())
