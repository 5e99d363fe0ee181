"""Cartier operator, exactness of differentials, and pre-Tango tests.

Everything runs through the p-basis decomposition h = sum h_i^p x^i of a
function against the separating coordinate: the Cartier image of h dx is
h_{p-1} dx, and vanishing of that single component is exactness on the
chart.  The same decomposition hands back an antiderivative for free.
"""
from __future__ import annotations

from .errors import (
    CandidateIsPthPower,
    CurveMismatch,
    InsufficientPrecision,
    NoRationalGenerator,
    NotExactOnChart,
    NotFlat,
    NotOmegaBundle,
    NotPreTango,
    ReconstructionFailure,
    UndeclaredPoleDetected,
)
from .field import RatFunc, TruncSeries, UPoly
from .curves import (
    INF,
    Differential,
    FFElem,
    branch_at,
    raynaud_p_inf,
)
from .connections import (
    BundleLabel,
    LogConnection,
    omega_frame_differential,
    p_curvature,
    solve_dlog,
)

OMEGA_FRAMES = ("omega_log", "omega_ell", "ray_omega")


def _split_ratfunc(r: RatFunc):
    """s_0..s_{p-1} with r = sum s_i^p x^i; clears the denominator first."""
    field = r.field
    p = field.p
    spread = r.num * r.den ** (p - 1)
    return [RatFunc(field, part, r.den) for part in spread.frobenius_split()]


class CartierOutput:
    """p-basis components of a differential h dx.

    components[i] is h_i in h = sum h_i^p x^i; the Cartier image is
    components[p-1] dx and the others integrate termwise.
    """

    __slots__ = ("curve", "source", "components")

    def __init__(self, curve, source: Differential, components):
        self.curve = curve
        self.source = source
        self.components = tuple(components)

    @property
    def image(self) -> Differential:
        return Differential(self.curve, self.components[self.curve.p - 1])

    @property
    def is_exact(self) -> bool:
        return self.components[self.curve.p - 1].is_zero

    def antiderivative(self) -> FFElem:
        """f with df equal to the source; exact charts only."""
        if not self.is_exact:
            raise NotExactOnChart(
                "nonzero Cartier image; the differential is not exact"
            )
        curve = self.curve
        x = curve.x_elem()
        acc = curve.ff_const(0)
        for i, h in enumerate(self.components[: curve.p - 1]):
            if not h.is_zero:
                c = curve.field.inv(i + 1)
                acc = acc + h.pth_power() * x ** (i + 1) * c
        return acc

    def __repr__(self):
        tag = "exact" if self.is_exact else "inexact"
        return f"CartierOutput({tag})"


def _recombine_check(curve, components, h):
    x = curve.x_elem()
    acc = curve.ff_const(0)
    for i, hi in enumerate(components):
        if not hi.is_zero:
            acc = acc + hi.pth_power() * x**i
    if acc != h:
        raise ReconstructionFailure("p-basis decomposition does not recombine")


def cartier_p1(omega: Differential) -> CartierOutput:
    """Cartier data of a rational differential on the line."""
    curve = omega.curve
    if curve.ext_degree != 1:
        raise CurveMismatch("rational-function route needs the line")
    comps = [FFElem(curve, (s,)) for s in _split_ratfunc(omega.h.as_ratfunc())]
    _recombine_check(curve, comps, omega.h)
    return CartierOutput(curve, omega, comps)


def cartier_curve(omega: Differential) -> CartierOutput:
    """Cartier data of h dx on any supported curve.

    Writes h over the basis (y^p)^j with coefficients in F_p(x), splits each
    coefficient against the p-basis {1, x, .., x^(p-1)}, and reassembles the
    h_i inside the function field.
    """
    curve = omega.curve
    if curve.ext_degree == 1:
        return cartier_p1(omega)
    p = curve.p
    cols = [_split_ratfunc(s) for s in omega.h.to_zbasis()]
    comps = [
        FFElem(curve, [cols[j][i] for j in range(curve.ext_degree)])
        for i in range(p)
    ]
    _recombine_check(curve, comps, omega.h)
    return CartierOutput(curve, omega, comps)


def exact_antiderivative(omega: Differential) -> FFElem:
    return cartier_curve(omega).antiderivative()


def cartier_series(s: TruncSeries, p: int) -> TruncSeries:
    """Local rule on the dt-coefficient: keep exponents -1 mod p.

    C(a t^(kp-1) dt) = a t^(k-1) dt for prime-field coefficients; everything
    else dies.  Output precision is the floor of the input's over p.
    """
    prec = s.prec if s.prec == float("inf") else s.prec // p
    picked = {}
    for i, c in enumerate(s.coeffs):
        n = s.ord_low + i
        if c and (n + 1) % p == 0:
            picked[(n + 1) // p - 1] = c
    if not picked:
        return TruncSeries.zero(s.field, s.center, prec)
    lo = min(picked)
    out = [picked.get(m, 0) for m in range(lo, max(picked) + 1)]
    return TruncSeries(s.field, s.center, lo, out, prec)


# ---------------------------------------------------------------------------
# pre-Tango structures

def _require_omega(label: BundleLabel) -> None:
    if label.name not in OMEGA_FRAMES:
        raise NotOmegaBundle(f"{label.name} does not frame the differentials")


def is_pre_tango(conn: LogConnection) -> bool:
    """Whether the horizontal differentials of a flat connection on the
    omega bundle are locally exact.

    With a rational horizontal generator u this is one global Cartier
    vanishing C(u eta) = 0.  Without one the same condition is certified
    formally at a distinguished place; see _formal_pre_tango.
    """
    if conn.rank != 1:
        raise ValueError("pre-Tango test is a rank-one notion")
    _require_omega(conn.label)
    if not p_curvature(conn).is_zero:
        raise NotFlat("pre-Tango structures are flat")
    eta = omega_frame_differential(conn.label)
    try:
        u = solve_dlog(conn.curve, -conn.scalar())
    except NoRationalGenerator:
        return _formal_pre_tango(conn, eta)
    return cartier_curve(eta.scale(u)).is_exact


def tango_from_pretango(conn: LogConnection) -> FFElem:
    """Rational f with df spanning the horizontal line of a pre-Tango
    structure; needs a rational horizontal generator."""
    _require_omega(conn.label)
    if not p_curvature(conn).is_zero:
        raise NotFlat("pre-Tango structures are flat")
    eta = omega_frame_differential(conn.label)
    u = solve_dlog(conn.curve, -conn.scalar())
    out = cartier_curve(eta.scale(u))
    if not out.is_exact:
        raise NotPreTango("horizontal differential has a Cartier obstruction")
    return out.antiderivative()


def pretango_from_tango(label: BundleLabel, f: FFElem) -> LogConnection:
    """The connection on the omega bundle whose horizontal line is df."""
    _require_omega(label)
    curve = label.curve
    if not isinstance(f, FFElem):
        f = FFElem(curve, (f,))
    df = f.derivative()
    if df.is_zero:
        raise CandidateIsPthPower("df = 0, the candidate is a p-th power")
    u = df / omega_frame_differential(label).h
    return LogConnection(curve, [[-u.dlog()]], label)


def _formal_pre_tango(conn: LogConnection, eta: Differential) -> bool:
    """Exactness certificate at one place, valid to a divisor-degree bound.

    The Cartier operator restricted to the horizontal line subsheaf B is
    p-semilinear, hence descends to a linear map of line bundles on the
    Frobenius twist; a formal solution checked past the degree of the
    target bundle (padded by the possible vanishing orders of horizontal
    sections) decides global vanishing.  At genus 1 without marks both
    bundles have degree 0 and a small pad past the residue shift is
    already conclusive.
    """
    curve = conn.curve
    field = curve.field
    p = curve.p
    g = curve.genus()
    r = len(getattr(curve, "marks", ()))
    if curve.model == "ell":
        dstar = 2 * p
    else:
        dstar = 2 * g - 2 + p * ((r + 3) * (p - 1) + 2)
    need = p * (dstar + 4)
    if curve.model == "raynaud":
        br = raynaud_p_inf(curve, need + 3 * p)
    else:
        br = branch_at(curve, INF, need + 3 * p)
    alpha = br.expand(Differential(curve, conn.scalar()))
    eta_t = br.expand(eta)
    if not alpha.is_zero_to_prec and alpha.valuation() < -1:
        raise UndeclaredPoleDetected(
            "certificate place carries a pole beyond log order"
        )
    k = 0
    if not alpha.is_zero_to_prec and alpha.valuation() == -1:
        k = (-alpha.coeff(-1)) % p
    # u = t^k v with v regular solving v' = (k/t - alpha) v
    span = min(need, alpha.prec if alpha.prec != float("inf") else need)
    span = int(span)
    beta = [(-alpha.coeff(n)) % p for n in range(span)]
    v = [1] + [0] * (span - 1)
    for n in range(1, span):
        s = sum(beta[n - 1 - i] * v[i] for i in range(n)) % p
        if n % p == 0:
            if s:
                raise NotFlat("resonant local obstruction to a horizontal section")
            v[n] = 0
        else:
            v[n] = s * field.inv(n) % p
    useries = TruncSeries(field, br.key, k, v, k + span)
    image = cartier_series(useries * eta_t, p)
    if not image.is_zero_to_prec:
        return False
    if image.prec != float("inf") and image.prec <= dstar:
        raise InsufficientPrecision(
            f"certificate stops at O(t^{image.prec}), bound needs {dstar}"
        )
    return True
