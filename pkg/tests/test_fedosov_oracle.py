"""Independent low-degree expansion of the flat recursion on R^2 with
Omega = nu*b dq^dp, written directly in sympy (no engine code).

It expands r and tau(q), tau(p) through Deg 4 and reads off the antisymmetric
part of C_2.  The resulting factor is frozen as ORACLE_FACTOR and the engine
is compared against it.
"""
import sympy as sp

from deformq.algebra import CoeffFn
from deformq.fedosov import FedosovData, fedosov_star
from deformq.starprod import Chart, deligne_order0

ORACLE_FACTOR = 1

nu, b, yq, yp = sp.symbols("nu b y_q y_p")
MAXDEG = 4


def deg_trunc(expr):
    expr = sp.expand(expr)
    out = 0
    for term in sp.Add.make_args(expr):
        k = sp.degree(term, nu)
        s = sp.Poly(term, yq, yp).total_degree() if term.has(yq, yp) else 0
        if 2 * k + s <= MAXDEG:
            out += term
    return out


def fiber(f, g):
    """exp(nu (d_yq (x) d_yp - d_yp (x) d_yq)), truncated by Deg."""
    total = 0
    for r in range(MAXDEG // 2 + 1):
        acc = 0
        for k in range(r + 1):
            left = sp.diff(f, yq, k, yp, r - k) if r else f
            right = sp.diff(g, yp, k, yq, r - k) if r else g
            acc += sp.binomial(r, k) * (-1) ** (r - k) * left * right
        total += nu ** r / sp.factorial(r) * acc
    return deg_trunc(total)


def homog_delta_inv_1form(a_dq, a_dp):
    """delta^{-1}(a dq + c dp) = (a y_q + c y_p) / (s + 1) per symmetric degree."""
    expr = sp.expand(a_dq * yq + a_dp * yp)
    out = 0
    for term in sp.Add.make_args(expr):
        if term == 0:
            continue
        s = sp.Poly(term, yq, yp).total_degree()
        out += term / s   # after multiplying by y the degree is s = s_old + 1 = s_old + a
    return out


def expand_tau(coord):
    # r = delta^{-1}(nu b dq^dp) = (nu b / 2)(y_q dp - y_p dq); higher terms have Deg >= 5
    r_dq, r_dp = -nu * b * yp / 2, nu * b * yq / 2
    base = sp.Symbol(coord) + (yq if coord == "q" else yp)
    tau = base
    for _ in range(MAXDEG):
        # tau = a + delta^{-1}(d tau - [r, tau] / 2nu); d acts only on the base coordinate
        c_dq = -(fiber(r_dq, tau) - fiber(tau, r_dq)) / (2 * nu)
        c_dp = -(fiber(r_dp, tau) - fiber(tau, r_dp)) / (2 * nu)
        new = base + homog_delta_inv_1form(sp.expand(c_dq), sp.expand(c_dp))
        new = deg_trunc(new)
        if sp.expand(new - tau) == 0:
            break
        tau = new
    return tau


def oracle_factor():
    tq, tp = expand_tau("q"), expand_tau("p")
    # sigma(tau(q) o tau(p)) - sigma(tau(p) o tau(q)), y-free part
    anti = sp.expand(fiber(tq, tp) - fiber(tp, tq)).subs({yq: 0, yp: 0})
    c2 = sp.expand(anti).coeff(nu, 2)          # C2(q,p) - C2(p,q)
    M_qp = c2 / 2
    # P = [[0, 1], [-1, 0]], zeta = P^{-T} M P^{-1}, class = -zeta
    P = sp.Matrix([[0, 1], [-1, 0]])
    M = sp.Matrix([[0, M_qp], [-M_qp, 0]])
    zeta = P.inv().T * M * P.inv()
    cls = -zeta
    return sp.simplify(cls[0, 1] / b)


def test_oracle_value_is_frozen():
    assert oracle_factor() == ORACLE_FACTOR


def test_engine_matches_oracle_factor():
    ch = Chart.standard(1)
    u = ch.universe
    for bval in (1, 3, -2):
        data = FedosovData.for_order(ch, 2, omega={1: {(0, 1): CoeffFn.const(u, bval)}})
        res = fedosov_star(data)
        assert res.report.ok
        form = deligne_order0(res.product)
        # the class is a constant multiple of B = b dq^dp
        assert form.matrix[0][1] == ORACLE_FACTOR * bval
        assert form.matrix[1][0] == -ORACLE_FACTOR * bval
