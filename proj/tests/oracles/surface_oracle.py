"""Principal curvatures of radial graphs in R^3 from the parametric surface.

Independent of the warped-product formulas: builds P = rho(psi, theta) * omega
in Cartesian coordinates and uses the classical first/second fundamental forms.
"""
import sympy as sp

p, t = sp.symbols("psi theta", real=True)
omega = sp.Matrix([sp.sin(p) * sp.cos(t), sp.sin(p) * sp.sin(t), sp.cos(p)])


def curvatures(rho, psi_val, theta_val):
    P = rho * omega
    Pp, Pt = P.diff(p), P.diff(t)
    # P_psi x P_theta is outward; h is measured against the inward direction so
    # that round spheres have positive curvature
    N = -Pp.cross(Pt)
    N = N / sp.sqrt(N.dot(N))
    E, F, G = Pp.dot(Pp), Pp.dot(Pt), Pt.dot(Pt)
    L, M, Nn = P.diff(p, 2).dot(N), P.diff(p, t).dot(N), P.diff(t, 2).dot(N)
    sub = {p: psi_val, t: theta_val}
    E, F, G, L, M, Nn = [sp.N(x.subs(sub), 30) for x in (E, F, G, L, M, Nn)]
    det = E * G - F * F
    H = (G * L - 2 * F * M + E * Nn) / det
    K = (L * Nn - M * M) / det
    disc = sp.sqrt(H * H / 4 - K)
    return H / 2 + disc, H / 2 - disc, H, K


if __name__ == "__main__":
    rho = 2 + sp.Rational(3, 10) * sp.cos(p) ** 2
    for i in (0, 10, 32):
        psi_val = (i + sp.Rational(1, 2)) * sp.pi / 64
        k1, k2, H, K = curvatures(rho, psi_val, 0)
        print(f"axisym i={i}: kappa1={k1:.17e} kappa2={k2:.17e}")
    x, y, z = omega
    rho = 1 + sp.Rational(8, 100) * x + sp.Rational(5, 100) * z ** 3 + sp.Rational(6, 100) * x * y
    for i, j in ((0, 0), (13, 40), (40, 77)):
        k1, k2, H, K = curvatures(rho, (i + sp.Rational(1, 2)) * sp.pi / 64, 2 * sp.pi * j / 128)
        print(f"general ({i},{j}): H={H:.17e} sigma2={K:.17e}")
