"""Generate Gauss rules for the weight log(1/t) on (0,1) via the Chebyshev
algorithm on exact moments m_k = 1/(k+1)^2, plus Gauss-Legendre on (0,1).

Outputs C++ table source to stdout when run with --cpp, otherwise prints
validation diagnostics.  High-precision via mpmath.
"""
import sys
import mpmath as mp

mp.mp.dps = 120


def chebyshev_recurrence(moments, n):
    """Return alpha[0..n-1], beta[0..n-1] Jacobi recurrence coefficients from
    modified-moment-free Chebyshev algorithm (plain moments, high precision)."""
    N = 2 * n
    sigma = [[mp.mpf(0)] * (N + 1) for _ in range(n + 1)]
    alpha = [mp.mpf(0)] * n
    beta = [mp.mpf(0)] * n
    for l in range(N):
        sigma[0][l] = moments[l]
    alpha[0] = moments[1] / moments[0]
    beta[0] = moments[0]
    for k in range(1, n):
        for l in range(k, N - k):
            sigma[k][l] = (sigma[k - 1][l + 1]
                           - alpha[k - 1] * sigma[k - 1][l]
                           - (beta[k - 1] * sigma[k - 2][l] if k >= 2 else 0))
        alpha[k] = (sigma[k][k + 1] / sigma[k][k]
                    - sigma[k - 1][k] / sigma[k - 1][k - 1])
        beta[k] = sigma[k][k] / sigma[k - 1][k - 1]
    return alpha, beta


def gauss_from_recurrence(alpha, beta):
    """Golub-Welsch: nodes/weights from the symmetric tridiagonal Jacobi matrix."""
    n = len(alpha)
    J = mp.zeros(n)
    for i in range(n):
        J[i, i] = alpha[i]
    for i in range(n - 1):
        b = mp.sqrt(beta[i + 1])
        J[i, i + 1] = b
        J[i + 1, i] = b
    E, Q = mp.eigsy(J)
    nodes = [E[i] for i in range(n)]
    weights = [beta[0] * Q[0, i] ** 2 for i in range(n)]
    order = sorted(range(n), key=lambda i: nodes[i])
    return [nodes[i] for i in order], [weights[i] for i in order]


def gauss_log(n):
    moments = [mp.mpf(1) / (k + 1) ** 2 for k in range(2 * n)]
    a, b = chebyshev_recurrence(moments, n)
    return gauss_from_recurrence(a, b)


def gauss_legendre01(n):
    moments = [mp.mpf(1) / (k + 1) for k in range(2 * n)]
    a, b = chebyshev_recurrence(moments, n)
    return gauss_from_recurrence(a, b)


def validate():
    for n in (2, 4, 6, 8, 12, 16):
        x, w = gauss_log(n)
        # exact for p(t) of degree <= 2n-1 against weight log(1/t)
        errs = []
        for k in range(2 * n):
            approx = mp.fsum(w[i] * x[i] ** k for i in range(n))
            errs.append(abs(approx - mp.mpf(1) / (k + 1) ** 2))
        # a non-polynomial check: int_0^1 log(1/t) cos(t) dt = 1 - Ci(1)... compute numerically
        ref = mp.quad(lambda t: mp.log(1 / t) * mp.cos(t), [0, 1])
        approx = mp.fsum(w[i] * mp.cos(x[i]) for i in range(n))
        print(f"gauss-log n={n}: max moment err {max(errs)}, cos-test err {abs(approx-ref)}")
        assert all(wi > 0 for wi in w)
    for n in (2, 6, 10, 16, 20):
        x, w = gauss_legendre01(n)
        errs = [abs(mp.fsum(w[i] * x[i] ** k for i in range(n)) - mp.mpf(1) / (k + 1))
                for k in range(2 * n)]
        print(f"gauss-legendre n={n}: max moment err {max(errs)}")
        assert all(wi > 0 for wi in w)
    # reference values used by quadrature tests
    print("int_0^1 int_0^1 log|s-t| ds dt =", mp.quad(
        lambda s: mp.quad(lambda t: mp.log(abs(s - t)) if s != t else 0, [0, s, 1]), [0, 1]))


def emit_cpp():
    print("// Auto-generated Gauss tables (log(1/t) weight on (0,1) and Legendre on (0,1)).")
    print("// Moments of log(1/t): 1/(k+1)^2; computed at 120-digit precision.")
    print("#include \"stokesbem/tables.hpp\"\n")
    print("namespace stokesbem::tables {\n")
    def emit(name, gen, orders):
        print(f"const GaussTable {name}[] = {{")
        for n in orders:
            x, w = gen(n)
            xs = ", ".join(mp.nstr(v, 19) for v in x)
            ws = ", ".join(mp.nstr(v, 19) for v in w)
            print(f"  {{{n}, {{{xs}}}, {{{ws}}}}},")
        print("};")
        print(f"const int {name}_count = {len(orders)};\n")
    emit("kGaussLog01", gauss_log, list(range(2, 17)))
    emit("kGaussLegendre01", gauss_legendre01, list(range(1, 21)))
    print("}  // namespace stokesbem::tables")


if __name__ == "__main__":
    if "--cpp" in sys.argv:
        emit_cpp()
    else:
        validate()
