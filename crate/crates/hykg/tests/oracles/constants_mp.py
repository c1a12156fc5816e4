"""Extended-precision evaluation of the Hylleraas constant cascade.

Independent of the Rust build: every constant is re-typed from its defining
formula and evaluated with 50 significant digits. The printed values are
frozen into tests/constants.rs.

    python3 constants_mp.py
"""
from mpmath import mp, mpf

mp.dps = 50


def cascade(K, k1, k2, om, De, M, mu, E):
    K, k1, k2, om, De, M, mu, E = map(mpf, (K, k1, k2, om, De, M, mu, E))
    a = (K - k2) / (1 + k2)
    b = (K - k1 + k2) / (1 + k1 + k2)
    c = (K - k1) / (1 + k1)
    S = (1 + K) ** 2 * om ** 2
    Eb = E ** 2 - M ** 2
    Vb = 2 * De * (E + M)
    out = {}
    out["ebar"] = Eb
    out["vbar"] = Vb
    out["eps2"] = -2 * mu * (1 + b) * Eb / S
    out["betap2"] = (1 + a) * (1 + c) * Vb / S
    out["gammap2"] = (1 + b) * (1 + a) * (1 + c) * Vb / S
    out["beta2"] = out["eps2"] - out["betap2"]
    out["gamma2"] = out["eps2"] - out["gammap2"]
    out["beta2_direct"] = (2 * mu * (1 + b) * (a + c) * E - (1 + a) * (1 + c) * Vb) / S
    out["gamma2_direct"] = (2 * (1 + b) * E - (1 + a) * (1 + c) * Vb) / S
    al1 = 1 + b
    al2 = 2 * (1 + b) * (a + c)
    al3 = 2 * a * c * (1 + b)
    out["alpha1"], out["alpha2"], out["alpha3"] = al1, al2, al3
    bp = (1 + a) * (1 + c) * Vb / S
    out["xi1"] = 2 * a * (1 + b) ** 2 - bp
    out["xi2"] = a ** 2 * (1 + b) ** 2 - (1 + b) * (1 + a) * (1 + c) * Vb / S
    L1 = 4 * (1 + b) ** 2 * (a ** 2 - 14 * a * c + c ** 2)
    L2 = 4 * a * (1 + b) ** 3 * (2 * a - c + 1) - 2 * (1 + a) * (1 + b) * (1 + c) * (4 * b - 3) * Vb / S
    L3 = 4 * (1 + b) * (a + c - 2 * a * c - 2)
    L4 = bp * (b * (1 + b) ** 2 + bp)
    out["lam1"], out["lam2"], out["lam3"], out["lam4"] = L1, L2, L3, L4
    d2 = L3 ** 2 + 12 * L1
    out["delta2"] = d2
    dA = 64 * (1 + b) ** 2 * (a * (1 - c) - a * (8 * c + 1) + c ** 2 * (1 - a) + a + 4)
    out["delta_explicit"] = dA
    Q = a ** 2 - a ** 2 * c - 8 * a * c - a + 4 - a * c ** 2 - c + c ** 2
    den = 1024 * (1 + b) ** 2 * Q ** 2
    P1 = 16 * a ** 3 + 12 * a ** 2 * c - a ** 2 * c ** 2 - 63 * a ** 2 * c + 8 * a ** 2 - 12 * a * c + 16 * a * c ** 2 + 8 * c ** 2
    P2 = 16 * a ** 2 + 4 * b * c - a * c ** 2 - 64 * a * c + 16 * c ** 2
    A = (2 * (1 + b) ** 2 * P1 - (1 + a) * (1 + c) / S * P2 * Vb) / den
    B = (a * (1 + b) ** 4 * (2 * a - c + 1)
         - 2 * (1 + b) ** 2 * (1 + c) * Vb / S * (2 * a ** 2 * b + 2 * b * c ** 2 - 28 * a * b * c + 4 * a * b - 3 * a)
         + bp ** 2 * (16 * b ** 2 - 4 * a ** 2 * c ** 2 - 56 * a * c + a - 24 * b)) / den
    out["a_const"], out["b_const"] = A, B
    out["u2"] = (dA * (out["eps2"] + A)) ** 2
    out["v2"] = A ** 2 - B
    out["a_from_lambda"] = (2 * L2 * al3 + 16 * L1 * al1 ** 2 + 16 * L1 * out["xi1"]) / d2
    out["b_from_lambda"] = (L2 ** 2 - 4 * L1 * L4) / d2
    return out


if __name__ == "__main__":
    for label, args in [
        ("DEFAULT_E05", (2, 1, 1, 0.25, 1, 1, 1, 0.5)),
        ("WELL_E_MINUS03", (-0.3, 0.3, -0.3, 0.25, 1, 1, 1, -0.3)),
    ]:
        print(f"// {label}: K,k1,k2,omega,D_e,M,mu,E = {args}")
        for k, v in cascade(*args).items():
            print(f'    ("{k}", {mp.nstr(v, 20, min_fixed=-1, max_fixed=-1)}),')
