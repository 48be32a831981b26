"""Independent high-precision oracle for the orifice two-port.

Eliminates C and D symbolically from the four interface conservation rows
and evaluates the Blackstock wavenumber with mpmath. Values printed here
are frozen into tests/test_tmm_leak.cpp and tests/acceptance.cpp.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 50

# Standard 20 C air.
C0, RHO0, MU, GAMMA, PR = mp.mpf(343), mp.mpf("1.204"), mp.mpf("1.825e-5"), mp.mpf("1.4"), mp.mpf("0.71")
BORE = mp.mpf("0.0254")


def blackstock(r, f, mu=MU):
    w = 2 * mp.pi * f
    return (w / C0) * (1 + (1 - 1j) / r * mp.sqrt(mu / (2 * RHO0 * w)) * (1 + (GAMMA - 1) / mp.sqrt(PR)))


def symbolic_transmission():
    B, C, D, E, S1, S2, S3, z = sp.symbols("B C D E S1 S2 S3 z")  # z = exp(-i k Leff)
    A = 1
    eqs = [
        A + B - C - D,
        S1 * A - S1 * B - S2 * C + S2 * D,
        C * z + D / z - E * z,
        S2 * C * z - S2 * D / z - S3 * E * z,
    ]
    sol = sp.solve(eqs, [B, C, D, E], dict=True)[0]
    return sp.simplify(sol[B]), sp.simplify(sol[E]), (S1, S2, S3, z)


def closed_form_inv_tau(sigma, kl):
    return mp.cos(kl) ** 2 + mp.mpf(1) / 4 * (sigma + 1 / sigma) ** 2 * mp.sin(kl) ** 2


if __name__ == "__main__":
    Bexpr, Eexpr, (S1, S2, S3, z) = symbolic_transmission()
    print("E/A =", Eexpr)
    # Symbolic check: S1 = S3, z on the unit circle -> |E|^2 equals closed form.
    s, th = sp.symbols("s th", positive=True)
    Ez = Eexpr.subs({S1: 1, S3: 1, S2: s, z: sp.exp(-sp.I * th)})
    mag2 = sp.simplify(sp.expand_complex(Ez * sp.conjugate(Ez)))
    target = 1 / (sp.cos(th) ** 2 + sp.Rational(1, 4) * (s + 1 / s) ** 2 * sp.sin(th) ** 2)
    print("closed form residual:", sp.simplify(sp.trigsimp(mag2 - target)))

    D = BORE
    r1 = mp.mpf("0.071") * D / 2
    L = mp.mpf("0.125") * D
    leff = L + mp.mpf("0.821") * r1
    print("plate1 Leff [m] =", mp.nstr(leff, 17))
    k = 2 * mp.pi * 2000 / C0
    inv_tau = closed_form_inv_tau(mp.mpf("0.005"), k * leff)
    print("sigma=0.005 f=2k Leff=plate1: 1/tau =", mp.nstr(inv_tau, 17), "TL =", mp.nstr(10 * mp.log10(inv_tau), 17))
    inv_tau = closed_form_inv_tau(mp.mpf("0.005"), k * mp.mpf("0.003915"))
    print("sigma=0.005 f=2k Leff=3.915mm: 1/tau =", mp.nstr(inv_tau, 17), "TL =", mp.nstr(10 * mp.log10(inv_tau), 17))

    kb = blackstock(mp.mpf("1e-3"), 1000)
    print("blackstock r=1mm f=1k: re =", mp.nstr(kb.real, 17), "im =", mp.nstr(kb.imag, 17))

    # Viscous vs inviscid through the numeric E/A expression (coupling matrix, viscous k).
    Ef = sp.lambdify((S1, S2, S3, z), Eexpr, "mpmath")
    Bf = sp.lambdify((S1, S2, S3, z), Bexpr, "mpmath")
    sigmas = {"0.005": "0.071", "0.01": "0.100", "0.05": "0.224", "0.1": "0.316", "1": "1.0"}
    print("plate TL sweep (viscous, S1=S3=bore area)")
    for sig, dratio in sigmas.items():
        d = mp.mpf(dratio) * D
        r = d / 2
        sarea = mp.pi * r ** 2
        stube = mp.pi * (D / 2) ** 2
        le = L + mp.mpf("0.821") * r
        row = []
        for f in (1000, 2000, 3000, 4000, 5000):
            kv = blackstock(r, f)
            ki = 2 * mp.pi * f / C0
            ev = Ef(stube, sarea, stube, mp.exp(-1j * kv * le))
            bv = Bf(stube, sarea, stube, mp.exp(-1j * kv * le))
            ei = Ef(stube, sarea, stube, mp.exp(-1j * ki * le))
            tlv = -10 * mp.log10(abs(ev) ** 2)
            tli = -10 * mp.log10(abs(ei) ** 2)
            alpha = 1 - abs(bv) ** 2 - abs(ev) ** 2
            row.append(f"{f}: TLv={mp.nstr(tlv, 8)} TLi={mp.nstr(tli, 8)} a={mp.nstr(alpha, 5)}")
        print(sig, "|", "; ".join(row))
