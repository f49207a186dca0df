#!/usr/bin/env python3
"""Independent arbitrary-precision oracle for the Doppler-cooling physics tests.

Evaluates the rate-balance model with mpmath (50 digits) using routes that are
independent of the C++ implementation: the equilibrium temperature is found by
numeric root finding on the cooling/heating rate sum instead of the closed-form
solution used by the library. Run this script and paste the printed constants
into the test sources; the frozen values are annotated with the emitting line.
"""

import mpmath as mp

mp.mp.dps = 50

# Physical constants (CODATA 2018 exact/recommended, same values the library uses)
HBAR = mp.mpf("1.054571817e-34")   # J s
KB = mp.mpf("1.380649e-23")        # J/K (exact)
AMU = mp.mpf("1.66053906660e-27")  # kg

# Ytterbium-174 cooling configuration used throughout the tests
MASS = 174 * AMU
GAMMA = 2 * mp.pi * mp.mpf("19.6e6")        # rad/s
WAVELENGTH = mp.mpf("370e-9")               # m
TRAP_OMEGA = 2 * mp.pi * mp.mpf("205e3")    # rad/s
ALPHA = 71 * mp.pi / 180                    # rad
XI = mp.mpf(1) / 3

K = 2 * mp.pi / WAVELENGTH
K_EFF = K * mp.cos(ALPHA)


def rho_ee(rabi, detuning):
    return rabi**2 / (4 * detuning**2 + GAMMA**2 + 2 * rabi**2)


def cooling_power(temp, rabi, detuning):
    # Sign fixed so red detuning cools; cancelled form is finite at rabi -> 0
    r = rho_ee(rabi, detuning)
    return 8 * HBAR * K_EFF**2 * detuning * GAMMA * (KB * temp / MASS) * r**2 / rabi**2


def heating_power(rabi, detuning, zeta_per_s):
    r = rho_ee(rabi, detuning)
    recoil = r * GAMMA / (2 * MASS) * (HBAR**2 * K_EFF**2 + XI * HBAR**2 * K**2)
    return recoil + zeta_per_s * HBAR * TRAP_OMEGA


def equilibrium_temperature(rabi, detuning, zeta_per_s):
    f = lambda t: cooling_power(t, rabi, detuning) + heating_power(rabi, detuning, zeta_per_s)
    return mp.findroot(f, mp.mpf("1e-3"))


def nbar_from_temp(t):
    return KB * t / (HBAR * TRAP_OMEGA)


def sigma_from_nbar(nbar):
    return mp.sqrt(HBAR * (2 * nbar + 1) / (2 * MASS * TRAP_OMEGA))


def show(label, value):
    print(f"{label} = {mp.nstr(value, 17)}")


def main():
    omega_ref = mp.mpf("0.23") * GAMMA
    delta_ref = -2 * mp.pi * mp.mpf("13e6")
    zeta_ref = mp.mpf("380")  # quanta/s (0.38 quanta/ms)

    show("rho_ee(0.23G, -2pi 13MHz)", rho_ee(omega_ref, delta_ref))
    show("cooling_power(T=1mK, 0.23G, -2pi 13MHz) [W]",
         cooling_power(mp.mpf("1e-3"), omega_ref, delta_ref))
    show("heating_power(O=0, zeta=380/s) [W]", heating_power(0, delta_ref, zeta_ref))

    teq = equilibrium_temperature(omega_ref, delta_ref, zeta_ref)
    show("T_eq(0.23G, -2pi 13MHz, 0.38 q/ms) [K]", teq)
    residual = cooling_power(teq, omega_ref, delta_ref) + heating_power(omega_ref, delta_ref, zeta_ref)
    show("  balance residual [W]", residual)

    # Small-drive analytic limit; compare against equilibrium at tiny rabi, zeta = 0
    limit = HBAR * (4 * delta_ref**2 + GAMMA**2) * (1 + XI / mp.cos(ALPHA) ** 2) / (16 * abs(delta_ref) * KB)
    show("T(rabi->0, zeta=0) analytic [K]", limit)
    show("T_eq(1e-6 G, zeta=0) [K]", equilibrium_temperature(mp.mpf("1e-6") * GAMMA, delta_ref, 0))

    show("doppler_limit(2pi 19.6MHz) [K]", HBAR * GAMMA / (2 * KB))

    # Thermal state chain for the reference occupation
    t97 = 97 * HBAR * TRAP_OMEGA / KB
    show("T(nbar=97) [K]", t97)
    show("sigma_i(nbar=97) [m]", sigma_from_nbar(97))
    show("sigma_i(nbar=0) [m]", sigma_from_nbar(0))

    # Composite width at the reference imaging configuration
    sigma_psf = mp.mpf("6.6e-6")
    mag = 113
    sig_i = mp.mpf("0.166e-6")
    show("composite(0.166um, M=113, psf=6.6um) [m]", mp.sqrt(sigma_psf**2 + (mag * sig_i) ** 2))

    # Magnification from the displacement pairs
    def ratio_with_err(img, dimg, obj, dobj):
        m = img / obj
        dm = m * mp.sqrt((dimg / img) ** 2 + (dobj / obj) ** 2)
        return m, dm

    mx, dmx = ratio_with_err(mp.mpf("74.6e-6"), mp.mpf("1.8e-6"), mp.mpf("635e-9"), mp.mpf("2e-9"))
    my, dmy = ratio_with_err(mp.mpf("72.5e-6"), mp.mpf("1.8e-6"), mp.mpf("665e-9"), mp.mpf("2e-9"))
    show("Mx", mx)
    show("dMx", dmx)
    show("My", my)
    show("dMy", dmy)
    m = mp.sqrt((mx**2 + my**2) / 2)
    dm = mp.sqrt((mx * dmx) ** 2 + (my * dmy) ** 2) / (2 * m)
    show("M", m)
    show("dM", dm)

    # On-resonance Rabi frequency from the correlation fit
    show("sqrt(439^2-61.6^2) [1/us]", mp.sqrt(mp.mpf("439") ** 2 - mp.mpf("61.6") ** 2))
    show("sqrt(439^2-(G/2 us)^2) [1/us]", mp.sqrt(mp.mpf("439") ** 2 - (GAMMA / 2 / mp.mpf("1e6")) ** 2))

    # Equilibrium temperatures over the scan grids used by the round-trip tests
    print("\n# rabi scan, fixed delta = -2pi 13 MHz, zeta = 0.38 q/ms")
    for f in ["0.012", "0.025", "0.23", "1.1", "2.4", "3.3"]:
        t = equilibrium_temperature(mp.mpf(f) * GAMMA, delta_ref, zeta_ref)
        sig = sigma_from_nbar(nbar_from_temp(t))
        print(f"  omega={f} G: T={mp.nstr(t, 12)} K  sigma_i={mp.nstr(sig, 12)} m")

    print("\n# detuning scan, fixed omega = 0.2 G, zeta = 0.22 q/ms")
    for mhz in [26, 23, 20, 17, 14, 11, 8, 5]:
        t = equilibrium_temperature(mp.mpf("0.2") * GAMMA, -2 * mp.pi * mhz * mp.mpf("1e6"), mp.mpf("220"))
        sig = sigma_from_nbar(nbar_from_temp(t))
        print(f"  delta=-{mhz} MHz: T={mp.nstr(t, 12)} K  sigma_i={mp.nstr(sig, 12)} m")

    # Width/temperature error propagation at the reference point and the
    # temperature at which the relative error reaches 50%
    dm_psf = mp.mpf("2.7e-6")
    dmag = 2

    def temp_and_err(sig_i, dsig_cam):
        sig_cam = mp.sqrt(sigma_psf**2 + (mag * sig_i) ** 2)
        r = mag * sig_i
        t = (MASS * TRAP_OMEGA**2 * sig_i**2 - HBAR * TRAP_OMEGA / 2) / KB
        dsig_i = mp.sqrt((sig_cam * dsig_cam / (mag * r)) ** 2
                         + (sigma_psf * dm_psf / (mag * r)) ** 2
                         + (sig_i * dmag / mag) ** 2)
        dt = 2 * MASS * TRAP_OMEGA**2 * sig_i * dsig_i / KB
        return t, dt

    t0, dt0 = temp_and_err(mp.mpf("0.166e-6"), mp.mpf("1.0e-6"))
    show("T(sigma_i=0.166um) [K]", t0)
    show("dT(dsig=1.0um, dpsf=2.7um, dM=2) [K]", dt0)

    lo, hi = mp.mpf("1e-6"), mp.mpf("1e-2")
    for _ in range(200):
        mid = mp.sqrt(lo * hi)
        nbar = KB * mid / (HBAR * TRAP_OMEGA)
        t, dt = temp_and_err(sigma_from_nbar(nbar), 0)
        if dt / t > mp.mpf("0.5"):
            lo = mid
        else:
            hi = mid
    show("T at 50% relative error (dsig=0) [K]", mp.sqrt(lo * hi))


if __name__ == "__main__":
    main()
