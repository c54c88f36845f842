"""High-precision reference values, computed without the C++ code.

Run: python3 closed_forms.py  (prints C++ constants for tests/oracle_values.hpp)
"""
from mpmath import mp, mpf, acosh, cosh, findroot, tanh, sqrt, pi, diff

mp.dps = 40


def critical_t():
    return findroot(lambda t: t * tanh(t) - 1, mpf("1.2"))


def h0_general(R):
    """Half of the largest axial span c*(acosh(1/c) + acosh(R/c)) over waist radii c in (0, 1]."""
    R = mpf(R)
    span = lambda c: c * (acosh(1 / c) + acosh(R / c))
    c_star = findroot(lambda c: diff(span, c), mpf("0.55"))
    return span(c_star) / 2


def catenoid_c(h):
    """Larger root of c cosh(h/c) = 1 (R = 1, symmetric waist)."""
    return findroot(lambda c: c * cosh(h / c) - 1, mpf("0.9"))


def truncated_sphere_energy(R, h):
    R, h = mpf(R), mpf(h)
    a = 4 * h * h + R * R - 1
    return 4 * pi * a / sqrt(a * a + 16 * h * h)


def emit(name, value):
    print(f"inline constexpr double {name} = {mp.nstr(value, 20)};")


if __name__ == "__main__":
    t = critical_t()
    emit("kCriticalT", t)
    emit("kH0R1", t / cosh(t))
    for R in ("1.5", "2", "4"):
        emit("kH0R" + R.replace(".", "p"), h0_general(R))
    emit("kH0R1ByWaist", h0_general(1))
    c = catenoid_c(mpf("0.4"))
    emit("kCatenoidC04", c)
    # Gauss curvature of the catenoid r = c cosh(z/c), |z| <= h: int K dA = -4 pi tanh(h/c).
    emit("kCatenoidIntK04", -4 * pi * tanh(mpf("0.4") / c))
    emit("kTruncSphere11", truncated_sphere_energy(1, 1))
    emit("kTruncSphere1_100", truncated_sphere_energy(1, 100))
    emit("kTruncSphere1_1em3", truncated_sphere_energy(1, "0.001"))
    emit("kTruncSphere2_1", truncated_sphere_energy(2, 1))
    emit("kTruncSphere1p5_0p5", truncated_sphere_energy("1.5", "0.5"))
