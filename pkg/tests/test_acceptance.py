"""End-to-end acceptance checks, one per criterion, with runtime budgets.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed in the terminal summary. ``python
tests/test_acceptance.py`` prints the same lines without pytest.
"""

import time

import numpy as np
import pytest

from isocloak.cell import (
    PeriodicProfile,
    chi1_closed_form,
    convergence_table,
    sine_profile,
    sine_profile_corrector,
    solve_cell_1d,
)
from isocloak.laminate import solve_phase_pair
from isocloak.measure import (
    ExperimentConfig,
    annulus_field_gap,
    distance,
    fitted_slope,
    spectrum,
    sweep,
)
from isocloak.params import RECIPROCAL, CloakGeometry, HiddenObject, Segment, RadialTensor
from isocloak.params import pushforward_identity_medium, vacuum_medium
from isocloak.radial import TE, TM, Mode, ModeState, dtn_spectrum, propagate_analytic
from isocloak.radial import propagate_ode, regular_seed
from isocloak.special import L_MAX, riccati_bessel

RESULTS = []


class Check:
    """Outcome of one criterion: pass flag, measured values, runtime."""

    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.details = []
        self.ok = True
        self._t0 = time.perf_counter()

    def expect(self, condition, detail):
        self.ok &= bool(condition)
        self.details.append(("" if condition else "!! ") + detail)

    def finish(self):
        self.runtime = time.perf_counter() - self._t0
        self.expect(self.runtime < self.budget,
                    f"runtime {self.runtime:.2f}s < {self.budget:g}s")
        line = (f"[{'PASS' if self.ok else 'FAIL'}] criterion {self.number}: {self.title} | "
                + "; ".join(self.details))
        RESULTS.append(line)
        return self


def criterion_1():
    c = Check(1, "laminate mean identities", 1.0)
    worst = 0.0
    for rho in (0.4, 0.25, 0.1, 0.05):
        geom = CloakGeometry(rho)
        for s in np.linspace(1.0, 2.0, 200):
            pair = solve_phase_pair(s, geom)
            am = 1.0 / geom.b
            hm = (s - geom.a) ** 2 / (geom.b * s**2)
            worst = max(worst, abs(pair.arithmetic - am) / am, abs(pair.harmonic - hm) / hm)
    c.expect(worst < 1e-12, f"max relative mean error {worst:.2e} < 1e-12")
    return c.finish()


def criterion_2():
    c = Check(2, "cell problem vs closed form", 5.0)
    rows = convergence_table(sine_profile, sine_profile_corrector,
                             sizes=[2**k for k in range(7, 13)])
    orders = [r[2] for r in rows[1:]]
    c.expect(min(orders) >= 1.9, f"smooth orders {min(orders):.3f}..{max(orders):.3f} >= 1.9")
    worst = 0.0
    for rho in (0.4, 0.25, 0.05):
        for s in (1.1, 1.5, 1.9):
            pair = solve_phase_pair(s, CloakGeometry(rho))
            for n in (8, 64, 512, 4096):
                prof = PeriodicProfile.two_phase(pair.alpha, pair.beta, n)
                sol = solve_cell_1d(prof)
                worst = max(worst, np.max(np.abs(sol.dchi - chi1_closed_form(prof))))
    c.expect(worst < 1e-12, f"two-phase aligned max error {worst:.2e} < 1e-12")
    return c.finish()


def criterion_3():
    c = Check(3, "Riccati-Bessel Wronskian and recurrence", 5.0)
    mods = np.geomspace(0.1, 100.0, 40)
    args = np.linspace(0.0, np.pi / 2, 17)
    z = np.array([m * np.exp(1j * a) for m in mods for a in args])
    z = z[np.abs(z.imag) <= 50.0]
    p, dp, x, dx = riccati_bessel(L_MAX, z)
    wr = np.max(np.abs(p * dx - dp * x - 1j))
    ls = np.arange(1, L_MAX)
    zz = z[:, None]
    lhs, rhs = p[:, ls - 1] + p[:, ls + 1], (2 * ls + 1) / zz * p[:, ls]
    rec = np.max(np.abs(lhs - rhs) / np.maximum(np.abs(lhs), np.abs(rhs)))
    ls = np.arange(1, L_MAX + 1)
    der = p[:, ls - 1] - ls / zz * p[:, ls]
    drel = np.max(np.abs(dp[:, ls] - der) / np.maximum(np.abs(dp[:, ls]), np.abs(der)))
    c.expect(wr < 1e-10, f"Wronskian defect {wr:.2e}")
    c.expect(rec < 1e-10, f"recurrence defect {rec:.2e}")
    c.expect(drel < 1e-10, f"derivative identity defect {drel:.2e} (grid {z.size} points)")
    return c.finish()


def criterion_4():
    c = Check(4, "analytic vs ODE propagation on random shells", 10.0)
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        eps = complex(rng.uniform(0.1, 10), rng.uniform(0, 20))
        mu = complex(rng.uniform(0.1, 10), rng.uniform(0, 20))
        mode = Mode(rng.choice([TE, TM]), int(rng.integers(1, 21)))
        r1 = rng.uniform(0.3, 2.0)
        r2 = r1 + rng.uniform(0.05, 1.0)
        seed = regular_seed(mode, 1.0, 1.0, 1.0, r1)
        a = propagate_analytic(seed, mode, eps, mu, r2, 1.0)
        seg = Segment(r1, r2, RadialTensor.isotropic(eps), RadialTensor.isotropic(mu))
        b = propagate_ode(seed, mode, seg, r2, 1.0)
        va, vb = np.array([a.u, a.w]), np.array([b.u, b.w])
        worst = max(worst, np.linalg.norm(va - vb) / np.linalg.norm(va))
    c.expect(worst < 1e-8, f"max relative gap {worst:.2e} < 1e-8 over 100 shells")
    return c.finish()


def criterion_5():
    c = Check(5, "exact invariance under the push-forward of the identity", 30.0)
    geom = CloakGeometry(0.25)
    vac = dtn_spectrum(vacuum_medium(), 20)
    s = dtn_spectrum(pushforward_identity_medium(geom), 20, method="ode")
    defect = max(abs(s[m] - vac[m]) for m in vac.modes)
    c.expect(defect < 1e-6, f"computed push-forward sup defect {defect:.2e} < 1e-6")
    lit = dtn_spectrum(pushforward_identity_medium(geom, inner_shell=RECIPROCAL), 20)
    lit_defect = max(abs(lit[m] - vac[m]) for m in vac.modes)
    c.details.append(f"tabulated inner shell defect {lit_defect:.2e} (reported only)")
    return c.finish()


OBJECTS = {
    "vacuum core": HiddenObject.vacuum(),
    "eps=5": HiddenObject.homogeneous(5.0),
    "eps=2+3i": HiddenObject.homogeneous(2 + 3j),
}


def criterion_6():
    c = Check(6, "near-cloak limit rho -> 0", 120.0)
    rhos = [0.2, 0.1, 0.05, 0.025]
    vacuum = ExperimentConfig(kind="vacuum")
    curves = {}
    for name, obj in OBJECTS.items():
        base = ExperimentConfig(delta=0.0, n=0, object=obj)
        rows = sweep([base.with_(rho=r) for r in rhos], vacuum)
        d = [r.distance_sup for r in sorted(rows, key=lambda r: -r.value)]
        curves[name] = d
        c.expect(all(np.diff(d) < 0), f"{name}: " + ", ".join(f"{x:.2e}" for x in d))
        c.expect(d[-1] < 0.1 * d[0], f"{name}: final/initial {d[-1] / d[0]:.2e} < 0.1")
    arr = np.array(list(curves.values()))
    spread = np.max(arr.max(axis=0) - arr.min(axis=0))
    c.expect(spread < arr.max(), f"object spread {spread:.2e} < largest distance {arr.max():.2e}")
    return c.finish()


def criterion_7():
    c = Check(7, "homogenization limit n -> inf", 300.0)
    ns = [8, 16, 32, 64, 128]
    base = ExperimentConfig(rho=0.25, delta=0.05)
    rows = sweep([base.with_(n=n) for n in ns], base)
    d = [r.distance_sup for r in rows]
    c.expect(all(np.diff(d) < 0), "distances " + ", ".join(f"{x:.2e}" for x in d))
    c.expect(d[-1] < 0.2 * d[0], f"final/initial {d[-1] / d[0]:.3f} < 0.2")
    for pol in (TM, TE):
        for l in (1, 2, 3):
            gaps = [annulus_field_gap(base.with_(n=n), base, Mode(pol, l)) for n in ns]
            c.expect(all(np.diff(gaps) < 0),
                     f"annulus {pol}{l}: {gaps[0]:.2e} -> {gaps[-1]:.2e} decreasing")
    return c.finish()


def criterion_8():
    c = Check(8, "delta -> 0 is linear", 120.0)
    deltas = [0.1, 0.05, 0.025, 0.0125]
    base = ExperimentConfig(rho=0.25, n=0)
    rows = sweep([base.with_(delta=x) for x in deltas], base.with_(delta=0.0))
    vals = np.array([r.value for r in rows])
    d = np.array([r.distance_sup for r in rows])
    slope = fitted_slope(vals, d)
    c.expect(0.8 <= slope <= 1.2, f"log-log slope {slope:.3f} in [0.8, 1.2]")
    return c.finish()


def criterion_9():
    c = Check(9, "order of limits: layering floor at fixed n", 120.0)
    deltas = [0.05, 0.025, 0.0125, 0.00625]
    ref = spectrum(ExperimentConfig(rho=0.25, delta=0.0, n=0))
    coarse = [distance(spectrum(ExperimentConfig(delta=x, n=4)), ref) for x in deltas]
    fine = [distance(spectrum(ExperimentConfig(delta=x, n=128)), ref) for x in deltas]
    c.details.append("n=4: " + ", ".join(f"{x:.3e}" for x in coarse))
    c.details.append("n=128: " + ", ".join(f"{x:.3e}" for x in fine))
    c.expect(coarse[-1] >= 0.5 * coarse[0],
             f"n=4 stagnates: d(0.00625)/d(0.05) = {coarse[-1] / coarse[0]:.3f} >= 0.5")
    c.expect(coarse[-1] > 1e-2, f"positive floor {coarse[-1]:.3e}")
    c.expect(fine[0] < coarse[0], "d(128, 0.05) < d(4, 0.05)")
    ratio = coarse[-1] / fine[-1]
    c.expect(ratio >= 5.0, f"d(4)/d(128) at delta=0.00625 is {ratio:.2f} >= 5")
    return c.finish()


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_acceptance(criterion):
    result = criterion()
    assert result.ok, RESULTS[-1]


if __name__ == "__main__":
    for crit in CRITERIA:
        crit()
        print(RESULTS[-1])
