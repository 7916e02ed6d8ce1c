"""Acceptance gate: one test per criterion, at the stated tolerances.

Each test evaluates every case before asserting, records a one-line
summary through ``record_property`` and fails with the list of failing
cases.  ``conftest.py`` prints one PASS/FAIL line per criterion.
"""
import numpy as np
import pytest

from eigenmin import appendix
from eigenmin.diffops import conformality, directional_derivative, tension
from eigenmin.families import SphereExample, random_family, sphere_example_check, table_eigenvalues
from eigenmin.fibers import critical_point_scan, find_zero, mean_curvature_estimate, sample_fiber
from eigenmin.groups import GroupSpec, algebra_basis, p_dimension, random_element, symmetric_space
from eigenmin.parallel import task_seed

GRID = [("SUSO", 2), ("SUSO", 3), ("SUSO", 4), ("SPU", 1), ("SPU", 2), ("SPU", 3),
        ("SOU", 2), ("SOU", 3), ("SOU", 4), ("SUSP", 2), ("SUSP", 3)]
MASTER = 20240601


def case_seed(criterion, space, n, i=0):
    return task_seed(MASTER, 10**6 * criterion + 10**4 * GRID.index((space, n)) + i)


def verdict(record_property, failures, summary):
    record_property("summary", summary)
    assert not failures, "; ".join(failures)


def test_criterion_01_eigenvalues(record_property):
    failures, worst = [], 0.0
    spot = {("SUSO", 3): ("-20/3", "-8/3"), ("SUSP", 2): ("-5", "-1")}
    for space, n in GRID:
        lam, mu = table_eigenvalues(space, n)
        if (space, n) in spot and spot[(space, n)] != (str(lam), str(mu)):
            failures.append(f"{space}({n}) table value {lam}, {mu}")
        for d in range(5):
            fam = random_family(space, n, case_seed(1, space, n, d))
            M = fam.model
            for i in range(20):
                p = M.random_point(case_seed(1, space, n, 100 + 20 * d + i))
                phi = fam.field(p)
                t = tension(fam.field, p, M.g_basis)
                k = conformality(fam.field, fam.field, p, M.g_basis)
                rt = abs(t - float(lam) * phi) / (1 + abs(float(lam) * phi))
                rk = abs(k - float(mu) * phi**2) / (1 + abs(float(mu) * phi**2))
                worst = max(worst, rt, rk)
                if rt > 1e-8 or rk > 1e-8:
                    failures.append(f"{space}({n}) draw {d} point {i}: {rt:.2e}, {rk:.2e}")
    verdict(record_property, failures, f"worst relative residual {worst:.2e} (tol 1e-8)")


def test_criterion_02_backend_agreement(record_property):
    failures, worst = [], 0.0
    for space, n in GRID:
        rng = np.random.default_rng(case_seed(2, space, n))
        for _ in range(100):
            fam = random_family(space, n, rng.integers(2**63))
            M = fam.model
            p = M.random_point(rng.integers(2**63))
            Z = M.g_basis.combine(rng.normal(size=M.g_basis.count))
            Z /= np.linalg.norm(Z)
            for order in (1, 2):
                ex = directional_derivative(fam.field, p, Z, order, "exact")
                fd = directional_derivative(fam.field, p, Z, order, "fd")
                dev = abs(fd - ex) / max(1.0, abs(ex))
                worst = max(worst, dev)
                if dev > 1e-5:
                    failures.append(f"{space}({n}) order {order}: {dev:.2e}")
    verdict(record_property, failures, f"worst FD/exact deviation {worst:.2e} (tol 1e-5)")


def test_criterion_03_invariance(record_property):
    failures, worst = [], 0.0
    for space, n in GRID:
        fam = random_family(space, n, case_seed(3, space, n))
        M = fam.model
        for i in range(100):
            p = M.random_point(case_seed(3, space, n, 1 + i))
            k = M.random_k(case_seed(3, space, n, 1000 + i))
            r = abs(fam.field(p @ k) - fam.field(p))
            worst = max(worst, r)
            if r > 1e-10:
                failures.append(f"{space}({n}) pair {i}: {r:.2e}")
    verdict(record_property, failures, f"worst |phi(pk) - phi(p)| {worst:.2e} (tol 1e-10)")


def test_criterion_04_zero_existence(record_property):
    failures, worst = [], 0.0
    for space, n in GRID:
        fam = random_family(space, n, case_seed(4, space, n))
        for s in range(10):
            try:
                fp = find_zero(fam, case_seed(4, space, n, 1 + s))
            except Exception as exc:  # report, do not abort the sweep
                failures.append(f"{space}({n}) seed {s}: {exc}")
                continue
            worst = max(worst, fp.value_residual)
            if fp.value_residual > 1e-10:
                failures.append(f"{space}({n}) seed {s}: {fp.value_residual:.2e}")
    verdict(record_property, failures, f"worst |phi| at found zeros {worst:.2e} (tol 1e-10)")


def test_criterion_05_regularity(record_property):
    failures, margins = [], {}
    for space, n in GRID:
        fam = random_family(space, n, case_seed(5, space, n))
        pts = sample_fiber(fam, 100, case_seed(5, space, n, 1))
        margins[(space, n)] = m = min(fp.gradient_margin for fp in pts)
        if m < 1e-3:
            failures.append(f"{space}({n}): margin {m:.2e}")
    low = min(margins, key=margins.get)
    verdict(record_property, failures, f"minimum margin {margins[low]:.3f} at {low[0]}({low[1]}) (gate 1e-3)")


def test_criterion_06_minimality(record_property):
    bound = 1e-4
    failures, worst_H, weakest = [], 0.0, (np.inf, None)
    for space, n in GRID:
        fam = random_family(space, n, case_seed(6, space, n))
        pts = sample_fiber(fam, 20, case_seed(6, space, n, 1))
        reports = [mean_curvature_estimate(fam, fp, control_seed=case_seed(6, space, n, 100 + i)) for i, fp in enumerate(pts)]
        H = max(r.H_norm for r in reports)
        control = max(r.control_H_norm for r in reports)
        worst_H = max(worst_H, H)
        weakest = min(weakest, (control, f"{space}({n})"), key=lambda t: t[0])
        if H > bound:
            failures.append(f"{space}({n}): H_norm {H:.2e}")
        if not control > 10 * bound:
            failures.append(f"{space}({n}): control {control:.2e} <= {10 * bound:.0e}")
    verdict(
        record_property,
        failures,
        f"max H_norm {worst_H:.2e} (tol 1e-4); weakest control {weakest[0]:.2e} at {weakest[1]} (needs > 1e-3)",
    )


def test_criterion_07_critical_point_scan(record_property):
    failures, margins = [], {}
    for space, n in GRID:
        if space not in ("SUSO", "SPU"):
            continue
        fam = random_family(space, n, case_seed(7, space, n))
        margins[(space, n)] = m = critical_point_scan(fam, 1000, case_seed(7, space, n, 1))
        if not m > 1e-6:
            failures.append(f"{space}({n}): {m:.2e}")
    low = min(margins, key=margins.get)
    verdict(record_property, failures, f"minimum margin {margins[low]:.2e} at {low[0]}({low[1]}) (needs > 1e-6)")


def test_criterion_08_appendix(record_property):
    failures = [f"reference {k}: {v} entries differ" for k, v in appendix.reference_mismatches().items() if v]
    worst_id, worst_ratio = 0.0, np.inf
    for n in range(2, 7):
        try:
            perm, _ = appendix.skew_reduce(appendix.build_system(n))
        except Exception as exc:
            failures.append(f"n={n} reduction: {exc}")
            continue
        for d in range(50):
            rng = np.random.default_rng(task_seed(MASTER, 8 * 10**6 + 100 * n + d))
            frame = random_element(GroupSpec("SO", 2 * n), rng.integers(2**63)).real.T
            u = rng.normal(size=2 * n)
            sys = appendix.build_system(n, u / np.linalg.norm(u), frame)
            det_abs, pred, kind = appendix.det_identities(sys)
            if kind == "identity":
                rel = abs(det_abs - pred) / pred
                worst_id = max(worst_id, rel)
                if rel > 1e-10:
                    failures.append(f"n={n} draw {d}: identity {rel:.2e}")
            ratio = det_abs / abs(sys.components[0]) ** (2 * n)
            worst_ratio = min(worst_ratio, ratio)
            if ratio < 1 - 1e-10:
                failures.append(f"n={n} draw {d}: lower bound ratio {ratio:.6f}")
    verdict(record_property, failures, f"identity error {worst_id:.2e} (tol 1e-10); min det/bound {worst_ratio:.3f}")


def test_criterion_09_sphere_examples(record_property):
    failures, worst = [], 0.0
    for n in (2, 3):
        for ex in (SphereExample("sphere_phi_j", 1, 2, n), SphereExample("cp_phi_jk", 1, 2, n)):
            lam, mu = sphere_example_check(ex, seed=n)
            el, em = ex.expected
            dev = max(abs(lam - el), abs(mu - em))
            worst = max(worst, dev)
            if dev > 1e-7:
                failures.append(f"{ex.kind} n={n}: ({lam:.9f}, {mu:.9f}) vs ({el}, {em})")
    verdict(record_property, failures, f"worst deviation {worst:.2e} (tol 1e-7)")


def test_criterion_10_structure(record_property):
    failures, worst_gram, worst_mix = [], 0.0, 0.0
    groups = {GroupSpec(f, n) for f in ("SO", "U", "SU", "Sp") for n in (2, 3, 4)}
    bases = [algebra_basis(G) for G in sorted(groups, key=str)]
    for space, n in GRID:
        M = symmetric_space(space, n)
        bases += [M.p_basis, M.k_basis]
        expected = {"SUSO": (n - 1) * (n + 2) // 2, "SPU": n * (n + 1), "SOU": n * (n - 1), "SUSP": (n - 1) * (2 * n + 1)}[space]
        if M.p_basis.count != expected or p_dimension(space, n) != expected:
            failures.append(f"{space}({n}): dim p = {M.p_basis.count}, expected {expected}")
        fam, other = random_family(space, n, case_seed(10, space, n)), random_family(space, n, case_seed(10, space, n, 1))
        rng = np.random.default_rng(case_seed(10, space, n, 2))
        p = M.random_point(case_seed(10, space, n, 3))
        for basis in (M.g_basis, M.p_basis):
            Q, _ = np.linalg.qr(rng.normal(size=(basis.count, basis.count)))
            mixed = basis.mixed(Q)
            for a, b in (
                (tension(fam.field, p, basis), tension(fam.field, p, mixed)),
                (conformality(fam.field, other.field, p, basis), conformality(fam.field, other.field, p, mixed)),
            ):
                rel = abs(a - b) / max(1.0, abs(a))
                worst_mix = max(worst_mix, rel)
                if rel > 1e-9:
                    failures.append(f"{space}({n}) {basis.label}: {rel:.2e}")
    for B in bases:
        if B.count:
            g = np.max(np.abs(B.gram() - np.eye(B.count)))
            worst_gram = max(worst_gram, g)
            if g > 1e-12:
                failures.append(f"{B.label}: Gram deviation {g:.2e}")
    verdict(record_property, failures, f"Gram deviation {worst_gram:.2e} (tol 1e-12); re-mixing {worst_mix:.2e} (tol 1e-9)")
