"""Acceptance suite: the nine reproduction criteria at their stated tolerances.

Each test records one PASS/FAIL line, printed at the end of the pytest run.
Run directly with ``python3 tests/test_acceptance.py`` for the same report.
Full size runs (2D up to L=12, 3D up to L=8) take a few minutes.
"""

import functools
import sys
import warnings

import numpy as np
import pytest

import oracles
from gmgpoisson import (
    GridField,
    LevelGrid,
    NonConvergence,
    ProblemSpec,
    Smoother,
    SolveConfig,
    build_hierarchy,
    discrete_l2_error,
    flop_report,
    fmg_solve,
    gmg_solve,
    memory_report,
    poisson_direct,
    spectral_flops,
)
from gmgpoisson.stencil import gs_color_sweep, residual, weighted_jacobi_sweep
from gmgpoisson.transfer import prolong_add, restrict

RESULTS = {}

LEVELS_2D = range(8, 13)
LEVELS_3D = range(5, 9)

GMG_ERR_2D = dict(zip(LEVELS_2D, (6.250e-6, 1.565e-6, 3.910e-7, 9.719e-8, 2.370e-8)))
GMG_ERR_3D = dict(zip(LEVELS_3D, (2.713e-4, 6.936e-5, 1.753e-5, 4.404e-6)))
FFT_ERR_2D = {9: 1.563e-6, 10: 3.914e-7, 11: 9.797e-8, 12: 2.450e-8}
FFT_ERR_3D = dict(zip(LEVELS_3D, (2.841e-4, 7.100e-5, 1.774e-5, 4.437e-6)))
FMG12_2D = {9: 1.242e-6, 10: 3.113e-7, 11: 7.791e-8, 12: 1.948e-8}
FMG33_3D = dict(zip(LEVELS_3D, (5.296e-4, 1.608e-4, 4.394e-5, 1.145e-5)))
FMG_FAMILY = ((1, 1), (1, 2), (2, 2), (2, 3), (3, 3))
# iterations and the accepted band for each smoother
SMOOTHER_ITS = {"wj:0.667": (21, 23), "wj:0.8": (17, 20), "gs2": (15, 17), "gs4": (10, 12)}


class Check:
    """Collects failed sub-checks for one criterion."""

    def __init__(self):
        self.failures = []
        self.notes = []

    def expect(self, ok, message):
        if not ok:
            self.failures.append(message)

    def note(self, text):
        self.notes.append(text)


def record(number, title, check):
    ok = not check.failures
    detail = "; ".join(check.failures if not ok else check.notes)
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
    RESULTS[number] = line
    print(line)
    assert ok, line


def within(value, ref, rel):
    return abs(value - ref) <= rel * abs(ref)


@functools.lru_cache(maxsize=None)
def gmg(dim, depth, smoother="gs4", partition=0, workers=1):
    problem = ProblemSpec(dim)
    config = SolveConfig(dim, depth, partition=partition, workers=workers,
                         smoother=Smoother.parse(smoother))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergence)
        u, stats = gmg_solve(config, problem.scaled_rhs(LevelGrid.for_depth(dim, depth, 0)))
    stats.error = discrete_l2_error(u, problem.solution, "points")
    return u, stats


@functools.lru_cache(maxsize=None)
def fmg_error(dim, depth, nu1, nu2):
    problem = ProblemSpec(dim)
    u, _ = fmg_solve(SolveConfig(dim, depth, mu_f=nu1, mu_b=nu2), problem.rhs)
    return discrete_l2_error(u, problem.solution, "points")


@functools.lru_cache(maxsize=None)
def fmg_stats(dim, depth, nu1, nu2):
    problem = ProblemSpec(dim)
    return fmg_solve(SolveConfig(dim, depth, mu_f=nu1, mu_b=nu2), problem.rhs)[1]


def test_criterion_1_iteration_counts():
    c = Check()
    for dim, levels, target in ((2, LEVELS_2D, 11), (3, LEVELS_3D, 15)):
        its = {L: gmg(dim, L)[1].iterations for L in levels}
        for L, it in its.items():
            c.expect(abs(it - target) <= 1, f"{dim}D L={L}: {it} iterations, expected {target}+-1")
        c.note(f"{dim}D {list(its.values())}")
    record(1, "GMG V(1,1) iteration counts", c)


def test_criterion_2_gmg_errors():
    c = Check()
    for dim, refs in ((2, GMG_ERR_2D), (3, GMG_ERR_3D)):
        errs = {L: gmg(dim, L)[1].error for L in refs}
        for L, ref in refs.items():
            c.expect(within(errs[L], ref, 0.02), f"{dim}D L={L}: {errs[L]:.4e} vs {ref:.3e}")
        levels = sorted(errs)
        for a, b in zip(levels, levels[1:]):
            ratio = errs[a] / errs[b]
            c.expect(3.9 <= ratio <= 4.1, f"{dim}D ratio L={a}/{b} = {ratio:.4f}")
        c.note(f"{dim}D " + " ".join(f"{errs[L]:.3e}" for L in levels))
    record(2, "GMG discretization errors and ratios", c)


def test_criterion_3_fft_errors():
    c = Check()
    for dim, refs, rel in ((3, FFT_ERR_3D, 0.01), (2, FFT_ERR_2D, 0.02)):
        problem = ProblemSpec(dim)
        for L, ref in refs.items():
            u = poisson_direct(dim, L, problem.rhs)
            err = discrete_l2_error(u, problem.solution, "mesh")
            c.expect(within(err, ref, rel), f"{dim}D L={L}: {err:.4e} vs {ref:.3e}")
            # closed-form discrete solution of the single sine mode
            oracle = problem.discrete_exact(u.grid)
            gap = np.max(np.abs(u.values - oracle.values)) / np.max(np.abs(oracle.values))
            c.expect(gap < 1e-10, f"{dim}D L={L}: differs from eigenvalue oracle by {gap:.1e}")
        c.note(f"{dim}D within {rel:.0%}")
    record(3, "FFT direct solver errors", c)


def test_criterion_4_smoother_comparison():
    c = Check()
    table = {}
    for label, (lo, hi) in SMOOTHER_ITS.items():
        table[label] = [gmg(2, L, label)[1].iterations for L in LEVELS_2D]
        for L, it in zip(LEVELS_2D, table[label]):
            c.expect(lo <= it <= hi, f"{label} L={L}: {it} iterations, expected {lo}..{hi}")
        c.note(f"{label} {table[label]}")
    record(4, "smoother comparison iteration counts", c)


def test_criterion_5_fmg_errors():
    c = Check()
    errs = {L: fmg_error(2, L, 1, 2) for L in FMG12_2D}
    for L, ref in FMG12_2D.items():
        c.expect(within(errs[L], ref, 0.10), f"2D FMG(1,2) L={L}: {errs[L]:.4e} vs {ref:.3e}")
    for a in list(FMG12_2D)[:-1]:
        ratio = errs[a] / errs[a + 1]
        c.expect(3.8 <= ratio <= 4.2, f"2D FMG(1,2) ratio L={a}/{a + 1} = {ratio:.3f}")
    for L, ref in FMG33_3D.items():
        e = fmg_error(3, L, 3, 3)
        c.expect(within(e, ref, 0.15), f"3D FMG(3,3) L={L}: {e:.4e} vs {ref:.3e}")
        fam = [fmg_error(3, L, *nu) for nu in FMG_FAMILY]
        ordered = fam[0] > fam[1] > fam[2] > max(fam[3], fam[4])
        c.expect(ordered, f"3D L={L}: FMG family not ordered " + " ".join(f"{x:.3e}" for x in fam))
    c.note("2D FMG(1,2) " + " ".join(f"{errs[L]:.3e}" for L in FMG12_2D))
    record(5, "FMG errors and ordering", c)


def test_criterion_6_flop_accounting():
    c = Check()
    shares_2d = {"residual": 14.0, "smooth": 13.4, "restrict": 2.67, "prolong": 3.34, "norm": 2.0}
    rep2 = flop_report(gmg(2, 12)[1])
    rep3 = flop_report(gmg(3, 8)[1])
    t2, t3 = rep2["total"]["per_unknown"], rep3["total"]["per_unknown"]
    c.expect(abs(t2 - 36) <= 1, f"2D L=12: {t2:.2f} flops/unknown")
    c.expect(abs(t3 - 41) <= 1, f"3D L=8: {t3:.2f} flops/unknown")
    for k, ref in shares_2d.items():
        got = rep2[k]["per_unknown"]
        c.expect(within(got, ref, 0.03), f"2D {k}: {got:.3f}N vs {ref}N")
    # flop comparison standing in for the excluded kernel-time tables
    fmg_flops = fmg_stats(2, 12, 1, 2).flops.total
    fft_flops = spectral_flops(2, 12)
    c.expect(fmg_flops < fft_flops, f"FMG(1,2) {fmg_flops:.3e} flops not below FFT {fft_flops:.3e}")
    c.note(f"2D {t2:.2f}, 3D {t3:.2f} per unknown; FMG(1,2) {fmg_flops:.2e} < FFT {fft_flops:.2e}")
    record(6, "flop accounting", c)


def test_criterion_7_memory_accounting():
    c = Check()
    for dim, levels, ref, growth in ((2, LEVELS_2D, 3.67, 4), (3, LEVELS_3D, 3.29, 8)):
        depth = max(levels)
        rep = memory_report(build_hierarchy(dim, depth))
        c.expect(within(rep.per_dof, ref, 0.15), f"{dim}D L={depth}: {rep.per_dof:.3f} values/dof")
        values = {L: memory_report(build_hierarchy(dim, L)).values for L in levels}
        for L in list(levels)[1:]:
            g = values[L] / values[L - 1]
            c.expect(within(g, growth, 0.02), f"{dim}D growth L={L - 1}->{L} {g:.3f} vs {growth}")
        c.note(f"{dim}D {rep.per_dof:.3f} (single residual buffer {rep.shared_residual_per_dof:.4f})")
    record(7, "memory accounting", c)


def test_criterion_8_backend_equivalence():
    c = Check()
    for dim, depth in ((2, 10), (3, 6)):
        ref_u, ref = gmg(dim, depth, partition=0, workers=1)
        for partition in (0, depth // 2, depth):
            for workers in (1, 4, 8):
                u, stats = gmg(dim, depth, partition=partition, workers=workers)
                tag = f"{dim}D L={depth} Ltheta={partition} workers={workers}"
                c.expect(stats.iterations == ref.iterations, f"{tag}: iterations differ")
                c.expect(np.array_equal(u.values, ref_u.values), f"{tag}: iterate differs")
                n_theta = 2 ** (depth - partition)
                per_it = 2 * 8 * (n_theta + 1) ** dim if 0 < partition < depth else 0
                c.expect(stats.transfer_bytes == per_it * stats.iterations,
                         f"{tag}: {stats.transfer_bytes} bytes, expected {per_it} per iteration")
        c.note(f"{dim}D L={depth} bitwise equal")
    record(8, "backend and partition equivalence", c)


def _random_field(dim, n, rng):
    fld = GridField.zeros(LevelGrid(dim, 0, n))
    fld.values[(slice(1, n),) * dim] = rng.standard_normal((n - 1,) * dim)
    return fld


def _vec(fld):
    return fld.interior.ravel(order="F")


def test_criterion_9_oracle_equivalence():
    c = Check()
    rng = np.random.default_rng(9)
    worst = 0.0

    def compare(tag, got, want, tol=1e-12):
        nonlocal worst
        err = float(np.max(np.abs(got - want))) if got.size else 0.0
        worst = max(worst, err)
        c.expect(err <= tol, f"{tag}: max deviation {err:.1e}")

    for dim in (2, 3):
        for n in (2, 4, 8):
            A = oracles.laplacian(dim, n)
            u, f = _random_field(dim, n, rng), _random_field(dim, n, rng)
            r = GridField.zeros(u.grid)
            residual(u, f, r)
            compare(f"residual {dim}D n={n}", _vec(r), _vec(f) - A @ _vec(u))

            for scheme, ncol in (("multicolor", 2**dim), ("redblack", 2)):
                v = u.copy()
                for col in range(ncol):
                    gs_color_sweep(v, f, col, scheme)
                classes = oracles.color_classes(dim, n, range(ncol), scheme)
                compare(f"GS {scheme} {dim}D n={n}", _vec(v), oracles.gauss_seidel(A, _vec(u), _vec(f), classes))

            v = u.copy()
            weighted_jacobi_sweep(v, f, 0.8)
            compare(f"Jacobi {dim}D n={n}", _vec(v), oracles.jacobi(A, _vec(u), _vec(f), 0.8))

            if n >= 4:
                fc = GridField.zeros(u.grid.coarser())
                restrict(r, fc, 4.0)
                compare(f"restrict {dim}D n={n}", _vec(fc), oracles.restriction(dim, n, 4.0) @ _vec(r))
                v = u.copy()
                prolong_add(v, fc)
                compare(f"prolong {dim}D n={n}", _vec(v),
                        _vec(u) + oracles.prolongation(dim, n // 2) @ _vec(fc))

        for depth in range(1, 5):
            g = LevelGrid.for_depth(dim, depth, 0)
            f = _random_field(dim, g.cells, rng)
            u = poisson_direct(dim, depth, f)
            want = np.linalg.solve(oracles.laplacian(dim, g.cells) / g.h**2, _vec(f))
            scale = max(1.0, float(np.max(np.abs(want))))
            compare(f"spectral {dim}D n={g.cells}", _vec(u) / scale, want / scale)
    c.note(f"max deviation {worst:.1e}")
    record(9, "dense-oracle equivalence", c)


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    print("\n".join(RESULTS[k] for k in sorted(RESULTS)))
    sys.exit(code)
