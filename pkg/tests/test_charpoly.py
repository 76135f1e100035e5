import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracreg.charpoly import (RootFindConfig, classify_stability,
                              commensurate_roots, eval_fracpoly, find_roots,
                              newton_roots, normalize)
from fracreg.model import FracPoly, PdController, Plant, char_poly_pd

BENCH_PLANT = Plant(a0=1.0, a1=0.5, a2=0.8, alpha=2.2, beta=0.9)
GOLDEN_POLY = char_poly_pd(BENCH_PLANT, PdController(K=24.0, Td=6.9407, delta=0.71859))
UNSTABLE_POLY = char_poly_pd(BENCH_PLANT, PdController(K=49.0, Td=-79.74427, delta=-0.55194))


def random_conjugate_closed_roots(rng, degree, min_sep=0.3, radius=5.0):
    roots = []
    while len(roots) < degree:
        if degree - len(roots) >= 2 and rng.random() < 0.5:
            z = complex(rng.uniform(-4, 4), rng.uniform(min_sep, 4))
            cand = [z, z.conjugate()]
        else:
            cand = [complex(rng.uniform(-4.5, 4.5), 0.0)]
        if all(abs(a - b) > min_sep for a in cand for b in roots) and all(
            abs(a) <= radius for a in cand
        ):
            roots.extend(cand)
    return roots


def integer_fracpoly(roots):
    coeffs = np.real(np.poly(roots))
    degree = len(roots)
    return FracPoly.from_terms((c, float(degree - i)) for i, c in enumerate(coeffs))


def set_distance(a, b):
    if len(a) != len(b):
        return float("inf")
    if not a:
        return 0.0
    return max(
        max(min(abs(x - y) for y in b) for x in a),
        max(min(abs(x - y) for y in a) for x in b),
    )


class TestEval:
    def test_single_term(self):
        assert eval_fracpoly(FracPoly.from_terms([(0.8, 2.2)]), 1.0) == pytest.approx(0.8)

    def test_golden_poly_nearly_vanishes_at_design_pole(self):
        # design parameters rounded to 5 digits leave a small residual
        assert abs(eval_fracpoly(GOLDEN_POLY, -1 + 6j)) < 1e-2 * 25

    def test_principal_branch_on_cut(self):
        value = eval_fracpoly(FracPoly.from_terms([(1.0, 0.5)]), -1.0)
        assert value == pytest.approx(1j)

    def test_origin_with_negative_exponent_rejected(self):
        with pytest.raises(ValueError):
            eval_fracpoly(FracPoly.from_terms([(1.0, -0.5)]), 0.0)

    def test_origin_with_constant(self):
        poly = FracPoly.from_terms([(2.0, 1.0), (3.0, 0.0)])
        assert eval_fracpoly(poly, 0.0) == 3.0


class TestNormalize:
    def test_unstable_case_shift(self):
        poly = FracPoly.from_terms(
            [(0.8, 2.2), (-79.74427, -0.55194), (0.5, 0.9), (50.0, 0.0)]
        )
        shifted, shift = normalize(poly)
        assert shift == pytest.approx(0.55194)
        assert shifted.exponents == pytest.approx((2.75194, 1.45194, 0.55194, 0.0))

    def test_nonnegative_unchanged(self):
        shifted, shift = normalize(GOLDEN_POLY)
        assert shift == 0.0
        assert shifted is GOLDEN_POLY

    def test_single_negative_term(self):
        shifted, shift = normalize(FracPoly.from_terms([(3.0, -0.7)]))
        assert shift == pytest.approx(0.7)
        assert shifted.terms == ((3.0, 0.0),)


class TestFindRoots:
    def test_golden_design_poles(self):
        report = find_roots(GOLDEN_POLY)
        values = [r.value for r in report.roots]
        assert min(abs(v - (-1 + 6j)) for v in values) < 5e-2
        assert min(abs(v - (-1 - 6j)) for v in values) < 5e-2
        assert report.verdict == "stable"
        assert report.coverage_caveat  # newton-grid cannot certify

    def test_unstable_extra_real_root(self):
        report = find_roots(UNSTABLE_POLY)
        real_roots = [r.value for r in report.roots if abs(r.value.imag) < 1e-6]
        assert any(abs(v.real - 1.98) < 0.02 for v in real_roots)
        assert report.verdict == "unstable"
        assert not report.coverage_caveat

    def test_integer_poly_uses_commensurate(self):
        report = find_roots(FracPoly.from_terms([(1.0, 2.0), (1.0, 0.0)]))
        assert report.method == "commensurate"
        values = sorted((r.value for r in report.roots), key=lambda z: z.imag)
        assert values[0] == pytest.approx(-1j, abs=1e-10)
        assert values[1] == pytest.approx(1j, abs=1e-10)

    def test_root_residual_invariant(self):
        cfg = RootFindConfig()
        for poly in (GOLDEN_POLY, UNSTABLE_POLY):
            report = find_roots(poly, cfg)
            bound = cfg.newton_tol * (1 + sum(abs(c) for c in poly.coefficients))
            assert all(r.residual <= bound for r in report.roots)

    def test_conjugate_pairing(self):
        report = find_roots(GOLDEN_POLY)
        values = [r.value for r in report.roots]
        for v in values:
            if abs(v.imag) > 1e-9:
                assert min(abs(v.conjugate() - u) for u in values) < 1e-8

    def test_too_few_terms_rejected(self):
        with pytest.raises(ValueError):
            find_roots(FracPoly.from_terms([(1.0, 2.0)]))


class TestScalingInvariance:
    @given(factor=st.floats(1e-3, 1e3))
    @settings(max_examples=15, deadline=None)
    def test_positive_scaling_changes_nothing(self, factor):
        base = find_roots(GOLDEN_POLY)
        scaled = find_roots(GOLDEN_POLY.scaled(factor))
        assert scaled.verdict == base.verdict
        assert set_distance([r.value for r in base.roots],
                            [r.value for r in scaled.roots]) < 1e-6


class TestCommensurateNewtonAgreement:
    @pytest.mark.parametrize("seed", range(20))
    def test_integer_polynomials(self, seed):
        rng = np.random.default_rng(seed)
        degree = int(rng.integers(2, 7))
        poly = integer_fracpoly(random_conjugate_closed_roots(rng, degree))
        cfg = RootFindConfig()
        newton = newton_roots(poly, cfg)
        companion = commensurate_roots(poly, cfg)
        assert companion is not None
        assert set_distance(newton, companion) < 1e-6

    def test_non_commensurate_returns_none(self):
        assert commensurate_roots(GOLDEN_POLY, RootFindConfig()) is None


class TestClassify:
    def test_stable_pair(self):
        verdict, _ = classify_stability([-1 + 6j, -1 - 6j], "newton-grid")
        assert verdict == "stable"

    def test_unstable_with_extra_root(self):
        verdict, caveat = classify_stability([-1 + 6j, -1 - 6j, 1.98 + 0j], "newton-grid")
        assert verdict == "unstable"
        assert not caveat

    def test_empty_inconclusive(self):
        verdict, _ = classify_stability([], "newton-grid")
        assert verdict == "inconclusive"

    def test_commensurate_certifies(self):
        verdict, caveat = classify_stability([-1 + 0j], "commensurate")
        assert verdict == "stable"
        assert not caveat
