# asymmetry/tests/test_inference_service.py
import math

import numpy as np
import pytest
from scipy import integrate, special

from asymmetry.core.exceptions import BoundaryGradientError, DomainError, InputError, ZeroPairError
from asymmetry.core.replicates import ReplicateRunner
from asymmetry.schemas.measures import MeasureKind, SeStatus, WeightKind, WeightScheme
from asymmetry.schemas.simulation import CsSpec
from asymmetry.schemas.table import Convention, CountTable, ProbTable
from asymmetry.services.inference_service import (
    bootstrap_power_se,
    bootstrap_se,
    bowker,
    chi_square_sf,
    inverse_normal_cdf,
    mcnemar,
    normal_cdf,
    phi_gradient,
    phi_interval,
    phi_power_gradient,
    phi_power_interval,
    phi_variance,
)
from asymmetry.services.measure_service import QUARTER_PI, pair_arcs, phi_power_value, phi_value
from asymmetry.services.simulation_service import cs_table
from asymmetry.services.table_service import to_probabilities
from asymmetry.tests.conftest import PUBLISHED, ROUNDED_TOL, SE_TOL

UNIFORM = WeightScheme.uniform()
PAIR = WeightScheme.pair()
SCHEMES = {"uniform": UNIFORM, "pair": PAIR}

FD_STEP = 1e-6


def central_difference(fn, p: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central differences of fn over every off-diagonal cell of p."""
    gradient = np.zeros_like(p)
    for s, t in zip(*np.nonzero(~np.eye(len(p), dtype=bool))):
        step = np.zeros_like(p)
        step[s, t] = h
        gradient[s, t] = (fn(p + step) - fn(p - step)) / (2.0 * h)
    return gradient


def arc_part(p: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(w_st + w_ts) · ∂r_st/∂p_st on an interior table."""
    a, b = p, p.T
    slope = np.sign(np.sqrt(a) - np.sqrt(b)) * np.sqrt(b) / (2.0 * np.sqrt(a) * (a + b)) / QUARTER_PI
    off = ~np.eye(len(p), dtype=bool)
    return np.where(off, (w + w.T) * slope, 0.0)


class TestPhiGradient:
    @pytest.mark.parametrize("name", ["uniform", "pair"])
    def test_matches_finite_differences(self, interior_tables, name):
        scheme = SCHEMES[name]
        for p in interior_tables:
            analytic = phi_gradient(ProbTable.from_array(p), scheme)
            numeric = central_difference(lambda x: phi_value(x, scheme), p)
            np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-9)

    def test_cs_table_uniform(self):
        probs = cs_table(CsSpec.uniform(0.5))
        p = probs.as_array()
        numeric = central_difference(lambda x: phi_value(x, UNIFORM), p)
        np.testing.assert_allclose(phi_gradient(probs, UNIFORM), numeric, rtol=1e-6, atol=1e-9)

    def test_shrinkage_pair(self, shrinkage_2yr):
        probs = to_probabilities(shrinkage_2yr)
        numeric = central_difference(lambda x: phi_value(x, PAIR), probs.as_array())
        np.testing.assert_allclose(phi_gradient(probs, PAIR), numeric, rtol=1e-6, atol=1e-9)

    def test_orthogonal_to_the_table(self, interior_tables):
        """Φ is scale-free, so Σ G·p = 0 and projected directions give G itself."""
        for p in interior_tables[:20]:
            for scheme in SCHEMES.values():
                gradient = phi_gradient(ProbTable.from_array(p), scheme)
                assert float(np.sum(gradient * p)) == pytest.approx(0.0, abs=1e-12)

    def test_symmetric_table_has_zero_gradient(self, symmetric_counts):
        probs = to_probabilities(symmetric_counts)
        for scheme in SCHEMES.values():
            assert np.all(phi_gradient(probs, scheme) == 0.0)
            assert phi_variance(probs, scheme) == 0.0

    def test_zero_cell_is_boundary(self):
        probs = to_probabilities(CountTable(counts=[[5, 10, 3], [0, 4, 6], [2, 8, 1]]))
        with pytest.raises(BoundaryGradientError) as exc_info:
            phi_gradient(probs)
        assert exc_info.value.details["row"] == 2
        assert exc_info.value.details["column"] == 1
        assert exc_info.value.exit_code == 3

    def test_sign_flipped_form_differs_for_pair_weights(self, interior_tables):
        """
        The form (weight part) - (arc part) flips the
        sign of the whole gradient for uniform weights, which leaves σ²
        unchanged, but it is not the derivative under pair weights.
        """
        for p in interior_tables[:20]:
            probs = ProbTable.from_array(p)
            dim = len(p)

            uniform = phi_gradient(probs, UNIFORM)
            uniform_w = np.full((dim, dim), 1.0 / (dim * (dim - 1)))
            np.testing.assert_allclose(uniform, arc_part(p, uniform_w), rtol=1e-12, atol=1e-15)
            flipped = -uniform
            flipped_var = float(np.sum(flipped**2 * p)) - float(np.sum(flipped * p)) ** 2
            assert flipped_var == pytest.approx(phi_variance(probs, UNIFORM), rel=1e-12)

            derived = phi_gradient(probs, PAIR)
            arcs = arc_part(p, (p + p.T) / 2.0)
            flipped = (derived - arcs) - arcs
            numeric = central_difference(lambda x: phi_value(x, PAIR), p)
            assert not np.allclose(flipped, numeric, rtol=1e-3, atol=1e-6)
            np.testing.assert_allclose(derived, numeric, rtol=1e-6, atol=1e-9)

    def test_pair_weight_part(self, shrinkage_2yr):
        """The pair-weight quotient term is (r_st - Φ)/S."""
        probs = to_probabilities(shrinkage_2yr)
        p = probs.as_array()
        off = ~np.eye(3, dtype=bool)
        arcs = pair_arcs(p, off)
        value = phi_value(p, PAIR)
        expected = np.where(off, arcs - value, 0.0) + arc_part(p, (p + p.T) / 2.0)
        np.testing.assert_allclose(phi_gradient(probs, PAIR), expected, rtol=1e-12, atol=1e-14)


class TestPhiVariance:
    def test_nonnegative(self, interior_tables):
        for p in interior_tables:
            for scheme in SCHEMES.values():
                assert phi_variance(ProbTable.from_array(p), scheme) >= 0.0


class TestPhiInterval:
    @pytest.mark.golden
    @pytest.mark.parametrize("key", sorted(PUBLISHED))
    def test_published_values(self, datasets, key):
        name, weight = key
        estimate, se, lower, upper = PUBLISHED[key]
        report = phi_interval(datasets[name], SCHEMES[weight], alpha=0.05)
        assert report.estimate == pytest.approx(estimate, abs=ROUNDED_TOL)
        assert report.se == pytest.approx(se, abs=SE_TOL)
        assert report.ci_lower == pytest.approx(lower, abs=SE_TOL)
        assert report.ci_upper == pytest.approx(upper, abs=SE_TOL)
        assert report.se_status == SeStatus.OK
        assert not report.ci_clipped

    def test_computed_shrinkage_values(self, shrinkage_2yr):
        report = phi_interval(shrinkage_2yr)
        assert report.estimate == pytest.approx(0.196543, abs=1e-6)
        assert report.se == pytest.approx(0.047079, abs=1e-6)
        assert report.n == 327
        # uniform weights: SE² = 4/(9π²) · Σ_pairs 1/(pair count)
        closed = math.sqrt(4.0 / (9.0 * math.pi**2) * (1 / 237 + 1 / 40 + 1 / 50))
        assert report.se == pytest.approx(closed, rel=1e-12)

    def test_se_is_the_same_under_both_conventions(self, datasets):
        for table in datasets.values():
            for scheme in SCHEMES.values():
                off = phi_interval(table, scheme, convention=Convention.OFF_DIAGONAL)
                full = phi_interval(table, scheme, convention=Convention.FULL)
                assert full.n == table.total
                assert full.estimate == pytest.approx(off.estimate, abs=1e-14)
                assert full.se == pytest.approx(off.se, rel=1e-10)

    def test_report_fields(self, shrinkage_2yr):
        report = phi_interval(shrinkage_2yr, PAIR, alpha=0.1)
        assert report.measure == MeasureKind.PHI
        assert report.weight == WeightKind.PAIR
        assert report.alpha == 0.1
        half_width = report.ci_upper - report.estimate
        assert half_width == pytest.approx(inverse_normal_cdf(0.95) * report.se, rel=1e-12)

    def test_symmetric_table_is_degenerate(self, symmetric_counts):
        report = phi_interval(symmetric_counts)
        assert report.estimate == 0.0
        assert report.se == 0.0
        assert report.ci == (0.0, 0.0)
        assert report.se_status == SeStatus.DEGENERATE

    def test_boundary_keeps_estimate(self):
        table = CountTable(counts=[[5, 10, 3], [0, 4, 6], [2, 8, 1]])
        report = phi_interval(table)
        assert report.se is None
        assert report.ci is None
        assert report.se_status == SeStatus.BOUNDARY
        assert 0.0 < report.estimate < 1.0

    def test_interval_is_clipped(self):
        table = CountTable(counts=[[0, 51, 50], [50, 0, 49], [50, 50, 0]])
        report = phi_interval(table)
        assert report.ci_clipped
        assert report.ci_lower == 0.0
        assert report.ci_lower <= report.estimate <= report.ci_upper

    def test_zero_pair_under_error_policy(self):
        table = CountTable(counts=[[1, 4, 0], [2, 1, 0], [0, 0, 3]])
        with pytest.raises(ZeroPairError):
            phi_interval(table)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
    def test_alpha_domain(self, shrinkage_2yr, alpha):
        with pytest.raises(InputError):
            phi_interval(shrinkage_2yr, alpha=alpha)


class TestPhiPower:
    @pytest.mark.parametrize("lam", [-0.5, 0.0, 1.0, 2.5])
    def test_gradient_matches_finite_differences(self, interior_tables, lam):
        for p in interior_tables[:20]:
            analytic = phi_power_gradient(ProbTable.from_array(p), lam)
            numeric = central_difference(lambda x: phi_power_value(x, lam), p)
            np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-9)

    def test_interval(self, shrinkage_2yr):
        report = phi_power_interval(shrinkage_2yr, 1.0)
        assert report.measure == MeasureKind.PHI_POWER
        assert report.lam == 1.0
        assert report.se > 0.0
        assert report.ci_lower <= report.estimate <= report.ci_upper

    @pytest.mark.parametrize("lam", [-0.5, 0.0])
    def test_zero_cell_is_boundary_for_nonpositive_lambda(self, lam):
        table = CountTable(counts=[[5, 10, 3], [0, 4, 6], [2, 8, 1]])
        with pytest.raises(BoundaryGradientError):
            phi_power_gradient(to_probabilities(table), lam)
        assert phi_power_interval(table, lam).se_status == SeStatus.BOUNDARY

    def test_zero_cell_is_finite_for_positive_lambda(self):
        table = CountTable(counts=[[5, 10, 3], [0, 4, 6], [2, 8, 1]])
        assert phi_power_interval(table, 1.0).se is not None


class TestSymmetryTests:
    def test_bowker_on_shrinkage(self, shrinkage_2yr):
        result = bowker(shrinkage_2yr)
        assert result.statistic == pytest.approx(3249 / 237 + 4.9 + 5.12, abs=1e-12)
        assert result.statistic == pytest.approx(23.73, abs=0.01)
        assert result.df == 3
        assert result.p_value < 1e-4
        assert 2.8e-5 < result.p_value < 2.9e-5

    def test_symmetric_table(self, symmetric_counts):
        result = bowker(symmetric_counts)
        assert result.statistic == 0.0
        assert result.df == 3
        assert result.p_value == 1.0

    def test_mcnemar(self):
        result = mcnemar(CountTable(counts=[[12, 21], [9, 30]]))
        assert result.statistic == pytest.approx(4.8, abs=1e-12)
        assert result.df == 1
        assert result.p_value == pytest.approx(math.erfc(math.sqrt(2.4)), abs=1e-12)

    def test_mcnemar_needs_two_by_two(self, shrinkage_2yr):
        with pytest.raises(InputError):
            mcnemar(shrinkage_2yr)

    def test_empty_pairs_reduce_df(self):
        result = bowker(CountTable(counts=[[0, 5, 0], [3, 0, 0], [0, 0, 4]]))
        assert result.statistic == pytest.approx(0.5)
        assert result.df == 1
        assert result.empty_pairs == 2

    def test_invariances(self, rng):
        for _ in range(100):
            dim = int(rng.integers(2, 7))
            counts = rng.integers(0, 500, size=(dim, dim))
            counts[0, 1] += 1
            base = bowker(CountTable.from_array(counts))

            changed = counts.copy()
            np.fill_diagonal(changed, rng.integers(0, 10_000, size=dim))
            assert bowker(CountTable.from_array(changed)) == base

            perm = rng.permutation(dim)
            permuted = bowker(CountTable.from_array(counts[perm][:, perm]))
            assert permuted.statistic == pytest.approx(base.statistic, rel=1e-12)
            assert permuted.df == base.df


def chi_square_upper_tail(x: float, df: int) -> float:
    log_norm = (df / 2.0) * math.log(2.0) + special.gammaln(df / 2.0)

    def density(t: float) -> float:
        return math.exp((df / 2.0 - 1.0) * math.log(t) - t / 2.0 - log_norm)

    value, _ = integrate.quad(density, x, x + 500.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    return value


class TestSpecialFunctions:
    def test_sf_at_zero(self):
        for df in (1, 2, 3, 10, 50):
            assert chi_square_sf(0.0, df) == 1.0

    @pytest.mark.parametrize("x", [1.0, 5.0, 20.0])
    def test_sf_two_degrees_of_freedom(self, x):
        assert abs(chi_square_sf(x, 2) - math.exp(-x / 2.0)) < 1e-10

    @pytest.mark.parametrize(
        "x,df",
        [(0.5, 1), (3.2, 4), (23.73, 3), (11.0, 7), (40.0, 50), (120.0, 30), (200.0, 50)],
    )
    def test_sf_against_quadrature(self, x, df):
        assert abs(chi_square_sf(x, df) - chi_square_upper_tail(x, df)) < 1e-10

    def test_sf_of_bowker_statistic(self):
        assert chi_square_sf(23.73, 3) == pytest.approx(2.9e-5, rel=0.05)

    @pytest.mark.parametrize("x,df", [(1.0, 0), (1.0, 1.5), (-1.0, 2), (math.nan, 2), (1.0, True)])
    def test_sf_domain(self, x, df):
        with pytest.raises(DomainError):
            chi_square_sf(x, df)

    def test_inverse_normal_cdf(self):
        assert inverse_normal_cdf(0.5) == 0.0
        assert inverse_normal_cdf(0.975) == pytest.approx(1.959964, abs=1e-6)
        assert abs(normal_cdf(inverse_normal_cdf(0.975)) - 0.975) < 1e-10

    def test_inverse_normal_round_trip_and_antisymmetry(self):
        levels = np.linspace(0.001, 0.999, 999)
        quantiles = [inverse_normal_cdf(q) for q in levels]
        assert all(a < b for a, b in zip(quantiles, quantiles[1:]))
        for q, z in zip(levels, quantiles):
            assert abs(normal_cdf(z) - q) < 1e-10
            assert inverse_normal_cdf(1.0 - q) == pytest.approx(-z, abs=1e-9)

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.5, math.nan])
    def test_inverse_normal_domain(self, q):
        with pytest.raises(DomainError):
            inverse_normal_cdf(q)


class TestBootstrap:
    def test_deterministic_across_workers(self, shrinkage_2yr):
        serial = bootstrap_se(shrinkage_2yr, reps=300, seed=7, runner=ReplicateRunner(max_workers=1))
        threaded = bootstrap_se(
            shrinkage_2yr, reps=300, seed=7, runner=ReplicateRunner(max_workers=4, chunk_size=16)
        )
        assert serial == threaded

    def test_seed_changes_result(self, shrinkage_2yr):
        assert bootstrap_se(shrinkage_2yr, reps=300, seed=1) != bootstrap_se(shrinkage_2yr, reps=300, seed=2)

    def test_needs_two_replicates(self, shrinkage_2yr):
        with pytest.raises(InputError):
            bootstrap_se(shrinkage_2yr, reps=1)

    def test_power_bootstrap_is_deterministic_across_workers(self, shrinkage_2yr):
        serial = bootstrap_power_se(shrinkage_2yr, 1.0, reps=300, seed=7, runner=ReplicateRunner(max_workers=1))
        threaded = bootstrap_power_se(
            shrinkage_2yr, 1.0, reps=300, seed=7, runner=ReplicateRunner(max_workers=3, chunk_size=20)
        )
        assert serial == threaded
        assert serial > 0.0

    def test_power_bootstrap_rejects_bad_lambda(self, shrinkage_2yr):
        with pytest.raises(InputError):
            bootstrap_power_se(shrinkage_2yr, -1.0, reps=10)

    @pytest.mark.slow
    @pytest.mark.parametrize("weight", ["uniform", "pair"])
    def test_agrees_with_delta_method(self, datasets, weight):
        scheme = SCHEMES[weight]
        for name, table in datasets.items():
            delta_se = phi_interval(table, scheme).se
            boot_se = bootstrap_se(table, scheme, reps=10_000, seed=20240917)
            assert abs(boot_se - delta_se) / delta_se < 0.15, name

    @pytest.mark.slow
    @pytest.mark.parametrize("lam", [0.0, 1.0])
    @pytest.mark.parametrize("name", ["induration_2yr", "induration_5yr"])
    def test_power_agrees_with_delta_method(self, datasets, name, lam):
        """Both tables sit far from symmetry, where the linearization of Φ^(λ) holds."""
        table = datasets[name]
        delta_se = phi_power_interval(table, lam).se
        boot_se = bootstrap_power_se(table, lam, reps=10_000, seed=20240917)
        assert abs(boot_se - delta_se) / delta_se < 0.15
