import math

import numpy as np
import pytest

from parsicq.bench import (
    CSV_HEADER,
    ExperimentConfig,
    FineReference,
    analytic_reference,
    exact_hyperbolic,
    fine_reference,
    loglog_slope,
    parse_kernel,
    rhs_g,
    rows_to_csv,
    run_single,
    run_study,
    weighted_l2_error,
)
from parsicq.errors import ConfigurationError
from parsicq.kernels import hyperbolic_kernel, sectorial_kernel


class TestReferenceData:
    def test_rhs_values(self):
        assert rhs_g(-1.0) == 0
        assert rhs_g(0.0) == 0
        assert rhs_g(math.pi / 2) == pytest.approx(1.0)
        assert rhs_g(0.5) == pytest.approx(0.22984884706593014, rel=1e-14)

    def test_exact_single_term(self):
        assert exact_hyperbolic(0.5) == pytest.approx(math.sin(1.0), rel=1e-15)

    def test_exact_three_terms(self):
        assert exact_hyperbolic(2.5) == pytest.approx(0.02366671820462526, rel=1e-12)

    def test_exact_at_origin(self):
        assert exact_hyperbolic(0.0) == 0

    def test_exact_solves_delay_equation(self):
        # u(t) - u(t - 1) = g'(t) since K(s)(1 - e^{-s}) = s
        t = np.linspace(1.0, 5.0, 41)
        np.testing.assert_allclose(exact_hyperbolic(t) - exact_hyperbolic(t - 1), np.sin(2 * t), atol=1e-14)


class TestErrorNorm:
    def test_equal(self):
        assert weighted_l2_error([1.0, 2.0], [1.0, 2.0], 0.1) == 0

    def test_single_term(self):
        assert weighted_l2_error([0, 1], [0, 0], 0.5) == pytest.approx(math.sqrt(0.5))

    def test_constant_offset(self):
        a = np.arange(11.0)
        assert weighted_l2_error(a + 0.3, a, 0.2) == pytest.approx(0.3 * math.sqrt(0.2 * 11))

    def test_vectors(self):
        assert weighted_l2_error(np.ones((2, 2)), np.zeros((2, 2)), 1.0) == pytest.approx(2.0)

    def test_length_mismatch(self):
        with pytest.raises(ConfigurationError):
            weighted_l2_error([1, 2], [1], 0.1)


class TestFineReference:
    def test_stride(self):
        ref = FineReference(5.0, 8, np.arange(9.0))
        np.testing.assert_array_equal(ref.at(2), [0, 4, 8])

    def test_divisibility(self):
        with pytest.raises(ConfigurationError):
            FineReference(5.0, 8, np.arange(9.0)).at(3)

    def test_agrees_with_analytic(self):
        ref = fine_reference(hyperbolic_kernel(), "euler", 5.0, 5120)
        t = np.linspace(0, 5.0, 5121)
        rows = run_study(ExperimentConfig(N_list=(5120,)))
        assert weighted_l2_error(ref.at(5120), exact_hyperbolic(t), 5 / 5120) == pytest.approx(
            rows[0].error, rel=1e-6
        )
        coarse = weighted_l2_error(ref.at(80), exact_hyperbolic(t[::64]), 5 / 80)
        assert coarse <= 1.5 * rows[0].error


class TestConfig:
    def test_descending_rejected(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(N_list=(40, 20))

    def test_reference_must_exceed_study(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(N_list=(20, 40), reference="fine:40")

    def test_bad_reference(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(reference="fine:many")

    def test_kernel_specs(self):
        assert parse_kernel("sectorial:0.75").sector_gamma == pytest.approx(math.tan(math.pi / 6))
        assert parse_kernel("sectorial:0.5").sector_gamma == math.inf
        assert parse_kernel("matrix:3").dim == 3
        with pytest.raises(ConfigurationError):
            parse_kernel("bessel")

    def test_sectorial_has_no_analytic_reference(self):
        with pytest.raises(ConfigurationError, match="analytic reference only for hyperbolic kernel"):
            run_study(ExperimentConfig(kernel="sectorial:0.6666666666666666", N_list=(20,)))
        with pytest.raises(ConfigurationError):
            analytic_reference(sectorial_kernel(0.5), [0.0])

    def test_non_multiple_reference(self):
        with pytest.raises(ConfigurationError):
            run_study(ExperimentConfig(N_list=(20, 30), reference="fine:160"))

    def test_trapezoidal_has_no_mesh(self):
        with pytest.raises(ConfigurationError):
            run_study(ExperimentConfig(method="trapezoidal", scheme="parsimonious", N_list=(20,)))


class TestStudy:
    def test_rows_and_orders(self):
        rows = run_study(ExperimentConfig(N_list=(20, 40, 80)))
        assert [r.N for r in rows] == [20, 40, 80]
        assert rows[0].observed_order is None
        expected = math.log2(rows[0].error / rows[1].error)
        assert rows[1].observed_order == pytest.approx(expected)

    def test_standard_evaluation_count(self):
        rows = run_study(ExperimentConfig(N_list=(20, 40)))
        assert [r.laplace_evals for r in rows] == [r.L // 2 + 1 for r in rows]
        rows = run_study(ExperimentConfig(N_list=(20, 40), use_symmetry=False))
        assert [r.laplace_evals for r in rows] == [r.L for r in rows]

    def test_parsimonious_error_ratio(self):
        std = run_study(ExperimentConfig(N_list=(320, 1280)))
        par = run_study(ExperimentConfig(N_list=(320, 1280), scheme="parsimonious"))
        for a, b in zip(std, par):
            assert 0.5 <= b.error / a.error <= 2
        assert par[1].laplace_evals / std[1].laplace_evals < par[0].laplace_evals / std[0].laplace_evals

    def test_trapezoidal_standard(self):
        rows = run_study(ExperimentConfig(method="trapezoidal", N_list=(80, 160)))
        assert rows[1].error < rows[0].error

    def test_matrix_study(self):
        rows = run_study(ExperimentConfig(kernel="matrix:2", N_list=(40, 80)))
        scalar = run_study(ExperimentConfig(N_list=(40, 80)))
        assert rows[0].kernel_applications == rows[0].L
        assert rows[0].laplace_evals == rows[0].L // 2 + 1
        # second component carries the factor 1.1
        for m, s in zip(rows, scalar):
            assert m.error == pytest.approx(math.sqrt(1 + 1.1**2) * s.error, rel=1e-10)


class TestCsv:
    def test_format(self):
        rows = run_study(ExperimentConfig(N_list=(20, 40)))
        lines = rows_to_csv(rows).splitlines()
        assert lines[0] == CSV_HEADER
        first = lines[1].split(",")
        assert first[5] == ""
        assert float(first[4]) == rows[0].error
        assert repr(rows[0].error) in lines[1] or f"{rows[0].error:.17g}" in lines[1]

    def test_reproducible_apart_from_timing(self):
        cfg = ExperimentConfig(N_list=(20, 40, 80), scheme="parsimonious")

        def strip(text):
            return [line.rsplit(",", 1)[0] for line in text.splitlines()]

        assert strip(rows_to_csv(run_study(cfg))) == strip(rows_to_csv(run_study(cfg)))


def test_loglog_slope():
    x = np.array([10, 20, 40, 80])
    assert loglog_slope(x, 3 * x**0.5) == pytest.approx(0.5)


@pytest.mark.parametrize("method,low,high", [("euler", 0.35, 0.65), ("bdf2", 0.5, 0.85)])
def test_max_norm_orders(method, low, high):
    # Sup-norm orders approach 1/2 and 2/3; the weighted l2 norm decays faster.
    errors = []
    for N in (640, 1280, 2560, 5120):
        res = run_single(ExperimentConfig(method=method, N_list=(N,)), N)
        errors.append(np.max(np.abs(res.values - exact_hyperbolic(res.params.times))))
    orders = np.log2(np.array(errors[:-1]) / errors[1:])
    assert np.all((low <= orders) & (orders <= high))
