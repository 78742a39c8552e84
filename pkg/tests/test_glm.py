
import numpy as np
import pytest
from hypothesis import given, strategies as st

from augdesign import (
    GLOBAL_FACTORS,
    InvalidPredictorError,
    Link,
    MissingGammaError,
    ModelSpec,
    ParamPoint,
    Run,
    Term,
    info_weight,
    linear_predictor,
    regressor,
    regressor_matrix,
)
from augdesign import data

coords_strategy = st.tuples(
    *[st.floats(-2, 2, allow_nan=False) for _ in GLOBAL_FACTORS]
)


class TestLink:
    def test_identity_mean(self):
        assert Link.IDENTITY.mean(3.5) == 3.5

    def test_inverse_mean(self):
        assert Link.INVERSE.mean(0.25) == 4.0

    def test_log_mean(self):
        assert Link.LOG.mean(0.0) == 1.0

    @pytest.mark.parametrize("link", [Link.IDENTITY, Link.INVERSE])
    def test_nonpositive_predictor_rejected(self, link):
        with pytest.raises(InvalidPredictorError):
            link.mean(0.0)

    def test_log_weight_is_one(self):
        assert info_weight(Link.LOG, -7.0) == 1.0

    @pytest.mark.parametrize("link", [Link.IDENTITY, Link.INVERSE])
    def test_weight_is_inverse_square(self, link):
        assert info_weight(link, 4.0) == pytest.approx(1 / 16)

    @pytest.mark.parametrize("link", [Link.IDENTITY, Link.INVERSE])
    def test_weight_domain(self, link):
        with pytest.raises(InvalidPredictorError):
            info_weight(link, -1.0)


class TestTerm:
    def test_interaction_is_order_free(self):
        assert Term.interaction(2, 0) == Term.interaction(0, 2)

    def test_interaction_needs_distinct_factors(self):
        with pytest.raises(ValueError):
            Term.interaction(1, 1)

    def test_values(self):
        x = [1.5, -2.0, 0.5]
        assert Term.intercept().value(x) == 1.0
        assert Term.main(1).value(x) == -2.0
        assert Term.square(0).value(x) == 2.25
        assert Term.interaction(0, 2).value(x) == 0.75


class TestModelSpec:
    def test_intercept_must_come_first(self):
        with pytest.raises(ValueError):
            ModelSpec("m", Link.LOG, ("L",), (Term.main(0), Term.intercept()))

    def test_duplicate_terms_rejected(self):
        with pytest.raises(ValueError):
            ModelSpec(
                "m", Link.LOG, ("L",),
                (Term.intercept(), Term.main(0), Term.main(0)),
            )

    def test_term_index_bounds_checked(self):
        with pytest.raises(ValueError):
            ModelSpec("m", Link.LOG, ("L",), (Term.intercept(), Term.main(1)))

    def test_unknown_factor_rejected(self):
        with pytest.raises(ValueError):
            ModelSpec("m", Link.LOG, ("Q",), (Term.intercept(),))

    @pytest.mark.parametrize("name", data.RESPONSES)
    def test_json_round_trip(self, name):
        spec = data.MODELS[name]
        assert ModelSpec.from_dict(spec.to_dict()) == spec

    def test_global_indices(self):
        assert data.MODELS["temperature"].global_indices == (0, 1, 2)
        assert data.MODELS["velocity"].global_indices == (0, 1, 2, 3)

    def test_term_counts(self):
        expected = {"temperature": 5, "velocity": 7,
                    "flame_width": 6, "flame_intensity": 9}
        for name, p in expected.items():
            assert data.MODELS[name].p == p


class TestRun:
    def test_out_of_box_coordinate_rejected(self):
        with pytest.raises(ValueError):
            Run((0.0, 0.0, 2.5, 0.0))

    def test_bad_day_rejected(self):
        with pytest.raises(ValueError):
            Run((0.0, 0.0, 0.0, 0.0), day=2)


class TestRegressor:
    def test_center_run_is_intercept_only(self):
        z = regressor(data.MODELS["flame_intensity"], Run((0, 0, 0, 0)))
        assert z[0] == 1.0
        assert np.all(z[1:] == 0.0)

    def test_inactive_factor_ignored(self):
        spec = data.MODELS["temperature"]
        a = regressor(spec, Run((1.0, -1.0, 0.5, -2.0)))
        b = regressor(spec, Run((1.0, -1.0, 0.5, 2.0)))
        assert np.array_equal(a, b)

    @given(st.lists(coords_strategy, min_size=1, max_size=6))
    def test_matrix_agrees_with_scalar_version(self, rows):
        spec = data.MODELS["flame_intensity"]
        Z = regressor_matrix(spec, np.array(rows))
        for i, row in enumerate(rows):
            assert np.allclose(Z[i], regressor(spec, Run(row)))


class TestLinearPredictor:
    def test_day_shift(self):
        spec = data.MODELS["temperature"]
        params = data.ESTIMATES["temperature"]
        base = linear_predictor(spec, params, Run((0, 0, 0, 0), day=0))
        shifted = linear_predictor(spec, params, Run((0, 0, 0, 0), day=1))
        assert shifted - base == pytest.approx(params.gamma)

    def test_missing_gamma(self):
        spec = data.MODELS["temperature"]
        params = ParamPoint(data.ESTIMATES["temperature"].beta)
        with pytest.raises(MissingGammaError):
            linear_predictor(spec, params, Run((0, 0, 0, 0), day=1))

    def test_beta_length_checked(self):
        with pytest.raises(ValueError):
            linear_predictor(
                data.MODELS["temperature"], ParamPoint((1.0,)), Run((0, 0, 0, 0))
            )


def test_param_point_requires_positive_shape():
    with pytest.raises(ValueError):
        ParamPoint((1.0,), nu=0.0)
