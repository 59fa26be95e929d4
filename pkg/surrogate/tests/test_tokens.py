"""Unit tests for the row-pair token reshape."""

import numpy as np
import pytest

import surrogate as sg


class TestPatchify:
    """Tokenization of padded weight matrices."""

    def test_round_trip_is_identity(self):
        """unpatchify(patchify(x)) returns x exactly."""
        rng = np.random.default_rng(3)
        for _ in range(10):
            x = rng.standard_normal((128, 32))
            assert np.array_equal(sg.unpatchify(sg.patchify(x)), x)

    @pytest.mark.parametrize("token", [0, 17, 63])
    def test_tokens_are_consecutive_row_pairs(self, token):
        """Token t holds rows 2t and 2t+1 concatenated in order."""
        x = np.arange(128 * 32, dtype=float).reshape(128, 32)
        expected = np.concatenate([x[2 * token], x[2 * token + 1]])
        assert np.array_equal(sg.patchify(x)[token], expected)

    def test_unit_entry_lands_in_first_feature(self):
        """A single 1.0 at (0, 0) becomes token 0, feature 0."""
        x = np.zeros((128, 32))
        x[0, 0] = 1.0
        tokens = sg.patchify(x)
        assert tokens[0, 0] == 1.0
        assert np.count_nonzero(tokens) == 1

    def test_odd_row_lands_in_upper_half(self):
        """An entry on an odd row maps past feature 32 of the same token."""
        x = np.zeros((128, 32))
        x[1, 5] = 2.0
        assert sg.patchify(x)[0, 32 + 5] == 2.0

    @pytest.mark.parametrize("shape", [(128, 31), (64, 64), (127, 32), (128,)])
    def test_wrong_input_shape_rejected(self, shape):
        """Any shape but 128x32 is a dimension error."""
        with pytest.raises(sg.ValidationError, match="shape"):
            sg.patchify(np.zeros(shape))

    @pytest.mark.parametrize("shape", [(15, 32), (64, 63), (128, 32)])
    def test_wrong_token_shape_rejected(self, shape):
        """unpatchify accepts only the 64x64 token grid."""
        with pytest.raises(sg.ValidationError, match="shape"):
            sg.unpatchify(np.zeros(shape))
