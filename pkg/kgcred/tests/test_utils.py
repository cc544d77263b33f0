"""Tests for kgcred utilities."""

import unittest

from kgcred.utils.validators import validate_split_ratios, validate_training_params, validate_cluster_params
from kgcred.utils.formatting import format_float, format_row
from kgcred.utils.errors import ParseError, RecordValidationError, InvalidLabelError, KGCredError


class TestValidators(unittest.TestCase):
    """Test cases for validation utilities."""

    def test_validate_split_ratios_valid(self):
        """Test validating ratios that sum to one."""
        is_valid, error_msg, ratios = validate_split_ratios(['0.8', 0.1, 0.1])
        self.assertTrue(is_valid)
        self.assertEqual(error_msg, "")
        self.assertEqual(ratios, (0.8, 0.1, 0.1))

    def test_validate_split_ratios_invalid(self):
        """Test rejecting ratios with a bad sum, sign or length."""
        self.assertFalse(validate_split_ratios([0.5, 0.2, 0.2])[0])
        self.assertFalse(validate_split_ratios([1.0, 0.0, 0.0])[0])
        self.assertFalse(validate_split_ratios([0.5, 0.5])[0])
        self.assertFalse(validate_split_ratios(['a', 'b', 'c'])[0])

    def test_validate_training_params_defaults(self):
        """Test validating minimal training parameters."""
        is_valid, error_msg, cleaned = validate_training_params({'model': 'TransE'})
        self.assertTrue(is_valid)
        self.assertEqual(cleaned['model'], 'transe')
        self.assertEqual(cleaned['k'], 100)
        self.assertEqual(cleaned['eta'], 5)
        self.assertEqual(cleaned['loss'], 'pairwise')
        self.assertEqual(cleaned['optimizer'], 'adagrad')
        self.assertEqual(cleaned['lambda_reg'], 1e-5)

    def test_validate_training_params_invalid(self):
        """Test rejecting bad training parameters."""
        self.assertFalse(validate_training_params({})[0])
        self.assertFalse(validate_training_params({'model': 'conve'})[0])
        self.assertFalse(validate_training_params({'model': 'transe', 'k': 0})[0])
        self.assertFalse(validate_training_params({'model': 'transe', 'eta': 'x'})[0])
        self.assertFalse(validate_training_params({'model': 'transe', 'loss': 'self_adversarial'})[0])
        self.assertFalse(validate_training_params({'model': 'transe', 'lr': -0.1})[0])
        self.assertFalse(validate_training_params({'model': 'transe', 'lp_norm': 4})[0])
        self.assertFalse(validate_training_params({'model': 'transe', 'transe_norm': 3})[0])

    def test_validate_optimizer_settings(self):
        """Test the ranges of the Adam, momentum and epsilon settings."""
        is_valid, _, cleaned = validate_training_params({'model': 'transe'})
        self.assertTrue(is_valid)
        self.assertEqual((cleaned['beta1'], cleaned['beta2'], cleaned['momentum'], cleaned['epsilon']),
                         (0.9, 0.999, 0.9, 1e-8))
        self.assertTrue(validate_training_params({'model': 'transe', 'beta1': 0, 'momentum': '0.5'})[0])
        for name, value in (('beta1', 1.0), ('beta2', -0.1), ('momentum', 1.5), ('epsilon', 0), ('epsilon', -1e-8)):
            is_valid, error_msg, _ = validate_training_params({'model': 'transe', name: value})
            self.assertFalse(is_valid, name)
            self.assertIn(name, error_msg)

    def test_validate_training_params_string_values(self):
        """Test that numeric strings are converted."""
        is_valid, _, cleaned = validate_training_params({'model': 'hole', 'k': '8', 'lr': '0.01', 'regularizer': None})
        self.assertTrue(is_valid)
        self.assertEqual(cleaned['k'], 8)
        self.assertEqual(cleaned['lr'], 0.01)
        self.assertEqual(cleaned['regularizer'], 'none')

    def test_validate_cluster_params(self):
        """Test validating clustering parameters."""
        is_valid, _, cleaned = validate_cluster_params({'clusters': '3', 'metric': 'Cosine'}, 10)
        self.assertTrue(is_valid)
        self.assertEqual(cleaned, {'clusters': 3, 'max_iter': 300, 'metric': 'cosine'})

        self.assertFalse(validate_cluster_params({'clusters': 11}, 10)[0])
        self.assertFalse(validate_cluster_params({'clusters': 0}, 10)[0])
        self.assertFalse(validate_cluster_params({'metric': 'manhattan'}, 10)[0])


class TestFormatting(unittest.TestCase):
    """Test cases for TSV formatting."""

    def test_format_float_round_trip(self):
        """Test that formatted floats parse back exactly."""
        for value in (0.1, 1 / 3, 595.5714285714286, -1e-300):
            self.assertEqual(float(format_float(value)), value)

    def test_format_row(self):
        """Test formatting mixed cells."""
        self.assertEqual(format_row(['a', 1, 0.5, True, False]), 'a\t1\t0.5\ttrue\tfalse')


class TestErrors(unittest.TestCase):
    """Test cases for error types."""

    def test_parse_error_location(self):
        """Test that ParseError carries path and line."""
        error = ParseError("expected 3 fields", path='facts.tsv', line=4)
        self.assertEqual(str(error), "facts.tsv:4: expected 3 fields")
        self.assertEqual(error.line, 4)
        self.assertIsInstance(error, KGCredError)

    def test_record_validation_error_field_path(self):
        """Test that RecordValidationError carries the field path."""
        error = RecordValidationError("must be non-negative", 'tweets[0].retweets', path='users.jsonl', line=2)
        self.assertEqual(error.field_path, 'tweets[0].retweets')
        self.assertIn('tweets[0].retweets', str(error))

    def test_invalid_label_error(self):
        """Test the InvalidLabelError message."""
        error = InvalidLabelError("empty label", slot='object', line=7)
        self.assertEqual(str(error), "line 7, object: empty label")


if __name__ == '__main__':
    unittest.main()
