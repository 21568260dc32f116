import unittest

import pytest

from engines.codec import (
    Infinity,
    complex_list_from_json,
    pair_to_complex,
    point_to_json,
    real_to_json,
)
from engines.config import DEFAULT_GRID_N, GRID_ENV_VAR, Settings
from engines.errors import CopcalcError, PreconditionError, SchemaError


class TestSettings(unittest.TestCase):
    def test_defaults(self):
        settings = Settings.from_env({})
        self.assertEqual(settings.grid_n, DEFAULT_GRID_N)
        self.assertEqual(settings.match_tol, 1e-10)

    def test_grid_from_environment(self):
        self.assertEqual(Settings.from_env({GRID_ENV_VAR: " 17 "}).grid_n, 17)

    def test_invalid_grid_values(self):
        # valores no enteros o demasiado pequeños son errores de esquema
        for raw in ("x", "1", "2.5"):
            with self.assertRaises(SchemaError):
                Settings.from_env({GRID_ENV_VAR: raw})

    def test_replace_ignores_missing_flags(self):
        settings = Settings().replace(grid_n=None, N=32, match_tol=None)
        self.assertEqual(settings.N, 32)
        self.assertEqual(settings.grid_n, DEFAULT_GRID_N)


def test_pair_to_complex_accepts_pairs_and_reals():
    assert pair_to_complex([1, -2]) == 1 - 2j
    assert pair_to_complex(3) == 3
    assert pair_to_complex(0.5 + 1j) == 0.5 + 1j
    with pytest.raises(SchemaError):
        pair_to_complex(True)
    with pytest.raises(SchemaError):
        pair_to_complex([1, 2, 3])
    with pytest.raises(SchemaError, match="z:"):
        pair_to_complex("1", field="z")


def test_points_on_the_sphere():
    assert point_to_json(Infinity.POINT) == "inf"
    assert point_to_json(0.5j) == [0.0, 0.5]
    assert real_to_json(float("inf")) == "inf"


def test_complex_list_reports_position():
    with pytest.raises(SchemaError, match=r"values\[1\]"):
        complex_list_from_json([[1, 0], "x"])


def test_error_hierarchy():
    assert issubclass(SchemaError, CopcalcError)
    assert issubclass(PreconditionError, CopcalcError)
    assert not issubclass(SchemaError, PreconditionError)
