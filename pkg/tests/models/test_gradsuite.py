# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the gradient check suite.

"""
import numpy as np
import pytest

from fitvnet.models.gradsuite import model_cases, operation_cases, run_grad_suite
from fitvnet.tensor.core import make_result
from fitvnet.tensor.gradcheck import finite_diff_grad_check


def test_operations_pass():
    results = run_grad_suite(cases=operation_cases(0))
    names = [r.name for r in results]
    assert names[:3] == ["conv2d", "conv2d stride 2", "conv2d groups"]
    failed = [(r.name, r.error) for r in results if not r.passed]
    assert not failed


@pytest.mark.slow
def test_models_pass():
    results = run_grad_suite(cases=model_cases(0))
    assert len(results) == 3
    assert all(r.passed for r in results), [(r.name, r.error) for r in results]


def test_failing_case_is_reported(caplog):
    def wrong(x):
        return make_result(x.data * 3, (x,), lambda g: (g * 2,))

    x = np.ones((1, 1, 2, 2))
    case = ("wrong", lambda: finite_diff_grad_check(wrong, [x]))
    results = run_grad_suite(cases=[case])
    assert not results[0].passed
    assert results[0].error > 1e-3
    assert "wrong" in caplog.text
