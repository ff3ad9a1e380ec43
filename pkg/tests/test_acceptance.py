"""Acceptance gate: one test per criterion, each printing its pass/fail line.

The criterion implementations live in sinebeta.validate so the CLI's full
suite and this module run exactly the same checks at the same tolerances.
"""

from sinebeta import validate


def _run(fn, seed=0):
    result = fn(seed=seed)
    print()
    print(result.line())
    assert result.passed, result.detail
    return result


def test_criterion_01_sine_kernel_series():
    _run(validate.criterion_1_sine_kernel)


def test_criterion_02_beta4_series_and_ode():
    _run(validate.criterion_2_beta4)


def test_criterion_03_mc_vs_exact_beta2():
    _run(validate.criterion_3_mc_beta2)


def test_criterion_04_mc_vs_exact_beta4():
    _run(validate.criterion_4_mc_beta4)


def test_criterion_05_mc_delta1_anchor_beta3():
    _run(validate.criterion_5_mc_delta1)


def test_criterion_06_small_lambda_asymptotics():
    _run(validate.criterion_6_small_lambda)


def test_criterion_07_identity_suite():
    _run(validate.criterion_7_identities)


def test_criterion_08_decay_envelope():
    _run(validate.criterion_8_decay)


def test_criterion_09_continuity_smoke():
    _run(validate.criterion_9_continuity)


def test_criterion_10_determinism_across_threads():
    _run(validate.criterion_10_determinism, seed=7)


def test_criterion_11_engine_triangle():
    _run(validate.criterion_11_triangle)
