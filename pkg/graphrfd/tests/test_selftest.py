from graphrfd import selftest


def test_selftest_passes_for_fixed_seed(capsys):
    assert selftest.run_selftest(seed=7)
    assert selftest.main(["--seed", "3"]) == 0
    assert "Selftest OK" in capsys.readouterr().out


def test_selftest_reports_failure(mocker):
    mocker.patch.object(selftest, "_tools_import", side_effect=AssertionError("registry empty"))
    assert not selftest.run_selftest(seed=1)
