"""One test per acceptance criterion; each prints its own pass/fail line."""

import pytest

from rieszstrat import acceptance


@pytest.mark.parametrize("cid", sorted(acceptance.CRITERIA))
def test_criterion(cid, capsys):
    result = acceptance.CRITERIA[cid](seed=0)
    verdict = "PASS" if result["passed"] else "FAIL"
    with capsys.disabled():
        print(f"criterion {cid:2d}: {verdict} — {result['name']}")
    assert result["id"] == cid
    assert result["passed"], result["details"]
