"""Test psiss.report."""

import pytest

from . import UnitTest

from psiss.report import Report


class TestReport(UnitTest):
    def setup_method(self):
        super().setup_method()
        self.report = Report("iss certificate")
        self.report["status"] = "certified"
        self.report["c"] = 0.1 + 0.2

    def test__init__(self):
        assert Report().title == ""
        assert len(Report()) == 0

    def test_render(self):
        assert self.report.render() == (
            "# iss certificate\nstatus: certified\nc: 0.30000000000000004\n"
        )

    def test_render_without_title(self):
        report = Report()
        report["k"] = 2
        assert report.render() == "k: 2\n"

    def test_parse(self):
        parsed = Report.parse(self.report.render())

        assert parsed.title == "iss certificate"
        assert list(parsed) == list(self.report)
        assert float(parsed["c"]) == 0.1 + 0.2

    def test_parse_skips_blank_lines(self):
        parsed = Report.parse("\nstatus: refused\n\n")
        assert parsed["status"] == "refused"
        assert parsed.title == ""

    def test_parse_malformed(self):
        with pytest.raises(ValueError):
            Report.parse("status refused\n")

    @pytest.mark.parametrize("key", ["a:b", "a\nb"])
    def test_invalid_key(self, key):
        with pytest.raises(ValueError):
            self.report[key] = 1

    def test_value_newlines_flattened(self):
        self.report["reason"] = "first\nsecond"
        assert self.report["reason"] == "first second"

    def test_contains(self):
        assert "status" in self.report
        assert "missing" not in self.report

    def test_update_with_prefix(self):
        other = Report()
        other["passed"] = "yes"
        self.report.update(other, prefix="check.")

        assert self.report["check.passed"] == "yes"
        assert len(self.report) == 3

    def test_order_preserved(self):
        keys = [key for key, _ in self.report]
        assert keys == ["status", "c"]
