import pytest

from wikitig.model import InfoboxTable, PairCell

import fixtures_html

_acceptance_results = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_results:
        terminalreporter.section("acceptance criteria")
        for name, outcome in _acceptance_results:
            terminalreporter.write_line(f"{outcome.upper():6s} {name}")


@pytest.fixture
def figure_table() -> InfoboxTable:
    """The six-pair fish-and-chips table."""
    return InfoboxTable([PairCell(h, v) for h, v in fixtures_html.FIGURE_TABLE_CELLS])


@pytest.fixture
def dump_dir(tmp_path):
    """The ten-page fixture dump as a directory of *.html files."""
    d = tmp_path / "dump"
    d.mkdir()
    for page_id, html in fixtures_html.DUMP_PAGES.items():
        (d / f"{page_id}.html").write_text(html, encoding="utf-8")
    return d
