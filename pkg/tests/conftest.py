import pytest

from newsprior.ingest import ArticleRecord
from newsprior.lexicon import LexiconBundle, SourceResources, parse_lexicon


@pytest.fixture(scope="session")
def lexicons():
    return LexiconBundle.load()


@pytest.fixture(scope="session")
def resources():
    return SourceResources.load()


@pytest.fixture(scope="session")
def make_article():
    def make(id="a1", domain="example.com", body="Plain words here.", title="", t=100):
        return ArticleRecord(id, domain, f"https://{domain}/{id}", title, body, t, "en")
    return make


def lex(name, *words):
    return parse_lexicon("\n".join(words), name)


@pytest.fixture
def golden_dir(tmp_path):
    from newsprior.fixtures import write_fixtures
    write_fixtures(tmp_path, "golden")
    return tmp_path


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, title = mark.args
    if rep.failed:
        _ACCEPTANCE[number] = (title, "FAIL")
    elif rep.when == "call":
        _ACCEPTANCE.setdefault(number, (title, "PASS"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{status} criterion {number:2d}: {title}")
