import mpmath
import pytest

mpmath.mp.dps = 40


def pytest_addoption(parser):
    parser.addoption("--fullscale", action="store_true", default=False,
                     help="run the hours-long full-size reproduction")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--fullscale"):
        return
    skip = pytest.mark.skip(reason="needs --fullscale")
    for item in items:
        if "fullscale" in item.keywords:
            item.add_marker(skip)


def mp_cdf(x):
    return mpmath.ncdf(mpmath.mpf(x))


def mp_sf(x):
    return mpmath.ncdf(-mpmath.mpf(x))


def mp_pdf(x):
    return mpmath.npdf(mpmath.mpf(x))


def mp_mixture_cdf(eps, atoms, t):
    t = mpmath.mpf(t)
    alt = sum(mpmath.mpf(w) * mp_cdf(t - m) for m, w in atoms)
    return (1 - mpmath.mpf(eps)) * mp_cdf(t) + mpmath.mpf(eps) * alt


def mp_d_ratio(mu, tau, tau_p):
    mu, tau, tau_p = (mpmath.mpf(v) for v in (mu, tau, tau_p))
    return (mp_cdf(tau) - mp_cdf(tau - mu)) / (mp_cdf(tau_p) - mp_cdf(tau_p - mu))


def mp_mixture_sf(eps, atoms, t):
    t = mpmath.mpf(t)
    alt = sum(mpmath.mpf(w) * mp_sf(t - m) for m, w in atoms)
    return (1 - mpmath.mpf(eps)) * mp_sf(t) + mpmath.mpf(eps) * alt


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion and echo it."""

    def record(number, title, ok, detail):
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
