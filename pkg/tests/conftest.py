import pytest

from dirhub import Hub

# scrypt dialed down so account-heavy tests stay fast
CHEAP_PASSWORDS = {"n": 8, "r": 8, "p": 1}
DEFAULT_PASSWORD = "correct horse battery staple"


class FakeClock:
    def __init__(self, start: float = 1_700_000_000.0):
        self.t = start

    def __call__(self) -> float:
        return self.t

    def advance(self, seconds: float) -> float:
        self.t += seconds
        return self.t


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def hub(clock):
    return Hub(clock=clock, password_cost=CHEAP_PASSWORDS)


@pytest.fixture
def users(hub):
    """Three ready-made users: returns {name: user_id}."""
    return {
        name: hub.accounts.register(name, DEFAULT_PASSWORD).id
        for name in ("alice", "bob", "carol")
    }


def register(hub, name):
    return hub.accounts.register(name, DEFAULT_PASSWORD).id
