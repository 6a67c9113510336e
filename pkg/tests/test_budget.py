from limitforge.budget import Budget


def test_spend_within_limit():
    b = Budget(limit=10)
    assert b.spend(4, tag="fold")
    assert b.spend(6)
    assert b.used == 10
    assert b.exhausted
    assert not b.spend(1)
    assert b.used == 10


def test_unlimited():
    b = Budget()
    assert b.spend(10**9)
    assert not b.exhausted
    assert b.remaining() is None


def test_report_counters():
    b = Budget(limit=100)
    b.spend(3, tag="x")
    b.spend(4, tag="x")
    b.spend(1, tag="y")
    r = b.report()
    assert r == {"limit": 100, "used": 8, "counters": {"x": 7, "y": 1}}
    assert b.remaining() == 92
