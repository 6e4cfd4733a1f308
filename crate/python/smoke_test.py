"""Smoke test for the structbias extension module.

    pip install --no-build-isolation ./crates/py
    python python/smoke_test.py
"""

import structbias


def check_strategies():
    ids = {s["id"] for s in structbias.strategies()}
    assert "maker.triangle.star" in ids
    assert "breaker.matching.factorization" in ids
    assert all(i.startswith(("maker.", "breaker.")) for i in ids)


def check_game():
    g = structbias.Game(6, "star:2", "triangle", first="breaker")
    assert len(g.unclaimed_edges) == 15
    assert not g.legal_breaker_move([(0, 1), (2, 3)])
    assert g.legal_breaker_move([(0, 1), (0, 2)])
    try:
        g.play([(0, 1), (2, 3)])
    except ValueError as e:
        assert "wrong-structure" in str(e)
    else:
        raise AssertionError("non-star move accepted")
    g.play([(0, 1), (0, 2)])
    assert g.to_move == "maker"
    for edge in [(3, 4), (4, 5), (3, 5)]:
        if g.to_move == "breaker":
            g.play([(1, 2)] if (1, 2) in g.unclaimed_edges else [g.unclaimed_edges[0]])
        g.play([edge])
    result = g.result()
    assert result is not None and result["winner"] == "maker", result
    again = structbias.Game.from_record(g.record())
    assert again.history == g.history


def check_match():
    out = structbias.play_match(
        "maker.triangle.matching", "breaker.baseline.random", 10, "matching:5", "triangle", first="maker", seed=4
    )
    assert out["winner"] == "maker" and out["maker_moves"] <= 4, out
    assert structbias.Game.from_record(out["record"]).n == 10


def check_solver():
    assert structbias.solve(4, "free:1", "triangle")["winner"] == "breaker"
    assert structbias.solve(5, "free:1", "triangle")["winner"] == "maker"
    try:
        structbias.solve(6, "star:2", "connectivity", budget=10)
    except ValueError as e:
        assert "budget" in str(e)
    else:
        raise AssertionError("budget not enforced")


def check_lemmas():
    report = structbias.lemma_suite("deletion")
    assert report["passed"] and report["cases"] > 0


if __name__ == "__main__":
    for check in [check_strategies, check_game, check_match, check_solver, check_lemmas]:
        check()
        print(f"ok  {check.__name__}")
    print("smoke test passed")
