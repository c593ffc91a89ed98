import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqfactor.engine import (
    Budget,
    BudgetExhausted,
    Found,
    NoNontrivialFactor,
    NormalizedInput,
    SearchState,
    XScanState,
    checkpoint_line,
    fermat_factor,
    init_search,
    normalize_input,
    parse_checkpoint,
    predict_k,
    resume_fermat,
    resume_xscan,
    step,
    xscan_factor,
)
from sqfactor.numeric import ceil_sqrt, is_perfect_square
from sqfactor.semiprimes import SemiprimeSpec, generate

odd_moduli = st.integers(min_value=1, max_value=1 << 128).map(lambda v: 2 * v + 1)


def _balanced_divisor(n):
    # oracle: largest divisor not exceeding sqrt(n), by trial division
    best = 1
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            best = d
    return best


class TestSearchState:
    def test_init_reference_values(self):
        assert init_search(187) == SearchState(n=187, y0=14, k=0, d=9)
        assert init_search(9) == SearchState(n=9, y0=3, k=0, d=0)
        assert init_search(5959) == SearchState(n=5959, y0=78, k=0, d=125)

    def test_iterations_equals_k(self):
        s = init_search(5959)
        assert s.iterations == 0
        assert step(step(s)).iterations == 2

    @pytest.mark.parametrize("bad", [1, 2, 4, 0, -3, 187.0])
    def test_init_rejects_bad_moduli(self, bad):
        with pytest.raises(ValueError):
            init_search(bad)

    def test_state_validates_fields(self):
        with pytest.raises(ValueError):
            SearchState(n=187, y0=13, k=0, d=9)  # y0 must be the ceiling root
        with pytest.raises(ValueError):
            SearchState(n=187, y0=14, k=0, d=10)  # d inconsistent
        with pytest.raises(ValueError):
            SearchState(n=187, y0=14, k=-1, d=9)


class TestStep:
    def test_reference_increments(self):
        assert step(SearchState(187, 14, 0, 9)) == SearchState(187, 14, 1, 38)
        assert step(SearchState(9, 3, 0, 0)) == SearchState(9, 3, 1, 7)
        assert step(SearchState(5959, 78, 0, 125)) == SearchState(5959, 78, 1, 282)

    def test_recurrence_matches_direct_multiplication(self):
        rng = random.Random(11)
        for _ in range(10_000):
            n = rng.randrange(3, 1 << 48) | 1
            y0 = ceil_sqrt(n)
            k = rng.randrange(0, 1 << 20)
            state = SearchState(n=n, y0=y0, k=k, d=(y0 + k) ** 2 - n)
            out = step(state)
            assert out.d == (y0 + k + 1) ** 2 - n
            assert out.k == k + 1

    @given(odd_moduli, st.integers(min_value=0, max_value=1 << 40))
    @settings(max_examples=200)
    def test_recurrence_property(self, n, k):
        y0 = ceil_sqrt(n)
        state = SearchState(n=n, y0=y0, k=k, d=(y0 + k) ** 2 - n)
        assert step(state).d == (y0 + k + 1) ** 2 - n


class TestFermatFactor:
    def test_reference_factorizations(self):
        assert fermat_factor(187) == Found(p=11, q=17, k=0, iterations=0)
        assert fermat_factor(9) == Found(p=3, q=3, k=0, iterations=0)
        assert fermat_factor(5959) == Found(p=59, q=101, k=2, iterations=2)

    def test_prime_input_reaches_trivial_representation(self):
        out = fermat_factor(17)
        assert out == NoNontrivialFactor(iterations=4)  # stops at y = 9, x = 8
        # iterations there is always (n+1)/2 - ceil_sqrt(n)
        for p in (3, 5, 7, 101, 9973):
            out = fermat_factor(p)
            assert isinstance(out, NoNontrivialFactor)
            assert out.iterations == (p + 1) // 2 - ceil_sqrt(p)

    def test_returns_balanced_divisor_small_range(self):
        for n in range(9, 20_000, 2):
            out = fermat_factor(n)
            p = _balanced_divisor(n)
            if p == 1:
                assert isinstance(out, NoNontrivialFactor)
            else:
                assert (out.p, out.q) == (p, n // p)
                assert out.iterations == (p + n // p) // 2 - ceil_sqrt(n)

    def test_matches_single_step_reference_walk(self):
        # the production loop skips candidates a residue table proves
        # non-square; a plain walk over every k must see the same hit
        rng = random.Random(23)
        moduli = [rng.randrange(9, 1 << 34) | 1 for _ in range(150)]
        for n in moduli:
            state = init_search(n)
            reference = None
            for _ in range(3000):
                test = is_perfect_square(state.d)
                if test.is_square:
                    reference = ("hit", state.k, test.root)
                    break
                state = step(state)
            out = fermat_factor(n, Budget(max_iterations=3000))
            if reference is None:
                assert isinstance(out, BudgetExhausted)
                assert out.iterations == 3000
            else:
                _, k, x = reference
                y = state.y0 + k
                if y - x == 1:
                    assert isinstance(out, NoNontrivialFactor)
                    assert out.iterations == k
                else:
                    assert out == Found(p=y - x, q=y + x, k=k, iterations=k)

    def test_iteration_identity_on_semiprimes(self):
        for seed in range(300):
            sp = generate(SemiprimeSpec(bits=32, max_gap=1 << 16, seed=seed))
            out = fermat_factor(sp.n)
            assert out == Found(
                p=sp.p,
                q=sp.q,
                k=(sp.p + sp.q) // 2 - ceil_sqrt(sp.n),
                iterations=(sp.p + sp.q) // 2 - ceil_sqrt(sp.n),
            )

    def test_found_pair_is_ordered_and_multiplies_back(self):
        rng = random.Random(7)
        for _ in range(500):
            n = rng.randrange(9, 1 << 40) | 1
            out = fermat_factor(n, Budget(max_iterations=50_000))
            if isinstance(out, Found):
                assert 1 < out.p <= out.q
                assert out.p * out.q == n

    def test_x_parity_opposite_to_y(self):
        # odd n = y*y - x*x forces y and x to differ in parity
        rng = random.Random(13)
        for _ in range(300):
            n = rng.randrange(9, 1 << 36) | 1
            out = fermat_factor(n, Budget(max_iterations=20_000))
            if isinstance(out, Found):
                y = (out.p + out.q) // 2
                x = (out.q - out.p) // 2
                assert (y ^ x) & 1 == 1

    def test_rejects_bad_input(self):
        for bad in (0, 1, 2, 4, 100):
            with pytest.raises(ValueError):
                fermat_factor(bad)


class TestBudgets:
    def test_exhaustion_reports_current_state(self):
        out = fermat_factor(5959, Budget(max_iterations=1))
        assert out == BudgetExhausted(
            iterations=1, resume=SearchState(n=5959, y0=78, k=1, d=282)
        )

    def test_zero_budget_examines_nothing(self):
        out = fermat_factor(187, Budget(max_iterations=0))
        assert isinstance(out, BudgetExhausted)
        assert out.iterations == 0
        assert out.resume == init_search(187)

    def test_resume_fidelity_across_split_points(self):
        # budget b then resume must replay the unlimited run exactly
        n = 3 * 333331  # found at k = 165667
        full = fermat_factor(n)
        assert isinstance(full, Found)
        for split in (1, 2, 63, 64, 4096, 100_000, full.k):
            part = fermat_factor(n, Budget(max_iterations=split))
            if split >= full.k + 1:
                assert part == full
                continue
            assert isinstance(part, BudgetExhausted)
            assert part.iterations == split == part.resume.k
            assert resume_fermat(part.resume) == full

    def test_chained_resumes_match_single_run(self):
        n = 99999999999973 * 3  # large k, walk in three stints
        budget = Budget(max_iterations=1000)
        first = fermat_factor(n, budget)
        second = resume_fermat(first.resume, budget)
        assert isinstance(second, BudgetExhausted)
        assert second.iterations == 2000
        direct = fermat_factor(n, Budget(max_iterations=2000))
        assert direct == second

    def test_time_budget_stops_and_resumes(self):
        n = (2**89 - 1) * (2**107 - 1)  # enormous gap, will not finish
        out = fermat_factor(n, Budget(max_seconds=0.05))
        assert isinstance(out, BudgetExhausted)
        assert out.resume.d == (out.resume.y0 + out.resume.k) ** 2 - n
        # picking up from the time-boxed state keeps the walk aligned
        more = resume_fermat(out.resume, Budget(max_iterations=100))
        assert more.iterations == out.iterations + 100

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            Budget(max_iterations=-1)
        with pytest.raises(ValueError):
            Budget(max_seconds=0)


class TestPredictK:
    def test_reference_values(self):
        assert predict_k(187, 3) == 0
        assert predict_k(187, 4) is None  # 203 is between 14**2 and 15**2
        assert predict_k(5959, 21) == 2

    def test_rejects_roots_below_search_start(self):
        # 9 + 0 = 9 = 3**2 with root exactly at the start, k = 0
        assert predict_k(9, 0) == 0
        # n = 25: x = 0 gives root 5 = ceil_sqrt, fine; no smaller root exists
        assert predict_k(25, 0) == 0

    def test_consistency_with_fermat(self):
        rng = random.Random(3)
        for _ in range(400):
            n = rng.randrange(9, 1 << 32) | 1
            out = fermat_factor(n, Budget(max_iterations=10_000))
            if isinstance(out, Found):
                assert predict_k(n, (out.q - out.p) // 2) == out.k

    def test_predicted_deficit_is_exact(self):
        for n, x in ((187, 3), (5959, 21), (21, 2)):
            k = predict_k(n, x)
            y0 = ceil_sqrt(n)
            assert (y0 + k) ** 2 - n == x * x

    def test_validation(self):
        with pytest.raises(ValueError):
            predict_k(10, 1)
        with pytest.raises(ValueError):
            predict_k(187, -1)


class TestXScan:
    def test_reference_factorizations(self):
        assert xscan_factor(187) == Found(p=11, q=17, k=0, iterations=3)
        assert xscan_factor(9) == Found(p=3, q=3, k=0, iterations=0)
        assert xscan_factor(21) == Found(p=3, q=7, k=0, iterations=2)

    def test_agrees_with_fermat_on_pairs(self):
        for n in range(9, 5000, 2):
            a = fermat_factor(n)
            b = xscan_factor(n)
            if isinstance(a, Found):
                assert (a.p, a.q) == (b.p, b.q)
            else:
                assert isinstance(b, NoNontrivialFactor)

    def test_prime_input(self):
        out = xscan_factor(17)
        assert out == NoNontrivialFactor(iterations=8)  # trivial rep at x = 8

    def test_budget_and_resume(self):
        out = xscan_factor(5959, Budget(max_iterations=2))
        assert out == BudgetExhausted(iterations=2, resume=XScanState(5959, 78, 2))
        done = resume_xscan(out.resume)
        assert done == Found(p=59, q=101, k=2, iterations=21)

    def test_resume_past_boundary_rejected(self):
        with pytest.raises(ValueError):
            resume_xscan(XScanState(n=17, y0=5, x=9))


class TestCheckpoints:
    def test_round_trip_y_walk(self):
        state = fermat_factor(5959, Budget(max_iterations=1)).resume
        line = checkpoint_line(state)
        assert line == "n=5959 y0=78 k=1"
        assert parse_checkpoint(line) == state

    def test_round_trip_x_walk(self):
        state = XScanState(n=5959, y0=78, x=7)
        line = checkpoint_line(state)
        assert line == "n=5959 y0=78 x=7"
        assert parse_checkpoint(line) == state

    @given(odd_moduli, st.integers(min_value=0, max_value=1 << 30))
    @settings(max_examples=100)
    def test_round_trip_property(self, n, k):
        if n < 3:
            return
        y0 = ceil_sqrt(n)
        k = min(k, (n + 1) // 2 - y0)
        state = SearchState(n=n, y0=y0, k=k, d=(y0 + k) ** 2 - n)
        assert parse_checkpoint(checkpoint_line(state)) == state

    @pytest.mark.parametrize(
        "line",
        [
            "",
            "n=187",
            "n=187 y0=14",
            "n=187 y0=14 k=0 x=0",
            "n=187 y0=13 k=0",  # wrong start
            "n=187 y0=14 k=-1",
            "n=abc y0=14 k=0",
            "n=187 n=187 y0=14 k=0",
            "187 14 0",
        ],
    )
    def test_malformed_lines_rejected(self, line):
        with pytest.raises(ValueError):
            parse_checkpoint(line)


class TestNormalizeInput:
    def test_reference_values(self):
        assert normalize_input(374) == NormalizedInput(two_exponent=1, residual=187)
        assert normalize_input(8) == NormalizedInput(two_exponent=3, residual=1)
        assert normalize_input(187) == NormalizedInput(two_exponent=0, residual=187)

    def test_power_of_two_is_fully_factored(self):
        out = normalize_input(8)
        assert out.is_fully_factored
        assert out.two_factors() == [2, 2, 2]

    @given(st.integers(min_value=0, max_value=60), st.integers(min_value=0, max_value=1 << 64))
    @settings(max_examples=200)
    def test_round_trip_property(self, a, half):
        odd = 2 * half + 1
        n = (1 << a) * odd
        if n < 2:
            return
        out = normalize_input(n)
        assert out.residual % 2 == 1
        assert (1 << out.two_exponent) * out.residual == n

    def test_rejects_below_two(self):
        for bad in (1, 0, -6):
            with pytest.raises(ValueError):
                normalize_input(bad)
