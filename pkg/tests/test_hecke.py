import itertools
import random
import threading

import pytest

import oracles
from klkostant import hecke
from klkostant.hecke import (
    HeckeElement,
    RankCapExceeded,
    bar_element,
    c_mul,
    c_mul_rule,
    c_mul_simple,
    c_to_t,
    d_in_t_basis,
    d_mul_c,
    d_mul_simple,
    d_mul_word,
    element_from_json,
    kl_c_basis,
    kl_poly,
    km_certificate,
    mu,
    simple_c_mul,
    t_inverse_simple,
    t_mul,
    t_mul_simple,
    t_to_c,
    t_to_d,
    trace,
    walk_identity,
)
from klkostant.laurent import ONE, V, V_PLUS_VINV, ZERO, LaurentPoly, parse_laurent
from klkostant.symgroup import (
    bruhat_leq,
    compose,
    descents_left,
    descents_right,
    from_word,
    identity,
    inverse,
    length,
    longest_element,
    parse_perm,
    shift,
    simple,
    support,
)


def P(text):
    return parse_perm(text)


def perms(n):
    return list(itertools.permutations(range(1, n + 1)))


def T(x):
    return HeckeElement.basis_element("T", x)


def C(x):
    return HeckeElement.basis_element("C", x)


def D(x):
    return HeckeElement.basis_element("D", x)


def lp(d):
    return LaurentPoly(d)


class TestStandardBasis:
    def test_quadratic_relation(self):
        s, e = simple(1, 3), identity(3)
        assert t_mul_simple(T(s), 1) == HeckeElement(3, "T", {s: parse_laurent("v^-1 - v"), e: ONE})
        assert t_mul_simple(T(e), 1) == T(s)
        assert t_mul_simple(T(simple(1, 3)), 2) == T(from_word([1, 2], 3))

    def test_inverse_of_simple(self):
        inv = t_inverse_simple(2, 4)
        assert t_mul(T(simple(2, 4)), inv) == T(identity(4))
        assert bar_element(T(simple(2, 4))) == inv
        assert inv.eval_at_one() == {simple(2, 4): 1}

    def test_trace_of_products(self):
        for a in perms(4):
            for b in perms(4):
                tr = trace(t_mul(T(a), T(b)))
                assert tr == (ONE if b == inverse(a) else ZERO)
        assert trace(T(identity(3))) == ONE
        assert trace(T(simple(1, 3))) == ZERO

    def test_product_matches_oracle(self):
        rng = random.Random(3)
        elems = perms(4)
        for _ in range(60):
            a, b = rng.choice(elems), rng.choice(elems)
            ha = kl_c_basis(a)
            ours = t_mul(ha, T(b))
            ref = oracles.hecke_t_mul({x: dict(c.terms()) for x, c in ha.terms.items()}, {b: {0: 1}})
            assert {x: lp(c) for x, c in ref.items()} == dict(ours.terms)

    def test_bar_is_an_involution(self):
        rng = random.Random(5)
        for _ in range(20):
            h = HeckeElement(4, "T", {rng.choice(perms(4)): lp({rng.randint(-2, 2): rng.randint(-3, 3)})
                                      for _ in range(3)})
            assert bar_element(bar_element(h)) == h
        assert bar_element(T(identity(4))) == T(identity(4))


class TestKLBasis:
    def test_small_elements(self):
        s = simple(1, 2)
        assert kl_c_basis(s) == HeckeElement(2, "T", {s: ONE, identity(2): V})
        assert kl_c_basis(identity(3)) == T(identity(3))
        assert kl_poly(s, identity(2)) == V
        assert kl_poly(P("3412"), P("1324")) == parse_laurent("v^3 + v")

    def test_longest_in_s3(self):
        w0 = longest_element(3)
        h = kl_c_basis(w0)
        assert set(h.terms) == set(perms(3))
        for x, c in h.terms.items():
            assert c == lp({length(w0) - length(x): 1})

    def test_matches_classical_oracle(self):
        for n in (3, 4, 5):
            for x in perms(n):
                for y in perms(n):
                    assert kl_poly(x, y) == lp(oracles.p_in_v(x, y)), (x, y)

    def test_mu(self):
        assert mu(P("1324"), P("4231")) == 0
        assert mu(P("4231"), P("1324")) == 0
        for x in perms(4):
            for i in range(1, 4):
                assert mu(x, compose(x, simple(i, 4))) == 1
                assert mu(x, compose(simple(i, 4), x)) == 1
        for x in perms(5):
            for y in perms(5):
                m = mu(x, y)
                assert m == mu(y, x)
                assert m == oracles.classical_mu(x, y) + oracles.classical_mu(y, x)
                if (length(x) - length(y)) % 2 == 0:
                    assert m == 0

    def test_bar_invariant_and_unitriangular_on_s5(self):
        for x in perms(5):
            h = kl_c_basis(x)
            assert bar_element(h) == h
            assert h.coeff(x) == ONE
            for y, c in h.terms.items():
                assert bruhat_leq(y, x)
                if y != x:
                    assert c.min_degree() >= 1

    def test_shift_compatibility(self):
        for x in perms(3):
            for y in perms(3):
                for i in (1, 2, 3):
                    assert kl_poly(x, y) == kl_poly(shift(x, 5, i), shift(y, 5, i))

    def test_t_to_c_inverts_c_to_t(self):
        rng = random.Random(11)
        for _ in range(30):
            h = HeckeElement(4, "C", {rng.choice(perms(4)): lp({rng.randint(-2, 2): rng.randint(-3, 3)})
                                      for _ in range(3)})
            assert t_to_c(c_to_t(h)) == h


class TestCProducts:
    def test_documented_products(self):
        s1, s2 = simple(1, 3), simple(2, 3)
        h = simple_c_mul(2, simple_c_mul(1, C(s2)))
        assert h == HeckeElement(3, "C", {from_word([2, 1, 2], 3): ONE, s2: ONE})
        x, y = P("21435"), P("12354")
        assert c_mul(x, y) == {compose(x, y): ONE}
        w = P("4312")
        assert c_mul(w, simple(1, 4)) == {w: V_PLUS_VINV}

    def test_rules_match_standard_basis(self):
        for w in perms(4):
            for i in range(1, 4):
                s = simple(i, 4)
                right = t_to_c(t_mul(kl_c_basis(w), kl_c_basis(s)))
                left = t_to_c(t_mul(kl_c_basis(s), kl_c_basis(w)))
                assert c_mul_simple(C(w), i) == right
                assert simple_c_mul(i, C(w)) == left

    def test_gamma_positivity_on_s4(self):
        for x in perms(4):
            for y in perms(4):
                prod = c_mul(x, y)
                assert prod == c_mul_rule(x, y)
                assert all(g.is_nonneg() for g in prod.values())
                if length(compose(x, y)) == length(x) + length(y):
                    assert prod.get(compose(x, y), ZERO) != ZERO

    def test_rule_product_on_random_s5_pairs(self):
        rng = random.Random(17)
        for _ in range(40):
            x, y = rng.choice(perms(5)), rng.choice(perms(5))
            assert c_mul(x, y) == c_mul_rule(x, y)


class TestDualBasis:
    def test_defining_trace_identity(self):
        for x in perms(4):
            dx = d_in_t_basis(x)
            for y in perms(4):
                tr = trace(t_mul(dx, kl_c_basis(inverse(y))))
                assert tr == (ONE if x == y else ZERO)
        assert d_in_t_basis(identity(1)) == T(identity(1))

    def test_simple_rule(self):
        s = simple(1, 2)
        assert d_mul_simple(D(identity(2)), 1).is_zero()
        assert d_mul_simple(D(s), 1) == HeckeElement(2, "D", {s: V_PLUS_VINV, identity(2): ONE})
        for z in perms(4):
            for i in range(1, 4):
                prod = d_mul_simple(D(z), i)
                assert (not prod.is_zero()) == (i in descents_right(z))
                ref = t_to_d(t_mul(d_in_t_basis(z), kl_c_basis(simple(i, 4))))
                assert prod == ref

    def test_word_products(self):
        z = P("4231")
        assert d_mul_word(z, [1, 3]) == d_mul_c(z, P("2143"))

    def test_longest_in_s3(self):
        w0 = longest_element(3)
        dw0 = d_in_t_basis(w0)
        for i in (1, 2):
            assert t_to_d(t_mul(dw0, kl_c_basis(simple(i, 3)))) == d_mul_simple(D(w0), i)

    def test_product_matches_standard_basis(self):
        for z in perms(4):
            dz = d_in_t_basis(z)
            for x in perms(4):
                assert d_mul_c(z, x) == t_to_d(t_mul(dz, kl_c_basis(x)))

    def test_duality_on_s4(self):
        prods = {(b, c): d_mul_c(b, c) for b in perms(4) for c in perms(4)}
        for a in perms(4):
            for c in perms(4):
                cprod = c_mul(a, inverse(c))
                for b in perms(4):
                    assert prods[b, c].coeff(a) == cprod.get(b, ZERO)

    def test_algorithms_agree(self):
        for z in perms(4):
            for x in perms(4):
                assert d_mul_c(z, x, "A") == d_mul_c(z, x, "B")
        rng = random.Random(2024)
        elems = perms(5)
        for _ in range(500):
            z, x = rng.choice(elems), rng.choice(elems)
            assert d_mul_c(z, x, "A") == d_mul_c(z, x, "B"), (z, x)

    def test_documented_products(self):
        z = from_word([2, 1, 3, 2, 1, 4, 3, 2], 5)
        assert d_mul_c(z, from_word([2], 5)) != d_mul_c(z, from_word([3, 2], 5))
        p = from_word([3, 4, 5, 3], 6)
        assert d_mul_c(p, from_word([3, 2, 1, 4, 3, 2, 5, 4, 3], 6)).is_zero()
        assert not d_mul_c(from_word([1, 3, 2, 1, 4, 3], 6), from_word([3, 2, 1, 4, 3, 5], 6)).is_zero()

    def test_zero_shortcut_is_consistent(self):
        for z in perms(5):
            for x in perms(5):
                if not descents_left(x) <= descents_right(z):
                    assert d_mul_c(z, x).is_zero()


class TestCertificates:
    def test_km_certificate(self):
        assert km_certificate(simple(1, 2), simple(1, 2)).verdict == "IndecomposableCertified"
        assert km_certificate(simple(2, 4), P("2134")).verdict == "Zero"
        with pytest.raises(ValueError):
            km_certificate(P("231"), P("321"))
        # the a = 2 degree case of a 3412-pattern involution
        zp = P("2536147")
        y = shift(P("3412"), 7, 3)
        cert = km_certificate(y, zp)
        assert cert.degree == 2 and cert.coefficient != 0 and cert.product_nonzero

    def test_certificate_consistency_on_s4(self):
        for z in perms(4):
            for x in perms(4):
                if x == inverse(x):
                    cert = km_certificate(x, z)
                    assert cert.product_nonzero == (cert.verdict != "Zero")

    def test_walk_identity(self):
        walk = [P("235146"), P("231546"), P("213546")]
        assert walk_identity(walk, [3, 2, 1])
        assert walk_identity([P("2134")], [1])
        with pytest.raises(ValueError):
            walk_identity([P("1234")], [1])


class TestElements:
    def test_mixing_bases_is_rejected(self):
        with pytest.raises(ValueError):
            T(identity(3)) + C(identity(3))
        with pytest.raises(ValueError):
            T(identity(3)) + T(identity(4))
        with pytest.raises(ValueError):
            HeckeElement(3, "X", {})

    def test_zero_terms_are_dropped(self):
        h = HeckeElement(3, "T", {identity(3): ZERO, simple(1, 3): ONE})
        assert list(h.terms) == [simple(1, 3)]

    def test_json_roundtrip(self):
        h = d_mul_c(P("4231"), P("2143"))
        assert element_from_json(h.to_json()) == h
        assert h.to_json()["basis"] == "D"


class TestTableStore:
    def test_rank_cap(self):
        cap = hecke.settings().rank_cap
        try:
            hecke.get_table(4)
            hecke.configure(rank_cap=3)
            with pytest.raises(RankCapExceeded):
                hecke.get_table(4)
            with pytest.raises(RankCapExceeded):
                kl_poly(P("2134"), P("1234"))
            with pytest.raises(ValueError):
                hecke.configure(rank_cap=10)
        finally:
            hecke.configure(rank_cap=cap)

    def test_cache_roundtrip_and_corruption(self, tmp_path):
        fresh = hecke.KLTable(5)
        path = tmp_path / "kl-rank5.txt"
        fresh.dump(path)
        loaded = hecke.KLTable.load(path, 5)
        assert loaded._P == fresh._P
        assert loaded.mu_down == fresh.mu_down and loaded.mu_up == fresh.mu_up
        text = path.read_text()
        path.write_text(text.replace("klkostant-kl-cache v1", "klkostant-kl-cache v0"))
        with pytest.raises(hecke.CacheError):
            hecke.KLTable.load(path, 5)
        path.write_text(text[: len(text) // 2])
        with pytest.raises(hecke.CacheError):
            hecke.KLTable.load(path, 5)

    def test_registry_uses_and_repairs_cache(self, tmp_path):
        saved = dict(hecke._tables)
        try:
            hecke.configure(cache_dir=tmp_path)
            hecke._tables.clear()
            t1 = hecke.get_table(4)
            assert (tmp_path / "kl-rank4.txt").exists()
            hecke._tables.clear()
            t2 = hecke.get_table(4)
            assert t2._P == t1._P
            assert any("loaded rank 4" in e for e in hecke.cache_stats()["events"])
            (tmp_path / "kl-rank4.txt").write_text("garbage\n")
            hecke._tables.clear()
            t3 = hecke.get_table(4)
            assert t3._P == t1._P
            assert any("discarded" in e for e in hecke.cache_stats()["events"])
        finally:
            hecke.configure(cache_dir=None)
            hecke._tables.clear()
            hecke._tables.update(saved)

    def test_stored_values_match_recomputation(self):
        t = hecke.get_table(5)
        fresh = hecke.KLTable(5)
        for w in range(t.size):
            for x in range(t.size):
                assert t.p_poly(w, x) == fresh.p_poly(w, x)

    def test_concurrent_readers_agree(self):
        saved = hecke._tables.pop(5, None)
        results = []

        def work():
            results.append(tuple(str(kl_poly(x, P("45312"))) for x in perms(5)))

        try:
            threads = [threading.Thread(target=work) for _ in range(6)]
            for th in threads:
                th.start()
            for th in threads:
                th.join()
            assert len(set(results)) == 1
        finally:
            if saved is not None:
                hecke._tables[5] = saved
