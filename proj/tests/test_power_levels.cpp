#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/power_levels.hpp"

using namespace doflab;

TEST_CASE("pbar exact values") {
    PowerScale s(16);
    CHECK(s.pbar(Rat(1)) == 4);
    CHECK(s.pbar(Rat(1, 2)) == 2);
    CHECK(s.pbar(Rat(3, 2)) == 8);
    CHECK(s.pbar(Rat(0)) == 1);
    CHECK_THROWS_AS(s.pbar(Rat(-1, 2)), std::domain_error);
}

TEST_CASE("pbar is nondecreasing and matches brute force") {
    for (long long P : {4LL, 16LL, 64LL, 100LL, 256LL, 1024LL}) {
        PowerScale s(P);
        BigInt prev = 0;
        for (int num = 0; num <= 12; ++num) {
            const Rat lam(num, 6);
            const BigInt v = s.pbar(lam);
            CHECK(v >= prev);
            prev = v;
            // Independent check: v is the largest integer with v^12 <= P^num.
            CHECK(pow(v, 12) <= pow(BigInt(P), static_cast<unsigned>(num)));
            CHECK(pow(v + 1, 12) > pow(BigInt(P), static_cast<unsigned>(num)));
        }
    }
}

TEST_CASE("pbar on rational powers") {
    PowerScale s(Rat(9, 4));  // P = 2.25, pbar(1) = floor(1.5) = 1
    CHECK(s.pbar(Rat(1)) == 1);
    CHECK(s.pbar(Rat(2)) == 2);  // floor(2.25) = 2
    CHECK_THROWS_AS(PowerScale(Rat(1, 2)), std::domain_error);
}

TEST_CASE("partition operators") {
    PowerScale s(16);
    CHECK(part_low(BigInt(13), s, Rat(1, 2)) == 1);  // 13 mod 2
    CHECK(part_low(BigInt(13), s, Rat(1)) == 1);     // 13 mod 4
    CHECK(part_low(BigInt(7), s, Rat(0)) == 0);      // mod 1

    CHECK(part_mid(BigInt(13), s, Rat(1, 2), Rat(3, 2)) == 2);  // floor((13 mod 8)/2)
    CHECK(part_mid(BigInt(13), s, Rat(0), Rat(1)) == part_low(BigInt(13), s, Rat(1)));
    CHECK(part_mid(BigInt(3), s, Rat(1, 2), Rat(1)) == 1);
    CHECK_THROWS_AS(part_mid(BigInt(3), s, Rat(1), Rat(1, 2)), std::domain_error);

    // part_mid(x, l, l) == 0 for all x
    for (int x = 0; x < 16; ++x)
        CHECK(part_mid(BigInt(x), s, Rat(1, 2), Rat(1, 2)) == 0);
}

TEST_CASE("top_fraction") {
    PowerScale s16(16);
    CHECK_THROWS_AS(top_fraction(BigInt(13), s16, Rat(1, 2)), std::domain_error);  // 13 >= pbar
    CHECK(top_fraction(BigInt(3), s16, Rat(1, 2)) == 1);
    PowerScale s256(256);
    CHECK(top_fraction(BigInt(15), s256, Rat(1, 2)) == 3);
    CHECK_THROWS_AS(top_fraction(BigInt(1), s16, Rat(3, 2)), std::domain_error);
}

TEST_CASE("discrete symbol alphabet invariant") {
    PowerScale s(16);
    CHECK_NOTHROW(DiscreteSymbol(BigInt(3), Rat(1), s));
    CHECK_THROWS_AS(DiscreteSymbol(BigInt(4), Rat(1), s), std::domain_error);
    CHECK_THROWS_AS(DiscreteSymbol(BigInt(-1), Rat(1), s), std::domain_error);
}

TEST_CASE("reconstruction identity, exhaustive") {
    // x = pbar(l1) * (x)^{l}_{l1} + (x)_{l1} for all x in X_l.
    const Rat grid[] = {Rat(1, 3), Rat(1, 2), Rat(2, 3), Rat(3, 4),
                        Rat(1),    Rat(5, 4), Rat(4, 3), Rat(3, 2)};
    for (long long P : {4LL, 16LL, 64LL, 256LL}) {
        PowerScale s(P);
        for (const Rat& l : grid) {
            const BigInt top = s.pbar(l);
            for (const Rat& l1 : grid) {
                if (l1 >= l) continue;
                const BigInt base = s.pbar(l1);
                for (BigInt x = 0; x < top; ++x)
                    CHECK(base * part_mid(x, s, l1, l) + part_low(x, s, l1) == x);
            }
        }
    }
}

TEST_CASE("decomposition consistency") {
    // If x = x1 + x2 * pbar(l1) with x1 in X_l1 and x2 in X_l2, the parts
    // recover x1 and x2.
    for (long long P : {16LL, 64LL}) {
        PowerScale s(P);
        const Rat l1(1, 2), l2(1);
        const BigInt b1 = s.pbar(l1), b2 = s.pbar(l2);
        for (BigInt x1 = 0; x1 < b1; ++x1) {
            for (BigInt x2 = 0; x2 < b2; ++x2) {
                const BigInt x = x1 + x2 * b1;
                CHECK(part_low(x, s, l1) == x1);
                CHECK(part_mid(x, s, l1, l1 + l2) == x2);
            }
        }
    }
}

TEST_CASE("vector operators are elementwise") {
    PowerScale s(16);
    SymbolVector v;
    for (int x : {1, 3, 2})
        v.entries.emplace_back(BigInt(x), Rat(1), s);
    for (const auto& sym : v.entries)
        CHECK(part_low(sym, Rat(1, 2)) == part_low(sym.value, s, Rat(1, 2)));
}

TEST_CASE("concat") {
    PowerScale s(16);
    SymbolVector a, b, empty;
    a.entries.emplace_back(BigInt(1), Rat(1), s);
    a.entries.emplace_back(BigInt(2), Rat(1), s);
    b.entries.emplace_back(BigInt(3), Rat(1), s);
    CHECK(concat(a, b).size() == 3);
    CHECK(concat(empty, b).size() == 1);
    CHECK(concat(a, b).entries[2].value == 3);

    PowerScale other(64);
    SymbolVector c;
    c.entries.emplace_back(BigInt(1), Rat(1), other);
    CHECK_THROWS_AS(concat(a, c), std::invalid_argument);
}

TEST_CASE("rotate_slice") {
    PowerScale s(16);
    SymbolVector v;
    for (int x = 1; x <= 5; ++x) v.entries.emplace_back(BigInt(x % 4), Rat(1), s);
    auto values = [](const SymbolVector& sv) {
        std::vector<int> out;
        for (const auto& e : sv.entries) out.push_back(e.value.convert_to<int>());
        return out;
    };
    // v = [1, 2, 3, 0, 1]
    CHECK(values(rotate_slice(v, 0, 2)) == std::vector<int>{1, 2});
    CHECK(values(rotate_slice(v, 4, 3)) == std::vector<int>{1, 1, 2});  // wrap branch
    CHECK(values(rotate_slice(v, 2, 3)) == std::vector<int>{3, 0, 1});
    CHECK_THROWS_AS(rotate_slice(v, 5, 1), std::out_of_range);
    CHECK_THROWS_AS(rotate_slice(v, 1, 5), std::out_of_range);
}

TEST_CASE("submatrix") {
    IntMatrix eye(3, 3);
    for (size_t i = 0; i < 3; ++i) eye.at(i, i) = 1;
    IntMatrix block = submatrix(eye, 0, 2, 0, 2);
    CHECK(block.rows == 2);
    CHECK(block.at(0, 0) == 1);
    CHECK(block.at(0, 1) == 0);
    CHECK(submatrix(eye, 0, 3, 0, 3) == eye);
    CHECK(submatrix(eye, 0, 0, 0, 2).rows == 0);
    CHECK_THROWS_AS(submatrix(eye, 2, 2, 0, 1), std::out_of_range);
}

TEST_CASE("window_i64 truncates toward zero") {
    CHECK(window_i64(13, 8, 2) == 2);
    CHECK(window_i64(-5, 4, 1) == -1);   // -5 - 4*trunc(-5/4) = -5 + 4
    CHECK(window_i64(-7, 0, 2) == -3);   // trunc division
    CHECK(window_i64(9, 0, 1) == 9);
}
