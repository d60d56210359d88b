#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <set>

#include "nsd/core/batch.hpp"
#include "nsd/core/matrix.hpp"
#include "nsd/core/rng.hpp"
#include "oracles.hpp"

using namespace nsd;

TEST_CASE("matrix construction checks length and finiteness") {
    CHECK_NOTHROW(Matrix::from_data(2, 3, std::vector<double>(6, 1.0)));
    CHECK_THROWS_AS(Matrix::from_data(2, 3, std::vector<double>(5, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(Matrix::from_data(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    CHECK_THROWS_AS(Matrix::from_data(1, 2, {std::numeric_limits<double>::infinity(), 0.0}), std::invalid_argument);
    const auto m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 6.0);
}

TEST_CASE("matmul small cases") {
    const auto id = Matrix::from_rows({{1, 0}, {0, 1}});
    const auto b = Matrix::from_rows({{5, 6}, {7, 8}});
    CHECK(matmul(id, b) == b);
    CHECK(matmul(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{3}, {4}})) == Matrix::from_rows({{11}}));
}

TEST_CASE("matmul shape mismatch names the operands") {
    try {
        matmul(Matrix(2, 3), Matrix(4, 2));
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        CHECK(e.lhs() == Shape{2, 3});
        CHECK(e.rhs() == Shape{4, 2});
    }
}

TEST_CASE("matmul equals triple loop exactly, including sparse operands") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = oracle::random_matrix(rng, 7, 5);
        auto b = oracle::random_matrix(rng, 5, 3);
        for (auto& v : a.values())
            if (rng.next_uniform() < 0.3) v = 0.0;
        CHECK(matmul(a, b) == oracle::triple_loop(a, b));
        CHECK(matmul_transpose_a(transpose(a), b) == oracle::triple_loop(a, b));
        CHECK(matmul_transpose_b(a, transpose(b)) == oracle::triple_loop(a, b));
    }
}

TEST_CASE("identity is a two-sided unit for matmul") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t r = 1 + rng.next_below(9), c = 1 + rng.next_below(9);
        const auto a = oracle::random_matrix(rng, r, c, -100, 100);
        CHECK(matmul(identity(r), a) == a);
        CHECK(matmul(a, identity(c)) == a);
    }
}

TEST_CASE("argsort_by_key") {
    const std::vector<int> k1{2, 0, 1};
    CHECK(argsort_by_key(k1) == std::vector<std::size_t>{1, 2, 0});
    const std::vector<int> k2{0, 0, 0};
    CHECK(argsort_by_key(k2) == std::vector<std::size_t>{0, 1, 2});

    Rng rng(5);
    const auto keys = oracle::random_labels(rng, 1000, 10);
    const auto perm = argsort_by_key(keys);
    std::vector<std::size_t> seen(perm);
    std::sort(seen.begin(), seen.end());
    std::vector<std::size_t> iota(1000);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(seen == iota);
    std::vector<int> applied;
    for (auto i : perm) applied.push_back(keys[i]);
    auto sorted = keys;
    std::stable_sort(sorted.begin(), sorted.end());
    CHECK(applied == sorted);
    for (std::size_t i = 1; i < perm.size(); ++i)
        if (keys[perm[i]] == keys[perm[i - 1]]) CHECK(perm[i] > perm[i - 1]);
}

TEST_CASE("row_mean") {
    const auto m = Matrix::from_rows({{1, 3}, {3, 5}});
    const std::vector<std::size_t> both{0, 1}, one{1}, none{};
    CHECK(row_mean(m, both) == std::vector<double>{2, 4});
    CHECK(row_mean(m, one) == std::vector<double>{3, 5});
    CHECK_THROWS_AS(row_mean(m, none), std::invalid_argument);

    Rng rng(8);
    const auto r = oracle::random_matrix(rng, 50, 8, -1e3, 1e3);
    std::vector<std::size_t> rows(50);
    std::iota(rows.begin(), rows.end(), 0);
    const auto got = row_mean(r, rows);
    const auto want = oracle::compensated_mean(r, rows);
    for (std::size_t c = 0; c < 8; ++c) CHECK(std::abs(got[c] - want[c]) <= 1e-12 * std::max(1.0, std::abs(want[c])));
}

TEST_CASE("row_mean of a constant matrix is exact for any subset") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const double k = (rng.next_uniform() - 0.5) * 1e4;
        Matrix m(30, 4, k);
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < 30; ++r)
            if (rng.next_uniform() < 0.5) rows.push_back(r);
        if (rows.empty()) rows.push_back(0);
        for (double v : row_mean(m, rows)) CHECK(v == k);
    }
}

TEST_CASE("top_k_indices") {
    const std::vector<double> a{0.1, 0.9, 0.5}, b{0.5, 0.5, 0.1};
    CHECK(top_k_indices(a, 1) == std::vector<std::size_t>{1});
    CHECK(top_k_indices(b, 1) == std::vector<std::size_t>{0});
    CHECK_THROWS_AS(top_k_indices(a, 4), std::out_of_range);

    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.next_below(20);
        const auto v = trial % 2 ? oracle::tie_heavy(rng, n, 4) : std::vector<double>([&] {
            std::vector<double> x(n);
            for (auto& e : x) e = rng.next_uniform();
            return x;
        }());
        for (std::size_t k = 0; k <= n; ++k) CHECK(top_k_indices(v, k) == oracle::full_sort_top_k(v, k));
    }
}

TEST_CASE("argmax_rows takes the first maximum") {
    const auto m = Matrix::from_rows({{1, 3, 3}, {5, 0, 5}, {-1, -2, -0.5}});
    CHECK(argmax_rows(m) == std::vector<int>{1, 0, 2});
}

TEST_CASE("rng golden stream for seed 42") {
    std::ifstream in(NSD_FIXTURE_DIR "/rng_golden.json");
    REQUIRE(in);
    const auto j = nlohmann::json::parse(in);
    Rng rng(42);
    for (const auto& s : j.at("u64")) CHECK(rng.next_u64() == std::stoull(s.get<std::string>()));
    Rng zero(0);
    for (const auto& s : j.at("u64_seed0")) CHECK(zero.next_u64() == std::stoull(s.get<std::string>()));
    std::uint64_t stream = 1;
    for (const auto& s : j.at("derive_seed_42")) CHECK(Rng::derive_seed(42, stream++) == std::stoull(s.get<std::string>()));
}

TEST_CASE("rng determinism and ranges") {
    Rng a(99), b(99);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.next_uniform();
        CHECK(u == b.next_uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng c(4);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 70000; ++i) ++hist[c.next_below(7)];
    for (int h : hist) CHECK(std::abs(h - 10000) < 500);
    CHECK_THROWS_AS(c.next_below(0), std::invalid_argument);

    Rng n(5);
    double sum = 0, sq = 0;
    const int count = 100000;
    for (int i = 0; i < count; ++i) {
        const double x = n.next_normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / count) < 0.02);
    CHECK(std::abs(sq / count - 1.0) < 0.02);
}

TEST_CASE("shuffle yields a permutation and depends on the seed") {
    std::vector<int> v(50), w(50);
    std::iota(v.begin(), v.end(), 0);
    std::iota(w.begin(), w.end(), 0);
    Rng a(1), b(2);
    a.shuffle(std::span<int>(v));
    b.shuffle(std::span<int>(w));
    CHECK(v != w);
    std::sort(v.begin(), v.end());
    for (int i = 0; i < 50; ++i) CHECK(v[i] == i);
}

TEST_CASE("LabeledBatch validation") {
    LabeledBatch b{Matrix(2, 3), {0, 1}};
    CHECK_NOTHROW(b.validate(2));
    CHECK_THROWS_AS(b.validate(1), std::out_of_range);
    b.labels.push_back(0);
    CHECK_THROWS_AS(b.validate(2), std::invalid_argument);
}
