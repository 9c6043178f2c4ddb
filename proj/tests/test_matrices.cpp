#include <doctest.h>

#include "oracle.hpp"
#include "pcfit/error.hpp"
#include "pcfit/matrices.hpp"

#include <algorithm>

using namespace pcfit;

namespace {

const char* kDQ =
    "4\n"
    "1 0 2 3 3\n"
    "2 2 0 3 3\n"
    "3 3 3 0 2\n"
    "4 3 3 2 0\n";

DissimilarityMap map_of(std::size_t n, std::initializer_list<std::pair<std::pair<int, int>, int>> cells) {
    std::vector<Rational> v(n * n);
    for (auto [ij, value] : cells) {
        auto [i, j] = ij;
        v[(i - 1) * n + (j - 1)] = value;
        v[(j - 1) * n + (i - 1)] = value;
    }
    return DissimilarityMap(TaxonSet::numbered(n), v);
}

DissimilarityMap constant_map(std::size_t n, int c) {
    std::vector<Rational> v(n * n, c);
    for (std::size_t i = 0; i < n; ++i) {
        v[i * n + i] = 0;
    }
    return DissimilarityMap(TaxonSet::numbered(n), v);
}

// The four-point-violating map: D12=1, D34=2, D13=3, D24=4, D14=5, D23=6.
DissimilarityMap violating_map() {
    return map_of(4, {{{1, 2}, 1}, {{3, 4}, 2}, {{1, 3}, 3}, {{2, 4}, 4}, {{1, 4}, 5}, {{2, 3}, 6}});
}

// Reference predicates written straight from the definitions.
bool ultrametric_by_triples(const DissimilarityMap& d) {
    const std::size_t n = d.size();
    for (Taxon x = 0; x < n; ++x)
        for (Taxon y = 0; y < n; ++y)
            for (Taxon z = 0; z < n; ++z)
                if (x != y && y != z && x != z && d(x, y) > std::max(d(x, z), d(y, z)))
                    return false;
    return true;
}

bool kalmanson_by_quads(const DissimilarityMap& d, const std::vector<Taxon>& ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                for (std::size_t l = k + 1; l < n; ++l) {
                    Taxon a = ring[i], b = ring[j], c = ring[k], e = ring[l];
                    if (std::max(d(a, b) + d(c, e), d(e, a) + d(b, c)) > d(a, c) + d(b, e))
                        return false;
                }
    return true;
}

SymmetricMatrix sym(std::size_t n, std::vector<int> upper_and_diag) {
    // Row-major upper triangle including the diagonal.
    std::vector<Rational> v(n * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            v[i * n + j] = upper_and_diag[k];
            v[j * n + i] = upper_and_diag[k];
            ++k;
        }
    return SymmetricMatrix(TaxonSet::numbered(n), v);
}

}  // namespace

TEST_CASE("parse the quartet map") {
    DissimilarityMap d = parse_dissimilarity(kDQ);
    CHECK(d.size() == 4);
    CHECK(d(0, 1) == 2);
    CHECK(d(0, 2) == 3);
    CHECK(d(2, 3) == 2);
    CHECK(d == map_of(4, {{{1, 2}, 2}, {{1, 3}, 3}, {{1, 4}, 3}, {{2, 3}, 3}, {{2, 4}, 3}, {{3, 4}, 2}}));
    CHECK(parse_dissimilarity(write_matrix(d)) == d);
}

TEST_CASE("parse edge cases and errors") {
    DissimilarityMap one = parse_dissimilarity("1\nA 0\n");
    CHECK(one.size() == 1);
    CHECK(one.taxa().label(0) == "A");

    DissimilarityMap dec = parse_dissimilarity("2\na 0 3.5\nb 7/2 0\n");
    CHECK(dec(0, 1) == Rational(7, 2));
    CHECK(write_matrix(dec) == "2\na 0 7/2\nb 7/2 0\n");

    try {
        parse_dissimilarity("2\n1 0 1\n2 2 0\n");
        FAIL("asymmetric matrix accepted");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("(1,2)/(2,1)") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_dissimilarity("2\na 0 -1\nb -1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_dissimilarity("2\na 1 1\nb 1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_dissimilarity("2\na 0 1\na 1 0\n"), ParseError);
    try {
        parse_dissimilarity("2\na 0 x\nb 1 0\n");
        FAIL("malformed number accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 5);
    }
    CHECK_THROWS_AS(parse_dissimilarity("3\na 0 1\nb 1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_dissimilarity(""), ParseError);

    SymmetricMatrix neg = parse_symmetric_matrix("2\na -3 -1\nb -1 -2\n");
    CHECK(neg(0, 0) == -3);
    CHECK(parse_symmetric_matrix(write_matrix(neg)) == neg);
}

TEST_CASE("ultrametric") {
    CHECK(is_ultrametric(constant_map(4, 5)));
    CHECK(is_ultrametric(constant_map(2, 1)));
    CHECK(is_ultrametric(constant_map(1, 0)));

    // Every triple of the quartet map attains its maximum twice.
    DissimilarityMap dq = parse_dissimilarity(kDQ);
    CHECK(ultrametric_by_triples(dq));
    CHECK(is_ultrametric(dq).holds == ultrametric_by_triples(dq));

    DissimilarityMap d = violating_map();
    auto r = is_ultrametric(d);
    REQUIRE_FALSE(r);
    auto [x, y, z] = r.witness->taxa;
    CHECK(d(x, y) > std::max(d(x, z), d(y, z)));
}

TEST_CASE("four-point condition") {
    auto dq = four_point_check(parse_dissimilarity(kDQ));
    CHECK(dq);

    auto bad = four_point_check(violating_map());
    REQUIRE_FALSE(bad);
    auto w = *bad.witness;
    std::array<Taxon, 4> sorted = w.taxa;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::array<Taxon, 4>{0, 1, 2, 3});
    // Sums 1+2, 3+4, 5+6: the maximum is attained once.
    std::array<Rational, 3> sums = w.sums;
    std::sort(sums.begin(), sums.end());
    CHECK(sums == std::array<Rational, 3>{3, 7, 11});

    CHECK(four_point_check(constant_map(3, 1)));
}

TEST_CASE("Kalmanson condition") {
    DissimilarityMap dq = parse_dissimilarity(kDQ);
    CHECK(kalmanson_check(dq, CircularOrdering({0, 1, 2, 3})));
    auto bad = kalmanson_check(dq, CircularOrdering({0, 2, 1, 3}));
    REQUIRE_FALSE(bad);
    CHECK(bad.witness->taxa == std::array<Taxon, 4>{0, 2, 1, 3});
    CHECK(kalmanson_check(constant_map(3, 7), CircularOrdering({2, 0, 1})));
}

TEST_CASE("Kalmanson ordering search") {
    DissimilarityMap dq = parse_dissimilarity(kDQ);
    auto ring = find_kalmanson_ordering(dq);
    REQUIRE(ring);
    CHECK(*ring == CircularOrdering::identity(4));

    auto any = find_kalmanson_ordering(constant_map(5, 2));
    REQUIRE(any);
    CHECK(any->sequence() == std::vector<Taxon>{0, 1, 2, 3, 4});

    // Every map on four taxa is Kalmanson for some ring; the least one here
    // comes from exhaustive evaluation of the three ring classes.
    DissimilarityMap d = violating_map();
    std::vector<std::vector<Taxon>> certified;
    for (const auto& c : oracle::all_rings(4)) {
        if (kalmanson_by_quads(d, c.sequence())) {
            certified.push_back(c.sequence());
        }
    }
    REQUIRE_FALSE(certified.empty());
    auto found = find_kalmanson_ordering(d);
    REQUIRE(found);
    CHECK(found->sequence() == certified.front());
    CHECK(found->sequence() == std::vector<Taxon>{0, 1, 3, 2});

    CHECK_THROWS_AS(find_kalmanson_ordering(constant_map(11, 1)), SearchRefusedError);
    CHECK(find_kalmanson_ordering(constant_map(11, 1), 11));
}

TEST_CASE("search agrees with exhaustive ring enumeration") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        oracle::Rng rng(seed);
        const std::size_t n = rng.between(4, 6);
        std::vector<Rational> v(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                v[i * n + j] = v[j * n + i] = rng.between(1, 6);
        DissimilarityMap d(TaxonSet::numbered(n), v);
        std::optional<std::vector<Taxon>> first;
        for (const auto& c : oracle::all_rings(n)) {
            if (kalmanson_by_quads(d, c.sequence())) {
                first = c.sequence();
                break;
            }
        }
        auto found = find_kalmanson_ordering(d);
        CHECK(found.has_value() == first.has_value());
        if (found && first) {
            CHECK(found->sequence() == *first);
        }
    }
}

TEST_CASE("Gromov product") {
    DissimilarityMap dq = parse_dissimilarity(kDQ);
    SymmetricMatrix r = gromov_product(dq, 3);
    CHECK(r.taxa().labels() == std::vector<std::string>{"1", "2", "3"});
    CHECK(r == sym(3, {-3, -2, -1, -3, -1, -2}));

    SymmetricMatrix c = gromov_product(constant_map(4, 6), 1);
    CHECK(c(0, 1) == -3);
    CHECK(c(2, 2) == -6);

    DissimilarityMap two(TaxonSet({"a", "r"}), {0, 5, 5, 0});
    SymmetricMatrix one = gromov_product(two, 1);
    CHECK(one.size() == 1);
    CHECK(one(0, 0) == -5);
    CHECK_THROWS_AS(gromov_product(two, 2), DomainError);
}

TEST_CASE("inverse Gromov product") {
    DissimilarityMap dq = parse_dissimilarity(kDQ);
    CHECK(inverse_gromov(gromov_product(dq, 3), "4") == dq);

    DissimilarityMap z = inverse_gromov(SymmetricMatrix(TaxonSet({"a"})), "r");
    CHECK(z.size() == 2);
    CHECK(z(0, 1) == 0);

    // Positive off-diagonal entries are outside the Kalmanson image but the
    // result is still a dissimilarity map.
    DissimilarityMap d = inverse_gromov(sym(2, {-1, 1, -1}), "r");
    CHECK(d(0, 1) == 4);
    CHECK(d(0, 2) == 1);
    CHECK(d(1, 2) == 1);

    CHECK_THROWS_AS(inverse_gromov(sym(2, {1, 0, 0}), "r"), DomainError);
    CHECK_THROWS_AS(inverse_gromov(sym(2, {-1, -1, -1}), "1"), DomainError);
}

TEST_CASE("Robinsonian checks on the quartet Gromov product") {
    SymmetricMatrix r = gromov_product(parse_dissimilarity(kDQ), 3);
    CHECK(is_robinsonian(r, LinearOrdering({0, 1, 2})));
    // Reading (2,1,3): every weakly increasing triple still satisfies the
    // condition, so the check holds.
    CHECK(is_robinsonian(r, LinearOrdering({1, 0, 2})));
    CHECK_FALSE(is_robinsonian(r, LinearOrdering({0, 2, 1})));
    CHECK(is_strong_robinsonian(r, LinearOrdering({0, 1, 2})));
    CHECK(robinsonian_four_point(r, LinearOrdering({0, 1, 2})));

    SymmetricMatrix single = sym(1, {4});
    CHECK(is_robinsonian(single, LinearOrdering::identity(1)));
    CHECK(robinsonian_four_point(single, LinearOrdering::identity(1)));
}

TEST_CASE("Robinsonian witnesses") {
    SymmetricMatrix bad = sym(3, {-5, -1, -3, -5, -2, -5});
    auto r = is_robinsonian(bad, LinearOrdering::identity(3));
    REQUIRE_FALSE(r);
    CHECK(r.witness->condition == "robinsonian");
    const auto& c = r.witness->chain;
    CHECK(std::max(bad(c[0], c[1]), bad(c[1], c[2])) > bad(c[0], c[2]));

    SymmetricMatrix constant = sym(3, {-1, -1, -1, -1, -1, -1});
    CHECK(is_strong_robinsonian(constant, LinearOrdering::identity(3)));

    // R(1,2) = R(1,3) but R(0,2) != R(0,3).
    SymmetricMatrix s2 = sym(4, {-10, -5, -3, -2, -10, -4, -4, -10, -6, -10});
    const LinearOrdering id4 = LinearOrdering::identity(4);
    REQUIRE(is_robinsonian(s2, id4));
    auto strong = is_strong_robinsonian(s2, id4);
    REQUIRE_FALSE(strong);
    CHECK(strong.witness->condition == "strong-2");
    CHECK(strong.witness->chain == std::vector<Taxon>{0, 1, 2, 3});

    // R(1,2) + R(0,3) > R(1,3) + R(0,2) on an otherwise Robinsonian matrix.
    SymmetricMatrix fp = sym(4, {-10, -5, -4, -1, -10, -5, -4, -10, -5, -10});
    REQUIRE(is_robinsonian(fp, id4));
    auto four = robinsonian_four_point(fp, id4);
    REQUIRE_FALSE(four);
    CHECK(four.witness->condition == "four-point");
    const auto& w = four.witness->chain;
    CHECK(fp(w[1], w[2]) + fp(w[0], w[3]) > fp(w[1], w[3]) + fp(w[0], w[2]));
}

TEST_CASE("Gromov products of Kalmanson maps are negative strong Robinsonian") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t n = 3 + seed % 5;
        auto inst = oracle::gen_wcss(seed, n);
        DissimilarityMap d = evaluate(inst.weights);
        REQUIRE(kalmanson_check(d, inst.ring));
        for (Taxon r = 0; r < n; ++r) {
            SymmetricMatrix g = gromov_product(d, r);
            LinearOrdering ord = inst.ring.cut_at(r);
            CHECK(is_robinsonian(g, ord));
            CHECK(is_strong_robinsonian(g, ord));
            CHECK(robinsonian_four_point(g, ord));
            CHECK(std::all_of(g.values().begin(), g.values().end(),
                              [](const Rational& x) { return x <= 0; }));
            CHECK(inverse_gromov(g, d.taxa().label(r)).reordered(d.taxa()) == d);
        }
    }
}

TEST_CASE("tree metrics satisfy the four-point condition with equality around the tree") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto inst = oracle::gen_tree_metric(seed, 4 + seed % 5);
        const DissimilarityMap& d = inst.metric;
        CHECK(four_point_check(d));
        const auto ring = frontier(inst.tree).sequence();
        const std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k)
                    for (std::size_t l = k + 1; l < n; ++l) {
                        Taxon a = ring[i], b = ring[j], c = ring[k], e = ring[l];
                        CHECK(std::max(d(a, b) + d(c, e), d(e, a) + d(b, c)) ==
                              d(a, c) + d(b, e));
                    }
        CHECK(find_kalmanson_ordering(d));
    }
}
