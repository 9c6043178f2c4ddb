#include <doctest.h>

#include "pcfit/error.hpp"
#include "pcfit/rational.hpp"
#include "pcfit/taxa.hpp"

using namespace pcfit;

TEST_CASE("rationals parse exactly") {
    CHECK(parse_rational("3") == 3);
    CHECK(parse_rational("7/2") == Rational(7, 2));
    CHECK(parse_rational("3.5") == Rational(7, 2));
    CHECK(parse_rational("-.25") == Rational(-1, 4));
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK(parse_rational("-4/6") == Rational(-2, 3));
    CHECK(to_string(parse_rational("4/6")) == "2/3");
    CHECK(to_string(parse_rational("-8/4")) == "-2");
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1.2.3"), std::invalid_argument);
}

TEST_CASE("taxon sets") {
    TaxonSet t({"a", "b", "c"});
    CHECK(t.size() == 3);
    CHECK(t.index_of("b") == 1);
    CHECK_FALSE(t.find("z"));
    CHECK_THROWS_AS(t.index_of("z"), DomainError);
    CHECK_THROWS_AS(TaxonSet({"a", "a"}), DomainError);
    CHECK_THROWS_AS(TaxonSet({"a b"}), DomainError);
    CHECK_THROWS_AS(TaxonSet({"a,b"}), DomainError);
    CHECK_THROWS_AS(TaxonSet({""}), DomainError);
    CHECK(t.without(1).labels() == std::vector<std::string>{"a", "c"});
    CHECK(t.with("d").label(3) == "d");
    CHECK_THROWS_AS(t.with("a"), DomainError);
    CHECK(t.same_labels(TaxonSet({"c", "a", "b"})));
    CHECK_FALSE(t.same_labels(TaxonSet({"c", "a"})));
    CHECK(embedding(TaxonSet({"c", "a"}), t) == std::vector<Taxon>{2, 0});
    CHECK(TaxonSet::numbered(3).labels() == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("subset ordering is lexicographic on member lists") {
    TaxonSubset a(3, {0}), b(3, {0, 1}), c(3, {0, 2}), d(3, {1});
    CHECK(a < b);
    CHECK(b < c);
    CHECK(c < d);
    CHECK(TaxonSubset(3, {0, 1, 2}) < TaxonSubset(3, {0, 2}));
}

TEST_CASE("subset operations across word boundaries") {
    const std::size_t n = 130;
    TaxonSubset a(n, {0, 64, 129});
    CHECK(a.count() == 3);
    CHECK(a.complement().count() == n - 3);
    CHECK((a | a.complement()).is_full());
    CHECK((a & a.complement()).empty());
    CHECK(a.first() == 0);
    CHECK(a.members() == std::vector<Taxon>{0, 64, 129});
    TaxonSubset b(n, {64});
    CHECK(b.is_subset_of(a));
    CHECK(a.compatible_with(b));
    CHECK((a - b).members() == std::vector<Taxon>{0, 129});
    CHECK(TaxonSubset(n, {1, 2}).compatible_with(TaxonSubset(n, {3})));
    CHECK_FALSE(TaxonSubset(n, {1, 2}).compatible_with(TaxonSubset(n, {2, 3})));
    CHECK(a.hash() == TaxonSubset(n, {129, 0, 64}).hash());
}

TEST_CASE("lift maps through an embedding") {
    TaxonSubset a(2, {0, 1});
    CHECK(lift(a, {2, 0}, 3) == TaxonSubset(3, {0, 2}));
    CHECK(format_subset(TaxonSubset(3, {0, 2}), TaxonSet({"x", "y", "z"})) == "x,z");
}

TEST_CASE("orderings") {
    LinearOrdering o({2, 0, 1});
    CHECK(o.position(2) == 0);
    CHECK(o[2] == 1);
    CHECK_THROWS_AS(LinearOrdering({0, 0, 1}), DomainError);

    CircularOrdering c({2, 3, 0, 1});
    CHECK(c.canonical().sequence() == std::vector<Taxon>{0, 1, 2, 3});
    CHECK(CircularOrdering({0, 3, 2, 1}) == CircularOrdering::identity(4));
    CHECK_FALSE(CircularOrdering({0, 2, 1, 3}) == CircularOrdering::identity(4));

    // After taxon 2 on ring 0,1,2,3,4 comes 3,4,0,1; reduced indices drop 3,4 by one.
    CHECK(CircularOrdering::identity(5).cut_at(2).sequence() == std::vector<Taxon>{2, 3, 0, 1});
    CHECK(reduced_index(3, 2) == 2);
    CHECK(expanded_index(2, 2) == 3);
    CHECK(expanded_index(1, 2) == 1);

    TaxonSet t({"a", "b", "c"});
    CHECK(parse_sequence("c,a,b", t) == std::vector<Taxon>{2, 0, 1});
    CHECK(format_sequence({2, 0, 1}, t) == "c,a,b");
    CHECK_THROWS_AS(parse_sequence("c,a", t), DomainError);
    CHECK_THROWS_AS(parse_sequence("c,a,a", t), DomainError);
    CHECK_THROWS_AS(parse_sequence("c,a,q", t), DomainError);
}
