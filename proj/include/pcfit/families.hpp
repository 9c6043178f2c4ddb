#pragma once

#include "pcfit/matrices.hpp"
#include "pcfit/splits.hpp"
#include "pcfit/taxa.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pcfit {

// A set of non-empty taxon subsets. Houses hierarchies, prepyramids,
// pyramids and rooted families.
class SetFamily {
public:
    SetFamily() = default;
    explicit SetFamily(TaxonSet taxa);
    SetFamily(TaxonSet taxa, const std::vector<TaxonSubset>& members);

    const TaxonSet& taxa() const { return taxa_; }
    const std::set<TaxonSubset>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool contains(const TaxonSubset& a) const { return members_.count(a) > 0; }
    bool insert(const TaxonSubset& a);

    bool is_subset_of(const SetFamily& other) const;

    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    friend bool operator==(const SetFamily&, const SetFamily&) = default;

private:
    TaxonSet taxa_;
    std::set<TaxonSubset> members_;
};

// A family with a rational index f on each member.
class IndexedFamily {
public:
    IndexedFamily() = default;
    IndexedFamily(TaxonSet taxa, std::map<TaxonSubset, Rational> index);

    const TaxonSet& taxa() const { return taxa_; }
    const std::map<TaxonSubset, Rational>& index() const { return index_; }
    const Rational& operator[](const TaxonSubset& a) const;
    std::size_t size() const { return index_.size(); }
    SetFamily family() const;

    friend bool operator==(const IndexedFamily&, const IndexedFamily&) = default;

private:
    TaxonSet taxa_;
    std::map<TaxonSubset, Rational> index_;
};

// A ⊂ B implies f(A) < f(B): the indexed-pyramid convention.
bool has_strict_index(const IndexedFamily& f);
// A ⊂ B implies f(A) <= f(B): the indexed-hierarchy convention.
bool has_monotone_index(const IndexedFamily& f);

using SubsetPair = std::pair<TaxonSubset, TaxonSubset>;

// --- file format ----------------------------------------------------------
//
//   # comment
//   a,b,c: -3/2
//
// The index suffix is optional. Labels resolve against the given taxa, or
// are taken in order of first appearance.

SetFamily parse_family(std::string_view text, const TaxonSet* taxa = nullptr);
IndexedFamily parse_indexed_family(std::string_view text, const TaxonSet* taxa = nullptr);
std::string write_family(const SetFamily& f);
std::string write_family(const IndexedFamily& f);

// --- predicates -----------------------------------------------------------

// X and every singleton present, all pairs compatible.
CheckResult<SubsetPair> is_hierarchy(const SetFamily& f);
// X and every singleton present, every member an interval of `order`.
bool is_prepyramid(const SetFamily& f, const LinearOrdering& order);
// A prepyramid that is closed under intersection.
bool is_pyramid(const SetFamily& f, const LinearOrdering& order);
// Every incompatible pair has A∩B, A\B, B\A and A∪B present.
CheckResult<SubsetPair> is_rooted_family(const SetFamily& f);

bool is_interval(const TaxonSubset& a, const LinearOrdering& order);

// --- rooting and unrooting ------------------------------------------------

// Each split's block that avoids r, over the taxa without r.
SetFamily unroot_family(const SplitSystem& s, Taxon r);
// A ↦ A | X\A over `full`, which must be the family's labels plus r.
SplitSystem root_family(const SetFamily& f, const TaxonSet& full, Taxon r);
// As above with r appended as a fresh label.
SplitSystem root_family(const SetFamily& f, const std::string& r);

// Adds X and the missing singletons.
SetFamily with_singletons(const SetFamily& f);

// --- pyramids and Robinsonian matrices ------------------------------------

// Maximally linked sets of a Robinsonian matrix with f(A) = diam(A). The
// diagonal counts, so a singleton {x} (when maximally linked) has f = R(x,x).
// Throws DomainError if the matrix is not Robinsonian for `order`.
IndexedFamily maximally_linked_sets(const SymmetricMatrix& m, const LinearOrdering& order);

// R(x,y) = min f(A) over members holding x and y. Throws DomainError if some
// pair is covered by no member.
SymmetricMatrix family_to_matrix(const IndexedFamily& f);

// Minimal strict supersets of each member.
std::map<TaxonSubset, std::vector<TaxonSubset>> predecessors(const SetFamily& f);

// Least member containing a (the intersection of all members containing a).
// Throws DomainError if no member contains a.
TaxonSubset hull(const SetFamily& f, const TaxonSubset& a);

// w(A) = -f(A) with no predecessors, -f(A) + f(P1) with one, and
// -f(A) + f(P1) + f(P2) - f(hull(P1 ∪ P2)) with two. Throws DomainError on a
// member with more than two predecessors or on a negative weight.
std::map<TaxonSubset, Rational> pyramid_weights(const IndexedFamily& f);

// Splits A | X\A weighted by pyramid_weights, over `full` = taxa plus r.
// Trivial splits with no member behind them get weight 0.
WeightedSplitSystem eta_r(const IndexedFamily& f, const TaxonSet& full, Taxon r);

// Least rooted family containing f.
SetFamily rooted_closure(const SetFamily& f);

}  // namespace pcfit
