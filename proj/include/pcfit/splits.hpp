#pragma once

#include "pcfit/matrices.hpp"
#include "pcfit/rational.hpp"
#include "pcfit/taxa.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pcfit {

// A bipartition A|B of the taxa. Stored by the block holding taxon 0, so
// A|B and B|A are the same value.
class Split {
public:
    Split() = default;
    // Either block; throws DomainError if it is empty or everything.
    explicit Split(TaxonSubset block);

    static Split trivial(std::size_t universe, Taxon t);

    const TaxonSubset& block_a() const { return block_; }
    TaxonSubset block_b() const { return block_.complement(); }
    std::size_t universe() const { return block_.universe(); }

    bool separates(Taxon x, Taxon y) const { return block_.contains(x) != block_.contains(y); }
    bool is_trivial() const;
    // The block that does not contain r.
    TaxonSubset side_without(Taxon r) const;

    friend bool operator==(const Split&, const Split&) = default;
    friend auto operator<=>(const Split& a, const Split& b) { return a.block_ <=> b.block_; }

private:
    TaxonSubset block_;
};

bool are_compatible(const Split& a, const Split& b);

// A1∩A2 | B1∪B2, A1∩B2 | A2∪B1, A2∩B1 | A1∪B2, B1∩B2 | A1∪A2 for an
// incompatible pair.
std::array<Split, 4> derived_splits(const Split& a, const Split& b);

// "a,b|c,d" with taxon 0's block first and labels in index order.
std::string format_split(const Split& s, const TaxonSet& taxa);

// A set of splits that always holds every trivial split.
class SplitSystem {
public:
    SplitSystem() = default;
    explicit SplitSystem(TaxonSet taxa);
    SplitSystem(TaxonSet taxa, const std::vector<Split>& splits);

    const TaxonSet& taxa() const { return taxa_; }
    const std::set<Split>& splits() const { return splits_; }
    std::size_t size() const { return splits_.size(); }
    bool contains(const Split& s) const { return splits_.count(s) > 0; }
    bool insert(const Split& s);

    bool is_subset_of(const SplitSystem& other) const;
    // Same labels in another order.
    SplitSystem reordered(const TaxonSet& target) const;

    auto begin() const { return splits_.begin(); }
    auto end() const { return splits_.end(); }

    friend bool operator==(const SplitSystem&, const SplitSystem&) = default;

private:
    TaxonSet taxa_;
    std::set<Split> splits_;
};

// Non-negative weight on every split of a system. Trivial splits absent from
// the input are added with weight 0.
class WeightedSplitSystem {
public:
    WeightedSplitSystem() = default;
    explicit WeightedSplitSystem(TaxonSet taxa);
    WeightedSplitSystem(TaxonSet taxa, std::map<Split, Rational> weights);

    const TaxonSet& taxa() const { return taxa_; }
    const std::map<Split, Rational>& weights() const { return weights_; }
    const Rational& weight(const Split& s) const;
    bool contains(const Split& s) const { return weights_.count(s) > 0; }
    std::size_t size() const { return weights_.size(); }

    SplitSystem system() const;
    // Splits of strictly positive weight.
    std::vector<Split> positive_splits() const;

    friend bool operator==(const WeightedSplitSystem&, const WeightedSplitSystem&) = default;

private:
    TaxonSet taxa_;
    std::map<Split, Rational> weights_;
};

// --- file format ----------------------------------------------------------
//
//   # comment
//   a,b|c,d,e 3/2
//
// Parsing without a taxon set takes the labels in order of first appearance.

SplitSystem parse_split_system(std::string_view text, const TaxonSet* taxa = nullptr);
WeightedSplitSystem parse_weighted_split_system(std::string_view text,
                                                const TaxonSet* taxa = nullptr);
std::string write_split_system(const SplitSystem& s);
std::string write_split_system(const WeightedSplitSystem& w);

// --- operations -----------------------------------------------------------

DissimilarityMap split_pseudometric(const TaxonSet& taxa, const Split& s);

// The n(n-1)/2 splits S_{i,j} = {x_i..x_{j-1}} | rest of the ring.
SplitSystem circular_splits_of(const TaxonSet& taxa, const CircularOrdering& ring);

bool is_circular(const SplitSystem& s, const CircularOrdering& ring);
// One block is a contiguous arc of the ring.
bool is_arc(const Split& s, const CircularOrdering& ring);

// Lexicographically least certifying ring, by exhaustive search. Throws
// SearchRefusedError when n > limit.
std::optional<CircularOrdering> find_circular_witness(const SplitSystem& s,
                                                      std::size_t limit = 10);

// sum of w(S) D_S.
DissimilarityMap evaluate(const WeightedSplitSystem& w);

// The unique weighted circular split system that sums to a Kalmanson map.
// Nontrivial zero-weight splits are dropped; trivial splits always stay.
// Throws NotKalmansonError with the first violating quartet.
WeightedSplitSystem kalmanson_decompose(const DissimilarityMap& d, const CircularOrdering& ring);

// Holds when every incompatible pair has its four derived splits present.
CheckResult<std::pair<Split, Split>> is_unrooted_family(const SplitSystem& s);

// Least unrooted family containing s.
SplitSystem closure(const SplitSystem& s);

}  // namespace pcfit
