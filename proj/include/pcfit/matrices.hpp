#pragma once

#include "pcfit/error.hpp"
#include "pcfit/rational.hpp"
#include "pcfit/taxa.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcfit {

// Symmetric matrix with a meaningful diagonal; entries may be negative.
// Houses Gromov products and Robinsonian matrices.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    // All zeros.
    explicit SymmetricMatrix(TaxonSet taxa);
    // Row-major n*n values; throws DomainError naming the first asymmetric cell.
    SymmetricMatrix(TaxonSet taxa, std::vector<Rational> values);

    const TaxonSet& taxa() const { return taxa_; }
    std::size_t size() const { return taxa_.size(); }
    const Rational& operator()(Taxon i, Taxon j) const { return values_[i * size() + j]; }
    const std::vector<Rational>& values() const { return values_; }

    // Same labels listed in a different order.
    SymmetricMatrix reordered(const TaxonSet& target) const;

    friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
        return a.taxa_ == b.taxa_ && a.values_ == b.values_;
    }

private:
    TaxonSet taxa_;
    std::vector<Rational> values_;
};

// Symmetric, zero diagonal, non-negative. The triangle inequality is never
// required.
class DissimilarityMap {
public:
    DissimilarityMap() = default;
    explicit DissimilarityMap(TaxonSet taxa);
    DissimilarityMap(TaxonSet taxa, std::vector<Rational> values);

    const TaxonSet& taxa() const { return taxa_; }
    std::size_t size() const { return taxa_.size(); }
    const Rational& operator()(Taxon i, Taxon j) const { return values_[i * size() + j]; }
    const std::vector<Rational>& values() const { return values_; }

    DissimilarityMap reordered(const TaxonSet& target) const;

    friend bool operator==(const DissimilarityMap& a, const DissimilarityMap& b) {
        return a.taxa_ == b.taxa_ && a.values_ == b.values_;
    }

private:
    TaxonSet taxa_;
    std::vector<Rational> values_;
};

struct TripleWitness {
    std::array<Taxon, 3> taxa;
};

// Four taxa and the pair sums D(a,b)+D(c,d), D(a,c)+D(b,d), D(a,d)+D(b,c).
struct QuartetWitness {
    std::array<Taxon, 4> taxa;
    std::array<Rational, 3> sums;
};

// A weakly increasing chain of an ordering (repeats allowed) that breaks
// the named condition.
struct ChainWitness {
    std::vector<Taxon> chain;
    std::string condition;
};

template <class Witness>
struct CheckResult {
    bool holds = true;
    std::optional<Witness> witness;

    explicit operator bool() const { return holds; }
};

class NotKalmansonError : public DomainError {
public:
    NotKalmansonError(const std::string& message, QuartetWitness witness)
        : DomainError(message), witness_(std::move(witness)) {}
    const QuartetWitness& witness() const { return witness_; }

private:
    QuartetWitness witness_;
};

// --- file format -----------------------------------------------------------
//
//   n
//   label v_1 ... v_n      (n rows)
//
// Values are integers, fractions or decimals; the writer emits reduced
// fractions separated by single spaces.

DissimilarityMap parse_dissimilarity(std::string_view text);
SymmetricMatrix parse_symmetric_matrix(std::string_view text);
std::string write_matrix(const DissimilarityMap& d);
std::string write_matrix(const SymmetricMatrix& m);
// Rows and columns listed in `order`.
std::string write_matrix(const SymmetricMatrix& m, const LinearOrdering& order);

// --- predicates -----------------------------------------------------------

// D(x,y) <= max{D(x,z), D(y,z)} for every triple.
CheckResult<TripleWitness> is_ultrametric(const DissimilarityMap& d);

// Every quartet's largest pair sum is attained at least twice.
CheckResult<QuartetWitness> four_point_check(const DissimilarityMap& d);

// The crossing sums inequality for every i<j<k<l read around `ring`.
CheckResult<QuartetWitness> kalmanson_check(const DissimilarityMap& d,
                                            const CircularOrdering& ring);

// Exhaustive search over the (n-1)!/2 ring classes (taxon 0 first,
// second < last) in lexicographic order; returns the first certifying ring.
// Throws SearchRefusedError when n > limit.
std::optional<CircularOrdering> find_kalmanson_ordering(const DissimilarityMap& d,
                                                        std::size_t limit = 10);

// R(x,y) = (D(x,y) - D(x,r) - D(y,r)) / 2 over X \ {r}, diagonal included.
// The result keeps the remaining taxa in their original order.
SymmetricMatrix gromov_product(const DissimilarityMap& d, Taxon r);

// D(x,y) = 2R(x,y) - R(x,x) - R(y,y), D(x,r) = -R(x,x), with r appended to
// the taxa. Throws DomainError on a label collision or a negative result.
DissimilarityMap inverse_gromov(const SymmetricMatrix& m, const std::string& r);

// max{R(x,y), R(y,z)} <= R(x,z) for all x <= y <= z in `order` (repeats
// allowed, so the diagonal is the row minimum).
CheckResult<ChainWitness> is_robinsonian(const SymmetricMatrix& m, const LinearOrdering& order);

// Robinsonian plus, for all w <= x <= y <= z,
//   R(x,y) = R(w,y)  =>  R(x,z) = R(w,z)
//   R(x,y) = R(x,z)  =>  R(w,y) = R(w,z)
CheckResult<ChainWitness> is_strong_robinsonian(const SymmetricMatrix& m,
                                                const LinearOrdering& order);

// R(x,y) + R(w,z) <= R(x,z) + R(w,y) for all w <= x <= y <= z.
CheckResult<ChainWitness> robinsonian_four_point(const SymmetricMatrix& m,
                                                 const LinearOrdering& order);

}  // namespace pcfit
