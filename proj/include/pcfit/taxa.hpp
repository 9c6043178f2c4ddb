#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pcfit {

using Taxon = std::size_t;

// Ordered list of distinct labels. Index i is taxon i for every object built
// over this set. Labels may not contain whitespace or any of ",|();:#!"
// so they survive every text format the library writes.
class TaxonSet {
public:
    TaxonSet() = default;
    explicit TaxonSet(std::vector<std::string> labels);

    // Labels "1".."n".
    static TaxonSet numbered(std::size_t n);

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    const std::string& label(Taxon t) const { return labels_.at(t); }
    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<Taxon> find(std::string_view label) const;
    // Throws DomainError when the label is unknown.
    Taxon index_of(std::string_view label) const;

    // Same labels in the same order, minus taxon t.
    TaxonSet without(Taxon t) const;
    // Appends a fresh label; throws DomainError on collision.
    TaxonSet with(const std::string& label) const;

    // Same labels, possibly in another order.
    bool same_labels(const TaxonSet& other) const;

    friend bool operator==(const TaxonSet& a, const TaxonSet& b) { return a.labels_ == b.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, Taxon> index_;
};

// Throws DomainError if the label is unusable in the text formats.
void validate_label(std::string_view label);

// Position in `full` of each taxon of `sub`, matched by label.
std::vector<Taxon> embedding(const TaxonSet& sub, const TaxonSet& full);

// A subset of {0, ..., universe-1}, stored as a bitset.
//
// Ordering is lexicographic on the increasing member lists, so
// {0} < {0,1} < {0,2} < {1}. Every canonical listing in the library uses it.
class TaxonSubset {
public:
    TaxonSubset() = default;
    explicit TaxonSubset(std::size_t universe);
    TaxonSubset(std::size_t universe, std::initializer_list<Taxon> members);
    TaxonSubset(std::size_t universe, const std::vector<Taxon>& members);

    static TaxonSubset full(std::size_t universe);
    static TaxonSubset singleton(std::size_t universe, Taxon t);
    // Members first, ..., last of `sequence` (inclusive positions).
    static TaxonSubset range(std::size_t universe, const std::vector<Taxon>& sequence,
                             std::size_t first, std::size_t last);

    std::size_t universe() const { return universe_; }
    std::size_t count() const;
    bool empty() const;
    bool is_full() const { return count() == universe_; }

    bool contains(Taxon t) const { return (words_[t / 64] >> (t % 64)) & 1U; }
    void insert(Taxon t) { words_[t / 64] |= std::uint64_t{1} << (t % 64); }
    void erase(Taxon t) { words_[t / 64] &= ~(std::uint64_t{1} << (t % 64)); }

    TaxonSubset complement() const;
    bool is_subset_of(const TaxonSubset& other) const;
    bool intersects(const TaxonSubset& other) const;
    std::optional<Taxon> first() const;
    std::vector<Taxon> members() const;

    // A and B are compatible when A ∩ B is empty, A or B.
    bool compatible_with(const TaxonSubset& other) const;

    TaxonSubset& operator&=(const TaxonSubset& other);
    TaxonSubset& operator|=(const TaxonSubset& other);
    TaxonSubset& operator-=(const TaxonSubset& other);

    friend TaxonSubset operator&(TaxonSubset a, const TaxonSubset& b) { return a &= b; }
    friend TaxonSubset operator|(TaxonSubset a, const TaxonSubset& b) { return a |= b; }
    friend TaxonSubset operator-(TaxonSubset a, const TaxonSubset& b) { return a -= b; }

    friend bool operator==(const TaxonSubset& a, const TaxonSubset& b) {
        return a.universe_ == b.universe_ && a.words_ == b.words_;
    }
    friend std::strong_ordering operator<=>(const TaxonSubset& a, const TaxonSubset& b);

    std::size_t hash() const;

private:
    void trim();

    std::size_t universe_ = 0;
    std::vector<std::uint64_t> words_;
};

struct TaxonSubsetHash {
    std::size_t operator()(const TaxonSubset& s) const { return s.hash(); }
};

// "a,b,c" with labels listed in taxon-index order.
std::string format_subset(const TaxonSubset& s, const TaxonSet& taxa);

// Maps the members of `sub` through an embedding into a larger universe.
TaxonSubset lift(const TaxonSubset& sub, const std::vector<Taxon>& embed, std::size_t universe);

// A permutation of 0..n-1 read left to right.
class LinearOrdering {
public:
    LinearOrdering() = default;
    explicit LinearOrdering(std::vector<Taxon> sequence);

    static LinearOrdering identity(std::size_t n);

    std::size_t size() const { return sequence_.size(); }
    Taxon operator[](std::size_t position) const { return sequence_[position]; }
    std::size_t position(Taxon t) const { return position_.at(t); }
    const std::vector<Taxon>& sequence() const { return sequence_; }

    friend bool operator==(const LinearOrdering& a, const LinearOrdering& b) {
        return a.sequence_ == b.sequence_;
    }
    friend auto operator<=>(const LinearOrdering& a, const LinearOrdering& b) {
        return a.sequence_ <=> b.sequence_;
    }

private:
    std::vector<Taxon> sequence_;
    std::vector<std::size_t> position_;
};

// The taxa arranged on a ring. Two orderings are equal when they differ by
// rotation or reflection; canonical() is the representative that starts with
// taxon 0 and has sequence[1] < sequence[n-1].
class CircularOrdering {
public:
    CircularOrdering() = default;
    explicit CircularOrdering(std::vector<Taxon> sequence);

    static CircularOrdering identity(std::size_t n);

    std::size_t size() const { return sequence_.size(); }
    Taxon operator[](std::size_t position) const { return sequence_[position]; }
    const std::vector<Taxon>& sequence() const { return sequence_; }

    CircularOrdering canonical() const;

    // The taxa after r going around the ring, with r removed, as indices of
    // the reduced taxon set (indices above r shift down by one).
    LinearOrdering cut_at(Taxon r) const;

    friend bool operator==(const CircularOrdering& a, const CircularOrdering& b) {
        return a.canonical().sequence_ == b.canonical().sequence_;
    }

private:
    std::vector<Taxon> sequence_;
};

// Comma-separated labels.
std::string format_sequence(const std::vector<Taxon>& sequence, const TaxonSet& taxa);

// Parses "a,b,c" into taxon indices; every taxon exactly once.
std::vector<Taxon> parse_sequence(std::string_view text, const TaxonSet& taxa);

// Index of t in the taxon set with r removed.
inline Taxon reduced_index(Taxon t, Taxon r) { return t < r ? t : t - 1; }
// Inverse of reduced_index.
inline Taxon expanded_index(Taxon t, Taxon r) { return t < r ? t : t + 1; }

}  // namespace pcfit
