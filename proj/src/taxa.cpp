#include "pcfit/taxa.hpp"

#include "pcfit/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <sstream>

namespace pcfit {

void validate_label(std::string_view label) {
    if (label.empty()) {
        throw DomainError("empty taxon label");
    }
    for (char c : label) {
        if (std::isspace(static_cast<unsigned char>(c)) ||
            std::string_view(",|();:#!").find(c) != std::string_view::npos) {
            throw DomainError("taxon label '" + std::string(label) +
                              "' contains a reserved character");
        }
    }
}

TaxonSet::TaxonSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    index_.reserve(labels_.size());
    for (Taxon i = 0; i < labels_.size(); ++i) {
        validate_label(labels_[i]);
        if (!index_.emplace(labels_[i], i).second) {
            throw DomainError("duplicate taxon label '" + labels_[i] + "'");
        }
    }
}

TaxonSet TaxonSet::numbered(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= n; ++i) {
        labels.push_back(std::to_string(i));
    }
    return TaxonSet(std::move(labels));
}

std::optional<Taxon> TaxonSet::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Taxon TaxonSet::index_of(std::string_view label) const {
    if (auto t = find(label)) {
        return *t;
    }
    throw DomainError("unknown taxon '" + std::string(label) + "'");
}

TaxonSet TaxonSet::without(Taxon t) const {
    std::vector<std::string> labels = labels_;
    labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(t));
    return TaxonSet(std::move(labels));
}

TaxonSet TaxonSet::with(const std::string& label) const {
    if (find(label)) {
        throw DomainError("taxon label '" + label + "' already present");
    }
    std::vector<std::string> labels = labels_;
    labels.push_back(label);
    return TaxonSet(std::move(labels));
}

bool TaxonSet::same_labels(const TaxonSet& other) const {
    if (size() != other.size()) {
        return false;
    }
    return std::all_of(labels_.begin(), labels_.end(),
                       [&](const std::string& l) { return other.find(l).has_value(); });
}

std::vector<Taxon> embedding(const TaxonSet& sub, const TaxonSet& full) {
    std::vector<Taxon> map(sub.size());
    for (Taxon i = 0; i < sub.size(); ++i) {
        map[i] = full.index_of(sub.label(i));
    }
    return map;
}

// ---------------------------------------------------------------------------
// TaxonSubset

TaxonSubset::TaxonSubset(std::size_t universe)
    : universe_(universe), words_((universe + 63) / 64 + (universe == 0 ? 1 : 0), 0) {}

TaxonSubset::TaxonSubset(std::size_t universe, std::initializer_list<Taxon> members)
    : TaxonSubset(universe) {
    for (Taxon t : members) {
        insert(t);
    }
}

TaxonSubset::TaxonSubset(std::size_t universe, const std::vector<Taxon>& members)
    : TaxonSubset(universe) {
    for (Taxon t : members) {
        insert(t);
    }
}

TaxonSubset TaxonSubset::full(std::size_t universe) {
    TaxonSubset s(universe);
    std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t{0});
    s.trim();
    return s;
}

TaxonSubset TaxonSubset::singleton(std::size_t universe, Taxon t) {
    TaxonSubset s(universe);
    s.insert(t);
    return s;
}

TaxonSubset TaxonSubset::range(std::size_t universe, const std::vector<Taxon>& sequence,
                               std::size_t first, std::size_t last) {
    TaxonSubset s(universe);
    for (std::size_t p = first; p <= last; ++p) {
        s.insert(sequence[p]);
    }
    return s;
}

void TaxonSubset::trim() {
    if (universe_ % 64 != 0) {
        words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
    } else if (universe_ == 0) {
        words_.back() = 0;
    }
}

std::size_t TaxonSubset::count() const {
    std::size_t c = 0;
    for (auto w : words_) {
        c += static_cast<std::size_t>(std::popcount(w));
    }
    return c;
}

bool TaxonSubset::empty() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

TaxonSubset TaxonSubset::complement() const {
    TaxonSubset s = *this;
    for (auto& w : s.words_) {
        w = ~w;
    }
    s.trim();
    return s;
}

bool TaxonSubset::is_subset_of(const TaxonSubset& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (words_[i] & ~other.words_[i]) {
            return false;
        }
    }
    return true;
}

bool TaxonSubset::intersects(const TaxonSubset& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (words_[i] & other.words_[i]) {
            return true;
        }
    }
    return false;
}

bool TaxonSubset::compatible_with(const TaxonSubset& other) const {
    return !intersects(other) || is_subset_of(other) || other.is_subset_of(*this);
}

std::optional<Taxon> TaxonSubset::first() const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (words_[i]) {
            return i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i]));
        }
    }
    return std::nullopt;
}

std::vector<Taxon> TaxonSubset::members() const {
    std::vector<Taxon> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        std::uint64_t w = words_[i];
        while (w) {
            out.push_back(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

TaxonSubset& TaxonSubset::operator&=(const TaxonSubset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        words_[i] &= other.words_[i];
    }
    return *this;
}

TaxonSubset& TaxonSubset::operator|=(const TaxonSubset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        words_[i] |= other.words_[i];
    }
    return *this;
}

TaxonSubset& TaxonSubset::operator-=(const TaxonSubset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        words_[i] &= ~other.words_[i];
    }
    return *this;
}

std::strong_ordering operator<=>(const TaxonSubset& a, const TaxonSubset& b) {
    if (a.universe_ != b.universe_) {
        return a.universe_ <=> b.universe_;
    }
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
        std::uint64_t diff = a.words_[i] ^ b.words_[i];
        if (!diff) {
            continue;
        }
        // p is the first taxon in exactly one of the two sets. The set holding
        // p is smaller unless the other set has nothing beyond p (a prefix).
        unsigned bit = static_cast<unsigned>(std::countr_zero(diff));
        const bool a_has = (a.words_[i] >> bit) & 1U;
        const TaxonSubset& other = a_has ? b : a;
        std::uint64_t above = bit == 63 ? 0 : other.words_[i] >> (bit + 1);
        bool other_continues = above != 0;
        for (std::size_t j = i + 1; !other_continues && j < other.words_.size(); ++j) {
            other_continues = other.words_[j] != 0;
        }
        bool a_smaller = a_has == other_continues;
        return a_smaller ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

std::size_t TaxonSubset::hash() const {
    std::size_t h = universe_ * 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) {
        h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

std::string format_subset(const TaxonSubset& s, const TaxonSet& taxa) {
    std::string out;
    for (Taxon t : s.members()) {
        if (!out.empty()) {
            out += ',';
        }
        out += taxa.label(t);
    }
    return out;
}

TaxonSubset lift(const TaxonSubset& sub, const std::vector<Taxon>& embed, std::size_t universe) {
    TaxonSubset out(universe);
    for (Taxon t : sub.members()) {
        out.insert(embed[t]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orderings

namespace {

void require_permutation(const std::vector<Taxon>& sequence, const char* what) {
    std::vector<bool> seen(sequence.size(), false);
    for (Taxon t : sequence) {
        if (t >= sequence.size() || seen[t]) {
            throw DomainError(std::string(what) + " is not a permutation of the taxa");
        }
        seen[t] = true;
    }
}

}  // namespace

LinearOrdering::LinearOrdering(std::vector<Taxon> sequence) : sequence_(std::move(sequence)) {
    require_permutation(sequence_, "linear ordering");
    position_.resize(sequence_.size());
    for (std::size_t p = 0; p < sequence_.size(); ++p) {
        position_[sequence_[p]] = p;
    }
}

LinearOrdering LinearOrdering::identity(std::size_t n) {
    std::vector<Taxon> seq(n);
    for (Taxon i = 0; i < n; ++i) {
        seq[i] = i;
    }
    return LinearOrdering(std::move(seq));
}

CircularOrdering::CircularOrdering(std::vector<Taxon> sequence) : sequence_(std::move(sequence)) {
    require_permutation(sequence_, "circular ordering");
}

CircularOrdering CircularOrdering::identity(std::size_t n) {
    std::vector<Taxon> seq(n);
    for (Taxon i = 0; i < n; ++i) {
        seq[i] = i;
    }
    return CircularOrdering(std::move(seq));
}

CircularOrdering CircularOrdering::canonical() const {
    const std::size_t n = sequence_.size();
    if (n == 0) {
        return *this;
    }
    auto zero = static_cast<std::size_t>(
        std::find(sequence_.begin(), sequence_.end(), Taxon{0}) - sequence_.begin());
    std::vector<Taxon> forward(n);
    for (std::size_t k = 0; k < n; ++k) {
        forward[k] = sequence_[(zero + k) % n];
    }
    if (n >= 3 && forward[1] > forward[n - 1]) {
        std::reverse(forward.begin() + 1, forward.end());
    }
    CircularOrdering out;
    out.sequence_ = std::move(forward);
    return out;
}

LinearOrdering CircularOrdering::cut_at(Taxon r) const {
    const std::size_t n = sequence_.size();
    auto at = static_cast<std::size_t>(std::find(sequence_.begin(), sequence_.end(), r) -
                                       sequence_.begin());
    if (at == n) {
        throw DomainError("taxon not in circular ordering");
    }
    std::vector<Taxon> seq;
    seq.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        seq.push_back(reduced_index(sequence_[(at + k) % n], r));
    }
    return LinearOrdering(std::move(seq));
}

std::string format_sequence(const std::vector<Taxon>& sequence, const TaxonSet& taxa) {
    std::string out;
    for (Taxon t : sequence) {
        if (!out.empty()) {
            out += ',';
        }
        out += taxa.label(t);
    }
    return out;
}

std::vector<Taxon> parse_sequence(std::string_view text, const TaxonSet& taxa) {
    std::vector<Taxon> seq;
    std::stringstream in{std::string(text)};
    std::string item;
    while (std::getline(in, item, ',')) {
        seq.push_back(taxa.index_of(item));
    }
    if (seq.size() != taxa.size()) {
        throw DomainError("ordering must list all " + std::to_string(taxa.size()) +
                          " taxa exactly once");
    }
    require_permutation(seq, "ordering");
    return seq;
}

}  // namespace pcfit
