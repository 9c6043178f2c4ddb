#include "pcfit/splits.hpp"

#include "closure.hpp"
#include "pcfit/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace pcfit {

Split::Split(TaxonSubset block) : block_(std::move(block)) {
    if (block_.empty() || block_.is_full()) {
        throw DomainError("a split needs two non-empty blocks");
    }
    if (!block_.contains(0)) {
        block_ = block_.complement();
    }
}

Split Split::trivial(std::size_t universe, Taxon t) {
    return Split(TaxonSubset::singleton(universe, t));
}

bool Split::is_trivial() const {
    const std::size_t c = block_.count();
    return c == 1 || c + 1 == block_.universe();
}

TaxonSubset Split::side_without(Taxon r) const {
    return block_.contains(r) ? block_.complement() : block_;
}

bool are_compatible(const Split& a, const Split& b) {
    const TaxonSubset& a1 = a.block_a();
    const TaxonSubset& a2 = b.block_a();
    // Both A-blocks hold taxon 0, so A1 ∩ A2 is never empty.
    return a1.is_subset_of(a2) || a2.is_subset_of(a1) || (a1 | a2).is_full();
}

std::array<Split, 4> derived_splits(const Split& a, const Split& b) {
    const TaxonSubset a1 = a.block_a(), b1 = a.block_b();
    const TaxonSubset a2 = b.block_a(), b2 = b.block_b();
    return {Split(a1 & a2), Split(a1 & b2), Split(a2 & b1), Split(b1 & b2)};
}

std::string format_split(const Split& s, const TaxonSet& taxa) {
    return format_subset(s.block_a(), taxa) + "|" + format_subset(s.block_b(), taxa);
}

// ---------------------------------------------------------------------------

SplitSystem::SplitSystem(TaxonSet taxa) : taxa_(std::move(taxa)) {
    const std::size_t n = taxa_.size();
    if (n >= 2) {
        for (Taxon t = 0; t < n; ++t) {
            splits_.insert(Split::trivial(n, t));
        }
    }
}

SplitSystem::SplitSystem(TaxonSet taxa, const std::vector<Split>& splits)
    : SplitSystem(std::move(taxa)) {
    for (const Split& s : splits) {
        insert(s);
    }
}

bool SplitSystem::insert(const Split& s) {
    if (s.universe() != taxa_.size()) {
        throw DomainError("split over a different taxon count");
    }
    return splits_.insert(s).second;
}

bool SplitSystem::is_subset_of(const SplitSystem& other) const {
    return std::includes(other.splits_.begin(), other.splits_.end(), splits_.begin(),
                         splits_.end());
}

SplitSystem SplitSystem::reordered(const TaxonSet& target) const {
    if (!taxa_.same_labels(target)) {
        throw DomainError("reorder target does not carry the same labels");
    }
    std::vector<Taxon> map = embedding(taxa_, target);
    SplitSystem out(target);
    for (const Split& s : splits_) {
        out.insert(Split(lift(s.block_a(), map, target.size())));
    }
    return out;
}

WeightedSplitSystem::WeightedSplitSystem(TaxonSet taxa) : taxa_(std::move(taxa)) {
    for (const Split& s : SplitSystem(taxa_)) {
        weights_.emplace(s, 0);
    }
}

WeightedSplitSystem::WeightedSplitSystem(TaxonSet taxa, std::map<Split, Rational> weights)
    : WeightedSplitSystem(std::move(taxa)) {
    for (auto& [s, w] : weights) {
        if (s.universe() != taxa_.size()) {
            throw DomainError("split over a different taxon count");
        }
        if (w < 0) {
            throw DomainError("negative weight on split " + format_split(s, taxa_));
        }
        Rational v = w;
        v.canonicalize();
        weights_[s] = v;
    }
}

const Rational& WeightedSplitSystem::weight(const Split& s) const {
    auto it = weights_.find(s);
    if (it == weights_.end()) {
        throw DomainError("split " + format_split(s, taxa_) + " not in the system");
    }
    return it->second;
}

SplitSystem WeightedSplitSystem::system() const {
    SplitSystem out(taxa_);
    for (const auto& [s, w] : weights_) {
        out.insert(s);
    }
    return out;
}

std::vector<Split> WeightedSplitSystem::positive_splits() const {
    std::vector<Split> out;
    for (const auto& [s, w] : weights_) {
        if (w > 0) {
            out.push_back(s);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct SplitLine {
    std::size_t line;
    std::vector<std::string> block_a;
    std::vector<std::string> block_b;
    std::optional<Rational> weight;
};

std::vector<std::string> split_labels(const std::string& text, std::size_t line) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) {
            throw ParseError("empty label in '" + text + "'", line, 0);
        }
        out.push_back(item);
    }
    if (out.empty() || text.back() == ',') {
        throw ParseError("empty block in '" + text + "'", line, 0);
    }
    return out;
}

std::vector<SplitLine> read_split_lines(std::string_view text) {
    std::vector<SplitLine> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string body;
        if (!(fields >> body) || body.front() == '#') {
            continue;
        }
        auto bar = body.find('|');
        if (bar == std::string::npos || body.find('|', bar + 1) != std::string::npos) {
            throw ParseError("expected exactly one '|' in '" + body + "'", line_no, 1);
        }
        SplitLine parsed{line_no, split_labels(body.substr(0, bar), line_no),
                         split_labels(body.substr(bar + 1), line_no), std::nullopt};
        std::string weight;
        if (fields >> weight) {
            try {
                parsed.weight = parse_rational(weight);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), line_no, 0);
            }
            std::string extra;
            if (fields >> extra) {
                throw ParseError("unexpected '" + extra + "' after the weight", line_no, 0);
            }
        }
        out.push_back(std::move(parsed));
    }
    return out;
}

TaxonSet infer_taxa(const std::vector<SplitLine>& lines) {
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& l : lines) {
        for (const auto* block : {&l.block_a, &l.block_b}) {
            for (const auto& label : *block) {
                if (seen.insert(label).second) {
                    labels.push_back(label);
                }
            }
        }
    }
    return TaxonSet(std::move(labels));
}

Split to_split(const SplitLine& l, const TaxonSet& taxa) {
    TaxonSubset a(taxa.size());
    TaxonSubset b(taxa.size());
    try {
        for (const auto& label : l.block_a) {
            a.insert(taxa.index_of(label));
        }
        for (const auto& label : l.block_b) {
            b.insert(taxa.index_of(label));
        }
    } catch (const DomainError& e) {
        throw ParseError(e.what(), l.line, 0);
    }
    if (a.intersects(b) || a.count() != l.block_a.size() || b.count() != l.block_b.size()) {
        throw ParseError("a label is repeated in the split", l.line, 0);
    }
    if (!(a | b).is_full()) {
        throw ParseError("split does not cover every taxon", l.line, 0);
    }
    return Split(a);
}

}  // namespace

SplitSystem parse_split_system(std::string_view text, const TaxonSet* taxa) {
    auto lines = read_split_lines(text);
    TaxonSet set = taxa ? *taxa : infer_taxa(lines);
    SplitSystem out(set);
    for (const auto& l : lines) {
        out.insert(to_split(l, set));
    }
    return out;
}

WeightedSplitSystem parse_weighted_split_system(std::string_view text, const TaxonSet* taxa) {
    auto lines = read_split_lines(text);
    TaxonSet set = taxa ? *taxa : infer_taxa(lines);
    std::map<Split, Rational> weights;
    for (const auto& l : lines) {
        Rational w = l.weight.value_or(Rational(0));
        if (w < 0) {
            throw ParseError("negative split weight", l.line, 0);
        }
        if (!weights.emplace(to_split(l, set), w).second) {
            throw ParseError("split listed twice", l.line, 0);
        }
    }
    return WeightedSplitSystem(set, std::move(weights));
}

std::string write_split_system(const SplitSystem& s) {
    std::string out;
    for (const Split& split : s) {
        out += format_split(split, s.taxa()) + "\n";
    }
    return out;
}

std::string write_split_system(const WeightedSplitSystem& w) {
    std::string out;
    for (const auto& [split, weight] : w.weights()) {
        out += format_split(split, w.taxa()) + " " + to_string(weight) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

DissimilarityMap split_pseudometric(const TaxonSet& taxa, const Split& s) {
    const std::size_t n = taxa.size();
    std::vector<Rational> values(n * n);
    for (Taxon i = 0; i < n; ++i) {
        for (Taxon j = 0; j < n; ++j) {
            values[i * n + j] = s.separates(i, j) ? 1 : 0;
        }
    }
    return DissimilarityMap(taxa, std::move(values));
}

SplitSystem circular_splits_of(const TaxonSet& taxa, const CircularOrdering& ring) {
    const std::size_t n = taxa.size();
    if (ring.size() != n) {
        throw DomainError("circular ordering size does not match the taxa");
    }
    SplitSystem out(taxa);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out.insert(Split(TaxonSubset::range(n, ring.sequence(), i, j - 1)));
        }
    }
    return out;
}

bool is_arc(const Split& s, const CircularOrdering& ring) {
    const std::size_t n = ring.size();
    std::size_t changes = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (s.block_a().contains(ring[k]) != s.block_a().contains(ring[(k + 1) % n])) {
            ++changes;
        }
    }
    return changes == 2;
}

bool is_circular(const SplitSystem& s, const CircularOrdering& ring) {
    if (ring.size() != s.taxa().size()) {
        throw DomainError("circular ordering size does not match the taxa");
    }
    return std::all_of(s.begin(), s.end(), [&](const Split& x) { return is_arc(x, ring); });
}

std::optional<CircularOrdering> find_circular_witness(const SplitSystem& s, std::size_t limit) {
    const std::size_t n = s.taxa().size();
    if (n > limit) {
        throw SearchRefusedError("ring search refused for " + std::to_string(n) +
                                 " taxa (limit " + std::to_string(limit) + ")");
    }
    if (n <= 3) {
        return CircularOrdering::identity(n);
    }
    std::vector<Split> nontrivial;
    for (const Split& x : s) {
        if (!x.is_trivial()) {
            nontrivial.push_back(x);
        }
    }
    std::vector<Taxon> seq{0};
    std::vector<bool> used(n, false);
    used[0] = true;

    // A prefix in which some block switches membership more than twice can
    // never close into an arc.
    auto prefix_ok = [&]() {
        for (const Split& x : nontrivial) {
            std::size_t changes = 0;
            for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
                changes += x.block_a().contains(seq[k]) != x.block_a().contains(seq[k + 1]);
            }
            if (changes > 2) {
                return false;
            }
        }
        return true;
    };

    std::function<bool()> extend = [&]() -> bool {
        if (seq.size() == n) {
            return seq[1] < seq[n - 1] && is_circular(s, CircularOrdering(seq));
        }
        for (Taxon t = 1; t < n; ++t) {
            if (used[t]) {
                continue;
            }
            seq.push_back(t);
            used[t] = true;
            if (prefix_ok() && extend()) {
                return true;
            }
            seq.pop_back();
            used[t] = false;
        }
        return false;
    };
    if (extend()) {
        return CircularOrdering(seq);
    }
    return std::nullopt;
}

DissimilarityMap evaluate(const WeightedSplitSystem& w) {
    const std::size_t n = w.taxa().size();
    std::vector<Rational> values(n * n);
    for (const auto& [s, weight] : w.weights()) {
        if (weight == 0) {
            continue;
        }
        const TaxonSubset& a = s.block_a();
        const std::vector<Taxon> inside = a.members();
        const std::vector<Taxon> outside = a.complement().members();
        for (Taxon i : inside) {
            for (Taxon j : outside) {
                values[i * n + j] += weight;
                values[j * n + i] += weight;
            }
        }
    }
    return DissimilarityMap(w.taxa(), std::move(values));
}

WeightedSplitSystem kalmanson_decompose(const DissimilarityMap& d, const CircularOrdering& ring) {
    auto check = kalmanson_check(d, ring);
    if (!check) {
        const auto& q = check.witness->taxa;
        throw NotKalmansonError("not Kalmanson for the ring: quartet " +
                                    format_sequence({q[0], q[1], q[2], q[3]}, d.taxa()),
                                *check.witness);
    }
    const std::size_t n = d.size();
    std::map<Split, Rational> weights;
    // Ring positions 1..n with x_0 := x_n, stored 0-based.
    auto x = [&](std::size_t i) { return ring[(i + n - 1) % n]; };
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            Rational twice = d(x(i), x(j)) + d(x(i - 1), x(j - 1)) - d(x(i), x(j - 1)) -
                             d(x(i - 1), x(j));
            if (twice < 0) {
                throw std::logic_error("negative split weight for a Kalmanson map");
            }
            Split s(TaxonSubset::range(n, ring.sequence(), i - 1, j - 2));
            if (twice != 0 || s.is_trivial()) {
                weights.emplace(s, twice / 2);
            }
        }
    }
    return WeightedSplitSystem(d.taxa(), std::move(weights));
}

CheckResult<std::pair<Split, Split>> is_unrooted_family(const SplitSystem& s) {
    const std::vector<Split> list(s.begin(), s.end());
    for (std::size_t i = 0; i < list.size(); ++i) {
        for (std::size_t j = i + 1; j < list.size(); ++j) {
            if (are_compatible(list[i], list[j])) {
                continue;
            }
            for (const Split& d : derived_splits(list[i], list[j])) {
                if (!s.contains(d)) {
                    return {false, std::pair{list[i], list[j]}};
                }
            }
        }
    }
    return {};
}

SplitSystem closure(const SplitSystem& s) {
    auto closed = detail::close_under(
        s.splits(), [](const Split& a, const Split& b) { return !are_compatible(a, b); },
        derived_splits);
    return SplitSystem(s.taxa(), std::vector<Split>(closed.begin(), closed.end()));
}

}  // namespace pcfit
