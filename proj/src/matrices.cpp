#include "pcfit/matrices.hpp"

#include "pcfit/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace pcfit {

namespace {

std::string cell(Taxon i, Taxon j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

void require_symmetric(const std::vector<Rational>& values, std::size_t n) {
    for (Taxon i = 0; i < n; ++i) {
        for (Taxon j = i + 1; j < n; ++j) {
            if (values[i * n + j] != values[j * n + i]) {
                throw DomainError("matrix not symmetric: cells " + cell(i, j) + "/" + cell(j, i) +
                                  " hold " + to_string(values[i * n + j]) + " and " +
                                  to_string(values[j * n + i]));
            }
        }
    }
}

void require_dissimilarity(const std::vector<Rational>& values, std::size_t n) {
    for (Taxon i = 0; i < n; ++i) {
        if (values[i * n + i] != 0) {
            throw DomainError("nonzero diagonal at cell " + cell(i, i));
        }
    }
    require_symmetric(values, n);
    for (Taxon i = 0; i < n; ++i) {
        for (Taxon j = 0; j < n; ++j) {
            if (values[i * n + j] < 0) {
                throw DomainError("negative entry at cell " + cell(i, j));
            }
        }
    }
}

std::vector<Rational> checked_values(const TaxonSet& taxa, std::vector<Rational> values) {
    if (values.size() != taxa.size() * taxa.size()) {
        throw DomainError("matrix has " + std::to_string(values.size()) + " entries, expected " +
                          std::to_string(taxa.size() * taxa.size()));
    }
    for (auto& v : values) {
        v.canonicalize();
    }
    return values;
}

template <class Matrix>
std::vector<Rational> permuted_values(const Matrix& m, const TaxonSet& target) {
    if (!m.taxa().same_labels(target)) {
        throw DomainError("reorder target does not carry the same labels");
    }
    const std::size_t n = m.size();
    std::vector<Taxon> map = embedding(target, m.taxa());
    std::vector<Rational> values(n * n);
    for (Taxon i = 0; i < n; ++i) {
        for (Taxon j = 0; j < n; ++j) {
            values[i * n + j] = m(map[i], map[j]);
        }
    }
    return values;
}

// ---------------------------------------------------------------------------
// Text format

struct Token {
    std::string text;
    std::size_t column;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i >= line.size()) {
            break;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

struct RawMatrix {
    TaxonSet taxa;
    std::vector<Rational> values;
    std::vector<std::size_t> row_line;
};

RawMatrix parse_raw(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;

    auto next_nonblank = [&](std::vector<Token>& tokens) {
        while (std::getline(in, line)) {
            ++line_no;
            tokens = tokenize(line);
            if (!tokens.empty()) {
                return true;
            }
        }
        return false;
    };

    std::vector<Token> tokens;
    if (!next_nonblank(tokens)) {
        throw ParseError("empty matrix file", 1, 0);
    }
    if (tokens.size() != 1 ||
        !std::all_of(tokens[0].text.begin(), tokens[0].text.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw ParseError("first line must hold the taxon count", line_no, 1);
    }
    const std::size_t n = std::stoul(tokens[0].text);
    if (n == 0) {
        throw ParseError("taxon count must be positive", line_no, 1);
    }

    RawMatrix raw;
    std::vector<std::string> labels;
    std::vector<std::string> seen;
    raw.values.resize(n * n);
    for (std::size_t row = 0; row < n; ++row) {
        if (!next_nonblank(tokens)) {
            throw ParseError("expected " + std::to_string(n) + " matrix rows, found " +
                                 std::to_string(row),
                             line_no + 1, 0);
        }
        if (tokens.size() != n + 1) {
            throw ParseError("row " + std::to_string(row + 1) + " has " +
                                 std::to_string(tokens.size() - 1) + " values, expected " +
                                 std::to_string(n),
                             line_no, 0);
        }
        const std::string& label = tokens[0].text;
        try {
            validate_label(label);
        } catch (const DomainError& e) {
            throw ParseError(e.what(), line_no, tokens[0].column);
        }
        if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
            throw ParseError("duplicate label '" + label + "' in row " + std::to_string(row + 1),
                             line_no, tokens[0].column);
        }
        labels.push_back(label);
        raw.row_line.push_back(line_no);
        for (std::size_t col = 0; col < n; ++col) {
            const Token& tok = tokens[col + 1];
            try {
                raw.values[row * n + col] = parse_rational(tok.text);
            } catch (const std::invalid_argument& e) {
                throw ParseError(std::string(e.what()) + " at row " + std::to_string(row + 1) +
                                     ", column " + std::to_string(col + 1),
                                 line_no, tok.column);
            }
        }
    }
    if (next_nonblank(tokens)) {
        throw ParseError("unexpected content after " + std::to_string(n) + " rows", line_no, 1);
    }
    raw.taxa = TaxonSet(std::move(labels));
    return raw;
}

void check_symmetric_raw(const RawMatrix& raw) {
    const std::size_t n = raw.taxa.size();
    for (Taxon i = 0; i < n; ++i) {
        for (Taxon j = i + 1; j < n; ++j) {
            if (raw.values[i * n + j] != raw.values[j * n + i]) {
                throw ParseError("matrix not symmetric: cells " + cell(i, j) + "/" + cell(j, i) +
                                     " hold " + to_string(raw.values[i * n + j]) + " and " +
                                     to_string(raw.values[j * n + i]),
                                 raw.row_line[j], 0);
            }
        }
    }
}

template <class Matrix>
std::string write_rows(const Matrix& m, const std::vector<Taxon>& order) {
    std::string out = std::to_string(order.size()) + "\n";
    for (Taxon i : order) {
        out += m.taxa().label(i);
        for (Taxon j : order) {
            out += ' ';
            out += to_string(m(i, j));
        }
        out += '\n';
    }
    return out;
}

// Calls visit(p, q, s, t) over position tuples p <= q <= s <= t in
// lexicographic order until it returns false.
void for_each_chain4(std::size_t n, const std::function<bool(std::size_t, std::size_t, std::size_t,
                                                             std::size_t)>& visit) {
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p; q < n; ++q) {
            for (std::size_t s = q; s < n; ++s) {
                for (std::size_t t = s; t < n; ++t) {
                    if (!visit(p, q, s, t)) {
                        return;
                    }
                }
            }
        }
    }
}

bool kalmanson_quad(const DissimilarityMap& d, Taxon a, Taxon b, Taxon c, Taxon e) {
    const Rational cross = d(a, c) + d(b, e);
    return d(a, b) + d(c, e) <= cross && d(e, a) + d(b, c) <= cross;
}

QuartetWitness make_quartet(const DissimilarityMap& d, Taxon a, Taxon b, Taxon c, Taxon e) {
    return QuartetWitness{{a, b, c, e},
                          {Rational(d(a, b) + d(c, e)), Rational(d(a, c) + d(b, e)),
                           Rational(d(a, e) + d(b, c))}};
}

}  // namespace

// ---------------------------------------------------------------------------

SymmetricMatrix::SymmetricMatrix(TaxonSet taxa)
    : taxa_(std::move(taxa)), values_(taxa_.size() * taxa_.size()) {}

SymmetricMatrix::SymmetricMatrix(TaxonSet taxa, std::vector<Rational> values)
    : taxa_(std::move(taxa)), values_(checked_values(taxa_, std::move(values))) {
    require_symmetric(values_, taxa_.size());
}

SymmetricMatrix SymmetricMatrix::reordered(const TaxonSet& target) const {
    return SymmetricMatrix(target, permuted_values(*this, target));
}

DissimilarityMap::DissimilarityMap(TaxonSet taxa)
    : taxa_(std::move(taxa)), values_(taxa_.size() * taxa_.size()) {}

DissimilarityMap::DissimilarityMap(TaxonSet taxa, std::vector<Rational> values)
    : taxa_(std::move(taxa)), values_(checked_values(taxa_, std::move(values))) {
    require_dissimilarity(values_, taxa_.size());
}

DissimilarityMap DissimilarityMap::reordered(const TaxonSet& target) const {
    return DissimilarityMap(target, permuted_values(*this, target));
}

DissimilarityMap parse_dissimilarity(std::string_view text) {
    RawMatrix raw = parse_raw(text);
    const std::size_t n = raw.taxa.size();
    for (Taxon i = 0; i < n; ++i) {
        if (raw.values[i * n + i] != 0) {
            throw ParseError("nonzero diagonal at cell " + cell(i, i), raw.row_line[i], 0);
        }
    }
    check_symmetric_raw(raw);
    for (Taxon i = 0; i < n; ++i) {
        for (Taxon j = 0; j < n; ++j) {
            if (raw.values[i * n + j] < 0) {
                throw ParseError("negative entry at cell " + cell(i, j), raw.row_line[i], 0);
            }
        }
    }
    return DissimilarityMap(std::move(raw.taxa), std::move(raw.values));
}

SymmetricMatrix parse_symmetric_matrix(std::string_view text) {
    RawMatrix raw = parse_raw(text);
    check_symmetric_raw(raw);
    return SymmetricMatrix(std::move(raw.taxa), std::move(raw.values));
}

std::string write_matrix(const DissimilarityMap& d) {
    return write_rows(d, LinearOrdering::identity(d.size()).sequence());
}

std::string write_matrix(const SymmetricMatrix& m) {
    return write_rows(m, LinearOrdering::identity(m.size()).sequence());
}

std::string write_matrix(const SymmetricMatrix& m, const LinearOrdering& order) {
    return write_rows(m, order.sequence());
}

// ---------------------------------------------------------------------------

CheckResult<TripleWitness> is_ultrametric(const DissimilarityMap& d) {
    const std::size_t n = d.size();
    for (Taxon x = 0; x < n; ++x) {
        for (Taxon y = 0; y < n; ++y) {
            for (Taxon z = 0; z < n; ++z) {
                if (x == y || y == z || x == z) {
                    continue;
                }
                if (d(x, y) > std::max(d(x, z), d(y, z))) {
                    return {false, TripleWitness{{x, y, z}}};
                }
            }
        }
    }
    return {};
}

CheckResult<QuartetWitness> four_point_check(const DissimilarityMap& d) {
    const std::size_t n = d.size();
    for (Taxon i = 0; i < n; ++i) {
        for (Taxon j = i + 1; j < n; ++j) {
            for (Taxon k = j + 1; k < n; ++k) {
                for (Taxon l = k + 1; l < n; ++l) {
                    QuartetWitness q = make_quartet(d, i, j, k, l);
                    const Rational& top = std::max({q.sums[0], q.sums[1], q.sums[2]});
                    int hits = static_cast<int>(std::count(q.sums.begin(), q.sums.end(), top));
                    if (hits < 2) {
                        return {false, std::move(q)};
                    }
                }
            }
        }
    }
    return {};
}

CheckResult<QuartetWitness> kalmanson_check(const DissimilarityMap& d,
                                            const CircularOrdering& ring) {
    if (ring.size() != d.size()) {
        throw DomainError("circular ordering size does not match the taxa");
    }
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                for (std::size_t l = k + 1; l < n; ++l) {
                    if (!kalmanson_quad(d, ring[i], ring[j], ring[k], ring[l])) {
                        return {false, make_quartet(d, ring[i], ring[j], ring[k], ring[l])};
                    }
                }
            }
        }
    }
    return {};
}

std::optional<CircularOrdering> find_kalmanson_ordering(const DissimilarityMap& d,
                                                        std::size_t limit) {
    const std::size_t n = d.size();
    if (n > limit) {
        throw SearchRefusedError("ordering search refused for " + std::to_string(n) +
                                 " taxa (limit " + std::to_string(limit) +
                                 "); supply a circular ordering");
    }
    if (n <= 3) {
        return CircularOrdering::identity(n);
    }
    std::vector<Taxon> seq{0};
    std::vector<bool> used(n, false);
    used[0] = true;

    // Depth-first in lexicographic order; a new element closes every
    // quadruple in which it is the last, so violations prune early.
    std::function<bool()> extend = [&]() -> bool {
        const std::size_t l = seq.size();
        if (l == n) {
            return seq[1] < seq[n - 1];
        }
        for (Taxon t = 1; t < n; ++t) {
            if (used[t]) {
                continue;
            }
            bool ok = true;
            for (std::size_t i = 0; ok && i < l; ++i) {
                for (std::size_t j = i + 1; ok && j < l; ++j) {
                    for (std::size_t k = j + 1; ok && k < l; ++k) {
                        ok = kalmanson_quad(d, seq[i], seq[j], seq[k], t);
                    }
                }
            }
            if (!ok) {
                continue;
            }
            seq.push_back(t);
            used[t] = true;
            if (extend()) {
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

// ---------------------------------------------------------------------------

SymmetricMatrix gromov_product(const DissimilarityMap& d, Taxon r) {
    const std::size_t n = d.size();
    if (r >= n) {
        throw DomainError("base taxon out of range");
    }
    const std::size_t m = n - 1;
    std::vector<Rational> values(m * m);
    for (Taxon x = 0; x < m; ++x) {
        for (Taxon y = 0; y < m; ++y) {
            Taxon fx = expanded_index(x, r);
            Taxon fy = expanded_index(y, r);
            values[x * m + y] = (d(fx, fy) - d(fx, r) - d(fy, r)) / 2;
        }
    }
    return SymmetricMatrix(d.taxa().without(r), std::move(values));
}

DissimilarityMap inverse_gromov(const SymmetricMatrix& m, const std::string& r) {
    TaxonSet taxa = m.taxa().with(r);
    const std::size_t k = m.size();
    const std::size_t n = k + 1;
    std::vector<Rational> values(n * n);
    for (Taxon x = 0; x < k; ++x) {
        for (Taxon y = 0; y < k; ++y) {
            values[x * n + y] = x == y ? Rational(0) : Rational(2 * m(x, y) - m(x, x) - m(y, y));
        }
        values[x * n + k] = -m(x, x);
        values[k * n + x] = -m(x, x);
    }
    for (Taxon x = 0; x < n; ++x) {
        for (Taxon y = x + 1; y < n; ++y) {
            if (values[x * n + y] < 0) {
                throw DomainError("matrix not in the inverse Gromov domain: pair (" +
                                  taxa.label(x) + "," + taxa.label(y) + ") would be " +
                                  to_string(values[x * n + y]));
            }
        }
    }
    return DissimilarityMap(std::move(taxa), std::move(values));
}

CheckResult<ChainWitness> is_robinsonian(const SymmetricMatrix& m, const LinearOrdering& order) {
    const std::size_t n = m.size();
    if (order.size() != n) {
        throw DomainError("linear ordering size does not match the matrix");
    }
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p; q < n; ++q) {
            for (std::size_t s = q; s < n; ++s) {
                Taxon x = order[p], y = order[q], z = order[s];
                if (std::max(m(x, y), m(y, z)) > m(x, z)) {
                    return {false, ChainWitness{{x, y, z}, "robinsonian"}};
                }
            }
        }
    }
    return {};
}

CheckResult<ChainWitness> is_strong_robinsonian(const SymmetricMatrix& m,
                                                const LinearOrdering& order) {
    auto base = is_robinsonian(m, order);
    if (!base) {
        return base;
    }
    CheckResult<ChainWitness> result;
    for_each_chain4(m.size(), [&](std::size_t p, std::size_t q, std::size_t s, std::size_t t) {
        Taxon w = order[p], x = order[q], y = order[s], z = order[t];
        if (m(x, y) == m(w, y) && m(x, z) != m(w, z)) {
            result = {false, ChainWitness{{w, x, y, z}, "strong-1"}};
            return false;
        }
        if (m(x, y) == m(x, z) && m(w, y) != m(w, z)) {
            result = {false, ChainWitness{{w, x, y, z}, "strong-2"}};
            return false;
        }
        return true;
    });
    return result;
}

CheckResult<ChainWitness> robinsonian_four_point(const SymmetricMatrix& m,
                                                 const LinearOrdering& order) {
    if (order.size() != m.size()) {
        throw DomainError("linear ordering size does not match the matrix");
    }
    CheckResult<ChainWitness> result;
    for_each_chain4(m.size(), [&](std::size_t p, std::size_t q, std::size_t s, std::size_t t) {
        Taxon w = order[p], x = order[q], y = order[s], z = order[t];
        if (m(x, y) + m(w, z) > m(x, z) + m(w, y)) {
            result = {false, ChainWitness{{w, x, y, z}, "four-point"}};
            return false;
        }
        return true;
    });
    return result;
}

}  // namespace pcfit
