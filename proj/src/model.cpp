#include "wprime/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wprime {

using json = nlohmann::json;

namespace {

std::string shape_str(Eigen::Index r, Eigen::Index c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

double monomial(const std::vector<unsigned>& exponents, std::span<const double> p) {
    double value = 1.0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        for (unsigned e = 0; e < exponents[i]; ++e) value *= p[i];
    }
    return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// SchedulingDomain

SchedulingDomain::SchedulingDomain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty()) throw ModelError(ErrorCode::Dim, "scheduling domain needs n_p >= 1");
    if (lower_.size() != upper_.size()) {
        throw ModelError(ErrorCode::Dim, "domain lower has " + std::to_string(lower_.size()) +
                                             " entries but upper has " +
                                             std::to_string(upper_.size()));
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (!(lower_[i] <= upper_[i])) {
            throw ModelError(ErrorCode::Domain, "domain lower[" + std::to_string(i) +
                                                   "] > upper[" + std::to_string(i) + "]");
        }
    }
}

bool SchedulingDomain::contains(std::span<const double> p) const {
    if (p.size() != dim()) {
        throw ModelError(ErrorCode::Dim, "scheduling point has " + std::to_string(p.size()) +
                                             " entries, domain has " + std::to_string(dim()));
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(lower_[i] <= p[i] && p[i] <= upper_[i])) return false;
    }
    return true;
}

std::vector<std::vector<double>> SchedulingDomain::vertices() const {
    const std::size_t n = dim();
    std::vector<std::vector<double>> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const bool hi = (mask >> (n - 1 - i)) & 1U;
            v[i] = hi ? upper_[i] : lower_[i];
        }
        out.push_back(std::move(v));
    }
    return out;
}

bool validate_point(const SchedulingDomain& domain, std::span<const double> p) {
    return domain.contains(p);
}

// ---------------------------------------------------------------------------
// PMatrixFunction

PMatrixFunction::PMatrixFunction(std::size_t rows, std::size_t cols, std::size_t n_p,
                                 std::vector<MonomialTerm> terms)
    : rows_(rows), cols_(cols), n_p_(n_p) {
    if (rows == 0 || cols == 0) throw ModelError(ErrorCode::Dim, "matrix dimensions must be positive");
    for (auto& term : terms) {
        if (term.exponents.size() != n_p) {
            throw ModelError(ErrorCode::Dim, "exponent vector has length " +
                                                 std::to_string(term.exponents.size()) +
                                                 ", expected n_p = " + std::to_string(n_p));
        }
        if (static_cast<std::size_t>(term.coeff.rows()) != rows ||
            static_cast<std::size_t>(term.coeff.cols()) != cols) {
            throw ModelError(ErrorCode::Dim, "coefficient is " +
                                                 shape_str(term.coeff.rows(), term.coeff.cols()) +
                                                 ", expected " + shape_str(rows, cols));
        }
        auto it = std::find_if(terms_.begin(), terms_.end(), [&](const MonomialTerm& t) {
            return t.exponents == term.exponents;
        });
        if (it != terms_.end()) {
            it->coeff += term.coeff;
        } else {
            terms_.push_back(std::move(term));
        }
    }
    std::sort(terms_.begin(), terms_.end(), [](const MonomialTerm& a, const MonomialTerm& b) {
        return a.exponents < b.exponents;
    });
}

PMatrixFunction PMatrixFunction::constant(const Matrix& value, std::size_t n_p) {
    return PMatrixFunction(value.rows(), value.cols(), n_p,
                           {MonomialTerm{std::vector<unsigned>(n_p, 0U), value}});
}

PMatrixFunction PMatrixFunction::zero(std::size_t rows, std::size_t cols, std::size_t n_p) {
    return PMatrixFunction(rows, cols, n_p);
}

bool PMatrixFunction::is_constant() const noexcept {
    return std::all_of(terms_.begin(), terms_.end(), [](const MonomialTerm& t) {
        return std::all_of(t.exponents.begin(), t.exponents.end(),
                           [](unsigned e) { return e == 0; });
    });
}

Matrix PMatrixFunction::operator()(std::span<const double> p) const {
    if (p.size() != n_p_) {
        throw ModelError(ErrorCode::Dim, "scheduling point has " + std::to_string(p.size()) +
                                             " entries, expected n_p = " + std::to_string(n_p_));
    }
    Matrix out = Matrix::Zero(rows_, cols_);
    for (const auto& term : terms_) out += monomial(term.exponents, p) * term.coeff;
    return out;
}

bool PMatrixFunction::operator==(const PMatrixFunction& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_ || n_p_ != other.n_p_ ||
        terms_.size() != other.terms_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].exponents != other.terms_[i].exponents ||
            terms_[i].coeff != other.terms_[i].coeff) {
            return false;
        }
    }
    return true;
}

Matrix eval_pmatrix(const PMatrixFunction& f, std::span<const double> p) { return f(p); }

PMatrixFunction scale_terms(const PMatrixFunction& f, double alpha) {
    std::vector<MonomialTerm> terms = f.terms();
    for (auto& t : terms) t.coeff *= alpha;
    return PMatrixFunction(f.rows(), f.cols(), f.n_p(), std::move(terms));
}

// ---------------------------------------------------------------------------
// LpvStateSpace

LpvStateSpace::LpvStateSpace(PMatrixFunction a, PMatrixFunction b, PMatrixFunction c,
                             PMatrixFunction d, SchedulingDomain domain)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)),
      domain_(std::move(domain)) {
    const auto n_x = a_.rows();
    const auto n_u = b_.cols();
    const auto n_y = c_.rows();
    auto expect = [](const PMatrixFunction& f, const char* name, std::size_t r, std::size_t c) {
        if (f.rows() != r || f.cols() != c) {
            throw ModelError(ErrorCode::Dim, std::string(name) + " is " + shape_str(f.rows(), f.cols()) +
                                                 ", expected " + shape_str(r, c));
        }
    };
    expect(a_, "A", n_x, n_x);
    expect(b_, "B", n_x, n_u);
    expect(c_, "C", n_y, n_x);
    expect(d_, "D", n_y, n_u);
    for (const auto* f : {&a_, &b_, &c_, &d_}) {
        if (f->n_p() != domain_.dim()) {
            throw ModelError(ErrorCode::Dim, "matrix function n_p does not match domain dimension");
        }
    }
}

bool LpvStateSpace::is_constant() const noexcept {
    return a_.is_constant() && b_.is_constant() && c_.is_constant() && d_.is_constant();
}

// ---------------------------------------------------------------------------
// JSON model format

namespace {

std::size_t require_positive(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ModelError(ErrorCode::Parse, std::string("missing required field \"") + key + "\"");
    const auto& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ModelError(ErrorCode::Parse, std::string("field \"") + key + "\" must be a positive integer");
    }
    return v.get<std::size_t>();
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ModelError(ErrorCode::Parse, where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) throw ModelError(ErrorCode::Parse, where + " must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Matrix parse_coeff(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ModelError(ErrorCode::Parse, where + " must be a non-empty list of rows");
    const auto rows = v.size();
    std::size_t cols = 0;
    Matrix m;
    for (std::size_t i = 0; i < rows; ++i) {
        auto row = number_list(v[i], where + " row " + std::to_string(i));
        if (i == 0) {
            cols = row.size();
            if (cols == 0) throw ModelError(ErrorCode::Parse, where + " has an empty row");
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            throw ModelError(ErrorCode::Dim, where + " has ragged rows");
        }
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = row[j];
    }
    return m;
}

PMatrixFunction parse_matrix_function(const json& doc, const char* key, std::size_t rows,
                                      std::size_t cols, std::size_t n_p) {
    if (!doc.contains(key)) return PMatrixFunction::zero(rows, cols, n_p);
    const auto& list = doc.at(key);
    if (!list.is_array()) throw ModelError(ErrorCode::Parse, std::string("\"") + key + "\" must be a list of terms");
    std::vector<MonomialTerm> terms;
    for (std::size_t t = 0; t < list.size(); ++t) {
        const std::string where = std::string(key) + " term " + std::to_string(t);
        const auto& term = list[t];
        if (!term.is_object()) throw ModelError(ErrorCode::Parse, where + " must be an object");
        if (!term.contains("exponents")) throw ModelError(ErrorCode::Parse, where + ": missing \"exponents\"");
        if (!term.contains("coeff")) throw ModelError(ErrorCode::Parse, where + ": missing \"coeff\"");
        const auto& ex = term.at("exponents");
        if (!ex.is_array()) throw ModelError(ErrorCode::Parse, where + ": \"exponents\" must be an array");
        std::vector<unsigned> exponents;
        for (const auto& e : ex) {
            if (!e.is_number_integer() || e.get<long long>() < 0) {
                throw ModelError(ErrorCode::Parse, where + ": exponents must be non-negative integers");
            }
            exponents.push_back(e.get<unsigned>());
        }
        if (exponents.size() != n_p) {
            throw ModelError(ErrorCode::Dim, where + ": exponents has length " +
                                                 std::to_string(exponents.size()) + ", expected n_p = " +
                                                 std::to_string(n_p));
        }
        Matrix coeff = parse_coeff(term.at("coeff"), where + " coeff");
        if (static_cast<std::size_t>(coeff.rows()) != rows || static_cast<std::size_t>(coeff.cols()) != cols) {
            throw ModelError(ErrorCode::Dim, where + " coeff is " + shape_str(coeff.rows(), coeff.cols()) +
                                                 ", expected " + shape_str(rows, cols));
        }
        terms.push_back({std::move(exponents), std::move(coeff)});
    }
    return PMatrixFunction(rows, cols, n_p, std::move(terms));
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json terms_json(const PMatrixFunction& f) {
    json list = json::array();
    for (const auto& t : f.terms()) list.push_back({{"exponents", t.exponents}, {"coeff", matrix_json(t.coeff)}});
    return list;
}

}  // namespace

LpvStateSpace parse_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ModelError(ErrorCode::Parse, "syntax error at line " + std::to_string(line) + ", column " +
                                               std::to_string(col) + ": " + e.what());
    }
    if (!doc.is_object()) throw ModelError(ErrorCode::Parse, "model must be a JSON object");

    const auto n_x = require_positive(doc, "nx");
    const auto n_u = require_positive(doc, "nu");
    const auto n_y = require_positive(doc, "ny");
    const auto n_p = require_positive(doc, "np");

    if (!doc.contains("domain")) throw ModelError(ErrorCode::Parse, "missing required field \"domain\"");
    const auto& dom = doc.at("domain");
    if (!dom.is_object() || !dom.contains("lower") || !dom.contains("upper")) {
        throw ModelError(ErrorCode::Parse, "\"domain\" needs \"lower\" and \"upper\"");
    }
    auto lower = number_list(dom.at("lower"), "domain.lower");
    auto upper = number_list(dom.at("upper"), "domain.upper");
    if (lower.size() != n_p || upper.size() != n_p) {
        throw ModelError(ErrorCode::Dim, "domain bounds must have n_p = " + std::to_string(n_p) + " entries");
    }
    SchedulingDomain domain(std::move(lower), std::move(upper));

    return LpvStateSpace(parse_matrix_function(doc, "A", n_x, n_x, n_p),
                         parse_matrix_function(doc, "B", n_x, n_u, n_p),
                         parse_matrix_function(doc, "C", n_y, n_x, n_p),
                         parse_matrix_function(doc, "D", n_y, n_u, n_p), std::move(domain));
}

LpvStateSpace load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const LpvStateSpace& model) {
    json doc;
    doc["nx"] = model.n_x();
    doc["nu"] = model.n_u();
    doc["ny"] = model.n_y();
    doc["np"] = model.n_p();
    doc["domain"] = {{"lower", model.domain().lower()}, {"upper", model.domain().upper()}};
    doc["A"] = terms_json(model.A());
    doc["B"] = terms_json(model.B());
    doc["C"] = terms_json(model.C());
    doc["D"] = terms_json(model.D());
    return doc.dump(2) + "\n";
}

}  // namespace wprime
