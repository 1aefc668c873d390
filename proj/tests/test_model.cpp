#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "wprime/model.hpp"

using namespace wprime;

namespace {

const char* kMinimal = R"({
  "nx": 1, "nu": 1, "ny": 1, "np": 1,
  "domain": {"lower": [-1], "upper": [1]},
  "A": [{"exponents": [1], "coeff": [[-1]]}]
})";

ErrorCode code_of(std::string_view text) {
    try {
        parse_model(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected parse_model to throw");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("eval_pmatrix: constant term ignores p") {
    const auto f = PMatrixFunction::constant(Matrix::Identity(2, 2), 1);
    CHECK(eval_pmatrix(f, std::vector<double>{3.7}) == Matrix::Identity(2, 2));
}

TEST_CASE("eval_pmatrix: affine mass-spring row") {
    Matrix a0(2, 2), a1(2, 2);
    a0 << 0, 1, 0, 0;
    a1 << 0, 0, -1, 0;
    const PMatrixFunction f(2, 2, 1, {{{0}, a0}, {{1}, a1}});
    Matrix want(2, 2);
    want << 0, 1, -4, 0;
    CHECK(eval_pmatrix(f, std::vector<double>{4.0}) == want);
}

TEST_CASE("eval_pmatrix: bivariate monomials") {
    // p1^2 * 2 + p1 p2 * 1 at (2, 3): 4*2 + 6*1
    const PMatrixFunction f(1, 1, 2, {{{2, 0}, Matrix::Constant(1, 1, 2.0)}, {{1, 1}, Matrix::Constant(1, 1, 1.0)}});
    CHECK(eval_pmatrix(f, std::vector<double>{2.0, 3.0})(0, 0) == 14.0);
}

TEST_CASE("eval_pmatrix: zero to the zero is one") {
    const auto f = PMatrixFunction::constant(Matrix::Constant(1, 1, 5.0), 2);
    CHECK(eval_pmatrix(f, std::vector<double>{0.0, 0.0})(0, 0) == 5.0);
}

TEST_CASE("eval_pmatrix: wrong point length") {
    const auto f = PMatrixFunction::constant(Matrix::Identity(2, 2), 2);
    CHECK_THROWS_AS(eval_pmatrix(f, std::vector<double>{1.0}), ModelError);
}

TEST_CASE("PMatrixFunction rejects inconsistent terms") {
    CHECK_THROWS_AS(PMatrixFunction(2, 2, 1, {{{0}, Matrix::Identity(3, 3)}}), ModelError);
    CHECK_THROWS_AS(PMatrixFunction(2, 2, 1, {{{0, 1}, Matrix::Identity(2, 2)}}), ModelError);
}

TEST_CASE("property: linear in coefficients and independent of term order") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t np = 1 + trial % 3;
        const Eigen::Index r = 1 + trial % 4, c = 1 + (trial / 4) % 3;
        std::vector<MonomialTerm> terms;
        for (int t = 0; t < 6; ++t) {
            std::vector<unsigned> e(np);
            for (auto& x : e) x = static_cast<unsigned>(rng() % 3);
            terms.push_back({e, oracle::random_matrix(rng, r, c)});
        }
        std::vector<double> p(np);
        for (auto& x : p) x = oracle::uniform(rng, -2, 2);
        const PMatrixFunction f(r, c, np, terms);
        const double alpha = oracle::uniform(rng, -3, 3);
        const Matrix base = eval_pmatrix(f, p);
        CHECK(oracle::max_abs(eval_pmatrix(scale_terms(f, alpha), p) - alpha * base) <=
              1e-14 * std::max(1.0, oracle::max_abs(alpha * base)));

        std::shuffle(terms.begin(), terms.end(), rng);
        const PMatrixFunction shuffled(r, c, np, terms);
        CHECK(oracle::max_abs(eval_pmatrix(shuffled, p) - base) <= 1e-14);

        // independent evaluation straight from the raw term list
        Matrix direct = Matrix::Zero(r, c);
        for (const auto& t : terms) {
            double mono = 1.0;
            for (std::size_t i = 0; i < np; ++i) mono *= std::pow(p[i], static_cast<double>(t.exponents[i]));
            direct += mono * t.coeff;
        }
        CHECK(oracle::max_abs(direct - base) <= 1e-12 * std::max(1.0, oracle::max_abs(base)));
    }
}

TEST_CASE("validate_point on a closed box") {
    const SchedulingDomain box({-1.0}, {1.0});
    CHECK(validate_point(box, std::vector<double>{0.0}));
    CHECK(validate_point(box, std::vector<double>{1.0}));
    CHECK_FALSE(validate_point(box, std::vector<double>{1.0000001}));
    const SchedulingDomain box2({-1.0, 0.0}, {1.0, 2.0});
    CHECK_FALSE(validate_point(box2, std::vector<double>{0.0, 2.5}));
    CHECK_THROWS_AS(validate_point(box2, std::vector<double>{0.0}), ModelError);
}

TEST_CASE("SchedulingDomain invariants") {
    CHECK_THROWS_AS(SchedulingDomain({1.0}, {0.0}), ModelError);
    CHECK_THROWS_AS(SchedulingDomain({}, {}), ModelError);
    const SchedulingDomain box({0.0, 10.0}, {1.0, 20.0});
    const auto v = box.vertices();
    REQUIRE(v.size() == 4);
    CHECK(v[0] == std::vector<double>{0.0, 10.0});
    CHECK(v[3] == std::vector<double>{1.0, 20.0});
}

TEST_CASE("parse_model: smallest legal model") {
    const auto m = parse_model(kMinimal);
    CHECK(m.n_x() == 1);
    CHECK(m.n_p() == 1);
    CHECK(eval_pmatrix(m.A(), std::vector<double>{0.5})(0, 0) == -0.5);
    // omitted matrices are zero
    CHECK(eval_pmatrix(m.D(), std::vector<double>{0.5})(0, 0) == 0.0);
    CHECK(m.B().terms().empty());
}

TEST_CASE("parse_model: duplicate exponents merge") {
    const auto m = parse_model(R"({"nx":1,"nu":1,"ny":1,"np":1,"domain":{"lower":[0],"upper":[1]},
        "A":[{"exponents":[0],"coeff":[[1]]},{"exponents":[0],"coeff":[[2]]}]})");
    CHECK(m.A().terms().size() == 1);
    CHECK(eval_pmatrix(m.A(), std::vector<double>{0.3})(0, 0) == 3.0);
}

TEST_CASE("parse_model: error paths") {
    // B must be 2x1 when nx = 2, nu = 1
    CHECK(code_of(R"({"nx":2,"nu":1,"ny":1,"np":1,"domain":{"lower":[0],"upper":[1]},
        "B":[{"exponents":[0],"coeff":[[1,0],[0,1]]}]})") == ErrorCode::Dim);
    CHECK(code_of(R"({"nx":1,"nu":1,"ny":1,"domain":{"lower":[0],"upper":[1]}})") == ErrorCode::Parse);
    CHECK(code_of(R"({"nx":1,"nu":1,"ny":1,"np":1})") == ErrorCode::Parse);
    CHECK(code_of(R"({"nx":1,"nu":1,"ny":1,"np":1,"domain":{"lower":[2],"upper":[1]}})") == ErrorCode::Domain);
    CHECK(code_of(R"({"nx":1,"nu":1,"ny":1,"np":1,"domain":{"lower":[0],"upper":[1]},
        "A":[{"exponents":[0,1],"coeff":[[1]]}]})") == ErrorCode::Dim);
    CHECK(code_of(R"({"nx":1,"nu":1,"ny":1,"np":1,"domain":{"lower":[0],"upper":[1]},
        "A":[{"exponents":[-1],"coeff":[[1]]}]})") == ErrorCode::Parse);
    CHECK(code_of(R"({"nx":0,"nu":1,"ny":1,"np":1,"domain":{"lower":[0],"upper":[1]}})") == ErrorCode::Parse);
}

TEST_CASE("parse_model: syntax errors report line and column") {
    try {
        parse_model("{\n  \"nx\": 1,\n  \"nu\": ]\n}");
        FAIL("expected a syntax error");
    } catch (const ModelError& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("property: parse -> serialize -> parse is the identity") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto model = oracle::random_affine_model(rng, 1 + trial % 4, 1 + trial % 2, 1 + trial % 3, 1 + trial % 2);
        const std::string text = serialize_model(model);
        const auto again = parse_model(text);
        CHECK(again == model);
        CHECK(serialize_model(again) == text);
    }
}
