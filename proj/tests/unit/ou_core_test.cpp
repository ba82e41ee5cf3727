#include "ouint/ou_core.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace ouint {
namespace {

using testing::insert_at;
using testing::max_abs_diff;
using testing::random_matrix;
using testing::random_vector;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ouint::Error thrown";
  return ErrorCode::kInvalidArgument;
}

OuModel random_model(RngStream& rng, std::size_t p, std::size_t d) {
  Matrix b = random_matrix(rng, p, p, -2.0, 2.0);
  // Diagonal shifted by p keeps every principal submatrix diagonally dominant.
  for (std::size_t i = 0; i < p; ++i) b(i, i) -= 2.0 * static_cast<double>(p);
  return OuModel(random_vector(rng, p, -2, 2), random_vector(rng, p, -2, 2), b,
                 random_matrix(rng, p, d, -2, 2));
}

// Original drift rows i != m evaluated with coordinate m pinned to c.
Vector substituted_drift(const OuModel& model, std::size_t idx, double c, const Vector& y) {
  const Vector full = model.drift(insert_at(y, idx, c));
  return testing::drop_at(full, idx);
}

TEST(NewOuModel, Examples) {
  const OuModel scalar = new_ou_model(1, 1, Vector{0}, Vector{0}, Matrix::from_rows({{-1}}),
                                      Matrix::from_rows({{1}}));
  EXPECT_EQ(scalar.p(), 1u);
  EXPECT_EQ(scalar.labels(), std::vector<std::string>{"X1"});

  EXPECT_EQ(code_of([] {
              new_ou_model(2, 2, Vector{0, 0}, Vector{0, 0}, Matrix(2, 3), Matrix(2, 2));
            }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code_of([] {
              new_ou_model(2, 1, Vector{0, 0}, Vector{0, 0}, Matrix(2, 2), Matrix(2, 2));
            }),
            ErrorCode::kDimensionMismatch);

  const Matrix b = Matrix::from_rows({{-1, 0.5, 0.3}, {0, -2, 0.7}, {0, 0, -1.5}});
  const OuModel s4 = new_ou_model(3, 3, Vector(3), Vector{1, 2, 3}, b, Matrix::identity(3));
  EXPECT_EQ(s4.labels(), (std::vector<std::string>{"X1", "X2", "X3"}));
}

TEST(NewOuModel, RejectsNonFiniteAndDuplicateLabels) {
  Vector x0{0, 0};
  x0[1] = INFINITY;
  EXPECT_EQ(code_of([&] {
              OuModel(x0, Vector{0, 0}, Matrix(2, 2), Matrix::identity(2));
            }),
            ErrorCode::kNonFiniteEntry);
  EXPECT_THROW(OuModel(Vector{0, 0}, Vector{0, 0}, Matrix(2, 2), Matrix::identity(2), {"a", "a"}),
               Error);
}

TEST(InterveneOu, DiagonalSpeedLeavesLevelUnchanged) {
  const OuModel model(Vector{1, 2, 3}, Vector{0.5, -1.5, 2.5},
                      Matrix::diagonal(Vector{-1, -2, -3}), Matrix::identity(3));
  const auto [reduced, record] = intervene_ou(model, {2, 10.0});
  EXPECT_EQ(reduced.level(), (Vector{0.5, 2.5}));
  EXPECT_EQ(reduced.speed(), Matrix::diagonal(Vector{-1, -3}));
  EXPECT_EQ(reduced.x0(), (Vector{1, 3}));
  EXPECT_EQ(reduced.sigma(), Matrix::from_rows({{1, 0, 0}, {0, 0, 1}}));
  EXPECT_EQ(reduced.d(), model.d());
  EXPECT_EQ(record.fixed(), (std::vector<FixedCoordinate>{{"X2", 10.0}}));
}

TEST(InterveneOu, UpperTriangularX2MatchesDisplayedReduction) {
  // Reduced speed [[b11, b13], [0, b33]], level [a1, a3] - B̃⁻¹[b12(c - a2), 0].
  const double b11 = -1.0, b12 = 0.5, b13 = 0.3, b22 = -2.0, b23 = 0.7, b33 = -1.5;
  const double a1 = 1, a2 = 2, a3 = 3, c = 0.25;
  const Matrix b = Matrix::from_rows({{b11, b12, b13}, {0, b22, b23}, {0, 0, b33}});
  const OuModel model(Vector(3), Vector{a1, a2, a3}, b, Matrix::identity(3));
  const auto [reduced, record] = intervene_ou(model, {2, c});
  EXPECT_EQ(reduced.speed(), Matrix::from_rows({{b11, b13}, {0, b33}}));
  // B̃⁻¹ = [[1/b11, -b13/(b11 b33)], [0, 1/b33]].
  const Vector expected{a1 - b12 * (c - a2) / b11, a3};
  EXPECT_LE(max_abs_diff(reduced.level(), expected), 1e-15);
  EXPECT_EQ(reduced.labels(), (std::vector<std::string>{"X1", "X3"}));
}

TEST(InterveneOu, DriftEqualsCoordinateSubstitution) {
  RngStream rng(101, 0);
  const OuModel model = random_model(rng, 4, 3);
  const std::size_t m = 2;
  const double c = 1.0;
  const auto [reduced, record] = intervene_ou(model, {m, c});
  for (int k = 0; k < 100; ++k) {
    const Vector y = random_vector(rng, 3, -3, 3);
    ASSERT_LE(max_abs_diff(reduced.drift(y), substituted_drift(model, m - 1, c, y)), 1e-12);
  }
}

TEST(InterveneOu, Errors) {
  const OuModel model(Vector{0, 0}, Vector{0, 0}, Matrix::from_rows({{1, 2}, {3, 0}}),
                      Matrix::identity(2));
  EXPECT_EQ(code_of([&] { intervene_ou(model, {1, 0.0}); }),
            ErrorCode::kSingularReducedMatrix);
  EXPECT_EQ(code_of([&] { intervene_ou(model, {0, 0.0}); }), ErrorCode::kBadCoordinate);
  EXPECT_EQ(code_of([&] { intervene_ou(model, {3, 0.0}); }), ErrorCode::kBadCoordinate);
  const OuModel scalar(Vector{0}, Vector{0}, Matrix::from_rows({{-1}}), Matrix::identity(1));
  EXPECT_EQ(code_of([&] { intervene_ou(scalar, {1, 0.0}); }),
            ErrorCode::kPreconditionViolated);
}

TEST(InterveneSeq, EmptyAndSingleton) {
  RngStream rng(103, 0);
  const OuModel model = random_model(rng, 3, 2);
  const auto none = intervene_seq(model, {});
  EXPECT_EQ(none.model.speed(), model.speed());
  EXPECT_EQ(none.model.level(), model.level());
  EXPECT_TRUE(none.record.fixed().empty());

  const Intervention iv{2, -0.75};
  const auto seq = intervene_seq(model, std::span(&iv, 1));
  const auto single = intervene_ou(model, iv);
  EXPECT_EQ(seq.model.speed(), single.model.speed());
  EXPECT_EQ(seq.model.level(), single.model.level());
  EXPECT_EQ(seq.record, single.record);
}

TEST(InterveneSeq, IndicesReferToOriginalCoordinates) {
  RngStream rng(107, 0);
  const OuModel model = random_model(rng, 3, 3);
  const std::vector<Intervention> ivs{{3, 0.5}, {1, -1.0}};
  const auto seq = intervene_seq(model, ivs);
  // After removing X3, X1 is still reduced coordinate 1.
  const auto manual = intervene_ou(intervene_ou(model, {3, 0.5}).model, {1, -1.0});
  EXPECT_EQ(seq.model.labels(), std::vector<std::string>{"X2"});
  EXPECT_EQ(seq.model.level(), manual.model.level());
  EXPECT_EQ(seq.record.surviving(), std::vector<std::size_t>{1});

  // X1 then X3: after removing X1, X3 sits at reduced position 2.
  const std::vector<Intervention> other{{1, -1.0}, {3, 0.5}};
  const auto seq2 = intervene_seq(model, other);
  EXPECT_EQ(seq2.model.labels(), std::vector<std::string>{"X2"});
}

TEST(InterveneSeq, DiagonalSpeedIsOrderInvariant) {
  RngStream rng(109, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 3 + trial % 3;
    Vector diag(p);
    for (auto& v : diag) v = rng.uniform(-3, -0.1);
    const OuModel model(random_vector(rng, p, -1, 1), random_vector(rng, p, -1, 1),
                        Matrix::diagonal(diag), random_matrix(rng, p, 2, -1, 1));
    const Intervention a{1 + trial % p, rng.uniform(-5, 5)};
    const Intervention b{1 + (trial + 1) % p, rng.uniform(-5, 5)};
    const std::vector<Intervention> ab{a, b}, ba{b, a};
    const auto r1 = intervene_seq(model, ab);
    const auto r2 = intervene_seq(model, ba);
    ASSERT_EQ(r1.model.speed(), r2.model.speed());
    ASSERT_EQ(r1.model.level(), r2.model.level());
    ASSERT_EQ(r1.model.sigma(), r2.model.sigma());
    ASSERT_EQ(r1.model.labels(), r2.model.labels());
  }
}

TEST(InterveneSeq, DuplicateAndStageReporting) {
  RngStream rng(113, 0);
  const OuModel model = random_model(rng, 3, 3);
  const std::vector<Intervention> dup{{2, 1.0}, {2, 2.0}};
  try {
    intervene_seq(model, dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateIntervention);
    EXPECT_EQ(e.stage(), 1);
  }

  // Fixing X1 leaves [[0, 1], [1, 0]]; fixing X2 next leaves [[0]].
  const OuModel singular(Vector(3), Vector(3),
                         Matrix::from_rows({{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}}),
                         Matrix::identity(3));
  const std::vector<Intervention> ivs{{1, 0.0}, {2, 0.0}};
  try {
    intervene_seq(singular, ivs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularReducedMatrix);
    EXPECT_EQ(e.stage(), 1);
  }
}

TEST(InterventionRecord, MapsAreInverseAndLiftInsertsPins) {
  InterventionRecord rec({"a", "b", "c", "d"});
  rec.pin(1, 5.0);
  rec.pin(3, -1.0);
  EXPECT_EQ(rec.surviving(), (std::vector<std::size_t>{0, 2}));
  for (std::size_t r = 0; r < rec.surviving().size(); ++r)
    EXPECT_EQ(rec.to_reduced(rec.to_original(r)), r);
  EXPECT_TRUE(rec.is_fixed(1));
  EXPECT_FALSE(rec.to_reduced(3).has_value());
  const double y[] = {7.0, 8.0};
  EXPECT_EQ(rec.lift(y), (Vector{7.0, 5.0, 8.0, -1.0}));

  const InterventionRecord rebuilt({"a", "b", "c", "d"}, rec.fixed());
  EXPECT_EQ(rebuilt, rec);
  EXPECT_THROW(InterventionRecord({"a", "b"}, {{"z", 1.0}}), Error);
}

TEST(DependenceGraph, UpperTriangularModelAndIntervention) {
  const Matrix b = Matrix::from_rows({{-1, 0.5, 0.3}, {0, -2, 0.7}, {0, 0, -1.5}});
  const OuModel model(Vector(3), Vector{1, 2, 3}, b, Matrix::identity(3));
  const DependenceGraph g = dependence_graph(model);
  using E = std::pair<std::size_t, std::size_t>;
  // Row-major over b_ij, edge j -> i.
  EXPECT_EQ(g.edges, (std::vector<E>{{0, 0}, {1, 0}, {2, 0}, {1, 1}, {2, 1}, {2, 2}}));

  const DependenceGraph reduced = dependence_graph(intervene_ou(model, {2, 0.0}).model);
  EXPECT_EQ(reduced.labels, (std::vector<std::string>{"X1", "X3"}));
  EXPECT_EQ(reduced.edges, (std::vector<E>{{0, 0}, {1, 0}, {1, 1}}));

  const OuModel zero(Vector(2), Vector(2), Matrix(2, 2), Matrix::identity(2));
  EXPECT_TRUE(dependence_graph(zero).edges.empty());
  EXPECT_EQ(dependence_graph(model, 0.6).edges, (std::vector<E>{{0, 0}, {1, 1}, {2, 1}, {2, 2}}));
}

TEST(DependenceGraph, InterventionDeletesNodeAndItsEdges) {
  RngStream rng(127, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = 2 + trial % 4;
    Matrix b = random_matrix(rng, p, p, -1, 1);
    for (std::size_t i = 0; i < p; ++i) {
      b(i, i) -= 2.0 * static_cast<double>(p);
      for (std::size_t j = 0; j < p; ++j)
        if (i != j && rng.uniform() < 0.5) b(i, j) = 0.0;
    }
    const OuModel model{Vector(p), Vector(p), b, Matrix::identity(p)};
    const std::size_t m = 1 + trial % p;
    const DependenceGraph full = dependence_graph(model);
    const DependenceGraph reduced = dependence_graph(intervene_ou(model, {m, 1.0}).model);
    std::vector<std::pair<std::string, std::string>> expected, got;
    for (auto [from, to] : full.edges)
      if (from != m - 1 && to != m - 1) expected.emplace_back(full.labels[from], full.labels[to]);
    for (auto [from, to] : reduced.edges)
      got.emplace_back(reduced.labels[from], reduced.labels[to]);
    ASSERT_EQ(got, expected);
  }
}

TEST(DependenceGraph, DotRendering) {
  const OuModel model(Vector(2), Vector(2), Matrix::from_rows({{-1, 0}, {2, -1}}),
                      Matrix::identity(2), {"a", "b"});
  EXPECT_EQ(to_dot(dependence_graph(model)),
            "digraph G {\n"
            "  \"a\";\n"
            "  \"b\";\n"
            "  \"a\" -> \"a\";\n"
            "  \"a\" -> \"b\";\n"
            "  \"b\" -> \"b\";\n"
            "}\n");
}

TEST(InterveneGeneral, AgreesWithOuIntervention) {
  RngStream rng(131, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = 2 + trial % 4;
    const OuModel model = random_model(rng, p, 2);
    const Intervention iv{1 + trial % p, rng.uniform(-3, 3)};
    const GeneralSde general = intervene_general(general_from_ou(model), iv);
    const GeneralSde direct = general_from_ou(intervene_ou(model, iv).model);
    EXPECT_EQ(general.p, p - 1);
    EXPECT_EQ(general.d, model.d() + 1);
    EXPECT_EQ(general.x0, direct.x0);
    for (int k = 0; k < 100; ++k) {
      const Vector y = random_vector(rng, p - 1, -3, 3);
      ASSERT_LE(max_abs_diff(general.coefficient(y), direct.coefficient(y)), 1e-12);
    }
  }
}

TEST(InterveneGeneral, ConstantAndNullDependence) {
  const Matrix sigma = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  GeneralSde constant{3, 2, [sigma](const Vector&) { return sigma; }, Vector{1, 2, 3}};
  const GeneralSde reduced = intervene_general(constant, {2, 9.0});
  EXPECT_EQ(reduced.coefficient(Vector{0, 0}), Matrix::from_rows({{1, 2}, {5, 6}}));
  EXPECT_EQ(reduced.x0, (Vector{1, 3}));

  // Coefficient that ignores x_2.
  GeneralSde ignores{3, 1, [](const Vector& x) {
                       return Matrix::from_rows({{-x[0]}, {x[0] + x[2]}, {x[2] * x[2]}});
                     },
                     Vector{0, 0, 0}};
  const GeneralSde r = intervene_general(ignores, {2, 123.0});
  const Vector y{0.3, -1.2};
  const Matrix full = ignores.coefficient(insert_at(y, 1, -7.0));
  const Matrix got = r.coefficient(y);
  EXPECT_EQ(got(0, 0), full(0, 0));
  EXPECT_EQ(got(1, 0), full(2, 0));

  EXPECT_EQ(code_of([&] { intervene_general(constant, {4, 0.0}); }), ErrorCode::kBadCoordinate);
}

}  // namespace
}  // namespace ouint
