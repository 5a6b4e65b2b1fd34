#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "dragforge/adiabatic.hpp"

using namespace dragforge;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDelta2 = -2.0 * kPi;

const VariantKind kFirstOrder[] = {VariantKind::ZOnly1, VariantKind::YOnly1, VariantKind::Optimal1, VariantKind::Drag1};

// Smooth Hermitian series S(tau) = sin(pi tau)^2 K + tau (1 - tau) L with analytic derivative.
FrameTransform smooth_frame(int order, int d, const TimeGrid& grid, std::mt19937_64& rng) {
  const Matrix k = oracle::random_hermitian(d, rng), l = oracle::random_hermitian(d, rng);
  FrameTransform f{order, 0.0, grid, {}, {}};
  for (int i = 0; i <= grid.n_steps; ++i) {
    const double t = grid.node(i), s = std::sin(kPi * t);
    f.s.push_back(s * s * k + t * (1.0 - t) * l);
    f.ds.push_back(2.0 * kPi * s * std::cos(kPi * t) * k + (1.0 - 2.0 * t) * l);
  }
  return f;
}

MatrixSeries smooth_controls(int d, const TimeGrid& grid, std::mt19937_64& rng) {
  const Matrix a = oracle::random_hermitian(d, rng), b = oracle::random_hermitian(d, rng);
  MatrixSeries out;
  for (int i = 0; i <= grid.n_steps; ++i) out.push_back(std::cos(2.0 * grid.node(i)) * a + grid.node(i) * b);
  return out;
}

double entry_y(const Matrix& s, int j, int k) { return -s(j, k).imag(); }  // s_y sigma^y_{jk} has (j,k) entry -i s_y

}  // namespace

TEST_CASE("dimensionless model") {
  const SystemSpec s = build_sno(5, kDelta2);
  const DimensionlessModel m = dimensionless_model(s, 4.0);
  CHECK(m.epsilon == doctest::Approx(1.0 / (4.0 * kDelta2)));
  CHECK(m.h0(2, 2).real() == doctest::Approx(1.0));
  CHECK(m.h0(3, 3).real() == doctest::Approx(3.0));
  CHECK(m.h0(4, 4).real() == doctest::Approx(6.0));
  CHECK(m.leakage == std::vector<int>{2, 3, 4});
  CHECK_THROWS(dimensionless_model(s, 0.0));
}

TEST_CASE("first-order frame coefficients") {
  const SystemSpec s = build_sno(5, kDelta2);
  const double l1 = std::sqrt(2.0);
  CHECK(first_order_frame_coefficient(s, VariantKind::ZOnly1) == 0.0);
  CHECK(first_order_frame_coefficient(s, VariantKind::YOnly1) == doctest::Approx(l1 * l1 / 8.0));
  CHECK(first_order_frame_coefficient(s, VariantKind::Optimal1) == doctest::Approx(l1 / 4.0));
  CHECK(first_order_frame_coefficient(s, VariantKind::Drag1) == 0.5);
  CHECK_THROWS(first_order_frame_coefficient(s, VariantKind::Gaussian0));
}

TEST_CASE("first-order frames on the ladder") {
  const SystemSpec s = build_sno(5, kDelta2);
  const GaussianParams p = GaussianParams::standard(1.0);
  const TimeGrid grid{0.0, 1.0, 512};
  const double l1 = std::sqrt(2.0);
  for (VariantKind k : kFirstOrder) {
    const FrameTransform f = frame_first_order(s, {k, {}}, p, grid);
    REQUIRE(f.s.size() == 513);
    CHECK(max_abs(f.s.front()) < 1e-14);
    CHECK(max_abs(f.s.back()) < 1e-14);
    for (const Matrix& m : f.s) CHECK(hermiticity_defect(m) == 0.0);
    CHECK(max_abs_difference(f.ds, differentiate(f.s, grid.step())) < 1e-7);

    // s_y12 = -lambda1 g / 2 at the pulse centre, where g = t_g Omega_G.
    const double g = p.t_g * gaussian(p, p.t_g / 2).value;
    CHECK(entry_y(f.s[256], 1, 2) == doctest::Approx(-l1 * g / 2.0));
    CHECK(entry_y(f.s[256], 0, 1) == doctest::Approx(-first_order_frame_coefficient(s, k) * g));
    for (int j = 0; j < 5; ++j) {
      for (int l = 0; l < 5; ++l) {
        const bool allowed = (j == 1 && l == 2) || (j == 2 && l == 1) || ((j == 0 && l == 1) || (j == 1 && l == 0));
        if (!allowed) CHECK(f.s[256](j, l) == Complex(0.0));
      }
    }
  }
  const FrameTransform z = frame_first_order(s, {VariantKind::ZOnly1, {}}, p, grid);
  CHECK(z.s[256](0, 1) == Complex(0.0));
  const FrameTransform y = frame_first_order(s, {VariantKind::YOnly1, {}}, p, grid);
  CHECK(y.s[256](0, 1) != Complex(0.0));
  CHECK_THROWS(frame_first_order(s, {}, p, grid));
  CHECK_THROWS(frame_first_order(s, DragVariant::ansatz_of({}), p, grid));
}

TEST_CASE("first-order frames for the other topologies") {
  const GaussianParams p = GaussianParams::standard(1.0);
  const TimeGrid grid{0.0, 1.0, 256};
  const SystemSpec mid = intermediate_from_sno(6, 2, kDelta2);
  const SystemSpec star =
      SystemSpec::star({0.0, 0.0, kDelta2, 2.0 * kDelta2, 3.0 * kDelta2, 4.0 * kDelta2}, {1, 1, 1, 1, 1});
  for (const SystemSpec* s : {&mid, &star}) {
    for (VariantKind k : {VariantKind::ZOnly1, VariantKind::YOnly1, VariantKind::Optimal1}) {
      const FrameTransform f = frame_first_order(*s, {k, {}}, p, grid);
      CHECK(max_abs(f.s.front()) < 1e-14);
      CHECK(max_abs(f.s.back()) < 1e-14);
    }
    CHECK_THROWS(frame_first_order(*s, {VariantKind::Drag1, {}}, p, grid));
  }
}

TEST_CASE("h_extra matches a direct eps expansion") {
  std::mt19937_64 rng(2024);
  const int d = 4;
  const TimeGrid grid{0.0, 1.0, 64};
  std::vector<FrameTransform> frames;
  for (int m = 1; m <= 3; ++m) frames.push_back(smooth_frame(m, d, grid, rng));
  std::vector<MatrixSeries> h;
  for (int m = 0; m < 3; ++m) h.push_back(smooth_controls(d, grid, rng));
  Matrix h0 = Matrix::Zero(d, d);
  h0(2, 2) = 1.0;
  h0(3, 3) = 3.0;

  std::vector<MatrixSeries> extra;
  for (int n = 0; n <= 3; ++n) extra.push_back(h_extra(n, frames, h, h0, grid));
  std::vector<MatrixSeries> eff;
  for (int n = 0; n <= 2; ++n) eff.push_back(h_eff_order(n, frames, h, h0, grid));

  const Complex I(0.0, 1.0);
  double worst_extra = 0.0, worst_eff = 0.0, worst_herm = 0.0;
  for (int k = 0; k <= grid.n_steps; k += 7) {
    std::vector<oracle::Matrix> s, ds, hk;
    for (const auto& f : frames) s.push_back(f.s[k]), ds.push_back(f.ds[k]);
    for (const auto& hm : h) hk.push_back(hm[k]);
    const auto ref = oracle::h_eff_orders(s, ds, hk, h0, 3);
    for (int n = 0; n <= 3; ++n) {
      Matrix expected = ref[n] - (n < 3 ? hk[n] : Matrix::Zero(d, d));
      if (n < 3) expected -= I * (s[n] * h0 - h0 * s[n]);
      worst_extra = std::max(worst_extra, max_abs(extra[n][k] - expected));
      worst_herm = std::max(worst_herm, hermiticity_defect(extra[n][k]));
    }
    for (int n = 0; n <= 2; ++n) worst_eff = std::max(worst_eff, max_abs(eff[n][k] - ref[n]));
  }
  CHECK(worst_extra < 1e-10);
  CHECK(worst_eff < 1e-10);
  CHECK(worst_herm < 1e-12);
}

TEST_CASE("h_extra boundary cases") {
  std::mt19937_64 rng(1);
  const int d = 3;
  const TimeGrid grid{0.0, 1.0, 32};
  std::vector<MatrixSeries> h{smooth_controls(d, grid, rng)};
  const Matrix h0 = Matrix::Identity(d, d);
  for (const Matrix& m : h_extra(0, {}, {}, h0, grid)) CHECK(max_abs(m) == 0.0);

  FrameTransform zero{1, 0.0, grid, MatrixSeries(33, Matrix::Zero(d, d)), MatrixSeries(33, Matrix::Zero(d, d))};
  for (const Matrix& m : h_extra(1, {zero}, h, h0, grid)) CHECK(max_abs(m) == 0.0);

  CHECK_THROWS(h_extra(2, {zero}, h, h0, grid));
  CHECK_THROWS(h_extra(4, {zero}, h, h0, grid));
}

TEST_CASE("gaussian zeroth order") {
  const SystemSpec s = build_sno(5, kDelta2);
  const ExpansionReport r = constraint_residuals(s, {}, GaussianParams::standard(1.0), {0.0, 1.0, 512}, 0);
  REQUIRE(r.orders.size() == 1);
  CHECK(r.orders[0].qubit_block() == 0.0);
  // Nothing removes the 1-2 drive: Tr[H sx_12] = lambda1 g, largest at the pulse centre.
  const GaussianParams p = GaussianParams::standard(1.0);
  CHECK(r.orders[0].coupling == doctest::Approx(std::sqrt(2.0) * p.t_g * gaussian(p, p.t_g / 2).value));
}

TEST_CASE("original drag cancels first-order leakage") {
  const SystemSpec s = build_sno(5, kDelta2);
  const ExpansionReport r = constraint_residuals(s, {VariantKind::Drag1, {}}, GaussianParams::standard(1.0),
                                                 {0.0, 1.0, 4096}, 1);
  REQUIRE(r.orders.size() == 2);
  CHECK(r.orders[0].qubit_block() < 1e-12);
  CHECK(r.orders[0].coupling < 1e-12);
  CHECK(r.orders[1].coupling < 1e-8);
  CHECK(r.orders[1].qubit_block() < 1e-8);
}

TEST_CASE("second-order omega_x correction cancels the order-two residual") {
  const SystemSpec s = build_sno(5, kDelta2);
  const GaussianParams p = GaussianParams::standard(1.0);
  const TimeGrid grid{0.0, 1.0, 4096};
  for (auto [first, second] : {std::pair{VariantKind::Drag1, VariantKind::Drag2},
                               {VariantKind::ZOnly1, VariantKind::ZOnly2},
                               {VariantKind::YOnly1, VariantKind::YOnly2}}) {
    const double before = constraint_residuals(s, {first, {}}, p, grid, 2).orders[2].qubit_x;
    const double after = constraint_residuals(s, {second, {}}, p, grid, 2).orders[2].qubit_x;
    CHECK(before > 1e-2);
    CHECK(after < 1e-6);
  }
  const ExpansionReport opt = constraint_residuals(s, {VariantKind::Optimal1, {}}, p, grid, 2);
  CHECK(opt.orders[2].qubit_block() < 1e-6);
  CHECK_FALSE(opt.orders[2].coupling_frame_published);
}

TEST_CASE("frame constraints reproduce the closed-form second-order frames") {
  const SystemSpec s = build_sno(5, kDelta2);
  const GaussianParams p = GaussianParams::standard(1.0);
  const TimeGrid grid{0.0, 1.0, 2048};
  const DimensionlessModel model = dimensionless_model(s, p.t_g);
  for (VariantKind k : kFirstOrder) {
    const ControlSet cs = build_controls(s, {k, {}}, p);
    const auto ordered = control_hamiltonians(model, cs, grid);
    const std::vector<MatrixSeries> h(ordered.begin(), ordered.end());
    const std::vector<FrameTransform> frames{frame_first_order(s, {k, {}}, p, grid)};
    const MatrixSeries x1 = h_extra(1, frames, h, model.h0, grid);
    MatrixSeries x(x1.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x1[i] + h[1][i];
    const FrameTransform solved = solve_frame(model, 2, x, grid);
    const FrameTransform closed = frame_second_order(s, {k, {}}, p, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int j : {0, 1}) worst = std::max(worst, std::abs(solved.s[i](j, 2) - closed.s[i](j, 2)));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("exact effective hamiltonian limits") {
  const SystemSpec s = build_sno(4, kDelta2);
  const TimeGrid grid{0.0, 1.0, 64};
  const int count = sample_count(grid);

  const ControlSet cs = build_controls(s, {VariantKind::Drag1, {}}, GaussianParams::standard(1.0));
  const MatrixSeries none = h_eff_exact(s, cs, MatrixSeries(count, Matrix::Zero(4, 4)), grid);
  const HamiltonianGenerators gen = generators(s);
  for (int k = 0; k < count; ++k) {
    const ControlSample c = cs.at(grid.node(k) * cs.t_g());
    CHECK(max_abs(none[k] - cs.t_g() * hamiltonian_at(gen, c.delta, c.omega_x, c.omega_y)) < 1e-12);
  }

  std::mt19937_64 rng(9);
  const Matrix fixed = 0.3 * oracle::random_hermitian(4, rng);
  const ControlSet idle = build_controls(s, {}, GaussianParams{0.0, 1.0, 4.0});
  const MatrixSeries rotated = h_eff_exact(s, idle, MatrixSeries(count, fixed), grid);
  const Matrix a = expm_hermitian(fixed, 1.0);  // exp(-i S)
  const Matrix expected = a.adjoint() * (4.0 * gen.h_drift) * a;
  for (const Matrix& m : rotated) CHECK(max_abs(m - expected) < 1e-11);
}

TEST_CASE("first-order truncation error is second order in eps") {
  const SystemSpec s = build_sno(5, kDelta2);
  const double coarse = support::truncation_gap(s, VariantKind::Optimal1, 1.0, 0, 2048);
  const double fine = support::truncation_gap(s, VariantKind::Optimal1, 2.0, 0, 2048);
  CHECK(std::log2(coarse / fine) == doctest::Approx(1.0).epsilon(0.3));
  const double c1 = support::truncation_gap(s, VariantKind::Optimal1, 1.0, 1, 2048);
  const double f1 = support::truncation_gap(s, VariantKind::Optimal1, 2.0, 1, 2048);
  CHECK(std::log2(c1 / f1) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("expansion report json") {
  const SystemSpec s = build_sno(5, kDelta2);
  const ExpansionReport r =
      constraint_residuals(s, {VariantKind::Optimal1, {}}, GaussianParams::standard(1.0), {0.0, 1.0, 256}, 2);
  const nlohmann::json j = r.to_json();
  CHECK(j["variant"] == "Optimal1");
  CHECK(j["orders"].size() == 3);
  CHECK(j["grid"]["n_points"] == 257);
  CHECK_THROWS(constraint_residuals(s, {}, GaussianParams::standard(1.0), {0.0, 1.0, 256}, 3));
  CHECK_THROWS(constraint_residuals(s, {}, GaussianParams::standard(1.0), {0.0, 2.0, 256}, 0));
}

TEST_CASE("phase-ramped controls have no order split") {
  const SystemSpec s = build_sno(5, kDelta2);
  const ControlSet cs = build_controls(s, {VariantKind::ZOnly1, {}}, GaussianParams::standard(1.0));
  CHECK_THROWS(control_hamiltonians(dimensionless_model(s, cs.t_g()), phase_ramp(cs, 64), {0.0, 1.0, 64}));
}
