#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "hornindex/channels.hpp"
#include "hornindex/oracle.hpp"

using namespace hornindex;

TEST_CASE("cell rows annihilate the sampled homogeneous mode") {
  // u = x^{-beta s} solves the channel equation; the integrating-factor rows
  // must vanish on its node samples to machine precision
  for (double s : {-0.2, 0.15, -0.15}) {
    auto d = discretize_channel(Family::T, s, 2.0, 0.5, ZeroBC::Free,
                                EpsBC::Free, 64);
    CHECK_FALSE(d.kill_row);
    Eigen::VectorXd v(Eigen::Index(d.nodes.size()));
    for (std::size_t i = 0; i < d.nodes.size(); ++i)
      v(Eigen::Index(i)) = std::pow(d.nodes[i], -2.0 * s);
    double resid = (d.A * v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
    INFO("s = " << s);
    CHECK(resid < 1e-12);
  }
  // a mode that is not square integrable gets an explicit exclusion row:
  // the cell rows still annihilate it, the full matrix does not
  auto ex = discretize_channel(Family::T, 0.3, 2.0, 0.5, ZeroBC::Free,
                               EpsBC::Free, 64);
  CHECK(ex.kill_row);
  Eigen::VectorXd w(Eigen::Index(ex.nodes.size()));
  for (std::size_t i = 0; i < ex.nodes.size(); ++i)
    w(Eigen::Index(i)) = std::pow(ex.nodes[i], -0.6);
  double cells_only =
      (ex.A.topRows(64) * w).cwiseAbs().maxCoeff() / w.cwiseAbs().maxCoeff();
  CHECK(cells_only < 1e-12);
  CHECK((ex.A * w).cwiseAbs().maxCoeff() / w.cwiseAbs().maxCoeff() > 0.5);
  // same for the inverse-coefficient family, mode exp(s / x)
  auto d = discretize_channel(Family::Tilde, -0.3, 2.0, 0.5, ZeroBC::Free,
                              EpsBC::Free, 64);
  Eigen::VectorXd v(Eigen::Index(d.nodes.size()));
  for (std::size_t i = 0; i < d.nodes.size(); ++i)
    v(Eigen::Index(i)) = std::exp(-0.3 / d.nodes[i]);
  CHECK((d.A * v).cwiseAbs().maxCoeff() < 1e-12 * v.cwiseAbs().maxCoeff());
}

TEST_CASE("rank counting on explicit matrices") {
  Eigen::MatrixXd wide(2, 3);
  wide << 1, 0, 0, 0, 1, 0;
  auto w = svd_counts(wide);
  CHECK(w.kernel == 1);
  CHECK(w.cokernel == 0);
  CHECK_FALSE(w.borderline);

  Eigen::MatrixXd tall(3, 2);
  tall << 1, 2, 2, 4, 3, 6;  // rank one
  auto t = svd_counts(tall);
  CHECK(t.kernel == 1);
  CHECK(t.cokernel == 2);

  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  auto z = svd_counts(zero);
  CHECK(z.kernel == 2);
  CHECK(z.cokernel == 2);

  // equilibration deliberately makes raw scale non-informative: a diagonal
  // matrix is full rank no matter how small its entries
  Eigen::MatrixXd diag = Eigen::VectorXd::Ones(2).asDiagonal();
  diag(1, 1) = 5e-8;
  CHECK(svd_counts(diag).kernel == 0);
  // near-degeneracy that survives equilibration: [[1,1],[1,1+d]] keeps
  // sigma_min ~ d/2 after scaling
  Eigen::MatrixXd near(2, 2);
  near << 1.0, 1.0, 1.0, 1.0 + 2e-7;
  CHECK(svd_counts(near).borderline);
  near(1, 1) = 1.0 + 1e-10;
  auto far = svd_counts(near);
  CHECK_FALSE(far.borderline);
  CHECK(far.kernel == 1);
}

TEST_CASE("kernel membership decided by the boundary rows") {
  // square-integrable mode, no constraint: one kernel line
  auto ff = channel_index(Family::T, -0.2, 2.0, 0.5, ZeroBC::Free, EpsBC::Free);
  CHECK(ff.kernel == 1);
  CHECK(ff.cokernel == 0);
  CHECK_FALSE(ff.borderline);
  // pinning the outer endpoint removes it
  auto fd =
      channel_index(Family::T, -0.2, 2.0, 0.5, ZeroBC::Free, EpsBC::Dirichlet);
  CHECK(fd.kernel == 0);
  CHECK(fd.index == 0);
  // non-square-integrable mode is excluded even with free boundary
  auto hf = channel_index(Family::T, 0.4, 2.0, 0.5, ZeroBC::Free, EpsBC::Free);
  CHECK(hf.kernel == 0);
  // inverse coefficient, decaying mode
  auto tf =
      channel_index(Family::Tilde, -0.3, 2.0, 0.5, ZeroBC::Free, EpsBC::Free);
  CHECK(tf.kernel == 1);
  auto td = channel_index(Family::Tilde, 1.0, 2.0, 0.5, ZeroBC::Free,
                          EpsBC::Dirichlet);
  CHECK(td.index == 0);
}

TEST_CASE("killed versus free encodings differ by the window mode") {
  auto fr = channel_index(Family::T, -0.2, 2.0, 0.5, ZeroBC::Free, EpsBC::Free);
  auto kl = channel_index(Family::T, -0.2, 2.0, 0.5, ZeroBC::KillSingular,
                          EpsBC::Free);
  CHECK(fr.kernel - kl.kernel == 1);
  // outside the window the two encodings agree
  auto fr2 = channel_index(Family::T, 0.4, 2.0, 0.5, ZeroBC::Free, EpsBC::Free);
  auto kl2 = channel_index(Family::T, 0.4, 2.0, 0.5, ZeroBC::KillSingular,
                           EpsBC::Free);
  CHECK(fr2.kernel == kl2.kernel);
}

TEST_CASE("meshes near the integrability wall are refused") {
  CHECK_THROWS_AS(discretize_channel(Family::T, 0.25, 2.0, 0.5, ZeroBC::Free,
                                     EpsBC::Free, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(discretize_channel(Family::T, -0.27, 2.0, 0.5, ZeroBC::Free,
                                     EpsBC::Free, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(discretize_channel(Family::Tilde, 0.5, 1.0, 0.5, ZeroBC::Free,
                                     EpsBC::Free, 64),
                  std::invalid_argument);
  // inverse coefficient with beta > 1 has no wall at all
  CHECK_NOTHROW(discretize_channel(Family::Tilde, 0.25, 2.0, 0.5, ZeroBC::Free,
                                   EpsBC::Free, 64));
  // explicit override
  CHECK_NOTHROW(discretize_channel(Family::T, 0.25, 2.0, 0.5, ZeroBC::Free,
                                   EpsBC::Free, 64, 0.0, true));
  CHECK_THROWS_AS(discretize_channel(Family::T, 0.1, 0.8, 0.5, ZeroBC::Free,
                                     EpsBC::Free, 64),
                  std::invalid_argument);
}

TEST_CASE("recomputed quotient dimensions match the analytic table") {
  for (double alpha : {1.1, 1.5, 2.0, 3.0}) {
    INFO("alpha = " << alpha);
    auto gb2 = gb_normal_form(catalog_cross_section("torus2"));
    auto o = oracle_quotient_dim(gb2, alpha, 192);
    CHECK(o.dim == quotient_dimension(gb2, alpha).dim);
    CHECK(o.dim == 2);
    CHECK_FALSE(o.borderline);

    auto sig = signature_normal_form(catalog_cross_section("torus3"));
    auto os = oracle_quotient_dim(sig, alpha, 192);
    CHECK(os.dim == quotient_dimension(sig, alpha).dim);
    CHECK(os.dim == 0);
    CHECK(os.channels_checked == 0);

    auto dt = dirac_normal_form(catalog_cross_section("torus3"),
                                SpinStructure::Trivial);
    auto od = oracle_quotient_dim(dt, alpha, 192);
    CHECK(od.dim == quotient_dimension(dt, alpha).dim);
    CHECK(od.dim == 2);

    auto ds = dirac_normal_form(catalog_cross_section("sphere3"),
                                SpinStructure::Trivial);
    CHECK(oracle_quotient_dim(ds, alpha, 192).dim == 0);
  }
}
