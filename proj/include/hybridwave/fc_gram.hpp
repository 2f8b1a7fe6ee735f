#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "hybridwave/core.hpp"

namespace hybridwave {

// Blend-to-zero Fourier continuation operator. Maps the last d samples of a
// sequence (unit spacing) to C continuation values that bring the data
// smoothly down to zero; the left end is handled by reflection.
class FCGramOperator {
 public:
  FCGramOperator(int d, int C) : d_(d), C_(C) {
    require(d >= 2, "FC(Gram): need at least two matching points");
    require(C >= d, "FC(Gram): continuation length must be at least d");
    build();
  }

  int d() const { return d_; }
  int C() const { return C_; }
  const Eigen::MatrixXd& matrix() const { return A_; }
  // Largest least-squares misfit of the continuation functions over the
  // matching and zero regions, per Gram polynomial degree.
  const Eigen::VectorXd& fit_residuals() const { return residuals_; }

  // Returns data followed by C continuation values.
  template <class T>
  std::vector<T> extend(const std::vector<T>& f) const {
    const auto n = static_cast<int>(f.size());
    require(n >= d_, "FC(Gram): fewer samples than matching points");
    std::vector<T> out(f);
    out.resize(static_cast<std::size_t>(n + C_), T(0));
    for (int c = 0; c < C_; ++c) {
      T right(0), left(0);
      for (int i = 0; i < d_; ++i) {
        right += A_(c, i) * f[static_cast<std::size_t>(n - d_ + i)];
        left += A_(C_ - 1 - c, i) * f[static_cast<std::size_t>(d_ - 1 - i)];
      }
      out[static_cast<std::size_t>(n + c)] = right + left;
    }
    return out;
  }

 private:
  void build() {
    const int d = d_, C = C_;
    const int os = 20;
    const double span = 2.0 * d + C - 1.0;
    const double period = 2.0 * span;
    const int K = static_cast<int>(period / 4.0);

    auto legendre_rows = [d](const Eigen::VectorXd& x) {
      Eigen::MatrixXd V(x.size(), d);
      for (Eigen::Index r = 0; r < x.size(); ++r) {
        const double s = 2.0 * x(r) / (d - 1) - 1.0;
        double p0 = 1.0, p1 = s;
        V(r, 0) = 1.0;
        if (d > 1) V(r, 1) = s;
        for (int k = 2; k < d; ++k) {
          const double p2 = ((2.0 * k - 1.0) * s * p1 - (k - 1.0) * p0) / k;
          V(r, k) = p2;
          p0 = p1;
          p1 = p2;
        }
      }
      return V;
    };
    auto trig_rows = [K, period](const Eigen::VectorXd& x) {
      Eigen::MatrixXd T(x.size(), 2 * K + 1);
      for (Eigen::Index r = 0; r < x.size(); ++r) {
        T(r, 0) = 1.0;
        for (int k = 1; k <= K; ++k) {
          const double th = two_pi * k * x(r) / period;
          T(r, k) = std::cos(th);
          T(r, K + k) = std::sin(th);
        }
      }
      return T;
    };

    Eigen::VectorXd nodes = Eigen::VectorXd::LinSpaced(d, 0.0, d - 1.0);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(legendre_rows(nodes));
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
    Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(d, d));

    const int nf = (d - 1) * os + 1;
    Eigen::VectorXd xm = Eigen::VectorXd::LinSpaced(nf, 0.0, d - 1.0);
    Eigen::VectorXd xz = Eigen::VectorXd::LinSpaced(nf, double(d + C), span);
    Eigen::MatrixXd lhs(2 * nf, 2 * K + 1);
    lhs << trig_rows(xm), trig_rows(xz);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(2 * nf, d);
    rhs.topRows(nf) = legendre_rows(xm) * Rinv;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& S = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < S.size() && S(rank) > 1e-12 * S(0)) ++rank;
    if (rank < d)
      throw SolverError("FC(Gram): continuation least squares rank " +
                            std::to_string(rank) + " too small",
                        0, 0.0);
    Eigen::MatrixXd coef =
        svd.matrixV().leftCols(rank) *
        (S.head(rank).cwiseInverse().asDiagonal() * (svd.matrixU().leftCols(rank).transpose() * rhs));
    residuals_ = (lhs * coef - rhs).cwiseAbs().colwise().maxCoeff().transpose();

    Eigen::VectorXd xe = Eigen::VectorXd::LinSpaced(C, double(d), double(d + C - 1));
    A_ = trig_rows(xe) * coef * Q.transpose();
  }

  int d_, C_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd residuals_;
};

// Shared, lazily built operators keyed by (d, C).
inline std::shared_ptr<const FCGramOperator> fc_gram_operator(int d, int C) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const FCGramOperator>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{d, C}];
  if (!slot) slot = std::make_shared<const FCGramOperator>(d, C);
  return slot;
}

inline FCGramOperator build_fc_gram_operator(int d = 10, int C = 27) {
  return FCGramOperator(d, C);
}

}  // namespace hybridwave
